//! Canonical pretty-printer. `parse(print(parse(t)))` yields a tree equal to
//! `parse(t)` (locations aside, trees compare equal structurally; the
//! round-trip tests compare via [`super::ast_eq`]).

use super::ast::*;

pub fn print_script(script: &Script) -> String {
    let mut out = String::new();
    for stmt in &script.root.stmts {
        print_stmt(stmt, 0, &mut out);
    }
    out
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn print_block(block: &Block, level: usize, out: &mut String) {
    out.push_str("{\n");
    for stmt in &block.stmts {
        print_stmt(stmt, level + 1, out);
    }
    indent(level, out);
    out.push('}');
}

fn print_stmt(stmt: &Stmt, level: usize, out: &mut String) {
    indent(level, out);
    match stmt {
        Stmt::VarDecl { name, init, .. } => {
            out.push_str("var ");
            out.push_str(name);
            if let Some(e) = init {
                out.push_str(" = ");
                print_expr(e, out);
            }
            out.push_str(";\n");
        }
        Stmt::FuncDecl(def) => {
            out.push_str("function ");
            out.push_str(def.name.as_deref().unwrap_or(""));
            print_params_and_body(def, level, out);
            out.push('\n');
        }
        Stmt::Assign { target, value, .. } => {
            print_expr(target, out);
            out.push_str(" = ");
            print_expr(value, out);
            out.push_str(";\n");
        }
        Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            out.push_str("if (");
            print_expr(cond, out);
            out.push_str(") ");
            print_block(then_block, level, out);
            if let Some(b) = else_block {
                out.push_str(" else ");
                print_block(b, level, out);
            }
            out.push('\n');
        }
        Stmt::While {
            cond, body, cap, ..
        } => {
            out.push_str("while");
            if *cap != DEFAULT_WHILE_CAP {
                out.push('@');
                out.push_str(&cap.to_string());
            }
            out.push_str(" (");
            print_expr(cond, out);
            out.push_str(") ");
            print_block(body, level, out);
            out.push('\n');
        }
        Stmt::Return { value, .. } => {
            out.push_str("return");
            if let Some(e) = value {
                out.push(' ');
                print_expr(e, out);
            }
            out.push_str(";\n");
        }
        Stmt::Expr { expr, .. } => {
            print_expr(expr, out);
            out.push_str(";\n");
        }
    }
}

fn print_params_and_body(def: &FuncDef, level: usize, out: &mut String) {
    out.push('(');
    for (i, p) in def.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(p);
    }
    out.push_str(") ");
    print_block(&def.body, level, out);
}

fn quote(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
}

fn print_num(n: f64, out: &mut String) {
    if n < 0.0 {
        out.push('-');
        out.push_str(&format!("{}", -n));
    } else {
        out.push_str(&format!("{n}"));
    }
}

/// Wrap expressions that would not re-parse correctly as a postfix base.
fn print_postfix_base(e: &Expr, out: &mut String) {
    let needs_parens = matches!(e, Expr::BinOp { .. } | Expr::Func(_));
    if needs_parens {
        out.push('(');
        print_expr(e, out);
        out.push(')');
    } else {
        print_expr(e, out);
    }
}

fn print_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Str(s, _) => quote(s, out),
        Expr::Num(n, _) => print_num(*n, out),
        Expr::Bool(b, _) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Ident(name, _) => out.push_str(name),
        Expr::ObjectLit(_) => out.push_str("{}"),
        Expr::Func(def) => {
            out.push_str("function ");
            print_params_and_body(def, 0, out);
        }
        Expr::Member { object, prop, .. } => {
            print_postfix_base(object, out);
            out.push('.');
            out.push_str(prop);
        }
        Expr::Index { object, index, .. } => {
            print_postfix_base(object, out);
            out.push('[');
            print_expr(index, out);
            out.push(']');
        }
        Expr::Call { callee, args, .. } => {
            print_postfix_base(callee, out);
            print_args(args, out);
        }
        Expr::MethodCall {
            object,
            method,
            args,
            ..
        } => {
            print_postfix_base(object, out);
            out.push('.');
            out.push_str(method);
            print_args(args, out);
        }
        Expr::BinOp {
            op, left, right, ..
        } => {
            print_operand(left, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_operand(right, out);
        }
        Expr::EventRegister {
            target,
            event,
            handler,
            ..
        } => {
            print_postfix_base(target, out);
            out.push_str(".addEventListener(");
            print_expr(event, out);
            out.push_str(", ");
            print_expr(handler, out);
            out.push(')');
        }
    }
}

/// Comparison operands must stay additive; parenthesize nested comparisons.
fn print_operand(e: &Expr, out: &mut String) {
    let needs_parens = matches!(
        e,
        Expr::BinOp { op, .. } if op.is_comparison()
    );
    if needs_parens {
        out.push('(');
        print_expr(e, out);
        out.push(')');
    } else {
        print_expr(e, out);
    }
}

fn print_args(args: &[Expr], out: &mut String) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        print_expr(a, out);
    }
    out.push(')');
}
