//! Frontend for GSL, the deterministic JavaScript-like subset the runtime
//! interprets. Covers lexing, parsing, the AST and a canonical printer.
//!
//! The grammar, in brief: `var` declarations, assignments, `if`/`else`,
//! `while` (with an optional `while@N` iteration cap, default 10000),
//! `return`, expression statements, function declarations and anonymous
//! function expressions, `{}` as the only object constructor, string `+`
//! concatenation, the comparison operators `== != < > <= >=`, member and
//! index access, and calls. String methods: `substring`, `indexOf`,
//! `replace`, `toLowerCase`, `charAt`, plus the `.length` property.
//! Browser facilities (`document`, `location`, `localStorage`, `fetch`,
//! element methods) are host objects provided by the runtime, not part of
//! the language.

pub mod ast;
mod lexer;
pub mod loc;
mod parser;
mod printer;

use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{BinOp, Block, Expr, FuncDef, Script, Stmt, DEFAULT_WHILE_CAP};
pub use loc::{ScriptId, SourceLoc};
pub use parser::parse_script;
pub use printer::print_script;

#[derive(Debug, Clone, Error, PartialEq, Eq, Serialize, Deserialize)]
#[error("{loc}: {message}")]
pub struct ParseError {
    pub loc: SourceLoc,
    pub message: String,
}

impl ParseError {
    pub fn new(loc: SourceLoc, message: impl Into<String>) -> Self {
        ParseError {
            loc,
            message: message.into(),
        }
    }
}

/// Structural equality, ignoring source locations. Used by the round-trip
/// tests: printing changes layout, so locations are not preserved.
pub fn ast_eq(a: &Script, b: &Script) -> bool {
    erase_locs(a) == erase_locs(b)
}

fn erase_locs(script: &Script) -> Script {
    let dummy = SourceLoc::new(ScriptId::new("_"), 1, 1);
    Script {
        id: ScriptId::new("_"),
        root: Rc::new(erase_block(&script.root, &dummy)),
    }
}

fn erase_block(block: &Block, d: &SourceLoc) -> Block {
    Block {
        stmts: block.stmts.iter().map(|s| erase_stmt(s, d)).collect(),
        loc: d.clone(),
    }
}

fn erase_stmt(stmt: &Stmt, d: &SourceLoc) -> Stmt {
    match stmt {
        Stmt::VarDecl { name, init, .. } => Stmt::VarDecl {
            name: name.clone(),
            init: init.as_ref().map(|e| erase_expr(e, d)),
            loc: d.clone(),
        },
        Stmt::FuncDecl(def) => Stmt::FuncDecl(erase_func(def, d)),
        Stmt::Assign { target, value, .. } => Stmt::Assign {
            target: erase_expr(target, d),
            value: erase_expr(value, d),
            loc: d.clone(),
        },
        Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        } => Stmt::If {
            cond: erase_expr(cond, d),
            then_block: erase_block(then_block, d),
            else_block: else_block.as_ref().map(|b| erase_block(b, d)),
            loc: d.clone(),
        },
        Stmt::While {
            cond, body, cap, ..
        } => Stmt::While {
            cond: erase_expr(cond, d),
            body: erase_block(body, d),
            cap: *cap,
            loc: d.clone(),
        },
        Stmt::Return { value, .. } => Stmt::Return {
            value: value.as_ref().map(|e| erase_expr(e, d)),
            loc: d.clone(),
        },
        Stmt::Expr { expr, .. } => Stmt::Expr {
            expr: erase_expr(expr, d),
            loc: d.clone(),
        },
    }
}

fn erase_func(def: &FuncDef, d: &SourceLoc) -> FuncDef {
    FuncDef {
        name: def.name.clone(),
        params: def.params.clone(),
        body: Rc::new(erase_block(&def.body, d)),
        loc: d.clone(),
    }
}

fn erase_expr(expr: &Expr, d: &SourceLoc) -> Expr {
    match expr {
        Expr::Str(s, _) => Expr::Str(s.clone(), d.clone()),
        Expr::Num(n, _) => Expr::Num(*n, d.clone()),
        Expr::Bool(b, _) => Expr::Bool(*b, d.clone()),
        Expr::Ident(name, _) => Expr::Ident(name.clone(), d.clone()),
        Expr::ObjectLit(_) => Expr::ObjectLit(d.clone()),
        Expr::Func(def) => Expr::Func(erase_func(def, d)),
        Expr::Member { object, prop, .. } => Expr::Member {
            object: Box::new(erase_expr(object, d)),
            prop: prop.clone(),
            loc: d.clone(),
        },
        Expr::Index { object, index, .. } => Expr::Index {
            object: Box::new(erase_expr(object, d)),
            index: Box::new(erase_expr(index, d)),
            loc: d.clone(),
        },
        Expr::Call { callee, args, .. } => Expr::Call {
            callee: Box::new(erase_expr(callee, d)),
            args: args.iter().map(|a| erase_expr(a, d)).collect(),
            loc: d.clone(),
        },
        Expr::MethodCall {
            object,
            method,
            args,
            ..
        } => Expr::MethodCall {
            object: Box::new(erase_expr(object, d)),
            method: method.clone(),
            args: args.iter().map(|a| erase_expr(a, d)).collect(),
            loc: d.clone(),
        },
        Expr::BinOp {
            op, left, right, ..
        } => Expr::BinOp {
            op: *op,
            left: Box::new(erase_expr(left, d)),
            right: Box::new(erase_expr(right, d)),
            loc: d.clone(),
        },
        Expr::EventRegister {
            target,
            event,
            handler,
            ..
        } => Expr::EventRegister {
            target: Box::new(erase_expr(target, d)),
            event: Box::new(erase_expr(event, d)),
            handler: Box::new(erase_expr(handler, d)),
            loc: d.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Script {
        parse_script(text, "test.gs").expect("parse")
    }

    #[test]
    fn minimal_var_decl() {
        let script = parse("var x = 1;");
        assert_eq!(script.root.stmts.len(), 1);
        match &script.root.stmts[0] {
            Stmt::VarDecl { name, init, .. } => {
                assert_eq!(name, "x");
                assert!(matches!(init, Some(Expr::Num(n, _)) if *n == 1.0));
            }
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn guard_script_shape() {
        // An indexOf guard in front of a document.write, the pattern the
        // input generator keys on.
        let text = "var loc = location.href;\n\
                    if (loc.indexOf(\"show\") > -1) {\n\
                        document.write(\"mode: \" + loc);\n\
                    }\n";
        let script = parse(text);
        match &script.root.stmts[1] {
            Stmt::If { cond, .. } => match cond {
                Expr::BinOp {
                    op, left, right, ..
                } => {
                    assert_eq!(*op, BinOp::Gt);
                    assert!(
                        matches!(&**left, Expr::MethodCall { method, .. } if method == "indexOf")
                    );
                    assert!(matches!(&**right, Expr::Num(n, _) if *n == -1.0));
                }
                other => panic!("unexpected cond {other:?}"),
            },
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn malformed_input_reports_first_violation() {
        let err = parse_script("var x = ;", "bad.gs").unwrap_err();
        assert_eq!(err.loc.line, 1);
        assert!(err.message.contains("expected expression"));
    }

    #[test]
    fn event_register_is_normalized() {
        let script = parse("el.addEventListener(\"click\", handler);");
        match &script.root.stmts[0] {
            Stmt::Expr {
                expr: Expr::EventRegister { event, handler, .. },
                ..
            } => {
                assert!(matches!(&**event, Expr::Str(s, _) if s == "click"));
                assert!(matches!(&**handler, Expr::Ident(n, _) if n == "handler"));
            }
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn while_cap_parses_and_prints() {
        let script = parse("while@500 (x < 3) { x = x + 1; }");
        match &script.root.stmts[0] {
            Stmt::While { cap, .. } => assert_eq!(*cap, 500),
            other => panic!("unexpected stmt {other:?}"),
        }
        let printed = print_script(&script);
        assert!(printed.contains("while@500"));
        assert!(ast_eq(&script, &parse_script(&printed, "rt.gs").unwrap()));
    }

    #[test]
    fn statement_locs_are_distinct() {
        let text = "var a = 1;\nvar b = 2;\nfunction f() {\n    return 3;\n}\n";
        let script = parse(text);
        let mut locs: Vec<_> = script.root.stmts.iter().map(|s| s.loc().clone()).collect();
        locs.sort();
        locs.dedup();
        assert_eq!(locs.len(), script.root.stmts.len());
    }

    #[test]
    fn round_trip_is_stable() {
        let samples = [
            "var x = 1;",
            "var registry = {};\nregistry[\"open\"] = function () {\n    dispatch(\"open\");\n};",
            "if (a == \"x\") { f(); } else { g(1 + 2, \"s\"); }",
            "while (i < 10) { i = i + 1; }",
            "obj.go = function () { return -1; };\nother.go();",
            "document.getElementById(\"btn\").addEventListener(\"click\", function () { run(); });",
            "var t = s.substring(1, 4).toLowerCase();",
        ];
        for text in samples {
            let first = parse(text);
            let printed = print_script(&first);
            let second = parse_script(&printed, "rt.gs").expect("reparse");
            assert!(ast_eq(&first, &second), "round trip failed for {text}");
            let printed_again = print_script(&second);
            assert_eq!(printed, printed_again);
        }
    }
}
