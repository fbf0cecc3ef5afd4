//! Syntax tree for GSL, the analysis subset interpreted by the runtime.
//!
//! The tree is deliberately small: statements, function definitions and a
//! handful of expression forms. `addEventListener` calls are normalized to a
//! dedicated [`Expr::EventRegister`] node at parse time so that event
//! registration sites are first-class for the call-graph builder.

use std::rc::Rc;

use super::loc::SourceLoc;

pub const DEFAULT_WHILE_CAP: u32 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub loc: SourceLoc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    VarDecl {
        name: String,
        init: Option<Expr>,
        loc: SourceLoc,
    },
    FuncDecl(FuncDef),
    Assign {
        target: Expr,
        value: Expr,
        loc: SourceLoc,
    },
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
        loc: SourceLoc,
    },
    While {
        cond: Expr,
        body: Block,
        /// Static iteration bound; exceeding it is a runtime error.
        cap: u32,
        loc: SourceLoc,
    },
    Return {
        value: Option<Expr>,
        loc: SourceLoc,
    },
    Expr {
        expr: Expr,
        loc: SourceLoc,
    },
}

impl Stmt {
    pub fn loc(&self) -> &SourceLoc {
        match self {
            Stmt::VarDecl { loc, .. }
            | Stmt::Assign { loc, .. }
            | Stmt::If { loc, .. }
            | Stmt::While { loc, .. }
            | Stmt::Return { loc, .. }
            | Stmt::Expr { loc, .. } => loc,
            Stmt::FuncDecl(def) => &def.loc,
        }
    }
}

/// A function declaration or expression. The body is reference-counted so the
/// runtime's function registry can hold it without cloning whole subtrees.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncDef {
    pub name: Option<String>,
    pub params: Vec<String>,
    pub body: Rc<Block>,
    pub loc: SourceLoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
        }
    }

    pub fn is_comparison(self) -> bool {
        !matches!(self, BinOp::Add)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Str(String, SourceLoc),
    Num(f64, SourceLoc),
    Bool(bool, SourceLoc),
    Ident(String, SourceLoc),
    /// Empty object literal `{}`, the only object constructor in GSL.
    ObjectLit(SourceLoc),
    Func(FuncDef),
    Member {
        object: Box<Expr>,
        prop: String,
        loc: SourceLoc,
    },
    Index {
        object: Box<Expr>,
        index: Box<Expr>,
        loc: SourceLoc,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        loc: SourceLoc,
    },
    MethodCall {
        object: Box<Expr>,
        method: String,
        args: Vec<Expr>,
        loc: SourceLoc,
    },
    BinOp {
        op: BinOp,
        left: Box<Expr>,
        right: Box<Expr>,
        loc: SourceLoc,
    },
    /// `target.addEventListener(event, handler)`, normalized at parse time.
    EventRegister {
        target: Box<Expr>,
        event: Box<Expr>,
        handler: Box<Expr>,
        loc: SourceLoc,
    },
}

impl Expr {
    pub fn loc(&self) -> &SourceLoc {
        match self {
            Expr::Str(_, loc)
            | Expr::Num(_, loc)
            | Expr::Bool(_, loc)
            | Expr::Ident(_, loc)
            | Expr::ObjectLit(loc) => loc,
            Expr::Func(def) => &def.loc,
            Expr::Member { loc, .. }
            | Expr::Index { loc, .. }
            | Expr::Call { loc, .. }
            | Expr::MethodCall { loc, .. }
            | Expr::BinOp { loc, .. }
            | Expr::EventRegister { loc, .. } => loc,
        }
    }
}

/// A parsed script: the whole-file block plus its id.
#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub id: super::loc::ScriptId,
    pub root: Rc<Block>,
}

impl Script {
    /// All function definitions in the script, in source order.
    pub fn functions(&self) -> Vec<&FuncDef> {
        let mut out = Vec::new();
        collect_funcs_block(&self.root, &mut out);
        out
    }
}

fn collect_funcs_block<'a>(block: &'a Block, out: &mut Vec<&'a FuncDef>) {
    for stmt in &block.stmts {
        collect_funcs_stmt(stmt, out);
    }
}

fn collect_funcs_stmt<'a>(stmt: &'a Stmt, out: &mut Vec<&'a FuncDef>) {
    match stmt {
        Stmt::FuncDecl(def) => {
            out.push(def);
            collect_funcs_block(&def.body, out);
        }
        Stmt::VarDecl { init, .. } => {
            if let Some(e) = init {
                collect_funcs_expr(e, out);
            }
        }
        Stmt::Assign { target, value, .. } => {
            collect_funcs_expr(target, out);
            collect_funcs_expr(value, out);
        }
        Stmt::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            collect_funcs_expr(cond, out);
            collect_funcs_block(then_block, out);
            if let Some(b) = else_block {
                collect_funcs_block(b, out);
            }
        }
        Stmt::While { cond, body, .. } => {
            collect_funcs_expr(cond, out);
            collect_funcs_block(body, out);
        }
        Stmt::Return { value, .. } => {
            if let Some(e) = value {
                collect_funcs_expr(e, out);
            }
        }
        Stmt::Expr { expr, .. } => collect_funcs_expr(expr, out),
    }
}

fn collect_funcs_expr<'a>(expr: &'a Expr, out: &mut Vec<&'a FuncDef>) {
    match expr {
        Expr::Func(def) => {
            out.push(def);
            collect_funcs_block(&def.body, out);
        }
        Expr::Member { object, .. } => collect_funcs_expr(object, out),
        Expr::Index { object, index, .. } => {
            collect_funcs_expr(object, out);
            collect_funcs_expr(index, out);
        }
        Expr::Call { callee, args, .. } => {
            collect_funcs_expr(callee, out);
            for a in args {
                collect_funcs_expr(a, out);
            }
        }
        Expr::MethodCall { object, args, .. } => {
            collect_funcs_expr(object, out);
            for a in args {
                collect_funcs_expr(a, out);
            }
        }
        Expr::BinOp { left, right, .. } => {
            collect_funcs_expr(left, out);
            collect_funcs_expr(right, out);
        }
        Expr::EventRegister {
            target,
            event,
            handler,
            ..
        } => {
            collect_funcs_expr(target, out);
            collect_funcs_expr(event, out);
            collect_funcs_expr(handler, out);
        }
        Expr::Str(..) | Expr::Num(..) | Expr::Bool(..) | Expr::Ident(..) | Expr::ObjectLit(..) => {}
    }
}
