use std::rc::Rc;

use super::ast::*;
use super::lexer::{lex, Spanned, Tok};
use super::loc::{ScriptId, SourceLoc};
use super::ParseError;

/// Parse one script. The result is a `Block` covering the whole file.
/// Parsing is deterministic: the same text always yields the same tree.
pub fn parse_script(text: &str, script_id: impl Into<String>) -> Result<Script, ParseError> {
    let id = ScriptId::new(script_id);
    let toks = lex(text, &id)?;
    let mut p = Parser { toks, pos: 0 };
    let root = p.block_until_eof(&id)?;
    Ok(Script {
        id,
        root: Rc::new(root),
    })
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<Spanned, ParseError> {
        if std::mem::discriminant(&self.peek().tok) == std::mem::discriminant(want) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let at = self.peek();
        ParseError::new(
            at.loc.clone(),
            format!("expected {expected}, found {}", at.tok.describe()),
        )
    }

    fn ident(&mut self) -> Result<(String, SourceLoc), ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => {
                let sp = self.bump();
                Ok((name, sp.loc))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn block_until_eof(&mut self, id: &ScriptId) -> Result<Block, ParseError> {
        let loc = SourceLoc::new(id.clone(), 1, 1);
        let mut stmts = Vec::new();
        while !matches!(self.peek().tok, Tok::Eof) {
            stmts.push(self.stmt()?);
        }
        Ok(Block { stmts, loc })
    }

    fn braced_block(&mut self) -> Result<Block, ParseError> {
        let open = self.expect(&Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !matches!(self.peek().tok, Tok::RBrace) {
            if matches!(self.peek().tok, Tok::Eof) {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(Block {
            stmts,
            loc: open.loc,
        })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        match self.peek().tok.clone() {
            Tok::KwVar => {
                let kw = self.bump();
                let (name, _) = self.ident()?;
                let init = if matches!(self.peek().tok, Tok::Assign) {
                    self.bump();
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(&Tok::Semi)?;
                Ok(Stmt::VarDecl {
                    name,
                    init,
                    loc: kw.loc,
                })
            }
            Tok::KwFunction => {
                let kw = self.bump();
                let (name, _) = self.ident()?;
                let (params, body) = self.func_rest()?;
                Ok(Stmt::FuncDecl(FuncDef {
                    name: Some(name),
                    params,
                    body: Rc::new(body),
                    loc: kw.loc,
                }))
            }
            Tok::KwIf => self.if_stmt(),
            Tok::KwWhile => {
                let kw = self.bump();
                let cap = if matches!(self.peek().tok, Tok::At) {
                    self.bump();
                    match self.peek().tok.clone() {
                        Tok::Num(n) if n >= 1.0 && n.fract() == 0.0 => {
                            self.bump();
                            n as u32
                        }
                        _ => return Err(self.unexpected("iteration cap (positive integer)")),
                    }
                } else {
                    DEFAULT_WHILE_CAP
                };
                self.expect(&Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(&Tok::RParen)?;
                let body = self.braced_block()?;
                Ok(Stmt::While {
                    cond,
                    body,
                    cap,
                    loc: kw.loc,
                })
            }
            Tok::KwReturn => {
                let kw = self.bump();
                let value = if matches!(self.peek().tok, Tok::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(&Tok::Semi)?;
                Ok(Stmt::Return {
                    value,
                    loc: kw.loc,
                })
            }
            _ => {
                let loc = self.peek().loc.clone();
                let expr = self.expr()?;
                if matches!(self.peek().tok, Tok::Assign) {
                    match expr {
                        Expr::Ident(..) | Expr::Member { .. } | Expr::Index { .. } => {}
                        _ => {
                            return Err(ParseError::new(
                                loc,
                                "invalid assignment target (expected variable, member or index)",
                            ))
                        }
                    }
                    self.bump();
                    let value = self.expr()?;
                    self.expect(&Tok::Semi)?;
                    Ok(Stmt::Assign {
                        target: expr,
                        value,
                        loc,
                    })
                } else {
                    self.expect(&Tok::Semi)?;
                    Ok(Stmt::Expr { expr, loc })
                }
            }
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt, ParseError> {
        let kw = self.expect(&Tok::KwIf)?;
        self.expect(&Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(&Tok::RParen)?;
        let then_block = self.braced_block()?;
        let else_block = if matches!(self.peek().tok, Tok::KwElse) {
            self.bump();
            if matches!(self.peek().tok, Tok::KwIf) {
                // `else if` desugars to an else block holding one if statement.
                let nested_loc = self.peek().loc.clone();
                let nested = self.if_stmt()?;
                Some(Block {
                    stmts: vec![nested],
                    loc: nested_loc,
                })
            } else {
                Some(self.braced_block()?)
            }
        } else {
            None
        };
        Ok(Stmt::If {
            cond,
            then_block,
            else_block,
            loc: kw.loc,
        })
    }

    fn func_rest(&mut self) -> Result<(Vec<String>, Block), ParseError> {
        self.expect(&Tok::LParen)?;
        let mut params = Vec::new();
        if !matches!(self.peek().tok, Tok::RParen) {
            loop {
                let (p, _) = self.ident()?;
                params.push(p);
                if matches!(self.peek().tok, Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        let body = self.braced_block()?;
        Ok((params, body))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let left = self.additive()?;
        let op = match self.peek().tok {
            Tok::EqEq => Some(BinOp::Eq),
            Tok::NotEq => Some(BinOp::Ne),
            Tok::Lt => Some(BinOp::Lt),
            Tok::Gt => Some(BinOp::Gt),
            Tok::Le => Some(BinOp::Le),
            Tok::Ge => Some(BinOp::Ge),
            _ => None,
        };
        if let Some(op) = op {
            let op_tok = self.bump();
            let right = self.additive()?;
            Ok(Expr::BinOp {
                op,
                left: Box::new(left),
                right: Box::new(right),
                loc: op_tok.loc,
            })
        } else {
            Ok(left)
        }
    }

    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.unary()?;
        while matches!(self.peek().tok, Tok::Plus) {
            let op_tok = self.bump();
            let right = self.unary()?;
            left = Expr::BinOp {
                op: BinOp::Add,
                left: Box::new(left),
                right: Box::new(right),
                loc: op_tok.loc,
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek().tok, Tok::Minus) {
            let minus = self.bump();
            match self.peek().tok.clone() {
                Tok::Num(n) => {
                    self.bump();
                    Ok(Expr::Num(-n, minus.loc))
                }
                _ => Err(self.unexpected("number after `-`")),
            }
        } else {
            self.postfix()
        }
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut expr = self.primary()?;
        loop {
            match self.peek().tok.clone() {
                Tok::Dot => {
                    self.bump();
                    let (name, name_loc) = self.ident()?;
                    if matches!(self.peek().tok, Tok::LParen) {
                        let args = self.call_args()?;
                        expr = if name == "addEventListener" && args.len() == 2 {
                            let mut it = args.into_iter();
                            Expr::EventRegister {
                                target: Box::new(expr),
                                event: Box::new(it.next().unwrap()),
                                handler: Box::new(it.next().unwrap()),
                                loc: name_loc,
                            }
                        } else {
                            Expr::MethodCall {
                                object: Box::new(expr),
                                method: name,
                                args,
                                loc: name_loc,
                            }
                        };
                    } else {
                        expr = Expr::Member {
                            object: Box::new(expr),
                            prop: name,
                            loc: name_loc,
                        };
                    }
                }
                Tok::LBracket => {
                    let open = self.bump();
                    let index = self.expr()?;
                    self.expect(&Tok::RBracket)?;
                    expr = Expr::Index {
                        object: Box::new(expr),
                        index: Box::new(index),
                        loc: open.loc,
                    };
                }
                Tok::LParen => {
                    let loc = expr.loc().clone();
                    let args = self.call_args()?;
                    expr = Expr::Call {
                        callee: Box::new(expr),
                        args,
                        loc,
                    };
                }
                _ => break,
            }
        }
        Ok(expr)
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if !matches!(self.peek().tok, Tok::RParen) {
            loop {
                args.push(self.expr()?);
                if matches!(self.peek().tok, Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let sp = self.peek().clone();
        match sp.tok {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(n, sp.loc))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s, sp.loc))
            }
            Tok::KwTrue => {
                self.bump();
                Ok(Expr::Bool(true, sp.loc))
            }
            Tok::KwFalse => {
                self.bump();
                Ok(Expr::Bool(false, sp.loc))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Ident(name, sp.loc))
            }
            Tok::KwFunction => {
                self.bump();
                // Function expressions are anonymous; named ones are declarations.
                let (params, body) = self.func_rest()?;
                Ok(Expr::Func(FuncDef {
                    name: None,
                    params,
                    body: Rc::new(body),
                    loc: sp.loc,
                }))
            }
            Tok::LBrace => {
                self.bump();
                if matches!(self.peek().tok, Tok::RBrace) {
                    self.bump();
                    Ok(Expr::ObjectLit(sp.loc))
                } else {
                    Err(self.unexpected("`}` (only empty object literals are supported)"))
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}
