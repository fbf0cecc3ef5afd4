use super::loc::{ScriptId, SourceLoc};
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    KwVar,
    KwFunction,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwTrue,
    KwFalse,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    At,
    Plus,
    Minus,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::KwVar => "`var`".to_string(),
            Tok::KwFunction => "`function`".to_string(),
            Tok::KwIf => "`if`".to_string(),
            Tok::KwElse => "`else`".to_string(),
            Tok::KwWhile => "`while`".to_string(),
            Tok::KwReturn => "`return`".to_string(),
            Tok::KwTrue => "`true`".to_string(),
            Tok::KwFalse => "`false`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Dot => "`.`".to_string(),
            Tok::At => "`@`".to_string(),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Assign => "`=`".to_string(),
            Tok::EqEq => "`==`".to_string(),
            Tok::NotEq => "`!=`".to_string(),
            Tok::Lt => "`<`".to_string(),
            Tok::Gt => "`>`".to_string(),
            Tok::Le => "`<=`".to_string(),
            Tok::Ge => "`>=`".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub loc: SourceLoc,
}

pub fn lex(text: &str, script: &ScriptId) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! loc {
        () => {
            SourceLoc::new(script.clone(), line, col)
        };
    }

    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '/' if i + 1 < chars.len() && chars[i + 1] == '/' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            '/' if i + 1 < chars.len() && chars[i + 1] == '*' => {
                let start = loc!();
                i += 2;
                col += 2;
                loop {
                    if i + 1 >= chars.len() {
                        return Err(ParseError::new(start, "unterminated block comment"));
                    }
                    if chars[i] == '*' && chars[i + 1] == '/' {
                        i += 2;
                        col += 2;
                        break;
                    }
                    if chars[i] == '\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                    i += 1;
                }
            }
            '"' | '\'' => {
                let start = loc!();
                let quote = c;
                i += 1;
                col += 1;
                let mut s = String::new();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(ParseError::new(start, "unterminated string literal"));
                    }
                    let ch = chars[i];
                    if ch == quote {
                        i += 1;
                        col += 1;
                        break;
                    }
                    if ch == '\\' {
                        if i + 1 >= chars.len() {
                            return Err(ParseError::new(start, "unterminated string literal"));
                        }
                        let esc = chars[i + 1];
                        let rep = match esc {
                            'n' => '\n',
                            't' => '\t',
                            '\\' => '\\',
                            '"' => '"',
                            '\'' => '\'',
                            other => {
                                return Err(ParseError::new(
                                    loc!(),
                                    format!("unknown escape `\\{other}`"),
                                ))
                            }
                        };
                        s.push(rep);
                        i += 2;
                        col += 2;
                    } else {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Str(s),
                    loc: start,
                });
            }
            '0'..='9' => {
                let start = loc!();
                let mut num = String::new();
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    // `.` only consumed when followed by a digit, so that
                    // `1.substring` style chains stay unambiguous.
                    if chars[i] == '.'
                        && !(i + 1 < chars.len() && chars[i + 1].is_ascii_digit())
                    {
                        break;
                    }
                    num.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                let value: f64 = num
                    .parse()
                    .map_err(|_| ParseError::new(start.clone(), format!("bad number `{num}`")))?;
                out.push(Spanned {
                    tok: Tok::Num(value),
                    loc: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' || c == '$' => {
                let start = loc!();
                let mut ident = String::new();
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$')
                {
                    ident.push(chars[i]);
                    i += 1;
                    col += 1;
                }
                let tok = match ident.as_str() {
                    "var" => Tok::KwVar,
                    "function" => Tok::KwFunction,
                    "if" => Tok::KwIf,
                    "else" => Tok::KwElse,
                    "while" => Tok::KwWhile,
                    "return" => Tok::KwReturn,
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    _ => Tok::Ident(ident),
                };
                out.push(Spanned { tok, loc: start });
            }
            _ => {
                let start = loc!();
                let two: Option<Tok> = if i + 1 < chars.len() {
                    match (c, chars[i + 1]) {
                        ('=', '=') => Some(Tok::EqEq),
                        ('!', '=') => Some(Tok::NotEq),
                        ('<', '=') => Some(Tok::Le),
                        ('>', '=') => Some(Tok::Ge),
                        _ => None,
                    }
                } else {
                    None
                };
                if let Some(tok) = two {
                    out.push(Spanned { tok, loc: start });
                    i += 2;
                    col += 2;
                    continue;
                }
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    '@' => Tok::At,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '=' => Tok::Assign,
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    other => {
                        return Err(ParseError::new(
                            start,
                            format!("unexpected character `{other}`"),
                        ))
                    }
                };
                out.push(Spanned { tok, loc: start });
                i += 1;
                col += 1;
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        loc: SourceLoc::new(script.clone(), line, col),
    });
    Ok(out)
}
