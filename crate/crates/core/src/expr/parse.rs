use std::collections::HashMap;

use super::{BinaryOp, Expr, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unbound parameter `${0}`")]
    UnboundParameter(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Param(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
        {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                expected: "a number".into(),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let is_param = c == '$';
            if is_param {
                i += 1;
            }
            let name_start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = src[name_start..i].to_string();
            if name.is_empty() {
                return Err(ParseError::Syntax {
                    pos: start,
                    expected: "a parameter name after `$`".into(),
                });
            }
            out.push((
                start,
                if is_param {
                    Tok::Param(name)
                } else {
                    Tok::Ident(name)
                },
            ));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        expected: format!("an operator, operand or parenthesis, found `{c}`"),
                    })
                }
            };
            out.push((start, tok));
            i += c.len_utf8();
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    params: &'a HashMap<String, f64>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos(),
            expected: expected.to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinaryOp::Add,
                Tok::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinaryOp::Mul,
                Tok::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            if let Tok::Num(v) = *self.peek() {
                if *self.peek2() != Tok::Op('^') {
                    self.bump();
                    return Ok(Expr::Const(-v));
                }
            }
            let inner = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exponent = self.unary()?;
        if !exponent.is_constant() {
            return Err(ParseError::Syntax {
                pos,
                expected: "a constant exponent".into(),
            });
        }
        Ok(Expr::binary(BinaryOp::Pow, base, exponent))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Param(name) => {
                self.bump();
                match self.params.get(&name) {
                    Some(v) => Ok(Expr::Const(*v)),
                    None => Err(ParseError::UnboundParameter(name)),
                }
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                self.bump();
                match name.as_str() {
                    "y" => Ok(Expr::Var(Var::Y)),
                    "x" => Ok(Expr::Var(Var::X)),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    _ => match UnaryOp::from_name(&name) {
                        Some(op) => {
                            self.expect(Tok::LParen, "`(` after function name")?;
                            let arg = self.expr()?;
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(Expr::unary(op, arg))
                        }
                        None => Err(ParseError::Syntax {
                            pos,
                            expected: format!("`x`, `y`, `pi` or a function name, found `{name}`"),
                        }),
                    },
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.fail("a number, variable, parameter, function call or `(`"),
        }
    }
}

/// Parses an expression without parameters.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    parse_with(src, &HashMap::new())
}

/// Parses an expression, substituting every `$name` from `params`.
pub fn parse_with(src: &str, params: &HashMap<String, f64>) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        params,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("an operator or end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_position() {
        match parse("sin(y") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        match parse("2 * # y") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("y^y"),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(parse("foo(y)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("(y+1))"),
            Err(ParseError::Syntax { pos: 5, .. })
        ));
        assert!(matches!(parse(""), Err(ParseError::Syntax { pos: 0, .. })));
    }

    #[test]
    fn unbound_parameter() {
        assert_eq!(
            parse("$kappa*y"),
            Err(ParseError::UnboundParameter("kappa".into()))
        );
    }

    #[test]
    fn precedence() {
        let e = parse("1 + 2*3^2 - -4/2").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 1.0 + 18.0 + 2.0);
        // right associative power
        assert_eq!(parse("2^3^2").unwrap().eval(0.0).unwrap(), 512.0);
        assert_eq!(parse("1.5e-3*y").unwrap().eval(2.0).unwrap(), 3e-3);
        assert!((parse("pi").unwrap().eval(0.0).unwrap() - std::f64::consts::PI).abs() < 1e-16);
    }
}
