//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar (whitespace is insignificant between tokens):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := factor ("*" factor)*
//! factor  := "-" factor | power
//! power   := atom ("^" integer)?
//! atom    := integer ("/" integer)? | ident | "(" expr ")"
//! ident   := "x" | "y" | "xp" | "yp"
//! ```
//!
//! Implicit multiplication is rejected; `^` takes a non-negative integer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{var_names, Poly, Poly2, Poly4};
use super::PolyError;

pub fn parse_poly2(text: &str) -> Result<Poly2, PolyError> {
    parse_poly(text)
}

pub fn parse_poly4(text: &str) -> Result<Poly4, PolyError> {
    parse_poly(text)
}

/// Parses `text` into a polynomial over the `N`-variable ring (`N` = 2 or 4).
pub fn parse_poly<const N: usize>(text: &str) -> Result<Poly<N>, PolyError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        names: var_names(N),
    };
    let out = p.expr::<N>()?;
    if let Some(t) = p.peek() {
        return Err(PolyError::Syntax {
            offset: t.offset,
            message: format!("unexpected {}", t.kind.describe()),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    /// A literal that is not an integer, e.g. `1.5`. Only legal nowhere, but
    /// lexed so that `x^1.5` reports a precise error.
    Decimal(String),
}

impl Kind {
    fn describe(&self) -> String {
        match self {
            Kind::Int(i) => format!("number {i}"),
            Kind::Ident(s) => format!("identifier '{s}'"),
            Kind::Plus => "'+'".into(),
            Kind::Minus => "'-'".into(),
            Kind::Star => "'*'".into(),
            Kind::Slash => "'/'".into(),
            Kind::Caret => "'^'".into(),
            Kind::LParen => "'('".into(),
            Kind::RParen => "')'".into(),
            Kind::Decimal(s) => format!("number {s}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Kind::Plus,
            b'-' => Kind::Minus,
            b'*' => Kind::Star,
            b'/' => Kind::Slash,
            b'^' => Kind::Caret,
            b'(' => Kind::LParen,
            b')' => Kind::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    out.push(Token {
                        kind: Kind::Decimal(text[start..i].to_string()),
                        offset: start,
                    });
                } else {
                    let n: BigInt = text[start..i].parse().expect("digits");
                    out.push(Token {
                        kind: Kind::Int(n),
                        offset: start,
                    });
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: Kind::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(PolyError::Syntax {
                    offset: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        };
        out.push(Token {
            kind,
            offset: start,
        });
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    names: &'static [&'static str],
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr<const N: usize>(&mut self) -> Result<Poly<N>, PolyError> {
        let mut acc = self.term::<N>()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(Kind::Plus) => {
                    self.pos += 1;
                    acc = acc + self.term::<N>()?;
                }
                Some(Kind::Minus) => {
                    self.pos += 1;
                    acc = acc - self.term::<N>()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<const N: usize>(&mut self) -> Result<Poly<N>, PolyError> {
        let mut acc = self.factor::<N>()?;
        while let Some(Kind::Star) = self.peek().map(|t| &t.kind) {
            self.pos += 1;
            acc = acc * self.factor::<N>()?;
        }
        // Anything that could start a factor here would be an implicit product.
        if let Some(t) = self.peek() {
            if matches!(
                t.kind,
                Kind::Int(_) | Kind::Ident(_) | Kind::LParen | Kind::Decimal(_)
            ) {
                return Err(PolyError::Syntax {
                    offset: t.offset,
                    message: "implicit multiplication is not allowed; use '*'".into(),
                });
            }
        }
        Ok(acc)
    }

    fn factor<const N: usize>(&mut self) -> Result<Poly<N>, PolyError> {
        if let Some(Kind::Minus) = self.peek().map(|t| &t.kind) {
            self.pos += 1;
            return Ok(-self.factor::<N>()?);
        }
        self.power::<N>()
    }

    fn power<const N: usize>(&mut self) -> Result<Poly<N>, PolyError> {
        let base = self.atom::<N>()?;
        if let Some(Kind::Caret) = self.peek().map(|t| &t.kind) {
            self.pos += 1;
            let offset = self.offset();
            let exp = match self.next().map(|t| t.kind) {
                Some(Kind::Int(n)) => n,
                Some(Kind::Decimal(_)) | Some(Kind::Minus) | Some(Kind::Slash) => {
                    return Err(PolyError::NonIntegerExponent { offset })
                }
                Some(k) => {
                    return Err(PolyError::Syntax {
                        offset,
                        message: format!("expected integer exponent, found {}", k.describe()),
                    })
                }
                None => {
                    return Err(PolyError::Syntax {
                        offset,
                        message: "expected integer exponent, found end of input".into(),
                    })
                }
            };
            if let Some(Kind::Slash) = self.peek().map(|t| &t.kind) {
                return Err(PolyError::NonIntegerExponent { offset });
            }
            if let Some(Kind::Caret) = self.peek().map(|t| &t.kind) {
                return Err(PolyError::Syntax {
                    offset: self.offset(),
                    message: "chained exponents need parentheses".into(),
                });
            }
            let e: u32 = exp.try_into().map_err(|_| PolyError::Syntax {
                offset,
                message: "exponent too large".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom<const N: usize>(&mut self) -> Result<Poly<N>, PolyError> {
        let offset = self.offset();
        match self.next().map(|t| t.kind) {
            Some(Kind::Int(n)) => {
                if let Some(Kind::Slash) = self.peek().map(|t| &t.kind) {
                    self.pos += 1;
                    let doff = self.offset();
                    match self.next().map(|t| t.kind) {
                        Some(Kind::Int(d)) if !d.is_zero() => {
                            Ok(Poly::constant(BigRational::new(n, d)))
                        }
                        Some(Kind::Int(_)) => Err(PolyError::Syntax {
                            offset: doff,
                            message: "zero denominator".into(),
                        }),
                        _ => Err(PolyError::Syntax {
                            offset: doff,
                            message: "'/' only forms rational literals a/b".into(),
                        }),
                    }
                } else {
                    Ok(Poly::constant(BigRational::from_integer(n)))
                }
            }
            Some(Kind::Ident(name)) => match self.names.iter().position(|n| *n == name) {
                Some(slot) => {
                    let mut e = [0u32; N];
                    e[slot] = 1;
                    Ok(Poly::monomial(BigRational::from_integer(1.into()), e))
                }
                None => Err(PolyError::UnknownIdentifier { name, offset }),
            },
            Some(Kind::LParen) => {
                let inner = self.expr::<N>()?;
                match self.next() {
                    Some(Token {
                        kind: Kind::RParen, ..
                    }) => Ok(inner),
                    Some(t) => Err(PolyError::Syntax {
                        offset: t.offset,
                        message: format!("expected ')', found {}", t.kind.describe()),
                    }),
                    None => Err(PolyError::Syntax {
                        offset: self.end,
                        message: "unclosed '('".into(),
                    }),
                }
            }
            Some(Kind::Decimal(s)) => Err(PolyError::Syntax {
                offset,
                message: format!("decimal literal {s}; write rationals as a/b"),
            }),
            Some(k) => Err(PolyError::Syntax {
                offset,
                message: format!("unexpected {}", k.describe()),
            }),
            None => Err(PolyError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_of_variables() {
        let p = parse_poly2("x + y").unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.to_string(), "x + y");
    }

    #[test]
    fn expands_powers() {
        let p = parse_poly2("x + y + (x^2 + y^2)^2").unwrap();
        assert_eq!(p.to_string(), "x^4 + 2*x^2*y^2 + y^4 + x + y");
    }

    #[test]
    fn double_plus_is_syntax_error_at_offset_4() {
        match parse_poly2("x + + y") {
            Err(PolyError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(matches!(
            parse_poly2("x^1.5"),
            Err(PolyError::NonIntegerExponent { offset: 2 })
        ));
        assert!(matches!(
            parse_poly2("x^-1"),
            Err(PolyError::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse_poly2("x^1/2"),
            Err(PolyError::NonIntegerExponent { .. })
        ));
    }

    #[test]
    fn unknown_identifiers() {
        assert!(matches!(
            parse_poly2("x + xp"),
            Err(PolyError::UnknownIdentifier { offset: 4, .. })
        ));
        assert!(parse_poly4("x*yp - xp*y").is_ok());
        assert!(matches!(
            parse_poly2("z"),
            Err(PolyError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let p = parse_poly2("-1/2*x + 3/6").unwrap();
        assert_eq!(p.to_string(), "-1/2*x + 1/2");
        assert_eq!(parse_poly2("-(x - y)").unwrap().to_string(), "-x + y");
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(matches!(parse_poly2("2x"), Err(PolyError::Syntax { offset: 1, .. })));
        assert!(matches!(parse_poly2("(x)(y)"), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_poly2(""), Err(PolyError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_poly2("(x + y"), Err(PolyError::Syntax { offset: 6, .. })));
        assert!(matches!(parse_poly2("x + * y"), Err(PolyError::Syntax { offset: 4, .. })));
        assert!(matches!(parse_poly2("1/0"), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly2("x # y"), Err(PolyError::Syntax { offset: 2, .. })));
    }
}
