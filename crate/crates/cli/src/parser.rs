//! Expression parser. Juxtaposition is the left-normed product, so
//! "x y z" reads as ((x y) z); ".L(a,b)", ".R(a)" and ".G" are operator
//! applications on the preceding factor, with optional "^n" powers.
//! "a^3" inside a product abbreviates three right-multiplications, the
//! usual shorthand for words like a c a^{2k+1}.

use num_rational::BigRational;
use num_traits::Zero;

use malcev_core::expr::Expr;

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        pos,
        message: message.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    DotL,
    DotR,
    DotG,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(s: &str) -> Result<Lexer, ParseError> {
    let bytes: Vec<char> = s.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, start));
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, start));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            '.' => {
                i += 1;
                match bytes.get(i) {
                    Some('L') => {
                        toks.push((Tok::DotL, start));
                        i += 1;
                    }
                    Some('R') => {
                        toks.push((Tok::DotR, start));
                        i += 1;
                    }
                    Some('G') => {
                        toks.push((Tok::DotG, start));
                        i += 1;
                    }
                    _ => return err(start, "expected L, R or G after '.'"),
                }
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(bytes[i] as u64 - '0' as u64))
                        .ok_or(ParseError::Syntax {
                            pos: start,
                            message: "integer literal too large".into(),
                        })?;
                    i += 1;
                }
                toks.push((Tok::Int(v), start));
            }
            c if c.is_ascii_alphabetic() => {
                // single letter, optional digits, optional #digits
                let mut name = String::new();
                name.push(c);
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    name.push(bytes[i]);
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == '#' {
                    name.push('#');
                    i += 1;
                    if !(i < bytes.len() && bytes[i].is_ascii_digit()) {
                        return err(i, "expected digits after '#'");
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        name.push(bytes[i]);
                        i += 1;
                    }
                }
                toks.push((Tok::Ident(name), start));
            }
            _ => return err(start, format!("unexpected character `{c}`")),
        }
    }
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(_, p)| p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => err(pos, format!("expected {what}")),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut negate_first = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            negate_first = true;
        }
        let mut acc = self.parse_term()?;
        if negate_first {
            acc = Expr::scale(BigRational::from_integer((-1).into()), acc);
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = Expr::add(acc, t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = Expr::sub(acc, t);
                }
                _ => return Ok(acc),
            }
        }
    }

    /// term := (rational '*')? factor+ | '0'
    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut coeff: Option<BigRational> = None;
        if let Some(Tok::Int(_)) = self.peek() {
            let pos = self.here();
            let Some(Tok::Int(n)) = self.bump() else {
                unreachable!()
            };
            let mut q = BigRational::from_integer(n.into());
            if matches!(self.peek(), Some(Tok::Slash)) {
                self.bump();
                let dpos = self.here();
                match self.bump() {
                    Some(Tok::Int(d)) if d != 0 => {
                        q /= BigRational::from_integer(d.into());
                    }
                    _ => return err(dpos, "expected nonzero denominator"),
                }
            }
            if matches!(self.peek(), Some(Tok::Star)) {
                self.bump();
                coeff = Some(q);
            } else if q.is_zero() && !self.starts_factor() {
                // the zero element
                return Ok(Expr::Zero);
            } else {
                return err(pos, "a numeric coefficient must be followed by '*'");
            }
        }
        let factors = self.parse_factor_sequence()?;
        let product = Expr::left_normed(factors);
        Ok(match coeff {
            Some(q) => Expr::scale(q, product),
            None => product,
        })
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    /// factor+ with '^n' meaning n-fold repetition in the product
    fn parse_factor_sequence(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        let pos = self.here();
        while self.starts_factor() {
            let f = self.parse_factor()?;
            let mut reps = 1u32;
            if matches!(self.peek(), Some(Tok::Caret)) {
                self.bump();
                reps = self.parse_natural()?;
            }
            for _ in 0..reps {
                out.push(f.clone());
            }
        }
        if out.is_empty() {
            return err(pos, "expected a variable, '(' or J(...)");
        }
        Ok(out)
    }

    fn parse_natural(&mut self) -> Result<u32, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Int(n)) if n <= u32::MAX as u64 => Ok(n as u32),
            _ => err(pos, "expected a natural number"),
        }
    }

    /// factor := primary postop*
    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.parse_primary()?;
        loop {
            match self.peek() {
                Some(Tok::DotL) => {
                    self.bump();
                    self.expect(Tok::LParen, "'(' after .L")?;
                    let a = self.parse_expr()?;
                    self.expect(Tok::Comma, "',' in .L(a,b)")?;
                    let b = self.parse_expr()?;
                    self.expect(Tok::RParen, "')' closing .L(a,b)")?;
                    let k = self.parse_optional_pow()?;
                    e = e.lop(a, b, k);
                }
                Some(Tok::DotR) => {
                    self.bump();
                    self.expect(Tok::LParen, "'(' after .R")?;
                    let a = self.parse_expr()?;
                    self.expect(Tok::RParen, "')' closing .R(a)")?;
                    let k = self.parse_optional_pow()?;
                    e = e.rop(a, k);
                }
                Some(Tok::DotG) => {
                    self.bump();
                    let k = self.parse_optional_pow()?;
                    e = e.gop(k);
                }
                _ => return Ok(e),
            }
        }
    }

    fn parse_optional_pow(&mut self) -> Result<u32, ParseError> {
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            self.parse_natural()
        } else {
            Ok(1)
        }
    }

    /// primary := var | '(' expr ')' | 'J(' expr ',' expr ',' expr ')'
    fn parse_primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Ident(name)) if name == "J" => {
                self.expect(Tok::LParen, "'(' after J")?;
                let a = self.parse_expr()?;
                self.expect(Tok::Comma, "',' in J(a,b,c)")?;
                let b = self.parse_expr()?;
                self.expect(Tok::Comma, "',' in J(a,b,c)")?;
                let c = self.parse_expr()?;
                self.expect(Tok::RParen, "')' closing J(a,b,c)")?;
                Ok(Expr::jac(a, b, c))
            }
            Some(Tok::Ident(name)) => Ok(Expr::var(name)),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "closing ')'")?;
                Ok(e)
            }
            _ => err(pos, "expected a variable, '(' or J(...)"),
        }
    }
}

/// Parse an expression string.
pub fn parse(s: &str) -> Result<Expr, ParseError> {
    let lexer = lex(s)?;
    let mut p = Parser {
        toks: lexer.toks,
        pos: 0,
        end: s.len(),
    };
    let e = p.parse_expr()?;
    if p.pos != p.toks.len() {
        return err(p.here(), "trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use malcev_core::expr::FreeModel;
    use malcev_core::{Alphabet, Element};

    fn to_element(s: &str) -> Element {
        let e = parse(s).unwrap();
        e.eval(&FreeModel::new(&Alphabet::xyz())).unwrap()
    }

    #[test]
    fn juxtaposition_is_left_normed() {
        let al = Alphabet::xyz();
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let z = Element::gen(&al, "z").unwrap();
        assert_eq!(to_element("x y z"), x.mul(&y).mul(&z));
        assert_eq!(to_element("xyz"), x.mul(&y).mul(&z));
        assert_eq!(to_element("x (y z)"), x.mul(&y.mul(&z)));
    }

    #[test]
    fn jacobian_and_postops() {
        let al = Alphabet::xyz();
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let z = Element::gen(&al, "z").unwrap();
        let j = Element::jacobian(&x, &y, &z);
        assert_eq!(to_element("J(x,y,z)"), j);
        assert_eq!(to_element("J(x,y,z).L(x,x)^2"), j.lop(&x, &x).lop(&x, &x));
        assert_eq!(to_element("J(x,y,z).R(y)"), j.mul(&y));
        // powers repeat the factor in the product
        assert_eq!(to_element("z x^2"), z.mul(&x).mul(&x));
        assert_eq!(to_element("z x^0 y"), z.mul(&y));
    }

    #[test]
    fn coefficients_and_signs() {
        let al = Alphabet::xyz();
        let x = Element::gen(&al, "x").unwrap();
        let y = Element::gen(&al, "y").unwrap();
        let xy = x.mul(&y);
        assert_eq!(to_element("3/2*x y"), xy.scale(&malcev_core::element::rat(3, 2)));
        assert_eq!(to_element("-x y + x y"), Element::zero(&al));
        assert_eq!(to_element("0"), Element::zero(&al));
    }

    #[test]
    fn eq27_expression_parses() {
        let e = parse("J(x,y,z).G - 6*J(x,y,z).L(x,(z y))").unwrap();
        assert_eq!(e.total_degree(), 6);
    }

    #[test]
    fn errors_carry_positions() {
        assert!(parse("x +").is_err());
        assert!(parse("J(x,y)").is_err());
        assert!(parse("x .Q(y)").is_err());
        assert!(parse("3 x").is_err());
        let e = parse("x @ y");
        match e {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 2),
            _ => panic!("expected syntax error"),
        }
    }

    #[test]
    fn unknown_variables_surface_on_eval() {
        let e = parse("w x").unwrap();
        assert!(e.eval(&FreeModel::new(&Alphabet::xyz())).is_err());
    }
}
