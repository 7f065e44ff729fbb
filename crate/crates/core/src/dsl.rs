//! Text syntax for group expressions.
//!
//! ```text
//! expr     := term ("+" term)*
//! term     := (atom | "(" expr ")") ("^" mult)?
//! mult     := integer>=1 | "w"
//! atom     := "Z" | "Q" | "0" | "Z(" prime ("^" nat)? ")" | "Prufer(" prime ")"
//!           | "Jp(" prime ")" | "Prod(" prime ":" nat ("," prime ":" nat)* ")"
//!           | "R1[" charspec "]" | "CD{" family "}"
//! charspec := "def=" ("0" | "inf") ((";" | ",") prime "->" (nat | "inf"))*
//! family   := entry ("," entry)* | ("incomparable" | "descending") "(" mult ")"
//! entry    := "R1[" charspec "]" (":" mult)?
//! ```
//!
//! Whitespace between tokens is ignored. [`parse`] returns the normal form,
//! so `parse(&print(g)) == normalize(g)`.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::group_model::{normalize, GroupExpr};
use crate::mult::Mult;
use crate::prime::Prime;
use crate::types_lattice::{
    canonicalize, Characteristic, FamilySchema, Height, HeightDefault, SchemaKind, TypeClass, TypeFamily,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Parses and normalizes.
pub fn parse(text: &str) -> Result<GroupExpr, ParseError> {
    parse_raw(text).map(|g| normalize(&g))
}

/// Parses without normalizing; the tree is validated.
pub fn parse_raw(text: &str) -> Result<GroupExpr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let g = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    g.validate().map_err(|e| ParseError { offset: 0, message: e.to_string() })?;
    Ok(g)
}

/// Parses a characteristic such as `def=0; 2->inf, 3->4`.
pub fn parse_charspec(text: &str) -> Result<Characteristic, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let c = p.charspec()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(c)
}

/// Parses a characteristic and returns its type.
pub fn parse_type(text: &str) -> Result<TypeClass, ParseError> {
    parse_charspec(text).map(|c| canonicalize(&c))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn digits(&mut self) -> Result<(usize, &str), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        Ok((start, std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")))
    }

    fn prime(&mut self) -> Result<Prime, ParseError> {
        let (start, text) = self.digits()?;
        let value: BigUint = text.parse().expect("digits");
        Prime::new(value).map_err(|e| ParseError { offset: start, message: e.to_string() })
    }

    fn nat<T: std::str::FromStr>(&mut self) -> Result<T, ParseError> {
        let (start, text) = self.digits()?;
        text.parse().map_err(|_| ParseError { offset: start, message: format!("number {text} is out of range") })
    }

    fn positive<T: std::str::FromStr + PartialEq + From<u8>>(&mut self) -> Result<T, ParseError> {
        let start = self.pos;
        let n: T = self.nat()?;
        if n == T::from(0) {
            return Err(ParseError { offset: start, message: "expected a positive number".into() });
        }
        Ok(n)
    }

    fn mult(&mut self) -> Result<Mult, ParseError> {
        if self.eat("w") {
            Ok(Mult::Omega)
        } else {
            self.positive().map(Mult::Finite)
        }
    }

    fn expr(&mut self) -> Result<GroupExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat("+") {
            terms.push(self.term()?);
        }
        Ok(if terms.len() == 1 && terms[0].1 == Mult::ONE {
            terms.pop().unwrap().0
        } else {
            GroupExpr::DirectSum(terms)
        })
    }

    fn term(&mut self) -> Result<(GroupExpr, Mult), ParseError> {
        let g = if self.eat("(") {
            let g = self.expr()?;
            self.expect(")")?;
            g
        } else {
            self.atom()?
        };
        let m = if self.eat("^") { self.mult()? } else { Mult::ONE };
        Ok((g, m))
    }

    fn atom(&mut self) -> Result<GroupExpr, ParseError> {
        if self.eat("Prufer") {
            self.expect("(")?;
            let p = self.prime()?;
            self.expect(")")?;
            Ok(GroupExpr::Prufer(p))
        } else if self.eat("Z") {
            if !self.eat("(") {
                return Ok(GroupExpr::IntZ);
            }
            let p = self.prime()?;
            // `Z(p)` abbreviates `Z(p^1)`
            let n = if self.eat("^") { self.positive()? } else { 1 };
            self.expect(")")?;
            Ok(GroupExpr::Cyclic { p, n })
        } else if self.eat("Jp") {
            self.expect("(")?;
            let p = self.prime()?;
            self.expect(")")?;
            Ok(GroupExpr::Padic(p))
        } else if self.eat("Prod") {
            self.expect("(")?;
            let start = self.pos;
            let mut list = Vec::new();
            loop {
                let p = self.prime()?;
                self.expect(":")?;
                let r: u64 = self.positive()?;
                list.push((p, r));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
            let g = GroupExpr::AdicProduct(list);
            g.validate().map_err(|e| ParseError { offset: start, message: e.to_string() })?;
            Ok(g)
        } else if self.eat("R1") {
            self.expect("[")?;
            let t = self.rank_one_tail()?;
            Ok(GroupExpr::RankOne(t))
        } else if self.eat("CD") {
            self.expect("{")?;
            let f = self.family()?;
            self.expect("}")?;
            Ok(GroupExpr::CompletelyDecomposable(f))
        } else if self.eat("Q") {
            Ok(GroupExpr::RatQ)
        } else if self.eat("0") {
            Ok(GroupExpr::Zero)
        } else {
            Err(self.error("expected a group atom"))
        }
    }

    fn rank_one_tail(&mut self) -> Result<TypeClass, ParseError> {
        let c = self.charspec()?;
        self.expect("]")?;
        Ok(canonicalize(&c))
    }

    fn height(&mut self) -> Result<Height, ParseError> {
        if self.eat("inf") {
            Ok(Height::Infinite)
        } else {
            self.nat().map(Height::Finite)
        }
    }

    fn charspec(&mut self) -> Result<Characteristic, ParseError> {
        self.expect("def")?;
        self.expect("=")?;
        let default = if self.eat("inf") {
            HeightDefault::Infinity
        } else if self.eat("0") {
            HeightDefault::Zero
        } else {
            return Err(self.error("expected `0` or `inf`"));
        };
        let mut exceptions = Vec::new();
        while self.eat(";") || (self.peek() == Some(b',') && self.followed_by_digit()) {
            self.eat(",");
            let p = self.prime()?;
            self.expect("->")?;
            exceptions.push((p, self.height()?));
        }
        Ok(Characteristic::new(default, exceptions))
    }

    // A comma inside a charspec separates exceptions only when a prime
    // follows; otherwise it belongs to the enclosing family list.
    fn followed_by_digit(&self) -> bool {
        let rest = &self.src[self.pos + 1..];
        rest.iter().find(|b| !b.is_ascii_whitespace()).is_some_and(u8::is_ascii_digit)
    }

    fn family(&mut self) -> Result<TypeFamily, ParseError> {
        for (name, kind) in [("incomparable", SchemaKind::PairwiseIncomparable), ("descending", SchemaKind::Descending)] {
            if self.eat(name) {
                self.expect("(")?;
                let length = self.mult()?;
                self.expect(")")?;
                return Ok(TypeFamily::from_schema(FamilySchema::new(kind, length)));
            }
        }
        let mut entries = Vec::new();
        loop {
            self.expect("R1")?;
            self.expect("[")?;
            let t = self.rank_one_tail()?;
            let m = if self.eat(":") { self.mult()? } else { Mult::ONE };
            entries.push((t, m));
            if !self.eat(",") {
                break;
            }
        }
        Ok(TypeFamily::from_entries(entries))
    }
}

/// Prints an expression in the syntax [`parse`] accepts.
pub fn print(g: &GroupExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, g);
    out
}

fn write_expr(out: &mut String, g: &GroupExpr) {
    match g {
        GroupExpr::DirectSum(parts) => {
            for (i, (h, m)) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                write_term(out, h, *m);
            }
        }
        other => write_atom(out, other),
    }
}

fn needs_parens(g: &GroupExpr) -> bool {
    match g {
        GroupExpr::DirectSum(_) => true,
        GroupExpr::CompletelyDecomposable(f) => f.entries.len() + f.schemas.len() > 1 && !f.schemas.is_empty(),
        _ => false,
    }
}

fn write_term(out: &mut String, g: &GroupExpr, m: Mult) {
    let wrap = needs_parens(g) || (m != Mult::ONE && matches!(g, GroupExpr::CompletelyDecomposable(f) if f.schemas.len() == 1 && f.schemas[0].copies != Mult::ONE));
    if wrap {
        out.push('(');
        write_expr(out, g);
        out.push(')');
    } else {
        write_atom(out, g);
    }
    if m != Mult::ONE {
        out.push('^');
        out.push_str(&m.to_string());
    }
}

fn write_atom(out: &mut String, g: &GroupExpr) {
    use std::fmt::Write;
    match g {
        GroupExpr::Zero => out.push('0'),
        GroupExpr::IntZ => out.push('Z'),
        GroupExpr::RatQ => out.push('Q'),
        GroupExpr::Cyclic { p, n } => write!(out, "Z({p}^{n})").unwrap(),
        GroupExpr::Prufer(p) => write!(out, "Prufer({p})").unwrap(),
        GroupExpr::Padic(p) => write!(out, "Jp({p})").unwrap(),
        GroupExpr::RankOne(t) => write!(out, "R1[{t}]").unwrap(),
        GroupExpr::AdicProduct(list) => {
            out.push_str("Prod(");
            for (i, (p, r)) in list.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{p}:{r}").unwrap();
            }
            out.push(')');
        }
        GroupExpr::CompletelyDecomposable(f) => write_family(out, f),
        GroupExpr::DirectSum(_) => write_expr(out, g),
    }
}

// A family with both explicit entries and schemas has no single `CD{..}`
// spelling; it prints as a sum of one `CD{..}` per part.
fn write_family(out: &mut String, f: &TypeFamily) {
    use std::fmt::Write;
    let mut first = true;
    let mut sep = |out: &mut String| {
        if !std::mem::take(&mut first) {
            out.push_str(" + ");
        }
    };
    if !f.entries.is_empty() {
        sep(out);
        out.push_str("CD{");
        for (i, (t, m)) in f.entries.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "R1[{t}]").unwrap();
            if *m != Mult::ONE {
                write!(out, ":{m}").unwrap();
            }
        }
        out.push('}');
    }
    for s in &f.schemas {
        sep(out);
        let name = match s.kind {
            SchemaKind::PairwiseIncomparable => "incomparable",
            SchemaKind::Descending => "descending",
        };
        write!(out, "CD{{{name}({})}}", s.length).unwrap();
        if s.copies != Mult::ONE {
            write!(out, "^{}", s.copies).unwrap();
        }
    }
}

impl fmt::Display for ParseErrorContext<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.error)?;
        writeln!(f, "  {}", self.source)?;
        write!(f, "  {}^", " ".repeat(self.source[..self.error.offset.min(self.source.len())].chars().count()))
    }
}

/// A parse error rendered under the offending input with a caret.
pub struct ParseErrorContext<'a> {
    pub source: &'a str,
    pub error: &'a ParseError,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_model::random_expr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parses_atoms() {
        assert_eq!(parse("Z(2^3)").unwrap(), GroupExpr::cyclic(2, 3));
        assert_eq!(parse("Z(5)").unwrap(), parse("Z(5^1)").unwrap());
        assert_eq!(parse(" Q ^ w ").unwrap(), GroupExpr::RatQ.pow(Mult::Omega));
        assert_eq!(parse("0").unwrap(), GroupExpr::Zero);
        assert_eq!(parse("Jp(5)").unwrap(), parse("Prod(5:1)").unwrap());
        assert_eq!(parse("R1[def=0]").unwrap(), GroupExpr::IntZ);
        assert_eq!(parse("R1[def=inf; 5->3]").unwrap(), parse("R1[def=inf; 5->0]").unwrap());
    }

    #[test]
    fn charspec_separators() {
        let a = parse_type("def=0; 2->inf, 3->4").unwrap();
        let b = parse_type("def=0; 2->inf; 3->4").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "def=0; 2->inf");
        let f = parse("CD{R1[def=0; 2->inf, 3->inf]:2, R1[def=inf]}").unwrap();
        assert_eq!(print(&f), "Q + R1[def=0; 2->inf, 3->inf]^2");
    }

    #[test]
    fn normalizing_parse() {
        assert_eq!(print(&parse("Q + Z(2^3) + Q").unwrap()), "Q^2 + Z(2^3)");
        assert_eq!(print(&parse("(Z + Z) + Z^w").unwrap()), "Z^w");
        assert_eq!(print(&parse("CD{R1[def=0]:3}").unwrap()), "Z^3");
        assert_eq!(print(&parse("(Z(3^1) + Jp(2))^2").unwrap()), "Z(3^1)^2 + Prod(2:2)");
        assert_eq!(print(&parse("CD{descending(w)}^w + Jp(2)^w").unwrap()), "CD{descending(w)}^w + Jp(2)^w");
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse("Z(4^1)").unwrap_err().offset, 2);
        assert_eq!(parse("Z + ").unwrap_err().offset, 4);
        assert_eq!(parse("Z(2^0)").unwrap_err().offset, 4);
        assert_eq!(parse("Z Z").unwrap_err().offset, 2);
        assert_eq!(parse("Prod(2:1,2:3)").unwrap_err().offset, 5);
        assert!(parse("R1[def=1]").is_err());
        assert!(parse("Z^0").is_err());
    }

    #[test]
    fn large_primes_parse() {
        let m61 = "2305843009213693951";
        let g = parse(&format!("Prufer({m61})")).unwrap();
        assert_eq!(print(&g), format!("Prufer({m61})"));
    }

    #[test]
    fn round_trip_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let g = random_expr(&mut rng, 3);
            let text = print(&g);
            let back = parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back, normalize(&g), "{text}");
            assert_eq!(print(&back), print(&normalize(&g)));
        }
    }
}
