use std::fmt;
use std::str::FromStr;

use crate::codes::{decoded_parity7, syndrome_index7};
use crate::error::{Error, Result};

/// Predicate over the classical record.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    Bit(usize),
    /// XOR of the listed bits.
    Parity(Vec<usize>),
    /// Hamming-correct seven bits, then take the parity (destructive logical readout).
    HammingParity(Vec<usize>),
    /// Hamming syndrome of seven bits equals `position` (1..=7; 0 means trivial).
    HammingSyndromeIs { bits: Vec<usize>, position: usize },
    Not(Box<Condition>),
    All(Vec<Condition>),
    Any(Vec<Condition>),
    Majority(Vec<Condition>),
}

/// Enumeration cap for undetermined bits in three-valued evaluation.
const MAX_UNKNOWN: usize = 14;

impl Condition {
    pub fn parity(bits: impl IntoIterator<Item = usize>) -> Self {
        Condition::Parity(bits.into_iter().collect())
    }

    pub fn hamming_parity(bits: impl IntoIterator<Item = usize>) -> Self {
        Condition::HammingParity(bits.into_iter().collect())
    }

    pub fn syndrome_is(bits: impl IntoIterator<Item = usize>, position: usize) -> Self {
        Condition::HammingSyndromeIs { bits: bits.into_iter().collect(), position }
    }

    /// Every classical bit the condition reads.
    pub fn bits(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_bits(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_bits(&self, out: &mut Vec<usize>) {
        match self {
            Condition::Bit(b) => out.push(*b),
            Condition::Parity(bs) | Condition::HammingParity(bs) => out.extend(bs),
            Condition::HammingSyndromeIs { bits, .. } => out.extend(bits),
            Condition::Not(c) => c.collect_bits(out),
            Condition::All(cs) | Condition::Any(cs) | Condition::Majority(cs) => {
                cs.iter().for_each(|c| c.collect_bits(out))
            }
        }
    }

    pub fn shift_bits(&self, k: usize) -> Condition {
        let sh = |bs: &Vec<usize>| bs.iter().map(|b| b + k).collect();
        match self {
            Condition::Bit(b) => Condition::Bit(b + k),
            Condition::Parity(bs) => Condition::Parity(sh(bs)),
            Condition::HammingParity(bs) => Condition::HammingParity(sh(bs)),
            Condition::HammingSyndromeIs { bits, position } => {
                Condition::HammingSyndromeIs { bits: sh(bits), position: *position }
            }
            Condition::Not(c) => Condition::Not(Box::new(c.shift_bits(k))),
            Condition::All(cs) => Condition::All(cs.iter().map(|c| c.shift_bits(k)).collect()),
            Condition::Any(cs) => Condition::Any(cs.iter().map(|c| c.shift_bits(k)).collect()),
            Condition::Majority(cs) => Condition::Majority(cs.iter().map(|c| c.shift_bits(k)).collect()),
        }
    }

    pub fn eval(&self, rec: &[bool]) -> bool {
        let word = |bs: &Vec<usize>| -> Vec<bool> { bs.iter().map(|&b| rec[b]).collect() };
        match self {
            Condition::Bit(b) => rec[*b],
            Condition::Parity(bs) => bs.iter().filter(|&&b| rec[b]).count() % 2 == 1,
            Condition::HammingParity(bs) => decoded_parity7(&word(bs)),
            Condition::HammingSyndromeIs { bits, position } => syndrome_index7(&word(bits)) == *position,
            Condition::Not(c) => !c.eval(rec),
            Condition::All(cs) => cs.iter().all(|c| c.eval(rec)),
            Condition::Any(cs) => cs.iter().any(|c| c.eval(rec)),
            Condition::Majority(cs) => 2 * cs.iter().filter(|c| c.eval(rec)).count() > cs.len(),
        }
    }

    /// Three-valued evaluation: `None` entries in the record are unknown. Returns
    /// `Some(v)` when every completion of the unknown bits gives `v`.
    pub fn eval3(&self, rec: &[Option<bool>]) -> Option<bool> {
        let unknown: Vec<usize> = self.bits().into_iter().filter(|&b| rec[b].is_none()).collect();
        let mut full: Vec<bool> = rec.iter().map(|b| b.unwrap_or(false)).collect();
        if unknown.is_empty() {
            return Some(self.eval(&full));
        }
        if unknown.len() > MAX_UNKNOWN {
            return None;
        }
        let mut seen: Option<bool> = None;
        for m in 0u32..(1 << unknown.len()) {
            for (i, &b) in unknown.iter().enumerate() {
                full[b] = (m >> i) & 1 == 1;
            }
            let v = self.eval(&full);
            match seen {
                None => seen = Some(v),
                Some(s) if s != v => return None,
                _ => {}
            }
        }
        seen
    }
}

fn fmt_bits(bs: &[usize]) -> String {
    bs.iter().map(|b| format!("c{}", b + 1)).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |cs: &Vec<Condition>| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Condition::Bit(b) => write!(f, "c{}", b + 1),
            Condition::Parity(bs) => write!(f, "xor({})", fmt_bits(bs)),
            Condition::HammingParity(bs) => write!(f, "hpar({})", fmt_bits(bs)),
            Condition::HammingSyndromeIs { bits, position } => write!(f, "hsyn({})={}", fmt_bits(bits), position),
            Condition::Not(c) => write!(f, "not({c})"),
            Condition::All(cs) => write!(f, "and({})", list(cs)),
            Condition::Any(cs) => write!(f, "or({})", list(cs)),
            Condition::Majority(cs) => write!(f, "maj({})", list(cs)),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, m: &str) -> Error {
        Error::Parse(format!("condition {:?} at {}: {m}", String::from_utf8_lossy(self.s), self.pos))
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap()
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("expected number"))
    }

    fn bit(&mut self) -> Result<usize> {
        self.eat(b'c')?;
        let n = self.number()?;
        if n == 0 {
            return Err(self.err("bits are 1-based"));
        }
        Ok(n - 1)
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.eat(b'(')?;
        let mut out = vec![item(self)?];
        while self.s.get(self.pos) == Some(&b',') {
            self.pos += 1;
            out.push(item(self)?);
        }
        self.eat(b')')?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<Condition> {
        if self.s.get(self.pos) == Some(&b'c') && self.s.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit()) {
            return Ok(Condition::Bit(self.bit()?));
        }
        let name = self.ident();
        Ok(match name {
            "xor" => Condition::Parity(self.list(Self::bit)?),
            "hpar" => Condition::HammingParity(self.list(Self::bit)?),
            "hsyn" => {
                let bits = self.list(Self::bit)?;
                self.eat(b'=')?;
                Condition::HammingSyndromeIs { bits, position: self.number()? }
            }
            "not" => {
                let mut v = self.list(Self::expr)?;
                if v.len() != 1 {
                    return Err(self.err("not() takes one argument"));
                }
                Condition::Not(Box::new(v.remove(0)))
            }
            "and" => Condition::All(self.list(Self::expr)?),
            "or" => Condition::Any(self.list(Self::expr)?),
            "maj" => Condition::Majority(self.list(Self::expr)?),
            _ => return Err(self.err(&format!("unknown condition {name:?}"))),
        })
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let c = p.expr()?;
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["c3", "xor(c1,c2)", "hpar(c1,c2,c3,c4,c5,c6,c7)", "hsyn(c1,c2,c3,c4,c5,c6,c7)=5", "not(c1)", "and(c1,not(c2))", "or(c1,c2)", "maj(c1,xor(c2,c3),c4)"] {
            let c: Condition = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert!("c0".parse::<Condition>().is_err());
        assert!("xor(c1".parse::<Condition>().is_err());
        assert!("foo(c1)".parse::<Condition>().is_err());
    }

    #[test]
    fn hamming_conditions() {
        let bits: Vec<usize> = (0..7).collect();
        let mut rec = vec![false; 7];
        rec[3] = true; // single error at position 4 on the zero codeword
        assert!(!Condition::hamming_parity(bits.clone()).eval(&rec));
        assert!(Condition::syndrome_is(bits.clone(), 4).eval(&rec));
        let odd = [true; 7];
        assert!(Condition::hamming_parity(bits).eval(&odd));
    }

    #[test]
    fn three_valued() {
        let c = Condition::parity([0, 1]);
        assert_eq!(c.eval3(&[Some(true), None]), None);
        let m = Condition::Majority(vec![Condition::Bit(0), Condition::Bit(1), Condition::Bit(2)]);
        assert_eq!(m.eval3(&[Some(true), None, Some(true)]), Some(true));
        assert_eq!(m.eval3(&[Some(true), None, Some(false)]), None);
    }
}
