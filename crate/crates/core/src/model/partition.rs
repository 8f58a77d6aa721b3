use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts in any order. Zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Domain("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// `⟨1^n⟩`
    pub fn ones(n: u32) -> Self {
        Partition { parts: vec![1; n as usize] }
    }

    pub fn single(k: u32) -> Self {
        assert!(k > 0);
        Partition { parts: vec![k] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of parts equal to `i`.
    pub fn multiplicity(&self, i: u32) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }

    /// `(i, α_i)` for every part value present, increasing in `i`.
    pub fn multiplicities(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &p in self.parts.iter().rev() {
            match out.last_mut() {
                Some((v, c)) if *v == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Number of odd parts.
    pub fn odd_parts(&self) -> usize {
        self.parts.iter().filter(|&&p| p % 2 == 1).count()
    }

    /// All partitions of `n`, in reverse lexicographic order.
    pub fn all_of(n: u32) -> Vec<Partition> {
        fn go(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                go(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2,1`, `(2,1)`, `1^3`, and the empty forms ``, `()`, `-`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() || t == "-" || t == "empty" {
            return Ok(Partition::empty());
        }
        let mut parts = Vec::new();
        for tok in t.split(',') {
            let tok = tok.trim();
            let bad = || Error::Parse(format!("bad partition part {tok:?}"));
            if let Some((base, exp)) = tok.split_once('^') {
                let b: u32 = base.trim().parse().map_err(|_| bad())?;
                let e: usize = exp.trim().parse().map_err(|_| bad())?;
                parts.extend(std::iter::repeat_n(b, e));
            } else {
                parts.push(tok.parse().map_err(|_| bad())?);
            }
        }
        Partition::new(parts).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_counts() {
        let p = Partition::new(vec![1, 2, 1]).unwrap();
        assert_eq!(p.parts(), &[2, 1, 1]);
        assert_eq!(p.size(), 4);
        assert_eq!(p.len(), 3);
        assert_eq!(p.multiplicity(1), 2);
        assert_eq!(p.multiplicities(), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn parse_forms() {
        assert_eq!("1^3".parse::<Partition>().unwrap(), Partition::ones(3));
        assert_eq!("(2,1)".parse::<Partition>().unwrap().parts(), &[2, 1]);
        assert!("".parse::<Partition>().unwrap().is_empty());
        assert!("0".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..8).map(|n| Partition::all_of(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }
}
