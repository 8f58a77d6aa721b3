//! Linear extensions of an arbitrary poset by dynamic programming over
//! downsets (order ideals), encoded as bitmasks.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `preds[i]` lists elements that must precede `i`. At most 64 elements.
pub fn downset_orderings(preds: &[Vec<usize>]) -> Result<BigUint> {
    let n = preds.len();
    if n > 64 {
        return Err(Error::Refused(format!("downset DP handles at most 64 elements, got {n}")));
    }
    let masks: Vec<u64> = preds.iter().map(|ps| ps.iter().fold(0u64, |m, &j| m | (1u64 << j))).collect();
    let mut layer: HashMap<u64, BigUint> = HashMap::new();
    layer.insert(0, BigUint::one());
    for _ in 0..n {
        let mut next: HashMap<u64, BigUint> = HashMap::new();
        for (set, ways) in &layer {
            for (i, &m) in masks.iter().enumerate() {
                let bit = 1u64 << i;
                if set & bit == 0 && m & !set == 0 {
                    *next.entry(set | bit).or_insert_with(BigUint::zero) += ways;
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_values().next().unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antichain_and_chain() {
        assert_eq!(downset_orderings(&[vec![], vec![], vec![]]).unwrap(), BigUint::from(6u32));
        assert_eq!(downset_orderings(&[vec![], vec![0], vec![1]]).unwrap(), BigUint::one());
        assert_eq!(downset_orderings(&[]).unwrap(), BigUint::one());
    }

    #[test]
    fn cycle_has_no_extension() {
        assert_eq!(downset_orderings(&[vec![1], vec![0]]).unwrap(), BigUint::zero());
    }
}
