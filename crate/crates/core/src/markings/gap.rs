//! Linear extensions of "floor chain plus independent items".
//!
//! Floors `F_1 < ... < F_n` cut the line into gaps `0..=n` (gap `g` lies
//! between `F_g` and `F_{g+1}`). Each item may land in an inclusive gap
//! interval and is otherwise unconstrained, so the number of linear
//! extensions is the sum over gap assignments of `∏ (items in gap)!`.
//! The DP sweeps gaps left to right, keeping how many unplaced items are
//! due at each deadline.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith::factorials;

/// `items[i] = (lo, hi)`: admissible gaps, with `lo <= hi <= floors`.
pub fn gap_orderings(floors: usize, items: &[(usize, usize)]) -> BigUint {
    let gaps = floors + 1;
    let mut arrivals = vec![vec![0u8; gaps]; gaps];
    for &(lo, hi) in items {
        assert!(lo <= hi && hi < gaps, "item gap interval ({lo},{hi}) out of range");
        arrivals[lo][hi] += 1;
    }
    let fact = factorials(items.len());
    let binom = binomial_table(items.len());

    let mut dp: HashMap<Vec<u8>, BigUint> = HashMap::new();
    dp.insert(vec![0u8; gaps], BigUint::one());
    for g in 0..gaps {
        let mut next: HashMap<Vec<u8>, BigUint> = HashMap::new();
        for (mut state, ways) in dp {
            for h in g..gaps {
                state[h] += arrivals[g][h];
            }
            let mut take = state.clone();
            spread(&state, g, g, &mut take, 1, 0, &mut |rest, mult, placed| {
                let w = &ways * &fact[placed] * mult;
                *next.entry(rest.to_vec()).or_insert_with(BigUint::zero) += w;
            }, &binom);
        }
        dp = next;
    }
    dp.remove(&vec![0u8; gaps]).unwrap_or_default()
}

/// Enumerates how many pending items of each deadline `h >= g` go into gap
/// `g`; items due at `g` must all go. Calls `f(remaining, ∏C, placed)`.
#[allow(clippy::too_many_arguments)]
fn spread(
    state: &[u8],
    g: usize,
    h: usize,
    rest: &mut Vec<u8>,
    mult: u128,
    placed: usize,
    f: &mut dyn FnMut(&[u8], u128, usize),
    binom: &[Vec<u128>],
) {
    if h == state.len() {
        f(rest, mult, placed);
        return;
    }
    let c = state[h] as usize;
    if h == g {
        rest[h] = 0;
        spread(state, g, h + 1, rest, mult, placed + c, f, binom);
        return;
    }
    for k in 0..=c {
        rest[h] = (c - k) as u8;
        spread(state, g, h + 1, rest, mult * binom[c][k], placed + k, f, binom);
    }
    rest[h] = state[h];
}

fn binomial_table(n: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + if j < i { t[i - 1][j] } else { 0 };
        }
    }
    t
}
