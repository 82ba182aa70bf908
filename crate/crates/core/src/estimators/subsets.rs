//! Index subsets for complete and incomplete U-statistics.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// `C(n, k)` in 128 bits, saturating.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `C(c, k)` for `k <= 4` with a single division.
fn small_binomial(c: usize, k: usize) -> u128 {
    let c = c as u128;
    match k {
        1 => c,
        2 => c * c.saturating_sub(1) / 2,
        3 => c * c.saturating_sub(1) * c.saturating_sub(2) / 6,
        4 => c * c.saturating_sub(1) * c.saturating_sub(2) * c.saturating_sub(3) / 24,
        _ => binomial(c as u64, k as u64),
    }
}

/// The `k`-subset of `{0..n}` with colexicographic rank `rank`, ascending.
pub fn unrank<const K: usize>(mut rank: u128, n: usize) -> [usize; K] {
    let mut out = [0usize; K];
    let mut hi = n;
    for i in (1..=K).rev() {
        // largest c < hi with C(c, i) <= rank
        let (mut lo, mut up) = (i - 1, hi - 1);
        while lo < up {
            let mid = (lo + up).div_ceil(2);
            if small_binomial(mid, i) <= rank {
                lo = mid;
            } else {
                up = mid - 1;
            }
        }
        out[i - 1] = lo;
        rank -= small_binomial(lo, i);
        hi = lo;
    }
    out
}

/// Which subsets a U-statistic averages over.
#[derive(Debug, Clone)]
pub struct SubsetPlan<const K: usize> {
    pub subsets: Vec<[usize; K]>,
    pub total: u128,
    pub complete: bool,
}

/// All `K`-subsets when there are at most `budget` of them, otherwise
/// `budget` distinct subsets drawn uniformly without replacement. Sampled
/// subsets come in increasing rank order.
pub fn plan_subsets<const K: usize>(n: usize, budget: usize, rng: &mut StreamRng) -> Result<SubsetPlan<K>> {
    if n < K {
        return Err(Error::InsufficientPoints { needed: K, got: n });
    }
    if budget == 0 {
        return Err(Error::InvalidConfig("subset budget must be at least 1".into()));
    }
    let total = binomial(n as u64, K as u64);
    if total <= budget as u128 {
        let mut subsets = Vec::with_capacity(total as usize);
        let mut cur: [usize; K] = std::array::from_fn(|i| i);
        loop {
            subsets.push(cur);
            // next combination in lexicographic order
            let mut i = K;
            while i > 0 && cur[i - 1] == n - K + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            cur[i - 1] += 1;
            for j in i..K {
                cur[j] = cur[j - 1] + 1;
            }
        }
        return Ok(SubsetPlan {
            subsets,
            total,
            complete: true,
        });
    }
    let length = usize::try_from(total)
        .map_err(|_| Error::InvalidConfig(format!("C({n}, {K}) is too large to sample from")))?;
    let mut ranks: Vec<usize> = index::sample(rng, length, budget).into_vec();
    ranks.sort_unstable();
    Ok(SubsetPlan {
        subsets: ranks.into_iter().map(|r| unrank::<K>(r as u128, n)).collect(),
        total,
        complete: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use std::collections::HashSet;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(40, 3), 9880);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(10_000, 3), 166_616_670_000);
    }

    #[test]
    fn unrank_is_a_bijection() {
        let n = 9;
        let all: HashSet<[usize; 3]> = (0..binomial(9, 3)).map(|r| unrank::<3>(r, n)).collect();
        assert_eq!(all.len(), 84);
        assert!(all.iter().all(|s| s[0] < s[1] && s[1] < s[2] && s[2] < n));
    }

    #[test]
    fn complete_and_sampled_plans() {
        let mut rng = substream(0, "t", &[]);
        let full = plan_subsets::<3>(40, 9880, &mut rng).unwrap();
        assert!(full.complete);
        assert_eq!(full.subsets.len(), 9880);
        let set: HashSet<_> = full.subsets.iter().collect();
        assert_eq!(set.len(), 9880);

        let part = plan_subsets::<4>(200, 1000, &mut rng).unwrap();
        assert!(!part.complete);
        let set: HashSet<_> = part.subsets.iter().collect();
        assert_eq!(set.len(), 1000);
        assert!(plan_subsets::<4>(3, 10, &mut rng).is_err());
    }
}
