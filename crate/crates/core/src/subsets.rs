//! Colexicographic enumeration of k-subsets, split into fixed chunks for
//! parallel scanning.
//!
//! A subset `{c_1 < … < c_k}` has colex rank `Σ C(c_i, i)`. Chunk boundaries
//! depend only on the subset count, never on the thread pool, so every scan
//! is reproducible.

use rayon::prelude::*;

use crate::error::{Error, Result};

const CHUNKS: u128 = 256;

/// `C(n, k)` or `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn checked_binomial(n: usize, k: usize) -> Result<u128> {
    binomial(n, k).ok_or(Error::SubsetOverflow { n, k })
}

/// The subset of colex rank `rank`.
pub fn unrank_colex(mut rank: u128, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for i in (1..=k).rev() {
        // largest c with C(c, i) <= rank
        let mut c = i - 1;
        while binomial(c + 1, i).is_some_and(|b| b <= rank) {
            c += 1;
        }
        rank -= binomial(c, i).expect("bounded by rank");
        out[i - 1] = c;
    }
    out
}

pub fn rank_colex(subset: &[usize]) -> u128 {
    subset
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial(c, i + 1).expect("small subset"))
        .sum()
}

/// Advances to the colex successor within `0..n`. Returns false past the end.
pub fn next_colex(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for j in 0..k {
        let limit = if j + 1 < k { subset[j + 1] } else { n };
        if subset[j] + 1 < limit {
            subset[j] += 1;
            for (i, slot) in subset.iter_mut().enumerate().take(j) {
                *slot = i;
            }
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetOutcome {
    pub dependent: bool,
    pub sigma_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanSummary {
    pub checked: u128,
    pub dependent: u128,
    /// Colex-first dependent subset with its rank.
    pub first_dependent: Option<(u128, Vec<usize>)>,
    pub min_sigma: Option<f64>,
}

fn merge_min(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Applies `check` to every k-subset of `0..n` (or, with `stop_at_first`,
/// to each chunk up to its first dependent subset). Errors are reported for
/// the lowest-ranked failing chunk.
pub fn scan<F>(n: usize, k: usize, stop_at_first: bool, check: F) -> Result<ScanSummary>
where
    F: Fn(&[usize]) -> Result<SubsetOutcome> + Sync,
{
    let total = checked_binomial(n, k)?;
    if total == 0 {
        return Ok(ScanSummary::default());
    }
    let chunk = total.div_ceil(CHUNKS);
    let n_chunks = total.div_ceil(chunk);
    let parts: Vec<Result<ScanSummary>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(total);
            let mut subset = unrank_colex(start, k);
            let mut part = ScanSummary::default();
            for rank in start..end {
                let outcome = check(&subset)?;
                part.checked += 1;
                part.min_sigma = merge_min(part.min_sigma, outcome.sigma_min);
                if outcome.dependent {
                    part.dependent += 1;
                    if part.first_dependent.is_none() {
                        part.first_dependent = Some((rank, subset.clone()));
                    }
                    if stop_at_first {
                        break;
                    }
                }
                if rank + 1 < end {
                    next_colex(&mut subset, n);
                }
            }
            Ok(part)
        })
        .collect();

    let mut summary = ScanSummary::default();
    for part in parts {
        let part = part?;
        summary.checked += part.checked;
        summary.dependent += part.dependent;
        summary.min_sigma = merge_min(summary.min_sigma, part.min_sigma);
        if summary.first_dependent.is_none() {
            summary.first_dependent = part.first_dependent;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 3), Some(10));
        assert_eq!(binomial(13, 7), Some(1716));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(60, 30), Some(118_264_581_564_861_424));
        assert!(binomial(300, 150).is_none());
    }

    #[test]
    fn colex_order_for_n5_k3() {
        let mut s = vec![0, 1, 2];
        let mut seen = vec![s.clone()];
        while next_colex(&mut s, 5) {
            seen.push(s.clone());
        }
        let expect: Vec<Vec<usize>> = vec![
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![0, 2, 3],
            vec![1, 2, 3],
            vec![0, 1, 4],
            vec![0, 2, 4],
            vec![1, 2, 4],
            vec![0, 3, 4],
            vec![1, 3, 4],
            vec![2, 3, 4],
        ];
        assert_eq!(seen, expect);
        for (r, sub) in expect.iter().enumerate() {
            assert_eq!(rank_colex(sub), r as u128);
            assert_eq!(&unrank_colex(r as u128, 3), sub);
        }
    }

    #[test]
    fn scan_finds_colex_first_and_counts() {
        // "dependent" = contains both 2 and 5
        let summary = scan(9, 4, false, |s| {
            Ok(SubsetOutcome { dependent: s.contains(&2) && s.contains(&5), sigma_min: Some(s[0] as f64) })
        })
        .unwrap();
        assert_eq!(summary.checked, 126);
        assert_eq!(summary.dependent, binomial(7, 2).unwrap());
        assert_eq!(summary.first_dependent.unwrap().1, vec![0, 1, 2, 5]);
        assert_eq!(summary.min_sigma, Some(0.0));
    }

    #[test]
    fn scan_propagates_errors() {
        let err = scan(6, 2, false, |s| {
            if s == [1, 4] {
                Err(Error::InvalidInput("boom".into()))
            } else {
                Ok(SubsetOutcome { dependent: false, sigma_min: None })
            }
        });
        assert!(err.is_err());
    }
}
