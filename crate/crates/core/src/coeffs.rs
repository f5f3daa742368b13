//! Coefficient vectors: nonincreasing rearrangement `a*`, the head index set
//! `I_p` and partial `ℓ_q` norms over heads, tails and index sets.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Coefficients `a ∈ ℝⁿ` with the rearrangement of `|a|` cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
    rearranged: Vec<f64>,
    /// Indices sorted by `|a_i|` descending, ties by lowest index.
    order: Vec<usize>,
}

/// Which entries a partial norm runs over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Range<'a> {
    /// The first `k` entries of `a*`.
    Head(usize),
    /// The last `k` entries of `a*`.
    Tail(usize),
    /// Raw (0-based) indices into `values`.
    Indices(&'a [usize]),
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("coefficient vector must be non-empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite coefficient {bad}")));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| {
            values[j]
                .abs()
                .partial_cmp(&values[i].abs())
                .unwrap_or(Ordering::Equal)
                .then(i.cmp(&j))
        });
        let rearranged = order.iter().map(|&i| values[i].abs()).collect();
        Ok(Self {
            values,
            rearranged,
            order,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The nonincreasing rearrangement `a*` of `|a|`.
    pub fn rearrange(&self) -> &[f64] {
        &self.rearranged
    }

    pub fn is_zero(&self) -> bool {
        self.rearranged[0] == 0.0
    }

    /// Indices of the `min{⌈p⌉, n}` largest `|a_i|`, ties broken by lowest
    /// index, returned in ascending index order.
    pub fn top_index_set(&self, p: f64) -> Vec<usize> {
        let k = head_len(p, self.len());
        let mut set = self.order[..k].to_vec();
        set.sort_unstable();
        set
    }

    /// Indices not in [`top_index_set`](Self::top_index_set), ascending.
    pub fn complement_index_set(&self, p: f64) -> Vec<usize> {
        let k = head_len(p, self.len());
        let mut set = self.order[k..].to_vec();
        set.sort_unstable();
        set
    }

    /// Restriction of `a` to an index set, in the order given.
    pub fn restrict(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().map(|&i| self.values[i]).collect()
    }

    /// `(Σ_{range} |·|^q)^{1/q}`, or the maximum for `q = ∞`.
    pub fn partial_lq(&self, range: Range<'_>, q: f64) -> Result<f64> {
        if q.is_nan() || q < 1.0 {
            return Err(Error::invalid(format!("q must lie in [1, ∞], got {q}")));
        }
        let n = self.len();
        let entries: Vec<f64> = match range {
            Range::Head(k) => {
                check_len(k, n)?;
                self.rearranged[..k].to_vec()
            }
            Range::Tail(k) => {
                check_len(k, n)?;
                self.rearranged[n - k..].to_vec()
            }
            Range::Indices(idx) => {
                if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                    return Err(Error::invalid(format!("index {bad} out of bounds for n = {n}")));
                }
                idx.iter().map(|&i| self.values[i].abs()).collect()
            }
        };
        Ok(lq_norm(&entries, q))
    }

    pub fn l1(&self) -> f64 {
        self.rearranged.iter().sum()
    }

    pub fn l2(&self) -> f64 {
        lq_norm(&self.rearranged, 2.0)
    }

    pub fn linf(&self) -> f64 {
        self.rearranged[0]
    }

    pub fn sum_fourth(&self) -> f64 {
        self.rearranged.iter().map(|v| v.powi(4)).sum()
    }

    /// `Σ_{i≤p} (a*_i)^e` with the fractional last term: the first `⌊p⌋`
    /// entries plus `(p − ⌊p⌋)·(a*_{⌊p⌋+1})^e`. Entries past `n` are zero.
    pub fn head_power_sum(&self, p: f64, e: f64) -> f64 {
        let (whole, frac) = split_index(p);
        let a = &self.rearranged;
        let mut s: f64 = a.iter().take(whole).map(|v| v.powf(e)).sum();
        if frac > 0.0 && whole < a.len() {
            s += frac * a[whole].powf(e);
        }
        s
    }

    /// Complement of [`head_power_sum`](Self::head_power_sum):
    /// `(1 − frac)·(a*_{⌊p⌋+1})^e + Σ_{i>⌊p⌋+1} (a*_i)^e`.
    pub fn tail_power_sum(&self, p: f64, e: f64) -> f64 {
        let (whole, frac) = split_index(p);
        let a = &self.rearranged;
        if whole >= a.len() {
            return 0.0;
        }
        let rest: f64 = a[whole + 1..].iter().map(|v| v.powf(e)).sum();
        (1.0 - frac) * a[whole].powf(e) + rest
    }

    /// `(Σ_{i∉I_p} a_i²)^{1/2}` for the integer-cardinality set `I_p`.
    pub fn complement_l2(&self, p: f64) -> f64 {
        let k = head_len(p, self.len());
        lq_norm(&self.rearranged[k..], 2.0)
    }
}

/// `|I_p| = min{⌈p⌉, n}`.
pub fn head_len(p: f64, n: usize) -> usize {
    let c = p.ceil();
    if c >= n as f64 {
        n
    } else {
        c.max(0.0) as usize
    }
}

fn split_index(p: f64) -> (usize, f64) {
    let whole = p.floor().max(0.0);
    (whole as usize, p - whole)
}

fn check_len(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(Error::invalid(format!("range length {k} exceeds n = {n}")));
    }
    Ok(())
}

/// Overflow-safe `ℓ_q` norm of nonnegative-or-signed entries.
pub fn lq_norm(entries: &[f64], q: f64) -> f64 {
    let max = entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    if q.is_infinite() {
        return max;
    }
    let s: f64 = entries.iter().map(|v| (v.abs() / max).powf(q)).sum();
    max * s.powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cv(v: &[f64]) -> CoefficientVector {
        CoefficientVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rearrange_examples() {
        assert_eq!(cv(&[3.0, -1.0, 2.0]).rearrange(), &[3.0, 2.0, 1.0]);
        assert_eq!(cv(&[0.0, 0.0, 0.0]).rearrange(), &[0.0, 0.0, 0.0]);
        assert_eq!(cv(&[1.0, 1.0, -1.0]).rearrange(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(matches!(
            CoefficientVector::new(vec![]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(CoefficientVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn top_index_examples() {
        // 0-based: {2, 3} in 1-based is {1, 2}.
        assert_eq!(cv(&[0.5, 2.0, -3.0, 1.0]).top_index_set(2.0), vec![1, 2]);
        assert_eq!(cv(&[1.0, 1.0, 1.0]).top_index_set(5.0), vec![0, 1, 2]);
        assert_eq!(cv(&[1.0, 1.0, 0.0]).top_index_set(2.0), vec![0, 1]);
        // ⌈2.3⌉ = 3
        assert_eq!(cv(&[4.0, 3.0, 2.0, 1.0]).top_index_set(2.3), vec![0, 1, 2]);
        assert_eq!(cv(&[1.0, 1.0, 1.0, 1.0]).top_index_set(2.0), vec![0, 1]);
    }

    #[test]
    fn partial_lq_examples() {
        let a = cv(&[3.0, 4.0]);
        assert!((a.partial_lq(Range::Head(2), 2.0).unwrap() - 5.0).abs() < 1e-15);
        let b = cv(&[1.0, 2.0, 3.0]);
        let t = b.partial_lq(Range::Tail(2), 2.0).unwrap();
        assert!((t - 5f64.sqrt()).abs() < 1e-15);
        let c = cv(&[-7.0, 2.0]);
        for r in [Range::Head(2), Range::Tail(2), Range::Indices(&[0, 1])] {
            assert_eq!(c.partial_lq(r, f64::INFINITY).unwrap(), 7.0);
        }
        assert_eq!(c.partial_lq(Range::Indices(&[1]), f64::INFINITY).unwrap(), 2.0);
    }

    #[test]
    fn partial_lq_errors() {
        let a = cv(&[1.0, 2.0]);
        assert!(matches!(
            a.partial_lq(Range::Head(2), 0.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(a.partial_lq(Range::Head(3), 2.0).is_err());
        assert!(a.partial_lq(Range::Indices(&[2]), 2.0).is_err());
    }

    #[test]
    fn fractional_head_and_tail() {
        let a = cv(&[4.0, 3.0, 2.0, 1.0]);
        assert_eq!(a.head_power_sum(2.0, 1.0), 7.0);
        assert_eq!(a.head_power_sum(2.5, 1.0), 8.0);
        assert_eq!(a.tail_power_sum(2.0, 2.0), 5.0);
        assert_eq!(a.tail_power_sum(2.5, 2.0), 0.5 * 4.0 + 1.0);
        assert_eq!(a.head_power_sum(10.0, 1.0), 10.0);
        assert_eq!(a.tail_power_sum(10.0, 2.0), 0.0);
    }

    #[test]
    fn complement_l2_matches_sorted_tail() {
        let a = cv(&[0.5, 2.0, -3.0, 1.0]);
        let c = a.complement_index_set(2.0);
        assert_eq!(c, vec![0, 3]);
        let direct: f64 = c.iter().map(|&i| a.values()[i].powi(2)).sum::<f64>().sqrt();
        assert!((a.complement_l2(2.0) - direct).abs() < 1e-15);
    }

    fn vec_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 1..24)
    }

    proptest! {
        #[test]
        fn rearrange_is_sorted_permutation(v in vec_strategy()) {
            let a = cv(&v);
            let r = a.rearrange();
            prop_assert_eq!(r.len(), v.len());
            prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
            let mut abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
            abs.sort_by(|x, y| y.partial_cmp(x).unwrap());
            prop_assert_eq!(r, &abs[..]);
            // idempotent
            let again = cv(r);
            prop_assert_eq!(again.rearrange(), r);
        }

        #[test]
        fn head_norm_nonincreasing_in_q(v in vec_strategy(), q in 1.0f64..8.0, dq in 0.0f64..8.0) {
            let a = cv(&v);
            let n = a.len();
            let lo = a.partial_lq(Range::Head(n), q).unwrap();
            let hi = a.partial_lq(Range::Head(n), q + dq).unwrap();
            prop_assert!(hi <= lo * (1.0 + 1e-12) + 1e-300);
            let inf = a.partial_lq(Range::Head(n), f64::INFINITY).unwrap();
            prop_assert!(inf <= hi * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn top_set_scale_invariant(v in vec_strategy(), lambda in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], p in 2.0f64..30.0) {
            let a = cv(&v);
            let scaled = cv(&v.iter().map(|x| x * lambda).collect::<Vec<_>>());
            // Scaling can merge values that differ by an ulp; compare sets only
            // when magnitudes are distinct enough to survive rounding.
            let mut r = a.rearrange().to_vec();
            r.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * y.abs().max(1e-300));
            if r.len() == a.len() {
                prop_assert_eq!(a.top_index_set(p), scaled.top_index_set(p));
            }
        }

        #[test]
        fn top_set_cardinality_and_dominance(v in vec_strategy(), p in 2.0f64..30.0) {
            let a = cv(&v);
            let set = a.top_index_set(p);
            prop_assert_eq!(set.len(), head_len(p, a.len()));
            let min_in = set.iter().map(|&i| v[i].abs()).fold(f64::INFINITY, f64::min);
            for i in a.complement_index_set(p) {
                prop_assert!(v[i].abs() <= min_in);
            }
        }

        #[test]
        fn complement_sum_equals_sorted_tail(v in vec_strategy(), p in 2.0f64..30.0) {
            let a = cv(&v);
            let comp: f64 = a.complement_index_set(p).iter().map(|&i| v[i] * v[i]).sum();
            let k = head_len(p, a.len());
            let tail: f64 = a.rearrange()[k..].iter().map(|x| x * x).sum();
            prop_assert!((comp - tail).abs() <= 1e-12 * (1.0 + tail));
        }
    }
}
