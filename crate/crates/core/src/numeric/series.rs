//! Summation of series given by a term ratio.
//!
//! Every series in this crate (q-Pochhammer-weighted hypergeometric sums,
//! big q-Bessel functions and their derivatives) is evaluated here. Terms are
//! carried as double-double mantissas with a separate binary exponent.
//!
//! Truncation rule: after adding term `k`, the caller supplies the ratio
//! `t_{k+1}/t_k` and a certified bound `r >= sup_{j>=k} |t_{j+1}/t_j|`. When
//! `r < 1` the dropped tail is at most `|t_{k+1}| / (1 - r)`, and summation
//! stops once that bound falls below `tol * max(1, |partial sum|)`.

use super::dd::{Dd, DD_EPS};
use super::ext::{frexp, Ext};
use super::sum::ExtAccumulator;
use crate::error::{Error, Result};

/// Ratio of consecutive terms plus a certified bound on all later ratios.
#[derive(Clone, Copy, Debug)]
pub struct RatioStep {
    pub ratio: Dd,
    /// Upper bound on `|t_{j+1}/t_j|` for every `j >= k`; use `f64::INFINITY`
    /// when nothing can be certified yet.
    pub bound: f64,
}

/// Result of a truncated series.
#[derive(Clone, Copy, Debug)]
pub struct SeriesSum {
    pub value: Ext,
    /// Certified bound on the dropped tail.
    pub tail: Ext,
    /// Sum of absolute values of the included terms; the natural scale for
    /// rounding errors and residuals.
    pub abs_sum: Ext,
    pub terms: usize,
}

impl SeriesSum {
    /// Tail bound plus a conservative rounding allowance for double-double
    /// evaluation and the final rounding to a 53-bit mantissa.
    pub fn error_bound(&self) -> Ext {
        let rounding = self.abs_sum * (4.0 * (self.terms as f64 + 2.0) * DD_EPS);
        let final_round = self.value.abs() * f64::EPSILON;
        self.tail + rounding + final_round
    }
}

fn normalize(m: Dd, e: i64) -> (Dd, i64) {
    if m.is_zero() {
        return (Dd::ZERO, 0);
    }
    let (_, fe) = frexp(m.hi);
    (m.ldexp(-fe), e + fe)
}

/// Sums `offset + t_0 + t_1 + ...` where `t_0 = first` and `step(k)` yields
/// the ratio `t_{k+1}/t_k`.
pub fn sum_ratio_series<F>(
    offset: Dd,
    first: Dd,
    tol: f64,
    terms_max: usize,
    mut step: F,
) -> Result<SeriesSum>
where
    F: FnMut(usize) -> RatioStep,
{
    let mut acc = ExtAccumulator::new();
    let mut abs_acc = ExtAccumulator::new();
    if !offset.is_zero() {
        acc.add_scaled(offset, 0);
        abs_acc.add_scaled(offset.abs(), 0);
    }
    let (mut tm, mut te) = normalize(first, 0);
    acc.add_scaled(tm, te);
    abs_acc.add_scaled(tm.abs(), te);

    if tm.is_zero() {
        return Ok(SeriesSum {
            value: acc.value(),
            tail: Ext::ZERO,
            abs_sum: abs_acc.value(),
            terms: 1,
        });
    }

    let mut k = 0usize;
    loop {
        let st = step(k);
        let (nm, ne) = normalize(tm * st.ratio, te);
        if nm.is_zero() {
            // terminating series
            return Ok(SeriesSum {
                value: acc.value(),
                tail: Ext::ZERO,
                abs_sum: abs_acc.value(),
                terms: k + 1,
            });
        }
        if !nm.hi.is_finite() {
            return Err(Error::DivergentSeries {
                reason: format!("non-finite term at index {}", k + 1),
            });
        }
        if st.bound < 1.0 {
            let next = Ext::from_dd(nm.abs(), ne);
            let tail = next / (1.0 - st.bound);
            let scale = acc.value().abs().max_abs(Ext::ONE);
            if tail <= scale * tol {
                return Ok(SeriesSum {
                    value: acc.value(),
                    tail,
                    abs_sum: abs_acc.value(),
                    terms: k + 1,
                });
            }
        }
        if k + 2 > terms_max {
            return Err(Error::DivergentSeries {
                reason: format!("no certified truncation within {terms_max} terms"),
            });
        }
        acc.add_scaled(nm, ne);
        abs_acc.add_scaled(nm.abs(), ne);
        tm = nm;
        te = ne;
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_with_certified_tail() {
        // sum 0.5^k = 2
        let s = sum_ratio_series(Dd::ZERO, Dd::ONE, 1e-20, 1000, |_| RatioStep {
            ratio: Dd::from_f64(0.5),
            bound: 0.5,
        })
        .unwrap();
        let v = s.value.to_f64();
        assert!((v - 2.0).abs() <= s.error_bound().to_f64());
        assert!(s.tail.to_f64() <= 2e-20);
    }

    #[test]
    fn exponential_series() {
        // e^x with x = 3: ratio x/(k+1), bound certified once k+1 > x
        let x = 3.0;
        let s = sum_ratio_series(Dd::ZERO, Dd::ONE, 1e-18, 1000, |k| {
            let r = x / (k as f64 + 1.0);
            RatioStep {
                ratio: Dd::from_f64(x) / Dd::from_f64(k as f64 + 1.0),
                bound: if r < 1.0 { r } else { f64::INFINITY },
            }
        })
        .unwrap();
        assert!((s.value.to_f64() - x.exp()).abs() < 1e-14);
    }

    #[test]
    fn uncertified_series_hits_term_cap() {
        let r = sum_ratio_series(Dd::ZERO, Dd::ONE, 1e-12, 50, |_| RatioStep {
            ratio: Dd::ONE,
            bound: f64::INFINITY,
        });
        assert!(matches!(r, Err(Error::DivergentSeries { .. })));
    }

    #[test]
    fn huge_terms_do_not_overflow() {
        // sum_k c^k / k!^2 style growth far past f64 range: x^k/k! with x = 2000
        let x = 2000.0;
        let s = sum_ratio_series(Dd::ZERO, Dd::ONE, 1e-16, 100_000, |k| {
            let r = x / (k as f64 + 1.0);
            RatioStep {
                ratio: Dd::from_f64(x) / Dd::from_f64(k as f64 + 1.0),
                bound: if r < 1.0 { r } else { f64::INFINITY },
            }
        })
        .unwrap();
        // e^2000 = 2^(2000 / ln 2)
        let expect_log2 = x / std::f64::consts::LN_2;
        assert!((s.value.log2_abs() - expect_log2).abs() < 1e-9);
    }
}
