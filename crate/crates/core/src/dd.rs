//! Minimal double-double arithmetic for the long backward sweeps.
//!
//! Only the handful of operations the sweeps need are provided.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// `1 - d / self` for a plain `d`.
    #[inline]
    pub fn one_minus_ratio(self, d: f64) -> Dd {
        let q1 = d / self.hi;
        let (ph, pl) = two_prod(q1, self.hi);
        let r = ((d - ph) - pl) - q1 * self.lo;
        let q2 = r / self.hi;
        let (qh, ql) = fast_two_sum(q1, q2);
        let (sh, sl) = two_sum(1.0, -qh);
        let (h, l) = fast_two_sum(sh, sl - ql);
        Dd { hi: h, lo: l }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cases() {
        let r = Dd { hi: 0.5, lo: 0.0 }.one_minus_ratio(0.25);
        assert_eq!(r, Dd { hi: 0.5, lo: 0.0 });
        let exact = Dd::ONE.one_minus_ratio(1.0);
        assert_eq!(exact, Dd { hi: 0.0, lo: 0.0 });
    }

    #[test]
    fn repeated_sweep_matches_closed_form() {
        // g_{k-1} = 1 - (1/4)/g_k from g_D = 1 gives g_0 = (D+2)/(2D+2).
        let depth = 100_000usize;
        let mut g = Dd::ONE;
        for _ in 0..depth {
            g = g.one_minus_ratio(0.25);
        }
        let exact = (depth as f64 + 2.0) / (2.0 * depth as f64 + 2.0);
        assert!((g.to_f64() - exact).abs() < 1e-15);
    }
}
