//! Test-only double-double arithmetic and a power-series Bessel oracle.
//!
//! The ascending series `J_n(x) = Σ_m (-1)^m (x/2)^{2m+n} / (m! (m+n)!)`
//! suffers catastrophic cancellation in plain doubles once `x` grows (the
//! largest term is ~`e^x/√(2πx)` while the sum stays below one), so the
//! oracle accumulates it in ~31-digit double-double arithmetic.  That keeps
//! the oracle error below `1e-14` absolute for `x ≤ 45` and below `1e-11`
//! out to `x = 50` — independent of the Chebyshev/Hankel evaluation path
//! used by the implementation under test.

/// Unevaluated sum of two doubles with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub(crate) fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub(crate) fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub(crate) fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub(crate) fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p1, p2) = two_prod(q1, d);
        let (r1, r2) = two_sum(self.hi, -p1);
        let q2 = (r1 + (r2 + self.lo - p2)) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub(crate) fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub(crate) fn abs_hi(self) -> f64 {
        self.hi.abs()
    }
}

/// `J_n(x)` by the ascending power series in double-double arithmetic.
pub(crate) fn bessel_series(n: u32, x: f64) -> f64 {
    let half = Dd::from(x / 2.0);
    // q = (x/2)^2
    let q = half.mul(half);
    // leading term (x/2)^n / n!
    let mut term = Dd::from(1.0);
    for k in 1..=n {
        term = term.mul(half).div_f64(k as f64);
    }
    let mut sum = term;
    let mut m = 1u32;
    loop {
        term = term.mul(q).div_f64(m as f64).div_f64((m + n) as f64).neg();
        sum = sum.add(term);
        if term.abs_hi() < 1e-40 * (1.0 + sum.abs_hi()) || m > 500 {
            break;
        }
        m += 1;
    }
    sum.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_published_values() {
        // 60-digit reference values
        assert!((bessel_series(0, 1.0) - 0.7651976865579665514).abs() < 1e-16);
        assert!((bessel_series(1, 1.0) - 0.440050585744933516).abs() < 1e-16);
        assert!((bessel_series(2, 7.3) - (-0.2655949118834368829)).abs() < 1e-15);
        assert!((bessel_series(0, 12.0) - 0.04768931079683353662).abs() < 1e-15);
    }
}
