//! Small floating-point helpers shared by the plan arithmetic and the engine.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

fn two_prod(a: f64, b: f64) -> DoubleDouble {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    DoubleDouble { hi, lo }
}

/// `ceil(a * b / (c * d))` evaluated with double-double products and a
/// corrected quotient, so that results landing within a few ulps of an
/// integer are resolved against the exact value of the floating-point inputs.
///
/// Returns `None` if the quotient is not finite.
pub(crate) fn ceil_ratio_of_products(a: f64, b: f64, c: f64, d: f64) -> Option<f64> {
    let num = two_prod(a, b);
    let den = two_prod(c, d);
    let q1 = num.hi / den.hi;
    if !q1.is_finite() {
        return None;
    }
    // num.hi - q * den.hi is exact for a correctly rounded quotient q.
    let q2_of = |q: f64| ((-q).mul_add(den.hi, num.hi) + num.lo - q * den.lo) / den.hi;
    if q1.abs() >= 4_503_599_627_370_496.0 {
        // every representable value is already an integer
        return Some(if q2_of(q1) > 0.0 { q1 + 1.0 } else { q1 });
    }
    let q2 = q2_of(q1);
    // Sign of (q1 + q2) - m, evaluated without forming q1 + q2.
    let above = |m: f64| (q1 - m) + q2 > 0.0;
    let mut k = (q1 + q2).ceil();
    while above(k) {
        k += 1.0;
    }
    while !above(k - 1.0) {
        k -= 1.0;
    }
    Some(k)
}

/// Ceiling that snaps values within a few ulps of an integer onto that
/// integer, so inputs like `ln(e^3)` do not overshoot by one.
pub(crate) fn snapped_ceil(x: f64) -> f64 {
    let nearest = x.round();
    if (x - nearest).abs() <= 4.0 * f64::EPSILON * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    }
}

/// Relative equality used when comparing rate constants.
pub(crate) fn rates_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn ceil_ratio_exact_integers() {
        // 2 * 1 / (0.5 * 0.5) = 8 exactly
        assert_eq!(ceil_ratio_of_products(2.0, 1.0, 0.5, 0.5), Some(8.0));
        assert_eq!(ceil_ratio_of_products(1.0, 2.0, 0.1, 0.1), Some(200.0));
        assert_eq!(ceil_ratio_of_products(0.25, 2.0, 0.1, 0.1), Some(50.0));
        assert_eq!(ceil_ratio_of_products(1.0, 1.0, 0.3, 0.3), Some(12.0));
        assert_eq!(ceil_ratio_of_products(0.0, 1.0, 0.3, 0.3), Some(0.0));
    }

    #[test]
    fn ceil_ratio_just_above_integer() {
        // 3 * (1 + 2^-52) / 1 is just above 3.
        let a = 1.0 + f64::EPSILON;
        assert_eq!(ceil_ratio_of_products(3.0, a, 1.0, 1.0), Some(4.0));
    }

    #[test]
    fn snapped_ceil_absorbs_rounding() {
        assert_eq!(snapped_ceil(3.0000000000000004), 3.0);
        assert_eq!(snapped_ceil(2.9999999999999996), 3.0);
        assert_eq!(snapped_ceil(2.5), 3.0);
        assert_eq!(snapped_ceil(-0.3), -0.0);
    }
}
