//! Small numeric helpers shared across modules.

use num_complex::Complex64;

/// Neumaier-compensated accumulator for real values.
///
/// Terms are folded in call order; no reordering happens, which matters for
/// conditionally convergent series.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.correction += (self.sum - t) + x;
        } else {
            self.correction += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

/// Compensated accumulator for complex values (independent real/imag lanes).
#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexCompensatedSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexCompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Exact round-trip decimal with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Mean of `values` computed as `first + mean(values - first)`, so a constant
/// input returns its value bit for bit.
pub fn anchored_mean(values: &[Complex64]) -> Complex64 {
    let Some(&first) = values.first() else {
        return Complex64::new(0.0, 0.0);
    };
    let mut acc = ComplexCompensatedSum::new();
    for &v in &values[1..] {
        acc.add(v - first);
    }
    first + acc.value() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn anchored_mean_is_exact_on_constants() {
        let c = Complex64::new(0.1, -0.7);
        let v = vec![c; 7];
        assert_eq!(anchored_mean(&v), c);
    }

    #[test]
    fn fmt17_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
    }
}
