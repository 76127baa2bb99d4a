//! Compensated summation.

use super::dd::{two_sum, Dd};
use super::ext::{frexp, Ext};

/// Neumaier's variant of Kahan summation; robust when a summand exceeds the
/// running sum in magnitude, which happens constantly in alternating series.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Double-double accumulator with a floating binary exponent.
///
/// Holds `acc * 2^exp` with `acc` kept near unit magnitude, so summands of any
/// size can be added without overflow. Summands far below the current scale
/// are absorbed (they fall under the double-double resolution anyway).
#[derive(Clone, Copy, Debug, Default)]
pub struct ExtAccumulator {
    acc: Dd,
    exp: i64,
}

impl ExtAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `m * 2^e`.
    pub fn add_scaled(&mut self, m: Dd, e: i64) {
        if m.is_zero() {
            return;
        }
        if self.acc.is_zero() {
            self.acc = m;
            self.exp = e;
        } else if e > self.exp {
            self.acc = self.acc.ldexp(self.exp - e) + m;
            self.exp = e;
        } else {
            self.acc = self.acc + m.ldexp(e - self.exp);
        }
        self.renormalize();
    }

    pub fn add_ext(&mut self, x: Ext) {
        self.add_scaled(Dd::from_f64(x.mantissa()), x.exponent());
    }

    pub fn add_f64(&mut self, x: f64) {
        self.add_scaled(Dd::from_f64(x), 0);
    }

    fn renormalize(&mut self) {
        if self.acc.is_zero() {
            self.exp = 0;
            return;
        }
        let (_, fe) = frexp(self.acc.hi);
        if fe != 0 {
            self.acc = self.acc.ldexp(-fe);
            self.exp += fe;
        }
    }

    pub fn value(&self) -> Ext {
        Ext::from_dd(self.acc, self.exp)
    }

    /// Mantissa/exponent pair at full double-double precision.
    pub fn parts(&self) -> (Dd, i64) {
        (self.acc, self.exp)
    }
}

impl FromIterator<Ext> for ExtAccumulator {
    fn from_iter<I: IntoIterator<Item = Ext>>(iter: I) -> Self {
        let mut acc = ExtAccumulator::new();
        for x in iter {
            acc.add_ext(x);
        }
        acc
    }
}
