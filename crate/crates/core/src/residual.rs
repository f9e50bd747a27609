//! Scale-free residual accumulation.

/// Running max of |lhs − rhs| together with the largest magnitude of anything
/// that entered the comparison. The reported value is the former divided by
/// `max(1, latter)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residual {
    diff: f64,
    scale: f64,
}

impl Residual {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, lhs: f64, rhs: f64) {
        self.push(lhs - rhs, lhs.abs().max(rhs.abs()));
    }

    /// Component that should vanish.
    pub fn zero(&mut self, v: f64) {
        self.push(v, v.abs());
    }

    /// Raises the normalization scale (magnitude of an intermediate term).
    pub fn scale_by(&mut self, s: f64) {
        if s.is_nan() {
            self.diff = f64::INFINITY;
        } else {
            self.scale = self.scale.max(s.abs());
        }
    }

    fn push(&mut self, d: f64, s: f64) {
        if d.is_nan() || s.is_nan() {
            self.diff = f64::INFINITY;
            return;
        }
        self.diff = self.diff.max(d.abs());
        self.scale = self.scale.max(s);
    }

    pub fn raw(&self) -> f64 {
        self.diff
    }

    pub fn value(&self) -> f64 {
        self.diff / self.scale.max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_by_largest_term() {
        let mut r = Residual::new();
        r.check(100.0, 100.5);
        assert_eq!(r.value(), 0.5 / 100.5);
        let mut s = Residual::new();
        s.check(0.25, 0.0);
        assert_eq!(s.value(), 0.25);
        let mut t = Residual::new();
        t.zero(f64::NAN);
        assert!(t.value().is_infinite());
    }
}
