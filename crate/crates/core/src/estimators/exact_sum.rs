//! Order-independent, correctly rounded floating point accumulation.
//!
//! Keeps a list of non-overlapping partials (Shewchuk's algorithm, the same
//! scheme behind Python's `math.fsum`). Adding and subtracting are both
//! exact, so a running sum that has seen `+x` and later `-x` holds exactly
//! the sum of the remaining values, and [`ExactSum::value`] returns that sum
//! rounded once. Two accumulators fed the same multiset in any order return
//! bit-identical values.

#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `x` exactly. `x` must be finite.
    pub fn add(&mut self, x: f64) {
        debug_assert!(x.is_finite());
        let mut x = x;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        if x != 0.0 {
            self.partials.push(x);
        }
    }

    pub fn sub(&mut self, x: f64) {
        self.add(-x);
    }

    /// The exact sum, rounded to nearest (ties to even).
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Half-way case: the remaining partials decide the rounding direction.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        s.extend(iter);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancels_exactly() {
        let mut s = ExactSum::new();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }

    #[test]
    fn sub_undoes_add() {
        let mut s: ExactSum = [0.1, 0.2, 0.3].into_iter().collect();
        s.sub(0.2);
        let t: ExactSum = [0.1, 0.3].into_iter().collect();
        assert_eq!(s.value(), t.value());
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(ExactSum::new().value(), 0.0);
    }

    proptest! {
        #[test]
        fn order_independent(mut xs in prop::collection::vec(-1e9f64..1e9, 0..200), seed in any::<u64>()) {
            let a: ExactSum = xs.iter().copied().collect();
            // cheap deterministic shuffle
            let mut state = seed | 1;
            for i in (1..xs.len()).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                xs.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let b: ExactSum = xs.iter().copied().collect();
            prop_assert_eq!(a.value().to_bits(), b.value().to_bits());
        }
    }
}
