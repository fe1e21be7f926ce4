//! Running mean and standard error.

/// Welford accumulator. Merging makes aggregation independent of trial order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation over `sqrt(n)`; zero below two samples.
    pub fn std_err(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass_formulas() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let mut s = RunningStats::default();
        xs.iter().for_each(|&x| s.push(x));
        assert_eq!(s.mean(), 5.0);
        // Sample variance 32/7.
        assert!((s.std_err() - (32.0f64 / 7.0 / 8.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut all = RunningStats::default();
        xs.iter().for_each(|&x| all.push(x));
        let (a, b) = xs.split_at(17);
        let mut left = RunningStats::default();
        let mut right = RunningStats::default();
        a.iter().for_each(|&x| left.push(x));
        b.iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert_eq!(left.count(), 50);
        assert!((left.mean() - all.mean()).abs() < 1e-12);
        assert!((left.std_err() - all.std_err()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_counts() {
        let mut s = RunningStats::default();
        assert_eq!(s.std_err(), 0.0);
        s.push(3.0);
        assert_eq!(s.std_err(), 0.0);
        assert_eq!(s.mean(), 3.0);
    }
}
