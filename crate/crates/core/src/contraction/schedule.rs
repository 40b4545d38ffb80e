use crate::error::{Error, Result};

/// Survival-probability schedule for boosted contraction.
///
/// For `i > t` the value is
/// `1 - (1 + (B-1)·eta) / (B·i/2 - (B-1)·(rho + 1 - eta))`; at or below
/// the threshold it falls back to the unboosted `1 - 2/i`. `rho` is
/// clamped to at least 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QSchedule {
    boost: f64,
    eta: f64,
    rho: f64,
    threshold: usize,
}

impl QSchedule {
    pub fn new(boost: f64, eta: f64, rho: f64, threshold: usize) -> Result<Self> {
        if !(boost >= 1.0) || !boost.is_finite() {
            return Err(Error::BoostBelowOne(boost));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidSchedule(format!("eta={eta} outside [0,1]")));
        }
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::InvalidSchedule(format!("rho={rho} must be a finite nonnegative value")));
        }
        if threshold < 2 {
            return Err(Error::InvalidSchedule(format!("threshold t={threshold} below 2")));
        }
        let s = Self { boost, eta, rho: rho.max(1.0), threshold };
        // denominators grow with i, so the first boosted index is the worst
        let first = threshold + 1;
        let q = s.value(first);
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "q({first}) = {q} outside (0,1) for B={boost}, eta={eta}, rho={}, t={threshold}",
                s.rho
            )));
        }
        Ok(s)
    }

    /// Parameters used when the instance's error profile is unknown:
    /// `B = ceil(ln n)`, `t = max(2, ceil(sqrt m))`, `eta = 0`, `rho = 1`.
    pub fn practical(n: usize, m: usize) -> Result<Self> {
        let boost = (n as f64).ln().ceil().max(1.0);
        let threshold = ((m as f64).sqrt().ceil() as usize).max(2);
        Self::new(boost, 0.0, 1.0, threshold)
    }

    /// Unboosted schedule: `B = 1`, so `q(i) = 1 - 2/i` everywhere.
    pub fn unboosted(threshold: usize) -> Self {
        Self { boost: 1.0, eta: 0.0, rho: 1.0, threshold: threshold.max(2) }
    }

    pub fn boost(&self) -> f64 {
        self.boost
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The clamped value, at least 1.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// `q(i)` for `i >= 3`.
    pub fn value(&self, i: usize) -> f64 {
        if i <= self.threshold {
            return unboosted_q(i);
        }
        let b = self.boost;
        let num = 1.0 + (b - 1.0) * self.eta;
        let den = b * i as f64 / 2.0 - (b - 1.0) * (self.rho + (1.0 - self.eta));
        1.0 - num / den
    }

    /// `prod_{i=t+1}^{n} q(i)`.
    pub fn survival_product(&self, n: usize) -> f64 {
        (self.threshold + 1..=n).map(|i| self.value(i)).product()
    }

    /// Lower bound `((t - 2rho - 2)/n)^(2(eta + (1-eta)/B))` on the
    /// phase-one survival product; requires `t >= 2rho + 2`.
    pub fn survival_lower_bound(&self, n: usize) -> f64 {
        survival_lower_bound(self.boost, self.eta, self.rho, self.threshold, n)
    }
}

pub fn survival_lower_bound(boost: f64, eta: f64, rho: f64, t: usize, n: usize) -> f64 {
    let base = (t as f64 - 2.0 * rho - 2.0) / n as f64;
    base.powf(2.0 * (eta + (1.0 - eta) / boost))
}

/// `1 - 2/i`, the classical single-contraction survival bound.
pub fn unboosted_q(i: usize) -> f64 {
    1.0 - 2.0 / i as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_boost_reduces_to_classical() {
        for (eta, rho) in [(0.0, 1.0), (0.7, 3.0), (1.0, 10.0)] {
            let s = QSchedule::new(1.0, eta, rho, 2).unwrap();
            assert!((s.value(10) - 0.8).abs() < 1e-15);
            for i in 3..50 {
                assert!((s.value(i) - unboosted_q(i)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hand_evaluated_value() {
        // 1 - 5.5 / 27.5
        let s = QSchedule::new(10.0, 0.5, 2.0, 9).unwrap();
        assert!((s.value(10) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn threshold_and_below_use_classical() {
        let s = QSchedule::new(10.0, 0.5, 2.0, 12).unwrap();
        assert_eq!(s.value(10), unboosted_q(10));
    }

    #[test]
    fn large_boost_limit() {
        // eta=0, rho=1: q(i) = 1 - 1/(B(i/2 - 2) + 2) -> 1 monotonically
        let i = 10;
        let mut prev = 0.0;
        for b in [1.0, 2.0, 10.0, 100.0, 1e4, 1e8] {
            let q = QSchedule::new(b, 0.0, 1.0, 5).unwrap().value(i);
            let closed = 1.0 - 1.0 / (b * (i as f64 / 2.0 - 2.0) + 2.0);
            assert!((q - closed).abs() < 1e-12);
            assert!(q > prev);
            prev = q;
        }
        assert!(1.0 - prev < 1e-7);
    }

    #[test]
    fn rho_is_clamped() {
        let s = QSchedule::new(4.0, 0.0, 0.2, 6).unwrap();
        assert_eq!(s.rho(), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(QSchedule::new(0.5, 0.0, 1.0, 5), Err(Error::BoostBelowOne(_))));
        assert!(matches!(QSchedule::new(2.0, 1.5, 1.0, 5), Err(Error::InvalidSchedule(_))));
        // B=100, t=2: denominator at i=3 is 150 - 198 < 0
        assert!(matches!(QSchedule::new(100.0, 0.0, 1.0, 2), Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn values_in_unit_interval_when_t_large_enough() {
        for b in [1.0, 2.0, 7.5, 64.0] {
            for eta in [0.0, 0.3, 1.0] {
                for rho in [1.0f64, 2.5, 6.0] {
                    let t = (3.0 * rho + 2.0).ceil() as usize;
                    let s = QSchedule::new(b, eta, rho, t).unwrap();
                    for i in 3..200 {
                        let q = s.value(i);
                        assert!(q > 0.0 && q < 1.0, "q({i})={q}");
                    }
                }
            }
        }
    }
}
