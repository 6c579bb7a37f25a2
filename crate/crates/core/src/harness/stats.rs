use serde::Serialize;

/// Sample statistics. `std` and `se` are `None` below two samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StatSummary {
    pub count: usize,
    pub mean: f64,
    pub std: Option<f64>,
    pub se: Option<f64>,
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

impl StatSummary {
    /// Two-pass mean and unbiased variance. An empty slice has mean NaN.
    pub fn from_samples(xs: &[f64]) -> StatSummary {
        let count = xs.len();
        if count == 0 {
            return StatSummary { count, mean: f64::NAN, std: None, se: None };
        }
        let mean = pairwise_sum(xs) / count as f64;
        if count < 2 {
            return StatSummary { count, mean, std: None, se: None };
        }
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let std = (pairwise_sum(&dev) / (count - 1) as f64).sqrt();
        StatSummary { count, mean, std: Some(std), se: Some(std / (count as f64).sqrt()) }
    }

    pub fn variance(&self) -> Option<f64> {
        self.std.map(|s| s * s)
    }

    /// `|mean − target| ≤ z·se`; false without a standard error.
    pub fn within(&self, target: f64, z: f64) -> bool {
        self.se.is_some_and(|se| (self.mean - target).abs() <= z * se)
    }

    /// `|mean_a − mean_b| ≤ z·√(se_a² + se_b²)`.
    pub fn agrees_with(&self, other: &StatSummary, z: f64) -> bool {
        match (self.se, other.se) {
            (Some(a), Some(b)) => (self.mean - other.mean).abs() <= z * (a * a + b * b).sqrt(),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let s = StatSummary::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std.unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.se.unwrap() - s.std.unwrap() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_sample_has_no_spread() {
        let s = StatSummary::from_samples(&[7.0]);
        assert_eq!((s.count, s.mean, s.std, s.se), (1, 7.0, None, None));
        assert!(StatSummary::from_samples(&[]).mean.is_nan());
    }

    #[test]
    fn pairwise_sum_is_accurate() {
        let xs = vec![0.1; 1 << 20];
        assert!((pairwise_sum(&xs) - 104_857.6).abs() < 1e-8);
    }

    #[test]
    fn agreement() {
        let a = StatSummary { count: 10, mean: 1.0, std: Some(1.0), se: Some(0.1) };
        let b = StatSummary { count: 10, mean: 1.4, std: Some(1.0), se: Some(0.1) };
        assert!(a.agrees_with(&b, 3.0));
        assert!(!a.agrees_with(&b, 2.0));
        assert!(a.within(1.25, 3.0) && !a.within(1.35, 3.0));
    }
}
