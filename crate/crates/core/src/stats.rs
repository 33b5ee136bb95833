//! Compensated summation and sample summaries.

use serde::Serialize;

/// Neumaier (improved Kahan) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Running moments of a sample, mergeable in a fixed order.
#[derive(Clone, Copy, Debug)]
pub struct Accumulator {
    count: u64,
    sum: NeumaierSum,
    sum_sq: NeumaierSum,
    min: f64,
    max: f64,
}

impl Default for Accumulator {
    fn default() -> Self {
        Accumulator {
            count: 0,
            sum: NeumaierSum::default(),
            sum_sq: NeumaierSum::default(),
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum.add(x);
        self.sum_sq.add(x * x);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.count as f64
    }

    /// Unbiased sample standard deviation (0 for fewer than two samples).
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 || self.min == self.max {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = (self.sum_sq.value() - n * mean * mean) / (n - 1.0);
        var.max(0.0).sqrt()
    }

    pub fn finish(&self, exhaustive: bool) -> EstimateResult {
        let mean = self.mean();
        let std_dev = self.std_dev();
        let std_error = if exhaustive { 0.0 } else { std_dev / (self.count as f64).sqrt() };
        EstimateResult {
            // rounding in the mean can land a hair outside [min, max]
            mean: mean.clamp(self.min, self.max),
            std_error,
            std_dev,
            sample_count: self.count,
            min: self.min,
            max: self.max,
        }
    }
}

/// Summary of a set of `F^max_avg` evaluations (placements or Monte Carlo samples).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateResult {
    pub mean: f64,
    /// Sample std / sqrt(count) for sampled estimates, 0 for exhaustive enumeration.
    pub std_error: f64,
    /// Spread of the individual evaluations.
    pub std_dev: f64,
    pub sample_count: u64,
    pub min: f64,
    pub max: f64,
}
