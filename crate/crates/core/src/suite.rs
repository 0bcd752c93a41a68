//! Seeded randomized and grid suites share one report shape.

use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// At most this many failing instance indices are kept in a report.
pub const MAX_LISTED: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub check: String,
    pub instances: usize,
    pub failures: usize,
    /// Smallest margin seen (negative means a violation); +∞ when empty.
    pub worst_slack: f64,
    pub seed: u64,
    /// Indices of failing instances; instance i is replayed with
    /// `instance_rng(seed, i)` or is the i-th grid point.
    pub failing: Vec<usize>,
}

/// Generator for instance `i` of a suite: same seed, stream `i`.
pub fn instance_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// Accumulates (pass, slack) outcomes in instance order.
#[derive(Debug, Clone)]
pub struct Tally {
    report: SuiteReport,
}

impl Tally {
    pub fn new(check: &str, seed: u64) -> Self {
        Tally {
            report: SuiteReport {
                check: check.into(),
                instances: 0,
                failures: 0,
                worst_slack: f64::INFINITY,
                seed,
                failing: Vec::new(),
            },
        }
    }

    pub fn record(&mut self, pass: bool, slack: f64) {
        let r = &mut self.report;
        if !pass {
            if r.failing.len() < MAX_LISTED {
                r.failing.push(r.instances);
            }
            r.failures += 1;
        }
        r.worst_slack = r.worst_slack.min(slack);
        r.instances += 1;
    }

    pub fn instances(&self) -> usize {
        self.report.instances
    }

    pub fn finish(self) -> SuiteReport {
        self.report
    }
}

/// Run `instances` independent draws, instance i using `instance_rng(seed, i)`.
pub fn run_random<F>(check: &str, seed: u64, instances: usize, one: F) -> Result<SuiteReport>
where
    F: Fn(&mut ChaCha8Rng) -> Result<(bool, f64)>,
{
    let mut t = Tally::new(check, seed);
    for i in 0..instances {
        let (pass, slack) = one(&mut instance_rng(seed, i as u64))?;
        t.record(pass, slack);
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = instance_rng(3, 0).random();
        let b: u64 = instance_rng(3, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, instance_rng(3, 0).random::<u64>());
    }

    #[test]
    fn tally_lists_failures() {
        let mut t = Tally::new("x", 9);
        t.record(true, 0.5);
        t.record(false, -1.0);
        t.record(true, 0.2);
        let r = t.finish();
        assert_eq!((r.instances, r.failures, r.failing.clone()), (3, 1, alloc::vec![1]));
        assert_eq!(r.worst_slack, -1.0);
    }
}
