//! Pre-specified batch-length sequences.
//!
//! All schedules are computable before any observation is made. Three
//! constructions are provided:
//!
//! * [`orig_bpe_schedule`]: the doubling-exponent recurrence
//!   `N_i = ⌈√(T·N_{i−1})⌉`, `N_0 = 1`, truncated to the horizon. The batch
//!   count satisfies `B ≤ ⌈log2 log2 T⌉ + 1`.
//! * [`constant_b_schedule`]: kernel-specific lengths for a fixed batch
//!   count `B`, with exponent `η = 1/2` (squared exponential, with a
//!   `(ln T)^d` factor) or `η = ν/(2ν+d)` (Matérn). The normalized variant
//!   drops the log factor and rescales so the lengths sum to the horizon.
//! * [`fixed_equal_schedule`]: equal lengths, remainder spread over the
//!   first batches.

use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::util::{ceil_log2_log2, ceil_sqrt};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    OrigBpe,
    ConstantBSe,
    ConstantBMatern,
    FixedEqual,
}

/// Batch lengths `N_1..N_B` summing exactly to the horizon `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchSchedule {
    lengths: Vec<usize>,
    horizon: usize,
    kind: ScheduleKind,
}

impl BatchSchedule {
    fn new(lengths: Vec<usize>, horizon: usize, kind: ScheduleKind) -> Self {
        debug_assert_eq!(lengths.iter().sum::<usize>(), horizon);
        debug_assert!(lengths.iter().all(|&n| n >= 1));
        Self {
            lengths,
            horizon,
            kind,
        }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn num_batches(&self) -> usize {
        self.lengths.len()
    }

    /// End times `t_i = N_1 + … + N_i`.
    pub fn batch_ends(&self) -> Vec<usize> {
        let mut acc = 0;
        self.lengths
            .iter()
            .map(|&n| {
                acc += n;
                acc
            })
            .collect()
    }
}

impl fmt::Display for BatchSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lengths.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Doubling-exponent schedule truncated to the horizon.
pub fn orig_bpe_schedule(t: usize) -> Result<BatchSchedule> {
    if t < 2 {
        return Err(Error::InvalidInput(format!(
            "horizon must be at least 2, got {t}"
        )));
    }
    let mut lengths = Vec::new();
    let mut prev = 1u64;
    let mut remaining = t;
    while remaining > 0 {
        let raw = ceil_sqrt(t as u64 * prev);
        let take = (raw as usize).min(remaining);
        lengths.push(take);
        remaining -= take;
        prev = raw;
    }
    let schedule = BatchSchedule::new(lengths, t, ScheduleKind::OrigBpe);
    debug_assert!(schedule.num_batches() <= ceil_log2_log2(t as u64) as usize + 1);
    Ok(schedule)
}

fn schedule_eta(kernel: &KernelSpec) -> f64 {
    match kernel.family() {
        KernelFamily::SquaredExponential => 0.5,
        KernelFamily::Matern => {
            let nu = kernel.nu().expect("Matérn spec stores nu");
            nu / (2.0 * nu + kernel.dim() as f64)
        }
    }
}

/// Kernel-specific schedule for a constant number of batches.
///
/// Without normalization the first `B−1` lengths follow the closed-form
/// expressions and the last batch is the remainder; if the remainder drops
/// below 1 the horizon is too small and a configuration error suggests the
/// normalized variant. With normalization, all `B` lengths are formed from
/// the exponent formula (log factor ignored), scaled by `T/ΣN_i`, rounded,
/// and the last batch absorbs the rounding residue.
pub fn constant_b_schedule(
    t: usize,
    b: usize,
    kernel: &KernelSpec,
    normalize: bool,
) -> Result<BatchSchedule> {
    if b < 2 {
        return Err(Error::InvalidInput(format!(
            "constant-batch schedule needs at least 2 batches, got {b}"
        )));
    }
    if t < b {
        return Err(Error::InvalidInput(format!(
            "horizon {t} is smaller than the batch count {b}"
        )));
    }
    let eta = schedule_eta(kernel);
    let d = kernel.dim() as f64;
    let tf = t as f64;
    let denom = 1.0 - eta.powi(b as i32);
    let kind = match kernel.family() {
        KernelFamily::SquaredExponential => ScheduleKind::ConstantBSe,
        KernelFamily::Matern => ScheduleKind::ConstantBMatern,
    };

    if normalize {
        // Exponent-only lengths for every batch (i = B gives exactly T).
        let raw: Vec<f64> = (1..=b)
            .map(|i| {
                if i == b {
                    tf
                } else {
                    tf.powf((1.0 - eta.powi(i as i32)) / denom).ceil()
                }
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let scale = tf / total;
        let mut lengths: Vec<i64> = raw.iter().map(|&n| (n * scale).round() as i64).collect();
        let head: i64 = lengths[..b - 1].iter().sum();
        lengths[b - 1] = t as i64 - head;
        // Feasibility floor: raise sub-unit batches to 1, taking the
        // deficit from the largest batch.
        loop {
            let Some(low) = lengths.iter().position(|&n| n < 1) else {
                break;
            };
            let deficit = 1 - lengths[low];
            lengths[low] = 1;
            let largest = (0..b)
                .max_by_key(|&i| lengths[i])
                .expect("nonempty lengths");
            lengths[largest] -= deficit;
            if lengths[largest] < 1 {
                return Err(Error::Config(format!(
                    "cannot arrange {b} batches within horizon {t}"
                )));
            }
        }
        let lengths: Vec<usize> = lengths.into_iter().map(|n| n as usize).collect();
        return Ok(BatchSchedule::new(lengths, t, kind));
    }

    let log_factor = tf.ln().powf(d);
    let mut lengths: Vec<usize> = Vec::with_capacity(b);
    for i in 1..=b - 1 {
        let expo = (1.0 - eta.powi(i as i32)) / denom;
        let raw = match kernel.family() {
            KernelFamily::SquaredExponential => (tf / log_factor).powf(expo) * log_factor,
            KernelFamily::Matern => tf.powf(expo),
        };
        if !raw.is_finite() {
            return Err(Error::Config(format!(
                "batch length overflowed for horizon {t}"
            )));
        }
        lengths.push(raw.ceil() as usize);
    }
    let head: usize = lengths.iter().sum();
    if head >= t {
        return Err(Error::Config(format!(
            "constant-batch schedule infeasible at horizon {t} with B = {b}: \
             the first {} batches already cover {head} ≥ {t} steps; \
             enable normalization",
            b - 1
        )));
    }
    lengths.push(t - head);
    Ok(BatchSchedule::new(lengths, t, kind))
}

/// Equal batch lengths, remainder spread over the first `T mod B` batches.
pub fn fixed_equal_schedule(t: usize, b: usize) -> Result<BatchSchedule> {
    if b == 0 || b > t {
        return Err(Error::InvalidInput(format!(
            "batch count must lie in 1..={t}, got {b}"
        )));
    }
    let base = t / b;
    let rem = t % b;
    let lengths: Vec<usize> = (0..b).map(|i| base + usize::from(i < rem)).collect();
    Ok(BatchSchedule::new(lengths, t, ScheduleKind::FixedEqual))
}

/// Exact bound from the doubling-exponent recurrence: `⌈log2 log2 T⌉ + 1`.
pub fn orig_bpe_batch_bound(t: usize) -> usize {
    ceil_log2_log2(t as u64) as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn orig_schedule_at_1000() {
        let s = orig_bpe_schedule(1000).unwrap();
        assert_eq!(s.lengths(), &[32, 179, 424, 365]);
        assert_eq!(s.num_batches(), 4);
        assert_eq!(s.to_string(), "32,179,424,365");
        assert_eq!(s.batch_ends(), vec![32, 211, 635, 1000]);
    }

    #[test]
    fn orig_schedule_at_4() {
        let s = orig_bpe_schedule(4).unwrap();
        assert_eq!(s.lengths(), &[2, 2]);
        assert_eq!(orig_bpe_batch_bound(4), 2);
    }

    #[test]
    fn orig_schedule_rejects_tiny_horizon() {
        assert!(orig_bpe_schedule(1).is_err());
    }

    #[test]
    fn constant_b_matern_example() {
        // nu = 1, d = 2 -> eta = 1/4; exponents 16/21 and 20/21
        let k = KernelSpec::matern(1.0, 1.0, 2).unwrap();
        let s = constant_b_schedule(1000, 3, &k, false).unwrap();
        assert_eq!(s.lengths(), &[194, 720, 86]);
        assert_eq!(s.kind(), ScheduleKind::ConstantBMatern);
    }

    #[test]
    fn constant_b_two_batches_exponent_algebra() {
        // B = 2: N_1 = ceil(T^(1/(1+eta)))
        let k = KernelSpec::matern(1.0, 1.5, 1).unwrap();
        let eta = 1.5 / (2.0 * 1.5 + 1.0);
        for t in [100usize, 1000, 20_000] {
            let s = constant_b_schedule(t, 2, &k, false).unwrap();
            let expect = (t as f64).powf(1.0 / (1.0 + eta)).ceil() as usize;
            assert_eq!(s.lengths()[0], expect);
        }
    }

    #[test]
    fn constant_b_se_example() {
        // d = 2, B = 3, T = 1000, natural log:
        // N_1 = ceil((1000/(ln 1000)^2)^(4/7) * (ln 1000)^2) = 272
        let k = KernelSpec::squared_exponential(0.5, 2).unwrap();
        let s = constant_b_schedule(1000, 3, &k, false).unwrap();
        assert_eq!(s.lengths()[0], 272);
        assert_eq!(s.kind(), ScheduleKind::ConstantBSe);
    }

    #[test]
    fn constant_b_infeasible_directs_to_normalization() {
        let k = KernelSpec::squared_exponential(0.5, 2).unwrap();
        // At a small horizon the SE log factor dominates and the head
        // batches exceed T.
        let err = constant_b_schedule(40, 3, &k, false).unwrap_err();
        match err {
            Error::Config(msg) => assert!(msg.contains("normalization")),
            other => panic!("expected configuration error, got {other:?}"),
        }
        assert!(constant_b_schedule(40, 3, &k, true).is_ok());
    }

    #[test]
    fn normalized_lengths_sum_to_horizon_and_grow() {
        let k = KernelSpec::squared_exponential(0.5, 2).unwrap();
        for b in [3usize, 4, 6] {
            let s = constant_b_schedule(1000, b, &k, true).unwrap();
            assert_eq!(s.lengths().iter().sum::<usize>(), 1000);
            assert_eq!(s.num_batches(), b);
            for w in s.lengths().windows(2) {
                assert!(w[0] < w[1], "lengths {:?} not increasing", s.lengths());
            }
        }
    }

    #[test]
    fn fixed_equal_examples() {
        assert_eq!(
            fixed_equal_schedule(1000, 4).unwrap().lengths(),
            &[250, 250, 250, 250]
        );
        assert_eq!(fixed_equal_schedule(10, 3).unwrap().lengths(), &[4, 3, 3]);
        assert!(fixed_equal_schedule(3, 4).is_err());
    }

    #[test]
    fn batch_count_bound_holds_on_small_exhaustive_range() {
        for t in 4..=4096 {
            let s = orig_bpe_schedule(t).unwrap();
            assert!(
                s.num_batches() <= orig_bpe_batch_bound(t),
                "bound violated at T = {t}: {} > {}",
                s.num_batches(),
                orig_bpe_batch_bound(t)
            );
        }
    }

    proptest! {
        #[test]
        fn orig_sum_equals_horizon(t in 2usize..200_000) {
            let s = orig_bpe_schedule(t).unwrap();
            prop_assert_eq!(s.lengths().iter().sum::<usize>(), t);
            prop_assert!(s.lengths().iter().all(|&n| n >= 1));
        }

        #[test]
        fn fixed_equal_sum_equals_horizon(t in 1usize..100_000, b in 1usize..64) {
            prop_assume!(b <= t);
            let s = fixed_equal_schedule(t, b).unwrap();
            prop_assert_eq!(s.lengths().iter().sum::<usize>(), t);
            prop_assert_eq!(s.num_batches(), b);
        }

        #[test]
        fn constant_b_sum_equals_horizon(t in 50usize..50_000, b in 2usize..7, nu_i in 1usize..6) {
            let nu = nu_i as f64 / 2.0;
            let k = KernelSpec::matern(1.0, nu, 2).unwrap();
            if let Ok(s) = constant_b_schedule(t, b, &k, false) {
                prop_assert_eq!(s.lengths().iter().sum::<usize>(), t);
                // head lengths strictly increase
                for w in s.lengths()[..s.num_batches() - 1].windows(2) {
                    prop_assert!(w[0] < w[1]);
                }
            }
            let s = constant_b_schedule(t, b, &k, true).unwrap();
            prop_assert_eq!(s.lengths().iter().sum::<usize>(), t);
            prop_assert!(s.lengths().iter().all(|&n| n >= 1));
        }
    }
}
