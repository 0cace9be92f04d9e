//! C ABI for the batched GP bandit library.
//!
//! Every object crosses the boundary as an opaque handle created by a
//! `gpbpe_*_new`-style constructor and released by the matching
//! `gpbpe_*_free`. Functions return a [`GpbpeStatus`] code; on failure a
//! thread-local message is retrievable via [`gpbpe_last_error_message`].
//! Out-parameters are written only on `Ok`. All pointer arguments must be
//! valid for the duration of the call; handles are not thread-safe to
//! mutate concurrently.

use gpbpe::conf::ConfidenceConfig;
use gpbpe::env::{self, Environment, PeakStyle};
use gpbpe::policy::{self, PolicyConfig, PolicyVariant, RunRecord, TieBreak};
use gpbpe::schedule::{self, BatchSchedule};
use gpbpe::{Error, GPModel, KernelSpec};
use libc::{c_char, size_t};
use std::cell::RefCell;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpbpeStatus {
    Ok = 0,
    InvalidInput = 1,
    ConfigError = 2,
    NumericalError = 3,
    StateError = 4,
    ResourceError = 5,
    IoError = 6,
    NullPointer = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|slot| {
        let mut bytes = msg.as_bytes().to_vec();
        bytes.push(0);
        *slot.borrow_mut() = bytes;
    });
}

fn status_of(err: &Error) -> GpbpeStatus {
    match err {
        Error::InvalidInput(_) => GpbpeStatus::InvalidInput,
        Error::Config(_) => GpbpeStatus::ConfigError,
        Error::Numerical(_) => GpbpeStatus::NumericalError,
        Error::State(_) => GpbpeStatus::StateError,
        Error::Resource(_) => GpbpeStatus::ResourceError,
        Error::Io(_) => GpbpeStatus::IoError,
    }
}

/// Copies the last error message (NUL-terminated) into `buf` and returns
/// the full length including the terminator; returns 0 when no error has
/// been recorded. The message is truncated if `len` is too small.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (then only the
/// required length is returned).
#[no_mangle]
pub unsafe extern "C" fn gpbpe_last_error_message(buf: *mut c_char, len: size_t) -> size_t {
    LAST_ERROR.with(|slot| {
        let bytes = slot.borrow();
        if bytes.is_empty() {
            return 0;
        }
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            // always NUL-terminate what was written
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Runs `f`, mapping errors and panics onto status codes.
fn guarded<F: FnOnce() -> Result<(), Error>>(f: F) -> GpbpeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GpbpeStatus::Ok,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            GpbpeStatus::Panic
        }
    }
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(concat!("null pointer argument: ", stringify!($ptr)));
            return GpbpeStatus::NullPointer;
        }
    };
}

/// Opaque kernel handle.
pub struct GpbpeKernel(KernelSpec);
/// Opaque posterior-model handle.
pub struct GpbpeModel(GPModel);
/// Opaque environment handle.
pub struct GpbpeEnvironment(Environment);
/// Opaque batch-schedule handle.
pub struct GpbpeSchedule(BatchSchedule);
/// Opaque run-trace handle.
pub struct GpbpeRunRecord(RunRecord);

/// One step of a run trace.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GpbpeStep {
    pub t: u64,
    pub batch: u64,
    pub point_index: u64,
    pub y: f64,
    pub regret: f64,
    pub cum_regret: f64,
}

/// Policy selector for [`gpbpe_run_fixed_beta`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpbpePolicyVariant {
    BpeBatchLocal = 0,
    BpeFullPosterior = 1,
    GpUcb = 2,
    BpeFixedBatches = 3,
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> &'a [f64] {
    if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(ptr, len)
    }
}

// ---------------------------------------------------------------- kernels

/// Creates a squared-exponential kernel.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_kernel_new_se(
    lengthscale: f64,
    dim: size_t,
    out: *mut *mut GpbpeKernel,
) -> GpbpeStatus {
    nonnull!(out);
    guarded(|| {
        let k = KernelSpec::squared_exponential(lengthscale, dim)?;
        *out = Box::into_raw(Box::new(GpbpeKernel(k)));
        Ok(())
    })
}

/// Creates a Matérn kernel (evaluation supports nu in {0.5, 1.5, 2.5}).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_kernel_new_matern(
    lengthscale: f64,
    nu: f64,
    dim: size_t,
    out: *mut *mut GpbpeKernel,
) -> GpbpeStatus {
    nonnull!(out);
    guarded(|| {
        let k = KernelSpec::matern(lengthscale, nu, dim)?;
        *out = Box::into_raw(Box::new(GpbpeKernel(k)));
        Ok(())
    })
}

/// Evaluates `k(x, x2)` for two points of length `dim`.
///
/// # Safety
/// `x` and `x2` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_kernel_eval(
    kernel: *const GpbpeKernel,
    x: *const f64,
    x2: *const f64,
    dim: size_t,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(kernel);
    nonnull!(x);
    nonnull!(x2);
    nonnull!(out);
    guarded(|| {
        let k = &(*kernel).0;
        let v = k.eval(slice_arg(x, dim), slice_arg(x2, dim))?;
        *out = v;
        Ok(())
    })
}

/// # Safety
/// `kernel` must be a handle from a `gpbpe_kernel_new_*` call, or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_kernel_free(kernel: *mut GpbpeKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

// ----------------------------------------------------------------- models

/// Fits a posterior over `n` design points given row-major coordinates.
///
/// # Safety
/// `design` must point to `n * dim` doubles (may be null when `n` is 0);
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_model_fit(
    kernel: *const GpbpeKernel,
    lambda: f64,
    design: *const f64,
    n: size_t,
    dim: size_t,
    out: *mut *mut GpbpeModel,
) -> GpbpeStatus {
    nonnull!(kernel);
    nonnull!(out);
    if n > 0 && design.is_null() {
        set_error("null design with nonzero length");
        return GpbpeStatus::NullPointer;
    }
    guarded(|| {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| slice_arg(design.add(i * dim), dim).to_vec())
            .collect();
        let m = GPModel::fit(&(*kernel).0, lambda, &pts)?;
        *out = Box::into_raw(Box::new(GpbpeModel(m)));
        Ok(())
    })
}

/// Returns a new model extended by one design point.
///
/// # Safety
/// `x` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_model_extend(
    model: *const GpbpeModel,
    x: *const f64,
    dim: size_t,
    out: *mut *mut GpbpeModel,
) -> GpbpeStatus {
    nonnull!(model);
    nonnull!(x);
    nonnull!(out);
    guarded(|| {
        let m = (*model).0.extend(slice_arg(x, dim))?;
        *out = Box::into_raw(Box::new(GpbpeModel(m)));
        Ok(())
    })
}

/// Returns a new model with observations attached (length must equal the
/// design size).
///
/// # Safety
/// `y` must point to `n` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_model_attach_observations(
    model: *const GpbpeModel,
    y: *const f64,
    n: size_t,
    out: *mut *mut GpbpeModel,
) -> GpbpeStatus {
    nonnull!(model);
    nonnull!(out);
    if n > 0 && y.is_null() {
        set_error("null observations with nonzero length");
        return GpbpeStatus::NullPointer;
    }
    guarded(|| {
        let m = (*model).0.attach_observations(slice_arg(y, n))?;
        *out = Box::into_raw(Box::new(GpbpeModel(m)));
        Ok(())
    })
}

/// Posterior mean at `x`; requires attached observations.
///
/// # Safety
/// `x` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_model_mean(
    model: *const GpbpeModel,
    x: *const f64,
    dim: size_t,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(model);
    nonnull!(x);
    nonnull!(out);
    guarded(|| {
        *out = (*model).0.mean(slice_arg(x, dim))?;
        Ok(())
    })
}

/// Posterior variance at `x`.
///
/// # Safety
/// `x` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_model_variance(
    model: *const GpbpeModel,
    x: *const f64,
    dim: size_t,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(model);
    nonnull!(x);
    nonnull!(out);
    guarded(|| {
        *out = (*model).0.variance(slice_arg(x, dim))?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a handle from a model constructor, or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_model_free(model: *mut GpbpeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

// ------------------------------------------------------------- confidence

/// The union-bounded offline confidence coefficient
/// `(psi + (r/sqrt(lambda)) * sqrt(2 ln(domain_size * num_batches / delta)))^2`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_beta_theoretical(
    psi: f64,
    noise_r: f64,
    lambda: f64,
    delta: f64,
    domain_size: size_t,
    num_batches: size_t,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(out);
    guarded(|| {
        let cfg =
            ConfidenceConfig::theoretical(psi, noise_r, lambda, delta, domain_size, num_batches);
        *out = gpbpe::conf::beta(&cfg, 1)?;
        Ok(())
    })
}

// -------------------------------------------------------------- schedules

/// Doubling-exponent schedule for horizon `t`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_schedule_orig(
    t: size_t,
    out: *mut *mut GpbpeSchedule,
) -> GpbpeStatus {
    nonnull!(out);
    guarded(|| {
        let s = schedule::orig_bpe_schedule(t)?;
        *out = Box::into_raw(Box::new(GpbpeSchedule(s)));
        Ok(())
    })
}

/// Kernel-specific constant-batch-count schedule.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_schedule_constant_b(
    t: size_t,
    b: size_t,
    kernel: *const GpbpeKernel,
    normalize: bool,
    out: *mut *mut GpbpeSchedule,
) -> GpbpeStatus {
    nonnull!(kernel);
    nonnull!(out);
    guarded(|| {
        let s = schedule::constant_b_schedule(t, b, &(*kernel).0, normalize)?;
        *out = Box::into_raw(Box::new(GpbpeSchedule(s)));
        Ok(())
    })
}

/// Equal-length schedule.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_schedule_fixed_equal(
    t: size_t,
    b: size_t,
    out: *mut *mut GpbpeSchedule,
) -> GpbpeStatus {
    nonnull!(out);
    guarded(|| {
        let s = schedule::fixed_equal_schedule(t, b)?;
        *out = Box::into_raw(Box::new(GpbpeSchedule(s)));
        Ok(())
    })
}

/// Number of batches; 0 for a null handle.
///
/// # Safety
/// `sched` must be a schedule handle or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_schedule_num_batches(sched: *const GpbpeSchedule) -> size_t {
    if sched.is_null() {
        return 0;
    }
    (*sched).0.num_batches()
}

/// Length of batch `i` (0-based).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_schedule_batch_length(
    sched: *const GpbpeSchedule,
    i: size_t,
    out: *mut size_t,
) -> GpbpeStatus {
    nonnull!(sched);
    nonnull!(out);
    guarded(|| {
        let lengths = (*sched).0.lengths();
        let v = lengths.get(i).ok_or_else(|| {
            Error::InvalidInput(format!(
                "batch index {i} out of range for {} batches",
                lengths.len()
            ))
        })?;
        *out = *v;
        Ok(())
    })
}

/// # Safety
/// `sched` must be a handle from a schedule constructor, or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_schedule_free(sched: *mut GpbpeSchedule) {
    if !sched.is_null() {
        drop(Box::from_raw(sched));
    }
}

// ------------------------------------------------------------ environments

/// Synthetic 2D surface on a `per_axis x per_axis` grid over [0,1]^2;
/// `multi_peak` false gives one dominant bump, true gives 3-5 near-equal
/// bumps.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_peaked(
    per_axis: size_t,
    multi_peak: bool,
    noise_sigma: f64,
    seed: u64,
    out: *mut *mut GpbpeEnvironment,
) -> GpbpeStatus {
    nonnull!(out);
    guarded(|| {
        let grid = env::build_grid(2, per_axis, 0.0, 1.0);
        let style = if multi_peak {
            PeakStyle::MultiPeak
        } else {
            PeakStyle::SinglePeak
        };
        let e = env::make_peaked_function(&grid, style, seed)?
            .with_noise_sigma(noise_sigma)
            .with_per_axis(per_axis);
        *out = Box::into_raw(Box::new(GpbpeEnvironment(e)));
        Ok(())
    })
}

/// Function with exactly known RKHS norm `psi` on a `d`-dimensional grid.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_rkhs(
    kernel: *const GpbpeKernel,
    d: size_t,
    per_axis: size_t,
    psi: f64,
    num_centers: size_t,
    noise_sigma: f64,
    seed: u64,
    out: *mut *mut GpbpeEnvironment,
) -> GpbpeStatus {
    nonnull!(kernel);
    nonnull!(out);
    guarded(|| {
        let grid = env::build_grid(d, per_axis, 0.0, 1.0);
        let e = env::sample_rkhs_function(&(*kernel).0, &grid, psi, num_centers, seed)?
            .with_noise_sigma(noise_sigma)
            .with_per_axis(per_axis);
        *out = Box::into_raw(Box::new(GpbpeEnvironment(e)));
        Ok(())
    })
}

/// # Safety
/// `env_` must be an environment handle or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_num_points(env_: *const GpbpeEnvironment) -> size_t {
    if env_.is_null() {
        return 0;
    }
    (*env_).0.num_points()
}

/// # Safety
/// `env_` must be an environment handle or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_optimum_index(env_: *const GpbpeEnvironment) -> size_t {
    if env_.is_null() {
        return 0;
    }
    (*env_).0.optimum_index()
}

/// Ground-truth value of point `index`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_f_value(
    env_: *const GpbpeEnvironment,
    index: size_t,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(env_);
    nonnull!(out);
    guarded(|| {
        let e = &(*env_).0;
        let v = e.f_values().get(index).ok_or_else(|| {
            Error::InvalidInput(format!("index {index} out of range"))
        })?;
        *out = *v;
        Ok(())
    })
}

/// Noisy observation keyed by `(seed, t)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_observe(
    env_: *const GpbpeEnvironment,
    index: size_t,
    t: size_t,
    seed: u64,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(env_);
    nonnull!(out);
    guarded(|| {
        let e = &(*env_).0;
        if index >= e.num_points() {
            return Err(Error::InvalidInput(format!("index {index} out of range")));
        }
        *out = e.observe(index, t, seed);
        Ok(())
    })
}

/// Instantaneous regret of point `index`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_regret(
    env_: *const GpbpeEnvironment,
    index: size_t,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(env_);
    nonnull!(out);
    guarded(|| {
        let e = &(*env_).0;
        if index >= e.num_points() {
            return Err(Error::InvalidInput(format!("index {index} out of range")));
        }
        *out = e.regret(index);
        Ok(())
    })
}

/// # Safety
/// `env_` must be a handle from an environment constructor, or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_env_free(env_: *mut GpbpeEnvironment) {
    if !env_.is_null() {
        drop(Box::from_raw(env_));
    }
}

// ------------------------------------------------------------------- runs

/// Runs a policy with a constant exploration coefficient and returns the
/// per-step trace. `sched` is required for the batched variants and
/// ignored by GP-UCB (it may be null there).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_run_fixed_beta(
    variant: GpbpePolicyVariant,
    env_: *const GpbpeEnvironment,
    kernel: *const GpbpeKernel,
    sched: *const GpbpeSchedule,
    lambda: f64,
    beta: f64,
    horizon: size_t,
    seed: u64,
    out: *mut *mut GpbpeRunRecord,
) -> GpbpeStatus {
    nonnull!(env_);
    nonnull!(kernel);
    nonnull!(out);
    guarded(|| {
        let variant = match variant {
            GpbpePolicyVariant::BpeBatchLocal => PolicyVariant::BpeBatchLocal,
            GpbpePolicyVariant::BpeFullPosterior => PolicyVariant::BpeFullPosterior,
            GpbpePolicyVariant::GpUcb => PolicyVariant::GpUcb,
            GpbpePolicyVariant::BpeFixedBatches => PolicyVariant::BpeFixedBatches,
        };
        let schedule = if sched.is_null() {
            None
        } else {
            Some((*sched).0.clone())
        };
        let config = PolicyConfig {
            variant,
            schedule,
            confidence: ConfidenceConfig::fixed(beta, lambda),
            kernel: (*kernel).0.clone(),
            tie_break: TieBreak::LowestIndex,
        };
        let record = policy::run(&config, &(*env_).0, horizon, seed)?;
        *out = Box::into_raw(Box::new(GpbpeRunRecord(record)));
        Ok(())
    })
}

/// Number of steps in the trace; 0 for a null handle.
///
/// # Safety
/// `record` must be a run-record handle or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_run_record_len(record: *const GpbpeRunRecord) -> size_t {
    if record.is_null() {
        return 0;
    }
    (*record).0.steps.len()
}

/// Copies step `i` (0-based) into `out`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_run_record_step(
    record: *const GpbpeRunRecord,
    i: size_t,
    out: *mut GpbpeStep,
) -> GpbpeStatus {
    nonnull!(record);
    nonnull!(out);
    guarded(|| {
        let steps = &(*record).0.steps;
        let s = steps.get(i).ok_or_else(|| {
            Error::InvalidInput(format!(
                "step index {i} out of range for {} steps",
                steps.len()
            ))
        })?;
        *out = GpbpeStep {
            t: s.t as u64,
            batch: s.batch as u64,
            point_index: s.point_index as u64,
            y: s.y,
            regret: s.regret,
            cum_regret: s.cum_regret,
        };
        Ok(())
    })
}

/// Final cumulative regret of the trace.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_run_record_total_regret(
    record: *const GpbpeRunRecord,
    out: *mut f64,
) -> GpbpeStatus {
    nonnull!(record);
    nonnull!(out);
    guarded(|| {
        *out = (*record).0.total_regret();
        Ok(())
    })
}

/// # Safety
/// `record` must be a handle from `gpbpe_run_fixed_beta`, or null.
#[no_mangle]
pub unsafe extern "C" fn gpbpe_run_record_free(record: *mut GpbpeRunRecord) {
    if !record.is_null() {
        drop(Box::from_raw(record));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn kernel_roundtrip_through_c_abi() {
        unsafe {
            let mut k: *mut GpbpeKernel = ptr::null_mut();
            assert_eq!(gpbpe_kernel_new_se(0.5, 1, &mut k), GpbpeStatus::Ok);
            let mut v = 0.0;
            let x = [0.0];
            let y = [0.5];
            assert_eq!(
                gpbpe_kernel_eval(k, x.as_ptr(), y.as_ptr(), 1, &mut v),
                GpbpeStatus::Ok
            );
            assert!((v - (-0.5f64).exp()).abs() < 1e-12);
            gpbpe_kernel_free(k);
        }
    }

    #[test]
    fn null_pointers_are_rejected_with_message() {
        unsafe {
            let mut v = 0.0;
            let status =
                gpbpe_kernel_eval(ptr::null(), ptr::null(), ptr::null(), 1, &mut v);
            assert_eq!(status, GpbpeStatus::NullPointer);
            let mut buf = vec![0i8; 128];
            let n = gpbpe_last_error_message(buf.as_mut_ptr(), buf.len());
            assert!(n > 0);
            let msg = std::ffi::CStr::from_ptr(buf.as_ptr()).to_string_lossy();
            assert!(msg.contains("null pointer"), "{msg}");
        }
    }

    #[test]
    fn config_errors_map_to_status() {
        unsafe {
            let mut k: *mut GpbpeKernel = ptr::null_mut();
            assert_eq!(
                gpbpe_kernel_new_se(-1.0, 1, &mut k),
                GpbpeStatus::ConfigError
            );
            // unsupported Matérn smoothness surfaces at evaluation
            assert_eq!(gpbpe_kernel_new_matern(1.0, 1.0, 1, &mut k), GpbpeStatus::Ok);
            let mut v = 0.0;
            let x = [0.0];
            let y = [1.0];
            assert_eq!(
                gpbpe_kernel_eval(k, x.as_ptr(), y.as_ptr(), 1, &mut v),
                GpbpeStatus::ConfigError
            );
            gpbpe_kernel_free(k);
        }
    }

    #[test]
    fn model_fit_and_query() {
        unsafe {
            let mut k: *mut GpbpeKernel = ptr::null_mut();
            gpbpe_kernel_new_se(0.5, 1, &mut k);
            let design = [0.4f64];
            let mut m: *mut GpbpeModel = ptr::null_mut();
            assert_eq!(
                gpbpe_model_fit(k, 1.0, design.as_ptr(), 1, 1, &mut m),
                GpbpeStatus::Ok
            );
            let mut var = 0.0;
            assert_eq!(
                gpbpe_model_variance(m, design.as_ptr(), 1, &mut var),
                GpbpeStatus::Ok
            );
            assert!((var - 0.5).abs() < 1e-12);
            // mean before observations is a state error
            let mut mu = 0.0;
            assert_eq!(
                gpbpe_model_mean(m, design.as_ptr(), 1, &mut mu),
                GpbpeStatus::StateError
            );
            let y = [2.0f64];
            let mut m2: *mut GpbpeModel = ptr::null_mut();
            assert_eq!(
                gpbpe_model_attach_observations(m, y.as_ptr(), 1, &mut m2),
                GpbpeStatus::Ok
            );
            assert_eq!(
                gpbpe_model_mean(m2, design.as_ptr(), 1, &mut mu),
                GpbpeStatus::Ok
            );
            assert!((mu - 1.0).abs() < 1e-12);
            gpbpe_model_free(m);
            gpbpe_model_free(m2);
            gpbpe_kernel_free(k);
        }
    }

    #[test]
    fn schedule_accessors() {
        unsafe {
            let mut s: *mut GpbpeSchedule = ptr::null_mut();
            assert_eq!(gpbpe_schedule_orig(1000, &mut s), GpbpeStatus::Ok);
            assert_eq!(gpbpe_schedule_num_batches(s), 4);
            let expect = [32usize, 179, 424, 365];
            for (i, e) in expect.iter().enumerate() {
                let mut v = 0usize;
                assert_eq!(gpbpe_schedule_batch_length(s, i, &mut v), GpbpeStatus::Ok);
                assert_eq!(v, *e);
            }
            let mut v = 0usize;
            assert_eq!(
                gpbpe_schedule_batch_length(s, 9, &mut v),
                GpbpeStatus::InvalidInput
            );
            gpbpe_schedule_free(s);
        }
    }

    #[test]
    fn end_to_end_run_through_c_abi() {
        unsafe {
            let mut k: *mut GpbpeKernel = ptr::null_mut();
            gpbpe_kernel_new_se(0.4, 1, &mut k);
            let mut e: *mut GpbpeEnvironment = ptr::null_mut();
            assert_eq!(
                gpbpe_env_rkhs(k, 1, 15, 1.0, 4, 0.02, 9, &mut e),
                GpbpeStatus::Ok
            );
            assert_eq!(gpbpe_env_num_points(e), 15);
            let mut s: *mut GpbpeSchedule = ptr::null_mut();
            gpbpe_schedule_orig(30, &mut s);
            let mut r: *mut GpbpeRunRecord = ptr::null_mut();
            assert_eq!(
                gpbpe_run_fixed_beta(
                    GpbpePolicyVariant::BpeBatchLocal,
                    e,
                    k,
                    s,
                    0.0004,
                    2.0,
                    30,
                    9,
                    &mut r
                ),
                GpbpeStatus::Ok
            );
            assert_eq!(gpbpe_run_record_len(r), 30);
            let mut step = GpbpeStep {
                t: 0,
                batch: 0,
                point_index: 0,
                y: 0.0,
                regret: 0.0,
                cum_regret: 0.0,
            };
            assert_eq!(gpbpe_run_record_step(r, 0, &mut step), GpbpeStatus::Ok);
            assert_eq!(step.t, 1);
            let mut total = 0.0;
            assert_eq!(
                gpbpe_run_record_total_regret(r, &mut total),
                GpbpeStatus::Ok
            );
            assert!(total >= 0.0);
            // observation determinism through the ABI
            let mut a = 0.0;
            let mut b = 0.0;
            gpbpe_env_observe(e, 3, 7, 11, &mut a);
            gpbpe_env_observe(e, 3, 7, 11, &mut b);
            assert_eq!(a, b);
            gpbpe_run_record_free(r);
            gpbpe_schedule_free(s);
            gpbpe_env_free(e);
            gpbpe_kernel_free(k);
        }
    }
}
