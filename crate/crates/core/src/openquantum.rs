//! Open-system protocol runs with zero-temperature photon loss (Lindblad
//! master equation) and Gaussian timing jitter averaged over ensembles.
//!
//! The generator is integrated with classical fourth-order Runge-Kutta on the
//! dense density matrix. Operators are stored as sparse rows, and the
//! Hermiticity of the state is used to halve the work:
//! `[H, rho] = H rho - (H rho)^H` and `c rho c^H = c (c rho)^H`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, lift_field, FockSpace, QuantumState};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::model::{h_disp, h_rabi, rabi_ground_state, ModelParams};
use crate::protocol::{dispersive_initial_state, ProtocolConfig, ProtocolTrace, Variant};
use crate::scalar::{c, Real, C};
use crate::squeezing::bare_mode_report;

pub const DEFAULT_STEPS_PER_INTERVAL: usize = 200;
pub const DEFAULT_ENSEMBLE_SIZE: usize = 100;
/// Loss rate in units of `1 / dt_plus`.
pub const DEFAULT_GAMMA_DT_PLUS: f64 = 0.01;

pub const TRACE_TOLERANCE: f64 = 1e-7;
pub const HERMITICITY_TOLERANCE: f64 = 1e-9;
pub const POSITIVITY_TOLERANCE: f64 = 1e-7;
/// Max elementwise change between a step count and its doubling.
pub const RICHARDSON_TOLERANCE: f64 = 1e-9;
/// Step-count doublings attempted before giving up.
pub const MAX_REFINEMENTS: usize = 6;

/// How jitter offsets are drawn within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JitterMode {
    /// Fresh offset for every interval of every cycle (`2N` draws).
    #[default]
    PerInterval,
    /// One offset for `dt_plus` and one for `dt_minus`, reused each cycle.
    PerRun,
}

impl JitterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            JitterMode::PerInterval => "per-interval",
            JitterMode::PerRun => "per-run",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "per-interval" => Some(JitterMode::PerInterval),
            "per-run" => Some(JitterMode::PerRun),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig<T: Real> {
    /// Photon loss rate (absolute, in units of `omega`).
    pub gamma: T,
    /// Jitter width as a fraction of each dwell time.
    pub jitter_rel: T,
    pub ensemble_size: usize,
    pub rng_seed: u64,
    pub jitter_mode: JitterMode,
    pub steps_per_interval: usize,
    /// Keep every run's trace in the ensemble report.
    pub retain_runs: bool,
}

impl<T: Real> NoiseConfig<T> {
    pub fn new(gamma: T, jitter_rel: T, ensemble_size: usize, rng_seed: u64) -> Result<Self> {
        let cfg = Self {
            gamma,
            jitter_rel,
            ensemble_size,
            rng_seed,
            jitter_mode: JitterMode::default(),
            steps_per_interval: DEFAULT_STEPS_PER_INTERVAL,
            retain_runs: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loss `0.01 / dt_plus`, no jitter, 100 runs, seed 0.
    pub fn standard(p: &ModelParams<T>) -> Self {
        Self::new(
            gamma_per_dt_plus(p, T::lit(DEFAULT_GAMMA_DT_PLUS)),
            T::zero(),
            DEFAULT_ENSEMBLE_SIZE,
            0,
        )
        .expect("defaults are valid")
    }

    pub fn noiseless() -> Self {
        Self::new(T::zero(), T::zero(), 1, 0).expect("defaults are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.jitter_rel.is_finite() && self.jitter_rel >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "jitter_rel must be finite and >= 0, got {}",
                self.jitter_rel
            )));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidConfig("ensemble_size must be at least 1".into()));
        }
        if self.steps_per_interval == 0 {
            return Err(Error::InvalidConfig("steps_per_interval must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_jitter(mut self, jitter_rel: T) -> Result<Self> {
        self.jitter_rel = jitter_rel;
        self.validate()?;
        Ok(self)
    }

    pub fn with_jitter_mode(mut self, mode: JitterMode) -> Self {
        self.jitter_mode = mode;
        self
    }

    pub fn with_ensemble_size(mut self, n: usize) -> Result<Self> {
        self.ensemble_size = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Result<Self> {
        self.steps_per_interval = steps;
        self.validate()?;
        Ok(self)
    }

    pub fn retaining(mut self, on: bool) -> Self {
        self.retain_runs = on;
        self
    }
}

/// Absolute loss rate for a rate given in units of `1 / dt_plus`.
pub fn gamma_per_dt_plus<T: Real>(p: &ModelParams<T>, factor: T) -> T {
    factor / p.dt_plus
}

#[derive(Debug, Clone)]
struct SparseRows<T: Real> {
    rows: Vec<Vec<(usize, C<T>)>>,
}

impl<T: Real> SparseRows<T> {
    fn from_dense(m: &ComplexMatrix<T>) -> Self {
        let rows = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| **z != C::<T>::new(T::zero(), T::zero()))
                    .map(|(k, z)| (k, *z))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// `out = self * b` for row-major `n x n` `b`.
    fn mul(&self, b: &[C<T>], out: &mut [C<T>], n: usize) {
        for (i, row) in self.rows.iter().enumerate() {
            let dst = &mut out[i * n..(i + 1) * n];
            dst.fill(C::<T>::new(T::zero(), T::zero()));
            for &(k, v) in row {
                let src = &b[k * n..(k + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = *d + v * *s;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Generator<T: Real> {
    n: usize,
    h: SparseRows<T>,
    c: SparseRows<T>,
    cdc: SparseRows<T>,
    gamma: T,
}

#[derive(Debug, Clone)]
struct Work<T: Real> {
    x: Vec<C<T>>,
    y: Vec<C<T>>,
    yd: Vec<C<T>>,
    z: Vec<C<T>>,
    w: Vec<C<T>>,
}

impl<T: Real> Generator<T> {
    /// `out = L(rho)`, assuming `rho` Hermitian.
    fn apply(&self, work: &mut Work<T>, rho: &[C<T>], out: &mut [C<T>]) {
        let n = self.n;
        self.h.mul(rho, &mut work.x, n);
        let dissipate = self.gamma > T::zero();
        if dissipate {
            self.c.mul(rho, &mut work.y, n);
            for i in 0..n {
                for j in 0..n {
                    work.yd[i * n + j] = work.y[j * n + i].conj();
                }
            }
            self.c.mul(&work.yd, &mut work.z, n);
            self.cdc.mul(rho, &mut work.w, n);
        }
        let half = T::lit(0.5);
        for i in 0..n {
            for j in 0..n {
                let ij = i * n + j;
                let ji = j * n + i;
                let d = work.x[ij] - work.x[ji].conj();
                let mut v = c(d.im, -d.re);
                if dissipate {
                    let anti = work.w[ij] + work.w[ji].conj();
                    v = v + (work.z[ij] - anti * half) * self.gamma;
                }
                out[ij] = v;
            }
        }
    }
}

/// Fixed-step RK4 integrator for `rho' = -i[H, rho] + gamma D[c](rho)`.
#[derive(Debug, Clone)]
pub struct LindbladSolver<T: Real> {
    gen: Generator<T>,
    work: Work<T>,
    k: Vec<C<T>>,
    tmp: Vec<C<T>>,
    acc: Vec<C<T>>,
}

impl<T: Real> LindbladSolver<T> {
    pub fn new(h: &ComplexMatrix<T>, collapse: &ComplexMatrix<T>, gamma: T) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NonSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let n = h.rows();
        if collapse.rows() != n || collapse.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: collapse.rows(),
            });
        }
        let tol = T::tol(1e-9) * h.norm_inf().max(T::one());
        let dev = h.hermitian_deviation();
        if dev > tol {
            return Err(Error::NonHermitian {
                deviation: dev.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        if !(gamma.is_finite() && gamma >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "loss rate must be finite and >= 0, got {gamma}"
            )));
        }
        let cdc = collapse.dagger().matmul(collapse);
        let zero = vec![C::<T>::new(T::zero(), T::zero()); n * n];
        Ok(Self {
            gen: Generator {
                n,
                h: SparseRows::from_dense(h),
                c: SparseRows::from_dense(collapse),
                cdc: SparseRows::from_dense(&cdc),
                gamma,
            },
            work: Work {
                x: zero.clone(),
                y: zero.clone(),
                yd: zero.clone(),
                z: zero.clone(),
                w: zero.clone(),
            },
            k: zero.clone(),
            tmp: zero.clone(),
            acc: zero,
        })
    }

    pub fn dim(&self) -> usize {
        self.gen.n
    }

    pub fn gamma(&self) -> T {
        self.gen.gamma
    }

    /// One RK4 step of size `h` on row-major `rho`.
    pub fn step(&mut self, rho: &mut [C<T>], h: T) {
        let Self { gen, work, k, tmp, acc } = self;
        let two = T::lit(2.0);
        let sixth = h / T::lit(6.0);
        acc.copy_from_slice(rho);
        for stage in 0..4 {
            if stage == 0 {
                gen.apply(work, rho, k);
            } else {
                gen.apply(work, tmp, k);
            }
            let (weight, next) = match stage {
                0 => (sixth, h / two),
                1 => (sixth * two, h / two),
                2 => (sixth * two, h),
                _ => (sixth, T::zero()),
            };
            for (a, kv) in acc.iter_mut().zip(k.iter()) {
                *a = *a + *kv * weight;
            }
            if stage < 3 {
                for ((t, r), kv) in tmp.iter_mut().zip(rho.iter()).zip(k.iter()) {
                    *t = *r + *kv * next;
                }
            }
        }
        rho.copy_from_slice(acc);
    }

    /// Integrates over `t` with `steps` equal steps, then re-symmetrizes.
    pub fn evolve(&mut self, rho: &mut ComplexMatrix<T>, t: T, steps: usize) -> Result<()> {
        let n = self.gen.n;
        if rho.rows() != n || rho.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.rows(),
            });
        }
        if !(t.is_finite() && t >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be finite and >= 0, got {t}"
            )));
        }
        if t == T::zero() {
            return Ok(());
        }
        let steps = steps.max(1);
        let h = t / T::from_count(steps);
        let data = rho.as_mut_slice();
        for _ in 0..steps {
            self.step(data, h);
        }
        hermitize(rho);
        Ok(())
    }

    /// Evolves with `steps`, doubling until the result moves by less than
    /// [`RICHARDSON_TOLERANCE`] under a further doubling. Returns the step
    /// count that passed the check; `rho` holds the finer result.
    pub fn evolve_checked(&mut self, rho: &mut ComplexMatrix<T>, t: T, steps: usize) -> Result<usize> {
        let mut steps = steps.max(1);
        let mut coarse = rho.clone();
        self.evolve(&mut coarse, t, steps)?;
        for _ in 0..=MAX_REFINEMENTS {
            let mut fine = rho.clone();
            self.evolve(&mut fine, t, 2 * steps)?;
            let diff = fine.max_abs_diff(&coarse);
            if diff.is_finite() && diff.as_f64() <= RICHARDSON_TOLERANCE {
                *rho = fine;
                return Ok(steps);
            }
            coarse = fine;
            steps *= 2;
        }
        Err(Error::IntegrationFailure(format!(
            "step-doubling check did not reach {RICHARDSON_TOLERANCE} after {MAX_REFINEMENTS} refinements"
        )))
    }
}

fn hermitize<T: Real>(rho: &mut ComplexMatrix<T>) {
    let n = rho.rows();
    let half = T::lit(0.5);
    for i in 0..n {
        let d = rho[(i, i)].re;
        rho[(i, i)] = c(d, T::zero());
        for j in i + 1..n {
            let v = (rho[(i, j)] + rho[(j, i)].conj()) * half;
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
}

/// Checks trace, Hermiticity and positivity at the open-system tolerances.
pub fn check_density<T: Real>(rho: &ComplexMatrix<T>) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - T::one()).abs().as_f64() > TRACE_TOLERANCE || tr.im.abs().as_f64() > TRACE_TOLERANCE {
        return Err(Error::IntegrationFailure(format!("trace drifted to {tr}")));
    }
    let dev = rho.hermitian_deviation().as_f64();
    if dev > HERMITICITY_TOLERANCE {
        return Err(Error::IntegrationFailure(format!("Hermiticity drift {dev}")));
    }
    let min = eig_hermitian(rho)?.eigenvalues[0].as_f64();
    if min < -POSITIVITY_TOLERANCE {
        return Err(Error::IntegrationFailure(format!("negative eigenvalue {min}")));
    }
    Ok(())
}

/// Field annihilation operator matching the state's space.
fn collapse_for<T: Real>(state: &QuantumState<T>) -> Result<ComplexMatrix<T>> {
    let a = annihilation::<T>(state.space());
    if state.has_qubit() {
        lift_field(&a, state.space())
    } else {
        Ok(a)
    }
}

fn auto_steps<T: Real>(h: &ComplexMatrix<T>, gamma: T, t: T) -> usize {
    let rate = (h.norm_inf() + gamma * T::from_count(h.rows())).as_f64();
    DEFAULT_STEPS_PER_INTERVAL.max((4.0 * t.as_f64() * rate).ceil() as usize)
}

/// Integrates `rho' = -i[H, rho] + gamma (a rho a^H - {a^H a, rho}/2)` over
/// `t`, with `a` the (lifted) field annihilation operator. Pure inputs are
/// converted to density matrices.
pub fn lindblad_evolve<T: Real>(
    rho: &QuantumState<T>,
    h: &ComplexMatrix<T>,
    gamma: T,
    t: T,
) -> Result<QuantumState<T>> {
    let state = rho.to_density();
    let mut m = state.matrix().expect("density").clone();
    let mut solver = LindbladSolver::new(h, &collapse_for(&state)?, gamma)?;
    solver.evolve_checked(&mut m, t, auto_steps(h, gamma, t))?;
    check_density(&m)?;
    let out = QuantumState::density_unchecked(m, state.space());
    out.check_truncation()?;
    Ok(out)
}

/// `Sigma_x rho Sigma_x` for the field (x) qubit ordering `2n + q`.
fn flip_density<T: Real>(rho: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = rho.rows();
    ComplexMatrix::from_fn(n, n, |i, j| rho[(i ^ 1, j ^ 1)])
}

/// Shared per-variant setup for noisy runs.
#[derive(Debug, Clone)]
struct NoisySetup<T: Real> {
    initial: ComplexMatrix<T>,
    solver: LindbladSolver<T>,
    steps: usize,
    space: FockSpace,
}

fn noisy_setup<T: Real>(cfg: &ProtocolConfig<T>, noise: &NoiseConfig<T>, space: FockSpace) -> Result<NoisySetup<T>> {
    noise.validate()?;
    let (h, initial) = match cfg.variant {
        Variant::DispersiveNumeric => (
            h_disp(&cfg.params, space),
            dispersive_initial_state(&cfg.params, space)?,
        ),
        Variant::RabiNumeric => (h_rabi(&cfg.params, space), rabi_ground_state(&cfg.params, space)?),
        Variant::DispersiveAnalytic => {
            return Err(Error::InvalidConfig("noisy runs need a numeric variant".into()));
        }
    };
    initial.check_truncation()?;
    let initial = initial.to_density().matrix().expect("density").clone();
    let mut solver = LindbladSolver::new(
        &h,
        &collapse_for(&QuantumState::density_unchecked(initial.clone(), space))?,
        noise.gamma,
    )?;
    // step-doubling check on the nominal first segment
    let mut probe = flip_density(&initial);
    let steps = solver.evolve_checked(&mut probe, cfg.timing.dt_plus, noise.steps_per_interval)?;
    Ok(NoisySetup {
        initial,
        solver,
        steps,
        space,
    })
}

fn draw_offset<T: Real>(rng: &mut ChaCha8Rng, sigma: T) -> T {
    let z: f64 = rng.sample(StandardNormal);
    T::lit(z) * sigma
}

fn noisy_run<T: Real>(
    cfg: &ProtocolConfig<T>,
    noise: &NoiseConfig<T>,
    setup: &NoisySetup<T>,
    run_index: u64,
) -> Result<ProtocolTrace<T>> {
    let mut solver = setup.solver.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.rng_seed);
    rng.set_stream(run_index);
    let (sig_p, sig_m) = (
        noise.jitter_rel * cfg.timing.dt_plus,
        noise.jitter_rel * cfg.timing.dt_minus,
    );
    let jitter = noise.jitter_rel > T::zero();
    let fixed = if jitter && noise.jitter_mode == JitterMode::PerRun {
        (draw_offset(&mut rng, sig_p), draw_offset(&mut rng, sig_m))
    } else {
        (T::zero(), T::zero())
    };

    let mut rho = setup.initial.clone();
    let mut state = QuantumState::density_unchecked(rho.clone(), setup.space);
    let mut reports = vec![bare_mode_report(&state)?];
    let mut states = Vec::new();
    if cfg.record_each_cycle {
        states.push(state.clone());
    }
    let mut elapsed = T::zero();
    for _ in 0..cfg.cycles {
        let (ep, em) = match (jitter, noise.jitter_mode) {
            (false, _) => (T::zero(), T::zero()),
            (true, JitterMode::PerRun) => fixed,
            (true, JitterMode::PerInterval) => (draw_offset(&mut rng, sig_p), draw_offset(&mut rng, sig_m)),
        };
        let dp = (cfg.timing.dt_plus + ep).max(T::zero());
        let dm = (cfg.timing.dt_minus + em).max(T::zero());
        rho = flip_density(&rho);
        solver.evolve(&mut rho, dp, setup.steps)?;
        rho = flip_density(&rho);
        solver.evolve(&mut rho, dm, setup.steps)?;
        elapsed = elapsed + dp + dm;
        check_density(&rho)?;
        state = QuantumState::density_unchecked(rho.clone(), setup.space);
        state.check_truncation()?;
        reports.push(bare_mode_report(&state)?);
        if cfg.record_each_cycle {
            states.push(state.clone());
        }
    }
    Ok(ProtocolTrace {
        reports,
        final_state: Some(state),
        states,
        elapsed,
    })
}

/// Single protocol run with photon loss and (if configured) jitter drawn
/// from run stream 0 of `noise.rng_seed`.
pub fn run_noisy_protocol<T: Real>(
    cfg: &ProtocolConfig<T>,
    noise: &NoiseConfig<T>,
    space: FockSpace,
) -> Result<ProtocolTrace<T>> {
    let setup = noisy_setup(cfg, noise, space)?;
    noisy_run(cfg, noise, &setup, 0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport<T: Real> {
    /// Mean of per-run `S` in dB, entry 0 is the initial state.
    pub mean_s: Vec<T>,
    /// Standard error of the mean (sample deviation over `sqrt(n)`).
    pub stderr: Vec<T>,
    pub ensemble_size: usize,
    /// Per-run traces when `retain_runs` is set, ordered by run index.
    pub runs: Vec<ProtocolTrace<T>>,
}

/// Runs `ensemble_size` jittered protocol runs. Run `i` draws from stream
/// `i` of a ChaCha8 generator seeded with `rng_seed`, so the result does not
/// depend on scheduling.
pub fn run_jitter_ensemble<T: Real>(
    cfg: &ProtocolConfig<T>,
    noise: &NoiseConfig<T>,
    space: FockSpace,
) -> Result<EnsembleReport<T>> {
    let setup = noisy_setup(cfg, noise, space)?;
    let size = noise.ensemble_size;
    let traces: Vec<ProtocolTrace<T>> = if noise.jitter_rel == T::zero() {
        let one = noisy_run(cfg, noise, &setup, 0)?;
        vec![one; size]
    } else {
        (0..size as u64)
            .into_par_iter()
            .map(|i| noisy_run(cfg, noise, &setup, i))
            .collect::<Result<Vec<_>>>()?
    };
    if noise.jitter_rel == T::zero() {
        let mean_s = traces[0].s_db();
        let stderr = vec![T::zero(); mean_s.len()];
        let runs = if noise.retain_runs { traces } else { Vec::new() };
        return Ok(EnsembleReport {
            mean_s,
            stderr,
            ensemble_size: size,
            runs,
        });
    }
    let count = T::from_count(size);
    let mut mean_s = Vec::with_capacity(cfg.cycles + 1);
    let mut stderr = Vec::with_capacity(cfg.cycles + 1);
    for n in 0..=cfg.cycles {
        let mean = traces.iter().map(|t| t.reports[n].s_db).sum::<T>() / count;
        let err = if size > 1 {
            let ss = traces.iter().map(|t| (t.reports[n].s_db - mean).powi(2)).sum::<T>();
            (ss / T::from_count(size - 1)).sqrt() / count.sqrt()
        } else {
            T::zero()
        };
        mean_s.push(mean);
        stderr.push(err);
    }
    let runs = if noise.retain_runs { traces } else { Vec::new() };
    Ok(EnsembleReport {
        mean_s,
        stderr,
        ensemble_size: size,
        runs,
    })
}

/// `min(omega_+, omega_-) / |omega_+^2 - omega_-^2|`; infinite when the
/// branches coincide.
pub fn sudden_flip_bound<T: Real>(p: &ModelParams<T>) -> T {
    let split = (p.omega_plus.powi(2) - p.omega_minus.powi(2)).abs();
    if split == T::zero() {
        return T::infinity();
    }
    p.omega_plus.min(p.omega_minus) / split
}

/// `t_flip / sudden_flip_bound`; flips count as sudden when this is << 1.
pub fn sudden_flip_validity<T: Real>(p: &ModelParams<T>, t_flip: T) -> Result<T> {
    if !(t_flip.is_finite() && t_flip >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "flip time must be finite and >= 0, got {t_flip}"
        )));
    }
    let split = (p.omega_plus.powi(2) - p.omega_minus.powi(2)).abs();
    Ok(t_flip * split / p.omega_plus.min(p.omega_minus))
}

/// Mean photon number of a state (qubit traced out).
pub fn mean_photon_number<T: Real>(state: &QuantumState<T>) -> T {
    state
        .photon_distribution()
        .iter()
        .enumerate()
        .map(|(n, p)| T::from_count(n) * *p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_state, fock_state, number, Qubit};
    use crate::linalg::expm_hermitian_propagator;
    use crate::protocol::run_rabi_numeric;

    fn params() -> ModelParams<f64> {
        ModelParams::from_ratios(0.1, 2.0).unwrap()
    }

    #[test]
    fn noise_config_validation() {
        assert!(NoiseConfig::<f64>::new(-1.0, 0.0, 1, 0).is_err());
        assert!(NoiseConfig::<f64>::new(0.0, -0.1, 1, 0).is_err());
        assert!(NoiseConfig::<f64>::new(0.0, 0.0, 0, 0).is_err());
        assert!(NoiseConfig::<f64>::noiseless().with_steps(0).is_err());
        let n = NoiseConfig::standard(&params());
        assert!((n.gamma * params().dt_plus - 0.01).abs() < 1e-15);
        assert_eq!(n.ensemble_size, 100);
        for m in [JitterMode::PerInterval, JitterMode::PerRun] {
            assert_eq!(JitterMode::parse(m.as_str()), Some(m));
        }
    }

    #[test]
    fn single_mode_decay_matches_exponential() {
        let space = FockSpace::new(8).unwrap();
        let h = number::<f64>(space);
        let gamma = 0.3;
        let rho = fock_state::<f64>(1, space).unwrap();
        for t in [0.5, 1.0, 2.5] {
            let out = lindblad_evolve(&rho, &h, gamma, t).unwrap();
            assert!((mean_photon_number(&out) - (-gamma * t).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn lossless_limit_is_unitary() {
        let p = params();
        let space = FockSpace::new(20).unwrap();
        let h = h_rabi(&p, space);
        let psi = basis_state::<f64>(1, Qubit::Down, space).unwrap();
        let t = 0.9;
        let out = lindblad_evolve(&psi, &h, 0.0, t).unwrap();
        let expect = psi
            .evolve(&expm_hermitian_propagator(&h, t).unwrap())
            .unwrap()
            .to_density();
        assert!(out.matrix().unwrap().max_abs_diff(expect.matrix().unwrap()) < 1e-8);
    }

    #[test]
    fn vacuum_drift_is_bounded() {
        let p = params();
        let space = FockSpace::new(20).unwrap();
        let h = h_disp(&p, space);
        let vac = basis_state::<f64>(0, Qubit::Down, space).unwrap();
        let out = lindblad_evolve(&vac, &h, gamma_per_dt_plus(&p, 0.01), p.dt_plus).unwrap();
        let drift = out.matrix().unwrap().max_abs_diff(vac.to_density().matrix().unwrap());
        assert!(drift <= (2.0 * p.r_minus).exp() - 1.0);
        check_density(out.matrix().unwrap()).unwrap();
    }

    #[test]
    fn rk4_preserves_trace_and_hermiticity() {
        let p = params();
        let space = FockSpace::new(16).unwrap();
        let h = h_rabi(&p, space);
        let a = lift_field(&annihilation::<f64>(space), space).unwrap();
        let mut solver = LindbladSolver::new(&h, &a, 0.2).unwrap();
        let mut rho = basis_state::<f64>(2, Qubit::Up, space).unwrap().density_matrix();
        solver.evolve(&mut rho, 3.0, 400).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        assert_eq!(rho.hermitian_deviation(), 0.0);
        check_density(&rho).unwrap();
    }

    #[test]
    fn solver_rejects_bad_input() {
        let space = FockSpace::new(4).unwrap();
        let a = annihilation::<f64>(space);
        assert!(LindbladSolver::new(&a, &a, 0.1).is_err());
        let h = number::<f64>(space);
        assert!(LindbladSolver::new(&h, &a, -0.1).is_err());
        let mut solver = LindbladSolver::new(&h, &a, 0.1).unwrap();
        let mut wrong = ComplexMatrix::<f64>::identity(3);
        assert!(solver.evolve(&mut wrong, 1.0, 10).is_err());
    }

    #[test]
    fn noiseless_run_matches_unitary_protocol() {
        let p = params();
        let space = FockSpace::new(24).unwrap();
        let cfg = ProtocolConfig::new(Variant::RabiNumeric, 3, p);
        let noisy = run_noisy_protocol(&cfg, &NoiseConfig::noiseless(), space).unwrap();
        let clean = run_rabi_numeric(&cfg, space).unwrap();
        for (a, b) in noisy.reports.iter().zip(&clean.reports) {
            assert!((a.s_db - b.s_db).abs() < 1e-6);
        }
    }

    #[test]
    fn loss_never_helps() {
        let p = params();
        let space = FockSpace::new(24).unwrap();
        let cfg = ProtocolConfig::new(Variant::DispersiveNumeric, 4, p);
        let noisy = run_noisy_protocol(&cfg, &NoiseConfig::standard(&p), space).unwrap();
        let clean = run_noisy_protocol(&cfg, &NoiseConfig::noiseless(), space).unwrap();
        for (a, b) in noisy.reports.iter().zip(&clean.reports).skip(1) {
            assert!(a.s_db <= b.s_db);
        }
    }

    #[test]
    fn analytic_variant_is_rejected() {
        let cfg = ProtocolConfig::new(Variant::DispersiveAnalytic, 1, params());
        assert!(run_noisy_protocol(&cfg, &NoiseConfig::noiseless(), FockSpace::new(10).unwrap()).is_err());
    }

    #[test]
    fn zero_jitter_ensemble_has_no_spread() {
        let p = params();
        let cfg = ProtocolConfig::new(Variant::RabiNumeric, 2, p);
        let noise = NoiseConfig::standard(&p).with_ensemble_size(5).unwrap().retaining(true);
        let rep = run_jitter_ensemble(&cfg, &noise, FockSpace::new(16).unwrap()).unwrap();
        assert_eq!(rep.runs.len(), 5);
        assert!(rep.stderr.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn ensemble_is_deterministic() {
        let p = params();
        let cfg = ProtocolConfig::new(Variant::RabiNumeric, 2, p);
        let noise = NoiseConfig::standard(&p)
            .with_jitter(0.1)
            .unwrap()
            .with_ensemble_size(4)
            .unwrap()
            .with_seed(7);
        let space = FockSpace::new(16).unwrap();
        let a = run_jitter_ensemble(&cfg, &noise, space).unwrap();
        let b = run_jitter_ensemble(&cfg, &noise, space).unwrap();
        assert_eq!(a, b);
        assert!(a.stderr[2] > 0.0);
        let c = run_jitter_ensemble(&cfg, &noise.with_seed(8), space).unwrap();
        assert_ne!(a.mean_s, c.mean_s);
        let per_run = run_jitter_ensemble(&cfg, &noise.with_jitter_mode(JitterMode::PerRun), space).unwrap();
        assert_ne!(a.mean_s, per_run.mean_s);
    }

    #[test]
    fn flip_bound_values() {
        let p = params();
        assert_eq!(sudden_flip_validity(&p, 0.0).unwrap(), 0.0);
        assert!((sudden_flip_bound(&p) - 0.985f64.sqrt() / 0.03).abs() < 1e-10);
        assert!((sudden_flip_bound(&p) - 33.08).abs() < 0.01);
        assert!((sudden_flip_validity(&p, sudden_flip_bound(&p)).unwrap() - 1.0).abs() < 1e-12);
        assert!(sudden_flip_validity(&p, -1.0).is_err());
        let p2 = ModelParams::<f64>::from_ratios(0.2, 2.0).unwrap();
        let ratio = (p2.omega_plus.powi(2) - p2.omega_minus.powi(2)) / (p.omega_plus.powi(2) - p.omega_minus.powi(2));
        assert!((ratio - 4.0).abs() < 1e-12);
        assert_eq!(
            sudden_flip_bound(&ModelParams::from_ratios(0.0, 2.0).unwrap()),
            f64::INFINITY
        );
    }
}
