//! The sudden-qubit-flip squeezing protocol.
//!
//! One cycle: flip the qubit, evolve for `dt_plus`, flip back, evolve for
//! `dt_minus`. Three variants are provided: a closed-form Heisenberg-picture
//! map for the dispersive Hamiltonian, and Schrodinger-picture state
//! evolution under either the dispersive or the full Rabi Hamiltonian.
//! Squeezing is always reported for the bare cavity mode.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hilbert::{lift_qubit, product_state, qubit_ops, FockSpace, QuantumState, Qubit, StateData};
use crate::linalg::{expm_hermitian_propagator, vec_norm, ComplexMatrix};
use crate::model::{h_disp, h_rabi, rabi_ground_state, ModelParams};
use crate::scalar::{c, Real, C};
use crate::squeezing::{bare_mode_report, squeezed_vacuum, squeezing_db, QuadratureVariances, SqueezingReport};

/// Norm drift allowed on evolved pure states.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    DispersiveAnalytic,
    DispersiveNumeric,
    RabiNumeric,
}

impl Variant {
    pub const ALL: [Variant; 3] = [
        Variant::DispersiveAnalytic,
        Variant::DispersiveNumeric,
        Variant::RabiNumeric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::DispersiveAnalytic => "dispersive-analytic",
            Variant::DispersiveNumeric => "dispersive-numeric",
            Variant::RabiNumeric => "rabi-numeric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dwell times after the up-flip (`dt_plus`) and the down-flip (`dt_minus`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing<T: Real> {
    pub dt_plus: T,
    pub dt_minus: T,
}

impl<T: Real> Timing<T> {
    /// Quarter periods `pi / (2 omega_+-)`.
    pub fn optimal(p: &ModelParams<T>) -> Self {
        Self {
            dt_plus: p.dt_plus,
            dt_minus: p.dt_minus,
        }
    }

    pub fn cycle_time(&self) -> T {
        self.dt_plus + self.dt_minus
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig<T: Real> {
    pub variant: Variant,
    pub cycles: usize,
    pub params: ModelParams<T>,
    pub timing: Timing<T>,
    /// Keep the state after every cycle in the trace (numeric variants).
    pub record_each_cycle: bool,
}

impl<T: Real> ProtocolConfig<T> {
    pub fn new(variant: Variant, cycles: usize, params: ModelParams<T>) -> Self {
        Self {
            variant,
            cycles,
            params,
            timing: Timing::optimal(&params),
            record_each_cycle: false,
        }
    }

    pub fn with_timing(mut self, dt_plus: T, dt_minus: T) -> Result<Self> {
        if !(dt_plus > T::zero() && dt_minus > T::zero()) || !dt_plus.is_finite() || !dt_minus.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dwell times must be positive, got ({dt_plus}, {dt_minus})"
            )));
        }
        self.timing = Timing { dt_plus, dt_minus };
        Ok(self)
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn recording(mut self, on: bool) -> Self {
        self.record_each_cycle = on;
        self
    }
}

/// Per-cycle bare-mode squeezing. Entry 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTrace<T: Real> {
    pub reports: Vec<SqueezingReport<T>>,
    pub final_state: Option<QuantumState<T>>,
    /// States after each cycle (entry 0 is the initial state) when recording.
    pub states: Vec<QuantumState<T>>,
    pub elapsed: T,
}

impl<T: Real> ProtocolTrace<T> {
    pub fn s_db(&self) -> Vec<T> {
        self.reports.iter().map(|r| r.s_db).collect()
    }

    pub fn cycles(&self) -> usize {
        self.reports.len() - 1
    }
}

/// Bogoliubov map of one protocol cycle on the `omega_-` mode,
/// `a_- -> alpha a_- + beta a_-^+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneCycleMap<T: Real> {
    /// `(omega_+^2 + omega_-^2) / (2 omega_+ omega_-)`.
    pub u_plus: T,
    /// `(omega_+^2 - omega_-^2) / (2 omega_+ omega_-)`.
    pub u_minus: T,
    pub alpha: C<T>,
    pub beta: C<T>,
}

impl<T: Real> OneCycleMap<T> {
    pub fn identity() -> Self {
        Self {
            u_plus: T::one(),
            u_minus: T::zero(),
            alpha: C::one(),
            beta: C::zero(),
        }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &Self) -> Self {
        Self {
            u_plus: self.u_plus,
            u_minus: self.u_minus,
            alpha: self.alpha * first.alpha + self.beta * first.beta.conj(),
            beta: self.alpha * first.beta + self.beta * first.alpha.conj(),
        }
    }

    pub fn power(&self, n: usize) -> Self {
        let mut out = Self {
            u_plus: self.u_plus,
            u_minus: self.u_minus,
            ..Self::identity()
        };
        for _ in 0..n {
            out = self.compose(&out);
        }
        out
    }

    /// `|alpha|^2 - |beta|^2`, equal to 1 for a canonical map.
    pub fn bogoliubov_norm(&self) -> T {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    /// Quadrature variances of `X_-`, `P_-` after the map, starting from the
    /// `omega_-` vacuum.
    pub fn vacuum_variances(&self) -> QuadratureVariances<T> {
        let bc = self.beta.conj();
        QuadratureVariances::new((self.alpha + bc).norm_sqr(), (self.alpha - bc).norm_sqr())
    }
}

/// One-cycle map at the optimal quarter-period timing.
pub fn heisenberg_one_cycle_ops<T: Real>(p: &ModelParams<T>) -> OneCycleMap<T> {
    one_cycle_map(p, Timing::optimal(p))
}

/// One-cycle map for arbitrary dwell times:
/// `alpha = (cos th+ - i u+ sin th+) e^{-i th-}`, `beta = -i u- sin th+ e^{-i th-}`
/// with `th+- = omega_+- dt_+-`.
pub fn one_cycle_map<T: Real>(p: &ModelParams<T>, timing: Timing<T>) -> OneCycleMap<T> {
    let (wp, wm) = (p.omega_plus, p.omega_minus);
    let denom = T::lit(2.0) * wp * wm;
    let u_plus = (wp * wp + wm * wm) / denom;
    let u_minus = (wp * wp - wm * wm) / denom;
    let (sp, cp) = (wp * timing.dt_plus).sin_cos();
    let (sm, cm) = (wm * timing.dt_minus).sin_cos();
    let phase = c(cm, -sm);
    OneCycleMap {
        u_plus,
        u_minus,
        alpha: c(cp, -u_plus * sp) * phase,
        beta: c(T::zero(), -u_minus * sp) * phase,
    }
}

/// Closed-form dispersive protocol: the `omega_-` vacuum is propagated
/// through `N` one-cycle maps and rescaled to the bare mode by `e^{+-2 r_-}`.
/// At optimal timing this is `var_x = e^{2r_-} (omega_+/omega_-)^{2N}`,
/// `var_p = e^{-2r_-} (omega_-/omega_+)^{2N}`.
pub fn run_dispersive_analytic<T: Real>(cfg: &ProtocolConfig<T>) -> Result<ProtocolTrace<T>> {
    let p = &cfg.params;
    let map = one_cycle_map(p, cfg.timing);
    let (sx, sp) = ((T::lit(2.0) * p.r_minus).exp(), (-T::lit(2.0) * p.r_minus).exp());
    let mut acc = OneCycleMap {
        u_plus: map.u_plus,
        u_minus: map.u_minus,
        ..OneCycleMap::identity()
    };
    let mut reports = Vec::with_capacity(cfg.cycles + 1);
    for n in 0..=cfg.cycles {
        if n > 0 {
            acc = map.compose(&acc);
        }
        let v = acc.vacuum_variances();
        reports.push(squeezing_db(QuadratureVariances::new(sx * v.var_x, sp * v.var_p))?);
    }
    Ok(ProtocolTrace {
        reports,
        final_state: None,
        states: Vec::new(),
        elapsed: T::from_count(cfg.cycles) * cfg.timing.cycle_time(),
    })
}

/// Dispersive ground state `S(r_-)|0>|down>`.
pub fn dispersive_initial_state<T: Real>(p: &ModelParams<T>, space: FockSpace) -> Result<QuantumState<T>> {
    product_state(&squeezed_vacuum(p.r_minus, space)?, &Qubit::Down.ket())
}

/// `sigma_x` lifted to the joint space.
pub fn flip_operator<T: Real>(space: FockSpace) -> ComplexMatrix<T> {
    lift_qubit(&qubit_ops::<T>().sx, space).expect("sigma_x is 2x2")
}

/// Unitary of one full cycle, `U(dt_-) X U(dt_+) X`.
pub fn cycle_unitary<T: Real>(h: &ComplexMatrix<T>, timing: Timing<T>, space: FockSpace) -> Result<ComplexMatrix<T>> {
    let flip = flip_operator::<T>(space);
    let up = expm_hermitian_propagator(h, timing.dt_plus)?;
    let um = expm_hermitian_propagator(h, timing.dt_minus)?;
    Ok(um.matmul(&flip).matmul(&up).matmul(&flip))
}

fn run_unitary<T: Real>(
    cfg: &ProtocolConfig<T>,
    h: &ComplexMatrix<T>,
    initial: QuantumState<T>,
    space: FockSpace,
) -> Result<ProtocolTrace<T>> {
    initial.check_truncation()?;
    let cycle = cycle_unitary(h, cfg.timing, space)?;
    let mut psi: Vec<C<T>> = initial
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("unitary protocol needs a pure state".into()))?
        .to_vec();
    let mut reports = vec![bare_mode_report(&initial)?];
    let mut states = Vec::new();
    if cfg.record_each_cycle {
        states.push(initial.clone());
    }
    let mut state = initial;
    for _ in 0..cfg.cycles {
        psi = cycle.mat_vec(&psi);
        let norm = vec_norm(&psi);
        if (norm - T::one()).abs() > T::tol(NORM_TOLERANCE) {
            return Err(Error::InvalidState(format!("norm drifted to {norm}")));
        }
        state = QuantumState::pure(psi.clone(), space)?;
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
        elapsed: T::from_count(cfg.cycles) * cfg.timing.cycle_time(),
    })
}

/// Schrodinger-picture protocol under the dispersive Hamiltonian, starting
/// from `S(r_-)|0>|down>`.
pub fn run_dispersive_numeric<T: Real>(cfg: &ProtocolConfig<T>, space: FockSpace) -> Result<ProtocolTrace<T>> {
    let h = h_disp(&cfg.params, space);
    run_unitary(cfg, &h, dispersive_initial_state(&cfg.params, space)?, space)
}

/// Protocol under the full Rabi Hamiltonian, starting from its numerical
/// ground state and reusing the dispersive dwell times.
pub fn run_rabi_numeric<T: Real>(cfg: &ProtocolConfig<T>, space: FockSpace) -> Result<ProtocolTrace<T>> {
    let h = h_rabi(&cfg.params, space);
    run_unitary(cfg, &h, rabi_ground_state(&cfg.params, space)?, space)
}

/// Dispatches on `cfg.variant`.
pub fn run_protocol<T: Real>(cfg: &ProtocolConfig<T>, space: FockSpace) -> Result<ProtocolTrace<T>> {
    match cfg.variant {
        Variant::DispersiveAnalytic => run_dispersive_analytic(cfg),
        Variant::DispersiveNumeric => run_dispersive_numeric(cfg, space),
        Variant::RabiNumeric => run_rabi_numeric(cfg, space),
    }
}

/// `S(1)` for each candidate `dt_plus`, with `dt_minus` held at the
/// configured value.
pub fn timing_scan<T: Real>(cfg: &ProtocolConfig<T>, space: FockSpace, dt_plus_values: &[T]) -> Result<Vec<(T, T)>> {
    dt_plus_values
        .iter()
        .map(|&dt| {
            let one = ProtocolConfig {
                cycles: 1,
                ..cfg.with_timing(dt, cfg.timing.dt_minus)?
            };
            let trace = run_protocol(&one, space)?;
            Ok((dt, trace.reports[1].s_db))
        })
        .collect()
}

/// Outcome of projecting the qubit onto a basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedOutcome<T: Real> {
    pub qubit: Qubit,
    pub probability: T,
    /// Renormalized post-measurement state; `None` for a zero-probability outcome.
    pub state: Option<QuantumState<T>>,
    pub report: Option<SqueezingReport<T>>,
}

/// Projects a joint state onto the qubit basis state `q`.
pub fn project_qubit<T: Real>(state: &QuantumState<T>, q: Qubit) -> Result<ProjectedOutcome<T>> {
    if !state.has_qubit() {
        return Err(Error::DimensionMismatch {
            expected: 2 * state.fock_dim(),
            found: state.dim(),
        });
    }
    let keep = |i: usize| i % 2 == q.index();
    let space = state.space();
    let (probability, projected) = match state.data() {
        StateData::Pure(v) => {
            let w: Vec<C<T>> = v
                .iter()
                .enumerate()
                .map(|(i, &z)| if keep(i) { z } else { C::zero() })
                .collect();
            let prob = vec_norm(&w).powi(2);
            let st = if prob > T::zero() {
                Some(QuantumState::pure(w, space)?)
            } else {
                None
            };
            (prob, st)
        }
        StateData::Density(m) => {
            let n = m.rows();
            let w = ComplexMatrix::from_fn(n, n, |i, j| if keep(i) && keep(j) { m[(i, j)] } else { C::zero() });
            let prob = w.trace().re;
            let st = if prob > T::zero() {
                Some(QuantumState::density(w.scale_real(T::one() / prob), space)?)
            } else {
                None
            };
            (prob, st)
        }
    };
    let report = projected.as_ref().map(bare_mode_report).transpose()?;
    Ok(ProjectedOutcome {
        qubit: q,
        probability,
        state: projected,
        report,
    })
}

/// Both projective-measurement outcomes (up, down).
pub fn post_select<T: Real>(state: &QuantumState<T>) -> Result<[ProjectedOutcome<T>; 2]> {
    Ok([project_qubit(state, Qubit::Up)?, project_qubit(state, Qubit::Down)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::expectation_real;
    use crate::squeezing::bare_mode_variances;

    fn params() -> ModelParams<f64> {
        ModelParams::from_ratios(0.1, 2.0).unwrap()
    }

    fn space() -> FockSpace {
        FockSpace::new(60).unwrap()
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(Variant::parse(v.as_str()), Some(v));
        }
        assert_eq!(Variant::parse("nope"), None);
    }

    #[test]
    fn timing_validation() {
        let cfg = ProtocolConfig::new(Variant::DispersiveNumeric, 1, params());
        assert!(cfg.with_timing(0.0, 1.0).is_err());
        assert!(cfg.with_timing(1.0, f64::NAN).is_err());
        assert!(cfg.with_timing(1.0, 1.0).is_ok());
    }

    #[test]
    fn bogoliubov_coefficients() {
        let map = heisenberg_one_cycle_ops(&params());
        assert!((map.u_plus.powi(2) - map.u_minus.powi(2) - 1.0).abs() < 1e-14);
        assert!((map.bogoliubov_norm() - 1.0).abs() < 1e-14);
        let p = params();
        let ratio = (p.omega_plus / p.omega_minus).powi(2);
        let v = map.vacuum_variances();
        assert!((v.var_x - ratio).abs() < 1e-14);
        assert!((v.var_p - 1.0 / ratio).abs() < 1e-14);
    }

    #[test]
    fn decoupled_map_is_a_phase() {
        let p = ModelParams::from_ratios(0.0, 2.0).unwrap();
        let map = heisenberg_one_cycle_ops(&p);
        assert_eq!(map.u_plus, 1.0);
        assert_eq!(map.u_minus, 0.0);
        assert!(map.beta.norm() < 1e-15);
        assert!((map.alpha.norm() - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn analytic_zero_cycles_is_ground_state() {
        let p = params();
        let trace = run_dispersive_analytic(&ProtocolConfig::new(Variant::DispersiveAnalytic, 0, p)).unwrap();
        assert_eq!(trace.reports.len(), 1);
        let v = trace.reports[0].variances;
        assert!((v.var_x - (2.0 * p.r_minus).exp()).abs() < 1e-14);
        assert!((v.var_p - (-2.0 * p.r_minus).exp()).abs() < 1e-14);
    }

    #[test]
    fn analytic_one_cycle_reference_values() {
        let trace = run_dispersive_analytic(&ProtocolConfig::new(Variant::DispersiveAnalytic, 1, params())).unwrap();
        let v = trace.reports[1].variances;
        // sqrt(0.985) * 0.985 / 1.015
        let expected = 0.985f64.sqrt() * 0.985 / 1.015;
        assert!((v.var_p - expected).abs() < 1e-13);
        assert!((v.var_p - 0.96314).abs() < 1e-5);
        assert!((trace.reports[1].s_db - 0.163).abs() < 1e-3);
    }

    #[test]
    fn analytic_linear_in_cycles() {
        let p = params();
        let trace = run_dispersive_analytic(&ProtocolConfig::new(Variant::DispersiveAnalytic, 12, p)).unwrap();
        let step = 10.0 * (p.omega_plus / p.omega_minus).powi(2).log10();
        for (n, r) in trace.reports.iter().enumerate() {
            assert!((r.s_db - trace.reports[0].s_db - n as f64 * step).abs() < 1e-11);
        }
        assert!((trace.elapsed - 12.0 * (p.dt_plus + p.dt_minus)).abs() < 1e-12);
    }

    #[test]
    fn numeric_matches_analytic() {
        let cfg = ProtocolConfig::new(Variant::DispersiveNumeric, 3, params());
        let num = run_dispersive_numeric(&cfg, space()).unwrap();
        let ana = run_dispersive_analytic(&cfg).unwrap();
        for (a, b) in num.reports.iter().zip(&ana.reports) {
            assert!((a.variances.var_x - b.variances.var_x).abs() < 1e-6);
            assert!((a.variances.var_p - b.variances.var_p).abs() < 1e-6);
        }
    }

    #[test]
    fn integer_half_period_generates_nothing() {
        let p = params();
        let cfg = ProtocolConfig::new(Variant::DispersiveNumeric, 1, p)
            .with_timing(std::f64::consts::PI / p.omega_plus, p.dt_minus)
            .unwrap();
        let trace = run_dispersive_numeric(&cfg, space()).unwrap();
        assert!((trace.reports[1].s_db - trace.reports[0].s_db).abs() < 1e-6);
        let ana = run_dispersive_analytic(&cfg).unwrap();
        assert!((ana.reports[1].s_db - ana.reports[0].s_db).abs() < 1e-12);
    }

    #[test]
    fn qubit_returns_down_after_each_cycle() {
        let cfg = ProtocolConfig::new(Variant::DispersiveNumeric, 3, params()).recording(true);
        let trace = run_dispersive_numeric(&cfg, space()).unwrap();
        assert_eq!(trace.states.len(), 4);
        let sz = lift_qubit(&qubit_ops::<f64>().sz, space()).unwrap();
        for st in &trace.states {
            assert!((expectation_real(st, &sz).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_rabi_protocol_never_squeezes() {
        let p = ModelParams::from_ratios(0.0, 2.0).unwrap();
        let cfg = ProtocolConfig::new(Variant::RabiNumeric, 5, p);
        let trace = run_rabi_numeric(&cfg, FockSpace::new(20).unwrap()).unwrap();
        assert!(trace.s_db().iter().all(|&s| s == 0.0));
        for r in &trace.reports {
            assert!((r.variances.var_x - 1.0f64).abs() < 1e-12);
        }
    }

    #[test]
    fn post_selection_probabilities_sum_to_one() {
        let cfg = ProtocolConfig::new(Variant::RabiNumeric, 2, params());
        let trace = run_rabi_numeric(&cfg, FockSpace::new(30).unwrap()).unwrap();
        let state = trace.final_state.unwrap();
        let [up, down] = post_select(&state).unwrap();
        assert!((up.probability + down.probability - 1.0).abs() < 1e-10);
        assert!(down.probability > 0.9);
        let dens = post_select(&state.to_density()).unwrap();
        assert!((dens[1].probability - down.probability).abs() < 1e-12);
        let v1 = down.report.unwrap().variances;
        let v2 = bare_mode_variances(dens[1].state.as_ref().unwrap()).unwrap();
        assert!((v1.var_p - v2.var_p).abs() < 1e-10);
    }

    #[test]
    fn timing_scan_peaks_at_quarter_period() {
        let p = params();
        let cfg = ProtocolConfig::new(Variant::DispersiveAnalytic, 1, p);
        let values: Vec<f64> = [0.8, 0.9, 1.0, 1.1, 1.2].iter().map(|f| f * p.dt_plus).collect();
        let scan = timing_scan(&cfg, space(), &values).unwrap();
        let best = scan.iter().max_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        assert_eq!(best.0, p.dt_plus);
    }
}
