//! Squeeze operators, quadratures and the decibel squeezing measure for the
//! bare cavity mode.

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, field_operator_for, fock_ket, variance, FockSpace, QuantumState, TRUNCATION_THRESHOLD,
};
use crate::linalg::{expm_hermitian_propagator, ComplexMatrix};
use crate::scalar::{c, Real};

/// Which quadrature is squeezed below the vacuum level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
    None,
}

impl Quadrature {
    pub fn as_str(self) -> &'static str {
        match self {
            Quadrature::X => "x",
            Quadrature::P => "p",
            Quadrature::None => "none",
        }
    }
}

/// Variances of `X = a^+ + a` and `P = i(a^+ - a)`; vacuum gives (1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances<T: Real> {
    pub var_x: T,
    pub var_p: T,
}

impl<T: Real> QuadratureVariances<T> {
    pub fn new(var_x: T, var_p: T) -> Self {
        Self { var_x, var_p }
    }

    /// `var_x * var_p`, bounded below by 1.
    pub fn uncertainty_product(&self) -> T {
        self.var_x * self.var_p
    }

    pub fn min(&self) -> T {
        self.var_x.min(self.var_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingReport<T: Real> {
    pub s_db: T,
    pub quadrature: Quadrature,
    pub variances: QuadratureVariances<T>,
}

/// `S = max(0, -10 log10(min(var_x, var_p)))`.
pub fn squeezing_db<T: Real>(v: QuadratureVariances<T>) -> Result<SqueezingReport<T>> {
    for var in [v.var_x, v.var_p] {
        if var.is_nan() || var <= T::zero() {
            return Err(Error::NonPositiveVariance(var.as_f64()));
        }
    }
    let min = v.min();
    let s_db = (-T::lit(10.0) * min.log10()).max(T::zero());
    let quadrature = if min >= T::one() {
        Quadrature::None
    } else if v.var_x <= v.var_p {
        Quadrature::X
    } else {
        Quadrature::P
    };
    Ok(SqueezingReport {
        s_db,
        quadrature,
        variances: v,
    })
}

/// `(X, P)` on the field space.
pub fn quadrature_ops<T: Real>(space: FockSpace) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let a = annihilation::<T>(space);
    let ad = a.dagger();
    let x = &ad + &a;
    let p = (&ad - &a).scale(c(T::zero(), T::one()));
    (x, p)
}

/// Bare-mode quadrature variances of a field or field (x) qubit state.
pub fn bare_mode_variances<T: Real>(state: &QuantumState<T>) -> Result<QuadratureVariances<T>> {
    let (x, p) = quadrature_ops::<T>(state.space());
    let x = field_operator_for(&x, state)?;
    let p = field_operator_for(&p, state)?;
    Ok(QuadratureVariances {
        var_x: variance(state, &x)?,
        var_p: variance(state, &p)?,
    })
}

pub fn bare_mode_report<T: Real>(state: &QuantumState<T>) -> Result<SqueezingReport<T>> {
    squeezing_db(bare_mode_variances(state)?)
}

/// Predicted population of the top two Fock levels of the squeezed vacuum
/// `S(r)|0>`, from its closed-form photon statistics.
pub fn predicted_top_population(r: f64, space: FockSpace) -> f64 {
    let t2 = r.tanh().powi(2);
    let d = space.dim();
    let mut weight = 1.0 / r.cosh();
    let mut pop = 0.0;
    let mut m = 0usize;
    while 2 * m < d {
        if 2 * m + 2 >= d {
            pop += weight;
        }
        m += 1;
        weight *= t2 * (2 * m - 1) as f64 / (2 * m) as f64;
    }
    pop
}

/// `S(r) = exp((r a^+^2 - r a^2)/2)`, exponentiated through the Hermitian
/// matrix `i (r a^+^2 - r a^2)/2`.
pub fn squeeze_operator<T: Real>(r: T, space: FockSpace) -> Result<ComplexMatrix<T>> {
    let predicted = predicted_top_population(r.as_f64(), space);
    if predicted > TRUNCATION_THRESHOLD {
        return Err(Error::TruncationRisk {
            population: predicted,
            threshold: TRUNCATION_THRESHOLD,
        });
    }
    let a = annihilation::<T>(space);
    let a2 = a.matmul(&a);
    let ad2 = a2.dagger();
    let generator = (&ad2 - &a2).scale_real(r * T::lit(0.5));
    let hermitian = generator.scale(c(T::zero(), T::one()));
    expm_hermitian_propagator(&hermitian, T::one())
}

/// `S(r)|n>` on the field alone.
pub fn squeezed_fock<T: Real>(n: usize, r: T, space: FockSpace) -> Result<QuantumState<T>> {
    let s = squeeze_operator(r, space)?;
    QuantumState::pure(s.mat_vec(&fock_ket(n, space)?), space)
}

pub fn squeezed_vacuum<T: Real>(r: T, space: FockSpace) -> Result<QuantumState<T>> {
    squeezed_fock(0, r, space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_state, fock_state, product_state, Qubit};
    use crate::scalar::cr;

    fn space() -> FockSpace {
        FockSpace::new(60).unwrap()
    }

    #[test]
    fn zero_squeeze_is_identity() {
        let s = squeeze_operator(0.0f64, space()).unwrap();
        assert!(s.max_abs_diff(&ComplexMatrix::identity(60)) < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_variances() {
        let st = squeezed_vacuum(0.1f64, space()).unwrap();
        let v = bare_mode_variances(&st).unwrap();
        assert!((v.var_p - (-0.2f64).exp()).abs() < 1e-8);
        assert!((v.var_x - 0.2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn squeezed_one_photon_variances() {
        let st = squeezed_fock(1, 0.1f64, space()).unwrap();
        let v = bare_mode_variances(&st).unwrap();
        assert!((v.var_x - 3.0 * 0.2f64.exp()).abs() < 1e-7);
        assert!((v.var_p - 3.0 * (-0.2f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn vacuum_and_fock_quadratures() {
        let (x, _) = quadrature_ops::<f64>(space());
        let vac = fock_state::<f64>(0, space()).unwrap();
        let x2 = x.matmul(&x);
        assert!((crate::hilbert::expectation_real(&vac, &x2).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(crate::hilbert::expectation_real(&vac, &x).unwrap(), 0.0);
        let one = fock_state::<f64>(1, space()).unwrap();
        assert!((crate::hilbert::expectation_real(&one, &x2).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_commutator_bulk() {
        let sp = FockSpace::new(8).unwrap();
        let (x, p) = quadrature_ops::<f64>(sp);
        assert_eq!(x.hermitian_deviation(), 0.0);
        assert_eq!(p.hermitian_deviation(), 0.0);
        let comm = x.commutator(&p);
        for i in 0..7 {
            assert!((comm[(i, i)] - c(0.0, 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn vacuum_with_any_qubit_is_sql() {
        let vac = fock_state::<f64>(0, space()).unwrap();
        let qubit = vec![cr(0.6), c(0.0, 0.8)];
        let st = product_state(&vac, &qubit).unwrap();
        let v = bare_mode_variances(&st).unwrap();
        assert!((v.var_x - 1.0).abs() < 1e-14 && (v.var_p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_fock_density_variances() {
        let sp = FockSpace::new(6).unwrap();
        let a = fock_state::<f64>(0, sp).unwrap().to_density();
        let b = fock_state::<f64>(1, sp).unwrap().to_density();
        let rho = (a.matrix().unwrap() + b.matrix().unwrap()).scale_real(0.5);
        let st = QuantumState::density(rho, sp).unwrap();
        let v = bare_mode_variances(&st).unwrap();
        assert!((v.var_x - 2.0).abs() < 1e-14 && (v.var_p - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decibel_examples() {
        let r = squeezing_db(QuadratureVariances::<f64>::new(1.0, 1.0)).unwrap();
        assert_eq!(r.s_db, 0.0);
        assert_eq!(r.quadrature, Quadrature::None);

        let r = squeezing_db(QuadratureVariances::new(0.5f64.exp(), (-0.5f64).exp())).unwrap();
        let expected = -10.0 * (-0.5f64).exp().log10();
        assert!((r.s_db - expected).abs() < 1e-12);
        assert!((r.s_db - 2.1714724095).abs() < 1e-9);
        assert_eq!(r.quadrature, Quadrature::P);

        let r = squeezing_db(QuadratureVariances::<f64>::new(1.0 / 0.992472, 0.992472)).unwrap();
        assert!((r.s_db - 0.03282).abs() < 1e-4);

        assert!(squeezing_db(QuadratureVariances::new(0.0, 1.0)).is_err());
        assert!(squeezing_db(QuadratureVariances::new(1.0, f64::NAN)).is_err());
    }

    #[test]
    fn squeezed_vacuum_parity_and_inverse() {
        let sp = space();
        let st = squeezed_vacuum(0.4f64, sp).unwrap();
        let amps = st.amplitudes().unwrap();
        assert!(amps.iter().skip(1).step_by(2).all(|z| z.norm() <= 1e-12));
        let s = squeeze_operator(0.4f64, sp).unwrap();
        let sinv = squeeze_operator(-0.4f64, sp).unwrap();
        assert!(s.matmul(&sinv).max_abs_diff(&ComplexMatrix::identity(60)) < 1e-9);
        assert!(s.dagger().matmul(&s).max_abs_diff(&ComplexMatrix::identity(60)) < 1e-9);
    }

    #[test]
    fn truncation_prediction() {
        let small = FockSpace::new(10).unwrap();
        assert!(predicted_top_population(0.1, small) < 1e-6);
        assert!(matches!(
            squeeze_operator(1.5f64, small),
            Err(Error::TruncationRisk { .. })
        ));
        // vacuum: all weight on n = 0
        assert_eq!(predicted_top_population(0.0, FockSpace::new(2).unwrap()), 1.0);
        assert!(squeeze_operator(3.0f64, FockSpace::new(60).unwrap()).is_err());
        assert!(squeeze_operator(1.0f64, FockSpace::new(60).unwrap()).is_ok());
    }

    #[test]
    fn squeezed_basis_state_on_joint_space() {
        let sp = FockSpace::new(30).unwrap();
        let st = basis_state::<f64>(0, Qubit::Down, sp).unwrap();
        let v = bare_mode_variances(&st).unwrap();
        assert!((v.uncertainty_product() - 1.0).abs() < 1e-12);
    }
}
