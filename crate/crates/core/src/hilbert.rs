//! Truncated Fock space, qubit operators, and composite field (x) qubit
//! states.
//!
//! Composite index convention: `index(n, q) = 2n + q` with `q = 0` for the
//! qubit up state (sigma_z = +1) and `q = 1` for down.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{inner, kron, vec_norm, ComplexMatrix};
use crate::scalar::{c, cr, Real, C};

/// Default Fock truncation.
pub const DEFAULT_FOCK_DIM: usize = 60;

/// Population threshold on the top two Fock levels.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

/// Photon numbers `0..dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::FockTooSmall(dim));
        }
        Ok(Self { dim })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the field (x) qubit space.
    #[inline]
    pub fn joint_dim(&self) -> usize {
        2 * self.dim
    }

    pub fn doubled(&self) -> Self {
        Self { dim: 2 * self.dim }
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self { dim: DEFAULT_FOCK_DIM }
    }
}

/// Qubit basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    Up,
    Down,
}

impl Qubit {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Qubit::Up => 0,
            Qubit::Down => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Qubit::Up => Qubit::Down,
            Qubit::Down => Qubit::Up,
        }
    }

    pub fn ket<T: Real>(self) -> Vec<C<T>> {
        let mut v = vec![C::zero(); 2];
        v[self.index()] = C::one();
        v
    }
}

/// Position of `(n, q)` in the composite basis.
#[inline]
pub fn joint_index(n: usize, q: Qubit) -> usize {
    2 * n + q.index()
}

/// `a`: `(n-1, n)` entry `sqrt(n)`.
pub fn annihilation<T: Real>(space: FockSpace) -> ComplexMatrix<T> {
    let d = space.dim();
    let mut a = ComplexMatrix::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = cr(T::from_count(n).sqrt());
    }
    a
}

pub fn creation<T: Real>(space: FockSpace) -> ComplexMatrix<T> {
    annihilation::<T>(space).dagger()
}

/// Number operator, exactly diagonal.
pub fn number<T: Real>(space: FockSpace) -> ComplexMatrix<T> {
    let diag: Vec<T> = (0..space.dim()).map(T::from_count).collect();
    ComplexMatrix::from_real_diag(&diag)
}

/// Pauli and ladder matrices in the (up, down) basis.
#[derive(Debug, Clone)]
pub struct QubitOps<T: Real> {
    pub sx: ComplexMatrix<T>,
    pub sy: ComplexMatrix<T>,
    pub sz: ComplexMatrix<T>,
    /// Raising: maps down to up.
    pub sp: ComplexMatrix<T>,
    /// Lowering: maps up to down.
    pub sm: ComplexMatrix<T>,
}

pub fn qubit_ops<T: Real>() -> QubitOps<T> {
    let (o, l) = (T::zero(), T::one());
    let z = C::zero();
    QubitOps {
        sx: ComplexMatrix::from_real(2, 2, &[o, l, l, o]).unwrap(),
        sy: ComplexMatrix::from_vec(2, 2, vec![z, c(o, -l), c(o, l), z]).unwrap(),
        sz: ComplexMatrix::from_real_diag(&[l, -l]),
        sp: ComplexMatrix::from_real(2, 2, &[o, l, o, o]).unwrap(),
        sm: ComplexMatrix::from_real(2, 2, &[o, o, l, o]).unwrap(),
    }
}

/// `A (x) I_2`.
pub fn lift_field<T: Real>(a: &ComplexMatrix<T>, space: FockSpace) -> Result<ComplexMatrix<T>> {
    if a.rows() != space.dim() || a.cols() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: a.rows().max(a.cols()),
        });
    }
    Ok(kron(a, &ComplexMatrix::identity(2)))
}

/// `I_D (x) B`.
pub fn lift_qubit<T: Real>(b: &ComplexMatrix<T>, space: FockSpace) -> Result<ComplexMatrix<T>> {
    if b.rows() != 2 || b.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: b.rows().max(b.cols()),
        });
    }
    Ok(kron(&ComplexMatrix::identity(space.dim()), b))
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateData<T: Real> {
    Pure(Vec<C<T>>),
    Density(ComplexMatrix<T>),
}

/// Pure state or density matrix over either the field alone (`D`) or the
/// field (x) qubit space (`2D`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T: Real> {
    data: StateData<T>,
    fock_dim: usize,
}

impl<T: Real> QuantumState<T> {
    /// Wraps amplitudes, normalizing them. The length must be `D` or `2D`.
    pub fn pure(amplitudes: Vec<C<T>>, space: FockSpace) -> Result<Self> {
        let len = amplitudes.len();
        if len != space.dim() && len != space.joint_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.joint_dim(),
                found: len,
            });
        }
        let norm = vec_norm(&amplitudes);
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self {
            data: StateData::Pure(amplitudes),
            fock_dim: space.dim(),
        })
    }

    /// Wraps a density matrix, validating trace, Hermiticity and positivity.
    pub fn density(rho: ComplexMatrix<T>, space: FockSpace) -> Result<Self> {
        let n = rho.rows();
        if !rho.is_square() || (n != space.dim() && n != space.joint_dim()) {
            return Err(Error::DimensionMismatch {
                expected: space.joint_dim(),
                found: n,
            });
        }
        let state = Self {
            data: StateData::Density(rho),
            fock_dim: space.dim(),
        };
        state.validate()?;
        Ok(state)
    }

    /// Wraps a density matrix without validation; callers check invariants
    /// at their own tolerances.
    pub(crate) fn density_unchecked(rho: ComplexMatrix<T>, space: FockSpace) -> Self {
        Self {
            data: StateData::Density(rho),
            fock_dim: space.dim(),
        }
    }

    /// `|psi><psi|` of a pure state; densities are returned unchanged.
    pub fn to_density(&self) -> Self {
        match &self.data {
            StateData::Pure(v) => Self {
                data: StateData::Density(ComplexMatrix::outer(v, v)),
                fock_dim: self.fock_dim,
            },
            StateData::Density(_) => self.clone(),
        }
    }

    /// Density matrix of the state, converting pure states.
    pub fn density_matrix(&self) -> ComplexMatrix<T> {
        match &self.data {
            StateData::Pure(v) => ComplexMatrix::outer(v, v),
            StateData::Density(m) => m.clone(),
        }
    }

    pub fn data(&self) -> &StateData<T> {
        &self.data
    }

    pub fn amplitudes(&self) -> Option<&[C<T>]> {
        match &self.data {
            StateData::Pure(v) => Some(v),
            StateData::Density(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&ComplexMatrix<T>> {
        match &self.data {
            StateData::Density(m) => Some(m),
            StateData::Pure(_) => None,
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_dim
    }

    pub fn space(&self) -> FockSpace {
        FockSpace { dim: self.fock_dim }
    }

    /// Total dimension (`D` or `2D`).
    pub fn dim(&self) -> usize {
        match &self.data {
            StateData::Pure(v) => v.len(),
            StateData::Density(m) => m.rows(),
        }
    }

    /// True when the state lives on field (x) qubit.
    pub fn has_qubit(&self) -> bool {
        self.dim() == 2 * self.fock_dim
    }

    pub fn norm(&self) -> T {
        match &self.data {
            StateData::Pure(v) => vec_norm(v),
            StateData::Density(m) => m.trace().re,
        }
    }

    /// Checks the norm/trace, Hermiticity and positivity invariants.
    pub fn validate(&self) -> Result<()> {
        let tol = T::tol(1e-9);
        match &self.data {
            StateData::Pure(v) => {
                let norm = vec_norm(v);
                if (norm - T::one()).abs() > tol {
                    return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
                }
            }
            StateData::Density(m) => {
                let tr = m.trace();
                if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
                    return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
                }
                if m.hermitian_deviation() > tol {
                    return Err(Error::InvalidState("density matrix is not Hermitian".into()));
                }
                let min = crate::linalg::eig_hermitian(m)?.eigenvalues[0];
                if min < -tol {
                    return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
                }
            }
        }
        Ok(())
    }

    /// Photon-number distribution of the field (qubit traced out).
    pub fn photon_distribution(&self) -> Vec<T> {
        let per = self.dim() / self.fock_dim;
        let mut p = vec![T::zero(); self.fock_dim];
        match &self.data {
            StateData::Pure(v) => {
                for (i, z) in v.iter().enumerate() {
                    p[i / per] = p[i / per] + z.norm_sqr();
                }
            }
            StateData::Density(m) => {
                for i in 0..m.rows() {
                    p[i / per] = p[i / per] + m[(i, i)].re;
                }
            }
        }
        p
    }

    /// Population of the top two Fock levels.
    pub fn top_population(&self) -> T {
        let p = self.photon_distribution();
        p[p.len() - 2..].iter().copied().sum()
    }

    /// Fails with `TruncationRisk` when the top two Fock levels hold more
    /// than [`TRUNCATION_THRESHOLD`].
    pub fn check_truncation(&self) -> Result<()> {
        let pop = self.top_population();
        if pop.as_f64() > TRUNCATION_THRESHOLD {
            return Err(Error::TruncationRisk {
                population: pop.as_f64(),
                threshold: TRUNCATION_THRESHOLD,
            });
        }
        Ok(())
    }

    /// Applies `U` (pure: `U psi`; density: `U rho U^H`).
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.cols() != self.dim() || u.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.rows(),
            });
        }
        let data = match &self.data {
            StateData::Pure(v) => StateData::Pure(u.mat_vec(v)),
            StateData::Density(m) => StateData::Density(u.matmul(m).matmul(&u.dagger())),
        };
        Ok(Self {
            data,
            fock_dim: self.fock_dim,
        })
    }

    /// Overlap `|<a|b>|^2` between pure states, or `Tr(rho sigma)` otherwise.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => inner(a, b).norm_sqr(),
            _ => {
                let (a, b) = (self.to_density(), other.to_density());
                a.matrix().unwrap().matmul(b.matrix().unwrap()).trace().re
            }
        })
    }

    /// Reduced qubit density matrix (requires a composite state).
    pub fn qubit_reduced(&self) -> Result<ComplexMatrix<T>> {
        if !self.has_qubit() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.fock_dim,
                found: self.dim(),
            });
        }
        let mut r = ComplexMatrix::zeros(2, 2);
        for n in 0..self.fock_dim {
            for q in 0..2 {
                for p in 0..2 {
                    let val = match &self.data {
                        StateData::Pure(v) => v[2 * n + q] * v[2 * n + p].conj(),
                        StateData::Density(m) => m[(2 * n + q, 2 * n + p)],
                    };
                    r[(q, p)] = r[(q, p)] + val;
                }
            }
        }
        Ok(r)
    }
}

/// `|n>` on the field alone.
pub fn fock_state<T: Real>(n: usize, space: FockSpace) -> Result<QuantumState<T>> {
    QuantumState::pure(fock_ket(n, space)?, space)
}

pub(crate) fn fock_ket<T: Real>(n: usize, space: FockSpace) -> Result<Vec<C<T>>> {
    if n >= space.dim() {
        return Err(Error::FockOutOfRange { n, dim: space.dim() });
    }
    let mut v = vec![C::zero(); space.dim()];
    v[n] = C::one();
    Ok(v)
}

/// `field (x) qubit`, with a field-only pure state and a qubit ket.
pub fn product_state<T: Real>(field: &QuantumState<T>, qubit: &[C<T>]) -> Result<QuantumState<T>> {
    let psi = field
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("product_state needs a pure field state".into()))?;
    if field.has_qubit() || qubit.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: field.fock_dim(),
            found: field.dim(),
        });
    }
    let mut v = Vec::with_capacity(2 * psi.len());
    for &a in psi {
        v.push(a * qubit[0]);
        v.push(a * qubit[1]);
    }
    QuantumState::pure(v, field.space())
}

/// `|n>|q>`.
pub fn basis_state<T: Real>(n: usize, q: Qubit, space: FockSpace) -> Result<QuantumState<T>> {
    product_state(&fock_state(n, space)?, &q.ket())
}

/// `<psi|O|psi>` or `Tr(rho O)`.
pub fn expectation<T: Real>(state: &QuantumState<T>, op: &ComplexMatrix<T>) -> Result<C<T>> {
    if op.rows() != state.dim() || op.cols() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: op.rows(),
        });
    }
    Ok(match state.data() {
        StateData::Pure(v) => inner(v, &op.mat_vec(v)),
        StateData::Density(m) => {
            // Tr(rho O) = sum_ij rho_ij O_ji
            let n = m.rows();
            let mut acc = C::zero();
            for i in 0..n {
                for j in 0..n {
                    let o = op[(j, i)];
                    if !o.is_zero() {
                        acc = acc + m[(i, j)] * o;
                    }
                }
            }
            acc
        }
    })
}

/// Real part of the expectation of a Hermitian observable.
pub fn expectation_real<T: Real>(state: &QuantumState<T>, op: &ComplexMatrix<T>) -> Result<T> {
    Ok(expectation(state, op)?.re)
}

/// `<O^2> - <O>^2` for a Hermitian observable.
pub fn variance<T: Real>(state: &QuantumState<T>, op: &ComplexMatrix<T>) -> Result<T> {
    let mean = expectation_real(state, op)?;
    let sq = expectation_real(state, &op.matmul(op))?;
    Ok(sq - mean * mean)
}

/// Lifts a field operator to whatever space `state` lives on.
pub fn field_operator_for<T: Real>(op: &ComplexMatrix<T>, state: &QuantumState<T>) -> Result<ComplexMatrix<T>> {
    if state.has_qubit() {
        lift_field(op, state.space())
    } else {
        Ok(op.clone())
    }
}
