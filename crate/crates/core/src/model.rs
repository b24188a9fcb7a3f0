//! Rabi, Jaynes-Cummings and dispersive Hamiltonians, the derived dispersive
//! parameters, and exact/approximate eigenstates.

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, joint_index, lift_field, lift_qubit, number, qubit_ops, FockSpace, QuantumState, Qubit,
};
use crate::linalg::{eig_hermitian, kron, ComplexMatrix, EigenDecomposition};
use crate::scalar::{Real, C};
use crate::squeezing::{bare_mode_report, squeeze_operator, squeezed_vacuum};

/// Qubit subspace of the dispersive Hamiltonian: `Plus` is qubit up,
/// `Minus` is qubit down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }

    pub fn qubit(self) -> Qubit {
        match self {
            Branch::Plus => Qubit::Up,
            Branch::Minus => Qubit::Down,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

/// Dispersive validity threshold on `g/|Delta|`.
pub const DISPERSIVE_RATIO_WARNING: f64 = 0.1;

/// Field frequency, qubit splitting and coupling with every derived
/// dispersive quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T: Real> {
    pub omega: T,
    pub qubit_splitting: T,
    pub g: T,
    /// `Omega - omega`.
    pub delta: T,
    /// `g / Delta`.
    pub zeta: T,
    /// `g / (Omega + omega)`.
    pub zeta_tilde: T,
    /// `2 phi = g^2/Delta + g^2/(2 Omega - Delta)`.
    pub phi: T,
    /// `sqrt(omega^2 + 4 omega phi)`.
    pub omega_plus: T,
    /// `sqrt(omega^2 - 4 omega phi)`.
    pub omega_minus: T,
    /// `ln(omega / (omega + 4 phi)) / 4`.
    pub r_plus: T,
    /// `ln(omega / (omega - 4 phi)) / 4`.
    pub r_minus: T,
    /// `pi / (2 omega_plus)`.
    pub dt_plus: T,
    /// `pi / (2 omega_minus)`.
    pub dt_minus: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(omega: T, qubit_splitting: T, g: T) -> Result<Self> {
        let finite = omega.is_finite() && qubit_splitting.is_finite() && g.is_finite();
        if !finite {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if omega <= T::zero() {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if qubit_splitting <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "qubit splitting must be positive, got {qubit_splitting}"
            )));
        }
        if g < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "coupling must be non-negative, got {g}"
            )));
        }
        let delta = qubit_splitting - omega;
        if delta == T::zero() {
            return Err(Error::InvalidParameter("detuning must be non-zero".into()));
        }
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let g2 = g * g;
        let phi = (g2 / delta + g2 / (two * qubit_splitting - delta)) / two;
        let four_phi = four * phi;
        if omega <= four_phi.abs() {
            return Err(Error::Harmonicity {
                omega: omega.as_f64(),
                four_phi: four_phi.abs().as_f64(),
            });
        }
        let omega_plus = (omega * omega + four * omega * phi).sqrt();
        let omega_minus = (omega * omega - four * omega * phi).sqrt();
        let quarter = T::lit(0.25);
        let half_pi = T::FRAC_PI_2();
        Ok(Self {
            omega,
            qubit_splitting,
            g,
            delta,
            zeta: g / delta,
            zeta_tilde: g / (qubit_splitting + omega),
            phi,
            omega_plus,
            omega_minus,
            r_plus: quarter * (omega / (omega + four_phi)).ln(),
            r_minus: quarter * (omega / (omega - four_phi)).ln(),
            dt_plus: half_pi / omega_plus,
            dt_minus: half_pi / omega_minus,
        })
    }

    /// Units with `omega = 1` and `Omega = 1 + Delta/omega`.
    pub fn from_ratios(g_over_omega: T, delta_over_omega: T) -> Result<Self> {
        Self::new(T::one(), T::one() + delta_over_omega, g_over_omega)
    }

    /// `g / |Delta|`.
    pub fn dispersive_ratio(&self) -> T {
        self.g / self.delta.abs()
    }

    /// False when `g/|Delta|` exceeds [`DISPERSIVE_RATIO_WARNING`].
    pub fn is_dispersive(&self) -> bool {
        self.dispersive_ratio() <= T::lit(DISPERSIVE_RATIO_WARNING)
    }

    /// Largest coupling that keeps both shifted oscillators harmonic,
    /// `sqrt(omega |Omega^2 - omega^2| / (4 Omega))`.
    pub fn harmonicity_bound(&self) -> T {
        let (w, q) = (self.omega, self.qubit_splitting);
        (w * (q * q - w * w).abs() / (T::lit(4.0) * q)).sqrt()
    }

    pub fn frequency(&self, branch: Branch) -> T {
        match branch {
            Branch::Plus => self.omega_plus,
            Branch::Minus => self.omega_minus,
        }
    }

    pub fn squeeze_parameter(&self, branch: Branch) -> T {
        match branch {
            Branch::Plus => self.r_plus,
            Branch::Minus => self.r_minus,
        }
    }

    pub fn quarter_period(&self, branch: Branch) -> T {
        match branch {
            Branch::Plus => self.dt_plus,
            Branch::Minus => self.dt_minus,
        }
    }

    /// Zero-point shift `(omega_+- - (omega +- 2 phi))/2` of the branch
    /// oscillator. It is `O(phi^2)` and absent from the closed-form spectrum.
    pub fn zero_point_shift(&self, branch: Branch) -> T {
        let s: T = branch.sign();
        (self.frequency(branch) - (self.omega + s * T::lit(2.0) * self.phi)) / T::lit(2.0)
    }

    /// Constant energy offset `Omega/2 + phi` of each branch.
    pub fn branch_offset(&self) -> T {
        self.qubit_splitting / T::lit(2.0) + self.phi
    }
}

/// Closed-form dispersive level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveEigenvalue<T: Real> {
    pub n: usize,
    pub branch: Branch,
    pub energy: T,
}

struct FieldOps<T: Real> {
    n: ComplexMatrix<T>,
    a: ComplexMatrix<T>,
}

fn field_ops<T: Real>(space: FockSpace) -> FieldOps<T> {
    FieldOps {
        n: number(space),
        a: annihilation(space),
    }
}

/// `omega a^+a + (Omega/2) sz + g (a^+ + a)(s+ + s-)`.
pub fn h_rabi<T: Real>(p: &ModelParams<T>, space: FockSpace) -> ComplexMatrix<T> {
    let f = field_ops::<T>(space);
    let q = qubit_ops::<T>();
    let x = &f.a + &f.a.dagger();
    let free = free_hamiltonian(p, space);
    let coupling = kron(&x, &(&q.sp + &q.sm)).scale_real(p.g);
    &free + &coupling
}

/// `omega a^+a + (Omega/2) sz + g (a^+ s- + a s+)`.
pub fn h_jc<T: Real>(p: &ModelParams<T>, space: FockSpace) -> ComplexMatrix<T> {
    let f = field_ops::<T>(space);
    let q = qubit_ops::<T>();
    let free = free_hamiltonian(p, space);
    let rot = &kron(&f.a.dagger(), &q.sm) + &kron(&f.a, &q.sp);
    &free + &rot.scale_real(p.g)
}

fn free_hamiltonian<T: Real>(p: &ModelParams<T>, space: FockSpace) -> ComplexMatrix<T> {
    let f = field_ops::<T>(space);
    let q = qubit_ops::<T>();
    let field = kron(&f.n, &ComplexMatrix::identity(2)).scale_real(p.omega);
    let qubit = kron(&ComplexMatrix::identity(space.dim()), &q.sz).scale_real(p.qubit_splitting / T::lit(2.0));
    &field + &qubit
}

/// Excitation number `a^+a + s+ s-`, conserved by the Jaynes-Cummings model.
pub fn excitation_number<T: Real>(space: FockSpace) -> ComplexMatrix<T> {
    let q = qubit_ops::<T>();
    let n = lift_field(&number::<T>(space), space).expect("number operator has field dimension");
    let up = lift_qubit(&q.sp.matmul(&q.sm), space).expect("qubit operator is 2x2");
    &n + &up
}

/// Dispersive Hamiltonian
/// `(omega + 2 phi sz) a^+a + (Omega/2 + phi) sz + phi sz (a^2 + a^+^2)`.
pub fn h_disp<T: Real>(p: &ModelParams<T>, space: FockSpace) -> ComplexMatrix<T> {
    let mut h = ComplexMatrix::zeros(space.joint_dim(), space.joint_dim());
    for branch in [Branch::Plus, Branch::Minus] {
        let hb = h_disp_branch(p, space, branch);
        let q = branch.qubit();
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                h[(joint_index(i, q), joint_index(j, q))] = hb[(i, j)];
            }
        }
    }
    h
}

/// The dispersive Hamiltonian in its quadratic form,
/// `omega a^+a + (Omega/2) sz + phi sz (a^+ + a)^2`, with the square taken
/// in the truncated space. Agrees with [`h_disp`] away from the top Fock
/// level.
pub fn h_disp_quadratic<T: Real>(p: &ModelParams<T>, space: FockSpace) -> ComplexMatrix<T> {
    let f = field_ops::<T>(space);
    let q = qubit_ops::<T>();
    let x = &f.a + &f.a.dagger();
    let free = free_hamiltonian(p, space);
    &free + &kron(&x.matmul(&x), &q.sz).scale_real(p.phi)
}

/// Field-only branch Hamiltonian
/// `(omega +- 2 phi) a^+a +- (Omega/2 + phi) +- phi (a^2 + a^+^2)`.
pub fn h_disp_branch<T: Real>(p: &ModelParams<T>, space: FockSpace, branch: Branch) -> ComplexMatrix<T> {
    let f = field_ops::<T>(space);
    let s: T = branch.sign();
    let two = T::lit(2.0);
    let a2 = f.a.matmul(&f.a);
    let pair = &a2 + &a2.dagger();
    let mut h = &f.n.scale_real(p.omega + s * two * p.phi) + &pair.scale_real(s * p.phi);
    let offset = s * p.branch_offset();
    for i in 0..space.dim() {
        h[(i, i)] = h[(i, i)] + offset;
    }
    h
}

/// Closed-form dispersive levels `sqrt(omega(omega +- 4 phi)) n +- (Omega/2 + phi)`
/// for `n < levels_per_branch` on both branches, sorted ascending.
pub fn dispersive_spectrum<T: Real>(p: &ModelParams<T>, levels_per_branch: usize) -> Vec<DispersiveEigenvalue<T>> {
    let mut out = Vec::with_capacity(2 * levels_per_branch);
    for branch in [Branch::Minus, Branch::Plus] {
        let s: T = branch.sign();
        let freq = (p.omega * (p.omega + s * T::lit(4.0) * p.phi)).sqrt();
        for n in 0..levels_per_branch {
            out.push(DispersiveEigenvalue {
                n,
                branch,
                energy: freq * T::from_count(n) + s * p.branch_offset(),
            });
        }
    }
    out.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Full spectrum of the Rabi Hamiltonian.
pub fn rabi_spectrum<T: Real>(p: &ModelParams<T>, space: FockSpace) -> Result<EigenDecomposition<T>> {
    eig_hermitian(&h_rabi(p, space))
}

/// Lowest eigenvector of the Rabi Hamiltonian.
pub fn rabi_ground_state<T: Real>(p: &ModelParams<T>, space: FockSpace) -> Result<QuantumState<T>> {
    rabi_eigenstate(p, space, 0)
}

/// `k`-th eigenvector (0 = ground) of the Rabi Hamiltonian.
pub fn rabi_eigenstate<T: Real>(p: &ModelParams<T>, space: FockSpace, k: usize) -> Result<QuantumState<T>> {
    let eig = rabi_spectrum(p, space)?;
    if k >= eig.dim() {
        return Err(Error::FockOutOfRange { n: k, dim: eig.dim() });
    }
    QuantumState::pure(eig.vector(k), space)
}

/// First-order approximate Rabi eigenstate built on the dispersive ground
/// state of `branch`:
/// `S(r)|0>|q> + c S(r)|1>|q'>` with `c = zeta~ cosh r - zeta sinh r` for
/// the minus branch and `c = zeta cosh r - zeta~ sinh r` for the plus
/// branch, normalized.
pub fn approx_rabi_eigenstate<T: Real>(
    p: &ModelParams<T>,
    branch: Branch,
    space: FockSpace,
) -> Result<QuantumState<T>> {
    let r = p.squeeze_parameter(branch);
    let coeff = match branch {
        Branch::Minus => p.zeta_tilde * r.cosh() - p.zeta * r.sinh(),
        Branch::Plus => p.zeta * r.cosh() - p.zeta_tilde * r.sinh(),
    };
    let s = squeeze_operator(r, space)?;
    let q = branch.qubit();
    let mut v = vec![C::<T>::new(T::zero(), T::zero()); space.joint_dim()];
    for n in 0..space.dim() {
        v[joint_index(n, q)] = s[(n, 0)];
        v[joint_index(n, q.flipped())] = s[(n, 1)] * coeff;
    }
    QuantumState::pure(v, space)
}

/// Bare-mode squeezing (dB) of the dispersive branch ground states, the
/// approximate Rabi ground state and the exact Rabi ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundSqueezing<T: Real> {
    pub disp_minus: T,
    pub disp_plus: T,
    pub rabi_approx: T,
    pub rabi_exact: T,
}

pub fn ground_squeezing<T: Real>(p: &ModelParams<T>, space: FockSpace) -> Result<GroundSqueezing<T>> {
    let disp =
        |b: Branch| -> Result<T> { Ok(bare_mode_report(&squeezed_vacuum(p.squeeze_parameter(b), space)?)?.s_db) };
    Ok(GroundSqueezing {
        disp_minus: disp(Branch::Minus)?,
        disp_plus: disp(Branch::Plus)?,
        rabi_approx: bare_mode_report(&approx_rabi_eigenstate(p, Branch::Minus, space)?)?.s_db,
        rabi_exact: bare_mode_report(&rabi_ground_state(p, space)?)?.s_db,
    })
}
