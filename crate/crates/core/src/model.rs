//! Pseudoharmonic oscillator physics: the potential V(r) = V0 (r/r0 - r0/r)^2,
//! its dimensionless radial-equation parameters under the substitution s = r^2,
//! the closed-form ro-vibrational spectrum, and normalized radial
//! wavefunctions. The closed forms are rebuilt from the generic reduction in
//! [`crate::nu`] by `assemble_via_nu`, which keeps the two derivations honest
//! against each other.

use crate::nu::{self, NUProblem, NUSolution, Poly2};
use crate::special::{laguerre, log_gamma, LaguerreSpec};
use crate::units::PhysicalConstants;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{quantity} must be positive and finite, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },
    #[error("potential requires r > 0, got r = {r}")]
    RadiusDomain { r: f64 },
    #[error(transparent)]
    Nu(#[from] nu::NuError),
    #[error("spectral parameter is not affine in the energy shift; reduction inconsistent")]
    EpsilonNotAffine,
}

/// Potential parameters of one diatomic molecule: well depth V0 (eV),
/// equilibrium separation r0 (Angstrom), reduced mass mu (amu).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MolecularParams {
    v0_ev: f64,
    r0_a: f64,
    mu_amu: f64,
}

impl MolecularParams {
    pub fn new(v0_ev: f64, r0_a: f64, mu_amu: f64) -> Result<Self, ModelError> {
        for (quantity, value) in [("V0", v0_ev), ("r0", r0_a), ("mu", mu_amu)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ModelError::NonPositive { quantity, value });
            }
        }
        Ok(Self { v0_ev, r0_a, mu_amu })
    }

    pub fn v0_ev(&self) -> f64 {
        self.v0_ev
    }

    pub fn r0_a(&self) -> f64 {
        self.r0_a
    }

    pub fn mu_amu(&self) -> f64 {
        self.mu_amu
    }
}

/// Radial quantum number n and angular momentum l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32) -> Self {
        Self { n, l }
    }
}

/// Dimensionless parameters of the radial equation in the variable s = r^2:
/// alpha (1/A^2), beta, q = sqrt(beta + 1/16), gamma = 2*alpha*q, and the
/// spectral parameter epsilon (1/A^2), unset until an energy is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhDimensionless {
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub gamma: f64,
    pub epsilon: Option<f64>,
}

/// Normalized radial wavefunction
/// R(r) = N * s^power * e^{-rate*s} * L_n^{2q}(2*rate*s), s = r^2.
///
/// The normalization constant is held as a logarithm: the closed form
/// N^2 = 2 (2 alpha)^{2q+1} n! / Gamma(n + 2q + 1) overflows f64 well below
/// molecular parameter scales (2q + 1 can exceed 400), while ln N stays
/// around 10^2. Evaluation combines all factors in log space and
/// exponentiates once.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWavefunction {
    power: f64,
    rate: f64,
    laguerre: LaguerreSpec,
    log_norm: f64,
}

impl RadialWavefunction {
    /// Exponent of s in the prefactor, q - 1/4 > 0.
    pub fn power(&self) -> f64 {
        self.power
    }

    /// Exponential rate alpha in 1/A^2.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn laguerre(&self) -> &LaguerreSpec {
        &self.laguerre
    }

    /// ln N for the closed-form normalization constant.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// N itself; may overflow to infinity for molecular-scale parameters,
    /// which is why evaluation never goes through this accessor.
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    /// R(r); zero for r <= 0 (the s-power exceeds zero strictly).
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let s = r * r;
        let lag = laguerre(&self.laguerre, 2.0 * self.rate * s);
        if lag == 0.0 {
            return 0.0;
        }
        let log_mag = self.log_norm + self.power * s.ln() - self.rate * s + lag.abs().ln();
        lag.signum() * log_mag.exp()
    }
}

/// Branch data from the generic reduction plus the epsilon ladder it
/// predicts for n = 0..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct NuAssembly {
    pub solution: NUSolution,
    pub epsilons: Vec<f64>,
}

/// A molecule bound to a set of physical constants. All spectral formulas
/// take hbar only through `PhysicalConstants::hbar2_over_amu_a2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoharmonicModel {
    params: MolecularParams,
    constants: PhysicalConstants,
}

impl PseudoharmonicModel {
    pub fn new(params: MolecularParams) -> Self {
        Self { params, constants: PhysicalConstants::codata2018() }
    }

    pub fn with_constants(params: MolecularParams, constants: PhysicalConstants) -> Self {
        Self { params, constants }
    }

    pub fn params(&self) -> &MolecularParams {
        &self.params
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// hbar^2 / mu in eV A^2.
    fn k_factor(&self) -> f64 {
        self.constants.hbar2_over_amu_a2() / self.params.mu_amu
    }

    /// V(r) = V0 (r/r0 - r0/r)^2 in eV.
    pub fn potential(&self, r: f64) -> Result<f64, ModelError> {
        if !(r > 0.0) {
            return Err(ModelError::RadiusDomain { r });
        }
        let x = r / self.params.r0_a;
        Ok(self.params.v0_ev * (x - 1.0 / x).powi(2))
    }

    /// alpha = sqrt(V0 mu / (2 hbar^2)) / r0, beta = V0 r0^2 mu/(2 hbar^2)
    /// + l(l+1)/4, q = sqrt(beta + 1/16), gamma = 2 alpha q.
    pub fn dimensionless(&self, l: u32) -> PhDimensionless {
        let k = self.k_factor();
        let v0 = self.params.v0_ev;
        let r0 = self.params.r0_a;
        let lf = f64::from(l);
        let alpha = (v0 / (2.0 * k)).sqrt() / r0;
        let beta = v0 * r0 * r0 / (2.0 * k) + lf * (lf + 1.0) / 4.0;
        let q = (beta + 0.0625).sqrt();
        PhDimensionless { alpha, beta, q, gamma: 2.0 * alpha * q, epsilon: None }
    }

    /// Energy spacing between consecutive n at fixed l,
    /// E(n+1,l) - E(n,l) = (2 hbar / r0) sqrt(2 V0 / mu), in eV.
    pub fn level_spacing(&self) -> f64 {
        2.0 * (2.0 * self.params.v0_ev * self.k_factor()).sqrt() / self.params.r0_a
    }

    /// Closed-form bound-state energy
    /// E = -2 V0 + (hbar/r0) sqrt(2 V0/mu) [(2n + 1) + 2q].
    pub fn energy(&self, qn: QuantumNumbers) -> f64 {
        let d = self.dimensionless(qn.l);
        let scale = 0.5 * self.level_spacing();
        -2.0 * self.params.v0_ev + scale * (2.0 * f64::from(qn.n) + 1.0 + 2.0 * d.q)
    }

    /// epsilon = (E + 2 V0) mu / (2 hbar^2) in 1/A^2.
    pub fn epsilon_of_energy(&self, e_ev: f64) -> f64 {
        (e_ev + 2.0 * self.params.v0_ev) / (2.0 * self.k_factor())
    }

    /// Inverse of `epsilon_of_energy`.
    pub fn energy_of_epsilon(&self, epsilon: f64) -> f64 {
        2.0 * self.k_factor() * epsilon - 2.0 * self.params.v0_ev
    }

    /// Normalized R(r) for the state qn. The normalization
    /// N^2 = 2 (2 alpha)^{2q+1} n! / Gamma(n + 2q + 1) follows from Laguerre
    /// orthogonality after substituting s = r^2 in the norm integral
    /// (dr r^2 = ds sqrt(s)/2 combines with s^{2(q - 1/4)} to the weight
    /// s^{2q}), so the construction guarantees the unit norm that the
    /// quadrature tests confirm.
    pub fn wavefunction(&self, qn: QuantumNumbers) -> RadialWavefunction {
        let d = self.dimensionless(qn.l);
        let two_q = 2.0 * d.q;
        let n = qn.n as usize;
        let spec = LaguerreSpec::new(n, two_q).expect("2q > 1/2, always a valid order");
        let ln_gamma_num = log_gamma(f64::from(qn.n) + 1.0).expect("argument >= 1");
        let ln_gamma_den = log_gamma(f64::from(qn.n) + two_q + 1.0).expect("argument > 1");
        let log_norm = 0.5
            * (std::f64::consts::LN_2 + (two_q + 1.0) * (2.0 * d.alpha).ln() + ln_gamma_num
                - ln_gamma_den);
        RadialWavefunction { power: d.q - 0.25, rate: d.alpha, laguerre: spec, log_norm }
    }

    fn nu_problem(&self, l: u32, epsilon: f64) -> NUProblem {
        let d = self.dimensionless(l);
        NUProblem::new(
            Poly2::linear(0.0, 1.0),
            Poly2::quadratic(-d.beta, epsilon, -d.alpha * d.alpha),
            Poly2::constant(1.5),
        )
        .expect("sigma = s and tau_tilde = 3/2 are always admissible")
    }

    /// Run the generic reduction on the s = r^2 radial problem
    /// (sigma = s, tau_tilde = 3/2, sigma_tilde = -alpha^2 s^2 + eps s - beta)
    /// and recover the epsilon ladder for n = 0..=n_max.
    ///
    /// eps sits inside sigma_tilde but is the unknown. For this problem
    /// lambda = k + pi' is affine in eps (k shifts linearly, pi does not move),
    /// so two probe values pin the affine map and lambda(eps) = lambda_n is
    /// solved exactly. The probes must agree on the branch geometry; if they
    /// do not, the affine assumption is broken and that is reported, not
    /// papered over.
    pub fn assemble_via_nu(&self, l: u32, n_max: u32) -> Result<NuAssembly, ModelError> {
        let sigma = Poly2::linear(0.0, 1.0);
        let sol0 = nu::solve(&self.nu_problem(l, 0.0))?;
        let sol1 = nu::solve(&self.nu_problem(l, 1.0))?;
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0);
        let same_geometry = close(sol0.branch.pi.c0, sol1.branch.pi.c0)
            && close(sol0.branch.pi.c1, sol1.branch.pi.c1)
            && sol0.branch.sign_choice == sol1.branch.sign_choice;
        let slope = sol1.lambda - sol0.lambda;
        if !same_geometry || slope.abs() < 1e-9 {
            return Err(ModelError::EpsilonNotAffine);
        }
        let epsilons: Vec<f64> = (0..=n_max)
            .map(|n| (nu::eigenvalue_ladder(&sol0.branch, &sigma, n) - sol0.lambda) / slope)
            .collect();
        let solution = nu::solve(&self.nu_problem(l, epsilons[0]))?;
        Ok(NuAssembly { solution, epsilons })
    }

    /// Energies for n = 0..=n_max at fixed l, derived through the generic
    /// reduction instead of the closed form. Cross-checks `energy`.
    pub fn energies_via_nu(&self, l: u32, n_max: u32) -> Result<Vec<f64>, ModelError> {
        let assembly = self.assemble_via_nu(l, n_max)?;
        Ok(assembly.epsilons.iter().map(|&e| self.energy_of_epsilon(e)).collect())
    }
}
