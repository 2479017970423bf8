//! Nikiforov-Uvarov reduction for equations of hypergeometric type
//!
//!   psi'' + (tau_tilde(s)/sigma(s)) psi' + (sigma_tilde(s)/sigma(s)^2) psi = 0
//!
//! with sigma of degree <= 1, sigma_tilde of degree <= 2 and tau_tilde of
//! degree <= 1. Writing psi = phi * y with phi'/phi = pi/sigma, the linear
//! polynomial
//!
//!   pi(s) = d(s) +/- sqrt(d(s)^2 - sigma_tilde(s) + k*sigma(s)),
//!   d(s) = (sigma'(s) - tau_tilde(s))/2,
//!
//! closes the reduction once k is chosen so the radicand is a perfect
//! square. Each admissible (k, sign) yields tau = tau_tilde + 2*pi and the
//! spectral parameter lambda = k + pi'; bound states come from the branch
//! with tau' < 0 whose weight function rho (solving the Pearson equation
//! (sigma*rho)' = tau*rho) is normalizable, and the eigenvalue ladder is
//! lambda_n = -n*tau' - n(n-1)/2 * sigma''.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NuError {
    #[error("sigma must be degree <= 1 and not identically zero (degree-2 sigma is out of scope)")]
    UnsupportedSigma,
    #[error("tau_tilde must have degree <= 1")]
    UnsupportedTauTilde,
    #[error("no NU-reducible branch: {reason}")]
    NoReducibleBranch { reason: String },
    #[error("no physical branch: no candidate has tau' < 0 with a normalizable weight")]
    NoPhysicalBranch,
    #[error("ambiguous branch selection: {count} candidates satisfy the physicality criteria")]
    AmbiguousBranch { count: usize },
    #[error("weight function requires sigma(s) = s exactly")]
    WeightNeedsSigmaS,
    #[error("Rodrigues weight needs a > -1 and c > 0, got a = {a}, c = {c}")]
    BadWeightExponents { a: f64, c: f64 },
}

/// Real polynomial of degree at most 2, c0 + c1*s + c2*s^2.
///
/// The degree is structural: a coefficient stored as exactly 0.0 does not
/// count toward it. Inputs are built from exact coefficient choices, so no
/// numeric tolerance is involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly2 {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Poly2 {
    pub const fn constant(c0: f64) -> Self {
        Self { c0, c1: 0.0, c2: 0.0 }
    }

    pub const fn linear(c0: f64, c1: f64) -> Self {
        Self { c0, c1, c2: 0.0 }
    }

    pub const fn quadratic(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c0, c1, c2 }
    }

    pub fn degree(&self) -> usize {
        if self.c2 != 0.0 {
            2
        } else if self.c1 != 0.0 {
            1
        } else {
            0
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.c2 * s + self.c1) * s + self.c0
    }

    pub fn derivative(&self) -> Poly2 {
        Poly2::linear(self.c1, 2.0 * self.c2)
    }

    fn is_zero(&self) -> bool {
        self.c0 == 0.0 && self.c1 == 0.0 && self.c2 == 0.0
    }

    fn add(&self, other: &Poly2) -> Poly2 {
        Poly2::quadratic(self.c0 + other.c0, self.c1 + other.c1, self.c2 + other.c2)
    }

    fn scale(&self, f: f64) -> Poly2 {
        Poly2::quadratic(f * self.c0, f * self.c1, f * self.c2)
    }

    /// Square of a degree-<=1 polynomial (c2 must be zero).
    fn square_linear(&self) -> Poly2 {
        debug_assert_eq!(self.c2, 0.0);
        Poly2::quadratic(self.c0 * self.c0, 2.0 * self.c0 * self.c1, self.c1 * self.c1)
    }
}

/// The equation data: sigma, sigma_tilde, tau_tilde.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NUProblem {
    sigma: Poly2,
    sigma_tilde: Poly2,
    tau_tilde: Poly2,
}

impl NUProblem {
    /// Degree-2 sigma would need the full quadratic-weight machinery and is
    /// rejected rather than half-supported.
    pub fn new(sigma: Poly2, sigma_tilde: Poly2, tau_tilde: Poly2) -> Result<Self, NuError> {
        if sigma.degree() > 1 || sigma.is_zero() {
            return Err(NuError::UnsupportedSigma);
        }
        if tau_tilde.degree() > 1 {
            return Err(NuError::UnsupportedTauTilde);
        }
        Ok(Self { sigma, sigma_tilde, tau_tilde })
    }

    pub fn sigma(&self) -> &Poly2 {
        &self.sigma
    }

    pub fn sigma_tilde(&self) -> &Poly2 {
        &self.sigma_tilde
    }

    pub fn tau_tilde(&self) -> &Poly2 {
        &self.tau_tilde
    }

    /// d(s) = (sigma' - tau_tilde)/2, the polynomial offset in pi.
    fn offset(&self) -> Poly2 {
        self.sigma.derivative().add(&self.tau_tilde.scale(-1.0)).scale(0.5)
    }

    /// Radicand of the pi square root: d^2 - sigma_tilde + k*sigma.
    pub fn radicand(&self, k: f64) -> Poly2 {
        self.offset()
            .square_linear()
            .add(&self.sigma_tilde.scale(-1.0))
            .add(&self.sigma.scale(k))
    }
}

/// Which sign was taken in pi = d +/- rootpoly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignChoice {
    Plus,
    Minus,
}

/// A value of k whose radicand is a perfect square, together with the
/// degree-<=1 polynomial whose square it is (leading coefficient >= 0; the
/// other sign appears via [`SignChoice`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KCandidate {
    pub k: f64,
    pub root: Poly2,
}

/// One resolved reduction branch: pi, tau = tau_tilde + 2*pi, and the k and
/// sign that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NUBranch {
    pub k: f64,
    pub pi: Poly2,
    pub tau: Poly2,
    pub sign_choice: SignChoice,
}

/// The physical branch with its spectral parameter lambda = k + pi' and the
/// weight exponents (a, c) of rho(s) = s^a e^{-c s}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NUSolution {
    pub branch: NUBranch,
    pub lambda: f64,
    pub weight_exponents: (f64, f64),
}

/// All k for which the radicand d^2 - sigma_tilde + k*sigma collapses to the
/// square of a linear polynomial.
///
/// The radicand's s^2 coefficient A is k-independent (sigma has degree <= 1),
/// so the perfect-square condition "discriminant in s vanishes" is at most
/// quadratic in k and is solved in closed form. A < 0 admits no real square
/// root; if the radicand is already degree <= 1 in s, the single k that
/// flattens it to a nonnegative constant is returned.
pub fn k_candidates(p: &NUProblem) -> Result<Vec<KCandidate>, NuError> {
    let rad0 = p.radicand(0.0);
    let a = rad0.c2;
    let (b0, c0) = (rad0.c1, rad0.c0);
    let (s0, s1) = (p.sigma.c0, p.sigma.c1);

    if a != 0.0 {
        // B(k) = b0 + k*s1, C(k) = c0 + k*s0; need B^2 - 4AC = 0.
        let qa = s1 * s1;
        let qb = 2.0 * b0 * s1 - 4.0 * a * s0;
        let qc = b0 * b0 - 4.0 * a * c0;
        let ks = if qa != 0.0 {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return Err(NuError::NoReducibleBranch {
                    reason: "the square-completion condition has complex k roots".into(),
                });
            }
            let sq = disc.sqrt();
            let k1 = (-qb + sq) / (2.0 * qa);
            let k2 = (-qb - sq) / (2.0 * qa);
            if k1 == k2 {
                vec![k1]
            } else {
                vec![k1, k2]
            }
        } else if qb != 0.0 {
            vec![-qc / qb]
        } else {
            return Err(NuError::NoReducibleBranch {
                reason: "constant sigma leaves the discriminant k-independent".into(),
            });
        };
        if a < 0.0 {
            return Err(NuError::NoReducibleBranch {
                reason: "radicand opens downward; its perfect square is imaginary".into(),
            });
        }
        let sqrt_a = a.sqrt();
        Ok(ks
            .into_iter()
            .map(|k| {
                let bk = b0 + k * s1;
                KCandidate { k, root: Poly2::linear(bk / (2.0 * sqrt_a), sqrt_a) }
            })
            .collect())
    } else {
        // Radicand is degree <= 1 for every k. A linear polynomial is the
        // square of a degree-<=1 polynomial only when it is a nonnegative
        // constant, so k must kill the linear coefficient.
        if s1 == 0.0 {
            return Err(NuError::NoReducibleBranch {
                reason: "degenerate problem: radicand linear with constant sigma".into(),
            });
        }
        let k = -b0 / s1;
        let c = c0 + k * s0;
        if c < 0.0 {
            return Err(NuError::NoReducibleBranch {
                reason: "degenerate radicand flattens to a negative constant".into(),
            });
        }
        Ok(vec![KCandidate { k, root: Poly2::constant(c.sqrt()) }])
    }
}

/// Both sign choices of pi = d +/- root for one k candidate, with their tau.
pub fn resolve_branch(p: &NUProblem, k: f64, root: &Poly2) -> Vec<NUBranch> {
    let d = p.offset();
    [SignChoice::Plus, SignChoice::Minus]
        .into_iter()
        .map(|sign_choice| {
            let pi = match sign_choice {
                SignChoice::Plus => d.add(root),
                SignChoice::Minus => d.add(&root.scale(-1.0)),
            };
            let tau = p.tau_tilde.add(&pi.scale(2.0));
            NUBranch { k, pi, tau, sign_choice }
        })
        .collect()
}

/// The unique branch with tau' < 0 and a normalizable weight.
///
/// Normalizability is judged for the weight shape this engine supports
/// (sigma = s, rho = s^a e^{-cs} on (0, inf)): exponential rate c = -tau' > 0
/// and power a = tau(0) - 1 > -1. Zero qualifying branches or more than one
/// is an error; ambiguity is surfaced, never resolved by a heuristic.
pub fn select_physical(branches: &[NUBranch]) -> Result<NUBranch, NuError> {
    let qualifying: Vec<&NUBranch> = branches
        .iter()
        .filter(|b| {
            let tau_prime = b.tau.c1;
            let a = b.tau.c0 - 1.0;
            tau_prime < 0.0 && a > -1.0
        })
        .collect();
    match qualifying.len() {
        0 => Err(NuError::NoPhysicalBranch),
        1 => Ok(*qualifying[0]),
        n => Err(NuError::AmbiguousBranch { count: n }),
    }
}

/// lambda_n = -n*tau' - n(n-1)/2 * sigma''.
///
/// For the supported sigma (degree <= 1) the curvature term vanishes; it is
/// kept so the formula reads as stated. Negative n is unrepresentable.
pub fn eigenvalue_ladder(b: &NUBranch, sigma: &Poly2, n: u32) -> f64 {
    let nf = f64::from(n);
    let sigma_dd = 2.0 * sigma.c2;
    -nf * b.tau.c1 - nf * (nf - 1.0) / 2.0 * sigma_dd
}

/// Exponents (a, c) of the Pearson weight rho(s) = s^a e^{-cs}.
///
/// With sigma = s, (sigma*rho)' = tau*rho forces tau(s) = (a+1) - c*s,
/// so a = tau(0) - 1 and c = -tau'. Only sigma = s is supported.
pub fn weight_function(b: &NUBranch, sigma: &Poly2) -> Result<(f64, f64), NuError> {
    if !(sigma.c0 == 0.0 && sigma.c1 == 1.0 && sigma.c2 == 0.0) {
        return Err(NuError::WeightNeedsSigmaS);
    }
    Ok((b.tau.c0 - 1.0, -b.tau.c1))
}

/// Full pipeline: k candidates, both signs each, physical selection,
/// lambda = k + pi', weight exponents.
pub fn solve(p: &NUProblem) -> Result<NUSolution, NuError> {
    let mut branches = Vec::new();
    for cand in k_candidates(p)? {
        branches.extend(resolve_branch(p, cand.k, &cand.root));
    }
    let branch = select_physical(&branches)?;
    let lambda = branch.k + branch.pi.c1;
    let weight_exponents = weight_function(&branch, &p.sigma)?;
    Ok(NUSolution { branch, lambda, weight_exponents })
}

/// Dense real polynomial, coefficients in ascending powers of s.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }
}

/// The Rodrigues polynomial (1/rho) d^n/ds^n [sigma^n rho] for sigma = s and
/// rho = s^a e^{-cs}, with the normalization constant B_n fixed to 1.
///
/// Every derivative of a term p*s^(m+a)*e^{-cs} stays in that family:
/// d/ds -> (m+a)*p at power m-1 and -c*p at power m. Starting from the single
/// term s^(n+a), n passes later the powers span 0..=n and dividing by rho
/// leaves an ordinary degree-n polynomial.
///
/// Scaling lemma (checked in tests): substituting x = c*s into the classical
/// Rodrigues form of the associated Laguerre polynomial shows
///
///   rodrigues_polynomial(n, a, c).eval(s) == n! * L_n^a(c*s)
///
/// exactly — no sign factor and no residual power of c.
pub fn rodrigues_polynomial(n: u32, a: f64, c: f64) -> Result<Polynomial, NuError> {
    if !(a > -1.0) || !(c > 0.0) || !a.is_finite() || !c.is_finite() {
        return Err(NuError::BadWeightExponents { a, c });
    }
    let n = n as usize;
    let mut p = vec![0.0; n + 1];
    p[n] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; n + 1];
        for (m, &pm) in p.iter().enumerate() {
            if pm != 0.0 {
                if m > 0 {
                    next[m - 1] += (m as f64 + a) * pm;
                }
                next[m] -= c * pm;
            }
        }
        p = next;
    }
    Ok(Polynomial { coeffs: p })
}
