//! Independent numerical eigensolvers for the radial Schrödinger equation,
//! used to cross-check the closed-form spectrum. Works with u = r R, so
//!
//!   u'' = W u,  W(r) = (2 mu / hbar^2) (V_eff(r) - E),
//!   V_eff(r) = V(r) + l(l+1) hbar^2 / (2 mu r^2),
//!
//! which discretizes to a symmetric tridiagonal matrix under uniform finite
//! differences (the R-form equation has a first-derivative term and would
//! not). Two methods that share no algebra with the closed form:
//!
//! * `fd_spectrum`: second-order finite differences, eigenvalues by
//!   Sturm-sequence bisection, eigenvectors by inverse iteration.
//! * `numerov_shoot`: fourth-order Numerov propagation with node-count
//!   bracketing and a matching-function root polish.
//!
//! The potential is evaluated from its own one-line expression here; nothing
//! is imported from the closed-form spectrum code. Every solve is a pure
//! function of its inputs, so validation sweeps over (molecule, l, n) can
//! run concurrently without shared state.

use crate::model::MolecularParams;
use crate::units::PhysicalConstants;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error("requested {count} states but the {m}-point grid supports at most {max}")]
    TooManyStates { count: usize, m: usize, max: usize },
    #[error(
        "eigenfunction amplitude at r_max is {amplitude:.2e} of its peak (limit 1e-10); \
         the grid is too narrow for Dirichlet truncation"
    )]
    BoundaryTruncation { amplitude: f64 },
    #[error("bracket [{lo}, {hi}] invalid: {detail}")]
    Bracketing { lo: f64, hi: f64, detail: String },
    #[error("state has {found} nodes where {expected} were required")]
    WrongState { expected: usize, found: usize },
}

/// Uniform radial grid: interior points r_i = r_min + i h, i = 1..=m, with
/// spacing h = (r_max - r_min)/(m + 1). u is pinned at both boundary points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    m: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, m: usize) -> Result<Self, OracleError> {
        if !(r_min > 0.0) || !r_min.is_finite() {
            return Err(OracleError::InvalidGrid { reason: format!("r_min = {r_min}, need > 0") });
        }
        if !(r_max > r_min) || !r_max.is_finite() {
            return Err(OracleError::InvalidGrid {
                reason: format!("r_max = {r_max}, need finite and > r_min = {r_min}"),
            });
        }
        if m < 100 {
            return Err(OracleError::InvalidGrid { reason: format!("m = {m}, need >= 100") });
        }
        Ok(Self { r_min, r_max, m })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        (self.r_max - self.r_min) / (self.m + 1) as f64
    }

    /// Same span with m -> 2m + 1, which halves h exactly (m + 1 doubles).
    pub fn halved(&self) -> RadialGrid {
        RadialGrid { r_min: self.r_min, r_max: self.r_max, m: 2 * self.m + 1 }
    }

    /// r at full-grid index j = 0..=m+1 (0 and m+1 are the boundaries).
    fn point(&self, j: usize) -> f64 {
        self.r_min + j as f64 * self.h()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FdSturm,
    NumerovShoot,
}

/// Numerically computed spectrum at one l.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSpectrum {
    pub l: u32,
    pub eigenvalues: Vec<f64>,
    pub grid: RadialGrid,
    pub method: Method,
}

/// Power-series behavior of u near r = 0: u ~ r^p series(E, r), where the
/// closure returns the bracketed factor 1 + s1 r + s2(E) r^2 + ... to
/// whatever order the caller can supply. Used to seed Numerov when the left
/// edge of the grid is not deep inside a classically forbidden region
/// (otherwise any seed washes out).
pub(crate) struct SeriesSeed<'a> {
    pub p: f64,
    pub series_of_e: &'a dyn Fn(f64, f64) -> f64,
}

const BOUNDARY_AMPLITUDE_LIMIT: f64 = 1e-10;
const EIGENVALUE_TOL_EV: f64 = 1e-12;
/// Numerov steps are dropped where h^2 W > this: with g = h^2 W / 12 the
/// growing-solution recurrence stays accurate and monotone only for small g.
/// The sweep restarts just past the cut; whether a Dirichlet value is an
/// adequate boundary condition there depends on the barrier thickness and
/// is decided separately (see seed_washout).
const STIFFNESS_LIMIT: f64 = 0.25;

/// Number of eigenvalues of the symmetric tridiagonal (diag, const offdiag)
/// strictly below x, by the Sturm sequence of LDL^T pivots.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let b2 = off * off;
    let mut count = 0usize;
    let mut q = 1.0f64;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - b2 / q };
        if q == 0.0 {
            q = -1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solve (T - shift I) y = rhs for tridiagonal T = (off, diag, off), by
/// Gaussian elimination with partial pivoting (one extra superdiagonal of
/// fill-in). rhs is overwritten with the solution.
fn solve_shifted_tridiag(diag: &[f64], off: f64, shift: f64, rhs: &mut [f64]) {
    let m = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|&x| x - shift).collect();
    let mut du: Vec<f64> = vec![0.0; m];
    let mut du2: Vec<f64> = vec![0.0; m];
    for item in du.iter_mut().take(m.saturating_sub(1)) {
        *item = off;
    }
    let mut dl: Vec<f64> = vec![off; m.saturating_sub(1)];
    let mut swapped = vec![false; m];

    for i in 0..m.saturating_sub(1) {
        if dl[i].abs() > d[i].abs() {
            swapped[i] = true;
            std::mem::swap(&mut d[i], &mut dl[i]);
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t;
            if i + 1 < m - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = 0.0;
            }
            rhs.swap(i, i + 1);
        }
        if d[i] == 0.0 {
            d[i] = 1e-300;
        }
        let factor = dl[i] / d[i];
        d[i + 1] -= factor * du[i];
        if i + 1 < m - 1 {
            du[i + 1] -= factor * du2[i];
        }
        rhs[i + 1] -= factor * rhs[i];
    }
    if m > 0 && d[m - 1] == 0.0 {
        d[m - 1] = 1e-300;
    }

    // back substitution over the three stored bands
    if m > 0 {
        rhs[m - 1] /= d[m - 1];
    }
    if m > 1 {
        rhs[m - 2] = (rhs[m - 2] - du[m - 2] * rhs[m - 1]) / d[m - 2];
    }
    for i in (0..m.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    }
}

/// Sign changes across entries whose magnitude exceeds `threshold` times the
/// peak magnitude (tiny tail values carry rounding noise, not nodes).
fn count_nodes(values: &[f64], threshold: f64) -> usize {
    let peak = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let cut = threshold * peak;
    let mut nodes = 0;
    let mut last_sign = 0.0f64;
    for &v in values {
        if v.abs() < cut {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            nodes += 1;
        }
        last_sign = s;
    }
    nodes
}

pub(crate) struct FdSolution {
    pub eigenvalues: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub vectors: Vec<Vec<f64>>,
}

/// Lowest `count` eigenpairs of the FD-discretized u'' = W u problem with
/// Dirichlet ends, for an arbitrary effective potential.
pub(crate) fn fd_general(
    k_factor: f64,
    v_eff: &dyn Fn(f64) -> f64,
    grid: &RadialGrid,
    count: usize,
    strict: bool,
) -> Result<FdSolution, OracleError> {
    let m = grid.m;
    if count == 0 || count > m / 4 {
        return Err(OracleError::TooManyStates { count, m, max: m / 4 });
    }
    let h = grid.h();
    let off = -k_factor / (2.0 * h * h);
    let diag: Vec<f64> = (1..=m).map(|i| k_factor / (h * h) + v_eff(grid.point(i))).collect();

    let two_off = 2.0 * off.abs();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &d in &diag {
        lo = lo.min(d - two_off);
        hi = hi.max(d + two_off);
    }

    let mut eigenvalues = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for kth in 0..count {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            if b - a <= EIGENVALUE_TOL_EV {
                break;
            }
            let mid = 0.5 * (a + b);
            if sturm_count(&diag, off, mid) <= kth {
                a = mid;
            } else {
                b = mid;
            }
        }
        let lambda = 0.5 * (a + b);

        // Inverse iteration at the converged shift; a few passes are ample
        // since the shift is within 1e-12 of the eigenvalue.
        let mut v: Vec<f64> = (0..m).map(|i| 1.0 + 0.3 * ((i % 5) as f64)).collect();
        for _ in 0..3 {
            solve_shifted_tridiag(&diag, off, lambda, &mut v);
            let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1e-300);
            for x in v.iter_mut() {
                *x /= peak;
            }
        }

        let nodes = count_nodes(&v, 1e-8);
        if nodes != kth {
            return Err(OracleError::WrongState { expected: kth, found: nodes });
        }
        let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let edge = v[m - 1].abs() / peak;
        if strict && edge > BOUNDARY_AMPLITUDE_LIMIT {
            return Err(OracleError::BoundaryTruncation { amplitude: edge });
        }

        eigenvalues.push(lambda);
        vectors.push(v);
    }
    debug_assert!(eigenvalues.windows(2).all(|w| w[0] < w[1]));
    Ok(FdSolution { eigenvalues, vectors })
}

/// Pseudoharmonic effective potential, written out locally so the oracle
/// shares no code with the closed-form module.
fn pseudoharmonic_v_eff(params: &MolecularParams, l: u32, k_factor: f64) -> impl Fn(f64) -> f64 {
    let v0 = params.v0_ev();
    let r0 = params.r0_a();
    let cf = f64::from(l) * f64::from(l + 1);
    move |r: f64| v0 * (r / r0 - r0 / r).powi(2) + cf * k_factor / (2.0 * r * r)
}

/// Indicial exponent p of u ~ r^p at the origin for the pseudoharmonic
/// effective potential: p(p-1) = 2 V0 r0^2 / (hbar^2/mu) + l(l+1).
fn pseudoharmonic_indicial_p(params: &MolecularParams, l: u32, k_factor: f64) -> f64 {
    let c = 2.0 * params.v0_ev() * params.r0_a().powi(2) / k_factor + f64::from(l) * f64::from(l + 1);
    0.5 * (1.0 + (1.0 + 4.0 * c).sqrt())
}

/// Lowest `count` eigenvalues for the pseudoharmonic molecule at angular
/// momentum l, by finite differences and Sturm bisection to 1e-12 eV.
/// Every eigenvector is node-checked against its index; in strict mode an
/// eigenfunction amplitude above 1e-10 of peak at r_max fails the run.
pub fn fd_spectrum(
    constants: &PhysicalConstants,
    params: &MolecularParams,
    l: u32,
    grid: &RadialGrid,
    count: usize,
    strict: bool,
) -> Result<NumericSpectrum, OracleError> {
    let k_factor = constants.hbar2_over_amu_a2() / params.mu_amu();
    let v_eff = pseudoharmonic_v_eff(params, l, k_factor);
    let sol = fd_general(k_factor, &v_eff, grid, count, strict)?;
    Ok(NumericSpectrum { l, eigenvalues: sol.eigenvalues, grid: *grid, method: Method::FdSturm })
}

struct Shot {
    /// Matching function: discrete Wronskian of the outward and inward
    /// solutions at the match point. A scale-free stand-in for the
    /// log-derivative mismatch; zero exactly when the two join smoothly.
    g: f64,
    /// Nodes of the one-sided (left-seeded) solution over the whole kept
    /// range. Jumps by one as E crosses each eigenvalue, so it doubles as a
    /// spectral counting function.
    nodes_full: usize,
    /// Nodes of the matched two-sided solution.
    nodes_matched: usize,
}

struct NumerovWorkspace<'a> {
    k_factor: f64,
    v_eff: &'a dyn Fn(f64) -> f64,
    seed: &'a SeriesSeed<'a>,
    grid: &'a RadialGrid,
    j_start: usize,
    j_end: usize,
    j_match: usize,
    /// True when the forbidden barrier between j_start and the inner
    /// turning point is thick enough (in integrated e-folds of the growing
    /// solution) that any outward seed collapses onto the growing solution
    /// and a plain Dirichlet start is exact for practical purposes.
    seed_washout: bool,
}

impl NumerovWorkspace<'_> {
    fn new<'a>(
        k_factor: f64,
        v_eff: &'a dyn Fn(f64) -> f64,
        seed: &'a SeriesSeed<'a>,
        grid: &'a RadialGrid,
        e_reference: f64,
    ) -> Result<NumerovWorkspace<'a>, OracleError> {
        let m = grid.m;
        let h = grid.h();
        let w_ref: Vec<f64> =
            (0..=m + 1).map(|j| 2.0 * (v_eff(grid.point(j)) - e_reference) / k_factor).collect();

        // Match midway through the classically allowed region (a single
        // interval for single-well potentials), away from both seeds.
        let allowed: Vec<usize> = (1..=m).filter(|&j| w_ref[j] < 0.0).collect();
        if allowed.is_empty() {
            return Err(OracleError::Bracketing {
                lo: e_reference,
                hi: e_reference,
                detail: "reference energy lies below the effective potential everywhere".into(),
            });
        }
        let j_match = allowed[allowed.len() / 2];

        // Indices are frozen at the reference energy so the matching
        // function stays continuous across the bracket (the bracket width is
        // tiny on the potential's energy scale).
        let stiff = |j: usize| h * h * w_ref[j] > STIFFNESS_LIMIT;
        let j_start = (0..j_match).take_while(|&j| stiff(j)).last().map_or(0, |j| j + 1);
        let j_end = (j_match + 1..=m + 1).find(|&j| stiff(j)).unwrap_or(m + 1);
        if j_start + 6 > j_match || j_match + 6 > j_end {
            return Err(OracleError::InvalidGrid {
                reason: format!(
                    "classically allowed region too thin: start {j_start}, match {j_match}, \
                     end {j_end}"
                ),
            });
        }

        // Integrated growth of the dominant solution between the outward
        // seed and the inner turning point. An error in the seed ratio
        // excites the decaying solution, whose share shrinks by e^(-2S)
        // over the sweep; S >= 20 pushes any O(1) seed error below 1e-17,
        // so a plain Dirichlet start is exact there. A thinner barrier
        // still remembers the seed and needs the true ratio.
        let seed_washout =
            (j_start..allowed[0]).map(|j| w_ref[j].max(0.0).sqrt() * h).sum::<f64>() >= 20.0;
        Ok(NumerovWorkspace { k_factor, v_eff, seed, grid, j_start, j_end, j_match, seed_washout })
    }

    /// Propagate at energy e: outward from j_start across the whole range
    /// (one-sided node count), inward from j_end to the match point, and the
    /// Wronskian of the two at (j_match, j_match + 1).
    fn shoot(&self, e: f64) -> Shot {
        let grid = self.grid;
        let h = grid.h();
        let g_of = |j: usize| {
            h * h * (2.0 * ((self.v_eff)(grid.point(j)) - e) / self.k_factor) / 12.0
        };

        // Outward sweep. Behind a thick barrier the seed washes out and a
        // Dirichlet start costs nothing. Behind a thin one the seed ratio
        // survives to the match point, so take it from the power series
        // about the origin, provided the series still hugs its leading
        // term there; past that radius the truncated series is no better
        // a model than the Dirichlet fallback.
        let (mut u_prev, mut u_cur) = if self.seed_washout {
            (0.0, 1e-160)
        } else {
            let r0 = grid.point(self.j_start);
            let r1 = grid.point(self.j_start + 1);
            let f0 = (self.seed.series_of_e)(e, r0);
            let f1 = (self.seed.series_of_e)(e, r1);
            if (f0 - 1.0).abs() < 0.3 && (f1 - 1.0).abs() < 0.3 {
                let ratio = (self.seed.p * (r1 / r0).ln()).exp() * f1 / f0;
                (1e-160, 1e-160 * ratio)
            } else {
                (0.0, 1e-160)
            }
        };

        let mut nodes_full = 0usize;
        let mut nodes_before_match = 0usize;
        let mut out_m = 0.0f64;
        let mut out_m1 = 0.0f64;
        let mut g_prev = g_of(self.j_start);
        let mut g_cur = g_of(self.j_start + 1);
        for j in self.j_start + 1..self.j_end {
            if j == self.j_match {
                out_m = u_cur;
            }
            if j == self.j_match + 1 {
                out_m1 = u_cur;
            }
            let g_next = g_of(j + 1);
            let u_next =
                ((2.0 + 10.0 * g_cur) * u_cur - (1.0 - g_prev) * u_prev) / (1.0 - g_next);
            if u_next != 0.0 && u_cur != 0.0 && u_next.signum() != u_cur.signum() {
                nodes_full += 1;
                if j < self.j_match {
                    nodes_before_match += 1;
                }
            }
            let scale = u_cur.abs().max(u_next.abs()).max(1e-300);
            u_prev = u_cur / scale;
            u_cur = u_next / scale;
            // Keep the matched pair in one common normalization, then freeze
            // it: a shared factor cancels in the Wronskian, and dividing by
            // the growth of the forbidden tail beyond the match point would
            // underflow both entries for deep wells.
            if j <= self.j_match {
                out_m /= scale;
                out_m1 /= scale;
            }
            g_prev = g_cur;
            g_cur = g_next;
        }

        // Inward sweep from the Dirichlet end (or the outer stiffness cut).
        let (mut v_next, mut v_cur) = (0.0f64, 1e-160f64);
        let mut in_m = 0.0f64;
        let mut in_m1 = 0.0f64;
        let mut nodes_in = 0usize;
        let mut gj_next = g_of(self.j_end);
        let mut gj_cur = g_of(self.j_end - 1);
        for j in (self.j_match..self.j_end - 1).rev() {
            if j + 1 == self.j_match + 1 {
                in_m1 = v_cur;
            }
            let gj_prev = g_of(j);
            let v_prev =
                ((2.0 + 10.0 * gj_cur) * v_cur - (1.0 - gj_next) * v_next) / (1.0 - gj_prev);
            if v_prev != 0.0 && v_cur != 0.0 && v_prev.signum() != v_cur.signum() {
                nodes_in += 1;
            }
            let scale = v_cur.abs().max(v_prev.abs()).max(1e-300);
            v_next = v_cur / scale;
            v_cur = v_prev / scale;
            in_m1 /= scale;
            if j == self.j_match {
                in_m = v_cur;
            }
            gj_next = gj_cur;
            gj_cur = gj_prev;
        }

        Shot {
            g: out_m1 * in_m - out_m * in_m1,
            nodes_full,
            nodes_matched: nodes_before_match + nodes_in,
        }
    }
}

/// Single eigenvalue by Numerov shooting for an arbitrary effective
/// potential. See `numerov_shoot` for the contract.
pub(crate) fn numerov_general(
    k_factor: f64,
    v_eff: &dyn Fn(f64) -> f64,
    seed: &SeriesSeed,
    grid: &RadialGrid,
    n_target: usize,
    bracket: (f64, f64),
) -> Result<f64, OracleError> {
    let (mut lo, mut hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(OracleError::Bracketing {
            lo,
            hi,
            detail: "bounds must be finite with lo < hi".into(),
        });
    }
    let ws = NumerovWorkspace::new(k_factor, v_eff, seed, grid, 0.5 * (lo + hi))?;

    // The one-sided node count equals the number of eigenvalues below E at
    // any representable distance from an eigenvalue, so it verifies the
    // bracket and then pins the target between counts n and n+1.
    let count_lo = ws.shoot(lo).nodes_full;
    if count_lo > n_target {
        return Err(OracleError::WrongState { expected: n_target, found: count_lo });
    }
    let count_hi = ws.shoot(hi).nodes_full;
    if count_hi < n_target + 1 {
        return Err(OracleError::WrongState { expected: n_target + 1, found: count_hi });
    }
    let node_width = (1e-6 * lo.abs().max(hi.abs()).max(1.0)).max(1e4 * EIGENVALUE_TOL_EV);
    for _ in 0..200 {
        if hi - lo <= node_width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ws.shoot(mid).nodes_full <= n_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Matching-function root inside the node-isolated interval, bisection
    // with an Illinois-type secant acceleration.
    let mut g_lo = ws.shoot(lo).g;
    let mut g_hi = ws.shoot(hi).g;
    let converged = |a: f64, b: f64| b - a <= EIGENVALUE_TOL_EV;
    if g_lo == 0.0 {
        hi = lo;
    } else if g_hi == 0.0 {
        lo = hi;
    } else if g_lo.signum() == g_hi.signum() {
        return Err(OracleError::Bracketing {
            lo,
            hi,
            detail: "matching function does not change sign across the node-isolated interval"
                .into(),
        });
    }
    let mut side = 0i8;
    for _ in 0..300 {
        if converged(lo, hi) {
            break;
        }
        let width = hi - lo;
        let secant = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        let x = if secant > lo + 0.01 * width && secant < hi - 0.01 * width {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let gx = ws.shoot(x).g;
        if gx == 0.0 {
            lo = x;
            hi = x;
            break;
        }
        if gx.signum() == g_lo.signum() {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    let e = 0.5 * (lo + hi);

    let nodes = ws.shoot(e).nodes_matched;
    if nodes != n_target {
        return Err(OracleError::WrongState { expected: n_target, found: nodes });
    }
    Ok(e)
}

/// Bound-state energy of the pseudoharmonic state (n, l) by Numerov
/// shooting to 1e-12 eV bracket width.
///
/// The bracket must isolate the target: the propagated solution's node
/// count at E_lo may not exceed n and at E_hi must reach n + 1, verified
/// before refinement; the matched solution at the converged energy must
/// carry exactly n nodes.
pub fn numerov_shoot(
    constants: &PhysicalConstants,
    params: &MolecularParams,
    l: u32,
    n: u32,
    grid: &RadialGrid,
    bracket: (f64, f64),
) -> Result<f64, OracleError> {
    let k_factor = constants.hbar2_over_amu_a2() / params.mu_amu();
    let v_eff = pseudoharmonic_v_eff(params, l, k_factor);
    let p = pseudoharmonic_indicial_p(params, l, k_factor);
    // W(r) = p(p-1)/r^2 + B + C r^2 with B = 2(-2 V0 - E)/k and
    // C = 2 (V0/r0^2)/k; matching powers in u'' = W u for
    // u = r^p (1 + s2 r^2 + s4 r^4) gives the even series coefficients.
    let v0 = params.v0_ev();
    let c_coef = 2.0 * (v0 / (params.r0_a() * params.r0_a())) / k_factor;
    let series_of_e = move |e: f64, r: f64| {
        let b = 2.0 * (-2.0 * v0 - e) / k_factor;
        let s2 = b / (4.0 * p + 2.0);
        let s4 = (b * s2 + c_coef) / (8.0 * p + 12.0);
        1.0 + (s2 + s4 * r * r) * r * r
    };
    let seed = SeriesSeed { p, series_of_e: &series_of_e };
    numerov_general(k_factor, &v_eff, &seed, grid, n as usize, bracket)
}

/// Richardson extrapolation of a method of the given order from values at
/// spacings h and h/2: (2^order e_h2 - e_h) / (2^order - 1).
pub fn richardson(e_h: f64, e_h2: f64, order: u32) -> f64 {
    let w = (2.0f64).powi(order as i32);
    (w * e_h2 - e_h) / (w - 1.0)
}

/// Richardson step for a non-integer error exponent. The FD mesh reaches into
/// the r^p region near the origin, where the 3-point truncation error decays
/// as h^(2p-1) rather than h^4; the ladder's second stage targets that
/// exponent when it is the slower one.
fn richardson_frac(e_h: f64, e_h2: f64, order: f64) -> f64 {
    let w = (2.0f64).powf(order);
    (w * e_h2 - e_h) / (w - 1.0)
}

pub const DEFAULT_GRID_POINTS: usize = 4000;

fn default_r_max(params: &MolecularParams, k_factor: f64) -> f64 {
    // alpha r0^2 in the Gaussian tail e^{-alpha r^2}; the bound keeps the
    // tail below ~1e-14 at the boundary.
    let alpha_r02 = params.r0_a() * (params.v0_ev() / (2.0 * k_factor)).sqrt();
    params.r0_a() * (1.0 + 8.0 / alpha_r02.sqrt()).max(4.0)
}

/// Default FD grid. r_min is r0/50 when the indicial power suppresses the
/// wavefunction below 1e-12 there (molecular-scale wells); for shallow wells
/// the power-law tail still carries weight at r0/50 and the Dirichlet cut
/// must move to r0 * 1e-6 to keep the truncation below the validation
/// tolerances.
pub fn default_fd_grid(
    constants: &PhysicalConstants,
    params: &MolecularParams,
    l: u32,
    m: usize,
) -> Result<RadialGrid, OracleError> {
    let k_factor = constants.hbar2_over_amu_a2() / params.mu_amu();
    let p = pseudoharmonic_indicial_p(params, l, k_factor);
    let r0 = params.r0_a();
    let r_min = if 50f64.powf(-p) < 1e-12 { r0 / 50.0 } else { r0 * 1e-6 };
    RadialGrid::new(r_min, default_r_max(params, k_factor), m)
}

/// Default Numerov grid: r_min = r0/50 always, since the power-series seed
/// handles the left boundary exactly rather than by Dirichlet truncation.
pub fn default_numerov_grid(
    constants: &PhysicalConstants,
    params: &MolecularParams,
    m: usize,
) -> Result<RadialGrid, OracleError> {
    let k_factor = constants.hbar2_over_amu_a2() / params.mu_amu();
    RadialGrid::new(params.r0_a() / 50.0, default_r_max(params, k_factor), m)
}

/// One state's cross-validation data from one method: raw eigenvalues on a
/// grid ladder h, h/2, h/4 and the Richardson limit of the ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLadder {
    pub coarse: f64,
    pub medium: f64,
    pub fine: f64,
    pub extrapolated: f64,
}

impl GridLadder {
    fn new(coarse: f64, medium: f64, fine: f64, order: u32, second_order: f64) -> Self {
        let first = richardson(coarse, medium, order);
        let second = richardson(medium, fine, order);
        Self { coarse, medium, fine, extrapolated: richardson_frac(first, second, second_order) }
    }
}

/// Both methods' ladders for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub n: u32,
    pub l: u32,
    pub fd: GridLadder,
    pub numerov: GridLadder,
}

/// Run both solvers for n = 0..=n_max at fixed l on an h, h/2, h/4 grid
/// ladder and Richardson-extrapolate each. Numerov brackets come from the
/// finest FD spectrum, padded by a fraction of the local level gap.
pub fn cross_validate(
    constants: &PhysicalConstants,
    params: &MolecularParams,
    l: u32,
    n_max: u32,
    m: usize,
) -> Result<Vec<CrossCheck>, OracleError> {
    let count = n_max as usize + 2;
    let k_factor = constants.hbar2_over_amu_a2() / params.mu_amu();
    // Second-stage exponent for the FD ladder. The Dirichlet mesh samples the
    // r^p region near the origin, so after the h^2 stage the slower of the
    // h^(2p-1) and h^4 terms is the one left to extrapolate. Deep wells have
    // large p and reduce to the smooth h^4 case.
    let fd_second = (2.0 * pseudoharmonic_indicial_p(params, l, k_factor) - 1.0).min(4.0);
    let fd_grids = {
        let g = default_fd_grid(constants, params, l, m)?;
        [g, g.halved(), g.halved().halved()]
    };
    let fd_runs: Vec<NumericSpectrum> = fd_grids
        .iter()
        .map(|g| fd_spectrum(constants, params, l, g, count, true))
        .collect::<Result<_, _>>()?;

    let nm_grids = {
        let g = default_numerov_grid(constants, params, m)?;
        [g, g.halved(), g.halved().halved()]
    };
    let reference = &fd_runs[2].eigenvalues;

    let mut checks = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max as usize {
        let gap_below = if n == 0 {
            reference[1] - reference[0]
        } else {
            reference[n] - reference[n - 1]
        };
        let gap_above = reference[n + 1] - reference[n];
        let bracket =
            (reference[n] - 0.45 * gap_below, reference[n] + 0.45 * gap_above);
        let mut nm = [0.0f64; 3];
        for (slot, grid) in nm.iter_mut().zip(&nm_grids) {
            *slot = numerov_shoot(constants, params, l, n as u32, grid, bracket)?;
        }
        checks.push(CrossCheck {
            n: n as u32,
            l,
            fd: GridLadder::new(
                fd_runs[0].eigenvalues[n],
                fd_runs[1].eigenvalues[n],
                fd_runs[2].eigenvalues[n],
                2,
                fd_second,
            ),
            numerov: GridLadder::new(nm[0], nm[1], nm[2], 4, 6.0),
        });
    }
    Ok(checks)
}
