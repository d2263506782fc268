//! Independent finite-difference check of the closed-form spectra.
//!
//! For a frozen energy `E` the operator `-d^2/dx^2 + U_E(x)` is discretized by
//! second-order central differences with Dirichlet walls. The resulting
//! symmetric tridiagonal matrix is solved for its `n`-th eigenvalue
//! `lambda_n(E)` by Sturm-sequence bisection, and the self-consistent energy is
//! the root of
//!
//! ```text
//! g(E) = lambda_n(E) - (E^2 - m^2)
//! ```
//!
//! found by bracketed regula falsi around a seed. Nothing here uses the superpotentials or
//! the level quadratics except to pick a seed and a domain.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{effective_potential, solve_level, Couplings, Family, ShapeData, Sign, SpectrumReport};

/// Computational domain of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// Chosen per family from closed-form decay rates.
    Auto,
    /// `[-L, L]`.
    HalfWidth(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub domain: Domain,
    /// Grid points including both Dirichlet walls.
    pub points: usize,
    /// Half-width of the energy bracket around the seed.
    pub bracket_halfwidth: f64,
    /// Root finding stops when the energy bracket is narrower than this.
    pub root_tol: f64,
    /// States whose slowest decay rate is below this are skipped.
    pub marginal_threshold: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            domain: Domain::Auto,
            points: 6001,
            bracket_halfwidth: 0.5,
            root_tol: 1e-8,
            marginal_threshold: 1e-2,
        }
    }
}

impl OracleConfig {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 101 {
            return Err(Error::Domain(format!(
                "oracle needs at least 101 points, got {}",
                self.points
            )));
        }
        if !(self.root_tol > 0.0) || !(self.bracket_halfwidth > 0.0) {
            return Err(Error::Domain("root_tol and bracket_halfwidth must be positive".into()));
        }
        if let Domain::HalfWidth(l) = self.domain {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Domain(format!("domain half-width must be positive, got {l}")));
            }
        }
        Ok(())
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len().max(1),
            "off-diagonal must be one shorter than the diagonal"
        );
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `lambda`, from the signs of the
    /// LDL^T pivots of `T - lambda I`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1] / q
            };
            q = d - lambda - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + lambda.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let radius = |i: usize| {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            left + right
        };
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            (lo.min(self.diag[i] - radius(i)), hi.max(self.diag[i] + radius(i)))
        })
    }

    /// `k`-th smallest eigenvalue (zero based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize) -> Option<f64> {
        if k >= self.len() {
            return None;
        }
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Central-difference `-d^2/dx^2 + U(x)` on the interior of a uniform grid
/// with `points` nodes on `[x_min, x_max]` and Dirichlet walls.
pub fn discretize(potential: impl Fn(f64) -> f64, x_min: f64, x_max: f64, points: usize) -> Tridiagonal {
    let h = (x_max - x_min) / (points - 1) as f64;
    let inv_h2 = 1.0 / (h * h);
    let interior = points - 2;
    let diag = (1..=interior)
        .map(|i| 2.0 * inv_h2 + potential(x_min + i as f64 * h))
        .collect();
    Tridiagonal::new(diag, vec![-inv_h2; interior.saturating_sub(1)])
}

/// Slowest asymptotic decay rate of level `n` if its energy were `energy`.
fn decay_rate(family: Family, c: &Couplings, n: usize, energy: f64) -> f64 {
    let shape = ShapeData::at_energy(family, c, energy);
    let k = shape.a - n as f64;
    match family {
        Family::Tanh => (k + shape.b / k).min(k - shape.b / k),
        Family::Exp => k.abs(),
        Family::Linear => f64::INFINITY,
    }
}

/// Automatic domain from closed-form decay rates: at least twelve decay
/// lengths on open sides, a left wall deep inside the exponential barrier,
/// and for the linear family a window clearing the turning point.
pub fn auto_domain(family: Family, c: &Couplings, n: usize, energy: f64) -> (f64, f64) {
    const MIN_RATE: f64 = 0.03;
    let shape = ShapeData::at_energy(family, c, energy);
    let k = shape.a - n as f64;
    match family {
        Family::Tanh => {
            let s1 = (k + shape.b / k).max(MIN_RATE);
            let s2 = (k - shape.b / k).max(MIN_RATE);
            (-(12.0 / s2).max(18.0), (12.0 / s1).max(18.0))
        }
        Family::Exp => {
            let eps = energy * energy - c.m * c.m;
            let wall = (shape.a.max(0.0) + n as f64 + 32.0) / shape.b;
            (-wall.ln(), 25.0 / eps.abs().sqrt().max(0.25))
        }
        Family::Linear => {
            let center = -shape.b / shape.a;
            let half = (((2 * n + 1) as f64).sqrt() + 5.0).max(12.0) / shape.a.sqrt();
            (center - half, center + half)
        }
    }
}

fn resolve_domain(cfg: &OracleConfig, family: Family, c: &Couplings, n: usize, energy: f64) -> (f64, f64) {
    match cfg.domain {
        Domain::Auto => auto_domain(family, c, n, energy),
        Domain::HalfWidth(l) => (-l, l),
    }
}

fn box_eigenvalue(
    family: Family,
    c: &Couplings,
    energy: f64,
    n: usize,
    domain: (f64, f64),
    points: usize,
) -> Result<f64> {
    let t = discretize(
        |x| effective_potential(family, c, energy, x),
        domain.0,
        domain.1,
        points,
    );
    t.eigenvalue(n)
        .ok_or_else(|| Error::Domain(format!("level {n} exceeds the {} interior grid points", t.len())))
}

/// Bottom of the continuum of `U_E` on the `E^2 - m^2` scale.
pub fn continuum_edge(family: Family, c: &Couplings, energy: f64) -> f64 {
    match family {
        Family::Tanh => c.strength() - 2.0 * c.mixing(energy).abs(),
        Family::Exp => 0.0,
        Family::Linear => f64::INFINITY,
    }
}

/// `n`-th (zero based) eigenvalue of the discretized frozen-energy problem.
pub fn nth_inner_eigenvalue(family: Family, c: &Couplings, e_frozen: f64, n: usize, cfg: &OracleConfig) -> Result<f64> {
    c.require_discrete()?;
    cfg.validate()?;
    let domain = resolve_domain(cfg, family, c, n, e_frozen);
    let lambda = box_eigenvalue(family, c, e_frozen, n, domain, cfg.points)?;
    let edge = continuum_edge(family, c, e_frozen);
    if lambda >= edge {
        return Err(Error::NoBoundState {
            n,
            eigenvalue: lambda,
            edge,
        });
    }
    Ok(lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub energy: f64,
    /// `lambda_n` at the returned energy.
    pub inner_eigenvalue: f64,
    /// `g(E)` at the returned energy.
    pub mismatch: f64,
    pub iterations: usize,
    pub converged: bool,
    pub skipped_marginal: bool,
    pub domain: (f64, f64),
}

/// Self-consistent energy of level `n` near `seed_energy`.
///
/// Without a seed the closed-form root of the requested branch is used. A
/// state whose slowest decay rate at the seed is below
/// `cfg.marginal_threshold` is reported as skipped, not solved.
pub fn solve_selfconsistent(
    family: Family,
    c: &Couplings,
    n: usize,
    sign: Sign,
    cfg: &OracleConfig,
    seed_energy: Option<f64>,
) -> Result<OracleResult> {
    c.require_discrete()?;
    cfg.validate()?;
    let seed = match seed_energy {
        Some(e) => e,
        None => {
            solve_level(family, c, n, sign)?
                .ok_or_else(|| Error::Domain(format!("level {n} ({sign}) has no closed-form root to seed from")))?
                .energy
        }
    };
    let domain = resolve_domain(cfg, family, c, n, seed);
    if decay_rate(family, c, n, seed) < cfg.marginal_threshold {
        return Ok(OracleResult {
            energy: seed,
            inner_eigenvalue: f64::NAN,
            mismatch: f64::NAN,
            iterations: 0,
            converged: false,
            skipped_marginal: true,
            domain,
        });
    }

    let m2 = c.m * c.m;
    let g = |e: f64| -> Result<(f64, f64)> {
        let lambda = box_eigenvalue(family, c, e, n, domain, cfg.points)?;
        Ok((lambda - (e * e - m2), lambda))
    };
    let (mut lo, mut hi) = (seed - cfg.bracket_halfwidth, seed + cfg.bracket_halfwidth);
    let (g_lo, _) = g(lo)?;
    let (g_hi, _) = g(hi)?;
    if !(g_lo * g_hi < 0.0) {
        return Err(Error::BracketFailure { lo, hi, g_lo, g_hi });
    }
    // Illinois variant of regula falsi: the bracket is kept, and the endpoint
    // that survives two steps in a row has its value halved.
    let (mut f_lo, mut f_hi) = (g_lo, g_hi);
    let mut stale = 0i8;
    let mut iterations = 0;
    let mut exact = None;
    while hi - lo > cfg.root_tol && iterations < 200 {
        let mut x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let (gx, _) = g(x)?;
        iterations += 1;
        if gx == 0.0 {
            exact = Some(x);
            break;
        }
        if (gx > 0.0) == (f_lo > 0.0) {
            lo = x;
            f_lo = gx;
            if stale == -1 {
                f_hi *= 0.5;
            }
            stale = -1;
        } else {
            hi = x;
            f_hi = gx;
            if stale == 1 {
                f_lo *= 0.5;
            }
            stale = 1;
        }
    }
    let energy = exact.unwrap_or(0.5 * (lo + hi));
    let (mismatch, inner_eigenvalue) = g(energy)?;
    Ok(OracleResult {
        energy,
        inner_eigenvalue,
        mismatch,
        iterations,
        converged: exact.is_some() || hi - lo <= cfg.root_tol,
        skipped_marginal: false,
        domain,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub sign: Sign,
    pub closed_form: f64,
    pub oracle: Option<f64>,
    pub abs_diff: Option<f64>,
    pub skipped_marginal: bool,
    pub iterations: usize,
    /// Diagnostic when the oracle failed for this row.
    pub error: Option<String>,
}

/// Oracle energy for every accepted level of `report`. Failures become row
/// diagnostics; the table is always complete.
pub fn compare_spectra(report: &SpectrumReport, cfg: &OracleConfig) -> Vec<ComparisonRow> {
    report
        .accepted
        .par_iter()
        .map(|state| {
            let mut row = ComparisonRow {
                n: state.n,
                sign: state.sign,
                closed_form: state.energy,
                oracle: None,
                abs_diff: None,
                skipped_marginal: false,
                iterations: 0,
                error: None,
            };
            match solve_selfconsistent(
                report.family,
                &report.couplings,
                state.n,
                state.sign,
                cfg,
                Some(state.energy),
            ) {
                Ok(r) if r.skipped_marginal => row.skipped_marginal = true,
                Ok(r) => {
                    row.oracle = Some(r.energy);
                    row.abs_diff = Some((r.energy - state.energy).abs());
                    row.iterations = r.iterations;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}
