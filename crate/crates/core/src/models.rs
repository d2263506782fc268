//! Potential families, shape-invariance data and closed-form spectra.
//!
//! With `S(x) = S0 f(x)` and `V(x) = V0 f(x)` the Klein-Gordon equation
//! reduces to `-psi'' + U_E(x) psi = eps psi` with
//!
//! ```text
//! U_E(x) = (S0^2 - V0^2) f(x)^2 + 2 (m S0 + E V0) f(x),    eps = E^2 - m^2.
//! ```
//!
//! Every energy in this crate refers to that single `eps` scale, including the
//! tanh family whose textbook form carries an extra constant `S0^2 - V0^2`.
//!
//! | family   | `f(x)`     | superpotential `W`   | parameter step |
//! |----------|------------|----------------------|----------------|
//! | `Tanh`   | `tanh x`   | `A tanh x + B / A`   | `A -> A - 1`   |
//! | `Exp`    | `-exp(-x)` | `A - B exp(-x)`      | `A -> A - 1`   |
//! | `Linear` | `x / 2`    | `A x + B`            | none           |

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default safety cap on the level index scanned by [`enumerate_spectrum`].
pub const DEFAULT_N_MAX_SCAN: usize = 64;

/// Physical inputs in natural units (`hbar = c = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    /// Rest mass, `m > 0`.
    pub m: f64,
    /// Scalar coupling.
    pub s0: f64,
    /// Vector coupling.
    pub v0: f64,
}

impl Couplings {
    pub fn new(m: f64, s0: f64, v0: f64) -> Result<Self> {
        if !(m.is_finite() && s0.is_finite() && v0.is_finite()) {
            return Err(Error::Domain(format!(
                "couplings must be finite (m={m}, S0={s0}, V0={v0})"
            )));
        }
        if m <= 0.0 {
            return Err(Error::Precondition(format!("rest mass must be positive, got m={m}")));
        }
        Ok(Self { m, s0, v0 })
    }

    /// `S0^2 - V0^2`, the coefficient of `f^2` in the effective potential.
    pub fn strength(&self) -> f64 {
        self.s0 * self.s0 - self.v0 * self.v0
    }

    /// `m S0 + E V0`, the coefficient of `2 f` in the effective potential.
    pub fn mixing(&self, energy: f64) -> f64 {
        self.m * self.s0 + energy * self.v0
    }

    /// Discrete spectra need `S0^2 > V0^2` for every family.
    pub fn require_discrete(&self) -> Result<()> {
        if self.strength() > 0.0 {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "discrete spectrum requires S0^2 > V0^2, got S0={} V0={}",
                self.s0, self.v0
            )))
        }
    }

    /// Same couplings with `V0 -> -V0`.
    pub fn conjugate(&self) -> Self {
        Self { v0: -self.v0, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `f(x) = tanh x`
    Tanh,
    /// `f(x) = -exp(-x)`
    Exp,
    /// `f(x) = x / 2`
    Linear,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Tanh, Family::Exp, Family::Linear];

    /// Shape function `f(x)` shared by the scalar and vector potentials.
    pub fn profile(self, x: f64) -> f64 {
        match self {
            Family::Tanh => x.tanh(),
            Family::Exp => -(-x).exp(),
            Family::Linear => 0.5 * x,
        }
    }

    pub fn profile_complex(self, z: Complex64) -> Complex64 {
        match self {
            Family::Tanh => z.tanh(),
            Family::Exp => -(-z).exp(),
            Family::Linear => z * 0.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Tanh => "tanh",
            Family::Exp => "exp",
            Family::Linear => "linear",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tanh" => Ok(Family::Tanh),
            "exp" => Ok(Family::Exp),
            "linear" => Ok(Family::Linear),
            other => Err(Error::Domain(format!("unknown family '{other}'"))),
        }
    }
}

/// Energy branch: which root of the level quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Domain(format!("unknown branch '{other}'"))),
        }
    }
}

/// Superpotential parameters `(A, B)` of one level.
///
/// `A` and `B` play family-specific roles; for `Tanh` and `Exp` one of them
/// depends on the solved energy through `m S0 + E V0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeData {
    pub a: f64,
    pub b: f64,
}

impl ShapeData {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Superpotential parameters evaluated at energy `energy`.
    pub fn at_energy(family: Family, c: &Couplings, energy: f64) -> Self {
        let d = c.strength();
        match family {
            Family::Tanh => Self::new((-1.0 + (1.0 + 4.0 * d).sqrt()) / 2.0, c.mixing(energy)),
            Family::Exp => {
                let root = d.sqrt();
                Self::new(c.mixing(energy) / root - 0.5, root)
            }
            Family::Linear => {
                let root = d.sqrt();
                Self::new(root / 2.0, c.mixing(energy) / root)
            }
        }
    }

    /// Parameters of the shape-invariant partner, `a_2` as a function of `a_1`.
    pub fn next(self, family: Family) -> Self {
        match family {
            Family::Tanh | Family::Exp => Self::new(self.a - 1.0, self.b),
            Family::Linear => self,
        }
    }
}

/// Family-specific shape quantities reported per level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum LevelExtras {
    Tanh {
        s1: f64,
        s2: f64,
        /// `A - sqrt|B|`; informational upper bound on the level index.
        level_bound: f64,
        within_level_bound: bool,
    },
    Exp {
        /// `A` evaluated at this branch's energy.
        a_pm: f64,
    },
    Linear,
}

/// One solved level of the closed-form spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub family: Family,
    pub couplings: Couplings,
    pub n: usize,
    pub sign: Sign,
    pub energy: f64,
    pub shape: ShapeData,
    pub extras: LevelExtras,
}

impl BoundState {
    /// `E^2 - m^2`.
    pub fn epsilon(&self) -> f64 {
        self.energy * self.energy - self.couplings.m * self.couplings.m
    }

    /// `eps` predicted by the shape-invariance ladder for this level.
    pub fn ladder_epsilon(&self) -> f64 {
        closed_form_epsilon(self.family, self.shape, self.n)
    }
}

/// Why a `(n, sign)` candidate is not a bound state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    /// Negative discriminant of the level quadratic.
    NoRealRoot,
    /// `s1 <= 0` (tanh family): not normalizable as `x -> +inf`.
    S1NonPositive,
    /// `s2 <= 0` (tanh family): not normalizable as `x -> -inf`.
    S2NonPositive,
    /// `A - n <= 0` (exp family).
    ANonPositive,
    /// `A - n <= 0` (tanh family): the level index exceeds the parameter ladder.
    LevelBoundExceeded,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RejectReason::NoRealRoot => "NoRealRoot",
            RejectReason::S1NonPositive => "S1NonPositive",
            RejectReason::S2NonPositive => "S2NonPositive",
            RejectReason::ANonPositive => "ANonPositive",
            RejectReason::LevelBoundExceeded => "LevelBoundExceeded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub n: usize,
    pub sign: Sign,
    pub reason: RejectReason,
    /// Branch whose own test failed; differs from `sign` when this candidate
    /// passed but its partner at the same `n` did not.
    pub failing_branch: Sign,
    /// Root of the level quadratic, when one exists.
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub family: Family,
    pub couplings: Couplings,
    pub n_max_scan: usize,
    pub accepted: Vec<BoundState>,
    pub rejected: Vec<Rejection>,
    /// The scan reached `n_max_scan` without a terminating rejection.
    pub truncated: bool,
}

impl SpectrumReport {
    pub fn level(&self, n: usize, sign: Sign) -> Option<&BoundState> {
        self.accepted.iter().find(|s| s.n == n && s.sign == sign)
    }

    pub fn count(&self, sign: Sign) -> usize {
        self.accepted.iter().filter(|s| s.sign == sign).count()
    }

    pub fn rejection(&self, n: usize, sign: Sign) -> Option<&Rejection> {
        self.rejected.iter().find(|r| r.n == n && r.sign == sign)
    }

    /// Rejection that ended the scan of `sign`, if any.
    pub fn terminal_rejection(&self, sign: Sign) -> Option<&Rejection> {
        if self.truncated {
            return None;
        }
        self.rejected.iter().rfind(|r| r.sign == sign)
    }
}

/// `U_E(x)` with `eps = E^2 - m^2` as eigenvalue.
pub fn effective_potential(family: Family, c: &Couplings, energy: f64, x: f64) -> f64 {
    let f = family.profile(x);
    c.strength() * f * f + 2.0 * c.mixing(energy) * f
}

pub fn effective_potential_complex(family: Family, c: &Couplings, energy: f64, z: Complex64) -> Complex64 {
    let f = family.profile_complex(z);
    f * f * c.strength() + f * (2.0 * c.mixing(energy))
}

pub(crate) fn superpotential_complex(family: Family, shape: ShapeData, z: Complex64) -> Complex64 {
    let ShapeData { a, b } = shape;
    match family {
        Family::Tanh => z.tanh() * a + b / a,
        Family::Exp => Complex64::new(a, 0.0) - (-z).exp() * b,
        Family::Linear => z * a + b,
    }
}

pub(crate) fn superpotential_derivative_complex(family: Family, shape: ShapeData, z: Complex64) -> Complex64 {
    let ShapeData { a, b } = shape;
    match family {
        Family::Tanh => {
            let sech = z.cosh().inv();
            sech * sech * a
        }
        Family::Exp => (-z).exp() * b,
        Family::Linear => Complex64::new(a, 0.0),
    }
}

fn check_superpotential(family: Family, a: f64) -> Result<()> {
    if family == Family::Tanh && a == 0.0 {
        return Err(Error::Domain("tanh superpotential needs A != 0".into()));
    }
    Ok(())
}

/// Superpotential `W(x; A, B)`.
pub fn superpotential_w(family: Family, a: f64, b: f64, x: f64) -> Result<f64> {
    check_superpotential(family, a)?;
    Ok(superpotential_complex(family, ShapeData::new(a, b), Complex64::new(x, 0.0)).re)
}

/// `W'(x; A, B)`, analytic.
pub fn superpotential_derivative(family: Family, a: f64, b: f64, x: f64) -> Result<f64> {
    check_superpotential(family, a)?;
    Ok(superpotential_derivative_complex(family, ShapeData::new(a, b), Complex64::new(x, 0.0)).re)
}

/// Partner potentials `(U+, U-) = (W^2 + W', W^2 - W')` at a complex point.
pub fn partner_potentials(family: Family, shape: ShapeData, z: Complex64) -> (Complex64, Complex64) {
    let w = superpotential_complex(family, shape, z);
    let dw = superpotential_derivative_complex(family, shape, z);
    (w * w + dw, w * w - dw)
}

/// Remainder `R(a_i)` of the shape-invariance condition, `i >= 1`.
///
/// For the tanh family `a_i = A - i + 1` and the remainder telescopes
/// between `a_i` and `a_{i+1} = A - i`.
pub fn remainder_r(family: Family, shape: ShapeData, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::Domain("remainder index starts at 1".into()));
    }
    let ShapeData { a, b } = shape;
    let cur = a - i as f64 + 1.0;
    let nxt = a - i as f64;
    Ok(match family {
        Family::Tanh => (cur * cur - nxt * nxt) + b * b * (1.0 / (cur * cur) - 1.0 / (nxt * nxt)),
        Family::Exp => cur * cur - nxt * nxt,
        Family::Linear => 2.0 * a,
    })
}

/// `eps_n` of the hierarchy with fixed parameters `shape`, on the `E^2 - m^2` scale.
pub fn closed_form_epsilon(family: Family, shape: ShapeData, n: usize) -> f64 {
    let ShapeData { a, b } = shape;
    let k = a - n as f64;
    match family {
        // A (A + 1) = S0^2 - V0^2 restores the constant dropped by the sech^2 form.
        Family::Tanh => a * (a + 1.0) - k * k - b * b / (k * k),
        Family::Exp => -k * k,
        Family::Linear => (2.0 * n as f64 + 1.0) * a - b * b,
    }
}

/// `max |U+(x; a_1) - U-(x; a_2) - R(a_1)|` over `grid`.
pub fn shape_invariance_defect(family: Family, shape: ShapeData, grid: &[f64]) -> Result<f64> {
    let points: Vec<Complex64> = grid.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    shape_invariance_defect_complex(family, shape, &points)
}

pub(crate) fn shape_invariance_defect_complex(family: Family, shape: ShapeData, points: &[Complex64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Degenerate("empty grid".into()));
    }
    check_superpotential(family, shape.a)?;
    let next = shape.next(family);
    check_superpotential(family, next.a)?;
    let r = remainder_r(family, shape, 1)?;
    Ok(points
        .iter()
        .map(|&z| {
            let (upper, _) = partner_potentials(family, shape, z);
            let (_, lower) = partner_potentials(family, next, z);
            (upper - lower - r).norm()
        })
        .fold(0.0, f64::max))
}

/// Which sign the published discriminant carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// `P E^2 + Q E + R = 0`, discriminant `Q^2 - 4 P R`.
    PlusR,
    /// `P E^2 + Q E - R = 0`, discriminant `Q^2 + 4 P R`.
    MinusR,
}

/// Coefficients of the per-level energy quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelQuadratic {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub convention: Convention,
}

impl LevelQuadratic {
    /// `(c2, c1, c0)` with the quadratic written as `c2 E^2 + c1 E + c0 = 0`.
    pub fn polynomial(&self) -> (f64, f64, f64) {
        match self.convention {
            Convention::PlusR => (self.p, self.q, self.r),
            Convention::MinusR => (self.p, self.q, -self.r),
        }
    }

    pub fn discriminant(&self) -> f64 {
        match self.convention {
            Convention::PlusR => self.q * self.q - 4.0 * self.p * self.r,
            Convention::MinusR => self.q * self.q + 4.0 * self.p * self.r,
        }
    }

    pub fn root(&self, sign: Sign) -> Option<f64> {
        let disc = self.discriminant();
        if disc < 0.0 {
            return None;
        }
        Some((-self.q + sign.value() * disc.sqrt()) / (2.0 * self.p))
    }
}

/// Energy quadratic of level `n`.
pub fn level_quadratic(family: Family, c: &Couplings, n: usize) -> Result<LevelQuadratic> {
    c.require_discrete()?;
    let Couplings { m, s0, v0 } = *c;
    let d = c.strength();
    let half = n as f64 + 0.5;
    Ok(match family {
        Family::Tanh => {
            let a = ShapeData::at_energy(family, c, 0.0).a - n as f64;
            let a2 = a * a;
            LevelQuadratic {
                p: a2 + v0 * v0,
                q: 2.0 * m * s0 * v0,
                r: a2 * a2 + m * m * s0 * s0 - a2 * (m * m + d),
                convention: Convention::PlusR,
            }
        }
        Family::Exp => {
            let root = d.sqrt();
            LevelQuadratic {
                p: s0 * s0,
                q: -2.0 * half * v0 * root + 2.0 * m * v0 * s0,
                r: half * half * d + m * m * v0 * v0 - 2.0 * half * m * s0 * root,
                convention: Convention::PlusR,
            }
        }
        Family::Linear => LevelQuadratic {
            p: s0 * s0,
            q: 2.0 * m * s0 * v0,
            r: d.powf(1.5) * half - m * m * v0 * v0,
            convention: Convention::MinusR,
        },
    })
}

fn extras_for(family: Family, shape: ShapeData, n: usize) -> LevelExtras {
    match family {
        Family::Tanh => {
            let k = shape.a - n as f64;
            let level_bound = shape.a - shape.b.abs().sqrt();
            LevelExtras::Tanh {
                s1: k + shape.b / k,
                s2: k - shape.b / k,
                level_bound,
                within_level_bound: (n as f64) < level_bound,
            }
        }
        Family::Exp => LevelExtras::Exp { a_pm: shape.a },
        Family::Linear => LevelExtras::Linear,
    }
}

/// Solve the energy quadratic of level `n` on one branch.
///
/// Returns `Ok(None)` when the discriminant is negative. The returned state is
/// not filtered; see [`acceptability`].
pub fn solve_level(family: Family, c: &Couplings, n: usize, sign: Sign) -> Result<Option<BoundState>> {
    let quad = level_quadratic(family, c, n)?;
    Ok(quad.root(sign).map(|energy| {
        let shape = ShapeData::at_energy(family, c, energy);
        BoundState {
            family,
            couplings: *c,
            n,
            sign,
            energy,
            shape,
            extras: extras_for(family, shape, n),
        }
    }))
}

/// Normalizability test of a solved level; `None` means acceptable.
///
/// Positivity is strict with no slack.
pub fn acceptability(state: &BoundState) -> Option<RejectReason> {
    let k = state.shape.a - state.n as f64;
    match state.extras {
        LevelExtras::Tanh { s1, s2, .. } => {
            if !(k > 0.0) {
                Some(RejectReason::LevelBoundExceeded)
            } else if !(s1 > 0.0) {
                Some(RejectReason::S1NonPositive)
            } else if !(s2 > 0.0) {
                Some(RejectReason::S2NonPositive)
            } else {
                None
            }
        }
        LevelExtras::Exp { .. } => {
            if k > 0.0 && state.shape.b > 0.0 {
                None
            } else {
                Some(RejectReason::ANonPositive)
            }
        }
        LevelExtras::Linear => None,
    }
}

/// Closed-form spectrum with acceptability filtering.
///
/// A level index `n` is accepted only when both branches pass their
/// normalizability test; a failing branch takes its partner down with it.
/// The scan stops at the first rejected level after at least one accepted
/// level, or after `n = n_max_scan`.
pub fn enumerate_spectrum(family: Family, c: &Couplings, n_max_scan: usize) -> Result<SpectrumReport> {
    c.require_discrete()?;
    let mut report = SpectrumReport {
        family,
        couplings: *c,
        n_max_scan,
        accepted: Vec::new(),
        rejected: Vec::new(),
        truncated: true,
    };
    for n in 0..=n_max_scan {
        let mut outcomes = Vec::with_capacity(2);
        for sign in Sign::BOTH {
            let state = solve_level(family, c, n, sign)?;
            let verdict = match &state {
                None => Some(RejectReason::NoRealRoot),
                Some(s) => acceptability(s),
            };
            outcomes.push((sign, state, verdict));
        }
        let first_failure = outcomes.iter().find_map(|(sign, _, v)| v.map(|r| (*sign, r)));
        match first_failure {
            None => report.accepted.extend(outcomes.into_iter().filter_map(|(_, s, _)| s)),
            Some((partner, partner_reason)) => {
                for (sign, state, verdict) in outcomes {
                    let (reason, failing_branch) = match verdict {
                        Some(r) => (r, sign),
                        None => (partner_reason, partner),
                    };
                    report.rejected.push(Rejection {
                        n,
                        sign,
                        reason,
                        failing_branch,
                        energy: state.map(|s| s.energy),
                    });
                }
                if !report.accepted.is_empty() {
                    report.truncated = false;
                    break;
                }
            }
        }
    }
    Ok(report)
}
