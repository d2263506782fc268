//! Closed-form eigenfunctions, grid sampling and residual checks.
//!
//! ```text
//! tanh:   (1 - tanh x)^(s1/2) (1 + tanh x)^(s2/2) P_n^(s1,s2)(tanh x)
//! exp:    z^(A-n) exp(-z/2) L_n^(2A-2n)(z),          z = 2 B exp(-x)
//! linear: exp(-y^2/2) H_n(y),                        y = sqrt(A) (x + B/A)
//! ```
//!
//! Values are unnormalized. All three accept complex arguments so the same
//! code evaluates `psi(x - ic)` for shifted potentials.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{superpotential_complex, BoundState, Family, ShapeData};
use crate::specfun::{hermite_eval, jacobi_eval, laguerre_eval, PolyArg};

/// Below this `ln|psi|` the value is flushed to zero.
const LOG_UNDERFLOW: f64 = -740.0;

/// Noise floor for node counting, relative to `max|psi|`.
pub const NODE_NOISE_FLOOR: f64 = 1e-8;

/// `h^2 max|K|` above which a residual is flagged as truncation dominated.
pub const COARSE_GRID_THRESHOLD: f64 = 0.1;

/// Uniform grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::Domain(format!(
                "grid needs finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if count < 3 {
            return Err(Error::Domain(format!("grid needs at least 3 points, got {count}")));
        }
        Ok(Self { x_min, x_max, count })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.x_min, self.x_max, self.count)
    }
}

/// Parses `"min:max:count"`.
impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Domain(format!("grid '{s}' is not of the form min:max:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let x_min = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let x_max = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        Self::new(x_min, x_max, count)
    }
}

/// One wavefunction value; `clamped` marks a flushed underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub value: Complex64,
    pub clamped: bool,
}

impl PsiValue {
    fn from_log(log_psi: Complex64, poly: impl FnOnce() -> Result<Complex64>) -> Result<Self> {
        if !(log_psi.re > LOG_UNDERFLOW) || !log_psi.im.is_finite() {
            return Ok(Self {
                value: Complex64::new(0.0, 0.0),
                clamped: true,
            });
        }
        let value = log_psi.exp() * poly()?;
        if value.re.is_finite() && value.im.is_finite() {
            Ok(Self { value, clamped: false })
        } else {
            Ok(Self {
                value: Complex64::new(0.0, 0.0),
                clamped: true,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionSamples {
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
    pub state: BoundState,
    /// Imaginary coordinate shift `c`; samples are `psi(x - ic)`.
    pub shift: f64,
    pub normalized: bool,
    /// Number of points flushed to zero on underflow.
    pub clamped: usize,
}

impl WavefunctionSamples {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Trapezoid estimate of the integral of `|psi|^2`.
    pub fn norm_squared(&self) -> f64 {
        trapezoid(self.grid.spacing(), self.values.iter().map(|v| v.norm_sqr()))
    }
}

fn trapezoid(h: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let len = values.len();
    values
        .enumerate()
        .map(|(i, v)| if i == 0 || i + 1 == len { 0.5 * v } else { v })
        .sum::<f64>()
        * h
}

/// `Log(1 + e^w)` on the principal branch, for `|Im w| < pi`.
fn log1p_exp(w: Complex64) -> Complex64 {
    if w.re > 0.0 {
        w + ((-w).exp() + 1.0).ln()
    } else {
        (w.exp() + 1.0).ln()
    }
}

/// Closed-form eigenfunction of index `n` in the hierarchy with parameters `shape`.
pub(crate) fn closed_form(family: Family, shape: ShapeData, n: usize, z: Complex64) -> Result<PsiValue> {
    let ShapeData { a, b } = shape;
    let k = a - n as f64;
    match family {
        Family::Tanh => {
            let s1 = k + b / k;
            let s2 = k - b / k;
            // 1 -+ tanh z = 2 / (1 + e^(+-2z)); keeps the tails accurate.
            let log_minus = Complex64::new(LN_2, 0.0) - log1p_exp(z * 2.0);
            let log_plus = Complex64::new(LN_2, 0.0) - log1p_exp(z * -2.0);
            let log_psi = log_minus * (s1 / 2.0) + log_plus * (s2 / 2.0);
            PsiValue::from_log(log_psi, || jacobi_eval(n, s1, s2, PolyArg::new(z.tanh())?))
        }
        Family::Exp => {
            let t = (-z).exp();
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Ok(PsiValue {
                    value: Complex64::new(0.0, 0.0),
                    clamped: true,
                });
            }
            let log_psi = (Complex64::new((2.0 * b).ln(), 0.0) - z) * k - t * b;
            PsiValue::from_log(log_psi, || laguerre_eval(n, 2.0 * k, PolyArg::new(t * (2.0 * b))?))
        }
        Family::Linear => {
            let y = (z + b / a) * a.sqrt();
            let log_psi = -(y * y) / 2.0;
            PsiValue::from_log(log_psi, || hermite_eval(n, PolyArg::new(y)?))
        }
    }
}

/// Unnormalized `psi_n(z)` of a solved level, principal branch for
/// non-integer powers. Underflow in the forbidden tails is flushed to zero.
pub fn eval_wavefunction(state: &BoundState, z: Complex64) -> Result<PsiValue> {
    closed_form(state.family, state.shape, state.n, z)
}

pub(crate) fn sample_shifted(state: &BoundState, grid: GridSpec, shift: f64) -> Result<WavefunctionSamples> {
    let mut values = Vec::with_capacity(grid.count);
    let mut clamped = 0;
    for x in grid.points() {
        let psi = eval_wavefunction(state, Complex64::new(x, -shift))?;
        clamped += psi.clamped as usize;
        values.push(psi.value);
    }
    Ok(WavefunctionSamples {
        grid,
        values,
        state: *state,
        shift,
        normalized: false,
        clamped,
    })
}

/// Samples `psi` on the real line.
pub fn sample(state: &BoundState, grid: GridSpec) -> Result<WavefunctionSamples> {
    sample_shifted(state, grid, 0.0)
}

/// Rescale so the trapezoid integral of `|psi|^2` is one.
pub fn normalize(samples: &WavefunctionSamples) -> Result<WavefunctionSamples> {
    let norm = samples.norm_squared();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "cannot normalize: integral of |psi|^2 is {norm}"
        )));
    }
    let scale = norm.sqrt().recip();
    Ok(WavefunctionSamples {
        values: samples.values.iter().map(|v| v * scale).collect(),
        normalized: true,
        ..samples.clone()
    })
}

/// Default sampling window: the classical region plus several decay lengths.
pub fn default_grid(state: &BoundState) -> GridSpec {
    const POINTS: usize = 4001;
    let ShapeData { a, b } = state.shape;
    let (lo, hi) = match state.family {
        Family::Tanh => (-15.0, 15.0),
        Family::Exp => (-2.0 - b.max(1.0).ln(), 20.0 / state.epsilon().abs().sqrt().max(0.3)),
        Family::Linear => {
            let center = -b / a;
            let half = linear_half_width(state.n) / a.sqrt();
            (center - half, center + half)
        }
    };
    let count = match state.family {
        Family::Linear => {
            // Hold the residual near its n = 2 value; the window grows with the turning point.
            let level = ((2 * state.n + 1) as f64 / 5.0).max(1.0).powf(0.75);
            let width = linear_half_width(state.n) / 10.0;
            ((POINTS - 1) as f64 * level * width).ceil() as usize + 1
        }
        _ => POINTS,
    };
    GridSpec {
        x_min: lo,
        x_max: hi,
        count,
    }
}

/// Half-width in `y = sqrt(A) (x + B/A)`: the turning point `sqrt(2n + 1)` plus
/// seven units, never below ten.
fn linear_half_width(n: usize) -> f64 {
    (((2 * n + 1) as f64).sqrt() + 7.0).max(10.0)
}

/// Finite-difference residual of the Klein-Gordon equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `max |-psi'' + K psi| / max |psi|` over interior points.
    pub value: f64,
    /// `h^2 max|K|` over the region where `psi` is not negligible.
    pub resolution: f64,
    /// Set when `resolution` exceeds [`COARSE_GRID_THRESHOLD`].
    pub coarse: bool,
    pub clamped: usize,
}

/// Residual of `-psi'' + [(m + S)^2 - (E - V)^2] psi = 0` at `x - ic`.
pub(crate) fn kg_residual(state: &BoundState, grid: GridSpec, shift: f64) -> Result<Residual> {
    let samples = sample_shifted(state, grid, shift)?;
    let peak = samples.max_abs();
    if !(peak > 0.0) {
        return Err(Error::Degenerate("wavefunction vanishes on the whole grid".into()));
    }
    let c = state.couplings;
    let h = grid.spacing();
    let coefficient = |x: f64| {
        let f = state.family.profile_complex(Complex64::new(x, -shift));
        let mass = f * c.s0 + c.m;
        let energy = Complex64::new(state.energy, 0.0) - f * c.v0;
        mass * mass - energy * energy
    };
    let psi = &samples.values;
    let mut worst = 0.0f64;
    let mut resolution = 0.0f64;
    for i in 1..grid.count - 1 {
        let k = coefficient(grid.point(i));
        let second = (psi[i + 1] - psi[i] * 2.0 + psi[i - 1]) / (h * h);
        worst = worst.max((-second + k * psi[i]).norm());
        if psi[i].norm() >= 1e-6 * peak {
            resolution = resolution.max(h * h * k.norm());
        }
    }
    Ok(Residual {
        value: worst / peak,
        resolution,
        coarse: resolution > COARSE_GRID_THRESHOLD,
        clamped: samples.clamped,
    })
}

/// Relative finite-difference residual of the closed form on `grid`.
pub fn ode_residual(state: &BoundState, grid: GridSpec) -> Result<Residual> {
    kg_residual(state, grid, 0.0)
}

/// Strict sign changes of `Re psi`, ignoring points below the noise floor.
pub fn node_count(samples: &WavefunctionSamples) -> usize {
    let floor = NODE_NOISE_FLOOR * samples.max_abs();
    let mut last: Option<bool> = None;
    let mut nodes = 0;
    for v in &samples.values[1..samples.values.len() - 1] {
        if v.re.abs() <= floor {
            continue;
        }
        let positive = v.re > 0.0;
        if last.is_some_and(|p| p != positive) {
            nodes += 1;
        }
        last = Some(positive);
    }
    nodes
}

/// `A^dagger(x; a_1) psi_0(x; a_2)` with `A^dagger = -d/dx + W(x; a_1)`.
///
/// Uses `psi_0' = -W(a_2) psi_0`, so no numerical derivative is involved.
/// Up to a constant this is the first excited state of the `a_1` hierarchy.
pub fn raise_ground_state(family: Family, shape: ShapeData, z: Complex64) -> Result<Complex64> {
    let next = shape.next(family);
    let ground = closed_form(family, next, 0, z)?.value;
    let w1 = superpotential_complex(family, shape, z);
    let w2 = superpotential_complex(family, next, z);
    Ok((w1 + w2) * ground)
}
