//! Complex coordinate shifts `x -> x - ic` of the scalar and vector potentials.
//!
//! With `S(x) = S0 f(x - ic)` and `V(x) = V0 f(x - ic)` the effective coupling
//! constants stay real, so the shifted potential is shape invariant with the
//! same remainders and the same real spectrum as the unshifted one. The
//! similarity `eta psi(x) = psi(x - ic)` maps each eigenfunction across.
//!
//! The shifted tanh potential is not PT symmetric: `U(x) != conj(U(-x))`
//! whenever `m S0 + E V0 != 0`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{effective_potential_complex, enumerate_spectrum, shape_invariance_defect_complex};
use crate::models::{BoundState, Couplings, Family, ShapeData, SpectrumReport};
use crate::wavefunctions::{default_grid, kg_residual, GridSpec, Residual};

/// Distance kept from the `tanh` poles at `c = +-pi/2`.
pub const TANH_POLE_GUARD: f64 = 0.05;

/// Real coordinate shift `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftParam(f64);

impl ShiftParam {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() {
            Ok(Self(c))
        } else {
            Err(Error::Domain(format!("shift {c} is not finite")))
        }
    }

    /// Shift checked against the pole-free band of `family`.
    pub fn for_family(family: Family, c: f64) -> Result<Self> {
        let shift = Self::new(c)?;
        shift.check(family)?;
        Ok(shift)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn check(self, family: Family) -> Result<()> {
        let limit = FRAC_PI_2 - TANH_POLE_GUARD;
        if family == Family::Tanh && self.0.abs() >= limit {
            return Err(Error::Domain(format!(
                "tanh shift must satisfy |c| < {limit:.6} to stay clear of the poles, got {}",
                self.0
            )));
        }
        Ok(())
    }

    fn point(self, x: f64) -> Complex64 {
        Complex64::new(x, -self.0)
    }
}

/// `U_E(x - ic)`, the effective potential with complex-shifted profile.
pub fn shifted_potential(family: Family, c: &Couplings, energy: f64, shift: ShiftParam, x: f64) -> Result<Complex64> {
    shift.check(family)?;
    Ok(effective_potential_complex(family, c, energy, shift.point(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtDefect {
    /// `max |U(x) - conj(U(-x))|`.
    pub max_abs: f64,
    /// Same, imaginary part only.
    pub max_imag: f64,
}

/// PT-symmetry defect of the shifted potential over a symmetric grid.
pub fn pt_defect(family: Family, c: &Couplings, energy: f64, shift: ShiftParam, grid: GridSpec) -> Result<PtDefect> {
    shift.check(family)?;
    if !grid.is_symmetric() {
        return Err(Error::Domain(format!(
            "PT defect needs a grid symmetric about 0, got {grid}"
        )));
    }
    let mut defect = PtDefect {
        max_abs: 0.0,
        max_imag: 0.0,
    };
    for x in grid.points() {
        let here = effective_potential_complex(family, c, energy, shift.point(x));
        let mirror = effective_potential_complex(family, c, energy, shift.point(-x));
        let diff = here - mirror.conj();
        defect.max_abs = defect.max_abs.max(diff.norm());
        defect.max_imag = defect.max_imag.max(diff.im.abs());
    }
    Ok(defect)
}

/// Residual of `psi(x - ic)` against the shifted equation at the unshifted
/// real energy. Small values certify that the real level survives the shift.
pub fn shifted_residual(state: &BoundState, shift: ShiftParam, grid: GridSpec) -> Result<Residual> {
    shift.check(state.family)?;
    kg_residual(state, grid, shift.value())
}

/// Grid on which `psi(x - ic)` is resolved.
///
/// Any nonzero shift halves the spacing of the unshifted default. For the exp family with `cos c` small or negative, `psi(x - ic)` grows like
/// `exp(-B e^-x cos c)` toward the left, so the left wall is pulled in to
/// `B e^-x = 4` and the spacing refined to `0.002`.
pub fn default_shifted_grid(state: &BoundState, shift: ShiftParam) -> GridSpec {
    let mut base = default_grid(state);
    if shift.value() != 0.0 {
        base.count = 2 * base.count - 1;
    }
    if state.family != Family::Exp || shift.value().cos() >= 0.25 {
        return base;
    }
    let x_min = (state.shape.b / 4.0).ln();
    let count = ((base.x_max - x_min) / 0.002).ceil() as usize + 1;
    GridSpec {
        x_min,
        x_max: base.x_max,
        count: count.max(base.count),
    }
}

/// `max |U+(x - ic; a_1) - U-(x - ic; a_2) - R(a_1)|` over `grid`.
pub fn shifted_shape_invariance_defect(
    family: Family,
    shape: ShapeData,
    shift: ShiftParam,
    grid: &[f64],
) -> Result<f64> {
    shift.check(family)?;
    let points: Vec<Complex64> = grid.iter().map(|&x| shift.point(x)).collect();
    shape_invariance_defect_complex(family, shape, &points)
}

/// Spectrum of the shifted problem. The closed forms do not involve `c`.
pub fn shifted_spectrum(family: Family, c: &Couplings, shift: ShiftParam, n_max_scan: usize) -> Result<SpectrumReport> {
    shift.check(family)?;
    enumerate_spectrum(family, c, n_max_scan)
}

/// `eta psi`, i.e. `z -> psi(z - ic)`.
pub fn eta<F>(psi: F, shift: f64) -> impl Fn(Complex64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    move |z| psi(z - Complex64::new(0.0, shift))
}
