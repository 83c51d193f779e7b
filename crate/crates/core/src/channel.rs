//! Free-space LoS channel gains, reflected array gain and end-to-end SNR.
//!
//! The source applies maximum-ratio transmission towards the array, which
//! is optimal regardless of the destination, so its `M` antennas appear
//! only as the scalar factor `M` in [`snr`].

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{spatial_offsets, GroundPoint, Placement};

/// Wavelength at 2.4 GHz, in meters.
pub const DEFAULT_WAVELENGTH: f64 = 299_792_458.0 / 2.4e9;

/// Radio link parameters. Powers are linear (watts), gains dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub tx_power: f64,
    pub noise_power: f64,
    /// Channel power gain at the 1 m reference distance.
    pub ref_gain: f64,
    /// Element spacing along x in wavelengths.
    pub spacing_x: f64,
    /// Element spacing along y in wavelengths.
    pub spacing_y: f64,
    /// Carrier wavelength in meters; only needed to turn element counts
    /// into a physical aperture.
    pub wavelength: f64,
}

impl RadioParams {
    pub fn new(
        tx_power: f64,
        noise_power: f64,
        ref_gain: f64,
        spacing_x: f64,
        spacing_y: f64,
    ) -> Result<Self> {
        Self {
            tx_power,
            noise_power,
            ref_gain,
            spacing_x,
            spacing_y,
            wavelength: DEFAULT_WAVELENGTH,
        }
        .validated()
    }

    pub fn with_wavelength(mut self, wavelength: f64) -> Result<Self> {
        self.wavelength = wavelength;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return Err(invalid(format!("tx_power must be > 0, got {}", self.tx_power)));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(invalid(format!("noise_power must be > 0, got {}", self.noise_power)));
        }
        if !(self.ref_gain > 0.0 && self.ref_gain.is_finite()) {
            return Err(invalid(format!("ref_gain must be > 0, got {}", self.ref_gain)));
        }
        for (name, v) in [("spacing_x", self.spacing_x), ("spacing_y", self.spacing_y)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(invalid(format!("{name} must lie in (0, 0.5), got {v}")));
            }
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(invalid(format!("wavelength must be > 0, got {}", self.wavelength)));
        }
        Ok(self)
    }

    /// Transmit SNR `P / σ²`.
    pub fn snr_scale(&self) -> f64 {
        self.tx_power / self.noise_power
    }
}

/// Element counts of the reflecting array (`nx` x `ny`) and of the source
/// array (`m`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayGeometry {
    pub nx: usize,
    pub ny: usize,
    pub m: usize,
}

impl ArrayGeometry {
    pub fn new(nx: usize, ny: usize, m: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid(format!("array needs nx, ny >= 1, got {nx} x {ny}")));
        }
        if m == 0 {
            return Err(invalid("source array needs M >= 1"));
        }
        Ok(Self { nx, ny, m })
    }

    pub fn ula(n: usize, m: usize) -> Result<Self> {
        Self::new(n, 1, m)
    }

    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_ula(&self) -> bool {
        self.ny == 1
    }

    /// Flat index of element `(ix, iy)`, both zero-based.
    pub fn flat_index(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }
}

/// Per-element phase shifts, wrapped into `[0, 2π)`, stored row-major in
/// `(x, y)` order (see [`ArrayGeometry::flat_index`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    theta: Vec<f64>,
}

pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance between two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d)
}

impl PhaseProfile {
    pub fn new(theta: impl IntoIterator<Item = f64>) -> Self {
        Self {
            theta: theta.into_iter().map(wrap_phase).collect(),
        }
    }

    /// Outer-sum profile `θ(ix, iy) = θx[ix] + θy[iy]`.
    pub fn separable(theta_x: &[f64], theta_y: &[f64]) -> Self {
        Self::new(
            theta_x
                .iter()
                .flat_map(|&tx| theta_y.iter().map(move |&ty| tx + ty)),
        )
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn check(&self, geo: &ArrayGeometry) -> Result<()> {
        if self.len() != geo.n() {
            return Err(Error::LengthMismatch {
                expected: geo.n(),
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Equal up to a common phase offset, modulo 2π.
    pub fn equivalent_to(&self, other: &PhaseProfile, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let Some((&a0, &b0)) = self.theta.first().zip(other.theta.first()) else {
            return true;
        };
        let offset = a0 - b0;
        self.theta
            .iter()
            .zip(&other.theta)
            .all(|(&a, &b)| phase_distance(a, b + offset) <= tol)
    }
}

/// Source-to-array channel power gain `β0 / (H² + ||q||²)`.
pub fn path_gain_source_airs(q: &Placement, rp: &RadioParams) -> f64 {
    rp.ref_gain / (q.h * q.h + q.horizontal_norm_sq())
}

/// Array-to-destination channel power gain `β0 / (H² + ||q - w||²)`.
pub fn path_gain_airs_dest(q: &Placement, w: GroundPoint, rp: &RadioParams) -> f64 {
    rp.ref_gain / (q.h * q.h + q.horizontal_dist_sq(w))
}

/// Complex linear array factor `Σ_k c_k e^{j2π k d̄ Δ}`.
pub fn linear_array_factor(coeffs: &[Complex64], spacing: f64, delta: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, TAU * spacing * delta);
    let mut steer = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in coeffs.iter().enumerate() {
        acc += c * steer;
        steer *= step;
        // re-anchor periodically so the recurrence does not drift
        if k % 64 == 63 {
            steer = Complex64::from_polar(1.0, TAU * spacing * delta * (k + 1) as f64);
        }
    }
    acc
}

/// Array gain `|Σ e^{j(θ_n + 2π(nx-1)d̄x ΔΦ + 2π(ny-1)d̄y ΔΩ)}|²` for given
/// spatial-frequency offsets.
pub fn array_gain_at_offset(
    phases: &PhaseProfile,
    geo: &ArrayGeometry,
    rp: &RadioParams,
    delta_phi: f64,
    delta_omega: f64,
) -> Result<f64> {
    phases.check(geo)?;
    let theta = phases.as_slice();
    let mut acc = Complex64::new(0.0, 0.0);
    for ix in 0..geo.nx {
        for iy in 0..geo.ny {
            let arg = theta[geo.flat_index(ix, iy)]
                + TAU * (ix as f64 * rp.spacing_x * delta_phi + iy as f64 * rp.spacing_y * delta_omega);
            acc += Complex64::from_polar(1.0, arg);
        }
    }
    Ok(acc.norm_sqr())
}

/// Reflected array gain at ground point `w`; lies in `[0, N²]`.
pub fn array_gain(
    q: &Placement,
    w: GroundPoint,
    phases: &PhaseProfile,
    geo: &ArrayGeometry,
    rp: &RadioParams,
) -> Result<f64> {
    let (dphi, domega) = spatial_offsets(q, w);
    array_gain_at_offset(phases, geo, rp, dphi, domega)
}

/// Converts an array gain into received SNR at `w`:
/// `P̄ β0² M g / ((H² + ||q - w||²)(H² + ||q||²))`.
pub fn snr_from_gain(
    q: &Placement,
    w: GroundPoint,
    gain: f64,
    geo: &ArrayGeometry,
    rp: &RadioParams,
) -> f64 {
    rp.snr_scale()
        * geo.m as f64
        * path_gain_source_airs(q, rp)
        * path_gain_airs_dest(q, w, rp)
        * gain
}

/// Linear received SNR at `w` for an arbitrary phase profile.
pub fn snr(
    q: &Placement,
    w: GroundPoint,
    phases: &PhaseProfile,
    geo: &ArrayGeometry,
    rp: &RadioParams,
) -> Result<f64> {
    let g = array_gain(q, w, phases, geo, rp)?;
    Ok(snr_from_gain(q, w, g, geo, rp))
}

/// SNR for a separable profile `θ(ix, iy) = θx[ix] + θy[iy]`, evaluated as
/// the product of the two linear array gains.
pub fn snr_separable(
    q: &Placement,
    w: GroundPoint,
    theta_x: &[f64],
    theta_y: &[f64],
    geo: &ArrayGeometry,
    rp: &RadioParams,
) -> Result<f64> {
    let weights = SeparableWeights::from_phases(theta_x, theta_y);
    weights.check(geo)?;
    let (dphi, domega) = spatial_offsets(q, w);
    let g = weights.gain(rp, dphi, domega);
    Ok(snr_from_gain(q, w, g, geo, rp))
}

/// Element weights of the form `c(ix, iy) = x[ix] * y[iy]`.
///
/// Covers every design in this crate: phase-only separable profiles
/// (unit-modulus entries) and block deactivation (zero entries).
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableWeights {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

impl SeparableWeights {
    pub fn from_phases(theta_x: &[f64], theta_y: &[f64]) -> Self {
        let unit = |t: &f64| Complex64::from_polar(1.0, *t);
        Self {
            x: theta_x.iter().map(unit).collect(),
            y: theta_y.iter().map(unit).collect(),
        }
    }

    pub fn check(&self, geo: &ArrayGeometry) -> Result<()> {
        if self.x.len() != geo.nx || self.y.len() != geo.ny {
            return Err(Error::LengthMismatch {
                expected: geo.n(),
                got: self.x.len() * self.y.len(),
            });
        }
        Ok(())
    }

    pub fn gain(&self, rp: &RadioParams, delta_phi: f64, delta_omega: f64) -> f64 {
        linear_array_factor(&self.x, rp.spacing_x, delta_phi).norm_sqr()
            * linear_array_factor(&self.y, rp.spacing_y, delta_omega).norm_sqr()
    }

    pub fn is_unit_modulus(&self, tol: f64) -> bool {
        self.x
            .iter()
            .chain(&self.y)
            .all(|c| (c.norm() - 1.0).abs() <= tol)
    }

    /// Number of elements with non-zero weight.
    pub fn active_elements(&self) -> usize {
        let nz = |v: &[Complex64]| v.iter().filter(|c| c.norm() > 0.0).count();
        nz(&self.x) * nz(&self.y)
    }

    /// Full per-element phase profile (ignores amplitudes).
    pub fn to_profile(&self) -> PhaseProfile {
        let tx: Vec<f64> = self.x.iter().map(|c| c.arg()).collect();
        let ty: Vec<f64> = self.y.iter().map(|c| c.arg()).collect();
        PhaseProfile::separable(&tx, &ty)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rp() -> RadioParams {
        RadioParams::new(0.1, 1e-14, 1e-4, 0.1, 0.1).unwrap()
    }

    fn q(qx: f64, qy: f64) -> Placement {
        Placement::new(qx, qy, 100.0).unwrap()
    }

    #[test]
    fn path_gain_examples() {
        let rp = rp();
        assert_relative_eq!(path_gain_source_airs(&q(0.0, 0.0), &rp), 1e-8, max_relative = 1e-14);
        assert_relative_eq!(
            path_gain_source_airs(&q(500.0, 0.0), &rp),
            1e-4 / 260_000.0,
            max_relative = 1e-14
        );
        assert!(path_gain_source_airs(&q(100.0, 0.0), &rp) > path_gain_source_airs(&q(200.0, 0.0), &rp));

        let w = GroundPoint::new(40.0, -7.0);
        assert_relative_eq!(path_gain_airs_dest(&q(40.0, -7.0), w, &rp), 1e-8, max_relative = 1e-14);
        assert_relative_eq!(
            path_gain_airs_dest(&q(10.1, 0.0), GroundPoint::new(1000.0, 0.0), &rp),
            1.0102009995918688e-10,
            max_relative = 1e-6
        );
        // distance symmetry
        let a = path_gain_airs_dest(&q(10.0, 20.0), GroundPoint::new(300.0, -5.0), &rp);
        let b = path_gain_airs_dest(&q(300.0, -5.0), GroundPoint::new(10.0, 20.0), &rp);
        assert_relative_eq!(a, b, max_relative = 1e-15);
    }

    #[test]
    fn four_element_gain_matches_direct_sum() {
        // 4-term complex sum evaluated independently: 14.11797757985566
        let geo = ArrayGeometry::ula(4, 1).unwrap();
        let p = PhaseProfile::new(vec![0.0; 4]);
        let g = array_gain_at_offset(&p, &geo, &rp(), 0.5, 0.0).unwrap();
        assert_relative_eq!(g, 14.11797757985566, max_relative = 1e-12);
    }

    #[test]
    fn broadside_gain_is_n_squared() {
        let geo = ArrayGeometry::new(8, 5, 1).unwrap();
        let p = PhaseProfile::new(vec![0.0; 40]);
        let g = array_gain(&q(0.0, 0.0), GroundPoint::new(0.0, 0.0), &p, &geo, &rp()).unwrap();
        assert_relative_eq!(g, 1600.0, max_relative = 1e-12);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let geo = ArrayGeometry::ula(4, 1).unwrap();
        let p = PhaseProfile::new(vec![0.0; 3]);
        let e = array_gain(&q(0.0, 0.0), GroundPoint::new(1.0, 0.0), &p, &geo, &rp()).unwrap_err();
        assert_eq!(e, Error::LengthMismatch { expected: 4, got: 3 });
    }

    #[test]
    fn separable_null_along_y() {
        let rp = rp();
        let w = SeparableWeights::from_phases(&[0.0; 8], &[0.0; 8]);
        let g = w.gain(&rp, 0.0, 1.0 / (8.0 * rp.spacing_y));
        assert!(g < 1e-20, "gain {g}");
    }

    #[test]
    fn radio_params_reject_bad_ranges() {
        assert!(RadioParams::new(0.0, 1e-14, 1e-4, 0.1, 0.1).is_err());
        assert!(RadioParams::new(0.1, 0.0, 1e-4, 0.1, 0.1).is_err());
        assert!(RadioParams::new(0.1, 1e-14, 0.0, 0.1, 0.1).is_err());
        assert!(RadioParams::new(0.1, 1e-14, 1e-4, 0.5, 0.1).is_err());
        assert!(RadioParams::new(0.1, 1e-14, 1e-4, 0.1, 0.0).is_err());
        assert!(ArrayGeometry::new(0, 1, 1).is_err());
        assert!(ArrayGeometry::new(1, 1, 0).is_err());
    }

    #[test]
    fn wrap_phase_stays_in_range() {
        for t in [-1e-17, -TAU, TAU, 3.0 * TAU + 0.5, -0.25] {
            let w = wrap_phase(t);
            assert!((0.0..TAU).contains(&w), "{t} -> {w}");
        }
        assert!(phase_distance(0.0, TAU - 1e-12) < 1e-11);
    }

    #[test]
    fn array_factor_recurrence_is_accurate() {
        let coeffs: Vec<Complex64> = (0..1000).map(|k| Complex64::from_polar(1.0, 0.37 * k as f64)).collect();
        let fast = linear_array_factor(&coeffs, 0.1, 0.731);
        let direct: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, TAU * 0.1 * 0.731 * k as f64))
            .sum();
        assert!((fast - direct).norm() < 1e-10);
    }
}
