//! Passive phase-profile synthesis.
//!
//! A linear array of `N` elements is split into `L` contiguous sub-arrays.
//! Sub-array `l` is steered to `Φ̄_l`, and the steering frequencies are spaced
//! one sub-beam width `1/(Ns d̄)` apart, so the sub-beams tile the required
//! spatial-frequency interval. The common phases `α_l` align neighbouring
//! sub-beams at their crossing points so the combined main lobe is flat.
//! Planar arrays use one such plan per axis and add the two phase ramps.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::channel::{ArrayGeometry, PhaseProfile, RadioParams};
use crate::error::{invalid, Result};
use crate::geometry::{freq_span, spatial_offsets, Axis, FreqSpan, GroundPoint, Placement, TargetArea};

/// Threshold on `|sin(π d̄ Δ)|` below which the Dirichlet kernel is replaced
/// by its limit.
const SINGULAR_EPS: f64 = 1e-12;

/// Slack for `ceil` so that products landing on an integer up to rounding
/// error do not get bumped to the next count.
const CEIL_SLACK: f64 = 1e-9;

/// Conjugate phases that align every element at `w`:
/// `θ(ix, iy) = -2π ix d̄x ΔΦ - 2π iy d̄y ΔΩ`, common phase 0.
pub fn conjugate_phases(q: &Placement, w: GroundPoint, geo: &ArrayGeometry, rp: &RadioParams) -> PhaseProfile {
    let (dphi, domega) = spatial_offsets(q, w);
    PhaseProfile::separable(
        &steering_phases(geo.nx, rp.spacing_x, dphi),
        &steering_phases(geo.ny, rp.spacing_y, domega),
    )
}

/// Linear ramp `-2π i d̄ Δ`, `i = 0..n`, pointing a linear array at `Δ`.
pub fn steering_phases(n: usize, spacing: f64, delta: f64) -> Vec<f64> {
    (0..n).map(|i| -TAU * i as f64 * spacing * delta).collect()
}

/// Dirichlet kernel `sin(π n x) / sin(π x)`, with the removable
/// singularities at integer `x` replaced by `n(-1)^{k(n-1)}`.
fn dirichlet(n: usize, x: f64) -> f64 {
    let den = (PI * x).sin();
    if den.abs() < SINGULAR_EPS {
        let k = x.round() as i64;
        let odd = (k.rem_euclid(2) == 1) && n.is_multiple_of(2);
        return if odd { -(n as f64) } else { n as f64 };
    }
    (PI * n as f64 * x).sin() / den
}

/// Amplitude pattern `s(Δ) = sin(π Ns d̄ Δ) / sin(π d̄ Δ)` of one uniformly
/// phased sub-array. Signed; its square is the sub-array gain.
pub fn single_beam_pattern(ns: usize, spacing: f64, delta: f64) -> f64 {
    dirichlet(ns, spacing * delta)
}

/// Sub-array partition and steering for one array axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenPlan {
    /// Number of sub-arrays.
    pub l: usize,
    /// Nominal elements per sub-array, `⌊N/L⌋`.
    pub ns: usize,
    /// Total element count along this axis.
    pub n: usize,
    /// Steering frequency `Φ̄_l` of each sub-array.
    pub steer_freqs: Vec<f64>,
    /// Common phase `α_l` of each sub-array.
    pub common_phases: Vec<f64>,
    pub delta_min: f64,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

impl FlattenPlan {
    /// Actual size of each sub-array; the first `N mod L` carry one extra
    /// element.
    pub fn subarray_sizes(&self) -> Vec<usize> {
        let extra = self.n % self.l;
        (0..self.l).map(|l| self.ns + usize::from(l < extra)).collect()
    }

    /// Width `1/(Ns d̄)` credited to one sub-beam.
    pub fn beamwidth(&self) -> f64 {
        1.0 / (self.ns as f64 * self.spacing)
    }

    /// Interval `[Φ̄_1 - w/2, Φ̄_L + w/2]` tiled by the sub-beams.
    pub fn coverage(&self) -> FreqSpan {
        let half = 0.5 * self.beamwidth();
        FreqSpan {
            delta_min: self.steer_freqs[0] - half,
            delta_max: self.steer_freqs[self.l - 1] + half,
        }
    }
}

/// Smallest sub-array count whose tiling covers `span`:
/// `max(1, ⌈sqrt(span N d̄)⌉)`, capped at `N`.
pub fn required_subarrays(span: f64, n: usize, spacing: f64) -> usize {
    let x = (span.max(0.0) * n as f64 * spacing).sqrt();
    let l = (x - CEIL_SLACK).ceil().max(1.0) as usize;
    l.min(n.max(1))
}

/// Plan with a fixed number of sub-arrays, anchored at `delta_min`.
///
/// `Φ̄_l = δmin + (2l-1)/(2 Ns d̄)` and
/// `α_l = -(2π Ns d̄ δmin + π + π/Ns) l` for `l = 1..L`.
pub fn plan_with_subarrays(delta_min: f64, l: usize, n: usize, spacing: f64) -> Result<FlattenPlan> {
    if n == 0 {
        return Err(invalid("flatten plan needs N >= 1"));
    }
    if l == 0 || l > n {
        return Err(invalid(format!("sub-array count must lie in 1..={n}, got {l}")));
    }
    check_spacing(spacing)?;
    if !delta_min.is_finite() {
        return Err(invalid(format!("delta_min must be finite, got {delta_min}")));
    }
    let ns = n / l;
    let nsf = ns as f64;
    let step = 1.0 / (nsf * spacing);
    let slope = TAU * nsf * spacing * delta_min + PI + PI / nsf;
    let steer_freqs = (1..=l).map(|k| delta_min + (k as f64 - 0.5) * step).collect();
    let common_phases = (1..=l).map(|k| -slope * k as f64).collect();
    Ok(FlattenPlan {
        l,
        ns,
        n,
        steer_freqs,
        common_phases,
        delta_min,
        spacing,
    })
}

/// Broadened and flattened beam covering `[delta_min, delta_max]` with the
/// fewest sub-arrays.
///
/// A zero-width interval gets the whole array steered straight at it, i.e.
/// the conjugate design.
pub fn plan_flatten_1d(delta_min: f64, delta_max: f64, n: usize, spacing: f64) -> Result<FlattenPlan> {
    if !(delta_max >= delta_min) {
        return Err(invalid(format!(
            "delta_max ({delta_max}) must be >= delta_min ({delta_min})"
        )));
    }
    if n == 0 {
        return Err(invalid("flatten plan needs N >= 1"));
    }
    check_spacing(spacing)?;
    if delta_max > delta_min {
        let l = required_subarrays(delta_max - delta_min, n, spacing);
        return plan_with_subarrays(delta_min, l, n, spacing);
    }
    Ok(FlattenPlan {
        l: 1,
        ns: n,
        n,
        steer_freqs: vec![delta_min],
        common_phases: vec![0.0],
        delta_min,
        spacing,
    })
}

fn check_spacing(spacing: f64) -> Result<()> {
    if spacing > 0.0 && spacing < 0.5 {
        Ok(())
    } else {
        Err(invalid(format!("element spacing must lie in (0, 0.5), got {spacing}")))
    }
}

/// Element phases of a plan: element `i` (from 0) of sub-array `l` carries
/// `α_l - 2π i d̄ Φ̄_l`. Not wrapped.
pub fn phases_from_plan(plan: &FlattenPlan) -> Vec<f64> {
    let mut out = Vec::with_capacity(plan.n);
    for (l, size) in plan.subarray_sizes().into_iter().enumerate() {
        let alpha = plan.common_phases[l];
        let phi = plan.steer_freqs[l];
        out.extend((0..size).map(|i| alpha - TAU * i as f64 * plan.spacing * phi));
    }
    out
}

/// Array gain of the plan's profile at offset `Δ`, summed per sub-array in
/// closed form rather than per element.
pub fn flattened_pattern_gain(plan: &FlattenPlan, delta: f64) -> f64 {
    let d = plan.spacing;
    let mut offset = 0usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for (l, size) in plan.subarray_sizes().into_iter().enumerate() {
        let dev = delta - plan.steer_freqs[l];
        let arg = plan.common_phases[l]
            + TAU * offset as f64 * d * delta
            + PI * (size as f64 - 1.0) * d * dev;
        acc += Complex64::from_polar(dirichlet(size, d * dev), arg);
        offset += size;
    }
    acc.norm_sqr()
}

/// Approximate worst-case gain `(4/π²) N²/L²` of a flattened linear array.
pub fn approx_worst_gain(n: usize, l: usize) -> f64 {
    let r = n as f64 / l as f64;
    r * r / (FRAC_PI_2 * FRAC_PI_2)
}

/// Separable planar design: one plan per axis and the combined profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Design3d {
    pub plan_x: FlattenPlan,
    pub plan_y: FlattenPlan,
    pub theta_x: Vec<f64>,
    pub theta_y: Vec<f64>,
    pub phases: PhaseProfile,
}

impl Design3d {
    /// Approximate worst-case gain `(16/π⁴)(Nx/Lx)²(Ny/Ly)²` over the area.
    pub fn approx_worst_gain(&self) -> f64 {
        approx_worst_gain(self.plan_x.n, self.plan_x.l) * approx_worst_gain(self.plan_y.n, self.plan_y.l)
    }
}

/// Per-axis flattening for the area seen from `q`, combined by summing the
/// x and y phase ramps.
pub fn plan_flatten_3d(q: &Placement, area: &TargetArea, geo: &ArrayGeometry, rp: &RadioParams) -> Result<Design3d> {
    let sx = freq_span(q, area, Axis::X);
    let sy = freq_span(q, area, Axis::Y);
    let plan_x = plan_flatten_1d(sx.delta_min, sx.delta_max, geo.nx, rp.spacing_x)?;
    let plan_y = plan_flatten_1d(sy.delta_min, sy.delta_max, geo.ny, rp.spacing_y)?;
    let theta_x = phases_from_plan(&plan_x);
    let theta_y = phases_from_plan(&plan_y);
    let phases = PhaseProfile::separable(&theta_x, &theta_y);
    Ok(Design3d {
        plan_x,
        plan_y,
        theta_x,
        theta_y,
        phases,
    })
}
