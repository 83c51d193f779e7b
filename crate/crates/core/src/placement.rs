//! Array placement: closed form for one target location and a 1-D grid
//! search for worst-case coverage of an area.

use rayon::prelude::*;

use crate::beamform::{approx_worst_gain, plan_flatten_3d, required_subarrays, Design3d};
use crate::channel::{snr_from_gain, ArrayGeometry, RadioParams, SeparableWeights};
use crate::error::{invalid, Result};
use crate::geometry::{freq_span, max_dist_to_area, AreaGrid, Axis, GroundPoint, Placement, TargetArea};

/// Deployment coefficients `ξ*(ρ)`, ascending: `[1/2]` for `ρ ≤ 2`, else
/// `1/2 ∓ sqrt(1/4 - 1/ρ²)`.
pub fn deployment_coefficients(rho: f64) -> Vec<f64> {
    if rho <= 2.0 {
        return vec![0.5];
    }
    let r = (0.25 - 1.0 / (rho * rho)).sqrt();
    vec![0.5 - r, 0.5 + r]
}

/// Closed-form optimum for a single target location.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleOptimum {
    pub rho: f64,
    /// One coefficient for `ρ ≤ 2`, otherwise two, ascending.
    pub xi: Vec<f64>,
    /// `ξ w1` for each coefficient, smallest `qx` first.
    pub candidates: Vec<Placement>,
}

impl SingleOptimum {
    /// Tie-break between equally good candidates: smallest `qx`, then `qy`.
    pub fn best(&self) -> Placement {
        self.candidates[0]
    }
}

/// Minimizer of the cascaded distance product `(H² + ||q - w1||²)(H² + ||q||²)`.
pub fn optimal_placement_single(w1: GroundPoint, h: f64) -> Result<SingleOptimum> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid(format!("altitude H must be > 0, got {h}")));
    }
    let rho = w1.norm() / h;
    let xi = deployment_coefficients(rho);
    let mut candidates = xi
        .iter()
        .map(|&x| Placement::new(x * w1.x, x * w1.y, h))
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| a.qx.total_cmp(&b.qx).then(a.qy.total_cmp(&b.qy)));
    Ok(SingleOptimum { rho, xi, candidates })
}

/// `(H² + ||q - w||²)(H² + ||q||²)`.
pub fn cascaded_distance_product(q: &Placement, w: GroundPoint) -> f64 {
    let h2 = q.h * q.h;
    (h2 + q.horizontal_dist_sq(w)) * (h2 + q.horizontal_norm_sq())
}

/// Optimal single-location SNR
/// `P̄ β0² M N² / ((H² + ξ+²||w1||²)(H² + ξ-²||w1||²))`.
pub fn single_location_snr(w1: GroundPoint, h: f64, n: usize, m: usize, rp: &RadioParams) -> Result<f64> {
    let opt = optimal_placement_single(w1, h)?;
    let r2 = w1.norm() * w1.norm();
    let xi_hi = *opt.xi.last().unwrap_or(&0.5);
    let xi_lo = 1.0 - xi_hi;
    let nf = n as f64;
    let den = (h * h + xi_hi * xi_hi * r2) * (h * h + xi_lo * xi_lo * r2);
    Ok(rp.snr_scale() * rp.ref_gain * rp.ref_gain * m as f64 * nf * nf / den)
}

/// Everything that stays fixed while the placement is optimized.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub altitude: f64,
    pub area: TargetArea,
    pub geometry: ArrayGeometry,
    pub radio: RadioParams,
    /// Points used for exact worst-case evaluation.
    pub grid: AreaGrid,
}

impl Scenario {
    pub fn new(altitude: f64, area: TargetArea, geometry: ArrayGeometry, radio: RadioParams) -> Result<Self> {
        if !(altitude > 0.0 && altitude.is_finite()) {
            return Err(invalid(format!("altitude H must be > 0, got {altitude}")));
        }
        Ok(Self {
            altitude,
            area,
            geometry,
            radio,
            grid: AreaGrid::default(),
        })
    }

    pub fn with_grid(mut self, grid: AreaGrid) -> Self {
        self.grid = grid;
        self
    }

    /// `qy` used for planar arrays. Positions refer to the corner element,
    /// so shifting by half the aperture centres the array on the x-axis.
    pub fn upa_qy(&self) -> f64 {
        -(self.geometry.ny as f64) * self.radio.spacing_y * self.radio.wavelength / 2.0
    }

    /// `qy` convention for the array type: 0 for linear, [`Self::upa_qy`]
    /// for planar arrays.
    pub fn default_qy(&self) -> f64 {
        if self.geometry.is_ula() {
            0.0
        } else {
            self.upa_qy()
        }
    }

    pub fn placement(&self, qx: f64, qy: f64) -> Result<Placement> {
        Placement::new(qx, qy, self.altitude)
    }

    pub fn center_x(&self) -> f64 {
        self.area.center_x
    }
}

/// Grid of candidate `qx` values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRange {
    pub q_min: f64,
    pub q_max: f64,
    pub step: f64,
}

impl SearchRange {
    /// `[-5H, x_c]` at 1 m.
    pub fn default_for(h: f64, area: &TargetArea) -> Self {
        Self {
            q_min: -5.0 * h,
            q_max: area.center_x,
            step: 1.0,
        }
    }

    pub fn validate(&self, area: &TargetArea) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(invalid(format!("search step must be > 0, got {}", self.step)));
        }
        if !(self.q_min < self.q_max) {
            return Err(invalid(format!(
                "empty search range: q_min = {} must be < q_max = {}",
                self.q_min, self.q_max
            )));
        }
        if self.q_max > area.center_x + 1e-9 {
            return Err(invalid(format!(
                "q_max = {} exceeds the area centre x_c = {}",
                self.q_max, area.center_x
            )));
        }
        Ok(())
    }

    /// `q_min + k step` up to `q_max`; `q_max` itself is always included.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.q_max - self.q_min) / self.step + 1e-9).floor() as usize;
        let mut v: Vec<f64> = (0..=count).map(|k| self.q_min + k as f64 * self.step).collect();
        if let Some(&last) = v.last() {
            if self.q_max - last > 1e-9 * self.step.max(1.0) {
                v.push(self.q_max);
            }
        }
        v
    }
}

/// Terms of the placement cost at one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTerms {
    pub qx: f64,
    pub qy: f64,
    pub l_x: usize,
    pub l_y: usize,
    pub span_x: f64,
    pub span_y: f64,
    /// Largest horizontal distance to the area.
    pub d_max: f64,
    /// `(H² + d_max²)(H² + ||q||²)`.
    pub path_product: f64,
    /// `L_x² L_y² (H² + d_max²)(H² + ||q||²)`; lower is better.
    pub cost: f64,
}

fn objective_terms(sc: &Scenario, q: &Placement, use_y: bool) -> ObjectiveTerms {
    let sx = freq_span(q, &sc.area, Axis::X).span();
    let lx = required_subarrays(sx, sc.geometry.nx, sc.radio.spacing_x);
    let (sy, ly) = if use_y {
        let sy = freq_span(q, &sc.area, Axis::Y).span();
        (sy, required_subarrays(sy, sc.geometry.ny, sc.radio.spacing_y))
    } else {
        (0.0, 1)
    };
    let d_max = max_dist_to_area(q, &sc.area);
    let h2 = q.h * q.h;
    let path_product = (h2 + d_max * d_max) * (h2 + q.horizontal_norm_sq());
    let l2 = (lx * lx * ly * ly) as f64;
    ObjectiveTerms {
        qx: q.qx,
        qy: q.qy,
        l_x: lx,
        l_y: ly,
        span_x: sx,
        span_y: sy,
        d_max,
        path_product,
        cost: l2 * path_product,
    }
}

/// Linear-array cost `L*(qx)² (H² + d_max²)(H² + qx²)` at `(qx, 0)`.
pub fn placement_objective_ula(qx: f64, sc: &Scenario) -> Result<f64> {
    Ok(objective_terms_ula(qx, sc)?.cost)
}

pub fn objective_terms_ula(qx: f64, sc: &Scenario) -> Result<ObjectiveTerms> {
    let q = sc.placement(qx, 0.0)?;
    Ok(objective_terms(sc, &q, false))
}

/// Planar-array cost `Lx² Ly² (H² + d_max²)(H² + ||q||²)` at
/// `(qx, `[`Scenario::upa_qy`]`)`.
pub fn placement_objective_upa(qx: f64, sc: &Scenario) -> Result<f64> {
    Ok(objective_terms_upa(qx, sc)?.cost)
}

pub fn objective_terms_upa(qx: f64, sc: &Scenario) -> Result<ObjectiveTerms> {
    let q = sc.placement(qx, sc.upa_qy())?;
    Ok(objective_terms(sc, &q, true))
}

/// Lowest SNR over a set of ground points and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstPoint {
    pub snr: f64,
    pub point: GroundPoint,
}

/// Exact minimum SNR over `points`. Evaluated in parallel; ties resolve to
/// the lowest index so the result does not depend on scheduling.
pub fn worst_snr_over(
    q: &Placement,
    points: &[GroundPoint],
    weights: &SeparableWeights,
    geo: &ArrayGeometry,
    rp: &RadioParams,
) -> Result<WorstPoint> {
    weights.check(geo)?;
    if points.is_empty() {
        return Err(invalid("no evaluation points"));
    }
    let values: Vec<f64> = points
        .par_iter()
        .map(|&w| {
            let (dphi, domega) = crate::geometry::spatial_offsets(q, w);
            snr_from_gain(q, w, weights.gain(rp, dphi, domega), geo, rp)
        })
        .collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    Ok(WorstPoint {
        snr: values[best],
        point: points[best],
    })
}

/// Exact worst-case SNR over the scenario's evaluation grid.
pub fn worst_snr_on_grid(q: &Placement, sc: &Scenario, weights: &SeparableWeights) -> Result<WorstPoint> {
    worst_snr_over(q, &sc.area.grid(sc.grid), weights, &sc.geometry, &sc.radio)
}

/// Approximate worst-case SNR of a flattened design at `q`. An axis with a
/// single element contributes unit gain rather than `4/π²`.
pub fn approx_worst_snr(q: &Placement, sc: &Scenario, l_x: usize, l_y: usize) -> f64 {
    let axis = |n: usize, l: usize| if n == 1 { 1.0 } else { approx_worst_gain(n, l) };
    let gain = axis(sc.geometry.nx, l_x) * axis(sc.geometry.ny, l_y);
    let d_max = max_dist_to_area(q, &sc.area);
    let far = GroundPoint::new(q.qx + d_max, q.qy);
    snr_from_gain(q, far, gain, &sc.geometry, &sc.radio)
}

/// Outcome of a placement design.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementResult {
    pub q_star: Placement,
    /// Exact worst-case SNR over the evaluation grid (linear).
    pub worst_snr: f64,
    /// Where the exact worst case occurs.
    pub worst_point: GroundPoint,
    /// Approximate worst-case SNR from the `4/π²` edge-gain model (linear).
    pub worst_snr_approx: f64,
    pub terms: ObjectiveTerms,
    pub design: Design3d,
    /// `(qx, cost)` for every candidate, in search order.
    pub objective_trace: Vec<(f64, f64)>,
}

impl PlacementResult {
    pub fn l_used(&self) -> (usize, usize) {
        (self.design.plan_x.l, self.design.plan_y.l)
    }

    pub fn span(&self) -> (f64, f64) {
        (self.terms.span_x, self.terms.span_y)
    }
}

/// Flattened design at a given placement with its exact and approximate
/// worst-case SNR.
pub fn evaluate_placement(q: Placement, sc: &Scenario) -> Result<PlacementResult> {
    let design = plan_flatten_3d(&q, &sc.area, &sc.geometry, &sc.radio)?;
    let weights = SeparableWeights::from_phases(&design.theta_x, &design.theta_y);
    let worst = worst_snr_on_grid(&q, sc, &weights)?;
    let terms = objective_terms(sc, &q, !sc.geometry.is_ula());
    let worst_snr_approx = approx_worst_snr(&q, sc, design.plan_x.l, design.plan_y.l);
    Ok(PlacementResult {
        q_star: q,
        worst_snr: worst.snr,
        worst_point: worst.point,
        worst_snr_approx,
        terms,
        design,
        objective_trace: Vec::new(),
    })
}

fn search(
    sc: &Scenario,
    range: &SearchRange,
    terms: impl Fn(f64, &Scenario) -> Result<ObjectiveTerms> + Sync,
) -> Result<PlacementResult> {
    range.validate(&sc.area)?;
    let qs = range.points();
    let costs = qs
        .par_iter()
        .map(|&qx| terms(qx, sc).map(|t| t.cost))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, c) in costs.iter().enumerate() {
        if *c < costs[best] {
            best = i;
        }
    }
    let t = terms(qs[best], sc)?;
    let mut res = evaluate_placement(sc.placement(t.qx, t.qy)?, sc)?;
    res.terms = t;
    res.objective_trace = qs.into_iter().zip(costs).collect();
    Ok(res)
}

/// Grid search of the linear-array cost over `qx`, with `qy = 0`.
pub fn search_placement_ula(sc: &Scenario, range: &SearchRange) -> Result<PlacementResult> {
    if !sc.geometry.is_ula() {
        return Err(invalid(format!(
            "linear-array search needs ny = 1, got ny = {}",
            sc.geometry.ny
        )));
    }
    search(sc, range, objective_terms_ula)
}

/// Grid search of the planar-array cost over `qx`, with `qy` fixed by
/// [`Scenario::upa_qy`].
pub fn search_placement_upa(sc: &Scenario, range: &SearchRange) -> Result<PlacementResult> {
    search(sc, range, objective_terms_upa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamform::conjugate_phases;
    use crate::channel::snr;
    use approx::assert_relative_eq;

    fn rp() -> RadioParams {
        RadioParams::new(0.1, 1e-14, 1e-4, 0.1, 0.1).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(deployment_coefficients(1.0), vec![0.5]);
        assert_eq!(deployment_coefficients(2.0), vec![0.5]);
        let xi = deployment_coefficients(10.0);
        assert_eq!(xi.len(), 2);
        assert!((xi[0] - 0.0101).abs() < 5e-5, "{}", xi[0]);
        assert!((xi[1] - 0.9899).abs() < 5e-5, "{}", xi[1]);
        let just_above = deployment_coefficients(2.0 + 1e-12);
        assert!((just_above[0] - 0.5).abs() < 1e-5 && (just_above[1] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn candidates_are_ordered_and_symmetric() {
        let opt = optimal_placement_single(GroundPoint::new(1000.0, 0.0), 100.0).unwrap();
        assert_relative_eq!(opt.rho, 10.0);
        assert_eq!(opt.candidates.len(), 2);
        assert!(opt.best().qx < opt.candidates[1].qx);
        let w = GroundPoint::new(1000.0, 0.0);
        let a = cascaded_distance_product(&opt.candidates[0], w);
        let b = cascaded_distance_product(&opt.candidates[1], w);
        assert_relative_eq!(a, b, max_relative = 1e-12);
        assert!(optimal_placement_single(w, 0.0).is_err());
    }

    #[test]
    fn closed_form_snr_matches_exact_at_midpoint() {
        let rp = rp();
        let w = GroundPoint::new(150.0, 60.0);
        let geo = ArrayGeometry::ula(64, 64).unwrap();
        let q = optimal_placement_single(w, 100.0).unwrap().best();
        assert_relative_eq!(q.qx, 75.0);
        let exact = snr(&q, w, &conjugate_phases(&q, w, &geo, &rp), &geo, &rp).unwrap();
        let closed = single_location_snr(w, 100.0, 64, 64, &rp).unwrap();
        assert_relative_eq!(exact, closed, max_relative = 1e-10);
    }

    #[test]
    fn doubling_n_adds_six_db() {
        let rp = rp();
        let w = GroundPoint::new(1000.0, 0.0);
        let a = single_location_snr(w, 100.0, 100, 64, &rp).unwrap();
        let b = single_location_snr(w, 100.0, 200, 64, &rp).unwrap();
        assert_relative_eq!(10.0 * (b / a).log10(), 20.0 * 2f64.log10(), epsilon = 1e-12);
    }

    #[test]
    fn search_points_include_both_ends() {
        let r = SearchRange { q_min: -10.0, q_max: 3.5, step: 2.0 };
        let p = r.points();
        assert_eq!(p.first(), Some(&-10.0));
        assert_eq!(p.last(), Some(&3.5));
        assert_eq!(p.len(), 8);
        let area = TargetArea::segment(0.0, 10.0).unwrap();
        assert!(r.validate(&area).is_ok());
        assert!(SearchRange { q_min: 1.0, q_max: 1.0, step: 1.0 }.validate(&area).is_err());
        assert!(SearchRange { q_min: 0.0, q_max: 1.0, step: 0.0 }.validate(&area).is_err());
        assert!(SearchRange { q_min: 0.0, q_max: 6.0, step: 1.0 }.validate(&area).is_err());
    }

    #[test]
    fn objective_is_three_factor_product() {
        let sc = Scenario::new(
            100.0,
            TargetArea::segment(250.0, 750.0).unwrap(),
            ArrayGeometry::ula(256, 64).unwrap(),
            rp(),
        )
        .unwrap();
        let t = objective_terms_ula(0.0, &sc).unwrap();
        // span 0.062751 at q = 0 -> sqrt(1.606) -> L = 2
        assert_eq!(t.l_x, 2);
        assert_relative_eq!(t.d_max, 750.0);
        assert_relative_eq!(t.cost, 4.0 * (1e4 + 750.0 * 750.0) * 1e4, max_relative = 1e-12);
    }

    #[test]
    fn segment_search_finds_left_of_source() {
        let sc = Scenario::new(
            100.0,
            TargetArea::segment(250.0, 750.0).unwrap(),
            ArrayGeometry::ula(256, 64).unwrap(),
            rp(),
        )
        .unwrap();
        let res = search_placement_ula(&sc, &SearchRange::default_for(100.0, &sc.area)).unwrap();
        assert!(res.q_star.qx < 0.0, "q* = {}", res.q_star.qx);
        assert!(res.worst_snr > 0.0);
        let center_cost = res.objective_trace.last().unwrap().1;
        assert!(res.terms.cost <= center_cost);
    }

    #[test]
    fn worst_point_ties_resolve_to_first() {
        let rp = rp();
        let geo = ArrayGeometry::ula(1, 1).unwrap();
        let q = Placement::new(0.0, 0.0, 100.0).unwrap();
        let pts = [
            GroundPoint::new(0.0, 50.0),
            GroundPoint::new(0.0, -50.0),
            GroundPoint::new(0.0, 0.0),
        ];
        let w = SeparableWeights::from_phases(&[0.0], &[0.0]);
        let worst = worst_snr_over(&q, &pts, &w, &geo, &rp).unwrap();
        assert_eq!(worst.point, pts[0]);
    }

    #[test]
    fn ula_search_rejects_planar_geometry() {
        let sc = Scenario::new(
            100.0,
            TargetArea::segment(250.0, 750.0).unwrap(),
            ArrayGeometry::new(16, 4, 64).unwrap(),
            rp(),
        )
        .unwrap();
        assert!(search_placement_ula(&sc, &SearchRange::default_for(100.0, &sc.area)).is_err());
    }
}
