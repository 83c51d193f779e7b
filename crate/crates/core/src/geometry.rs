//! Coordinates, target areas, distances and spatial frequencies.
//!
//! The source sits at the origin, the target area is a rectangle on the
//! ground centred on the x-axis, and the reflecting array hovers at altitude
//! `h` above the horizontal point `(qx, qy)` (its reference element).

use crate::error::{invalid, Result};

/// Samples per rectangle edge used by [`freq_span`] on top of the corners.
pub const EDGE_SAMPLES: usize = 256;

/// Horizontal position and altitude of the reflecting array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub qx: f64,
    pub qy: f64,
    pub h: f64,
}

impl Placement {
    pub fn new(qx: f64, qy: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid(format!("altitude H must be > 0, got {h}")));
        }
        if !qx.is_finite() || !qy.is_finite() {
            return Err(invalid("placement coordinates must be finite"));
        }
        Ok(Self { qx, qy, h })
    }

    /// Squared horizontal norm `||q||²`.
    pub fn horizontal_norm_sq(&self) -> f64 {
        self.qx * self.qx + self.qy * self.qy
    }

    pub fn horizontal_dist_sq(&self, w: GroundPoint) -> f64 {
        let dx = w.x - self.qx;
        let dy = w.y - self.qy;
        dx * dx + dy * dy
    }

    /// Slant distance to a ground point.
    pub fn dist_to(&self, w: GroundPoint) -> f64 {
        (self.h * self.h + self.horizontal_dist_sq(w)).sqrt()
    }
}

/// A point on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Rectangular target area `[x0 - Dx/2, x0 + Dx/2] x [-Dy/2, Dy/2]`.
///
/// `Dx = Dy = 0` is a single point; `Dy = 0` alone is a segment on the x-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetArea {
    pub center_x: f64,
    pub length: f64,
    pub width: f64,
}

impl TargetArea {
    pub fn new(center_x: f64, length: f64, width: f64) -> Result<Self> {
        if !center_x.is_finite() {
            return Err(invalid("area center must be finite"));
        }
        if !(length >= 0.0 && length.is_finite()) {
            return Err(invalid(format!("area length Dx must be >= 0, got {length}")));
        }
        if !(width >= 0.0 && width.is_finite()) {
            return Err(invalid(format!("area width Dy must be >= 0, got {width}")));
        }
        Ok(Self {
            center_x,
            length,
            width,
        })
    }

    pub fn point(w: GroundPoint) -> Self {
        // off-axis points are not representable; callers rotate first
        Self {
            center_x: w.x,
            length: 0.0,
            width: 0.0,
        }
    }

    /// Segment `[x_lo, x_hi]` on the x-axis.
    pub fn segment(x_lo: f64, x_hi: f64) -> Result<Self> {
        if x_hi < x_lo {
            return Err(invalid(format!("segment bounds reversed: [{x_lo}, {x_hi}]")));
        }
        Self::new(0.5 * (x_lo + x_hi), x_hi - x_lo, 0.0)
    }

    pub fn x_range(&self) -> (f64, f64) {
        let half = 0.5 * self.length;
        (self.center_x - half, self.center_x + half)
    }

    pub fn y_range(&self) -> (f64, f64) {
        let half = 0.5 * self.width;
        (-half, half)
    }

    pub fn is_point(&self) -> bool {
        self.length == 0.0 && self.width == 0.0
    }

    pub fn center(&self) -> GroundPoint {
        GroundPoint::new(self.center_x, 0.0)
    }

    pub fn corners(&self) -> [GroundPoint; 4] {
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        [
            GroundPoint::new(x0, y0),
            GroundPoint::new(x1, y0),
            GroundPoint::new(x1, y1),
            GroundPoint::new(x0, y1),
        ]
    }

    /// Closest point of the area to `(x, y)`.
    pub fn clamp(&self, x: f64, y: f64) -> GroundPoint {
        let (x0, x1) = self.x_range();
        let (y0, y1) = self.y_range();
        GroundPoint::new(x.clamp(x0, x1), y.clamp(y0, y1))
    }

    /// Evaluation grid over the area; degenerate dimensions collapse to one
    /// sample.
    pub fn grid(&self, spec: AreaGrid) -> Vec<GroundPoint> {
        let xs = linspace(self.x_range(), if self.length > 0.0 { spec.nx_pts } else { 1 });
        let ys = linspace(self.y_range(), if self.width > 0.0 { spec.ny_pts } else { 1 });
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                out.push(GroundPoint::new(x, y));
            }
        }
        out
    }
}

/// Resolution of the grid used for exact worst-case evaluation over an area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AreaGrid {
    pub nx_pts: usize,
    pub ny_pts: usize,
}

impl AreaGrid {
    pub fn new(nx_pts: usize, ny_pts: usize) -> Result<Self> {
        if nx_pts == 0 || ny_pts == 0 {
            return Err(invalid("area grid needs at least one point per axis"));
        }
        Ok(Self { nx_pts, ny_pts })
    }
}

impl Default for AreaGrid {
    fn default() -> Self {
        Self {
            nx_pts: 101,
            ny_pts: 61,
        }
    }
}

pub(crate) fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            v[n - 1] = hi;
            v
        }
    }
}

/// Spatial frequencies of a propagation direction: `sin(zenith)cos(azimuth)`
/// along x and `sin(zenith)sin(azimuth)` along y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialFrequencies {
    pub phi_bar: f64,
    pub omega_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl SpatialFrequencies {
    pub fn along(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.phi_bar,
            Axis::Y => self.omega_bar,
        }
    }
}

pub fn dist_source_to_airs(q: &Placement) -> f64 {
    (q.h * q.h + q.horizontal_norm_sq()).sqrt()
}

/// Spatial frequencies of the source-to-array arrival direction.
pub fn rx_spatial_freqs(q: &Placement) -> SpatialFrequencies {
    let d = dist_source_to_airs(q);
    SpatialFrequencies {
        phi_bar: q.qx / d,
        omega_bar: q.qy / d,
    }
}

/// Spatial frequencies of the array-to-ground departure direction towards `w`.
pub fn tx_spatial_freqs(q: &Placement, w: GroundPoint) -> SpatialFrequencies {
    let d = q.dist_to(w);
    SpatialFrequencies {
        phi_bar: (w.x - q.qx) / d,
        omega_bar: (w.y - q.qy) / d,
    }
}

/// Offset `(ΔΦ, ΔΩ) = tx - rx` that drives the reflected array factor.
pub fn spatial_offsets(q: &Placement, w: GroundPoint) -> (f64, f64) {
    let rx = rx_spatial_freqs(q);
    let tx = tx_spatial_freqs(q, w);
    (tx.phi_bar - rx.phi_bar, tx.omega_bar - rx.omega_bar)
}

/// Extremes of the spatial-frequency deviation over an area along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqSpan {
    pub delta_min: f64,
    pub delta_max: f64,
}

impl FreqSpan {
    pub fn span(&self) -> f64 {
        self.delta_max - self.delta_min
    }

    pub fn contains(&self, delta: f64) -> bool {
        delta >= self.delta_min && delta <= self.delta_max
    }
}

/// Minimum and maximum of `Φ̄_T - Φ̄_R` (x) or `Ω̄_T - Ω̄_R` (y) over the area.
///
/// Evaluates the corners, [`EDGE_SAMPLES`] points per edge and the two edge
/// points nearest the array's ground projection. Along x the deviation is
/// monotone in `wx` and, on a fixed-`wx` edge, stationary only at `wy = qy`
/// (mirror statement for y), so the extremes lie among these candidates.
pub fn freq_span(q: &Placement, area: &TargetArea, axis: Axis) -> FreqSpan {
    let reference = rx_spatial_freqs(q).along(axis);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |w: GroundPoint| {
        let v = tx_spatial_freqs(q, w).along(axis) - reference;
        lo = lo.min(v);
        hi = hi.max(v);
    };

    let corners = area.corners();
    for c in corners {
        visit(c);
    }
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        for i in 1..=EDGE_SAMPLES {
            let t = i as f64 / (EDGE_SAMPLES + 1) as f64;
            visit(GroundPoint::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    let (x0, x1) = area.x_range();
    let (y0, y1) = area.y_range();
    match axis {
        Axis::X => {
            let y = q.qy.clamp(y0, y1);
            visit(GroundPoint::new(x0, y));
            visit(GroundPoint::new(x1, y));
        }
        Axis::Y => {
            let x = q.qx.clamp(x0, x1);
            visit(GroundPoint::new(x, y0));
            visit(GroundPoint::new(x, y1));
        }
    }
    FreqSpan {
        delta_min: lo,
        delta_max: hi,
    }
}

/// Largest horizontal distance from the array's ground projection to the
/// area; always attained at a corner.
pub fn max_dist_to_area(q: &Placement, area: &TargetArea) -> f64 {
    area.corners()
        .iter()
        .map(|c| q.horizontal_dist_sq(*c))
        .fold(0.0, f64::max)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(qx: f64, qy: f64, h: f64) -> Placement {
        Placement::new(qx, qy, h).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist_source_to_airs(&q(0.0, 0.0, 100.0)), 100.0);
        assert_relative_eq!(dist_source_to_airs(&q(500.0, 0.0, 100.0)), 260_000f64.sqrt());
        assert_relative_eq!(
            dist_source_to_airs(&q(10.1, 0.0, 100.0)),
            100.508756,
            max_relative = 1e-8
        );
    }

    #[test]
    fn rejects_nonpositive_altitude() {
        assert!(Placement::new(0.0, 0.0, 0.0).is_err());
        assert!(Placement::new(0.0, 0.0, -5.0).is_err());
        assert!(TargetArea::new(0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn spatial_frequency_examples() {
        let f = rx_spatial_freqs(&q(0.0, 0.0, 100.0));
        assert_eq!((f.phi_bar, f.omega_bar), (0.0, 0.0));

        let f = rx_spatial_freqs(&q(100.0, 0.0, 100.0));
        assert_relative_eq!(f.phi_bar, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);

        let f = rx_spatial_freqs(&q(300.0, 400.0, 100.0));
        assert_relative_eq!(f.phi_bar, 0.588348, max_relative = 1e-5);
        assert_relative_eq!(f.omega_bar, 0.784465, max_relative = 1e-5);

        let f = tx_spatial_freqs(&q(500.0, 0.0, 100.0), GroundPoint::new(500.0, 0.0));
        assert_eq!((f.phi_bar, f.omega_bar), (0.0, 0.0));

        let f = tx_spatial_freqs(&q(0.0, 0.0, 100.0), GroundPoint::new(100.0, 0.0));
        assert_relative_eq!(f.phi_bar, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);

        let f = tx_spatial_freqs(&q(0.0, 0.0, 100.0), GroundPoint::new(1000.0, 0.0));
        assert_relative_eq!(f.phi_bar, 0.995037, max_relative = 1e-6);
    }

    #[test]
    fn degenerate_area_has_zero_span() {
        let area = TargetArea::point(GroundPoint::new(1000.0, 0.0));
        for qx in [-300.0, 0.0, 10.1, 999.0] {
            for axis in [Axis::X, Axis::Y] {
                let s = freq_span(&q(qx, 0.0, 100.0), &area, axis);
                assert_eq!(s.delta_min, s.delta_max);
            }
        }
    }

    #[test]
    fn segment_span_matches_endpoints() {
        // frozen from a 10^4-sample brute force over the segment
        let area = TargetArea::segment(250.0, 750.0).unwrap();
        let s = freq_span(&q(0.0, 0.0, 100.0), &area, Axis::X);
        assert_relative_eq!(s.delta_min, 0.928476690885259, max_relative = 1e-12);
        assert_relative_eq!(s.delta_max, 0.991227900682635, max_relative = 1e-12);
        assert_relative_eq!(s.span(), 0.062751209797375, max_relative = 1e-10);
    }

    #[test]
    fn y_span_symmetric_on_axis() {
        let area = TargetArea::new(1000.0, 1000.0, 600.0).unwrap();
        for qx in [-200.0, 0.0, 400.0, 1000.0] {
            let s = freq_span(&q(qx, 0.0, 100.0), &area, Axis::Y);
            assert_relative_eq!(s.delta_min, -s.delta_max, max_relative = 1e-14);
        }
    }

    #[test]
    fn max_distance_examples() {
        let area = TargetArea::new(1000.0, 1000.0, 600.0).unwrap();
        assert_relative_eq!(
            max_dist_to_area(&q(1000.0, 0.0, 100.0), &area),
            (500f64 * 500.0 + 300.0 * 300.0).sqrt()
        );
        assert_relative_eq!(
            max_dist_to_area(&q(0.0, 0.0, 100.0), &area),
            1529.705854,
            max_relative = 1e-9
        );
        let pt = TargetArea::point(GroundPoint::new(30.0, 0.0));
        assert_relative_eq!(max_dist_to_area(&q(0.0, 40.0, 100.0), &pt), 50.0);
    }

    #[test]
    fn grid_collapses_degenerate_axes() {
        let seg = TargetArea::segment(100.0, 200.0).unwrap();
        let g = seg.grid(AreaGrid::default());
        assert_eq!(g.len(), 101);
        assert!(g.iter().all(|p| p.y == 0.0));
        assert_eq!(g[0].x, 100.0);
        assert_eq!(g[100].x, 200.0);
        let pt = TargetArea::point(GroundPoint::new(5.0, 0.0));
        assert_eq!(pt.grid(AreaGrid::default()), vec![GroundPoint::new(5.0, 0.0)]);
        let rect = TargetArea::new(1000.0, 1000.0, 600.0).unwrap();
        assert_eq!(rect.grid(AreaGrid::default()).len(), 101 * 61);
    }
}
