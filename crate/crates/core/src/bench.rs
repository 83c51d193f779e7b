//! Benchmark schemes and the figure-reproduction experiments.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::beamform::{
    conjugate_phases, flattened_pattern_gain, phases_from_plan, plan_flatten_1d, plan_with_subarrays,
    required_subarrays, steering_phases,
};
use crate::channel::{snr, ArrayGeometry, RadioParams, SeparableWeights};
use crate::error::{invalid, Error, Result};
use crate::geometry::{freq_span, AreaGrid, Axis, GroundPoint, Placement, TargetArea};
use crate::placement::{
    deployment_coefficients, evaluate_placement, objective_terms_ula, optimal_placement_single,
    search_placement_ula, search_placement_upa, worst_snr_on_grid, PlacementResult, Scenario, SearchRange,
    WorstPoint,
};
use crate::units::{dbm_to_watts, linear_to_db};

/// Non-proposed design evaluated exactly on the area grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    /// Per-axis element weights; zero entries are switched-off elements.
    pub weights: SeparableWeights,
    pub worst: WorstPoint,
}

/// One-dimensional beamforming on a planar array: the x-axis flattening
/// plan is applied to every row and all rows share it (`θ(ix, iy) = θx[ix]`).
pub fn benchmark_1d_on_upa(q: &Placement, sc: &Scenario) -> Result<BenchOutcome> {
    let sx = freq_span(q, &sc.area, Axis::X);
    let plan = plan_flatten_1d(sx.delta_min, sx.delta_max, sc.geometry.nx, sc.radio.spacing_x)?;
    let weights = SeparableWeights::from_phases(&phases_from_plan(&plan), &vec![0.0; sc.geometry.ny]);
    let worst = worst_snr_on_grid(q, sc, &weights)?;
    Ok(BenchOutcome { weights, worst })
}

/// Array above the area centre (`qy` per the array-type convention) with
/// the flattened design.
pub fn benchmark_center_placement(sc: &Scenario) -> Result<PlacementResult> {
    let q = sc.placement(sc.center_x(), sc.default_qy())?;
    evaluate_placement(q, sc)
}

/// Active-block size `min(N, ⌊1/(span d̄)⌋)`, at least one element.
pub fn deactivation_active_count(span: f64, n: usize, spacing: f64) -> usize {
    if span <= 0.0 {
        return n;
    }
    let fit = (1.0 / (span * spacing) + 1e-9).floor();
    (fit.max(1.0) as usize).min(n)
}

fn deactivated_axis(n: usize, spacing: f64, delta_min: f64, delta_max: f64) -> Vec<Complex64> {
    let active = deactivation_active_count(delta_max - delta_min, n, spacing);
    let start = (n - active) / 2;
    // same beam-edge anchoring as a single-sub-array flattening plan
    let steer = if delta_max > delta_min {
        delta_min + 0.5 / (active as f64 * spacing)
    } else {
        delta_min
    };
    steering_phases(n, spacing, steer)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            if (start..start + active).contains(&i) {
                Complex64::from_polar(1.0, t)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Beam broadening by switching elements off: per axis a centred
/// contiguous block of `min(N, ⌊1/(span d̄)⌋)` elements stays on, its beam
/// edge placed on the lower end of the span like a single-sub-array plan;
/// the rest reflect nothing.
pub fn benchmark_deactivation(q: &Placement, sc: &Scenario) -> Result<BenchOutcome> {
    let sx = freq_span(q, &sc.area, Axis::X);
    let sy = freq_span(q, &sc.area, Axis::Y);
    let weights = SeparableWeights {
        x: deactivated_axis(sc.geometry.nx, sc.radio.spacing_x, sx.delta_min, sx.delta_max),
        y: deactivated_axis(sc.geometry.ny, sc.radio.spacing_y, sy.delta_min, sy.delta_max),
    };
    let worst = worst_snr_on_grid(q, sc, &weights)?;
    Ok(BenchOutcome { weights, worst })
}

/// Design schemes compared in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Optimized placement with the proposed beamforming.
    OptimalPlacement,
    /// Array above the midpoint (single location) or the area centre.
    CenterPlacement,
    /// Separable two-axis flattening at the optimized placement.
    Flatten3d,
    /// x-only flattening shared by all rows, at the same placement.
    Beamforming1d,
    /// Element deactivation at the optimized placement.
    Deactivation,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::OptimalPlacement,
        Scheme::CenterPlacement,
        Scheme::Flatten3d,
        Scheme::Beamforming1d,
        Scheme::Deactivation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OptimalPlacement => "optimal-placement",
            Scheme::CenterPlacement => "center-placement",
            Scheme::Flatten3d => "3d-flatten",
            Scheme::Beamforming1d => "1d-beamforming",
            Scheme::Deactivation => "deactivation-broadening",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "midpoint-placement" {
            return Ok(Scheme::CenterPlacement);
        }
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "scheme",
                name: s.to_string(),
                valid: Scheme::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", "),
            })
    }
}

/// Segment setups used by the 1-D coverage figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Panel {
    A,
    B,
    C,
}

impl Panel {
    pub const ALL: [Panel; 3] = [Panel::A, Panel::B, Panel::C];

    /// `[x_l, x_u]` of the covered segment.
    pub fn segment(self) -> (f64, f64) {
        match self {
            Panel::A => (250.0, 750.0),
            Panel::B => (500.0, 1500.0),
            Panel::C => (155.0, 325.0),
        }
    }

    fn letter(self) -> char {
        match self {
            Panel::A => 'a',
            Panel::B => 'b',
            Panel::C => 'c',
        }
    }
}

/// Reproducible figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Deployment coefficient versus `ρ`.
    DeploymentCoefficient,
    /// Flattened beam, N = 512, L = 4.
    FlattenedBeam,
    /// Worst-case gain versus N at span 0.1.
    WorstGainVsN,
    /// Single-location SNR versus N.
    SingleLocationSnr,
    /// Sub-array count and path loss versus `qx`; `None` runs all panels.
    SubarraysAndLoss(Option<Panel>),
    /// Worst-case SNR versus `qx`; `None` runs all panels.
    WorstSnrVsQx(Option<Panel>),
    /// Linear array: worst SNR versus power, optimized versus centre.
    UlaPower,
    /// Planar array: worst SNR versus N, 3-D versus 1-D beamforming.
    UpaVsN,
    /// Linear versus planar with flattening or deactivation, versus power.
    UlaVsUpa,
}

impl Figure {
    pub const IDS: [&'static str; 15] = [
        "4", "5", "6", "7", "8", "8a", "8b", "8c", "9", "9a", "9b", "9c", "10", "11", "12",
    ];

    pub fn id(self) -> String {
        let panel = |p: Option<Panel>| p.map(|p| p.letter().to_string()).unwrap_or_default();
        match self {
            Figure::DeploymentCoefficient => "4".into(),
            Figure::FlattenedBeam => "5".into(),
            Figure::WorstGainVsN => "6".into(),
            Figure::SingleLocationSnr => "7".into(),
            Figure::SubarraysAndLoss(p) => format!("8{}", panel(p)),
            Figure::WorstSnrVsQx(p) => format!("9{}", panel(p)),
            Figure::UlaPower => "10".into(),
            Figure::UpaVsN => "11".into(),
            Figure::UlaVsUpa => "12".into(),
        }
    }

    /// Schemes a figure compares; empty for figures that report fixed
    /// quantities.
    pub fn supported_schemes(self) -> &'static [Scheme] {
        match self {
            Figure::SingleLocationSnr | Figure::UlaPower => &[Scheme::OptimalPlacement, Scheme::CenterPlacement],
            Figure::UpaVsN => &[Scheme::Flatten3d, Scheme::Beamforming1d],
            Figure::UlaVsUpa => &[Scheme::OptimalPlacement, Scheme::Deactivation, Scheme::CenterPlacement],
            _ => &[],
        }
    }

    /// Default sweep matching the figure's horizontal axis.
    pub fn default_sweep(self, base: &BaseParams) -> Vec<f64> {
        let range = |lo: f64, hi: f64, step: f64| -> Vec<f64> {
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            (0..=n).map(|k| lo + k as f64 * step).collect()
        };
        match self {
            Figure::DeploymentCoefficient => range(0.0, 10.0, 0.05),
            Figure::FlattenedBeam => range(-0.5, 0.5, 0.0005),
            Figure::WorstGainVsN => vec![
                10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0,
            ],
            Figure::SingleLocationSnr => range(50.0, 1000.0, 10.0),
            Figure::SubarraysAndLoss(p) | Figure::WorstSnrVsQx(p) => {
                let x_c = match p {
                    Some(p) => segment_center(p),
                    None => Panel::ALL.into_iter().map(segment_center).fold(f64::INFINITY, f64::min),
                };
                SearchRange {
                    q_min: -5.0 * base.altitude,
                    q_max: x_c,
                    step: base.search_step,
                }
                .points()
            }
            Figure::UlaPower | Figure::UlaVsUpa => range(0.0, 40.0, 5.0),
            Figure::UpaVsN => range(10.0, 100.0, 10.0),
        }
    }
}

fn segment_center(p: Panel) -> f64 {
    let (lo, hi) = p.segment();
    0.5 * (lo + hi)
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fig = match s.trim().trim_start_matches("fig") {
            "4" => Figure::DeploymentCoefficient,
            "5" => Figure::FlattenedBeam,
            "6" => Figure::WorstGainVsN,
            "7" => Figure::SingleLocationSnr,
            "8" => Figure::SubarraysAndLoss(None),
            "8a" => Figure::SubarraysAndLoss(Some(Panel::A)),
            "8b" => Figure::SubarraysAndLoss(Some(Panel::B)),
            "8c" => Figure::SubarraysAndLoss(Some(Panel::C)),
            "9" => Figure::WorstSnrVsQx(None),
            "9a" => Figure::WorstSnrVsQx(Some(Panel::A)),
            "9b" => Figure::WorstSnrVsQx(Some(Panel::B)),
            "9c" => Figure::WorstSnrVsQx(Some(Panel::C)),
            "10" => Figure::UlaPower,
            "11" => Figure::UpaVsN,
            "12" => Figure::UlaVsUpa,
            _ => {
                return Err(Error::Unknown {
                    kind: "figure",
                    name: s.to_string(),
                    valid: Figure::IDS.join(", "),
                })
            }
        };
        Ok(fig)
    }
}

/// Scenario settings shared by every figure; each figure supplies its own
/// array size and target area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseParams {
    pub altitude: f64,
    pub radio: RadioParams,
    pub m: usize,
    pub grid: AreaGrid,
    pub search_step: f64,
}

impl Default for BaseParams {
    fn default() -> Self {
        Self {
            altitude: 100.0,
            radio: RadioParams::new(dbm_to_watts(20.0), dbm_to_watts(-110.0), 1e-4, 0.1, 0.1)
                .expect("default radio parameters are valid"),
            m: 64,
            grid: AreaGrid::default(),
            search_step: 1.0,
        }
    }
}

impl BaseParams {
    fn scenario(&self, area: TargetArea, nx: usize, ny: usize) -> Result<Scenario> {
        Ok(Scenario::new(self.altitude, area, ArrayGeometry::new(nx, ny, self.m)?, self.radio)?.with_grid(self.grid))
    }

    fn search(&self, area: &TargetArea) -> SearchRange {
        SearchRange {
            step: self.search_step,
            ..SearchRange::default_for(self.altitude, area)
        }
    }

    fn with_power_dbm(&self, dbm: f64) -> Result<Self> {
        let mut b = *self;
        b.radio.tx_power = dbm_to_watts(dbm);
        b.radio = b.radio.validated()?;
        Ok(b)
    }
}

/// Target area of the coverage figures: 1000 x 600 m centred at (1000, 0).
pub fn coverage_area() -> TargetArea {
    TargetArea::new(1000.0, 1000.0, 600.0).expect("valid area")
}

/// Single target location of the single-location figure.
pub const SINGLE_TARGET: GroundPoint = GroundPoint::new(1000.0, 0.0);

/// One figure run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub figure: Figure,
    pub base: BaseParams,
    pub sweep: Vec<f64>,
    /// Empty selects every scheme the figure supports.
    pub schemes: Vec<Scheme>,
}

impl ExperimentSpec {
    /// Figure preset with its default sweep and all its schemes.
    pub fn preset(figure: Figure, base: BaseParams) -> Self {
        Self {
            figure,
            sweep: figure.default_sweep(&base),
            base,
            schemes: Vec::new(),
        }
    }

    fn resolved_schemes(&self) -> Result<Vec<Scheme>> {
        let supported = self.figure.supported_schemes();
        if self.schemes.is_empty() {
            return Ok(supported.to_vec());
        }
        for s in &self.schemes {
            if !supported.contains(s) {
                let valid = if supported.is_empty() {
                    "none (this figure reports fixed quantities)".to_string()
                } else {
                    supported.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
                };
                return Err(invalid(format!(
                    "scheme {s} does not apply to figure {}; valid: {valid}",
                    self.figure
                )));
            }
        }
        Ok(self.schemes.clone())
    }
}

/// Row of a sweep table. `value` is in dB except for raw quantities such as
/// sub-array counts and deployment coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep: f64,
    pub scheme: String,
    pub value: f64,
}

/// Row of a beam-pattern dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternRow {
    pub delta: f64,
    pub gain_db: f64,
}

/// Experiment output.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Sweep(Vec<SweepRow>),
    Pattern(Vec<PatternRow>),
}

impl Table {
    pub fn len(&self) -> usize {
        match self {
            Table::Sweep(r) => r.len(),
            Table::Pattern(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sweep_rows(&self) -> &[SweepRow] {
        match self {
            Table::Sweep(r) => r,
            Table::Pattern(_) => &[],
        }
    }

    /// Rows whose scheme label equals `scheme`.
    pub fn series(&self, scheme: &str) -> Vec<(f64, f64)> {
        self.sweep_rows()
            .iter()
            .filter(|r| r.scheme == scheme)
            .map(|r| (r.sweep, r.value))
            .collect()
    }

    /// CSV with header `sweep,scheme,value_db` or `delta,gain_db`, LF line
    /// endings and nine significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::Output(e.to_string());
        match self {
            Table::Sweep(rows) => {
                w.write_record(["sweep", "scheme", "value_db"]).map_err(io)?;
                for r in rows {
                    w.write_record([fmt_g9(r.sweep).as_str(), r.scheme.as_str(), fmt_g9(r.value).as_str()])
                        .map_err(io)?;
                }
            }
            Table::Pattern(rows) => {
                w.write_record(["delta", "gain_db"]).map_err(io)?;
                for r in rows {
                    w.write_record([fmt_g9(r.delta), fmt_g9(r.gain_db)]).map_err(io)?;
                }
            }
        }
        w.flush().map_err(|e| Error::Output(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Output(e.to_string()))
    }
}

/// Shortest rendering with nine significant digits, in the style of C's
/// `%.9g`.
pub fn fmt_g9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn sweep_count(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e7 {
        Ok(v as usize)
    } else {
        Err(invalid(format!("{what} sweep values must be positive integers, got {v}")))
    }
}

fn row(sweep: f64, scheme: impl Into<String>, value: f64) -> SweepRow {
    SweepRow {
        sweep,
        scheme: scheme.into(),
        value,
    }
}

/// Span of the worst-case gain figure.
pub const GAIN_LAW_SPAN: f64 = 0.1;
/// Points sampled across the span when measuring the worst-case gain.
pub const GAIN_LAW_SAMPLES: usize = 4001;

/// Lowest flattened-beam gain over `[0, span]` for an `n`-element array.
pub fn measured_worst_gain(n: usize, span: f64, spacing: f64, samples: usize) -> Result<f64> {
    let plan = plan_flatten_1d(0.0, span, n, spacing)?;
    let samples = samples.max(2);
    Ok((0..samples)
        .map(|k| flattened_pattern_gain(&plan, span * k as f64 / (samples - 1) as f64))
        .fold(f64::INFINITY, f64::min))
}

/// Runs one figure. Sweep points are evaluated in parallel; rows come out
/// in sweep order, then scheme order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table> {
    if spec.sweep.is_empty() {
        return Err(invalid("sweep must not be empty"));
    }
    if let Some(v) = spec.sweep.iter().find(|v| !v.is_finite()) {
        return Err(invalid(format!("sweep values must be finite, got {v}")));
    }
    let schemes = spec.resolved_schemes()?;
    let base = &spec.base;
    if spec.figure == Figure::FlattenedBeam {
        return flattened_beam(&spec.sweep, base.radio.spacing_x);
    }
    let per_point = |&v: &f64| -> Result<Vec<SweepRow>> {
        match spec.figure {
            Figure::DeploymentCoefficient => deployment_rows(v),
            Figure::WorstGainVsN => gain_law_rows(v, base.radio.spacing_x),
            Figure::SingleLocationSnr => single_location_rows(v, base, &schemes),
            Figure::SubarraysAndLoss(p) => panels(p)
                .into_iter()
                .map(|panel| subarray_loss_rows(v, base, panel, p.is_none()))
                .collect::<Result<Vec<_>>>()
                .map(|r| r.concat()),
            Figure::WorstSnrVsQx(p) => panels(p)
                .into_iter()
                .map(|panel| worst_vs_qx_rows(v, base, panel, p.is_none()))
                .collect::<Result<Vec<_>>>()
                .map(|r| r.concat()),
            Figure::UlaPower => ula_power_rows(v, base, &schemes),
            Figure::UpaVsN => upa_vs_n_rows(v, base, &schemes),
            Figure::UlaVsUpa => ula_vs_upa_rows(v, base, &schemes),
            Figure::FlattenedBeam => unreachable!("handled above"),
        }
    };
    let chunks = spec.sweep.par_iter().map(per_point).collect::<Result<Vec<_>>>()?;
    Ok(Table::Sweep(chunks.concat()))
}

fn panels(p: Option<Panel>) -> Vec<Panel> {
    p.map(|p| vec![p]).unwrap_or_else(|| Panel::ALL.to_vec())
}

fn label(panel: Panel, prefixed: bool, name: &str) -> String {
    if prefixed {
        format!("{}-{name}", panel.letter())
    } else {
        name.to_string()
    }
}

fn deployment_rows(rho: f64) -> Result<Vec<SweepRow>> {
    if rho < 0.0 {
        return Err(invalid(format!("rho must be >= 0, got {rho}")));
    }
    let xi = deployment_coefficients(rho);
    let lo = xi[0];
    let hi = *xi.last().expect("at least one coefficient");
    Ok(vec![row(rho, "xi-lower", lo), row(rho, "xi-upper", hi)])
}

/// Pattern of the 512-element, four-sub-array beam centred on zero.
fn flattened_beam(deltas: &[f64], spacing: f64) -> Result<Table> {
    let (n, l) = (512, 4);
    let ns = (n / l) as f64;
    let delta_min = -(l as f64) / (2.0 * ns * spacing);
    let plan = plan_with_subarrays(delta_min, l, n, spacing)?;
    Ok(Table::Pattern(
        deltas
            .iter()
            .map(|&delta| PatternRow {
                delta,
                gain_db: linear_to_db(flattened_pattern_gain(&plan, delta)),
            })
            .collect(),
    ))
}

fn gain_law_rows(nv: f64, spacing: f64) -> Result<Vec<SweepRow>> {
    let n = sweep_count(nv, "N")?;
    let span = GAIN_LAW_SPAN;
    let l = required_subarrays(span, n, spacing);
    let four_over_pi2 = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let nf = n as f64;
    let measured = measured_worst_gain(n, span, spacing, GAIN_LAW_SAMPLES)?;
    Ok(vec![
        row(nv, "measured", linear_to_db(measured)),
        row(nv, "ceil-model", linear_to_db(four_over_pi2 * nf * nf / (l * l) as f64)),
        row(nv, "quadratic", linear_to_db(four_over_pi2 * nf * nf)),
        row(nv, "linear", linear_to_db(four_over_pi2 * nf / (span * spacing))),
    ])
}

fn single_location_rows(nv: f64, base: &BaseParams, schemes: &[Scheme]) -> Result<Vec<SweepRow>> {
    let n = sweep_count(nv, "N")?;
    let geo = ArrayGeometry::ula(n, base.m)?;
    let w = SINGLE_TARGET;
    schemes
        .iter()
        .map(|&s| {
            let q = match s {
                Scheme::OptimalPlacement => optimal_placement_single(w, base.altitude)?.best(),
                Scheme::CenterPlacement => Placement::new(w.x / 2.0, w.y / 2.0, base.altitude)?,
                _ => unreachable!("filtered by supported_schemes"),
            };
            let v = snr(&q, w, &conjugate_phases(&q, w, &geo, &base.radio), &geo, &base.radio)?;
            Ok(row(nv, s.name(), linear_to_db(v)))
        })
        .collect()
}

fn segment_scenario(base: &BaseParams, panel: Panel) -> Result<Scenario> {
    let (lo, hi) = panel.segment();
    base.scenario(TargetArea::segment(lo, hi)?, 256, 1)
}

fn subarray_loss_rows(qx: f64, base: &BaseParams, panel: Panel, prefixed: bool) -> Result<Vec<SweepRow>> {
    let sc = segment_scenario(base, panel)?;
    let t = objective_terms_ula(qx, &sc)?;
    let beta2 = sc.radio.ref_gain * sc.radio.ref_gain;
    Ok(vec![
        row(qx, label(panel, prefixed, "subarrays"), t.l_x as f64),
        row(qx, label(panel, prefixed, "path-loss"), linear_to_db(t.path_product / beta2)),
    ])
}

fn worst_vs_qx_rows(qx: f64, base: &BaseParams, panel: Panel, prefixed: bool) -> Result<Vec<SweepRow>> {
    let sc = segment_scenario(base, panel)?;
    let res = evaluate_placement(sc.placement(qx, 0.0)?, &sc)?;
    Ok(vec![
        row(qx, label(panel, prefixed, "approx"), linear_to_db(res.worst_snr_approx)),
        row(qx, label(panel, prefixed, "exact"), linear_to_db(res.worst_snr)),
    ])
}

fn ula_power_rows(dbm: f64, base: &BaseParams, schemes: &[Scheme]) -> Result<Vec<SweepRow>> {
    let base = base.with_power_dbm(dbm)?;
    let sc = base.scenario(coverage_area(), 256, 1)?;
    schemes
        .iter()
        .map(|&s| {
            let res = match s {
                Scheme::OptimalPlacement => search_placement_ula(&sc, &base.search(&sc.area))?,
                Scheme::CenterPlacement => benchmark_center_placement(&sc)?,
                _ => unreachable!("filtered by supported_schemes"),
            };
            Ok(row(dbm, s.name(), linear_to_db(res.worst_snr)))
        })
        .collect()
}

/// Elements along y in the planar-array-versus-N figure.
pub const UPA_NY: usize = 20;

fn upa_vs_n_rows(nxv: f64, base: &BaseParams, schemes: &[Scheme]) -> Result<Vec<SweepRow>> {
    let nx = sweep_count(nxv, "Nx")?;
    let sc = base.scenario(coverage_area(), nx, UPA_NY)?;
    let proposed = search_placement_upa(&sc, &base.search(&sc.area))?;
    let n = (nx * UPA_NY) as f64;
    schemes
        .iter()
        .map(|&s| {
            let v = match s {
                Scheme::Flatten3d => proposed.worst_snr,
                Scheme::Beamforming1d => benchmark_1d_on_upa(&proposed.q_star, &sc)?.worst.snr,
                _ => unreachable!("filtered by supported_schemes"),
            };
            Ok(row(n, s.name(), linear_to_db(v)))
        })
        .collect()
}

fn ula_vs_upa_rows(dbm: f64, base: &BaseParams, schemes: &[Scheme]) -> Result<Vec<SweepRow>> {
    let base = base.with_power_dbm(dbm)?;
    let mut rows = Vec::new();
    for (name, nx, ny) in [("ula", 400, 1), ("upa", 20, 20)] {
        let sc = base.scenario(coverage_area(), nx, ny)?;
        let range = base.search(&sc.area);
        let proposed = if ny == 1 {
            search_placement_ula(&sc, &range)?
        } else {
            search_placement_upa(&sc, &range)?
        };
        for &s in schemes {
            let v = match s {
                Scheme::OptimalPlacement => proposed.worst_snr,
                Scheme::Deactivation => benchmark_deactivation(&proposed.q_star, &sc)?.worst.snr,
                Scheme::CenterPlacement => benchmark_center_placement(&sc)?.worst_snr,
                _ => unreachable!("filtered by supported_schemes"),
            };
            rows.push(row(dbm, format!("{name}-{s}"), linear_to_db(v)));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_formatting() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(1.0), "1");
        assert_eq!(fmt_g9(-2.5), "-2.5");
        assert_eq!(fmt_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_g9(123456789.0), "123456789");
        assert_eq!(fmt_g9(1234567890.0), "1.23456789e9");
        assert_eq!(fmt_g9(1e-5), "0.00001");
        assert_eq!(fmt_g9(1.5e-6), "1.5e-6");
        assert_eq!(fmt_g9(99.9999999999), "100");
        assert_eq!(fmt_g9(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn figure_ids_round_trip() {
        for id in Figure::IDS {
            let f: Figure = id.parse().unwrap();
            assert_eq!(f.id(), id);
        }
        let e = "13".parse::<Figure>().unwrap_err();
        assert!(e.to_string().contains("8a"), "{e}");
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("midpoint-placement".parse::<Scheme>().unwrap(), Scheme::CenterPlacement);
        assert!("best".parse::<Scheme>().is_err());
    }

    #[test]
    fn empty_sweep_and_foreign_scheme_are_rejected() {
        let mut spec = ExperimentSpec::preset(Figure::DeploymentCoefficient, BaseParams::default());
        spec.sweep.clear();
        assert!(run_experiment(&spec).is_err());
        let mut spec = ExperimentSpec::preset(Figure::UpaVsN, BaseParams::default());
        spec.schemes = vec![Scheme::Deactivation];
        assert!(run_experiment(&spec).is_err());
    }

    #[test]
    fn deployment_table_shape() {
        let spec = ExperimentSpec::preset(Figure::DeploymentCoefficient, BaseParams::default());
        let t = run_experiment(&spec).unwrap();
        assert_eq!(t.len(), 2 * 201);
        let csv = t.to_csv_string().unwrap();
        assert!(csv.starts_with("sweep,scheme,value_db\n0,xi-lower,0.5\n"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn active_count_examples() {
        assert_eq!(deactivation_active_count(0.0, 400, 0.1), 400);
        assert_eq!(deactivation_active_count(0.1, 400, 0.1), 100);
        assert_eq!(deactivation_active_count(0.1, 50, 0.1), 50);
        assert_eq!(deactivation_active_count(30.0, 50, 0.1), 1);
    }

    #[test]
    fn deactivation_without_need_keeps_full_array() {
        let base = BaseParams::default();
        let sc = base
            .scenario(TargetArea::point(GroundPoint::new(800.0, 0.0)), 16, 1)
            .unwrap();
        let q = sc.placement(10.0, 0.0).unwrap();
        let out = benchmark_deactivation(&q, &sc).unwrap();
        assert_eq!(out.weights.active_elements(), 16);
        let proposed = evaluate_placement(q, &sc).unwrap();
        let rel = (out.worst.snr - proposed.worst_snr).abs() / proposed.worst_snr;
        assert!(rel < 1e-9, "{} vs {}", out.worst.snr, proposed.worst_snr);
    }

    #[test]
    fn one_d_benchmark_on_single_row_matches_flatten() {
        let base = BaseParams::default().with_power_dbm(20.0).unwrap();
        let sc = base.scenario(TargetArea::segment(300.0, 500.0).unwrap(), 64, 1).unwrap();
        let q = sc.placement(-20.0, 0.0).unwrap();
        let a = benchmark_1d_on_upa(&q, &sc).unwrap().worst.snr;
        let b = evaluate_placement(q, &sc).unwrap().worst_snr;
        assert!((a - b).abs() <= 1e-12 * b);
    }
}
