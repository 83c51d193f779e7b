mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airs_core::beamform::{flattened_pattern_gain, phases_from_plan, plan_flatten_1d, FlattenPlan};
use airs_core::bench::{fmt_g9, run_experiment, ExperimentSpec, Figure, PatternRow, Scheme, Table};
use airs_core::geometry::GroundPoint;
use airs_core::placement::{
    optimal_placement_single, search_placement_ula, search_placement_upa, single_location_snr,
    PlacementResult,
};
use airs_core::units::linear_to_db;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(name = "airs", version, about = "Placement and passive beam design for an aerial reflecting relay")]
struct Cli {
    /// Scenario file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set Nx=20`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true, allow_hyphen_values = true)]
    set: Vec<String>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form placement and SNR for a single destination.
    SingleLoc {
        /// Destination as `x,y` in meters.
        #[arg(long, default_value = "1000,0", allow_hyphen_values = true)]
        w1: String,
        /// Element count; defaults to Nx * Ny from the config.
        #[arg(long = "N")]
        n: Option<usize>,
    },
    /// Sub-array plan flattening the beam over a spatial-frequency interval.
    #[command(name = "flatten-1d")]
    Flatten1d {
        #[command(flatten)]
        plan: PlanArgs,
        /// List per-element phases instead of the sub-array table.
        #[arg(long)]
        elements: bool,
    },
    /// Placement search for a linear array (requires Ny = 1).
    PlaceUla {
        /// Emit the `qx,cost` objective trace instead of the summary.
        #[arg(long)]
        trace: bool,
    },
    /// Placement search and 3-D beam design for a planar array.
    PlaceUpa {
        /// Emit the `qx,cost` objective trace instead of the summary.
        #[arg(long)]
        trace: bool,
    },
    /// Reproduce one evaluation figure as CSV.
    Figure {
        /// Figure id: 4, 5, 6, 7, 8, 8a-8c, 9, 9a-9c, 10, 11 or 12.
        id: String,
        /// Explicit sweep values, comma separated.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "range")]
        sweep: Option<String>,
        /// Sweep as `start:stop:step`, stop included.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Schemes to include, comma separated; default is all the figure supports.
        #[arg(long)]
        schemes: Option<String>,
    },
    /// Exact gain of a flattened plan sampled over an offset interval.
    PatternDump {
        #[command(flatten)]
        plan: PlanArgs,
        /// First sampled offset.
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        from: f64,
        /// Last sampled offset.
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long, allow_hyphen_values = true)]
    delta_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta_max: f64,
    /// Element count; defaults to Nx from the config.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Normalized spacing; defaults to dx_bar from the config.
    #[arg(long)]
    spacing: Option<f64>,
}

impl PlanArgs {
    fn plan(&self, cfg: &ScenarioConfig) -> Result<FlattenPlan> {
        let n = self.n.unwrap_or(cfg.nx);
        let spacing = self.spacing.unwrap_or(cfg.dx_bar);
        Ok(plan_flatten_1d(self.delta_min, self.delta_max, n, spacing)?)
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ScenarioConfig::default(),
    };
    for s in &cli.set {
        cfg.apply_override(s).context("--set")?;
    }
    Ok(cfg)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("AIRS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("AIRS_THREADS must be a non-negative integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("starting worker pool")?;
    Ok(())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim().replace('\u{2212}', "-");
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{what}: `{s}` is not a number"))
        })
        .collect()
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts = parse_list(&text.replace(':', ","), "--range")?;
    let [lo, hi, step] = parts[..] else {
        bail!("--range expects start:stop:step, got `{text}`");
    };
    if !(step > 0.0) || hi < lo {
        bail!("--range needs step > 0 and stop >= start, got `{text}`");
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

struct KeyValues(String);

impl KeyValues {
    fn new() -> Self {
        Self("field,value\n".into())
    }

    fn num(&mut self, key: &str, v: f64) {
        let _ = writeln!(self.0, "{key},{}", fmt_g9(v));
    }
}

fn single_loc(cfg: &ScenarioConfig, w1: &str, n: Option<usize>) -> Result<String> {
    let xy = parse_list(w1, "--w1")?;
    let [x, y] = xy[..] else {
        bail!("--w1 expects x,y, got `{w1}`");
    };
    let w = GroundPoint::new(x, y);
    let n = n.unwrap_or(cfg.nx * cfg.ny);
    let opt = optimal_placement_single(w, cfg.h)?;
    let best = opt.best();
    let snr = single_location_snr(w, cfg.h, n, cfg.m, &cfg.radio())?;
    let mut kv = KeyValues::new();
    kv.num("rho", opt.rho);
    for (i, (xi, c)) in opt.xi.iter().zip(&opt.candidates).enumerate() {
        kv.num(&format!("xi_{}", i + 1), *xi);
        kv.num(&format!("candidate_{}_qx", i + 1), c.qx);
        kv.num(&format!("candidate_{}_qy", i + 1), c.qy);
    }
    kv.num("qx", best.qx);
    kv.num("qy", best.qy);
    kv.num("N", n as f64);
    kv.num("snr_db", linear_to_db(snr));
    Ok(kv.0)
}

fn flatten_1d(cfg: &ScenarioConfig, args: &PlanArgs, elements: bool) -> Result<String> {
    let plan = args.plan(cfg)?;
    let mut out = String::new();
    if elements {
        out.push_str("element,phase\n");
        for (i, p) in phases_from_plan(&plan).into_iter().enumerate() {
            let _ = writeln!(out, "{i},{}", fmt_g9(p));
        }
    } else {
        out.push_str("subarray,size,steer_freq,common_phase\n");
        for (l, size) in plan.subarray_sizes().into_iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{size},{},{}",
                l + 1,
                fmt_g9(plan.steer_freqs[l]),
                fmt_g9(plan.common_phases[l])
            );
        }
    }
    Ok(out)
}

fn placement_report(res: &PlacementResult, trace: bool) -> String {
    if trace {
        let mut out = String::from("qx,cost\n");
        for (qx, cost) in &res.objective_trace {
            let _ = writeln!(out, "{},{}", fmt_g9(*qx), fmt_g9(*cost));
        }
        return out;
    }
    let (l_x, l_y) = res.l_used();
    let mut kv = KeyValues::new();
    kv.num("qx", res.q_star.qx);
    kv.num("qy", res.q_star.qy);
    kv.num("h", res.q_star.h);
    kv.num("l_x", l_x as f64);
    kv.num("l_y", l_y as f64);
    kv.num("span_x", res.terms.span_x);
    kv.num("span_y", res.terms.span_y);
    kv.num("d_max", res.terms.d_max);
    kv.num("path_product", res.terms.path_product);
    kv.num("cost", res.terms.cost);
    kv.num("worst_snr_db", linear_to_db(res.worst_snr));
    kv.num("worst_snr_approx_db", linear_to_db(res.worst_snr_approx));
    kv.num("worst_x", res.worst_point.x);
    kv.num("worst_y", res.worst_point.y);
    kv.0
}

fn figure(cfg: &ScenarioConfig, id: &str, sweep: Option<&str>, range: Option<&str>, schemes: Option<&str>) -> Result<String> {
    let fig: Figure = id.parse()?;
    let mut spec = ExperimentSpec::preset(fig, cfg.base_params());
    if let Some(s) = sweep {
        spec.sweep = parse_list(s, "--sweep")?;
    }
    if let Some(r) = range {
        spec.sweep = parse_range(r)?;
    }
    if let Some(s) = schemes {
        spec.schemes = s
            .split(',')
            .map(|name| name.trim().parse::<Scheme>())
            .collect::<airs_core::Result<_>>()?;
    }
    Ok(run_experiment(&spec)?.to_csv_string()?)
}

fn pattern_dump(cfg: &ScenarioConfig, args: &PlanArgs, from: f64, to: f64, points: usize) -> Result<String> {
    if points < 2 || !(to > from) {
        bail!("pattern-dump needs --points >= 2 and --to > --from");
    }
    let plan = args.plan(cfg)?;
    let step = (to - from) / (points - 1) as f64;
    let rows = (0..points)
        .map(|k| {
            let delta = from + k as f64 * step;
            PatternRow {
                delta,
                gain_db: linear_to_db(flattened_pattern_gain(&plan, delta)),
            }
        })
        .collect();
    Ok(Table::Pattern(rows).to_csv_string()?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).context("writing stdout")?;
            stdout.flush().context("writing stdout")
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let cfg = load_config(&cli)?;
    let text = match &cli.command {
        Command::SingleLoc { w1, n } => single_loc(&cfg, w1, *n)?,
        Command::Flatten1d { plan, elements } => flatten_1d(&cfg, plan, *elements)?,
        Command::PlaceUla { trace } => {
            let res = search_placement_ula(&cfg.scenario(), &cfg.search_range())?;
            placement_report(&res, *trace)
        }
        Command::PlaceUpa { trace } => {
            let res = search_placement_upa(&cfg.scenario(), &cfg.search_range())?;
            placement_report(&res, *trace)
        }
        Command::Figure { id, sweep, range, schemes } => {
            figure(&cfg, id, sweep.as_deref(), range.as_deref(), schemes.as_deref())?
        }
        Command::PatternDump { plan, from, to, points } => pattern_dump(&cfg, plan, *from, *to, *points)?,
    };
    emit(cli.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("airs: {msg}");
            ExitCode::FAILURE
        }
    }
}
