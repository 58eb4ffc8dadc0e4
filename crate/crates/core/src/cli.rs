//! Command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] (JSON file, then command-line
//! flags on top), validates it, writes the resolved copy as `config.json` in
//! the output directory, and then runs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::acceptance::{render, run_criterion, CriterionResult, Settings, NAMES};
use crate::czd::{split_t11_t12, tail_bound_check};
use crate::error::{Error, Result};
use crate::field::{lq_norm, BoxDomain, GridField};
use crate::io::{save_binary, save_csv};
use crate::kernels::{set_gamma_fault, KernelSpec};
use crate::report::{write_json, SweepReport};
use crate::sqg::{alpha_convergence, c_alpha, relative_divergence, velocity_direct, velocity_spectral, VorticityField};
use crate::testfield::{make_test_field, FieldSpec, CORPUS_ID};
use crate::transform::{apply_direct, apply_spectral_padded, apply_t1_spectral, apply_t2_direct_padded, KernelPart};
use crate::verify::{
    default_y_grid, interpolation_endpoint_check, far_part_check, near_part_l2_check, log_grid,
    multiplier_sup_check, riesz_potential_comparison, norm_sweep, weak_type_check, Pairing,
    RouteOptions,
};

/// Field descriptor of a run: kind plus kind-specific parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub kind: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    Spectral,
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PartChoice {
    Full,
    Near,
    Far,
}

/// Which inequality a `sweep` measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// `|T f|_q` against the mixed-norm envelope, over beta.
    Norm,
    /// Distribution bound for the near part, over t.
    WeakType,
    /// Far-part `L^q` bound, over beta.
    FarPart,
    /// Near-part `L^2` bound, over beta.
    NearPart,
    /// Sup of the near-kernel transform, over beta.
    Multiplier,
    /// Riesz-potential route, over beta.
    Potential,
    /// Cover-piece endpoint ratios at level t.
    Interpolation,
    /// SQG velocity distance to alpha = 1/2, over alpha.
    Alpha,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    /// Samples per axis.
    #[serde(rename = "N")]
    pub samples: usize,
    /// Box side.
    #[serde(rename = "L")]
    pub side: f64,
    /// Kernel component, 1-based.
    pub j: usize,
    pub beta: f64,
    /// SQG exponent; `beta = 1 - 2 alpha` where both apply.
    pub alpha: Option<f64>,
    pub field: FieldConfig,
    /// Seed for random fields, injected into the field parameters.
    pub seed: u64,
    pub route: RouteChoice,
    pub part: PartChoice,
    pub q: f64,
    /// Fixed `p` for the potential sweep (otherwise `q` is held fixed).
    pub p: Option<f64>,
    /// Decomposition level; defaults to a quarter of `max |f|`.
    pub t: Option<f64>,
    pub sweep: SweepKind,
    pub beta_grid: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub alpha_grid: Option<Vec<f64>>,
    pub uniformity_threshold: f64,
    pub padding_factor: Option<usize>,
    pub quadrature_cells: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            samples: 256,
            side: 16.0,
            j: 1,
            beta: 0.5,
            alpha: None,
            field: FieldConfig {
                kind: "gaussian_bump".into(),
                params: serde_json::Value::Object(Default::default()),
            },
            seed: 0,
            route: RouteChoice::Spectral,
            part: PartChoice::Full,
            q: 2.0,
            p: None,
            t: None,
            sweep: SweepKind::Norm,
            beta_grid: None,
            t_grid: None,
            alpha_grid: None,
            uniformity_threshold: crate::verify::DEFAULT_UNIFORMITY_THRESHOLD,
            padding_factor: None,
            quadrature_cells: 512,
            out_dir: PathBuf::from("frit-out"),
        }
    }
}

impl RunConfig {
    pub fn domain(&self) -> Result<BoxDomain> {
        BoxDomain::new(self.n, self.side, self.samples)
    }

    /// The field descriptor with the run seed filled in for random kinds.
    pub fn field_spec(&self) -> Result<FieldSpec> {
        let mut params = match &self.field.params {
            serde_json::Value::Null => serde_json::Map::new(),
            serde_json::Value::Object(m) => m.clone(),
            _ => return Err(Error::Usage("field params must be a JSON object".into())),
        };
        let probe = FieldSpec::from_kind(&self.field.kind, &serde_json::Value::Object(params.clone()))?;
        if matches!(probe, FieldSpec::MultiBump { .. } | FieldSpec::BandLimitedRandom { .. })
            && !params.contains_key("seed")
        {
            params.insert("seed".into(), json!(self.seed));
        }
        FieldSpec::from_kind(&self.field.kind, &serde_json::Value::Object(params))
    }

    pub fn padding(&self, spec: &FieldSpec) -> usize {
        self.padding_factor
            .unwrap_or_else(|| RouteOptions::for_field(self.n, spec.is_periodic()).padding)
    }

    pub fn beta_grid(&self) -> Vec<f64> {
        self.beta_grid.clone().unwrap_or_else(|| {
            // 0, 0.05, ... up to 0.95 of the admissible range n (q - 1) / q.
            let limit = self.n as f64 * (self.q - 1.0) / self.q;
            (0..20).map(|i| (5 * i) as f64 / 100.0 * limit).collect()
        })
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        self.alpha_grid.clone().unwrap_or_else(|| vec![0.3, 0.4, 0.45, 0.49, 0.5])
    }

    /// Checks everything that does not need the field itself.
    pub fn validate(&self) -> Result<()> {
        self.domain()?;
        KernelSpec::new(self.n, self.j, self.beta)?;
        self.field_spec()?;
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 0.5) {
                return Err(Error::Domain(format!("alpha must lie in (0, 1/2] (got {a})")));
            }
        }
        if !(self.q >= 1.0) {
            return Err(Error::Domain(format!("q must be >= 1 (got {})", self.q)));
        }
        if let Some(0) = self.padding_factor {
            return Err(Error::Domain("padding factor must be >= 1".into()));
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Domain(format!("t must be positive (got {t})")));
            }
        }
        if !(self.uniformity_threshold >= 1.0) {
            return Err(Error::Domain("uniformity threshold must be >= 1".into()));
        }
        if self.quadrature_cells < 64 || self.quadrature_cells % 2 != 0 {
            return Err(Error::Domain("quadrature cells must be even and >= 64".into()));
        }
        for (name, g) in [
            ("beta", &self.beta_grid),
            ("t", &self.t_grid),
            ("alpha", &self.alpha_grid),
        ] {
            if let Some(g) = g {
                if g.is_empty() || g.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Domain(format!("{name} grid must be nonempty and strictly increasing")));
                }
            }
        }
        Ok(())
    }

    fn tag(&self) -> String {
        format!("n{}_N{}", self.n, self.samples)
    }
}

#[derive(Parser, Debug)]
#[command(name = "frit", version, about = "Extended Riesz transforms: operators, decompositions and inequality sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply the operator to a synthetic field.
    Apply(Overrides),
    /// Run a parameter sweep.
    Sweep(SweepArgs),
    /// Calderon-Zygmund decomposition, near-part split and tail check.
    Czd(Overrides),
    /// Distribution bound sweep over t (same as `sweep --kind weak-type`).
    Weaktype(Overrides),
    /// Near-kernel transform sup over beta (same as `sweep --kind multiplier`).
    Multiplier(Overrides),
    /// SQG velocity from a vorticity field, and the alpha sweep.
    Sqg(Overrides),
    /// Reduced-resolution acceptance suite.
    Selftest(Overrides),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    kind: Option<SweepKind>,
    #[command(flatten)]
    over: Overrides,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// JSON configuration file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Samples per axis.
    #[arg(short = 'N', long = "samples")]
    samples: Option<usize>,
    /// Box side.
    #[arg(short = 'L', long = "side")]
    side: Option<f64>,
    /// Kernel component (1-based).
    #[arg(short = 'j', long = "component")]
    j: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Field kind (gaussian_bump, multi_bump, indicator_cube, band_limited_random, single_mode).
    #[arg(long)]
    field: Option<String>,
    /// Field parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    route: Option<RouteChoice>,
    #[arg(long, value_enum)]
    part: Option<PartChoice>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// Comma-separated beta values, or `start:stop:step`.
    #[arg(long)]
    betas: Option<String>,
    /// Comma-separated t values, or `start:stop:step`.
    #[arg(long)]
    ts: Option<String>,
    /// Comma-separated alpha values, or `start:stop:step`.
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    padding: Option<usize>,
    #[arg(long)]
    quadrature_cells: Option<usize>,
    /// Output directory.
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    corrupt_gamma: Option<f64>,
}

/// Parses `a,b,c` or `start:stop:step` (stop inclusive up to rounding).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |e: String| Error::Usage(format!("grid '{s}': {e}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step".into()));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || b < a {
            return Err(bad("need step > 0 and stop >= start".into()));
        }
        let count = ((b - a) / h + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| a + i as f64 * h).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p)?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| Error::Usage(format!("config {}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($src:ident => $dst:ident) => {
                if let Some(v) = &self.$src {
                    c.$dst = v.clone();
                }
            };
        }
        set!(n => n);
        set!(samples => samples);
        set!(side => side);
        set!(j => j);
        set!(beta => beta);
        set!(seed => seed);
        set!(route => route);
        set!(part => part);
        set!(q => q);
        set!(threshold => uniformity_threshold);
        set!(quadrature_cells => quadrature_cells);
        set!(out => out_dir);
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if self.p.is_some() {
            c.p = self.p;
        }
        if self.t.is_some() {
            c.t = self.t;
        }
        if self.padding.is_some() {
            c.padding_factor = self.padding;
        }
        if let Some(k) = &self.field {
            c.field.kind = k.clone();
            c.field.params = serde_json::Value::Object(Default::default());
        }
        if let Some(p) = &self.params {
            c.field.params = serde_json::from_str(p).map_err(|e| Error::Usage(format!("--params: {e}")))?;
        }
        if let Some(g) = &self.betas {
            c.beta_grid = Some(parse_grid(g)?);
        }
        if let Some(g) = &self.ts {
            c.t_grid = Some(parse_grid(g)?);
        }
        if let Some(g) = &self.alphas {
            c.alpha_grid = Some(parse_grid(g)?);
        }
        c.validate()?;
        Ok(c)
    }
}

fn prepare_out(c: &RunConfig) -> Result<()> {
    fs::create_dir_all(&c.out_dir)?;
    write_json(c, c.out_dir.join("config.json"))
}

/// Six decimals at most, for file names.
fn short(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn range_tag(grid: &[f64], name: &str) -> String {
    match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{name}{}-{}", short(*a), short(*b)),
        _ => name.to_string(),
    }
}

fn save_field(f: &GridField, dir: &Path, stem: &str) -> Result<()> {
    save_binary(f, dir.join(format!("{stem}.bin")))?;
    save_csv(f, dir.join(format!("{stem}.csv")))
}

fn save_report(r: &SweepReport, dir: &Path, stem: &str, extra: serde_json::Value) -> Result<()> {
    r.save_csv(dir.join(format!("{stem}.csv")))?;
    let mut summary = r.to_json();
    if let (Some(obj), serde_json::Value::Object(more)) = (summary.as_object_mut(), extra) {
        obj.extend(more);
    }
    write_json(&summary, dir.join(format!("{stem}.json")))
}

fn cmd_apply(c: &RunConfig) -> Result<()> {
    let d = c.domain()?;
    let fs_ = c.field_spec()?;
    let f = make_test_field(&d, &fs_)?;
    let spec = KernelSpec::new(c.n, c.j, c.beta)?;
    let pad = c.padding(&fs_);
    let tf = match (c.route, c.part) {
        (RouteChoice::Spectral, PartChoice::Full) => apply_spectral_padded(&f, &spec, pad)?,
        (RouteChoice::Spectral, PartChoice::Near) => apply_t1_spectral(&f, &spec, pad.max(2))?,
        (RouteChoice::Spectral, PartChoice::Far) => {
            return Err(Error::Unsupported("the far part has no spectral route; use --route direct".into()))
        }
        (RouteChoice::Direct, PartChoice::Far) => apply_t2_direct_padded(&f, &spec, pad.max(2))?.field,
        (RouteChoice::Direct, part) => {
            let part = if part == PartChoice::Near { KernelPart::Near } else { KernelPart::Full };
            apply_direct(&f, &spec, part, pad.max(2))?
        }
    };
    let stem = format!("{}_j{}_b{}_{}", c.tag(), c.j, c.beta, fs_.kind());
    save_field(&f, &c.out_dir, &format!("f_{stem}"))?;
    save_field(&tf, &c.out_dir, &format!("tf_{stem}"))?;
    let summary = json!({
        "field": fs_,
        "route": c.route,
        "part": c.part,
        "padding": pad,
        "q": c.q,
        "f_norm_q": lq_norm(&f, c.q)?,
        "tf_norm_q": lq_norm(&tf, c.q)?,
        "f_norm_1": lq_norm(&f, 1.0)?,
    });
    write_json(&summary, c.out_dir.join(format!("apply_{stem}.json")))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_sweep(c: &RunConfig, kind: SweepKind) -> Result<()> {
    let d = c.domain()?;
    let fs_ = c.field_spec()?;
    let f = make_test_field(&d, &fs_)?;
    let opts = RouteOptions { padding: c.padding(&fs_) };
    let meta = json!({ "field": fs_.descriptor(), "corpus": CORPUS_ID });
    let base = format!("{}_{}", c.tag(), CORPUS_ID);
    let (report, stem, extra) = match kind {
        SweepKind::Norm => {
            let g = c.beta_grid();
            let r = norm_sweep(&f, c.q, &g, &opts, c.uniformity_threshold)?;
            (r, format!("norm_{base}_{}", range_tag(&g, "b")), json!({}))
        }
        SweepKind::WeakType => {
            let g = c.t_grid.clone().unwrap_or_else(|| log_grid(f.max_abs(), 3.0, 1.0, 10));
            let (r, est) = weak_type_check(&f, c.beta, &g, &opts)?;
            (r, format!("weaktype_{base}_b{}", c.beta), json!({ "constant": est }))
        }
        SweepKind::FarPart => {
            let g = c.beta_grid();
            let mut r = SweepReport::new("beta", &["ratio"]);
            for &b in g.iter().filter(|b| **b > 0.0) {
                r.push(vec![b, far_part_check(&f, b, c.q)?.value])?;
            }
            r.set_meta("q", c.q);
            r.check_ratios()?;
            let best = r.max_of("ratio");
            (r, format!("farpart_{base}_{}", range_tag(&g, "b")), json!({ "constant": best }))
        }
        SweepKind::NearPart => {
            let g: Vec<f64> = c.beta_grid().into_iter().filter(|b| *b > 0.0).collect();
            let r = near_part_l2_check(&f, &g, &opts, c.uniformity_threshold)?;
            (r, format!("nearpart_{base}_{}", range_tag(&g, "b")), json!({}))
        }
        SweepKind::Multiplier => {
            let g = c
                .beta_grid
                .clone()
                .unwrap_or_else(|| (1..20).map(|i| i as f64 * 0.1 * c.n as f64 / 2.0).collect());
            let r = multiplier_sup_check(c.n, &g, default_y_grid, c.quadrature_cells, c.uniformity_threshold)?;
            (r, format!("multiplier_n{}_{}", c.n, range_tag(&g, "b")), json!({}))
        }
        SweepKind::Potential => {
            let g: Vec<f64> = c.beta_grid().into_iter().filter(|b| *b > 0.0).collect();
            let pairing = match c.p {
                Some(p) => Pairing::FixedP(p),
                None => Pairing::FixedQ(c.q),
            };
            let r = riesz_potential_comparison(&f, &g, pairing)?;
            (r, format!("potential_{base}_{}", range_tag(&g, "b")), json!({}))
        }
        SweepKind::Interpolation => {
            let t = c.t.unwrap_or(0.25 * f.max_abs());
            let g: Vec<f64> = c.beta_grid().into_iter().filter(|b| *b > 0.0).collect();
            let mut r = SweepReport::new("beta", &["ratio_strong_2", "ratio_weak_1", "ratio_strong_4_3", "ratio_strong_3", "cubes"]);
            for &b in &g {
                let e = interpolation_endpoint_check(&f, t, b, &opts)?;
                r.push(vec![b, e.strong_2, e.weak_1, e.strong_p[0].1, e.strong_p[1].1, e.cubes as f64])?;
            }
            r.set_meta("t", t);
            r.check_ratios()?;
            (r, format!("interpolation_{base}_{}", range_tag(&g, "b")), json!({}))
        }
        SweepKind::Alpha => {
            let w = VorticityField::new(f.clone())?;
            let g = c.alpha_grid();
            let conv = alpha_convergence(&w, &g, c.q, opts.padding)?;
            (conv.report, format!("alpha_{base}_{}", range_tag(&g, "a")), json!({}))
        }
    };
    let mut extra = extra;
    if let (Some(o), serde_json::Value::Object(m)) = (extra.as_object_mut(), meta) {
        o.extend(m);
    }
    save_report(&report, &c.out_dir, &stem, extra)?;
    println!("wrote {}", c.out_dir.join(format!("{stem}.csv")).display());
    if let Some(u) = report.meta.get("spread") {
        println!("spread {u}");
    }
    Ok(())
}

fn cmd_czd(c: &RunConfig) -> Result<()> {
    let d = c.domain()?;
    let fs_ = c.field_spec()?;
    let f = make_test_field(&d, &fs_)?;
    let t = c.t.unwrap_or(0.25 * f.max_abs());
    let spec = KernelSpec::new(c.n, c.j, c.beta)?;
    let pad = c.padding(&fs_).max(2);
    let (t11, t12, cz) = split_t11_t12(&f, t, &spec, pad)?;
    let violations = crate::czd::invariant_violations(&f, &cz);
    let stem = format!("{}_t{t}_b{}_{}", c.tag(), c.beta, fs_.kind());
    save_field(&cz.g, &c.out_dir, &format!("g_{stem}"))?;
    save_field(&cz.b, &c.out_dir, &format!("b_{stem}"))?;
    save_field(&t11, &c.out_dir, &format!("t11_{stem}"))?;
    save_field(&t12, &c.out_dir, &format!("t12_{stem}"))?;
    let tail = if spec.beta() > 0.0 && c.q > 1.0 {
        Some(tail_bound_check(&f, t, &spec, c.q)?)
    } else {
        None
    };
    let summary = json!({
        "t": t,
        "field": fs_,
        "cubes": cz.cubes,
        "averages": cz.averages,
        "balls": cz.balls,
        "f_measure": cz.f_measure,
        "fstar_measure": cz.fstar_measure,
        "fstar_bound": cz.fstar_bound,
        "raster_slack": cz.raster_slack,
        "invariant_violations": violations,
        "tail": tail,
    });
    write_json(&summary, c.out_dir.join(format!("czd_{stem}.json")))?;
    println!("{} cubes, m(F) = {:e}, m(F*) = {:e}", cz.cubes.len(), cz.f_measure, cz.fstar_measure);
    if !violations.is_empty() {
        return Err(Error::Invariant(violations.join("; ")));
    }
    Ok(())
}

fn cmd_sqg(c: &RunConfig) -> Result<()> {
    let d = c.domain()?;
    let fs_ = c.field_spec()?;
    let w = VorticityField::new(make_test_field(&d, &fs_)?)?;
    let alpha = c.alpha.unwrap_or(0.5 * (1.0 - c.beta));
    let pad = c.padding(&fs_);
    let u = match c.route {
        RouteChoice::Spectral => velocity_spectral(&w, alpha, pad)?,
        RouteChoice::Direct => velocity_direct(&w, alpha, pad)?,
    };
    let stem = format!("{}_a{alpha}_{}", c.tag(), fs_.kind());
    u.save(&c.out_dir, &format!("u_{stem}"))?;
    let periodic = velocity_spectral(&w, alpha, 1)?;
    let conv = alpha_convergence(&w, &c.alpha_grid(), c.q, pad)?;
    let g = c.alpha_grid();
    save_report(
        &conv.report,
        &c.out_dir,
        &format!("alpha_{}_{}_{}", c.tag(), CORPUS_ID, range_tag(&g, "a")),
        json!({ "field": fs_.descriptor() }),
    )?;
    let summary = json!({
        "alpha": alpha,
        "route": c.route,
        "padding": pad,
        "c_alpha": c_alpha(alpha)?,
        "relative_divergence_periodic": relative_divergence(&periodic)?,
        "velocity_norm_q": u.lq_norm(c.q)?,
        "alpha_monotone": conv.monotone,
    });
    write_json(&summary, c.out_dir.join(format!("sqg_{stem}.json")))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

/// Report written by `selftest`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelftestReport {
    pub settings: Settings,
    pub results: Vec<CriterionResult>,
    pub passed: bool,
}

/// Runs criteria 1 to 9 at `settings`; criterion 10 reruns them and compares
/// the serialized results byte for byte.
pub fn selftest(settings: &Settings) -> Result<SelftestReport> {
    let first: Vec<CriterionResult> = (1..=9).map(|i| run_criterion(i, settings)).collect();
    let second: Vec<CriterionResult> = (1..=9).map(|i| run_criterion(i, settings)).collect();
    let same = serde_json::to_vec(&first)? == serde_json::to_vec(&second)?;
    let mut results = first;
    results.push(CriterionResult {
        id: 10,
        name: NAMES[9].into(),
        passed: same,
        summary: if same {
            "repeat run identical".into()
        } else {
            "repeat run differs".into()
        },
        values: Default::default(),
    });
    let passed = results.iter().all(|r| r.passed);
    Ok(SelftestReport {
        settings: *settings,
        results,
        passed,
    })
}

fn cmd_selftest(c: &RunConfig) -> Result<bool> {
    let mut s = Settings::reduced();
    s.threshold = c.uniformity_threshold;
    let rep = selftest(&s)?;
    let table = render(&rep.results);
    print!("{table}");
    fs::write(c.out_dir.join("selftest.txt"), &table)?;
    write_json(&rep, c.out_dir.join("selftest.json"))?;
    Ok(rep.passed)
}

fn init_threads() {
    if let Some(n) = std::env::var("FRIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if a pool already exists, in which case it is kept.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Entry point of the `frit` binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    let over = match &cli.command {
        Command::Apply(o)
        | Command::Czd(o)
        | Command::Weaktype(o)
        | Command::Multiplier(o)
        | Command::Sqg(o)
        | Command::Selftest(o) => o,
        Command::Sweep(s) => &s.over,
    };
    if let Some(factor) = over.corrupt_gamma {
        set_gamma_fault(factor);
    }
    let outcome = over.resolve().and_then(|mut c| {
        if let Command::Sweep(SweepArgs { kind: Some(k), .. }) = &cli.command {
            c.sweep = *k;
        }
        prepare_out(&c)?;
        match &cli.command {
            Command::Apply(_) => cmd_apply(&c).map(|_| true),
            Command::Sweep(_) => cmd_sweep(&c, c.sweep).map(|_| true),
            Command::Weaktype(_) => cmd_sweep(&c, SweepKind::WeakType).map(|_| true),
            Command::Multiplier(_) => cmd_sweep(&c, SweepKind::Multiplier).map(|_| true),
            Command::Czd(_) => cmd_czd(&c).map(|_| true),
            Command::Sqg(_) => cmd_sqg(&c).map(|_| true),
            Command::Selftest(_) => cmd_selftest(&c),
        }
    });
    match outcome {
        Ok(true) => 0,
        Ok(false) => 3,
        Err(e) => {
            eprintln!("frit: {e}");
            e.exit_code()
        }
    }
}
