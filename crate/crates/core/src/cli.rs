//! Command-line driver: binds problem files to analyses and renders
//! deterministic reports (schema "logdmod-report/1") in JSON or text form.

use serde::Serialize;

use crate::chart::{Chart, StratumComponent};
use crate::charvar::{ch_report, char_variety, restrict_to_stratum, split_by_support};
use crate::duality::{complex_cohomology, DualityEngine};
use crate::error::{Error, Result};
use crate::frontend::{parse_problem, z_ideal, ProblemFile, TaskCommand, TaskSpec};
use crate::gen::InstanceGen;
use crate::ncgb::{
    default_order, for_symbols_order, for_symbols_order_lex, free_resolution, left_gb, GbConfig,
    ModulePresentation, Side,
};
use crate::perverse::{
    check_ge0, check_le0, gabber_filtration, perverse_truncate, Determined, Method,
};
use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub format: Format,
    pub strict: bool,
    pub max_split_exponent: usize,
    pub order: Option<String>,
    pub cfg: GbConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            format: Format::Json,
            strict: false,
            max_split_exponent: 32,
            order: None,
            cfg: GbConfig::default(),
        }
    }
}

/// A dimension that may be empty (the empty variety / zero module).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimValue(pub Option<isize>);

impl Serialize for DimValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_i64(v as i64),
            None => s.serialize_str("empty"),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct ChartInfo {
    pub free: usize,
    pub log: usize,
    pub idealized: Vec<usize>,
    pub dim: usize,
    pub logdim: usize,
    pub generic_rank: usize,
}

impl ChartInfo {
    fn of(c: &Chart) -> Self {
        ChartInfo {
            free: c.n_free(),
            log: c.n_log(),
            idealized: c.idealized().iter().copied().collect(),
            dim: c.dim(),
            logdim: c.logdim(),
            generic_rank: c.generic_rank(),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct AliasEntry {
    pub name: String,
    pub classical: String,
}

fn aliases(c: &Chart) -> Vec<AliasEntry> {
    let mut out = Vec::new();
    for i in 1..=c.n_free() {
        out.push(AliasEntry {
            name: format!("x{}", i),
            classical: format!("x_{}", i),
        });
        out.push(AliasEntry {
            name: format!("d{}", i),
            classical: format!("d/dx_{}", i),
        });
    }
    for j in 1..=c.n_log() {
        let suffix = if c.is_idealized(j) { " (idealized)" } else { "" };
        out.push(AliasEntry {
            name: format!("t{}", j),
            classical: format!("boundary coordinate{}", suffix),
        });
        out.push(AliasEntry {
            name: format!("th{}", j),
            classical: format!("t{} d/dt{}", j, j),
        });
    }
    out
}

#[derive(Serialize, Clone, Debug)]
pub struct DualDegreeEntry {
    pub degree: isize,
    pub rank: usize,
    pub relations: Vec<String>,
    pub char_ideal: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct BoundRow {
    pub degree: isize,
    pub dim: usize,
    pub bound: isize,
    pub ok: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct RestrictEntry {
    pub degree: isize,
    pub rank: usize,
    pub relations: Vec<String>,
    pub char_ideal: Vec<String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct StratumDim {
    pub stratum: usize,
    pub dim: DimValue,
}

#[derive(Serialize, Clone, Debug)]
pub struct Le0Row {
    pub degree: isize,
    pub stratum: isize,
    pub contained: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct Ge0TableRow {
    pub stratum: usize,
    pub degree: isize,
    pub dim: DimValue,
    pub bound: isize,
    pub ok: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct TruncationOutcome {
    pub level: isize,
    pub determined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub below_degrees: Option<Vec<isize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub above_degrees: Option<Vec<isize>>,
}

#[derive(Serialize, Clone, Debug)]
pub struct GabberLevel {
    pub level: isize,
    pub method: Method,
    pub zero: bool,
    pub generators: usize,
    pub logdim: DimValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Serialize, Clone, Debug)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum TaskResult {
    Check {
        module: String,
        side: String,
        rank: usize,
        relations: usize,
        ok: bool,
    },
    Gb {
        module: String,
        order: String,
        basis: Vec<String>,
    },
    Resolve {
        module: String,
        ranks: Vec<usize>,
        matrices: Vec<Vec<String>>,
    },
    Charvar {
        module: String,
        char_ideal: Vec<String>,
        stratum_dims: Vec<StratumDim>,
        logdim_ch: DimValue,
        holonomic: bool,
        support: Vec<Vec<String>>,
    },
    Holonomic {
        module: String,
        logdim_ch: DimValue,
        holonomic: bool,
    },
    Dual {
        module: String,
        degrees: Vec<DualDegreeEntry>,
        logdim_preserved: bool,
        bounds: Vec<BoundRow>,
    },
    Restrict {
        module: String,
        stratum: Vec<usize>,
        cohomology: Vec<RestrictEntry>,
    },
    Split {
        module: String,
        k: usize,
        exponent: usize,
        sub_generators: Vec<String>,
        sub_zero: bool,
        verified: bool,
    },
    Perverse {
        module: String,
        degree: isize,
        dualized: bool,
        le0: bool,
        le0_witnesses: Vec<Le0Row>,
        ge0: bool,
        ge0_table: Vec<Ge0TableRow>,
        perverse: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        truncation: Option<TruncationOutcome>,
    },
    Gabber {
        module: String,
        method: Method,
        levels: Vec<GabberLevel>,
    },
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub schema: &'static str,
    pub chart: ChartInfo,
    pub aliases: Vec<AliasEntry>,
    pub tasks: Vec<TaskResult>,
}

pub struct RunOutcome {
    pub report: Report,
    pub undetermined_seen: bool,
}

fn module_for<'a>(
    pf: &'a ProblemFile,
    spec: &TaskSpec,
) -> Result<&'a ModulePresentation<Rat>> {
    pf.module(&spec.module)
        .ok_or_else(|| Error::Analysis(format!("unknown module '{}'", spec.module)))
}

fn require_left(m: &ModulePresentation<Rat>) -> Result<()> {
    if m.side() != Side::Left {
        return Err(Error::SideOrLocalization);
    }
    Ok(())
}

fn symbol_order(chart: &Chart, spec_order: &Option<String>, global: &Option<String>) -> crate::mono::ModOrder {
    let name = spec_order.as_deref().or(global.as_deref()).unwrap_or("degrevlex");
    if name == "lex" {
        for_symbols_order_lex(chart)
    } else {
        for_symbols_order(chart)
    }
}

/// Executes the tasks of a problem file in order.
pub fn run_problem(pf: &ProblemFile, opts: &RunOptions) -> Result<RunOutcome> {
    let cfg = opts.cfg.clone();
    let engine = DualityEngine::<Rat>::new(cfg.clone());
    let mut tasks = Vec::new();
    let mut undetermined_seen = false;
    for spec in &pf.tasks {
        let m = module_for(pf, spec)?;
        let result = match spec.command {
            TaskCommand::Check => TaskResult::Check {
                module: spec.module.clone(),
                side: match m.side() {
                    Side::Left => "left".into(),
                    Side::Right => "right".into(),
                },
                rank: m.rank(),
                relations: m.rows().len(),
                ok: true,
            },
            TaskCommand::Gb => {
                let order = symbol_order(m.chart(), &spec.order, &opts.order);
                let gb = left_gb(m.rows(), &order, &cfg);
                TaskResult::Gb {
                    module: spec.module.clone(),
                    order: spec
                        .order
                        .clone()
                        .or(opts.order.clone())
                        .unwrap_or_else(|| "degrevlex".into()),
                    basis: gb.iter().map(|v| v.display()).collect(),
                }
            }
            TaskCommand::Resolve => {
                require_left(m)?;
                let res = free_resolution(m, &cfg)?;
                TaskResult::Resolve {
                    module: spec.module.clone(),
                    ranks: res.ranks().to_vec(),
                    matrices: res
                        .diffs()
                        .iter()
                        .map(|rows| rows.iter().map(|r| r.display()).collect())
                        .collect(),
                }
            }
            TaskCommand::Charvar => {
                require_left(m)?;
                let r = ch_report(m, &cfg)?;
                TaskResult::Charvar {
                    module: spec.module.clone(),
                    char_ideal: r.char_ideal.display(),
                    stratum_dims: r
                        .stratum_dims
                        .iter()
                        .map(|(k, d)| StratumDim {
                            stratum: *k,
                            dim: DimValue(d.map(|v| v as isize)),
                        })
                        .collect(),
                    logdim_ch: DimValue(r.logdim),
                    holonomic: r.holonomic,
                    support: r.support.display(),
                }
            }
            TaskCommand::Holonomic => {
                require_left(m)?;
                let r = ch_report(m, &cfg)?;
                TaskResult::Holonomic {
                    module: spec.module.clone(),
                    logdim_ch: DimValue(r.logdim),
                    holonomic: r.holonomic,
                }
            }
            TaskCommand::Dual => {
                require_left(m)?;
                let mut degrees = Vec::new();
                for (d, h) in engine.dual_cohomology(m)? {
                    let ch = char_variety(&h, &cfg)?;
                    degrees.push(DualDegreeEntry {
                        degree: d,
                        rank: h.rank(),
                        relations: h
                            .gb(&default_order(), &cfg)
                            .iter()
                            .map(|v| v.display())
                            .collect(),
                        char_ideal: ch.to_single_ideal().display(),
                    });
                }
                let bounds = engine
                    .dual_degree_support_bounds(m)?
                    .into_iter()
                    .map(|(degree, dim, bound, ok)| BoundRow {
                        degree,
                        dim,
                        bound,
                        ok,
                    })
                    .collect();
                TaskResult::Dual {
                    module: spec.module.clone(),
                    degrees,
                    logdim_preserved: engine.check_logdim_duality(m)?,
                    bounds,
                }
            }
            TaskCommand::Restrict => {
                require_left(m)?;
                let vanishing = spec.stratum.clone().unwrap_or_default();
                let comp = StratumComponent::new(vanishing.clone());
                let out = restrict_to_stratum(m, &comp, &cfg)?;
                let mut cohomology = Vec::new();
                for (d, h) in out {
                    let ch = char_variety(&h, &cfg)?;
                    cohomology.push(RestrictEntry {
                        degree: d,
                        rank: h.rank(),
                        relations: h
                            .gb(&default_order(), &cfg)
                            .iter()
                            .map(|v| v.display())
                            .collect(),
                        char_ideal: ch.to_single_ideal().display(),
                    });
                }
                TaskResult::Restrict {
                    module: spec.module.clone(),
                    stratum: vanishing,
                    cohomology,
                }
            }
            TaskCommand::Split => {
                require_left(m)?;
                let k = spec.k.unwrap_or(1);
                let z = z_ideal(pf, spec)?;
                let s = split_by_support(m, k, &z, opts.max_split_exponent, &cfg)?;
                TaskResult::Split {
                    module: spec.module.clone(),
                    k,
                    exponent: s.exponent,
                    sub_generators: s.sub_generators.iter().map(|v| v.display()).collect(),
                    sub_zero: s.sub.is_zero_module(&cfg),
                    verified: true,
                }
            }
            TaskCommand::Perverse => {
                require_left(m)?;
                let degree = spec.degree.unwrap_or(0);
                let complex = if spec.dual {
                    engine.verdier_dual(m)?.complex.shift(-degree)
                } else {
                    engine.resolution(m)?.shift(-degree)
                };
                let le0 = check_le0(&complex, 0, &cfg)?;
                let ge0 = check_ge0(&complex, 0, &cfg)?;
                let truncation = match spec.truncate {
                    None => None,
                    Some(level) => Some(match perverse_truncate(&complex, level, &engine)? {
                        Determined::Known(tr) => TruncationOutcome {
                            level,
                            determined: true,
                            reason: None,
                            below_degrees: Some(
                                complex_cohomology(&tr.below, &cfg)?
                                    .iter()
                                    .map(|(d, _)| *d)
                                    .collect(),
                            ),
                            above_degrees: Some(
                                complex_cohomology(&tr.above, &cfg)?
                                    .iter()
                                    .map(|(d, _)| *d)
                                    .collect(),
                            ),
                        },
                        Determined::Undetermined { reason } => {
                            undetermined_seen = true;
                            TruncationOutcome {
                                level,
                                determined: false,
                                reason: Some(reason),
                                below_degrees: None,
                                above_degrees: None,
                            }
                        }
                    }),
                };
                TaskResult::Perverse {
                    module: spec.module.clone(),
                    degree,
                    dualized: spec.dual,
                    le0: le0.ok,
                    le0_witnesses: le0
                        .witnesses
                        .iter()
                        .map(|w| Le0Row {
                            degree: w.degree,
                            stratum: w.stratum,
                            contained: w.contained,
                        })
                        .collect(),
                    ge0: ge0.ok,
                    ge0_table: ge0
                        .table
                        .iter()
                        .map(|r| Ge0TableRow {
                            stratum: r.stratum,
                            degree: r.degree,
                            dim: DimValue(r.dim.map(|v| v as isize)),
                            bound: r.bound,
                            ok: r.ok,
                        })
                        .collect(),
                    perverse: le0.ok && ge0.ok,
                    truncation,
                }
            }
            TaskCommand::Gabber => {
                require_left(m)?;
                let rep = gabber_filtration(m, &engine)?;
                if rep.method == Method::Undetermined {
                    undetermined_seen = true;
                }
                TaskResult::Gabber {
                    module: spec.module.clone(),
                    method: rep.method,
                    levels: rep
                        .levels
                        .iter()
                        .map(|lv| GabberLevel {
                            level: lv.level,
                            method: lv.method,
                            zero: match &lv.presentation {
                                Some(p) => p.is_zero_module(&cfg),
                                None => false,
                            },
                            generators: lv.generators.len(),
                            logdim: DimValue(lv.logdim),
                            reason: lv.reason.clone(),
                        })
                        .collect(),
                }
            }
        };
        tasks.push(result);
    }
    Ok(RunOutcome {
        report: Report {
            schema: "logdmod-report/1",
            chart: ChartInfo::of(&pf.chart),
            aliases: aliases(&pf.chart),
            tasks,
        },
        undetermined_seen,
    })
}

/// Renders a report. Both formats are produced from the same serialized
/// value tree, so they cannot drift apart.
pub fn render(report: &Report, format: Format) -> String {
    let value = serde_json::to_value(report).expect("report serialization");
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("report serialization");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            render_value(&value, 0, None, &mut out);
            out
        }
    }
}

fn render_value(v: &serde_json::Value, indent: usize, key: Option<&str>, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            if let Some(k) = key {
                out.push_str(&format!("{}{}:\n", pad, k));
            }
            for (k, val) in map {
                render_value(val, indent + usize::from(key.is_some()), Some(k), out);
            }
        }
        serde_json::Value::Array(items) => {
            let k = key.unwrap_or("items");
            if items.is_empty() {
                out.push_str(&format!("{}{}: []\n", pad, k));
            } else {
                out.push_str(&format!("{}{}:\n", pad, k));
                for item in items {
                    match item {
                        serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                            out.push_str(&format!("{}  -\n", pad));
                            render_value(item, indent + 2, None, out);
                        }
                        other => out.push_str(&format!("{}  - {}\n", pad, scalar_str(other))),
                    }
                }
            }
        }
        other => {
            let k = key.unwrap_or("value");
            out.push_str(&format!("{}{}: {}\n", pad, k, scalar_str(other)));
        }
    }
}

fn scalar_str(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parses and runs a problem file; returns (exit code, output).
pub fn run_file_contents(text: &str, opts: &RunOptions) -> (i32, String) {
    let pf = match parse_problem(text) {
        Ok(pf) => pf,
        Err(e) => return (2, format!("error: {}\n", e)),
    };
    match run_problem(&pf, opts) {
        Ok(outcome) => {
            let out = render(&outcome.report, opts.format);
            if opts.strict && outcome.undetermined_seen {
                (4, out)
            } else {
                (0, out)
            }
        }
        Err(e) if e.is_parse() => (2, format!("error: {}\n", e)),
        Err(e) => (3, format!("error: {}\n", e)),
    }
}

// --- selftest ---

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub violations: usize,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }

    pub fn line(&self) -> String {
        format!(
            "suite {}: {} instances, {} violations: {}",
            self.name,
            self.instances,
            self.violations,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// The log Bernstein inequality on random presentations.
pub fn suite_bernstein(seed: u64, count: usize, cfg: &GbConfig) -> Result<SuiteResult> {
    let mut gen = InstanceGen::new(seed);
    let mut violations = 0;
    for _ in 0..count {
        let chart = gen.chart();
        let m = gen.presentation(&chart, cfg);
        let d = crate::charvar::log_dim_ch(&m, cfg)?;
        if let Some(d) = d {
            if d < chart.logdim() as isize {
                violations += 1;
            }
        }
    }
    Ok(SuiteResult {
        name: "bernstein",
        instances: count,
        violations,
    })
}

/// Ch(H^0(i*F)) = Ch(F)|_{X^k} as radical ideals on random instances.
pub fn suite_restriction(seed: u64, count: usize, cfg: &GbConfig) -> Result<SuiteResult> {
    let mut gen = InstanceGen::new(seed);
    let mut violations = 0;
    for _ in 0..count {
        let chart = gen.chart_with_boundary();
        let m = gen.presentation(&chart, cfg);
        for comp in chart.strata_components(1) {
            let expected = char_variety(&m, cfg)?.restrict_to_component(&comp)?;
            let out = restrict_to_stratum(&m, &comp, cfg)?;
            let h0 = out
                .iter()
                .find(|(d, _)| *d == 0)
                .map(|(_, h)| char_variety(h, cfg))
                .transpose()?
                .unwrap_or_else(|| {
                    crate::charvar::CharVariety::empty(
                        &chart.stratum_chart(&comp).expect("valid component"),
                    )
                });
            if !h0.equal_radical(&expected) {
                violations += 1;
            }
        }
    }
    Ok(SuiteResult {
        name: "restriction",
        instances: count,
        violations,
    })
}

/// dim Ch(𝔻M) = dim Ch(M) and the degree-support bounds, on random
/// instances.
pub fn suite_duality_dim(seed: u64, count: usize, cfg: &GbConfig) -> Result<SuiteResult> {
    let mut gen = InstanceGen::new(seed);
    let engine = DualityEngine::<Rat>::new(cfg.clone());
    let mut violations = 0;
    for _ in 0..count {
        let chart = gen.chart();
        let m = gen.presentation(&chart, cfg);
        let direct = char_variety(&m, cfg)?.dim();
        let mut pieces = Vec::new();
        for (_, h) in engine.dual_cohomology(&m)? {
            pieces.extend(char_variety(&h, cfg)?.pieces().to_vec());
        }
        let dual_dim = crate::charvar::CharVariety::from_pieces(&chart, pieces).dim();
        if direct != dual_dim {
            violations += 1;
        }
        for (_, _, _, ok) in engine.dual_degree_support_bounds(&m)? {
            if !ok {
                violations += 1;
            }
        }
    }
    Ok(SuiteResult {
        name: "duality-dim",
        instances: count,
        violations,
    })
}

/// V(Ch M) = V(Ch N) ∪ V(Ch M/N) for a random single-generator submodule N.
/// Runs on cyclic presentations: submodule syzygy towers over higher-rank
/// random modules can be disproportionately expensive at desk scale.
pub fn suite_additivity(seed: u64, count: usize, cfg: &GbConfig) -> Result<SuiteResult> {
    let mut gen = InstanceGen::new(seed);
    let mut violations = 0;
    for _ in 0..count {
        let chart = gen.chart();
        let m = gen.cyclic_presentation(&chart, cfg);
        let v = gen.vector(&chart, m.rank());
        let (n, q) = crate::charvar::sub_and_quotient(&m, &[v], cfg);
        let chm = char_variety(&m, cfg)?;
        let chn = char_variety(&n, cfg)?;
        let chq = char_variety(&q, cfg)?;
        let union = crate::charvar::CharVariety::from_pieces(
            &chart,
            chn.pieces().iter().chain(chq.pieces()).cloned().collect(),
        );
        if !chm.equal_radical(&union) {
            violations += 1;
        }
    }
    Ok(SuiteResult {
        name: "additivity",
        instances: count,
        violations,
    })
}

pub fn run_selftest(seed: u64, count: usize, suite: &str, cfg: &GbConfig) -> Result<Vec<SuiteResult>> {
    let mut out = Vec::new();
    if suite == "all" || suite == "bernstein" {
        out.push(suite_bernstein(seed, count, cfg)?);
    }
    if suite == "all" || suite == "restriction" {
        out.push(suite_restriction(seed.wrapping_add(1), count, cfg)?);
    }
    if suite == "all" || suite == "duality" {
        out.push(suite_duality_dim(seed.wrapping_add(2), count, cfg)?);
    }
    if suite == "all" || suite == "additivity" {
        out.push(suite_additivity(seed.wrapping_add(3), count, cfg)?);
    }
    Ok(out)
}
