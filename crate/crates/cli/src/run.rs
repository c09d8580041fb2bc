//! Orchestration of the subcommands and the JSON report.

use std::path::Path;

use orbsym::expr::{equals, is_zero, Cx, Expr};
use orbsym::numverify::{
    conserved_drift, estimate_frequency, integrate_orbit, kepler_energy, oscillator_residual,
    particular_residual, quantity_drift, reduced_env, symmetry_defect, NumError, CANDIDATE_TOLERANCE,
};
use orbsym::problems::{conserved_quantities, Family, ProblemSpec};
use orbsym::reduce::{pair_residuals, reduce_direct, reduce_nucci, Pipeline, ReduceError, ReducedSystem};
use orbsym::symbols as sym;
use orbsym::symmetry::{certify_micz_catalog, determining_residual, numeric_rank, reduced_catalog, CatalogEntry, Generator};
use orbsym::{DefectOptions, OrbitOptions, Trajectory};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{exact, GridPoint, InitialState, RunConfig};

pub const SCHEMA_VERSION: &str = "1.0";
pub const DEFAULT_SEED: u64 = 20240917;

const DRIFT_LIMIT: f64 = 1e-7;
const OSCILLATOR_LIMIT: f64 = 1e-5;
const PIPELINE_LIMIT: f64 = 1e-6;
const FREQUENCY_LIMIT: f64 = 1e-5;
const PARTICULAR_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Reduce,
    Symmetries,
    Verify,
    Orbit,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status, value: None, threshold: None, detail: detail.into() }
    }

    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        let status = if value < threshold { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, value: Some(value), threshold: Some(threshold), detail: String::new() }
    }

    fn flag(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check::new(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    fn error(name: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Check::new(name, Status::Error, e.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    pub pipeline: Pipeline,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equations: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u1: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<ReducedSystem>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedGenerator {
    pub generator: Generator,
    pub residual: [Cx; 2],
    pub zero: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Symmetries {
    pub reduced: Vec<ReducedGenerator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub original: Vec<CatalogEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyPoint {
    pub lambda: f64,
    pub nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<orbsym::FrequencyEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Disambiguation {
    pub points: Vec<FrequencyPoint>,
    pub verdict: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryInfo {
    pub path: String,
    pub samples: usize,
    pub t_final: f64,
    pub singular: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: Command,
    pub seed: u64,
    pub family: Family,
    pub special_case: bool,
    pub reductions: Vec<Reduction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetries: Option<Symmetries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disambiguation: Option<Disambiguation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryInfo>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errored == 0
    }
}

pub struct Options<'a> {
    pub seed: u64,
    pub parallel: bool,
    /// Trajectory CSV destination for `orbit` and `full`.
    pub csv: Option<&'a Path>,
}

fn par_map<T: Sync, R: Send>(parallel: bool, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    opts: &'a Options<'a>,
    checks: Vec<Check>,
    direct: Option<ReducedSystem>,
    nucci: Option<ReducedSystem>,
}

pub fn run(cmd: Command, cfg: &RunConfig, opts: &Options) -> Report {
    let mut r = Runner { cfg, opts, checks: Vec::new(), direct: None, nucci: None };
    let reductions = r.reduce(matches!(cmd, Command::Reduce | Command::Full));
    let symmetries = matches!(cmd, Command::Symmetries | Command::Full).then(|| r.symmetries());
    let disambiguation = if matches!(cmd, Command::Verify | Command::Full) { r.verify() } else { None };
    let trajectory = if matches!(cmd, Command::Orbit | Command::Full) { r.orbit() } else { None };
    let mut summary = Summary::default();
    for c in &r.checks {
        match c.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Error => summary.errored += 1,
            Status::Skipped => summary.skipped += 1,
        }
    }
    Report {
        schema_version: SCHEMA_VERSION,
        command: cmd,
        seed: opts.seed,
        family: cfg.spec.family,
        special_case: cfg.spec.special_case(),
        reductions: if matches!(cmd, Command::Reduce | Command::Full) { reductions } else { Vec::new() },
        symmetries,
        disambiguation,
        trajectory,
        checks: r.checks,
        summary,
    }
}

fn orbit_options(cfg: &RunConfig) -> OrbitOptions {
    OrbitOptions { tol: cfg.raw.tol, r_min: cfg.raw.r_min, t_end: cfg.raw.t_end, ..Default::default() }
}

fn integrate(spec: &ProblemSpec, s0: &InitialState, cfg: &RunConfig) -> Result<Trajectory, NumError> {
    integrate_orbit(spec, s0.state(), orbit_options(cfg))
}

fn pipeline_name(p: Pipeline) -> &'static str {
    match p {
        Pipeline::Direct => "direct",
        Pipeline::Nucci => "nucci",
    }
}

fn render(rs: &ReducedSystem) -> Reduction {
    let x = &rs.independent;
    let lhs = Expr::Sym(sym::jet(&sym::u1(), x, 2)) + rs.omega_sq.clone() * sym::u1().expr();
    let first = if rs.linearizable {
        format!("{} = 0", orbsym::expr::canonicalize(&lhs).to_infix())
    } else {
        let eq = rs.nonlinear_equation.as_ref().unwrap_or(&rs.forcing);
        format!("{} = 0", eq.to_infix())
    };
    Reduction {
        pipeline: rs.pipeline,
        status: if rs.linearizable { "linearizable".into() } else { "not linearizable".into() },
        equations: Some([first, format!("{} = 0", rs.conservation().to_infix())]),
        u1: Some(rs.u1_def.to_infix()),
        u2: Some(rs.u2_def.to_infix()),
        system: Some(rs.clone()),
    }
}

impl Runner<'_> {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn reduce(&mut self, record: bool) -> Vec<Reduction> {
        let spec = &self.cfg.spec;
        let mut out = Vec::new();
        for (pipeline, result) in [(Pipeline::Direct, reduce_direct(spec)), (Pipeline::Nucci, reduce_nucci(spec))] {
            let name = format!("reduce.{}", pipeline_name(pipeline));
            let rs = match result {
                Ok(rs) => rs,
                Err(e @ ReduceError::Unsupported { .. }) => {
                    if record {
                        self.push(Check::new(&name, Status::Skipped, e.to_string()));
                    }
                    out.push(Reduction { pipeline, status: e.to_string(), equations: None, u1: None, u2: None, system: None });
                    continue;
                }
                Err(e) => {
                    self.push(Check::error(&name, e));
                    continue;
                }
            };
            if record {
                let failing: Vec<_> = rs.trace.iter().filter(|s| !s.verified).map(|s| s.label.as_str()).collect();
                self.push(Check::flag(format!("{name}.trace"), failing.is_empty(), failing.join(", ")));
                match pair_residuals(spec, &rs) {
                    Ok((a, b)) => self.push(Check::flag(
                        format!("{name}.residuals"),
                        is_zero(&a) && is_zero(&b),
                        format!("oscillator {}; conservation {}", a.to_infix(), b.to_infix()),
                    )),
                    Err(e) => self.push(Check::error(format!("{name}.residuals"), e)),
                }
            }
            out.push(render(&rs));
            match pipeline {
                Pipeline::Direct => self.direct = Some(rs),
                Pipeline::Nucci => self.nucci = Some(rs),
            }
        }
        if let (true, Some(d), Some(n)) = (record, &self.direct, &self.nucci) {
            let same = equals(&d.omega_sq, &n.omega_sq);
            self.push(Check::flag("reduce.agreement", same, format!("Ω² = {} and {}", d.omega_sq.to_infix(), n.omega_sq.to_infix())));
        }
        out
    }

    /// Parameter values for sampled-point checks: the problem parameters and
    /// the constants of the configured orbit.
    fn sample_params(&self, rs: &ReducedSystem) -> Result<orbsym::Env, NumError> {
        let short = OrbitOptions { t_end: self.cfg.raw.t_end.min(1.0), ..orbit_options(self.cfg) };
        let traj = integrate_orbit(&self.cfg.spec, self.cfg.raw.initial.state(), short)?;
        reduced_env(&traj, rs)
    }

    fn symmetries(&mut self) -> Symmetries {
        let mut out = Symmetries::default();
        let Some(rs) = self.direct.clone() else {
            self.push(Check::new("symmetries.reduced", Status::Skipped, "no direct reduction"));
            return out;
        };
        if !rs.linearizable {
            self.push(Check::new("symmetries.reduced", Status::Skipped, "reduced equation is not linearizable"));
            return out;
        }
        match reduced_catalog(&rs) {
            Ok(cat) => {
                let results = par_map(self.opts.parallel, &cat, |g| determining_residual(g, &rs));
                for (g, res) in cat.iter().zip(results) {
                    let name = format!("symmetries.reduced.{}", g.name);
                    match res {
                        Ok(residual) => {
                            let zero = residual.iter().all(Cx::is_zero);
                            self.push(Check::flag(&name, zero, residual.iter().map(Cx::to_infix).collect::<Vec<_>>().join("; ")));
                            out.reduced.push(ReducedGenerator { generator: g.clone(), residual, zero });
                        }
                        Err(e) => self.push(Check::error(&name, e)),
                    }
                }
                self.push(Check::flag("symmetries.reduced.count", cat.len() == 9, format!("{} generators", cat.len())));
                match self.sample_params(&rs).map_err(|e| e.to_string()).and_then(|env| {
                    numeric_rank(&cat, &env, 5, self.opts.seed).map_err(|e| e.to_string())
                }) {
                    Ok(rank) => {
                        out.rank = Some(rank);
                        self.push(Check::flag("symmetries.reduced.rank", rank == 9, format!("rank {rank}")));
                    }
                    Err(e) => self.push(Check::error("symmetries.reduced.rank", e)),
                }
            }
            Err(e) => self.push(Check::error("symmetries.reduced", e)),
        }
        let spec = &self.cfg.spec;
        if spec.family == Family::Kepler || spec.special_case() {
            match certify_micz_catalog(spec) {
                Ok(entries) => {
                    for e in &entries {
                        let detail = match (e.printed.verified, &e.amended) {
                            (true, _) => "printed reading certifies".to_string(),
                            (false, Some(a)) if a.verified => "amended reading certifies".to_string(),
                            (false, Some(_)) => "neither reading certifies".to_string(),
                            (false, None) => "printed reading does not certify".to_string(),
                        };
                        self.push(Check::flag(format!("symmetries.original.{}", e.name), e.accepted().is_some(), detail));
                    }
                    out.original = entries;
                }
                Err(e) => self.push(Check::error("symmetries.original", e)),
            }
        } else {
            self.push(Check::new("symmetries.original", Status::Skipped, "no catalog in original variables for this family"));
        }
        out
    }

    fn verify(&mut self) -> Option<Disambiguation> {
        let cfg = self.cfg;
        let spec = &cfg.spec;
        let traj = match integrate(spec, &cfg.raw.initial, cfg) {
            Ok(t) => t,
            Err(e) => {
                self.push(Check::error("verify.integration", e));
                return None;
            }
        };
        self.push(Check::new(
            "verify.integration",
            Status::Pass,
            if traj.singular { "stopped at the r_min guard" } else { "reached t_end" },
        ));
        match conserved_quantities(spec) {
            Ok(qs) => {
                for q in qs {
                    let name = format!("verify.drift.{}", q.name);
                    match quantity_drift(&traj, &q) {
                        Ok(d) => self.push(Check::below(name, d, DRIFT_LIMIT)),
                        Err(e) => self.push(Check::error(name, e)),
                    }
                }
            }
            Err(e) => self.push(Check::error("verify.drift", e)),
        }
        if spec.family == Family::Kepler && traj.singular {
            self.push(Check::new("verify.drift.energy", Status::Skipped, "skipped: orbit reaches the r_min guard"));
        } else if spec.family == Family::Kepler {
            let energy = orbsym::expr::substitute(&kepler_energy(), &[(sym::mu(), spec.mu.clone())].into());
            match energy.map_err(NumError::from).and_then(|e| conserved_drift(&traj, &e)) {
                Ok(d) => self.push(Check::below("verify.drift.energy", d, DRIFT_LIMIT)),
                Err(e) => self.push(Check::error("verify.drift.energy", e)),
            }
        }
        let reduced: Vec<ReducedSystem> = [&self.direct, &self.nucci].into_iter().flatten().cloned().collect();
        for rs in reduced.iter().filter(|rs| rs.linearizable) {
            let name = format!("verify.oscillator.{}", pipeline_name(rs.pipeline));
            match oscillator_residual(&traj, rs) {
                Ok(v) => self.push(Check::below(name, v, OSCILLATOR_LIMIT)),
                Err(NumError::Degenerate(why)) => self.push(Check::new(name, Status::Skipped, format!("skipped: {why}"))),
                Err(e) => self.push(Check::error(name, e)),
            }
        }
        if reduced.len() == 2 && reduced.iter().all(|rs| rs.linearizable) {
            self.pipelines(&reduced);
        }
        let direct = self.direct.clone()?;
        if !direct.linearizable {
            return None;
        }
        if direct.angle_scale.as_num().is_some() {
            self.frequency(&traj, &direct);
            self.defects(&traj, &direct);
        }
        if spec.family == Family::KeplerDrag {
            self.particular(&traj, &direct);
        }
        if spec.family == Family::Micz && !spec.special_case() {
            return Some(self.disambiguate());
        }
        None
    }

    fn pipelines(&mut self, reduced: &[ReducedSystem]) {
        let cfg = self.cfg;
        let runs = par_map(self.opts.parallel, &cfg.orbits, |s0| -> Result<Option<f64>, NumError> {
            let traj = integrate(&cfg.spec, s0, cfg)?;
            let mut worst: f64 = 0.0;
            for rs in reduced {
                match oscillator_residual(&traj, rs) {
                    Ok(v) => worst = worst.max(v),
                    Err(NumError::Degenerate(_)) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Ok(Some(worst))
        });
        let (mut worst, mut used): (f64, usize) = (0.0, 0);
        for r in runs {
            match r {
                Ok(Some(v)) => {
                    worst = worst.max(v);
                    used += 1;
                }
                Ok(None) => {}
                Err(e) => return self.push(Check::error("verify.pipelines", e)),
            }
        }
        if used == 0 {
            return self.push(Check::new("verify.pipelines", Status::Skipped, "skipped: u2 = 0 on every orbit"));
        }
        let mut c = Check::below("verify.pipelines", worst, PIPELINE_LIMIT);
        c.detail = if used == cfg.orbits.len() {
            format!("both pipelines along {used} orbits")
        } else {
            format!("both pipelines along {used} of {} orbits, the rest have u2 = 0", cfg.orbits.len())
        };
        self.push(c);
    }

    fn frequency(&mut self, traj: &Trajectory, rs: &ReducedSystem) {
        match estimate_frequency(traj, rs) {
            Ok(est) => {
                let rel = est.candidates.iter().map(|c| c.relative_error).fold(f64::INFINITY, f64::min);
                let mut c = Check::below("verify.frequency", rel, FREQUENCY_LIMIT);
                c.detail = format!("fitted {:.12}", est.fitted);
                self.push(c);
            }
            Err(NumError::Degenerate(why)) => self.push(Check::new("verify.frequency", Status::Skipped, format!("skipped: {why}"))),
            Err(e) => self.push(Check::error("verify.frequency", e)),
        }
    }

    fn defects(&mut self, traj: &Trajectory, rs: &ReducedSystem) {
        let cat = match reduced_catalog(rs) {
            Ok(c) => c,
            Err(e) => return self.push(Check::error("verify.defect", e)),
        };
        let control = Generator::new(
            &format!("u1 d_{}", rs.independent.name()),
            vec![rs.independent.clone(), sym::u1(), sym::u2()],
            sym::u1().expr().into(),
            vec![Cx::zero(), Cx::zero()],
        );
        let opts = DefectOptions { eps: self.cfg.raw.defect_eps, ..Default::default() };
        let results = par_map(self.opts.parallel, &cat, |g| symmetry_defect(traj, rs, g, opts));
        for (g, m) in cat.iter().zip(results) {
            let name = format!("verify.defect.{}", g.name);
            match m {
                Ok(m) => {
                    let detail = if m.exact {
                        format!("exact: defects {:.2e}, {:.2e} at the floor", m.defect, m.defect_half)
                    } else {
                        format!("ratio {:.4}", m.ratio)
                    };
                    let mut c = Check::flag(name, m.accepted, detail);
                    c.value = Some(m.ratio);
                    self.push(c);
                }
                Err(NumError::Degenerate(why)) => self.push(Check::new(name, Status::Skipped, format!("skipped: {why}"))),
                Err(e) => self.push(Check::error(name, e)),
            }
        }
        let name = "verify.defect.negative_control";
        let control = match control {
            Ok(g) => g,
            Err(e) => return self.push(Check::error(name, e)),
        };
        match symmetry_defect(traj, rs, &control, opts) {
            Err(NumError::Degenerate(why)) => self.push(Check::new(name, Status::Skipped, format!("skipped: {why}"))),
            Ok(m) => {
                let mut c = Check::flag(name, m.ratio < 3.0, format!("ratio {:.4} must stay below 3", m.ratio));
                c.value = Some(m.ratio);
                self.push(c);
            }
            Err(e) => self.push(Check::error(name, e)),
        }
    }

    fn particular(&mut self, traj: &Trajectory, rs: &ReducedSystem) {
        let name = "verify.particular_solution";
        let Some(v) = rs.particular_solution.clone() else {
            return self.push(Check::new(name, Status::Skipped, "no particular solution"));
        };
        let result = reduced_env(traj, rs).and_then(|env| {
            let a = traj.initial().angle + 0.05;
            particular_residual(&v, &rs.forcing, rs.independent.name(), &env, a, a + std::f64::consts::TAU, 50, 1e-2)
        });
        match result {
            Ok(res) => self.push(Check::below(name, res, PARTICULAR_LIMIT)),
            Err(e) => self.push(Check::error(name, e)),
        }
    }

    fn disambiguate(&mut self) -> Disambiguation {
        let cfg = self.cfg;
        let points = par_map(self.opts.parallel, &cfg.grid, |p: &GridPoint| {
            let run = || -> Result<orbsym::FrequencyEstimate, String> {
                let spec = cfg
                    .spec
                    .clone()
                    .with_lambda(exact("grid.lambda", p.lambda).map_err(|e| e.to_string())?)
                    .with_nu(exact("grid.nu", p.nu).map_err(|e| e.to_string())?);
                let rs = reduce_direct(&spec).map_err(|e| e.to_string())?;
                let traj = integrate(&spec, &cfg.raw.initial, cfg).map_err(|e| e.to_string())?;
                estimate_frequency(&traj, &rs).map_err(|e| e.to_string())
            };
            match run() {
                Ok(est) => FrequencyPoint { lambda: p.lambda, nu: p.nu, estimate: Some(est), error: None },
                Err(e) => FrequencyPoint { lambda: p.lambda, nu: p.nu, estimate: None, error: Some(e) },
            }
        });
        let verdicts: Vec<Option<String>> =
            points.iter().map(|p| p.estimate.as_ref().and_then(|e| e.verdict.clone())).collect();
        let consistent = !verdicts.is_empty() && verdicts.iter().all(|v| v.is_some() && *v == verdicts[0]);
        let verdict = if consistent { verdicts[0].clone() } else { None };
        let name = "verify.omega_disambiguation";
        if let Some(p) = points.iter().find(|p| p.error.is_some()) {
            self.push(Check::error(name, format!("λ = {}, ν = {}: {}", p.lambda, p.nu, p.error.as_deref().unwrap_or(""))));
        } else {
            let detail = match &verdict {
                Some(v) => format!("candidate {v} within {CANDIDATE_TOLERANCE:e} at all {} grid points", points.len()),
                None => format!("no consistent unique candidate: {verdicts:?}"),
            };
            self.push(Check::flag(name, consistent, detail));
        }
        Disambiguation { points, verdict }
    }

    fn orbit(&mut self) -> Option<TrajectoryInfo> {
        let cfg = self.cfg;
        let Some(path) = self.opts.csv else {
            self.push(Check::new("orbit.export", Status::Skipped, "no CSV destination"));
            return None;
        };
        let traj = match integrate(&cfg.spec, &cfg.raw.initial, cfg) {
            Ok(t) => t,
            Err(e) => {
                self.push(Check::error("orbit.export", e));
                return None;
            }
        };
        match write_csv(path, &traj) {
            Ok(()) => {
                self.push(Check::new("orbit.export", Status::Pass, path.display().to_string()));
                Some(TrajectoryInfo {
                    path: path.display().to_string(),
                    samples: traj.samples.len(),
                    t_final: traj.samples.last().map(|s| s.t).unwrap_or(0.0),
                    singular: traj.singular,
                })
            }
            Err(e) => {
                self.push(Check::error("orbit.export", e));
                None
            }
        }
    }
}

pub fn write_csv(path: &Path, traj: &Trajectory) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "r", "r_dot", "angle", "angle_dot"])?;
    for s in &traj.samples {
        w.write_record([s.t, s.r, s.r_dot, s.angle, s.angle_dot].map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Short human-readable digest of the report.
pub fn text_summary(report: &Report) -> String {
    let mut s = format!("orbsym {:?} on {}\n", report.command, report.family.name());
    for r in &report.reductions {
        match &r.equations {
            Some([a, b]) => s.push_str(&format!("  {}: {a}, {b}\n", pipeline_name(r.pipeline))),
            None => s.push_str(&format!("  {}: {}\n", pipeline_name(r.pipeline), r.status)),
        }
    }
    for c in &report.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERR ",
            Status::Skipped => "SKIP",
        };
        match c.value {
            Some(v) => s.push_str(&format!("  {tag} {} = {v:.3e}\n", c.name)),
            None => s.push_str(&format!("  {tag} {}\n", c.name)),
        }
    }
    let m = &report.summary;
    s.push_str(&format!("  {} passed, {} failed, {} errored, {} skipped\n", m.passed, m.failed, m.errored, m.skipped));
    s
}
