//! The `curv4` command-line tool.
//!
//! Exit codes: 0 success, 1 input or usage error, 2 verification failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::analyzer::{self, AnalyzeConfig, AuditOutcome, PinchingReport};
use crate::curvature::{BuildOptions, CurvatureOperator, DEFAULT_VALIDATION_TOL};
use crate::io::{
    self, num, IoError, Record, ScanRow, ScanSummary, TensorFile, VerifySummary, VerifyTrial,
};
use crate::models::{self, ModelError, ModelSpec};
use crate::numerics::{mix_seed, RngStream, SymMatrix6};
use crate::oracle::{self, Mode, Objective, OracleConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Tolerances of the oracle-vs-closed-form check.
pub const VERIFY_ABS_TOL: f64 = 1e-6;
pub const VERIFY_REL_TOL: f64 = 1e-6;
pub const VERIFY_SOUNDNESS_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "curv4",
    version,
    about = "Pointwise curvature analysis in dimension four"
)]
pub struct Cli {
    /// Worker threads (0 = one per available core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a model tensor as a curv4-v1 file.
    Emit(EmitArgs),
    /// Decompose a tensor and check the pinching hypotheses.
    Analyze(AnalyzeArgs),
    /// Check closed-form spectra against the sampling oracle on random tensors.
    Verify(VerifyArgs),
    /// Tabulate invariants over a random ensemble.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Structured output.
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    /// Human-readable output.
    #[arg(long)]
    pub text: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    /// JSON when asked for, or when writing to a file without `--text`.
    fn wants_json(&self) -> bool {
        self.json || (self.out.is_some() && !self.text)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Seed for random models and the oracle.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random points drawn before refinement.
    #[arg(long, default_value_t = OracleConfig::default().samples)]
    pub samples: usize,
    /// Hill-climbing iterations per restart.
    #[arg(long, default_value_t = OracleConfig::default().refine_iters)]
    pub refine: usize,
    /// Best coarse candidates refined.
    #[arg(long, default_value_t = OracleConfig::default().restarts)]
    pub restarts: usize,
}

impl OracleArgs {
    fn config(&self, seed: u64) -> OracleConfig {
        OracleConfig {
            samples: self.samples,
            refine_iters: self.refine,
            restarts: self.restarts,
            seed,
            ..OracleConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EmitArgs {
    /// Model, e.g. `cp2`, `sphere:2`, `product:1,1`, `random_bianchi:1`.
    #[arg(long)]
    pub model: String,
    /// Seed for random models without an explicit one.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the component list instead of the 6×6 matrix.
    #[arg(long)]
    pub components: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// curv4-v1 tensor file.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub input: Option<PathBuf>,
    /// Named model instead of a file (same syntax as `emit --model`).
    #[arg(long)]
    pub model: Option<String>,
    /// Repair a Bianchi violation by orthogonal projection.
    #[arg(long)]
    pub project_bianchi: bool,
    /// Relative validation tolerance.
    #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
    pub tol: f64,
    /// Also estimate sectional and isotropic extrema by sampling.
    #[arg(long)]
    pub run_oracle: bool,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// `random:<scale>[,<shift>]`: Bianchi-projected Gaussian tensors plus `shift·I`.
    #[arg(long, default_value = "random:1")]
    pub ensemble: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analyze(#[from] analyzer::AnalyzeError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_INPUT;
        }
    };
    // Output is buffered so the command can run inside the worker pool.
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli.command, &mut buf));
    if let Err(e) = stdout.write_all(&buf).and_then(|_| stdout.flush()) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut Vec<u8>) -> Result<i32, CliError> {
    match cmd {
        Command::Emit(a) => cmd_emit(a, stdout),
        Command::Analyze(a) => cmd_analyze(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Scan(a) => cmd_scan(a, stdout),
    }
}

fn emit_output(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => io::write_text(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_emit(a: &EmitArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spec = ModelSpec::parse_with_seed(&a.model, a.seed)?;
    let op: CurvatureOperator<f64> = spec.build()?;
    let meta = Some(json!({ "model": spec.to_string() }));
    let file = if a.components {
        TensorFile::from_components(&op, meta)
    } else {
        TensorFile::from_matrix(&op, meta)
    };
    emit_output(&a.out, &(file.to_json() + "\n"), stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.tol >= 0.0 && a.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be finite and non-negative, got {}",
            a.tol
        )));
    }
    let opts = BuildOptions {
        project_bianchi: a.project_bianchi,
        tolerance: a.tol,
    };
    let op = match (&a.input, &a.model) {
        (Some(path), _) => io::load(path, opts)?,
        (None, Some(m)) => {
            let built: CurvatureOperator<f64> =
                ModelSpec::parse_with_seed(m, a.oracle.seed)?.build()?;
            CurvatureOperator::from_sym(*built.matrix(), opts).map_err(IoError::from)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --input or --model is required".into(),
            ))
        }
    };
    let cfg = AnalyzeConfig {
        run_oracle: a.run_oracle,
        oracle: a.oracle.config(a.oracle.seed),
    };
    cfg.oracle.validate()?;
    let report = analyzer::analyze(&op, &cfg)?;
    let text = if a.output.wants_json() {
        serde_json::to_string_pretty(&report).expect("reports always serialize") + "\n"
    } else {
        render_report(&report)
    };
    emit_output(&a.output.out, &text, stdout)?;
    Ok(EXIT_OK)
}

/// Human-readable report; every number is the same token as in the JSON form.
pub fn render_report(r: &PinchingReport<f64>) -> String {
    let mut s = String::new();
    let mut line = |t: String| {
        s.push_str(&t);
        s.push('\n');
    };
    let yn = |b: bool| if b { "holds" } else { "fails" };
    line(format!("{} (curv4 {})", r.format, r.tool_version));
    line(format!("scalar curvature s = {}", num(r.scalar)));
    line(format!("bianchi residual   = {}", num(r.bianchi_residual)));
    let ricci: Vec<String> = r
        .ricci
        .iter()
        .map(|row| format!("[{}]", row.map(num).join(", ")))
        .collect();
    line(format!("ricci              = [{}]", ricci.join(", ")));
    line(format!(
        "W+ spectrum        = [{}]",
        r.wplus.values().map(num).join(", ")
    ));
    line(format!(
        "W- spectrum        = [{}]",
        r.wminus.values().map(num).join(", ")
    ));
    line(format!(
        "biorthogonal (K1, K2, K3) = ({}, {}, {})",
        num(r.spectrum.k1),
        num(r.spectrum.k2),
        num(r.spectrum.k3)
    ));
    line(format!("scalar positive: {}", r.scalar_positive));
    line(format!(
        "hypothesis A (K1 >= s/24): {}, margin {}",
        yn(r.hypothesis_a.holds),
        num(r.hypothesis_a.margin)
    ));
    line(format!(
        "hypothesis B (K3 <= s/6):  {}, margin {}",
        yn(r.hypothesis_b.holds),
        num(r.hypothesis_b.margin)
    ));
    line(format!(
        "NNIC (w3± <= s/6): {}, margins ({}, {})",
        yn(r.nnic.holds),
        num(r.nnic.margin_plus),
        num(r.nnic.margin_minus)
    ));
    match &r.audit {
        AuditOutcome::NotApplicable { reason } => {
            line(format!("implication audit: not applicable ({reason})"))
        }
        AuditOutcome::Chain { steps, all_hold } => {
            line(format!(
                "implication audit: {}",
                if *all_hold {
                    "all steps hold"
                } else {
                    "VIOLATED"
                }
            ));
            for st in steps {
                let rel = match st.relation {
                    analyzer::Relation::Le => "<=",
                    analyzer::Relation::Ge => ">=",
                    analyzer::Relation::Eq => "==",
                };
                line(format!(
                    "  [{}] {}: {} {} {}",
                    if st.holds { "ok" } else { "FAIL" },
                    st.claim,
                    num(st.lhs),
                    rel,
                    num(st.rhs)
                ));
            }
        }
    }
    if let Some(e) = &r.sectional_extrema {
        line(format!(
            "sectional range (sampled): [{}, {}]",
            num(e.min),
            num(e.max)
        ));
    }
    if let Some(c) = &r.conjecture_check {
        line(format!(
            "K > s/24 check: {}{}, margin {}",
            yn(c.holds),
            if c.boundary { " (boundary)" } else { "" },
            num(c.margin)
        ));
    }
    if let Some(i) = &r.iso_min {
        line(format!(
            "isotropic minimum (sampled): {}, 2·min NNIC margin {}, discrepancy {}",
            num(i.min),
            num(i.eigen_prediction),
            num(i.discrepancy)
        ));
    }
    for h in &r.classification_hints {
        line(format!("hint: {h}"));
    }
    for n in &r.notes {
        line(format!("note: {n}"));
    }
    s
}

/// Runs one `verify` trial: tensor `index` of the seeded ensemble against
/// the oracle, plus the pinching implication check.
pub fn verify_trial(seed: u64, index: u64, oracle: &OracleArgs) -> Result<VerifyTrial, CliError> {
    let op = models::random_bianchi(&mut RngStream::new(seed, index), 1.0f64)?;
    let k = op
        .biortho_spectrum()
        .map_err(analyzer::AnalyzeError::from)?;
    let s = op.scalar_curvature();
    let cfg = oracle.config(mix_seed(seed, index));
    let lo = oracle::extremize(&op, Objective::Biorthogonal, Mode::Min, &cfg)?.value;
    let hi = oracle::extremize(&op, Objective::Biorthogonal, Mode::Max, &cfg)?.value;
    let close =
        |est: f64, exact: f64| (est - exact).abs() <= VERIFY_ABS_TOL + VERIFY_REL_TOL * exact.abs();
    let identity_error = (k.sum() - s / 4.0).abs();
    let identity_ok = identity_error <= IDENTITY_TOL * (1.0 + s.abs());
    let oracle_ok = close(lo, k.k1) && close(hi, k.k3);
    let sound = lo >= k.k1 - VERIFY_SOUNDNESS_TOL && hi <= k.k3 + VERIFY_SOUNDNESS_TOL;
    let check = analyzer::check_theorem1(&op)?;
    let chain_applies = check.applies();
    let chain_ok = !chain_applies
        || (analyzer::check_nnic(&op)?.holds && analyzer::implication_audit(&op)?.is_consistent());
    Ok(VerifyTrial {
        index,
        s,
        k1: k.k1,
        k2: k.k2,
        k3: k.k3,
        oracle_min: lo,
        oracle_max: hi,
        identity_error,
        identity_ok,
        oracle_ok,
        sound,
        chain_applies,
        chain_ok,
        pass: identity_ok && oracle_ok && sound && chain_ok,
    })
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let seed = a.oracle.seed;
    a.oracle.config(seed).validate()?;
    let trials: Vec<VerifyTrial> = (0..a.trials)
        .into_par_iter()
        .map(|i| verify_trial(seed, i, &a.oracle))
        .collect::<Result<_, _>>()?;
    let passed = trials.iter().filter(|t| t.pass).count() as u64;
    let summary = VerifySummary {
        trials: a.trials,
        passed,
        failed: a.trials - passed,
        chain_applicable: trials.iter().filter(|t| t.chain_applies).count() as u64,
    };

    let mut out = String::new();
    if a.output.wants_json() {
        let header = Record::Header {
            format: io::VERIFY_FORMAT.to_string(),
            tool_version: crate::TOOL_VERSION.to_string(),
            config: json!({
                "trials": a.trials,
                "seed": seed,
                "samples": a.oracle.samples,
                "refine_iters": a.oracle.refine,
                "restarts": a.oracle.restarts,
                "abs_tol": VERIFY_ABS_TOL,
                "rel_tol": VERIFY_REL_TOL,
            }),
        };
        out.push_str(&header.to_line());
        out.push('\n');
        for t in &trials {
            out.push_str(&Record::Trial(t.clone()).to_line());
            out.push('\n');
        }
        out.push_str(
            &Record::Summary(serde_json::to_value(&summary).expect("plain struct")).to_line(),
        );
        out.push('\n');
    } else {
        for t in trials.iter().filter(|t| !t.pass) {
            out.push_str(&format!(
                "trial {} FAILED: k1 {} vs oracle {}, k3 {} vs oracle {}, identity error {}, chain ok {}\n",
                t.index,
                num(t.k1),
                num(t.oracle_min),
                num(t.k3),
                num(t.oracle_max),
                num(t.identity_error),
                t.chain_ok
            ));
        }
        out.push_str(&format!(
            "{}/{} identity checks passed ({} trials satisfied a pinching hypothesis)\n",
            summary.passed, summary.trials, summary.chain_applicable
        ));
    }
    emit_output(&a.output.out, &out, stdout)?;
    Ok(if summary.failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

/// `random:<scale>[,<shift>]`.
pub fn parse_ensemble(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "invalid ensemble '{spec}' (expected random:<scale>[,<shift>])"
        ))
    };
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    if name != "random" && name != "random_bianchi" {
        return Err(bad());
    }
    let nums: Vec<f64> = if params.is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    let (scale, shift) = match nums[..] {
        [] => (1.0, 0.0),
        [scale] => (scale, 0.0),
        [scale, shift] => (scale, shift),
        _ => return Err(bad()),
    };
    if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
        return Err(bad());
    }
    Ok((scale, shift))
}

/// Ensemble member `index`: a random Bianchi tensor plus `shift·I`.
pub fn ensemble_member(
    seed: u64,
    index: u64,
    scale: f64,
    shift: f64,
) -> Result<CurvatureOperator<f64>, CliError> {
    let base = models::random_bianchi(&mut RngStream::new(seed, index), scale)?;
    let m = base.matrix().add(&SymMatrix6::scaled_identity(shift));
    Ok(CurvatureOperator::unvalidated(m))
}

pub fn scan_row(index: u64, op: &CurvatureOperator<f64>) -> Result<ScanRow, CliError> {
    let k = op
        .biortho_spectrum()
        .map_err(analyzer::AnalyzeError::from)?;
    let d = op.decompose();
    let check = analyzer::check_theorem1(op)?;
    let nnic = analyzer::check_nnic(op)?;
    Ok(ScanRow {
        index,
        s: d.scalar,
        k1: k.k1,
        k2: k.k2,
        k3: k.k3,
        w3_plus: d
            .wplus_spectrum()
            .map_err(analyzer::AnalyzeError::from)?
            .max(),
        w3_minus: d
            .wminus_spectrum()
            .map_err(analyzer::AnalyzeError::from)?
            .max(),
        scalar_positive: check.scalar_positive,
        hypothesis_a: check.hypothesis_a.holds,
        hypothesis_b: check.hypothesis_b.holds,
        nnic: nnic.holds,
    })
}

pub fn cmd_scan(a: &ScanArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (scale, shift) = parse_ensemble(&a.ensemble)?;
    let rows: Vec<ScanRow> = (0..a.trials)
        .into_par_iter()
        .map(|i| scan_row(i, &ensemble_member(a.seed, i, scale, shift)?))
        .collect::<Result<_, _>>()?;
    let n = a.trials.max(1) as f64;
    let frac = |f: &dyn Fn(&ScanRow) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / n;
    let summary = ScanSummary {
        trials: a.trials,
        frac_scalar_positive: frac(&|r| r.scalar_positive),
        frac_hypothesis_a: frac(&|r| r.hypothesis_a),
        frac_hypothesis_b: frac(&|r| r.hypothesis_b),
        frac_nnic: frac(&|r| r.nnic),
        implication_violations: rows
            .iter()
            .filter(|r| r.scalar_positive && (r.hypothesis_a || r.hypothesis_b) && !r.nnic)
            .count() as u64,
    };
    let mut out = Record::Header {
        format: io::SCAN_FORMAT.to_string(),
        tool_version: crate::TOOL_VERSION.to_string(),
        config: json!({ "ensemble": a.ensemble, "scale": scale, "shift": shift, "trials": a.trials, "seed": a.seed }),
    }
    .to_line();
    out.push('\n');
    for r in rows {
        out.push_str(&Record::Row(r).to_line());
        out.push('\n');
    }
    out.push_str(&Record::Summary(serde_json::to_value(&summary).expect("plain struct")).to_line());
    out.push('\n');
    emit_output(&a.out, &out, stdout)?;
    Ok(EXIT_OK)
}
