//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input validation, 3 solver failure, 4 failed
//! harness assertion. `GAUSSRT_TOL` overrides the QCM validation and
//! membership tolerances.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussrt_core::channels::{CmMap, NoiseKernel};
use gaussrt_core::cones::{cone_spec, kappa_with, KappaOptions, Method, Theory, MEMBERSHIP_TOL};
use gaussrt_core::linalg::HermMatrix;
use gaussrt_core::states::{make_state, GaussianState, StateKind};
use gaussrt_core::symplectic::validate_qcm;
use gaussrt_core::{Matrix, ModePartition, DEFAULT_TOL};
use serde_json::{json, Value};
use thiserror::Error;

use crate::document::{CmDocument, DocumentError};
use crate::format::{fmt_num, round_json, to_json_string};
use crate::harness::{ExperimentConfig, HarnessError, Suite};

pub const TOL_ENV: &str = "GAUSSRT_TOL";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Assertion(_) => 4,
        }
    }
}

impl From<gaussrt_core::Error> for CliError {
    fn from(e: gaussrt_core::Error) -> Self {
        use gaussrt_core::Error as E;
        match e {
            E::Solver { .. } | E::InvalidBracket { .. } | E::MalformedProblem(_) => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Core(c) => c.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Core(c) => c.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "gaussrt",
    version,
    about = "Gaussian resource quantifiers from covariance matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a covariance-matrix document for a standard state.
    Gen(GenArgs),
    /// Compute kappa and upsilon for a state.
    Kappa(KappaArgs),
    /// Emit the dual witness of the upsilon program.
    Witness(WitnessArgs),
    /// Apply a Gaussian channel to a document.
    Channel(ChannelArgs),
    /// Run verification suites and write a JSON report.
    Harness(HarnessArgs),
    /// Check that a document holds a valid quantum covariance matrix.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Vacuum,
    Coherent,
    Thermal,
    Squeezed,
    Tmsv,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    #[arg(long, default_value_t = 1)]
    pub modes: usize,
    /// Squeezing parameter.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Squeezing angle.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Mean thermal photon number.
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Mean vector for `coherent`, comma separated in xxpp order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Vec<f64>,
    #[arg(long)]
    pub partition: Option<String>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Analytic,
    Sdp,
    Bisection,
    Both,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub theory: Theory,
    #[arg(long)]
    pub input: PathBuf,
    /// Overrides the document's labels: `2:1`, `A=2:B=1` or `A,B,A`.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub state: StateArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelName {
    Loss,
    Displace,
    Beamsplitter,
    Symplectic,
    Ancilla,
    Discard,
}

#[derive(Clone, Debug, Args)]
pub struct ChannelArgs {
    pub kind: Option<ChannelName>,
    /// Inline form, e.g. `loss:eta=0.5,nbar=0` or `beamsplitter:theta=0.7,pair=0-1`.
    #[arg(long, conflicts_with = "kind")]
    pub apply: Option<String>,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Transmissivity of `loss`.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Thermal photon number of `loss` or of an `ancilla`.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Added noise variance `sigma * I` for `displace`.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Mode pair of `beamsplitter`, e.g. `0-1`.
    #[arg(long)]
    pub pair: Option<String>,
    /// Modes acted on (`loss`) or kept (`discard`), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub modes: Vec<usize>,
    /// JSON file with the rows of a symplectic matrix.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Party label of an `ancilla` mode.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args)]
pub struct HarnessArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Theory name or `all`; overrides the config file.
    #[arg(long)]
    pub theory: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Report path; the summary still goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// Tolerances in effect for this run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub qcm: f64,
    pub membership: f64,
}

impl Tolerances {
    pub fn from_env() -> CliResult<Self> {
        match std::env::var(TOL_ENV) {
            Ok(text) => {
                let t: f64 = text.trim().parse().map_err(|_| {
                    CliError::Validation(format!("{TOL_ENV}={text} is not a number"))
                })?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Validation(format!("{TOL_ENV} must be positive")));
                }
                Ok(Self {
                    qcm: t,
                    membership: t,
                })
            }
            Err(_) => Ok(Self {
                qcm: DEFAULT_TOL,
                membership: MEMBERSHIP_TOL,
            }),
        }
    }
}

/// Parses `2:1` (mode counts for `A:B`), `A=2:B=1` (named counts), `A:B`
/// (an even split) or `A,B,A` (one label per mode).
pub fn parse_partition(text: &str, modes: usize) -> CliResult<ModePartition> {
    let bad = |why: &str| CliError::Validation(format!("bad partition `{text}`: {why}"));
    let p = if text.contains(',') {
        ModePartition::new(text.split(',').map(str::trim))?
    } else if text.contains(':') {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(bad("expected two parties"));
        }
        let named: Vec<(String, usize)> = if parts.iter().all(|s| s.parse::<usize>().is_ok()) {
            vec![
                ("A".into(), parts[0].parse().unwrap()),
                ("B".into(), parts[1].parse().unwrap()),
            ]
        } else if parts.iter().all(|s| s.contains('=')) {
            parts
                .iter()
                .map(|s| {
                    let (l, c) = s.split_once('=').expect("checked");
                    c.trim()
                        .parse()
                        .map(|c| (l.trim().to_string(), c))
                        .map_err(|_| bad("count is not an integer"))
                })
                .collect::<CliResult<_>>()?
        } else {
            if !modes.is_multiple_of(2) {
                return Err(bad("labels without counts need an even number of modes"));
            }
            vec![(parts[0].into(), modes / 2), (parts[1].into(), modes / 2)]
        };
        ModePartition::new(
            named
                .iter()
                .flat_map(|(l, c)| std::iter::repeat_n(l.clone(), *c)),
        )?
    } else {
        ModePartition::new(std::iter::repeat_n(text.trim(), modes))?
    };
    if p.n_modes() != modes {
        return Err(bad(&format!(
            "covers {} modes, the state has {modes}",
            p.n_modes()
        )));
    }
    Ok(p)
}

fn load_state(path: &Path, partition: Option<&str>, tol: &Tolerances) -> CliResult<GaussianState> {
    let doc = CmDocument::load(path)?;
    let p = partition
        .map(|t| parse_partition(t, doc.modes))
        .transpose()?;
    Ok(doc.to_state(tol.qcm, p)?)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .map_err(|e| CliError::Validation(format!("cannot write to stdout: {e}")))
        }
    }
}

fn print_json(v: &Value) -> CliResult<()> {
    let text = to_json_string(v).map_err(|e| CliError::Validation(e.to_string()))?;
    emit(None, &(text + "\n"))
}

fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    let kind = match a.kind {
        GenKind::Vacuum => StateKind::Vacuum { modes: a.modes },
        GenKind::Coherent => StateKind::Coherent { u: a.u.clone() },
        GenKind::Thermal => StateKind::Thermal {
            nbar: a.nbar,
            modes: a.modes,
        },
        GenKind::Squeezed => StateKind::Squeezed { r: a.r, phi: a.phi },
        GenKind::Tmsv => StateKind::Tmsv { r: a.r },
    };
    let mut st = make_state(&kind, None)?;
    if let Some(t) = &a.partition {
        st.partition = parse_partition(t, st.n_modes())?;
    }
    emit(
        a.out.as_deref(),
        &(CmDocument::from_state(&st).to_json() + "\n"),
    )
}

fn resolve_method(m: MethodArg) -> Method {
    match m {
        MethodArg::Auto | MethodArg::Both => Method::Auto,
        MethodArg::Analytic => Method::Analytic,
        MethodArg::Sdp => Method::Sdp,
        MethodArg::Bisection => Method::Bisection,
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::Analytic => "analytic",
        Method::Sdp => "sdp",
        Method::Bisection => "bisection",
    }
}

fn cmd_kappa(a: &KappaArgs, tol: &Tolerances) -> CliResult<()> {
    let st = load_state(&a.state.input, a.state.partition.as_deref(), tol)?;
    let spec = cone_spec(a.state.theory, &st.partition)?;
    let opts = |method| KappaOptions {
        method,
        member_tol: tol.membership,
        witness: false,
        ..KappaOptions::default()
    };
    let v = st.cov();
    let primary = if a.method == MethodArg::Both {
        if !a.state.theory.has_analytic() {
            return Err(CliError::Validation(format!(
                "--method both needs a closed form, which {} lacks",
                a.state.theory
            )));
        }
        Method::Analytic
    } else {
        resolve_method(a.method)
    };
    let mut r = kappa_with(v, &spec, &opts(primary))?;
    if r.upsilon.is_none() {
        r.upsilon = Some(1.0 / r.xi);
    }
    let mut out = json!({
        "theory": a.state.theory.name(),
        "partition": st.partition.labels(),
        "method": method_name(r.method),
        "kappa": r.kappa,
        "upsilon": r.upsilon,
        "member": r.member,
    });
    if a.method == MethodArg::Both {
        let s = kappa_with(v, &spec, &opts(Method::Sdp))?;
        out["method"] = json!("both");
        out["agreement"] = json!({
            "analytic": r.kappa,
            "sdp": s.kappa,
            "difference": (r.kappa - s.kappa).abs(),
        });
    }
    if a.state.json {
        return print_json(&out);
    }
    let mut text = String::new();
    for key in ["theory", "method", "kappa", "upsilon", "member"] {
        text += &format!("{key}: {}\n", plain(&out[key]));
    }
    if let Some(ag) = out.get("agreement") {
        for key in ["analytic", "sdp", "difference"] {
            text += &format!("{key}: {}\n", plain(&ag[key]));
        }
    }
    emit(None, &text)
}

fn plain(v: &Value) -> String {
    match v {
        Value::Number(n) => fmt_num(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn herm_json(h: &HermMatrix) -> Value {
    json!({"re": h.re.to_rows(), "im": h.im.to_rows()})
}

fn cmd_witness(a: &WitnessArgs, tol: &Tolerances) -> CliResult<()> {
    let st = load_state(&a.state.input, a.state.partition.as_deref(), tol)?;
    let spec = cone_spec(a.state.theory, &st.partition)?;
    let r = kappa_with(
        st.cov(),
        &spec,
        &KappaOptions {
            method: Method::Sdp,
            member_tol: tol.membership,
            ..KappaOptions::default()
        },
    )?;
    let w = r.witness.as_ref().expect("witness requested");
    let check = w.w.inner(&spec.c) + w.y.as_ref().map_or(0.0, |y| y.inner(&spec.d));
    let verdict = if w.certifies_resource() {
        "violation: <W, V> < 1 certifies a resourceful state"
    } else {
        "no violation: <W, V> >= 1"
    };
    let out = json!({
        "theory": a.state.theory.name(),
        "W": herm_json(&w.w),
        "Y": w.y.as_ref().map(herm_json),
        "normalization": check,
        "adjoint_residual": w.adjoint_residual,
        "value": w.value,
        "upsilon": r.upsilon,
        "kappa": r.kappa,
        "verdict": verdict,
    });
    if a.state.json {
        return print_json(&out);
    }
    let rows = |m: &Matrix| {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut text = format!(
        "theory: {}\nW (real part):\n{}\nW (imaginary part):\n{}\n",
        a.state.theory,
        rows(&w.w.re),
        rows(&w.w.im)
    );
    if let Some(y) = &w.y {
        text += &format!(
            "Y (real part):\n{}\nY (imaginary part):\n{}\n",
            rows(&y.re),
            rows(&y.im)
        );
    }
    text += &format!(
        "<W, C> + <Y, D>: {}\n<W, V>: {}\nkappa: {}\n{verdict}\n",
        fmt_num(check),
        fmt_num(w.value),
        fmt_num(r.kappa)
    );
    emit(None, &text)
}

/// Parses `name:key=value,key=value` into a channel name and settings.
fn parse_apply(text: &str, a: &ChannelArgs) -> CliResult<(ChannelName, ChannelArgs)> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    let kind = ChannelName::from_str(name.trim(), true)
        .map_err(|_| CliError::Validation(format!("unknown channel `{name}`")))?;
    let mut s = ChannelArgs {
        kind: Some(kind),
        apply: None,
        eta: None,
        nbar: None,
        sigma: None,
        theta: None,
        pair: None,
        modes: Vec::new(),
        matrix: None,
        label: None,
        ..a.clone()
    };
    let num = |k: &str, v: &str| {
        v.parse::<f64>()
            .map_err(|_| CliError::Validation(format!("`{k}={v}` is not a number")))
    };
    for item in rest.split(',').filter(|x| !x.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("expected key=value, found `{item}`")))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "eta" => s.eta = Some(num(k, v)?),
            "nbar" => s.nbar = Some(num(k, v)?),
            "sigma" => s.sigma = Some(num(k, v)?),
            "theta" => s.theta = Some(num(k, v)?),
            "pair" => s.pair = Some(v.into()),
            "mode" | "keep" => s.modes.push(
                v.parse()
                    .map_err(|_| CliError::Validation(format!("`{k}={v}` is not a mode index")))?,
            ),
            "matrix" => s.matrix = Some(v.into()),
            "label" => s.label = Some(v.into()),
            _ => {
                return Err(CliError::Validation(format!(
                    "unknown channel setting `{k}`"
                )))
            }
        }
    }
    Ok((kind, s))
}

fn need<T: Copy>(x: Option<T>, what: &str) -> CliResult<T> {
    x.ok_or_else(|| CliError::Validation(format!("missing --{what}")))
}

fn build_map(kind: ChannelName, a: &ChannelArgs, n: usize) -> CliResult<CmMap> {
    Ok(match kind {
        ChannelName::Loss => {
            let eta = need(a.eta, "eta")?;
            let nbar = a.nbar.unwrap_or(0.0);
            if !(0.0..=1.0).contains(&eta) || nbar.is_nan() || nbar < 0.0 {
                return Err(CliError::Validation(
                    "loss needs 0 <= eta <= 1 and nbar >= 0".into(),
                ));
            }
            CmMap::Loss {
                eta,
                nbar,
                modes: (!a.modes.is_empty()).then(|| a.modes.clone()),
            }
        }
        ChannelName::Displace => {
            let sigma = need(a.sigma, "sigma")?;
            CmMap::RandomDisplacement(NoiseKernel::new(Matrix::identity(2 * n).scale(sigma))?)
        }
        ChannelName::Beamsplitter => {
            let theta = need(a.theta, "theta")?;
            let pair = a.pair.as_deref().unwrap_or("0-1");
            let (i, j) = pair
                .split_once('-')
                .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)))
                .ok_or_else(|| CliError::Validation(format!("bad pair `{pair}`, expected i-j")))?;
            CmMap::BeamSplitter {
                theta,
                pairs: vec![(i, j)],
            }
        }
        ChannelName::Symplectic => {
            let path = a
                .matrix
                .as_ref()
                .ok_or_else(|| CliError::Validation("missing --matrix".into()))?;
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read {}: {e}", path.display()))
            })?;
            let rows: Vec<Vec<f64>> = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("bad matrix file: {e}")))?;
            let m = Matrix::from_rows(&rows);
            gaussrt_core::symplectic::check_symplectic(&m, 1e-9)?;
            CmMap::Symplectic(m)
        }
        ChannelName::Ancilla => {
            let nbar = a.nbar.unwrap_or(0.0);
            if nbar.is_nan() || nbar < 0.0 {
                return Err(CliError::Validation(
                    "ancilla nbar must be non-negative".into(),
                ));
            }
            CmMap::AddAncilla {
                w: Matrix::identity(2).scale(2.0 * nbar + 1.0),
                labels: ModePartition::new([a.label.clone().unwrap_or_else(|| "A".into())])?,
            }
        }
        ChannelName::Discard => {
            if a.modes.is_empty() {
                return Err(CliError::Validation(
                    "discard needs --modes listing the kept modes".into(),
                ));
            }
            CmMap::Discard {
                keep: a.modes.clone(),
            }
        }
    })
}

fn cmd_channel(a: &ChannelArgs, tol: &Tolerances) -> CliResult<()> {
    let (kind, settings) = match (&a.apply, a.kind) {
        (Some(text), _) => parse_apply(text, a)?,
        (None, Some(k)) => (k, a.clone()),
        (None, None) => {
            return Err(CliError::Validation(
                "name a channel or pass --apply".into(),
            ))
        }
    };
    let st = load_state(&a.input, None, tol)?;
    let map = build_map(kind, &settings, st.n_modes())?;
    let v = map.apply(st.cov())?;
    let s = map.transform_mean(&st.s)?;
    let p = map.output_partition(&st.partition)?;
    let report = validate_qcm(&v, tol.qcm)?;
    if !report.valid {
        return Err(CliError::Validation(format!(
            "channel output is not a valid covariance matrix (min eigenvalue {})",
            fmt_num(report.min_eigenvalue)
        )));
    }
    emit(
        a.out.as_deref(),
        &(CmDocument::from_parts(&v, Some(&s), &p).to_json() + "\n"),
    )
}

fn cmd_harness(a: &HarnessArgs) -> CliResult<()> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("bad config: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(t) = &a.theory {
        cfg.theories = vec![t.clone()];
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    cfg.validate()?;
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        a.suite
            .split(',')
            .map(|s| s.trim().parse::<Suite>())
            .collect::<Result<_, _>>()?
    };
    let mut reports = Vec::new();
    let mut text = String::new();
    for s in suites {
        let r = s.run(&cfg)?;
        text += &r.headline();
        text.push('\n');
        for line in &r.summary {
            text += &format!("  {line}\n");
        }
        for f in r.failures.iter().take(10) {
            text += &match &f.detail {
                Some(d) => format!("  failed {} on {}: {d}\n", f.check, f.instance),
                None => format!(
                    "  failed {} on {}: {} vs {}\n",
                    f.check,
                    f.instance,
                    fmt_num(f.value),
                    fmt_num(f.bound)
                ),
            };
        }
        reports.push(r);
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let doc = round_json(json!({"config": cfg, "passed": all_passed, "reports": reports}));
    let json_text = to_json_string(&doc).map_err(|e| CliError::Validation(e.to_string()))? + "\n";
    match &a.out {
        Some(path) => {
            emit(Some(path), &json_text)?;
            emit(None, &text)?;
        }
        None => emit(None, &json_text)?,
    }
    if all_passed {
        Ok(())
    } else {
        Err(CliError::Assertion(format!(
            "{} of {} suites failed",
            reports.iter().filter(|r| !r.passed).count(),
            reports.len()
        )))
    }
}

fn cmd_validate(a: &ValidateArgs, tol: &Tolerances) -> CliResult<()> {
    let doc = CmDocument::load(&a.input)?;
    let v = doc.matrix()?;
    doc.partition()?;
    let r = validate_qcm(&v, tol.qcm)?;
    let out = json!({
        "valid": r.valid,
        "modes": doc.modes,
        "min_eigenvalue": r.min_eigenvalue,
        "tolerance": tol.qcm,
    });
    if a.json {
        print_json(&out)?;
    } else {
        emit(
            None,
            &format!(
                "valid: {}\nmin eigenvalue of V - i Omega: {}\n",
                r.valid,
                fmt_num(r.min_eigenvalue)
            ),
        )?;
    }
    if r.valid {
        Ok(())
    } else {
        Err(CliError::Validation(
            "not a quantum covariance matrix".into(),
        ))
    }
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let tol = Tolerances::from_env()?;
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Kappa(a) => cmd_kappa(a, &tol),
        Command::Witness(a) => cmd_witness(a, &tol),
        Command::Channel(a) => cmd_channel(a, &tol),
        Command::Harness(a) => cmd_harness(a),
        Command::Validate(a) => cmd_validate(a, &tol),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
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
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_formats() {
        let labels = |t: &str, n| parse_partition(t, n).unwrap().labels().to_vec();
        assert_eq!(labels("2:1", 3), ["A", "A", "B"]);
        assert_eq!(labels("X=1:Y=2", 3), ["X", "Y", "Y"]);
        assert_eq!(labels("A:B", 2), ["A", "B"]);
        assert_eq!(labels("A,B,A", 3), ["A", "B", "A"]);
        assert!(parse_partition("2:2", 3).is_err());
        assert!(parse_partition("A:B", 3).is_err());
    }

    #[test]
    fn apply_strings() {
        let base = ChannelArgs {
            kind: None,
            apply: None,
            input: PathBuf::new(),
            out: None,
            eta: None,
            nbar: None,
            sigma: None,
            theta: None,
            pair: None,
            modes: Vec::new(),
            matrix: None,
            label: None,
        };
        let (k, s) = parse_apply("loss:eta=0.5,nbar=0", &base).unwrap();
        assert_eq!(k, ChannelName::Loss);
        assert_eq!((s.eta, s.nbar), (Some(0.5), Some(0.0)));
        assert!(parse_apply("teleport", &base).is_err());
        assert!(parse_apply("loss:eta", &base).is_err());
    }
}
