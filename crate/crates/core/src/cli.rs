//! Command-line front end. Every output starts with a header carrying the tool
//! version, the fully resolved configuration, the seed and a SHA-256 of the
//! configuration, so two files can be checked for comparability at a glance.
//!
//! Exit codes: 0 on success, 2 for usage errors, 3 for model or I/O failures.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{value_parser, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Number, Value};
use sha2::{Digest, Sha256};

use crate::channel::{
    amplifier_at, no_signaling_test, simulate, sweep_m, NonCoincidencePolicy, RunConfig, SourceKind, TrialRecord,
};
use crate::devices::{AmplifierModel, CovariantParams};
use crate::error::Error;
use crate::fock::DEFAULT_LEAKAGE_TOL;
use crate::states::{chsh_value, double_detection_amplitude, spdc_unentangled, ChshAngles, SpdcBeam};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MODEL: i32 = 3;

const TOOL: &str = "photon-link";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "photon-link", version, about = "Entangled-photon link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Master seed for all random streams.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads. Output is identical for every value.
    #[arg(long, global = true, value_parser = value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the link and summarize the induced binary channel.
    Simulate(SimulateArgs),
    /// Run the link at several values of m.
    Sweep(SweepArgs),
    /// Compare the receiver's count statistics under the two sender settings.
    Nosignal(NosignalArgs),
    /// Event probabilities, double detection and CHSH values of both sources.
    Spdc,
    /// CHSH value of one source at chosen analyzer angles.
    Chsh(ChshArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SourceArg {
    Bell,
    #[value(name = "spdc-u")]
    SpdcU,
}

impl From<SourceArg> for SourceKind {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Bell => SourceKind::Bell,
            SourceArg::SpdcU => SourceKind::SpdcUnentangled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AmplifierArg {
    Paper,
    Urn,
    Covariant,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    RandomBit,
    DropTrial,
}

impl From<PolicyArg> for NonCoincidencePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::RandomBit => NonCoincidencePolicy::RandomBit,
            PolicyArg::DropTrial => NonCoincidencePolicy::DropTrial,
        }
    }
}

#[derive(Debug, Args)]
struct AmpArgs {
    #[arg(long, value_enum, default_value_t = AmplifierArg::Paper)]
    amplifier: AmplifierArg,

    /// Amplification: 2m+1 parallel and m perpendicular photons, or gain m+1.
    #[arg(long)]
    m: Option<u64>,

    #[command(flatten)]
    squeezer: SqueezerArgs,
}

#[derive(Debug, Args)]
struct SqueezerArgs {
    /// Intensity gain of the covariant amplifier; overrides --m.
    #[arg(long)]
    gain: Option<f64>,

    /// Occupation cap per mode for the covariant amplifier. Chosen from the gain if absent.
    #[arg(long)]
    truncation: Option<usize>,

    #[arg(long, default_value_t = DEFAULT_LEAKAGE_TOL)]
    leakage_tol: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SourceArg::Bell)]
    source: SourceArg,

    #[command(flatten)]
    amp: AmpArgs,

    #[arg(long, default_value_t = 10_000, value_parser = value_parser!(u64).range(1..))]
    trials: u64,

    /// Decode 0 when |n_r − n_r′| reaches this; defaults to ⌈(m+1)/2⌉.
    #[arg(long, value_parser = value_parser!(u64).range(1..))]
    threshold: Option<u64>,

    #[arg(long, value_enum, default_value_t = PolicyArg::RandomBit)]
    policy: PolicyArg,

    /// Also write one CSV row per trial to this file.
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SourceArg::Bell)]
    source: SourceArg,

    #[arg(long, value_enum, default_value_t = AmplifierArg::Paper)]
    amplifier: AmplifierArg,

    #[arg(long, value_delimiter = ',', default_values_t = [16u64, 64, 256, 1024])]
    m_values: Vec<u64>,

    #[arg(long)]
    truncation: Option<usize>,

    #[arg(long, default_value_t = DEFAULT_LEAKAGE_TOL)]
    leakage_tol: f64,

    #[arg(long, default_value_t = 10_000, value_parser = value_parser!(u64).range(1..))]
    trials: u64,

    #[arg(long, value_enum, default_value_t = PolicyArg::RandomBit)]
    policy: PolicyArg,
}

#[derive(Debug, Args)]
struct NosignalArgs {
    #[command(flatten)]
    amp: AmpArgs,
}

#[derive(Debug, Args)]
struct ChshArgs {
    #[arg(long, value_enum, default_value_t = SourceArg::Bell)]
    source: SourceArg,

    /// Analyzer angles a,b,a′,b′ in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 22.5, 45.0, 67.5])]
    angles: Vec<f64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Model { source: Error, hint: Option<String> },
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model { .. } | CliError::Io(_) => EXIT_MODEL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::Model { source, hint: None } => write!(f, "{source}"),
            CliError::Model { source, hint: Some(h) } => write!(f, "{source}\nhint: {h}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(source: Error) -> Self {
        CliError::Model { source, hint: None }
    }
}

/// Attaches a concrete truncation suggestion to leakage failures.
fn with_truncation_hint(err: Error, model: &AmplifierModel) -> CliError {
    let hint = match (&err, model) {
        (Error::LeakageExceeded { .. }, AmplifierModel::CovariantSqueezer(p)) => Some(format!(
            "rerun with --truncation {}",
            CovariantParams::suggested_n_max(p.gain, p.leakage_tol)
        )),
        _ => None,
    };
    CliError::Model { source: err, hint }
}

fn resolve_amplifier(kind: AmplifierArg, m: Option<u64>, sq: &SqueezerArgs) -> Result<AmplifierModel, CliError> {
    if kind != AmplifierArg::Covariant {
        if sq.gain.is_some() || sq.truncation.is_some() {
            return Err(CliError::Usage(
                "--gain and --truncation apply to --amplifier covariant only".into(),
            ));
        }
        let m = m.ok_or_else(|| CliError::Usage("--m is required".into()))?;
        return Ok(match kind {
            AmplifierArg::Paper => AmplifierModel::PaperDeterministic { m },
            _ => AmplifierModel::EmissionUrn { m },
        });
    }
    let gain = match (sq.gain, m) {
        (Some(g), _) => g,
        (None, Some(m)) => (m + 1) as f64,
        (None, None) => return Err(CliError::Usage("covariant amplifier needs --m or --gain".into())),
    };
    if !(gain.is_finite() && gain >= 1.0) {
        return Err(CliError::Usage(format!("--gain must be ≥ 1, got {gain}")));
    }
    if !(sq.leakage_tol > 0.0 && sq.leakage_tol < 1.0) {
        return Err(CliError::Usage("--leakage-tol must lie in (0, 1)".into()));
    }
    if sq.truncation == Some(0) {
        return Err(CliError::Usage("--truncation must be ≥ 1".into()));
    }
    Ok(AmplifierModel::CovariantSqueezer(CovariantParams {
        gain,
        n_max: sq
            .truncation
            .unwrap_or_else(|| CovariantParams::suggested_n_max(gain, sq.leakage_tol)),
        leakage_tol: sq.leakage_tol,
    }))
}

/// Rounds to 12 significant digits so that printed values are stable.
fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses back")
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

fn fmt_float(x: f64) -> String {
    Number::from_f64(round_sig(x)).map_or_else(|| "nan".into(), |n| n.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// One command's output before formatting.
struct Report {
    command: &'static str,
    config: Value,
    result: Value,
    /// Scalars listed in the CSV preamble.
    notes: Vec<(&'static str, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Header {
    lines: Vec<(String, String)>,
    meta: Value,
}

fn header(command: &str, seed: u64, config: &Value) -> Header {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
    Header {
        lines: vec![
            ("tool".into(), TOOL.into()),
            ("version".into(), VERSION.into()),
            ("command".into(), command.into()),
            ("seed".into(), seed.to_string()),
            ("config".into(), canonical),
            ("config_sha256".into(), hash.clone()),
        ],
        meta: json!({
            "tool": TOOL,
            "version": VERSION,
            "command": command,
            "seed": seed,
            "config": config,
            "config_sha256": hash,
        }),
    }
}

fn write_csv(preamble: &[(String, String)], head: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    for (k, v) in preamble {
        writeln!(buf, "# {k}: {v}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut w = csv::Writer::from_writer(buf);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(head).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn render(report: &Report, seed: u64, format: Format) -> Result<Vec<u8>, CliError> {
    let h = header(report.command, seed, &report.config);
    match format {
        Format::Json => {
            let doc = json!({ "meta": h.meta, "result": round_value(report.result.clone()) });
            let mut out = serde_json::to_vec_pretty(&doc).expect("report serializes");
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut pre = h.lines;
            pre.extend(report.notes.iter().map(|(k, v)| (k.to_string(), v.clone())));
            write_csv(&pre, &report.header, &report.rows)
        }
    }
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn opt_bit(b: Option<crate::devices::Bit>) -> String {
    b.map_or_else(String::new, |b| b.as_u8().to_string())
}

fn trial_rows(records: &[TrialRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            vec![
                r.trial_index.to_string(),
                r.sent_bit.as_u8().to_string(),
                r.event_class.as_str().to_string(),
                r.counts.map_or_else(String::new, |c| c.n_r.to_string()),
                r.counts.map_or_else(String::new, |c| c.n_r_prime.to_string()),
                opt_bit(r.readout_bit),
            ]
        })
        .collect()
}

fn cmd_simulate(args: &SimulateArgs, cli: &Cli) -> Result<Report, CliError> {
    let amplifier = resolve_amplifier(args.amp.amplifier, args.amp.m, &args.amp.squeezer)?;
    let config = RunConfig {
        source: args.source.into(),
        amplifier: amplifier.clone(),
        trials: args.trials,
        master_seed: cli.seed,
        threshold: args.threshold,
        policy: args.policy.into(),
    };
    let sim = simulate(&config).map_err(|e| with_truncation_hint(e, &amplifier))?;
    let est = &sim.estimate;
    let mut resolved = to_json(&config);
    resolved["threshold"] = json!(est.threshold);
    resolved["format"] = to_json(&cli.format);

    if let Some(path) = &args.trials_out {
        let h = header("simulate", cli.seed, &resolved);
        let bytes = write_csv(
            &h.lines,
            &[
                "trial_index",
                "sent_bit",
                "event_class",
                "n_r",
                "n_r_prime",
                "readout_bit",
            ],
            &trial_rows(&sim.records),
        )?;
        emit(&bytes, Some(path))?;
    }

    let c = est.confusion;
    Ok(Report {
        command: "simulate",
        config: resolved,
        result: to_json(est),
        notes: vec![],
        header: vec![
            "trials",
            "retained",
            "threshold",
            "ber",
            "ci_low",
            "ci_high",
            "mi",
            "mi_plug_in",
            "capacity",
            "snr",
            "coincidence_ber",
            "non_coincidence_fraction",
            "n00",
            "n01",
            "n10",
            "n11",
        ],
        rows: vec![vec![
            est.trials.to_string(),
            est.retained.to_string(),
            est.threshold.to_string(),
            fmt_float(est.ber),
            fmt_float(est.ci_low),
            fmt_float(est.ci_high),
            fmt_float(est.mi),
            fmt_float(est.mi_plug_in),
            fmt_float(est.capacity),
            fmt_float(est.snr),
            est.coincidence_ber.map_or_else(String::new, fmt_float),
            fmt_float(est.non_coincidence_fraction),
            c[0][0].to_string(),
            c[0][1].to_string(),
            c[1][0].to_string(),
            c[1][1].to_string(),
        ]],
    })
}

fn cmd_sweep(args: &SweepArgs, cli: &Cli) -> Result<Report, CliError> {
    if args.m_values.len() < 2 {
        return Err(CliError::Usage("--m-values needs at least two entries".into()));
    }
    let sq = SqueezerArgs {
        gain: None,
        truncation: args.truncation,
        leakage_tol: args.leakage_tol,
    };
    let base = resolve_amplifier(args.amplifier, Some(args.m_values[0]), &sq)?;
    let mut config = RunConfig::new(args.source.into(), base.clone(), args.trials, cli.seed);
    config.policy = args.policy.into();
    let report = sweep_m(&config, &args.m_values).map_err(|e| with_truncation_hint(e, &base))?;

    let mut resolved = to_json(&config);
    resolved["amplifiers"] = Value::Array(
        args.m_values
            .iter()
            .map(|m| to_json(&amplifier_at(&base, *m)))
            .collect(),
    );
    resolved["m_values"] = json!(args.m_values);
    resolved["format"] = to_json(&cli.format);
    if let Some(obj) = resolved.as_object_mut() {
        obj.remove("amplifier");
        obj.remove("threshold");
    }

    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                r.threshold.to_string(),
                fmt_float(r.ber),
                fmt_float(r.ci_low),
                fmt_float(r.ci_high),
                r.ber_exact.map_or_else(String::new, fmt_float),
                fmt_float(r.snr),
            ]
        })
        .collect();
    Ok(Report {
        command: "sweep",
        config: resolved,
        result: to_json(&report),
        notes: vec![("snr_slope", fmt_float(report.snr_slope))],
        header: vec!["m", "threshold", "ber", "ci_low", "ci_high", "ber_exact", "snr"],
        rows,
    })
}

fn cmd_nosignal(args: &NosignalArgs, cli: &Cli) -> Result<Report, CliError> {
    let amplifier = resolve_amplifier(args.amp.amplifier, args.amp.m, &args.amp.squeezer)?;
    let report = no_signaling_test(&amplifier).map_err(|e| with_truncation_hint(e, &amplifier))?;
    let resolved = json!({
        "amplifier": to_json(&amplifier),
        "source": "bell",
        "sender_settings_deg": [0.0, 45.0],
        "receiver_basis_deg": 0.0,
        "format": to_json(&cli.format),
    });

    let mut support: Vec<&Vec<usize>> = report
        .setting0_pmf
        .support()
        .iter()
        .chain(report.setting1_pmf.support())
        .collect();
    support.sort();
    support.dedup();
    let rows = support
        .into_iter()
        .map(|occ| {
            vec![
                occ[0].to_string(),
                occ[1].to_string(),
                fmt_float(report.setting0_pmf.probability(occ)),
                fmt_float(report.setting1_pmf.probability(occ)),
            ]
        })
        .collect();
    Ok(Report {
        command: "nosignal",
        config: resolved,
        notes: vec![
            ("tv_distance", fmt_float(report.tv_distance)),
            ("mi_upper", fmt_float(report.mi_upper)),
            ("leakage", fmt_float(report.leakage)),
        ],
        result: to_json(&report),
        header: vec!["n_r", "n_r_prime", "p_setting0", "p_setting1"],
        rows,
    })
}

fn quantity_rows(pairs: &[(&str, f64)]) -> Vec<Vec<String>> {
    pairs.iter().map(|(k, v)| vec![k.to_string(), fmt_float(*v)]).collect()
}

fn cmd_spdc(cli: &Cli) -> Result<Report, CliError> {
    let spdc = spdc_unentangled(2)?;
    let ev = spdc.event_probabilities();
    let signal = double_detection_amplitude(&spdc, SpdcBeam::Signal)?;
    let idler = double_detection_amplitude(&spdc, SpdcBeam::Idler)?;
    let angles = ChshAngles::standard();
    let chsh_bell = chsh_value(&SourceKind::Bell.pair()?, angles)?;
    let chsh_spdc = chsh_value(&spdc, angles)?;
    let result = json!({
        "coincidence_prob": ev.coincidence,
        "both_signal_prob": ev.both_signal,
        "both_idler_prob": ev.both_idler,
        "double_detection_norms": { "signal": signal, "idler": idler },
        "chsh_bell": chsh_bell,
        "chsh_spdc_u": chsh_spdc,
    });
    Ok(Report {
        command: "spdc",
        config: json!({ "chsh_angles_deg": to_json(&angles), "format": to_json(&cli.format) }),
        result,
        notes: vec![],
        header: vec!["quantity", "value"],
        rows: quantity_rows(&[
            ("coincidence_prob", ev.coincidence),
            ("both_signal_prob", ev.both_signal),
            ("both_idler_prob", ev.both_idler),
            ("double_detection_signal", signal),
            ("double_detection_idler", idler),
            ("chsh_bell", chsh_bell),
            ("chsh_spdc_u", chsh_spdc),
        ]),
    })
}

fn cmd_chsh(args: &ChshArgs, cli: &Cli) -> Result<Report, CliError> {
    let [a, b, a_prime, b_prime] = <[f64; 4]>::try_from(args.angles.as_slice())
        .map_err(|_| CliError::Usage("--angles takes exactly four values".into()))?;
    if args.angles.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage("--angles must be finite".into()));
    }
    let source: SourceKind = args.source.into();
    let pair = source.pair()?;
    let pp = pair.coincidence_branch().polarization_pair()?;
    let basis = |t: f64| crate::states::PolarizationBasis::new(t);
    let e = |s: f64, r: f64| -> Result<f64, Error> { Ok(pp.correlation(basis(s)?, basis(r)?)) };
    let angles = ChshAngles::new([a, b, a_prime, b_prime]);
    let corr = [
        ("e_ab", e(a, b)?),
        ("e_ab_prime", e(a, b_prime)?),
        ("e_a_prime_b", e(a_prime, b)?),
        ("e_a_prime_b_prime", e(a_prime, b_prime)?),
    ];
    let s = chsh_value(&pair, angles)?;
    let mut result = serde_json::Map::new();
    for (k, v) in corr {
        result.insert(k.into(), json!(v));
    }
    result.insert("chsh".into(), json!(s));
    let mut rows = corr.to_vec();
    rows.push(("chsh", s));
    Ok(Report {
        command: "chsh",
        config: json!({ "source": to_json(&source), "angles_deg": to_json(&angles), "format": to_json(&cli.format) }),
        result: Value::Object(result),
        notes: vec![],
        header: vec!["quantity", "value"],
        rows: quantity_rows(&rows),
    })
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let work = || -> Result<Report, CliError> {
        match &cli.command {
            Command::Simulate(a) => cmd_simulate(a, cli),
            Command::Sweep(a) => cmd_sweep(a, cli),
            Command::Nosignal(a) => cmd_nosignal(a, cli),
            Command::Spdc => cmd_spdc(cli),
            Command::Chsh(a) => cmd_chsh(a, cli),
        }
    };
    let report = match cli.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let bytes = render(&report, cli.seed, cli.format)?;
    emit(&bytes, cli.out.as_ref())
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
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
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.123_456_789_012_345), 0.123_456_789_012);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(2.0), "2.0");
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn amplifier_flag_validation() {
        let sq = |gain, truncation| SqueezerArgs {
            gain,
            truncation,
            leakage_tol: 1e-8,
        };
        assert!(matches!(
            resolve_amplifier(AmplifierArg::Paper, Some(1), &sq(Some(2.0), None)),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            resolve_amplifier(AmplifierArg::Urn, None, &sq(None, None)),
            Err(CliError::Usage(_))
        ));
        let AmplifierModel::CovariantSqueezer(p) =
            resolve_amplifier(AmplifierArg::Covariant, Some(3), &sq(None, None)).unwrap()
        else {
            panic!("wrong model");
        };
        assert_eq!(p.gain, 4.0);
        assert_eq!(p.n_max, CovariantParams::suggested_n_max(4.0, 1e-8));
    }
}
