//! The `qseal` command-line interface.
//!
//! Exit codes: 0 success, 1 channel failed validation, 2 bad arguments or
//! unparseable channel file, 3 I/O failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::analysis::{
    bit_announcement_probs, decode_success_probability, expected_mutual_information,
    mi_seal_example, mismatch_probability, DEFAULT_TAIL_TOL,
};
use crate::protocol::{
    monte_carlo, run_protocol, write_public_transcript, write_transcript, ProtocolParams,
};
use crate::qubit::{
    dephasing_channel, depolarizing_channel, identity_channel, seal_example_channel,
    validate_channel, KrausChannel, MeasurementBasis,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CHANNEL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const DEFAULT_N: usize = 119;
pub const DEFAULT_PA: f64 = 0.05;
pub const SWEEP_HEADER: &str = "x,mi_bits,mismatch_conditional,mismatch_per_shot,truncation_mass";

#[derive(Debug, Parser)]
#[command(name = "qseal", version, about = "Sealed-message protocol simulator and eavesdropping analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate mutual information and mismatch probability over the seal(x) family.
    Sweep(SweepArgs),
    /// Run seeded protocol simulations and compare with the analytic predictions.
    Simulate(SimulateArgs),
    /// Check a Kraus channel file and report its analytic leak and disturbance.
    ValidateChannel(ValidateArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long = "n", default_value_t = DEFAULT_N)]
    n_shots: usize,
    #[arg(long = "pa", default_value_t = DEFAULT_PA)]
    p_announce: f64,
    #[arg(long, default_value_t = 0.05)]
    grid_step: f64,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["channel", "channel_file"])))]
struct SimulateArgs {
    /// identity, seal, depolarizing or dephasing; `seal(0.5)` form is accepted.
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    channel_file: Option<PathBuf>,
    /// Parameter of a builtin channel (x for seal, p for depolarizing).
    #[arg(long)]
    x: Option<f64>,
    #[arg(long = "n", default_value_t = DEFAULT_N)]
    n_shots: usize,
    #[arg(long = "pa", default_value_t = DEFAULT_PA)]
    p_announce: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    bit: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Writes trial 0 to FILE and its public projection to FILE.public.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    /// Worker threads; 0 uses the rayon default. Does not affect results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    file: PathBuf,
    #[arg(long = "n", default_value_t = DEFAULT_N)]
    n_shots: usize,
    #[arg(long = "pa", default_value_t = DEFAULT_PA)]
    p_announce: f64,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    InvalidChannel(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::InvalidChannel(_) => EXIT_INVALID_CHANNEL,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::InvalidChannel(m) | Failure::Io(m) => m,
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(&a, stdout),
        Command::Simulate(a) => cmd_simulate(&a, stdout),
        Command::ValidateChannel(a) => cmd_validate_channel(&a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

/// Writes `path` through a temporary file in the same directory, renaming on success.
fn write_atomically<F>(path: &Path, body: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_failure(path, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).map_err(|e| io_failure(path, e))?;
        w.flush().map_err(|e| io_failure(path, e))?;
    }
    tmp.persist(path).map_err(|e| io_failure(path, e.error))?;
    Ok(())
}

fn check_common(n_shots: usize, p_announce: f64, tail_tol: f64) -> Result<(), Failure> {
    if n_shots == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&p_announce) {
        return Err(Failure::Usage(format!("--pa {p_announce} is outside [0, 1]")));
    }
    if !(tail_tol > 0.0 && tail_tol <= crate::analysis::MAX_TAIL_TOL) {
        return Err(Failure::Usage(format!("--tail-tol {tail_tol} is outside (0, 1e-6]")));
    }
    Ok(())
}

/// Grid 0, step, 2·step, … up to 1. When 1/step is an integer the points are
/// computed as i/steps so that decimal steps print cleanly.
pub fn sweep_grid(step: f64) -> Option<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return None;
    }
    let inv = 1.0 / step;
    let steps = inv.round();
    if (inv - steps).abs() < 1e-9 {
        let steps = steps as usize;
        Some((0..=steps).map(|i| i as f64 / steps as f64).collect())
    } else {
        let count = inv.floor() as usize;
        Some((0..=count).map(|i| i as f64 * step).collect())
    }
}

/// One sweep row: `(x, mi_bits, mismatch_conditional, mismatch_per_shot, truncation_mass)`.
pub fn sweep_row(x: f64, n_shots: usize, p_announce: f64, tail_tol: f64) -> crate::Result<[f64; 5]> {
    let mi = mi_seal_example(x, n_shots, p_announce, tail_tol)?;
    let mm = mismatch_probability(&seal_example_channel(x)?)?;
    Ok([x, mi.mi_bits, mm.matched_basis_conditional, mm.per_shot, mi.truncation_mass])
}

fn cmd_sweep(a: &SweepArgs, _stdout: &mut dyn Write) -> Result<(), Failure> {
    check_common(a.n_shots, a.p_announce, a.tail_tol)?;
    let grid = sweep_grid(a.grid_step)
        .ok_or_else(|| Failure::Usage(format!("--grid-step {} is outside (0, 1]", a.grid_step)))?;
    let rows = grid
        .iter()
        .map(|&x| sweep_row(x, a.n_shots, a.p_announce, a.tail_tol))
        .collect::<crate::Result<Vec<_>>>()?;
    write_atomically(&a.out, |w| {
        writeln!(w, "# qseal sweep over the seal(x) channel family")?;
        writeln!(w, "# n_shots={}", a.n_shots)?;
        writeln!(w, "# p_announce={}", a.p_announce)?;
        writeln!(w, "# grid_step={}", a.grid_step)?;
        writeln!(w, "# tail_tol={:e}", a.tail_tol)?;
        writeln!(w, "{SWEEP_HEADER}")?;
        for [x, mi, cond, per_shot, trunc] in &rows {
            writeln!(w, "{x},{mi},{cond},{per_shot},{trunc:e}")?;
        }
        Ok(())
    })
}

/// Resolves a builtin channel name, optionally written as `name(param)`.
pub fn builtin_channel(name: &str, param: Option<f64>) -> crate::Result<KrausChannel> {
    let (base, inline) = match name.trim().split_once('(') {
        Some((base, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| {
                crate::Error::InvalidChannel(format!("malformed channel name `{name}`"))
            })?;
            let v = inner.trim().parse::<f64>().map_err(|_| {
                crate::Error::InvalidChannel(format!("bad parameter in `{name}`"))
            })?;
            (base.trim(), Some(v))
        }
        None => (name.trim(), None),
    };
    let param = inline.or(param);
    let need = |what: &str| {
        param.ok_or_else(|| crate::Error::InvalidChannel(format!("channel `{base}` needs a parameter ({what})")))
    };
    match base {
        "identity" => Ok(identity_channel()),
        "dephasing" => Ok(dephasing_channel()),
        "seal" => seal_example_channel(need("x")?),
        "depolarizing" => depolarizing_channel(need("p")?),
        other => Err(crate::Error::InvalidChannel(format!(
            "unknown channel `{other}` (expected identity, seal, depolarizing or dephasing)"
        ))),
    }
}

fn load_channel_file(path: &Path) -> Result<KrausChannel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    match KrausChannel::from_json(&text) {
        Ok(Ok(ch)) => Ok(ch),
        Ok(Err(e)) => Err(Failure::Usage(format!("{}: {e}", path.display()))),
        Err(e) => Err(Failure::Usage(format!(
            "{}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))),
    }
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "n/a".into()
    }
}

fn cmd_simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    check_common(a.n_shots, a.p_announce, a.tail_tol)?;
    if a.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let channel = match (&a.channel, &a.channel_file) {
        (Some(name), None) => builtin_channel(name, a.x)?,
        (None, Some(path)) => load_channel_file(path)?,
        _ => return Err(Failure::Usage("give exactly one of --channel, --channel-file".into())),
    };
    let report = validate_channel(&channel);
    if !report.passed {
        return Err(Failure::InvalidChannel(format!(
            "channel `{}` fails completeness (deviation {:e})",
            channel.label(),
            report.deviation
        )));
    }
    let params = ProtocolParams::new(a.n_shots, a.p_announce, a.bit, a.seed)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
    let stats = pool.install(|| monte_carlo(&params, &channel, a.trials))?;
    let dist = bit_announcement_probs(&channel)?;
    let mismatch = mismatch_probability(&channel)?;
    let mi = pool.install(|| expected_mutual_information(&dist, a.n_shots, a.p_announce, a.tail_tol))?;

    if let Some(path) = &a.transcript {
        let (shots, public, _) = run_protocol(&params, &channel)?;
        let header = |w: &mut dyn Write| -> io::Result<()> {
            writeln!(w, "# channel={}", channel.label())?;
            writeln!(w, "# n_shots={}", a.n_shots)?;
            writeln!(w, "# p_announce={}", a.p_announce)?;
            writeln!(w, "# seed={} trial=0", a.seed)
        };
        write_atomically(path, |w| {
            header(w)?;
            writeln!(w, "# message_bit={}", a.bit)?;
            write_transcript(w, &shots)
        })?;
        let mut public_path = path.clone().into_os_string();
        public_path.push(".public");
        write_atomically(Path::new(&public_path), |w| {
            header(w)?;
            write_public_transcript(w, &public)
        })?;
    }

    let mut out = String::new();
    let _ = writeln!(out, "# qseal simulate");
    let _ = writeln!(out, "channel: {}", channel.label());
    let _ = writeln!(out, "n_shots: {}", a.n_shots);
    let _ = writeln!(out, "p_announce: {}", a.p_announce);
    let _ = writeln!(out, "message_bit: {}", a.bit);
    let _ = writeln!(out, "seed: {}", a.seed);
    let _ = writeln!(out, "trials: {}", stats.trials);
    let _ = writeln!(out, "total_shots: {}", stats.shots);
    let _ = writeln!(out, "bit_announcements: {}", stats.bit_announcements());
    let _ = writeln!(out, "matched_result_announcements: {}", stats.matched_result_announcements);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<28} {:>10} {:>10} {:>10} {:>8}",
        "statistic", "empirical", "std_err", "analytic", "z"
    );
    let mut row = |name: &str, est: crate::protocol::Estimate, analytic: Option<f64>| {
        let (an, z) = match analytic {
            Some(p) => (fmt_opt(p), format!("{:.2}", est.z_score(p))),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{name:<28} {:>10} {:>10} {an:>10} {z:>8}",
            fmt_opt(est.value()),
            fmt_opt(est.std_error()),
        );
    };
    let undisturbed = mismatch.per_shot == 0.0;
    row(
        "decode_success",
        stats.decode_success_rate(),
        undisturbed.then(|| decode_success_probability(a.n_shots, a.p_announce)),
    );
    row("decode_correct", stats.decode_correct_rate(), undisturbed.then_some(1.0));
    row("mismatch_conditional", stats.mismatch_rate(), Some(mismatch.matched_basis_conditional));
    let expected = dist.given(a.bit);
    for (i, est) in stats.bit_announcement_freqs().into_iter().enumerate() {
        let basis = if i < 2 { MeasurementBasis::Sigma1 } else { MeasurementBasis::Sigma3 };
        row(&format!("announce({},c={})", basis.name(), i % 2), est, Some(expected[i]));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "analytic_mismatch_per_shot: {:.6}", mismatch.per_shot);
    let _ = writeln!(out, "analytic_mutual_information_bits: {:.9}", mi.mi_bits);
    let _ = writeln!(out, "analytic_truncation_mass: {:e}", mi.truncation_mass);
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))
}

fn cmd_validate_channel(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    check_common(a.n_shots, a.p_announce, a.tail_tol)?;
    let channel = load_channel_file(&a.file)?;
    let report = validate_channel(&channel);
    let mut out = String::new();
    let _ = writeln!(out, "channel: {}", channel.label());
    let _ = writeln!(out, "operators: {}", channel.operators().len());
    let _ = writeln!(out, "completeness_deviation: {:e}", report.deviation);
    let _ = writeln!(out, "completeness: {}", if report.passed { "pass" } else { "FAIL" });
    match &report.chaotic_image {
        Some(b) => {
            let [v1, v2, v3] = b.direction();
            let _ = writeln!(out, "chaotic_image_lambda: {:.12}", b.lambda());
            let _ = writeln!(out, "chaotic_image_v: ({v1:.12}, {v2:.12}, {v3:.12})");
        }
        None => {
            let _ = writeln!(out, "chaotic_image: not a valid state");
        }
    }
    let _ = writeln!(out, "unital: {}", report.unital);
    if report.passed {
        let dist = bit_announcement_probs(&channel)?;
        let mi = expected_mutual_information(&dist, a.n_shots, a.p_announce, a.tail_tol)?;
        let mm = mismatch_probability(&channel)?;
        let _ = writeln!(
            out,
            "mutual_information_bits: {:.12} (n_shots={}, p_announce={})",
            mi.mi_bits, a.n_shots, a.p_announce
        );
        let _ = writeln!(out, "mismatch_per_shot: {:.12}", mm.per_shot);
        let _ = writeln!(out, "mismatch_conditional: {:.12}", mm.matched_basis_conditional);
    }
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| Failure::Io(format!("stdout: {e}")))?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::InvalidChannel(format!(
            "completeness deviation {:e} exceeds tolerance",
            report.deviation
        )))
    }
}
