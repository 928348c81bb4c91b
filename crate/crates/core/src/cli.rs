//! `spectrum-match` command line: `trial`, `sweep` and `verify`.
//!
//! Settings come from built-in defaults, then an optional `--config` file of
//! `key = value` lines, then flags. The seed additionally falls back to the
//! `SPECTRUM_MATCH_SEED` environment variable when neither file nor flag sets
//! it.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};

use crate::channel::{sample_scenario, ScenarioRng, SystemParams};
use crate::error::{Error, Result};
use crate::matching::{build_preferences, check_instance, random_profile, ORACLE_LIMIT};
use crate::sim::{derive_seed, emit_results, render_results, simulate, OutputFormat, SweepConfig};

pub const SEED_ENV: &str = "SPECTRUM_MATCH_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "spectrum-match",
    version,
    about = "Cooperative PU/SU spectrum sharing: Stackelberg negotiation plus stable matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one fading realization and print every assignment and its terms.
    Trial(CommonArgs),
    /// Sweep network sizes and write averaged utilities as CSV or JSON.
    Sweep(CommonArgs),
    /// Check deferred acceptance against the brute-force stable-matching oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// Number of PUs (N). Sweeps take a list: `20,30` or `start:stop:step`.
    #[arg(long)]
    pus: Option<String>,
    /// Number of SUs (M). Same syntax as --pus.
    #[arg(long)]
    sus: Option<String>,
    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Master random seed [fallback: $SPECTRUM_MATCH_SEED, then 1].
    #[arg(long)]
    seed: Option<u64>,
    /// Primary transmit power, linear units [artifact default 1].
    #[arg(long)]
    pp: Option<f64>,
    /// Secondary power cap, linear units [artifact default 1].
    #[arg(long)]
    pmax: Option<f64>,
    /// SU cost per unit transmit energy, nats per (power x slot) [artifact default 0.2].
    #[arg(long)]
    cost: Option<f64>,
    /// Noise power, linear units [artifact default 0.1].
    #[arg(long)]
    noise: Option<f64>,
    /// Rayleigh amplitude scale, dimensionless [default 0.5, the standard setup value].
    #[arg(long)]
    sigma: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sweep output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads [default: machine parallelism].
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Random instances to check.
    #[arg(long)]
    instances: Option<usize>,
    /// Largest N and M of a checked instance (at most 8).
    #[arg(long = "max-size")]
    max_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Trial,
    Sweep,
    Verify,
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub subcommand: SubcommandKind,
    pub params: SystemParams,
    pub pus: Vec<usize>,
    pub sus: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    /// 0 means rayon's default.
    pub threads: usize,
    pub instances: usize,
    pub max_size: usize,
}

/// Parses `20,30`, `5:50:5` (inclusive) or a comma list mixing both.
pub fn parse_size_list(text: &str) -> Result<Vec<usize>> {
    let bad = |why: &str| Error::Usage(format!("invalid size list `{text}`: {why}"));
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(bad("empty entry"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("not a nonnegative integer"));
        match parts.as_slice() {
            [single] => out.push(num(single)?),
            [start, stop, step] => {
                let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
                if step == 0 {
                    return Err(bad("step must be positive"));
                }
                if start > stop {
                    return Err(bad("start exceeds stop"));
                }
                out.extend((start..=stop).step_by(step));
            }
            _ => return Err(bad("ranges are start:stop:step")),
        }
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("cannot parse `{value}` for `{key}`")))
}

/// Reads a flat `key = value` config file into `args`, leaving fields that a
/// flag already set untouched. `#` starts a comment.
fn merge_config_file(path: &Path, args: &mut CommonArgs, verify: Option<&mut VerifyArgs>) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut verify = verify;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Usage(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        macro_rules! fill {
            ($slot:expr) => {
                if $slot.is_none() {
                    $slot = Some(parse_value(key, value)?);
                }
            };
        }
        match key {
            "pus" => fill!(args.pus),
            "sus" => fill!(args.sus),
            "trials" => fill!(args.trials),
            "seed" => fill!(args.seed),
            "pp" => fill!(args.pp),
            "pmax" => fill!(args.pmax),
            "cost" => fill!(args.cost),
            "noise" => fill!(args.noise),
            "sigma" => fill!(args.sigma),
            "out" => fill!(args.out),
            "format" => fill!(args.format),
            "threads" => fill!(args.threads),
            "instances" | "max-size" | "max_size" => match verify.as_deref_mut() {
                Some(v) if key == "instances" => fill!(v.instances),
                Some(v) => fill!(v.max_size),
                None => {}
            },
            _ => return Err(Error::Usage(format!("unknown config key `{key}`"))),
        }
    }
    Ok(())
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => parse_value(SEED_ENV, &v).map(Some),
        Err(_) => Ok(None),
    }
}

fn resolve(command: Command) -> Result<CliConfig> {
    let (kind, mut common, mut verify) = match command {
        Command::Trial(c) => (SubcommandKind::Trial, c, None),
        Command::Sweep(c) => (SubcommandKind::Sweep, c, None),
        Command::Verify(v) => {
            let VerifyArgs {
                common,
                instances,
                max_size,
            } = v;
            let rest = VerifyArgs {
                common: CommonArgs::default(),
                instances,
                max_size,
            };
            (SubcommandKind::Verify, common, Some(rest))
        }
    };
    if let Some(path) = common.config.clone() {
        merge_config_file(&path, &mut common, verify.as_mut())?;
    }

    let (default_pus, default_sus) = match kind {
        SubcommandKind::Sweep => ("20,30", "5:50:5"),
        _ => ("20", "20"),
    };
    let pus = parse_size_list(common.pus.as_deref().unwrap_or(default_pus))?;
    let sus = parse_size_list(common.sus.as_deref().unwrap_or(default_sus))?;
    if kind == SubcommandKind::Trial && (pus.len() != 1 || sus.len() != 1) {
        return Err(Error::Usage("trial takes a single --pus and --sus value".into()));
    }
    let defaults = SystemParams::default();
    let params = SystemParams {
        n_pu: pus[0],
        n_su: sus[0],
        p_primary: common.pp.unwrap_or(defaults.p_primary),
        p_max: common.pmax.unwrap_or(defaults.p_max),
        cost_per_energy: common.cost.unwrap_or(defaults.cost_per_energy),
        noise_power: common.noise.unwrap_or(defaults.noise_power),
        rayleigh_sigma: common.sigma.unwrap_or(defaults.rayleigh_sigma),
    };
    params.validate()?;
    let seed = match common.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(1),
    };
    let format = common.format.as_deref().unwrap_or("csv").parse()?;
    let (instances, max_size) = verify
        .map(|v| (v.instances.unwrap_or(500), v.max_size.unwrap_or(5)))
        .unwrap_or((500, 5));
    if kind == SubcommandKind::Verify && !(1..=ORACLE_LIMIT).contains(&max_size) {
        return Err(Error::InvalidParam {
            field: "max-size",
            reason: format!("must lie in 1..={ORACLE_LIMIT}, got {max_size}"),
        });
    }
    let trials = common.trials.unwrap_or(1000);
    if trials == 0 {
        return Err(Error::InvalidParam {
            field: "trials",
            reason: "must be >= 1".into(),
        });
    }
    Ok(CliConfig {
        subcommand: kind,
        params,
        pus,
        sus,
        trials,
        seed,
        out: common.out,
        format,
        threads: common.threads.unwrap_or(0),
        instances,
        max_size,
    })
}

/// Parses an argument list (program name first) into resolved settings.
pub fn parse_config<I, T>(argv: I) -> std::result::Result<CliConfig, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ParseFailure::Clap)?;
    resolve(cli.command).map_err(ParseFailure::Invalid)
}

/// Why [`parse_config`] did not produce a config.
#[derive(Debug)]
pub enum ParseFailure {
    /// Help, version, or a malformed command line.
    Clap(clap::Error),
    Invalid(Error),
}

fn write_out(config: &CliConfig, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn trial_report(config: &CliConfig) -> Result<String> {
    let p = &config.params;
    let r = simulate(p, config.seed)?;
    let mut s = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(s, "trial: {} PUs, {} SUs, seed {}", p.n_pu, p.n_su, config.seed);
    let _ = writeln!(
        s,
        "params: P_P={} P_max={} C={} N0={} sigma={}",
        p.p_primary, p.p_max, p.cost_per_energy, p.noise_power, p.rayleigh_sigma
    );
    let _ = writeln!(s, "rates and utilities in nats/slot");
    let _ = writeln!(s, "pu\tpartner\talpha\tbeta\tp_su\tr_coop\tr_direct\tutility");
    for i in 0..p.n_pu {
        let rnc = r.profile.r_noncoop[i];
        match r.matching.su_of_pu[i] {
            Some(j) => {
                let t = &r.profile.terms[i][j];
                let _ = writeln!(
                    s,
                    "{i}\tsu{j}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                    t.alpha, t.beta, t.p_su, t.r_coop_pu, rnc, r.pu_utilities[i]
                );
            }
            None => {
                let _ = writeln!(s, "{i}\t-\t-\t-\t-\t-\t{rnc:.6}\t{:.6}", r.pu_utilities[i]);
            }
        }
    }
    let _ = writeln!(s, "su\tpartner\tutility");
    for j in 0..p.n_su {
        let partner = r.matching.pu_of_su[j].map_or("-".to_string(), |i| format!("pu{i}"));
        let _ = writeln!(s, "{j}\t{partner}\t{:.6}", r.su_utilities[j]);
    }
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let _ = writeln!(
        s,
        "summary: avg PU utility {:.6} (direct {:.6}), avg SU utility {:.6}, matched {}/{} PUs, {}/{} SUs, {} proposals",
        mean(&r.pu_utilities),
        mean(&r.profile.r_noncoop),
        mean(&r.su_utilities),
        r.matching.matched_pus(),
        p.n_pu,
        r.matching.matched_sus(),
        p.n_su,
        r.matching.proposal_count
    );
    Ok(s)
}

/// Result of the `verify` oracle run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifySummary {
    pub instances: usize,
    pub blocking_pairs: usize,
    pub failures: usize,
}

/// Checks `instances` random small markets. Even-numbered instances come from
/// sampled fading scenarios, odd ones from random rankings.
pub fn run_verification(config: &CliConfig) -> Result<VerifySummary> {
    let mut summary = VerifySummary {
        instances: config.instances,
        blocking_pairs: 0,
        failures: 0,
    };
    for k in 0..config.instances {
        let mut rng = ScenarioRng::seed_from_u64(derive_seed(config.seed, 0, 0, k));
        let n = rng.gen_range(1..=config.max_size);
        let m = rng.gen_range(1..=config.max_size);
        let profile = if k % 2 == 0 {
            let params = SystemParams { n_pu: n, n_su: m, ..config.params };
            build_preferences(&sample_scenario(&params, rng.gen())?)?
        } else {
            random_profile(n, m, 0.7, &mut rng)
        };
        let check = check_instance(&profile)?;
        summary.blocking_pairs += check.blocking_pairs;
        if !check.passed() {
            summary.failures += 1;
        }
    }
    Ok(summary)
}

/// Exit status plus text still to be delivered to `--out` or stdout.
type Outcome = (i32, Option<String>);

fn execute(config: &CliConfig) -> Result<Outcome> {
    match config.subcommand {
        SubcommandKind::Trial => Ok((EXIT_OK, Some(trial_report(config)?))),
        SubcommandKind::Sweep => {
            let sweep = SweepConfig {
                base: config.params,
                n_pu_list: config.pus.clone(),
                n_su_list: config.sus.clone(),
                trials: config.trials,
                master_seed: config.seed,
            };
            let rows = crate::sim::run_sweep(&sweep)?;
            match &config.out {
                Some(path) => {
                    emit_results(&rows, config.format, path)?;
                    Ok((EXIT_OK, None))
                }
                None => Ok((EXIT_OK, Some(render_results(&rows, config.format)))),
            }
        }
        SubcommandKind::Verify => {
            let s = run_verification(config)?;
            if s.failures == 0 {
                let text = format!(
                    "verified {} instances: {} blocking pairs, SU-optimality holds\n",
                    s.instances, s.blocking_pairs
                );
                Ok((EXIT_OK, Some(text)))
            } else {
                let text = format!(
                    "verification FAILED: {} of {} instances, {} blocking pairs\n",
                    s.failures, s.instances, s.blocking_pairs
                );
                Ok((EXIT_VERIFY_FAILED, Some(text)))
            }
        }
    }
}

/// Runs the CLI with explicit output streams and returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_config(argv) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
        Err(ParseFailure::Invalid(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let outcome = if config.threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
            Ok(pool) => pool.install(|| execute(&config)),
            Err(e) => Err(Error::Usage(format!("cannot start thread pool: {e}"))),
        }
    } else {
        execute(&config)
    };
    let delivered = outcome.and_then(|(code, text)| match text {
        Some(text) => write_out(&config, &text, stdout).map(|()| code),
        None => Ok(code),
    });
    match delivered {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

/// Entry point used by the binary.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
