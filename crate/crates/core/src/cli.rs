//! Command-line front end. The `noise-verify` binary is a one-line wrapper
//! around [`run`].
//!
//! Exit codes: 0 equal or ok, 1 different (or a statistical check failed),
//! 2 usage error or unreadable file, 3 connection failure, 4 protocol error.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand};

use crate::analysis::mc::epsilon_for_k;
use crate::analysis::scenario::nominal_k;
use crate::analysis::{
    continuum_report, exhaustive_oracle, mc_error_rates, orthogonality_suite, render_trials, scenario_report,
    Format, OracleReport, RngPolicy, TrialPath,
};
use crate::coin::CoinSeed;
use crate::protocol::{
    run_initiator, run_responder, Decision, EpsilonPolicy, ProtocolError, ReaderInput, VerificationVerdict,
};
use crate::rtw::{compute_k, hash_digest_reader};

pub const SEED_FILE_ENV: &str = "NOISE_VERIFY_SEED_FILE";

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIFFERENT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONNECT: u8 = 3;
pub const EXIT_PROTOCOL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "noise-verify", version, about = "Equality testing of long strings with noise-based logic fingerprints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the k-bit keyed digest of a file.
    Digest {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        seed: SeedFileArg,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Wait for a peer and answer its verification request.
    Serve {
        #[arg(long)]
        listen: String,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        seed: SeedFileArg,
        /// Require this error bound from the peer; adopt the peer's if omitted.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Exit after the first session, with its verdict as exit code.
        #[arg(long)]
        once: bool,
    },
    /// Verify a local file against a serving peer.
    Connect {
        #[arg(long)]
        peer: String,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        seed: SeedFileArg,
        #[command(flatten)]
        size: SizeArgs,
    },
    /// Monte Carlo false-accept rate for random unequal strings.
    McError {
        /// One or more fingerprint sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long = "L", value_parser = parse_count)]
        length: u64,
        #[arg(long, value_parser = parse_count, default_value = "100000")]
        trials: u64,
        /// Use equal strings instead; every trial must then be accepted.
        #[arg(long)]
        equal: bool,
        /// Run every trial as a full encoded session.
        #[arg(long)]
        loopback: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Time-average orthogonality relations of basis noises and products.
    Orthogonality {
        #[arg(long, value_parser = parse_count, default_value = "1000000")]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Exact false-accept probability by enumerating all coin tables.
    Oracle {
        #[arg(long = "L")]
        length: usize,
        #[arg(long)]
        k: usize,
    },
    /// Protocol time versus sending the whole string.
    Scenario {
        #[arg(long = "L", value_parser = parse_count)]
        length: u64,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        epsilon: f64,
    },
    /// Gaussian-noise string verification with both comparators.
    Continuum {
        #[arg(long = "L", value_parser = parse_count)]
        length: u64,
        #[arg(long, value_parser = parse_count, default_value = "10000")]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct SeedFileArg {
    /// 32-byte shared master seed.
    #[arg(long = "seed-file", env = SEED_FILE_ENV)]
    pub seed_file: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SizeArgs {
    /// Error bound in (0, 1); k is derived from it.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fingerprint size directly.
    #[arg(long)]
    pub k: Option<usize>,
}

/// Accepts plain integers and integral scientific notation such as `1e12`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        let code = match &e {
            ProtocolError::Transport(_) => EXIT_CONNECT,
            ProtocolError::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_PROTOCOL,
        };
        let message = match e.code() {
            Some(c) => format!("protocol error {} ({}): {e}", c.name(), c.to_byte()),
            None => e.to_string(),
        };
        Failure { code, message }
    }
}

type CmdResult = Result<u8, Failure>;

/// Parses `args` and runs the command, writing reports to `out`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("noise-verify: {}", f.message);
            f.code
        }
    }
}

pub fn run() -> ExitCode {
    // Not locked: concurrent serve sessions print from their own threads.
    ExitCode::from(run_with(std::env::args_os(), &mut io::stdout()))
}

fn load_seed(path: &Path) -> Result<CoinSeed, Failure> {
    CoinSeed::read_file(path).map_err(|e| Failure::usage(format!("seed file {}: {e}", path.display())))
}

fn open_input(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::usage(format!("input {}: {e}", path.display())))
}

fn size_to_epsilon(size: &SizeArgs) -> Result<(f64, usize), Failure> {
    match (size.epsilon, size.k) {
        (Some(e), None) => {
            let k = compute_k(e).map_err(|e| Failure::usage(e.to_string()))?;
            Ok((e, k))
        }
        (None, Some(k)) if (1..=1000).contains(&k) => Ok((epsilon_for_k(k), k)),
        (None, Some(k)) => Err(Failure::usage(format!("k must lie in 1..=1000, got {k}"))),
        _ => Err(Failure::usage("exactly one of --epsilon and --k is required")),
    }
}

fn write_out(out: &mut dyn Write, text: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot write output: {e}"),
    })
}

/// Text block printed after a session.
pub fn render_verdict(v: &VerificationVerdict) -> String {
    let mut s = format!(
        "decision: {}\nepsilon: {:e}\nk: {}\nbits_communicated: {}\ntransport_bytes: {}",
        v.decision, v.epsilon, v.k, v.bits_communicated, v.transport_bytes
    );
    if let Ok(nk) = nominal_k(v.epsilon) {
        if nk != v.k {
            s.push_str(&format!(
                "\nnominal k (0.5^k ~ epsilon): {nk}; strict k (0.5^k < epsilon): {}",
                v.k
            ));
        }
    }
    s
}

fn verdict_code(v: &VerificationVerdict) -> u8 {
    match v.decision {
        Decision::EqualPresumed => EXIT_OK,
        Decision::Different => EXIT_DIFFERENT,
    }
}

fn serve_one(
    stream: &mut TcpStream,
    seed: &CoinSeed,
    input: &Path,
    policy: EpsilonPolicy,
) -> Result<VerificationVerdict, Failure> {
    let file = open_input(input)?;
    Ok(run_responder(seed, ReaderInput::new(BufReader::new(file)), policy, stream)?)
}

fn execute(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Digest { input, seed, size } => {
            let coins = load_seed(&seed.seed_file)?;
            let (_, k) = size_to_epsilon(&size)?;
            let file = open_input(&input)?;
            let digest = hash_digest_reader(BufReader::new(file), &coins, k)
                .map_err(|e| Failure::usage(format!("input {}: {e}", input.display())))?;
            write_out(out, format_args!("digest: {digest}\nk: {k}\nseed_id: {}", coins.seed_id()))?;
            Ok(EXIT_OK)
        }
        Command::Serve {
            listen,
            input,
            seed,
            epsilon,
            once,
        } => {
            let coins = load_seed(&seed.seed_file)?;
            let policy = match epsilon {
                Some(e) => {
                    compute_k(e).map_err(|e| Failure::usage(e.to_string()))?;
                    EpsilonPolicy::Require(e)
                }
                None => EpsilonPolicy::AcceptOffered,
            };
            open_input(&input)?;
            let listener = TcpListener::bind(&listen).map_err(|e| Failure {
                code: EXIT_CONNECT,
                message: format!("cannot listen on {listen}: {e}"),
            })?;
            eprintln!("listening on {}", listener.local_addr().map(|a| a.to_string()).unwrap_or(listen));
            if once {
                let (mut stream, _) = listener.accept().map_err(|e| Failure {
                    code: EXIT_CONNECT,
                    message: format!("accept failed: {e}"),
                })?;
                let v = serve_one(&mut stream, &coins, &input, policy)?;
                write_out(out, render_verdict(&v))?;
                return Ok(verdict_code(&v));
            }
            for stream in listener.incoming() {
                let mut stream = match stream {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("accept failed: {e}");
                        continue;
                    }
                };
                let (coins, input) = (coins.clone(), input.clone());
                thread::spawn(move || {
                    match serve_one(&mut stream, &coins, &input, policy) {
                        Ok(v) => println!("{}\n", render_verdict(&v)),
                        Err(f) => eprintln!("session failed: {}", f.message),
                    }
                });
            }
            Ok(EXIT_OK)
        }
        Command::Connect {
            peer,
            input,
            seed,
            size,
        } => {
            let coins = load_seed(&seed.seed_file)?;
            let (epsilon, _) = size_to_epsilon(&size)?;
            let file = open_input(&input)?;
            let mut stream = TcpStream::connect(&peer).map_err(|e| Failure {
                code: EXIT_CONNECT,
                message: format!("cannot connect to {peer}: {e}"),
            })?;
            let v = run_initiator(&coins, ReaderInput::new(BufReader::new(file)), epsilon, &mut stream)?;
            write_out(out, render_verdict(&v))?;
            Ok(verdict_code(&v))
        }
        Command::McError {
            k,
            length,
            trials,
            equal,
            loopback,
            seed,
            format,
        } => {
            let length = usize::try_from(length).map_err(|_| Failure::usage("L too large"))?;
            let reports = if loopback {
                k.iter()
                    .map(|&k| {
                        let policy = RngPolicy {
                            seed,
                            path: TrialPath::Loopback,
                        };
                        crate::analysis::mc_error_rate(k, length, trials, !equal, policy)
                    })
                    .collect::<Result<Vec<_>, _>>()
            } else {
                mc_error_rates(&k, length, trials, !equal, seed)
            }
            .map_err(|e| Failure::usage(e.to_string()))?;
            write!(out, "{}", render_trials(&reports, format)).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(if reports.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_DIFFERENT })
        }
        Command::Orthogonality { n, seed } => {
            let n = usize::try_from(n).map_err(|_| Failure::usage("n too large"))?;
            let report = orthogonality_suite(&CoinSeed::from_u64(seed), n).map_err(|e| Failure::usage(e.to_string()))?;
            write_out(out, &report)?;
            Ok(if report.pass() { EXIT_OK } else { EXIT_DIFFERENT })
        }
        Command::Oracle { length, k } => {
            let report: OracleReport = exhaustive_oracle(length, k).map_err(|e| Failure::usage(e.to_string()))?;
            write_out(out, &report)?;
            let expected = num_rational::Ratio::new(1, 1u64 << k);
            let ok = report.uniform_probability() == Some(expected) && report.equal_pair_rejections == 0;
            Ok(if ok { EXIT_OK } else { EXIT_DIFFERENT })
        }
        Command::Scenario { length, rate, epsilon } => {
            let report = scenario_report(length, rate, epsilon).map_err(|e| Failure::usage(e.to_string()))?;
            write_out(out, &report)?;
            Ok(EXIT_OK)
        }
        Command::Continuum { length, samples, seed } => {
            let length = usize::try_from(length).map_err(|_| Failure::usage("L too large"))?;
            let samples = usize::try_from(samples).map_err(|_| Failure::usage("samples too large"))?;
            let report = continuum_report(&CoinSeed::from_u64(seed), length, samples, seed)
                .map_err(|e| Failure::usage(e.to_string()))?;
            write_out(out, &report)?;
            Ok(EXIT_OK)
        }
    }
}
