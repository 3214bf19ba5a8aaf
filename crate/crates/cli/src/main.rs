//! Role-oriented command line for the linkable group signature scheme.
//!
//! Files are the transport between roles: `setup` writes the group
//! parameters and both authority keys, members exchange enrollment
//! messages as files, and signatures are verified, linked, and traced from
//! files. Stdout carries results only; progress and diagnostics go to
//! stderr.
//!
//! Exit codes: 0 success (verify accept, link linked), 1 verify reject or
//! link unlinked, 2 link invalid, 3 any operational error (bad arguments,
//! unreadable files, malformed keys, protocol refusals). Operational
//! errors print `error[CODE]: message` on stderr with CODE one of IO,
//! DECODE, REGISTRY, PROTOCOL.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::OsRng;
use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use lgs_core::bench::{run_bench, BenchConfig, BenchReport};
use lgs_core::groups::DecodeError;
use lgs_core::lgs::{
    decode_enrollment_secret, encode_enrollment_secret, join_ra_issue, join_user_finish,
    join_user_start, link, setup, sign, trace, verify, Cert, GroupParams, JoinRequest, LgsError,
    LinkResult, MemberKey, RaSecret, SaSecret, Signature, SignedMessage, SECURITY_LEVEL,
};
use lgs_core::registry::{FileRegistry, RegistryError};

#[derive(Debug, Parser)]
#[command(name = "lgs", version, about = "Linkable group signatures over files")]
struct Cli {
    /// Encoding for written key and signature files. Reads auto-detect.
    #[arg(long, global = true, value_enum, default_value_t = Format::Binary)]
    format: Format,
    /// Seed for a deterministic RNG; omit to use OS randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Binary,
    Hex,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create a group: writes gpk.bin, ra.sk, and sa.sk into a directory.
    Setup {
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Member: start enrollment. Writes the join request for the RA and a
    /// partial member file to keep for join-finish.
    JoinRequest {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        /// Join request to send to the RA.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Enrollment secret to keep; consumed by join-finish.
        #[arg(long, value_name = "FILE")]
        member_out: PathBuf,
    },
    /// RA: check a join request, issue a certificate, and record the new
    /// member in the registry (created if missing).
    JoinIssue {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        #[arg(long, value_name = "FILE")]
        ra_sk: PathBuf,
        #[arg(long, value_name = "FILE")]
        request: PathBuf,
        #[arg(long, value_name = "FILE")]
        registry: PathBuf,
        /// Certificate to send back to the member.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Member: check the issued certificate and assemble the signing key.
    JoinFinish {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        /// Partial member file from join-request.
        #[arg(long, value_name = "FILE")]
        member: PathBuf,
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Sign a message in the context of an amount.
    Sign {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        #[arg(long, value_name = "FILE")]
        member: PathBuf,
        /// Message file, or "-" for stdin.
        #[arg(long, value_name = "FILE|-")]
        message: String,
        /// Amount string; signatures on equal amounts by one member link.
        #[arg(long, value_name = "STRING")]
        amount: String,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Verify a signature. Prints accept or reject; exit 0 or 1.
    Verify {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        #[arg(long, value_name = "FILE|-")]
        message: String,
        #[arg(long, value_name = "STRING")]
        amount: String,
        #[arg(long, value_name = "FILE")]
        sig: PathBuf,
    },
    /// Decide whether two signatures are by the same member on the same
    /// amount. Prints linked, unlinked, or invalid; exit 0, 1, or 2.
    Link {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        /// First signed message: message file, amount, signature file.
        #[arg(long, num_args = 3, required = true,
              value_names = ["MESSAGE", "AMOUNT", "SIG"])]
        a: Vec<String>,
        /// Second signed message: message file, amount, signature file.
        #[arg(long, num_args = 3, required = true,
              value_names = ["MESSAGE", "AMOUNT", "SIG"])]
        b: Vec<String>,
    },
    /// SA: reveal the signer of a valid signature. Prints the registry
    /// index, Y, and A of the member.
    Trace {
        #[arg(long, value_name = "FILE")]
        gpk: PathBuf,
        #[arg(long, value_name = "FILE")]
        sa_sk: PathBuf,
        #[arg(long, value_name = "FILE")]
        registry: PathBuf,
        #[arg(long, value_name = "FILE|-")]
        message: String,
        #[arg(long, value_name = "STRING")]
        amount: String,
        #[arg(long, value_name = "FILE")]
        sig: PathBuf,
    },
    /// Time every algorithm across group sizes and emit CSV.
    Bench {
        /// Inclusive range "3..10" or comma list "3,5,8".
        #[arg(long, default_value = "3..10")]
        group_sizes: Sizes,
        /// Timed iterations per algorithm per size.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        iters: u32,
        /// Untimed warm-up runs excluded from the means.
        #[arg(long, default_value_t = 2)]
        warmup: u32,
        /// CSV output path; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Measure each group size on its own thread. Times remain
        /// wall-clock and may inflate under contention.
        #[arg(long)]
        parallel: bool,
    },
}

/// Group sizes from the command line: "3..10" (inclusive) or "3,5,8".
#[derive(Debug, Clone)]
struct Sizes(Vec<usize>);

impl FromStr for Sizes {
    type Err = String;

    fn from_str(s: &str) -> Result<Sizes, String> {
        let sizes: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| "range start is not a number")?;
            let hi: usize = hi.trim().parse().map_err(|_| "range end is not a number")?;
            if hi < lo {
                return Err("range end is below range start".into());
            }
            (lo..=hi).collect()
        } else {
            s.split(',')
                .map(|part| part.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| "sizes must be numbers")?
        };
        if sizes.is_empty() || sizes.contains(&0) {
            return Err("group sizes must be at least 1".into());
        }
        Ok(Sizes(sizes))
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Decode(String),
    #[error("{0}")]
    Registry(String),
    #[error("{0}")]
    Protocol(String),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Io(_) => "IO",
            CliError::Decode(_) => "DECODE",
            CliError::Registry(_) => "REGISTRY",
            CliError::Protocol(_) => "PROTOCOL",
        }
    }
}

impl From<LgsError> for CliError {
    fn from(e: LgsError) -> CliError {
        match e {
            LgsError::Registry(r) => CliError::Registry(r.to_string()),
            other => CliError::Protocol(other.to_string()),
        }
    }
}

impl From<RegistryError> for CliError {
    fn from(e: RegistryError) -> CliError {
        CliError::Registry(e.to_string())
    }
}

/// OS randomness by default, a seeded stream under `--seed`.
enum CliRng {
    Os(OsRng),
    Seeded(ChaCha20Rng),
}

impl CliRng {
    fn new(seed: Option<u64>) -> CliRng {
        match seed {
            Some(s) => CliRng::Seeded(ChaCha20Rng::seed_from_u64(s)),
            None => CliRng::Os(OsRng),
        }
    }
}

impl RngCore for CliRng {
    fn next_u32(&mut self) -> u32 {
        match self {
            CliRng::Os(r) => r.next_u32(),
            CliRng::Seeded(r) => r.next_u32(),
        }
    }

    fn next_u64(&mut self) -> u64 {
        match self {
            CliRng::Os(r) => r.next_u64(),
            CliRng::Seeded(r) => r.next_u64(),
        }
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        match self {
            CliRng::Os(r) => r.fill_bytes(dest),
            CliRng::Seeded(r) => r.fill_bytes(dest),
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        match self {
            CliRng::Os(r) => r.try_fill_bytes(dest),
            CliRng::Seeded(r) => r.try_fill_bytes(dest),
        }
    }
}

impl CryptoRng for CliRng {}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn decode_err(what: &str, e: DecodeError) -> CliError {
    CliError::Decode(format!("{what}: {e}"))
}

/// Hex artifacts are "0x" plus an even number of hex digits, possibly with
/// trailing whitespace; anything else is taken as raw bytes. Binary
/// artifacts never collide: every wire format begins with an "LGS" magic.
fn unhex(bytes: &[u8]) -> Option<Vec<u8>> {
    let text = std::str::from_utf8(bytes).ok()?;
    let digits = text.trim_end().strip_prefix("0x")?;
    hex::decode(digits).ok()
}

fn read_artifact(path: &Path) -> Result<Vec<u8>, CliError> {
    let raw = fs::read(path).map_err(|e| io_err(path, e))?;
    Ok(unhex(&raw).unwrap_or(raw))
}

fn write_artifact(path: &Path, bytes: &[u8], format: Format) -> Result<(), CliError> {
    let data = match format {
        Format::Binary => bytes.to_vec(),
        Format::Hex => {
            let mut text = String::with_capacity(2 * bytes.len() + 3);
            text.push_str("0x");
            for b in bytes {
                let _ = write!(text, "{b:02x}");
            }
            text.push('\n');
            text.into_bytes()
        }
    };
    fs::write(path, data).map_err(|e| io_err(path, e))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Writes to stdout, tolerating a consumer that closed the pipe early:
/// `lgs trace ... | head -1` must still exit with the protocol result,
/// and the exit code carries the outcome even when the text is dropped.
fn emit(text: std::fmt::Arguments) {
    let _ = std::io::stdout().write_fmt(text);
}

/// Message bytes from a file path, or stdin when the path is "-".
fn read_message(source: &str) -> Result<Vec<u8>, CliError> {
    if source == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read(source).map_err(|e| io_err(Path::new(source), e))
    }
}

fn load_gpk(path: &Path) -> Result<GroupParams, CliError> {
    GroupParams::from_bytes(&read_artifact(path)?).map_err(|e| decode_err("group parameters", e))
}

fn open_registry(path: &Path) -> Result<FileRegistry, CliError> {
    let reg = if path.exists() {
        FileRegistry::open(path)?
    } else {
        FileRegistry::create(path)?
    };
    Ok(reg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let mut rng = CliRng::new(cli.seed);
    let format = cli.format;
    match cli.command {
        Command::Setup { out_dir } => {
            fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
            let (gpk, ra, sa) = setup(SECURITY_LEVEL, &mut rng)?;
            write_artifact(&out_dir.join("gpk.bin"), &gpk.to_bytes(), format)?;
            write_artifact(&out_dir.join("ra.sk"), &ra.to_bytes(), format)?;
            write_artifact(&out_dir.join("sa.sk"), &sa.to_bytes(), format)?;
            Ok(0)
        }
        Command::JoinRequest {
            gpk,
            out,
            member_out,
        } => {
            let gpk = load_gpk(&gpk)?;
            let (y, request) = join_user_start(&gpk, &mut rng);
            write_artifact(&out, &request.to_bytes(), format)?;
            write_artifact(&member_out, &encode_enrollment_secret(&y), format)?;
            Ok(0)
        }
        Command::JoinIssue {
            gpk,
            ra_sk,
            request,
            registry,
            out,
        } => {
            let gpk = load_gpk(&gpk)?;
            let ra = RaSecret::from_bytes(&read_artifact(&ra_sk)?)
                .map_err(|e| decode_err("ra key", e))?;
            let request = JoinRequest::from_bytes(&read_artifact(&request)?)
                .map_err(|e| decode_err("join request", e))?;
            let mut store = open_registry(&registry)?;
            let cert = join_ra_issue(&gpk, &ra, &request, &mut store, &mut rng)?;
            write_artifact(&out, &cert.to_bytes(), format)?;
            Ok(0)
        }
        Command::JoinFinish {
            gpk,
            member,
            cert,
            out,
        } => {
            let gpk = load_gpk(&gpk)?;
            let y = decode_enrollment_secret(&read_artifact(&member)?)
                .map_err(|e| decode_err("partial member file", e))?;
            let cert = Cert::from_bytes(&read_artifact(&cert)?)
                .map_err(|e| decode_err("certificate", e))?;
            let key = join_user_finish(&gpk, y, cert)?;
            write_artifact(&out, &key.to_bytes(), format)?;
            Ok(0)
        }
        Command::Sign {
            gpk,
            member,
            message,
            amount,
            out,
        } => {
            let gpk = load_gpk(&gpk)?;
            let member = MemberKey::from_bytes(&read_artifact(&member)?)
                .map_err(|e| decode_err("member key", e))?;
            let message = read_message(&message)?;
            let sig = sign(&gpk, &member, &message, amount.as_bytes(), &mut rng);
            write_artifact(&out, &sig.to_bytes(), format)?;
            Ok(0)
        }
        Command::Verify {
            gpk,
            message,
            amount,
            sig,
        } => {
            let gpk = load_gpk(&gpk)?;
            let message = read_message(&message)?;
            // Malformed signature bytes are a rejection, not an error: the
            // file is readable, it just does not hold a valid signature.
            let accept = match Signature::from_bytes(&read_artifact(&sig)?) {
                Ok(sig) => verify(&gpk, &message, amount.as_bytes(), &sig),
                Err(_) => false,
            };
            if accept {
                emit(format_args!("accept\n"));
                Ok(0)
            } else {
                emit(format_args!("reject\n"));
                Ok(1)
            }
        }
        Command::Link { gpk, a, b } => {
            let gpk = load_gpk(&gpk)?;
            let load = |triple: &[String]| -> Result<(Vec<u8>, Vec<u8>, Option<Signature>), CliError> {
                let message = read_message(&triple[0])?;
                let amount = triple[1].clone().into_bytes();
                let sig = Signature::from_bytes(&read_artifact(Path::new(&triple[2]))?).ok();
                Ok((message, amount, sig))
            };
            let (msg_a, amt_a, sig_a) = load(&a)?;
            let (msg_b, amt_b, sig_b) = load(&b)?;
            let result = match (&sig_a, &sig_b) {
                (Some(sig_a), Some(sig_b)) => link(
                    &gpk,
                    &SignedMessage {
                        message: &msg_a,
                        amount: &amt_a,
                        signature: sig_a,
                    },
                    &SignedMessage {
                        message: &msg_b,
                        amount: &amt_b,
                        signature: sig_b,
                    },
                ),
                // Undecodable signature bytes cannot verify.
                _ => LinkResult::Invalid,
            };
            let (word, code) = match result {
                LinkResult::Linked => ("linked", 0),
                LinkResult::Unlinked => ("unlinked", 1),
                LinkResult::Invalid => ("invalid", 2),
            };
            emit(format_args!("{word}\n"));
            Ok(code)
        }
        Command::Trace {
            gpk,
            sa_sk,
            registry,
            message,
            amount,
            sig,
        } => {
            let gpk = load_gpk(&gpk)?;
            let sa = SaSecret::from_bytes(&read_artifact(&sa_sk)?)
                .map_err(|e| decode_err("sa key", e))?;
            let store = FileRegistry::open(&registry)?;
            let message = read_message(&message)?;
            let sig = Signature::from_bytes(&read_artifact(&sig)?)
                .map_err(|e| decode_err("signature", e))?;
            let row = trace(&gpk, &sa, &message, amount.as_bytes(), &sig, &store)?;
            emit(format_args!("index: {}\n", row.index));
            emit(format_args!("Y: 0x{}\n", hex::encode(row.y_pub.to_bytes())));
            emit(format_args!("A: 0x{}\n", hex::encode(row.a.to_bytes())));
            Ok(0)
        }
        Command::Bench {
            group_sizes,
            iters,
            warmup,
            csv,
            parallel,
        } => {
            let report = bench_report(group_sizes.0, iters as usize, warmup as usize, parallel, cli.seed);
            let text = report.to_csv();
            match csv {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
                    eprintln!("wrote {}", path.display());
                }
                None => emit(format_args!("{text}")),
            }
            Ok(0)
        }
    }
}

fn bench_report(
    sizes: Vec<usize>,
    iters: usize,
    warmup: usize,
    parallel: bool,
    seed: Option<u64>,
) -> BenchReport {
    if !parallel {
        let cfg = BenchConfig {
            sizes,
            iters,
            warmup,
        };
        return run_bench(&cfg, &mut CliRng::new(seed));
    }
    eprintln!("parallel run: sizes measured concurrently, times are wall-clock");
    let reports: Vec<BenchReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| {
                let cfg = BenchConfig {
                    sizes: vec![size],
                    iters,
                    warmup,
                };
                // Distinct stream per size so seeded runs stay reproducible.
                let seed = seed.map(|s| s.wrapping_add(i as u64 + 1));
                scope.spawn(move || run_bench(&cfg, &mut CliRng::new(seed)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench thread panicked"))
            .collect()
    });
    BenchReport {
        iters,
        rows: reports.into_iter().flat_map(|r| r.rows).collect(),
    }
}
