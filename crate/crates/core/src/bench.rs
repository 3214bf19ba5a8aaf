//! Timing and operation-count measurement for the protocol algorithms
//! across a range of group sizes.
//!
//! For each configured size the harness builds a fresh group and times each
//! algorithm over a fixed number of iterations, preceded by warm-up runs
//! that are excluded from the means. Join is reported twice: "join-member"
//! is one full three-message enrollment (constant in group size), while
//! "join-group" enrolls an entire group of the configured size from an
//! empty registry and is linear by construction. Pairing and
//! exponentiation counts come from the thread-local counters in
//! [`crate::groups`] and are deterministic per algorithm.

use std::time::Instant;

use rand::{CryptoRng, RngCore};

use crate::groups::{op_counts, OpCounts};
use crate::lgs::{
    join_ra_issue, join_user_finish, join_user_start, link, setup, sign, trace, GroupParams,
    MemberKey, RaSecret, SaSecret, SignedMessage, SECURITY_LEVEL,
};
use crate::registry::{InMemoryRegistry, RegistryStore};

/// The algorithms a report covers, in emission order.
pub const ALGORITHMS: [&str; 7] = [
    "setup",
    "join-member",
    "join-group",
    "sign",
    "verify",
    "link",
    "trace",
];

const MESSAGE: &[u8] = b"bench message";
const AMOUNT: &[u8] = b"100";

/// What to measure: which group sizes, how many timed iterations per
/// algorithm, and how many warm-up runs to discard first.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Group sizes to measure; each must be at least 1.
    pub sizes: Vec<usize>,
    /// Timed iterations per algorithm per size.
    pub iters: usize,
    /// Untimed runs before sampling starts.
    pub warmup: usize,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            sizes: (3..=10).collect(),
            iters: 20,
            warmup: 2,
        }
    }
}

/// Timing series for one (algorithm, group size) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: &'static str,
    pub group_size: usize,
    /// One entry per timed iteration, in microseconds.
    pub samples_micros: Vec<f64>,
    pub mean_micros: f64,
    pub stddev_micros: f64,
    /// Pairings evaluated by a single run of the algorithm.
    pub pairings: u64,
    /// Group exponentiations performed by a single run of the algorithm.
    pub exps: u64,
}

impl BenchRow {
    fn new(
        algorithm: &'static str,
        group_size: usize,
        samples_micros: Vec<f64>,
        counts: OpCounts,
    ) -> BenchRow {
        let n = samples_micros.len() as f64;
        let mean = samples_micros.iter().sum::<f64>() / n;
        let stddev = if samples_micros.len() < 2 {
            0.0
        } else {
            let var = samples_micros
                .iter()
                .map(|s| (s - mean) * (s - mean))
                .sum::<f64>()
                / (n - 1.0);
            var.sqrt()
        };
        BenchRow {
            algorithm,
            group_size,
            samples_micros,
            mean_micros: mean,
            stddev_micros: stddev,
            pairings: counts.pairings,
            exps: counts.exps,
        }
    }
}

/// A full measurement run: one [`BenchRow`] per algorithm per size.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub iters: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// The row for one (algorithm, size) cell, if it was measured.
    pub fn row(&self, algorithm: &str, group_size: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.group_size == group_size)
    }

    /// CSV with one line per timed iteration plus a closing `mean` line per
    /// (algorithm, size) series. Inverse of [`parse_csv`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            for (i, micros) in row.samples_micros.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row.algorithm, row.group_size, i, micros
                ));
            }
            out.push_str(&format!(
                "{},{},mean,{}\n",
                row.algorithm, row.group_size, row.mean_micros
            ));
        }
        out
    }
}

fn time_one<T>(f: &mut impl FnMut() -> T) -> (f64, OpCounts) {
    let before = op_counts();
    let start = Instant::now();
    f();
    let micros = start.elapsed().as_secs_f64() * 1e6;
    (micros, op_counts().since(&before))
}

fn run_algorithm<T>(
    algorithm: &'static str,
    group_size: usize,
    cfg: &BenchConfig,
    mut f: impl FnMut() -> T,
) -> BenchRow {
    for _ in 0..cfg.warmup {
        f();
    }
    let mut samples = Vec::with_capacity(cfg.iters);
    let mut counts = OpCounts {
        pairings: 0,
        exps: 0,
    };
    for i in 0..cfg.iters {
        let (micros, delta) = time_one(&mut f);
        if i == 0 {
            counts = delta;
        }
        samples.push(micros);
    }
    BenchRow::new(algorithm, group_size, samples, counts)
}

struct BenchGroup {
    gpk: GroupParams,
    ra: RaSecret,
    sa: SaSecret,
    registry: InMemoryRegistry,
    members: Vec<MemberKey>,
}

fn enroll<R: RngCore + CryptoRng, S: RegistryStore>(
    gpk: &GroupParams,
    ra: &RaSecret,
    registry: &mut S,
    rng: &mut R,
) -> MemberKey {
    let (y, req) = join_user_start(gpk, rng);
    let cert = join_ra_issue(gpk, ra, &req, registry, rng).expect("fresh member");
    join_user_finish(gpk, y, cert).expect("honestly issued certificate")
}

fn build_group<R: RngCore + CryptoRng>(size: usize, rng: &mut R) -> BenchGroup {
    let (gpk, ra, sa) = setup(SECURITY_LEVEL, rng).expect("supported level");
    let mut registry = InMemoryRegistry::new();
    let members = (0..size)
        .map(|_| enroll(&gpk, &ra, &mut registry, rng))
        .collect();
    BenchGroup {
        gpk,
        ra,
        sa,
        registry,
        members,
    }
}

/// Measures every algorithm at every configured size. Each size gets a
/// fresh group; timed runs reuse that group's keys so the per-iteration
/// work is exactly one run of the algorithm under test.
///
/// Single-threaded; timings are wall-clock microseconds.
///
/// # Panics
///
/// If any configured size is 0 or `iters` is 0.
pub fn run_bench<R: RngCore + CryptoRng>(cfg: &BenchConfig, rng: &mut R) -> BenchReport {
    assert!(cfg.iters > 0, "iters must be at least 1");
    let mut rows = Vec::with_capacity(ALGORITHMS.len() * cfg.sizes.len());
    for &size in &cfg.sizes {
        assert!(size > 0, "group sizes must be at least 1");

        rows.push(run_algorithm("setup", size, cfg, || {
            setup(SECURITY_LEVEL, rng).expect("supported level")
        }));

        let mut group = build_group(size, rng);
        rows.push(run_algorithm("join-member", size, cfg, || {
            enroll(&group.gpk, &group.ra, &mut group.registry, rng)
        }));
        rows.push(run_algorithm("join-group", size, cfg, || {
            let mut registry = InMemoryRegistry::new();
            for _ in 0..size {
                enroll(&group.gpk, &group.ra, &mut registry, rng);
            }
        }));

        let signer = &group.members[0];
        rows.push(run_algorithm("sign", size, cfg, || {
            sign(&group.gpk, signer, MESSAGE, AMOUNT, rng)
        }));

        let sig = sign(&group.gpk, signer, MESSAGE, AMOUNT, rng);
        rows.push(run_algorithm("verify", size, cfg, || {
            crate::lgs::verify(&group.gpk, MESSAGE, AMOUNT, &sig)
        }));

        let sig_b = sign(&group.gpk, signer, b"second message", AMOUNT, rng);
        let pair = (
            SignedMessage {
                message: MESSAGE,
                amount: AMOUNT,
                signature: &sig,
            },
            SignedMessage {
                message: b"second message",
                amount: AMOUNT,
                signature: &sig_b,
            },
        );
        rows.push(run_algorithm("link", size, cfg, || {
            link(&group.gpk, &pair.0, &pair.1)
        }));

        rows.push(run_algorithm("trace", size, cfg, || {
            trace(
                &group.gpk,
                &group.sa,
                MESSAGE,
                AMOUNT,
                &sig,
                &group.registry,
            )
            .expect("signature valid and enrolled")
        }));
    }
    BenchReport {
        iters: cfg.iters,
        rows,
    }
}

const CSV_HEADER: &str = "algorithm,group_size,iter,micros";

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
#[error("csv parse error at line {line}: {reason}")]
pub struct CsvError {
    pub line: usize,
    pub reason: &'static str,
}

/// One parsed (algorithm, size) series from a report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub algorithm: String,
    pub group_size: usize,
    pub samples_micros: Vec<f64>,
    pub mean_micros: f64,
}

/// Parses [`BenchReport::to_csv`] output. Strict: the header must match,
/// each series must be contiguous with iterations numbered from 0, and
/// every series must close with its `mean` line.
pub fn parse_csv(text: &str) -> Result<Vec<CsvSeries>, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(CsvError {
                line: 1,
                reason: "missing or malformed header",
            })
        }
    }
    let mut series = Vec::new();
    let mut open: Option<(String, usize, Vec<f64>)> = None;
    for (idx, text_line) in lines {
        let line = idx + 1;
        if text_line.is_empty() {
            continue;
        }
        let mut fields = text_line.splitn(4, ',');
        let (algorithm, size, iter, micros) = match (
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
        ) {
            (Some(a), Some(s), Some(i), Some(m)) => (a, s, i, m),
            _ => {
                return Err(CsvError {
                    line,
                    reason: "expected 4 fields",
                })
            }
        };
        let group_size: usize = size.parse().map_err(|_| CsvError {
            line,
            reason: "group_size is not an integer",
        })?;
        let micros: f64 = micros.parse().map_err(|_| CsvError {
            line,
            reason: "micros is not a number",
        })?;
        if iter == "mean" {
            match open.take() {
                Some((alg, sz, samples)) if alg == algorithm && sz == group_size => {
                    series.push(CsvSeries {
                        algorithm: alg,
                        group_size: sz,
                        samples_micros: samples,
                        mean_micros: micros,
                    });
                }
                _ => {
                    return Err(CsvError {
                        line,
                        reason: "mean line does not close an open series",
                    })
                }
            }
        } else {
            let iter: usize = iter.parse().map_err(|_| CsvError {
                line,
                reason: "iter is neither an integer nor \"mean\"",
            })?;
            match &mut open {
                Some((alg, sz, samples)) if alg == algorithm && *sz == group_size => {
                    if iter != samples.len() {
                        return Err(CsvError {
                            line,
                            reason: "iterations out of order",
                        });
                    }
                    samples.push(micros);
                }
                Some(_) => {
                    return Err(CsvError {
                        line,
                        reason: "series interleaved without a mean line",
                    })
                }
                None => {
                    if iter != 0 {
                        return Err(CsvError {
                            line,
                            reason: "series does not start at iteration 0",
                        });
                    }
                    open = Some((algorithm.to_string(), group_size, vec![micros]));
                }
            }
        }
    }
    if open.is_some() {
        return Err(CsvError {
            line: usize::MAX,
            reason: "unterminated series at end of input",
        });
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::rng;

    fn small_config() -> BenchConfig {
        BenchConfig {
            sizes: vec![3, 4],
            iters: 2,
            warmup: 0,
        }
    }

    #[test]
    fn report_covers_every_algorithm_at_every_size() {
        let mut rng = rng(50);
        let report = run_bench(&small_config(), &mut rng);
        assert_eq!(report.rows.len(), ALGORITHMS.len() * 2);
        for &alg in &ALGORITHMS {
            for size in [3, 4] {
                let row = report.row(alg, size).unwrap();
                assert_eq!(row.samples_micros.len(), 2);
                let lo = row.samples_micros.iter().cloned().fold(f64::MAX, f64::min);
                let hi = row.samples_micros.iter().cloned().fold(f64::MIN, f64::max);
                assert!(lo <= row.mean_micros && row.mean_micros <= hi);
                assert!(row.stddev_micros >= 0.0);
            }
        }
    }

    #[test]
    fn counts_reflect_algorithm_structure() {
        let mut rng = rng(51);
        let report = run_bench(&small_config(), &mut rng);
        // Whole-group enrollment scales with size; everything else is flat.
        let jg3 = report.row("join-group", 3).unwrap();
        let jg4 = report.row("join-group", 4).unwrap();
        assert!(jg4.pairings > jg3.pairings);
        assert!(jg4.exps > jg3.exps);
        for size in [3, 4] {
            let sign = report.row("sign", size).unwrap();
            let verify = report.row("verify", size).unwrap();
            let link = report.row("link", size).unwrap();
            assert!(verify.pairings >= sign.pairings);
            assert_eq!(link.pairings, 2 * verify.pairings);
            assert_eq!(report.row("setup", size).unwrap().pairings, 0);
        }
    }

    #[test]
    fn counts_are_deterministic_across_runs() {
        let report_a = run_bench(&small_config(), &mut rng(52));
        let report_b = run_bench(&small_config(), &mut rng(53));
        for (a, b) in report_a.rows.iter().zip(&report_b.rows) {
            assert_eq!(a.algorithm, b.algorithm);
            assert_eq!((a.pairings, a.exps), (b.pairings, b.exps));
        }
    }

    #[test]
    fn csv_roundtrips() {
        let mut rng = rng(54);
        let report = run_bench(
            &BenchConfig {
                sizes: vec![3],
                iters: 3,
                warmup: 0,
            },
            &mut rng,
        );
        let parsed = parse_csv(&report.to_csv()).unwrap();
        assert_eq!(parsed.len(), report.rows.len());
        for (series, row) in parsed.iter().zip(&report.rows) {
            assert_eq!(series.algorithm, row.algorithm);
            assert_eq!(series.group_size, row.group_size);
            assert_eq!(series.samples_micros, row.samples_micros);
            assert_eq!(series.mean_micros, row.mean_micros);
        }
    }

    #[test]
    fn csv_parser_rejects_malformed_input() {
        assert_eq!(
            parse_csv("nope\n").unwrap_err().reason,
            "missing or malformed header"
        );
        let ok = "algorithm,group_size,iter,micros\nsign,3,0,10\nsign,3,mean,10\n";
        assert!(parse_csv(ok).is_ok());
        for bad in [
            "algorithm,group_size,iter,micros\nsign,3,1,10\nsign,3,mean,10\n",
            "algorithm,group_size,iter,micros\nsign,3,0,10\n",
            "algorithm,group_size,iter,micros\nsign,3,0,10\nverify,3,0,9\n",
            "algorithm,group_size,iter,micros\nsign,3,0,ten\nsign,3,mean,10\n",
            "algorithm,group_size,iter,micros\nsign,3,mean,10\n",
        ] {
            assert!(parse_csv(bad).is_err());
        }
    }
}
