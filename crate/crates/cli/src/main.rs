//! Command-line driver for the `symmatch` library: finite bipartite
//! matching, group-symmetric graphs and their factor quotients, Følner
//! ratio tables, a paradoxical-decomposition checker, the rank-2
//! counterexample bundle, and twin-lattice bottleneck bounds.
//!
//! Every subcommand prints one JSON report with the fixed top-level field
//! order `command`, `input_digest`, `result`, `timing_ms` — except the
//! explicit plain-text modes (`folner --format table` and
//! `twinlattice --emit`), which print stable text lines instead.
//! `input_digest` is the SHA-256 of the input file's bytes when the command
//! reads a file, and of the canonical command echo otherwise; `timing_ms`
//! is the only field allowed to differ between identical runs.
//!
//! Exit codes: `0` success; `1` the computation ran but answered its
//! decision question negatively (no perfect matching, a violated
//! decomposition, an infeasible bottleneck cap, a failed self-test); `2`
//! unusable input (missing or malformed files, bad flags, invalid group
//! data).
//!
//! Set `SYMMATCH_LOG=debug` (any `env_logger` filter works) for progress
//! chatter on stderr.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use symmatch::amenability::{
    broken_paradox, classification_table, folner_report, standard_f2_paradox, standard_schedule,
    verify_paradox,
};
use symmatch::bigraph::{hall_check, is_perfect, max_matching};
use symmatch::corpus::{random_bigraph, random_proper_symgraph, seeded_rng};
use symmatch::counterexample::{certify_no_symmetric_matching, explicit_matching, standard_bundle};
use symmatch::groups::ball;
use symmatch::oracle::{max_matching_size_exhaustive, torus_bottleneck_reference};
use symmatch::symmetry::{
    covers_interior, factor, is_proper, materialize, materialize_sym_matching, project,
    symmetric_perfect_matching, SymPerfectOutcome,
};
use symmatch::twinlattice::{
    bottleneck_bound, common_sublattice, irrational_window_estimate, matched_pairs, parse_ratio,
    BottleneckOutcome, RationalRotation,
};
use symmatch::{FiniteBigraph, FiniteSubset, GroupDescriptor, HallOutcome, Side, SymGraph};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "symmatch",
    version,
    about = "Matchings in bipartite graphs with a free group action",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum matching, perfectness, and Hall witnesses for a finite
    /// bipartite graph read from a JSON file.
    Match {
        /// Graph file: {"left": n, "right": m, "edges": [[i, j], ...]}.
        file: PathBuf,
        /// Exit 1 unless the graph has a perfect matching.
        #[arg(long)]
        require_perfect: bool,
    },
    /// Factor (orbit quotient) of a symmetric graph, with its properness
    /// flag and edge multiplicities.
    Factor {
        /// Symmetric graph file: {"group", "a_orbits", "b_orbits", "triples"}.
        file: PathBuf,
    },
    /// Perfect symmetric matching of a symmetric graph, or a factor Hall
    /// witness proving none exists.
    Symmatch {
        /// Symmetric graph file, as for `factor`.
        file: PathBuf,
        /// Also materialize a window of this radius and verify that the
        /// lifted matching covers its interior.
        #[arg(long, value_name = "RADIUS")]
        window: Option<u32>,
    },
    /// Almost-invariance table: |FU|/|F| across a growing window schedule.
    Folner {
        /// Group: Z^d, Z_n, or F_k (e.g. "Z^2", "Z_12", "F_2").
        #[arg(long)]
        group: String,
        /// Schedule length: boxes of side 1..=steps on integer lattices,
        /// balls of radius 0..steps elsewhere.
        #[arg(long, default_value_t = 8)]
        steps: u32,
        /// Test set U as semicolon-separated elements (e.g. "[0,0];[1,0]").
        /// Default: identity plus standard generators, with inverses on
        /// free groups.
        #[arg(long)]
        u: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Check a doubling of the rank-2 free group on a ball of words.
    Paradox {
        /// Verification radius: every word up to this length is checked.
        #[arg(long, default_value_t = 6)]
        radius: u32,
        /// Use the deliberately faulty doubling instead (exit 1 expected).
        #[arg(long)]
        corrupted: bool,
    },
    /// The symmetric graph with a perfect-matching factor but no symmetric
    /// perfect matching: emit the bundle, or verify it on a window.
    Counterexample {
        /// Emit the bundle (graph, translators, Latin square). Default.
        #[arg(long, conflicts_with = "verify")]
        emit: bool,
        /// Verify on a ball of this radius: interior coverage by the
        /// explicit matching plus the factor's Hall obstruction.
        #[arg(long, value_name = "RADIUS")]
        verify: Option<u32>,
    },
    /// Bottleneck matching distance between Z² and a rotated copy.
    #[command(group(ArgGroup::new("rotation").required(true).args(["pqc", "angle"])))]
    Twinlattice {
        /// Rational rotation as a Pythagorean triple p q c (p² + q² = c²).
        #[arg(long, num_args = 3, value_names = ["P", "Q", "C"])]
        pqc: Option<Vec<i64>>,
        /// Rotation angle in radians; switches to windowed estimation.
        #[arg(long)]
        angle: Option<f64>,
        /// Translation of the rotated copy (two rationals, e.g. 1/2 1/2).
        #[arg(long, num_args = 2, value_names = ["TX", "TY"], default_values = ["0", "0"])]
        t: Vec<String>,
        /// Largest distance threshold to search (rational mode); must stay
        /// below the rotation denominator c. Default: 99c/100.
        #[arg(long, conflicts_with = "angle")]
        rcap: Option<String>,
        /// Disc window radius (angle mode). Default: 10.
        #[arg(long, conflicts_with = "pqc")]
        window: Option<i64>,
        /// Print the matched pairs of one period as plain text
        /// ("x y -> x' y'", six decimals) instead of a JSON report.
        #[arg(long, conflicts_with = "angle")]
        emit: bool,
    },
    /// Deterministic randomized cross-checks of the library against its
    /// reference oracles.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Stable report wrapper. The struct field order is part of the output
/// contract; serde keeps it.
#[derive(Serialize)]
struct RunReport {
    command: String,
    input_digest: String,
    result: Value,
    timing_ms: u128,
}

/// What a handler produces: the canonical command echo, the digest source,
/// the structured result, whether the mathematical answer was negative
/// (exit 1), and — for the plain-text modes — the raw lines to print in
/// place of a JSON report.
struct Run {
    echo: String,
    digest: String,
    result: Value,
    negative: bool,
    plain: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SYMMATCH_LOG")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli.command) {
        Ok(run) => {
            let text = match run.plain {
                Some(text) => text,
                None => {
                    let report = RunReport {
                        command: run.echo,
                        input_digest: run.digest,
                        result: run.result,
                        timing_ms: start.elapsed().as_millis(),
                    };
                    serde_json::to_string_pretty(&report).expect("reports serialize")
                }
            };
            if !print_stdout(&text) {
                return ExitCode::from(EXIT_INPUT_ERROR);
            }
            if run.negative {
                ExitCode::from(EXIT_NEGATIVE)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

/// Prints with a trailing newline; a reader hanging up early (`head`, a
/// closed pipe) is not an error worth a panic or a diagnostic.
fn print_stdout(text: &str) -> bool {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Ok(()) => true,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => true,
        Err(e) => {
            eprintln!("error: writing stdout: {e}");
            false
        }
    }
}

fn run(cmd: Command) -> Result<Run> {
    match cmd {
        Command::Match {
            file,
            require_perfect,
        } => cmd_match(&file, require_perfect),
        Command::Factor { file } => cmd_factor(&file),
        Command::Symmatch { file, window } => cmd_symmatch(&file, window),
        Command::Folner {
            group,
            steps,
            u,
            format,
        } => cmd_folner(&group, steps, u.as_deref(), format),
        Command::Paradox { radius, corrupted } => cmd_paradox(radius, corrupted),
        Command::Counterexample { emit: _, verify } => cmd_counterexample(verify),
        Command::Twinlattice {
            pqc,
            angle,
            t,
            rcap,
            window,
            emit,
        } => match (pqc, angle) {
            (Some(pqc), None) => cmd_twinlattice_rational(&pqc, &t, rcap.as_deref(), emit),
            (None, Some(angle)) => cmd_twinlattice_angle(angle, &t, window.unwrap_or(10)),
            _ => unreachable!("clap enforces exactly one rotation flag"),
        },
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

fn read_input(file: &Path) -> Result<Vec<u8>> {
    std::fs::read(file).with_context(|| format!("reading {}", file.display()))
}

fn ratio_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Numeric flags accept exact rationals ("1/2", "0.25") with a plain-float
/// fallback for forms like "1e-3".
fn parse_float_arg(text: &str) -> Result<f64> {
    if let Ok(r) = parse_ratio(text) {
        return Ok(ratio_f64(r));
    }
    text.parse::<f64>()
        .with_context(|| format!("not a number: {text:?}"))
}

fn parse_descriptor(text: &str) -> Result<GroupDescriptor> {
    let num = |s: &str| -> Result<u64> {
        s.parse()
            .with_context(|| format!("bad group parameter {s:?} in {text:?}"))
    };
    if let Some(d) = text.strip_prefix("Z^") {
        Ok(GroupDescriptor::zd(num(d)? as usize))
    } else if let Some(n) = text.strip_prefix("Z_") {
        Ok(GroupDescriptor::cyclic(num(n)?))
    } else if let Some(k) = text.strip_prefix("F_") {
        Ok(GroupDescriptor::free(num(k)? as usize))
    } else {
        bail!("unrecognized group {text:?}: expected Z^d, Z_n, or F_k")
    }
}

/// Identity plus standard generators; free groups also get the inverses
/// (their balls only grow along reduced words, so one-sided steps would
/// miss half the boundary).
fn default_u(desc: &GroupDescriptor) -> Result<FiniteSubset> {
    match *desc {
        GroupDescriptor::Zd { d } => {
            let mut elems = vec![desc.identity()];
            for axis in 0..d {
                let mut v = vec![0i64; d];
                v[axis] = 1;
                elems.push(symmatch::GroupElem::Zd(v));
            }
            Ok(FiniteSubset::new(*desc, elems)?)
        }
        GroupDescriptor::Cyclic { .. } => {
            let elems: BTreeSet<_> = [desc.identity(), desc.parse_elem("1")?].into();
            Ok(FiniteSubset::new(*desc, elems.into_iter().collect())?)
        }
        GroupDescriptor::Free { .. } => Ok(ball(desc, 1)?),
    }
}

fn parse_u(desc: &GroupDescriptor, spec: &str) -> Result<FiniteSubset> {
    let mut elems = BTreeSet::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            bail!("empty element in U spec {spec:?}");
        }
        elems.insert(desc.parse_elem(part)?);
    }
    Ok(FiniteSubset::new(*desc, elems.into_iter().collect())?)
}

fn subset_echo(u: &FiniteSubset) -> String {
    u.elements()
        .iter()
        .map(|g| g.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Left-aligned column layout; plain spaces so the output diffs cleanly.
fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (k, cell) in row.iter().enumerate() {
            widths[k] = widths[k].max(cell.len());
        }
    }
    let fmt_row = |cells: &[String]| -> String {
        let mut line = String::new();
        for (k, cell) in cells.iter().enumerate() {
            if k > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{:<width$}", cell, width = widths[k]);
        }
        line.trim_end().to_string()
    };
    let mut out = fmt_row(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    for row in rows {
        out.push('\n');
        out.push_str(&fmt_row(row));
    }
    out
}

fn hall_value(g: &FiniteBigraph, side: Side) -> Value {
    match hall_check(g, side) {
        HallOutcome::Satisfied => json!("ok"),
        HallOutcome::Violated(w) => json!(w),
    }
}

fn cmd_match(file: &Path, require_perfect: bool) -> Result<Run> {
    let bytes = read_input(file)?;
    let g: FiniteBigraph = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing {} as a bipartite graph", file.display()))?;
    log::info!(
        "matching a {}+{} graph with {} edges",
        g.left_count(),
        g.right_count(),
        g.edges().len()
    );
    let m = max_matching(&g);
    let perfect = is_perfect(&g, &m)?;
    let result = json!({
        "left": g.left_count(),
        "right": g.right_count(),
        "max_matching": m.pairs().len(),
        "perfect": perfect,
        "pairs": m.pairs(),
        "hall_left": hall_value(&g, Side::Left),
        "hall_right": hall_value(&g, Side::Right),
    });
    let mut echo = format!("match {}", file.display());
    if require_perfect {
        echo.push_str(" --require-perfect");
    }
    Ok(Run {
        echo,
        digest: sha256_hex(&bytes),
        result,
        negative: require_perfect && !perfect,
        plain: None,
    })
}

fn read_sym_graph(file: &Path) -> Result<(Vec<u8>, SymGraph)> {
    let bytes = read_input(file)?;
    let sg: SymGraph = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing {} as a symmetric graph", file.display()))?;
    Ok((bytes, sg))
}

fn multiplicity_value(fac: &symmatch::FactorGraph) -> Value {
    Value::Array(
        fac.multiplicity
            .iter()
            .map(|(&(a, b), gs)| {
                json!([a, b, gs.iter().map(|g| g.to_string()).collect::<Vec<_>>()])
            })
            .collect(),
    )
}

fn cmd_factor(file: &Path) -> Result<Run> {
    let (bytes, sg) = read_sym_graph(file)?;
    let fac = factor(&sg);
    let result = json!({
        "group": sg.descriptor().to_string(),
        "factor": fac.underlying,
        "multiplicity": multiplicity_value(&fac),
        "proper": is_proper(&sg),
    });
    Ok(Run {
        echo: format!("factor {}", file.display()),
        digest: sha256_hex(&bytes),
        result,
        negative: false,
        plain: None,
    })
}

fn cmd_symmatch(file: &Path, window: Option<u32>) -> Result<Run> {
    let (bytes, sg) = read_sym_graph(file)?;
    let mut echo = format!("symmatch {}", file.display());
    if let Some(r) = window {
        let _ = write!(echo, " --window {r}");
    }
    let (result, negative) = match symmetric_perfect_matching(&sg)? {
        SymPerfectOutcome::Perfect(sm) => {
            let triples: Vec<Value> = sm
                .chosen()
                .iter()
                .map(|(&(a, b), g)| json!([a, g.to_string(), b]))
                .collect();
            let mut obj = json!({
                "status": "perfect",
                "matching": triples,
            });
            if let Some(r) = window {
                let w = ball(sg.descriptor(), r)?;
                let mat = materialize(&sg, &w)?;
                let m = materialize_sym_matching(&sg, &sm, &mat)?;
                log::info!(
                    "window radius {r}: {} left vertices, {} matched pairs",
                    mat.graph.left_count(),
                    m.pairs().len()
                );
                obj["window"] = json!({
                    "radius": r,
                    "window_size": w.len(),
                    "matched_pairs": m.pairs().len(),
                    "interior_covered": covers_interior(&mat, &m),
                });
            }
            (obj, false)
        }
        SymPerfectOutcome::NoneExists(witness) => (
            json!({
                "status": "no-perfect-matching",
                "witness": witness,
            }),
            true,
        ),
    };
    Ok(Run {
        echo,
        digest: sha256_hex(&bytes),
        result,
        negative,
        plain: None,
    })
}

fn cmd_folner(group: &str, steps: u32, u: Option<&str>, format: Format) -> Result<Run> {
    let desc = parse_descriptor(group)?;
    let uset = match u {
        Some(spec) => parse_u(&desc, spec)?,
        None => default_u(&desc)?,
    };
    let windows = standard_schedule(&desc, steps)?;
    let report = folner_report(&windows, &uset)?;
    let echo = format!(
        "folner --group {desc} --steps {steps} --u {} --format {}",
        subset_echo(&uset),
        match format {
            Format::Table => "table",
            Format::Json => "json",
        }
    );
    let digest = sha256_hex(echo.as_bytes());
    match format {
        Format::Json => Ok(Run {
            echo,
            digest,
            result: serde_json::to_value(&report)?,
            negative: false,
            plain: None,
        }),
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.label.clone(),
                        r.f_size.to_string(),
                        r.fu_size.to_string(),
                        r.ratio.to_string(),
                        r.witness_ratio.to_string(),
                        r.witness_elem.clone(),
                    ]
                })
                .collect();
            let mut table = render_table(
                &["window", "|F|", "|FU|", "|FU|/|F|", "worst-shift", "by"],
                &rows,
            );
            let _ = write!(table, "\ninfimum so far: {}", report.infimum_so_far);
            Ok(Run {
                echo,
                digest,
                result: Value::Null,
                negative: false,
                plain: Some(table),
            })
        }
    }
}

fn cmd_paradox(radius: u32, corrupted: bool) -> Result<Run> {
    let decomp = if corrupted {
        broken_paradox()
    } else {
        standard_f2_paradox()
    };
    let verdict = verify_paradox(&decomp, radius)?;
    let sample = ball(&GroupDescriptor::free(2), radius.min(2))?;
    let table: Vec<Value> = classification_table(&decomp, sample.elements())
        .into_iter()
        .map(|(word, a, b)| json!([word, a, b]))
        .collect();
    let result = json!({
        "radius": radius,
        "translators": decomp
            .f
            .elements()
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>(),
        "sample": table,
        "valid": verdict.is_none(),
        "offender": verdict.as_ref().map(|g| g.to_string()),
    });
    let mut echo = format!("paradox --radius {radius}");
    if corrupted {
        echo.push_str(" --corrupted");
    }
    let digest = sha256_hex(echo.as_bytes());
    Ok(Run {
        echo,
        digest,
        result,
        negative: verdict.is_some(),
        plain: None,
    })
}

fn cmd_counterexample(verify: Option<u32>) -> Result<Run> {
    let bundle = standard_bundle();
    match verify {
        None => {
            let n = bundle.square.n();
            let square: Vec<Vec<usize>> = (0..n)
                .map(|g| (0..n).map(|h| bundle.square.at(g, h)).collect())
                .collect();
            let result = json!({
                "graph": bundle.graph,
                "translators": bundle
                    .translators
                    .elements()
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>(),
                "square": square,
                "proper": is_proper(&bundle.graph),
            });
            let echo = "counterexample --emit".to_string();
            let digest = sha256_hex(echo.as_bytes());
            Ok(Run {
                echo,
                digest,
                result,
                negative: false,
                plain: None,
            })
        }
        Some(radius) => {
            let window = ball(bundle.translators.descriptor(), radius)?;
            let (mat, m) = explicit_matching(&bundle, &window)?;
            let covered = covers_interior(&mat, &m);
            let proper = is_proper(&bundle.graph);
            let witness = certify_no_symmetric_matching(&bundle)?;
            let fac = factor(&bundle.graph);
            let fm = max_matching(&fac.underlying);
            let result = json!({
                "radius": radius,
                "window_size": window.len(),
                "interior_covered": covered,
                "proper": proper,
                "factor": {
                    "left": fac.underlying.left_count(),
                    "right": fac.underlying.right_count(),
                    "edges": fac.underlying.edges().len(),
                    "max_matching": fm.pairs().len(),
                },
                "witness": witness,
            });
            let echo = format!("counterexample --verify {radius}");
            let digest = sha256_hex(echo.as_bytes());
            Ok(Run {
                echo,
                digest,
                result,
                negative: !(covered && proper),
                plain: None,
            })
        }
    }
}

fn format_point(x: Ratio<i128>, y: Ratio<i128>) -> String {
    format!("{:.6} {:.6}", ratio_f64(x), ratio_f64(y))
}

fn cmd_twinlattice_rational(pqc: &[i64], t: &[String], rcap: Option<&str>, emit: bool) -> Result<Run> {
    let (p, q, c) = (pqc[0], pqc[1], pqc[2]);
    let tx = parse_ratio(&t[0])?;
    let ty = parse_ratio(&t[1])?;
    let rot = RationalRotation::new(p, q, c, (tx, ty))?;
    let rcap = match rcap {
        Some(text) => parse_ratio(text)?,
        None => Ratio::new(99 * rot.c() as i128, 100),
    };
    let mut echo = format!(
        "twinlattice --pqc {} {} {} --t {tx} {ty} --rcap {rcap}",
        rot.p(),
        rot.q(),
        rot.c()
    );
    if emit {
        echo.push_str(" --emit");
    }
    let digest = sha256_hex(echo.as_bytes());
    match bottleneck_bound(&rot, rcap)? {
        BottleneckOutcome::Found {
            r_star_sq,
            matching,
            quotient,
        } => {
            let pairs = matched_pairs(&quotient, &matching);
            if emit {
                let lines: Vec<String> = pairs
                    .iter()
                    .map(|&((ax, ay), (bx, by))| {
                        format!("{} -> {}", format_point(ax, ay), format_point(bx, by))
                    })
                    .collect();
                return Ok(Run {
                    echo,
                    digest,
                    result: Value::Null,
                    negative: false,
                    plain: Some(lines.join("\n")),
                });
            }
            let pair_values: Vec<Value> = pairs
                .iter()
                .map(|((ax, ay), (bx, by))| {
                    json!([ax.to_string(), ay.to_string(), bx.to_string(), by.to_string()])
                })
                .collect();
            let result = json!({
                "mode": "rational",
                "rotation": rot,
                "sublattice": common_sublattice(&rot),
                "r_cap": rcap.to_string(),
                "r_star_sq": r_star_sq.to_string(),
                "r_star": format!("{:.6}", ratio_f64(r_star_sq).sqrt()),
                "period_pairs": pair_values,
            });
            Ok(Run {
                echo,
                digest,
                result,
                negative: false,
                plain: None,
            })
        }
        BottleneckOutcome::Infeasible { largest_tested } => Ok(Run {
            echo,
            digest,
            result: json!({
                "mode": "rational",
                "rotation": rot,
                "status": "infeasible",
                "r_cap": largest_tested.to_string(),
            }),
            negative: true,
            plain: None,
        }),
    }
}

fn cmd_twinlattice_angle(angle: f64, t: &[String], window: i64) -> Result<Run> {
    let tx = parse_float_arg(&t[0])?;
    let ty = parse_float_arg(&t[1])?;
    let report = irrational_window_estimate(angle, (tx, ty), window)?;
    let mut result = serde_json::to_value(&report)?;
    result["mode"] = json!("irrational");
    let echo = format!("twinlattice --angle {angle} --t {tx} {ty} --window {window}");
    let digest = sha256_hex(echo.as_bytes());
    Ok(Run {
        echo,
        digest,
        result,
        negative: false,
        plain: None,
    })
}

struct Check {
    name: &'static str,
    cases: usize,
    passed: bool,
}

/// Deterministic randomized cross-checks: the augmenting-path matcher
/// against the exhaustive oracle, Hall verdicts against coverage, factor
/// round trips on generated symmetric graphs, window transfer of factor
/// perfectness, and the twin-lattice quotient against the wraparound
/// reference.
fn cmd_selftest(seed: u64) -> Result<Run> {
    let mut checks = Vec::new();

    let mut rng = seeded_rng(seed);
    let mut matcher_ok = true;
    let mut hall_ok = true;
    const GRAPH_CASES: usize = 120;
    for k in 0..GRAPH_CASES {
        let left = 1 + k % 7;
        let right = 1 + (3 * k) % 7;
        let density = 0.15 + 0.1 * ((k % 8) as f64);
        let g = random_bigraph(&mut rng, left, right, density);
        let m = max_matching(&g);
        matcher_ok &= m.pairs().len() == max_matching_size_exhaustive(&g);
        let covers = |side: Side| match side {
            Side::Left => m.pairs().len() == g.left_count(),
            Side::Right => m.pairs().len() == g.right_count(),
        };
        for side in [Side::Left, Side::Right] {
            let satisfied = matches!(hall_check(&g, side), HallOutcome::Satisfied);
            hall_ok &= satisfied == covers(side);
        }
    }
    checks.push(Check {
        name: "matching-vs-exhaustive",
        cases: GRAPH_CASES,
        passed: matcher_ok,
    });
    checks.push(Check {
        name: "hall-vs-coverage",
        cases: 2 * GRAPH_CASES,
        passed: hall_ok,
    });

    let mut roundtrip_ok = true;
    const SYM_CASES: usize = 45;
    let families = [
        GroupDescriptor::zd(2),
        GroupDescriptor::cyclic(5),
        GroupDescriptor::free(2),
    ];
    for k in 0..SYM_CASES {
        let desc = families[k % families.len()];
        let orbits = 2 + k % 3;
        let sg = random_proper_symgraph(&mut rng, desc, orbits, orbits + 4, false);
        roundtrip_ok &= is_proper(&sg);
        let fac = factor(&sg);
        let m = max_matching(&fac.underlying);
        let lifted = symmatch::symmetry::lift(&sg, &m, None)?;
        roundtrip_ok &= project(&sg, &lifted)? == m;
    }
    checks.push(Check {
        name: "factor-round-trip",
        cases: SYM_CASES,
        passed: roundtrip_ok,
    });

    let mut transfer_ok = true;
    const TRANSFER_CASES: usize = 30;
    for k in 0..TRANSFER_CASES {
        let n = 4 + (k % 5) as u64;
        let desc = GroupDescriptor::cyclic(n);
        let deficient = k % 2 == 0;
        let sg = random_proper_symgraph(&mut rng, desc, 3, 6, deficient);
        let window = ball(&desc, 2 * n as u32)?;
        let mat = materialize(&sg, &window)?;
        let violated = symmatch::symmetry::interior_hall_violation(&mat).is_some();
        let fac = factor(&sg);
        let perfect = is_perfect(&fac.underlying, &max_matching(&fac.underlying))?;
        transfer_ok &= perfect == !violated;
    }
    checks.push(Check {
        name: "window-transfer",
        cases: TRANSFER_CASES,
        passed: transfer_ok,
    });

    let mut lattice_ok = true;
    let lattice_cases = [
        (0, 1, 1, (Ratio::new(1, 2), Ratio::new(1, 2))),
        (3, 4, 5, (Ratio::from_integer(0), Ratio::from_integer(0))),
        (3, 4, 5, (Ratio::new(1, 3), Ratio::from_integer(0))),
    ];
    for &(p, q, c, t) in &lattice_cases {
        let rot = RationalRotation::new(p, q, c, t)?;
        let rcap = Ratio::new(99 * c as i128, 100);
        let live = match bottleneck_bound(&rot, rcap)? {
            BottleneckOutcome::Found { r_star_sq, .. } => r_star_sq,
            BottleneckOutcome::Infeasible { .. } => Ratio::from_integer(-1),
        };
        lattice_ok &= live == torus_bottleneck_reference(p, q, c, t);
    }
    checks.push(Check {
        name: "twinlattice-vs-reference",
        cases: lattice_cases.len(),
        passed: lattice_ok,
    });

    let all_passed = checks.iter().all(|c| c.passed);
    let result = json!({
        "seed": seed,
        "checks": checks
            .iter()
            .map(|c| json!({"name": c.name, "cases": c.cases, "passed": c.passed}))
            .collect::<Vec<_>>(),
        "all_passed": all_passed,
    });
    let echo = format!("selftest --seed {seed}");
    let digest = sha256_hex(echo.as_bytes());
    Ok(Run {
        echo,
        digest,
        result,
        negative: !all_passed,
        plain: None,
    })
}
