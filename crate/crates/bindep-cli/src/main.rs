//! `bindep`: partitions, joint moments, Hilbert-space checks, Weingarten
//! tables and random matrix simulations from the command line.
//!
//! Every command renders its result as text. The text goes to `--out` or
//! stdout, and a JSON manifest with input and output hashes is written next
//! to it (`--manifest`, default `<out>.manifest.json` when `--out` is given).
//! `bindep replay <manifest>` re-runs the recorded command and compares the
//! output hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bindep::bigraph::{Bigraph, SiteModel};
use bindep::compat::{enumerate_compatible, CompatClass};
use bindep::cumulants::CumulantKind;
use bindep::matrix_model::{
    convergence_study, exact_expectation, limit_moment, monte_carlo, profile_matrices, random_matrices, MatrixModel,
};
use bindep::ncps::{CMatrix, C64};
use bindep::perm::Permutation;
use bindep::problem::{relative_gap, MomentProblem};
use bindep::weingarten::{weingarten_asymptotic, weingarten_table};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Parser)]
#[command(
    name = "bindep",
    version,
    about = "Joint moments of bigraph-independent random variables"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance of the internal consistency checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest file; defaults to `<out>.manifest.json` when `--out` is set.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the compatible partitions of a colored word.
    Partitions {
        /// Comma-separated vertex names.
        #[arg(long)]
        word: String,
        #[arg(long)]
        bigraph: PathBuf,
        /// full, zero or tilde.
        #[arg(long, default_value = "full")]
        class: String,
    },
    /// Joint moment of a moment problem.
    Moment {
        problem: PathBuf,
        /// free, boolean or classical.
        #[arg(long, default_value = "free")]
        basis: String,
    },
    /// Compares the three cumulant bases and the Hilbert-space oracle.
    Verify { problem: PathBuf },
    /// Random matrix model.
    Matrix {
        #[command(subcommand)]
        command: MatrixCommand,
    },
    /// Exact Weingarten values.
    Weingarten {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: u64,
        /// Comma-separated cycle type; the whole table when absent.
        #[arg(long)]
        cycle_type: Option<String>,
    },
    /// Bigraph utilities.
    Bigraph {
        #[command(subcommand)]
        command: BigraphCommand,
    },
    /// Re-runs the command recorded in a manifest and compares outputs.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Subcommand)]
enum MatrixCommand {
    /// Monte Carlo mean against the exact expectation and the limit.
    Simulate {
        #[command(flatten)]
        input: MatrixInput,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Monte Carlo check: |mean - exact| ≤ this many standard errors.
        #[arg(long, default_value_t = 4.0)]
        sigmas: f64,
    },
    /// Gap between the exact expectation and the limit along `--n`.
    Converge {
        #[command(flatten)]
        input: MatrixInput,
    },
}

#[derive(Debug, Args)]
struct MatrixInput {
    /// Site model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Word JSON: {"word": [...], "generator": "profile" | "random", "elements": [...]}.
    #[arg(long)]
    word: PathBuf,
    /// Per-site dimensions; repeat for a sweep.
    #[arg(long, required = true)]
    n: Vec<usize>,
}

#[derive(Debug, Subcommand)]
enum BigraphCommand {
    /// Kind of every ordered pair of distinct vertices.
    Classify { bigraph: PathBuf },
    /// Operad composition of an outer bigraph with one inner bigraph per vertex.
    Compose {
        #[arg(long)]
        outer: PathBuf,
        #[arg(long, required = true)]
        inner: Vec<PathBuf>,
    },
    /// Site model realizing a bigraph, checked by recomputing the bigraph.
    Realize { bigraph: PathBuf },
}

/// Word input of the matrix commands.
#[derive(Debug, Deserialize)]
struct WordJson {
    word: Vec<String>,
    #[serde(default)]
    generator: Option<String>,
    /// Row-major `[re, im]` matrices, one per letter; used for every `N`.
    #[serde(default)]
    elements: Option<Vec<Vec<[f64; 2]>>>,
}

/// Result of one command before it is written out.
struct Outcome {
    text: String,
    ok: bool,
    inputs: Vec<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FileHash {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    command: Vec<String>,
    version: String,
    seed: u64,
    tolerance: f64,
    inputs: Vec<FileHash>,
    output: FileHash,
    passed: bool,
    elapsed_ms: u128,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Serde errors carry line and column; keep the file name in front of them.
fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_bigraph(path: &Path) -> Result<Bigraph> {
    Bigraph::from_json_str(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_problem(path: &Path) -> Result<MomentProblem> {
    MomentProblem::from_json_str(&read(path)?, path.parent()).with_context(|| format!("in {}", path.display()))
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn cmd_partitions(word: &str, bigraph: &Path, class: &str) -> Result<Outcome> {
    let g = load_bigraph(bigraph)?;
    let names: Vec<&str> = word.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let colors = g.coloring(&names)?;
    let class: CompatClass = class.parse()?;
    let parts = enumerate_compatible(&colors, &g, class)?;
    let mut text = String::new();
    for p in &parts {
        text.push_str(&format!("{p}\n"));
    }
    text.push_str(&format!("count {}\n", parts.len()));
    Ok(Outcome {
        text,
        ok: true,
        inputs: vec![bigraph.to_path_buf()],
    })
}

fn cmd_moment(path: &Path, basis: &str, tol: f64) -> Result<Outcome> {
    let problem = load_problem(path)?;
    let basis: CumulantKind = basis.parse()?;
    let (value, count) = problem.moment(basis)?;
    let mut gap: f64 = 0.0;
    for other in CumulantKind::ALL {
        gap = gap.max(relative_gap(value, problem.moment(other)?.0));
    }
    let agree = gap <= tol;
    let body = serde_json::json!({
        "value": pair(value),
        "basis": format!("{basis:?}").to_lowercase(),
        "npartitions": count,
        "agree": agree,
        "maxgap": gap,
    });
    Ok(Outcome {
        text: format!("{}\n", serde_json::to_string_pretty(&body)?),
        ok: agree,
        inputs: vec![path.to_path_buf()],
    })
}

fn cmd_verify(path: &Path, tol: f64) -> Result<Outcome> {
    let problem = load_problem(path)?;
    let r = problem.verify()?;
    let ok = r.max_gap <= tol;
    let mut text = format!(
        "free {:.15e} {:+.15e}i\nboolean {:.15e} {:+.15e}i\nclassical {:.15e} {:+.15e}i\n",
        r.free.re, r.free.im, r.boolean.re, r.boolean.im, r.classical.re, r.classical.im
    );
    match r.hilbert {
        Some(h) => text.push_str(&format!("hilbert {:.15e} {:+.15e}i\n", h.re, h.im)),
        None => text.push_str("hilbert skipped (trace state)\n"),
    }
    if ok {
        text.push_str(&format!("PASS maxgap<{tol:e}\n"));
    } else {
        text.push_str(&format!("FAIL maxgap={:e} tolerance={tol:e}\n", r.max_gap));
    }
    Ok(Outcome {
        text,
        ok,
        inputs: vec![path.to_path_buf()],
    })
}

fn word_matrices(word: &WordJson, model: &MatrixModel, colors: &[usize], seed: u64) -> Result<Vec<CMatrix>> {
    if let Some(elements) = &word.elements {
        if elements.len() != colors.len() {
            bail!(
                "{} elements given for a word of length {}",
                elements.len(),
                colors.len()
            );
        }
        return colors
            .iter()
            .zip(elements)
            .map(|(&c, entries)| {
                let d = model.vertex_dim(c)?;
                if entries.len() != d * d {
                    bail!(
                        "element for `{}` needs {} entries at N = {}",
                        model.sites.vertices[c],
                        d * d,
                        model.n
                    );
                }
                Ok(CMatrix::from_row_iterator(
                    d,
                    d,
                    entries.iter().map(|p| C64::new(p[0], p[1])),
                ))
            })
            .collect();
    }
    match word.generator.as_deref().unwrap_or("profile") {
        "profile" => Ok(profile_matrices(model, colors)?),
        "random" => Ok(random_matrices(model, colors, seed)?),
        other => bail!("unknown generator `{other}` (expected profile or random)"),
    }
}

fn load_matrix_input(input: &MatrixInput) -> Result<(SiteModel, WordJson, Vec<usize>)> {
    let sites =
        SiteModel::from_json_str(&read(&input.model)?).with_context(|| format!("in {}", input.model.display()))?;
    let word: WordJson = parse_json(&input.word)?;
    let index: BTreeMap<&str, usize> = sites
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let colors = word
        .word
        .iter()
        .map(|w| {
            index
                .get(w.as_str())
                .copied()
                .with_context(|| format!("unknown vertex `{w}` in word"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sites, word, colors))
}

fn cmd_simulate(input: &MatrixInput, samples: usize, sigmas: f64, g: &Global) -> Result<Outcome> {
    let (sites, word, colors) = load_matrix_input(input)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record([
        "N", "samples", "mean_re", "mean_im", "stderr", "exact_re", "exact_im", "limit_re", "limit_im",
    ])?;
    let mut ok = true;
    for &n in &input.n {
        let model = MatrixModel::new(sites.clone(), n)?;
        let mats = word_matrices(&word, &model, &colors, g.seed)?;
        let est = monte_carlo(&model, &colors, &mats, samples, g.seed)?;
        let limit = limit_moment(&model, &colors, &mats)?;
        let exact = match exact_expectation(&model, &colors, &mats) {
            Ok(z) => Some(z),
            Err(e @ (bindep::Error::SizeGuard { .. } | bindep::Error::SingularGram { .. })) => {
                eprintln!("N = {n}: exact expectation unavailable: {e}");
                None
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(z) = exact {
            let dev = (est.mean - z).norm();
            if dev > sigmas * est.stderr + g.tolerance {
                eprintln!(
                    "N = {n}: |mean - exact| = {dev:e} exceeds {sigmas} standard errors ({:e})",
                    est.stderr
                );
                ok = false;
            }
        }
        let f = |x: f64| format!("{x:.17e}");
        let opt = |x: Option<f64>| x.map(f).unwrap_or_default();
        csv.write_record([
            n.to_string(),
            samples.to_string(),
            f(est.mean.re),
            f(est.mean.im),
            f(est.stderr),
            opt(exact.map(|z| z.re)),
            opt(exact.map(|z| z.im)),
            f(limit.re),
            f(limit.im),
        ])?;
    }
    let text = String::from_utf8(csv.into_inner()?)?;
    Ok(Outcome {
        text,
        ok,
        inputs: vec![input.model.clone(), input.word.clone()],
    })
}

fn cmd_converge(input: &MatrixInput, g: &Global) -> Result<Outcome> {
    let (sites, word, colors) = load_matrix_input(input)?;
    let generator =
        |m: &MatrixModel| word_matrices(&word, m, &colors, g.seed).map_err(|e| bindep::Error::Parse(e.to_string()));
    let study = convergence_study(&sites, &colors, &generator, &input.n)?;
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["N", "exact_re", "exact_im", "limit_re", "limit_im", "gap"])?;
    for r in &study.rows {
        let f = |x: f64| format!("{x:.17e}");
        csv.write_record([
            r.n.to_string(),
            f(r.exact.re),
            f(r.exact.im),
            f(r.limit.re),
            f(r.limit.im),
            f(r.gap),
        ])?;
    }
    let mut text = String::from_utf8(csv.into_inner()?)?;
    match study.slope {
        Some(s) => text.push_str(&format!("# slope {s:.6}\n")),
        None if study.is_exact() => text.push_str("# slope exact\n"),
        None => text.push_str("# slope undetermined\n"),
    }
    Ok(Outcome {
        text,
        ok: true,
        inputs: vec![input.model.clone(), input.word.clone()],
    })
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad integer `{t}`")))
        .collect()
}

fn cmd_weingarten(k: usize, n: u64, cycle_type: Option<&str>) -> Result<Outcome> {
    let table = weingarten_table(k, n)?;
    let text = match cycle_type {
        None => table.to_string(),
        Some(ct) => {
            let mut ct = parse_list(ct)?;
            ct.sort_unstable_by(|a, b| b.cmp(a));
            if ct.iter().sum::<usize>() != k || ct.contains(&0) {
                bail!("cycle type {ct:?} is not a partition of {k}");
            }
            let value = table.by_cycle_type(&ct).context("cycle type missing from table")?;
            let (mu, exp) = weingarten_asymptotic(&Permutation::of_cycle_type(&ct))?;
            format!("{value}\nasymptotic {mu} N^{exp}\n")
        }
    };
    Ok(Outcome {
        text,
        ok: true,
        inputs: vec![],
    })
}

fn cmd_bigraph(command: &BigraphCommand) -> Result<Outcome> {
    match command {
        BigraphCommand::Classify { bigraph } => {
            let g = load_bigraph(bigraph)?;
            let mut text = String::new();
            for v in 0..g.len() {
                for w in 0..g.len() {
                    if v != w {
                        text.push_str(&format!("{} {} {}\n", g.name(v), g.name(w), g.classify_pair(v, w)?));
                    }
                }
            }
            Ok(Outcome {
                text,
                ok: true,
                inputs: vec![bigraph.clone()],
            })
        }
        BigraphCommand::Compose { outer, inner } => {
            let o = load_bigraph(outer)?;
            let parts = inner.iter().map(|p| load_bigraph(p)).collect::<Result<Vec<_>>>()?;
            let composed = Bigraph::operad_compose(&o, &parts)?;
            let mut inputs = vec![outer.clone()];
            inputs.extend(inner.iter().cloned());
            Ok(Outcome {
                text: format!("{}\n", composed.to_json_string()),
                ok: true,
                inputs,
            })
        }
        BigraphCommand::Realize { bigraph } => {
            let g = load_bigraph(bigraph)?;
            let sites = g.realize_sites();
            let ok = sites.bigraph()?.same_structure(&g);
            if !ok {
                eprintln!("realized site model does not reproduce the bigraph");
            }
            Ok(Outcome {
                text: format!("{}\n", serde_json::to_string_pretty(&sites.to_json())?),
                ok,
                inputs: vec![bigraph.clone()],
            })
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Partitions { word, bigraph, class } => cmd_partitions(word, bigraph, class),
        Command::Moment { problem, basis } => cmd_moment(problem, basis, g.tolerance),
        Command::Verify { problem } => cmd_verify(problem, g.tolerance),
        Command::Matrix { command } => match command {
            MatrixCommand::Simulate { input, samples, sigmas } => cmd_simulate(input, *samples, *sigmas, g),
            MatrixCommand::Converge { input } => cmd_converge(input, g),
        },
        Command::Weingarten { k, n, cycle_type } => cmd_weingarten(*k, *n, cycle_type.as_deref()),
        Command::Bigraph { command } => cmd_bigraph(command),
        Command::Replay { manifest } => cmd_replay(manifest),
    }
}

fn cmd_replay(path: &Path) -> Result<Outcome> {
    let recorded: RunManifest = parse_json(path)?;
    let mut args = recorded.command.clone();
    strip_output_flags(&mut args);
    let cli = Cli::try_parse_from(&args).context("recorded command no longer parses")?;
    if matches!(cli.command, Command::Replay { .. }) {
        bail!("a manifest cannot record a replay");
    }
    let mut changed = Vec::new();
    for input in &recorded.inputs {
        let now = sha256_hex(read(Path::new(&input.path))?.as_bytes());
        if now != input.sha256 {
            changed.push(input.path.clone());
        }
    }
    let outcome = execute(&cli)?;
    let digest = sha256_hex(outcome.text.as_bytes());
    let identical = digest == recorded.output.sha256;
    let mut text = String::new();
    for p in &changed {
        text.push_str(&format!("input changed: {p}\n"));
    }
    text.push_str(if identical {
        "REPLAY identical\n"
    } else {
        "REPLAY differs\n"
    });
    text.push_str(&format!("sha256 {digest}\n"));
    Ok(Outcome {
        text,
        ok: identical && changed.is_empty(),
        inputs: vec![path.to_path_buf()],
    })
}

/// Drops `--out` and `--manifest` so a replay does not overwrite the
/// recorded files.
fn strip_output_flags(args: &mut Vec<String>) {
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if a == "--out" || a == "--manifest" {
            args.drain(i..(i + 2).min(args.len()));
        } else if a.starts_with("--out=") || a.starts_with("--manifest=") {
            args.remove(i);
        } else {
            i += 1;
        }
    }
}

fn write_outputs(cli: &Cli, argv: &[String], outcome: &Outcome, elapsed_ms: u128) -> Result<()> {
    let g = &cli.global;
    match &g.out {
        Some(p) => std::fs::write(p, &outcome.text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", outcome.text),
    }
    let manifest_path = g.manifest.clone().or_else(|| {
        g.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    let Some(manifest_path) = manifest_path else {
        return Ok(());
    };
    let inputs = outcome
        .inputs
        .iter()
        .map(|p| {
            Ok(FileHash {
                path: p.display().to_string(),
                sha256: sha256_hex(read(p)?.as_bytes()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command: argv.to_vec(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: g.seed,
        tolerance: g.tolerance,
        inputs,
        output: FileHash {
            path: g
                .out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".into()),
            sha256: sha256_hex(outcome.text.as_bytes()),
        },
        passed: outcome.ok,
        elapsed_ms,
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", manifest_path.display()))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    let start = Instant::now();
    let result = execute(&cli).and_then(|outcome| {
        write_outputs(&cli, &argv, &outcome, start.elapsed().as_millis())?;
        Ok(outcome.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
