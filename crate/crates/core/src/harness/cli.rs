//! Command-line front end. Exit codes: 0 success, 1 validation or bound
//! failure, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    claim32_stats, contradiction_check, expected_error_sweep, lemma31_check, lemma32_check, params_compute,
    random_lemma_instance, XSelection,
};
use crate::error::{Error, Result};
use crate::harness::sweep::{run_sweep, FamilySpec, SweepConfig};
use crate::harness::{
    derive_seed, fmt_f64, write_atomic, write_with_manifest, CheckEntry, RunManifest, VerdictReport, ENV_OUT_DIR,
    ENV_WORKERS,
};
use crate::invert::{
    run_many, run_stepwise_test, run_with_provider, CorruptedReflection, ExactReflection, PseudoReflection,
    RunOptions, RunReport, StageProvider, SteppedPseudoReflection,
};
use crate::ops::{sample_bad_set, AngleMode, BadMode, PseudoIdentity, PseudoIdentitySpec};
use crate::perm::{FamilyKind, Permutation, DEFAULT_MAX_BITS};
use crate::tol;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

fn parse_even_n(s: &str) -> std::result::Result<u32, String> {
    let n: u32 = s.parse().map_err(|_| format!("`{s}` is not a bit length"))?;
    if !n.is_multiple_of(2) {
        return Err(format!("n must be even (got {n})"));
    }
    if !(2..=DEFAULT_MAX_BITS).contains(&n) {
        return Err(format!("n must lie in [2, {DEFAULT_MAX_BITS}] (got {n})"));
    }
    Ok(n)
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("value must lie in [0, 1] (got {v})"));
    }
    Ok(v)
}

#[derive(Parser, Debug)]
#[command(name = "owpinv", version, about = "Statevector experiments for quantum permutation inversion")]
pub struct Cli {
    /// Master seed for every derived seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub master_seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = ENV_WORKERS)]
    pub workers: Option<usize>,
    /// Directory for relative output paths.
    #[arg(long, global = true, env = ENV_OUT_DIR)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a permutation table file.
    GenPerm {
        #[command(flatten)]
        perm: PermArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact inversion over a set of images.
    RunInv {
        #[command(flatten)]
        perm: PermArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        xs: XArgs,
        #[command(flatten)]
        output: RunOutput,
    },
    /// Inversion with pseudo-reflections.
    RunAvinv {
        #[command(flatten)]
        perm: PermArgs,
        #[command(flatten)]
        pseudo: PseudoArgs,
        #[command(flatten)]
        xs: XArgs,
        /// Apply `J`, the reflection and `J^dagger` as separate steps.
        #[arg(long)]
        stepped: bool,
        #[command(flatten)]
        output: RunOutput,
    },
    /// Error-length, decomposition, stage-average and aggregate bound checks.
    CheckLemmas {
        #[command(flatten)]
        perm: PermArgs,
        #[command(flatten)]
        pseudo: PseudoArgs,
        #[command(flatten)]
        xs: XArgs,
        /// Random `(S, T, J)` instances for the per-instance bounds.
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Success margin `q` for the Markov count at `1/q`.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stage-by-stage comparison of a provider against the exact post-stage states.
    TestStages {
        #[command(flatten)]
        perm: PermArgs,
        #[arg(long, value_enum, default_value_t = ProviderKind::Exact)]
        provider: ProviderKind,
        /// Stage to corrupt, for `--provider corrupted`.
        #[arg(long, required_if_eq("provider", "corrupted"))]
        corrupt_stage: Option<usize>,
        #[command(flatten)]
        pseudo: PseudoArgs,
        #[command(flatten)]
        xs: XArgs,
        /// Minimum stage fidelity (defaults depend on the provider).
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid sweep from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print `p`, `q` and `claim31_count` for failure rate `1/r` at size `n`.
    Params {
        #[arg(long)]
        r: f64,
        #[arg(long, value_parser = parse_even_n_unbounded)]
        n: u32,
    },
}

fn parse_even_n_unbounded(s: &str) -> std::result::Result<u32, String> {
    let n: u32 = s.parse().map_err(|_| format!("`{s}` is not a bit length"))?;
    if n < 2 || !n.is_multiple_of(2) || n > 62 {
        return Err(format!("n must be even and in [2, 62] (got {n})"));
    }
    Ok(n)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProviderKind {
    Exact,
    Pseudo,
    Stepped,
    Corrupted,
}

#[derive(Args, Debug, Clone)]
pub struct PermArgs {
    #[arg(long, value_parser = parse_even_n, required_unless_present = "perm_file")]
    pub n: Option<u32>,
    #[arg(long, default_value = "random")]
    pub family: FamilyKind,
    /// Permutation seed (derived from the master seed when absent).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub mask: Option<usize>,
    /// Affine matrix rows, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub matrix: Option<Vec<usize>>,
    #[arg(long)]
    pub offset: Option<usize>,
    /// Read the permutation from a table file instead.
    #[arg(long, conflicts_with_all = ["n", "seed", "mask", "matrix", "offset"])]
    pub perm_file: Option<PathBuf>,
}

impl PermArgs {
    fn load(&self, master: u64) -> Result<Permutation> {
        if let Some(path) = &self.perm_file {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            return Permutation::parse(&text);
        }
        let n = self.n.ok_or_else(|| Error::Config("--n is required".into()))?;
        let spec = FamilySpec {
            family: self.family,
            seed: self.seed,
            mask: self.mask,
            matrix: self.matrix.clone(),
            offset: self.offset,
            file: None,
        };
        spec.build(n, master)
    }
}

#[derive(Args, Debug, Clone)]
pub struct PseudoArgs {
    /// Good-state defect bound.
    #[arg(long, default_value_t = 0.0, value_parser = parse_unit)]
    pub a: f64,
    /// Bad fraction; the bad set has `floor(b 2^n)` values.
    #[arg(long, default_value_t = 0.0, value_parser = parse_unit, conflicts_with = "bad_size")]
    pub b: f64,
    /// Explicit bad-set size; sets `b = size / 2^n`.
    #[arg(long)]
    pub bad_size: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value = "worst-case")]
    pub angle_mode: AngleMode,
    #[arg(long, default_value = "full-rotation")]
    pub bad_mode: BadMode,
    /// Operator seed (derived from the master seed when absent).
    #[arg(long)]
    pub j_seed: Option<u64>,
    /// Read the operator from a serialized file instead.
    #[arg(long, conflicts_with_all = ["a", "b", "bad_size", "k", "angle_mode", "bad_mode", "j_seed"])]
    pub j_file: Option<PathBuf>,
}

impl PseudoArgs {
    fn load(&self, n: u32, master: u64) -> Result<PseudoIdentity> {
        if let Some(path) = &self.j_file {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            return PseudoIdentity::parse(&text);
        }
        let size = 1usize << n;
        let seed = self
            .j_seed
            .unwrap_or_else(|| derive_seed(master, "pseudo-identity", n as u64));
        let (b, bad_set) = match self.bad_size {
            Some(count) => {
                if count > size {
                    return Err(Error::PseudoIdentityParams(format!("bad size {count} exceeds 2^{n}")));
                }
                let set = sample_bad_set(n, count, derive_seed(master, "bad-set", n as u64));
                (count as f64 / size as f64, Some(set))
            }
            None => (self.b, None),
        };
        PseudoIdentity::build(&PseudoIdentitySpec {
            n,
            k: self.k,
            a: self.a,
            b,
            bad_mode: self.bad_mode,
            angle_mode: self.angle_mode,
            bad_set,
            seed,
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct XArgs {
    /// Explicit images, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "sample")]
    pub x: Option<Vec<usize>>,
    /// Stratified sample of this many images instead of all of them.
    #[arg(long)]
    pub sample: Option<usize>,
}

impl XArgs {
    fn selection(&self, n: u32, master: u64) -> XSelection {
        match self.sample {
            Some(count) => XSelection::Sample {
                count,
                seed: derive_seed(master, "x-sample", n as u64),
            },
            None => XSelection::All,
        }
    }

    fn resolve(&self, perm: &Permutation, master: u64) -> Result<Vec<usize>> {
        match &self.x {
            Some(xs) => {
                let mut xs = xs.clone();
                for &x in &xs {
                    perm.check_value(x)?;
                }
                xs.sort_unstable();
                xs.dedup();
                Ok(xs)
            }
            None => Ok(self.selection(perm.n(), master).resolve(perm.n())),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunOutput {
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write per-stage traces as JSON.
    #[arg(long)]
    pub trace_json: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let workers = cli.workers.filter(|&w| w > 0);
    let result = match workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Err(Error::Config(format!("cannot build worker pool: {e}"))),
        },
        None => execute(&cli),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

fn resolve_out(cli: &Cli, out: Option<&Path>, default_name: &str) -> PathBuf {
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(default_name));
    match &cli.out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path,
    }
}

fn execute(cli: &Cli) -> Result<u8> {
    let master = cli.master_seed;
    match &cli.command {
        Command::GenPerm { perm, out } => {
            let p = perm.load(master)?;
            let name = format!("perm-{}-n{}.txt", p.family(), p.n());
            let path = resolve_out(cli, out.as_deref(), &name);
            let mut manifest = RunManifest::new("gen-perm", perm_config(perm, &p));
            if let Some(seed) = p.seed() {
                manifest.seed("perm", seed);
            }
            write_with_manifest(&path, p.to_file_string().as_bytes(), manifest)?;
            println!("{}", path.display());
            Ok(EXIT_OK)
        }
        Command::RunInv { perm, k, xs, output } => {
            let p = perm.load(master)?;
            let provider = ExactReflection { k: *k };
            let config = serde_json::json!({
                "perm": perm_config(perm, &p),
                "k": k,
                "x": x_config(xs),
            });
            run_command(cli, "run-inv", &p, None, &provider, xs, output, config, RunOptions::exact())
        }
        Command::RunAvinv {
            perm,
            pseudo,
            xs,
            stepped,
            output,
        } => {
            let p = perm.load(master)?;
            let op = pseudo.load(p.n(), master)?;
            check_sizes(&p, &op)?;
            let config = serde_json::json!({
                "perm": perm_config(perm, &p),
                "pseudo": pseudo_config(pseudo, &op),
                "stepped": stepped,
                "x": x_config(xs),
            });
            let (fused, split) = (PseudoReflection { op: &op }, SteppedPseudoReflection { op: &op });
            let provider: &dyn StageProvider = if *stepped { &split } else { &fused };
            run_command(cli, "run-avinv", &p, Some(&op), provider, xs, output, config, RunOptions::pseudo())
        }
        Command::CheckLemmas {
            perm,
            pseudo,
            xs,
            instances,
            q,
            out,
        } => {
            let p = perm.load(master)?;
            let op = pseudo.load(p.n(), master)?;
            check_sizes(&p, &op)?;
            let report = check_lemmas(&p, &op, xs, *instances, *q, master)?;
            emit_verdict(cli, out.as_deref(), &report)
        }
        Command::TestStages {
            perm,
            provider,
            corrupt_stage,
            pseudo,
            xs,
            threshold,
            out,
        } => {
            let p = perm.load(master)?;
            let xlist = xs.resolve(&p, master)?;
            let op = match provider {
                ProviderKind::Pseudo | ProviderKind::Stepped => Some(pseudo.load(p.n(), master)?),
                _ => None,
            };
            let exact = ExactReflection { k: pseudo.k };
            let corrupted = CorruptedReflection {
                stage: corrupt_stage.unwrap_or(0),
                k: pseudo.k,
            };
            if *provider == ProviderKind::Corrupted {
                p.check_stage(corrupted.stage)?;
            }
            let fused;
            let split;
            let (chosen, default_threshold): (&dyn StageProvider, f64) = match provider {
                ProviderKind::Exact => (&exact, tol::EXACT_STAGE_THRESHOLD),
                ProviderKind::Corrupted => (&corrupted, tol::EXACT_STAGE_THRESHOLD),
                ProviderKind::Pseudo => {
                    fused = PseudoReflection { op: op.as_ref().unwrap() };
                    (&fused, tol::PSEUDO_STAGE_THRESHOLD)
                }
                ProviderKind::Stepped => {
                    split = SteppedPseudoReflection { op: op.as_ref().unwrap() };
                    (&split, tol::PSEUDO_STAGE_THRESHOLD)
                }
            };
            let threshold = threshold.unwrap_or(default_threshold);
            let stepwise = run_stepwise_test(&p, &xlist, chosen, threshold)?;
            let checks = stepwise
                .per_x
                .iter()
                .flat_map(|v| {
                    v.stages.iter().map(move |s| {
                        CheckEntry::lower(
                            format!("x={}/stage={}/fidelity", v.x, s.j),
                            s.stage_fidelity,
                            threshold,
                            s.pass,
                        )
                    })
                })
                .collect();
            let report = VerdictReport::new("test-stages", checks, stepwise.first_failing_stage);
            emit_verdict(cli, out.as_deref(), &report)
        }
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(config).map_err(|e| Error::io(config, e))?;
            let parsed = SweepConfig::from_json(&text)?;
            let workers = cli.workers.filter(|&w| w > 0).unwrap_or_else(rayon::current_num_threads);
            let output = run_sweep(&parsed, workers)?;
            let path = resolve_out(cli, out.as_deref(), "sweep.csv");
            write_with_manifest(&path, &output.csv, output.manifest)?;
            println!("{}", path.display());
            Ok(EXIT_OK)
        }
        Command::Params { r, n } => {
            let params = params_compute(*r, *n)?;
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "p={}", fmt_count(params.p)).map_err(stdout_err)?;
            writeln!(stdout, "q={}", fmt_count(params.q)).map_err(stdout_err)?;
            writeln!(stdout, "claim31_count={}", fmt_count(params.claim31_count)).map_err(stdout_err)?;
            Ok(if contradiction_check(*r) { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io(Path::new("<stdout>"), e)
}

/// Integers (to 1e-9 relative) print bare, everything else at full precision.
fn fmt_count(v: f64) -> String {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) && r.abs() < 9.0e15 {
        format!("{}", r as i64)
    } else {
        fmt_f64(v)
    }
}

fn check_sizes(perm: &Permutation, op: &PseudoIdentity) -> Result<()> {
    if op.n() != perm.n() {
        return Err(Error::DimensionMismatch {
            expected_n: perm.n(),
            expected_k: op.k(),
            found_n: op.n(),
            found_k: op.k(),
        });
    }
    Ok(())
}

fn perm_config(args: &PermArgs, perm: &Permutation) -> serde_json::Value {
    serde_json::json!({
        "n": perm.n(),
        "family": perm.family(),
        "seed": perm.seed(),
        "mask": args.mask,
        "matrix": args.matrix,
        "offset": args.offset,
        "file": args.perm_file.as_ref().and_then(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()),
    })
}

fn pseudo_config(args: &PseudoArgs, op: &PseudoIdentity) -> serde_json::Value {
    serde_json::json!({
        "k": op.k(),
        "a": op.a(),
        "b": op.b(),
        "bad_size": op.bad_set().len(),
        "angle_mode": op.angle_mode(),
        "bad_mode": op.bad_mode(),
        "seed": op.seed(),
        "file": args.j_file.as_ref().and_then(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()),
    })
}

fn x_config(xs: &XArgs) -> serde_json::Value {
    match (&xs.x, xs.sample) {
        (Some(list), _) => serde_json::json!({ "mode": "list", "x": list }),
        (None, Some(count)) => serde_json::json!({ "mode": "sample", "count": count }),
        (None, None) => serde_json::json!({ "mode": "all" }),
    }
}

pub const RUN_COLUMNS: [&str; 11] = [
    "n",
    "family",
    "perm_seed",
    "a",
    "b",
    "bad_size",
    "j_seed",
    "x",
    "success_prob",
    "v2_norm",
    "first_failing_stage",
];

/// CSV bytes for a set of run reports, in the given order.
pub fn run_csv(perm: &Permutation, op: Option<&PseudoIdentity>, reports: &[RunReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RUN_COLUMNS)?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in reports {
        w.write_record([
            perm.n().to_string(),
            perm.family().to_string(),
            opt(perm.seed().map(|s| s.to_string())),
            opt(op.map(|o| fmt_f64(o.a()))),
            opt(op.map(|o| fmt_f64(o.b()))),
            opt(op.map(|o| o.bad_set().len().to_string())),
            opt(op.map(|o| o.seed().to_string())),
            r.x.to_string(),
            fmt_f64(r.success_prob),
            fmt_f64(r.v2_norm),
            opt(r.first_failing_stage().map(|j| j.to_string())),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

#[allow(clippy::too_many_arguments)]
fn run_command(
    cli: &Cli,
    command: &str,
    perm: &Permutation,
    op: Option<&PseudoIdentity>,
    provider: &dyn StageProvider,
    xs: &XArgs,
    output: &RunOutput,
    config: serde_json::Value,
    opts: RunOptions,
) -> Result<u8> {
    let master = cli.master_seed;
    let xlist = xs.resolve(perm, master)?;
    let opts = opts.traced();
    let reports = run_many(&xlist, |x| run_with_provider(perm, x, provider, &opts).map(|(r, _)| r))?;
    let csv = run_csv(perm, op, &reports)?;

    let mut manifest = RunManifest::new(command, config);
    manifest.seed("master", master);
    if let Some(seed) = perm.seed() {
        manifest.seed("perm", seed);
    }
    if let Some(op) = op {
        manifest.seed("pseudo-identity", op.seed());
    }
    if xs.x.is_none() {
        if let XSelection::Sample { seed, .. } = xs.selection(perm.n(), master) {
            manifest.seed("x-sample", seed);
        }
    }
    let path = resolve_out(cli, output.out.as_deref(), &format!("{command}.csv"));
    if let Some(trace_path) = &output.trace_json {
        let trace_path = resolve_out(cli, Some(trace_path), "trace.json");
        let mut bytes = serde_json::to_vec_pretty(&reports)?;
        bytes.push(b'\n');
        manifest.add_output(&trace_path, &bytes);
        write_atomic(&trace_path, &bytes)?;
    }
    write_with_manifest(&path, &csv, manifest)?;
    println!("{}", path.display());
    Ok(EXIT_OK)
}

fn emit_verdict(cli: &Cli, out: Option<&Path>, report: &VerdictReport) -> Result<u8> {
    let bytes = report.to_bytes()?;
    match out {
        Some(path) => write_atomic(&resolve_out(cli, Some(path), "verdict.json"), &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes).map_err(stdout_err)?,
    }
    Ok(if report.all_pass { EXIT_OK } else { EXIT_FAIL })
}

fn check_lemmas(
    perm: &Permutation,
    op: &PseudoIdentity,
    xs: &XArgs,
    instances: usize,
    q: f64,
    master: u64,
) -> Result<VerdictReport> {
    let n = perm.n();
    let (a, b) = (op.a(), op.b());
    let seeds: Vec<usize> = (0..instances).collect();
    let per_instance = run_many(&seeds, |i| {
        let (j_op, s, t) = random_lemma_instance(n, a, b, derive_seed(master, "lemma-instance", i as u64))?;
        Ok((lemma31_check(&j_op, &s, &t)?, lemma32_check(&j_op, &s, &t)?))
    })?;
    let mut checks = Vec::new();
    for (i, (l31, l32)) in per_instance.iter().enumerate() {
        checks.push(CheckEntry::upper(
            format!("instance={i}/error-length"),
            l31.measured,
            l31.bound,
            l31.pass,
        ));
        checks.push(CheckEntry::upper(
            format!("instance={i}/perp-norm"),
            l32.perp_norm,
            l32.error_length,
            l32.pass,
        ));
    }
    let selection = match &xs.x {
        Some(_) => return Err(Error::Config("check-lemmas takes --sample, not --x".into())),
        None => xs.selection(n, master),
    };
    for j in 0..n as usize / 2 {
        for with_t in [true, false] {
            let s = expected_error_sweep(perm, op, j, with_t, &selection)?;
            let tag = if with_t { "tag" } else { "reflect" };
            checks.push(CheckEntry::upper(
                format!("stage={j}/{tag}/mean-error-length"),
                s.mean,
                s.bound + s.slack,
                s.bound_pass,
            ));
            if let Some(r) = &s.ratio {
                if r.asserted {
                    checks.push(CheckEntry::upper(
                        format!("stage={j}/{tag}/bad-fraction-identity"),
                        (r.mean_ratio - r.expected).abs(),
                        tol::SCALAR,
                        r.pass,
                    ));
                }
            }
        }
    }
    let agg = claim32_stats(perm, op, &selection, q)?;
    checks.push(CheckEntry::upper("aggregate/mean-v2-norm", agg.mean, agg.bound + agg.slack, agg.bound_pass));
    for e in &agg.exceed {
        checks.push(CheckEntry::upper(
            format!("aggregate/markov-count@{}", fmt_f64(e.threshold)),
            e.count as f64,
            e.markov_limit,
            e.pass,
        ));
    }
    Ok(VerdictReport::new("check-lemmas", checks, None))
}
