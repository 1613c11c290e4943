//! The `rewire` command-line tool: every pass and utility as a subcommand.
//!
//! Exit codes: 0 success, 1 check-equiv found the circuits inequivalent,
//! 2 usage or input parse errors, 3 internal invariant violation. Every
//! error prints one machine-readable line `error: <kind>: <detail>` on
//! stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rewire::egraph::{parse_rules, run, EGraph, Rewrite, RunLimits};
use rewire::extract::{extract_greedy, extract_ilp, lp, CostModel};
use rewire::identify::{identify, ComponentLibrary, IdentifyConfig};
use rewire::learn::{abstract_corpus, discover, LearnConfig};
use rewire::netlist::{
    from_terms_like, parse_json, parse_sexpr, to_terms, write_json, write_sexpr, Netlist,
};
use rewire::oracle::{check_equiv, EquivConfig};
use rewire::reroll::{parse_loopform, reroll, unroll, write_loopform, RerollConfig};
use rewire::retime::{retime_min_registers, source_retime, RetimeConfig};

#[derive(Parser)]
#[command(name = "rewire", version, about = "Netlist rewriting toolkit")]
struct Cli {
    /// Key-value config file (`key = value` lines); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtractorArg {
    Greedy,
    Ilp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Sexpr,
}

#[derive(Args)]
struct LimitArgs {
    /// Saturation iteration limit (0 leaves the input untouched).
    #[arg(long)]
    iter_limit: Option<usize>,
    /// Stop growing the e-graph beyond this many e-nodes.
    #[arg(long)]
    node_limit: Option<usize>,
    /// Wall-clock limit for saturation, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct IoArgs {
    /// Input netlist file (.json or .sexpr).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force input/output format instead of inferring from extensions.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the pass report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse netlists and check every structural invariant.
    Validate {
        /// Netlist files to check.
        inputs: Vec<PathBuf>,
        /// Validate this many files in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Run rewrite rules to saturation, then extract a netlist back out.
    Saturate {
        #[command(flatten)]
        io: IoArgs,
        /// Rule file(s) to apply.
        #[arg(long)]
        rules: Vec<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, value_enum)]
        extractor: Option<ExtractorArg>,
        /// Cost model file (`symbol cost` lines).
        #[arg(long)]
        cost_model: Option<PathBuf>,
    },
    /// Extract the best netlist under a cost model (optionally after rules).
    Extract {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        rules: Vec<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, value_enum)]
        extractor: Option<ExtractorArg>,
        #[arg(long)]
        cost_model: Option<PathBuf>,
    },
    /// Export the extraction problem in LP format.
    ExportLp {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        rules: Vec<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        cost_model: Option<PathBuf>,
    },
    /// Move registers to minimize their count.
    Retime {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, value_enum)]
        extractor: Option<ExtractorArg>,
        /// Also apply Boolean rules while retiming.
        #[arg(long)]
        bool_rules: bool,
    },
    /// Push every register back toward the primary inputs.
    SourceRetime {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Abstract standard-library components out of gate structure.
    Identify {
        #[command(flatten)]
        io: IoArgs,
        /// Component library file(s) extending the built-ins.
        #[arg(long)]
        library: Vec<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long, value_enum)]
        extractor: Option<ExtractorArg>,
        #[arg(long)]
        cost_model: Option<PathBuf>,
    },
    /// Discover repeated submodules across a corpus of netlists.
    Learn {
        /// Input netlist files forming the corpus.
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        /// Reject candidates with more parameters than this.
        #[arg(long)]
        max_arity: Option<usize>,
        /// Reject candidates matched fewer times than this.
        #[arg(long)]
        min_matches: Option<usize>,
        /// Report at most this many candidates.
        #[arg(long)]
        top: Option<usize>,
        /// Write the top abstraction as a component library file.
        #[arg(long)]
        emit_lib: Option<PathBuf>,
        /// Rewrite the corpus with the top abstraction into this directory.
        #[arg(long)]
        abstract_into: Option<PathBuf>,
        /// Write the ranked candidates as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Roll repeated structure into loops (loop-form output).
    Reroll {
        #[command(flatten)]
        io: IoArgs,
        /// Minimum group size worth a loop.
        #[arg(long)]
        min_group: Option<usize>,
    },
    /// Expand a loop-form file back into a flat netlist.
    Unroll {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Compare two netlists; exit 1 when inequivalent.
    CheckEquiv {
        a: PathBuf,
        b: PathBuf,
        /// Seed for sampled stimulus.
        #[arg(long)]
        seed: Option<u64>,
        /// Exhaustive truth tables up to this many input bits.
        #[arg(long)]
        max_exhaustive_bits: Option<u32>,
        /// Random vectors above the exhaustive cap.
        #[arg(long)]
        samples: Option<usize>,
        /// Compared cycles after warm-up for sequential circuits.
        #[arg(long)]
        cycles: Option<usize>,
        /// Component library file(s) for learned cell semantics.
        #[arg(long)]
        library: Vec<PathBuf>,
        /// Write the verdict as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
}

struct AppError {
    kind: &'static str,
    detail: String,
    code: u8,
}

impl AppError {
    fn new(kind: &'static str, detail: impl ToString) -> AppError {
        AppError {
            kind,
            detail: detail.to_string(),
            code: 2,
        }
    }

    fn internal(detail: impl ToString) -> AppError {
        AppError {
            kind: "internal",
            detail: detail.to_string(),
            code: 3,
        }
    }
}

macro_rules! from_error {
    ($ty:ty, $kind:literal) => {
        impl From<$ty> for AppError {
            fn from(e: $ty) -> AppError {
                AppError::new($kind, e)
            }
        }
    };
}

from_error!(rewire::netlist::NetlistError, "netlist");
from_error!(rewire::egraph::RuleError, "rules");
from_error!(rewire::extract::ExtractError, "extract");
from_error!(rewire::retime::RetimeError, "retime");
from_error!(rewire::identify::IdentifyError, "identify");
from_error!(rewire::learn::LearnError, "learn");
from_error!(rewire::reroll::RerollError, "reroll");
from_error!(rewire::oracle::OracleError, "oracle");

fn io_error(path: &Path, e: std::io::Error) -> AppError {
    AppError::new("io", format!("{}: {e}", path.display()))
}

/// `key = value` lines, `#` comments.
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&PathBuf>) -> Result<Config, AppError> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(AppError::new(
                        "config",
                        format!("{}:{}: expected `key = value`", path.display(), i + 1),
                    ));
                };
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, AppError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| AppError::new("config", format!("bad value `{v}` for `{key}`"))),
        }
    }

    fn paths(&self, key: &str) -> Vec<PathBuf> {
        self.0
            .get(key)
            .map(|v| v.split_whitespace().map(PathBuf::from).collect())
            .unwrap_or_default()
    }
}

fn detect_format(path: &Path, flag: Option<FormatArg>) -> FormatArg {
    if let Some(f) = flag {
        return f;
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("sexpr" | "sx" | "net" | "loop") => FormatArg::Sexpr,
        _ => FormatArg::Json,
    }
}

fn read_netlist(path: &Path, flag: Option<FormatArg>) -> Result<Netlist, AppError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let nl = match detect_format(path, flag) {
        FormatArg::Json => parse_json(&text)?,
        FormatArg::Sexpr => parse_sexpr(&text)?,
    };
    Ok(nl)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), AppError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_netlist_out(io: &IoArgs, nl: &Netlist) -> Result<(), AppError> {
    // The output must satisfy every invariant we promise; a failure here is
    // ours, not the user's.
    nl.validate().map_err(AppError::internal)?;
    let fmt = match (&io.out, io.format) {
        (_, Some(f)) => f,
        (Some(path), None) => detect_format(path, None),
        (None, None) => FormatArg::Json,
    };
    let text = match fmt {
        FormatArg::Json => write_json(nl),
        FormatArg::Sexpr => write_sexpr(nl),
    };
    emit(io.out.as_ref(), &text)
}

fn write_report<T: Serialize>(path: Option<&PathBuf>, report: &T) -> Result<(), AppError> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(report)
            .map_err(|e| AppError::internal(format!("report serialization: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

fn load_limits(args: &LimitArgs, cfg: &Config) -> Result<RunLimits, AppError> {
    let defaults = RunLimits::default();
    Ok(RunLimits {
        max_iterations: args
            .iter_limit
            .or(cfg.get("iter-limit")?)
            .unwrap_or(defaults.max_iterations),
        max_enodes: args
            .node_limit
            .or(cfg.get("node-limit")?)
            .unwrap_or(defaults.max_enodes),
        max_seconds: args
            .time_limit
            .or(cfg.get("time-limit")?)
            .unwrap_or(defaults.max_seconds),
    })
}

fn load_rules(paths: &[PathBuf], cfg: &Config) -> Result<Vec<Rewrite>, AppError> {
    let paths: Vec<PathBuf> = if paths.is_empty() {
        cfg.paths("rules")
    } else {
        paths.to_vec()
    };
    let mut rules = Vec::new();
    for path in &paths {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        rules.extend(parse_rules(&text)?);
    }
    Ok(rules)
}

fn load_cost_model(path: Option<&PathBuf>, cfg: &Config) -> Result<CostModel, AppError> {
    let path = match path {
        Some(p) => Some(p.clone()),
        None => cfg.0.get("cost-model").map(PathBuf::from),
    };
    match path {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
            Ok(CostModel::parse(&text)?)
        }
        None => Ok(CostModel::default()),
    }
}

fn load_library(paths: &[PathBuf], cfg: &Config) -> Result<ComponentLibrary, AppError> {
    let paths: Vec<PathBuf> = if paths.is_empty() {
        cfg.paths("library")
    } else {
        paths.to_vec()
    };
    let mut lib = ComponentLibrary::builtins();
    for path in &paths {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        lib.extend_from_text(&text)?;
    }
    Ok(lib)
}

fn load_extractor(
    flag: Option<ExtractorArg>,
    cfg: &Config,
    default: ExtractorArg,
) -> Result<ExtractorArg, AppError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match cfg.0.get("extractor").map(String::as_str) {
        Some("greedy") => Ok(ExtractorArg::Greedy),
        Some("ilp") => Ok(ExtractorArg::Ilp),
        Some(other) => Err(AppError::new(
            "config",
            format!("unknown extractor `{other}`"),
        )),
        None => Ok(default),
    }
}

fn to_extractor(arg: ExtractorArg) -> rewire::identify::Extractor {
    match arg {
        ExtractorArg::Ilp => rewire::identify::Extractor::Ilp,
        ExtractorArg::Greedy => rewire::identify::Extractor::Greedy,
    }
}

#[derive(Serialize)]
struct SaturateReport {
    run: rewire::egraph::RunReport,
    cost: f64,
}

#[allow(clippy::too_many_arguments)]
fn saturate_like(
    io: &IoArgs,
    rules: &[PathBuf],
    limits: &LimitArgs,
    extractor: Option<ExtractorArg>,
    cost_model: Option<&PathBuf>,
    cfg: &Config,
    default_extractor: ExtractorArg,
) -> Result<(), AppError> {
    let nl = read_netlist(&io.input, io.format)?;
    let rules = load_rules(rules, cfg)?;
    let limits = load_limits(limits, cfg)?;
    let cm = load_cost_model(cost_model, cfg)?;
    let extractor = load_extractor(extractor, cfg, default_extractor)?;

    let term = to_terms(&nl)?;
    let mut g = EGraph::new();
    let root = g.add(&term).map_err(AppError::internal)?;
    let report = run(&mut g, &rules, &limits);
    let root = g.find(root);
    let selection = match extractor {
        ExtractorArg::Ilp => extract_ilp(&mut g, &[root], &cm, None)?.value,
        ExtractorArg::Greedy => extract_greedy(&mut g, &[root], &cm)?,
    };
    let out_term = selection.term(root, &mut g);
    let result = from_terms_like(&out_term, &nl)?;
    write_netlist_out(io, &result)?;
    write_report(
        io.report.as_ref(),
        &SaturateReport {
            run: report,
            cost: selection.total_cost,
        },
    )
}

fn run_cli(cli: Cli) -> Result<u8, AppError> {
    let cfg = Config::load(cli.config.as_ref())?;
    match cli.cmd {
        Cmd::Validate {
            inputs,
            jobs,
            format,
        } => {
            if inputs.is_empty() {
                return Err(AppError::new("usage", "validate needs at least one file"));
            }
            let jobs = jobs.max(1);
            let results: Vec<(PathBuf, Result<(), AppError>)> = if jobs == 1 {
                inputs
                    .iter()
                    .map(|p| (p.clone(), read_netlist(p, format).map(|_| ())))
                    .collect()
            } else {
                std::thread::scope(|scope| {
                    inputs
                        .chunks(inputs.len().div_ceil(jobs))
                        .map(|chunk| {
                            scope.spawn(move || {
                                chunk
                                    .iter()
                                    .map(|p| (p.clone(), read_netlist(p, format).map(|_| ())))
                                    .collect::<Vec<_>>()
                            })
                        })
                        .collect::<Vec<_>>()
                        .into_iter()
                        .flat_map(|h| h.join().expect("validation thread"))
                        .collect()
                })
            };
            let mut failed = false;
            for (path, result) in results {
                match result {
                    Ok(()) => println!("ok {}", path.display()),
                    Err(e) => {
                        failed = true;
                        eprintln!("error: {}: {}: {}", e.kind, path.display(), e.detail);
                    }
                }
            }
            Ok(if failed { 2 } else { 0 })
        }
        Cmd::Saturate {
            io,
            rules,
            limits,
            extractor,
            cost_model,
        } => {
            saturate_like(
                &io,
                &rules,
                &limits,
                extractor,
                cost_model.as_ref(),
                &cfg,
                ExtractorArg::Greedy,
            )?;
            Ok(0)
        }
        Cmd::Extract {
            io,
            rules,
            limits,
            extractor,
            cost_model,
        } => {
            saturate_like(
                &io,
                &rules,
                &limits,
                extractor,
                cost_model.as_ref(),
                &cfg,
                ExtractorArg::Ilp,
            )?;
            Ok(0)
        }
        Cmd::ExportLp {
            io,
            rules,
            limits,
            cost_model,
        } => {
            let nl = read_netlist(&io.input, io.format)?;
            let rules = load_rules(&rules, &cfg)?;
            let limits = load_limits(&limits, &cfg)?;
            let cm = load_cost_model(cost_model.as_ref(), &cfg)?;
            let term = to_terms(&nl)?;
            let mut g = EGraph::new();
            let root = g.add(&term).map_err(AppError::internal)?;
            let report = run(&mut g, &rules, &limits);
            let root = g.find(root);
            let problem = lp::build_ilp(&mut g, &[root], &cm);
            emit(io.out.as_ref(), &lp::export_lp(&problem))?;
            write_report(io.report.as_ref(), &report)?;
            Ok(0)
        }
        Cmd::Retime {
            io,
            limits,
            extractor,
            bool_rules,
        } => {
            let nl = read_netlist(&io.input, io.format)?;
            let extractor = load_extractor(extractor, &cfg, ExtractorArg::Ilp)?;
            let rc = RetimeConfig {
                limits: load_limits(&limits, &cfg)?,
                extractor: to_extractor(extractor),
                bool_rules,
                ..RetimeConfig::default()
            };
            let (out, report) = retime_min_registers(&nl, &rc)?;
            write_netlist_out(&io, &out)?;
            write_report(io.report.as_ref(), &report)?;
            Ok(0)
        }
        Cmd::SourceRetime { io } => {
            let nl = read_netlist(&io.input, io.format)?;
            let (out, report) = source_retime(&nl)?;
            write_netlist_out(&io, &out)?;
            write_report(io.report.as_ref(), &report)?;
            Ok(0)
        }
        Cmd::Identify {
            io,
            library,
            limits,
            extractor,
            cost_model,
        } => {
            let nl = read_netlist(&io.input, io.format)?;
            let lib = load_library(&library, &cfg)?;
            let extractor = load_extractor(extractor, &cfg, ExtractorArg::Ilp)?;
            let ic = IdentifyConfig {
                limits: load_limits(&limits, &cfg)?,
                extractor: to_extractor(extractor),
                costs: load_cost_model(cost_model.as_ref(), &cfg)?,
                ..IdentifyConfig::default()
            };
            let (out, report) = identify(&nl, &lib, &ic)?;
            write_netlist_out(&io, &out)?;
            write_report(io.report.as_ref(), &report)?;
            Ok(0)
        }
        Cmd::Learn {
            inputs,
            max_arity,
            min_matches,
            top,
            emit_lib,
            abstract_into,
            report,
            format,
        } => {
            let corpus = inputs
                .iter()
                .map(|p| read_netlist(p, format))
                .collect::<Result<Vec<_>, _>>()?;
            let defaults = LearnConfig::default();
            let lc = LearnConfig {
                max_arity: max_arity
                    .or(cfg.get("max-arity")?)
                    .unwrap_or(defaults.max_arity),
                min_matches: min_matches
                    .or(cfg.get("min-matches")?)
                    .unwrap_or(defaults.min_matches),
                beam: cfg.get("beam")?.unwrap_or(defaults.beam),
            };
            let mut ranked = discover(&corpus, &lc)?;
            let top = top.or(cfg.get("top")?).unwrap_or(10);
            ranked.truncate(top);
            write_report(report.as_ref(), &ranked)?;
            if ranked.is_empty() {
                println!("no abstractions found");
                return Ok(0);
            }
            for a in &ranked {
                println!(
                    "{}: score {} matches {} arity {} body {}",
                    a.name, a.score, a.matches, a.arity, a.body
                );
            }
            if emit_lib.is_some() || abstract_into.is_some() {
                let (rewritten, component) = abstract_corpus(&corpus, &ranked[0])?;
                if let Some(path) = emit_lib {
                    let text = rewire::identify::write_components(&[component]);
                    fs::write(&path, text).map_err(|e| io_error(&path, e))?;
                }
                if let Some(dir) = abstract_into {
                    fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
                    for (input, nl) in inputs.iter().zip(&rewritten) {
                        let name = input
                            .file_name()
                            .ok_or_else(|| AppError::new("usage", "input has no file name"))?;
                        let path = dir.join(name);
                        let text = match detect_format(&path, format) {
                            FormatArg::Json => write_json(nl),
                            FormatArg::Sexpr => write_sexpr(nl),
                        };
                        fs::write(&path, text).map_err(|e| io_error(&path, e))?;
                    }
                }
            }
            Ok(0)
        }
        Cmd::Reroll { io, min_group } => {
            let nl = read_netlist(&io.input, io.format)?;
            let rc = RerollConfig {
                min_group: min_group
                    .or(cfg.get("min-group")?)
                    .unwrap_or(RerollConfig::default().min_group),
            };
            let (form, report) = reroll(&nl, &rc)?;
            emit(io.out.as_ref(), &write_loopform(&form))?;
            write_report(io.report.as_ref(), &report)?;
            Ok(0)
        }
        Cmd::Unroll { io } => {
            let text = fs::read_to_string(&io.input).map_err(|e| io_error(&io.input, e))?;
            let form = parse_loopform(&text)?;
            let nl = unroll(&form)?;
            write_netlist_out(&io, &nl)?;
            Ok(0)
        }
        Cmd::CheckEquiv {
            a,
            b,
            seed,
            max_exhaustive_bits,
            samples,
            cycles,
            library,
            report,
            format,
        } => {
            let na = read_netlist(&a, format)?;
            let nb = read_netlist(&b, format)?;
            let lib = load_library(&library, &cfg)?;
            let defaults = EquivConfig::default();
            let ec = EquivConfig {
                seed: seed.or(cfg.get("seed")?).unwrap_or(defaults.seed),
                max_exhaustive_bits: max_exhaustive_bits
                    .or(cfg.get("max-exhaustive-bits")?)
                    .unwrap_or(defaults.max_exhaustive_bits),
                samples: samples.or(cfg.get("samples")?).unwrap_or(defaults.samples),
                extra_cycles: cycles
                    .or(cfg.get("cycles")?)
                    .unwrap_or(defaults.extra_cycles),
            };
            let verdict = check_equiv(&na, &nb, &ec, &lib)?;
            write_report(report.as_ref(), &verdict)?;
            if verdict.equivalent {
                println!("equivalent ({:?})", verdict.coverage);
                Ok(0)
            } else {
                println!("inequivalent");
                if let Some(cex) = &verdict.counterexample {
                    println!(
                        "counterexample at cycle {} on {}[{}]",
                        cex.cycle, cex.output.0, cex.output.1
                    );
                }
                Ok(1)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run_cli(cli));
    match outcome {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(e)) => {
            eprintln!("error: {}: {}", e.kind, e.detail);
            ExitCode::from(e.code)
        }
        Err(panic) => {
            let detail = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            eprintln!("error: internal: {detail}");
            ExitCode::from(3)
        }
    }
}
