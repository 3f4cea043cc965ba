use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use plb_core::bench::{
    check, emit_table, emit_tsv, run_benchmark, BenchName, BenchRun, BenchmarkSpec, Format,
    Measured, ReportError, ReportTable, Results, TableKind, Variant,
};
use plb_core::bridge::{ConversionPolicy, EngineHandle, HostValue};
use plb_core::reader::quote_atom;

#[derive(Parser)]
#[command(name = "plb", version, about = "Prolog engine and cross-language call benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time benchmark kernels and print tables.
    Bench(BenchArgs),
    /// Consult a program and print the answers of a goal.
    Run {
        file: PathBuf,
        #[arg(long)]
        goal: String,
        /// Return compound answers as opaque references.
        #[arg(long)]
        nc: bool,
        /// Stop after this many answers.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Run every kernel once and validate its result.
    Check {
        #[arg(long)]
        scale: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Micro,
    Larger,
    Nc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Host,
    Prolog,
    Cross,
    CrossNc,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Host => Variant::HostOnly,
            VariantArg::Prolog => Variant::PrologOnly,
            VariantArg::Cross => Variant::Cross,
            VariantArg::CrossNc => Variant::CrossNc,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Plain,
    Latex,
    Tsv,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "micro")]
    suite: Suite,
    /// Restrict to these variants (repeatable). Default: all the suite's tables need.
    #[arg(long, value_enum)]
    variant: Vec<VariantArg>,
    /// Restrict to these benchmarks (repeatable).
    #[arg(long)]
    bench: Vec<String>,
    /// Scale K for every selected benchmark, instead of each one's default.
    #[arg(long)]
    scale: Option<u64>,
    #[arg(long, default_value_t = 30)]
    iterations: usize,
    #[arg(long, default_value_t = 3)]
    warmups: usize,
    #[arg(long, value_enum, default_value = "plain")]
    format: FormatArg,
    /// Disable first-argument indexing.
    #[arg(long)]
    no_index: bool,
    /// Also measure with indexing off, as a second configuration.
    #[arg(long, conflicts_with = "no_index")]
    compare_index: bool,
    /// Label of the (first) configuration in tables.
    #[arg(long, default_value = "plb")]
    label: String,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<bool> {
    match Cli::parse().command {
        Command::Bench(args) => bench(&args),
        Command::Run {
            file,
            goal,
            nc,
            limit,
        } => run_goal(&file, &goal, nc, limit),
        Command::Check { scale } => check_all(scale),
    }
}

fn suite_plan(suite: Suite) -> (Vec<BenchName>, Vec<Variant>, Vec<TableKind>) {
    use Variant::*;
    match suite {
        Suite::Micro => (
            BenchName::MICRO.to_vec(),
            vec![HostOnly, PrologOnly, Cross],
            vec![TableKind::AbsoluteMicro, TableKind::RelativeMicro],
        ),
        Suite::Larger => (
            BenchName::LARGER.to_vec(),
            vec![PrologOnly, Cross],
            vec![TableKind::AbsoluteLarger, TableKind::RelativeLarger],
        ),
        Suite::Nc => (
            BenchName::ALL.to_vec(),
            vec![Cross, CrossNc],
            vec![TableKind::NoConversion],
        ),
    }
}

fn bench(args: &BenchArgs) -> Result<bool> {
    let (mut names, mut variants, kinds) = suite_plan(args.suite);
    if !args.bench.is_empty() {
        names = args
            .bench
            .iter()
            .map(|b| b.parse::<BenchName>())
            .collect::<Result<_, _>>()?;
    }
    if !args.variant.is_empty() {
        variants = args.variant.iter().map(|&v| v.into()).collect();
    }
    let mut configs = vec![(args.label.clone(), !args.no_index)];
    if args.compare_index {
        configs.push((format!("{}-noindex", args.label), false));
    }

    let mut runs: Vec<BenchRun> = Vec::new();
    let mut results = Results::new();
    let mut all_ok = true;
    for (label, indexing) in &configs {
        for &name in &names {
            for &variant in &variants {
                if !name.has_variant(variant) {
                    continue;
                }
                let mut spec = BenchmarkSpec::new(name, variant)
                    .iterations(args.iterations)
                    .warmups(args.warmups)
                    .indexing(*indexing);
                if let Some(k) = args.scale {
                    spec = spec.scale(k);
                }
                eprintln!("{label}: {name} {variant} K={}", spec.scale);
                match run_benchmark(&spec) {
                    Ok(run) => {
                        results.insert(label, name.as_str(), variant, Measured::Time(run.summary()?));
                        runs.push(run);
                    }
                    Err(e) => {
                        eprintln!("FAILED {name} {variant}: {e}");
                        all_ok = false;
                    }
                }
            }
        }
    }
    if runs.is_empty() {
        bail!("no benchmark ran");
    }

    let format = match args.format {
        FormatArg::Tsv => {
            print!("{}", emit_tsv(&runs)?);
            return Ok(all_ok);
        }
        FormatArg::Plain => Format::Plain,
        FormatArg::Latex => Format::Latex,
    };
    let note = format!(
        "{} timed runs after {} warmups; 99% Student-t intervals; TCons and Lists convert in both directions",
        args.iterations, args.warmups
    );
    match format {
        Format::Plain => println!("# {note}\n"),
        Format::Latex => println!("% {note}"),
    }
    for kind in kinds {
        let table = ReportTable::from_results(kind, &results, Some(&configs[0].0))?;
        match emit_table(&table, format) {
            Ok(text) => println!("{text}"),
            Err(ReportError::MissingCell { .. }) => {
                eprintln!("'{}' needs variants that were not measured; showing raw results", kind.title());
                print!("{}", emit_tsv(&runs)?);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(all_ok)
}

fn run_goal(file: &PathBuf, goal: &str, nc: bool, limit: Option<usize>) -> Result<bool> {
    let src = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let policy = if nc {
        ConversionPolicy::NoConversion
    } else {
        ConversionPolicy::Deep
    };
    let engine = EngineHandle::new(&src, policy)?;
    let cursor = engine.query(goal, None)?;
    let mut any = false;
    for (i, ans) in cursor.enumerate() {
        if limit.is_some_and(|l| i >= l) {
            break;
        }
        let ans = ans?;
        any = true;
        if ans.is_empty() {
            println!("true.");
        } else {
            let parts: Vec<String> = ans.iter().map(|(k, v)| format!("{k} = {}", show(v))).collect();
            println!("{}.", parts.join(", "));
        }
    }
    if !any {
        println!("false.");
    }
    Ok(true)
}

/// Prolog-style text of a host value.
fn show(v: &HostValue) -> String {
    match v {
        HostValue::Int(i) => i.to_string(),
        HostValue::Float(f) => format!("{f:?}"),
        HostValue::Symbol(s) => quote_atom(s).to_string(),
        HostValue::Seq(items) => {
            let parts: Vec<String> = items.iter().map(show).collect();
            format!("[{}]", parts.join(", "))
        }
        HostValue::Record { name, fields } => {
            let parts: Vec<String> = fields.iter().map(show).collect();
            format!("{}({})", quote_atom(name), parts.join(", "))
        }
        HostValue::Object(_) => "<object>".to_owned(),
        HostValue::Term(t) => format!("<opaque {}>", t.term()),
    }
}

fn check_all(scale: Option<u64>) -> Result<bool> {
    let mut ok = true;
    for name in BenchName::ALL {
        for variant in Variant::ALL {
            if !name.has_variant(variant) {
                continue;
            }
            let mut spec = BenchmarkSpec::new(name, variant);
            if let Some(k) = scale {
                spec = spec.scale(k);
            }
            match check(&spec) {
                Ok(_) => println!("ok      {name} {variant} K={}", spec.scale),
                Err(e) => {
                    println!("FAILED  {name} {variant} K={}: {e}", spec.scale);
                    ok = false;
                }
            }
        }
    }
    Ok(ok)
}
