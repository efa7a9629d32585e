use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use foalg::algebra::{FiniteAlgebra, DEFAULT_ELEMENT_CAP};
use foalg::axioms::{self, AxiomId, Bounds, CheckMode, CheckReport, GalleryCase};
use foalg::formula::{compile, eval, eval_fo_naive, parse_fo, Structure};
use foalg::lattice::prime_filters;
use foalg::representation::{embed, one_to_one_almost_morphism, saturate, EmbeddingCertificate, Status};
use foalg::{Exec, Fragment, Universe};

#[derive(Parser)]
#[command(name = "foalg", version, about = "Finite multisorted algebras of relations")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Run everything on the calling thread
    #[arg(long, global = true)]
    sequential: bool,

    /// Largest number of elements any one sort may have
    #[arg(long, global = true, default_value_t = DEFAULT_ELEMENT_CAP)]
    element_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula in a structure
    Eval {
        /// Structure file (JSON)
        #[arg(long)]
        structure: String,
        /// Formula text, e.g. "[x] exists y (R1(x,y) & R2(x,y))"
        #[arg(long, conflicts_with = "formula_file")]
        formula: Option<String>,
        /// File holding the formula text
        #[arg(long)]
        formula_file: Option<String>,
        #[arg(long, value_enum, default_value_t = EvalMode::Both)]
        mode: EvalMode,
    },
    /// Check axiom schemas
    Axioms {
        #[command(subcommand)]
        action: AxiomsAction,
    },
    /// List the prime filters of one sort
    Primefilters {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        sort: usize,
    },
    /// Build an injective representation, saturating witnesses when the fragment has projection
    Embed {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        fragment: Fragment,
        #[arg(long, default_value_t = 2)]
        scope: usize,
        /// Witness rounds for fragments with projection
        #[arg(long, default_value_t = 5)]
        rounds: usize,
        /// Re-present the algebra as shuffled tables before embedding
        #[arg(long)]
        anonymize: Option<u64>,
    },
    /// Reproduce a counterexample
    Gallery {
        #[arg(value_enum)]
        case: GalleryName,
    },
    /// Write an algebra as operation tables (JSON)
    Export {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        fragment: Option<Fragment>,
        #[arg(long, default_value_t = 2)]
        max_sort: usize,
        /// Shuffle element indices with this seed
        #[arg(long)]
        shuffle: Option<u64>,
    },
}

#[derive(Subcommand)]
enum AxiomsAction {
    Check {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long)]
        fragment: Fragment,
        #[arg(long, default_value_t = 2)]
        max_sort: usize,
        /// Check only these axioms, e.g. 0 or 11c
        #[arg(long = "axiom")]
        axioms: Vec<AxiomId>,
        #[arg(long, default_value_t = axioms::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = axioms::DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = axioms::DEFAULT_EXHAUSTIVE_CAP)]
        exhaustive_cap: u64,
    },
}

#[derive(Args)]
struct AlgebraArgs {
    /// Table file, or builtin:concrete:<size>, builtin:diamond, builtin:pe-theory
    #[arg(long)]
    algebra: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMode {
    Compiled,
    Naive,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GalleryName {
    Diamond,
    PeTheory,
}

struct Ctx {
    format: Format,
    exec: Exec,
    cap: usize,
}

impl Ctx {
    fn json(&self) -> bool {
        self.format == Format::Json
    }

    fn emit(&self, text: impl AsRef<str>, value: serde_json::Value) {
        if self.json() {
            println!("{value}");
        } else {
            println!("{}", text.as_ref());
        }
    }
}

/// Loads an algebra. Concrete builtins are built with `fragment` and
/// `max_sort`; other algebras are restricted to `fragment` when given.
fn load(source: &str, fragment: Option<Fragment>, max_sort: usize, cap: usize) -> Result<FiniteAlgebra> {
    let alg = if let Some(size) = source.strip_prefix("builtin:concrete:") {
        let size: usize = size.parse().with_context(|| format!("bad universe size in {source:?}"))?;
        let fragment = fragment.unwrap_or(Fragment::FO_EQ);
        return Ok(FiniteAlgebra::concrete_with_cap(Universe::new(size), fragment, max_sort, cap)?);
    } else if source == "builtin:diamond" {
        axioms::diamond()?
    } else if source == "builtin:pe-theory" {
        axioms::pe_theory()?.0
    } else if source.starts_with("builtin:") {
        bail!("unknown builtin {source:?}");
    } else {
        let text = fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
        FiniteAlgebra::from_tables_json(&text)?
    };
    match fragment {
        Some(f) if f != alg.fragment() => Ok(alg.reduct(f)?),
        _ => Ok(alg),
    }
}

fn mode_text(mode: CheckMode) -> String {
    match mode {
        CheckMode::Exhaustive => "exhaustive".into(),
        CheckMode::Sampled { seed, samples } => format!("sampled (seed {seed}, {samples} instances)"),
    }
}

fn print_report(ctx: &Ctx, r: &CheckReport) -> Result<()> {
    if ctx.json() {
        println!("{}", serde_json::to_string(r)?);
        return Ok(());
    }
    let class = match r.class {
        axioms::AxiomClass::Horn => "horn",
        axioms::AxiomClass::Universal => "universal",
    };
    println!(
        "axiom ({}) [{class}] {}: {} shapes, {} instances checked, {} violations",
        r.axiom,
        mode_text(r.mode),
        r.shapes,
        r.checked,
        r.violation_count
    );
    for v in &r.violations {
        println!("  {v}");
    }
    Ok(())
}

fn cmd_eval(ctx: &Ctx, structure: &str, formula: Option<String>, file: Option<String>, mode: EvalMode) -> Result<ExitCode> {
    let s = Structure::from_json(&fs::read_to_string(structure).with_context(|| format!("reading {structure}"))?)?;
    let text = match (formula, file) {
        (Some(t), _) => t,
        (None, Some(path)) => fs::read_to_string(&path).with_context(|| format!("reading {path}"))?,
        (None, None) => bail!("give --formula or --formula-file"),
    };
    let f = parse_fo(&text, &s.signature())?;
    let compiled = match mode {
        EvalMode::Naive => None,
        _ => Some(eval(&compile(&f, &s.signature(), Fragment::FO_EQ)?, &s)?),
    };
    let naive = match mode {
        EvalMode::Compiled => None,
        _ => Some(eval_fo_naive(&f, &s)?),
    };
    let shown = compiled.as_ref().or(naive.as_ref()).expect("one evaluator ran").to_string();
    if let (Some(c), Some(n)) = (&compiled, &naive) {
        if c != n {
            ctx.emit(
                format!("disagreement\ncompiled: {c}\nnaive:    {n}"),
                json!({"agree": false, "compiled": c.to_string(), "naive": n.to_string()}),
            );
            return Ok(ExitCode::from(1));
        }
    }
    ctx.emit(&shown, json!({"relation": shown, "agree": compiled.is_some() && naive.is_some()}));
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_axioms(
    ctx: &Ctx,
    source: &str,
    fragment: Fragment,
    max_sort: usize,
    only: &[AxiomId],
    seed: u64,
    samples: u64,
    exhaustive_cap: u64,
) -> Result<ExitCode> {
    let alg = load(source, Some(fragment), max_sort, ctx.cap)?;
    let mut bounds = Bounds::new(max_sort).with_seed(seed).with_exec(ctx.exec);
    bounds.samples = samples;
    bounds.exhaustive_cap = exhaustive_cap;
    ctx.emit(
        format!("algebra {source} fragment {fragment} max sort {max_sort} seed {seed}"),
        json!({"algebra": source, "fragment": fragment.to_string(), "max_sort": max_sort, "seed": seed}),
    );
    let reports = if only.is_empty() {
        axioms::check_fragment(&alg, fragment, &bounds)?.reports
    } else {
        only.iter()
            .map(|&a| axioms::check_axiom(&alg, a, &bounds))
            .collect::<Result<Vec<_>, _>>()?
    };
    for r in &reports {
        print_report(ctx, r)?;
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.axiom.to_string()).collect();
    let verdict = if failed.is_empty() {
        "fragment-consistent within bounds".to_string()
    } else {
        format!("failed: {}", failed.join(", "))
    };
    ctx.emit(
        format!("verdict: {verdict}"),
        json!({"verdict": if failed.is_empty() { "pass" } else { "fail" }, "failed": failed, "seed": seed}),
    );
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_primefilters(ctx: &Ctx, source: &str, sort: usize) -> Result<ExitCode> {
    let alg = load(source, None, sort, ctx.cap)?;
    let filters = prime_filters(&alg, sort)?;
    for f in &filters {
        let members: Vec<usize> = f.members().ones().collect();
        let shown = alg.describe(sort, f.generator());
        ctx.emit(
            format!("↑{} {shown}: members {members:?}", f.generator()),
            json!({"sort": sort, "generator": f.generator(), "shown": shown, "members": members}),
        );
    }
    ctx.emit(
        format!("{} prime filters on sort {sort}", filters.len()),
        json!({"sort": sort, "count": filters.len()}),
    );
    Ok(ExitCode::SUCCESS)
}

fn print_certificate(ctx: &Ctx, alg: &FiniteAlgebra, cert: &EmbeddingCertificate) -> Result<()> {
    let status = match &cert.status {
        Status::Full => "full".to_string(),
        Status::Almost { remaining } => format!("almost ({} obligations remaining)", remaining.len()),
    };
    if ctx.json() {
        println!(
            "{}",
            json!({
                "fragment": cert.fragment.to_string(),
                "scope": cert.scope,
                "universe": cert.universe_size(),
                "master_sort": cert.model.filter().sort(),
                "rounds": cert.rounds,
                "status": cert.status,
                "transcript": cert.transcript,
            })
        );
        for entry in cert.listing(alg) {
            println!("{}", serde_json::to_string(&entry)?);
        }
        return Ok(());
    }
    println!("target universe size {}", cert.universe_size());
    println!("master filter on sort {}", cert.model.filter().sort());
    for entry in cert.listing(alg) {
        println!("sort {} element {} {} ↦ {}", entry.sort, entry.element, entry.shown, entry.image);
    }
    for line in &cert.transcript {
        println!("check: {line}");
    }
    println!("rounds {}", cert.rounds);
    println!("status {status}");
    Ok(())
}

fn cmd_embed(ctx: &Ctx, source: &str, fragment: Fragment, scope: usize, rounds: usize, anonymize: Option<u64>) -> Result<ExitCode> {
    let mut alg = load(source, Some(fragment), scope, ctx.cap)?;
    if let Some(seed) = anonymize {
        alg = alg.tabulate(Some(seed), true)?;
    }
    let result = if fragment.has_exists() {
        one_to_one_almost_morphism(&alg, fragment, scope).and_then(|start| {
            if start.is_full() {
                return Ok(start);
            }
            let mut done = saturate(&alg, &start.model, rounds)?;
            let mut transcript = start.transcript;
            transcript.append(&mut done.transcript);
            done.transcript = transcript;
            done.separating = start.separating;
            Ok(done)
        })
    } else {
        embed(&alg, fragment, scope)
    };
    match result {
        Ok(cert) => {
            print_certificate(ctx, &alg, &cert)?;
            Ok(if cert.is_full() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Err(e) if e.is_obstruction() => {
            ctx.emit(format!("{e}"), json!({"status": "obstruction", "error": e.to_string()}));
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_gallery(ctx: &Ctx, name: GalleryName) -> Result<ExitCode> {
    let case: GalleryCase = match name {
        GalleryName::Diamond => axioms::gallery_diamond()?,
        GalleryName::PeTheory => axioms::gallery_pe_theory()?,
    };
    let sizes: Vec<usize> = (0..=case.algebra.max_sort())
        .map(|s| case.algebra.size(s))
        .collect::<Result<_, _>>()?;
    let passed: Vec<String> = case.others.reports.iter().filter(|r| r.passed()).map(|r| r.axiom.to_string()).collect();
    let failed: Vec<String> = case.others.failed.iter().map(|a| a.to_string()).collect();
    if ctx.json() {
        println!(
            "{}",
            json!({
                "case": case.name,
                "fragment": case.algebra.fragment().to_string(),
                "sizes": sizes,
                "violation": case.rendered,
                "instance": case.violation.instance,
                "axiom0_violations": case.axiom0.violation_count,
                "passed": passed,
                "failed": failed,
            })
        );
    } else {
        println!("{} ({}), sort sizes {:?}", case.name, case.algebra.fragment(), sizes);
        println!("axiom (0) violated: {}", case.rendered);
        println!("instance: {}", case.violation.instance);
        println!(
            "axiom (0) check: {} of {} instances violate",
            case.axiom0.violation_count, case.axiom0.checked
        );
        println!("other axioms passing: {}", passed.join(", "));
        if !failed.is_empty() {
            println!("other axioms failing: {}", failed.join(", "));
        }
    }
    Ok(if failed.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_export(ctx: &Ctx, source: &str, fragment: Option<Fragment>, max_sort: usize, shuffle: Option<u64>) -> Result<ExitCode> {
    let alg = load(source, fragment, max_sort, ctx.cap)?;
    let tables = alg.tabulate(shuffle, false)?;
    println!("{}", tables.to_tables_json()?);
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let ctx = Ctx {
        format: cli.format,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
        cap: cli.element_cap,
    };
    match cli.command {
        Command::Eval {
            structure,
            formula,
            formula_file,
            mode,
        } => cmd_eval(&ctx, &structure, formula, formula_file, mode),
        Command::Axioms {
            action:
                AxiomsAction::Check {
                    algebra,
                    fragment,
                    max_sort,
                    axioms,
                    seed,
                    samples,
                    exhaustive_cap,
                },
        } => cmd_axioms(&ctx, &algebra.algebra, fragment, max_sort, &axioms, seed, samples, exhaustive_cap),
        Command::Primefilters { algebra, sort } => cmd_primefilters(&ctx, &algebra.algebra, sort),
        Command::Embed {
            algebra,
            fragment,
            scope,
            rounds,
            anonymize,
        } => cmd_embed(&ctx, &algebra.algebra, fragment, scope, rounds, anonymize),
        Command::Gallery { case } => cmd_gallery(&ctx, case),
        Command::Export {
            algebra,
            fragment,
            max_sort,
            shuffle,
        } => cmd_export(&ctx, &algebra.algebra, fragment, max_sort, shuffle),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

