//! `matinterp` command-line tool.
//!
//! Exit codes: 0 satisfied/valid, 1 violated/invalid/disagreement, 2 usage
//! or input error. The last line on standard output is `RESULT: <verdict>`.

mod inputs;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matinterp::encoding::required_products;
use matinterp::interpretation::{
    check_problem, eval_term, eval_valuation, generate_arith_constraints, sample_falsify,
    ArithConstraint, Backend, CheckReport, Interpretation, Relation, SampleParams,
};
use matinterp::transform::{
    expand_rational, expand_valuation, interp_to_bits, interp_to_blocks, interp_to_blocks_with,
    scaled_backend, verify_transform, CheckInput, Promise, TransformCheck,
};
use matinterp::trs::{dependency_pairs, Rule, Trs};
use matinterp::Rat;

use inputs::CliError;

#[derive(Parser)]
#[command(
    name = "matinterp",
    version,
    about = "Matrix interpretations for termination proofs"
)]
struct Cli {
    /// Print marked symbols `f#` as `F`.
    #[arg(long, global = true)]
    legacy_names: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check rules weakly and dependency pairs strictly.
    Check(CheckArgs),
    /// Print the dependency pairs of a TRS.
    Dps {
        #[arg(long)]
        trs: PathBuf,
    },
    /// Generate arithmetic constraints from a parametric interpretation.
    GenConstraints {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        pinterp: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate arithmetic constraints under a valuation.
    EvalValuation {
        #[command(flatten)]
        source: ConstraintSource,
        #[arg(long)]
        valuation: PathBuf,
        /// Strict constraints need a difference of at least this.
        #[arg(long)]
        delta: Option<Rat>,
    },
    /// Lift a natural interpretation entrywise by `μ_N`.
    ToBlocks {
        #[command(flatten)]
        transform: TransformArgs,
        /// Lifting factor; defaults to the largest coefficient entry.
        #[arg(long)]
        factor: Option<u64>,
    },
    /// Lift repeatedly until every coefficient matrix is a bit matrix.
    ToBits {
        #[command(flatten)]
        transform: TransformArgs,
    },
    /// Turn a rational interpretation into a natural one through an encoding.
    Expand(ExpandArgs),
    /// Check the value and product conditions of an encoding.
    ValidateEncoding {
        /// Catalog name (half, quarters, eighths, sixths, unit(n)) or file.
        #[arg(long)]
        encoding: String,
    },
    /// Check an encoding against the products a valuation needs.
    Compat {
        #[arg(long)]
        encoding: String,
        #[command(flatten)]
        source: ConstraintSource,
        #[arg(long)]
        valuation: PathBuf,
    },
    /// Collapse constant-plus-scalar blocks to their values.
    Collapse {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    trs: PathBuf,
    /// `auto` for computed dependency pairs, `none`, or a TRS file of pairs.
    #[arg(long, default_value = "auto")]
    pairs: String,
}

#[derive(Args)]
struct BackendArgs {
    #[arg(long, value_enum, default_value_t = BackendKind::Value)]
    backend: BackendKind,
    /// Strict margin for the value backends.
    #[arg(long)]
    delta: Option<Rat>,
    /// Divisor of the value backend; defaults to the dimension.
    #[arg(long)]
    m: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Entrywise,
    Value,
    BlockValue,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    interp: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
    /// Random tuples per constraint to cross-check the verdicts; 0 disables.
    #[arg(long, default_value_t = 0)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest sampled entry.
    #[arg(long, default_value_t = 10)]
    bound: u64,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    interp: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConstraintSource {
    /// Constraint file, as written by `gen-constraints`.
    #[arg(long, conflicts_with_all = ["trs", "pinterp"], required_unless_present = "pinterp")]
    constraints: Option<PathBuf>,
    #[arg(long, requires = "pinterp")]
    trs: Option<PathBuf>,
    #[arg(long, default_value = "auto")]
    pairs: String,
    #[arg(long, requires = "trs")]
    pinterp: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Catalog name or encoding file.
    #[arg(long)]
    encoding: String,
    /// Rational interpretation to expand.
    #[arg(long, conflicts_with_all = ["valuation", "pinterp"], required_unless_present = "valuation")]
    interp: Option<PathBuf>,
    #[arg(long, requires = "pinterp")]
    valuation: Option<PathBuf>,
    #[arg(long, requires = "valuation")]
    pinterp: Option<PathBuf>,
    /// Strict margin of the rational interpretation.
    #[arg(long)]
    delta: Option<Rat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Text printed to standard output, then the verdict.
struct Report {
    text: String,
}

impl Report {
    fn new() -> Self {
        Report {
            text: String::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn push(&mut self, s: impl std::fmt::Display) {
        let s = s.to_string();
        self.text.push_str(&s);
        if !s.is_empty() && !s.ends_with('\n') {
            self.text.push('\n');
        }
    }

    fn finish(self, ok: bool, verdict: &str) -> Outcome {
        Outcome {
            text: self.text,
            ok,
            verdict: verdict.to_string(),
        }
    }
}

struct Outcome {
    text: String,
    ok: bool,
    verdict: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            if !usage {
                return ExitCode::SUCCESS;
            }
            println!("RESULT: ERROR");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            // A closed pipe is not an error of the run.
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}RESULT: {}", out.text, out.verdict);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("RESULT: ERROR");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let legacy = cli.legacy_names;
    match &cli.command {
        Command::Check(args) => check(args, legacy),
        Command::Dps { trs } => dps(trs, legacy),
        Command::GenConstraints {
            problem,
            pinterp,
            out,
        } => {
            let (trs, pairs) = inputs::problem(&problem.trs, &problem.pairs)?;
            let pinterp = inputs::pinterp(pinterp)?;
            let cs = generate_arith_constraints(&trs, &pairs, &pinterp).map_err(CliError::new)?;
            let text: String = cs.iter().map(|c| format!("{c}\n")).collect();
            let mut report = Report::new();
            emit(&mut report, out.as_deref(), &text)?;
            report.line(format!("{} constraints", cs.len()));
            Ok(report.finish(true, "OK"))
        }
        Command::EvalValuation {
            source,
            valuation,
            delta,
        } => {
            let cs = constraints(source)?;
            let eta = inputs::valuation(valuation)?;
            let mut report = Report::new();
            let mut all = true;
            for c in &cs {
                let holds = eval_valuation(c, &eta, delta.as_ref()).map_err(CliError::new)?;
                let l = eta.sum(&c.lhs).map_err(CliError::new)?;
                let r = eta.sum(&c.rhs).map_err(CliError::new)?;
                all &= holds;
                let truth = if holds { "true" } else { "FALSE" };
                report.line(format!("{c}    [{l} {} {r}: {truth}]", c.rel));
            }
            Ok(report.finish(all, if all { "SATISFIED" } else { "VIOLATED" }))
        }
        Command::ToBlocks { transform, factor } => to_blocks(transform, *factor),
        Command::ToBits { transform } => to_bits(transform),
        Command::Expand(args) => expand(args),
        Command::ValidateEncoding { encoding } => {
            let enc = inputs::encoding(encoding)?;
            let validation = enc.validate();
            let mut report = Report::new();
            report.push(&enc);
            report.push(&validation);
            let ok = validation.is_valid();
            Ok(report.finish(ok, if ok { "VALID" } else { "INVALID" }))
        }
        Command::Compat {
            encoding,
            source,
            valuation,
        } => {
            let enc = inputs::encoding(encoding)?;
            let cs = constraints(source)?;
            let eta = inputs::valuation(valuation)?;
            let req = required_products(&cs, &eta).map_err(CliError::new)?;
            let compat = enc.compatibility(&req);
            let mut report = Report::new();
            report.line(format!("required products: {req}"));
            if !compat.missing.is_empty() {
                let missing: Vec<String> = compat.missing.iter().map(Rat::to_string).collect();
                report.line(format!("missing: {}", missing.join(", ")));
            }
            report.push(&compat.report);
            let ok = compat.is_ok();
            Ok(report.finish(ok, if ok { "COMPATIBLE" } else { "INCOMPATIBLE" }))
        }
        Command::Collapse {
            problem,
            interp,
            out,
        } => collapse(problem, interp, out.as_deref()),
    }
}

fn constraints(source: &ConstraintSource) -> Result<Vec<ArithConstraint>, CliError> {
    match (&source.constraints, &source.trs, &source.pinterp) {
        (Some(path), _, _) => inputs::constraints(path),
        (None, Some(trs), Some(pinterp)) => {
            let (trs, pairs) = inputs::problem(trs, &source.pairs)?;
            let pinterp = inputs::pinterp(pinterp)?;
            generate_arith_constraints(&trs, &pairs, &pinterp).map_err(CliError::new)
        }
        _ => Err(CliError::new("give --constraints, or --trs with --pinterp")),
    }
}

/// Writes `text` to `out`, or appends it to the report.
fn emit(report: &mut Report, out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError(format!("{}: cannot write: {e}", path.display())))?;
            report.line(format!("wrote {}", path.display()));
        }
        None => report.push(text),
    }
    Ok(())
}

fn backend_for(args: &BackendArgs, interp: &Interpretation) -> Backend {
    match args.backend {
        BackendKind::Entrywise => Backend::Entrywise,
        BackendKind::Value => {
            let Backend::Value { mut m, mut delta } = Backend::value_for(interp) else {
                unreachable!()
            };
            if let Some(mm) = args.m {
                m = mm;
                if interp.delta.is_none() {
                    delta = Rat::new(1, mm.max(1) as i64);
                }
            }
            if let Some(d) = &args.delta {
                delta = d.clone();
            }
            Backend::Value { m, delta }
        }
        BackendKind::BlockValue => {
            let Backend::BlockValue { block, mut delta } = Backend::block_value_for(interp) else {
                unreachable!()
            };
            if let Some(d) = &args.delta {
                delta = d.clone();
            }
            Backend::BlockValue { block, delta }
        }
    }
}

/// Constraint labels in the order `check_problem` reports them.
fn labels(trs: &Trs, pairs: &[Rule], legacy: bool) -> Vec<String> {
    let arrowed = |r: &Rule, arrow: &str| {
        format!(
            "{} {arrow} {}",
            r.lhs.display(legacy),
            r.rhs.display(legacy)
        )
    };
    trs.rules
        .iter()
        .map(|r| arrowed(r, "->"))
        .chain(trs.relative.iter().map(|r| arrowed(r, "->=")))
        .chain(pairs.iter().map(|r| arrowed(r, "->")))
        .collect()
}

fn relabel(report: &mut CheckReport, trs: &Trs, pairs: &[Rule], legacy: bool) {
    if legacy {
        for (r, label) in report.results.iter_mut().zip(labels(trs, pairs, true)) {
            r.label = label;
        }
    }
}

fn check(args: &CheckArgs, legacy: bool) -> Result<Outcome, CliError> {
    let (trs, pairs) = inputs::problem(&args.problem.trs, &args.problem.pairs)?;
    let interp = inputs::interp(&args.interp)?;
    let backend = backend_for(&args.backend, &interp);
    let mut result = check_problem(&trs, &pairs, &interp, &backend).map_err(CliError::new)?;
    relabel(&mut result, &trs, &pairs, legacy);
    let mut report = Report::new();
    report.push(&result);

    let mut disagreement = false;
    if args.trials > 0 {
        let constraints = trs
            .all_rules()
            .map(|r| (r, Relation::Weak))
            .chain(pairs.iter().map(|r| (r, Relation::Strict)));
        let params = SampleParams {
            shape: interp.shape,
            domain: interp.domain,
            trials: args.trials,
            bound: args.bound,
            seed: args.seed,
        };
        report.line(format!(
            "sampling: {} trials, bound {}, seed {}",
            args.trials, args.bound, args.seed
        ));
        for ((rule, rel), res) in constraints.zip(&result.results) {
            let l = eval_term(&interp, &rule.lhs).map_err(CliError::new)?;
            let r = eval_term(&interp, &rule.rhs).map_err(CliError::new)?;
            match sample_falsify(&l, &r, rel, &backend, params) {
                Some(w) if res.verdict.holds() => {
                    disagreement = true;
                    report.line(format!("  {}: DISAGREEMENT, counterexample {w}", res.label));
                }
                Some(w) => report.line(format!("  {}: counterexample {w}", res.label)),
                None => report.line(format!("  {}: no counterexample", res.label)),
            }
        }
    }
    Ok(if disagreement {
        report.finish(false, "DISAGREEMENT")
    } else if result.holds() {
        report.finish(true, "HOLDS")
    } else {
        report.finish(false, "VIOLATED")
    })
}

fn dps(path: &Path, legacy: bool) -> Result<Outcome, CliError> {
    let trs = inputs::trs(path)?;
    let pairs = dependency_pairs(&trs);
    let mut report = Report::new();
    if legacy {
        report.line(format!("(VAR {})", trs.variables.join(" ")));
        report.line("(RULES");
        for p in &pairs {
            report.line(format!("  {}", p.display(true)));
        }
        report.line(")");
    } else {
        let as_trs = Trs::from_rules(pairs.clone()).map_err(CliError::new)?;
        report.push(&as_trs);
    }
    report.line(format!("{} pairs", pairs.len()));
    Ok(report.finish(true, "OK"))
}

/// Appends the two-sided check and finishes the report.
fn finish_transform(mut report: Report, check: TransformCheck) -> Outcome {
    report.push(&check);
    if !check.consistent() {
        return report.finish(false, "DISAGREEMENT");
    }
    let state = |r: &CheckReport| if r.holds() { "holds" } else { "violated" };
    report.line(format!(
        "verified: before {}, after {}",
        state(&check.before),
        state(&check.after)
    ));
    report.finish(true, "VERIFIED")
}

fn value_backend(args: &BackendArgs, interp: &Interpretation) -> Result<Backend, CliError> {
    if args.backend == BackendKind::Entrywise {
        return Err(CliError::new(
            "lifting preserves verdicts only for the value orderings; use --backend value or block-value",
        ));
    }
    Ok(backend_for(args, interp))
}

fn lifted_check(
    trs: &Trs,
    pairs: &[Rule],
    (interp, before): (&Interpretation, &Backend),
    (lifted, after): (&Interpretation, &Backend),
    promise: Promise,
) -> Result<TransformCheck, CliError> {
    verify_transform(
        CheckInput {
            trs,
            pairs,
            interp,
            backend: before,
        },
        CheckInput {
            trs,
            pairs,
            interp: lifted,
            backend: after,
        },
        promise,
    )
    .map_err(CliError::new)
}

fn to_blocks(args: &TransformArgs, factor: Option<u64>) -> Result<Outcome, CliError> {
    let (trs, pairs) = inputs::problem(&args.problem.trs, &args.problem.pairs)?;
    let interp = inputs::interp(&args.interp)?;
    let before = value_backend(&args.backend, &interp)?;
    let (lifted, n) = match factor {
        Some(n) => (interp_to_blocks_with(&interp, n).map_err(CliError::new)?, n),
        None => {
            let l = interp_to_blocks(&interp).map_err(CliError::new)?;
            (l.interp, l.factor)
        }
    };
    let after = scaled_backend(&before, n);
    let mut report = Report::new();
    report.line(format!(
        "factor {n}: dim {} -> {}",
        interp.dim(),
        lifted.dim()
    ));
    emit(&mut report, args.out.as_deref(), &lifted.to_string())?;
    let check = lifted_check(
        &trs,
        &pairs,
        (&interp, &before),
        (&lifted, &after),
        Promise::Equivalence,
    )?;
    Ok(finish_transform(report, check))
}

fn to_bits(args: &TransformArgs) -> Result<Outcome, CliError> {
    let (trs, pairs) = inputs::problem(&args.problem.trs, &args.problem.pairs)?;
    let interp = inputs::interp(&args.interp)?;
    let before = value_backend(&args.backend, &interp)?;
    let (bits, trace) = interp_to_bits(&interp).map_err(CliError::new)?;
    let after = scaled_backend(&before, trace.final_scale());
    let mut report = Report::new();
    report.push(&trace);
    emit(&mut report, args.out.as_deref(), &bits.to_string())?;
    let check = lifted_check(
        &trs,
        &pairs,
        (&interp, &before),
        (&bits, &after),
        Promise::Equivalence,
    )?;
    Ok(finish_transform(report, check))
}

fn expand(args: &ExpandArgs) -> Result<Outcome, CliError> {
    let (trs, pairs) = inputs::problem(&args.problem.trs, &args.problem.pairs)?;
    let enc = inputs::encoding(&args.encoding)?;
    let (rational, expansion) = match (&args.interp, &args.valuation, &args.pinterp) {
        (Some(path), _, _) => {
            let mut rational = inputs::interp(path)?;
            if args.delta.is_some() {
                rational.delta = args.delta.clone();
            }
            let expansion = expand_rational(&rational, &enc, None);
            (rational, expansion)
        }
        (None, Some(val), Some(pi)) => {
            let eta = inputs::valuation(val)?;
            let pinterp = inputs::pinterp(pi)?;
            let mut rational = pinterp.instantiate(&eta).map_err(CliError::new)?;
            rational.delta = args.delta.clone();
            let expansion =
                expand_valuation(&pinterp, &eta, &enc, &trs, &pairs, args.delta.clone());
            (rational, expansion)
        }
        _ => {
            return Err(CliError::new(
                "give --interp, or --valuation with --pinterp",
            ))
        }
    };
    let mut report = Report::new();
    let expansion = match expansion {
        Ok(e) => e,
        Err(e) => {
            report.line(format!("expansion refused: {e}"));
            return Ok(report.finish(false, "INVALID"));
        }
    };
    for w in &expansion.warnings {
        report.line(format!("warning: {w}"));
    }
    emit(
        &mut report,
        args.out.as_deref(),
        &expansion.interp.to_string(),
    )?;

    let before = Backend::value_for(&rational);
    let after = scaled_backend(&before, enc.dim() as u64);
    let check = lifted_check(
        &trs,
        &pairs,
        (&rational, &before),
        (&expansion.interp, &after),
        Promise::Implication,
    )?;
    Ok(finish_transform(report, check))
}

fn collapse(problem: &ProblemArgs, path: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let (trs, pairs) = inputs::problem(&problem.trs, &problem.pairs)?;
    let interp = inputs::interp(path)?;
    let mut report = Report::new();
    let Some(collapsed) = interp.collapse() else {
        report.line("some coefficient block is not of the form c*1 + s*I");
        return Ok(report.finish(false, "INVALID"));
    };
    emit(&mut report, out, &collapsed.to_string())?;
    let before = Backend::block_value_for(&interp);
    let Backend::BlockValue { delta, .. } = &before else {
        unreachable!()
    };
    let after = Backend::BlockValue {
        block: 1,
        delta: delta.clone(),
    };
    let check = lifted_check(
        &trs,
        &pairs,
        (&interp, &before),
        (&collapsed, &after),
        Promise::Equivalence,
    )?;
    Ok(finish_transform(report, check))
}
