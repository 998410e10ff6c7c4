use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gup_core::criteria::{
    check_ansatz, check_commutativity, check_summary_models, check_symmetricity, check_transform, solve_report,
    summary_checks, CheckReport, CriteriaError, Mode, Status, Target, TransformAnsatz,
};
use gup_core::model::report::ReportDocument;
use gup_core::model::{builtin, parse_ansatz, parse_model, ModelSpec, LIBRARY_NAMES};
use gup_core::operator::{build_position, LogDerivative, OperatorExpr, Placement};
use gup_core::oracle::{cross_check, NumericInstance};

#[derive(Parser, Debug)]
#[command(name = "gupcheck", version, about = "Checks deformed position operators of GUP models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariance of [x_i, x_j] under the transformation.
    CheckXx,
    /// Whether reordering q inside F is compensated by the transformation.
    CheckReorder,
    /// Symmetricity of the constructed position operator.
    CheckSymmetric {
        /// Use F_i = 0 instead of the constructed F_i.
        #[arg(long)]
        trivial: bool,
    },
    /// Whether the position operators commute.
    CheckCommutative,
    /// Solve for the unknown constants of an ansatz.
    Solve {
        #[arg(long, value_enum, default_value = "reorder")]
        target: TargetArg,
    },
    /// Closed-form identities of the model families.
    Summary,
    /// Randomised exact cross-check of the symbolic commutators.
    Oracle,
    /// List the built-in models.
    ListModels,
}

#[derive(Args, Debug)]
struct Opts {
    /// Model file in the DSL.
    #[arg(long, global = true, conflicts_with = "builtin")]
    model: Option<String>,
    /// Built-in model name.
    #[arg(long, global = true)]
    builtin: Option<String>,
    /// Truncation order, or `mixed` for the largest declared grading.
    #[arg(long, global = true, conflicts_with = "exact")]
    order: Option<String>,
    /// Exact comparison (the default).
    #[arg(long, global = true)]
    exact: bool,
    /// Ansatz name declared in the model, or an inline `logderiv[j] = ...`,
    /// `power(n: s)` or `poly(k: expr, ...)`.
    #[arg(long, global = true)]
    ansatz: Option<String>,
    /// Where q goes: left, right, uniform:R or per:R1,R2,...
    #[arg(long, global = true, default_value = "left")]
    placement: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 5)]
    trials: usize,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Override the spatial dimension.
    #[arg(long, global = true)]
    dim: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Machine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TargetArg {
    Xx,
    Reorder,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<CriteriaError> for Failure {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::Unsupported(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn load_model(opts: &Opts) -> Result<ModelSpec, Failure> {
    let model = match (&opts.model, &opts.builtin) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            parse_model(&text).map_err(|e| Failure::Usage(format!("{path}: {e}")))?
        }
        (None, Some(name)) => builtin(name).ok_or_else(|| {
            Failure::Usage(format!("unknown built-in model `{name}` (see list-models)"))
        })?,
        (None, None) => return Err(Failure::Usage("a model is required: --model FILE or --builtin NAME".into())),
    };
    Ok(match opts.dim {
        Some(d) => model.with_dim(Some(d)),
        None => model,
    })
}

fn mode(opts: &Opts) -> Result<Mode, Failure> {
    match opts.order.as_deref() {
        None => Ok(Mode::Exact),
        Some("mixed") => Ok(Mode::Mixed),
        Some(k) => k
            .parse::<u32>()
            .map(Mode::Order)
            .map_err(|_| Failure::Usage(format!("--order expects a number or `mixed`, got `{k}`"))),
    }
}

fn placement(text: &str) -> Result<Placement, Failure> {
    let bad = || Failure::Usage(format!("bad placement `{text}`: use left, right, uniform:R or per:R1,R2,..."));
    match text {
        "left" => Ok(Placement::Left),
        "right" => Ok(Placement::Right),
        _ => {
            let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
            match kind {
                "uniform" => rest.parse().map(Placement::Uniform).map_err(|_| bad()),
                "per" => rest
                    .split(',')
                    .map(|r| r.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map(Placement::PerMonomial)
                    .map_err(|_| bad()),
                _ => Err(bad()),
            }
        }
    }
}

fn ansatz(model: &ModelSpec, opts: &Opts) -> Result<Option<TransformAnsatz>, Failure> {
    match &opts.ansatz {
        None => Ok(model.default_ansatz().cloned()),
        Some(spec) => match model.ansatz(spec) {
            Some(a) => Ok(Some(a.clone())),
            None => parse_ansatz(spec, &model.symbols)
                .map(Some)
                .map_err(|e| Failure::Usage(format!("--ansatz: {e}"))),
        },
    }
}

/// An ansatz check, or the identity transformation when there is none.
fn transform_check(model: &ModelSpec, target: &Target, opts: &Opts) -> Result<Vec<CheckReport>, Failure> {
    let mode = mode(opts)?;
    Ok(vec![match ansatz(model, opts)? {
        Some(a) => check_ansatz(model, target, &a, &mode)?,
        None => check_transform(model, target, &LogDerivative::none("j"), &mode)?.note("identity transformation"),
    }])
}

fn oracle_reports(model: &ModelSpec, opts: &Opts) -> Result<Vec<CheckReport>, Failure> {
    let inst = NumericInstance::instantiate(model, opts.seed);
    let mut pairs: Vec<(String, OperatorExpr, OperatorExpr)> = vec![
        (
            "[x_i,x_j]".into(),
            build_position(model, "i", None).map_err(CriteriaError::from)?,
            build_position(model, "j", None).map_err(CriteriaError::from)?,
        ),
        (
            "[x_i,p_j]".into(),
            build_position(model, "i", None).map_err(CriteriaError::from)?,
            OperatorExpr::p("j"),
        ),
    ];
    if let Some(a) = ansatz(model, opts)? {
        if a.unknowns().is_empty() {
            let l = a.log_derivative("#l").map_err(CriteriaError::from)?;
            pairs.push((
                format!("[x'_i,x'_j] ({})", a.name),
                build_position(model, "i", Some(&l)).map_err(CriteriaError::from)?,
                build_position(model, "j", Some(&l)).map_err(CriteriaError::from)?,
            ));
        }
    }
    let mut out = Vec::new();
    for (name, a, b) in pairs {
        let cc = cross_check(&a, &b, &inst, opts.trials).map_err(|e| Failure::Check(format!("oracle: {e}")))?;
        let mut rep = CheckReport::new(model, &format!("oracle {name}"), &Mode::Exact);
        rep.mode = format!("seed {}, {} trials", opts.seed, opts.trials);
        rep.status = if cc.passed { Status::Holds } else { Status::Fails };
        if let Some(m) = cc.mismatch {
            rep.residual = m;
        }
        rep.notes.push(format!("{} comparisons", cc.comparisons));
        out.push(rep);
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<ReportDocument, Failure> {
    let opts = &cli.opts;
    let (name, reports) = match &cli.command {
        Command::ListModels => unreachable!("handled before"),
        Command::CheckXx => ("check-xx", transform_check(&load_model(opts)?, &Target::Xx, opts)?),
        Command::CheckReorder => {
            let target = Target::Reorder(placement(&opts.placement)?);
            ("check-reorder", transform_check(&load_model(opts)?, &target, opts)?)
        }
        Command::CheckSymmetric { trivial } => {
            let model = load_model(opts)?;
            ("check-symmetric", vec![check_symmetricity(&model, opts.ansatz.as_deref(), *trivial)?])
        }
        Command::CheckCommutative => {
            let model = load_model(opts)?;
            ("check-commutative", vec![check_commutativity(&model, &mode(opts)?)?])
        }
        Command::Solve { target } => {
            let model = load_model(opts)?;
            let a = ansatz(&model, opts)?.ok_or_else(|| Failure::Usage("solve needs --ansatz".into()))?;
            if a.unknowns().is_empty() {
                return Err(Failure::Usage(format!("ansatz `{}` has no unknowns to solve for", a.name)));
            }
            let t = match target {
                TargetArg::Xx => Target::Xx,
                TargetArg::Reorder => Target::Reorder(placement(&opts.placement)?),
            };
            ("solve", vec![solve_report(&model, &t, &a, &mode(opts)?)?])
        }
        Command::Summary => {
            let reports = if opts.model.is_some() || opts.builtin.is_some() {
                summary_checks(&load_model(opts)?)?
            } else {
                check_summary_models()?
            };
            ("summary", reports)
        }
        Command::Oracle => ("oracle", oracle_reports(&load_model(opts)?, opts)?),
    };
    Ok(ReportDocument::new(name, reports))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Command::ListModels = cli.command {
        match cli.opts.format {
            Format::Text => LIBRARY_NAMES.iter().for_each(|n| println!("{n}")),
            Format::Machine => println!("{}", serde_json::to_string_pretty(LIBRARY_NAMES).expect("names serialise")),
        }
        return ExitCode::SUCCESS;
    }
    match run(&cli) {
        Ok(doc) => {
            match cli.opts.format {
                Format::Text => print!("{}", doc.to_text()),
                Format::Machine => println!("{}", doc.to_machine()),
            }
            if doc.all_succeeded() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
