//! Command-line front end.
//!
//! Exit codes: 0 success or true, 1 false, unsatisfiable or no, 2 usage or
//! input error, 3 budget exhausted.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctlfrag_core::ctl::{eliminate_sugar, parse_formula, to_nnf, CtlFormula, CtlOperator};
use ctlfrag_core::decomposition::{
    parameter_with_limit, pathwidth_exact, pathwidth_upper, validate_decomposition,
    DEFAULT_ELEMENT_LIMIT,
};
use ctlfrag_core::gen::{random_x_formula, GenConfig};
use ctlfrag_core::kripke::{
    bounded_tree_model, brute_force_sat_with, model_check, BruteForceConfig, BruteForceOutcome,
    KripkeStructure,
};
use ctlfrag_core::mso::{evaluate, fpt_pipeline, MsoAssignment};
use ctlfrag_core::reductions::{
    clause_free_instance, disjunction_instance, parameter_growth_scan, reduce, verify_reduction,
    BoundedSearch, ReductionVariant,
};
use ctlfrag_core::structure::{encode, gaifman_graph};

use crate::formats::{
    parse_kripke, parse_mso, parse_pwsat, parse_structure, write_decomposition, write_kripke,
    write_structure,
};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// World bound used by `sat --method brute` when none is given.
pub const BRUTE_DEFAULT_CAP: usize = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ctlfrag",
    version,
    about = "Satisfiability tools for CTL operator fragments"
)]
struct Cli {
    /// `human` prose or `machine` key=value records.
    #[arg(long, value_enum, default_value_t = OutputFormat::Human, global = true)]
    format: OutputFormat,
    /// Seed for randomized commands.
    #[arg(long, env = "CTLFRAG_SEED", default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Pipeline,
    Tree,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Disjunction,
    ClauseFree,
}

#[derive(Debug, Args)]
struct FormulaInput {
    /// Formula text; alternatively `--file`.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    formula: Option<String>,
    /// Read the formula from a file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and print a formula with its size and operators.
    Parse(FormulaInput),
    /// Negation normal form.
    Nnf(FormulaInput),
    /// Temporal depth.
    Td(FormulaInput),
    /// Relational encoding in the structure format, after rewriting `->`
    /// and `<->`.
    Encode(FormulaInput),
    /// Path decomposition of a structure file.
    Decompose {
        structure: PathBuf,
        /// Exact pathwidth instead of the heuristic.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_ELEMENT_LIMIT, value_parser = positive)]
        element_limit: usize,
    },
    /// Pathwidth of the encoding plus temporal depth.
    Param {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = DEFAULT_ELEMENT_LIMIT, value_parser = positive)]
        element_limit: usize,
    },
    /// Decide satisfiability.
    Sat {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, value_enum, default_value_t = Method::Pipeline)]
        method: Method,
        /// World bound for `brute`; defaults to the tree-model size, capped.
        #[arg(long, value_parser = world_bound)]
        max_worlds: Option<usize>,
        /// Structure budget for `brute`.
        #[arg(long, default_value_t = BruteForceConfig::DEFAULT_BUDGET)]
        budget: u64,
        /// Print the model found by `tree` or `brute`.
        #[arg(long)]
        show_model: bool,
    },
    /// Evaluate an MSO formula file on a structure file.
    MsoEval {
        structure: PathBuf,
        formula: PathBuf,
        /// Element variable binding `x=i`.
        #[arg(long = "element")]
        elements: Vec<String>,
        /// Set variable binding `X=i,j,k`.
        #[arg(long = "set")]
        sets: Vec<String>,
    },
    /// Reduced formula of a p-PW-SAT instance file.
    Reduce {
        instance: PathBuf,
        #[arg(long, value_parser = variant)]
        variant: ReductionVariant,
    },
    /// Check a reduction on an instance file.
    VerifyReduction {
        instance: PathBuf,
        #[arg(long, value_parser = variant)]
        variant: ReductionVariant,
        #[arg(long, default_value_t = 5, value_parser = world_bound)]
        max_worlds: usize,
        /// Search nodes for the bounded model search on no-instances.
        #[arg(long, default_value_t = 20_000)]
        budget: u64,
    },
    /// Temporal depth and pathwidth of reduced formulas over a family.
    Scan {
        #[arg(long, value_parser = variant)]
        variant: ReductionVariant,
        #[arg(long, value_enum, default_value_t = Family::Disjunction)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        from: usize,
        #[arg(long, default_value_t = 6)]
        to: usize,
    },
    /// Model check a formula at a world of a Kripke file.
    Check {
        kripke: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long, default_value_t = 0)]
        world: usize,
    },
    /// Seeded random formulas of the {AX, EX} fragment.
    Random {
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn world_bound(s: &str) -> Result<usize, String> {
    let n = positive(s)?;
    if n > 64 {
        return Err("at most 64 worlds".into());
    }
    Ok(n)
}

fn variant(s: &str) -> Result<ReductionVariant, String> {
    ReductionVariant::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ReductionVariant::ALL.iter().map(|v| v.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

type Outcome = Result<i32, String>;

/// Prints `(key, value)` pairs as `key: value` prose or `key=value`
/// records.
struct Report<'a> {
    out: &'a mut dyn Write,
    format: OutputFormat,
}

impl Report<'_> {
    fn field(&mut self, key: &str, value: impl std::fmt::Display) -> Result<(), String> {
        let line = match self.format {
            OutputFormat::Machine => format!("{key}={value}"),
            OutputFormat::Human => format!("{}: {value}", key.replace('_', " ")),
        };
        writeln!(self.out, "{line}").map_err(|e| e.to_string())
    }

    /// A bare line in human mode, a record in machine mode.
    fn result(&mut self, key: &str, value: impl std::fmt::Display) -> Result<(), String> {
        match self.format {
            OutputFormat::Machine => self.field(key, value),
            OutputFormat::Human => writeln!(self.out, "{value}").map_err(|e| e.to_string()),
        }
    }

    fn raw(&mut self, text: &str) -> Result<(), String> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string())
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn formula(input: &FormulaInput) -> Result<CtlFormula, String> {
    let text = match (&input.formula, &input.file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => return Err("no formula given".into()),
    };
    parse_formula(text.trim()).map_err(|e| format!("formula: {e}"))
}

/// Number of nodes of a complete tree of depth `td` with one child per
/// `EX` occurrence, capped at [`BRUTE_DEFAULT_CAP`].
pub fn default_brute_bound(f: &CtlFormula) -> usize {
    let nnf = to_nnf(f);
    let ex = nnf
        .subformulas()
        .iter()
        .filter(|g| matches!(g, CtlFormula::Temporal(op, _) if op.operator() == CtlOperator::EX))
        .count()
        .max(1);
    let mut total = 0usize;
    let mut layer = 1usize;
    for _ in 0..=nnf.temporal_depth() {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(ex);
        if total >= BRUTE_DEFAULT_CAP {
            return BRUTE_DEFAULT_CAP;
        }
    }
    total
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_TRUE;
        }
    };
    let mut report = Report {
        out,
        format: cli.format,
    };
    match execute(cli.command, cli.seed, &mut report) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, seed: u64, r: &mut Report<'_>) -> Outcome {
    match command {
        Command::Parse(input) => {
            let f = formula(&input)?;
            r.result("formula", &f)?;
            r.field("size", f.size())?;
            r.field("temporal_depth", f.temporal_depth())?;
            r.field("operators", f.operator_set())?;
            Ok(EXIT_TRUE)
        }
        Command::Nnf(input) => {
            r.result("nnf", to_nnf(&formula(&input)?))?;
            Ok(EXIT_TRUE)
        }
        Command::Td(input) => {
            r.result("td", formula(&input)?.temporal_depth())?;
            Ok(EXIT_TRUE)
        }
        Command::Encode(input) => encode_command(&formula(&input)?, r),
        Command::Decompose {
            structure,
            exact,
            element_limit,
        } => {
            let a = parse_structure(&read(&structure)?).map_err(|e| format!("structure: {e}"))?;
            let (d, width) = if exact {
                match pathwidth_exact(&a, element_limit) {
                    Ok(found) => found,
                    Err(e) => {
                        writeln!(r.out, "{e}").map_err(|e| e.to_string())?;
                        return Ok(EXIT_BUDGET);
                    }
                }
            } else {
                pathwidth_upper(&a)
            };
            validate_decomposition(&a, &d).map_err(|v| format!("internal: {v}"))?;
            match r.format {
                OutputFormat::Machine => {
                    r.field("width", width)?;
                    r.field("exact", exact)?;
                    for (i, bag) in d.bags().iter().enumerate() {
                        let items: Vec<String> = bag.iter().map(usize::to_string).collect();
                        r.field(&format!("bag.{i}"), items.join(" "))?;
                    }
                }
                OutputFormat::Human => {
                    let kind = if exact { "exact" } else { "heuristic" };
                    r.raw(&format!("# {kind} width {width}\n"))?;
                    r.raw(&write_decomposition(&d))?;
                }
            }
            Ok(EXIT_TRUE)
        }
        Command::Param {
            input,
            element_limit,
        } => {
            let p = parameter_with_limit(&formula(&input)?, element_limit);
            r.field("pathwidth", p.pathwidth)?;
            r.field("exact", p.exact)?;
            r.field("temporal_depth", p.temporal_depth)?;
            r.field("parameter", p.value())?;
            Ok(EXIT_TRUE)
        }
        Command::Sat {
            input,
            method,
            max_worlds,
            budget,
            show_model,
        } => sat_command(&formula(&input)?, method, max_worlds, budget, show_model, r),
        Command::MsoEval {
            structure,
            formula,
            elements,
            sets,
        } => {
            let a = parse_structure(&read(&structure)?).map_err(|e| format!("structure: {e}"))?;
            let f = parse_mso(&read(&formula)?).map_err(|e| format!("mso formula: {e}"))?;
            let mut asg = MsoAssignment::new();
            for binding in &elements {
                let (x, value) = binding.split_once('=').ok_or("expected --element x=i")?;
                asg = asg.with_element(
                    x,
                    value
                        .parse()
                        .map_err(|_| format!("bad element {value:?}"))?,
                );
            }
            for binding in &sets {
                let (x, value) = binding.split_once('=').ok_or("expected --set X=i,j")?;
                let members = value
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.trim().parse().map_err(|_| format!("bad element {s:?}")))
                    .collect::<Result<BTreeSet<usize>, _>>()?;
                asg = asg.with_set(x, members);
            }
            let holds = evaluate(&a, &f, &asg).map_err(|e| e.to_string())?;
            r.result("holds", holds)?;
            Ok(if holds { EXIT_TRUE } else { EXIT_FALSE })
        }
        Command::Reduce { instance, variant } => {
            let inst = parse_pwsat(&read(&instance)?).map_err(|e| format!("instance: {e}"))?;
            let f = reduce(&inst, variant);
            r.result("formula", &f)?;
            if r.format == OutputFormat::Machine {
                r.field("size", f.size())?;
                r.field("temporal_depth", f.temporal_depth())?;
                r.field("operators", f.operator_set())?;
            }
            Ok(EXIT_TRUE)
        }
        Command::VerifyReduction {
            instance,
            variant,
            max_worlds,
            budget,
        } => {
            let inst = parse_pwsat(&read(&instance)?).map_err(|e| format!("instance: {e}"))?;
            let search = BruteForceConfig::new(max_worlds).with_budget(budget);
            let report = verify_reduction(&inst, variant, search).map_err(|e| e.to_string())?;
            r.field("variant", variant)?;
            r.field(
                "instance",
                if report.solution.is_some() {
                    "yes"
                } else {
                    "no"
                },
            )?;
            if let Some(sound) = report.sound {
                r.field("witness_satisfies", sound)?;
            }
            r.field("chains_checked", report.chains_checked)?;
            r.field("chain_mismatches", report.chain_mismatches.len())?;
            let mut exhausted = false;
            match &report.bounded {
                None => {}
                Some(BoundedSearch::NoModel {
                    max_worlds,
                    examined,
                }) => {
                    r.field(
                        "bounded_search",
                        format!("no model up to {max_worlds} worlds"),
                    )?;
                    r.field("examined", examined)?;
                }
                Some(BoundedSearch::BudgetExhausted {
                    complete_up_to,
                    examined,
                }) => {
                    exhausted = true;
                    r.field(
                        "bounded_search",
                        format!("budget exhausted, no model up to {complete_up_to} worlds"),
                    )?;
                    r.field("examined", examined)?;
                }
                Some(BoundedSearch::ModelFound { worlds }) => {
                    r.field("bounded_search", format!("model with {worlds} worlds"))?;
                }
            }
            r.field("passed", report.passed())?;
            Ok(match (report.passed(), exhausted) {
                (false, _) => EXIT_FALSE,
                (true, true) => EXIT_BUDGET,
                (true, false) => EXIT_TRUE,
            })
        }
        Command::Scan {
            variant,
            family,
            from,
            to,
        } => {
            if from > to {
                return Err(format!("empty range {from}..={to}"));
            }
            let make = match family {
                Family::Disjunction => disjunction_instance,
                Family::ClauseFree => clause_free_instance,
            };
            let rows = parameter_growth_scan((from..=to).map(make), variant);
            if r.format == OutputFormat::Human {
                r.raw("variables  td  pathwidth  elements\n")?;
            }
            for row in rows {
                match r.format {
                    OutputFormat::Machine => r.raw(&format!(
                        "variables={} td={} pathwidth={} elements={}\n",
                        row.variables, row.temporal_depth, row.pathwidth_upper, row.elements
                    ))?,
                    OutputFormat::Human => r.raw(&format!(
                        "{:>9}  {:>2}  {:>9}  {:>8}\n",
                        row.variables, row.temporal_depth, row.pathwidth_upper, row.elements
                    ))?,
                }
            }
            Ok(EXIT_TRUE)
        }
        Command::Check {
            kripke,
            input,
            world,
        } => {
            let k = parse_kripke(&read(&kripke)?).map_err(|e| format!("kripke: {e}"))?;
            let holds = model_check(&k, world, &formula(&input)?).map_err(|e| e.to_string())?;
            r.result("holds", holds)?;
            Ok(if holds { EXIT_TRUE } else { EXIT_FALSE })
        }
        Command::Random { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let config = GenConfig::default();
            for i in 0..count {
                let f = random_x_formula(&mut rng, &config);
                match r.format {
                    OutputFormat::Machine => r.field(&format!("formula.{i}"), f)?,
                    OutputFormat::Human => r.result("formula", f)?,
                }
            }
            Ok(EXIT_TRUE)
        }
    }
}

fn encode_command(f: &CtlFormula, r: &mut Report<'_>) -> Outcome {
    let a = encode(&eliminate_sugar(f)).map_err(|e| e.to_string())?;
    match r.format {
        OutputFormat::Human => r.raw(&write_structure(&a))?,
        OutputFormat::Machine => {
            r.field("elements", a.universe_size())?;
            r.field("gaifman_edges", gaifman_graph(&a).edge_count())?;
            for e in 0..a.universe_size() {
                r.field(&format!("element.{e}"), a.element_name(e))?;
            }
            for (name, tuple) in a.tuples() {
                let args: Vec<String> = tuple.iter().map(usize::to_string).collect();
                r.field("tuple", format!("{name} {}", args.join(" ")))?;
            }
        }
    }
    Ok(EXIT_TRUE)
}

fn sat_command(
    f: &CtlFormula,
    method: Method,
    max_worlds: Option<usize>,
    budget: u64,
    show_model: bool,
    r: &mut Report<'_>,
) -> Outcome {
    let verdict = |sat: bool| if sat { "satisfiable" } else { "unsatisfiable" };
    let show = |r: &mut Report<'_>, k: &KripkeStructure| -> Result<(), String> {
        if show_model {
            match r.format {
                OutputFormat::Human => r.raw(&write_kripke(k))?,
                OutputFormat::Machine => {
                    for line in write_kripke(k).lines() {
                        r.field("model", line)?;
                    }
                }
            }
        }
        Ok(())
    };
    let sat = match method {
        Method::Pipeline => {
            let sat = fpt_pipeline(f).map_err(|e| e.to_string())?;
            r.result("result", verdict(sat))?;
            sat
        }
        Method::Tree => {
            let model =
                bounded_tree_model(&to_nnf(f), f.temporal_depth()).map_err(|e| e.to_string())?;
            r.result("result", verdict(model.is_some()))?;
            if let Some(k) = &model {
                show(r, k)?;
            }
            model.is_some()
        }
        Method::Brute => {
            let bound = max_worlds.unwrap_or_else(|| default_brute_bound(f));
            let outcome = brute_force_sat_with(f, BruteForceConfig::new(bound).with_budget(budget));
            match &outcome {
                BruteForceOutcome::Satisfiable { model, .. } => {
                    r.result("result", verdict(true))?;
                    r.field("worlds", model.world_count())?;
                }
                BruteForceOutcome::NoModelUpToBound { max_worlds, .. } => {
                    r.result("result", verdict(false))?;
                    r.field("max_worlds", max_worlds)?;
                }
                BruteForceOutcome::BudgetExhausted { complete_up_to, .. } => {
                    r.result("result", "budget exhausted")?;
                    r.field("complete_up_to", complete_up_to)?;
                }
            }
            r.field("examined", outcome.examined())?;
            match outcome {
                BruteForceOutcome::Satisfiable { model, .. } => {
                    show(r, &model)?;
                    true
                }
                BruteForceOutcome::NoModelUpToBound { .. } => false,
                BruteForceOutcome::BudgetExhausted { .. } => return Ok(EXIT_BUDGET),
            }
        }
    };
    Ok(if sat { EXIT_TRUE } else { EXIT_FALSE })
}
