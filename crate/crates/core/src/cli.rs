//! Command-line surface: `eval`, `sweep`, `table` and `verify`.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::engine::Evaluator;
use crate::error::Error;
use crate::params::{EvalOptions, MethodChoice, MethodId, SumKind, SumParams};
use crate::report::{Format, Inputs, Report, ResultRecord, RowRecord};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REGION: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "besselsum",
    version,
    about = "Damped Bessel lattice sums by several expansions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    J,
    K,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
struct Common {
    /// Bessel kernel of the sum.
    #[arg(long, value_enum, ignore_case = true, default_value = "j")]
    kind: KindArg,
    /// Sum Σ (−1)^{n−1} … instead.
    #[arg(long)]
    alternating: bool,
    /// Order ν.
    #[arg(long, allow_negative_numbers = true)]
    nu: f64,
    /// auto, direct, polylog, theorem, asymptotic, special, or a method id.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Target absolute accuracy for truncation-controlled paths.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Hard cap on terms for any single series.
    #[arg(long, default_value_t = 10_000_000)]
    max_terms: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one sum.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
    /// Evaluate on the grid a × b (comma-separated lists) at fixed ν.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        a: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_negative_numbers = true
        )]
        b: Vec<f64>,
    },
    /// Convergence study: partial values per method and truncation level.
    Table {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// Method ids to tabulate.
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<String>,
        /// Method id used as the reference value.
        #[arg(long, default_value = "direct")]
        reference: String,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
    },
    /// Run the self-verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
}

/// Exit code plus the rendered streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn usage(msg: String) -> Self {
        CommandOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg,
        }
    }

    fn region(e: &Error) -> Self {
        CommandOutput {
            code: EXIT_REGION,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    }
}

fn kind_of(k: KindArg) -> SumKind {
    match k {
        KindArg::J => SumKind::J,
        KindArg::K => SumKind::K,
    }
}

fn inputs(command: &str, c: &Common, a: Vec<f64>, b: Vec<f64>) -> Inputs {
    Inputs {
        command: command.to_owned(),
        kind: kind_of(c.kind),
        alternating: c.alternating,
        a,
        b,
        nu: c.nu,
        method: c.method.clone(),
        tol: c.tol,
        max_terms: c.max_terms,
    }
}

fn evaluator(c: &Common) -> Result<Evaluator, CommandOutput> {
    if !(c.tol > 0.0) || c.max_terms == 0 {
        return Err(CommandOutput::usage(
            "error: --tol must be positive and --max-terms at least 1\n".into(),
        ));
    }
    Ok(Evaluator::new(EvalOptions {
        tol: c.tol,
        max_terms: c.max_terms,
        level: None,
    }))
}

fn choice(c: &Common) -> Result<MethodChoice, CommandOutput> {
    c.method
        .parse()
        .map_err(|e: String| CommandOutput::usage(format!("error: {e}\n")))
}

fn method_id(s: &str) -> Result<MethodId, CommandOutput> {
    s.parse()
        .map_err(|e: String| CommandOutput::usage(format!("error: {e}\n")))
}

fn ok(report: &Report, format: FormatArg) -> CommandOutput {
    CommandOutput {
        code: EXIT_OK,
        stdout: report.render(format_of(format)),
        stderr: String::new(),
    }
}

fn eval(c: Common, a: f64, b: f64) -> CommandOutput {
    let (ev, choice) = match (evaluator(&c), choice(&c)) {
        (Ok(e), Ok(m)) => (e, m),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    let p = SumParams::new(kind_of(c.kind), a, b, c.nu).alternating(c.alternating);
    match ev.evaluate(&p, choice) {
        Ok(r) => {
            let mut report = Report::new(inputs("eval", &c, vec![a], vec![b]));
            report.results.push(ResultRecord::from_eval(a, b, &r));
            ok(&report, c.format)
        }
        Err(e) => CommandOutput::region(&e),
    }
}

fn sweep(c: Common, aa: Vec<f64>, bb: Vec<f64>) -> CommandOutput {
    let (ev, choice) = match (evaluator(&c), choice(&c)) {
        (Ok(e), Ok(m)) => (e, m),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    let kind = kind_of(c.kind);
    let points: Vec<(f64, f64)> = aa
        .iter()
        .flat_map(|&a| bb.iter().map(move |&b| (a, b)))
        .collect();
    // collect preserves grid order regardless of completion order
    let results: Vec<ResultRecord> = points
        .par_iter()
        .map(|&(a, b)| {
            let p = SumParams::new(kind, a, b, c.nu).alternating(c.alternating);
            match ev.evaluate(&p, choice) {
                Ok(r) => ResultRecord::from_eval(a, b, &r),
                Err(e) => ResultRecord::failed(a, b, &c.method, e.to_string()),
            }
        })
        .collect();
    let failed = results.iter().filter(|r| r.error.is_some()).count();
    let mut report = Report::new(inputs("sweep", &c, aa, bb));
    report.results = results;
    let mut out = ok(&report, c.format);
    if failed > 0 {
        out.code = EXIT_REGION;
        out.stderr = format!(
            "error: {failed} of {} grid points failed\n",
            report.results.len()
        );
    }
    out
}

fn table(
    c: Common,
    a: f64,
    b: f64,
    methods: Vec<String>,
    reference: String,
    levels: Vec<usize>,
) -> CommandOutput {
    let ev = match evaluator(&c) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let mut ids = Vec::with_capacity(methods.len());
    for m in &methods {
        match method_id(m) {
            Ok(id) => ids.push(id),
            Err(o) => return o,
        }
    }
    let reference = match method_id(&reference) {
        Ok(r) => r,
        Err(o) => return o,
    };
    match ev.convergence_table(kind_of(c.kind), a, b, c.nu, &ids, reference, &levels) {
        Ok(t) => {
            let mut report = Report::new(inputs("table", &c, vec![a], vec![b]));
            report.rows = t.rows.iter().map(RowRecord::from).collect();
            report.notes = t.notes;
            report.notes.push(format!(
                "reference {} = {}",
                t.reference,
                crate::report::fmt17(t.reference_value)
            ));
            ok(&report, c.format)
        }
        Err(e) => CommandOutput::region(&e),
    }
}

fn verify(suite: SuiteArg, format: FormatArg) -> CommandOutput {
    let s = match suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let mut report = Report::new(Inputs {
        command: "verify".into(),
        kind: SumKind::J,
        alternating: false,
        a: Vec::new(),
        b: Vec::new(),
        nu: f64::NAN,
        method: format!("{s:?}").to_lowercase(),
        tol: f64::NAN,
        max_terms: 0,
    });
    report.checks = run_suite(s);
    let mut out = ok(&report, format);
    if report.checks.iter().any(|c| !c.passed) {
        out.code = EXIT_VERIFY;
    }
    out
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => CommandOutput::usage(text),
            };
        }
    };
    match cli.command {
        Command::Eval { common, a, b } => eval(common, a, b),
        Command::Sweep { common, a, b } => sweep(common, a, b),
        Command::Table {
            common,
            a,
            b,
            methods,
            reference,
            levels,
        } => table(common, a, b, methods, reference, levels),
        Command::Verify { suite, format } => verify(suite, format),
    }
}
