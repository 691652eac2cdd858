use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use concat_decode::blockwise::{bisect_threshold, exact_blockwise_recursion};
use concat_decode::bp::BpDecoder;
use concat_decode::code::{builtin, CodeDefinition, TableRule, BUILTIN_NAMES};
use concat_decode::format::probability;
use concat_decode::montecarlo::{run_experiment, DecoderKind, ExperimentConfig};
use concat_decode::oracle::EnumerationOracle;
use concat_decode::{
    ConcatenatedCode, Error, LogicalDistribution, Pauli, StabilizerCode, SyndromeSet,
};

#[derive(Parser)]
#[command(
    version,
    about = "Decoding of concatenated stabilizer codes on the depolarizing channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo comparison of the message-passing and blockwise decoders.
    Simulate {
        #[arg(long, default_value = "five-qubit", value_parser = parse_code_source)]
        code: CodeSource,
        /// Inclusive level range `a..b`, or a single level.
        #[arg(long, value_parser = parse_levels)]
        levels: Levels,
        /// Comma-separated depolarizing rates.
        #[arg(long = "p", value_parser = parse_rates)]
        p: Rates,
        #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = DecoderChoice::Both)]
        decoder: DecoderChoice,
        /// Blockwise lookup-table rule: likelihood argmax at the channel
        /// rate, or independent X/Z minimum-weight correction (CSS codes).
        #[arg(long, value_enum, default_value_t = TableChoice::Ml)]
        table: TableChoice,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        /// Worker cap. Results do not depend on it.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        threads: Option<u64>,
    },
    /// Exact logical error rate of blockwise decoding, level by level.
    ExactBlockwise {
        #[arg(long, default_value = "five-qubit", value_parser = parse_code_source)]
        code: CodeSource,
        #[arg(long = "p", value_parser = parse_rates)]
        p: Rates,
        #[arg(long, value_parser = parse_levels)]
        levels: Levels,
        /// Blockwise lookup-table rule: likelihood argmax at the channel
        /// rate, or independent X/Z minimum-weight correction (CSS codes).
        #[arg(long, value_enum, default_value_t = TableChoice::Ml)]
        table: TableChoice,
    },
    /// Blockwise threshold by bisection on the exact recursion.
    Threshold {
        #[arg(long, default_value = "five-qubit", value_parser = parse_code_source)]
        code: CodeSource,
        #[arg(long, default_value_t = 0.01)]
        low: f64,
        #[arg(long, default_value_t = 0.3)]
        high: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Blockwise lookup-table rule: likelihood argmax at the channel
        /// rate, or independent X/Z minimum-weight correction (CSS codes).
        #[arg(long, value_enum, default_value_t = TableChoice::Ml)]
        table: TableChoice,
    },
    /// Checks a code definition and lists every violated invariant.
    ValidateCode {
        #[arg(value_parser = parse_code_source)]
        code: CodeSource,
    },
    /// Prints a single-block syndrome lookup table.
    Table {
        #[arg(long, default_value = "five-qubit", value_parser = parse_code_source)]
        code: CodeSource,
        #[arg(long = "p", value_parser = parse_rate)]
        p: f64,
        /// Blockwise lookup-table rule: likelihood argmax at the channel
        /// rate, or independent X/Z minimum-weight correction (CSS codes).
        #[arg(long, value_enum, default_value_t = TableChoice::Ml)]
        table: TableChoice,
    },
    /// Message-passing decoding of a syndrome file.
    Decode {
        #[arg(long, default_value = "five-qubit", value_parser = parse_code_source)]
        code: CodeSource,
        /// One line per layer, top layer first, space-separated bit strings.
        #[arg(long)]
        syndromes: PathBuf,
        #[arg(long = "p", value_parser = parse_rate)]
        p: f64,
    },
    /// Compares the message-passing posterior with brute-force enumeration.
    Oracle {
        #[arg(long, default_value = "five-qubit", value_parser = parse_code_source)]
        code: CodeSource,
        #[arg(long, value_parser = parse_levels)]
        levels: Levels,
        #[arg(long = "p", value_parser = parse_rates)]
        p: Rates,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderChoice {
    Bp,
    Blockwise,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableChoice {
    Ml,
    Css,
}

impl From<TableChoice> for TableRule {
    fn from(choice: TableChoice) -> Self {
        match choice {
            TableChoice::Ml => TableRule::MaxLikelihood,
            TableChoice::Css => TableRule::Css,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
enum CodeSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Clone, Debug)]
struct Levels(Vec<usize>);

#[derive(Clone, Debug)]
struct Rates(Vec<f64>);

fn parse_code_source(s: &str) -> Result<CodeSource, String> {
    if let Some(path) = s.strip_prefix("file:") {
        if path.is_empty() {
            return Err("missing path after \"file:\"".into());
        }
        return Ok(CodeSource::File(path.into()));
    }
    if builtin(s).is_some() {
        Ok(CodeSource::Builtin(s.to_string()))
    } else {
        Err(format!(
            "unknown code {s:?}; expected one of {} or file:<path>",
            BUILTIN_NAMES.join(", ")
        ))
    }
}

fn parse_levels(s: &str) -> Result<Levels, String> {
    let parse = |t: &str| -> Result<usize, String> {
        match t.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("invalid level {t:?}; levels are positive integers")),
            Ok(v) => Ok(v),
        }
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty level range {s:?}"));
    }
    Ok(Levels((a..=b).collect()))
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let p: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("invalid probability {s:?}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("probability {p} outside [0, 1]"))
    }
}

fn parse_rates(s: &str) -> Result<Rates, String> {
    s.split(',')
        .map(parse_rate)
        .collect::<Result<_, _>>()
        .map(Rates)
}

/// An error together with the process exit status it maps to.
struct Failure {
    status: u8,
    error: anyhow::Error,
}

const USAGE: u8 = 2;
const IO: u8 = 1;

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            status: USAGE,
            error: error.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(error: io::Error) -> Self {
        Failure {
            status: IO,
            error: error.into(),
        }
    }
}

trait IoContext<T> {
    fn io_context(self, what: impl FnOnce() -> String) -> Result<T, Failure>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn io_context(self, what: impl FnOnce() -> String) -> Result<T, Failure> {
        self.with_context(what)
            .map_err(|error| Failure { status: IO, error })
    }
}

fn load_definition(source: &CodeSource) -> Result<(String, CodeDefinition), Failure> {
    match source {
        CodeSource::Builtin(name) => {
            let code = builtin(name).expect("checked by the argument parser");
            let definition = CodeDefinition {
                n: code.n(),
                generators: code.generators().to_vec(),
                logical_x: code.logical_x().clone(),
                logical_z: code.logical_z().clone(),
                pure_errors: Some(code.pure_errors().to_vec()),
            };
            Ok((code.name().to_string(), definition))
        }
        CodeSource::File(path) => {
            let text =
                fs::read_to_string(path).io_context(|| format!("reading {}", path.display()))?;
            let definition = CodeDefinition::parse(&text)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".into());
            Ok((name, definition))
        }
    }
}

fn load_code(source: &CodeSource) -> Result<StabilizerCode, Failure> {
    if let CodeSource::Builtin(name) = source {
        return Ok(builtin(name).expect("checked by the argument parser"));
    }
    let (name, definition) = load_definition(source)?;
    Ok(definition.build(name)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(status) => ExitCode::from(status),
        Err(Failure { status, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(status)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let status = match command {
        Command::Simulate {
            code,
            levels,
            p,
            trials,
            seed,
            decoder,
            table,
            out: path,
            format,
            threads,
        } => {
            let config = ExperimentConfig {
                code: load_code(&code)?,
                ps: p.0,
                levels: levels.0,
                trials,
                seed,
                decoders: match decoder {
                    DecoderChoice::Bp => vec![DecoderKind::Bp],
                    DecoderChoice::Blockwise => vec![DecoderKind::Blockwise],
                    DecoderChoice::Both => vec![DecoderKind::Bp, DecoderKind::Blockwise],
                },
                table: table.into(),
                threads: threads.map(|t| t as usize),
            };
            config.validate()?;
            let experiment = run_experiment(&config)?;
            let mut buffer = Vec::new();
            match format {
                OutputFormat::Csv => experiment.write_csv(&mut buffer)?,
                OutputFormat::Json => experiment.write_json(&mut buffer)?,
            }
            match path {
                Some(path) => {
                    fs::write(&path, buffer).io_context(|| format!("writing {}", path.display()))?
                }
                None => out.write_all(&buffer)?,
            }
            0
        }
        Command::ExactBlockwise {
            code,
            p,
            levels,
            table: rule,
        } => {
            let code = load_code(&code)?;
            let max_level = *levels.0.last().expect("non-empty range");
            writeln!(out, "code,p,level,p_e,p_x,p_y,p_z")?;
            for &p in &p.0 {
                let table = code.table(rule.into(), p)?;
                for row in exact_blockwise_recursion(&code, p, max_level, &table)? {
                    if !levels.0.contains(&row.level) {
                        continue;
                    }
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{}",
                        code.name(),
                        p,
                        row.level,
                        probability(row.p_e),
                        probability(row.channel[Pauli::X]),
                        probability(row.channel[Pauli::Y]),
                        probability(row.channel[Pauli::Z]),
                    )?;
                }
            }
            0
        }
        Command::Threshold {
            code,
            low,
            high,
            tol,
            table,
        } => {
            let code = load_code(&code)?;
            if !(0.0 < low && low < high && high <= 1.0 && tol > 0.0) {
                return Err(
                    Error::InvalidConfig("need 0 < low < high <= 1 and tol > 0".into()).into(),
                );
            }
            let rule = TableRule::from(table);
            let threshold = bisect_threshold(&code, rule, low, high, tol)?;
            writeln!(
                out,
                "{} blockwise threshold ({rule} table): {}",
                code.name(),
                probability(threshold)
            )?;
            0
        }
        Command::ValidateCode { code } => {
            let (name, definition) = load_definition(&code)?;
            let violations = definition.violations();
            if violations.is_empty() {
                writeln!(out, "{name}: ok")?;
                0
            } else {
                writeln!(out, "{name}: {} violation(s)", violations.len())?;
                for v in &violations {
                    writeln!(out, "  {v}")?;
                }
                USAGE
            }
        }
        Command::Table { code, p, table } => {
            let code = load_code(&code)?;
            write!(out, "{}", code.table(table.into(), p)?)?;
            0
        }
        Command::Decode { code, syndromes, p } => {
            let code = load_code(&code)?;
            let text = fs::read_to_string(&syndromes)
                .io_context(|| format!("reading {}", syndromes.display()))?;
            let set: SyndromeSet = text.parse()?;
            let cc = ConcatenatedCode::new(code, set.levels())?;
            cc.check_syndromes(&set)?;
            let decision =
                BpDecoder::new(cc, LogicalDistribution::depolarizing(p)?).decode(&set)?;
            for class in Pauli::ALL {
                writeln!(
                    out,
                    "P({class}) = {}",
                    probability(decision.posterior[class])
                )?;
            }
            writeln!(out, "estimate: {}", decision.estimate)?;
            writeln!(out, "confidence: {}", probability(decision.confidence))?;
            writeln!(out, "tie: {}", decision.tie)?;
            0
        }
        Command::Oracle {
            code,
            levels,
            p,
            tolerance,
        } => {
            let code = load_code(&code)?;
            let mut worst: f64 = 0.0;
            for &level in &levels.0 {
                for &p in &p.0 {
                    let cc = ConcatenatedCode::new(code.clone(), level)?;
                    let oracle =
                        EnumerationOracle::build(cc, LogicalDistribution::depolarizing(p)?)?;
                    let report = oracle.check_all()?;
                    writeln!(
                        out,
                        "level {level}, p {p}: {} syndrome sets, max deviation {:.3e}",
                        report.compared, report.max_deviation
                    )?;
                    worst = worst.max(report.max_deviation);
                }
            }
            if worst <= tolerance {
                writeln!(out, "OK, max deviation {worst:.3e} <= {tolerance:e}")?;
                0
            } else {
                writeln!(out, "MISMATCH, max deviation {worst:.3e} > {tolerance:e}")?;
                1
            }
        }
    };
    out.flush()?;
    Ok(status)
}
