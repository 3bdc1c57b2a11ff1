use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modborel::battery::{run_battery, BatteryConfig, DEFAULT_SEED};
use modborel::diagrams::{decode, encode, eval_staged, DiagramPrefix, StructureStream};
use modborel::formulas::{
    classify, holds, parse_formula, parse_with_inferred_vocabulary, prenex, FiniteStructure, Formula, Level, Vocabulary,
};
use modborel::pointclasses::UPPoint;
use modborel::prioritysim::Demo;
use modborel::reductions::{infcoinf_construction, matching_construction, pipeline, r_linord, PipelineOptions};
use modborel::theories::{lindenbaum_complete, split_theory, Family, SentenceSpace, TheoryHandle};
use modborel::transducers::run;
use serde::Deserialize;

const REDUCTIONS: &str = "\
Reductions (combine with commas, applied left to right):
  identity   copies the input
  infcoinf   points with infinitely many 1s to {P/1} structures whose P is infinite and coinfinite
  pad        interleaves a 0 after every input bit
  matching   matrices with infinitely many empty columns to {R/2} matchings with infinitely many
             matched pairs and infinitely many unmatched elements
  linord     the fixed presentation of 2Q+1+Q with its successor relation (input is ignored)
  marker     marker extension: adds witness gadgets so that each quantifier level moves up by one,
             keeping the input recoverable
  diffjoin   disjoint union of the infcoinf and matching structures built from the same input
  section    the k-th of several interleaved sections of the input structure
  tograph    the graph coding of the input structure";

/// Atomic diagrams, continuous reductions between Borel sets and spaces of
/// countable structures, level-fragment completions and finite-injury
/// simulations, on ultimately periodic inputs.
#[derive(Parser)]
#[command(name = "modborel", version, after_help = REDUCTIONS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prints the prenex level (E<n> or A<n>) of a formula.
    Classify(FormulaArgs),
    /// Prints a prenex form of a formula and its level.
    Prenex(FormulaArgs),
    /// Encodes a finite structure as its atomic diagram.
    Encode {
        #[arg(long)]
        vocab: String,
        /// `size=N; R 0 1; P 2`
        #[arg(long)]
        structure: String,
    },
    /// Decodes an atomic diagram prefix into the structure it determines.
    Decode {
        #[arg(long)]
        vocab: String,
        #[arg(long)]
        bits: String,
        /// Number of elements; defaults to all complete ones.
        #[arg(long)]
        size: Option<usize>,
    },
    /// Runs a reduction pipeline on an ultimately periodic point.
    #[command(after_help = REDUCTIONS)]
    Reduce {
        /// Reduction names, comma separated.
        #[arg(long, visible_alias = "pipe")]
        name: String,
        /// `<prefix>;<period>`
        #[arg(long)]
        input: String,
        /// Read the input as a matrix point x(m,n) (same syntax).
        #[arg(long)]
        matrix: bool,
        #[arg(long, default_value_t = 64)]
        bits: usize,
        /// Section index for `section`.
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Number of sections for `section`.
        #[arg(long, default_value_t = 2)]
        sections: usize,
    },
    /// Evaluates a sentence on a finite structure or stagewise on a stream.
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long, requires = "vocab", conflicts_with = "stream")]
        structure: Option<String>,
        #[arg(long)]
        vocab: Option<String>,
        /// One of infcoinf, matching, linord.
        #[arg(long, requires = "input")]
        stream: Option<String>,
        #[arg(long)]
        input: Option<String>,
        #[arg(long, default_value_t = 20)]
        stages: usize,
    },
    /// Lindenbaum completion: T⁺ ∋ φ and T⁻ ∋ ¬φ with Λ∩T⁻ ⊆ Λ∩T⁺.
    Complete {
        /// monadic, matching or linorderS.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[command(flatten)]
        common: TheoryArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Splits a complete theory into T₀ ⊇ T and T₁ with Λ∩T₀ ⊆ Λ∩T₁.
    Split {
        /// For example `matching inf inf` or `monadic P=inf notP=inf`.
        #[arg(long)]
        theory: Option<String>,
        #[command(flatten)]
        common: TheoryArgs,
    },
    /// Runs a switching or tower construction and verifies its trace.
    ///
    /// core1: one switch from all-P to infinite/coinfinite P on the first 1.
    /// core2: matched pairs plus candidates, repaired on each 1; perfect
    /// matching unless the input is eventually zero. tower2: both at once on
    /// the even and odd tracks, estimating the least level the input fails.
    Simulate {
        #[arg(long)]
        demo: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 120)]
        stages: usize,
        /// Writes the trace, one event per line.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Runs the acceptance battery and prints a summary.
    Battery(BatteryArgs),
}

#[derive(Args)]
struct FormulaArgs {
    #[arg(long)]
    formula: String,
    /// Vocabulary such as `P/1,R/2`; inferred from the formula if omitted.
    #[arg(long)]
    vocab: Option<String>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Λ, as E<n> or A<n>.
    #[arg(long)]
    lambda: Option<String>,
    /// Rank cap [default: 3].
    #[arg(long)]
    cap: Option<usize>,
    /// TOML file with any of `family`, `phi`, `theory`, `lambda`, `cap`,
    /// `seed`. Flags win over the file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TheoryConfig {
    family: Option<String>,
    phi: Option<String>,
    theory: Option<String>,
    lambda: Option<String>,
    cap: Option<usize>,
    seed: Option<u64>,
}

impl TheoryArgs {
    fn load(&self) -> Result<TheoryConfig, Failure> {
        let Some(path) = &self.config else { return Ok(TheoryConfig::default()) };
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}

fn required(flag: Option<String>, file: Option<String>, name: &str) -> Result<String, Failure> {
    flag.or(file).ok_or_else(|| usage(format!("missing `{name}` (flag or config)")))
}

#[derive(Args)]
struct BatteryArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    extra_points: usize,
    #[arg(long, default_value_t = 120)]
    stages: usize,
    /// Adds a transducer that reads ahead; the battery must then fail.
    #[arg(long)]
    inject_broken: bool,
}

enum Failure {
    Usage(String),
    Violation(String),
}

type Outcome = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn vocabulary(text: &str) -> Result<Vocabulary, Failure> {
    Vocabulary::parse(text).map_err(usage)
}

fn formula(text: &str, vocab: Option<&str>) -> Result<(Formula, Vocabulary), Failure> {
    match vocab {
        Some(v) => {
            let v = vocabulary(v)?;
            Ok((parse_formula(text, &v).map_err(usage)?, v))
        }
        None => parse_with_inferred_vocabulary(text).map_err(usage),
    }
}

fn level(text: &str) -> Result<Level, Failure> {
    Level::parse(text).map_err(|e| usage(format!("bad level `{}`", e.0)))
}

fn point(text: &str) -> Result<UPPoint, Failure> {
    text.parse().map_err(usage)
}

/// Parses `size=N; R 0 1; P 2`.
fn structure(text: &str, vocab: &Vocabulary) -> Result<FiniteStructure, Failure> {
    let mut parts = text.split(';').map(str::trim).filter(|s| !s.is_empty());
    let size = parts
        .next()
        .and_then(|s| s.strip_prefix("size="))
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| usage("structure must start with `size=N`"))?;
    let mut facts = Vec::new();
    for part in parts {
        let mut words = part.split_whitespace();
        let rel = words.next().unwrap_or_default();
        let tuple: Vec<usize> =
            words.map(|w| w.parse().map_err(|_| usage(format!("bad element `{w}`")))).collect::<Result<_, _>>()?;
        facts.push((rel, tuple));
    }
    FiniteStructure::from_facts(vocab, size, facts.iter().map(|(r, t)| (*r, t.as_slice()))).map_err(usage)
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Classify(a) => {
            let (f, _) = formula(&a.formula, a.vocab.as_deref())?;
            println!("{}", classify(&f));
        }
        Command::Prenex(a) => {
            let (f, _) = formula(&a.formula, a.vocab.as_deref())?;
            let p = prenex(&f);
            println!("prenex={} level={}", p.to_formula(), p.level());
        }
        Command::Encode { vocab, structure: s } => {
            let v = vocabulary(&vocab)?;
            let st = structure(&s, &v)?;
            println!("{}", encode(&st).to_bit_string());
        }
        Command::Decode { vocab, bits, size } => {
            let v = vocabulary(&vocab)?;
            let p = DiagramPrefix::parse(&v, &bits).map_err(usage)?;
            let n = size.unwrap_or_else(|| p.complete_elements());
            println!("{}", decode(&p, n).map_err(usage)?);
        }
        Command::Reduce { name, input, matrix: _, bits, k, sections } => {
            let p = point(&input)?;
            let names: Vec<&str> = name.split(',').collect();
            let opts = PipelineOptions { k, sections, ..PipelineOptions::default() };
            let t = pipeline(&names, &opts).map_err(usage)?;
            let out = run(t.as_ref(), p.bits(), bits, bits.saturating_mul(64).max(10_000))
                .map_err(|e| Failure::Violation(e.to_string()))?;
            println!("{}", bit_string(&out));
        }
        Command::Eval { formula: text, structure: s, vocab, stream, input, stages } => match (s, stream) {
            (Some(s), None) => {
                let (f, v) = formula(&text, vocab.as_deref())?;
                let st = structure(&s, &v)?;
                println!("{}", holds(&f, &st).map_err(usage)?);
            }
            (None, Some(name)) => {
                let mut st: StructureStream = match name.as_str() {
                    "infcoinf" => infcoinf_construction().stream(&point(input.as_deref().unwrap_or(""))?),
                    "matching" => matching_construction().stream(&point(input.as_deref().unwrap_or(""))?),
                    "linord" => r_linord(),
                    other => return Err(usage(format!("unknown stream `{other}` (infcoinf, matching, linord)"))),
                };
                let v = st.vocabulary().clone();
                let f = parse_formula(&text, &v).map_err(usage)?;
                if !f.is_sentence() {
                    return Err(usage("formula has free variables"));
                }
                let sv = eval_staged(&prenex(&f), &mut st, stages, None);
                for (s, (verdict, size)) in sv.per_stage.iter().zip(&sv.sizes).enumerate() {
                    println!("stage={s} size={size} verdict={verdict}");
                }
                println!("level={}", sv.level);
            }
            _ => return Err(usage("give either --structure with --vocab, or --stream with --input")),
        },
        Command::Complete { family, phi, common, seed } => {
            let file = common.load()?;
            let family: Family = required(family, file.family, "family")?.parse().map_err(usage)?;
            let phi = required(phi, file.phi, "phi")?;
            let lambda = level(&required(common.lambda, file.lambda, "lambda")?)?;
            let cap = common.cap.or(file.cap).unwrap_or(3);
            let seed = seed.or(file.seed);
            let vocab = family.vocabulary();
            let phi = parse_formula(&phi, &vocab).map_err(usage)?;
            let space = family.space(cap);
            let sentences = SentenceSpace::new(&vocab, cap, family.default_literals()).sentences();
            let c = lindenbaum_complete(&[], &phi, lambda, &space, &sentences, cap, seed).map_err(usage)?;
            println!("lambda={} cap={} stock={} theta={}", c.lambda, c.rank_cap, sentences.len(), c.theta.len());
            println!("plus survivors={}", c.plus.survivors.join(" | "));
            println!("minus survivors={}", c.minus.survivors.join(" | "));
            println!("counterexamples={}", c.counterexamples.len());
            if let Some(f) = c.counterexamples.first() {
                return Err(Failure::Violation(format!("not contained: {f}")));
            }
        }
        Command::Split { theory, common } => {
            let file = common.load()?;
            let t: TheoryHandle = required(theory, file.theory, "theory")?.parse().map_err(usage)?;
            let lambda = level(&required(common.lambda, file.lambda, "lambda")?)?;
            let cap = common.cap.or(file.cap).unwrap_or(3);
            let family = t.family().ok_or_else(|| usage("theory has no known family"))?;
            let space = family.space(cap);
            let s = split_theory(&t, lambda, &space, cap).map_err(usage)?;
            println!("witness={} level={}", s.witness, classify(&s.witness));
            println!("t0 survivors={}", s.t0.survivors.join(" | "));
            println!("t1 survivors={}", s.t1.survivors.join(" | "));
            println!("counterexamples={}", s.counterexamples.len());
            if let Some(f) = s.counterexamples.first() {
                return Err(Failure::Violation(format!("not contained: {f}")));
            }
        }
        Command::Simulate { demo, point: p, stages, trace } => {
            let demo: Demo = demo.parse().map_err(usage)?;
            let p = point(&p)?;
            let run = demo.run(&p, stages).map_err(usage)?;
            if let Some(path) = trace {
                fs::write(&path, run.trace.to_text()).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            let report = run.verify();
            println!(
                "demo={demo} point={p} stages={stages} switches={} injuries={} bits={}",
                run.trace.count("switch"),
                run.trace.count("injury-repair"),
                run.diagram().len()
            );
            println!("predicted={}", report.predicted);
            println!("observed={}", report.observed);
            if let Some(last) = run.trace.estimates().last() {
                println!("estimate={last}");
            }
            println!("certified={} violations={}", report.certified, report.violations.len());
            if !report.is_clean() {
                let lines: Vec<String> = report.violations.iter().map(|v| format!("violation: {v}")).collect();
                return Err(Failure::Violation(lines.join("\n")));
            }
        }
        Command::Battery(a) => {
            let cfg = BatteryConfig {
                seed: a.seed,
                extra_points: a.extra_points,
                stages: a.stages,
                inject_broken: a.inject_broken,
            };
            let summary = run_battery(&cfg);
            print!("{}", summary.to_text());
            if summary.failed() > 0 {
                return Err(Failure::Violation(format!("{} criteria failed", summary.failed())));
            }
        }
    }
    Ok(())
}
