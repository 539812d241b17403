mod config;
mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use log::info;
use mgsat::corpus::{parse_corpus_jsonl, tokenize};
use mgsat::inference::{self, CostTerm, InferenceError, InferenceState};
use mgsat::ir::{export_dimacs, export_smtlib, export_smtlib_optimize, Formula};
use mgsat::mg::{parse_lexicon_text, print_lexicon_text, MergeKind};
use mgsat::parser::{extract_relations, parse, validate, ParseOptions};
use mgsat::{AnnotatedSentence, DerivationTree, Lexicon, SentenceType};

use config::ConfigArgs;
use report::{Report, SolutionEntry, Timing};

const NO_PARSE: u8 = 1;
const MALFORMED: u8 = 2;
const INCONSISTENT: u8 = 3;
const BUDGET: u8 = 4;
const SELF_CHECK: u8 = 5;

#[derive(Parser)]
#[command(name = "mgsat", version, about = "Minimalist grammar inference by SAT solving")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse one sentence with a lexicon and print its derivations.
    Parse {
        #[arg(long, short)]
        lexicon: PathBuf,
        #[arg(long = "type", value_enum, default_value = "decl")]
        kind: TypeArg,
        /// Print Graphviz DOT after each derivation.
        #[arg(long)]
        dot: bool,
        /// Derivations to print.
        #[arg(long, default_value_t = 10)]
        limit: usize,
        sentence: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Check a lexicon against every sentence of a corpus.
    Validate {
        #[arg(long, short)]
        lexicon: PathBuf,
        #[arg(long, short)]
        corpus: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Infer optimal lexicons for a corpus.
    Infer {
        #[arg(long, short)]
        corpus: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write DOT files for each derivation.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compare optima with and without axiom groups.
    Ablate {
        #[arg(long, short)]
        corpus: PathBuf,
        #[arg(long = "group", short, required = true)]
        groups: Vec<String>,
        /// Write the JSON report here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Write the encoding of a corpus prefix as SMT-LIB2 and DIMACS.
    Export {
        #[arg(long, short)]
        corpus: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Number of leading sentences to encode (default: all).
        #[arg(long)]
        up_to: Option<usize>,
        /// Pin the lexicon slots to this lexicon.
        #[arg(long, short)]
        lexicon: Option<PathBuf>,
        /// Append the configured costs as minimize/maximize commands.
        #[arg(long)]
        objectives: bool,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum TypeArg {
    Decl,
    Intr,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn fail(code: u8, err: impl Into<anyhow::Error>) -> anyhow::Error {
    let err = err.into();
    anyhow!(Failure { code, err })
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.err)
    }
}

impl std::error::Error for Failure {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Failure>().map_or(1, |f| f.code);
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Parse {
            lexicon,
            kind,
            dot,
            limit,
            sentence,
            config,
        } => {
            let opts = config.resolve().map_err(|e| fail(MALFORMED, e))?.parse_options();
            let kind = match kind {
                TypeArg::Decl => SentenceType::Decl,
                TypeArg::Intr => SentenceType::Intr,
            };
            cmd_parse(&read_lexicon(&lexicon)?, &sentence, kind, opts, dot, limit)
        }
        Cmd::Validate { lexicon, corpus, config } => {
            let opts = config.resolve().map_err(|e| fail(MALFORMED, e))?.parse_options();
            cmd_validate(&read_lexicon(&lexicon)?, &read_corpus(&corpus)?, opts)
        }
        Cmd::Infer { corpus, out, dot, config } => {
            let config = config.resolve().map_err(|e| fail(MALFORMED, e))?;
            cmd_infer(&read_corpus(&corpus)?, &config, &out, dot)
        }
        Cmd::Ablate {
            corpus,
            groups,
            out,
            config,
        } => {
            let config = config.resolve().map_err(|e| fail(MALFORMED, e))?;
            let corpus = read_corpus(&corpus)?;
            let mut reports = Vec::new();
            for g in &groups {
                reports.push(inference::ablate(&corpus, &config, g).map_err(classify)?);
            }
            let text = serde_json::to_string_pretty(&reports)? + "\n";
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Export {
            corpus,
            out,
            up_to,
            lexicon,
            objectives,
            config,
        } => {
            let config = config.resolve().map_err(|e| fail(MALFORMED, e))?;
            let corpus = read_corpus(&corpus)?;
            let lex = lexicon.as_deref().map(read_lexicon).transpose()?;
            cmd_export(&corpus, &config, &out, up_to, lex.as_ref(), objectives)
        }
    }
}

fn classify(e: InferenceError) -> anyhow::Error {
    let code = match e {
        InferenceError::Inconsistent { .. } => INCONSISTENT,
        InferenceError::Budget => BUDGET,
        InferenceError::SelfCheck(_) => SELF_CHECK,
        InferenceError::UnknownGroup(_) | InferenceError::EmptyCorpus => MALFORMED,
        InferenceError::Encode(_) => 1,
    };
    fail(code, e)
}

fn read_lexicon(path: &Path) -> anyhow::Result<Lexicon> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_lexicon_text(&text).map_err(|e| fail(MALFORMED, anyhow!("{}: {e}", path.display())))
}

fn read_corpus(path: &Path) -> anyhow::Result<Vec<AnnotatedSentence>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_corpus_jsonl(&text).map_err(|e| fail(MALFORMED, anyhow!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Text block for one derivation: yield, merge events, relations, tree.
fn describe(tree: &DerivationTree) -> String {
    let mut out = String::new();
    let surface = tree.surface().unwrap_or_default();
    let _ = writeln!(out, "yield: {}", surface.join(" "));
    let _ = writeln!(out, "events:");
    let name = |id| tree.leaf(id).map(|l| l.item.phon.to_string()).unwrap_or_default();
    for ev in tree.events() {
        let kind = match ev.kind {
            MergeKind::External => "merge",
            MergeKind::Internal => "move",
        };
        let hm = match ev.head_move {
            mgsat::mg::HeadMove::None => "",
            mgsat::mg::HeadMove::Left => " (head movement, left)",
            mgsat::mg::HeadMove::Right => " (head movement, right)",
        };
        let _ = writeln!(
            out,
            "  {kind} {} <- {}{hm}",
            name(tree.head_leaf(ev.head)),
            name(tree.head_leaf(ev.dependent))
        );
    }
    if let Ok(rels) = extract_relations(tree) {
        let mut rs: Vec<String> = rels.args.iter().map(|&(a, b)| format!("arg({}, {})", surface[a], surface[b])).collect();
        rs.extend(rels.agrees.iter().map(|&(a, b)| format!("agree({}, {})", surface[a], surface[b])));
        let _ = writeln!(out, "relations: {}", rs.join(" "));
    }
    out.push_str(&tree.render());
    out
}

fn admissible(tree: &DerivationTree, opts: ParseOptions) -> bool {
    !opts.covert_root || tree.leaf(tree.head_leaf(tree.root())).is_some_and(|l| l.item.phon.is_covert())
}

fn cmd_parse(lex: &Lexicon, sentence: &str, kind: SentenceType, opts: ParseOptions, dot: bool, limit: usize) -> anyhow::Result<u8> {
    let tokens = tokenize(sentence);
    let trees: Vec<DerivationTree> = parse(lex, &tokens, kind, opts).into_iter().filter(|t| admissible(t, opts)).collect();
    println!("{} derivation(s)", trees.len());
    for (k, t) in trees.iter().take(limit).enumerate() {
        println!("\n# derivation {}", k + 1);
        print!("{}", describe(t));
        if dot {
            print!("{}", t.to_dot());
        }
    }
    if trees.is_empty() {
        return Err(fail(NO_PARSE, anyhow!("no parse for {sentence:?}")));
    }
    Ok(0)
}

fn cmd_validate(lex: &Lexicon, corpus: &[AnnotatedSentence], opts: ParseOptions) -> anyhow::Result<u8> {
    let mut failed = 0;
    for (i, s) in corpus.iter().enumerate() {
        let ok = validate(lex, s, opts);
        failed += usize::from(!ok);
        println!("{:>3} {} {}", i + 1, if ok { "ok  " } else { "FAIL" }, s.text);
    }
    println!("{}/{} sentences validate", corpus.len() - failed, corpus.len());
    Ok(if failed == 0 { 0 } else { NO_PARSE })
}

fn cmd_infer(corpus: &[AnnotatedSentence], config: &inference::InferenceConfig, out: &Path, dot: bool) -> anyhow::Result<u8> {
    let res = inference::run(corpus, config).map_err(classify)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut entries = Vec::new();
    for (k, sol) in res.solutions.iter().enumerate() {
        let name = format!("lexicon-{}", k + 1);
        let lex_file = format!("{name}.mg");
        write(&out.join(&lex_file), &print_lexicon_text(&sol.lexicon))?;
        let dir = out.join(&name);
        fs::create_dir_all(&dir)?;
        let mut derivations = Vec::new();
        for (i, t) in sol.derivations.iter().enumerate() {
            let base = format!("sentence-{:02}", i + 1);
            write(&dir.join(format!("{base}.txt")), &describe(t))?;
            if dot {
                write(&dir.join(format!("{base}.dot")), &t.to_dot())?;
            }
            derivations.push(format!("{name}/{base}.txt"));
        }
        entries.push(SolutionEntry {
            lexicon: lex_file,
            values: sol.values,
            derivations,
        });
    }
    let report = Report::new(&res, config, corpus.len(), entries);
    write(&out.join("report.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    let timing = Timing {
        encode_ms: res.stats.encode_ms,
        solve_ms: res.stats.solve_ms,
    };
    write(&out.join("timing.json"), &(serde_json::to_string_pretty(&timing)? + "\n"))?;
    inference::self_check(&res, corpus, config.parse_options()).map_err(classify)?;
    self_check_files(out, res.solutions.len(), corpus, config.parse_options())?;
    for (k, e) in report.solutions.iter().enumerate() {
        let v = e.values;
        println!(
            "lexicon-{}: entries={} lexicon_features={} parse_features={} selector_categories={}",
            k + 1,
            v.entries,
            v.lexicon_features,
            v.parse_features,
            v.selector_categories
        );
    }
    if !res.optimal {
        eprintln!("warning: budget reached, solutions may not be optimal");
    }
    Ok(0)
}

/// Re-reads every written lexicon and checks it against the corpus.
fn self_check_files(out: &Path, n: usize, corpus: &[AnnotatedSentence], opts: ParseOptions) -> anyhow::Result<()> {
    for k in 1..=n {
        let path = out.join(format!("lexicon-{k}.mg"));
        let lex = read_lexicon(&path).map_err(|e| fail(SELF_CHECK, e))?;
        if let Some(s) = corpus.iter().find(|s| !validate(&lex, s, opts)) {
            return Err(fail(SELF_CHECK, anyhow!("{} does not derive {:?}", path.display(), s.text)));
        }
    }
    Ok(())
}

fn cmd_export(
    corpus: &[AnnotatedSentence],
    config: &inference::InferenceConfig,
    out: &Path,
    up_to: Option<usize>,
    lex: Option<&Lexicon>,
    objectives: bool,
) -> anyhow::Result<u8> {
    let n = up_to.unwrap_or(corpus.len()).min(corpus.len());
    let t0 = Instant::now();
    let mut st = InferenceState::for_corpus(corpus, config.clone()).map_err(classify)?;
    for s in &corpus[..n] {
        st.consume(s).map_err(classify)?;
    }
    let mut problem = st.encoding().problem().clone();
    if let Some(lex) = lex {
        let pins = st.encoding().pin_lexicon(lex).map_err(|e| fail(MALFORMED, e))?;
        problem.set_group("pin");
        for l in pins {
            problem.assert(&Formula::Lit(l))?;
        }
    }
    let smt = if objectives {
        let objs: Vec<_> = config.costs.0.iter().map(|&t: &CostTerm| st.objective(t)).collect();
        export_smtlib_optimize(&problem, &objs)
    } else {
        export_smtlib(&problem)
    };
    let (cnf, map) = export_dimacs(&problem);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(&out.join("problem.smt2"), &smt)?;
    write(&out.join("problem.cnf"), &cnf)?;
    write(&out.join("problem.map.json"), &map)?;
    info!("encoded {n} sentences in {} ms", t0.elapsed().as_millis());
    println!(
        "{n} sentence(s): {} variables, {} clauses; smt2 {} bytes, cnf {} bytes",
        problem.num_vars(),
        problem.num_clauses(),
        smt.len(),
        cnf.len()
    );
    Ok(0)
}
