//! `tfcolor`: count, sample and verify colorings of triangle-free graphs.
//!
//! Exit codes: 0 success, 1 a theorem-typed check failed, 2 usage or input
//! error, 3 a resource guard refused the computation.

mod output;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use output::{emit, round6, Format, Record};
use tfcolor::coupon::{self, BoundParams, CouponInstance};
use tfcolor::sampling::{self, MeasureMode, UniformSampler};
use tfcolor::verify::{self, CorpusSpec, KPolicy, SuiteConfig, VerificationReport};
use tfcolor::{graph, rng, Budget, Counter, Error, Graph};

#[derive(Parser, Debug)]
#[command(name = "tfcolor", version, about = "Exact coloring counts, uniform sampling and coupon bounds for triangle-free graphs")]
struct Cli {
    #[command(flatten)]
    budget: BudgetArgs,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Largest graph the exact counter accepts.
    #[arg(long, global = true, env = "TFCOLOR_MAX_VERTICES")]
    max_vertices: Option<usize>,
    /// Search-size estimate above which counting refuses.
    #[arg(long, global = true, env = "TFCOLOR_MAX_SEARCH")]
    max_search: Option<f64>,
    /// Most colorings any enumeration may visit.
    #[arg(long, global = true, env = "TFCOLOR_MAX_ENUMERATION")]
    max_enumeration: Option<u64>,
    /// Most outcomes the coupon enumerator may visit.
    #[arg(long, global = true, env = "TFCOLOR_MAX_OUTCOMES")]
    max_outcomes: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> tfcolor::Result<Budget> {
        let d = Budget::default();
        let b = Budget {
            max_vertices: self.max_vertices.unwrap_or(d.max_vertices),
            max_search: self.max_search.unwrap_or(d.max_search),
            max_enumeration: self.max_enumeration.unwrap_or(d.max_enumeration),
            max_outcomes: self.max_outcomes.unwrap_or(d.max_outcomes),
        };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct GraphInput {
    /// DIMACS `.col` file, `-` for stdin.
    #[arg(long)]
    dimacs: Option<PathBuf>,
    /// JSON `{"n": .., "edges": [[u, v], ..]}` file, `-` for stdin.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Built-in graph: petersen, grotzsch, mycielski-<d>, c<n>, p<n>, k<n>,
    /// star<n>, empty<n>, bip<a>x<b>, random-n<n>-p<p>.
    #[arg(long)]
    graph: Option<String>,
}

impl GraphInput {
    fn load(&self, seed: u64) -> tfcolor::Result<Graph> {
        if let Some(p) = &self.dimacs {
            graph::parse_dimacs(&read_input(p)?)
        } else if let Some(p) = &self.json {
            Graph::from_json(&String::from_utf8_lossy(&read_input(p)?))
        } else {
            graph::named(self.graph.as_deref().expect("clap enforces one input"), seed)
        }
    }
}

fn read_input(path: &PathBuf) -> tfcolor::Result<Vec<u8>> {
    let mut buf = Vec::new();
    let res = if path.as_os_str() == "-" {
        io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        fs::read(path).map(|b| buf = b)
    };
    res.map_err(|e| Error::Parse { line: 0, msg: format!("{}: {e}", path.display()) })?;
    Ok(buf)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print graphs from a corpus spec (one graph as DIMACS, several as JSON lines).
    Gen {
        /// Corpus spec, e.g. `petersen`, `mycielski-4`, `random-n20-p0.2-x5`.
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `text` prints DIMACS for a single graph.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Count proper k-colorings.
    Count {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the chromatic polynomial.
    Poly {
        #[command(flatten)]
        input: GraphInput,
        /// Also evaluate at this k.
        #[arg(long)]
        at: Option<i64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Draw uniform k-colorings, or measure available-color lists around a vertex.
    Sample {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report the exact probability of each drawn coloring.
        #[arg(long)]
        traced: bool,
        /// Measure list sizes around this vertex instead of printing colorings.
        #[arg(long)]
        measure: Option<usize>,
        /// With --measure: enumerate all colorings of G - v.
        #[arg(long, requires = "measure")]
        exact: bool,
        /// With --measure: use independent Glauber chains of this many steps.
        #[arg(long, requires = "measure", conflicts_with = "exact")]
        glauber_steps: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact |C(G)| / |C(G - v)| per vertex.
    Ratio {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        k: u32,
        /// Only this vertex.
        #[arg(long)]
        vertex: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Uncovered-color statistics for lists of colors.
    Coupon {
        /// JSON `{"k": .., "lists": [[..], ..]}` file.
        #[arg(long, conflicts_with_all = ["lists", "k"])]
        instance: Option<PathBuf>,
        /// Lists as `1,2;2,3`.
        #[arg(long, requires = "k")]
        lists: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        /// Lists of size at most t are conditioned on.
        #[arg(long, default_value_t = 0)]
        t: u32,
        /// Colors already drawn by the small lists, `1,3`.
        #[arg(long, value_delimiter = ',')]
        b: Vec<u32>,
        /// Also evaluate the reordered product against (1 - 1/t)^(tΔ).
        #[arg(long)]
        delta: Option<u64>,
        /// Also enumerate the exact distribution of the uncovered count.
        #[arg(long)]
        enumerate: bool,
        /// Also estimate by this many Monte Carlo draws.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the closed-form lower bound on uncovered colors at degree Δ.
    Bound {
        #[arg(long)]
        delta: u64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        /// Defaults to max(2, ⌈√ln Δ⌉).
        #[arg(long)]
        t: Option<u32>,
        #[arg(long, default_value_t = 0)]
        b: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run every check over a corpus and write one report per (check, graph, k).
    Verify {
        /// Comma-separated families: all-n<N>, mycielski-<d>, random-n<N>-p<P>-x<count>, graph names.
        #[arg(long)]
        corpus: String,
        /// Palette sizes.
        #[arg(long, value_delimiter = ',', required_unless_present = "eps", conflicts_with = "eps")]
        k: Vec<u32>,
        /// Derive k = ⌈(1+ε)Δ/ln Δ⌉ from each graph.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Colorings of G - v - N(v) tried per vertex by the factorization check.
        #[arg(long, default_value_t = 4, conflicts_with = "all_c0")]
        max_c0: usize,
        /// Try every coloring of G - v - N(v).
        #[arg(long)]
        all_c0: bool,
        /// Threshold for the per-vertex ratio observation; defaults to ln²Δ.
        #[arg(long)]
        ell: Option<f64>,
        /// Small-list threshold for the coupon checks.
        #[arg(long)]
        t: Option<u32>,
        /// `text` is treated as `json`.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Theorem(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Theorem(n)) => {
            eprintln!("error: {n} theorem-typed check(s) failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e @ Error::ResourceGuard(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let budget = cli.budget.budget()?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let result = dispatch(&cli.command, budget, out.as_mut());
    out.flush()?;
    result
}

fn record(pairs: Vec<(&str, Value)>) -> Record {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn text(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

fn dispatch(cmd: &Command, budget: Budget, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Gen { spec, seed, format } => {
            let graphs = spec.parse::<CorpusSpec>()?.graphs(*seed)?;
            if *format == Format::Text && graphs.len() == 1 {
                write!(out, "{}", graphs[0].to_dimacs(&format!("{spec} seed {seed}")))?;
            } else {
                let records = graphs
                    .iter()
                    .map(|g| serde_json::to_value(g).map(|v| v.as_object().cloned().expect("object")))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(Error::from)?;
                emit(out, if *format == Format::Csv { Format::Csv } else { Format::Json }, records)?;
            }
        }
        Command::Count { input, k, seed, format } => {
            let g = input.load(*seed)?;
            let count = Counter::new(budget).count_colorings(&g, *k)?;
            emit(out, *format, vec![record(vec![("count", text(count))])])?;
        }
        Command::Poly { input, at, seed, format } => {
            let g = input.load(*seed)?;
            let poly = Counter::new(budget).chromatic_polynomial(&g)?;
            let mut r = record(vec![("polynomial", text(&poly))]);
            if *format != Format::Text {
                let coeffs: Vec<Value> = poly.coeffs().iter().map(text).collect();
                r.insert("coefficients".into(), Value::Array(coeffs));
            }
            if let Some(x) = at {
                r.insert("value".into(), text(poly.eval(*x)));
                r.insert("at".into(), json!(x));
            }
            emit(out, *format, vec![r])?;
        }
        Command::Sample { input, k, samples, seed, traced, measure, exact, glauber_steps, format } => {
            let g = input.load(*seed)?;
            if let Some(v) = measure {
                let mode = if *exact {
                    MeasureMode::Exact
                } else {
                    MeasureMode::Sampled { samples: *samples, seed: *seed, glauber_steps: *glauber_steps }
                };
                let stats = sampling::measure_neighborhood(&mut Counter::new(budget), &g, *v, *k, mode)?;
                let mut r = serde_json::to_value(&stats).map_err(Error::from)?.as_object().cloned().expect("object");
                r.insert("v".into(), json!(v));
                r.insert("k".into(), json!(k));
                emit(out, *format, vec![r])?;
                return Ok(());
            }
            if *samples == 0 {
                return Err(Error::NoSamples.into());
            }
            let mut sampler = UniformSampler::new(&g, *k, budget)?;
            let mut rng = rng::from_seed(*seed);
            let mut records = Vec::new();
            for _ in 0..*samples {
                let (c, p) = sampler.sample_traced(&mut rng)?;
                let colors = c.to_total().expect("sampler returns total colorings");
                let mut r = record(vec![("coloring", json!(colors))]);
                if *traced {
                    r.insert("probability".into(), text(p));
                }
                records.push(r);
            }
            emit(out, *format, records)?;
        }
        Command::Ratio { input, k, vertex, seed, format } => {
            let g = input.load(*seed)?;
            let mut counter = Counter::new(budget);
            let total = counter.count_colorings(&g, *k as u64)?;
            let vertices: Vec<usize> = match vertex {
                Some(v) => {
                    g.check_vertex(*v)?;
                    vec![*v]
                }
                None => (0..g.n()).collect(),
            };
            let mut records = Vec::new();
            for v in vertices {
                let (gv, _) = g.delete_vertex(v)?;
                let sub = counter.count_colorings(&gv, *k as u64)?;
                let mut r = record(vec![
                    ("v", json!(v)),
                    ("count", text(&total)),
                    ("count_without_v", text(&sub)),
                ]);
                if !sub.is_zero() {
                    let ratio = tfcolor::ExactRatio::from_counts(&total, &sub)?;
                    r.insert("ratio_approx".into(), round6(ratio.to_f64()));
                    r.insert("ratio".into(), text(ratio));
                }
                records.push(r);
            }
            emit(out, *format, records)?;
        }
        Command::Coupon { instance, lists, k, t, b, delta, enumerate, samples, seed, format } => {
            let inst = match (instance, lists) {
                (Some(p), _) => {
                    let bytes = read_input(p)?;
                    serde_json::from_slice::<CouponInstance>(&bytes).map_err(Error::from)?
                }
                (None, Some(l)) => CouponInstance::new(k.expect("clap requires k"), parse_lists(l)?)?,
                (None, None) => {
                    return Err(Error::InvalidParameter("give --instance or --lists with --k".into()).into())
                }
            };
            let params = BoundParams::new(*t, b.iter().copied());
            let mut r = record(vec![
                ("k", json!(inst.k())),
                ("d", json!(inst.d())),
                ("t", json!(t)),
                ("b", json!(params.b)),
            ]);
            let unconditioned = coupon::exact_uncovered_expectation(&inst, &BoundParams::unconditioned())?;
            r.insert("mean".into(), text(&unconditioned));
            r.insert("variance".into(), text(coupon::uncovered_variance(&inst)));
            r.insert("conditional_mean".into(), text(coupon::exact_uncovered_expectation(&inst, &params)?));
            if params.b.len() < inst.k() as usize {
                let am = coupon::amgm_lower_bound(&inst, &params)?;
                r.insert("amgm_bound".into(), round6(am.value));
                r.insert("amgm_holds".into(), json!(am.holds));
            }
            if let Some(d) = delta {
                let re = coupon::reordering_lower_bound(&inst, &params, *d)?;
                r.insert("reordered_product".into(), text(&re.lhs));
                r.insert("reordered_bound".into(), text(&re.rhs));
                r.insert("reordering_holds".into(), json!(re.holds && re.equals_inner_product));
            }
            if *enumerate {
                let dist = coupon::enumerate_uncovered(&inst, budget.max_outcomes)?;
                let pmf: serde_json::Map<String, Value> =
                    dist.pmf.iter().map(|(s, p)| (s.to_string(), text(p))).collect();
                r.insert("outcomes".into(), json!(dist.outcomes));
                r.insert("pmf".into(), Value::Object(pmf));
            }
            if let Some(s) = samples {
                let mc = coupon::monte_carlo_uncovered(&inst, *s, *seed)?;
                r.insert("mc_mean".into(), round6(mc.mean));
                r.insert("mc_variance".into(), round6(mc.variance));
                r.insert("mc_std_error".into(), round6(mc.std_error));
            }
            emit(out, *format, vec![r])?;
        }
        Command::Bound { delta, eps, t, b, format } => {
            let t = t.unwrap_or_else(|| coupon::default_t(*delta));
            let fb = coupon::final_bound(*delta, *eps, t, *b)?;
            let r = record(vec![
                ("delta", json!(fb.delta)),
                ("eps", round6(fb.eps)),
                ("t", json!(fb.t)),
                ("b", json!(fb.b)),
                ("k", json!(fb.k)),
                ("bound", round6(fb.value)),
                ("ell", round6(fb.ell)),
                ("ratio", round6(fb.ratio)),
            ]);
            emit(out, *format, vec![r])?;
        }
        Command::Verify { corpus, k, eps, seed, max_c0, all_c0, ell, t, format } => {
            let spec: CorpusSpec = corpus.parse()?;
            let policy = match eps {
                Some(e) => KPolicy::DegreeDerived { eps: *e },
                None => KPolicy::Fixed(k.clone()),
            };
            let cfg = SuiteConfig {
                seed: *seed,
                budget,
                max_c0: (!all_c0).then_some(*max_c0),
                ell: *ell,
                t: *t,
                ..SuiteConfig::default()
            };
            let reports = verify::run_suite(&spec, &policy, &cfg)?;
            write_reports(out, *format, &reports)?;
            summarize(&reports);
            let failures = reports.iter().filter(|r| r.is_failure()).count();
            if failures > 0 {
                return Err(Failure::Theorem(failures));
            }
        }
    }
    Ok(())
}

fn parse_lists(s: &str) -> tfcolor::Result<Vec<Vec<u32>>> {
    s.split(';')
        .map(|list| {
            list.split(',')
                .map(|c| {
                    c.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad color {c:?} in --lists")))
                })
                .collect()
        })
        .collect()
}

fn write_reports(out: &mut dyn Write, format: Format, reports: &[VerificationReport]) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(VerificationReport::CSV_HEADER)?;
            for r in reports {
                w.write_record(r.csv_row())?;
            }
            w.flush()
        }
        Format::Json | Format::Text => {
            for r in reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serializes"))?;
            }
            Ok(())
        }
    }
}

fn summarize(reports: &[VerificationReport]) {
    let mut tally: std::collections::BTreeMap<(&str, String), usize> = Default::default();
    for r in reports {
        *tally.entry((r.check.as_str(), r.status.to_string())).or_default() += 1;
    }
    for ((check, status), n) in tally {
        eprintln!("{check:<28} {status:<20} {n}");
    }
}
