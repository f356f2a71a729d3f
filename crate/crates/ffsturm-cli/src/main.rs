use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use ffsturm::cache::Cache;
use ffsturm::drinfeld::{drinfeld_sturm, DrinfeldQuery};
use ffsturm::elliptic::{ap_table, check_isogenous, ApTable, CurveJson, CurveModel};
use ffsturm::graph::QuotientGraph;
use ffsturm::harmonic::{fourier_many, set_selfcheck};
use ffsturm::hecke::{atkin_lehner, hecke_t, space_basis, ImagePath, Space};
use ffsturm::sturm::{b_prime, bounds};
use ffsturm::tables::{compare_bounds, level_b_true, report};
use ffsturm::ttable::{t_row, TCell};
use ffsturm::{Error, Fq, Level, Poly, Rational};

#[derive(Parser)]
#[command(name = "ffsturm", version, about = "Harmonic cochains, Hecke operators and Sturm bounds over F_q(T)")]
struct Cli {
    /// Skip the harmonicity checks on constructed cochains.
    #[arg(long, global = true)]
    no_selfcheck: bool,
    /// Directory for the result cache (FFSTURM_CACHE takes precedence).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quotient graph Γ₀(n)\T as JSON.
    Graph {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        level: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Basis cochains and their Fourier coefficients up to a degree.
    Fourier {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        level: String,
        #[arg(long)]
        upto: usize,
        #[arg(long, default_value = "cuspidal")]
        space: Space,
    },
    /// Matrix of T_m (or W_m with --atkin-lehner) on a space.
    Hecke {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        level: String,
        #[arg(long)]
        m: String,
        #[arg(long, default_value = "cuspidal")]
        space: Space,
        #[arg(long)]
        atkin_lehner: bool,
        /// Accepted for compatibility; output is always JSON.
        #[arg(long)]
        json: bool,
    },
    /// All Sturm-type bounds for one level.
    Bounds {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        level: String,
        /// Also compute b_true from the quotient graph.
        #[arg(long = "true")]
        with_true: bool,
    },
    /// Rows of t(m, n) in the layout of the published tables.
    Ttable {
        #[arg(long)]
        q: u32,
        /// A single row; defaults to all rows 1..=mmax.
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 3)]
        mmax: u32,
        #[arg(long, default_value_t = 4)]
        nmin: u32,
        #[arg(long)]
        nmax: u32,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Per-cell time budget in seconds.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Degree-wise maxima of b_true and b′, or the values of one level.
    CompareBounds {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 3)]
        nmin: usize,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        level: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// One JSON document with bounds, dimensions and pairing ranks.
    Report {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        level: String,
    },
    /// Decide isogeny from two a_p tables of the same conductor.
    Isogeny {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        conductor: String,
        #[arg(long)]
        t1: PathBuf,
        #[arg(long)]
        t2: PathBuf,
    },
    /// a_p table of a curve for primes of degree ≤ maxdeg.
    Ap {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        maxdeg: usize,
    },
    /// Coefficient cutoff for Drinfeld modular forms.
    DrinfeldBound {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        level: String,
        #[arg(long)]
        k: u64,
        #[arg(long = "type")]
        m: u64,
        #[arg(long, default_value_t = 0)]
        ell: u64,
    },
}

/// Success, or partial output (some cells timed out).
enum Outcome {
    Done,
    Partial,
}

fn level(q: u32, s: &str) -> ffsturm::Result<Level> {
    Level::parse(q, s)
}

fn print_json<T: serde::Serialize>(v: &T) -> ffsturm::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> ffsturm::Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn run(cli: Cli) -> ffsturm::Result<Outcome> {
    set_selfcheck(!cli.no_selfcheck);
    let cache = Cache::from_env_or(cli.cache_dir.as_deref());
    match cli.cmd {
        Cmd::Graph { q, level: s, json } => {
            let g = QuotientGraph::build(&level(q, &s)?)?;
            let text = serde_json::to_string_pretty(&g.to_json())?;
            match json {
                Some(path) => fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
        }
        Cmd::Fourier { q, level: s, upto, space } => {
            let g = QuotientGraph::build(&level(q, &s)?)?;
            let basis = space_basis::<Rational>(&g, space)?;
            let coeffs = fourier_many(&basis, &g, upto);
            let docs: Vec<serde_json::Value> = basis
                .iter()
                .zip(&coeffs)
                .enumerate()
                .map(|(i, (f, c))| {
                    serde_json::json!({
                        "cochain": f.to_json(&g, i),
                        "fourier": c.to_json(&g, i, upto),
                    })
                })
                .collect();
            print_json(&docs)?;
        }
        Cmd::Hecke { q, level: s, m, space, atkin_lehner: al, json: _ } => {
            let l = level(q, &s)?;
            let g = QuotientGraph::build(&l)?;
            let m = Poly::parse(l.field(), &m)?;
            let basis = space_basis::<Rational>(&g, space)?;
            let op = if al {
                atkin_lehner(&g, &basis, &m, space, ImagePath::AllEdges)?
            } else {
                hecke_t(&g, &basis, &m, space, ImagePath::AllEdges)?
            };
            print_json(&op.to_json(&l))?;
        }
        Cmd::Bounds { q, level: s, with_true } => {
            let l = level(q, &s)?;
            let mut rep = bounds(&l)?;
            if with_true && l.deg() >= 3 {
                rep.b_true = Some(level_b_true(&l, &cache)?);
            }
            print_json(&rep)?;
        }
        Cmd::Ttable { q, m, mmax, nmin, nmax, jobs, timeout } => {
            Fq::new(q)?;
            if nmin > nmax {
                return Err(Error::Input(format!("nmin {nmin} exceeds nmax {nmax}")));
            }
            let rows: Vec<u32> = match m {
                Some(m) => vec![m],
                None => (1..=mmax).collect(),
            };
            let budget = timeout.map(Duration::from_secs_f64);
            let mut partial = false;
            println!("t(m,n) (q={q})");
            let header: Vec<String> = (nmin..=nmax).map(|n| format!("{n:>8}")).collect();
            println!("{:>4} |{}", "m\\n", header.join(""));
            for m in rows {
                let cells = t_row(q, m, nmin, nmax, budget, jobs)?;
                partial |= cells.iter().any(|(_, c)| *c == TCell::Timeout);
                let line: Vec<String> = cells.iter().map(|(_, c)| format!("{:>8}", c.to_string())).collect();
                println!("{m:>4} |{}", line.join(""));
            }
            if partial {
                return Ok(Outcome::Partial);
            }
        }
        Cmd::CompareBounds { q, nmin, nmax, level: single, jobs, json } => {
            if let Some(s) = single {
                let l = level(q, &s)?;
                if l.deg() < 3 {
                    println!("{}: b_true trivial (H₀ = 0), b′ {}", l.n(), b_prime(&l));
                } else {
                    let bt = level_b_true(&l, &cache)?;
                    let bp = b_prime(&l);
                    if json {
                        print_json(&serde_json::json!({"schema": ffsturm::SCHEMA, "level": l.n().to_string(), "q": q, "b_true": bt, "b_prime": bp}))?;
                    } else {
                        println!("{}: b_true {bt}, b′ {bp}", l.n());
                    }
                }
                return Ok(Outcome::Done);
            }
            let nmax = nmax.ok_or_else(|| Error::Input("--nmax is required without --level".into()))?;
            if nmin < 3 || nmin > nmax {
                return Err(Error::Input(format!("degree range {nmin}..={nmax} must start at 3 or more")));
            }
            let rows = compare_bounds(q, nmin, nmax, jobs, &cache)?;
            if json {
                print_json(&serde_json::json!({"schema": ffsturm::SCHEMA, "q": q, "rows": rows}))?;
            } else {
                println!("compare bounds (q={q})");
                println!("{:>4} {:>8} {:>8}  witness", "n", "b_true", "b'");
                for r in rows {
                    println!("{:>4} {:>8} {:>8}  {}", r.deg, r.b_true, r.b_prime, r.witness);
                }
            }
        }
        Cmd::Report { q, level: s } => print_json(&report(&level(q, &s)?)?)?,
        Cmd::Isogeny { q, conductor, t1, t2 } => {
            let l = level(q, &conductor)?;
            let a: ApTable = read_json(&t1)?;
            let b: ApTable = read_json(&t2)?;
            print_json(&check_isogenous(&a, &b, &l)?)?;
        }
        Cmd::Ap { curve, maxdeg } => {
            let c: CurveJson = read_json(&curve)?;
            print_json(&ap_table(&CurveModel::from_json(&c)?, maxdeg)?)?;
        }
        Cmd::DrinfeldBound { q, level: s, k, m, ell } => {
            let l = level(q, &s)?;
            print_json(&drinfeld_sturm(&l, DrinfeldQuery { k, m, ell })?.to_json(&l))?;
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Timeout => 2,
                Error::Invariant(_) => 4,
                Error::Input(_) | Error::Domain(_) | Error::Io(_) | Error::Json(_) => 3,
            })
        }
    }
}
