//! Command-line front end. [`run`] returns the process exit code: 0 on
//! success, 1 when a verification fails, 2 on bad input.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certificate::{blowup_to_bandwidth, verify_certificate, FanCertificate};
use crate::decomposition::minfill_decomposition;
use crate::embedding::{build_embedding, EmbeddingParams};
use crate::error::{Error, Result};
use crate::graph::{bfs_layering, check_vertex_set, Graph};
use crate::io::{parse_drawn_graph, parse_graph, parse_product, parse_vertex_list};
use crate::oracles::{exact_bandwidth, exhaustive_local_density};
use crate::pipeline::{
    gk_reduce, kplanar_reduce, planar_pipeline, product_pipeline, PipelineOptions, PipelineResult,
};
use crate::product::ProductInstance;
use crate::sparsifier::{baker_sparsify, product_sparsify, BakerConfig};
use crate::star_metric::StarMetric;

#[derive(Parser, Debug)]
#[command(name = "fanbw", version, about = "Fan-blowup bandwidth tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Certified,
    Exploratory,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Plain graph file (layered planar pipeline).
    #[arg(long, conflicts_with = "product")]
    graph: Option<PathBuf>,
    /// Product document (product pipeline).
    #[arg(long)]
    product: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct Run {
    #[arg(long = "D")]
    d: f64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 193.0)]
    a: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long = "dims-cap")]
    dims_cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Certified)]
    mode: Mode,
}

impl Run {
    fn options(&self) -> Result<PipelineOptions> {
        if self.mode == Mode::Certified && self.dims_cap.is_some() {
            return Err(Error::Input(
                "--dims-cap requires --mode exploratory".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::Input("--restarts must be positive".into()));
        }
        Ok(PipelineOptions {
            k: self.k,
            a: self.a,
            seed: self.seed,
            restarts: self.restarts,
            dims_cap: self.dims_cap,
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the sparsifier X and a density report.
    Sparsify {
        #[command(flatten)]
        input: Input,
        #[arg(long = "D")]
        d: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the embedding of G - X (product input).
    Embed {
        #[arg(long)]
        product: PathBuf,
        #[command(flatten)]
        run: Run,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a pipeline and write X and the ordering of G - X.
    Order {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: Run,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a pipeline and write a fan certificate.
    Certify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: Run,
        /// Blowup factor; defaults to max(1, |X|, bw).
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against its graph.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Crossing reduction for drawn k-planar graphs.
    ReduceKplanar {
        #[arg(long)]
        drawn: PathBuf,
        #[arg(long)]
        kplanar: usize,
        #[command(flatten)]
        run: Run,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (g, k)-planar reduction with an externally supplied planarizing set.
    ReduceGk {
        #[arg(long)]
        drawn: PathBuf,
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        kplanar: usize,
        /// Vertex ids of the augmented graph (dummy of crossing c is n + c).
        #[arg(long)]
        planarizer: Option<PathBuf>,
        #[command(flatten)]
        run: Run,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force ground truth on small graphs.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        what: OracleKind,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Bandwidth,
    Density,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Input(format!("{}:{line}: {msg}", path.display())),
        other => other,
    })
}

/// Writes through a temporary sibling and a rename.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Input(format!("cannot write {}: {e}", path.display()));
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input("output path has no file name".into()))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn emit(out: &Option<PathBuf>, contents: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|e| Error::Input(format!("stdout: {e}"))),
    }
}

enum Loaded {
    Plain(Graph),
    Product(ProductInstance),
}

impl Loaded {
    fn graph(&self) -> &Graph {
        match self {
            Loaded::Plain(g) => g,
            Loaded::Product(p) => &p.g,
        }
    }
}

fn load(input: &Input) -> Result<Loaded> {
    match (&input.graph, &input.product) {
        (Some(p), None) => Ok(Loaded::Plain(with_path(p, parse_graph(&read(p)?))?)),
        (None, Some(p)) => Ok(Loaded::Product(with_path(p, parse_product(&read(p)?))?)),
        _ => Err(Error::Input(
            "give exactly one of --graph or --product".into(),
        )),
    }
}

fn ids(v: &[usize]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_pipeline(loaded: &Loaded, run: &Run) -> Result<PipelineResult> {
    let opts = run.options()?;
    match loaded {
        Loaded::Plain(g) => Ok(planar_pipeline(g, run.d, &opts)?.result),
        Loaded::Product(p) => Ok(product_pipeline(p, run.d, &opts)?.result),
    }
}

fn ordering_doc(res: &PipelineResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "x {}", ids(&res.x));
    let _ = writeln!(s, "ordering {}", ids(res.ordering.as_slice()));
    let _ = writeln!(s, "bandwidth {}", res.bandwidth);
    let _ = writeln!(s, "median_restart_bandwidth {}", res.median_bandwidth());
    let _ = writeln!(s, "row_order_bandwidth {}", res.row_order_bandwidth);
    let _ = writeln!(s, "certified {}", res.certified);
    s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}

fn params(run: &Run, n: usize) -> Vec<(String, String)> {
    let k = run
        .k
        .unwrap_or_else(|| (crate::graph::ceil_log2(n) as usize).max(2));
    let mut p = vec![
        ("D".to_string(), run.d.to_string()),
        ("k".to_string(), k.to_string()),
        ("a".to_string(), run.a.to_string()),
        ("restarts".to_string(), run.restarts.to_string()),
        ("mode".to_string(), format!("{:?}", run.mode).to_lowercase()),
    ];
    if let Some(c) = run.dims_cap {
        p.push(("dims_cap".to_string(), c.to_string()));
    }
    p
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    let mut report = String::new();
    let code = match cmd {
        Command::Sparsify {
            input,
            d,
            seed: _,
            out,
        } => {
            let loaded = load(&input)?;
            let g = loaded.graph();
            let x = match &loaded {
                Loaded::Plain(g) => {
                    if g.vertex_count() == 0 {
                        return Err(Error::Input("empty graph".into()));
                    }
                    let cfg = BakerConfig {
                        t: 3,
                        d,
                        layering: bfs_layering(g, 0)?,
                    };
                    let res = baker_sparsify(g, &cfg)?;
                    let _ = writeln!(report, "sparsifier layered");
                    let _ = writeln!(report, "t_eff {:.6}", res.t_eff);
                    let _ = writeln!(report, "bound {:.3}", res.bound_achieved);
                    res.x
                }
                Loaded::Product(p) => {
                    let td = match &p.td {
                        Some(td) => td.clone(),
                        None => minfill_decomposition(&p.h)?,
                    };
                    let h = crate::decomposition::ttree_complete(&p.h, &td)?;
                    let sp = product_sparsify(&h, &td, &p.place, d)?;
                    let _ = writeln!(report, "sparsifier product");
                    let _ = writeln!(report, "width {}", sp.width);
                    let _ = writeln!(report, "x_product_size {}", sp.x_size());
                    let _ = writeln!(report, "bound {:.3}", sp.size_bound());
                    (0..p.n())
                        .filter(|&v| sp.contains(sp.to_internal(p.place[v])))
                        .collect()
                }
            };
            let ld = exhaustive_local_density(g, &x)?;
            let _ = writeln!(report, "n {}", g.vertex_count());
            let _ = writeln!(report, "D {d}");
            let _ = writeln!(report, "x_size {}", x.len());
            let _ = writeln!(report, "density {ld}");
            let _ = writeln!(report, "density_ok {}", crate::graph::density_le(&ld, d));
            emit(&out, &format!("{}\n", ids(&x)), stdout)?;
            0
        }
        Command::Embed { product, run, out } => {
            let p = with_path(&product, parse_product(&read(&product)?))?;
            let opts = run.options()?;
            let td = match &p.td {
                Some(td) => td.clone(),
                None => minfill_decomposition(&p.h)?,
            };
            let h = crate::decomposition::ttree_complete(&p.h, &td)?;
            let sp = product_sparsify(&h, &td, &p.place, run.d)?;
            let pts: Vec<_> = p
                .place
                .iter()
                .map(|&q| sp.to_internal(q))
                .filter(|&q| !sp.contains(q))
                .collect();
            let sm = StarMetric::new(&h, sp);
            let params = EmbeddingParams {
                k: opts.k_for(p.n()),
                a: opts.a,
                seed: opts.seed,
                dims_cap: opts.dims_cap,
            };
            let emb = build_embedding(&h, &sm, &pts, p.n(), &params)?;
            let _ = writeln!(report, "points {}", emb.points);
            let _ = writeln!(report, "dimension {}", emb.dim());
            let _ = writeln!(report, "full_dimension {}", emb.full_dim);
            let _ = writeln!(report, "certified {}", emb.certified);
            emit(&out, &emb.dump(), stdout)?;
            0
        }
        Command::Order { input, run, out } => {
            let loaded = load(&input)?;
            let res = run_pipeline(&loaded, &run)?;
            emit(&out, &ordering_doc(&res), stdout)?;
            0
        }
        Command::Certify { input, run, b, out } => {
            let loaded = load(&input)?;
            let g = loaded.graph();
            let res = run_pipeline(&loaded, &run)?;
            let mut cert = res.certificate(g, b)?;
            cert.seeds = vec![run.seed];
            cert.params = params(&run, g.vertex_count());
            let bad = verify_certificate(g, &cert);
            if let Some(v) = bad.first() {
                return Err(Error::Invariant(format!("fresh certificate fails: {v}")));
            }
            let _ = writeln!(report, "b {}", cert.b);
            let _ = writeln!(report, "x_size {}", res.x.len());
            let _ = writeln!(report, "bandwidth {}", cert.measured_bandwidth);
            emit(&out, &cert.to_text(), stdout)?;
            0
        }
        Command::Verify { input, cert } => {
            let loaded = load(&input)?;
            let g = loaded.graph();
            let c = with_path(&cert, FanCertificate::from_text(&read(&cert)?))?;
            let bad = verify_certificate(g, &c);
            if bad.is_empty() {
                let (_, _, bw) = blowup_to_bandwidth(g, &c.mapping, c.b)?;
                let _ = writeln!(report, "ok");
                let _ = writeln!(report, "blowup_bandwidth {bw} (bound {})", 2 * c.b - 1);
                0
            } else {
                for v in &bad {
                    let _ = writeln!(report, "violation: {v}");
                }
                1
            }
        }
        Command::ReduceKplanar {
            drawn,
            kplanar,
            run,
            out,
        } => {
            let dg = with_path(&drawn, parse_drawn_graph(&read(&drawn)?))?;
            let res = kplanar_reduce(&dg, kplanar, run.d, &run.options()?)?;
            let _ = writeln!(report, "x_prime_size {}", res.x_prime.len());
            let _ = writeln!(report, "max_edge_path {}", res.max_edge_path);
            emit(&out, &ordering_doc(&res.result), stdout)?;
            0
        }
        Command::ReduceGk {
            drawn,
            genus,
            kplanar,
            planarizer,
            run,
            out,
        } => {
            let dg = with_path(&drawn, parse_drawn_graph(&read(&drawn)?))?;
            let z = match &planarizer {
                Some(p) => {
                    let z = with_path(p, parse_vertex_list(&read(p)?))?;
                    check_vertex_set(dg.graph.vertex_count() + dg.crossings.len(), &z)?;
                    Some(z)
                }
                None => None,
            };
            let res = gk_reduce(&dg, genus, kplanar, run.d, z.as_deref(), &run.options()?)?;
            if let Some(r) = &res.short_circuit {
                let _ = writeln!(report, "short_circuit {r}");
            }
            let _ = writeln!(report, "x_prime_size {}", res.x_prime.len());
            emit(&out, &ordering_doc(&res.result), stdout)?;
            0
        }
        Command::Oracle { graph, what } => {
            let g = with_path(&graph, parse_graph(&read(&graph)?))?;
            match what {
                OracleKind::Bandwidth => {
                    let _ = writeln!(report, "bandwidth {}", exact_bandwidth(&g)?);
                }
                OracleKind::Density => {
                    let _ = writeln!(report, "density {}", exhaustive_local_density(&g, &[])?);
                }
            }
            0
        }
    };
    stdout
        .write_all(report.as_bytes())
        .map_err(|e| Error::Input(format!("stdout: {e}")))?;
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
