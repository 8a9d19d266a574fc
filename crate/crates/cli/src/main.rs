use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hypfull::graph::{canonical_spiral, enumerate_isomers, write_planar_code, FullereneGraph};
use hypfull::indices::IndexVector;
use hypfull::pipeline::{
    descriptor_table, emit_descriptors, read_graphs, write_table1, Pipeline, PipelineError, RunConfig,
};
use hypfull::realize::RealizeError;
use hypfull::stats::{self, DescriptorTable, StatsError};
use hypfull::volume::VolumeError;

#[derive(Parser)]
#[command(name = "hypfull", version, about = "Hyperbolic volumes and topological indices of fullerenes")]
struct Cli {
    /// JSON run configuration; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Results cache directory (overrides HYPFULL_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Repeat for more logging.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Inputs {
    /// planar_code or spiral text files.
    #[arg(long = "in")]
    inputs: Vec<PathBuf>,
    /// Generate all isomers with this many vertices instead.
    #[arg(long, conflicts_with = "inputs")]
    n: Option<usize>,
}

#[derive(Args, Default)]
struct Solver {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check graphs against the fullerene conditions.
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Enumerate isomers and write them as planar_code or spirals.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep only isomers without adjacent pentagons.
        #[arg(long)]
        ipr: bool,
        /// Write canonical spirals as text instead of planar_code.
        #[arg(long)]
        spirals: bool,
    },
    /// Topological indices as CSV.
    Indices {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Realize as right-angled polyhedra and write realization JSON files.
    Realize {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        solver: Solver,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Volumes, bounds and indices as a descriptor CSV.
    Volume {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        solver: Solver,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write realizations and scatter data here.
        #[arg(long)]
        emit_dir: Option<PathBuf>,
    },
    /// Isomer counts and extreme volumes per vertex count.
    Table1 {
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        solver: Solver,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pearson correlation matrix of descriptor columns.
    Correlate {
        #[arg(long)]
        desc: PathBuf,
        /// Extra columns joined by id, e.g. relative energies.
        #[arg(long)]
        external: Option<PathBuf>,
        /// Columns to correlate; all columns when omitted.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Volume/energy slope and correlation per Np value, as CSV.
        #[arg(long)]
        np_groups: Option<PathBuf>,
        /// Stability-criteria report as JSON (needs a relative_energy column).
        #[arg(long)]
        stability: Option<PathBuf>,
    },
    /// Least-squares fit of one column on others.
    Regress {
        #[arg(long)]
        desc: PathBuf,
        #[arg(long)]
        external: Option<PathBuf>,
        #[arg(long)]
        target: String,
        #[arg(long, value_delimiter = ',', required = true)]
        features: Vec<String>,
    },
    /// Is the minimum-volume isomer the type-(a) nanotube?
    Conjecture {
        #[arg(long, required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        solver: Solver,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

/// 1 input error, 2 convergence failure, 3 internal.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(p) = cause.downcast_ref::<PipelineError>() {
            return match p {
                _ if p.is_convergence() => 2,
                PipelineError::Volume { source: VolumeError::Realize(RealizeError::InvalidGraph(_)), .. } => 1,
                PipelineError::Volume { .. } | PipelineError::Index(_) | PipelineError::NoSpiral(_) => 3,
                _ => 1,
            };
        }
        if cause.downcast_ref::<StatsError>().is_some() || cause.downcast_ref::<io::Error>().is_some() {
            return 1;
        }
    }
    1
}

fn base_config(cli_config: Option<&Path>, cache_dir: Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = match cli_config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if cache_dir.is_some() {
        cfg.cache_dir = cache_dir;
    }
    Ok(cfg)
}

fn apply_inputs(cfg: &mut RunConfig, inputs: Inputs) {
    if let Some(n) = inputs.n {
        cfg.inputs.clear();
        cfg.n_min = n;
        cfg.n_max = n;
    } else if !inputs.inputs.is_empty() {
        cfg.inputs = inputs.inputs;
    }
}

fn apply_solver(cfg: &mut RunConfig, s: Solver) {
    if let Some(t) = s.tol {
        cfg.solver.tolerance = t;
    }
    if let Some(seed) = s.seed {
        cfg.solver.seed = seed;
    }
    if s.jobs.is_some() {
        cfg.jobs = s.jobs;
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_table(desc: &Path, external: Option<&Path>) -> Result<DescriptorTable> {
    let open = |p: &Path| fs::File::open(p).with_context(|| format!("opening {}", p.display()));
    let mut table = DescriptorTable::read_csv(open(desc)?)?;
    if let Some(ext) = external {
        table.join(&DescriptorTable::read_csv(open(ext)?)?)?;
    }
    Ok(table)
}

fn graphs_for(pipeline: &Pipeline) -> Result<Vec<FullereneGraph>> {
    let graphs = pipeline.load_graphs()?;
    log::info!("{} graphs", graphs.len());
    Ok(graphs)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = base_config(cli.config.as_deref(), cli.cache_dir)?;
    match cli.command {
        Command::Validate { inputs } => {
            if inputs.inputs.is_empty() {
                bail!("validate needs at least one --in file");
            }
            let mut out = io::stdout().lock();
            let mut invalid = 0;
            for path in &inputs.inputs {
                for g in read_graphs(path)? {
                    let report = g.validate();
                    if !report.is_valid() {
                        invalid += 1;
                    }
                    writeln!(out, "{report}")?;
                }
            }
            if invalid > 0 {
                bail!("{invalid} graph(s) failed validation");
            }
        }
        Command::Gen { n, out, ipr, spirals } => {
            let mut graphs = enumerate_isomers(n, None).map_err(PipelineError::from)?;
            if ipr {
                graphs.retain(|g| IndexVector::compute(g).map(|iv| iv.np == 0).unwrap_or(false));
            }
            let mut w = output(out.as_deref())?;
            if spirals {
                for g in &graphs {
                    let s = canonical_spiral(g).ok_or_else(|| PipelineError::NoSpiral(g.id().into()))?;
                    writeln!(w, "{s}")?;
                }
            } else {
                w.write_all(&write_planar_code(&graphs))?;
            }
            w.flush()?;
            log::info!("wrote {} isomers", graphs.len());
        }
        Command::Indices { inputs, out } => {
            apply_inputs(&mut cfg, inputs);
            let pipeline = Pipeline::new(cfg)?;
            let mut names = vec!["N".to_string()];
            names.extend(hypfull::pipeline::INDEX_COLUMNS.iter().map(|s| s.to_string()));
            names.extend((0..6).map(|k| format!("p{k}")));
            names.extend((0..7).map(|k| format!("h{k}")));
            names.extend(["wiener_complexity".to_string(), "independence_lower_bound".to_string()]);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let mut table = DescriptorTable::new(&refs);
            for g in graphs_for(&pipeline)? {
                let iv = IndexVector::compute(&g).map_err(PipelineError::from)?;
                let mut row: Vec<Option<f64>> = [iv.n_vertices as u64, iv.wiener, iv.hyper_wiener, iv.w5]
                    .iter()
                    .map(|&v| Some(v as f64))
                    .collect();
                row.extend([iv.np, iv.h5, iv.h6].iter().map(|&v| Some(v as f64)));
                row.extend(iv.p_signature.iter().map(|&c| Some(c as f64)));
                row.extend(iv.h_signature.iter().map(|&c| Some(c as f64)));
                row.push(Some(iv.wiener_complexity as f64));
                row.push(Some(iv.independence_lower_bound));
                table.push(g.id(), &row)?;
            }
            table.write_csv(output(out.as_deref())?)?;
        }
        Command::Realize { inputs, solver, out_dir } => {
            apply_inputs(&mut cfg, inputs);
            apply_solver(&mut cfg, solver);
            let pipeline = Pipeline::new(cfg)?;
            let records = pipeline.analyze_all(&graphs_for(&pipeline)?)?;
            emit_descriptors(&records, &out_dir)?;
            log::info!("{:?}", pipeline.stats());
        }
        Command::Volume { inputs, solver, out, emit_dir } => {
            apply_inputs(&mut cfg, inputs);
            apply_solver(&mut cfg, solver);
            if emit_dir.is_some() {
                cfg.output_dir = emit_dir;
            }
            let pipeline = Pipeline::new(cfg)?;
            let records = pipeline.analyze_all(&graphs_for(&pipeline)?)?;
            descriptor_table(&records).write_csv(output(out.as_deref())?)?;
            if let Some(dir) = &pipeline.config().output_dir {
                emit_descriptors(&records, dir)?;
            }
            log::info!("{:?}", pipeline.stats());
        }
        Command::Table1 { n_min, n_max, solver, precision, out } => {
            cfg.inputs.clear();
            cfg.n_min = n_min.unwrap_or(cfg.n_min);
            cfg.n_max = n_max.unwrap_or(cfg.n_max);
            cfg.precision = precision.unwrap_or(cfg.precision);
            apply_solver(&mut cfg, solver);
            let pipeline = Pipeline::new(cfg)?;
            let rows = pipeline.run_table1()?;
            write_table1(output(out.as_deref())?, &rows, pipeline.config().precision)?;
            log::info!("{:?}", pipeline.stats());
        }
        Command::Correlate { desc, external, columns, out, np_groups, stability } => {
            let table = load_table(&desc, external.as_deref())?;
            let names: Vec<&str> = if columns.is_empty() {
                table.names().iter().map(String::as_str).collect()
            } else {
                columns.iter().map(String::as_str).collect()
            };
            let m = stats::pcc_matrix(&table, &names)?;
            stats::write_pcc_matrix(output(out.as_deref())?, &names, &m)?;
            if np_groups.is_some() || stability.is_some() {
                let report = stats::stability_criteria_check(&table)?;
                if let Some(path) = np_groups {
                    let mut w = output(Some(&path))?;
                    writeln!(w, "Np,count,slope,pcc")?;
                    let f = |v: Option<f64>| v.map(stats::format_value).unwrap_or_default();
                    for g in &report.np_groups {
                        writeln!(w, "{},{},{},{}", g.np, g.count, f(g.slope), f(g.pcc))?;
                    }
                    w.flush()?;
                }
                if let Some(path) = stability {
                    let mut w = output(Some(&path))?;
                    writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?;
                    w.flush()?;
                }
            }
        }
        Command::Regress { desc, external, target, features } => {
            let table = load_table(&desc, external.as_deref())?;
            let refs: Vec<&str> = features.iter().map(String::as_str).collect();
            let model = stats::ols_fit(&table, &target, &refs)?;
            writeln!(io::stdout(), "{}", serde_json::to_string_pretty(&model)?)?;
        }
        Command::Conjecture { n, solver } => {
            apply_solver(&mut cfg, solver);
            cfg.inputs.clear();
            cfg.n_min = n.iter().copied().min().unwrap_or(cfg.n_min);
            cfg.n_max = n.iter().copied().max().unwrap_or(cfg.n_max);
            let pipeline = Pipeline::new(cfg)?;
            for n in n {
                let report = pipeline.check_conjecture_a(n)?;
                writeln!(io::stdout(), "{}", serde_json::to_string(&report)?)?;
            }
        }
    }
    Ok(())
}
