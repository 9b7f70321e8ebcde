use clap::{Args, ValueEnum};
use npim::instance::{write_gset, GraphFamily, GraphProblem, InstanceDocument, InstanceSource, SkCouplings};

use super::Globals;
use crate::config;
use crate::error::{CliError, CliResult, RuntimeContext};
use crate::manifest::Outputs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Sk,
    Random,
    RandomPm,
    Toroidal,
    Ba,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Gset,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Instance family; omit to read an instance source from --config.
    #[arg(value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Edge density of random graphs.
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Edges per new vertex of Barabási–Albert graphs.
    #[arg(long)]
    pub m: Option<usize>,
    /// Use ±1 SK couplings instead of Gaussian ones.
    #[arg(long)]
    pub bernoulli: bool,
    #[arg(long, value_enum, default_value = "maxcut")]
    pub problem: Problem,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Maxcut,
    Mis,
    Clique,
}

fn missing(flag: &str) -> CliError {
    CliError::Config(format!("missing --{flag}"))
}

fn source(args: &GenerateArgs, g: &Globals) -> CliResult<InstanceSource> {
    let Some(family) = args.family else {
        let path = config::require(g.config_path(), "generate without a family")?;
        return Ok(config::load::<InstanceSource>(&path)?.value);
    };
    let problem = match args.problem {
        Problem::Maxcut => GraphProblem::Maxcut,
        Problem::Mis => GraphProblem::Mis,
        Problem::Clique => GraphProblem::Clique,
    };
    let count = args.count;
    let graph = |graph: GraphFamily, n: usize| InstanceSource::Graph { n, count, graph, problem };
    Ok(match family {
        Family::Sk => InstanceSource::Sk {
            n: args.n.ok_or_else(|| missing("n"))?,
            count,
            couplings: if args.bernoulli { SkCouplings::Bernoulli } else { SkCouplings::Gaussian },
        },
        Family::Random => graph(
            GraphFamily::RandomUnweighted { density: args.density.ok_or_else(|| missing("density"))? },
            args.n.ok_or_else(|| missing("n"))?,
        ),
        Family::RandomPm => graph(
            GraphFamily::RandomPm { density: args.density.ok_or_else(|| missing("density"))? },
            args.n.ok_or_else(|| missing("n"))?,
        ),
        Family::Toroidal => {
            let rows = args.rows.ok_or_else(|| missing("rows"))?;
            let cols = args.cols.ok_or_else(|| missing("cols"))?;
            graph(GraphFamily::ToroidalPm { rows, cols }, args.n.unwrap_or(rows * cols))
        }
        Family::Ba => {
            graph(GraphFamily::Ba { m: args.m.ok_or_else(|| missing("m"))? }, args.n.ok_or_else(|| missing("n"))?)
        }
    })
}

/// Writes `count` instances as `<family>-<index>.json` (or `.txt` for G-set).
pub fn run(args: &GenerateArgs, g: &Globals) -> CliResult<()> {
    let src = source(args, g)?;
    if src.is_empty() {
        return Err(CliError::Config("count must be >= 1".into()));
    }
    if matches!(src, InstanceSource::Files { .. }) {
        return Err(CliError::Config("generate needs an sk or graph source".into()));
    }
    if args.format == Format::Gset && !matches!(src, InstanceSource::Graph { problem: GraphProblem::Maxcut, .. }) {
        return Err(CliError::Config("G-set output is only defined for max-cut graphs".into()));
    }
    let seed = g.seed.unwrap_or(0);
    let family = src.family();
    let instances = src.load(seed).map_err(|e| CliError::Config(e.to_string()))?;
    let mut out = Outputs::new(&g.out)?;
    for (k, inst) in instances.iter().enumerate() {
        match args.format {
            Format::Json => {
                let doc = InstanceDocument::from_instance(&inst.ising, inst.kind);
                out.write(format!("{family}-{k:04}.json"), doc.to_json() + "\n")?;
            }
            Format::Gset => {
                let graph = inst.graph.as_ref().ok_or_else(|| CliError::Runtime("graph missing".into()))?;
                out.write(format!("{family}-{k:04}.txt"), write_gset(graph))?;
            }
        }
    }
    eprintln!("wrote {} {family} instances to {}", instances.len(), out.root().display());
    out.finish("generate", g.config_path(), seed).runtime().map(|_| ())?;
    Ok(())
}
