//! `mfc gen-data`.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use mfc_core::synthetic::{gen_blobs, gen_tradeoff, uniform_2d_dataset, BlobSpec, TradeoffDistSpec};
use mfc_core::Norm;
use serde::{Deserialize, Serialize};

use crate::{to_value, CliError, CliResult, CommandResult, Outcome};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[command(subcommand)]
    pub generator: Generator,
}

impl GenArgs {
    pub fn common(&self) -> &Common {
        match &self.generator {
            Generator::Tradeoff(a) => &a.common,
            Generator::Blobs(a) => &a.common,
            Generator::Uniform2d(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset file to write (CSV, or binary when the name ends in `.bin`).
    #[arg(long)]
    pub out: PathBuf,
    /// Report path; defaults to `<out>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Binary task where clean accuracy and robust accuracy pull apart.
    Tradeoff(TradeoffArgs),
    /// Truncated Gaussian blobs, one class per center.
    Blobs(BlobArgs),
    /// Uniform points on the unit square, one class.
    #[command(name = "uniform2d")]
    Uniform2d(UniformArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TradeoffArgs {
    /// Probability that the first feature agrees with the label.
    #[arg(long, default_value_t = 0.8)]
    pub p: f64,
    /// Number of uniform features; the dimension is `n + 1`.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BlobArgs {
    /// Centers as `x,y;x,y;...`.
    #[arg(long, default_value = "0,0;10,0")]
    pub centers: String,
    /// Samples farther than this from their center are redrawn.
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 50)]
    pub samples_per_class: usize,
    /// Extra gap the centers must leave beyond twice the spread.
    #[arg(long, default_value_t = 0.0)]
    pub margin: f64,
    #[arg(long, default_value = "l2")]
    pub norm: Norm,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct UniformArgs {
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[command(flatten)]
    pub common: Common,
}

fn parse_centers(text: &str) -> CliResult<Vec<Vec<f64>>> {
    text.split(';')
        .map(|c| {
            c.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Input(format!("bad center coordinate `{v}`")))
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenResults {
    pub generator: String,
    pub out: PathBuf,
    pub n_points: usize,
    pub dim: usize,
    pub class_sizes: Vec<usize>,
}

pub(crate) fn run(args: &GenArgs) -> CommandResult {
    let common = args.common();
    let (name, ds) = match &args.generator {
        Generator::Tradeoff(a) => {
            let spec = TradeoffDistSpec {
                p: a.p,
                n: a.n,
                samples: a.samples,
                seed: common.seed,
            };
            ("tradeoff", gen_tradeoff(&spec)?)
        }
        Generator::Blobs(a) => {
            let spec = BlobSpec {
                centers: parse_centers(&a.centers)?,
                spread: a.spread,
                sigma: a.sigma,
                samples_per_class: a.samples_per_class,
                margin: a.margin,
                norm: a.norm,
                seed: common.seed,
            };
            ("blobs", gen_blobs(&spec)?)
        }
        Generator::Uniform2d(a) => ("uniform2d", uniform_2d_dataset(a.count, common.seed)?),
    };
    mfc_core::io::write_dataset(&common.out, &ds)?;
    let results = GenResults {
        generator: name.into(),
        out: common.out.clone(),
        n_points: ds.len(),
        dim: ds.dim(),
        class_sizes: (0..ds.num_classes()).map(|c| ds.class_indices(c).len()).collect(),
    };
    Ok(Outcome {
        results: to_value(&results),
        seeds: vec![common.seed],
    })
}
