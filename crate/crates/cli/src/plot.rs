//! `mfc plot`: SVG scatter of a 2-d dataset with its cover balls.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use mfc_core::{CoverSolution, LabeledDataset, Norm};
use serde::{Deserialize, Serialize};

use crate::{load_cover, load_dataset, to_value, CliError, CliResult, CommandResult, Outcome};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const PAD: f64 = 20.0;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PlotArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    /// SVG file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Width of the drawing area in pixels.
    #[arg(long, default_value_t = 600.0)]
    pub width: f64,
    /// Report path; defaults to `<out>.report.json`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlotResults {
    pub out: PathBuf,
    pub points: usize,
    pub balls: usize,
    pub eta: f64,
    pub norm: Norm,
}

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        PAD + (v - self.min_x) * self.scale
    }

    fn y(&self, v: f64) -> f64 {
        PAD + (self.max_y - v) * self.scale
    }
}

/// Render `sol` over `ds`. Balls carry `class="ball"` and are circles,
/// squares or diamonds for `l_2`, `l_inf` and `l_1`.
pub fn render(ds: &LabeledDataset, sol: &CoverSolution, width: f64) -> CliResult<String> {
    if ds.dim() != 2 {
        return Err(CliError::Input(format!(
            "plot needs 2-d data, got dimension {}",
            ds.dim()
        )));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(CliError::Input("--width must be positive".into()));
    }
    if let Some(&bad) = sol.selected.iter().find(|&&s| s >= ds.len()) {
        return Err(CliError::Input(format!(
            "cover selects index {bad} beyond the dataset"
        )));
    }
    let eta = sol.eta;
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in ds.points().iter() {
        min_x = min_x.min(p[0] - eta);
        max_x = max_x.max(p[0] + eta);
        min_y = min_y.min(p[1] - eta);
        max_y = max_y.max(p[1] + eta);
    }
    let span = (max_x - min_x).max(max_y - min_y);
    let span = if span > 0.0 { span } else { 1.0 };
    let frame = Frame {
        min_x,
        max_y,
        scale: width / span,
    };
    let w = 2.0 * PAD + (max_x - min_x) * frame.scale;
    let h = 2.0 * PAD + (max_y - min_y) * frame.scale;
    let r = eta * frame.scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g fill-opacity=\"0.12\" stroke-width=\"1\">\n");
    for &s in &sol.selected {
        let p = ds.points().point(s);
        let (cx, cy) = (frame.x(p[0]), frame.y(p[1]));
        let color = PALETTE[ds.label(s) % PALETTE.len()];
        let _ = match sol.norm {
            Norm::L2 => writeln!(
                svg,
                r#"<circle class="ball" cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="{color}" stroke="{color}"/>"#
            ),
            Norm::LInf => writeln!(
                svg,
                r#"<rect class="ball" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}" stroke="{color}"/>"#,
                cx - r,
                cy - r,
                2.0 * r,
                2.0 * r
            ),
            Norm::L1 => writeln!(
                svg,
                r#"<polygon class="ball" points="{:.3},{cy:.3} {cx:.3},{:.3} {:.3},{cy:.3} {cx:.3},{:.3}" fill="{color}" stroke="{color}"/>"#,
                cx - r,
                cy - r,
                cx + r,
                cy + r
            ),
        };
    }
    svg.push_str("</g>\n<g>\n");
    for (i, p) in ds.points().iter().enumerate() {
        let color = PALETTE[ds.label(i) % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{:.3}" cy="{:.3}" r="2.5" fill="{color}"/>"#,
            frame.x(p[0]),
            frame.y(p[1])
        );
    }
    for &s in &sol.selected {
        let p = ds.points().point(s);
        let _ = writeln!(
            svg,
            r#"<circle class="center" cx="{:.3}" cy="{:.3}" r="4.5" fill="none" stroke="black" stroke-width="1.5"/>"#,
            frame.x(p[0]),
            frame.y(p[1])
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

pub(crate) fn run(args: &PlotArgs) -> CommandResult {
    let ds = load_dataset(&args.dataset)?;
    let sol = load_cover(&args.cover)?;
    let svg = render(&ds, &sol, args.width)?;
    std::fs::write(&args.out, svg)?;
    let results = PlotResults {
        out: args.out.clone(),
        points: ds.len(),
        balls: sol.len(),
        eta: sol.eta,
        norm: sol.norm,
    };
    Ok(Outcome {
        results: to_value(&results),
        seeds: Vec::new(),
    })
}
