//! Figure sweeps: axes and series only; every value comes from the analytics.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use zalm_core::analytics::{
    bsm_bell_fraction, herald_prob_island, prop_bell_probs, prop_loadable_prob, quality,
    true_herald_prob, GaussianBlocks,
};
use zalm_core::HeraldMode;

use crate::CliError;

pub const FIGURE_IDS: [u8; 7] = [4, 5, 6, 7, 8, 9, 10];

const ETA_T_SERIES: [f64; 6] = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5];

/// Evenly spaced grid, endpoints included.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Cell {
    Float(f64),
    Int(u64),
}

impl Cell {
    pub fn render(self) -> String {
        match self {
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Float(x) => x,
            Cell::Int(n) => n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render())).map_err(io)?;
        }
        w.flush()
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Fixed settings and axes of one figure, kept for the metadata sidecar.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub figure: u8,
    pub file: String,
    pub columns: Vec<&'static str>,
    pub axis: Axis,
    pub series: Vec<f64>,
    pub fixed: Vec<(&'static str, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Axis {
    pub variable: &'static str,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub log10: bool,
}

impl Axis {
    fn linear(variable: &'static str, min: f64, max: f64, steps: usize) -> Self {
        Self {
            variable,
            min,
            max,
            steps,
            log10: false,
        }
    }

    fn log(variable: &'static str, min: f64, max: f64, steps: usize) -> Self {
        Self {
            variable,
            min,
            max,
            steps,
            log10: true,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }
}

fn delivered(g: f64, eta_t: f64, eta_r: f64) -> zalm_core::analytics::Quality {
    let b = GaussianBlocks::new(g, eta_t, eta_r);
    let (s, e) = prop_bell_probs(&b);
    quality(s, e, prop_loadable_prob(&b))
}

pub fn spec(figure: u8) -> Option<SweepSpec> {
    let eta_t: Vec<f64> = ETA_T_SERIES.to_vec();
    let s = match figure {
        4 => SweepSpec {
            figure,
            file: "fig4.csv".into(),
            columns: vec!["g_minus_1", "n_islands", "p_true"],
            axis: Axis::linear("g_minus_1", 0.0, 1.0, 101),
            series: (1..=8).map(|k| (2 * k) as f64).collect(),
            fixed: vec![("eta_t", 1.0)],
        },
        5 => SweepSpec {
            figure,
            file: "fig5.csv".into(),
            columns: vec!["g_minus_1", "eta_t", "fraction"],
            axis: Axis::linear("g_minus_1", 0.0, 0.1, 101),
            series: eta_t,
            fixed: vec![("eta_r", 1.0)],
        },
        6 => SweepSpec {
            figure,
            file: "fig6.csv".into(),
            columns: vec!["log10_eta_r", "eta_t", "fidelity"],
            axis: Axis::log("eta_r", -3.0, 0.0, 61),
            series: eta_t,
            fixed: vec![("g_minus_1", 0.01)],
        },
        7 => SweepSpec {
            figure,
            file: "fig7.csv".into(),
            columns: vec!["g_minus_1", "eta_t", "fidelity"],
            axis: Axis::linear("g_minus_1", 0.0, 0.05, 101),
            series: eta_t,
            fixed: vec![("eta_r", 0.01)],
        },
        8 => SweepSpec {
            figure,
            file: "fig8.csv".into(),
            columns: vec!["g_minus_1", "eta_t", "fraction"],
            axis: Axis::linear("g_minus_1", 0.0, 0.05, 101),
            series: eta_t,
            fixed: vec![("eta_r", 0.01)],
        },
        9 => SweepSpec {
            figure,
            file: "fig9.csv".into(),
            columns: vec!["log10_eta_r", "eta_t", "fraction"],
            axis: Axis::log("eta_r", -3.0, 0.0, 61),
            series: eta_t,
            fixed: vec![("g_minus_1", 0.01)],
        },
        10 => SweepSpec {
            figure,
            file: "fig10.csv".into(),
            columns: vec!["g_minus_1", "fidelity", "purity"],
            axis: Axis::linear("g_minus_1", 0.0, 0.05, 101),
            series: vec![],
            fixed: vec![("eta_t", 0.9), ("eta_r", 0.01)],
        },
        _ => return None,
    };
    Some(s)
}

fn row(figure: u8, series: f64, x: f64) -> Vec<Cell> {
    use Cell::{Float, Int};
    match figure {
        4 => {
            let n = series as u64;
            let p = herald_prob_island(x, 1.0);
            vec![
                Float(x),
                Int(n),
                Float(true_herald_prob(p, n, HeraldMode::SameIsland)),
            ]
        }
        5 => vec![
            Float(x),
            Float(series),
            Float(bsm_bell_fraction(GaussianBlocks::new(x, series, 1.0).n_s())),
        ],
        6 => vec![
            Float(x),
            Float(series),
            Float(delivered(0.01, series, 10f64.powf(x)).fidelity),
        ],
        7 => vec![
            Float(x),
            Float(series),
            Float(delivered(x, series, 0.01).fidelity),
        ],
        8 => vec![
            Float(x),
            Float(series),
            Float(delivered(x, series, 0.01).fraction),
        ],
        9 => vec![
            Float(x),
            Float(series),
            Float(delivered(0.01, series, 10f64.powf(x)).fraction),
        ],
        10 => {
            let q = delivered(x, 0.9, 0.01);
            vec![Float(x), Float(q.fidelity), Float(q.purity)]
        }
        _ => unreachable!("unknown figure {figure}"),
    }
}

/// Evaluates a preset. Rows are ordered by series, then axis point.
pub fn evaluate(spec: &SweepSpec) -> Table {
    let xs = spec.axis.points();
    let series = if spec.series.is_empty() {
        vec![f64::NAN]
    } else {
        spec.series.clone()
    };
    let jobs: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|&s| xs.iter().map(move |&x| (s, x)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(s, x)| row(spec.figure, s, x))
        .collect();
    Table {
        columns: spec.columns.clone(),
        rows,
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    generator: String,
    spec: &'a SweepSpec,
    rows: usize,
}

/// Writes the CSV and a `.meta.json` sidecar next to it.
pub fn write_figure(spec: &SweepSpec, table: &Table, csv_path: &Path) -> Result<PathBuf, CliError> {
    table.write_csv(csv_path)?;
    let meta_path = csv_path.with_extension("meta.json");
    let meta = Sidecar {
        generator: format!("zalm {}", env!("CARGO_PKG_VERSION")),
        spec,
        rows: table.rows.len(),
    };
    let text = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    std::fs::write(&meta_path, text + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", meta_path.display())))?;
    Ok(meta_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_defined() {
        for id in FIGURE_IDS {
            let s = spec(id).unwrap();
            assert_eq!(s.columns.len(), 3);
            assert!(s.axis.steps >= 2 && s.axis.min < s.axis.max);
        }
        assert!(spec(3).is_none());
    }

    #[test]
    fn linspace_hits_endpoints() {
        let xs = linspace(0.0, 1.0, 101);
        assert_eq!(xs[0], 0.0);
        assert_eq!(xs[50], 0.5);
        assert_eq!(xs[100], 1.0);
    }

    #[test]
    fn row_order_is_series_major() {
        let t = evaluate(&spec(4).unwrap());
        assert_eq!(t.rows.len(), 8 * 101);
        assert_eq!(t.rows[0][1], Cell::Int(2));
        assert_eq!(t.rows[101][1], Cell::Int(4));
        assert_eq!(t.rows[102][0], Cell::Float(0.01));
    }

    #[test]
    fn single_series_figure() {
        let t = evaluate(&spec(10).unwrap());
        assert_eq!(t.rows.len(), 101);
        let f = t.column("fidelity").unwrap();
        let p = t.column("purity").unwrap();
        for (f, p) in f.iter().zip(&p) {
            assert!(f.as_f64() >= p.as_f64());
        }
    }

    #[test]
    fn float_cells_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(Cell::Float(x).render().parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Float(1.0).render(), "1.0000000000000000e0");
    }
}
