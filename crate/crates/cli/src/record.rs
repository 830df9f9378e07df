//! Convergence tables, their CSV/JSON form, and log-log order fits.

use std::io::{Read, Write};

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

/// One row of a sweep. `label` distinguishes series sharing a table
/// (kernel name, exponent, N_θ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub label: String,
    pub ns: usize,
    pub ntheta: usize,
    pub depth: u32,
    pub h_final: f64,
    pub error: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub experiment: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceRecord {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self { experiment: experiment.into(), rows: Vec::new() }
    }

    /// Sorts by N_θ, then label, then decreasing `h_final`.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.ntheta
                .cmp(&b.ntheta)
                .then(a.label.cmp(&b.label))
                .then(b.h_final.total_cmp(&a.h_final))
                .then(a.ns.cmp(&b.ns))
        });
    }

    pub fn series<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a ConvergenceRow> + 'a {
        self.rows.iter().filter(move |r| r.label == label)
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.label) {
                out.push(r.label.clone());
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r)?;
        }
        if self.rows.is_empty() {
            wr.write_record(["label", "ns", "ntheta", "depth", "h_final", "error", "iterations", "wall_time_s"])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(experiment: &str, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd.deserialize().collect::<std::result::Result<Vec<ConvergenceRow>, _>>()?;
        Ok(Self { experiment: experiment.into(), rows })
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

/// Least-squares slope of `log(error)` against `log(h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Fits `error ≈ C h^p` using only points with `error > floor`.
pub fn estimate_order(points: &[(f64, f64)], floor: f64) -> Result<OrderFit> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(h, e)| *h > 0.0 && *e > floor && e.is_finite()).map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len();
    if n < 2 {
        bail!("need at least two points above the floor to fit an order");
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        bail!("all step sizes coincide");
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(OrderFit { slope, stderr, points: n })
}
