//! Refinement ladders and convergence records shared by the elliptic studies.

use std::fmt;
use std::str::FromStr;

use crate::Error;

/// How refinement levels are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Each level bisects elements of the previous one; extra deactivation
    /// keeps the basis linearly independent.
    Fitted,
    /// Each level is an independently sized overlay.
    Unfitted,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "fitted" => Ok(Strategy::Fitted),
            "unfitted" => Ok(Strategy::Unfitted),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Fitted => "fitted",
            Strategy::Unfitted => "unfitted",
        })
    }
}

/// One refinement cycle: base degree `p`, unknowns and relative energy error
/// in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub cycle: usize,
    pub p: usize,
    pub unknowns: usize,
    pub error: f64,
}

/// Pearson correlation of `log10(E)` against `sqrt(N)` over the records with
/// `p >= p_min`; `|r|` close to one indicates exponential convergence.
pub fn exponential_fit_correlation(records: &[ConvergenceRecord], p_min: usize) -> f64 {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.p >= p_min)
        .map(|r| ((r.unknowns as f64).sqrt(), r.error.log10()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Error of `curve` at `unknowns`, interpolated linearly in
/// `(log N, log E)`; `None` outside the sampled range.
pub fn interpolate_error(curve: &[ConvergenceRecord], unknowns: usize) -> Option<f64> {
    let x = (unknowns as f64).ln();
    curve.windows(2).find_map(|w| {
        let (x0, x1) = ((w[0].unknowns as f64).ln(), (w[1].unknowns as f64).ln());
        if x0 <= x && x <= x1 && x1 > x0 {
            let t = (x - x0) / (x1 - x0);
            Some((w[0].error.ln() * (1.0 - t) + w[1].error.ln() * t).exp())
        } else {
            None
        }
    })
}
