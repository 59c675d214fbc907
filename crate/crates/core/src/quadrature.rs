//! Gauss–Legendre rules on `[-1, 1]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, cos};
use crate::{Error, Result};

pub const MAX_GAUSS_POINTS: usize = 64;

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule.
pub fn gauss_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > MAX_GAUSS_POINTS {
        return Err(Error::GaussPoints(n));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, refined by Newton on P_n
        let mut x = cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if abs(dx) < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok((points, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let pm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Cache of rules indexed by point count.
#[derive(Debug, Clone, Default)]
pub struct GaussTable {
    rules: Vec<Option<(Vec<f64>, Vec<f64>)>>,
}

impl GaussTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: usize) -> Result<(&[f64], &[f64])> {
        if n >= self.rules.len() {
            self.rules.resize(n + 1, None);
        }
        if self.rules[n].is_none() {
            self.rules[n] = Some(gauss_rule(n)?);
        }
        let (p, w) = self.rules[n].as_ref().unwrap();
        Ok((p, w))
    }
}
