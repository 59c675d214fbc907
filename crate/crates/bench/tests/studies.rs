//! Exact solutions, ladders and the command-line driver on small cases.

use std::process::Command;

use mlhp_bench::bar::{bar_exact, bar_exact_energy, run_bar, BarConfig, LOAD_POSITION, POINT_LOAD};
use mlhp_bench::corner::{corner_exact, corner_exact_energy, corner_space, run_corner, CornerConfig};
use mlhp_bench::heat::{heat_unknowns, HeatConfig, REFERENCE_ELEMENTS_FALLBACK};
use mlhp_bench::ladder::Strategy;
use mlhp_core::postproc::FieldSolution;
use mlhp_core::quadrature::gauss_rule;

/// Composite Gauss rule of `f` on `[a, b]` with `cells` equal cells.
fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let (xi, w) = gauss_rule(10).unwrap();
    let h = (b - a) / cells as f64;
    (0..cells)
        .map(|c| {
            let mid = a + (c as f64 + 0.5) * h;
            xi.iter().zip(&w).map(|(t, w)| 0.5 * h * w * f(mid + 0.5 * h * t)).sum::<f64>()
        })
        .sum()
}

#[test]
fn bar_exact_values() {
    assert_eq!(bar_exact(0.0).0, 0.0);
    let strain0 = (1.0 - 8.0f64.cos()) / 8.0 + 0.2;
    assert!((bar_exact(0.0).1 - strain0).abs() < 1e-15);
    assert!((bar_exact(0.0).1 - 0.3431875).abs() < 1e-7);
    let jump = bar_exact(LOAD_POSITION - 1e-12).1 - bar_exact(LOAD_POSITION + 1e-12).1;
    assert!((jump - POINT_LOAD).abs() < 1e-10);
    // traction free end
    assert!(bar_exact(1.0).1.abs() < 1e-15);
}

#[test]
fn bar_energy_matches_quadrature() {
    let du2 = |x: f64| bar_exact(x).1.powi(2);
    let oracle = composite(du2, 0.0, LOAD_POSITION, 64) + composite(du2, LOAD_POSITION, 1.0, 64);
    assert!((bar_exact_energy() - oracle).abs() < 1e-13);
}

#[test]
fn bar_short_ladders() {
    for strategy in [Strategy::Fitted, Strategy::Unfitted] {
        let records = run_bar(&BarConfig { strategy, alpha: 0.5, p_max: 6 }).unwrap();
        assert_eq!(records[0].unknowns, 1);
        assert!(records.windows(2).all(|w| w[1].error < w[0].error && w[1].unknowns > w[0].unknowns));
    }
    assert!(run_bar(&BarConfig { strategy: Strategy::Unfitted, alpha: 0.9, p_max: 2 }).is_err());
}

#[test]
fn corner_exact_values() {
    assert_eq!(corner_exact(&[1.0, 0.0]).0, 1.0);
    assert!((corner_exact(&[1.0, 1.0]).0 - 2f64.powf(0.25)).abs() < 1e-15);
    assert!((corner_exact(&[1.0, 1.0]).0 - 1.189207).abs() < 1e-6);
    assert!((corner_exact_energy() - 0.440687).abs() < 1e-6);
    // ∫ 1/(4ρ) over the square in polar coordinates: ∫ R(θ)/4 dθ
    let radius = |theta: f64| 1.0 / theta.cos().max(theta.sin());
    let quarter = std::f64::consts::FRAC_PI_4;
    let oracle = 2.0 * composite(|t| radius(t) / 4.0, 0.0, quarter, 64);
    assert!((corner_exact_energy() - oracle).abs() < 1e-13);
}

#[test]
fn corner_boundary_projection() {
    for strategy in [Strategy::Fitted, Strategy::Unfitted] {
        let lift = FieldSolution::lift(corner_space(strategy, 0.5, 8).unwrap());
        for i in 0..=20 {
            let s = i as f64 / 20.0;
            for x in [[1.0, s], [s, 1.0]] {
                let (v, _) = lift.evaluate(&x).unwrap();
                assert!((v - corner_exact(&x).0).abs() < 1e-5, "{strategy} at {x:?}: {v}");
            }
        }
    }
}

#[test]
fn corner_short_ladder() {
    let config = CornerConfig { strategy: Strategy::Unfitted, alpha: 0.5, p_max: 6, over_integration: 1 };
    let records = run_corner(&config).unwrap();
    assert!(records.windows(2).all(|w| w[1].error < w[0].error));
    assert!(run_corner(&CornerConfig { alpha: 1.0, ..config }).is_err());
    assert!(run_corner(&CornerConfig { over_integration: 0, ..config }).is_err());
}

#[test]
fn heat_unknown_counts() {
    assert_eq!(heat_unknowns(&HeatConfig::default()).unwrap(), [250_000, 881, 1841]);
    let fallback = HeatConfig { reference_elements: REFERENCE_ELEMENTS_FALLBACK, ..HeatConfig::default() };
    assert_eq!(heat_unknowns(&fallback).unwrap()[0], 62_500);
}

#[test]
fn cli_writes_csv_and_reports_errors() {
    let out = std::env::temp_dir().join(format!("mlhp-bench-cli-{}", std::process::id()));
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_bench")).args(args).output().unwrap();

    let ok = run(&["bar", "--strategy", "fitted", "--pmax", "3", "--out", out.to_str().unwrap()]);
    assert!(ok.status.success());
    let csv = std::fs::read_to_string(out.join("bar_fitted.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("N,E"));
    assert_eq!(csv.lines().count(), 4);

    let bad = run(&["corner", "--alpha", "2", "--out", out.to_str().unwrap()]);
    assert!(!bad.status.success());
    let line = String::from_utf8(bad.stdout).unwrap();
    assert!(line.starts_with("error kind=config message="), "{line}");
    std::fs::remove_dir_all(&out).unwrap();
}
