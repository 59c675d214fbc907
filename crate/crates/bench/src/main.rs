//! Command-line driver: runs one study and writes its CSV files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use mlhp_bench::bar::{run_bar, BarConfig, ALPHA_MAX};
use mlhp_bench::corner::{run_corner, CornerConfig};
use mlhp_bench::heat::{run_heat_model, HeatConfig, HeatModel, REFERENCE_ELEMENTS_FALLBACK};
use mlhp_bench::ladder::{ConvergenceRecord, Strategy};
use mlhp_bench::output;
use mlhp_bench::overlap::{run_overlap, OverlapConfig};
use mlhp_bench::{Error, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Study {
    Bar,
    Corner,
    Overlap,
    Heat,
}

#[derive(Debug, Parser)]
#[command(name = "bench", about = "Benchmark studies for unfitted multi-level hp finite elements")]
struct Args {
    study: Study,
    /// Ladder of the bar and corner studies: fitted or unfitted.
    #[arg(long, default_value = "unfitted")]
    strategy: Strategy,
    /// Overlay size factor (bar: default 2/3, corner: default 0.5).
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest degree (bar: 30 fitted, 15 unfitted; corner: 19; overlap: 8).
    #[arg(long)]
    pmax: Option<usize>,
    /// Time step of the heat study.
    #[arg(long, default_value_t = HeatConfig::default().dt)]
    dt: f64,
    /// Time between overlay moves of the refined heat model.
    #[arg(long, default_value_t = HeatConfig::default().motion_interval)]
    motion_interval: f64,
    /// Load quadrature multiplier (corner: default 1; heat unrefined: default 5).
    #[arg(long)]
    over_integration: Option<usize>,
    /// Elements per axis of the heat reference mesh.
    #[arg(long, default_value_t = HeatConfig::default().reference_elements)]
    reference_elements: usize,
    /// Use the smaller heat reference mesh.
    #[arg(long)]
    fallback: bool,
    /// Heat models to run (default: all three).
    #[arg(long, value_delimiter = ',')]
    models: Vec<HeatModel>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Core(_) => "core",
        Error::Io(_) => "io",
        Error::Csv(_) => "csv",
        Error::Config(_) => "config",
    }
}

fn write_ladder(out: &Path, name: &str, records: &[ConvergenceRecord]) -> Result<()> {
    let path = out.join(format!("{name}.csv"));
    output::write_convergence(output::create(&path)?, records)?;
    for r in records {
        println!("p={:2} N={:5} E={:.5e}%", r.p, r.unknowns, r.error);
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn run(args: &Args) -> Result<()> {
    match args.study {
        Study::Bar => {
            let alpha = args.alpha.unwrap_or(ALPHA_MAX);
            let p_max = args.pmax.unwrap_or(match args.strategy {
                Strategy::Fitted => 30,
                Strategy::Unfitted => 15,
            });
            let records = run_bar(&BarConfig { strategy: args.strategy, alpha, p_max })?;
            write_ladder(&args.out, &ladder_name("bar", args.strategy, alpha), &records)
        }
        Study::Corner => {
            let alpha = args.alpha.unwrap_or(0.5);
            let config = CornerConfig {
                strategy: args.strategy,
                alpha,
                p_max: args.pmax.unwrap_or(19),
                over_integration: args.over_integration.unwrap_or(1),
            };
            let records = run_corner(&config)?;
            write_ladder(&args.out, &ladder_name("corner", args.strategy, alpha), &records)
        }
        Study::Overlap => {
            let config = OverlapConfig { p_max: args.pmax.unwrap_or(8), ..OverlapConfig::default() };
            let cells = run_overlap(&config)?;
            for w in output::overlap_warnings(&cells) {
                eprintln!("warning: {w}");
            }
            let condition = args.out.join("overlap_condition.csv");
            output::write_overlap_condition(output::create(&condition)?, &cells)?;
            let pcg = args.out.join("overlap_pcg.csv");
            output::write_overlap_pcg(output::create(&pcg)?, &cells)?;
            println!("wrote {} and {}", condition.display(), pcg.display());
            Ok(())
        }
        Study::Heat => {
            let config = HeatConfig {
                dt: args.dt,
                motion_interval: args.motion_interval,
                reference_elements: if args.fallback { REFERENCE_ELEMENTS_FALLBACK } else { args.reference_elements },
                over_integration: args.over_integration.unwrap_or(HeatConfig::default().over_integration),
                ..HeatConfig::default()
            };
            let models = if args.models.is_empty() { HeatModel::ALL.to_vec() } else { args.models.clone() };
            for model in models {
                let start = Instant::now();
                let run = run_heat_model(model, &config)?;
                let probe = args.out.join(format!("heat_{model}_probe.csv"));
                output::write_probes(output::create(&probe)?, &run.probes)?;
                let field = args.out.join(format!("heat_{model}_field.csv"));
                output::write_field_2d(output::create(&field)?, &run.snapshot)?;
                println!(
                    "{model}: N={} max T={:.5} max |grad T|={:.5} snapshot t={:.3} ({:.1?})",
                    run.unknowns,
                    run.max_temperature(),
                    run.max_gradient(),
                    run.snapshot_time,
                    start.elapsed()
                );
            }
            Ok(())
        }
    }
}

fn ladder_name(study: &str, strategy: Strategy, alpha: f64) -> String {
    match strategy {
        Strategy::Fitted => format!("{study}_fitted"),
        Strategy::Unfitted => format!("{study}_unfitted_alpha{alpha}"),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            println!("error kind={} message={:?}", error_kind(&e), e.to_string());
            ExitCode::FAILURE
        }
    }
}
