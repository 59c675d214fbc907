//! CSV writers for study results.
//!
//! Headers: convergence `N,E`; overlap `o,p1,...,p8` (one file for the
//! condition numbers, one for the iteration counts); probe `step,t,T,gradT`;
//! fields `x,value,grad` in 1D and `x,y,value,grad_x,grad_y` in 2D.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use mlhp_core::postproc::{GridSample, ProbeRecord};

use crate::ladder::ConvergenceRecord;
use crate::overlap::OverlapCell;
use crate::Result;

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

pub fn write_convergence<W: Write>(out: W, records: &[ConvergenceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "E"])?;
    for r in records {
        w.write_record([r.unknowns.to_string(), num(r.error)])?;
    }
    w.flush()?;
    Ok(())
}

fn overlap_table<W: Write>(
    out: W,
    cells: &[OverlapCell],
    entry: impl Fn(&OverlapCell) -> String,
) -> Result<()> {
    let mut offsets: Vec<f64> = cells.iter().map(|c| c.offset).collect();
    offsets.dedup();
    let p_max = cells.iter().map(|c| c.p).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = std::iter::once("o".to_string()).chain((1..=p_max).map(|p| format!("p{p}"))).collect();
    w.write_record(&header)?;
    for o in offsets {
        let mut row = vec![num(o)];
        for p in 1..=p_max {
            let cell = cells.iter().find(|c| c.offset == o && c.p == p);
            row.push(cell.map_or_else(|| "nan".into(), &entry));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Condition numbers per offset (rows) and degree (columns); failed cells
/// are written as `nan`.
pub fn write_overlap_condition<W: Write>(out: W, cells: &[OverlapCell]) -> Result<()> {
    overlap_table(out, cells, |c| c.condition.as_ref().map_or_else(|_| "nan".into(), |&k| num(k)))
}

/// Iteration counts per offset and degree. A solve that hit the iteration
/// limit is written with its count; failed cells are written as `nan`.
pub fn write_overlap_pcg<W: Write>(out: W, cells: &[OverlapCell]) -> Result<()> {
    overlap_table(out, cells, |c| c.pcg.as_ref().map_or_else(|_| "nan".into(), |r| r.iterations.to_string()))
}

/// One line per cell whose condition number or iteration count is missing
/// or unconverged.
pub fn overlap_warnings(cells: &[OverlapCell]) -> Vec<String> {
    let mut out = Vec::new();
    for c in cells {
        if let Err(e) = &c.condition {
            out.push(format!("o={:e} p={}: condition number failed: {e}", c.offset, c.p));
        }
        match &c.pcg {
            Err(e) => out.push(format!("o={:e} p={}: pcg failed: {e}", c.offset, c.p)),
            Ok(r) if !r.converged => {
                out.push(format!("o={:e} p={}: pcg not converged after {} iterations", c.offset, c.p, r.iterations))
            }
            Ok(_) => {}
        }
    }
    out
}

pub fn write_probes<W: Write>(out: W, records: &[ProbeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "t", "T", "gradT"])?;
    for (step, r) in records.iter().enumerate() {
        w.write_record([step.to_string(), num(r.t), num(r.value), num(r.gradient_magnitude)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_1d<W: Write>(out: W, samples: &[GridSample<1>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "value", "grad"])?;
    for s in samples {
        w.write_record([num(s.x[0]), num(s.value), num(s.gradient[0])])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_2d<W: Write>(out: W, samples: &[GridSample<2>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "value", "grad_x", "grad_y"])?;
    for s in samples {
        w.write_record([num(s.x[0]), num(s.x[1]), num(s.value), num(s.gradient[0]), num(s.gradient[1])])?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `path` (and its parent directories) for writing.
pub fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(File::create(path)?)
}
