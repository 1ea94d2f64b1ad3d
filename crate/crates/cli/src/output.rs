//! CSV and JSON artifacts. Column layouts are documented in `docs/formats.md`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use proca_core::analysis::ModeRow;
use proca_core::diagnostics::DiagnosticsRecord;
use proca_core::driver::Snapshot;
use proca_core::Axis;

pub const SCHEMA_VERSION: u32 = 1;

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// One row per record. `ss_defect_l2` is empty for SPS runs.
pub fn write_series(path: &Path, records: &[DiagnosticsRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// File-name form of a time: `19` for 19.0, `0.5` for 0.5.
pub fn time_tag(t: f64) -> String {
    format!("{t}")
}

/// Writes `snapshot_t<T>.csv` (full interior of `A¹`) and `diag_t<T>.csv`
/// (the `x = y` extraction). Returns both paths.
pub fn write_snapshot(dir: &Path, snap: &Snapshot) -> anyhow::Result<(PathBuf, PathBuf)> {
    let tag = time_tag(snap.requested_time);
    let g = snap.a1.grid();
    let [n1, n2, n3] = g.n();
    let [d1, d2, d3] = g.dx();
    let [o1, o2, o3] = g.origin();

    let full = dir.join(format!("snapshot_t{tag}.csv"));
    let mut w = create(&full)?;
    writeln!(
        w,
        "# schema={SCHEMA_VERSION} field=A1 n1={n1} n2={n2} n3={n3} dx1={d1} dx2={d2} dx3={d3} \
         x0={o1} y0={o2} z0={o3} step={} time={} requested_time={}",
        snap.step, snap.time, snap.requested_time
    )?;
    writeln!(w, "i1,i2,i3,x,y,z,a1")?;
    for i3 in 0..n3 {
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                writeln!(
                    w,
                    "{i1},{i2},{i3},{},{},{},{}",
                    g.coord(Axis::X, i1),
                    g.coord(Axis::Y, i2),
                    g.coord(Axis::Z, i3),
                    snap.a1.get(i1, i2, i3)
                )?;
            }
        }
    }
    w.flush()?;

    let diag = dir.join(format!("diag_t{tag}.csv"));
    let mut w = create(&diag)?;
    writeln!(w, "x,y,a1")?;
    for (x, y, v) in &snap.diagonal {
        writeln!(w, "{x},{y},{v}")?;
    }
    w.flush()?;
    Ok((full, diag))
}

#[derive(Serialize)]
struct ModeCsvRow {
    k1: isize,
    k2: isize,
    k3: isize,
    h1: f64,
    h2: f64,
    h3: f64,
    discriminant: f64,
    eig_re: f64,
    eig_im: f64,
    growing: bool,
    modified_discriminant: f64,
    modified_eig_re: f64,
    modified_eig_im: f64,
    radius_sps: f64,
    radius_ss: f64,
}

pub fn write_modes(path: &Path, rows: &[ModeRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(ModeCsvRow {
            k1: r.k[0],
            k2: r.k[1],
            k3: r.k[2],
            h1: r.continuum.h[0],
            h2: r.continuum.h[1],
            h3: r.continuum.h[2],
            discriminant: r.continuum.discriminant,
            eig_re: r.continuum.eigenvalues[0].re,
            eig_im: r.continuum.eigenvalues[0].im,
            growing: r.continuum.growing,
            modified_discriminant: r.modified.discriminant,
            modified_eig_re: r.modified.eigenvalues[0].re,
            modified_eig_im: r.modified.eigenvalues[0].im,
            radius_sps: r.radius_sps,
            radius_ss: r.radius_ss,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
