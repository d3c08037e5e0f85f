use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use super::ConservationLog;
use crate::spectral::Field;

#[derive(Serialize)]
struct SnapshotRecord<'a> {
    t: f64,
    values: &'a [[f64; 2]],
}

fn pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|v| [v.re, v.im]).collect()
}

/// One JSON object `{"t": .., "values": [[re, im], ..]}` per line, physical samples in site order.
pub fn write_trajectory_ndjson<W: Write>(
    mut w: W,
    times: &[f64],
    states: &[Field],
) -> std::io::Result<()> {
    for (&t, s) in times.iter().zip(states) {
        let values = pairs(s.to_physical().values());
        serde_json::to_writer(&mut w, &SnapshotRecord { t, values: &values })?;
        writeln!(w)?;
    }
    Ok(())
}

/// Columns `t, j, x, re, im`, one row per site per record.
pub fn write_trajectory_csv<W: Write>(w: W, times: &[f64], states: &[Field]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "j", "x", "re", "im"])?;
    for (&t, s) in times.iter().zip(states) {
        let p = s.to_physical();
        let l = p.lattice();
        for (j, v) in l.indices().zip(p.values()) {
            out.serialize((t, j, l.site(j), v.re, v.im))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Columns `t, mass, energy`.
pub fn write_conservation_csv<W: Write>(w: W, log: &ConservationLog) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "mass", "energy"])?;
    for ((t, m), e) in log.times.iter().zip(&log.mass).zip(&log.energy) {
        out.serialize((t, m, e))?;
    }
    out.flush()?;
    Ok(())
}
