//! CSV writers and readers for loops, profiles, compliances and sweeps.

use crate::error::{Error, Result};
use crate::pea_design::ElasticProfile;
use crate::sea_design::ComplianceProfile;
use crate::verify::SweepRow;
use crate::workloop::{PeaLoop, SeaLoop};
use std::io::Write;
use std::path::Path;

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        // shortest round-trip representation keeps output deterministic and lossless
        w.write_record(r.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}

fn to_file(path: &Path) -> Result<std::fs::File> {
    Ok(std::fs::File::create(path)?)
}

/// Columns: x, upper, lower, midline, arc.
pub fn write_pea_loop<W: Write>(out: W, l: &PeaLoop) -> Result<()> {
    write_rows(
        out,
        &["x", "g_upper", "g_lower", "g_mid", "g_arc"],
        (0..l.xs.len()).map(|j| vec![l.xs[j], l.g_upper[j], l.g_lower[j], l.g_mid[j], l.g_arc[j]]),
    )
}

/// Columns: F, X⁺, X⁻, X'⁺, X'⁻.
pub fn write_sea_loop<W: Write>(out: W, l: &SeaLoop) -> Result<()> {
    write_rows(
        out,
        &["f", "x_upper", "x_lower", "xp_upper", "xp_lower"],
        (0..l.fs.len()).map(|j| vec![l.fs[j], l.x_upper[j], l.x_lower[j], l.xp_upper[j], l.xp_lower[j]]),
    )
}

/// Columns: x, F_s(x).
pub fn write_profile<W: Write>(out: W, p: &ElasticProfile, n: usize) -> Result<()> {
    write_rows(out, &["x", "f_s"], p.table(n).into_iter().map(|(x, f)| vec![x, f]))
}

/// Columns: F, gradient, integrated displacement.
pub fn write_compliance<W: Write>(out: W, cp: &ComplianceProfile, n: usize) -> Result<()> {
    write_rows(out, &["f", "gradient", "displacement"], cp.table(n).into_iter().map(|(f, g, d)| vec![f, g, d]))
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_rows(
        out,
        &["omega", "p_a", "p_b", "objective"],
        rows.iter().map(|r| vec![r.omega, r.p_a, r.p_b, r.objective]),
    )
}

pub fn save_pea_loop(path: &Path, l: &PeaLoop) -> Result<()> {
    write_pea_loop(to_file(path)?, l)
}

pub fn save_sea_loop(path: &Path, l: &SeaLoop) -> Result<()> {
    write_sea_loop(to_file(path)?, l)
}

pub fn save_profile(path: &Path, p: &ElasticProfile, n: usize) -> Result<()> {
    write_profile(to_file(path)?, p, n)
}

pub fn save_compliance(path: &Path, cp: &ComplianceProfile, n: usize) -> Result<()> {
    write_compliance(to_file(path)?, cp, n)
}

pub fn save_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_sweep(to_file(path)?, rows)
}

/// Numeric columns of a CSV with a header row.
fn read_columns(path: &Path, want: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut cols = vec![Vec::new(); want];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < want {
            return Err(Error::invalid(format!("{}: row {} has {} columns, need {want}", path.display(), i + 2, rec.len())));
        }
        for (k, col) in cols.iter_mut().enumerate() {
            let v: f64 = rec[k]
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("{}: row {} column {} is not a number", path.display(), i + 2, k + 1)))?;
            col.push(v);
        }
    }
    Ok(cols)
}

/// Tabulated profile from an (x, F_s) CSV.
pub fn load_profile(path: &Path) -> Result<ElasticProfile> {
    let mut c = read_columns(path, 2)?;
    let values = c.pop().unwrap();
    ElasticProfile::tabulated(c.pop().unwrap(), values)
}

/// Tabulated compliance from an (F, gradient, displacement) CSV; the first displacement fixes the offset.
pub fn load_compliance(path: &Path) -> Result<ComplianceProfile> {
    let c = read_columns(path, 3)?;
    let offset = *c[2].first().ok_or_else(|| Error::invalid("empty compliance table"))?;
    ComplianceProfile::tabulated(c[0].clone(), c[1].clone(), offset)
}
