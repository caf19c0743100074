//! Artifact writer for one output directory.

use crate::config::Format;
use anyhow::{Context, Result};
use elastic_bounds::plot::{line_plot, Series};
use serde::Serialize;
use std::path::{Path, PathBuf};

pub struct Artifacts {
    dir: PathBuf,
    formats: Vec<Format>,
    pub written: Vec<PathBuf>,
}

/// One plotted curve sampled at the shared abscissa.
pub struct Curve<'a> {
    pub label: &'a str,
    pub color: &'static str,
    pub dashed: bool,
    pub ys: Vec<f64>,
}

impl Artifacts {
    pub fn new(dir: &Path, formats: &[Format]) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), formats: formats.to_vec(), written: vec![] })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.wants(Format::Json) {
            let p = self.path(name);
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            std::fs::write(&p, s).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    }

    /// CSV via a core writer.
    pub fn csv(&mut self, name: &str, write: impl FnOnce(&Path) -> elastic_bounds::Result<()>) -> Result<()> {
        if self.wants(Format::Csv) {
            let p = self.path(name);
            write(&p).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    }

    /// SVG plot plus a CSV of exactly the plotted samples. The CSV is written
    /// whenever the SVG is, even if csv output was not requested.
    pub fn plot(&mut self, stem: &str, title: &str, (xlabel, xs): (&str, &[f64]), ylabel: &str, curves: &[Curve]) -> Result<()> {
        if !self.wants(Format::Svg) {
            return Ok(());
        }
        let series: Vec<Series> = curves
            .iter()
            .map(|c| {
                let s = Series::new(c.label, xs.iter().copied().zip(c.ys.iter().copied()).collect(), c.color);
                if c.dashed { s.dashed() } else { s }
            })
            .collect();
        let svg = self.path(&format!("{stem}.svg"));
        std::fs::write(&svg, line_plot(title, xlabel, ylabel, &series))?;
        let p = self.path(&format!("{stem}_samples.csv"));
        let mut w = csv::Writer::from_path(&p)?;
        let mut header = vec![xlabel.to_string()];
        header.extend(curves.iter().map(|c| c.label.to_string()));
        w.write_record(&header)?;
        for (i, x) in xs.iter().enumerate() {
            let mut row = vec![format!("{x:?}")];
            row.extend(curves.iter().map(|c| format!("{:?}", c.ys[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
