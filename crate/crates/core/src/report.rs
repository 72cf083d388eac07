//! Aggregation of result files into per-configuration volume statistics.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::document::{DocumentError, ResultDocument};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub system: String,
    pub m: usize,
    pub tau: f64,
    pub runs: usize,
    pub empty: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    } else {
        sorted[i]
    }
}

/// Groups documents by system name, dataset size and `tau`. Rows are ordered by
/// that key.
pub fn summarize<'a>(docs: impl IntoIterator<Item = &'a ResultDocument>) -> Vec<ReportRow> {
    let mut keyed: Vec<(String, usize, f64, f64)> = docs
        .into_iter()
        .map(|d| {
            let system = d.manifest.system.clone().unwrap_or_else(|| "custom".into());
            (system, d.manifest.rows, d.config.tau, d.volume)
        })
        .collect();
    keyed.sort_by(|a, b| {
        (&a.0, a.1)
            .cmp(&(&b.0, b.1))
            .then(a.2.total_cmp(&b.2))
            .then(a.3.total_cmp(&b.3))
    });
    let mut rows = Vec::new();
    for group in keyed.chunk_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2 == b.2) {
        let vols: Vec<f64> = group.iter().map(|g| g.3).collect();
        rows.push(ReportRow {
            system: group[0].0.clone(),
            m: group[0].1,
            tau: group[0].2,
            runs: vols.len(),
            empty: vols.iter().filter(|&&v| v == 0.0).count(),
            min: vols[0],
            q1: quantile(&vols, 0.25),
            median: quantile(&vols, 0.5),
            q3: quantile(&vols, 0.75),
            max: vols[vols.len() - 1],
            mean: vols.iter().sum::<f64>() / vols.len() as f64,
        });
    }
    rows
}

/// Loads every `*.json` file directly inside `dir`, in path order.
pub fn load_results(dir: &Path) -> Result<Vec<ResultDocument>, DocumentError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths.par_iter().map(ResultDocument::load).collect()
}

pub fn write_csv(rows: &[ReportRow], out: impl std::io::Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::{RunManifest, TreeTable};
    use crate::geometry::BoxList;
    use crate::synthesis::{LeafCounts, SynthConfig, Termination};

    fn doc(system: &str, m: usize, volume: f64) -> ResultDocument {
        ResultDocument {
            manifest: RunManifest {
                system: Some(system.into()),
                rows: m,
                ..Default::default()
            },
            config: SynthConfig::new(1.0, 0.01),
            tree: TreeTable {
                dim: 2,
                nodes: vec![],
            },
            pi_set: BoxList::default(),
            volume,
            sweeps: 1,
            terminated_by: Termination::Fixpoint,
            leaf_counts: LeafCounts::default(),
            certificate: None,
        }
    }

    #[test]
    fn quantiles() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&v, 0.5), 3.0);
        assert_eq!(quantile(&v, 0.25), 2.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
        assert_eq!(quantile(&[7.0], 0.75), 7.0);
    }

    #[test]
    fn single_and_grouped() {
        let one = summarize([&doc("linear2d", 100, 0.8)]);
        assert_eq!(one.len(), 1);
        assert_eq!((one[0].runs, one[0].median), (1, 0.8));

        let docs = [
            doc("nonlinear2d", 2000, 0.0),
            doc("linear2d", 100, 0.5),
            doc("nonlinear2d", 2000, 0.0),
            doc("nonlinear2d", 10000, 3.2),
            doc("linear2d", 100, 0.7),
        ];
        let rows = summarize(&docs);
        assert_eq!(rows.len(), 3);
        assert_eq!(
            (rows[0].system.as_str(), rows[0].runs, rows[0].median),
            ("linear2d", 2, 0.6)
        );
        assert_eq!((rows[1].m, rows[1].empty), (2000, 2));
        assert_eq!((rows[2].m, rows[2].empty), (10000, 0));

        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("system,m,tau,runs,empty,min,q1,median,q3,max,mean\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
