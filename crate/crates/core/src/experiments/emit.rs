//! CSV exports for plotting.

use super::run::write_csv;
use super::sweep::{load_summary, summary_path, write_phase_table};
use crate::ensembles::EdgeSampleSet;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Histogram,
    Cdf,
    IprProfile,
    PhaseTable,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "histogram" => Ok(PlotKind::Histogram),
            "cdf" => Ok(PlotKind::Cdf),
            "ipr-profile" => Ok(PlotKind::IprProfile),
            "phase-table" => Ok(PlotKind::PhaseTable),
            other => Err(Error::invalid(format!("unknown plot kind `{other}`"))),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Freedman–Diaconis bins: width 2·IQR·n^{−1/3}, anchored at the minimum.
/// Returns (left, right, count, density) per bin.
pub fn histogram(samples: &[f64]) -> Result<Vec<(f64, f64, usize, f64)>> {
    if samples.is_empty() {
        return Err(Error::invalid("histogram of no samples"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let (lo, hi) = (v[0], v[v.len() - 1]);
    let n = v.len() as f64;
    let iqr = quantile(&v, 0.75) - quantile(&v, 0.25);
    let mut h = 2.0 * iqr / n.cbrt();
    let bins = if h > 0.0 && hi > lo { ((hi - lo) / h).ceil().max(1.0) as usize } else { 1 };
    if !(h > 0.0 && hi > lo) {
        h = if hi > lo { hi - lo } else { 1.0 };
    }
    let mut counts = vec![0usize; bins];
    for &x in &v {
        let k = (((x - lo) / h).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * h, lo + (k + 1) as f64 * h, c, c as f64 / (n * h)))
        .collect())
}

/// Sorted samples with F_n at each, ties collapsed to their upper value.
pub fn empirical_cdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (i, &x) in v.iter().enumerate() {
        let f = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = f,
            _ => out.push((x, f)),
        }
    }
    out
}

fn load_edge(dir: &Path, digest: &str) -> Result<(EdgeSampleSet, String)> {
    let stem = format!("edge-{digest}");
    if !dir.join(format!("{stem}.json")).exists() {
        return Err(Error::UnknownArtifact(digest.to_string()));
    }
    Ok((EdgeSampleSet::load(dir, &stem)?, stem))
}

/// Writes the requested plot CSV for the artifact with `digest` under `dir`.
///
/// histogram: `bin_left,bin_right,count,density` over rescaled edge values.
/// cdf: `x,empirical_cdf`. ipr-profile: `coordinate,amplitude_sq` of the
/// trial-0 top eigenvector. phase-table: regime × signal cells of a sweep.
pub fn emit_plot_data(dir: &Path, digest: &str, kind: PlotKind) -> Result<Vec<PathBuf>> {
    if kind == PlotKind::PhaseTable {
        let summary = summary_path(dir, digest);
        if !summary.exists() {
            return Err(Error::UnknownArtifact(digest.to_string()));
        }
        let seed = header_seed(&summary)?;
        let points = load_summary(&summary)?;
        return Ok(vec![write_phase_table(dir, digest, seed, &points)?]);
    }
    let (set, stem) = load_edge(dir, digest)?;
    let seed = set.meta.spec.seed;
    let (suffix, columns, rows): (&str, &str, Vec<String>) = match kind {
        PlotKind::Histogram => (
            "histogram",
            "bin_left,bin_right,count,density",
            histogram(&set.rescaled())?.into_iter().map(|(l, r, c, d)| format!("{l},{r},{c},{d}")).collect(),
        ),
        PlotKind::Cdf => (
            "cdf",
            "x,empirical_cdf",
            empirical_cdf(&set.rescaled()).into_iter().map(|(x, f)| format!("{x},{f}")).collect(),
        ),
        PlotKind::IprProfile => {
            let prof = set.profile.as_ref().ok_or_else(|| Error::Missing(format!("{stem}.profile.csv")))?;
            (
                "ipr-profile",
                "coordinate,amplitude_sq",
                prof.iter().enumerate().map(|(i, v)| format!("{i},{v}")).collect(),
            )
        }
        PlotKind::PhaseTable => unreachable!(),
    };
    let path = dir.join(format!("{stem}.{suffix}.csv"));
    write_csv(&path, digest, seed, columns, &rows)?;
    Ok(vec![path])
}

fn header_seed(path: &Path) -> Result<u64> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .next()
        .and_then(|l| l.split_whitespace().find_map(|w| w.strip_prefix("seed=")))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::invalid(format!("{} lacks a seed header", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ProfileSpec;
    use crate::ensembles::{simulate_edge, EnsembleSpec};

    fn saved_set(dir: &Path) -> String {
        let spec = EnsembleSpec::new(1, ProfileSpec::alpha_stable(2.0, 32, 4).unwrap(), 9).unwrap();
        let set = simulate_edge(&spec, 40).unwrap();
        let digest = set.meta.digest.clone();
        set.save(dir, &format!("edge-{digest}")).unwrap();
        digest
    }

    #[test]
    fn cdf_export_is_sorted_and_ends_at_one() {
        let dir = tempfile::tempdir().unwrap();
        let digest = saved_set(dir.path());
        let path = &emit_plot_data(dir.path(), &digest, PlotKind::Cdf).unwrap()[0];
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "x,empirical_cdf");
        let rows: Vec<(f64, f64)> = text
            .lines()
            .skip(2)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        assert!(rows.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        assert_eq!(rows.last().unwrap().1, 1.0);
    }

    #[test]
    fn histogram_is_deterministic_and_counts_everything() {
        let dir = tempfile::tempdir().unwrap();
        let digest = saved_set(dir.path());
        let a = std::fs::read(&emit_plot_data(dir.path(), &digest, PlotKind::Histogram).unwrap()[0]).unwrap();
        let b = std::fs::read(&emit_plot_data(dir.path(), &digest, PlotKind::Histogram).unwrap()[0]).unwrap();
        assert_eq!(a, b);
        let h = histogram(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]).unwrap();
        assert_eq!(h.iter().map(|b| b.2).sum::<usize>(), 8);
        let mass: f64 = h.iter().map(|b| b.3 * (b.1 - b.0)).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ipr_profile_has_documented_columns() {
        let dir = tempfile::tempdir().unwrap();
        let digest = saved_set(dir.path());
        let text =
            std::fs::read_to_string(&emit_plot_data(dir.path(), &digest, PlotKind::IprProfile).unwrap()[0]).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "coordinate,amplitude_sq");
        let total: f64 = text.lines().skip(2).map(|l| l.split_once(',').unwrap().1.parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unknown_digest_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_plot_data(dir.path(), "0123456789abcdef", PlotKind::Cdf).unwrap_err();
        assert!(matches!(err, Error::UnknownArtifact(d) if d == "0123456789abcdef"));
    }
}
