//! Flat-file outputs: `sweep.csv` plus plot-ready JSON series and fits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::bucket::HdBucket;
use super::{DatasetFailure, SweepRecord};
use crate::error::{Error, Result};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const FIG_SEPARATION: &str = "fig_separation.json";
pub const FIG_BUCKETS: &str = "fig_buckets.json";
pub const SUMMARY: &str = "summary.json";
pub const ERRORS: &str = "errors.json";

pub fn write_sweep_csv<W: std::io::Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_writer(w);
    wtr.write_record(SweepRecord::COLUMNS)?;
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn read_sweep_csv<R: std::io::Read>(r: R) -> Result<Vec<SweepRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(SweepRecord::COLUMNS.iter().copied()) {
        return Err(Error::Format(format!(
            "unexpected sweep.csv header {headers:?}"
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn load_sweep_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    read_sweep_csv(File::open(path).map_err(|e| Error::io(path, e))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationSeries {
    pub degree: u32,
    pub source: String,
    /// `(realized_mean_hd, k_max)` sorted by separation.
    pub points: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketSeries {
    pub source: String,
    /// `(degree, k_max)` for every member, sorted by degree.
    pub points: Vec<(u32, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketFigure {
    pub center: f64,
    pub leeway: f64,
    pub series: Vec<BucketSeries>,
}

/// Least-squares fit of `ln(k_max)` against realized mean HD.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub degree: u32,
    pub source: String,
    pub n_points: usize,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub pearson_r: Option<f64>,
}

/// Slope, intercept and Pearson correlation of `ys` on `xs`; `None` when a
/// variable has no spread.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx, sxy / (sxx * syy).sqrt()))
}

fn plottable(records: &[SweepRecord]) -> impl Iterator<Item = (&SweepRecord, f64)> {
    records
        .iter()
        .filter(|r| r.is_plottable())
        .filter_map(|r| r.realized_mean_hd.map(|hd| (r, hd)))
}

pub fn separation_series(records: &[SweepRecord]) -> Vec<SeparationSeries> {
    let mut groups: BTreeMap<(u32, String), Vec<(f64, usize)>> = BTreeMap::new();
    for (r, hd) in plottable(records) {
        groups
            .entry((r.degree, r.source.to_string()))
            .or_default()
            .push((hd, r.k_max));
    }
    groups
        .into_iter()
        .map(|((degree, source), mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            SeparationSeries {
                degree,
                source,
                points,
            }
        })
        .collect()
}

pub fn bucket_figures(buckets: &[HdBucket]) -> Vec<BucketFigure> {
    buckets
        .iter()
        .map(|b| {
            let mut by_source: BTreeMap<String, Vec<(u32, usize)>> = BTreeMap::new();
            for r in &b.members {
                by_source
                    .entry(r.source.to_string())
                    .or_default()
                    .push((r.degree, r.k_max));
            }
            BucketFigure {
                center: b.center,
                leeway: b.leeway,
                series: by_source
                    .into_iter()
                    .map(|(source, mut points)| {
                        points.sort();
                        BucketSeries { source, points }
                    })
                    .collect(),
            }
        })
        .collect()
}

pub fn exponential_fits(records: &[SweepRecord]) -> Vec<ExponentialFit> {
    separation_series(records)
        .into_iter()
        .map(|s| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = s
                .points
                .iter()
                .filter(|(_, k)| *k >= 1)
                .map(|&(hd, k)| (hd, (k as f64).ln()))
                .unzip();
            let fit = linear_fit(&xs, &ys);
            ExponentialFit {
                degree: s.degree,
                source: s.source,
                n_points: xs.len(),
                slope: fit.map(|f| f.0),
                intercept: fit.map(|f| f.1),
                pearson_r: fit.map(|f| f.2),
            }
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(f), value)?;
    Ok(())
}

#[derive(Serialize)]
struct SeparationFile<'a> {
    series: &'a [SeparationSeries],
}

#[derive(Serialize)]
struct BucketsFile<'a> {
    buckets: &'a [BucketFigure],
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    n_records: usize,
    n_plotted: usize,
    fits: &'a [ExponentialFit],
}

/// Writes `sweep.csv`, `fig_separation.json`, `fig_buckets.json` and
/// `summary.json` (plus `errors.json` when there are failures) into `out_dir`.
pub fn emit_report(
    records: &[SweepRecord],
    buckets: &[HdBucket],
    failures: &[DatasetFailure],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let csv_path = out_dir.join(SWEEP_CSV);
    let f = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_sweep_csv(records, BufWriter::new(f))?;

    let sep_path = out_dir.join(FIG_SEPARATION);
    write_json(
        &sep_path,
        &SeparationFile {
            series: &separation_series(records),
        },
    )?;

    let buckets_path = out_dir.join(FIG_BUCKETS);
    write_json(
        &buckets_path,
        &BucketsFile {
            buckets: &bucket_figures(buckets),
        },
    )?;

    let summary_path = out_dir.join(SUMMARY);
    write_json(
        &summary_path,
        &SummaryFile {
            n_records: records.len(),
            n_plotted: plottable(records).count(),
            fits: &exponential_fits(records),
        },
    )?;

    let mut written = vec![csv_path, sep_path, buckets_path, summary_path];
    if !failures.is_empty() {
        let errors_path = out_dir.join(ERRORS);
        write_json(&errors_path, &failures)?;
        written.push(errors_path);
    }
    Ok(written)
}
