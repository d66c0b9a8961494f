//! File-level commands: dataset generation, estimation on CSV clouds and the
//! benchmark harness. Every output file starts with the comment header of
//! [`RunConfig::header`]; numbers are written with the shortest round-trip
//! formatting, so outputs are byte-identical for identical configurations.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::curvature::{estimate_all, CurvatureResult};
use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};
use crate::metrics::{
    better_mean_convention, run_job, summarize, BenchmarkJob, MetricReport, MetricSummary,
    Quantity, Spread,
};
use crate::surfaces::{add_noise, sample_surface_with, SurfaceSpec};

pub const GENERATE_COLUMNS: [&str; 11] = [
    "x", "y", "z", "clean_x", "clean_y", "clean_z", "gauss_true", "mean_true", "nx", "ny", "nz",
];

pub const ESTIMATE_COLUMNS: [&str; 13] = [
    "kappa1", "kappa2", "gauss", "mean", "d1x", "d1y", "d1z", "d2x", "d2y", "d2z", "eps_pca",
    "tau", "valid",
];

pub const METRICS_COLUMNS: [&str; 9] = [
    "surface",
    "noise",
    "quantity",
    "rmse",
    "energy_distance",
    "pearson",
    "n_valid",
    "n_total",
    "seed",
];

pub const SUMMARY_COLUMNS: [&str; 11] = [
    "surface",
    "noise",
    "quantity",
    "seeds",
    "rmse_mean",
    "rmse_spread",
    "energy_distance_mean",
    "energy_distance_spread",
    "pearson_mean",
    "pearson_spread",
    "better_mean_convention",
];

pub const SCATTER_COLUMNS: [&str; 9] = [
    "x",
    "y",
    "z",
    "valid",
    "gauss_est",
    "gauss_true",
    "mean_sum_est",
    "mean_half_est",
    "mean_true",
];

/// Runs `f` on a dedicated pool of `threads` workers (0 means all cores).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn num(x: f64) -> String {
    x.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Ground-truth CSV for `config.surface`, `config.n`, `config.sigma` and
/// `config.seed`.
pub fn generate_csv(config: &RunConfig) -> Result<String> {
    config.validate()?;
    let clean = sample_surface_with(&config.surface, config.n, config.seed, config.sampling)?;
    let points = add_noise(&clean, config.sigma, config.seed)?;
    let mut out = config.header("generate");
    out.push_str(&GENERATE_COLUMNS.join(","));
    out.push('\n');
    for t in &points {
        let row = [
            t.noisy_position.x,
            t.noisy_position.y,
            t.noisy_position.z,
            t.position.x,
            t.position.y,
            t.position.z,
            t.gauss,
            t.mean,
            t.normal.x,
            t.normal.y,
            t.normal.z,
        ];
        out.push_str(&row.map(num).join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_generate(config: &RunConfig, out_path: &Path) -> Result<()> {
    let csv = generate_csv(config)?;
    write_file(out_path, csv.as_bytes())
}

fn estimate_fields(r: &CurvatureResult) -> Vec<String> {
    if !r.valid {
        let mut fields = vec![String::new(); ESTIMATE_COLUMNS.len() - 1];
        fields.push("0".into());
        return fields;
    }
    let mut fields: Vec<String> = [r.kappa1, r.kappa2, r.gauss, r.mean]
        .into_iter()
        .chain(r.d1.iter().copied())
        .chain(r.d2.iter().copied())
        .chain([r.eps_pca, r.tau])
        .map(num)
        .collect();
    fields.push("1".into());
    fields
}

/// Estimates curvature for the cloud in `input` (CSV with at least columns
/// `x,y,z`; `#` lines are comments) and writes the input rows with the
/// estimate columns appended, in input order.
pub fn estimate_csv(input: impl Read, config: &RunConfig, out: impl Write) -> Result<()> {
    config.validate()?;
    let sweep = config.sweep_config()?;
    let curvature = config.curvature_config()?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Format(format!("cannot read header: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Format(format!("missing column '{name}'")))
    };
    let xyz = [column("x")?, column("y")?, column("z")?];

    let mut records = Vec::new();
    let mut points = Vec::new();
    for row in reader.records() {
        let record = row.map_err(|e| Error::Row {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut c = [0.0; 3];
        for (k, &col) in xyz.iter().enumerate() {
            let text = record.get(col).unwrap_or("").trim();
            c[k] = text
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Row {
                    line,
                    message: format!("column '{}': invalid number '{text}'", headers[col].trim()),
                })?;
        }
        points.push(Point3::new(c[0], c[1], c[2]));
        records.push(record);
    }
    let cloud = PointCloud::new(points)?;
    let results = estimate_all(&cloud, &sweep, &curvature)?;

    let mut out = out;
    let io_err = |e: std::io::Error| Error::io("<output>", e);
    out.write_all(config.header("estimate").as_bytes())
        .map_err(io_err)?;
    let mut writer = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::io("<output>", e);
    writer
        .write_record(headers.iter().chain(ESTIMATE_COLUMNS))
        .map_err(csv_err)?;
    for (record, r) in records.iter().zip(&results) {
        let extra = estimate_fields(r);
        writer
            .write_record(record.iter().chain(extra.iter().map(String::as_str)))
            .map_err(csv_err)?;
    }
    writer.flush().map_err(io_err)
}

/// [`estimate_csv`] on a file, returning the output bytes. Row and format
/// errors name the input path.
pub fn estimate_file(in_path: &Path, config: &RunConfig) -> Result<Vec<u8>> {
    let file = fs::File::open(in_path).map_err(|e| Error::io(in_path, e))?;
    let mut config = config.clone();
    config.input = Some(in_path.to_path_buf());
    let mut buf = Vec::new();
    estimate_csv(std::io::BufReader::new(file), &config, &mut buf).map_err(|e| match e {
        Error::Row { line, message } => Error::Row {
            line,
            message: format!("{}: {message}", in_path.display()),
        },
        Error::Format(message) => Error::Format(format!("{}: {message}", in_path.display())),
        other => other,
    })?;
    Ok(buf)
}

pub fn cmd_estimate(in_path: &Path, config: &RunConfig, out_path: &Path) -> Result<()> {
    let buf = estimate_file(in_path, config)?;
    write_file(out_path, &buf)
}

/// Every file the benchmark writes, as (path relative to the output
/// directory, contents).
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkFiles {
    pub files: Vec<(PathBuf, String)>,
}

/// Runs every (surface, noise, seed) job of the configuration, in
/// surface-major, then noise, then seed order.
pub fn benchmark_jobs(config: &RunConfig) -> Result<Vec<BenchmarkJob>> {
    config.validate()?;
    let bench = config.benchmark_config()?;
    let mut jobs = Vec::new();
    for surface in &config.surfaces {
        for &sigma in &config.noise_levels {
            for &seed in &config.seeds {
                let job = run_job(surface, sigma, seed, &bench).map_err(|e| Error::Job {
                    context: format!("surface {surface}, noise {sigma}, seed {seed}"),
                    source: Box::new(e),
                })?;
                jobs.push(job);
            }
        }
    }
    Ok(jobs)
}

fn metrics_csv(header: &str, reports: &[MetricReport]) -> String {
    let mut out = header.to_string();
    out.push_str(&METRICS_COLUMNS.join(","));
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.surface,
            num(r.noise_sigma),
            r.quantity,
            opt(r.rmse),
            opt(r.energy_distance),
            opt(r.pearson),
            r.n_valid,
            r.n_total,
            r.seed
        );
    }
    out
}

fn spread_fields(s: Option<Spread>) -> String {
    match s {
        Some(s) => format!("{},{}", num(s.mean), num(s.spread)),
        None => ",".into(),
    }
}

fn summary_csv(header: &str, summaries: &[MetricSummary]) -> String {
    let mut out = header.to_string();
    out.push_str(&SUMMARY_COLUMNS.join(","));
    out.push('\n');
    for s in summaries {
        let better = match s.quantity {
            Quantity::Gauss => String::new(),
            q => {
                let best = better_mean_convention(summaries, &s.surface, s.noise_sigma);
                u8::from(best == Some(q)).to_string()
            }
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.surface,
            num(s.noise_sigma),
            s.quantity,
            s.seeds,
            spread_fields(s.rmse),
            spread_fields(s.energy_distance),
            spread_fields(s.pearson),
            better
        );
    }
    out
}

fn cell(s: Option<Spread>) -> String {
    match s {
        Some(s) => format!("{:.3} ± {:.3}", s.mean, s.spread),
        None => "n/a".into(),
    }
}

fn table(
    out: &mut String,
    title: &str,
    surfaces: &[SurfaceSpec],
    noise: &[f64],
    mut value: impl FnMut(&SurfaceSpec, f64) -> String,
) {
    let _ = writeln!(out, "## {title}\n");
    let _ = writeln!(
        out,
        "| noise | {} |",
        surfaces.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" | ")
    );
    let _ = writeln!(out, "|---|{}", "---|".repeat(surfaces.len()));
    for &sigma in noise {
        let cells: Vec<String> = surfaces.iter().map(|s| value(s, sigma)).collect();
        let _ = writeln!(out, "| {sigma} | {} |", cells.join(" | "));
    }
    out.push('\n');
}

fn summary_md(header: &str, config: &RunConfig, summaries: &[MetricSummary]) -> String {
    let find = |s: &SurfaceSpec, sigma: f64, q: Quantity| {
        summaries
            .iter()
            .find(|m| m.surface == *s && m.noise_sigma == sigma && m.quantity == q)
    };
    let mut out = format!("<!--\n{header}-->\n# Curvature benchmark\n\n");
    let _ = writeln!(
        out,
        "Mean over {} seed(s) ± max-min spread across seeds; {} points per surface.\n",
        config.seeds.len(),
        config.n
    );
    let (surfaces, noise) = (&config.surfaces, &config.noise_levels);
    table(&mut out, "Gaussian curvature: RMSE / energy distance", surfaces, noise, |s, sigma| {
        find(s, sigma, Quantity::Gauss).map_or("n/a".into(), |m| {
            format!("{} / {}", cell(m.rmse), cell(m.energy_distance))
        })
    });
    table(&mut out, "Gaussian curvature: Pearson correlation", surfaces, noise, |s, sigma| {
        find(s, sigma, Quantity::Gauss).map_or("n/a".into(), |m| cell(m.pearson))
    });
    let better = |s: &SurfaceSpec, sigma: f64| {
        better_mean_convention(summaries, s, sigma).and_then(|q| find(s, sigma, q))
    };
    table(
        &mut out,
        "Mean curvature, better convention: RMSE / energy distance",
        surfaces,
        noise,
        |s, sigma| {
            better(s, sigma).map_or("n/a".into(), |m| {
                format!("{} / {} ({})", cell(m.rmse), cell(m.energy_distance), m.quantity)
            })
        },
    );
    table(
        &mut out,
        "Mean curvature, better convention: Pearson correlation",
        surfaces,
        noise,
        |s, sigma| {
            better(s, sigma).map_or("n/a".into(), |m| format!("{} ({})", cell(m.pearson), m.quantity))
        },
    );
    out
}

fn scatter_name(job: &BenchmarkJob) -> PathBuf {
    let surface = job.surface.to_string().replace(':', "_");
    PathBuf::from("scatter").join(format!(
        "{surface}_noise{}_seed{}.csv",
        num(job.noise_sigma),
        job.seed
    ))
}

fn scatter_csv(header: &str, job: &BenchmarkJob) -> String {
    let mut out = header.to_string();
    out.push_str(&SCATTER_COLUMNS.join(","));
    out.push('\n');
    for (t, r) in job.truth.iter().zip(&job.results) {
        let p = t.noisy_position;
        let (valid, est) = if r.valid {
            let a = r.aligned_to(&t.normal);
            ("1", [num(a.gauss), num(a.mean), num(a.mean_half())])
        } else {
            ("0", Default::default())
        };
        let _ = writeln!(
            out,
            "{},{},{},{valid},{},{},{},{},{}",
            num(p.x),
            num(p.y),
            num(p.z),
            est[0],
            num(t.gauss),
            est[1],
            est[2],
            num(t.mean)
        );
    }
    out
}

/// Renders every benchmark output for already computed jobs.
pub fn benchmark_files(config: &RunConfig, jobs: &[BenchmarkJob]) -> BenchmarkFiles {
    let header = config.header("benchmark");
    let reports: Vec<MetricReport> = jobs.iter().flat_map(|j| j.reports.clone()).collect();
    let summaries = summarize(&reports);
    let mut files = vec![
        (PathBuf::from("metrics.csv"), metrics_csv(&header, &reports)),
        (PathBuf::from("summary.csv"), summary_csv(&header, &summaries)),
        (PathBuf::from("summary.md"), summary_md(&header, config, &summaries)),
    ];
    for job in jobs {
        files.push((scatter_name(job), scatter_csv(&header, job)));
    }
    BenchmarkFiles { files }
}

/// Runs the benchmark and writes `metrics.csv`, `summary.csv`, `summary.md`
/// and one `scatter/*.csv` per job below `out_dir`.
pub fn cmd_benchmark(config: &RunConfig, out_dir: &Path) -> Result<Vec<BenchmarkJob>> {
    let jobs = benchmark_jobs(config)?;
    for (name, contents) in benchmark_files(config, &jobs).files {
        write_file(&out_dir.join(name), contents.as_bytes())?;
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            surface: SurfaceSpec::Sphere { radius: 1.0 },
            n: 10,
            ..RunConfig::default()
        }
    }

    #[test]
    fn generate_sphere_rows() {
        let csv = generate_csv(&small()).unwrap();
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], GENERATE_COLUMNS.join(","));
        assert_eq!(rows.len(), 11);
        for row in &rows[1..] {
            assert_eq!(row.split(',').nth(6), Some("1"));
        }
    }

    #[test]
    fn estimate_reports_missing_column() {
        let err = estimate_csv("x,y,w\n0,0,0\n".as_bytes(), &small(), Vec::new()).unwrap_err();
        assert_eq!(err, Error::Format("missing column 'z'".into()));
    }

    #[test]
    fn estimate_reports_bad_row_line() {
        let input = "# comment\nx,y,z\n0,0,0\n1,abc,0\n";
        match estimate_csv(input.as_bytes(), &small(), Vec::new()).unwrap_err() {
            Error::Row { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("'y'"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn estimate_flags_sparse_points_invalid() {
        let input = "x,y,z,label\n0,0,0,a\n1,0,0,b\n0,1,0,c\n1,1,0,d\n";
        let mut out = Vec::new();
        estimate_csv(input.as_bytes(), &small(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], format!("x,y,z,label,{}", ESTIMATE_COLUMNS.join(",")));
        assert_eq!(rows.len(), 5);
        for (row, label) in rows[1..].iter().zip(["a", "b", "c", "d"]) {
            assert!(row.contains(&format!(",{label},")));
            assert!(row.ends_with(",,,,,,,,,,,,,0"), "{row}");
        }
    }
}
