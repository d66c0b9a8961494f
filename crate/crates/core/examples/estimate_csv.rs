// File workflow: write a ground-truth torus CSV, estimate curvature from it
// and read the appended columns back.

use pointcurv::cli::{cmd_estimate, cmd_generate};
use pointcurv::config::RunConfig;
use pointcurv::metrics::pearson;
use pointcurv::{Error, Result};

#[derive(Debug)]
pub struct CsvReport {
    pub rows: usize,
    pub valid: usize,
    pub gauss_pearson: f64,
}

pub fn run_example() -> Result<CsvReport> {
    let dir = tempfile::tempdir().map_err(|e| Error::Io { path: "<tempdir>".into(), message: e.to_string() })?;
    let (cloud_path, out_path) = (dir.path().join("torus.csv"), dir.path().join("estimated.csv"));

    let mut config = RunConfig::default();
    config.set("surface", "torus:2:1")?;
    config.set("n", "2000")?;
    config.set("seed", "9")?;
    cmd_generate(&config, &cloud_path)?;
    cmd_estimate(&cloud_path, &config, &out_path)?;

    let text = std::fs::read_to_string(&out_path).map_err(|e| Error::Io { path: out_path.clone(), message: e.to_string() })?;
    print!("{}", text.lines().take_while(|l| l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>());
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).expect("column present");
    let (est_col, true_col, valid_col) = (col("gauss"), col("gauss_true"), col("valid"));

    let (mut rows, mut est, mut tru) = (0, Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        rows += 1;
        if &record[valid_col] == "1" {
            est.push(record[est_col].parse::<f64>().map_err(|e| Error::Format(e.to_string()))?);
            tru.push(record[true_col].parse::<f64>().map_err(|e| Error::Format(e.to_string()))?);
        }
    }
    Ok(CsvReport { rows, valid: est.len(), gauss_pearson: pearson(&est, &tru)? })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    println!("{:#?}", run_example()?);
    Ok(())
}
