use std::io::Write;
use std::path::Path;

use mstperc::report::format_sig;
use serde::{Deserialize, Serialize};

use crate::error::LabResult;

pub const CSV_HEADER: &str = "n,param,statistic,value,stderr,ci_lo,ci_hi,replicates";

/// One output line. `n` and `param` are empty when a row pools several
/// sizes or has no grid parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: Option<usize>,
    pub param: Option<f64>,
    pub statistic: String,
    pub value: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub replicates: usize,
}

impl Row {
    pub fn new(n: Option<usize>, statistic: &str, value: f64, stderr: f64, replicates: usize) -> Self {
        Self {
            n,
            param: None,
            statistic: statistic.to_string(),
            value,
            stderr,
            ci_lo: value - Z95 * stderr,
            ci_hi: value + Z95 * stderr,
            replicates,
        }
    }

    pub fn with_param(mut self, param: f64) -> Self {
        self.param = Some(param);
        self
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.ci_lo = lo;
        self.ci_hi = hi;
        self
    }
}

pub const Z95: f64 = 1.959_963_984_540_054;

pub fn csv_string(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let n = r.n.map(|n| n.to_string()).unwrap_or_default();
        let param = r.param.map(format_sig).unwrap_or_default();
        s.push_str(&format!(
            "{n},{param},{},{},{},{},{},{}\n",
            r.statistic,
            format_sig(r.value),
            format_sig(r.stderr),
            format_sig(r.ci_lo),
            format_sig(r.ci_hi),
            r.replicates
        ));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub code_version: String,
    pub rows: Vec<Row>,
    pub elapsed_seconds: f64,
    pub seed: u64,
}

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Write `bytes` to a sibling temporary file, then rename it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> LabResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let rows = vec![
            Row::new(Some(4), "variance", 0.125, 0.01, 100),
            Row::new(None, "beta_hat", 1.0 / 3.0, 0.0, 10).with_param(0.5),
        ];
        let s = csv_string(&rows);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "4,,variance,0.125,0.01,0.1054003602,0.1445996398,100");
        assert_eq!(lines[2], ",0.5,beta_hat,0.3333333333,0,0.3333333333,0.3333333333,10");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
