use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

use crate::Build;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Provenance written into every output.
#[derive(Serialize)]
pub struct Meta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    parameters: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
}

impl Meta {
    pub fn new(command: &'static str, no_timestamp: bool) -> Self {
        let generated_unix = (!no_timestamp).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            tool: "difforge",
            version: env!("CARGO_PKG_VERSION"),
            command,
            parameters: BTreeMap::new(),
            generated_unix,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn params_from(&mut self, b: &Build) -> &mut Self {
        self.param(
            "eps",
            b.eps
                .map(|e| e.to_string())
                .unwrap_or_else(|| "none".into()),
        );
        self.param(
            "truncation",
            b.truncation
                .map(|t| t.to_string())
                .unwrap_or_else(|| "none".into()),
        )
    }

    fn header(&self) -> String {
        let mut s = format!("# {} {} {}\n", self.tool, self.version, self.command);
        for (k, v) in &self.parameters {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        if let Some(t) = self.generated_unix {
            s.push_str(&format!("# generated_unix: {t}\n"));
        }
        s
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<const N: usize>(&mut self, cells: [String; N]) {
        self.rows.push(cells.into());
    }

    pub fn csv(&self, meta: &Meta) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = String::from_utf8(w.into_inner().context("flushing csv")?)?;
        Ok(meta.header() + &body)
    }
}

/// `dir/stem.suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes through a temporary file and a rename, or to stdout.
pub fn write(path: Option<&PathBuf>, body: &str) -> Result<()> {
    match path {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(p) => {
            let tmp = sibling(p, "partial");
            std::fs::write(&tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, p).with_context(|| format!("renaming into {}", p.display()))?;
            Ok(())
        }
    }
}
