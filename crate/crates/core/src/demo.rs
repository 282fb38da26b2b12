//! The bundled demo: 20 synthetic sentences with a per-token bundle (dim 8)
//! and a per-sentence bundle (dim 16), plus a config producing four
//! matrices and all six pairwise analyses.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::pipeline::{self, PipelineError, RunOptions};
use crate::report::Report;

macro_rules! fixture {
    ($($path:literal,)*) => {
        &[$(($path, include_str!(concat!("../fixtures/demo/", $path)))),*]
    };
}

/// `(relative path, contents)` of every fixture file.
pub const FILES: &[(&str, &str)] = fixture![
    "config.json",
    "corpus.txt",
    "tokens/manifest.json",
    "sentences/manifest.json",
    "tokens/0.csv",
    "tokens/1.csv",
    "tokens/2.csv",
    "tokens/3.csv",
    "tokens/4.csv",
    "tokens/5.csv",
    "tokens/6.csv",
    "tokens/7.csv",
    "tokens/8.csv",
    "tokens/9.csv",
    "tokens/10.csv",
    "tokens/11.csv",
    "tokens/12.csv",
    "tokens/13.csv",
    "tokens/14.csv",
    "tokens/15.csv",
    "tokens/16.csv",
    "tokens/17.csv",
    "tokens/18.csv",
    "tokens/19.csv",
    "sentences/0.csv",
    "sentences/1.csv",
    "sentences/2.csv",
    "sentences/3.csv",
    "sentences/4.csv",
    "sentences/5.csv",
    "sentences/6.csv",
    "sentences/7.csv",
    "sentences/8.csv",
    "sentences/9.csv",
    "sentences/10.csv",
    "sentences/11.csv",
    "sentences/12.csv",
    "sentences/13.csv",
    "sentences/14.csv",
    "sentences/15.csv",
    "sentences/16.csv",
    "sentences/17.csv",
    "sentences/18.csv",
    "sentences/19.csv",
];

/// Copies the fixture into `dir` and returns the config path.
pub fn write_fixture(dir: &Path) -> io::Result<PathBuf> {
    for (rel, contents) in FILES {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, contents)?;
    }
    Ok(dir.join("config.json"))
}

/// Writes the fixture to `<out>/input` and runs it with outputs in
/// `<out>/output`.
pub fn run_demo(out: &Path, threads: Option<usize>) -> Result<Report, PipelineError> {
    let input = out.join("input");
    let config = write_fixture(&input).map_err(|e| PipelineError::Data(format!("{}: {e}", input.display())))?;
    let options = RunOptions {
        threads,
        out_dir: Some(out.join("output")),
        ..RunOptions::default()
    };
    pipeline::run_config_file(&config, &options)
}
