use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;

pub fn version() -> String {
    format!(
        "{}+{}",
        env!("CARGO_PKG_VERSION"),
        env!("COATOM_FORGE_GIT_DESCRIBE")
    )
}

/// Every JSON report: command, version, config and seed first, the command's
/// body in the middle, wall-clock duration last.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, B: Serialize> {
    pub command: &'a str,
    pub version: String,
    pub config: &'a C,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub body: &'a B,
    pub duration_seconds: f64,
}

pub fn json<C: Serialize, B: Serialize>(
    command: &str,
    config: &C,
    seed: Option<u64>,
    body: &B,
    elapsed: Duration,
) -> Result<String> {
    let env = Envelope {
        command,
        version: version(),
        config,
        seed,
        body,
        duration_seconds: elapsed.as_secs_f64(),
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

pub fn csv<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn join_floats(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:e}"))
        .collect::<Vec<_>>()
        .join(" ")
}
