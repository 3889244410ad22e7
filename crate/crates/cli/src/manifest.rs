use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Reproducibility record for one command invocation: configuration
/// snapshot, calibrated constants, wall time and output digests. Written as
/// a flat key=value file next to the outputs.
pub struct Manifest {
    command: String,
    entries: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl Manifest {
    pub fn new(command: impl Into<String>) -> Manifest {
        Manifest {
            command: command.into(),
            entries: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn record_config(&mut self, cfg: &crate::config::Config) {
        for (k, v) in cfg.snapshot() {
            self.entries.push((format!("config.{k}"), v.to_string()));
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn write(mut self, path: &Path) -> std::io::Result<()> {
        let mut text = String::new();
        let _ = writeln!(text, "command={}", self.command);
        let _ = writeln!(text, "tool_version={}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(text, "lemma2_c={}", anatrace::oscillatory::LEMMA2_C);
        for (j, c) in anatrace::oscillatory::DECAY_C.iter().enumerate() {
            let _ = writeln!(text, "decay_c{j}={c}");
        }
        let thr = anatrace::tracefn::ConditionThresholds::default();
        let _ = writeln!(text, "theta1={}", thr.theta1);
        let _ = writeln!(text, "theta2={}", thr.theta2);
        let _ = writeln!(text, "theta3={}", thr.theta3);
        let _ = writeln!(text, "amp_floor={}", thr.amp_floor);
        self.entries.sort();
        for (k, v) in &self.entries {
            let _ = writeln!(text, "{k}={v}");
        }
        for out in &self.outputs {
            let bytes = std::fs::read(out)?;
            let digest = Sha256::digest(&bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            let _ = writeln!(
                text,
                "sha256.{}={hex}",
                out.file_name().unwrap_or_default().to_string_lossy(),
            );
        }
        let _ = writeln!(
            text,
            "wall_time_s={:.3}",
            self.started.elapsed().as_secs_f64()
        );
        std::fs::write(path, text)
    }
}
