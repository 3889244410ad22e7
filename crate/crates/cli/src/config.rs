use std::collections::BTreeMap;
use std::path::Path;

/// Flat key=value configuration. Flags override file entries; the file path
/// defaults to `$ANATRACE_CONFIG` when set.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> std::io::Result<Config> {
        let mut cfg = Config::default();
        let chosen = path
            .map(|p| p.to_path_buf())
            .or_else(|| std::env::var("ANATRACE_CONFIG").ok().map(Into::into));
        if let Some(p) = chosen {
            let text = std::fs::read_to_string(&p)?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                if let Some((k, v)) = line.split_once('=') {
                    cfg.entries
                        .insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> f64 {
        self.get(key)
            .and_then(|v| v.parse().ok())
            .unwrap_or(default)
    }

    pub fn get_usize(&self, key: &str, default: usize) -> usize {
        self.get(key)
            .and_then(|v| v.parse().ok())
            .unwrap_or(default)
    }

    pub fn snapshot(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}
