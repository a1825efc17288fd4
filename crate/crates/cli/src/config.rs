//! `key = value` configuration files. Flags given on the command line win.

use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Hard cap on search grid cardinality.
    pub cap: u64,
    /// Oracle match tolerance.
    pub tol: f64,
    /// Worker threads; 0 keeps the default pool.
    pub workers: usize,
    pub shard_size: u64,
    pub seed: u64,
    /// Default sample count for `families verify --fuzz` on theorem ids.
    pub fuzz: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { cap: 1_000_000_000, tol: 1e-8, workers: 0, shard_size: 10_000, seed: 0, fuzz: 500 }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |e: &dyn std::fmt::Display| format!("line {}: {k}: {e}", i + 1);
            match k {
                "cap" | "grid_cap" => c.cap = v.parse().map_err(|e| bad(&e))?,
                "tol" | "tolerance" => {
                    c.tol = v.parse().map_err(|e| bad(&e))?;
                    if !(c.tol > 0.0 && c.tol.is_finite()) {
                        return Err(bad(&"must be positive"));
                    }
                }
                "workers" => c.workers = v.parse().map_err(|e| bad(&e))?,
                "shard_size" => c.shard_size = v.parse().map_err(|e| bad(&e))?,
                "seed" => c.seed = v.parse().map_err(|e| bad(&e))?,
                "fuzz" => c.fuzz = v.parse().map_err(|e| bad(&e))?,
                _ => return Err(format!("line {}: unknown key `{k}`", i + 1)),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = Config::parse("cap = 100\n# comment\ntol=1e-6  # inline\nworkers = 2\n").unwrap();
        assert_eq!(c.cap, 100);
        assert_eq!(c.tol, 1e-6);
        assert_eq!(c.workers, 2);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("cap").is_err());
        assert!(Config::parse("tol = -1").is_err());
    }
}
