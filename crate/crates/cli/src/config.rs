//! Flat `key = value` run configuration. Flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

use symtensor::KernelSpec;

use crate::UsageError;

/// Keys accepted in a config file.
pub const KEYS: &[&str] = &[
    "d", "kernel", "tol", "seed", "out", "format", "pattern", "depth", "r", "restarts", "ambient",
];

#[derive(Clone, Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                UsageError(format!("config line {}: expected key = value", n + 1))
            })?;
            let k = k.trim().to_ascii_lowercase();
            if !KEYS.contains(&k.as_str()) {
                return Err(UsageError(format!(
                    "config line {}: unknown key `{k}`",
                    n + 1
                )));
            }
            values.insert(k, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Parses `a..b` (inclusive), `a,b,c` or a single `a`; must be strictly increasing.
pub fn parse_ladder(text: &str) -> Result<Vec<usize>, UsageError> {
    let bad = || UsageError(format!("bad dimension ladder `{text}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let ds: Vec<usize> = if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if ds.is_empty() || ds.contains(&0) || ds.windows(2).any(|w| w[1] <= w[0]) {
        return Err(UsageError(format!(
            "dimension ladder `{text}` must be positive and strictly increasing"
        )));
    }
    Ok(ds)
}

pub fn parse_reals(text: &str) -> Result<Vec<f64>, UsageError> {
    let xs: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("bad number list `{text}`")))?;
    if xs.is_empty() || xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(UsageError(format!("`{text}` must list positive numbers")));
    }
    Ok(xs)
}

pub fn parse_kernel(text: &str) -> Result<KernelSpec, UsageError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "frobenius" => Ok(KernelSpec::FROBENIUS),
        "gauss" | "gaussian" => Ok(KernelSpec::CubicGaussian),
        other => Err(UsageError(format!(
            "unknown kernel `{other}` (expected frobenius or gauss)"
        ))),
    }
}

pub fn parse_positive(text: &str, what: &str) -> Result<f64, UsageError> {
    match text.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(UsageError(format!(
            "{what} must be a positive number, got `{text}`"
        ))),
    }
}

pub fn parse_bool(text: &str) -> Result<bool, UsageError> {
    match text.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(UsageError(format!("expected a boolean, got `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders() {
        assert_eq!(parse_ladder("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_ladder("8,16,32").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_ladder("5").unwrap(), vec![5]);
        assert!(parse_ladder("8,4").is_err());
        assert!(parse_ladder("6..3").is_err());
        assert!(parse_ladder("a..b").is_err());
    }

    #[test]
    fn config_file() {
        let c = FileConfig::parse("# run\nd = 3..5\nkernel=gauss\n").unwrap();
        assert_eq!(c.get("d"), Some("3..5"));
        assert_eq!(c.get("kernel"), Some("gauss"));
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("d 3").is_err());
    }
}
