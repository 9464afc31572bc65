//! `key=value` configuration files and command-line overrides.
//!
//! Plain keys configure the evolution engine. Keys prefixed with
//! `threshold.` configure the metric of the distance-thresholding baseline.
//! Blank lines and lines starting with `#` are ignored.

use std::fs;
use std::path::Path;

use geofront::dualfront::DualFrontConfig;
use geofront::metric::ThresholdParams;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub dual: DualFrontConfig,
    pub threshold: ThresholdParams,
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim();
        if let Some(sub) = key.strip_prefix("threshold.") {
            let v: f64 = value.trim().parse().map_err(|_| {
                CliError::Usage(format!("invalid value '{value}' for key '{key}'"))
            })?;
            let t = &mut self.threshold;
            let slot = match sub {
                "sigma" => &mut t.sigma,
                "beta" => &mut t.beta,
                "rho" => &mut t.rho,
                "q" => &mut t.q,
                "eps" => &mut t.eps,
                "eps0" => &mut t.eps0,
                "iota" => &mut t.iota,
                "t_edge" => &mut t.t_edge,
                _ => return Err(CliError::Usage(format!("unknown config key '{key}'"))),
            };
            *slot = v;
            Ok(())
        } else {
            self.dual.set(key, value).map_err(|e| CliError::Usage(e.to_string()))
        }
    }

    /// Applies a `key=value` assignment.
    pub fn apply(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("expected key=value, got '{assignment}'"))
        })?;
        self.set(k, v)
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            self.apply(line).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("{origin}:{}: {m}", n + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Defaults, then the file, then each override in order.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Settings, CliError> {
        let mut s = Settings::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            s.apply_text(&text, &path.display().to_string())?;
        }
        for o in overrides {
            s.apply(o)?;
        }
        Ok(s)
    }
}
