//! Run configuration: built-in defaults, overridden by a TOML file, overridden by flags.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use qldpc_sched::circuit::Basis;
use qldpc_sched::sat::BackendSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Catalog name, `surface:d=<odd>`, or a path to a code file.
    pub code: Option<String>,
    /// Seconds per depth attempt.
    pub timeout_per_depth: f64,
    /// Seconds over the whole depth search; unset for no overall limit.
    pub budget: Option<f64>,
    pub seed: u64,
    /// `embedded` or `dimacs:<path>`.
    pub backend: String,
    pub symmetry: bool,
    pub rounds: usize,
    pub basis: String,
    pub noise: f64,
    pub trials: usize,
    pub evaluator: Option<String>,
    pub shots: u64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            code: None,
            timeout_per_depth: 600.0,
            budget: Some(7200.0),
            seed: 0,
            backend: "embedded".into(),
            symmetry: true,
            rounds: 3,
            basis: "z".into(),
            noise: 0.001,
            trials: 10,
            evaluator: None,
            shots: 10_000,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// Every field optional; used for both the config file and the command-line overrides.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub code: Option<String>,
    pub timeout_per_depth: Option<f64>,
    pub budget: Option<f64>,
    pub seed: Option<u64>,
    pub backend: Option<String>,
    pub symmetry: Option<bool>,
    pub rounds: Option<usize>,
    pub basis: Option<String>,
    pub noise: Option<f64>,
    pub trials: Option<usize>,
    pub evaluator: Option<String>,
    pub shots: Option<u64>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::parse(path, e.message()))
    }

    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { cfg.$f = v.clone(); } )* };
        }
        take!(timeout_per_depth, seed, backend, symmetry, rounds, basis, noise, trials, shots, workers);
        if self.code.is_some() {
            cfg.code = self.code.clone();
        }
        if self.evaluator.is_some() {
            cfg.evaluator = self.evaluator.clone();
        }
        if let Some(b) = self.budget {
            // a non-positive budget in a file or flag means "no overall limit"
            cfg.budget = (b > 0.0).then_some(b);
        }
    }
}

impl RunConfig {
    /// Defaults, then `file`, then `flags`; the result is checked.
    pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            f.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.timeout_per_depth.is_finite() && self.timeout_per_depth > 0.0) {
            return bad(format!("timeout-per-depth must be positive, got {}", self.timeout_per_depth));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return bad(format!("noise must lie in [0, 1), got {}", self.noise));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        self.basis()?;
        self.backend_spec()?;
        Ok(())
    }

    pub fn basis(&self) -> Result<Basis> {
        Ok(self.basis.parse()?)
    }

    pub fn backend_spec(&self) -> Result<BackendSpec> {
        Ok(BackendSpec::parse(&self.backend)?)
    }

    pub fn per_depth_timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_per_depth)
    }

    pub fn total_budget(&self) -> Option<Duration> {
        self.budget.map(Duration::from_secs_f64)
    }

    pub fn code_source(&self) -> Result<&str> {
        self.code.as_deref().ok_or_else(|| CliError::Usage("no code given; pass --code".into()))
    }

    /// The resolved configuration as a TOML config file; unset options appear commented out.
    pub fn to_toml(&self) -> String {
        let mut out = toml::to_string(&Overrides::from(self)).expect("config serializes");
        if self.code.is_none() {
            out.push_str("# code = \"bb72\"\n");
        }
        if self.budget.is_none() {
            out.push_str("# budget = 7200.0\n");
        }
        if self.evaluator.is_none() {
            out.push_str("# evaluator = \"stub-eval\"\n");
        }
        out
    }

    /// Short SHA-256 over the configuration plus a command-specific `extra`. The worker count
    /// is left out since it never changes an artifact.
    pub fn hash(&self, extra: &str) -> String {
        let mut h = Sha256::new();
        let hashed = RunConfig { workers: 0, ..self.clone() };
        h.update(serde_json::to_vec(&hashed).expect("config serializes"));
        h.update(extra.as_bytes());
        hex::encode(&h.finalize()[..8])
    }
}

impl From<&RunConfig> for Overrides {
    fn from(c: &RunConfig) -> Self {
        Overrides {
            code: c.code.clone(),
            timeout_per_depth: Some(c.timeout_per_depth),
            budget: c.budget,
            seed: Some(c.seed),
            backend: Some(c.backend.clone()),
            symmetry: Some(c.symmetry),
            rounds: Some(c.rounds),
            basis: Some(c.basis.clone()),
            noise: Some(c.noise),
            trials: Some(c.trials),
            evaluator: c.evaluator.clone(),
            shots: Some(c.shots),
            workers: Some(c.workers),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = Overrides { seed: Some(5), rounds: Some(7), ..Default::default() };
        let flags = Overrides { seed: Some(9), ..Default::default() };
        let cfg = RunConfig::resolve(Some(&file), &flags).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.rounds, 7);
        assert_eq!(cfg.noise, RunConfig::default().noise);
    }

    #[test]
    fn show_config_round_trips() {
        let cfg = RunConfig { code: Some("bb72".into()), budget: None, ..Default::default() };
        let text = cfg.to_toml();
        let parsed: Overrides = toml::from_str(&text).unwrap();
        let mut back = RunConfig::resolve(None, &parsed).unwrap();
        back.budget = None;
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        for o in [
            Overrides { timeout_per_depth: Some(0.0), ..Default::default() },
            Overrides { noise: Some(1.5), ..Default::default() },
            Overrides { basis: Some("y".into()), ..Default::default() },
            Overrides { backend: Some("cplex".into()), ..Default::default() },
        ] {
            assert!(RunConfig::resolve(None, &o).is_err(), "{o:?}");
        }
        assert!(toml::from_str::<Overrides>("colour = 3").is_err());
    }

    #[test]
    fn hash_tracks_seed() {
        let a = RunConfig::default();
        let b = RunConfig { seed: 1, ..Default::default() };
        assert_ne!(a.hash(""), b.hash(""));
        assert_eq!(a.hash("x"), RunConfig::default().hash("x"));
        assert_eq!(a.hash("").len(), 16);
    }
}
