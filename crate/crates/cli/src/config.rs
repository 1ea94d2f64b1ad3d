//! Run configuration: defaults, an optional TOML file, then command-line
//! flags, in increasing precedence.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use serde::{Deserialize, Serialize};

use proca_core::analysis::cfl_timestep;
use proca_core::driver::RunSpec;
use proca_core::{GridSpec, LambdaField, Params, SchemeKind, SolverConfig, SolverKind};

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub c: f64,
    pub p1: f64,
    pub p2: f64,
    pub lambda: f64,
    pub a: f64,
    pub solver: SolverKind,
    pub tol: f64,
    pub report_every: u64,
    pub snapshot_times: Vec<f64>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::Sps,
            n1: 100,
            n2: 100,
            n3: 1,
            cfl: 0.25,
            t_end: 80.0,
            c: 1.0,
            p1: 1.0,
            p2: 1.0,
            lambda: 0.01,
            a: 1.0,
            solver: SolverKind::Spectral,
            tol: 1e-12,
            report_every: 10,
            snapshot_times: Vec::new(),
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Optional overrides, shared by the config file and the flags.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[arg(long)]
    pub scheme: Option<SchemeKind>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub n3: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub solver: Option<SolverKind>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub report_every: Option<u64>,
    /// Comma-separated list of times.
    #[arg(long, value_delimiter = ',')]
    pub snapshot_times: Option<Vec<f64>>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => {$(if let Some(v) = self.$f { cfg.$f = v; })*};
        }
        set!(scheme, n1, n2, n3, cfl, t_end, c, p1, p2, lambda, a, solver, tol, report_every, snapshot_times, out_dir);
    }
}

impl RunConfig {
    /// Defaults, then `file`, then `flags`.
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> anyhow::Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            Overrides::from_file(path)?.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n1 == 0 || self.n2 == 0 || self.n3 == 0 {
            bail!("grid sizes must be positive");
        }
        if self.report_every == 0 {
            bail!("report_every must be positive");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            bail!("t_end must be non-negative");
        }
        if self.snapshot_times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            bail!("snapshot times must be non-negative");
        }
        self.params()?.validate()?;
        self.solver_config().validate()?;
        Ok(())
    }

    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        Ok(GridSpec::unit_periodic(self.n1, self.n2, self.n3)?)
    }

    pub fn params(&self) -> anyhow::Result<Params> {
        let grid = self.grid()?;
        Ok(Params {
            c: self.c,
            p1: self.p1,
            p2: self.p2,
            lambda0: self.lambda,
            dt: cfl_timestep(&grid, self.cfl, self.c)?,
            a: self.a,
        })
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            kind: self.solver,
            tol: self.tol,
            ..SolverConfig::default()
        }
    }

    pub fn run_spec(&self) -> anyhow::Result<RunSpec> {
        let params = self.params()?;
        Ok(RunSpec {
            lambda: LambdaField::constant(self.lambda)?,
            solver: self.solver_config(),
            report_every: self.report_every,
            snapshot_times: self.snapshot_times.clone(),
            ..RunSpec::new(self.scheme, params, self.t_end)
        })
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let cfg = RunConfig::default();
        let p = cfg.params().unwrap();
        assert_eq!((p.c, p.p1, p.p2, p.lambda0, p.a), (1.0, 1.0, 1.0, 0.01, 1.0));
        assert_eq!(p.dt, 0.25 / 100.0);
        assert_eq!(cfg.t_end, 80.0);
        assert_eq!((cfg.n1, cfg.n2, cfg.n3), (100, 100, 1));
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("proca-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "scheme = \"ss\"\nn1 = 40\nt_end = 2.5\n").unwrap();
        let flags = Overrides {
            n1: Some(30),
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(Some(&path), flags).unwrap();
        assert_eq!(cfg.scheme, SchemeKind::Ss);
        assert_eq!(cfg.n1, 30);
        assert_eq!(cfg.t_end, 2.5);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn echo_roundtrips() {
        let cfg = RunConfig {
            snapshot_times: vec![1.0, 2.5],
            ..RunConfig::default()
        };
        let back: RunConfig = toml::from_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn invalid_values_are_rejected() {
        for flags in [
            Overrides { n1: Some(0), ..Default::default() },
            Overrides { cfl: Some(0.0), ..Default::default() },
            Overrides { p1: Some(0.0), ..Default::default() },
            Overrides { lambda: Some(0.0), ..Default::default() },
            Overrides { report_every: Some(0), ..Default::default() },
            Overrides { tol: Some(-1.0), ..Default::default() },
        ] {
            assert!(RunConfig::resolve(None, flags).is_err());
        }
    }
}
