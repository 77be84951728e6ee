//! Run configuration: a flat `key = value` file merged with command-line
//! flags, then validated into chain parameters.
//!
//! File grammar: one `key = value` per line; blank lines and lines starting
//! with `#` are ignored. Keys are the long flag names without dashes
//! (`case`, `n`, `xi`, `eta`, `t`, `model`, `suite`, `seed`, `draws`,
//! `tol`, `json`, `csv`). `xi` takes a comma-separated list.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;
use vertex_core::appendix::CASES;
use vertex_core::verify::{Suite, Tolerances};
use vertex_core::ChainParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelChoice {
    #[value(name = "6vd")]
    SixVertex,
    #[value(name = "8v")]
    EightVertex,
    Both,
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as clap::ValueEnum>::from_str(s, false).map_err(|_| format!("unknown model {s:?} (6vd, 8v, both)"))
    }
}

/// Optional settings from one source; `merge` lets a later source win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub case: Option<usize>,
    pub n: Option<usize>,
    pub xi: Option<Vec<f64>>,
    pub eta: Option<f64>,
    pub t: Option<f64>,
    pub model: Option<ModelChoice>,
    pub suite: Option<Suite>,
    pub seed: Option<u64>,
    pub draws: Option<usize>,
    pub tol: Option<f64>,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.trim().parse().map_err(|_| format!("invalid value {value:?} for {key}"))
}

impl Settings {
    pub fn parse_file(text: &str) -> Result<Self, String> {
        let mut s = Self::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", k + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "case" => s.case = Some(parse(key, value)?),
                "n" => s.n = Some(parse(key, value)?),
                "xi" => s.xi = Some(value.split(',').map(|v| parse(key, v)).collect::<Result<_, _>>()?),
                "eta" => s.eta = Some(parse(key, value)?),
                "t" => s.t = Some(parse(key, value)?),
                "model" => s.model = Some(value.parse()?),
                "suite" => s.suite = Some(value.parse().map_err(|e: vertex_core::Error| e.to_string())?),
                "seed" => s.seed = Some(parse(key, value)?),
                "draws" => s.draws = Some(parse(key, value)?),
                "tol" => s.tol = Some(parse(key, value)?),
                "json" => s.json = Some(value.into()),
                "csv" => s.csv = Some(value.into()),
                _ => return Err(format!("config line {}: unknown key {key:?}", k + 1)),
            }
        }
        Ok(s)
    }

    pub fn merge(self, over: Settings) -> Settings {
        Settings {
            case: over.case.or(self.case),
            n: over.n.or(self.n),
            xi: over.xi.or(self.xi),
            eta: over.eta.or(self.eta),
            t: over.t.or(self.t),
            model: over.model.or(self.model),
            suite: over.suite.or(self.suite),
            seed: over.seed.or(self.seed),
            draws: over.draws.or(self.draws),
            tol: over.tol.or(self.tol),
            json: over.json.or(self.json),
            csv: over.csv.or(self.csv),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: Option<usize>,
    pub params: ChainParams,
    pub model: ModelChoice,
    pub suite: Suite,
    pub seed: u64,
    pub draws: usize,
    pub tol: Tolerances,
    /// Largest accepted deviation from the published tables.
    pub appendix_tol: f64,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

pub const APPENDIX_TOL: f64 = 1e-5;

/// Evenly spread inhomogeneities used when only `n` is given.
pub fn default_xi(n: usize) -> Vec<f64> {
    (0..n).map(|k| 0.3 + PI * k as f64 / (n as f64 + 0.5)).collect()
}

impl RunConfig {
    /// Parameters come from `case` (1 to 5) when given, otherwise from
    /// `xi`, `eta`, `t` with the first appendix set supplying defaults.
    /// `tol` sets the residual threshold, and for the appendix command the
    /// deviation threshold.
    pub fn resolve(s: Settings) -> Result<Self, String> {
        let base = match s.case {
            Some(c) if (1..=CASES.len()).contains(&c) => &CASES[c - 1],
            Some(c) => return Err(format!("case must be between 1 and {}, got {c}", CASES.len())),
            None => &CASES[0],
        };
        let xi = match (s.xi, s.n, s.case) {
            (Some(xi), Some(n), _) if xi.len() != n => {
                return Err(format!("n = {n} but {} inhomogeneities were given", xi.len()))
            }
            (Some(xi), _, _) => xi,
            (None, Some(n), _) if n % 2 == 0 => return Err(vertex_core::Error::EvenChain(n).to_string()),
            (None, Some(n), None) => default_xi(n),
            (None, Some(n), Some(c)) if n != 3 => return Err(format!("case {c} has 3 sites, not {n}")),
            (None, _, _) => base.xi.to_vec(),
        };
        let eta = s.eta.unwrap_or(base.eta);
        let nome = s.t.unwrap_or(base.nome);
        let params = ChainParams::real(&xi, eta, nome).map_err(|e| e.to_string())?;
        let mut tol = Tolerances::default();
        if let Some(t) = s.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("tol must be positive, got {t}"));
            }
            tol.residual = t;
        }
        Ok(Self {
            case: s.case,
            params,
            model: s.model.unwrap_or(ModelChoice::Both),
            suite: s.suite.unwrap_or(Suite::All),
            seed: s.seed.unwrap_or(1),
            draws: s.draws.unwrap_or(5).max(1),
            tol,
            appendix_tol: s.tol.unwrap_or(APPENDIX_TOL),
            json: s.json,
            csv: s.csv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_grammar() {
        let s = Settings::parse_file("# case 1\n\nxi = 0.1, 0.7 ,1.9\neta=0.5\nmodel = 8v\nsuite = ybe\n").unwrap();
        assert_eq!(s.xi, Some(vec![0.1, 0.7, 1.9]));
        assert_eq!(s.eta, Some(0.5));
        assert_eq!(s.model, Some(ModelChoice::EightVertex));
        assert_eq!(s.suite, Some(Suite::Ybe));
        assert!(Settings::parse_file("colour = blue").is_err());
        assert!(Settings::parse_file("eta 0.5").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file = Settings { eta: Some(0.5), seed: Some(3), ..Default::default() };
        let flags = Settings { eta: Some(0.9), ..Default::default() };
        let m = file.merge(flags);
        assert_eq!((m.eta, m.seed), (Some(0.9), Some(3)));
    }

    #[test]
    fn even_chains_are_rejected() {
        let err = RunConfig::resolve(Settings { n: Some(4), ..Default::default() }).unwrap_err();
        assert!(err.contains("odd"), "{err}");
        let err = RunConfig::resolve(Settings { xi: Some(vec![0.1, 0.9]), ..Default::default() }).unwrap_err();
        assert!(err.contains("odd"), "{err}");
    }

    #[test]
    fn default_inhomogeneities_are_generic() {
        for n in [1, 3, 5, 7, 9, 11] {
            let cfg = RunConfig::resolve(Settings { n: Some(n), ..Default::default() }).unwrap();
            assert_eq!(cfg.params.n, n);
        }
    }
}
