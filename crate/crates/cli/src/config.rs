//! Run configuration: TOML file, then command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use sbtube::sbisometry::Route;
use sbtube::{QuadratureSpec, RootSystem, SpectralProfile};
use serde::Deserialize;

/// A configuration problem, reported with the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &str, message: impl Into<String>) -> Self {
        ConfigError { key: key.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// Either an explicit list or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range { min: f64, max: f64, step: f64 },
}

impl GridSpec {
    pub fn expand(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { min, max, step } => {
                if !(*step > 0.0) || !step.is_finite() {
                    return Err(ConfigError::new(key, "step must be positive"));
                }
                if !(max >= min) || !min.is_finite() || !max.is_finite() {
                    return Err(ConfigError::new(key, "need finite min <= max"));
                }
                let n = ((max - min) / step + 1e-9).floor() as usize;
                if n > 100_000 {
                    return Err(ConfigError::new(key, "range has more than 100000 points"));
                }
                (0..=n).map(|k| min + step * k as f64).collect()
            }
        };
        if v.is_empty() {
            return Err(ConfigError::new(key, "grid must be nonempty"));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(ConfigError::new(key, "grid values must be finite"));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ConfigError::new(key, "grid must be strictly increasing"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadOverrides {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_panels: Option<usize>,
}

/// Keys accepted in the configuration file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub space: Option<String>,
    pub t: Option<f64>,
    pub profile: Option<String>,
    #[serde(alias = "R_grid")]
    pub r_grid: Option<GridSpec>,
    pub s_grid: Option<GridSpec>,
    pub xi_grid: Option<GridSpec>,
    pub y_grid: Option<GridSpec>,
    pub x0: Option<f64>,
    pub routes: Option<Vec<String>>,
    #[serde(alias = "output_path")]
    pub output: Option<PathBuf>,
    pub timestamps: Option<bool>,
    pub quad: Option<QuadOverrides>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new("config", e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError::new("config", format!("{}: {}", path.display(), e.message)))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub t: Option<f64>,
    pub profile: Option<String>,
    pub space: Option<String>,
    pub tol: Option<f64>,
    pub timestamps: bool,
}

/// Validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub space_name: String,
    pub space: RootSystem,
    pub t: f64,
    pub profile_text: String,
    pub profile: SpectralProfile,
    pub r_grid: Option<Vec<f64>>,
    pub s_grid: Option<Vec<f64>>,
    pub xi_grid: Option<Vec<f64>>,
    pub y_grid: Option<Vec<f64>>,
    pub x0: f64,
    pub routes: Vec<Route>,
    pub output: Option<PathBuf>,
    pub timestamps: bool,
    pub quad: QuadratureSpec,
}

pub const DEFAULT_SPACE: &str = "h3";
pub const DEFAULT_T: f64 = 0.5;
pub const DEFAULT_PROFILE: &str = "heat:0.3";
pub const DEFAULT_X0: f64 = 0.3;

/// `heat:<s>`, `band:<a>` or a `*`-separated product such as
/// `band:12*heat:0.5`.
pub fn parse_profile(text: &str) -> Result<SpectralProfile, ConfigError> {
    let bad = || ConfigError::new("profile", format!("cannot parse '{text}' (expected heat:<s> or band:<a>)"));
    let mut shape: Option<SpectralProfile> = None;
    let mut heat = 0.0;
    for part in text.split('*') {
        let (kind, value) = part.trim().split_once(':').ok_or_else(bad)?;
        let x: f64 = value.trim().parse().map_err(|_| bad())?;
        if !(x > 0.0) || !x.is_finite() {
            return Err(ConfigError::new("profile", format!("parameter in '{part}' must be positive")));
        }
        match kind.trim() {
            "heat" => heat += x,
            "band" if shape.is_none() => {
                shape = Some(SpectralProfile::band(x).map_err(|e| ConfigError::new("profile", e.to_string()))?)
            }
            "band" => return Err(ConfigError::new("profile", "at most one band factor")),
            _ => return Err(bad()),
        }
    }
    let p = match shape {
        Some(b) => b.with_heat(heat),
        None if heat > 0.0 => {
            SpectralProfile::heat_kernel(heat).map_err(|e| ConfigError::new("profile", e.to_string()))?
        }
        None => return Err(bad()),
    };
    Ok(p)
}

fn grid(spec: &Option<GridSpec>, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
    spec.as_ref().map(|g| g.expand(key)).transpose()
}

impl RunConfig {
    pub fn resolve(file: FileConfig, cli: Overrides) -> Result<Self, ConfigError> {
        let space_name = cli.space.or(file.space).unwrap_or_else(|| DEFAULT_SPACE.to_string());
        let space = RootSystem::preset(&space_name).map_err(|_| {
            ConfigError::new("space", format!("unknown preset '{space_name}' (expected h3, a1, a1xa1 or a2)"))
        })?;
        let t = cli.t.or(file.t).unwrap_or(DEFAULT_T);
        if !(t > 0.0) || !t.is_finite() {
            return Err(ConfigError::new("t", "must be positive"));
        }
        let profile_text = cli.profile.or(file.profile).unwrap_or_else(|| DEFAULT_PROFILE.to_string());
        let profile = parse_profile(&profile_text)?;
        let routes = match file.routes {
            None => Route::ALL.to_vec(),
            Some(names) => {
                if names.is_empty() {
                    return Err(ConfigError::new("routes", "must name at least one route"));
                }
                let mut out = Vec::new();
                for n in &names {
                    let r = Route::from_name(n).ok_or_else(|| {
                        ConfigError::new(
                            "routes",
                            format!("unknown route '{n}' (expected euclid, geometric, direct, series or beta)"),
                        )
                    })?;
                    if !out.contains(&r) {
                        out.push(r);
                    }
                }
                out
            }
        };
        let q = file.quad.unwrap_or_default();
        let d = QuadratureSpec::default();
        let (abs_tol, rel_tol) = match cli.tol {
            Some(tol) => (tol, tol),
            None => (q.abs_tol.unwrap_or(d.abs_tol), q.rel_tol.unwrap_or(d.rel_tol)),
        };
        let quad = QuadratureSpec::new(abs_tol, rel_tol, q.max_panels.unwrap_or(d.max_panels))
            .map_err(|e| ConfigError::new(if cli.tol.is_some() { "tol" } else { "quad" }, e.to_string()))?;
        let x0 = file.x0.unwrap_or(DEFAULT_X0);
        if !x0.is_finite() {
            return Err(ConfigError::new("x0", "must be finite"));
        }
        let r_grid = grid(&file.r_grid, "r_grid")?;
        if let Some(g) = &r_grid {
            if g[0] <= 0.0 {
                return Err(ConfigError::new("r_grid", "radii must be positive"));
            }
        }
        let s_grid = grid(&file.s_grid, "s_grid")?;
        if let Some(g) = &s_grid {
            if g[0] < 0.0 {
                return Err(ConfigError::new("s_grid", "shell radii must be nonnegative"));
            }
        }
        let xi_grid = grid(&file.xi_grid, "xi_grid")?;
        if let Some(g) = &xi_grid {
            if g[0] <= 0.0 {
                return Err(ConfigError::new("xi_grid", "ξ values must be positive"));
            }
        }
        Ok(RunConfig {
            space_name,
            space,
            t,
            profile_text,
            profile,
            r_grid,
            s_grid,
            xi_grid,
            y_grid: grid(&file.y_grid, "y_grid")?,
            x0,
            routes,
            output: cli.out.or(file.output),
            timestamps: cli.timestamps || file.timestamps.unwrap_or(false),
            quad,
        })
    }

    pub fn require_h3(&self, command: &str) -> Result<(), ConfigError> {
        if self.space_name != "h3" {
            return Err(ConfigError::new(
                "space",
                format!("command '{command}' supports only the h3 preset, got '{}'", self.space_name),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_parsing() {
        assert_eq!(parse_profile("heat:0.3").unwrap(), SpectralProfile::heat_kernel(0.3).unwrap());
        assert_eq!(parse_profile("band:2").unwrap(), SpectralProfile::band(2.0).unwrap());
        assert_eq!(
            parse_profile("band:12*heat:0.5").unwrap(),
            SpectralProfile::band(12.0).unwrap().with_heat(0.5)
        );
        for bad in ["", "heat", "heat:-1", "gauss:1", "band:1*band:2", "heat:x"] {
            assert_eq!(parse_profile(bad).unwrap_err().key, "profile", "{bad}");
        }
    }

    #[test]
    fn grid_forms() {
        let f = FileConfig::parse("r_grid = [0.5, 1.0]\ns_grid = { min = 0.0, max = 1.0, step = 0.25 }").unwrap();
        assert_eq!(f.r_grid.unwrap().expand("r_grid").unwrap(), vec![0.5, 1.0]);
        assert_eq!(f.s_grid.unwrap().expand("s_grid").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(GridSpec::List(vec![]).expand("r_grid").is_err());
        assert!(GridSpec::List(vec![1.0, 0.5]).expand("r_grid").is_err());
        assert!(GridSpec::Range { min: 0.0, max: 1.0, step: 0.0 }.expand("r_grid").is_err());
    }

    #[test]
    fn unknown_key_is_reported_with_line() {
        let e = FileConfig::parse("t = 0.5\nbogus = 1\n").unwrap_err();
        assert!(e.message.contains("bogus") && e.message.contains("line 2"), "{}", e.message);
    }

    #[test]
    fn overrides_win() {
        let f = FileConfig::parse("t = 0.7\nprofile = \"band:2\"\nspace = \"a2\"").unwrap();
        let c = RunConfig::resolve(
            f,
            Overrides { t: Some(0.25), space: Some("h3".into()), tol: Some(1e-8), ..Default::default() },
        )
        .unwrap();
        assert_eq!((c.t, c.space_name.as_str(), c.profile_text.as_str()), (0.25, "h3", "band:2"));
        assert_eq!((c.quad.abs_tol, c.quad.rel_tol), (1e-8, 1e-8));
    }

    #[test]
    fn validation_errors_name_the_key() {
        let bad = |text: &str| RunConfig::resolve(FileConfig::parse(text).unwrap(), Overrides::default()).unwrap_err().key;
        assert_eq!(bad("space = \"e8\""), "space");
        assert_eq!(bad("t = -1.0"), "t");
        assert_eq!(bad("r_grid = []"), "r_grid");
        assert_eq!(bad("routes = [\"fast\"]"), "routes");
        assert_eq!(bad("[quad]\nabs_tol = 0.0"), "quad");
    }

    #[test]
    fn key_aliases() {
        let c = FileConfig::parse("R_grid = [1.0, 2.0]\noutput_path = \"x.csv\"\n").unwrap();
        assert!(c.r_grid.is_some());
        assert_eq!(c.output.as_deref(), Some(Path::new("x.csv")));
    }
}
