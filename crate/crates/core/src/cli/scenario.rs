//! Scenario requests: what to evaluate, on which grid, and how to print it.
//!
//! A scenario file is TOML with the top-level keys `methods`, `branches`,
//! `grid`, and optionally `mc`, `paper_mode` and `output`. Unknown keys are
//! rejected. Mean SNRs and thresholds are given in dB.
//!
//! ```toml
//! methods = ["spa", "spa-simple", "exact"]
//!
//! [[branches]]
//! family = "nakagami"
//! m = 2.0
//! mean_snr_db = 5.0
//!
//! [grid]
//! x_start_db = -10.0
//! x_stop_db = 10.0
//! points = 41
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{BranchSpec, Family};
use crate::numerics::db_to_linear;
use crate::oracles::McConfig;
use crate::saddlepoint::ChannelEnsemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Spa,
    SpaSimple,
    Exact,
    Mc,
}

impl MethodName {
    pub const ALL: [MethodName; 4] = [
        MethodName::Spa,
        MethodName::SpaSimple,
        MethodName::Exact,
        MethodName::Mc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Spa => "spa",
            MethodName::SpaSimple => "spa-simple",
            MethodName::Exact => "exact",
            MethodName::Mc => "mc",
        }
    }

    /// CSV/JSON column name.
    pub fn column(self) -> &'static str {
        match self {
            MethodName::Spa => "spa",
            MethodName::SpaSimple => "spa_simple",
            MethodName::Exact => "exact",
            MethodName::Mc => "mc",
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodName::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown method `{s}` (expected one of spa, spa-simple, exact, mc)"
                ))
            })
    }
}

/// Comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<MethodName>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Thresholds in dB.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range {
        start_db: f64,
        stop_db: f64,
        points: usize,
    },
    List(Vec<f64>),
}

impl Grid {
    pub fn validate(&self) -> Result<()> {
        match self {
            Grid::Range {
                start_db,
                stop_db,
                points,
            } => {
                if *points < 2 {
                    return Err(Error::param("grid.points", "need at least 2 points"));
                }
                if !(start_db.is_finite() && stop_db.is_finite() && start_db < stop_db) {
                    return Err(Error::param(
                        "grid",
                        format!("start {start_db} dB must be below stop {stop_db} dB"),
                    ));
                }
            }
            Grid::List(xs) => {
                if xs.is_empty() {
                    return Err(Error::param("grid.x_db", "list is empty"));
                }
                if xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::param("grid.x_db", "values must be finite and strictly increasing"));
                }
            }
        }
        Ok(())
    }

    pub fn points_db(&self) -> Vec<f64> {
        match self {
            Grid::Range {
                start_db,
                stop_db,
                points,
            } => {
                let step = (stop_db - start_db) / (*points - 1) as f64;
                (0..*points)
                    .map(|i| {
                        if i + 1 == *points {
                            *stop_db
                        } else {
                            start_db + i as f64 * step
                        }
                    })
                    .collect()
            }
            Grid::List(xs) => xs.clone(),
        }
    }

    /// `a:b:n` for a range, otherwise a single value or comma list.
    pub fn parse(text: &str) -> Result<Grid> {
        let bad = |what: &str| Error::Usage(format!("bad --x-db value `{text}`: {what}"));
        let grid = if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected start:stop:points"));
            }
            Grid::Range {
                start_db: parts[0].trim().parse().map_err(|_| bad("start"))?,
                stop_db: parts[1].trim().parse().map_err(|_| bad("stop"))?,
                points: parts[2].trim().parse().map_err(|_| bad("points"))?,
            }
        } else {
            Grid::List(
                text.split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad("number")))
                    .collect::<Result<_>>()?,
            )
        };
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Usage(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// `None` writes to stdout.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaperMode {
    pub k_max: usize,
}

/// One branch as written in a scenario, mean SNR in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEntry {
    pub family: Family,
    pub shape: f64,
    pub mean_snr_db: f64,
}

impl BranchEntry {
    pub fn to_spec(&self) -> Result<BranchSpec> {
        BranchSpec::new(self.family, self.shape, db_to_linear(self.mean_snr_db))
    }

    /// `family:shape:mean_db`, e.g. `nakagami:2:5`.
    pub fn parse(text: &str) -> Result<BranchEntry> {
        let bad = || Error::Usage(format!("bad --branch `{text}`: expected family:shape:mean_db"));
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let [family, shape, mean] = parts.as_slice() else {
            return Err(bad());
        };
        let family = match *family {
            "nakagami" => Family::Nakagami,
            "rice" => Family::Rice,
            "hoyt" => Family::Hoyt,
            _ => return Err(bad()),
        };
        Ok(BranchEntry {
            family,
            shape: shape.parse().map_err(|_| bad())?,
            mean_snr_db: mean.parse().map_err(|_| bad())?,
        })
    }
}

/// A validated request. The ensemble is built once from `branches`, with the
/// dB to linear conversion happening there.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRequest {
    branches: Vec<BranchEntry>,
    ensemble: ChannelEnsemble,
    pub grid: Grid,
    pub methods: Vec<MethodName>,
    pub mc: Option<McConfig>,
    pub paper_mode: Option<PaperMode>,
    pub output: OutputSpec,
}

impl ScenarioRequest {
    pub fn new(
        branches: Vec<BranchEntry>,
        grid: Grid,
        methods: Vec<MethodName>,
        mc: Option<McConfig>,
        paper_mode: Option<PaperMode>,
        output: OutputSpec,
    ) -> Result<Self> {
        let specs = branches
            .iter()
            .map(BranchEntry::to_spec)
            .collect::<Result<Vec<_>>>()?;
        let ensemble = ChannelEnsemble::new(specs)?;
        let req = ScenarioRequest {
            branches,
            ensemble,
            grid,
            methods,
            mc,
            paper_mode,
            output,
        };
        req.validate()?;
        Ok(req)
    }

    fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.methods.is_empty() {
            return Err(Error::param("methods", "at least one method is required"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::param("methods", format!("`{m}` listed twice")));
            }
        }
        if let Some(mc) = &self.mc {
            mc.validate()?;
        }
        Ok(())
    }

    pub fn branches(&self) -> &[BranchEntry] {
        &self.branches
    }

    pub fn ensemble(&self) -> &ChannelEnsemble {
        &self.ensemble
    }

    pub fn set_branches(&mut self, branches: Vec<BranchEntry>) -> Result<()> {
        let specs = branches
            .iter()
            .map(BranchEntry::to_spec)
            .collect::<Result<Vec<_>>>()?;
        self.ensemble = ChannelEnsemble::new(specs)?;
        self.branches = branches;
        Ok(())
    }

    /// Thresholds in linear scale, in grid order.
    pub fn thresholds(&self) -> Vec<f64> {
        self.grid.points_db().into_iter().map(db_to_linear).collect()
    }

    /// The Monte Carlo settings, defaulted when `mc` was requested without a
    /// configuration block.
    pub fn mc_config(&self) -> McConfig {
        self.mc.unwrap_or_default()
    }

    pub fn to_toml(&self) -> String {
        let doc = RawScenario::from(self);
        toml::to_string(&doc).expect("scenario serialises to TOML")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    methods: Vec<MethodName>,
    branches: Vec<RawBranch>,
    grid: RawGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mc: Option<McConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    paper_mode: Option<PaperMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    mean_snr_db: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_start_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_stop_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_db: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default)]
    format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
}

impl From<&ScenarioRequest> for RawScenario {
    fn from(req: &ScenarioRequest) -> Self {
        let branches = req
            .branches
            .iter()
            .map(|b| {
                let mut raw = RawBranch {
                    family: b.family,
                    m: None,
                    k: None,
                    q: None,
                    mean_snr_db: b.mean_snr_db,
                };
                match b.family {
                    Family::Nakagami => raw.m = Some(b.shape),
                    Family::Rice => raw.k = Some(b.shape),
                    Family::Hoyt => raw.q = Some(b.shape),
                }
                raw
            })
            .collect();
        let grid = match &req.grid {
            Grid::Range {
                start_db,
                stop_db,
                points,
            } => RawGrid {
                x_start_db: Some(*start_db),
                x_stop_db: Some(*stop_db),
                points: Some(*points),
                x_db: None,
            },
            Grid::List(xs) => RawGrid {
                x_db: Some(xs.clone()),
                ..RawGrid::default()
            },
        };
        let output = (req.output != OutputSpec::default()).then(|| RawOutput {
            format: req.output.format,
            path: req.output.path.clone(),
        });
        RawScenario {
            methods: req.methods.clone(),
            branches,
            grid,
            mc: req.mc,
            paper_mode: req.paper_mode,
            output,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn convert_branch(i: usize, raw: RawBranch) -> Result<BranchEntry> {
    let key = raw.family.shape_key();
    let given: Vec<(&str, f64)> = [("m", raw.m), ("k", raw.k), ("q", raw.q)]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    let field = format!("branches[{i}].{key}");
    match given.as_slice() {
        [(k, v)] if *k == key => Ok(BranchEntry {
            family: raw.family,
            shape: *v,
            mean_snr_db: raw.mean_snr_db,
        }),
        [] => Err(Error::Parse {
            line: None,
            message: format!("`{field}` is required for a {} branch", raw.family),
        }),
        _ => Err(Error::Parse {
            line: None,
            message: format!(
                "{} branch {i} takes exactly one shape key `{key}`, got {:?}",
                raw.family,
                given.iter().map(|(k, _)| *k).collect::<Vec<_>>()
            ),
        }),
    }
}

/// Parse and validate a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioRequest> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let branches = raw
        .branches
        .into_iter()
        .enumerate()
        .map(|(i, b)| convert_branch(i, b))
        .collect::<Result<Vec<_>>>()?;
    let grid = match raw.grid {
        RawGrid {
            x_start_db: Some(start_db),
            x_stop_db: Some(stop_db),
            points: Some(points),
            x_db: None,
        } => Grid::Range {
            start_db,
            stop_db,
            points,
        },
        RawGrid {
            x_start_db: None,
            x_stop_db: None,
            points: None,
            x_db: Some(xs),
        } => Grid::List(xs),
        _ => {
            return Err(Error::Parse {
                line: None,
                message: "grid needs either x_start_db, x_stop_db and points, or x_db".into(),
            })
        }
    };
    let output = raw
        .output
        .map(|o| OutputSpec {
            format: o.format,
            path: o.path,
        })
        .unwrap_or_default();
    ScenarioRequest::new(branches, grid, raw.methods, raw.mc, raw.paper_mode, output)
}

pub fn parse_scenario_file(path: &Path) -> Result<ScenarioRequest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Command-line inputs, before validation. Either `scenario` or `preset`
/// supplies the base request unless `branches` is given; the remaining
/// fields override it.
#[derive(Debug, Clone, Default)]
pub struct ScenarioFlags {
    pub scenario: Option<PathBuf>,
    pub preset: Option<String>,
    pub branches: Vec<String>,
    pub l: Option<usize>,
    pub mean_db: Option<f64>,
    pub x_db: Option<String>,
    pub methods: Option<String>,
    pub mc_samples: Option<u64>,
    pub seed: Option<u64>,
    pub confidence: Option<f64>,
    pub paper_mode_kmax: Option<usize>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
}

impl ScenarioRequest {
    pub fn from_flags(flags: &ScenarioFlags) -> Result<ScenarioRequest> {
        let sources = flags.scenario.is_some() as u8
            + flags.preset.is_some() as u8
            + (!flags.branches.is_empty()) as u8;
        if sources != 1 {
            return Err(Error::Usage(
                "give exactly one of --scenario, --preset or --branch".into(),
            ));
        }
        if flags.preset.is_none() && (flags.l.is_some() || flags.mean_db.is_some()) {
            return Err(Error::Usage("--L and --mean-db only apply to presets".into()));
        }
        let mut req = if let Some(path) = &flags.scenario {
            parse_scenario_file(path)?
        } else if let Some(name) = &flags.preset {
            super::presets::preset(name, flags.l, flags.mean_db)?
        } else {
            let branches = flags
                .branches
                .iter()
                .map(|b| BranchEntry::parse(b))
                .collect::<Result<Vec<_>>>()?;
            let grid = flags
                .x_db
                .as_deref()
                .map(Grid::parse)
                .transpose()?
                .ok_or_else(|| Error::Usage("--branch needs --x-db".into()))?;
            ScenarioRequest::new(
                branches,
                grid,
                vec![MethodName::Spa],
                None,
                None,
                OutputSpec::default(),
            )?
        };

        if let Some(x) = &flags.x_db {
            req.grid = Grid::parse(x)?;
        }
        if let Some(m) = &flags.methods {
            req.methods = parse_methods(m)?;
        }
        if flags.mc_samples.is_some() || flags.seed.is_some() || flags.confidence.is_some() {
            let mut mc = req.mc_config();
            if let Some(n) = flags.mc_samples {
                mc.samples = n;
            }
            if let Some(s) = flags.seed {
                mc.seed = s;
            }
            if let Some(c) = flags.confidence {
                mc.confidence = c;
            }
            req.mc = Some(mc);
        }
        if let Some(k) = flags.paper_mode_kmax {
            req.paper_mode = Some(PaperMode { k_max: k });
        }
        if let Some(f) = &flags.format {
            req.output.format = f.parse()?;
        }
        if let Some(p) = &flags.out {
            req.output.path = Some(p.clone());
        }
        req.validate()?;
        Ok(req)
    }
}
