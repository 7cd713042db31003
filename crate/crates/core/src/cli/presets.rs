//! Built-in scenarios: identical-branch sweeps for each family and two-branch mixtures.

use super::scenario::{
    BranchEntry, Grid, MethodName, OutputSpec, PaperMode, ScenarioRequest,
};
use crate::error::{Error, Result};
use crate::fading::Family;
use crate::numerics::{db_to_linear, linear_to_db};

/// Per-branch mean SNR of every preset unless overridden.
pub const DEFAULT_MEAN_DB: f64 = 5.0;
/// Largest `L` the identical-branch presets offer.
pub const MAX_BRANCHES: usize = 8;
pub const DEFAULT_L: usize = 2;
/// Unguarded Newton steps replayed by the `fig3` preset.
pub const FIG3_K_MAX: usize = 5;

pub const PRESETS: &[(&str, &str)] = &[
    ("fig1-nakagami", "L identical Nakagami-m branches, m = 2 (L = 1..8, default 2)"),
    ("fig1-rice", "L identical Rice branches, K = 2 (L = 1..8, default 2)"),
    ("fig1-hoyt", "L identical Hoyt branches, q = 0.5 (L = 1..8, default 2)"),
    ("fig2a", "two Nakagami branches, m1 = 1, m2 = 2, mean2 = 2 x mean1"),
    ("fig2b", "two Nakagami branches, m1 = 0.5, m2 = 2.5, mean2 = 2 x mean1"),
    ("fig3", "Nakagami m = 1.5 plus Rice K = 5, mean2 = 2 x mean1, 5 unguarded Newton steps"),
];

/// Default x-grid: from 20 dB below to 3 dB above the combined mean, 0.5 dB
/// apart.
fn default_grid(branches: &[BranchEntry]) -> Grid {
    let total: f64 = branches.iter().map(|b| db_to_linear(b.mean_snr_db)).sum();
    let centre = linear_to_db(total).round();
    Grid::Range {
        start_db: centre - 20.0,
        stop_db: centre + 3.0,
        points: 47,
    }
}

/// `10 log10(2)`: the second branch of the two-branch presets is 3.01 dB up.
fn doubled_db(db: f64) -> f64 {
    db + linear_to_db(2.0)
}

pub fn preset(name: &str, l: Option<usize>, mean_db: Option<f64>) -> Result<ScenarioRequest> {
    let g1 = mean_db.unwrap_or(DEFAULT_MEAN_DB);
    let iid = |family: Family, shape: f64| -> Result<Vec<BranchEntry>> {
        let count = l.unwrap_or(DEFAULT_L);
        if count == 0 || count > MAX_BRANCHES {
            return Err(Error::param(
                "L",
                format!("preset `{name}` offers 1..={MAX_BRANCHES} branches, got {count}"),
            ));
        }
        Ok(vec![
            BranchEntry {
                family,
                shape,
                mean_snr_db: g1,
            };
            count
        ])
    };
    let pair = |f1: Family, s1: f64, f2: Family, s2: f64| -> Result<Vec<BranchEntry>> {
        if l.is_some() {
            return Err(Error::Usage(format!("preset `{name}` has a fixed L = 2")));
        }
        Ok(vec![
            BranchEntry {
                family: f1,
                shape: s1,
                mean_snr_db: g1,
            },
            BranchEntry {
                family: f2,
                shape: s2,
                mean_snr_db: doubled_db(g1),
            },
        ])
    };

    use MethodName::*;
    let (branches, methods, paper_mode) = match name {
        "fig1-nakagami" => (iid(Family::Nakagami, 2.0)?, vec![Spa, SpaSimple, Exact], None),
        "fig1-rice" => (iid(Family::Rice, 2.0)?, vec![Spa, SpaSimple], None),
        "fig1-hoyt" => (iid(Family::Hoyt, 0.5)?, vec![Spa, SpaSimple], None),
        "fig2a" => (
            pair(Family::Nakagami, 1.0, Family::Nakagami, 2.0)?,
            vec![Spa, SpaSimple],
            None,
        ),
        "fig2b" => (
            pair(Family::Nakagami, 0.5, Family::Nakagami, 2.5)?,
            vec![Spa, SpaSimple],
            None,
        ),
        "fig3" => (
            pair(Family::Nakagami, 1.5, Family::Rice, 5.0)?,
            vec![Spa, SpaSimple],
            Some(PaperMode { k_max: FIG3_K_MAX }),
        ),
        _ => {
            return Err(Error::Usage(format!(
                "unknown preset `{name}`; known presets: {}",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            )))
        }
    };
    let grid = default_grid(&branches);
    ScenarioRequest::new(
        branches,
        grid,
        methods,
        None,
        paper_mode,
        OutputSpec::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_nakagami_offers_up_to_eight() {
        for l in [2, 5, 8] {
            let req = preset("fig1-nakagami", Some(l), None).unwrap();
            let ens = req.ensemble();
            assert_eq!(ens.len(), l);
            let (b, _) = ens.as_iid().unwrap();
            assert_eq!(b.family(), Family::Nakagami);
            assert_eq!(b.shape(), 2.0);
            assert!((b.mean_snr() - 3.1622776601683795).abs() < 1e-15);
        }
        assert!(preset("fig1-nakagami", Some(9), None).is_err());
    }

    #[test]
    fn fig2b_parameters() {
        let req = preset("fig2b", None, None).unwrap();
        let b = req.ensemble().branches();
        assert_eq!((b[0].shape(), b[1].shape()), (0.5, 2.5));
        assert!((b[1].mean_snr() / b[0].mean_snr() - 2.0).abs() < 1e-14);
        assert!(preset("fig2b", Some(3), None).is_err());
    }

    #[test]
    fn fig3_parameters() {
        let req = preset("fig3", None, Some(8.0)).unwrap();
        let b = req.ensemble().branches();
        assert_eq!(b[0].family(), Family::Nakagami);
        assert_eq!(b[0].shape(), 1.5);
        assert_eq!(b[1].family(), Family::Rice);
        assert_eq!(b[1].shape(), 5.0);
        assert!((b[1].mean_snr() / b[0].mean_snr() - 2.0).abs() < 1e-14);
        assert_eq!(req.paper_mode, Some(PaperMode { k_max: 5 }));
    }

    #[test]
    fn every_listed_preset_builds() {
        for (name, _) in PRESETS {
            preset(name, None, None).unwrap();
        }
        assert!(matches!(preset("fig4", None, None), Err(Error::Usage(_))));
    }
}
