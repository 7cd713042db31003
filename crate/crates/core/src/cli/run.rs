use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{MethodName, OutputFormat, ScenarioRequest};
use crate::error::{Error, Result};
use crate::oracles::{monte_carlo_cdf_grid, McEstimate};
use crate::saddlepoint::{
    outage_probability, solve, solve_unguarded, spa_cdf, spa_cdf_from_solution,
    spa_cdf_simplified, spa_cdf_simplified_from_solution, ChannelEnsemble, OutageMethod,
    SaddlepointSolution,
};

/// Region of reference values that `compare` looks at.
pub const COMPARE_RANGE: (f64, f64) = (1e-6, 1e-1);

/// One evaluated grid: a row per threshold, a column per method.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub x_db: Vec<f64>,
    pub methods: Vec<MethodName>,
    /// `values[row][method]`; `None` where the method is undefined.
    pub values: Vec<Vec<Option<f64>>>,
    /// Monte Carlo estimates per row when `mc` was requested.
    pub mc: Option<Vec<McEstimate>>,
    /// Per-point failures, in grid order.
    pub notes: Vec<String>,
}

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn check_methods(req: &ScenarioRequest) -> Result<()> {
    if req.methods.contains(&MethodName::Exact) {
        let iid_nakagami = req
            .ensemble()
            .as_iid()
            .is_some_and(|(b, _)| b.family() == crate::fading::Family::Nakagami);
        if !iid_nakagami {
            return Err(Error::UnsupportedMethod(
                "exact (needs identical Nakagami branches)".into(),
            ));
        }
    }
    Ok(())
}

/// Saddlepoint at `x`, honouring the request's paper mode.
pub fn request_solution(req: &ScenarioRequest, x: f64) -> Result<SaddlepointSolution> {
    match req.paper_mode {
        Some(p) => solve_unguarded(req.ensemble(), x, p.k_max),
        None => solve(req.ensemble(), x),
    }
}

fn point_value(req: &ScenarioRequest, method: MethodName, x: f64) -> Result<f64> {
    let ens: &ChannelEnsemble = req.ensemble();
    let est = match (method, req.paper_mode) {
        (MethodName::Spa, Some(p)) => {
            spa_cdf_from_solution(ens, &solve_unguarded(ens, x, p.k_max)?)
        }
        (MethodName::Spa, None) => spa_cdf(ens, x)?,
        (MethodName::SpaSimple, Some(p)) => {
            if x >= ens.mean() {
                return spa_cdf_simplified(ens, x).map(|e| e.value);
            }
            spa_cdf_simplified_from_solution(&solve_unguarded(ens, x, p.k_max)?)?
        }
        (MethodName::SpaSimple, None) => spa_cdf_simplified(ens, x)?,
        (MethodName::Exact, _) => outage_probability(ens, x, OutageMethod::ExactNakagamiIid)?,
        (MethodName::Mc, _) => unreachable!("mc is evaluated over the whole grid"),
    };
    Ok(est.value)
}

/// Evaluate every requested method on the grid.
///
/// Grid points run in parallel; `workers` pins the thread count. Output is
/// independent of it.
pub fn run_curve(req: &ScenarioRequest, workers: Option<usize>) -> Result<CurveTable> {
    check_methods(req)?;
    let x_db = req.grid.points_db();
    let xs = req.thresholds();
    with_workers(workers, || {
        let mc = if req.methods.contains(&MethodName::Mc) {
            Some(monte_carlo_cdf_grid(req.ensemble(), &xs, &req.mc_config())?)
        } else {
            None
        };
        let rows: Vec<(Vec<Option<f64>>, Vec<String>)> = xs
            .par_iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut notes = Vec::new();
                let row = req
                    .methods
                    .iter()
                    .map(|&m| {
                        if m == MethodName::Mc {
                            return mc.as_ref().map(|v| v[i].value);
                        }
                        match point_value(req, m, x) {
                            Ok(v) => Some(v),
                            Err(e) => {
                                notes.push(format!("x_db={:.6} {m}: {e}", x_db[i]));
                                None
                            }
                        }
                    })
                    .collect();
                (row, notes)
            })
            .collect();
        let (values, notes): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Ok(CurveTable {
            x_db: x_db.clone(),
            methods: req.methods.clone(),
            values,
            mc,
            notes: notes.into_iter().flatten().collect(),
        })
    })?
}

/// Nine significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.8e}")
}

impl CurveTable {
    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["x_db".to_string()];
        for m in &self.methods {
            cols.push(m.column().to_string());
        }
        if self.mc.is_some() {
            cols.push("mc_ci_low".into());
            cols.push("mc_ci_high".into());
        }
        cols
    }

    fn row_cells(&self, i: usize) -> Vec<Option<f64>> {
        let mut cells = vec![Some(self.x_db[i])];
        cells.extend(self.values[i].iter().copied());
        if let Some(mc) = &self.mc {
            cells.push(Some(mc[i].ci_low));
            cells.push(Some(mc[i].ci_high));
        }
        cells
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns().join(",");
        out.push('\n');
        for i in 0..self.x_db.len() {
            let cells: Vec<String> = self
                .row_cells(i)
                .into_iter()
                .enumerate()
                .map(|(j, c)| match (j, c) {
                    (0, Some(x)) => format!("{x:.6}"),
                    (_, Some(v)) => format_value(v),
                    (_, None) => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            columns: Vec<String>,
            rows: Vec<Vec<Option<f64>>>,
        }
        let doc = Doc {
            columns: self.columns(),
            rows: (0..self.x_db.len()).map(|i| self.row_cells(i)).collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("curve serialises to JSON");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareThresholds {
    pub max_rel_dev: f64,
    pub median_rel_dev: f64,
}

impl Default for CompareThresholds {
    fn default() -> Self {
        CompareThresholds {
            max_rel_dev: 0.1,
            median_rel_dev: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub reference: MethodName,
    pub other: MethodName,
    /// Grid points where both methods are defined and the reference lies in
    /// [`COMPARE_RANGE`].
    pub points: usize,
    pub max_rel_dev: f64,
    pub median_rel_dev: f64,
    /// Points where the non-MC value falls outside the MC interval, when
    /// one side of the pair is `mc`.
    pub outside_ci: Option<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub pairs: Vec<PairReport>,
    pub thresholds: CompareThresholds,
    pub pass: bool,
}

impl CompareReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "reference range [{:e}, {:e}], thresholds: max {:e}, median {:e}",
            COMPARE_RANGE.0, COMPARE_RANGE.1, self.thresholds.max_rel_dev, self.thresholds.median_rel_dev
        );
        for p in &self.pairs {
            let _ = write!(
                s,
                "{} vs {}: points {} max_rel_dev {} median_rel_dev {}",
                p.other,
                p.reference,
                p.points,
                format_value(p.max_rel_dev),
                format_value(p.median_rel_dev)
            );
            if let Some(n) = p.outside_ci {
                let _ = write!(s, " outside_ci {n}");
            }
            let _ = writeln!(s, " {}", if p.pass { "PASS" } else { "FAIL" });
        }
        let _ = writeln!(s, "{}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Deviation of every other method from the first one listed.
pub fn run_compare(
    req: &ScenarioRequest,
    thresholds: CompareThresholds,
    workers: Option<usize>,
) -> Result<CompareReport> {
    if req.methods.len() < 2 {
        return Err(Error::Usage("compare needs at least two methods".into()));
    }
    let table = run_curve(req, workers)?;
    let reference = req.methods[0];
    let pairs: Vec<PairReport> = (1..req.methods.len())
        .map(|j| {
            let other = req.methods[j];
            let mut devs = Vec::new();
            let mut outside = 0usize;
            for (i, row) in table.values.iter().enumerate() {
                let (Some(r), Some(o)) = (row[0], row[j]) else {
                    continue;
                };
                if !(COMPARE_RANGE.0..=COMPARE_RANGE.1).contains(&r) {
                    continue;
                }
                devs.push(((o - r) / r).abs());
                if let Some(mc) = &table.mc {
                    let test = match (reference, other) {
                        (MethodName::Mc, _) => Some(o),
                        (_, MethodName::Mc) => Some(r),
                        _ => None,
                    };
                    if let Some(v) = test {
                        if !mc[i].contains(v) {
                            outside += 1;
                        }
                    }
                }
            }
            let points = devs.len();
            let max = devs.iter().copied().fold(0.0, f64::max);
            let med = median(&mut devs);
            let outside_ci = (reference == MethodName::Mc || other == MethodName::Mc)
                .then_some(outside);
            let pass = points > 0
                && max <= thresholds.max_rel_dev
                && med <= thresholds.median_rel_dev
                && outside_ci.unwrap_or(0) == 0;
            PairReport {
                reference,
                other,
                points,
                max_rel_dev: max,
                median_rel_dev: med,
                outside_ci,
                pass,
            }
        })
        .collect();
    let pass = pairs.iter().all(|p| p.pass);
    Ok(CompareReport {
        pairs,
        thresholds,
        pass,
    })
}

/// Saddlepoint diagnostics at each grid point.
pub fn run_solve(req: &ScenarioRequest) -> Vec<(f64, Result<SaddlepointSolution>)> {
    req.grid
        .points_db()
        .into_iter()
        .zip(req.thresholds())
        .map(|(db, x)| (db, request_solution(req, x)))
        .collect()
}

pub fn render_solutions(rows: &[(f64, Result<SaddlepointSolution>)]) -> String {
    let mut s = String::from("x_db,x,s_hat,w_hat,u_hat,residual,iterations,method\n");
    for (db, r) in rows {
        match r {
            Ok(sol) => {
                let _ = writeln!(
                    s,
                    "{db:.6},{},{},{},{},{},{},{:?}",
                    format_value(sol.x),
                    format_value(sol.s_hat),
                    format_value(sol.w_hat),
                    format_value(sol.u_hat),
                    format_value(sol.residual),
                    sol.iterations,
                    sol.method
                );
            }
            Err(_) => {
                let _ = writeln!(s, "{db:.6},,,,,,,");
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::presets::preset;
    use crate::cli::scenario::Grid;

    #[test]
    fn curve_single_point_matches_library() {
        let mut req = preset("fig2a", None, None).unwrap();
        req.grid = Grid::List(vec![3.0]);
        req.methods = vec![MethodName::Spa];
        let t = run_curve(&req, None).unwrap();
        let x = crate::numerics::db_to_linear(3.0);
        let want = outage_probability(req.ensemble(), x, OutageMethod::SpaFull).unwrap();
        assert_eq!(t.values[0][0], Some(want.value));
    }

    #[test]
    fn simplified_beyond_mean_is_empty_cell() {
        let mut req = preset("fig1-rice", None, None).unwrap();
        let mean_db = crate::numerics::linear_to_db(req.ensemble().mean());
        req.grid = Grid::List(vec![mean_db - 3.0, mean_db + 1.0]);
        let t = run_curve(&req, None).unwrap();
        assert!(t.values[0][1].is_some());
        assert!(t.values[1][1].is_none());
        assert_eq!(t.notes.len(), 1);
        let csv = t.to_csv();
        assert!(csv.lines().nth(2).unwrap().ends_with(','));
    }

    #[test]
    fn exact_on_mixture_fails_fast() {
        let mut req = preset("fig3", None, None).unwrap();
        req.methods = vec![MethodName::Spa, MethodName::Exact];
        assert!(matches!(run_curve(&req, None), Err(Error::UnsupportedMethod(_))));
    }

    #[test]
    fn compare_needs_two_methods() {
        let mut req = preset("fig1-nakagami", None, None).unwrap();
        req.methods = vec![MethodName::Spa];
        assert!(matches!(
            run_compare(&req, CompareThresholds::default(), None),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn json_has_nulls() {
        let mut req = preset("fig1-hoyt", None, None).unwrap();
        let mean_db = crate::numerics::linear_to_db(req.ensemble().mean());
        req.grid = Grid::List(vec![mean_db + 1.0]);
        let v: serde_json::Value = serde_json::from_str(&run_curve(&req, None).unwrap().to_json()).unwrap();
        assert_eq!(v["columns"][2], "spa_simple");
        assert!(v["rows"][0][2].is_null());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
