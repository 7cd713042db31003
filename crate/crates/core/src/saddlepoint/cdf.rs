use std::f64::consts::PI;

use super::{solve, ChannelEnsemble, SaddlepointSolution, SolveMethod};
use crate::error::{Error, Result};
use crate::fading::Family;
use crate::numerics::{std_normal_pdf, std_normal_tail};
use crate::oracles::{exact_nakagami_iid_cdf, monte_carlo_cdf, McConfig, McEstimate};

/// Relative distance to the mean, in standard deviations, below which the
/// mean-point formula replaces the general one.
const MEAN_BRANCH_WIDTH: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfMethod {
    SpaFull,
    SpaSimplified,
    ExactNakagamiIid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdfMeta {
    None,
    Saddlepoint {
        solution: SaddlepointSolution,
        /// Value before clamping to `[0, 1]`.
        raw: f64,
        out_of_validity: bool,
    },
    MonteCarlo(McEstimate),
}

/// A CDF value together with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEstimate {
    pub value: f64,
    pub method: CdfMethod,
    pub meta: CdfMeta,
}

impl CdfEstimate {
    fn from_raw(raw: f64, method: CdfMethod, solution: SaddlepointSolution) -> Self {
        let out_of_validity = !(0.0..=1.0).contains(&raw);
        let value = if raw.is_nan() { 1.0 } else { raw.clamp(0.0, 1.0) };
        CdfEstimate {
            value,
            method,
            meta: CdfMeta::Saddlepoint {
                solution,
                raw,
                out_of_validity,
            },
        }
    }

    pub fn solution(&self) -> Option<&SaddlepointSolution> {
        match &self.meta {
            CdfMeta::Saddlepoint { solution, .. } => Some(solution),
            _ => None,
        }
    }

    pub fn out_of_validity(&self) -> bool {
        matches!(
            self.meta,
            CdfMeta::Saddlepoint {
                out_of_validity: true,
                ..
            }
        )
    }
}

fn check_threshold(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("threshold must be positive and finite, got {x}")));
    }
    Ok(())
}

fn mean_point_value(ens: &ChannelEnsemble) -> f64 {
    let var = ens.variance();
    0.5 + ens.cgf_d3_at_zero() / (6.0 * (2.0 * PI).sqrt() * var * var.sqrt())
}

fn near_mean(ens: &ChannelEnsemble, x: f64) -> bool {
    (x - ens.mean()).abs() <= MEAN_BRANCH_WIDTH * ens.variance().sqrt()
}

/// Lugannani–Rice saddlepoint CDF at `x`.
pub fn spa_cdf(ens: &ChannelEnsemble, x: f64) -> Result<CdfEstimate> {
    check_threshold(x)?;
    if near_mean(ens, x) {
        let sol = SaddlepointSolution::evaluate(ens, x, 0.0, SolveMethod::MeanPoint, 0)?;
        return Ok(CdfEstimate::from_raw(
            mean_point_value(ens),
            CdfMethod::SpaFull,
            sol,
        ));
    }
    let sol = solve(ens, x)?;
    Ok(spa_cdf_from_solution(ens, &sol))
}

/// Lugannani–Rice CDF for an already computed saddlepoint, whatever solver
/// produced it.
pub fn spa_cdf_from_solution(ens: &ChannelEnsemble, sol: &SaddlepointSolution) -> CdfEstimate {
    let raw = if sol.s_hat == 0.0 {
        mean_point_value(ens)
    } else {
        let w = sol.w_hat;
        std_normal_tail(-w) + std_normal_pdf(w) * (1.0 / w - 1.0 / sol.u_hat)
    };
    CdfEstimate::from_raw(raw, CdfMethod::SpaFull, *sol)
}

/// Lower-tail saddlepoint form `M(ŝ) e^{−ŝx} / (|ŝ| √(2π κ''(ŝ)))`, valid for
/// `x` strictly below the mean.
pub fn spa_cdf_simplified(ens: &ChannelEnsemble, x: f64) -> Result<CdfEstimate> {
    check_threshold(x)?;
    let mean = ens.mean();
    if x >= mean {
        return Err(Error::domain(format!(
            "simplified approximation needs x below the mean {mean}, got {x}"
        )));
    }
    let sol = solve(ens, x)?;
    spa_cdf_simplified_from_solution(&sol)
}

/// Simplified form for an already computed saddlepoint.
pub fn spa_cdf_simplified_from_solution(sol: &SaddlepointSolution) -> Result<CdfEstimate> {
    if !(sol.s_hat < 0.0) {
        return Err(Error::domain(format!(
            "simplified approximation needs a negative saddlepoint, got {}",
            sol.s_hat
        )));
    }
    let log_value = -sol.gap
        - sol.s_hat.abs().ln()
        - 0.5 * (2.0 * PI * sol.d2_at).ln();
    Ok(CdfEstimate::from_raw(
        log_value.exp(),
        CdfMethod::SpaSimplified,
        *sol,
    ))
}

/// Simplified saddlepoint CDF for `L` i.i.d. Nakagami branches, in closed
/// form without a root solve.
pub fn spa_nakagami_iid_closed_form(
    m: f64,
    mean_snr: f64,
    count: usize,
    x: f64,
) -> Result<CdfEstimate> {
    check_threshold(x)?;
    if count == 0 {
        return Err(Error::param("L", "number of branches must be at least 1"));
    }
    let spec = crate::fading::BranchSpec::nakagami(m, mean_snr)?;
    let l = count as f64;
    let total = l * mean_snr;
    if x >= total {
        return Err(Error::domain(format!(
            "closed form needs x below the mean {total}, got {x}"
        )));
    }
    let ml = m * l;
    let rho = x / total;
    let log_value = ml * rho.ln() - 0.5 * (2.0 * PI * ml).ln() - (-rho).ln_1p() - ml * (rho - 1.0);
    let s = m * (x - total) / (mean_snr * x);
    let ens = ChannelEnsemble::iid(spec, count)?;
    let sol = SaddlepointSolution::evaluate(&ens, x, s, SolveMethod::ClosedFormIid, 0)?;
    Ok(CdfEstimate::from_raw(
        log_value.exp(),
        CdfMethod::SpaSimplified,
        sol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutageMethod {
    SpaFull,
    SpaSimplified,
    ExactNakagamiIid,
    MonteCarlo(McConfig),
}

/// `P_out = Pr{γ < γ_th}` by the requested method.
pub fn outage_probability(
    ens: &ChannelEnsemble,
    gamma_th: f64,
    method: OutageMethod,
) -> Result<CdfEstimate> {
    check_threshold(gamma_th)?;
    match method {
        OutageMethod::SpaFull => spa_cdf(ens, gamma_th),
        OutageMethod::SpaSimplified => spa_cdf_simplified(ens, gamma_th),
        OutageMethod::ExactNakagamiIid => {
            let (spec, count) = ens
                .as_iid()
                .filter(|(b, _)| b.family() == Family::Nakagami)
                .ok_or_else(|| {
                    Error::UnsupportedMethod(
                        "exact CDF is only available for identical Nakagami branches".into(),
                    )
                })?;
            let value = exact_nakagami_iid_cdf(spec.shape(), spec.mean_snr(), count, gamma_th)?;
            Ok(CdfEstimate {
                value,
                method: CdfMethod::ExactNakagamiIid,
                meta: CdfMeta::None,
            })
        }
        OutageMethod::MonteCarlo(cfg) => {
            let est = monte_carlo_cdf(ens, gamma_th, &cfg)?;
            Ok(CdfEstimate {
                value: est.value,
                method: CdfMethod::MonteCarlo,
                meta: CdfMeta::MonteCarlo(est),
            })
        }
    }
}
