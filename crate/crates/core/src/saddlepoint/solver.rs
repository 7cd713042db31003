//! Roots of the saddlepoint equation `κ'(ŝ) = x`.

use super::{ChannelEnsemble, SaddlepointSolution, SolveMethod};
use crate::error::{Error, Result};
use crate::fading::{BranchSpec, Family};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_K_MAX: usize = 50;
/// Largest residual any returned solution may carry.
pub const RESIDUAL_LIMIT: f64 = 1e-8;
const BISECTION_STEPS: usize = 200;

fn check_threshold(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("threshold must be positive and finite, got {x}")));
    }
    Ok(())
}

/// Smaller root of `s² − 2As + C = 0`, written to avoid cancellation.
fn lower_quadratic_root(a: f64, c: f64) -> Result<f64> {
    let mut disc = a * a - c;
    if disc < 0.0 {
        if disc < -1e-12 * (a * a).max(c.abs()) {
            return Err(Error::domain(format!(
                "negative discriminant {disc:e} in closed-form saddlepoint root"
            )));
        }
        disc = 0.0;
    }
    let sq = disc.sqrt();
    if a <= 0.0 {
        Ok(a - sq)
    } else if a + sq == 0.0 {
        Ok(0.0)
    } else {
        // a − √(a² − c) = c / (a + √(a² − c))
        Ok(c / (a + sq))
    }
}

fn finish_closed_form(
    ens: &ChannelEnsemble,
    x: f64,
    s: f64,
    method: SolveMethod,
) -> Result<SaddlepointSolution> {
    if !(s < ens.domain_sup()) {
        return Err(Error::domain(format!(
            "closed-form root {s} lies outside the convergence region"
        )));
    }
    let sol = SaddlepointSolution::evaluate(ens, x, s, method, 0)?;
    if sol.residual > RESIDUAL_LIMIT {
        return Err(Error::domain(format!(
            "closed-form root failed the residual check ({:e})",
            sol.residual
        )));
    }
    Ok(sol)
}

/// Closed-form root for `count` identically distributed branches.
pub fn solve_iid(spec: BranchSpec, count: usize, x: f64) -> Result<SaddlepointSolution> {
    check_threshold(x)?;
    if count == 0 {
        return Err(Error::param("L", "number of branches must be at least 1"));
    }
    let ens = ChannelEnsemble::iid(spec, count)?;
    let l = count as f64;
    let g = spec.mean_snr();
    let s = match spec.family() {
        // m (1/γ̄ − L/x)
        Family::Nakagami => spec.shape() * (x - l * g) / (g * x),
        Family::Rice => {
            let kp_g = (spec.shape() + 1.0) / g;
            let a = kp_g - l / (2.0 * x);
            let c = kp_g * kp_g * (x - l * g) / x;
            lower_quadratic_root(a, c)?
        }
        Family::Hoyt => {
            let q = spec.shape();
            let qp = (q + 1.0) * (q + 1.0);
            let a = qp / (4.0 * q * g) - l / (2.0 * x);
            let c = qp * (x - l * g) / (4.0 * x * q * g * g);
            lower_quadratic_root(a, c)?
        }
    };
    finish_closed_form(&ens, x, s, SolveMethod::ClosedFormIid)
}

/// Closed-form root for two Nakagami branches with arbitrary `m` and `γ̄`.
pub fn solve_nakagami_pair(
    first: BranchSpec,
    second: BranchSpec,
    x: f64,
) -> Result<SaddlepointSolution> {
    check_threshold(x)?;
    if first.family() != Family::Nakagami || second.family() != Family::Nakagami {
        return Err(Error::UnsupportedMethod(
            "closed-form pair root needs two Nakagami branches".into(),
        ));
    }
    let (m1, g1) = (first.shape(), first.mean_snr());
    let (m2, g2) = (second.shape(), second.mean_snr());
    let g_sum = g1 + g2;
    let g_prod = g1 * g2;
    let m_sum = m1 + m2;
    let m_prod = m1 * m2;
    let beta = 0.5 * (m1 / g1 + m2 / g2);
    let a = beta - m_sum / (2.0 * x);
    let c = m_prod * (x - g_sum) / (x * g_prod);
    let s = lower_quadratic_root(a, c)?;
    let ens = ChannelEnsemble::new(vec![first, second])?;
    finish_closed_form(&ens, x, s, SolveMethod::ClosedFormNakagamiPair)
}

/// Bracketed Newton iteration on `κ'(s) = x` with a bisection fallback.
///
/// The first Newton iterate starts from the root of a single-gamma model
/// that matches `κ'(0)` and `κ''(0)`. Steps leaving the current bracket, or
/// landing where the CGF cannot be evaluated, are replaced by bisection.
/// Once the residual is below `tol` one more Newton step is taken if it
/// does not increase the residual.
pub fn solve_newton(
    ens: &ChannelEnsemble,
    x: f64,
    k_max: usize,
    tol: f64,
) -> Result<SaddlepointSolution> {
    check_threshold(x)?;
    let mean = ens.mean();
    if x == mean {
        return SaddlepointSolution::evaluate(ens, x, 0.0, SolveMethod::Newton, 0);
    }
    let var = ens.variance();
    let sup = ens.domain_sup();

    let (mut lo, mut hi) = if x < mean {
        let mut s_lo = -1.0 / x;
        loop {
            if ens.cgf_jet(s_lo)?.d1 < x {
                break;
            }
            s_lo *= 2.0;
            if !s_lo.is_finite() {
                return Err(Error::Convergence {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            }
        }
        (s_lo, 0.0)
    } else {
        (0.0, sup)
    };

    let guess = (mean / var) * (1.0 - mean / x);
    let mut s = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut jet = ens.cgf_jet(s)?;
    let mut newton_steps = 0;
    let mut bisections = 0;

    loop {
        let r = jet.d1 - x;
        if r.abs() / x <= tol {
            break;
        }
        if r < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let step = s - r / jet.d2;
        let next = if newton_steps < k_max && step.is_finite() && step > lo && step < hi {
            newton_steps += 1;
            step
        } else {
            if bisections >= BISECTION_STEPS {
                return Err(Error::Convergence {
                    iterations: newton_steps + bisections,
                    residual: r.abs() / x,
                });
            }
            bisections += 1;
            0.5 * (lo + hi)
        };
        match ens.cgf_jet(next) {
            Ok(j) if j.d1.is_finite() && j.d2.is_finite() && j.d2 > 0.0 => {
                s = next;
                jet = j;
            }
            _ => {
                // unusable point: shrink the bracket from above
                hi = next;
            }
        }
    }

    let iterations = newton_steps + bisections;
    let r = jet.d1 - x;
    if r != 0.0 {
        let polished = s - r / jet.d2;
        if polished.is_finite() && polished < sup {
            if let Ok(j) = ens.cgf_jet(polished) {
                if (j.d1 - x).abs() <= r.abs() {
                    s = polished;
                    jet = j;
                }
            }
        }
    }
    Ok(SaddlepointSolution::from_jet(
        ens,
        x,
        s,
        jet,
        SolveMethod::Newton,
        iterations,
    ))
}

/// Exactly `k_max` plain Newton steps from `ŝ₀ = 0`, without any safeguard.
///
/// The returned residual is whatever the recursion reached; it is not
/// checked. Fails only if an iterate leaves the convergence region.
pub fn solve_unguarded(ens: &ChannelEnsemble, x: f64, k_max: usize) -> Result<SaddlepointSolution> {
    check_threshold(x)?;
    let mut s = 0.0;
    let mut jet = ens.cgf_jet(s)?;
    for _ in 0..k_max {
        s += (x - jet.d1) / jet.d2;
        jet = ens.cgf_jet(s)?;
    }
    Ok(SaddlepointSolution::from_jet(
        ens,
        x,
        s,
        jet,
        SolveMethod::NewtonUnguarded,
        k_max,
    ))
}

/// Solve with the cheapest applicable method: identical branches, then a
/// Nakagami pair, then safeguarded Newton.
pub fn solve(ens: &ChannelEnsemble, x: f64) -> Result<SaddlepointSolution> {
    check_threshold(x)?;
    if let Some((spec, count)) = ens.as_iid() {
        if let Ok(sol) = solve_iid(spec, count, x) {
            return Ok(sol);
        }
    } else if let Some((a, b)) = ens.as_nakagami_pair() {
        if let Ok(sol) = solve_nakagami_pair(a, b, x) {
            return Ok(sol);
        }
    }
    let sol = solve_newton(ens, x, DEFAULT_K_MAX, DEFAULT_TOL)?;
    if sol.residual > RESIDUAL_LIMIT {
        return Err(Error::Convergence {
            iterations: sol.iterations,
            residual: sol.residual,
        });
    }
    Ok(sol)
}
