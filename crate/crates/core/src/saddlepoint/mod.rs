//! Saddlepoint approximation of the aggregate-SNR CDF.
//!
//! The combined SNR is `γ = Σ γ_l` over independent branches, so its CGF is
//! the sum of the branch CGFs. For a threshold `x` the saddlepoint `ŝ` solves
//! `κ'(ŝ) = x`; the Lugannani–Rice form then gives the CDF from
//! `ŵ = sign(ŝ)·√(2(ŝx − κ(ŝ)))` and `û = ŝ·√κ''(ŝ)`.

mod cdf;
mod solver;

pub use cdf::{
    outage_probability, spa_cdf, spa_cdf_from_solution, spa_cdf_simplified, spa_cdf_simplified_from_solution,
    spa_nakagami_iid_closed_form, CdfEstimate, CdfMeta, CdfMethod, OutageMethod,
};
pub use solver::{
    solve, solve_iid, solve_nakagami_pair, solve_newton, solve_unguarded, DEFAULT_K_MAX,
    DEFAULT_TOL, RESIDUAL_LIMIT,
};

use crate::error::{Error, Result};
use crate::fading::{BranchSpec, CgfJet, Family};

/// `L >= 1` independent branches whose SNRs add up.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEnsemble {
    branches: Vec<BranchSpec>,
}

impl ChannelEnsemble {
    pub fn new(branches: Vec<BranchSpec>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::param("branches", "an ensemble needs at least one branch"));
        }
        Ok(ChannelEnsemble { branches })
    }

    /// `count` copies of the same branch.
    pub fn iid(spec: BranchSpec, count: usize) -> Result<Self> {
        Self::new(vec![spec; count])
    }

    pub fn branches(&self) -> &[BranchSpec] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// `E[γ] = Σ γ̄_l`.
    pub fn mean(&self) -> f64 {
        self.branches.iter().map(BranchSpec::mean_snr).sum()
    }

    /// `κ''(0)`.
    pub fn variance(&self) -> f64 {
        self.branches.iter().map(BranchSpec::variance).sum()
    }

    /// `κ'''(0) = Σ κ'''_l(0)`.
    pub fn cgf_d3_at_zero(&self) -> f64 {
        self.branches.iter().map(BranchSpec::cgf_d3_at_zero).sum()
    }

    /// Smallest convergence supremum over the branches.
    pub fn domain_sup(&self) -> f64 {
        self.branches
            .iter()
            .map(BranchSpec::mgf_domain_sup)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn cgf_jet(&self, s: f64) -> Result<CgfJet> {
        self.branches
            .iter()
            .try_fold(CgfJet::ZERO, |acc, b| Ok(acc + b.cgf_jet(s)?))
    }

    /// `M(s) = Π M_l(s)`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.branches.iter().try_fold(1.0, |acc, b| Ok(acc * b.mgf(s)?))
    }

    /// The common branch and `L` when every branch is identical.
    pub fn as_iid(&self) -> Option<(BranchSpec, usize)> {
        let first = self.branches[0];
        self.branches
            .iter()
            .all(|b| *b == first)
            .then_some((first, self.branches.len()))
    }

    pub fn as_nakagami_pair(&self) -> Option<(BranchSpec, BranchSpec)> {
        match self.branches.as_slice() {
            [a, b] if a.family() == Family::Nakagami && b.family() == Family::Nakagami => {
                Some((*a, *b))
            }
            _ => None,
        }
    }
}

/// Positive half of the 16-point Gauss–Legendre rule on `[−1, 1]`.
const GAUSS_LEGENDRE_16: [(f64, f64); 8] = [
    (0.09501250983763745, 0.18945061045506859),
    (0.2816035507792589, 0.1826034150449236),
    (0.45801677765722737, 0.16915651939500262),
    (0.6178762444026438, 0.14959598881657676),
    (0.755404408355003, 0.12462897125553403),
    (0.8656312023878318, 0.09515851168249259),
    (0.9445750230732326, 0.062253523938647706),
    (0.9894009349916499, 0.027152459411754037),
];

impl ChannelEnsemble {
    /// `sκ'(s) − κ(s) = ∫₀^s tκ''(t) dt` by quadrature, for `s` far enough
    /// from the convergence boundary that the integrand is smooth. Near
    /// `s = 0` the direct difference loses most of its digits.
    fn conjugate_gap(&self, s: f64) -> Option<f64> {
        if s == 0.0 || s.abs() > 0.5 * self.domain_sup() {
            return None;
        }
        let half = 0.5 * s;
        let mut sum = 0.0;
        for (node, weight) in GAUSS_LEGENDRE_16 {
            for t in [half * (1.0 - node), half * (1.0 + node)] {
                sum += weight * t * self.cgf_jet(t).ok()?.d2;
            }
        }
        Some(sum * half)
    }
}

/// Sum of the per-branch CGF jets at `s`.
pub fn aggregate_cgf_jet(ens: &ChannelEnsemble, s: f64) -> Result<CgfJet> {
    ens.cgf_jet(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedFormIid,
    ClosedFormNakagamiPair,
    Newton,
    /// Plain Newton recursion from zero with a fixed step count.
    NewtonUnguarded,
    /// `x` coincides with the mean; `ŝ = 0` without solving.
    MeanPoint,
}

/// A root of `κ'(ŝ) = x` with the quantities the CDF formulas need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlepointSolution {
    pub x: f64,
    pub s_hat: f64,
    pub w_hat: f64,
    pub u_hat: f64,
    pub kappa_at: f64,
    /// `ŝx − κ(ŝ)`, evaluated without cancellation near `ŝ = 0`.
    pub gap: f64,
    pub d2_at: f64,
    pub method: SolveMethod,
    /// `|κ'(ŝ) − x| / x`.
    pub residual: f64,
    pub iterations: usize,
}

impl SaddlepointSolution {
    pub(crate) fn from_jet(
        ens: &ChannelEnsemble,
        x: f64,
        s: f64,
        jet: CgfJet,
        method: SolveMethod,
        iterations: usize,
    ) -> Self {
        let legendre = match ens.conjugate_gap(s) {
            // below the rounding level of κ'(ŝ) the residual term is noise
            Some(gap) if (x - jet.d1).abs() <= 16.0 * f64::EPSILON * x => gap,
            Some(gap) => gap + s * (x - jet.d1),
            None => s * x - jet.kappa,
        };
        let w = if s == 0.0 {
            0.0
        } else {
            s.signum() * (2.0 * legendre.max(0.0)).sqrt()
        };
        SaddlepointSolution {
            x,
            s_hat: s,
            w_hat: w,
            u_hat: s * jet.d2.sqrt(),
            kappa_at: jet.kappa,
            gap: legendre,
            d2_at: jet.d2,
            method,
            residual: (jet.d1 - x).abs() / x.max(f64::MIN_POSITIVE),
            iterations,
        }
    }

    pub(crate) fn evaluate(
        ens: &ChannelEnsemble,
        x: f64,
        s: f64,
        method: SolveMethod,
        iterations: usize,
    ) -> Result<Self> {
        let jet = ens.cgf_jet(s)?;
        Ok(Self::from_jet(ens, x, s, jet, method, iterations))
    }

    /// `ŝx − κ(ŝ)`, nonnegative at a true root.
    pub fn legendre_gap(&self) -> f64 {
        self.gap
    }
}
