//! Per-branch fading models and their cumulant generating functions.
//!
//! Each branch SNR `γ_l` has mean `γ̄_l` (linear scale) and one shape
//! parameter. The CGF `κ_l(s) = ln E[exp(s γ_l)]` and its first two
//! derivatives are evaluated in closed form.
//!
//! Hoyt fading uses the `q' = (q + 1)²` parametrisation, so that
//! `M(s) = (1 - 2sγ̄ + q(2sγ̄)²/q')^{-1/2}`. Note that this differs from the
//! more common Nakagami-q convention `q²/(1 + q²)²`; a Hoyt branch with
//! parameter `q` here is a different distribution than one with the same `q`
//! in texts using the latter form. Internally the Hoyt SNR is the weighted
//! sum `a X² + b Y²` of two squared standard normals, with `a + b = γ̄` and
//! `ab = γ̄² q/q'`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Nakagami,
    Rice,
    Hoyt,
}

impl Family {
    /// Name of the shape parameter: `m`, `k` or `q`.
    pub fn shape_key(self) -> &'static str {
        match self {
            Family::Nakagami => "m",
            Family::Rice => "k",
            Family::Hoyt => "q",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Nakagami => "nakagami",
            Family::Rice => "rice",
            Family::Hoyt => "hoyt",
        })
    }
}

/// One diversity branch: fading family, shape parameter and mean SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSpec {
    family: Family,
    shape: f64,
    mean_snr: f64,
}

/// CGF value and first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgfJet {
    pub kappa: f64,
    pub d1: f64,
    pub d2: f64,
}

impl CgfJet {
    pub const ZERO: CgfJet = CgfJet {
        kappa: 0.0,
        d1: 0.0,
        d2: 0.0,
    };

    pub fn scaled(self, n: f64) -> CgfJet {
        CgfJet {
            kappa: n * self.kappa,
            d1: n * self.d1,
            d2: n * self.d2,
        }
    }
}

impl std::ops::Add for CgfJet {
    type Output = CgfJet;

    fn add(self, o: CgfJet) -> CgfJet {
        CgfJet {
            kappa: self.kappa + o.kappa,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

/// Check a branch's invariants and hand it back unchanged.
pub fn validate(spec: BranchSpec) -> Result<BranchSpec> {
    BranchSpec::new(spec.family, spec.shape, spec.mean_snr)
}

impl BranchSpec {
    pub fn new(family: Family, shape: f64, mean_snr: f64) -> Result<Self> {
        if !(mean_snr > 0.0) || !mean_snr.is_finite() {
            return Err(Error::param(
                "mean_snr",
                format!("must be positive and finite, got {mean_snr}"),
            ));
        }
        let ok = shape.is_finite()
            && match family {
                Family::Nakagami => shape >= 0.5,
                Family::Rice => shape >= 0.0,
                Family::Hoyt => shape > 0.0 && shape <= 1.0,
            };
        if !ok {
            let range = match family {
                Family::Nakagami => "m >= 0.5",
                Family::Rice => "k >= 0",
                Family::Hoyt => "0 < q <= 1",
            };
            return Err(Error::param(
                family.shape_key(),
                format!("{family} shape must satisfy {range}, got {shape}"),
            ));
        }
        Ok(BranchSpec {
            family,
            shape,
            mean_snr,
        })
    }

    pub fn nakagami(m: f64, mean_snr: f64) -> Result<Self> {
        Self::new(Family::Nakagami, m, mean_snr)
    }

    pub fn rice(k: f64, mean_snr: f64) -> Result<Self> {
        Self::new(Family::Rice, k, mean_snr)
    }

    pub fn hoyt(q: f64, mean_snr: f64) -> Result<Self> {
        Self::new(Family::Hoyt, q, mean_snr)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn mean_snr(&self) -> f64 {
        self.mean_snr
    }

    /// `K' = K + 1` for Rice branches.
    fn k_prime(&self) -> f64 {
        self.shape + 1.0
    }

    /// `q/q'` with `q' = (q + 1)²` for Hoyt branches.
    fn hoyt_ratio(&self) -> f64 {
        let q = self.shape;
        q / ((q + 1.0) * (q + 1.0))
    }

    /// Weights `(a, b)`, `a >= b > 0`, of the two squared normals making up a
    /// Hoyt SNR: the roots of `t² - γ̄ t + γ̄² q/q' = 0`.
    pub fn hoyt_scales(&self) -> (f64, f64) {
        let g = self.mean_snr;
        let r = self.hoyt_ratio();
        // 1 - 4q/q' = ((1 - q)/(1 + q))²
        let q = self.shape;
        let root = ((1.0 - q) / (1.0 + q)).abs();
        let a = 0.5 * g * (1.0 + root);
        let b = g * g * r / a;
        (a, b)
    }

    /// Supremum of the MGF convergence region.
    pub fn mgf_domain_sup(&self) -> f64 {
        match self.family {
            Family::Nakagami => self.shape / self.mean_snr,
            Family::Rice => self.k_prime() / self.mean_snr,
            Family::Hoyt => 0.5 / self.hoyt_scales().0,
        }
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        if s.is_nan() || s >= self.mgf_domain_sup() {
            return Err(Error::domain(format!(
                "s = {s} outside the MGF convergence region (sup {}) of {} branch",
                self.mgf_domain_sup(),
                self.family
            )));
        }
        Ok(())
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        if s == 0.0 {
            return Ok(1.0);
        }
        let g = self.mean_snr;
        Ok(match self.family {
            Family::Nakagami => {
                let m = self.shape;
                (m / (m - s * g)).powf(m)
            }
            Family::Rice => {
                let (k, kp) = (self.shape, self.k_prime());
                kp / (kp - s * g) * (k * s * g / (kp - s * g)).exp()
            }
            Family::Hoyt => {
                let (a, b) = self.hoyt_scales();
                ((1.0 - 2.0 * a * s) * (1.0 - 2.0 * b * s)).powf(-0.5)
            }
        })
    }

    /// `(κ, κ', κ'')` at `s`.
    pub fn cgf_jet(&self, s: f64) -> Result<CgfJet> {
        self.check_domain(s)?;
        let g = self.mean_snr;
        if s == 0.0 {
            return Ok(CgfJet {
                kappa: 0.0,
                d1: g,
                d2: self.variance(),
            });
        }
        Ok(match self.family {
            Family::Nakagami => {
                let m = self.shape;
                let u = s * g / m;
                let one_minus = 1.0 - u;
                CgfJet {
                    kappa: -m * (-u).ln_1p(),
                    d1: g / one_minus,
                    d2: g * g / (m * one_minus * one_minus),
                }
            }
            Family::Rice => {
                let (k, kp) = (self.shape, self.k_prime());
                let v = s * g / kp;
                let den = kp - s * g;
                CgfJet {
                    kappa: -(-v).ln_1p() + k * v / (1.0 - v),
                    d1: (kp * kp - s * g) * g / (den * den),
                    d2: (kp * (1.0 + 2.0 * k) - s * g) * g * g / (den * den * den),
                }
            }
            Family::Hoyt => {
                // κ = -½[ln(1 - 2as) + ln(1 - 2bs)]
                let (a, b) = self.hoyt_scales();
                let ea = 1.0 - 2.0 * a * s;
                let eb = 1.0 - 2.0 * b * s;
                CgfJet {
                    kappa: -0.5 * ((-2.0 * a * s).ln_1p() + (-2.0 * b * s).ln_1p()),
                    d1: a / ea + b / eb,
                    d2: 2.0 * a * a / (ea * ea) + 2.0 * b * b / (eb * eb),
                }
            }
        })
    }

    /// `κ''(0)`, the SNR variance.
    pub fn variance(&self) -> f64 {
        let g = self.mean_snr;
        match self.family {
            Family::Nakagami => g * g / self.shape,
            Family::Rice => {
                let kp = self.k_prime();
                g * g * (1.0 + 2.0 * self.shape) / (kp * kp)
            }
            Family::Hoyt => 2.0 * g * g * (1.0 - 2.0 * self.hoyt_ratio()),
        }
    }

    /// `κ'''(0)`, the third cumulant.
    pub fn cgf_d3_at_zero(&self) -> f64 {
        let g3 = self.mean_snr.powi(3);
        match self.family {
            Family::Nakagami => 2.0 * g3 / (self.shape * self.shape),
            Family::Rice => {
                let kp = self.k_prime();
                2.0 * (1.0 + 3.0 * self.shape) * g3 / (kp * kp * kp)
            }
            Family::Hoyt => -8.0 * g3 * (3.0 * self.hoyt_ratio() - 1.0),
        }
    }
}

pub fn mgf(spec: &BranchSpec, s: f64) -> Result<f64> {
    spec.mgf(s)
}

pub fn cgf_jet(spec: &BranchSpec, s: f64) -> Result<CgfJet> {
    spec.cgf_jet(s)
}

pub fn cgf_d3_at_zero(spec: &BranchSpec) -> f64 {
    spec.cgf_d3_at_zero()
}

pub fn mgf_domain_sup(spec: &BranchSpec) -> f64 {
    spec.mgf_domain_sup()
}
