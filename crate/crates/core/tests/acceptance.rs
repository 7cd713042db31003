//! Acceptance suite. Run with `cargo test --test acceptance`; prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use saddle_outage::cli::preset;
use saddle_outage::numerics::{central_diff, db_to_linear};
use saddle_outage::saddlepoint::{
    solve, solve_iid, solve_nakagami_pair, solve_newton, solve_unguarded, spa_cdf,
    spa_cdf_simplified, spa_nakagami_iid_closed_form, DEFAULT_K_MAX, DEFAULT_TOL,
};
use saddle_outage::{
    exact_nakagami_iid_cdf, monte_carlo_cdf, BranchSpec, ChannelEnsemble, Family, McConfig,
};

/// Regression bounds may grow by at most this factor over the frozen values.
const ENVELOPE_SLACK: f64 = 1.05;

/// Frozen `max |F̂ − F|/F` for m = 2, γ̄ = 5 dB over `F ∈ [1e−6, 1e−1]`.
const EXACT_ENVELOPE: [(usize, f64); 3] = [(2, 9.590834e-3), (5, 1.283826e-3), (8, 4.365274e-4)];

/// Frozen `max |F̃ − F̂|/F̂` over `F̂ ∈ [1e−6, 1e−2]`, per preset and `L`.
const SIMPLIFIED_ENVELOPE: [(&str, Option<usize>, f64); 11] = [
    ("fig1-nakagami", Some(2), 7.489413e-2),
    ("fig1-nakagami", Some(5), 9.305678e-2),
    ("fig1-nakagami", Some(8), 1.010527e-1),
    ("fig1-rice", Some(2), 6.914332e-2),
    ("fig1-rice", Some(5), 9.314736e-2),
    ("fig1-rice", Some(8), 1.055866e-1),
    ("fig1-hoyt", Some(2), 5.590175e-2),
    ("fig1-hoyt", Some(5), 7.946150e-2),
    ("fig1-hoyt", Some(8), 8.581998e-2),
    ("fig2a", None, 6.769057e-2),
    ("fig2b", None, 6.753585e-2),
];

const SOLVE_RESIDUAL: f64 = 1e-8;
const ROOT_REL: f64 = 1e-10;
const ROOT_ABS: f64 = 1e-12;
const PAPER_MODE_RESIDUAL: f64 = 1e-6;
const PAPER_MODE_STEPS: usize = 5;
const FD_DERIVATIVE_REL: f64 = 1e-6;
const FD_THIRD_REL: f64 = 1e-4;
const IDENTITY_REL: f64 = 1e-12;
const MC_SAMPLES: u64 = 10_000_000;
const MC_CONFIDENCE: f64 = 0.99;
const MC_SEED: u64 = 0x5eed;

/// Thresholds from −40 dB to 20 dB, 0.25 dB apart.
fn fine_grid() -> impl Iterator<Item = f64> {
    (0..=240).map(|i| db_to_linear(-40.0 + 0.25 * i as f64))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ensemble_of(name: &str, l: Option<usize>, mean_db: Option<f64>) -> ChannelEnsemble {
    preset(name, l, mean_db).unwrap().ensemble().clone()
}

fn random_branch(rng: &mut ChaCha8Rng, family: Family) -> BranchSpec {
    let mean = db_to_linear(rng.random_range(-10.0..20.0));
    let shape = match family {
        Family::Nakagami => rng.random_range(0.5..10.0),
        Family::Rice => rng.random_range(0.0..20.0),
        Family::Hoyt => rng.random_range(0.05..=1.0),
    };
    BranchSpec::new(family, shape, mean).unwrap()
}

fn random_family(rng: &mut ChaCha8Rng) -> Family {
    [Family::Nakagami, Family::Rice, Family::Hoyt][rng.random_range(0..3)]
}

/// A threshold between `10⁻⁴` and `4` times the mean.
fn random_threshold(rng: &mut ChaCha8Rng, ens: &ChannelEnsemble) -> f64 {
    ens.mean() * 10f64.powf(rng.random_range(-4.0..4f64.log10()))
}

fn exact_oracle_envelope() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (l, frozen) in EXACT_ENVELOPE {
        let ens = ensemble_of("fig1-nakagami", Some(l), None);
        let (b, n) = ens.as_iid().unwrap();
        let mut worst: f64 = 0.0;
        let mut points = 0;
        for x in fine_grid() {
            let exact = exact_nakagami_iid_cdf(b.shape(), b.mean_snr(), n, x).unwrap();
            if !(1e-6..=1e-1).contains(&exact) {
                continue;
            }
            points += 1;
            worst = worst.max(rel(spa_cdf(&ens, x).unwrap().value, exact));
        }
        pass &= points > 0 && worst <= ENVELOPE_SLACK * frozen;
        details.push(format!("L={l} max {worst:.4e} (frozen {frozen:.4e}, {points} pts)"));
    }
    outcome(pass, details.join("; "))
}

fn simplified_envelope() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for (name, l, frozen) in SIMPLIFIED_ENVELOPE {
        let ens = ensemble_of(name, l, None);
        let mut worst: f64 = 0.0;
        let mut deep = (f64::INFINITY, f64::NAN);
        let mut shallow = (f64::INFINITY, f64::NAN);
        for x in fine_grid().filter(|&x| x < ens.mean()) {
            let full = spa_cdf(&ens, x).unwrap().value;
            if !(1e-6..=1e-2).contains(&full) {
                continue;
            }
            let dev = rel(spa_cdf_simplified(&ens, x).unwrap().value, full);
            worst = worst.max(dev);
            let d = (full.log10() + 6.0).abs();
            if d < deep.0 {
                deep = (d, dev);
            }
            let d = (full.log10() + 2.0).abs();
            if d < shallow.0 {
                shallow = (d, dev);
            }
        }
        worst_ratio = worst_ratio.max(worst / frozen);
        if !(worst <= ENVELOPE_SLACK * frozen) {
            failures.push(format!("{name} L={l:?} max {worst:.4e} > frozen {frozen:.4e}"));
        }
        if !(deep.1 < shallow.1) {
            failures.push(format!(
                "{name} L={l:?} no tightening: {:.3e} at 1e-6 vs {:.3e} at 1e-2",
                deep.1, shallow.1
            ));
        }
    }
    if failures.is_empty() {
        outcome(
            true,
            format!("{} cases, worst/frozen {worst_ratio:.4}", SIMPLIFIED_ENVELOPE.len()),
        )
    } else {
        outcome(false, failures.join("; "))
    }
}

fn saddlepoint_residual() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for _ in 0..10_000 {
        let l = rng.random_range(1..=8);
        let ens = if rng.random_bool(0.5) {
            let family = random_family(&mut rng);
            ChannelEnsemble::iid(random_branch(&mut rng, family), l).unwrap()
        } else {
            let branches = (0..l)
                .map(|_| {
                    let f = random_family(&mut rng);
                    random_branch(&mut rng, f)
                })
                .collect();
            ChannelEnsemble::new(branches).unwrap()
        };
        let x = random_threshold(&mut rng, &ens);
        match solve(&ens, x) {
            Ok(sol) => {
                let d1 = ens.cgf_jet(sol.s_hat).unwrap().d1;
                worst = worst.max((d1 - x).abs() / x);
            }
            Err(_) => errors += 1,
        }
    }
    outcome(
        worst <= SOLVE_RESIDUAL && errors == 0,
        format!("10000 cases, max residual {worst:.3e}, {errors} errors"),
    )
}

fn roots_agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= (ROOT_REL * b.abs()).max(ROOT_ABS)
}

fn closed_form_vs_newton() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    for i in 0..5_000 {
        let (ens, closed) = if i < 3_000 {
            let family = [Family::Nakagami, Family::Rice, Family::Hoyt][i % 3];
            let spec = random_branch(&mut rng, family);
            let l = rng.random_range(1..=8);
            let ens = ChannelEnsemble::iid(spec, l).unwrap();
            let x = random_threshold(&mut rng, &ens);
            (ens, solve_iid(spec, l, x))
        } else {
            let a = random_branch(&mut rng, Family::Nakagami);
            let b = random_branch(&mut rng, Family::Nakagami);
            let ens = ChannelEnsemble::new(vec![a, b]).unwrap();
            let x = random_threshold(&mut rng, &ens);
            (ens, solve_nakagami_pair(a, b, x))
        };
        let closed = closed.unwrap();
        let newton = solve_newton(&ens, closed.x, DEFAULT_K_MAX, DEFAULT_TOL).unwrap();
        if !roots_agree(closed.s_hat, newton.s_hat) {
            bad.push(format!("case {i}: {:e} vs {:e}", closed.s_hat, newton.s_hat));
        }
    }
    outcome(
        bad.is_empty(),
        format!("5000 cases, {} disagree {}", bad.len(), bad.iter().take(3).cloned().collect::<Vec<_>>().join(", ")),
    )
}

fn paper_mode_newton() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for g1 in [5.0, 8.0, 12.0] {
        let ens = ensemble_of("fig3", None, Some(g1));
        let mut points = 0;
        let mut failing = 0;
        let mut worst: f64 = 0.0;
        for x in fine_grid() {
            let full = spa_cdf(&ens, x).unwrap().value;
            if !(1e-6..=1e-1).contains(&full) {
                continue;
            }
            points += 1;
            let residual = solve_unguarded(&ens, x, PAPER_MODE_STEPS)
                .map(|s| s.residual)
                .unwrap_or(f64::INFINITY);
            worst = worst.max(residual);
            if !(residual <= PAPER_MODE_RESIDUAL) {
                failing += 1;
            }
        }
        pass &= points > 0 && failing == 0;
        details.push(format!("γ̄1={g1} dB: {failing}/{points} above, max {worst:.3e}"));
    }
    outcome(pass, details.join("; "))
}

fn cgf_finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = [0.0f64; 3];
    for family in [Family::Nakagami, Family::Rice, Family::Hoyt] {
        for _ in 0..1_000 {
            let b = random_branch(&mut rng, family);
            let g = b.mean_snr();
            let s = rng.random_range(-20.0 / g..0.5 * b.mgf_domain_sup());
            let h = 1e-4 * (s * g).abs().max(1.0) / g;
            let jet = b.cgf_jet(s).unwrap();
            let d1 = central_diff(|t| b.cgf_jet(t).unwrap().kappa, s, 1, h).unwrap();
            let d2 = central_diff(|t| b.cgf_jet(t).unwrap().d1, s, 1, h).unwrap();
            let d3 = central_diff(|t| b.cgf_jet(t).unwrap().d2, 0.0, 1, 1e-4 / g).unwrap();
            worst[0] = worst[0].max(rel(d1, jet.d1));
            worst[1] = worst[1].max(rel(d2, jet.d2));
            worst[2] = worst[2].max(rel(d3, b.cgf_d3_at_zero()));
        }
    }
    outcome(
        worst[0] <= FD_DERIVATIVE_REL && worst[1] <= FD_DERIVATIVE_REL && worst[2] <= FD_THIRD_REL,
        format!(
            "3000 draws, max rel κ' {:.2e}, κ'' {:.2e}, κ'''(0) {:.2e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

/// Threshold where `cdf` crosses `target`, by bisection in log scale.
fn threshold_at(cdf: impl Fn(f64) -> f64, mean: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = ((mean * 1e-8).ln(), mean.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid.exp()) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

fn monte_carlo_triangle() -> Outcome {
    let cfg = McConfig {
        samples: MC_SAMPLES,
        seed: MC_SEED,
        confidence: MC_CONFIDENCE,
    };
    let mut misses = Vec::new();
    let mut checks = 0;
    for name in ["fig1-nakagami", "fig1-rice", "fig1-hoyt", "fig2a", "fig2b", "fig3"] {
        let ens = ensemble_of(name, None, None);
        let exact = ens
            .as_iid()
            .filter(|(b, _)| b.family() == Family::Nakagami)
            .map(|(b, n)| move |x: f64| exact_nakagami_iid_cdf(b.shape(), b.mean_snr(), n, x).unwrap());
        for target in [1e-2, 1e-3, 1e-4] {
            let x = match &exact {
                Some(f) => threshold_at(f, ens.mean(), target),
                None => threshold_at(|x| spa_cdf(&ens, x).unwrap().value, ens.mean(), target),
            };
            let mc = monte_carlo_cdf(&ens, x, &cfg).unwrap();
            let spa = spa_cdf(&ens, x).unwrap().value;
            checks += 1;
            if !mc.contains(spa) {
                misses.push(format!(
                    "{name}@{target:e}: F̂ {spa:.5e} outside [{:.5e}, {:.5e}]",
                    mc.ci_low, mc.ci_high
                ));
            }
            if let Some(f) = &exact {
                checks += 1;
                let e = f(x);
                if !mc.contains(e) {
                    misses.push(format!(
                        "{name}@{target:e}: exact {e:.5e} outside [{:.5e}, {:.5e}]",
                        mc.ci_low, mc.ci_high
                    ));
                }
            }
        }
    }
    outcome(
        misses.is_empty(),
        format!("{checks} containment checks, {} misses {}", misses.len(), misses.join("; ")),
    )
}

/// `κ'''(0)` and `κ''(0)` from the moment formulas of each family.
fn cumulants_at_zero(b: &BranchSpec) -> (f64, f64) {
    let g = b.mean_snr();
    let p = b.shape();
    match b.family() {
        Family::Nakagami => (g * g / p, 2.0 * g.powi(3) / (p * p)),
        Family::Rice => {
            let k1 = p + 1.0;
            (g * g * (1.0 + 2.0 * p) / (k1 * k1), 2.0 * (1.0 + 3.0 * p) * g.powi(3) / k1.powi(3))
        }
        Family::Hoyt => {
            let r = p / ((p + 1.0) * (p + 1.0));
            (2.0 * g * g * (1.0 - 2.0 * r), -8.0 * g.powi(3) * (3.0 * r - 1.0))
        }
    }
}

fn identity_suite() -> Outcome {
    let mut failures = Vec::new();

    let mut worst_closed: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 3.7] {
        for l in 1..=8 {
            for g in [0.3, 3.1622776601683795, 20.0] {
                let ens = ChannelEnsemble::iid(BranchSpec::nakagami(m, g).unwrap(), l).unwrap();
                for x in fine_grid().filter(|&x| x < 0.95 * ens.mean()) {
                    let closed = spa_nakagami_iid_closed_form(m, g, l, x).unwrap().value;
                    let general = spa_cdf_simplified(&ens, x).unwrap().value;
                    worst_closed = worst_closed.max(rel(closed, general));
                }
            }
        }
    }
    if !(worst_closed <= IDENTITY_REL) {
        failures.push(format!("closed-form simplified {worst_closed:.2e}"));
    }

    let mut worst_rice: f64 = 0.0;
    for l in 1..=8 {
        for g in [0.3, 3.1622776601683795, 20.0] {
            let rice = ChannelEnsemble::iid(BranchSpec::rice(0.0, g).unwrap(), l).unwrap();
            let naka = ChannelEnsemble::iid(BranchSpec::nakagami(1.0, g).unwrap(), l).unwrap();
            for x in fine_grid() {
                let a = spa_cdf(&rice, x).unwrap().value;
                let b = spa_cdf(&naka, x).unwrap().value;
                worst_rice = worst_rice.max(rel(a, b));
            }
        }
    }
    if !(worst_rice <= IDENTITY_REL) {
        failures.push(format!("Rice K=0 vs Nakagami m=1 {worst_rice:.2e}"));
    }

    let mut mean_cases = 0;
    for (name, l) in [
        ("fig1-nakagami", Some(3)),
        ("fig1-rice", Some(2)),
        ("fig1-hoyt", Some(5)),
        ("fig2a", None),
        ("fig2b", None),
        ("fig3", None),
    ] {
        let ens = ensemble_of(name, l, None);
        let est = spa_cdf(&ens, ens.mean()).unwrap();
        let (var, k3) = ens
            .branches()
            .iter()
            .map(cumulants_at_zero)
            .fold((0.0, 0.0), |a, c| (a.0 + c.0, a.1 + c.1));
        let want = 0.5 + k3 / (6.0 * (2.0 * PI).sqrt() * var.powf(1.5));
        mean_cases += 1;
        if est.solution().unwrap().s_hat != 0.0 || rel(est.value, want) > 1e-15 {
            failures.push(format!("{name} mean point {} vs {want}", est.value));
        }
    }

    if failures.is_empty() {
        outcome(
            true,
            format!(
                "closed form {worst_closed:.1e}, Rice K=0 {worst_rice:.1e}, {mean_cases} mean points"
            ),
        )
    } else {
        outcome(false, failures.join("; "))
    }
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run_curve_cli(preset: &str, workers: usize) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_saddle-outage"))
        .args(["curve", "--preset", preset, "--workers", &workers.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn cli_golden_files() -> Outcome {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for name in ["fig1-nakagami", "fig2a", "fig3"] {
        let runs: Result<Vec<String>, String> =
            [1, 4, 1, 4].iter().map(|&w| run_curve_cli(name, w)).collect();
        let runs = match runs {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        if runs.iter().any(|r| r != &runs[0]) {
            failures.push(format!("{name}: output differs across runs or worker counts"));
        }
        let path = golden_dir().join(format!("{name}.csv"));
        if update {
            std::fs::write(&path, &runs[0]).unwrap();
        }
        match std::fs::read_to_string(&path) {
            Ok(golden) if golden == runs[0] => {}
            Ok(_) => failures.push(format!("{name}: differs from {}", path.display())),
            Err(e) => failures.push(format!("{name}: {}: {e}", path.display())),
        }
    }
    if failures.is_empty() {
        outcome(true, "3 presets, workers 1 and 4, byte-identical to golden")
    } else {
        outcome(false, failures.join("; "))
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact-oracle envelope", exact_oracle_envelope),
        ("simplified envelope", simplified_envelope),
        ("saddlepoint residual", saddlepoint_residual),
        ("closed form vs Newton", closed_form_vs_newton),
        ("paper-mode Newton", paper_mode_newton),
        ("CGF finite differences", cgf_finite_differences),
        ("Monte Carlo triangle", monte_carlo_triangle),
        ("identity suite", identity_suite),
        ("CLI golden files", cli_golden_files),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} {name}: {verdict} ({}) [{:.2}s]",
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!result.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
