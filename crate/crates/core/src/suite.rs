//! The validation suite behind `stretch-fpp --command validate`.

use rand::Rng;
use serde::Serialize;

use crate::bessel::check_recurrence;
use crate::density::{
    g_sum, kernel_k, kernel_q, p_sum, stationary_ode_residual, KernelFn, DERIVATIVE_STEP,
};
use crate::graph::{stream_rng, GraphFamily};
use crate::mc::{subadditivity_probe, validate_recursion};
use crate::quad::integrate;
use crate::Result;

pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;
pub const ODE_TOLERANCE: f64 = 1e-6;
pub const BESSEL_TOLERANCE: f64 = 1e-12;

/// Values of `delta` at which kernel normalization is certified.
pub const NORMALIZATION_DELTAS: [f64; 5] = [-3.0, -1.0, 0.0, 1.0, 3.0];

/// The `K` and `Q` kernels under test.
#[derive(Clone, Copy, Debug)]
pub struct KernelSet {
    pub k: KernelFn,
    pub q: KernelFn,
}

impl KernelSet {
    pub const EXACT: Self = Self {
        k: kernel_k,
        q: kernel_q,
    };
}

impl Default for KernelSet {
    fn default() -> Self {
        Self::EXACT
    }
}

/// `K` with the `d < 0, delta > d` branch decaying at half rate. Test
/// fixture for the negative path of the suite.
#[doc(hidden)]
pub fn corrupted_kernel_k(delta: f64, d: f64) -> f64 {
    if d < 0.0 && delta > d {
        d.exp() * (-(delta - d) / 2.0).exp()
    } else {
        kernel_k(delta, d)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
    pub kernels: KernelSet,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            max_n: 50,
            seed: 1,
            kernels: KernelSet::EXACT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    /// `{"passed": bool, "failures": [names]}` on one line.
    pub fn failure_json(&self) -> String {
        let names: Vec<&str> = self.failures().iter().map(|c| c.name.as_str()).collect();
        serde_json::json!({ "passed": self.passed(), "failures": names }).to_string()
    }
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for family in GraphFamily::NONTRIVIAL {
        let r = validate_recursion(family, config.trials, config.max_n, config.seed)?;
        checks.push(CheckResult::new(
            format!("recursion_oracle:{family}"),
            r.passed(),
            format!(
                "{} trials, {} failures, max discrepancy {:e}",
                r.trials, r.failures, r.max_discrepancy
            ),
        ));
    }
    checks.push(subadditivity(config)?);
    checks.push(kernel_normalization(config.kernels));
    checks.push(kernel_symmetry(config.kernels, 10_000, config.seed));
    checks.push(kernel_derivative(config.kernels));
    checks.push(ode_residual());
    checks.push(bessel_recurrence()?);
    Ok(SuiteReport { checks })
}

fn subadditivity(config: &SuiteConfig) -> Result<CheckResult> {
    let trials = config.trials.min(500);
    let mut violations = 0;
    for family in GraphFamily::NONTRIVIAL {
        violations += subadditivity_probe(family, trials, 40, 17, config.seed)?.violations;
    }
    Ok(CheckResult::new(
        "subadditivity",
        violations == 0,
        format!("{violations} violations over {trials} ladders per family"),
    ))
}

/// Largest `|int K(delta, .) - 1|` and `|int Q(delta, .) - 1|` over
/// [`NORMALIZATION_DELTAS`].
pub fn normalization_errors(kernels: KernelSet) -> (f64, f64) {
    let mass =
        |f: KernelFn, delta: f64| integrate(|t| f(delta, t), -60.0, 60.0, &[0.0, delta], 1e-13);
    NORMALIZATION_DELTAS
        .iter()
        .fold((0.0f64, 0.0f64), |(ek, eq), &delta| {
            (
                ek.max((mass(kernels.k, delta) - 1.0).abs()),
                eq.max((mass(kernels.q, delta) - 1.0).abs()),
            )
        })
}

pub fn kernel_normalization(kernels: KernelSet) -> CheckResult {
    let (ek, eq) = normalization_errors(kernels);
    CheckResult::new(
        "kernel_normalization",
        ek < NORMALIZATION_TOLERANCE && eq < NORMALIZATION_TOLERANCE,
        format!("max |int K - 1| = {ek:e}, max |int Q - 1| = {eq:e}"),
    )
}

/// Largest relative `|K(delta, d) - K(-delta, -d)|` over `pairs` random
/// points with `delta, d` uniform on `[-8, 8]`.
pub fn symmetry_error(kernels: KernelSet, pairs: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 0x5E77_0000);
    (0..pairs)
        .map(|_| {
            let delta = rng.random_range(-8.0..8.0);
            let d = rng.random_range(-8.0..8.0);
            let (a, b) = ((kernels.k)(delta, d), (kernels.k)(-delta, -d));
            (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

pub fn kernel_symmetry(kernels: KernelSet, pairs: usize, seed: u64) -> CheckResult {
    let err = symmetry_error(kernels, pairs, seed);
    CheckResult::new(
        "kernel_symmetry",
        err <= 4.0 * f64::EPSILON,
        format!("max relative asymmetry {err:e} over {pairs} pairs"),
    )
}

/// Largest `|d/dd sum G - K|` and `|d/dl sum P - Q|` on a grid of points
/// at least `0.01` from the kinks `0` and `delta`.
pub fn derivative_errors(kernels: KernelSet) -> (f64, f64) {
    let h = DERIVATIVE_STEP;
    let points: Vec<f64> = (-12..=12).map(|k| k as f64 * 0.5 + 0.13).collect();
    let mut ek: f64 = 0.0;
    let mut eq: f64 = 0.0;
    for &delta in &points {
        for &t in &points {
            if t.abs() < 0.01 || (t - delta).abs() < 0.01 {
                continue;
            }
            let dg = (g_sum(delta, t + h) - g_sum(delta, t - h)) / (2.0 * h);
            let dp = (p_sum(delta, t + h) - p_sum(delta, t - h)) / (2.0 * h);
            ek = ek.max((dg - (kernels.k)(delta, t)).abs());
            eq = eq.max((dp - (kernels.q)(delta, t)).abs());
        }
    }
    (ek, eq)
}

pub fn kernel_derivative(kernels: KernelSet) -> CheckResult {
    let (ek, eq) = derivative_errors(kernels);
    CheckResult::new(
        "kernel_derivative",
        ek < DERIVATIVE_TOLERANCE && eq < DERIVATIVE_TOLERANCE,
        format!("max K error {ek:e}, max Q error {eq:e}"),
    )
}

/// Largest ODE residual of the closed-form density at 100 interior points
/// on each side of the origin within `[-10, 10]`.
pub fn max_ode_residual() -> f64 {
    (1..=100)
        .flat_map(|k| {
            let d = 10.0 * k as f64 / 101.0;
            [d, -d]
        })
        .map(|d| stationary_ode_residual(d, 1e-3))
        .fold(0.0, f64::max)
}

pub fn ode_residual() -> CheckResult {
    let r = max_ode_residual();
    CheckResult::new(
        "ode_residual",
        r < ODE_TOLERANCE,
        format!("max residual {r:e} at 200 points"),
    )
}

pub fn bessel_recurrence() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for x in [0.5, 1.0, std::f64::consts::SQRT_2, 2.0, 3.0, 4.0] {
        worst = worst.max(check_recurrence(x)?);
    }
    Ok(CheckResult::new(
        "bessel_recurrence",
        worst < BESSEL_TOLERANCE,
        format!("max recurrence defect {worst:e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn healthy_suite_passes_quickly() {
        let report = run_suite(&SuiteConfig {
            trials: 10,
            ..SuiteConfig::default()
        })
        .unwrap();
        assert!(report.passed(), "{:#?}", report.failures());
        assert_eq!(report.checks.len(), 12);
        assert_eq!(report.failure_json(), r#"{"failures":[],"passed":true}"#);
    }

    #[test]
    fn corrupted_kernel_fails_normalization() {
        let kernels = KernelSet {
            k: corrupted_kernel_k,
            q: kernel_q,
        };
        assert!(!kernel_normalization(kernels).passed);
        assert!(kernel_normalization(KernelSet::EXACT).passed);
    }

    #[test]
    fn exact_kernel_is_symmetric_and_differentiable() {
        assert!(kernel_symmetry(KernelSet::EXACT, 10_000, 3).passed);
        assert!(kernel_derivative(KernelSet::EXACT).passed);
    }
}
