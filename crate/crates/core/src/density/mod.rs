//! Analytic side of the `XYZ` ladder: kernels, the stationary density of
//! the height-difference chain, the increment density, and the time
//! constants in closed form.

mod kernel;
mod operator;

use std::sync::OnceLock;

pub use kernel::{
    g1, g2, g2_g3_mirror_sum, g3, g_sum, increment_mean, kernel_k, kernel_q,
    kernel_sum_derivative_check, p1, p2, p_sum, q_from_p_check, KernelFn, DERIVATIVE_STEP,
};
pub use operator::{
    lambda_density, stationary_by_power_iteration, PowerIteration, TransferOperator,
    LAMBDA_GRID_HI, LAMBDA_GRID_LO, MAX_ITERATIONS,
};

use crate::bessel::{j0, j1, j2};
use crate::graph::{classify, Classification, GraphFamily};
use crate::quad::{self, integrate};
use crate::{Error, Result};

/// A density sampled at `m` uniformly spaced abscissae on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || hi.is_nan() || lo.is_nan() || hi <= lo {
            return Err(Error::InvalidGrid(format!(
                "need at least two points on a non-empty interval, got {} on [{lo}, {hi}]",
                values.len()
            )));
        }
        Ok(Self { lo, hi, values })
    }

    /// Samples `f` on `m` points of `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut grid = Self::new(lo, hi, vec![0.0; m.max(2)])?;
        if m < 2 {
            return Err(Error::InvalidGrid(format!("m = {m} < 2")));
        }
        for i in 0..m {
            grid.values[i] = f(grid.abscissa(i));
        }
        Ok(grid)
    }

    /// Odd `m` on `[-hi, hi]`, so that `0` is a node.
    pub fn symmetric(hi: f64, m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if m.is_multiple_of(2) || m < 3 || hi.is_nan() || hi <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "symmetric grid needs odd m >= 3 and hi > 0, got m = {m}, hi = {hi}"
            )));
        }
        Self::from_fn(-hi, hi, m, f)
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.m() - 1) as f64
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        let m = self.m();
        if i == 0 {
            return self.lo;
        }
        if i == m - 1 {
            return self.hi;
        }
        if self.lo == -self.hi && m % 2 == 1 {
            // Offsets from the centre node: exactly 0 there, exactly mirrored.
            let c = (m / 2) as f64;
            return (i as f64 - c) * self.h();
        }
        self.lo + i as f64 * self.h()
    }

    pub fn abscissae(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m()).map(|i| self.abscissa(i))
    }

    pub fn weight(&self, i: usize) -> f64 {
        quad::trapezoid_weight(i, self.m(), self.h())
    }

    /// Trapezoid integral of the samples.
    pub fn integral(&self) -> f64 {
        quad::trapezoid(&self.values, self.h())
    }

    /// Trapezoid integral of `f(x) * density(x)`.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        (0..self.m())
            .map(|i| self.weight(i) * self.values[i] * f(self.abscissa(i)))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn normalize(&mut self) {
        let total = self.integral();
        for v in &mut self.values {
            *v /= total;
        }
    }

    /// Trapezoid L1 distance to another density on the same grid.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.assert_same_grid(other);
        (0..self.m())
            .map(|i| self.weight(i) * (self.values[i] - other.values[i]).abs())
            .sum()
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.assert_same_grid(other);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max |rho(x) - rho(-x)|` over mirrored node pairs; grid must be
    /// symmetric.
    pub fn max_asymmetry(&self) -> f64 {
        let m = self.m();
        (0..m / 2)
            .map(|i| (self.values[i] - self.values[m - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    fn assert_same_grid(&self, other: &Self) {
        assert!(
            self.m() == other.m() && self.lo == other.lo && self.hi == other.hi,
            "densities live on different grids"
        );
    }
}

fn j2_at_two() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| j2(2.0).expect("2 is inside the series domain"))
}

/// Stationary density of the height-difference chain:
/// `rho(d) = e^{-3|d|/2} J_1(2 e^{-|d|/2}) / (2 J_2(2))`.
pub fn stationary_closed_form(d: f64) -> f64 {
    let a = d.abs();
    let arg = 2.0 * (-0.5 * a).exp();
    let j = j1(arg).expect("argument lies in (0, 2]");
    (-1.5 * a).exp() * j / (2.0 * j2_at_two())
}

/// Residual of the second-order ODE satisfied by the closed-form density,
/// `rho'' - 3 rho' + (2 + e^d) rho` for `d < 0` and the mirrored
/// `rho'' + 3 rho' + (2 + e^{-d}) rho` for `d >= 0`, using five-point
/// differences of step `h`. The stencil `[d - 2h, d + 2h]` must not cross 0.
pub fn stationary_ode_residual(d: f64, h: f64) -> f64 {
    let f = stationary_closed_form;
    let (fm2, fm1, f0, fp1, fp2) = (f(d - 2.0 * h), f(d - h), f(d), f(d + h), f(d + 2.0 * h));
    let first = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let second = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    if d < 0.0 {
        (second - 3.0 * first + (2.0 + d.exp()) * f0).abs()
    } else {
        (second + 3.0 * first + (2.0 + (-d).exp()) * f0).abs()
    }
}

/// `|rho(d) - int rho(delta) K(delta, d) d delta|` for the closed-form
/// density, written in the split form of the stationary integral equation
/// and evaluated by quadrature.
pub fn integral_equation_residual(d: f64) -> f64 {
    const CUT: f64 = 60.0;
    const TOL: f64 = 1e-13;
    let rho = stationary_closed_form;
    let rhs = if d < 0.0 {
        d.exp() * integrate(rho, -CUT, d, &[], TOL)
            + (2.0 * d).exp() * integrate(|t| rho(t) * (-t).exp(), d, CUT, &[0.0], TOL)
    } else {
        (-2.0 * d).exp() * integrate(|t| rho(t) * t.exp(), -CUT, d, &[0.0], TOL)
            + (-d).exp() * integrate(rho, d, CUT, &[], TOL)
    };
    (rho(d) - rhs).abs()
}

/// Closed-form time constant of a solved family.
pub fn chi_exact(family: GraphFamily) -> Result<f64> {
    if classify(family) != Classification::NontrivialSolved {
        return Err(Error::UnsupportedFamily {
            family,
            reason: "no closed-form time constant",
        });
    }
    let value = if family == GraphFamily::XYZ {
        1.5 - j1(2.0)? / (2.0 * j2(2.0)?)
    } else if family == GraphFamily::VWXY {
        let r = std::f64::consts::SQRT_2;
        0.75 - j0(r)? / (2.0 * r * j1(r)?)
    } else {
        let t = 1.0f64.tan();
        (2.0 * t - 2.0) / (2.0 * t - 1.0)
    };
    Ok(value)
}

/// `chi = int rho(delta) E[lambda | delta] d delta` by the trapezoid rule,
/// with the conditional mean in closed form ([`increment_mean`]).
pub fn chi_by_expectation(rho: &DensityGrid) -> Result<f64> {
    if rho.hi < 10.0 || rho.lo > -10.0 {
        return Err(Error::InvalidGrid(format!(
            "chi by expectation needs the grid to cover [-10, 10], got [{}, {}]",
            rho.lo, rho.hi
        )));
    }
    let mass = rho.integral();
    if (mass - 1.0).abs() > 1e-3 {
        return Err(Error::InvalidGrid(format!(
            "density has mass {mass}, expected 1"
        )));
    }
    Ok(rho.expectation(increment_mean) / mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_density_at_zero() {
        let expected = 0.576724807756873 / (2.0 * 0.352834028615638);
        assert!((stationary_closed_form(0.0) - expected).abs() < 1e-13);
        assert!((stationary_closed_form(0.0) - 0.817275).abs() < 1e-6);
        assert_eq!(stationary_closed_form(1.3), stationary_closed_form(-1.3));
    }

    #[test]
    fn closed_form_density_integrates_to_one() {
        let total = integrate(stationary_closed_form, -12.0, 12.0, &[0.0], 1e-14);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn ode_residual_small() {
        for k in 0..100 {
            let d = -6.0 + 6.0 * (k as f64 + 0.5) / 100.0;
            assert!(stationary_ode_residual(d, 1e-3) < 1e-6, "d = {d}");
            assert!(stationary_ode_residual(-d, 1e-3) < 1e-6, "d = {}", -d);
        }
    }

    #[test]
    fn integral_equation_spot_checks() {
        assert!(integral_equation_residual(-1.0) < 1e-8);
        assert!(integral_equation_residual(1.0) < 1e-8);
        assert!(integral_equation_residual(-3.5) < 1e-8);
    }

    #[test]
    fn exact_constants() {
        let xyz = chi_exact(GraphFamily::XYZ).unwrap();
        assert!((xyz - 0.682725).abs() < 1e-6, "{xyz}");
        let wxyz = chi_exact(GraphFamily::WXYZ).unwrap();
        let t = 1.5574077246549023f64;
        assert!((wxyz - (2.0 * t - 2.0) / (2.0 * t - 1.0)).abs() < 1e-14);
        assert!((wxyz - 0.5272).abs() < 1e-4);
        let vwxy = chi_exact(GraphFamily::VWXY).unwrap();
        assert!((vwxy - 0.38692).abs() < 1e-5, "{vwxy}");
        assert!(chi_exact(GraphFamily::VWX).is_err());
        assert!(chi_exact(GraphFamily::X).is_err());
    }

    #[test]
    fn point_mass_expectation() {
        let mut rho = DensityGrid::symmetric(10.0, 2001, |_| 0.0).unwrap();
        let h = rho.h();
        rho.values[1000] = 1.0 / h;
        assert!((chi_by_expectation(&rho).unwrap() - 0.75).abs() < 1e-12);
        let narrow = DensityGrid::symmetric(8.0, 801, |_| 0.0).unwrap();
        assert!(chi_by_expectation(&narrow).is_err());
    }

    #[test]
    fn chi_from_closed_form_density() {
        let rho = DensityGrid::symmetric(12.0, 4001, stationary_closed_form).unwrap();
        let chi = chi_by_expectation(&rho).unwrap();
        let exact = chi_exact(GraphFamily::XYZ).unwrap();
        assert!((chi - exact).abs() < 1e-5, "{chi} vs {exact}");
    }

    #[test]
    fn symmetric_grid_is_mirrored() {
        let g = DensityGrid::symmetric(10.0, 2001, |x| x).unwrap();
        assert_eq!(g.abscissa(1000), 0.0);
        for i in 0..2001 {
            assert_eq!(g.abscissa(i), -g.abscissa(2000 - i));
        }
        assert!(DensityGrid::symmetric(10.0, 2000, |x| x).is_err());
    }
}
