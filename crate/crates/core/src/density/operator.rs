//! Discretized transfer operator `rho -> int rho(delta) K(delta, .) d delta`
//! and its power iteration.

use rayon::prelude::*;

use super::kernel::{kernel_k, kernel_q, KernelFn};
use super::DensityGrid;
use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100_000;

/// The increment density is tabulated on (a grid-aligned cover of) this
/// interval.
pub const LAMBDA_GRID_LO: f64 = -8.0;
pub const LAMBDA_GRID_HI: f64 = 12.0;

/// Trapezoid discretization of the transfer operator on a symmetric grid.
///
/// The grid has odd size so that both kinks of `K(delta, d)` as a function
/// of `delta`, at `delta = d` and (on the row `d = 0`) at `delta = 0`, fall
/// on nodes and the rule keeps its second order. On the row `d = 0` the
/// kernel jumps; that row uses the mean of the two one-sided limits.
pub struct TransferOperator {
    hi: f64,
    m: usize,
    /// Row-major: `matrix[i * m + j] = w_j K(delta_j, d_i)`.
    matrix: Vec<f64>,
}

/// Result of [`TransferOperator::iterate`].
#[derive(Clone, Debug)]
pub struct PowerIteration {
    pub density: DensityGrid,
    pub iterations: usize,
    /// L1 change of the final iteration.
    pub change: f64,
}

fn node_kernel(kernel: KernelFn, delta: f64, d: f64) -> f64 {
    if d == 0.0 {
        0.5 * (kernel(delta, -f64::MIN_POSITIVE) + kernel(delta, f64::MIN_POSITIVE))
    } else {
        kernel(delta, d)
    }
}

impl TransferOperator {
    pub fn new(hi: f64, m: usize, kernel: KernelFn) -> Result<Self> {
        let grid = DensityGrid::symmetric(hi, m, |_| 0.0)?;
        let nodes: Vec<f64> = grid.abscissae().collect();
        let weights: Vec<f64> = (0..m).map(|j| grid.weight(j)).collect();
        let mut matrix = vec![0.0; m * m];
        matrix.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
            let d = nodes[i];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = weights[j] * node_kernel(kernel, nodes[j], d);
            }
        });
        Ok(Self { hi, m, matrix })
    }

    /// The exact kernel `K`.
    pub fn exact(hi: f64, m: usize) -> Result<Self> {
        Self::new(hi, m, kernel_k)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// One application, without renormalization.
    pub fn apply(&self, rho: &DensityGrid) -> DensityGrid {
        assert_eq!(rho.m(), self.m, "grid size mismatch");
        let values = self
            .matrix
            .par_chunks(self.m)
            .map(|row| row.iter().zip(&rho.values).map(|(k, r)| k * r).sum())
            .collect();
        DensityGrid {
            lo: -self.hi,
            hi: self.hi,
            values,
        }
    }

    /// Power iteration with L1 renormalization each step, stopping once the
    /// L1 change falls below `tol`.
    pub fn iterate(
        &self,
        start: DensityGrid,
        tol: f64,
        max_iterations: usize,
    ) -> Result<PowerIteration> {
        let mut rho = start;
        rho.normalize();
        let mut change = f64::INFINITY;
        for iteration in 1..=max_iterations {
            let mut next = self.apply(&rho);
            next.normalize();
            change = next.l1_distance(&rho);
            rho = next;
            if change < tol {
                return Ok(PowerIteration {
                    density: rho,
                    iterations: iteration,
                    change,
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iterations,
            change,
        })
    }
}

/// Stationary density of the `XYZ` chain on `[-hi, hi]` with `m` points,
/// by power iteration from the Exp(1) law of `delta_0`.
pub fn stationary_by_power_iteration(hi: f64, m: usize, tol: f64) -> Result<PowerIteration> {
    if hi < 8.0 || m < 801 {
        return Err(Error::InvalidGrid(format!(
            "power iteration needs hi >= 8 and m >= 801, got hi = {hi}, m = {m}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let operator = TransferOperator::exact(hi, m)?;
    let start = DensityGrid::symmetric(hi, m, |d| if d >= 0.0 { (-d).exp() } else { 0.0 })?;
    operator.iterate(start, tol, MAX_ITERATIONS)
}

/// Density of the increment, `eta(l) = int rho(delta) Q(delta, l) d delta`,
/// on a grid with the spacing of `rho` covering `[-8, 12]`. Nodes are
/// integer multiples of the spacing, so the kink of `Q` at `delta = l`
/// sits on a node of `rho` whenever `l` is inside `rho`'s grid.
pub fn lambda_density(rho: &DensityGrid) -> Result<DensityGrid> {
    let h = rho.h();
    let first = (LAMBDA_GRID_LO / h).floor() as i64;
    let last = (LAMBDA_GRID_HI / h).ceil() as i64;
    let ls: Vec<f64> = (first..=last).map(|k| k as f64 * h).collect();
    let deltas: Vec<f64> = rho.abscissae().collect();
    let weighted: Vec<f64> = (0..rho.m())
        .map(|j| rho.weight(j) * rho.values[j])
        .collect();
    let values: Vec<f64> = ls
        .par_iter()
        .map(|&l| {
            deltas
                .iter()
                .zip(&weighted)
                .map(|(&delta, &w)| w * kernel_q(delta, l))
                .sum()
        })
        .collect();
    let mut eta = DensityGrid::new(ls[0], ls[ls.len() - 1], values)?;
    eta.normalize();
    Ok(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::stationary_closed_form;

    #[test]
    fn rejects_small_grids() {
        assert!(stationary_by_power_iteration(6.0, 2001, 1e-10).is_err());
        assert!(stationary_by_power_iteration(10.0, 501, 1e-10).is_err());
        assert!(TransferOperator::exact(10.0, 1000).is_err());
    }

    #[test]
    fn operator_preserves_mass_approximately() {
        let op = TransferOperator::exact(10.0, 801).unwrap();
        let rho = DensityGrid::symmetric(10.0, 801, stationary_closed_form).unwrap();
        let out = op.apply(&rho);
        assert!((out.integral() - rho.integral()).abs() < 5e-4);
    }

    #[test]
    fn zero_row_uses_mean_of_limits() {
        let v = node_kernel(kernel_k, -1.0, 0.0);
        assert!((v - 0.5 * (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(node_kernel(kernel_k, 0.0, 0.0), 1.0);
    }

    #[test]
    fn nonconvergence_is_reported() {
        let op = TransferOperator::exact(8.0, 801).unwrap();
        let start =
            DensityGrid::symmetric(8.0, 801, |d| if d >= 0.0 { (-d).exp() } else { 0.0 }).unwrap();
        assert!(matches!(
            op.iterate(start, 1e-300, 3),
            Err(Error::NoConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn eta_grid_is_aligned() {
        let rho = DensityGrid::symmetric(10.0, 801, stationary_closed_form).unwrap();
        let eta = lambda_density(&rho).unwrap();
        assert!((eta.h() - rho.h()).abs() < 1e-12);
        assert!(eta.lo <= LAMBDA_GRID_LO && eta.hi >= LAMBDA_GRID_HI);
        assert!((eta.integral() - 1.0).abs() < 1e-12);
    }
}
