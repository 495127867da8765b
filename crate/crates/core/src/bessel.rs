//! Bessel functions of the first kind for small real arguments.
//!
//! Only integer orders 0, 1 and 2 on `[0, 4]` are needed. The ascending
//! series
//!
//! ```text
//! J_nu(x) = sum_k (-1)^k (x/2)^(2k+nu) / (k! (k+nu)!)
//! ```
//!
//! converges fast there and is alternating with decreasing terms, so the
//! truncation error is bounded by the first omitted term.

use crate::{Error, Result};

/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARG: f64 = 4.0;

/// Series terms smaller than this are dropped.
const TERM_CUTOFF: f64 = 1e-16;

/// Integer order `nu` in `{0, 1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);
    pub const TWO: Self = Self(2);

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(nu: u32) -> Result<Self> {
        if nu <= 2 {
            Ok(Self(nu))
        } else {
            Err(Error::BesselOrder(nu))
        }
    }
}

/// `J_nu(x)` for `0 <= x <= 4`, absolute error below `1e-14`.
pub fn bessel_j(nu: BesselOrder, x: f64) -> Result<f64> {
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::BesselDomain(x));
    }
    Ok(series(nu.0, x, usize::MAX))
}

/// Partial sum of the ascending series, stopping after `max_terms` terms or
/// once the next term drops below the cutoff.
pub(crate) fn series(nu: u32, x: f64, max_terms: usize) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let nu_factorial: f64 = (1..=nu).map(f64::from).product();
    let mut term = half.powi(nu as i32) / nu_factorial;
    let mut sum = 0.0;
    let mut k = 0u32;
    while k < max_terms as u32 {
        sum += term;
        k += 1;
        term *= -q / (f64::from(k) * f64::from(k + nu));
        if term.abs() < TERM_CUTOFF {
            break;
        }
    }
    sum
}

pub fn j0(x: f64) -> Result<f64> {
    bessel_j(BesselOrder::ZERO, x)
}

pub fn j1(x: f64) -> Result<f64> {
    bessel_j(BesselOrder::ONE, x)
}

pub fn j2(x: f64) -> Result<f64> {
    bessel_j(BesselOrder::TWO, x)
}

/// Residual of the three-term recurrence `J_0 + J_2 = (2/x) J_1`, scaled by
/// `x/2`: `|(x/2)(J_0(x) + J_2(x)) - J_1(x)|`. At `x = 2` this is exactly
/// `|J_0(2) + J_2(2) - J_1(2)|`.
pub fn check_recurrence(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= MAX_ARG) {
        return Err(Error::BesselDomain(x));
    }
    Ok((0.5 * x * (j0(x)? + j2(x)?) - j1(x)?).abs())
}
