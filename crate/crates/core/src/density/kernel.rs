//! Closed-form kernels of the `XYZ` height-difference chain.
//!
//! `K(delta, d)` is the density of `delta_n = d` given `delta_{n-1} = delta`;
//! `Q(delta, l)` is the density of the increment `lambda_n = l` given the
//! same. `G1 + G2 + G3` and `P1 + P2` are the matching conditional CDFs,
//! split by which edge the shortest paths use last:
//!
//! * `G1 = P(Z >= |X - Y - delta|, delta + Y - X <= d)`,
//! * `G2 = P(Y >= X + Z - delta, Z <= d)`,
//! * `G3 = P(X >= Y + Z + delta, -Z <= d)`,
//! * `P1 = P(X <= delta + Y + Z, X <= l)`,
//! * `P2 = P(X >= delta + Y + Z, delta + Y + Z <= l)`.

/// Signature shared by `K`-like and `Q`-like kernels.
pub type KernelFn = fn(f64, f64) -> f64;

/// Step of the central differences used by the derivative checks.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Transition kernel `K(delta, d)`.
///
/// On the line `d = 0` (a null set) the value is `e^{-|delta|}`. The two
/// one-sided limits there differ; see [`super::TransferOperator`] for how
/// grid nodes on that line are treated.
pub fn kernel_k(delta: f64, d: f64) -> f64 {
    let scale = (-d.abs()).exp();
    if d < 0.0 {
        if delta <= d {
            scale
        } else {
            scale * (-(delta - d)).exp()
        }
    } else if d == 0.0 {
        (-delta.abs()).exp()
    } else if delta <= d {
        scale * (-(d - delta)).exp()
    } else {
        scale
    }
}

pub fn g1(delta: f64, d: f64) -> f64 {
    let v = if d < 0.0 {
        if delta <= d {
            delta.exp() * (1.0 + 2.0 * (d - delta))
        } else {
            (2.0 * d - delta).exp()
        }
    } else if delta <= 0.0 {
        delta.exp() * (2.0 - 2.0 * delta - (-2.0 * d).exp())
    } else if delta <= d {
        (-delta).exp() * (2.0 + 2.0 * delta - (-2.0 * (d - delta)).exp())
    } else {
        (-delta).exp() * (1.0 + 2.0 * d)
    };
    0.25 * v
}

pub fn g2(delta: f64, d: f64) -> f64 {
    if d < 0.0 {
        return 0.0;
    }
    let v = if delta <= 0.0 {
        delta.exp() * (1.0 - (-2.0 * d).exp())
    } else if delta <= d {
        4.0 - (-delta).exp() * (3.0 + (-2.0 * (d - delta)).exp() + 2.0 * delta)
    } else {
        4.0 - 4.0 * (-d).exp() - 2.0 * d * (-delta).exp()
    };
    0.25 * v
}

pub fn g3(delta: f64, d: f64) -> f64 {
    let v = if d < 0.0 {
        if delta <= d {
            4.0 * d.exp() - delta.exp() * (3.0 + 2.0 * (d - delta))
        } else {
            (2.0 * d - delta).exp()
        }
    } else if delta <= 0.0 {
        4.0 + delta.exp() * (2.0 * delta - 3.0)
    } else {
        (-delta).exp()
    };
    0.25 * v
}

/// `G1 + G2 + G3`: the conditional CDF of `delta_n` at `d`.
pub fn g_sum(delta: f64, d: f64) -> f64 {
    g1(delta, d) + g2(delta, d) + g3(delta, d)
}

/// `|d/dd (G1 + G2 + G3) - K|` by central differences. Meaningful only
/// away from the kinks `d = 0` and `d = delta`.
pub fn kernel_sum_derivative_check(delta: f64, d: f64) -> f64 {
    let h = DERIVATIVE_STEP;
    let derivative = (g_sum(delta, d + h) - g_sum(delta, d - h)) / (2.0 * h);
    (derivative - kernel_k(delta, d)).abs()
}

/// Increment kernel `Q(delta, l)`.
pub fn kernel_q(delta: f64, l: f64) -> f64 {
    let v = if delta > l {
        if l >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else if l < 0.0 {
        delta.exp() * (l - delta)
    } else {
        (-(l - delta)).exp() * (1.0 + 2.0 * (l - delta))
    };
    (-l).exp() * v
}

pub fn p1(delta: f64, l: f64) -> f64 {
    if l < 0.0 {
        0.0
    } else if delta <= 0.0 {
        0.25 * (-2.0 * l + delta).exp()
            * ((2.0 * l).exp() * (3.0 - 2.0 * delta) - 3.0 - 2.0 * (l - delta))
    } else if delta <= l {
        0.25 * (4.0 - (-delta).exp() - (-2.0 * l + delta).exp() * (2.0 * (l - delta) + 3.0))
    } else {
        1.0 - (-l).exp()
    }
}

pub fn p2(delta: f64, l: f64) -> f64 {
    if l < 0.0 {
        if delta <= l {
            // CDF of Y + Z (a Gamma(2, 1) variable) at l - delta.
            1.0 - (delta - l).exp() * (1.0 + l - delta)
        } else {
            0.0
        }
    } else if delta <= 0.0 {
        1.0 - 0.25
            * delta.exp()
            * (3.0 - 2.0 * delta + (-2.0 * l).exp() * (1.0 + 2.0 * (l - delta)))
    } else if delta <= l {
        0.25 * (-2.0 * l - delta).exp()
            * ((2.0 * l).exp() - (2.0 * delta).exp() * (1.0 + 2.0 * (l - delta)))
    } else {
        0.0
    }
}

/// `P1 + P2`: the conditional CDF of `lambda_n` at `l`.
pub fn p_sum(delta: f64, l: f64) -> f64 {
    p1(delta, l) + p2(delta, l)
}

/// `|d/dl (P1 + P2) - Q|` by central differences, away from `l = 0` and
/// `l = delta`.
pub fn q_from_p_check(delta: f64, l: f64) -> f64 {
    let h = DERIVATIVE_STEP;
    let derivative = (p_sum(delta, l + h) - p_sum(delta, l - h)) / (2.0 * h);
    (derivative - kernel_q(delta, l)).abs()
}

/// Conditional mean of the increment, `int l Q(delta, l) dl`.
pub fn increment_mean(delta: f64) -> f64 {
    if delta < 0.0 {
        0.25 * (8.0 + 4.0 * delta - delta.exp() * (5.0 - 2.0 * delta))
    } else {
        0.25 * (4.0 - (-delta).exp())
    }
}

/// `G2(delta, d) + G3(-delta, -d)`, which does not depend on `d`.
pub fn g2_g3_mirror_sum(delta: f64) -> f64 {
    let v = if delta <= 0.0 {
        1.0
    } else {
        4.0 * delta.exp() - 2.0 * delta - 3.0
    };
    0.25 * (-delta.abs()).exp() * v
}
