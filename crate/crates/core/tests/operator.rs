use stretch_fpp::density::{
    chi_by_expectation, chi_exact, stationary_by_power_iteration, stationary_closed_form,
    DensityGrid, TransferOperator, MAX_ITERATIONS,
};
use stretch_fpp::GraphFamily;

fn fixed_point_error(m: usize) -> f64 {
    let op = TransferOperator::exact(10.0, m).unwrap();
    let start = DensityGrid::symmetric(10.0, m, |d| (-d.abs()).exp()).unwrap();
    let rho = op.iterate(start, 1e-12, MAX_ITERATIONS).unwrap().density;
    let closed = DensityGrid::symmetric(10.0, m, stationary_closed_form).unwrap();
    rho.linf_distance(&closed)
}

#[test]
fn fixed_point_converges_at_second_order() {
    let ms = [501usize, 1001, 2001];
    let errors: Vec<f64> = ms.iter().map(|&m| fixed_point_error(m)).collect();
    // h halves (to within 0.1%) between consecutive grids.
    let slope = |a: usize, b: usize| (errors[a] / errors[b]).log2();
    assert!(slope(0, 1) >= 1.9 && slope(1, 2) >= 1.9, "{errors:?}");
}

#[test]
fn fixed_point_does_not_depend_on_start() {
    let tol = 1e-10;
    let op = TransferOperator::exact(10.0, 1001).unwrap();
    let exp_start =
        DensityGrid::symmetric(10.0, 1001, |d| if d >= 0.0 { (-d).exp() } else { 0.0 }).unwrap();
    let uniform =
        DensityGrid::symmetric(10.0, 1001, |d| if d.abs() <= 1.0 { 0.5 } else { 0.0 }).unwrap();
    let a = op.iterate(exp_start, tol, MAX_ITERATIONS).unwrap();
    let b = op.iterate(uniform, tol, MAX_ITERATIONS).unwrap();
    assert!(a.density.l1_distance(&b.density) < 2.0 * tol);
}

#[test]
fn chi_from_operator_converges_with_grid() {
    let exact = chi_exact(GraphFamily::XYZ).unwrap();
    let err = |m| {
        let rho = stationary_by_power_iteration(10.0, m, 1e-10)
            .unwrap()
            .density;
        (chi_by_expectation(&rho).unwrap() - exact).abs()
    };
    let (coarse, fine) = (err(801), err(2001));
    assert!(fine < 1e-4);
    assert!(coarse / fine >= 4.0, "{coarse} {fine}");
}

#[test]
fn power_iteration_output_is_normalized_and_even() {
    let it = stationary_by_power_iteration(10.0, 1001, 1e-12).unwrap();
    assert!((it.density.integral() - 1.0).abs() < 1e-12);
    assert!(it.density.max_asymmetry() < 1e-10);
    assert!(it.iterations < 100);
}
