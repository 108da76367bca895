//! Finite-difference checks of the complete discriminator and generator
//! objectives on toy-sized networks.

mod common;

use common::{check_discriminators, check_generator, gradient_grid, GRAD_TOL};

#[test]
fn discriminator_objectives_match_finite_differences() {
    for (k, alpha, init) in gradient_grid() {
        let r = check_discriminators(k, alpha, init);
        assert!(
            r.max_relative_error < GRAD_TOL,
            "K={k} alpha={alpha} init={init}: {r:?}"
        );
        assert!(r.skipped * 20 < r.checked, "too many kinks: {r:?}");
    }
}

#[test]
fn generator_objective_matches_finite_differences() {
    for (k, alpha, init) in gradient_grid() {
        let r = check_generator(k, alpha, init);
        assert!(
            r.max_relative_error < GRAD_TOL,
            "K={k} alpha={alpha} init={init}: {r:?}"
        );
        assert!(r.skipped * 20 < r.checked, "too many kinks: {r:?}");
    }
}
