#![allow(dead_code)]

use std::hash::{Hash, Hasher};

use mbgan::models::{init_params, DiscriminatorHead, DiscriminatorSpec, GeneratorSpec};
use mbgan::ndcore::{grad_check_piecewise, Coordinates, GradCheckReport, Matrix, Mlp};
use mbgan::synthdata::{sample_latent, sample_real, RingMixture};
use mbgan::trainer::{d_loss, d_loss_and_grad, generator_loss, generator_loss_and_grad, partition};
use mbgan::RunRng;
use rand::SeedableRng;

pub const GRAD_EPS: f64 = 1e-5;
pub const GRAD_TOL: f64 = 1e-4;
/// Rows per microbatch in the gradient checks.
pub const MICRO: usize = 4;
/// Generator coordinates sampled per tensor.
pub const G_COORDS_PER_TENSOR: usize = 60;

fn combine(parts: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for p in parts {
        p.hash(&mut h);
    }
    h.finish()
}

/// Worst-case report over every `d_loss` of one (K, α, init) setting.
pub fn check_discriminators(k: usize, alpha: f64, init: u64) -> GradCheckReport {
    let mut rng = RunRng::seed_from_u64(1000 + init);
    let g = init_params(&GeneratorSpec::default(), init);
    let ds: Vec<Mlp> = (0..k)
        .map(|i| init_params(&DiscriminatorSpec::default(), 50 + init * 10 + i as u64))
        .collect();
    let b = k * MICRO;
    let z = sample_latent(256, b, &mut rng);
    let x = sample_real(&RingMixture::default(), b, &mut rng);
    let part = partition(b, k, &mut rng).unwrap();
    let fake = g.predict(&z).unwrap();
    let head = DiscriminatorHead::Logit;
    let mut total = GradCheckReport {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
        worst: (0, 0),
    };
    for (i, d) in ds.iter().enumerate() {
        let real = x.slice_rows(part.ranges[i].clone());
        let own = fake.slice_rows(part.ranges[i].clone());
        let comp: Matrix = fake.select_rows(&part.complements[i]);
        let stacked = Matrix::vstack(&[&real, &own, &comp]).unwrap();
        let (_, grads) = d_loss_and_grad(d, &real, &own, &comp, alpha, head).unwrap();
        let r = grad_check_piecewise(
            d,
            &grads,
            |p| {
                let (_, tape) = p.forward(&stacked).unwrap();
                (
                    d_loss(p, &real, &own, &comp, alpha, head).unwrap(),
                    tape.relu_signature(p),
                )
            },
            GRAD_EPS,
            Coordinates::All,
        )
        .unwrap();
        if r.max_relative_error > total.max_relative_error {
            total.max_relative_error = r.max_relative_error;
            total.worst = r.worst;
        }
        total.checked += r.checked;
        total.skipped += r.skipped;
    }
    total
}

/// Report for the complete generator loss of one (K, α, init) setting.
pub fn check_generator(k: usize, alpha: f64, init: u64) -> GradCheckReport {
    let mut rng = RunRng::seed_from_u64(2000 + init);
    let g = init_params(&GeneratorSpec::default(), 7 + init);
    let ds: Vec<Mlp> = (0..k)
        .map(|i| init_params(&DiscriminatorSpec::default(), 90 + init * 10 + i as u64))
        .collect();
    let b = k * MICRO;
    let z = sample_latent(256, b, &mut rng);
    let part = partition(b, k, &mut rng).unwrap();
    let head = DiscriminatorHead::Logit;
    let (_, _, grads) = generator_loss_and_grad(&g, &ds, &z, &part, alpha, head).unwrap();
    grad_check_piecewise(
        &g,
        &grads,
        |p| {
            let (fake, tape) = p.forward(&z).unwrap();
            let sig = combine(
                std::iter::once(tape.relu_signature(p))
                    .chain(ds.iter().map(|d| d.forward(&fake).unwrap().1.relu_signature(d))),
            );
            (generator_loss(p, &ds, &z, &part, alpha, head).unwrap(), sig)
        },
        GRAD_EPS,
        Coordinates::Sample {
            per_tensor: G_COORDS_PER_TENSOR,
            seed: init,
        },
    )
    .unwrap()
}

/// Every (K, α, init) combination of the gradient suite.
pub fn gradient_grid() -> Vec<(usize, f64, u64)> {
    let mut v = Vec::new();
    for k in [1, 2, 8] {
        for alpha in [0.0, 0.3] {
            for init in 0..3 {
                v.push((k, alpha, init));
            }
        }
    }
    v
}
