#![allow(dead_code)]

use fvbound::exterior_algebra::{Form, MultiIndex};
use fvbound::poly::{rational, Poly};
use fvbound::poly_forms::PolyForm;
use fvbound::star_domain::StarDomain;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense form with coefficients uniform in [-1, 1].
pub fn random_form(rng: &mut ChaCha8Rng, n: usize, grade: usize) -> Form {
    let terms = MultiIndex::all(n, grade)
        .into_iter()
        .map(|k| (k, rng.random_range(-1.0..=1.0)))
        .collect::<Vec<_>>();
    Form::from_terms(n, grade, terms).unwrap()
}

pub fn volume(n: usize) -> Form {
    Form::basis(n, &(0..n).collect::<Vec<_>>()).unwrap()
}

/// Sparse polynomial with small rational coefficients and total degree <= `degree`.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, degree: u32, terms: usize) -> Poly {
    Poly::from_terms(
        n,
        (0..terms).map(|_| {
            let mut e = vec![0u32; n];
            let mut budget = rng.random_range(0..=degree);
            while budget > 0 {
                e[rng.random_range(0..n)] += 1;
                budget -= 1;
            }
            (e, rational(rng.random_range(-5..=5), rng.random_range(1..=3)))
        }),
    )
}

pub fn random_polyform(rng: &mut ChaCha8Rng, n: usize, grade: usize, degree: u32) -> PolyForm {
    let keys = MultiIndex::all(n, grade);
    let mut terms = Vec::new();
    for k in keys {
        if rng.random_bool(0.6) {
            terms.push((k, random_poly(rng, n, degree, 3)));
        }
    }
    PolyForm::from_terms(n, grade, terms).unwrap()
}

/// Planar test domains with the spectral degree used for each.
pub fn planar_corpus() -> Vec<(&'static str, StarDomain, usize)> {
    vec![
        ("disk", StarDomain::ball(2, 1.0, 1.0), 20),
        ("ellipse-1.2", StarDomain::ellipse([1.0, 1.2], 1.0), 16),
        ("ellipse-1.5", StarDomain::ellipse([1.0, 1.5], 1.0), 16),
        ("ellipse-2", StarDomain::ellipse([1.0, 2.0], 1.0), 16),
        (
            "fourier-3",
            StarDomain::radial_fourier(1.0, vec![0.0, 0.0, 0.2], vec![], 0.75),
            16,
        ),
    ]
}
