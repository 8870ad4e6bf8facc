use rand::Rng;
use rayon::prelude::*;

use super::GpModel;
use crate::hyperspace::{ConfigPoint, SpaceDef};
use crate::scalar::Scalar;

/// Expected improvement over `f_best` of a normal with the given mean and
/// variance (maximization, no exploration offset).
pub fn expected_improvement<F: Scalar>(mean: F, var: F, f_best: F) -> F {
    let sigma = var.max(F::zero()).sqrt();
    let gap = mean - f_best;
    if sigma == F::zero() {
        return gap.max(F::zero());
    }
    let z = gap / sigma;
    (gap * z.norm_cdf() + sigma * z.norm_pdf()).max(F::zero())
}

/// Draws `n_candidates` random valid points and returns the one with the
/// highest expected improvement (earliest on ties) together with that value.
pub fn propose_next<F: Scalar, R: Rng + ?Sized>(
    model: &GpModel<F>,
    space: &SpaceDef,
    f_best: F,
    n_candidates: usize,
    rng: &mut R,
) -> (ConfigPoint<F>, F) {
    let candidates: Vec<ConfigPoint<F>> = (0..n_candidates.max(1)).map(|_| space.sample_random(rng)).collect();
    let scores: Vec<F> = candidates
        .par_iter()
        .map(|c| {
            let x = space.encode(c).expect("sampled points are valid");
            let (m, v) = model.posterior(x.as_slice());
            expected_improvement(m, v, f_best)
        })
        .collect();
    let (best, ei) = scores
        .iter()
        .enumerate()
        .fold((0, F::neg_infinity()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    (candidates[best], ei)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesopt::KernelParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn limits() {
        assert_eq!(expected_improvement(0.3f64, 0.0, 0.5), 0.0);
        assert_eq!(expected_improvement(0.5, 0.0, 0.5), 0.0);
        assert!((expected_improvement(0.7f64, 0.0, 0.5) - 0.2).abs() < 1e-15);
        assert!((expected_improvement(1.0f64, 1.0, 1.0) - 0.398_942_280_401_432_7).abs() < 1e-12);
        assert!(expected_improvement(-40.0, 1.0, 0.0) >= 0.0);
        // far above the incumbent EI approaches the gap
        assert!((expected_improvement(10.0f64, 1e-4, 0.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn single_candidate_is_returned() {
        let space = SpaceDef::standard();
        let gp = GpModel::prior(KernelParams::new(1.0, 0.5, 1e-4), 0.0);
        let (p, _) = propose_next(&gp, &space, 0.0, 1, &mut ChaCha8Rng::seed_from_u64(5));
        let expected: ConfigPoint<f64> = space.sample_random(&mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(p, expected);
    }

    #[test]
    fn incumbent_loses_to_positive_ei() {
        let space = SpaceDef::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let incumbent: ConfigPoint<f64> = space.sample_random(&mut rng);
        let x = space.encode(&incumbent).unwrap().into_vec();
        let gp = GpModel::fit(std::slice::from_ref(&x), &[0.5], KernelParams::new(0.01, 0.5, 1e-12)).unwrap();
        let (m, v) = gp.posterior(&x);
        assert!(expected_improvement(m, v, 0.5) < 1e-6);
        let (p, ei) = propose_next(&gp, &space, 0.5, 50, &mut rng);
        assert_ne!(p, incumbent);
        assert!(ei > 1e-6);
    }

    #[test]
    fn proposals_are_seeded() {
        let space = SpaceDef::standard();
        let gp = GpModel::fit(&[vec![0.5; 22]], &[0.1], KernelParams::new(0.01, 0.5, 1e-4)).unwrap();
        let a = propose_next(&gp, &space, 0.1, 100, &mut ChaCha8Rng::seed_from_u64(1));
        let b = propose_next(&gp, &space, 0.1, 100, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }
}
