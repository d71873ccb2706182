//! Seeded random inputs: annulus sample points and rational functions with known divisors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::Polynomial;
use crate::rational::RationalFn;
use crate::scalar::ComplexScalar;

/// Radii the generated zeros and poles keep clear of.
pub const AVOIDED_RADII: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` points with log-uniform modulus in `[1/rho, rho]` and uniform argument.
pub fn annulus_points(seed: u64, count: usize, rho: f64) -> Vec<ComplexScalar> {
    let mut r = rng(seed);
    let lr = rho.ln();
    (0..count)
        .map(|_| {
            let m = r.gen_range(-lr..lr).exp();
            let t = r.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(m, t)
        })
        .collect()
}

/// A rational function together with the divisor it was built from.
#[derive(Debug, Clone)]
pub struct RandomRational {
    pub function: RationalFn,
    pub zeros: Vec<(ComplexScalar, usize)>,
    pub poles: Vec<(ComplexScalar, usize)>,
}

fn clear_of(z: ComplexScalar, taken: &[(ComplexScalar, usize)]) -> bool {
    let m = z.norm();
    AVOIDED_RADII.iter().all(|c| (m - c).abs() > 0.02 * c)
        && taken
            .iter()
            .all(|(w, _)| (z - w).norm() >= 0.05 * (1.0 + z.norm().max(w.norm())))
}

fn draw_points(
    r: &mut ChaCha8Rng,
    degree: usize,
    taken: &mut Vec<(ComplexScalar, usize)>,
) -> Vec<(ComplexScalar, usize)> {
    let (lo, hi) = (0.11f64.ln(), 9.5f64.ln());
    let mut out = Vec::new();
    let mut left = degree;
    while left > 0 {
        let z = loop {
            let cand = Complex64::from_polar(r.gen_range(lo..hi).exp(), r.gen_range(0.0..std::f64::consts::TAU));
            if clear_of(cand, taken) {
                break cand;
            }
        };
        let m = r.gen_range(1..=3usize).min(left);
        left -= m;
        taken.push((z, m));
        out.push((z, m));
    }
    out
}

/// Random `c·Π(z−aᵢ)^{mᵢ} / Π(z−bⱼ)^{nⱼ}` with numerator and denominator
/// degrees at most `max_degree`, points in `0.11 ≤ |z| ≤ 9.5`, multiplicities
/// up to 3, mutually separated and away from the radii in [`AVOIDED_RADII`].
pub fn random_rational(r: &mut ChaCha8Rng, max_degree: usize) -> RandomRational {
    let (dn, dd) = loop {
        let dn = r.gen_range(0..=max_degree);
        let dd = r.gen_range(0..=max_degree);
        if dn + dd > 0 {
            break (dn, dd);
        }
    };
    let mut taken = Vec::new();
    let zeros = draw_points(r, dn, &mut taken);
    let poles = draw_points(r, dd, &mut taken);
    let lead = Complex64::from_polar(r.gen_range(0.5..2.0), r.gen_range(0.0..std::f64::consts::TAU));
    let num = Polynomial::from_roots(&zeros).scale(lead);
    let den = Polynomial::from_roots(&poles);
    RandomRational {
        function: RationalFn::new(num, den).expect("nonzero denominator"),
        zeros,
        poles,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_reproducible_and_in_range() {
        let a = annulus_points(3, 20, 2.0);
        assert_eq!(a, annulus_points(3, 20, 2.0));
        assert!(a.iter().all(|z| z.norm() >= 0.5 && z.norm() <= 2.0));
    }

    #[test]
    fn random_rational_keeps_its_divisor() {
        let mut r = rng(11);
        for _ in 0..20 {
            let f = random_rational(&mut r, 8);
            assert_eq!(f.function.num().degree().unwrap(), f.zeros.iter().map(|p| p.1).sum::<usize>());
            assert_eq!(f.function.den().degree().unwrap(), f.poles.iter().map(|p| p.1).sum::<usize>());
        }
    }
}
