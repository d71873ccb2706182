//! All roots of a complex polynomial, with multiplicities.
//!
//! Aberth–Ehrlich iteration finds every root simultaneously. Numerically
//! multiple roots come out as a scattered cluster, so roots are grouped by
//! overlapping inclusion disks (radius `n·|W_i|` with the Weierstrass
//! correction inflated by a rounding bound), each group becomes one root of
//! that multiplicity, and its centroid is polished by Newton iteration on the
//! `(m−1)`-th derivative, where the root is simple.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{cluster_radius, ComplexScalar};

/// Condition numbers beyond this are reported as ill-conditioned.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub center: ComplexScalar,
    pub multiplicity: usize,
    /// Relative condition number of the cluster treated as one root of its multiplicity.
    pub condition: f64,
}

/// Every root of `p`, counted once per cluster.
///
/// `cluster_rel` is the minimal merge radius `cluster_rel·(1+|z|)`.
pub fn polynomial_roots(p: &Polynomial, cluster_rel: f64) -> Result<Vec<RootCluster>> {
    let Some(degree) = p.degree() else {
        return Err(Error::Precondition("roots of the zero polynomial".into()));
    };
    let mut out = Vec::new();
    let zero_order = p.low_order();
    if zero_order > 0 {
        out.push(RootCluster {
            center: Complex64::new(0.0, 0.0),
            multiplicity: zero_order,
            condition: 1.0,
        });
    }
    if degree == zero_order {
        return Ok(out);
    }
    let q = p.shift_down(zero_order);
    let approx = aberth(&q);
    let clusters = group(&q, &approx, cluster_rel);
    for (center, m) in clusters {
        let center = polish(&q, center, m);
        let condition = cluster_condition(&q, center, m);
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned {
                location: center,
                condition,
            });
        }
        out.push(RootCluster {
            center,
            multiplicity: m,
            condition,
        });
    }
    Ok(merge_close(out, cluster_rel))
}

fn initial_guesses(p: &Polynomial) -> Vec<ComplexScalar> {
    let n = p.degree().unwrap();
    let a0 = p.coeff(0).norm();
    let an = p.leading().unwrap().norm();
    let radius = (a0 / an).powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

fn aberth(p: &Polynomial) -> Vec<ComplexScalar> {
    let n = p.degree().unwrap();
    if n == 1 {
        return vec![-p.coeff(0) / p.coeff(1)];
    }
    let dp = p.derivative();
    let mut z = initial_guesses(p);
    let mut converged = vec![false; n];
    for _ in 0..1000 {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (v, bound) = p.eval_with_bound(z[i]);
            if v.norm() <= 4.0 * (n as f64 + 1.0) * f64::EPSILON * bound {
                converged[i] = true;
                continue;
            }
            let d = dp.eval(z[i]);
            let ratio = v / d;
            let s: ComplexScalar = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / diff
                    }
                })
                .sum();
            let w = ratio / (1.0 - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // derivative vanished
                let nudge = Complex64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += nudge;
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= f64::EPSILON * z[i].norm() {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

/// Connected components of overlapping inclusion disks.
fn group(p: &Polynomial, z: &[ComplexScalar], cluster_rel: f64) -> Vec<(ComplexScalar, usize)> {
    let n = z.len();
    let lead = p.leading().unwrap();
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            let (v, bound) = p.eval_with_bound(z[i]);
            let err = v.norm() + 4.0 * (n as f64 + 1.0) * f64::EPSILON * bound;
            let prod: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).norm())
                .product();
            let w = err / (lead.norm() * prod);
            let r = n as f64 * w;
            if r.is_finite() {
                r
            } else {
                f64::INFINITY
            }
        })
        .collect();
    // union-find over the overlap graph
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (z[i] - z[j]).norm();
            let floor = cluster_radius(z[i], cluster_rel).max(cluster_radius(z[j], cluster_rel));
            if d <= radii[i] + radii[j] || d <= floor {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, ComplexScalar, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 += z[i];
                g.2 += 1;
            }
            None => groups.push((root, z[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, m)| (sum / m as f64, m))
        .collect()
}

/// Newton on `p^(m−1)`, where an m-fold root is simple.
fn polish(p: &Polynomial, start: ComplexScalar, m: usize) -> ComplexScalar {
    let f = p.nth_derivative(m - 1);
    let df = f.derivative();
    let mut z = start;
    let mut last_step = f64::INFINITY;
    for _ in 0..50 {
        let d = df.eval(z);
        if d == Complex64::new(0.0, 0.0) {
            break;
        }
        let step = f.eval(z) / d;
        let size = step.norm();
        if !size.is_finite() || size >= last_step {
            break;
        }
        z -= step;
        last_step = size;
        if size <= f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

fn cluster_condition(p: &Polynomial, c: ComplexScalar, m: usize) -> f64 {
    let (_, bound) = p.eval_with_bound(c);
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let dm = p.nth_derivative(m).eval(c).norm() / factorial;
    let scale = c.norm().max(f64::MIN_POSITIVE).powi(m as i32);
    let kappa = bound / (dm * scale);
    if kappa.is_finite() {
        kappa
    } else {
        f64::INFINITY
    }
}

fn merge_close(mut roots: Vec<RootCluster>, cluster_rel: f64) -> Vec<RootCluster> {
    let mut out: Vec<RootCluster> = Vec::with_capacity(roots.len());
    roots.sort_by(|a, b| crate::scalar::polar_order(a.center, b.center));
    for r in roots {
        if let Some(prev) = out
            .iter_mut()
            .find(|q| (q.center - r.center).norm() <= cluster_radius(q.center, cluster_rel))
        {
            let total = prev.multiplicity + r.multiplicity;
            prev.center = (prev.center * prev.multiplicity as f64
                + r.center * r.multiplicity as f64)
                / total as f64;
            prev.multiplicity = total;
            prev.condition = prev.condition.max(r.condition);
        } else {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;

    fn sorted(mut v: Vec<RootCluster>) -> Vec<RootCluster> {
        v.sort_by(|a, b| crate::scalar::polar_order(a.center, b.center));
        v
    }

    #[test]
    fn simple_roots() {
        let p = Polynomial::from_roots(&[(c64(1.0, 0.0), 1), (c64(-2.0, 0.5), 1), (c64(3.0, -1.0), 1)]);
        let r = sorted(polynomial_roots(&p, 1e-7).unwrap());
        assert_eq!(r.len(), 3);
        assert!((r[0].center - c64(1.0, 0.0)).norm() < 1e-13);
        assert!((r[1].center - c64(-2.0, 0.5)).norm() < 1e-13);
        assert!((r[2].center - c64(3.0, -1.0)).norm() < 1e-13);
    }

    #[test]
    fn multiplicities_from_clusters() {
        // (z−2)²(z−1/2)
        let p = Polynomial::from_roots(&[(c64(2.0, 0.0), 2), (c64(0.5, 0.0), 1)]);
        let r = sorted(polynomial_roots(&p, 1e-7).unwrap());
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 1);
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[1].center - c64(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root() {
        let p = Polynomial::from_roots(&[(c64(2.0, 0.0), 3)]);
        let r = polynomial_roots(&p, 1e-7).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[0].center - c64(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn roots_at_origin_are_exact() {
        let p = Polynomial::from_roots(&[(c64(0.0, 0.0), 2), (c64(1.0, 1.0), 1)]);
        let r = sorted(polynomial_roots(&p, 1e-7).unwrap());
        assert_eq!(r[0].center, c64(0.0, 0.0));
        assert_eq!(r[0].multiplicity, 2);
    }

    #[test]
    fn distinct_close_roots_stay_separate() {
        let p = Polynomial::from_roots(&[(c64(1.0, 0.0), 1), (c64(1.0 + 1e-5, 0.0), 1)]);
        let r = polynomial_roots(&p, 1e-7).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn nearly_coincident_roots_are_ill_conditioned() {
        let p = Polynomial::from_roots(&[(c64(1.0, 0.0), 1), (c64(1.0 + 1e-13, 0.0), 1)]);
        match polynomial_roots(&p, 1e-9) {
            Err(Error::IllConditioned { .. }) => {}
            Ok(r) => assert_eq!(r.iter().map(|c| c.multiplicity).sum::<usize>(), 2),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
