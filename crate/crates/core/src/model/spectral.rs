//! Finite spectral-measure representation of a model.
//!
//! Every node contributes a pair of point masses at `+-c_k / |c_k|` on the
//! unit sphere, where `c_k` is the k-th column of `(I - W)^-1`. Evaluating
//! the multivariate characteristic function through these atoms gives an
//! independent route to the product form in
//! [`SGModel::characteristic_function`](super::SGModel::characteristic_function).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::SGModel;
use crate::math::{dot, norm2};
use crate::stable::{is_cauchy_branch, psi};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAtom {
    /// Unit vector `c_k / |c_k|`.
    pub direction: Vec<f64>,
    /// Mass at `+direction`: `(1 + beta_k) |c_k|^alpha gamma_k / 2`.
    pub weight_plus: f64,
    /// Mass at `-direction`: `(1 - beta_k) |c_k|^alpha gamma_k / 2`.
    pub weight_minus: f64,
}

impl SGModel {
    /// One atom per node plus the location vector `sum_k eta_k c_k`.
    pub fn spectral_atoms(&self) -> (Vec<SpectralAtom>, Vec<f64>) {
        let d = self.n_nodes();
        let mut location = alloc::vec![0.0; d];
        let atoms = self
            .noise_map_columns()
            .into_iter()
            .zip(&self.noise)
            .map(|(c, law)| {
                let norm = norm2(&c);
                let mass = norm.powf(self.alpha) * law.gamma;
                let eta = if is_cauchy_branch(self.alpha) {
                    law.mu - 2.0 * law.beta * law.gamma / PI * norm.ln()
                } else {
                    law.mu
                };
                for (l, ci) in location.iter_mut().zip(&c) {
                    *l += eta * ci;
                }
                SpectralAtom {
                    direction: c.iter().map(|x| x / norm).collect(),
                    weight_plus: (1.0 + law.beta) * mass / 2.0,
                    weight_minus: (1.0 - law.beta) * mass / 2.0,
                }
            })
            .collect();
        (atoms, location)
    }
}

/// `exp(-sum_atoms [w+ psi(s.q) + w- psi(-s.q)] + i location.q)`.
pub fn spectral_characteristic_function(atoms: &[SpectralAtom], location: &[f64], alpha: f64, q: &[f64]) -> Complex64 {
    let mut exponent = Complex64::new(0.0, dot(location, q));
    for atom in atoms {
        let u = dot(&atom.direction, q);
        exponent -= psi(u, alpha) * atom.weight_plus + psi(-u, alpha) * atom.weight_minus;
    }
    exponent.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Dag, NoiseLaw};
    use crate::rng::{seeded, uniform};
    use alloc::string::String;
    use alloc::vec;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| alloc::format!("x{i}")).collect()
    }

    #[test]
    fn independent_symmetric_nodes() {
        let gammas = [1.0, 0.5, 2.0];
        let m = SGModel::independent(names(3), 1.3, gammas.iter().map(|&g| NoiseLaw::symmetric(g)).collect()).unwrap();
        let (atoms, loc) = m.spectral_atoms();
        assert_eq!(loc, vec![0.0; 3]);
        for (k, atom) in atoms.iter().enumerate() {
            let mut e = vec![0.0; 3];
            e[k] = 1.0;
            assert_eq!(atom.direction, e);
            assert_eq!(atom.weight_plus, gammas[k] / 2.0);
            assert_eq!(atom.weight_minus, gammas[k] / 2.0);
        }
    }

    #[test]
    fn totally_skewed_node_has_one_sided_atom() {
        let m = SGModel::new(
            Dag::new(names(2), vec![vec![], vec![0]]).unwrap(),
            0.7,
            vec![vec![], vec![2.0]],
            vec![NoiseLaw { beta: 1.0, gamma: 1.5, mu: 0.0 }, NoiseLaw::symmetric(1.0)],
        )
        .unwrap();
        let (atoms, _) = m.spectral_atoms();
        assert_eq!(atoms[0].weight_minus, 0.0);
        // |c_0| = sqrt(5)
        assert!((atoms[0].weight_plus - 5f64.sqrt().powf(0.7) * 1.5).abs() < 1e-14);
    }

    #[test]
    fn atom_masses_total() {
        let m = SGModel::new(
            Dag::new(names(3), vec![vec![], vec![0], vec![0, 1]]).unwrap(),
            1.6,
            vec![vec![], vec![0.4], vec![-1.1, 0.6]],
            vec![NoiseLaw { beta: 0.3, gamma: 1.1, mu: 0.2 }; 3],
        )
        .unwrap();
        let (atoms, _) = m.spectral_atoms();
        for (atom, c) in atoms.iter().zip(m.noise_map_columns()) {
            assert!((norm2(&atom.direction) - 1.0).abs() < 1e-15);
            let total = norm2(&c).powf(1.6) * 1.1;
            assert!((atom.weight_plus + atom.weight_minus - total).abs() < 1e-13);
        }
    }

    #[test]
    fn random_models_agree_with_product_form() {
        let mut rng = seeded(77);
        for alpha in [1.0, 0.6, 1.5] {
            let parents = vec![vec![], vec![0], vec![0], vec![1, 2]];
            let weights: Vec<Vec<f64>> = parents
                .iter()
                .map(|pa: &Vec<usize>| pa.iter().map(|_| uniform(&mut rng, -1.5, 1.5)).collect())
                .collect();
            let noise: Vec<NoiseLaw> = (0..4)
                .map(|_| NoiseLaw {
                    beta: uniform(&mut rng, -1.0, 1.0),
                    gamma: uniform(&mut rng, 0.2, 2.0),
                    mu: uniform(&mut rng, -1.0, 1.0),
                })
                .collect();
            let m = SGModel::new(Dag::new(names(4), parents).unwrap(), alpha, weights, noise).unwrap();
            let (atoms, loc) = m.spectral_atoms();
            for _ in 0..100 {
                let q: Vec<f64> = (0..4).map(|_| uniform(&mut rng, -2.0, 2.0)).collect();
                let a = m.characteristic_function(&q);
                let b = spectral_characteristic_function(&atoms, &loc, alpha, &q);
                assert!((a - b).norm() < 1e-10, "alpha {alpha}: {a} vs {b}");
            }
        }
    }
}
