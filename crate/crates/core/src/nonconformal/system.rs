//! Restricted-product (carpet-like) IFSs: component 1-D C² families glued
//! along an admissible tuple set.

use crate::ifs::{check_strong_separation, ConformalMap, IFSSystem};
use crate::measures::ProbabilityVector;
use crate::{CoreError, Result};
use nalgebra::DVector;
use std::sync::Arc;

#[derive(Clone)]
pub struct RestrictedProductIFS {
    /// `components[i]` is the 1-D family acting on coordinate `i`.
    pub components: Vec<Vec<ConformalMap>>,
    /// Admissible tuples `ā = (a_1, …, a_d)` as indices into the components.
    pub tuples: Vec<Vec<usize>>,
    pub p: ProbabilityVector,
    /// Per-component wrapped systems (for separation checks and hulls).
    component_systems: Vec<Arc<IFSSystem>>,
}

impl std::fmt::Debug for RestrictedProductIFS {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "RestrictedProductIFS(d={}, tuples={})",
            self.components.len(),
            self.tuples.len()
        )
    }
}

impl RestrictedProductIFS {
    /// Builds the system and verifies hypotheses (1) component strong
    /// separation and (2) sibling tuples in every coordinate. The per-i UNI
    /// hypothesis (3) is checked by `project_alphabet`, which needs the
    /// margin machinery.
    pub fn new(
        components: Vec<Vec<ConformalMap>>,
        tuples: Vec<Vec<usize>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let d = components.len();
        if d < 2 {
            return Err(CoreError::invalid(
                "restricted products need at least two coordinates",
            ));
        }
        if components
            .iter()
            .any(|c| c.is_empty() || c.iter().any(|m| m.dim() != 1))
        {
            return Err(CoreError::invalid("components must be non-empty 1-D families"));
        }
        if tuples.is_empty() {
            return Err(CoreError::invalid("tuple set must be non-empty"));
        }
        for t in &tuples {
            if t.len() != d {
                return Err(CoreError::invalid("every tuple must have one index per coordinate"));
            }
            for (i, &a) in t.iter().enumerate() {
                if a >= components[i].len() {
                    return Err(CoreError::invalid(format!(
                        "tuple index {a} out of range for component {i}"
                    )));
                }
            }
        }
        let p = ProbabilityVector::new(weights)?;
        if p.len() != tuples.len() {
            return Err(CoreError::invalid("one weight per tuple required"));
        }

        let component_systems = components
            .iter()
            .enumerate()
            .map(|(i, maps)| {
                let labels = (0..maps.len()).map(|j| format!("c{i}m{j}")).collect();
                IFSSystem::new(labels, maps.clone(), None, None).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;

        // hypothesis (1): each component satisfies strong separation
        for (i, sys) in component_systems.iter().enumerate() {
            let rep = check_strong_separation(sys, 3)?;
            if !rep.ok {
                return Err(CoreError::HypothesisViolation(
                    1,
                    format!("component {i} fails strong separation (gap 0 at depth 3)"),
                ));
            }
        }
        // hypothesis (2): every tuple has a sibling differing exactly at i
        for t in &tuples {
            for i in 0..d {
                let has_sibling = tuples.iter().any(|s| {
                    s[i] != t[i] && s.iter().zip(t).enumerate().all(|(j, (x, y))| j == i || x == y)
                });
                if !has_sibling {
                    return Err(CoreError::HypothesisViolation(
                        2,
                        format!("tuple {t:?} has no sibling differing exactly in coordinate {i}"),
                    ));
                }
            }
        }

        Ok(RestrictedProductIFS {
            components,
            tuples,
            p,
            component_systems,
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component_system(&self, i: usize) -> &Arc<IFSSystem> {
        &self.component_systems[i]
    }

    /// Applies the tuple map `F_ā` coordinate-wise.
    pub fn apply_tuple(&self, tuple: &[usize], x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            tuple.iter().enumerate().map(|(i, &a)| {
                let xi = DVector::from_element(1, x[i]);
                self.components[i][a].apply(&xi)[0]
            }),
        )
    }

    /// Permutes the coordinates (used to rotate the dominant frequency axis
    /// into coordinate 1). `perm[i]` gives the old index now at position `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        if perm.len() != d {
            return Err(CoreError::invalid("permutation length mismatch"));
        }
        let components: Vec<Vec<ConformalMap>> =
            perm.iter().map(|&i| self.components[i].clone()).collect();
        let tuples: Vec<Vec<usize>> = self
            .tuples
            .iter()
            .map(|t| perm.iter().map(|&i| t[i]).collect())
            .collect();
        RestrictedProductIFS::new(components, tuples, self.p.as_slice().to_vec())
    }

    /// Samples a point of the stationary measure (tuple digits i.i.d. `p`).
    pub fn sample_stationary_points(&self, seed: u64, n: usize, depth: usize) -> Vec<DVector<f64>> {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        (0..n)
            .map(|_| {
                let digits: Vec<usize> = (0..depth)
                    .map(|_| {
                        let u: f64 = rng.random();
                        let mut acc = 0.0;
                        for (idx, &w) in self.p.as_slice().iter().enumerate() {
                            acc += w;
                            if u < acc {
                                return idx;
                            }
                        }
                        self.tuples.len() - 1
                    })
                    .collect();
                let mut x = DVector::from_element(d, 0.0);
                for &t in digits.iter().rev() {
                    x = self.apply_tuple(&self.tuples[t], &x);
                }
                x
            })
            .collect()
    }
}
