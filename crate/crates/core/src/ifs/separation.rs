//! Strong-separation checking via interval-arithmetic cylinder hulls.

use crate::geom::IntervalBox;
use crate::ifs::{IFSSystem, Word};
use crate::Result;

/// Outcome of a strong-separation check at a given refinement depth.
#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub ok: bool,
    /// Minimal distance between the refined hulls of two distinct depth-1
    /// cylinders (0 when they touch or overlap).
    pub gap: f64,
    pub depth: usize,
}

/// Checks `X_a ∩ X_b = ∅` for `a ≠ b` using depth-1 cylinder hulls refined to
/// `depth`: each `X_a` is covered by the leaf boxes `f_{aβ}([0,1]^d)` with
/// `|β| = depth − 1`, and the pairwise union distances are compared.
pub fn check_strong_separation(system: &IFSSystem, depth: usize) -> Result<SeparationReport> {
    assert!(depth >= 1, "depth must be at least 1");
    let k = system.alphabet_len();
    let mut leaves: Vec<Vec<IntervalBox>> = Vec::with_capacity(k);
    for a in 0..k {
        leaves.push(refine_cylinder(system, a, depth)?);
    }
    if k == 1 {
        return Ok(SeparationReport {
            ok: true,
            gap: f64::INFINITY,
            depth,
        });
    }
    let mut gap = f64::INFINITY;
    let mut ok = true;
    for a in 0..k {
        for b in a + 1..k {
            let mut pair_gap = f64::INFINITY;
            for ba in &leaves[a] {
                for bb in &leaves[b] {
                    pair_gap = pair_gap.min(ba.distance(bb));
                }
            }
            gap = gap.min(pair_gap);
            if pair_gap == 0.0 {
                ok = false;
            }
        }
    }
    Ok(SeparationReport { ok, gap, depth })
}

/// Leaf hulls `f_{aβ}(unit cube)` over all admissible `β` with `|β| = depth−1`.
fn refine_cylinder(system: &IFSSystem, a: usize, depth: usize) -> Result<Vec<IntervalBox>> {
    let k = system.alphabet_len();
    let mut out = Vec::new();
    let root = system.empty_word().child(a);
    let mut stack = vec![root];
    while let Some(w) = stack.pop() {
        if w.len() == depth {
            out.push(word_image_box(system, &w));
            continue;
        }
        for b in 0..k {
            let ok = match system.subshift() {
                Some(m) => m.admits(w.last().unwrap(), b),
                None => true,
            };
            if ok {
                stack.push(w.child(b));
            }
        }
    }
    Ok(out)
}

fn word_image_box(system: &IFSSystem, word: &Word) -> IntervalBox {
    let mut b = IntervalBox::unit(system.dimension());
    for a in word.symbols().rev() {
        b = system.map(a).map_box(&b);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::ifs::{ConformalMap, IFSSystem, Similitude};

    #[test]
    fn cantor_thirds_gap_is_one_third() {
        let sys = bundled::cantor_system();
        for depth in 1..=4 {
            let rep = check_strong_separation(&sys, depth).unwrap();
            assert!(rep.ok);
            assert!((rep.gap - 1.0 / 3.0).abs() < 1e-12, "gap = {}", rep.gap);
        }
    }

    #[test]
    fn overlapping_halves_fail() {
        let maps = vec![
            ConformalMap::Similitude(Similitude::line(0.5, 0.0).unwrap()),
            ConformalMap::Similitude(Similitude::line(0.5, 0.25).unwrap()),
        ];
        let sys = IFSSystem::new(vec!["a".into(), "b".into()], maps, None, None).unwrap();
        let rep = check_strong_separation(&sys, 3).unwrap();
        assert!(!rep.ok);
        assert_eq!(rep.gap, 0.0);
    }

    #[test]
    fn single_map_vacuously_separated() {
        let maps = vec![ConformalMap::Similitude(Similitude::line(0.5, 0.1).unwrap())];
        let sys = IFSSystem::new(vec!["a".into()], maps, None, None).unwrap();
        let rep = check_strong_separation(&sys, 2).unwrap();
        assert!(rep.ok);
    }

    #[test]
    fn six_map_components_separate_after_refinement() {
        // 1/(x+i) images of [0,1] touch at endpoints but the attractor
        // cylinders are disjoint, which refinement picks up.
        let comps = bundled::six_map_example().components;
        let sys = IFSSystem::new(
            vec!["1".into(), "2".into(), "3".into()],
            comps[0].clone(),
            None,
            None,
        )
        .unwrap();
        let rep = check_strong_separation(&sys, 3).unwrap();
        assert!(rep.ok, "gap = {}", rep.gap);
    }
}
