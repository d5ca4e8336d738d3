//! Bundled example systems and measures used by the tests, the acceptance
//! suite, and the CLI's named configurations.

use crate::ifs::{ConformalMap, IFSSystem, MobiusInvolutionMap, OrthogonalMatrix, Similitude, SubshiftMatrix};
use crate::measures::{GibbsMeasure, GibbsPotential, ProbabilityVector, SelfSimilarMeasure};
use crate::nonconformal::RestrictedProductIFS;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

fn line_map(r: f64, t: f64) -> ConformalMap {
    ConformalMap::Similitude(Similitude::line(r, t).expect("valid ratio"))
}

/// Cantor middle-thirds system `{x/3, x/3 + 2/3}`.
pub fn cantor_system() -> IFSSystem {
    IFSSystem::new(
        vec!["a".into(), "b".into()],
        vec![line_map(1.0 / 3.0, 0.0), line_map(1.0 / 3.0, 2.0 / 3.0)],
        None,
        None,
    )
    .expect("cantor system")
}

pub fn cantor_system_arc() -> Arc<IFSSystem> {
    Arc::new(cantor_system())
}

/// Cantor measure with weights (1/2, 1/2): the standard non-Rajchman control.
pub fn cantor_measure() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(cantor_system_arc(), ProbabilityVector::uniform(2)).unwrap()
}

/// Contractions by 1/2 and 1/3: `{x/2, x/3 + 2/3}` with a Diophantine
/// log-ratio quotient.
pub fn half_third_system() -> IFSSystem {
    IFSSystem::new(
        vec!["a".into(), "b".into()],
        vec![line_map(0.5, 0.0), line_map(1.0 / 3.0, 2.0 / 3.0)],
        None,
        None,
    )
    .expect("half-third system")
}

pub fn half_third_system_arc() -> Arc<IFSSystem> {
    Arc::new(half_third_system())
}

pub fn half_third_measure() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(half_third_system_arc(), ProbabilityVector::uniform(2)).unwrap()
}

/// Lebesgue measure on [0,1] realized as the binary IFS `{x/2, x/2 + 1/2}`.
pub fn lebesgue_system() -> IFSSystem {
    IFSSystem::new(
        vec!["0".into(), "1".into()],
        vec![line_map(0.5, 0.0), line_map(0.5, 0.5)],
        None,
        None,
    )
    .expect("binary system")
}

pub fn lebesgue_measure() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(Arc::new(lebesgue_system()), ProbabilityVector::uniform(2)).unwrap()
}

/// Homogeneous-ratio control `{x/2, x/2 + 1/4}`: overlapping halves, equal
/// ratios; the separation-lemma hypothesis fails here by design.
pub fn homogeneous_control_system() -> IFSSystem {
    IFSSystem::new(
        vec!["a".into(), "b".into()],
        vec![line_map(0.5, 0.0), line_map(0.5, 0.25)],
        None,
        None,
    )
    .expect("homogeneous control")
}

pub fn homogeneous_control_measure() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(
        Arc::new(homogeneous_control_system()),
        ProbabilityVector::uniform(2),
    )
    .unwrap()
}

/// Planar system with equal ratios, commuting SO(2) rotation parts, and
/// Diophantine angle pair `θ = (√2 − 1, √3 − 1)`: the rotation-separation
/// test case (all same-length words share one frequency modulus).
pub fn rotation2d_system() -> IFSSystem {
    let theta1 = 2f64.sqrt() - 1.0;
    let theta2 = 3f64.sqrt() - 1.0;
    let r1 = 0.40;
    let r2 = 0.40;
    let o1 = OrthogonalMatrix::rotation2(theta1);
    let o2 = OrthogonalMatrix::rotation2(theta2);
    let c1 = DVector::from_vec(vec![0.35, 0.35]);
    let c2 = DVector::from_vec(vec![0.65, 0.65]);
    let t1 = &c1 - o1.matrix() * &c1 * r1;
    let t2 = &c2 - o2.matrix() * &c2 * r2;
    IFSSystem::new(
        vec!["a".into(), "b".into()],
        vec![
            ConformalMap::Similitude(Similitude::new(r1, o1, t1).unwrap()),
            ConformalMap::Similitude(Similitude::new(r2, o2, t2).unwrap()),
        ],
        None,
        None,
    )
    .expect("rotation system")
}

pub fn rotation2d_measure() -> SelfSimilarMeasure {
    SelfSimilarMeasure::new(Arc::new(rotation2d_system()), ProbabilityVector::uniform(2)).unwrap()
}

/// Golden-mean subshift over the `{x/2, x/3 + 2/3}` maps.
pub fn golden_mean_system() -> IFSSystem {
    IFSSystem::new(
        vec!["a".into(), "b".into()],
        vec![line_map(0.5, 0.0), line_map(1.0 / 3.0, 2.0 / 3.0)],
        Some(SubshiftMatrix::from_u8(&[vec![1, 1], vec![1, 0]]).unwrap()),
        None,
    )
    .expect("golden mean system")
}

/// Markov–Gibbs measure from unit weights on the golden-mean subshift.
pub fn golden_mean_measure() -> GibbsMeasure {
    GibbsMeasure::new(
        Arc::new(golden_mean_system()),
        &GibbsPotential::LocallyConstant { values: vec![0.0, 0.0] },
        1,
    )
    .unwrap()
}

/// Degenerate planar measure concentrated on the x-axis (control case for the
/// non-concentration audit).
pub fn degenerate_plane_measure() -> SelfSimilarMeasure {
    let id = OrthogonalMatrix::identity(2);
    let m1 = Similitude::new(
        1.0 / 3.0,
        id.clone(),
        DVector::from_vec(vec![0.0, 0.0]),
    )
    .unwrap();
    let m2 = Similitude::new(1.0 / 3.0, id, DVector::from_vec(vec![2.0 / 3.0, 0.0])).unwrap();
    let sys = IFSSystem::new(
        vec!["a".into(), "b".into()],
        vec![ConformalMap::Similitude(m1), ConformalMap::Similitude(m2)],
        None,
        None,
    )
    .unwrap();
    SelfSimilarMeasure::new(Arc::new(sys), ProbabilityVector::uniform(2)).unwrap()
}

/// The UNI example: two Möbius involutions with distinct poles (affinely
/// independent in d = 1) plus one similitude, strongly separated on [0,1].
///
/// `f_1(x) = 0.7 − 1/(x+1.5)`, `f_2(x) = −0.05 + 1/(2.5−x)`,
/// `f_3(x) = 0.3·x + 0.68`.
pub fn uni_mobius_system() -> IFSSystem {
    let neg = OrthogonalMatrix::new(DMatrix::from_element(1, 1, -1.0)).unwrap();
    let f1 = MobiusInvolutionMap::new(
        DVector::from_vec(vec![0.7]),
        1.0,
        neg.clone(),
        DVector::from_vec(vec![-1.5]),
    )
    .unwrap();
    let f2 = MobiusInvolutionMap::new(
        DVector::from_vec(vec![-0.05]),
        1.0,
        neg,
        DVector::from_vec(vec![2.5]),
    )
    .unwrap();
    let f3 = Similitude::line(0.3, 0.68).unwrap();
    IFSSystem::new(
        vec!["m1".into(), "m2".into(), "s".into()],
        vec![
            ConformalMap::Mobius(f1),
            ConformalMap::Mobius(f2),
            ConformalMap::Similitude(f3),
        ],
        None,
        None,
    )
    .expect("uni mobius system")
}

pub fn uni_mobius_system_arc() -> Arc<IFSSystem> {
    Arc::new(uni_mobius_system())
}

/// Gibbs measure with uniform weights on the UNI example (full 3-shift).
pub fn uni_mobius_gibbs() -> GibbsMeasure {
    GibbsMeasure::new(
        uni_mobius_system_arc(),
        &GibbsPotential::LocallyConstant {
            values: vec![(1f64 / 3.0).ln(); 3],
        },
        1,
    )
    .unwrap()
}

/// All-similitude control with a commuting phase: `{x/2, x/2 + 1/2}` as a
/// resonant system for the spectral-gap audit (no UNI; λ constant).
pub fn similitude_control_system() -> IFSSystem {
    lebesgue_system()
}

fn mobius_branch(i: usize) -> ConformalMap {
    // x ↦ 1/(x+i), a Gauss-map-like involution branch
    ConformalMap::Mobius(
        MobiusInvolutionMap::new(
            DVector::from_vec(vec![0.0]),
            1.0,
            OrthogonalMatrix::identity(1),
            DVector::from_vec(vec![-(i as f64)]),
        )
        .unwrap(),
    )
}

/// The six-map restricted product `f_{(i,j)}(x,y) = (1/(x+i), 1/(y+j))` over
/// the index set {(1,2),(1,3),(2,1),(2,3),(3,1),(3,2)} with uniform weights.
pub fn six_map_example() -> RestrictedProductIFS {
    let comp: Vec<ConformalMap> = (1..=3).map(mobius_branch).collect();
    let tuples: Vec<Vec<usize>> = vec![
        vec![0, 1],
        vec![0, 2],
        vec![1, 0],
        vec![1, 2],
        vec![2, 0],
        vec![2, 1],
    ];
    RestrictedProductIFS::new(vec![comp.clone(), comp], tuples, vec![1.0 / 6.0; 6])
        .expect("six-map example")
}

/// Full product control: `𝒜 = 𝒜_1 × 𝒜_2` with product weights, so the fiber
/// measures are β-independent.
pub fn product_control() -> RestrictedProductIFS {
    let comp: Vec<ConformalMap> = (1..=2).map(mobius_branch).collect();
    let tuples: Vec<Vec<usize>> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
    RestrictedProductIFS::new(vec![comp.clone(), comp], tuples, vec![0.25; 4])
        .expect("product control")
}
