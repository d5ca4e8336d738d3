//! The measure-oracle interface: cylinder masses, symbolic sampling, support
//! geometry. All oracles are immutable after construction; estimators are
//! pure given their seeds.

use crate::geom::IntervalBox;
use crate::ifs::{IFSSystem, SubshiftMatrix, Word};
use crate::Result;
use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mass bracket `[lo, hi]` for a cylinder or ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassInterval {
    pub lo: f64,
    pub hi: f64,
}

impl MassInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        MassInterval { lo, hi }
    }

    pub fn point(m: f64) -> Self {
        MassInterval { lo: m, hi: m }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn add(&self, o: &MassInterval) -> MassInterval {
        MassInterval::new(self.lo + o.lo, self.hi + o.hi)
    }
}

/// Handle exposing the measure structure needed by the audits.
pub trait MeasureOracle: Send + Sync {
    fn system(&self) -> &IFSSystem;

    fn subshift(&self) -> Option<&SubshiftMatrix> {
        self.system().subshift()
    }

    /// Mass bracket of the cylinder `X_α` (a point interval when exact).
    fn cylinder_mass(&self, word: &Word) -> Result<MassInterval>;

    /// Symbol distribution for the next digit given the previous one.
    fn step_distribution(&self, prev: Option<usize>) -> Vec<f64>;

    /// Box hull of the support.
    fn support_hull(&self) -> IntervalBox {
        self.system().attractor_hull().clone()
    }

    /// Barycenter when available in closed form (used by evaluator closures).
    fn barycenter(&self) -> Option<DVector<f64>> {
        None
    }

    /// Draws a symbolic word of length `len` from the digit chain.
    fn sample_word(&self, rng: &mut ChaCha8Rng, len: usize) -> Word {
        let k = self.system().alphabet_len();
        let mut w = Word::empty(k);
        let mut prev = None;
        for _ in 0..len {
            let dist = self.step_distribution(prev);
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = k - 1;
            for (i, &p) in dist.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            w.push(pick);
            prev = Some(pick);
        }
        w
    }
}

/// Word length at which cylinders shrink below `tol` in diameter.
pub fn depth_for_diameter(system: &IFSSystem, tol: f64) -> usize {
    let d = system.dimension();
    let probes = crate::ifs::map::sample_cube(d, 128);
    let hull = system.attractor_hull();
    let mut lam_sup = 0.0f64;
    for a in 0..system.alphabet_len() {
        for t in &probes {
            let x = DVector::from_iterator(
                d,
                hull.coords.iter().zip(t.iter()).map(|(c, &v)| c.lo + v * c.width()),
            );
            lam_sup = lam_sup.max(system.map(a).conformal_factor(&x).abs());
        }
    }
    let lam_sup = lam_sup.min(0.995);
    let d0 = hull.diameter().max(1.0);
    ((tol / d0).ln() / lam_sup.ln()).ceil().max(1.0) as usize
}

/// `n` i.i.d. points of the measure via symbolic digit sampling truncated at
/// machine-precision cylinder diameter. Deterministic per seed.
pub fn sample_points<M: MeasureOracle + ?Sized>(oracle: &M, seed: u64, n: usize) -> Vec<DVector<f64>> {
    let sys = oracle.system();
    let depth = depth_for_diameter(sys, 1e-15).min(4000);
    let x0 = sys.reference_point();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let w = oracle.sample_word(&mut rng, depth);
            sys.compose_word(&w, &x0).expect("sampled words are admissible")
        })
        .collect()
}

/// Symbolic sample: the digit words themselves (used by exact-orbit callers).
pub fn sample_words<M: MeasureOracle + ?Sized>(oracle: &M, seed: u64, n: usize, depth: usize) -> Vec<Word> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| oracle.sample_word(&mut rng, depth)).collect()
}
