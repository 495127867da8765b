//! Layer-by-layer first-passage recursions.
//!
//! Two recursions are provided. [`delta_step`] is the scalar Markov chain
//! of height differences `delta_n = l'_n - l_n` for the `XYZ` ladder, where
//! `l_n` and `l'_n` are the first-passage times to `(n,0)` and `(n,1)`.
//! [`generic_step`] handles any edge family by relaxing the four-vertex
//! gadget that column `n` adds to `G_{n-1}`.
//!
//! Increments `lambda_n = l_n - l_{n-1}` are not sign-constrained: when the
//! chain sits far below zero the path to `(n,0)` through the top rail can be
//! cheaper than the path to `(n-1,0)`.

use rand::Rng;

use crate::graph::{exp1, stream_rng, GraphFamily, LayerWeights, LADDER_STREAM};
use crate::{Error, Result};

/// State of the `XYZ` chain: `delta = l'_n - l_n` and the running `l_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaState {
    pub delta: f64,
    pub l: f64,
}

impl DeltaState {
    /// First-passage time to the top frontier vertex.
    pub fn l_prime(&self) -> f64 {
        self.l + self.delta
    }

    /// One layer; returns the new state and the increment `lambda`.
    #[inline]
    pub fn advance(self, x: f64, y: f64, z: f64) -> (Self, f64) {
        let lambda = x.min(self.delta + y + z);
        let delta = (self.delta + y).min(x + z) - lambda;
        (
            Self {
                delta,
                l: self.l + lambda,
            },
            lambda,
        )
    }
}

/// Column 0: `l_0 = 0`, `l'_0 = z0`.
pub fn delta_init(z0: f64) -> DeltaState {
    DeltaState { delta: z0, l: 0.0 }
}

/// `delta_n = min(delta + y, x + z) - min(x, delta + y + z)` and
/// `l_n = l_{n-1} + min(x, delta + y + z)`. Panics if `w` lacks `x`, `y`
/// or `z`.
pub fn delta_step(state: DeltaState, w: &LayerWeights) -> DeltaState {
    let (x, y, z) = w.xyz();
    state.advance(x, y, z).0
}

/// First-passage times to the two frontier vertices `(n,0)` and `(n,1)`.
///
/// Stored as an absolute `base` plus two offsets, the smaller of which is
/// zero, so the offsets stay O(1) however long the ladder grows. An
/// unreachable vertex has offset `+inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenericFrontier {
    base: f64,
    rel: [f64; 2],
}

impl GenericFrontier {
    pub fn new(d0: f64, d1: f64) -> Self {
        let mut front = Self {
            base: 0.0,
            rel: [d0, d1],
        };
        front.renormalize();
        front
    }

    /// Column 0 of a fresh ladder.
    pub fn origin(z0: Option<f64>) -> Self {
        Self::new(0.0, z0.unwrap_or(f64::INFINITY))
    }

    pub fn d0(&self) -> f64 {
        self.base + self.rel[0]
    }

    pub fn d1(&self) -> f64 {
        self.base + self.rel[1]
    }

    /// `d1 - d0`, computed from the offsets.
    pub fn delta(&self) -> f64 {
        self.rel[1] - self.rel[0]
    }

    pub fn is_finite(&self) -> bool {
        self.base.is_finite() && self.rel.iter().all(|r| r.is_finite())
    }

    fn renormalize(&mut self) {
        let m = self.rel[0].min(self.rel[1]);
        if m.is_finite() {
            self.base += m;
            self.rel[0] -= m;
            self.rel[1] -= m;
        }
    }

    /// One layer; returns the new frontier and the increment of `d0`.
    #[inline]
    pub fn advance(self, w: &LayerWeights, family: GraphFamily) -> (Self, f64) {
        // Gadget vertices: 0 = (n-1,0), 1 = (n-1,1), 2 = (n,0), 3 = (n,1).
        let mut dist = [self.rel[0], self.rel[1], f64::INFINITY, f64::INFINITY];
        let mut edges = [(0usize, 0usize, 0.0f64); 5];
        let mut count = 0;
        let mut push = |present: bool, weight: Option<f64>, a: usize, b: usize, name: char| {
            if present {
                let weight = weight
                    .unwrap_or_else(|| panic!("layer lacks a {name} weight for family {family}"));
                edges[count] = (a, b, weight);
                count += 1;
            }
        };
        push(family.has_x, w.x, 0, 2, 'X');
        push(family.has_y, w.y, 1, 3, 'Y');
        push(family.has_v, w.v, 0, 3, 'V');
        push(family.has_w, w.w, 1, 2, 'W');
        push(family.has_z, w.z, 2, 3, 'Z');
        let edges = &edges[..count];

        // Bellman-Ford on four vertices: three rounds reach the fixed
        // point, the fourth only confirms it.
        for _ in 0..4 {
            let mut changed = false;
            for &(a, b, weight) in edges {
                if dist[a] + weight < dist[b] {
                    dist[b] = dist[a] + weight;
                    changed = true;
                }
                if dist[b] + weight < dist[a] {
                    dist[a] = dist[b] + weight;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let lambda = dist[2] - self.rel[0];
        let mut next = Self {
            base: self.base,
            rel: [dist[2], dist[3]],
        };
        next.renormalize();
        (next, lambda)
    }
}

/// Exact update of the frontier first-passage times when column `n` is
/// appended: shortest paths inside the gadget spanned by columns `n-1` and
/// `n`, seeded with the old frontier times. Paths may dip back into column
/// `n-1` through the new column, which the gadget relaxation captures.
pub fn generic_step(
    front: GenericFrontier,
    w: &LayerWeights,
    family: GraphFamily,
) -> GenericFrontier {
    front.advance(w, family).0
}

/// Which recursion drives a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Scalar height-difference chain; `XYZ` only.
    Delta,
    /// Gadget relaxation; any family.
    Generic,
}

impl Engine {
    /// The delta chain for `XYZ`, the generic recursion otherwise.
    pub fn for_family(family: GraphFamily) -> Self {
        if family == GraphFamily::XYZ {
            Self::Delta
        } else {
            Self::Generic
        }
    }
}

/// One increment and the height difference after it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainStep {
    pub lambda: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug)]
enum Walker {
    Delta(DeltaState),
    Generic(GenericFrontier),
}

/// Streams `(lambda_k, delta_k)` layer by layer without storing the ladder.
///
/// Weights are drawn in the same order as [`crate::graph::sample_ladder_with`],
/// so a chain and a sampled ladder built from equal generators see equal
/// weights.
pub struct ChainRun<R> {
    family: GraphFamily,
    rng: R,
    remaining: usize,
    walker: Walker,
}

impl<R: Rng> ChainRun<R> {
    pub fn new(family: GraphFamily, engine: Engine, steps: usize, mut rng: R) -> Result<Self> {
        let z0 = family.has_z.then(|| exp1(&mut rng));
        let walker = match engine {
            Engine::Delta => {
                if family != GraphFamily::XYZ {
                    return Err(Error::UnsupportedFamily {
                        family,
                        reason: "the delta recursion is defined for XYZ only",
                    });
                }
                Walker::Delta(delta_init(z0.unwrap_or_default()))
            }
            Engine::Generic => Walker::Generic(GenericFrontier::origin(z0)),
        };
        Ok(Self {
            family,
            rng,
            remaining: steps,
            walker,
        })
    }

    /// Current first-passage time to `(n,0)`.
    pub fn l(&self) -> f64 {
        match self.walker {
            Walker::Delta(s) => s.l,
            Walker::Generic(f) => f.d0(),
        }
    }

    /// Current `l'_n - l_n`.
    pub fn delta(&self) -> f64 {
        match self.walker {
            Walker::Delta(s) => s.delta,
            Walker::Generic(f) => f.delta(),
        }
    }

    pub fn frontier_is_finite(&self) -> bool {
        match self.walker {
            Walker::Delta(s) => s.l.is_finite() && s.delta.is_finite(),
            Walker::Generic(f) => f.is_finite(),
        }
    }

    /// Advances `steps` layers without yielding; the run length budget is
    /// not consumed.
    pub fn skip_layers(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step_once();
        }
    }

    #[inline]
    fn step_once(&mut self) -> ChainStep {
        let w = LayerWeights::sample(self.family, &mut self.rng);
        match &mut self.walker {
            Walker::Delta(state) => {
                let (x, y, z) = w.xyz();
                let (next, lambda) = state.advance(x, y, z);
                *state = next;
                ChainStep {
                    lambda,
                    delta: next.delta,
                }
            }
            Walker::Generic(front) => {
                let (next, lambda) = front.advance(&w, self.family);
                *front = next;
                ChainStep {
                    lambda,
                    delta: next.delta(),
                }
            }
        }
    }
}

impl<R: Rng> Iterator for ChainRun<R> {
    type Item = ChainStep;

    fn next(&mut self) -> Option<ChainStep> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.step_once())
    }
}

/// `n` steps of the chain for `family`, on the weights `sample_ladder(family, n, seed)`
/// would produce.
pub fn run_chain(
    family: GraphFamily,
    n: usize,
    seed: u64,
) -> Result<ChainRun<rand_chacha::ChaCha8Rng>> {
    if n == 0 {
        return Err(Error::EmptyLadder);
    }
    ChainRun::new(
        family,
        Engine::for_family(family),
        n,
        stream_rng(seed, LADDER_STREAM),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{frontier_oracle, sample_ladder};

    fn xyz(x: f64, y: f64, z: f64) -> LayerWeights {
        LayerWeights {
            x: Some(x),
            y: Some(y),
            z: Some(z),
            ..Default::default()
        }
    }

    #[test]
    fn init_is_rung_weight() {
        assert_eq!(delta_init(0.3), DeltaState { delta: 0.3, l: 0.0 });
        assert_eq!(delta_init(0.0), DeltaState { delta: 0.0, l: 0.0 });
    }

    #[test]
    fn symmetric_step() {
        let s = delta_step(delta_init(0.0), &xyz(1.0, 1.0, 1.0));
        assert_eq!(s.delta, 0.0);
        assert_eq!(s.l, 1.0);
    }

    #[test]
    fn hand_evaluated_step() {
        let s = delta_step(DeltaState { delta: 0.5, l: 0.0 }, &xyz(2.0, 0.1, 10.0));
        assert!((s.delta - (-1.4)).abs() < 1e-12);
        assert_eq!(s.l, 2.0);
    }

    #[test]
    fn increments_can_be_negative() {
        // delta far below zero: the top rail plus a rung undercuts l_{n-1}.
        let (_, lambda) = DeltaState {
            delta: -3.0,
            l: 5.0,
        }
        .advance(2.0, 0.5, 0.5);
        assert!((lambda - (-2.0)).abs() < 1e-12);
    }

    #[test]
    fn vwx_hand_evaluation() {
        let w = LayerWeights {
            v: Some(1.0),
            w: Some(3.0),
            x: Some(2.0),
            ..Default::default()
        };
        let f = generic_step(
            GenericFrontier::new(0.0, f64::INFINITY),
            &w,
            GraphFamily::VWX,
        );
        assert_eq!(f.d0(), 2.0);
        assert_eq!(f.d1(), 1.0);
    }

    #[test]
    fn backtracking_through_new_column() {
        // (n-1,0) -X-> (n,0) -W-> (n-1,1) -Y-> (n,1) beats every direct edge.
        let w = LayerWeights {
            v: Some(3.0),
            w: Some(0.1),
            x: Some(0.1),
            y: Some(0.1),
            ..Default::default()
        };
        let f = generic_step(GenericFrontier::new(0.0, 5.0), &w, GraphFamily::VWXY);
        assert!((f.d0() - 0.1).abs() < 1e-12);
        assert!((f.d1() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn generic_matches_delta_on_xyz() {
        let mut rng = stream_rng(99, 7);
        let mut state = delta_init(exp1(&mut rng));
        let mut front = GenericFrontier::new(0.0, state.delta);
        for _ in 0..100_000 {
            let w = LayerWeights::sample(GraphFamily::XYZ, &mut rng);
            state = delta_step(state, &w);
            front = generic_step(front, &w, GraphFamily::XYZ);
            assert!((state.delta - front.delta()).abs() < 1e-12);
        }
        assert!((state.l - front.d0()).abs() < 1e-12 * state.l.max(1.0));
    }

    #[test]
    fn delta_recursion_matches_oracle() {
        for seed in 0..300 {
            let n = 1 + (seed as usize * 7) % 50;
            let ladder = sample_ladder(GraphFamily::XYZ, n, seed).unwrap();
            let mut state = delta_init(ladder.z0.unwrap());
            for layer in &ladder.layers {
                state = delta_step(state, layer);
            }
            let (d0, d1) = frontier_oracle(&ladder);
            assert!((state.l - d0).abs() < 1e-9, "seed {seed}");
            assert!((state.l_prime() - d1).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn run_chain_replays_sampled_ladder() {
        for family in GraphFamily::NONTRIVIAL {
            let ladder = sample_ladder(family, 40, 3).unwrap();
            let mut run = run_chain(family, 40, 3).unwrap();
            let steps: Vec<ChainStep> = run.by_ref().collect();
            assert_eq!(steps.len(), 40);
            let (d0, d1) = frontier_oracle(&ladder);
            assert!((run.l() - d0).abs() < 1e-9, "{family}");
            assert!((run.delta() - (d1 - d0)).abs() < 1e-9, "{family}");
        }
    }

    #[test]
    fn delta_ignores_history() {
        let mut rng = stream_rng(5, 1);
        let mut a = DeltaState { delta: 0.7, l: 0.0 };
        let mut b = DeltaState {
            delta: 0.7,
            l: 123.4,
        };
        for _ in 0..1000 {
            let w = LayerWeights::sample(GraphFamily::XYZ, &mut rng);
            a = delta_step(a, &w);
            b = delta_step(b, &w);
            assert_eq!(a.delta, b.delta);
        }
    }

    #[test]
    fn l_is_sum_of_increments() {
        let n = 100_000;
        let mut run = run_chain(GraphFamily::XYZ, n, 17).unwrap();
        let total: f64 = run.by_ref().map(|s| s.lambda).sum();
        assert!((run.l() - total).abs() < 1e-9 * n as f64);
    }

    #[test]
    fn x_rail_increments_are_weights() {
        let n = 200_000;
        let run = run_chain(GraphFamily::X, n, 4).unwrap();
        let mean = run.map(|s| s.lambda).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");

        let ladder = sample_ladder(GraphFamily::X, 10, 4).unwrap();
        let lambdas: Vec<f64> = run_chain(GraphFamily::X, 10, 4)
            .unwrap()
            .map(|s| s.lambda)
            .collect();
        let xs: Vec<f64> = ladder.layers.iter().map(|l| l.x.unwrap()).collect();
        assert_eq!(lambdas, xs);
    }

    #[test]
    fn delta_engine_requires_xyz() {
        assert!(ChainRun::new(GraphFamily::VWX, Engine::Delta, 5, stream_rng(1, 1)).is_err());
        assert!(run_chain(GraphFamily::XYZ, 0, 1).is_err());
    }

    #[test]
    fn chains_couple() {
        let mut coupled = 0;
        let seeds = 200;
        for seed in 0..seeds {
            let mut rng = stream_rng(seed, 11);
            let mut lo = DeltaState {
                delta: -5.0,
                l: 0.0,
            };
            let mut hi = DeltaState { delta: 5.0, l: 0.0 };
            for _ in 0..10_000 {
                let w = LayerWeights::sample(GraphFamily::XYZ, &mut rng);
                lo = delta_step(lo, &w);
                hi = delta_step(hi, &w);
                if (lo.delta - hi.delta).abs() < 1e-9 {
                    coupled += 1;
                    break;
                }
            }
        }
        assert!(coupled as f64 >= 0.99 * seeds as f64, "{coupled}/{seeds}");
    }
}
