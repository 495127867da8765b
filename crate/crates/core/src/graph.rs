//! Width-two stretch graphs: edge families, weight sampling and the
//! Dijkstra first-passage oracle.
//!
//! Layer `i` (for `1 <= i <= n`) holds the weights of the edges entering
//! column `i`:
//!
//! ```text
//!   X_i: (i-1,0) -- (i,0)      V_i: (i-1,0) -- (i,1)
//!   Y_i: (i-1,1) -- (i,1)      W_i: (i-1,1) -- (i,0)
//!   Z_i: (i,0)   -- (i,1)
//! ```
//!
//! The rung at column 0 is stored separately as `z0`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which of the five edge families are present.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GraphFamily {
    pub has_v: bool,
    pub has_w: bool,
    pub has_x: bool,
    pub has_y: bool,
    pub has_z: bool,
}

impl GraphFamily {
    pub const fn new(has_v: bool, has_w: bool, has_x: bool, has_y: bool, has_z: bool) -> Self {
        Self {
            has_v,
            has_w,
            has_x,
            has_y,
            has_z,
        }
    }

    pub const X: Self = Self::new(false, false, true, false, false);
    pub const XYZ: Self = Self::new(false, false, true, true, true);
    pub const VWXY: Self = Self::new(true, true, true, true, false);
    pub const WXYZ: Self = Self::new(false, true, true, true, true);
    pub const VWX: Self = Self::new(true, true, true, false, false);
    pub const VWXZ: Self = Self::new(true, true, true, false, true);
    pub const VWXYZ: Self = Self::new(true, true, true, true, true);

    /// Families with a closed-form time constant.
    pub const SOLVED: [Self; 3] = [Self::XYZ, Self::VWXY, Self::WXYZ];
    /// Non-trivial families known only numerically.
    pub const UNSOLVED: [Self; 3] = [Self::VWX, Self::VWXZ, Self::VWXYZ];
    /// The six non-trivial families, in table order.
    pub const NONTRIVIAL: [Self; 6] = [
        Self::XYZ,
        Self::VWXY,
        Self::WXYZ,
        Self::VWX,
        Self::VWXZ,
        Self::VWXYZ,
    ];

    /// All 32 subsets of `{V, W, X, Y, Z}`.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..32).map(|bits| {
            Self::new(
                bits & 1 != 0,
                bits & 2 != 0,
                bits & 4 != 0,
                bits & 8 != 0,
                bits & 16 != 0,
            )
        })
    }

    /// Canonical (alphabetical) letter string, e.g. `"VWXYZ"`.
    pub fn letters(&self) -> String {
        [
            (self.has_v, 'V'),
            (self.has_w, 'W'),
            (self.has_x, 'X'),
            (self.has_y, 'Y'),
            (self.has_z, 'Z'),
        ]
        .iter()
        .filter(|(present, _)| *present)
        .map(|(_, c)| *c)
        .collect()
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.pad("{}")
        } else {
            f.pad(&self.letters())
        }
    }
}

impl fmt::Debug for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphFamily({self})")
    }
}

/// Parses an unordered letter set: `"ZYX"` and `"xyz"` both give `XYZ`.
impl FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseFamily(s.to_string());
        let mut family = Self::default();
        if s.is_empty() {
            return Err(bad());
        }
        for c in s.chars() {
            let slot = match c.to_ascii_uppercase() {
                'V' => &mut family.has_v,
                'W' => &mut family.has_w,
                'X' => &mut family.has_x,
                'Y' => &mut family.has_y,
                'Z' => &mut family.has_z,
                _ => return Err(bad()),
            };
            if *slot {
                return Err(bad());
            }
            *slot = true;
        }
        Ok(family)
    }
}

impl TryFrom<String> for GraphFamily {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphFamily> for String {
    fn from(family: GraphFamily) -> String {
        family.letters()
    }
}

/// How a family behaves as far as the time constant is concerned.
///
/// Only the six families of the results table are non-trivial. Outside
/// that list the labels are our own determination: `Disconnected` means
/// some column's row-0 vertex cannot be reached from `(0,0)`, `Trivial`
/// covers everything else (a forced single path, a dead-end decoration of
/// the `X` rail, or a relabelling of one of the six families).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Trivial,
    NontrivialSolved,
    NontrivialUnsolved,
    Disconnected,
}

impl Classification {
    pub fn is_nontrivial(self) -> bool {
        matches!(self, Self::NontrivialSolved | Self::NontrivialUnsolved)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Trivial => "trivial",
            Self::NontrivialSolved => "nontrivial-solved",
            Self::NontrivialUnsolved => "nontrivial-unsolved",
            Self::Disconnected => "disconnected",
        })
    }
}

pub fn classify(family: GraphFamily) -> Classification {
    if GraphFamily::SOLVED.contains(&family) {
        Classification::NontrivialSolved
    } else if GraphFamily::UNSOLVED.contains(&family) {
        Classification::NontrivialUnsolved
    } else if (1..=4).all(|n| structurally_reachable(family, n)) {
        // The edge pattern has period one in the column index, so any
        // parity obstruction shows up within the first few columns.
        Classification::Trivial
    } else {
        Classification::Disconnected
    }
}

/// Breadth-first search on the unweighted graph `G_n`: is `(n,0)` reachable
/// from `(0,0)`?
fn structurally_reachable(family: GraphFamily, n: usize) -> bool {
    let mut seen = vec![false; 2 * (n + 1)];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let edges = structural_edges(family, n);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in &edges {
            let next = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[next] {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    seen[Vertex::new(n, 0).index()]
}

fn structural_edges(family: GraphFamily, n: usize) -> Vec<(usize, usize)> {
    let ix = |c, r| Vertex::new(c, r).index();
    let mut edges = Vec::new();
    if family.has_z {
        edges.push((ix(0, 0), ix(0, 1)));
    }
    for i in 1..=n {
        if family.has_x {
            edges.push((ix(i - 1, 0), ix(i, 0)));
        }
        if family.has_y {
            edges.push((ix(i - 1, 1), ix(i, 1)));
        }
        if family.has_v {
            edges.push((ix(i - 1, 0), ix(i, 1)));
        }
        if family.has_w {
            edges.push((ix(i - 1, 1), ix(i, 0)));
        }
        if family.has_z {
            edges.push((ix(i, 0), ix(i, 1)));
        }
    }
    edges
}

/// A vertex `(column, row)` of the ladder, `row` in `{0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub column: usize,
    pub row: usize,
}

impl Vertex {
    pub const fn new(column: usize, row: usize) -> Self {
        Self { column, row }
    }

    fn index(self) -> usize {
        2 * self.column + self.row
    }
}

/// Weights of the edges entering one column. Absent families are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LayerWeights {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

impl LayerWeights {
    /// Draws the present weights in the fixed order `v, w, x, y, z`.
    pub fn sample<R: Rng + ?Sized>(family: GraphFamily, rng: &mut R) -> Self {
        let mut draw = |present: bool| present.then(|| exp1(rng));
        let v = draw(family.has_v);
        let w = draw(family.has_w);
        let x = draw(family.has_x);
        let y = draw(family.has_y);
        let z = draw(family.has_z);
        Self { v, w, x, y, z }
    }

    /// The `X, Y, Z` triple; panics if any is absent.
    pub fn xyz(&self) -> (f64, f64, f64) {
        match (self.x, self.y, self.z) {
            (Some(x), Some(y), Some(z)) => (x, y, z),
            _ => panic!("layer is missing one of the X, Y, Z weights: {self:?}"),
        }
    }

    fn matches(&self, family: GraphFamily) -> bool {
        self.v.is_some() == family.has_v
            && self.w.is_some() == family.has_w
            && self.x.is_some() == family.has_x
            && self.y.is_some() == family.has_y
            && self.z.is_some() == family.has_z
    }

    fn all_positive(&self) -> bool {
        [self.v, self.w, self.x, self.y, self.z]
            .iter()
            .flatten()
            .all(|&value| value >= 0.0 && value.is_finite())
    }
}

/// Exp(1) sample by inversion: `-ln U` with `U` uniform on `(0, 1]`.
pub fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u = 1.0 - rng.random::<f64>();
    -u.ln()
}

/// Seeded generator for one independent stream. The same `(seed, stream)`
/// pair always yields the same sequence.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream used by [`sample_ladder`]; chains driven by the same seed replay
/// exactly the same weights.
pub const LADDER_STREAM: u64 = 0;

/// A finite ladder `G_n` with sampled weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedLadder {
    pub family: GraphFamily,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    pub layers: Vec<LayerWeights>,
}

impl WeightedLadder {
    pub fn new(family: GraphFamily, z0: Option<f64>, layers: Vec<LayerWeights>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::EmptyLadder);
        }
        if z0.is_some() != family.has_z {
            return Err(Error::InvalidParameter(format!(
                "z0 must be present exactly when the family has rungs ({family})"
            )));
        }
        if z0.is_some_and(|z| z < 0.0 || !z.is_finite()) {
            return Err(Error::InvalidParameter(
                "z0 must be finite and nonnegative".into(),
            ));
        }
        if let Some(i) = layers
            .iter()
            .position(|l| !l.matches(family) || !l.all_positive())
        {
            return Err(Error::InvalidParameter(format!(
                "layer {} does not match family {family} or has an invalid weight",
                i + 1
            )));
        }
        Ok(Self {
            family,
            n: layers.len(),
            z0,
            layers,
        })
    }

    /// Weight of the rung at `column`, if the family has rungs.
    pub fn rung(&self, column: usize) -> Option<f64> {
        if column == 0 {
            self.z0
        } else {
            self.layers[column - 1].z
        }
    }

    /// The sub-ladder on columns `from..=to`, re-rooted so that column
    /// `from` becomes column 0.
    pub fn segment(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.n {
            return Err(Error::InvalidParameter(format!(
                "segment {from}..={to} is not a non-empty range within 0..={}",
                self.n
            )));
        }
        Ok(Self {
            family: self.family,
            n: to - from,
            z0: self.rung(from),
            layers: self.layers[from..to].to_vec(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(s)?;
        let ladder = Self::new(raw.family, raw.z0, raw.layers)?;
        if ladder.n != raw.n {
            return Err(Error::InvalidParameter(format!(
                "n = {} but {} layers given",
                raw.n, ladder.n
            )));
        }
        Ok(ladder)
    }

    fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, f64)> + '_ {
        let rung0 = self.z0.map(|z| (Vertex::new(0, 0), Vertex::new(0, 1), z));
        let layered = self.layers.iter().enumerate().flat_map(|(k, layer)| {
            let i = k + 1;
            [
                layer
                    .x
                    .map(|x| (Vertex::new(i - 1, 0), Vertex::new(i, 0), x)),
                layer
                    .y
                    .map(|y| (Vertex::new(i - 1, 1), Vertex::new(i, 1), y)),
                layer
                    .v
                    .map(|v| (Vertex::new(i - 1, 0), Vertex::new(i, 1), v)),
                layer
                    .w
                    .map(|w| (Vertex::new(i - 1, 1), Vertex::new(i, 0), w)),
                layer.z.map(|z| (Vertex::new(i, 0), Vertex::new(i, 1), z)),
            ]
            .into_iter()
            .flatten()
        });
        rung0.into_iter().chain(layered)
    }
}

pub fn sample_ladder(family: GraphFamily, n: usize, seed: u64) -> Result<WeightedLadder> {
    sample_ladder_with(family, n, &mut stream_rng(seed, LADDER_STREAM))
}

/// Samples `z0` first, then layers `1..=n` in order.
pub fn sample_ladder_with<R: Rng + ?Sized>(
    family: GraphFamily,
    n: usize,
    rng: &mut R,
) -> Result<WeightedLadder> {
    if n == 0 {
        return Err(Error::EmptyLadder);
    }
    let z0 = family.has_z.then(|| exp1(rng));
    let layers = (0..n).map(|_| LayerWeights::sample(family, rng)).collect();
    Ok(WeightedLadder {
        family,
        n,
        z0,
        layers,
    })
}

/// First-passage times from `(0,0)` to every vertex of the ladder, indexed
/// by `2 * column + row`. Unreachable vertices are `None`.
pub fn first_passage_times(ladder: &WeightedLadder) -> Vec<Option<f64>> {
    let count = 2 * (ladder.n + 1);
    let mut graph = UnGraph::<(), f64>::with_capacity(count, 5 * ladder.n + 1);
    for _ in 0..count {
        graph.add_node(());
    }
    for (a, b, weight) in ladder.edges() {
        graph.add_edge(NodeIndex::new(a.index()), NodeIndex::new(b.index()), weight);
    }
    let dist = dijkstra(&graph, NodeIndex::new(0), None, |e| *e.weight());
    (0..count)
        .map(|i| dist.get(&NodeIndex::new(i)).copied())
        .collect()
}

/// Exact first-passage time `d((0,0), target)` on the sampled ladder, or
/// `None` when the target is unreachable.
pub fn dijkstra_oracle(ladder: &WeightedLadder, target: Vertex) -> Option<f64> {
    assert!(
        target.column <= ladder.n && target.row <= 1,
        "target {target:?} outside ladder with n = {}",
        ladder.n
    );
    first_passage_times(ladder)[target.index()]
}

/// Oracle first-passage times to `(n,0)` and `(n,1)`, with `+inf` for
/// unreachable vertices.
pub fn frontier_oracle(ladder: &WeightedLadder) -> (f64, f64) {
    let times = first_passage_times(ladder);
    let at = |row| times[Vertex::new(ladder.n, row).index()].unwrap_or(f64::INFINITY);
    (at(0), at(1))
}
