//! Brute-force cross-checks that bypass the simple-cycle shortcut.
//!
//! [`oracle_piece_set`] hulls the means of every closed walk up to a length
//! bound. [`sample_chain_averages`] draws convex combinations of periodic
//! word means along a chain, the limits realized by shadowed word sequences.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::geom::{extreme_points, HomologyVector, RationalPolytope};
use crate::heteroclinic::Chain;
use crate::markov::{BasicPieceModel, IndexedGraph, PeriodicWord};
use crate::rational::Rational;

/// Default bound on `(start, node, sum)` states visited by the oracle DP.
pub const DEFAULT_STATE_CAP: usize = 20_000_000;

/// Largest denominator of a sampled weight vector.
pub const MAX_WEIGHT_DENOMINATOR: u64 = 64;

pub fn oracle_piece_set(piece: &BasicPieceModel, max_len: usize) -> Result<RationalPolytope> {
    oracle_piece_set_with_cap(piece, max_len, DEFAULT_STATE_CAP)
}

/// Hull of the means of all closed walks (repetition allowed) of length
/// `1..=max_len`, from a breadth-first walk over distinct partial sums.
pub fn oracle_piece_set_with_cap(
    piece: &BasicPieceModel,
    max_len: usize,
    state_cap: usize,
) -> Result<RationalPolytope> {
    let g = IndexedGraph::build(piece)?;
    let n = g.len();
    if max_len < n {
        return Err(Error::InvalidArgument(format!(
            "max_len {max_len} is below the node count {n}"
        )));
    }
    let disp: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            g.displacement(i)
                .coords()
                .iter()
                .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
                .collect::<Option<Vec<i64>>>()
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("displacements of piece `{}` are not small integers", piece.id))
                })
        })
        .collect::<Result<_>>()?;
    let dim = disp[0].len();

    let mut closed: HashSet<(usize, Vec<i64>)> = HashSet::new();
    let mut visited = 0usize;
    for start in 0..n {
        // Walks of length l from `start`, keyed by (current node, sum of
        // displacements of the nodes left so far).
        let mut level: HashSet<(usize, Vec<i64>)> = HashSet::from([(start, vec![0; dim])]);
        for len in 1..=max_len {
            let mut next = HashSet::with_capacity(level.len() * 2);
            for (node, sum) in &level {
                let s: Vec<i64> = sum.iter().zip(&disp[*node]).map(|(a, b)| a + b).collect();
                for &w in &g.succ[*node] {
                    if w == start {
                        closed.insert((len, s.clone()));
                    }
                    next.insert((w, s.clone()));
                }
            }
            visited += next.len();
            if visited > state_cap {
                return Err(Error::ResourceCap {
                    what: format!("oracle walk states in piece `{}`", piece.id),
                    cap: state_cap,
                });
            }
            level = next;
        }
    }
    let means = closed.into_iter().map(|(len, sum)| {
        let l = Rational::from_integer(len.into());
        HomologyVector::new(sum.into_iter().map(|x| Rational::from_integer(x.into()) / &l).collect())
    });
    extreme_points(means)
}

/// 64-bit linear congruential generator,
/// `x ← 6364136223846793005·x + 1442695040888963407 (mod 2^64)`.
#[derive(Clone, Debug)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent-looking stream for sample `index` of a run seeded by
    /// `seed`; the state is `seed + (index + 1)·0x9E3779B97F4A7C15`, advanced
    /// twice.
    pub fn for_sample(seed: u64, index: u64) -> Self {
        let mut r = Self::new(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        r.next_u64();
        r.next_u64();
        r
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform-ish integer in `0..n` from the high 32 bits.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0 && n <= u32::MAX as u64);
        ((self.next_u64() >> 32) * n) >> 32
    }
}

/// `Σ t_s v_s`.
pub fn combine(weights: &[Rational], vectors: &[HomologyVector]) -> Result<HomologyVector> {
    let first = vectors.first().ok_or(Error::EmptyPointSet)?;
    if weights.len() != vectors.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} vectors",
            weights.len(),
            vectors.len()
        )));
    }
    let mut acc = HomologyVector::zeros(first.dim());
    for (t, v) in weights.iter().zip(vectors) {
        v.check_dim(first.dim())?;
        acc = acc.add(&v.scale(t));
    }
    Ok(acc)
}

/// A random closed walk: a random walk of length `1..=2n` from a random
/// node, closed along a shortest path back to its start.
fn random_word(g: &IndexedGraph<'_>, rng: &mut Lcg64) -> Vec<usize> {
    let n = g.len();
    let start = rng.below(n as u64) as usize;
    let steps = 1 + rng.below(2 * n as u64) as usize;
    let mut word = vec![start];
    let mut cur = start;
    for _ in 1..steps {
        let succ = &g.succ[cur];
        cur = succ[rng.below(succ.len() as u64) as usize];
        word.push(cur);
    }
    let succ = &g.succ[cur];
    if succ.contains(&start) {
        return word;
    }
    // Breadth-first search back to `start`.
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([cur]);
    prev.insert(cur, cur);
    'search: while let Some(u) = queue.pop_front() {
        for &w in &g.succ[u] {
            if w == start {
                let mut back = Vec::new();
                let mut x = u;
                while x != cur {
                    back.push(x);
                    x = prev[&x];
                }
                word.extend(back.into_iter().rev());
                break 'search;
            }
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(w) {
                e.insert(u);
                queue.push_back(w);
            }
        }
    }
    word
}

/// One sampled chain average with the data that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSample {
    pub weights: Vec<Rational>,
    pub words: Vec<PeriodicWord>,
    pub average: HomologyVector,
}

pub fn sample_chain_averages(
    chain: &Chain,
    pieces: &[BasicPieceModel],
    samples: usize,
    seed: u64,
) -> Result<Vec<HomologyVector>> {
    Ok(
        sample_chain_with(chain, pieces, samples, seed, Parallelism::Sequential)?
            .into_iter()
            .map(|s| s.average)
            .collect(),
    )
}

/// Sample `i` draws a denominator `D ∈ 1..=64`, spreads `D` units over the
/// chain's pieces, and draws one periodic word per weighted piece, all from
/// `Lcg64::for_sample(seed, i)`. Output is independent of `par`.
pub fn sample_chain_with(
    chain: &Chain,
    pieces: &[BasicPieceModel],
    samples: usize,
    seed: u64,
    par: Parallelism,
) -> Result<Vec<ChainSample>> {
    if chain.is_empty() {
        return Err(Error::InvalidChain("empty chain".into()));
    }
    let members = chain
        .pieces()
        .iter()
        .map(|id| {
            pieces
                .iter()
                .find(|p| &p.id == id)
                .ok_or_else(|| Error::UnknownPiece(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let graphs = members
        .iter()
        .map(|p| IndexedGraph::build(p))
        .collect::<Result<Vec<_>>>()?;
    let m = graphs.len() as u64;
    Ok(exec::map_range(par, samples, |i| {
        let mut rng = Lcg64::for_sample(seed, i as u64);
        let den = 1 + rng.below(MAX_WEIGHT_DENOMINATOR);
        let mut units = vec![0u64; graphs.len()];
        for _ in 0..den {
            units[rng.below(m) as usize] += 1;
        }
        let mut weights = Vec::new();
        let mut words = Vec::new();
        let mut means = Vec::new();
        for (s, g) in graphs.iter().enumerate() {
            if units[s] == 0 {
                continue;
            }
            let w = random_word(g, &mut rng);
            means.push(g.cycle_mean(&w));
            words.push(PeriodicWord::new(
                w.iter().map(|&k| members[s].graph.nodes[k].id.clone()),
            ));
            weights.push(Rational::new(units[s].into(), den.into()));
        }
        let average = combine(&weights, &means).expect("nonempty, same dimension");
        ChainSample {
            weights,
            words,
            average,
        }
    }))
}
