//! Bottleneck distance between persistence diagrams, and the normalized
//! bottleneck distance `d_N(X, Y) = d_B(X / diam X, Y / diam Y)`.
//!
//! The finite part is solved exactly: the optimal value is one of the
//! candidate costs (cross-diagram ∞-distances and half-persistences), so we
//! binary-search the sorted candidates with a perfect-matching feasibility
//! test. Each diagram is augmented with one diagonal pseudo-vertex per point
//! of the opposite diagram, which keeps the graph bipartite and finite.
//!
//! Essential classes (infinite death) are matched only among themselves at
//! cost `|birth_a - birth_b|`; when the counts differ the distance is `+∞`.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::Result;
use crate::metric::{diam, normalize, DistanceMatrix};
use crate::persistence::{diagram, normalize_diagram, PersistenceDiagram, PersistencePair};

/// One matched pair; `None` on either side stands for the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchedPair {
    pub a: Option<usize>,
    pub b: Option<usize>,
}

/// A bijection between two diagrams (diagonal-to-diagonal pairs omitted).
/// Indices refer to the pair lists of the compared dimension.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Matching {
    pub pairs: Vec<MatchedPair>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bottleneck {
    pub value: f64,
    pub witness: Matching,
}

/// Per-dimension values plus the maximum over dimensions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottleneckSummary {
    pub per_dim: BTreeMap<usize, f64>,
    pub max: f64,
    pub argmax_dim: Option<usize>,
}

impl BottleneckSummary {
    fn from_values(per_dim: BTreeMap<usize, f64>) -> Self {
        let mut max = 0.0f64;
        let mut argmax_dim = None;
        for (&k, &v) in &per_dim {
            if argmax_dim.is_none() || v > max {
                max = v;
                argmax_dim = Some(k);
            }
        }
        BottleneckSummary {
            per_dim,
            max,
            argmax_dim,
        }
    }

    pub fn get(&self, dim: usize) -> Option<f64> {
        self.per_dim.get(&dim).copied()
    }
}

/// ∞-norm distance between two finite diagram points.
#[inline]
pub fn linf(a: &PersistencePair, b: &PersistencePair) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// Cost of matching a point to the diagonal.
#[inline]
pub fn diagonal_cost(p: &PersistencePair) -> f64 {
    (p.death - p.birth) / 2.0
}

/// Bottleneck distance between the dimension-`dim` parts of two diagrams.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> Bottleneck {
    bottleneck_pairs(a.dim(dim), b.dim(dim))
}

/// Bottleneck distance between two multisets of pairs.
pub fn bottleneck_pairs(a: &[PersistencePair], b: &[PersistencePair]) -> Bottleneck {
    let (a_fin, a_ess) = split_essential(a);
    let (b_fin, b_ess) = split_essential(b);
    if a_ess.len() != b_ess.len() {
        return Bottleneck {
            value: f64::INFINITY,
            witness: Matching::default(),
        };
    }

    let mut pairs = Vec::with_capacity(a.len() + b.len());
    let mut value = 0.0f64;

    // Sorted order is optimal for the max-cost matching of points on a line.
    let mut ae = a_ess;
    let mut be = b_ess;
    ae.sort_by(|&i, &j| a[i].birth.total_cmp(&a[j].birth).then(i.cmp(&j)));
    be.sort_by(|&i, &j| b[i].birth.total_cmp(&b[j].birth).then(i.cmp(&j)));
    for (&i, &j) in ae.iter().zip(&be) {
        value = value.max((a[i].birth - b[j].birth).abs());
        pairs.push(MatchedPair {
            a: Some(i),
            b: Some(j),
        });
    }

    let pa: Vec<PersistencePair> = a_fin.iter().map(|&i| a[i]).collect();
    let pb: Vec<PersistencePair> = b_fin.iter().map(|&j| b[j]).collect();
    let (fin_value, fin_pairs) = finite_bottleneck(&pa, &pb);
    value = value.max(fin_value);
    for mp in fin_pairs {
        pairs.push(MatchedPair {
            a: mp.a.map(|i| a_fin[i]),
            b: mp.b.map(|j| b_fin[j]),
        });
    }
    Bottleneck {
        value,
        witness: Matching { pairs, cost: value },
    }
}

/// Cost of a matching as recomputed from the two point lists.
pub fn matching_cost(a: &[PersistencePair], b: &[PersistencePair], m: &Matching) -> f64 {
    m.pairs.iter().fold(0.0f64, |acc, mp| {
        let c = match (mp.a, mp.b) {
            (Some(i), Some(j)) if a[i].is_essential() && b[j].is_essential() => {
                (a[i].birth - b[j].birth).abs()
            }
            (Some(i), Some(j)) => linf(&a[i], &b[j]),
            (Some(i), None) => diagonal_cost(&a[i]),
            (None, Some(j)) => diagonal_cost(&b[j]),
            (None, None) => 0.0,
        };
        acc.max(c)
    })
}

/// Bottleneck distance in every dimension present in both diagrams.
pub fn bottleneck_all(a: &PersistenceDiagram, b: &PersistenceDiagram) -> BottleneckSummary {
    let shared = a.num_dims().min(b.num_dims());
    let per_dim = (0..shared)
        .map(|k| (k, bottleneck(a, b, k).value))
        .collect();
    BottleneckSummary::from_values(per_dim)
}

/// `d_B` between the Vietoris-Rips diagrams of two spaces.
pub fn space_bottleneck(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    max_dim: usize,
) -> Result<BottleneckSummary> {
    Ok(bottleneck_all(&diagram(dx, max_dim)?, &diagram(dy, max_dim)?))
}

/// `d_N`: `d_B` between the diagrams of the diameter-normalized spaces.
pub fn normalized_bottleneck(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    max_dim: usize,
) -> Result<BottleneckSummary> {
    space_bottleneck(&normalize(dx)?, &normalize(dy)?, max_dim)
}

/// `(d_B, d_N)` from one persistence computation per space; `d_N` comes
/// from the rescaled diagrams rather than fresh ones.
pub fn space_distances(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    max_dim: usize,
) -> Result<(BottleneckSummary, BottleneckSummary)> {
    let (ax, ay) = (diam(dx)?, diam(dy)?);
    let (gx, gy) = (diagram(dx, max_dim)?, diagram(dy, max_dim)?);
    let db = bottleneck_all(&gx, &gy);
    let dn = bottleneck_all(&normalize_diagram(&gx, ax)?, &normalize_diagram(&gy, ay)?);
    Ok((db, dn))
}

fn split_essential(p: &[PersistencePair]) -> (Vec<usize>, Vec<usize>) {
    (0..p.len()).partition(|&i| !p[i].is_essential())
}

fn finite_bottleneck(a: &[PersistencePair], b: &[PersistencePair]) -> (f64, Vec<MatchedPair>) {
    if a.is_empty() && b.is_empty() {
        return (0.0, Vec::new());
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len());
    for pa in a {
        candidates.push(diagonal_cost(pa));
        for pb in b {
            candidates.push(linf(pa, pb));
        }
    }
    candidates.extend(b.iter().map(diagonal_cost));
    candidates.sort_unstable_by(f64::total_cmp);
    candidates.dedup();

    let graph = AugmentedGraph { a, b };
    // All-to-diagonal is feasible at the largest candidate.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if graph.perfect_matching(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let t = candidates[lo];
    let mate = graph
        .perfect_matching(t)
        .expect("threshold found by search is feasible");
    (t, graph.witness(&mate))
}

/// Left side: points of `a`, then one diagonal copy per point of `b`.
/// Right side: points of `b`, then one diagonal copy per point of `a`.
struct AugmentedGraph<'a> {
    a: &'a [PersistencePair],
    b: &'a [PersistencePair],
}

impl AugmentedGraph<'_> {
    fn adjacency(&self, t: f64) -> Vec<Vec<u32>> {
        let (p, q) = (self.a.len(), self.b.len());
        let mut adj = Vec::with_capacity(p + q);
        for (i, pa) in self.a.iter().enumerate() {
            let mut row: Vec<u32> = (0..q)
                .filter(|&j| linf(pa, &self.b[j]) <= t)
                .map(|j| j as u32)
                .collect();
            if diagonal_cost(pa) <= t {
                row.push((q + i) as u32);
            }
            adj.push(row);
        }
        for (j, pb) in self.b.iter().enumerate() {
            let mut row = Vec::with_capacity(p + 1);
            if diagonal_cost(pb) <= t {
                row.push(j as u32);
            }
            row.extend((q..q + p).map(|r| r as u32));
            adj.push(row);
        }
        adj
    }

    /// `mate[left] = right` for a perfect matching at threshold `t`, if one exists.
    fn perfect_matching(&self, t: f64) -> Option<Vec<u32>> {
        let adj = self.adjacency(t);
        let n = adj.len();
        let mate = hopcroft_karp(&adj, n);
        mate.iter().all(|&m| m != NIL).then_some(mate)
    }

    fn witness(&self, mate: &[u32]) -> Vec<MatchedPair> {
        let (p, q) = (self.a.len(), self.b.len());
        let mut out = Vec::new();
        for (left, &right) in mate.iter().enumerate() {
            let right = right as usize;
            if left < p {
                out.push(MatchedPair {
                    a: Some(left),
                    b: (right < q).then_some(right),
                });
            } else if right < q {
                out.push(MatchedPair {
                    a: None,
                    b: Some(right),
                });
            }
        }
        out
    }
}

const NIL: u32 = u32::MAX;

/// Maximum bipartite matching; returns `mate_left`.
fn hopcroft_karp(adj: &[Vec<u32>], n_right: usize) -> Vec<u32> {
    let n_left = adj.len();
    let mut mate_l = vec![NIL; n_left];
    let mut mate_r = vec![NIL; n_right];

    // greedy start
    for u in 0..n_left {
        if let Some(&v) = adj[u].iter().find(|&&v| mate_r[v as usize] == NIL) {
            mate_l[u] = v;
            mate_r[v as usize] = u as u32;
        }
    }

    let mut dist = vec![u32::MAX; n_left];
    let mut queue = VecDeque::new();
    let mut next_edge = vec![0usize; n_left];
    let mut stack: Vec<u32> = Vec::new();
    loop {
        // BFS layering from free left vertices
        queue.clear();
        for u in 0..n_left {
            if mate_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u as u32);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &adj[u as usize] {
                let w = mate_r[v as usize];
                if w == NIL {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }

        // iterative DFS along layered edges
        next_edge.iter_mut().for_each(|e| *e = 0);
        for root in 0..n_left {
            if mate_l[root] != NIL {
                continue;
            }
            stack.clear();
            stack.push(root as u32);
            while let Some(&u) = stack.last() {
                let ui = u as usize;
                if next_edge[ui] >= adj[ui].len() {
                    dist[ui] = u32::MAX;
                    stack.pop();
                    continue;
                }
                let v = adj[ui][next_edge[ui]];
                let w = mate_r[v as usize];
                if w == NIL {
                    // augment along the stack
                    for k in (0..stack.len()).rev() {
                        let x = stack[k] as usize;
                        let y = adj[x][next_edge[x]];
                        mate_l[x] = y;
                        mate_r[y as usize] = x as u32;
                    }
                    stack.clear();
                    break;
                }
                if dist[w as usize] == dist[ui] + 1 {
                    stack.push(w);
                } else {
                    next_edge[ui] += 1;
                }
            }
        }
    }
    mate_l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{distance_matrix, scale, PointCloud};
    use crate::persistence::scale_diagram;

    fn pp(b: f64, d: f64) -> PersistencePair {
        PersistencePair::new(b, d)
    }

    fn h(pairs: Vec<PersistencePair>) -> PersistenceDiagram {
        PersistenceDiagram::from_dims(vec![pairs]).unwrap()
    }

    #[test]
    fn identical_diagrams_are_at_zero() {
        let a = vec![pp(0.0, 2.0), pp(1.0, 3.0), pp(0.5, f64::INFINITY)];
        let r = bottleneck_pairs(&a, &a);
        assert_eq!(r.value, 0.0);
        assert_eq!(matching_cost(&a, &a, &r.witness), 0.0);
        for mp in &r.witness.pairs {
            assert_eq!(mp.a, mp.b);
        }
    }

    #[test]
    fn single_point_against_empty() {
        let r = bottleneck_pairs(&[pp(0.0, 2.0)], &[]);
        assert_eq!(r.value, 1.0);
        assert_eq!(
            r.witness.pairs,
            vec![MatchedPair {
                a: Some(0),
                b: None
            }]
        );
    }

    #[test]
    fn direct_match_beats_diagonal() {
        // direct cost 1 vs both-to-diagonal max(1, 1.5)
        let a = [pp(1.0, 3.0)];
        let b = [pp(1.0, 4.0)];
        let r = bottleneck_pairs(&a, &b);
        assert_eq!(r.value, 1.0);
        assert_eq!(matching_cost(&a, &b, &r.witness), 1.0);
    }

    #[test]
    fn square_against_scaled_square() {
        let s2 = 2f64.sqrt();
        // direct match costs 9√2; sending both points to the diagonal costs
        // max((√2 - 1) / 2, 10(√2 - 1) / 2), which is smaller
        let r = bottleneck_pairs(&[pp(1.0, s2)], &[pp(10.0, 10.0 * s2)]);
        assert!((r.value - 5.0 * (s2 - 1.0)).abs() < 1e-12);
        assert_eq!(r.witness.pairs.len(), 2);
    }

    #[test]
    fn essential_mismatch_is_infinite() {
        let r = bottleneck_pairs(&[pp(0.0, f64::INFINITY)], &[pp(0.0, 1.0)]);
        assert_eq!(r.value, f64::INFINITY);
        assert!(r.witness.pairs.is_empty());
        let r = bottleneck_pairs(&[pp(0.0, f64::INFINITY)], &[pp(0.5, f64::INFINITY)]);
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn essential_classes_matched_in_sorted_order() {
        let a = [pp(0.0, f64::INFINITY), pp(5.0, f64::INFINITY)];
        let b = [pp(5.5, f64::INFINITY), pp(0.25, f64::INFINITY)];
        assert_eq!(bottleneck_pairs(&a, &b).value, 0.5);
    }

    #[test]
    fn zero_persistence_points_are_free() {
        let r = bottleneck_pairs(&[pp(2.0, 2.0), pp(0.0, 1.0)], &[pp(0.0, 1.0)]);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn summaries() {
        let a = PersistenceDiagram::from_dims(vec![vec![pp(0.0, f64::INFINITY)], vec![pp(1.0, 2.0)]])
            .unwrap();
        let s = bottleneck_all(&a, &a);
        assert_eq!(s.per_dim.len(), 2);
        assert_eq!(s.max, 0.0);
        let h0 = h(vec![pp(0.0, f64::INFINITY), pp(0.0, 1.0)]);
        let s = bottleneck_all(&h0, &h0);
        assert_eq!(s.per_dim.len(), 1);
        let s = bottleneck_all(&a, &h0);
        assert_eq!(s.per_dim.len(), 1);
        assert_eq!(s.get(0), Some(0.5));
        assert_eq!(s.argmax_dim, Some(0));
    }

    #[test]
    fn scaling_commutes_with_bottleneck() {
        let a = h(vec![pp(0.0, 3.0), pp(1.0, 4.0), pp(2.0, 2.5)]);
        let b = h(vec![pp(0.5, 3.5), pp(1.0, 1.5)]);
        let base = bottleneck(&a, &b, 0).value;
        for s in [0.1, 2.0, 37.5] {
            let scaled = bottleneck(
                &scale_diagram(&a, s).unwrap(),
                &scale_diagram(&b, s).unwrap(),
                0,
            )
            .value;
            assert!((scaled - s * base).abs() <= 1e-12 * scaled.max(1.0));
        }
    }

    #[test]
    fn normalized_distance_ignores_scale() {
        let c = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![2.0, 0.1],
            vec![2.1, 1.9],
            vec![-0.2, 2.0],
            vec![1.0, 3.0],
        ])
        .unwrap();
        let d = distance_matrix(&c);
        let d7 = scale(&d, 7.0).unwrap();
        let dn = normalized_bottleneck(&d, &d7, 2).unwrap();
        for v in dn.per_dim.values() {
            assert!(*v <= 1e-12);
        }
        let db = space_bottleneck(&d, &d7, 2).unwrap();
        assert!(db.max > 0.0);
    }
}
