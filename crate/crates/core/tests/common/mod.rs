//! Brute-force reference implementations and random instance generators
//! shared by the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tdanorm::{DistanceMatrix, PersistenceDiagram, PersistencePair, PointCloud, Validation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, dim: usize, spread: f64) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-spread..spread)).collect())
            .collect(),
    )
    .unwrap()
}

pub fn random_space(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> DistanceMatrix {
    tdanorm::distance_matrix(&random_cloud(rng, n, dim, 1.0))
}

/// Distances drawn from `{2, 3, 4}`: always a metric, and full of ties.
pub fn tied_space(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v = rng.random_range(2..=4) as f64;
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    DistanceMatrix::from_rows(&rows, Validation::Strict).unwrap()
}

/// A random diagram with `finite` off-diagonal points per dimension, values
/// on a coarse grid so that ties occur.
pub fn random_pairs(rng: &mut ChaCha8Rng, finite: usize, essential: usize) -> Vec<PersistencePair> {
    let mut v: Vec<PersistencePair> = (0..finite)
        .map(|_| {
            let b = rng.random_range(0..20) as f64 * 0.25;
            let d = b + rng.random_range(1..20) as f64 * 0.25;
            PersistencePair::new(b, d)
        })
        .collect();
    v.extend((0..essential).map(|_| PersistencePair::new(rng.random_range(0..8) as f64 * 0.5, f64::INFINITY)));
    v
}

fn linf(a: &PersistencePair, b: &PersistencePair) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

fn to_diagonal(p: &PersistencePair) -> f64 {
    (p.death - p.birth) / 2.0
}

/// Bottleneck distance by enumerating every partial injection from the
/// finite points of `a` into those of `b`; unmatched points go to the
/// diagonal. Essential points are matched by enumerating permutations.
pub fn brute_bottleneck(a: &[PersistencePair], b: &[PersistencePair]) -> f64 {
    let (fa, ea): (Vec<_>, Vec<_>) = a.iter().copied().partition(|p| p.death.is_finite());
    let (fb, eb): (Vec<_>, Vec<_>) = b.iter().copied().partition(|p| p.death.is_finite());
    if ea.len() != eb.len() {
        return f64::INFINITY;
    }
    let essential = best_permutation(&ea, &eb);
    let mut used = vec![false; fb.len()];
    let finite = partial_injections(&fa, &fb, 0, &mut used);
    essential.max(finite)
}

fn best_permutation(a: &[PersistencePair], b: &[PersistencePair]) -> f64 {
    fn go(a: &[PersistencePair], b: &[PersistencePair], i: usize, used: &mut Vec<bool>) -> f64 {
        if i == a.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = (a[i].birth - b[j].birth).abs().max(go(a, b, i + 1, used));
                used[j] = false;
                best = best.min(c);
            }
        }
        best
    }
    go(a, b, 0, &mut vec![false; b.len()])
}

fn partial_injections(a: &[PersistencePair], b: &[PersistencePair], i: usize, used: &mut Vec<bool>) -> f64 {
    if i == a.len() {
        return b
            .iter()
            .zip(used.iter())
            .filter(|(_, &u)| !u)
            .map(|(p, _)| to_diagonal(p))
            .fold(0.0, f64::max);
    }
    let mut best = to_diagonal(&a[i]).max(partial_injections(a, b, i + 1, used));
    for j in 0..b.len() {
        if !used[j] {
            used[j] = true;
            let c = linf(&a[i], &b[j]).max(partial_injections(a, b, i + 1, used));
            used[j] = false;
            best = best.min(c);
        }
    }
    best
}

/// Rank over GF(2) of a set of bit vectors.
fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len() * 64);
    for bit in 0..width {
        let (w, m) = (bit / 64, 1u64 << (bit % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & m != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && rows[r][w] & m != 0 {
                for (x, y) in rows[r].iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

struct Rips {
    /// Per dimension, `(vertices, value)`.
    simplices: Vec<Vec<(Vec<usize>, f64)>>,
}

impl Rips {
    fn new(d: &DistanceMatrix, max_dim: usize) -> Self {
        let n = d.len();
        let mut simplices = vec![Vec::new(); max_dim + 1];
        for mask in 1u32..(1 << n) {
            let v: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if v.len() > max_dim + 1 {
                continue;
            }
            let mut value = 0.0f64;
            for (x, &i) in v.iter().enumerate() {
                for &j in &v[..x] {
                    value = value.max(d.get(i, j));
                }
            }
            simplices[v.len() - 1].push((v, value));
        }
        Rips { simplices }
    }

    /// Boundary columns of dimension-`k` simplices with value ≤ `t`, as bit
    /// vectors over the dimension-`k-1` simplices. Rows of value ≤ `hide_upto`
    /// are zeroed out.
    fn boundary(&self, k: usize, t: f64, hide_upto: Option<f64>) -> Vec<Vec<u64>> {
        let faces = &self.simplices[k - 1];
        let words = faces.len().div_ceil(64).max(1);
        self.simplices[k]
            .iter()
            .filter(|s| s.1 <= t)
            .map(|(v, _)| {
                let mut col = vec![0u64; words];
                for skip in 0..v.len() {
                    let face: Vec<usize> = v.iter().enumerate().filter(|e| e.0 != skip).map(|e| *e.1).collect();
                    let idx = faces.iter().position(|f| f.0 == face).unwrap();
                    if hide_upto.is_none_or(|h| faces[idx].1 > h) {
                        col[idx / 64] ^= 1 << (idx % 64);
                    }
                }
                col
            })
            .collect()
    }

    fn count(&self, k: usize, t: f64) -> usize {
        self.simplices[k].iter().filter(|s| s.1 <= t).count()
    }

    /// Rank of the map `H_k(K_a) → H_k(K_b)`, for `a ≤ b`.
    fn persistent_betti(&self, k: usize, a: f64, b: f64) -> usize {
        let cycles = self.count(k, a) - if k == 0 { 0 } else { gf2_rank(self.boundary(k, a, None)) };
        let bd = self.boundary(k + 1, b, None);
        let outside = self.boundary(k + 1, b, Some(a));
        // boundaries of K_b that lie in K_a
        let trapped = gf2_rank(bd) - gf2_rank(outside);
        cycles - trapped
    }
}

/// Persistence diagram from persistent Betti numbers over all pairs of
/// critical values. Independent of any matrix reduction.
pub fn betti_diagram(d: &DistanceMatrix, max_dim: usize) -> Vec<Vec<(f64, f64)>> {
    let rips = Rips::new(d, max_dim);
    let mut values: Vec<f64> = rips.simplices.iter().flatten().map(|s| s.1).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let before = |i: usize| if i == 0 { None } else { Some(values[i - 1]) };
    let beta = |k: usize, a: Option<f64>, b: f64| a.map_or(0, |a| rips.persistent_betti(k, a, b));
    let top = *values.last().unwrap();
    let mut out = Vec::new();
    for k in 0..max_dim {
        let mut pairs = Vec::new();
        for i in 0..values.len() {
            let a = values[i];
            for j in i + 1..values.len() {
                let b = values[j];
                let prev_b = values[j - 1];
                let mult = beta(k, Some(a), prev_b) as i64 - beta(k, before(i), prev_b) as i64
                    - beta(k, Some(a), b) as i64
                    + beta(k, before(i), b) as i64;
                for _ in 0..mult {
                    pairs.push((a, b));
                }
            }
            let essential = beta(k, Some(a), top) as i64 - beta(k, before(i), top) as i64;
            for _ in 0..essential {
                pairs.push((a, f64::INFINITY));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        out.push(pairs);
    }
    out
}

pub fn sorted_pairs(dgm: &PersistenceDiagram) -> Vec<Vec<(f64, f64)>> {
    (0..dgm.num_dims())
        .map(|k| {
            let mut v: Vec<(f64, f64)> = dgm.dim(k).iter().map(|p| (p.birth, p.death)).collect();
            v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
            v
        })
        .collect()
}

/// `max |d_Y − s·d_X|` straight from the definition.
pub fn h_direct(dx: &DistanceMatrix, dy: &DistanceMatrix, s: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dx.len() {
        for j in 0..i {
            worst = worst.max((dy.get(i, j) - s * dx.get(i, j)).abs());
        }
    }
    worst
}

/// Minimum of `h` over `s ≥ 0` by enumerating every pairwise intersection
/// of the lines `±(y − s·x)`, where a piecewise-linear convex function must
/// attain its minimum.
pub fn enumerate_decomposition(dx: &DistanceMatrix, dy: &DistanceMatrix) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = (0..dx.len())
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (dx.get(i, j), dy.get(i, j)))
        .collect();
    let mut candidates = vec![0.0];
    for (p, &(xp, yp)) in pts.iter().enumerate() {
        for &(xq, yq) in &pts[..p] {
            if xp + xq > 0.0 {
                candidates.push((yp + yq) / (xp + xq));
            }
            if xp != xq {
                let s = (yp - yq) / (xp - xq);
                if s >= 0.0 {
                    candidates.push(s);
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(|s| (s, h_direct(dx, dy, s)))
        .fold((0.0, f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
}

/// `β_k` of the closed sublevel complex at threshold `r`.
pub fn betti_at(d: &DistanceMatrix, max_dim: usize, k: usize, r: f64) -> usize {
    Rips::new(d, max_dim).persistent_betti(k, r, r)
}
