//! Vietoris-Rips filtration under the diameter convention.
//!
//! A simplex enters at the largest pairwise distance among its vertices, and
//! the filtration is closed: `σ ∈ VR(X, r)` iff `diam(σ) ≤ r`. For a finite
//! filtration this yields the same diagrams as the strict `< r` convention.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Default cap on the number of simplices a complex may hold.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

/// Largest supported simplex dimension.
pub const MAX_SUPPORTED_DIM: usize = 3;

/// A simplex with at most four vertices, stored sorted ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    vertices: [u32; 4],
    dim: u8,
    value: f64,
}

impl Simplex {
    #[inline]
    pub fn vertices(&self) -> &[u32] {
        &self.vertices[..=self.dim as usize]
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Filtration value (the simplex diameter).
    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    fn order(&self, other: &Simplex) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.dim.cmp(&other.dim))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// All simplices of dimension `≤ max_dim`, sorted by `(value, dim, vertices)`.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
    max_dim: usize,
    n_vertices: usize,
    // position of each simplex, indexed per dimension by its combinatorial index
    positions: Vec<Vec<u32>>,
    binomials: Binomials,
}

impl FilteredComplex {
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Maximal simplex dimension; homology is computed up to `max_dim - 1`.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Sorted filtration values of every simplex.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.simplices.iter().map(|s| s.value)
    }

    /// Position of the simplex with the given sorted vertex list, if present.
    pub fn position_of(&self, vertices: &[u32]) -> Option<usize> {
        let k = vertices.len().checked_sub(1)?;
        if k > self.max_dim {
            return None;
        }
        let idx = self.binomials.index(vertices)?;
        self.positions[k].get(idx as usize).map(|&p| p as usize)
    }

    /// Positions of the codimension-one faces of the simplex at `pos`, sorted ascending.
    pub fn boundary(&self, pos: usize) -> Vec<u32> {
        let s = &self.simplices[pos];
        let k = s.dim();
        if k == 0 {
            return Vec::new();
        }
        let verts = s.vertices();
        let mut face = [0u32; 4];
        let mut out = Vec::with_capacity(k + 1);
        for skip in 0..=k {
            let mut w = 0;
            for (i, &v) in verts.iter().enumerate() {
                if i != skip {
                    face[w] = v;
                    w += 1;
                }
            }
            let idx = self.binomials.index(&face[..k]).expect("face index in range");
            out.push(self.positions[k - 1][idx as usize]);
        }
        out.sort_unstable();
        out
    }
}

/// Binomial coefficients `C(v, k)` for `v ≤ n`, `k ≤ 4`, for the combinatorial
/// number system: a sorted tuple `v0 < v1 < … < vk` maps to `Σ C(vi, i+1)`.
#[derive(Debug, Clone)]
struct Binomials {
    table: Vec<[u64; 5]>,
}

impl Binomials {
    fn new(n: usize) -> Self {
        let mut table = vec![[0u64; 5]; n + 1];
        for (v, row) in table.iter_mut().enumerate() {
            row[0] = 1;
            for k in 1..5 {
                // C(v, k) = C(v, k-1) * (v - k + 1) / k
                row[k] = if v + 1 > k {
                    row[k - 1] * (v as u64 + 1 - k as u64) / k as u64
                } else {
                    0
                };
            }
        }
        Binomials { table }
    }

    fn get(&self, v: usize, k: usize) -> u64 {
        self.table[v][k]
    }

    fn index(&self, sorted: &[u32]) -> Option<u64> {
        let mut idx = 0u64;
        for (i, &v) in sorted.iter().enumerate() {
            idx += self.table.get(v as usize)?[i + 1];
        }
        Some(idx)
    }
}

/// Exact number of simplices of dimension `≤ max_dim` on `n` vertices.
pub fn simplex_count(n: usize, max_dim: usize) -> u128 {
    let mut total = 0u128;
    let mut c = 1u128; // C(n, 0)
    for k in 1..=(max_dim + 1) {
        if k > n {
            break;
        }
        c = c * (n as u128 + 1 - k as u128) / k as u128;
        total += c;
    }
    total
}

/// Builds the full Vietoris-Rips complex up to `max_dim` with the default budget.
pub fn build_vr(d: &DistanceMatrix, max_dim: usize) -> Result<FilteredComplex> {
    build_vr_with_budget(d, max_dim, DEFAULT_SIMPLEX_BUDGET)
}

pub fn build_vr_with_budget(
    d: &DistanceMatrix,
    max_dim: usize,
    budget: usize,
) -> Result<FilteredComplex> {
    if !(1..=MAX_SUPPORTED_DIM).contains(&max_dim) {
        return Err(Error::InvalidParameter(format!(
            "max_dim must be in 1..={MAX_SUPPORTED_DIM}, got {max_dim}"
        )));
    }
    let n = d.len();
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter("too many vertices".into()));
    }
    let count = simplex_count(n, max_dim);
    if count > budget as u128 {
        return Err(Error::TooLarge { count, budget });
    }

    let binomials = Binomials::new(n);
    let mut simplices = Vec::with_capacity(count as usize);
    for v in 0..n as u32 {
        simplices.push(Simplex {
            vertices: [v, 0, 0, 0],
            dim: 0,
            value: 0.0,
        });
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let ab = d.get(a, b);
            simplices.push(Simplex {
                vertices: [a as u32, b as u32, 0, 0],
                dim: 1,
                value: ab,
            });
            if max_dim < 2 {
                continue;
            }
            for c in (b + 1)..n {
                let abc = ab.max(d.get(a, c)).max(d.get(b, c));
                simplices.push(Simplex {
                    vertices: [a as u32, b as u32, c as u32, 0],
                    dim: 2,
                    value: abc,
                });
                if max_dim < 3 {
                    continue;
                }
                for e in (c + 1)..n {
                    let abce = abc
                        .max(d.get(a, e))
                        .max(d.get(b, e))
                        .max(d.get(c, e));
                    simplices.push(Simplex {
                        vertices: [a as u32, b as u32, c as u32, e as u32],
                        dim: 3,
                        value: abce,
                    });
                }
            }
        }
    }
    simplices.sort_unstable_by(Simplex::order);

    let mut positions: Vec<Vec<u32>> = (0..=max_dim)
        .map(|k| vec![u32::MAX; binomials.get(n, k + 1) as usize])
        .collect();
    for (pos, s) in simplices.iter().enumerate() {
        let idx = binomials.index(s.vertices()).expect("vertex in range");
        positions[s.dim()][idx as usize] = pos as u32;
    }

    Ok(FilteredComplex {
        simplices,
        max_dim,
        n_vertices: n,
        positions,
        binomials,
    })
}
