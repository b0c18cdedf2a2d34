//! Persistence diagrams by boundary-matrix reduction over ℤ/2.
//!
//! Columns are reduced from the top dimension down ("twist"/clearing): once a
//! column of dimension `d` takes pivot `i`, the column of simplex `i` is known
//! to reduce to zero and is skipped when dimension `d - 1` is processed.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;
use crate::vr::{build_vr, FilteredComplex};

/// A point of a persistence diagram. `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn new(birth: f64, death: f64) -> Self {
        PersistencePair { birth, death }
    }

    #[inline]
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    #[inline]
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    fn cmp_total(&self, other: &Self) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.death.total_cmp(&other.death))
    }
}

/// Per-dimension multisets of (birth, death) pairs, each sorted by `(birth, death)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    dims: Vec<Vec<PersistencePair>>,
}

impl PersistenceDiagram {
    /// Builds a diagram from per-dimension pair lists; index `k` holds `H_k`.
    pub fn from_dims(mut dims: Vec<Vec<PersistencePair>>) -> Result<Self> {
        for (k, pairs) in dims.iter_mut().enumerate() {
            for p in pairs.iter() {
                if p.birth.is_nan() || p.death.is_nan() || p.death < p.birth {
                    return Err(Error::InvalidParameter(format!(
                        "H{k} pair ({}, {}) is not a valid (birth, death) pair",
                        p.birth, p.death
                    )));
                }
                if p.birth == f64::INFINITY {
                    return Err(Error::InvalidParameter(format!(
                        "H{k} pair has infinite birth"
                    )));
                }
            }
            pairs.sort_by(PersistencePair::cmp_total);
        }
        Ok(PersistenceDiagram { dims })
    }

    /// Number of homology dimensions present (`H_0 … H_{n-1}`).
    pub fn num_dims(&self) -> usize {
        self.dims.len()
    }

    /// Pairs of dimension `k`; empty if the diagram does not cover `k`.
    pub fn dim(&self, k: usize) -> &[PersistencePair] {
        self.dims.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn dims(&self) -> &[Vec<PersistencePair>] {
        &self.dims
    }

    /// `(dim, pair)` rows sorted by `(dim, birth, death)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, PersistencePair)> + '_ {
        self.dims
            .iter()
            .enumerate()
            .flat_map(|(k, ps)| ps.iter().map(move |p| (k, *p)))
    }

    pub fn total_pairs(&self) -> usize {
        self.dims.iter().map(Vec::len).sum()
    }

    /// The pair of dimension `k` with the largest finite persistence.
    pub fn most_persistent(&self, k: usize) -> Option<PersistencePair> {
        self.dim(k)
            .iter()
            .filter(|p| !p.is_essential())
            .copied()
            .max_by(|a, b| a.persistence().total_cmp(&b.persistence()))
    }
}

/// Multiplies every birth and death by `s > 0`; infinite deaths stay infinite.
pub fn scale_diagram(dgm: &PersistenceDiagram, s: f64) -> Result<PersistenceDiagram> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::NonPositiveFactor(s));
    }
    let dims = dgm
        .dims
        .iter()
        .map(|ps| {
            ps.iter()
                .map(|p| PersistencePair::new(p.birth * s, p.death * s))
                .collect()
        })
        .collect();
    Ok(PersistenceDiagram { dims })
}

/// Divides every value by `diam`, matching the diagram of the normalized
/// space: a monotone relabelling of filtration values carries the pairing
/// along, and pairs whose ends round together vanish.
pub fn normalize_diagram(dgm: &PersistenceDiagram, diam: f64) -> Result<PersistenceDiagram> {
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(Error::NonPositiveFactor(diam));
    }
    let dims = dgm
        .dims
        .iter()
        .map(|ps| {
            ps.iter()
                .map(|p| PersistencePair::new(p.birth / diam, p.death / diam))
                .filter(|p| p.birth != p.death)
                .collect()
        })
        .collect();
    Ok(PersistenceDiagram { dims })
}

const NONE: u32 = u32::MAX;

/// Standard persistence pairing of a filtered complex; zero-length pairs are dropped.
///
/// Homology is reported in dimensions `0 ..= max_dim - 1`.
pub fn persistence(complex: &FilteredComplex) -> PersistenceDiagram {
    let simplices = complex.simplices();
    let total = simplices.len();
    let max_dim = complex.max_dim();

    // pivot_owner[row] = column whose reduced form has lowest entry `row`
    let mut pivot_owner = vec![NONE; total];
    let mut paired_birth = vec![false; total];
    let mut negative = vec![false; total];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); total];
    let mut scratch = Vec::new();

    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); max_dim + 1];
    for (pos, s) in simplices.iter().enumerate() {
        by_dim[s.dim()].push(pos as u32);
    }

    let mut dims: Vec<Vec<PersistencePair>> = vec![Vec::new(); max_dim];
    for d in (1..=max_dim).rev() {
        for &j in &by_dim[d] {
            let j = j as usize;
            if paired_birth[j] {
                continue;
            }
            let mut col = complex.boundary(j);
            while let Some(&low) = col.last() {
                let owner = pivot_owner[low as usize];
                if owner == NONE {
                    break;
                }
                symmetric_difference(&col, &reduced[owner as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                let low = low as usize;
                pivot_owner[low] = j as u32;
                paired_birth[low] = true;
                negative[j] = true;
                let birth = simplices[low].value();
                let death = simplices[j].value();
                if birth != death {
                    dims[d - 1].push(PersistencePair::new(birth, death));
                }
                col.shrink_to_fit();
                reduced[j] = col;
            }
        }
    }

    for (pos, s) in simplices.iter().enumerate() {
        let k = s.dim();
        if k < max_dim && !negative[pos] && !paired_birth[pos] {
            dims[k].push(PersistencePair::new(s.value(), f64::INFINITY));
        }
    }
    for pairs in &mut dims {
        pairs.sort_by(PersistencePair::cmp_total);
    }
    PersistenceDiagram { dims }
}

/// Diagram of the Vietoris-Rips filtration of `d` with simplices up to `max_dim`.
pub fn diagram(d: &DistanceMatrix, max_dim: usize) -> Result<PersistenceDiagram> {
    Ok(persistence(&build_vr(d, max_dim)?))
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{distance_matrix, scale, PointCloud, Validation};

    fn cloud(points: &[[f64; 2]]) -> DistanceMatrix {
        distance_matrix(&PointCloud::new(points.iter().map(|p| p.to_vec()).collect()).unwrap())
    }

    fn unit_square() -> DistanceMatrix {
        cloud(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    #[test]
    fn square_has_one_loop() {
        let dgm = diagram(&unit_square(), 2).unwrap();
        assert_eq!(dgm.dim(1), &[PersistencePair::new(1.0, 2f64.sqrt())]);
        // H0: three merges at 1, one essential class
        assert_eq!(
            dgm.dim(0),
            &[
                PersistencePair::new(0.0, 1.0),
                PersistencePair::new(0.0, 1.0),
                PersistencePair::new(0.0, 1.0),
                PersistencePair::new(0.0, f64::INFINITY),
            ]
        );
    }

    #[test]
    fn equilateral_triangle_has_no_loop() {
        let d = DistanceMatrix::from_rows(
            &[
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
            Validation::Basic,
        )
        .unwrap();
        let dgm = diagram(&d, 2).unwrap();
        assert!(dgm.dim(1).is_empty());
        assert_eq!(dgm.dim(0).len(), 3);
    }

    #[test]
    fn one_essential_h0_class() {
        let d = cloud(&[[0.0, 0.0], [3.0, 1.0], [-2.0, 5.0], [7.0, 7.0], [1.0, -4.0]]);
        let dgm = diagram(&d, 1).unwrap();
        assert_eq!(dgm.num_dims(), 1);
        let essential: Vec<_> = dgm.dim(0).iter().filter(|p| p.is_essential()).collect();
        assert_eq!(essential.len(), 1);
        assert_eq!(essential[0].birth, 0.0);
        let dists: Vec<f64> = d.upper_pairs().map(|(_, _, v)| v).collect();
        for p in dgm.dim(0).iter().filter(|p| !p.is_essential()) {
            assert_eq!(p.birth, 0.0);
            assert!(dists.contains(&p.death));
        }
        assert_eq!(dgm.dim(0).len(), 5);
    }

    #[test]
    fn scaled_square_diagram() {
        let d = unit_square();
        let dgm = diagram(&d, 2).unwrap();
        assert_eq!(scale_diagram(&dgm, 1.0).unwrap(), dgm);
        let scaled = scale_diagram(&dgm, 10.0).unwrap();
        assert_eq!(scaled.dim(1), &[PersistencePair::new(10.0, 10.0 * 2f64.sqrt())]);
        assert!(scaled.dim(0).iter().any(|p| p.is_essential()));
        let direct = diagram(&scale(&d, 10.0).unwrap(), 2).unwrap();
        assert_eq!(direct.dim(1), scaled.dim(1));
        assert!(matches!(
            scale_diagram(&dgm, 0.0),
            Err(Error::NonPositiveFactor(_))
        ));
    }

    #[test]
    fn hexagon_loop_and_octahedron_void() {
        // regular hexagon, side 1: loop born at 1, filled once the long chords arrive
        let pts: Vec<[f64; 2]> = (0..6)
            .map(|i| {
                let t = i as f64 * std::f64::consts::PI / 3.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let dgm = diagram(&cloud(&pts), 2).unwrap();
        assert_eq!(dgm.dim(1).len(), 1);
        let p = dgm.dim(1)[0];
        assert!((p.birth - 1.0).abs() < 1e-12);
        assert!((p.death - 3f64.sqrt()).abs() < 1e-12);

        // octahedron: an H2 void appears when computing with tetrahedra
        let oct = distance_matrix(
            &PointCloud::new(vec![
                vec![1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, -1.0],
            ])
            .unwrap(),
        );
        let dgm = diagram(&oct, 3).unwrap();
        assert_eq!(dgm.num_dims(), 3);
        assert_eq!(
            dgm.dim(2),
            &[PersistencePair::new(2f64.sqrt(), 2.0)]
        );
    }

    #[test]
    fn invalid_pairs_rejected() {
        assert!(PersistenceDiagram::from_dims(vec![vec![PersistencePair::new(2.0, 1.0)]]).is_err());
        assert!(PersistenceDiagram::from_dims(vec![vec![PersistencePair::new(
            f64::NAN,
            1.0
        )]])
        .is_err());
        let ok = PersistenceDiagram::from_dims(vec![vec![
            PersistencePair::new(1.0, 3.0),
            PersistencePair::new(0.0, f64::INFINITY),
        ]])
        .unwrap();
        assert_eq!(ok.dim(0)[0].birth, 0.0);
        assert!(ok.dim(5).is_empty());
    }

    #[test]
    fn symmetric_difference_merges() {
        let mut out = Vec::new();
        symmetric_difference(&[1, 3, 5], &[3, 4, 5, 9], &mut out);
        assert_eq!(out, vec![1, 4, 9]);
    }
}
