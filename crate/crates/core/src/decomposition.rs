//! Optimal metric decomposition `D_Y = s·D_X + Δ` minimizing `‖Δ‖∞` over `s ≥ 0`.
//!
//! With `M` index-aligned pairs `(x_p, y_p)`, the objective is
//! `h(s) = max(f⁺(s), f⁻(s))` where `f⁺(s) = max_p (y_p − s·x_p)` is
//! nonincreasing and `f⁻(s) = max_p (s·x_p − y_p)` is nondecreasing. The
//! minimizer is where the two cross, which is always of the form
//! `(y_p + y_q) / (x_p + x_q)` for the active lines `p` of `f⁺` and `q` of
//! `f⁻`. The crossing is bracketed by bisection down to adjacent floats, the
//! lines active at both ends of the bracket give the candidate crossings, and
//! `h` is evaluated exactly at each candidate.

use serde::Serialize;

use crate::bottleneck::normalized_bottleneck;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metric::{diam, DistanceMatrix};
use crate::report::{serialize_real, BoundReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub s_star: f64,
    pub delta_norm: f64,
    /// `D_Y − s_star·D_X`.
    #[serde(skip)]
    pub delta: Matrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_profile: Option<Vec<(f64, f64)>>,
    /// Pairs with `d_X = 0 < d_Y`; no choice of `s` reduces their residual.
    pub degenerate_pairs: usize,
    /// True when `s = 0` is optimal, i.e. the fitted scaling is degenerate.
    pub zero_scale: bool,
}

impl Decomposition {
    /// Samples `h` on `samples + 1` evenly spaced points of `[0, s_max]`.
    pub fn with_profile(
        mut self,
        dx: &DistanceMatrix,
        dy: &DistanceMatrix,
        s_max: f64,
        samples: usize,
    ) -> Result<Self> {
        self.h_profile = Some(h_profile(dx, dy, s_max, samples)?);
        Ok(self)
    }
}

fn check_sizes(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<()> {
    if dx.len() != dy.len() {
        return Err(Error::SizeMismatch {
            left: dx.len(),
            right: dy.len(),
        });
    }
    Ok(())
}

/// `h(s) = max_{i<j} |D_Y[i][j] − s·D_X[i][j]|`.
pub fn h_eval(dx: &DistanceMatrix, dy: &DistanceMatrix, s: f64) -> Result<f64> {
    check_sizes(dx, dy)?;
    Ok(h_unchecked(dx, dy, s))
}

fn h_unchecked(dx: &DistanceMatrix, dy: &DistanceMatrix, s: f64) -> f64 {
    let n = dx.len();
    let mut h = 0.0f64;
    for i in 0..n {
        let (rx, ry) = (dx.row(i), dy.row(i));
        for j in (i + 1)..n {
            h = h.max((ry[j] - s * rx[j]).abs());
        }
    }
    h
}

/// Largest ratio `D_Y / D_X` over pairs with `D_X > 0`; beyond it `h` is
/// strictly increasing.
pub fn max_ratio(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<f64> {
    check_sizes(dx, dy)?;
    let mut m = 0.0f64;
    for (i, j, x) in dx.upper_pairs() {
        if x > 0.0 {
            m = m.max(dy.get(i, j) / x);
        }
    }
    Ok(m)
}

pub fn h_profile(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    s_max: f64,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    check_sizes(dx, dy)?;
    if !(s_max >= 0.0 && s_max.is_finite()) || samples == 0 {
        return Err(Error::InvalidParameter(
            "profile needs a finite s_max ≥ 0 and at least one sample".into(),
        ));
    }
    Ok((0..=samples)
        .map(|k| {
            let s = s_max * k as f64 / samples as f64;
            (s, h_unchecked(dx, dy, s))
        })
        .collect())
}

/// Bisection steps on the crossing of `f⁺` and `f⁻`; enough to reach
/// adjacent floats for any `s` not astronomically close to zero.
const BISECTION_STEPS: usize = 200;

/// Pairs with `x > 0` as `(x, y)`, plus the largest `y` over pairs with
/// `x = 0` and how many of those have `y > 0`.
fn split_pairs(dx: &DistanceMatrix, dy: &DistanceMatrix) -> (Vec<(f64, f64)>, f64, usize) {
    let mut pairs = Vec::new();
    let mut floor = 0.0f64;
    let mut degenerate = 0;
    for (i, j, x) in dx.upper_pairs() {
        let y = dy.get(i, j);
        if x > 0.0 {
            pairs.push((x, y));
        } else {
            floor = floor.max(y);
            if y > 0.0 {
                degenerate += 1;
            }
        }
    }
    (pairs, floor, degenerate)
}

/// `(f⁺(s), argmax, f⁻(s), argmax)` over `pairs`.
fn sides(pairs: &[(f64, f64)], s: f64) -> (f64, usize, f64, usize) {
    let (mut fp, mut ip, mut fm, mut im) = (f64::NEG_INFINITY, 0, f64::NEG_INFINITY, 0);
    for (k, &(x, y)) in pairs.iter().enumerate() {
        let v = y - s * x;
        if v > fp {
            (fp, ip) = (v, k);
        }
        if -v > fm {
            (fm, im) = (-v, k);
        }
    }
    (fp, ip, fm, im)
}

/// Exact global minimizer of `h` over `s ≥ 0`, ties broken toward smaller `s`.
pub fn optimal_decomposition(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<Decomposition> {
    check_sizes(dx, dy)?;
    diam(dx)?;
    let (pairs, floor, degenerate_pairs) = split_pairs(dx, dy);

    let mut candidates = vec![0.0];
    if !pairs.is_empty() {
        // f⁺ − f⁻ is decreasing, nonnegative at 0 and nonpositive at the
        // largest ratio
        let (mut lo, mut hi) = (0.0f64, max_ratio(dx, dy)?);
        for _ in 0..BISECTION_STEPS {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let (fp, _, fm, _) = sides(&pairs, mid);
            if fp >= fm {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (_, p_lo, _, q_lo) = sides(&pairs, lo);
        let (_, p_hi, _, q_hi) = sides(&pairs, hi);
        candidates.extend([lo, hi]);
        for p in [p_lo, p_hi] {
            for q in [q_lo, q_hi] {
                let ((xp, yp), (xq, yq)) = (pairs[p], pairs[q]);
                candidates.push((yp + yq) / (xp + xq));
            }
        }
        if floor > 0.0 {
            // smallest s with f⁺(s) ≤ floor: beyond it the constant pairs dominate
            let s = pairs.iter().map(|&(x, y)| (y - floor) / x).fold(0.0f64, f64::max);
            candidates.push(s);
        }
    }

    let mut best = (f64::INFINITY, f64::INFINITY);
    for s in candidates {
        if !(s >= 0.0 && s.is_finite()) {
            continue;
        }
        let h = h_unchecked(dx, dy, s);
        if h < best.1 || (h == best.1 && s < best.0) {
            best = (s, h);
        }
    }
    let (s_star, delta_norm) = best;

    let n = dx.len();
    let mut delta = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                delta[(i, j)] = dy.get(i, j) - s_star * dx.get(i, j);
            }
        }
    }

    Ok(Decomposition {
        s_star,
        delta_norm,
        delta,
        h_profile: None,
        degenerate_pairs,
        zero_scale: s_star == 0.0,
    })
}

/// `d_N(X, Y) ≤ 2‖Δ‖ / diam(Y)`, with the left side maximized over dimensions.
pub fn stability_bound(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    max_dim: usize,
) -> Result<BoundReport> {
    let dec = optimal_decomposition(dx, dy)?;
    let rhs = 2.0 * dec.delta_norm / diam(dy)?;
    let dn = normalized_bottleneck(dx, dy, max_dim)?;
    Ok(BoundReport::new("dn_stability", dn.max, rhs))
}

/// Serializable summary used by reports and the command line.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSummary {
    #[serde(serialize_with = "serialize_real")]
    pub s_star: f64,
    #[serde(serialize_with = "serialize_real")]
    pub delta_norm: f64,
    pub degenerate_pairs: usize,
    pub zero_scale: bool,
}

impl From<&Decomposition> for DecompositionSummary {
    fn from(d: &Decomposition) -> Self {
        DecompositionSummary {
            s_star: d.s_star,
            delta_norm: d.delta_norm,
            degenerate_pairs: d.degenerate_pairs,
            zero_scale: d.zero_scale,
        }
    }
}
