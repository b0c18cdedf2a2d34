//! BiLipschitz constants of an index correspondence and the bounds they give.

use serde::Serialize;

use crate::bottleneck::normalized_bottleneck;
use crate::decomposition::optimal_decomposition;
use crate::dimred::per_dim_reports;
use crate::error::{Error, Result};
use crate::metric::{diam, DistanceMatrix};
use crate::report::BoundReport;

/// Tightest constants for `(1/k)·d_X ≤ d_Y ≤ k·d_X` and for the alternate
/// form `λ·d_X ≤ d_Y ≤ λD·d_X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiLipschitzProfile {
    pub k: f64,
    #[serde(rename = "lambda")]
    pub lambda: f64,
    #[serde(rename = "D")]
    pub big_d: f64,
}

pub fn bilipschitz_profile(dx: &DistanceMatrix, dy: &DistanceMatrix) -> Result<BiLipschitzProfile> {
    if dx.len() != dy.len() {
        return Err(Error::SizeMismatch {
            left: dx.len(),
            right: dy.len(),
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (i, j, x) in dx.upper_pairs() {
        let y = dy.get(i, j);
        match (x > 0.0, y > 0.0) {
            (true, true) => {
                let r = y / x;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            (false, false) => {}
            _ => return Err(Error::NotBiLipschitz(i, j)),
        }
    }
    if !lo.is_finite() {
        return Err(Error::TrivialSpace);
    }
    Ok(BiLipschitzProfile {
        k: hi.max(1.0 / lo),
        lambda: lo,
        big_d: hi / lo,
    })
}

/// Residual bound for the symmetric constant, and both normalized-bottleneck
/// bounds.
pub fn bilipschitz_bounds(
    dx: &DistanceMatrix,
    dy: &DistanceMatrix,
    profile: &BiLipschitzProfile,
    max_dim: usize,
) -> Result<Vec<BoundReport>> {
    let (dx_diam, dy_diam) = (diam(dx)?, diam(dy)?);
    let k = profile.k;
    let dec = optimal_decomposition(dx, dy)?;
    let dn = normalized_bottleneck(dx, dy, max_dim)?;

    let mut out = vec![BoundReport::new(
        "bilip_delta",
        dec.delta_norm,
        (k * k - 1.0) / (2.0 * k) * dx_diam,
    )
    .with_note(format!("k = {k}, s_star = {}", dec.s_star))];
    out.extend(per_dim_reports("bilip_dn", &dn, (k * k - 1.0) / k * dx_diam / dy_diam));
    out.extend(per_dim_reports(
        "bilip_dn_alt",
        &dn,
        profile.lambda * (profile.big_d - 1.0) * dx_diam / dy_diam,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{scale, Validation};

    fn tri(a: f64, b: f64, c: f64) -> DistanceMatrix {
        DistanceMatrix::from_rows(
            &[vec![0.0, a, b], vec![a, 0.0, c], vec![b, c, 0.0]],
            Validation::Basic,
        )
        .unwrap()
    }

    #[test]
    fn isometry_and_dilation() {
        let dx = tri(1.0, 1.5, 2.0);
        let p = bilipschitz_profile(&dx, &dx).unwrap();
        assert_eq!((p.k, p.lambda, p.big_d), (1.0, 1.0, 1.0));
        for b in bilipschitz_bounds(&dx, &dx, &p, 1).unwrap() {
            assert_eq!((b.lhs, b.rhs), (0.0, 0.0));
        }

        let dy = scale(&dx, 2.0).unwrap();
        let p = bilipschitz_profile(&dx, &dy).unwrap();
        assert_eq!((p.k, p.lambda, p.big_d), (2.0, 2.0, 1.0));
        let reports = bilipschitz_bounds(&dx, &dy, &p, 1).unwrap();
        let dn = reports.iter().find(|r| r.name == "bilip_dn[H0]").unwrap();
        assert_eq!(dn.rhs, 0.75);
        assert_eq!(dn.lhs, 0.0);
        assert!(reports.iter().all(|r| r.pass));
    }

    #[test]
    fn mixed_ratios() {
        let dx = tri(2.0, 1.0, 2.0);
        let dy = tri(1.0, 2.0, 2.0);
        let p = bilipschitz_profile(&dx, &dy).unwrap();
        assert_eq!((p.k, p.lambda, p.big_d), (2.0, 0.5, 4.0));
    }

    #[test]
    fn zero_mismatch() {
        let dx = tri(0.0, 1.0, 1.0);
        let dy = tri(1.0, 1.0, 1.0);
        assert!(matches!(
            bilipschitz_profile(&dx, &dy),
            Err(Error::NotBiLipschitz(0, 1))
        ));
    }
}
