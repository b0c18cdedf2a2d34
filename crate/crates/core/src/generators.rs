//! Seeded synthetic point clouds: noisy circles and saddle boundaries.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::metric::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    NoisyCircle,
    SaddleBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseModel {
    /// Perturb the radius only, giving an annulus.
    #[default]
    Radial,
    /// Add independent noise to every coordinate.
    Isotropic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub radius: f64,
    pub noise_sigma: f64,
    /// Total vertical span of a saddle boundary.
    pub height: f64,
    /// Half-width of the square the circle is drawn in.
    pub box_halfwidth: f64,
    pub seed: u64,
    pub noise: NoiseModel,
    /// Use angles `2πk/n` instead of uniform random angles.
    pub even_spacing: bool,
}

impl GeneratorSpec {
    pub fn noisy_circle(n: usize, radius: f64, noise_sigma: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::NoisyCircle,
            n,
            radius,
            noise_sigma,
            height: 0.0,
            box_halfwidth: radius,
            seed,
            noise: NoiseModel::Radial,
            even_spacing: false,
        }
    }

    pub fn saddle(n: usize, radius: f64, height: f64, noise_sigma: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::SaddleBoundary,
            n,
            radius,
            noise_sigma,
            height,
            box_halfwidth: radius,
            seed,
            noise: NoiseModel::Isotropic,
            even_spacing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 3 {
            return bad(format!("need at least 3 points, got {}", self.n));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be nonnegative, got {}", self.noise_sigma));
        }
        if !(self.height >= 0.0 && self.height.is_finite()) {
            return bad(format!("height must be nonnegative, got {}", self.height));
        }
        if self.kind == GeneratorKind::NoisyCircle && !(self.box_halfwidth >= self.radius) {
            return bad(format!(
                "box half-width {} does not contain a circle of radius {}",
                self.box_halfwidth, self.radius
            ));
        }
        Ok(())
    }
}

fn angle(spec: &GeneratorSpec, k: usize, rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    if spec.even_spacing {
        TAU * k as f64 / spec.n as f64
    } else {
        TAU * u
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Points `(r·cos θ, r·sin θ)` centred at the origin.
pub fn noisy_circle(spec: &GeneratorSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points = (0..spec.n)
        .map(|k| {
            let theta = angle(spec, k, &mut rng);
            let (s, c) = theta.sin_cos();
            match spec.noise {
                NoiseModel::Radial => {
                    let r = spec.radius + spec.noise_sigma * normal(&mut rng);
                    vec![r * c, r * s]
                }
                NoiseModel::Isotropic => {
                    let (ex, ey) = (normal(&mut rng), normal(&mut rng));
                    vec![
                        spec.radius * c + spec.noise_sigma * ex,
                        spec.radius * s + spec.noise_sigma * ey,
                    ]
                }
            }
        })
        .collect();
    PointCloud::new(points)
}

/// Points `(R·cos θ, R·sin θ, (H/2)·sin 2θ)` plus noise. Radial noise is
/// applied in the horizontal plane only.
pub fn saddle_boundary(spec: &GeneratorSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points = (0..spec.n)
        .map(|k| {
            let theta = angle(spec, k, &mut rng);
            let (s, c) = theta.sin_cos();
            let z = 0.5 * spec.height * (2.0 * theta).sin();
            match spec.noise {
                NoiseModel::Radial => {
                    let r = spec.radius + spec.noise_sigma * normal(&mut rng);
                    vec![r * c, r * s, z]
                }
                NoiseModel::Isotropic => {
                    let e: [f64; 3] = std::array::from_fn(|_| normal(&mut rng));
                    vec![
                        spec.radius * c + spec.noise_sigma * e[0],
                        spec.radius * s + spec.noise_sigma * e[1],
                        z + spec.noise_sigma * e[2],
                    ]
                }
            }
        })
        .collect();
    PointCloud::new(points)
}

pub fn generate(spec: &GeneratorSpec) -> Result<PointCloud> {
    match spec.kind {
        GeneratorKind::NoisyCircle => noisy_circle(spec),
        GeneratorKind::SaddleBoundary => saddle_boundary(spec),
    }
}

/// `m` points with i.i.d. standard normal coordinates in `ℝ^dim`.
pub fn gaussian_cloud(m: usize, dim: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::new(
        (0..m)
            .map(|_| (0..dim).map(|_| normal(&mut rng)).collect())
            .collect(),
    )
}

/// Adds i.i.d. `N(0, sigma²)` noise to every coordinate.
pub fn perturb(cloud: &PointCloud, sigma: f64, seed: u64) -> Result<PointCloud> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be nonnegative, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::new(
        cloud
            .points()
            .iter()
            .map(|p| p.iter().map(|v| v + sigma * normal(&mut rng)).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_circle_is_exact() {
        let c = noisy_circle(&GeneratorSpec::noisy_circle(4, 1.0, 0.0, 3)).unwrap();
        assert_eq!(c.len(), 4);
        for p in c.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
        let c = noisy_circle(&GeneratorSpec::noisy_circle(50, 7.5, 0.0, 9)).unwrap();
        for p in c.points() {
            assert!((p[0].hypot(p[1]) - 7.5).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = GeneratorSpec::noisy_circle(30, 8.0, 1.0, 11);
        assert_eq!(noisy_circle(&spec).unwrap(), noisy_circle(&spec).unwrap());
        let other = GeneratorSpec { seed: 12, ..spec.clone() };
        assert_ne!(noisy_circle(&spec).unwrap(), noisy_circle(&other).unwrap());
        let iso = GeneratorSpec {
            noise: NoiseModel::Isotropic,
            ..spec
        };
        assert_eq!(noisy_circle(&iso).unwrap(), noisy_circle(&iso).unwrap());
    }

    #[test]
    fn even_saddle_heights() {
        let spec = GeneratorSpec {
            even_spacing: true,
            ..GeneratorSpec::saddle(8, 1.0, 2.0, 0.0, 0)
        };
        let c = saddle_boundary(&spec).unwrap();
        let expected = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0];
        for (p, z) in c.points().iter().zip(expected) {
            assert!((p[2] - z).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(noisy_circle(&GeneratorSpec::noisy_circle(2, 1.0, 0.0, 0)).is_err());
        assert!(noisy_circle(&GeneratorSpec::noisy_circle(5, -1.0, 0.0, 0)).is_err());
        assert!(noisy_circle(&GeneratorSpec::noisy_circle(5, 1.0, -0.1, 0)).is_err());
        let tight = GeneratorSpec {
            box_halfwidth: 0.5,
            ..GeneratorSpec::noisy_circle(5, 1.0, 0.0, 0)
        };
        assert!(noisy_circle(&tight).is_err());
    }

    #[test]
    fn gaussian_cloud_shape() {
        let c = gaussian_cloud(5, 3, 1).unwrap();
        assert_eq!((c.len(), c.dim()), (5, 3));
        assert_eq!(c, gaussian_cloud(5, 3, 1).unwrap());
    }
}
