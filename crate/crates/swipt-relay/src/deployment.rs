//! NET1 user deployment.
//!
//! Ground users of the disaster-area network are scattered by a homogeneous
//! Poisson point process over a disc centered under the UAV hover point.
//! All randomness flows from a single 64-bit seed: the Poisson count is drawn
//! first, then positions, so a fixed seed reproduces the deployment bit for
//! bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disc-shaped service area centered under the UAV's NET1 hover point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    radius: f64,
}

impl Region {
    /// A disc of the given radius in meters. The radius must be positive.
    pub fn new(radius_m: f64) -> Result<Self> {
        if !radius_m.is_finite() || radius_m <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "region_radius",
                value: radius_m,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self { radius: radius_m })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Disc area in m².
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// One realization of the NET1 user field.
///
/// `positions[k]` is the ground offset of user `k` from the hover point and
/// `slant_ranges[k]` the straight-line UAV-to-user distance at the sampling
/// altitude. Both vectors always have the same length, and every slant range
/// is at least the hover altitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserDeployment {
    pub positions: Vec<[f64; 2]>,
    pub slant_ranges: Vec<f64>,
    pub seed: u64,
}

impl UserDeployment {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Users reordered by ascending slant range (nearest first).
    pub fn sorted_by_slant_range(&self) -> UserDeployment {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.slant_ranges[a]
                .partial_cmp(&self.slant_ranges[b])
                .expect("slant ranges are finite")
        });
        UserDeployment {
            positions: order.iter().map(|&i| self.positions[i]).collect(),
            slant_ranges: order.iter().map(|&i| self.slant_ranges[i]).collect(),
            seed: self.seed,
        }
    }

    /// The first `n` users of this deployment (callers typically sort first).
    pub fn prefix(&self, n: usize) -> UserDeployment {
        let n = n.min(self.len());
        UserDeployment {
            positions: self.positions[..n].to_vec(),
            slant_ranges: self.slant_ranges[..n].to_vec(),
            seed: self.seed,
        }
    }
}

/// Straight-line UAV-to-ground distance for a user at horizontal offset
/// `horizontal_distance` when the UAV hovers at `altitude`.
pub fn slant_range(horizontal_distance: f64, altitude: f64) -> f64 {
    debug_assert!(altitude > 0.0 && horizontal_distance >= 0.0);
    (altitude * altitude + horizontal_distance * horizontal_distance).sqrt()
}

/// Draw one NET1 deployment.
///
/// The user count is Poisson with mean `density × region.area()`; positions
/// are i.i.d. uniform over the disc. `hover_altitude` fixes the slant ranges.
/// Identical `(density, region, hover_altitude, seed)` give identical output.
pub fn sample_users(
    density: f64,
    region: &Region,
    hover_altitude: f64,
    seed: u64,
) -> Result<UserDeployment> {
    if !density.is_finite() || density < 0.0 {
        return Err(Error::InvalidParameter {
            name: "density",
            value: density,
            reason: "must be finite and >= 0",
        });
    }
    if !hover_altitude.is_finite() || hover_altitude <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "hover_altitude",
            value: hover_altitude,
            reason: "must be finite and > 0",
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = density * region.area();
    // Count first, then positions: fixes the draw order for reproducibility.
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).expect("positive finite mean");
        poisson.sample(&mut rng) as usize
    } else {
        0
    };

    let mut positions = Vec::with_capacity(count);
    let mut slant_ranges = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let r = region.radius() * u.sqrt();
        let phi = 2.0 * std::f64::consts::PI * v;
        positions.push([r * phi.cos(), r * phi.sin()]);
        slant_ranges.push(slant_range(r, hover_altitude));
    }

    Ok(UserDeployment {
        positions,
        slant_ranges,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_yields_empty_deployment() {
        let region = Region::new(1000.0).unwrap();
        let d = sample_users(0.0, &region, 800.0, 42).unwrap();
        assert!(d.is_empty());
        assert_eq!(d.slant_ranges.len(), 0);
    }

    #[test]
    fn rejects_negative_or_non_finite_density() {
        let region = Region::new(1000.0).unwrap();
        assert!(sample_users(-1e-4, &region, 800.0, 0).is_err());
        assert!(sample_users(f64::NAN, &region, 800.0, 0).is_err());
        assert!(sample_users(f64::INFINITY, &region, 800.0, 0).is_err());
    }

    #[test]
    fn rejects_degenerate_region() {
        assert!(Region::new(0.0).is_err());
        assert!(Region::new(-5.0).is_err());
        assert!(Region::new(f64::NAN).is_err());
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let region = Region::new(1000.0).unwrap();
        let a = sample_users(1e-4, &region, 800.0, 7).unwrap();
        let b = sample_users(1e-4, &region, 800.0, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_users(1e-4, &region, 800.0, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empirical_mean_count_matches_intensity() {
        // Independent oracle: the process mean is density * disc area. With
        // 10^4 seeds the sample mean must land within 3 standard errors.
        let region = Region::new(1000.0).unwrap();
        let density = 1e-4;
        let expected = density * region.area(); // 10 pi ~ 314.16
        let n_seeds = 10_000u64;
        let mut total = 0usize;
        for seed in 0..n_seeds {
            total += sample_users(density, &region, 800.0, seed).unwrap().len();
        }
        let mean = total as f64 / n_seeds as f64;
        let std_err = expected.sqrt() / (n_seeds as f64).sqrt();
        assert!(
            (mean - expected).abs() <= 3.0 * std_err,
            "sample mean {mean} vs expected {expected} (3 s.e. = {})",
            3.0 * std_err
        );
    }

    #[test]
    fn positions_stay_inside_region_and_slants_dominate_altitude() {
        let region = Region::new(500.0).unwrap();
        let altitude = 700.0;
        let d = sample_users(2e-4, &region, altitude, 3).unwrap();
        assert!(!d.is_empty());
        for (pos, slant) in d.positions.iter().zip(&d.slant_ranges) {
            let r = (pos[0] * pos[0] + pos[1] * pos[1]).sqrt();
            assert!(r <= region.radius() + 1e-9);
            assert!(*slant >= altitude);
            assert!((slant - slant_range(r, altitude)).abs() < 1e-9);
        }
    }

    #[test]
    fn slant_range_known_values() {
        assert_eq!(slant_range(0.0, 800.0), 800.0);
        assert!((slant_range(600.0, 800.0) - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn slant_range_monotone_in_horizontal_distance() {
        let mut prev = slant_range(0.0, 800.0);
        for i in 1..200 {
            let d = i as f64 * 10.0;
            let s = slant_range(d, 800.0);
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn sorted_prefix_orders_by_slant_range() {
        let region = Region::new(1000.0).unwrap();
        let d = sample_users(1e-4, &region, 800.0, 11)
            .unwrap()
            .sorted_by_slant_range();
        for w in d.slant_ranges.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let p = d.prefix(5);
        assert_eq!(p.len(), 5.min(d.len()));
        assert_eq!(p.slant_ranges[..], d.slant_ranges[..p.len()]);
    }
}
