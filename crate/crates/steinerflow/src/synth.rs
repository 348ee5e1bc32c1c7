//! Synthetic test domains: seeded random star-shaped polygons.

use rand::Rng;

use crate::geometry::{Point, Polygon};

/// A random simple polygon, star-shaped with respect to the origin:
/// jittered angles, radii in `[r_min, r_max]`.
pub fn random_star_polygon<R: Rng>(
    rng: &mut R,
    n_vertices: usize,
    r_min: f64,
    r_max: f64,
) -> Polygon {
    assert!(n_vertices >= 3 && r_min > 0.0 && r_max >= r_min);
    let step = 2.0 * std::f64::consts::PI / n_vertices as f64;
    let ring = (0..n_vertices)
        .map(|k| {
            let jitter = rng.gen_range(-0.35..0.35) * step;
            let t = k as f64 * step + jitter;
            let r = rng.gen_range(r_min..=r_max);
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    Polygon::simple(ring).expect("star-shaped rings are simple")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_polygons_are_valid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = rng.gen_range(6..24);
            let p = random_star_polygon(&mut rng, n, 0.4, 1.0);
            assert!(p.area() > 0.0);
        }
    }
}
