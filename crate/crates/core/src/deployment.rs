//! Cubicle-grid deployments: one AP at the center of each square cubicle and
//! one STA dropped uniformly inside the same cubicle.
//!
//! Drops are reproducible. Drop `i` of a run with master seed `s` draws from a
//! ChaCha8 generator seeded with `s` on stream `i`, so drops can be generated
//! in any order or in parallel and always yield the same geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bss {
    pub id: usize,
    pub ap: Point,
    pub sta: Point,
    pub cubicle_origin: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bss_list: Vec<Bss>,
    pub side_d: f64,
    /// (rows, cols)
    pub grid: (usize, usize),
}

impl Deployment {
    pub fn len(&self) -> usize {
        self.bss_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bss_list.is_empty()
    }

    /// Builds a deployment from explicit AP/STA positions. Used for hand-made
    /// topologies; the cubicle fields are filled with a degenerate 1×N grid.
    pub fn from_positions(pairs: &[(Point, Point)]) -> Self {
        let bss_list =
            pairs.iter().enumerate().map(|(id, &(ap, sta))| Bss { id, ap, sta, cubicle_origin: ap }).collect();
        Deployment { bss_list, side_d: 0.0, grid: (1, pairs.len()) }
    }
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Grid shape for `n_bss` cubicles: the most square rows×cols factorization
/// of `n_bss` with rows ≤ cols (1 → 1×1, 2 → 1×2, 4 → 2×2, 6 → 2×3).
pub fn grid_shape(n_bss: usize) -> Result<(usize, usize)> {
    if n_bss == 0 {
        return Err(Error::InvalidInput("n_bss must be at least 1".into()));
    }
    let mut rows = (n_bss as f64).sqrt().floor() as usize;
    while rows > 1 && n_bss % rows != 0 {
        rows -= 1;
    }
    Ok((rows, n_bss / rows))
}

/// Generator for drop `drop_id` under `master_seed`.
pub fn drop_rng(master_seed: u64, drop_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(drop_id);
    rng
}

pub fn generate_drop(n_bss: usize, side_d: f64, rng: &mut impl Rng) -> Result<Deployment> {
    if !(side_d.is_finite() && side_d > 0.0) {
        return Err(Error::InvalidInput(format!("side_d must be positive, got {side_d}")));
    }
    let (rows, cols) = grid_shape(n_bss)?;
    let bss_list = (0..n_bss)
        .map(|id| {
            let origin = Point::new((id % cols) as f64 * side_d, (id / cols) as f64 * side_d);
            let ap = Point::new(origin.x + side_d / 2.0, origin.y + side_d / 2.0);
            let sta = Point::new(origin.x + rng.gen::<f64>() * side_d, origin.y + rng.gen::<f64>() * side_d);
            Bss { id, ap, sta, cubicle_origin: origin }
        })
        .collect();
    Ok(Deployment { bss_list, side_d, grid: (rows, cols) })
}

/// Seeded convenience wrapper around [`generate_drop`].
pub fn generate_seeded_drop(n_bss: usize, side_d: f64, master_seed: u64, drop_id: u64) -> Result<Deployment> {
    generate_drop(n_bss, side_d, &mut drop_rng(master_seed, drop_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_bss_grid_places_aps_side_by_side() {
        let d = generate_seeded_drop(2, 2.0, 99, 0).unwrap();
        assert_eq!(d.grid, (1, 2));
        assert_eq!(d.bss_list[0].ap, Point::new(1.0, 1.0));
        assert_eq!(d.bss_list[1].ap, Point::new(3.0, 1.0));
    }

    #[test]
    fn single_bss_is_centered() {
        let d = generate_seeded_drop(1, 4.0, 3, 0).unwrap();
        assert_eq!(d.bss_list[0].ap, Point::new(2.0, 2.0));
        let sta = d.bss_list[0].sta;
        assert!((0.0..=4.0).contains(&sta.x) && (0.0..=4.0).contains(&sta.y));
    }

    #[test]
    fn drops_are_deterministic() {
        let a = generate_seeded_drop(4, 2.0, 7, 0).unwrap();
        let b = generate_seeded_drop(4, 2.0, 7, 0).unwrap();
        assert_eq!(a, b);
        let c = generate_seeded_drop(4, 2.0, 7, 1).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(grid_shape(1).unwrap(), (1, 1));
        assert_eq!(grid_shape(2).unwrap(), (1, 2));
        assert_eq!(grid_shape(3).unwrap(), (1, 3));
        assert_eq!(grid_shape(4).unwrap(), (2, 2));
        assert_eq!(grid_shape(6).unwrap(), (2, 3));
        assert_eq!(grid_shape(9).unwrap(), (3, 3));
        assert!(grid_shape(0).is_err());
    }

    #[test]
    fn rejects_bad_side() {
        assert!(generate_seeded_drop(2, 0.0, 1, 0).is_err());
        assert!(generate_seeded_drop(2, -1.0, 1, 0).is_err());
        assert!(generate_seeded_drop(2, f64::NAN, 1, 0).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(0.0, 0.0)), 0.0);
        assert_eq!(distance(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point::new(1.0, 1.0), Point::new(3.0, 1.0)), 2.0);
    }

    proptest! {
        #[test]
        fn stas_stay_in_their_cubicle(n in prop::sample::select(vec![1usize, 2, 3, 4, 6]),
                                      side in 0.5f64..20.0, seed: u64, drop in 0u64..1000) {
            let d = generate_seeded_drop(n, side, seed, drop).unwrap();
            prop_assert_eq!(d.len(), d.grid.0 * d.grid.1);
            for b in &d.bss_list {
                let o = b.cubicle_origin;
                prop_assert!(b.sta.x >= o.x && b.sta.x <= o.x + side);
                prop_assert!(b.sta.y >= o.y && b.sta.y <= o.y + side);
                prop_assert!((b.ap.x - (o.x + side / 2.0)).abs() < 1e-12);
                prop_assert!((b.ap.y - (o.y + side / 2.0)).abs() < 1e-12);
            }
        }

        #[test]
        fn ap_positions_ignore_seed(seed_a: u64, seed_b: u64) {
            let a = generate_seeded_drop(4, 3.0, seed_a, 0).unwrap();
            let b = generate_seeded_drop(4, 3.0, seed_b, 5).unwrap();
            for (x, y) in a.bss_list.iter().zip(&b.bss_list) {
                prop_assert_eq!(x.ap, y.ap);
            }
        }

        #[test]
        fn triangle_inequality(ax in -50f64..50.0, ay in -50f64..50.0, bx in -50f64..50.0,
                               by in -50f64..50.0, cx in -50f64..50.0, cy in -50f64..50.0) {
            let (a, b, c) = (Point::new(ax, ay), Point::new(bx, by), Point::new(cx, cy));
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9);
            prop_assert_eq!(distance(a, b), distance(b, a));
        }
    }
}
