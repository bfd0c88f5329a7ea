//! Proximity queries on point sets in R⁴.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::vase::distance4;

/// Exact closest pair `(distance, a, b)` with `a < b`, by sorting along the
/// widest coordinate and sweeping. `None` for fewer than two points.
pub fn closest_pair(points: &[[f64; 4]]) -> Option<(f64, usize, usize)> {
    if points.len() < 2 {
        return None;
    }
    let axis = (0..4)
        .max_by(|&a, &b| spread(points, a).total_cmp(&spread(points, b)))
        .expect("four axes");
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]).then(a.cmp(&b)));

    let mut best = (f64::INFINITY, 0, 0);
    for (k, &a) in order.iter().enumerate() {
        for &b in &order[k + 1..] {
            if points[b][axis] - points[a][axis] >= best.0 {
                break;
            }
            let d = distance4(&points[a], &points[b]);
            if d < best.0 {
                best = (d, a.min(b), a.max(b));
            }
        }
    }
    Some(best)
}

fn spread(points: &[[f64; 4]], axis: usize) -> f64 {
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[axis]), hi.max(p[axis])));
    hi - lo
}

/// Uniform cell grid over R⁴ for fixed-radius nearest-neighbour queries.
#[derive(Clone, Debug)]
pub struct GridIndex4 {
    cell: f64,
    points: Vec<[f64; 4]>,
    cells: BTreeMap<[i64; 4], Vec<usize>>,
}

impl GridIndex4 {
    /// `cell` is also the largest radius [`Self::nearest_within`] accepts.
    pub fn new(points: Vec<[f64; 4]>, cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let mut cells: BTreeMap<[i64; 4], Vec<usize>> = BTreeMap::new();
        for (k, p) in points.iter().enumerate() {
            cells.entry(key(p, cell)).or_default().push(k);
        }
        Self { cell, points, cells }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64; 4] {
        &self.points[k]
    }

    /// Closest indexed point within `radius ≤ cell` of `q`.
    pub fn nearest_within(&self, q: &[f64; 4], radius: f64) -> Option<(f64, usize)> {
        debug_assert!(radius <= self.cell);
        let c = key(q, self.cell);
        let mut best: Option<(f64, usize)> = None;
        for offset in 0..81 {
            let mut o = offset;
            let mut k = c;
            for slot in k.iter_mut() {
                *slot += (o % 3) as i64 - 1;
                o /= 3;
            }
            let Some(ids) = self.cells.get(&k) else { continue };
            for &id in ids {
                let d = distance4(q, &self.points[id]);
                if d <= radius && best.is_none_or(|(b, bid)| d < b || (d == b && id < bid)) {
                    best = Some((d, id));
                }
            }
        }
        best
    }
}

fn key(p: &[f64; 4], cell: f64) -> [i64; 4] {
    [0, 1, 2, 3].map(|k| libm::floor(p[k] / cell) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute_pair(points: &[[f64; 4]]) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                best = best.min(distance4(&points[a], &points[b]));
            }
        }
        best
    }

    #[test]
    fn closest_pair_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pts: Vec<[f64; 4]> = (0..300).map(|_| [0, 1, 2, 3].map(|_| rng.gen_range(-1.0..1.0))).collect();
            let (d, a, b) = closest_pair(&pts).unwrap();
            assert_eq!(d, brute_pair(&pts));
            assert_eq!(d, distance4(&pts[a], &pts[b]));
        }
        assert!(closest_pair(&[[0.0; 4]]).is_none());
        assert_eq!(closest_pair(&[[0.0; 4], [0.0; 4]]).unwrap().0, 0.0);
    }

    #[test]
    fn grid_query_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<[f64; 4]> = (0..2000).map(|_| [0, 1, 2, 3].map(|_| rng.gen_range(-1.0..1.0))).collect();
        let grid = GridIndex4::new(pts.clone(), 0.3);
        for _ in 0..200 {
            let q = [0, 1, 2, 3].map(|_| rng.gen_range(-1.2..1.2));
            let brute = pts
                .iter()
                .map(|p| distance4(&q, p))
                .filter(|&d| d <= 0.3)
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))));
            assert_eq!(grid.nearest_within(&q, 0.3).map(|(d, _)| d), brute);
        }
    }
}
