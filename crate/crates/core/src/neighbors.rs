// Copyright 2026 The cloudsort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact k-nearest-neighbor search.
//!
//! Neighbors are ranked by the total order (squared distance, coordinates,
//! index), so the result is fully determined by the point set. The brute-force
//! and grid-hashed searches return identical lists.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::geometry::Vec3;

/// Clouds at or above this size use the grid-hashed search.
pub const GRID_THRESHOLD: usize = 20_000;

#[inline]
fn rank(points: &[Vec3], (da, a): (f64, usize), (db, b): (f64, usize)) -> Ordering {
    da.total_cmp(&db)
        .then_with(|| points[a].total_cmp(&points[b]))
        .then(a.cmp(&b))
}

/// The `k` nearest neighbors of every point (each point is its own first
/// neighbor candidate). Picks brute force or grid hashing by cloud size.
pub fn knn(points: &[Vec3], k: usize) -> Vec<Vec<usize>> {
    if points.len() < GRID_THRESHOLD {
        knn_brute(points, k)
    } else {
        knn_grid(points, k)
    }
}

/// O(n²) exhaustive search.
pub fn knn_brute(points: &[Vec3], k: usize) -> Vec<Vec<usize>> {
    let k = k.min(points.len());
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    points
        .iter()
        .map(|&q| {
            // Sorted list of the best `k` so far; most candidates fail the
            // first comparison against the current worst.
            best.clear();
            for (j, p) in points.iter().enumerate() {
                let cand = (q.distance_squared(*p), j);
                if best.len() == k {
                    match best.last() {
                        Some(&worst) if cand.0 > worst.0 => continue,
                        Some(&worst) if rank(points, cand, worst) != Ordering::Less => continue,
                        _ => {}
                    }
                    best.pop();
                }
                let at = best.partition_point(|&b| rank(points, b, cand) == Ordering::Less);
                best.insert(at, cand);
            }
            best.iter().map(|&(_, j)| j).collect()
        })
        .collect()
}

fn take_k(points: &[Vec3], cand: &mut [(f64, usize)], k: usize) -> Vec<usize> {
    if k == 0 {
        return Vec::new();
    }
    if cand.len() > k {
        cand.select_nth_unstable_by(k - 1, |a, b| rank(points, *a, *b));
    }
    let head = &mut cand[..k];
    head.sort_unstable_by(|a, b| rank(points, *a, *b));
    head.iter().map(|&(_, j)| j).collect()
}

type Cell = (i64, i64, i64);

struct Grid {
    origin: Vec3,
    size: f64,
    cells: BTreeMap<Cell, Vec<usize>>,
    max_shell: i64,
}

impl Grid {
    fn build(points: &[Vec3], k: usize) -> Grid {
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let extent = (hi - lo).x.max((hi - lo).y).max((hi - lo).z);
        // Sized for surface-like data: about k points per occupied cell.
        let mut size = extent * libm::sqrt(k.max(1) as f64 / points.len() as f64);
        if !(size > 0.0 && size.is_finite()) {
            size = 1.0;
        }
        let max_shell = ((extent / size) as i64).saturating_add(2);
        let mut grid = Grid {
            origin: lo,
            size,
            cells: BTreeMap::new(),
            max_shell,
        };
        for (i, p) in points.iter().enumerate() {
            let c = grid.cell_of(*p);
            grid.cells.entry(c).or_default().push(i);
        }
        grid
    }

    fn cell_of(&self, p: Vec3) -> Cell {
        let f = |v: f64, o: f64| libm::floor((v - o) / self.size) as i64;
        (f(p.x, self.origin.x), f(p.y, self.origin.y), f(p.z, self.origin.z))
    }
}

/// Grid-hashed search with shells expanded until the k-th candidate is
/// provably closer than anything outside the visited block.
pub fn knn_grid(points: &[Vec3], k: usize) -> Vec<Vec<usize>> {
    let k = k.min(points.len());
    if points.is_empty() || k == 0 {
        return points.iter().map(|_| Vec::new()).collect();
    }
    let grid = Grid::build(points, k);
    let mut cand: Vec<(f64, usize)> = Vec::new();
    points
        .iter()
        .map(|&q| {
            let (cx, cy, cz) = grid.cell_of(q);
            cand.clear();
            let mut shell = 0i64;
            loop {
                for dx in -shell..=shell {
                    for dy in -shell..=shell {
                        for dz in -shell..=shell {
                            if dx.abs().max(dy.abs()).max(dz.abs()) != shell {
                                continue;
                            }
                            if let Some(ids) = grid.cells.get(&(cx + dx, cy + dy, cz + dz)) {
                                cand.extend(ids.iter().map(|&j| (q.distance_squared(points[j]), j)));
                            }
                        }
                    }
                }
                if shell >= grid.max_shell {
                    break;
                }
                if cand.len() >= k {
                    let bound = shell as f64 * grid.size;
                    let mut dists: Vec<f64> = cand.iter().map(|c| c.0).collect();
                    dists.select_nth_unstable_by(k - 1, f64::total_cmp);
                    if dists[k - 1] < bound * bound {
                        break;
                    }
                }
                shell += 1;
            }
            take_k(points, &mut cand, k)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Vec3::new(rng.random(), rng.random(), rng.random::<f64>() * 0.1))
            .collect()
    }

    #[test]
    fn grid_matches_brute_force() {
        let pts = random_points(1500, 7);
        assert_eq!(knn_brute(&pts, 10), knn_grid(&pts, 10));
    }

    #[test]
    fn grid_matches_with_duplicates_and_ties() {
        let mut pts = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                pts.push(Vec3::new(i as f64 * 0.01, j as f64 * 0.01, 0.0));
            }
        }
        pts.extend_from_slice(&pts.clone()[..37]);
        assert_eq!(knn_brute(&pts, 8), knn_grid(&pts, 8));
    }

    #[test]
    fn self_is_first_for_distinct_points() {
        let pts = random_points(200, 1);
        for (i, nb) in knn_brute(&pts, 5).iter().enumerate() {
            assert_eq!(nb[0], i);
            assert_eq!(nb.len(), 5);
        }
    }

    #[test]
    fn k_larger_than_cloud_is_clamped() {
        let pts = random_points(3, 2);
        assert!(knn(&pts, 10).iter().all(|nb| nb.len() == 3));
    }
}
