//! Chamfer distance and normal consistency between sampled surfaces, with a
//! uniform-grid nearest-neighbor index verified against brute force.

use crate::sampling::SampledSurface;
use serde::Serialize;
use surfrec_core::{Real, Vec3};

/// Uniform hash grid over a point set for nearest-neighbor queries.
pub struct PointGrid<T> {
    origin: Vec3<T>,
    cell: T,
    dims: [usize; 3],
    buckets: Vec<Vec<u32>>,
    points: Vec<Vec3<T>>,
}

impl<T: Real> PointGrid<T> {
    pub fn build(points: &[Vec3<T>]) -> Self {
        assert!(!points.is_empty());
        let mut lo = points[0];
        let mut hi = points[0];
        for p in points {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let extent = (hi - lo).max_component().max(T::of(1e-9));
        // Aim for a few points per occupied cell.
        let n = points.len() as f64;
        let cells_per_axis = (n / 2.0).powf(1.0 / 3.0).ceil().clamp(1.0, 128.0) as usize;
        let cell = extent / T::from_usize(cells_per_axis).unwrap();
        let dim_of = |span: T| -> usize {
            (span / cell)
                .floor()
                .to_usize()
                .unwrap_or(0)
                .min(cells_per_axis * 2)
                + 1
        };
        let dims = [dim_of(hi.x - lo.x), dim_of(hi.y - lo.y), dim_of(hi.z - lo.z)];
        let mut buckets = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let clamp_idx = |v: T, d: usize| -> usize {
            (v / cell).floor().to_usize().unwrap_or(0).min(d - 1)
        };
        for (i, p) in points.iter().enumerate() {
            let q = *p - lo;
            let (ix, iy, iz) = (
                clamp_idx(q.x, dims[0]),
                clamp_idx(q.y, dims[1]),
                clamp_idx(q.z, dims[2]),
            );
            buckets[(iz * dims[1] + iy) * dims[0] + ix].push(i as u32);
        }
        Self {
            origin: lo,
            cell,
            dims,
            buckets,
            points: points.to_vec(),
        }
    }

    /// Index and distance of the nearest stored point.
    pub fn nearest(&self, q: Vec3<T>) -> (usize, T) {
        let rel = q - self.origin;
        let cell_of = |v: T, d: usize| -> isize {
            (v / self.cell)
                .floor()
                .to_isize()
                .unwrap_or(0)
                .clamp(0, d as isize - 1)
        };
        let cx = cell_of(rel.x, self.dims[0]);
        let cy = cell_of(rel.y, self.dims[1]);
        let cz = cell_of(rel.z, self.dims[2]);
        let mut best = (usize::MAX, T::infinity());
        let max_ring = *self.dims.iter().max().unwrap() as isize;
        for ring in 0..=max_ring {
            // Any point in a farther ring is at least (ring-1) cells away.
            if best.0 != usize::MAX {
                let ring_min = T::from_isize((ring - 1).max(0)).unwrap() * self.cell;
                if ring_min * ring_min > best.1 {
                    break;
                }
            }
            for dz in -ring..=ring {
                let z = cz + dz;
                if z < 0 || z >= self.dims[2] as isize {
                    continue;
                }
                for dy in -ring..=ring {
                    let y = cy + dy;
                    if y < 0 || y >= self.dims[1] as isize {
                        continue;
                    }
                    for dx in -ring..=ring {
                        // Shell only: at least one coordinate on the ring.
                        if dx.abs() != ring && dy.abs() != ring && dz.abs() != ring {
                            continue;
                        }
                        let x = cx + dx;
                        if x < 0 || x >= self.dims[0] as isize {
                            continue;
                        }
                        let bucket = &self.buckets
                            [((z as usize) * self.dims[1] + y as usize) * self.dims[0] + x as usize];
                        for &i in bucket {
                            let d2 = (self.points[i as usize] - q).norm_squared();
                            if d2 < best.1 {
                                best = (i as usize, d2);
                            }
                        }
                    }
                }
            }
        }
        (best.0, best.1.sqrt())
    }
}

/// Indices and distances of nearest neighbors in `targets` for each query.
pub fn nearest_neighbors<T: Real>(queries: &[Vec3<T>], targets: &[Vec3<T>]) -> Vec<(usize, T)> {
    let grid = PointGrid::build(targets);
    queries.iter().map(|q| grid.nearest(*q)).collect()
}

/// Symmetric Chamfer distance: `0.5 (mean_a d(a, B) + mean_b d(b, A))`.
pub fn chamfer_distance<T: Real>(a: &SampledSurface<T>, b: &SampledSurface<T>) -> T {
    let ab = nearest_neighbors(&a.points, &b.points);
    let ba = nearest_neighbors(&b.points, &a.points);
    let mean = |v: &[(usize, T)]| -> T {
        v.iter().fold(T::zero(), |acc, (_, d)| acc + *d) / T::from_usize(v.len()).unwrap()
    };
    (mean(&ab) + mean(&ba)) * T::of(0.5)
}

/// Symmetric mean absolute cosine between normals at nearest neighbors.
pub fn normal_consistency<T: Real>(a: &SampledSurface<T>, b: &SampledSurface<T>) -> T {
    let ab = nearest_neighbors(&a.points, &b.points);
    let ba = nearest_neighbors(&b.points, &a.points);
    let side = |src: &SampledSurface<T>, dst: &SampledSurface<T>, nn: &[(usize, T)]| -> T {
        let mut acc = T::zero();
        for (i, (j, _)) in nn.iter().enumerate() {
            acc += src.normals[i].dot(dst.normals[*j]).abs();
        }
        acc / T::from_usize(nn.len()).unwrap()
    };
    (side(a, b, &ab) + side(b, a, &ba)) * T::of(0.5)
}

/// Brute-force references for the metric tests.
pub fn chamfer_distance_reference<T: Real>(a: &SampledSurface<T>, b: &SampledSurface<T>) -> T {
    let side = |xs: &[Vec3<T>], ys: &[Vec3<T>]| -> T {
        let mut acc = T::zero();
        for x in xs {
            let mut best = T::infinity();
            for y in ys {
                best = best.min((*x - *y).norm_squared());
            }
            acc += best.sqrt();
        }
        acc / T::from_usize(xs.len()).unwrap()
    };
    (side(&a.points, &b.points) + side(&b.points, &a.points)) * T::of(0.5)
}

pub fn normal_consistency_reference<T: Real>(a: &SampledSurface<T>, b: &SampledSurface<T>) -> T {
    let side = |src: &SampledSurface<T>, dst: &SampledSurface<T>| -> T {
        let mut acc = T::zero();
        for (i, x) in src.points.iter().enumerate() {
            let mut best = T::infinity();
            let mut best_j = 0;
            for (j, y) in dst.points.iter().enumerate() {
                let d = (*x - *y).norm_squared();
                if d < best {
                    best = d;
                    best_j = j;
                }
            }
            acc += src.normals[i].dot(dst.normals[best_j]).abs();
        }
        acc / T::from_usize(src.points.len()).unwrap()
    };
    (side(a, b) + side(b, a)) * T::of(0.5)
}

/// Evaluation report serialized by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub cd_x1000: f64,
    pub nc: f64,
    pub counts: [usize; 2],
    pub seed: u64,
}

pub fn evaluate<T: Real>(a: &SampledSurface<T>, b: &SampledSurface<T>, seed: u64) -> MetricsReport {
    MetricsReport {
        cd_x1000: chamfer_distance(a, b).as_f64() * 1000.0,
        nc: normal_consistency(a, b).as_f64(),
        counts: [a.len(), b.len()],
        seed,
    }
}
