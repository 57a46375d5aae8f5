//! Triangle meshes: marching-cubes output and ground-truth containers.

use crate::real::Real;
use crate::vec::Vec3;
use std::collections::HashMap;

#[derive(Clone, Debug, Default)]
pub struct TriangleMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub triangles: Vec<[usize; 3]>,
    /// Unit per-vertex normals; empty when unknown.
    pub vertex_normals: Vec<Vec3<T>>,
}

impl<T: Real> TriangleMesh<T> {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn indices_in_range(&self) -> bool {
        let n = self.vertices.len();
        self.triangles.iter().all(|t| t.iter().all(|&i| i < n))
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.triangles[t];
        let e1 = self.vertices[b] - self.vertices[a];
        let e2 = self.vertices[c] - self.vertices[a];
        e1.cross(e2).norm() * T::of(0.5)
    }

    pub fn total_area(&self) -> T {
        (0..self.triangles.len()).fold(T::zero(), |acc, t| acc + self.triangle_area(t))
    }

    /// Area-weighted face normals accumulated per vertex, then normalized.
    pub fn recompute_vertex_normals(&mut self) {
        let mut acc = vec![Vec3::<T>::zero(); self.vertices.len()];
        for &[a, b, c] in &self.triangles {
            let e1 = self.vertices[b] - self.vertices[a];
            let e2 = self.vertices[c] - self.vertices[a];
            let n = e1.cross(e2);
            acc[a] += n;
            acc[b] += n;
            acc[c] += n;
        }
        self.vertex_normals = acc
            .into_iter()
            .map(|n| n.normalized_or_zero(T::of(1e-30)))
            .collect();
    }

    /// Euler characteristic V - E + F with edges counted once per undirected pair.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for &[a, b, c] in &self.triangles {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Every undirected edge bounded by exactly two triangles.
    pub fn is_closed(&self) -> bool {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for &[a, b, c] in &self.triangles {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                *count.entry((u.min(v), u.max(v))).or_insert(0) += 1;
            }
        }
        !count.is_empty() && count.values().all(|&c| c == 2)
    }

    /// Split into edge-connected components; returns the triangle index sets.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        // Union-find over triangles joined by shared edges.
        let nt = self.triangles.len();
        let mut parent: Vec<usize> = (0..nt).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            let mut root = i;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = i;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let key = (u.min(v), u.max(v));
                match edge_owner.get(&key) {
                    Some(&other) => {
                        let ra = find(&mut parent, t);
                        let rb = find(&mut parent, other);
                        if ra != rb {
                            parent[ra] = rb;
                        }
                    }
                    None => {
                        edge_owner.insert(key, t);
                    }
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for t in 0..nt {
            let r = find(&mut parent, t);
            groups.entry(r).or_default().push(t);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort_by_key(|g| std::cmp::Reverse(g.len()));
        out
    }

    /// Keep only the listed triangles, dropping now-unused vertices.
    pub fn submesh(&self, triangle_ids: &[usize]) -> TriangleMesh<T> {
        let has_normals = self.vertex_normals.len() == self.vertices.len();
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut normals = Vec::new();
        let mut triangles = Vec::with_capacity(triangle_ids.len());
        for &t in triangle_ids {
            let tri = self.triangles[t];
            let mut new_tri = [0usize; 3];
            for (k, &v) in tri.iter().enumerate() {
                let id = *remap.entry(v).or_insert_with(|| {
                    vertices.push(self.vertices[v]);
                    if has_normals {
                        normals.push(self.vertex_normals[v]);
                    }
                    vertices.len() - 1
                });
                new_tri[k] = id;
            }
            triangles.push(new_tri);
        }
        TriangleMesh {
            vertices,
            triangles,
            vertex_normals: normals,
        }
    }

    /// Largest edge-connected component.
    pub fn largest_component(&self) -> TriangleMesh<T> {
        let comps = self.connected_components();
        match comps.first() {
            Some(ids) => self.submesh(ids),
            None => TriangleMesh::default(),
        }
    }

    pub fn cast<U: Real>(&self) -> TriangleMesh<U> {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| v.cast()).collect(),
            triangles: self.triangles.clone(),
            vertex_normals: self.vertex_normals.iter().map(|v| v.cast()).collect(),
        }
    }
}

/// Unit tetrahedron used in a few round-trip tests.
pub fn unit_tetrahedron<T: Real>() -> TriangleMesh<T> {
    let mut mesh = TriangleMesh {
        vertices: vec![
            Vec3::from_f64(0.0, 0.0, 0.0),
            Vec3::from_f64(1.0, 0.0, 0.0),
            Vec3::from_f64(0.0, 1.0, 0.0),
            Vec3::from_f64(0.0, 0.0, 1.0),
        ],
        triangles: vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        vertex_normals: Vec::new(),
    };
    mesh.recompute_vertex_normals();
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tetrahedron_topology() {
        let m = unit_tetrahedron::<f64>();
        assert!(m.indices_in_range());
        assert!(m.is_closed());
        // Sphere topology: chi = 2.
        assert_eq!(m.euler_characteristic(), 2);
        assert_eq!(m.connected_components().len(), 1);
        for n in &m.vertex_normals {
            assert!((n.norm() - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn largest_component_picks_bigger() {
        // Two disjoint tetrahedra, second shifted; drop one face from the first.
        let a = unit_tetrahedron::<f64>();
        let mut b = unit_tetrahedron::<f64>();
        for v in &mut b.vertices {
            *v += Vec3::new(10.0, 0.0, 0.0);
        }
        let mut merged = a.clone();
        let off = merged.vertices.len();
        merged.vertices.extend(b.vertices.iter().copied());
        merged.vertex_normals.extend(b.vertex_normals.iter().copied());
        merged
            .triangles
            .extend(b.triangles.iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
        // Remove one triangle of component a so sizes differ.
        merged.triangles.remove(0);
        let largest = merged.largest_component();
        assert_eq!(largest.triangles.len(), 4);
        assert!(largest.vertices.iter().all(|v| v.x > 5.0));
    }
}
