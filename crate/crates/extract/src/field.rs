//! Scalar-field abstraction consumed by marching cubes and the SDF normal
//! map. Gradients default to central differences so any value-only field
//! works; analytic fields can override.

use surfrec_core::{Real, Vec3};

pub trait ScalarField<T: Real> {
    fn values(&self, points: &[Vec3<T>]) -> Vec<T>;

    /// Step used by the default finite-difference gradient.
    fn grad_step(&self) -> T {
        T::of(1e-4)
    }

    fn gradients(&self, points: &[Vec3<T>]) -> Vec<Vec3<T>> {
        let h = self.grad_step();
        let mut probes = Vec::with_capacity(points.len() * 6);
        for p in points {
            for axis in 0..3 {
                let mut plus = *p;
                let mut minus = *p;
                plus[axis] += h;
                minus[axis] -= h;
                probes.push(plus);
                probes.push(minus);
            }
        }
        let vals = self.values(&probes);
        let two_h = h + h;
        points
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let b = i * 6;
                Vec3::new(
                    (vals[b] - vals[b + 1]) / two_h,
                    (vals[b + 2] - vals[b + 3]) / two_h,
                    (vals[b + 4] - vals[b + 5]) / two_h,
                )
            })
            .collect()
    }
}

/// Wrap a batch-evaluating closure as a field.
pub struct FnField<F, T> {
    pub f: F,
    pub step: T,
}

impl<T: Real, F: Fn(&[Vec3<T>]) -> Vec<T>> FnField<F, T> {
    pub fn new(f: F, step: T) -> Self {
        Self { f, step }
    }
}

impl<T: Real, F: Fn(&[Vec3<T>]) -> Vec<T>> ScalarField<T> for FnField<F, T> {
    fn values(&self, points: &[Vec3<T>]) -> Vec<T> {
        (self.f)(points)
    }

    fn grad_step(&self) -> T {
        self.step
    }
}

/// Analytic sphere `|x - c| - r`; exact gradients.
pub struct SphereField<T> {
    pub center: Vec3<T>,
    pub radius: T,
}

impl<T: Real> ScalarField<T> for SphereField<T> {
    fn values(&self, points: &[Vec3<T>]) -> Vec<T> {
        points.iter().map(|p| (*p - self.center).norm() - self.radius).collect()
    }

    fn gradients(&self, points: &[Vec3<T>]) -> Vec<Vec3<T>> {
        points
            .iter()
            .map(|p| (*p - self.center).normalized_or_zero(T::of(1e-12)))
            .collect()
    }
}

/// Analytic plane `n . x - d` (n unit); exact gradients.
pub struct PlaneField<T> {
    pub normal: Vec3<T>,
    pub offset: T,
}

impl<T: Real> ScalarField<T> for PlaneField<T> {
    fn values(&self, points: &[Vec3<T>]) -> Vec<T> {
        points.iter().map(|p| p.dot(self.normal) - self.offset).collect()
    }

    fn gradients(&self, points: &[Vec3<T>]) -> Vec<Vec3<T>> {
        vec![self.normal; points.len()]
    }
}
