//! Integrands over the unit cube and their per-thread scratch space.

/// Reusable buffers so that evaluation does not allocate per point.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub(crate) z: Vec<f64>,
    pub(crate) shocks: Vec<f64>,
    pub(crate) logs: Vec<f64>,
    pub(crate) point: Vec<f64>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn ensure(&mut self, d: usize, m: usize) {
        if self.z.len() != d {
            self.z.resize(d, 0.0);
            self.shocks.resize(d, 0.0);
        }
        if self.logs.len() != m {
            self.logs.resize(m, 0.0);
        }
    }
}

pub trait Integrand: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, u: &[f64], ws: &mut Workspace) -> f64;
}

impl<T: Integrand + ?Sized> Integrand for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, u: &[f64], ws: &mut Workspace) -> f64 {
        (**self).eval(u, ws)
    }
}

/// A closure as an integrand.
pub struct FnIntegrand<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnIntegrand<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Integrand for FnIntegrand<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, u: &[f64], _: &mut Workspace) -> f64 {
        (self.f)(u)
    }
}

/// `v -> h(c, v)`: the integrand with its first coordinate held at `c`.
/// Used when `h` does not depend on that coordinate at all.
pub struct FixedFirst<I> {
    inner: I,
    value: f64,
}

impl<I: Integrand> FixedFirst<I> {
    pub fn new(inner: I, value: f64) -> Self {
        Self { inner, value }
    }
}

impl<I: Integrand> Integrand for FixedFirst<I> {
    fn dim(&self) -> usize {
        self.inner.dim() - 1
    }

    fn eval(&self, v: &[f64], ws: &mut Workspace) -> f64 {
        let mut point = std::mem::take(&mut ws.point);
        point.clear();
        point.push(self.value);
        point.extend_from_slice(v);
        let out = self.inner.eval(&point, ws);
        ws.point = point;
        out
    }
}
