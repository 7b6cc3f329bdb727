//! Orthogonal path-generation transforms: identity, QR and modified QR.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, QrFactors};
use crate::models::Model;

/// `d x r` matrix whose columns are the linear directions a payoff
/// depends on to first order.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    w: Matrix,
}

const RANK_TOL: f64 = 1e-10;

impl WeightMatrix {
    pub fn new(w: Matrix) -> Result<Self> {
        if w.cols() == 0 || w.rows() == 0 {
            return Err(Error::DegenerateWeights("needs at least one column".into()));
        }
        if w.cols() > w.rows() {
            return Err(Error::DegenerateWeights(format!(
                "{} columns exceed dimension {}",
                w.cols(),
                w.rows()
            )));
        }
        if (0..w.rows()).any(|i| w.row(i).iter().any(|v| !v.is_finite())) {
            return Err(Error::DegenerateWeights("non-finite entry".into()));
        }
        let sv = w.singular_values();
        let (largest, smallest) = (sv[0], *sv.last().unwrap());
        if !(largest > 0.0) || smallest < RANK_TOL * largest {
            return Err(Error::DegenerateWeights(format!(
                "column rank below {} (singular values {largest:e} .. {smallest:e})",
                w.cols()
            )));
        }
        Ok(Self { w })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_columns(columns))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    pub fn rank(&self) -> usize {
        self.w.cols()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    Identity,
    Qr,
    Mqr,
}

/// An orthogonal `d x d` matrix `U`, stored as Householder factors so that
/// `U z` costs `O(d r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalTransform {
    kind: TransformKind,
    dim: usize,
    factors: Option<QrFactors>,
}

impl OrthogonalTransform {
    pub fn identity(dim: usize) -> Self {
        Self { kind: TransformKind::Identity, dim, factors: None }
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.kind == TransformKind::Identity
    }

    /// Whether `(U z)_1 = z_1` for every `z`.
    pub fn pins_first(&self) -> bool {
        self.kind != TransformKind::Qr
    }

    /// `z <- U z`.
    #[inline]
    pub fn apply(&self, z: &mut [f64]) {
        debug_assert_eq!(z.len(), self.dim);
        match (&self.kind, &self.factors) {
            (TransformKind::Qr, Some(f)) => f.apply_q(z),
            (TransformKind::Mqr, Some(f)) => f.apply_q(&mut z[1..]),
            _ => {}
        }
    }

    pub fn matrix(&self) -> Matrix {
        let mut u = Matrix::zeros(self.dim, self.dim);
        let mut e = vec![0.0; self.dim];
        for j in 0..self.dim {
            e.iter_mut().for_each(|t| *t = 0.0);
            e[j] = 1.0;
            self.apply(&mut e);
            for (i, v) in e.iter().enumerate() {
                u[(i, j)] = *v;
            }
        }
        u
    }
}

/// `U = blockdiag(1, Q)` where `W_{-1} = Q R` is the QR factorization of
/// `W` without its first row.
pub fn mqr_transform(w: &WeightMatrix) -> Result<OrthogonalTransform> {
    let d = w.dim();
    if d < 2 {
        return Err(Error::DegenerateWeights("modified QR needs d >= 2".into()));
    }
    let rest = w.matrix().drop_rows(1);
    if (0..rest.rows()).all(|i| rest.row(i).iter().all(|&v| v == 0.0)) {
        return Err(Error::DegenerateWeights("weights vanish outside the first coordinate".into()));
    }
    Ok(OrthogonalTransform {
        kind: TransformKind::Mqr,
        dim: d,
        factors: Some(QrFactors::new(&rest)),
    })
}

/// `U = Q~` from the full QR factorization `W = Q~ R~`.
pub fn qr_transform(w: &WeightMatrix) -> Result<OrthogonalTransform> {
    Ok(OrthogonalTransform {
        kind: TransformKind::Qr,
        dim: w.dim(),
        factors: Some(QrFactors::new(w.matrix())),
    })
}

/// Which first-order matching a payoff asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightTarget {
    /// Gradient of the arithmetic average `S_A`.
    Average,
    /// Gradients of `log S_m, ..., log S_1`.
    Barrier,
}

const FD_STEP: f64 = 1e-5;

/// Taylor-matched weights at `z = 0`, by central differences on the
/// model's own path map.
pub fn taylor_weight(model: &Model, target: WeightTarget) -> Result<WeightMatrix> {
    let d = model.dim();
    let m = model.steps();
    let mut z = vec![0.0; d];
    let mut shocks = vec![0.0; d];
    let mut log_path = |z: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; m];
        model.shocks_from_normals(z, &mut shocks);
        model.log_path(&shocks, &mut out);
        out
    };
    let mut grads = Vec::with_capacity(d);
    for k in 0..d {
        z[k] = FD_STEP;
        let up = log_path(&z);
        z[k] = -FD_STEP;
        let down = log_path(&z);
        z[k] = 0.0;
        let g: Vec<f64> = match target {
            WeightTarget::Average => {
                let avg = |p: &[f64]| p.iter().map(|v| v.exp()).sum::<f64>() / m as f64;
                vec![(avg(&up) - avg(&down)) / (2.0 * FD_STEP)]
            }
            WeightTarget::Barrier => (0..m)
                .rev()
                .map(|i| (up[i] - down[i]) / (2.0 * FD_STEP))
                .collect(),
        };
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient(k));
        }
        grads.push(g);
    }
    let r = grads[0].len();
    let mut w = Matrix::zeros(d, r);
    for (k, g) in grads.iter().enumerate() {
        for (j, v) in g.iter().enumerate() {
            w[(k, j)] = *v;
        }
    }
    WeightMatrix::new(w)
}

/// `U z` for every row of a row-major batch.
pub fn apply_transform(u: &OrthogonalTransform, z: &[f64]) -> Result<Vec<f64>> {
    let d = u.dim();
    if d == 0 || !z.len().is_multiple_of(d) {
        return Err(Error::DimensionMismatch { expected: d, got: z.len() });
    }
    let mut out = z.to_vec();
    out.chunks_exact_mut(d).for_each(|row| u.apply(row));
    Ok(out)
}
