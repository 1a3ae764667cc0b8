use crate::source::Mt19937;
use crate::{Error, Result};

const MAX_ATTEMPTS: usize = 10;
const BREAKDOWN_TOL: f64 = 1e-8;

/// Square matrix stored row-major. The identity is flagged so that
/// unrotated functions skip the product.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    data: Vec<f64>,
    identity: bool,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Rotation { dim, data, identity: true }
    }

    /// Takes ownership of row-major `rows`; they must form a square matrix.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("rotation matrix must be square"));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let identity = (0..dim * dim).all(|k| data[k] == if k / dim == k % dim { 1.0 } else { 0.0 });
        Ok(Rotation { dim, data, identity })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    /// `out = M v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        if self.identity {
            out.copy_from_slice(v);
            return;
        }
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `max |(M^T M - I)_{ij}|`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn standard_normal(mt: &mut Mt19937) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1]
    let u1 = 1.0 - mt.next_f64();
    let u2 = mt.next_f64();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random orthogonal matrix from modified Gram-Schmidt on a matrix of
/// standard normal entries. A numerically dependent draw is redrawn.
pub fn random_rotation(dim: usize, mt: &mut Mt19937) -> Result<Rotation> {
    'attempt: for _ in 0..MAX_ATTEMPTS {
        // columns[c][r]
        let mut cols: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| standard_normal(mt)).collect())
            .collect();
        for c in 0..dim {
            for prev in 0..c {
                let (done, rest) = cols.split_at_mut(c);
                let q = &done[prev];
                let v = &mut rest[0];
                let proj: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qx)| *x -= proj * qx);
            }
            let norm = cols[c].iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > BREAKDOWN_TOL) {
                continue 'attempt;
            }
            cols[c].iter_mut().for_each(|x| *x /= norm);
        }
        let mut data = vec![0.0; dim * dim];
        for (c, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                data[r * dim + c] = v;
            }
        }
        return Ok(Rotation { dim, data, identity: false });
    }
    Err(Error::RotationBreakdown { attempts: MAX_ATTEMPTS })
}
