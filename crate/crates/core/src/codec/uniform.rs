use alloc::vec;

use super::linalg::{orthonormal_rows, Matrix};
use super::{Codebook, Latents};
use crate::rng::{derive_seed, rng_from, stream};

/// Equal-priority analog transmission: each slot's object, attribute and
/// relation latents are concatenated (`3D`) and projected to `k` symbols, so
/// a budget of `N * k` symbols carries all three streams with no masking.
///
/// The projection has orthonormal rows scaled by `sqrt(3D / k)` and is
/// unrelated to the codeword geometry; decompression applies its plain
/// transpose, which is unbiased for inputs of random orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformCodec {
    projection: Matrix,
    slots: usize,
    latent_dim: usize,
}

impl UniformCodec {
    /// `None` unless the budget is a positive multiple of the slot count
    /// that fits in `3D` symbols per slot.
    pub fn new(cb: &Codebook, budget: u64) -> Option<Self> {
        let n = cb.slots() as u64;
        let wide = 3 * cb.latent_dim();
        if budget == 0 || !budget.is_multiple_of(n) || (budget / n) as usize > wide {
            return None;
        }
        let k = (budget / n) as usize;
        let mut rng = rng_from(derive_seed(cb.params().seed, &[stream::CODEBOOK, u64::MAX, budget]));
        let mut projection = orthonormal_rows(&mut rng, k, wide);
        projection.scale(libm::sqrt(wide as f64 / k as f64));
        Some(Self { projection, slots: cb.slots(), latent_dim: cb.latent_dim() })
    }

    pub fn symbols_per_slot(&self) -> usize {
        self.projection.rows()
    }

    pub fn budget(&self) -> usize {
        self.slots * self.symbols_per_slot()
    }

    /// `N x k` symbols.
    pub fn compress(&self, z: &Latents) -> Matrix {
        let d = self.latent_dim;
        let mut wide = vec![0.0; 3 * d];
        let mut out = Matrix::zeros(self.slots, self.symbols_per_slot());
        for i in 0..self.slots {
            wide[..d].copy_from_slice(z.obj.row(i));
            wide[d..2 * d].copy_from_slice(z.attr.row(i));
            wide[2 * d..].copy_from_slice(z.rel.row(i));
            self.projection.mul_vec(&wide, out.row_mut(i));
        }
        out
    }

    pub fn decompress(&self, x: &Matrix) -> Latents {
        let d = self.latent_dim;
        let mut wide = vec![0.0; 3 * d];
        let mut z = Latents::zeros(self.slots, d);
        for i in 0..self.slots {
            self.projection.mul_t_vec(x.row(i), &mut wide);
            z.obj.row_mut(i).copy_from_slice(&wide[..d]);
            z.attr.row_mut(i).copy_from_slice(&wide[d..2 * d]);
            z.rel.row_mut(i).copy_from_slice(&wide[2 * d..]);
        }
        z
    }
}
