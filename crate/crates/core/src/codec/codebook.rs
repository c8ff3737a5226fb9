use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::linalg::{coherence, dot, norm, orthonormal_rows, pack_lines, Matrix};
use crate::graph::Vocabulary;
use crate::rng::{derive_seed, rng_from, stream};
use crate::{CHANNEL_DIM, LATENT_DIM, SLOTS};

/// Upper bound on pairwise |inner product| within a codeword family.
pub const MAX_COHERENCE: f64 = 0.5;
/// Upper bound on `|<decompress(compress(c)), c> - 1|` for every codeword.
pub const DISTORTION_BOUND: f64 = 0.35;
pub const NORM_TOLERANCE: f64 = 1e-9;
pub const PROJECTION_TOLERANCE: f64 = 1e-6;

/// Coherence the generator aims for before settling for `MAX_COHERENCE`.
const PACKING_TARGET: f64 = 0.4;
const PACKING_ITERATIONS: usize = 600;
const GENERATION_ATTEMPTS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookParams {
    pub latent_dim: usize,
    pub channel_dim: usize,
    pub slots: usize,
    pub seed: u64,
}

impl Default for CodebookParams {
    fn default() -> Self {
        Self { latent_dim: LATENT_DIM, channel_dim: CHANNEL_DIM, slots: SLOTS, seed: 0 }
    }
}

impl CodebookParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn check(&self) -> Result<(), CodebookError> {
        let (d, dc) = (self.latent_dim, self.channel_dim);
        if d == 0 || d % 4 != 0 {
            return Err(CodebookError::Geometry("latent_dim must be a positive multiple of 4"));
        }
        if dc == 0 || dc % 4 != 0 || dc > d {
            return Err(CodebookError::Geometry(
                "channel_dim must be a positive multiple of 4 no larger than latent_dim",
            ));
        }
        if self.slots == 0 {
            return Err(CodebookError::Geometry("slots must be positive"));
        }
        Ok(())
    }
}

/// Codeword family sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySizes {
    pub entities: usize,
    pub attributes: usize,
    pub predicates: usize,
}

impl FamilySizes {
    pub fn of(vocab: &Vocabulary) -> Self {
        Self {
            entities: vocab.entity_count(),
            attributes: vocab.attribute_count(),
            predicates: vocab.predicate_count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Entity,
    Attribute,
    Predicate,
    Pair,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Entity => "entity",
            Family::Attribute => "attribute",
            Family::Predicate => "predicate",
            Family::Pair => "pair",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodebookError {
    Geometry(&'static str),
    Shape { what: &'static str, expected: (usize, usize), found: (usize, usize) },
    Norm { family: Family, index: usize, norm: f64 },
    Coherence { family: Family, value: f64 },
    Projection { deviation: f64 },
    Distortion { family: Family, index: usize, value: f64 },
    Packing { family: Family },
}

impl fmt::Display for CodebookError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodebookError::Geometry(msg) => f.write_str(msg),
            CodebookError::Shape { what, expected, found } => {
                write!(f, "{what} has shape {found:?}, expected {expected:?}")
            }
            CodebookError::Norm { family, index, norm } => {
                write!(f, "{} codeword {index} has norm {norm}", family.name())
            }
            CodebookError::Coherence { family, value } => {
                write!(f, "{} family coherence {value} exceeds {MAX_COHERENCE}", family.name())
            }
            CodebookError::Projection { deviation } => {
                write!(f, "projection rows deviate from scaled orthonormality by {deviation}")
            }
            CodebookError::Distortion { family, index, value } => write!(
                f,
                "{} codeword {index} loses {value} of its correlation through the projection",
                family.name()
            ),
            CodebookError::Packing { family } => {
                write!(f, "could not pack the {} family below coherence {MAX_COHERENCE}", family.name())
            }
        }
    }
}

/// Shape mismatch between a block and the codebook geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeError {
    pub expected: (usize, usize),
    pub found: (usize, usize),
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "shape {:?} does not match expected {:?}", self.found, self.expected)
    }
}

/// Unit-norm codewords for every category family plus the `D_c x D`
/// projection that maps a latent slot to channel symbols.
///
/// The projection is block-diagonal over the relation row layout
/// `[subject | object | predicate]` = `[D/4 | D/4 | D/2]`, with the same block
/// for subject and object. Every codeword lies in the projection's row space,
/// so compress-then-decompress returns it unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    params: CodebookParams,
    entity: Matrix,
    attribute: Matrix,
    predicate: Matrix,
    pair: Matrix,
    projection: Matrix,
}

impl Codebook {
    pub fn for_vocabulary(params: CodebookParams, vocab: &Vocabulary) -> Result<Self, CodebookError> {
        Self::generate(params, FamilySizes::of(vocab))
    }

    /// Deterministic construction from `params.seed`. Packing that misses the
    /// coherence bound is retried from derived seeds.
    pub fn generate(params: CodebookParams, sizes: FamilySizes) -> Result<Self, CodebookError> {
        params.check()?;
        let mut last = CodebookError::Packing { family: Family::Entity };
        for attempt in 0..GENERATION_ATTEMPTS {
            match Self::try_generate(params, sizes, attempt) {
                Ok(cb) => return Ok(cb),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn try_generate(params: CodebookParams, sizes: FamilySizes, attempt: u64) -> Result<Self, CodebookError> {
        let (d, dc, n) = (params.latent_dim, params.channel_dim, params.slots);
        let mut rng = rng_from(derive_seed(params.seed, &[stream::CODEBOOK, attempt]));
        let pair_basis = orthonormal_rows(&mut rng, dc / 4, d / 4);
        let pred_basis = orthonormal_rows(&mut rng, dc / 2, d / 2);

        let mut q = Matrix::zeros(dc, d);
        for r in 0..dc / 4 {
            q.row_mut(r)[..d / 4].copy_from_slice(pair_basis.row(r));
            q.row_mut(dc / 4 + r)[d / 4..d / 2].copy_from_slice(pair_basis.row(r));
        }
        for r in 0..dc / 2 {
            q.row_mut(dc / 2 + r)[d / 2..].copy_from_slice(pred_basis.row(r));
        }

        let mut pack = |family: Family, count: usize, dim: usize| {
            let (m, coh) = pack_lines(&mut rng, count, dim, PACKING_TARGET, PACKING_ITERATIONS);
            if coh > MAX_COHERENCE {
                Err(CodebookError::Packing { family })
            } else {
                Ok(m)
            }
        };
        let ent_c = pack(Family::Entity, sizes.entities, dc)?;
        let attr_c = pack(Family::Attribute, sizes.attributes, dc)?;
        let pred_c = pack(Family::Predicate, sizes.predicates, dc / 2)?;
        let pair_c = pack(Family::Pair, n, dc / 4)?;

        let lift = |coords: &Matrix, basis: &Matrix| {
            let mut out = Matrix::zeros(coords.rows(), basis.cols());
            for i in 0..coords.rows() {
                basis.mul_t_vec(coords.row(i), out.row_mut(i));
            }
            out
        };
        let mut projection = q.clone();
        projection.scale(libm::sqrt(d as f64 / dc as f64));
        Self::from_parts(
            params,
            lift(&ent_c, &q),
            lift(&attr_c, &q),
            lift(&pred_c, &pred_basis),
            lift(&pair_c, &pair_basis),
            projection,
        )
    }

    /// Assembles a codebook from stored matrices and checks every invariant:
    /// shapes, unit norms, per-family coherence, scaled orthonormality of
    /// the projection and per-codeword projection distortion.
    pub fn from_parts(
        params: CodebookParams,
        entity: Matrix,
        attribute: Matrix,
        predicate: Matrix,
        pair: Matrix,
        projection: Matrix,
    ) -> Result<Self, CodebookError> {
        params.check()?;
        let (d, dc, n) = (params.latent_dim, params.channel_dim, params.slots);
        let shape = |what, m: &Matrix, rows: usize, cols: usize| {
            if m.cols() != cols || (rows != usize::MAX && m.rows() != rows) || m.rows() == 0 {
                Err(CodebookError::Shape { what, expected: (rows, cols), found: m.shape() })
            } else {
                Ok(())
            }
        };
        shape("entity codewords", &entity, usize::MAX, d)?;
        shape("attribute codewords", &attribute, usize::MAX, d)?;
        shape("predicate codewords", &predicate, usize::MAX, d / 2)?;
        shape("pair codes", &pair, n, d / 4)?;
        shape("projection", &projection, dc, d)?;

        for (family, m) in [
            (Family::Entity, &entity),
            (Family::Attribute, &attribute),
            (Family::Predicate, &predicate),
            (Family::Pair, &pair),
        ] {
            for i in 0..m.rows() {
                let nrm = norm(m.row(i));
                if (nrm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(CodebookError::Norm { family, index: i, norm: nrm });
                }
            }
            let c = coherence(m);
            if c > MAX_COHERENCE {
                return Err(CodebookError::Coherence { family, value: c });
            }
        }

        let scale = d as f64 / dc as f64;
        let mut deviation: f64 = 0.0;
        for i in 0..dc {
            for j in 0..dc {
                let want = if i == j { scale } else { 0.0 };
                deviation = deviation.max((dot(projection.row(i), projection.row(j)) - want).abs());
            }
        }
        if deviation > PROJECTION_TOLERANCE {
            return Err(CodebookError::Projection { deviation });
        }

        let cb = Self { params, entity, attribute, predicate, pair, projection };
        for (family, index, value) in cb.codeword_retention() {
            if (value - 1.0).abs() > DISTORTION_BOUND {
                return Err(CodebookError::Distortion { family, index, value });
            }
        }
        Ok(cb)
    }

    /// `<decompress(compress(c)), c>` for every codeword embedded in its latent
    /// position. Pair codes are checked in both the subject and the object
    /// position.
    pub fn codeword_retention(&self) -> Vec<(Family, usize, f64)> {
        let d = self.params.latent_dim;
        let mut out = Vec::new();
        let mut latent = vec![0.0; d];
        let mut symbols = vec![0.0; self.params.channel_dim];
        let mut back = vec![0.0; d];
        let mut probe = |family, index, offset: usize, cw: &[f64], out: &mut Vec<_>| {
            latent.iter_mut().for_each(|v| *v = 0.0);
            latent[offset..offset + cw.len()].copy_from_slice(cw);
            self.compress_row(&latent, &mut symbols);
            self.decompress_row(&symbols, &mut back);
            out.push((family, index, dot(&back, &latent)));
        };
        for i in 0..self.entity.rows() {
            probe(Family::Entity, i, 0, self.entity.row(i), &mut out);
        }
        for i in 0..self.attribute.rows() {
            probe(Family::Attribute, i, 0, self.attribute.row(i), &mut out);
        }
        for i in 0..self.predicate.rows() {
            probe(Family::Predicate, i, d / 2, self.predicate.row(i), &mut out);
        }
        for i in 0..self.pair.rows() {
            probe(Family::Pair, i, 0, self.pair.row(i), &mut out);
            probe(Family::Pair, i, d / 4, self.pair.row(i), &mut out);
        }
        out
    }

    pub fn params(&self) -> &CodebookParams {
        &self.params
    }

    pub fn latent_dim(&self) -> usize {
        self.params.latent_dim
    }

    pub fn channel_dim(&self) -> usize {
        self.params.channel_dim
    }

    pub fn slots(&self) -> usize {
        self.params.slots
    }

    pub fn sizes(&self) -> FamilySizes {
        FamilySizes {
            entities: self.entity.rows(),
            attributes: self.attribute.rows(),
            predicates: self.predicate.rows(),
        }
    }

    pub fn entity_codewords(&self) -> &Matrix {
        &self.entity
    }

    pub fn attribute_codewords(&self) -> &Matrix {
        &self.attribute
    }

    /// Predicate codewords in `R^(D/2)`.
    pub fn predicate_codewords(&self) -> &Matrix {
        &self.predicate
    }

    /// Slot position codes in `R^(D/4)`.
    pub fn pair_codes(&self) -> &Matrix {
        &self.pair
    }

    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    /// Symbols for one latent row: `projection * z`.
    pub fn compress_row(&self, z: &[f64], out: &mut [f64]) {
        self.projection.mul_vec(z, out);
    }

    /// Latent estimate for one symbol row: `projection^T * x * D_c / D`.
    pub fn decompress_row(&self, x: &[f64], out: &mut [f64]) {
        self.projection.mul_t_vec(x, out);
        let s = self.params.channel_dim as f64 / self.params.latent_dim as f64;
        out.iter_mut().for_each(|v| *v *= s);
    }

    pub fn compress(&self, z: &Matrix) -> Result<Matrix, ShapeError> {
        let expected = (self.slots(), self.latent_dim());
        if z.shape() != expected {
            return Err(ShapeError { expected, found: z.shape() });
        }
        let mut x = Matrix::zeros(self.slots(), self.channel_dim());
        for i in 0..self.slots() {
            self.compress_row(z.row(i), x.row_mut(i));
        }
        Ok(x)
    }

    pub fn decompress(&self, x: &Matrix) -> Result<Matrix, ShapeError> {
        let expected = (self.slots(), self.channel_dim());
        if x.shape() != expected {
            return Err(ShapeError { expected, found: x.shape() });
        }
        let mut z = Matrix::zeros(self.slots(), self.latent_dim());
        for i in 0..self.slots() {
            self.decompress_row(x.row(i), z.row_mut(i));
        }
        Ok(z)
    }

    /// Unit-norm relation latent `[pair(s) | pair(o) | predicate(p)] / sqrt(3)`.
    pub fn relation_codeword(&self, subject: usize, object: usize, predicate: usize) -> Vec<f64> {
        let d = self.latent_dim();
        let k = 1.0 / libm::sqrt(3.0);
        let mut row = vec![0.0; d];
        for (dst, src) in row[..d / 4].iter_mut().zip(self.pair.row(subject)) {
            *dst = k * src;
        }
        for (dst, src) in row[d / 4..d / 2].iter_mut().zip(self.pair.row(object)) {
            *dst = k * src;
        }
        for (dst, src) in row[d / 2..].iter_mut().zip(self.predicate.row(predicate)) {
            *dst = k * src;
        }
        row
    }
}
