//! Direction frames for structured finite differencing, and the seed
//! plumbing that keeps every run replayable.
//!
//! A frame is a set of `count <= dim` orthonormal directions. Random frames
//! are drawn uniformly over the Stiefel manifold: QR-factor a standard
//! Gaussian matrix, then flip each column so the matching diagonal of `R` is
//! positive — without that sign fix the factorization is not unique and the
//! distribution silently stops being uniform.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, Matrix};

/// 64-bit seed wrapper; the only way the library constructs RNGs.
///
/// ChaCha8 is used throughout: it is counter-based, so streams are identical
/// across platforms and independent of call interleavings elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derive a child seed. The mix is SplitMix64 over the XOR of parent and
    /// salt — a fixed bijective scramble, so derived streams are stable
    /// across platforms and library versions.
    pub fn child(self, salt: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(salt)))
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// How a direction set was built; kept for reporting and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// Uniformly random orthonormal frame.
    Haar,
    /// Leading canonical basis vectors.
    Canonical,
}

/// An ordered set of orthonormal directions in `dim`-dimensional space.
///
/// Directions are stored row-contiguous so the finite-difference hot loop
/// walks memory linearly.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    dim: usize,
    dirs: Matrix, // count x dim, one direction per row
    kind: FrameKind,
}

impl DirectionSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.dirs.rows()
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    /// The `j`-th direction.
    pub fn direction(&self, j: usize) -> &[f64] {
        self.dirs.row(j)
    }

    /// Largest deviation of the Gram matrix from the identity; a cheap
    /// orthonormality certificate for tests and the verification suite.
    pub fn gram_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.count() {
            for j in i..self.count() {
                let g = crate::linalg::dot(self.direction(i), self.direction(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

fn check_frame_shape(dim: usize, count: usize) -> Result<()> {
    if count == 0 || count > dim {
        return Err(Error::InvalidArgument(format!(
            "frame needs 1 <= count <= dim, got count={count}, dim={dim}"
        )));
    }
    Ok(())
}

/// Draw `count` orthonormal directions uniformly at random.
///
/// Cost is one `dim x count` Gaussian draw plus a thin QR, O(dim * count^2).
/// A Gaussian matrix is almost surely full rank; the degenerate-input error
/// from QR is propagated on the astronomically unlikely complement.
pub fn sample_haar_frame(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<DirectionSet> {
    check_frame_shape(dim, count)?;
    let g = Matrix::from_fn(dim, count, |_, _| rng.sample(StandardNormal));
    let (mut q, r) = householder_qr(&g)?;
    for j in 0..count {
        // sign(0) counts as +1: only strictly negative diagonals flip.
        if r[(j, j)] < 0.0 {
            q.scale_col(j, -1.0);
        }
    }
    Ok(DirectionSet { dim, dirs: q.transpose(), kind: FrameKind::Haar })
}

/// The first `count` canonical basis vectors, in order.
pub fn canonical_frame(dim: usize, count: usize) -> Result<DirectionSet> {
    check_frame_shape(dim, count)?;
    let dirs = Matrix::from_fn(count, dim, |i, j| if i == j { 1.0 } else { 0.0 });
    Ok(DirectionSet { dim, dirs, kind: FrameKind::Canonical })
}

/// A single uniform unit vector (the `count = 1` frame, without QR overhead).
pub fn sample_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::linalg::norm2(&v);
        if n > 1e-150 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
