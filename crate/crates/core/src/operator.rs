//! Dense complex operators and Hermitian eigendecomposition.
//!
//! Basis conventions used throughout the crate:
//! - spin: (|down>, |up>) = (0, 1)
//! - Fock: (|0>, |1>, ..., |n_max - 1>)
//! - composite spaces: `left ⊗ right`, left factor varies slowest.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance below which an operator counts as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Relative energy window inside which eigenvalues are treated as degenerate.
const DEGENERACY_TOLERANCE: f64 = 1e-12;

pub type C64 = Complex64;

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Square complex matrix acting on a finite Hilbert space (units with ħ = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::Validation("operator dimension must be positive".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            matrix: DMatrix::from_fn(dim, dim, f),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| C64::new(0.0, 0.0))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, |i, j| if i == j { c(entries[i]) } else { c(0.0) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest entry of `|A - A^dag|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() < HERMITIAN_TOLERANCE
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to another operator of equal dimension.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            matrix: &self.matrix * factor,
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(c(rhs))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(c(-1.0))
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a
/// Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn vector(&self, n: usize) -> DVector<C64> {
        self.vectors.column(n).into_owned()
    }

    /// `V^dag op V`: the operator expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, op: &Operator) -> DMatrix<C64> {
        self.vectors.adjoint() * op.matrix() * &self.vectors
    }

    /// `V diag(E) V^dag`.
    pub fn reconstruct(&self) -> Operator {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| c(e)),
        ));
        Operator {
            matrix: &self.vectors * d * self.vectors.adjoint(),
        }
    }

    /// Largest entry of `|V^dag V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - c(target)).norm());
            }
        }
        worst
    }
}

/// Diagonalise a Hermitian operator.
///
/// Eigenvalues come back ascending. Within a degenerate cluster the basis is
/// canonicalised (Gram-Schmidt on the projected standard basis, in index
/// order) so the result does not depend on the solver's arbitrary choice.
/// Every eigenvector has its largest-magnitude component real and positive.
pub fn hermitian_eigendecompose(h: &Operator) -> Result<EigenSystem> {
    let deviation = h.hermiticity_error();
    if deviation >= HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.dim();
    let symmetric = (h.matrix() + h.matrix().adjoint()) * c(0.5);
    let eig = SymmetricEigen::try_new(symmetric, f64::EPSILON, 0)
        .ok_or(Error::Decomposition("Hermitian eigensolver did not converge"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut energies: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);

    let scale = energies
        .iter()
        .fold(1.0_f64, |acc, e| acc.max(e.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && energies[end] - energies[end - 1] <= DEGENERACY_TOLERANCE * scale {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_cluster(&mut vectors, &mut energies, start, end);
        }
        start = end;
    }

    for k in 0..n {
        fix_phase(&mut vectors, k);
    }
    Ok(EigenSystem { energies, vectors })
}

/// Replace columns `start..end` by a canonical orthonormal basis of the same
/// span, ordered by the index of the basis vector that seeded each column.
fn canonicalize_cluster(
    vectors: &mut DMatrix<C64>,
    energies: &mut [f64],
    start: usize,
    end: usize,
) {
    let n = vectors.nrows();
    let k = end - start;
    let block = vectors.columns(start, k).into_owned();
    let projector = &block * block.adjoint();
    let mean = energies[start..end].iter().sum::<f64>() / k as f64;

    let mut chosen: Vec<DVector<C64>> = Vec::with_capacity(k);
    for threshold in [1e-3, 1e-12] {
        for i in 0..n {
            if chosen.len() == k {
                break;
            }
            let mut w = projector.column(i).into_owned();
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for q in &chosen {
                    let overlap = q.dotc(&w);
                    w -= q * overlap;
                }
            }
            let norm = w.norm();
            if norm > threshold {
                chosen.push(w / c(norm));
            }
        }
    }
    debug_assert_eq!(chosen.len(), k);
    for (offset, q) in chosen.iter().enumerate() {
        vectors.set_column(start + offset, q);
        energies[start + offset] = mean;
    }
}

fn fix_phase(vectors: &mut DMatrix<C64>, k: usize) {
    let col = vectors.column(k);
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = col
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .unwrap_or(0);
    let z = col[pivot];
    if z.norm() == 0.0 {
        return;
    }
    let phase = z.conj() / z.norm();
    let mut col = vectors.column_mut(k);
    col *= phase;
    col[pivot] = c(col[pivot].norm());
}

/// Kronecker product `a ⊗ b`; `a`'s index varies slowest.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    Operator {
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

/// Spin lowering operator `|down><up|` in the (|down>, |up>) basis.
pub fn pauli_lowering() -> Operator {
    Operator::from_fn(2, |i, j| if i == 0 && j == 1 { c(1.0) } else { c(0.0) })
}

/// Truncated annihilation operator on `|0>, ..., |n_max - 1>`.
///
/// `a|n> = sqrt(n)|n-1>`. Truncation makes `[a, a^dag]` equal the identity
/// everywhere except the last diagonal entry, which is `-(n_max - 1)`
/// instead of 1.
pub fn boson_annihilation(n_max: usize) -> Result<Operator> {
    if n_max < 2 {
        return Err(Error::Validation(format!(
            "Fock space dimension n_max must be at least 2, got {n_max}"
        )));
    }
    Ok(Operator::from_fn(n_max, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt())
        } else {
            c(0.0)
        }
    }))
}

/// `<phi_m| op |phi_m'>` in the eigenbasis of `es`.
pub fn matrix_element(es: &EigenSystem, op: &Operator, m: usize, m_prime: usize) -> Result<C64> {
    let dim = es.dim();
    if op.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: op.dim(),
        });
    }
    if m >= dim || m_prime >= dim {
        return Err(Error::IndexOutOfRange {
            row: m,
            col: m_prime,
            dim,
        });
    }
    let bra = es.vectors.column(m);
    let ket = op.matrix() * es.vectors.column(m_prime);
    Ok(bra.dotc(&ket))
}
