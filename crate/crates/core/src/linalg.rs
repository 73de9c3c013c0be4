//! Dense complex matrix helpers over the 2^N atomic product basis.
//!
//! Basis convention: |g⟩ → 0, |e⟩ → 1 per atom, and the product-state index
//! is Σₙ bitₙ·2^(N−1−n), so atom 1 is the most significant bit
//! (|gg⟩ = 0, |ge⟩ = 1, |eg⟩ = 2, |ee⟩ = 3).
//!
//! Vectorization is column stacking, which is nalgebra's native storage order:
//! vec(A·X·B) = (Bᵀ ⊗ A)·vec(X).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest atom number handled by the dense superoperator (dim² ≤ 4096²).
pub const MAX_ATOMS: usize = 6;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn hilbert_dim(n_atoms: usize) -> usize {
    1usize << n_atoms
}

/// Whether `atom` (0-based) is excited in the product state `index`.
pub fn is_excited(index: usize, atom: usize, n_atoms: usize) -> bool {
    (index >> (n_atoms - 1 - atom)) & 1 == 1
}

pub fn excitation_number(index: usize) -> u32 {
    index.count_ones()
}

/// σ⁻ of `atom` (0-based) embedded in the N-atom product space.
pub fn lowering_operator(n_atoms: usize, atom: usize) -> CMatrix {
    let dim = hilbert_dim(n_atoms);
    let bit = 1usize << (n_atoms - 1 - atom);
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        if col & bit != 0 {
            m[(col & !bit, col)] = ONE;
        }
    }
    m
}

pub fn lowering_operators(n_atoms: usize) -> Vec<CMatrix> {
    (0..n_atoms).map(|n| lowering_operator(n_atoms, n)).collect()
}

pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = ONE;
    v
}

pub fn projector(state: &CVector) -> CMatrix {
    state * state.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

/// Column-stacking vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Largest entrywise |mᵢⱼ − m̄ⱼᵢ|.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Trace distance ½‖a − b‖₁ of two Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b)).iter().map(|x| x.abs()).sum::<f64>()
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_ordering_puts_atom_one_in_the_high_bit() {
        // σ₁⁻|eg⟩ = |gg⟩, σ₂⁻|ge⟩ = |gg⟩
        let s1 = lowering_operator(2, 0);
        let s2 = lowering_operator(2, 1);
        assert_eq!(s1[(0, 2)], ONE);
        assert_eq!(s1[(1, 3)], ONE);
        assert_eq!(s2[(0, 1)], ONE);
        assert_eq!(s2[(2, 3)], ONE);
        assert_eq!(s1.iter().filter(|z| z.norm() > 0.0).count(), 2);
        assert!(is_excited(2, 0, 2) && !is_excited(2, 1, 2));
    }

    #[test]
    fn lowering_operators_match_kronecker_products() {
        let sm = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        let id = CMatrix::identity(2, 2);
        let s1 = kron(&kron(&sm, &id), &id);
        let s3 = kron(&kron(&id, &id), &sm);
        assert_eq!(lowering_operator(3, 0), s1);
        assert_eq!(lowering_operator(3, 2), s3);
    }

    #[test]
    fn column_stacking_identity() {
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64 + 0.5));
        let x = CMatrix::from_fn(3, 3, |i, j| C64::new((i * j) as f64, 1.0 - i as f64));
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new(j as f64 - 1.0, (i + j) as f64));
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-12);
        assert_eq!(unvectorize(&vectorize(&x), 3), x);
    }
}
