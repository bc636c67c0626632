//! Dense complex linear algebra for small state spaces, plus the halting-triple
//! normed space used by measure-many quantum automata.
//!
//! Matrices follow the column-is-image convention throughout: column `j` of an
//! evolution operator is the image of basis state `j`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QfaError, Result};

/// Global numeric tolerance for unitarity, normalization, and probability checks.
pub const TOL: f64 = 1e-9;

pub type C = Complex64;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<C>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![C::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_rows_real(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C::new(v, 0.0);
            }
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QfaError::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QfaError::InvalidMachine(
                "matrix contains non-finite entries".into(),
            ));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn entries(&self) -> &[C] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    /// Max absolute entry of `self† self − I`.
    pub fn unitarity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let prod = self.dagger().matmul(self);
        let mut defect = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expected = if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) };
                defect = defect.max((prod[(i, j)] - expected).norm());
            }
        }
        defect
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Block-diagonal composition: `self ⊕ other`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    /// Conjugates by a permutation of basis states: entry (perm[i], perm[j]) = self[(i, j)].
    pub fn permute_basis(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut m = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(perm[i], perm[j])] = self[(i, j)];
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

/// Complex amplitude vector over a basis of inner states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amps: Vec<C>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        StateVector {
            amps: vec![C::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[index] = C::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn sub(&self, other: &Self) -> Self {
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        StateVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: C) -> Self {
        StateVector {
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Projection onto the span of a subset of basis states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub dim: usize,
    pub indices: Vec<usize>,
}

impl Projection {
    pub fn new(dim: usize, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Projection { dim, indices }
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.dim);
        for &i in &self.indices {
            out.amps[i] = v.amps[i];
        }
        out
    }
}

/// The three measurement projections of a measure-many machine, partitioning
/// the basis into accepting, rejecting, and non-halting states.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPartition {
    pub acc: Projection,
    pub rej: Projection,
    pub non: Projection,
}

impl MeasurementPartition {
    pub fn new(dim: usize, acc: Vec<usize>, rej: Vec<usize>) -> Self {
        let acc_p = Projection::new(dim, acc);
        let rej_p = Projection::new(dim, rej);
        let taken: std::collections::BTreeSet<usize> = acc_p
            .indices
            .iter()
            .chain(rej_p.indices.iter())
            .copied()
            .collect();
        let non: Vec<usize> = (0..dim).filter(|i| !taken.contains(i)).collect();
        MeasurementPartition {
            acc: acc_p,
            rej: rej_p,
            non: Projection::new(dim, non),
        }
    }
}

/// Element ψ = (|φ⟩, γ₁, γ₂) of the halting-triple space, carrying the residual
/// non-halting state and the accumulated acceptance/rejection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct HaltingTriple {
    pub phi: StateVector,
    pub gamma_acc: f64,
    pub gamma_rej: f64,
}

impl HaltingTriple {
    pub fn initial(dim: usize, q0: usize) -> Self {
        HaltingTriple {
            phi: StateVector::basis(dim, q0),
            gamma_acc: 0.0,
            gamma_rej: 0.0,
        }
    }

    pub fn from_state(phi: StateVector) -> Self {
        HaltingTriple {
            phi,
            gamma_acc: 0.0,
            gamma_rej: 0.0,
        }
    }

    /// Norm (‖φ‖² + |γ₁| + |γ₂|)^{1/2}.
    pub fn norm(&self) -> f64 {
        (self.phi.norm_sq() + self.gamma_acc.abs() + self.gamma_rej.abs()).sqrt()
    }

    /// Squared triple distance ‖ψ − ψ'‖² = ‖φ−φ'‖² + |γ₁−γ₁'| + |γ₂−γ₂'|.
    pub fn dist_sq(&self, other: &Self) -> f64 {
        self.phi.sub(&other.phi).norm_sq()
            + (self.gamma_acc - other.gamma_acc).abs()
            + (self.gamma_rej - other.gamma_rej).abs()
    }
}

/// Applies `m · v` under the column-is-image convention.
pub fn mat_apply(m: &ComplexMatrix, v: &StateVector) -> Result<StateVector> {
    if m.cols != v.dim() {
        return Err(QfaError::DimensionMismatch(format!(
            "matrix is {}x{}, vector has dim {}",
            m.rows,
            m.cols,
            v.dim()
        )));
    }
    let mut out = StateVector::zeros(m.rows);
    for j in 0..m.cols {
        let a = v.amps[j];
        if a == C::new(0.0, 0.0) {
            continue;
        }
        for i in 0..m.rows {
            out.amps[i] += m[(i, j)] * a;
        }
    }
    Ok(out)
}

/// One measured evolution step T_σ = P_non U_σ: applies the unitary, splits off
/// the halting amplitude, and returns the residual with the step probabilities.
pub fn transition_op(
    u: &ComplexMatrix,
    parts: &MeasurementPartition,
    v: &StateVector,
) -> Result<(StateVector, f64, f64)> {
    let defect = u.unitarity_defect();
    if defect > TOL {
        return Err(QfaError::NonUnitary {
            symbol: "<matrix>".into(),
            defect,
        });
    }
    let image = mat_apply(u, v)?;
    let p_acc = parts.acc.apply(&image).norm_sq();
    let p_rej = parts.rej.apply(&image).norm_sq();
    let residual = parts.non.apply(&image);
    Ok((residual, p_acc, p_rej))
}

/// Extended transition T̂_σ on halting triples: evolves the residual and
/// accumulates the halting probabilities of this step.
pub fn hat_t_apply(
    u: &ComplexMatrix,
    parts: &MeasurementPartition,
    psi: &HaltingTriple,
) -> Result<HaltingTriple> {
    let (residual, p_acc, p_rej) = transition_op(u, parts, &psi.phi)?;
    Ok(HaltingTriple {
        phi: residual,
        gamma_acc: psi.gamma_acc + p_acc,
        gamma_rej: psi.gamma_rej + p_rej,
    })
}

/// Same as [`hat_t_apply`] but skips the unitarity check; used by inner loops
/// on operators already validated at machine construction.
pub fn hat_t_apply_unchecked(
    u: &ComplexMatrix,
    parts: &MeasurementPartition,
    psi: &HaltingTriple,
) -> Result<HaltingTriple> {
    let image = mat_apply(u, &psi.phi)?;
    let p_acc = parts.acc.apply(&image).norm_sq();
    let p_rej = parts.rej.apply(&image).norm_sq();
    Ok(HaltingTriple {
        phi: parts.non.apply(&image),
        gamma_acc: psi.gamma_acc + p_acc,
        gamma_rej: psi.gamma_rej + p_rej,
    })
}

/// Haar-ish random unitary from QR orthonormalization of a complex Gaussian
/// matrix (modified Gram-Schmidt).
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<StateVector> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v = StateVector::zeros(dim);
        for a in v.amps.iter_mut() {
            *a = C::new(gaussian(rng), gaussian(rng));
        }
        for prev in &cols {
            let coeff = prev.inner(&v);
            v = v.sub(&prev.scale(coeff));
        }
        let n = v.norm();
        // Degenerate draws are measure zero; retry by perturbation if it happens.
        let v = if n < 1e-12 {
            let mut w = StateVector::zeros(dim);
            w.amps[cols.len()] = C::new(1.0, 0.0);
            w
        } else {
            v.scale(C::new(1.0 / n, 0.0))
        };
        cols.push(v);
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            m[(i, j)] = col.amps[i];
        }
    }
    m
}

/// Random unit vector supported on the given basis indices.
pub fn random_unit_vector<R: Rng>(dim: usize, support: &[usize], rng: &mut R) -> StateVector {
    let mut v = StateVector::zeros(dim);
    if support.is_empty() {
        return v;
    }
    loop {
        for &i in support {
            v.amps[i] = C::new(gaussian(rng), gaussian(rng));
        }
        let n = v.norm();
        if n > 1e-9 {
            return v.scale(C::new(1.0 / n, 0.0));
        }
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
