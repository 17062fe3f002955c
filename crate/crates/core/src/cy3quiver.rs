//! Quivers of homomorphism algebras and rolled-up helix algebras.
//!
//! Arrow counts of the rolled-up algebra come from the skew matrix
//! `b_ij = χ(F_i, F_j) - χ(F_j, F_i)` on the dual of the base thread, with
//! `n_ij = max(b_ij, 0)` arrows from `i` to `j`. With this orientation the
//! ruling-basis quadric helix has its four back arrows ending at `O`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::excol::{chi, hom_profile, Collection, ExcError, Side};
use crate::helix::{tilt, Helix, HelixError};
use crate::klattice::LatticeError;
use crate::scalar::{self, Overflow, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error(transparent)]
    Helix(#[from] HelixError),
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("collection is not strong at ({0}, {1})")]
    NotStrong(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

impl From<ExcError> for QuiverError {
    fn from(e: ExcError) -> Self {
        QuiverError::Helix(e.into())
    }
}

impl From<LatticeError> for QuiverError {
    fn from(e: LatticeError) -> Self {
        QuiverError::Helix(e.into())
    }
}

/// Skew-symmetric exchange matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", try_from = "BMatrixRepr<T>")]
pub struct BMatrix<T: Scalar> {
    n: usize,
    b: Vec<Vec<T>>,
}

#[derive(Deserialize)]
#[serde(bound = "T: Scalar")]
struct BMatrixRepr<T: Scalar> {
    n: usize,
    b: Vec<Vec<T>>,
}

impl<T: Scalar> TryFrom<BMatrixRepr<T>> for BMatrix<T> {
    type Error = QuiverError;

    fn try_from(r: BMatrixRepr<T>) -> Result<Self, Self::Error> {
        if r.b.len() != r.n {
            return Err(QuiverError::NotSquare);
        }
        BMatrix::new(r.b)
    }
}

impl<T: Scalar> BMatrix<T> {
    pub fn new(b: Vec<Vec<T>>) -> Result<Self, QuiverError> {
        let n = b.len();
        if b.iter().any(|row| row.len() != n) {
            return Err(QuiverError::NotSquare);
        }
        for i in 0..n {
            for j in i..n {
                if b[i][j] != -b[j][i] {
                    return Err(QuiverError::NotSkew(i, j));
                }
            }
        }
        Ok(BMatrix { n, b })
    }

    pub fn zero(n: usize) -> Self {
        BMatrix { n, b: vec![vec![T::zero(); n]; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.b
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.b[i][j]
    }

    /// `b'[psi[i]][psi[j]] = b[i][j]`.
    pub fn permuted(&self, psi: &[usize]) -> Self {
        let mut out = vec![vec![T::zero(); self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[psi[i]][psi[j]] = self.b[i][j];
            }
        }
        BMatrix { n: self.n, b: out }
    }
}

/// Arrow multiplicities with per-vertex labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Quiver<T: Scalar> {
    pub vertices: Vec<String>,
    pub arrows: Vec<Vec<T>>,
}

impl<T: Scalar> Quiver<T> {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n()).any(|i| !self.arrows[i][i].is_zero())
    }

    pub fn has_two_cycles(&self) -> bool {
        let n = self.n();
        (0..n).any(|i| {
            (i + 1..n).any(|j| !self.arrows[i][j].is_zero() && !self.arrows[j][i].is_zero())
        })
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for (i, label) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  {i} [label=\"{i}: {}\"];", label.replace('"', "'"));
        }
        for (i, row) in self.arrows.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                if !m.is_zero() {
                    let _ = writeln!(out, "  {i} -> {j} [label={m}];");
                }
            }
        }
        out.push('}');
        out.push('\n');
        out
    }
}

/// Quiver of the homomorphism algebra of a full strong collection:
/// `dim Hom¹(F_j, F_i)` arrows from `i` to `j`.
pub fn thread_quiver<T: Scalar>(c: &Collection<T>) -> Result<Quiver<T>, QuiverError> {
    if let Some((i, j)) = c.first_non_strong_pair() {
        return Err(QuiverError::NotStrong(i, j));
    }
    let s = c.surface();
    let duals = c.dual_objects()?;
    let n = c.len();
    let mut arrows = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            arrows[i][j] = hom_profile(&s, &duals[j], &duals[i])?.dim_in(1);
        }
    }
    Ok(Quiver { vertices: c.labels(), arrows })
}

/// Skew Euler matrix of the rolled-up helix algebra on the base thread.
pub fn rolled_b_matrix<T: Scalar>(h: &Helix<T>) -> Result<BMatrix<T>, QuiverError> {
    h.require_geometric()?;
    skew_euler_matrix(h.thread())
}

/// `χ(F_i, F_j) - χ(F_j, F_i)` over the duals of any full collection.
pub fn skew_euler_matrix<T: Scalar>(c: &Collection<T>) -> Result<BMatrix<T>, QuiverError> {
    let s = c.surface();
    let duals = c.dual_objects()?;
    let n = duals.len();
    let mut b = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                b[i][j] = scalar::sub(chi(&s, &duals[i], &duals[j])?, chi(&s, &duals[j], &duals[i])?)?;
            }
        }
    }
    BMatrix::new(b)
}

/// `n_ij = max(b_ij, 0)`.
pub fn rolled_quiver<T: Scalar>(b: &BMatrix<T>) -> Quiver<T> {
    Quiver {
        vertices: (0..b.n()).map(|i| i.to_string()).collect(),
        arrows: b
            .rows()
            .iter()
            .map(|row| row.iter().map(|&x| x.max(T::zero())).collect())
            .collect(),
    }
}

/// Rolled-up quiver of a geometric helix with object labels.
pub fn helix_quiver<T: Scalar>(h: &Helix<T>) -> Result<Quiver<T>, QuiverError> {
    let b = rolled_b_matrix(h)?;
    let mut q = rolled_quiver(&b);
    q.vertices = h.thread().labels();
    if q.has_loops() || q.has_two_cycles() {
        return Err(QuiverError::Helix(HelixError::Invariant(format!(
            "rolled-up quiver of {} has a loop or a 2-cycle",
            h.thread()
        ))));
    }
    Ok(q)
}

/// Matrix mutation at `k`.
pub fn fz_mutate<T: Scalar>(b: &BMatrix<T>, k: usize) -> Result<BMatrix<T>, QuiverError> {
    let n = b.n();
    if k >= n {
        return Err(QuiverError::VertexOutOfRange { vertex: k, n });
    }
    let m = b.rows();
    let mut out = m.to_vec();
    for j in 0..n {
        for l in 0..n {
            out[j][l] = if j == k || l == k {
                scalar::neg(m[j][l])?
            } else if scalar::mul(m[k][j], m[k][l])? <= T::zero() {
                scalar::add(m[j][l], scalar::mul(m[k][j].abs(), m[k][l])?)?
            } else {
                m[j][l]
            };
        }
    }
    Ok(BMatrix { n, b: out })
}

/// Base change on simple classes for the tilt at `i`: `U_i = -S_i`,
/// `U_j = S_j + max(b_ji, 0) S_i`. Row `j` holds the coordinates of `U_j`.
pub fn tilted_simple_classes<T: Scalar>(
    b: &BMatrix<T>,
    i: usize,
) -> Result<Vec<Vec<T>>, QuiverError> {
    let n = b.n();
    if i >= n {
        return Err(QuiverError::VertexOutOfRange { vertex: i, n });
    }
    let mut t = vec![vec![T::zero(); n]; n];
    for (j, row) in t.iter_mut().enumerate() {
        if j == i {
            row[i] = -T::one();
        } else {
            row[j] = T::one();
            row[i] = b.get(j, i).max(T::zero());
        }
    }
    Ok(t)
}

/// `T · B · Tᵀ`.
pub fn conjugate<T: Scalar>(t: &[Vec<T>], b: &BMatrix<T>) -> Result<Vec<Vec<T>>, QuiverError> {
    let tb = mat_mul(t, b.rows())?;
    let tt = transpose(t);
    mat_mul(&tb, &tt)
}

pub fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Result<Vec<Vec<T>>, QuiverError> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![T::zero(); m]; n];
    for i in 0..n {
        for j in 0..m {
            let col: Vec<T> = b.iter().map(|row| row[j]).collect();
            out[i][j] = scalar::dot(&a[i], &col)?;
        }
    }
    Ok(out)
}

fn transpose<T: Scalar>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Comparison of a helix tilt with matrix mutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CrossCheckReport<T: Scalar> {
    pub vertex: usize,
    pub matches: bool,
    /// `rolled_b_matrix` of the tilted helix.
    pub tilted: BMatrix<T>,
    /// `fz_mutate` of the original matrix at `vertex`.
    pub mutated: BMatrix<T>,
    /// Vertex `v` of the original corresponds to vertex `psi[v]` of the tilted helix.
    pub psi: Vec<usize>,
    #[serde(skip)]
    pub helix: Option<Helix<T>>,
}

impl<T: Scalar> CrossCheckReport<T> {
    pub fn verdict(&self) -> &'static str {
        if self.matches {
            "match"
        } else {
            "mismatch"
        }
    }
}

/// Tilts at `vertex` and compares the new skew matrix with the mutated old one under `ψ`.
pub fn cross_check_tilt<T: Scalar>(
    h: &Helix<T>,
    vertex: usize,
    direction: Side,
) -> Result<CrossCheckReport<T>, QuiverError> {
    let b = rolled_b_matrix(h)?;
    let mutated = fz_mutate(&b, vertex)?;
    let out = tilt(h, vertex, direction)?;
    let tilted = rolled_b_matrix(&out.helix)?;
    let matches = mutated.permuted(&out.psi) == tilted;
    Ok(CrossCheckReport { vertex, matches, tilted, mutated, psi: out.psi, helix: Some(out.helix) })
}
