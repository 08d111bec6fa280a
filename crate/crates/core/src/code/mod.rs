//! Stabilizer codes in binary symplectic form.
//!
//! A [`StabilizerCode`] stores an `m × 2n` parity-check matrix whose columns
//! `[0, n)` are X components and `[n, 2n)` are Z components. [`CssCode`] keeps
//! the two blocks apart and converts with X rows first, then Z rows.

mod catalog;
mod families;
mod parse;

pub use catalog::{catalog, resolve, CatalogEntry, Construction};
pub use families::{bb_code, gb_code, hgp, steane, steane_css, surface_code};
pub use parse::{emit_bsf, emit_css, parse_bsf, parse_code_text, parse_css};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Single-qubit Pauli component of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Option<Pauli> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Pauli::X),
            (true, true) => Some(Pauli::Y),
            (false, true) => Some(Pauli::Z),
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// True if the two single-qubit Paulis anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        self != other
    }

    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

/// A stabilizer code given by `m` commuting checks on `n` data qubits.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    name: String,
    n: usize,
    h: BitMatrix,
}

impl StabilizerCode {
    /// Validates commutation and non-identity rows. A code with no checks is allowed here;
    /// the text parsers reject it.
    pub fn new(name: impl Into<String>, h: BitMatrix) -> Result<Self> {
        if h.cols() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "symplectic matrix needs an even column count, got {}",
                h.cols()
            )));
        }
        let code = Self { name: name.into(), n: h.cols() / 2, h };
        for i in 0..code.m() {
            if code.h.row_weight(i) == 0 {
                return Err(Error::ZeroRow(i));
            }
        }
        for i in 0..code.m() {
            for j in i + 1..code.m() {
                if code.symplectic_product(i, j) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        Ok(code)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of data qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks.
    pub fn m(&self) -> usize {
        self.h.rows()
    }

    /// The `m × 2n` matrix.
    pub fn matrix(&self) -> &BitMatrix {
        &self.h
    }

    pub fn x_bit(&self, check: usize, qubit: usize) -> bool {
        self.h.get(check, qubit)
    }

    pub fn z_bit(&self, check: usize, qubit: usize) -> bool {
        self.h.get(check, qubit + self.n)
    }

    pub fn pauli_at(&self, check: usize, qubit: usize) -> Option<Pauli> {
        Pauli::from_bits(self.x_bit(check, qubit), self.z_bit(check, qubit))
    }

    /// `(qubit, pauli)` for every qubit the check acts on, ascending by qubit.
    pub fn check_support(&self, check: usize) -> Vec<(usize, Pauli)> {
        (0..self.n)
            .filter_map(|q| self.pauli_at(check, q).map(|p| (q, p)))
            .collect()
    }

    pub fn check_weight(&self, check: usize) -> usize {
        (0..self.n).filter(|&q| self.pauli_at(check, q).is_some()).count()
    }

    /// Qubits where the two checks anticommute locally (x_i z_j ⊕ z_i x_j = 1).
    pub fn anticommuting_qubits(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| {
                (self.x_bit(a, q) & self.z_bit(b, q)) ^ (self.z_bit(a, q) & self.x_bit(b, q))
            })
            .collect()
    }

    /// Symplectic product of two rows; `true` means they anticommute.
    pub fn symplectic_product(&self, a: usize, b: usize) -> bool {
        self.anticommuting_qubits(a, b).len() % 2 == 1
    }

    /// Syndrome bit of check `check` for a single-qubit Pauli error.
    pub fn syndrome_bit(&self, check: usize, qubit: usize, error: Pauli) -> bool {
        match self.pauli_at(check, qubit) {
            Some(p) => p.anticommutes(error),
            None => false,
        }
    }

    pub fn is_css(&self) -> bool {
        (0..self.m()).all(|i| {
            let support = self.check_support(i);
            support.iter().all(|&(_, p)| p == Pauli::X) || support.iter().all(|&(_, p)| p == Pauli::Z)
        })
    }

    /// Splits a CSS code back into its X and Z blocks; rows keep their relative order.
    pub fn to_css(&self) -> Result<CssCode> {
        if !self.is_css() {
            return Err(Error::InvalidParameter(format!(
                "code {} has mixed X/Z checks and is not CSS",
                self.name
            )));
        }
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for i in 0..self.m() {
            let row = self.h.row(i);
            let x = BitVector::from_support(self.n, &(0..self.n).filter(|&q| row.get(q)).collect::<Vec<_>>());
            if x.is_zero() {
                let z = BitVector::from_support(
                    self.n,
                    &(0..self.n).filter(|&q| row.get(q + self.n)).collect::<Vec<_>>(),
                );
                zs.push(z);
            } else {
                xs.push(x);
            }
        }
        CssCode::new(
            self.name.clone(),
            BitMatrix::from_rows(self.n, &xs),
            BitMatrix::from_rows(self.n, &zs),
        )
    }

    /// `(n, k)` with `k = n − rank(H)`.
    pub fn parameters(&self) -> (usize, usize) {
        (self.n, self.n - self.h.rank())
    }
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerCode({}, n={}, m={})", self.name, self.n, self.m())
    }
}

/// A CSS code with separate X and Z parity-check matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct CssCode {
    name: String,
    hx: BitMatrix,
    hz: BitMatrix,
}

impl CssCode {
    pub fn new(name: impl Into<String>, hx: BitMatrix, hz: BitMatrix) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::Dimension(format!(
                "Hx has {} columns but Hz has {}",
                hx.cols(),
                hz.cols()
            )));
        }
        for (r, w) in (0..hx.rows()).map(|r| (r, hx.row_weight(r))) {
            if w == 0 {
                return Err(Error::ZeroRow(r));
            }
        }
        for (r, w) in (0..hz.rows()).map(|r| (r, hz.row_weight(r))) {
            if w == 0 {
                return Err(Error::ZeroRow(hx.rows() + r));
            }
        }
        for i in 0..hx.rows() {
            let x = hx.row(i);
            for j in 0..hz.rows() {
                if x.dot(&hz.row(j)) {
                    return Err(Error::NotOrthogonal(i, j));
                }
            }
        }
        Ok(Self { name: name.into(), hx, hz })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.hx.cols()
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    pub fn mx(&self) -> usize {
        self.hx.rows()
    }

    pub fn mz(&self) -> usize {
        self.hz.rows()
    }

    /// Binary symplectic form: `[Hx | 0]` rows followed by `[0 | Hz]` rows.
    pub fn to_bsf(&self) -> StabilizerCode {
        let n = self.n();
        let zero_x = BitMatrix::zeros(self.mx(), n);
        let zero_z = BitMatrix::zeros(self.mz(), n);
        let top = self.hx.hstack(&zero_x).expect("same row count");
        let bottom = zero_z.hstack(&self.hz).expect("same row count");
        let h = top.vstack(&bottom).expect("same column count");
        StabilizerCode { name: self.name.clone(), n, h }
    }

    /// `(n, k)` with `k = n − rank(Hx) − rank(Hz)`.
    pub fn parameters(&self) -> (usize, usize) {
        (self.n(), self.n() - self.hx.rank() - self.hz.rank())
    }

    /// Logical operator supports `(Lx, Lz)` with `Lx · Lzᵀ = I`.
    ///
    /// `Lz` spans `ker(Hx) / rowspace(Hz)` and `Lx` spans `ker(Hz) / rowspace(Hx)`.
    pub fn logical_operators(&self) -> (Vec<BitVector>, Vec<BitVector>) {
        let lz = quotient_basis(&self.hx, &self.hz);
        let lx = quotient_basis(&self.hz, &self.hx);
        debug_assert_eq!(lx.len(), lz.len());
        let k = lz.len();
        if k == 0 {
            return (Vec::new(), Vec::new());
        }
        // pairing[i][j] = Lx_i · Lz_j; replace Lx by pairing⁻¹ · Lx so the pairing becomes identity
        let mut pairing = BitMatrix::zeros(k, k);
        for (i, x) in lx.iter().enumerate() {
            for (j, z) in lz.iter().enumerate() {
                pairing.set(i, j, x.dot(z));
            }
        }
        let inv = invert(&pairing).expect("logical pairing must be nondegenerate");
        let lx = (0..k)
            .map(|i| {
                let mut v = BitVector::zeros(self.n());
                for j in inv.row(i).support() {
                    v.xor_assign(&lx[j]);
                }
                v
            })
            .collect();
        (lx, lz)
    }
}

impl fmt::Debug for CssCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CssCode({}, n={}, mx={}, mz={})", self.name, self.n(), self.mx(), self.mz())
    }
}

/// Vectors in `ker(kernel_of)` that extend `rowspace(modulo)`, one per quotient dimension.
fn quotient_basis(kernel_of: &BitMatrix, modulo: &BitMatrix) -> Vec<BitVector> {
    let mut acc = modulo.clone();
    let mut rank = acc.rank();
    let mut out = Vec::new();
    for v in kernel_of.kernel_basis() {
        let candidate = acc.vstack(&BitMatrix::from_rows(v.len(), std::slice::from_ref(&v))).unwrap();
        let r = candidate.rank();
        if r > rank {
            acc = candidate;
            rank = r;
            out.push(v);
        }
    }
    out
}

/// Inverse of a square GF(2) matrix, or `None` if singular.
pub(crate) fn invert(m: &BitMatrix) -> Option<BitMatrix> {
    let k = m.rows();
    assert_eq!(k, m.cols());
    let aug = m.hstack(&BitMatrix::identity(k)).unwrap();
    let (rref, pivots) = aug.row_reduce();
    if pivots.len() < k || pivots[k - 1] >= k {
        return None;
    }
    Some(rref.col_slice(k, 2 * k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_bits_roundtrip() {
        for p in Pauli::ALL {
            let (x, z) = p.bits();
            assert_eq!(Pauli::from_bits(x, z), Some(p));
        }
        assert_eq!(Pauli::from_bits(false, false), None);
        assert!(Pauli::X.anticommutes(Pauli::Z));
        assert!(!Pauli::Y.anticommutes(Pauli::Y));
    }

    #[test]
    fn rejects_non_commuting_rows() {
        // XXXX vs ZZZX: overlap X/Z on three positions → odd
        let h = BitMatrix::from_strs(&["11110000", "00011110"]);
        assert!(matches!(StabilizerCode::new("bad", h), Err(Error::NonCommuting(0, 1))));
    }

    #[test]
    fn rejects_zero_row() {
        let h = BitMatrix::from_strs(&["1100", "0000"]);
        assert!(matches!(StabilizerCode::new("z", h), Err(Error::ZeroRow(1))));
    }

    #[test]
    fn css_orthogonality_enforced() {
        let hx = BitMatrix::from_strs(&["110"]);
        let hz = BitMatrix::from_strs(&["100"]);
        assert!(matches!(CssCode::new("bad", hx, hz), Err(Error::NotOrthogonal(0, 0))));
    }

    #[test]
    fn steane_bsf_and_back() {
        let css = steane_css();
        let bsf = css.to_bsf();
        assert_eq!(bsf.n(), 7);
        assert_eq!(bsf.m(), 6);
        assert_eq!(bsf.matrix().rows(), 6);
        assert_eq!(bsf.matrix().cols(), 14);
        let back = bsf.to_css().unwrap();
        assert_eq!(back.hx(), css.hx());
        assert_eq!(back.hz(), css.hz());
    }

    #[test]
    fn pure_x_code_has_m_equal_mx() {
        let css = CssCode::new("rep", BitMatrix::from_strs(&["110", "011"]), BitMatrix::zeros(0, 3))
            .unwrap();
        let bsf = css.to_bsf();
        assert_eq!(bsf.m(), 2);
        assert_eq!(css.parameters(), (3, 1));
    }

    #[test]
    fn zero_check_code_parameters() {
        let code = StabilizerCode::new("free", BitMatrix::zeros(0, 10)).unwrap();
        assert_eq!(code.parameters(), (5, 5));
    }

    #[test]
    fn steane_logicals() {
        let css = steane_css();
        let (lx, lz) = css.logical_operators();
        assert_eq!(lx.len(), 1);
        assert_eq!(lz.len(), 1);
        assert!(lz[0].weight() <= 7);
        assert!(css.hx().mat_vec(&lz[0]).unwrap().is_zero());
        assert!(css.hz().mat_vec(&lx[0]).unwrap().is_zero());
        assert!(!css.hz().row_space_contains(&lz[0]));
        assert!(lx[0].dot(&lz[0]));
    }

    #[test]
    fn full_rank_code_has_no_logicals() {
        // Hx = I on 2 qubits is orthogonal to an empty Hz and leaves k = 0
        let css = CssCode::new("k0", BitMatrix::identity(2), BitMatrix::zeros(0, 2)).unwrap();
        let (lx, lz) = css.logical_operators();
        assert!(lx.is_empty() && lz.is_empty());
        assert_eq!(css.parameters(), (2, 0));
    }

    #[test]
    fn even_local_anticommutation_on_catalog_rows() {
        let code = steane();
        for i in 0..code.m() {
            for j in 0..code.m() {
                assert_eq!(code.anticommuting_qubits(i, j).len() % 2, 0);
            }
        }
    }

    #[test]
    fn invert_small() {
        let m = BitMatrix::from_strs(&["11", "01"]);
        let inv = invert(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(2));
        assert!(invert(&BitMatrix::from_strs(&["11", "11"])).is_none());
    }
}
