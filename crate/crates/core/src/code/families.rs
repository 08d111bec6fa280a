//! Code family constructors.

use super::{CssCode, StabilizerCode};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// The [[7,1,3]] Steane code with `Hx = Hz`.
pub fn steane_css() -> CssCode {
    let h = BitMatrix::from_strs(&["1111000", "1100110", "1010101"]);
    CssCode::new("steane", h.clone(), h).expect("Steane code is CSS-orthogonal")
}

pub fn steane() -> StabilizerCode {
    steane_css().to_bsf()
}

/// Rotated surface code of odd distance `d`: `d²` data qubits, `d² − 1` checks.
///
/// Data qubit `(r, c)` has index `r·d + c`. Plaquettes sit at corners `(i, j)`,
/// `0 ≤ i, j ≤ d`, and touch the data qubits `(i−1..=i, j−1..=j)` that exist.
/// X plaquettes have `i + j` even; weight-two X plaquettes live on the top and
/// bottom edges, weight-two Z plaquettes on the left and right edges.
pub fn surface_code(d: usize) -> Result<CssCode> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "surface code distance must be odd and ≥ 3, got {d}"
        )));
    }
    let n = d * d;
    let mut xs = Vec::new();
    let mut zs = Vec::new();
    for i in 0..=d {
        for j in 0..=d {
            let is_x = (i + j) % 2 == 0;
            let top_bottom = i == 0 || i == d;
            let left_right = j == 0 || j == d;
            if top_bottom && left_right {
                continue;
            }
            if (top_bottom && !is_x) || (left_right && is_x) {
                continue;
            }
            let mut support = Vec::new();
            for r in i.saturating_sub(1)..=i.min(d - 1) {
                for c in j.saturating_sub(1)..=j.min(d - 1) {
                    support.push(r * d + c);
                }
            }
            let row = crate::gf2::BitVector::from_support(n, &support);
            if is_x {
                xs.push(row);
            } else {
                zs.push(row);
            }
        }
    }
    CssCode::new(
        format!("surface:d={d}"),
        BitMatrix::from_rows(n, &xs),
        BitMatrix::from_rows(n, &zs),
    )
}

fn check_terms<T: Copy + PartialEq + std::fmt::Debug>(terms: &[T], what: &str) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::InvalidParameter(format!("{what} polynomial has no terms")));
    }
    for (i, t) in terms.iter().enumerate() {
        if terms[..i].contains(t) {
            return Err(Error::InvalidParameter(format!("{what} polynomial repeats term {t:?}")));
        }
    }
    Ok(())
}

/// Bivariate bicycle code over `Z_l × Z_m`.
///
/// `A = Σ x^a y^b` over `a_terms`, `B` likewise, with `x = S_l ⊗ I_m` and
/// `y = I_l ⊗ S_m` for cyclic shifts `S`. `Hx = [A | B]`, `Hz = [Bᵀ | Aᵀ]`.
pub fn bb_code(
    l: usize,
    m: usize,
    a_terms: &[(usize, usize)],
    b_terms: &[(usize, usize)],
) -> Result<CssCode> {
    check_terms(a_terms, "A")?;
    check_terms(b_terms, "B")?;
    for &(a, b) in a_terms.iter().chain(b_terms) {
        if a >= l || b >= m {
            return Err(Error::InvalidParameter(format!(
                "exponent (x^{a}, y^{b}) out of range for l={l}, m={m}"
            )));
        }
    }
    let size = l * m;
    let poly = |terms: &[(usize, usize)]| {
        let mut p = BitMatrix::zeros(size, size);
        for i in 0..l {
            for j in 0..m {
                for &(a, b) in terms {
                    let col = ((i + a) % l) * m + (j + b) % m;
                    let cur = p.get(i * m + j, col);
                    p.set(i * m + j, col, !cur);
                }
            }
        }
        p
    };
    let a = poly(a_terms);
    let b = poly(b_terms);
    two_block(format!("bb:l={l},m={m}"), &a, &b)
}

/// Generalized bicycle code with univariate circulants of size `blocklen`.
pub fn gb_code(blocklen: usize, a_terms: &[usize], b_terms: &[usize]) -> Result<CssCode> {
    check_terms(a_terms, "A")?;
    check_terms(b_terms, "B")?;
    if let Some(&e) = a_terms.iter().chain(b_terms).find(|&&e| e >= blocklen) {
        return Err(Error::InvalidParameter(format!(
            "exponent {e} out of range for block length {blocklen}"
        )));
    }
    let circ = |terms: &[usize]| {
        let mut p = BitMatrix::zeros(blocklen, blocklen);
        for i in 0..blocklen {
            for &e in terms {
                p.set(i, (i + e) % blocklen, true);
            }
        }
        p
    };
    two_block(format!("gb:l={blocklen}"), &circ(a_terms), &circ(b_terms))
}

fn two_block(name: String, a: &BitMatrix, b: &BitMatrix) -> Result<CssCode> {
    let hx = a.hstack(b)?;
    let hz = b.transpose().hstack(&a.transpose())?;
    CssCode::new(name, hx, hz)
}

/// Hypergraph product: `Hx = [H1 ⊗ I | I ⊗ H2ᵀ]`, `Hz = [I ⊗ H2 | H1ᵀ ⊗ I]`.
pub fn hgp(h1: &BitMatrix, h2: &BitMatrix) -> Result<CssCode> {
    let (m1, n1) = (h1.rows(), h1.cols());
    let (m2, n2) = (h2.rows(), h2.cols());
    let hx = h1.kron(&BitMatrix::identity(n2)).hstack(&BitMatrix::identity(m1).kron(&h2.transpose()))?;
    let hz = BitMatrix::identity(n1).kron(h2).hstack(&h1.transpose().kron(&BitMatrix::identity(m2)))?;
    CssCode::new(format!("hgp:{m1}x{n1},{m2}x{n2}"), hx, hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tanner::TannerGraph;

    fn assert_orthogonal(c: &CssCode) {
        assert!(c.hx().mul(&c.hz().transpose()).unwrap().is_zero());
    }

    #[test]
    fn steane_matches_table() {
        let s = steane();
        assert_eq!((s.n(), s.m()), (7, 6));
        assert_eq!(s.parameters(), (7, 1));
        let css = steane_css();
        assert_eq!(css.hx().rank(), 3);
        assert_eq!(css.hz().rank(), 3);
        assert_eq!(css.hx().row(0).support(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn surface_code_shapes() {
        for d in [3, 5, 7, 21] {
            let c = surface_code(d).unwrap();
            assert_eq!(c.n(), d * d);
            assert_eq!(c.mx() + c.mz(), d * d - 1);
            assert_eq!(c.parameters(), (d * d, 1));
            let bsf = c.to_bsf();
            assert!((0..bsf.m()).all(|i| bsf.check_weight(i) <= 4));
            assert!(TannerGraph::from_code(&bsf).max_degree() <= 4);
        }
        assert!(surface_code(4).is_err());
        assert!(surface_code(1).is_err());
    }

    #[test]
    fn bb72_parameters() {
        let c = bb_code(6, 6, &[(3, 0), (0, 1), (0, 2)], &[(0, 3), (1, 0), (2, 0)]).unwrap();
        assert_eq!(c.parameters(), (72, 12));
        assert_orthogonal(&c);
        let bsf = c.to_bsf();
        assert!((0..bsf.m()).all(|i| bsf.check_weight(i) == 6));
    }

    #[test]
    fn bb_rejects_out_of_range() {
        assert!(bb_code(3, 3, &[(3, 0)], &[(0, 0)]).is_err());
        assert!(bb_code(3, 3, &[], &[(0, 0)]).is_err());
    }

    #[test]
    fn gb_examples() {
        let c = gb_code(63, &[0, 1], &[0, 24]).unwrap();
        assert_eq!(c.parameters(), (126, 2));
        assert_orthogonal(&c);
        assert_eq!(TannerGraph::from_code(&c.to_bsf()).max_degree(), 4);
        let single = gb_code(5, &[0], &[2]).unwrap();
        assert!((0..single.mx()).all(|r| single.hx().row_weight(r) == 2));
        assert!(gb_code(5, &[5], &[0]).is_err());
    }

    #[test]
    fn hgp_examples() {
        let one = BitMatrix::from_strs(&["1"]);
        let c = hgp(&one, &one).unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.mx() + c.mz(), 2);
        let h = BitMatrix::from_strs(&["000011", "001100", "010101", "100101"]);
        let c = hgp(&h, &h).unwrap();
        assert_eq!(c.parameters(), (52, 4));
        assert_orthogonal(&c);
    }

    #[test]
    fn hgp_random_orthogonal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let gen = |rng: &mut rand_chacha::ChaCha8Rng, r: usize, c: usize| {
                let mut m = BitMatrix::zeros(r, c);
                for i in 0..r {
                    for j in 0..c {
                        m.set(i, j, rng.gen_bool(0.5));
                    }
                    m.set(i, rng.gen_range(0..c), true);
                }
                for j in 0..c {
                    m.set(rng.gen_range(0..r), j, true);
                }
                m
            };
            let (r1, c1, r2, c2) =
                (rng.gen_range(1..4), rng.gen_range(1..5), rng.gen_range(1..4), rng.gen_range(1..5));
            let h1 = gen(&mut rng, r1, c1);
            let h2 = gen(&mut rng, r2, c2);
            let c = hgp(&h1, &h2).unwrap();
            assert_orthogonal(&c);
            assert_eq!(c.n(), c1 * c2 + r1 * r2);
        }
    }
}
