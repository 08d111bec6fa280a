//! Stabilizer tableau simulation with exact sign tracking.
//!
//! Rows are Pauli operators stored as packed x/z bits. Signs are affine
//! functions of the outcomes of earlier random measurements: every random
//! measurement introduces a fresh variable, so a later outcome or detector is
//! deterministic exactly when its affine expression is constant. A seeded RNG
//! picks concrete values for the variables so that outcomes can also be read
//! as plain bits.

mod verify;

pub use verify::{
    circuit_measurements, clifford_action, circuits_equivalent, detector_values, prepare_codespace, run_circuit,
    verify_round, verify_round_with, CliffordAction, Counterexample, VerifyReport,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::Pauli;
use crate::error::{Error, Result};

/// Bit set over `{1, v₁, v₂, …}`: bit 0 is the constant term, bit `i` the coefficient of the
/// `i`-th random outcome.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Affine(Vec<u64>);

impl Affine {
    pub fn constant(bit: bool) -> Self {
        let mut a = Affine::default();
        if bit {
            a.flip(0);
        }
        a
    }

    fn variable(index: usize) -> Self {
        let mut a = Affine::default();
        a.flip(index);
        a
    }

    fn flip(&mut self, i: usize) {
        let w = i / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Affine) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub fn xor_const(&mut self, bit: bool) {
        if bit {
            self.flip(0);
        }
    }

    /// Constant term.
    pub fn constant_term(&self) -> bool {
        self.0.first().is_some_and(|w| w & 1 == 1)
    }

    /// True if no random outcome enters the expression.
    pub fn is_constant(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &w)| if i == 0 { w & !1 == 0 } else { w == 0 })
    }

    /// Value under the given outcome assignment (`values[i]` for variable `i`, index 0 unused).
    pub fn eval(&self, values: &[bool]) -> bool {
        let mut acc = self.constant_term();
        for (wi, &w) in self.0.iter().enumerate() {
            let mut bits = if wi == 0 { w & !1 } else { w };
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                acc ^= values[wi * 64 + b];
                bits &= bits - 1;
            }
        }
        acc
    }
}

/// One measurement result: the concrete bit and its affine expression.
///
/// `deterministic` means the measured operator was in the stabilizer group up to sign. The
/// outcome may still depend on earlier random outcomes; [`Outcome::is_fixed`] says whether it
/// does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub bit: bool,
    pub deterministic: bool,
    pub expr: Affine,
}

impl Outcome {
    pub fn is_fixed(&self) -> bool {
        self.deterministic && self.expr.is_constant()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    S,
    Cx,
    Cz,
    Cy,
}

/// Aaronson–Gottesman tableau over `n` qubits: rows `0..n` are destabilizers, `n..2n`
/// stabilizers.
#[derive(Clone, Debug)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<Vec<u64>>,
    z: Vec<Vec<u64>>,
    sign: Vec<Affine>,
    /// Concrete values of the random outcomes so far; index 0 unused.
    values: Vec<bool>,
    rng: ChaCha8Rng,
}

#[inline]
fn bit(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
fn flip(v: &mut [u64], i: usize) {
    v[i / 64] ^= 1 << (i % 64);
}

/// Exponent of `i` (mod 4) in the product of Paulis `(x1,z1)·(x2,z2)`, per word.
fn phase_exponent(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut pos = 0u32;
    let mut neg = 0u32;
    for w in 0..x1.len() {
        let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
        let y1 = a & b;
        let xo = a & !b;
        let zo = !a & b;
        pos += ((y1 & d & !c) | (xo & d & c) | (zo & c & !d)).count_ones();
        neg += ((y1 & c & !d) | (xo & d & !c) | (zo & c & d)).count_ones();
    }
    (pos + 4 * x1.len() as u32 * 64 - neg) % 4
}

impl Tableau {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize, seed: u64) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut x = vec![vec![0u64; words]; 2 * n];
        let mut z = vec![vec![0u64; words]; 2 * n];
        for i in 0..n {
            flip(&mut x[i], i);
            flip(&mut z[n + i], i);
        }
        Self {
            n,
            words,
            x,
            z,
            sign: vec![Affine::default(); 2 * n],
            values: vec![false],
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Row `r` as `(x bits, z bits, sign)`.
    pub fn row(&self, r: usize) -> (Vec<bool>, Vec<bool>, &Affine) {
        let xs = (0..self.n).map(|q| bit(&self.x[r], q)).collect();
        let zs = (0..self.n).map(|q| bit(&self.z[r], q)).collect();
        (xs, zs, &self.sign[r])
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::Circuit(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        match gate {
            Gate::H | Gate::S => {
                for &q in targets {
                    self.check_qubit(q)?;
                    if gate == Gate::H {
                        self.h(q)
                    } else {
                        self.s(q)
                    }
                }
            }
            Gate::Cx | Gate::Cz | Gate::Cy => {
                if targets.len() % 2 != 0 {
                    return Err(Error::Circuit("two-qubit gate needs an even number of targets".into()));
                }
                for pair in targets.chunks(2) {
                    let (a, b) = (pair[0], pair[1]);
                    self.check_qubit(a)?;
                    self.check_qubit(b)?;
                    if a == b {
                        return Err(Error::Circuit(format!("two-qubit gate on qubit {a} twice")));
                    }
                    match gate {
                        Gate::Cx => self.cx(a, b),
                        Gate::Cz => {
                            self.h(b);
                            self.cx(a, b);
                            self.h(b);
                        }
                        _ => {
                            // CY = S_b · CX · S_b†, applied right to left
                            self.s(b);
                            self.s(b);
                            self.s(b);
                            self.cx(a, b);
                            self.s(b);
                        }
                    }
                }
            }
        }
        #[cfg(debug_assertions)]
        if self.n <= 12 {
            debug_assert!(self.is_well_formed());
        }
        Ok(())
    }

    fn h(&mut self, q: usize) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let (xb, zb) = (self.x[r][w] & m != 0, self.z[r][w] & m != 0);
            self.sign[r].xor_const(xb && zb);
            if xb != zb {
                self.x[r][w] ^= m;
                self.z[r][w] ^= m;
            }
        }
    }

    fn s(&mut self, q: usize) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        for r in 0..2 * self.n {
            let (xb, zb) = (self.x[r][w] & m != 0, self.z[r][w] & m != 0);
            self.sign[r].xor_const(xb && zb);
            if xb {
                self.z[r][w] ^= m;
            }
        }
    }

    fn cx(&mut self, a: usize, b: usize) {
        for r in 0..2 * self.n {
            let (xa, za) = (bit(&self.x[r], a), bit(&self.z[r], a));
            let (xb, zb) = (bit(&self.x[r], b), bit(&self.z[r], b));
            self.sign[r].xor_const(xa && zb && (xb == za));
            if xa {
                flip(&mut self.x[r], b);
            }
            if zb {
                flip(&mut self.z[r], a);
            }
        }
    }

    /// Multiplies a Pauli onto the state: flips the sign of every row anticommuting with it.
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) -> Result<()> {
        self.check_qubit(q)?;
        let (px, pz) = p.bits();
        for r in 0..2 * self.n {
            let anti = (px && bit(&self.z[r], q)) ^ (pz && bit(&self.x[r], q));
            self.sign[r].xor_const(anti);
        }
        Ok(())
    }

    /// Row `h ← row i · row h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let e = phase_exponent(&self.x[i], &self.z[i], &self.x[h], &self.z[h]);
        debug_assert!(e % 2 == 0, "rowsum of anticommuting rows");
        let si = self.sign[i].clone();
        self.sign[h].xor_assign(&si);
        self.sign[h].xor_const(e == 2);
        for w in 0..self.words {
            let (xi, zi) = (self.x[i][w], self.z[i][w]);
            self.x[h][w] ^= xi;
            self.z[h][w] ^= zi;
        }
    }

    fn anticommutes_with(&self, r: usize, px: &[u64], pz: &[u64]) -> bool {
        let mut acc = 0u32;
        for w in 0..self.words {
            acc ^= ((self.x[r][w] & pz[w]) ^ (self.z[r][w] & px[w])).count_ones() & 1;
        }
        acc == 1
    }

    fn packed(&self, support: &[(usize, Pauli)]) -> Result<(Vec<u64>, Vec<u64>)> {
        let mut px = vec![0u64; self.words];
        let mut pz = vec![0u64; self.words];
        for &(q, p) in support {
            self.check_qubit(q)?;
            let (bx, bz) = p.bits();
            if bx {
                flip(&mut px, q);
            }
            if bz {
                flip(&mut pz, q);
            }
        }
        Ok((px, pz))
    }

    /// Measures the Hermitian Pauli product `support` (sign +1). Outcome bit 1 means eigenvalue −1.
    pub fn measure_pauli(&mut self, support: &[(usize, Pauli)]) -> Result<Outcome> {
        let (px, pz) = self.packed(support)?;
        let n = self.n;
        let pivot = (n..2 * n).find(|&r| self.anticommutes_with(r, &px, &pz));
        if let Some(p) = pivot {
            for r in 0..2 * n {
                if r != p && self.anticommutes_with(r, &px, &pz) {
                    self.rowsum(r, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.sign[p - n] = self.sign[p].clone();
            let var = self.values.len();
            let value: bool = self.rng.gen();
            self.values.push(value);
            self.x[p] = px;
            self.z[p] = pz;
            // the stored row is the operator measured; its Y factors carry the i·XZ convention
            self.sign[p] = Affine::variable(var);
            return Ok(Outcome { bit: value, deterministic: false, expr: Affine::variable(var) });
        }
        // deterministic: accumulate stabilizers paired with anticommuting destabilizers
        let mut acc_x = vec![0u64; self.words];
        let mut acc_z = vec![0u64; self.words];
        let mut acc_sign = Affine::default();
        for r in 0..n {
            if self.anticommutes_with(r, &px, &pz) {
                let s = r + n;
                let e = phase_exponent(&self.x[s], &self.z[s], &acc_x, &acc_z);
                acc_sign.xor_assign(&self.sign[s]);
                acc_sign.xor_const(e == 2);
                for w in 0..self.words {
                    acc_x[w] ^= self.x[s][w];
                    acc_z[w] ^= self.z[s][w];
                }
            }
        }
        if acc_x != px || acc_z != pz {
            return Err(Error::Internal("measured Pauli not reproduced by the stabilizer group".into()));
        }
        let bit = acc_sign.eval(&self.values);
        Ok(Outcome { bit, deterministic: true, expr: acc_sign })
    }

    /// Measures `support` and, when the outcome was random, applies the Pauli correction that
    /// leaves the state in the `+1` eigenspace. Returns the outcome before correction.
    pub fn project_plus(&mut self, support: &[(usize, Pauli)]) -> Result<Outcome> {
        let out = self.measure_pauli(support)?;
        if !out.deterministic {
            let (px, pz) = self.packed(support)?;
            let n = self.n;
            let p = (n..2 * n)
                .find(|&r| self.x[r] == px && self.z[r] == pz)
                .ok_or_else(|| Error::Internal("measured operator missing from the stabilizer rows".into()))?;
            // the paired destabilizer anticommutes with the new row and no other stabilizer
            let (dx, dz) = (self.x[p - n].clone(), self.z[p - n].clone());
            for r in 0..2 * n {
                if self.anticommutes_with(r, &dx, &dz) {
                    self.sign[r].xor_assign(&out.expr);
                }
            }
        }
        Ok(out)
    }

    /// Z-basis measurement.
    pub fn measure(&mut self, q: usize) -> Result<Outcome> {
        self.measure_pauli(&[(q, Pauli::Z)])
    }

    /// Measures and flips back to `|0⟩`; returns the measurement outcome.
    pub fn measure_reset(&mut self, q: usize) -> Result<Outcome> {
        let out = self.measure(q)?;
        // conditional X: flip signs of rows anticommuting with X_q by the outcome expression
        for r in 0..2 * self.n {
            if bit(&self.z[r], q) {
                self.sign[r].xor_assign(&out.expr);
            }
        }
        Ok(out)
    }

    pub fn reset(&mut self, q: usize) -> Result<()> {
        self.measure_reset(q).map(|_| ())
    }

    /// Stabilizer rows pairwise commute; destabilizer `i` anticommutes exactly with stabilizer `i`.
    pub fn is_well_formed(&self) -> bool {
        let n = self.n;
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let anti = self.anticommutes_with(i, &self.x[j], &self.z[j]);
                let expect = i < n && j == i + n;
                if anti != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Canonical generators of the stabilizer subgroup supported on qubits `0..keep`.
    ///
    /// Gaussian elimination with qubits `keep..n` first, so rows touching them are pivots and
    /// drop out; the remaining rows are fully reduced, giving a unique form per group.
    pub fn canonical_subgroup(&self, keep: usize) -> Vec<(Vec<u64>, Vec<u64>, Affine)> {
        let n = self.n;
        let mut t = self.clone();
        let rows: Vec<usize> = (n..2 * n).collect();
        let order: Vec<usize> = (keep..n).chain(0..keep).collect();
        let mut next = 0;
        let mut dropped = 0;
        for (pass, &q) in order.iter().enumerate() {
            for use_x in [true, false] {
                let has = |t: &Tableau, r: usize| if use_x { bit(&t.x[r], q) } else { bit(&t.z[r], q) };
                let Some(pos) = (next..rows.len()).find(|&k| has(&t, rows[k])) else { continue };
                let p = rows[pos];
                // move the pivot row into slot `next`
                t.x.swap(p, rows[next]);
                t.z.swap(p, rows[next]);
                t.sign.swap(p, rows[next]);
                let p = rows[next];
                for &r in &rows {
                    if r != p && has(&t, r) {
                        t.rowsum(r, p);
                    }
                }
                next += 1;
                if pass < n - keep {
                    dropped = next;
                }
            }
        }
        rows[dropped..next]
            .iter()
            .map(|&r| (t.x[r].clone(), t.z[r].clone(), t.sign[r].clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli_row(t: &Tableau, r: usize) -> String {
        let (xs, zs, s) = t.row(r);
        let body: String = xs
            .iter()
            .zip(&zs)
            .map(|(&x, &z)| match (x, z) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect();
        format!("{}{}", if s.constant_term() { '-' } else { '+' }, body)
    }

    #[test]
    fn h_twice_is_identity() {
        let mut t = Tableau::new(1, 0);
        t.apply(Gate::H, &[0]).unwrap();
        t.apply(Gate::H, &[0]).unwrap();
        assert_eq!(pauli_row(&t, 0), "+X");
        assert_eq!(pauli_row(&t, 1), "+Z");
    }

    #[test]
    fn conjugation_rules() {
        let mut t = Tableau::new(2, 0);
        t.apply(Gate::Cx, &[0, 1]).unwrap();
        assert_eq!(pauli_row(&t, 0), "+XX");
        let mut t = Tableau::new(2, 0);
        t.apply(Gate::Cz, &[0, 1]).unwrap();
        assert_eq!(pauli_row(&t, 0), "+XZ");
        let mut t = Tableau::new(2, 0);
        t.apply(Gate::Cy, &[0, 1]).unwrap();
        assert_eq!(pauli_row(&t, 0), "+XY");
        assert_eq!(pauli_row(&t, 1), "+ZX");
        let mut t = Tableau::new(1, 0);
        t.apply(Gate::S, &[0]).unwrap();
        assert_eq!(pauli_row(&t, 0), "+Y");
        t.apply(Gate::S, &[0]).unwrap();
        assert_eq!(pauli_row(&t, 0), "-X");
    }

    #[test]
    fn measurement_basics() {
        let mut t = Tableau::new(1, 0);
        let o = t.measure(0).unwrap();
        assert!(!o.bit && o.deterministic);

        let mut t = Tableau::new(1, 3);
        t.apply(Gate::H, &[0]).unwrap();
        let o = t.measure(0).unwrap();
        assert!(!o.deterministic);
        let again = t.measure(0).unwrap();
        assert!(again.deterministic);
        assert_eq!(again.bit, o.bit);
        assert_eq!(again.expr, o.expr);

        let mut t = Tableau::new(1, 0);
        t.apply_pauli(0, Pauli::X).unwrap();
        assert!(t.measure(0).unwrap().bit);
        assert!(t.measure_reset(0).unwrap().bit);
        assert!(!t.measure(0).unwrap().bit);
    }

    #[test]
    fn bell_pair_correlations_are_deterministic_parities() {
        let mut t = Tableau::new(2, 9);
        t.apply(Gate::H, &[0]).unwrap();
        t.apply(Gate::Cx, &[0, 1]).unwrap();
        let a = t.measure(0).unwrap();
        let b = t.measure(1).unwrap();
        assert!(!a.deterministic);
        assert!(b.deterministic);
        assert_eq!(a.bit, b.bit);
        let mut parity = a.expr.clone();
        parity.xor_assign(&b.expr);
        assert!(parity.is_constant() && !parity.constant_term());
    }

    #[test]
    fn measure_reset_returns_to_zero() {
        let mut t = Tableau::new(1, 1);
        t.apply(Gate::H, &[0]).unwrap();
        t.measure_reset(0).unwrap();
        let o = t.measure(0).unwrap();
        assert!(o.deterministic && !o.bit);
    }

    #[test]
    fn bad_targets() {
        let mut t = Tableau::new(2, 0);
        assert!(t.apply(Gate::Cx, &[0, 0]).is_err());
        assert!(t.apply(Gate::H, &[2]).is_err());
        assert!(t.apply(Gate::Cz, &[0]).is_err());
    }

    /// Per-qubit phase function as an oracle for the packed version.
    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 as i32 - x2 as i32,
            (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
            (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
        }
    }

    proptest! {
        #[test]
        fn packed_phase_matches_scalar(bits in proptest::collection::vec(any::<(bool, bool, bool, bool)>(), 1..130)) {
            let n = bits.len();
            let words = n.div_ceil(64);
            let mut v = vec![vec![0u64; words]; 4];
            let mut total = 0i32;
            for (q, &(a, b, c, d)) in bits.iter().enumerate() {
                for (k, on) in [a, b, c, d].into_iter().enumerate() {
                    if on { flip(&mut v[k], q); }
                }
                total += g(a, b, c, d);
            }
            prop_assert_eq!(phase_exponent(&v[0], &v[1], &v[2], &v[3]) as i32, total.rem_euclid(4));
        }

        #[test]
        fn random_cliffords_stay_well_formed(ops in proptest::collection::vec((0u8..5, 0usize..5, 0usize..5), 0..60)) {
            let mut t = Tableau::new(5, 0);
            for (g, a, b) in ops {
                let gate = [Gate::H, Gate::S, Gate::Cx, Gate::Cz, Gate::Cy][g as usize];
                let targets: Vec<usize> = if matches!(gate, Gate::H | Gate::S) { vec![a] } else if a != b { vec![a, b] } else { continue };
                t.apply(gate, &targets).unwrap();
            }
            prop_assert!(t.is_well_formed());
        }
    }
}
