//! Finite Fourier polynomials over integer mode lattices.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::Scalar;

/// Maximum number of Fourier directions a model may use.
pub const MAX_FOURIER_DIMS: usize = 4;

/// Integer frequency vector of a character. Ordered lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    len: u8,
    c: [i32; MAX_FOURIER_DIMS],
}

impl ModeIndex {
    pub fn new(components: &[i32]) -> Self {
        assert!(components.len() <= MAX_FOURIER_DIMS, "too many Fourier directions");
        let mut c = [0; MAX_FOURIER_DIMS];
        c[..components.len()].copy_from_slice(components);
        ModeIndex { len: components.len() as u8, c }
    }

    pub fn zero(dims: usize) -> Self {
        ModeIndex::new(&vec![0; dims])
    }

    pub fn dims(&self) -> usize {
        self.len as usize
    }

    pub fn components(&self) -> &[i32] {
        &self.c[..self.len as usize]
    }

    pub fn get(&self, i: usize) -> i32 {
        self.components()[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|&v| v == 0)
    }

    pub fn neg(&self) -> Self {
        let mut out = *self;
        for v in &mut out.c {
            *v = -*v;
        }
        out
    }

    pub fn add(&self, other: &ModeIndex) -> Self {
        debug_assert_eq!(self.len, other.len);
        let mut out = *self;
        for (a, b) in out.c.iter_mut().zip(other.c.iter()) {
            *a += b;
        }
        out
    }

    /// Sup norm.
    pub fn sup_norm(&self) -> u32 {
        self.components().iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// All modes with `|κ|∞ ≤ radius`, in lexicographic order.
    pub fn cube(dims: usize, radius: u32) -> Vec<ModeIndex> {
        let r = radius as i32;
        let mut out = vec![ModeIndex::new(&[])];
        for _ in 0..dims {
            let mut next = Vec::with_capacity(out.len() * (2 * r as usize + 1));
            for m in &out {
                for v in -r..=r {
                    let mut comps = m.components().to_vec();
                    comps.push(v);
                    next.push(ModeIndex::new(&comps));
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Debug for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.components())
    }
}

/// Finite Fourier polynomial `Σ c_κ χ_κ`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct TrigPoly {
    terms: BTreeMap<ModeIndex, Scalar>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn constant(dims: usize, c: Scalar) -> Self {
        TrigPoly::mode(ModeIndex::zero(dims), c)
    }

    /// Single character `c·χ_κ`.
    pub fn mode(k: ModeIndex, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        TrigPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &ModeIndex) -> Scalar {
        self.terms.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c·χ_κ` in place.
    pub fn add_term(&mut self, k: ModeIndex, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &TrigPoly) {
        for (k, c) in &other.terms {
            self.add_term(*k, c);
        }
    }

    /// `self += s·other`.
    pub fn add_scaled(&mut self, s: &Scalar, other: &TrigPoly) {
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.terms {
            self.add_term(*k, &(s * c));
        }
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(-1), other);
        out
    }

    pub fn scale(&self, s: &Scalar) -> TrigPoly {
        if s.is_zero() {
            return TrigPoly::zero();
        }
        TrigPoly { terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect() }
    }

    pub fn neg(&self) -> TrigPoly {
        self.scale(&Scalar::from_int(-1))
    }

    /// Convolution product: `χ_a · χ_b = χ_{a+b}`.
    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka.add(kb), &(ca * cb));
            }
        }
        out
    }

    /// Complex conjugate: `(κ, c) ↦ (−κ, c̄)`.
    pub fn conj(&self) -> TrigPoly {
        TrigPoly { terms: self.terms.iter().map(|(k, c)| (k.neg(), c.conj())).collect() }
    }

    /// Integral over the unit-volume quotient: the zero-mode coefficient.
    pub fn integrate(&self) -> Scalar {
        self.terms.iter().find(|(k, _)| k.is_zero()).map(|(_, c)| c.clone()).unwrap_or_else(Scalar::zero)
    }

    /// True if only the zero mode is present (or the polynomial vanishes).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.is_zero())
    }

    pub fn modes(&self) -> impl Iterator<Item = &ModeIndex> {
        self.terms.keys()
    }
}

/// Convolution product of two Fourier polynomials.
pub fn tp_mul(a: &TrigPoly, b: &TrigPoly) -> TrigPoly {
    a.mul(b)
}

/// Zero-mode extraction.
pub fn tp_integrate(a: &TrigPoly) -> Scalar {
    a.integrate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c: &[i32]) -> ModeIndex {
        ModeIndex::new(c)
    }

    #[test]
    fn identity_and_inverse_characters() {
        let one = TrigPoly::mode(m(&[0]), Scalar::one());
        assert_eq!(tp_mul(&one, &one), one);
        let a = TrigPoly::mode(m(&[1, 0, 0]), Scalar::one());
        let b = TrigPoly::mode(m(&[-1, 0, 0]), Scalar::one());
        assert_eq!(tp_mul(&a, &b), TrigPoly::mode(m(&[0, 0, 0]), Scalar::one()));
    }

    #[test]
    fn cosine_square() {
        let half = Scalar::ratio(1, 2);
        let mut cos = TrigPoly::mode(m(&[1]), half.clone());
        cos.add_term(m(&[-1]), &half);
        // direct convolution: each of the four products contributes 1/4
        let mut want = TrigPoly::zero();
        for a in [1, -1] {
            for b in [1, -1] {
                want.add_term(m(&[a + b]), &Scalar::ratio(1, 4));
            }
        }
        let sq = tp_mul(&cos, &cos);
        assert_eq!(sq, want);
        assert_eq!(sq.coeff(&m(&[2])), Scalar::ratio(1, 4));
        assert_eq!(sq.coeff(&m(&[0])), Scalar::ratio(1, 2));
        assert_eq!(sq.coeff(&m(&[-2])), Scalar::ratio(1, 4));
        assert_eq!(tp_integrate(&cos), Scalar::zero());
    }

    #[test]
    fn integration_is_zero_mode() {
        let c = Scalar::complex((3, 1), (1, 1));
        assert_eq!(tp_integrate(&TrigPoly::mode(m(&[0, 0, 0]), c.clone())), c);
        assert_eq!(tp_integrate(&TrigPoly::mode(m(&[1, 0, 0]), Scalar::from_int(5))), Scalar::zero());
    }

    #[test]
    fn characters_orthonormal() {
        let modes = ModeIndex::cube(2, 1);
        for a in &modes {
            for b in &modes {
                let ca = TrigPoly::mode(*a, Scalar::one());
                let cb = TrigPoly::mode(*b, Scalar::one());
                let want = if a == b { Scalar::one() } else { Scalar::zero() };
                assert_eq!(tp_integrate(&tp_mul(&ca, &cb.conj())), want);
            }
        }
    }

    #[test]
    fn cube_size() {
        assert_eq!(ModeIndex::cube(3, 3).len(), 343);
        assert_eq!(ModeIndex::cube(4, 1).len(), 81);
    }
}
