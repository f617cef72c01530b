//! Bigraded exterior forms with Fourier-polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;

use super::basis::BasisIndex;
use super::scalar::Scalar;
use super::trig::{ModeIndex, TrigPoly};
use crate::error::ParseError;

/// `Σ_B c_B(x) φ^B` on a coframe of rank `n`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Form {
    n: usize,
    coeffs: BTreeMap<BasisIndex, TrigPoly>,
}

impl Form {
    pub fn zero(n: usize) -> Self {
        Form { n, coeffs: BTreeMap::new() }
    }

    /// `c·χ_κ·φ^B`.
    pub fn term(n: usize, b: BasisIndex, k: ModeIndex, c: Scalar) -> Self {
        let mut f = Form::zero(n);
        f.add_coeff(b, &TrigPoly::mode(k, c));
        f
    }

    /// Constant multiple of a generator.
    pub fn generator(n: usize, dims: usize, b: BasisIndex, c: Scalar) -> Self {
        Form::term(n, b, ModeIndex::zero(dims), c)
    }

    /// Generator from 1-based index lists (`φ^I ∧ φ̄^J`). Panics on invalid indices.
    pub fn basis(n: usize, dims: usize, i: &[usize], j: &[usize]) -> Self {
        Form::generator(n, dims, BasisIndex::from_indices(i, j).expect("valid basis indices"), Scalar::one())
    }

    pub fn function(n: usize, f: TrigPoly) -> Self {
        let mut out = Form::zero(n);
        out.add_coeff(BasisIndex::ONE, &f);
        out
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&BasisIndex, &TrigPoly)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, b: &BasisIndex) -> TrigPoly {
        self.coeffs.get(b).cloned().unwrap_or_default()
    }

    pub fn add_coeff(&mut self, b: BasisIndex, c: &TrigPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(b).or_default();
        slot.add_assign(c);
        if slot.is_zero() {
            self.coeffs.remove(&b);
        }
    }

    /// Adds `c·χ_κ·φ^B`.
    pub fn add_term(&mut self, b: BasisIndex, k: ModeIndex, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(b).or_default();
        slot.add_term(k, c);
        if slot.is_zero() {
            self.coeffs.remove(&b);
        }
    }

    pub fn add_assign(&mut self, other: &Form) {
        for (b, c) in &other.coeffs {
            self.add_coeff(*b, c);
        }
    }

    pub fn add_scaled(&mut self, s: &Scalar, other: &Form) {
        if s.is_zero() {
            return;
        }
        for (b, c) in &other.coeffs {
            self.add_coeff(*b, &c.scale(s));
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(-1), other);
        out
    }

    pub fn neg(&self) -> Form {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Form {
        if s.is_zero() {
            return Form::zero(self.n);
        }
        Form { n: self.n, coeffs: self.coeffs.iter().map(|(b, c)| (*b, c.scale(s))).collect() }
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_fn(&self, f: &TrigPoly) -> Form {
        let mut out = Form::zero(self.n);
        for (b, c) in &self.coeffs {
            out.add_coeff(*b, &c.mul(f));
        }
        out
    }

    /// Exterior product with signs from sorting factors into canonical order.
    pub fn wedge(&self, other: &Form) -> Form {
        assert_eq!(self.n, other.n, "wedge of forms on different coframe ranks");
        let mut out = Form::zero(self.n);
        for (ba, ca) in &self.coeffs {
            for (bb, cb) in &other.coeffs {
                if let Some((b, sign)) = ba.wedge(bb) {
                    let prod = ca.mul(cb);
                    out.add_coeff(b, &if sign < 0 { prod.neg() } else { prod });
                }
            }
        }
        out
    }

    /// Complex conjugation: `(p,q) → (q,p)`, conjugated coefficients, reordering sign.
    pub fn conj(&self) -> Form {
        let mut out = Form::zero(self.n);
        for (b, c) in &self.coeffs {
            let (cb, sign) = b.conj();
            let cc = c.conj();
            out.add_coeff(cb, &if sign < 0 { cc.neg() } else { cc });
        }
        out
    }

    /// Set of bidegrees present.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.coeffs.keys().map(|b| b.bidegree()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// `Some((p,q))` when every term has bidegree `(p,q)`; `None` for mixed forms.
    /// The zero form reports `None`.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let bd = self.bidegrees();
        if bd.len() == 1 {
            Some(bd[0])
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.bidegrees().len() <= 1
    }

    /// The `(p,q)` component.
    pub fn project(&self, p: usize, q: usize) -> Form {
        Form {
            n: self.n,
            coeffs: self.coeffs.iter().filter(|(b, _)| b.bidegree() == (p, q)).map(|(b, c)| (*b, c.clone())).collect(),
        }
    }

    /// The total-degree `k` component.
    pub fn project_degree(&self, k: usize) -> Form {
        Form {
            n: self.n,
            coeffs: self.coeffs.iter().filter(|(b, _)| b.degree() == k).map(|(b, c)| (*b, c.clone())).collect(),
        }
    }

    /// All modes appearing in any coefficient.
    pub fn modes(&self) -> Vec<ModeIndex> {
        let mut v: Vec<_> = self.coeffs.values().flat_map(|c| c.modes().copied()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Pointwise Hermitian pairing, conjugate-linear in `other`, with `⟨φ^B,φ^B⟩ = Π norms`.
    pub fn inner(&self, other: &Form, norms: &[BigRational]) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (b, ca) in &self.coeffs {
            if let Some(cb) = other.coeffs.get(b) {
                let w = Scalar::from_rational(generator_norm(b, norms));
                out.add_scaled(&w, &ca.mul(&cb.conj()));
            }
        }
        out
    }

    /// `∫ ⟨self, other⟩` over the unit-volume quotient.
    pub fn l2_inner(&self, other: &Form, norms: &[BigRational]) -> Scalar {
        // only matching modes contribute to the zero mode of c_a · conj(c_b)
        let mut acc = Scalar::zero();
        for (b, ca) in &self.coeffs {
            if let Some(cb) = other.coeffs.get(b) {
                let mut s = Scalar::zero();
                for (k, x) in ca.terms() {
                    let y = cb.coeff(k);
                    if !y.is_zero() {
                        s += &(x * &y.conj());
                    }
                }
                acc += &s.scale(&generator_norm(b, norms));
            }
        }
        acc
    }

    /// Constant-coefficient part test: every coefficient is a constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(|c| c.is_constant())
    }

    /// Parses the text grammar `term ('+' term)*`; `term := (scalar)*X[k,..]*w[I;J]`.
    pub fn parse(text: &str, n: usize) -> Result<Form, ParseError> {
        parse_form(text, n)
    }
}

/// Squared norm of a generator: product of the generator norms of its factors.
pub fn generator_norm(b: &BasisIndex, norms: &[BigRational]) -> BigRational {
    let mut w = BigRational::from_integer(1.into());
    for a in b.hol_indices().into_iter().chain(b.anti_indices()) {
        w *= &norms[a - 1];
    }
    w
}

pub fn wedge(a: &Form, b: &Form) -> Form {
    a.wedge(b)
}

pub fn form_conj(a: &Form) -> Form {
    a.conj()
}

pub fn inner(a: &Form, b: &Form, norms: &[BigRational]) -> TrigPoly {
    a.inner(b, norms)
}

pub fn l2_inner(a: &Form, b: &Form, norms: &[BigRational]) -> Scalar {
    a.l2_inner(b, norms)
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (b, c) in &self.coeffs {
            for (k, s) in c.terms() {
                if !first {
                    write!(f, "+")?;
                }
                first = false;
                let ks: Vec<String> = k.components().iter().map(|v| v.to_string()).collect();
                write!(f, "({s})*X[{}]*{b:?}", ks.join(","))?;
            }
        }
        Ok(())
    }
}

fn parse_form(text: &str, n: usize) -> Result<Form, ParseError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('\u{2212}', "-");
    let mut out = Form::zero(n);
    if t == "0" {
        return Ok(out);
    }
    if t.is_empty() {
        return Err(ParseError::new("", "empty form text"));
    }
    let mut dims: Option<usize> = None;
    for (idx, term) in split_terms(&t).into_iter().enumerate() {
        let err = |m: String| ParseError::new(format!("term[{idx}]"), m);
        let x_pos = term.find("*X[").ok_or_else(|| err(format!("missing '*X[' in {term:?}")))?;
        let scalar: crate::algebra::Scalar = term[..x_pos].parse().map_err(|e: ParseError| err(e.message))?;
        let rest = &term[x_pos + 3..];
        let close = rest.find(']').ok_or_else(|| err("unterminated X[".into()))?;
        let modes = parse_ints(&rest[..close]).map_err(&err)?;
        let rest = &rest[close + 1..];
        let rest = rest.strip_prefix("*w[").ok_or_else(|| err(format!("missing '*w[' in {term:?}")))?;
        let body = rest.strip_suffix(']').ok_or_else(|| err("unterminated w[".into()))?;
        let (i_txt, j_txt) = body.split_once(';').ok_or_else(|| err("missing ';' in w[...]".into()))?;
        let to_idx = |v: Vec<i32>| -> Result<Vec<usize>, ParseError> {
            v.into_iter()
                .map(|x| if x >= 1 && (x as usize) <= n { Ok(x as usize) } else { Err(err(format!("coframe index {x} out of range 1..={n}"))) })
                .collect()
        };
        let i = to_idx(parse_ints(i_txt).map_err(&err)?)?;
        let j = to_idx(parse_ints(j_txt).map_err(&err)?)?;
        if i.windows(2).any(|w| w[0] >= w[1]) || j.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err("indices must be strictly increasing".into()));
        }
        let b = BasisIndex::from_indices(&i, &j).ok_or_else(|| err("invalid basis indices".into()))?;
        match dims {
            None => dims = Some(modes.len()),
            Some(d) if d != modes.len() => return Err(err("inconsistent mode dimension".into())),
            _ => {}
        }
        if modes.len() > crate::algebra::trig::MAX_FOURIER_DIMS {
            return Err(err("too many Fourier directions".into()));
        }
        out.add_term(b, ModeIndex::new(&modes), &scalar);
    }
    Ok(out)
}

/// Splits on top-level '+' separating terms (a '+' directly before '(' or a digit/sign
/// that begins a new scalar, outside parentheses and brackets, after a closing ']').
fn split_terms(t: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = t.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'+' if depth == 0 && i > 0 && bytes[i - 1] == b']' => {
                out.push(&t[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&t[start..]);
    out
}

fn parse_ints(s: &str) -> Result<Vec<i32>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| x.parse::<i32>().map_err(|_| format!("bad integer {x:?}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 2;
    const D: usize = 3;

    fn g(i: &[usize], j: &[usize]) -> Form {
        Form::basis(N, D, i, j)
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(g(&[1], &[]).wedge(&g(&[], &[1])), g(&[1], &[1]));
        assert!(g(&[1], &[]).wedge(&g(&[1], &[])).is_zero());
        // factors (1, 2̄, 2, 1̄): swap 2̄↔2 then 2̄↔1̄, two transpositions
        assert_eq!(g(&[1], &[2]).wedge(&g(&[2], &[1])), g(&[1, 2], &[1, 2]));
    }

    #[test]
    fn conj_examples() {
        assert_eq!(g(&[1], &[]).conj(), g(&[], &[1]));
        assert_eq!(g(&[1], &[2]).conj(), g(&[2], &[1]).neg());
    }

    #[test]
    fn inner_examples() {
        let ones = vec![BigRational::from_integer(1.into()); 2];
        let i = Scalar::i();
        let omega = g(&[1], &[1]).add(&g(&[2], &[2])).scale(&i);
        assert_eq!(g(&[1], &[]).inner(&g(&[1], &[]), &ones), TrigPoly::constant(D, Scalar::one()));
        assert!(g(&[1], &[]).inner(&g(&[2], &[]), &ones).is_zero());
        assert_eq!(omega.inner(&omega, &ones), TrigPoly::constant(D, Scalar::from_int(2)));
    }

    #[test]
    fn text_round_trip() {
        let txt = "(1/2+0i)*X[0,0,0]*w[1;1]";
        let f = Form::parse(txt, N).unwrap();
        assert_eq!(f, g(&[1], &[1]).scale(&Scalar::ratio(1, 2)));
        assert_eq!(f.to_string(), txt);
        let h = Form::term(N, BasisIndex::from_indices(&[], &[2]).unwrap(), ModeIndex::new(&[0, -1, 3]), Scalar::complex((-1, 3), (2, 1)))
            .add(&g(&[1, 2], &[]));
        assert_eq!(Form::parse(&h.to_string(), N).unwrap(), h);
        assert!(Form::parse("(1+0i)*X[0]*w[3;]", N).is_err());
        assert!(Form::parse("(1+0i)*X[0]*w[2,1;]", N).is_err());
        assert_eq!(Form::parse("0", N).unwrap(), Form::zero(N));
    }
}
