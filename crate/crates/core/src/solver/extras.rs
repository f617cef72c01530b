use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::algebra::{Form, Scalar, TrigPoly};
use crate::calculus::{del, delbar, mu, mubar};
use crate::error::{Error, Result};
use crate::model::Model;

/// `φ = fω + γ` with `f = ⟨φ,ω⟩/n` and `γ ⊥ ω` pointwise.
pub fn lefschetz11(m: &Model, phi: &Form) -> Result<(TrigPoly, Form)> {
    if m.n() != 2 {
        return Err(Error::InvalidArgument("the (1,1) Lefschetz split is implemented for n = 2".into()));
    }
    if !phi.is_zero() && phi.bidegree() != Some((1, 1)) {
        return Err(Error::InvalidArgument("expected a (1,1)-form".into()));
    }
    let f = phi.inner(m.omega(), m.norms()).scale(&Scalar::ratio(1, m.n() as i64));
    let gamma = phi.sub(&m.omega().mul_fn(&f));
    Ok((f, gamma))
}

/// Lattice points `(l, m)` with `m² + (l − δ)² = δ²`, sorted, and their count.
pub fn circle_count(delta: &BigRational) -> Result<(usize, Vec<(i64, i64)>)> {
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let two_delta = delta * BigRational::from_integer(2.into());
    let top = two_delta.floor().to_integer().to_i64().ok_or_else(|| Error::InvalidArgument("delta too large".into()))?;
    let mut points = Vec::new();
    for l in 0..=top {
        let lr = BigRational::from_integer(l.into());
        // m² = 2δl − l²
        let sq = &two_delta * &lr - &lr * &lr;
        if sq.is_negative() || !sq.is_integer() {
            continue;
        }
        let v = sq.to_integer().to_i64().expect("bounded by δ²");
        let r = v.sqrt();
        if r * r != v {
            continue;
        }
        if r == 0 {
            points.push((l, 0));
        } else {
            points.push((l, -r));
            points.push((l, r));
        }
    }
    Ok((points.len(), points))
}

/// `[μ̄α, ∂̄∂̄α, ∂∂α, μα]`.
pub(crate) fn as_membership_forms(m: &Model, a: &Form) -> Vec<Form> {
    vec![mubar(m, a), delbar(m, &delbar(m, a)), del(m, &del(m, a)), mu(m, a)]
}

/// Membership in `ker μ̄ ∩ ker ∂̄² ∩ ker ∂² ∩ ker μ`.
pub fn as_membership(m: &Model, a: &Form) -> Result<bool> {
    if !a.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    Ok(as_membership_forms(m, a).iter().all(Form::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::star;
    use crate::model::{builtin, rat, BuiltinName};
    use num_traits::Zero;

    #[test]
    fn circle_examples() {
        assert_eq!(circle_count(&rat(1, 1)).unwrap(), (4, vec![(0, 0), (1, -1), (1, 1), (2, 0)]));
        assert_eq!(circle_count(&rat(1, 2)).unwrap(), (2, vec![(0, 0), (1, 0)]));
        assert_eq!(circle_count(&rat(5, 1)).unwrap().0, 12);
        assert!(circle_count(&BigRational::zero()).is_err());
    }

    #[test]
    fn lefschetz_examples() {
        let m = builtin(BuiltinName::Kt, &rat(1, 1)).unwrap();
        let (f, g) = lefschetz11(&m, m.omega()).unwrap();
        assert_eq!(f, TrigPoly::constant(3, Scalar::one()));
        assert!(g.is_zero());
        let p = m.gen(&[1], &[2]);
        let (f, g) = lefschetz11(&m, &p).unwrap();
        assert!(f.is_zero());
        assert_eq!(g, p);
        let (f, g) = lefschetz11(&m, &m.gen(&[1], &[1])).unwrap();
        assert_eq!(f, TrigPoly::constant(3, Scalar::complex((0, 1), (-1, 2))));
        let want = m.gen(&[1], &[1]).sub(&m.gen(&[2], &[2])).scale(&Scalar::ratio(1, 2));
        assert_eq!(g, want);
        assert_eq!(star(&m, &g), g.neg());
    }

    #[test]
    fn as_membership_examples() {
        let m = builtin(BuiltinName::Kt, &rat(1, 1)).unwrap();
        assert!(as_membership(&m, &m.gen(&[], &[1])).unwrap());
        assert!(!as_membership(&m, &m.gen(&[], &[2])).unwrap());
        assert!(as_membership(&m, &m.gen(&[1], &[2])).unwrap());
    }
}
