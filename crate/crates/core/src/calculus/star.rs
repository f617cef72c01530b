use crate::algebra::{BasisIndex, Form, Scalar};
use crate::linalg::Matrix;
use crate::model::Model;

/// Hodge star from the precomputed generator table. Complex-linear, pointwise.
pub fn star(m: &Model, alpha: &Form) -> Form {
    let mut out = Form::zero(m.n());
    for (b, coeff) in alpha.coeffs() {
        let (t, c) = m.star_generator(b);
        out.add_coeff(*t, &coeff.scale(c));
    }
    out
}

/// Hodge star by solving `e_A ∧ X = ⟨e_A, conj γ⟩ vol` for every generator `e_A`,
/// independently of the sign table. Slow; used as a reference.
pub fn star_by_definition(m: &Model, alpha: &Form) -> Form {
    let n = m.n();
    let dims = m.dims();
    let all = BasisIndex::all(n);
    let top = BasisIndex::top(n);
    let zero = m.zero_mode();
    let v = m.volume_factor();
    let gen = |b: BasisIndex| Form::generator(n, dims, b, Scalar::one());
    // system[A][B] = top coefficient of e_A ∧ e_B
    let rows: Vec<Vec<Scalar>> = all
        .iter()
        .map(|a| all.iter().map(|b| gen(*a).wedge(&gen(*b)).coeff(&top).coeff(&zero)).collect())
        .collect();
    let system = Matrix::from_rows(rows, all.len());
    let mut out = Form::zero(n);
    for (b, coeff) in alpha.coeffs() {
        let conj_gamma = gen(*b).conj();
        let rhs: Vec<Scalar> = all.iter().map(|a| &gen(*a).inner(&conj_gamma, m.norms()).coeff(&zero) * &v).collect();
        let x = system.solve(&rhs).expect("wedge pairing is nondegenerate");
        for (target, c) in all.iter().zip(&x) {
            if !c.is_zero() {
                out.add_coeff(*target, &coeff.scale(c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModeIndex;
    use crate::model::{builtin, rat, BuiltinName};

    fn models() -> Vec<Model> {
        vec![
            builtin(BuiltinName::Kt, &rat(1, 1)).unwrap(),
            builtin(BuiltinName::Hyperelliptic, &rat(0, 1)).unwrap(),
            builtin(BuiltinName::Torus4, &rat(0, 1)).unwrap(),
        ]
    }

    #[test]
    fn table_matches_defining_relation_on_generators() {
        for m in models() {
            for b in BasisIndex::all(2) {
                let g = Form::generator(2, m.dims(), b, Scalar::one());
                assert_eq!(star(&m, &g), star_by_definition(&m, &g), "{} {b:?}", m.name());
            }
        }
    }

    #[test]
    fn star_examples() {
        for m in models() {
            assert_eq!(star(&m, &m.constant(Scalar::one())), m.volume().clone());
            assert_eq!(star(&m, m.omega()), m.omega().clone());
            assert_eq!(star(&m, m.volume()), m.constant(Scalar::one()));
        }
        let ms = models();
        let kt = &ms[0];
        let g = kt.gen(&[1], &[2]);
        assert_eq!(star_by_definition(kt, &g), g.neg());
        assert_eq!(star_by_definition(kt, &kt.gen(&[1], &[1])), kt.gen(&[2], &[2]));
        assert_eq!(star_by_definition(kt, &kt.gen(&[], &[2])), kt.gen(&[1], &[1, 2]).neg());
    }

    #[test]
    fn star_squared_sign() {
        for m in models() {
            for b in BasisIndex::all(2) {
                let g = Form::term(2, b, ModeIndex::zero(m.dims()), Scalar::complex((1, 2), (3, 1)));
                let sign = if b.degree() % 2 == 0 { 1 } else { -1 };
                assert_eq!(star(&m, &star(&m, &g)), g.scale(&Scalar::from_int(sign)));
            }
        }
    }
}
