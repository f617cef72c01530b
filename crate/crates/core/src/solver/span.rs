use std::collections::BTreeMap;

use crate::algebra::{BasisIndex, Form, ModeIndex, Scalar};
use crate::linalg::{canonical_basis, Matrix};

type Key = (ModeIndex, BasisIndex);

/// Coordinates of each form over the union of their supports, ordered by (mode, generator).
fn coordinates(forms: &[&Form]) -> (Vec<Key>, Vec<Vec<Scalar>>) {
    let mut keys: BTreeMap<Key, usize> = BTreeMap::new();
    for f in forms {
        for (b, c) in f.coeffs() {
            for (k, _) in c.terms() {
                keys.insert((*k, *b), 0);
            }
        }
    }
    for (i, v) in keys.values_mut().enumerate() {
        *v = i;
    }
    let rows = forms
        .iter()
        .map(|f| {
            let mut row = vec![Scalar::zero(); keys.len()];
            for (b, c) in f.coeffs() {
                for (k, s) in c.terms() {
                    row[keys[&(*k, *b)]] = s.clone();
                }
            }
            row
        })
        .collect();
    (keys.into_keys().collect(), rows)
}

/// Reduced echelon basis of the span: unique for the subspace, each element's first
/// nonzero coordinate (in (mode, generator) order) equal to 1.
pub fn canonical_span(forms: &[Form]) -> Vec<Form> {
    let Some(first) = forms.first() else {
        return Vec::new();
    };
    let n = first.rank();
    let refs: Vec<&Form> = forms.iter().collect();
    let (keys, rows) = coordinates(&refs);
    canonical_basis(rows, keys.len())
        .into_iter()
        .map(|row| {
            let mut f = Form::zero(n);
            for ((k, b), c) in keys.iter().zip(&row) {
                f.add_term(*b, *k, c);
            }
            f
        })
        .collect()
}

pub fn span_rank(forms: &[Form]) -> usize {
    if forms.is_empty() {
        return 0;
    }
    let refs: Vec<&Form> = forms.iter().collect();
    let (keys, rows) = coordinates(&refs);
    Matrix::from_rows(rows, keys.len()).rank()
}

pub fn in_span(basis: &[Form], f: &Form) -> bool {
    let mut all = basis.to_vec();
    all.push(f.clone());
    span_rank(&all) == span_rank(basis)
}
