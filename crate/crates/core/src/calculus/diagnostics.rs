use super::{apply_d, d_star, del, delbar};
use crate::algebra::{BasisIndex, Form, Scalar};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::Model;

/// `∂∂̄ω` (π² units). In real dimension 4 this vanishes exactly for Gauduchon metrics.
pub fn gauduchon_defect(m: &Model) -> Result<Form> {
    if m.n() != 2 {
        return Err(Error::InvalidArgument("the defect ∂∂̄ω is only meaningful for n = 2".into()));
    }
    Ok(del(m, &delbar(m, m.omega())))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LckReport {
    pub d_omega: Form,
    pub theta_wedge_omega: Form,
    /// `dω = θ∧ω`.
    pub conformal: bool,
    /// `dθ = 0`.
    pub closed: bool,
    /// `dθ = 0`, `d*θ = 0` and `θ ≠ 0`: a nonzero harmonic class, hence not exact.
    pub harmonic_nonzero: bool,
}

/// Checks the locally conformally almost Kähler relations for a given Lee form `θ` (π-units).
pub fn lck_check(m: &Model, theta: &Form) -> LckReport {
    let d_omega = apply_d(m, m.omega());
    let theta_wedge_omega = theta.wedge(m.omega());
    let closed = apply_d(m, theta).is_zero();
    let harmonic_nonzero = closed && d_star(m, theta).is_zero() && !theta.is_zero();
    LckReport { conformal: d_omega == theta_wedge_omega, d_omega, theta_wedge_omega, closed, harmonic_nonzero }
}

/// Solves `θ∧ω = dω` for a 1-form `θ`, mode by mode. `None` if no solution exists.
pub fn lee_form(m: &Model) -> Option<Form> {
    let n = m.n();
    let d_omega = apply_d(m, m.omega());
    let ones = BasisIndex::of_degree(n, 1);
    let threes = BasisIndex::of_degree(n, 3);
    let mut rows: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); ones.len()]; threes.len()];
    for (j, b) in ones.iter().enumerate() {
        let img = Form::generator(n, m.dims(), *b, Scalar::one()).wedge(m.omega());
        for (t, c) in img.coeffs() {
            let i = threes.iter().position(|x| x == t)?;
            rows[i][j] = c.coeff(&m.zero_mode());
        }
    }
    let system = Matrix::from_rows(rows, ones.len());
    let mut theta = Form::zero(n);
    for k in d_omega.modes() {
        let rhs: Vec<Scalar> = threes.iter().map(|t| d_omega.coeff(t).coeff(&k)).collect();
        // augment and reduce; an inconsistent pivot in the last column means no solution
        let mut aug = Matrix::from_rows(
            system.rows.iter().zip(&rhs).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect(),
            ones.len() + 1,
        );
        let pivots = aug.rref();
        if pivots.contains(&ones.len()) {
            return None;
        }
        for (i, &p) in pivots.iter().enumerate() {
            theta.add_term(ones[p], k, &aug.rows[i][ones.len()]);
        }
    }
    Some(theta)
}
