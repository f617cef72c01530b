//! Exterior derivative and its bidegree components, Hodge star, adjoints, Laplacians,
//! principal symbols and structure diagnostics.
//!
//! Outputs of an operator of differential order `r` are in π^r-units.

mod diagnostics;
mod star;
mod symbol;

use std::fmt;
use std::str::FromStr;

use crate::algebra::{Form, Scalar};
use crate::error::{Error, Result};
use crate::model::{FrameField, Model};

pub use diagnostics::{gauduchon_defect, lck_check, lee_form, LckReport};
pub use star::{star, star_by_definition};
pub use symbol::{ellipticity_check, l_symbol, principal_symbol, EllipticityReport, SymbolFailure};

/// The four bidegree components of `d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Component {
    Mu,
    Del,
    Delbar,
    Mubar,
}

impl Component {
    /// Bidegree shift `(Δp, Δq)`.
    pub fn shift(&self) -> (i32, i32) {
        match self {
            Component::Mu => (2, -1),
            Component::Del => (1, 0),
            Component::Delbar => (0, 1),
            Component::Mubar => (-1, 2),
        }
    }

    /// The component whose adjoint is built from this one by conjugating with star.
    pub fn conj(&self) -> Component {
        match self {
            Component::Mu => Component::Mubar,
            Component::Del => Component::Delbar,
            Component::Delbar => Component::Del,
            Component::Mubar => Component::Mu,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum OperatorKind {
    D,
    Mu,
    Del,
    Delbar,
    Mubar,
    DStar,
    MuStar,
    DelStar,
    DelbarStar,
    MubarStar,
    LapD,
    LapDel,
    LapDelbar,
    LapBc,
    LapAeppli,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 15] = [
        OperatorKind::D,
        OperatorKind::Mu,
        OperatorKind::Del,
        OperatorKind::Delbar,
        OperatorKind::Mubar,
        OperatorKind::DStar,
        OperatorKind::MuStar,
        OperatorKind::DelStar,
        OperatorKind::DelbarStar,
        OperatorKind::MubarStar,
        OperatorKind::LapD,
        OperatorKind::LapDel,
        OperatorKind::LapDelbar,
        OperatorKind::LapBc,
        OperatorKind::LapAeppli,
    ];

    /// Differential order (top block for the fourth-order Laplacians).
    pub fn order(&self) -> u32 {
        use OperatorKind::*;
        match self {
            Mu | Mubar | MuStar | MubarStar => 0,
            D | Del | Delbar | DStar | DelStar | DelbarStar => 1,
            LapD | LapDel | LapDelbar => 2,
            LapBc | LapAeppli => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        use OperatorKind::*;
        match self {
            D => "d",
            Mu => "mu",
            Del => "del",
            Delbar => "delbar",
            Mubar => "mubar",
            DStar => "d_star",
            MuStar => "mu_star",
            DelStar => "del_star",
            DelbarStar => "delbar_star",
            MubarStar => "mubar_star",
            LapD => "lap_d",
            LapDel => "lap_del",
            LapDelbar => "lap_delbar",
            LapBc => "lap_bc",
            LapAeppli => "lap_aeppli",
        }
    }

    pub fn is_laplacian(&self) -> bool {
        self.order() >= 2
    }

    /// Change in total degree.
    pub fn degree_shift(&self) -> i32 {
        use OperatorKind::*;
        match self {
            D | Mu | Del | Delbar | Mubar => 1,
            DStar | MuStar | DelStar | DelbarStar | MubarStar => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = match s {
            "bc" => "lap_bc",
            "aeppli" => "lap_aeppli",
            other => other,
        };
        OperatorKind::ALL.iter().copied().find(|k| k.name() == s).ok_or_else(|| Error::InvalidArgument(format!("unknown operator {s:?}")))
    }
}

/// `d` or one of its components applied termwise, with no homogeneity requirement.
fn d_part(m: &Model, alpha: &Form, part: Option<Component>) -> Form {
    let n = m.n();
    let mut out = Form::zero(n);
    for (b, coeff) in alpha.coeffs() {
        for field in FrameField::all(n) {
            let wanted = matches!(
                (part, field),
                (None, _) | (Some(Component::Del), FrameField::V(_)) | (Some(Component::Delbar), FrameField::Vbar(_))
            );
            if !wanted {
                continue;
            }
            let Some((target, sign)) = field.dual().wedge(b) else {
                continue;
            };
            let deriv = m.apply_field(field, coeff);
            if !deriv.is_zero() {
                out.add_coeff(target, &deriv.scale(&Scalar::from_int(sign as i64)));
            }
        }
        let want = part.map(|c| {
            let (dp, dq) = c.shift();
            (b.p() as i32 + dp, b.q() as i32 + dq)
        });
        for (t, c) in m.d_generator(b).coeffs() {
            if let Some(bd) = want {
                if (t.p() as i32, t.q() as i32) != bd {
                    continue;
                }
            }
            out.add_coeff(*t, &coeff.mul(c));
        }
    }
    out
}

/// Exterior derivative (π-units, order 1).
pub fn apply_d(m: &Model, alpha: &Form) -> Form {
    d_part(m, alpha, None)
}

/// One bidegree component of `d` on a homogeneous form.
pub fn component(m: &Model, alpha: &Form, which: Component) -> Result<Form> {
    if !alpha.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    Ok(d_part(m, alpha, Some(which)))
}

/// A component of `d` on any form (applied bidegree by bidegree).
pub fn apply_component(m: &Model, alpha: &Form, which: Component) -> Form {
    d_part(m, alpha, Some(which))
}

pub fn mu(m: &Model, a: &Form) -> Form {
    apply_component(m, a, Component::Mu)
}

pub fn del(m: &Model, a: &Form) -> Form {
    apply_component(m, a, Component::Del)
}

pub fn delbar(m: &Model, a: &Form) -> Form {
    apply_component(m, a, Component::Delbar)
}

pub fn mubar(m: &Model, a: &Form) -> Form {
    apply_component(m, a, Component::Mubar)
}

/// `T* = −*T'*` where `T'` is `d` for `d` and the conjugate component otherwise.
pub fn adjoint_of(m: &Model, alpha: &Form, base: Option<Component>) -> Form {
    let s = star(m, alpha);
    let inner = match base {
        None => apply_d(m, &s),
        Some(c) => apply_component(m, &s, c.conj()),
    };
    star(m, &inner).neg()
}

pub fn d_star(m: &Model, a: &Form) -> Form {
    adjoint_of(m, a, None)
}

pub fn del_star(m: &Model, a: &Form) -> Form {
    adjoint_of(m, a, Some(Component::Del))
}

pub fn delbar_star(m: &Model, a: &Form) -> Form {
    adjoint_of(m, a, Some(Component::Delbar))
}

/// Formal adjoint of `d` or one of its components. `which` must be one of
/// `d, mu, del, delbar, mubar`.
pub fn adjoint(m: &Model, alpha: &Form, which: OperatorKind) -> Result<Form> {
    let base = match which {
        OperatorKind::D => None,
        OperatorKind::Mu => Some(Component::Mu),
        OperatorKind::Del => Some(Component::Del),
        OperatorKind::Delbar => Some(Component::Delbar),
        OperatorKind::Mubar => Some(Component::Mubar),
        other => return Err(Error::InvalidArgument(format!("no adjoint defined for {other}"))),
    };
    Ok(adjoint_of(m, alpha, base))
}

/// Any first-order or order-zero operator (not the Laplacians).
pub fn apply(m: &Model, kind: OperatorKind, alpha: &Form) -> Result<Form> {
    use OperatorKind::*;
    Ok(match kind {
        D => apply_d(m, alpha),
        Mu => mu(m, alpha),
        Del => del(m, alpha),
        Delbar => delbar(m, alpha),
        Mubar => mubar(m, alpha),
        DStar => adjoint_of(m, alpha, None),
        MuStar => adjoint_of(m, alpha, Some(Component::Mu)),
        DelStar => adjoint_of(m, alpha, Some(Component::Del)),
        DelbarStar => adjoint_of(m, alpha, Some(Component::Delbar)),
        MubarStar => adjoint_of(m, alpha, Some(Component::Mubar)),
        _ => return Err(Error::InvalidArgument(format!("{kind} is a Laplacian; use laplacian()"))),
    })
}

/// Laplacian output split by π-power: `quartic` carries π⁴, `quadratic` carries π².
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaplacianBlocks {
    pub quartic: Form,
    pub quadratic: Form,
}

impl LaplacianBlocks {
    pub fn is_zero(&self) -> bool {
        self.quartic.is_zero() && self.quadratic.is_zero()
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> LaplacianBlocks {
        LaplacianBlocks { quartic: f(&self.quartic), quadratic: f(&self.quadratic) }
    }
}

fn sum(forms: &[Form], n: usize) -> Form {
    forms.iter().fold(Form::zero(n), |acc, f| acc.add(f))
}

pub fn laplacian(m: &Model, alpha: &Form, which: OperatorKind) -> Result<LaplacianBlocks> {
    use OperatorKind::*;
    let n = m.n();
    if matches!(which, LapDel | LapDelbar | LapBc | LapAeppli) && !alpha.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let ds = |a: &Form| del_star(m, a);
    let dbs = |a: &Form| delbar_star(m, a);
    let dl = |a: &Form| del(m, a);
    let dbl = |a: &Form| delbar(m, a);
    let second = |quadratic: Form| LaplacianBlocks { quartic: Form::zero(n), quadratic };
    Ok(match which {
        LapD => second(apply_d(m, &d_star(m, alpha)).add(&d_star(m, &apply_d(m, alpha)))),
        LapDel => second(dl(&ds(alpha)).add(&ds(&dl(alpha)))),
        LapDelbar => second(dbl(&dbs(alpha)).add(&dbs(&dbl(alpha)))),
        LapBc => {
            let quartic = sum(
                &[
                    dl(&dbl(&dbs(&ds(alpha)))),
                    dbs(&ds(&dl(&dbl(alpha)))),
                    ds(&dbl(&dbs(&dl(alpha)))),
                    dbs(&dl(&ds(&dbl(alpha)))),
                ],
                n,
            );
            let quadratic = ds(&dl(alpha)).add(&dbs(&dbl(alpha)));
            LaplacianBlocks { quartic, quadratic }
        }
        LapAeppli => {
            let quartic = sum(
                &[
                    dl(&dbl(&dbs(&ds(alpha)))),
                    dbs(&ds(&dl(&dbl(alpha)))),
                    dl(&dbs(&dbl(&ds(alpha)))),
                    dbl(&ds(&dl(&dbs(alpha)))),
                ],
                n,
            );
            let quadratic = dl(&ds(alpha)).add(&dbl(&dbs(alpha)));
            LaplacianBlocks { quartic, quadratic }
        }
        other => return Err(Error::InvalidArgument(format!("{other} is not a Laplacian"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ModeIndex, TrigPoly};
    use crate::model::{builtin, rat, BuiltinName};

    fn kt(num: i64, den: i64) -> Model {
        builtin(BuiltinName::Kt, &rat(num, den)).unwrap()
    }

    #[test]
    fn d_of_coframe_on_kt() {
        let m = kt(1, 1);
        let g = |i: &[usize], j: &[usize]| m.gen(i, j);
        let want = g(&[1, 2], &[]).add(&g(&[1], &[2])).add(&g(&[2], &[1])).sub(&g(&[], &[1, 2])).scale(&Scalar::from_int(2));
        assert_eq!(apply_d(&m, &g(&[2], &[])), want);
        assert!(apply_d(&m, &m.constant(Scalar::complex((3, 1), (1, 2)))).is_zero());
    }

    #[test]
    fn d_of_character_on_kt() {
        let m = kt(1, 1);
        let chi = m.character(&[1, 0, 0]);
        let k = ModeIndex::new(&[1, 0, 0]);
        let mut want = Form::zero(2);
        want.add_term(crate::algebra::BasisIndex::holo(1), k, &Scalar::i());
        want.add_term(crate::algebra::BasisIndex::anti(1), k, &Scalar::i());
        assert_eq!(apply_d(&m, &chi), want);
    }

    #[test]
    fn components_of_phi2() {
        let m = kt(1, 2);
        let g = |i: &[usize], j: &[usize]| m.gen(i, j);
        let phi2 = g(&[2], &[]);
        // 2δ = 1
        assert_eq!(component(&m, &phi2, Component::Delbar).unwrap(), g(&[1], &[2]).add(&g(&[2], &[1])));
        assert_eq!(component(&m, &phi2, Component::Mubar).unwrap(), g(&[], &[1, 2]).neg());
        assert_eq!(component(&m, &phi2, Component::Del).unwrap(), g(&[1, 2], &[]));
        assert!(component(&m, &phi2, Component::Mu).unwrap().is_zero());
        assert_eq!(component(&m, &g(&[], &[2]), Component::Mu).unwrap(), g(&[1, 2], &[]).neg());
        assert!(component(&m, &phi2.add(&g(&[1], &[1])), Component::Del).is_err());
    }

    #[test]
    fn torus_mu_vanishes() {
        let m = builtin(BuiltinName::Torus4, &rat(1, 1)).unwrap();
        let mut a = Form::zero(2);
        a.add_coeff(crate::algebra::BasisIndex::holo(1), &TrigPoly::mode(ModeIndex::new(&[1, -1, 0, 2]), Scalar::one()));
        assert!(component(&m, &a, Component::Mu).unwrap().is_zero());
    }

    #[test]
    fn operator_names_round_trip() {
        for k in OperatorKind::ALL {
            assert_eq!(k.name().parse::<OperatorKind>().unwrap(), k);
        }
    }

    #[test]
    fn bc_laplacian_on_kt() {
        let m = kt(1, 1);
        let phi11 = m.gen(&[1], &[1]);
        assert!(laplacian(&m, &phi11, OperatorKind::LapBc).unwrap().is_zero());
        let half = kt(1, 2);
        assert!(!laplacian(&half, &half.gen(&[], &[2]), OperatorKind::LapBc).unwrap().is_zero());
        assert!(laplacian(&m, &m.constant(Scalar::one()), OperatorKind::LapD).unwrap().is_zero());
    }
}
