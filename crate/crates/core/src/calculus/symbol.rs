use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{star, OperatorKind};
use crate::algebra::{BasisIndex, Form, Scalar};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::Model;

struct Covector {
    hol: Form,
    anti: Form,
}

impl Covector {
    fn new(m: &Model, xi: &[Scalar]) -> Self {
        let mut hol = Form::zero(m.n());
        for (a, c) in xi.iter().enumerate() {
            hol.add_term(BasisIndex::holo(a + 1), m.zero_mode(), c);
        }
        let anti = hol.conj();
        Covector { hol, anti }
    }
}

fn sym(m: &Model, kind: OperatorKind, xi: &Covector, u: &Form) -> Result<Form> {
    use OperatorKind::*;
    let i = Scalar::i();
    let s = |f: &Form| star(m, f);
    let rec = |k: OperatorKind, f: &Form| sym(m, k, xi, f);
    Ok(match kind {
        Del => xi.hol.wedge(u).scale(&i),
        Delbar => xi.anti.wedge(u).scale(&i),
        D => rec(Del, u)?.add(&rec(Delbar, u)?),
        DelStar => s(&rec(Delbar, &s(u))?).neg(),
        DelbarStar => s(&rec(Del, &s(u))?).neg(),
        DStar => s(&rec(D, &s(u))?).neg(),
        LapD => rec(D, &rec(DStar, u)?)?.add(&rec(DStar, &rec(D, u)?)?),
        LapDel => rec(Del, &rec(DelStar, u)?)?.add(&rec(DelStar, &rec(Del, u)?)?),
        LapDelbar => rec(Delbar, &rec(DelbarStar, u)?)?.add(&rec(DelbarStar, &rec(Delbar, u)?)?),
        LapBc | LapAeppli => {
            let chain = |ops: [OperatorKind; 4]| -> Result<Form> {
                // rightmost operator acts first
                let mut f = u.clone();
                for k in ops.iter().rev() {
                    f = rec(*k, &f)?;
                }
                Ok(f)
            };
            let terms = if kind == LapBc {
                [
                    [Del, Delbar, DelbarStar, DelStar],
                    [DelbarStar, DelStar, Del, Delbar],
                    [DelStar, Delbar, DelbarStar, Del],
                    [DelbarStar, Del, DelStar, Delbar],
                ]
            } else {
                [
                    [Del, Delbar, DelbarStar, DelStar],
                    [DelbarStar, DelStar, Del, Delbar],
                    [Del, DelbarStar, Delbar, DelStar],
                    [Delbar, DelStar, Del, DelbarStar],
                ]
            };
            let mut total = Form::zero(m.n());
            for t in terms {
                total = total.add(&chain(t)?);
            }
            total
        }
        Mu | Mubar | MuStar | MubarStar => {
            return Err(Error::InvalidArgument(format!("{kind} has order 0 and no positive-order principal symbol")))
        }
    })
}

/// Principal symbol at the real covector with (1,0)-part `Σ xi[a] φ^a`, as a matrix
/// from the `(p,q)` basis (columns) to the target basis (rows): the same bidegree for
/// Laplacians, the full target degree otherwise. Carries `i^order`.
pub fn principal_symbol(m: &Model, kind: OperatorKind, bidegree: (usize, usize), xi: &[Scalar]) -> Result<Matrix> {
    if xi.len() != m.n() {
        return Err(Error::InvalidArgument(format!("covector needs {} components", m.n())));
    }
    let (p, q) = bidegree;
    if p > m.n() || q > m.n() {
        return Err(Error::InvalidArgument(format!("bidegree ({p},{q}) out of range")));
    }
    let cov = Covector::new(m, xi);
    let cols = BasisIndex::of_bidegree(m.n(), p, q);
    let rows = if kind.is_laplacian() {
        cols.clone()
    } else {
        let deg = (p + q) as i32 + kind.degree_shift();
        if deg < 0 || deg > 2 * m.n() as i32 {
            Vec::new()
        } else {
            BasisIndex::of_degree(m.n(), deg as usize)
        }
    };
    let mut mat = Matrix::zeros(rows.len(), cols.len());
    for (j, b) in cols.iter().enumerate() {
        let out = sym(m, kind, &cov, &Form::generator(m.n(), m.dims(), *b, Scalar::one()))?;
        for (t, c) in out.coeffs() {
            let i = rows.iter().position(|r| r == t).ok_or_else(|| Error::InvalidArgument(format!("symbol of {kind} leaves the target bundle")))?;
            mat.rows[i][j] = c.coeff(&m.zero_mode());
        }
    }
    Ok(mat)
}

/// Symbol of `L f = −i*(∂∂̄f ∧ ω)` at a covector (a scalar, π² units).
pub fn l_symbol(m: &Model, xi: &[Scalar]) -> Scalar {
    let cov = Covector::new(m, xi);
    let one = m.constant(Scalar::one());
    let ddbar = cov.hol.wedge(&cov.anti.wedge(&one).scale(&Scalar::i())).scale(&Scalar::i());
    let s = star(m, &ddbar.wedge(m.omega()));
    &s.coeff(&BasisIndex::ONE).coeff(&m.zero_mode()) * &(-Scalar::i())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolFailure {
    pub sample: usize,
    pub bidegree: (usize, usize),
    pub xi: Vec<Scalar>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EllipticityReport {
    pub operator: OperatorKind,
    pub samples: usize,
    pub skipped_zero: usize,
    /// Number of (sample, bidegree) symbol matrices examined.
    pub matrices_checked: usize,
    pub failures: Vec<SymbolFailure>,
    /// Sign of `Re σ(L)` over the samples: `1`, `-1`, or `0` if mixed or vanishing.
    pub l_sign: i32,
    /// Smallest `|σ(L)| / |ξ|²` seen.
    pub l_min_ratio: Option<BigRational>,
    /// `σ(L)` had zero imaginary part on every sample.
    pub l_real: bool,
}

impl EllipticityReport {
    pub fn all_invertible(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn l_definite(&self) -> bool {
        self.l_real && self.l_sign != 0 && self.l_min_ratio.as_ref().is_some_and(|r| r.is_positive())
    }
}

fn random_covector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n)
        .map(|_| {
            let mut part = || (rng.gen_range(-4i64..=4), rng.gen_range(1i64..=3));
            Scalar::complex(part(), part())
        })
        .collect()
}

/// Checks invertibility of the principal symbol of a Laplacian on every bidegree at
/// `samples` seeded covectors, plus definiteness of the symbol of `L`.
pub fn ellipticity_check(m: &Model, kind: OperatorKind, samples: usize, seed: u64) -> Result<EllipticityReport> {
    if kind.order() == 0 {
        return Err(Error::InvalidArgument(format!("{kind} has order 0")));
    }
    if !kind.is_laplacian() {
        return Err(Error::InvalidArgument(format!("{kind} maps between different bundles; ellipticity is checked for Laplacians")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.n();
    let mut report = EllipticityReport {
        operator: kind,
        samples,
        skipped_zero: 0,
        matrices_checked: 0,
        failures: Vec::new(),
        l_sign: 0,
        l_min_ratio: None,
        l_real: true,
    };
    let mut signs = Vec::new();
    for sample in 0..samples {
        let xi = random_covector(&mut rng, n);
        if xi.iter().all(Scalar::is_zero) {
            report.skipped_zero += 1;
            continue;
        }
        for p in 0..=n {
            for q in 0..=n {
                let mat = principal_symbol(m, kind, (p, q), &xi)?;
                report.matrices_checked += 1;
                if mat.rank() != mat.cols {
                    report.failures.push(SymbolFailure { sample, bidegree: (p, q), xi: xi.clone() });
                }
            }
        }
        let value = l_symbol(m, &xi);
        let cov = Covector::new(m, &xi);
        let full = cov.hol.add(&cov.anti);
        let norm = full.inner(&full, m.norms()).coeff(&m.zero_mode()).re;
        report.l_real &= value.im.is_zero();
        let ratio = value.re.abs() / norm;
        signs.push(crate::algebra::scalar::rational_sign(&value.re));
        report.l_min_ratio = Some(match report.l_min_ratio.take() {
            Some(r) if r < ratio => r,
            _ => ratio,
        });
    }
    report.l_sign = match signs.first() {
        Some(&s) if signs.iter().all(|&t| t == s) => s,
        _ => 0,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, rat, BuiltinName};

    fn kt() -> Model {
        builtin(BuiltinName::Kt, &rat(1, 1)).unwrap()
    }

    #[test]
    fn zero_covector_gives_zero_symbol() {
        let m = kt();
        let z = vec![Scalar::zero(); 2];
        let mat = principal_symbol(&m, OperatorKind::LapBc, (0, 0), &z).unwrap();
        assert!(mat.rows.iter().flatten().all(Scalar::is_zero));
    }

    #[test]
    fn bc_symbol_on_functions() {
        // only ∂̄*∂*∂∂̄ survives on functions; with unit norms it is (|a|²+|b|²)²
        let m = kt();
        let xi = vec![Scalar::complex((1, 1), (2, 1)), Scalar::complex((-3, 2), (0, 1))];
        let mat = principal_symbol(&m, OperatorKind::LapBc, (0, 0), &xi).unwrap();
        let s: BigRational = xi.iter().map(Scalar::norm_sqr).sum();
        assert_eq!(mat.rows[0][0], Scalar::from_rational(&s * &s));
    }

    #[test]
    fn delbar_symbol_on_functions() {
        let m = kt();
        let xi = vec![Scalar::complex((1, 1), (2, 1)), Scalar::complex((-3, 2), (0, 1))];
        let mat = principal_symbol(&m, OperatorKind::LapDelbar, (0, 0), &xi).unwrap();
        let s: BigRational = xi.iter().map(Scalar::norm_sqr).sum();
        assert_eq!(mat.rows[0][0], Scalar::from_rational(s));
    }

    #[test]
    fn l_symbol_positive_on_kt() {
        let m = kt();
        let xi = vec![Scalar::complex((1, 1), (2, 1)), Scalar::complex((-3, 2), (0, 1))];
        let s: BigRational = xi.iter().map(Scalar::norm_sqr).sum();
        assert_eq!(l_symbol(&m, &xi), Scalar::from_rational(s));
    }

    #[test]
    fn order_zero_rejected() {
        let m = kt();
        assert!(ellipticity_check(&m, OperatorKind::Mu, 3, 1).is_err());
        assert!(principal_symbol(&m, OperatorKind::Mubar, (0, 0), &[Scalar::one(), Scalar::one()]).is_err());
    }
}
