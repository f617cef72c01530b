use num_rational::BigRational;

use super::{DeckRule, FrameField, Model};
use crate::algebra::{BasisIndex, Form, ModeIndex, Scalar, TrigPoly};
use crate::calculus::{apply_d, d_star, del, delbar, mu, mubar};
use crate::sampling::{FormSampler, Shape};

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    /// Random forms per identity check.
    pub samples: usize,
    pub seed: u64,
    /// Characters `χ_κ` with `|κ|∞ ≤ char_box` are checked for `d² = 0`.
    pub char_box: u32,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { samples: 100, seed: 20_240_611, char_box: 2 }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Input form exhibiting the failure.
    pub witness: Option<String>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn ok(name: &'static str, detail: String) -> CheckResult {
    CheckResult { name, passed: true, detail, witness: None }
}

fn fail(name: &'static str, detail: String, witness: &Form) -> CheckResult {
    CheckResult { name, passed: false, detail, witness: Some(witness.to_string()) }
}

/// Runs every consistency check and reports each one with a witness on failure.
pub fn validate(m: &Model, opts: &ValidateOptions) -> ValidationReport {
    let checks = vec![
        check_d_squared(m, opts),
        check_relations(m, opts),
        check_metric(m),
        check_adjointness(m, opts),
        check_reality(m, opts),
        check_decks(m, opts),
    ];
    ValidationReport { model: m.name().to_string(), checks }
}

fn check_d_squared(m: &Model, opts: &ValidateOptions) -> CheckResult {
    let name = "d_squared";
    let mut inputs: Vec<Form> = (1..=m.n()).flat_map(|a| [m.gen(&[a], &[]), m.gen(&[], &[a])]).collect();
    inputs.extend(ModeIndex::cube(m.dims(), opts.char_box).into_iter().map(|k| Form::term(m.n(), BasisIndex::ONE, k, Scalar::one())));
    let total = inputs.len();
    for f in inputs {
        let dd = apply_d(m, &apply_d(m, &f));
        if !dd.is_zero() {
            return fail(name, format!("d(d α) = {dd}"), &f);
        }
    }
    ok(name, format!("d∘d = 0 on {total} generators and characters"))
}

/// The seven identities `(d²)^{p+a,q+b} = 0` for `a+b = 2`, plus `μ+∂+∂̄+μ̄ = d`.
fn check_relations(m: &Model, opts: &ValidateOptions) -> CheckResult {
    let name = "component_relations";
    let mut sampler = FormSampler::new(opts.seed);
    for _ in 0..opts.samples {
        let a = sampler.homogeneous(m);
        let (mu_a, del_a, delbar_a, mubar_a) = (mu(m, &a), del(m, &a), delbar(m, &a), mubar(m, &a));
        let sum = mu_a.add(&del_a).add(&delbar_a).add(&mubar_a);
        if sum != apply_d(m, &a) {
            return fail(name, "components do not sum to d".into(), &a);
        }
        let relations: [(&str, Form); 7] = [
            ("μ²", mu(m, &mu_a)),
            ("μ∂+∂μ", mu(m, &del_a).add(&del(m, &mu_a))),
            ("μ∂̄+∂̄μ+∂²", mu(m, &delbar_a).add(&delbar(m, &mu_a)).add(&del(m, &del_a))),
            ("μμ̄+∂∂̄+∂̄∂+μ̄μ", mu(m, &mubar_a).add(&del(m, &delbar_a)).add(&delbar(m, &del_a)).add(&mubar(m, &mu_a))),
            ("μ̄∂+∂μ̄+∂̄²", mubar(m, &del_a).add(&del(m, &mubar_a)).add(&delbar(m, &delbar_a))),
            ("μ̄∂̄+∂̄μ̄", mubar(m, &delbar_a).add(&delbar(m, &mubar_a))),
            ("μ̄²", mubar(m, &mubar_a)),
        ];
        for (label, value) in relations {
            if !value.is_zero() {
                return fail(name, format!("{label} ≠ 0: {value}"), &a);
            }
        }
    }
    ok(name, format!("seven relations hold on {} random forms", opts.samples))
}

fn check_metric(m: &Model) -> CheckResult {
    let name = "metric";
    let n = m.n();
    let omega = m.omega();
    let zero = m.zero_mode();
    if omega.bidegree() != Some((1, 1)) || omega.conj() != *omega {
        return fail(name, "ω must be a real (1,1)-form".into(), omega);
    }
    let norm = omega.inner(omega, m.norms());
    let want = TrigPoly::constant(m.dims(), Scalar::from_int(n as i64));
    if norm != want {
        return fail(name, format!("⟨ω,ω⟩ = {} ≠ {n}", norm.coeff(&zero)), omega);
    }
    let mut power = m.constant(Scalar::one());
    let mut factorial = 1i64;
    for k in 1..=n {
        power = power.wedge(omega);
        factorial *= k as i64;
    }
    let top = power.scale(&Scalar::from_rational(BigRational::new(1.into(), factorial.into())));
    if top != *m.volume() {
        return fail(name, format!("ωⁿ/n! = {top} differs from the volume form"), m.volume());
    }
    let vol_norm = m.volume().inner(m.volume(), m.norms());
    if vol_norm != TrigPoly::constant(m.dims(), Scalar::one()) {
        return fail(name, "|vol|² ≠ 1".into(), m.volume());
    }
    ok(name, format!("⟨ω,ω⟩ = {n}, ωⁿ/n! = vol, |vol|² = 1"))
}

fn check_adjointness(m: &Model, opts: &ValidateOptions) -> CheckResult {
    let name = "adjointness";
    let mut sampler = FormSampler::new(opts.seed ^ 0x5eed);
    let n = m.n();
    for _ in 0..opts.samples {
        let k = sampler.index(2 * n);
        let a = sampler.form(m, Shape::Degree(k));
        let b = sampler.form(m, Shape::Degree(k + 1));
        let lhs = apply_d(m, &a).l2_inner(&b, m.norms());
        let rhs = a.l2_inner(&d_star(m, &b), m.norms());
        if lhs != rhs {
            return fail(name, format!("(dα,β) = {lhs} but (α,d*β) = {rhs}; β = {b}"), &a);
        }
    }
    ok(name, format!("(dα,β) = (α,d*β) on {} random pairs", opts.samples))
}

/// `conj(V_a χ_κ) = V̄_a χ_{−κ}`.
fn check_reality(m: &Model, opts: &ValidateOptions) -> CheckResult {
    let name = "frame_reality";
    for a in 1..=m.n() {
        for k in ModeIndex::cube(m.dims(), opts.char_box) {
            let chi = TrigPoly::mode(k, Scalar::one());
            let lhs = m.apply_field(FrameField::V(a), &chi).conj();
            let rhs = m.apply_field(FrameField::Vbar(a), &chi.conj());
            if lhs != rhs {
                return fail(name, format!("V̄{a} is not the conjugate of V{a}"), &Form::function(m.n(), chi));
            }
        }
    }
    ok(name, "V̄_a = conj V_a on the character box".into())
}

fn check_decks(m: &Model, opts: &ValidateOptions) -> CheckResult {
    let name = "deck_rules";
    let modes = ModeIndex::cube(m.dims(), opts.char_box);
    let fields = FrameField::all(m.n());
    for rule in m.decks() {
        match rule {
            DeckRule::Parity { index, modulus } => {
                let bad = m.spec().derivations.values().flatten().any(|t| (t.shift.get(*index) as i64).rem_euclid(*modulus) != 0);
                if bad {
                    return CheckResult {
                        name,
                        passed: false,
                        detail: format!("a frame-field shift breaks the parity rule on index {index}"),
                        witness: None,
                    };
                }
            }
            DeckRule::Involution { map, phase } => {
                let act = |f: &TrigPoly| -> TrigPoly {
                    let mut out = TrigPoly::zero();
                    for (k, c) in f.terms() {
                        let s = DeckRule::phase_sign(phase.eval(k));
                        out.add_term(DeckRule::map_mode(map, k), &c.scale(&BigRational::from_integer(s.into())));
                    }
                    out
                };
                for k in &modes {
                    let image = DeckRule::map_mode(map, k);
                    let chi = Form::term(m.n(), BasisIndex::ONE, *k, Scalar::one());
                    if DeckRule::map_mode(map, &image) != *k {
                        return fail(name, "involution map is not an involution".into(), &chi);
                    }
                    if (phase.eval(k) + phase.eval(&image)).rem_euclid(2) != 0 {
                        return fail(name, "involution phase is inconsistent".into(), &chi);
                    }
                    let f = TrigPoly::mode(*k, Scalar::one());
                    for field in &fields {
                        if m.apply_field(*field, &act(&f)) != act(&m.apply_field(*field, &f)) {
                            return fail(name, format!("involution does not commute with {field}"), &chi);
                        }
                    }
                }
            }
        }
    }
    ok(name, format!("{} deck rules consistent", m.decks().len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin, rat, BuiltinName, Model, StructureCoeff};

    fn quick() -> ValidateOptions {
        ValidateOptions { samples: 10, ..ValidateOptions::default() }
    }

    #[test]
    fn builtins_pass() {
        for name in [BuiltinName::Kt, BuiltinName::Hyperelliptic, BuiltinName::Torus4] {
            let m = builtin(name, &rat(1, 1)).unwrap();
            let r = validate(&m, &quick());
            assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn corrupted_structure_fails_d_squared() {
        let m = builtin(BuiltinName::Kt, &rat(1, 1)).unwrap();
        let mut spec = m.spec().clone();
        spec.structure[1][0].1 = StructureCoeff { c0: Scalar::zero(), cdelta: Scalar::from_int(3) };
        let bad = Model::new(spec).unwrap();
        let r = validate(&bad, &quick());
        assert!(!r.check("d_squared").unwrap().passed);
        assert!(r.check("d_squared").unwrap().witness.is_some());
    }

    #[test]
    fn wrong_volume_fails_metric() {
        let m = builtin(BuiltinName::Kt, &rat(1, 1)).unwrap();
        let mut spec = m.spec().clone();
        spec.metric.volume = spec.metric.volume.scale(&Scalar::from_int(2));
        let bad = Model::new(spec).unwrap();
        let r = validate(&bad, &quick());
        assert!(!r.check("metric").unwrap().passed);
        assert!(r.check("d_squared").unwrap().passed);
    }
}
