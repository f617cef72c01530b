//! Invariant almost-Hermitian models: coframe structure equations, frame action on
//! Fourier characters, deck rules and metric data.
//!
//! Every first-order quantity is stored in π-units: the true structure constants and
//! frame-action coefficients are π times the stored Gaussian rationals.

mod builtin;
mod file;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{BasisIndex, Form, ModeIndex, Scalar, TrigPoly};
use crate::error::{Error, Result};

pub use builtin::{builtin, BuiltinName};
pub use file::{load_model, load_model_str, to_document};
pub use validate::{validate, CheckResult, ValidateOptions, ValidationReport};

/// `c0 + Σ k_j κ_j + cdelta·δ`, evaluated per source mode.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Affine {
    pub c0: Scalar,
    pub k: Vec<Scalar>,
    pub cdelta: Scalar,
}

impl Affine {
    pub fn eval(&self, mode: &ModeIndex, delta: &BigRational) -> Scalar {
        let mut v = &self.c0 + &self.cdelta.scale(delta);
        for (c, &x) in self.k.iter().zip(mode.components()) {
            if x != 0 && !c.is_zero() {
                v += &(c * &Scalar::from_int(x as i64));
            }
        }
        v
    }

    /// Affine form depending only on κ.
    pub fn linear(k: Vec<Scalar>) -> Self {
        Affine { c0: Scalar::zero(), k, cdelta: Scalar::zero() }
    }
}

/// One term of a frame field acting on a character: `χ_κ ↦ coeff(κ,δ)·χ_{κ+shift}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivTerm {
    pub shift: ModeIndex,
    pub affine: Affine,
}

/// Frame field identifiers: `V_a` (holomorphic) and `V̄_a`, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FrameField {
    V(usize),
    Vbar(usize),
}

impl FrameField {
    /// The dual coframe generator.
    pub fn dual(&self) -> BasisIndex {
        match *self {
            FrameField::V(a) => BasisIndex::holo(a),
            FrameField::Vbar(a) => BasisIndex::anti(a),
        }
    }

    pub fn conj(&self) -> FrameField {
        match *self {
            FrameField::V(a) => FrameField::Vbar(a),
            FrameField::Vbar(a) => FrameField::V(a),
        }
    }

    pub fn all(n: usize) -> Vec<FrameField> {
        (1..=n).map(FrameField::V).chain((1..=n).map(FrameField::Vbar)).collect()
    }
}

impl fmt::Display for FrameField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameField::V(a) => write!(f, "V{a}"),
            FrameField::Vbar(a) => write!(f, "Vbar{a}"),
        }
    }
}

/// Coefficient `c0 + cdelta·δ` of a structure-equation term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureCoeff {
    pub c0: Scalar,
    pub cdelta: Scalar,
}

impl StructureCoeff {
    pub fn eval(&self, delta: &BigRational) -> Scalar {
        &self.c0 + &self.cdelta.scale(delta)
    }
}

/// Integer-valued affine form used as a deck phase exponent: `e^{iπ(c0 + Σ k_j κ_j)}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntAffine {
    pub c0: i64,
    pub k: Vec<i64>,
}

impl IntAffine {
    pub fn eval(&self, mode: &ModeIndex) -> i64 {
        self.c0 + self.k.iter().zip(mode.components()).map(|(a, &b)| a * b as i64).sum::<i64>()
    }
}

/// Condition a cover character combination must satisfy to descend to the quotient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DeckRule {
    /// `κ_index ≡ 0 (mod modulus)`.
    Parity { index: usize, modulus: i64 },
    /// `c_{Aκ} = e^{iπ·phase(κ)} c_κ` with `A` an integer matrix, `A² = id`.
    Involution { map: Vec<Vec<i64>>, phase: IntAffine },
}

impl DeckRule {
    pub fn map_mode(map: &[Vec<i64>], mode: &ModeIndex) -> ModeIndex {
        let c = mode.components();
        let out: Vec<i32> = map.iter().map(|row| row.iter().zip(c).map(|(a, &b)| a * b as i64).sum::<i64>() as i32).collect();
        ModeIndex::new(&out)
    }

    /// `±1` from an integer phase exponent.
    pub fn phase_sign(exponent: i64) -> i64 {
        if exponent.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

/// Metric data: squared norms of the coframe generators, fundamental form, volume form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MetricSpec {
    pub norms: Vec<BigRational>,
    pub omega: Form,
    pub volume: Form,
}

/// Plain, freely editable model data. Turn into a [`Model`] with [`Model::new`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelSpec {
    pub name: String,
    pub n: usize,
    pub fourier_dims: usize,
    pub char_base: BigRational,
    pub delta: BigRational,
    /// `structure[a-1]` lists the terms of `dφ^a`.
    pub structure: Vec<Vec<(BasisIndex, StructureCoeff)>>,
    pub derivations: BTreeMap<FrameField, Vec<DerivTerm>>,
    pub decks: Vec<DeckRule>,
    pub metric: MetricSpec,
}

/// Immutable model with lazily built operator tables.
pub struct Model {
    spec: ModelSpec,
    tables: OnceLock<Tables>,
}

struct Tables {
    /// `d` of every basis generator (constant forms).
    gen_d: BTreeMap<BasisIndex, Form>,
    /// `*φ^B = c·φ^{B'}`.
    star: BTreeMap<BasisIndex, (BasisIndex, Scalar)>,
    /// Frame-action terms with δ substituted: (shift, c0 + cdelta·δ, k).
    fields: BTreeMap<FrameField, Vec<(ModeIndex, Scalar, Vec<Scalar>)>>,
}

impl Clone for Model {
    fn clone(&self) -> Self {
        Model::from_spec_unchecked(self.spec.clone())
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model").field("name", &self.spec.name).field("delta", &self.spec.delta).finish()
    }
}

impl Model {
    /// Checks shapes (ranks, dimensions, table sizes). Integrability is checked by [`validate`].
    pub fn new(spec: ModelSpec) -> Result<Self> {
        check_shapes(&spec)?;
        Ok(Model::from_spec_unchecked(spec))
    }

    fn from_spec_unchecked(spec: ModelSpec) -> Self {
        Model { spec, tables: OnceLock::new() }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn dims(&self) -> usize {
        self.spec.fourier_dims
    }

    pub fn delta(&self) -> &BigRational {
        &self.spec.delta
    }

    pub fn norms(&self) -> &[BigRational] {
        &self.spec.metric.norms
    }

    pub fn omega(&self) -> &Form {
        &self.spec.metric.omega
    }

    pub fn volume(&self) -> &Form {
        &self.spec.metric.volume
    }

    pub fn decks(&self) -> &[DeckRule] {
        &self.spec.decks
    }

    /// Coefficient `v` with `vol = v·φ^{1…n 1̄…n̄}`.
    pub fn volume_factor(&self) -> Scalar {
        self.volume().coeff(&BasisIndex::top(self.n())).coeff(&ModeIndex::zero(self.dims()))
    }

    /// True when no frame-field term shifts modes (characters decouple).
    pub fn is_shift_free(&self) -> bool {
        self.max_shift() == 0
    }

    /// Largest sup-norm of any derivation shift.
    pub fn max_shift(&self) -> u32 {
        self.spec.derivations.values().flatten().map(|t| t.shift.sup_norm()).max().unwrap_or(0)
    }

    pub fn zero_mode(&self) -> ModeIndex {
        ModeIndex::zero(self.dims())
    }

    /// Constant generator `c·φ^B` on this model.
    pub fn gen(&self, i: &[usize], j: &[usize]) -> Form {
        Form::basis(self.n(), self.dims(), i, j)
    }

    pub fn constant(&self, c: Scalar) -> Form {
        Form::generator(self.n(), self.dims(), BasisIndex::ONE, c)
    }

    /// Character `χ_κ` as a 0-form.
    pub fn character(&self, mode: &[i32]) -> Form {
        Form::term(self.n(), BasisIndex::ONE, ModeIndex::new(mode), Scalar::one())
    }

    /// Same model with the metric scaled by `λ`: generator norms `g_a/λ`, `ω ↦ λω`, `vol ↦ λⁿ vol`.
    pub fn scaled_metric(&self, lambda: &BigRational) -> Result<Model> {
        if *lambda <= BigRational::zero() {
            return Err(Error::InvalidArgument("metric scale must be positive".into()));
        }
        let mut spec = self.spec.clone();
        spec.metric.norms = spec.metric.norms.iter().map(|g| g / lambda).collect();
        let l = Scalar::from_rational(lambda.clone());
        spec.metric.omega = spec.metric.omega.scale(&l);
        spec.metric.volume = spec.metric.volume.scale(&l.powi(spec.n as i32));
        spec.name = format!("{}*{}", spec.name, crate::algebra::fmt_rational(lambda));
        Model::new(spec)
    }

    fn tables(&self) -> &Tables {
        self.tables.get_or_init(|| build_tables(&self.spec))
    }

    /// `d φ^B` for a constant generator.
    pub fn d_generator(&self, b: &BasisIndex) -> &Form {
        &self.tables().gen_d[b]
    }

    /// Star table entry for a generator.
    pub fn star_generator(&self, b: &BasisIndex) -> &(BasisIndex, Scalar) {
        &self.tables().star[b]
    }

    /// `dφ^a` (a is 1-based) with δ substituted.
    pub fn d_coframe(&self, a: usize) -> Form {
        let mut f = Form::zero(self.n());
        for (b, c) in &self.spec.structure[a - 1] {
            f.add_term(*b, self.zero_mode(), &c.eval(self.delta()));
        }
        f
    }

    /// A frame field applied to a Fourier polynomial (π-units).
    pub fn apply_field(&self, field: FrameField, f: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero();
        let Some(terms) = self.tables().fields.get(&field) else {
            return out;
        };
        for (k, c) in f.terms() {
            for (shift, base, lin) in terms {
                let mut coeff = base.clone();
                for (l, &x) in lin.iter().zip(k.components()) {
                    if x != 0 && !l.is_zero() {
                        coeff += &(l * &Scalar::from_int(x as i64));
                    }
                }
                if !coeff.is_zero() {
                    out.add_term(k.add(shift), &(c * &coeff));
                }
            }
        }
        out
    }

    /// True if `mode` satisfies every parity rule.
    pub fn parity_ok(&self, mode: &ModeIndex) -> bool {
        self.decks().iter().all(|r| match r {
            DeckRule::Parity { index, modulus } => (mode.get(*index) as i64).rem_euclid(*modulus) == 0,
            DeckRule::Involution { .. } => true,
        })
    }
}

fn check_shapes(spec: &ModelSpec) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidModel(m));
    if spec.n == 0 || spec.n > 4 {
        return bad(format!("coframe rank {} outside 1..=4", spec.n));
    }
    if spec.fourier_dims > crate::algebra::trig::MAX_FOURIER_DIMS {
        return bad(format!("fourier_dims {} exceeds 4", spec.fourier_dims));
    }
    if spec.structure.len() != spec.n {
        return bad(format!("structure table has {} entries, expected {}", spec.structure.len(), spec.n));
    }
    for (a, terms) in spec.structure.iter().enumerate() {
        for (b, _) in terms {
            if b.degree() != 2 || (b.hol_mask() | b.anti_mask()) >> spec.n != 0 {
                return bad(format!("structure entry for generator {} has invalid basis {b:?}", a + 1));
            }
        }
    }
    for (field, terms) in &spec.derivations {
        let a = match field {
            FrameField::V(a) | FrameField::Vbar(a) => *a,
        };
        if a == 0 || a > spec.n {
            return bad(format!("frame field {field} out of range"));
        }
        for t in terms {
            if t.shift.dims() != spec.fourier_dims || t.affine.k.len() != spec.fourier_dims {
                return bad(format!("frame field {field} has a rule of the wrong dimension"));
            }
        }
    }
    for r in &spec.decks {
        match r {
            DeckRule::Parity { index, modulus } => {
                if *index >= spec.fourier_dims || *modulus <= 0 {
                    return bad("parity rule out of range".into());
                }
            }
            DeckRule::Involution { map, phase } => {
                if map.len() != spec.fourier_dims || map.iter().any(|r| r.len() != spec.fourier_dims) || phase.k.len() != spec.fourier_dims {
                    return bad("involution rule has the wrong dimension".into());
                }
            }
        }
    }
    if spec.metric.norms.len() != spec.n {
        return bad("metric.norms has the wrong length".into());
    }
    if spec.metric.norms.iter().any(|g| *g <= BigRational::zero()) {
        return bad("metric.norms must be positive".into());
    }
    for (label, f) in [("omega", &spec.metric.omega), ("volume", &spec.metric.volume)] {
        if f.rank() != spec.n {
            return bad(format!("metric.{label} has the wrong coframe rank"));
        }
        if f.modes().iter().any(|m| m.dims() != spec.fourier_dims || !m.is_zero()) {
            return bad(format!("metric.{label} must have constant coefficients"));
        }
    }
    let top = BasisIndex::top(spec.n);
    if spec.metric.volume.coeffs().any(|(b, _)| *b != top) || spec.metric.volume.is_zero() {
        return bad("metric.volume must be a nonzero multiple of the top generator".into());
    }
    Ok(())
}

fn build_tables(spec: &ModelSpec) -> Tables {
    let n = spec.n;
    let dims = spec.fourier_dims;
    let zero = ModeIndex::zero(dims);
    // dφ^a and dφ̄^a as constant forms
    let mut d_hol = Vec::with_capacity(n);
    for terms in &spec.structure {
        let mut f = Form::zero(n);
        for (b, c) in terms {
            f.add_term(*b, zero, &c.eval(&spec.delta));
        }
        d_hol.push(f);
    }
    let d_anti: Vec<Form> = d_hol.iter().map(|f| f.conj()).collect();

    let mut gen_d = BTreeMap::new();
    for b in BasisIndex::all(n) {
        // factors in canonical order
        let factors: Vec<BasisIndex> =
            b.hol_indices().into_iter().map(BasisIndex::holo).chain(b.anti_indices().into_iter().map(BasisIndex::anti)).collect();
        let mut total = Form::zero(n);
        for (i, f) in factors.iter().enumerate() {
            let df = if f.p() == 1 { &d_hol[f.hol_indices()[0] - 1] } else { &d_anti[f.anti_indices()[0] - 1] };
            if df.is_zero() {
                continue;
            }
            let mut left = Form::generator(n, dims, BasisIndex::ONE, Scalar::one());
            for g in &factors[..i] {
                left = left.wedge(&Form::generator(n, dims, *g, Scalar::one()));
            }
            let mut term = left.wedge(df);
            for g in &factors[i + 1..] {
                term = term.wedge(&Form::generator(n, dims, *g, Scalar::one()));
            }
            let sign = if i % 2 == 0 { Scalar::one() } else { Scalar::from_int(-1) };
            total.add_scaled(&sign, &term);
        }
        gen_d.insert(b, total);
    }

    let star = build_star_table(spec);

    let fields = spec
        .derivations
        .iter()
        .map(|(f, terms)| {
            let evald = terms
                .iter()
                .map(|t| (t.shift, &t.affine.c0 + &t.affine.cdelta.scale(&spec.delta), t.affine.k.clone()))
                .collect();
            (*f, evald)
        })
        .collect();

    Tables { gen_d, star, fields }
}

/// `*φ^{I,J} = s·N·v·ε · φ^{J^c, I^c}` where `conj φ^{I,J} = s φ^{J,I}`, `N` is the generator
/// norm, `vol = v φ^top` and `φ^{J,I} ∧ φ^{J^c,I^c} = ε φ^top`.
fn build_star_table(spec: &ModelSpec) -> BTreeMap<BasisIndex, (BasisIndex, Scalar)> {
    let n = spec.n;
    let top = BasisIndex::top(n);
    let full = top.hol_mask();
    let v = spec.metric.volume.coeff(&top).coeff(&ModeIndex::zero(spec.fourier_dims));
    let mut out = BTreeMap::new();
    for b in BasisIndex::all(n) {
        let (swapped, s) = b.conj();
        let target = BasisIndex::from_masks(full & !b.anti_mask(), full & !b.hol_mask());
        let (prod, eps) = swapped.wedge(&target).expect("complementary generators");
        debug_assert_eq!(prod, top);
        let norm = crate::algebra::form::generator_norm(&b, &spec.metric.norms);
        let c = v.scale(&norm).scale(&BigRational::from_integer((s * eps).into()));
        out.insert(b, (target, c));
    }
    out
}

/// `num/den` as an exact rational.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub(crate) fn rat_one() -> BigRational {
    BigRational::one()
}
