use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::span::{canonical_span, in_span, span_rank};
use super::{as_membership_forms, assemble, mode_classes, FormSpace, SystemKind};
use crate::algebra::{fmt_rational, BasisIndex, Form, ModeIndex, Scalar};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{DeckRule, Model};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Certification {
    /// Shift-free model whose per-mode kernels vanish on the outer shells of the box:
    /// the sector dimension is complete.
    ExactDecoupled,
    /// Dimension of the truncated problem, a lower bound for the sector.
    BoxLowerBound,
}

impl Certification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certification::ExactDecoupled => "exact-decoupled",
            Certification::BoxLowerBound => "box-lower-bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub model: String,
    pub delta: BigRational,
    pub space: FormSpace,
    pub system: SystemKind,
    pub box_radius: u32,
    pub margin: u32,
    pub dimension: usize,
    /// Dimension before the involution filter, over classes meeting a parity-admissible
    /// mode (equal to `dimension` for models without deck rules).
    pub cover_dimension: usize,
    pub certification: Certification,
    /// Largest `|κ|∞` carrying a solution, if any.
    pub support_radius: Option<u32>,
    pub fourier_dims: usize,
    pub char_base: BigRational,
    pub basis: Vec<Form>,
    pub elapsed_ms: u128,
}

impl SolveReport {
    /// Unknowns live on `|κ|∞ ≤ box`; coupling classes are traced out to `box + margin`.
    pub fn interior_radius(&self) -> u32 {
        self.box_radius
    }

    /// JSON report. Timing is `null` unless requested, so repeated runs are byte-identical.
    pub fn to_json(&self, with_timing: bool) -> Value {
        json!({
            "model": self.model,
            "delta": fmt_rational(&self.delta),
            "bidegree": self.space.bidegree().map(|(p, q)| json!([p, q])).unwrap_or(Value::Null),
            "degree": match self.space { FormSpace::Degree(k) => json!(k), FormSpace::Bidegree(p, q) => json!(p + q) },
            "system": self.system.name(),
            "box": self.box_radius,
            "margin": self.margin,
            "dimension": self.dimension,
            "cover_dimension": self.cover_dimension,
            "certification": self.certification.as_str(),
            "support_radius": self.support_radius,
            "sector": {
                "fourier_dims": self.fourier_dims,
                "char_base": fmt_rational(&self.char_base),
                "interior_radius": self.interior_radius(),
            },
            "basis": self.basis.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "elapsed_ms": if with_timing { json!(self.elapsed_ms as u64) } else { Value::Null },
        })
    }
}

fn support_radius(forms: &[Form]) -> Option<u32> {
    forms.iter().flat_map(|f| f.modes()).map(|k| k.sup_norm()).max()
}

/// Solutions on the cover, before deck filtering.
pub fn solve_cover(m: &Model, space: FormSpace, system: SystemKind, box_radius: u32, margin: Option<u32>) -> Result<SolveReport> {
    solve_impl(m, space, system, box_radius, margin, false)
}

/// Harmonic space of `system` in `space`, deck-filtered, with unknowns on `|κ|∞ ≤ box_radius`.
/// `margin` defaults to the system's reach on this model. Classes with no parity-admissible
/// mode are skipped, since deck projection would discard them.
pub fn solve_harmonic(m: &Model, space: FormSpace, system: SystemKind, box_radius: u32, margin: Option<u32>) -> Result<SolveReport> {
    solve_impl(m, space, system, box_radius, margin, true)
}

fn solve_impl(m: &Model, space: FormSpace, system: SystemKind, box_radius: u32, margin: Option<u32>, decks: bool) -> Result<SolveReport> {
    let start = Instant::now();
    let margin = margin.unwrap_or_else(|| system.reach(m));
    let classes = mode_classes(m, system, box_radius + margin, margin)?;
    space.check(m, system)?;
    let n = m.n();
    let wanted = |c: &super::ModeClass| !decks || c.interior.iter().any(|k| m.parity_ok(k));
    let kernels: Vec<Vec<Form>> = classes
        .par_iter()
        .map(|c| if c.interior.is_empty() || !wanted(c) { Ok(Vec::new()) } else { Ok(assemble(m, system, space, c)?.kernel(n)) })
        .collect::<Result<_>>()?;
    let cover_dimension = kernels.iter().map(Vec::len).sum();

    let filtered: Vec<Form> = if decks && !m.decks().is_empty() {
        let groups = deck_groups(m, &classes);
        let parts: Vec<Vec<Form>> = groups
            .par_iter()
            .map(|g| {
                let forms: Vec<Form> = g.iter().flat_map(|&i| kernels[i].iter().cloned()).collect();
                deck_project(m, &forms)
            })
            .collect();
        parts.into_iter().flatten().collect()
    } else {
        kernels.into_iter().flatten().collect()
    };
    let basis = canonical_span(&filtered);
    let support = support_radius(&basis);
    let certification = match (m.is_shift_free(), box_radius) {
        // the outermost shell carries no solution, so neither does anything beyond it
        (true, r) if r >= 1 && support.is_none_or(|s| s < r) => Certification::ExactDecoupled,
        _ => Certification::BoxLowerBound,
    };
    Ok(SolveReport {
        model: m.name().to_string(),
        delta: m.delta().clone(),
        space,
        system,
        box_radius,
        margin,
        dimension: basis.len(),
        cover_dimension,
        certification,
        support_radius: support,
        fourier_dims: m.dims(),
        char_base: m.spec().char_base.clone(),
        basis,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Classes linked by deck involutions, each group sorted, groups in class order.
fn deck_groups(m: &Model, classes: &[super::ModeClass]) -> Vec<Vec<usize>> {
    let owner: BTreeMap<ModeIndex, usize> = classes.iter().enumerate().flat_map(|(i, c)| c.modes.iter().map(move |k| (*k, i))).collect();
    let mut parent: Vec<usize> = (0..classes.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for rule in m.decks() {
        if let DeckRule::Involution { map, .. } = rule {
            for (i, c) in classes.iter().enumerate() {
                for k in &c.modes {
                    if let Some(&j) = owner.get(&DeckRule::map_mode(map, k)) {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..classes.len() {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Intersects the span of `forms` with the deck-invariant subspace: coefficients on
/// modes failing a parity rule vanish, and `c_{Aκ} = e^{iπ·phase(κ)} c_κ` for involutions.
pub fn deck_project(m: &Model, forms: &[Form]) -> Vec<Form> {
    if forms.is_empty() {
        return Vec::new();
    }
    let mut keys: Vec<(ModeIndex, BasisIndex)> = Vec::new();
    for f in forms {
        for (b, c) in f.coeffs() {
            for k in c.modes() {
                keys.push((*k, *b));
            }
        }
    }
    keys.sort();
    keys.dedup();
    let coeff = |f: &Form, k: &ModeIndex, b: &BasisIndex| f.coeff(b).coeff(k);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (k, b) in &keys {
        if !m.parity_ok(k) {
            rows.push(forms.iter().map(|f| coeff(f, k, b)).collect());
        }
        for rule in m.decks() {
            if let DeckRule::Involution { map, phase } = rule {
                let image = DeckRule::map_mode(map, k);
                let sign = Scalar::from_int(DeckRule::phase_sign(phase.eval(k)));
                let row: Vec<Scalar> = forms.iter().map(|f| &coeff(f, &image, b) - &(&sign * &coeff(f, k, b))).collect();
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let combos = Matrix::from_rows(rows, forms.len()).nullspace();
    let kept: Vec<Form> = combos
        .iter()
        .map(|y| {
            let mut f = Form::zero(m.n());
            for (c, g) in y.iter().zip(forms) {
                f.add_scaled(c, g);
            }
            f
        })
        .collect();
    canonical_span(&kept)
}

/// Complex dimension of harmonic anti-self-dual 2-forms.
pub fn b_minus(m: &Model, box_radius: u32) -> Result<SolveReport> {
    if m.n() != 2 {
        return Err(Error::InvalidArgument("b_minus needs a 4-dimensional model".into()));
    }
    solve_harmonic(m, FormSpace::Degree(2), SystemKind::Asd, box_radius, None)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Equal,
    /// First space strictly inside the second.
    FirstInSecond,
    /// Second space strictly inside the first.
    SecondInFirst,
    Incomparable,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub relation: Relation,
    /// A basis element of one space outside the other (from the larger space when one
    /// contains the other, from the first otherwise).
    pub witness: Option<Form>,
    pub first: SolveReport,
    pub second: SolveReport,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.first.system.name(), self.second.system.name());
        match self.relation {
            Relation::Equal => write!(f, "{a} = {b}"),
            Relation::FirstInSecond => write!(f, "{a} ⊊ {b}"),
            Relation::SecondInFirst => write!(f, "{b} ⊊ {a}"),
            Relation::Incomparable => write!(f, "{a} and {b} incomparable"),
        }
    }
}

impl Comparison {
    pub fn to_json(&self, with_timing: bool) -> Value {
        let rel = match self.relation {
            Relation::Equal => "equal",
            Relation::FirstInSecond => "first-in-second",
            Relation::SecondInFirst => "second-in-first",
            Relation::Incomparable => "incomparable",
        };
        json!({
            "relation": rel,
            "summary": self.to_string(),
            "witness": self.witness.as_ref().map(|w| w.to_string()),
            "first": self.first.to_json(with_timing),
            "second": self.second.to_json(with_timing),
        })
    }
}

/// Exact comparison of two harmonic spaces on the same box and margin.
pub fn compare(m: &Model, space: FormSpace, first: SystemKind, second: SystemKind, box_radius: u32, margin: Option<u32>) -> Result<Comparison> {
    let margin = margin.unwrap_or_else(|| first.reach(m).max(second.reach(m)));
    let a = solve_harmonic(m, space, first, box_radius, Some(margin))?;
    let b = solve_harmonic(m, space, second, box_radius, Some(margin))?;
    let union: Vec<Form> = a.basis.iter().chain(&b.basis).cloned().collect();
    let (ra, rb, ru) = (a.dimension, b.dimension, span_rank(&union));
    let outside = |big: &[Form], small: &[Form]| big.iter().find(|f| !in_span(small, f)).cloned();
    let (relation, witness) = if ru == ra && ru == rb {
        (Relation::Equal, None)
    } else if ru == rb {
        (Relation::FirstInSecond, outside(&b.basis, &a.basis))
    } else if ru == ra {
        (Relation::SecondInFirst, outside(&a.basis, &b.basis))
    } else {
        (Relation::Incomparable, outside(&a.basis, &b.basis))
    };
    Ok(Comparison { relation, witness, first: a, second: b })
}

/// Bott-Chern harmonic forms lying in `ker μ̄ ∩ ker ∂̄² ∩ ker ∂² ∩ ker μ`, as a subspace
/// intersection (not a filter on basis elements).
pub fn bc_cap_as(m: &Model, bidegree: (usize, usize), box_radius: u32, margin: Option<u32>) -> Result<Vec<Form>> {
    let report = solve_harmonic(m, FormSpace::Bidegree(bidegree.0, bidegree.1), SystemKind::Bc, box_radius, margin)?;
    let basis = report.basis;
    if basis.is_empty() {
        return Ok(basis);
    }
    // each predicate output, coordinatewise, is a linear constraint on combinations
    let images: Vec<Vec<Form>> = basis.iter().map(|f| as_membership_forms(m, f)).collect();
    let mut rows: BTreeMap<(usize, ModeIndex, BasisIndex), Vec<Scalar>> = BTreeMap::new();
    for (j, outs) in images.iter().enumerate() {
        for (slot, out) in outs.iter().enumerate() {
            for (b, c) in out.coeffs() {
                for (k, s) in c.terms() {
                    rows.entry((slot, *k, *b)).or_insert_with(|| vec![Scalar::zero(); basis.len()])[j] = s.clone();
                }
            }
        }
    }
    let combos = Matrix::from_rows(rows.into_values().collect(), basis.len()).nullspace();
    let kept: Vec<Form> = combos
        .iter()
        .map(|y| {
            let mut f = Form::zero(m.n());
            for (c, g) in y.iter().zip(&basis) {
                f.add_scaled(c, g);
            }
            f
        })
        .collect();
    Ok(canonical_span(&kept))
}
