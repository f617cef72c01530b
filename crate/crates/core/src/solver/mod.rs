//! Harmonicity systems per Fourier mode class, exact kernels, deck filtering and the
//! dimension results built on them.

mod extras;
mod solve;
mod span;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::algebra::{BasisIndex, Form, ModeIndex, Scalar};
use crate::calculus::{apply_d, del, delbar, star};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::Model;

pub use extras::{as_membership, circle_count, lefschetz11};
pub(crate) use extras::as_membership_forms;
pub use solve::{
    b_minus, bc_cap_as, compare, deck_project, solve_cover, solve_harmonic, Certification, Comparison, Relation, SolveReport,
};
pub use span::{canonical_span, in_span, span_rank};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SystemKind {
    Hodge,
    Del,
    Delbar,
    Bc,
    Aeppli,
    Asd,
}

/// One block of equations, homogeneous in π.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Equation {
    D,
    DStarForm,
    Del,
    Delbar,
    DelStarForm,
    DelbarStarForm,
    DelDelbar,
    DelDelbarStarForm,
    StarPlusId,
}

impl Equation {
    /// Power of π carried by the block.
    pub fn order(&self) -> u32 {
        match self {
            Equation::StarPlusId => 0,
            Equation::DelDelbar | Equation::DelDelbarStarForm => 2,
            _ => 1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Equation::D => "dα",
            Equation::DStarForm => "d*α",
            Equation::Del => "∂α",
            Equation::Delbar => "∂̄α",
            Equation::DelStarForm => "∂*α",
            Equation::DelbarStarForm => "∂̄*α",
            Equation::DelDelbar => "∂∂̄α",
            Equation::DelDelbarStarForm => "∂∂̄*α",
            Equation::StarPlusId => "*α+α",
        }
    }

    /// The block's left-hand side (`*` is the Hodge star applied to `α` first).
    pub fn apply(&self, m: &Model, a: &Form) -> Form {
        match self {
            Equation::D => apply_d(m, a),
            Equation::DStarForm => apply_d(m, &star(m, a)),
            Equation::Del => del(m, a),
            Equation::Delbar => delbar(m, a),
            Equation::DelStarForm => del(m, &star(m, a)),
            Equation::DelbarStarForm => delbar(m, &star(m, a)),
            Equation::DelDelbar => del(m, &delbar(m, a)),
            Equation::DelDelbarStarForm => del(m, &delbar(m, &star(m, a))),
            Equation::StarPlusId => star(m, a).add(a),
        }
    }
}

impl SystemKind {
    pub const ALL: [SystemKind; 6] = [SystemKind::Hodge, SystemKind::Del, SystemKind::Delbar, SystemKind::Bc, SystemKind::Aeppli, SystemKind::Asd];

    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Hodge => "hodge",
            SystemKind::Del => "del",
            SystemKind::Delbar => "delbar",
            SystemKind::Bc => "bc",
            SystemKind::Aeppli => "aeppli",
            SystemKind::Asd => "asd",
        }
    }

    /// Equation blocks in their conventional order.
    pub fn equations(&self) -> Vec<Equation> {
        use Equation as E;
        match self {
            SystemKind::Hodge => vec![E::D, E::DStarForm],
            SystemKind::Del => vec![E::Del, E::DelbarStarForm],
            SystemKind::Delbar => vec![E::Delbar, E::DelStarForm],
            SystemKind::Bc => vec![E::Del, E::Delbar, E::DelDelbarStarForm],
            SystemKind::Aeppli => vec![E::DelStarForm, E::DelbarStarForm, E::DelDelbar],
            SystemKind::Asd => vec![E::D, E::StarPlusId],
        }
    }

    pub fn max_order(&self) -> u32 {
        self.equations().iter().map(Equation::order).max().unwrap_or(0)
    }

    /// Largest mode displacement any equation row can produce on this model.
    pub fn reach(&self, m: &Model) -> u32 {
        self.max_order() * m.max_shift()
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SystemKind::ALL.iter().copied().find(|k| k.name() == s).ok_or_else(|| Error::InvalidArgument(format!("unknown system {s:?}")))
    }
}

/// Space of unknowns: a bidegree, or a total degree (the anti-self-dual system).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FormSpace {
    Bidegree(usize, usize),
    Degree(usize),
}

impl FormSpace {
    pub fn basis(&self, n: usize) -> Vec<BasisIndex> {
        match *self {
            FormSpace::Bidegree(p, q) => BasisIndex::of_bidegree(n, p, q),
            FormSpace::Degree(k) => BasisIndex::of_degree(n, k),
        }
    }

    pub fn bidegree(&self) -> Option<(usize, usize)> {
        match *self {
            FormSpace::Bidegree(p, q) => Some((p, q)),
            FormSpace::Degree(_) => None,
        }
    }

    fn check(&self, m: &Model, system: SystemKind) -> Result<()> {
        let n = m.n();
        match (*self, system) {
            (FormSpace::Degree(2), SystemKind::Asd) if n == 2 => Ok(()),
            (_, SystemKind::Asd) => Err(Error::InvalidArgument("the asd system acts on 2-forms of a 4-dimensional model".into())),
            (FormSpace::Bidegree(p, q), _) if p <= n && q <= n => Ok(()),
            (FormSpace::Bidegree(p, q), _) => Err(Error::InvalidArgument(format!("bidegree ({p},{q}) out of range for n = {n}"))),
            (FormSpace::Degree(_), s) => Err(Error::InvalidArgument(format!("the {s} system needs a bidegree"))),
        }
    }
}

/// Modes coupled by frame-field shifts, and the part of them far enough from the box
/// boundary to carry unknowns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModeClass {
    pub modes: Vec<ModeIndex>,
    pub interior: Vec<ModeIndex>,
}

/// Partition of `{|κ|∞ ≤ box}` under the shift-coupling relation. `margin` must cover the
/// system's reach so every equation row of an interior unknown stays inside the box.
pub fn mode_classes(m: &Model, system: SystemKind, box_radius: u32, margin: u32) -> Result<Vec<ModeClass>> {
    let required = system.reach(m);
    if margin < required {
        return Err(Error::MarginTooSmall { given: margin, required });
    }
    let modes = ModeIndex::cube(m.dims(), box_radius);
    let index: HashMap<ModeIndex, usize> = modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut parent: Vec<usize> = (0..modes.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let shifts: Vec<ModeIndex> = m.spec().derivations.values().flatten().map(|t| t.shift).filter(|s| !s.is_zero()).collect();
    for (i, k) in modes.iter().enumerate() {
        for s in &shifts {
            if let Some(&j) = index.get(&k.add(s)) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<ModeIndex>> = BTreeMap::new();
    for (i, k) in modes.iter().enumerate() {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(*k);
    }
    let inner = box_radius.checked_sub(margin);
    let mut classes: Vec<ModeClass> = groups
        .into_values()
        .map(|modes| {
            let interior = modes.iter().filter(|k| inner.is_some_and(|r| k.sup_norm() <= r)).copied().collect();
            ModeClass { modes, interior }
        })
        .collect();
    classes.sort_by(|a, b| a.modes[0].cmp(&b.modes[0]));
    Ok(classes)
}

/// Which equation a matrix row belongs to.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RowLabel {
    pub equation: Equation,
    pub basis: BasisIndex,
    pub mode: ModeIndex,
}

/// Exact system for one mode class. Columns are `(mode, generator)` unknowns in
/// lexicographic order; the kernel holds the coefficient vectors of all solutions
/// supported on the class interior.
#[derive(Clone, Debug)]
pub struct Assembled {
    pub unknowns: Vec<(ModeIndex, BasisIndex)>,
    pub rows: Vec<RowLabel>,
    pub matrix: Matrix,
}

impl Assembled {
    pub fn to_form(&self, n: usize, v: &[Scalar]) -> Form {
        let mut f = Form::zero(n);
        for ((k, b), c) in self.unknowns.iter().zip(v) {
            f.add_term(*b, *k, c);
        }
        f
    }

    pub fn kernel(&self, n: usize) -> Vec<Form> {
        self.matrix.nullspace().iter().map(|v| self.to_form(n, v)).collect()
    }
}

pub fn assemble(m: &Model, system: SystemKind, space: FormSpace, class: &ModeClass) -> Result<Assembled> {
    space.check(m, system)?;
    let basis = space.basis(m.n());
    let unknowns: Vec<(ModeIndex, BasisIndex)> = class.interior.iter().flat_map(|k| basis.iter().map(move |b| (*k, *b))).collect();
    let equations = system.equations();
    let mut columns: Vec<BTreeMap<RowLabel, Scalar>> = Vec::with_capacity(unknowns.len());
    let mut labels: BTreeMap<RowLabel, usize> = BTreeMap::new();
    for (k, b) in &unknowns {
        let u = Form::term(m.n(), *b, *k, Scalar::one());
        let mut col = BTreeMap::new();
        for eq in &equations {
            for (t, c) in eq.apply(m, &u).coeffs() {
                for (mode, s) in c.terms() {
                    let label = RowLabel { equation: *eq, basis: *t, mode: *mode };
                    labels.entry(label.clone()).or_insert(0);
                    col.insert(label, s.clone());
                }
            }
        }
        columns.push(col);
    }
    let rows: Vec<RowLabel> = labels.keys().cloned().collect();
    for (i, l) in rows.iter().enumerate() {
        *labels.get_mut(l).expect("label present") = i;
    }
    let mut matrix = Matrix::zeros(rows.len(), unknowns.len());
    for (j, col) in columns.into_iter().enumerate() {
        for (l, s) in col {
            matrix.rows[labels[&l]][j] = s;
        }
    }
    Ok(Assembled { unknowns, rows, matrix })
}

/// Nonzero equation coefficients of `α` under `system`, in row order.
pub fn system_residual(m: &Model, system: SystemKind, a: &Form) -> Vec<(RowLabel, Scalar)> {
    let mut out = Vec::new();
    for eq in system.equations() {
        let mut block = Vec::new();
        for (t, c) in eq.apply(m, a).coeffs() {
            for (mode, s) in c.terms() {
                block.push((RowLabel { equation: eq, basis: *t, mode: *mode }, s.clone()));
            }
        }
        block.sort_by(|a, b| a.0.cmp(&b.0));
        out.extend(block);
    }
    out
}
