use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use super::{rat, rat_one, Affine, DeckRule, DerivTerm, FrameField, IntAffine, MetricSpec, Model, ModelSpec, StructureCoeff};
use crate::algebra::{BasisIndex, Form, ModeIndex, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BuiltinName {
    Kt,
    Hyperelliptic,
    Torus4,
}

impl FromStr for BuiltinName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kt" => Ok(BuiltinName::Kt),
            "hyperelliptic" => Ok(BuiltinName::Hyperelliptic),
            "torus4" => Ok(BuiltinName::Torus4),
            other => Err(Error::InvalidArgument(format!("unknown builtin model {other:?}"))),
        }
    }
}

impl BuiltinName {
    pub fn as_str(&self) -> &'static str {
        match self {
            BuiltinName::Kt => "kt",
            BuiltinName::Hyperelliptic => "hyperelliptic",
            BuiltinName::Torus4 => "torus4",
        }
    }
}

/// Built-in models. `delta` only matters for `kt`, where it must be nonzero.
pub fn builtin(name: BuiltinName, delta: &BigRational) -> Result<Model> {
    let spec = match name {
        BuiltinName::Kt => {
            if delta.is_zero() {
                return Err(Error::InvalidArgument("kt requires a nonzero delta".into()));
            }
            kt(delta.clone())
        }
        BuiltinName::Hyperelliptic => hyperelliptic(),
        BuiltinName::Torus4 => torus4(),
    };
    Model::new(spec)
}

fn s(re: (i64, i64), im: (i64, i64)) -> Scalar {
    Scalar::complex(re, im)
}

fn r(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

fn ir(n: i64, d: i64) -> Scalar {
    s((0, 1), (n, d))
}

fn b(i: &[usize], j: &[usize]) -> BasisIndex {
    BasisIndex::from_indices(i, j).expect("valid basis")
}

fn fixed(c0: Scalar) -> StructureCoeff {
    StructureCoeff { c0, cdelta: Scalar::zero() }
}

fn in_delta(cdelta: Scalar) -> StructureCoeff {
    StructureCoeff { c0: Scalar::zero(), cdelta }
}

fn unshifted(dims: usize, k: Vec<Scalar>) -> Vec<DerivTerm> {
    vec![DerivTerm { shift: ModeIndex::zero(dims), affine: Affine::linear(k) }]
}

/// `c·(φ^{11̄} + φ^{22̄})` and `v·φ^{121̄2̄}`.
fn metric(norm: i64, omega_c: Scalar, vol: Scalar, dims: usize) -> MetricSpec {
    let mut omega = Form::zero(2);
    omega.add_term(b(&[1], &[1]), ModeIndex::zero(dims), &omega_c);
    omega.add_term(b(&[2], &[2]), ModeIndex::zero(dims), &omega_c);
    MetricSpec {
        norms: vec![BigRational::from_integer(norm.into()); 2],
        omega,
        volume: Form::generator(2, dims, BasisIndex::top(2), vol),
    }
}

/// Kodaira–Thurston family, characters `e^{2πi(kt+lx+my)}`.
fn kt(delta: BigRational) -> ModelSpec {
    let dims = 3;
    let two = r(2, 1);
    let structure = vec![
        vec![],
        vec![
            (b(&[1, 2], &[]), in_delta(two.clone())),
            (b(&[1], &[2]), in_delta(two.clone())),
            (b(&[2], &[1]), in_delta(two.clone())),
            (b(&[], &[1, 2]), in_delta(-two)),
        ],
    ];
    let mut derivations = BTreeMap::new();
    derivations.insert(FrameField::V(1), unshifted(dims, vec![Scalar::i(), r(1, 1), r(0, 1)]));
    derivations.insert(FrameField::V(2), unshifted(dims, vec![r(0, 1), r(0, 1), Scalar::i()]));
    derivations.insert(FrameField::Vbar(1), unshifted(dims, vec![Scalar::i(), r(-1, 1), r(0, 1)]));
    derivations.insert(FrameField::Vbar(2), unshifted(dims, vec![r(0, 1), r(0, 1), Scalar::i()]));
    ModelSpec {
        name: "kt".into(),
        n: 2,
        fourier_dims: dims,
        char_base: rat(2, 1),
        delta,
        structure,
        derivations,
        decks: vec![],
        metric: metric(1, Scalar::i(), Scalar::one(), dims),
    }
}

/// Hyperelliptic solvmanifold on the cover torus, characters `e^{iπ(kx¹+ly¹+mx²+ny²)}`.
/// The frame fields rotate with `x²`, so they couple `m` to `m ± 1`.
fn hyperelliptic() -> ModelSpec {
    let dims = 4;
    let up = ModeIndex::new(&[0, 0, 1, 0]);
    let down = ModeIndex::new(&[0, 0, -1, 0]);
    let zero = ModeIndex::zero(dims);
    let lin = |k: Scalar, l: Scalar, m: Scalar, n: Scalar| Affine::linear(vec![k, l, m, n]);
    let o = || Scalar::zero();
    let rules = |plus: Affine, minus: Affine, own: Affine| {
        vec![
            DerivTerm { shift: up, affine: plus },
            DerivTerm { shift: down, affine: minus },
            DerivTerm { shift: zero, affine: own },
        ]
    };
    let mut derivations = BTreeMap::new();
    derivations.insert(
        FrameField::V(1),
        rules(lin(ir(1, 4), r(1, 4), o(), o()), lin(ir(1, 4), r(-1, 4), o(), o()), lin(o(), o(), r(1, 2), o())),
    );
    derivations.insert(
        FrameField::Vbar(1),
        rules(lin(ir(1, 4), r(1, 4), o(), o()), lin(ir(1, 4), r(-1, 4), o(), o()), lin(o(), o(), r(-1, 2), o())),
    );
    derivations.insert(
        FrameField::V(2),
        rules(lin(r(-1, 4), ir(1, 4), o(), o()), lin(r(1, 4), ir(1, 4), o(), o()), lin(o(), o(), o(), r(1, 2))),
    );
    derivations.insert(
        FrameField::Vbar(2),
        rules(lin(r(-1, 4), ir(1, 4), o(), o()), lin(r(1, 4), ir(1, 4), o(), o()), lin(o(), o(), o(), r(-1, 2))),
    );
    let quarter_i = ir(1, 4);
    let structure = vec![
        vec![
            (b(&[1, 2], &[]), fixed(-quarter_i.clone())),
            (b(&[1], &[2]), fixed(-quarter_i.clone())),
            (b(&[2], &[1]), fixed(-quarter_i.clone())),
            (b(&[], &[1, 2]), fixed(quarter_i)),
        ],
        vec![(b(&[1], &[1]), fixed(ir(1, 2)))],
    ];
    let decks = vec![
        DeckRule::Parity { index: 0, modulus: 2 },
        DeckRule::Parity { index: 1, modulus: 2 },
        DeckRule::Parity { index: 3, modulus: 2 },
        DeckRule::Involution {
            map: vec![vec![-1, 0, 0, 0], vec![0, -1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            phase: IntAffine { c0: 0, k: vec![0, 0, 1, 0] },
        },
    ];
    ModelSpec {
        name: "hyperelliptic".into(),
        n: 2,
        fourier_dims: dims,
        char_base: rat_one(),
        delta: BigRational::zero(),
        structure,
        derivations,
        decks,
        metric: metric(2, ir(1, 2), r(1, 4), dims),
    }
}

/// Flat 4-torus, `φ^a = dx^a + i dy^a`, characters `e^{2πi(kx¹+ly¹+mx²+ny²)}`.
fn torus4() -> ModelSpec {
    let dims = 4;
    let o = || Scalar::zero();
    let mut derivations = BTreeMap::new();
    derivations.insert(FrameField::V(1), unshifted(dims, vec![Scalar::i(), r(1, 1), o(), o()]));
    derivations.insert(FrameField::Vbar(1), unshifted(dims, vec![Scalar::i(), r(-1, 1), o(), o()]));
    derivations.insert(FrameField::V(2), unshifted(dims, vec![o(), o(), Scalar::i(), r(1, 1)]));
    derivations.insert(FrameField::Vbar(2), unshifted(dims, vec![o(), o(), Scalar::i(), r(-1, 1)]));
    ModelSpec {
        name: "torus4".into(),
        n: 2,
        fourier_dims: dims,
        char_base: rat(2, 1),
        delta: BigRational::zero(),
        structure: vec![vec![], vec![]],
        derivations,
        decks: vec![],
        metric: metric(1, Scalar::i(), Scalar::one(), dims),
    }
}
