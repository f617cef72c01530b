//! Seeded random forms for identity checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{BasisIndex, Form, ModeIndex, Scalar};
use crate::model::Model;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Shape {
    /// Any mix of degrees.
    Mixed,
    Degree(usize),
    Bidegree(usize, usize),
}

pub struct FormSampler {
    rng: ChaCha8Rng,
    /// Sup-norm bound on sampled modes.
    pub mode_radius: i32,
    /// Maximum number of terms per form.
    pub max_terms: usize,
}

impl FormSampler {
    pub fn new(seed: u64) -> Self {
        FormSampler { rng: ChaCha8Rng::seed_from_u64(seed), mode_radius: 1, max_terms: 4 }
    }

    pub fn scalar(&mut self) -> Scalar {
        let part = |rng: &mut ChaCha8Rng| (rng.gen_range(-5i64..=5), rng.gen_range(1i64..=4));
        let re = part(&mut self.rng);
        let im = part(&mut self.rng);
        Scalar::complex(re, im)
    }

    pub fn mode(&mut self, dims: usize) -> ModeIndex {
        let r = self.mode_radius;
        let c: Vec<i32> = (0..dims).map(|_| self.rng.gen_range(-r..=r)).collect();
        ModeIndex::new(&c)
    }

    pub fn index(&mut self, below: usize) -> usize {
        self.rng.gen_range(0..below)
    }

    /// Random bidegree `(p,q)` with `p,q ≤ n`.
    pub fn bidegree(&mut self, n: usize) -> (usize, usize) {
        (self.rng.gen_range(0..=n), self.rng.gen_range(0..=n))
    }

    pub fn form(&mut self, m: &Model, shape: Shape) -> Form {
        let n = m.n();
        let pool = match shape {
            Shape::Mixed => BasisIndex::all(n),
            Shape::Degree(k) => BasisIndex::of_degree(n, k),
            Shape::Bidegree(p, q) => BasisIndex::of_bidegree(n, p, q),
        };
        let mut out = Form::zero(n);
        if pool.is_empty() {
            return out;
        }
        let terms = self.rng.gen_range(1..=self.max_terms);
        for _ in 0..terms {
            let b = *pool.choose(&mut self.rng).expect("nonempty pool");
            let k = self.mode(m.dims());
            let c = self.scalar();
            out.add_term(b, k, &c);
        }
        out
    }

    /// Random form of a random bidegree.
    pub fn homogeneous(&mut self, m: &Model) -> Form {
        let (p, q) = self.bidegree(m.n());
        self.form(m, Shape::Bidegree(p, q))
    }
}
