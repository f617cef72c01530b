use std::cmp::Ordering;
use std::fmt;

/// Largest supported coframe rank.
pub const MAX_RANK: usize = 8;

/// Basis generator `φ^{i₁…i_p} ∧ φ̄^{j₁…j_q}` stored as two index bitmasks
/// (bit `a-1` set for index `a`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    hol: u16,
    anti: u16,
}

impl BasisIndex {
    pub const ONE: BasisIndex = BasisIndex { hol: 0, anti: 0 };

    pub fn from_masks(hol: u16, anti: u16) -> Self {
        BasisIndex { hol, anti }
    }

    /// From 1-based index lists. Returns `None` on repeated or zero indices.
    pub fn from_indices(i: &[usize], j: &[usize]) -> Option<Self> {
        let mask = |xs: &[usize]| -> Option<u16> {
            let mut m = 0u16;
            for &x in xs {
                if x == 0 || x > MAX_RANK {
                    return None;
                }
                let bit = 1u16 << (x - 1);
                if m & bit != 0 {
                    return None;
                }
                m |= bit;
            }
            Some(m)
        };
        Some(BasisIndex { hol: mask(i)?, anti: mask(j)? })
    }

    pub fn holo(a: usize) -> Self {
        BasisIndex { hol: 1 << (a - 1), anti: 0 }
    }

    pub fn anti(a: usize) -> Self {
        BasisIndex { hol: 0, anti: 1 << (a - 1) }
    }

    pub fn hol_mask(&self) -> u16 {
        self.hol
    }

    pub fn anti_mask(&self) -> u16 {
        self.anti
    }

    pub fn p(&self) -> usize {
        self.hol.count_ones() as usize
    }

    pub fn q(&self) -> usize {
        self.anti.count_ones() as usize
    }

    pub fn degree(&self) -> usize {
        self.p() + self.q()
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p(), self.q())
    }

    pub fn hol_indices(&self) -> Vec<usize> {
        mask_indices(self.hol)
    }

    pub fn anti_indices(&self) -> Vec<usize> {
        mask_indices(self.anti)
    }

    /// Product of generators: `None` if a factor repeats, else the canonical index and the sign.
    pub fn wedge(&self, other: &BasisIndex) -> Option<(BasisIndex, i32)> {
        if self.hol & other.hol != 0 || self.anti & other.anti != 0 {
            return None;
        }
        // move other's holomorphic block left past self's antiholomorphic block
        let mut odd = (self.q() * other.p()) % 2 == 1;
        odd ^= inversion_parity(self.hol, other.hol);
        odd ^= inversion_parity(self.anti, other.anti);
        Some((BasisIndex { hol: self.hol | other.hol, anti: self.anti | other.anti }, if odd { -1 } else { 1 }))
    }

    /// `conj(φ^I ∧ φ̄^J) = (−1)^{pq} φ^J ∧ φ̄^I`.
    pub fn conj(&self) -> (BasisIndex, i32) {
        let sign = if (self.p() * self.q()) % 2 == 1 { -1 } else { 1 };
        (BasisIndex { hol: self.anti, anti: self.hol }, sign)
    }

    /// All generators of bidegree `(p,q)` on rank `n`, in canonical order.
    pub fn of_bidegree(n: usize, p: usize, q: usize) -> Vec<BasisIndex> {
        let mut out = Vec::new();
        for hol in subsets(n, p) {
            for anti in subsets(n, q) {
                out.push(BasisIndex { hol, anti });
            }
        }
        out.sort();
        out
    }

    /// All generators of total degree `k`.
    pub fn of_degree(n: usize, k: usize) -> Vec<BasisIndex> {
        let mut out: Vec<_> = (0..=k.min(n)).filter(|p| k - p <= n).flat_map(|p| BasisIndex::of_bidegree(n, p, k - p)).collect();
        out.sort();
        out
    }

    /// Every generator of the full exterior algebra (`4ⁿ` of them).
    pub fn all(n: usize) -> Vec<BasisIndex> {
        let mut out: Vec<_> = (0..=2 * n).flat_map(|k| BasisIndex::of_degree(n, k)).collect();
        out.sort();
        out
    }

    /// The top generator `φ^{1…n} ∧ φ̄^{1…n}`.
    pub fn top(n: usize) -> BasisIndex {
        let full = ((1u32 << n) - 1) as u16;
        BasisIndex { hol: full, anti: full }
    }

    fn sort_key(&self) -> (usize, usize, Vec<usize>, Vec<usize>) {
        (self.p(), self.q(), self.hol_indices(), self.anti_indices())
    }
}

impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<usize>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "w[{};{}]", join(self.hol_indices()), join(self.anti_indices()))
    }
}

fn mask_indices(m: u16) -> Vec<usize> {
    (0..16).filter(|b| m & (1 << b) != 0).map(|b| b + 1).collect()
}

/// Parity of `#{(a,b) : a ∈ A, b ∈ B, a > b}`.
fn inversion_parity(a: u16, b: u16) -> bool {
    let mut count = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        let above = !((2u32 << bit) - 1) as u16;
        count += (a & above).count_ones();
    }
    count % 2 == 1
}

fn subsets(n: usize, k: usize) -> Vec<u16> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).map(|m| m as u16).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Factor labels: holomorphic `a` ↦ a, antiholomorphic `a` ↦ 100 + a.
    fn labels(b: &BasisIndex) -> Vec<usize> {
        let mut v = b.hol_indices();
        v.extend(b.anti_indices().iter().map(|a| 100 + a));
        v
    }

    /// Sorts by adjacent transpositions and reports the sign; 0 on a repeated factor.
    fn bubble_sign(mut v: Vec<usize>) -> (Vec<usize>, i32) {
        let mut sign = 1;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] == v[j + 1] {
                    return (v, 0);
                }
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return (v, 0);
        }
        (v, sign)
    }

    #[test]
    fn wedge_matches_transposition_count() {
        let all = BasisIndex::all(3);
        for a in &all {
            for b in &all {
                let mut seq = labels(a);
                seq.extend(labels(b));
                let (sorted, sign) = bubble_sign(seq);
                match a.wedge(b) {
                    None => assert_eq!(sign, 0, "{a:?} {b:?}"),
                    Some((c, s)) => {
                        assert_eq!(labels(&c), sorted);
                        assert_eq!(s, sign, "{a:?} ∧ {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn conj_sign_matches_reordering() {
        for b in BasisIndex::all(3) {
            // conj swaps barred and unbarred labels but keeps factor order
            let seq: Vec<usize> = labels(&b).into_iter().map(|x| if x > 100 { x - 100 } else { x + 100 }).collect();
            let (sorted, sign) = bubble_sign(seq);
            let (c, s) = b.conj();
            assert_eq!(labels(&c), sorted);
            assert_eq!(s, sign);
        }
    }

    #[test]
    fn counts() {
        assert_eq!(BasisIndex::all(2).len(), 16);
        assert_eq!(BasisIndex::of_bidegree(2, 1, 1).len(), 4);
        assert_eq!(BasisIndex::of_degree(2, 2).len(), 6);
        let b21 = BasisIndex::of_bidegree(2, 2, 1);
        assert_eq!(b21[0], BasisIndex::from_indices(&[1, 2], &[1]).unwrap());
        assert_eq!(b21[1], BasisIndex::from_indices(&[1, 2], &[2]).unwrap());
    }
}
