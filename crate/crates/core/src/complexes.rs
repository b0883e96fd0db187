//! Finite posets, order complexes, semisimplicial sets and their reduced
//! homology over a finite field.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::linalg::rank_of_columns;
use crate::ffield::{BitRow, Caps, Elem, Field, SparseMatrix, SparseVec};

pub const DEFAULT_FLAG_CAP: usize = 20_000_000;

/// A finite strict partial order on `0..len`, stored as its transitive
/// "strictly above" relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    above: Vec<BitRow>,
}

impl Poset {
    /// Builds a poset from a strict order predicate, checking irreflexivity
    /// and transitivity.
    pub fn from_relation<F>(len: usize, less: F) -> Result<Poset>
    where
        F: Fn(usize, usize) -> bool,
    {
        let mut above = vec![BitRow::zeros(len); len];
        for (i, row) in above.iter_mut().enumerate() {
            for j in 0..len {
                if less(i, j) {
                    if i == j {
                        return Err(Error::BadParameters(format!("relation is reflexive at {i}")));
                    }
                    row.set(j);
                }
            }
        }
        let p = Poset { above };
        p.check_transitive()?;
        Ok(p)
    }

    /// Builds a poset from covering (or any generating) relations by taking
    /// the transitive closure.
    pub fn from_generating_pairs(len: usize, pairs: &[(usize, usize)]) -> Result<Poset> {
        let mut above = vec![BitRow::zeros(len); len];
        for &(a, b) in pairs {
            above[a].set(b);
        }
        // Warshall on bit rows
        for k in 0..len {
            let rk = above[k].clone();
            for row in above.iter_mut() {
                if row.get(k) {
                    for (w, &x) in row.words_mut().iter_mut().zip(rk.words()) {
                        *w |= x;
                    }
                }
            }
        }
        if let Some(i) = (0..len).find(|&i| above[i].get(i)) {
            return Err(Error::BadParameters(format!("generating pairs contain a cycle through {i}")));
        }
        Ok(Poset { above })
    }

    fn check_transitive(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in self.above[i].ones() {
                // above[j] ⊆ above[i]
                let ok = self.above[j]
                    .words()
                    .iter()
                    .zip(self.above[i].words())
                    .all(|(&b, &a)| b & !a == 0);
                if !ok {
                    return Err(Error::BadParameters(format!("relation not transitive through {i} < {j}")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.above.len()
    }

    pub fn is_empty(&self) -> bool {
        self.above.is_empty()
    }

    #[inline]
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.above[a].get(b)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        a == b || self.less(a, b)
    }

    pub fn above(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.above[a].ones()
    }

    pub fn relation_count(&self) -> usize {
        self.above.iter().map(BitRow::count_ones).sum()
    }

    pub fn opposite(&self) -> Poset {
        let n = self.len();
        let mut above = vec![BitRow::zeros(n); n];
        for i in 0..n {
            for j in self.above[i].ones() {
                above[j].set(i);
            }
        }
        Poset { above }
    }

    /// The induced subposet on `members` (renumbered in the given order).
    pub fn induced(&self, members: &[usize]) -> Poset {
        let k = members.len();
        let mut above = vec![BitRow::zeros(k); k];
        for (a, &x) in members.iter().enumerate() {
            for (b, &y) in members.iter().enumerate() {
                if self.less(x, y) {
                    above[a].set(b);
                }
            }
        }
        Poset { above }
    }

    pub fn has_maximum(&self) -> bool {
        (0..self.len()).any(|m| (0..self.len()).all(|x| self.leq(x, m)))
    }

    pub fn has_minimum(&self) -> bool {
        (0..self.len()).any(|m| (0..self.len()).all(|x| self.leq(m, x)))
    }

    /// `Y_{>y}` as element indices.
    pub fn strictly_above(&self, y: usize) -> Vec<usize> {
        self.above(y).collect()
    }

    /// Covering pairs `a ⋖ b`.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in self.above(a) {
                if !self.above(a).any(|c| self.less(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Reduced chain complex over a field, degrees `-1..=top`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    field: Field,
    /// `dims[k]` is the dimension of `C_{k-1}`.
    dims: Vec<usize>,
    /// `boundaries[k]` is `∂_k : C_k → C_{k-1}` for `k ≥ 0`.
    boundaries: Vec<SparseMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiProfile {
    /// `betti[k]` is `b̃_{k-1}`.
    pub betti: Vec<usize>,
}

impl BettiProfile {
    /// `b̃_d`, zero outside the computed range.
    pub fn get(&self, d: i64) -> usize {
        if d < -1 {
            return 0;
        }
        self.betti.get((d + 1) as usize).copied().unwrap_or(0)
    }

    pub fn is_concentrated_in(&self, top: i64) -> bool {
        self.betti
            .iter()
            .enumerate()
            .all(|(k, &b)| b == 0 || k as i64 - 1 == top)
    }

    /// Degrees with nonzero reduced homology.
    pub fn support(&self) -> Vec<i64> {
        self.betti
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(|(k, _)| k as i64 - 1)
            .collect()
    }
}

impl ChainComplex {
    /// Assembles a complex, asserting `∂∘∂ = 0` when the matrices are small
    /// enough to compose.
    pub fn new(field: &Field, dims: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<ChainComplex> {
        assert_eq!(dims.len(), boundaries.len() + 1);
        for (k, b) in boundaries.iter().enumerate() {
            assert_eq!((b.rows(), b.cols()), (dims[k], dims[k + 1]), "boundary {k} has the wrong shape");
        }
        let c = ChainComplex { field: field.clone(), dims, boundaries };
        c.check_square_zero(4_000_000)?;
        Ok(c)
    }

    fn check_square_zero(&self, nnz_cap: usize) -> Result<()> {
        for k in 1..self.boundaries.len() {
            let (a, b) = (&self.boundaries[k - 1], &self.boundaries[k]);
            if a.nnz() + b.nnz() > nnz_cap {
                continue;
            }
            if !a.compose(b).is_zero() {
                return Err(Error::FaceIdentityViolation { level: k, simplex: 0, i: 0, j: 0 });
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Top degree with chains.
    pub fn top_degree(&self) -> i64 {
        self.dims.len() as i64 - 2
    }

    /// `dim C_d`.
    pub fn dim(&self, d: i64) -> usize {
        if d < -1 {
            return 0;
        }
        self.dims.get((d + 1) as usize).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `∂_d`, for `0 ≤ d ≤ top`.
    pub fn boundary(&self, d: i64) -> Option<&SparseMatrix> {
        if d < 0 {
            return None;
        }
        self.boundaries.get(d as usize)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { c as i64 } else { -(c as i64) })
            .sum()
    }

    fn rank_of(&self, d: i64, caps: &Caps) -> Result<usize> {
        match self.boundary(d) {
            None => Ok(0),
            Some(b) => {
                let limit = b.rows().min(b.cols());
                rank_of_columns(&self.field, b.rows(), b.columns().iter().map(|c| c.as_slice()), Some(limit), caps)
            }
        }
    }

    /// Exact reduced Betti numbers.  Checks the Euler characteristic.
    pub fn betti(&self) -> Result<BettiProfile> {
        self.betti_with(&Caps::default())
    }

    pub fn betti_with(&self, caps: &Caps) -> Result<BettiProfile> {
        use rayon::prelude::*;
        let top = self.top_degree();
        let ranks: Vec<usize> = (0..=top + 1)
            .into_par_iter()
            .map(|d| self.rank_of(d, caps))
            .collect::<Result<_>>()?;
        // ranks[d] = rank ∂_d; ∂_{-1} = 0
        let rank = |d: i64| if d < 0 { 0 } else { ranks.get(d as usize).copied().unwrap_or(0) };
        let betti: Vec<usize> = (-1..=top).map(|d| self.dim(d) - rank(d) - rank(d + 1)).collect();
        let profile = BettiProfile { betti };
        let alt: i64 = profile
            .betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 1 { b as i64 } else { -(b as i64) })
            .sum();
        assert_eq!(alt, self.euler_characteristic(), "Euler characteristic mismatch");
        Ok(profile)
    }

    /// Basis of the top cycles `ker ∂_top` (there are no chains above).
    pub fn top_cycles(&self) -> Vec<Vec<Elem>> {
        let top = self.top_degree();
        let n = self.dim(top);
        let Some(b) = self.boundary(top) else {
            return Vec::new();
        };
        // rows of ∂_top streamed from its columns
        let mut rows: Vec<SparseVec> = vec![Vec::new(); b.rows()];
        for (j, col) in b.columns().iter().enumerate() {
            for &(i, v) in col {
                rows[i as usize].push((j as u32, v));
            }
        }
        crate::ffield::linalg::kernel_of_rows(&self.field, n, rows.len(), |i, buf| buf.extend_from_slice(&rows[i]))
    }
}

/// Whether reduced homology vanishes outside degree `top`.
pub fn is_spherical(c: &ChainComplex, top: i64) -> Result<bool> {
    Ok(c.betti()?.is_concentrated_in(top))
}

/// The order complex together with its chains, so that callers can act on
/// simplices.
#[derive(Clone, Debug)]
pub struct OrderComplex {
    pub complex: ChainComplex,
    /// `chains[k]` lists the chains `x_0 < ... < x_{k-1}` (so `chains[0]`
    /// holds the empty chain), lexicographically.
    pub chains: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
}

impl OrderComplex {
    /// Index of a strictly increasing chain of `d + 1` elements among the
    /// `d`-simplices.
    pub fn chain_index(&self, chain: &[u32]) -> Option<usize> {
        self.index.get(chain.len())?.get(chain).map(|&i| i as usize)
    }

    pub fn simplices(&self, d: i64) -> &[Vec<u32>] {
        &self.chains[(d + 1) as usize]
    }
}

fn sign(field: &Field, i: usize) -> Elem {
    if i % 2 == 0 {
        1
    } else {
        field.neg(1)
    }
}

/// The reduced order complex of a poset.
pub fn order_complex(p: &Poset, field: &Field) -> Result<OrderComplex> {
    order_complex_capped(p, field, DEFAULT_FLAG_CAP)
}

pub fn order_complex_capped(p: &Poset, field: &Field, cap: usize) -> Result<OrderComplex> {
    let mut chains: Vec<Vec<Vec<u32>>> = vec![vec![vec![]]];
    let mut level: Vec<Vec<u32>> = (0..p.len() as u32).map(|x| vec![x]).collect();
    let mut total = level.len();
    while !level.is_empty() {
        let mut next = Vec::new();
        for c in &level {
            let last = *c.last().unwrap() as usize;
            for y in p.above(last) {
                let mut d = c.clone();
                d.push(y as u32);
                next.push(d);
            }
        }
        total += next.len();
        if total > cap {
            return Err(Error::TooManyFlags { dim: chains.len(), cap });
        }
        chains.push(level);
        level = next;
    }
    // chains are naturally lexicographic: each level is generated from a
    // sorted level by appending increasing indices.
    let index: Vec<HashMap<Vec<u32>, u32>> = chains
        .iter()
        .map(|lv| lv.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect())
        .collect();
    let mut boundaries = Vec::new();
    for k in 1..chains.len() {
        let mut m = SparseMatrix::new(field, chains[k - 1].len());
        for c in &chains[k] {
            let mut col: SparseVec = Vec::with_capacity(c.len());
            let mut face = Vec::with_capacity(c.len() - 1);
            for i in 0..c.len() {
                face.clear();
                face.extend(c.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
                col.push((index[k - 1][&face], sign(field, i)));
            }
            col.sort_unstable();
            m.push_column(col);
        }
        boundaries.push(m);
    }
    let dims = chains.iter().map(Vec::len).collect();
    let complex = ChainComplex::new(field, dims, boundaries)?;
    Ok(OrderComplex { complex, chains, index })
}

/// A finite semisimplicial set given by level sizes and face maps:
/// `faces[p-1][s][i]` is `d_i` of the `s`-th `p`-simplex, for `p ≥ 1`.
#[derive(Clone, Debug)]
pub struct SemiSimplicial {
    pub levels: Vec<usize>,
    pub faces: Vec<Vec<Vec<u32>>>,
}

/// The reduced chain complex of a semisimplicial set, after checking the
/// simplicial identities `d_i d_j = d_{j-1} d_i` for `i < j`.
pub fn semisimplicial_complex(s: &SemiSimplicial, field: &Field) -> Result<ChainComplex> {
    assert_eq!(s.faces.len() + 1, s.levels.len().max(1));
    for p in 2..s.levels.len() {
        for (idx, f) in s.faces[p - 1].iter().enumerate() {
            if f.len() != p + 1 {
                return Err(Error::FaceIdentityViolation { level: p, simplex: idx, i: f.len(), j: p + 1 });
            }
            for j in 1..=p {
                for i in 0..j {
                    let a = s.faces[p - 2][f[j] as usize][i];
                    let b = s.faces[p - 2][f[i] as usize][j - 1];
                    if a != b {
                        return Err(Error::FaceIdentityViolation { level: p, simplex: idx, i, j });
                    }
                }
            }
        }
    }
    let mut dims = vec![1];
    dims.extend(&s.levels);
    let mut boundaries = Vec::new();
    if let Some(&v) = s.levels.first() {
        let mut m = SparseMatrix::new(field, 1);
        for _ in 0..v {
            m.push_column(vec![(0, 1)]);
        }
        boundaries.push(m);
    }
    for p in 1..s.levels.len() {
        let mut m = SparseMatrix::new(field, s.levels[p - 1]);
        for f in &s.faces[p - 1] {
            let mut acc: HashMap<u32, Elem> = HashMap::new();
            for (i, &t) in f.iter().enumerate() {
                let e = acc.entry(t).or_insert(0);
                *e = field.add(*e, sign(field, i));
            }
            let mut col: SparseVec = acc.into_iter().filter(|&(_, v)| v != 0).collect();
            col.sort_unstable();
            m.push_column(col);
        }
        boundaries.push(m);
    }
    ChainComplex::new(field, dims, boundaries)
}

/// Checks that `f` (given on element indices) is order-preserving.
pub fn check_monotone(x: &Poset, y: &Poset, f: &[usize]) -> Result<()> {
    assert_eq!(f.len(), x.len());
    for a in 0..x.len() {
        for b in x.above(a) {
            if !y.leq(f[a], f[b]) {
                return Err(Error::NotMonotone(a, b));
            }
        }
    }
    Ok(())
}

/// `(f_{≤y}, Y_{>y})` as element index lists of `X` and `Y`.
pub fn poset_map_fibers(x: &Poset, y: &Poset, f: &[usize], at: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    check_monotone(x, y, f)?;
    let below: Vec<usize> = (0..x.len()).filter(|&a| y.leq(f[a], at)).collect();
    Ok((below, y.strictly_above(at)))
}

#[derive(Clone, Debug, Serialize)]
pub struct FiltrationReport {
    pub top: i64,
    pub lhs: usize,
    pub base: usize,
    /// `(y, t(y), b̃_{t-1}(Y_{>y}), b̃_{N-t}(f_{≤y}))` for contributing `y`.
    pub terms: Vec<(usize, i64, usize, usize)>,
    pub rhs: usize,
}

impl FiltrationReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Verifies the hypotheses of the poset filtration theorem for `f : X → Y`,
/// labels `t` and top degree `n`, then compares `b̃_n(X)` with
/// `b̃_n(Y) + Σ_y b̃_{t(y)-1}(Y_{>y}) · b̃_{n-t(y)}(f_{≤y})`.
pub fn filtration_identity_check(x: &Poset, y: &Poset, f: &[usize], t: &[i64], n: i64, field: &Field) -> Result<FiltrationReport> {
    check_monotone(x, y, f)?;
    let by = order_complex(y, field)?.complex.betti()?;
    if !by.is_concentrated_in(n) {
        return Err(Error::HypothesisFailed { which: "(i) Y spherical".into(), at: None });
    }
    let mut terms = Vec::new();
    for at in 0..y.len() {
        let (below, up) = poset_map_fibers(x, y, f, at)?;
        let b_below = order_complex(&x.induced(&below), field)?.complex.betti()?;
        if !b_below.is_concentrated_in(n - t[at]) {
            return Err(Error::HypothesisFailed { which: "(ii) fiber f_{<=y} spherical".into(), at: Some(at) });
        }
        let b_up = order_complex(&y.induced(&up), field)?.complex.betti()?;
        if !b_up.is_concentrated_in(t[at] - 1) {
            return Err(Error::HypothesisFailed { which: "(iii) Y_{>y} spherical".into(), at: Some(at) });
        }
        if (0..=n).contains(&t[at]) {
            let a = b_up.get(t[at] - 1);
            let b = b_below.get(n - t[at]);
            if a * b != 0 {
                terms.push((at, t[at], a, b));
            }
        }
    }
    let lhs = order_complex(x, field)?.complex.betti()?.get(n);
    let base = by.get(n);
    let rhs = base + terms.iter().map(|&(_, _, a, b)| a * b).sum::<usize>();
    Ok(FiltrationReport { top: n, lhs, base, terms, rhs })
}

/// Parses the plain-text complex format: one simplex per line, the
/// dimension followed by its vertex indices.  Faces are added implicitly;
/// the result is the (reduced) simplicial chain complex on sorted vertices.
pub fn parse_simplicial(text: &str, field: &Field) -> Result<ChainComplex> {
    use std::collections::BTreeSet;
    let mut simplices: BTreeSet<Vec<u32>> = BTreeSet::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<u32> = line
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1))))
            .collect::<Result<_>>()?;
        let (&d, verts) = nums.split_first().ok_or_else(|| Error::Parse(format!("line {}: empty", ln + 1)))?;
        if verts.len() != d as usize + 1 {
            return Err(Error::Parse(format!("line {}: dimension {d} needs {} vertices", ln + 1, d + 1)));
        }
        let mut v = verts.to_vec();
        v.sort_unstable();
        v.dedup();
        if v.len() != verts.len() {
            return Err(Error::Parse(format!("line {}: repeated vertex", ln + 1)));
        }
        // all faces
        for mask in 1u64..(1 << v.len()) {
            simplices.insert(v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect());
        }
    }
    let top = simplices.iter().map(Vec::len).max().unwrap_or(0);
    let mut levels: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top + 1];
    levels[0].push(Vec::new());
    for s in simplices {
        let k = s.len();
        levels[k].push(s);
    }
    let index: Vec<HashMap<&Vec<u32>, u32>> =
        levels.iter().map(|lv| lv.iter().enumerate().map(|(i, s)| (s, i as u32)).collect()).collect();
    let mut boundaries = Vec::new();
    for k in 1..levels.len() {
        let mut m = SparseMatrix::new(field, levels[k - 1].len());
        for s in &levels[k] {
            let mut col: SparseVec = (0..s.len())
                .map(|i| {
                    let face: Vec<u32> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                    (index[k - 1][&face], sign(field, i))
                })
                .collect();
            col.sort_unstable();
            m.push_column(col);
        }
        boundaries.push(m);
    }
    let dims = levels.iter().map(Vec::len).collect();
    ChainComplex::new(field, dims, boundaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::enumerate_range;
    use proptest::prelude::*;

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    fn crown() -> Poset {
        // a0, a1 below b0, b1
        Poset::from_relation(4, |i, j| i < 2 && j >= 2).unwrap()
    }

    fn tits_poset(q: u64, n: usize) -> Poset {
        let f = Field::of_order(q).unwrap();
        let subs = enumerate_range(&f, n, 1, n - 1).unwrap();
        Poset::from_relation(subs.len(), |i, j| i != j && subs[i].is_subspace_of(&subs[j])).unwrap()
    }

    #[test]
    fn small_posets() {
        let anti = Poset::from_relation(3, |_, _| false).unwrap();
        let oc = order_complex(&anti, &f2()).unwrap();
        assert_eq!(oc.complex.dims(), &[1, 3]);
        assert_eq!(oc.complex.betti().unwrap().betti, vec![0, 2]);
        let chain = Poset::from_relation(2, |i, j| i < j).unwrap();
        assert!(order_complex(&chain, &f2()).unwrap().complex.betti().unwrap().betti.iter().all(|&b| b == 0));
        let c = order_complex(&crown(), &f2()).unwrap().complex;
        assert_eq!(c.betti().unwrap().get(1), 1);
        assert!(!is_spherical(&c, 0).unwrap());
        assert!(is_spherical(&c, 1).unwrap());
        assert!(Poset::from_relation(2, |i, j| i != j).is_err());
        assert!(Poset::from_relation(3, |i, j| (i, j) == (0, 1) || (i, j) == (1, 2)).is_err());
        let empty = Poset::from_relation(0, |_, _| false).unwrap();
        assert_eq!(order_complex(&empty, &f2()).unwrap().complex.betti().unwrap().betti, vec![1]);
    }

    #[test]
    fn generating_pairs_closure() {
        let p = Poset::from_generating_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.less(0, 2));
        assert_eq!(p.hasse_edges(), vec![(0, 1), (1, 2)]);
        assert!(Poset::from_generating_pairs(2, &[(0, 1), (1, 0)]).is_err());
        assert_eq!(p.opposite().opposite(), p);
    }

    #[test]
    fn tits_f2_3() {
        let p = tits_poset(2, 3);
        assert_eq!(p.len(), 14);
        let oc = order_complex(&p, &f2()).unwrap();
        assert_eq!(oc.complex.dims(), &[1, 14, 21]);
        let b = oc.complex.betti().unwrap();
        assert_eq!(b.betti, vec![0, 0, 8]);
        assert!(is_spherical(&oc.complex, 1).unwrap());
        assert_eq!(oc.complex.top_cycles().len(), 8);
        // the dense oracle for ∂_1
        let d1 = oc.complex.boundary(1).unwrap();
        assert_eq!(crate::ffield::sparse_rank(d1, &Caps::default()).unwrap(), d1.to_dense().rank());
        // odd characteristic with signs
        let f3 = Field::prime(3).unwrap();
        assert_eq!(order_complex(&p, &f3).unwrap().complex.betti().unwrap().betti, vec![0, 0, 8]);
    }

    #[test]
    fn semisimplicial_basics() {
        let six = SemiSimplicial { levels: vec![6], faces: vec![] };
        assert_eq!(semisimplicial_complex(&six, &f2()).unwrap().betti().unwrap().get(0), 5);
        let edge = SemiSimplicial { levels: vec![2, 1], faces: vec![vec![vec![1, 0]]] };
        assert!(semisimplicial_complex(&edge, &f2()).unwrap().betti().unwrap().betti.iter().all(|&b| b == 0));
        // a loop edge on one vertex is a circle in the thick realization
        let lp = SemiSimplicial { levels: vec![1, 1], faces: vec![vec![vec![0, 0]]] };
        assert_eq!(semisimplicial_complex(&lp, &Field::prime(3).unwrap()).unwrap().betti().unwrap().get(1), 1);
        // a 2-simplex whose faces violate d_0 d_1 = d_0 d_0
        let bad = SemiSimplicial {
            levels: vec![3, 3, 1],
            faces: vec![vec![vec![1, 0], vec![2, 0], vec![2, 1]], vec![vec![0, 1, 0]]],
        };
        assert!(matches!(semisimplicial_complex(&bad, &f2()), Err(Error::FaceIdentityViolation { .. })));
        let good = SemiSimplicial {
            levels: vec![3, 3, 1],
            faces: vec![vec![vec![1, 0], vec![2, 0], vec![2, 1]], vec![vec![2, 1, 0]]],
        };
        assert!(semisimplicial_complex(&good, &f2()).unwrap().betti().unwrap().betti.iter().all(|&b| b == 0));
    }

    #[test]
    fn fibers() {
        let p = crown();
        let id: Vec<usize> = (0..4).collect();
        let (below, up) = poset_map_fibers(&p, &p, &id, 2).unwrap();
        assert_eq!(below, vec![0, 1, 2]);
        assert!(up.is_empty());
        let point = Poset::from_relation(1, |_, _| false).unwrap();
        let (below, up) = poset_map_fibers(&p, &point, &[0; 4], 0).unwrap();
        assert_eq!((below.len(), up.len()), (4, 0));
        let chain = Poset::from_relation(2, |i, j| i < j).unwrap();
        assert!(matches!(poset_map_fibers(&chain, &chain, &[1, 0], 0), Err(Error::NotMonotone(0, 1))));
    }

    #[test]
    fn identity_filtration() {
        // Identity on an antichain with t = 0: fibers are points, Y_{>y} empty.
        let anti = Poset::from_relation(3, |_, _| false).unwrap();
        let id = vec![0, 1, 2];
        let r = filtration_identity_check(&anti, &anti, &id, &[0, 0, 0], 0, &f2()).unwrap();
        assert!(r.holds());
        assert_eq!((r.lhs, r.base, r.terms.len()), (2, 2, 0));
        // On T(F_2^3) the same labels violate hypothesis (iii).
        let p = tits_poset(2, 3);
        let id: Vec<usize> = (0..p.len()).collect();
        let r = filtration_identity_check(&p, &p, &id, &vec![0; p.len()], 1, &f2());
        assert!(matches!(r, Err(Error::HypothesisFailed { .. })));
    }

    #[test]
    fn parse_format() {
        let c = parse_simplicial("1 0 1\n1 1 2\n1 0 2\n", &f2()).unwrap();
        assert_eq!(c.betti().unwrap().betti, vec![0, 0, 1]);
        let c = parse_simplicial("2 0 1 2\n", &f2()).unwrap();
        assert_eq!(c.dims(), &[1, 3, 3, 1]);
        assert!(parse_simplicial("1 0\n", &f2()).is_err());
        assert!(parse_simplicial("x\n", &f2()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn cones_are_acyclic(mask in proptest::collection::vec(any::<bool>(), 14), top in any::<bool>()) {
            let p = tits_poset(2, 3);
            let mut members: Vec<usize> = (0..p.len()).filter(|&i| mask[i]).collect();
            if members.is_empty() { members.push(0); }
            let sub = p.induced(&members);
            // adjoin an extremal element
            let k = sub.len();
            let cone = Poset::from_relation(k + 1, |i, j| {
                if i == j { return false; }
                if top { (j == k && i < k) || (i < k && j < k && sub.less(i, j)) }
                else { (i == k && j < k) || (i < k && j < k && sub.less(i, j)) }
            }).unwrap();
            prop_assert!(cone.has_maximum() || cone.has_minimum());
            let b = order_complex(&cone, &f2()).unwrap().complex.betti().unwrap();
            prop_assert!(b.betti.iter().all(|&x| x == 0));
        }

        #[test]
        fn euler_matches(mask in proptest::collection::vec(any::<bool>(), 14)) {
            let p = tits_poset(2, 3);
            let members: Vec<usize> = (0..p.len()).filter(|&i| mask[i]).collect();
            let c = order_complex(&p.induced(&members), &Field::prime(3).unwrap()).unwrap().complex;
            // betti() asserts the Euler identity internally
            let b = c.betti().unwrap();
            prop_assert_eq!(b.betti.len(), c.dims().len());
        }
    }
}
