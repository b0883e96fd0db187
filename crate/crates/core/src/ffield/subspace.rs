use std::fmt;

use super::field::{Elem, Field};
use super::matrix::FMatrix;
use crate::error::{Error, Result};

/// A subspace of `F_q^n`, stored by its reduced row echelon basis, so that
/// equality and ordering are representational.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    basis: FMatrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for i in 0..self.basis.rows() {
            if i > 0 {
                write!(f, ",")?;
            }
            for &x in self.basis.row(i) {
                write!(f, "{x}")?;
            }
        }
        write!(f, ">")
    }
}

pub const DEFAULT_SUBSPACE_CAP: u128 = 10_000_000;

/// The Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

impl Subspace {
    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace { basis: FMatrix::zeros(field, 0, n) }
    }

    pub fn whole(field: &Field, n: usize) -> Subspace {
        Subspace { basis: FMatrix::identity(field, n) }
    }

    /// The span of the rows of `m`.
    pub fn row_space(m: &FMatrix) -> Subspace {
        let red = m.rref();
        Subspace { basis: red.matrix.submatrix(0..red.rank, 0..m.cols()) }
    }

    pub fn span(field: &Field, n: usize, vectors: &[Vec<Elem>]) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(field, n);
        }
        Subspace::row_space(&FMatrix::from_rows(field, vectors))
    }

    /// `span{e_i : i in coords}`.
    pub fn coordinate(field: &Field, n: usize, coords: &[usize]) -> Subspace {
        let vs: Vec<Vec<Elem>> = coords
            .iter()
            .map(|&i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        Subspace::span(field, n, &vs)
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &FMatrix {
        &self.basis
    }
    pub fn basis_vectors(&self) -> Vec<Vec<Elem>> {
        self.basis.to_rows()
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| self.basis.row(i).iter().position(|&x| x != 0).unwrap())
            .collect()
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::AmbientMismatch(self.ambient_dim(), other.ambient_dim()));
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[Elem]) -> bool {
        assert_eq!(v.len(), self.ambient_dim());
        let f = self.field();
        let mut v = v.to_vec();
        for (k, p) in self.pivots().into_iter().enumerate() {
            let c = v[p];
            if c != 0 {
                for (j, &b) in self.basis.row(k).iter().enumerate() {
                    v[j] = f.sub(v[j], f.mul(c, b));
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() <= other.dim()
            && (0..self.dim()).all(|i| other.contains_vector(self.basis.row(i)))
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_whole(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn is_proper_nonzero(&self) -> bool {
        !self.is_zero() && !self.is_whole()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Ok(Subspace::row_space(&self.basis.vstack(&other.basis)))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// `W° = {x : w·x = 0 for all w ∈ W}` under the standard bilinear form.
    pub fn annihilator(&self) -> Subspace {
        let n = self.ambient_dim();
        let kernel = if self.dim() == 0 {
            return Subspace::whole(self.field(), n);
        } else {
            self.basis.kernel()
        };
        Subspace::span(self.field(), n, &kernel)
    }

    /// A complement `C` with `C ⊕ self = F^n`: greedily add `e_1, e_2, ...`
    /// whenever they are independent of what has been collected.
    pub fn complement(&self) -> Subspace {
        self.complement_containing(&Subspace::zero(self.field(), self.ambient_dim()))
            .expect("zero meets everything trivially")
    }

    /// A complement of `self` containing `v`: `v` plus greedily chosen
    /// standard basis vectors.  Requires `v ∩ self = 0`.
    pub fn complement_containing(&self, v: &Subspace) -> Result<Subspace> {
        self.check(v)?;
        if !self.intersection(v)?.is_zero() {
            return Err(Error::PreconditionFailed("subspaces intersect nontrivially".into()));
        }
        let n = self.ambient_dim();
        let f = self.field();
        let mut acc = self.sum(v)?;
        let mut c = v.clone();
        for i in 0..n {
            if acc.is_whole() {
                break;
            }
            let mut e = vec![0; n];
            e[i] = 1;
            if !acc.contains_vector(&e) {
                acc = acc.sum(&Subspace::span(f, n, &[e.clone()]))?;
                c = c.sum(&Subspace::span(f, n, &[e]))?;
            }
        }
        Ok(c)
    }

    /// A surjection `F^n -> F^{n-k}` with kernel `self`: subtract the basis
    /// rows to clear pivot coordinates, then keep the remaining coordinates.
    pub fn quotient_projection(&self) -> FMatrix {
        let n = self.ambient_dim();
        let f = self.field();
        let piv = self.pivots();
        let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
        let mut m = FMatrix::zeros(f, free.len(), n);
        for (row, &c) in free.iter().enumerate() {
            // Coordinate c of (v - Σ v[p_k] b_k) = v[c] - Σ v[p_k] b_k[c].
            m.set(row, c, 1);
            for (k, &p) in piv.iter().enumerate() {
                let b = self.basis.get(k, c);
                if b != 0 {
                    let cur = m.get(row, p);
                    m.set(row, p, f.sub(cur, b));
                }
            }
        }
        m
    }

    /// The image under the linear map `x ↦ A x`.
    pub fn image(&self, a: &FMatrix) -> Subspace {
        assert_eq!(a.cols(), self.ambient_dim());
        if self.dim() == 0 {
            return Subspace::zero(self.field(), a.rows());
        }
        Subspace::row_space(&self.basis.mul(&a.transpose()))
    }

    /// The preimage of `self` under `x ↦ A x` (`A: F^m -> F^n`).
    pub fn preimage(&self, a: &FMatrix) -> Subspace {
        // x with A x ∈ self  ⟺  (A x)·y = 0 for y ∈ self°.
        let ann = self.annihilator();
        if ann.dim() == 0 {
            return Subspace::whole(self.field(), a.cols());
        }
        let cond = ann.basis.mul(a);
        Subspace::span(self.field(), a.cols(), &cond.kernel())
    }
}

/// All `k`-dimensional subspaces of `F^n` in lexicographic RREF order.
pub fn enumerate_subspaces(field: &Field, n: usize, k: usize) -> Result<Vec<Subspace>> {
    enumerate_subspaces_capped(field, n, k, DEFAULT_SUBSPACE_CAP)
}

pub fn enumerate_subspaces_capped(field: &Field, n: usize, k: usize, cap: u128) -> Result<Vec<Subspace>> {
    if k > n {
        return Err(Error::BadParameters(format!("dimension {k} exceeds ambient {n}")));
    }
    let count = gaussian_binomial(field.q() as u64, n, k);
    if count > cap {
        return Err(Error::TooManySubspaces { count, cap });
    }
    let q = field.q() as u64;
    let mut out = Vec::with_capacity(count as usize);
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let p = &pivots;
                (p[i] + 1..n).filter(move |c| !p.contains(c)).map(move |c| (i, c))
            })
            .collect();
        let total = q.pow(free.len() as u32);
        for code in 0..total {
            let mut m = FMatrix::zeros(field, k, n);
            for (i, &p) in pivots.iter().enumerate() {
                m.set(i, p, 1);
            }
            let mut c = code;
            for &(i, j) in &free {
                m.set(i, j, (c % q) as Elem);
                c /= q;
            }
            out.push(Subspace { basis: m });
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            if pivots[i] < n - k + i {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All subspaces of `F^n` with `lo <= dim <= hi`, ordered by dimension.
pub fn enumerate_range(field: &Field, n: usize, lo: usize, hi: usize) -> Result<Vec<Subspace>> {
    let mut out = Vec::new();
    for k in lo..=hi.min(n) {
        out.extend(enumerate_subspaces(field, n, k)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(field: &Field, n: usize) -> Vec<Subspace> {
        enumerate_range(field, n, 0, n).unwrap()
    }

    #[test]
    fn counts_match_gaussian_binomials() {
        for q in [2u32, 3, 4, 5] {
            let f = Field::of_order(q as u64).unwrap();
            for n in 0..=4 {
                for k in 0..=n {
                    let subs = enumerate_subspaces(&f, n, k).unwrap();
                    assert_eq!(subs.len() as u128, gaussian_binomial(q as u64, n, k), "q={q} n={n} k={k}");
                    let mut dedup = subs.clone();
                    dedup.dedup();
                    assert_eq!(dedup.len(), subs.len());
                    assert!(subs.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
        assert_eq!(enumerate_subspaces(&Field::prime(2).unwrap(), 3, 1).unwrap().len(), 7);
        assert_eq!(enumerate_subspaces(&Field::prime(3).unwrap(), 2, 1).unwrap().len(), 4);
        let err = enumerate_subspaces_capped(&Field::prime(2).unwrap(), 4, 2, 10).unwrap_err();
        assert!(matches!(err, Error::TooManySubspaces { count: 35, .. }));
    }

    #[test]
    fn modular_law_exhaustive() {
        let f = Field::prime(2).unwrap();
        for n in 1..=4 {
            let subs = all(&f, n);
            for a in &subs {
                for b in &subs {
                    let s = a.sum(b).unwrap();
                    let i = a.intersection(b).unwrap();
                    assert_eq!(a.dim() + b.dim(), s.dim() + i.dim());
                    assert!(i.is_subspace_of(a) && i.is_subspace_of(b));
                    assert!(a.is_subspace_of(&s) && b.is_subspace_of(&s));
                }
            }
        }
    }

    #[test]
    fn annihilator_is_inclusion_reversing_involution() {
        for (q, n) in [(2, 3), (3, 2)] {
            let f = Field::of_order(q).unwrap();
            let subs = all(&f, n);
            for a in &subs {
                assert_eq!(&a.annihilator().annihilator(), a);
                assert_eq!(a.annihilator().dim(), n - a.dim());
                for b in &subs {
                    if a.is_subspace_of(b) {
                        assert!(b.annihilator().is_subspace_of(&a.annihilator()));
                    }
                }
            }
        }
    }

    #[test]
    fn lattice_examples() {
        let f = Field::prime(2).unwrap();
        let lines = enumerate_subspaces(&f, 2, 1).unwrap();
        assert_eq!(lines[0].sum(&lines[1]).unwrap().dim(), 2);
        let e1 = Subspace::coordinate(&f, 2, &[0]);
        assert_eq!(e1.complement(), Subspace::coordinate(&f, 2, &[1]));
        let other = Subspace::zero(&f, 3);
        assert_eq!(e1.sum(&other).unwrap_err(), Error::AmbientMismatch(2, 3));
    }

    #[test]
    fn complements_and_quotients() {
        let f = Field::prime(3).unwrap();
        for w in all(&f, 3) {
            let c = w.complement();
            assert_eq!(c.dim() + w.dim(), 3);
            assert!(c.intersection(&w).unwrap().is_zero());
            let proj = w.quotient_projection();
            assert_eq!(proj.rows(), 3 - w.dim());
            assert_eq!(proj.rank(), 3 - w.dim());
            for v in w.basis_vectors() {
                assert!(proj.mul_vec(&v).iter().all(|&x| x == 0));
            }
            // The preimage of zero is w again.
            assert_eq!(Subspace::zero(&f, 3 - w.dim()).preimage(&proj), w);
        }
    }

    #[test]
    fn image_under_invertible_map() {
        let f = Field::new(2, 2).unwrap();
        let g = FMatrix::from_rows(&f, &[vec![1, 2], vec![0, 3]]);
        for l in enumerate_subspaces(&f, 2, 1).unwrap() {
            let img = l.image(&g);
            assert_eq!(img.dim(), 1);
            assert_eq!(img.image(&g.inverse().unwrap()), l);
        }
    }
}
