//! Exact elimination for the large, sparse matrices that come out of chain
//! complexes.  Columns are streamed into a fully reduced echelon basis, so a
//! column touching `k` pivot positions costs `k` row operations no matter how
//! large the rank already is.

use super::bits::BitRow;
use super::field::{Elem, Field};
use super::matrix::FMatrix;
use crate::error::{Error, Result};

/// A sparse vector: `(position, value)` pairs, duplicates are summed.
pub type SparseVec = Vec<(u32, Elem)>;

/// Column-major sparse matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    field: Field,
    rows: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn new(field: &Field, rows: usize) -> SparseMatrix {
        SparseMatrix { field: field.clone(), rows, columns: Vec::new() }
    }

    pub fn with_columns(field: &Field, rows: usize, columns: Vec<SparseVec>) -> SparseMatrix {
        debug_assert!(columns.iter().flatten().all(|&(i, _)| (i as usize) < rows));
        SparseMatrix { field: field.clone(), rows, columns }
    }

    pub fn from_dense(m: &FMatrix) -> SparseMatrix {
        let columns = (0..m.cols())
            .map(|j| {
                (0..m.rows())
                    .filter_map(|i| {
                        let v = m.get(i, j);
                        (v != 0).then_some((i as u32, v))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix { field: m.field().clone(), rows: m.rows(), columns }
    }

    pub fn to_dense(&self) -> FMatrix {
        let mut m = FMatrix::zeros(&self.field, self.rows, self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                let cur = m.get(i as usize, j);
                m.set(i as usize, j, self.field.add(cur, v));
            }
        }
        m
    }

    pub fn push_column(&mut self, col: SparseVec) {
        self.columns.push(col);
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.columns.len()
    }
    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    /// `self * other` as sparse matrices (for the `∂∂ = 0` checks).
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(other.rows, self.cols(), "shape mismatch in composition");
        let f = &self.field;
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: std::collections::BTreeMap<u32, Elem> = Default::default();
                for &(k, a) in col {
                    for &(i, b) in &self.columns[k as usize] {
                        let e = acc.entry(i).or_insert(0);
                        *e = f.add(*e, f.mul(a, b));
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect()
            })
            .collect();
        SparseMatrix { field: f.clone(), rows: self.rows, columns }
    }

    pub fn is_zero(&self) -> bool {
        let f = &self.field;
        self.columns.iter().all(|col| {
            let mut acc: std::collections::HashMap<u32, Elem> = Default::default();
            for &(i, v) in col {
                let e = acc.entry(i).or_insert(0);
                *e = f.add(*e, v);
            }
            acc.values().all(|&v| v == 0)
        })
    }
}

/// Resource limits for elimination.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub max_rows: usize,
    pub max_cols: usize,
    pub max_nnz: usize,
    /// Bound on `rank × rows` entries held by the echelon basis.
    pub max_basis_entries: usize,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            max_rows: 1 << 24,
            max_cols: 1 << 28,
            max_nnz: 1 << 30,
            max_basis_entries: 1 << 34,
        }
    }
}

#[derive(Clone)]
enum Store {
    Bits { rows: Vec<BitRow>, pivot_mask: BitRow },
    Dense { rows: Vec<Vec<Elem>> },
}

/// A fully reduced echelon basis of a subspace of `F^len`: every basis vector
/// has a 1 at its pivot and 0 at every other pivot.
#[derive(Clone)]
pub struct EchelonBasis {
    field: Field,
    len: usize,
    pivot_of: Vec<u32>,
    pivots: Vec<usize>,
    store: Store,
}

const NONE: u32 = u32::MAX;

fn axpy(f: &Field, dst: &mut [Elem], c: Elem, src: &[Elem]) {
    // dst += c * src
    if c == 0 {
        return;
    }
    if f.is_prime_field() {
        let p = f.p();
        let c = c as u32;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = ((*d as u32 + c * s as u32) % p) as Elem;
            }
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = f.add(*d, f.mul(c, s));
            }
        }
    }
}

impl EchelonBasis {
    pub fn new(field: &Field, len: usize) -> EchelonBasis {
        let store = if field.q() == 2 {
            Store::Bits { rows: Vec::new(), pivot_mask: BitRow::zeros(len) }
        } else {
            Store::Dense { rows: Vec::new() }
        };
        EchelonBasis { field: field.clone(), len, pivot_of: vec![NONE; len], pivots: Vec::new(), store }
    }

    pub fn len(&self) -> usize {
        self.len
    }
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_pivot(&self, pos: usize) -> bool {
        self.pivot_of[pos] != NONE
    }

    /// Basis vector `k` as a dense vector.
    pub fn vector(&self, k: usize) -> Vec<Elem> {
        match &self.store {
            Store::Bits { rows, .. } => rows[k].to_elems(),
            Store::Dense { rows } => rows[k].clone(),
        }
    }

    fn bits_from_sparse(&self, v: &[(u32, Elem)]) -> BitRow {
        let mut b = BitRow::zeros(self.len);
        for &(i, x) in v {
            if x & 1 == 1 {
                b.flip(i as usize);
            }
        }
        b
    }

    fn dense_from_sparse(&self, v: &[(u32, Elem)]) -> Vec<Elem> {
        let mut d = vec![0; self.len];
        for &(i, x) in v {
            d[i as usize] = self.field.add(d[i as usize], x);
        }
        d
    }

    fn reduce_bits(&self, v: &mut BitRow) {
        let Store::Bits { rows, pivot_mask } = &self.store else { unreachable!() };
        // Pivot positions present in v cannot be re-created by the XORs below.
        let hits: Vec<usize> = v
            .words()
            .iter()
            .zip(pivot_mask.words())
            .enumerate()
            .flat_map(|(k, (&a, &m))| {
                let mut w = a & m;
                std::iter::from_fn(move || {
                    if w == 0 {
                        return None;
                    }
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                })
            })
            .collect();
        for pos in hits {
            v.xor_assign(&rows[self.pivot_of[pos] as usize]);
        }
    }

    fn reduce_dense_in_place(&self, v: &mut [Elem]) {
        let Store::Dense { rows } = &self.store else { unreachable!() };
        let f = &self.field;
        let hits: Vec<usize> = self.pivots.iter().copied().filter(|&p| v[p] != 0).collect();
        for pos in hits {
            let c = f.neg(v[pos]);
            axpy(f, v, c, &rows[self.pivot_of[pos] as usize]);
        }
    }

    fn insert_reduced_bits(&mut self, v: BitRow) -> Option<usize> {
        let pos = v.first_one()?;
        let Store::Bits { rows, pivot_mask } = &mut self.store else { unreachable!() };
        for row in rows.iter_mut() {
            if row.get(pos) {
                row.xor_assign(&v);
            }
        }
        pivot_mask.set(pos);
        self.pivot_of[pos] = rows.len() as u32;
        rows.push(v);
        self.pivots.push(pos);
        Some(pos)
    }

    fn insert_reduced_dense(&mut self, mut v: Vec<Elem>) -> Option<usize> {
        let pos = v.iter().position(|&x| x != 0)?;
        let f = self.field.clone();
        let inv = f.inv(v[pos]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        let Store::Dense { rows } = &mut self.store else { unreachable!() };
        for row in rows.iter_mut() {
            let c = row[pos];
            if c != 0 {
                axpy(&f, row, f.neg(c), &v);
            }
        }
        self.pivot_of[pos] = rows.len() as u32;
        rows.push(v);
        self.pivots.push(pos);
        Some(pos)
    }

    /// Adds a vector; returns its new pivot if it was independent.
    pub fn insert_sparse(&mut self, v: &[(u32, Elem)]) -> Option<usize> {
        if matches!(self.store, Store::Bits { .. }) {
            let mut b = self.bits_from_sparse(v);
            self.reduce_bits(&mut b);
            self.insert_reduced_bits(b)
        } else {
            let mut d = self.dense_from_sparse(v);
            self.reduce_dense_in_place(&mut d);
            self.insert_reduced_dense(d)
        }
    }

    pub fn insert_dense(&mut self, v: &[Elem]) -> Option<usize> {
        assert_eq!(v.len(), self.len);
        if matches!(self.store, Store::Bits { .. }) {
            let mut b = BitRow::from_elems(v);
            self.reduce_bits(&mut b);
            self.insert_reduced_bits(b)
        } else {
            let mut d = v.to_vec();
            self.reduce_dense_in_place(&mut d);
            self.insert_reduced_dense(d)
        }
    }

    /// The canonical representative of `v` modulo the span.
    pub fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.len);
        if matches!(self.store, Store::Bits { .. }) {
            let mut b = BitRow::from_elems(v);
            self.reduce_bits(&mut b);
            b.to_elems()
        } else {
            let mut d = v.to_vec();
            self.reduce_dense_in_place(&mut d);
            d
        }
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coefficients of `v` in the basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        self.contains(v).then(|| self.pivots.iter().map(|&p| v[p]).collect())
    }

    /// A basis of `{x : b·x = 0 for all basis vectors b}` under the standard
    /// bilinear form, one vector per non-pivot position.
    pub fn orthogonal_complement(&self) -> Vec<Vec<Elem>> {
        let f = &self.field;
        let vectors: Vec<Vec<Elem>> = (0..self.rank()).map(|k| self.vector(k)).collect();
        (0..self.len)
            .filter(|&c| self.pivot_of[c] == NONE)
            .map(|free| {
                let mut x = vec![0; self.len];
                x[free] = 1;
                for (k, &p) in self.pivots.iter().enumerate() {
                    x[p] = f.neg(vectors[k][free]);
                }
                x
            })
            .collect()
    }
}

/// Exact rank of a sparse matrix.
pub fn sparse_rank(m: &SparseMatrix, caps: &Caps) -> Result<usize> {
    if m.rows() > caps.max_rows || m.cols() > caps.max_cols {
        return Err(Error::ResourceCapExceeded(format!(
            "matrix {}x{} exceeds {}x{}",
            m.rows(),
            m.cols(),
            caps.max_rows,
            caps.max_cols
        )));
    }
    if m.nnz() > caps.max_nnz {
        return Err(Error::ResourceCapExceeded(format!("{} nonzeros exceed {}", m.nnz(), caps.max_nnz)));
    }
    rank_of_columns(m.field(), m.rows(), m.columns().iter().map(|c| c.as_slice()), None, caps)
}

/// Rank of a streamed sequence of columns, stopping early once `limit` (an
/// a-priori upper bound on the rank) is reached.
pub fn rank_of_columns<'a, I>(field: &Field, rows: usize, columns: I, limit: Option<usize>, caps: &Caps) -> Result<usize>
where
    I: IntoIterator<Item = &'a [(u32, Elem)]>,
{
    let limit = limit.unwrap_or(rows).min(rows);
    let mut basis = EchelonBasis::new(field, rows);
    if limit == 0 {
        return Ok(0);
    }
    for col in columns {
        if basis.insert_sparse(col).is_some() {
            if basis.rank() * rows > caps.max_basis_entries {
                return Err(Error::ResourceCapExceeded(format!(
                    "echelon basis beyond {} entries",
                    caps.max_basis_entries
                )));
            }
            if basis.rank() == limit {
                break;
            }
        }
    }
    Ok(basis.rank())
}

/// Like [`rank_of_columns`] for columns produced on the fly.
pub fn rank_of_generated<F>(field: &Field, rows: usize, ncols: usize, limit: Option<usize>, caps: &Caps, mut column: F) -> Result<usize>
where
    F: FnMut(usize, &mut SparseVec),
{
    if rows > caps.max_rows || ncols > caps.max_cols {
        return Err(Error::ResourceCapExceeded(format!(
            "matrix {rows}x{ncols} exceeds {}x{}",
            caps.max_rows, caps.max_cols
        )));
    }
    let limit = limit.unwrap_or(rows).min(rows).min(ncols);
    let mut basis = EchelonBasis::new(field, rows);
    let mut buf = SparseVec::new();
    if limit == 0 {
        return Ok(0);
    }
    for j in 0..ncols {
        buf.clear();
        column(j, &mut buf);
        if basis.insert_sparse(&buf).is_some() {
            if basis.rank() * rows > caps.max_basis_entries {
                return Err(Error::ResourceCapExceeded(format!(
                    "echelon basis beyond {} entries",
                    caps.max_basis_entries
                )));
            }
            if basis.rank() == limit {
                break;
            }
        }
    }
    Ok(basis.rank())
}

/// Kernel `{x ∈ F^ncols : A x = 0}` of a matrix given by its rows, streamed.
pub fn kernel_of_rows<F>(field: &Field, ncols: usize, nrows: usize, mut row: F) -> Vec<Vec<Elem>>
where
    F: FnMut(usize, &mut SparseVec),
{
    let mut basis = EchelonBasis::new(field, ncols);
    let mut buf = SparseVec::new();
    for i in 0..nrows {
        if basis.rank() == ncols {
            break;
        }
        buf.clear();
        row(i, &mut buf);
        basis.insert_sparse(&buf);
    }
    basis.orthogonal_complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(f: &Field, rng: &mut ChaCha8Rng) -> SparseMatrix {
        let rows = rng.gen_range(0..=64usize);
        let cols = rng.gen_range(0..=64usize);
        let density = rng.gen_range(0.0..0.3);
        let mut m = SparseMatrix::new(f, rows);
        for _ in 0..cols {
            let mut col = SparseVec::new();
            for i in 0..rows {
                if rng.gen_bool(density) {
                    col.push((i as u32, rng.gen_range(1..f.q()) as Elem));
                }
            }
            m.push_column(col);
        }
        m
    }

    #[test]
    fn sparse_rank_matches_dense_rref() {
        for (p, r) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let f = Field::new(p, r).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7 + p as u64 * 10 + r as u64);
            for _ in 0..1000 {
                let m = random_sparse(&f, &mut rng);
                let dense = m.to_dense();
                assert_eq!(sparse_rank(&m, &Caps::default()).unwrap(), dense.rank());
            }
        }
    }

    #[test]
    fn small_examples() {
        let f2 = Field::prime(2).unwrap();
        // ∂_0 of three points onto the empty simplex.
        let d0 = SparseMatrix::with_columns(&f2, 1, vec![vec![(0, 1)]; 3]);
        assert_eq!(sparse_rank(&d0, &Caps::default()).unwrap(), 1);
        let perm = SparseMatrix::with_columns(&f2, 3, vec![vec![(2, 1)], vec![(0, 1)], vec![(1, 1)]]);
        assert_eq!(sparse_rank(&perm, &Caps::default()).unwrap(), 3);
        let caps = Caps { max_nnz: 2, ..Caps::default() };
        assert!(matches!(sparse_rank(&perm, &caps), Err(Error::ResourceCapExceeded(_))));
    }

    #[test]
    fn kernel_of_rows_is_kernel() {
        let f3 = Field::prime(3).unwrap();
        let a = FMatrix::from_ints(&f3, &[&[1, 2, 0, 1], &[0, 1, 1, 1], &[1, 0, 1, 2]]);
        let sparse_rows: Vec<SparseVec> = (0..3)
            .map(|i| (0..4).filter(|&j| a.get(i, j) != 0).map(|j| (j as u32, a.get(i, j))).collect())
            .collect();
        let k = kernel_of_rows(&f3, 4, 3, |i, buf| buf.extend_from_slice(&sparse_rows[i]));
        assert_eq!(k.len(), 4 - a.rank());
        for x in &k {
            assert!(a.mul_vec(x).iter().all(|&v| v == 0));
        }
    }

    proptest! {
        #[test]
        fn rank_invariant_under_permutation(seed in 0u64..10_000) {
            let f = Field::prime(3).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_sparse(&f, &mut rng);
            let mut cols = m.columns().to_vec();
            cols.reverse();
            let perm_rows: Vec<u32> = (0..m.rows() as u32).rev().collect();
            for c in cols.iter_mut() {
                for e in c.iter_mut() {
                    e.0 = perm_rows[e.0 as usize];
                }
            }
            let m2 = SparseMatrix::with_columns(&f, m.rows(), cols);
            prop_assert_eq!(sparse_rank(&m, &Caps::default()).unwrap(), sparse_rank(&m2, &Caps::default()).unwrap());
        }
    }
}
