use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use super::bits::BitRow;
use super::field::{Elem, Field};

/// Dense matrix over a finite field, row-major.
#[derive(Clone, Debug)]
pub struct FMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

/// Result of [`FMatrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: FMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl PartialEq for FMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}
impl Eq for FMatrix {}

impl Hash for FMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl PartialOrd for FMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the row-major entry sequence (shape first).
impl Ord for FMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols)
            .cmp(&(other.rows, other.cols))
            .then_with(|| self.data.cmp(&other.data))
    }
}

impl FMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> FMatrix {
        FMatrix { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> FMatrix {
        let mut m = FMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_vec(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> FMatrix {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        debug_assert!(data.iter().all(|&x| (x as u32) < field.q()));
        FMatrix { field: field.clone(), rows, cols, data }
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Elem>]) -> FMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        FMatrix::from_vec(field, rows.len(), cols, data)
    }

    /// Matrix from small integers, reduced into the prime field.
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> FMatrix {
        let v: Vec<Vec<Elem>> =
            rows.iter().map(|r| r.iter().map(|&x| field.from_int(x)).collect()).collect();
        FMatrix::from_rows(field, &v)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = FMatrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul(&self, other: &FMatrix) -> FMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let f = &self.field;
        let mut out = FMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[k * other.cols + j];
                    if b != 0 {
                        let idx = i * other.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &FMatrix) -> FMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        FMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &FMatrix) -> FMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        FMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: Elem) -> FMatrix {
        let data = self.data.iter().map(|&a| self.field.mul(a, c)).collect();
        FMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn block_sum(&self, other: &FMatrix) -> FMatrix {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut m = FMatrix::zeros(&self.field, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> FMatrix {
        let mut m = FMatrix::zeros(&self.field, rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &FMatrix) -> FMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FMatrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// The unique reduced row echelon form.
    pub fn rref(&self) -> Rref {
        if self.field.q() == 2 {
            return self.rref_gf2();
        }
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = m.get(r, j);
                m.set(r, j, f.mul(v, inv));
            }
            for i in 0..m.rows {
                let a = m.get(i, c);
                if i == r || a == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(a, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, rank: r, pivots }
    }

    fn rref_gf2(&self) -> Rref {
        let mut rows: Vec<BitRow> = (0..self.rows).map(|i| BitRow::from_elems(self.row(i))).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(piv) = (r..rows.len()).find(|&i| rows[i].get(c)) else { continue };
            rows.swap(piv, r);
            let (head, tail) = rows.split_at_mut(r);
            let (pivot_row, tail) = tail.split_first_mut().unwrap();
            for row in head.iter_mut().chain(tail.iter_mut()) {
                if row.get(c) {
                    row.xor_assign(pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for row in &rows {
            data.extend((0..self.cols).map(|j| row.get(j) as Elem));
        }
        Rref { matrix: FMatrix::from_vec(&self.field, self.rows, self.cols, data), rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn inverse(&self) -> Option<FMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = FMatrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let red = aug.rref();
        if red.pivots.len() < n || red.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(red.matrix.submatrix(0..n, n..2 * n))
    }

    /// A basis of the right kernel `{x : M x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Elem>> {
        let red = self.rref();
        let f = &self.field;
        let mut kernel = Vec::new();
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &c in &red.pivots {
                v[c] = true;
            }
            v
        };
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut x = vec![0; self.cols];
            x[free] = 1;
            for (k, &pc) in red.pivots.iter().enumerate() {
                x[pc] = f.neg(red.matrix.get(k, free));
            }
            kernel.push(x);
        }
        kernel
    }

    /// Solves `M x = b` for some `x`, if solvable.
    pub fn solve(&self, b: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = FMatrix::zeros(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b[i]);
        }
        let red = aug.rref();
        if red.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (k, &pc) in red.pivots.iter().enumerate() {
            x[pc] = red.matrix.get(k, self.cols);
        }
        Some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Permutation matrix with `M e_j = e_{perm[j]}`.
    pub fn permutation(field: &Field, perm: &[usize]) -> FMatrix {
        let n = perm.len();
        let mut m = FMatrix::zeros(field, n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    /// Elementary matrix `I + a E_{ij}`.
    pub fn elementary(field: &Field, n: usize, i: usize, j: usize, a: Elem) -> FMatrix {
        let mut m = FMatrix::identity(field, n);
        let v = field.add(m.get(i, j), a);
        m.set(i, j, v);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let f2 = Field::prime(2).unwrap();
        let id = FMatrix::identity(&f2, 3);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);
        let z = FMatrix::zeros(&f2, 2, 3);
        assert_eq!(z.rref().matrix, z);
        assert_eq!(z.rref().rank, 0);
        let m = FMatrix::from_ints(&f2, &[&[1, 1], &[1, 1]]);
        let r = m.rref();
        assert_eq!(r.matrix, FMatrix::from_ints(&f2, &[&[1, 1], &[0, 0]]));
        assert_eq!((r.rank, r.pivots), (1, vec![0]));
    }

    #[test]
    fn inverse_and_kernel() {
        let f3 = Field::prime(3).unwrap();
        let m = FMatrix::from_ints(&f3, &[&[1, 2, 0], &[0, 1, 1], &[1, 0, 2]]);
        match m.inverse() {
            Some(inv) => assert_eq!(m.mul(&inv), FMatrix::identity(&f3, 3)),
            None => {
                for x in m.kernel() {
                    assert!(m.mul_vec(&x).iter().all(|&v| v == 0));
                }
                assert_eq!(m.kernel().len(), 3 - m.rank());
            }
        }
        let sing = FMatrix::from_ints(&f3, &[&[1, 2], &[2, 1]]);
        assert!(sing.inverse().is_none());
        let k = sing.kernel();
        assert_eq!(k.len(), 1);
        assert!(sing.mul_vec(&k[0]).iter().all(|&v| v == 0));
    }

    #[test]
    fn solve_roundtrip() {
        let f4 = Field::new(2, 2).unwrap();
        let m = FMatrix::from_rows(&f4, &[vec![1, 2, 3], vec![0, 3, 1]]);
        let b = vec![2, 1];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
    }
}
