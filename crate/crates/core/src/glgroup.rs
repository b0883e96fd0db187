//! Explicit matrix groups: `GL_n(F_q)` and the subgroups cut out by
//! "preserve / fix" conditions, enumerated column by column.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::ffield::{Elem, FMatrix, Field, Subspace};

pub const DEFAULT_GROUP_CAP: u128 = 1 << 21;
const TABLE_MAX: usize = 4096;

/// `|GL_n(F_q)| = ∏_{i<n} (q^n - q^i)`.
pub fn gl_order(q: u64, n: usize) -> u128 {
    let q = q as u128;
    (0..n).map(|i| q.pow(n as u32) - q.pow(i as u32)).product()
}

/// Which subgroup of `GL_n(F_q)` to build.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupKind {
    Full,
    /// Fixes `W` pointwise.
    FixW(Subspace),
    /// Preserves `W`.
    PresW(Subspace),
    /// Preserves `W` and acts trivially on `P/W`.
    PresWFixQuot(Subspace),
    /// Fixes `W` pointwise, preserves `V` (with `V ∩ W = 0`) and acts
    /// trivially on `P/V`.
    K { w: Subspace, v: Subspace },
    /// Preserves the line `L` and acts trivially on `P/L`.
    KPrime { l: Subspace },
    /// Upper triangular matrices.
    Borel,
    /// Upper unitriangular matrices.
    UpperUnitriangular,
    BlockDiagonal(Vec<usize>),
    BlockUpper(Vec<usize>),
    /// `[[I_a, *], [0, I_b]]`.
    UnipotentBlock { a: usize, b: usize },
    /// Permutation matrices.
    Permutations,
    /// Identity plus arbitrary entries at the listed positions (0-based).
    Pattern(Vec<(usize, usize)>),
    /// The closure of a list of invertible matrices.
    Generated(Vec<FMatrix>),
}

#[derive(Clone, Debug)]
pub struct SubgroupSpec {
    pub field: Field,
    pub n: usize,
    pub kind: SubgroupKind,
    pub cap: u128,
}

impl SubgroupSpec {
    pub fn new(field: &Field, n: usize, kind: SubgroupKind) -> SubgroupSpec {
        SubgroupSpec { field: field.clone(), n, kind, cap: DEFAULT_GROUP_CAP }
    }

    pub fn full(field: &Field, n: usize) -> SubgroupSpec {
        SubgroupSpec::new(field, n, SubgroupKind::Full)
    }
}

/// A finite group of invertible matrices with a canonical element order
/// (identity first, then lexicographic on row-major entries).  Elements are referred to by index.
pub struct MatGroup {
    field: Field,
    n: usize,
    elements: Vec<FMatrix>,
    index: HashMap<FMatrix, u32>,
    inverses: Vec<u32>,
    identity: usize,
    gens: Vec<usize>,
    table: Option<Vec<u32>>,
    full: bool,
    label: String,
}

impl fmt::Debug for MatGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatGroup({}, order {})", self.label, self.order())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Cell {
    Free,
    Zero,
    One,
}

fn pattern_for(n: usize, kind: &SubgroupKind, dims: (usize, usize)) -> Vec<Cell> {
    use Cell::*;
    let (l, w) = dims;
    let ident = |i: usize, j: usize| if i == j { One } else { Zero };
    let mut cells = vec![Free; n * n];
    let blocks_of = |sizes: &[usize]| {
        let mut b = Vec::new();
        for (k, &s) in sizes.iter().enumerate() {
            b.extend(std::iter::repeat(k).take(s));
        }
        b
    };
    for i in 0..n {
        for j in 0..n {
            cells[i * n + j] = match kind {
                SubgroupKind::Full | SubgroupKind::Generated(_) | SubgroupKind::Permutations => Free,
                SubgroupKind::FixW(_) => {
                    if j < w {
                        ident(i, j)
                    } else {
                        Free
                    }
                }
                SubgroupKind::PresW(_) => {
                    if j < w && i >= w {
                        Zero
                    } else {
                        Free
                    }
                }
                SubgroupKind::PresWFixQuot(_) => {
                    if j < w {
                        if i < w {
                            Free
                        } else {
                            Zero
                        }
                    } else if i < w {
                        Free
                    } else {
                        ident(i, j)
                    }
                }
                SubgroupKind::K { .. } => {
                    // dims = (w, w + v): W first, then V, then the rest
                    if j < l {
                        ident(i, j)
                    } else if j < w {
                        if (l..w).contains(&i) {
                            Free
                        } else {
                            Zero
                        }
                    } else if (l..w).contains(&i) {
                        Free
                    } else {
                        ident(i, j)
                    }
                }
                SubgroupKind::KPrime { .. } => {
                    if j < l {
                        if i < l {
                            Free
                        } else {
                            Zero
                        }
                    } else if i < l {
                        Free
                    } else {
                        ident(i, j)
                    }
                }
                SubgroupKind::Borel => {
                    if i <= j {
                        Free
                    } else {
                        Zero
                    }
                }
                SubgroupKind::UpperUnitriangular => {
                    if i < j {
                        Free
                    } else {
                        ident(i, j)
                    }
                }
                SubgroupKind::BlockDiagonal(sizes) => {
                    let b = blocks_of(sizes);
                    if b[i] == b[j] {
                        Free
                    } else {
                        Zero
                    }
                }
                SubgroupKind::BlockUpper(sizes) => {
                    let b = blocks_of(sizes);
                    if b[i] <= b[j] {
                        Free
                    } else {
                        Zero
                    }
                }
                SubgroupKind::UnipotentBlock { a, .. } => {
                    if i < *a && j >= *a {
                        Free
                    } else {
                        ident(i, j)
                    }
                }
                SubgroupKind::Pattern(pos) => {
                    if pos.contains(&(i, j)) {
                        Free
                    } else {
                        ident(i, j)
                    }
                }
            };
        }
    }
    cells
}

/// Columns of an adapted basis: a basis of `L`, extended to `W`, extended
/// greedily to the whole space.
fn adapted_basis(field: &Field, n: usize, flag: &[&Subspace]) -> FMatrix {
    let mut chosen: Vec<Vec<Elem>> = Vec::new();
    let mut span = Subspace::zero(field, n);
    let extend = |cands: Vec<Vec<Elem>>, chosen: &mut Vec<Vec<Elem>>, span: &mut Subspace| {
        for v in cands {
            if !span.contains_vector(&v) {
                *span = span.sum(&Subspace::span(field, n, &[v.clone()])).unwrap();
                chosen.push(v);
            }
        }
    };
    for s in flag {
        extend(s.basis_vectors(), &mut chosen, &mut span);
    }
    let std: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    extend(std, &mut chosen, &mut span);
    FMatrix::from_rows(field, &chosen).transpose()
}

/// All invertible matrices matching the cell pattern, by depth-first
/// column filling with an incremental independence test.
fn fill_columns(field: &Field, n: usize, cells: &[Cell], cap: u128) -> Result<Vec<FMatrix>> {
    let q = field.q() as u64;
    let mut candidates: Vec<Vec<Vec<Elem>>> = Vec::with_capacity(n);
    for j in 0..n {
        let free: Vec<usize> = (0..n).filter(|&i| cells[i * n + j] == Cell::Free).collect();
        let base: Vec<Elem> = (0..n).map(|i| (cells[i * n + j] == Cell::One) as Elem).collect();
        let total = q.pow(free.len() as u32);
        let mut col = Vec::with_capacity(total as usize);
        for code in 0..total {
            let mut v = base.clone();
            let mut c = code;
            for &i in &free {
                v[i] = (c % q) as Elem;
                c /= q;
            }
            col.push(v);
        }
        candidates.push(col);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    // echelon[k] = (pivot, reduced row) after k columns
    let mut echelon: Vec<(usize, Vec<Elem>)> = Vec::with_capacity(n);
    fn reduce(field: &Field, ech: &[(usize, Vec<Elem>)], v: &[Elem]) -> Option<(usize, Vec<Elem>)> {
        let mut v = v.to_vec();
        for (p, row) in ech {
            let c = v[*p];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = field.sub(*x, field.mul(c, r));
                }
            }
        }
        let p = v.iter().position(|&x| x != 0)?;
        let inv = field.inv(v[p]);
        for x in v.iter_mut() {
            *x = field.mul(*x, inv);
        }
        Some((p, v))
    }
    let mut cursor = vec![0usize; n + 1];
    let mut depth = 0;
    loop {
        if depth == n {
            let mut m = FMatrix::zeros(field, n, n);
            for (j, &c) in chosen.iter().enumerate() {
                for i in 0..n {
                    m.set(i, j, candidates[j][c][i]);
                }
            }
            out.push(m);
            if out.len() as u128 > cap {
                return Err(Error::GroupTooLarge { order: out.len() as u128, cap });
            }
            depth -= 1;
            chosen.pop();
            echelon.pop();
            continue;
        }
        let mut advanced = false;
        while cursor[depth] < candidates[depth].len() {
            let c = cursor[depth];
            cursor[depth] += 1;
            if let Some(row) = reduce(field, &echelon, &candidates[depth][c]) {
                chosen.push(c);
                echelon.push(row);
                depth += 1;
                cursor[depth] = 0;
                advanced = true;
                break;
            }
        }
        if !advanced {
            if depth == 0 {
                break;
            }
            depth -= 1;
            chosen.pop();
            echelon.pop();
        }
    }
    if n == 0 {
        out = vec![FMatrix::zeros(field, 0, 0)];
    }
    Ok(out)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Standard generators of `GL_n(F_q)`: `diag(g,1,..,1)`, `I + a E_12` for an
/// additive basis of `F_q`, the transposition (1 2) and the cycle (1 2 .. n).
pub fn standard_gl_generators(field: &Field, n: usize) -> Vec<FMatrix> {
    let mut gens = Vec::new();
    if n == 0 {
        return gens;
    }
    if field.q() > 2 {
        let mut d = FMatrix::identity(field, n);
        d.set(0, 0, field.primitive());
        gens.push(d);
    }
    if n >= 2 {
        for a in field.additive_basis() {
            gens.push(FMatrix::elementary(field, n, 0, 1, a));
        }
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        gens.push(FMatrix::permutation(field, &t));
        if n > 2 {
            let c: Vec<usize> = (0..n).map(|j| (j + 1) % n).collect();
            gens.push(FMatrix::permutation(field, &c));
        }
    }
    gens
}

impl MatGroup {
    /// Builds a group from its full element list, choosing generators
    /// greedily in canonical order and verifying closure along the way.
    pub fn from_elements(field: &Field, n: usize, mut elements: Vec<FMatrix>, label: impl Into<String>) -> Result<MatGroup> {
        canonical_order(field, n, &mut elements);
        let index: HashMap<FMatrix, u32> = elements.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let id = FMatrix::identity(field, n);
        let identity = *index
            .get(&id)
            .ok_or_else(|| Error::BadParameters("element list lacks the identity".into()))? as usize;
        let mut g = MatGroup {
            field: field.clone(),
            n,
            elements,
            index,
            inverses: Vec::new(),
            identity,
            gens: Vec::new(),
            table: None,
            full: false,
            label: label.into(),
        };
        g.choose_generators()?;
        g.finish()?;
        Ok(g)
    }

    /// The group generated by the given matrices.
    pub fn generated(field: &Field, n: usize, gens: &[FMatrix], cap: u128, label: impl Into<String>) -> Result<MatGroup> {
        let id = FMatrix::identity(field, n);
        let mut seen: HashSet<FMatrix> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for s in gens {
                let y = x.mul(s);
                if !seen.contains(&y) {
                    if seen.len() as u128 >= cap {
                        return Err(Error::GroupTooLarge { order: seen.len() as u128 + 1, cap });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<FMatrix> = seen.into_iter().collect();
        canonical_order(field, n, &mut elements);
        let index: HashMap<FMatrix, u32> = elements.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let identity = index[&FMatrix::identity(field, n)] as usize;
        let gen_idx: Vec<usize> = gens.iter().map(|s| index[s] as usize).collect();
        let mut g = MatGroup {
            field: field.clone(),
            n,
            elements,
            index,
            inverses: Vec::new(),
            identity,
            gens: gen_idx,
            table: None,
            full: false,
            label: label.into(),
        };
        g.finish()?;
        Ok(g)
    }

    fn finish(&mut self) -> Result<()> {
        let order = self.elements.len();
        if order <= TABLE_MAX {
            let mut t = vec![0u32; order * order];
            for i in 0..order {
                for j in 0..order {
                    let p = self.elements[i].mul(&self.elements[j]);
                    t[i * order + j] = *self.index.get(&p).ok_or_else(|| {
                        Error::BadParameters(format!("{} is not closed under products", self.label))
                    })?;
                }
            }
            self.table = Some(t);
        }
        let mut inverses = vec![u32::MAX; order];
        for i in 0..order {
            if inverses[i] != u32::MAX {
                continue;
            }
            let inv = self.elements[i]
                .inverse()
                .ok_or_else(|| Error::BadParameters("singular matrix in group".into()))?;
            let j = *self
                .index
                .get(&inv)
                .ok_or_else(|| Error::BadParameters(format!("{} is not closed under inverses", self.label)))?;
            inverses[i] = j;
            inverses[j as usize] = i as u32;
        }
        self.inverses = inverses;
        Ok(())
    }

    fn closure_size(&self, gens: &[usize]) -> Result<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let p = self.elements[x].mul(&self.elements[s]);
                let y = *self
                    .index
                    .get(&p)
                    .ok_or_else(|| Error::BadParameters(format!("{} is not closed under products", self.label)))?
                    as usize;
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        Ok(count)
    }

    fn choose_generators(&mut self) -> Result<()> {
        let mut gens = Vec::new();
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut size = 1;
        for i in 0..self.order() {
            if size == self.order() {
                break;
            }
            if inside[i] {
                continue;
            }
            gens.push(i);
            // recompute the closure membership
            let mut seen = vec![false; self.order()];
            seen[self.identity] = true;
            let mut queue = VecDeque::from([self.identity]);
            size = 1;
            while let Some(x) = queue.pop_front() {
                for &s in &gens {
                    let p = self.elements[x].mul(&self.elements[s]);
                    let y = *self.index.get(&p).ok_or_else(|| {
                        Error::BadParameters(format!("{} is not closed under products", self.label))
                    })? as usize;
                    if !seen[y] {
                        seen[y] = true;
                        size += 1;
                        queue.push_back(y);
                    }
                }
            }
            inside = seen;
        }
        self.gens = gens;
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn degree(&self) -> usize {
        self.n
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn is_full(&self) -> bool {
        self.full
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn elements(&self) -> &[FMatrix] {
        &self.elements
    }
    pub fn element(&self, i: usize) -> &FMatrix {
        &self.elements[i]
    }
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }
    pub fn generator_matrices(&self) -> Vec<FMatrix> {
        self.gens.iter().map(|&i| self.elements[i].clone()).collect()
    }
    pub fn index_of(&self, m: &FMatrix) -> Option<usize> {
        self.index.get(m).map(|&i| i as usize)
    }
    pub fn contains(&self, m: &FMatrix) -> bool {
        self.index.contains_key(m)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.order() + b] as usize,
            None => self.index[&self.elements[a].mul(&self.elements[b])] as usize,
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    /// Order of an element.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Replaces the generating set (must generate the same group).
    pub fn with_generators(mut self, gens: Vec<usize>) -> Result<MatGroup> {
        let size = self.closure_size(&gens)?;
        if size != self.order() {
            return Err(Error::BadParameters(format!("generators span {size} of {} elements", self.order())));
        }
        self.gens = gens;
        Ok(self)
    }

    /// The subgroup on the given element indices (which must form a group).
    pub fn subgroup(&self, members: &[usize], label: impl Into<String>) -> Result<MatGroup> {
        let elems = members.iter().map(|&i| self.elements[i].clone()).collect();
        MatGroup::from_elements(&self.field, self.n, elems, label)
    }

    /// Whether every element of `h` lies in `self`.
    pub fn contains_group(&self, h: &MatGroup) -> bool {
        h.elements.iter().all(|m| self.contains(m))
    }

    /// Indices in `self` of the elements of a subgroup `h`.
    pub fn embed(&self, h: &MatGroup) -> Result<Vec<usize>> {
        h.elements
            .iter()
            .map(|m| self.index_of(m).ok_or(Error::GroupMismatch))
            .collect()
    }
}

fn membership_ok(kind: &SubgroupKind, a: &FMatrix) -> bool {
    let f = a.field();
    let n = a.rows();
    let fixes_quotient = |w: &Subspace| {
        // (A - I) maps everything into W.
        let d = a.sub(&FMatrix::identity(f, n));
        Subspace::whole(f, n).image(&d).is_subspace_of(w)
    };
    match kind {
        SubgroupKind::FixW(w) => w.basis_vectors().iter().all(|v| &a.mul_vec(v) == v),
        SubgroupKind::PresW(w) => w.image(a) == *w,
        SubgroupKind::PresWFixQuot(w) => w.image(a) == *w && fixes_quotient(w),
        SubgroupKind::K { w, v } => {
            w.basis_vectors().iter().all(|x| &a.mul_vec(x) == x) && v.image(a) == *v && fixes_quotient(v)
        }
        SubgroupKind::KPrime { l } => l.image(a) == *l && fixes_quotient(l),
        _ => true,
    }
}

/// Enumerates the subgroup described by `spec`.
pub fn group_make(spec: &SubgroupSpec) -> Result<MatGroup> {
    let f = &spec.field;
    let n = spec.n;
    let q = f.q() as u64;
    if matches!(spec.kind, SubgroupKind::Full) {
        let order = gl_order(q, n);
        if order > spec.cap {
            return Err(Error::GroupTooLarge { order, cap: spec.cap });
        }
    }
    let label = format!("{:?} in GL_{n}(F_{q})", spec.kind);
    let check_sub = |s: &Subspace, what: &str| -> Result<()> {
        if s.ambient_dim() != n || !s.is_proper_nonzero() {
            return Err(Error::BadParameters(format!("{what} must be a nonzero proper subspace of F^{n}")));
        }
        Ok(())
    };
    let blocks_ok = |b: &[usize]| b.iter().sum::<usize>() == n && b.iter().all(|&s| s > 0);
    let (basis, dims) = match &spec.kind {
        SubgroupKind::FixW(w) | SubgroupKind::PresW(w) | SubgroupKind::PresWFixQuot(w) => {
            check_sub(w, "W")?;
            (Some(adapted_basis(f, n, &[w])), (0, w.dim()))
        }
        SubgroupKind::K { w, v } => {
            check_sub(w, "W")?;
            check_sub(v, "V")?;
            if !w.intersection(v)?.is_zero() || w.dim() + v.dim() > n {
                return Err(Error::BadParameters("V and W must intersect trivially".into()));
            }
            (Some(adapted_basis(f, n, &[w, v])), (w.dim(), w.dim() + v.dim()))
        }
        SubgroupKind::KPrime { l } => {
            if l.dim() != 1 || l.ambient_dim() != n {
                return Err(Error::BadParameters("L must be a line".into()));
            }
            (Some(adapted_basis(f, n, &[l])), (1, 1))
        }
        SubgroupKind::BlockDiagonal(b) | SubgroupKind::BlockUpper(b) if !blocks_ok(b) => {
            return Err(Error::BadParameters(format!("block sizes {b:?} do not partition {n}")));
        }
        SubgroupKind::UnipotentBlock { a, b } if a + b != n => {
            return Err(Error::BadParameters(format!("{a}+{b} != {n}")));
        }
        SubgroupKind::Pattern(pos) if pos.iter().any(|&(i, j)| i >= n || j >= n || i == j) => {
            return Err(Error::BadParameters("pattern positions must be off-diagonal and in range".into()));
        }
        _ => (None, (0, 0)),
    };
    let mut elements = match &spec.kind {
        SubgroupKind::Permutations => permutations(n).iter().map(|p| FMatrix::permutation(f, p)).collect(),
        SubgroupKind::Generated(gens) => {
            let g = MatGroup::generated(f, n, gens, spec.cap, label.clone())?;
            return Ok(g);
        }
        kind => fill_columns(f, n, &pattern_for(n, kind, dims), spec.cap)?,
    };
    if let Some(m) = &basis {
        let minv = m.inverse().expect("adapted basis is a basis");
        for x in elements.iter_mut() {
            *x = m.mul(x).mul(&minv);
        }
    }
    if let Some(bad) = elements.iter().find(|a| !membership_ok(&spec.kind, a)) {
        return Err(Error::BadParameters(format!("enumerated element {bad:?} violates the defining conditions")));
    }
    if matches!(spec.kind, SubgroupKind::Full) {
        let mut g = MatGroup::from_elements_unchecked(f, n, elements, label)?;
        let gens: Vec<usize> = standard_gl_generators(f, n)
            .iter()
            .map(|s| g.index_of(s).expect("generator is invertible"))
            .collect();
        g = g.with_generators(gens)?;
        g.full = true;
        Ok(g)
    } else {
        MatGroup::from_elements(f, n, elements, label)
    }
}

impl MatGroup {
    fn from_elements_unchecked(field: &Field, n: usize, mut elements: Vec<FMatrix>, label: String) -> Result<MatGroup> {
        canonical_order(field, n, &mut elements);
        let index: HashMap<FMatrix, u32> = elements.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let identity = index[&FMatrix::identity(field, n)] as usize;
        let mut g = MatGroup {
            field: field.clone(),
            n,
            elements,
            index,
            inverses: Vec::new(),
            identity,
            gens: Vec::new(),
            table: None,
            full: false,
            label,
        };
        g.finish()?;
        Ok(g)
    }
}

/// The identity first, then the remaining elements lexicographically.
fn canonical_order(field: &Field, n: usize, elements: &mut Vec<FMatrix>) {
    elements.sort();
    elements.dedup();
    if let Ok(k) = elements.binary_search(&FMatrix::identity(field, n)) {
        elements[..=k].rotate_right(1);
    }
}

/// `GL_n(F_q)`.
pub fn gl(field: &Field, n: usize) -> Result<MatGroup> {
    group_make(&SubgroupSpec::full(field, n))
}

/// `g ⊕ I_k`.
pub fn stabilization_embed(g: &FMatrix, k: usize) -> FMatrix {
    g.block_sum(&FMatrix::identity(g.field(), k))
}

pub fn block_sum(a: &FMatrix, b: &FMatrix) -> FMatrix {
    a.block_sum(b)
}

/// `T_{n,m} = [[0, I_n], [I_m, 0]]`, satisfying `T^{-1} (a ⊕ b) T = b ⊕ a`
/// for `a ∈ GL_n`, `b ∈ GL_m`.
pub fn symmetry_matrix(field: &Field, n: usize, m: usize) -> FMatrix {
    let mut t = FMatrix::zeros(field, n + m, n + m);
    for i in 0..n {
        t.set(i, m + i, 1);
    }
    for i in 0..m {
        t.set(n + i, i, 1);
    }
    t
}

/// Orbit of `x` (breadth first along generators) and its stabilizer.
pub fn orbit_and_stabilizer<T, F>(g: &MatGroup, x: &T, act: F) -> Result<(Vec<T>, MatGroup)>
where
    T: Clone + Eq + Hash,
    F: Fn(&FMatrix, &T) -> T,
{
    let orbit = orbit_under(&g.generator_matrices(), x, &act, usize::MAX)?;
    let stab: Vec<usize> = (0..g.order()).filter(|&i| act(g.element(i), x) == *x).collect();
    let stab = g.subgroup(&stab, format!("stabilizer in {}", g.label()))?;
    if orbit.len() * stab.order() != g.order() {
        return Err(Error::ActionMismatch("orbit-stabilizer count fails: not an action".into()));
    }
    Ok((orbit, stab))
}

/// Orbit of `x` under the group generated by `gens`, without enumerating it.
pub fn orbit_under<T, F>(gens: &[FMatrix], x: &T, act: F, cap: usize) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&FMatrix, &T) -> T,
{
    let mut seen: HashSet<T> = HashSet::from([x.clone()]);
    let mut order = vec![x.clone()];
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(y) = queue.pop_front() {
        for s in gens {
            let z = act(s, &y);
            if seen.insert(z.clone()) {
                if seen.len() > cap {
                    return Err(Error::ResourceCapExceeded(format!("orbit exceeds {cap}")));
                }
                order.push(z.clone());
                queue.push_back(z);
            }
        }
    }
    Ok(order)
}

/// One representative (the least element) of each double coset `H1 x H2`.
pub fn double_cosets(g: &MatGroup, h1: &MatGroup, h2: &MatGroup) -> Result<Vec<usize>> {
    let a = g.embed(h1)?;
    let b = g.embed(h2)?;
    let mut covered = vec![false; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if covered[x] {
            continue;
        }
        reps.push(x);
        for &h in &a {
            let hx = g.mul(h, x);
            for &k in &b {
                covered[g.mul(hx, k)] = true;
            }
        }
    }
    Ok(reps)
}

/// Size of the double coset `H1 x H2`.
pub fn double_coset_size(g: &MatGroup, h1: &MatGroup, h2: &MatGroup, x: usize) -> Result<usize> {
    let a = g.embed(h1)?;
    let b = g.embed(h2)?;
    let mut set = HashSet::new();
    for &h in &a {
        let hx = g.mul(h, x);
        for &k in &b {
            set.insert(g.mul(hx, k));
        }
    }
    Ok(set.len())
}

/// `s^{-1} H s`.
pub fn conjugate_subgroup(h: &MatGroup, s: &FMatrix) -> Result<MatGroup> {
    let sinv = s.inverse().ok_or_else(|| Error::BadParameters("conjugating matrix is singular".into()))?;
    let elems = h.elements().iter().map(|x| sinv.mul(x).mul(s)).collect();
    MatGroup::from_elements(h.field(), h.degree(), elems, format!("conjugate of {}", h.label()))
}

pub fn is_conjugate_by(h: &MatGroup, k: &MatGroup, s: &FMatrix) -> Result<bool> {
    let c = conjugate_subgroup(h, s)?;
    Ok(c.elements() == k.elements())
}

fn p_part(mut order: usize, p: usize) -> usize {
    let mut out = 1;
    while order % p == 0 {
        order /= p;
        out *= p;
    }
    out
}

fn is_power_of(mut x: usize, p: usize) -> bool {
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

/// A Sylow `p`-subgroup.  For the full general linear group in its defining
/// characteristic this is the upper unitriangular group.
pub fn sylow_subgroup(g: &MatGroup, p: u32) -> Result<MatGroup> {
    let p = p as usize;
    if g.is_full() && g.field().p() as usize == p {
        let s = group_make(&SubgroupSpec::new(g.field(), g.degree(), SubgroupKind::UpperUnitriangular))?;
        return Ok(s);
    }
    let target = p_part(g.order(), p);
    let mut members: Vec<usize> = vec![g.identity()];
    let mut inside = vec![false; g.order()];
    inside[g.identity()] = true;
    while members.len() < target {
        // An element of p-power order normalizing P but outside it extends P.
        let found = (0..g.order()).find(|&x| {
            if inside[x] || !is_power_of(g.element_order(x), p) {
                return false;
            }
            let xi = g.inv(x);
            members.iter().all(|&m| inside[g.mul(g.mul(x, m), xi)])
        });
        let Some(x) = found else {
            return Err(Error::BadParameters("Sylow search stalled".into()));
        };
        // P<x> = union of cosets P x^k.
        let mut power = x;
        let base = members.clone();
        while !inside[power] {
            for &m in &base {
                let y = g.mul(m, power);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
            power = g.mul(power, x);
        }
        if !is_power_of(members.len(), p) {
            return Err(Error::BadParameters("Sylow search produced a non-p-group".into()));
        }
    }
    members.sort();
    g.subgroup(&members, format!("Sylow-{p} of {}", g.label()))
}

/// The block-diagonal part of a block upper triangular matrix.
pub fn diagonal_blocks(a: &FMatrix, sizes: &[usize]) -> FMatrix {
    let mut out = FMatrix::zeros(a.field(), a.rows(), a.cols());
    let mut start = 0;
    for &s in sizes {
        for i in start..start + s {
            for j in start..start + s {
                out.set(i, j, a.get(i, j));
            }
        }
        start += s;
    }
    out
}

/// The permutation of the nonzero vectors of `F^n` induced by `g`
/// (vectors listed in lexicographic order).
pub fn action_on_nonzero_vectors(g: &FMatrix) -> Vec<usize> {
    let f = g.field();
    let n = g.rows();
    let q = f.q() as usize;
    let vectors: Vec<Vec<Elem>> = (1..q.pow(n as u32))
        .map(|mut c| {
            let mut v = vec![0; n];
            for i in (0..n).rev() {
                v[i] = (c % q) as Elem;
                c /= q;
            }
            v
        })
        .collect();
    let pos: HashMap<&Vec<Elem>, usize> = vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
    vectors.iter().map(|v| pos[&g.mul_vec(v)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::enumerate_subspaces;

    fn f(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn gl_orders() {
        for (q, n) in [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2), (2, 4), (3, 3), (5, 2)] {
            let g = gl(&f(q), n).unwrap();
            assert_eq!(g.order() as u128, gl_order(q, n), "GL_{n}(F_{q})");
            assert_eq!(g.identity(), 0);
            assert!(g.elements()[1..].windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(gl(&f(2), 2).unwrap().order(), 6);
        assert_eq!(gl(&f(2), 3).unwrap().order(), 168);
        assert_eq!(gl(&f(2), 4).unwrap().order(), 20160);
        assert_eq!(gl(&f(3), 2).unwrap().order(), 48);
        let too_big = group_make(&SubgroupSpec { cap: 100, ..SubgroupSpec::full(&f(2), 3) });
        assert!(matches!(too_big, Err(Error::GroupTooLarge { order: 168, cap: 100 })));
    }

    #[test]
    fn k_prime_structure() {
        for q in [3u64, 4] {
            let fq = f(q);
            let l = Subspace::coordinate(&fq, 2, &[0]);
            let k = group_make(&SubgroupSpec::new(&fq, 2, SubgroupKind::KPrime { l })).unwrap();
            assert_eq!(k.order() as u64, q * (q - 1));
        }
    }

    #[test]
    fn named_subgroup_orders() {
        let f2 = f(2);
        let cases = [
            (SubgroupKind::UpperUnitriangular, 3, 8),
            (SubgroupKind::Borel, 3, 8),
            (SubgroupKind::BlockDiagonal(vec![1, 2]), 3, 6),
            (SubgroupKind::BlockUpper(vec![1, 2]), 3, 24),
            (SubgroupKind::UnipotentBlock { a: 1, b: 1 }, 2, 2),
            (SubgroupKind::UnipotentBlock { a: 2, b: 2 }, 4, 16),
            (SubgroupKind::Permutations, 3, 6),
            (SubgroupKind::PresW(Subspace::coordinate(&f2, 3, &[0])), 3, 24),
            (SubgroupKind::FixW(Subspace::coordinate(&f2, 3, &[0])), 3, 24),
            (SubgroupKind::PresWFixQuot(Subspace::coordinate(&f2, 3, &[0, 1])), 3, 24),
        ];
        for (kind, n, order) in cases {
            let g = group_make(&SubgroupSpec::new(&f2, n, kind.clone())).unwrap();
            assert_eq!(g.order(), order, "{kind:?}");
            let full = gl(&f2, n).unwrap();
            assert!(full.contains_group(&g));
        }
        // A non-coordinate W: orders agree with the coordinate case.
        let w = Subspace::span(&f2, 3, &[vec![1, 1, 0]]);
        let g = group_make(&SubgroupSpec::new(&f2, 3, SubgroupKind::PresW(w.clone()))).unwrap();
        assert_eq!(g.order(), 24);
        for m in g.elements() {
            assert_eq!(w.image(m), w);
        }
        // The shape of an element of K: fix W, preserve V, fix P/V.
        let f3 = f(3);
        let w = Subspace::coordinate(&f3, 3, &[0]);
        let v = Subspace::coordinate(&f3, 3, &[2]);
        let k = group_make(&SubgroupSpec::new(&f3, 3, SubgroupKind::K { w, v })).unwrap();
        assert_eq!(k.order(), 2 * 3);
        let w = Subspace::coordinate(&f2, 5, &[0, 1]);
        let v = Subspace::coordinate(&f2, 5, &[3, 4]);
        let k = group_make(&SubgroupSpec::new(&f2, 5, SubgroupKind::K { w, v })).unwrap();
        // GL_2(F_2) on V, and the e_3 column free in V
        assert_eq!(k.order(), 6 * 4);
        for m in k.elements() {
            for j in 0..3 {
                for i in 0..3 {
                    assert_eq!(m.get(i, j), (i == j) as Elem);
                }
            }
        }
    }

    #[test]
    fn stabilization_and_symmetry() {
        let f2 = f(2);
        let g2 = gl(&f2, 2).unwrap();
        let id1 = FMatrix::identity(&f2, 1);
        assert_eq!(stabilization_embed(&id1, 1), FMatrix::identity(&f2, 2));
        let sw = FMatrix::from_ints(&f2, &[&[0, 1], &[1, 0]]);
        assert_eq!(stabilization_embed(&sw, 1), FMatrix::from_ints(&f2, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]));
        for a in g2.elements() {
            for b in g2.elements() {
                let s = stabilization_embed(&a.mul(b), 1);
                assert_eq!(s, stabilization_embed(a, 1).mul(&stabilization_embed(b, 1)));
            }
        }
        assert_eq!(symmetry_matrix(&f2, 1, 1), sw);
        let g1 = gl(&f2, 1).unwrap();
        for a in g1.elements() {
            for b in g2.elements() {
                let t = symmetry_matrix(&f2, 1, 2);
                let lhs = t.inverse().unwrap().mul(&block_sum(a, b)).mul(&t);
                assert_eq!(lhs, block_sum(b, a));
            }
        }
        let f3 = f(3);
        let g = gl(&f3, 2).unwrap();
        for (i, j) in [(0, 5), (7, 11), (20, 47)] {
            let (a, c) = (g.element(i), g.element(j));
            let (b, d) = (g.element(j), g.element(i));
            assert_eq!(block_sum(a, b).mul(&block_sum(c, d)), block_sum(&a.mul(c), &b.mul(d)));
        }
    }

    #[test]
    fn orbits() {
        let f2 = f(2);
        let g = gl(&f2, 2).unwrap();
        let lines = enumerate_subspaces(&f2, 2, 1).unwrap();
        let (orbit, stab) = orbit_and_stabilizer(&g, &lines[0], |m, l: &Subspace| l.image(m)).unwrap();
        assert_eq!((orbit.len(), stab.order()), (3, 2));
        let triv = group_make(&SubgroupSpec::new(&f2, 2, SubgroupKind::Generated(vec![]))).unwrap();
        let (orbit, _) = orbit_and_stabilizer(&triv, &lines[1], |m, l: &Subspace| l.image(m)).unwrap();
        assert_eq!(orbit.len(), 1);
        let f3 = f(3);
        let w = Subspace::coordinate(&f3, 3, &[0, 1]);
        let grp = group_make(&SubgroupSpec::new(&f3, 3, SubgroupKind::PresWFixQuot(w.clone()))).unwrap();
        let l = Subspace::coordinate(&f3, 3, &[0]);
        let (orbit, _) = orbit_and_stabilizer(&grp, &l, |m, l: &Subspace| l.image(m)).unwrap();
        assert_eq!(orbit.len(), 4);
        assert_eq!(orbit.len() % 3, 1);
    }

    #[test]
    fn double_coset_partitions() {
        let f2 = f(2);
        let g = gl(&f2, 3).unwrap();
        let s = sylow_subgroup(&g, 2).unwrap();
        assert_eq!(s.order(), 8);
        let reps = double_cosets(&g, &s, &s).unwrap();
        let total: usize = reps.iter().map(|&x| double_coset_size(&g, &s, &s, x).unwrap()).sum();
        assert_eq!(total, g.order());
        // Bruhat decomposition: one double coset per permutation.
        assert_eq!(reps.len(), 6);
        assert_eq!(double_cosets(&g, &g, &g).unwrap(), vec![g.identity()]);
        let triv = sylow_subgroup(&g, 11).unwrap();
        assert_eq!(double_cosets(&g, &triv, &triv).unwrap().len(), 168);
    }

    #[test]
    fn sylow_orders() {
        assert_eq!(sylow_subgroup(&gl(&f(2), 3).unwrap(), 2).unwrap().order(), 8);
        assert_eq!(sylow_subgroup(&gl(&f(2), 2).unwrap(), 3).unwrap().order(), 3);
        assert_eq!(sylow_subgroup(&gl(&f(3), 2).unwrap(), 2).unwrap().order(), 16);
        assert_eq!(sylow_subgroup(&gl(&f(2), 3).unwrap(), 7).unwrap().order(), 7);
    }

    #[test]
    fn milgram_priddy_conjugation() {
        let f2 = f(2);
        let g1 = group_make(&SubgroupSpec::new(&f2, 6, SubgroupKind::Pattern(vec![(0, 1), (2, 3), (4, 5)]))).unwrap();
        let g2 = group_make(&SubgroupSpec::new(&f2, 6, SubgroupKind::Pattern(vec![(0, 4), (1, 5), (2, 3)]))).unwrap();
        assert_eq!(g1.order(), 8);
        let swap25 = FMatrix::permutation(&f2, &[0, 4, 2, 3, 1, 5]);
        assert!(is_conjugate_by(&g1, &g2, &swap25).unwrap());
        assert!(is_conjugate_by(&g1, &g1, &FMatrix::identity(&f2, 6)).unwrap());
        assert_eq!(conjugate_subgroup(&g1, &swap25).unwrap().order(), g1.order());
    }

    #[test]
    fn gl22_is_s3() {
        let f2 = f(2);
        let g = gl(&f2, 2).unwrap();
        let perms: Vec<Vec<usize>> = g.elements().iter().map(action_on_nonzero_vectors).collect();
        let distinct: HashSet<&Vec<usize>> = perms.iter().collect();
        assert_eq!(distinct.len(), 6);
        for a in 0..6 {
            for b in 0..6 {
                let ab = g.mul(a, b);
                // (ab)·v = a·(b·v)
                let composed: Vec<usize> = (0..3).map(|v| perms[a][perms[b][v]]).collect();
                assert_eq!(perms[ab], composed);
            }
        }
    }

    #[test]
    fn rho_kernels_are_p_groups() {
        let f2 = f(2);
        for n in 2..=4usize {
            let mut shapes: Vec<Vec<usize>> = vec![vec![n]];
            // all compositions of n
            let mut out = Vec::new();
            fn comps(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                if n == 0 {
                    out.push(cur.clone());
                    return;
                }
                for k in 1..=n {
                    cur.push(k);
                    comps(n - k, cur, out);
                    cur.pop();
                }
            }
            comps(n, &mut Vec::new(), &mut out);
            shapes.extend(out);
            for shape in shapes {
                let but = group_make(&SubgroupSpec::new(&f2, n, SubgroupKind::BlockUpper(shape.clone()))).unwrap();
                let bd = group_make(&SubgroupSpec::new(&f2, n, SubgroupKind::BlockDiagonal(shape.clone()))).unwrap();
                let id = FMatrix::identity(&f2, n);
                let kernel = but.elements().iter().filter(|a| diagonal_blocks(a, &shape) == id).count();
                assert!(is_power_of(kernel, 2), "{shape:?}");
                assert_eq!(kernel * bd.order(), but.order());
                for a in but.elements().iter().step_by(7) {
                    for b in but.elements().iter().step_by(11) {
                        let lhs = diagonal_blocks(&a.mul(b), &shape);
                        let rhs = diagonal_blocks(a, &shape).mul(&diagonal_blocks(b, &shape));
                        assert_eq!(lhs, rhs);
                    }
                    assert!(bd.contains(&diagonal_blocks(a, &shape)));
                }
            }
        }
    }
}
