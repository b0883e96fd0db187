//! Steinberg-type modules as explicit representations over a field, and the
//! module operations used around them.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use crate::buildings::{build, Building, BuildingKind, Label};
use crate::complexes::{order_complex, OrderComplex};
use crate::error::{Error, Result};
use crate::ffield::{Elem, EchelonBasis, FMatrix, Field, Subspace};
use crate::glgroup::MatGroup;

/// A finite-dimensional representation of a matrix group over a field,
/// stored by the images of the group's generators.
pub struct GModule {
    group: Arc<MatGroup>,
    field: Field,
    dim: usize,
    gens: Vec<FMatrix>,
    /// For each element, a generator word via a breadth-first tree:
    /// `element = parent · generator`.
    tree: Arc<Vec<(u32, u32)>>,
    memo: Mutex<HashMap<usize, FMatrix>>,
}

impl std::fmt::Debug for GModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GModule(dim {} over F_{}, {:?})", self.dim, self.field.q(), self.group)
    }
}

fn generator_tree(g: &MatGroup) -> Vec<(u32, u32)> {
    let mut tree = vec![(u32::MAX, u32::MAX); g.order()];
    let id = g.identity();
    tree[id] = (id as u32, u32::MAX);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for (k, &s) in g.generators().iter().enumerate() {
            let y = g.mul(x, s);
            if tree[y].0 == u32::MAX {
                tree[y] = (x as u32, k as u32);
                queue.push_back(y);
            }
        }
    }
    tree
}

impl GModule {
    /// A module from the actions of the group's generators.  The
    /// homomorphism property is verified exhaustively when `|G| ≤ 200` and
    /// on a deterministic sample otherwise.
    pub fn new(group: Arc<MatGroup>, field: &Field, dim: usize, gens: Vec<FMatrix>) -> Result<GModule> {
        if gens.len() != group.generators().len() {
            return Err(Error::ActionMismatch(format!(
                "{} generator images for {} generators",
                gens.len(),
                group.generators().len()
            )));
        }
        if gens.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::ActionMismatch("generator image has the wrong size".into()));
        }
        let tree = Arc::new(generator_tree(&group));
        let m = GModule { group, field: field.clone(), dim, gens, tree, memo: Mutex::default() };
        m.verify()?;
        Ok(m)
    }

    pub fn trivial(group: Arc<MatGroup>, field: &Field, dim: usize) -> GModule {
        let gens = vec![FMatrix::identity(field, dim); group.generators().len()];
        GModule::new(group, field, dim, gens).expect("trivial action is a homomorphism")
    }

    fn verify(&self) -> Result<()> {
        let g = &self.group;
        let pairs: Vec<(usize, usize)> = if g.order() <= 200 {
            (0..g.order()).flat_map(|a| (0..g.order()).map(move |b| (a, b))).collect()
        } else {
            // a fixed pseudo-random sample
            let mut x: u64 = 0x9e37_79b9_7f4a_7c15;
            (0..400)
                .map(|_| {
                    x ^= x << 13;
                    x ^= x >> 7;
                    x ^= x << 17;
                    ((x % g.order() as u64) as usize, ((x >> 32) % g.order() as u64) as usize)
                })
                .collect()
        };
        for (a, b) in pairs {
            if self.action(a).mul(&self.action(b)) != self.action(g.mul(a, b)) {
                return Err(Error::ActionMismatch(format!("action fails to be multiplicative at ({a}, {b})")));
            }
        }
        if !self.action(g.identity()).eq(&FMatrix::identity(&self.field, self.dim)) {
            return Err(Error::ActionMismatch("identity acts nontrivially".into()));
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<MatGroup> {
        &self.group
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn generator_actions(&self) -> &[FMatrix] {
        &self.gens
    }

    /// The matrix of a group element (by index), memoized.
    pub fn action(&self, g: usize) -> FMatrix {
        if let Some(m) = self.memo.lock().unwrap().get(&g) {
            return m.clone();
        }
        // walk up the tree, then multiply down
        let mut word = Vec::new();
        let mut x = g;
        let id = self.group.identity();
        let mut base = FMatrix::identity(&self.field, self.dim);
        while x != id {
            if let Some(m) = self.memo.lock().unwrap().get(&x) {
                base = m.clone();
                break;
            }
            let (parent, k) = self.tree[x];
            word.push(k as usize);
            x = parent as usize;
        }
        let mut acc = base;
        for &k in word.iter().rev() {
            acc = acc.mul(&self.gens[k]);
        }
        self.memo.lock().unwrap().insert(g, acc.clone());
        acc
    }

    /// Actions of all elements, in element order.
    pub fn all_actions(&self) -> Vec<FMatrix> {
        (0..self.group.order()).map(|g| self.action(g)).collect()
    }

    /// `m1 ⊗ m2` with the diagonal action.
    pub fn tensor(&self, other: &GModule) -> Result<GModule> {
        if !Arc::ptr_eq(&self.group, &other.group) && self.group.elements() != other.group.elements() {
            return Err(Error::GroupMismatch);
        }
        let gens = self.gens.iter().zip(&other.gens).map(|(a, b)| kronecker(a, b)).collect();
        GModule::new(self.group.clone(), &self.field, self.dim * other.dim, gens)
    }

    /// Restriction to a subgroup `h` (whose elements lie in this group).
    pub fn restrict(&self, h: Arc<MatGroup>) -> Result<GModule> {
        let mut gens = Vec::new();
        for &s in h.generators() {
            let i = self.group.index_of(h.element(s)).ok_or(Error::GroupMismatch)?;
            gens.push(self.action(i));
        }
        GModule::new(h, &self.field, self.dim, gens)
    }
}

fn kronecker(a: &FMatrix, b: &FMatrix) -> FMatrix {
    let f = a.field();
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = FMatrix::zeros(f, ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let x = a.get(i, j);
            if x == 0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out.set(i * rb + k, j * cb + l, f.mul(x, b.get(k, l)));
                }
            }
        }
    }
    out
}

/// Left coset representatives of `h` in `g` (least element of each coset)
/// and, for each element of `g`, its coset number.
pub fn left_cosets(g: &MatGroup, h: &MatGroup) -> Result<(Vec<usize>, Vec<usize>)> {
    let hs = g.embed(h)?;
    let mut coset = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset[x] != usize::MAX {
            continue;
        }
        for &y in &hs {
            coset[g.mul(x, y)] = reps.len();
        }
        reps.push(x);
    }
    Ok((reps, coset))
}

/// `Ind_H^G M` with basis `x_i ⊗ m_j`: `g·(x_i ⊗ m) = x_k ⊗ (h m)` where
/// `g x_i = x_k h`.
pub fn induce_module(g: Arc<MatGroup>, h_module: &GModule, cap: usize) -> Result<GModule> {
    let h = h_module.group().clone();
    let (reps, coset) = left_cosets(&g, &h)?;
    let d = h_module.dim();
    let total = reps.len() * d;
    if total > cap {
        return Err(Error::TooLarge(format!("induced module of dimension {total} exceeds {cap}")));
    }
    let f = h_module.field().clone();
    let mut gens = Vec::new();
    for &s in g.generators() {
        let mut m = FMatrix::zeros(&f, total, total);
        for (i, &x) in reps.iter().enumerate() {
            let gx = g.mul(s, x);
            let k = coset[gx];
            let hel = g.mul(g.inv(reps[k]), gx);
            let hi = h.index_of(g.element(hel)).ok_or(Error::GroupMismatch)?;
            let a = h_module.action(hi);
            for r in 0..d {
                for c in 0..d {
                    m.set(k * d + r, i * d + c, a.get(r, c));
                }
            }
        }
        gens.push(m);
    }
    GModule::new(g, &f, total, gens)
}

/// Which Steinberg-type module to build.
#[derive(Clone, Debug)]
pub enum SteinbergWhich {
    St,
    Relative(Subspace),
    E1,
    E1Relative(Subspace),
}

impl SteinbergWhich {
    pub fn kind(&self) -> BuildingKind {
        match self {
            SteinbergWhich::St => BuildingKind::Tits,
            SteinbergWhich::Relative(w) => BuildingKind::RelTits(w.clone()),
            SteinbergWhich::E1 => BuildingKind::Split,
            SteinbergWhich::E1Relative(w) => BuildingKind::RelSplit(w.clone()),
        }
    }
}

/// A top-homology module with the data needed to map cycles around.
pub struct TopHomology {
    pub module: GModule,
    pub building: Building,
    pub complex: OrderComplex,
    pub basis: EchelonBasis,
}

impl TopHomology {
    /// Coordinates of a top cycle (a vector on top simplices).
    pub fn coordinates(&self, cycle: &[Elem]) -> Option<Vec<Elem>> {
        self.basis.coordinates(cycle)
    }

    pub fn top_degree(&self) -> i64 {
        self.complex.complex.top_degree()
    }
}

/// Image of a chain on top simplices under an element relabeling.
fn push_chain(oc: &OrderComplex, top: i64, perm: &[usize], v: &[Elem]) -> Result<Vec<Elem>> {
    let simplices = oc.simplices(top);
    let mut out = vec![0; simplices.len()];
    let mut img = Vec::new();
    for (s, &c) in simplices.iter().zip(v) {
        if c == 0 {
            continue;
        }
        img.clear();
        img.extend(s.iter().map(|&x| perm[x as usize] as u32));
        let j = oc
            .chain_index(&img)
            .ok_or_else(|| Error::ActionMismatch("relabeled chain is not increasing".into()))?;
        out[j] = c;
    }
    Ok(out)
}

/// The representation of `g` on the top reduced homology of a building.
pub fn top_homology_module(field: &Field, n: usize, kind: &BuildingKind, g: Arc<MatGroup>, coeff: &Field) -> Result<TopHomology> {
    let building = build(field, n, kind)?;
    let complex = order_complex(&building.poset, coeff)?;
    let top = complex.complex.top_degree();
    if let Some(expect) = kind.expected_top(n) {
        if top > expect {
            return Err(Error::TopChainAboveTop(top as usize));
        }
    }
    let mut basis = EchelonBasis::new(coeff, complex.complex.dim(top));
    for z in complex.complex.top_cycles() {
        basis.insert_dense(&z);
    }
    let dim = basis.rank();
    let vectors: Vec<Vec<Elem>> = (0..dim).map(|k| basis.vector(k)).collect();
    let mut gens = Vec::new();
    for x in g.generator_matrices() {
        let perm = building.relabel(&x)?;
        let mut m = FMatrix::zeros(coeff, dim, dim);
        for (k, v) in vectors.iter().enumerate() {
            let image = push_chain(&complex, top, &perm, v)?;
            let coords = basis
                .coordinates(&image)
                .ok_or_else(|| Error::ActionMismatch("image of a cycle is not a cycle".into()))?;
            for (r, &c) in coords.iter().enumerate() {
                m.set(r, k, c);
            }
        }
        gens.push(m);
    }
    let module = GModule::new(g, coeff, dim, gens)?;
    Ok(TopHomology { module, building, complex, basis })
}

/// Convenience: `St(F_q^n) ⊗ F_ℓ` with the full group.
pub fn steinberg(field: &Field, n: usize, which: &SteinbergWhich, g: Arc<MatGroup>, coeff: &Field) -> Result<TopHomology> {
    top_homology_module(field, n, &which.kind(), g, coeff)
}

/// `φ: St^{E1}(P) → St(P)` induced by `(V_0, V_1) ↦ V_0`.  A chain in the
/// split building has strictly decreasing `V_0`'s, so its image is the
/// reversed chain in the Tits building, with the sign of the reversal.
pub struct PhiMap {
    pub matrix: FMatrix,
    pub equivariant: bool,
}

pub fn phi_map(e1: &TopHomology, st: &TopHomology) -> Result<PhiMap> {
    let f = e1.module.field().clone();
    let top = e1.top_degree();
    if st.top_degree() != top {
        return Err(Error::BadParameters("modules live in different degrees".into()));
    }
    let e1_simplices = e1.complex.simplices(top);
    let len = (top + 1) as usize;
    let rev_sign = if (len * (len - 1) / 2) % 2 == 0 { 1 } else { f.neg(1) };
    let mut matrix = FMatrix::zeros(&f, st.module.dim(), e1.module.dim());
    let mut img = Vec::with_capacity(len);
    for k in 0..e1.module.dim() {
        let v = e1.basis.vector(k);
        let mut out = vec![0; st.complex.simplices(top).len()];
        for (s, &c) in e1_simplices.iter().zip(&v) {
            if c == 0 {
                continue;
            }
            img.clear();
            for &x in s.iter().rev() {
                let a = e1.building.labels[x as usize].pair().0.clone();
                img.push(st.building.index_of(&Label::Sub(a)).expect("V_0 is a proper subspace") as u32);
            }
            let j = st.complex.chain_index(&img).expect("V_0's form a chain");
            out[j] = f.add(out[j], f.mul(c, rev_sign));
        }
        let coords = st
            .coordinates(&out)
            .ok_or_else(|| Error::ActionMismatch("φ of a cycle is not a cycle".into()))?;
        for (r, &c) in coords.iter().enumerate() {
            matrix.set(r, k, c);
        }
    }
    let equivariant = e1
        .module
        .generator_actions()
        .iter()
        .zip(st.module.generator_actions())
        .all(|(a, b)| matrix.mul(a) == b.mul(&matrix));
    Ok(PhiMap { matrix, equivariant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glgroup::{gl, group_make, sylow_subgroup, SubgroupKind, SubgroupSpec};

    fn fq(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn st_f2_2_is_standard_rep_of_s3() {
        let f2 = fq(2);
        let g = Arc::new(gl(&f2, 2).unwrap());
        let st = steinberg(&f2, 2, &SteinbergWhich::St, g.clone(), &f2).unwrap();
        assert_eq!(st.module.dim(), 2);
        // Over F_2 the trace of the standard 2-dim representation of S_3 is
        // (#fixed points of the permutation on 3 lines) - 1 mod 2.
        for x in 0..g.order() {
            let perm = st.building.relabel(g.element(x)).unwrap();
            let fixed = (0..3).filter(|&i| perm[i] == i).count() as i64;
            let a = st.module.action(x);
            let tr = (a.get(0, 0) + a.get(1, 1)) as i64 % 2;
            assert_eq!(tr, (fixed - 1).rem_euclid(2));
        }
        // faithful
        let distinct: std::collections::HashSet<FMatrix> = (0..6).map(|x| st.module.action(x)).collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn dimensions() {
        let f2 = fq(2);
        let g3 = Arc::new(gl(&f2, 3).unwrap());
        assert_eq!(steinberg(&f2, 3, &SteinbergWhich::St, g3.clone(), &f2).unwrap().module.dim(), 8);
        let g2 = Arc::new(gl(&f2, 2).unwrap());
        assert_eq!(steinberg(&f2, 2, &SteinbergWhich::E1, g2, &f2).unwrap().module.dim(), 5);
        let f3 = fq(3);
        let g = Arc::new(gl(&f3, 2).unwrap());
        assert_eq!(steinberg(&f3, 2, &SteinbergWhich::St, g.clone(), &f2).unwrap().module.dim(), 3);
        assert_eq!(steinberg(&f3, 2, &SteinbergWhich::St, g, &f3).unwrap().module.dim(), 3);
    }

    #[test]
    fn relative_modules() {
        let f2 = fq(2);
        let w = Subspace::coordinate(&f2, 3, &[0]);
        let pres = Arc::new(group_make(&SubgroupSpec::new(&f2, 3, SubgroupKind::PresW(w.clone()))).unwrap());
        let rel = steinberg(&f2, 3, &SteinbergWhich::Relative(w.clone()), pres.clone(), &f2).unwrap();
        let e1rel = steinberg(&f2, 3, &SteinbergWhich::E1Relative(w), pres, &f2).unwrap();
        assert_eq!(rel.top_degree(), 1);
        assert_eq!(e1rel.top_degree(), 1);
        assert!(rel.module.dim() > 0 && e1rel.module.dim() > 0);
    }

    #[test]
    fn phi_examples() {
        let f2 = fq(2);
        let g = Arc::new(gl(&f2, 2).unwrap());
        let e1 = steinberg(&f2, 2, &SteinbergWhich::E1, g.clone(), &f2).unwrap();
        let st = steinberg(&f2, 2, &SteinbergWhich::St, g.clone(), &f2).unwrap();
        let phi = phi_map(&e1, &st).unwrap();
        assert_eq!((phi.matrix.rows(), phi.matrix.cols()), (2, 5));
        assert_eq!(phi.matrix.rank(), 2);
        assert!(phi.equivariant);
        // exhaustively over all elements, not only generators
        for x in 0..g.order() {
            assert_eq!(phi.matrix.mul(&e1.module.action(x)), st.module.action(x).mul(&phi.matrix));
        }
        let g3 = Arc::new(gl(&f2, 3).unwrap());
        let f3 = fq(3);
        let e1 = steinberg(&f2, 3, &SteinbergWhich::E1, g3.clone(), &f3).unwrap();
        let st = steinberg(&f2, 3, &SteinbergWhich::St, g3, &f3).unwrap();
        let phi = phi_map(&e1, &st).unwrap();
        assert!(phi.equivariant);
    }

    #[test]
    fn induction_and_tensor() {
        let f2 = fq(2);
        let z2 = Arc::new(group_make(&SubgroupSpec::new(&f2, 2, SubgroupKind::UpperUnitriangular)).unwrap());
        let triv_group = Arc::new(group_make(&SubgroupSpec::new(&f2, 2, SubgroupKind::Generated(vec![]))).unwrap());
        let m = GModule::trivial(triv_group, &f2, 1);
        let ind = induce_module(z2.clone(), &m, 1000).unwrap();
        assert_eq!(ind.dim(), 2);
        let swap = ind.action(1);
        assert_eq!(swap, FMatrix::from_ints(&f2, &[&[0, 1], &[1, 0]]));
        let g = Arc::new(gl(&f2, 2).unwrap());
        let st = steinberg(&f2, 2, &SteinbergWhich::St, g.clone(), &f2).unwrap().module;
        let triv = GModule::trivial(g.clone(), &f2, 1);
        let t = st.tensor(&triv).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.generator_actions(), st.generator_actions());
        assert_eq!(st.tensor(&st).unwrap().dim(), 4);
        // induction from the Sylow subgroup: dimension [G:H]·dim
        let s = Arc::new(sylow_subgroup(&g, 2).unwrap());
        let res = st.restrict(s.clone()).unwrap();
        assert_eq!((res.dim(), s.order()), (2, 2));
        let inv = res.action(1 - s.identity());
        assert_eq!(inv.mul(&inv), FMatrix::identity(&f2, 2));
        assert_ne!(inv, FMatrix::identity(&f2, 2));
        let ind = induce_module(g.clone(), &res, 1000).unwrap();
        assert_eq!(ind.dim(), 3 * 2);
        let other = Arc::new(gl(&fq(3), 2).unwrap());
        assert!(matches!(st.tensor(&GModule::trivial(other, &f2, 1)), Err(Error::GroupMismatch)));
    }
}
