//! Buildings of a vector space over a finite field: Tits, relative, dual
//! relative, split, relative split and cut-down split posets.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::complexes::{filtration_identity_check, order_complex, BettiProfile, FiltrationReport, Poset};
use crate::error::{Error, Result};
use crate::ffield::{enumerate_range, Elem, FMatrix, Field, Subspace};

pub const DEFAULT_BUILDING_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BuildingKind {
    Tits,
    /// Subspaces `V` with `V ∩ W = 0`.
    RelTits(Subspace),
    /// Subspaces `V` with `V + W = P`.
    DualRelTits(Subspace),
    Split,
    /// Splittings `(A, B)` with `W ⊆ B`.
    RelSplit(Subspace),
    /// Splittings `(A, B)` of `within` (default `P`) with `A ⊆ V` and, if
    /// given, `W ⊆ B`.
    CutSplit { v: Subspace, w: Option<Subspace>, within: Option<Subspace> },
}

impl BuildingKind {
    pub fn name(&self) -> &'static str {
        match self {
            BuildingKind::Tits => "tits",
            BuildingKind::RelTits(_) => "rel_tits",
            BuildingKind::DualRelTits(_) => "dual_rel_tits",
            BuildingKind::Split => "split",
            BuildingKind::RelSplit(_) => "rel_split",
            BuildingKind::CutSplit { .. } => "cut_split",
        }
    }

    /// Degree in which reduced homology is concentrated, when known.
    pub fn expected_top(&self, n: usize) -> Option<i64> {
        let n = n as i64;
        match self {
            BuildingKind::Tits | BuildingKind::Split => Some(n - 2),
            BuildingKind::RelTits(w) | BuildingKind::RelSplit(w) => Some(n - w.dim() as i64 - 1),
            BuildingKind::DualRelTits(w) => Some(w.dim() as i64 - 1),
            BuildingKind::CutSplit { v, .. } => Some(v.dim() as i64 - 1),
        }
    }
}

/// A poset element: a subspace, or an ordered splitting `(V_0, V_1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Sub(Subspace),
    Pair(Subspace, Subspace),
}

impl Label {
    pub fn act(&self, g: &FMatrix) -> Label {
        match self {
            Label::Sub(v) => Label::Sub(v.image(g)),
            Label::Pair(a, b) => Label::Pair(a.image(g), b.image(g)),
        }
    }

    pub fn subspace(&self) -> &Subspace {
        match self {
            Label::Sub(v) => v,
            Label::Pair(a, _) => a,
        }
    }

    pub fn pair(&self) -> (&Subspace, &Subspace) {
        match self {
            Label::Pair(a, b) => (a, b),
            Label::Sub(_) => panic!("not a splitting"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Building {
    pub field: Field,
    pub n: usize,
    pub kind: BuildingKind,
    pub labels: Vec<Label>,
    pub poset: Poset,
    index: HashMap<Label, usize>,
}

fn split_less(x: &Label, y: &Label) -> bool {
    // (V_0, V_1) ≤ (V_0', V_1') iff V_0' ⊆ V_0 and V_1 ⊆ V_1'
    let (a, b) = x.pair();
    let (a2, b2) = y.pair();
    x != y && a2.is_subspace_of(a) && b.is_subspace_of(b2)
}

impl Building {
    fn assemble(field: &Field, n: usize, kind: BuildingKind, labels: Vec<Label>) -> Result<Building> {
        let split = matches!(labels.first(), Some(Label::Pair(..)));
        let poset = if split {
            Poset::from_relation(labels.len(), |i, j| split_less(&labels[i], &labels[j]))?
        } else {
            Poset::from_relation(labels.len(), |i, j| {
                i != j && labels[i].subspace().is_subspace_of(labels[j].subspace())
            })?
        };
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(Building { field: field.clone(), n, kind, labels, poset, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }

    /// The permutation of elements induced by `g`, if `g` preserves the
    /// element set.
    pub fn relabel(&self, g: &FMatrix) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .map(|l| {
                self.index_of(&l.act(g))
                    .ok_or_else(|| Error::ActionMismatch(format!("{:?} is not preserved", self.kind.name())))
            })
            .collect()
    }

    /// Whether the relabeling by `g` is a poset automorphism.
    pub fn is_automorphism(&self, g: &FMatrix) -> bool {
        let Ok(perm) = self.relabel(g) else {
            return false;
        };
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if std::mem::replace(&mut seen[p], true) {
                return false;
            }
        }
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.poset.less(i, j) == self.poset.less(perm[i], perm[j])))
    }

    pub fn betti(&self, coeff: &Field) -> Result<BettiProfile> {
        order_complex(&self.poset, coeff)?.complex.betti()
    }
}

fn check_proper(w: &Subspace, n: usize, allow_zero: bool, allow_whole: bool, what: &str) -> Result<()> {
    if w.ambient_dim() != n {
        return Err(Error::AmbientMismatch(w.ambient_dim(), n));
    }
    if (!allow_zero && w.is_zero()) || (!allow_whole && w.is_whole()) {
        return Err(Error::BadParameters(format!("{what} must be a nonzero proper subspace")));
    }
    Ok(())
}

/// Ordered splittings `(A, B)` of `c` (nonzero proper parts, `A ⊕ B = c`)
/// with `A ⊆ v` and `w ⊆ B` when given.
fn splittings(subs: &[Subspace], c: &Subspace, v: Option<&Subspace>, w: Option<&Subspace>) -> Result<Vec<Label>> {
    let inside: Vec<&Subspace> = subs.iter().filter(|s| s.is_subspace_of(c) && !s.is_zero() && s != &c).collect();
    let mut out = Vec::new();
    for a in &inside {
        if v.is_some_and(|v| !a.is_subspace_of(v)) {
            continue;
        }
        for b in &inside {
            if a.dim() + b.dim() != c.dim() {
                continue;
            }
            if w.is_some_and(|w| !w.is_subspace_of(b)) {
                continue;
            }
            if a.intersection(b)?.is_zero() {
                out.push(Label::Pair((*a).clone(), (*b).clone()));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Builds the poset of `kind` on `F_q^n`.
pub fn build(field: &Field, n: usize, kind: &BuildingKind) -> Result<Building> {
    build_capped(field, n, kind, DEFAULT_BUILDING_CAP)
}

pub fn build_capped(field: &Field, n: usize, kind: &BuildingKind, cap: usize) -> Result<Building> {
    let q = field.q() as u64;
    let total: u128 = (0..=n).map(|k| crate::ffield::gaussian_binomial(q, n, k)).sum();
    if total > cap as u128 {
        return Err(Error::TooLarge(format!("{total} subspaces of F_{q}^{n} exceed {cap}")));
    }
    let proper = if n >= 2 { enumerate_range(field, n, 1, n - 1)? } else { Vec::new() };
    let whole = Subspace::whole(field, n);
    let labels: Vec<Label> = match kind {
        BuildingKind::Tits => proper.iter().cloned().map(Label::Sub).collect(),
        BuildingKind::RelTits(w) => {
            check_proper(w, n, true, true, "W")?;
            let mut out = Vec::new();
            for v in &proper {
                if v.intersection(w)?.is_zero() {
                    out.push(Label::Sub(v.clone()));
                }
            }
            out
        }
        BuildingKind::DualRelTits(w) => {
            check_proper(w, n, true, true, "W")?;
            let mut out = Vec::new();
            for v in &proper {
                if v.sum(w)?.is_whole() {
                    out.push(Label::Sub(v.clone()));
                }
            }
            out
        }
        BuildingKind::Split => splittings(&proper, &whole, None, None)?,
        BuildingKind::RelSplit(w) => {
            check_proper(w, n, false, false, "W")?;
            splittings(&proper, &whole, None, Some(w))?
        }
        BuildingKind::CutSplit { v, w, within } => {
            check_proper(v, n, true, true, "V")?;
            if let Some(w) = w {
                check_proper(w, n, true, true, "W")?;
            }
            let c = within.clone().unwrap_or_else(|| whole.clone());
            splittings(&proper, &c, Some(v), w.as_ref())?
        }
    };
    if labels.len() > cap {
        return Err(Error::TooLarge(format!("{} elements exceed {cap}", labels.len())));
    }
    Building::assemble(field, n, kind.clone(), labels)
}

#[derive(Clone, Debug, Serialize)]
pub struct SphericalityReport {
    pub kind: String,
    pub q: u32,
    pub n: usize,
    pub elements: usize,
    pub expected_top: i64,
    pub betti: Vec<usize>,
    pub concentrated: bool,
    pub top_betti: usize,
}

/// Computes reduced homology and checks concentration in the kind's top
/// degree.
pub fn sphericality_suite(field: &Field, n: usize, kind: &BuildingKind, coeff: &Field) -> Result<SphericalityReport> {
    let b = build(field, n, kind)?;
    let betti = b.betti(coeff)?;
    let top = kind.expected_top(n).expect("every kind has a top degree");
    Ok(SphericalityReport {
        kind: kind.name().into(),
        q: field.q(),
        n,
        elements: b.len(),
        expected_top: top,
        concentrated: betti.is_concentrated_in(top),
        top_betti: betti.get(top),
        betti: betti.betti,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct JoinReport {
    pub lhs: usize,
    pub quotient_factor: usize,
    pub line_factor: usize,
    pub holds: bool,
}

/// `b̃_{w-1}(T^∨(P|W)) = b̃_{w-2}(T^∨(P/L | W/L)) · b̃_0(T^∨(P|L))`.
pub fn join_decomposition_check(field: &Field, n: usize, w: &Subspace, l: &Subspace, coeff: &Field) -> Result<JoinReport> {
    if n < 2 {
        return Err(Error::BadParameters("dim P must be at least 2".into()));
    }
    check_proper(w, n, false, false, "W")?;
    if l.dim() != 1 || !l.is_subspace_of(w) {
        return Err(Error::BadParameters("L must be a line in W".into()));
    }
    let wd = w.dim() as i64;
    let lhs = build(field, n, &BuildingKind::DualRelTits(w.clone()))?.betti(coeff)?.get(wd - 1);
    let pi = l.quotient_projection();
    let wq = w.image(&pi);
    let quotient_factor = build(field, n - 1, &BuildingKind::DualRelTits(wq))?.betti(coeff)?.get(wd - 2);
    let line_factor = build(field, n, &BuildingKind::DualRelTits(l.clone()))?.betti(coeff)?.get(0);
    Ok(JoinReport { lhs, quotient_factor, line_factor, holds: lhs == quotient_factor * line_factor })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoWitness {
    pub source_size: usize,
    pub target_size: usize,
    /// `map[i]` is the image of source element `i`.
    pub map: Vec<usize>,
    pub verified: bool,
}

/// `V ↦ V°` from `rel_tits(P|W)` to `dual_rel_tits(P^∨|W°)`, with `P^∨`
/// identified with `F^n` by the standard form.  The map reverses order.
pub fn dualize_building(field: &Field, n: usize, w: &Subspace) -> Result<IsoWitness> {
    let src = build(field, n, &BuildingKind::RelTits(w.clone()))?;
    let dst = build(field, n, &BuildingKind::DualRelTits(w.annihilator()))?;
    let map: Vec<usize> = src
        .labels
        .iter()
        .map(|l| {
            dst.index_of(&Label::Sub(l.subspace().annihilator()))
                .ok_or_else(|| Error::ActionMismatch("annihilator leaves the dual building".into()))
        })
        .collect::<Result<_>>()?;
    let back: Vec<Option<usize>> = dst.labels.iter().map(|l| src.index_of(&Label::Sub(l.subspace().annihilator()))).collect();
    let inverse = src.len() == dst.len() && map.iter().enumerate().all(|(i, &j)| back[j] == Some(i));
    let reversing = (0..src.len()).all(|i| (0..src.len()).all(|j| src.poset.less(i, j) == dst.poset.less(map[j], map[i])));
    Ok(IsoWitness { source_size: src.len(), target_size: dst.len(), map, verified: inverse && reversing })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutDownWitness {
    pub complement_basis: Vec<Vec<Elem>>,
    pub iso: IsoWitness,
}

/// `cut_split(V, W | P) ≅ cut_split(V, − | C)` via `(A, B) ↦ (A, B ∩ C)`
/// with inverse `(A', B') ↦ (A', B' ⊕ W)`, for the deterministic
/// complement `C ⊇ V` of `W`.
pub fn cutting_down_iso(field: &Field, n: usize, v: &Subspace, w: &Subspace) -> Result<CutDownWitness> {
    if !v.intersection(w)?.is_zero() {
        return Err(Error::PreconditionFailed("V and W must intersect trivially".into()));
    }
    if v.sum(w)?.is_whole() {
        return Err(Error::PreconditionFailed("V ⊕ W = P: the cut-down poset has a terminal object".into()));
    }
    let c = w.complement_containing(v)?;
    let src = build(field, n, &BuildingKind::CutSplit { v: v.clone(), w: Some(w.clone()), within: None })?;
    let dst = build(field, n, &BuildingKind::CutSplit { v: v.clone(), w: None, within: Some(c.clone()) })?;
    let mut map = Vec::with_capacity(src.len());
    for l in &src.labels {
        let (a, b) = l.pair();
        let image = Label::Pair(a.clone(), b.intersection(&c)?);
        map.push(dst.index_of(&image).ok_or_else(|| Error::ActionMismatch("(A, B∩C) is not a splitting of C".into()))?);
    }
    let mut inverse_ok = src.len() == dst.len();
    let mut back = vec![usize::MAX; dst.len()];
    for (j, l) in dst.labels.iter().enumerate() {
        let (a, b) = l.pair();
        let image = Label::Pair(a.clone(), b.sum(w)?);
        match src.index_of(&image) {
            Some(i) => back[j] = i,
            None => inverse_ok = false,
        }
    }
    inverse_ok &= map.iter().enumerate().all(|(i, &j)| back[j] == i);
    let preserving = (0..src.len()).all(|i| (0..src.len()).all(|j| src.poset.less(i, j) == dst.poset.less(map[i], map[j])));
    Ok(CutDownWitness {
        complement_basis: c.basis_vectors(),
        iso: IsoWitness { source_size: src.len(), target_size: dst.len(), map, verified: inverse_ok && preserving },
    })
}

/// The nerve dictionary: the `p`-simplices of the semisimplicial splitting
/// complex are ordered decompositions `(V_0, ..., V_{p+1})`, and face `d_i`
/// sums the `i`-th and `(i+1)`-st terms.
pub fn splitting_complex(field: &Field, n: usize) -> Result<crate::complexes::SemiSimplicial> {
    let all = enumerate_range(field, n, 1, n)?;
    let mut levels: Vec<Vec<Vec<Subspace>>> = Vec::new();
    // level p holds decompositions into p + 2 parts
    fn extend(all: &[Subspace], parts: usize, acc: &mut Vec<Subspace>, sum: &Subspace, out: &mut Vec<Vec<Subspace>>) -> Result<()> {
        let n = sum.ambient_dim();
        let left = n - sum.dim();
        if parts == 0 {
            if left == 0 {
                out.push(acc.clone());
            }
            return Ok(());
        }
        for v in all {
            if v.dim() + parts - 1 > left || (parts == 1 && v.dim() != left) {
                continue;
            }
            if v.intersection(sum)?.is_zero() {
                acc.push(v.clone());
                let s = sum.sum(v)?;
                extend(all, parts - 1, acc, &s, out)?;
                acc.pop();
            }
        }
        Ok(())
    }
    for parts in 2..=n {
        let mut out = Vec::new();
        extend(&all, parts, &mut Vec::new(), &Subspace::zero(field, n), &mut out)?;
        out.sort();
        levels.push(out);
    }
    let index: Vec<HashMap<&Vec<Subspace>, u32>> =
        levels.iter().map(|lv| lv.iter().enumerate().map(|(i, s)| (s, i as u32)).collect()).collect();
    let mut faces = Vec::new();
    for p in 1..levels.len() {
        let mut fp = Vec::with_capacity(levels[p].len());
        for s in &levels[p] {
            let mut f = Vec::with_capacity(s.len() - 1);
            for i in 0..s.len() - 1 {
                let mut t: Vec<Subspace> = Vec::with_capacity(s.len() - 1);
                t.extend_from_slice(&s[..i]);
                t.push(s[i].sum(&s[i + 1])?);
                t.extend_from_slice(&s[i + 2..]);
                f.push(index[p - 1][&t]);
            }
            fp.push(f);
        }
        faces.push(fp);
    }
    Ok(crate::complexes::SemiSimplicial { levels: levels.iter().map(Vec::len).collect(), faces })
}

/// The map `(A, B) ↦ B` from the split building to `T(P)^op`,
/// with `t(U) = dim U − 1` and top degree `n − 2`.  Splittings are ordered
/// here by `A ⊆ A'`, `B ⊇ B'`, the opposite of [`Building::poset`].
pub fn first_reduction_check(field: &Field, n: usize, coeff: &Field) -> Result<FiltrationReport> {
    let x = build(field, n, &BuildingKind::Split)?;
    let y = build(field, n, &BuildingKind::Tits)?;
    let f: Vec<usize> = x
        .labels
        .iter()
        .map(|l| y.index_of(&Label::Sub(l.pair().1.clone())).expect("B is a proper subspace"))
        .collect();
    let t: Vec<i64> = y.labels.iter().map(|l| l.subspace().dim() as i64 - 1).collect();
    filtration_identity_check(&x.poset.opposite(), &y.poset.opposite(), &f, &t, n as i64 - 2, coeff)
}

/// The map `(A, B) ↦ A` from the relative split building of `W = F^w`
/// (first `w` coordinates) to the relative Tits building, with
/// `t(V) = n − dim V − w` and top degree `n − w − 1`.
pub fn second_reduction_check(field: &Field, n: usize, w: usize, coeff: &Field) -> Result<FiltrationReport> {
    if w == 0 || w >= n {
        return Err(Error::BadParameters(format!("need 0 < w < n, got w = {w}, n = {n}")));
    }
    let wsub = Subspace::coordinate(field, n, &(0..w).collect::<Vec<_>>());
    let x = build(field, n, &BuildingKind::RelSplit(wsub.clone()))?;
    let y = build(field, n, &BuildingKind::RelTits(wsub))?;
    let f: Vec<usize> = x
        .labels
        .iter()
        .map(|l| y.index_of(&Label::Sub(l.pair().0.clone())).expect("A meets W trivially"))
        .collect();
    let t: Vec<i64> = y.labels.iter().map(|l| (n - w) as i64 - l.subspace().dim() as i64).collect();
    filtration_identity_check(&x.poset.opposite(), &y.poset, &f, &t, (n - w) as i64 - 1, coeff)
}

/// Shared builds keyed by field, dimension and kind, optionally persisted
/// as JSON under a directory.
#[derive(Default)]
pub struct BuildingCache {
    mem: Mutex<HashMap<String, Arc<Building>>>,
    dir: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct StoredBuilding {
    key: String,
    labels: Vec<Vec<Vec<Vec<Elem>>>>,
    relations: Vec<(u32, u32)>,
}

impl BuildingCache {
    pub fn new() -> BuildingCache {
        BuildingCache::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> BuildingCache {
        BuildingCache { mem: Mutex::default(), dir: Some(dir.into()) }
    }

    fn key(field: &Field, n: usize, kind: &BuildingKind) -> String {
        let spec = field.spec();
        format!("{}^{}-{:?}-n{n}-{kind:?}", spec.p, spec.r, spec.modulus)
    }

    fn file_for(&self, key: &str) -> Option<PathBuf> {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        key.hash(&mut h);
        self.dir.as_ref().map(|d| d.join(format!("building-{:016x}.json", h.finish())))
    }

    pub fn get(&self, field: &Field, n: usize, kind: &BuildingKind) -> Result<Arc<Building>> {
        let key = Self::key(field, n, kind);
        if let Some(b) = self.mem.lock().unwrap().get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(match self.load(&key, field, n, kind) {
            Some(b) => b,
            None => {
                let b = build(field, n, kind)?;
                self.store(&key, &b);
                b
            }
        });
        self.mem.lock().unwrap().insert(key, b.clone());
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.mem.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn store(&self, key: &str, b: &Building) {
        let Some(path) = self.file_for(key) else { return };
        let labels = b
            .labels
            .iter()
            .map(|l| match l {
                Label::Sub(v) => vec![v.basis_vectors()],
                Label::Pair(a, c) => vec![a.basis_vectors(), c.basis_vectors()],
            })
            .collect();
        let relations = (0..b.len())
            .flat_map(|i| b.poset.above(i).map(move |j| (i as u32, j as u32)))
            .collect();
        let stored = StoredBuilding { key: key.to_string(), labels, relations };
        if let Ok(text) = serde_json::to_string(&stored) {
            let _ = fs::create_dir_all(path.parent().unwrap());
            let tmp = path.with_extension("tmp");
            if fs::write(&tmp, text).is_ok() {
                let _ = fs::rename(tmp, path);
            }
        }
    }

    fn load(&self, key: &str, field: &Field, n: usize, kind: &BuildingKind) -> Option<Building> {
        let path = self.file_for(key)?;
        let stored: StoredBuilding = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
        if stored.key != key {
            return None;
        }
        let sub = |rows: &Vec<Vec<Elem>>| Subspace::span(field, n, rows);
        let labels: Vec<Label> = stored
            .labels
            .iter()
            .map(|parts| match parts.as_slice() {
                [v] => Some(Label::Sub(sub(v))),
                [a, b] => Some(Label::Pair(sub(a), sub(b))),
                _ => None,
            })
            .collect::<Option<_>>()?;
        let pairs: Vec<(usize, usize)> = stored.relations.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
        let poset = Poset::from_generating_pairs(labels.len(), &pairs).ok()?;
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Some(Building { field: field.clone(), n, kind: kind.clone(), labels, poset, index })
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn reductions() {
        let f2 = crate::ffield::Field::new(2, 1).unwrap();
        let r = super::first_reduction_check(&f2, 3, &f2).unwrap();
        assert!(r.holds());
        let direct = super::build(&f2, 3, &super::BuildingKind::Split).unwrap().betti(&f2).unwrap().get(1);
        assert_eq!((r.lhs, r.base), (direct, 8));
        for w in 1..3 {
            let r = super::second_reduction_check(&f2, 3, w, &f2).unwrap();
            assert!(r.holds(), "w = {w}: {r:?}");
        }
    }

    use super::*;
    use crate::complexes::semisimplicial_complex;
    use crate::ffield::{enumerate_subspaces, gaussian_binomial};
    use crate::glgroup::{gl, group_make, SubgroupKind, SubgroupSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn small_counts() {
        let f2 = fq(2);
        let t = build(&f2, 2, &BuildingKind::Tits).unwrap();
        assert_eq!((t.len(), t.poset.relation_count()), (3, 0));
        let s = build(&f2, 2, &BuildingKind::Split).unwrap();
        assert_eq!((s.len(), s.poset.relation_count()), (6, 0));
        let t3 = build(&f2, 3, &BuildingKind::Tits).unwrap();
        assert_eq!((t3.len(), t3.poset.relation_count()), (14, 21));
        for (q, n) in [(2u64, 2usize), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)] {
            let expect: u128 = (1..n).map(|k| gaussian_binomial(q, n, k)).sum();
            assert_eq!(build(&fq(q), n, &BuildingKind::Tits).unwrap().len() as u128, expect);
        }
        let s4 = build(&f2, 4, &BuildingKind::Split).unwrap();
        assert_eq!(s4.len(), 800);
    }

    #[test]
    fn relative_counts_by_filter() {
        let f2 = fq(2);
        let w = Subspace::coordinate(&f2, 3, &[0]);
        let rel = build(&f2, 3, &BuildingKind::RelTits(w.clone())).unwrap();
        let all = enumerate_range(&f2, 3, 1, 2).unwrap();
        let expect = all.iter().filter(|v| v.intersection(&w).unwrap().is_zero()).count();
        assert_eq!(rel.len(), expect);
        assert_eq!(rel.len(), 6 + 4);
        assert!(matches!(
            build(&f2, 3, &BuildingKind::RelSplit(Subspace::zero(&f2, 3))),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(build(&fq(2), 9, &BuildingKind::Tits), Err(Error::TooLarge(_))));
    }

    #[test]
    fn sphericality_examples() {
        let f2 = fq(2);
        let r = sphericality_suite(&f2, 3, &BuildingKind::Tits, &f2).unwrap();
        assert!(r.concentrated);
        assert_eq!((r.expected_top, r.top_betti), (1, 8));
        let l = Subspace::coordinate(&f2, 3, &[0]);
        let r = sphericality_suite(&f2, 3, &BuildingKind::DualRelTits(l), &f2).unwrap();
        assert!(r.concentrated && r.expected_top == 0);
        let f3 = fq(3);
        let r = sphericality_suite(&f3, 2, &BuildingKind::Split, &f3).unwrap();
        assert_eq!((r.elements, r.top_betti), (12, 11));
    }

    #[test]
    fn thick_and_thin_agree() {
        for (q, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
            let f = fq(q);
            let ss = splitting_complex(&f, n).unwrap();
            let thick = semisimplicial_complex(&ss, &f).unwrap().betti().unwrap();
            let thin = build(&f, n, &BuildingKind::Split).unwrap().betti(&f).unwrap();
            assert_eq!(thick, thin, "q={q} n={n}");
        }
        let f2 = fq(2);
        assert_eq!(splitting_complex(&f2, 2).unwrap().levels, vec![6]);
    }

    #[test]
    fn join_examples() {
        let f2 = fq(2);
        let w = Subspace::coordinate(&f2, 3, &[0, 1]);
        let l = Subspace::coordinate(&f2, 3, &[0]);
        let r = join_decomposition_check(&f2, 3, &w, &l, &f2).unwrap();
        assert!(r.holds, "{r:?}");
        let w = Subspace::coordinate(&f2, 4, &[0, 1]);
        let l = Subspace::coordinate(&f2, 4, &[1]);
        assert!(join_decomposition_check(&f2, 4, &w, &l, &f2).unwrap().holds);
        let f3 = fq(3);
        let whole = Subspace::whole(&f3, 2);
        let l = Subspace::coordinate(&f3, 2, &[0]);
        assert!(matches!(join_decomposition_check(&f3, 2, &whole, &l, &f3), Err(Error::BadParameters(_))));
    }

    #[test]
    fn dualization() {
        for (q, n) in [(2u64, 3usize), (3, 2)] {
            let f = fq(q);
            let w = Subspace::coordinate(&f, n, &[0]);
            let wit = dualize_building(&f, n, &w).unwrap();
            assert!(wit.verified);
            assert_eq!(wit.source_size, wit.target_size);
            // V ↦ V° ↦ V°° is the identity on the source
            let src = build(&f, n, &BuildingKind::RelTits(w.clone())).unwrap();
            let dst = build(&f, n, &BuildingKind::DualRelTits(w.annihilator())).unwrap();
            for (i, &j) in wit.map.iter().enumerate() {
                assert_eq!(dst.labels[j].subspace().annihilator(), *src.labels[i].subspace());
            }
            for v in enumerate_range(&f, n, 0, n).unwrap() {
                assert_eq!(v.annihilator().annihilator(), v);
            }
        }
    }

    #[test]
    fn cutting_down_examples() {
        let f2 = fq(2);
        let v = Subspace::coordinate(&f2, 4, &[0]);
        let w = Subspace::coordinate(&f2, 4, &[1]);
        let wit = cutting_down_iso(&f2, 4, &v, &w).unwrap();
        assert!(wit.iso.verified);
        let v = Subspace::coordinate(&f2, 2, &[0]);
        let w = Subspace::coordinate(&f2, 2, &[1]);
        assert!(matches!(cutting_down_iso(&f2, 2, &v, &w), Err(Error::PreconditionFailed(_))));
        let f3 = fq(3);
        let v = Subspace::span(&f3, 3, &[vec![1, 1, 0]]);
        let w = Subspace::coordinate(&f3, 3, &[2]);
        assert!(cutting_down_iso(&f3, 3, &v, &w).unwrap().iso.verified);
    }

    #[test]
    fn rel_split_top_codim_one_is_rel_tits() {
        let f2 = fq(2);
        for n in 2..=3 {
            for w in enumerate_subspaces(&f2, n, n - 1).unwrap() {
                let rs = build(&f2, n, &BuildingKind::RelSplit(w.clone())).unwrap();
                let rt = build(&f2, n, &BuildingKind::RelTits(w.clone())).unwrap();
                let map: Vec<usize> = rs.labels.iter().map(|l| rt.index_of(&Label::Sub(l.pair().0.clone())).unwrap()).collect();
                let mut sorted = map.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), rt.len());
                assert_eq!(rs.len(), rt.len());
                for i in 0..rs.len() {
                    for j in 0..rs.len() {
                        assert_eq!(rs.poset.less(i, j), rt.poset.less(map[i], map[j]));
                    }
                }
            }
        }
    }

    #[test]
    fn symmetry_under_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (q, n) in [(2u64, 3usize), (3, 2), (2, 4)] {
            let f = fq(q);
            let g = gl(&f, n).unwrap();
            let w = Subspace::coordinate(&f, n, &[0]);
            let pres = group_make(&SubgroupSpec::new(&f, n, SubgroupKind::PresW(w.clone()))).unwrap();
            let cases: Vec<(BuildingKind, &crate::glgroup::MatGroup)> = vec![
                (BuildingKind::Tits, &g),
                (BuildingKind::Split, &g),
                (BuildingKind::RelTits(w.clone()), &pres),
                (BuildingKind::DualRelTits(w.clone()), &pres),
                (BuildingKind::RelSplit(w.clone()), &pres),
            ];
            for (kind, grp) in cases {
                let b = build(&f, n, &kind).unwrap();
                for _ in 0..200 {
                    let x = grp.element(rng.gen_range(0..grp.order()));
                    assert!(b.is_automorphism(x), "{kind:?}");
                }
            }
        }
    }

    #[test]
    fn milgram_priddy_block_orders() {
        let f2 = fq(2);
        let m11 = group_make(&SubgroupSpec::new(&f2, 2, SubgroupKind::UnipotentBlock { a: 1, b: 1 })).unwrap();
        let m22 = group_make(&SubgroupSpec::new(&f2, 4, SubgroupKind::UnipotentBlock { a: 2, b: 2 })).unwrap();
        assert_eq!((m11.order(), m22.order()), (2, 16));
        // M_{2,2} preserves the split building with W = span(e1, e2) inside B
        let w = Subspace::coordinate(&f2, 4, &[0, 1]);
        let b = build(&f2, 4, &BuildingKind::RelSplit(w)).unwrap();
        assert!(m22.elements().iter().all(|x| b.is_automorphism(x)));
    }

    #[test]
    fn disk_cache_roundtrip() {
        let dir = std::env::temp_dir().join(format!("flagforge-cache-{}", std::process::id()));
        let f2 = fq(2);
        let kind = BuildingKind::Split;
        let a = BuildingCache::with_dir(&dir).get(&f2, 3, &kind).unwrap();
        let fresh = BuildingCache::with_dir(&dir);
        let b = fresh.get(&f2, 3, &kind).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.poset, b.poset);
        assert_eq!(fresh.len(), 1);
        let _ = fs::remove_dir_all(dir);
    }
}
