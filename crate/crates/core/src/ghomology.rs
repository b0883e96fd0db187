//! Group homology over a field for small matrix groups: coinvariants, the
//! normalized bar complex, bar cochains and restriction, stable elements
//! through a Sylow subgroup, and the comparison checks built on them.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::linalg::kernel_of_rows;
use crate::ffield::{Caps, EchelonBasis, Elem, FMatrix, Field, SparseVec};
use crate::glgroup::{block_sum, double_cosets, group_make, sylow_subgroup, MatGroup, SubgroupKind, SubgroupSpec};
use crate::steinberg::{induce_module, GModule};

/// Default bound on the number of basis columns of a bar differential.
pub const DEFAULT_BAR_COLUMNS: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bar,
    StableElements,
    CoinvariantsOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    /// `dims[d] = dim H_d` for `0 ≤ d ≤ d_max`.
    pub dims: Vec<usize>,
    pub method: Method,
}

/// `M_G` with a basis of representatives of the quotient.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub dim: usize,
    pub basis: Vec<Vec<Elem>>,
}

fn relation_basis(m: &GModule, actions: &[FMatrix]) -> EchelonBasis {
    let f = m.field();
    let mut rel = EchelonBasis::new(f, m.dim());
    let minus_one = f.neg(1);
    for a in actions {
        for x in 0..m.dim() {
            let mut v: Vec<Elem> = (0..m.dim()).map(|r| a.get(r, x)).collect();
            v[x] = f.add(v[x], minus_one);
            rel.insert_dense(&v);
        }
    }
    rel
}

/// `M / span{gx − x}` over generators `g`.  For `|G| ≤ 200` the span over
/// all elements is computed too and must agree.
pub fn coinvariants(m: &GModule) -> Result<Coinvariants> {
    let mut rel = relation_basis(m, m.generator_actions());
    if m.group().order() <= 200 {
        let all = relation_basis(m, &m.all_actions());
        if all.rank() != rel.rank() {
            return Err(Error::ActionMismatch("generator relations miss some group relations".into()));
        }
    }
    let mut basis = Vec::new();
    for i in 0..m.dim() {
        let mut e = vec![0; m.dim()];
        e[i] = 1;
        if rel.insert_dense(&e).is_some() {
            basis.push(e);
        }
    }
    Ok(Coinvariants { dim: basis.len(), basis })
}

/// Rank of the map `M_G → N_G` induced by an equivariant `φ: M → N`.
pub fn coinvariant_map_rank(m: &GModule, n: &GModule, phi: &FMatrix) -> Result<usize> {
    let cm = coinvariants(m)?;
    let mut rel = relation_basis(n, n.generator_actions());
    let base = rel.rank();
    for v in &cm.basis {
        let img: Vec<Elem> = (0..n.dim())
            .map(|r| (0..m.dim()).fold(0, |acc, c| n.field().add(acc, n.field().mul(phi.get(r, c), v[c]))))
            .collect();
        rel.insert_dense(&img);
    }
    Ok(rel.rank() - base)
}

/// Tuples of non-identity elements, coded in base `|G| − 1` (first entry
/// least significant).  The identity has index 0.
struct Tuples {
    m: usize,
}

impl Tuples {
    fn decode(&self, mut code: usize, d: usize, out: &mut Vec<usize>) {
        out.clear();
        for _ in 0..d {
            out.push(code % self.m + 1);
            code /= self.m;
        }
    }
    fn encode(&self, t: &[usize]) -> usize {
        t.iter().rev().fold(0, |acc, &g| acc * self.m + (g - 1))
    }
    fn count(&self, d: usize) -> Option<usize> {
        self.m.checked_pow(d as u32)
    }
}

/// The inner faces `i = 1..d` of a tuple (merging entries `i−1, i`), skipping
/// the degenerate ones.
fn inner_faces(g: &MatGroup, t: &[usize], mut visit: impl FnMut(usize, &[usize])) {
    let d = t.len();
    let mut face = Vec::with_capacity(d);
    for i in 1..d {
        let prod = g.mul(t[i - 1], t[i]);
        if prod == g.identity() {
            continue;
        }
        face.clear();
        face.extend_from_slice(&t[..i - 1]);
        face.push(prod);
        face.extend_from_slice(&t[i + 1..]);
        visit(i, &face);
    }
}

fn signed(f: &Field, i: usize, c: Elem) -> Elem {
    if i % 2 == 0 {
        c
    } else {
        f.neg(c)
    }
}

fn merge(f: &Field, buf: &mut SparseVec) {
    buf.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(buf.len());
    for &(i, v) in buf.iter() {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = f.add(last.1, v),
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    *buf = out;
}

/// `H_d(G; M)` for `d ≤ d_max` from the normalized bar complex, with
/// `∂(m⊗[g_1|…|g_d]) = g_1^{-1}m⊗[g_2|…] + Σ(−1)^i m⊗[…|g_ig_{i+1}|…] + (−1)^d m⊗[…|g_{d−1}]`.
pub fn bar_homology(m: &GModule, d_max: usize) -> Result<HomologyReport> {
    bar_homology_capped(m, d_max, DEFAULT_BAR_COLUMNS)
}

pub fn bar_homology_capped(m: &GModule, d_max: usize, max_columns: usize) -> Result<HomologyReport> {
    let g = m.group().clone();
    let f = m.field().clone();
    let dim = m.dim();
    let tuples = Tuples { m: g.order() - 1 };
    let mut sizes = Vec::new();
    for d in 0..=d_max + 1 {
        match tuples.count(d).and_then(|c| c.checked_mul(dim)) {
            Some(c) if c <= max_columns => sizes.push(c),
            _ => {
                return Err(Error::ResourceCapExceeded(format!(
                    "bar complex in degree {d} exceeds {max_columns} columns"
                )))
            }
        }
    }
    // sparse columns of g^{-1} for every g
    let inv_cols: Vec<Vec<SparseVec>> = (0..g.order())
        .map(|x| {
            let a = m.action(g.inv(x));
            (0..dim)
                .map(|c| (0..dim).filter(|&r| a.get(r, c) != 0).map(|r| (r as u32, a.get(r, c))).collect())
                .collect()
        })
        .collect();
    let caps = Caps::default();
    let mut ranks = vec![0usize; d_max + 2];
    for d in 1..=d_max + 1 {
        let limit = sizes[d - 1] - ranks[d - 1];
        let mut t = Vec::with_capacity(d);
        ranks[d] = crate::ffield::linalg::rank_of_generated(&f, sizes[d - 1], sizes[d], Some(limit), &caps, |j, buf| {
            let (code, mi) = (j / dim, j % dim);
            tuples.decode(code, d, &mut t);
            let tail = tuples.encode(&t[1..]);
            for &(r, a) in &inv_cols[t[0]][mi] {
                buf.push(((tail * dim) as u32 + r, a));
            }
            inner_faces(&g, &t, |i, face| {
                buf.push(((tuples.encode(face) * dim + mi) as u32, signed(&f, i, 1)));
            });
            let head = tuples.encode(&t[..d - 1]);
            buf.push(((head * dim + mi) as u32, signed(&f, d, 1)));
            merge(&f, buf);
        })?;
    }
    let dims: Vec<usize> = (0..=d_max).map(|d| sizes[d] - ranks[d] - ranks[d + 1]).collect();
    let co = coinvariants(m)?;
    if dims[0] != co.dim {
        return Err(Error::HypothesisFailed { which: "bar H_0 differs from coinvariants".into(), at: Some(0) });
    }
    Ok(HomologyReport { dims, method: Method::Bar })
}

/// Homology, using coinvariants alone when only `H_0` is asked for.
pub fn homology(m: &GModule, d_max: usize) -> Result<HomologyReport> {
    if d_max == 0 {
        return Ok(HomologyReport { dims: vec![coinvariants(m)?.dim], method: Method::CoinvariantsOnly });
    }
    bar_homology(m, d_max)
}

/// One degree of normalized bar cohomology with trivial coefficients.
#[derive(Clone)]
pub struct CohomologyDegree {
    pub degree: usize,
    /// Cocycles whose classes form a basis of `H^d`, as functions on
    /// `(G∖e)^d`.
    pub reps: Vec<Vec<Elem>>,
    /// The coboundaries `B^d`.
    pub boundaries: EchelonBasis,
    pub cocycle_dim: usize,
}

impl CohomologyDegree {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }
}

/// Bar cochains of degree `d` on `g` with coefficients in `field` (trivial
/// action).  `max_columns` bounds the number of `(d+1)`-tuples.
pub fn cohomology_degree(g: &MatGroup, field: &Field, d: usize, max_columns: usize) -> Result<CohomologyDegree> {
    let tuples = Tuples { m: g.order() - 1 };
    let (nd, nnext) = match (tuples.count(d), tuples.count(d + 1)) {
        (Some(a), Some(b)) if b <= max_columns => (a, b),
        _ => return Err(Error::ResourceCapExceeded(format!("cochains in degree {} exceed {max_columns}", d + 1))),
    };
    // the row of δ at a (d+1)-tuple t lists the d-tuples f is evaluated at
    let coboundary_row = |code: usize, k: usize, buf: &mut SparseVec, t: &mut Vec<usize>| {
        tuples.decode(code, k + 1, t);
        buf.push((tuples.encode(&t[1..]) as u32, 1));
        inner_faces(g, t, |i, face| buf.push((tuples.encode(face) as u32, signed(field, i, 1))));
        buf.push((tuples.encode(&t[..k]) as u32, signed(field, k + 1, 1)));
        merge(field, buf);
    };
    let mut t = Vec::new();
    let cocycles = kernel_of_rows(field, nd, nnext, |i, buf| coboundary_row(i, d, buf, &mut t));
    // B^d: the columns of δ: C^{d−1} → C^d, assembled from its rows
    let mut boundaries = EchelonBasis::new(field, nd);
    if d > 0 {
        let nprev = tuples.count(d - 1).unwrap();
        let mut cols: Vec<SparseVec> = vec![Vec::new(); nprev];
        let mut buf = SparseVec::new();
        for code in 0..nd {
            buf.clear();
            coboundary_row(code, d - 1, &mut buf, &mut t);
            for &(s, c) in &buf {
                cols[s as usize].push((code as u32, c));
            }
        }
        for c in &cols {
            boundaries.insert_sparse(c);
        }
    }
    let mut span = boundaries.clone();
    let mut reps = Vec::new();
    for z in &cocycles {
        if span.insert_dense(z).is_some() {
            reps.push(z.clone());
        }
    }
    Ok(CohomologyDegree { degree: d, reps, boundaries, cocycle_dim: cocycles.len() })
}

/// Dimensions of `H^d(G; k)` for `d ≤ d_max` from bar cochains.
pub fn cohomology_dims(g: &MatGroup, field: &Field, d_max: usize) -> Result<Vec<usize>> {
    (0..=d_max).map(|d| Ok(cohomology_degree(g, field, d, DEFAULT_BAR_COLUMNS)?.dim())).collect()
}

/// Pull back a cochain along a homomorphism given on indices `h → g`.
pub fn pullback(f: &[Elem], d: usize, g_order: usize, h_order: usize, map: &[usize]) -> Vec<Elem> {
    let tg = Tuples { m: g_order - 1 };
    let th = Tuples { m: h_order - 1 };
    let n = th.count(d).unwrap();
    let mut t = Vec::new();
    (0..n)
        .map(|code| {
            th.decode(code, d, &mut t);
            if t.iter().any(|&x| map[x] == 0) {
                return 0;
            }
            for x in t.iter_mut() {
                *x = map[*x];
            }
            f[tg.encode(&t)]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionReport {
    pub degree: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

/// `H^d(G) → H^d(H)` induced by a homomorphism `H → G` (given on
/// indices), through precomposition on bar cochains.
pub fn restriction_cochain_map(g: &MatGroup, h: &MatGroup, map: &[usize], field: &Field, d: usize) -> Result<RestrictionReport> {
    if map.len() != h.order() || map[h.identity()] != g.identity() {
        return Err(Error::GroupMismatch);
    }
    let cg = cohomology_degree(g, field, d, DEFAULT_BAR_COLUMNS)?;
    let ch = cohomology_degree(h, field, d, DEFAULT_BAR_COLUMNS)?;
    let mut img = ch.boundaries.clone();
    let base = img.rank();
    for a in &cg.reps {
        img.insert_dense(&pullback(a, d, g.order(), h.order(), map));
    }
    Ok(RestrictionReport { degree: d, source_dim: cg.dim(), target_dim: ch.dim(), rank: img.rank() - base })
}

/// Stable classes in `H^*(S; F_p)` for a Sylow subgroup `S`.
pub struct StableElements {
    pub sylow: MatGroup,
    pub double_cosets: usize,
    /// Per degree: the `H^d(S)` data and a basis of the stable cocycles.
    pub degrees: Vec<(CohomologyDegree, Vec<Vec<Elem>>)>,
}

impl StableElements {
    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|(_, s)| s.len()).collect()
    }
}

/// `α ∈ H^d(S)` is stable when for every double coset `SxS`,
/// `α|_{S_x} = c_x^*α|_{S_x}` with `S_x = S ∩ xSx^{-1}` and
/// `c_x(h) = x^{-1}hx`.
pub fn stable_elements(g: &MatGroup, p: u32, d_max: usize) -> Result<StableElements> {
    let field = Field::new(p, 1)?;
    let s = sylow_subgroup(g, p)?;
    let s_in_g = g.embed(&s)?;
    let mut in_s = vec![false; g.order()];
    for &x in &s_in_g {
        in_s[x] = true;
    }
    let reps = double_cosets(g, &s, &s)?;
    // (S_x, ι, c) for each representative outside S
    let mut pieces = Vec::new();
    for &x in &reps {
        if in_s[x] {
            continue;
        }
        let xi = g.inv(x);
        let members: Vec<usize> = s_in_g.iter().copied().filter(|&h| in_s[g.mul(g.mul(xi, h), x)]).collect();
        let sx = g.subgroup(&members, "S_x")?;
        let mut iota = Vec::with_capacity(sx.order());
        let mut conj = Vec::with_capacity(sx.order());
        let xm = g.element(x).clone();
        let xim = g.element(xi).clone();
        for k in 0..sx.order() {
            let h = sx.element(k);
            iota.push(s.index_of(h).ok_or(Error::GroupMismatch)?);
            conj.push(s.index_of(&xim.mul(h).mul(&xm)).ok_or(Error::GroupMismatch)?);
        }
        pieces.push((sx, iota, conj));
    }
    let mut degrees = Vec::new();
    for d in 0..=d_max {
        let cs = cohomology_degree(&s, &field, d, DEFAULT_BAR_COLUMNS)?;
        let mut columns: Vec<Vec<Elem>> = vec![Vec::new(); cs.dim()];
        for (sx, iota, conj) in &pieces {
            let bx = cohomology_degree(sx, &field, d, DEFAULT_BAR_COLUMNS)?.boundaries;
            for (k, a) in cs.reps.iter().enumerate() {
                let u = pullback(a, d, s.order(), sx.order(), iota);
                let v = pullback(a, d, s.order(), sx.order(), conj);
                let diff: Vec<Elem> = u.iter().zip(&v).map(|(&x, &y)| field.sub(x, y)).collect();
                columns[k].extend(bx.reduce(&diff));
            }
        }
        let total = columns.first().map_or(0, |c| c.len());
        let kernel = kernel_of_rows(&field, cs.dim(), total, |i, buf| {
            for (k, c) in columns.iter().enumerate() {
                if c[i] != 0 {
                    buf.push((k as u32, c[i]));
                }
            }
        });
        let stable = kernel
            .iter()
            .map(|coef| {
                let mut acc = vec![0; cs.reps.first().map_or(0, |r| r.len())];
                for (c, a) in coef.iter().zip(&cs.reps) {
                    for (x, &y) in acc.iter_mut().zip(a) {
                        *x = field.add(*x, field.mul(*c, y));
                    }
                }
                acc
            })
            .collect();
        degrees.push((cs, stable));
    }
    Ok(StableElements { sylow: s, double_cosets: reps.len(), degrees })
}

/// `dim H_d(G; F_p) = dim` of the stable subspace of `H^d(S; F_p)`.
pub fn stable_elements_homology(g: &MatGroup, p: u32, d_max: usize) -> Result<HomologyReport> {
    Ok(HomologyReport { dims: stable_elements(g, p, d_max)?.dims(), method: Method::StableElements })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub n: usize,
    pub degree: usize,
    /// Dimension of `H^d(GL_{n+1}(F_q); F_p)`.
    pub classes: usize,
    /// Order of `s^{-1}(S)` for the Sylow `S` of `GL_{n+1}`.
    pub preimage_order: usize,
    pub preimage_is_sylow: bool,
    /// Rank of the restriction to `H^d(s^{-1}(S))`.
    pub rank: usize,
    pub holds: bool,
}

/// Whether `s : GL_n → GL_{n+1}`, `g ↦ g ⊕ 1`, is zero on `H_d(−; F_p)`.
/// Dually: the stable classes of `H^d(GL_{n+1})` restrict to coboundaries
/// on `s^{-1}(S)`, which is a Sylow subgroup of `GL_n` and so detects
/// `H^d(GL_n)`.
pub fn stabilization_vanishing(field: &Field, n: usize, d: usize) -> Result<StabilizationReport> {
    let p = field.p();
    let gbig = group_make(&SubgroupSpec::full(field, n + 1))?;
    let small = group_make(&SubgroupSpec::full(field, n))?;
    let st = stable_elements(&gbig, p, d)?;
    let s = &st.sylow;
    let one = FMatrix::identity(field, 1);
    let members: Vec<usize> = (0..small.order()).filter(|&k| s.contains(&block_sum(small.element(k), &one))).collect();
    let h = small.subgroup(&members, "s^-1(S)")?;
    let sylow_order = sylow_subgroup(&small, p)?.order();
    let map: Vec<usize> = (0..h.order()).map(|k| s.index_of(&block_sum(h.element(k), &one)).unwrap()).collect();
    let coeff = Field::new(p, 1)?;
    let ch = cohomology_degree(&h, &coeff, d, DEFAULT_BAR_COLUMNS)?;
    let mut img = ch.boundaries.clone();
    let base = img.rank();
    let (_, stable) = &st.degrees[d];
    for a in stable {
        img.insert_dense(&pullback(a, d, s.order(), h.order(), &map));
    }
    let rank = img.rank() - base;
    Ok(StabilizationReport {
        n,
        degree: d,
        classes: stable.len(),
        preimage_order: h.order(),
        preimage_is_sylow: h.order() == sylow_order,
        rank,
        holds: h.order() == sylow_order && rank == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapiroReport {
    pub induced: Vec<usize>,
    pub original: Vec<usize>,
    pub holds: bool,
}

/// Compares `H_*(G; Ind_H^G M)` with `H_*(H; M)`.
pub fn shapiro_check(g: Arc<MatGroup>, m: &GModule, d_max: usize) -> Result<ShapiroReport> {
    let ind = induce_module(g, m, 1 << 16)?;
    let induced = bar_homology(&ind, d_max)?.dims;
    let original = bar_homology(m, d_max)?.dims;
    Ok(ShapiroReport { holds: induced == original, induced, original })
}

#[derive(Clone, Debug, Serialize)]
pub struct BdButReport {
    pub shape: Vec<usize>,
    pub bd_order: usize,
    pub but_order: usize,
    pub kernel_order: usize,
    pub kernel_is_p_power: bool,
    /// Both groups coincide (a single block), so nothing is computed.
    pub identical: bool,
    pub bd: Vec<usize>,
    pub but: Vec<usize>,
    pub holds: bool,
}

fn is_power_of(mut x: usize, p: usize) -> bool {
    while x > 1 && x % p == 0 {
        x /= p;
    }
    x == 1
}

/// Compares `H_*(BD; F_ℓ)` and `H_*(BUT; F_ℓ)` for a block shape.
pub fn bd_but_comparison(field: &Field, shape: &[usize], ell: u32, d_max: usize) -> Result<BdButReport> {
    let n = shape.iter().sum();
    let bd = Arc::new(group_make(&SubgroupSpec::new(field, n, SubgroupKind::BlockDiagonal(shape.to_vec())))?);
    let but = Arc::new(group_make(&SubgroupSpec::new(field, n, SubgroupKind::BlockUpper(shape.to_vec())))?);
    if !but.contains_group(&bd) {
        return Err(Error::GroupMismatch);
    }
    let kernel_order = but.order() / bd.order();
    let kernel_is_p_power = is_power_of(kernel_order, field.p() as usize);
    let identical = bd.order() == but.order();
    let k = Field::new(ell, 1)?;
    let (bdh, buth) = if identical {
        (Vec::new(), Vec::new())
    } else {
        (
            bar_homology(&GModule::trivial(bd.clone(), &k, 1), d_max)?.dims,
            bar_homology(&GModule::trivial(but.clone(), &k, 1), d_max)?.dims,
        )
    };
    Ok(BdButReport {
        shape: shape.to_vec(),
        bd_order: bd.order(),
        but_order: but.order(),
        kernel_order,
        kernel_is_p_power,
        identical,
        holds: kernel_is_p_power && bdh == buth,
        bd: bdh,
        but: buth,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SemidirectReport {
    pub q: u64,
    pub n: usize,
    pub order: usize,
    pub normal_order: usize,
    pub structure_ok: bool,
    /// Degrees `0 < d < r(p−1)` that were checked.
    pub degrees: Vec<usize>,
    pub dims: Vec<usize>,
    pub vacuous: bool,
    pub holds: bool,
}

/// `K′` (preserving a line, trivial on the quotient) is `F_q^{n−1} ⋊ F_q^×`,
/// and its `F_p`-homology vanishes in degrees `0 < d < r(p−1)`.
pub fn semidirect_vanishing_check(field: &Field, n: usize) -> Result<SemidirectReport> {
    let q = field.q() as u64;
    let l = crate::ffield::Subspace::coordinate(field, n, &[0]);
    let k = Arc::new(group_make(&SubgroupSpec::new(field, n, SubgroupKind::KPrime { l }))?);
    // the normal subgroup: also trivial on the line
    let normal: Vec<usize> = (0..k.order()).filter(|&x| k.element(x).get(0, 0) == 1).collect();
    let nsub = k.subgroup(&normal, "N")?;
    let p = field.p();
    let abelian = (0..nsub.order()).all(|a| (0..nsub.order()).all(|b| nsub.mul(a, b) == nsub.mul(b, a)));
    let exponent_p = (0..nsub.order()).all(|a| nsub.element_order(a) <= p as usize);
    let is_normal = normal.iter().all(|&x| {
        (0..k.order()).all(|g| {
            let c = k.mul(k.mul(k.inv(g), x), g);
            k.element(c).get(0, 0) == 1
        })
    });
    // complement: diag(a, 1, …, 1), cyclic of order q − 1
    let torus: Vec<usize> = (0..k.order())
        .filter(|&x| {
            let m = k.element(x);
            (0..n).all(|i| (0..n).all(|j| i == j && i > 0 && m.get(i, j) == 1 || i != j && m.get(i, j) == 0 || i == 0 && j == 0))
        })
        .collect();
    let cyclic = torus.iter().any(|&x| k.element_order(x) == q as usize - 1);
    let structure_ok = abelian
        && exponent_p
        && is_normal
        && nsub.order() as u64 == q.pow(n as u32 - 1)
        && torus.len() as u64 == q - 1
        && cyclic
        && k.order() == nsub.order() * torus.len();
    let top = field.r() as usize * (p as usize - 1);
    let degrees: Vec<usize> = (1..top).collect();
    let vacuous = degrees.is_empty();
    let dims = if vacuous {
        Vec::new()
    } else {
        bar_homology(&GModule::trivial(k.clone(), &Field::new(p, 1)?, 1), top - 1)?.dims
    };
    let holds = structure_ok && degrees.iter().all(|&d| dims[d] == 0);
    Ok(SemidirectReport { q, n, order: k.order(), normal_order: nsub.order(), structure_ok, degrees, dims, vacuous, holds })
}

#[derive(Clone, Debug, Serialize)]
pub struct E1VanishingReport {
    pub q: u64,
    pub n: usize,
    pub p: u32,
    pub module_dim: usize,
    pub dims: Vec<usize>,
    /// Vanishing is expected for `d < range_end = r(p−1) − 1`.
    pub range_end: usize,
    pub holds: bool,
}

/// `H_d(GL_n(F_q); St^{E_1}(F_q^n) ⊗ F_p)` for `d ≤ d_max`, checked to vanish
/// for `d < r(p−1) − 1`.  For `q = 2` the range is empty and only values are
/// reported.
pub fn e1_steinberg_vanishing(field: &Field, n: usize, d_max: usize) -> Result<E1VanishingReport> {
    let p = field.p();
    let coeff = Field::new(p, 1)?;
    let g = Arc::new(crate::glgroup::gl(field, n)?);
    let st = crate::steinberg::steinberg(field, n, &crate::steinberg::SteinbergWhich::E1, g, &coeff)?;
    let dims = homology(&st.module, d_max)?.dims;
    let range_end = (field.r() as usize * (p as usize - 1)).saturating_sub(1);
    let holds = dims.iter().take(range_end).all(|&x| x == 0);
    Ok(E1VanishingReport { q: field.q() as u64, n, p, module_dim: st.module.dim(), dims, range_end, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glgroup::gl;
    use crate::steinberg::{steinberg, SteinbergWhich};

    fn fq(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    fn cyclic_perm_group(k: usize) -> MatGroup {
        // the k-cycle permutation matrix over F_2 generates Z/k
        let f2 = fq(2);
        let perm: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        let c = FMatrix::permutation(&f2, &perm);
        MatGroup::generated(&f2, k, &[c], 1000, "Z/k").unwrap()
    }

    #[test]
    fn cyclic_groups() {
        let f2 = fq(2);
        let z2 = Arc::new(cyclic_perm_group(2));
        assert_eq!(bar_homology(&GModule::trivial(z2.clone(), &f2, 1), 5).unwrap().dims, vec![1; 6]);
        assert_eq!(cohomology_dims(&z2, &f2, 5).unwrap(), vec![1; 6]);
        let z3 = Arc::new(cyclic_perm_group(3));
        assert_eq!(bar_homology(&GModule::trivial(z3.clone(), &f2, 1), 3).unwrap().dims, vec![1, 0, 0, 0]);
        assert_eq!(bar_homology(&GModule::trivial(z3, &fq(3), 1), 3).unwrap().dims, vec![1; 4]);
    }

    #[test]
    fn gl2_f2() {
        let f2 = fq(2);
        let g = Arc::new(gl(&f2, 2).unwrap());
        let triv = GModule::trivial(g.clone(), &f2, 1);
        assert_eq!(bar_homology(&triv, 4).unwrap().dims, vec![1; 5]);
        assert_eq!(bar_homology(&GModule::trivial(g.clone(), &fq(3), 1), 1).unwrap().dims[1], 0);
        let st = steinberg(&f2, 2, &SteinbergWhich::St, g.clone(), &f2).unwrap().module;
        assert_eq!(coinvariants(&st).unwrap().dim, 0);
        assert_eq!(bar_homology(&st, 3).unwrap().dims, vec![0; 4]);
        let st3 = steinberg(&f2, 2, &SteinbergWhich::St, g.clone(), &fq(3)).unwrap().module;
        assert_eq!(coinvariants(&st3).unwrap().dim, 0);
        // trivial module: coinvariants are everything
        assert_eq!(coinvariants(&GModule::trivial(g, &f2, 3)).unwrap().dim, 3);
    }

    #[test]
    fn dual_dimensions_and_transfer() {
        let f2 = fq(2);
        for g in [gl(&f2, 2).unwrap(), gl(&fq(3), 2).unwrap()] {
            let g = Arc::new(g);
            let h = bar_homology(&GModule::trivial(g.clone(), &f2, 1), 2).unwrap().dims;
            assert_eq!(cohomology_dims(&g, &f2, 2).unwrap(), h);
            let s = sylow_subgroup(&g, 2).unwrap();
            let hs = cohomology_dims(&s, &f2, 2).unwrap();
            assert!(h.iter().zip(&hs).all(|(a, b)| a <= b));
            assert_eq!(stable_elements_homology(&g, 2, 2).unwrap().dims, h);
        }
    }

    #[test]
    fn restriction_examples() {
        let f2 = fq(2);
        let g = gl(&f2, 2).unwrap();
        let id: Vec<usize> = (0..g.order()).collect();
        let r = restriction_cochain_map(&g, &g, &id, &f2, 2).unwrap();
        assert_eq!((r.source_dim, r.rank), (1, 1));
        let z4 = cyclic_perm_group(4);
        let sq = z4.mul(z4.generators()[0], z4.generators()[0]);
        let z2 = z4.subgroup(&[0, sq], "Z/2").unwrap();
        let map = z4.embed(&z2).unwrap();
        let r = restriction_cochain_map(&z4, &z2, &map, &f2, 1).unwrap();
        assert_eq!((r.source_dim, r.target_dim), (1, 1));
        // restriction of H^1(Z/4) to Z/2 vanishes in degree 1 but the
        // degree-2 class restricts nontrivially
        assert_eq!(r.rank, 0);
        let r2 = restriction_cochain_map(&z4, &z2, &map, &f2, 2).unwrap();
        assert_eq!(r2.rank, 1);
        // injective to a Sylow subgroup
        let g3 = gl(&fq(3), 2).unwrap();
        let s = sylow_subgroup(&g3, 2).unwrap();
        let map = g3.embed(&s).unwrap();
        for d in 1..=2 {
            let r = restriction_cochain_map(&g3, &s, &map, &f2, d).unwrap();
            assert_eq!(r.rank, r.source_dim);
        }
    }

    #[test]
    fn gl3_f2_stable_elements() {
        let g = gl(&fq(2), 3).unwrap();
        let st = stable_elements(&g, 2, 3).unwrap();
        assert_eq!(st.sylow.order(), 8);
        assert_eq!(st.dims(), vec![1, 0, 1, 2]);
    }

    #[test]
    fn shapiro_fixtures() {
        let f2 = fq(2);
        let z2 = Arc::new(cyclic_perm_group(2));
        let e = Arc::new(z2.subgroup(&[0], "e").unwrap());
        let r = shapiro_check(z2.clone(), &GModule::trivial(e, &f2, 1), 3).unwrap();
        assert!(r.holds);
        assert_eq!(r.induced, vec![1, 0, 0, 0]);
        let r = shapiro_check(z2.clone(), &GModule::trivial(z2, &f2, 1), 3).unwrap();
        assert!(r.holds);
        let g = Arc::new(gl(&f2, 2).unwrap());
        let s = Arc::new(sylow_subgroup(&g, 2).unwrap());
        let r = shapiro_check(g, &GModule::trivial(s, &f2, 1), 3).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.original, vec![1; 4]);
    }

    #[test]
    fn bd_but_examples() {
        let r = bd_but_comparison(&fq(2), &[1, 1], 3, 3).unwrap();
        assert_eq!((r.bd_order, r.but_order), (1, 2));
        assert!(r.holds);
        assert_eq!(r.bd, vec![1, 0, 0, 0]);
        let r = bd_but_comparison(&fq(3), &[1, 1], 2, 2).unwrap();
        assert_eq!((r.bd_order, r.but_order, r.kernel_order), (4, 12, 3));
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn semidirect_examples() {
        let r = semidirect_vanishing_check(&fq(3), 2).unwrap();
        assert_eq!((r.order, r.normal_order), (6, 3));
        assert!(r.structure_ok && r.holds && !r.vacuous);
        let r = semidirect_vanishing_check(&fq(4), 2).unwrap();
        assert_eq!(r.order, 12);
        assert!(r.holds);
        let r = semidirect_vanishing_check(&fq(2), 3).unwrap();
        assert!(r.vacuous && r.holds);
    }

    #[test]
    fn e1_vanishing_examples() {
        let r = e1_steinberg_vanishing(&fq(3), 2, 0).unwrap();
        assert_eq!((r.module_dim, r.range_end), (11, 1));
        assert!(r.holds && r.dims == vec![0]);
        let r = e1_steinberg_vanishing(&fq(2), 2, 1).unwrap();
        assert_eq!(r.range_end, 0);
        assert!(r.holds);
    }

    #[test]
    fn projectivity_small() {
        let f3 = fq(3);
        let g = Arc::new(gl(&f3, 2).unwrap());
        let st = steinberg(&f3, 2, &SteinbergWhich::St, g, &f3).unwrap().module;
        assert_eq!(bar_homology(&st, 1).unwrap().dims, vec![0, 0]);
    }

    #[test]
    fn stabilization() {
        let f2 = fq(2);
        let got: Vec<(usize, usize, bool)> = [(2, 1), (2, 2), (3, 1), (3, 2)]
            .into_iter()
            .map(|(n, d)| {
                let r = stabilization_vanishing(&f2, n, d).unwrap();
                assert!(r.preimage_is_sylow);
                (r.classes, r.rank, r.holds)
            })
            .collect();
        // GL_2 → GL_3 is injective on H_2; GL_3 → GL_4 kills it
        assert_eq!(got, [(0, 0, true), (1, 1, false), (0, 0, true), (1, 0, true)]);
    }
}
