//! Perspectivity, independence and the related structure of lattices with
//! zero, chiefly sectionally complemented modular ones.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::congruence::{congruence_generated, principal_congruence, quotient_lattice, Congruence};
use crate::dimension::{dimension_monoid, DeltaTable, DimensionMonoid};
use crate::error::{Error, Result};
use crate::lattice::{interval_sublattice, FiniteLattice, Interval};
use crate::primitive::{DimVector, ExtNat};

/// `a ∼ b` with axis `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PerspectivityWitness {
    pub a: usize,
    pub b: usize,
    pub axis: usize,
}

pub fn perspective(l: &FiniteLattice, a: usize, b: usize) -> Option<PerspectivityWitness> {
    l.elements()
        .find(|&x| l.meet(a, x) == l.meet(b, x) && l.join(a, x) == l.join(b, x))
        .map(|axis| PerspectivityWitness { a, b, axis })
}

/// An `n`-diamond `a_0, …, a_{n-1}, e` with its bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diamond {
    pub entries: Vec<usize>,
    pub e: usize,
    pub bottom: usize,
    pub top: usize,
}

impl Diamond {
    pub fn is_trivial(&self) -> bool {
        self.bottom == self.top
    }
}

/// Independent sequence pairwise perspective to its first entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousSequence {
    pub entries: Vec<usize>,
    pub top: usize,
}

fn require_scm(l: &FiniteLattice) -> Result<()> {
    if !l.is_modular() {
        return Err(Error::NotModular);
    }
    if !l.is_sectionally_complemented() {
        return Err(Error::Precondition("sectionally complemented"));
    }
    Ok(())
}

fn square(n: usize) -> Vec<bool> {
    vec![false; n * n]
}

/// The binary relations of the theory, as `n × n` tables.
#[derive(Clone, Debug)]
pub struct Relations {
    n: usize,
    pub perspective: Vec<bool>,
    pub projective: Vec<bool>,
    pub subperspective: Vec<bool>,
    /// Only for sectionally complemented modular lattices.
    pub perspective_by_decomposition: Option<Vec<bool>>,
    pub projective_by_decomposition: Option<Vec<bool>>,
}

impl Relations {
    pub fn persp(&self, a: usize, b: usize) -> bool {
        self.perspective[a * self.n + b]
    }

    pub fn proj(&self, a: usize, b: usize) -> bool {
        self.projective[a * self.n + b]
    }

    pub fn subpersp(&self, a: usize, b: usize) -> bool {
        self.subperspective[a * self.n + b]
    }

    pub fn persp_dec(&self, a: usize, b: usize) -> Option<bool> {
        self.perspective_by_decomposition.as_ref().map(|t| t[a * self.n + b])
    }

    pub fn proj_dec(&self, a: usize, b: usize) -> Option<bool> {
        self.projective_by_decomposition.as_ref().map(|t| t[a * self.n + b])
    }
}

pub fn perspectivity_table(l: &FiniteLattice) -> Vec<bool> {
    let n = l.len();
    let mut t = square(n);
    for a in 0..n {
        for b in a..n {
            if perspective(l, a, b).is_some() {
                t[a * n + b] = true;
                t[b * n + a] = true;
            }
        }
    }
    t
}

fn transitive_closure(n: usize, t: &[bool]) -> Vec<bool> {
    let mut c = t.to_vec();
    for k in 0..n {
        for i in 0..n {
            if c[i * n + k] {
                for j in 0..n {
                    if c[k * n + j] {
                        c[i * n + j] = true;
                    }
                }
            }
        }
    }
    c
}

/// Pairs `(⊕a_i, ⊕b_i)` of independent decompositions with `related(a_i, b_i)`,
/// using at most `max_len` summands.
fn by_decomposition(l: &FiniteLattice, related: &[bool], max_len: usize) -> Vec<bool> {
    let n = l.len();
    let zero = l.bottom();
    let pairs: Vec<(usize, usize)> = (0..n * n).filter(|&i| related[i]).map(|i| (i / n, i % n)).collect();
    let mut reached = square(n);
    reached[zero * n + zero] = true;
    let mut frontier = vec![(zero, zero)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &(x, y) in &frontier {
            for &(a, b) in &pairs {
                if l.meet(a, x) == zero && l.meet(b, y) == zero {
                    let (u, v) = (l.join(a, x), l.join(b, y));
                    if !reached[u * n + v] {
                        reached[u * n + v] = true;
                        next.push((u, v));
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    reached
}

pub fn relations_suite(l: &FiniteLattice) -> Relations {
    let n = l.len();
    let perspective = perspectivity_table(l);
    let projective = transitive_closure(n, &perspective);
    let mut subperspective = square(n);
    for a in 0..n {
        for b in 0..n {
            subperspective[a * n + b] = l.down_set(b).ones().any(|y| perspective[a * n + y]);
        }
    }
    let scm = require_scm(l).is_ok();
    let h = l.height().max(1);
    Relations {
        n,
        perspective_by_decomposition: scm.then(|| by_decomposition(l, &perspective, h)),
        projective_by_decomposition: scm.then(|| by_decomposition(l, &projective, h)),
        perspective,
        projective,
        subperspective,
    }
}

/// Inclusions among the relations, both characterizations of `≲`, and `≊`
/// against equality of dimensions.
pub fn relations_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let r = relations_suite(l);
    let d = dimension_monoid(l);
    let t = d.delta_table();
    let z = l.bottom();
    let name = |x: usize| l.name(x).to_string();
    for a in l.elements() {
        if !r.persp(a, a) {
            return Err(Error::mismatch("perspectivity reflexive", vec![name(a)]));
        }
        for b in l.elements() {
            let chain = [r.persp(a, b), r.persp_dec(a, b).unwrap(), r.proj_dec(a, b).unwrap()];
            if chain[0] && !chain[1] || chain[1] && !chain[2] || r.proj(a, b) && !chain[2] {
                return Err(Error::mismatch("relation inclusions", vec![name(a), name(b)]));
            }
            if r.persp(a, b) != r.persp(b, a) {
                return Err(Error::mismatch("perspectivity symmetric", vec![name(a), name(b)]));
            }
            let up = l.up_set(a).ones().any(|x| r.persp(x, b));
            if up != r.subpersp(a, b) {
                return Err(Error::mismatch("subperspectivity", vec![name(a), name(b)]));
            }
            if chain[2] != (t.get(z, a) == t.get(z, b)) {
                return Err(Error::mismatch("projectivity by decomposition", vec![name(a), name(b)]));
            }
        }
    }
    Ok(format!("{} elements", l.len()))
}

fn independent_inductive(l: &FiniteLattice, seq: &[usize]) -> bool {
    let mut acc = l.bottom();
    for &a in seq {
        if l.meet(a, acc) != l.bottom() {
            return false;
        }
        acc = l.join(acc, a);
    }
    true
}

fn independent_full(l: &FiniteLattice, seq: &[usize]) -> bool {
    let k = seq.len();
    let joins: Vec<usize> =
        (0..1usize << k).map(|m| l.join_all((0..k).filter(|i| m >> i & 1 == 1).map(|i| seq[i]))).collect();
    (0..1usize << k).all(|x| (0..1usize << k).all(|y| l.meet(joins[x], joins[y]) == joins[x & y]))
}

/// Independence of a finite sequence; the inductive criterion when `L` is
/// modular, the subset-homomorphism definition otherwise.
pub fn independent(l: &FiniteLattice, seq: &[usize]) -> bool {
    if l.is_modular() {
        independent_inductive(l, seq)
    } else {
        independent_full(l, seq)
    }
}

/// Longest homogeneous sequence below `x` starting at `start`.
fn homogeneous_from(l: &FiniteLattice, persp: &[bool], start: usize, x: usize) -> HomogeneousSequence {
    let n = l.len();
    let zero = l.bottom();
    let partners: Vec<usize> = l.down_set(x).ones().filter(|&y| y != zero && persp[start * n + y]).collect();
    // best sequence reaching each partial join
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut level = vec![(start, vec![start])];
    let mut best = level[0].1.clone();
    while !level.is_empty() {
        let mut next = Vec::new();
        for (j, seq) in &level {
            for &y in &partners {
                if l.meet(y, *j) == zero {
                    let u = l.join(y, *j);
                    if !seen[u] {
                        seen[u] = true;
                        let mut s = seq.clone();
                        s.push(y);
                        next.push((u, s));
                    }
                }
            }
        }
        if let Some((_, s)) = next.first() {
            best = s.clone();
        }
        level = next;
    }
    let top = l.join_all(best.iter().copied());
    HomogeneousSequence { entries: best, top }
}

/// Longest nontrivial homogeneous sequence below `x`.
pub fn longest_homogeneous(l: &FiniteLattice, persp: &[bool], x: usize) -> Option<HomogeneousSequence> {
    l.down_set(x).ones().filter(|&a| a != l.bottom()).map(|a| homogeneous_from(l, persp, a, x)).fold(
        None,
        |best: Option<HomogeneousSequence>, s| match best {
            Some(b) if b.entries.len() >= s.entries.len() => Some(b),
            _ => Some(s),
        },
    )
}

/// `Ind_L(x)`; zero for `x = 0`.
pub fn lattice_index(l: &FiniteLattice, x: usize) -> u64 {
    let persp = perspectivity_table(l);
    longest_homogeneous(l, &persp, x).map_or(0, |s| s.entries.len() as u64)
}

/// `Ind_L(x) = Ind(Δ(x))` for every `x`.
pub fn index_equality_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let persp = perspectivity_table(l);
    let d = dimension_monoid(l);
    for x in l.elements() {
        let ours = longest_homogeneous(l, &persp, x).map_or(0, |s| s.entries.len() as u64);
        let theirs = d.qo.index(&d.delta(l.bottom(), x));
        if ExtNat::fin(ours) != theirs {
            return Err(Error::mismatch(
                "index",
                vec![l.name(x).into(), format!("lattice {ours}"), format!("monoid {theirs}")],
            ));
        }
    }
    Ok(format!("{} elements", l.len()))
}

/// A nontrivial `m`-diamond with bounds `u < w`, if any.
pub fn find_diamond(l: &FiniteLattice, m: usize, u: usize, w: usize) -> Option<Diamond> {
    if m < 2 || u == w {
        return None;
    }
    fn extend(
        l: &FiniteLattice,
        cands: &[usize],
        u: usize,
        w: usize,
        m: usize,
        acc: usize,
        seq: &mut Vec<usize>,
    ) -> bool {
        if seq.len() == m {
            return acc == w;
        }
        let from = seq.last().map_or(0, |&last| cands.iter().position(|&c| c == last).unwrap() + 1);
        for &c in &cands[from..] {
            if l.meet(c, acc) == u {
                seq.push(c);
                if extend(l, cands, u, w, m, l.join(acc, c), seq) {
                    return true;
                }
                seq.pop();
            }
        }
        false
    }
    for e in l.interval_elements(u, w) {
        let cands = l.complements_in(e, u, w);
        if cands.len() < m {
            continue;
        }
        let mut seq = Vec::new();
        if extend(l, &cands, u, w, m, u, &mut seq) {
            return Some(Diamond { entries: seq, e, bottom: u, top: w });
        }
    }
    None
}

fn first_diamond(l: &FiniteLattice, m: usize) -> Option<Diamond> {
    l.elements()
        .flat_map(|u| l.up_set(u).ones().map(move |w| (u, w)).collect::<Vec<_>>())
        .find_map(|(u, w)| find_diamond(l, m, u, w))
}

/// Multisets of size `k` over `0..n`.
fn for_each_multiset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if !go(n, k, i, cur, f) {
                return false;
            }
            cur.pop();
        }
        true
    }
    go(n, k, 0, &mut Vec::new(), f)
}

/// First `(x, y_0..y_n)` violating the `n`-distributive identity.
pub fn n_distributive_witness(l: &FiniteLattice, n: usize) -> Option<Vec<usize>> {
    let mut found = None;
    for_each_multiset(l.len(), n + 1, &mut |ys| {
        let lhs_meet = l.meet_all(ys.iter().copied());
        let partial: Vec<usize> = (0..ys.len())
            .map(|i| l.meet_all(ys.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &y)| y)))
            .collect();
        for x in l.elements() {
            let lhs = l.join(x, lhs_meet);
            let rhs = l.meet_all(partial.iter().map(|&p| l.join(x, p)));
            if lhs != rhs {
                let mut w = vec![x];
                w.extend_from_slice(ys);
                found = Some(w);
                return false;
            }
        }
        true
    });
    found
}

/// `n`-distributivity by the identity, by diamonds, and (sectionally
/// complemented case) by homogeneous sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NDistributivity {
    pub n: usize,
    pub identity: bool,
    pub diamonds: Option<bool>,
    pub homogeneous: Option<bool>,
    pub identity_witness: Option<Vec<usize>>,
    pub diamond: Option<Diamond>,
}

impl NDistributivity {
    pub fn agree(&self) -> bool {
        [self.diamonds, self.homogeneous].iter().flatten().all(|&b| b == self.identity)
    }
}

pub fn n_distributive(l: &FiniteLattice, n: usize) -> NDistributivity {
    let identity_witness = n_distributive_witness(l, n);
    let modular = l.is_modular();
    let diamond = if modular { first_diamond(l, n + 1) } else { None };
    let homogeneous = require_scm(l).is_ok().then(|| lattice_index(l, l.top()) <= n as u64);
    NDistributivity {
        n,
        identity: identity_witness.is_none(),
        diamonds: modular.then_some(diamond.is_none()),
        homogeneous,
        identity_witness,
        diamond,
    }
}

/// All available methods agree for `1 ≤ n ≤ max_n`.
pub fn n_distributive_check(l: &FiniteLattice, max_n: usize) -> Result<String> {
    if !l.is_modular() {
        return Err(Error::NotModular);
    }
    let mut least = None;
    for n in 1..=max_n {
        let r = n_distributive(l, n);
        if !r.agree() {
            return Err(Error::mismatch(
                "n-distributivity methods",
                vec![
                    format!("n = {n}"),
                    format!("identity {}", r.identity),
                    format!("diamonds {:?}", r.diamonds),
                    format!("homogeneous {:?}", r.homogeneous),
                ],
            ));
        }
        if r.identity && least.is_none() {
            least = Some(n);
        }
    }
    Ok(match least {
        Some(n) => format!("{n}-distributive"),
        None => format!("not {max_n}-distributive"),
    })
}

/// Normality of `L` and of each closed interval.
pub fn normality_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    if let Some((x, y)) = normality_witness(l) {
        return Err(Error::mismatch("normal", vec![l.name(x).into(), l.name(y).into()]));
    }
    if let Some(iv) = is_locally_normal(l) {
        return Err(Error::mismatch("normal interval", vec![l.name(iv.lower).into(), l.name(iv.upper).into()]));
    }
    Ok("normal".into())
}

/// First pair `x ≈ y`, `x ∧ y = 0`, that is not perspective.
pub fn normality_witness(l: &FiniteLattice) -> Option<(usize, usize)> {
    let r = relations_suite(l);
    let z = l.bottom();
    l.elements()
        .flat_map(|x| l.elements().map(move |y| (x, y)))
        .find(|&(x, y)| l.meet(x, y) == z && r.proj(x, y) && !r.persp(x, y))
}

pub fn is_normal(l: &FiniteLattice) -> bool {
    normality_witness(l).is_none()
}

/// Normality of every closed interval.
pub fn is_locally_normal(l: &FiniteLattice) -> Option<Interval> {
    for a in l.elements() {
        for b in l.up_set(a).ones() {
            let iv = Interval { lower: a, upper: b };
            if !is_normal(&interval_sublattice(l, iv).0) {
                return Some(iv);
            }
        }
    }
    None
}

fn zero_class(l: &FiniteLattice, c: &Congruence) -> Vec<usize> {
    l.elements().filter(|&x| c.same(l.bottom(), x)).collect()
}

/// `nor L`: the `x` whose neutral ideal is normal.
pub fn normal_kernel(l: &FiniteLattice) -> Vec<usize> {
    l.elements()
        .filter(|&x| {
            let ideal = zero_class(l, &principal_congruence(l, l.bottom(), x));
            let t = l.join_all(ideal);
            is_normal(&interval_sublattice(l, Interval { lower: l.bottom(), upper: t }).0)
        })
        .collect()
}

/// First entries of homogeneous sequences of length `m`.
pub fn homogeneous_starts(l: &FiniteLattice, m: usize) -> Vec<usize> {
    let persp = perspectivity_table(l);
    l.elements().filter(|&a| a == l.bottom() || m <= homogeneous_from(l, &persp, a, l.top()).entries.len()).collect()
}

/// `mL`: the neutral ideal generated by `homogeneous_starts(L, m)`.
pub fn m_ideal(l: &FiniteLattice, m: usize) -> Vec<usize> {
    let pairs: Vec<(usize, usize)> = homogeneous_starts(l, m).into_iter().map(|a| (l.bottom(), a)).collect();
    zero_class(l, &congruence_generated(l, &pairs))
}

/// `⟨m⟩L`: generated by `(0_δ, 1_δ)` over all `m`-diamonds.
pub fn diam_congruence(l: &FiniteLattice, m: usize) -> Congruence {
    let mut pairs = Vec::new();
    for u in l.elements() {
        for w in l.up_set(u).ones() {
            if find_diamond(l, m, u, w).is_some() {
                pairs.push((u, w));
            }
        }
    }
    congruence_generated(l, &pairs)
}

/// `x ∈ mL` iff `x ≡ 0 (mod ⟨m⟩L)` for `2 ≤ m ≤ max_m`.
pub fn diam_ideal_check(l: &FiniteLattice, max_m: usize) -> Result<String> {
    require_scm(l)?;
    for m in 2..=max_m {
        let ideal = m_ideal(l, m);
        let zc = zero_class(l, &diam_congruence(l, m));
        if ideal != zc {
            return Err(Error::mismatch("diamond ideal", vec![format!("m = {m}")]));
        }
    }
    Ok(format!("m ≤ {max_m}"))
}

/// `4L ⊆ nor L` and `L/nor L` is 3-distributive.
pub fn normal_kernel_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let nor = normal_kernel(l);
    let four = m_ideal(l, 4);
    if let Some(&x) = four.iter().find(|x| !nor.contains(x)) {
        return Err(Error::mismatch("4L in nor L", vec![l.name(x).into()]));
    }
    let pairs: Vec<(usize, usize)> = nor.iter().map(|&x| (l.bottom(), x)).collect();
    let q = quotient_lattice(l, &congruence_generated(l, &pairs));
    if let Some(w) = n_distributive_witness(&q.lattice, 3) {
        return Err(Error::mismatch(
            "quotient 3-distributive",
            w.iter().map(|&x| q.lattice.name(x).to_string()).collect(),
        ));
    }
    Ok(format!("|nor L| = {}, |4L| = {}", nor.len(), four.len()))
}

/// Geometry context shared by the decomposition searches.
struct Ctx<'a> {
    l: &'a FiniteLattice,
    persp: Vec<bool>,
    table: DeltaTable,
    dim: DimensionMonoid<'a>,
}

impl<'a> Ctx<'a> {
    fn new(l: &'a FiniteLattice) -> Self {
        let dim = dimension_monoid(l);
        Ctx { l, persp: perspectivity_table(l), table: dim.delta_table(), dim }
    }

    fn persp(&self, a: usize, b: usize) -> bool {
        self.persp[a * self.l.len() + b]
    }

    fn dim_of(&self, x: usize) -> &DimVector {
        self.table.get(self.l.bottom(), x)
    }

    /// Elements below `a` with `a` first, then by decreasing height.
    fn candidates(&self, a: usize, ranks: &[usize]) -> Vec<usize> {
        let mut below: Vec<usize> = self.l.down_set(a).ones().filter(|&x| x != a).collect();
        below.sort_by_key(|&x| (std::cmp::Reverse(ranks[x]), x));
        std::iter::once(a).chain(below).collect()
    }

    fn two_piece(&self, a: usize, b: usize, ranks: &[usize]) -> Option<(usize, usize, usize, usize)> {
        let l = self.l;
        let z = l.bottom();
        if self.dim_of(a) != self.dim_of(b) {
            return None;
        }
        for a0 in self.candidates(a, ranks) {
            for a1 in l.complements_in(a0, z, a) {
                for b0 in l.down_set(b).ones().filter(|&b0| self.persp(a0, b0)) {
                    if let Some(b1) = l.complements_in(b0, z, b).into_iter().find(|&b1| self.persp(a1, b1)) {
                        return Some((a0, a1, b0, b1));
                    }
                }
            }
        }
        None
    }
}

/// `a = a0 ⊕ a1`, `b = b0 ⊕ b1` with `a0 ∼ b0`, `a1 ∼ b1`, when `Δ(a) = Δ(b)`.
pub fn two_piece_decomposition(l: &FiniteLattice, a: usize, b: usize) -> Option<(usize, usize, usize, usize)> {
    Ctx::new(l).two_piece(a, b, &l.ranks())
}

/// A decomposition for every pair of equal dimension, none otherwise.
pub fn two_piece_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let ctx = Ctx::new(l);
    let ranks = l.ranks();
    let mut found = 0;
    for a in l.elements() {
        for b in l.elements() {
            let equal = ctx.dim_of(a) == ctx.dim_of(b);
            let got = ctx.two_piece(a, b, &ranks);
            if equal != got.is_some() {
                return Err(Error::mismatch("two-piece decomposition", vec![l.name(a).into(), l.name(b).into()]));
            }
            if let Some((a0, a1, b0, b1)) = got {
                let ok = l.join(a0, a1) == a
                    && l.meet(a0, a1) == l.bottom()
                    && l.join(b0, b1) == b
                    && l.meet(b0, b1) == l.bottom()
                    && ctx.persp(a0, b0)
                    && ctx.persp(a1, b1);
                if !ok {
                    return Err(Error::mismatch("two-piece witness", vec![l.name(a).into(), l.name(b).into()]));
                }
                found += 1;
            }
        }
    }
    Ok(format!("{found} pairs decomposed"))
}

/// First `a ∼ b ∼ c` with `a ≁ c`.
pub fn transitivity_witness(l: &FiniteLattice) -> Option<(usize, usize, usize)> {
    let n = l.len();
    let t = perspectivity_table(l);
    for a in 0..n {
        for b in (0..n).filter(|&b| t[a * n + b]) {
            if let Some(c) = (0..n).find(|&c| t[b * n + c] && !t[a * n + c]) {
                return Some((a, b, c));
            }
        }
    }
    None
}

/// Transitive perspectivity against a cancellative dimension monoid.
pub fn transitivity_cancellativity_check(l: &FiniteLattice) -> Result<String> {
    if !l.is_modular() {
        return Err(Error::NotModular);
    }
    if !l.is_relatively_complemented() {
        return Err(Error::Precondition("relatively complemented"));
    }
    let transitive = transitivity_witness(l).is_none();
    let d = dimension_monoid(l);
    let free = d.qo.is_antichain() && d.qo.p0().is_empty();
    let cancellative = d.qo.cancellation_witness(3)?.is_none();
    if transitive != free || free != cancellative {
        return Err(Error::mismatch(
            "transitivity and cancellativity",
            vec![
                format!("transitive = {transitive}"),
                format!("antichain = {free}"),
                format!("cancellative = {cancellative}"),
            ],
        ));
    }
    Ok(format!("transitive = {transitive}"))
}

/// Atoms grouped into components: `p`, `q` are linked when `p ∨ q` lies
/// above a third atom.
pub fn atom_components(l: &FiniteLattice) -> Vec<Vec<usize>> {
    let atoms = l.atoms();
    let mut comp: Vec<usize> = (0..atoms.len()).collect();
    fn find(c: &mut [usize], mut x: usize) -> usize {
        while c[x] != x {
            c[x] = c[c[x]];
            x = c[x];
        }
        x
    }
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            let k = l.join(atoms[i], atoms[j]);
            if atoms.iter().any(|&r| r != atoms[i] && r != atoms[j] && l.leq(r, k)) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &a) in atoms.iter().enumerate() {
        groups.entry(find(&mut comp, i)).or_default().push(a);
    }
    groups.into_values().collect()
}

/// `D(x)_i = height(x ∧ s_i)` against `Δ(x)` for geometric modular `L`.
pub fn geometric_dimension_check(l: &FiniteLattice) -> Result<String> {
    if !l.is_modular() {
        return Err(Error::NotModular);
    }
    if !l.is_atomistic() {
        return Err(Error::Precondition("atomistic"));
    }
    let comps = atom_components(l);
    let tops: Vec<usize> = comps.iter().map(|c| l.join_all(c.iter().copied())).collect();
    let ranks = l.ranks();
    let d = dimension_monoid(l);
    let points: Vec<BTreeSet<usize>> =
        comps.iter().map(|c| c.iter().map(|&p| d.point_of(l.bottom(), p).unwrap()).collect()).collect();
    if points.iter().any(|s| s.len() != 1) || d.qo.len() != comps.len() {
        return Err(Error::mismatch(
            "geometric components",
            vec![format!("{} components, |P| = {}", comps.len(), d.qo.len())],
        ));
    }
    let point: Vec<usize> = points.iter().map(|s| *s.iter().next().unwrap()).collect();
    for x in l.elements() {
        let v = d.delta(l.bottom(), x);
        for (i, &s) in tops.iter().enumerate() {
            if v[point[i]] != ExtNat::fin(ranks[l.meet(x, s)] as u64) {
                return Err(Error::mismatch("geometric dimension", vec![l.name(x).into()]));
            }
        }
    }
    Ok(format!("{} components", comps.len()))
}

/// Sums of perspective independent pairs stay perspective, and a common
/// independent summand cancels.
pub fn additivity_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let n = l.len();
    let z = l.bottom();
    let t = perspectivity_table(l);
    let p = |a: usize, b: usize| t[a * n + b];
    let name = |x: usize| l.name(x).to_string();
    let pairs: Vec<(usize, usize)> = (0..n * n).filter(|&i| t[i]).map(|i| (i / n, i % n)).collect();
    for &(a0, b0) in &pairs {
        for &(a1, b1) in &pairs {
            if l.meet(l.join(a0, b0), l.join(a1, b1)) == z && !p(l.join(a0, a1), l.join(b0, b1)) {
                return Err(Error::mismatch("additivity", vec![name(a0), name(b0), name(a1), name(b1)]));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if l.meet(a, b) != z {
                continue;
            }
            let ab = l.join(a, b);
            for c in (0..n).filter(|&c| l.meet(c, ab) == z) {
                if p(a, b) != p(l.join(a, c), l.join(b, c)) {
                    return Err(Error::mismatch("cancellation of summands", vec![name(a), name(b), name(c)]));
                }
            }
        }
    }
    Ok(format!("{} perspective pairs", pairs.len()))
}

/// Every split of `Δ(c)` inside the dimension range lifts to `c = a ⊕ b`.
pub fn v_measure_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let ctx = Ctx::new(l);
    let z = l.bottom();
    let range: BTreeSet<DimVector> = l.elements().map(|x| ctx.dim_of(x).clone()).collect();
    let mut splits = 0;
    for c in l.elements() {
        let target = ctx.dim_of(c);
        for alpha in &range {
            for beta in &range {
                if &(alpha + beta) != target {
                    continue;
                }
                splits += 1;
                let lifted = l.down_set(c).ones().any(|a| {
                    ctx.dim_of(a) == alpha && l.complements_in(a, z, c).into_iter().any(|b| ctx.dim_of(b) == beta)
                });
                if !lifted {
                    return Err(Error::mismatch(
                        "V-measure",
                        vec![l.name(c).into(), ctx.dim.describe(alpha), ctx.dim.describe(beta)],
                    ));
                }
            }
        }
    }
    Ok(format!("{splits} splits"))
}

/// Independent decompositions `x = ⊕_{i<k} x_i`, zero summands allowed.
fn decompositions(l: &FiniteLattice, x: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![x]];
    }
    let mut out = Vec::new();
    for p in l.down_set(x).ones() {
        for q in l.complements_in(p, l.bottom(), x) {
            for mut rest in decompositions(l, q, k - 1) {
                rest.insert(0, p);
                out.push(rest);
            }
        }
    }
    out
}

/// Rows decompose the `a_i`, columns the `b_j`.
pub type RefinementMatrix = (Vec<Vec<usize>>, Vec<Vec<usize>>);

/// A `≊`-refinement matrix for `Σ Δ(a_i) = Σ Δ(b_j)`.
pub fn refinement_matrix(l: &FiniteLattice, proj_dec: &[bool], a: &[usize], b: &[usize]) -> Option<RefinementMatrix> {
    let n = l.len();
    let rel = |x: usize, y: usize| proj_dec[x * n + y];
    let rows: Vec<Vec<Vec<usize>>> = a.iter().map(|&x| decompositions(l, x, b.len())).collect();
    let cols: Vec<Vec<Vec<usize>>> = b.iter().map(|&y| decompositions(l, y, a.len())).collect();
    let mut pick = vec![0usize; a.len()];
    loop {
        let c: Vec<&Vec<usize>> = pick.iter().zip(&rows).map(|(&i, r)| &r[i]).collect();
        let d: Option<Vec<Vec<usize>>> = cols
            .iter()
            .enumerate()
            .map(|(j, col)| col.iter().find(|dj| (0..a.len()).all(|i| rel(c[i][j], dj[i]))).cloned())
            .collect();
        if let Some(d) = d {
            return Some((c.into_iter().cloned().collect(), d));
        }
        let mut i = 0;
        while i < pick.len() {
            pick[i] += 1;
            if pick[i] < rows[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            return None;
        }
    }
}

/// Refinement matrices for equal words with at most three summands.
pub fn refinement_matrix_check(l: &FiniteLattice, limit: usize) -> Result<String> {
    require_scm(l)?;
    let ctx = Ctx::new(l);
    let r = relations_suite(l);
    let pd = r.projective_by_decomposition.as_ref().unwrap();
    let n = l.len();
    let mut tested = 0;
    'outer: for a0 in 0..n {
        for a1 in a0..n {
            let sum = ctx.dim_of(a0) + ctx.dim_of(a1);
            for b in (0..n).filter(|&b| ctx.dim_of(b) == &sum) {
                if tested == limit {
                    break 'outer;
                }
                tested += 1;
                let fwd = refinement_matrix(l, pd, &[a0, a1], &[b]);
                let back = refinement_matrix(l, pd, &[b], &[a0, a1]);
                if fwd.is_none() || back.is_none() {
                    return Err(Error::mismatch(
                        "refinement matrix",
                        vec![l.name(a0).into(), l.name(a1).into(), l.name(b).into()],
                    ));
                }
            }
        }
    }
    Ok(format!("{tested} words"))
}

/// For `a ∼ c ∼ b`: `a = u0 ⊕ u1 ⊕ a'`, `b = u ⊕ b' ⊕ h` with `u0 ∼ u`,
/// `u1 ∼ u` and `a'`, `b'` perspective by decomposition in four pieces.
pub fn jonsson_decomposition(
    l: &FiniteLattice,
    persp: &[bool],
    four: &[bool],
    a: usize,
    b: usize,
) -> Option<[usize; 6]> {
    let n = l.len();
    let z = l.bottom();
    for u in l.down_set(b).ones() {
        let partners: Vec<usize> = l.down_set(a).ones().filter(|&x| persp[x * n + u]).collect();
        for &u0 in &partners {
            for &u1 in partners.iter().filter(|&&u1| l.meet(u1, u0) == z) {
                let w = l.join(u0, u1);
                for a_rest in l.complements_in(w, z, a) {
                    let found =
                        l.down_set(b).ones().find(|&b_rest| l.meet(b_rest, u) == z && four[a_rest * n + b_rest]);
                    if let Some(b_rest) = found {
                        let h = l.complements_in(l.join(u, b_rest), z, b)[0];
                        return Some([u0, u1, a_rest, u, b_rest, h]);
                    }
                }
            }
        }
    }
    None
}

pub fn jonsson_check(l: &FiniteLattice) -> Result<String> {
    require_scm(l)?;
    let n = l.len();
    let persp = perspectivity_table(l);
    let four = by_decomposition(l, &persp, 4);
    let mut pairs = 0;
    for a in 0..n {
        for b in 0..n {
            let two_step = (0..n).any(|c| persp[a * n + c] && persp[c * n + b]);
            if two_step {
                pairs += 1;
                if jonsson_decomposition(l, &persp, &four, a, b).is_none() {
                    return Err(Error::mismatch("two-step decomposition", vec![l.name(a).into(), l.name(b).into()]));
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

/// Headline geometric facts of a lattice, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub lattice: String,
    pub modular: bool,
    pub sectionally_complemented: bool,
    pub perspectivity_transitive: bool,
    pub v_modular: bool,
    /// Prime interval and interval of a failed V-modularity search.
    pub v_modular_witness: Option<[String; 2]>,
    /// The remaining fields need a sectionally complemented modular lattice.
    pub index_of_top: Option<u64>,
    /// Least `n` with `L` `n`-distributive.
    pub distributivity: Option<usize>,
    pub normal: Option<bool>,
    pub normal_kernel_size: Option<usize>,
}

pub fn summary(l: &FiniteLattice, bound: usize) -> GeometrySummary {
    let scm = require_scm(l).is_ok();
    let v = crate::dimension::is_v_modular(l, bound);
    let iv = |i: Interval| format!("{}..{}", l.name(i.lower), l.name(i.upper));
    let index = scm.then(|| lattice_index(l, l.top()));
    GeometrySummary {
        lattice: l.name_label().to_string(),
        modular: l.is_modular(),
        sectionally_complemented: l.is_sectionally_complemented(),
        perspectivity_transitive: transitivity_witness(l).is_none(),
        v_modular: v.holds,
        v_modular_witness: v.witness.map(|(p, q)| [iv(p), iv(q)]),
        index_of_top: index,
        // no homogeneous sequence of length n + 1 exactly when n-distributive
        distributivity: index.map(|i| i.max(1) as usize),
        normal: scm.then(|| is_normal(l)),
        normal_kernel_size: scm.then(|| normal_kernel(l).len()),
    }
}
