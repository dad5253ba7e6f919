//! Primitive monoids `E(P)` over finite QO-systems, in their numerical
//! form: vectors `P -> Z⁺ ∪ {∞}` compared componentwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Add;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;

/// Guard on the number of lower sets enumerated.
pub const MAX_LOWER_SETS: usize = 1 << 16;

/// `Z⁺ ∪ {∞}`; `u64::MAX` encodes ∞.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExtNat(u64);

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat(0);
    pub const INF: ExtNat = ExtNat(u64::MAX);

    pub fn fin(n: u64) -> Self {
        assert!(n < u64::MAX, "finite value out of range");
        ExtNat(n)
    }

    pub fn is_inf(self) -> bool {
        self == Self::INF
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn finite(self) -> Option<u64> {
        (!self.is_inf()).then_some(self.0)
    }

    /// `k · self`, with `0 · ∞ = 0`.
    pub fn scale(self, k: u64) -> Self {
        match (k, self.finite()) {
            (0, _) => ExtNat::ZERO,
            (_, None) => ExtNat::INF,
            (_, Some(v)) => ExtNat::fin(v.checked_mul(k).expect("coefficient overflow")),
        }
    }

    /// Truncated difference for finite `self ≥ other`.
    fn minus(self, other: ExtNat) -> ExtNat {
        match (self.finite(), other.finite()) {
            (None, _) => ExtNat::INF,
            (Some(a), Some(b)) if b <= a => ExtNat::fin(a - b),
            _ => panic!("minus: {self} - {other} is undefined"),
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, o: ExtNat) -> ExtNat {
        if self.is_inf() || o.is_inf() {
            ExtNat::INF
        } else {
            ExtNat::fin(self.0.checked_add(o.0).expect("coefficient overflow"))
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        ExtNat::fin(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "∞"),
        }
    }
}

impl fmt::Debug for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An element of `(Z⁺ ∪ {∞})^P`, indexed by point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimVector(pub Vec<ExtNat>);

impl DimVector {
    pub fn zero(n: usize) -> Self {
        DimVector(vec![ExtNat::ZERO; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    pub fn leq(&self, o: &DimVector) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn meet(&self, o: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a.min(b)).collect())
    }

    pub fn scale(&self, k: u64) -> DimVector {
        DimVector(self.0.iter().map(|v| v.scale(k)).collect())
    }

    pub fn has_inf(&self) -> bool {
        self.0.iter().any(|v| v.is_inf())
    }

    /// Largest finite coefficient (0 if none).
    pub fn max_finite(&self) -> u64 {
        self.0.iter().filter_map(|v| v.finite()).max().unwrap_or(0)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| !self.0[p].is_zero()).collect()
    }
}

impl std::ops::Index<usize> for DimVector {
    type Output = ExtNat;
    fn index(&self, p: usize) -> &ExtNat {
        &self.0[p]
    }
}

impl Add for &DimVector {
    type Output = DimVector;
    fn add(self, o: &DimVector) -> DimVector {
        DimVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a + b).collect())
    }
}

impl Add for DimVector {
    type Output = DimVector;
    fn add(self, o: DimVector) -> DimVector {
        &self + &o
    }
}

impl fmt::Debug for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// Outcome of comparing two vectors componentwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Less,
    Greater,
    Incomparable,
}

impl Comparison {
    pub fn of(x: &DimVector, y: &DimVector) -> Self {
        match (x.leq(y), y.leq(x)) {
            (true, true) => Comparison::Equal,
            (true, false) => Comparison::Less,
            (false, true) => Comparison::Greater,
            (false, false) => Comparison::Incomparable,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Comparison::Equal => "equal",
            Comparison::Less => "less",
            Comparison::Greater => "greater",
            Comparison::Incomparable => "incomparable",
        }
    }
}

/// Σ e_p over an antichain, `∞` marking points of `P0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedRep {
    pub terms: BTreeMap<usize, ExtNat>,
}

/// A finite set with a transitive antisymmetric relation `⊲`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QoSystem {
    names: Vec<String>,
    rel: Vec<Vec<bool>>,
}

impl QoSystem {
    /// Validates that `rel` is already transitive and antisymmetric.
    pub fn new(names: Vec<String>, rel: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut m = vec![vec![false; n]; n];
        for &(p, q) in rel {
            if p >= n || q >= n {
                return Err(Error::InvalidQoSystem(format!("point #{} out of range", p.max(q))));
            }
            m[p][q] = true;
        }
        let qo = QoSystem { names, rel: m };
        qo.validate()?;
        Ok(qo)
    }

    /// Like `new`, after taking the transitive closure of `rel`.
    pub fn closure_of(names: Vec<String>, rel: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut m = vec![vec![false; n]; n];
        for &(p, q) in rel {
            if p >= n || q >= n {
                return Err(Error::InvalidQoSystem(format!("point #{} out of range", p.max(q))));
            }
            m[p][q] = true;
        }
        transitive_closure(&mut m);
        let qo = QoSystem { names, rel: m };
        qo.validate()?;
        Ok(qo)
    }

    pub fn from_named(points: &[&str], rel: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = points.iter().map(|s| s.to_string()).collect();
        let idx: HashMap<&str, usize> = points.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        if idx.len() != points.len() {
            return Err(Error::Duplicate("point".into()));
        }
        let pairs = rel
            .iter()
            .map(|(p, q)| {
                Ok((
                    *idx.get(p).ok_or_else(|| Error::UnknownElement(p.to_string()))?,
                    *idx.get(q).ok_or_else(|| Error::UnknownElement(q.to_string()))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        QoSystem::new(names, &pairs)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for p in 0..n {
            for q in 0..n {
                if !self.rel[p][q] {
                    continue;
                }
                if p != q && self.rel[q][p] {
                    return Err(Error::InvalidQoSystem(format!(
                        "{} and {} are mutually related",
                        self.names[p], self.names[q]
                    )));
                }
                for r in 0..n {
                    if self.rel[q][r] && !self.rel[p][r] {
                        return Err(Error::InvalidQoSystem(format!(
                            "not transitive at {} ⊲ {} ⊲ {}",
                            self.names[p], self.names[q], self.names[r]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.names[p]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|s| s == name).ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// `p ⊲ q`.
    pub fn rel(&self, p: usize, q: usize) -> bool {
        self.rel[p][q]
    }

    /// `p ⊴ q`.
    pub fn le(&self, p: usize, q: usize) -> bool {
        p == q || self.rel[p][q]
    }

    /// `p ⊲ q` with `p ≠ q`.
    pub fn strictly_below(&self, p: usize, q: usize) -> bool {
        p != q && self.rel[p][q]
    }

    pub fn is_p0(&self, p: usize) -> bool {
        self.rel[p][p]
    }

    pub fn p0(&self) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.is_p0(p)).collect()
    }

    /// Pairs `(p, q)` with `p ⊲ q`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).filter(|&(p, q)| self.rel[p][q]).collect()
    }

    /// No two distinct points are related.
    pub fn is_antichain(&self) -> bool {
        let n = self.len();
        (0..n).all(|p| (0..n).all(|q| !self.strictly_below(p, q)))
    }

    pub fn zero(&self) -> DimVector {
        DimVector::zero(self.len())
    }

    /// The generator `f_p`.
    pub fn generator(&self, p: usize) -> DimVector {
        let mut v = self.zero();
        for q in 0..self.len() {
            if self.strictly_below(q, p) {
                v.0[q] = ExtNat::INF;
            }
        }
        v.0[p] = if self.is_p0(p) { ExtNat::INF } else { ExtNat::fin(1) };
        v
    }

    /// `k · f_p`.
    pub fn generator_times(&self, p: usize, k: ExtNat) -> DimVector {
        match k.finite() {
            Some(0) => self.zero(),
            Some(k) => self.generator(p).scale(k),
            None => {
                let mut v = self.generator(p);
                v.0[p] = ExtNat::INF;
                v
            }
        }
    }

    /// Maximal points of a set under `⊴`.
    pub fn maximal(&self, set: &[usize]) -> Vec<usize> {
        set.iter().copied().filter(|&p| !set.iter().any(|&q| self.strictly_below(p, q))).collect()
    }

    fn f_violation(&self, x: &DimVector, tilde_only: bool) -> Option<String> {
        let n = self.len();
        if x.len() != n {
            return Some(format!("vector has {} entries, P has {n}", x.len()));
        }
        for p in 0..n {
            for q in 0..n {
                if self.le(q, p) {
                    if !x[p].is_zero() && x[q].is_zero() {
                        return Some(format!("support is not a lower set at {}", self.names[q]));
                    }
                    if x[q] < x[p] {
                        return Some(format!("not antitone at {} ⊴ {}", self.names[q], self.names[p]));
                    }
                }
            }
            if self.is_p0(p) && !x[p].is_zero() && !x[p].is_inf() {
                return Some(format!("{} ∈ P0 has finite nonzero value", self.names[p]));
            }
        }
        let finite_pos: Vec<usize> = (0..n).filter(|&p| !x[p].is_zero() && !x[p].is_inf()).collect();
        for &p in &finite_pos {
            for &q in &finite_pos {
                if self.strictly_below(p, q) {
                    return Some(format!("finite values at {} ⊲ {}", self.names[p], self.names[q]));
                }
            }
        }
        if !tilde_only {
            for p in self.maximal(&x.support()) {
                if !self.is_p0(p) && x[p].is_inf() {
                    return Some(format!("maximal support point {} has value ∞", self.names[p]));
                }
            }
        }
        None
    }

    /// Membership in `F(P)`.
    pub fn check_f(&self, x: &DimVector) -> Result<()> {
        self.f_violation(x, false).map_or(Ok(()), |e| Err(Error::NotInF(e)))
    }

    pub fn in_f(&self, x: &DimVector) -> bool {
        self.f_violation(x, false).is_none()
    }

    pub fn in_f_tilde(&self, x: &DimVector) -> bool {
        self.f_violation(x, true).is_none()
    }

    pub fn to_reduced(&self, x: &DimVector) -> Result<ReducedRep> {
        self.check_f(x)?;
        let terms = self
            .maximal(&x.support())
            .into_iter()
            .map(|p| (p, if self.is_p0(p) { ExtNat::INF } else { x[p] }))
            .collect();
        Ok(ReducedRep { terms })
    }

    pub fn from_reduced(&self, r: &ReducedRep) -> Result<DimVector> {
        let mut x = self.zero();
        for (&p, &c) in &r.terms {
            if p >= self.len() {
                return Err(Error::NotInF(format!("point #{p} out of range")));
            }
            let ok = if self.is_p0(p) { c.is_inf() } else { c.finite().is_some_and(|v| v > 0) };
            if !ok {
                return Err(Error::NotInF(format!("bad coefficient {c} at {}", self.names[p])));
            }
            for &q in r.terms.keys() {
                if self.strictly_below(p, q) {
                    return Err(Error::NotInF(format!(
                        "terms {} ⊲ {} are not an antichain",
                        self.names[p], self.names[q]
                    )));
                }
            }
            x = &x + &self.generator_times(p, c);
        }
        Ok(x)
    }

    /// `ρ_n(x) = Σ_p (x(p) ∧ n) f_p`.
    pub fn truncate(&self, x: &DimVector, n: u64) -> DimVector {
        let mut out = self.zero();
        for p in 0..self.len() {
            let k = x[p].min(ExtNat::fin(n));
            if !k.is_zero() {
                out = &out + &self.generator(p).scale(k.finite().unwrap());
            }
        }
        out
    }

    /// Some `t` with `x + t = y`, via `ρ_{2n}` of the componentwise
    /// largest solution for the least workable `n`.
    pub fn residual(&self, x: &DimVector, y: &DimVector) -> Result<DimVector> {
        if !x.leq(y) {
            return Err(Error::NotBelow);
        }
        let zbar =
            DimVector(x.0.iter().zip(&y.0).map(|(&a, &b)| if b.is_inf() { ExtNat::INF } else { b.minus(a) }).collect());
        // 2n ≥ every finite residue, and n ≥ 1 once some ∞ must be produced.
        let bound = y.max_finite().max(1);
        for n in 0..=bound {
            let t = self.truncate(&zbar, 2 * n);
            if &(x + &t) == y {
                return Ok(t);
            }
        }
        Err(Error::NotBelow)
    }

    /// `∞` if some entry is `∞`, else the largest entry.
    pub fn index(&self, x: &DimVector) -> ExtNat {
        if x.has_inf() {
            ExtNat::INF
        } else {
            ExtNat::fin(x.max_finite())
        }
    }

    /// Lower sets of `(P, ⊴)`, as membership vectors, in a fixed order.
    pub fn lower_sets(&self) -> Result<Vec<Vec<bool>>> {
        let n = self.len();
        // points in an order compatible with ⊴
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (0..n).filter(|&q| self.strictly_below(q, p)).count());
        let mut out = Vec::new();
        let mut cur = vec![false; n];
        fn go(k: usize, qo: &QoSystem, order: &[usize], cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) -> Result<()> {
            if k == order.len() {
                if out.len() >= MAX_LOWER_SETS {
                    return Err(Error::ParamTooLarge("too many lower sets".into()));
                }
                out.push(cur.clone());
                return Ok(());
            }
            let p = order[k];
            go(k + 1, qo, order, cur, out)?;
            if (0..qo.len()).all(|q| !qo.strictly_below(q, p) || cur[q]) {
                cur[p] = true;
                go(k + 1, qo, order, cur, out)?;
                cur[p] = false;
            }
            Ok(())
        }
        go(0, self, &order, &mut cur, &mut out)?;
        out.sort_by_key(|s| (s.iter().filter(|&&b| b).count(), s.iter().map(|&b| !b).collect::<Vec<_>>()));
        Ok(out)
    }

    /// Every element of `F(P)` whose finite coefficients are at most `max`.
    pub fn enumerate_f(&self, max: u64) -> Result<Vec<DimVector>> {
        let mut out = Vec::new();
        for s in self.lower_sets()? {
            let support: Vec<usize> = (0..self.len()).filter(|&p| s[p]).collect();
            let top = self.maximal(&support);
            let mut base = self.zero();
            for &p in &support {
                base.0[p] = ExtNat::INF;
            }
            let free: Vec<usize> = top.into_iter().filter(|&p| !self.is_p0(p)).collect();
            let mut digits = vec![1u64; free.len()];
            loop {
                let mut v = base.clone();
                for (&p, &d) in free.iter().zip(&digits) {
                    v.0[p] = ExtNat::fin(d);
                }
                out.push(v);
                match digits.iter().position(|&d| d < max) {
                    Some(i) => {
                        digits[i] += 1;
                        for d in &mut digits[..i] {
                            *d = 1;
                        }
                    }
                    None => break,
                }
                if max == 0 {
                    break;
                }
            }
        }
        if max == 0 {
            out.retain(|v| !v.0.iter().any(|c| c.finite().is_some_and(|f| f > 0)));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// A 2×2 matrix with row sums `a0, a1` and column sums `b0, b1`.
    pub fn refine(
        &self,
        a0: &DimVector,
        a1: &DimVector,
        b0: &DimVector,
        b1: &DimVector,
    ) -> Result<[[DimVector; 2]; 2]> {
        for v in [a0, a1, b0, b1] {
            self.check_f(v)?;
        }
        if a0 + a1 != b0 + b1 {
            return Err(Error::RefinementNotFound);
        }
        let nmax = [a0, a1, b0, b1].iter().map(|v| v.max_finite()).max().unwrap_or(0);
        let fits = |c: &[[DimVector; 2]; 2]| {
            &c[0][0] + &c[0][1] == *a0
                && &c[1][0] + &c[1][1] == *a1
                && &c[0][0] + &c[1][0] == *b0
                && &c[0][1] + &c[1][1] == *b1
        };
        let lo = a0.meet(b0);
        for m in (0..=nmax.max(1)).rev() {
            let c00 = self.truncate(&lo, m);
            let (Ok(c01), Ok(c10)) = (self.residual(&c00, a0), self.residual(&c00, b0)) else {
                continue;
            };
            for c11 in [self.residual(&c10, a1), self.residual(&c01, b1)].into_iter().flatten() {
                let c = [[c00.clone(), c01.clone()], [c10.clone(), c11]];
                if fits(&c) {
                    return Ok(c);
                }
            }
        }
        // exhaustive fallback over the coefficient grid
        let grid = self.enumerate_f(nmax.max(1))?;
        let below = |v: &DimVector| -> Vec<&DimVector> { grid.iter().filter(|g| g.leq(v)).collect() };
        let (ga0, ga1) = (below(a0), below(a1));
        for &c00 in &below(&lo) {
            for &c01 in ga0.iter().filter(|&&t| &(c00 + t) == a0) {
                for &c10 in ga1.iter().filter(|&&t| &(c00 + t) == b0) {
                    if let Some(&c11) = ga1.iter().find(|&&t| &(c10 + t) == a1 && &(c01 + t) == b1) {
                        return Ok([[c00.clone(), c01.clone()], [c10.clone(), c11.clone()]]);
                    }
                }
            }
        }
        Err(Error::RefinementNotFound)
    }

    /// Disjoint union; points of `other` are renamed with a suffix on clash.
    pub fn disjoint_union(&self, other: &QoSystem) -> QoSystem {
        let n = self.len();
        let mut names = self.names.clone();
        for s in &other.names {
            let mut s = s.clone();
            while names.contains(&s) {
                s.push('\'');
            }
            names.push(s);
        }
        let mut pairs = self.pairs();
        pairs.extend(other.pairs().into_iter().map(|(p, q)| (p + n, q + n)));
        QoSystem::new(names, &pairs).expect("disjoint union of QO-systems")
    }

    /// The induced system on `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> QoSystem {
        let names = keep.iter().map(|&p| self.names[p].clone()).collect();
        let mut pairs = Vec::new();
        for (i, &p) in keep.iter().enumerate() {
            for (j, &q) in keep.iter().enumerate() {
                if self.rel[p][q] {
                    pairs.push((i, j));
                }
            }
        }
        QoSystem::new(names, &pairs).expect("restriction of a QO-system")
    }

    /// Does `map: self -> other` preserve and reflect `⊲` bijectively?
    pub fn is_isomorphism(&self, other: &QoSystem, map: &[usize]) -> bool {
        let n = self.len();
        if other.len() != n || map.len() != n {
            return false;
        }
        let mut hit = vec![false; n];
        for &m in map {
            if m >= n || std::mem::replace(&mut hit[m], true) {
                return false;
            }
        }
        (0..n).all(|p| (0..n).all(|q| self.rel[p][q] == other.rel[map[p]][map[q]]))
    }

    /// Backtracking search for an isomorphism `self -> other`.
    pub fn find_isomorphism(&self, other: &QoSystem) -> Option<Vec<usize>> {
        let n = self.len();
        if other.len() != n {
            return None;
        }
        let sig = |s: &QoSystem, p: usize| {
            let below = (0..n).filter(|&q| s.strictly_below(q, p)).count();
            let above = (0..n).filter(|&q| s.strictly_below(p, q)).count();
            (s.is_p0(p), below, above)
        };
        let sa: Vec<_> = (0..n).map(|p| sig(self, p)).collect();
        let sb: Vec<_> = (0..n).map(|p| sig(other, p)).collect();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            k: usize,
            a: &QoSystem,
            b: &QoSystem,
            sa: &[(bool, usize, usize)],
            sb: &[(bool, usize, usize)],
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if k == a.len() {
                return true;
            }
            for y in 0..b.len() {
                if used[y] || sa[k] != sb[y] {
                    continue;
                }
                if (0..k).all(|z| a.rel[z][k] == b.rel[map[z]][y] && a.rel[k][z] == b.rel[y][map[z]]) {
                    map[k] = y;
                    used[y] = true;
                    if go(k + 1, a, b, sa, sb, map, used) {
                        return true;
                    }
                    used[y] = false;
                }
            }
            false
        }
        go(0, self, other, &sa, &sb, &mut map, &mut used).then_some(map)
    }

    /// `x + z = y + z` with `x ≠ y`, searched over coefficients ≤ `max`.
    pub fn cancellation_witness(&self, max: u64) -> Result<Option<(DimVector, DimVector, DimVector)>> {
        let grid = self.enumerate_f(max)?;
        for x in &grid {
            for y in &grid {
                if x >= y {
                    continue;
                }
                for z in &grid {
                    if x + z == y + z {
                        return Ok(Some((x.clone(), y.clone(), z.clone())));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Floyd–Warshall style closure of a boolean relation.
#[allow(clippy::needless_range_loop)]
fn transitive_closure(m: &mut [Vec<bool>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
}

/// The QO-system presented by generators `0..n`, equalities `x` and
/// absorptions `y` (`i ≪ j`), with the map from generators to points.
pub fn build_qosystem(n: usize, x: &[(usize, usize)], y: &[(usize, usize)]) -> (QoSystem, Vec<usize>) {
    // classes under the equalities
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut [usize], mut a: usize) -> usize {
        while root[a] != a {
            root[a] = root[root[a]];
            a = root[a];
        }
        a
    }
    for &(a, b) in x {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root[ra.max(rb)] = ra.min(rb);
        }
    }
    let rep: Vec<usize> = (0..n).map(|a| find(&mut root, a)).collect();
    let mut class_ids: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &rep {
        let k = class_ids.len();
        class_ids.entry(r).or_insert(k);
    }
    let k = class_ids.len();
    let class: Vec<usize> = rep.iter().map(|r| class_ids[r]).collect();

    // ≺: transitive closure of the induced absorptions
    let mut prec = vec![vec![false; k]; k];
    for &(a, b) in y {
        prec[class[a]][class[b]] = true;
    }
    transitive_closure(&mut prec);

    // collapse i ~ j (i ≺ j ≺ i); classes are numbered by least generator
    let mut point_of_class = vec![usize::MAX; k];
    let mut points = 0;
    for c in 0..k {
        if point_of_class[c] != usize::MAX {
            continue;
        }
        for d in c..k {
            if d == c || (prec[c][d] && prec[d][c]) {
                point_of_class[d] = points;
            }
        }
        points += 1;
    }
    let mut pairs = Vec::new();
    for c in 0..k {
        for d in 0..k {
            if prec[c][d] {
                pairs.push((point_of_class[c], point_of_class[d]));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let names = (1..=points).map(|i| format!("q{i}")).collect();
    let qo = QoSystem::new(names, &pairs).expect("presentation yields a QO-system");
    let gen = (0..n).map(|a| point_of_class[class[a]]).collect();
    (qo, gen)
}

/// Relation matrix under the permutation minimizing it.
fn canonical_code(qo: &QoSystem) -> Vec<bool> {
    let n = qo.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<bool>> = None;
    loop {
        let code: Vec<bool> = (0..n * n).map(|k| qo.rel(perm[k / n], perm[k % n])).collect();
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    best.unwrap_or_default()
}

/// Every QO-system with at most `max` points, up to isomorphism.
pub fn all_qo_systems(max: usize) -> Vec<QoSystem> {
    assert!(max <= 5, "enumeration is exponential in max²");
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 0..=max {
        let off_diagonal: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).collect();
        for strict in 0..1u64 << off_diagonal.len() {
            for loops in 0..1u64 << n {
                let mut rel: Vec<(usize, usize)> =
                    off_diagonal.iter().enumerate().filter(|(b, _)| strict >> b & 1 == 1).map(|(_, &e)| e).collect();
                rel.extend((0..n).filter(|i| loops >> i & 1 == 1).map(|i| (i, i)));
                let names = (1..=n).map(|i| format!("p{i}")).collect();
                if let Ok(qo) = QoSystem::new(names, &rel) {
                    if seen.insert((n, canonical_code(&qo))) {
                        out.push(qo);
                    }
                }
            }
        }
    }
    out
}

/// A random QO-system on `n` points: a random order compatible with
/// `0 < 1 < … < n-1`, plus random self-loops.
pub fn random_qo_system<R: Rng>(rng: &mut R, n: usize) -> QoSystem {
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                rel.push((i, j));
            }
        }
        if rng.gen_bool(0.3) {
            rel.push((i, i));
        }
    }
    let names = (1..=n).map(|i| format!("p{i}")).collect();
    QoSystem::closure_of(names, &rel).expect("closure of an order is a QO-system")
}

/// Lower sets of `P` ordered by inclusion, with the class map of `F(P)`.
#[derive(Clone, Debug)]
pub struct SemilatticeQuotient {
    pub lower_sets: Vec<Vec<bool>>,
    pub lattice: FiniteLattice,
}

impl SemilatticeQuotient {
    /// Index of the lower set equal to the support of `x`.
    pub fn class_of(&self, x: &DimVector) -> usize {
        let s: Vec<bool> = x.0.iter().map(|v| !v.is_zero()).collect();
        self.lower_sets.iter().position(|l| *l == s).expect("support of an F(P) vector is a lower set")
    }
}

pub fn semilattice_quotient(qo: &QoSystem) -> Result<SemilatticeQuotient> {
    let lower_sets = qo.lower_sets()?;
    let names = lower_sets
        .iter()
        .map(|s| {
            let pts: Vec<&str> = (0..qo.len()).filter(|&p| s[p]).map(|p| qo.name(p)).collect();
            format!("{{{}}}", pts.join(","))
        })
        .collect();
    let lattice = FiniteLattice::from_order("V(P)", names, |i, j| {
        lower_sets[i].iter().zip(&lower_sets[j]).all(|(&a, &b)| !a || b)
    })?;
    Ok(SemilatticeQuotient { lower_sets, lattice })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inf() -> ExtNat {
        ExtNat::INF
    }

    fn v(xs: &[u64]) -> DimVector {
        DimVector(xs.iter().map(|&x| if x == u64::MAX { inf() } else { ExtNat::fin(x) }).collect())
    }

    const I: u64 = u64::MAX;

    /// The N5 system: q2 ⊲ q1, q2 ⊲ q3.
    fn n5() -> QoSystem {
        let (qo, gen) = build_qosystem(5, &[(0, 3), (2, 4)], &[(1, 0), (1, 4)]);
        assert_eq!(gen, vec![0, 1, 2, 0, 2]);
        qo
    }

    #[test]
    fn ext_nat_arithmetic() {
        assert_eq!(inf() + ExtNat::fin(3), inf());
        assert_eq!(inf().min(ExtNat::fin(4)), ExtNat::fin(4));
        assert_eq!(inf().scale(2), inf());
        assert_eq!(inf().scale(0), ExtNat::ZERO);
        assert!(ExtNat::fin(7) < inf());
    }

    #[test]
    fn presentation_examples() {
        let qo = n5();
        assert_eq!(qo.len(), 3);
        assert!(qo.rel(1, 0) && qo.rel(1, 2));
        assert!(qo.p0().is_empty());
        assert_eq!(qo.pairs().len(), 2);

        let (free, gen) = build_qosystem(4, &[], &[]);
        assert!(free.is_antichain() && free.p0().is_empty());
        assert_eq!(gen, vec![0, 1, 2, 3]);

        let (two, _) = build_qosystem(1, &[], &[(0, 0)]);
        assert_eq!(two.p0(), vec![0]);
        let e = two.generator(0);
        assert_eq!(&e + &e, e);
    }

    #[test]
    fn cycles_collapse_to_p0() {
        let (qo, gen) = build_qosystem(3, &[], &[(0, 1), (1, 0), (2, 0)]);
        assert_eq!(qo.len(), 2);
        assert_eq!(gen[0], gen[1]);
        assert!(qo.is_p0(gen[0]) && !qo.is_p0(gen[2]));
        assert!(qo.rel(gen[2], gen[0]));
    }

    #[test]
    fn generators() {
        let qo = n5();
        assert_eq!(qo.generator(0), v(&[1, I, 0]));
        assert_eq!(qo.generator(1), v(&[0, 1, 0]));
        let (a, _) = build_qosystem(3, &[], &[]);
        assert_eq!(a.generator(1), v(&[0, 1, 0]));
        assert_eq!(&a.generator(1) + &a.generator(1), v(&[0, 2, 0]));
        for q in [qo, a] {
            for p in 0..q.len() {
                assert!(q.in_f(&q.generator(p)));
            }
        }
    }

    #[test]
    fn addition_and_order() {
        let qo = n5();
        let (f1, f2, f3) = (qo.generator(0), qo.generator(1), qo.generator(2));
        assert_eq!(&f2 + &f1, f1);
        assert_eq!(&f1 + &qo.zero(), f1);
        assert!(f2.leq(&f1) && qo.zero().leq(&f3));
        assert!(!f1.leq(&f3) && !f3.leq(&f1));
        assert!(qo.in_f(&(&f1 + &f3)));
    }

    #[test]
    fn reduced_forms() {
        let qo = n5();
        let r = qo.to_reduced(&qo.generator(0)).unwrap();
        assert_eq!(r.terms, BTreeMap::from([(0, ExtNat::fin(1))]));
        assert!(qo.to_reduced(&qo.zero()).unwrap().terms.is_empty());
        let (two, _) = build_qosystem(1, &[], &[(0, 0)]);
        let r = ReducedRep { terms: BTreeMap::from([(0, inf())]) };
        assert_eq!(two.from_reduced(&r).unwrap(), two.generator(0));
        let bad = ReducedRep { terms: BTreeMap::from([(0, ExtNat::fin(1)), (1, ExtNat::fin(1))]) };
        assert!(matches!(qo.from_reduced(&bad), Err(Error::NotInF(_))));
        assert!(matches!(qo.to_reduced(&v(&[1, 1, 0])), Err(Error::NotInF(_))));
    }

    #[test]
    fn truncation() {
        let qo = n5();
        assert_eq!(qo.truncate(&qo.zero(), 3), qo.zero());
        assert_eq!(qo.truncate(&qo.generator(1), 1), qo.generator(1));
        let x = &qo.generator(0).scale(3) + &qo.generator(2);
        assert_eq!(qo.truncate(&x, 3), x);
        assert_eq!(qo.truncate(&x, 7), x);
    }

    #[test]
    fn residuals() {
        let qo = n5();
        let (f1, f2) = (qo.generator(0), qo.generator(1));
        assert_eq!(qo.residual(&f1, &f1).unwrap(), qo.zero());
        assert_eq!(qo.residual(&qo.zero(), &f1).unwrap(), f1);
        let t = qo.residual(&f2, &f1).unwrap();
        assert_eq!(t, f1);
        // no larger solution exists in the grid
        for s in qo.enumerate_f(4).unwrap() {
            if &f2 + &s == f1 {
                assert!(s.leq(&t));
            }
        }
        assert_eq!(qo.residual(&f1, &f2), Err(Error::NotBelow));
    }

    #[test]
    fn index_examples() {
        let qo = n5();
        assert_eq!(qo.index(&qo.zero()), ExtNat::ZERO);
        assert_eq!(qo.index(&qo.generator(1).scale(4)), ExtNat::fin(4));
        let (two, _) = build_qosystem(1, &[], &[(0, 0)]);
        assert_eq!(two.index(&two.generator(0)), inf());
    }

    #[test]
    fn refinement_examples() {
        let (z, _) = build_qosystem(1, &[], &[]);
        let c = z.refine(&v(&[2]), &v(&[3]), &v(&[4]), &v(&[1])).unwrap();
        assert_eq!(c, [[v(&[2]), v(&[0])], [v(&[2]), v(&[1])]]);
        let qo = n5();
        let (f1, f3) = (qo.generator(0), qo.generator(2));
        let c = qo.refine(&f1, &f3, &f3, &f1).unwrap();
        assert_eq!(&c[0][0] + &c[0][1], f1);
        assert_eq!(&c[0][1] + &c[1][1], f1);
        let d = qo.refine(&f1, &f3, &f1, &f3).unwrap();
        assert_eq!(d, [[f1.clone(), qo.zero()], [qo.zero(), f3.clone()]]);
    }

    #[test]
    fn semilattice_quotients() {
        let qo = n5();
        let s = semilattice_quotient(&qo).unwrap();
        assert_eq!(s.lower_sets.len(), 5);
        let (a, _) = build_qosystem(3, &[], &[]);
        let s = semilattice_quotient(&a).unwrap();
        assert_eq!(s.lattice.len(), 8);
        assert!(s.lattice.is_distributive() && s.lattice.is_complemented());
        let (two, _) = build_qosystem(1, &[], &[(0, 0)]);
        assert_eq!(semilattice_quotient(&two).unwrap().lattice.len(), 2);
    }

    #[test]
    fn validation() {
        assert!(QoSystem::from_named(&["p", "q"], &[("p", "q"), ("q", "p")]).is_err());
        assert!(QoSystem::from_named(&["p", "q", "r"], &[("p", "q"), ("q", "r")]).is_err());
        assert!(QoSystem::from_named(&["p", "q", "r"], &[("p", "q"), ("q", "r"), ("p", "r")]).is_ok());
    }

    #[test]
    fn qo_system_counts() {
        // unlabelled posets on n points: 1, 1, 2, 5, 16
        let all = all_qo_systems(4);
        let posets = |n| all.iter().filter(|q| q.len() == n && q.p0().is_empty()).count();
        assert_eq!([posets(0), posets(1), posets(2), posets(3), posets(4)], [1, 1, 2, 5, 16]);
        // one point: plain or self-related
        assert_eq!(all.iter().filter(|q| q.len() == 1).count(), 2);
    }

    #[test]
    fn enumeration_is_exactly_f() {
        let qo = n5();
        let fast = qo.enumerate_f(2).unwrap();
        let vals = [ExtNat::ZERO, ExtNat::fin(1), ExtNat::fin(2), inf()];
        let mut brute = Vec::new();
        for a in vals {
            for b in vals {
                for c in vals {
                    let x = DimVector(vec![a, b, c]);
                    if qo.in_f(&x) {
                        brute.push(x);
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(fast, brute);
    }
}
