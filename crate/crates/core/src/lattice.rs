//! Finite lattices given by their Hasse diagram.
//!
//! Elements are dense indices `0..n` with a name table. The order is kept
//! as up-set and down-set bit rows, and meet/join as full tables.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constructors refuse anything larger.
pub const MAX_ELEMENTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    name: String,
    names: Vec<String>,
    index: HashMap<String, usize>,
    covers: Vec<(usize, usize)>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    meet: Vec<u16>,
    join: Vec<u16>,
    linear: Vec<usize>,
    bottom: usize,
    top: usize,
}

/// A closed interval `[lower, upper]` of some lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lower: usize,
    pub upper: usize,
}

impl Interval {
    pub fn new(l: &FiniteLattice, lower: usize, upper: usize) -> Result<Self> {
        if l.leq(lower, upper) {
            Ok(Interval { lower, upper })
        } else {
            Err(Error::NotAnInterval(l.name(lower).to_string(), l.name(upper).to_string()))
        }
    }

    pub fn is_prime(&self, l: &FiniteLattice) -> bool {
        l.is_cover(self.lower, self.upper)
    }
}

fn bits(n: usize, it: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for i in it {
        b.insert(i);
    }
    b
}

/// Find some directed cycle among the vertices Kahn's algorithm left behind.
fn find_cycle(succ: &[Vec<usize>], left: &[bool]) -> Vec<usize> {
    let start = left.iter().position(|&x| x).unwrap_or(0);
    let mut seen = HashMap::new();
    let mut path = Vec::new();
    let mut cur = start;
    loop {
        if let Some(&at) = seen.get(&cur) {
            let mut cyc: Vec<usize> = path[at..].to_vec();
            cyc.push(cur);
            return cyc;
        }
        seen.insert(cur, path.len());
        path.push(cur);
        cur = match succ[cur].iter().find(|&&s| left[s]) {
            Some(&s) => s,
            None => return path,
        };
    }
}

impl FiniteLattice {
    /// Build from names and order edges. Edges may contain transitive
    /// pairs; they are reduced to the covering relation.
    pub fn new(name: impl Into<String>, names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if n > MAX_ELEMENTS {
            return Err(Error::ParamTooLarge(format!("{n} elements")));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, s) in names.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Duplicate(s.clone()));
            }
        }
        let mut edges: Vec<(usize, usize)> = edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::UnknownElement(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::Cycle(vec![names[a].clone(), names[a].clone()]));
            }
            succ[a].push(b);
            indeg[b] += 1;
        }

        let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut linear = Vec::with_capacity(n);
        while let Some(Reverse(x)) = heap.pop() {
            linear.push(x);
            for &s in &succ[x] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    heap.push(Reverse(s));
                }
            }
        }
        if linear.len() < n {
            let left: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
            let cyc = find_cycle(&succ, &left);
            return Err(Error::Cycle(cyc.into_iter().map(|i| names[i].clone()).collect()));
        }

        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for &x in linear.iter().rev() {
            let mut row = bits(n, [x]);
            for &s in &succ[x] {
                row.union_with(&up[s]);
            }
            up[x] = row;
        }
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &edges {
            pred[b].push(a);
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for &x in &linear {
            let mut row = bits(n, [x]);
            for &p in &pred[x] {
                row.union_with(&down[p]);
            }
            down[x] = row;
        }

        // Rows re-indexed by position in the linear extension: the least
        // upper bound, if any, is the first common upper bound.
        let mut pos = vec![0usize; n];
        for (i, &x) in linear.iter().enumerate() {
            pos[x] = i;
        }
        let upt: Vec<FixedBitSet> = (0..n).map(|x| bits(n, up[x].ones().map(|y| pos[y]))).collect();
        let downt: Vec<FixedBitSet> = (0..n).map(|x| bits(n, down[x].ones().map(|y| n - 1 - pos[y]))).collect();

        let mut meet = vec![0u16; n * n];
        let mut join = vec![0u16; n * n];
        let mut scratch = FixedBitSet::with_capacity(n);
        for a in 0..n {
            for b in a..n {
                scratch.clone_from(&upt[a]);
                scratch.intersect_with(&upt[b]);
                let j = match scratch.ones().next() {
                    Some(p) if scratch.is_subset(&upt[linear[p]]) => linear[p],
                    _ => return Err(Error::NotALattice(names[a].clone(), names[b].clone(), "join")),
                };
                scratch.clone_from(&downt[a]);
                scratch.intersect_with(&downt[b]);
                let m = match scratch.ones().next() {
                    Some(p) if scratch.is_subset(&downt[linear[n - 1 - p]]) => linear[n - 1 - p],
                    _ => return Err(Error::NotALattice(names[a].clone(), names[b].clone(), "meet")),
                };
                join[a * n + b] = j as u16;
                join[b * n + a] = j as u16;
                meet[a * n + b] = m as u16;
                meet[b * n + a] = m as u16;
            }
        }

        let mut covers = Vec::new();
        for &(a, b) in &edges {
            scratch.clone_from(&up[a]);
            scratch.intersect_with(&down[b]);
            if scratch.count_ones(..) == 2 {
                covers.push((a, b));
            }
        }
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        for &(a, b) in &covers {
            upper[a].push(b);
            lower[b].push(a);
        }
        let bottom = linear[0];
        let top = linear[n - 1];
        Ok(FiniteLattice {
            name: name.into(),
            names,
            index,
            covers,
            upper,
            lower,
            up,
            down,
            meet,
            join,
            linear,
            bottom,
            top,
        })
    }

    /// Build from named elements and named cover pairs.
    pub fn from_names(name: &str, elements: &[&str], covers: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let idx: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let look = |s: &str| idx.get(s).copied().ok_or_else(|| Error::UnknownElement(s.to_string()));
        let mut edges = Vec::with_capacity(covers.len());
        for &(a, b) in covers {
            edges.push((look(a)?, look(b)?));
        }
        FiniteLattice::new(name, names, &edges)
    }

    /// Build from an explicit order predicate on `0..names.len()`.
    pub fn from_order(name: &str, names: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = names.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && leq(a, b) {
                    edges.push((a, b));
                }
            }
        }
        FiniteLattice::new(name, names, &edges)
    }

    pub fn name_label(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b] as usize
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b] as usize
    }

    pub fn meet_all(&self, it: impl IntoIterator<Item = usize>) -> usize {
        it.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn join_all(&self, it: impl IntoIterator<Item = usize>) -> usize {
        it.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// The covering pairs `(lower, upper)`, sorted.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.upper[a].contains(&b)
    }

    pub fn upper_covers(&self, x: usize) -> &[usize] {
        &self.upper[x]
    }

    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower[x]
    }

    /// Up-set of `x` as a bit row.
    pub fn up_set(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    pub fn down_set(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    /// A linear extension, least elements first.
    pub fn linear_extension(&self) -> &[usize] {
        &self.linear
    }

    /// Elements of `[a, b]` in index order (empty if `a ≰ b`).
    pub fn interval_elements(&self, a: usize, b: usize) -> Vec<usize> {
        let mut s = self.up[a].clone();
        s.intersect_with(&self.down[b]);
        s.ones().collect()
    }

    pub fn atoms(&self) -> Vec<usize> {
        self.upper[self.bottom].clone()
    }

    pub fn coatoms(&self) -> Vec<usize> {
        self.lower[self.top].clone()
    }

    /// Elements with exactly one lower cover.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.lower[x].len() == 1).collect()
    }

    pub fn meet_irreducibles(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.upper[x].len() == 1).collect()
    }

    /// Length of the longest chain from the bottom to each element.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![0usize; self.len()];
        for &x in &self.linear {
            for &u in &self.upper[x] {
                r[u] = r[u].max(r[x] + 1);
            }
        }
        r
    }

    pub fn height(&self) -> usize {
        self.ranks()[self.top]
    }

    /// Complements of `x` relative to `[lo, hi]`.
    pub fn complements_in(&self, x: usize, lo: usize, hi: usize) -> Vec<usize> {
        self.interval_elements(lo, hi).into_iter().filter(|&y| self.meet(x, y) == lo && self.join(x, y) == hi).collect()
    }

    /// The canonical maximal chain of `[a, b]`: repeatedly step to the
    /// first upper cover still below `b`.
    pub fn canonical_chain(&self, a: usize, b: usize) -> Vec<usize> {
        let mut chain = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.upper[cur].iter().find(|&&u| self.leq(u, b)).expect("interval endpoint is reachable");
            chain.push(cur);
        }
        chain
    }

    /// All maximal chains of `[a, b]`, stopping after `limit` of them.
    pub fn maximal_chains(&self, a: usize, b: usize, limit: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![vec![a]];
        while let Some(ch) = stack.pop() {
            if out.len() >= limit {
                break;
            }
            let last = *ch.last().unwrap();
            if last == b {
                out.push(ch);
                continue;
            }
            for &u in self.upper[last].iter().rev() {
                if self.leq(u, b) {
                    let mut next = ch.clone();
                    next.push(u);
                    stack.push(next);
                }
            }
        }
        out
    }
}

/// The order dual: same names, covers reversed.
pub fn dual(l: &FiniteLattice) -> FiniteLattice {
    let edges: Vec<(usize, usize)> = l.covers.iter().map(|&(a, b)| (b, a)).collect();
    let name = match l.name.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) => inner.to_string(),
        None => format!("dual({})", l.name),
    };
    FiniteLattice::new(name, l.names.clone(), &edges).expect("dual of a lattice is a lattice")
}

/// Direct product; element `(i, j)` has index `i * |B| + j`.
pub fn product(a: &FiniteLattice, b: &FiniteLattice) -> Result<FiniteLattice> {
    let (p, _) = product_many(&[a, b])?;
    Ok(p.with_name(format!("{}x{}", a.name, b.name)))
}

/// Product of several lattices in mixed radix (first factor most
/// significant). Also returns the strides.
pub fn product_many(factors: &[&FiniteLattice]) -> Result<(FiniteLattice, Vec<usize>)> {
    let mut size: usize = 1;
    for f in factors {
        size = size
            .checked_mul(f.len())
            .filter(|&s| s <= MAX_ELEMENTS)
            .ok_or_else(|| Error::ParamTooLarge("product exceeds the element guard".into()))?;
    }
    let k = factors.len();
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * factors[i + 1].len();
    }
    let digits = |x: usize| -> Vec<usize> { (0..k).map(|i| (x / strides[i]) % factors[i].len()).collect() };
    let names: Vec<String> = (0..size)
        .map(|x| {
            let parts: Vec<&str> = digits(x).iter().zip(factors).map(|(&d, f)| f.name(d)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut edges = Vec::new();
    for x in 0..size {
        let d = digits(x);
        for i in 0..k {
            for &u in factors[i].upper_covers(d[i]) {
                edges.push((x, x - d[i] * strides[i] + u * strides[i]));
            }
        }
    }
    let name = factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("x");
    Ok((FiniteLattice::new(name, names, &edges)?, strides))
}

/// The interval `[lo, hi]` as a lattice, with the map back into `l`.
pub fn interval_sublattice(l: &FiniteLattice, iv: Interval) -> (FiniteLattice, Vec<usize>) {
    let members = l.interval_elements(iv.lower, iv.upper);
    let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let names = members.iter().map(|&x| l.names[x].clone()).collect();
    let edges: Vec<(usize, usize)> =
        l.covers.iter().filter_map(|&(a, b)| Some((*pos.get(&a)?, *pos.get(&b)?))).collect();
    let name = format!("{}[{},{}]", l.name, l.name(iv.lower), l.name(iv.upper));
    let sub = FiniteLattice::new(name, names, &edges).expect("an interval is a lattice");
    (sub, members)
}

/// Search for an order isomorphism `a -> b`.
pub fn find_isomorphism(a: &FiniteLattice, b: &FiniteLattice) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.covers.len() != b.covers.len() {
        return None;
    }
    let (ra, rb) = (a.ranks(), b.ranks());
    let sig =
        |l: &FiniteLattice, r: &[usize], x: usize| (r[x], l.upper[x].len(), l.lower[x].len(), l.up[x].count_ones(..));
    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    fn go(
        k: usize,
        a: &FiniteLattice,
        b: &FiniteLattice,
        sa: &[(usize, usize, usize, usize)],
        sb: &[(usize, usize, usize, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == a.len() {
            return true;
        }
        let x = a.linear[k];
        for y in 0..b.len() {
            if used[y] || sa[x] != sb[y] {
                continue;
            }
            let consistent = a.linear[..k].iter().all(|&z| {
                let w = map[z];
                a.leq(z, x) == b.leq(w, y) && a.leq(x, z) == b.leq(y, w)
            });
            if consistent {
                map[x] = y;
                used[y] = true;
                if go(k + 1, a, b, sa, sb, map, used) {
                    return true;
                }
                used[y] = false;
                map[x] = usize::MAX;
            }
        }
        false
    }
    let sa: Vec<_> = a.elements().map(|x| sig(a, &ra, x)).collect();
    let sb: Vec<_> = b.elements().map(|x| sig(b, &rb, x)).collect();
    go(0, a, b, &sa, &sb, &mut map, &mut used).then_some(map)
}

/// A random lattice with exactly `size` elements (rejection sampling over
/// random bounded posets).
pub fn random_lattice<R: Rng>(rng: &mut R, size: usize) -> FiniteLattice {
    assert!(size >= 2);
    let mid = size - 2;
    let mut names = vec!["0".to_string()];
    names.extend((1..=mid).map(|i| format!("e{i}")));
    names.push("1".to_string());
    loop {
        let mut edges = Vec::new();
        for i in 1..=mid {
            edges.push((0, i));
            edges.push((i, size - 1));
            for j in i + 1..=mid {
                if rng.gen_bool(0.3) {
                    edges.push((i, j));
                }
            }
        }
        edges.push((0, size - 1));
        if let Ok(l) = FiniteLattice::new(format!("random{size}"), names.clone(), &edges) {
            return l;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub modular: bool,
    pub distributive: bool,
    pub complemented: bool,
    pub sectionally_complemented: bool,
    pub relatively_complemented: bool,
    pub atomistic: bool,
    pub semimodular: bool,
    pub geometric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simple: Option<bool>,
    pub height: usize,
}

impl FiniteLattice {
    /// Modular law `c ≤ a ⇒ a ∧ (b ∨ c) = (a ∧ b) ∨ c`.
    pub fn is_modular(&self) -> bool {
        self.modular_witness().is_none()
    }

    pub fn modular_witness(&self) -> Option<(usize, usize, usize)> {
        for a in self.elements() {
            for c in self.down[a].ones() {
                for b in self.elements() {
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.elements().all(|a| {
            self.elements().all(|b| {
                self.elements().all(|c| self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c)))
            })
        })
    }

    fn interval_complemented(&self, lo: usize, hi: usize) -> bool {
        let members = self.interval_elements(lo, hi);
        members.iter().all(|&x| members.iter().any(|&y| self.meet(x, y) == lo && self.join(x, y) == hi))
    }

    pub fn is_complemented(&self) -> bool {
        self.interval_complemented(self.bottom, self.top)
    }

    pub fn is_sectionally_complemented(&self) -> bool {
        self.elements().all(|b| self.interval_complemented(self.bottom, b))
    }

    pub fn is_relatively_complemented(&self) -> bool {
        self.elements().all(|a| self.up[a].ones().all(|b| self.interval_complemented(a, b)))
    }

    pub fn is_atomistic(&self) -> bool {
        let atoms = self.atoms();
        self.elements().all(|x| self.join_all(atoms.iter().copied().filter(|&p| self.leq(p, x))) == x)
    }

    /// Upper semimodularity: `a ∧ b ≺ a ⇒ b ≺ a ∨ b`.
    pub fn is_semimodular(&self) -> bool {
        self.elements().all(|a| {
            self.elements().all(|b| {
                let m = self.meet(a, b);
                !self.is_cover(m, a) || self.is_cover(b, self.join(a, b))
            })
        })
    }

    pub fn properties(&self) -> PropertyReport {
        let semimodular = self.is_semimodular();
        let atomistic = self.is_atomistic();
        PropertyReport {
            modular: self.is_modular(),
            distributive: self.is_distributive(),
            complemented: self.is_complemented(),
            sectionally_complemented: self.is_sectionally_complemented(),
            relatively_complemented: self.is_relatively_complemented(),
            atomistic,
            semimodular,
            geometric: semimodular && atomistic,
            simple: None,
            height: self.height(),
        }
    }
}
