//! Congruences of finite lattices, the congruence lattice, quotients and
//! the rectangular extension.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::lattice::{product_many, FiniteLattice};

/// Guard on the number of congruences enumerated.
pub const MAX_CONGRUENCES: usize = 1 << 16;

#[derive(Clone, Debug)]
struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge; the smaller index becomes the root. Returns false if already merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// A partition of the elements, stored as "least index of my block".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    class: Vec<usize>,
}

impl Congruence {
    pub fn identity(n: usize) -> Self {
        Congruence { class: (0..n).collect() }
    }

    pub fn coarse(n: usize) -> Self {
        Congruence { class: vec![0; n] }
    }

    fn from_sets(mut ds: DisjointSets) -> Self {
        let n = ds.parent.len();
        Congruence { class: (0..n).map(|x| ds.find(x)).collect() }
    }

    fn to_sets(&self) -> DisjointSets {
        DisjointSets { parent: self.class.clone() }
    }

    /// Validate a block list against the lattice operations.
    pub fn from_blocks(l: &FiniteLattice, blocks: &[Vec<usize>]) -> Result<Self> {
        let n = l.len();
        let mut seen = vec![false; n];
        let mut ds = DisjointSets::new(n);
        for b in blocks {
            for &x in b {
                if x >= n {
                    return Err(Error::UnknownElement(format!("#{x}")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::Duplicate(l.name(x).to_string()));
                }
                ds.union(b[0], x);
            }
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(Error::NotACongruence(format!("{} is in no block", l.name(x))));
        }
        let c = Congruence::from_sets(ds);
        match c.compatibility_witness(l) {
            None => Ok(c),
            Some((x, y, z)) => {
                Err(Error::NotACongruence(format!("{} ≡ {} is not preserved by {}", l.name(x), l.name(y), l.name(z))))
            }
        }
    }

    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    /// Least index in the block of `x`.
    pub fn class_of(&self, x: usize) -> usize {
        self.class[x]
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.class[x] == self.class[y]
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (x, &c) in self.class.iter().enumerate() {
            m.entry(c).or_default().push(x);
        }
        m.into_values().collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.class.iter().enumerate().filter(|&(x, &c)| x == c).count()
    }

    pub fn is_identity(&self) -> bool {
        self.class.iter().enumerate().all(|(x, &c)| x == c)
    }

    pub fn is_coarse(&self) -> bool {
        self.class.iter().all(|&c| c == 0)
    }

    /// Refinement order: every block of `self` lies in a block of `other`.
    pub fn leq(&self, other: &Congruence) -> bool {
        self.class.iter().enumerate().all(|(x, &c)| other.class[x] == other.class[c])
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut ds = self.to_sets();
        for (x, &c) in other.class.iter().enumerate() {
            ds.union(x, c);
        }
        Congruence::from_sets(ds)
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let mut m: HashMap<(usize, usize), usize> = HashMap::new();
        let class = (0..self.len()).map(|x| *m.entry((self.class[x], other.class[x])).or_insert(x)).collect();
        Congruence { class }
    }

    /// First `(x, y, z)` with `x ≡ y` but `x∧z ≢ y∧z` or `x∨z ≢ y∨z`.
    pub fn compatibility_witness(&self, l: &FiniteLattice) -> Option<(usize, usize, usize)> {
        for x in l.elements() {
            let y = self.class[x];
            if x == y {
                continue;
            }
            for z in l.elements() {
                if !self.same(l.meet(x, z), l.meet(y, z)) || !self.same(l.join(x, z), l.join(y, z)) {
                    return Some((x, y, z));
                }
            }
        }
        None
    }

    pub fn is_compatible(&self, l: &FiniteLattice) -> bool {
        self.compatibility_witness(l).is_none()
    }

    pub fn to_named_blocks(&self, l: &FiniteLattice) -> Vec<Vec<String>> {
        self.blocks().iter().map(|b| b.iter().map(|&x| l.name(x).to_string()).collect()).collect()
    }
}

/// Close a partially merged state under the lattice operations.
fn close(l: &FiniteLattice, ds: &mut DisjointSets, mut pending: Vec<(usize, usize)>) {
    while let Some((x, y)) = pending.pop() {
        for z in l.elements() {
            let (a, b) = (l.meet(x, z), l.meet(y, z));
            if ds.union(a, b) {
                pending.push((a, b));
            }
            let (a, b) = (l.join(x, z), l.join(y, z));
            if ds.union(a, b) {
                pending.push((a, b));
            }
        }
    }
}

/// The smallest congruence identifying `a` and `b`.
pub fn principal_congruence(l: &FiniteLattice, a: usize, b: usize) -> Congruence {
    congruence_generated(l, &[(a, b)])
}

/// The smallest congruence identifying every given pair.
pub fn congruence_generated(l: &FiniteLattice, pairs: &[(usize, usize)]) -> Congruence {
    let mut ds = DisjointSets::new(l.len());
    let mut pending = Vec::new();
    for &(a, b) in pairs {
        if ds.union(a, b) {
            pending.push((a, b));
        }
    }
    close(l, &mut ds, pending);
    Congruence::from_sets(ds)
}

/// Join of the principal congruences of the given pairs.
pub fn congruence_from_prime_pairs(l: &FiniteLattice, pairs: &[(usize, usize)]) -> Congruence {
    congruence_generated(l, pairs)
}

#[derive(Clone, Debug)]
pub struct CongruenceLattice {
    /// Identity first, then by decreasing number of blocks.
    pub congruences: Vec<Congruence>,
    /// `lattice` has element `i` for `congruences[i]`, ordered by refinement.
    pub lattice: FiniteLattice,
    pub join_irreducibles: Vec<usize>,
    pub meet_irreducibles: Vec<usize>,
}

impl CongruenceLattice {
    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn position(&self, c: &Congruence) -> Option<usize> {
        self.congruences.iter().position(|d| d == c)
    }
}

/// Every congruence, as joins of principal congruences of prime intervals.
pub fn all_congruences(l: &FiniteLattice) -> Result<CongruenceLattice> {
    let mut principal: Vec<Congruence> = l.covers().iter().map(|&(a, b)| principal_congruence(l, a, b)).collect();
    principal.sort();
    principal.dedup();
    let identity = Congruence::identity(l.len());
    let mut seen: HashSet<Congruence> = HashSet::from([identity.clone()]);
    let mut all = vec![identity];
    let mut i = 0;
    while i < all.len() {
        for p in &principal {
            let j = all[i].join(p);
            if seen.insert(j.clone()) {
                if all.len() >= MAX_CONGRUENCES {
                    return Err(Error::ParamTooLarge("too many congruences".into()));
                }
                all.push(j);
            }
        }
        i += 1;
    }
    all.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
    let names = (0..all.len()).map(|i| format!("θ{i}")).collect();
    let lattice = FiniteLattice::from_order(&format!("Con({})", l.name_label()), names, |i, j| all[i].leq(&all[j]))?;
    let join_irreducibles = lattice.join_irreducibles();
    let meet_irreducibles = lattice.meet_irreducibles();
    Ok(CongruenceLattice { congruences: all, lattice, join_irreducibles, meet_irreducibles })
}

/// `L/θ` with the projection `x ↦ [x]`.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub lattice: FiniteLattice,
    pub projection: Vec<usize>,
}

/// Blocks become elements named `[x]` after their least member.
pub fn quotient_lattice(l: &FiniteLattice, theta: &Congruence) -> Quotient {
    let blocks = theta.blocks();
    let bottoms: Vec<usize> = blocks.iter().map(|b| l.meet_all(b.iter().copied())).collect();
    let mut projection = vec![0; l.len()];
    for (i, b) in blocks.iter().enumerate() {
        for &x in b {
            projection[x] = i;
        }
    }
    let names = bottoms.iter().map(|&x| format!("[{}]", l.name(x))).collect();
    let lattice =
        FiniteLattice::from_order(&format!("{}/θ", l.name_label()), names, |i, j| l.leq(bottoms[i], bottoms[j]))
            .expect("quotient of a lattice is a lattice");
    Quotient { lattice, projection }
}

#[derive(Clone, Debug)]
pub struct RectangularExtension {
    pub lattice: FiniteLattice,
    /// The meet-irreducible congruences used, with their quotients.
    pub factors: Vec<(Congruence, Quotient)>,
    pub embedding: Vec<usize>,
}

/// Product of the quotients by all non-coarse meet-irreducible congruences.
pub fn rectangular_extension(l: &FiniteLattice) -> Result<RectangularExtension> {
    let con = all_congruences(l)?;
    let factors: Vec<(Congruence, Quotient)> = con
        .meet_irreducibles
        .iter()
        .map(|&i| con.congruences[i].clone())
        .filter(|c| !c.is_coarse())
        .map(|c| {
            let q = quotient_lattice(l, &c);
            (c, q)
        })
        .collect();
    let parts: Vec<&FiniteLattice> = factors.iter().map(|(_, q)| &q.lattice).collect();
    let (lattice, strides) = product_many(&parts)?;
    let embedding: Vec<usize> =
        l.elements().map(|x| factors.iter().zip(&strides).map(|((_, q), s)| q.projection[x] * s).sum()).collect();
    let mut seen = HashSet::new();
    for (x, &e) in embedding.iter().enumerate() {
        if !seen.insert(e) {
            return Err(Error::mismatch("rect embedding", vec![l.name(x).to_string()]));
        }
    }
    Ok(RectangularExtension { lattice: lattice.with_name(format!("rect({})", l.name_label())), factors, embedding })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::lattice::find_isomorphism;

    /// All compatible partitions, by brute force.
    fn brute_congruences(l: &FiniteLattice) -> Vec<Congruence> {
        let n = l.len();
        let mut out = Vec::new();
        fn go(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            let max = cur.iter().copied().max().map_or(0, |m| m + 1);
            for b in 0..=max {
                cur.push(b);
                go(i + 1, n, cur, out);
                cur.pop();
            }
        }
        let mut labels = Vec::new();
        go(0, n, &mut Vec::new(), &mut labels);
        for lab in labels {
            let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (x, &b) in lab.iter().enumerate() {
                blocks.entry(b).or_default().push(x);
            }
            let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
            if let Ok(c) = Congruence::from_blocks(l, &blocks) {
                out.push(c);
            }
        }
        out.sort();
        out
    }

    fn named(l: &FiniteLattice, c: &Congruence) -> Vec<Vec<String>> {
        let mut b = c.to_named_blocks(l);
        for x in &mut b {
            x.sort();
        }
        b.sort();
        b
    }

    #[test]
    fn pentagon_principals() {
        let l = builtin("N5").unwrap();
        let ix = |s| l.index_of(s).unwrap();
        let t = principal_congruence(&l, ix("c"), ix("a"));
        assert_eq!(named(&l, &t), vec![vec!["0"], vec!["1"], vec!["a", "c"], vec!["b"]]);
        let t = principal_congruence(&l, ix("0"), ix("b"));
        assert_eq!(named(&l, &t), vec![vec!["0", "b"], vec!["1", "a", "c"]]);
        assert!(principal_congruence(&l, ix("a"), ix("a")).is_identity());
        // agree with the brute-force list
        let brute = brute_congruences(&l);
        for x in l.elements() {
            for y in l.elements() {
                let p = principal_congruence(&l, x, y);
                let least = brute
                    .iter()
                    .filter(|c| c.same(x, y))
                    .find(|c| brute.iter().filter(|d| d.same(x, y)).all(|d| c.leq(d)));
                assert_eq!(Some(&p), least);
            }
        }
    }

    #[test]
    fn congruence_lattice_matches_brute_force() {
        for k in ["N5", "M3", "chain:3", "chain:4", "boolean:3", "coprod_c2_c1", "partition:3", "subspace:3:2"] {
            let l = builtin(k).unwrap();
            let mut fast = all_congruences(&l).unwrap().congruences;
            fast.sort();
            assert_eq!(fast, brute_congruences(&l), "{k}");
        }
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let l = crate::lattice::random_lattice(&mut rng, 8);
            let mut fast = all_congruences(&l).unwrap().congruences;
            fast.sort();
            assert_eq!(fast, brute_congruences(&l));
        }
    }

    #[test]
    fn congruence_lattice_sizes() {
        assert_eq!(all_congruences(&builtin("N5").unwrap()).unwrap().len(), 5);
        assert_eq!(all_congruences(&builtin("M3").unwrap()).unwrap().len(), 2);
        let c3 = all_congruences(&builtin("chain:3").unwrap()).unwrap();
        assert!(find_isomorphism(&c3.lattice, &builtin("boolean:2").unwrap()).is_some());
    }

    #[test]
    fn congruence_lattices_are_distributive() {
        for k in ["N5", "partition:4", "coprod_c3_c1", "boolean:3", "chain:5"] {
            assert!(all_congruences(&builtin(k).unwrap()).unwrap().lattice.is_distributive(), "{k}");
        }
    }

    #[test]
    fn theta_of_a_pair_equals_theta_of_meet_join() {
        let l = builtin("coprod_c2_c1").unwrap();
        for a in l.elements() {
            for b in l.elements() {
                assert_eq!(principal_congruence(&l, a, b), principal_congruence(&l, l.meet(a, b), l.join(a, b)));
            }
        }
    }

    #[test]
    fn quotients() {
        let l = builtin("N5").unwrap();
        let ix = |s| l.index_of(s).unwrap();
        let id = quotient_lattice(&l, &Congruence::identity(l.len()));
        assert!(find_isomorphism(&id.lattice, &l).is_some());
        assert_eq!(quotient_lattice(&l, &Congruence::coarse(l.len())).lattice.len(), 1);
        let q = quotient_lattice(&l, &principal_congruence(&l, ix("c"), ix("a")));
        assert!(find_isomorphism(&q.lattice, &builtin("boolean:2").unwrap()).is_some());
        assert_eq!(q.lattice.name(q.projection[ix("a")]), "[c]");
    }

    #[test]
    fn projection_kernel_is_theta() {
        let l = builtin("coprod_c2_c1").unwrap();
        for t in all_congruences(&l).unwrap().congruences {
            let q = quotient_lattice(&l, &t);
            for x in l.elements() {
                for y in l.elements() {
                    assert_eq!(t.same(x, y), q.projection[x] == q.projection[y]);
                }
            }
        }
    }

    #[test]
    fn rectangular_extensions() {
        let m3 = builtin("M3").unwrap();
        assert!(find_isomorphism(&rectangular_extension(&m3).unwrap().lattice, &m3).is_some());
        let c3 = builtin("chain:3").unwrap();
        let r = rectangular_extension(&c3).unwrap();
        assert!(find_isomorphism(&r.lattice, &builtin("boolean:2").unwrap()).is_some());
        let n5 = builtin("N5").unwrap();
        let r = rectangular_extension(&n5).unwrap();
        let distinct: HashSet<_> = r.embedding.iter().collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn prime_pair_joins() {
        let n5 = builtin("N5").unwrap();
        let ix = |s| n5.index_of(s).unwrap();
        assert!(congruence_from_prime_pairs(&n5, &[]).is_identity());
        assert!(congruence_from_prime_pairs(&n5, &[(ix("0"), ix("c")), (ix("0"), ix("b"))]).is_coarse());
        let m3 = builtin("M3").unwrap();
        assert!(congruence_from_prime_pairs(&m3, m3.covers()).is_coarse());
    }

    #[test]
    fn from_blocks_rejects_incompatible() {
        let n5 = builtin("N5").unwrap();
        let ix = |s| n5.index_of(s).unwrap();
        let blocks = vec![vec![ix("0"), ix("c")], vec![ix("a")], vec![ix("b")], vec![ix("1")]];
        assert!(matches!(Congruence::from_blocks(&n5, &blocks), Err(Error::NotACongruence(_))));
    }
}
