//! The dimension monoid of a finite lattice, presented over its prime
//! intervals, and the checks that tie it to congruences and modularity.

use std::collections::{BTreeSet, HashMap};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::congruence::{all_congruences, principal_congruence, quotient_lattice, rectangular_extension, Congruence};
use crate::error::{Error, Result};
use crate::lattice::{dual, product, FiniteLattice, Interval};
use crate::primitive::{build_qosystem, semilattice_quotient, Comparison, DimVector, QoSystem};

/// Incomparable `a`, `b` satisfying the four caustic conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CausticPair {
    pub a: usize,
    pub b: usize,
    pub meet: usize,
    pub join: usize,
}

fn open_interval(l: &FiniteLattice, lo: usize, hi: usize) -> impl Iterator<Item = usize> + '_ {
    l.interval_elements(lo, hi).into_iter().filter(move |&x| x != lo && x != hi)
}

fn is_caustic(l: &FiniteLattice, a: usize, b: usize) -> bool {
    let (m, j) = (l.meet(a, b), l.join(a, b));
    open_interval(l, m, a).all(|x| l.join(x, b) == j)
        && open_interval(l, m, b).all(|y| l.join(a, y) == j)
        && open_interval(l, a, j).all(|x| l.meet(x, b) == m)
        && open_interval(l, b, j).all(|y| l.meet(a, y) == m)
}

/// All caustic pairs with `a < b` as indices.
pub fn caustic_pairs(l: &FiniteLattice) -> Vec<CausticPair> {
    let mut out = Vec::new();
    for a in l.elements() {
        for b in a + 1..l.len() {
            if !l.comparable(a, b) && is_caustic(l, a, b) {
                out.push(CausticPair { a, b, meet: l.meet(a, b), join: l.join(a, b) });
            }
        }
    }
    out
}

/// Relations over prime intervals: equalities, and absorptions `(p, q)`
/// meaning `‖p‖ ≪ ‖q‖`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CausticRelations {
    pub equalities: Vec<(Interval, Interval)>,
    pub absorptions: Vec<(Interval, Interval)>,
}

fn primes_inside(l: &FiniteLattice, lo: usize, hi: usize) -> Vec<Interval> {
    l.covers()
        .iter()
        .filter(|&&(p, q)| l.leq(lo, p) && l.leq(q, hi))
        .map(|&(p, q)| Interval { lower: p, upper: q })
        .collect()
}

pub fn caustic_relations(l: &FiniteLattice) -> CausticRelations {
    let mut eq = BTreeSet::new();
    let mut ab = BTreeSet::new();
    for cp in caustic_pairs(l) {
        let (m, j) = (cp.meet, cp.join);
        for (a, b) in [(cp.a, cp.b), (cp.b, cp.a)] {
            let firsts: Vec<usize> = l.upper_covers(m).iter().copied().filter(|&w| l.leq(w, b)).collect();
            let lasts_a: Vec<usize> = l.lower_covers(j).iter().copied().filter(|&v| l.leq(a, v)).collect();
            let lasts_b: Vec<usize> = l.lower_covers(j).iter().copied().filter(|&v| l.leq(b, v)).collect();
            for &w in &firsts {
                let first = Interval { lower: m, upper: w };
                for &v in &lasts_a {
                    eq.insert((first, Interval { lower: v, upper: j }));
                }
                for p in primes_inside(l, w, b) {
                    ab.insert((p, first));
                }
            }
            for &v in &lasts_b {
                let last = Interval { lower: v, upper: j };
                for p in primes_inside(l, b, v) {
                    ab.insert((p, last));
                }
            }
        }
    }
    CausticRelations { equalities: eq.into_iter().collect(), absorptions: ab.into_iter().collect() }
}

/// `ΔL` as `E(P)`, with the generator of every prime interval.
#[derive(Clone, Debug)]
pub struct DimensionMonoid<'a> {
    pub lattice: &'a FiniteLattice,
    pub qo: QoSystem,
    primes: Vec<Interval>,
    prime_index: HashMap<(usize, usize), usize>,
    gen: Vec<usize>,
    gen_vectors: Vec<DimVector>,
}

pub fn dimension_monoid(l: &FiniteLattice) -> DimensionMonoid<'_> {
    let primes: Vec<Interval> = l.covers().iter().map(|&(a, b)| Interval { lower: a, upper: b }).collect();
    let prime_index: HashMap<(usize, usize), usize> =
        primes.iter().enumerate().map(|(i, p)| ((p.lower, p.upper), i)).collect();
    let rel = caustic_relations(l);
    let id = |p: &Interval| prime_index[&(p.lower, p.upper)];
    let x: Vec<(usize, usize)> = rel.equalities.iter().map(|(p, q)| (id(p), id(q))).collect();
    let y: Vec<(usize, usize)> = rel.absorptions.iter().map(|(p, q)| (id(p), id(q))).collect();
    let (qo, gen) = build_qosystem(primes.len(), &x, &y);
    let gen_vectors = (0..qo.len()).map(|p| qo.generator(p)).collect();
    DimensionMonoid { lattice: l, qo, primes, prime_index, gen, gen_vectors }
}

impl<'a> DimensionMonoid<'a> {
    pub fn primes(&self) -> &[Interval] {
        &self.primes
    }

    /// The point of `P` generated by the prime interval `[a, b]`.
    pub fn point_of(&self, a: usize, b: usize) -> Option<usize> {
        self.prime_index.get(&(a, b)).map(|&i| self.gen[i])
    }

    pub fn point_of_prime(&self, i: usize) -> usize {
        self.gen[i]
    }

    pub fn generator_vector(&self, point: usize) -> &DimVector {
        &self.gen_vectors[point]
    }

    /// Prime intervals grouped by their point, in point order.
    pub fn classes(&self) -> Vec<Vec<Interval>> {
        let mut out = vec![Vec::new(); self.qo.len()];
        for (i, p) in self.primes.iter().enumerate() {
            out[self.gen[i]].push(*p);
        }
        out
    }

    /// `Δ(a, b)`; for incomparable arguments `Δ(a∧b, a∨b)`.
    pub fn delta(&self, a: usize, b: usize) -> DimVector {
        let l = self.lattice;
        if l.lt(b, a) {
            return self.delta(b, a);
        }
        if !l.leq(a, b) {
            return self.delta(l.meet(a, b), l.join(a, b));
        }
        let chain = l.canonical_chain(a, b);
        self.chain_value(&chain)
    }

    /// Sum of generator vectors along a chain of covers.
    pub fn chain_value(&self, chain: &[usize]) -> DimVector {
        chain.windows(2).fold(self.qo.zero(), |acc, w| {
            let p = self.point_of(w[0], w[1]).expect("chain steps are covers");
            &acc + &self.gen_vectors[p]
        })
    }

    pub fn delta_table(&self) -> DeltaTable {
        let l = self.lattice;
        let n = l.len();
        let mut t: Vec<Option<DimVector>> = vec![None; n * n];
        for &a in l.linear_extension().iter().rev() {
            for b in l.up_set(a).ones() {
                let v = if a == b {
                    self.qo.zero()
                } else {
                    let c = *l.upper_covers(a).iter().find(|&&u| l.leq(u, b)).unwrap();
                    let p = self.point_of(a, c).unwrap();
                    &self.gen_vectors[p] + t[c * n + b].as_ref().unwrap()
                };
                t[a * n + b] = Some(v);
            }
        }
        DeltaTable { n, table: t, meets: (0..n * n).map(|i| (l.meet(i / n, i % n), l.join(i / n, i % n))).collect() }
    }

    pub fn eval_word(&self, w: &DimensionWord) -> DimVector {
        w.terms.iter().fold(self.qo.zero(), |acc, &(k, a, b)| &acc + &self.delta(a, b).scale(k))
    }

    pub fn word_compare(&self, w1: &DimensionWord, w2: &DimensionWord) -> Comparison {
        Comparison::of(&self.eval_word(w1), &self.eval_word(w2))
    }

    /// Named form of a vector, for reports.
    pub fn describe(&self, v: &DimVector) -> String {
        let parts: Vec<String> =
            (0..self.qo.len()).filter(|&p| !v[p].is_zero()).map(|p| format!("{}:{}", self.qo.name(p), v[p])).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn interval_name(&self, iv: Interval) -> String {
        format!("{}..{}", self.lattice.name(iv.lower), self.lattice.name(iv.upper))
    }
}

/// `Δ(a, b)` for every pair, precomputed.
#[derive(Clone, Debug)]
pub struct DeltaTable {
    n: usize,
    table: Vec<Option<DimVector>>,
    meets: Vec<(usize, usize)>,
}

impl DeltaTable {
    pub fn get(&self, a: usize, b: usize) -> &DimVector {
        if let Some(v) = &self.table[a * self.n + b] {
            return v;
        }
        if let Some(v) = &self.table[b * self.n + a] {
            return v;
        }
        let (m, j) = self.meets[a * self.n + b];
        self.table[m * self.n + j].as_ref().unwrap()
    }
}

/// A formal sum `Σ k·Δ(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DimensionWord {
    pub terms: Vec<(u64, usize, usize)>,
}

impl DimensionWord {
    /// Parse `a..b + c..d + 2*(e..f)`; the empty string is the empty word.
    pub fn parse(l: &FiniteLattice, expr: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for raw in expr.split('+').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, body) = match raw.split_once('*') {
                Some((k, rest)) if k.trim().chars().all(|c| c.is_ascii_digit()) && !k.trim().is_empty() => {
                    let rest = rest.trim();
                    let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
                    (k.trim().parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?, inner.trim())
                }
                _ => (1, raw),
            };
            let (a, b) = body.split_once("..").ok_or_else(|| Error::Parse(format!("expected `a..b`, got `{body}`")))?;
            let (a, b) = (l.index_of(a.trim())?, l.index_of(b.trim())?);
            Interval::new(l, a, b)?;
            terms.push((k, a, b));
        }
        Ok(DimensionWord { terms })
    }

    pub fn len(&self) -> usize {
        self.terms.iter().map(|t| t.0 as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn mismatch(check: &str, w: Vec<String>) -> Error {
    Error::mismatch(check, w)
}

/// Lower sets of `P` against `Con L`, and the `∝` criterion on samples.
pub fn congruence_correspondence_check(l: &FiniteLattice, samples: usize, seed: u64) -> Result<String> {
    let d = dimension_monoid(l);
    let con = all_congruences(l)?;
    let v = semilattice_quotient(&d.qo)?;
    let primes = d.primes();
    // Θ(p) collapses q iff gen(q) ⊴ gen(p)
    for (i, p) in primes.iter().enumerate() {
        let theta = principal_congruence(l, p.lower, p.upper);
        for (j, q) in primes.iter().enumerate() {
            if theta.same(q.lower, q.upper) != d.qo.le(d.gen[j], d.gen[i]) {
                return Err(mismatch("principal congruence", vec![d.interval_name(*p), d.interval_name(*q)]));
            }
        }
    }
    // θ ↦ ↓{gen(p) : p collapsed by θ} is an order isomorphism
    let image = |t: &Congruence| -> Vec<bool> {
        let mut s = vec![false; d.qo.len()];
        for (i, p) in primes.iter().enumerate() {
            if t.same(p.lower, p.upper) {
                for (q, slot) in s.iter_mut().enumerate() {
                    *slot |= d.qo.le(q, d.gen[i]);
                }
            }
        }
        s
    };
    if con.len() != v.lower_sets.len() {
        return Err(mismatch(
            "congruence count",
            vec![format!("|Con L| = {}", con.len()), format!("lower sets = {}", v.lower_sets.len())],
        ));
    }
    let images: Vec<Vec<bool>> = con.congruences.iter().map(image).collect();
    for (i, s) in images.iter().enumerate() {
        if !v.lower_sets.contains(s) {
            return Err(mismatch("congruence image", vec![format!("θ{i}")]));
        }
        for (j, t) in images.iter().enumerate() {
            let sub = s.iter().zip(t).all(|(&a, &b)| !a || b);
            if sub != con.congruences[i].leq(&con.congruences[j]) {
                return Err(mismatch("congruence order", vec![format!("θ{i}"), format!("θ{j}")]));
            }
        }
    }
    // ⟨x,y⟩ ∈ Θ(a,b) iff Δ(x,y) ≤ n·Δ(a,b) for some n
    let mut rng = StdRng::seed_from_u64(seed);
    let n = l.len();
    let table = d.delta_table();
    let mut thetas: HashMap<(usize, usize), Congruence> = HashMap::new();
    for _ in 0..samples {
        let (x, y, a, b) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let theta = thetas.entry((a, b)).or_insert_with(|| principal_congruence(l, a, b));
        let (dxy, dab) = (table.get(x, y), table.get(a, b));
        let bound = dxy.max_finite() + 1;
        let bounded = (1..=bound).any(|k| dxy.leq(&dab.scale(k)));
        let support = dxy.support().iter().all(|&p| !dab[p].is_zero());
        if bounded != support || bounded != theta.same(x, y) {
            return Err(mismatch("proportionality", [x, y, a, b].iter().map(|&e| l.name(e).to_string()).collect()));
        }
    }
    Ok(format!("{} congruences = {} lower sets; {samples} quadruples", con.len(), v.lower_sets.len()))
}

/// Classes of prime intervals under transposition `[q∧r, q] ~ [r, q∨r]`.
pub fn projectivity_classes(l: &FiniteLattice) -> Vec<Vec<Interval>> {
    let primes = l.covers();
    let idx: HashMap<(usize, usize), usize> = primes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut root: Vec<usize> = (0..primes.len()).collect();
    fn find(root: &mut [usize], mut a: usize) -> usize {
        while root[a] != a {
            root[a] = root[root[a]];
            a = root[a];
        }
        a
    }
    for (i, &(p, q)) in primes.iter().enumerate() {
        for r in l.elements() {
            let j = l.join(q, r);
            if l.meet(q, r) == p && r != p {
                if let Some(&k) = idx.get(&(r, j)) {
                    let (a, b) = (find(&mut root, i), find(&mut root, k));
                    root[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Interval>> = Default::default();
    for (i, &(p, q)) in primes.iter().enumerate() {
        groups.entry(find(&mut root, i)).or_default().push(Interval { lower: p, upper: q });
    }
    groups.into_values().collect()
}

/// Join-irreducibles of a distributive lattice and their indicator map.
#[derive(Clone, Debug)]
pub struct DistributiveDim<'a> {
    pub lattice: &'a FiniteLattice,
    pub join_irreducibles: Vec<usize>,
}

impl<'a> DistributiveDim<'a> {
    /// `{j ∈ J | j ≤ b, j ≰ a}` as a 0/1 vector over `J`.
    pub fn indicator(&self, a: usize, b: usize) -> Vec<u64> {
        let l = self.lattice;
        self.join_irreducibles.iter().map(|&j| u64::from(l.leq(j, b) && !l.leq(j, a))).collect()
    }
}

pub fn distributive_dim(l: &FiniteLattice) -> Result<DistributiveDim<'_>> {
    if !l.is_distributive() {
        return Err(Error::NotDistributive);
    }
    Ok(DistributiveDim { lattice: l, join_irreducibles: l.join_irreducibles() })
}

/// Pipeline against the indicator formula: `j ↦ gen([j_*, j])` must be a
/// bijection onto an antichain of `P1` points matching every `Δ(a, b)`.
pub fn distributive_check(l: &FiniteLattice) -> Result<String> {
    let dd = distributive_dim(l)?;
    let d = dimension_monoid(l);
    let qo = &d.qo;
    if !qo.is_antichain() || !qo.p0().is_empty() || qo.len() != dd.join_irreducibles.len() {
        return Err(mismatch(
            "distributive shape",
            vec![format!("|P| = {}, |J| = {}", qo.len(), dd.join_irreducibles.len())],
        ));
    }
    let iota: Vec<usize> = dd.join_irreducibles.iter().map(|&j| d.point_of(l.lower_covers(j)[0], j).unwrap()).collect();
    if iota.iter().collect::<BTreeSet<_>>().len() != iota.len() {
        return Err(mismatch("distributive identification", vec!["not injective".into()]));
    }
    let table = d.delta_table();
    for a in l.elements() {
        for b in l.up_set(a).ones() {
            let ind = dd.indicator(a, b);
            let v = table.get(a, b);
            if iota.iter().zip(&ind).any(|(&p, &i)| v[p].finite() != Some(i)) {
                return Err(mismatch("distributive delta", vec![l.name(a).into(), l.name(b).into()]));
            }
        }
    }
    Ok(format!("{} join-irreducibles", iota.len()))
}

/// A refinement cell: step intervals of both chains, transposed through
/// a common middle interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchreierCell {
    pub first: Interval,
    pub second: Interval,
    pub middle: Interval,
}

/// Zassenhaus cells for chains `x` and `y` of the same interval.
pub fn schreier_refine(l: &FiniteLattice, x: &[usize], y: &[usize]) -> Result<Vec<Vec<SchreierCell>>> {
    if !l.is_modular() {
        return Err(Error::NotModular);
    }
    if x.first() != y.first() || x.last() != y.last() || x.is_empty() {
        return Err(Error::Parse("chains must share both endpoints".into()));
    }
    let (meet, join) = (|a, b| l.meet(a, b), |a, b| l.join(a, b));
    let mut out = Vec::new();
    for i in 0..x.len() - 1 {
        let mut row = Vec::new();
        for k in 0..y.len() - 1 {
            let first =
                Interval { lower: join(x[i], meet(x[i + 1], y[k])), upper: join(x[i], meet(x[i + 1], y[k + 1])) };
            let second =
                Interval { lower: join(y[k], meet(y[k + 1], x[i])), upper: join(y[k], meet(y[k + 1], x[i + 1])) };
            let middle =
                Interval { lower: join(meet(x[i], y[k + 1]), meet(x[i + 1], y[k])), upper: meet(x[i + 1], y[k + 1]) };
            row.push(SchreierCell { first, second, middle });
        }
        out.push(row);
    }
    Ok(out)
}

/// `[lo, hi] ↗ [lo', hi']`: `hi ∧ lo' = lo` and `hi ∨ lo' = hi'`.
pub fn transposes_up(l: &FiniteLattice, low: Interval, high: Interval) -> bool {
    l.meet(low.upper, high.lower) == low.lower && l.join(low.upper, high.lower) == high.upper
}

/// Schreier cells on pairs of maximal chains: cells transpose through the
/// middle, have equal dimension, and sum to the original steps.
pub fn schreier_check(l: &FiniteLattice, chain_limit: usize) -> Result<String> {
    let d = dimension_monoid(l);
    let t = d.delta_table();
    let mut cells = 0;
    for a in l.elements() {
        for b in l.up_set(a).ones() {
            let chains = l.maximal_chains(a, b, chain_limit);
            for x in &chains {
                for y in &chains {
                    let grid = schreier_refine(l, x, y)?;
                    for (i, row) in grid.iter().enumerate() {
                        let mut sum = d.qo.zero();
                        for c in row {
                            cells += 1;
                            if !transposes_up(l, c.middle, c.first)
                                || !transposes_up(l, c.middle, c.second)
                                || t.get(c.first.lower, c.first.upper) != t.get(c.second.lower, c.second.upper)
                            {
                                return Err(mismatch(
                                    "schreier cell",
                                    vec![d.interval_name(c.first), d.interval_name(c.second)],
                                ));
                            }
                            sum = &sum + t.get(c.first.lower, c.first.upper);
                        }
                        if &sum != t.get(x[i], x[i + 1]) {
                            return Err(mismatch("schreier row", vec![l.name(x[i]).into(), l.name(x[i + 1]).into()]));
                        }
                    }
                    for k in 0..y.len() - 1 {
                        let sum = grid
                            .iter()
                            .fold(d.qo.zero(), |acc, row| &acc + t.get(row[k].second.lower, row[k].second.upper));
                        if &sum != t.get(y[k], y[k + 1]) {
                            return Err(mismatch(
                                "schreier column",
                                vec![l.name(y[k]).into(), l.name(y[k + 1]).into()],
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{cells} cells"))
}

/// Pipeline generator classes equal projectivity classes, with `P` a
/// `P1` antichain; requires modularity.
pub fn modular_classes_check(l: &FiniteLattice) -> Result<String> {
    if !l.is_modular() {
        return Err(Error::NotModular);
    }
    let d = dimension_monoid(l);
    let mut ours = d.classes();
    let mut theirs = projectivity_classes(l);
    ours.sort();
    theirs.sort();
    if ours != theirs {
        return Err(mismatch("projectivity classes", vec![format!("{} vs {}", ours.len(), theirs.len())]));
    }
    if !d.qo.is_antichain() || !d.qo.p0().is_empty() {
        return Err(mismatch("free monoid", vec![format!("|P| = {}", d.qo.len())]));
    }
    Ok(format!("{} classes", ours.len()))
}

/// `L` modular iff `P` is an antichain without `P0`.
pub fn modularity_cancellativity_check(l: &FiniteLattice) -> Result<String> {
    let d = dimension_monoid(l);
    let free = d.qo.is_antichain() && d.qo.p0().is_empty();
    if free != l.is_modular() {
        return Err(mismatch("modular iff cancellative", vec![format!("modular = {}, free = {free}", l.is_modular())]));
    }
    Ok(format!("modular = {free}"))
}

/// The defining axioms and derived laws, exhaustively.
pub fn axiom_suite(l: &FiniteLattice) -> Result<String> {
    let d = dimension_monoid(l);
    let t = d.delta_table();
    let name = |x: usize| l.name(x).to_string();
    let zero = d.qo.zero();
    for a in l.elements() {
        if t.get(a, a) != &zero {
            return Err(mismatch("D0", vec![name(a)]));
        }
        for b in l.up_set(a).ones() {
            if (a == b) != t.get(a, b).is_zero() {
                return Err(mismatch("conicality", vec![name(a), name(b)]));
            }
            for c in l.up_set(b).ones() {
                if &(t.get(a, b) + t.get(b, c)) != t.get(a, c) {
                    return Err(mismatch("D1", vec![name(a), name(b), name(c)]));
                }
            }
            // every upper cover step gives the same value
            for &c in l.upper_covers(a) {
                if l.leq(c, b) && &(d.generator_vector(d.point_of(a, c).unwrap()) + t.get(c, b)) != t.get(a, b) {
                    return Err(mismatch("path independence", vec![name(a), name(b), name(c)]));
                }
            }
        }
        for b in l.elements() {
            if t.get(a, l.join(a, b)) != t.get(l.meet(a, b), b) {
                return Err(mismatch("D2", vec![name(a), name(b)]));
            }
            for c in l.elements() {
                if !t.get(a, c).leq(&(t.get(a, b) + t.get(b, c))) {
                    return Err(mismatch("triangle", vec![name(a), name(b), name(c)]));
                }
            }
        }
    }
    for a in l.elements() {
        for b in l.down_set(a).ones() {
            for c in l.elements() {
                let m = t.get(l.join(b, l.meet(a, c)), l.meet(a, l.join(b, c)));
                let rhs = &(t.get(l.meet(b, c), l.meet(a, c)) + t.get(l.join(b, c), l.join(a, c))) + m;
                if t.get(b, a) != &rhs {
                    return Err(mismatch("modular law", vec![name(a), name(b), name(c)]));
                }
            }
        }
    }
    Ok(format!("{} elements", l.len()))
}

fn induced_map(
    check: &str,
    src: &QoSystem,
    dst: &QoSystem,
    pairs: impl IntoIterator<Item = (usize, usize)>,
) -> Result<Vec<usize>> {
    let mut map = vec![usize::MAX; src.len()];
    for (p, q) in pairs {
        if map[p] != usize::MAX && map[p] != q {
            return Err(mismatch(check, vec![format!("{} has two images", src.name(p))]));
        }
        map[p] = q;
    }
    if !src.is_isomorphism(dst, &map) {
        return Err(mismatch(check, vec!["generator map is not an isomorphism".into()]));
    }
    Ok(map)
}

/// `Δ(A×B)` against the disjoint union of `ΔA` and `ΔB`.
pub fn product_check(a: &FiniteLattice, b: &FiniteLattice) -> Result<String> {
    let p = product(a, b)?;
    let (da, db, dp) = (dimension_monoid(a), dimension_monoid(b), dimension_monoid(&p));
    let union = da.qo.disjoint_union(&db.qo);
    let nb = b.len();
    let pairs = dp.primes().iter().map(|iv| {
        let (x, y) = ((iv.lower / nb, iv.lower % nb), (iv.upper / nb, iv.upper % nb));
        let target =
            if x.1 == y.1 { da.point_of(x.0, y.0).unwrap() } else { da.qo.len() + db.point_of(x.1, y.1).unwrap() };
        (dp.point_of(iv.lower, iv.upper).unwrap(), target)
    });
    induced_map("product", &dp.qo, &union, pairs)?;
    Ok(format!("|P| = {}", dp.qo.len()))
}

/// `Δ(L^op)` against `ΔL` with prime intervals reversed.
pub fn dual_check(l: &FiniteLattice) -> Result<String> {
    let op = dual(l);
    let (d, dop) = (dimension_monoid(l), dimension_monoid(&op));
    let pairs = dop
        .primes()
        .iter()
        .map(|iv| (dop.point_of(iv.lower, iv.upper).unwrap(), d.point_of(iv.upper, iv.lower).unwrap()));
    induced_map("dual", &dop.qo, &d.qo, pairs)?;
    Ok(format!("|P| = {}", d.qo.len()))
}

/// `Δ(L/θ)` against `P` minus the lower set of collapsed generators.
pub fn quotient_check(l: &FiniteLattice, theta: &Congruence) -> Result<String> {
    let d = dimension_monoid(l);
    let q = quotient_lattice(l, theta);
    let dq = dimension_monoid(&q.lattice);
    let mut removed = vec![false; d.qo.len()];
    for (i, iv) in d.primes().iter().enumerate() {
        if theta.same(iv.lower, iv.upper) {
            for (r, slot) in removed.iter_mut().enumerate() {
                *slot |= d.qo.le(r, d.gen[i]);
            }
        }
    }
    let keep: Vec<usize> = (0..d.qo.len()).filter(|&p| !removed[p]).collect();
    let kept = d.qo.restrict(&keep);
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut pairs = Vec::new();
    for (i, iv) in d.primes().iter().enumerate() {
        if theta.same(iv.lower, iv.upper) {
            continue;
        }
        let Some(&src) = pos.get(&d.gen[i]) else {
            return Err(mismatch("quotient", vec![format!("{} is surviving but removed", d.interval_name(*iv))]));
        };
        let (a, b) = (q.projection[iv.lower], q.projection[iv.upper]);
        let Some(dst) = dq.point_of(a, b) else {
            return Err(mismatch("quotient", vec![format!("{} does not map to a prime", d.interval_name(*iv))]));
        };
        pairs.push((src, dst));
    }
    induced_map("quotient", &kept, &dq.qo, pairs)?;
    if kept.len() <= 20 && kept.find_isomorphism(&dq.qo).is_none() {
        return Err(mismatch("quotient", vec!["isomorphism search failed".into()]));
    }
    Ok(format!("|P∖D| = {}", kept.len()))
}

/// Outcome of the bounded V-modularity search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VModularity {
    pub holds: bool,
    /// Prime `[a, b]` and interval `[c, d]` with `(a, b) ∈ Θ(c, d)` but
    /// `Δ(a, b)` outside the image of `Δ` on `[c, d]`.
    pub witness: Option<(Interval, Interval)>,
}

fn reachable(target: &DimVector, gens: &[&DimVector], cur: &DimVector, start: usize, left: usize) -> bool {
    if cur == target {
        return true;
    }
    if left == 0 {
        return false;
    }
    for (i, g) in gens.iter().enumerate().skip(start) {
        let next = cur + g;
        if next.leq(target) && next != *cur && reachable(target, gens, &next, i, left - 1) {
            return true;
        }
    }
    false
}

/// Bounded check: every prime `[a, b]` weakly projective into `[c, d]`
/// has `Δ(a, b)` a sum of at most `bound` generators from `[c, d]`.
///
/// For prime `[a, b]`, weak projectivity into `[c, d]` is the same as
/// `(a, b) ∈ Θ(c, d)`.
pub fn is_v_modular(l: &FiniteLattice, bound: usize) -> VModularity {
    let d = dimension_monoid(l);
    let mut intervals: Vec<(usize, usize, usize)> = Vec::new();
    for c in l.elements() {
        for e in l.up_set(c).ones() {
            if c != e {
                intervals.push((l.interval_elements(c, e).len(), c, e));
            }
        }
    }
    intervals.sort();
    for (_, c, e) in intervals {
        let theta = principal_congruence(l, c, e);
        let points: BTreeSet<usize> = d
            .primes()
            .iter()
            .enumerate()
            .filter(|(_, iv)| l.leq(c, iv.lower) && l.leq(iv.upper, e))
            .map(|(i, _)| d.gen[i])
            .collect();
        let gens: Vec<&DimVector> = points.iter().map(|&p| d.generator_vector(p)).collect();
        let mut done = BTreeSet::new();
        for (i, iv) in d.primes().iter().enumerate() {
            if !theta.same(iv.lower, iv.upper) || !done.insert(d.gen[i]) {
                continue;
            }
            if !reachable(d.generator_vector(d.gen[i]), &gens, &d.qo.zero(), 0, bound) {
                return VModularity { holds: false, witness: Some((*iv, Interval { lower: c, upper: e })) };
            }
        }
    }
    VModularity { holds: true, witness: None }
}

/// Multisets of size `1..=k` over `0..n`, nondecreasing.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &frontier {
            let start = w.last().copied().unwrap_or(0);
            for i in start..n {
                let mut v: Vec<usize> = w.clone();
                v.push(i);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// The map `ΔL -> Π Δ(L/θ_i)` preserves and reflects `≤` on words of at
/// most `k` generators (all words if few, else a seeded sample).
pub fn dep_check(l: &FiniteLattice, factors: &[Congruence], k: usize, max_words: usize, seed: u64) -> Result<String> {
    let d = dimension_monoid(l);
    let quotients: Vec<_> = factors.iter().map(|t| quotient_lattice(l, t)).collect();
    let dims: Vec<_> = quotients.iter().map(|q| dimension_monoid(&q.lattice)).collect();
    let mut words = multisets(d.primes().len(), k);
    if words.len() > max_words {
        let mut rng = StdRng::seed_from_u64(seed);
        for i in (1..words.len()).rev() {
            words.swap(i, rng.gen_range(0..=i));
        }
        words.truncate(max_words);
    }
    let primes = d.primes();
    let value = |w: &[usize]| w.iter().fold(d.qo.zero(), |acc, &i| &acc + d.generator_vector(d.gen[i]));
    let images = |w: &[usize]| -> Vec<DimVector> {
        quotients
            .iter()
            .zip(&dims)
            .map(|(q, dq)| {
                w.iter().fold(dq.qo.zero(), |acc, &i| {
                    let iv = primes[i];
                    &acc + &dq.delta(q.projection[iv.lower], q.projection[iv.upper])
                })
            })
            .collect()
    };
    let vals: Vec<DimVector> = words.iter().map(|w| value(w)).collect();
    let imgs: Vec<Vec<DimVector>> = words.iter().map(|w| images(w)).collect();
    let show = |w: &[usize]| w.iter().map(|&i| d.interval_name(primes[i])).collect::<Vec<_>>().join(" + ");
    for i in 0..words.len() {
        for j in 0..words.len() {
            let here = vals[i].leq(&vals[j]);
            let there = imgs[i].iter().zip(&imgs[j]).all(|(x, y)| x.leq(y));
            if here != there {
                return Err(mismatch("dimension extension", vec![show(&words[i]), show(&words[j])]));
            }
        }
    }
    Ok(format!("{} words, {} factors", words.len(), factors.len()))
}

/// `dep_check` against the rectangular extension.
pub fn dep_check_rect(l: &FiniteLattice, k: usize, seed: u64) -> Result<String> {
    let rect = rectangular_extension(l)?;
    let factors: Vec<Congruence> = rect.factors.iter().map(|(c, _)| c.clone()).collect();
    dep_check(l, &factors, k, 400, seed)
}
