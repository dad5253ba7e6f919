//! Builtin lattices with the shape of their dimension monoids.

use crate::dimension::DimensionMonoid;

/// Expected shape of `P` for one builtin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub points: usize,
    /// Points `p` with `e_p = 2e_p`.
    pub idempotent: usize,
    pub antichain: bool,
}

impl Expectation {
    pub const fn free(points: usize) -> Self {
        Expectation { points, idempotent: 0, antichain: true }
    }

    pub fn of(d: &DimensionMonoid<'_>) -> Self {
        Expectation { points: d.qo.len(), idempotent: d.qo.p0().len(), antichain: d.qo.is_antichain() }
    }

    pub fn headline(&self) -> String {
        match *self {
            Expectation { points: 0, .. } => "0".into(),
            Expectation { points: 1, idempotent: 0, .. } => "Z⁺".into(),
            Expectation { points: 1, idempotent: 1, .. } => "2".into(),
            Expectation { points, idempotent: 0, antichain: true } => format!("(Z⁺){}", superscript(points)),
            Expectation { points, idempotent, .. } => format!("{points} classes, {idempotent} idempotent"),
        }
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub key: String,
    pub expectation: Expectation,
}

impl CatalogEntry {
    fn new(key: impl Into<String>, expectation: Expectation) -> Self {
        CatalogEntry { key: key.into(), expectation }
    }

    pub fn line(&self) -> String {
        format!("{} → {}", self.key, self.expectation.headline())
    }
}

const IDEMPOTENT_POINT: Expectation = Expectation { points: 1, idempotent: 1, antichain: true };

pub fn entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for n in 1..=8 {
        out.push(CatalogEntry::new(format!("chain:{n}"), Expectation::free(n - 1)));
    }
    for n in 1..=4 {
        out.push(CatalogEntry::new(format!("boolean:{n}"), Expectation::free(n)));
    }
    out.push(CatalogEntry::new("M3", Expectation::free(1)));
    out.push(CatalogEntry::new("N5", Expectation { points: 3, idempotent: 0, antichain: false }));
    out.push(CatalogEntry::new("partition:1", Expectation::free(0)));
    out.push(CatalogEntry::new("partition:2", Expectation::free(1)));
    out.push(CatalogEntry::new("partition:3", Expectation::free(1)));
    out.push(CatalogEntry::new("partition:4", IDEMPOTENT_POINT));
    out.push(CatalogEntry::new("partition:5", IDEMPOTENT_POINT));
    for n in 1..=4 {
        out.push(CatalogEntry::new(format!("subspace:2:{n}"), Expectation::free(1)));
    }
    for n in 1..=3 {
        out.push(CatalogEntry::new(format!("subspace:3:{n}"), Expectation::free(1)));
    }
    out.push(CatalogEntry::new("coprod_c2_c1", Expectation { points: 5, idempotent: 0, antichain: false }));
    out.push(CatalogEntry::new("coprod_c3_c1", Expectation { points: 8, idempotent: 1, antichain: false }));
    out
}

pub fn text() -> String {
    let mut s = String::from(
        "builtins:\n  chain:N  boolean:N (N ≤ 13)  M3  N5  partition:N (N ≤ 5)\n  \
         subspace:Q:N (Q ∈ {2,3}, Q^N ≤ 81)  coprod_c2_c1  coprod_c3_c1\n\nexpected dimension monoids:\n",
    );
    for e in entries() {
        s.push_str("  ");
        s.push_str(&e.line());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::dimension::dimension_monoid;

    #[test]
    fn headlines() {
        let t = text();
        for needle in ["partition:4 → 2", "coprod_c3_c1 → 8 classes, 1 idempotent", "boolean:3 → (Z⁺)³", "M3 → Z⁺"]
        {
            assert!(t.contains(needle), "{needle}");
        }
    }

    #[test]
    fn small_entries_hold() {
        // coprod_c3_c1 is compared by the acceptance suite
        let skip = |k: &str| k.starts_with("partition:5") || k.starts_with("subspace") || k == "coprod_c3_c1";
        for e in entries().iter().filter(|e| !skip(&e.key)) {
            let l = builtin(&e.key).unwrap();
            assert_eq!(Expectation::of(&dimension_monoid(&l)), e.expectation, "{}", e.key);
        }
    }
}
