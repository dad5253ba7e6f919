//! Hasse diagrams in DOT.

use std::fmt::Write;

use crate::dimension::DimensionMonoid;
use crate::lattice::FiniteLattice;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Covers become edges `lower -> upper`; with `labels`, each edge carries
/// the point of its prime interval.
pub fn export_dot(l: &FiniteLattice, labels: Option<&DimensionMonoid<'_>>) -> String {
    let mut s = String::new();
    writeln!(s, "digraph {} {{", quote(l.name_label())).unwrap();
    writeln!(s, "  rankdir=BT;").unwrap();
    for x in l.elements() {
        writeln!(s, "  n{x} [label={}];", quote(l.name(x))).unwrap();
    }
    for &(a, b) in l.covers() {
        match labels.and_then(|d| d.point_of(a, b).map(|p| d.qo.name(p).to_string())) {
            Some(p) => writeln!(s, "  n{a} -> n{b} [label={}];", quote(&p)).unwrap(),
            None => writeln!(s, "  n{a} -> n{b};").unwrap(),
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::builtin;
    use crate::dimension::dimension_monoid;

    #[test]
    fn counts() {
        let c2 = export_dot(&builtin("chain:2").unwrap(), None);
        assert_eq!((c2.matches("[label=").count(), c2.matches("->").count()), (2, 1));
        let n5 = builtin("N5").unwrap();
        let plain = export_dot(&n5, None);
        assert_eq!((plain.matches("[label=").count(), plain.matches("->").count()), (5, 5));
        let d = dimension_monoid(&n5);
        let labelled = export_dot(&n5, Some(&d));
        assert_eq!(labelled.matches("[label=").count(), 10);
        assert_eq!(labelled, export_dot(&n5, Some(&d)));
    }
}
