//! The builtin lattice catalog.

use crate::error::{Error, Result};
use crate::lattice::{FiniteLattice, MAX_ELEMENTS};

const COPROD_C2_C1: (usize, &[(usize, usize)]) =
    (9, &[(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 5), (4, 7), (5, 6), (5, 7), (6, 8), (7, 8)]);

const COPROD_C3_C1: (usize, &[(usize, usize)]) = (
    20,
    &[
        (0, 1),
        (0, 2),
        (1, 3),
        (2, 3),
        (2, 4),
        (3, 5),
        (4, 7),
        (4, 10),
        (5, 6),
        (5, 7),
        (6, 8),
        (6, 9),
        (7, 8),
        (8, 11),
        (9, 12),
        (10, 15),
        (11, 12),
        (11, 13),
        (12, 14),
        (13, 14),
        (13, 15),
        (14, 16),
        (15, 17),
        (16, 17),
        (16, 18),
        (17, 19),
        (18, 19),
    ],
);

/// A parsed builtin key such as `partition:4` or `subspace:2:3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Chain(usize),
    Boolean(usize),
    M3,
    N5,
    Partition(usize),
    Subspace(usize, usize),
    CoprodC2C1,
    CoprodC3C1,
}

impl Builtin {
    pub fn parse(input: &str) -> Result<Self> {
        let mut parts = input.split([':', ',']).map(str::trim);
        let key = parts.next().unwrap_or("").to_ascii_lowercase();
        let params: Vec<usize> =
            parts.map(|p| p.parse().map_err(|_| Error::UnknownBuiltin(input.to_string()))).collect::<Result<_>>()?;
        let unknown = || Error::UnknownBuiltin(input.to_string());
        let b = match (key.as_str(), params.as_slice()) {
            ("chain", [n]) => Builtin::Chain(*n),
            ("boolean", [n]) => Builtin::Boolean(*n),
            ("m3", []) => Builtin::M3,
            ("n5", []) => Builtin::N5,
            ("partition", [n]) => Builtin::Partition(*n),
            ("subspace", [q, n]) => Builtin::Subspace(*q, *n),
            ("coprod_c2_c1", []) => Builtin::CoprodC2C1,
            ("coprod_c3_c1", []) => Builtin::CoprodC3C1,
            _ => return Err(unknown()),
        };
        Ok(b)
    }

    pub fn key(&self) -> String {
        match self {
            Builtin::Chain(n) => format!("chain:{n}"),
            Builtin::Boolean(n) => format!("boolean:{n}"),
            Builtin::M3 => "M3".into(),
            Builtin::N5 => "N5".into(),
            Builtin::Partition(n) => format!("partition:{n}"),
            Builtin::Subspace(q, n) => format!("subspace:{q}:{n}"),
            Builtin::CoprodC2C1 => "coprod_c2_c1".into(),
            Builtin::CoprodC3C1 => "coprod_c3_c1".into(),
        }
    }

    pub fn build(&self) -> Result<FiniteLattice> {
        let key = self.key();
        let too_large = |why: &str| Error::ParamTooLarge(format!("{key}: {why}"));
        let l = match *self {
            Builtin::Chain(n) => {
                if n == 0 {
                    return Err(Error::Empty);
                }
                if n > MAX_ELEMENTS {
                    return Err(too_large("element guard"));
                }
                let names = (0..n).map(|i| i.to_string()).collect();
                let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
                FiniteLattice::new(key, names, &edges)?
            }
            Builtin::Boolean(n) => {
                if n > 13 {
                    return Err(too_large("element guard"));
                }
                boolean(n, key)?
            }
            Builtin::M3 => FiniteLattice::from_names(
                "M3",
                &["0", "a", "b", "c", "1"],
                &[("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
            )?,
            Builtin::N5 => FiniteLattice::from_names(
                "N5",
                &["0", "a", "b", "c", "1"],
                &[("0", "c"), ("c", "a"), ("a", "1"), ("0", "b"), ("b", "1")],
            )?,
            Builtin::Partition(n) => {
                if n == 0 {
                    return Err(Error::Empty);
                }
                if n > 5 {
                    return Err(too_large("partition lattices are limited to n ≤ 5"));
                }
                partition(n, key)?
            }
            Builtin::Subspace(q, n) => {
                if q != 2 && q != 3 {
                    return Err(Error::UnknownBuiltin(format!("{key}: field order must be 2 or 3")));
                }
                if n == 0 {
                    return Err(Error::Empty);
                }
                if q.checked_pow(n as u32).is_none_or(|s| s > 81) {
                    return Err(too_large("q^n must be at most 81"));
                }
                subspace(q, n, key)?
            }
            Builtin::CoprodC2C1 => hard_coded(key, COPROD_C2_C1)?,
            Builtin::CoprodC3C1 => hard_coded(key, COPROD_C3_C1)?,
        };
        Ok(l)
    }
}

/// Build the lattice named by a catalog key.
pub fn builtin(key: &str) -> Result<FiniteLattice> {
    Builtin::parse(key)?.build()
}

fn hard_coded(key: String, (n, covers): (usize, &[(usize, usize)])) -> Result<FiniteLattice> {
    let names = (0..n).map(|i| format!("x{i}")).collect();
    FiniteLattice::new(key, names, covers)
}

fn boolean(n: usize, key: String) -> Result<FiniteLattice> {
    let size = 1usize << n;
    let name = |s: usize| {
        if s == 0 {
            "0".to_string()
        } else {
            let sep = if n >= 10 { "." } else { "" };
            (0..n).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(sep)
        }
    };
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&s| (s.count_ones(), name(s)));
    let pos: Vec<usize> = {
        let mut p = vec![0; size];
        for (i, &s) in order.iter().enumerate() {
            p[s] = i;
        }
        p
    };
    let names = order.iter().map(|&s| name(s)).collect();
    let mut edges = Vec::new();
    for s in 0..size {
        for i in 0..n {
            if s >> i & 1 == 0 {
                edges.push((pos[s], pos[s | 1 << i]));
            }
        }
    }
    FiniteLattice::new(key, names, &edges)
}

/// Set partitions of `{1..n}` as block-label vectors (restricted growth).
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            go(i + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        let mut cur = vec![0];
        go(1, n, &mut cur, 0, &mut out);
    }
    out
}

fn partition(n: usize, key: String) -> Result<FiniteLattice> {
    let mut parts = set_partitions(n);
    let nblocks = |p: &[usize]| p.iter().max().map_or(0, |m| m + 1);
    parts.sort_by_key(|p| (std::cmp::Reverse(nblocks(p)), p.clone()));
    let blocks = |p: &[usize]| -> Vec<Vec<usize>> {
        let mut bs = vec![Vec::new(); nblocks(p)];
        for (i, &b) in p.iter().enumerate() {
            bs[b].push(i);
        }
        bs
    };
    let names = parts
        .iter()
        .map(|p| {
            blocks(p)
                .iter()
                .map(|b| b.iter().map(|i| (i + 1).to_string()).collect::<String>())
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    let refines = |p: &[usize], q: &[usize]| (0..n).all(|i| (0..n).all(|j| p[i] != p[j] || q[i] == q[j]));
    let mut edges = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for (j, q) in parts.iter().enumerate() {
            if nblocks(q) + 1 == nblocks(p) && refines(p, q) {
                edges.push((i, j));
            }
        }
    }
    FiniteLattice::new(key, names, &edges)
}

/// Reduced row echelon bases of all subspaces of GF(q)^n.
fn echelon_bases(q: usize, n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for k in 0..=n {
        // choose pivot columns
        let mut pivots = Vec::new();
        fn choose(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for c in start..n {
                cur.push(c);
                choose(c + 1, k, n, cur, out);
                cur.pop();
            }
        }
        choose(0, k, n, &mut Vec::new(), &mut pivots);
        for piv in pivots {
            // free entries: row r, column c > piv[r], c not a pivot
            let free: Vec<(usize, usize)> =
                (0..k).flat_map(|r| (piv[r] + 1..n).filter(|c| !piv.contains(c)).map(move |c| (r, c))).collect();
            let combos = q.pow(free.len() as u32);
            for m in 0..combos {
                let mut rows = vec![vec![0usize; n]; k];
                for (r, &p) in piv.iter().enumerate() {
                    rows[r][p] = 1;
                }
                let mut code = m;
                for &(r, c) in &free {
                    rows[r][c] = code % q;
                    code /= q;
                }
                out.push(rows);
            }
        }
    }
    out
}

fn span(rows: &[Vec<usize>], q: usize, n: usize) -> Vec<bool> {
    let size = q.pow(n as u32);
    let mut member = vec![false; size];
    let k = rows.len();
    for m in 0..q.pow(k as u32) {
        let mut v = vec![0usize; n];
        let mut code = m;
        for row in rows {
            let c = code % q;
            code /= q;
            for (x, &r) in v.iter_mut().zip(row) {
                *x = (*x + c * r) % q;
            }
        }
        let id = v.iter().fold(0, |acc, &d| acc * q + d);
        member[id] = true;
    }
    member
}

fn subspace(q: usize, n: usize, key: String) -> Result<FiniteLattice> {
    let mut bases = echelon_bases(q, n);
    let row_name = |r: &Vec<usize>| r.iter().map(|d| d.to_string()).collect::<String>();
    let base_name = |b: &Vec<Vec<usize>>| {
        if b.is_empty() {
            "0".to_string()
        } else {
            b.iter().map(row_name).collect::<Vec<_>>().join(",")
        }
    };
    bases.sort_by_key(|b| (b.len(), base_name(b)));
    let spans: Vec<Vec<bool>> = bases.iter().map(|b| span(b, q, n)).collect();
    let names = bases.iter().map(base_name).collect();
    let mut edges = Vec::new();
    for i in 0..bases.len() {
        for j in 0..bases.len() {
            if bases[j].len() == bases[i].len() + 1 && spans[i].iter().zip(&spans[j]).all(|(&a, &b)| !a || b) {
                edges.push((i, j));
            }
        }
    }
    FiniteLattice::new(key, names, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::find_isomorphism;

    #[test]
    fn sizes() {
        let cases = [
            ("chain:4", 4),
            ("boolean:3", 8),
            ("partition:3", 5),
            ("partition:4", 15),
            ("partition:5", 52),
            ("subspace:2:2", 5),
            ("subspace:2:3", 16),
            ("subspace:3:2", 6),
            ("subspace:2:4", 67),
            ("subspace:3:3", 28),
            ("coprod_c2_c1", 9),
            ("coprod_c3_c1", 20),
        ];
        for (k, n) in cases {
            assert_eq!(builtin(k).unwrap().len(), n, "{k}");
        }
    }

    #[test]
    fn chain_covers() {
        assert_eq!(builtin("chain:4").unwrap().covers().len(), 3);
    }

    #[test]
    fn partition_three_shape() {
        let p3 = builtin("partition:3").unwrap();
        assert_eq!(p3.atoms().len(), 3);
        assert_eq!(p3.height(), 2);
        assert_eq!(p3.name(p3.bottom()), "1|2|3");
        assert_eq!(p3.name(p3.top()), "123");
    }

    #[test]
    fn subspace_plane_is_m3() {
        let s = builtin("subspace:2:2").unwrap();
        assert_eq!(s.atoms().len(), 3);
        assert!(find_isomorphism(&s, &builtin("M3").unwrap()).is_some());
    }

    #[test]
    fn subspaces_are_complemented_modular() {
        for k in ["subspace:2:1", "subspace:2:3", "subspace:3:2", "subspace:3:3", "subspace:2:4"] {
            let l = builtin(k).unwrap();
            assert!(l.is_modular() && l.is_complemented(), "{k}");
        }
    }

    #[test]
    fn coproducts_are_lattices() {
        let c2 = builtin("coprod_c2_c1").unwrap();
        assert_eq!(c2.covers().len(), 11);
        let c3 = builtin("coprod_c3_c1").unwrap();
        assert_eq!(c3.covers().len(), 27);
    }

    #[test]
    fn guards() {
        assert!(matches!(builtin("partition:6"), Err(Error::ParamTooLarge(_))));
        assert!(matches!(builtin("subspace:3:5"), Err(Error::ParamTooLarge(_))));
        assert!(matches!(builtin("chain:20000"), Err(Error::ParamTooLarge(_))));
        assert!(matches!(builtin("torus:3"), Err(Error::UnknownBuiltin(_))));
    }
}
