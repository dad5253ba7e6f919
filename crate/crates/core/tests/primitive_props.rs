use dimw_core::builtins::builtin;
use dimw_core::dimension::dimension_monoid;
use dimw_core::primitive::{all_qo_systems, random_qo_system, semilattice_quotient, DimVector, ExtNat, QoSystem};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// `all_qo_systems(max)` plus the systems of a few small lattices.
fn systems(max: usize) -> Vec<QoSystem> {
    let mut out = all_qo_systems(max);
    for key in ["N5", "M3", "boolean:2", "chain:3", "partition:4", "coprod_c2_c1"] {
        out.push(dimension_monoid(&builtin(key).unwrap()).qo);
    }
    out
}

#[test]
fn reduced_round_trip() {
    for qo in systems(4) {
        for x in qo.enumerate_f(3).unwrap() {
            let r = qo.to_reduced(&x).unwrap();
            assert_eq!(qo.from_reduced(&r).unwrap(), x);
            assert_eq!(qo.to_reduced(&qo.from_reduced(&r).unwrap()).unwrap(), r);
        }
    }
}

#[test]
fn componentwise_order_is_algebraic() {
    for qo in systems(4) {
        let grid = qo.enumerate_f(if qo.len() <= 3 { 2 } else { 1 }).unwrap();
        for x in &grid {
            for y in &grid {
                let exists = grid.iter().any(|t| &(x + t) == y);
                assert_eq!(x.leq(y), exists, "{x:?} {y:?} in {:?}", qo.pairs());
                if x.leq(y) {
                    let t = qo.residual(x, y).unwrap();
                    assert!(qo.in_f(&t) && &(x + &t) == y);
                }
            }
        }
    }
}

#[test]
fn semilattice_classes_match_proportionality() {
    for qo in systems(4) {
        let quotient = semilattice_quotient(&qo).unwrap();
        let grid = qo.enumerate_f(2).unwrap();
        for x in &grid {
            for y in &grid {
                let prop = (1..=5).any(|n| x.leq(&y.scale(n)));
                let (cx, cy) = (quotient.class_of(x), quotient.class_of(y));
                assert_eq!(quotient.lattice.leq(cx, cy), prop, "{x:?} {y:?}");
            }
        }
    }
}

#[test]
fn unperforation() {
    for qo in systems(4) {
        let grid = qo.enumerate_f(2).unwrap();
        for x in &grid {
            for y in &grid {
                for m in 1..=4 {
                    if x.scale(m).leq(&y.scale(m)) {
                        assert!(x.leq(y), "{m}·{x:?} ≤ {m}·{y:?}");
                    }
                }
            }
        }
    }
}

/// Largest `n` with some nonzero `y`, `n·y ≤ x`.
fn index_oracle(qo: &QoSystem, x: &DimVector) -> ExtNat {
    let top = x.max_finite();
    let ys: Vec<DimVector> = qo.enumerate_f(top.max(1)).unwrap().into_iter().filter(|y| !y.is_zero()).collect();
    let works = |n: u64| ys.iter().any(|y| y.scale(n).leq(x));
    if works(top + 1) {
        return ExtNat::INF;
    }
    ExtNat::fin((0..=top).rev().find(|&n| works(n)).unwrap_or(0))
}

#[test]
fn index_closed_form_matches_oracle() {
    for qo in systems(4) {
        for x in qo.enumerate_f(3).unwrap() {
            assert_eq!(qo.index(&x), index_oracle(&qo, &x), "{x:?} in {:?}", qo.pairs());
        }
    }
}

#[test]
fn index_laws() {
    for qo in systems(3) {
        let grid = qo.enumerate_f(2).unwrap();
        for x in &grid {
            for n in 0..=3 {
                assert_eq!(qo.index(&x.scale(n)), qo.index(x).scale(n));
            }
            for y in &grid {
                let s = qo.index(&(x + y));
                assert!(qo.index(x).max(qo.index(y)) <= s);
                assert!(s <= qo.index(x) + qo.index(y));
            }
        }
    }
}

#[test]
fn absorption() {
    for qo in systems(4) {
        for p in 0..qo.len() {
            for q in 0..qo.len() {
                if qo.rel(p, q) {
                    let (fp, fq) = (qo.generator(p), qo.generator(q));
                    assert_eq!(&fp + &fq, fq);
                }
            }
            let fp = qo.generator(p);
            assert_eq!(&fp + &fp == fp, qo.is_p0(p));
        }
    }
}

/// A random system on at most five points with a grid of its vectors.
fn instance() -> impl Strategy<Value = (QoSystem, Vec<DimVector>)> {
    (1usize..=5, any::<u64>()).prop_map(|(n, seed)| {
        let qo = random_qo_system(&mut StdRng::seed_from_u64(seed), n);
        let grid = qo.enumerate_f(3).unwrap();
        (qo, grid)
    })
}

fn pick(grid: &[DimVector], i: usize) -> DimVector {
    grid[i % grid.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn interval_axiom((qo, grid) in instance(), i in any::<[usize; 4]>()) {
        let (x, y0, y1) = (pick(&grid, i[0]), pick(&grid, i[1]), pick(&grid, i[2]));
        let (s0, s1) = (&x + &y0, &x + &y1);
        let below: Vec<&DimVector> = grid.iter().filter(|z| z.leq(&s0) && z.leq(&s1)).collect();
        let z = below[i[3] % below.len()];
        let bar = y0.meet(&y1);
        let n_max = [&x, z, &y0, &y1].iter().map(|v| v.max_finite()).max().unwrap().max(1);
        let witness = (0..=n_max).map(|n| qo.truncate(&bar, n)).find(|y| z.leq(&(&x + y)));
        let y = witness.expect("truncation witness");
        prop_assert!(qo.in_f(&y) && y.leq(&y0) && y.leq(&y1));
    }

    #[test]
    fn pseudo_cancellation((qo, grid) in instance(), i in any::<[usize; 3]>()) {
        let (x, y, z) = (pick(&grid, i[0]), pick(&grid, i[1]), pick(&grid, i[2]));
        if (&x + &z).leq(&(&y + &z)) {
            let zbar = DimVector(z.0.iter().map(|c| if c.is_inf() { ExtNat::INF } else { ExtNat::ZERO }).collect());
            let n_max = x.max_finite().max(y.max_finite()).max(1);
            let t = (0..=2 * n_max).map(|n| qo.truncate(&zbar, n)).find(|t| x.leq(&(&y + t)));
            let t = t.expect("truncation witness");
            prop_assert!(qo.in_f(&t));
            prop_assert_eq!(&t + &z, z);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn refinement_found((qo, grid) in instance(), i in any::<[usize; 4]>()) {
        let c = [[pick(&grid, i[0]), pick(&grid, i[1])], [pick(&grid, i[2]), pick(&grid, i[3])]];
        let (a0, a1) = (&c[0][0] + &c[0][1], &c[1][0] + &c[1][1]);
        let (b0, b1) = (&c[0][0] + &c[1][0], &c[0][1] + &c[1][1]);
        let m = qo.refine(&a0, &a1, &b0, &b1).unwrap();
        prop_assert_eq!(&m[0][0] + &m[0][1], a0);
        prop_assert_eq!(&m[1][0] + &m[1][1], a1);
        prop_assert_eq!(&m[0][0] + &m[1][0], b0);
        prop_assert_eq!(&m[0][1] + &m[1][1], b1);
        for row in &m {
            for v in row {
                prop_assert!(qo.in_f(v));
            }
        }
    }
}
