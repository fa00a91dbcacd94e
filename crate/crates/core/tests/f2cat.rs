use mcc_tensor::f2cat::{F2Matrix, F2Vector, LabeledSet, TENSOR_POWER_CAP};
use proptest::prelude::*;

fn set(prefix: &str, n: usize) -> LabeledSet {
    LabeledSet::new((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

fn matrix(rows: &LabeledSet, cols: &LabeledSet, bits: u64) -> F2Matrix {
    let w = cols.len();
    F2Matrix::from_fn(rows.clone(), cols.clone(), |r, c| bits >> (r * w + c) & 1 == 1)
}

fn vector(domain: &LabeledSet, bits: u64) -> F2Vector {
    domain
        .labels()
        .iter()
        .enumerate()
        .filter(|&(i, _)| bits >> i & 1 == 1)
        .fold(F2Vector::zeros(domain.clone()), |acc, (_, l)| {
            acc.add(&F2Vector::delta(domain.clone(), l).unwrap()).unwrap()
        })
}

/// Direct evaluation of one entry of `M^{(x) X}` from function digits.
fn power_entry(m: &F2Matrix, g: &[usize], f: &[usize]) -> bool {
    g.iter().zip(f).all(|(&gx, &fx)| m.get(gx, fx))
}

fn digits(mut i: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut().rev() {
        *slot = i % base;
        i /= base;
    }
    d
}

#[test]
fn tensor_power_entries_are_products() {
    let (b, c, x) = (set("b", 2), set("c", 3), set("x", 3));
    let m = matrix(&c, &b, 0b101_110);
    let p = m.tensor_power(&x, TENSOR_POWER_CAP).unwrap();
    assert_eq!((p.rows().len(), p.cols().len()), (27, 8));
    for r in 0..27 {
        for col in 0..8 {
            assert_eq!(p.get(r, col), power_entry(&m, &digits(r, 3, 3), &digits(col, 2, 3)));
        }
    }
}

#[test]
fn tensor_power_over_empty_set_is_one_by_one_identity() {
    let m = matrix(&set("c", 2), &set("b", 3), 0);
    let p = m.tensor_power(&LabeledSet::range(0), TENSOR_POWER_CAP).unwrap();
    assert_eq!(p, F2Matrix::identity(p.rows().clone()));
    assert_eq!(p.rows().len(), 1);
}

#[test]
fn text_format_round_trips() {
    let m = matrix(&set("c", 2), &set("b", 3), 0b011_100);
    assert_eq!(F2Matrix::parse(&m.to_text()).unwrap(), m);
    assert!(F2Matrix::parse("rows: a\ncols: x y\n1\n").is_err());
    assert!(F2Matrix::parse("rows: a\ncols: x y\n1 2\n").is_err());
}

proptest! {
    #[test]
    fn tensor_power_is_a_functor(mb in any::<u64>(), nb in any::<u64>(), k in 0usize..4) {
        let (b, c, d, x) = (set("b", 2), set("c", 2), set("d", 2), LabeledSet::range(k));
        let m = matrix(&c, &b, mb);
        let n = matrix(&d, &c, nb);
        let nm = n.compose(&m).unwrap();
        let lhs = nm.tensor_power(&x, TENSOR_POWER_CAP).unwrap();
        let rhs = n
            .tensor_power(&x, TENSOR_POWER_CAP)
            .unwrap()
            .compose(&m.tensor_power(&x, TENSOR_POWER_CAP).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
        let id = F2Matrix::identity(b.clone()).tensor_power(&x, TENSOR_POWER_CAP).unwrap();
        prop_assert_eq!(id.clone(), F2Matrix::identity(id.rows().clone()));
    }

    #[test]
    fn apply_is_linear(mb in any::<u64>(), fb in any::<u64>(), gb in any::<u64>()) {
        let (b, c) = (set("b", 4), set("c", 3));
        let m = matrix(&c, &b, mb);
        let (f, g) = (vector(&b, fb), vector(&b, gb));
        let lhs = m.apply(&f.add(&g).unwrap()).unwrap();
        let rhs = m.apply(&f).unwrap().add(&m.apply(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn composition_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let s: Vec<LabeledSet> = (0..4).map(|i| set(&format!("s{i}_"), 2 + i % 2)).collect();
        let m1 = matrix(&s[1], &s[0], a);
        let m2 = matrix(&s[2], &s[1], b);
        let m3 = matrix(&s[3], &s[2], c);
        let left = m3.compose(&m2).unwrap().compose(&m1).unwrap();
        let right = m3.compose(&m2.compose(&m1).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_inverts(bits in any::<u64>()) {
        let s = set("e", 4);
        let m = matrix(&s, &s, bits);
        match m.inverse() {
            Some(inv) => {
                prop_assert_eq!(m.rank(), 4);
                prop_assert_eq!(m.compose(&inv).unwrap(), F2Matrix::identity(s.clone()));
                prop_assert_eq!(inv.compose(&m).unwrap(), F2Matrix::identity(s));
            }
            None => prop_assert!(m.rank() < 4),
        }
    }

    #[test]
    fn transpose_reverses_composition(a in any::<u64>(), b in any::<u64>()) {
        let (x, y, z) = (set("x", 2), set("y", 3), set("z", 2));
        let m = matrix(&y, &x, a);
        let n = matrix(&z, &y, b);
        prop_assert_eq!(
            n.compose(&m).unwrap().transpose(),
            m.transpose().compose(&n.transpose()).unwrap()
        );
    }
}
