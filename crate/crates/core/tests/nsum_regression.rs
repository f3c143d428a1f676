//! Repeated coordinates collapse: sentences without `U` cannot tell
//! `[2,2,3]` from `[2,3]`.

use modag::formula::{parse, Vocabulary};
use modag::nsum::{decide_nsum, reduce_spec, NSumSpec};

const SENTENCES: &[&str] = &[
    "A x. (0 < x -> x < s(x))",
    "A x. (0 < x -> 2*x < s(x))",
    "A x. (0 < x -> s(x) < 3*x)",
    "E x. (0 < x & s(x) = 2*x)",
    "E x. (0 < x & s(x) = 3*x)",
    "E x. (0 < x & s(x) < 3*x)",
    "E x. (0 < x & 3*x < s(x))",
    "E x. (0 < x & 2*x < s(x) & s(x) < 3*x)",
    "A x. E y. 2*y = x",
    "A x. E y. s(y) = x",
    "A x. E y. s(y) - 2*y = x",
    "A x. E y. s(y) - 3*y = x",
    "A x. (s(x) = 2*x -> x = 0)",
    "A x. (s(x) = 3*x | s(x) = 2*x | x = 0)",
    "E x. E y. (0 < x & 0 < y & s(x) = 2*x & s(y) = 3*y & y < x)",
    "E x. E y. (0 < x & x < y & s(y) = 2*y & s(x) = 3*x)",
    "A x. A y. (x < y -> s(x) < s(y))",
    "E x. (0 < x & s(s(x)) - 5*s(x) + 6*x = 0)",
    "A x. (s(s(x)) - 5*s(x) + 6*x = 0)",
    "E x. (0 < x & s(x) - 2*x < 0)",
    "A x. (0 < x -> 0 < s(x) - 2*x | s(x) = 2*x)",
    "E x. (s(x) - 2*x = 0 & !(x = 0) & x < 0)",
];

fn check(big: &[i64], small: &[i64]) {
    let big = NSumSpec::from_ints(big);
    let small = NSumSpec::from_ints(small);
    assert_eq!(reduce_spec(&big), small);
    for s in SENTENCES {
        let f = parse(s, Vocabulary::Group).unwrap();
        let want = decide_nsum(&f, &small).unwrap();
        match decide_nsum(&f, &big) {
            Ok(got) => assert_eq!(got, want, "{s} on {big}"),
            Err(e) => panic!("{s} on {big}: {e}"),
        }
    }
}

#[test]
fn doubled_first_coordinate() {
    check(&[2, 2, 3], &[2, 3]);
}

#[test]
fn doubled_last_coordinate() {
    check(&[2, 3, 3, 2], &[2, 3, 2]);
}

#[test]
fn reduce_is_idempotent() {
    let g = NSumSpec::from_ints(&[3, 3, 3, 2, 2, 3]);
    let r = reduce_spec(&g);
    assert_eq!(r, NSumSpec::from_ints(&[3, 2, 3]));
    assert_eq!(reduce_spec(&r), r);
    assert!(r.is_reduced());
}
