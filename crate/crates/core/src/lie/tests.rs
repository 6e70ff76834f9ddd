use num_bigint::BigUint;
use proptest::prelude::*;

use super::count::periodic_basis;
use super::*;
use crate::field::BinarySubspace;
use crate::field::BitRow;
use crate::shift::OrderEvidence;

fn gf(q: u32) -> PrimeField {
    PrimeField::new(q).unwrap()
}

fn construction_a_shift() -> BracketRule {
    BracketRule::construction_a(LinearCA::shift(gf(2), 1, 1)).unwrap()
}

fn cfg(rule: &BracketRule, s: &str) -> Config {
    Config::parse(rule.field(), s).unwrap()
}

#[test]
fn construction_a_example() {
    let r = construction_a_shift();
    let x = cfg(&r, "tail=0,0; 0:1,0");
    let c = r.constant(1).unwrap();
    assert_eq!(r.eval(&x, &c).unwrap(), cfg(&r, "tail=0,0; 1:1,0"));
    assert_eq!(r.eval(&c, &x).unwrap(), cfg(&r, "tail=0,0; 1:1,0"));
    // the constant factor may not vary
    assert!(r.eval(&cfg(&r, "tail=0,0; 3:0,1"), &c).is_err());
}

#[test]
fn bracket_one_example() {
    let r = BracketRule::bracket_k(1);
    let e1 = r.basis(0, 0).unwrap();
    let e2 = r.basis(1, 0).unwrap();
    assert_eq!(
        r.eval(&e1, &e2).unwrap(),
        cfg(&r, "tail=0,0,0; 0:0,0,1; 1:0,0,1")
    );
    assert_eq!(
        r.eval(&e2, &e1).unwrap(),
        cfg(&r, "tail=0,0,0; 0:0,0,1; 1:0,0,1")
    );
    assert_eq!(
        r.eval(&e1.translate(5), &e2.translate(5)).unwrap(),
        cfg(&r, "tail=0,0,0; 5:0,0,1; 6:0,0,1")
    );
    assert!(r.eval(&e1, &e2.translate(1)).unwrap().is_zero());
}

#[test]
fn constant_tails_bracket_exactly() {
    // all-ones on track 1 against e2 at 0 meets the rule once
    let r = BracketRule::bracket_k(2);
    let ones = cfg(&r, "tail=1,0,0");
    let e2 = r.basis(1, 0).unwrap();
    assert_eq!(
        r.eval(&ones, &e2).unwrap(),
        cfg(&r, "tail=0,0,0; 0:0,0,1; 2:0,0,1")
    );
    // two constants meet the rule at every cell: z summed is 0 over GF(2)
    let both = cfg(&r, "tail=1,1,0");
    let ones2 = cfg(&r, "tail=0,1,0");
    assert!(r.eval(&ones, &ones2).unwrap().is_zero());
    let r0 = BracketRule::bracket_k(0);
    assert_eq!(r0.eval(&ones, &ones2).unwrap(), cfg(&r0, "tail=0,0,1"));
    assert!(r0.eval(&both, &both).unwrap().is_zero());
}

#[test]
fn periodic_examples() {
    let r = BracketRule::bracket_k(1);
    let f = gf(2);
    for a in 0..8u64 {
        for b in 0..8u64 {
            let x = PeriodicConfig::from_index(f, 1, 3, a).unwrap();
            let y = PeriodicConfig::from_index(f, 1, 3, b).unwrap();
            assert!(r.eval_periodic(&x, &y).unwrap().is_zero());
        }
    }
    let x = PeriodicConfig::from_index(f, 3, 3, 0b101_011_110).unwrap();
    let y = PeriodicConfig::from_index(f, 3, 3, 0b011_110_001).unwrap();
    let z = PeriodicConfig::zero(f, 3, 3);
    assert_eq!(
        r.eval_periodic(&x, &y).unwrap(),
        r.eval_periodic(&y, &x).unwrap()
    );
    assert!(r.eval_periodic(&x, &z).unwrap().is_zero());
    assert!(r.eval_periodic(&x, &PeriodicConfig::zero(f, 2, 3)).is_err());
}

#[test]
fn periodic_matches_unrolled_bracket() {
    // bracket of unrolled windows agrees with the wrapped bracket away from the edges
    for rule in [
        BracketRule::bracket_k(1),
        BracketRule::bracket_k(3),
        construction_a_shift(),
    ] {
        let f = rule.field();
        let n = 3;
        let basis = periodic_basis(&rule, n);
        let dim = basis.len();
        for a in 0..(1u64 << dim) {
            let b = a.wrapping_mul(0x9e37_79b9) % (1 << dim);
            let mk = |bits: u64| {
                let mut p = PeriodicConfig::zero(f, n, rule.tracks());
                for (i, e) in basis.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        for (k, (&u, &v)) in p.clone().values().iter().zip(e.values()).enumerate() {
                            let cell = (k / rule.tracks()) as i64;
                            p.set(cell, k % rule.tracks(), f.add(u, v));
                        }
                    }
                }
                p
            };
            let (x, y) = (mk(a), mk(b));
            let wrapped = rule.eval_periodic(&x, &y).unwrap();
            let unroll = |p: &PeriodicConfig| {
                let mut c = p.unroll(-30, 30);
                if rule.has_constant_factor() {
                    // the constant factor is a tail, not a window
                    let t = rule.tracks() - 1;
                    let a = p.get(0, t);
                    let mut tail = vec![0i64; rule.tracks()];
                    tail[t] = a as i64;
                    let entries: Vec<(i64, Vec<i64>)> = c
                        .deviation()
                        .iter()
                        .map(|(&pos, v)| {
                            let mut v: Vec<i64> = v.iter().map(|&x| x as i64).collect();
                            v[t] = 0;
                            (pos, v)
                        })
                        .collect();
                    c = Config::from_parts(f, &tail, entries).unwrap();
                }
                c
            };
            let full = rule.eval(&unroll(&x), &unroll(&y)).unwrap();
            for i in -20..20 {
                for t in 0..rule.vector_tracks() {
                    assert_eq!(full.get(i, t), wrapped.get(i, t), "cell {i} track {t}");
                }
            }
        }
    }
}

/// Independent count: for each `x` the kernel of `y -> [x, y]` has size
/// `2^(N - rank)`.
fn kernel_count(rule: &BracketRule, n: usize) -> BigUint {
    let basis = periodic_basis(rule, n);
    let dim = basis.len();
    let width = n * rule.tracks();
    let mut total = BigUint::from(0u32);
    for xi in 0..(1u64 << dim) {
        let mut x = PeriodicConfig::zero(rule.field(), n, rule.tracks());
        for (i, e) in basis.iter().enumerate() {
            if xi >> i & 1 == 1 {
                for (k, &v) in e.values().iter().enumerate() {
                    if v != 0 {
                        x.add_at((k / rule.tracks()) as i64, k % rule.tracks(), 1);
                    }
                }
            }
        }
        let rows: Vec<BitRow> = basis
            .iter()
            .map(|e| {
                BitRow::from_bits(
                    rule.eval_periodic(&x, e)
                        .unwrap()
                        .values()
                        .iter()
                        .map(|&v| v != 0),
                )
                .resized(width)
            })
            .collect();
        let rank = BinarySubspace::spanned_by(width, &rows).unwrap().dim();
        total += BigUint::from(1u32) << (dim - rank);
    }
    total
}

#[test]
fn zero_pair_examples() {
    let opts = PeriodicCountOptions::default();
    assert_eq!(
        periodic_zero_pairs(&BracketRule::bracket_k(1), 1, opts).unwrap(),
        BigUint::from(64u32)
    );
    assert_eq!(
        periodic_zero_pairs(&BracketRule::bracket_k(2), 2, opts).unwrap(),
        BigUint::from(4096u32)
    );
    assert_eq!(
        periodic_zero_pairs(&BracketRule::bracket_k(1), 2, opts).unwrap(),
        BigUint::from(2176u32)
    );
    assert_eq!(
        periodic_zero_pairs(&BracketRule::bracket_k(0), 1, opts).unwrap(),
        BigUint::from(40u32)
    );
    assert_eq!(
        periodic_zero_pairs(&BracketRule::bracket_k(0), 2, opts).unwrap(),
        BigUint::from(1600u32)
    );
}

#[test]
fn zero_pairs_match_kernel_oracle() {
    let opts = PeriodicCountOptions::default();
    for k in 0..4 {
        for n in 1..=3 {
            let r = BracketRule::bracket_k(k);
            assert_eq!(
                periodic_zero_pairs(&r, n, opts).unwrap(),
                kernel_count(&r, n),
                "k={k} n={n}"
            );
        }
    }
    let r = construction_a_shift();
    for n in 1..=4 {
        assert_eq!(
            periodic_zero_pairs(&r, n, opts).unwrap(),
            kernel_count(&r, n)
        );
    }
}

#[test]
fn odd_characteristic_count_matches_naive() {
    let f = gf(3);
    let target = Config::from_parts(f, &[0, 0], [(0, vec![1, 0]), (1, vec![0, 2])]).unwrap();
    let r = BracketRule::orbit(
        f,
        2,
        vec![OrbitRule {
            s: 0,
            t: 1,
            delta: 1,
            target,
        }],
    )
    .unwrap();
    let n = 2;
    let total = 3u64.pow(4);
    let mut naive = 0u64;
    for a in 0..total {
        for b in 0..total {
            let x = PeriodicConfig::from_index(f, n, 2, a).unwrap();
            let y = PeriodicConfig::from_index(f, n, 2, b).unwrap();
            naive += u64::from(r.eval_periodic(&x, &y).unwrap().is_zero());
        }
    }
    assert_eq!(
        periodic_zero_pairs(&r, n, PeriodicCountOptions::default()).unwrap(),
        BigUint::from(naive)
    );
}

#[test]
fn zero_pair_cap() {
    let r = BracketRule::bracket_k(1);
    let err = periodic_zero_pairs(&r, 3, PeriodicCountOptions { cap: 1 << 17 }).unwrap_err();
    assert_eq!(
        err,
        LieError::CapExceeded {
            size: 1 << 18,
            cap: 1 << 17
        }
    );
    assert!(periodic_zero_pairs(&r, 0, PeriodicCountOptions::default()).is_err());
}

#[test]
fn formula_values() {
    assert_eq!(closed_form_count(1, 1), BigUint::from(64u32));
    assert_eq!(closed_form_count(1, 2), BigUint::from(2176u32));
    assert_eq!(closed_form_count(2, 2), BigUint::from(4096u32));
    assert_eq!(
        closed_form_count(2, 3),
        BigUint::from(24u32 * 24 * 24 + 40 * 40 * 40)
    );
    assert_eq!(closed_form_count(0, 3), BigUint::from(64u32).pow(3));
    assert_eq!(listed_count(0, 3), BigUint::from(24u32).pow(3));
    assert_eq!(listed_count(2, 4), closed_form_count(2, 4));
}

#[test]
fn formula_functions_are_pairwise_distinct() {
    for k1 in 1..=6u64 {
        for k2 in (k1 + 1)..=6 {
            assert!(
                (1..=64).any(|n| closed_form_count(k1, n) != closed_form_count(k2, n)),
                "{k1} vs {k2}"
            );
        }
    }
}

#[test]
fn axioms_hold_for_known_brackets() {
    let rep = verify_axioms(&construction_a_shift(), 2).unwrap();
    assert!(rep.all_ok(), "{:?}", rep.witnesses);
    assert_eq!(rep.summary(), "bilinear ok, reflexive ok, jacobi ok");
    let rep = verify_axioms(&BracketRule::bracket_k(1), 2).unwrap();
    assert!(rep.all_ok(), "{:?}", rep.witnesses);
    let f3 =
        BracketRule::construction_a(LinearCA::parse(gf(3), "[1+x^-1,x;2,x^2]").unwrap()).unwrap();
    assert!(verify_axioms(&f3, 1).unwrap().all_ok());
}

#[test]
fn adversarial_jacobi_failure() {
    let f = gf(2);
    let r = BracketRule::orbit(
        f,
        3,
        vec![
            OrbitRule {
                s: 0,
                t: 1,
                delta: 0,
                target: Config::basis(f, 3, 0, 0).unwrap(),
            },
            OrbitRule {
                s: 0,
                t: 2,
                delta: 0,
                target: Config::basis(f, 3, 1, 0).unwrap(),
            },
        ],
    )
    .unwrap();
    let rep = verify_axioms(&r, 1).unwrap();
    assert!(rep.bilinear && rep.reflexive);
    assert!(!rep.jacobi);
    assert!(rep.witnesses.iter().any(|w| w.starts_with("jacobi fails")));
}

#[test]
fn conjugation() {
    let f = gf(2);
    let zero = BracketRule::zero(f, 2);
    let u = LinearCA::parse(f, "[1,x;0,1]").unwrap();
    let cz = zero.clone().conjugate(u.clone()).unwrap();
    let x = Config::parse(f, "tail=0,0; 0:1,1; 2:0,1").unwrap();
    let y = Config::parse(f, "tail=1,0; -1:1,0").unwrap();
    assert!(cz.eval(&x, &y).unwrap().is_zero());

    let inner = BracketRule::cellwise_e1(f, 2).unwrap();
    let same = inner.clone().conjugate(LinearCA::identity(f, 2)).unwrap();
    assert_eq!(same.eval(&x, &y).unwrap(), inner.eval(&x, &y).unwrap());

    let conj: Vec<BracketRule> = (0..3)
        .map(|g| {
            inner
                .clone()
                .conjugate(LinearCA::partial_shift_by(f, 2, 0, g).unwrap())
                .unwrap()
        })
        .collect();
    for r in &conj {
        assert!(verify_axioms(r, 1).unwrap().all_ok());
    }
    let table = |r: &BracketRule| -> Vec<Config> {
        (-3..=3)
            .map(|j| {
                r.eval(&r.basis(0, 0).unwrap(), &r.basis(1, j).unwrap())
                    .unwrap()
            })
            .collect()
    };
    assert_ne!(table(&conj[0]), table(&conj[1]));
    assert_ne!(table(&conj[1]), table(&conj[2]));
    assert_ne!(table(&conj[0]), table(&conj[2]));
    assert!(inner
        .conjugate(LinearCA::parse(f, "[1+x,0;0,1]").unwrap())
        .is_err());

    let ca = construction_a_shift()
        .conjugate(LinearCA::shift(f, 1, 2))
        .unwrap();
    assert!(verify_axioms(&ca, 1).unwrap().all_ok());
}

#[test]
fn phi_radius_growth() {
    let r = construction_a_shift();
    let c = r.constant(1).unwrap();
    assert_eq!(phi_radius(&r, &c, 0).unwrap(), 0);
    for i in 0..=20 {
        assert_eq!(phi_radius(&r, &c, i).unwrap(), i);
    }
    let swap = LinearCA::parse(gf(2), "[0,x;x^-1,0]").unwrap();
    assert_eq!(
        swap.order_evidence(4).unwrap(),
        OrderEvidence::FiniteOrder(2)
    );
    let r = BracketRule::construction_a(swap).unwrap();
    let c = r.constant(1).unwrap();
    for i in 0..=8 {
        assert!(phi_radius(&r, &c, i).unwrap() <= 1);
    }
}

#[test]
fn ideal_examples() {
    let r = BracketRule::bracket_k(1);
    let e3 = r.basis(2, 0).unwrap();
    assert_eq!(
        ideal_closure(std::slice::from_ref(&e3), &r, 4)
            .unwrap()
            .dim(),
        1
    );
    assert_eq!(ideal_closure(&[], &r, 4).unwrap().dim(), 0);
    let e1 = r.basis(0, 0).unwrap();
    let lemma = ideal_closure(std::slice::from_ref(&e1), &r, 4).unwrap();
    let brute = ideal_closure_brute(std::slice::from_ref(&e1), &r, 4).unwrap();
    assert_eq!(lemma, brute);
    assert_eq!(lemma.dim(), 2);
    for w in 2..7 {
        assert_eq!(
            ideal_closure(std::slice::from_ref(&e1), &r, w)
                .unwrap()
                .dim(),
            2
        );
    }
    // the generator at the edge brackets out of the window
    assert_eq!(
        ideal_closure(&[e1.translate(4)], &r, 4).unwrap_err(),
        LieError::WindowTooSmall { window: 4 }
    );
    assert!(ideal_closure(&[e1], &construction_a_shift(), 4).is_err());
}

#[test]
fn search_small() {
    let res = search_brackets(2, 1, 0, 2, SearchOptions::default()).unwrap();
    assert_eq!(res.rules.len(), 1);
    assert_eq!(res.rules[0], BracketRule::zero(gf(2), 1));
    let res = search_brackets(2, 1, 1, 0, SearchOptions::default()).unwrap();
    assert!(res.rules.contains(&BracketRule::zero(gf(2), 1)));
    assert_eq!(res.recheck_failures, 0);
    for r in &res.rules {
        assert!(verify_axioms(r, 1).unwrap().all_ok());
    }
    assert!(matches!(
        search_brackets(2, 3, 2, 2, SearchOptions::default()),
        Err(LieError::CapExceeded { .. })
    ));
}

#[test]
fn rule_text_round_trip() {
    let rules = [
        construction_a_shift(),
        BracketRule::bracket_k(2),
        BracketRule::cellwise_e1(gf(3), 2)
            .unwrap()
            .conjugate(LinearCA::partial_shift(gf(3), 2, 0).unwrap())
            .unwrap(),
        construction_a_shift()
            .conjugate(LinearCA::shift(gf(2), 1, -1))
            .unwrap(),
    ];
    for r in rules {
        let text = r.to_text();
        assert_eq!(BracketRule::parse(&text).unwrap(), r, "{text}");
    }
    let parsed = BracketRule::parse(
        "# comment\norbit q=2 d=3\nrule 1 2 0 target=tail=0,0,0; 0:0,0,1; 1:0,0,1\n",
    )
    .unwrap();
    assert_eq!(parsed, BracketRule::bracket_k(1));
    for bad in [
        "",
        "orbit q=4 d=1",
        "orbit q=2 d=1\nrule 1 2 0 target=tail=0",
        "rule 1 1 0 target=tail=0",
        "foo",
    ] {
        assert!(BracketRule::parse(bad).is_err(), "{bad}");
    }
}

fn arb_config(d: usize) -> impl Strategy<Value = Config> {
    (
        prop::collection::vec(0i64..2, d),
        prop::collection::vec((-4i64..4, prop::collection::vec(0i64..2, d)), 0..5),
    )
        .prop_map(move |(tail, es)| Config::from_parts(PrimeField::binary(), &tail, es).unwrap())
}

fn with_constant(x: Config, a: u32) -> Config {
    let mut tail: Vec<i64> = x.tail().iter().map(|&v| v as i64).collect();
    tail.push(a as i64);
    let entries = x.deviation().iter().map(|(&p, v)| {
        let mut w: Vec<i64> = v.iter().map(|&a| a as i64).collect();
        w.push(0);
        (p, w)
    });
    Config::from_parts(x.field(), &tail, entries).unwrap()
}

proptest! {
    #[test]
    fn reflexive_on_random_configs(x in arb_config(3), k in 0i64..4) {
        let r = BracketRule::bracket_k(k);
        prop_assert!(r.eval(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn bracket_k_is_bilinear(x in arb_config(3), y in arb_config(3), z in arb_config(3)) {
        let r = BracketRule::bracket_k(1);
        let lhs = r.eval(&x.add(&y).unwrap(), &z).unwrap();
        let rhs = r.eval(&x, &z).unwrap().add(&r.eval(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn construction_a_jacobi_on_random_configs(
        x in arb_config(1), y in arb_config(1), z in arb_config(1), a in 0u32..2, b in 0u32..2, c in 0u32..2
    ) {
        let r = construction_a_shift();
        let (x, y, z) = (with_constant(x, a), with_constant(y, b), with_constant(z, c));
        let j = r.eval(&r.eval(&x, &y).unwrap(), &z).unwrap()
            .add(&r.eval(&r.eval(&y, &z).unwrap(), &x).unwrap()).unwrap()
            .add(&r.eval(&r.eval(&z, &x).unwrap(), &y).unwrap()).unwrap();
        prop_assert!(j.is_zero());
    }
}

#[test]
fn construction_a_bilinear_exhaustive() {
    // every pair and triple of configs supported in [-2, 2] with a constant
    let r = construction_a_shift();
    let f = gf(2);
    let configs: Vec<Config> = (0u32..64)
        .map(|bits| {
            let entries = (0..5)
                .filter(|j| bits >> j & 1 == 1)
                .map(|j| (j as i64 - 2, vec![1, 0]));
            Config::from_parts(f, &[0, (bits >> 5) as i64], entries).unwrap()
        })
        .collect();
    let z = r.basis(0, 1).unwrap();
    let c = r.constant(1).unwrap();
    for x in &configs {
        for y in &configs {
            let s = x.add(y).unwrap();
            for w in [&z, &c] {
                assert_eq!(
                    r.eval(&s, w).unwrap(),
                    r.eval(x, w).unwrap().add(&r.eval(y, w).unwrap()).unwrap()
                );
            }
        }
    }
}
