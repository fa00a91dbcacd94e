use std::collections::BTreeSet;

use mcc_tensor::floer::algebra::Elem::*;
use mcc_tensor::floer::*;
use proptest::prelude::*;

fn golden() -> DABimodule {
    DABimodule::from_json(include_str!("../data/dabimod-box-final.json")).unwrap()
}

fn out(e: Elem) -> Output {
    Output::Basis(e)
}

#[test]
fn seed_deltas() {
    let b = cfda_tb_inv();
    let (p, q, r) = (b.generator("p").unwrap(), b.generator("q").unwrap(), b.generator("r").unwrap());
    assert_eq!(b.delta(r, &[out(R3)]), vec![(out(R23), q)]);
    assert_eq!(b.delta(p, &[]), vec![(out(R3), r)]);
    assert_eq!(b.delta(p, &[Output::One]), vec![(Output::One, p)]);
    assert!(b.delta(p, &[out(Iota0), out(R1)]).is_empty());
    for m in [cfda_tb_inv(), cfda_ta()] {
        assert!(m.max_inputs() <= 2);
    }
}

#[test]
fn delta_k_through_g() {
    let a = cfda_ta();
    let (f, h) = (a.generator("f").unwrap(), a.generator("h").unwrap());
    let chains = a.delta_k(f, &[R3, R2, R1]);
    assert!(chains.contains(&(vec![out(R3), out(R2)], h)));
    assert_eq!(a.delta_k(h, &[])[0], (vec![], h));
}

/// All chains of terms from `y` whose inputs spell `word`, by enumerating
/// term sequences of bounded length.
fn path_oracle(m: &DABimodule, y: usize, word: &[Elem]) -> BTreeSet<(Vec<Output>, usize)> {
    let bound = word.len() + m.generators().len() * (word.len() + 1);
    let mut found = BTreeSet::new();
    let mut frontier: Vec<(usize, Vec<Elem>, Vec<Output>)> = vec![(y, vec![], vec![])];
    for _ in 0..=bound {
        let mut next = Vec::new();
        for (cur, consumed, outs) in frontier {
            if consumed == word {
                found.insert((outs.clone(), cur));
            }
            for t in m.terms().iter().filter(|t| t.x == cur) {
                let mut c = consumed.clone();
                c.extend(&t.inputs);
                if word.starts_with(&c) {
                    let mut o = outs.clone();
                    o.push(t.output);
                    next.push((t.y, c, o));
                }
            }
        }
        frontier = next;
    }
    found
}

fn words_up_to(n: usize) -> Vec<Vec<Elem>> {
    let mut all = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<Elem>| {
                Elem::RHOS.iter().map(move |&a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
        all.extend(layer.iter().cloned());
    }
    all
}

#[test]
fn delta_k_matches_path_oracle() {
    let words = words_up_to(4);
    for m in [cfda_tb_inv(), cfda_ta()] {
        for y in 0..m.generators().len() {
            for w in &words {
                let got: BTreeSet<_> = m.delta_k(y, w).into_iter().collect();
                assert_eq!(got, path_oracle(&m, y, w), "from {} on {w:?}", m.name(y));
            }
        }
    }
}

#[test]
fn box_table_matches_golden() {
    let computed = box_tensor(&cfda_tb_inv(), &cfda_ta()).unwrap();
    let shipped = golden();
    assert_eq!(computed.generators(), shipped.generators());
    assert_eq!(computed.term_set(), shipped.term_set());
    assert_eq!(computed.terms().len(), 21);
}

#[test]
fn delta4_on_rf() {
    let p = seed_product();
    let (rf, ph) = (p.generator("r.f").unwrap(), p.generator("p.h").unwrap());
    let got = p.delta(rf, &[out(R3), out(R2), out(R1)]);
    assert_eq!(got, vec![(out(R2), ph)]);
}

#[test]
fn json_round_trip() {
    let p = seed_product();
    let back = DABimodule::from_json(&p.to_json()).unwrap();
    assert_eq!(back, p);
    assert!(DABimodule::from_json("{\"generators\": [], \"terms\": [], \"extra\": 1}").is_err());
}

#[test]
fn power_associativity() {
    let p = seed_product();
    let square = box_tensor(&p, &p).unwrap();
    let b_first = box_tensor(&box_tensor(&p, &cfda_tb_inv()).unwrap(), &cfda_ta()).unwrap();
    assert_eq!(square.term_set(), b_first.term_set());
    assert_eq!(square.generators().len(), 13);
    assert_eq!(square.hochschild_generators().len(), 7);
}

#[test]
fn hochschild_generators_of_seed_product() {
    let p = seed_product();
    let names: Vec<&str> = p.hochschild_generators().into_iter().map(|g| p.name(g)).collect();
    assert_eq!(names, ["p.f", "q.g", "r.h"]);
    let lopsided = DABimodule::new(
        vec![Generator {
            name: "h".into(),
            left: Iota0,
            right: Iota1,
        }],
        vec![],
    )
    .unwrap();
    assert!(lopsided.hochschild_generators().is_empty());
}

/// Least fixpoint computed over the explicit term words.
fn fixpoint_oracle(p: &DABimodule) -> BTreeSet<Output> {
    let mut set: BTreeSet<Output> = BTreeSet::new();
    loop {
        let before = set.len();
        for t in p.terms() {
            if t.inputs.iter().all(|&a| set.contains(&out(a))) {
                set.insert(t.output);
            }
        }
        let snapshot: Vec<Output> = set.iter().copied().collect();
        for &a in &snapshot {
            for &b in &snapshot {
                if let (Output::Basis(x), Output::Basis(y)) = (a, b) {
                    if let Some(z) = mult(x, y) {
                        set.insert(out(z));
                    }
                }
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

#[test]
fn certificate_on_seed_product() {
    let p = seed_product();
    let cert = vanishing_certificate(&p).unwrap();
    assert_eq!(cert.fixpoint, fixpoint_oracle(&p));
    assert_eq!(cert.fixpoint, [out(R1), out(R3), out(R23), out(R123)].into());
    assert_eq!(cert.seed, [out(R1), out(R3)].into());
    assert!(cert.checks.iter().all(|&(_, ok)| ok));
}

#[test]
fn certificate_on_small_powers() {
    let p = seed_product();
    for n in [2, 4] {
        let q = seed_power(n).unwrap();
        let cert = vanishing_certificate(&q).unwrap();
        assert_eq!(cert.fixpoint, fixpoint_oracle(&q));
        assert_eq!(profile_certificate(&power_profile(&p, n).unwrap()).unwrap(), cert);
    }
}

#[test]
fn streamed_profile_of_four_fold_power() {
    let p = seed_product();
    let explicit = seed_power(4).unwrap();
    let streamed = power_profile(&p, 4).unwrap();
    let mut terms: Vec<TermProfile> = explicit.terms().iter().map(TermProfile::of).collect();
    terms.sort_unstable();
    assert_eq!(streamed.terms, terms);
    assert_eq!(streamed.generators.len(), 89);
}

/// The seed product with an extra generator `n` reached from `q.g` by a
/// zero-input term with output ρ2.
fn mutated() -> DABimodule {
    let p = seed_product();
    let mut generators = p.generators().to_vec();
    generators.push(Generator {
        name: "n".into(),
        left: Iota0,
        right: Iota1,
    });
    let mut terms = p.terms().to_vec();
    terms.push(Term {
        x: p.generator("q.g").unwrap(),
        inputs: vec![],
        output: out(R2),
        y: generators.len() - 1,
    });
    DABimodule::new(generators, terms).unwrap()
}

#[test]
fn mutated_bimodule_refused_by_p1() {
    match vanishing_certificate(&mutated()) {
        Err(FloerError::Certificate { property, witness }) => {
            assert_eq!(property, Property::P1);
            assert!(witness.starts_with("q.g → n: ρ2"), "{witness}");
        }
        other => panic!("expected a P1 refusal, got {other:?}"),
    }
}

#[test]
fn malformed_terms_rejected() {
    let b = cfda_tb_inv();
    let mut terms = b.terms().to_vec();
    terms.push(Term {
        x: 0,
        inputs: vec![R2],
        output: out(R1),
        y: 0,
    });
    assert!(matches!(
        DABimodule::new(b.generators().to_vec(), terms),
        Err(FloerError::IdempotentChain { .. })
    ));
    let mut terms = b.terms().to_vec();
    terms.push(Term {
        x: 1,
        inputs: vec![Iota1],
        output: Output::One,
        y: 1,
    });
    assert!(matches!(
        DABimodule::new(b.generators().to_vec(), terms),
        Err(FloerError::IdempotentInput { .. })
    ));
    let gens = vec![
        Generator {
            name: "a".into(),
            left: Iota0,
            right: Iota0,
        },
        Generator {
            name: "b".into(),
            left: Iota1,
            right: Iota0,
        },
    ];
    let cycle = vec![
        Term {
            x: 0,
            inputs: vec![],
            output: out(R1),
            y: 1,
        },
        Term {
            x: 1,
            inputs: vec![],
            output: out(R2),
            y: 0,
        },
    ];
    assert!(matches!(
        DABimodule::new(gens, cycle),
        Err(FloerError::ZeroInputCycle(_))
    ));
}

#[test]
fn duplicate_terms_cancel() {
    let b = cfda_tb_inv();
    let mut terms = b.terms().to_vec();
    terms.push(terms[3].clone());
    let reduced = DABimodule::new(b.generators().to_vec(), terms).unwrap();
    assert_eq!(reduced.terms().len(), b.terms().len() - 1);
}

#[test]
fn streamed_profile_cancels_like_explicit_product() {
    // Two left terms with equal source, target and output whose inputs are
    // spelled by the same right-hand word produce one cancelling pair.
    let gen = |name: &str, left, right| Generator {
        name: name.into(),
        left,
        right,
    };
    let m = DABimodule::new(
        vec![gen("x", Iota0, Iota0), gen("x2", Iota0, Iota1)],
        vec![
            Term {
                x: 0,
                inputs: vec![R1],
                output: Output::One,
                y: 1,
            },
            Term {
                x: 0,
                inputs: vec![R123],
                output: Output::One,
                y: 1,
            },
        ],
    )
    .unwrap();
    let n = DABimodule::new(
        vec![gen("y", Iota0, Iota0), gen("y2", Iota1, Iota1)],
        vec![
            Term {
                x: 0,
                inputs: vec![R1],
                output: out(R1),
                y: 1,
            },
            Term {
                x: 0,
                inputs: vec![R1],
                output: out(R123),
                y: 1,
            },
        ],
    )
    .unwrap();
    let explicit = box_tensor(&m, &n).unwrap();
    let streamed = box_profile(&m, &n).unwrap();
    assert_eq!(streamed.raw_terms, 2);
    assert!(explicit.terms().is_empty());
    assert!(streamed.terms.is_empty());
}

#[test]
fn hfk_table() {
    let rows = hfk_dimensions(2).unwrap();
    let got: Vec<(u128, u128, u128, u128)> = rows
        .iter()
        .map(|r| (r.grading_minus, r.grading_zero, r.grading_plus, r.total))
        .collect();
    assert_eq!(got, [(1, 3, 1, 5), (1, 7, 1, 9), (1, 47, 1, 49)]);
}

#[test]
fn generators_match_fig8_edges() {
    use mcc_tensor::solenoidal::GraphBasis;
    let p = seed_product();
    let g = GraphBasis::fig8();
    let mut from_bimodule: Vec<(String, String)> = p
        .generators()
        .iter()
        .map(|x| (x.left.name().to_string(), x.right.name().to_string()))
        .collect();
    let rename = |i: &str| match i {
        "i0" => "iota0".to_string(),
        "i1" => "iota1".to_string(),
        other => other.to_string(),
    };
    let mut from_graph: Vec<(String, String)> = ["u", "v", "w", "x", "y"]
        .iter()
        .map(|e| {
            let k = g.edges.position(e).unwrap();
            (rename(g.idempotents.label(g.s[k])), rename(g.idempotents.label(g.t[k])))
        })
        .collect();
    from_bimodule.sort();
    from_graph.sort();
    assert_eq!(from_bimodule, from_graph);
}

fn sub_bimodule(m: &DABimodule, mask: u16) -> DABimodule {
    let terms = m
        .terms()
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask >> i & 1 == 1)
        .map(|(_, t)| t.clone())
        .collect();
    DABimodule::new(m.generators().to_vec(), terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn box_tensor_is_associative(mb in 0u16..1024, ma in 0u16..1024) {
        let b = sub_bimodule(&cfda_tb_inv(), mb);
        let a = sub_bimodule(&cfda_ta(), ma);
        let ba = box_tensor(&b, &a).unwrap();
        let left = box_tensor(&box_tensor(&ba, &b).unwrap(), &a).unwrap();
        let middle = box_tensor(&ba, &box_tensor(&b, &a).unwrap()).unwrap();
        let right = box_tensor(&b, &box_tensor(&a, &box_tensor(&b, &a).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(left.term_set(), middle.term_set());
        prop_assert_eq!(left.term_set(), right.term_set());
    }
}

#[test]
fn shipped_seed_files_match_builtins() {
    let b = DABimodule::from_json(include_str!("../data/cfda-tb-inv.json")).unwrap();
    let a = DABimodule::from_json(include_str!("../data/cfda-ta.json")).unwrap();
    assert_eq!(b, cfda_tb_inv());
    assert_eq!(a, cfda_ta());
}
