//! Seeded verification suites shared by the CLI and the acceptance tests.
//!
//! Every suite returns a [`Check`]. A failing case stops its suite and is
//! reported as the witness.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitVec;
use crate::f2cat::{F2Matrix, F2Vector, FunctionIndex, LabeledSet, TENSOR_POWER_CAP};
use crate::floer::{
    box_tensor, cfda_ta, cfda_tb_inv, hfk_dimensions, power_profile, profile_certificate,
    seed_product, DABimodule, Output,
};
use crate::mcc::{apply_mcc, cc_probe, series, staircase_position, MccWindow, StairPosition, Verdict};
use crate::solenoidal::{
    apply_solenoidal, composition_counterexample_search, composition_defect, e_s_project,
    hh0_by_relations, hh0_inline_power, sector_violation, staircase_dims, GraphBasis, GraphMorphism,
    SectorInput, DEFAULT_SEARCH_BOUND,
};
use crate::tower::{cc_sum, DyadicTower, GSetChain};

pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_DEPTH_CAP: usize = 3;

/// The shipped transcription of the `B ⊠ A` table.
pub const GOLDEN_BOX_TABLE: &str = include_str!("../data/dabimod-box-final.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub depth_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }
}

type Outcome = Result<(usize, String), String>;

fn run(name: &str, body: impl FnOnce() -> Outcome) -> Check {
    match body() {
        Ok((cases, summary)) => Check {
            name: name.to_string(),
            passed: true,
            cases,
            summary,
            witness: None,
        },
        Err(witness) => Check {
            name: name.to_string(),
            passed: false,
            cases: 0,
            summary: "failed".to_string(),
            witness: Some(witness),
        },
    }
}

fn rng_for(seed: u64, suite: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn letters(n: usize) -> LabeledSet {
    LabeledSet::new(["a", "b", "c", "d", "e", "f", "g", "h"].into_iter().take(n)).expect("distinct letters")
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: &LabeledSet, cols: &LabeledSet) -> F2Matrix {
    F2Matrix::from_fn(rows.clone(), cols.clone(), |_, _| rng.gen_bool(0.5))
}

fn random_window(
    rng: &mut ChaCha8Rng,
    tower: &Arc<DyadicTower>,
    basis: &LabeledSet,
    depth: usize,
) -> Result<MccWindow, String> {
    let size = FunctionIndex::new(basis.len(), tower.level_size(depth)).size();
    let table = BitVec::from_bools((0..size).map(|_| rng.gen_bool(0.5)));
    MccWindow::from_table(tower.clone(), basis.clone(), depth, table).map_err(err)
}

/// `(NM)^{(x)X}` against `N^{(x)X} ∘ M^{(x)X}` on random windows, plus the
/// finite tensor power whenever the output depth equals the window depth.
pub fn functoriality(cfg: &SuiteConfig, cases: usize) -> Check {
    run("functoriality", || {
        let max_depth = cfg.depth_cap.min(2);
        let tower = Arc::new(DyadicTower::dyadic_solenoid(max_depth).map_err(err)?);
        let mut rng = rng_for(cfg.seed, 1);
        let mut oracle_cases = 0;
        for case in 0..cases {
            let (b, c, d) = (letters(rng.gen_range(1..=3)), letters(rng.gen_range(1..=3)), letters(rng.gen_range(1..=3)));
            let m = random_matrix(&mut rng, &c, &b);
            let n = random_matrix(&mut rng, &d, &c);
            let depth = rng.gen_range(0..=max_depth);
            let w = random_window(&mut rng, &tower, &b, depth)?;
            let out = rng.gen_range(w.inv_level()..=max_depth);
            let nm = n.compose(&m).map_err(err)?;
            let lhs = apply_mcc(&nm, &w, out).map_err(err)?;
            let rhs = apply_mcc(&n, &apply_mcc(&m, &w, out).map_err(err)?, out).map_err(err)?;
            if lhs != rhs {
                return Err(format!("case {case}: w = {w:?}, depth {out}: (NM)w = {lhs:?}, N(Mw) = {rhs:?}"));
            }
            if out == depth {
                oracle_cases += 1;
                let x = tower.level_set(depth);
                let finite = m.tensor_power(x, TENSOR_POWER_CAP).map_err(err)?;
                let v = F2Vector {
                    domain: finite.cols().clone(),
                    bits: w.table().clone(),
                };
                let image = finite.apply(&v).map_err(err)?;
                let mw = apply_mcc(&m, &w, out).map_err(err)?;
                if &image.bits != mw.table() {
                    return Err(format!("case {case}: window action differs from the finite tensor power on {w:?}"));
                }
            }
        }
        Ok((cases, format!("{cases} cases at depths ≤ {max_depth}, {oracle_cases} also against the finite tensor power")))
    })
}

fn orbit_constant_table(rng: &mut ChaCha8Rng, chain: &GSetChain, level: usize) -> BitVec {
    let mut label: Vec<Option<bool>> = vec![None; chain.size];
    for start in 0..chain.size {
        if label[start].is_some() {
            continue;
        }
        let bit = rng.gen_bool(0.5);
        let mut stack = vec![start];
        label[start] = Some(bit);
        while let Some(a) = stack.pop() {
            for g in &chain.levels[level] {
                let b = g.apply(a);
                if label[b].is_none() {
                    label[b] = Some(bit);
                    stack.push(b);
                }
            }
        }
    }
    BitVec::from_bools(label.into_iter().map(|b| b.expect("every point labelled")))
}

/// Sum over the points fixed by every element of the level-`m` kernel,
/// enumerated as group elements rather than generators.
fn fixed_sum_by_elements(tower: &DyadicTower, base: usize, depth: usize, m: usize, phi: &BitVec) -> bool {
    let elems: Vec<_> = tower
        .kernel_elements(depth, m)
        .iter()
        .map(|g| g.induced_on_functions(base))
        .collect();
    (0..phi.len())
        .filter(|&i| elems.iter().all(|g| g.apply(i) == i))
        .fold(false, |acc, i| acc ^ phi.get(i))
}

/// Σ of random invariant functions is the same at every level from the
/// invariance level to the top.
pub fn sigma_level_independence(cfg: &SuiteConfig, cases: usize) -> Check {
    run("sigma_level_independence", || {
        let depth = cfg.depth_cap.min(3);
        let towers = [
            Arc::new(DyadicTower::dyadic_solenoid(depth).map_err(err)?),
            Arc::new(DyadicTower::dyadic_union(2, depth.min(2)).map_err(err)?),
        ];
        let mut rng = rng_for(cfg.seed, 2);
        for case in 0..cases {
            let tower = &towers[rng.gen_range(0..towers.len())];
            let top = tower.max_level();
            let base = if tower.level_size(top) > 4 { rng.gen_range(1..=2) } else { rng.gen_range(1..=3) };
            let chain = tower.function_chain(base, top);
            let h = rng.gen_range(0..=top);
            let phi = orbit_constant_table(&mut rng, &chain, h);
            let h = chain.invariance_level(&phi);
            let mut values = Vec::new();
            for m in h..=top {
                let v = cc_sum(&chain, &phi, m).map_err(|e| format!("case {case}, level {m}: {e}"))?;
                if v != fixed_sum_by_elements(tower, base, top, m, &phi) {
                    return Err(format!("case {case}, level {m}: generator and element fixed-point sums differ"));
                }
                values.push(v);
            }
            if values.iter().any(|&v| v != values[0]) {
                return Err(format!("case {case}: values {values:?} across levels {h}..={top}"));
            }
        }
        Ok((cases, format!("{cases} invariant functions, levels up to {depth}")))
    })
}

/// The edge set `fig8` plus random small graphs on its idempotents.
fn random_graph(rng: &mut ChaCha8Rng, idempotents: &[&str], edges: usize) -> GraphBasis {
    let names: Vec<String> = (0..edges).map(|i| format!("e{i}")).collect();
    let triples: Vec<(&str, &str, &str)> = names
        .iter()
        .map(|n| {
            (
                n.as_str(),
                idempotents[rng.gen_range(0..idempotents.len())],
                idempotents[rng.gen_range(0..idempotents.len())],
            )
        })
        .collect();
    GraphBasis::new(idempotents, &triples).expect("generated graph is well formed")
}

fn random_compatible(rng: &mut ChaCha8Rng, from: &GraphBasis, to: &GraphBasis) -> GraphMorphism {
    let m = F2Matrix::from_fn(to.edges.clone(), from.edges.clone(), |c, b| {
        to.same_ends(from, c, b) && rng.gen_bool(0.6)
    });
    GraphMorphism::new(from.clone(), to.clone(), m).expect("compatible by construction")
}

/// `e_S` is idempotent, lands in the sector, and fixes sector windows.
pub fn sector_idempotence(cfg: &SuiteConfig, cases: usize) -> Check {
    run("sector_idempotence", || {
        let max_depth = cfg.depth_cap.min(2);
        let tower = Arc::new(DyadicTower::dyadic_solenoid(max_depth).map_err(err)?);
        let mut rng = rng_for(cfg.seed, 3);
        for case in 0..cases {
            let g = if case % 2 == 0 {
                GraphBasis::fig8()
            } else {
                let n = rng.gen_range(1..=4);
                random_graph(&mut rng, &["p", "q"], n)
            };
            let depth = rng.gen_range(0..=max_depth);
            let w = random_window(&mut rng, &tower, &g.edges, depth)?;
            let once = e_s_project(&g, &w).map_err(err)?;
            let twice = e_s_project(&g, &once).map_err(err)?;
            if once != twice {
                return Err(format!("case {case}: e_S is not idempotent on {w:?}"));
            }
            if let Some(word) = sector_violation(&g, &once).map_err(err)? {
                return Err(format!("case {case}: e_S(w) contains {word}"));
            }
            let v = random_window(&mut rng, &tower, &g.edges, depth)?;
            let sum = e_s_project(&g, &w.add(&v).map_err(err)?).map_err(err)?;
            let parts = once.add(&e_s_project(&g, &v).map_err(err)?).map_err(err)?;
            if sum != parts {
                return Err(format!("case {case}: e_S is not additive"));
            }
        }
        Ok((cases, format!("{cases} windows at depths ≤ {max_depth}")))
    })
}

/// `(NM)^{(x)X_S} = N^{(x)X_S} ∘ M^{(x)X_S}` for compatible morphisms.
pub fn solenoidal_functor_law(cfg: &SuiteConfig, cases: usize) -> Check {
    run("solenoidal_functor_law", || {
        let max_depth = cfg.depth_cap.min(2);
        let tower = Arc::new(DyadicTower::dyadic_solenoid(max_depth).map_err(err)?);
        let mut rng = rng_for(cfg.seed, 4);
        let idem = ["i∅", "i0", "i1", "i01"];
        for case in 0..cases {
            let g = GraphBasis::fig8();
            let h = if case % 2 == 0 {
                g.clone()
            } else {
                let edges = rng.gen_range(2..=6);
                random_graph(&mut rng, &idem, edges)
            };
            let m = random_compatible(&mut rng, &g, &h);
            let n = random_compatible(&mut rng, &h, &g);
            let depth = rng.gen_range(0..=max_depth);
            let w = random_window(&mut rng, &tower, &g.edges, depth)?;
            let nm = n.compose(&m).map_err(err)?;
            let lhs = apply_solenoidal(&nm, &w, depth, SectorInput::Project).map_err(err)?;
            let mid = apply_solenoidal(&m, &w, depth, SectorInput::Project).map_err(err)?;
            let rhs = apply_solenoidal(&n, &mid, depth, SectorInput::Project).map_err(err)?;
            if lhs != rhs {
                return Err(format!("case {case}: composite {lhs:?} vs iterated {rhs:?} on {w:?}"));
            }
            let id = GraphMorphism::identity(&g);
            let fixed = apply_solenoidal(&id, &w, depth, SectorInput::Project).map_err(err)?;
            if fixed != e_s_project(&g, &w).map_err(err)? {
                return Err(format!("case {case}: identity does not act as e_S"));
            }
        }
        Ok((cases, format!("{cases} compatible pairs on fig8, depths ≤ {max_depth}")))
    })
}

/// The search finds incompatible matrices on `fig8` that break composition,
/// and the witness reproduces.
pub fn incompatibility_counterexample(cfg: &SuiteConfig) -> Check {
    run("incompatibility_counterexample", || {
        let g = GraphBasis::fig8();
        let found = composition_counterexample_search(&g, &g, DEFAULT_SEARCH_BOUND, cfg.seed).map_err(err)?;
        let wit = found.ok_or_else(|| format!("no witness within {DEFAULT_SEARCH_BOUND} pairs"))?;
        let again = composition_defect(&g, &g, &wit.m, &wit.n, &wit.window, wit.depth)
            .map_err(err)?
            .ok_or("witness does not reproduce")?;
        if again.word != wit.word {
            return Err(format!("witness word changed: {} vs {}", wit.word, again.word));
        }
        Ok((
            1,
            format!(
                "witness at depth {} on {}: (NM) gives {}, N∘M gives {}",
                wit.depth, wit.word, u8::from(wit.composite), u8::from(wit.iterated)
            ),
        ))
    })
}

/// `B ⊠ A` against the shipped table.
pub fn box_table_golden() -> Check {
    run("box_table_golden", || {
        let shipped = DABimodule::from_json(GOLDEN_BOX_TABLE).map_err(err)?;
        let computed = box_tensor(&cfda_tb_inv(), &cfda_ta()).map_err(err)?;
        if computed.generators() != shipped.generators() {
            return Err("generator lists differ".into());
        }
        let (c, s) = (computed.term_set(), shipped.term_set());
        if c != s {
            let extra: Vec<_> = c.difference(&s).collect();
            let missing: Vec<_> = s.difference(&c).collect();
            return Err(format!("extra {extra:?}, missing {missing:?}"));
        }
        Ok((
            computed.terms().len(),
            format!("{} terms over {} generators match", computed.terms().len(), computed.generators().len()),
        ))
    })
}

fn label_list(set: &BTreeSet<Output>) -> String {
    let v: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", v.join(", "))
}

/// The certificate for the `n`-fold powers, `n = 1, 2, ..., 2^depth_cap`.
pub fn certificates(cfg: &SuiteConfig) -> Check {
    run("vanishing_certificates", || {
        let base = seed_product();
        let mut parts = Vec::new();
        for k in 0..=cfg.depth_cap {
            let n = 1usize << k;
            let profile = power_profile(&base, n).map_err(err)?;
            let cert = profile_certificate(&profile).map_err(|e| format!("n = {n}: {e}"))?;
            let mut part = format!("n={n}: fixpoint {}", label_list(&cert.fixpoint));
            if n == 1 {
                part.push_str(&format!(", zero-input seed {}", label_list(&cert.seed)));
            }
            parts.push(part);
        }
        Ok((cfg.depth_cap + 1, parts.join("; ")))
    })
}

/// Staircase totals on `fig8` against Hochschild generator counts.
pub fn dimension_bridge(cfg: &SuiteConfig) -> Check {
    run("dimension_bridge", || {
        let rows = hfk_dimensions(cfg.depth_cap).map_err(err)?;
        let totals: Vec<String> = rows.iter().map(|r| r.total.to_string()).collect();
        Ok((rows.len(), format!("totals {} agree on both paths", totals.join(", "))))
    })
}

/// Combinatorial `HH_0` against the quotient by relations.
pub fn hh0_oracle(cfg: &SuiteConfig, cases: usize) -> Check {
    run("hh0_oracle", || {
        let mut rng = rng_for(cfg.seed, 5);
        let idem_names = ["k0", "k1", "k2"];
        for case in 0..cases {
            let k = rng.gen_range(1..=3);
            let e = rng.gen_range(1..=5);
            let g = random_graph(&mut rng, &idem_names[..k], e);
            let n = rng.gen_range(1..=4);
            let combinatorial = hh0_inline_power(&g, n).map_err(err)?.dimension;
            let relations = hh0_by_relations(&g, n).map_err(err)?;
            let walks = g.closed_walk_count(n).ok_or("overflow")?;
            if combinatorial != relations || combinatorial as u128 != walks {
                return Err(format!(
                    "case {case}: graph {:?}, n = {n}: combinatorial {combinatorial}, relations {relations}, trace {walks}",
                    g.to_text()
                ));
            }
        }
        Ok((cases, format!("{cases} graphs with ≤ 3 idempotents, ≤ 5 edges, powers ≤ 4")))
    })
}

fn random_invertible(rng: &mut ChaCha8Rng, basis: &LabeledSet) -> F2Matrix {
    loop {
        let m = random_matrix(rng, basis, basis);
        if m.is_invertible() {
            return m;
        }
    }
}

/// `apply_mcc(M^{-1}) ∘ apply_mcc(M)` is the identity.
pub fn change_of_basis(cfg: &SuiteConfig, cases: usize) -> Check {
    run("change_of_basis", || {
        let max_depth = cfg.depth_cap.min(2);
        let tower = Arc::new(DyadicTower::dyadic_solenoid(max_depth).map_err(err)?);
        let mut rng = rng_for(cfg.seed, 6);
        for case in 0..cases {
            let b = letters(rng.gen_range(1..=3));
            let m = random_invertible(&mut rng, &b);
            let inv = m.inverse().expect("invertible");
            let depth = rng.gen_range(0..=max_depth);
            let w = random_window(&mut rng, &tower, &b, depth)?;
            let back = apply_mcc(&inv, &apply_mcc(&m, &w, depth).map_err(err)?, depth).map_err(err)?;
            if back != w {
                return Err(format!("case {case}: M = {}, w = {w:?}, got {back:?}", m.to_text()));
            }
        }
        Ok((cases, format!("{cases} invertible matrices, depths ≤ {max_depth}")))
    })
}

/// Probe verdicts of the three series and the staircase shift of `F'`.
/// Probes run to depth at least 2 whatever the cap.
pub fn series_vectors(cfg: &SuiteConfig) -> Check {
    run("series_vectors", || {
        let depth = cfg.depth_cap.clamp(2, 3);
        let tower = Arc::new(DyadicTower::dyadic_solenoid(depth).map_err(err)?);
        let div = cc_probe(&series::divergent(tower.clone()), depth).map_err(err)?;
        if div.verdict != (Verdict::DivergentThroughProbeDepth { depth }) {
            return Err(format!("divergent series: {}", div.verdict));
        }
        let sym = cc_probe(&series::symmetrized(tower.clone()), depth).map_err(err)?;
        if sym.verdict != (Verdict::CcWitnessed { level: 0 }) {
            return Err(format!("symmetrized series: {}", sym.verdict));
        }
        let odd = cc_probe(&series::odd_positions(tower.clone()), depth).map_err(err)?;
        if odd.verdict != (Verdict::CcWitnessed { level: 1 }) {
            return Err(format!("odd-position series: {}", odd.verdict));
        }
        let elem = series::odd_positions(tower.clone()).level(depth).map_err(err)?;
        let xy = MccWindow::from_words(tower.clone(), series::xy_basis(), depth, &["xy"]).map_err(err)?;
        let shifted = elem.add(&xy).map_err(err)?;
        let before = staircase_position(&elem);
        let after = staircase_position(&shifted);
        let expected = StairPosition { h: 1, d: Some(2) };
        if after != expected || !after.in_f_double_prime(1) || before.in_f_double_prime(1) {
            return Err(format!("staircase positions {before} and {after}"));
        }
        Ok((
            4,
            format!(
                "divergent: {}; symmetrized: {}; odd positions: {}; odd positions + xy at {after}",
                div.verdict, sym.verdict, odd.verdict
            ),
        ))
    })
}

/// Staircase dimensions of `g`, for `dims`.
pub fn staircase_table(g: &GraphBasis, max_level: usize) -> Result<Vec<u128>, String> {
    let tower = DyadicTower::dyadic_solenoid(max_level).map_err(err)?;
    staircase_dims(g, &tower, max_level).map_err(err)
}

/// Every suite `verify` runs, in report order.
pub fn verify_suites(cfg: &SuiteConfig) -> Vec<Check> {
    vec![
        functoriality(cfg, 200),
        sigma_level_independence(cfg, 100),
        sector_idempotence(cfg, 60),
        solenoidal_functor_law(cfg, 60),
        incompatibility_counterexample(cfg),
        box_table_golden(),
        certificates(cfg),
        dimension_bridge(cfg),
        hh0_oracle(cfg, 50),
        change_of_basis(cfg, 50),
        series_vectors(cfg),
    ]
}
