//! Bimodules over `I = F2 x ... x F2` given by directed graphs, and their
//! solenoidal tensor powers.
//!
//! A pure tensor `f: X -> B` lies in the solenoidal sector when
//! `s(f(Sx)) = t(f(x))` for every `x`; at level `m` of the dyadic solenoid
//! these are the closed walks of length `2^m`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitVec;
use crate::f2cat::{rank_of_rows, strip_comment, F2Matrix, FunctionIndex, LabeledSet};
use crate::mcc::{apply_mcc, function_space, MccError, MccWindow};
use crate::tower::{DyadicTower, LevelFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolenoidalError {
    #[error("tower {0:?} has no shift")]
    MissingShift(String),
    #[error("entry ({row}, {col}) is nonzero but the edges have different endpoints")]
    Incompatible { row: String, col: String },
    #[error("graphs have different idempotents: {left} vs {right}")]
    IdempotentMismatch { left: String, right: String },
    #[error("window basis {window} is not the edge set {edges}")]
    NotGraphBasis { window: String, edges: String },
    #[error("window is not in the solenoidal sector: {word} is not a closed walk")]
    NotInSector { word: String },
    #[error("power must be at least 1, got {0}")]
    BadPower(usize),
    #[error("walk count overflows at level {0}")]
    Overflow(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Mcc(#[from] MccError),
}

/// A directed multigraph `(B, s, t)` over a set of primitive idempotents.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphBasis {
    pub idempotents: LabeledSet,
    pub edges: LabeledSet,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

impl fmt::Debug for GraphBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphBasis {{ ")?;
        for (e, label) in self.edges.labels().iter().enumerate() {
            write!(
                f,
                "{label}: {} -> {}; ",
                self.idempotents.label(self.s[e]),
                self.idempotents.label(self.t[e])
            )?;
        }
        write!(f, "}}")
    }
}

impl GraphBasis {
    /// Build from `(name, source, target)` triples.
    pub fn new(idempotents: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self, SolenoidalError> {
        let idem = LabeledSet::new(idempotents.iter().copied()).map_err(|e| SolenoidalError::Parse {
            line: 0,
            msg: e.to_string(),
        })?;
        let names = LabeledSet::new(edges.iter().map(|e| e.0)).map_err(|e| SolenoidalError::Parse {
            line: 0,
            msg: e.to_string(),
        })?;
        let find = |v: &str| {
            idem.position(v).ok_or_else(|| SolenoidalError::Parse {
                line: 0,
                msg: format!("unknown idempotent {v:?}"),
            })
        };
        let s = edges.iter().map(|e| find(e.1)).collect::<Result<_, _>>()?;
        let t = edges.iter().map(|e| find(e.2)).collect::<Result<_, _>>()?;
        Ok(Self {
            idempotents: idem,
            edges: names,
            s,
            t,
        })
    }

    /// The seven-edge figure-eight graph on four idempotents.
    pub fn fig8() -> Self {
        Self::new(
            &["i∅", "i0", "i1", "i01"],
            &[
                ("t", "i∅", "i∅"),
                ("u", "i0", "i0"),
                ("v", "i0", "i1"),
                ("w", "i1", "i0"),
                ("x", "i1", "i1"),
                ("y", "i1", "i1"),
                ("z", "i01", "i01"),
            ],
        )
        .expect("figure-eight data is well formed")
    }

    /// Parse `idempotents: a b ...` followed by `edge name from to` lines.
    pub fn parse(text: &str) -> Result<Self, SolenoidalError> {
        let mut idem: Option<Vec<String>> = None;
        let mut edges: Vec<(usize, String, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| SolenoidalError::Parse { line: ln, msg };
            if let Some(rest) = line.strip_prefix("idempotents:") {
                if idem.is_some() {
                    return Err(perr("idempotents declared twice".into()));
                }
                idem = Some(rest.split_whitespace().map(str::to_string).collect());
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.as_slice() {
                ["edge", name, from, to] => {
                    let Some(known) = &idem else {
                        return Err(perr("`idempotents:` must come first".into()));
                    };
                    for v in [from, to] {
                        if !known.iter().any(|k| k == v) {
                            return Err(perr(format!("unknown idempotent {v:?}")));
                        }
                    }
                    if edges.iter().any(|e| e.1 == *name) {
                        return Err(perr(format!("edge {name:?} declared twice")));
                    }
                    edges.push((ln, name.to_string(), from.to_string(), to.to_string()));
                }
                _ => return Err(perr(format!("expected `edge <name> <from> <to>`, found {line:?}"))),
            }
        }
        let idem = idem.ok_or(SolenoidalError::Parse {
            line: 1,
            msg: "missing `idempotents:` line".into(),
        })?;
        let idem_refs: Vec<&str> = idem.iter().map(String::as_str).collect();
        let edge_refs: Vec<(&str, &str, &str)> = edges
            .iter()
            .map(|(_, n, a, b)| (n.as_str(), a.as_str(), b.as_str()))
            .collect();
        Self::new(&idem_refs, &edge_refs).map_err(|e| match e {
            SolenoidalError::Parse { msg, .. } => SolenoidalError::Parse { line: 1, msg },
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("idempotents: {}\n", self.idempotents.labels().join(" "));
        for e in 0..self.edges.len() {
            out.push_str(&format!(
                "edge {} {} {}\n",
                self.edges.label(e),
                self.idempotents.label(self.s[e]),
                self.idempotents.label(self.t[e])
            ));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.s[e] == self.t[e]
    }

    pub fn loop_count(&self) -> usize {
        (0..self.edge_count()).filter(|&e| self.is_loop(e)).count()
    }

    /// `T[i][j]` = number of edges from idempotent `i` to idempotent `j`.
    pub fn transfer_matrix(&self) -> Vec<Vec<u128>> {
        let n = self.idempotents.len();
        let mut m = vec![vec![0u128; n]; n];
        for e in 0..self.edge_count() {
            m[self.s[e]][self.t[e]] += 1;
        }
        m
    }

    /// Number of closed walks of length `n`, as `trace(T^n)`.
    pub fn closed_walk_count(&self, n: usize) -> Option<u128> {
        let t = self.transfer_matrix();
        let k = t.len();
        let mut p: Vec<Vec<u128>> = (0..k)
            .map(|i| (0..k).map(|j| u128::from(i == j)).collect())
            .collect();
        for _ in 0..n {
            let mut q = vec![vec![0u128; k]; k];
            for i in 0..k {
                for l in 0..k {
                    if p[i][l] == 0 {
                        continue;
                    }
                    for j in 0..k {
                        q[i][j] = q[i][j].checked_add(p[i][l].checked_mul(t[l][j])?)?;
                    }
                }
            }
            p = q;
        }
        (0..k).try_fold(0u128, |acc, i| acc.checked_add(p[i][i]))
    }

    /// Whether `word` is a closed walk, each edge ending where the next starts.
    pub fn is_closed_walk(&self, word: &[usize]) -> bool {
        !word.is_empty()
            && (0..word.len()).all(|i| self.t[word[i]] == self.s[word[(i + 1) % word.len()]])
    }

    /// Whether edge `c` of `self` and edge `b` of `other` have the same ends.
    pub fn same_ends(&self, other: &GraphBasis, c: usize, b: usize) -> bool {
        self.s[c] == other.s[b] && self.t[c] == other.t[b]
    }
}

/// A compatible matrix between edge sets over the same idempotents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    pub from: GraphBasis,
    pub to: GraphBasis,
    pub matrix: F2Matrix,
}

impl GraphMorphism {
    /// Validates that every nonzero entry joins edges with equal endpoints.
    pub fn new(from: GraphBasis, to: GraphBasis, matrix: F2Matrix) -> Result<Self, SolenoidalError> {
        check_same_idempotents(&from, &to)?;
        if let Some((c, b)) = incompatible_entry(&from, &to, &matrix) {
            return Err(SolenoidalError::Incompatible {
                row: to.edges.label(c).to_string(),
                col: from.edges.label(b).to_string(),
            });
        }
        Ok(Self { from, to, matrix })
    }

    pub fn identity(g: &GraphBasis) -> Self {
        Self {
            from: g.clone(),
            to: g.clone(),
            matrix: F2Matrix::identity(g.edges.clone()),
        }
    }

    /// `self ∘ m`.
    pub fn compose(&self, m: &GraphMorphism) -> Result<GraphMorphism, SolenoidalError> {
        let matrix = self.matrix.compose(&m.matrix).map_err(|e| {
            SolenoidalError::Parse {
                line: 0,
                msg: e.to_string(),
            }
        })?;
        Ok(GraphMorphism {
            from: m.from.clone(),
            to: self.to.clone(),
            matrix,
        })
    }
}

fn check_same_idempotents(a: &GraphBasis, b: &GraphBasis) -> Result<(), SolenoidalError> {
    if a.idempotents != b.idempotents {
        return Err(SolenoidalError::IdempotentMismatch {
            left: a.idempotents.to_string(),
            right: b.idempotents.to_string(),
        });
    }
    Ok(())
}

/// First nonzero entry `(c, b)` of `matrix: from -> to` joining edges with
/// different endpoints.
pub fn incompatible_entry(
    from: &GraphBasis,
    to: &GraphBasis,
    matrix: &F2Matrix,
) -> Option<(usize, usize)> {
    (0..to.edge_count()).find_map(|c| {
        matrix
            .row_bits(c)
            .ones_iter()
            .find(|&b| !to.same_ends(from, c, b))
            .map(|b| (c, b))
    })
}

fn require_shift(tw: &DyadicTower) -> Result<(), SolenoidalError> {
    if tw.has_shift() {
        Ok(())
    } else {
        Err(SolenoidalError::MissingShift(tw.name().to_string()))
    }
}

/// Whether `f ∈ B^{X_m}` (as digits) satisfies `s(f(Sx)) = t(f(x))`.
fn is_solenoidal(g: &GraphBasis, tw: &DyadicTower, m: usize, f: &[usize]) -> bool {
    let shift = tw.shift(m).expect("checked by caller");
    (0..f.len()).all(|x| g.s[f[shift.apply(x)]] == g.t[f[x]])
}

/// Indices in `B^{X_m}` of the solenoidal pure tensors, ascending.
pub fn closed_walk_indices(
    g: &GraphBasis,
    tw: &DyadicTower,
    m: usize,
) -> Result<Vec<usize>, SolenoidalError> {
    require_shift(tw)?;
    tw.check_level(m).map_err(MccError::from)?;
    let n = tw.level_size(m);
    let shift = tw.shift(m).expect("checked");
    let inv = shift.inverse();
    let space = FunctionIndex::new(g.edge_count(), n);
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    // Depth-first over positions in index order, checking each constraint
    // as soon as both of its ends are assigned.
    fn go(
        x: usize,
        g: &GraphBasis,
        next: &crate::tower::Perm,
        prev: &crate::tower::Perm,
        cur: &mut Vec<usize>,
        space: &FunctionIndex,
        out: &mut Vec<usize>,
    ) {
        if x == cur.len() {
            out.push(space.index(cur));
            return;
        }
        for e in 0..g.edge_count() {
            cur[x] = e;
            let nx = next.apply(x);
            let px = prev.apply(x);
            if nx <= x && g.s[cur[nx]] != g.t[e] {
                continue;
            }
            if px <= x && g.s[e] != g.t[cur[px]] {
                continue;
            }
            go(x + 1, g, next, prev, cur, space, out);
        }
    }
    go(0, g, shift, &inv, &mut cur, &space, &mut out);
    Ok(out)
}

/// All solenoidal pure tensors at level `m`, in index order.
pub fn closed_walk_tensors(
    g: &GraphBasis,
    tw: &Arc<DyadicTower>,
    m: usize,
) -> Result<Vec<LevelFunction>, SolenoidalError> {
    let space = FunctionIndex::new(g.edge_count(), tw.level_size(m.min(tw.max_level())));
    closed_walk_indices(g, tw, m)?
        .into_iter()
        .map(|i| {
            LevelFunction::new(tw.clone(), m, g.edges.clone(), space.digits(i))
                .map_err(|e| SolenoidalError::Mcc(e.into()))
        })
        .collect()
}

/// Indicator of the solenoidal sector in `B^{X_m}`.
pub fn sector_mask(g: &GraphBasis, tw: &DyadicTower, m: usize) -> Result<BitVec, SolenoidalError> {
    let space = function_space(tw, g.edge_count(), m)?;
    let mut mask = BitVec::zeros(space.size());
    for i in closed_walk_indices(g, tw, m)? {
        mask.set(i, true);
    }
    Ok(mask)
}

fn check_window_basis(g: &GraphBasis, w: &MccWindow) -> Result<(), SolenoidalError> {
    if w.basis() != &g.edges {
        return Err(SolenoidalError::NotGraphBasis {
            window: w.basis().to_string(),
            edges: g.edges.to_string(),
        });
    }
    Ok(())
}

/// The projector `e_S`: zero `w` off the solenoidal sector.
pub fn e_s_project(g: &GraphBasis, w: &MccWindow) -> Result<MccWindow, SolenoidalError> {
    check_window_basis(g, w)?;
    require_shift(w.tower())?;
    let mask = sector_mask(g, w.tower(), w.depth())?;
    let mut table = w.table().clone();
    for i in w.table().ones_iter() {
        if !mask.get(i) {
            table.set(i, false);
        }
    }
    Ok(MccWindow::from_table(
        w.tower().clone(),
        w.basis().clone(),
        w.depth(),
        table,
    )?)
}

/// First supported tensor of `w` outside the sector, as a word.
pub fn sector_violation(g: &GraphBasis, w: &MccWindow) -> Result<Option<String>, SolenoidalError> {
    check_window_basis(g, w)?;
    require_shift(w.tower())?;
    let space = FunctionIndex::new(g.edge_count(), w.tower().level_size(w.depth()));
    Ok(w.table()
        .ones_iter()
        .find(|&i| !is_solenoidal(g, w.tower(), w.depth(), &space.digits(i)))
        .map(|i| {
            let d = space.digits(i);
            d.iter().map(|&e| g.edges.label(e)).collect::<Vec<_>>().join("")
        }))
}

/// How `apply_solenoidal` treats windows outside the sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SectorInput {
    #[default]
    Project,
    Strict,
}

/// `e_{C,S} ∘ M^{(x)X}` on the solenoidal sector.
pub fn apply_solenoidal(
    m: &GraphMorphism,
    w: &MccWindow,
    out_depth: usize,
    mode: SectorInput,
) -> Result<MccWindow, SolenoidalError> {
    let input = match mode {
        SectorInput::Project => e_s_project(&m.from, w)?,
        SectorInput::Strict => {
            if let Some(word) = sector_violation(&m.from, w)? {
                return Err(SolenoidalError::NotInSector { word });
            }
            w.clone()
        }
    };
    let out = apply_mcc(&m.matrix, &input, out_depth)?;
    e_s_project(&m.to, &out)
}

/// `e_S ∘ M^{(x)X} ∘ e_S` for an arbitrary, possibly incompatible, matrix.
pub fn apply_solenoidal_matrix(
    from: &GraphBasis,
    to: &GraphBasis,
    m: &F2Matrix,
    w: &MccWindow,
    out_depth: usize,
) -> Result<MccWindow, SolenoidalError> {
    let input = e_s_project(from, w)?;
    let out = apply_mcc(m, &input, out_depth)?;
    e_s_project(to, &out)
}

/// `HH_0(I; V^{(x)_I n})` with its basis of closed walks of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hh0 {
    pub dimension: usize,
    /// Each class representative as a list of edge indices.
    pub classes: Vec<Vec<usize>>,
}

impl Hh0 {
    pub fn class_words(&self, g: &GraphBasis) -> Vec<String> {
        self.classes
            .iter()
            .map(|w| w.iter().map(|&e| g.edges.label(e)).collect::<Vec<_>>().join(""))
            .collect()
    }
}

/// Idempotent-chained words of length `n`: `t(a_i) = s(a_{i+1})`.
pub fn chained_words(g: &GraphBasis, n: usize) -> Vec<Vec<usize>> {
    let mut words: Vec<Vec<usize>> = (0..g.edge_count()).map(|e| vec![e]).collect();
    for _ in 1..n {
        words = words
            .into_iter()
            .flat_map(|w| {
                let end = g.t[*w.last().expect("nonempty")];
                (0..g.edge_count())
                    .filter(move |&e| g.s[e] == end)
                    .map(move |e| {
                        let mut v = w.clone();
                        v.push(e);
                        v
                    })
            })
            .collect();
    }
    words
}

/// Combinatorial `HH_0`: cyclically matched chained words.
pub fn hh0_inline_power(g: &GraphBasis, n: usize) -> Result<Hh0, SolenoidalError> {
    if n == 0 {
        return Err(SolenoidalError::BadPower(n));
    }
    let classes: Vec<Vec<usize>> = chained_words(g, n)
        .into_iter()
        .filter(|w| g.is_closed_walk(w))
        .collect();
    Ok(Hh0 {
        dimension: classes.len(),
        classes,
    })
}

/// `HH_0` as the literal quotient of chained words by `ι_k m - m ι_k`,
/// computed by row reduction.
pub fn hh0_by_relations(g: &GraphBasis, n: usize) -> Result<usize, SolenoidalError> {
    if n == 0 {
        return Err(SolenoidalError::BadPower(n));
    }
    let words = chained_words(g, n);
    let index: HashMap<&[usize], usize> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i))
        .collect();
    let mut relations = Vec::new();
    for w in &words {
        for k in 0..g.idempotents.len() {
            let mut r = BitVec::zeros(words.len());
            if g.s[w[0]] == k {
                r.flip(index[w.as_slice()]);
            }
            if g.t[*w.last().expect("nonempty")] == k {
                r.flip(index[w.as_slice()]);
            }
            if !r.is_zero() {
                relations.push(r);
            }
        }
    }
    Ok(words.len() - rank_of_rows(relations))
}

/// Dimensions of `F'_H / F''_H` for the level-`m` kernels `H`, `m ≤ max_level`.
///
/// Each level is the product over shift orbits of the closed-walk count of
/// the orbit length. The kernel at level `m` acts trivially on `X_m`, so the
/// invariants condition imposes nothing.
pub fn staircase_dims(
    g: &GraphBasis,
    tw: &DyadicTower,
    max_level: usize,
) -> Result<Vec<u128>, SolenoidalError> {
    require_shift(tw)?;
    tw.check_level(max_level).map_err(MccError::from)?;
    let mut cache: HashMap<usize, u128> = HashMap::new();
    (0..=max_level)
        .map(|m| {
            let shift = tw.shift(m).expect("checked");
            let mut orbits = shift.cycles();
            orbits.sort_by_key(|o| o[0]);
            orbits.iter().try_fold(1u128, |acc, orbit| {
                let len = orbit.len();
                let w = match cache.get(&len) {
                    Some(&w) => w,
                    None => {
                        let w = g
                            .closed_walk_count(len)
                            .ok_or(SolenoidalError::Overflow(m))?;
                        cache.insert(len, w);
                        w
                    }
                };
                acc.checked_mul(w).ok_or(SolenoidalError::Overflow(m))
            })
        })
        .collect()
}

/// A pair of matrices on which the solenoidal action fails to compose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionWitness {
    /// `M: B -> C`.
    pub m: F2Matrix,
    /// `N: C -> B`.
    pub n: F2Matrix,
    pub window: MccWindow,
    pub depth: usize,
    /// A pure tensor on which the two sides differ.
    pub word: String,
    /// Value of `(NM)^{(x)X_S}`.
    pub composite: bool,
    /// Value of `N^{(x)X_S} ∘ M^{(x)X_S}`.
    pub iterated: bool,
}

pub const DEFAULT_SEARCH_BOUND: usize = 2000;
pub const DEFAULT_SEARCH_SEED: u64 = 0x5eed;

/// Compare `(NM)^{(x)X_S}` with `N^{(x)X_S} ∘ M^{(x)X_S}` on `w`.
pub fn composition_defect(
    g: &GraphBasis,
    h: &GraphBasis,
    m: &F2Matrix,
    n: &F2Matrix,
    w: &MccWindow,
    depth: usize,
) -> Result<Option<CompositionWitness>, SolenoidalError> {
    let nm = n.compose(m).expect("shapes agree");
    let lhs = apply_solenoidal_matrix(g, g, &nm, w, depth)?;
    let mid = apply_solenoidal_matrix(g, h, m, w, depth)?;
    let rhs = apply_solenoidal_matrix(h, g, n, &mid, depth)?;
    let mut diff = lhs.table().clone();
    diff.xor_assign(rhs.table());
    Ok(diff.first_one().map(|i| {
        let space = FunctionIndex::new(g.edge_count(), w.tower().level_size(depth));
        let word = space
            .digits(i)
            .iter()
            .map(|&e| g.edges.label(e))
            .collect::<Vec<_>>()
            .join("");
        CompositionWitness {
            m: m.clone(),
            n: n.clone(),
            window: w.clone(),
            depth,
            word,
            composite: lhs.table().get(i),
            iterated: rhs.table().get(i),
        }
    }))
}

/// Search incompatible pairs `M: g -> g'`, `N: g' -> g` for a failure of
/// solenoidal functoriality at depth 0 or 1. Structured candidates
/// (identity plus one off-type entry, on basis tensors of single loops) come
/// first when `g = g'`; random pairs follow. `bound` caps the number of
/// matrix pairs tried.
pub fn composition_counterexample_search(
    g: &GraphBasis,
    g_prime: &GraphBasis,
    bound: usize,
    seed: u64,
) -> Result<Option<CompositionWitness>, SolenoidalError> {
    check_same_idempotents(g, g_prime)?;
    let tower = Arc::new(DyadicTower::dyadic_solenoid(1).map_err(MccError::from)?);
    let b = g.edge_count();
    let mut tried = 0usize;
    let sector: Vec<Vec<usize>> = (0..=1)
        .map(|d| closed_walk_indices(g, &tower, d))
        .collect::<Result<_, _>>()?;
    let window_of = |d: usize, idx: &[usize]| -> Result<MccWindow, SolenoidalError> {
        let size = function_space(&tower, b, d)?.size();
        let mut t = BitVec::zeros(size);
        for &i in idx {
            t.flip(i);
        }
        Ok(MccWindow::from_table(tower.clone(), g.edges.clone(), d, t)?)
    };
    if g == g_prime {
        for src in 0..b {
            for dst in 0..b {
                if tried >= bound {
                    return Ok(None);
                }
                if g.same_ends(g, dst, src) {
                    continue;
                }
                tried += 1;
                let mut m = F2Matrix::identity(g.edges.clone());
                m.set(dst, src, true);
                let mut n = F2Matrix::identity(g.edges.clone());
                n.set(src, dst, true);
                for (d, walks) in sector.iter().enumerate() {
                    for &i in walks {
                        let w = window_of(d, &[i])?;
                        if let Some(wit) = composition_defect(g, g_prime, &m, &n, &w, d)? {
                            return Ok(Some(wit));
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while tried < bound {
        let m = F2Matrix::from_fn(g_prime.edges.clone(), g.edges.clone(), |_, _| rng.gen_bool(0.3));
        let n = F2Matrix::from_fn(g.edges.clone(), g_prime.edges.clone(), |_, _| rng.gen_bool(0.3));
        if incompatible_entry(g, g_prime, &m).is_none() && incompatible_entry(g_prime, g, &n).is_none() {
            continue;
        }
        tried += 1;
        let d = rng.gen_range(0..=1usize);
        let pick: Vec<usize> = sector[d].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let w = window_of(d, &pick)?;
        if let Some(wit) = composition_defect(g, g_prime, &m, &n, &w, d)? {
            return Ok(Some(wit));
        }
    }
    Ok(None)
}
