//! Profinite index sets presented as towers of finite levels.
//!
//! A [`DyadicTower`] records levels `X_0 <- X_1 <- ... <- X_N`, a paired list
//! of generating permutations per level, and an optional shift. Everything
//! is validated on construction. The conditionally convergent sum lives in
//! [`cc_sum`], which works over any [`GSetChain`].

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitVec;
use crate::f2cat::{strip_comment, FunctionIndex, LabeledSet};

/// Largest level accepted by the validator. Group enumeration is exhaustive.
pub const MAX_LEVEL: usize = 10;

/// Largest group order enumerated during validation.
const MAX_GROUP_ORDER: usize = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("level {level}: fiber over {parent:?} has {size} elements, not a power of 2")]
    FiberSize {
        level: usize,
        parent: String,
        size: usize,
    },
    #[error("level {level}: action group has order {order}, not a power of 2")]
    GroupOrder { level: usize, order: usize },
    #[error("level {level}: action group exceeds {MAX_GROUP_ORDER} elements")]
    GroupTooLarge { level: usize },
    #[error("level {level}: generator {generator} does not commute with the projection at {element:?}")]
    ProjectionMismatch {
        level: usize,
        generator: usize,
        element: String,
    },
    #[error("level {level}: shift does not commute with generator {generator}")]
    ShiftActionMismatch { level: usize, generator: usize },
    #[error("level {level}: shift does not commute with the projection at {element:?}")]
    ShiftProjectionMismatch { level: usize, element: String },
    #[error("level {level}: {msg}")]
    Malformed { level: usize, msg: String },
    #[error("max level {0} exceeds the supported cap {MAX_LEVEL}")]
    TooDeep(usize),
    #[error("level {level} is beyond the tower's max level {max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("table is not invariant: entries {a} and {b} lie in one orbit but differ")]
    InvarianceViolation { a: usize, b: usize },
    #[error("sum changed between level {level} and level {next}")]
    LevelDependence { level: usize, next: usize },
    #[error("table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A permutation of `{0, ..., n-1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Perm(images.into_iter().map(|i| i as u32).collect()))
    }

    /// The cyclic shift `i -> i + k mod n`.
    pub fn rotation(n: usize, k: usize) -> Self {
        Perm((0..n).map(|i| ((i + k) % n.max(1)) as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn pow(&self, k: usize) -> Perm {
        let mut out = Perm::identity(self.len());
        for _ in 0..k {
            out = self.after(&out);
        }
        out
    }

    /// Orbits, each listed from its least element in traversal order;
    /// orbits are sorted by least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i);
                i = self.apply(i);
            }
            out.push(cyc);
        }
        out
    }

    /// The permutation `f -> g·f` of `B^X`, where `(g·f)(x) = f(g⁻¹x)`.
    pub fn induced_on_functions(&self, base: usize) -> Perm {
        let space = FunctionIndex::new(base, self.len());
        let n = space.size();
        let images = (0..n)
            .map(|i| {
                let d = space.digits(i);
                let mut e = vec![0; d.len()];
                for (x, &dx) in d.iter().enumerate() {
                    e[self.apply(x)] = dx;
                }
                space.index(&e) as u32
            })
            .collect();
        Perm(images)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.cycles().iter().filter(|c| c.len() > 1) {
            let parts: Vec<String> = c.iter().map(ToString::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        if self.is_identity() {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// All elements of the group generated by `gens` on `n` points, identity first.
pub fn group_closure(gens: &[Perm], n: usize, cap: usize) -> Option<Vec<Perm>> {
    let id = Perm::identity(n);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.after(&p);
            if seen.insert(q.clone()) {
                if out.len() >= cap {
                    return None;
                }
                out.push(q.clone());
                queue.push_back(q);
            }
        }
    }
    Some(out)
}

/// A small generating set for a subgroup, given as its full element list.
fn generating_subset(elements: &[Perm], n: usize) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: HashSet<Perm> = HashSet::from([Perm::identity(n)]);
    for e in elements {
        if !span.contains(e) {
            gens.push(e.clone());
            span = group_closure(&gens, n, usize::MAX)
                .expect("uncapped closure")
                .into_iter()
                .collect();
        }
    }
    gens
}

/// A validated tower of finite levels with compatible 2-group actions.
#[derive(Clone)]
pub struct DyadicTower {
    name: String,
    levels: Vec<LabeledSet>,
    /// `parents[m][x]` is the image of `x ∈ X_m` in `X_{m-1}`; `parents[0]` is empty.
    parents: Vec<Vec<usize>>,
    gens: Vec<Vec<Perm>>,
    shift: Option<Vec<Perm>>,
    groups: Vec<Vec<Perm>>,
}

impl fmt::Debug for DyadicTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DyadicTower")
            .field("name", &self.name)
            .field("sizes", &self.levels.iter().map(LabeledSet::len).collect::<Vec<_>>())
            .field("shift", &self.shift.is_some())
            .finish()
    }
}

impl DyadicTower {
    /// Validate and build a tower. `gens[m]` must all have the same length,
    /// the i-th generators of consecutive levels being paired.
    pub fn new(
        name: impl Into<String>,
        levels: Vec<LabeledSet>,
        parents: Vec<Vec<usize>>,
        gens: Vec<Vec<Perm>>,
        shift: Option<Vec<Perm>>,
    ) -> Result<Self, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::Malformed {
                level: 0,
                msg: "no levels".into(),
            });
        }
        let max = levels.len() - 1;
        if max > MAX_LEVEL {
            return Err(TowerError::TooDeep(max));
        }
        if parents.len() != levels.len() || gens.len() != levels.len() {
            return Err(TowerError::Malformed {
                level: 0,
                msg: "per-level data has inconsistent length".into(),
            });
        }
        if let Some(s) = &shift {
            if s.len() != levels.len() {
                return Err(TowerError::Malformed {
                    level: 0,
                    msg: "shift missing at some level".into(),
                });
            }
        }
        let arity = gens[0].len();
        for (m, set) in levels.iter().enumerate() {
            if set.is_empty() {
                return Err(TowerError::Malformed {
                    level: m,
                    msg: "empty level".into(),
                });
            }
            if gens[m].len() != arity {
                return Err(TowerError::Malformed {
                    level: m,
                    msg: format!("expected {arity} paired generators, found {}", gens[m].len()),
                });
            }
            for p in gens[m].iter().chain(shift.iter().map(|s| &s[m])) {
                if p.len() != set.len() {
                    return Err(TowerError::Malformed {
                        level: m,
                        msg: "permutation size differs from level size".into(),
                    });
                }
            }
        }
        for m in 1..=max {
            let par = &parents[m];
            if par.len() != levels[m].len() || par.iter().any(|&p| p >= levels[m - 1].len()) {
                return Err(TowerError::Malformed {
                    level: m,
                    msg: "projection is not a map into the previous level".into(),
                });
            }
            let mut fiber = vec![0usize; levels[m - 1].len()];
            for &p in par {
                fiber[p] += 1;
            }
            for (p, &size) in fiber.iter().enumerate() {
                if !size.is_power_of_two() {
                    return Err(TowerError::FiberSize {
                        level: m,
                        parent: levels[m - 1].label(p).to_string(),
                        size,
                    });
                }
            }
            for (i, (g, g_prev)) in gens[m].iter().zip(&gens[m - 1]).enumerate() {
                for x in 0..levels[m].len() {
                    if par[g.apply(x)] != g_prev.apply(par[x]) {
                        return Err(TowerError::ProjectionMismatch {
                            level: m,
                            generator: i,
                            element: levels[m].label(x).to_string(),
                        });
                    }
                }
            }
            if let Some(s) = &shift {
                for x in 0..levels[m].len() {
                    if par[s[m].apply(x)] != s[m - 1].apply(par[x]) {
                        return Err(TowerError::ShiftProjectionMismatch {
                            level: m,
                            element: levels[m].label(x).to_string(),
                        });
                    }
                }
            }
        }
        if let Some(s) = &shift {
            for m in 0..=max {
                for (i, g) in gens[m].iter().enumerate() {
                    if s[m].after(g) != g.after(&s[m]) {
                        return Err(TowerError::ShiftActionMismatch {
                            level: m,
                            generator: i,
                        });
                    }
                }
            }
        }
        let mut groups = Vec::with_capacity(levels.len());
        for m in 0..=max {
            let elems = group_closure(&gens[m], levels[m].len(), MAX_GROUP_ORDER)
                .ok_or(TowerError::GroupTooLarge { level: m })?;
            if !elems.len().is_power_of_two() {
                return Err(TowerError::GroupOrder {
                    level: m,
                    order: elems.len(),
                });
            }
            groups.push(elems);
        }
        Ok(Self {
            name: name.into(),
            levels,
            parents,
            gens,
            shift,
            groups,
        })
    }

    /// `X_m = Z/2^m`, projection mod `2^m`, action and shift both `+1`.
    pub fn dyadic_solenoid(max_level: usize) -> Result<Self, TowerError> {
        Self::dyadic_union(1, max_level).map(|mut t| {
            t.name = format!("dyadic {max_level}");
            t
        })
    }

    /// `copies` disjoint copies of the dyadic solenoid with simultaneous `+1`
    /// action and shift. Elements are labeled `copy_residue`.
    pub fn dyadic_union(copies: usize, max_level: usize) -> Result<Self, TowerError> {
        if max_level > MAX_LEVEL {
            return Err(TowerError::TooDeep(max_level));
        }
        if copies == 0 {
            return Err(TowerError::Malformed {
                level: 0,
                msg: "need at least one copy".into(),
            });
        }
        let mut levels = Vec::new();
        let mut parents = Vec::new();
        let mut gens = Vec::new();
        let mut shifts = Vec::new();
        let single = copies == 1;
        for m in 0..=max_level {
            let n = 1usize << m;
            let labels: Vec<String> = (0..copies)
                .flat_map(|c| {
                    (0..n).map(move |i| if single { i.to_string() } else { format!("{c}_{i}") })
                })
                .collect();
            let par: Vec<usize> = if m == 0 {
                Vec::new()
            } else {
                let prev_n = n / 2;
                (0..copies)
                    .flat_map(|c| (0..n).map(move |i| c * prev_n + i % prev_n))
                    .collect()
            };
            let plus_one = Perm::from_images(
                (0..copies)
                    .flat_map(|c| (0..n).map(move |i| c * n + (i + 1) % n))
                    .collect(),
            )
            .expect("rotation is a permutation");
            levels.push(LabeledSet::new(labels).expect("labels are distinct"));
            parents.push(par);
            gens.push(vec![plus_one.clone()]);
            shifts.push(plus_one);
        }
        Self::new(
            format!("dyadic_union {copies} {max_level}"),
            levels,
            parents,
            gens,
            Some(shifts),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level_set(&self, m: usize) -> &LabeledSet {
        &self.levels[m]
    }

    pub fn level_size(&self, m: usize) -> usize {
        self.levels[m].len()
    }

    pub fn generators(&self, m: usize) -> &[Perm] {
        &self.gens[m]
    }

    pub fn group(&self, m: usize) -> &[Perm] {
        &self.groups[m]
    }

    pub fn shift(&self, m: usize) -> Option<&Perm> {
        self.shift.as_ref().map(|s| &s[m])
    }

    pub fn has_shift(&self) -> bool {
        self.shift.is_some()
    }

    pub fn check_level(&self, m: usize) -> Result<(), TowerError> {
        if m > self.max_level() {
            Err(TowerError::LevelOutOfRange {
                level: m,
                max: self.max_level(),
            })
        } else {
            Ok(())
        }
    }

    /// Image of `x ∈ X_from` in `X_to`, for `to ≤ from`.
    pub fn project(&self, from: usize, to: usize, mut x: usize) -> usize {
        assert!(to <= from, "cannot project upward");
        for m in (to + 1..=from).rev() {
            x = self.parents[m][x];
        }
        x
    }

    /// Projection `X_from -> X_to` as an index table.
    pub fn projection_map(&self, from: usize, to: usize) -> Vec<usize> {
        (0..self.level_size(from))
            .map(|x| self.project(from, to, x))
            .collect()
    }

    /// Elements of the level-`depth` group acting trivially on `X_h`.
    pub fn kernel_elements(&self, depth: usize, h: usize) -> Vec<Perm> {
        let proj = self.projection_map(depth, h.min(depth));
        self.groups[depth]
            .iter()
            .filter(|g| (0..proj.len()).all(|x| proj[g.apply(x)] == proj[x]))
            .cloned()
            .collect()
    }

    /// A generating set for the level-`h` kernel subgroup at level `depth`.
    pub fn kernel_generators(&self, depth: usize, h: usize) -> Vec<Perm> {
        generating_subset(&self.kernel_elements(depth, h), self.level_size(depth))
    }

    /// The chain `K_0 ⊃ K_1 ⊃ ... ⊃ K_depth` acting on `B^{X_depth}`.
    pub fn function_chain(&self, base: usize, depth: usize) -> GSetChain {
        let size = FunctionIndex::new(base, self.level_size(depth)).size();
        let levels = (0..=depth)
            .map(|h| {
                self.kernel_generators(depth, h)
                    .iter()
                    .map(|g| g.induced_on_functions(base))
                    .collect()
            })
            .collect();
        GSetChain { size, levels }
    }

    /// Parse the tower description format:
    ///
    /// ```text
    /// level 0: a
    /// level 1: b0 b1
    /// b0 -> a
    /// b1 -> a
    /// gen 0: ()
    /// gen 1: (b0 b1)
    /// shift 1: (b0 b1)
    /// ```
    ///
    /// Element names are unique across levels. Shift lines are optional but
    /// must then be given for every level.
    pub fn parse(text: &str) -> Result<Self, TowerError> {
        let mut levels: Vec<Option<(usize, Vec<String>)>> = Vec::new();
        let mut where_is: HashMap<String, (usize, usize)> = HashMap::new();
        let mut edges: Vec<(usize, String, String)> = Vec::new();
        let mut gen_lines: Vec<(usize, usize, String)> = Vec::new();
        let mut shift_lines: Vec<(usize, usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| TowerError::Parse { line: ln, msg };
            if let Some((head, rest)) = line.split_once(':') {
                let mut words = head.split_whitespace();
                let kind = words.next().unwrap_or("");
                let m: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| perr(format!("expected `{kind} <level>:`")))?;
                if words.next().is_some() {
                    return Err(perr("unexpected text before `:`".into()));
                }
                match kind {
                    "level" => {
                        if levels.len() <= m {
                            levels.resize(m + 1, None);
                        }
                        if levels[m].is_some() {
                            return Err(perr(format!("level {m} declared twice")));
                        }
                        let names: Vec<String> =
                            rest.split_whitespace().map(str::to_string).collect();
                        for (k, n) in names.iter().enumerate() {
                            if where_is.insert(n.clone(), (m, k)).is_some() {
                                return Err(perr(format!("element {n:?} declared twice")));
                            }
                        }
                        levels[m] = Some((ln, names));
                    }
                    "gen" => gen_lines.push((ln, m, rest.trim().to_string())),
                    "shift" => shift_lines.push((ln, m, rest.trim().to_string())),
                    other => return Err(perr(format!("unknown directive {other:?}"))),
                }
            } else if let Some((child, parent)) = line.split_once("->") {
                edges.push((ln, child.trim().to_string(), parent.trim().to_string()));
            } else {
                return Err(perr(format!("cannot parse {line:?}")));
            }
        }
        let mut sets = Vec::new();
        for (m, l) in levels.iter().enumerate() {
            let (ln, names) = l.as_ref().ok_or(TowerError::Parse {
                line: 0,
                msg: format!("level {m} missing"),
            })?;
            sets.push(LabeledSet::new(names.clone()).map_err(|e| TowerError::Parse {
                line: *ln,
                msg: e.to_string(),
            })?);
        }
        if sets.is_empty() {
            return Err(TowerError::Parse {
                line: 0,
                msg: "no levels declared".into(),
            });
        }
        let mut parents: Vec<Vec<Option<usize>>> =
            sets.iter().map(|s| vec![None; s.len()]).collect();
        for (ln, child, parent) in edges {
            let perr = |msg: String| TowerError::Parse { line: ln, msg };
            let &(cm, ci) = where_is
                .get(&child)
                .ok_or_else(|| perr(format!("unknown element {child:?}")))?;
            let &(pm, pi) = where_is
                .get(&parent)
                .ok_or_else(|| perr(format!("unknown element {parent:?}")))?;
            if cm == 0 || pm + 1 != cm {
                return Err(perr(format!("{parent:?} is not one level below {child:?}")));
            }
            if parents[cm][ci].replace(pi).is_some() {
                return Err(perr(format!("{child:?} has two parents")));
            }
        }
        let parents: Vec<Vec<usize>> = parents
            .into_iter()
            .enumerate()
            .map(|(m, ps)| {
                if m == 0 {
                    return Ok(Vec::new());
                }
                ps.into_iter()
                    .enumerate()
                    .map(|(i, p)| {
                        p.ok_or_else(|| TowerError::Parse {
                            line: 0,
                            msg: format!("{:?} has no parent", sets[m].label(i)),
                        })
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        let mut gens: Vec<Vec<Perm>> = vec![Vec::new(); sets.len()];
        for (ln, m, cyc) in gen_lines {
            let set = sets.get(m).ok_or(TowerError::Parse {
                line: ln,
                msg: format!("level {m} not declared"),
            })?;
            gens[m].push(parse_cycles(ln, &cyc, set)?);
        }
        let shift = if shift_lines.is_empty() {
            None
        } else {
            let mut s: Vec<Option<Perm>> = vec![None; sets.len()];
            for (ln, m, cyc) in shift_lines {
                let set = sets.get(m).ok_or(TowerError::Parse {
                    line: ln,
                    msg: format!("level {m} not declared"),
                })?;
                s[m] = Some(parse_cycles(ln, &cyc, set)?);
            }
            Some(
                s.into_iter()
                    .enumerate()
                    .map(|(m, p)| {
                        p.ok_or_else(|| TowerError::Parse {
                            line: 0,
                            msg: format!("shift missing at level {m}"),
                        })
                    })
                    .collect::<Result<_, _>>()?,
            )
        };
        Self::new("file", sets, parents, gens, shift)
    }
}

fn parse_cycles(line: usize, text: &str, set: &LabeledSet) -> Result<Perm, TowerError> {
    let perr = |msg: String| TowerError::Parse { line, msg };
    let mut images: Vec<usize> = (0..set.len()).collect();
    let mut moved = vec![false; set.len()];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| perr(format!("expected `(` in {text:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| perr(format!("unclosed cycle in {text:?}")))?;
        let elems: Vec<usize> = body[..close]
            .split_whitespace()
            .map(|n| {
                set.position(n)
                    .ok_or_else(|| perr(format!("{n:?} is not on this level")))
            })
            .collect::<Result<_, _>>()?;
        for (k, &e) in elems.iter().enumerate() {
            if std::mem::replace(&mut moved[e], true) {
                return Err(perr(format!("{:?} appears twice", set.label(e))));
            }
            images[e] = elems[(k + 1) % elems.len()];
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(Perm::from_images(images).expect("disjoint cycles form a permutation"))
}

/// A continuous function `X -> B` factoring through level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFunction {
    pub tower: Arc<DyadicTower>,
    pub level: usize,
    pub target: LabeledSet,
    /// `table[x]` indexes into `target` for each `x ∈ X_m`.
    pub table: Vec<usize>,
}

impl PartialEq for DyadicTower {
    fn eq(&self, other: &Self) -> bool {
        self.levels == other.levels
            && self.parents == other.parents
            && self.gens == other.gens
            && self.shift == other.shift
    }
}

impl Eq for DyadicTower {}

impl LevelFunction {
    pub fn new(
        tower: Arc<DyadicTower>,
        level: usize,
        target: LabeledSet,
        table: Vec<usize>,
    ) -> Result<Self, TowerError> {
        tower.check_level(level)?;
        if table.len() != tower.level_size(level) {
            return Err(TowerError::TableSize {
                expected: tower.level_size(level),
                found: table.len(),
            });
        }
        if table.iter().any(|&b| b >= target.len()) {
            return Err(TowerError::Malformed {
                level,
                msg: "value outside the target set".into(),
            });
        }
        Ok(Self {
            tower,
            level,
            target,
            table,
        })
    }

    /// Precompose with the projection from level `m ≥ level`.
    pub fn pullback(&self, m: usize) -> Result<LevelFunction, TowerError> {
        self.tower.check_level(m)?;
        assert!(m >= self.level, "pullback goes up the tower");
        let table = (0..self.tower.level_size(m))
            .map(|x| self.table[self.tower.project(m, self.level, x)])
            .collect();
        Ok(LevelFunction {
            tower: self.tower.clone(),
            level: m,
            target: self.target.clone(),
            table,
        })
    }

    /// The letters of the function in level order, joined.
    pub fn word(&self) -> String {
        let single = self.target.labels().iter().all(|l| l.chars().count() == 1);
        let letters: Vec<&str> = self.table.iter().map(|&b| self.target.label(b)).collect();
        if single {
            letters.concat()
        } else {
            letters.join(",")
        }
    }
}

/// Smallest `h` such that `f` is constant on orbits of the level-`h` kernel.
pub fn invariance_level(f: &LevelFunction) -> usize {
    let t = &f.tower;
    (0..=f.level)
        .find(|&h| {
            t.kernel_generators(f.level, h)
                .iter()
                .all(|g| (0..f.table.len()).all(|x| f.table[g.apply(x)] == f.table[x]))
        })
        .unwrap_or(f.level)
}

/// A finite set with a decreasing chain of permutation groups, each given by
/// generators. `levels[m]` generates the group whose fixed points `cc_sum`
/// sums over at level `m`.
#[derive(Clone, Debug)]
pub struct GSetChain {
    pub size: usize,
    pub levels: Vec<Vec<Perm>>,
}

impl GSetChain {
    pub fn max_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn fixed_points(&self, level: usize) -> Vec<usize> {
        let gens = &self.levels[level];
        (0..self.size)
            .filter(|&i| gens.iter().all(|g| g.apply(i) == i))
            .collect()
    }

    /// First pair `(a, g·a)` on which `phi` differs, if any.
    pub fn invariance_witness(&self, phi: &BitVec, level: usize) -> Option<(usize, usize)> {
        self.levels[level].iter().find_map(|g| {
            (0..self.size)
                .find(|&a| phi.get(a) != phi.get(g.apply(a)))
                .map(|a| (a, g.apply(a)))
        })
    }

    /// Least level at which `phi` is invariant.
    pub fn invariance_level(&self, phi: &BitVec) -> usize {
        (0..self.levels.len())
            .find(|&m| self.invariance_witness(phi, m).is_none())
            .unwrap_or(self.max_level())
    }
}

fn fixed_sum(chain: &GSetChain, phi: &BitVec, level: usize) -> bool {
    chain
        .fixed_points(level)
        .into_iter()
        .fold(false, |acc, i| acc ^ phi.get(i))
}

/// The sum of an invariant table over the fixed points of the level-`m`
/// group. When level `m+1` exists the sum is recomputed there and must agree.
pub fn cc_sum(chain: &GSetChain, phi: &BitVec, level: usize) -> Result<bool, TowerError> {
    if phi.len() != chain.size {
        return Err(TowerError::TableSize {
            expected: chain.size,
            found: phi.len(),
        });
    }
    if level > chain.max_level() {
        return Err(TowerError::LevelOutOfRange {
            level,
            max: chain.max_level(),
        });
    }
    if let Some((a, b)) = chain.invariance_witness(phi, level) {
        return Err(TowerError::InvarianceViolation { a, b });
    }
    let value = fixed_sum(chain, phi, level);
    if level < chain.max_level() && fixed_sum(chain, phi, level + 1) != value {
        return Err(TowerError::LevelDependence {
            level,
            next: level + 1,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(labels: &[&str]) -> LabeledSet {
        LabeledSet::new(labels.iter().copied()).unwrap()
    }

    #[test]
    fn dyadic_shapes() {
        let t = DyadicTower::dyadic_solenoid(3).unwrap();
        assert_eq!(t.level_size(0), 1);
        assert_eq!(t.level_size(3), 8);
        assert!(t.shift(3).unwrap().pow(8).is_identity());
        for m in 0..=3 {
            assert_eq!(t.group(m).len(), 1 << m);
        }
        let t0 = DyadicTower::dyadic_solenoid(0).unwrap();
        assert_eq!(t0.max_level(), 0);
        assert!(t0.group(0)[0].is_identity());
    }

    #[test]
    fn invariance_levels_of_words() {
        let t = Arc::new(DyadicTower::dyadic_solenoid(3).unwrap());
        let b = letters(&["u", "v", "w"]);
        let constant = LevelFunction::new(t.clone(), 3, b.clone(), vec![0; 8]).unwrap();
        assert_eq!(invariance_level(&constant), 0);
        let vw = LevelFunction::new(t.clone(), 1, b.clone(), vec![1, 2]).unwrap();
        assert_eq!(invariance_level(&vw), 1);
        assert_eq!(invariance_level(&vw.pullback(3).unwrap()), 1);
        let vwuu = LevelFunction::new(t.clone(), 2, b, vec![1, 2, 0, 0]).unwrap();
        assert_eq!(invariance_level(&vwuu), 2);
        assert_eq!(vwuu.pullback(3).unwrap().word(), "vwuuvwuu");
    }

    #[test]
    fn union_tower_validates() {
        let t = DyadicTower::dyadic_union(2, 3).unwrap();
        assert_eq!(t.level_size(3), 16);
        assert_eq!(t.shift(3).unwrap().cycles().len(), 2);
        assert_eq!(DyadicTower::dyadic_union(3, 2).unwrap().level_size(0), 3);
    }

    #[test]
    fn validation_rejects_bad_towers() {
        let l0 = letters(&["a"]);
        let l1 = letters(&["b", "c", "d"]);
        let err = DyadicTower::new(
            "bad",
            vec![l0.clone(), l1.clone()],
            vec![vec![], vec![0, 0, 0]],
            vec![vec![Perm::identity(1)], vec![Perm::identity(3)]],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, TowerError::FiberSize { size: 3, .. }));

        // A 3-cycle on a level with 4 points has order 3.
        let l1 = letters(&["b", "c", "d", "e"]);
        let err = DyadicTower::new(
            "bad",
            vec![l0, l1],
            vec![vec![], vec![0, 0, 0, 0]],
            vec![
                vec![Perm::identity(1)],
                vec![Perm::from_images(vec![1, 2, 0, 3]).unwrap()],
            ],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, TowerError::GroupOrder { order: 3, .. }));
    }

    #[test]
    fn projection_compatibility_is_checked() {
        let l0 = letters(&["a"]);
        let l1 = letters(&["b", "c"]);
        let l2 = letters(&["d", "e", "f", "g"]);
        // d,e over b; f,g over c; the generator swaps d and f only.
        let err = DyadicTower::new(
            "bad",
            vec![l0, l1, l2],
            vec![vec![], vec![0, 0], vec![0, 0, 1, 1]],
            vec![
                vec![Perm::identity(1)],
                vec![Perm::identity(2)],
                vec![Perm::from_images(vec![2, 1, 0, 3]).unwrap()],
            ],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, TowerError::ProjectionMismatch { level: 2, .. }));
    }

    #[test]
    fn parse_matches_builtin() {
        let text = "\
# a two-level dyadic tower
level 0: p
level 1: a0 a1
level 2: b0 b1 b2 b3
a0 -> p
a1 -> p
b0 -> a0
b2 -> a0
b1 -> a1
b3 -> a1
gen 0: ()
gen 1: (a0 a1)
gen 2: (b0 b1 b2 b3)
shift 0: ()
shift 1: (a0 a1)
shift 2: (b0 b1 b2 b3)
";
        let t = DyadicTower::parse(text).unwrap();
        let d = DyadicTower::dyadic_solenoid(2).unwrap();
        assert_eq!(t.projection_map(2, 1), d.projection_map(2, 1));
        assert_eq!(t.generators(2), d.generators(2));
        assert_eq!(t.shift(2), d.shift(2));
        let bad = "level 0: p\nlevel 1: a0 a1\na0 -> p\na1 -> q\n";
        match DyadicTower::parse(bad) {
            Err(TowerError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cc_sum_examples() {
        // Z/2 acting on three points: 0 fixed, 1 <-> 2.
        let swap = Perm::from_images(vec![0, 2, 1]).unwrap();
        let chain = GSetChain {
            size: 3,
            levels: vec![vec![swap], vec![]],
        };
        let single_fixed = BitVec::from_bools([true, false, false]);
        assert!(cc_sum(&chain, &single_fixed, 0).unwrap());
        let free_orbit = BitVec::from_bools([false, true, true]);
        assert!(!cc_sum(&chain, &free_orbit, 0).unwrap());
        let bad = BitVec::from_bools([false, true, false]);
        assert_eq!(
            cc_sum(&chain, &bad, 0),
            Err(TowerError::InvarianceViolation { a: 1, b: 2 })
        );
    }

    #[test]
    fn function_chain_fixed_points_factor_through_levels() {
        let t = DyadicTower::dyadic_solenoid(2).unwrap();
        let chain = t.function_chain(2, 2);
        assert_eq!(chain.size, 16);
        assert_eq!(chain.fixed_points(0).len(), 2);
        assert_eq!(chain.fixed_points(1).len(), 4);
        assert_eq!(chain.fixed_points(2).len(), 16);
    }
}
