//! The box tensor product of type-DA bimodules.

use std::collections::HashMap;

use super::algebra::{Elem, Output};
use super::bimodule::{DABimodule, Generator, Term};
use super::FloerError;

/// `M ⊠ N`. Generators are the pairs `(x, y)` with `right(x) = left(y)`,
/// named `x.y`. For every term of `M` out of `x` (and the unit
/// `δ_2(x ⊗ 1) = 1 ⊗ x`) with inputs `a_1..a_k`, each chain of `k` terms of
/// `N` from `y` whose `i`-th output is `a_i` contributes one term.
pub fn box_tensor(m: &DABimodule, n: &DABimodule) -> Result<DABimodule, FloerError> {
    let mut terms = Vec::new();
    let generators = for_each_box_term(m, n, |src, inputs, b, dst| {
        terms.push(Term {
            x: src,
            inputs: inputs.to_vec(),
            output: b,
            y: dst,
        })
    })?;
    DABimodule::new(generators, terms)
}

/// Input letters a materialized `M ⊠ N` may hold; about 2 bytes each.
pub const MATERIALIZE_CAP: u64 = 1 << 27;

/// [`box_tensor`], refusing products whose input words would hold more than
/// `cap` letters in total.
pub fn box_tensor_capped(m: &DABimodule, n: &DABimodule, cap: u64) -> Result<DABimodule, FloerError> {
    let lens: Vec<u64> = n.terms().iter().map(|t| t.inputs.len() as u64).collect();
    let mut letters = 0u64;
    for_each_box_chain(m, n, |_, chain, _, _| {
        letters += chain.iter().map(|&t| lens[t]).sum::<u64>();
    })?;
    if letters > cap {
        return Err(FloerError::TooLarge { letters, cap });
    }
    box_tensor(m, n)
}

/// [`box_power`] or, for other `n`, [`box_power_fold`], with every step
/// capped as in [`box_tensor_capped`].
pub fn box_power_capped(p: &DABimodule, n: usize, cap: u64) -> Result<DABimodule, FloerError> {
    if n == 0 {
        return Err(FloerError::BadPower(n));
    }
    let mut cur = p.clone();
    if n.is_power_of_two() {
        let mut k = 1;
        while k < n {
            cur = box_tensor_capped(&cur, &cur, cap)?;
            k *= 2;
        }
    } else {
        for _ in 1..n {
            cur = box_tensor_capped(&cur, p, cap)?;
        }
    }
    Ok(cur)
}

/// Stream the terms of `M ⊠ N` before mod-2 reduction, as
/// `(source, inputs, output, target)` indices into the returned generators.
pub fn for_each_box_term(
    m: &DABimodule,
    n: &DABimodule,
    mut emit: impl FnMut(usize, &[Elem], Output, usize),
) -> Result<Vec<Generator>, FloerError> {
    let mut inputs: Vec<Elem> = Vec::new();
    for_each_box_chain(m, n, |src, chain, b, dst| {
        inputs.clear();
        for &t in chain {
            inputs.extend_from_slice(&n.terms()[t].inputs);
        }
        emit(src, &inputs, b, dst);
    })
}

/// Stream the terms of `M ⊠ N` as the chain of `N` term indices each one
/// uses.
pub fn for_each_box_chain(
    m: &DABimodule,
    n: &DABimodule,
    mut emit: impl FnMut(usize, &[usize], Output, usize),
) -> Result<Vec<Generator>, FloerError> {
    check_ring(m, n)?;
    let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut generators = Vec::new();
    for (i, x) in m.generators().iter().enumerate() {
        for (j, y) in n.generators().iter().enumerate() {
            if x.right == y.left {
                pair_index.insert((i, j), generators.len());
                pairs.push((i, j));
                generators.push(Generator {
                    name: format!("{}.{}", x.name, y.name),
                    left: x.left,
                    right: y.right,
                });
            }
        }
    }
    let mut by_output: HashMap<(usize, Output), Vec<(usize, usize)>> = HashMap::new();
    for (k, t) in n.terms().iter().enumerate() {
        by_output.entry((t.x, t.output)).or_default().push((k, t.y));
    }
    let unit = [Output::One];
    let mut wanted: Vec<Output> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    for (src, &(xi, yi)) in pairs.iter().enumerate() {
        let m_terms = m
            .terms_from(xi)
            .map(|t| (Some(&t.inputs), t.output, t.y))
            .chain(std::iter::once((None, Output::One, xi)));
        for (inputs, b, x2) in m_terms {
            wanted.clear();
            match inputs {
                Some(a) => wanted.extend(a.iter().map(|&e| Output::Basis(e))),
                None => wanted.extend_from_slice(&unit),
            }
            collect_paths(&by_output, yi, &wanted, &mut chain, &mut |c, y_end| {
                emit(src, c, b, pair_index[&(x2, y_end)]);
            });
        }
    }
    Ok(generators)
}

fn collect_paths(
    by_output: &HashMap<(usize, Output), Vec<(usize, usize)>>,
    cur: usize,
    wanted: &[Output],
    chain: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize], usize),
) {
    let Some((&a, rest)) = wanted.split_first() else {
        emit(chain, cur);
        return;
    };
    let Some(steps) = by_output.get(&(cur, a)) else {
        return;
    };
    for &(k, y) in steps {
        chain.push(k);
        collect_paths(by_output, y, rest, chain, emit);
        chain.pop();
    }
}

fn check_ring(m: &DABimodule, n: &DABimodule) -> Result<(), FloerError> {
    let grading = |gs: &[Generator], right: bool| -> Vec<i8> {
        let mut v: Vec<i8> = gs
            .iter()
            .map(|g| if right { g.right } else { g.left }.strands_grading())
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let (mr, nl) = (grading(m.generators(), true), grading(n.generators(), false));
    if mr.len() > 1 || nl.len() > 1 || (!mr.is_empty() && !nl.is_empty() && mr != nl) {
        return Err(FloerError::RingMismatch {
            left: format!("{mr:?}"),
            right: format!("{nl:?}"),
        });
    }
    Ok(())
}

/// The `n`-fold box power for `n` a power of 2, built by doubling.
pub fn box_power(p: &DABimodule, n: usize) -> Result<DABimodule, FloerError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(FloerError::BadPower(n));
    }
    let mut cur = p.clone();
    let mut k = 1;
    while k < n {
        cur = box_tensor(&cur, &cur)?;
        k *= 2;
    }
    Ok(cur)
}

/// Left fold `((P ⊠ P) ⊠ P) ⊠ ...`, for any `n ≥ 1`.
pub fn box_power_fold(p: &DABimodule, n: usize) -> Result<DABimodule, FloerError> {
    if n == 0 {
        return Err(FloerError::BadPower(n));
    }
    let mut cur = p.clone();
    for _ in 1..n {
        cur = box_tensor(&cur, p)?;
    }
    Ok(cur)
}
