//! Term profiles: what the certificate needs from a term, without its input
//! word. Large box products are profiled by streaming.

use std::collections::{HashMap, HashSet};

use super::algebra::{Elem, Output};
use super::bimodule::{DABimodule, Generator, Term};
use super::boxtensor::{for_each_box_chain, for_each_box_term};
use super::FloerError;

/// Bit `i` is set when `Elem::ALL[i]` occurs among the inputs.
pub type LetterSet = u16;

pub fn letter_bit(e: Elem) -> LetterSet {
    1 << Elem::ALL.iter().position(|&a| a == e).expect("basis element")
}

pub fn letters_of(inputs: &[Elem]) -> LetterSet {
    inputs.iter().fold(0, |acc, &a| acc | letter_bit(a))
}

pub fn letter_elems(set: LetterSet) -> Vec<Elem> {
    Elem::ALL
        .into_iter()
        .filter(|&e| set & letter_bit(e) != 0)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermProfile {
    pub x: u32,
    pub y: u32,
    pub output: Output,
    pub letters: LetterSet,
    pub len: u32,
}

impl TermProfile {
    pub fn of(t: &Term) -> Self {
        Self {
            x: t.x as u32,
            y: t.y as u32,
            output: t.output,
            letters: letters_of(&t.inputs),
            len: t.inputs.len() as u32,
        }
    }

    pub fn has_input(&self, e: Elem) -> bool {
        self.letters & letter_bit(e) != 0
    }
}

/// Generators and surviving term profiles of a bimodule.
#[derive(Clone, Debug)]
pub struct BimoduleProfile {
    pub generators: Vec<Generator>,
    pub terms: Vec<TermProfile>,
    /// Terms before mod-2 reduction.
    pub raw_terms: u64,
    /// Total length of the surviving input words.
    pub input_letters: u64,
}

impl BimoduleProfile {
    pub fn of(p: &DABimodule) -> Self {
        let terms: Vec<TermProfile> = p.terms().iter().map(TermProfile::of).collect();
        Self {
            generators: p.generators().to_vec(),
            raw_terms: terms.len() as u64,
            input_letters: terms.iter().map(|t| u64::from(t.len)).sum(),
            terms,
        }
    }

    pub fn hochschild_generators(&self) -> usize {
        self.generators.iter().filter(|g| g.left == g.right).count()
    }

    pub fn describe(&self, t: &TermProfile) -> String {
        let letters: Vec<String> = letter_elems(t.letters).iter().map(ToString::to_string).collect();
        format!(
            "{} → {}: {} ⊗ ({} inputs drawn from {{{}}})",
            self.generators[t.x as usize].name,
            self.generators[t.y as usize].name,
            t.output,
            t.len,
            letters.join(",")
        )
    }
}

const MOD: u64 = (1 << 61) - 1;
const BASES: [u64; 2] = [0x1f3d_5b79_a2c4_e681 % MOD, 0x0dea_dbee_f123_4567 % MOD];

fn mulmod(a: u64, b: u64) -> u64 {
    let p = u128::from(a) * u128::from(b);
    let r = ((p & u128::from(MOD)) + (p >> 61)) as u64;
    if r >= MOD {
        r - MOD
    } else {
        r
    }
}

fn addmod(a: u64, b: u64) -> u64 {
    let r = a + b;
    if r >= MOD {
        r - MOD
    } else {
        r
    }
}

/// Polynomial hash of a word under both bases, with `base^len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct WordHash {
    h: [u64; 2],
    pow: [u64; 2],
}

impl WordHash {
    const EMPTY: WordHash = WordHash {
        h: [0, 0],
        pow: [1, 1],
    };

    fn of(word: &[Elem]) -> Self {
        word.iter().fold(Self::EMPTY, |acc, &a| {
            let code = 1 + letter_bit(a).trailing_zeros() as u64;
            let one = WordHash {
                h: [code, code],
                pow: BASES,
            };
            acc.concat(&one)
        })
    }

    fn concat(&self, other: &WordHash) -> WordHash {
        let mut out = *self;
        for i in 0..2 {
            out.h[i] = addmod(mulmod(self.h[i], other.pow[i]), other.h[i]);
            out.pow[i] = mulmod(self.pow[i], other.pow[i]);
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    profile: TermProfile,
    h: [u64; 2],
}

/// Profile of `M ⊠ N` computed without storing input words.
///
/// Terms are keyed by a double polynomial fingerprint of their input word.
/// Keys seen more than once are resolved by a second pass that compares the
/// actual words, so the mod-2 reduction is exact.
pub fn box_profile(m: &DABimodule, n: &DABimodule) -> Result<BimoduleProfile, FloerError> {
    let n_info: Vec<(WordHash, LetterSet, u32)> = n
        .terms()
        .iter()
        .map(|t| (WordHash::of(&t.inputs), letters_of(&t.inputs), t.inputs.len() as u32))
        .collect();
    let mut keys: Vec<(Key, u64)> = Vec::new();
    let generators = for_each_box_chain(m, n, |src, path, output, dst| {
        let mut h = WordHash::EMPTY;
        let mut letters = 0;
        let mut len = 0;
        for &t in path {
            let (wh, l, k) = n_info[t];
            h = h.concat(&wh);
            letters |= l;
            len += k;
        }
        let ordinal = keys.len() as u64;
        keys.push((
            Key {
                profile: TermProfile {
                    x: src as u32,
                    y: dst as u32,
                    output,
                    letters,
                    len,
                },
                h: h.h,
            },
            ordinal,
        ));
    })?;
    let raw_terms = keys.len() as u64;
    keys.sort_unstable();
    let mut survivors: Vec<TermProfile> = Vec::new();
    let mut contested: HashSet<u64> = HashSet::new();
    let mut groups: Vec<Vec<u64>> = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        let mut j = i + 1;
        while j < keys.len() && keys[j].0 == keys[i].0 {
            j += 1;
        }
        if j - i == 1 {
            survivors.push(keys[i].0.profile);
        } else {
            let group: Vec<u64> = keys[i..j].iter().map(|k| k.1).collect();
            contested.extend(group.iter().copied());
            groups.push(group);
        }
        i = j;
    }
    drop(keys);
    if !groups.is_empty() {
        let mut words: HashMap<u64, Term> = HashMap::new();
        let mut ordinal = 0u64;
        for_each_box_term(m, n, |src, inputs, output, dst| {
            if contested.contains(&ordinal) {
                words.insert(
                    ordinal,
                    Term {
                        x: src,
                        inputs: inputs.to_vec(),
                        output,
                        y: dst,
                    },
                );
            }
            ordinal += 1;
        })?;
        for group in groups {
            let mut parity: HashMap<&Term, bool> = HashMap::new();
            for o in &group {
                *parity.entry(&words[o]).or_insert(false) ^= true;
            }
            survivors.extend(parity.into_iter().filter(|&(_, odd)| odd).map(|(t, _)| TermProfile::of(t)));
        }
    }
    survivors.sort_unstable();
    Ok(BimoduleProfile {
        generators,
        input_letters: survivors.iter().map(|t| u64::from(t.len)).sum(),
        terms: survivors,
        raw_terms,
    })
}

/// The profile of the `n`-fold power of `p`, `n` a power of 2. All but the
/// last doubling are built explicitly.
pub fn power_profile(p: &DABimodule, n: usize) -> Result<BimoduleProfile, FloerError> {
    if n == 0 || !n.is_power_of_two() {
        return Err(FloerError::BadPower(n));
    }
    if n == 1 {
        return Ok(BimoduleProfile::of(p));
    }
    let half = super::boxtensor::box_power(p, n / 2)?;
    box_profile(&half, &half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floer::boxtensor::box_tensor;
    use crate::floer::hochschild::seed_product;

    #[test]
    fn hash_concat_matches_direct() {
        use Elem::*;
        let a = [R1, R2, R3];
        let b = [R23, R123];
        let ab = [R1, R2, R3, R23, R123];
        assert_eq!(WordHash::of(&a).concat(&WordHash::of(&b)), WordHash::of(&ab));
        assert_ne!(WordHash::of(&a), WordHash::of(&[R3, R2, R1]));
    }

    #[test]
    fn streamed_profile_matches_explicit() {
        let p = seed_product();
        let q = box_tensor(&p, &p).unwrap();
        let mut explicit: Vec<TermProfile> = q.terms().iter().map(TermProfile::of).collect();
        explicit.sort_unstable();
        let streamed = box_profile(&p, &p).unwrap();
        assert_eq!(streamed.terms, explicit);
        assert_eq!(streamed.raw_terms, 105);
        assert_eq!(streamed.generators, q.generators());
    }
}
