//! Hochschild generators, the differential-vanishing certificate, and the
//! dimension table of the box powers.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::algebra::{mult, Elem, Output};
use super::bimodule::DABimodule;
use super::boxtensor::{box_power, box_tensor};
use super::profile::{letter_bit, power_profile, BimoduleProfile, LetterSet, TermProfile};
use super::seeds::{cfda_ta, cfda_tb_inv};
use super::FloerError;
use crate::solenoidal::{staircase_dims, GraphBasis};
use crate::tower::DyadicTower;

/// Named checks of the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Property {
    /// Every term with output ρ2 has a ρ2 input.
    P1,
    /// Every basis product equal to ρ2 has a ρ2 operand.
    P2,
    /// Every term with output 1 or an idempotent has an input in C ∪ C'.
    P3,
    /// Basis products yielding idempotents have idempotent operands.
    P4,
    /// The reachable labels avoid C ∪ C'.
    Fixpoint,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::P1 => "P1 (ρ2 output needs ρ2 input)",
            Property::P2 => "P2 (ρ2 product needs ρ2 operand)",
            Property::P3 => "P3 (unit output needs ρ2 or unit input)",
            Property::P4 => "P4 (idempotent product needs idempotent operands)",
            Property::Fixpoint => "fixpoint avoids ρ2, ι0, ι1, 1",
        };
        f.write_str(s)
    }
}

/// Labels in `C ∪ C'`: ρ2, the idempotents, and 1.
pub fn is_forbidden(o: Output) -> bool {
    o.is_unit_like() || o == Output::Basis(Elem::R2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// Least set of labels closed under zero-input outputs, outputs of terms
    /// whose inputs are all in the set, and nonzero products.
    pub fixpoint: BTreeSet<Output>,
    /// Zero-input outputs closed under products only.
    pub seed: BTreeSet<Output>,
    pub checks: Vec<(Property, bool)>,
}

impl Certificate {
    pub fn fixpoint_names(&self) -> Vec<String> {
        self.fixpoint.iter().map(ToString::to_string).collect()
    }

    pub fn seed_names(&self) -> Vec<String> {
        self.seed.iter().map(ToString::to_string).collect()
    }
}

fn close_under_products(set: &mut BTreeSet<Output>) -> bool {
    let mut grew = false;
    loop {
        let basis: Vec<Elem> = set
            .iter()
            .filter_map(|o| match o {
                Output::Basis(e) => Some(*e),
                Output::One => None,
            })
            .collect();
        let mut added = false;
        for &a in &basis {
            for &b in &basis {
                if let Some(p) = mult(a, b) {
                    added |= set.insert(Output::Basis(p));
                }
            }
        }
        if !added {
            return grew;
        }
        grew = true;
    }
}

/// Worklist fixpoint of reachable labels.
pub fn label_fixpoint(terms: &[TermProfile]) -> BTreeSet<Output> {
    let shapes: BTreeSet<(LetterSet, Output)> = terms.iter().map(|t| (t.letters, t.output)).collect();
    let mut set = BTreeSet::new();
    loop {
        let have: LetterSet = set
            .iter()
            .filter_map(|o| match o {
                Output::Basis(e) => Some(letter_bit(*e)),
                Output::One => None,
            })
            .fold(0, |a, b| a | b);
        let mut added = false;
        for &(letters, output) in &shapes {
            if letters & !have == 0 {
                added |= set.insert(output);
            }
        }
        added |= close_under_products(&mut set);
        if !added {
            return set;
        }
    }
}

fn seed_labels(terms: &[TermProfile]) -> BTreeSet<Output> {
    let mut set: BTreeSet<Output> = terms.iter().filter(|t| t.len == 0).map(|t| t.output).collect();
    close_under_products(&mut set);
    set
}

/// Run checks P1–P4 and the fixpoint check on an explicit bimodule.
pub fn vanishing_certificate(p: &DABimodule) -> Result<Certificate, FloerError> {
    let profile = BimoduleProfile::of(p);
    certify(&profile.terms, |i| p.describe(&p.terms()[i]))
}

/// The certificate from term profiles alone.
pub fn profile_certificate(p: &BimoduleProfile) -> Result<Certificate, FloerError> {
    certify(&p.terms, |i| p.describe(&p.terms[i]))
}

/// The first failing check is returned with its offending term or product;
/// `describe` renders the term at an index.
pub fn certify(terms: &[TermProfile], describe: impl Fn(usize) -> String) -> Result<Certificate, FloerError> {
    let fail = |property: Property, witness: String| FloerError::Certificate { property, witness };
    let rho2 = Output::Basis(Elem::R2);
    let forbidden_inputs = Elem::ALL
        .into_iter()
        .filter(|&e| is_forbidden(Output::Basis(e)))
        .fold(0, |a, e| a | letter_bit(e));
    for (i, t) in terms.iter().enumerate() {
        if t.output == rho2 && !t.has_input(Elem::R2) {
            return Err(fail(Property::P1, describe(i)));
        }
    }
    for a in Elem::GRADING_ZERO {
        for b in Elem::GRADING_ZERO {
            if mult(a, b) == Some(Elem::R2) && a != Elem::R2 && b != Elem::R2 {
                return Err(fail(Property::P2, format!("{a}·{b} = ρ2")));
            }
        }
    }
    for (i, t) in terms.iter().enumerate() {
        if t.output.is_unit_like() && t.letters & forbidden_inputs == 0 {
            return Err(fail(Property::P3, describe(i)));
        }
    }
    for a in Elem::GRADING_ZERO {
        for b in Elem::GRADING_ZERO {
            if let Some(c) = mult(a, b) {
                if c.is_idempotent() && !(a.is_idempotent() && b.is_idempotent()) {
                    return Err(fail(Property::P4, format!("{a}·{b} = {c}")));
                }
            }
        }
    }
    let fixpoint = label_fixpoint(terms);
    if let Some(bad) = fixpoint.iter().find(|&&o| is_forbidden(o)) {
        return Err(fail(Property::Fixpoint, format!("{bad} is reachable")));
    }
    Ok(Certificate {
        fixpoint,
        seed: seed_labels(terms),
        checks: [
            Property::P1,
            Property::P2,
            Property::P3,
            Property::P4,
            Property::Fixpoint,
        ]
        .into_iter()
        .map(|q| (q, true))
        .collect(),
    })
}

/// `B ⊠ A` for the two seed bimodules.
pub fn seed_product() -> DABimodule {
    box_tensor(&cfda_tb_inv(), &cfda_ta()).expect("seed bimodules tensor")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HfkRow {
    pub level: usize,
    pub grading_minus: u128,
    pub grading_zero: u128,
    pub grading_plus: u128,
    pub total: u128,
    /// The same total computed by the closed-walk count on `fig8`.
    pub staircase: u128,
}

/// Per-level dimensions of the Hochschild homology of the `2^m`-fold box
/// power of `B ⊠ A`, with the grading ±1 parts contributing 1 each.
/// Every level requires a granted certificate and must match the staircase.
pub fn hfk_dimensions(max_m: usize) -> Result<Vec<HfkRow>, FloerError> {
    let tower = DyadicTower::dyadic_solenoid(max_m).map_err(|e| FloerError::Malformed(e.to_string()))?;
    let stairs = staircase_dims(&GraphBasis::fig8(), &tower, max_m)
        .map_err(|e| FloerError::Malformed(e.to_string()))?;
    let base = seed_product();
    let mut rows = Vec::new();
    for (m, &staircase) in stairs.iter().enumerate() {
        let profile = power_profile(&base, 1 << m)?;
        profile_certificate(&profile).map_err(|e| FloerError::CertificateRefused {
            level: m,
            reason: e.to_string(),
        })?;
        let zero = profile.hochschild_generators() as u128;
        let total = zero + 2;
        if total != staircase {
            return Err(FloerError::DimensionMismatch {
                level: m,
                floer: total,
                staircase,
            });
        }
        rows.push(HfkRow {
            level: m,
            grading_minus: 1,
            grading_zero: zero,
            grading_plus: 1,
            total,
            staircase,
        });
    }
    Ok(rows)
}

/// The `n`-fold power of `B ⊠ A`, `n` a power of 2.
pub fn seed_power(n: usize) -> Result<DABimodule, FloerError> {
    box_power(&seed_product(), n)
}
