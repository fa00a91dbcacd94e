//! The torus algebra with its strands grading.

use std::fmt;
use std::str::FromStr;

/// A basis element of the torus algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    IotaEmpty,
    Iota0,
    Iota1,
    IotaFull,
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
}

use Elem::*;

impl Elem {
    pub const ALL: [Elem; 10] = [IotaEmpty, Iota0, Iota1, IotaFull, R1, R2, R3, R12, R23, R123];

    /// The eight basis elements of strands grading 0.
    pub const GRADING_ZERO: [Elem; 8] = [Iota0, Iota1, R1, R2, R3, R12, R23, R123];

    /// The six non-idempotent basis elements.
    pub const RHOS: [Elem; 6] = [R1, R2, R3, R12, R23, R123];

    /// Canonical ASCII name, used in files.
    pub fn name(self) -> &'static str {
        match self {
            IotaEmpty => "iota_empty",
            Iota0 => "iota0",
            Iota1 => "iota1",
            IotaFull => "iota01",
            R1 => "rho1",
            R2 => "rho2",
            R3 => "rho3",
            R12 => "rho12",
            R23 => "rho23",
            R123 => "rho123",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            IotaEmpty => "ι∅",
            Iota0 => "ι0",
            Iota1 => "ι1",
            IotaFull => "ι01",
            R1 => "ρ1",
            R2 => "ρ2",
            R3 => "ρ3",
            R12 => "ρ12",
            R23 => "ρ23",
            R123 => "ρ123",
        }
    }

    pub fn is_idempotent(self) -> bool {
        matches!(self, IotaEmpty | Iota0 | Iota1 | IotaFull)
    }

    pub fn strands_grading(self) -> i8 {
        match self {
            IotaEmpty => -1,
            IotaFull => 1,
            _ => 0,
        }
    }

    /// `(left, right)` idempotents with `a = left · a · right`.
    pub fn idempotents(self) -> (Elem, Elem) {
        match self {
            R1 | R3 | R123 => (Iota0, Iota1),
            R2 => (Iota1, Iota0),
            R12 => (Iota0, Iota0),
            R23 => (Iota1, Iota1),
            e => (e, e),
        }
    }

    pub fn left(self) -> Elem {
        self.idempotents().0
    }

    pub fn right(self) -> Elem {
        self.idempotents().1
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Elem {
    type Err = String;

    /// Accepts the ASCII names and the Greek symbols.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Elem::ALL
            .into_iter()
            .find(|e| e.name() == s || e.symbol() == s)
            .ok_or_else(|| format!("unknown algebra element {s:?}"))
    }
}

/// The output of a structure-map term: a basis element or the unit `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    One,
    Basis(Elem),
}

impl Output {
    pub fn name(self) -> &'static str {
        match self {
            Output::One => "1",
            Output::Basis(e) => e.name(),
        }
    }

    /// True for `1` and the idempotents: the labels the augmentation keeps.
    pub fn is_unit_like(self) -> bool {
        match self {
            Output::One => true,
            Output::Basis(e) => e.is_idempotent(),
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::One => f.write_str("1"),
            Output::Basis(e) => e.fmt(f),
        }
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "1" {
            Ok(Output::One)
        } else {
            s.parse().map(Output::Basis)
        }
    }
}

impl From<Elem> for Output {
    fn from(e: Elem) -> Self {
        Output::Basis(e)
    }
}

/// The torus algebra: basis, idempotents, products and gradings.
#[derive(Clone, Debug)]
pub struct TorusAlgebra {
    pub basis: Vec<Elem>,
}

impl TorusAlgebra {
    /// Product of two basis elements, `None` for zero.
    pub fn mult(&self, a: Elem, b: Elem) -> Option<Elem> {
        mult(a, b)
    }

    pub fn idempotent_pair(&self, a: Elem) -> (Elem, Elem) {
        a.idempotents()
    }

    pub fn strands_grading(&self, a: Elem) -> i8 {
        a.strands_grading()
    }

    /// The differential, which vanishes on every basis element.
    pub fn differential(&self, _a: Elem) -> Vec<Elem> {
        Vec::new()
    }
}

/// Product of two basis elements, `None` for zero.
pub fn mult(a: Elem, b: Elem) -> Option<Elem> {
    if a.right() != b.left() {
        return None;
    }
    match (a, b) {
        (e, b) if e.is_idempotent() => Some(b),
        (a, e) if e.is_idempotent() => Some(a),
        (R1, R2) => Some(R12),
        (R2, R3) => Some(R23),
        (R1, R23) => Some(R123),
        (R12, R3) => Some(R123),
        _ => None,
    }
}

/// The torus algebra, with its invariants checked.
pub fn torus_algebra() -> TorusAlgebra {
    let alg = TorusAlgebra {
        basis: Elem::ALL.to_vec(),
    };
    for a in Elem::ALL {
        let (l, r) = a.idempotents();
        assert_eq!(mult(l, a), Some(a), "left idempotent of {a}");
        assert_eq!(mult(a, r), Some(a), "right idempotent of {a}");
        for b in Elem::ALL {
            for c in Elem::ALL {
                let ab_c = mult(a, b).and_then(|ab| mult(ab, c));
                let a_bc = mult(b, c).and_then(|bc| mult(a, bc));
                assert_eq!(ab_c, a_bc, "associativity on ({a}, {b}, {c})");
            }
            if let Some(p) = mult(a, b) {
                assert_eq!(
                    p.strands_grading(),
                    a.strands_grading(),
                    "grading of {a}·{b}"
                );
            }
        }
        assert!(alg.differential(a).is_empty());
    }
    alg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        let a = torus_algebra();
        assert_eq!(a.mult(R1, R2), Some(R12));
        assert_eq!(a.mult(R2, R1), None);
        assert_eq!(a.mult(Iota0, R1), Some(R1));
        assert_eq!(a.mult(Iota1, R1), None);
        assert_eq!(a.mult(R2, R3), Some(R23));
        assert_eq!(a.mult(R1, R23), Some(R123));
        assert_eq!(a.mult(R12, R3), Some(R123));
        assert_eq!(a.mult(R3, R2), None);
        assert_eq!(a.mult(Iota0, Iota1), None);
    }

    #[test]
    fn exactly_four_rho_products() {
        let nonzero: Vec<(Elem, Elem)> = Elem::RHOS
            .iter()
            .flat_map(|&a| Elem::RHOS.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| mult(a, b).is_some())
            .collect();
        assert_eq!(nonzero, vec![(R1, R2), (R1, R23), (R2, R3), (R12, R3)]);
    }

    #[test]
    fn names_round_trip() {
        for e in Elem::ALL {
            assert_eq!(e.name().parse::<Elem>().unwrap(), e);
            assert_eq!(e.symbol().parse::<Elem>().unwrap(), e);
        }
        assert_eq!("1".parse::<Output>().unwrap(), Output::One);
        assert!("rho4".parse::<Elem>().is_err());
    }

    #[test]
    fn idempotent_display() {
        assert_eq!(R2.idempotents(), (Iota1, Iota0));
        assert_eq!(R12.idempotents(), (Iota0, Iota0));
        assert_eq!(R23.idempotents(), (Iota1, Iota1));
        assert_eq!(R123.idempotents(), (Iota0, Iota1));
    }
}
