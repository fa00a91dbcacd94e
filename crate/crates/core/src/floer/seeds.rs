//! The two Dehn-twist bimodules in strands grading 0.

use super::algebra::Elem::{self, *};
use super::algebra::Output;
use super::bimodule::{DABimodule, Generator, Term};

fn build(gens: &[(&str, Elem, Elem)], arrows: &[(&str, &str, &[Elem], Option<Elem>)]) -> DABimodule {
    let generators: Vec<Generator> = gens
        .iter()
        .map(|&(name, left, right)| Generator {
            name: name.to_string(),
            left,
            right,
        })
        .collect();
    let find = |n: &str| {
        generators
            .iter()
            .position(|g| g.name == n)
            .expect("arrow endpoints are declared")
    };
    let terms = arrows
        .iter()
        .map(|&(x, y, inputs, output)| Term {
            x: find(x),
            inputs: inputs.to_vec(),
            output: output.map_or(Output::One, Output::Basis),
            y: find(y),
        })
        .collect();
    DABimodule::new(generators, terms).expect("seed data is well formed")
}

/// The inverse twist bimodule, generators `p`, `q`, `r`.
pub fn cfda_tb_inv() -> DABimodule {
    build(
        &[("p", Iota0, Iota0), ("q", Iota1, Iota1), ("r", Iota1, Iota0)],
        &[
            ("r", "q", &[R3], Some(R23)),
            ("p", "q", &[R1], Some(R1)),
            ("p", "q", &[R123], Some(R123)),
            ("p", "r", &[], Some(R3)),
            ("p", "r", &[R12], Some(R1)),
            ("p", "p", &[R123, R2], Some(R12)),
            ("q", "p", &[R23, R2], Some(R2)),
            ("q", "q", &[R23], Some(R23)),
            ("r", "p", &[R3, R2], Some(R2)),
            ("q", "r", &[R2], None),
        ],
    )
}

/// The twist bimodule, generators `f`, `g`, `h`.
pub fn cfda_ta() -> DABimodule {
    build(
        &[("f", Iota0, Iota0), ("g", Iota1, Iota1), ("h", Iota0, Iota1)],
        &[
            ("h", "f", &[R2], None),
            ("g", "h", &[R2, R1], Some(R2)),
            ("g", "g", &[R2, R123], Some(R23)),
            ("g", "f", &[R2, R12], Some(R2)),
            ("f", "h", &[R1], Some(R12)),
            ("f", "g", &[R3], Some(R3)),
            ("f", "g", &[R123], Some(R123)),
            ("f", "f", &[R12], Some(R12)),
            ("h", "g", &[], Some(R1)),
            ("h", "g", &[R23], Some(R3)),
        ],
    )
}
