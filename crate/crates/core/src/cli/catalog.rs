/// A builtin problem file. Names are stable identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

macro_rules! fixture {
    ($name:literal, $summary:literal) => {
        Fixture {
            name: $name,
            summary: $summary,
            text: include_str!(concat!("../../fixtures/", $name, ".toml")),
        }
    };
}

static CATALOG: &[Fixture] = &[
    fixture!("so3_adjoint", "so(3) over a point: algebroid axioms, adjoint representation, total algebroid"),
    fixture!("heisenberg_adjoint", "Heisenberg adjoint representation and its centre as a subrepresentation"),
    fixture!(
        "tangent_double_flat",
        "flat double representation on the plane, gauge transformation and gauge morphism"
    ),
    fixture!(
        "tangent_double_curved",
        "curved double representation: lemmas, identity, gauge and perturbed morphisms"
    ),
    fixture!(
        "action_algebroid_r1",
        "rank-1 action algebroid on the line with adjoint and coadjoint representations"
    ),
    fixture!("im2form_symplectic_r2", "IM-2-forms on TR^2: symplectic, zero and a symmetric counterexample"),
    fixture!("bialgebroid_trivial", "trivial Lie bialgebroid on the line"),
    fixture!(
        "ideal_system_point",
        "ideal systems over a point: Heisenberg centre versus a non-ideal line in so(3)"
    ),
    fixture!("spencer_roundtrip", "Spencer operator round trip and a linear foliation on the plane"),
    fixture!("dual_poisson_so3", "linear Poisson dual of the so(3) adjoint VB-algebroid"),
    fixture!("theorem_main_random", "seeded random morphism and Jacobi-oracle comparisons"),
];

pub fn catalog() -> &'static [Fixture] {
    CATALOG
}

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    CATALOG.iter().find(|f| f.name == name)
}
