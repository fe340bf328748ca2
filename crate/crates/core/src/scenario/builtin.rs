use super::{Scenario, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    /// The statements the scenario exercises, in plain words.
    pub anchors: &'static [&'static str],
    pub config: &'static str,
}

impl Builtin {
    pub fn scenario(&self) -> Scenario {
        Scenario::from_json_str(self.config).expect("built-in configs are valid")
    }
}

const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "hasse-axioms",
        summary: "Hasse derivation on F_5(t): axioms (R1)-(R3) and the constant-field filtration",
        anchors: &[
            "iterative derivation: δ^(0) = id, δ^(n)(ab) = Σ_{i+j=n} δ^(i)(a) δ^(j)(b), δ^(n) ∘ δ^(m) = C(m+n, n) δ^(m+n)",
            "Hasse derivative: δ^(n)(t^m) = C(m, n) t^(m-n)",
            "constant-field filtration: f is killed by δ^(j) for 0 < j < p^m exactly when f ∈ F_q(t^(p^m))",
        ],
        config: include_str!("../../scenarios/hasse-axioms.json"),
    },
    Builtin {
        name: "kummer-extend",
        summary: "unique extension of the Hasse derivation to K = F_5(s), s^2 = t",
        anchors: &[
            "an iterative derivation extends uniquely along a finite separable extension",
            "restriction of the extension to F recovers δ_F; δ^(1)(s) = s / (e t) = 3/s for p = 5, e = 2",
        ],
        config: include_str!("../../scenarios/kummer-extend.json"),
    },
    Builtin {
        name: "filtration-extend",
        summary: "derivation on the quaternion algebra built from a chain of forms, compared with the crossed-product formula",
        anchors: &[
            "definition of the iterative derivation on B through forms B_i over F_i = F^(p^i): δ^(j)(Σ a_k b_k) = Σ δ^(j)(a_k) b_k for p^(i-1) ≤ j < p^i",
            "the result coincides with the crossed-product derivation on the same algebra",
        ],
        config: include_str!("../../scenarios/filtration-extend.json"),
    },
    Builtin {
        name: "crossed-product-quaternion",
        summary: "crossed-product derivation on (F_5(s)/F_5(t), u^2 = 2) and its product identities",
        anchors: &[
            "crossed-product remark: a cocycle with values in F^δ gives δ^(n)(Σ k_σ u_σ) = Σ δ_K^(n)(k_σ) u_σ",
            "the two displayed product identities for δ^(n)(s^a u^b · s^c u^d) and δ^(i)(s^a u^b) δ^(j)(s^c u^d)",
        ],
        config: include_str!("../../scenarios/crossed-product-quaternion.json"),
    },
    Builtin {
        name: "split-check",
        summary: "δ-constants of the quaternion model over K and the multiplication map μ_K",
        anchors: &[
            "split δ-algebra: (A ⊗ K)^δ ⊗ K -> A ⊗ K is an isomorphism",
            "the constants form a central simple F^δ-algebra of the same dimension",
        ],
        config: include_str!("../../scenarios/split-check.json"),
    },
    Builtin {
        name: "nonexample-nilpotent",
        summary: "F_2(t)[y]/(y^2 - t^2): z = y - t is a nonzero nilpotent",
        anchors: &[
            "non-example remark: with f = x^(p^i), the element y - x satisfies (y - x)^(p^i) = 0, so the algebra is not a field",
        ],
        config: include_str!("../../scenarios/nonexample-nilpotent.json"),
    },
    Builtin {
        name: "classify-matrix",
        summary: "M_2(F_5(t)) with the entrywise derivation and trivial Galois group",
        anchors: &[
            "lemma: complete reducibility, irreducibility and indecomposability of a subgroup of PGL_n match the invariant-subspace lattice",
            "theorem: δ-right ideals correspond to stable right ideals of the constants; trivial group gives a δ-completely reducible, decomposable algebra",
        ],
        config: include_str!("../../scenarios/classify-matrix.json"),
    },
    Builtin {
        name: "classify-division",
        summary: "quaternion division model split by K = F_5(s): δ-irreducible",
        anchors: &[
            "theorem: δ-right ideals correspond to stable right ideals of the constants",
            "a δ-irreducible algebra has reductive Galois image, contained in no proper parabolic subgroup",
        ],
        config: include_str!("../../scenarios/classify-division.json"),
    },
    Builtin {
        name: "char0-divided-powers",
        summary: "divided powers of d/dt on Q(t)",
        anchors: &["in characteristic zero, δ^(n) = D^n / n! for the derivation D = δ^(1)"],
        config: include_str!("../../scenarios/char0-divided-powers.json"),
    },
];

pub fn builtins() -> &'static [Builtin] {
    BUILTINS
}

pub fn builtin(name: &str) -> Result<&'static Builtin, ScenarioError> {
    BUILTINS.iter().find(|b| b.name == name).ok_or_else(|| ScenarioError::UnknownScenario(name.to_string()))
}

pub fn explain(name: &str) -> Result<String, ScenarioError> {
    let b = builtin(name)?;
    let mut out = format!("{}: {}\n", b.name, b.summary);
    for a in b.anchors {
        out.push_str(&format!("  - {a}\n"));
    }
    let s = b.scenario();
    out.push_str(&format!("  operations: {}\n", s.operations.iter().map(|o| o.name()).collect::<Vec<_>>().join(", ")));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry() {
        assert_eq!(builtins().len(), 9);
        for b in builtins() {
            assert_eq!(b.scenario().name, b.name);
            assert!(explain(b.name).unwrap().starts_with(b.name));
        }
        assert_eq!(explain("bogus"), Err(ScenarioError::UnknownScenario("bogus".into())));
        assert!(explain("crossed-product-quaternion").unwrap().contains("cocycle with values in F^δ"));
    }
}
