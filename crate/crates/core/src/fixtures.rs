//! Built-in instances: groupoids, group-algebra bundles, representations and
//! deliberately broken variants used by the mutation suite.

use std::f64::consts::PI;

use crate::algebra::{CStarAlgebra, LinearMap, MapKind};
use crate::corep::{check_corep_axioms, corep_from_rep, GroupoidRep};
use crate::dual::GroupoidDual;
use crate::error::{Error, Result};
use crate::groupoid::{s3_permutations, FiniteGroupoid, GroupTable, HaarMode, HaarSystem};
use crate::io::Instance;
use crate::kernel::{c, one, zero, CMatrix, CVector};
use crate::quantum::{Legs, QuantumGroupoidData};
use crate::report::VerificationReport;

/// Unitary irreducible representations of a group, one matrix per element.
pub type Irreps = Vec<Vec<CMatrix>>;

/// Characters `g ↦ ω^{kg}` of `ℤ/n`.
pub fn cyclic_irreps(n: usize) -> Irreps {
    (0..n)
        .map(|k| {
            (0..n)
                .map(|g| {
                    let theta = 2.0 * PI * ((k * g) % n) as f64 / n as f64;
                    CMatrix::from_element(1, 1, c(theta.cos(), theta.sin()))
                })
                .collect()
        })
        .collect()
}

/// Trivial, sign and the two-dimensional standard representation of `S₃`,
/// in the element order of [`GroupTable::s3`].
pub fn s3_irreps() -> Irreps {
    let perms = s3_permutations();
    let sign = |p: &[usize; 3]| {
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let r2 = 2f64.sqrt();
    let r6 = 6f64.sqrt();
    let v = CMatrix::from_row_slice(
        3,
        2,
        &[c(1.0 / r2, 0.0), c(1.0 / r6, 0.0), c(-1.0 / r2, 0.0), c(1.0 / r6, 0.0), zero(), c(-2.0 / r6, 0.0)],
    );
    let standard = perms
        .iter()
        .map(|p| {
            let mut m = CMatrix::zeros(3, 3);
            for i in 0..3 {
                m[(p[i], i)] = one();
            }
            v.adjoint() * m * &v
        })
        .collect();
    vec![
        perms.iter().map(|_| CMatrix::identity(1, 1)).collect(),
        perms.iter().map(|p| CMatrix::from_element(1, 1, c(sign(p), 0.0))).collect(),
        standard,
    ]
}

/// Table and irreps for `zN` or `s3`.
pub fn builtin_group(name: &str) -> Result<(GroupTable, Irreps)> {
    let table = GroupTable::builtin(name)?;
    let irreps =
        if table.order() == 6 && name.eq_ignore_ascii_case("s3") { s3_irreps() } else { cyclic_irreps(table.order()) };
    Ok((table, irreps))
}

/// Group algebra `ℂ[G] ≅ ⊕_ρ M_{d_ρ}` in its matrix-unit basis with the Haar
/// state, grouplike coproduct `Δ(g) = g ⊗ g` and `S(g) = g⁻¹`.
pub fn group_algebra_bundle(table: &GroupTable, irreps: &Irreps, label: &str) -> Result<QuantumGroupoidData> {
    let n = table.order();
    let blocks: Vec<usize> = irreps.iter().map(|r| r[0].nrows()).collect();
    if irreps.iter().any(|r| r.len() != n) || blocks.iter().map(|d| d * d).sum::<usize>() != n {
        return Err(Error::BadParams("irreps do not decompose the regular representation".into()));
    }
    let a = CStarAlgebra::new(blocks, label)?;
    let b = CStarAlgebra::complex();

    // Column g holds the coordinates of g.
    let mut f = CMatrix::zeros(n, n);
    for g in 0..n {
        for (k, rho) in irreps.iter().enumerate() {
            let d = rho[g].nrows();
            for i in 0..d {
                for j in 0..d {
                    f[(a.basis_index(k, i, j), g)] = rho[g][(i, j)];
                }
            }
        }
    }
    let f_inv =
        f.clone().try_inverse().ok_or_else(|| Error::BadParams("irreps are not linearly independent".into()))?;
    let coords = |g: usize| f.column(g).into_owned();

    let unit = CMatrix::from_column_slice(n, 1, coords(table.unit()).as_slice());
    let haar = CMatrix::from_row_slice(1, n, f_inv.row(table.unit()).transpose().as_slice());
    let mut perm_inv = CMatrix::zeros(n, n);
    for g in 0..n {
        perm_inv[(table.inv(g), g)] = one();
    }
    let s = &f * perm_inv * &f_inv;
    let legs: Vec<Legs> = (0..n)
        .map(|alpha| {
            (0..n)
                .filter(|&g| f_inv[(g, alpha)] != zero())
                .map(|g| (coords(g) * f_inv[(g, alpha)], coords(g)))
                .collect()
        })
        .collect();

    let eta_s = LinearMap::new(b.clone(), a.clone(), unit.clone(), MapKind::Hom)?;
    let eta_t = LinearMap::new(b.clone(), a.clone(), unit, MapKind::Antihom)?;
    let p = LinearMap::new(a.clone(), b.clone(), haar, MapKind::Plain)?;
    let s = LinearMap::new(a.clone(), a.clone(), s, MapKind::Antihom)?;
    QuantumGroupoidData::new(a, b, eta_s, eta_t, p, s, legs)
}

pub fn z2_bundle() -> QuantumGroupoidData {
    group_algebra_bundle(&GroupTable::cyclic(2).expect("z2"), &cyclic_irreps(2), "C[Z2]").expect("z2 bundle")
}

pub fn s3_bundle() -> QuantumGroupoidData {
    group_algebra_bundle(&GroupTable::s3(), &s3_irreps(), "C[S3]").expect("s3 bundle")
}

/// `ℤ/2` acting on two points by the swap.
pub fn z2_swap_action() -> FiniteGroupoid {
    FiniteGroupoid::action(&GroupTable::cyclic(2).expect("z2"), &[vec![0, 1], vec![1, 0]]).expect("swap action")
}

/// The groupoid fixtures of the acceptance suite.
pub fn builtin_groupoids() -> Vec<(String, FiniteGroupoid)> {
    let mut out = vec![("trivial".to_string(), FiniteGroupoid::trivial())];
    for n in 1..=6 {
        out.push((format!("pair{n}"), FiniteGroupoid::pair(n).expect("pair")));
    }
    for n in 1..=8 {
        out.push((format!("z{n}"), FiniteGroupoid::group(&GroupTable::cyclic(n).expect("cyclic"))));
    }
    out.push(("s3".into(), FiniteGroupoid::group(&GroupTable::s3())));
    out.push(("z2-swap".into(), z2_swap_action()));
    let union = FiniteGroupoid::disjoint_union(
        &FiniteGroupoid::pair(2).expect("pair"),
        &FiniteGroupoid::group(&GroupTable::cyclic(2).expect("z2")),
    );
    out.push(("pair2+z2".into(), union));
    out
}

/// Conjugates a representation by the unitaries `V_q = exp(i θ_q H)` on each
/// fiber: `U'(x) = V_{t(x)} U(x) V_{s(x)}^*`. Equivalent to the input.
pub fn gauge(rep: &GroupoidRep, phase: f64) -> GroupoidRep {
    let v: Vec<CMatrix> = rep
        .fiber_dims
        .iter()
        .enumerate()
        .map(|(q, &n)| {
            let h = CMatrix::from_fn(n, n, |i, j| c(((i + 1) * (j + 2) + q) as f64, (i as f64) - (j as f64)));
            let h = (&h + h.adjoint()) * c(0.5, 0.0);
            let eig = h.symmetric_eigen();
            let d = CVector::from_iterator(
                n,
                eig.eigenvalues.iter().map(|l| {
                    let t = phase * l * (q as f64 + 1.0);
                    c(t.cos(), t.sin())
                }),
            );
            &eig.eigenvectors * CMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
        })
        .collect();
    let g = &rep.groupoid;
    let u = rep.u.iter().enumerate().map(|(x, m)| &v[g.tgt(x)] * m * v[g.src(x)].adjoint()).collect();
    GroupoidRep { groupoid: g.clone(), fiber_dims: rep.fiber_dims.clone(), u }
}

/// Representations used for each groupoid fixture: the trivial one, plus
/// irreps for groups, the sign representation pulled back to the swap action,
/// and a gauge-twisted two-dimensional bundle on pair groupoids.
pub fn builtin_reps(name: &str, g: &FiniteGroupoid) -> Vec<(String, GroupoidRep)> {
    let mut out = vec![("trivial".to_string(), GroupoidRep::trivial(g))];
    let group_reps = |irreps: Irreps| -> Vec<(String, GroupoidRep)> {
        irreps
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(k, rho)| {
                let d = rho[0].nrows();
                (format!("irrep{k}"), GroupoidRep::new(g.clone(), vec![d], rho).expect("irrep shapes"))
            })
            .collect()
    };
    if name == "s3" {
        out.extend(group_reps(s3_irreps()));
    } else if g.is_group() {
        out.extend(group_reps(cyclic_irreps(g.n_arrows())));
    } else if name == "z2-swap" {
        let sign = GroupoidRep::from_fn(g, vec![1, 1], |x| {
            CMatrix::from_element(1, 1, c(if x < 2 { 1.0 } else { -1.0 }, 0.0))
        })
        .expect("sign");
        out.push(("sign".into(), sign));
    } else if name.starts_with("pair") {
        let two = GroupoidRep::from_fn(g, vec![2; g.n_objects()], |_| CMatrix::identity(2, 2)).expect("flat bundle");
        out.push(("twisted".into(), gauge(&two, 0.37)));
    }
    out
}

pub fn normalized(g: &FiniteGroupoid) -> HaarSystem {
    HaarSystem::new(g, HaarMode::Normalized)
}

/// How a mutant is checked: through an instance file, or directly for
/// objects that have no file form.
pub enum MutantKind {
    Instance(fn() -> Instance),
    Direct(fn(f64) -> VerificationReport),
}

/// A deliberately broken instance.
pub struct Mutant {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: MutantKind,
}

impl Mutant {
    pub fn report(&self, tol: f64) -> VerificationReport {
        match &self.kind {
            MutantKind::Instance(build) => build().verify(tol),
            MutantKind::Direct(run) => run(tol),
        }
    }

    pub fn instance(&self) -> Option<Instance> {
        match &self.kind {
            MutantKind::Instance(build) => Some(build()),
            MutantKind::Direct(_) => None,
        }
    }
}

pub fn mutant(name: &str) -> Option<Mutant> {
    mutants().into_iter().find(|m| m.name == name)
}

pub fn mutants() -> Vec<Mutant> {
    use MutantKind::{Direct, Instance as File};
    vec![
        Mutant {
            name: "pair3-corrupted",
            description: "one composition entry of pair(3) redirected",
            kind: File(|| {
                let g = pair3_corrupted();
                Instance::Groupoid { haar: normalized(&g), groupoid: g }
            }),
        },
        Mutant {
            name: "z3-corrupted",
            description: "one entry of the ℤ/3 table swapped",
            kind: File(|| {
                let mut g = FiniteGroupoid::group(&GroupTable::cyclic(3).expect("z3"));
                g.set_composition(1, 1, Some(1));
                Instance::Groupoid { haar: normalized(&g), groupoid: g }
            }),
        },
        Mutant {
            name: "pair2-dropped-leg",
            description: "a leg removed from Δ on the dual of pair(2)",
            kind: File(|| {
                let g = FiniteGroupoid::pair(2).expect("pair");
                let mut d = GroupoidDual::build(&g, &normalized(&g)).expect("dual");
                d.data.legs[0].pop();
                Instance::Bundle(d.data)
            }),
        },
        Mutant {
            name: "z2-bundle-dropped-leg",
            description: "a leg removed from Δ on ℂ[ℤ/2]",
            kind: File(|| {
                let mut q = z2_bundle();
                q.legs[1].pop();
                Instance::Bundle(q)
            }),
        },
        Mutant {
            name: "s3-identity-antipode",
            description: "S replaced by the identity on ℂ[S₃]",
            kind: File(|| {
                let mut q = s3_bundle();
                q.s = LinearMap::identity(&q.a).with_kind(MapKind::Antihom);
                Instance::Bundle(q)
            }),
        },
        Mutant {
            name: "pair2-noninvariant-haar",
            description: "Haar weights (1, 0.5) on pair(2)",
            kind: File(|| {
                let g = FiniteGroupoid::pair(2).expect("pair");
                Instance::Groupoid { groupoid: g, haar: HaarSystem::unchecked(vec![1.0, 0.5]) }
            }),
        },
        Mutant {
            name: "s3-right-trivial-coproduct",
            description: "Δ(g) = g ⊗ e on ℂ[S₃]",
            kind: File(|| {
                let mut q = s3_bundle();
                let unit = q.eta_s.matrix.column(0).into_owned();
                for legs in &mut q.legs {
                    for leg in legs.iter_mut() {
                        leg.1 = unit.clone();
                    }
                }
                Instance::Bundle(q)
            }),
        },
        Mutant {
            name: "pair2-scaled-coaction",
            description: "trivial coaction on pair(2) multiplied by 2",
            kind: Direct(|tol| {
                let g = FiniteGroupoid::pair(2).expect("pair");
                let d = GroupoidDual::build(&g, &normalized(&g)).expect("dual");
                let mut co = corep_from_rep(&GroupoidRep::trivial(&g), &d).expect("corep");
                co.delta = co.delta.scale(c(2.0, 0.0));
                check_corep_axioms(&co, &d.data, Some(&d.counit), tol)
            }),
        },
        Mutant {
            name: "z3-nonfunctorial-rep",
            description: "U(1) = -1 on ℤ/3",
            kind: File(|| {
                let g = FiniteGroupoid::group(&GroupTable::cyclic(3).expect("z3"));
                let rep = GroupoidRep::from_fn(&g, vec![1], |x| {
                    CMatrix::from_element(1, 1, if x == 1 { c(-1.0, 0.0) } else { one() })
                })
                .expect("rep");
                Instance::Representation { haar: normalized(&g), rep }
            }),
        },
        Mutant {
            name: "z2-bundle-degenerate-haar",
            description: "P concentrated on one character of ℂ[ℤ/2]",
            kind: File(|| {
                let mut q = z2_bundle();
                q.p.matrix = CMatrix::from_row_slice(1, 2, &[one(), zero()]);
                Instance::Bundle(q)
            }),
        },
    ]
}

/// `pair(3)` with `(0,1)(1,2)` sent to `(0,1)` instead of `(0,2)`.
pub fn pair3_corrupted() -> FiniteGroupoid {
    let mut g = FiniteGroupoid::pair(3).expect("pair");
    g.set_composition(1, 5, Some(1));
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DEFAULT_TOL;
    use crate::quantum::{build_fiber_tensor, generated_algebra, validate_data};

    #[test]
    fn s3_irreps_are_unitary_homomorphisms() {
        let t = GroupTable::s3();
        for rho in s3_irreps() {
            for g in 0..6 {
                let d = rho[g].nrows();
                assert!((rho[g].adjoint() * &rho[g] - CMatrix::identity(d, d)).norm() < 1e-12);
                for h in 0..6 {
                    assert!((&rho[g] * &rho[h] - &rho[t.mul(g, h)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn z2_bundle_reads_in_the_character_basis() {
        let q = z2_bundle();
        assert_eq!(q.a.block_sizes(), &[1, 1]);
        assert!((q.p.matrix[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!(validate_data(&q, DEFAULT_TOL).pass());
    }

    #[test]
    fn s3_bundle_has_36_dimensional_fiber() {
        let q = s3_bundle();
        assert_eq!(q.a.block_sizes(), &[1, 1, 2]);
        let f = build_fiber_tensor(&q, DEFAULT_TOL).unwrap();
        assert_eq!(f.dim(), 36);
        assert_eq!(generated_algebra(&f, DEFAULT_TOL).unwrap().dim, 36);
    }

    #[test]
    fn reps_on_fixtures_are_valid() {
        for (name, g) in builtin_groupoids() {
            assert!(g.validate().pass(), "{name}");
            for (rname, r) in builtin_reps(&name, &g) {
                assert!(r.validate(1e-10).pass(), "{name}/{rname}");
            }
        }
    }

    #[test]
    fn corrupted_pair3_fails_composition() {
        let g = pair3_corrupted();
        let r = g.validate();
        assert!(!r.pass());
    }
}
