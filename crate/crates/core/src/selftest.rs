//! Seeded property suite: random action groupoids and representations,
//! random Hilbert-space tensor identities, and the mutation fixtures.
//!
//! All randomness is drawn up front from one ChaCha stream, and cases run in
//! parallel but are collected in generation order, so the JSON output depends
//! only on the seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bimodule::{associator, interior_tensor, HilbertBimodule};
use crate::corep::GroupoidRep;
use crate::error::{Error, Result};
use crate::fixtures::{builtin_group, mutants, Irreps};
use crate::groupoid::{FiniteGroupoid, GroupTable, HaarSystem};
use crate::kernel::{c, CMatrix};
use crate::report::{Check, Residual, VerificationReport};
use crate::verify::{verify_groupoid, verify_representation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestCase {
    pub name: String,
    pub kind: String,
    /// Whether the instance is expected to satisfy every check.
    pub expect_pass: bool,
    /// Whether the outcome matched the expectation.
    pub pass: bool,
    pub max_residual: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub tolerance: f64,
    pub cases: Vec<SelftestCase>,
    pub pass: bool,
}

enum Plan {
    Action { group: String, groupoid: FiniteGroupoid, weights: Vec<f64>, rep: GroupoidRep },
    Tensor { dims: (usize, usize, usize), grams: [CMatrix; 3] },
    Mutant(usize),
}

const RANDOM_ACTIONS: usize = 4;
const RANDOM_TENSORS: usize = 4;

/// Case names a fault can be injected into for this seed.
pub fn case_names() -> Vec<String> {
    let mut out: Vec<String> = (0..RANDOM_ACTIONS).map(|i| format!("random_action_{i}")).collect();
    out.extend((0..RANDOM_TENSORS).map(|i| format!("random_tensor_{i}")));
    out.extend(mutants().iter().map(|m| format!("mutant_{}", m.name)));
    out
}

/// Runs the suite. `inject_fault` names a case whose instance is corrupted
/// before checking; the report then shows which property catches it.
pub fn run(seed: u64, tol: f64, inject_fault: Option<&str>) -> Result<SelftestReport> {
    let names = case_names();
    if let Some(f) = inject_fault {
        if !names.iter().any(|n| n == f) {
            return Err(Error::BadParams(format!("unknown selftest case '{f}'")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plans = Vec::new();
    for _ in 0..RANDOM_ACTIONS {
        plans.push(random_action(&mut rng)?);
    }
    for _ in 0..RANDOM_TENSORS {
        let dims = (rng.random_range(1..=5), rng.random_range(1..=5), rng.random_range(1..=3));
        let grams = [random_pd(dims.0, &mut rng), random_pd(dims.1, &mut rng), random_pd(dims.2, &mut rng)];
        plans.push(Plan::Tensor { dims, grams });
    }
    plans.extend((0..mutants().len()).map(Plan::Mutant));

    let cases: Vec<SelftestCase> = plans
        .into_par_iter()
        .zip(names.into_par_iter())
        .map(|(plan, name)| {
            let fault = inject_fault == Some(name.as_str());
            run_case(name, plan, tol, fault)
        })
        .collect();
    let pass = cases.iter().all(|c| c.pass);
    Ok(SelftestReport { seed, tolerance: tol, cases, pass })
}

fn random_action(rng: &mut ChaCha8Rng) -> Result<Plan> {
    let choices = ["z2", "z3", "z4", "z5", "z6", "s3"];
    let group = choices[rng.random_range(0..choices.len())].to_string();
    let (table, irreps) = builtin_group(&group)?;
    let n = table.order();

    let mut cosets: Vec<Vec<BTreeSet<usize>>> = Vec::new();
    let mut points = 0;
    for _ in 0..rng.random_range(1..=2usize) {
        let gens: Vec<usize> = (0..rng.random_range(1..=2usize)).map(|_| rng.random_range(0..n)).collect();
        let h = subgroup(&table, &gens);
        let space = coset_space(&table, &h);
        if points + space.len() > 6 && !cosets.is_empty() {
            break;
        }
        points += space.len();
        cosets.push(space);
    }
    let action: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            let mut perm = Vec::with_capacity(points);
            let mut offset = 0;
            for space in &cosets {
                for coset in space {
                    let moved: BTreeSet<usize> = coset.iter().map(|&x| table.mul(g, x)).collect();
                    perm.push(offset + space.iter().position(|c| *c == moved).expect("cosets are permuted"));
                }
                offset += space.len();
            }
            perm
        })
        .collect();
    let groupoid = FiniteGroupoid::action(&table, &action)?;

    let orbits = groupoid.orbits();
    let mut orbit_weight = std::collections::BTreeMap::new();
    for &o in &orbits {
        orbit_weight.entry(o).or_insert_with(|| rng.random_range(0.5..2.0));
    }
    let weights = orbits.iter().map(|o| orbit_weight[o]).collect();

    let k = rng.random_range(0..irreps.len());
    let rep = pulled_back(&groupoid, points, &irreps, k)?;
    Ok(Plan::Action { group, groupoid, weights, rep })
}

/// `U(g, p) = ρ_k(g)` on the action groupoid, whose arrow `(g, p)` has index
/// `g·points + p`.
fn pulled_back(g: &FiniteGroupoid, points: usize, irreps: &Irreps, k: usize) -> Result<GroupoidRep> {
    let d = irreps[k][0].nrows();
    GroupoidRep::from_fn(g, vec![d; points], |x| irreps[k][x / points].clone())
}

fn subgroup(table: &GroupTable, gens: &[usize]) -> BTreeSet<usize> {
    let mut h: BTreeSet<usize> = BTreeSet::from([table.unit()]);
    loop {
        let next: BTreeSet<usize> = h.iter().flat_map(|&a| gens.iter().map(move |&g| table.mul(a, g))).collect();
        let before = h.len();
        h.extend(next);
        if h.len() == before {
            return h;
        }
    }
}

fn coset_space(table: &GroupTable, h: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut out: Vec<BTreeSet<usize>> = Vec::new();
    for x in 0..table.order() {
        let coset: BTreeSet<usize> = h.iter().map(|&y| table.mul(x, y)).collect();
        if !out.contains(&coset) {
            out.push(coset);
        }
    }
    out
}

fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let x = CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    x.adjoint() * &x + CMatrix::identity(n, n) * c(0.5, 0.0)
}

fn summarize(r: &VerificationReport) -> String {
    match r.failing().next() {
        Some(c) => format!("{} fails: {}", c.name, c.witness.clone().unwrap_or_default()),
        None => format!("{} checks pass", r.checks.len()),
    }
}

fn run_case(name: String, plan: Plan, tol: f64, fault: bool) -> SelftestCase {
    match plan {
        Plan::Action { group, mut groupoid, weights, rep } => {
            if fault {
                let (x, y) = groupoid.composable_pairs()[1];
                groupoid.set_composition(x, y, Some(x));
            }
            let haar = HaarSystem::unchecked(weights);
            let mut r = verify_groupoid(&groupoid, &haar, tol);
            if r.pass() {
                r.absorb("rep", verify_representation(&rep, &haar, tol));
            }
            SelftestCase {
                name,
                kind: format!("random action of {group} on {} points", groupoid.n_objects()),
                expect_pass: true,
                pass: r.pass(),
                max_residual: r.max_residual(),
                detail: summarize(&r),
            }
        }
        Plan::Tensor { dims, mut grams } => {
            if fault {
                grams[0][(0, 0)] = -grams[0][(0, 0)] - c(1.0, 0.0);
            }
            let r = tensor_identities(dims, &grams, tol);
            SelftestCase {
                name,
                kind: format!("Hilbert space tensor {}x{}x{}", dims.0, dims.1, dims.2),
                expect_pass: true,
                pass: r.pass(),
                max_residual: r.max_residual(),
                detail: summarize(&r),
            }
        }
        Plan::Mutant(i) => {
            let m = &mutants()[i];
            let r = m.report(tol);
            let caught = r.failing().any(|c| c.max_residual > 1e-2 && c.witness.is_some());
            SelftestCase {
                name,
                kind: m.description.to_string(),
                expect_pass: false,
                pass: if fault { false } else { caught },
                max_residual: r.max_residual(),
                detail: if fault { "fault injected: expectation inverted".into() } else { summarize(&r) },
            }
        }
    }
}

/// Interior tensor over `ℂ` against the Kronecker product, and the associator.
fn tensor_identities(dims: (usize, usize, usize), grams: &[CMatrix; 3], tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new(format!("tensor {dims:?}"), tol);
    let modules: Result<Vec<HilbertBimodule>> = grams.iter().map(HilbertBimodule::hilbert_space).collect();
    let modules = match modules {
        Ok(m) => m,
        Err(e) => {
            r.push(Check::failed("modules", e.to_string()));
            return r;
        }
    };
    match interior_tensor(&modules[0], &modules[1], tol) {
        Ok(t) => {
            r.push(Check::verdict(
                "dimension",
                t.dim() == dims.0 * dims.1,
                if t.dim() == dims.0 * dims.1 { 0.0 } else { 1.0 },
                1.0,
                Some(format!("{} vs {}", t.dim(), dims.0 * dims.1)),
            ));
            let rebuilt = t.embed.mul(&t.module.gram()[0]).mul(&t.project).to_dense();
            let expected = grams[0].kronecker(&grams[1]);
            let mut res = Residual::new();
            let (abs, scale) = crate::kernel::dense_residual(&rebuilt, &expected);
            res.observe(abs, scale, || "full Gram matrix".into());
            r.push(Check::from_residual("gram", res, tol));
        }
        Err(e) => r.push(Check::failed("tensor", e.to_string())),
    }
    match associator(&modules[0], &modules[1], &modules[2], tol) {
        Ok(a) => r.absorb("associator", a.report),
        Err(e) => r.push(Check::failed("associator", e.to_string())),
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_report() {
        let a = run(3, 1e-9, None).unwrap();
        let b = run(3, 1e-9, None).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.pass, "{:#?}", a.cases.iter().filter(|c| !c.pass).collect::<Vec<_>>());
    }

    #[test]
    fn injected_fault_is_named() {
        let r = run(1, 1e-9, Some("random_action_0")).unwrap();
        assert!(!r.pass);
        let bad: Vec<_> = r.cases.iter().filter(|c| !c.pass).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].name, "random_action_0");
        assert!(bad[0].detail.contains("groupoid."), "{}", bad[0].detail);
    }

    #[test]
    fn unknown_fault_is_rejected() {
        assert!(run(1, 1e-9, Some("nope")).is_err());
    }
}
