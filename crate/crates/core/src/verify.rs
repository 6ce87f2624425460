//! Top-level verification of the three instance kinds.

use crate::corep::{check_corep_axioms, corep_from_rep, GroupoidRep};
use crate::dual::{check_counit, check_group_mode, check_iso_gamma2, GroupoidDual};
use crate::groupoid::{FiniteGroupoid, HaarSystem};
use crate::quantum::{verify_all, QuantumGroupoidData};
use crate::report::{Check, VerificationReport};

/// Groupoid axioms, Haar invariance, then the full suite on the dual.
/// The dual is skipped when the groupoid itself is invalid.
pub fn verify_groupoid(g: &FiniteGroupoid, haar: &HaarSystem, tol: f64) -> VerificationReport {
    let mut r =
        VerificationReport::new(format!("groupoid with {} objects, {} arrows", g.n_objects(), g.n_arrows()), tol);
    let axioms = g.validate();
    let valid = axioms.pass();
    r.absorb("groupoid", axioms);
    if !valid {
        r.note("dual not built: groupoid axioms fail");
        return r;
    }
    if haar.weights.len() != g.n_objects() {
        r.push(Check::failed("haar_system", format!("{} weights for {} objects", haar.weights.len(), g.n_objects())));
        return r;
    }
    r.push(haar.check_left_invariance(g, tol));

    let d = GroupoidDual::build_unchecked(g, haar);
    r.absorb("dual", verify_all(&d.data, tol));
    r.absorb("counit", check_counit(&d, tol));
    r.absorb("fiber_product", check_iso_gamma2(&d, tol));
    if g.is_group() {
        if let Ok(gm) = check_group_mode(&d, tol) {
            r.absorb("group_mode", gm);
        }
    }
    r
}

pub fn verify_bundle(q: &QuantumGroupoidData, tol: f64) -> VerificationReport {
    verify_all(q, tol)
}

/// Representation axioms and the induced corepresentation on the dual.
pub fn verify_representation(rep: &GroupoidRep, haar: &HaarSystem, tol: f64) -> VerificationReport {
    let g = &rep.groupoid;
    let mut r = VerificationReport::new(format!("representation of dimension {}", rep.dim()), tol);
    let axioms = g.validate();
    let valid = axioms.pass();
    r.absorb("groupoid", axioms);
    if !valid {
        return r;
    }
    r.absorb("representation", rep.validate(tol));
    let d = GroupoidDual::build_unchecked(g, haar);
    match corep_from_rep(rep, &d) {
        Ok(c) => r.absorb("corep", check_corep_axioms(&c, &d.data, Some(&d.counit), tol)),
        Err(e) => r.push(Check::failed("corep.structure", e.to_string())),
    }
    r
}
