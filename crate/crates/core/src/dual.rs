//! The dual quantum groupoid of a finite groupoid: `A = C(Γ₁)`, `B = C(Γ₀)`,
//! pullbacks `η_s = s*`, `η_t = t*`, `ε = ι*`, `S(δ_x) = δ_{x⁻¹}`, fiber
//! integration `P` and `Δ(δ_z) = Σ_{xy=z} δ_x ⊗ δ_y`. Also the checks that only
//! make sense for commutative instances: counit, `C(Γ₁) ⊗_{C(Γ₀)} C(Γ₁) ≅ C(Γ₂)`
//! and the Hopf identities of the one-object case.

use crate::algebra::{check_multiplicative, CStarAlgebra, LinearMap, MapKind};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, HaarSystem};
use crate::kernel::{self, c, one, CMatrix, CVector, SparseMatrix};
use crate::quantum::{build_fiber_tensor, generated_algebra, Legs, QuantumGroupoidData};
use crate::report::{Check, Residual, VerificationReport};

#[derive(Clone, Debug)]
pub struct GroupoidDual {
    pub groupoid: FiniteGroupoid,
    pub haar: HaarSystem,
    pub data: QuantumGroupoidData,
    pub counit: LinearMap,
    /// `Γ₂` in lexicographic order, with the product of each pair
    /// (`None` when the composition table has no entry).
    pub gamma2: Vec<((usize, usize), Option<usize>)>,
}

impl GroupoidDual {
    /// Validates the groupoid and the Haar system, then builds the dual.
    pub fn build(g: &FiniteGroupoid, haar: &HaarSystem) -> Result<Self> {
        let report = g.validate();
        if let Some(c) = report.failing().next() {
            return Err(Error::InvalidGroupoid(format!("{} fails: {}", c.name, c.witness.clone().unwrap_or_default())));
        }
        if haar.weights.len() != g.n_objects() {
            return Err(Error::BadParams(format!("{} Haar weights for {} objects", haar.weights.len(), g.n_objects())));
        }
        let inv = haar.check_left_invariance(g, 1e-12);
        if !inv.pass {
            let (a, b) = orbit_witness(g, haar);
            return Err(Error::WeightNotOrbitConstant { a, b });
        }
        Ok(Self::build_unchecked(g, haar))
    }

    /// Builds the dual without validating its input, for mutation tests.
    pub fn build_unchecked(g: &FiniteGroupoid, haar: &HaarSystem) -> Self {
        let (n0, n1) = (g.n_objects(), g.n_arrows());
        let a = CStarAlgebra::commutative(n1, "C(Γ₁)").expect("nonempty");
        let b = CStarAlgebra::commutative(n0, "C(Γ₀)").expect("nonempty");

        let mut es = CMatrix::zeros(n1, n0);
        let mut et = CMatrix::zeros(n1, n0);
        let mut p = CMatrix::zeros(n0, n1);
        let mut s = CMatrix::zeros(n1, n1);
        let mut eps = CMatrix::zeros(n0, n1);
        for x in 0..n1 {
            es[(x, g.src(x))] = one();
            et[(x, g.tgt(x))] = one();
            p[(g.tgt(x), x)] = c(haar.weights[g.tgt(x)], 0.0);
            s[(g.inverse(x), x)] = one();
        }
        for q in 0..n0 {
            eps[(q, g.identity(q))] = one();
        }
        let gamma2: Vec<((usize, usize), Option<usize>)> =
            g.composable_pairs().into_iter().map(|(x, y)| ((x, y), g.compose(x, y))).collect();
        let mut legs: Vec<Legs> = vec![Vec::new(); n1];
        for &((x, y), z) in &gamma2 {
            if let Some(z) = z {
                legs[z].push((a.basis(x), a.basis(y)));
            }
        }
        let lm = |m: CMatrix, d: &CStarAlgebra, cd: &CStarAlgebra, k: MapKind| {
            LinearMap::new(d.clone(), cd.clone(), m, k).expect("shapes")
        };
        let data = QuantumGroupoidData::new(
            a.clone(),
            b.clone(),
            lm(es, &b, &a, MapKind::Hom),
            lm(et, &b, &a, MapKind::Antihom),
            lm(p, &a, &b, MapKind::Plain),
            lm(s, &a, &a, MapKind::Antihom),
            legs,
        )
        .expect("shapes");
        let counit = lm(eps, &a, &b, MapKind::Hom);
        Self { groupoid: g.clone(), haar: haar.clone(), data, counit, gamma2 }
    }
}

fn orbit_witness(g: &FiniteGroupoid, haar: &HaarSystem) -> (String, String) {
    for x in 0..g.n_arrows() {
        let (a, b) = (g.src(x), g.tgt(x));
        if haar.weights[a] != haar.weights[b] {
            return (g.objects()[a].clone(), g.objects()[b].clone());
        }
    }
    (g.objects()[0].clone(), g.objects()[0].clone())
}

/// `C(Γ₁) ⊗_{C(Γ₀)} C(Γ₁) ≅ C(Γ₂)`: the operators `φ¹(δ_x) φ²(δ_y)` are
/// nonzero self-adjoint orthogonal projections summing to one for `(x, y) ∈ Γ₂`,
/// vanish off `Γ₂`, and span the generated algebra.
pub fn check_iso_gamma2(d: &GroupoidDual, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new("C(Γ₁) ⊗_{C(Γ₀)} C(Γ₁) ≅ C(Γ₂)", tol);
    let q = &d.data;
    let f = match build_fiber_tensor(q, tol) {
        Ok(f) => f,
        Err(e) => {
            r.push(Check::failed("fiber", e.to_string()));
            return r;
        }
    };
    let g = &d.groupoid;
    let n2 = d.gamma2.len();
    match generated_algebra(&f, tol) {
        Ok(alg) => r.push(Check::verdict(
            "dimension",
            alg.dim == n2,
            (alg.dim as f64 - n2 as f64).abs(),
            1.0,
            Some(format!("generated dimension {} vs |Γ₂| = {n2}", alg.dim)),
        )),
        Err(e) => r.push(Check::failed("dimension", e.to_string())),
    }
    let dim = f.dim();
    let op = |x: usize, y: usize| f.phi1[x].mul(&f.phi2[y]);

    let mut off = Residual::new();
    for x in 0..g.n_arrows() {
        for y in 0..g.n_arrows() {
            if g.src(x) != g.tgt(y) {
                off.observe(op(x, y).frobenius_norm(), 1.0, || format!("({}, {})", g.arrows()[x], g.arrows()[y]));
            }
        }
    }
    r.push(Check::from_residual("non_composable_vanish", off, tol));

    let projections: Vec<SparseMatrix> = d.gamma2.iter().map(|&((x, y), _)| op(x, y)).collect();
    let mut proj = Residual::new();
    let mut nonzero = true;
    for (i, p) in projections.iter().enumerate() {
        let label = || {
            let (x, y) = d.gamma2[i].0;
            format!("({}, {})", g.arrows()[x], g.arrows()[y])
        };
        if p.frobenius_norm() <= tol {
            nonzero = false;
        }
        match crate::bimodule::adjoint_of(p, f.module(), tol) {
            Ok(adj) => {
                let (abs, scale) = kernel::sparse_residual(&adj.adjoint_matrix, p);
                proj.observe(abs, scale, label);
            }
            Err(_) => proj.observe(f64::INFINITY, 1.0, label),
        }
        for (j, p2) in projections.iter().enumerate() {
            let expected = if i == j { p.clone() } else { SparseMatrix::zeros(dim, dim) };
            let (abs, scale) = kernel::sparse_residual(&p.mul(p2), &expected);
            proj.observe(abs, scale, || format!("{} times pair {j}", label()));
        }
    }
    let mut total = SparseMatrix::zeros(dim, dim);
    for p in &projections {
        total = total.add(p);
    }
    let (abs, scale) = kernel::sparse_residual(&total, &SparseMatrix::identity(dim));
    proj.observe(abs, scale, || "sum of projections".into());
    r.push(Check::from_residual("orthogonal_projections", proj, tol));
    r.push(Check::verdict(
        "projections_nonzero",
        nonzero,
        if nonzero { 0.0 } else { 1.0 },
        1.0,
        Some("a pair of Γ₂ maps to zero".into()),
    ));
    r
}

fn vec_check(name: &str, pairs: impl IntoIterator<Item = (CVector, CVector, String)>, tol: f64) -> Check {
    let mut res = Residual::new();
    for (x, y, w) in pairs {
        res.observe((&x - &y).norm(), x.norm().max(y.norm()), || w);
    }
    Check::from_residual(name, res, tol)
}

/// Counit identities in leg form and the bimodule property of `ε`.
pub fn check_counit(d: &GroupoidDual, tol: f64) -> VerificationReport {
    let q = &d.data;
    let (a, b) = (&q.a, &q.b);
    let eps = &d.counit;
    let mut r = VerificationReport::new("counit", tol);
    r.absorb("counit", check_multiplicative(eps, false, true, tol));

    let right = (0..a.dim()).map(|k| {
        let mut sum = CVector::zeros(a.dim());
        for (u, v) in &q.legs[k] {
            sum += a.mul(u, &q.eta_s.apply(&eps.apply(v)));
        }
        (sum, a.basis(k), format!("basis element {k}"))
    });
    r.push(vec_check("right_counit", right, tol));
    let left = (0..a.dim()).map(|k| {
        let mut sum = CVector::zeros(a.dim());
        for (u, v) in &q.legs[k] {
            sum += a.mul(&q.eta_t.apply(&eps.apply(u)), v);
        }
        (sum, a.basis(k), format!("basis element {k}"))
    });
    r.push(vec_check("left_counit", left, tol));

    let mut pairs = Vec::new();
    for k in 0..a.dim() {
        for beta in 0..b.dim() {
            let y = b.basis(beta);
            let lhs = eps.apply(&a.mul(&q.eta_t.apply(&y), &a.basis(k)));
            pairs.push((lhs, b.mul(&y, &eps.apply(&a.basis(k))), format!("η_t(e_{beta}) e_{k}")));
            let lhs = eps.apply(&a.mul(&a.basis(k), &q.eta_s.apply(&y)));
            pairs.push((lhs, b.mul(&eps.apply(&a.basis(k)), &y), format!("e_{k} η_s(e_{beta})")));
        }
    }
    r.push(vec_check("counit_bimodule_morphism", pairs, tol));
    r
}

fn tensor_of(legs: &[(CVector, CVector)], n: usize) -> CVector {
    let mut out = CVector::zeros(n * n);
    for (u, v) in legs {
        out += u.kronecker(v);
    }
    out
}

/// Hopf-algebra identities of the one-object case, on raw tensors
/// (`A ⊗_B A = A ⊗ A` when `B = ℂ`).
pub fn check_group_mode(d: &GroupoidDual, tol: f64) -> Result<VerificationReport> {
    let q = &d.data;
    if q.b.dim() != 1 {
        return Err(Error::NotGroupMode);
    }
    let a = &q.a;
    let n = a.dim();
    let eps = &d.counit;
    let unit = a.unit();
    let mut r = VerificationReport::new("group mode", tol);
    let scalar = |v: CVector| v[0];

    let mut conv = Vec::new();
    for k in 0..n {
        let e = scalar(eps.apply(&a.basis(k)));
        let mut x = CVector::zeros(n);
        let mut y = CVector::zeros(n);
        for (u, v) in &q.legs[k] {
            x += a.mul(u, &q.s.apply(v));
            y += a.mul(&q.s.apply(u), v);
        }
        conv.push((x, &unit * e, format!("Σ a′ S(a″), basis element {k}")));
        conv.push((y, &unit * e, format!("Σ S(a′) a″, basis element {k}")));
    }
    r.push(vec_check("antipode_convolution", conv, tol));

    let seta = std::iter::once((q.s.apply(&unit), unit.clone(), "S(1)".to_string()));
    r.push(vec_check("antipode_unit", seta, tol));

    let ginv = (0..n).map(|k| {
        let flipped: Vec<(CVector, CVector)> = q.legs[k].iter().map(|(u, v)| (q.s.apply(v), q.s.apply(u))).collect();
        (tensor_of(&flipped, n), tensor_of(&q.legs_of(&q.s.apply(&a.basis(k))), n), format!("basis element {k}"))
    });
    r.push(vec_check("antipode_coproduct", ginv, tol));

    let mut haar = Vec::new();
    for k in 0..n {
        let pk = scalar(q.p.apply(&a.basis(k)));
        let mut x = CVector::zeros(n);
        let mut y = CVector::zeros(n);
        for (u, v) in &q.legs[k] {
            x += u * scalar(q.p.apply(v));
            y += v * scalar(q.p.apply(u));
        }
        haar.push((x, &unit * pk, format!("(id ⊗ P)Δ, basis element {k}")));
        haar.push((y, &unit * pk, format!("(P ⊗ id)Δ, basis element {k}")));
    }
    r.push(vec_check("haar_invariance", haar, tol));

    let inv = (0..n).map(|k| {
        let x = a.basis(k);
        let once = q.s.apply(&a.star(&x));
        (q.s.apply(&a.star(&once)), x, format!("basis element {k}"))
    });
    r.push(vec_check("antipode_involution", inv, tol));

    let coas = (0..n).map(|k| {
        let mut left = CVector::zeros(n * n * n);
        let mut right = CVector::zeros(n * n * n);
        for (u, v) in &q.legs[k] {
            left += tensor_of(&q.legs_of(u), n).kronecker(v);
            right += u.kronecker(&tensor_of(&q.legs_of(v), n));
        }
        (left, right, format!("basis element {k}"))
    });
    r.push(vec_check("coassociativity", coas, tol));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{GroupTable, HaarMode};
    use crate::kernel::DEFAULT_TOL;
    use crate::quantum::verify_all;

    fn dual(g: &FiniteGroupoid) -> GroupoidDual {
        GroupoidDual::build(g, &HaarSystem::new(g, HaarMode::Normalized)).unwrap()
    }

    #[test]
    fn trivial_dual() {
        let d = dual(&FiniteGroupoid::trivial());
        assert_eq!((d.data.a.dim(), d.data.b.dim()), (1, 1));
        assert_eq!(d.data.legs[0], vec![(d.data.a.basis(0), d.data.a.basis(0))]);
        assert_eq!(d.data.s.matrix, CMatrix::identity(1, 1));
        assert_eq!(d.data.p.matrix, CMatrix::identity(1, 1));
        let r = verify_all(&d.data, DEFAULT_TOL);
        assert!(r.pass());
        assert_eq!(r.max_residual(), 0.0);
    }

    #[test]
    fn z2_dual() {
        let d = dual(&FiniteGroupoid::group(&GroupTable::cyclic(2).unwrap()));
        let a = &d.data.a;
        let (e, g) = (a.basis(0), a.basis(1));
        assert_eq!(d.data.legs[1], vec![(e.clone(), g.clone()), (g.clone(), e.clone())]);
        assert_eq!(d.data.s.apply(&g), g);
        assert!((d.data.p.apply(&g)[0] - c(0.5, 0.0)).norm() < 1e-15);
        let r = check_counit(&d, DEFAULT_TOL);
        assert!(r.pass());
        let gm = check_group_mode(&d, DEFAULT_TOL).unwrap();
        assert!(gm.pass(), "{:?}", gm.failing().collect::<Vec<_>>());
    }

    #[test]
    fn pair2_dual() {
        let g = FiniteGroupoid::pair(2).unwrap();
        let d = dual(&g);
        // Arrow (i,j) has index 2i+j.
        let a = &d.data.a;
        assert_eq!(d.data.s.apply(&a.basis(1)), a.basis(2));
        let half = c(0.5, 0.0);
        let p01 = d.data.p.apply(&a.basis(1));
        assert!((p01[0] - half).norm() < 1e-15 && p01[1].norm() == 0.0);
        // δ_(0,1) has legs (δ_(0,q), δ_(q,1)).
        assert_eq!(d.data.legs[1].len(), 2);
        assert!(check_counit(&d, DEFAULT_TOL).pass());
        assert!(matches!(check_group_mode(&d, DEFAULT_TOL), Err(Error::NotGroupMode)));
        let iso = check_iso_gamma2(&d, DEFAULT_TOL);
        assert!(iso.pass(), "{:?}", iso.failing().collect::<Vec<_>>());
        let r = verify_all(&d.data, DEFAULT_TOL);
        assert!(r.pass(), "{:?}", r.failing().collect::<Vec<_>>());
    }

    #[test]
    fn eta_t_is_hom_and_antihom_in_commutative_case() {
        let d = dual(&FiniteGroupoid::pair(3).unwrap());
        assert!(check_multiplicative(&d.data.eta_t, false, true, DEFAULT_TOL).pass());
        assert!(check_multiplicative(&d.data.eta_t, true, true, DEFAULT_TOL).pass());
    }

    #[test]
    fn z3_group_mode_haar_is_uniform_average() {
        let d = dual(&FiniteGroupoid::group(&GroupTable::cyclic(3).unwrap()));
        let gm = check_group_mode(&d, DEFAULT_TOL).unwrap();
        assert!(gm.pass());
        let p = d.data.p.apply(&d.data.a.basis(1))[0];
        assert!((p - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(check_iso_gamma2(&d, DEFAULT_TOL).get("dimension").unwrap().pass);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let mut g = FiniteGroupoid::pair(3).unwrap();
        g.set_composition(1, 5, Some(1));
        let h = HaarSystem::new(&g, HaarMode::Normalized);
        assert!(matches!(GroupoidDual::build(&g, &h), Err(Error::InvalidGroupoid(_))));
        let p2 = FiniteGroupoid::pair(2).unwrap();
        let bad = HaarSystem::unchecked(vec![1.0, 0.5]);
        assert!(matches!(GroupoidDual::build(&p2, &bad), Err(Error::WeightNotOrbitConstant { .. })));
    }
}
