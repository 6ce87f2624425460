//! Unitary groupoid representations, the corepresentations they induce, and
//! corepresentation checks for general bundles.
//!
//! A corepresentation is stored as a module `E` over the base `B` together
//! with a matrix `delta` from `ℂ^m` into the raw space `E ⊗ A` (index
//! `k·dim A + x`). The codomain `A` is the `B–A` bimodule with right
//! multiplication, `⟨a, c⟩ = a* c` and left action `b·a = a η_t(b)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CStarAlgebra, LinearMap};
use crate::bimodule::{interior_tensor, HilbertBimodule, TensorProduct};
use crate::dual::GroupoidDual;
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::kernel::{self, c, one, zero, CMatrix, CVector, SparseMatrix, C64};
use crate::quantum::{build_fiber_tensor, QuantumGroupoidData};
use crate::report::{Check, Residual, VerificationReport};

/// Unitary representation of a finite groupoid on a bundle of Hilbert spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidRep {
    pub groupoid: FiniteGroupoid,
    pub fiber_dims: Vec<usize>,
    /// `u[x]` maps the fiber over `s(x)` to the fiber over `t(x)`.
    pub u: Vec<CMatrix>,
}

impl GroupoidRep {
    pub fn new(groupoid: FiniteGroupoid, fiber_dims: Vec<usize>, u: Vec<CMatrix>) -> Result<Self> {
        if fiber_dims.len() != groupoid.n_objects() || u.len() != groupoid.n_arrows() {
            return Err(Error::DimensionMismatch("representation does not cover the groupoid".into()));
        }
        for (x, m) in u.iter().enumerate() {
            let want = (fiber_dims[groupoid.tgt(x)], fiber_dims[groupoid.src(x)]);
            if m.shape() != want {
                return Err(Error::DimensionMismatch(format!(
                    "U({}) is {:?}, expected {want:?}",
                    groupoid.arrows()[x],
                    m.shape()
                )));
            }
            if !kernel::is_finite(m) {
                return Err(Error::BadParams(format!("U({}) has non-finite entries", groupoid.arrows()[x])));
            }
        }
        Ok(Self { groupoid, fiber_dims, u })
    }

    /// `H_q = ℂ` and `U ≡ 1`.
    pub fn trivial(g: &FiniteGroupoid) -> Self {
        let u = (0..g.n_arrows()).map(|_| CMatrix::identity(1, 1)).collect();
        Self { groupoid: g.clone(), fiber_dims: vec![1; g.n_objects()], u }
    }

    pub fn from_fn(g: &FiniteGroupoid, fiber_dims: Vec<usize>, f: impl Fn(usize) -> CMatrix) -> Result<Self> {
        let u = (0..g.n_arrows()).map(f).collect();
        Self::new(g.clone(), fiber_dims, u)
    }

    /// Total dimension `Σ_q dim H_q`.
    pub fn dim(&self) -> usize {
        self.fiber_dims.iter().sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.fiber_dims.len());
        let mut acc = 0;
        for &n in &self.fiber_dims {
            out.push(acc);
            acc += n;
        }
        out
    }

    /// Fiberwise tensor product `(U₁ ⊗ U₂)(x)`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.groupoid != other.groupoid {
            return Err(Error::GroupoidMismatch);
        }
        let dims = self.fiber_dims.iter().zip(&other.fiber_dims).map(|(a, b)| a * b).collect();
        let u = self.u.iter().zip(&other.u).map(|(a, b)| a.kronecker(b)).collect();
        Self::new(self.groupoid.clone(), dims, u)
    }

    /// Unitarity of every `U(x)`, `U(xy) = U(x)U(y)` on composable pairs and
    /// `U(ι(q)) = 1`.
    pub fn validate(&self, tol: f64) -> VerificationReport {
        let g = &self.groupoid;
        let mut r = VerificationReport::new("groupoid representation", tol);
        let mut unitary = Residual::new();
        for (x, m) in self.u.iter().enumerate() {
            let n = m.ncols();
            let (abs, scale) = kernel::dense_residual(&(m.adjoint() * m), &CMatrix::identity(n, n));
            unitary.observe(abs, scale, || format!("U({})", g.arrows()[x]));
        }
        r.push(Check::from_residual("unitary", unitary, tol));

        let mut functor = Residual::new();
        for (x, y) in g.composable_pairs() {
            let Some(z) = g.compose(x, y) else { continue };
            let (abs, scale) = kernel::dense_residual(&self.u[z], &(&self.u[x] * &self.u[y]));
            functor.observe(abs, scale, || format!("U({}) vs U({})U({})", g.arrows()[z], g.arrows()[x], g.arrows()[y]));
        }
        r.push(Check::from_residual("functorial", functor, tol));

        let mut ident = Residual::new();
        for q in 0..g.n_objects() {
            let n = self.fiber_dims[q];
            let (abs, scale) = kernel::dense_residual(&self.u[g.identity(q)], &CMatrix::identity(n, n));
            ident.observe(abs, scale, || format!("U({})", g.arrows()[g.identity(q)]));
        }
        r.push(Check::from_residual("identities", ident, tol));
        r
    }
}

/// A module over the base together with its coaction matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Corepresentation {
    pub module: HilbertBimodule,
    /// `(m·dim A) × m` matrix into the raw space `E ⊗ A`.
    pub delta: SparseMatrix,
}

impl Corepresentation {
    pub fn new(module: HilbertBimodule, delta: SparseMatrix, a: &CStarAlgebra) -> Result<Self> {
        let m = module.dim();
        if delta.shape() != (m * a.dim(), m) {
            return Err(Error::DimensionMismatch(format!(
                "coaction is {:?}, expected {:?}",
                delta.shape(),
                (m * a.dim(), m)
            )));
        }
        if !delta.is_finite() {
            return Err(Error::BadParams("non-finite coaction".into()));
        }
        Ok(Self { module, delta })
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }
}

/// Sections of a bundle with fibers of the given dimensions, as a module over
/// the diagonal algebra `b`: basis `(q, i)` in object-major order.
pub fn sections_module(b: &CStarAlgebra, fiber_dims: &[usize]) -> Result<HilbertBimodule> {
    if !b.is_commutative() || b.dim() != fiber_dims.len() {
        return Err(Error::BaseMismatch(format!("{} does not match {} fibers", b.label(), fiber_dims.len())));
    }
    let m: usize = fiber_dims.iter().sum();
    let mut proj = Vec::with_capacity(fiber_dims.len());
    let mut offset = 0;
    for &n in fiber_dims {
        proj.push(SparseMatrix::from_triplets(m, m, (offset..offset + n).map(|i| (i, i, one()))));
        offset += n;
    }
    HilbertBimodule::new("sections", b.clone(), b.clone(), m, proj.clone(), proj.clone(), proj)
}

/// The `B–A` bimodule `A` used as the coefficient side of a coaction.
pub fn codomain_module(q: &QuantumGroupoidData) -> Result<HilbertBimodule> {
    let a = &q.a;
    let d = a.dim();
    let left = (0..q.b.dim()).map(|beta| a.right_mult(&q.eta_t.matrix.column(beta).into_owned())).collect();
    let right = (0..d).map(|x| a.right_mult(&a.basis(x))).collect();
    let mut trip: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); d];
    for i in 0..d {
        for j in 0..d {
            if let Some(k) = a.basis_product(a.basis_star(i), j) {
                trip[k].push((i, j, one()));
            }
        }
    }
    let gram = trip.into_iter().map(|t| SparseMatrix::from_triplets(d, d, t)).collect();
    HilbertBimodule::new(format!("{} as coefficients", a.label()), q.b.clone(), a.clone(), d, left, right, gram)
}

/// `δΨ(x) = U(x) Ψ(s(x))` on sections of the representation bundle.
pub fn corep_from_rep(r: &GroupoidRep, d: &GroupoidDual) -> Result<Corepresentation> {
    if r.groupoid != d.groupoid {
        return Err(Error::GroupoidMismatch);
    }
    let g = &r.groupoid;
    let da = g.n_arrows();
    let module = sections_module(&d.data.b, &r.fiber_dims)?;
    let off = r.offsets();
    let mut trip = Vec::new();
    for x in 0..da {
        let (s, t) = (g.src(x), g.tgt(x));
        for i in 0..r.fiber_dims[s] {
            for j in 0..r.fiber_dims[t] {
                let v = r.u[x][(j, i)];
                if v != zero() {
                    trip.push(((off[t] + j) * da + x, off[s] + i, v));
                }
            }
        }
    }
    let m = r.dim();
    Corepresentation::new(module, SparseMatrix::from_triplets(m * da, m, trip), &d.data.a)
}

/// `δ = Δ` on the localized module `A⁻`.
pub fn regular_corep(q: &QuantumGroupoidData, tol: f64) -> Result<Corepresentation> {
    let module = q.localization(tol)?;
    let da = q.a.dim();
    let mut trip = Vec::new();
    for (k, legs) in q.legs.iter().enumerate() {
        let mut col = CVector::zeros(da * da);
        for (u, v) in legs {
            col += u.kronecker(v);
        }
        trip.extend(col.iter().enumerate().filter(|(_, z)| **z != zero()).map(|(i, &z)| (i, k, z)));
    }
    Corepresentation::new(module, SparseMatrix::from_triplets(da * da, da, trip), &q.a)
}

fn check_base(co: &Corepresentation, q: &QuantumGroupoidData) -> Result<()> {
    let e = &co.module;
    if e.right_algebra() != &q.b || e.left_algebra() != &q.b {
        return Err(Error::BaseMismatch(format!(
            "module is {}–{}, bundle base is {}",
            e.left_algebra().label(),
            e.right_algebra().label(),
            q.b.label()
        )));
    }
    if co.delta.shape() != (e.dim() * q.a.dim(), e.dim()) {
        return Err(Error::DimensionMismatch("coaction does not fit the bundle".into()));
    }
    Ok(())
}

fn codomain_tensor(co: &Corepresentation, q: &QuantumGroupoidData, tol: f64) -> Result<TensorProduct> {
    let ac = codomain_module(q)?;
    interior_tensor(&co.module, &ac, tol).map_err(|e| match e {
        Error::FormNotPsd { min_eigenvalue } => Error::CodomainFormNotPsd { min_eigenvalue },
        other => other,
    })
}

fn vec_residual(x: &CVector, y: &CVector) -> (f64, f64) {
    ((x - y).norm(), x.norm().max(y.norm()))
}

/// Runs the coaction checks. Errors only when the codomain form is not
/// positive or the data do not fit together.
fn corep_report(
    co: &Corepresentation,
    q: &QuantumGroupoidData,
    counit: Option<&LinearMap>,
    tol: f64,
) -> Result<VerificationReport> {
    check_base(co, q)?;
    let e = &co.module;
    let (m, da) = (e.dim(), q.a.dim());
    let mut r = VerificationReport::new(format!("coaction on {}", e.label), tol);
    let t = codomain_tensor(co, q, tol)?;
    let d_proj = t.project.mul(&co.delta).to_dense();

    let mut inner = Residual::new();
    let lhs: Vec<CMatrix> = t.module.gram().iter().map(|g| d_proj.adjoint() * g.to_dense() * &d_proj).collect();
    let base_gram: Vec<CMatrix> = e.gram().iter().map(|g| g.to_dense()).collect();
    for i in 0..m {
        for j in 0..m {
            let x = CVector::from_iterator(da, lhs.iter().map(|l| l[(i, j)]));
            let b = CVector::from_iterator(q.b.dim(), base_gram.iter().map(|g| g[(i, j)]));
            let y = q.eta_s.apply(&b);
            let (abs, scale) = vec_residual(&x, &y);
            inner.observe(abs, scale, || format!("⟨δ(v_{i}), δ(v_{j})⟩"));
        }
    }
    r.push(Check::from_residual("inner_product", inner, tol));

    let id_m = SparseMatrix::identity(m);
    let mut module_rel = Residual::new();
    for beta in 0..q.b.dim() {
        let x = t.project.mul(&co.delta).mul(&e.right_action()[beta]);
        let twist = id_m.kron(&q.a.right_mult(&q.eta_s.matrix.column(beta).into_owned()));
        let y = t.project.mul(&twist).mul(&co.delta);
        let (abs, scale) = kernel::sparse_residual(&x, &y);
        module_rel.observe(abs, scale, || format!("δ(v·e_{beta}) vs δ(v)·η_s(e_{beta})"));
    }
    r.push(Check::from_residual("module_relation", module_rel, tol));

    match coassociativity(co, q, tol) {
        Ok(check) => r.push(check),
        Err(err) => r.push(Check::failed("coassociativity", err.to_string())),
    }

    match counit {
        Some(eps) => {
            let mut trip = Vec::new();
            for k in 0..m {
                for alpha in 0..da {
                    let col = e.right_operator(&eps.apply(&q.a.basis(alpha))).mul_dvec(&unit(m, k));
                    trip.extend(
                        col.iter().enumerate().filter(|(_, z)| **z != zero()).map(|(i, &z)| (i, k * da + alpha, z)),
                    );
                }
            }
            let contract = SparseMatrix::from_triplets(m, m * da, trip);
            let canonical = t.embed.mul(&t.project).mul(&co.delta);
            let lhs = contract.mul(&canonical);
            let mut res = Residual::new();
            for i in 0..m {
                let col = lhs.mul_dvec(&unit(m, i));
                let (abs, scale) = vec_residual(&col, &unit(m, i));
                res.observe(abs, scale, || format!("basis vector {i}"));
            }
            r.push(Check::from_residual("counit", res, tol));
        }
        None => r.note("counit check skipped: no counit is available for this bundle"),
    }
    Ok(r)
}

/// `(id ⊗ Δ)∘δ` against `(δ ⊗ id)∘δ`, both read in `E ⊗̂_B (A⁻ ⊗̂_B A⁻)`.
fn coassociativity(co: &Corepresentation, q: &QuantumGroupoidData, tol: f64) -> Result<Check> {
    let e = &co.module;
    let (m, da) = (e.dim(), q.a.dim());
    let f = build_fiber_tensor(q, tol)?;
    let df = f.dim();
    let mut trip = Vec::new();
    for (x, d) in f.delta.iter().enumerate() {
        let col = d.mul_dvec(&f.cyclic_vector);
        trip.extend(col.iter().enumerate().filter(|(_, z)| **z != zero()).map(|(i, &z)| (i, x, z)));
    }
    let d_xi = SparseMatrix::from_triplets(df, da, trip);
    let id_m = SparseMatrix::identity(m);
    let lhs = id_m.kron(&d_xi).mul(&co.delta);
    let rhs = id_m.kron(&f.tensor.project).mul(&co.delta.kron(&SparseMatrix::identity(da))).mul(&co.delta);

    let ef = interior_tensor(e, f.module(), tol)?;
    let x = ef.project.mul(&lhs);
    let y = ef.project.mul(&rhs);
    let mut res = Residual::new();
    for i in 0..m {
        let (xi, yi) = (x.mul_dvec(&unit(m, i)), y.mul_dvec(&unit(m, i)));
        let (abs, scale) = vec_residual(&xi, &yi);
        res.observe(abs, scale, || format!("basis vector {i}"));
    }
    Ok(Check::from_residual("coassociativity", res, tol))
}

fn unit(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = one();
    v
}

/// Inner-product compatibility, coassociativity, the module relation and,
/// when `counit` is given, the counit law. Structural failures are reported
/// as failed checks.
pub fn check_corep_axioms(
    co: &Corepresentation,
    q: &QuantumGroupoidData,
    counit: Option<&LinearMap>,
    tol: f64,
) -> VerificationReport {
    corep_report(co, q, counit, tol).unwrap_or_else(|err| {
        let mut r = VerificationReport::new(format!("coaction on {}", co.module.label), tol);
        r.push(Check::failed("structure", err.to_string()));
        r
    })
}

/// Checks an arbitrary coaction against a bundle. The counit law is omitted;
/// a non-positive codomain form is an error.
pub fn quantum_corep_check(
    e: &HilbertBimodule,
    delta: &SparseMatrix,
    q: &QuantumGroupoidData,
    tol: f64,
) -> Result<VerificationReport> {
    let c = Corepresentation::new(e.clone(), delta.clone(), &q.a)?;
    let mut r = corep_report(&c, q, None, tol)?;
    r.note("quantum coaction axioms: inner-product compatibility, coassociativity and the module relation");
    Ok(r)
}

/// `δ(v ⊗ w) = v₍₀₎ ⊗ w₍₀₎ ⊗ v₍₁₎ w₍₁₎` on `E₁ ⊗̂_B E₂`.
pub fn tensor_coreps(
    c1: &Corepresentation,
    c2: &Corepresentation,
    q: &QuantumGroupoidData,
    tol: f64,
) -> Result<Corepresentation> {
    check_base(c1, q)?;
    check_base(c2, q)?;
    let a = &q.a;
    let da = a.dim();
    let (m1, m2) = (c1.dim(), c2.dim());
    let t = interior_tensor(&c1.module, &c2.module, tol)?;
    let n = t.dim();

    let cols = |d: &SparseMatrix, i: usize| -> Vec<(usize, usize, C64)> {
        let col = d.mul_dvec(&unit(d.ncols(), i));
        col.iter().enumerate().filter(|(_, z)| **z != zero()).map(|(r, &z)| (r / da, r % da, z)).collect()
    };
    let d1: Vec<_> = (0..m1).map(|i| cols(&c1.delta, i)).collect();
    let d2: Vec<_> = (0..m2).map(|j| cols(&c2.delta, j)).collect();

    let mut raw = Vec::new();
    for p in 0..n {
        for (idx, v) in t.embed.mul_dvec(&unit(n, p)).iter().enumerate() {
            if *v == zero() {
                continue;
            }
            let (i, j) = (idx / m2, idx % m2);
            for &(k, x, a1) in &d1[i] {
                for &(l, y, a2) in &d2[j] {
                    if let Some(z) = a.basis_product(x, y) {
                        raw.push(((k * m2 + l) * da + z, p, v * a1 * a2));
                    }
                }
            }
        }
    }
    let raw = SparseMatrix::from_triplets(m1 * m2 * da, n, raw);
    let delta = t.project.kron(&SparseMatrix::identity(da)).mul(&raw);
    let mut module = t.module;
    module.label = format!("{} ⊗ {}", c1.module.label, c2.module.label);
    Corepresentation::new(module, delta, a)
}

/// Coefficient matrices `C_x` of `δ` in a Gram-orthonormal basis of `E`,
/// with their adjoints and the base actions.
fn coefficient_family(co: &Corepresentation, q: &QuantumGroupoidData, tol: f64) -> Result<Vec<CMatrix>> {
    let e = &co.module;
    let (m, da) = (e.dim(), q.a.dim());
    let eig = kernel::hermitian_eigensystem(&e.flat_gram().to_dense(), tol)?;
    if eig.min() <= tol * eig.scale() {
        return Err(Error::NotPsd { min_eigenvalue: eig.min() });
    }
    let v = &eig.vectors;
    let sqrt = CMatrix::from_diagonal(&CVector::from_iterator(m, eig.values.iter().map(|l| c(l.sqrt(), 0.0))));
    let inv_sqrt =
        CMatrix::from_diagonal(&CVector::from_iterator(m, eig.values.iter().map(|l| c(1.0 / l.sqrt(), 0.0))));
    let s = v * sqrt * v.adjoint();
    let s_inv = v * inv_sqrt * v.adjoint();

    let t = codomain_tensor(co, q, tol)?;
    let canonical = t.embed.mul(&t.project).mul(&co.delta).to_dense();
    let mut family = Vec::new();
    for x in 0..da {
        let mut cx = CMatrix::zeros(m, m);
        for k in 0..m {
            for i in 0..m {
                cx[(k, i)] = canonical[(k * da + x, i)];
            }
        }
        let cx = &s * cx * &s_inv;
        family.push(cx.adjoint());
        family.push(cx);
    }
    for op in e.right_action().iter().chain(e.left_action()) {
        family.push(&s * op.to_dense() * &s_inv);
    }
    Ok(family)
}

/// Decides unitary equivalence by computing the space of intertwiners of the
/// orthonormalized coefficient families, taking a generic element and
/// replacing it by the unitary factor of its polar decomposition.
pub fn equivalence(c1: &Corepresentation, c2: &Corepresentation, q: &QuantumGroupoidData, tol: f64) -> Check {
    const NAME: &str = "unitarily_equivalent";
    if c1.dim() != c2.dim() {
        return Check::failed(NAME, format!("dimensions {} and {}", c1.dim(), c2.dim()));
    }
    let (f1, f2) = match (coefficient_family(c1, q, tol), coefficient_family(c2, q, tol)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Check::failed(NAME, e.to_string()),
    };
    let m = c1.dim();
    if m == 0 {
        return Check::verdict(NAME, true, 0.0, 1.0, None);
    }
    let id = CMatrix::identity(m, m);
    let mut k = CMatrix::zeros(m * m, m * m);
    for (a, b) in f1.iter().zip(&f2) {
        let block = a.transpose().kronecker(&id) - id.kronecker(b);
        k += block.adjoint() * block;
    }
    let null = match kernel::null_space(&k, 1e-10) {
        Ok(n) => n,
        Err(e) => return Check::failed(NAME, e.to_string()),
    };
    if null.is_empty() {
        return Check::failed(NAME, "no nonzero intertwiner");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut w = CVector::zeros(m * m);
    for v in &null {
        w += v * c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let w = CMatrix::from_column_slice(m, m, w.as_slice());
    let gram = w.adjoint() * &w;
    let eig = match kernel::hermitian_eigensystem(&gram, 1e-8) {
        Ok(e) => e,
        Err(e) => return Check::failed(NAME, e.to_string()),
    };
    if eig.min() <= 1e-12 * eig.scale() {
        return Check::failed(NAME, "every intertwiner is singular");
    }
    let inv_sqrt =
        CMatrix::from_diagonal(&CVector::from_iterator(m, eig.values.iter().map(|l| c(1.0 / l.sqrt(), 0.0))));
    let u = &w * (&eig.vectors * inv_sqrt * eig.vectors.adjoint());
    let mut res = Residual::new();
    for (j, (a, b)) in f1.iter().zip(&f2).enumerate() {
        let (abs, scale) = kernel::dense_residual(&(&u * a), &(b * &u));
        res.observe(abs, scale, || format!("family member {j}"));
    }
    Check::from_residual(NAME, res, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{GroupTable, HaarMode, HaarSystem};
    use crate::kernel::DEFAULT_TOL;

    fn dual(g: &FiniteGroupoid) -> GroupoidDual {
        GroupoidDual::build(g, &HaarSystem::new(g, HaarMode::Normalized)).unwrap()
    }

    fn sign(g: &FiniteGroupoid) -> GroupoidRep {
        GroupoidRep::from_fn(g, vec![1], |x| CMatrix::from_element(1, 1, c(if x == 0 { 1.0 } else { -1.0 }, 0.0)))
            .unwrap()
    }

    #[test]
    fn trivial_rep_on_pair_passes() {
        let g = FiniteGroupoid::pair(2).unwrap();
        let d = dual(&g);
        let r = GroupoidRep::trivial(&g);
        assert!(r.validate(1e-12).pass());
        let co = corep_from_rep(&r, &d).unwrap();
        let rep = check_corep_axioms(&co, &d.data, Some(&d.counit), 1e-10);
        assert!(rep.pass(), "{rep:#?}");
        assert_eq!(rep.checks.len(), 4);
    }

    #[test]
    fn sign_rep_of_z2() {
        let g = FiniteGroupoid::group(&GroupTable::cyclic(2).unwrap());
        let d = dual(&g);
        let s = sign(&g);
        assert!(s.validate(1e-12).pass());
        let co = corep_from_rep(&s, &d).unwrap();
        assert!(check_corep_axioms(&co, &d.data, Some(&d.counit), 1e-10).pass());

        let ss = tensor_coreps(&co, &co, &d.data, DEFAULT_TOL).unwrap();
        assert!(check_corep_axioms(&ss, &d.data, Some(&d.counit), 1e-10).pass());
        let triv = corep_from_rep(&GroupoidRep::trivial(&g), &d).unwrap();
        assert!(equivalence(&ss, &triv, &d.data, 1e-10).pass);
        assert!(!equivalence(&co, &triv, &d.data, 1e-10).pass);
    }

    #[test]
    fn scaled_coaction_fails_inner_product() {
        let g = FiniteGroupoid::pair(2).unwrap();
        let d = dual(&g);
        let mut co = corep_from_rep(&GroupoidRep::trivial(&g), &d).unwrap();
        co.delta = co.delta.scale(c(2.0, 0.0));
        let rep = check_corep_axioms(&co, &d.data, Some(&d.counit), 1e-10);
        let inner = rep.get("inner_product").unwrap();
        assert!(!inner.pass && inner.max_residual > 0.5);
        assert!(inner.witness.is_some());
    }

    #[test]
    fn broken_functoriality_is_detected() {
        let g = FiniteGroupoid::group(&GroupTable::cyclic(3).unwrap());
        let d = dual(&g);
        let r = GroupoidRep::from_fn(&g, vec![1], |x| {
            CMatrix::from_element(1, 1, if x == 1 { c(-1.0, 0.0) } else { one() })
        })
        .unwrap();
        let rep = r.validate(1e-10);
        assert!(!rep.get("functorial").unwrap().pass);
        let co = corep_from_rep(&r, &d).unwrap();
        assert!(!check_corep_axioms(&co, &d.data, Some(&d.counit), 1e-10).get("coassociativity").unwrap().pass);
    }

    #[test]
    fn mismatched_groupoid_is_an_error() {
        let g = FiniteGroupoid::pair(2).unwrap();
        let d = dual(&FiniteGroupoid::pair(3).unwrap());
        assert!(matches!(corep_from_rep(&GroupoidRep::trivial(&g), &d), Err(Error::GroupoidMismatch)));
        let other = dual(&g);
        let co = corep_from_rep(&GroupoidRep::trivial(&g), &other).unwrap();
        assert!(matches!(tensor_coreps(&co, &co, &d.data, DEFAULT_TOL), Err(Error::BaseMismatch(_))));
    }

    #[test]
    fn quantum_check_agrees_on_pair2() {
        let g = FiniteGroupoid::pair(2).unwrap();
        let d = dual(&g);
        let co = corep_from_rep(&GroupoidRep::trivial(&g), &d).unwrap();
        let full = check_corep_axioms(&co, &d.data, Some(&d.counit), 1e-10);
        let q = quantum_corep_check(&co.module, &co.delta, &d.data, 1e-10).unwrap();
        assert_eq!(full.pass(), q.pass());
        let bad = co.delta.scale(c(0.0, 0.0));
        assert!(!quantum_corep_check(&co.module, &bad, &d.data, 1e-10).unwrap().pass());
    }

    #[test]
    fn tensor_with_trivial_is_unit() {
        let g = FiniteGroupoid::pair(3).unwrap();
        let d = dual(&g);
        let t = corep_from_rep(&GroupoidRep::trivial(&g), &d).unwrap();
        let tt = tensor_coreps(&t, &t, &d.data, DEFAULT_TOL).unwrap();
        assert_eq!(tt.dim(), 3);
        assert!(equivalence(&tt, &t, &d.data, 1e-10).pass);
    }
}
