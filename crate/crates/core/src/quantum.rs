//! Compact quantum groupoid data `(A, B, η_s, η_t, Δ, S, P)` and the axiom
//! verifier.
//!
//! The coproduct is given in leg form: for each basis element `e_k` of `A`, a
//! list of pairs `(a′, a″)` with `Δ(e_k) = Σ a′ ⊗ a″`. Every identity between
//! elements of `A ⊗_B A` is checked as an identity between the operators they
//! induce on the fiber tensor `A⁻ ⊗̂_B A⁻`.
//!
//! `A⁻` carries the `B`-valued product `⟨a, c⟩ = L(a* c)` with `L = P∘S`. The
//! Haar map `P` itself is `t`-linear (`P(a η_t(b)) = b P(a)`), which is what the
//! Haar contraction `u ⊗ v ↦ u η_s(P(v))` needs, while the right action
//! `a·b = a η_s(b)` of `A⁻` needs an `s`-linear product map. For groupoid duals
//! `L(δ_x) = w_{s(x)} δ_{s(x)}`; for `B = ℂ`, `L = P` on group algebras.

use rayon::prelude::*;

use crate::algebra::{
    check_multiplicative, is_completely_positive, is_faithful_positive, CStarAlgebra, LinearMap, MapKind,
};
use crate::bimodule::{adjoint_of, associator_from, interior_tensor, localization, HilbertBimodule, TensorProduct};
use crate::error::{Error, Result};
use crate::kernel::{self, CMatrix, CVector, SparseMatrix, SparseVec, C64};
use crate::report::{Check, Residual, VerificationReport};

pub const HAAR_READING_NOTE: &str =
    "Haar axiom read as (id ⊗_B P)∘Δ = η_t∘P, after the canonical identification A ⊗_B B ≅ A";
pub const CYCLIC_NOTE: &str =
    "slice maps (id ⊗_B P) are evaluated on the cyclic vector 1 ⊗ 1 (cyclic-vector evaluation)";
pub const LOCALIZATION_NOTE: &str = "A⁻ carries the B-valued product ⟨a, c⟩ = P(S(a* c))";

/// `Δ(e_k) = Σ a′ ⊗ a″`.
pub type Legs = Vec<(CVector, CVector)>;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGroupoidData {
    pub a: CStarAlgebra,
    pub b: CStarAlgebra,
    pub eta_s: LinearMap,
    pub eta_t: LinearMap,
    pub p: LinearMap,
    pub s: LinearMap,
    pub legs: Vec<Legs>,
}

impl QuantumGroupoidData {
    /// Checks shapes only; the axioms are checked by [`validate_data`].
    pub fn new(
        a: CStarAlgebra,
        b: CStarAlgebra,
        eta_s: LinearMap,
        eta_t: LinearMap,
        p: LinearMap,
        s: LinearMap,
        legs: Vec<Legs>,
    ) -> Result<Self> {
        let fits = |m: &LinearMap, d: &CStarAlgebra, c: &CStarAlgebra| &m.domain == d && &m.codomain == c;
        if !fits(&eta_s, &b, &a) || !fits(&eta_t, &b, &a) {
            return Err(Error::DimensionMismatch("η_s and η_t must map B to A".into()));
        }
        if !fits(&p, &a, &b) {
            return Err(Error::DimensionMismatch("P must map A to B".into()));
        }
        if !fits(&s, &a, &a) {
            return Err(Error::DimensionMismatch("S must map A to A".into()));
        }
        if legs.len() != a.dim() {
            return Err(Error::DimensionMismatch(format!("{} leg lists for dim A = {}", legs.len(), a.dim())));
        }
        for (k, l) in legs.iter().enumerate() {
            for (x, y) in l {
                if x.len() != a.dim() || y.len() != a.dim() {
                    return Err(Error::DimensionMismatch(format!("leg of basis element {k} has the wrong length")));
                }
                if x.iter().chain(y.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::BadParams(format!("leg of basis element {k} is not finite")));
                }
            }
        }
        Ok(Self { a, b, eta_s, eta_t, p, s, legs })
    }

    /// `L = P∘S`, the product map of `A⁻`.
    pub fn inner_product_map(&self) -> LinearMap {
        self.p.compose(&self.s).expect("S maps A to A").with_kind(MapKind::Plain)
    }

    pub fn localization(&self, tol: f64) -> Result<HilbertBimodule> {
        localization(&self.a, &self.inner_product_map(), &self.eta_s, &self.eta_t, tol)
    }

    /// Legs of a general element by linearity.
    pub fn legs_of(&self, x: &CVector) -> Legs {
        let zero = C64::new(0.0, 0.0);
        x.iter()
            .enumerate()
            .filter(|(_, &c)| c != zero)
            .flat_map(|(k, &c)| self.legs[k].iter().map(move |(u, v)| (u * c, v.clone())))
            .collect()
    }

    fn column(m: &LinearMap, k: usize) -> CVector {
        m.matrix.column(k).into_owned()
    }
}

fn observe_vec(res: &mut Residual, x: &CVector, y: &CVector, witness: impl FnOnce() -> String) {
    res.observe((x - y).norm(), x.norm().max(y.norm()), witness);
}

/// Checks every structural requirement on the data, without building modules.
pub fn validate_data(q: &QuantumGroupoidData, tol: f64) -> VerificationReport {
    let (a, b) = (&q.a, &q.b);
    let mut r = VerificationReport::new("structure data", tol);
    r.absorb("eta_s", check_multiplicative(&q.eta_s, false, true, tol));
    r.absorb("eta_t", check_multiplicative(&q.eta_t, true, true, tol));
    for (name, m) in [("eta_s_injective", &q.eta_s), ("eta_t_injective", &q.eta_t)] {
        let rank = kernel::rank(&m.matrix, tol);
        r.push(Check::verdict(
            name,
            rank == b.dim(),
            (b.dim() - rank) as f64,
            1.0,
            Some(format!("rank {rank} < {}", b.dim())),
        ));
    }

    let es: Vec<CVector> = (0..b.dim()).map(|k| QuantumGroupoidData::column(&q.eta_s, k)).collect();
    let et: Vec<CVector> = (0..b.dim()).map(|k| QuantumGroupoidData::column(&q.eta_t, k)).collect();
    let mut comm = Residual::new();
    for (i, x) in es.iter().enumerate() {
        for (j, y) in et.iter().enumerate() {
            observe_vec(&mut comm, &a.mul(x, y), &a.mul(y, x), || format!("η_s(e_{i}), η_t(e_{j})"));
        }
    }
    r.push(Check::from_residual("eta_images_commute", comm, tol));

    let mut c = is_faithful_positive(&q.p, tol);
    c.name = "haar_faithful".into();
    r.push(c);
    let mut c = is_completely_positive(&q.p, tol);
    c.name = "haar_completely_positive".into();
    r.push(c);

    // P(a η_t(b)) = b P(a).
    let pcols: Vec<CVector> = (0..a.dim()).map(|k| QuantumGroupoidData::column(&q.p, k)).collect();
    let mut tlin = Residual::new();
    for i in 0..a.dim() {
        for (beta, y) in et.iter().enumerate() {
            let lhs = q.p.apply(&a.mul(&a.basis(i), y));
            let rhs = b.mul(&b.basis(beta), &pcols[i]);
            observe_vec(&mut tlin, &lhs, &rhs, || format!("a = e_{i}, b = e_{beta}"));
        }
    }
    r.push(Check::from_residual("haar_left_module", tlin, tol));

    let l = q.inner_product_map();
    let mut c = is_faithful_positive(&l, tol);
    c.name = "product_map_faithful".into();
    r.push(c);
    let mut c = is_completely_positive(&l, tol);
    c.name = "product_map_completely_positive".into();
    r.push(c);
    let lcols: Vec<CVector> = (0..a.dim()).map(|k| QuantumGroupoidData::column(&l, k)).collect();
    let mut slin = Residual::new();
    for i in 0..a.dim() {
        for (beta, x) in es.iter().enumerate() {
            let lhs = l.apply(&a.mul(&a.basis(i), x));
            let rhs = b.mul(&lcols[i], &b.basis(beta));
            observe_vec(&mut slin, &lhs, &rhs, || format!("a = e_{i}, b = e_{beta}"));
        }
    }
    r.push(Check::from_residual("product_map_right_module", slin, tol));
    r.push(conditional_expectation(q, &l, tol));

    r.absorb("antipode", check_multiplicative(&q.s, true, false, tol));
    let mut swap = Residual::new();
    for beta in 0..b.dim() {
        observe_vec(&mut swap, &q.s.apply(&es[beta]), &et[beta], || format!("S(η_s(e_{beta}))"));
        observe_vec(&mut swap, &q.s.apply(&et[beta]), &es[beta], || format!("S(η_t(e_{beta}))"));
    }
    r.push(Check::from_residual("antipode_swaps_eta", swap, tol));

    let mut inv = Residual::new();
    for i in 0..a.dim() {
        let x = a.basis(i);
        let once = q.s.apply(&a.star(&x));
        let twice = q.s.apply(&a.star(&once));
        observe_vec(&mut inv, &twice, &x, || format!("basis element {i}"));
    }
    r.push(Check::from_residual("antipode_involution", inv, tol));
    r
}

/// `L(1)` is central and positive definite, so `η_s∘L` is a conditional
/// expectation up to the invertible central factor `L(1)`.
fn conditional_expectation(q: &QuantumGroupoidData, l: &LinearMap, tol: f64) -> Check {
    let b = &q.b;
    let l1 = l.apply(&q.a.unit());
    let mut res = Residual::new();
    for beta in 0..b.dim() {
        let e = b.basis(beta);
        observe_vec(&mut res, &b.mul(&l1, &e), &b.mul(&e, &l1), || format!("L(1) vs e_{beta}"));
    }
    let rep = b.represent(&l1);
    res.observe(kernel::hermiticity_residual(&rep), 1.0, || "L(1) is not hermitian".into());
    if res.value > tol {
        return Check::from_residual("conditional_expectation", res, tol);
    }
    match kernel::hermitian_eigensystem(&rep, tol) {
        Ok(eig) => {
            let threshold = tol * eig.scale();
            Check::verdict(
                "conditional_expectation",
                eig.min() > threshold,
                res.value.max((threshold - eig.min()).max(0.0) / eig.scale()),
                eig.scale(),
                Some(format!("L(1) has eigenvalue {:.6e}", eig.min())),
            )
        }
        Err(e) => Check::failed("conditional_expectation", e.to_string()),
    }
}

/// The fiber tensor `A⁻ ⊗̂_B A⁻` with the leg representations and the
/// coproduct operators of the basis.
#[derive(Clone, Debug)]
pub struct FiberTensor {
    pub localized: HilbertBimodule,
    pub tensor: TensorProduct,
    pub phi1: Vec<SparseMatrix>,
    pub phi2: Vec<SparseMatrix>,
    /// `Δ(e_k)` as operators.
    pub delta: Vec<SparseMatrix>,
    pub cyclic_vector: CVector,
    pub report: VerificationReport,
}

impl FiberTensor {
    pub fn module(&self) -> &HilbertBimodule {
        &self.tensor.module
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn phi1_of(&self, x: &CVector) -> SparseMatrix {
        SparseMatrix::combination(&self.phi1, x.as_slice(), self.dim(), self.dim())
    }

    pub fn phi2_of(&self, x: &CVector) -> SparseMatrix {
        SparseMatrix::combination(&self.phi2, x.as_slice(), self.dim(), self.dim())
    }

    /// `Σ φ¹(a′) φ²(a″)`.
    pub fn leg_operator(&self, legs: &[(CVector, CVector)]) -> SparseMatrix {
        let mut trip = Vec::new();
        for (x, y) in legs {
            let t = self.phi1_of(x).mul(&self.phi2_of(y));
            trip.extend(t.triplets());
        }
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    /// `Δ(x)` for a general element, by linearity over the basis operators.
    pub fn delta_of(&self, x: &CVector) -> SparseMatrix {
        SparseMatrix::combination(&self.delta, x.as_slice(), self.dim(), self.dim())
    }
}

pub fn build_fiber_tensor(q: &QuantumGroupoidData, tol: f64) -> Result<FiberTensor> {
    let loc = q.localization(tol)?;
    let tp = interior_tensor(&loc, &loc, tol)?;
    let a = &q.a;
    let da = a.dim();
    let id = SparseMatrix::identity(da);
    let lm: Vec<SparseMatrix> = (0..da).map(|i| a.left_mult(&a.basis(i))).collect();
    let raw1: Vec<SparseMatrix> = lm.iter().map(|l| l.kron(&id)).collect();
    let raw2: Vec<SparseMatrix> = lm.iter().map(|l| id.kron(l)).collect();
    let phi1: Vec<SparseMatrix> = raw1.par_iter().map(|t| tp.compress(t)).collect();
    let phi2: Vec<SparseMatrix> = raw2.par_iter().map(|t| tp.compress(t)).collect();
    let dim = tp.dim();
    let mut report = VerificationReport::new("fiber tensor", tol);
    report.absorb("tensor", tp.diagnostics.clone());

    let mut descent = Residual::new();
    for (k, (r1, r2)) in raw1.iter().zip(&raw2).enumerate() {
        let (abs, scale) = tp.descent_residual(r1);
        descent.observe(abs, scale, || format!("φ¹(e_{k})"));
        let (abs, scale) = tp.descent_residual(r2);
        descent.observe(abs, scale, || format!("φ²(e_{k})"));
    }
    report.push(Check::from_residual("phi_descend", descent, tol));

    let mut adj = Residual::new();
    for (which, ops) in [("φ¹", &phi1), ("φ²", &phi2)] {
        for k in 0..da {
            let op = adjoint_of(&ops[k], &tp.module, tol)?;
            let (abs, scale) = kernel::sparse_residual(&op.adjoint_matrix, &ops[a.basis_star(k)]);
            adj.observe(abs, scale, || format!("{which}(e_{k})* vs {which}(e_{k}*)"));
        }
    }
    report.push(Check::from_residual("phi_star_preserving", adj, tol));

    let mut hom = Residual::new();
    for (which, ops) in [("φ¹", &phi1), ("φ²", &phi2)] {
        for i in 0..da {
            for j in 0..da {
                let lhs = match a.basis_product(i, j) {
                    Some(k) => ops[k].clone(),
                    None => SparseMatrix::zeros(dim, dim),
                };
                let (abs, scale) = kernel::sparse_residual(&lhs, &ops[i].mul(&ops[j]));
                hom.observe(abs, scale, || format!("{which}(e_{i} e_{j})"));
            }
        }
        let unit = SparseMatrix::combination(ops, a.unit().as_slice(), dim, dim);
        let (abs, scale) = kernel::sparse_residual(&unit, &SparseMatrix::identity(dim));
        hom.observe(abs, scale, || format!("{which}(1)"));
    }
    report.push(Check::from_residual("phi_multiplicative", hom, tol));

    let mut comm = Residual::new();
    for i in 0..da {
        for j in 0..da {
            let (abs, scale) = kernel::sparse_residual(&phi1[i].mul(&phi2[j]), &phi2[j].mul(&phi1[i]));
            comm.observe(abs, scale, || format!("[φ¹(e_{i}), φ²(e_{j})]"));
        }
    }
    report.push(Check::from_residual("phi_commute", comm, tol));

    let cyclic_vector = tp.elementary(&a.unit(), &a.unit());
    let mut ft = FiberTensor { localized: loc, tensor: tp, phi1, phi2, delta: vec![], cyclic_vector, report };
    ft.delta = q.legs.par_iter().map(|l| ft.leg_operator(l)).collect();
    Ok(ft)
}

/// The operator algebra generated by `φ¹(A)` and `φ²(A)`.
#[derive(Clone, Debug)]
pub struct GeneratedAlgebra {
    pub dim: usize,
    /// Orthonormal in the Hilbert–Schmidt inner product.
    pub basis: Vec<SparseMatrix>,
    /// Longest word length that still produced a new direction.
    pub word_length: usize,
}

pub fn generated_algebra(f: &FiberTensor, tol: f64) -> Result<GeneratedAlgebra> {
    let dim = f.dim();
    let cap = (dim * dim).max(1);
    let keep_rel = tol.sqrt().min(1e-4);
    let gens: Vec<&SparseMatrix> = f.phi1.iter().chain(&f.phi2).filter(|g| g.nnz() > 0).collect();

    let mut span = Span::new(dim * dim, keep_rel);
    let mut basis: Vec<SparseMatrix> = Vec::new();
    let mut frontier = vec![SparseMatrix::identity(dim)];
    if let Some(v) = span.insert(SparseVec::from_matrix(&frontier[0])) {
        basis.push(sparse_from_vec(&v, dim));
    }
    let mut length = 0;
    let mut last_new = 0;
    loop {
        length += 1;
        if length > cap {
            return Err(Error::WordCapExceeded { cap });
        }
        let products: Vec<SparseMatrix> = frontier.iter().flat_map(|w| gens.iter().map(move |g| w.mul(g))).collect();
        let mut next = Vec::new();
        for p in products {
            if let Some(v) = span.insert(SparseVec::from_matrix(&p)) {
                let m = sparse_from_vec(&v, dim);
                basis.push(m.clone());
                next.push(m);
            }
        }
        if next.is_empty() {
            break;
        }
        last_new = length;
        frontier = next;
    }
    Ok(GeneratedAlgebra { dim: basis.len(), basis, word_length: last_new })
}

/// Orthonormal set of sparse vectors with an index from coordinates to the
/// vectors supported there, so projections only touch overlapping vectors.
struct Span {
    vecs: Vec<SparseVec>,
    by_coord: Vec<Vec<usize>>,
    keep_rel: f64,
}

impl Span {
    fn new(len: usize, keep_rel: f64) -> Self {
        Self { vecs: Vec::new(), by_coord: vec![Vec::new(); len], keep_rel }
    }

    fn overlapping(&self, v: &SparseVec) -> Vec<usize> {
        let mut ids: Vec<usize> = v.entries.iter().flat_map(|&(i, _)| self.by_coord[i].iter().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Classical Gram–Schmidt with one reorthogonalization. Returns the new
    /// unit vector when `v` is not already in the span.
    fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let n0 = v.norm();
        if n0 == 0.0 {
            return None;
        }
        let drop = 1e-15 * n0;
        let mut v = v;
        for _ in 0..2 {
            let coeffs: Vec<(usize, C64)> =
                self.overlapping(&v).into_iter().map(|k| (k, self.vecs[k].dot(&v))).collect();
            for (k, c) in coeffs {
                if c.norm() > 0.0 {
                    v = v.sub_scaled(c, &self.vecs[k], drop);
                }
            }
        }
        let n = v.norm();
        if n <= self.keep_rel * n0 {
            return None;
        }
        let v = v.scaled(1.0 / n);
        let id = self.vecs.len();
        for &(i, _) in &v.entries {
            self.by_coord[i].push(id);
        }
        self.vecs.push(v.clone());
        Some(v)
    }
}

fn sparse_from_vec(v: &SparseVec, dim: usize) -> SparseMatrix {
    SparseMatrix::from_triplets(dim, dim, v.entries.iter().map(|&(i, x)| (i / dim, i % dim, x)))
}

/// Rank of `T ↦ T(1 ⊗ 1)` on the generated algebra.
pub fn cyclic_rank(f: &FiberTensor, g: &GeneratedAlgebra, tol: f64) -> usize {
    let cols: Vec<CVector> = g.basis.iter().map(|t| t.mul_dvec(&f.cyclic_vector)).collect();
    if cols.is_empty() {
        return 0;
    }
    kernel::rank(&CMatrix::from_columns(&cols), tol)
}

/// Δ unital, multiplicative, `*`-preserving and a bimodule map.
pub fn check_delta_structure(q: &QuantumGroupoidData, f: &FiberTensor, tol: f64) -> VerificationReport {
    let a = &q.a;
    let dim = f.dim();
    let mut r = VerificationReport::new("coproduct", tol);

    let mut unit = Residual::new();
    let (abs, scale) = kernel::sparse_residual(&f.delta_of(&a.unit()), &SparseMatrix::identity(dim));
    unit.observe(abs, scale, || "Δ(1)".into());
    r.push(Check::from_residual("unital", unit, tol));

    let pairs: Vec<(usize, usize)> = (0..a.dim()).flat_map(|i| (0..a.dim()).map(move |j| (i, j))).collect();
    let mult: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let lhs = match a.basis_product(i, j) {
                Some(k) => f.delta[k].clone(),
                None => SparseMatrix::zeros(dim, dim),
            };
            kernel::sparse_residual(&lhs, &f.delta[i].mul(&f.delta[j]))
        })
        .collect();
    let mut res = Residual::new();
    for (&(i, j), &(abs, scale)) in pairs.iter().zip(&mult) {
        res.observe(abs, scale, || format!("Δ(e_{i} e_{j})"));
    }
    r.push(Check::from_residual("multiplicative", res, tol));

    let mut star = Residual::new();
    for k in 0..a.dim() {
        match adjoint_of(&f.delta[k], f.module(), tol) {
            Ok(op) => {
                let (abs, scale) = kernel::sparse_residual(&op.adjoint_matrix, &f.delta[a.basis_star(k)]);
                star.observe(abs, scale, || format!("Δ(e_{k})* vs Δ(e_{k}*)"));
            }
            Err(_) => star.observe(f64::INFINITY, 1.0, || format!("Δ(e_{k}) is not adjointable")),
        }
    }
    r.push(Check::from_residual("star_preserving", star, tol));

    for (name, on_first) in [("bimodule_morphism_target", true), ("bimodule_morphism_source", false)] {
        let eta = if on_first { &q.eta_t } else { &q.eta_s };
        let jobs: Vec<(usize, usize)> = (0..a.dim()).flat_map(|i| (0..q.b.dim()).map(move |b| (i, b))).collect();
        let out: Vec<(f64, f64)> = jobs
            .par_iter()
            .map(|&(i, beta)| {
                let y = eta.matrix.column(beta).into_owned();
                let lhs = f.delta_of(&a.mul(&a.basis(i), &y));
                let legs: Legs = q.legs[i]
                    .iter()
                    .map(|(u, v)| if on_first { (a.mul(u, &y), v.clone()) } else { (u.clone(), a.mul(v, &y)) })
                    .collect();
                kernel::sparse_residual(&lhs, &f.leg_operator(&legs))
            })
            .collect();
        let mut res = Residual::new();
        for (&(i, beta), &(abs, scale)) in jobs.iter().zip(&out) {
            res.observe(abs, scale, || format!("a = e_{i}, b = e_{beta}"));
        }
        r.push(Check::from_residual(name, res, tol));
    }
    r
}

/// `(Δ ⊗ id)∘Δ = (id ⊗ Δ)∘Δ` on the triple module, through the associator.
pub fn check_coassociativity(q: &QuantumGroupoidData, f: &FiberTensor, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new("coassociativity", tol);
    let loc = &f.localized;
    let ass = match associator_from(loc, loc, f.tensor.clone(), f.tensor.clone(), tol) {
        Ok(x) => x,
        Err(e) => {
            r.push(Check::failed("coassociativity", format!("associator: {e}")));
            return r;
        }
    };
    r.absorb("associator", ass.report.clone());
    let a = &q.a;
    let lm: Vec<SparseMatrix> = (0..a.dim()).map(|i| a.left_mult(&a.basis(i))).collect();
    let left_of = |x: &CVector| SparseMatrix::combination(&lm, x.as_slice(), a.dim(), a.dim());

    let out: Vec<(f64, f64)> = (0..a.dim())
        .into_par_iter()
        .map(|k| {
            let mut xl = Vec::new();
            let mut yr = Vec::new();
            for (u, v) in &q.legs[k] {
                xl.extend(ass.left_assoc.compress(&f.delta_of(u).kron(&left_of(v))).triplets());
                yr.extend(ass.right_assoc.compress(&left_of(u).kron(&f.delta_of(v))).triplets());
            }
            let (dl, dr) = (ass.left_assoc.dim(), ass.right_assoc.dim());
            let xl = SparseMatrix::from_triplets(dl, dl, xl);
            let yr = SparseMatrix::from_triplets(dr, dr, yr);
            kernel::sparse_residual(&xl, &ass.backward.mul(&yr).mul(&ass.forward))
        })
        .collect();
    let mut res = Residual::new();
    for (k, &(abs, scale)) in out.iter().enumerate() {
        res.observe(abs, scale, || format!("basis element {k}"));
    }
    r.push(Check::from_residual("coassociativity", res, tol));
    r
}

/// Haar contraction `C_P(u ⊗ v) = u η_s(P(v))` on the raw space `A ⊗ A`.
fn haar_contraction(q: &QuantumGroupoidData) -> SparseMatrix {
    let a = &q.a;
    let da = a.dim();
    let mut trip = Vec::new();
    for j in 0..da {
        let w = q.eta_s.apply(&q.p.matrix.column(j).into_owned());
        for i in 0..da {
            let col = a.mul(&a.basis(i), &w);
            for (row, &x) in col.iter().enumerate() {
                if x != C64::new(0.0, 0.0) {
                    trip.push((row, i * da + j, x));
                }
            }
        }
    }
    SparseMatrix::from_triplets(da, da * da, trip)
}

/// `(id ⊗_B P)(Δ(a)) (1 ⊗ 1) = η_t(P(a))`, plus well-definedness of the
/// contraction on the quotient.
pub fn check_haar(q: &QuantumGroupoidData, f: &FiberTensor, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new("Haar", tol);
    r.note(HAAR_READING_NOTE);
    let a = &q.a;
    let da = a.dim();
    let cp = haar_contraction(q);

    let mut haar = Residual::new();
    for k in 0..da {
        let v = f.delta[k].mul_dvec(&f.cyclic_vector);
        let raw = f.tensor.embed.mul_dvec(&v);
        let lhs = cp.mul_dvec(&raw);
        let rhs = q.eta_t.apply(&q.p.apply(&a.basis(k)));
        observe_vec(&mut haar, &lhs, &rhs, || format!("basis element {k}"));
    }
    r.push(Check::from_residual("haar", haar, tol));

    let mut descends = Residual::new();
    let through = cp.mul(&f.tensor.embed).mul(&f.tensor.project);
    let (abs, scale) = kernel::sparse_residual(&cp, &through);
    descends.observe(abs, scale, || "contraction on the null space".into());
    r.push(Check::from_residual("contraction_descends", descends, tol));

    let cp_dense = cp.to_dense();
    let contract = |u: &CVector, v: &CVector| {
        let mut out = CVector::zeros(da);
        for (i, &ui) in u.iter().enumerate().filter(|(_, z)| z.norm() > 0.0) {
            for (j, &vj) in v.iter().enumerate().filter(|(_, z)| z.norm() > 0.0) {
                out += cp_dense.column(i * da + j) * (ui * vj);
            }
        }
        out
    };
    let mut balanced = Residual::new();
    for beta in 0..q.b.dim() {
        let ys = q.eta_s.matrix.column(beta).into_owned();
        let yt = q.eta_t.matrix.column(beta).into_owned();
        for i in 0..da {
            let left = a.mul(&a.basis(i), &ys);
            for j in 0..da {
                let right = a.mul(&a.basis(j), &yt);
                let x = contract(&left, &a.basis(j));
                let y = contract(&a.basis(i), &right);
                observe_vec(&mut balanced, &x, &y, || format!("u = e_{i}, v = e_{j}, b = e_{beta}"));
            }
        }
    }
    r.push(Check::from_residual("contraction_balanced", balanced, tol));
    r
}

/// `τ∘(S ⊗ S)∘Δ = Δ∘S`, and `(S∘*)² = id` on the leg representation.
pub fn check_coinverse(q: &QuantumGroupoidData, f: &FiberTensor, tol: f64) -> VerificationReport {
    let mut r = VerificationReport::new("coinverse", tol);
    let a = &q.a;
    let out: Vec<(f64, f64)> = (0..a.dim())
        .into_par_iter()
        .map(|k| {
            let flipped: Legs = q.legs[k].iter().map(|(u, v)| (q.s.apply(v), q.s.apply(u))).collect();
            let lhs = f.leg_operator(&flipped);
            let rhs = f.delta_of(&q.s.apply(&a.basis(k)));
            kernel::sparse_residual(&lhs, &rhs)
        })
        .collect();
    let mut res = Residual::new();
    for (k, &(abs, scale)) in out.iter().enumerate() {
        res.observe(abs, scale, || format!("basis element {k}"));
    }
    r.push(Check::from_residual("coinverse", res, tol));

    let mut inv = Residual::new();
    for k in 0..a.dim() {
        let once = q.s.apply(&a.star(&a.basis(k)));
        let twice = q.s.apply(&a.star(&once));
        let (abs, scale) = kernel::sparse_residual(&f.phi1_of(&twice), &f.phi1[k]);
        inv.observe(abs, scale, || format!("φ¹((S∘*)²(e_{k}))"));
    }
    r.push(Check::from_residual("antipode_involution", inv, tol));
    r
}

/// Runs the complete axiom suite.
pub fn verify_all(q: &QuantumGroupoidData, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("compact quantum groupoid", tol);
    report.note(HAAR_READING_NOTE);
    report.note(CYCLIC_NOTE);
    report.note(LOCALIZATION_NOTE);
    report.absorb("data", validate_data(q, tol));
    let fiber = match build_fiber_tensor(q, tol) {
        Ok(f) => f,
        Err(e) => {
            report.push(Check::failed("fiber.build", e.to_string()));
            return report;
        }
    };
    report.absorb("fiber", fiber.report.clone());
    match generated_algebra(&fiber, tol) {
        Ok(g) => {
            report.note(format!("fiber tensor dimension {}", fiber.dim()));
            report
                .note(format!("generated algebra dimension {}, stable after words of length {}", g.dim, g.word_length));
            let rank = cyclic_rank(&fiber, &g, tol);
            if rank < g.dim {
                report.warn(format!(
                    "evaluation on 1 ⊗ 1 is not injective on the generated algebra (rank {rank} < {})",
                    g.dim
                ));
            }
        }
        Err(e) => report.push(Check::failed("fiber.generated_algebra", e.to_string())),
    }
    report.absorb("delta", check_delta_structure(q, &fiber, tol));
    report.absorb("coassociativity", check_coassociativity(q, &fiber, tol));
    report.absorb("haar", check_haar(q, &fiber, tol));
    report.absorb("coinverse", check_coinverse(q, &fiber, tol));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{c, one, DEFAULT_TOL};

    /// Group algebra of ℤ/2 in its character basis `p± = (e ± g)/2`.
    fn z2_bundle() -> QuantumGroupoidData {
        let a = CStarAlgebra::commutative(2, "C[Z2]").unwrap();
        let b = CStarAlgebra::complex();
        let unit =
            LinearMap::new(b.clone(), a.clone(), CMatrix::from_column_slice(2, 1, &[one(), one()]), MapKind::Hom)
                .unwrap();
        let h = LinearMap::new(
            a.clone(),
            b.clone(),
            CMatrix::from_row_slice(1, 2, &[c(0.5, 0.0), c(0.5, 0.0)]),
            MapKind::Plain,
        )
        .unwrap();
        let s = LinearMap::identity(&a).with_kind(MapKind::Antihom);
        let (pp, pm) = (a.basis(0), a.basis(1));
        let legs = vec![
            vec![(pp.clone(), pp.clone()), (pm.clone(), pm.clone())],
            vec![(pp.clone(), pm.clone()), (pm.clone(), pp.clone())],
        ];
        QuantumGroupoidData::new(a, b, unit.clone(), unit.with_kind(MapKind::Antihom), h, s, legs).unwrap()
    }

    #[test]
    fn z2_group_algebra_passes() {
        let q = z2_bundle();
        assert!(validate_data(&q, DEFAULT_TOL).pass());
        let f = build_fiber_tensor(&q, DEFAULT_TOL).unwrap();
        assert_eq!(f.dim(), 4);
        let g = generated_algebra(&f, DEFAULT_TOL).unwrap();
        assert_eq!(g.dim, 4);
        let r = verify_all(&q, DEFAULT_TOL);
        assert!(r.pass(), "{:#?}", r.failing().collect::<Vec<_>>());
        assert!(r.max_residual() < 1e-12);
    }

    #[test]
    fn dropped_leg_breaks_coassociativity() {
        // Δ(p₋) = p₊ ⊗ p₋ alone: (Δ⊗id)Δ(p₋) picks up p₋ ⊗ p₋ ⊗ p₋, the other side does not.
        let mut q = z2_bundle();
        q.legs[1].pop();
        let r = verify_all(&q, DEFAULT_TOL);
        assert!(!r.get("coassociativity").unwrap().pass);
    }

    #[test]
    fn non_faithful_haar_is_rejected() {
        let mut q = z2_bundle();
        q.p.matrix = CMatrix::from_row_slice(1, 2, &[one(), c(0.0, 0.0)]);
        let r = verify_all(&q, DEFAULT_TOL);
        assert!(!r.get("haar_faithful").unwrap().pass);
        assert!(!r.pass());
    }
}
