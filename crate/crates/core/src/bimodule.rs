//! Finite-dimensional Hilbert C*-bimodules.
//!
//! A bimodule is a complex vector space `ℂ^m` with sparse action matrices for
//! the basis of each algebra and an algebra-valued Gram tensor: `gram[α]` holds
//! the `e_α` coefficient of `⟨v_i, v_j⟩`, so `⟨u, v⟩ = Σ_α (u^H G_α v) e_α`.

use rayon::prelude::*;

use crate::algebra::{scalar_gram, CStarAlgebra, LinearMap};
use crate::error::{Error, Result};
use crate::kernel::{self, one, CMatrix, CVector, SparseMatrix, SparseVec, C64};
use crate::report::{Check, Residual, VerificationReport};

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertBimodule {
    pub label: String,
    left: CStarAlgebra,
    right: CStarAlgebra,
    dim: usize,
    left_action: Vec<SparseMatrix>,
    right_action: Vec<SparseMatrix>,
    gram: Vec<SparseMatrix>,
}

impl HilbertBimodule {
    /// Assembles a bimodule; only shapes are checked. Use [`validate`](Self::validate)
    /// for the axioms.
    pub fn new(
        label: impl Into<String>,
        left: CStarAlgebra,
        right: CStarAlgebra,
        dim: usize,
        left_action: Vec<SparseMatrix>,
        right_action: Vec<SparseMatrix>,
        gram: Vec<SparseMatrix>,
    ) -> Result<Self> {
        if left_action.len() != left.dim() || right_action.len() != right.dim() || gram.len() != right.dim() {
            return Err(Error::DimensionMismatch("action or Gram count does not match algebra dimension".into()));
        }
        if left_action.iter().chain(&right_action).chain(&gram).any(|m| m.shape() != (dim, dim)) {
            return Err(Error::DimensionMismatch(format!("module operators must be {dim}x{dim}")));
        }
        if left_action.iter().chain(&right_action).chain(&gram).any(|m| !m.is_finite()) {
            return Err(Error::BadParams("non-finite module data".into()));
        }
        Ok(Self { label: label.into(), left, right, dim, left_action, right_action, gram })
    }

    /// Hilbert space `ℂ^m` with the given positive Gram, as a `ℂ–ℂ` bimodule.
    pub fn hilbert_space(gram: &CMatrix) -> Result<Self> {
        let m = gram.nrows();
        let c = CStarAlgebra::complex();
        let id = SparseMatrix::identity(m);
        Self::new(format!("C^{m}"), c.clone(), c, m, vec![id.clone()], vec![id], vec![SparseMatrix::from_dense(gram)])
    }

    pub fn left_algebra(&self) -> &CStarAlgebra {
        &self.left
    }

    pub fn right_algebra(&self) -> &CStarAlgebra {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left_action(&self) -> &[SparseMatrix] {
        &self.left_action
    }

    pub fn right_action(&self) -> &[SparseMatrix] {
        &self.right_action
    }

    pub fn gram(&self) -> &[SparseMatrix] {
        &self.gram
    }

    /// Operator of `v ↦ a·v` for an element given in coordinates.
    pub fn left_operator(&self, a: &CVector) -> SparseMatrix {
        combine(&self.left_action, a, self.dim)
    }

    /// Operator of `v ↦ v·b`.
    pub fn right_operator(&self, b: &CVector) -> SparseMatrix {
        combine(&self.right_action, b, self.dim)
    }

    /// `⟨u, v⟩` in coordinates of the right algebra.
    pub fn inner(&self, u: &CVector, v: &CVector) -> CVector {
        let (u, v) = (u.as_slice(), v.as_slice());
        CVector::from_iterator(self.right.dim(), self.gram.iter().map(|g| g.form(u, v)))
    }

    /// Module norm `‖v‖ = ‖⟨v, v⟩‖^{1/2}`.
    pub fn norm(&self, v: &CVector) -> f64 {
        self.right.norm(&self.inner(v, v)).sqrt()
    }

    /// Flattened scalar Gram `Σ_{α diagonal} G_α` (trace of the faithful representation).
    pub fn flat_gram(&self) -> SparseMatrix {
        flatten(&self.right, &self.gram, self.dim)
    }

    /// Checks every structural axiom of a Hilbert bimodule.
    pub fn validate(&self, tol: f64) -> VerificationReport {
        let mut report = VerificationReport::new(format!("bimodule {}", self.label), tol);
        let (l, r) = (&self.left, &self.right);

        let mut herm = Residual::new();
        for a in 0..r.dim() {
            let (abs, scale) = kernel::sparse_residual(&self.gram[r.basis_star(a)], &self.gram[a].adjoint());
            herm.observe(abs, scale, || format!("Gram coefficient {a}"));
        }
        report.push(Check::from_residual("gram_hermitian", herm, tol));
        report.push(form_positivity(r, &self.gram, self.dim, tol));

        let mut compat = Residual::new();
        for b in 0..r.dim() {
            for g in 0..r.dim() {
                let lhs = self.gram[g].mul(&self.right_action[b]);
                let mut rhs = SparseMatrix::zeros(self.dim, self.dim);
                for a in 0..r.dim() {
                    if r.basis_product(a, b) == Some(g) {
                        rhs = rhs.add(&self.gram[a]);
                    }
                }
                let (abs, scale) = kernel::sparse_residual(&lhs, &rhs);
                compat.observe(abs, scale, || format!("right basis {b}, Gram coefficient {g}"));
            }
        }
        report.push(Check::from_residual("right_compatibility", compat, tol));

        report.push(action_law(r, &self.right_action, self.dim, true, "right_action_law", tol));
        report.push(action_law(l, &self.left_action, self.dim, false, "left_action_law", tol));

        let mut adj = Residual::new();
        for a in 0..l.dim() {
            let la = &self.left_action[a];
            let la_star = &self.left_action[l.basis_star(a)];
            for (g, gm) in self.gram.iter().enumerate() {
                let (abs, scale) = kernel::sparse_residual(&la.adjoint().mul(gm), &gm.mul(la_star));
                adj.observe(abs, scale, || format!("left basis {a}, Gram coefficient {g}"));
            }
        }
        report.push(Check::from_residual("left_action_adjointable", adj, tol));

        let mut comm = Residual::new();
        for a in 0..l.dim() {
            for b in 0..r.dim() {
                let x = self.left_action[a].mul(&self.right_action[b]);
                let y = self.right_action[b].mul(&self.left_action[a]);
                let (abs, scale) = kernel::sparse_residual(&x, &y);
                comm.observe(abs, scale, || format!("left basis {a}, right basis {b}"));
            }
        }
        report.push(Check::from_residual("actions_commute", comm, tol));
        report
    }

    /// Full module: the Gram coefficients span the right algebra.
    pub fn is_full(&self, tol: f64) -> bool {
        let rows: Vec<SparseVec> = self.gram.iter().map(SparseVec::from_matrix).collect();
        let k = rows.len();
        let mut g = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                g[(i, j)] = rows[i].dot(&rows[j]);
            }
        }
        kernel::rank(&g, tol) == self.right.dim()
    }
}

fn combine(ops: &[SparseMatrix], coeffs: &CVector, dim: usize) -> SparseMatrix {
    SparseMatrix::combination(ops, coeffs.as_slice(), dim, dim)
}

fn flatten(r: &CStarAlgebra, gram: &[SparseMatrix], dim: usize) -> SparseMatrix {
    let mut f = SparseMatrix::zeros(dim, dim);
    for (a, g) in gram.iter().enumerate() {
        if r.is_diagonal_unit(a) {
            f = f.add(g);
        }
    }
    f
}

/// `T_{ab} = T_a T_b` (left) or `T_{ab} = T_b T_a` (right), plus unitality.
fn action_law(alg: &CStarAlgebra, ops: &[SparseMatrix], dim: usize, right: bool, name: &str, tol: f64) -> Check {
    let mut res = Residual::new();
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            let lhs = match alg.basis_product(a, b) {
                Some(k) => ops[k].clone(),
                None => SparseMatrix::zeros(dim, dim),
            };
            let rhs = if right { ops[b].mul(&ops[a]) } else { ops[a].mul(&ops[b]) };
            let (abs, scale) = kernel::sparse_residual(&lhs, &rhs);
            res.observe(abs, scale, || format!("basis pair ({a},{b})"));
        }
    }
    let unit = combine(ops, &alg.unit(), dim);
    let (abs, scale) = kernel::sparse_residual(&unit, &SparseMatrix::identity(dim));
    res.observe(abs, scale, || "unit".into());
    Check::from_residual(name, res, tol)
}

/// Connected components of the union sparsity pattern of `mats`, restricted
/// to `keep`. Components are ordered by their smallest index.
fn components(mats: &[SparseMatrix], keep: &[usize], dim: usize) -> Vec<Vec<usize>> {
    let mut slot = vec![usize::MAX; dim];
    for (k, &i) in keep.iter().enumerate() {
        slot[i] = k;
    }
    let mut parent: Vec<usize> = (0..keep.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for m in mats {
        for (i, j, _) in m.triplets() {
            let (a, b) = (slot[i], slot[j]);
            if a == usize::MAX || b == usize::MAX {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; keep.len()];
    for k in 0..keep.len() {
        let r = find(&mut parent, k);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(keep[k]);
    }
    groups
}

/// Block matrix `Σ_α G_α[comp] ⊗ ρ(e_α)` restricted to one component.
fn full_form_block(r: &CStarAlgebra, gram: &[SparseMatrix], comp: &[usize], reps: &[CMatrix]) -> CMatrix {
    let n = r.rep_dim();
    let k = comp.len();
    let mut out = CMatrix::zeros(k * n, k * n);
    for (a, g) in gram.iter().enumerate() {
        if g.nnz() == 0 {
            continue;
        }
        let block = g.dense_block(comp, comp);
        for i in 0..k {
            for j in 0..k {
                let c = block[(i, j)];
                if c != C64::new(0.0, 0.0) {
                    let mut view = out.view_mut((i * n, j * n), (n, n));
                    view += &reps[a] * c;
                }
            }
        }
    }
    out
}

/// Orthogonal decomposition of a PSD algebra-valued form into its null space
/// and a representative basis of the quotient.
struct Quotient {
    embed: SparseMatrix,
    values: Vec<f64>,
}

fn quotient(r: &CStarAlgebra, gram: &[SparseMatrix], dim: usize, tol: f64) -> Result<Quotient> {
    let flat = flatten(r, gram, dim);
    let diag: Vec<f64> = (0..dim).map(|i| flat.get(i, i).re).collect();
    let diag_scale = diag.iter().cloned().fold(1.0, f64::max);
    let tiny = tol * diag_scale;
    let row_max = |i: usize| gram.iter().flat_map(|g| g.row(i).map(|(_, v)| v.norm())).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..dim).filter(|&i| diag[i] > tiny || row_max(i) > tiny).collect();
    if let Some(&i) = keep.iter().find(|&&i| diag[i] < -tiny) {
        return Err(Error::FormNotPsd { min_eigenvalue: diag[i] });
    }
    let comps = components(gram, &keep, dim);
    let reps: Vec<CMatrix> = (0..r.dim()).map(|a| r.represent(&r.basis(a))).collect();

    let solved: Vec<Result<(Vec<usize>, kernel::Eigensystem, f64)>> = comps
        .par_iter()
        .map(|comp| {
            let block = flat.dense_block(comp, comp);
            let eig = kernel::hermitian_eigensystem(&block, tol).map_err(|e| match e {
                Error::NotHermitian { residual } => Error::FormNotPsd { min_eigenvalue: -residual },
                other => other,
            })?;
            let full_min = if r.rep_dim() == 1 {
                eig.min()
            } else {
                let full = full_form_block(r, gram, comp, &reps);
                kernel::hermitian_eigensystem(&full, tol)?.min()
            };
            Ok((comp.clone(), eig, full_min))
        })
        .collect();

    let mut parts = Vec::with_capacity(solved.len());
    for s in solved {
        parts.push(s?);
    }
    let scale = parts.iter().map(|(_, e, _)| e.spectral_radius()).fold(1.0, f64::max);
    let threshold = tol * scale;
    let mut trip = Vec::new();
    let mut values = Vec::new();
    for (comp, eig, full_min) in &parts {
        let worst = eig.min().min(*full_min);
        if worst < -threshold {
            return Err(Error::FormNotPsd { min_eigenvalue: worst });
        }
        for (k, &lambda) in eig.values.iter().enumerate() {
            if lambda <= threshold {
                continue;
            }
            let col = values.len();
            for (p, &i) in comp.iter().enumerate() {
                let v = eig.vectors[(p, k)];
                if v.norm() > 1e-15 {
                    trip.push((i, col, v));
                }
            }
            values.push(lambda);
        }
    }
    Ok(Quotient { embed: SparseMatrix::from_triplets(dim, values.len(), trip), values })
}

/// Full-form positivity check used by [`HilbertBimodule::validate`].
fn form_positivity(r: &CStarAlgebra, gram: &[SparseMatrix], dim: usize, tol: f64) -> Check {
    match quotient(r, gram, dim, tol) {
        Ok(q) => {
            let deficit = dim - q.values.len();
            let scale = q.values.iter().cloned().fold(1.0, f64::max);
            Check::verdict(
                "form_positive_definite",
                deficit == 0,
                deficit as f64,
                scale,
                Some(format!("flattened Gram has a {deficit}-dimensional null space")),
            )
        }
        Err(Error::FormNotPsd { min_eigenvalue }) => Check::verdict(
            "form_positive_definite",
            false,
            -min_eigenvalue,
            1.0,
            Some(format!("form has eigenvalue {min_eigenvalue:.6e}")),
        ),
        Err(e) => Check::failed("form_positive_definite", e.to_string()),
    }
}

/// `E = B` with multiplication actions and `⟨x, y⟩ = x* y`.
pub fn canonical_over_self(b: &CStarAlgebra) -> HilbertBimodule {
    let d = b.dim();
    let left = (0..d).map(|a| b.left_mult(&b.basis(a))).collect();
    let right = (0..d).map(|a| b.right_mult(&b.basis(a))).collect();
    let mut trip: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); d];
    for i in 0..d {
        for j in 0..d {
            if let Some(k) = b.basis_product(b.basis_star(i), j) {
                trip[k].push((i, j, one()));
            }
        }
    }
    let gram = trip.into_iter().map(|t| SparseMatrix::from_triplets(d, d, t)).collect();
    HilbertBimodule::new(format!("{} over itself", b.label()), b.clone(), b.clone(), d, left, right, gram)
        .expect("canonical module shapes")
}

/// The localized module `A⁻` over `B`: space `A`, `⟨a, c⟩ = L(a* c)`,
/// right action `a·b = a η_s(b)` and left action `b·a = a η_t(b)`.
pub fn localization(
    a: &CStarAlgebra,
    ip: &LinearMap,
    eta_s: &LinearMap,
    eta_t: &LinearMap,
    tol: f64,
) -> Result<HilbertBimodule> {
    let b = &ip.codomain;
    if &ip.domain != a || &eta_s.codomain != a || &eta_t.codomain != a || &eta_s.domain != b || &eta_t.domain != b {
        return Err(Error::AlgebraMismatch("localization maps do not fit A and B".into()));
    }
    let eig = kernel::hermitian_eigensystem(&scalar_gram(ip), tol.max(1e-12)).map_err(|e| match e {
        Error::NotHermitian { .. } => Error::NotFaithful { min_eigenvalue: f64::NAN },
        other => other,
    })?;
    if eig.min() <= tol * eig.scale() {
        return Err(Error::NotFaithful { min_eigenvalue: eig.min() });
    }
    let d = a.dim();
    let mut trip: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); b.dim()];
    for i in 0..d {
        for j in 0..d {
            if let Some(k) = a.basis_product(a.basis_star(i), j) {
                for beta in 0..b.dim() {
                    let v = ip.matrix[(beta, k)];
                    if v != C64::new(0.0, 0.0) {
                        trip[beta].push((i, j, v));
                    }
                }
            }
        }
    }
    let gram = trip.into_iter().map(|t| SparseMatrix::from_triplets(d, d, t)).collect();
    let right = (0..b.dim()).map(|beta| a.right_mult(&eta_s.matrix.column(beta).into_owned())).collect();
    let left: Vec<SparseMatrix> =
        (0..b.dim()).map(|beta| a.right_mult(&eta_t.matrix.column(beta).into_owned())).collect();
    let module = HilbertBimodule::new(format!("{}⁻", a.label()), b.clone(), b.clone(), d, left, right, gram)?;

    let mut adj = Residual::new();
    for beta in 0..b.dim() {
        let lb = &module.left_action[beta];
        let lb_star = &module.left_action[b.basis_star(beta)];
        for g in &module.gram {
            let (abs, scale) = kernel::sparse_residual(&lb.adjoint().mul(g), &g.mul(lb_star));
            adj.observe(abs, scale, String::new);
        }
    }
    if adj.value > tol {
        return Err(Error::LeftActionNotAdjointable { residual: adj.value });
    }
    Ok(module)
}

/// `E₁ ⊗̂_M E₂` together with the map from the raw tensor space.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub module: HilbertBimodule,
    /// Raw-to-quotient representatives: columns are orthonormal vectors of the
    /// raw space `ℂ^{m₁ m₂}` (index `i·m₂ + k`) spanning the complement of the
    /// null space.
    pub embed: SparseMatrix,
    /// `embed^H`, the class map from the raw space.
    pub project: SparseMatrix,
    pub factor_dims: (usize, usize),
    /// Descent and balancing checks computed during construction.
    pub diagnostics: VerificationReport,
}

impl TensorProduct {
    pub fn raw_dim(&self) -> usize {
        self.factor_dims.0 * self.factor_dims.1
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// Class of `u ⊗ v` in quotient coordinates.
    pub fn elementary(&self, u: &CVector, v: &CVector) -> CVector {
        let raw = u.kronecker(v);
        self.project.mul_dvec(&raw)
    }

    /// Compression `Q^H T Q` of a raw operator.
    pub fn compress(&self, t: &SparseMatrix) -> SparseMatrix {
        self.project.mul(t).mul(&self.embed)
    }

    /// Residual of `Q^H T (I − Q Q^H)`: zero iff `T` preserves the null space.
    pub fn descent_residual(&self, t: &SparseMatrix) -> (f64, f64) {
        let pt = self.project.mul(t);
        let through = pt.mul(&self.embed).mul(&self.project);
        kernel::sparse_residual(&pt, &through)
    }
}

/// Rieffel interior tensor product of an `L–M` and an `M–R` bimodule.
pub fn interior_tensor(e1: &HilbertBimodule, e2: &HilbertBimodule, tol: f64) -> Result<TensorProduct> {
    if e1.right != e2.left {
        return Err(Error::AlgebraMismatch(format!(
            "right algebra {} of the first factor differs from left algebra {} of the second",
            e1.right.label(),
            e2.left.label()
        )));
    }
    let (m1, m2) = (e1.dim, e2.dim);
    let raw = m1 * m2;
    let m = &e1.right;
    let r = &e2.right;

    let raw_gram: Vec<SparseMatrix> = (0..r.dim())
        .into_par_iter()
        .map(|alpha| {
            let mut acc = SparseMatrix::zeros(raw, raw);
            for beta in 0..m.dim() {
                let g1 = &e1.gram[beta];
                if g1.nnz() == 0 {
                    continue;
                }
                let inner = e2.gram[alpha].mul(&e2.left_action[beta]);
                if inner.nnz() == 0 {
                    continue;
                }
                acc = acc.add(&g1.kron(&inner));
            }
            acc
        })
        .collect();

    let q = quotient(r, &raw_gram, raw, tol)?;
    let embed = q.embed;
    let project = embed.adjoint();
    let compress = |t: &SparseMatrix| project.mul(t).mul(&embed);

    let id1 = SparseMatrix::identity(m1);
    let id2 = SparseMatrix::identity(m2);
    let raw_left: Vec<SparseMatrix> = e1.left_action.iter().map(|a| a.kron(&id2)).collect();
    let raw_right: Vec<SparseMatrix> = e2.right_action.iter().map(|b| id1.kron(b)).collect();
    let left = raw_left.par_iter().map(compress).collect();
    let right = raw_right.par_iter().map(compress).collect();
    let gram = raw_gram.par_iter().map(compress).collect();
    let module = HilbertBimodule::new(
        format!("{} ⊗ {}", e1.label, e2.label),
        e1.left.clone(),
        r.clone(),
        q.values.len(),
        left,
        right,
        gram,
    )?;

    let mut tp = TensorProduct {
        module,
        embed,
        project,
        factor_dims: (m1, m2),
        diagnostics: VerificationReport::new(format!("{} ⊗ {}", e1.label, e2.label), tol),
    };

    let mut descent = Residual::new();
    for (k, t) in raw_left.iter().enumerate() {
        let (abs, scale) = tp.descent_residual(t);
        descent.observe(abs, scale, || format!("left basis {k}"));
    }
    for (k, t) in raw_right.iter().enumerate() {
        let (abs, scale) = tp.descent_residual(t);
        descent.observe(abs, scale, || format!("right basis {k}"));
    }
    let mut balanced = Residual::new();
    for beta in 0..m.dim() {
        let x = tp.project.mul(&e1.right_action[beta].kron(&id2));
        let y = tp.project.mul(&id1.kron(&e2.left_action[beta]));
        let (abs, scale) = kernel::sparse_residual(&x, &y);
        balanced.observe(abs, scale, || format!("middle basis {beta}"));
    }
    tp.diagnostics.push(Check::from_residual("actions_descend", descent, tol));
    tp.diagnostics.push(Check::from_residual("balanced", balanced, tol));
    Ok(tp)
}

/// An adjointable operator with its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedOperator {
    pub matrix: SparseMatrix,
    pub adjoint_matrix: SparseMatrix,
}

/// Solves `⟨X u, v⟩ = ⟨u, T v⟩` for `X` via the flattened Gram, then verifies
/// the solution against every Gram coefficient.
pub fn adjoint_of(t: &SparseMatrix, e: &HilbertBimodule, tol: f64) -> Result<BoundedOperator> {
    if t.shape() != (e.dim, e.dim) {
        return Err(Error::DimensionMismatch(format!("operator is {:?}, module has dimension {}", t.shape(), e.dim)));
    }
    let flat = e.flat_gram();
    let inv = sparse_inverse(&flat)?;
    let x = inv.mul(&t.adjoint()).mul(&flat);
    let mut res = Residual::new();
    for g in &e.gram {
        let (abs, scale) = kernel::sparse_residual(&x.adjoint().mul(g), &g.mul(t));
        res.observe(abs, scale, String::new);
    }
    if res.value > tol {
        return Err(Error::NotAdjointable { residual: res.value });
    }
    Ok(BoundedOperator { matrix: t.clone(), adjoint_matrix: x })
}

/// Inverse of a positive definite matrix; diagonal inputs stay sparse.
fn sparse_inverse(m: &SparseMatrix) -> Result<SparseMatrix> {
    let n = m.nrows();
    let diagonal = m.triplets().all(|(i, j, _)| i == j);
    if diagonal {
        let mut trip = Vec::with_capacity(n);
        for i in 0..n {
            let d = m.get(i, i);
            if d.norm() == 0.0 {
                return Err(Error::NotFaithful { min_eigenvalue: 0.0 });
            }
            trip.push((i, i, one() / d));
        }
        return Ok(SparseMatrix::from_triplets(n, n, trip));
    }
    let dense = m.to_dense();
    let inv = dense.try_inverse().ok_or(Error::NotFaithful { min_eigenvalue: 0.0 })?;
    Ok(SparseMatrix::from_dense(&inv))
}

/// Canonical identification `(E₁ ⊗̂ E₂) ⊗̂ E₃ → E₁ ⊗̂ (E₂ ⊗̂ E₃)`.
#[derive(Clone, Debug)]
pub struct Associator {
    pub left_assoc: TensorProduct,
    pub right_assoc: TensorProduct,
    pub inner_left: TensorProduct,
    pub inner_right: TensorProduct,
    /// Left-bracketed quotient to right-bracketed quotient.
    pub forward: SparseMatrix,
    pub backward: SparseMatrix,
    pub report: VerificationReport,
}

pub fn associator(e1: &HilbertBimodule, e2: &HilbertBimodule, e3: &HilbertBimodule, tol: f64) -> Result<Associator> {
    let t12 = interior_tensor(e1, e2, tol)?;
    let t23 = interior_tensor(e2, e3, tol)?;
    associator_from(e1, e3, t12, t23, tol)
}

/// Associator built from already computed `E₁ ⊗̂ E₂` and `E₂ ⊗̂ E₃`.
pub fn associator_from(
    e1: &HilbertBimodule,
    e3: &HilbertBimodule,
    t12: TensorProduct,
    t23: TensorProduct,
    tol: f64,
) -> Result<Associator> {
    if t12.factor_dims.0 != e1.dim || t23.factor_dims.1 != e3.dim {
        return Err(Error::DimensionMismatch("inner tensor products do not match the outer factors".into()));
    }
    let left = interior_tensor(&t12.module, e3, tol)?;
    let right = interior_tensor(e1, &t23.module, tol)?;
    let id1 = SparseMatrix::identity(e1.dim);
    let id3 = SparseMatrix::identity(e3.dim);
    let lift_left = t12.embed.kron(&id3).mul(&left.embed);
    let lift_right = id1.kron(&t23.embed).mul(&right.embed);
    let forward = right.project.mul(&id1.kron(&t23.project)).mul(&lift_left);
    let backward = left.project.mul(&t12.project.kron(&id3)).mul(&lift_right);

    let mut report = VerificationReport::new("associator", tol);
    let (dl, dr) = (left.dim(), right.dim());
    report.push(Check::verdict(
        "dimensions_agree",
        dl == dr,
        (dl as f64 - dr as f64).abs(),
        1.0,
        Some(format!("{dl} vs {dr}")),
    ));
    let mut inv = Residual::new();
    let (abs, scale) = kernel::sparse_residual(&backward.mul(&forward), &SparseMatrix::identity(dl));
    inv.observe(abs, scale, || "backward ∘ forward".into());
    let (abs, scale) = kernel::sparse_residual(&forward.mul(&backward), &SparseMatrix::identity(dr));
    inv.observe(abs, scale, || "forward ∘ backward".into());
    report.push(Check::from_residual("bijective", inv, tol));
    let mut iso = Residual::new();
    for (a, (gl, gr)) in left.module.gram().iter().zip(right.module.gram()).enumerate() {
        let (abs, scale) = kernel::sparse_residual(&forward.adjoint().mul(gr).mul(&forward), gl);
        iso.observe(abs, scale, || format!("Gram coefficient {a}"));
    }
    report.push(Check::from_residual("isometric", iso, tol));
    Ok(Associator {
        left_assoc: left,
        right_assoc: right,
        inner_left: t12,
        inner_right: t23,
        forward,
        backward,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MapKind;
    use crate::kernel::{c, zero, DEFAULT_TOL};

    fn hs(m: usize) -> HilbertBimodule {
        HilbertBimodule::hilbert_space(&CMatrix::identity(m, m)).unwrap()
    }

    #[test]
    fn canonical_modules() {
        let c1 = canonical_over_self(&CStarAlgebra::complex());
        assert_eq!(c1.dim(), 1);
        assert!(c1.validate(DEFAULT_TOL).pass());

        let c2 = CStarAlgebra::commutative(2, "C2").unwrap();
        let e = canonical_over_self(&c2);
        assert!(e.validate(DEFAULT_TOL).pass());
        // ⟨δ_i, δ_j⟩ = δ_ij δ_i.
        assert_eq!(e.inner(&c2.basis(0), &c2.basis(0)), c2.basis(0));
        assert_eq!(e.inner(&c2.basis(0), &c2.basis(1)), CVector::zeros(2));
        assert!(e.is_full(DEFAULT_TOL));

        let m2 = CStarAlgebra::new(vec![2], "M2").unwrap();
        let e = canonical_over_self(&m2);
        assert_eq!(e.dim(), 4);
        assert!(e.validate(DEFAULT_TOL).pass());
        assert!((e.norm(&m2.unit()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_over_complex_is_kronecker() {
        let g1 = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let e1 = HilbertBimodule::hilbert_space(&g1).unwrap();
        let e2 = hs(3);
        let t = interior_tensor(&e1, &e2, DEFAULT_TOL).unwrap();
        assert_eq!(t.dim(), 6);
        assert!(t.diagnostics.pass());
        // The lifted Gram equals the Kronecker product.
        let lifted = t.embed.mul(&t.module.gram()[0]).mul(&t.project).to_dense();
        let expected = g1.kronecker(&CMatrix::identity(3, 3));
        assert!((lifted - expected).norm() < 1e-12);
    }

    #[test]
    fn self_tensor_of_c2_halves_dimension() {
        let c2 = CStarAlgebra::commutative(2, "C2").unwrap();
        let e = canonical_over_self(&c2);
        let t = interior_tensor(&e, &e, DEFAULT_TOL).unwrap();
        assert_eq!(t.raw_dim(), 4);
        assert_eq!(t.dim(), 2);
        assert!(t.diagnostics.pass());
        assert!(t.module.validate(DEFAULT_TOL).pass());
    }

    #[test]
    fn algebra_mismatch() {
        let c2 = canonical_over_self(&CStarAlgebra::commutative(2, "C2").unwrap());
        assert!(matches!(interior_tensor(&c2, &hs(2), DEFAULT_TOL), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn indefinite_form_is_rejected() {
        let g = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        let bad = HilbertBimodule::hilbert_space(&g).unwrap();
        assert!(!bad.validate(DEFAULT_TOL).pass());
        assert!(matches!(interior_tensor(&bad, &hs(1), DEFAULT_TOL), Err(Error::FormNotPsd { .. })));
    }

    #[test]
    fn adjoints() {
        let e = hs(3);
        let id = SparseMatrix::identity(3);
        assert_eq!(adjoint_of(&id, &e, DEFAULT_TOL).unwrap().adjoint_matrix, id);

        let m2 = CStarAlgebra::new(vec![1, 2], "A").unwrap();
        let canon = canonical_over_self(&m2);
        let a = CVector::from_fn(m2.dim(), |i, _| c(i as f64, 1.0 - i as f64));
        let op = adjoint_of(&m2.left_mult(&a), &canon, DEFAULT_TOL).unwrap();
        let expected = m2.left_mult(&m2.star(&a));
        assert!(kernel::sparse_residual(&op.adjoint_matrix, &expected).0 < 1e-12);

        let c2 = CStarAlgebra::commutative(2, "C2").unwrap();
        let canon2 = canonical_over_self(&c2);
        let swap = SparseMatrix::from_triplets(2, 2, vec![(0, 1, one()), (1, 0, one())]);
        let op = adjoint_of(&swap, &canon2, DEFAULT_TOL);
        // Swapping is not a right-module map, so no adjoint exists for the
        // algebra-valued form even though the flattened form is symmetric.
        assert!(matches!(op, Err(Error::NotAdjointable { .. })));
        let swap_hs = adjoint_of(&swap, &hs(2), DEFAULT_TOL).unwrap();
        assert_eq!(swap_hs.adjoint_matrix, swap);
    }

    #[test]
    fn fullness() {
        let c2 = CStarAlgebra::commutative(2, "C2").unwrap();
        let g = vec![SparseMatrix::identity(1), SparseMatrix::zeros(1, 1)];
        let right = vec![SparseMatrix::identity(1), SparseMatrix::zeros(1, 1)];
        let e = HilbertBimodule::new("δ1", CStarAlgebra::complex(), c2, 1, vec![SparseMatrix::identity(1)], right, g)
            .unwrap();
        assert!(e.validate(DEFAULT_TOL).pass());
        assert!(!e.is_full(DEFAULT_TOL));
    }

    #[test]
    fn localization_of_z2_group_algebra() {
        // Group basis (e, g) written in the character basis: e = p₊ + p₋, g = p₊ − p₋.
        let a = CStarAlgebra::commutative(2, "C[Z2]").unwrap();
        let cplx = CStarAlgebra::complex();
        let h = LinearMap::new(
            a.clone(),
            cplx.clone(),
            CMatrix::from_row_slice(1, 2, &[c(0.5, 0.0), c(0.5, 0.0)]),
            MapKind::Plain,
        )
        .unwrap();
        let unit =
            LinearMap::new(cplx.clone(), a.clone(), CMatrix::from_column_slice(2, 1, &[one(), one()]), MapKind::Hom)
                .unwrap();
        let e = localization(&a, &h, &unit, &unit, DEFAULT_TOL).unwrap();
        assert!(e.validate(DEFAULT_TOL).pass());
        // In the matrix-unit (character) basis the Gram is ½·identity.
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!((e.gram()[0].to_dense() - half).norm() < 1e-15);
        let ge = CVector::from_vec(vec![one(), one()]);
        let gg = CVector::from_vec(vec![one(), -one()]);
        assert!((e.inner(&ge, &ge)[0] - one()).norm() < 1e-15);
        assert!(e.inner(&ge, &gg)[0].norm() < 1e-15);
        assert!((e.inner(&gg, &gg)[0] - one()).norm() < 1e-15);

        let bad =
            LinearMap::new(a.clone(), cplx, CMatrix::from_row_slice(1, 2, &[one(), zero()]), MapKind::Plain).unwrap();
        assert!(matches!(localization(&a, &bad, &unit, &unit, DEFAULT_TOL), Err(Error::NotFaithful { .. })));
    }

    #[test]
    fn associator_over_complex() {
        let t = associator(&hs(2), &hs(3), &hs(2), DEFAULT_TOL).unwrap();
        assert!(t.report.pass());
        assert_eq!(t.left_assoc.dim(), 12);
        let id = SparseMatrix::identity(12);
        assert!(kernel::sparse_residual(&t.backward.mul(&t.forward), &id).0 < 1e-10);
    }
}
