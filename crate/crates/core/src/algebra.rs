//! Finite-dimensional C*-algebras `M_{n_1} ⊕ … ⊕ M_{n_k}`, their elements,
//! linear maps between them, characters of commutative algebras and the
//! positivity tests for linear maps (complete positivity, faithfulness).
//!
//! The standard basis is the set of matrix units `E^{(k)}_{ij}`, ordered
//! block-major and row-major inside each block. All positivity statements are
//! evaluated in the faithful block-diagonal representation into `M_N`,
//! `N = Σ n_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, one, zero, CMatrix, CVector, SparseMatrix, C64};
use crate::report::{Check, Residual, VerificationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CStarAlgebra {
    block_sizes: Vec<usize>,
    label: String,
    offsets: Vec<usize>,
    rep_offsets: Vec<usize>,
    dim: usize,
    rep_dim: usize,
}

impl CStarAlgebra {
    pub fn new(block_sizes: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::BadParams(format!("block sizes must be nonempty and positive, got {block_sizes:?}")));
        }
        let mut offsets = Vec::with_capacity(block_sizes.len());
        let mut rep_offsets = Vec::with_capacity(block_sizes.len());
        let (mut dim, mut rep_dim) = (0, 0);
        for &n in &block_sizes {
            offsets.push(dim);
            rep_offsets.push(rep_dim);
            dim += n * n;
            rep_dim += n;
        }
        Ok(Self { block_sizes, label: label.into(), offsets, rep_offsets, dim, rep_dim })
    }

    /// `C(X)` for a set with `k` points.
    pub fn commutative(k: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![1; k], label)
    }

    pub fn complex() -> Self {
        Self::new(vec![1], "C").expect("one block")
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Linear dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Size `N = Σ n_k` of the faithful representation.
    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn is_commutative(&self) -> bool {
        self.block_sizes.iter().all(|&n| n == 1)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.block_sizes == other.block_sizes
    }

    pub fn basis_index(&self, block: usize, i: usize, j: usize) -> usize {
        let n = self.block_sizes[block];
        self.offsets[block] + i * n + j
    }

    /// `(block, row, col)` of a matrix unit.
    pub fn basis_triple(&self, idx: usize) -> (usize, usize, usize) {
        let block = match self.offsets.binary_search(&idx) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        let n = self.block_sizes[block];
        let r = idx - self.offsets[block];
        (block, r / n, r % n)
    }

    pub fn is_diagonal_unit(&self, idx: usize) -> bool {
        let (_, i, j) = self.basis_triple(idx);
        i == j
    }

    pub fn basis(&self, idx: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[idx] = one();
        v
    }

    pub fn unit(&self) -> CVector {
        let mut v = CVector::zeros(self.dim);
        for (k, &n) in self.block_sizes.iter().enumerate() {
            for i in 0..n {
                v[self.basis_index(k, i, i)] = one();
            }
        }
        v
    }

    /// Central projection onto block `k`.
    pub fn block_unit(&self, k: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        for i in 0..self.block_sizes[k] {
            v[self.basis_index(k, i, i)] = one();
        }
        v
    }

    /// `e_a e_b` for matrix units: either another matrix unit or zero.
    pub fn basis_product(&self, a: usize, b: usize) -> Option<usize> {
        let (ka, i, j) = self.basis_triple(a);
        let (kb, p, q) = self.basis_triple(b);
        (ka == kb && j == p).then(|| self.basis_index(ka, i, q))
    }

    pub fn basis_star(&self, a: usize) -> usize {
        let (k, i, j) = self.basis_triple(a);
        self.basis_index(k, j, i)
    }

    pub fn blocks_of(&self, coords: &CVector) -> Vec<CMatrix> {
        self.block_sizes
            .iter()
            .enumerate()
            .map(|(k, &n)| CMatrix::from_fn(n, n, |i, j| coords[self.basis_index(k, i, j)]))
            .collect()
    }

    pub fn coords_of(&self, blocks: &[CMatrix]) -> CVector {
        let mut v = CVector::zeros(self.dim);
        for (k, b) in blocks.iter().enumerate() {
            let n = self.block_sizes[k];
            for i in 0..n {
                for j in 0..n {
                    v[self.basis_index(k, i, j)] = b[(i, j)];
                }
            }
        }
        v
    }

    pub fn mul(&self, a: &CVector, b: &CVector) -> CVector {
        if self.is_commutative() {
            return a.component_mul(b);
        }
        let ab: Vec<CMatrix> = self.blocks_of(a).iter().zip(self.blocks_of(b).iter()).map(|(x, y)| x * y).collect();
        self.coords_of(&ab)
    }

    pub fn star(&self, a: &CVector) -> CVector {
        if self.is_commutative() {
            return a.map(|z| z.conj());
        }
        let blocks: Vec<CMatrix> = self.blocks_of(a).iter().map(|x| x.adjoint()).collect();
        self.coords_of(&blocks)
    }

    /// Image in the faithful block-diagonal representation.
    pub fn represent(&self, a: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.rep_dim, self.rep_dim);
        for (k, b) in self.blocks_of(a).iter().enumerate() {
            let o = self.rep_offsets[k];
            m.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
        }
        m
    }

    /// Trace of the faithful representation.
    pub fn trace(&self, a: &CVector) -> C64 {
        (0..self.dim).filter(|&i| self.is_diagonal_unit(i)).map(|i| a[i]).sum()
    }

    /// C*-norm: the largest block operator norm.
    pub fn norm(&self, a: &CVector) -> f64 {
        self.blocks_of(a)
            .into_iter()
            .map(|b| b.singular_values().iter().cloned().fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Matrix of `x ↦ a x` on coordinates.
    pub fn left_mult(&self, a: &CVector) -> SparseMatrix {
        let mut trip = Vec::new();
        for (p, &ap) in a.iter().enumerate() {
            if ap == zero() {
                continue;
            }
            for x in 0..self.dim {
                if let Some(r) = self.basis_product(p, x) {
                    trip.push((r, x, ap));
                }
            }
        }
        SparseMatrix::from_triplets(self.dim, self.dim, trip)
    }

    /// Matrix of `x ↦ x a` on coordinates.
    pub fn right_mult(&self, a: &CVector) -> SparseMatrix {
        let mut trip = Vec::new();
        for (p, &ap) in a.iter().enumerate() {
            if ap == zero() {
                continue;
            }
            for x in 0..self.dim {
                if let Some(r) = self.basis_product(x, p) {
                    trip.push((r, x, ap));
                }
            }
        }
        SparseMatrix::from_triplets(self.dim, self.dim, trip)
    }

    pub fn element(&self, coords: CVector) -> AlgebraElement {
        assert_eq!(coords.len(), self.dim);
        AlgebraElement { blocks: self.blocks_of(&coords), algebra: self.clone() }
    }

    pub fn unit_element(&self) -> AlgebraElement {
        self.element(self.unit())
    }
}

/// An element stored block by block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    algebra: CStarAlgebra,
    blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    pub fn from_blocks(algebra: &CStarAlgebra, blocks: Vec<CMatrix>) -> Result<Self> {
        let ok = blocks.len() == algebra.block_sizes.len()
            && blocks.iter().zip(&algebra.block_sizes).all(|(b, &n)| b.nrows() == n && b.ncols() == n);
        if !ok {
            return Err(Error::DimensionMismatch(format!("blocks do not match {:?}", algebra.block_sizes)));
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    pub fn algebra(&self) -> &CStarAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn coords(&self) -> CVector {
        self.algebra.coords_of(&self.blocks)
    }

    fn check_parent(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::ParentMismatch { left: self.algebra.label.clone(), right: other.algebra.label.clone() });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(Self { algebra: self.algebra.clone(), blocks })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(|b| b * s).collect() }
    }

    pub fn star(&self) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.algebra.norm(&self.coords())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.coords() - other.coords()).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Plain,
    Hom,
    Antihom,
}

/// Linear map between algebras, as a matrix over the matrix-unit bases.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub domain: CStarAlgebra,
    pub codomain: CStarAlgebra,
    pub matrix: CMatrix,
    pub kind: MapKind,
}

impl LinearMap {
    pub fn new(domain: CStarAlgebra, codomain: CStarAlgebra, matrix: CMatrix, kind: MapKind) -> Result<Self> {
        if matrix.nrows() != codomain.dim() || matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        if !kernel::is_finite(&matrix) {
            return Err(Error::BadParams("map matrix has non-finite entries".into()));
        }
        Ok(Self { domain, codomain, matrix, kind })
    }

    pub fn identity(a: &CStarAlgebra) -> Self {
        Self { domain: a.clone(), codomain: a.clone(), matrix: CMatrix::identity(a.dim(), a.dim()), kind: MapKind::Hom }
    }

    /// Blockwise transpose, an antihomomorphism of `a`.
    pub fn transpose(a: &CStarAlgebra) -> Self {
        let mut m = CMatrix::zeros(a.dim(), a.dim());
        for idx in 0..a.dim() {
            let (k, i, j) = a.basis_triple(idx);
            m[(a.basis_index(k, j, i), idx)] = one();
        }
        Self { domain: a.clone(), codomain: a.clone(), matrix: m, kind: MapKind::Antihom }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x
    }

    pub fn apply_element(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.algebra() != &self.domain {
            return Err(Error::ParentMismatch { left: x.algebra().label.clone(), right: self.domain.label.clone() });
        }
        Ok(self.codomain.element(self.apply(&x.coords())))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        if inner.codomain != self.domain {
            return Err(Error::AlgebraMismatch("composition of incompatible maps".into()));
        }
        let kind = match (self.kind, inner.kind) {
            (MapKind::Hom, MapKind::Hom) | (MapKind::Antihom, MapKind::Antihom) => MapKind::Hom,
            (MapKind::Hom, MapKind::Antihom) | (MapKind::Antihom, MapKind::Hom) => MapKind::Antihom,
            _ => MapKind::Plain,
        };
        Ok(LinearMap {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &inner.matrix,
            kind,
        })
    }

    pub fn with_kind(mut self, kind: MapKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Verifies multiplicativity (or anti-multiplicativity) on all basis pairs,
/// and optionally `*`-preservation and unitality.
pub fn check_multiplicative(map: &LinearMap, anti: bool, star: bool, tol: f64) -> VerificationReport {
    let dom = &map.domain;
    let cod = &map.codomain;
    let images: Vec<CVector> = (0..dom.dim()).map(|i| map.matrix.column(i).into_owned()).collect();
    let norms: Vec<f64> = images.iter().map(|v| v.norm()).collect();
    let mut mult = Residual::new();
    for i in 0..dom.dim() {
        for j in 0..dom.dim() {
            let lhs = match dom.basis_product(i, j) {
                Some(k) => images[k].clone(),
                None => CVector::zeros(cod.dim()),
            };
            let rhs = if anti { cod.mul(&images[j], &images[i]) } else { cod.mul(&images[i], &images[j]) };
            mult.observe((lhs - rhs).norm(), norms[i] * norms[j], || format!("basis pair ({i},{j})"));
        }
    }
    let mut report = VerificationReport::new(format!("{} -> {}", dom.label(), cod.label()), tol);
    let name = if anti { "anti_multiplicative" } else { "multiplicative" };
    report.push(Check::from_residual(name, mult, tol));
    if star {
        let mut st = Residual::new();
        for i in 0..dom.dim() {
            let lhs = &images[dom.basis_star(i)];
            let rhs = cod.star(&images[i]);
            st.observe((lhs - rhs).norm(), norms[i], || format!("basis element {i}"));
        }
        report.push(Check::from_residual("star_preserving", st, tol));
    }
    let mut un = Residual::new();
    let u = map.apply(&dom.unit());
    un.observe((u - cod.unit()).norm(), cod.unit().norm(), || "unit".to_string());
    report.push(Check::from_residual("unital", un, tol));
    report
}

/// Checks the claim carried by `map.kind`. Plain maps carry no claim.
pub fn verify_kind(map: &LinearMap, tol: f64) -> VerificationReport {
    match map.kind {
        MapKind::Hom => check_multiplicative(map, false, true, tol),
        MapKind::Antihom => check_multiplicative(map, true, true, tol),
        MapKind::Plain => VerificationReport::new("plain map", tol),
    }
}

/// The coordinate evaluations of a commutative algebra.
pub fn characters(a: &CStarAlgebra) -> Result<Vec<LinearMap>> {
    if !a.is_commutative() {
        return Err(Error::NotCommutative(a.label().to_string()));
    }
    let cplx = CStarAlgebra::complex();
    Ok((0..a.dim())
        .map(|q| {
            let mut m = CMatrix::zeros(1, a.dim());
            m[(0, q)] = one();
            LinearMap { domain: a.clone(), codomain: cplx.clone(), matrix: m, kind: MapKind::Hom }
        })
        .collect())
}

/// Choi-type block matrix `[ρ(P(e_i^* e_j))]_{ij}` over the matrix-unit basis.
pub fn choi_matrix(p: &LinearMap) -> CMatrix {
    let dom = &p.domain;
    let cod = &p.codomain;
    let n = cod.rep_dim();
    let d = dom.dim();
    let mut out = CMatrix::zeros(d * n, d * n);
    for i in 0..d {
        let istar = dom.basis_star(i);
        for j in 0..d {
            if let Some(k) = dom.basis_product(istar, j) {
                let img = p.matrix.column(k).into_owned();
                let blk = cod.represent(&img);
                out.view_mut((i * n, j * n), (n, n)).copy_from(&blk);
            }
        }
    }
    out
}

/// Complete positivity: the Choi-type block matrix is PSD within tolerance.
pub fn is_completely_positive(p: &LinearMap, tol: f64) -> Check {
    let choi = choi_matrix(p);
    match kernel::hermitian_eigensystem(&choi, tol) {
        Ok(eig) => {
            let scale = eig.scale();
            let neg = (-eig.min()).max(0.0);
            Check::verdict(
                "completely_positive",
                eig.min() >= -tol * scale,
                neg / scale,
                scale,
                Some(format!("Choi matrix has eigenvalue {:.6e}", eig.min())),
            )
        }
        Err(Error::NotHermitian { residual }) => {
            Check::verdict("completely_positive", false, residual, 1.0, Some("Choi matrix is not hermitian".into()))
        }
        Err(e) => Check::failed("completely_positive", e.to_string()),
    }
}

/// Scalar Gram `tr ρ(P(e_i^* e_j))` of a map over the matrix-unit basis.
pub fn scalar_gram(p: &LinearMap) -> CMatrix {
    let dom = &p.domain;
    let d = dom.dim();
    let mut g = CMatrix::zeros(d, d);
    for i in 0..d {
        let istar = dom.basis_star(i);
        for j in 0..d {
            if let Some(k) = dom.basis_product(istar, j) {
                g[(i, j)] = p.codomain.trace(&p.matrix.column(k).into_owned());
            }
        }
    }
    g
}

/// Faithfulness: the scalar Gram `tr ρ(P(e_i^* e_j))` is positive definite.
pub fn is_faithful_positive(p: &LinearMap, tol: f64) -> Check {
    let g = scalar_gram(p);
    match kernel::hermitian_eigensystem(&g, tol) {
        Ok(eig) => {
            let scale = eig.scale();
            let threshold = tol * scale;
            Check::verdict(
                "faithful",
                eig.min() > threshold,
                (threshold - eig.min()).max(0.0) / scale,
                scale,
                Some(format!("scalar Gram has eigenvalue {:.6e}", eig.min())),
            )
        }
        Err(Error::NotHermitian { residual }) => {
            Check::verdict("faithful", false, residual, 1.0, Some("scalar Gram is not hermitian".into()))
        }
        Err(e) => Check::failed("faithful", e.to_string()),
    }
}

/// Rank of a map's matrix.
pub fn map_rank(p: &LinearMap, tol: f64) -> usize {
    kernel::rank(&p.matrix, tol)
}

/// `c·1` helper for scalar coordinates.
pub fn scalar(a: &CStarAlgebra, s: C64) -> CVector {
    a.unit() * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{c, DEFAULT_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coords(a: &CStarAlgebra, rng: &mut ChaCha8Rng) -> CVector {
        CVector::from_fn(a.dim(), |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn basis_indexing_roundtrip() {
        let a = CStarAlgebra::new(vec![1, 2, 3], "A").unwrap();
        assert_eq!(a.dim(), 14);
        assert_eq!(a.rep_dim(), 6);
        for idx in 0..a.dim() {
            let (k, i, j) = a.basis_triple(idx);
            assert_eq!(a.basis_index(k, i, j), idx);
        }
    }

    #[test]
    fn unit_is_two_sided_identity() {
        let a = CStarAlgebra::new(vec![1, 2], "C+M2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = a.element(random_coords(&a, &mut rng));
        let u = a.unit_element();
        assert!(u.multiply(&x).unwrap().distance(&x) < 1e-15);
        assert!(x.multiply(&u).unwrap().distance(&x) < 1e-15);
    }

    #[test]
    fn orthogonal_idempotents_and_matrix_units() {
        let c2 = CStarAlgebra::commutative(2, "C({1,2})").unwrap();
        let d1 = c2.element(c2.basis(0));
        let d2 = c2.element(c2.basis(1));
        assert!(d1.multiply(&d2).unwrap().norm() < 1e-15);

        let m2 = CStarAlgebra::new(vec![2], "M2").unwrap();
        let e12 = m2.element(m2.basis(m2.basis_index(0, 0, 1)));
        let e21 = m2.element(m2.basis(m2.basis_index(0, 1, 0)));
        let e11 = m2.element(m2.basis(m2.basis_index(0, 0, 0)));
        assert!(e12.multiply(&e21).unwrap().distance(&e11) < 1e-15);
    }

    #[test]
    fn parent_mismatch() {
        let a = CStarAlgebra::commutative(2, "A").unwrap();
        let b = CStarAlgebra::new(vec![2], "B").unwrap();
        let err = a.unit_element().multiply(&b.unit_element()).unwrap_err();
        assert!(matches!(err, Error::ParentMismatch { .. }));
    }

    #[test]
    fn identity_and_transpose_kinds() {
        let m2 = CStarAlgebra::new(vec![2], "M2").unwrap();
        let id = verify_kind(&LinearMap::identity(&m2), DEFAULT_TOL);
        assert!(id.pass());
        assert_eq!(id.max_residual(), 0.0);
        let t = LinearMap::transpose(&m2);
        assert!(verify_kind(&t, DEFAULT_TOL).pass());
        let as_hom = verify_kind(&t.clone().with_kind(MapKind::Hom), DEFAULT_TOL);
        assert!(!as_hom.pass());
        assert!(!as_hom.get("multiplicative").unwrap().pass);
    }

    #[test]
    fn composition_of_homs_is_hom() {
        let a = CStarAlgebra::new(vec![1, 2], "A").unwrap();
        // Swap-free automorphism: conjugation of the M2 block by a unitary.
        let u = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), zero(), zero(), one()]);
        let mut m = CMatrix::zeros(a.dim(), a.dim());
        for idx in 0..a.dim() {
            let img = {
                let mut blocks = a.blocks_of(&a.basis(idx));
                blocks[1] = &u * &blocks[1] * u.adjoint();
                a.coords_of(&blocks)
            };
            m.set_column(idx, &img);
        }
        let phi = LinearMap::new(a.clone(), a.clone(), m, MapKind::Hom).unwrap();
        assert!(verify_kind(&phi, DEFAULT_TOL).pass());
        let comp = phi.compose(&phi).unwrap();
        assert_eq!(comp.kind, MapKind::Hom);
        assert!(verify_kind(&comp, DEFAULT_TOL).pass());
    }

    #[test]
    fn characters_of_commutative_algebras() {
        assert_eq!(characters(&CStarAlgebra::commutative(3, "C3").unwrap()).unwrap().len(), 3);
        let one_pt = characters(&CStarAlgebra::complex()).unwrap();
        assert_eq!(one_pt.len(), 1);
        assert_eq!(one_pt[0].matrix, CMatrix::identity(1, 1));
        assert!(matches!(characters(&CStarAlgebra::new(vec![2], "M2").unwrap()), Err(Error::NotCommutative(_))));
    }

    #[test]
    fn gelfand_roundtrip_reconstructs_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=8 {
            let a = CStarAlgebra::commutative(k, "C(X)").unwrap();
            let x = random_coords(&a, &mut rng);
            let chars = characters(&a).unwrap();
            let values: Vec<C64> = chars.iter().map(|ch| ch.apply(&x)[0]).collect();
            let rebuilt = CVector::from_vec(values);
            assert!((rebuilt - &x).norm() < 1e-12);
            for ch in &chars {
                assert!(verify_kind(ch, DEFAULT_TOL).pass());
            }
        }
    }

    #[test]
    fn star_is_isometric_and_cstar_identity_holds() {
        let a = CStarAlgebra::new(vec![1, 2, 3], "A").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x = a.element(random_coords(&a, &mut rng));
            assert!((x.star().norm() - x.norm()).abs() < 1e-12);
            let xsx = x.star().multiply(&x).unwrap();
            assert!((xsx.norm() - x.norm().powi(2)).abs() < 1e-10 * x.norm().powi(2).max(1.0));
        }
    }

    #[test]
    fn states_are_cp_and_transpose_is_not() {
        let c2 = CStarAlgebra::commutative(2, "C2").unwrap();
        for ch in characters(&c2).unwrap() {
            assert!(is_completely_positive(&ch, DEFAULT_TOL).pass);
        }
        let m2 = CStarAlgebra::new(vec![2], "M2").unwrap();
        let t = is_completely_positive(&LinearMap::transpose(&m2), DEFAULT_TOL);
        assert!(!t.pass);
        // Choi of the transpose has eigenvalue -1 on a scale of 1.
        assert!((t.max_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_evaluation_is_not_faithful() {
        let c2 = CStarAlgebra::commutative(2, "C2").unwrap();
        let ev = &characters(&c2).unwrap()[0];
        assert!(is_completely_positive(ev, DEFAULT_TOL).pass);
        assert!(!is_faithful_positive(ev, DEFAULT_TOL).pass);
    }

    #[test]
    fn left_and_right_multiplication_matrices() {
        let a = CStarAlgebra::new(vec![2, 1], "A").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_coords(&a, &mut rng);
        let y = random_coords(&a, &mut rng);
        let l = a.left_mult(&x).mul_dvec(&y);
        let r = a.right_mult(&x).mul_dvec(&y);
        assert!((l - a.mul(&x, &y)).norm() < 1e-14);
        assert!((r - a.mul(&y, &x)).norm() < 1e-14);
    }
}
