//! Finite groupoids, their axiom checks, standard instance families and
//! finite Haar systems.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::report::{Check, Residual, VerificationReport};

/// A finite groupoid with explicit composition, identities and inverses.
///
/// Arrow `x` goes from `src[x]` to `tgt[x]`; the composite `xy` is defined when
/// `src[x] == tgt[y]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<String>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    table: Vec<Option<usize>>,
    identity: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteGroupoid {
    /// Assembles a groupoid from raw data. Only index ranges are checked here;
    /// the axioms are checked by [`FiniteGroupoid::validate`].
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<String>,
        src: Vec<usize>,
        tgt: Vec<usize>,
        compose: &[(usize, usize, usize)],
        identity: Vec<usize>,
        inverse: Vec<usize>,
    ) -> Result<Self> {
        let (n0, n1) = (objects.len(), arrows.len());
        if n0 == 0 || n1 == 0 {
            return Err(Error::InvalidGroupoid("no objects or no arrows".into()));
        }
        if src.len() != n1 || tgt.len() != n1 || inverse.len() != n1 || identity.len() != n0 {
            return Err(Error::InvalidGroupoid("table lengths do not match object/arrow counts".into()));
        }
        if src.iter().chain(&tgt).any(|&q| q >= n0) {
            return Err(Error::InvalidGroupoid("source or target out of range".into()));
        }
        if identity.iter().chain(&inverse).any(|&x| x >= n1) {
            return Err(Error::InvalidGroupoid("identity or inverse out of range".into()));
        }
        let mut table = vec![None; n1 * n1];
        for &(x, y, z) in compose {
            if x >= n1 || y >= n1 || z >= n1 {
                return Err(Error::InvalidGroupoid(format!("composition entry ({x},{y},{z}) out of range")));
            }
            if table[x * n1 + y].replace(z).is_some() {
                return Err(Error::InvalidGroupoid(format!(
                    "composition of ({}, {}) given twice",
                    arrows[x], arrows[y]
                )));
            }
        }
        let g = Self { objects, arrows, src, tgt, table, identity, inverse };
        let names: BTreeSet<&String> = g.objects.iter().collect();
        if names.len() != g.objects.len() {
            return Err(Error::InvalidGroupoid("duplicate object ids".into()));
        }
        let names: BTreeSet<&String> = g.arrows.iter().collect();
        if names.len() != g.arrows.len() {
            return Err(Error::InvalidGroupoid("duplicate arrow ids".into()));
        }
        Ok(g)
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[String] {
        &self.arrows
    }

    pub fn src(&self, x: usize) -> usize {
        self.src[x]
    }

    pub fn tgt(&self, x: usize) -> usize {
        self.tgt[x]
    }

    pub fn compose(&self, x: usize, y: usize) -> Option<usize> {
        self.table[x * self.arrows.len() + y]
    }

    pub fn identity(&self, q: usize) -> usize {
        self.identity[q]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// All defined composition entries `(x, y, xy)`.
    pub fn composition_entries(&self) -> Vec<(usize, usize, usize)> {
        let n = self.arrows.len();
        self.table.iter().enumerate().filter_map(|(i, z)| z.map(|z| (i / n, i % n, z))).collect()
    }

    /// Replaces one composition entry. Intended for building corrupted
    /// instances in tests.
    pub fn set_composition(&mut self, x: usize, y: usize, z: Option<usize>) {
        let n = self.arrows.len();
        self.table[x * n + y] = z;
    }

    pub fn t_fiber(&self, q: usize) -> Vec<usize> {
        (0..self.n_arrows()).filter(|&x| self.tgt[x] == q).collect()
    }

    pub fn s_fiber(&self, q: usize) -> Vec<usize> {
        (0..self.n_arrows()).filter(|&x| self.src[x] == q).collect()
    }

    /// `Γ₂ = {(x, y) : s(x) = t(y)}` in lexicographic order.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n_arrows();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.src[x] == self.tgt[y] {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Number of composable triples `(x, y, z)`.
    pub fn composable_triple_count(&self) -> usize {
        (0..self.n_objects())
            .map(|q| {
                // Triples x y z with s(x)=t(y)=q and s(y)=t(z): sum over y in t⁻¹(q).
                let into_q = self.s_fiber(q).len();
                self.t_fiber(q).iter().map(|&y| into_q * self.t_fiber(self.src[y]).len()).sum::<usize>()
            })
            .sum()
    }

    /// Orbit label for each object (smallest object index in the orbit).
    pub fn orbits(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_objects()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for x in 0..self.n_arrows() {
            let (a, b) = (find(&mut parent, self.src[x]), find(&mut parent, self.tgt[x]));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
        (0..self.n_objects()).map(|q| find(&mut parent, q)).collect()
    }

    pub fn is_group(&self) -> bool {
        self.n_objects() == 1
    }

    /// Checks every groupoid axiom, recording a witness for each failure.
    pub fn validate(&self) -> VerificationReport {
        let n = self.n_arrows();
        let an = |x: usize| self.arrows[x].as_str();
        let mut report =
            VerificationReport::new(format!("groupoid with {} objects, {} arrows", self.n_objects(), n), 0.0);

        let mut count = |name: &str, violations: Vec<String>, total: usize| {
            let pass = violations.is_empty();
            let frac = violations.len() as f64 / total.max(1) as f64;
            report.push(Check::verdict(name, pass, frac, 1.0, violations.into_iter().next()));
        };

        let mut domain = Vec::new();
        let mut st = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let composable = self.src[x] == self.tgt[y];
                match (composable, self.compose(x, y)) {
                    (true, None) => domain.push(format!("({}, {}) composable but composite missing", an(x), an(y))),
                    (false, Some(_)) => {
                        domain.push(format!("({}, {}) not composable but composite given", an(x), an(y)))
                    }
                    (true, Some(z)) => {
                        if self.tgt[z] != self.tgt[x] || self.src[z] != self.src[y] {
                            st.push(format!("t/s of {}·{} = {}", an(x), an(y), an(z)));
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        count("composition_domain", domain, n * n);
        count("source_target_of_composite", st, n * n);

        let mut assoc = Vec::new();
        let mut triples = 0;
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = self.compose(x, y) else { continue };
                for z in 0..n {
                    if self.src[y] != self.tgt[z] {
                        continue;
                    }
                    triples += 1;
                    let left = self.compose(xy, z);
                    let right = self.compose(y, z).and_then(|yz| self.compose(x, yz));
                    if left.is_none() || left != right {
                        assoc.push(format!("(x, y, z) = ({}, {}, {})", an(x), an(y), an(z)));
                    }
                }
            }
        }
        count("associativity", assoc, triples);

        let mut ids = Vec::new();
        for q in 0..self.n_objects() {
            let e = self.identity[q];
            if self.src[e] != q || self.tgt[e] != q {
                ids.push(format!("identity {} of object {}", an(e), self.objects[q]));
            }
        }
        count("identity_objects", ids, self.n_objects());

        let mut units = Vec::new();
        for x in 0..n {
            let right = self.compose(x, self.identity[self.src[x]]);
            let left = self.compose(self.identity[self.tgt[x]], x);
            if right != Some(x) || left != Some(x) {
                units.push(format!("x = {}", an(x)));
            }
        }
        count("unit_law", units, n);

        let mut inv = Vec::new();
        for x in 0..n {
            let xi = self.inverse[x];
            let ok = self.compose(x, xi) == Some(self.identity[self.tgt[x]])
                && self.compose(xi, x) == Some(self.identity[self.src[x]]);
            if !ok {
                inv.push(format!("x = {}, inverse {}", an(x), an(xi)));
            }
        }
        count("inverse_law", inv, n);
        report
    }

    // Instance families.

    /// One object, one arrow.
    pub fn trivial() -> Self {
        Self::from_parts(vec!["*".into()], vec!["e".into()], vec![0], vec![0], &[(0, 0, 0)], vec![0], vec![0])
            .expect("trivial groupoid")
    }

    /// Pair groupoid on `n` points: one arrow `(i, j)` from `j` to `i` for each pair.
    pub fn pair(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParams("pair groupoid needs at least one point".into()));
        }
        let idx = |i: usize, j: usize| i * n + j;
        let objects = (0..n).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        let (mut src, mut tgt, mut inverse) = (vec![], vec![], vec![]);
        for i in 0..n {
            for j in 0..n {
                arrows.push(format!("({i},{j})"));
                tgt.push(i);
                src.push(j);
                inverse.push(idx(j, i));
            }
        }
        let mut compose = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    compose.push((idx(i, j), idx(j, k), idx(i, k)));
                }
            }
        }
        let identity = (0..n).map(|i| idx(i, i)).collect();
        Self::from_parts(objects, arrows, src, tgt, &compose, identity, inverse)
    }

    /// Group `G` as a one-object groupoid. `table[g][h]` is the index of `gh`.
    pub fn group(table: &GroupTable) -> Self {
        let n = table.order();
        let compose: Vec<_> = (0..n).flat_map(|g| (0..n).map(move |h| (g, h, table.mul(g, h)))).collect();
        Self::from_parts(
            vec!["*".into()],
            table.names.clone(),
            vec![0; n],
            vec![0; n],
            &compose,
            vec![table.unit],
            (0..n).map(|g| table.inv(g)).collect(),
        )
        .expect("group groupoid")
    }

    /// Action groupoid of a permutation action. `action[g][p]` is `g·p`.
    /// The arrow `(g, p)` goes from `p` to `g·p`.
    pub fn action(table: &GroupTable, action: &[Vec<usize>]) -> Result<Self> {
        let n = table.order();
        if action.len() != n {
            return Err(Error::NotAnAction(format!("{} permutations for a group of order {n}", action.len())));
        }
        let np = action[0].len();
        if np == 0 {
            return Err(Error::NotAnAction("empty point set".into()));
        }
        for (g, perm) in action.iter().enumerate() {
            let seen: BTreeSet<usize> = perm.iter().copied().collect();
            if perm.len() != np || seen.len() != np || seen.iter().any(|&p| p >= np) {
                return Err(Error::NotAnAction(format!("{} does not act by a permutation", table.names[g])));
            }
        }
        if (0..np).any(|p| action[table.unit][p] != p) {
            return Err(Error::NotAnAction("unit does not act trivially".into()));
        }
        for g in 0..n {
            for h in 0..n {
                let gh = table.mul(g, h);
                if let Some(p) = (0..np).find(|&p| action[gh][p] != action[g][action[h][p]]) {
                    return Err(Error::NotAnAction(format!(
                        "({}{})·{p} differs from {}·({}·{p})",
                        table.names[g], table.names[h], table.names[g], table.names[h]
                    )));
                }
            }
        }
        let idx = |g: usize, p: usize| g * np + p;
        let mut arrows = Vec::new();
        let (mut src, mut tgt, mut inverse) = (vec![], vec![], vec![]);
        for g in 0..n {
            for p in 0..np {
                arrows.push(format!("({},{p})", table.names[g]));
                src.push(p);
                tgt.push(action[g][p]);
                inverse.push(idx(table.inv(g), action[g][p]));
            }
        }
        let mut compose = Vec::new();
        for g in 0..n {
            for h in 0..n {
                for p in 0..np {
                    compose.push((idx(g, action[h][p]), idx(h, p), idx(table.mul(g, h), p)));
                }
            }
        }
        let identity = (0..np).map(|p| idx(table.unit, p)).collect();
        Self::from_parts((0..np).map(|p| p.to_string()).collect(), arrows, src, tgt, &compose, identity, inverse)
    }

    /// Disjoint union; ids are prefixed with `1:` and `2:`.
    pub fn disjoint_union(a: &Self, b: &Self) -> Self {
        let (o, m) = (a.n_objects(), a.n_arrows());
        let objects =
            a.objects.iter().map(|s| format!("1:{s}")).chain(b.objects.iter().map(|s| format!("2:{s}"))).collect();
        let arrows =
            a.arrows.iter().map(|s| format!("1:{s}")).chain(b.arrows.iter().map(|s| format!("2:{s}"))).collect();
        let src = a.src.iter().copied().chain(b.src.iter().map(|q| q + o)).collect();
        let tgt = a.tgt.iter().copied().chain(b.tgt.iter().map(|q| q + o)).collect();
        let compose: Vec<_> = a
            .composition_entries()
            .into_iter()
            .chain(b.composition_entries().into_iter().map(|(x, y, z)| (x + m, y + m, z + m)))
            .collect();
        let identity = a.identity.iter().copied().chain(b.identity.iter().map(|x| x + m)).collect();
        let inverse = a.inverse.iter().copied().chain(b.inverse.iter().map(|x| x + m)).collect();
        Self::from_parts(objects, arrows, src, tgt, &compose, identity, inverse).expect("disjoint union")
    }
}

/// A verified finite group multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    pub names: Vec<String>,
    table: Vec<Vec<usize>>,
    unit: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Validates a Latin square with a two-sided unit that is associative.
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || names.len() != n {
            return Err(Error::BadGroupTable(format!("{} names for a {n}-row table", names.len())));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadGroupTable(format!("row {g} has length {}", row.len())));
            }
            let seen: BTreeSet<usize> = row.iter().copied().collect();
            if seen.len() != n || seen.iter().any(|&h| h >= n) {
                return Err(Error::BadGroupTable(format!("row {g} is not a permutation")));
            }
        }
        for h in 0..n {
            let seen: BTreeSet<usize> = (0..n).map(|g| table[g][h]).collect();
            if seen.len() != n {
                return Err(Error::BadGroupTable(format!("column {h} is not a permutation")));
            }
        }
        let unit = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::BadGroupTable("no two-sided unit".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::BadGroupTable(format!(
                            "not associative at ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let inverse = (0..n).map(|g| (0..n).find(|&h| table[g][h] == unit).expect("latin square")).collect();
        Ok(Self { names, table, unit, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// `ℤ/n` with elements `0..n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadGroupTable("cyclic group of order 0".into()));
        }
        Self::new(
            (0..n).map(|k| k.to_string()).collect(),
            (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
        )
    }

    /// `S₃` as permutations of `{0,1,2}`, with `(gh)(p) = g(h(p))`.
    /// Element order matches [`s3_permutations`].
    pub fn s3() -> Self {
        let perms = s3_permutations();
        let idx = |p: [usize; 3]| perms.iter().position(|&q| q == p).expect("closed");
        let table = perms.iter().map(|g| perms.iter().map(|h| idx([g[h[0]], g[h[1]], g[h[2]]])).collect()).collect();
        let names = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
        Self::new(names, table).expect("S3 table")
    }

    /// Looks up a named built-in table: `zN` / `ZN` or `s3`.
    pub fn builtin(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase();
        if lower == "s3" {
            return Ok(Self::s3());
        }
        if let Some(n) = lower.strip_prefix('z') {
            let n: usize = n.parse().map_err(|_| Error::BadParams(format!("unknown group '{name}'")))?;
            return Self::cyclic(n);
        }
        Err(Error::BadParams(format!("unknown group '{name}'")))
    }
}

/// The six permutations of `{0,1,2}` as images `[g(0), g(1), g(2)]`,
/// identity first.
pub fn s3_permutations() -> [[usize; 3]; 6] {
    [[0, 1, 2], [1, 2, 0], [2, 0, 1], [1, 0, 2], [0, 2, 1], [2, 1, 0]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HaarMode {
    Counting,
    Normalized,
    Custom,
}

/// Uniform weights `w_q` on each t-fiber `t⁻¹(q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarSystem {
    pub weights: Vec<f64>,
    pub mode: HaarMode,
}

impl HaarSystem {
    pub fn new(g: &FiniteGroupoid, mode: HaarMode) -> Self {
        let weights = match mode {
            HaarMode::Normalized => (0..g.n_objects()).map(|q| 1.0 / g.t_fiber(q).len().max(1) as f64).collect(),
            HaarMode::Counting | HaarMode::Custom => vec![1.0; g.n_objects()],
        };
        Self { weights, mode }
    }

    /// User-supplied weights; rejected unless positive and constant on orbits.
    pub fn custom(g: &FiniteGroupoid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != g.n_objects() {
            return Err(Error::BadParams(format!("{} weights for {} objects", weights.len(), g.n_objects())));
        }
        if let Some(q) = weights.iter().position(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::BadParams(format!("weight of object {} is not positive", g.objects()[q])));
        }
        for x in 0..g.n_arrows() {
            let (a, b) = (g.src(x), g.tgt(x));
            let (wa, wb) = (weights[a], weights[b]);
            if (wa - wb).abs() > 1e-12 * wa.abs().max(wb.abs()) {
                return Err(Error::WeightNotOrbitConstant { a: g.objects()[a].clone(), b: g.objects()[b].clone() });
            }
        }
        Ok(Self { weights, mode: HaarMode::Custom })
    }

    /// Arbitrary weights without the orbit check, for mutation tests.
    pub fn unchecked(weights: Vec<f64>) -> Self {
        Self { weights, mode: HaarMode::Custom }
    }

    /// Left invariance on the indicator basis: for every arrow `a` and every
    /// indicator `f = δ_z`,
    /// `Σ_{y ∈ t⁻¹(s(a))} w_{s(a)} f(ay) = Σ_{z ∈ t⁻¹(t(a))} w_{t(a)} f(z)`.
    pub fn check_left_invariance(&self, g: &FiniteGroupoid, tol: f64) -> Check {
        let n = g.n_arrows();
        let mut res = Residual::new();
        for a in 0..n {
            let (sa, ta) = (g.src(a), g.tgt(a));
            let mut lhs = vec![0.0; n];
            for y in g.t_fiber(sa) {
                match g.compose(a, y) {
                    Some(ay) => lhs[ay] += self.weights[sa],
                    None => {
                        return Check::failed(
                            "haar_left_invariance",
                            format!("{}·{} undefined", g.arrows()[a], g.arrows()[y]),
                        )
                    }
                }
            }
            let mut rhs = vec![0.0; n];
            for z in g.t_fiber(ta) {
                rhs[z] += self.weights[ta];
            }
            for z in 0..n {
                let scale = self.weights[sa].abs().max(self.weights[ta].abs());
                res.observe((lhs[z] - rhs[z]).abs(), scale, || {
                    format!("a = {}, f = δ_{}", g.arrows()[a], g.arrows()[z])
                });
            }
        }
        Check::from_residual("haar_left_invariance", res, tol)
    }
}
