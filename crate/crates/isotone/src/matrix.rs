//! Nonnegative-matrix structure analysis: reducibility, irreducible normal
//! form, spectral radius, and row-positivity.
//!
//! The zero pattern of a nonnegative matrix defines a digraph with an edge
//! i -> j whenever M_ij != 0. A matrix is irreducible iff that digraph is
//! strongly connected (1x1 matrices count as irreducible). Its irreducible
//! normal form is a permutation similarity P^T M P that is block upper
//! triangular with irreducible diagonal blocks.

use crate::error::{Error, Result};
use crate::order::{PositiveVector, Vector};

/// Default absolute tolerance for [`NonnegMatrix::spectral_radius`].
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Default iteration budget for the power method.
pub const SPECTRAL_BUDGET: usize = 100_000;

/// A square matrix with finite entries, all >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegMatrix {
    n: usize,
    // row-major
    entries: Vec<f64>,
}

impl NonnegMatrix {
    /// Builds from row vectors; rejects ragged, empty, negative, or
    /// non-finite input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty { what: "matrix" });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, x) in row.into_iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { what: "matrix entry" });
                }
                if x < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j, value: x });
                }
                entries.push(x);
            }
        }
        Ok(NonnegMatrix { n, entries })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty { what: "matrix" });
        }
        Ok(NonnegMatrix { n, entries: vec![0.0; n * n] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        Ok(m)
    }

    /// Diagonal matrix from positive entries.
    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(d.len())?;
        for (i, &x) in d.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { what: "matrix entry" });
            }
            if x < 0.0 {
                return Err(Error::NegativeEntry { row: i, col: i, value: x });
            }
            m.entries[i * d.len() + i] = x;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Matrix-vector product as raw floats (may overflow to infinity).
    pub(crate) fn mul_slice(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }

    /// Matrix-vector product; rejects overflow to non-finite values.
    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.dim() });
        }
        Vector::new(self.mul_slice(v.as_slice()))
    }

    /// `M diag(d)`: column j scaled by d_j.
    pub fn scale_columns(&self, d: &PositiveVector) -> Result<NonnegMatrix> {
        if d.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: d.dim() });
        }
        let mut entries = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let x = self.get(i, j) * d[j];
                if !x.is_finite() {
                    return Err(Error::NonFinite { what: "scaled matrix entry" });
                }
                entries.push(x);
            }
        }
        Ok(NonnegMatrix { n: self.n, entries })
    }

    /// True iff every row holds at least one entry > 0.
    pub fn row_all_positive(&self) -> bool {
        (0..self.n).all(|i| self.row(i).iter().any(|x| *x > 0.0))
    }

    /// Adjacency lists of the zero-pattern digraph (edge i -> j iff M_ij != 0).
    fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect()
    }

    /// True iff the zero-pattern digraph is strongly connected.
    /// Every 1x1 matrix is irreducible by convention.
    pub fn is_irreducible(&self) -> bool {
        self.n == 1 || tarjan_scc(&self.adjacency()).len() == 1
    }

    /// Irreducible normal form: a permutation P and block sizes such that
    /// P^T M P is block upper triangular with irreducible diagonal blocks.
    ///
    /// Deterministic representative: strongly connected components in
    /// topological order of the condensation (sources first, which puts
    /// every nonzero off-diagonal block strictly above the diagonal), ties
    /// broken by the smallest original index in the component; indices
    /// inside each component kept in ascending order. An irreducible input
    /// yields the identity permutation with a single block.
    pub fn normal_form(&self) -> NormalFormDecomposition {
        let adj = self.adjacency();
        let mut comps = tarjan_scc(&adj);
        for comp in &mut comps {
            comp.sort_unstable();
        }
        let order = condensation_topological_order(&adj, &comps);

        let mut map = Vec::with_capacity(self.n);
        let mut block_sizes = Vec::with_capacity(order.len());
        for &c in &order {
            block_sizes.push(comps[c].len());
            map.extend_from_slice(&comps[c]);
        }
        let permutation = PermutationMatrix { map };
        let permuted = permutation.conjugate(self).expect("dims agree");
        NormalFormDecomposition { permutation, block_sizes, permuted }
    }

    /// Spectral radius of a nonnegative matrix with absolute error <= `tol`.
    ///
    /// Decomposes into the irreducible normal form and maximizes the Perron
    /// root over the diagonal blocks. Each block root is found by power
    /// iteration on B + I (primitive for irreducible B) from the all-ones
    /// vector, stopping when the Collatz-Wielandt bracket
    /// `(min_i (Av)_i/v_i, max_i (Av)_i/v_i)` narrows to `tol`.
    pub fn spectral_radius(&self, tol: f64) -> Result<f64> {
        self.spectral_radius_with_budget(tol, SPECTRAL_BUDGET)
    }

    pub fn spectral_radius_with_budget(&self, tol: f64, budget: usize) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter {
                field: "tol".into(),
                reason: "must be > 0".into(),
            });
        }
        let nf = self.normal_form();
        let mut rho: f64 = 0.0;
        for b in 0..nf.block_count() {
            let block = nf.diagonal_block(b);
            rho = rho.max(perron_root(&block, tol, budget)?);
        }
        Ok(rho)
    }
}

/// Perron root of an irreducible nonnegative block via the shifted power
/// method. Collatz-Wielandt bounds of every iterate bracket rho(B + I), so
/// the running max of lower bounds and min of upper bounds never widens.
fn perron_root(block: &NonnegMatrix, tol: f64, budget: usize) -> Result<f64> {
    let n = block.dim();
    if n == 1 {
        return Ok(block.get(0, 0).abs());
    }
    let mut v = vec![1.0f64; n];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for _ in 0..budget {
        // w = (B + I) v
        let mut w = block.mul_slice(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += vi;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (wi, vi) in w.iter().zip(&v) {
            let r = wi / vi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        lower = lower.max(lo);
        upper = upper.min(hi);
        if upper - lower <= tol {
            return Ok((lower + upper) / 2.0 - 1.0);
        }
        let scale = w.iter().cloned().fold(0.0, f64::max);
        for wi in &mut w {
            *wi /= scale;
        }
        v = w;
    }
    Err(Error::SpectralBudget { lower: lower - 1.0, upper: upper - 1.0 })
}

/// Tarjan's strongly connected components on an adjacency list.
/// Components are emitted in reverse topological order of the condensation.
fn tarjan_scc(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'g> {
        graph: &'g [Vec<usize>],
        index: usize,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        comps: Vec<Vec<usize>>,
    }

    fn strongconnect(v: usize, st: &mut State) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;

        for &w in &st.graph[v] {
            if st.idx[w].is_none() {
                strongconnect(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }

        if st.low[v] == st.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.comps.push(comp);
        }
    }

    let n = graph.len();
    let mut st = State {
        graph,
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            strongconnect(v, &mut st);
        }
    }
    st.comps
}

/// Kahn topological sort of the condensation, sources first, ties broken by
/// the smallest original vertex index in the component.
fn condensation_topological_order(adj: &[Vec<usize>], comps: &[Vec<usize>]) -> Vec<usize> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = adj.len();
    let mut comp_of = vec![0usize; n];
    for (cid, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = cid;
        }
    }
    let ncomp = comps.len();
    let mut succ = vec![Vec::new(); ncomp];
    let mut indeg = vec![0usize; ncomp];
    for u in 0..n {
        for &v in &adj[u] {
            let (cu, cv) = (comp_of[u], comp_of[v]);
            if cu != cv {
                succ[cu].push(cv);
            }
        }
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
        for &t in s.iter() {
            indeg[t] += 1;
        }
    }

    let key = |c: usize| comps[c][0]; // components hold sorted indices
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..ncomp)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((key(c), c)))
        .collect();
    let mut order = Vec::with_capacity(ncomp);
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &t in &succ[c] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                heap.push(Reverse((key(t), t)));
            }
        }
    }
    debug_assert_eq!(order.len(), ncomp);
    order
}

/// A permutation of {0, ..., n-1} stored as an index map: `map[i]` is the
/// original index placed at position i, i.e. as a matrix P_ij = [i == map[j]],
/// so that `(P^T v)_i = v[map[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationMatrix {
    map: Vec<usize>,
}

impl PermutationMatrix {
    pub fn identity(n: usize) -> Self {
        PermutationMatrix { map: (0..n).collect() }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation { n });
            }
            seen[i] = true;
        }
        Ok(PermutationMatrix { map })
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> PermutationMatrix {
        let mut inv = vec![0usize; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        PermutationMatrix { map: inv }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.map.len() {
            return Err(Error::DimensionMismatch { expected: self.map.len(), found });
        }
        Ok(())
    }

    /// `P^T v`: position i of the result takes the original entry map[i].
    pub fn permute(&self, v: &Vector) -> Result<Vector> {
        self.check_dim(v.dim())?;
        Vector::new(self.map.iter().map(|&m| v[m]).collect())
    }

    /// `P v`: inverse of [`Self::permute`].
    pub fn unpermute(&self, v: &Vector) -> Result<Vector> {
        self.check_dim(v.dim())?;
        let mut out = vec![0.0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            out[m] = v[i];
        }
        Vector::new(out)
    }

    /// `P^T M P`: entry (i, j) of the result is M[map[i]][map[j]].
    pub fn conjugate(&self, m: &NonnegMatrix) -> Result<NonnegMatrix> {
        self.check_dim(m.dim())?;
        let n = self.map.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(m.get(self.map[i], self.map[j]));
            }
        }
        Ok(NonnegMatrix { n, entries })
    }
}

/// Permutation plus block structure realizing the irreducible normal form.
#[derive(Debug, Clone)]
pub struct NormalFormDecomposition {
    permutation: PermutationMatrix,
    block_sizes: Vec<usize>,
    permuted: NonnegMatrix,
}

impl NormalFormDecomposition {
    pub fn permutation(&self) -> &PermutationMatrix {
        &self.permutation
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }

    /// The permuted matrix P^T M P.
    pub fn permuted(&self) -> &NonnegMatrix {
        &self.permuted
    }

    /// Index range of block b inside the permuted matrix.
    pub fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        let start: usize = self.block_sizes[..b].iter().sum();
        start..start + self.block_sizes[b]
    }

    /// Copy of diagonal block b.
    pub fn diagonal_block(&self, b: usize) -> NonnegMatrix {
        let r = self.block_range(b);
        let n = r.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in r.clone() {
            for j in r.clone() {
                entries.push(self.permuted.get(i, j));
            }
        }
        NonnegMatrix { n, entries }
    }

    /// Reassembles the original matrix `P (P^T M P) P^T` exactly.
    pub fn reconstruct(&self) -> NonnegMatrix {
        self.permutation
            .inverse()
            .conjugate(&self.permuted)
            .expect("dims agree")
    }

    /// True iff every block strictly below the diagonal is identically zero.
    pub fn is_block_upper_triangular(&self) -> bool {
        let n = self.permuted.dim();
        let mut block_of = vec![0usize; n];
        for b in 0..self.block_count() {
            for i in self.block_range(b) {
                block_of[i] = b;
            }
        }
        (0..n).all(|i| (0..n).all(|j| self.permuted.get(i, j) == 0.0 || block_of[i] <= block_of[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        assert!(m(&[&[0.0]]).is_irreducible());
        assert!(m(&[&[20.0, 18.0], &[20.0, 45.0]]).is_irreducible());
        assert!(!m(&[&[1.0, 1.0], &[0.0, 1.0]]).is_irreducible());
    }

    #[test]
    fn row_positivity_examples() {
        assert!(m(&[&[20.0, 18.0], &[20.0, 45.0]]).row_all_positive());
        assert!(!m(&[&[0.0, 0.0], &[1.0, 0.0]]).row_all_positive());
        assert!(m(&[&[0.0, 1.0], &[1.0, 0.0]]).row_all_positive());
    }

    #[test]
    fn normal_form_irreducible_is_identity() {
        let nf = m(&[&[20.0, 18.0], &[20.0, 45.0]]).normal_form();
        assert!(nf.permutation().is_identity());
        assert_eq!(nf.block_sizes(), &[2]);
    }

    #[test]
    fn normal_form_orders_single_edge_upper() {
        let a = m(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let nf = a.normal_form();
        assert_eq!(nf.block_sizes(), &[1, 1]);
        assert_eq!(nf.permuted(), &m(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert_eq!(nf.reconstruct(), a);
    }

    #[test]
    fn normal_form_idempotent_on_normal_form_input() {
        // 3 blocks of sizes 2, 1, 2; already block upper triangular.
        let a = m(&[
            &[1.0, 2.0, 0.5, 0.0, 3.0],
            &[1.0, 0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 2.0, 2.0],
            &[0.0, 0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 4.0, 0.0],
        ]);
        let nf = a.normal_form();
        assert!(nf.permutation().is_identity());
        assert_eq!(nf.block_sizes(), &[2, 1, 2]);
        assert_eq!(nf.permuted(), &a);
    }

    #[test]
    fn normal_form_structure_invariants() {
        let a = m(&[
            &[0.0, 0.0, 0.0, 1.0],
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, 3.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 5.0],
        ]);
        let nf = a.normal_form();
        assert_eq!(nf.reconstruct(), a);
        assert!(nf.is_block_upper_triangular());
        for b in 0..nf.block_count() {
            assert!(nf.diagonal_block(b).is_irreducible());
        }
    }

    #[test]
    fn spectral_radius_identity_and_period_two() {
        let tol = 1e-10;
        assert!((NonnegMatrix::identity(4).unwrap().spectral_radius(tol).unwrap() - 1.0).abs() <= tol);
        let swap = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!((swap.spectral_radius(tol).unwrap() - 1.0).abs() <= tol);
    }

    #[test]
    fn spectral_radius_scaled_circuit_matrix() {
        // M diag(1/(v ∘ v)) for M = [[20,18],[20,45]], v = (22.94, 20.95);
        // closed-form 2x2 eigenvalue gives 0.1212517293875244.
        let mm = m(&[&[20.0, 18.0], &[20.0, 45.0]]);
        let v = PositiveVector::new(vec![22.94, 20.95]).unwrap();
        let scaled = mm.scale_columns(&v.hadamard(&v).unwrap().reciprocal()).unwrap();
        let rho = scaled.spectral_radius(1e-12).unwrap();
        assert!((rho - 0.1212517293875244).abs() < 1e-9, "rho = {rho}");
        assert!(rho < 1.0);
    }

    #[test]
    fn spectral_radius_budget_error_carries_bracket() {
        let a = m(&[&[1.0, 2.0, 0.0], &[0.5, 0.0, 1.0], &[3.0, 1.0, 0.5]]);
        match a.spectral_radius_with_budget(1e-14, 2) {
            Err(Error::SpectralBudget { lower, upper }) => {
                assert!(lower <= upper);
                let truth = a.spectral_radius(1e-12).unwrap();
                assert!(lower <= truth + 1e-12 && truth <= upper + 1e-12);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn permutation_examples() {
        let id = PermutationMatrix::identity(2);
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(id.conjugate(&a).unwrap(), a);

        let swap = PermutationMatrix::from_map(vec![1, 0]).unwrap();
        assert_eq!(swap.conjugate(&a).unwrap(), m(&[&[4.0, 3.0], &[2.0, 1.0]]));

        let v = Vector::new(vec![10.0, 20.0]).unwrap();
        let pv = swap.permute(&v).unwrap();
        assert_eq!(pv.as_slice(), &[20.0, 10.0]);
        assert_eq!(swap.unpermute(&pv).unwrap(), v);
    }

    #[test]
    fn permutation_rejects_non_bijections() {
        assert!(PermutationMatrix::from_map(vec![0, 0]).is_err());
        assert!(PermutationMatrix::from_map(vec![0, 2]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy(n: usize) -> impl Strategy<Value = NonnegMatrix> {
            proptest::collection::vec(proptest::collection::vec(0.0..10.0f64, n), n)
                .prop_map(|rows| NonnegMatrix::from_rows(rows).unwrap())
        }

        fn sparse_matrix_strategy(n: usize) -> impl Strategy<Value = NonnegMatrix> {
            proptest::collection::vec(
                proptest::collection::vec(
                    prop_oneof![3 => Just(0.0f64), 2 => 0.1..10.0f64],
                    n,
                ),
                n,
            )
            .prop_map(|rows| NonnegMatrix::from_rows(rows).unwrap())
        }

        fn perm_strategy(n: usize) -> impl Strategy<Value = PermutationMatrix> {
            Just(()).prop_perturb(move |_, mut rng| {
                let mut map: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    let j = (rng.next_u64() as usize) % (i + 1);
                    map.swap(i, j);
                }
                PermutationMatrix::from_map(map).unwrap()
            })
        }

        fn positive_vec(n: usize) -> impl Strategy<Value = PositiveVector> {
            proptest::collection::vec(0.1..10.0f64, n)
                .prop_map(|v| PositiveVector::new(v).unwrap())
        }

        /// Random irreducible matrices: a full cycle guarantees strong
        /// connectivity, extra sparse entries vary the pattern.
        fn irreducible_strategy(n: usize) -> impl Strategy<Value = NonnegMatrix> {
            (sparse_matrix_strategy(n), proptest::collection::vec(0.1..5.0f64, n)).prop_map(
                move |(base, cycle)| {
                    let mut rows: Vec<Vec<f64>> = (0..n).map(|i| base.row(i).to_vec()).collect();
                    for (i, w) in cycle.iter().enumerate() {
                        rows[i][(i + 1) % n] = *w;
                    }
                    NonnegMatrix::from_rows(rows).unwrap()
                },
            )
        }

        /// Largest eigenvalue modulus via the companion matrix of the
        /// characteristic polynomial; independent of the power iteration.
        fn charpoly_rho(a: &NonnegMatrix) -> f64 {
            let n = a.dim();
            // characteristic polynomial coefficients, leading 1 implicit
            let coeffs: Vec<f64> = match n {
                2 => {
                    let tr = a.get(0, 0) + a.get(1, 1);
                    let det = a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0);
                    vec![-tr, det]
                }
                3 => {
                    let tr = a.get(0, 0) + a.get(1, 1) + a.get(2, 2);
                    let minors = (a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0))
                        + (a.get(0, 0) * a.get(2, 2) - a.get(0, 2) * a.get(2, 0))
                        + (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1));
                    let det = a.get(0, 0)
                        * (a.get(1, 1) * a.get(2, 2) - a.get(1, 2) * a.get(2, 1))
                        - a.get(0, 1) * (a.get(1, 0) * a.get(2, 2) - a.get(1, 2) * a.get(2, 0))
                        + a.get(0, 2) * (a.get(1, 0) * a.get(2, 1) - a.get(1, 1) * a.get(2, 0));
                    vec![-tr, minors, -det]
                }
                _ => unreachable!("oracle covers n <= 3"),
            };
            let mut companion = nalgebra::DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                companion[(i, i - 1)] = 1.0;
            }
            for (i, c) in coeffs.iter().enumerate() {
                companion[(0, i)] = -c;
            }
            companion
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        }

        proptest! {
            #[test]
            fn conjugation_preserves_spectral_radius(a in matrix_strategy(4), p in perm_strategy(4)) {
                let tol = 1e-10;
                let lhs = p.conjugate(&a).unwrap().spectral_radius(tol).unwrap();
                let rhs = a.spectral_radius(tol).unwrap();
                prop_assert!((lhs - rhs).abs() <= 20.0 * tol * (1.0 + rhs));
            }

            #[test]
            fn power_iteration_matches_charpoly_roots_2x2(a in matrix_strategy(2)) {
                let tol = 1e-10;
                let rho = a.spectral_radius(tol).unwrap();
                prop_assert!((rho - charpoly_rho(&a)).abs() <= 10.0 * tol * (1.0 + rho));
            }

            #[test]
            fn power_iteration_matches_charpoly_roots_3x3(a in matrix_strategy(3)) {
                let tol = 1e-10;
                let rho = a.spectral_radius(tol).unwrap();
                // charpoly-root oracle itself is accurate to ~1e-12 relative
                prop_assert!((rho - charpoly_rho(&a)).abs() <= 10.0 * tol * (1.0 + rho) + 1e-9);
            }

            #[test]
            fn scaling_keeps_irreducibility(a in sparse_matrix_strategy(4), d in positive_vec(4)) {
                let scaled = a.scale_columns(&d).unwrap();
                prop_assert_eq!(a.is_irreducible(), scaled.is_irreducible());
            }

            #[test]
            fn rho_strictly_monotone_on_irreducible_scalings(
                a in irreducible_strategy(3),
                d in positive_vec(3),
                bump in 0usize..3,
            ) {
                let mut e = d.as_slice().to_vec();
                e[bump] += 1.0;
                let e = PositiveVector::new(e).unwrap();
                let tol = 1e-11;
                let lo = a.scale_columns(&d).unwrap().spectral_radius(tol).unwrap();
                let hi = a.scale_columns(&e).unwrap().spectral_radius(tol).unwrap();
                prop_assert!(lo < hi, "rho must grow strictly: {lo} vs {hi}");
            }

            #[test]
            fn normal_form_reconstructs_and_is_triangular(a in sparse_matrix_strategy(5)) {
                let nf = a.normal_form();
                prop_assert_eq!(nf.reconstruct(), a);
                prop_assert!(nf.is_block_upper_triangular());
                for b in 0..nf.block_count() {
                    prop_assert!(nf.diagonal_block(b).is_irreducible());
                }
            }

            #[test]
            fn permutation_footnote_identities(p in perm_strategy(4), y in positive_vec(4), z in positive_vec(4)) {
                // P^T (y ∘ z) = P^T y ∘ P^T z
                let lhs = p.permute(&y.as_vector().hadamard(z.as_vector()).unwrap()).unwrap();
                let rhs = p.permute(y.as_vector()).unwrap()
                    .hadamard(&p.permute(z.as_vector()).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                // P^T (1/y) = 1 / (P^T y)
                let lhs = p.permute(y.reciprocal().as_vector()).unwrap();
                let rhs = p.permute(y.as_vector()).unwrap()
                    .into_positive().unwrap().reciprocal();
                prop_assert_eq!(lhs, rhs.into());
            }
        }
    }
}
