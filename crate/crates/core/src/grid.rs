//! Hierarchical hat basis on [0, 1]^D: index sets, grid points, surpluses,
//! truncated expansions, and the counting quantities theta_n and tau_N.
//!
//! A basis function is indexed by a level vector l (component-wise >= 1) and
//! a position vector i of odd integers with 1 <= i_j <= 2^{l_j} - 1. The
//! level-n truncation keeps every index with |l|_1 <= n + D - 1; theta_n is
//! the number of such indices and tau_N the largest budget whose theta still
//! fits below N.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// L^p order for norm formulas; conjugate pairs satisfy 1/p + 1/q = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormOrder {
    Finite(f64),
    Infinity,
}

impl NormOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(NormOrder::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(NormOrder::Finite(p))
        } else {
            Err(Error::BadNormOrder { p })
        }
    }

    pub fn value(self) -> f64 {
        match self {
            NormOrder::Finite(p) => p,
            NormOrder::Infinity => f64::INFINITY,
        }
    }

    pub fn conjugate(self) -> NormOrder {
        match self {
            NormOrder::Infinity => NormOrder::Finite(1.0),
            NormOrder::Finite(p) if p > 1.0 => NormOrder::Finite(p / (p - 1.0)),
            NormOrder::Finite(_) => NormOrder::Infinity,
        }
    }
}

/// One hierarchical basis index (l, i).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelIndex {
    l: Vec<u32>,
    i: Vec<u64>,
}

impl LevelIndex {
    pub fn new(l: Vec<u32>, i: Vec<u64>) -> Result<Self> {
        if l.len() != i.len() || l.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "level/position vectors",
                expected: l.len().max(1),
                got: i.len(),
            });
        }
        for (&lj, &ij) in l.iter().zip(&i) {
            check_1d(lj, ij)?;
        }
        Ok(Self { l, i })
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.l
    }

    pub fn positions(&self) -> &[u64] {
        &self.i
    }

    /// |l|_1.
    pub fn level_sum(&self) -> u32 {
        self.l.iter().sum()
    }

    /// The grid point i * 2^{-l}, the peak of the basis function.
    pub fn grid_point(&self) -> Vec<f64> {
        self.l
            .iter()
            .zip(&self.i)
            .map(|(&l, &i)| i as f64 * 2f64.powi(-(l as i32)))
            .collect()
    }

    /// Per-coordinate support [(i-1) 2^{-l}, (i+1) 2^{-l}].
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.l
            .iter()
            .zip(&self.i)
            .map(|(&l, &i)| {
                let h = 2f64.powi(-(l as i32));
                ((i - 1) as f64 * h, (i + 1) as f64 * h)
            })
            .collect()
    }
}

impl std::fmt::Display for LevelIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "l={:?} i={:?}", self.l, self.i)
    }
}

fn check_1d(l: u32, i: u64) -> Result<()> {
    if l < 1 {
        return Err(Error::BadLevel { l });
    }
    if l >= 63 {
        return Err(Error::BadPosition { l, i });
    }
    if i.is_multiple_of(2) || i < 1 || i > (1u64 << l) - 1 {
        return Err(Error::BadPosition { l, i });
    }
    Ok(())
}

/// 1D hat at level l, position i: max(0, 1 - |2^l x - i|).
pub fn hat_1d(l: u32, i: u64, x: f64) -> Result<f64> {
    check_1d(l, i)?;
    Ok(hat_1d_unchecked(l, i, x))
}

fn hat_1d_unchecked(l: u32, i: u64, x: f64) -> f64 {
    let u = 2f64.powi(l as i32) * x - i as f64;
    (1.0 - u.abs()).max(0.0)
}

/// Product of 1D hats across coordinates.
pub fn basis_nd(li: &LevelIndex, x: &[f64]) -> Result<f64> {
    if x.len() != li.dim() {
        return Err(Error::DimensionMismatch {
            context: "basis evaluation point",
            expected: li.dim(),
            got: x.len(),
        });
    }
    let mut acc = 1.0;
    for ((&l, &i), &xj) in li.l.iter().zip(&li.i).zip(x) {
        acc *= hat_1d_unchecked(l, i, xj);
        if acc == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(acc)
}

/// L^p(Omega) norm of a basis function: (2/(p+1))^{D/p} 2^{-|l|_1/p} for
/// finite p, and 1 at p = infinity.
pub fn basis_norm(li: &LevelIndex, p: NormOrder) -> f64 {
    match p {
        NormOrder::Infinity => 1.0,
        NormOrder::Finite(p) => {
            let dim = li.dim() as f64;
            (2.0 / (p + 1.0)).powf(dim / p) * 2f64.powf(-(li.level_sum() as f64) / p)
        }
    }
}

/// Bound on the hierarchical coefficient of a unit-norm function:
/// 2^{-|l|_1 - D} (2/(q+1))^{D/q} 2^{-|l|_1/q} * norm, q conjugate to p.
pub fn coefficient_bound(li: &LevelIndex, p: NormOrder, f_norm: f64) -> f64 {
    let dim = li.dim() as f64;
    let lsum = li.level_sum() as f64;
    let q_factor = match p.conjugate() {
        NormOrder::Infinity => 1.0,
        NormOrder::Finite(q) => (2.0 / (q + 1.0)).powf(dim / q) * 2f64.powf(-lsum / q),
    };
    2f64.powf(-lsum - dim) * q_factor * f_norm
}

/// All indices with |l|_1 <= n + D - 1, ordered lexicographically on
/// (|l|_1, l, i). This order is the fixed enumeration used for readout
/// placement, so it must never change.
pub fn enumerate_indices(dim: usize, n: u32) -> Result<Vec<LevelIndex>> {
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            context: "enumeration dimension",
            expected: 1,
            got: 0,
        });
    }
    if n < 1 {
        return Err(Error::BadLevel { l: n });
    }
    let budget = n + dim as u32 - 1;
    let mut out = Vec::new();
    for s in dim as u32..=budget {
        let mut level = Vec::with_capacity(dim);
        compositions(s, dim, &mut level, &mut |l| {
            let mut pos = Vec::with_capacity(dim);
            odd_positions(l, 0, &mut pos, &mut |i| {
                out.push(LevelIndex {
                    l: l.to_vec(),
                    i: i.to_vec(),
                });
            });
        });
    }
    Ok(out)
}

/// Compositions of `total` into `parts` components, each >= 1, lexicographic.
fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if parts == 1 {
        prefix.push(total);
        f(prefix);
        prefix.pop();
        return;
    }
    // Leave at least parts-1 units for the remaining components.
    for first in 1..=total - (parts as u32 - 1) {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, f);
        prefix.pop();
    }
}

fn odd_positions(l: &[u32], at: usize, prefix: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if at == l.len() {
        f(prefix);
        return;
    }
    let mut i = 1u64;
    let top = (1u64 << l[at]) - 1;
    while i <= top {
        prefix.push(i);
        odd_positions(l, at + 1, prefix, f);
        prefix.pop();
        i += 2;
    }
}

/// theta_n = sum_{s=D}^{n+D-1} C(s-1, D-1) 2^{s-D}: the number of indices
/// enumerate_indices(D, n) returns, computed without materializing them.
/// Saturates at u64::MAX.
pub fn theta_count(dim: usize, n: u32) -> u64 {
    let d = dim as u32;
    let mut total = 0u64;
    for s in d..=(n + d - 1) {
        let combos = binomial(s - 1, d - 1);
        let per = 1u128 << (s - d).min(127);
        let add = combos.saturating_mul(per);
        total = total.saturating_add(add.min(u64::MAX as u128) as u64);
    }
    total
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.saturating_mul((n - j) as u128) / (j + 1) as u128;
    }
    acc
}

/// Largest n with theta_n <= N; defined for N >= theta_1 = 1.
pub fn tau_n(big_n: u64, dim: usize) -> Result<u32> {
    if big_n < 1 {
        return Err(Error::Unsupported("tau is defined for N >= theta_1 = 1"));
    }
    let mut n = 1u32;
    while theta_count(dim, n + 1) <= big_n {
        n += 1;
    }
    Ok(n)
}

/// A truncated expansion: terms (l, i, v) with |l|_1 <= n + D - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseExpansion {
    dim: usize,
    budget: u32,
    terms: Vec<(LevelIndex, f64)>,
}

impl SparseExpansion {
    pub fn empty(dim: usize, n: u32) -> Self {
        Self {
            dim,
            budget: n,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(dim: usize, n: u32, terms: Vec<(LevelIndex, f64)>) -> Result<Self> {
        let budget = n as u64 + dim as u64 - 1;
        let mut seen = BTreeSet::new();
        for (li, _) in &terms {
            if li.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "expansion term dimension",
                    expected: dim,
                    got: li.dim(),
                });
            }
            if u64::from(li.level_sum()) > budget {
                return Err(Error::BudgetExceeded(li.to_string(), budget));
            }
            if !seen.insert((li.l.clone(), li.i.clone())) {
                return Err(Error::DuplicateTerm(li.to_string()));
            }
        }
        Ok(Self {
            dim,
            budget: n,
            terms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn terms(&self) -> &[(LevelIndex, f64)] {
        &self.terms
    }

    pub fn coefficient(&self, li: &LevelIndex) -> f64 {
        self.terms
            .iter()
            .find(|(t, _)| t == li)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    pub fn abs_coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "expansion evaluation point",
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut acc = 0.0;
        for (li, v) in &self.terms {
            acc += v * basis_nd(li, x)?;
        }
        Ok(acc)
    }
}

/// 1D hierarchical surplus of f at (l, i): f(x) - (f(x-h) + f(x+h)) / 2.
pub fn surplus_1d(f: &dyn Fn(f64) -> f64, l: u32, i: u64) -> Result<f64> {
    check_1d(l, i)?;
    let h = 2f64.powi(-(l as i32));
    let x = i as f64 * h;
    Ok(f(x) - 0.5 * (f(x - h) + f(x + h)))
}

/// Expansion of a separable product f(x) = prod_j f_j(x_j) with every factor
/// vanishing at 0 and 1: each coefficient is the product of the univariate
/// surpluses. Terms whose coefficient is exactly zero are dropped.
pub fn hierarchize_separable(
    factors: &[&dyn Fn(f64) -> f64],
    n: u32,
) -> Result<SparseExpansion> {
    for (index, f) in factors.iter().enumerate() {
        for at in [0.0, 1.0] {
            let value = f(at);
            if value != 0.0 {
                return Err(Error::NonVanishingFactor { index, at, value });
            }
        }
    }
    let dim = factors.len();
    let mut terms = Vec::new();
    for li in enumerate_indices(dim, n)? {
        let mut v = 1.0;
        for (j, (&l, &i)) in li.l.iter().zip(&li.i).enumerate() {
            v *= surplus_1d(factors[j], l, i)?;
            if v == 0.0 {
                break;
            }
        }
        if v != 0.0 {
            terms.push((li, v));
        }
    }
    SparseExpansion::from_terms(dim, n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn li(l: &[u32], i: &[u64]) -> LevelIndex {
        LevelIndex::new(l.to_vec(), i.to_vec()).unwrap()
    }

    #[test]
    fn index_validation() {
        assert!(LevelIndex::new(vec![1], vec![1]).is_ok());
        assert!(matches!(
            LevelIndex::new(vec![0], vec![1]),
            Err(Error::BadLevel { l: 0 })
        ));
        // Even position.
        assert!(LevelIndex::new(vec![2], vec![2]).is_err());
        // Out of range for the level.
        assert!(LevelIndex::new(vec![1], vec![3]).is_err());
        // Length mismatch.
        assert!(LevelIndex::new(vec![1, 1], vec![1]).is_err());
    }

    #[test]
    fn hat_values() {
        assert_eq!(hat_1d(1, 1, 0.5).unwrap(), 1.0);
        assert_eq!(hat_1d(1, 1, 0.0).unwrap(), 0.0);
        assert_eq!(hat_1d(1, 1, 1.0).unwrap(), 0.0);
        assert_eq!(hat_1d(2, 1, 0.125).unwrap(), 0.5);
        assert_eq!(hat_1d(2, 3, 0.75).unwrap(), 1.0);
        assert!(hat_1d(2, 4, 0.5).is_err());
    }

    #[test]
    fn basis_peak_and_boundary() {
        let b = li(&[1, 2], &[1, 3]);
        assert_eq!(basis_nd(&b, &b.grid_point()).unwrap(), 1.0);
        // One coordinate on a support edge kills the product.
        assert_eq!(basis_nd(&b, &[0.5, 0.5]).unwrap(), 0.0);
        assert!(basis_nd(&b, &[0.5]).is_err());
    }

    #[test]
    fn norm_formula_matches_quadrature() {
        // Piecewise-quadratic integrand: Simpson on a dyadic mesh is exact
        // up to rounding, well within the 1e-6 relative target.
        fn simpson_1d(f: &dyn Fn(f64) -> f64, cells: usize) -> f64 {
            let h = 1.0 / cells as f64;
            let mut acc = 0.0;
            for c in 0..cells {
                let a = c as f64 * h;
                acc += h / 6.0 * (f(a) + 4.0 * f(a + h / 2.0) + f(a + h));
            }
            acc
        }
        for (l, i) in [(1u32, 1u64), (2, 1), (2, 3), (3, 5)] {
            let one = li(&[l], &[i]);
            let p = NormOrder::Finite(2.0);
            let num = simpson_1d(&|x| hat_1d(l, i, x).unwrap().powi(2), 1 << (l + 2)).sqrt();
            let formula = basis_norm(&one, p);
            assert!((num - formula).abs() <= 1e-6 * formula, "l={l} i={i}");
            assert_eq!(basis_norm(&one, NormOrder::Infinity), 1.0);
        }
        // D = 2 via tensor-product quadrature.
        let two = li(&[2, 1], &[3, 1]);
        let nx = simpson_1d(&|x| hat_1d(2, 3, x).unwrap().powi(2), 1 << 4);
        let ny = simpson_1d(&|y| hat_1d(1, 1, y).unwrap().powi(2), 1 << 3);
        let num = (nx * ny).sqrt();
        let formula = basis_norm(&two, NormOrder::Finite(2.0));
        assert!((num - formula).abs() <= 1e-6 * formula);
    }

    #[test]
    fn enumeration_counts_match_formula() {
        // D = 4 reference values, then formula-vs-enumeration for several D.
        assert_eq!(theta_count(4, 1), 1);
        assert_eq!(theta_count(4, 2), 9);
        assert_eq!(theta_count(4, 3), 49);
        assert_eq!(theta_count(4, 4), 209);
        assert_eq!(theta_count(16, 1), 1);
        assert_eq!(theta_count(16, 2), 33);
        for dim in [1usize, 2, 3, 4] {
            for n in 1..=5u32 {
                let listed = enumerate_indices(dim, n).unwrap();
                assert_eq!(listed.len() as u64, theta_count(dim, n), "D={dim} n={n}");
                // Deterministic, duplicate-free, invariant-respecting.
                let set: BTreeSet<_> = listed.iter().collect();
                assert_eq!(set.len(), listed.len());
            }
        }
        let listed = enumerate_indices(16, 2).unwrap();
        assert_eq!(listed.len(), 33);
    }

    #[test]
    fn enumeration_order_is_lexicographic_on_sum_then_level_then_position() {
        let listed = enumerate_indices(2, 3).unwrap();
        let keys: Vec<_> = listed
            .iter()
            .map(|t| (t.level_sum(), t.l.clone(), t.i.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(listed[0], li(&[1, 1], &[1, 1]));
        assert_eq!(listed[1], li(&[1, 2], &[1, 1]));
        assert_eq!(listed[2], li(&[1, 2], &[1, 3]));
        assert_eq!(listed[3], li(&[2, 1], &[1, 1]));
    }

    #[test]
    fn theta_is_nondecreasing() {
        for dim in [2usize, 4, 16] {
            for n in 1..8 {
                assert!(theta_count(dim, n + 1) >= theta_count(dim, n));
            }
        }
    }

    #[test]
    fn tau_reference_values_and_bracket() {
        assert_eq!(tau_n(9, 4).unwrap(), 2);
        assert_eq!(tau_n(8, 4).unwrap(), 1);
        assert_eq!(tau_n(1, 4).unwrap(), 1);
        assert!(tau_n(0, 4).is_err());
        for big_n in 10..=10_000u64 {
            let tau = tau_n(big_n, 4).unwrap() as f64;
            let log_n = (big_n as f64).log2();
            let lower = (big_n as f64 / log_n.powi(3)).log2();
            assert!(lower <= tau && tau <= log_n, "N={big_n} tau={tau}");
        }
    }

    #[test]
    fn disjoint_interiors_at_fixed_level() {
        let level = vec![3u32];
        let indices: Vec<u64> = (1..8).step_by(2).collect();
        for a in 0..indices.len() {
            for b in a + 1..indices.len() {
                let sa = li(&level, &[indices[a]]).support()[0];
                let sb = li(&level, &[indices[b]]).support()[0];
                let overlap = sa.1.min(sb.1) - sa.0.max(sb.0);
                assert!(overlap <= 0.0, "supports {sa:?} {sb:?} overlap");
            }
        }
    }

    #[test]
    fn surplus_of_basis_function_is_kronecker() {
        let target = (2u32, 3u64);
        let f = move |x: f64| hat_1d_unchecked(target.0, target.1, x);
        for l in 1..=4u32 {
            let mut i = 1u64;
            while i < (1 << l) {
                let w = surplus_1d(&f, l, i).unwrap();
                if (l, i) == target {
                    assert_eq!(w, 1.0);
                } else {
                    assert_eq!(w, 0.0, "l={l} i={i}");
                }
                i += 2;
            }
        }
    }

    #[test]
    fn surplus_of_parabola() {
        let f = |x: f64| x * (1.0 - x);
        assert_eq!(surplus_1d(&f, 1, 1).unwrap(), 0.25);
        assert_eq!(surplus_1d(&f, 2, 1).unwrap(), 0.0625);
        assert_eq!(surplus_1d(&f, 2, 3).unwrap(), 0.0625);
        // Level-independent of position: h^2 exactly.
        for l in 1..=6u32 {
            let mut i = 1u64;
            while i < (1 << l) {
                assert_eq!(surplus_1d(&f, l, i).unwrap(), 4f64.powi(-(l as i32)));
                i += 2;
            }
        }
    }

    #[test]
    fn hierarchize_reproduces_a_basis_function() {
        let f0 = |x: f64| hat_1d_unchecked(2, 1, x);
        let f1 = |x: f64| hat_1d_unchecked(1, 1, x);
        let exp = hierarchize_separable(&[&f0, &f1], 4).unwrap();
        assert_eq!(exp.terms().len(), 1);
        let (term, v) = &exp.terms()[0];
        assert_eq!(*term, li(&[2, 1], &[1, 1]));
        assert_eq!(*v, 1.0);
        // Truncation is exact for in-budget basis functions.
        for s in 0..100 {
            let x = [s as f64 / 99.0, (99 - s) as f64 / 99.0];
            let want = f0(x[0]) * f1(x[1]);
            assert!((exp.eval(&x).unwrap() - want).abs() <= 1e-15);
        }
    }

    #[test]
    fn hierarchize_rejects_nonvanishing_factors() {
        let bad = |x: f64| x * x;
        let good = |x: f64| x * (1.0 - x);
        let err = hierarchize_separable(&[&good, &bad], 2).unwrap_err();
        assert!(matches!(err, Error::NonVanishingFactor { index: 1, .. }));
    }

    #[test]
    fn parabola_expansion_converges_and_respects_coefficient_bound() {
        // f(x, y) = x(1-x) y(1-y) has 1D surpluses 4^{-l}; its X^{2,p} norm
        // is driven by the constant mixed derivative, |d^4 f / dx^2 dy^2| = 4.
        let f = |x: f64| x * (1.0 - x);
        let exp = hierarchize_separable(&[&f, &f], 6).unwrap();
        for (term, v) in exp.terms() {
            assert_eq!(*v, 4f64.powi(-(term.level_sum() as i32)));
            // Eq-style bound at q = 1 with norm factor 4 = 2^D: equality.
            let bound = coefficient_bound(term, NormOrder::Infinity, 4.0);
            assert!(v.abs() <= bound + 1e-18);
            assert!((v.abs() - bound).abs() <= 1e-15 * bound, "tight at q=1");
        }
        // Pointwise convergence on a sample grid.
        let mut worst: f64 = 0.0;
        for a in 0..=20 {
            for b in 0..=20 {
                let x = [a as f64 / 20.0, b as f64 / 20.0];
                let got = exp.eval(&x).unwrap();
                let want = f(x[0]) * f(x[1]);
                worst = worst.max((got - want).abs());
            }
        }
        assert!(worst <= 4e-4, "worst={worst}");
    }

    #[test]
    fn expansion_validation() {
        let t = li(&[1, 1], &[1, 1]);
        assert!(matches!(
            SparseExpansion::from_terms(2, 1, vec![(t.clone(), 1.0), (t.clone(), 2.0)]),
            Err(Error::DuplicateTerm(_))
        ));
        let deep = li(&[3, 3], &[1, 1]);
        assert!(matches!(
            SparseExpansion::from_terms(2, 1, vec![(deep, 1.0)]),
            Err(Error::BudgetExceeded(..))
        ));
        let wrong_dim = li(&[1], &[1]);
        assert!(SparseExpansion::from_terms(2, 1, vec![(wrong_dim, 1.0)]).is_err());
        let empty = SparseExpansion::empty(3, 2);
        assert_eq!(empty.eval(&[0.1, 0.2, 0.3]).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_orders() {
        assert_eq!(NormOrder::Infinity.conjugate(), NormOrder::Finite(1.0));
        assert_eq!(NormOrder::Finite(1.0).conjugate(), NormOrder::Infinity);
        assert_eq!(NormOrder::Finite(2.0).conjugate(), NormOrder::Finite(2.0));
        assert!(NormOrder::new(0.5).is_err());
        assert!(NormOrder::new(f64::NAN).is_err());
        assert!(NormOrder::new(f64::INFINITY).is_ok());
    }

    proptest! {
        #[test]
        fn hat_stays_in_unit_interval(l in 1u32..10, odd in 0u64..256, x in 0f64..=1.0) {
            let top = (1u64 << l) - 1;
            let i = (2 * odd + 1).min(top);
            let v = hat_1d(l, i, x).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            // Support check: outside [(i-1)h, (i+1)h] the hat vanishes.
            let h = 2f64.powi(-(l as i32));
            if x < (i - 1) as f64 * h || x > (i + 1) as f64 * h {
                prop_assert_eq!(v, 0.0);
            }
        }

        #[test]
        fn enumerated_indices_respect_budget(dim in 1usize..4, n in 1u32..5) {
            let listed = enumerate_indices(dim, n).unwrap();
            for t in &listed {
                // Budget: |l|_1 <= n + D - 1.
                prop_assert!(t.level_sum() < n + dim as u32);
                prop_assert_eq!(t.dim(), dim);
            }
        }

        #[test]
        fn tau_is_monotone_in_budget(a in 1u64..5000, b in 1u64..5000) {
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(tau_n(lo, 4).unwrap() <= tau_n(hi, 4).unwrap());
        }
    }
}
