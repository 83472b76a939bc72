//! Named reference targets for builds, verification, and sweeps. Every
//! target is a hierarchical expansion, so the network's job is exact in
//! structure and the only deviation is the product-gadget error.

use anyhow::{anyhow, bail};
use korobov_cnn::{hierarchize_separable, LevelIndex, SparseExpansion};

pub const TARGET_NAMES: &[&str] = &["hat111", "hatl2", "combo2", "prodpoly"];

/// Resolves a target name to an expansion over `dim` coordinates with level
/// budget `n`.
///
/// - `hat111`: the single basis function at level 1 in every coordinate.
/// - `hatl2`: one basis function with coordinate 3 refined to level 2.
/// - `combo2`: three terms with coefficient mass exactly 2.
/// - `prodpoly`: the full expansion of prod_j x_j (1 - x_j), all in-budget
///   coefficients nonzero (4^{-|l|_1}).
pub fn resolve(name: &str, dim: usize, n: u32) -> anyhow::Result<SparseExpansion> {
    let ones = |edits: &[(usize, u32, u64)]| -> anyhow::Result<LevelIndex> {
        let mut l = vec![1u32; dim];
        let mut i = vec![1u64; dim];
        for &(j, lv, iv) in edits {
            if j >= dim {
                bail!("target edits coordinate {j} beyond dimension {dim}");
            }
            l[j] = lv;
            i[j] = iv;
        }
        Ok(LevelIndex::new(l, i)?)
    };
    let expansion = match name {
        "hat111" => SparseExpansion::from_terms(dim, n, vec![(ones(&[])?, 1.0)])?,
        "hatl2" => SparseExpansion::from_terms(dim, n, vec![(ones(&[(2, 2, 3)])?, 1.0)])?,
        "combo2" => SparseExpansion::from_terms(
            dim,
            n,
            vec![
                (ones(&[])?, 0.75),
                (ones(&[(2, 2, 1)])?, -0.5),
                (ones(&[(dim - 1, 2, 3)])?, 0.75),
            ],
        )?,
        "prodpoly" => {
            let f = |x: f64| x * (1.0 - x);
            let factors: Vec<&dyn Fn(f64) -> f64> = vec![&f; dim];
            hierarchize_separable(&factors, n)?
        }
        other => {
            return Err(anyhow!(
                "unknown target '{other}' (expected one of {})",
                TARGET_NAMES.join(", ")
            ))
        }
    };
    Ok(expansion)
}

/// Targets usable where a single basis index is required (phi and basis
/// builds).
pub fn resolve_single_index(name: &str, dim: usize, n: u32) -> anyhow::Result<LevelIndex> {
    let expansion = resolve(name, dim, n)?;
    match expansion.terms() {
        [(li, _)] => Ok(li.clone()),
        terms => bail!(
            "target '{name}' has {} terms; phi and basis builds need exactly one",
            terms.len()
        ),
    }
}
