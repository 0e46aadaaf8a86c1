//! Joint spectral radius bracketing by product enumeration.
//!
//! The lower bound is `max ρ(M)^{1/n}` over enumerated products. Upper bounds
//! come from `max ‖M‖^{1/n}` over the surviving products at each depth, in the
//! Euclidean operator norm and, when the dominant generator is diagonalisable,
//! in the norm induced by its real eigenbasis. A product whose normalised norm
//! is already within `tol/2` of the current lower bound is pruned: its
//! extensions are covered by the pruned product itself, so the bound at depth
//! `n` is `max(γ, max_{survivors} ‖M‖^{1/n})` with `γ` the largest normalised
//! norm among pruned products.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::companion_matrices;

pub const DEFAULT_MAX_LEN: usize = 20;
pub const DEFAULT_TOL: f64 = 1e-3;

/// Cap on the number of live products at a single depth.
const MAX_LIVE_PRODUCTS: usize = 1 << 20;
const MAX_BASIS_CONDITION: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JsrBracket {
    pub lower: f64,
    pub upper: f64,
    /// Longest product length explored.
    pub depth: usize,
    pub verdict: Verdict,
}

impl JsrBracket {
    fn new(lower: f64, upper: f64, depth: usize) -> Self {
        let verdict = if upper < 1.0 {
            Verdict::Satisfied
        } else if lower >= 1.0 {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
        Self { lower, upper, depth, verdict }
    }
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => 0.0,
        1 => m[(0, 0)].abs(),
        _ => m
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
    }
}

pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => 0.0,
        1 => m[(0, 0)].abs(),
        _ => m.singular_values().max(),
    }
}

/// Real basis `V` in which `m` is block diagonal with `1×1` real eigenvalue
/// blocks and `2×2` rotation-scaling blocks. `None` when `V` is singular or
/// badly conditioned (repeated or defective eigenvalues).
pub(crate) fn real_eigenbasis(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let d = m.nrows();
    if d < 2 {
        return None;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let eigs = m.complex_eigenvalues();
    let mut columns: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
    let mut pair_start: Vec<bool> = Vec::with_capacity(d);
    for z in eigs.iter() {
        if z.im.abs() <= 1e-12 * scale {
            let shifted = m - DMatrix::identity(d, d) * z.re;
            columns.push(null_vector(&shifted)?);
            pair_start.push(false);
        } else if z.im > 0.0 {
            let mut big = DMatrix::zeros(2 * d, 2 * d);
            let shifted = m - DMatrix::identity(d, d) * z.re;
            big.view_mut((0, 0), (d, d)).copy_from(&shifted);
            big.view_mut((d, d), (d, d)).copy_from(&shifted);
            for i in 0..d {
                big[(i, d + i)] = z.im;
                big[(d + i, i)] = -z.im;
            }
            let v = null_vector(&big)?;
            columns.push(v.rows(0, d).into_owned());
            columns.push(v.rows(d, d).into_owned());
            pair_start.extend([true, false]);
        }
    }
    if columns.len() != d {
        return None;
    }
    // a complex pair shares one scale factor so its block stays a rotation-scaling
    let mut j = 0;
    while j < d {
        let width = if pair_start[j] { 2 } else { 1 };
        let n: f64 = columns[j..j + width].iter().map(|c| c.norm_squared()).sum::<f64>().sqrt();
        if n == 0.0 {
            return None;
        }
        for c in &mut columns[j..j + width] {
            *c /= n;
        }
        j += width;
    }
    let basis = DMatrix::from_columns(&columns);
    let sv = basis.singular_values();
    let cond = sv.max() / sv.min();
    (cond.is_finite() && cond <= MAX_BASIS_CONDITION).then_some(basis)
}

fn null_vector(m: &DMatrix<f64>) -> Option<nalgebra::DVector<f64>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t?;
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    Some(v_t.row(idx).transpose())
}

struct Node {
    product: DMatrix<f64>,
    /// Same product in each alternative basis.
    transformed: Vec<DMatrix<f64>>,
    /// Whether the node is still unpruned for each norm (index 0 is the Euclidean norm).
    alive: Vec<bool>,
}

/// Brackets the joint spectral radius of `matrices` using products of length
/// at most `max_len`, stopping early once `upper − lower ≤ tol`.
pub fn jsr_bounds(matrices: &[DMatrix<f64>], max_len: usize, tol: f64) -> Result<JsrBracket> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty matrix set".into()))?;
    let d = first.nrows();
    if d == 0 {
        return Err(Error::DimensionMismatch("matrices must have dimension ≥ 1".into()));
    }
    for (i, m) in matrices.iter().enumerate() {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix {i} is {}×{}, expected {d}×{d}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    if max_len == 0 {
        return Err(Error::InvalidSpec("max_len must be at least 1".into()));
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidSpec(format!("tolerance must be finite and >= 0, got {tol}")));
    }

    // alternative norm from the eigenbasis of the generator with the largest radius
    let dominant = matrices
        .iter()
        .max_by(|a, b| spectral_radius(a).total_cmp(&spectral_radius(b)))
        .expect("non-empty");
    let mut bases: Vec<(DMatrix<f64>, DMatrix<f64>)> = Vec::new();
    if let Some(v) = real_eigenbasis(dominant) {
        if let Some(v_inv) = v.clone().try_inverse() {
            bases.push((v_inv, v));
        }
    }
    let n_norms = 1 + bases.len();
    let generators_t: Vec<Vec<DMatrix<f64>>> = bases
        .iter()
        .map(|(v_inv, v)| matrices.iter().map(|a| v_inv * a * v).collect())
        .collect();

    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    // largest normalised norm among pruned products, per norm
    let mut pruned_max = vec![0.0f64; n_norms];
    let mut level: Vec<Node> = vec![Node {
        product: DMatrix::identity(d, d),
        transformed: vec![DMatrix::identity(d, d); bases.len()],
        alive: vec![true; n_norms],
    }];
    let mut depth = 0;

    for m in 1..=max_len {
        if level.is_empty() || level.len() * matrices.len() > MAX_LIVE_PRODUCTS {
            break;
        }
        depth = m;
        let inv_m = 1.0 / m as f64;
        let mut children: Vec<Node> = Vec::with_capacity(level.len() * matrices.len());
        for node in &level {
            for (g, a) in matrices.iter().enumerate() {
                let product = &node.product * a;
                let transformed = node
                    .transformed
                    .iter()
                    .zip(&generators_t)
                    .map(|(p, gens)| p * &gens[g])
                    .collect();
                lower = lower.max(spectral_radius(&product).powf(inv_m));
                children.push(Node { product, transformed, alive: node.alive.clone() });
            }
        }

        let threshold = lower + 0.5 * tol;
        let mut surviving_max = vec![0.0f64; n_norms];
        for child in &mut children {
            for b in 0..n_norms {
                if !child.alive[b] {
                    continue;
                }
                let norm = if b == 0 {
                    operator_norm(&child.product)
                } else {
                    operator_norm(&child.transformed[b - 1])
                }
                .powf(inv_m);
                if norm <= threshold {
                    child.alive[b] = false;
                    pruned_max[b] = pruned_max[b].max(norm);
                } else {
                    surviving_max[b] = surviving_max[b].max(norm);
                }
            }
        }
        for b in 0..n_norms {
            upper = upper.min(pruned_max[b].max(surviving_max[b]));
        }
        children.retain(|c| c.alive.iter().any(|a| *a));
        level = children;
        if upper - lower <= tol {
            break;
        }
    }
    // bounds are exact up to rounding; keep the bracket ordered
    let upper = upper.max(lower);
    Ok(JsrBracket::new(lower, upper, depth))
}

/// Brackets `λ_JSR({F_0, F_1})` for the short-run coefficients `phi`.
pub fn check_assumption_a4(phi: &[f64], max_len: usize, tol: f64) -> Result<JsrBracket> {
    if phi.is_empty() {
        return Ok(JsrBracket::new(0.0, 0.0, 0));
    }
    let pair = companion_matrices(phi);
    jsr_bounds(&[pair.f0, pair.f1], max_len, tol)
}
