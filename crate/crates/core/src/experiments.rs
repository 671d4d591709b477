//! Convergence-study drivers and their outputs.
//!
//! Three sweep families are provided, mirroring the usual validation
//! sequence for a regularized Nyström method:
//!
//! * mollifier-width sweeps at fixed fine mesh (isolate the `δ^order`
//!   regularization error),
//! * mesh sweeps at fixed small width (isolate the `h^(q+1)` quadrature
//!   error until it hits the regularization plateau),
//! * coupled sweeps `δ = c·h^μ*` (the practical regime; errors decay at
//!   the compromise rate `o* = μ*·order`).
//!
//! Each sweep yields flat records with fitted log-log slopes, written as
//! CSV (17 significant digits), gnuplot-ready data, and a small SVG
//! log-log chart.

use crate::geometry::{mesh_surface, Surface};
use crate::operators::{apply_batch, KernelContext};
use crate::quadrature::{build_composite, reference_rule, CompositeQuadrature};
use crate::regularizer::{moment_constant, OperatorKind};
use crate::scattering::{
    dirichlet_data, evaluate_field_dirichlet, evaluate_field_neumann, far_field_error,
    fibonacci_targets, neumann_data, point_source_reference, solve_dirichlet, solve_neumann,
    Incident,
};
use crate::sphere::{relative_l2_error, HarmonicDensity, SphereOperator};
use crate::{Error, Result, C64};
use std::io::Write;

/// Optimal width-to-mesh coupling exponent `μ*` and the resulting overall
/// order `o* = μ*·order` for one operator on a given surface class.
///
/// With quadrature degree `q` and regularization order `𝔪`, balancing the
/// `δ^𝔪` regularization error against the near-diagonal quadrature error
/// gives `μ* = (q+1)/(q+1+𝔪)` when the stabilization exponent `s` equals
/// `p`, and `μ* = (q+1)/(q+2(p-s)+𝔪)` when `p > s`.
pub fn coupling_exponents(
    kind: OperatorKind,
    q: usize,
    order: usize,
    sphere: bool,
) -> (f64, f64) {
    let p = kind.p();
    let s = kind.stability_exponent(sphere);
    let q1 = (q + 1) as f64;
    let m = order as f64;
    let mu = if p == s {
        q1 / (q1 + m)
    } else {
        q1 / (q as f64 + 2.0 * (p - s) as f64 + m)
    };
    (mu, mu * m)
}

/// Which constituent governs the shared width of a composite operator:
/// the one with the smallest coupled order `o*`.
pub fn coupling_kind(op: SphereOperator, sphere: bool) -> OperatorKind {
    match op {
        SphereOperator::S => OperatorKind::S,
        SphereOperator::K => OperatorKind::K,
        SphereOperator::Kt => OperatorKind::Kt,
        // T = H + W: on the sphere W gains extra stabilization (s = 2)
        // and H (s = 1) is the bottleneck; on general surfaces W (s = 0)
        // is slower.
        SphereOperator::T => {
            if sphere {
                OperatorKind::H
            } else {
                OperatorKind::W
            }
        }
    }
}

/// One row of a convergence sweep.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    pub surface: &'static str,
    pub operator: &'static str,
    pub k: f64,
    /// Formal regularization order (CSV column `m`).
    pub order: usize,
    pub q: usize,
    pub h: f64,
    pub delta: f64,
    pub n_nodes: usize,
    pub err_raw: f64,
    pub err_norm: f64,
    pub fit_slope: f64,
    pub fit_window_lo: f64,
    pub fit_window_hi: f64,
}

/// One row of a scattering run.
#[derive(Debug, Clone)]
pub struct ScatterRecord {
    pub surface: &'static str,
    pub problem: &'static str,
    pub k: f64,
    pub order: usize,
    pub q: usize,
    pub h: f64,
    pub n_nodes: usize,
    pub gmres_iters: usize,
    /// Far-field error against the manufactured reference; NaN when no
    /// reference exists (plane-wave runs).
    pub e_ff: f64,
    pub wall_seconds: f64,
}

/// Shared sweep parameters on the unit sphere.
#[derive(Debug, Clone, Copy)]
pub struct SphereSweep {
    pub k: f64,
    /// Formal regularization order `𝔪`.
    pub order: usize,
    /// Quadrature exactness degree.
    pub q: usize,
}

const SWEEP_OPS: [SphereOperator; 4] = [
    SphereOperator::S,
    SphereOperator::K,
    SphereOperator::Kt,
    SphereOperator::T,
];

/// Ordinary least squares slope of `ln y` against `ln x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Raw relative errors above this are treated as saturated: a relative
/// error approaching order one cannot follow the asymptotic power law,
/// so such rows are excluded from slope fits.
const SATURATION_ERR: f64 = 2e-2;

/// Regularization-dominated fit window of a width sweep (widths in
/// ascending order).  The asymptotic regime of a width sweep is the
/// small-width end: toward large widths the per-mode relative errors of
/// the sharpest density modes approach order one and the curve bends away
/// from the power law, while below the quadrature floor the error stops
/// decaying (detected by a local slope under half the target order).  The
/// observed order is therefore taken from the two smallest widths above
/// the floor; the remaining rows are reported but not fitted.
fn delta_fit_window(deltas: &[f64], raw: &[f64], order: usize) -> Vec<usize> {
    let n = raw.len();
    if n < 2 {
        return (0..n).collect();
    }
    let mut start = 0;
    while start + 1 < n {
        let local = (raw[start + 1] / raw[start]).ln()
            / (deltas[start + 1] / deltas[start]).ln();
        if local < order as f64 / 2.0 {
            start += 1;
        } else {
            break;
        }
    }
    if start + 1 >= n {
        start = n - 2;
    }
    vec![start, start + 1]
}

/// Indices kept for the slope fit of a mesh sweep: rows at least 3x above
/// the finest-mesh error (pre-plateau), always including at least two.
fn h_fit_window(errs: &[f64]) -> Vec<usize> {
    let last = *errs.last().unwrap();
    let mut keep: Vec<usize> = (0..errs.len())
        .filter(|&i| errs[i] >= 3.0 * last || i + 1 == errs.len())
        .collect();
    if keep.len() < 2 {
        keep = (0..errs.len()).collect();
    }
    keep
}

fn sphere_quad(h: f64, q: usize) -> Result<CompositeQuadrature> {
    let mesh = mesh_surface(&Surface::sphere(1.0), h)?;
    Ok(build_composite(&mesh, &reference_rule(q)?))
}

struct OpErrors {
    raw: f64,
}

/// Apply all five kernels for every requested order in one shared sweep
/// and compare the four operators against their exact spherical actions.
/// Returns one `[OpErrors; 4]` per order.
fn measure_sphere_errors(
    k: f64,
    orders: &[usize],
    quad: &CompositeQuadrature,
    x: &[C64],
    exact: &[Vec<C64>; 4],
    delta: f64,
) -> Result<Vec<[OpErrors; 4]>> {
    let kinds = [
        OperatorKind::S,
        OperatorKind::K,
        OperatorKind::Kt,
        OperatorKind::H,
        OperatorKind::W,
    ];
    let mut ctxs = Vec::with_capacity(5 * orders.len());
    for &order in orders {
        for &kind in &kinds {
            ctxs.push(KernelContext::new(kind, order, k, delta)?);
        }
    }
    let refs: Vec<&KernelContext> = ctxs.iter().collect();
    let inputs: Vec<&[C64]> = vec![x; ctxs.len()];
    let outs = apply_batch(&refs, quad, &inputs)?;
    let mut per_order = Vec::with_capacity(orders.len());
    for (oi, _) in orders.iter().enumerate() {
        let base = 5 * oi;
        let t_out: Vec<C64> = outs[base + 3]
            .iter()
            .zip(outs[base + 4].iter())
            .map(|(a, b)| a + b)
            .collect();
        let approx = [&outs[base], &outs[base + 1], &outs[base + 2], &t_out];
        let mut result = Vec::with_capacity(4);
        for (idx, _op) in SWEEP_OPS.iter().enumerate() {
            let raw = relative_l2_error(approx[idx], &exact[idx], quad)?;
            result.push(OpErrors { raw });
        }
        per_order.push(result.try_into().map_err(|_| {
            Error::LinearAlgebra("internal: wrong error count".into())
        })?);
    }
    Ok(per_order)
}

fn exact_actions(
    density: &HarmonicDensity,
    k: f64,
    quad: &CompositeQuadrature,
) -> Result<[Vec<C64>; 4]> {
    Ok([
        density.exact_action(SphereOperator::S, k, quad)?,
        density.exact_action(SphereOperator::K, k, quad)?,
        density.exact_action(SphereOperator::Kt, k, quad)?,
        density.exact_action(SphereOperator::T, k, quad)?,
    ])
}

/// Width sweep at fixed mesh: normalized errors should decay like
/// `δ^order` until the quadrature floor.  Widths `δ >= 1` are skipped
/// (the mollifier would no longer be a local correction).
pub fn run_delta_sweep(
    cfg: &SphereSweep,
    h: f64,
    deltas: &[f64],
) -> Result<Vec<ConvergenceRecord>> {
    run_delta_sweep_orders(cfg.k, &[cfg.order], cfg.q, h, deltas)
}

/// Width sweep serving several regularization orders from one fused pass
/// (the orders only differ in the cheap per-operator ratio factor, so
/// batching them is nearly free).
pub fn run_delta_sweep_orders(
    k: f64,
    orders: &[usize],
    q: usize,
    h: f64,
    deltas: &[f64],
) -> Result<Vec<ConvergenceRecord>> {
    run_delta_sweep_grid(&[k], orders, q, h, deltas)
}

/// Full width-sweep grid: every `(wavenumber, order, width, kernel)`
/// combination is evaluated in a single streamed pass over the point
/// pairs of one shared mesh, which is what makes large sweeps feasible on
/// a single core.
pub fn run_delta_sweep_grid(
    ks: &[f64],
    orders: &[usize],
    q: usize,
    h: f64,
    deltas: &[f64],
) -> Result<Vec<ConvergenceRecord>> {
    if orders.is_empty() || ks.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one wavenumber and one order".into(),
        ));
    }
    let quad = sphere_quad(h, q)?;
    let density = HarmonicDensity::default_test_density();
    let x = density.sample(&quad)?;
    let mut usable: Vec<f64> = deltas.iter().copied().filter(|&d| d < 1.0 && d > 0.0).collect();
    usable.sort_by(f64::total_cmp);
    if usable.is_empty() {
        return Err(Error::InvalidParameter(
            "width sweep needs at least one admissible width below 1".into(),
        ));
    }
    let kinds = [
        OperatorKind::S,
        OperatorKind::K,
        OperatorKind::Kt,
        OperatorKind::H,
        OperatorKind::W,
    ];
    let mut ctxs = Vec::with_capacity(ks.len() * orders.len() * usable.len() * 5);
    for &k in ks {
        for &order in orders {
            for &delta in &usable {
                for &kind in &kinds {
                    ctxs.push(KernelContext::new(kind, order, k, delta)?);
                }
            }
        }
    }
    let refs: Vec<&KernelContext> = ctxs.iter().collect();
    let inputs: Vec<&[C64]> = vec![&x; ctxs.len()];
    let outs = apply_batch(&refs, &quad, &inputs)?;
    let mut records = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        let exact = exact_actions(&density, k, &quad)?;
        for (oi, &order) in orders.iter().enumerate() {
            // errs[op_idx][delta_idx]
            let mut raw = vec![vec![0.0f64; usable.len()]; 4];
            let mut nrm = vec![vec![0.0f64; usable.len()]; 4];
            for di in 0..usable.len() {
                let base = ((ki * orders.len() + oi) * usable.len() + di) * 5;
                let t_out: Vec<C64> = outs[base + 3]
                    .iter()
                    .zip(outs[base + 4].iter())
                    .map(|(a, b)| a + b)
                    .collect();
                let approx = [&outs[base], &outs[base + 1], &outs[base + 2], &t_out];
                for idx in 0..4 {
                    let e = relative_l2_error(approx[idx], &exact[idx], &quad)?;
                    // Normalization constant |I| of the first uncancelled
                    // moment; for T the constants of H and W add.
                    let abs_i = match idx {
                        3 => {
                            moment_constant(&ctxs[base + 3].spec)?
                                + moment_constant(&ctxs[base + 4].spec)?
                        }
                        _ => moment_constant(&ctxs[base + idx].spec)?,
                    };
                    raw[idx][di] = e;
                    nrm[idx][di] = e / abs_i;
                }
            }
            for (op_idx, op) in SWEEP_OPS.iter().enumerate() {
                let keep = delta_fit_window(&usable, &nrm[op_idx], order);
                let pts: Vec<(f64, f64)> =
                    keep.iter().map(|&i| (usable[i], nrm[op_idx][i])).collect();
                let slope = fit_slope(&pts);
                let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|p| p.0).fold(0.0f64, f64::max);
                for (i, &delta) in usable.iter().enumerate() {
                    records.push(ConvergenceRecord {
                        surface: "sphere",
                        operator: op.label(),
                        k,
                        order,
                        q,
                        h: quad.h,
                        delta,
                        n_nodes: quad.len(),
                        err_raw: raw[op_idx][i],
                        err_norm: nrm[op_idx][i],
                        fit_slope: slope,
                        fit_window_lo: lo,
                        fit_window_hi: hi,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// Mesh sweep at fixed width: raw errors decay like `h^(q+1)` until they
/// plateau at the regularization error.  The normalized column carries the
/// fitted error model `(c0 + c1·|I|)·h^o*`, rescaled to match the raw
/// error on the finest mesh.
pub fn run_h_sweep(
    cfg: &SphereSweep,
    delta: f64,
    h_targets: &[f64],
) -> Result<Vec<ConvergenceRecord>> {
    if h_targets.len() < 2 {
        return Err(Error::InvalidParameter(
            "mesh sweep needs at least two levels".into(),
        ));
    }
    let density = HarmonicDensity::default_test_density();
    let mut rows: Vec<(f64, usize, [OpErrors; 4], [f64; 4])> = Vec::new();
    for &h in h_targets {
        let quad = sphere_quad(h, cfg.q)?;
        let x = density.sample(&quad)?;
        let exact = exact_actions(&density, cfg.k, &quad)?;
        let errs = measure_sphere_errors(cfg.k, &[cfg.order], &quad, &x, &exact, delta)?
            .pop()
            .unwrap();
        let abs_i = {
            // Reuse the per-operator constants (κ fixed across levels).
            let mut a = [0.0f64; 4];
            for (idx, op) in SWEEP_OPS.iter().enumerate() {
                a[idx] = match op {
                    SphereOperator::T => {
                        let sh = KernelContext::new(OperatorKind::H, cfg.order, cfg.k, delta)?;
                        let sw = KernelContext::new(OperatorKind::W, cfg.order, cfg.k, delta)?;
                        moment_constant(&sh.spec)? + moment_constant(&sw.spec)?
                    }
                    _ => {
                        let ctx =
                            KernelContext::new(coupling_kind(*op, true), cfg.order, cfg.k, delta)?;
                        moment_constant(&ctx.spec)?
                    }
                };
            }
            a
        };
        rows.push((quad.h, quad.len(), errs, abs_i));
    }
    let mut records = Vec::new();
    for (op_idx, op) in SWEEP_OPS.iter().enumerate() {
        let errs: Vec<f64> = rows.iter().map(|r| r.2[op_idx].raw).collect();
        let hs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let keep = h_fit_window(&errs);
        let fit_pts: Vec<(f64, f64)> = keep.iter().map(|&i| (hs[i], errs[i])).collect();
        let slope = fit_slope(&fit_pts);
        let lo = fit_pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = fit_pts.iter().map(|p| p.0).fold(0.0f64, f64::max);
        // Error model for the normalized column.
        let (_, o_star) = coupling_exponents(coupling_kind(*op, true), cfg.q, cfg.order, true);
        let samples: Vec<(f64, f64, f64)> = rows
            .iter()
            .map(|r| (r.0, r.3[op_idx], r.2[op_idx].raw))
            .collect();
        let (c0, c1) = crate::sphere::fit_error_model(&samples, o_star)?;
        let model_last = (c0 + c1 * rows.last().unwrap().3[op_idx])
            * rows.last().unwrap().0.powf(o_star);
        let rescale = if model_last > 0.0 {
            rows.last().unwrap().2[op_idx].raw / model_last
        } else {
            1.0
        };
        for row in &rows {
            let model = (c0 + c1 * row.3[op_idx]) * row.0.powf(o_star) * rescale;
            records.push(ConvergenceRecord {
                surface: "sphere",
                operator: op.label(),
                k: cfg.k,
                order: cfg.order,
                q: cfg.q,
                h: row.0,
                delta,
                n_nodes: row.1,
                err_raw: row.2[op_idx].raw,
                err_norm: model,
                fit_slope: slope,
                fit_window_lo: lo,
                fit_window_hi: hi,
            });
        }
    }
    Ok(records)
}

/// Coupled sweep `δ = c·h^μ*` with the per-operator optimal exponent:
/// raw errors decay at the overall order `o*`.
pub fn run_coupled_sweep(
    cfg: &SphereSweep,
    coupling_const: f64,
    h_targets: &[f64],
) -> Result<Vec<ConvergenceRecord>> {
    if h_targets.len() < 2 {
        return Err(Error::InvalidParameter(
            "coupled sweep needs at least two levels".into(),
        ));
    }
    let density = HarmonicDensity::default_test_density();
    let mut records = Vec::new();
    // Rows grouped per operator: (h, n_nodes, delta, err_raw).
    let mut per_op: [Vec<(f64, usize, f64, f64)>; 4] = Default::default();
    for &h in h_targets {
        let quad = sphere_quad(h, cfg.q)?;
        let x = density.sample(&quad)?;
        let exact = exact_actions(&density, cfg.k, &quad)?;
        // S, K, Kt share (p = s) hence share μ* and δ; T couples through H.
        let (mu_layer, _) = coupling_exponents(OperatorKind::S, cfg.q, cfg.order, true);
        let (mu_t, _) = coupling_exponents(OperatorKind::H, cfg.q, cfg.order, true);
        let d_layer = coupling_const * quad.h.powf(mu_layer);
        let d_t = coupling_const * quad.h.powf(mu_t);
        // One fused pass: the layer kernels at their shared width together
        // with the two constituents of T at the slower width.
        let ctxs = [
            KernelContext::new(OperatorKind::S, cfg.order, cfg.k, d_layer)?,
            KernelContext::new(OperatorKind::K, cfg.order, cfg.k, d_layer)?,
            KernelContext::new(OperatorKind::Kt, cfg.order, cfg.k, d_layer)?,
            KernelContext::new(OperatorKind::H, cfg.order, cfg.k, d_t)?,
            KernelContext::new(OperatorKind::W, cfg.order, cfg.k, d_t)?,
        ];
        let refs: Vec<&KernelContext> = ctxs.iter().collect();
        let out = apply_batch(&refs, &quad, &[&x, &x, &x, &x, &x])?;
        let t_out: Vec<C64> = out[3]
            .iter()
            .zip(out[4].iter())
            .map(|(a, b)| a + b)
            .collect();
        for (idx, approx) in [&out[0], &out[1], &out[2], &t_out]
            .iter()
            .enumerate()
        {
            let err = relative_l2_error(approx, &exact[idx], &quad)?;
            let delta = if idx == 3 { d_t } else { d_layer };
            per_op[idx].push((quad.h, quad.len(), delta, err));
        }
    }
    for (op_idx, op) in SWEEP_OPS.iter().enumerate() {
        // Fit over the non-saturated rows (relative errors near order one
        // cannot follow the power law); fall back to the two finest levels.
        let mut pts: Vec<(f64, f64)> = per_op[op_idx].iter().map(|r| (r.0, r.3)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let kept: Vec<(f64, f64)> = pts
            .iter()
            .copied()
            .filter(|&(_, e)| e <= SATURATION_ERR)
            .collect();
        let pts = if kept.len() >= 2 {
            kept
        } else {
            pts.into_iter().take(2).collect()
        };
        let slope = fit_slope(&pts);
        let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.0).fold(0.0f64, f64::max);
        for row in &per_op[op_idx] {
            records.push(ConvergenceRecord {
                surface: "sphere",
                operator: op.label(),
                k: cfg.k,
                order: cfg.order,
                q: cfg.q,
                h: row.0,
                delta: row.2,
                n_nodes: row.1,
                err_raw: row.3,
                err_norm: row.3,
                fit_slope: slope,
                fit_window_lo: lo,
                fit_window_hi: hi,
            });
        }
    }
    Ok(records)
}

/// Boundary-condition type of a scattering run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    Dirichlet,
    Neumann,
}

impl Problem {
    pub fn label(self) -> &'static str {
        match self {
            Problem::Dirichlet => "dirichlet",
            Problem::Neumann => "neumann",
        }
    }
}

/// Scattering refinement study: solve on each level, evaluate the field at
/// 100 far targets, and compare against the manufactured reference when
/// one exists (point source).
#[allow(clippy::too_many_arguments)]
pub fn run_scattering(
    surface: &Surface,
    problem: Problem,
    incident: Incident,
    k: f64,
    order: usize,
    q: usize,
    coupling_const: f64,
    h_targets: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<ScatterRecord>> {
    let incident = incident.validated(surface)?;
    let sphere = surface.is_sphere();
    let kind = match problem {
        Problem::Dirichlet => OperatorKind::K,
        Problem::Neumann => {
            if sphere {
                OperatorKind::H
            } else {
                OperatorKind::W
            }
        }
    };
    let (mu, _) = coupling_exponents(kind, q, order, sphere);
    let targets = fibonacci_targets(100, 10.0);
    let reference = match incident {
        Incident::PointSource { location } => {
            Some(point_source_reference(k, location, &targets))
        }
        Incident::PlaneWave { .. } => None,
    };
    let mut records = Vec::new();
    for &h in h_targets {
        let start = std::time::Instant::now();
        let mesh = mesh_surface(surface, h)?;
        let quad = build_composite(&mesh, &reference_rule(q)?);
        let delta = coupling_const * quad.h.powf(mu);
        let (solve, field) = match problem {
            Problem::Dirichlet => {
                let data = dirichlet_data(incident, k, &quad);
                let solve = solve_dirichlet(k, order, delta, &quad, &data, rel_tol, max_iter)?;
                let field = evaluate_field_dirichlet(k, &quad, &solve.density, &targets)?;
                (solve, field)
            }
            Problem::Neumann => {
                let data = neumann_data(incident, k, &quad);
                let solve = solve_neumann(k, order, delta, &quad, &data, rel_tol, max_iter)?;
                let field = evaluate_field_neumann(
                    k,
                    &quad,
                    &solve.density,
                    &solve.single_layer_trace,
                    &targets,
                )?;
                (solve, field)
            }
        };
        if !solve.gmres.converged {
            return Err(Error::LinearAlgebra(format!(
                "GMRES did not reach {rel_tol:.1e} within {max_iter} iterations at h={h}"
            )));
        }
        let e_ff = match &reference {
            Some(r) => far_field_error(&field, r)?,
            None => f64::NAN,
        };
        records.push(ScatterRecord {
            surface: surface.label(),
            problem: problem.label(),
            k,
            order,
            q,
            h: quad.h,
            n_nodes: quad.len(),
            gmres_iters: solve.gmres.iterations,
            e_ff,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

// --- output writers --------------------------------------------------------

/// 17 significant digits, round-trip safe for f64.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write convergence records as CSV.
pub fn write_convergence_csv(path: &std::path::Path, records: &[ConvergenceRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "surface,operator,k,m,q,h,delta,NQ,err_raw,err_norm,fit_slope,fit_window_lo,fit_window_hi"
    )?;
    for r in records {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.surface,
            r.operator,
            fmt17(r.k),
            r.order,
            r.q,
            fmt17(r.h),
            fmt17(r.delta),
            r.n_nodes,
            fmt17(r.err_raw),
            fmt17(r.err_norm),
            fmt17(r.fit_slope),
            fmt17(r.fit_window_lo),
            fmt17(r.fit_window_hi),
        )?;
    }
    Ok(())
}

/// Write scattering records as CSV.
pub fn write_scatter_csv(path: &std::path::Path, records: &[ScatterRecord]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "surface,problem,k,m,q,h,NQ,gmres_iters,e_ff,wall_seconds")?;
    for r in records {
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{}",
            r.surface,
            r.problem,
            fmt17(r.k),
            r.order,
            r.q,
            fmt17(r.h),
            r.n_nodes,
            r.gmres_iters,
            fmt17(r.e_ff),
            fmt17(r.wall_seconds),
        )?;
    }
    Ok(())
}

/// Gnuplot-ready data: one block per operator (blank-line separated),
/// columns `abscissa err_raw err_norm`.
pub fn write_gnuplot_data(
    path: &std::path::Path,
    records: &[ConvergenceRecord],
    abscissa_is_delta: bool,
) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        "# {} err_raw err_norm",
        if abscissa_is_delta { "delta" } else { "h" }
    )?;
    let mut ops: Vec<&str> = records.iter().map(|r| r.operator).collect();
    ops.dedup();
    for op in ops {
        writeln!(f, "\n# operator {op}")?;
        for r in records.iter().filter(|r| r.operator == op) {
            let x = if abscissa_is_delta { r.delta } else { r.h };
            writeln!(f, "{} {} {}", fmt17(x), fmt17(r.err_raw), fmt17(r.err_norm))?;
        }
    }
    Ok(())
}

/// Minimal self-contained log-log SVG chart: one polyline per series.
pub fn write_loglog_svg(
    path: &std::path::Path,
    title: &str,
    series: &[(String, Vec<(f64, f64)>)],
) -> Result<()> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.1.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidParameter(
            "log-log chart needs positive data".into(),
        ));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x.log10());
        x1 = x1.max(x.log10());
        y0 = y0.min(y.log10());
        y1 = y1.max(y.log10());
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let (w, h, ml, mb, mt, mr) = (640.0, 480.0, 70.0, 50.0, 40.0, 20.0);
    let sx = |x: f64| ml + (x.log10() - x0) / (x1 - x0) * (w - ml - mr);
    let sy = |y: f64| h - mb - (y.log10() - y0) / (y1 - y0) * (h - mb - mt);
    let colors = ["#1b6ca8", "#c23b22", "#2e8540", "#7a3b8f", "#b8860b"];
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        f,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )?;
    writeln!(
        f,
        r##"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        w - ml - mr,
        h - mb - mt
    )?;
    writeln!(
        f,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#,
        w / 2.0
    )?;
    writeln!(
        f,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">log10 abscissa: [{:.2}, {:.2}]   log10 error: [{:.2}, {:.2}]</text>"#,
        w / 2.0,
        h - 12.0,
        x0,
        x1,
        y0,
        y1
    )?;
    for (si, (name, data)) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let path_pts: Vec<String> = data
            .iter()
            .filter(|&&(x, y)| x > 0.0 && y > 0.0)
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if path_pts.is_empty() {
            continue;
        }
        writeln!(
            f,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path_pts.join(" ")
        )?;
        for p in &path_pts {
            let mut it = p.split(',');
            let (cx, cy) = (it.next().unwrap(), it.next().unwrap());
            writeln!(f, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#)?;
        }
        writeln!(
            f,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{name}</text>"#,
            w - mr - 90.0,
            mt + 18.0 + 16.0 * si as f64
        )?;
    }
    writeln!(f, "</svg>")?;
    Ok(())
}
