//! Exterior scattering solves: sound-soft (Dirichlet) and sound-hard
//! (Neumann) combined-field integral equations, boundary data, and
//! far-field evaluation.
//!
//! Sound-soft: `(½I + K - ikS) φ = f`, field
//! `u(x) = ∫ {∂G/∂ν(y) - ikG(x,y)} φ(y) dS(y)`.
//! Sound-hard: `((ik/2)I + T∘S - ikK') ψ = g`, field
//! `v(x) = ∫ {∂G/∂ν(y)·(Sψ)(y) - ikG(x,y) ψ(y)} dS(y)`.
//! The composition `T∘S` is applied matrix-free: one streamed sweep for
//! `(S, K')`, one for `(H, W)` — exactly two kernel sweeps per iteration.

use crate::geometry::{dot, norm, scale, sub, Surface};
use crate::operators::{
    apply_batch, assemble_combination, KernelContext, OperatorMatrix,
};
use crate::quadrature::CompositeQuadrature;
use crate::regularizer::OperatorKind;
use crate::solvers::{gmres, GmresResult, LinearOp};
use crate::{Error, Result, C64};
use std::cell::Cell;

/// Incident excitation of the manufactured or physical problem.
#[derive(Debug, Clone, Copy)]
pub enum Incident {
    /// Interior point source: the exact exterior field is `G(·, x0)`,
    /// giving a manufactured solution with a known far field.
    PointSource { location: [f64; 3] },
    /// Plane wave `e^{ik x·d}`; the solve targets the scattered field.
    PlaneWave { direction: [f64; 3] },
}

impl Incident {
    /// Check that the excitation is usable for the given surface and
    /// return it with a normalized direction where applicable.
    pub fn validated(self, surface: &Surface) -> Result<Incident> {
        match self {
            Incident::PointSource { location } => {
                if !surface.contains(location) {
                    return Err(Error::InvalidParameter(format!(
                        "point source {location:?} is not strictly inside the {}",
                        surface.label()
                    )));
                }
                Ok(self)
            }
            Incident::PlaneWave { direction } => {
                let n = norm(direction);
                if n == 0.0 {
                    return Err(Error::InvalidParameter(
                        "plane-wave direction must be nonzero".into(),
                    ));
                }
                Ok(Incident::PlaneWave {
                    direction: scale(direction, 1.0 / n),
                })
            }
        }
    }
}

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Free-space kernel `G(x, y) = e^{ikr}/(4πr)`.
fn green(k: f64, x: [f64; 3], y: [f64; 3]) -> C64 {
    let r = norm(sub(x, y));
    C64::new(0.0, k * r).exp() / (FOUR_PI * r)
}

/// `∂G/∂ν(y) = e^{ikr}(1 - ikr)(x - y)·ν(y) / (4πr³)`.
fn green_dny(k: f64, x: [f64; 3], y: [f64; 3], ny: [f64; 3]) -> C64 {
    let d = sub(x, y);
    let r = norm(d);
    C64::new(0.0, k * r).exp() * C64::new(1.0, -k * r) * dot(d, ny)
        / (FOUR_PI * r * r * r)
}

/// `∇_x G(x, y)·ν(x) = e^{ikr}(ikr - 1)(x - y)·ν(x) / (4πr³)`.
fn green_dnx(k: f64, x: [f64; 3], nx: [f64; 3], y: [f64; 3]) -> C64 {
    let d = sub(x, y);
    let r = norm(d);
    C64::new(0.0, k * r).exp() * C64::new(-1.0, k * r) * dot(d, nx)
        / (FOUR_PI * r * r * r)
}

/// Dirichlet trace `f` of the incident problem at the quadrature nodes.
pub fn dirichlet_data(incident: Incident, k: f64, quad: &CompositeQuadrature) -> Vec<C64> {
    quad.nodes
        .iter()
        .map(|node| match incident {
            Incident::PointSource { location } => green(k, node.position, location),
            Incident::PlaneWave { direction } => {
                -C64::new(0.0, k * dot(node.position, direction)).exp()
            }
        })
        .collect()
}

/// Neumann trace `g` of the incident problem at the quadrature nodes.
pub fn neumann_data(incident: Incident, k: f64, quad: &CompositeQuadrature) -> Vec<C64> {
    quad.nodes
        .iter()
        .map(|node| match incident {
            Incident::PointSource { location } => {
                green_dnx(k, node.position, node.normal, location)
            }
            Incident::PlaneWave { direction } => {
                C64::new(0.0, -k * dot(direction, node.normal))
                    * C64::new(0.0, k * dot(node.position, direction)).exp()
            }
        })
        .collect()
}

/// Assemble the fused dense sound-soft combined-field matrix
/// `½I + K - ikS` in one pass over point pairs.
pub fn build_cfie_dirichlet(
    k: f64,
    order: usize,
    delta: f64,
    quad: &CompositeQuadrature,
) -> Result<OperatorMatrix> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(
            "scattering requires a positive wavenumber".into(),
        ));
    }
    let ctx_k = KernelContext::new(OperatorKind::K, order, k, delta)?;
    let ctx_s = KernelContext::new(OperatorKind::S, order, k, delta)?;
    assemble_combination(
        &[ctx_k, ctx_s],
        &[C64::new(1.0, 0.0), C64::new(0.0, -k)],
        C64::new(0.5, 0.0),
        quad,
    )
}

/// Matrix-free sound-hard combined-field operator
/// `(ik/2)I + T∘S - ikK'`.
pub struct CfieNeumann<'a> {
    pub k: f64,
    ctx_s: KernelContext,
    ctx_kt: KernelContext,
    ctx_h: KernelContext,
    ctx_w: KernelContext,
    quad: &'a CompositeQuadrature,
    sweeps: Cell<usize>,
}

impl<'a> CfieNeumann<'a> {
    pub fn new(
        k: f64,
        order: usize,
        delta: f64,
        quad: &'a CompositeQuadrature,
    ) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter(
                "scattering requires a positive wavenumber".into(),
            ));
        }
        Ok(Self {
            k,
            ctx_s: KernelContext::new(OperatorKind::S, order, k, delta)?,
            ctx_kt: KernelContext::new(OperatorKind::Kt, order, k, delta)?,
            ctx_h: KernelContext::new(OperatorKind::H, order, k, delta)?,
            ctx_w: KernelContext::new(OperatorKind::W, order, k, delta)?,
            quad,
            sweeps: Cell::new(0),
        })
    }

    /// Number of streamed kernel sweeps performed so far (two per apply).
    pub fn sweep_count(&self) -> usize {
        self.sweeps.get()
    }

    /// `S ψ` at the quadrature nodes (needed again by the representation).
    pub fn apply_single_layer(&self, psi: &[C64]) -> Result<Vec<C64>> {
        Ok(apply_batch(&[&self.ctx_s], self.quad, &[psi])?.remove(0))
    }
}

impl LinearOp for CfieNeumann<'_> {
    fn dim(&self) -> usize {
        self.quad.len()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        // Sweep 1: S x and K' x share the pair loop.
        let mut first = apply_batch(&[&self.ctx_s, &self.ctx_kt], self.quad, &[x, x])
            .expect("contexts share (k, δ) by construction");
        let kt_x = first.pop().unwrap();
        let s_x = first.pop().unwrap();
        // Sweep 2: H and W applied to S x.
        let parts = apply_batch(&[&self.ctx_h, &self.ctx_w], self.quad, &[&s_x, &s_x])
            .expect("contexts share (k, δ) by construction");
        self.sweeps.set(self.sweeps.get() + 2);
        let half_ik = C64::new(0.0, 0.5 * self.k);
        let minus_ik = C64::new(0.0, -self.k);
        (0..x.len())
            .map(|i| half_ik * x[i] + parts[0][i] + parts[1][i] + minus_ik * kt_x[i])
            .collect()
    }
}

/// Result of one scattering solve.
pub struct ScatterSolve {
    pub density: Vec<C64>,
    /// `S ψ` for the sound-hard representation (empty for sound-soft).
    pub single_layer_trace: Vec<C64>,
    pub gmres: GmresResult,
}

/// Solve the sound-soft problem with a dense fused matrix and GMRES.
pub fn solve_dirichlet(
    k: f64,
    order: usize,
    delta: f64,
    quad: &CompositeQuadrature,
    data: &[C64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<ScatterSolve> {
    let matrix = build_cfie_dirichlet(k, order, delta, quad)?;
    let res = gmres(&matrix, data, rel_tol, max_iter)?;
    Ok(ScatterSolve {
        density: res.x.clone(),
        single_layer_trace: Vec::new(),
        gmres: res,
    })
}

/// Solve the sound-hard problem matrix-free.
pub fn solve_neumann(
    k: f64,
    order: usize,
    delta: f64,
    quad: &CompositeQuadrature,
    data: &[C64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<ScatterSolve> {
    let op = CfieNeumann::new(k, order, delta, quad)?;
    let res = gmres(&op, data, rel_tol, max_iter)?;
    let s_psi = op.apply_single_layer(&res.x)?;
    Ok(ScatterSolve {
        density: res.x.clone(),
        single_layer_trace: s_psi,
        gmres: res,
    })
}

/// Deterministic quasi-uniform directions on a sphere of given radius
/// (Fibonacci lattice).
pub fn fibonacci_targets(count: usize, radius: f64) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden_angle * i as f64;
            [
                radius * rho * phi.cos(),
                radius * rho * phi.sin(),
                radius * z,
            ]
        })
        .collect()
}

fn check_targets(quad: &CompositeQuadrature, targets: &[[f64; 3]]) -> Result<()> {
    // The representation kernels are evaluated unregularized; require the
    // targets to stay at least unit distance from the surface.
    let max_node = quad
        .nodes
        .iter()
        .map(|n| norm(n.position))
        .fold(0.0f64, f64::max);
    for t in targets {
        if norm(*t) < max_node + 1.0 {
            return Err(Error::InvalidParameter(format!(
                "evaluation target {t:?} closer than unit distance to the surface"
            )));
        }
    }
    Ok(())
}

/// Sound-soft representation `u(x) = Σ w_j {∂G/∂ν(y_j) - ikG} φ_j` at
/// points far from the surface.
pub fn evaluate_field_dirichlet(
    k: f64,
    quad: &CompositeQuadrature,
    phi: &[C64],
    targets: &[[f64; 3]],
) -> Result<Vec<C64>> {
    if phi.len() != quad.len() {
        return Err(Error::DimensionMismatch(format!(
            "density length {} vs {} nodes",
            phi.len(),
            quad.len()
        )));
    }
    check_targets(quad, targets)?;
    let ik = C64::new(0.0, k);
    Ok(targets
        .iter()
        .map(|&x| {
            quad.nodes
                .iter()
                .zip(phi.iter())
                .map(|(node, p)| {
                    (green_dny(k, x, node.position, node.normal)
                        - ik * green(k, x, node.position))
                        * p
                        * node.weight
                })
                .sum()
        })
        .collect())
}

/// Sound-hard representation
/// `v(x) = Σ w_j {∂G/∂ν(y_j)·(Sψ)(y_j) - ikG ψ_j}`.
pub fn evaluate_field_neumann(
    k: f64,
    quad: &CompositeQuadrature,
    psi: &[C64],
    s_psi: &[C64],
    targets: &[[f64; 3]],
) -> Result<Vec<C64>> {
    if psi.len() != quad.len() || s_psi.len() != quad.len() {
        return Err(Error::DimensionMismatch(format!(
            "density lengths {}/{} vs {} nodes",
            psi.len(),
            s_psi.len(),
            quad.len()
        )));
    }
    check_targets(quad, targets)?;
    let ik = C64::new(0.0, k);
    Ok(targets
        .iter()
        .map(|&x| {
            quad.nodes
                .iter()
                .enumerate()
                .map(|(j, node)| {
                    (green_dny(k, x, node.position, node.normal) * s_psi[j]
                        - ik * green(k, x, node.position) * psi[j])
                        * node.weight
                })
                .sum()
        })
        .collect())
}

/// Exact exterior field of an interior point source at the targets.
pub fn point_source_reference(k: f64, location: [f64; 3], targets: &[[f64; 3]]) -> Vec<C64> {
    targets.iter().map(|&x| green(k, x, location)).collect()
}

/// `max_i |w_i - w̃_i| / max_i |w̃_i|`.
pub fn far_field_error(field: &[C64], reference: &[C64]) -> Result<f64> {
    if field.len() != reference.len() || field.is_empty() {
        return Err(Error::DimensionMismatch(
            "far-field vectors must be nonempty and of equal length".into(),
        ));
    }
    let num = field
        .iter()
        .zip(reference.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    let den = reference.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if den == 0.0 {
        return Err(Error::InvalidParameter(
            "reference far field vanishes; relative error undefined".into(),
        ));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh_surface;
    use crate::quadrature::{build_composite, reference_rule};
    use std::f64::consts::PI;

    fn sphere_quad(h: f64) -> CompositeQuadrature {
        let mesh = mesh_surface(&Surface::sphere(1.0), h).unwrap();
        build_composite(&mesh, &reference_rule(2).unwrap())
    }

    #[test]
    fn fibonacci_targets_are_on_the_sphere_and_spread() {
        let t = fibonacci_targets(100, 10.0);
        assert_eq!(t.len(), 100);
        for p in &t {
            assert!((norm(*p) - 10.0).abs() < 1e-12);
        }
        // crude spread check: no two targets nearly coincide
        for i in 0..t.len() {
            for j in (i + 1)..t.len() {
                assert!(norm(sub(t[i], t[j])) > 0.5);
            }
        }
    }

    #[test]
    fn sound_soft_point_source_far_field_converges() {
        // k = 2: safely away from interior eigenvalues of the unit ball
        // (k = pi would zero out the single-layer eigenvalue at l = 0 and
        // with it the T*S stabilization of the sound-hard equation).
        let k = 2.0;
        let x0 = [0.25, 0.1, -0.05];
        let incident = Incident::PointSource { location: x0 }
            .validated(&Surface::sphere(1.0))
            .unwrap();
        let targets = fibonacci_targets(100, 10.0);
        let reference = point_source_reference(k, x0, &targets);
        let mut errs = Vec::new();
        for h in [0.5, 0.3] {
            let quad = sphere_quad(h);
            let delta = 0.5 * quad.h.powf(3.0 / 7.0);
            let data = dirichlet_data(incident, k, &quad);
            let solve = solve_dirichlet(k, 3, delta, &quad, &data, 1e-8, 40).unwrap();
            assert!(solve.gmres.converged, "GMRES stalled at h={h}");
            let field =
                evaluate_field_dirichlet(k, &quad, &solve.density, &targets).unwrap();
            errs.push(far_field_error(&field, &reference).unwrap());
        }
        assert!(errs[1] < errs[0], "far-field errors not decreasing: {errs:?}");
        assert!(errs[1] < 2e-2, "far-field error too large: {errs:?}");
    }

    #[test]
    fn sound_hard_point_source_far_field_and_sweep_count() {
        let k = 2.0;
        let x0 = [0.2, -0.1, 0.1];
        let incident = Incident::PointSource { location: x0 }
            .validated(&Surface::sphere(1.0))
            .unwrap();
        let quad = sphere_quad(0.3);
        let delta = 0.5 * quad.h.powf(3.0 / 7.0);
        let data = neumann_data(incident, k, &quad);
        let op = CfieNeumann::new(k, 3, delta, &quad).unwrap();
        let res = gmres(&op, &data, 1e-8, 60).unwrap();
        assert!(res.converged);
        // Exactly two streamed sweeps per operator application.
        assert_eq!(op.sweep_count(), 2 * res.iterations);
        let s_psi = op.apply_single_layer(&res.x).unwrap();
        let targets = fibonacci_targets(100, 10.0);
        let field = evaluate_field_neumann(k, &quad, &res.x, &s_psi, &targets).unwrap();
        let reference = point_source_reference(k, x0, &targets);
        let err = far_field_error(&field, &reference).unwrap();
        assert!(err < 5e-2, "sound-hard far-field error {err:.3e}");
    }

    #[test]
    fn plane_wave_solves_run_and_converge() {
        let k = PI;
        let incident = Incident::PlaneWave {
            direction: [1.0, 0.0, 0.0],
        }
        .validated(&Surface::sphere(1.0))
        .unwrap();
        let quad = sphere_quad(0.4);
        let delta = 0.5 * quad.h.powf(3.0 / 7.0);
        let data = dirichlet_data(incident, k, &quad);
        let solve = solve_dirichlet(k, 3, delta, &quad, &data, 1e-8, 40).unwrap();
        assert!(solve.gmres.converged);
        // Scattered far field is finite and nonzero.
        let targets = fibonacci_targets(16, 10.0);
        let field = evaluate_field_dirichlet(k, &quad, &solve.density, &targets).unwrap();
        assert!(field.iter().all(|v| v.norm().is_finite()));
        assert!(field.iter().any(|v| v.norm() > 1e-6));
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let sphere = Surface::sphere(1.0);
        assert!(Incident::PointSource {
            location: [2.0, 0.0, 0.0]
        }
        .validated(&sphere)
        .is_err());
        assert!(Incident::PlaneWave {
            direction: [0.0, 0.0, 0.0]
        }
        .validated(&sphere)
        .is_err());
        let quad = sphere_quad(0.5);
        assert!(build_cfie_dirichlet(0.0, 3, 0.2, &quad).is_err());
        // Target too close to the surface.
        let phi = vec![C64::new(1.0, 0.0); quad.len()];
        assert!(evaluate_field_dirichlet(PI, &quad, &phi, &[[1.5, 0.0, 0.0]]).is_err());
    }
}
