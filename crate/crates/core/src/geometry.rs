//! Analytic test surfaces and curved triangular meshes.
//!
//! Every element stores its three vertices in *chart parameter space* and
//! is mapped through an exact analytic chart, so positions, outward
//! normals, and surface Jacobians are evaluated to machine precision at
//! arbitrary reference coordinates — no isoparametric interpolation error
//! enters the convergence studies.
//!
//! * Sphere and bean: an icosahedron subdivided `n`-fold per face, mapped
//!   radially (`x = ρ(û) û`).
//! * Torus: a structured periodic grid in the angles `(u, v)`.

use crate::{Error, Result};

/// Hard cap on element count; keeps accidental fine meshes from exhausting
/// memory on small machines.
pub const MAX_ELEMENTS: usize = 120_000;

/// The supported closed surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surface {
    Sphere { radius: f64 },
    Torus { major: f64, minor: f64 },
    /// Star-shaped perturbed sphere `ρ(û) = 1 + 0.3 û₁û₃ + 0.15 û₂²`.
    Bean,
}

impl Surface {
    pub fn sphere(radius: f64) -> Self {
        Surface::Sphere { radius }
    }

    pub fn torus(major: f64, minor: f64) -> Self {
        Surface::Torus { major, minor }
    }

    pub fn bean() -> Self {
        Surface::Bean
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Surface::Sphere { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Surface::Sphere { .. } => "sphere",
            Surface::Torus { .. } => "torus",
            Surface::Bean => "bean",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Surface::Sphere { radius } if radius > 0.0 => Ok(()),
            Surface::Torus { major, minor } if minor > 0.0 && major > minor => Ok(()),
            Surface::Bean => Ok(()),
            _ => Err(Error::InvalidParameter(format!(
                "invalid surface parameters: {self:?}"
            ))),
        }
    }

    /// Radial profile `ρ(û)` and its gradient for the star-shaped charts.
    fn radial_profile(&self, nhat: [f64; 3]) -> (f64, [f64; 3]) {
        match *self {
            Surface::Sphere { radius } => (radius, [0.0; 3]),
            Surface::Bean => {
                let [x, y, z] = nhat;
                (
                    1.0 + 0.3 * x * z + 0.15 * y * y,
                    [0.3 * z, 0.3 * y, 0.3 * x],
                )
            }
            Surface::Torus { .. } => unreachable!("torus uses the angular chart"),
        }
    }

    /// Strict interior test (with a small safety margin towards the
    /// boundary), used to validate manufactured point-source locations.
    pub fn contains(&self, x: [f64; 3]) -> bool {
        match *self {
            Surface::Sphere { radius } => norm(x) < 0.99 * radius,
            Surface::Bean => {
                let r = norm(x);
                if r == 0.0 {
                    return true;
                }
                let nhat = scale(x, 1.0 / r);
                r < 0.99 * self.radial_profile(nhat).0
            }
            Surface::Torus { major, minor } => {
                let ring = (x[0] * x[0] + x[1] * x[1]).sqrt() - major;
                (ring * ring + x[2] * x[2]).sqrt() < 0.99 * minor
            }
        }
    }
}

/// A curved element: three chart-parameter vertices.  For radial charts
/// these are points on the flat icosahedron faces; for the torus the first
/// two components are the angles `(u, v)`.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub verts: [[f64; 3]; 3],
}

/// Chart evaluation result at one reference point.
#[derive(Debug, Clone, Copy)]
pub struct ChartPoint {
    pub position: [f64; 3],
    /// Unit outward normal.
    pub normal: [f64; 3],
    /// Surface Jacobian `|∂x/∂ξ × ∂x/∂η|` of the reference-to-surface map.
    pub jacobian: f64,
}

/// A curved triangular mesh of one closed surface.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub surface: Surface,
    pub elements: Vec<Element>,
    /// Measured mesh size: maximum element diameter on the curved surface.
    pub h: f64,
}

impl SurfaceMesh {
    /// Evaluate the chart of element `elem` at reference coordinates
    /// `(ξ, η)` with `ξ, η ≥ 0`, `ξ + η ≤ 1`.
    pub fn chart_eval(&self, elem: usize, xi: f64, eta: f64) -> ChartPoint {
        let e = &self.elements[elem];
        let e1 = sub(e.verts[1], e.verts[0]);
        let e2 = sub(e.verts[2], e.verts[0]);
        let p = add(e.verts[0], add(scale(e1, xi), scale(e2, eta)));
        match self.surface {
            Surface::Sphere { .. } | Surface::Bean => radial_chart(&self.surface, p, e1, e2),
            Surface::Torus { major, minor } => torus_chart(major, minor, p, e1, e2),
        }
    }

    /// Total surface area via the exact Jacobians and a degree-5 reference
    /// rule; used by tests and sanity checks.
    pub fn area(&self) -> f64 {
        // Degree-5 symmetric 7-point rule (weights sum to 1/2).
        let s15 = 15.0f64.sqrt();
        let a = (6.0 + s15) / 21.0;
        let b = (6.0 - s15) / 21.0;
        let wa = (155.0 + s15) / 2400.0;
        let wb = (155.0 - s15) / 2400.0;
        let pts = [
            (1.0 / 3.0, 1.0 / 3.0, 0.1125),
            (a, a, wa),
            (1.0 - 2.0 * a, a, wa),
            (a, 1.0 - 2.0 * a, wa),
            (b, b, wb),
            (1.0 - 2.0 * b, b, wb),
            (b, 1.0 - 2.0 * b, wb),
        ];
        let mut total = 0.0;
        for i in 0..self.elements.len() {
            for &(xi, eta, w) in &pts {
                total += w * self.chart_eval(i, xi, eta).jacobian;
            }
        }
        total
    }

    /// Dump as an OFF file (corner vertices only, duplicated per element).
    pub fn write_off(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "OFF")?;
        writeln!(f, "{} {} 0", 3 * self.elements.len(), self.elements.len())?;
        let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        for i in 0..self.elements.len() {
            for &(xi, eta) in &corners {
                let p = self.chart_eval(i, xi, eta).position;
                writeln!(f, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2])?;
            }
        }
        for i in 0..self.elements.len() {
            writeln!(f, "3 {} {} {}", 3 * i, 3 * i + 1, 3 * i + 2)?;
        }
        Ok(())
    }
}

fn radial_chart(surface: &Surface, p: [f64; 3], e1: [f64; 3], e2: [f64; 3]) -> ChartPoint {
    let r = norm(p);
    let nhat = scale(p, 1.0 / r);
    let (rho, grad) = surface.radial_profile(nhat);
    let position = scale(nhat, rho);
    // Directional derivative of x = ρ(û)û along a chart direction d:
    // δû = (d − û(û·d))/|p|,  δx = (∇ρ·δû) û + ρ δû.
    let push = |d: [f64; 3]| -> [f64; 3] {
        let dn = scale(sub(d, scale(nhat, dot(nhat, d))), 1.0 / r);
        add(scale(nhat, dot(grad, dn)), scale(dn, rho))
    };
    let t1 = push(e1);
    let t2 = push(e2);
    let c = cross(t1, t2);
    let jacobian = norm(c);
    let mut normal = scale(c, 1.0 / jacobian);
    // Star-shaped: outward means positive radial component.
    if dot(normal, nhat) < 0.0 {
        normal = scale(normal, -1.0);
    }
    ChartPoint {
        position,
        normal,
        jacobian,
    }
}

fn torus_chart(major: f64, minor: f64, p: [f64; 3], e1: [f64; 3], e2: [f64; 3]) -> ChartPoint {
    let (u, v) = (p[0], p[1]);
    let (cu, su) = (u.cos(), u.sin());
    let (cv, sv) = (v.cos(), v.sin());
    let ring = major + minor * cv;
    let position = [ring * cu, ring * su, minor * sv];
    let fu = [-ring * su, ring * cu, 0.0];
    let fv = [-minor * sv * cu, -minor * sv * su, minor * cv];
    let t1 = add(scale(fu, e1[0]), scale(fv, e1[1]));
    let t2 = add(scale(fu, e2[0]), scale(fv, e2[1]));
    let c = cross(t1, t2);
    let jacobian = norm(c);
    let mut normal = scale(c, 1.0 / jacobian);
    let outward = [cv * cu, cv * su, sv];
    if dot(normal, outward) < 0.0 {
        normal = scale(normal, -1.0);
    }
    ChartPoint {
        position,
        normal,
        jacobian,
    }
}

/// Mesh a surface so that the measured curved-element diameter does not
/// exceed `target_h`.  The refinement parameter is increased until the
/// measured size passes, so requested sizes need not divide anything
/// evenly.  Deterministic: identical inputs give identical meshes.
pub fn mesh_surface(surface: &Surface, target_h: f64) -> Result<SurfaceMesh> {
    surface.validate()?;
    if !(target_h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mesh size must be positive, got {target_h}"
        )));
    }
    match *surface {
        Surface::Sphere { radius } => icosa_mesh(surface, target_h, radius),
        Surface::Bean => icosa_mesh(surface, target_h, 1.3),
        Surface::Torus { major, minor } => torus_mesh(surface, target_h, major, minor),
    }
}

fn icosa_mesh(surface: &Surface, target_h: f64, rho_max: f64) -> Result<SurfaceMesh> {
    let faces = icosahedron_faces();
    // Icosahedron edge on the unit sphere is ~1.0515; start from the
    // matching subdivision estimate and refine until the measured size fits.
    let mut n = ((1.052 * rho_max / target_h).ceil() as usize).max(1);
    loop {
        if 20 * n * n > MAX_ELEMENTS {
            return Err(Error::ResourceCap(format!(
                "mesh would need {} elements (cap {MAX_ELEMENTS})",
                20 * n * n
            )));
        }
        let mut elements = Vec::with_capacity(20 * n * n);
        for f in &faces {
            subdivide_face(f, n, &mut elements);
        }
        let mesh = SurfaceMesh {
            surface: *surface,
            elements,
            h: 0.0,
        };
        let h = measure_h(&mesh);
        if h <= target_h {
            return Ok(SurfaceMesh { h, ..mesh });
        }
        n += 1;
    }
}

fn torus_mesh(surface: &Surface, target_h: f64, major: f64, minor: f64) -> Result<SurfaceMesh> {
    use std::f64::consts::TAU;
    let mut t = target_h;
    loop {
        let nu = ((TAU * (major + minor) / t).ceil() as usize).max(3);
        let nv = ((TAU * minor / t).ceil() as usize).max(3);
        if 2 * nu * nv > MAX_ELEMENTS {
            return Err(Error::ResourceCap(format!(
                "torus mesh would need {} elements (cap {MAX_ELEMENTS})",
                2 * nu * nv
            )));
        }
        let du = TAU / nu as f64;
        let dv = TAU / nv as f64;
        let mut elements = Vec::with_capacity(2 * nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                let (u0, u1) = (i as f64 * du, (i + 1) as f64 * du);
                let (v0, v1) = (j as f64 * dv, (j + 1) as f64 * dv);
                let a = [u0, v0, 0.0];
                let b = [u1, v0, 0.0];
                let c = [u1, v1, 0.0];
                let d = [u0, v1, 0.0];
                elements.push(Element { verts: [a, b, c] });
                elements.push(Element { verts: [a, c, d] });
            }
        }
        let mesh = SurfaceMesh {
            surface: *surface,
            elements,
            h: 0.0,
        };
        let h = measure_h(&mesh);
        if h <= target_h {
            return Ok(SurfaceMesh { h, ..mesh });
        }
        t *= (target_h / h).min(0.95);
    }
}

/// Maximum curved diameter over all elements, sampled at the three mapped
/// corners and three mapped edge midpoints.
fn measure_h(mesh: &SurfaceMesh) -> f64 {
    let refs = [
        (0.0, 0.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (0.5, 0.0),
        (0.0, 0.5),
        (0.5, 0.5),
    ];
    let mut h: f64 = 0.0;
    for e in 0..mesh.elements.len() {
        let pts: Vec<[f64; 3]> = refs
            .iter()
            .map(|&(xi, eta)| mesh.chart_eval(e, xi, eta).position)
            .collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                h = h.max(norm(sub(pts[i], pts[j])));
            }
        }
    }
    h
}

/// The 20 faces of the unit icosahedron with outward (counterclockwise
/// seen from outside) vertex order.
fn icosahedron_faces() -> Vec<[[f64; 3]; 3]> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let s = 1.0 / (1.0 + phi * phi).sqrt();
    let mut verts = Vec::with_capacity(12);
    for &a in &[-1.0, 1.0] {
        for &b in &[-phi, phi] {
            verts.push(scale([0.0, a, b], s));
            verts.push(scale([a, b, 0.0], s));
            verts.push(scale([b, 0.0, a], s));
        }
    }
    // Faces: vertex triples at the minimal pairwise distance.
    let edge = 2.0 * s; // icosahedron edge length after normalization
    let close = |a: [f64; 3], b: [f64; 3]| (norm(sub(a, b)) - edge).abs() < 1e-9;
    let mut faces = Vec::with_capacity(20);
    for i in 0..12 {
        for j in (i + 1)..12 {
            if !close(verts[i], verts[j]) {
                continue;
            }
            for k in (j + 1)..12 {
                if close(verts[i], verts[k]) && close(verts[j], verts[k]) {
                    let mut f = [verts[i], verts[j], verts[k]];
                    let centroid = scale(add(add(f[0], f[1]), f[2]), 1.0 / 3.0);
                    let n = cross(sub(f[1], f[0]), sub(f[2], f[0]));
                    if dot(n, centroid) < 0.0 {
                        f.swap(1, 2);
                    }
                    faces.push(f);
                }
            }
        }
    }
    debug_assert_eq!(faces.len(), 20);
    faces
}

/// `n`-fold uniform subdivision of one flat face, winding preserved.
fn subdivide_face(face: &[[f64; 3]; 3], n: usize, out: &mut Vec<Element>) {
    let lattice = |i: usize, j: usize| -> [f64; 3] {
        let (fi, fj) = (i as f64 / n as f64, j as f64 / n as f64);
        add(
            face[0],
            add(
                scale(sub(face[1], face[0]), fi),
                scale(sub(face[2], face[0]), fj),
            ),
        )
    };
    for i in 0..n {
        for j in 0..(n - i) {
            out.push(Element {
                verts: [lattice(i, j), lattice(i + 1, j), lattice(i, j + 1)],
            });
            if i + j < n - 1 {
                out.push(Element {
                    verts: [lattice(i + 1, j), lattice(i + 1, j + 1), lattice(i, j + 1)],
                });
            }
        }
    }
}

// --- tiny fixed-size vector helpers ---------------------------------------

pub(crate) fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
