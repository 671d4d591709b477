//! Symmetric quadrature rules on the reference triangle and the composite
//! surface rule they induce on a curved mesh.
//!
//! Reference triangle: `{(ξ, η) : ξ, η ≥ 0, ξ + η ≤ 1}`, area `1/2`; all
//! rule weights are positive, all nodes strictly interior, and each rule is
//! exact for polynomials up to its stated degree (and provably not one
//! degree higher — the tests carry a sharpness witness).

use crate::geometry::SurfaceMesh;
use crate::{Error, Result};

/// A symmetric rule on the reference triangle.
#[derive(Debug, Clone)]
pub struct ReferenceRule {
    /// Polynomial exactness degree (2, 4, or 5).
    pub degree: usize,
    /// `(ξ, η, w)` with weights summing to the reference area 1/2.
    pub points: Vec<(f64, f64, f64)>,
}

/// Build the symmetric rule of the requested exactness degree.
pub fn reference_rule(degree: usize) -> Result<ReferenceRule> {
    let points = match degree {
        2 => {
            // 3-point midpoint-type rule, barycentric (2/3, 1/6, 1/6).
            let w = 1.0 / 6.0;
            vec![
                (2.0 / 3.0, 1.0 / 6.0, w),
                (1.0 / 6.0, 2.0 / 3.0, w),
                (1.0 / 6.0, 1.0 / 6.0, w),
            ]
        }
        4 => {
            // 6-point rule with two symmetric orbits.
            let a = 0.445_948_490_915_965;
            let wa = 0.111_690_794_839_005;
            let b = 0.091_576_213_509_771;
            let wb = 0.054_975_871_827_661;
            vec![
                (a, a, wa),
                (1.0 - 2.0 * a, a, wa),
                (a, 1.0 - 2.0 * a, wa),
                (b, b, wb),
                (1.0 - 2.0 * b, b, wb),
                (b, 1.0 - 2.0 * b, wb),
            ]
        }
        5 => {
            // 7-point rule: centroid plus two orbits with closed-form data.
            let s15 = 15.0f64.sqrt();
            let a = (6.0 + s15) / 21.0;
            let b = (6.0 - s15) / 21.0;
            let wa = (155.0 + s15) / 2400.0;
            let wb = (155.0 - s15) / 2400.0;
            vec![
                (1.0 / 3.0, 1.0 / 3.0, 0.1125),
                (a, a, wa),
                (1.0 - 2.0 * a, a, wa),
                (a, 1.0 - 2.0 * a, wa),
                (b, b, wb),
                (1.0 - 2.0 * b, b, wb),
                (b, 1.0 - 2.0 * b, wb),
            ]
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "no reference rule of degree {other} (supported: 2, 4, 5)"
            )))
        }
    };
    Ok(ReferenceRule { degree, points })
}

/// One node of the composite surface rule.
#[derive(Debug, Clone, Copy)]
pub struct QuadNode {
    pub position: [f64; 3],
    /// Unit outward normal at the node.
    pub normal: [f64; 3],
    /// Surface weight: rule weight times the chart Jacobian.
    pub weight: f64,
    /// Index of the owning element.
    pub element: usize,
}

/// Composite quadrature over a curved mesh: the Nyström point set.
#[derive(Debug, Clone)]
pub struct CompositeQuadrature {
    pub nodes: Vec<QuadNode>,
    pub rule_degree: usize,
    /// Mesh size carried over from the mesh.
    pub h: f64,
}

impl CompositeQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_Γ f dS` for a pointwise function of position and normal.
    pub fn integrate(&self, mut f: impl FnMut(&QuadNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }
}

/// Instantiate the composite rule on a mesh.
pub fn build_composite(mesh: &SurfaceMesh, rule: &ReferenceRule) -> CompositeQuadrature {
    let mut nodes = Vec::with_capacity(mesh.elements.len() * rule.points.len());
    for e in 0..mesh.elements.len() {
        for &(xi, eta, w) in &rule.points {
            let cp = mesh.chart_eval(e, xi, eta);
            nodes.push(QuadNode {
                position: cp.position,
                normal: cp.normal,
                weight: w * cp.jacobian,
                element: e,
            });
        }
    }
    CompositeQuadrature {
        nodes,
        rule_degree: rule.degree,
        h: mesh.h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{mesh_surface, Surface};
    use std::f64::consts::PI;

    /// Exact reference-triangle monomial integral
    /// `∫∫ ξ^a η^b dξ dη = a! b! / (a+b+2)!`.
    fn exact_monomial(a: u32, b: u32) -> f64 {
        let fact = |k: u32| (1..=k).map(|v| v as f64).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn rule_value(rule: &ReferenceRule, a: u32, b: u32) -> f64 {
        rule.points
            .iter()
            .map(|&(xi, eta, w)| w * xi.powi(a as i32) * eta.powi(b as i32))
            .sum()
    }

    #[test]
    fn rules_are_exact_up_to_their_degree() {
        for degree in [2usize, 4, 5] {
            let rule = reference_rule(degree).unwrap();
            for total in 0..=degree as u32 {
                for a in 0..=total {
                    let b = total - a;
                    let got = rule_value(&rule, a, b);
                    let want = exact_monomial(a, b);
                    assert!(
                        (got - want).abs() <= 1e-14,
                        "degree {degree}: ξ^{a} η^{b} got {got}, want {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn rules_are_sharp_at_one_degree_higher() {
        // For each rule exhibit a monomial of degree q+1 it misintegrates.
        for degree in [2usize, 4, 5] {
            let rule = reference_rule(degree).unwrap();
            let total = degree as u32 + 1;
            let worst = (0..=total)
                .map(|a| {
                    let b = total - a;
                    (rule_value(&rule, a, b) - exact_monomial(a, b)).abs()
                })
                .fold(0.0f64, f64::max);
            assert!(
                worst > 1e-6,
                "degree-{degree} rule unexpectedly exact at degree {total}"
            );
        }
    }

    #[test]
    fn weights_positive_nodes_interior() {
        for degree in [2usize, 4, 5] {
            let rule = reference_rule(degree).unwrap();
            let mut total = 0.0;
            for &(xi, eta, w) in &rule.points {
                assert!(w > 0.0);
                total += w;
                // Strict interiority with a real margin.
                let bary_min = xi.min(eta).min(1.0 - xi - eta);
                assert!(bary_min > 0.01, "degree {degree} node too close to edge");
            }
            assert!((total - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn unsupported_degrees_rejected() {
        for degree in [0usize, 1, 3, 6] {
            assert!(reference_rule(degree).is_err());
        }
    }

    #[test]
    fn composite_rule_integrates_surface_quantities() {
        let mesh = mesh_surface(&Surface::sphere(1.0), 0.3).unwrap();
        let rule = reference_rule(4).unwrap();
        let quad = build_composite(&mesh, &rule);
        assert_eq!(quad.len(), 6 * mesh.elements.len());

        let area = quad.integrate(|_| 1.0);
        assert!((area - 4.0 * PI).abs() < 1e-6 * 4.0 * PI);

        // ∫_S x² dS = 4π/3 on the unit sphere.
        let xx = quad.integrate(|n| n.position[0] * n.position[0]);
        assert!((xx - 4.0 * PI / 3.0).abs() < 1e-5);

        // Divergence theorem: ∫ x·n dS = 3 · volume = 4π.
        let flux = quad.integrate(|n| {
            n.position[0] * n.normal[0]
                + n.position[1] * n.normal[1]
                + n.position[2] * n.normal[2]
        });
        assert!((flux - 4.0 * PI).abs() < 1e-6 * 4.0 * PI);
    }

    #[test]
    fn composite_rule_on_torus_flux() {
        // Volume of the torus: 2 π² R r²; flux of x is 3V.
        let mesh = mesh_surface(&Surface::torus(1.0, 0.5), 0.3).unwrap();
        let quad = build_composite(&mesh, &reference_rule(5).unwrap());
        let flux = quad.integrate(|n| {
            n.position[0] * n.normal[0]
                + n.position[1] * n.normal[1]
                + n.position[2] * n.normal[2]
        });
        let want = 3.0 * 2.0 * PI * PI * 1.0 * 0.25;
        assert!((flux - want).abs() < 1e-5 * want, "flux {flux} want {want}");
    }
}
