//! Construction of the error-function mollifier `σ_p` for each boundary
//! operator.
//!
//! For every operator the correction polynomial coefficients `a_1..a_n`
//! solve a small linear system whose entries are the radial moments from
//! [`crate::moments`].  Solving the system cancels the leading moments of
//! the weight `1 - σ_p`, which is what produces high-order kernel accuracy.
//! This module assembles and solves those systems, exposes the mollifier
//! with a cancellation-free small-argument series, and re-verifies the
//! moment cancellations against direct adaptive quadrature.

use crate::moments::{build_moment_table, MomentMethod, MomentTable};
use crate::quad1d::integrate;
use crate::solvers::pseudo_solve;
use crate::special::{erf, erfc, FRAC_2_SQRT_PI};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Crossover between the Maclaurin evaluation of `σ_p(t)/t^(2p+1)` and the
/// direct erf-based formula.
pub const T_SERIES: f64 = 0.25;

/// Number of retained terms in the small-`t` series (powers `t^0..t^30`).
const SERIES_LEN: usize = 16;

/// The four boundary operators (the hypersingular operator is handled as
/// the sum of its strongly singular part `H` and weakly singular part `W`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// Single layer.
    S,
    /// Double layer.
    K,
    /// Adjoint double layer.
    Kt,
    /// Strongly singular part of the hypersingular operator.
    H,
    /// Weakly singular part of the hypersingular operator.
    W,
}

impl OperatorKind {
    /// Strength index of the mollifier (`σ_p` divides the kernel by
    /// `δ^(2p+1)` on the diagonal).
    pub fn p(self) -> usize {
        match self {
            OperatorKind::S => 0,
            OperatorKind::K | OperatorKind::Kt => 1,
            OperatorKind::H | OperatorKind::W => 2,
        }
    }

    /// Geometric stabilization exponent `s` entering the coupled
    /// mesh-to-mollifier scaling; higher on the sphere, where extra
    /// symmetry cancels leading error terms.
    pub fn stability_exponent(self, sphere: bool) -> usize {
        match (self, sphere) {
            (OperatorKind::S, _) => 0,
            (OperatorKind::K | OperatorKind::Kt, false) => 0,
            (OperatorKind::K | OperatorKind::Kt, true) => 1,
            (OperatorKind::H, _) => 1,
            (OperatorKind::W, false) => 0,
            (OperatorKind::W, true) => 2,
        }
    }

    /// Indices `j` of the enforced moment rows for a given `m`.
    pub fn row_range(self, m: usize) -> std::ops::Range<usize> {
        match self {
            OperatorKind::S => 0..m,
            OperatorKind::K | OperatorKind::Kt | OperatorKind::H => 1..m,
            OperatorKind::W => 2..m,
        }
    }

    /// Formal regularization order `2(m - p) + 1` achieved with moment
    /// parameter `m`.
    pub fn order(self, m: usize) -> usize {
        2 * (m - self.p()) + 1
    }

    /// Inverse of [`OperatorKind::order`]: the `m` realizing a requested
    /// odd order (>= 3).
    pub fn m_for_order(self, order: usize) -> Result<usize> {
        if order < 3 || order % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "regularization order must be odd and >= 3, got {order}"
            )));
        }
        Ok(self.p() + (order - 1) / 2)
    }

    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::S => "S",
            OperatorKind::K => "K",
            OperatorKind::Kt => "Kt",
            OperatorKind::H => "H",
            OperatorKind::W => "W",
        }
    }
}

/// A fully determined mollifier: operator, wavenumber scale `κ = kδ`,
/// solved polynomial coefficients, and the precomputed small-`t` series.
#[derive(Debug, Clone)]
pub struct RegularizerSpec {
    pub kind: OperatorKind,
    pub kappa: f64,
    /// Formal order `2(m-p)+1`.
    pub order: usize,
    pub m: usize,
    pub n: usize,
    /// Correction polynomial coefficients `a_1..a_n`.
    pub coeffs: Vec<f64>,
    /// Per-row residuals of the solved moment system.
    pub residuals: Vec<f64>,
    /// Maclaurin coefficients of `σ_p(t)/t^(2p+1)` in powers of `t^2`.
    ratio_series: Vec<f64>,
}

/// Matrix entry `A_idx(κ)` of the moment system for one operator family.
fn system_entry(kind: OperatorKind, idx: usize, t: &MomentTable) -> f64 {
    let kappa = t.kappa;
    let i = idx as i64;
    match kind {
        OperatorKind::S => t.c_at(i - 1),
        OperatorKind::K | OperatorKind::Kt | OperatorKind::H => {
            t.c_at(i - 1) + kappa * t.s_at(i)
        }
        OperatorKind::W => {
            kappa * kappa * t.c_at(i) - 3.0 * (t.c_at(i - 1) + kappa * t.s_at(i))
        }
    }
}

/// Right-hand side entry `b_j(κ)` of the moment system.
fn system_rhs(kind: OperatorKind, j: usize, t: &MomentTable) -> f64 {
    let kappa = t.kappa;
    let j = j as i64;
    match kind {
        OperatorKind::S => t.ct_at(j),
        OperatorKind::K | OperatorKind::Kt => {
            2.0 * j as f64 * (t.ct_at(j - 1) + kappa * t.st_at(j - 1))
                + kappa * kappa * t.ct_at(j)
        }
        OperatorKind::H => {
            t.ct_at(j - 2)
                + t.c_at(j - 2)
                + (2.0 / 3.0) * t.c_at(j - 1)
                + kappa * (t.st_at(j - 2) + t.s_at(j - 1) + (2.0 / 3.0) * t.s_at(j))
        }
        OperatorKind::W => {
            kappa * kappa * t.ct_at(j - 1)
                - 3.0 * (t.ct_at(j - 2) + kappa * t.st_at(j - 2))
                + kappa * kappa * t.c_at(j - 1)
                - 3.0 * (t.c_at(j - 2) + kappa * t.s_at(j - 1))
                + (2.0 / 3.0) * kappa * kappa * t.c_at(j)
                - 2.0 * (t.c_at(j - 1) + kappa * t.s_at(j))
        }
    }
}

/// Assemble the `rows x n` moment system `(A, b)` for one operator.
pub fn assemble_system(
    kind: OperatorKind,
    m: usize,
    n: usize,
    table: &MomentTable,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let rows: Vec<usize> = kind.row_range(m).collect();
    if rows.is_empty() || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "degenerate moment system for {} with m={m}, n={n}",
            kind.label()
        )));
    }
    let need = rows.last().unwrap() + n;
    if table.depth() < need {
        return Err(Error::InvalidParameter(format!(
            "moment table depth {} insufficient, need {need}",
            table.depth()
        )));
    }
    let a = DMatrix::from_fn(rows.len(), n, |r, c| {
        system_entry(kind, rows[r] + c + 1, table)
    });
    let b = DVector::from_fn(rows.len(), |r, _| system_rhs(kind, rows[r], table));
    Ok((a, b))
}

impl RegularizerSpec {
    /// Build a mollifier of the given formal order with the default
    /// rectangular shape `n = rows + 1` (one more unknown than enforced
    /// moments keeps the system well conditioned at higher orders).
    pub fn for_order(kind: OperatorKind, order: usize, kappa: f64) -> Result<Self> {
        let m = kind.m_for_order(order)?;
        let rows = kind.row_range(m).len();
        Self::with_shape(kind, m, rows + 1, kappa)
    }

    /// Build a mollifier with an explicit system shape `(m, n)`; square
    /// shapes reproduce the closed-form rational coefficients at `κ = 0`.
    pub fn with_shape(kind: OperatorKind, m: usize, n: usize, kappa: f64) -> Result<Self> {
        let rows: Vec<usize> = kind.row_range(m).collect();
        if rows.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "m={m} yields no enforced moments for {}",
                kind.label()
            )));
        }
        let depth = rows.last().unwrap() + n + 2;
        let table = build_moment_table(kappa, depth, MomentMethod::Auto)?;
        let (a, b) = assemble_system(kind, m, n, &table)?;
        let x = pseudo_solve(&a, &b, 1e-12)?;
        let resid = &a * &x - &b;
        let scale = b.amax().max(1.0);
        if resid.amax() > 1e-9 * scale {
            return Err(Error::ResidualTooLarge(format!(
                "{} m={m} n={n} κ={kappa}: residual {:.3e} exceeds {:.3e}",
                kind.label(),
                resid.amax(),
                1e-9 * scale
            )));
        }
        let coeffs: Vec<f64> = x.iter().copied().collect();
        let ratio_series = ratio_series(kind.p(), &coeffs);
        Ok(Self {
            kind,
            kappa,
            order: kind.order(m),
            m,
            n,
            coeffs,
            residuals: resid.iter().map(|v| v.abs()).collect(),
            ratio_series,
        })
    }

    /// `σ_p(t)`, stable for all `t >= 0`.
    pub fn sigma(&self, t: f64) -> f64 {
        if t < T_SERIES {
            let p = self.kind.p();
            t.powi(2 * p as i32 + 1) * self.ratio(t)
        } else {
            self.sigma_direct(t)
        }
    }

    /// Direct erf-based formula, accurate away from `t = 0`.
    pub fn sigma_direct(&self, t: f64) -> f64 {
        self.sigma_direct_precomp(t, erf(t), (-t * t).exp())
    }

    /// Direct formula with `erf(t)` and `exp(-t²)` supplied by the caller;
    /// lets kernel sweeps share those evaluations across operators.
    pub fn sigma_direct_precomp(&self, t: f64, erf_t: f64, gauss: f64) -> f64 {
        let p = self.kind.p();
        let t2 = t * t;
        // base part of the correction polynomial
        let mut poly = match p {
            0 => 0.0,
            1 => -t,
            2 => -t - (2.0 / 3.0) * t2 * t,
            _ => unreachable!(),
        };
        // a_ell * t^(2(p+ell)-1)
        let mut pow = t.powi(2 * p as i32 + 1);
        for &a in &self.coeffs {
            poly += a * pow;
            pow *= t2;
        }
        erf_t + FRAC_2_SQRT_PI * gauss * poly
    }

    /// `σ_p(t) / t^(2p+1)`, finite at `t = 0`; this is the factor the
    /// kernel routines multiply against `Φ(kr) Ψ / r^(2p+1)`.
    pub fn ratio(&self, t: f64) -> f64 {
        if t < T_SERIES {
            self.ratio_series_eval(t)
        } else {
            self.sigma_direct(t) / t.powi(2 * self.kind.p() as i32 + 1)
        }
    }

    /// [`RegularizerSpec::ratio`] with `erf(t)` and `exp(-t²)` supplied by
    /// the caller (only consulted on the direct branch, `t >= T_SERIES`).
    pub fn ratio_precomp(&self, t: f64, erf_t: f64, gauss: f64) -> f64 {
        if t < T_SERIES {
            self.ratio_series_eval(t)
        } else {
            self.sigma_direct_precomp(t, erf_t, gauss)
                / t.powi(2 * self.kind.p() as i32 + 1)
        }
    }

    /// Ratio with the power of `1/t` supplied by the caller, letting a
    /// pairwise sweep share one division across several operators (only
    /// consulted on the direct branch, `t >= T_SERIES`).
    #[inline]
    pub(crate) fn ratio_with_inverse(&self, t: f64, erf_t: f64, gauss: f64, inv_pow: f64) -> f64 {
        if t < T_SERIES {
            self.ratio_series_eval(t)
        } else {
            self.sigma_direct_precomp(t, erf_t, gauss) * inv_pow
        }
    }

    fn ratio_series_eval(&self, t: f64) -> f64 {
        let t2 = t * t;
        let mut acc = 0.0;
        for &g in self.ratio_series.iter().rev() {
            acc = acc * t2 + g;
        }
        acc
    }

    /// `lim_{t→0} σ_p(t)/t^(2p+1)`; multiplied by `δ^-(2p+1)` this is the
    /// diagonal value of the regularized static kernel.
    pub fn diagonal_ratio_limit(&self) -> f64 {
        self.ratio_series[0]
    }
}

/// Maclaurin coefficients of `σ_p(t)/t^(2p+1)` in powers of `t^2`.
///
/// Writing `erf(t) = (2/√π) e^{-t²} Σ e_j t^(2j+1)` with
/// `e_j = 2^j/(2j+1)!!`, the base polynomial of `σ_p` cancels the first
/// `p` terms exactly, so `σ_p = (2/√π) e^{-t²} Σ_{i≥0} β_{p+i} t^(2(p+i)+1)`
/// with `β_{p+i} = e_{p+i} + a_{i+1}` while coefficients last.  Convolving
/// with the Gaussian series gives the returned coefficients.
fn ratio_series(p: usize, coeffs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; p + SERIES_LEN];
    e[0] = 1.0;
    for j in 1..e.len() {
        e[j] = e[j - 1] * 2.0 / (2 * j + 1) as f64;
    }
    let beta: Vec<f64> = (0..SERIES_LEN)
        .map(|i| e[p + i] + coeffs.get(i).copied().unwrap_or(0.0))
        .collect();
    // inv_fact[q] = (-1)^q / q!
    let mut inv_fact = vec![1.0; SERIES_LEN];
    for q in 1..SERIES_LEN {
        inv_fact[q] = -inv_fact[q - 1] / q as f64;
    }
    (0..SERIES_LEN)
        .map(|q| {
            let sum: f64 = (0..=q).map(|i| beta[i] * inv_fact[q - i]).sum();
            FRAC_2_SQRT_PI * sum
        })
        .collect()
}

/// Moment residual report from [`verify_moments`].
#[derive(Debug, Clone)]
pub struct MomentReport {
    /// `(j, I_j)` for every enforced row; should vanish to quadrature
    /// accuracy.
    pub enforced: Vec<(usize, f64)>,
    /// `(j, I_j)` for the first rows beyond the enforced range; the first
    /// of these is the normalization constant of the error model.
    pub unenforced: Vec<(usize, f64)>,
}

#[derive(Clone, Copy)]
enum Fam {
    /// `(2/√π) t^(2idx+1) e^{-t²} cos(κt)`
    C,
    /// `(2/√π) t^(2idx) e^{-t²} sin(κt)`
    S,
    /// `t^(2idx) erfc(t) cos(κt)`
    Ct,
    /// `t^(2idx+1) erfc(t) sin(κt)`
    St,
}

#[derive(Clone, Copy)]
struct Atom {
    fam: Fam,
    idx: usize,
    scale: f64,
}

fn atom_value(a: &Atom, t: f64, kappa: f64) -> f64 {
    let even = t.powi(2 * a.idx as i32);
    a.scale
        * match a.fam {
            Fam::C => FRAC_2_SQRT_PI * even * t * (-t * t).exp() * (kappa * t).cos(),
            Fam::S => FRAC_2_SQRT_PI * even * (-t * t).exp() * (kappa * t).sin(),
            Fam::Ct => even * erfc(t) * (kappa * t).cos(),
            Fam::St => even * t * erfc(t) * (kappa * t).sin(),
        }
}

/// Integrand atoms of the matrix entry `A_idx`.
fn entry_atoms(kind: OperatorKind, idx: usize, kappa: f64) -> Vec<Atom> {
    match kind {
        OperatorKind::S => vec![Atom { fam: Fam::C, idx: idx - 1, scale: 1.0 }],
        OperatorKind::K | OperatorKind::Kt | OperatorKind::H => vec![
            Atom { fam: Fam::C, idx: idx - 1, scale: 1.0 },
            Atom { fam: Fam::S, idx, scale: kappa },
        ],
        OperatorKind::W => vec![
            Atom { fam: Fam::C, idx, scale: kappa * kappa },
            Atom { fam: Fam::C, idx: idx - 1, scale: -3.0 },
            Atom { fam: Fam::S, idx, scale: -3.0 * kappa },
        ],
    }
}

/// Integrand atoms of the right-hand side `b_j`, plus an additive constant
/// absorbing the finite-part members (only the `H`, `j = 1` row has one:
/// there the combination of negative-index moments collapses to `-2/√π`).
fn rhs_atoms(kind: OperatorKind, j: usize, kappa: f64) -> (Vec<Atom>, f64) {
    match kind {
        OperatorKind::S => (vec![Atom { fam: Fam::Ct, idx: j, scale: 1.0 }], 0.0),
        OperatorKind::K | OperatorKind::Kt => (
            vec![
                Atom { fam: Fam::Ct, idx: j - 1, scale: 2.0 * j as f64 },
                Atom { fam: Fam::St, idx: j - 1, scale: 2.0 * j as f64 * kappa },
                Atom { fam: Fam::Ct, idx: j, scale: kappa * kappa },
            ],
            0.0,
        ),
        OperatorKind::H => {
            if j == 1 {
                (
                    vec![
                        Atom { fam: Fam::C, idx: 0, scale: 2.0 / 3.0 },
                        Atom { fam: Fam::S, idx: 0, scale: kappa },
                        Atom { fam: Fam::S, idx: 1, scale: 2.0 * kappa / 3.0 },
                    ],
                    -FRAC_2_SQRT_PI,
                )
            } else {
                (
                    vec![
                        Atom { fam: Fam::Ct, idx: j - 2, scale: 1.0 },
                        Atom { fam: Fam::C, idx: j - 2, scale: 1.0 },
                        Atom { fam: Fam::C, idx: j - 1, scale: 2.0 / 3.0 },
                        Atom { fam: Fam::St, idx: j - 2, scale: kappa },
                        Atom { fam: Fam::S, idx: j - 1, scale: kappa },
                        Atom { fam: Fam::S, idx: j, scale: 2.0 * kappa / 3.0 },
                    ],
                    0.0,
                )
            }
        }
        OperatorKind::W => (
            vec![
                Atom { fam: Fam::Ct, idx: j - 1, scale: kappa * kappa },
                Atom { fam: Fam::Ct, idx: j - 2, scale: -3.0 },
                Atom { fam: Fam::St, idx: j - 2, scale: -3.0 * kappa },
                Atom { fam: Fam::C, idx: j - 1, scale: kappa * kappa },
                Atom { fam: Fam::C, idx: j - 2, scale: -3.0 },
                Atom { fam: Fam::S, idx: j - 1, scale: -3.0 * kappa },
                Atom { fam: Fam::C, idx: j, scale: 2.0 * kappa * kappa / 3.0 },
                Atom { fam: Fam::C, idx: j - 1, scale: -2.0 },
                Atom { fam: Fam::S, idx: j, scale: -2.0 * kappa },
            ],
            0.0,
        ),
    }
}

/// Re-verify the moment cancellations of a solved mollifier by direct
/// adaptive quadrature of the combined integrand `b_j - Σ a_ℓ A_{j+ℓ}`.
///
/// Integrating the combination as one integrand (rather than differencing
/// large separately computed moments) keeps the result accurate even when
/// individual moments are huge, and exercises none of the recurrence code
/// the coefficients were built from.  `extra` additional rows beyond the
/// enforced range are reported as well; the first of them is the
/// normalization constant used by the convergence error model.
pub fn verify_moments(spec: &RegularizerSpec, extra: usize) -> Result<MomentReport> {
    let kappa = spec.kappa;
    let upper = 12.0 + 0.5 * kappa;
    let eval_row = |j: usize| -> Result<f64> {
        let (mut atoms, constant) = rhs_atoms(spec.kind, j, kappa);
        for (ell, &a) in spec.coeffs.iter().enumerate() {
            for mut atom in entry_atoms(spec.kind, j + ell + 1, kappa) {
                atom.scale *= -a;
                atoms.push(atom);
            }
        }
        let val = integrate(
            |t| atoms.iter().map(|a| atom_value(a, t, kappa)).sum(),
            0.0,
            upper,
            1e-12,
        )?;
        Ok(constant + val)
    };
    let mut enforced = Vec::new();
    for j in spec.kind.row_range(spec.m) {
        enforced.push((j, eval_row(j)?));
    }
    let mut unenforced = Vec::new();
    for j in spec.m..spec.m + extra {
        unenforced.push((j, eval_row(j)?));
    }
    Ok(MomentReport { enforced, unenforced })
}

/// `|I_{p,m}(κ)|`: magnitude of the first uncancelled moment, the
/// κ-dependent prefactor of the regularization error.
pub fn moment_constant(spec: &RegularizerSpec) -> Result<f64> {
    let report = verify_moments(spec, 1)?;
    Ok(report.unenforced[0].1.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::SQRT_PI;

    fn assert_coeffs(spec: &RegularizerSpec, expect: &[f64]) {
        assert_eq!(spec.coeffs.len(), expect.len());
        for (got, want) in spec.coeffs.iter().zip(expect) {
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "coefficient mismatch: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn static_square_coefficients_match_closed_forms() {
        let s = RegularizerSpec::with_shape(OperatorKind::S, 3, 3, 0.0).unwrap();
        assert_coeffs(&s, &[11.0 / 5.0, -26.0 / 15.0, 4.0 / 15.0]);

        let k = RegularizerSpec::with_shape(OperatorKind::K, 4, 3, 0.0).unwrap();
        assert_coeffs(&k, &[118.0 / 15.0, -68.0 / 15.0, 8.0 / 15.0]);

        let kt = RegularizerSpec::with_shape(OperatorKind::Kt, 4, 3, 0.0).unwrap();
        assert_coeffs(&kt, &[118.0 / 15.0, -68.0 / 15.0, 8.0 / 15.0]);

        let h = RegularizerSpec::with_shape(OperatorKind::H, 5, 4, 0.0).unwrap();
        assert_coeffs(
            &h,
            &[-172.0 / 5.0, 584.0 / 15.0, -464.0 / 45.0, 32.0 / 45.0],
        );

        let w = RegularizerSpec::with_shape(OperatorKind::W, 5, 3, 0.0).unwrap();
        assert_coeffs(&w, &[124.0 / 15.0, -56.0 / 15.0, 16.0 / 45.0]);
    }

    #[test]
    fn static_square_determinants_match_factorial_products() {
        // det [ (r+c+a)! ]_{0<=r,c<n} = prod_{i<n} i! (i+a)!
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        let table = build_moment_table(0.0, 16, MomentMethod::Auto).unwrap();

        for n in 1..=4usize {
            // S: a = 0, scaled by pi^{-n/2}
            let (a_s, _) = assemble_system(OperatorKind::S, n, n, &table).unwrap();
            let expect: f64 =
                (0..n).map(|i| fact(i) * fact(i)).product::<f64>() / SQRT_PI.powi(n as i32);
            let det = a_s.determinant();
            assert!((det - expect).abs() <= 1e-12 * expect.abs());

            // K: a = 1
            let (a_k, _) = assemble_system(OperatorKind::K, n + 1, n, &table).unwrap();
            let expect: f64 = (0..n).map(|i| fact(i) * fact(i + 1)).product::<f64>()
                / SQRT_PI.powi(n as i32);
            let det = a_k.determinant();
            assert!((det - expect).abs() <= 1e-12 * expect.abs());

            // H shares K's entries with shifted row range.
            let (a_h, _) = assemble_system(OperatorKind::H, n + 1, n, &table).unwrap();
            let det = a_h.determinant();
            assert!((det - expect).abs() <= 1e-12 * expect.abs());

            // W: entries -3 (r+c+2)!/sqrt(pi)
            let (a_w, _) = assemble_system(OperatorKind::W, n + 2, n, &table).unwrap();
            let expect: f64 = (-3.0f64).powi(n as i32)
                * (0..n).map(|i| fact(i) * fact(i + 2)).product::<f64>()
                / SQRT_PI.powi(n as i32);
            let det = a_w.determinant();
            assert!((det - expect).abs() <= 1e-12 * expect.abs());
        }
    }

    #[test]
    fn diagonal_ratio_limits_match_closed_forms() {
        let s = RegularizerSpec::with_shape(OperatorKind::S, 3, 3, 0.0).unwrap();
        let a1 = s.coeffs[0];
        assert!((s.diagonal_ratio_limit() - FRAC_2_SQRT_PI * (1.0 + a1)).abs() < 1e-14);

        let k = RegularizerSpec::with_shape(OperatorKind::K, 4, 3, 0.0).unwrap();
        let a1 = k.coeffs[0];
        let expect = 2.0 / (3.0 * SQRT_PI) * (2.0 + 3.0 * a1);
        assert!((k.diagonal_ratio_limit() - expect).abs() < 1e-13 * expect.abs().max(1.0));

        let h = RegularizerSpec::with_shape(OperatorKind::H, 5, 4, 0.0).unwrap();
        let a1 = h.coeffs[0];
        let expect = 2.0 / (15.0 * SQRT_PI) * (4.0 + 15.0 * a1);
        assert!((h.diagonal_ratio_limit() - expect).abs() < 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn sigma_series_and_direct_paths_agree_at_crossover() {
        for kind in [
            OperatorKind::S,
            OperatorKind::K,
            OperatorKind::H,
            OperatorKind::W,
        ] {
            for order in [3usize, 5, 7] {
                for kappa in [0.0, 0.5, 2.0] {
                    let spec = RegularizerSpec::for_order(kind, order, kappa).unwrap();
                    for t in [T_SERIES * 0.5, T_SERIES * 0.999, T_SERIES, T_SERIES * 1.001] {
                        let series = {
                            let t2 = t * t;
                            let mut acc = 0.0;
                            for &g in spec.ratio_series.iter().rev() {
                                acc = acc * t2 + g;
                            }
                            acc * t.powi(2 * kind.p() as i32 + 1)
                        };
                        let direct = spec.sigma_direct(t);
                        assert!(
                            (series - direct).abs() <= 1e-12,
                            "{} order {order} κ={kappa} t={t}: {series} vs {direct}",
                            kind.label()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_tends_to_one_and_ratio_is_finite_at_zero() {
        let spec = RegularizerSpec::for_order(OperatorKind::H, 5, 1.0).unwrap();
        assert!((spec.sigma(8.0) - 1.0).abs() < 1e-14);
        assert!(spec.ratio(0.0).is_finite());
        assert!((spec.ratio(0.0) - spec.diagonal_ratio_limit()).abs() == 0.0);
        // sigma(t)/t^5 agrees with ratio right above the crossover too
        let t = 0.3;
        assert!((spec.ratio(t) - spec.sigma(t) / t.powi(5)).abs() < 1e-12);
    }

    #[test]
    fn verified_moment_residuals_are_tiny() {
        for kind in [
            OperatorKind::S,
            OperatorKind::K,
            OperatorKind::Kt,
            OperatorKind::H,
            OperatorKind::W,
        ] {
            for order in [3usize, 5] {
                for kappa in [0.0, 0.5, 2.0] {
                    let spec = RegularizerSpec::for_order(kind, order, kappa).unwrap();
                    let report = verify_moments(&spec, 1).unwrap();
                    for (j, r) in &report.enforced {
                        assert!(
                            r.abs() <= 1e-8,
                            "{} order {order} κ={kappa} j={j}: residual {r:.3e}",
                            kind.label()
                        );
                    }
                    // The first unenforced moment must NOT vanish (it is the
                    // error-model constant); near kappa=0 it is order one.
                    if kappa == 0.0 {
                        assert!(report.unenforced[0].1.abs() > 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn order_and_shape_bookkeeping() {
        assert_eq!(OperatorKind::S.order(3), 7);
        assert_eq!(OperatorKind::K.order(4), 7);
        assert_eq!(OperatorKind::H.order(5), 7);
        assert_eq!(OperatorKind::W.order(5), 7);
        assert_eq!(OperatorKind::S.m_for_order(7).unwrap(), 3);
        assert_eq!(OperatorKind::H.m_for_order(3).unwrap(), 3);
        assert!(OperatorKind::S.m_for_order(4).is_err());
        assert_eq!(OperatorKind::W.row_range(5), 2..5);
        assert_eq!(OperatorKind::K.stability_exponent(true), 1);
        assert_eq!(OperatorKind::W.stability_exponent(true), 2);
        assert_eq!(OperatorKind::W.stability_exponent(false), 0);
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(RegularizerSpec::with_shape(OperatorKind::W, 2, 0, 0.0).is_err());
        assert!(RegularizerSpec::with_shape(OperatorKind::K, 1, 2, 0.0).is_err());
    }
}
