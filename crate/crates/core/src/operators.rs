//! Regularized kernel evaluation and Nyström application.
//!
//! All four kernels share the structure
//! `real = Φ(kr) · σ_p(r/δ)/r^(2p+1) · Ψ(x,y) / 4π` plus a smooth imaginary
//! part; since `σ_p(t)/t^(2p+1)` is evaluated as a stable ratio, the real
//! part is computed as `Φ(kr) Ψ ratio(r/δ) / (4π δ^(2p+1))` with no
//! division by `r` anywhere, and the diagonal is the analytic `r → 0`
//! limit.  A batched sweep evaluator serves several operators per point
//! pair, sharing the expensive `erf`/`exp`/trig work, and never stores a
//! matrix; dense assembly is reserved for the scattering solves.

use crate::geometry::{dot, norm, sub};
use crate::quadrature::CompositeQuadrature;
use crate::regularizer::{OperatorKind, RegularizerSpec};
use crate::solvers::LinearOp;
use crate::{Error, Result, C64};

/// Threshold below which `erf(t) = 1`, `exp(-t²) = 0` to machine
/// precision; skips the erf call for the (many) well-separated pairs.
const T_SATURATED: f64 = 9.0;

/// Small-argument switch for the smooth kernel companions `g0, g1, g2`.
const Z_SERIES: f64 = 0.1;

/// `sin(z)/z`, given `sin(z)` for the large branch.
#[inline]
fn g0(z: f64, sin_z: f64) -> f64 {
    if z < Z_SERIES {
        let z2 = z * z;
        1.0 + z2 * (-1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 * (-1.0 / 5040.0 + z2 / 362880.0)))
    } else {
        sin_z / z
    }
}

/// `(sin z - z cos z)/z³`, limit `1/3`.
#[inline]
fn g1(z: f64, sin_z: f64, cos_z: f64) -> f64 {
    if z < Z_SERIES {
        let z2 = z * z;
        1.0 / 3.0
            + z2 * (-1.0 / 30.0 + z2 * (1.0 / 840.0 + z2 * (-1.0 / 45360.0 + z2 / 3991680.0)))
    } else {
        (sin_z - z * cos_z) / (z * z * z)
    }
}

/// `(3z cos z + (z² - 3) sin z)/z⁵`, limit `-1/15`.
#[inline]
fn g2(z: f64, sin_z: f64, cos_z: f64) -> f64 {
    if z < Z_SERIES {
        let z2 = z * z;
        -1.0 / 15.0 + z2 * (1.0 / 210.0 + z2 * (-1.0 / 7560.0 + z2 / 498960.0))
    } else {
        (3.0 * z * cos_z + (z * z - 3.0) * sin_z) / (z * z).powi(2) / z
    }
}

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// A kernel ready for evaluation: operator, wavenumber, mollification
/// width, and the solved mollifier at `κ = kδ`.
#[derive(Debug, Clone)]
pub struct KernelContext {
    pub kind: OperatorKind,
    pub k: f64,
    pub delta: f64,
    pub spec: RegularizerSpec,
    /// `1 / (4π δ^(2p+1))`, the fixed scale of the regularized real part.
    inv_scale: f64,
}

impl KernelContext {
    /// Build a context of formal order `order` (odd, >= 3).
    pub fn new(kind: OperatorKind, order: usize, k: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mollification width must be positive, got {delta}"
            )));
        }
        if !(k >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavenumber must be nonnegative, got {k}"
            )));
        }
        let spec = RegularizerSpec::for_order(kind, order, k * delta)?;
        let inv_scale = 1.0 / (FOUR_PI * delta.powi(2 * kind.p() as i32 + 1));
        Ok(Self {
            kind,
            k,
            delta,
            spec,
            inv_scale,
        })
    }

    fn compatible(&self, other: &KernelContext) -> Result<()> {
        if self.k != other.k || self.delta != other.delta {
            return Err(Error::ContextMismatch(format!(
                "(k, δ) = ({}, {}) vs ({}, {})",
                self.k, self.delta, other.k, other.delta
            )));
        }
        Ok(())
    }

    /// Diagonal kernel value (the analytic coincidence limit).
    pub fn diagonal_value(&self) -> C64 {
        match self.kind {
            OperatorKind::S => C64::new(
                self.spec.diagonal_ratio_limit() * self.inv_scale,
                self.k / FOUR_PI,
            ),
            // Ψ vanishes quadratically on the diagonal for K/K'/W.
            OperatorKind::K | OperatorKind::Kt | OperatorKind::W => C64::new(0.0, 0.0),
            // Real part carries Ψ_H = r²(ν·ν) → 0; the smooth imaginary
            // part survives: k³ g1(0) (ν·ν) = k³/3.
            OperatorKind::H => C64::new(0.0, self.k.powi(3) / (12.0 * std::f64::consts::PI)),
        }
    }

    /// Off-diagonal kernel value at points `x, y` with outward normals
    /// `nx, ny` (`x ≠ y`).
    pub fn kernel_value(&self, x: [f64; 3], nx: [f64; 3], y: [f64; 3], ny: [f64; 3]) -> C64 {
        let d = sub(x, y);
        let r = norm(d);
        let shared = PairShared::compute(self.k, self.delta, r);
        self.value_from_shared(&shared, dot(d, nx), dot(d, ny), dot(nx, ny))
            .0
    }

    /// Kernel values for the ordered pair `(x_i, x_j)` and the reversed
    /// pair `(x_j, x_i)` from precomputed shared scalars.
    /// `dot_i = (x_i - x_j)·ν_i`, `dot_j = (x_i - x_j)·ν_j`.
    #[inline]
    fn value_from_shared(&self, s: &PairShared, dot_i: f64, dot_j: f64, nn: f64) -> (C64, C64) {
        let ratio = self.spec.ratio_precomp(s.t, s.erf_t, s.gauss);
        let k = self.k;
        match self.kind {
            OperatorKind::S => {
                let re = s.ckr * ratio * self.inv_scale;
                let im = k * g0(s.kr, s.skr) / FOUR_PI;
                let v = C64::new(re, im);
                (v, v)
            }
            OperatorKind::K | OperatorKind::Kt => {
                let phi = s.ckr + s.kr * s.skr;
                let c = C64::new(
                    phi * ratio * self.inv_scale,
                    k.powi(3) * g1(s.kr, s.skr, s.ckr) / FOUR_PI,
                );
                if self.kind == OperatorKind::K {
                    // K(x_i, x_j) carries ν(x_j)·(x_i - x_j); reversed pair
                    // carries ν(x_i)·(x_j - x_i) = -dot_i.
                    (c * dot_j, c * (-dot_i))
                } else {
                    // Adjoint kernel K'(x, y) = K(y, x): ν(x)·(y - x).
                    (c * (-dot_i), c * dot_j)
                }
            }
            OperatorKind::H => {
                let phi = s.ckr + s.kr * s.skr;
                let v = C64::new(
                    phi * s.r * s.r * nn * ratio * self.inv_scale,
                    k.powi(3) * g1(s.kr, s.skr, s.ckr) * nn / FOUR_PI,
                );
                (v, v)
            }
            OperatorKind::W => {
                let phi = (s.kr * s.kr - 3.0) * s.ckr - 3.0 * s.kr * s.skr;
                let psi = dot_i * dot_j; // invariant under swapping the pair
                let v = C64::new(
                    phi * psi * ratio * self.inv_scale,
                    k.powi(5) * g2(s.kr, s.skr, s.ckr) * psi / FOUR_PI,
                );
                (v, v)
            }
        }
    }
}

/// Operator-independent per-pair scalars.
struct PairShared {
    r: f64,
    kr: f64,
    ckr: f64,
    skr: f64,
    t: f64,
    erf_t: f64,
    gauss: f64,
}

impl PairShared {
    #[inline]
    fn compute(k: f64, delta: f64, r: f64) -> Self {
        let kr = k * r;
        let (skr, ckr) = kr.sin_cos();
        let t = r / delta;
        let (erf_t, gauss) = if t >= T_SATURATED {
            (1.0, 0.0)
        } else {
            (crate::special::erf(t), (-t * t).exp())
        };
        Self {
            r,
            kr,
            ckr,
            skr,
            t,
            erf_t,
            gauss,
        }
    }
}

/// Dense Nyström matrix (kernel values times target-point quadrature
/// weights), row-major.
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub n: usize,
    pub values: Vec<C64>,
}

impl LinearOp for OperatorMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for (i, row) in self.values.chunks_exact(self.n).enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (a, v) in row.iter().zip(x.iter()) {
                acc += a * v;
            }
            out[i] = acc;
        }
        out
    }
}

const MAGIC: &[u8; 4] = b"HREG";

impl OperatorMatrix {
    /// Dump as a flat binary: 16-byte header (magic `HREG`, u32 dimension,
    /// u32 flags, 4 reserved bytes), then row-major complex entries as
    /// little-endian f64 pairs.
    pub fn write_binary(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(MAGIC)?;
        f.write_all(&(self.n as u32).to_le_bytes())?;
        f.write_all(&0u32.to_le_bytes())?;
        f.write_all(&[0u8; 4])?;
        for v in &self.values {
            f.write_all(&v.re.to_le_bytes())?;
            f.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(kind: OperatorKind, path: &std::path::Path) -> Result<Self> {
        use std::io::Read;
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut header = [0u8; 16];
        f.read_exact(&mut header)?;
        if &header[0..4] != MAGIC {
            return Err(Error::InvalidParameter("bad magic in matrix dump".into()));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let mut values = Vec::with_capacity(n * n);
        let mut buf = [0u8; 16];
        for _ in 0..n * n {
            f.read_exact(&mut buf)?;
            values.push(C64::new(
                f64::from_le_bytes(buf[0..8].try_into().unwrap()),
                f64::from_le_bytes(buf[8..16].try_into().unwrap()),
            ));
        }
        Ok(Self { kind, n, values })
    }
}

/// Memory guard for dense assembly (~1.6 GB of complex entries).
const MAX_DENSE_DIM: usize = 10_000;

/// Assemble the dense Nyström matrix of one operator.
pub fn assemble(ctx: &KernelContext, quad: &CompositeQuadrature) -> Result<OperatorMatrix> {
    assemble_combination(std::slice::from_ref(ctx), &[C64::new(1.0, 0.0)], C64::new(0.0, 0.0), quad)
}

/// Assemble `shift·I + Σ c_m Op_m` in a single sweep over point pairs
/// (used for the fused combined-field matrix `½I + K - ikS`).  All
/// contexts must share `(k, δ)`.
pub fn assemble_combination(
    ctxs: &[KernelContext],
    weights: &[C64],
    shift: C64,
    quad: &CompositeQuadrature,
) -> Result<OperatorMatrix> {
    if ctxs.is_empty() || ctxs.len() != weights.len() {
        return Err(Error::InvalidParameter(
            "need matching, nonempty context/weight lists".into(),
        ));
    }
    for c in &ctxs[1..] {
        ctxs[0].compatible(c)?;
    }
    let n = quad.len();
    if n > MAX_DENSE_DIM {
        return Err(Error::ResourceCap(format!(
            "dense assembly of dimension {n} exceeds cap {MAX_DENSE_DIM}"
        )));
    }
    let k = ctxs[0].k;
    let delta = ctxs[0].delta;
    let nodes = &quad.nodes;
    let mut values = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let (pi, ni, wi) = (nodes[i].position, nodes[i].normal, nodes[i].weight);
        for j in (i + 1)..n {
            let (pj, nj, wj) = (nodes[j].position, nodes[j].normal, nodes[j].weight);
            let d = sub(pi, pj);
            let shared = PairShared::compute(k, delta, norm(d));
            let dot_i = dot(d, ni);
            let dot_j = dot(d, nj);
            let nn = dot(ni, nj);
            let mut fwd = C64::new(0.0, 0.0);
            let mut rev = C64::new(0.0, 0.0);
            for (ctx, c) in ctxs.iter().zip(weights.iter()) {
                let (f, r) = ctx.value_from_shared(&shared, dot_i, dot_j, nn);
                fwd += c * f;
                rev += c * r;
            }
            values[i * n + j] = fwd * wj;
            values[j * n + i] = rev * wi;
        }
        let mut diag = shift;
        for (ctx, c) in ctxs.iter().zip(weights.iter()) {
            diag += c * ctx.diagonal_value() * wi;
        }
        values[i * n + i] = diag;
    }
    Ok(OperatorMatrix {
        kind: ctxs[0].kind,
        n,
        values,
    })
}

/// Apply several operators to their input densities in one streamed
/// sweep over point pairs, never storing a matrix.  Returns one output
/// vector per context.  Contexts may differ in operator, order,
/// wavenumber, and width: per-pair quantities are computed once per
/// distinct width (mollifier data) and once per distinct wavenumber
/// (oscillatory factors), so whole parameter studies fuse into a single
/// pass over the geometry.  This is the workhorse of the convergence
/// sweeps.
pub fn apply_batch(
    ctxs: &[&KernelContext],
    quad: &CompositeQuadrature,
    inputs: &[&[C64]],
) -> Result<Vec<Vec<C64>>> {
    if ctxs.is_empty() || ctxs.len() != inputs.len() {
        return Err(Error::InvalidParameter(
            "need matching, nonempty context/input lists".into(),
        ));
    }
    let n = quad.len();
    for x in inputs {
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "input length {} vs {} quadrature nodes",
                x.len(),
                n
            )));
        }
    }
    // Shared per-width mollifier data and per-wavenumber oscillatory data.
    struct DPre {
        delta: f64,
        inv_delta: f64,
    }
    struct KPre {
        k: f64,
        zero: bool,
        g0: bool,
        g1: bool,
        g2: bool,
    }
    // Per-context loop invariants: singularity strength p, the coefficient
    // of the smooth imaginary part, and the group indices.
    struct Pre {
        kind: OperatorKind,
        p: usize,
        inv_scale: f64,
        im: f64,
        dg: usize,
        kg: usize,
        /// Input group: contexts applied to the same vector share the
        /// weighted input values.
        ig: usize,
        /// Purely real kernel (k = 0): the imaginary parts vanish and the
        /// accumulation needs half the arithmetic.
        real: bool,
        /// Index of an earlier K/K⊤ context with identical parameters whose
        /// per-pair values transpose into this context's values.
        twin: Option<usize>,
        /// Some later context reuses this context's per-pair values.
        is_source: bool,
    }
    let mut dpre: Vec<DPre> = Vec::new();
    let mut kpre: Vec<KPre> = Vec::new();
    let mut irep: Vec<&[C64]> = Vec::new();
    let mut pre: Vec<Pre> = Vec::with_capacity(ctxs.len());
    for (mi, c) in ctxs.iter().enumerate() {
        let dg = match dpre.iter().position(|d| d.delta == c.delta) {
            Some(g) => g,
            None => {
                dpre.push(DPre {
                    delta: c.delta,
                    inv_delta: 1.0 / c.delta,
                });
                dpre.len() - 1
            }
        };
        let kg = match kpre.iter().position(|g| g.k == c.k) {
            Some(g) => g,
            None => {
                kpre.push(KPre {
                    k: c.k,
                    zero: c.k == 0.0,
                    g0: false,
                    g1: false,
                    g2: false,
                });
                kpre.len() - 1
            }
        };
        match c.kind {
            OperatorKind::S => kpre[kg].g0 = true,
            OperatorKind::K | OperatorKind::Kt | OperatorKind::H => kpre[kg].g1 = true,
            OperatorKind::W => kpre[kg].g2 = true,
        }
        let ig = match irep
            .iter()
            .position(|r| std::ptr::eq(r.as_ptr(), inputs[mi].as_ptr()))
        {
            Some(g) => g,
            None => {
                irep.push(inputs[mi]);
                irep.len() - 1
            }
        };
        // A K context and a K⊤ context with identical parameters produce
        // transposed kernel values: evaluate once, swap for the other.
        let twin = if matches!(c.kind, OperatorKind::K | OperatorKind::Kt) {
            (0..mi).find(|&j| {
                let e = ctxs[j];
                matches!(e.kind, OperatorKind::K | OperatorKind::Kt)
                    && e.kind != c.kind
                    && e.k == c.k
                    && e.delta == c.delta
                    && e.spec.coeffs == c.spec.coeffs
                    && pre[j].twin.is_none()
            })
        } else {
            None
        };
        if let Some(src) = twin {
            pre[src].is_source = true;
        }
        pre.push(Pre {
            kind: c.kind,
            p: c.kind.p(),
            inv_scale: c.inv_scale,
            im: match c.kind {
                OperatorKind::S => c.k / FOUR_PI,
                OperatorKind::K | OperatorKind::Kt | OperatorKind::H => c.k.powi(3) / FOUR_PI,
                OperatorKind::W => c.k.powi(5) / FOUR_PI,
            },
            dg,
            kg,
            ig,
            real: c.k == 0.0,
            twin,
            is_source: false,
        });
    }
    // Per-pair scratch, refreshed once per (pair, group).
    #[derive(Clone, Copy, Default)]
    struct DS {
        t: f64,
        erf: f64,
        gauss: f64,
        inv: [f64; 3],
    }
    #[derive(Clone, Copy, Default)]
    struct KS {
        ckr: f64,
        phi_k: f64,
        phi_w: f64,
        g0: f64,
        g1: f64,
        g2: f64,
    }
    let ks_static = KS {
        ckr: 1.0,
        phi_k: 1.0,
        phi_w: -3.0,
        g0: 0.0,
        g1: 0.0,
        g2: 0.0,
    };
    let mut ds = vec![DS::default(); dpre.len()];
    let mut ks = vec![ks_static; kpre.len()];
    let m_count = ctxs.len();
    let nodes = &quad.nodes;
    let mut outputs: Vec<Vec<C64>> = (0..m_count)
        .map(|_| vec![C64::new(0.0, 0.0); n])
        .collect();
    let mut acc = vec![C64::new(0.0, 0.0); m_count];
    // Kernel values of twin-source contexts, as (fwd re, fwd im, rev re,
    // rev im), refreshed per pair; weighted input values per input group.
    let mut vals = vec![[0.0f64; 4]; m_count];
    let mut xwi = vec![C64::new(0.0, 0.0); irep.len()];
    let mut xwj = vec![C64::new(0.0, 0.0); irep.len()];
    // Blocked pair loop: within a column block the per-context output and
    // input slabs stay cache-resident even for large batches.
    const BLOCK: usize = 128;
    let mut jb = 0usize;
    while jb < n {
        let jend = (jb + BLOCK).min(n);
        for i in 0..jend {
            let j0 = (i + 1).max(jb);
            if j0 >= jend {
                continue;
            }
            let (pi, ni, wi) = (nodes[i].position, nodes[i].normal, nodes[i].weight);
            for (g, rep) in irep.iter().enumerate() {
                xwi[g] = rep[i] * wi;
            }
            for a in acc.iter_mut() {
                *a = C64::new(0.0, 0.0);
            }
            for j in j0..jend {
                let (pj, nj, wj) = (nodes[j].position, nodes[j].normal, nodes[j].weight);
                for (g, rep) in irep.iter().enumerate() {
                    xwj[g] = rep[j] * wj;
                }
                let d = sub(pi, pj);
                let r = norm(d);
                let inv_r = 1.0 / r;
                let dot_i = dot(d, ni);
                let dot_j = dot(d, nj);
                let nn = dot(ni, nj);
                for (s, g) in ds.iter_mut().zip(dpre.iter()) {
                    let t = r * g.inv_delta;
                    let (erf_t, gauss) = if t >= T_SATURATED {
                        (1.0, 0.0)
                    } else {
                        (crate::special::erf(t), (-t * t).exp())
                    };
                    // One reciprocal serves every 1/t^(2p+1) factor.
                    let inv = if t < crate::regularizer::T_SERIES {
                        [0.0; 3]
                    } else {
                        let i1 = g.delta * inv_r;
                        let i2 = i1 * i1;
                        [i1, i1 * i2, i1 * i2 * i2]
                    };
                    *s = DS {
                        t,
                        erf: erf_t,
                        gauss,
                        inv,
                    };
                }
                for (s, g) in ks.iter_mut().zip(kpre.iter()) {
                    if g.zero {
                        continue; // static factors never change
                    }
                    let kr = g.k * r;
                    let (skr, ckr) = kr.sin_cos();
                    *s = KS {
                        ckr,
                        phi_k: ckr + kr * skr,
                        phi_w: (kr * kr - 3.0) * ckr - 3.0 * kr * skr,
                        g0: if g.g0 { g0(kr, skr) } else { 0.0 },
                        g1: if g.g1 { g1(kr, skr, ckr) } else { 0.0 },
                        g2: if g.g2 { g2(kr, skr, ckr) } else { 0.0 },
                    };
                }
                for (m, pc) in pre.iter().enumerate() {
                    let (fr, fi, rr, ri) = if let Some(src) = pc.twin {
                        // Transposed values of the matching K/K⊤ context.
                        let v = vals[src];
                        (v[2], v[3], v[0], v[1])
                    } else {
                        let dsg = ds[pc.dg];
                        let ksg = ks[pc.kg];
                        // Deep in the mollifier tail the profile is exactly
                        // 1 at working precision; skip the correction
                        // series.
                        let ratio = if dsg.gauss == 0.0 {
                            dsg.inv[pc.p]
                        } else {
                            ctxs[m]
                                .spec
                                .ratio_with_inverse(dsg.t, dsg.erf, dsg.gauss, dsg.inv[pc.p])
                        };
                        match pc.kind {
                            OperatorKind::S => {
                                let vr = ksg.ckr * ratio * pc.inv_scale;
                                let vi = pc.im * ksg.g0;
                                (vr, vi, vr, vi)
                            }
                            OperatorKind::K => {
                                let cr = ksg.phi_k * ratio * pc.inv_scale;
                                let ci = pc.im * ksg.g1;
                                (cr * dot_j, ci * dot_j, cr * -dot_i, ci * -dot_i)
                            }
                            OperatorKind::Kt => {
                                let cr = ksg.phi_k * ratio * pc.inv_scale;
                                let ci = pc.im * ksg.g1;
                                (cr * -dot_i, ci * -dot_i, cr * dot_j, ci * dot_j)
                            }
                            OperatorKind::H => {
                                let vr = ksg.phi_k * r * r * nn * ratio * pc.inv_scale;
                                let vi = pc.im * ksg.g1 * nn;
                                (vr, vi, vr, vi)
                            }
                            OperatorKind::W => {
                                let psi = dot_i * dot_j;
                                let vr = ksg.phi_w * psi * ratio * pc.inv_scale;
                                let vi = pc.im * ksg.g2 * psi;
                                (vr, vi, vr, vi)
                            }
                        }
                    };
                    if pc.is_source {
                        vals[m] = [fr, fi, rr, ri];
                    }
                    let xj = xwj[pc.ig];
                    let xi = xwi[pc.ig];
                    let a = &mut acc[m];
                    let oj = &mut outputs[m][j];
                    if pc.real {
                        a.re += fr * xj.re;
                        a.im += fr * xj.im;
                        oj.re += rr * xi.re;
                        oj.im += rr * xi.im;
                    } else {
                        a.re += fr * xj.re - fi * xj.im;
                        a.im += fr * xj.im + fi * xj.re;
                        oj.re += rr * xi.re - ri * xi.im;
                        oj.im += rr * xi.im + ri * xi.re;
                    }
                }
            }
            for (out, a) in outputs.iter_mut().zip(acc.iter()) {
                out[i] += *a;
            }
        }
        jb = jend;
    }
    for i in 0..n {
        let wi = nodes[i].weight;
        for (m, ctx) in ctxs.iter().enumerate() {
            outputs[m][i] += ctx.diagonal_value() * (wi * inputs[m][i]);
        }
    }
    Ok(outputs)
}

/// Apply the hypersingular operator `T = H + W` in one sweep.
pub fn apply_hypersingular(
    ctx_h: &KernelContext,
    ctx_w: &KernelContext,
    quad: &CompositeQuadrature,
    x: &[C64],
) -> Result<Vec<C64>> {
    if ctx_h.kind != OperatorKind::H || ctx_w.kind != OperatorKind::W {
        return Err(Error::ContextMismatch(
            "hypersingular application needs an (H, W) context pair".into(),
        ));
    }
    let parts = apply_batch(&[ctx_h, ctx_w], quad, &[x, x])?;
    let mut out = parts[0].clone();
    for (o, w) in out.iter_mut().zip(parts[1].iter()) {
        *o += w;
    }
    Ok(out)
}
