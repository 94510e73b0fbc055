//! Spectral time integration on 1-D periodic (Fourier) and homogeneous-Neumann
//! (cosine-basis) grids: exponential ETDRK4 stepping with 2/3-rule dealiasing
//! for the amplitude system and the scalar models, steady-state detection,
//! parameter ramping, and reconstruction of the physical field from the
//! amplitude Ansatz.

use crate::models::{CubicReaction, GeneralScalarModel};
use crate::numerics::{phi1, phi2, phi3};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Sup-norm threshold above which a run is aborted as blown up.
pub const BLOWUP_LIMIT: f64 = 1e6;

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    Neumann,
}

/// Uniform 1-D grid. Periodic grids collocate at j·L/N; Neumann grids use the
/// staggered points (j+1/2)·L/N natural to the cosine basis (power-of-two N
/// preferred for transform speed, any N ≥ 16 accepted).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid1D {
    pub l: f64,
    pub n: usize,
    pub bc: BoundaryCondition,
}

impl Grid1D {
    pub fn new(l: f64, n: usize, bc: BoundaryCondition) -> Result<Self> {
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::InvalidInput(format!("grid length must be positive, got {l}")));
        }
        if n < 16 {
            return Err(Error::InvalidInput(format!("grid needs at least 16 points, got {n}")));
        }
        Ok(Self { l, n, bc })
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.dx();
        match self.bc {
            BoundaryCondition::Periodic => (0..self.n).map(|j| j as f64 * h).collect(),
            BoundaryCondition::Neumann => (0..self.n).map(|j| (j as f64 + 0.5) * h).collect(),
        }
    }

    /// Transform-space wavenumbers: signed Fourier frequencies 2πm/L for
    /// periodic grids, cosine frequencies nπ/L for Neumann grids.
    pub fn wavenumbers(&self) -> Vec<f64> {
        match self.bc {
            BoundaryCondition::Periodic => {
                let base = 2.0 * PI / self.l;
                (0..self.n)
                    .map(|j| {
                        let m = if 2 * j < self.n { j as isize } else { j as isize - self.n as isize };
                        base * m as f64
                    })
                    .collect()
            }
            BoundaryCondition::Neumann => {
                (0..self.n).map(|j| j as f64 * PI / self.l).collect()
            }
        }
    }

    /// 2/3-rule dealias mask (1 = keep, 0 = cut), applied to the transform of
    /// every nonlinear-term evaluation.
    pub fn dealias_mask(&self) -> Vec<f64> {
        match self.bc {
            BoundaryCondition::Periodic => (0..self.n)
                .map(|j| if j.min(self.n - j) < self.n / 3 { 1.0 } else { 0.0 })
                .collect(),
            BoundaryCondition::Neumann => (0..self.n)
                .map(|j| if j < 2 * self.n / 3 { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// transforms
// ---------------------------------------------------------------------------

/// Forward/inverse transform pair for one grid: complex FFT (periodic) or
/// unnormalized DCT-II with its exact inverse (Neumann), the cosine pair
/// evaluated through a same-length complex FFT. Complex fields under Neumann
/// conditions transform componentwise (real and imaginary parts separately).
pub struct FieldTransform {
    n: usize,
    bc: BoundaryCondition,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    tw_fwd: Vec<Complex64>,
    tw_inv: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    rbuf: Vec<f64>,
    rbuf2: Vec<f64>,
}

impl FieldTransform {
    pub fn new(grid: &Grid1D) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let n = grid.n;
        let ang = |k: usize| PI * k as f64 / (2.0 * n as f64);
        Self {
            n,
            bc: grid.bc,
            fwd,
            inv,
            tw_fwd: (0..n).map(|k| Complex64::from_polar(1.0, -ang(k))).collect(),
            tw_inv: (0..n).map(|k| Complex64::from_polar(1.0, ang(k))).collect(),
            buf: vec![Complex64::default(); n],
            scratch: vec![Complex64::default(); scratch_len],
            rbuf: vec![0.0; n],
            rbuf2: vec![0.0; n],
        }
    }

    /// Unnormalized DCT-II: C[k] = 2 Σ_j x_j cos(πk(2j+1)/(2N)).
    pub fn dct2(&mut self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..(n + 1) / 2 {
            self.buf[i] = Complex64::new(x[2 * i], 0.0);
        }
        for i in 0..n / 2 {
            self.buf[n - 1 - i] = Complex64::new(x[2 * i + 1], 0.0);
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        for k in 0..n {
            out[k] = 2.0 * (self.tw_fwd[k] * self.buf[k]).re;
        }
    }

    /// Exact inverse of [`Self::dct2`]:
    /// x_j = (1/(2N))·(C₀ + 2 Σ_{k≥1} C_k cos(πk(2j+1)/(2N))).
    pub fn idct2(&mut self, c: &[f64], out: &mut [f64]) {
        let n = self.n;
        self.buf[0] = Complex64::new(0.5 * c[0], 0.0);
        for k in 1..n {
            let w = Complex64::new(0.5 * c[k], -0.5 * c[n - k]);
            self.buf[k] = self.tw_inv[k] * w;
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = 1.0 / n as f64;
        for i in 0..(n + 1) / 2 {
            out[2 * i] = self.buf[i].re * scale;
        }
        for i in 0..n / 2 {
            out[2 * i + 1] = self.buf[n - 1 - i].re * scale;
        }
    }

    /// Real field → complex coefficient array.
    pub fn real_to_spectral(&mut self, x: &[f64], out: &mut [Complex64]) {
        match self.bc {
            BoundaryCondition::Periodic => {
                for (b, &v) in self.buf.iter_mut().zip(x) {
                    *b = Complex64::new(v, 0.0);
                }
                self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
                out.copy_from_slice(&self.buf);
            }
            BoundaryCondition::Neumann => {
                let mut tmp = std::mem::take(&mut self.rbuf);
                self.dct2(x, &mut tmp);
                for (o, &v) in out.iter_mut().zip(tmp.iter()) {
                    *o = Complex64::new(v, 0.0);
                }
                self.rbuf = tmp;
            }
        }
    }

    /// Coefficient array → real part of the physical field.
    pub fn spectral_to_real(&mut self, c: &[Complex64], out: &mut [f64]) {
        match self.bc {
            BoundaryCondition::Periodic => {
                self.buf.copy_from_slice(c);
                self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
                let scale = 1.0 / self.n as f64;
                for (o, b) in out.iter_mut().zip(&self.buf) {
                    *o = b.re * scale;
                }
            }
            BoundaryCondition::Neumann => {
                let mut tin = std::mem::take(&mut self.rbuf);
                let mut tout = std::mem::take(&mut self.rbuf2);
                for (t, v) in tin.iter_mut().zip(c) {
                    *t = v.re;
                }
                self.idct2(&tin, &mut tout);
                out.copy_from_slice(&tout);
                self.rbuf = tin;
                self.rbuf2 = tout;
            }
        }
    }

    /// Complex field → coefficient array (componentwise DCT under Neumann).
    pub fn complex_to_spectral(&mut self, x: &[Complex64], out: &mut [Complex64]) {
        match self.bc {
            BoundaryCondition::Periodic => {
                self.buf.copy_from_slice(x);
                self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
                out.copy_from_slice(&self.buf);
            }
            BoundaryCondition::Neumann => {
                let mut tin = std::mem::take(&mut self.rbuf);
                let mut tout = std::mem::take(&mut self.rbuf2);
                for (t, v) in tin.iter_mut().zip(x) {
                    *t = v.re;
                }
                self.dct2(&tin, &mut tout);
                for (o, &v) in out.iter_mut().zip(tout.iter()) {
                    *o = Complex64::new(v, 0.0);
                }
                for (t, v) in tin.iter_mut().zip(x) {
                    *t = v.im;
                }
                self.dct2(&tin, &mut tout);
                for (o, &v) in out.iter_mut().zip(tout.iter()) {
                    *o += Complex64::new(0.0, v);
                }
                self.rbuf = tin;
                self.rbuf2 = tout;
            }
        }
    }

    /// Coefficient array → complex physical field.
    pub fn spectral_to_complex(&mut self, c: &[Complex64], out: &mut [Complex64]) {
        match self.bc {
            BoundaryCondition::Periodic => {
                self.buf.copy_from_slice(c);
                self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
                let scale = 1.0 / self.n as f64;
                for (o, b) in out.iter_mut().zip(&self.buf) {
                    *o = b * scale;
                }
            }
            BoundaryCondition::Neumann => {
                let mut tin = std::mem::take(&mut self.rbuf);
                let mut tout = std::mem::take(&mut self.rbuf2);
                for (t, v) in tin.iter_mut().zip(c) {
                    *t = v.re;
                }
                self.idct2(&tin, &mut tout);
                for (o, &v) in out.iter_mut().zip(tout.iter()) {
                    *o = Complex64::new(v, 0.0);
                }
                for (t, v) in tin.iter_mut().zip(c) {
                    *t = v.im;
                }
                self.idct2(&tin, &mut tout);
                for (o, &v) in out.iter_mut().zip(tout.iter()) {
                    *o += Complex64::new(0.0, v);
                }
                self.rbuf = tin;
                self.rbuf2 = tout;
            }
        }
    }
}

/// Spectral evaluation of the even derivative ∂x^{2j} of a real field
/// (diagonal multiplication by (−k²)^j in transform space, no dealiasing).
pub fn even_derivative(field: &[f64], grid: &Grid1D, j: usize) -> Result<Vec<f64>> {
    if field.len() != grid.n {
        return Err(Error::InvalidInput(format!(
            "field length {} does not match grid size {}",
            field.len(),
            grid.n
        )));
    }
    if j == 0 {
        return Ok(field.to_vec());
    }
    let mut ft = FieldTransform::new(grid);
    let mut spec = vec![Complex64::default(); grid.n];
    ft.real_to_spectral(field, &mut spec);
    for (s, k) in spec.iter_mut().zip(grid.wavenumbers()) {
        *s *= (-k * k).powi(j as i32);
    }
    let mut out = vec![0.0; grid.n];
    ft.spectral_to_real(&spec, &mut out);
    Ok(out)
}

// ---------------------------------------------------------------------------
// ETDRK4 tables
// ---------------------------------------------------------------------------

/// Exponential-integrator tables for a real diagonal symbol: E = e^{hL},
/// E2 = e^{hL/2}, Q = (h/2)φ₁(hL/2), and the Cox–Matthews combination weights
/// f1 = h(φ₁ − 3φ₂ + 4φ₃), f2 = h(φ₂ − 2φ₃), f3 = h(4φ₃ − φ₂) at hL.
#[derive(Debug, Clone)]
pub struct EtdrkTables {
    pub e: Vec<f64>,
    pub e2: Vec<f64>,
    pub q: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f3: Vec<f64>,
}

pub fn etdrk4_tables(symbol: &[f64], dt: f64) -> EtdrkTables {
    let n = symbol.len();
    let mut t = EtdrkTables {
        e: Vec::with_capacity(n),
        e2: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        f1: Vec::with_capacity(n),
        f2: Vec::with_capacity(n),
        f3: Vec::with_capacity(n),
    };
    for &l in symbol {
        let z = dt * l;
        t.e.push(z.exp());
        t.e2.push((0.5 * z).exp());
        t.q.push(0.5 * dt * phi1(0.5 * z));
        let (p1, p2, p3) = (phi1(z), phi2(z), phi3(z));
        t.f1.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
        t.f2.push(dt * (p2 - 2.0 * p3));
        t.f3.push(dt * (4.0 * p3 - p2));
    }
    t
}

// ---------------------------------------------------------------------------
// amplitude-system solver
// ---------------------------------------------------------------------------

/// Right-hand-side coefficients of the amplitude system in the unified form
/// A_τ = a_diff·A_ξξ + a_growth·A + ab·A·B,
/// B_τ = b_diff·B_ξξ + b_const + b_sq·B² + b_asq·|A|².
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ABOperator {
    pub a_growth: f64,
    pub a_diff: f64,
    pub ab: f64,
    pub b_diff: f64,
    pub b_const: f64,
    pub b_sq: f64,
    pub b_asq: f64,
}

impl ABOperator {
    /// Canonical system A_τ = A_ξξ + A − AB,
    /// (1/α)B_τ = dB_ξξ + 1 − R − B² + β|A|² at forcing level R.
    pub fn canonical(alpha: f64, d: f64, beta: f64, r_level: f64) -> Self {
        Self {
            a_growth: 1.0,
            a_diff: 1.0,
            ab: -1.0,
            b_diff: alpha * d,
            b_const: alpha * (1.0 - r_level),
            b_sq: -alpha,
            b_asq: alpha * beta,
        }
    }

    /// Raw-coefficient system A_τ = c1·A_ξξ + c2·A + c3·AB,
    /// B_τ = c4·B_ξξ + c5 − c6·r + c7·B² + c8·|A|² at unscaled forcing r.
    pub fn raw(c: &[f64; 8], r: f64) -> Self {
        Self {
            a_growth: c[1],
            a_diff: c[0],
            ab: c[2],
            b_diff: c[3],
            b_const: c[4] - c[5] * r,
            b_sq: c[6],
            b_asq: c[7],
        }
    }
}

/// Amplitude-system state: complex envelope A, real mean-mode correction B.
#[derive(Debug, Clone)]
pub struct ABState {
    pub a: Vec<Complex64>,
    pub b: Vec<f64>,
    pub tau: f64,
}

struct AbScratch {
    ah: Vec<Complex64>,
    bh: Vec<Complex64>,
    nu_a: Vec<Complex64>,
    nu_b: Vec<Complex64>,
    sa_a: Vec<Complex64>,
    sa_b: Vec<Complex64>,
    na_a: Vec<Complex64>,
    na_b: Vec<Complex64>,
    sb_a: Vec<Complex64>,
    sb_b: Vec<Complex64>,
    nb_a: Vec<Complex64>,
    nb_b: Vec<Complex64>,
    sc_a: Vec<Complex64>,
    sc_b: Vec<Complex64>,
    nc_a: Vec<Complex64>,
    nc_b: Vec<Complex64>,
    pa: Vec<Complex64>,
    pb: Vec<Complex64>,
}

impl AbScratch {
    fn new(n: usize) -> Self {
        let z = || vec![Complex64::default(); n];
        Self {
            ah: z(), bh: z(), nu_a: z(), nu_b: z(), sa_a: z(), sa_b: z(),
            na_a: z(), na_b: z(), sb_a: z(), sb_b: z(), nb_a: z(), nb_b: z(),
            sc_a: z(), sc_b: z(), nc_a: z(), nc_b: z(), pa: z(), pb: z(),
        }
    }
}

fn ab_nonlinear(
    ft: &mut FieldTransform,
    op: &ABOperator,
    mask: &[f64],
    in_a: &[Complex64],
    in_b: &[Complex64],
    out_a: &mut [Complex64],
    out_b: &mut [Complex64],
    pa: &mut [Complex64],
    pb: &mut [Complex64],
) {
    ft.spectral_to_complex(in_a, pa);
    ft.spectral_to_complex(in_b, pb);
    for i in 0..pa.len() {
        let a = pa[i];
        let b = pb[i];
        pa[i] = op.ab * a * b;
        pb[i] = Complex64::new(op.b_const, 0.0) + op.b_sq * b * b + op.b_asq * (a * a.conj());
    }
    ft.complex_to_spectral(pa, out_a);
    ft.complex_to_spectral(pb, out_b);
    for k in 0..mask.len() {
        out_a[k] *= mask[k];
        out_b[k] *= mask[k];
    }
}

/// Fixed-step ETDRK4 integrator for the amplitude system on one grid.
pub struct ABSolver {
    pub grid: Grid1D,
    pub op: ABOperator,
    pub dt: f64,
    ft: FieldTransform,
    ta: EtdrkTables,
    tb: EtdrkTables,
    mask: Vec<f64>,
    s: AbScratch,
}

impl ABSolver {
    pub fn new(op: ABOperator, grid: &Grid1D, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let kk = grid.wavenumbers();
        let sym_a: Vec<f64> = kk.iter().map(|k| op.a_growth - op.a_diff * k * k).collect();
        let sym_b: Vec<f64> = kk.iter().map(|k| -op.b_diff * k * k).collect();
        Ok(Self {
            grid: grid.clone(),
            op,
            dt,
            ft: FieldTransform::new(grid),
            ta: etdrk4_tables(&sym_a, dt),
            tb: etdrk4_tables(&sym_b, dt),
            mask: grid.dealias_mask(),
            s: AbScratch::new(grid.n),
        })
    }

    /// One ETDRK4 step in place; aborts with a blow-up error past the sup-norm
    /// limit.
    pub fn step(&mut self, st: &mut ABState) -> Result<()> {
        let n = self.grid.n;
        if st.a.len() != n || st.b.len() != n {
            return Err(Error::InvalidInput(format!(
                "state length mismatch: A {}, B {}, grid {}",
                st.a.len(),
                st.b.len(),
                n
            )));
        }
        let s = &mut self.s;
        let ft = &mut self.ft;
        ft.complex_to_spectral(&st.a, &mut s.ah);
        ft.real_to_spectral(&st.b, &mut s.bh);
        let (ta, tb) = (&self.ta, &self.tb);
        ab_nonlinear(ft, &self.op, &self.mask, &s.ah, &s.bh, &mut s.nu_a, &mut s.nu_b, &mut s.pa, &mut s.pb);
        for k in 0..n {
            s.sa_a[k] = ta.e2[k] * s.ah[k] + ta.q[k] * s.nu_a[k];
            s.sa_b[k] = tb.e2[k] * s.bh[k] + tb.q[k] * s.nu_b[k];
        }
        ab_nonlinear(ft, &self.op, &self.mask, &s.sa_a, &s.sa_b, &mut s.na_a, &mut s.na_b, &mut s.pa, &mut s.pb);
        for k in 0..n {
            s.sb_a[k] = ta.e2[k] * s.ah[k] + ta.q[k] * s.na_a[k];
            s.sb_b[k] = tb.e2[k] * s.bh[k] + tb.q[k] * s.na_b[k];
        }
        ab_nonlinear(ft, &self.op, &self.mask, &s.sb_a, &s.sb_b, &mut s.nb_a, &mut s.nb_b, &mut s.pa, &mut s.pb);
        for k in 0..n {
            s.sc_a[k] = ta.e2[k] * s.sa_a[k] + ta.q[k] * (2.0 * s.nb_a[k] - s.nu_a[k]);
            s.sc_b[k] = tb.e2[k] * s.sa_b[k] + tb.q[k] * (2.0 * s.nb_b[k] - s.nu_b[k]);
        }
        ab_nonlinear(ft, &self.op, &self.mask, &s.sc_a, &s.sc_b, &mut s.nc_a, &mut s.nc_b, &mut s.pa, &mut s.pb);
        for k in 0..n {
            s.ah[k] = ta.e[k] * s.ah[k]
                + ta.f1[k] * s.nu_a[k]
                + 2.0 * ta.f2[k] * (s.na_a[k] + s.nb_a[k])
                + ta.f3[k] * s.nc_a[k];
            s.bh[k] = tb.e[k] * s.bh[k]
                + tb.f1[k] * s.nu_b[k]
                + 2.0 * tb.f2[k] * (s.na_b[k] + s.nb_b[k])
                + tb.f3[k] * s.nc_b[k];
        }
        ft.spectral_to_complex(&s.ah, &mut st.a);
        ft.spectral_to_real(&s.bh, &mut st.b);
        st.tau += self.dt;
        let mut norm = 0.0_f64;
        for v in &st.a {
            norm = norm.max(v.norm_sqr());
        }
        norm = norm.sqrt();
        for v in &st.b {
            norm = norm.max(v.abs());
        }
        if !norm.is_finite() || norm > BLOWUP_LIMIT {
            return Err(Error::BlowUp { time: st.tau, norm });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// scalar solver
// ---------------------------------------------------------------------------

/// Schedule for the primary bifurcation parameter μ: fixed, or the linear ramp
/// μ(t) = μ₀ − rate·t (all four stage evaluations of a step use the
/// step-start value; the ramp rates of interest make the difference O(rate·dt)).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum MuSchedule {
    Fixed(f64),
    Ramp { mu0: f64, rate: f64 },
}

impl MuSchedule {
    pub fn mu_at(&self, t: f64) -> f64 {
        match *self {
            MuSchedule::Fixed(mu) => mu,
            MuSchedule::Ramp { mu0, rate } => mu0 - rate * t,
        }
    }
}

/// Scalar-field state.
#[derive(Debug, Clone)]
pub struct ScalarState {
    pub u: Vec<f64>,
    pub t: f64,
}

struct ScalarScratch {
    uh: Vec<Complex64>,
    nu: Vec<Complex64>,
    sa: Vec<Complex64>,
    na: Vec<Complex64>,
    sb: Vec<Complex64>,
    nb: Vec<Complex64>,
    sc: Vec<Complex64>,
    nc: Vec<Complex64>,
    tmp: Vec<Complex64>,
    ru: Vec<f64>,
    rnl: Vec<f64>,
    rderiv: Vec<Vec<f64>>,
}

/// Fixed-step ETDRK4 integrator for a general scalar model: linear symbol
/// G(k; ν) exponentiated exactly, reaction term (including μU, so parameter
/// ramps leave the exponential tables untouched) and quadratic spatial terms
/// stepped pseudo-spectrally with dealiasing.
pub struct ScalarSolver {
    pub grid: Grid1D,
    pub nu: f64,
    pub schedule: MuSchedule,
    pub dt: f64,
    reaction: CubicReaction,
    b_terms: Vec<(usize, usize, f64)>,
    deriv_orders: Vec<usize>,
    sym_pows: Vec<Vec<f64>>,
    ft: FieldTransform,
    tab: EtdrkTables,
    mask: Vec<f64>,
    s: ScalarScratch,
}

impl ScalarSolver {
    pub fn new(
        model: &GeneralScalarModel,
        nu: f64,
        schedule: MuSchedule,
        grid: &Grid1D,
        dt: f64,
    ) -> Result<Self> {
        model.validate()?;
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        if !model.well_posed(nu) {
            return Err(Error::NotAdmissible(format!(
                "leading spatial coefficient has the wrong sign at nu = {nu}"
            )));
        }
        let kk = grid.wavenumbers();
        let sym: Vec<f64> = kk.iter().map(|k| model.lin_symbol(*k, nu)).collect();
        let mut deriv_orders: Vec<usize> = model
            .b
            .iter()
            .flat_map(|t| [t.j, t.l])
            .filter(|&o| o > 0)
            .collect();
        deriv_orders.sort_unstable();
        deriv_orders.dedup();
        let sym_pows: Vec<Vec<f64>> = deriv_orders
            .iter()
            .map(|&o| kk.iter().map(|k| (-k * k).powi(o as i32)).collect())
            .collect();
        let z = || vec![Complex64::default(); grid.n];
        Ok(Self {
            grid: grid.clone(),
            nu,
            schedule,
            dt,
            reaction: model.reaction,
            b_terms: model.b.iter().map(|t| (t.j, t.l, t.coeff)).collect(),
            deriv_orders: deriv_orders.clone(),
            sym_pows,
            ft: FieldTransform::new(grid),
            tab: etdrk4_tables(&sym, dt),
            mask: grid.dealias_mask(),
            s: ScalarScratch {
                uh: z(),
                nu: z(),
                sa: z(),
                na: z(),
                sb: z(),
                nb: z(),
                sc: z(),
                nc: z(),
                tmp: z(),
                ru: vec![0.0; grid.n],
                rnl: vec![0.0; grid.n],
                rderiv: vec![vec![0.0; grid.n]; deriv_orders.len()],
            },
        })
    }

    fn nonlinear(
        ft: &mut FieldTransform,
        reaction: &CubicReaction,
        b_terms: &[(usize, usize, f64)],
        deriv_orders: &[usize],
        sym_pows: &[Vec<f64>],
        mask: &[f64],
        mu: f64,
        in_spec: &[Complex64],
        out_spec: &mut [Complex64],
        tmp: &mut [Complex64],
        ru: &mut [f64],
        rnl: &mut [f64],
        rderiv: &mut [Vec<f64>],
    ) {
        ft.spectral_to_real(in_spec, ru);
        for (d, pow) in rderiv.iter_mut().zip(sym_pows) {
            for k in 0..in_spec.len() {
                tmp[k] = in_spec[k] * pow[k];
            }
            ft.spectral_to_real(tmp, d);
        }
        let field = |order: usize, i: usize, ru: &[f64], rderiv: &[Vec<f64>]| -> f64 {
            if order == 0 {
                ru[i]
            } else {
                let idx = deriv_orders.iter().position(|&o| o == order).unwrap();
                rderiv[idx][i]
            }
        };
        for i in 0..ru.len() {
            let mut v = reaction.f(ru[i], mu);
            for &(j, l, c) in b_terms {
                v += c * field(j, i, ru, rderiv) * field(l, i, ru, rderiv);
            }
            rnl[i] = v;
        }
        ft.real_to_spectral(rnl, out_spec);
        for k in 0..mask.len() {
            out_spec[k] *= mask[k];
        }
    }

    /// One ETDRK4 step in place (μ frozen at the step-start time).
    pub fn step(&mut self, st: &mut ScalarState) -> Result<()> {
        let n = self.grid.n;
        if st.u.len() != n {
            return Err(Error::InvalidInput(format!(
                "state length {} does not match grid size {n}",
                st.u.len()
            )));
        }
        let mu = self.schedule.mu_at(st.t);
        let s = &mut self.s;
        let ft = &mut self.ft;
        let tab = &self.tab;
        ft.real_to_spectral(&st.u, &mut s.uh);
        macro_rules! nl {
            ($input:expr, $out:expr) => {
                Self::nonlinear(
                    ft,
                    &self.reaction,
                    &self.b_terms,
                    &self.deriv_orders,
                    &self.sym_pows,
                    &self.mask,
                    mu,
                    $input,
                    $out,
                    &mut s.tmp,
                    &mut s.ru,
                    &mut s.rnl,
                    &mut s.rderiv,
                )
            };
        }
        nl!(&s.uh, &mut s.nu);
        for k in 0..n {
            s.sa[k] = tab.e2[k] * s.uh[k] + tab.q[k] * s.nu[k];
        }
        nl!(&s.sa, &mut s.na);
        for k in 0..n {
            s.sb[k] = tab.e2[k] * s.uh[k] + tab.q[k] * s.na[k];
        }
        nl!(&s.sb, &mut s.nb);
        for k in 0..n {
            s.sc[k] = tab.e2[k] * s.sa[k] + tab.q[k] * (2.0 * s.nb[k] - s.nu[k]);
        }
        nl!(&s.sc, &mut s.nc);
        for k in 0..n {
            s.uh[k] = tab.e[k] * s.uh[k]
                + tab.f1[k] * s.nu[k]
                + 2.0 * tab.f2[k] * (s.na[k] + s.nb[k])
                + tab.f3[k] * s.nc[k];
        }
        ft.spectral_to_real(&s.uh, &mut st.u);
        st.t += self.dt;
        let mut norm = 0.0_f64;
        for v in &st.u {
            norm = norm.max(v.abs());
        }
        if !norm.is_finite() || norm > BLOWUP_LIMIT {
            return Err(Error::BlowUp { time: st.t, norm });
        }
        Ok(())
    }

    pub fn mu_at(&self, t: f64) -> f64 {
        self.schedule.mu_at(t)
    }
}

// ---------------------------------------------------------------------------
// run drivers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct SteadyOptions {
    /// Sup-norm change threshold for steadiness.
    pub tol: f64,
    /// Time between successive comparisons.
    pub check_interval: f64,
    /// Give up (TimedOut) beyond this run time.
    pub max_time: f64,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self { tol: 1e-9, check_interval: 1.0, max_time: 1e4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Steady { time: f64 },
    TimedOut { time: f64 },
}

/// Advance the amplitude system until ‖change over check_interval‖∞ < tol.
pub fn run_ab_to_steady(
    solver: &mut ABSolver,
    st: &mut ABState,
    opts: &SteadyOptions,
) -> Result<RunOutcome> {
    let stride = (opts.check_interval / solver.dt).round().max(1.0) as usize;
    let t0 = st.tau;
    let mut prev_a = st.a.clone();
    let mut prev_b = st.b.clone();
    loop {
        for _ in 0..stride {
            solver.step(st)?;
        }
        let mut diff = 0.0_f64;
        for (x, y) in st.a.iter().zip(&prev_a) {
            diff = diff.max((x - y).norm());
        }
        for (x, y) in st.b.iter().zip(&prev_b) {
            diff = diff.max((x - y).abs());
        }
        if diff < opts.tol {
            return Ok(RunOutcome::Steady { time: st.tau });
        }
        if st.tau - t0 >= opts.max_time {
            return Ok(RunOutcome::TimedOut { time: st.tau });
        }
        prev_a.copy_from_slice(&st.a);
        prev_b.copy_from_slice(&st.b);
    }
}

/// Advance a fixed-μ scalar run until ‖change over check_interval‖∞ < tol.
pub fn run_scalar_to_steady(
    solver: &mut ScalarSolver,
    st: &mut ScalarState,
    opts: &SteadyOptions,
) -> Result<RunOutcome> {
    if let MuSchedule::Ramp { .. } = solver.schedule {
        return Err(Error::InvalidInput(
            "steady-state detection requires a fixed parameter schedule".into(),
        ));
    }
    let stride = (opts.check_interval / solver.dt).round().max(1.0) as usize;
    let t0 = st.t;
    let mut prev = st.u.clone();
    loop {
        for _ in 0..stride {
            solver.step(st)?;
        }
        let mut diff = 0.0_f64;
        for (x, y) in st.u.iter().zip(&prev) {
            diff = diff.max((x - y).abs());
        }
        if diff < opts.tol {
            return Ok(RunOutcome::Steady { time: st.t });
        }
        if st.t - t0 >= opts.max_time {
            return Ok(RunOutcome::TimedOut { time: st.t });
        }
        prev.copy_from_slice(&st.u);
    }
}

// ---------------------------------------------------------------------------
// Ansatz reconstruction
// ---------------------------------------------------------------------------

/// Scalings connecting amplitude fields to the physical field.
#[derive(Debug, Clone, Copy)]
pub struct AnsatzFrame {
    /// Base state u*.
    pub u_star: f64,
    /// Carrier wavenumber k*.
    pub k_star: f64,
    /// Distance parameter δ (ξ = √δ·x, amplitudes scaled by δ).
    pub delta: f64,
}

/// Physical field from raw amplitude fields on the slow grid:
/// U(x) = u* + δ·(B(ξ) + 2 Re(A(ξ) e^{ik*x})) with ξ = √δ·x. Canonical fields
/// must be mapped through their scale maps first. Under periodic conditions
/// the modulated carrier must close up over the domain (plane-wave phase
/// winding included); a seam discontinuity is rejected.
pub fn reconstruct_u_ab(
    a: &[Complex64],
    b: &[f64],
    frame: &AnsatzFrame,
    grid_xi: &Grid1D,
) -> Result<Vec<f64>> {
    let n = grid_xi.n;
    if a.len() != n || b.len() != n {
        return Err(Error::InvalidInput(format!(
            "amplitude lengths ({}, {}) do not match grid size {n}",
            a.len(),
            b.len()
        )));
    }
    if !(frame.delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta must be positive, got {}", frame.delta)));
    }
    let sd = frame.delta.sqrt();
    let xi = grid_xi.points();
    let lx = grid_xi.l / sd;
    if grid_xi.bc == BoundaryCondition::Periodic {
        // the carrier e^{ik*x} must close up over the physical domain of
        // length L/√δ, i.e. wind an integer number of times
        let winds = frame.k_star * lx / (2.0 * PI);
        if (winds - winds.round()).abs() > 1e-8 * winds.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "carrier wavenumber {} is incommensurate with the periodic domain of length {lx:.6}",
                frame.k_star
            )));
        }
    }
    Ok((0..n)
        .map(|j| {
            let x = xi[j] / sd;
            let carrier = Complex64::from_polar(1.0, frame.k_star * x);
            frame.u_star + frame.delta * (b[j] + 2.0 * (a[j] * carrier).re)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// noise and norms
// ---------------------------------------------------------------------------

/// Band-limited Gaussian noise: unit-variance combination of the harmonics
/// mode_lo..=mode_hi (cosine and sine under periodic conditions, cosine only
/// under Neumann), normalized by the square root of the mode count.
pub fn band_limited_noise<R: Rng + ?Sized>(
    grid: &Grid1D,
    mode_lo: usize,
    mode_hi: usize,
    rng: &mut R,
) -> Vec<f64> {
    let pts = grid.points();
    let mut out = vec![0.0; grid.n];
    let mut count = 0usize;
    for m in mode_lo..=mode_hi {
        count += 1;
        match grid.bc {
            BoundaryCondition::Periodic => {
                let gc: f64 = rng.sample(StandardNormal);
                let gs: f64 = rng.sample(StandardNormal);
                for (o, &x) in out.iter_mut().zip(&pts) {
                    let th = 2.0 * PI * m as f64 * x / grid.l;
                    *o += gc * th.cos() + gs * th.sin();
                }
            }
            BoundaryCondition::Neumann => {
                let gc: f64 = rng.sample(StandardNormal);
                for (o, &x) in out.iter_mut().zip(&pts) {
                    *o += gc * (PI * m as f64 * x / grid.l).cos();
                }
            }
        }
    }
    let scale = 1.0 / (count.max(1) as f64).sqrt();
    for o in &mut out {
        *o *= scale;
    }
    out
}

/// Root-mean-square of a real field.
pub fn rms(field: &[f64]) -> f64 {
    (field.iter().map(|x| x * x).sum::<f64>() / field.len() as f64).sqrt()
}

/// Root-mean-square modulus of a complex field.
pub fn rms_complex(field: &[Complex64]) -> f64 {
    (field.iter().map(|x| x.norm_sqr()).sum::<f64>() / field.len() as f64).sqrt()
}
