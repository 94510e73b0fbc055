//! Model catalog: the sixth-order scalar example (with its extension), the
//! general 2m-th-order scalar family, and n-component reaction-diffusion
//! systems with polynomial reaction terms — together with reaction/dispersion
//! evaluation and derivative oracles.

use crate::fieldsolver::{even_derivative, Grid1D};
use crate::numerics::{fd_step, fd_step2};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Tolerance below which an eigenvalue pair counts as non-simple.
pub const SPECTRAL_GAP_TOL: f64 = 1e-8;
/// Residual tolerance for homogeneous-state roots.
pub const ROOT_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// scalar models
// ---------------------------------------------------------------------------

/// The sixth-order scalar model
/// `∂t U = μU + 2U² − U³ + ν ∂x²U + 2∂x⁴U + ∂x⁶U + η(∂x²U)² + γ U ∂x²U`;
/// `γ = 0` recovers the base example.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalarSixthOrder {
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
    pub eta: f64,
    #[serde(default)]
    pub gamma: f64,
}

fn default_nu() -> f64 {
    1.0
}

impl ScalarSixthOrder {
    pub fn new(mu: f64, nu: f64, eta: f64, gamma: f64) -> Self {
        Self { mu, nu, eta, gamma }
    }

    /// The equivalent member of the general 2m-order scalar family.
    pub fn as_general(&self) -> GeneralScalarModel {
        GeneralScalarModel {
            m: 3,
            a: vec![0.0, 2.0, 1.0],
            a_tilde: vec![-1.0, 0.0, 0.0],
            b: vec![
                BTerm { j: 0, l: 1, coeff: self.gamma },
                BTerm { j: 1, l: 1, coeff: self.eta },
            ],
            reaction: CubicReaction::example(),
        }
    }
}

/// Cubic reaction `F(u; μ) = Σ_{i=0..3} (p_i + q_i μ) u^i`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CubicReaction {
    pub p: [f64; 4],
    pub q: [f64; 4],
}

impl CubicReaction {
    /// The example reaction `μu + 2u² − u³`.
    pub fn example() -> Self {
        Self { p: [0.0, 0.0, 2.0, -1.0], q: [0.0, 1.0, 0.0, 0.0] }
    }

    fn coeff(&self, i: usize, mu: f64) -> f64 {
        self.p[i] + self.q[i] * mu
    }

    pub fn f(&self, u: f64, mu: f64) -> f64 {
        (0..4).rev().fold(0.0, |acc, i| acc * u + self.coeff(i, mu))
    }

    pub fn f_u(&self, u: f64, mu: f64) -> f64 {
        self.coeff(1, mu) + 2.0 * self.coeff(2, mu) * u + 3.0 * self.coeff(3, mu) * u * u
    }

    pub fn f_uu(&self, u: f64, mu: f64) -> f64 {
        2.0 * self.coeff(2, mu) + 6.0 * self.coeff(3, mu) * u
    }

    pub fn f_uuu(&self, _u: f64, mu: f64) -> f64 {
        6.0 * self.coeff(3, mu)
    }

    pub fn f_mu(&self, u: f64) -> f64 {
        (0..4).rev().fold(0.0, |acc, i| acc * u + self.q[i])
    }

    pub fn f_umu(&self, u: f64) -> f64 {
        self.q[1] + 2.0 * self.q[2] * u + 3.0 * self.q[3] * u * u
    }

    /// All real roots of `F(·; μ) = 0`, ascending, with multiplicity.
    pub fn real_roots(&self, mu: f64) -> Vec<f64> {
        let c: Vec<f64> = (0..4).map(|i| self.coeff(i, mu)).collect();
        let scale = c.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(1.0);
        let mut roots: Vec<f64> = if c[3].abs() > 1e-14 * scale {
            let inv = 1.0 / c[3];
            crate::numerics::cubic_roots(
                Complex64::new(c[2] * inv, 0.0),
                Complex64::new(c[1] * inv, 0.0),
                Complex64::new(c[0] * inv, 0.0),
            )
            .iter()
            .filter(|z| z.im.abs() < 1e-7 * (1.0 + z.norm()))
            .map(|z| z.re)
            .collect()
        } else if c[2].abs() > 1e-14 * scale {
            let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
            if disc < 0.0 {
                vec![]
            } else {
                let s = disc.sqrt();
                vec![(-c[1] - s) / (2.0 * c[2]), (-c[1] + s) / (2.0 * c[2])]
            }
        } else if c[1].abs() > 1e-14 * scale {
            vec![-c[0] / c[1]]
        } else {
            vec![]
        };
        // polish and sort
        for r in &mut roots {
            for _ in 0..3 {
                let d = self.f_u(*r, mu);
                if d.abs() > 1e-10 {
                    *r -= self.f(*r, mu) / d;
                }
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots
    }
}

/// One quadratic spatial term `coeff · ∂x^{2j}U · ∂x^{2l}U` with `0 ≤ j ≤ l`
/// (`j = 0` gives the wider class with terms multiplying `U` itself).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BTerm {
    pub j: usize,
    pub l: usize,
    pub coeff: f64,
}

/// General scalar 2m-th-order model
/// `∂t U = F(U; μ) + Σ_{j=1..m}(a_j − ν ã_j)∂x^{2j}U + Σ_{j≤l} b_{jl} ∂x^{2j}U ∂x^{2l}U`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralScalarModel {
    pub m: usize,
    pub a: Vec<f64>,
    pub a_tilde: Vec<f64>,
    #[serde(default)]
    pub b: Vec<BTerm>,
    pub reaction: CubicReaction,
}

impl GeneralScalarModel {
    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::NotAdmissible(format!(
                "scalar model order 2m = {} below the sixth-order minimum",
                2 * self.m
            )));
        }
        if self.a.len() != self.m || self.a_tilde.len() != self.m {
            return Err(Error::InvalidInput(format!(
                "coefficient arrays must have length m = {}",
                self.m
            )));
        }
        for t in &self.b {
            if t.j > t.l || t.l == 0 {
                return Err(Error::InvalidInput(format!(
                    "quadratic term ({}, {}) must satisfy j <= l, l >= 1",
                    t.j, t.l
                )));
            }
        }
        Ok(())
    }

    /// Well-posedness sign condition on the leading coefficient `a_m − ν ã_m`:
    /// positive for odd m, negative for even m.
    pub fn well_posed(&self, nu: f64) -> bool {
        let lead = self.a[self.m - 1] - nu * self.a_tilde[self.m - 1];
        if self.m % 2 == 1 {
            lead > 0.0
        } else {
            lead < 0.0
        }
    }

    /// Linear spatial symbol `G(k; ν) = Σ_j (a_j − ν ã_j)(−k²)^j`.
    pub fn lin_symbol(&self, k: f64, nu: f64) -> f64 {
        let mk2 = -k * k;
        let mut pow = 1.0;
        let mut acc = 0.0;
        for j in 0..self.m {
            pow *= mk2;
            acc += (self.a[j] - nu * self.a_tilde[j]) * pow;
        }
        acc
    }

    /// ∂G/∂ν = −Σ_j ã_j (−k²)^j.
    pub fn lin_symbol_nu(&self, k: f64) -> f64 {
        let mk2 = -k * k;
        let mut pow = 1.0;
        let mut acc = 0.0;
        for j in 0..self.m {
            pow *= mk2;
            acc -= self.a_tilde[j] * pow;
        }
        acc
    }

    /// ∂G/∂k.
    pub fn lin_symbol_k(&self, k: f64, nu: f64) -> f64 {
        let mk2 = -k * k;
        let mut acc = 0.0;
        for j in 1..=self.m {
            let c = self.a[j - 1] - nu * self.a_tilde[j - 1];
            acc += c * (-2.0 * j as f64 * k) * mk2.powi(j as i32 - 1);
        }
        acc
    }

    /// ∂²G/∂k².
    pub fn lin_symbol_kk(&self, k: f64, nu: f64) -> f64 {
        let mk2 = -k * k;
        let mut acc = 0.0;
        for j in 1..=self.m {
            let c = self.a[j - 1] - nu * self.a_tilde[j - 1];
            let jf = j as f64;
            let mut term = -2.0 * jf * mk2.powi(j as i32 - 1);
            if j >= 2 {
                term += 4.0 * jf * (jf - 1.0) * k * k * mk2.powi(j as i32 - 2);
            }
            acc += c * term;
        }
        acc
    }

    /// ∂²G/∂k∂ν.
    pub fn lin_symbol_knu(&self, k: f64) -> f64 {
        let mk2 = -k * k;
        let mut acc = 0.0;
        for j in 1..=self.m {
            acc -= self.a_tilde[j - 1] * (-2.0 * j as f64 * k) * mk2.powi(j as i32 - 1);
        }
        acc
    }

    /// `G_u(k) = Σ_l b_{0l} (−k²)^l`: the u-proportional part of the linear
    /// symbol contributed by j = 0 quadratic terms.
    pub fn gu_symbol(&self, k: f64) -> f64 {
        let mk2 = -k * k;
        self.b
            .iter()
            .filter(|t| t.j == 0)
            .map(|t| t.coeff * mk2.powi(t.l as i32))
            .sum()
    }

    /// ∂G_u/∂k.
    pub fn gu_symbol_k(&self, k: f64) -> f64 {
        let mk2 = -k * k;
        self.b
            .iter()
            .filter(|t| t.j == 0)
            .map(|t| t.coeff * (-2.0 * t.l as f64 * k) * mk2.powi(t.l as i32 - 1))
            .sum()
    }

    /// ∂²G_u/∂k².
    pub fn gu_symbol_kk(&self, k: f64) -> f64 {
        let mk2 = -k * k;
        self.b
            .iter()
            .filter(|t| t.j == 0)
            .map(|t| {
                let lf = t.l as f64;
                let mut term = -2.0 * lf * mk2.powi(t.l as i32 - 1);
                if t.l >= 2 {
                    term += 4.0 * lf * (lf - 1.0) * k * k * mk2.powi(t.l as i32 - 2);
                }
                t.coeff * term
            })
            .sum()
    }

    /// Symmetrized quadratic interaction symbol
    /// `S(k₁,k₂) = Σ_{j≤l} b_{jl} [(−k₁²)^j(−k₂²)^l + (−k₂²)^j(−k₁²)^l]`:
    /// the coefficient produced by the quadratic spatial terms on a product of
    /// modes with wavenumbers k₁ and k₂ (for equal modes the coefficient is
    /// `S(k,k)/2`).
    pub fn s_quad(&self, k1: f64, k2: f64) -> f64 {
        let m1 = -k1 * k1;
        let m2 = -k2 * k2;
        self.b
            .iter()
            .map(|t| {
                t.coeff
                    * (m1.powi(t.j as i32) * m2.powi(t.l as i32)
                        + m2.powi(t.j as i32) * m1.powi(t.l as i32))
            })
            .sum()
    }

    /// Scalar dispersion relation about the homogeneous state u:
    /// `ω(k) = F_u(u; μ) + G(k; ν) + u·G_u(k)`.
    pub fn omega(&self, u: f64, k: f64, mu: f64, nu: f64) -> f64 {
        self.reaction.f_u(u, mu) + self.lin_symbol(k, nu) + u * self.gu_symbol(k)
    }

    pub fn omega_k(&self, u: f64, k: f64, nu: f64) -> f64 {
        self.lin_symbol_k(k, nu) + u * self.gu_symbol_k(k)
    }

    pub fn omega_kk(&self, u: f64, k: f64, nu: f64) -> f64 {
        self.lin_symbol_kk(k, nu) + u * self.gu_symbol_kk(k)
    }
}

// ---------------------------------------------------------------------------
// reaction-diffusion models
// ---------------------------------------------------------------------------

/// Polynomial reaction term for an n-component reaction-diffusion system:
/// `F_i(u; μ, ν) = f0_i + (A u)_i + μ(g0 + G u)_i + ν(h0 + H u)_i
///  + uᵀ S_i u + c_i u_i³ + μ² qa_i + μν qb_i + ν² qc_i`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialReaction {
    #[serde(rename = "type")]
    pub kind: String,
    pub f0: Vec<f64>,
    pub linear: Vec<Vec<f64>>,
    pub mu_const: Vec<f64>,
    pub mu_linear: Vec<Vec<f64>>,
    pub nu_const: Vec<f64>,
    pub nu_linear: Vec<Vec<f64>>,
    pub quadratic: Vec<Vec<Vec<f64>>>,
    pub cubic_diag: Vec<f64>,
    #[serde(default)]
    pub mu2: Vec<f64>,
    #[serde(default)]
    pub munu: Vec<f64>,
    #[serde(default)]
    pub nu2: Vec<f64>,
}

/// n-component reaction-diffusion system `∂t U = D ∂x²U + F(U; μ, ν)` with
/// strictly positive diagonal diffusion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RDModel {
    pub n: usize,
    pub diffusion: Vec<f64>,
    pub reaction: PolynomialReaction,
    /// Newton seeds for the homogeneous-state search.
    #[serde(default)]
    pub seeds: Vec<Vec<f64>>,
}

impl RDModel {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::NotAdmissible(format!(
                "reaction-diffusion component count n = {} below the supported minimum 3",
                self.n
            )));
        }
        if self.diffusion.len() != self.n || !self.diffusion.iter().all(|d| *d > 0.0) {
            return Err(Error::InvalidInput(
                "diffusion must be a strictly positive vector of length n".into(),
            ));
        }
        let r = &self.reaction;
        if r.kind != "polynomial" {
            return Err(Error::InvalidInput(format!("unknown reaction type '{}'", r.kind)));
        }
        let n = self.n;
        let vec_ok = |v: &Vec<f64>| v.is_empty() || v.len() == n;
        let mat_ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|row| row.len() == n);
        if r.f0.len() != n
            || !mat_ok(&r.linear)
            || r.mu_const.len() != n
            || !mat_ok(&r.mu_linear)
            || r.nu_const.len() != n
            || !mat_ok(&r.nu_linear)
            || r.quadratic.len() != n
            || !r.quadratic.iter().all(mat_ok)
            || r.cubic_diag.len() != n
            || !vec_ok(&r.mu2)
            || !vec_ok(&r.munu)
            || !vec_ok(&r.nu2)
        {
            return Err(Error::InvalidInput("reaction tensor dimensions inconsistent with n".into()));
        }
        Ok(())
    }

    fn quad_mat(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.reaction.quadratic[i][r][c])
    }

    fn mat(&self, src: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| src[r][c])
    }

    fn opt(&self, v: &[f64], i: usize) -> f64 {
        if v.is_empty() {
            0.0
        } else {
            v[i]
        }
    }

    /// Reaction value F(u; μ, ν).
    pub fn f(&self, u: &DVector<f64>, mu: f64, nu: f64) -> DVector<f64> {
        let r = &self.reaction;
        let mut out = DVector::zeros(self.n);
        let lin = self.mat(&r.linear) + self.mat(&r.mu_linear) * mu + self.mat(&r.nu_linear) * nu;
        let lu = lin * u;
        for i in 0..self.n {
            let s = self.quad_mat(i);
            out[i] = r.f0[i]
                + lu[i]
                + mu * r.mu_const[i]
                + nu * r.nu_const[i]
                + (u.transpose() * &s * u)[(0, 0)]
                + r.cubic_diag[i] * u[i].powi(3)
                + mu * mu * self.opt(&r.mu2, i)
                + mu * nu * self.opt(&r.munu, i)
                + nu * nu * self.opt(&r.nu2, i);
        }
        out
    }

    /// Jacobian F_u(u; μ, ν).
    pub fn f_u(&self, u: &DVector<f64>, mu: f64, nu: f64) -> DMatrix<f64> {
        let r = &self.reaction;
        let mut jac =
            self.mat(&r.linear) + self.mat(&r.mu_linear) * mu + self.mat(&r.nu_linear) * nu;
        for i in 0..self.n {
            let s = self.quad_mat(i);
            let grad = (&s + s.transpose()) * u;
            for j in 0..self.n {
                jac[(i, j)] += grad[j];
            }
            jac[(i, i)] += 3.0 * r.cubic_diag[i] * u[i] * u[i];
        }
        jac
    }

    /// Bilinear Hessian action F_uu(u)(v, w).
    pub fn f_uu(&self, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let r = &self.reaction;
        let mut out = DVector::zeros(self.n);
        for i in 0..self.n {
            let s = self.quad_mat(i);
            out[i] = (v.transpose() * (&s + s.transpose()) * w)[(0, 0)]
                + 6.0 * r.cubic_diag[i] * u[i] * v[i] * w[i];
        }
        out
    }

    /// Trilinear third derivative action F_uuu(v, w, z) (u-independent for
    /// polynomial reactions of degree three).
    pub fn f_uuu(&self, v: &DVector<f64>, w: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let r = &self.reaction;
        DVector::from_fn(self.n, |i, _| 6.0 * r.cubic_diag[i] * v[i] * w[i] * z[i])
    }

    pub fn f_mu(&self, u: &DVector<f64>, mu: f64, nu: f64) -> DVector<f64> {
        let r = &self.reaction;
        let gu = self.mat(&r.mu_linear) * u;
        DVector::from_fn(self.n, |i, _| {
            r.mu_const[i] + gu[i] + 2.0 * mu * self.opt(&r.mu2, i) + nu * self.opt(&r.munu, i)
        })
    }

    pub fn f_nu(&self, u: &DVector<f64>, mu: f64, nu: f64) -> DVector<f64> {
        let r = &self.reaction;
        let hu = self.mat(&r.nu_linear) * u;
        DVector::from_fn(self.n, |i, _| {
            r.nu_const[i] + hu[i] + mu * self.opt(&r.munu, i) + 2.0 * nu * self.opt(&r.nu2, i)
        })
    }

    pub fn f_umu(&self) -> DMatrix<f64> {
        self.mat(&self.reaction.mu_linear)
    }

    pub fn f_unu(&self) -> DMatrix<f64> {
        self.mat(&self.reaction.nu_linear)
    }

    /// Diffusion as a diagonal matrix.
    pub fn d_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.diffusion.clone()))
    }

    /// Linearization matrix T(k) = F_u − k² D.
    pub fn t_matrix(&self, u: &DVector<f64>, k: f64, mu: f64, nu: f64) -> DMatrix<f64> {
        let mut t = self.f_u(u, mu, nu);
        for i in 0..self.n {
            t[(i, i)] -= k * k * self.diffusion[i];
        }
        t
    }
}

// ---------------------------------------------------------------------------
// the unified model type
// ---------------------------------------------------------------------------

/// Any supported model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ModelSpec {
    #[serde(rename = "scalar6")]
    Scalar6(ScalarSixthOrder),
    #[serde(rename = "scalar_general")]
    ScalarGeneral(GeneralScalarModel),
    #[serde(rename = "rd")]
    Rd(RDModel),
}

impl ModelSpec {
    /// Load a model from its JSON description.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Scalar6(_) => Ok(()),
            ModelSpec::ScalarGeneral(g) => g.validate(),
            ModelSpec::Rd(rd) => rd.validate(),
        }
    }

    /// Number of field components (1 for scalar models).
    pub fn components(&self) -> usize {
        match self {
            ModelSpec::Rd(rd) => rd.n,
            _ => 1,
        }
    }

    /// The scalar view (the sixth-order model is converted to its general
    /// form); errors for reaction-diffusion models.
    pub fn as_scalar(&self) -> Result<GeneralScalarModel> {
        match self {
            ModelSpec::Scalar6(s) => Ok(s.as_general()),
            ModelSpec::ScalarGeneral(g) => Ok(g.clone()),
            ModelSpec::Rd(_) => Err(Error::InvalidInput(
                "operation requires a scalar model, got a reaction-diffusion model".into(),
            )),
        }
    }
}

/// A homogeneous steady state with its ODE stability flag (`ode_stable` marks
/// the attracting branch, u⁺ for the scalar family).
#[derive(Debug, Clone, Serialize)]
pub struct HomogeneousState {
    pub u: Vec<f64>,
    pub ode_stable: bool,
}

/// Right-hand side evaluation on a grid (component-major layout for
/// multi-component models).
pub fn eval_rhs(model: &ModelSpec, field: &[f64], grid: &Grid1D, mu: f64, nu: f64) -> Result<Vec<f64>> {
    let n_comp = model.components();
    if field.len() != n_comp * grid.n {
        return Err(Error::InvalidInput(format!(
            "field length {} does not match {} component(s) on {} grid points",
            field.len(),
            n_comp,
            grid.n
        )));
    }
    let out = match model {
        ModelSpec::Scalar6(_) | ModelSpec::ScalarGeneral(_) => {
            let g = model.as_scalar()?;
            // spatial derivatives ∂x^{2j}U for every order appearing in the model
            let max_order = g.m.max(g.b.iter().map(|t| t.l).max().unwrap_or(0));
            let mut derivs: Vec<Vec<f64>> = Vec::with_capacity(max_order + 1);
            derivs.push(field.to_vec());
            for j in 1..=max_order {
                derivs.push(even_derivative(field, grid, j)?);
            }
            let mut rhs = vec![0.0; grid.n];
            for i in 0..grid.n {
                let mut acc = g.reaction.f(field[i], mu);
                for j in 1..=g.m {
                    acc += (g.a[j - 1] - nu * g.a_tilde[j - 1]) * derivs[j][i];
                }
                for t in &g.b {
                    acc += t.coeff * derivs[t.j][i] * derivs[t.l][i];
                }
                rhs[i] = acc;
            }
            rhs
        }
        ModelSpec::Rd(rd) => {
            let n = rd.n;
            let mut rhs = vec![0.0; n * grid.n];
            let mut lap = Vec::with_capacity(n);
            for c in 0..n {
                lap.push(even_derivative(&field[c * grid.n..(c + 1) * grid.n], grid, 1)?);
            }
            let mut u = DVector::zeros(n);
            for i in 0..grid.n {
                for c in 0..n {
                    u[c] = field[c * grid.n + i];
                }
                let fv = rd.f(&u, mu, nu);
                for c in 0..n {
                    rhs[c * grid.n + i] = fv[c] + rd.diffusion[c] * lap[c][i];
                }
            }
            rhs
        }
    };
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("reaction term produced a non-finite value".into()));
    }
    Ok(out)
}

/// All homogeneous steady states at (μ, ν); scalar roots come from the closed
/// cubic solve, reaction-diffusion roots from deflated damped Newton over the
/// model's seed list.
pub fn homogeneous_states(model: &ModelSpec, mu: f64, nu: f64) -> Result<Vec<HomogeneousState>> {
    match model {
        ModelSpec::Scalar6(_) | ModelSpec::ScalarGeneral(_) => {
            let g = model.as_scalar()?;
            let roots = g.reaction.real_roots(mu);
            Ok(roots
                .iter()
                .map(|&u| HomogeneousState {
                    u: vec![u],
                    ode_stable: g.reaction.f_u(u, mu) <= 1e-10,
                })
                .collect())
        }
        ModelSpec::Rd(rd) => {
            let mut states: Vec<DVector<f64>> = Vec::new();
            let mut seeds: Vec<DVector<f64>> =
                rd.seeds.iter().map(|s| DVector::from_vec(s.clone())).collect();
            seeds.push(DVector::zeros(rd.n));
            for seed in &seeds {
                // deflated damped Newton: multiply the residual by
                // Π_j (1 + 1/‖u − u_j‖²) over the roots found so far
                let found = states.clone();
                let deflate = |u: &DVector<f64>| -> f64 {
                    found.iter().map(|r| 1.0 + 1.0 / (u - r).norm_squared().max(1e-30)).product()
                };
                let f = |u: &DVector<f64>| rd.f(u, mu, nu) * deflate(u);
                let res = crate::numerics::newton_damped(
                    f,
                    |u| crate::numerics::fd_jacobian(f, u),
                    seed,
                    1e-10,
                    100,
                    "homogeneous state",
                );
                if let Ok(u) = res {
                    // polish on the raw system
                    if let Ok(u) = crate::numerics::newton_damped(
                        |u| rd.f(u, mu, nu),
                        |u| rd.f_u(u, mu, nu),
                        &u,
                        ROOT_TOL,
                        50,
                        "homogeneous state polish",
                    ) {
                        if states.iter().all(|s| (s - &u).norm() > 1e-8) {
                            states.push(u);
                        }
                    }
                }
            }
            if states.is_empty() {
                return Err(Error::NoConvergence {
                    context: "homogeneous state search: no root from any seed".into(),
                    iterations: 100,
                    residual: f64::NAN,
                });
            }
            states.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
            Ok(states
                .into_iter()
                .map(|u| {
                    let eigs = rd.f_u(&u, mu, nu).complex_eigenvalues();
                    let stable = eigs.iter().all(|l| l.re <= 1e-10);
                    HomogeneousState { u: u.iter().cloned().collect(), ode_stable: stable }
                })
                .collect())
        }
    }
}

/// Growth rates of wavenumber-k perturbations about a homogeneous state,
/// sorted by descending real part.
#[derive(Debug, Clone)]
pub struct DispersionSample {
    pub k: f64,
    pub omega: Vec<Complex64>,
}

pub fn dispersion(
    model: &ModelSpec,
    u: &[f64],
    k: f64,
    mu: f64,
    nu: f64,
) -> Result<DispersionSample> {
    let omega = match model {
        ModelSpec::Scalar6(_) | ModelSpec::ScalarGeneral(_) => {
            let g = model.as_scalar()?;
            vec![Complex64::new(g.omega(u[0], k, mu, nu), 0.0)]
        }
        ModelSpec::Rd(rd) => {
            let uv = DVector::from_vec(u.to_vec());
            let t = rd.t_matrix(&uv, k, mu, nu);
            let mut eigs: Vec<Complex64> = t.complex_eigenvalues().iter().cloned().collect();
            eigs.sort_by(|a, b| {
                b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap())
            });
            eigs
        }
    };
    Ok(DispersionSample { k, omega })
}

/// Scalar partial derivatives of the leading dispersion branch.
#[derive(Debug, Clone, Copy, Default)]
pub struct DispersionDerivs {
    pub omega: f64,
    pub omega_k: f64,
    pub omega_kk: f64,
    pub omega_mu: f64,
    pub omega_nu: f64,
    /// ω_kk evaluated at k = 0 (same state and parameters).
    pub rho_kk: f64,
}

/// Partial derivatives of the leading branch ω¹(k; u, μ, ν). Scalar models use
/// the analytic symbol derivatives; reaction-diffusion models use central
/// finite differences of the tracked leading eigenvalue and require a simple
/// leading eigenvalue (spectral gap above tolerance) that is real.
pub fn dispersion_derivatives(
    model: &ModelSpec,
    u: &[f64],
    k: f64,
    mu: f64,
    nu: f64,
) -> Result<DispersionDerivs> {
    match model {
        ModelSpec::Scalar6(_) | ModelSpec::ScalarGeneral(_) => {
            let g = model.as_scalar()?;
            Ok(DispersionDerivs {
                omega: g.omega(u[0], k, mu, nu),
                omega_k: g.omega_k(u[0], k, nu),
                omega_kk: g.omega_kk(u[0], k, nu),
                omega_mu: g.reaction.f_umu(u[0]),
                omega_nu: g.lin_symbol_nu(k),
                rho_kk: g.omega_kk(u[0], 0.0, nu),
            })
        }
        ModelSpec::Rd(rd) => {
            let uv = DVector::from_vec(u.to_vec());
            let lead = |k: f64, mu: f64, nu: f64| -> Result<f64> {
                let t = rd.t_matrix(&uv, k, mu, nu);
                let mut eigs: Vec<Complex64> = t.complex_eigenvalues().iter().cloned().collect();
                eigs.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
                let gap = eigs[0].re - eigs[1].re;
                if gap.abs() < SPECTRAL_GAP_TOL {
                    return Err(Error::NotAdmissible(format!(
                        "leading eigenvalue not simple: spectral gap {gap:.3e} at k = {k}"
                    )));
                }
                if eigs[0].im.abs() > SPECTRAL_GAP_TOL {
                    return Err(Error::NotAdmissible(format!(
                        "leading eigenvalue complex (Im = {:.3e}) at k = {k}",
                        eigs[0].im
                    )));
                }
                Ok(eigs[0].re)
            };
            let hk = fd_step(k);
            let hm = fd_step(mu);
            let hn = fd_step(nu);
            let f0 = lead(k, mu, nu)?;
            let fkp = lead(k + hk, mu, nu)?;
            let fkm = lead(k - hk, mu, nu)?;
            let h0 = fd_step(0.0).sqrt() * 1e-1;
            let rho = (lead(h0, mu, nu)? - 2.0 * lead(0.0, mu, nu)? + lead(-h0, mu, nu)?) / (h0 * h0);
            Ok(DispersionDerivs {
                omega: f0,
                omega_k: (fkp - fkm) / (2.0 * hk),
                omega_kk: (fkp - 2.0 * f0 + fkm) / (hk * hk),
                omega_mu: (lead(k, mu + hm, nu)? - lead(k, mu - hm, nu)?) / (2.0 * hm),
                omega_nu: (lead(k, mu, nu + hn)? - lead(k, mu, nu - hn)?) / (2.0 * hn),
                rho_kk: rho,
            })
        }
    }
}

/// Characteristic-polynomial partial derivatives for reaction-diffusion
/// models: P(λ; u, μ, ν, k) = det(F_u − k²D − λI), computed by central finite
/// differences (validated against analytic adjugate-trace values in tests).
#[derive(Debug, Clone)]
pub struct CharPolyPartials {
    pub p: f64,
    pub p_lambda: f64,
    pub p_mu: f64,
    pub p_nu: f64,
    pub p_k: f64,
    pub p_kk: f64,
    pub p_kmu: f64,
    pub p_knu: f64,
    pub p_u: DVector<f64>,
    pub p_ku: DVector<f64>,
}

pub fn char_poly_partials(
    rd: &RDModel,
    u: &DVector<f64>,
    k: f64,
    mu: f64,
    nu: f64,
    lambda: f64,
) -> CharPolyPartials {
    let p = |u: &DVector<f64>, k: f64, mu: f64, nu: f64| -> f64 {
        let mut t = rd.t_matrix(u, k, mu, nu);
        for i in 0..rd.n {
            t[(i, i)] -= lambda;
        }
        t.determinant()
    };
    let pl = |u: &DVector<f64>, k: f64, mu: f64, nu: f64, lam: f64| -> f64 {
        let mut t = rd.t_matrix(u, k, mu, nu);
        for i in 0..rd.n {
            t[(i, i)] -= lam;
        }
        t.determinant()
    };
    let hk = fd_step(k);
    let hm = fd_step(mu);
    let hn = fd_step(nu);
    let hl = fd_step(lambda);
    // second-order differences take wider steps: the 1/h² rounding
    // amplification at first-derivative steps would swamp the result
    let hk2 = fd_step2(k);
    let hm2 = fd_step2(mu);
    let hn2 = fd_step2(nu);
    let p0 = p(u, k, mu, nu);
    let mut p_u = DVector::zeros(rd.n);
    let mut p_ku = DVector::zeros(rd.n);
    for i in 0..rd.n {
        let h = fd_step(u[i]);
        let h2 = fd_step2(u[i]);
        let mut up = u.clone();
        let mut um = u.clone();
        up[i] += h;
        um[i] -= h;
        p_u[i] = (p(&up, k, mu, nu) - p(&um, k, mu, nu)) / (2.0 * h);
        up[i] = u[i] + h2;
        um[i] = u[i] - h2;
        p_ku[i] = (p(&up, k + hk2, mu, nu) - p(&up, k - hk2, mu, nu) - p(&um, k + hk2, mu, nu)
            + p(&um, k - hk2, mu, nu))
            / (4.0 * h2 * hk2);
    }
    CharPolyPartials {
        p: p0,
        p_lambda: (pl(u, k, mu, nu, lambda + hl) - pl(u, k, mu, nu, lambda - hl)) / (2.0 * hl),
        p_mu: (p(u, k, mu + hm, nu) - p(u, k, mu - hm, nu)) / (2.0 * hm),
        p_nu: (p(u, k, mu, nu + hn) - p(u, k, mu, nu - hn)) / (2.0 * hn),
        p_k: (p(u, k + hk, mu, nu) - p(u, k - hk, mu, nu)) / (2.0 * hk),
        p_kk: (p(u, k + hk2, mu, nu) - 2.0 * p0 + p(u, k - hk2, mu, nu)) / (hk2 * hk2),
        p_kmu: (p(u, k + hk2, mu + hm2, nu) - p(u, k - hk2, mu + hm2, nu)
            - p(u, k + hk2, mu - hm2, nu)
            + p(u, k - hk2, mu - hm2, nu))
            / (4.0 * hk2 * hm2),
        p_knu: (p(u, k + hk2, mu, nu + hn2) - p(u, k - hk2, mu, nu + hn2)
            - p(u, k + hk2, mu, nu - hn2)
            + p(u, k - hk2, mu, nu - hn2))
            / (4.0 * hk2 * hn2),
        p_u,
        p_ku,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldsolver::{BoundaryCondition, Grid1D};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn example(mu: f64, nu: f64, eta: f64) -> ModelSpec {
        ModelSpec::Scalar6(ScalarSixthOrder::new(mu, nu, eta, 0.0))
    }

    fn models_dir() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
    }

    #[test]
    fn rhs_homogeneous_states_vanish() {
        let grid = Grid1D::new(4.0 * std::f64::consts::PI, 32, BoundaryCondition::Periodic).unwrap();
        // u = 0 at mu = -1 and u = 2 at mu = 0 are homogeneous states
        for (mu, u0) in [(-1.0, 0.0), (0.0, 2.0)] {
            let model = example(mu, 1.0, 3.0);
            let field = vec![u0; grid.n];
            let rhs = eval_rhs(&model, &field, &grid, mu, 1.0).unwrap();
            for v in rhs {
                assert!(v.abs() < 1e-12, "rhs {v} not zero for constant state {u0}");
            }
        }
        // constant c: rhs = mu c + 2c^2 - c^3
        let model = example(-0.5, 1.0, 5.0);
        let c = 1.3_f64;
        let rhs = eval_rhs(&model, &vec![c; grid.n], &grid, -0.5, 1.0).unwrap();
        let expect = -0.5 * c + 2.0 * c * c - c * c * c;
        for v in rhs {
            assert_relative_eq!(v, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn homogeneous_states_example_model() {
        let model = example(0.0, 1.0, 2.0);
        let states = homogeneous_states(&model, 0.0, 1.0).unwrap();
        let us: Vec<f64> = states.iter().map(|s| s.u[0]).collect();
        assert_eq!(us.len(), 3);
        assert_relative_eq!(us[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(us[1], 0.0, epsilon = 1e-9);
        assert_relative_eq!(us[2], 2.0, epsilon = 1e-12);
        assert!(states[2].ode_stable, "u+ = 2 must be flagged stable");

        let states = homogeneous_states(&model, -1.0, 1.0).unwrap();
        let us: Vec<f64> = states.iter().map(|s| s.u[0]).collect();
        assert_relative_eq!(us[1], 1.0, epsilon = 1e-6);
        assert_relative_eq!(us[2], 1.0, epsilon = 1e-6);

        let states = homogeneous_states(&model, 3.0, 1.0).unwrap();
        let us: Vec<f64> = states.iter().map(|s| s.u[0]).collect();
        assert_eq!(us.len(), 3);
        assert_relative_eq!(us[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(us[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(us[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn dispersion_example_values() {
        let model = example(-1.0, 1.0, 2.0);
        // at the co-dimension-2 point, k = 1 is neutral
        let s = dispersion(&model, &[1.0], 1.0, -1.0, 1.0).unwrap();
        assert!(s.omega[0].re.abs() < 1e-14);
        // k = 2: G(2; 1) = -4 + 32 - 64 = -36
        let s = dispersion(&model, &[1.0], 2.0, -1.0, 1.0).unwrap();
        assert_relative_eq!(s.omega[0].re, -36.0, max_relative = 1e-14);
        // k = 0 on the upper branch: F_u(u+; mu) = -2(1 + mu + sqrt(1+mu))
        for mu in [0.0_f64, -0.3, -0.9] {
            let up = 1.0 + (1.0 + mu).sqrt();
            let s = dispersion(&model, &[up], 0.0, mu, 1.0).unwrap();
            assert_relative_eq!(
                s.omega[0].re,
                -2.0 * (1.0 + mu + (1.0 + mu).sqrt()),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn dispersion_derivative_example_values() {
        let model = example(-1.0, 1.0, 2.0);
        let d = dispersion_derivatives(&model, &[1.0], 1.0, -1.0, 1.0).unwrap();
        assert_relative_eq!(d.omega_kk, -8.0, max_relative = 1e-13);
        assert_relative_eq!(d.rho_kk, -2.0, max_relative = 1e-13);
        assert!(d.omega_k.abs() < 1e-13);
    }

    #[test]
    fn extended_model_symbols() {
        let gamma = -0.4;
        let eta = 1.3;
        let g = ScalarSixthOrder::new(-1.0, 1.0 - gamma, eta, gamma).as_general();
        // dispersion at u: -(nu + gamma u)k^2 + 2k^4 - k^6 + F_u
        let (u, k, mu, nu) = (0.8, 1.2, -0.9, 1.0 - gamma);
        let expect = (mu + 4.0 * u - 3.0 * u * u) - (nu + gamma * u) * k * k + 2.0 * k.powi(4)
            - k.powi(6);
        assert_relative_eq!(g.omega(u, k, mu, nu), expect, max_relative = 1e-13);
        // quadratic interaction symbol: S(k1,k2) = 2 eta k1^2 k2^2 - gamma (k1^2 + k2^2)
        let (k1, k2) = (1.1, 0.7);
        assert_relative_eq!(
            g.s_quad(k1, k2),
            2.0 * eta * k1 * k1 * k2 * k2 - gamma * (k1 * k1 + k2 * k2),
            max_relative = 1e-13
        );
    }

    #[test]
    fn general_scalar_admissibility() {
        let mut g = ScalarSixthOrder::new(0.0, 1.0, 2.0, 0.0).as_general();
        assert!(g.validate().is_ok());
        assert!(g.well_posed(1.0)); // a_3 = 1 > 0, odd m
        g.m = 2;
        g.a.truncate(2);
        g.a_tilde.truncate(2);
        assert!(g.validate().is_err(), "fourth-order models are rejected");
    }

    #[test]
    fn rd_model_loads_and_matches_frozen_dispersion() {
        let model = ModelSpec::from_json_file(&models_dir().join("rd_coupled3.json")).unwrap();
        let rd = match &model {
            ModelSpec::Rd(rd) => rd,
            _ => panic!("expected rd model"),
        };
        // generic off-critical sample: frozen eigenvalues by k
        let u = [
            0.229999999999999554883,
            -0.119999999999999943391,
            0.310000000000000286107,
        ];
        let mu = 0.350000000000000646058;
        let nu = -0.239999999999999297532;
        let refs: [(f64, [f64; 3], [f64; 3]); 3] = [
            (
                0.6,
                [-0.00690663733941210691537, -0.00690663733941210691537, -2.90106172532117485957],
                [0.235580420745391806824, -0.235580420745391806824, 0.0],
            ),
            (
                1.0,
                [0.0550529728896170068714, -0.647541891805476330321, -5.20238608108413974995],
                [0.0, 0.0, 0.0],
            ),
            (
                1.7,
                [-0.525035742180966247818, -2.52867057108448112974, -11.2461686867345516958],
                [0.0, 0.0, 0.0],
            ),
        ];
        for (k, res, ims) in refs {
            let s = dispersion(&model, &u, k, mu, nu).unwrap();
            for i in 0..3 {
                assert_relative_eq!(s.omega[i].re, res[i], epsilon = 1e-10);
                assert_relative_eq!(s.omega[i].im.abs(), ims[i].abs(), epsilon = 1e-10);
            }
        }
        assert_eq!(rd.n, 3);
    }

    #[test]
    fn rd_hessian_symmetry_and_fd_consistency() {
        let model = ModelSpec::from_json_file(&models_dir().join("rd_coupled3.json")).unwrap();
        let rd = match model {
            ModelSpec::Rd(rd) => rd,
            _ => unreachable!(),
        };
        let u = DVector::from_vec(vec![0.21, -0.07, 0.33]);
        let (mu, nu) = (0.31, -0.18);
        let v = DVector::from_vec(vec![0.3, -1.1, 0.7]);
        let w = DVector::from_vec(vec![-0.2, 0.5, 1.3]);
        let fvw = rd.f_uu(&u, &v, &w);
        let fwv = rd.f_uu(&u, &w, &v);
        assert!((fvw - fwv).norm() < 1e-13, "Hessian bilinear form must be symmetric");
        // directional FD check of the Jacobian
        let h = 1e-6;
        let fp = rd.f(&(&u + &v * h), mu, nu);
        let fm = rd.f(&(&u - &v * h), mu, nu);
        let jv = rd.f_u(&u, mu, nu) * &v;
        assert!(((fp - fm) / (2.0 * h) - jv).norm() < 1e-7);
        // directional FD check of the Hessian
        let jp = rd.f_u(&(&u + &w * h), mu, nu) * &v;
        let jm = rd.f_u(&(&u - &w * h), mu, nu) * &v;
        assert!(((jp - jm) / (2.0 * h) - rd.f_uu(&u, &v, &w)).norm() < 1e-6);
    }

    #[test]
    fn rd_char_poly_partials_match_analytic() {
        // FD determinant partials vs analytic adjugate-trace values
        let model = ModelSpec::from_json_file(&models_dir().join("rd_coupled3.json")).unwrap();
        let rd = match model {
            ModelSpec::Rd(rd) => rd,
            _ => unreachable!(),
        };
        let u = DVector::from_vec(vec![0.23, -0.12, 0.31]);
        let (k, mu, nu, lambda) = (0.9, 0.35, -0.24, 0.1);
        let parts = char_poly_partials(&rd, &u, k, mu, nu, lambda);
        let mut t = rd.t_matrix(&u, k, mu, nu);
        for i in 0..3 {
            t[(i, i)] -= lambda;
        }
        let det = t.determinant();
        let adj = t.clone().try_inverse().unwrap() * det; // adjugate of an invertible matrix
        // P_θ = tr(adj(T−λI)·∂θ(T−λI))
        let tr = |m: &DMatrix<f64>| (0..3).map(|i| m[(i, i)]).sum::<f64>();
        let d_mu = rd.f_umu();
        let d_nu = rd.f_unu();
        let mut d_k = DMatrix::zeros(3, 3);
        for i in 0..3 {
            d_k[(i, i)] = -2.0 * k * rd.diffusion[i];
        }
        assert_relative_eq!(parts.p, det, max_relative = 1e-12);
        assert_relative_eq!(parts.p_lambda, -tr(&adj), max_relative = 1e-6);
        assert_relative_eq!(parts.p_mu, tr(&(&adj * &d_mu)), max_relative = 1e-6);
        assert_relative_eq!(parts.p_nu, tr(&(&adj * &d_nu)), max_relative = 1e-6);
        assert_relative_eq!(parts.p_k, tr(&(&adj * &d_k)), max_relative = 1e-6);
        // u-gradient: ∂T/∂u_i has rows F_uu(e_i, ·)
        for i in 0..3 {
            let mut e = DVector::zeros(3);
            e[i] = 1.0;
            let mut d_ui = DMatrix::zeros(3, 3);
            for c in 0..3 {
                let mut ec = DVector::zeros(3);
                ec[c] = 1.0;
                let col = rd.f_uu(&u, &e, &ec);
                for r in 0..3 {
                    d_ui[(r, c)] = col[r];
                }
            }
            assert_relative_eq!(parts.p_u[i], tr(&(&adj * &d_ui)), max_relative = 1e-5);
        }
    }

    #[test]
    fn rd_homogeneous_states_decoupled() {
        // decoupled copies of the example reaction: states are lattice points
        let model = ModelSpec::from_json_file(&models_dir().join("rd_decoupled3.json")).unwrap();
        let states = homogeneous_states(&model, -0.5, 0.0).unwrap();
        // each component independently solves mu*u + 2u^2 - u^3 = 0
        let up = 1.0 + 0.5_f64.sqrt();
        let origin = states.iter().find(|s| s.u.iter().all(|x| x.abs() < 1e-9));
        assert!(origin.is_some(), "origin state found");
        assert!(origin.unwrap().ode_stable, "origin stable at mu < 0");
        let plus = states
            .iter()
            .find(|s| s.u.iter().all(|x| (x - up).abs() < 1e-9));
        assert!(plus.is_some(), "stable (u+, u+, u+) state found from seeds");
        assert!(plus.unwrap().ode_stable);
    }

    #[test]
    fn scalar6_json_round_trip() {
        let text = r#"{"schema": "turingfold-model/1", "type": "scalar6", "mu": -1.0, "nu": 0.4, "eta": 2.0, "gamma": 0.0}"#;
        let model = ModelSpec::from_json_str(text).unwrap();
        match model {
            ModelSpec::Scalar6(s) => {
                assert_eq!(s.nu, 0.4);
                assert_eq!(s.eta, 2.0);
            }
            _ => panic!("wrong variant"),
        }
        assert!(ModelSpec::from_json_str("{\"type\": \"unknown\"}").is_err());
    }

    proptest! {
        #[test]
        fn dispersion_even_in_k(k in -3.0..3.0f64, mu in -1.0..0.5f64, nuv in 0.2..1.2f64, eta in -2.0..3.0f64) {
            let model = example(mu, nuv, eta);
            let up = 1.0 + (1.0 + mu).max(0.0).sqrt();
            let sp = dispersion(&model, &[up], k, mu, nuv).unwrap();
            let sm = dispersion(&model, &[up], -k, mu, nuv).unwrap();
            prop_assert!((sp.omega[0].re - sm.omega[0].re).abs() < 1e-12);
        }

        #[test]
        fn dispersion_matches_closed_form(k in 0.0..2.5f64, mu in -0.99..0.5f64, nuv in 0.2..1.2f64) {
            let model = example(mu, nuv, 2.0);
            let up = 1.0 + (1.0 + mu).sqrt();
            let s = dispersion(&model, &[up], k, mu, nuv).unwrap();
            let closed = mu + 4.0 * up - 3.0 * up * up - nuv * k * k + 2.0 * k.powi(4) - k.powi(6);
            prop_assert!((s.omega[0].re - closed).abs() < 1e-12 * (1.0 + closed.abs()));
        }

        #[test]
        fn homogeneous_residual_small(mu in -0.99..3.0f64) {
            let model = example(mu, 1.0, 2.0);
            let grid = Grid1D::new(10.0, 16, BoundaryCondition::Periodic).unwrap();
            for s in homogeneous_states(&model, mu, 1.0).unwrap() {
                let rhs = eval_rhs(&model, &vec![s.u[0]; grid.n], &grid, mu, 1.0).unwrap();
                prop_assert!(rhs.iter().all(|v| v.abs() < 1e-10));
            }
        }
    }
}
