//! Fold and Turing bifurcation analysis and the co-dimension-2 reduction.
//!
//! The entry point is [`locate_turing_fold`], which drives a nested
//! continuation to the parameter pair `(μ*, ν*)` at which a fold of the
//! homogeneous branch and a stationary finite-wavenumber (Turing) instability
//! coincide. From the located point, [`ab_coefficients`] evaluates the eight
//! raw brackets of the weakly nonlinear reduction and maps them to the
//! canonical modulation-system coefficients `(α, d, β)`, and
//! [`landau_coefficient`] independently measures the cubic Landau coefficient
//! of the bifurcating pattern branch at small offsets, providing a cross-check
//! of the sign relation between `β` and pattern sub/supercriticality.
//!
//! All solvers work for both model classes ([`ModelSpec::Scalar6`] /
//! [`ModelSpec::ScalarGeneral`] with scalar symbols, and [`ModelSpec::Rd`]
//! reaction–diffusion systems with matrix-valued linearizations).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::models::{
    char_poly_partials, dispersion, homogeneous_states, GeneralScalarModel, ModelSpec, RDModel,
};
use crate::numerics::{bisect, central_diff, fd_jacobian, golden_max, newton_damped};
use crate::{Error, Result};

/// Residual tolerance for scalar point solves.
const SCALAR_TOL: f64 = 1e-11;
/// Residual tolerance for reaction–diffusion point solves (the determinant
/// rows have a slightly higher roundoff floor).
const RD_TOL: f64 = 1e-9;
/// Ratio of the second-smallest to the largest singular value below which a
/// null space counts as multidimensional (degenerate point).
const NULLITY_RATIO: f64 = 1e-4;
/// Magnitude below which a reduction coefficient counts as degenerate.
const DEGENERATE_TOL: f64 = 1e-8;
/// Largest tolerated leading growth rate away from the critical wavenumber
/// when checking that the instability is confined to the critical modes.
const MARGIN_TOL: f64 = 1e-7;

// ---------------------------------------------------------------------------
// result types
// ---------------------------------------------------------------------------

/// A fold (saddle-node) of the homogeneous branch at fixed `ν`.
#[derive(Debug, Clone, Serialize)]
pub struct FoldPoint {
    /// Drive parameter value at the fold.
    pub mu_s: f64,
    /// Homogeneous state at the fold.
    pub u_s: Vec<f64>,
    /// Right null vector of the Jacobian, unit norm.
    pub v_s: Vec<f64>,
    /// Left null vector, normalized so `⟨p_s, v_s⟩ = 1`.
    pub p_s: Vec<f64>,
    /// Spatial parameter at which the fold was computed.
    pub nu: f64,
}

/// A stationary Turing threshold of the homogeneous branch at fixed `ν`.
#[derive(Debug, Clone, Serialize)]
pub struct TuringPoint {
    /// Drive parameter value at which the critical mode is neutral.
    pub mu_t: f64,
    /// Critical wavenumber.
    pub k_c: f64,
    /// Homogeneous state at the threshold.
    pub u_t: Vec<f64>,
    /// Right null vector of the wavenumber-`k_c` linearization, unit norm
    /// with its largest-magnitude entry positive.
    pub v_t: Vec<f64>,
    /// Left null vector, normalized so `⟨p_t, v_t⟩ = 1`.
    pub p_t: Vec<f64>,
    /// Spatial parameter at which the threshold was computed.
    pub nu: f64,
}

/// Seed for [`find_turing`].
#[derive(Debug, Clone)]
pub struct TuringSeed {
    pub u: Vec<f64>,
    pub mu: f64,
    pub k: f64,
}

/// One named non-degeneracy or consistency check with its numerical value.
#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub name: String,
    pub value: f64,
    pub passed: bool,
}

/// Leading coefficients of the two-parameter unfolding about the
/// co-dimension-2 point, for the offset `ν = ν* − δ`:
///
/// * fold branch: `u^s = u* + ũ^s δ + …`, `μ^s = μ* + μ̃^s δ + …`;
/// * Turing state: `u^t = u^s + ū^t v_s δ + …`,
///   `μ^t = μ^s + μ̂ δ² + …`, `k_c = k* + k̃ δ + …`;
/// * growth rates: the critical mode grows like `ω̃^s δ` at the fold and has
///   `μ`-slope `ω̃_μ / δ`; the homogeneous mode crosses with slope `ρ̃ δ`.
#[derive(Debug, Clone, Serialize)]
pub struct Expansion {
    pub u_tilde_s: Vec<f64>,
    pub mu_tilde_s: f64,
    pub omega_tilde_s: f64,
    pub u_bar_t: f64,
    pub u_tilde_t: Vec<f64>,
    pub mu_hat: f64,
    pub omega_tilde_mu: f64,
    pub k_tilde: f64,
    pub rho_tilde: f64,
    /// The second-order fold-branch drift is not evaluated by this toolkit.
    pub u_hat_s_computed: bool,
}

/// Curvatures of the two neutral curves at the co-dimension-2 point.
#[derive(Debug, Clone, Serialize)]
pub struct Curvature {
    /// `∂²ω/∂k²` of the homogeneous-mode branch at `k = 0` (negative).
    pub rho_kk_star: f64,
    /// `∂²ω/∂k²` of the critical branch at `k = k*` (negative).
    pub omega_kk_star: f64,
}

/// A located Turing-fold point together with its local expansion and audit.
#[derive(Debug, Clone, Serialize)]
pub struct TuringFoldReport {
    pub mu_star: f64,
    pub nu_star: f64,
    pub k_star: f64,
    pub u_star: Vec<f64>,
    /// Fold null vectors at the point (right; left with `⟨p, v⟩ = 1`).
    pub v_s: Vec<f64>,
    pub p_s: Vec<f64>,
    /// Turing null vectors at the point.
    pub v_t: Vec<f64>,
    pub p_t: Vec<f64>,
    pub expansion: Expansion,
    pub curvature: Curvature,
    /// Named non-degeneracy checks; failures are recorded, not fatal.
    pub audit: Vec<AuditEntry>,
    pub audit_passed: bool,
}

/// The physical-to-canonical variable scalings implied by the reduction:
/// `A = a·Ã`, `B = b·B̃`, `ξ = xi·ξ̃`, `τ = tau·τ̃`, `r = r_scale·R`.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleMaps {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
    pub tau: f64,
    pub r: f64,
}

/// Raw reduction coefficients and their canonical normal form.
///
/// The raw modulation system reads
///
/// ```text
/// A_τ = c1 A_ξξ + (c2 + c3 B) A,
/// B_τ = c4 B_ξξ + c5 − c6 r + c7 B² + c8 |A|²,
/// ```
///
/// and the five [`ScaleMaps`] carry it to the canonical form with
/// coefficients `(α, d, β)`.
#[derive(Debug, Clone, Serialize)]
pub struct ABCoefficients {
    pub raw: [f64; 8],
    pub alpha: f64,
    pub d: f64,
    pub beta: f64,
    pub scale_maps: ScaleMaps,
}

/// Finite-offset Landau coefficient of the bifurcating pattern branch.
#[derive(Debug, Clone, Serialize)]
pub struct Landau {
    /// Offset `δ` used for the larger of the two evaluations.
    pub delta: f64,
    /// Landau coefficient at offset `δ` (diverges like `1/δ` at fixed state).
    pub l_delta: f64,
    /// Richardson-extrapolated limit of `δ·L(δ)`.
    pub l_star: f64,
    /// `Some(true)` when the sign of `l_star` is opposite to the sign of `β`;
    /// `None` when `β` is too small to call.
    pub sign_consistent: Option<bool>,
}

/// Finite-offset verification of the local expansion.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionCheck {
    pub deltas: Vec<f64>,
    /// `(μ^t − μ^s)/δ²` divided by the predicted curvature `μ̂`.
    pub mu_hat_ratios: Vec<f64>,
    /// `|k_c(δ) − k* − k̃ δ|` at each offset.
    pub k_errors: Vec<f64>,
    /// Observed convergence order of the wavenumber prediction.
    pub k_order: f64,
    /// All curvature ratios within 10% of one.
    pub tangency_ok: bool,
}

// ---------------------------------------------------------------------------
// class dispatch and small helpers
// ---------------------------------------------------------------------------

enum ClassView {
    Scalar(GeneralScalarModel),
    Rd(RDModel),
}

fn class_view(model: &ModelSpec) -> Result<ClassView> {
    model.validate()?;
    Ok(match model {
        ModelSpec::Rd(rd) => ClassView::Rd(rd.clone()),
        _ => ClassView::Scalar(model.as_scalar()?),
    })
}

/// A few undamped Newton polish steps, keeping only strict improvements.
/// Tightens a converged solve toward the roundoff floor of the residual.
fn polish_steps<F, J>(f: &F, jac: &J, mut x: DVector<f64>) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let mut rn = f(&x).norm();
    for _ in 0..3 {
        let r = f(&x);
        let step = match jac(&x).lu().solve(&(-&r)) {
            Some(s) => s,
            None => break,
        };
        let xt = &x + step;
        let rt = f(&xt).norm();
        if rt.is_finite() && rt < rn {
            x = xt;
            rn = rt;
        } else {
            break;
        }
    }
    x
}

/// Right and left null vectors of a square matrix with a simple (one-
/// dimensional) near-null space. Returns `(v, p_raw, sigma_min, sigma_ratio)`
/// where `sigma_ratio` is second-smallest over largest singular value.
fn null_pair(m: &DMatrix<f64>) -> Result<(DVector<f64>, DVector<f64>, f64, f64)> {
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let sv = &svd.singular_values;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| sv[a].partial_cmp(&sv[b]).unwrap());
    let (imin, isecond) = (idx[0], idx[1]);
    // floor the scale at one so a uniformly tiny matrix (e.g. a multiply
    // degenerate linearization that is numerically the zero matrix) is still
    // reported as having a multidimensional null space
    let smax = sv[idx[n - 1]].max(1.0);
    let v = svd.v_t.as_ref().unwrap().row(imin).transpose();
    let p = svd.u.as_ref().unwrap().column(imin).into_owned();
    Ok((v, p, sv[imin], sv[isecond] / smax))
}

/// Normalize an SVD null pair into bifurcation vectors: `v` unit norm, `p`
/// scaled so `⟨p, v⟩ = 1`. Errors when the pairing is numerically defective.
fn biorthonormalize(
    v: DVector<f64>,
    p: DVector<f64>,
    what: &str,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let v = v.normalize();
    let pv = p.dot(&v);
    if pv.abs() < 1e-10 {
        return Err(Error::NotAdmissible(format!(
            "{what}: left and right null vectors are near-orthogonal (defective linearization)"
        )));
    }
    Ok((v, p / pv))
}

/// Flip the sign of `v` so its largest-magnitude entry is positive, flipping
/// `p` along with it to preserve `⟨p, v⟩ = 1`.
fn orient_largest_positive(v: &mut DVector<f64>, p: &mut DVector<f64>) {
    let mut imax = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        *v = -&*v;
        *p = -&*p;
    }
}

fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// Leading growth rate at wavenumber `k` about the state `u`.
fn leading_re(model: &ModelSpec, u: &[f64], k: f64, mu: f64, nu: f64) -> Result<f64> {
    Ok(dispersion(model, u, k, mu, nu)?.omega[0].re)
}

/// Verify that the leading growth rate stays below `MARGIN_TOL` for all
/// sampled wavenumbers outside a window around `k_c`. Returns the worst
/// (largest) growth rate found and where it occurred.
fn global_margin(
    model: &ModelSpec,
    u: &[f64],
    k_c: f64,
    mu: f64,
    nu: f64,
) -> Result<(f64, f64)> {
    let k_max = (3.0 * k_c).max(k_c + 2.0);
    let excl = 0.05 * k_c.max(1.0);
    let samples = 400;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_k = 0.0;
    for i in 0..=samples {
        let k = k_max * i as f64 / samples as f64;
        if (k - k_c).abs() < excl {
            continue;
        }
        let re = leading_re(model, u, k, mu, nu)?;
        if re > worst {
            worst = re;
            worst_k = k;
        }
    }
    Ok((worst, worst_k))
}

// ---------------------------------------------------------------------------
// fold solver
// ---------------------------------------------------------------------------

/// Locate a fold of the homogeneous branch at fixed `nu`, starting Newton
/// iteration from the state `u_seed` and drive value `mu_seed`.
///
/// The returned point satisfies the residual tolerance, has a one-dimensional
/// Jacobian null space, nonvanishing quadratic coefficient `⟨F_uu(v,v), p⟩`,
/// and is oriented so the drive transversality `⟨F_μ, p⟩` is positive.
pub fn find_fold(model: &ModelSpec, nu: f64, u_seed: &[f64], mu_seed: f64) -> Result<FoldPoint> {
    match class_view(model)? {
        ClassView::Scalar(g) => {
            if !g.well_posed(nu) {
                return Err(Error::NotAdmissible(format!(
                    "scalar model is ill-posed at nu = {nu}"
                )));
            }
            if u_seed.len() != 1 {
                return Err(Error::InvalidInput(
                    "scalar fold seed must have one component".into(),
                ));
            }
            let r = g.reaction;
            let res = move |x: &DVector<f64>| {
                DVector::from_vec(vec![r.f(x[0], x[1]), r.f_u(x[0], x[1])])
            };
            let jac = move |x: &DVector<f64>| {
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        r.f_u(x[0], x[1]),
                        r.f_mu(x[0]),
                        r.f_uu(x[0], x[1]),
                        r.f_umu(x[0]),
                    ],
                )
            };
            let x0 = DVector::from_vec(vec![u_seed[0], mu_seed]);
            let x = newton_damped(&res, &jac, &x0, SCALAR_TOL, 80, "fold search")?;
            let x = polish_steps(&res, &jac, x);
            let (u, mu) = (x[0], x[1]);
            let fuu = r.f_uu(u, mu);
            let fmu = r.f_mu(u);
            if fuu.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(format!(
                    "degenerate fold at (u, mu) = ({u:.6}, {mu:.6}): vanishing quadratic coefficient"
                )));
            }
            if fmu.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(format!(
                    "fold at (u, mu) = ({u:.6}, {mu:.6}) is not transversal in the drive parameter"
                )));
            }
            let s = if fmu > 0.0 { 1.0 } else { -1.0 };
            Ok(FoldPoint {
                mu_s: mu,
                u_s: vec![u],
                v_s: vec![s],
                p_s: vec![s],
                nu,
            })
        }
        ClassView::Rd(rd) => {
            let n = rd.n;
            if u_seed.len() != n {
                return Err(Error::InvalidInput(format!(
                    "fold seed has {} components, model has {n}",
                    u_seed.len()
                )));
            }
            let rdc = rd.clone();
            let res = move |x: &DVector<f64>| {
                let u = x.rows(0, n).into_owned();
                let mu = x[n];
                let mut out = DVector::zeros(n + 1);
                out.rows_mut(0, n).copy_from(&rdc.f(&u, mu, nu));
                out[n] = rdc.f_u(&u, mu, nu).determinant();
                out
            };
            let jac = |x: &DVector<f64>| fd_jacobian(&res, x);
            let mut x0 = DVector::zeros(n + 1);
            x0.rows_mut(0, n).copy_from(&dvec(u_seed));
            x0[n] = mu_seed;
            let x = newton_damped(&res, &jac, &x0, RD_TOL, 80, "fold search")?;
            let x = polish_steps(&res, &jac, x);
            let u = x.rows(0, n).into_owned();
            let mu = x[n];
            let j = rd.f_u(&u, mu, nu);
            let (v, p, _smin, ratio) = null_pair(&j)?;
            if ratio < NULLITY_RATIO {
                return Err(Error::NotAdmissible(format!(
                    "fold at mu = {mu:.6} has a multidimensional null space \
                     (second singular value ratio {ratio:.3e}); not a simple fold"
                )));
            }
            let (mut v, mut p) = biorthonormalize(v, p, "fold")?;
            let fmu = rd.f_mu(&u, mu, nu);
            let c6 = fmu.dot(&p);
            if c6.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(format!(
                    "fold at mu = {mu:.6} is not transversal in the drive parameter"
                )));
            }
            if c6 < 0.0 {
                v = -v;
                p = -p;
            }
            let s_ss = rd.f_uu(&u, &v, &v).dot(&p);
            if s_ss.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(format!(
                    "degenerate fold at mu = {mu:.6}: vanishing quadratic coefficient"
                )));
            }
            Ok(FoldPoint {
                mu_s: mu,
                u_s: u.iter().cloned().collect(),
                v_s: v.iter().cloned().collect(),
                p_s: p.iter().cloned().collect(),
                nu,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Turing solver
// ---------------------------------------------------------------------------

/// Locate a stationary Turing threshold at fixed `nu` from the given seed.
///
/// The returned point has a strictly negative wavenumber curvature at `k_c`,
/// a real critical mode (oscillatory criticality is rejected), and a leading
/// growth rate below [`MARGIN_TOL`] for all wavenumbers away from `k_c`.
pub fn find_turing(model: &ModelSpec, nu: f64, seed: &TuringSeed) -> Result<TuringPoint> {
    if !(seed.k > 0.0) {
        return Err(Error::InvalidInput(
            "Turing seed wavenumber must be positive".into(),
        ));
    }
    match class_view(model)? {
        ClassView::Scalar(g) => {
            if !g.well_posed(nu) {
                return Err(Error::NotAdmissible(format!(
                    "scalar model is ill-posed at nu = {nu}"
                )));
            }
            if seed.u.len() != 1 {
                return Err(Error::InvalidInput(
                    "scalar Turing seed must have one state component".into(),
                ));
            }
            let gc = g.clone();
            let res = move |x: &DVector<f64>| {
                let (u, mu, k) = (x[0], x[1], x[2]);
                DVector::from_vec(vec![
                    gc.reaction.f(u, mu),
                    gc.omega(u, k, mu, nu),
                    gc.omega_k(u, k, nu),
                ])
            };
            let jac = |x: &DVector<f64>| fd_jacobian(&res, x);
            let x0 = DVector::from_vec(vec![seed.u[0], seed.mu, seed.k]);
            let x = newton_damped(&res, &jac, &x0, SCALAR_TOL, 80, "Turing search")?;
            let x = polish_steps(&res, &jac, x);
            let (u, mu, k) = (x[0], x[1], x[2].abs());
            if k < 1e-3 {
                return Err(Error::NotAdmissible(format!(
                    "neutral wavenumber collapsed toward zero (k = {k:.3e}); \
                     the solution is indistinguishable from a homogeneous fold"
                )));
            }
            let wkk = g.omega_kk(u, k, nu);
            if wkk >= -DEGENERATE_TOL {
                return Err(Error::NotAdmissible(format!(
                    "neutral wavenumber k = {k:.6} is not a dispersion maximum \
                     (curvature {wkk:.3e})"
                )));
            }
            let (worst, worst_k) = global_margin(model, &[u], k, mu, nu)?;
            if worst > MARGIN_TOL {
                return Err(Error::NotAdmissible(format!(
                    "instability is not confined to the critical wavenumber: \
                     growth {worst:.3e} at k = {worst_k:.4}"
                )));
            }
            Ok(TuringPoint {
                mu_t: mu,
                k_c: k,
                u_t: vec![u],
                v_t: vec![1.0],
                p_t: vec![1.0],
                nu,
            })
        }
        ClassView::Rd(rd) => {
            let n = rd.n;
            if seed.u.len() != n {
                return Err(Error::InvalidInput(format!(
                    "Turing seed has {} components, model has {n}",
                    seed.u.len()
                )));
            }
            let rdc = rd.clone();
            let res = move |x: &DVector<f64>| {
                let u = x.rows(0, n).into_owned();
                let (mu, k) = (x[n], x[n + 1]);
                let mut out = DVector::zeros(n + 2);
                out.rows_mut(0, n).copy_from(&rdc.f(&u, mu, nu));
                out[n] = rdc.t_matrix(&u, k, mu, nu).determinant();
                out[n + 1] = central_diff(|kk| rdc.t_matrix(&u, kk, mu, nu).determinant(), k);
                out
            };
            let jac = |x: &DVector<f64>| fd_jacobian(&res, x);
            let mut x0 = DVector::zeros(n + 2);
            x0.rows_mut(0, n).copy_from(&dvec(&seed.u));
            x0[n] = seed.mu;
            x0[n + 1] = seed.k;
            let x = newton_damped(&res, &jac, &x0, RD_TOL, 80, "Turing search")?;
            let x = polish_steps(&res, &jac, x);
            let u = x.rows(0, n).into_owned();
            let (mu, k) = (x[n], x[n + 1].abs());
            if k < 1e-3 {
                return Err(Error::NotAdmissible(format!(
                    "neutral wavenumber collapsed toward zero (k = {k:.3e}); \
                     the solution is indistinguishable from a homogeneous fold"
                )));
            }
            let t = rd.t_matrix(&u, k, mu, nu);
            let (v, p, _smin, ratio) = null_pair(&t)?;
            if ratio < NULLITY_RATIO {
                return Err(Error::NotAdmissible(format!(
                    "Turing threshold at mu = {mu:.6} has a multidimensional null space"
                )));
            }
            let (mut v, mut p) = biorthonormalize(v, p, "Turing threshold")?;
            orient_largest_positive(&mut v, &mut p);
            let disp = dispersion(model, u.as_slice(), k, mu, nu)?;
            let lead = disp.omega[0];
            if lead.im.abs() > 1e-8 * (1.0 + lead.re.abs()) {
                return Err(Error::NotAdmissible(format!(
                    "critical mode at k = {k:.6} is oscillatory \
                     (Im = {:.3e}); not a stationary Turing mode",
                    lead.im
                )));
            }
            // second-derivative test via the leading branch
            let wkk2 = {
                let h = 1e-3 * k.max(1.0);
                let f = |kk: f64| {
                    dispersion(model, u.as_slice(), kk, mu, nu)
                        .map(|d| d.omega[0].re)
                        .unwrap_or(f64::NAN)
                };
                (f(k + h) - 2.0 * f(k) + f(k - h)) / (h * h)
            };
            if wkk2 >= -DEGENERATE_TOL {
                return Err(Error::NotAdmissible(format!(
                    "neutral wavenumber k = {k:.6} is not a dispersion maximum \
                     (curvature {wkk2:.3e})"
                )));
            }
            let (worst, worst_k) = global_margin(model, u.as_slice(), k, mu, nu)?;
            if worst > MARGIN_TOL {
                return Err(Error::NotAdmissible(format!(
                    "instability is not confined to the critical wavenumber: \
                     growth {worst:.3e} at k = {worst_k:.4}"
                )));
            }
            Ok(TuringPoint {
                mu_t: mu,
                k_c: k,
                u_t: u.iter().cloned().collect(),
                v_t: v.iter().cloned().collect(),
                p_t: p.iter().cloned().collect(),
                nu,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// fold-adjacent Turing search (seeding along the upper branch)
// ---------------------------------------------------------------------------

/// Drive-parameter transversality `⟨F_μ, p⟩` and quadratic bracket
/// `⟨F_uu(v, v), p⟩` at a fold.
fn fold_brackets(model: &ModelSpec, fold: &FoldPoint) -> Result<(f64, f64)> {
    match class_view(model)? {
        ClassView::Scalar(g) => {
            let (u, mu, s) = (fold.u_s[0], fold.mu_s, fold.p_s[0]);
            Ok((s * g.reaction.f_mu(u), s * g.reaction.f_uu(u, mu)))
        }
        ClassView::Rd(rd) => {
            let u = dvec(&fold.u_s);
            let v = dvec(&fold.v_s);
            let p = dvec(&fold.p_s);
            let c6 = rd.f_mu(&u, fold.mu_s, fold.nu).dot(&p);
            let s_ss = rd.f_uu(&u, &v, &v).dot(&p);
            Ok((c6, s_ss))
        }
    }
}

/// Find the Turing threshold on the branch emerging from a fold, seeding the
/// Newton search along the fold null direction at several arclengths.
fn turing_near_fold(model: &ModelSpec, nu: f64, fold: &FoldPoint) -> Result<TuringPoint> {
    let (c6, s_ss) = fold_brackets(model, fold)?;
    // wavenumber seed: the most unstable mode of the fold state itself
    let mut k_hat = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 1..=300 {
        let k = 6.0 * i as f64 / 300.0;
        let re = leading_re(model, &fold.u_s, k, fold.mu_s, nu)?;
        if re > best {
            best = re;
            k_hat = k;
        }
    }
    if k_hat == 0.0 {
        return Err(Error::NotAdmissible(
            "no finite-wavenumber instability near the fold state".into(),
        ));
    }
    let mut last_err = None;
    // the stable side of the fold is s > 0 when the quadratic coefficient is
    // negative (the usual orientation); try the other side as a fallback
    for &s in &[1e-3_f64, 3e-3, 0.01, 0.03, 0.1, 0.3, -1e-3, -0.01, -0.1] {
        let u: Vec<f64> = fold
            .u_s
            .iter()
            .zip(&fold.v_s)
            .map(|(ui, vi)| ui + s * vi)
            .collect();
        let mu = fold.mu_s - s_ss * s * s / (2.0 * c6);
        let seed = TuringSeed { u, mu, k: k_hat };
        match find_turing(model, nu, &seed) {
            Ok(tp) => return Ok(tp),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::NotAdmissible("no Turing threshold found near the fold".into())
    }))
}

// ---------------------------------------------------------------------------
// co-dimension-2 continuation
// ---------------------------------------------------------------------------

/// First-order tangent `(du/dν, dμ/dν)` of the fold curve at a fold point,
/// from the linearization of the fold system. Falls back to a zero tangent
/// (plain re-seeding) if the linearization cannot be solved.
fn fold_tangent(model: &ModelSpec, fold: &FoldPoint) -> (Vec<f64>, f64) {
    match class_view(model) {
        // the scalar reaction carries no spatial parameter: the fold is fixed
        Ok(ClassView::Scalar(_)) => (vec![0.0], 0.0),
        Ok(ClassView::Rd(rd)) => {
            let n = rd.n;
            let res = |x: &DVector<f64>, nu: f64| {
                let u = x.rows(0, n).into_owned();
                let mu = x[n];
                let mut out = DVector::zeros(n + 1);
                out.rows_mut(0, n).copy_from(&rd.f(&u, mu, nu));
                out[n] = rd.f_u(&u, mu, nu).determinant();
                out
            };
            let mut x = DVector::zeros(n + 1);
            x.rows_mut(0, n).copy_from(&dvec(&fold.u_s));
            x[n] = fold.mu_s;
            let j = fd_jacobian(|y: &DVector<f64>| res(y, fold.nu), &x);
            let h = 1e-7 * (1.0 + fold.nu.abs());
            let r_nu = (res(&x, fold.nu + h) - res(&x, fold.nu - h)) / (2.0 * h);
            match j.lu().solve(&(-r_nu)) {
                Some(t) => (t.rows(0, n).iter().cloned().collect(), t[n]),
                None => (vec![0.0; n], 0.0),
            }
        }
        Err(_) => (vec![0.0; fold.u_s.len()], 0.0),
    }
}

/// Solve fold and Turing thresholds at one `nu`, seeded by first-order
/// extrapolation along the fold curve from a previously solved fold.
fn pair_at(model: &ModelSpec, nu: f64, prev: &FoldPoint) -> Result<(FoldPoint, TuringPoint, f64)> {
    let (du, dmu) = fold_tangent(model, prev);
    let dnu = nu - prev.nu;
    let seed_u: Vec<f64> = prev
        .u_s
        .iter()
        .zip(&du)
        .map(|(ui, ti)| ui + dnu * ti)
        .collect();
    let fold = find_fold(model, nu, &seed_u, prev.mu_s + dnu * dmu)?;
    let turing = turing_near_fold(model, nu, &fold)?;
    let h = turing.mu_t - fold.mu_s;
    // require a genuinely resolved separation: near-zero values are either
    // round-off or a solve that collapsed back onto the fold itself
    if h <= 1e-9 * (1.0 + fold.mu_s.abs()) {
        return Err(Error::NotAdmissible(format!(
            "Turing threshold does not separate from the fold at nu = {nu} \
             (mu_t - mu_s = {h:.3e})"
        )));
    }
    Ok((fold, turing, h))
}

/// Locate the co-dimension-2 Turing-fold point nearest the seed parameters.
///
/// The search proceeds in two stages: a continuation in `ν` that drives the
/// separation `μ^t(ν) − μ^s(ν)` to zero using the fact that its square root
/// is asymptotically linear in `ν* − ν`, followed by a direct Newton polish
/// of the full co-dimension-2 system. Non-degeneracy failures at the located
/// point are recorded in the report's audit rather than raised as errors;
/// solver failures are errors.
pub fn locate_turing_fold(
    model: &ModelSpec,
    nu_seed: f64,
    mu_seed: f64,
) -> Result<TuringFoldReport> {
    let view = class_view(model)?;

    // --- initial fold: try every homogeneous state at the seed parameters
    let states = homogeneous_states(model, mu_seed, nu_seed)?;
    let mut candidates: Vec<FoldPoint> = Vec::new();
    let mut last_err: Option<Error> = None;
    let mut ordered = states.clone();
    ordered.sort_by_key(|s| !s.ode_stable); // stable states first
    for st in &ordered {
        match find_fold(model, nu_seed, &st.u, mu_seed) {
            Ok(fp) => {
                if candidates
                    .iter()
                    .all(|c| (c.mu_s - fp.mu_s).abs() > 1e-8 * (1.0 + fp.mu_s.abs()))
                {
                    candidates.push(fp);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    candidates.sort_by(|a, b| {
        (a.mu_s - mu_seed)
            .abs()
            .partial_cmp(&(b.mu_s - mu_seed).abs())
            .unwrap()
    });
    let fold0 = candidates.into_iter().next().ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::NoConvergence {
            context: "no fold reachable from any homogeneous state at the seed parameters".into(),
            iterations: 0,
            residual: f64::NAN,
        })
    })?;
    let turing0 = turing_near_fold(model, nu_seed, &fold0)?;
    let h0 = turing0.mu_t - fold0.mu_s;
    if h0 <= 1e-9 * (1.0 + fold0.mu_s.abs()) {
        return Err(Error::NotAdmissible(
            "seed parameters do not separate the Turing threshold from the fold".into(),
        ));
    }

    // --- continuation: march nu, tracking sigma = sqrt(mu_t - mu_s)
    struct Pt {
        nu: f64,
        sigma: f64,
        fold: FoldPoint,
        turing: TuringPoint,
    }
    let sigma0 = h0.sqrt();
    let sigma_stop = 5.0e-4 * (1.0 + fold0.mu_s.abs()).sqrt();
    let mut nu_hat_last: Option<f64> = None;
    let best = if sigma0 < 2.0 * sigma_stop {
        // the seed parameters already sit against the co-dimension-2 point;
        // go straight to the polish
        Pt {
            nu: nu_seed,
            sigma: sigma0,
            fold: fold0,
            turing: turing0,
        }
    } else {
        let mut pts = vec![Pt {
            nu: nu_seed,
            sigma: sigma0,
            fold: fold0,
            turing: turing0,
        }];

        // probe both directions to find where the separation shrinks
        {
            let mut step = 0.04 * (1.0 + nu_seed.abs());
            let mut probed = None;
            'probe: for _ in 0..7 {
                for dir in [1.0, -1.0] {
                    let nu_try = nu_seed + dir * step;
                    if let Ok((f, t, h)) = pair_at(model, nu_try, &pts[0].fold) {
                        // only a shrinking separation identifies the approach
                        // direction; growth means we stepped away or onto a
                        // different structure
                        if h.sqrt() < 1.5 * sigma0 {
                            probed = Some(Pt {
                                nu: nu_try,
                                sigma: h.sqrt(),
                                fold: f,
                                turing: t,
                            });
                            break 'probe;
                        }
                    }
                }
                step *= 0.5;
            }
            let p = probed.ok_or_else(|| Error::NoConvergence {
                context: "continuation could not move off the initial point in nu".into(),
                iterations: 0,
                residual: f64::NAN,
            })?;
            pts.push(p);
            pts.sort_by(|a, b| b.sigma.partial_cmp(&a.sigma).unwrap());
        }

        let mut sigma_min = pts.iter().map(|p| p.sigma).fold(f64::INFINITY, f64::min);
        let mut failed_at: Option<f64> = None;
        for _ in 0..60 {
            let (na, sa) = (pts[pts.len() - 2].nu, pts[pts.len() - 2].sigma);
            let (nb, sb) = (pts[pts.len() - 1].nu, pts[pts.len() - 1].sigma);
            if sb < sigma_stop {
                break;
            }
            // secant prediction of the nu at which sigma vanishes
            let mut nu_next = if (sb - sa).abs() > 1e-14 * (sa + sb) {
                let nu_hat = (na * sb - nb * sa) / (sb - sa);
                nu_hat_last = Some(nu_hat);
                nb + 0.85 * (nu_hat - nb)
            } else {
                nb + (nb - na)
            };
            // cap wild extrapolation and respect known failures
            let span = (nb - na).abs().max(1e-12);
            if (nu_next - nb).abs() > 5.0 * span {
                nu_next = nb + 5.0 * span * (nu_next - nb).signum();
            }
            if let Some(fnu) = failed_at {
                let toward_fail = (fnu - nb).signum();
                if (nu_next - nb).signum() == toward_fail
                    && (nu_next - nb).abs() >= (fnu - nb).abs()
                {
                    nu_next = 0.5 * (nb + fnu);
                }
            }
            if (nu_next - nb).abs() < 1e-12 * (1.0 + nb.abs()) {
                break;
            }
            match pair_at(model, nu_next, &pts[pts.len() - 1].fold) {
                // a step that grows the separation has left the shrinking
                // wedge (e.g. overshot onto the far side); treat it like a
                // failed step so the secant brackets instead
                Ok((f, t, h)) if h.sqrt() < 1.5 * sigma_min => {
                    let s = h.sqrt();
                    pts.push(Pt {
                        nu: nu_next,
                        sigma: s,
                        fold: f,
                        turing: t,
                    });
                    pts.sort_by(|a, b| b.sigma.partial_cmp(&a.sigma).unwrap());
                    // drop stale far points; keep the best three
                    while pts.len() > 3 {
                        pts.remove(0);
                    }
                    sigma_min = sigma_min.min(s);
                }
                _ => {
                    failed_at = Some(match failed_at {
                        Some(f) if (f - nb).abs() < (nu_next - nb).abs() => f,
                        _ => nu_next,
                    });
                }
            }
        }

        pts.pop().unwrap()
    };

    // --- direct Newton polish of the full co-dimension-2 system
    let (u_star, mu_star, nu_star, k_star) = match &view {
        ClassView::Scalar(g) => {
            let gc = g.clone();
            let res = move |x: &DVector<f64>| {
                let (u, mu, nu, k) = (x[0], x[1], x[2], x[3]);
                DVector::from_vec(vec![
                    gc.reaction.f(u, mu),
                    gc.reaction.f_u(u, mu),
                    gc.omega(u, k, mu, nu),
                    gc.omega_k(u, k, nu),
                ])
            };
            let jac = |x: &DVector<f64>| fd_jacobian(&res, x);
            let x0 = DVector::from_vec(vec![
                best.turing.u_t[0],
                best.turing.mu_t,
                best.nu,
                best.turing.k_c,
            ]);
            let x = newton_damped(&res, &jac, &x0, SCALAR_TOL, 80, "co-dimension-2 polish")?;
            let x = polish_steps(&res, &jac, x);
            (vec![x[0]], x[1], x[2], x[3].abs())
        }
        ClassView::Rd(rd) => {
            let n = rd.n;
            let rdc = rd.clone();
            let res = move |x: &DVector<f64>| {
                let u = x.rows(0, n).into_owned();
                let (mu, nu, k) = (x[n], x[n + 1], x[n + 2]);
                let mut out = DVector::zeros(n + 3);
                out.rows_mut(0, n).copy_from(&rdc.f(&u, mu, nu));
                out[n] = rdc.f_u(&u, mu, nu).determinant();
                out[n + 1] = rdc.t_matrix(&u, k, mu, nu).determinant();
                out[n + 2] = central_diff(|kk| rdc.t_matrix(&u, kk, mu, nu).determinant(), k);
                out
            };
            let jac = |x: &DVector<f64>| fd_jacobian(&res, x);
            let mut x0 = DVector::zeros(n + 3);
            x0.rows_mut(0, n).copy_from(&dvec(&best.turing.u_t));
            x0[n] = best.turing.mu_t;
            x0[n + 1] = best.nu;
            x0[n + 2] = best.turing.k_c;
            let x = newton_damped(&res, &jac, &x0, RD_TOL, 80, "co-dimension-2 polish")?;
            let x = polish_steps(&res, &jac, x);
            (
                x.rows(0, n).iter().cloned().collect(),
                x[n],
                x[n + 1],
                x[n + 2].abs(),
            )
        }
    };

    // the polished point must agree with where the continuation said the
    // separation vanishes; a large jump means the polish slid onto a
    // different degenerate structure
    if let Some(nu_hat) = nu_hat_last {
        let tol = (5.0 * (best.nu - nu_hat).abs()).max(1e-3 * (1.0 + nu_hat.abs()));
        if (nu_star - nu_hat).abs() > tol {
            return Err(Error::NoConvergence {
                context: format!(
                    "polish drifted from the continuation target \
                     (nu = {nu_star:.6} vs estimate {nu_hat:.6})"
                ),
                iterations: 0,
                residual: (nu_star - nu_hat).abs(),
            });
        }
    }

    build_report(model, &view, &u_star, mu_star, nu_star, k_star)
}

// ---------------------------------------------------------------------------
// report assembly: vectors, expansion, audit
// ---------------------------------------------------------------------------

fn build_report(
    model: &ModelSpec,
    view: &ClassView,
    u_star: &[f64],
    mu_star: f64,
    nu_star: f64,
    k_star: f64,
) -> Result<TuringFoldReport> {
    let mut audit: Vec<AuditEntry> = Vec::new();
    let push = |audit: &mut Vec<AuditEntry>, name: &str, value: f64, passed: bool| {
        audit.push(AuditEntry {
            name: name.into(),
            value,
            passed,
        });
    };

    let (v_s, p_s, v_t, p_t, expansion, curvature, s_st_opt, flipped) = match view {
        ClassView::Scalar(g) => {
            let r = g.reaction;
            let (u, mu) = (u_star[0], mu_star);
            let fmu = r.f_mu(u);
            let s = if fmu >= 0.0 { 1.0 } else { -1.0 };
            let fuu = r.f_uu(u, mu);
            let gnu = g.lin_symbol_nu(k_star);
            let gu = g.gu_symbol(k_star);
            let den = fuu + gu;
            if den.abs() < DEGENERATE_TOL || fmu.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(
                    "degenerate reduction: vanishing effective quadratic coupling \
                     or drive transversality"
                        .into(),
                ));
            }
            let wkk = g.omega_kk(u, k_star, nu_star);
            let rho_kk = g.omega_kk(u, 0.0, nu_star);
            let u_tilde = gnu / den;
            let mu_hat = -fuu * u_tilde * u_tilde / (2.0 * fmu);
            let om_mu = -den * den * fmu / (gnu * fuu);
            let k_tilde = (g.lin_symbol_knu(k_star) - g.gu_symbol_k(k_star) * u_tilde) / wkk;
            let expansion = Expansion {
                u_tilde_s: vec![0.0],
                mu_tilde_s: 0.0,
                omega_tilde_s: -gnu,
                u_bar_t: u_tilde * s,
                u_tilde_t: vec![u_tilde],
                mu_hat,
                omega_tilde_mu: om_mu,
                k_tilde,
                rho_tilde: fuu * u_tilde,
                u_hat_s_computed: false,
            };
            let curvature = Curvature {
                rho_kk_star: rho_kk,
                omega_kk_star: wkk,
            };
            (
                vec![s],
                vec![s],
                vec![1.0],
                vec![1.0],
                expansion,
                curvature,
                None,
                s < 0.0,
            )
        }
        ClassView::Rd(rd) => {
            let u = dvec(u_star);
            let n = rd.n;

            // fold null vectors and orientation
            let j = rd.f_u(&u, mu_star, nu_star);
            let (v, p, _smin, ratio_s) = null_pair(&j)?;
            if ratio_s < NULLITY_RATIO {
                return Err(Error::NotAdmissible(
                    "fold null space at the co-dimension-2 point is not one-dimensional".into(),
                ));
            }
            let (mut v_s, mut p_s) = biorthonormalize(v, p, "fold")?;
            let c6 = rd.f_mu(&u, mu_star, nu_star).dot(&p_s);
            let flipped = c6 < 0.0;
            if flipped {
                v_s = -v_s;
                p_s = -p_s;
            }
            let c6 = c6.abs();

            // Turing null vectors
            let t = rd.t_matrix(&u, k_star, mu_star, nu_star);
            let (v, p, _smin, ratio_t) = null_pair(&t)?;
            if ratio_t < NULLITY_RATIO {
                return Err(Error::NotAdmissible(
                    "Turing null space at the co-dimension-2 point is not one-dimensional".into(),
                ));
            }
            let (mut v_t, mut p_t) = biorthonormalize(v, p, "Turing threshold")?;
            orient_largest_positive(&mut v_t, &mut p_t);

            // characteristic-polynomial partials at the critical and zero modes
            let pp = char_poly_partials(rd, &u, k_star, mu_star, nu_star, 0.0);
            let qq = char_poly_partials(rd, &u, 0.0, mu_star, nu_star, 0.0);
            if pp.p_lambda.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(
                    "degenerate critical mode: repeated zero eigenvalue at k*".into(),
                ));
            }

            // fold-branch drift: bordered solve for (u_tilde_s, mu_tilde_s)
            let mut m = DMatrix::zeros(n + 1, n + 1);
            m.view_mut((0, 0), (n, n)).copy_from(&j);
            m.view_mut((0, n), (n, 1))
                .copy_from(&rd.f_mu(&u, mu_star, nu_star));
            for i in 0..n {
                m[(n, i)] = qq.p_u[i];
            }
            m[(n, n)] = qq.p_mu;
            let mut rhs = DVector::zeros(n + 1);
            rhs.rows_mut(0, n).copy_from(&rd.f_nu(&u, mu_star, nu_star));
            rhs[n] = qq.p_nu;
            let sol = m.lu().solve(&rhs).ok_or_else(|| {
                Error::NotAdmissible(
                    "degenerate bordered system for the fold-branch drift".into(),
                )
            })?;
            let u_tilde_s = sol.rows(0, n).into_owned();
            let mu_tilde_s = sol[n];

            // growth of the critical mode along the fold branch
            let om_s = (pp.p_nu - pp.p_mu * mu_tilde_s - pp.p_u.dot(&u_tilde_s)) / pp.p_lambda;

            // quadratic brackets
            let s_ss = rd.f_uu(&u, &v_s, &v_s).dot(&p_s);
            let s_st = rd.f_uu(&u, &v_s, &v_t).dot(&p_t);
            let pu_vs = pp.p_u.dot(&v_s);
            if s_ss.abs() < DEGENERATE_TOL || pu_vs.abs() < DEGENERATE_TOL {
                return Err(Error::NotAdmissible(
                    "degenerate reduction: vanishing fold quadratic coefficient \
                     or state sensitivity of the critical mode"
                        .into(),
                ));
            }

            // tangency curvature and Turing-state offset
            let mu_hat = -0.5 * s_ss * (pp.p_lambda * om_s).powi(2) / (c6 * pu_vs * pu_vs);
            let u_bar = pp.p_lambda * om_s / pu_vs;
            let u_tilde_t = &v_s * u_bar;
            let om_mu = u_bar / (2.0 * mu_hat) * s_st;
            let k_tilde = (pp.p_knu
                - pp.p_kmu * mu_tilde_s
                - pp.p_ku.dot(&(&u_tilde_t + &u_tilde_s)))
                / pp.p_kk;
            let arg = -2.0 * c6 * s_ss * mu_hat;
            let rho_tilde = if arg >= 0.0 { -arg.sqrt() } else { f64::NAN };

            let d = rd.d_matrix();
            let rho_kk = -2.0 * (&d * &v_s).dot(&p_s);
            let om_kk = -pp.p_kk / pp.p_lambda;

            let expansion = Expansion {
                u_tilde_s: u_tilde_s.iter().cloned().collect(),
                mu_tilde_s,
                omega_tilde_s: om_s,
                u_bar_t: u_bar,
                u_tilde_t: u_tilde_t.iter().cloned().collect(),
                mu_hat,
                omega_tilde_mu: om_mu,
                k_tilde,
                rho_tilde,
                u_hat_s_computed: false,
            };
            let curvature = Curvature {
                rho_kk_star: rho_kk,
                omega_kk_star: om_kk,
            };
            (
                v_s.iter().cloned().collect::<Vec<f64>>(),
                p_s.iter().cloned().collect::<Vec<f64>>(),
                v_t.iter().cloned().collect::<Vec<f64>>(),
                p_t.iter().cloned().collect::<Vec<f64>>(),
                expansion,
                curvature,
                Some(s_st),
                flipped,
            )
        }
    };

    // --- audit
    let (c6_star, s_ss_star) = {
        let fold = FoldPoint {
            mu_s: mu_star,
            u_s: u_star.to_vec(),
            v_s: v_s.clone(),
            p_s: p_s.clone(),
            nu: nu_star,
        };
        fold_brackets(model, &fold)?
    };
    push(&mut audit, "fold_mu_transversality", c6_star, c6_star > DEGENERATE_TOL);
    push(&mut audit, "fold_quadratic", s_ss_star, s_ss_star < -DEGENERATE_TOL);
    push(
        &mut audit,
        "fold_orientation_flipped",
        if flipped { 1.0 } else { 0.0 },
        true,
    );
    push(
        &mut audit,
        "homogeneous_curvature",
        curvature.rho_kk_star,
        curvature.rho_kk_star < -DEGENERATE_TOL,
    );
    push(
        &mut audit,
        "turing_curvature",
        curvature.omega_kk_star,
        curvature.omega_kk_star < -DEGENERATE_TOL,
    );
    push(
        &mut audit,
        "tangency_curvature",
        expansion.mu_hat,
        expansion.mu_hat > DEGENERATE_TOL,
    );
    push(
        &mut audit,
        "critical_growth_slope",
        expansion.omega_tilde_s,
        expansion.omega_tilde_s > DEGENERATE_TOL,
    );
    push(
        &mut audit,
        "fold_growth_slope",
        expansion.rho_tilde,
        expansion.rho_tilde < -DEGENERATE_TOL,
    );
    match view {
        ClassView::Scalar(g) => {
            let den = g.reaction.f_uu(u_star[0], mu_star) + g.gu_symbol(k_star);
            push(&mut audit, "effective_coupling", den, den < -DEGENERATE_TOL);
            let gnu = g.lin_symbol_nu(k_star);
            push(&mut audit, "nu_transversality", gnu, gnu < -DEGENERATE_TOL);
            let wp = g.well_posed(nu_star);
            push(&mut audit, "well_posed", if wp { 1.0 } else { 0.0 }, wp);
        }
        ClassView::Rd(_) => {
            let s_st = s_st_opt.unwrap();
            push(&mut audit, "cross_coupling", s_st, s_st < -DEGENERATE_TOL);
            let disp = dispersion(model, u_star, k_star, mu_star, nu_star)?;
            let im = disp.omega[0].im.abs();
            push(&mut audit, "stationary_critical_mode", im, im < 1e-8);
        }
    }
    let (worst, _worst_k) = global_margin(model, u_star, k_star, mu_star, nu_star)?;
    push(&mut audit, "global_margin", worst, worst < MARGIN_TOL);

    let audit_passed = audit.iter().all(|e| e.passed);
    Ok(TuringFoldReport {
        mu_star,
        nu_star,
        k_star,
        u_star: u_star.to_vec(),
        v_s,
        p_s,
        v_t,
        p_t,
        expansion,
        curvature,
        audit,
        audit_passed,
    })
}

// ---------------------------------------------------------------------------
// finite-offset verification of the expansion
// ---------------------------------------------------------------------------

/// Re-solve fold and Turing thresholds at offsets `ν = ν* − δ` and compare
/// with the report's local expansion: the separation `μ^t − μ^s` must follow
/// the tangency curvature `μ̂ δ²` and the critical wavenumber must follow
/// `k* + k̃ δ` to better than first order.
pub fn verify_expansion(
    model: &ModelSpec,
    report: &TuringFoldReport,
    deltas: &[f64],
) -> Result<ExpansionCheck> {
    if deltas.len() < 2 {
        return Err(Error::InvalidInput(
            "expansion verification needs at least two offsets".into(),
        ));
    }
    let ex = &report.expansion;
    let mut ratios = Vec::new();
    let mut k_errors = Vec::new();
    for &delta in deltas {
        if !(delta > 0.0) {
            return Err(Error::InvalidInput("offsets must be positive".into()));
        }
        let nu = report.nu_star - delta;
        let fold_seed_u: Vec<f64> = report
            .u_star
            .iter()
            .zip(&ex.u_tilde_s)
            .map(|(us, ts)| us + ts * delta)
            .collect();
        let fold = find_fold(
            model,
            nu,
            &fold_seed_u,
            report.mu_star + ex.mu_tilde_s * delta,
        )?;
        let turing = turing_at_offset(model, report, delta)?;
        ratios.push((turing.mu_t - fold.mu_s) / (delta * delta) / ex.mu_hat);
        k_errors.push((turing.k_c - report.k_star - ex.k_tilde * delta).abs());
    }
    let k_order = (k_errors[0].max(1e-300) / k_errors[1].max(1e-300)).ln()
        / (deltas[0] / deltas[1]).ln();
    let tangency_ok = ratios.iter().all(|r| (r - 1.0).abs() <= 0.10);
    Ok(ExpansionCheck {
        deltas: deltas.to_vec(),
        mu_hat_ratios: ratios,
        k_errors,
        k_order,
        tangency_ok,
    })
}

/// Solve the Turing threshold at `ν = ν* − δ`, seeded from the expansion.
fn turing_at_offset(
    model: &ModelSpec,
    report: &TuringFoldReport,
    delta: f64,
) -> Result<TuringPoint> {
    let ex = &report.expansion;
    let nu = report.nu_star - delta;
    let u: Vec<f64> = report
        .u_star
        .iter()
        .zip(ex.u_tilde_s.iter().zip(&ex.u_tilde_t))
        .map(|(us, (ts, tt))| us + (ts + tt) * delta)
        .collect();
    let seed = TuringSeed {
        u,
        mu: report.mu_star + ex.mu_tilde_s * delta + ex.mu_hat * delta * delta,
        k: report.k_star + ex.k_tilde * delta,
    };
    find_turing(model, nu, &seed)
}

// ---------------------------------------------------------------------------
// reduction coefficients
// ---------------------------------------------------------------------------

/// Evaluate the eight raw reduction coefficients at a located point and map
/// them to the canonical `(α, d, β)` with the five variable scalings.
///
/// Fails when a structurally required coefficient is degenerate (too close to
/// zero, or of the wrong sign to admit the canonical normalization).
pub fn ab_coefficients(report: &TuringFoldReport, model: &ModelSpec) -> Result<ABCoefficients> {
    let ex = &report.expansion;
    let cur = &report.curvature;
    let raw: [f64; 8] = match class_view(model)? {
        ClassView::Scalar(g) => {
            let (u, mu, k) = (report.u_star[0], report.mu_star, report.k_star);
            let fuu = g.reaction.f_uu(u, mu);
            let fmu = g.reaction.f_mu(u);
            let gnu = g.lin_symbol_nu(k);
            let gu = g.gu_symbol(k);
            [
                -cur.omega_kk_star / 2.0,
                -gnu,
                fuu + gu,
                -cur.rho_kk_star / 2.0,
                fmu * ex.mu_hat,
                fmu,
                fuu / 2.0,
                fuu + g.s_quad(k, k),
            ]
        }
        ClassView::Rd(rd) => {
            let u = dvec(&report.u_star);
            let v_s = dvec(&report.v_s);
            let p_s = dvec(&report.p_s);
            let v_t = dvec(&report.v_t);
            let p_t = dvec(&report.p_t);
            let c6 = rd.f_mu(&u, report.mu_star, report.nu_star).dot(&p_s);
            let s_ss = rd.f_uu(&u, &v_s, &v_s).dot(&p_s);
            let s_st = rd.f_uu(&u, &v_s, &v_t).dot(&p_t);
            let s_tt = rd.f_uu(&u, &v_t, &v_t).dot(&p_s);
            [
                -cur.omega_kk_star / 2.0,
                -ex.u_bar_t * s_st,
                s_st,
                -cur.rho_kk_star / 2.0,
                ex.mu_hat * c6,
                c6,
                s_ss / 2.0,
                s_tt,
            ]
        }
    };

    let [c1, c2, c3, c4, c5, c6, c7, _c8] = raw;
    let checks: [(&str, f64, bool); 7] = [
        ("critical diffusion c1", c1, c1 > DEGENERATE_TOL),
        ("critical growth c2", c2, c2 > DEGENERATE_TOL),
        ("cross coupling c3", c3, c3 < -DEGENERATE_TOL),
        ("homogeneous diffusion c4", c4, c4 > DEGENERATE_TOL),
        ("drive offset c5", c5, c5 > DEGENERATE_TOL),
        ("drive transversality c6", c6, c6 > DEGENERATE_TOL),
        ("fold quadratic c7", c7, c7 < -DEGENERATE_TOL),
    ];
    for (name, value, ok) in checks {
        if !ok {
            return Err(Error::NotAdmissible(format!(
                "degenerate reduction coefficient: {name} = {value:.6e}"
            )));
        }
    }

    // structural identity linking the drive and quadratic coefficients; it is
    // exact for any admissible reduction, so a violation means numerical
    // corruption upstream
    let ident = c7 * c2 * c2 / (c5 * c3 * c3);
    if (ident + 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "reduction self-consistency identity violated: {ident:.3e} instead of -1"
        )));
    }

    let alpha = c7 / c3;
    let d = c4 * c3 / (c1 * c7);
    let beta = raw[7] / c5;
    let maps = ScaleMaps {
        a: 1.0,
        b: -c2 / c3,
        xi: (c1 / c2).sqrt(),
        tau: 1.0 / c2,
        r: c5 / c6,
    };

    // verify that the scalings indeed reproduce the canonical coefficients
    let (st, sb, sxi, sr) = (maps.tau, maps.b, maps.xi, maps.r);
    let canonical = [
        st * c1 / (sxi * sxi),
        st * c2,
        st * c3 * sb,
        st * c4 / (sxi * sxi),
        (st / sb) * c5,
        -(st / sb) * c6 * sr,
        st * sb * c7,
        (st / sb) * raw[7],
    ];
    let expect = [
        1.0,
        1.0,
        -1.0,
        alpha * d,
        alpha,
        -alpha,
        -alpha,
        alpha * beta,
    ];
    for (got, want) in canonical.iter().zip(&expect) {
        if (got - want).abs() > 1e-10 * (1.0 + want.abs()) {
            return Err(Error::InvalidInput(format!(
                "scale maps fail to reproduce the canonical coefficients: \
                 {got:.12e} vs {want:.12e}"
            )));
        }
    }

    Ok(ABCoefficients {
        raw,
        alpha,
        d,
        beta,
        scale_maps: maps,
    })
}

// ---------------------------------------------------------------------------
// Landau coefficient of the pattern branch
// ---------------------------------------------------------------------------

/// Cubic Landau coefficient of the stationary pattern branch at the Turing
/// threshold for `ν = ν* − δ`, Richardson-extrapolated from offsets `δ` and
/// `δ/2` to remove the leading finite-offset error.
///
/// Errors when `δ` is outside `(0, 0.3]`, when a harmonic of the critical
/// mode is resonant, or when the extrapolated sign contradicts the sign of
/// `β` (an admissible reduction has subcritical patterns exactly when the
/// fold side is supercritical, and vice versa).
pub fn landau_coefficient(
    report: &TuringFoldReport,
    model: &ModelSpec,
    delta: f64,
) -> Result<Landau> {
    if !(delta > 0.0 && delta <= 0.3) {
        return Err(Error::InvalidInput(format!(
            "offset delta = {delta} outside the supported range (0, 0.3]"
        )));
    }
    let beta = ab_coefficients(report, model)?.beta;
    let l1 = landau_at_offset(report, model, delta)?;
    let l2 = landau_at_offset(report, model, delta / 2.0)?;
    let l_star = delta * (l2 - l1);
    let sign_consistent = if beta.abs() < 1e-6 {
        None
    } else if l_star * beta > 0.0 {
        return Err(Error::NotAdmissible(format!(
            "pattern-branch criticality contradicts the reduction: \
             extrapolated Landau coefficient {l_star:.6e} has the same sign as beta = {beta:.6e}"
        )));
    } else {
        Some(true)
    };
    Ok(Landau {
        delta,
        l_delta: l1,
        l_star,
        sign_consistent,
    })
}

fn landau_at_offset(report: &TuringFoldReport, model: &ModelSpec, delta: f64) -> Result<f64> {
    let tp = turing_at_offset(model, report, delta)?;
    let nu = report.nu_star - delta;
    match class_view(model)? {
        ClassView::Scalar(g) => {
            let (u, mu, k) = (tp.u_t[0], tp.mu_t, tp.k_c);
            let fuu = g.reaction.f_uu(u, mu);
            let fuuu = g.reaction.f_uuu(u, mu);
            let om0 = g.omega(u, 0.0, mu, nu);
            let om2 = g.omega(u, 2.0 * k, mu, nu);
            if om0 >= -1e-12 || om2 >= -1e-12 {
                return Err(Error::NotAdmissible(format!(
                    "resonant harmonic at offset {delta}: growth rates {om0:.3e} (mean) \
                     and {om2:.3e} (second harmonic) must be negative"
                )));
            }
            let x02 = -(fuu + g.s_quad(k, k)) / om0;
            let x22 = -(fuu + g.s_quad(k, k)) / (2.0 * om2);
            Ok(0.5 * fuuu + (fuu + g.s_quad(k, 0.0)) * x02 + (fuu + g.s_quad(2.0 * k, k)) * x22)
        }
        ClassView::Rd(rd) => {
            let u = dvec(&tp.u_t);
            let (mu, k) = (tp.mu_t, tp.k_c);
            let t_c = rd.t_matrix(&u, k, mu, nu);
            let (v, p, _smin, ratio) = null_pair(&t_c)?;
            if ratio < NULLITY_RATIO {
                return Err(Error::NotAdmissible(
                    "critical mode is not simple at the offset Turing threshold".into(),
                ));
            }
            let (mut v, mut p) = biorthonormalize(v, p, "Turing threshold")?;
            orient_largest_positive(&mut v, &mut p);
            let quad = rd.f_uu(&u, &v, &v);
            let j0 = rd.f_u(&u, mu, nu);
            let x0 = j0.lu().solve(&(-&quad)).ok_or_else(|| {
                Error::NotAdmissible(
                    "resonant mean mode: the homogeneous linearization is singular \
                     at the offset Turing threshold"
                        .into(),
                )
            })?;
            let t2 = rd.t_matrix(&u, 2.0 * k, mu, nu);
            let x2 = t2.lu().solve(&(quad.scale(-0.5))).ok_or_else(|| {
                Error::NotAdmissible(
                    "resonant second harmonic at the offset Turing threshold".into(),
                )
            })?;
            let secular =
                rd.f_uu(&u, &v, &x0) + rd.f_uu(&u, &v, &x2) + rd.f_uuu(&v, &v, &v).scale(0.5);
            Ok(secular.dot(&p))
        }
    }
}

// ---------------------------------------------------------------------------
// seed suggestion for scalar families
// ---------------------------------------------------------------------------

/// Suggest `(nu_seed, mu_seed)` inside the wedge of a scalar model's
/// Turing-fold point by locating a fold of the reaction and bracketing the
/// spatial parameter at which the critical symbol maximum crosses zero.
pub fn suggest_codim2_seed(model: &ModelSpec) -> Result<(f64, f64)> {
    let g = model.as_scalar()?;
    let r = g.reaction;

    // fold candidates from a deterministic seed grid
    let res = move |x: &DVector<f64>| DVector::from_vec(vec![r.f(x[0], x[1]), r.f_u(x[0], x[1])]);
    let jac = move |x: &DVector<f64>| {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                r.f_u(x[0], x[1]),
                r.f_mu(x[0]),
                r.f_uu(x[0], x[1]),
                r.f_umu(x[0]),
            ],
        )
    };
    let mut fold: Option<(f64, f64)> = None;
    'outer: for &u0 in &[0.5_f64, 1.0, 1.5, 2.0, 0.25, -0.5, -1.0] {
        for &mu0 in &[0.0_f64, -0.5, -1.0, 0.5] {
            let x0 = DVector::from_vec(vec![u0, mu0]);
            if let Ok(x) = newton_damped(&res, &jac, &x0, SCALAR_TOL, 60, "fold scan") {
                let (u, mu) = (x[0], x[1]);
                if r.f_uu(u, mu).abs() > 1e-6 && r.f_mu(u).abs() > 1e-6 {
                    fold = Some((u, mu));
                    break 'outer;
                }
            }
        }
    }
    let (u_f, mu_f) = fold.ok_or_else(|| {
        Error::NotAdmissible("no non-degenerate fold found in the reaction".into())
    })?;

    // largest growth rate of the spatial symbol at the fold state
    let g2 = g.clone();
    let psi = move |nu: f64| -> f64 {
        let sym = |k: f64| g2.lin_symbol(k, nu) + u_f * g2.gu_symbol(k);
        let mut best = f64::NEG_INFINITY;
        let mut best_k = 0.0;
        for i in 1..=300 {
            let k = 6.0 * i as f64 / 300.0;
            let v = sym(k);
            if v > best {
                best = v;
                best_k = k;
            }
        }
        let (_, refined) = golden_max(&sym, (best_k - 0.05).max(1e-4), best_k + 0.05, 1e-10);
        refined.max(best)
    };

    // bracket the spatial parameter at which the maximum crosses zero
    let grid = [-8.0_f64, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0];
    let vals: Vec<Option<f64>> = grid
        .iter()
        .map(|&nu| if g.well_posed(nu) { Some(psi(nu)) } else { None })
        .collect();
    // a grid point may land exactly on the crossing; take it directly
    let exact = grid
        .iter()
        .zip(&vals)
        .find(|(_, v)| matches!(v, Some(x) if x.abs() <= 1e-9))
        .map(|(&nu, _)| nu);
    let nu_star_est = match exact {
        Some(nu) => nu,
        None => {
            let mut bracket = None;
            for i in 0..grid.len() - 1 {
                if let (Some(a), Some(b)) = (vals[i], vals[i + 1]) {
                    if a * b < 0.0 {
                        bracket = Some((grid[i], grid[i + 1]));
                        break;
                    }
                }
            }
            let (lo, hi) = bracket.ok_or_else(|| {
                Error::NotAdmissible(
                    "the critical symbol maximum does not change sign over the scanned \
                     spatial-parameter range"
                        .into(),
                )
            })?;
            bisect(&psi, lo, hi, 1e-10, "critical symbol crossing")?
        }
    };
    Ok((
        nu_star_est - 0.03 * (1.0 + nu_star_est.abs()),
        mu_f + 0.05 * (1.0 + mu_f.abs()),
    ))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{BTerm, CubicReaction, ScalarSixthOrder};
    use approx::assert_relative_eq;

    fn models_dir() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("..")
            .join("..")
            .join("models")
    }

    fn example_model(nu: f64, eta: f64) -> ModelSpec {
        ModelSpec::Scalar6(ScalarSixthOrder::new(0.0, nu, eta, 0.0))
    }

    fn coupled_model() -> ModelSpec {
        ModelSpec::from_json_file(&models_dir().join("rd_coupled3.json")).unwrap()
    }

    /// Closed-form Turing threshold of the example model at a given `nu`:
    /// `k_c² = (4 + √(16 − 12ν))/6`, `G_c = G(k_c; ν)`, and the threshold
    /// state solves `F_u(u) = −G_c` on the upper branch.
    fn example_turing_closed_form(nu: f64) -> (f64, f64, f64) {
        let kc2 = (4.0 + (16.0_f64 - 12.0 * nu).sqrt()) / 6.0;
        let kc = kc2.sqrt();
        let gc = -nu * kc2 + 2.0 * kc2 * kc2 - kc2 * kc2 * kc2;
        let y = (-1.0 + (1.0_f64 + 2.0 * gc).sqrt()) / 2.0;
        let u = 1.0 + y;
        let mu = u * u - 2.0 * u;
        (mu, u, kc)
    }

    #[test]
    fn fold_of_example_reaction() {
        let model = example_model(0.4, 2.0);
        let fp = find_fold(&model, 0.4, &[1.3], -0.9).unwrap();
        assert_relative_eq!(fp.mu_s, -1.0, max_relative = 1e-10);
        assert_relative_eq!(fp.u_s[0], 1.0, max_relative = 1e-10);
        assert_eq!(fp.v_s, vec![1.0]);
        assert_eq!(fp.p_s, vec![1.0]);
    }

    #[test]
    fn turing_threshold_of_example_matches_closed_form() {
        for nu in [0.4, 0.9, 0.99] {
            let model = example_model(nu, 2.0);
            let (mu_ref, u_ref, k_ref) = example_turing_closed_form(nu);
            let seed = TuringSeed {
                u: vec![u_ref + 0.01],
                mu: mu_ref + 0.001,
                k: k_ref + 0.02,
            };
            let tp = find_turing(&model, nu, &seed).unwrap();
            assert_relative_eq!(tp.mu_t, mu_ref, epsilon = 1e-10);
            assert_relative_eq!(tp.u_t[0], u_ref, epsilon = 1e-10);
            assert_relative_eq!(tp.k_c, k_ref, epsilon = 1e-10);
        }
        // frozen reference values for the drive thresholds
        let frozen = [
            (0.4, -0.9293355006702194),
            (0.9, -0.9976174757967663),
            (0.99, -0.9999751242211672),
        ];
        for (nu, mu_frozen) in frozen {
            let (mu_ref, _, _) = example_turing_closed_form(nu);
            assert_relative_eq!(mu_ref, mu_frozen, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_turing_threshold_beyond_the_crossing() {
        let model = example_model(1.2, 2.0);
        let seed = TuringSeed {
            u: vec![1.1],
            mu: -0.95,
            k: 1.0,
        };
        assert!(find_turing(&model, 1.2, &seed).is_err());
    }

    #[test]
    fn locate_example_point_and_expansion() {
        let model = example_model(0.9, 2.0);
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        assert_relative_eq!(rep.mu_star, -1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.nu_star, 1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.k_star, 1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.u_star[0], 1.0, epsilon = 1e-9);
        let ex = &rep.expansion;
        assert_relative_eq!(ex.u_tilde_t[0], 0.5, epsilon = 1e-8);
        assert_relative_eq!(ex.mu_hat, 0.25, epsilon = 1e-8);
        assert_relative_eq!(ex.omega_tilde_mu, -2.0, epsilon = 1e-8);
        assert_relative_eq!(ex.k_tilde, 0.25, epsilon = 1e-8);
        assert_relative_eq!(ex.omega_tilde_s, 1.0, epsilon = 1e-8);
        assert_relative_eq!(ex.rho_tilde, -1.0, epsilon = 1e-8);
        assert_eq!(ex.mu_tilde_s, 0.0);
        assert!(!ex.u_hat_s_computed);
        assert_relative_eq!(rep.curvature.rho_kk_star, -2.0, epsilon = 1e-9);
        assert_relative_eq!(rep.curvature.omega_kk_star, -8.0, epsilon = 1e-8);
        assert!(rep.audit_passed, "audit: {:?}", rep.audit);
    }

    #[test]
    fn locate_extended_model_point() {
        let model = ModelSpec::from_json_file(&models_dir().join("extended.json")).unwrap();
        let rep = locate_turing_fold(&model, 1.3, -0.9).unwrap();
        assert_relative_eq!(rep.mu_star, -1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.nu_star, 1.4, epsilon = 1e-9);
        assert_relative_eq!(rep.k_star, 1.0, epsilon = 1e-9);
        assert_relative_eq!(rep.u_star[0], 1.0, epsilon = 1e-9);
        let ex = &rep.expansion;
        assert_relative_eq!(ex.u_tilde_t[0], 0.625, epsilon = 1e-8);
        assert_relative_eq!(ex.mu_hat, 1.0 / 2.56, epsilon = 1e-8);
        assert_relative_eq!(ex.k_tilde, 1.0 / 3.2, epsilon = 1e-8);
        let ab = ab_coefficients(&rep, &model).unwrap();
        assert_relative_eq!(ab.alpha, 0.625, epsilon = 1e-9);
        assert_relative_eq!(ab.d, 0.4, epsilon = 1e-9);
        assert_relative_eq!(ab.beta, 3.584, epsilon = 1e-8);
    }

    #[test]
    fn reduction_of_example_model() {
        let model = example_model(0.9, 2.0);
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        let ab = ab_coefficients(&rep, &model).unwrap();
        let want_raw = [4.0, 1.0, -2.0, 1.0, 0.25, 1.0, -1.0, 2.0];
        for (got, want) in ab.raw.iter().zip(&want_raw) {
            assert_relative_eq!(got, want, epsilon = 1e-8);
        }
        assert_relative_eq!(ab.alpha, 0.5, epsilon = 1e-9);
        assert_relative_eq!(ab.d, 0.5, epsilon = 1e-9);
        assert_relative_eq!(ab.beta, 8.0, epsilon = 1e-8);
        let m = &ab.scale_maps;
        assert_relative_eq!(m.a, 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.b, 0.5, epsilon = 1e-9);
        assert_relative_eq!(m.xi, 2.0, epsilon = 1e-9);
        assert_relative_eq!(m.tau, 1.0, epsilon = 1e-9);
        assert_relative_eq!(m.r, 0.25, epsilon = 1e-9);
    }

    #[test]
    fn canonical_map_matches_closed_form_in_eta() {
        // the independent closed form for the example family:
        // (alpha, d, beta) = (1/2, 1/2, 8(eta - 1))
        for eta in [2.0, 3.0, 0.5, -1.0] {
            let model = example_model(0.9, eta);
            let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
            let ab = ab_coefficients(&rep, &model).unwrap();
            assert_relative_eq!(ab.alpha, 0.5, epsilon = 1e-9);
            assert_relative_eq!(ab.d, 0.5, epsilon = 1e-9);
            assert_relative_eq!(ab.beta, 8.0 * (eta - 1.0), epsilon = 1e-7);
        }
    }

    #[test]
    fn locate_coupled_system_matches_reference() {
        let model = coupled_model();
        let rep = locate_turing_fold(&model, -0.23, 0.28).unwrap();
        assert_relative_eq!(rep.mu_star, 0.3, epsilon = 1e-8);
        assert_relative_eq!(rep.nu_star, -0.2, epsilon = 1e-8);
        assert_relative_eq!(rep.k_star, 1.0, epsilon = 1e-8);
        let u_ref = [0.2, -0.1, 0.3];
        for (g, w) in rep.u_star.iter().zip(&u_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-8);
        }
        let vs_ref = [
            0.57735026918962566,
            0.57735026918962583,
            -0.5773502691896258,
        ];
        let ps_ref = [3.4641016151377574, 1.7320508075688793, 3.4641016151377589];
        let vt_ref = [
            0.57735026918962592,
            -0.57735026918962572,
            0.57735026918962566,
        ];
        let pt_ref = [0.0, 0.34641016151377549, 2.0784609690826531];
        for (g, w) in rep.v_s.iter().zip(&vs_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-7);
        }
        for (g, w) in rep.p_s.iter().zip(&ps_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-6);
        }
        for (g, w) in rep.v_t.iter().zip(&vt_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-7);
        }
        for (g, w) in rep.p_t.iter().zip(&pt_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-6);
        }
        let ex = &rep.expansion;
        assert_relative_eq!(ex.mu_tilde_s, -1.0, epsilon = 1e-7);
        let uts_ref = [
            0.15277777777777789,
            -1.1805555555555549,
            0.51388888888888826,
        ];
        for (g, w) in ex.u_tilde_s.iter().zip(&uts_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-6);
        }
        assert_relative_eq!(ex.omega_tilde_s, 1.5344444444444435, epsilon = 1e-7);
        assert_relative_eq!(ex.mu_hat, 1.8394685570987619, epsilon = 1e-7);
        assert_relative_eq!(ex.u_bar_t, 3.32216967396197, epsilon = 1e-6);
        let utt_ref = [
            1.9180555555555543,
            1.9180555555555548,
            -1.9180555555555547,
        ];
        for (g, w) in ex.u_tilde_t.iter().zip(&utt_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-6);
        }
        assert_relative_eq!(ex.omega_tilde_mu, -0.41708906589428005, epsilon = 1e-6);
        assert_relative_eq!(ex.k_tilde, 0.11280381944444513, epsilon = 1e-5);
        assert_relative_eq!(rep.curvature.rho_kk_star, -8.0, epsilon = 1e-8);
        assert_relative_eq!(rep.curvature.omega_kk_star, -3.84, epsilon = 1e-6);
        assert!(rep.audit_passed, "audit: {:?}", rep.audit);
    }

    #[test]
    fn coupled_system_thresholds_at_offsets_match_reference() {
        let model = coupled_model();
        // offset 0.01 (nu = -0.21)
        let fp = find_fold(&model, -0.21, &[0.201, -0.112, 0.306], 0.29).unwrap();
        assert_relative_eq!(fp.mu_s, 0.28997027115646411, epsilon = 1e-8);
        let uf_ref = [
            0.20136271128842418,
            -0.11243438519656524,
            0.30561964757559527,
        ];
        for (g, w) in fp.u_s.iter().zip(&uf_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-7);
        }
        let tp = find_turing(
            &model,
            -0.21,
            &TuringSeed {
                u: vec![0.22, -0.093, 0.286],
                mu: 0.2901,
                k: 1.0,
            },
        )
        .unwrap();
        assert_relative_eq!(tp.mu_t, 0.29014911843895121, epsilon = 1e-8);
        assert_relative_eq!(tp.k_c, 1.0009112528601896, epsilon = 1e-7);
        let ut_ref = [
            0.22000321201725708,
            -0.092953973531634620,
            0.28640351037116022,
        ];
        for (g, w) in tp.u_t.iter().zip(&ut_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-7);
        }
        // offset 0.001 (nu = -0.201)
        let fp = find_fold(&model, -0.201, &[0.2, -0.101, 0.3], 0.299).unwrap();
        assert_relative_eq!(fp.mu_s, 0.29899972225083134, epsilon = 1e-8);
        let tp = find_turing(
            &model,
            -0.201,
            &TuringSeed {
                u: vec![0.202, -0.0993, 0.2986],
                mu: 0.2990,
                k: 1.0,
            },
        )
        .unwrap();
        assert_relative_eq!(tp.mu_t, 0.29900155588978272, epsilon = 1e-8);
        assert_relative_eq!(tp.k_c, 1.0001104988377702, epsilon = 1e-7);
    }

    #[test]
    fn reduction_of_coupled_system_matches_reference() {
        let model = coupled_model();
        let rep = locate_turing_fold(&model, -0.23, 0.28).unwrap();
        let ab = ab_coefficients(&rep, &model).unwrap();
        let c_ref = [
            1.92,
            1.5344444444444435,
            -0.46188021535170056,
            4.0,
            6.3721059996409415,
            3.4641016151377575,
            -0.57735026918962572,
            1.1547005383792545,
        ];
        for (g, w) in ab.raw.iter().zip(&c_ref) {
            assert_relative_eq!(g, w, max_relative = 1e-6);
        }
        assert_relative_eq!(ab.alpha, 1.25, epsilon = 1e-7);
        assert_relative_eq!(ab.d, 1.6666666666666673, epsilon = 1e-6);
        assert_relative_eq!(ab.beta, 0.18121175925892007, epsilon = 1e-6);
        let m = &ab.scale_maps;
        assert_relative_eq!(m.b, 3.32216967396197, max_relative = 1e-6);
        assert_relative_eq!(m.r, 1.8394685570987619, max_relative = 1e-6);
        assert_relative_eq!(m.tau, 1.0 / 1.5344444444444435, max_relative = 1e-6);
        assert_relative_eq!(m.xi, 1.0 / 0.89397416898633816, max_relative = 1e-6);
    }

    #[test]
    fn identical_copies_make_a_degenerate_fold() {
        let model =
            ModelSpec::from_json_file(&models_dir().join("rd_decoupled3.json")).unwrap();
        let err = find_fold(&model, 0.5, &[1.3, 1.3, 1.3], -0.9).unwrap_err();
        assert!(
            matches!(err, Error::NotAdmissible(_) | Error::NoConvergence { .. }),
            "unexpected error: {err}"
        );
    }

    #[test]
    fn shifted_decoupled_fold_is_simple() {
        let text = r#"{
            "type": "rd",
            "n": 3,
            "diffusion": [1.0, 2.0, 3.0],
            "reaction": {
                "type": "polynomial",
                "f0": [0.0, 0.0, 0.0],
                "linear": [[0.0, 0.0, 0.0], [0.0, -0.7, 0.0], [0.0, 0.0, -1.5]],
                "mu_const": [0.0, 0.0, 0.0],
                "mu_linear": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                "nu_const": [0.0, 0.0, 0.0],
                "nu_linear": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
                "quadratic": [
                    [[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
                    [[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]],
                    [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0]]
                ],
                "cubic_diag": [-1.0, -1.0, -1.0]
            },
            "seeds": [[1.0, 0.0, 0.0]]
        }"#;
        let model = ModelSpec::from_json_str(text).unwrap();
        let fp = find_fold(&model, 0.5, &[1.2, 0.1, 0.05], -0.9).unwrap();
        assert_relative_eq!(fp.mu_s, -1.0, epsilon = 1e-9);
        let u_ref = [1.0, 0.0, 0.0];
        for (g, w) in fp.u_s.iter().zip(&u_ref) {
            assert_relative_eq!(g, w, epsilon = 1e-8);
        }
        assert_relative_eq!(fp.v_s[0], 1.0, epsilon = 1e-8);
        assert!(fp.v_s[1].abs() < 1e-8 && fp.v_s[2].abs() < 1e-8);
        let pv: f64 = fp.p_s.iter().zip(&fp.v_s).map(|(p, v)| p * v).sum();
        assert_relative_eq!(pv, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn landau_of_example_model() {
        let model = example_model(0.9, 2.0);
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        let landau = landau_coefficient(&rep, &model, 0.01).unwrap();
        assert!(
            (landau.l_star + 4.0).abs() < 0.04,
            "l_star = {}",
            landau.l_star
        );
        assert_eq!(landau.sign_consistent, Some(true));
        // the per-offset coefficient diverges like -4/delta
        assert!((landau.l_delta * 0.01 + 4.0).abs() < 0.1);
    }

    #[test]
    fn landau_sign_is_indeterminate_for_vanishing_beta() {
        let model = example_model(0.9, 1.0);
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        let landau = landau_coefficient(&rep, &model, 0.01).unwrap();
        assert!(landau.sign_consistent.is_none());
        assert!(landau.l_star.abs() < 0.05, "l_star = {}", landau.l_star);
    }

    #[test]
    fn landau_of_model_without_spatial_quadratics() {
        let model = ModelSpec::ScalarGeneral(GeneralScalarModel {
            m: 3,
            a: vec![0.0, 2.0, 1.0],
            a_tilde: vec![-1.0, 0.0, 0.0],
            b: vec![],
            reaction: CubicReaction::example(),
        });
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        let ab = ab_coefficients(&rep, &model).unwrap();
        assert_relative_eq!(ab.beta, -8.0, epsilon = 1e-8);
        let landau = landau_coefficient(&rep, &model, 0.01).unwrap();
        assert!(
            (landau.l_star - 4.0).abs() < 0.04,
            "l_star = {}",
            landau.l_star
        );
        assert_eq!(landau.sign_consistent, Some(true));
    }

    #[test]
    fn landau_of_coupled_system_matches_reference() {
        let model = coupled_model();
        let rep = locate_turing_fold(&model, -0.23, 0.28).unwrap();
        let landau = landau_coefficient(&rep, &model, 0.01).unwrap();
        assert!(
            (landau.l_star - (-0.13902968863142692)).abs() < 2e-3,
            "l_star = {}",
            landau.l_star
        );
        assert_eq!(landau.sign_consistent, Some(true));
    }

    #[test]
    fn landau_rejects_out_of_range_offsets() {
        let model = example_model(0.9, 2.0);
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        assert!(landau_coefficient(&rep, &model, 0.5).is_err());
        assert!(landau_coefficient(&rep, &model, 0.0).is_err());
        assert!(landau_coefficient(&rep, &model, -0.1).is_err());
    }

    #[test]
    fn expansion_verifies_at_finite_offsets() {
        let model = example_model(0.9, 2.0);
        let rep = locate_turing_fold(&model, 0.9, -0.9).unwrap();
        let chk = verify_expansion(&model, &rep, &[1e-2, 5e-3]).unwrap();
        assert!(chk.tangency_ok, "ratios: {:?}", chk.mu_hat_ratios);
        assert!(chk.k_order >= 1.8, "k order {}", chk.k_order);

        let model = coupled_model();
        let rep = locate_turing_fold(&model, -0.23, 0.28).unwrap();
        let chk = verify_expansion(&model, &rep, &[1e-2, 5e-3]).unwrap();
        assert!(chk.tangency_ok, "ratios: {:?}", chk.mu_hat_ratios);
        assert!(chk.k_order >= 1.8, "k order {}", chk.k_order);
    }

    #[test]
    fn pattern_criticality_opposes_beta_for_random_models() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 5 && attempts < 40 {
            attempts += 1;
            let p2 = 1.5 + 1.5 * rng.gen::<f64>();
            let eta = -1.0 + 4.0 * rng.gen::<f64>();
            let model = ModelSpec::ScalarGeneral(GeneralScalarModel {
                m: 3,
                a: vec![0.0, 2.0, 1.0],
                a_tilde: vec![-1.0, 0.0, 0.0],
                b: vec![BTerm {
                    j: 1,
                    l: 1,
                    coeff: eta,
                }],
                reaction: CubicReaction {
                    p: [0.0, 0.0, p2, -1.0],
                    q: [0.0, 1.0, 0.0, 0.0],
                },
            });
            let Ok((nu_seed, mu_seed)) = suggest_codim2_seed(&model) else {
                continue;
            };
            let Ok(rep) = locate_turing_fold(&model, nu_seed, mu_seed) else {
                continue;
            };
            let Ok(ab) = ab_coefficients(&rep, &model) else {
                continue;
            };
            if ab.beta.abs() <= 0.1 {
                continue;
            }
            // landau_coefficient errors out when the signs agree
            let landau = landau_coefficient(&rep, &model, 0.01).unwrap();
            assert_eq!(landau.sign_consistent, Some(true));
            checked += 1;
        }
        assert!(checked >= 5, "only {checked} random models checked");
    }

    #[test]
    fn seed_suggestion_brackets_the_example_crossing() {
        let model = example_model(0.9, 2.0);
        let (nu_seed, mu_seed) = suggest_codim2_seed(&model).unwrap();
        // the crossing sits at nu = 1; the seed must land inside the wedge
        assert!((nu_seed - 0.94).abs() < 0.02, "nu_seed = {nu_seed}");
        assert!(mu_seed > -1.0, "mu_seed = {mu_seed}");
        let rep = locate_turing_fold(&model, nu_seed, mu_seed).unwrap();
        assert_relative_eq!(rep.nu_star, 1.0, epsilon = 1e-8);
    }
}
