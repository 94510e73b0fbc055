//! Analytic layer for the canonical two-field amplitude system
//!
//! ```text
//!       A_τ = A_ξξ + A − A·B
//! (1/α) B_τ = d·B_ξξ + 1 − R − B² + β|A|²
//! ```
//!
//! with α, d > 0 and β ∈ ℝ: the K-parameterized plane-wave family, its
//! existence and stability boundaries in the (K, R)-plane, the 3×3 spectral
//! problem for perturbations of a plane wave, a closed-form classifier with a
//! brute-force spectral cross-check, Busse-balloon rasters, and the
//! small-amplitude Eckhaus ratio.

use crate::numerics::{cubic_roots, golden_max};
use crate::{Error, Result};
use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Half-width (in R) of the band around a stability boundary inside which a
/// classification is flagged as boundary-ambiguous.
pub const BOUNDARY_WARN_BAND: f64 = 1e-6;
/// Growth-rate tolerance for the spectral scans.
const SCAN_TOL: f64 = 1e-9;
/// Curvature tolerance for the long-wave (sideband) branch test.
const SIDEBAND_CURV_TOL: f64 = 1e-6;
/// Upper end of the perturbation-wavenumber scan; the finite-wavenumber
/// instability of a wave with |K| < 1 always lies below k = √2.
const SCAN_K_MAX: f64 = 3.0;
/// Flat scan resolution used by `classify`.
const SCAN_POINTS: usize = 2000;

/// Coefficients of the canonical amplitude system, with the bifurcation
/// parameter R.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CanonicalAB {
    pub alpha: f64,
    pub d: f64,
    pub beta: f64,
    pub r: f64,
}

impl CanonicalAB {
    /// Construct with the sign requirements α > 0, d > 0 enforced.
    pub fn new(alpha: f64, d: f64, beta: f64, r: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "relaxation rate alpha must be positive and finite (got {alpha})"
            )));
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "diffusion ratio d must be positive and finite (got {d})"
            )));
        }
        if !beta.is_finite() || !r.is_finite() {
            return Err(Error::InvalidInput(
                "coupling beta and drive level R must be finite".into(),
            ));
        }
        Ok(Self { alpha, d, beta, r })
    }
}

/// Which solution family a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    HomogeneousPlus,
    HomogeneousMinus,
    Periodic,
}

/// A steady solution (Ā e^{iKξ}, B̄) of the amplitude system.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlaneWaveState {
    /// Modulation wavenumber K of the underlying pattern.
    pub k_mod: f64,
    /// Drive level R at which the state was computed.
    pub r: f64,
    /// Amplitude Ā ≥ 0.
    pub a_bar: f64,
    /// Base level B̄.
    pub b_bar: f64,
    pub branch: Branch,
}

/// The periodic plane wave at modulation wavenumber K, or `None` where the
/// squared amplitude would be negative (the state does not exist).
pub fn plane_wave(ab: &CanonicalAB, k_mod: f64) -> Result<Option<PlaneWaveState>> {
    if ab.beta == 0.0 {
        return Err(Error::NotAdmissible(
            "beta = 0 leaves the plane-wave amplitude undetermined; the \
             existence problem is degenerate"
                .into(),
        ));
    }
    let b_bar = 1.0 - k_mod * k_mod;
    let a_sq = (b_bar * b_bar + ab.r - 1.0) / ab.beta;
    if a_sq < 0.0 {
        return Ok(None);
    }
    Ok(Some(PlaneWaveState {
        k_mod,
        r: ab.r,
        a_bar: a_sq.sqrt(),
        b_bar,
        branch: Branch::Periodic,
    }))
}

/// The two homogeneous rest states (Ā = 0, B̄ = ±√(1−R)); empty when R > 1.
pub fn homogeneous_waves(ab: &CanonicalAB) -> Vec<PlaneWaveState> {
    if ab.r > 1.0 {
        return Vec::new();
    }
    let s = (1.0 - ab.r).sqrt();
    [(Branch::HomogeneousPlus, s), (Branch::HomogeneousMinus, -s)]
        .into_iter()
        .map(|(branch, b_bar)| PlaneWaveState {
            k_mod: 0.0,
            r: ab.r,
            a_bar: 0.0,
            b_bar,
            branch,
        })
        .collect()
}

/// Growth rates (λ_A, λ_B) of decoupled perturbations of a homogeneous rest
/// state at perturbation wavenumber k:
/// λ_A = 1 ∓ √(1−R) − k² and λ_B = ∓2α√(1−R) − dαk².
pub fn homogeneous_spectra(ab: &CanonicalAB, branch: Branch, k: f64) -> Result<(f64, f64)> {
    if ab.r > 1.0 {
        return Err(Error::NotAdmissible(format!(
            "homogeneous rest states require R <= 1 (got R = {})",
            ab.r
        )));
    }
    let s = match branch {
        Branch::HomogeneousPlus => (1.0 - ab.r).sqrt(),
        Branch::HomogeneousMinus => -(1.0 - ab.r).sqrt(),
        Branch::Periodic => {
            return Err(Error::InvalidInput(
                "homogeneous_spectra applies to the rest states, not the \
                 periodic branch"
                    .into(),
            ))
        }
    };
    let lam_a = 1.0 - s - k * k;
    let lam_b = ab.alpha * (-2.0 * s - ab.d * k * k);
    Ok((lam_a, lam_b))
}

/// Maximal steady-equation residual of a state: how far (Ā e^{iKξ}, B̄) is
/// from solving the amplitude system exactly.
pub fn plane_wave_residual(ab: &CanonicalAB, wave: &PlaneWaveState) -> f64 {
    let res_a = wave.a_bar * (1.0 - wave.k_mod * wave.k_mod - wave.b_bar);
    let res_b = 1.0 - wave.r - wave.b_bar * wave.b_bar + ab.beta * wave.a_bar * wave.a_bar;
    res_a.abs().max(res_b.abs())
}

/// Existence and stability boundaries at a fixed modulation wavenumber K.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryCurves {
    /// Existence boundary R_e(K) = 1 − (1−K²)².
    pub r_e: f64,
    /// Sideband (long-wave) boundary R_s(K) = 6K² − 5K⁴.
    pub r_s: f64,
    /// Finite-wavenumber boundary R_t(K) = 1 + (1+(2d−1)K²)²/(2d) − (1−K²)²,
    /// defined only where K² > 1/(2d+1).
    pub r_t: Option<f64>,
}

/// Evaluate all boundary curves at modulation wavenumber K.
pub fn boundary_curves(ab: &CanonicalAB, k_mod: f64) -> BoundaryCurves {
    let k2 = k_mod * k_mod;
    let om = 1.0 - k2;
    let r_e = 1.0 - om * om;
    let r_s = 6.0 * k2 - 5.0 * k2 * k2;
    let r_t = if k2 > 1.0 / (2.0 * ab.d + 1.0) {
        let q = 1.0 + (2.0 * ab.d - 1.0) * k2;
        Some(1.0 + q * q / (2.0 * ab.d) - om * om)
    } else {
        None
    };
    BoundaryCurves { r_e, r_s, r_t }
}

/// The tangency point (K_st, R_st) where the finite-wavenumber boundary
/// touches the sideband boundary: K_st = 1/√(2d+1), R_st = (12d+1)/(2d+1)².
pub fn sideband_turing_tangency(ab: &CanonicalAB) -> (f64, f64) {
    let q = 2.0 * ab.d + 1.0;
    (1.0 / q.sqrt(), (12.0 * ab.d + 1.0) / (q * q))
}

/// Critical perturbation wavenumber of the finite-wavenumber instability:
/// k_c² = ((2d+1)K² − 1)/d, defined where K² > 1/(2d+1).
pub fn critical_wavenumber(ab: &CanonicalAB, k_mod: f64) -> Option<f64> {
    let k2 = k_mod * k_mod;
    let kc2 = ((2.0 * ab.d + 1.0) * k2 - 1.0) / ab.d;
    (kc2 > 0.0).then(|| kc2.sqrt())
}

// ---------------------------------------------------------------------------
// spectral problem
// ---------------------------------------------------------------------------

/// The 3×3 matrix 𝒜(k) of the linearization about a periodic plane wave, in
/// the (Re a, Im a, b) perturbation variables at perturbation wavenumber k:
///
/// ```text
/// | 1−K²−B̄−k²   −2ikK        −Ā          |
/// | 2ikK         1−K²−B̄−k²   0           |
/// | 2αβĀ         0            −2αB̄−dαk²  |
/// ```
pub fn spectral_matrix(ab: &CanonicalAB, wave: &PlaneWaveState, k: f64) -> Matrix3<Complex64> {
    debug_assert!(
        wave.branch == Branch::Periodic,
        "spectral_matrix expects the periodic branch"
    );
    let sig = 1.0 - wave.k_mod * wave.k_mod - wave.b_bar;
    let diag = Complex64::new(sig - k * k, 0.0);
    let cross = Complex64::new(0.0, 2.0 * k * wave.k_mod);
    let zero = Complex64::new(0.0, 0.0);
    Matrix3::new(
        diag,
        -cross,
        Complex64::new(-wave.a_bar, 0.0),
        cross,
        diag,
        zero,
        Complex64::new(2.0 * ab.alpha * ab.beta * wave.a_bar, 0.0),
        zero,
        Complex64::new(-ab.alpha * (2.0 * wave.b_bar + ab.d * k * k), 0.0),
    )
}

/// Closed form for det 𝒜(k) on the periodic branch:
/// −αk²[(2B̄ + dk²)(k² − 4K²) + 2βĀ²].
pub fn spectral_det_closed_form(ab: &CanonicalAB, wave: &PlaneWaveState, k: f64) -> f64 {
    let k2 = k * k;
    -ab.alpha
        * k2
        * ((2.0 * wave.b_bar + ab.d * k2) * (k2 - 4.0 * wave.k_mod * wave.k_mod)
            + 2.0 * ab.beta * wave.a_bar * wave.a_bar)
}

/// All three eigenvalues of 𝒜(k). The matrix is similar (via diag(1, i, 1))
/// to a real matrix, so the characteristic cubic has real coefficients and is
/// solved in closed form.
pub fn spectral_eigenvalues(ab: &CanonicalAB, wave: &PlaneWaveState, k: f64) -> [Complex64; 3] {
    let sig = 1.0 - wave.k_mod * wave.k_mod - wave.b_bar;
    let m11 = sig - k * k;
    let m12 = 2.0 * k * wave.k_mod;
    let m13 = -wave.a_bar;
    let m31 = 2.0 * ab.alpha * ab.beta * wave.a_bar;
    let m33 = -ab.alpha * (2.0 * wave.b_bar + ab.d * k * k);
    // real similar matrix [[m11, m12, m13], [m12, m11, 0], [m31, 0, m33]]
    let tr = 2.0 * m11 + m33;
    let minors = (m11 * m11 - m12 * m12) + (m11 * m33 - m13 * m31) + m11 * m33;
    let det = m33 * (m11 * m11 - m12 * m12) - m13 * m11 * m31;
    cubic_roots(
        Complex64::new(-tr, 0.0),
        Complex64::new(minors, 0.0),
        Complex64::new(-det, 0.0),
    )
}

/// Largest real part among the eigenvalues of 𝒜(k).
fn max_growth_at(ab: &CanonicalAB, wave: &PlaneWaveState, k: f64) -> f64 {
    spectral_eigenvalues(ab, wave, k)
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

/// Stability verdict for a plane wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    Nonexistent,
    Stable,
    OdeUnstable,
    SidebandUnstable,
    TuringUnstable,
}

impl StabilityClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityClass::Nonexistent => "nonexistent",
            StabilityClass::Stable => "stable",
            StabilityClass::OdeUnstable => "ode_unstable",
            StabilityClass::SidebandUnstable => "sideband_unstable",
            StabilityClass::TuringUnstable => "turing_unstable",
        }
    }
}

/// Full classification result for one (K, R) point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub class: StabilityClass,
    /// Maximum over the scanned k of the largest eigenvalue real part
    /// (NaN for a nonexistent state).
    pub max_growth: f64,
    /// The k attaining `max_growth` (NaN for a nonexistent state).
    pub k_critical: f64,
    pub boundaries: BoundaryCurves,
    /// Set when R lies within `BOUNDARY_WARN_BAND` of a boundary curve, where
    /// the closed-form label is ambiguous at working precision.
    pub boundary_warning: Option<String>,
}

/// Closed-form decision procedure, in precedence order: nonexistent,
/// ODE-unstable (β < 0 or |K| ≥ 1), sideband-unstable (R < R_s),
/// finite-wavenumber-unstable (K² > 1/(2d+1) and R < R_t), else stable.
fn closed_form_class(ab: &CanonicalAB, k_mod: f64, bounds: &BoundaryCurves) -> StabilityClass {
    let exists = if ab.beta > 0.0 {
        ab.r >= bounds.r_e
    } else {
        ab.r <= bounds.r_e
    };
    if !exists {
        return StabilityClass::Nonexistent;
    }
    if ab.beta < 0.0 || k_mod.abs() >= 1.0 {
        return StabilityClass::OdeUnstable;
    }
    if ab.r < bounds.r_s {
        return StabilityClass::SidebandUnstable;
    }
    if let Some(r_t) = bounds.r_t {
        if ab.r < r_t {
            return StabilityClass::TuringUnstable;
        }
    }
    StabilityClass::Stable
}

fn boundary_warning(ab: &CanonicalAB, bounds: &BoundaryCurves) -> Option<String> {
    let mut near = Vec::new();
    if (ab.r - bounds.r_e).abs() < BOUNDARY_WARN_BAND {
        near.push("existence");
    }
    if (ab.r - bounds.r_s).abs() < BOUNDARY_WARN_BAND {
        near.push("sideband");
    }
    if let Some(r_t) = bounds.r_t {
        if (ab.r - r_t).abs() < BOUNDARY_WARN_BAND {
            near.push("finite-wavenumber");
        }
    }
    if near.is_empty() {
        None
    } else {
        Some(format!(
            "R lies within {BOUNDARY_WARN_BAND:.0e} of the {} boundary; the \
             label is ambiguous at working precision",
            near.join(" and ")
        ))
    }
}

/// Classify the plane wave at modulation wavenumber K: closed-form class,
/// plus a flat 2000-point eigenvalue scan filling `max_growth`/`k_critical`
/// as a cross-check.
pub fn classify(ab: &CanonicalAB, k_mod: f64) -> Result<StabilityReport> {
    let bounds = boundary_curves(ab, k_mod);
    let wave = plane_wave(ab, k_mod)?;
    let class = closed_form_class(ab, k_mod, &bounds);
    let (max_growth, k_critical) = match &wave {
        None => (f64::NAN, f64::NAN),
        Some(w) => {
            let mut best = (f64::NEG_INFINITY, 0.0);
            for j in 0..=SCAN_POINTS {
                let k = SCAN_K_MAX * j as f64 / SCAN_POINTS as f64;
                let g = max_growth_at(ab, w, k);
                if g > best.0 {
                    best = (g, k);
                }
            }
            best
        }
    };
    Ok(StabilityReport {
        class,
        max_growth,
        k_critical,
        boundaries: bounds,
        boundary_warning: boundary_warning(ab, &bounds),
    })
}

/// Classify from the spectrum alone, never consulting the boundary formulas:
/// existence from the amplitude sign, the ODE case from the eigenvalues of
/// 𝒜(0) (structural zero removed), the sideband case from the curvature of
/// the neutral branch at k = 0, and the finite-wavenumber case from a
/// two-stage scan (coarse grid plus local refinement). Used to cross-check
/// the closed-form classifier.
pub fn classify_scan_only(
    ab: &CanonicalAB,
    k_mod: f64,
    n_coarse: usize,
) -> Result<StabilityClass> {
    if ab.beta == 0.0 {
        return Err(Error::NotAdmissible(
            "beta = 0 leaves the plane-wave amplitude undetermined; the \
             existence problem is degenerate"
                .into(),
        ));
    }
    let wave = match plane_wave(ab, k_mod)? {
        None => return Ok(StabilityClass::Nonexistent),
        Some(w) => w,
    };
    // ODE modes: drop the translational zero, test the remaining pair
    let eigs0 = spectral_eigenvalues(ab, &wave, 0.0);
    let zero_idx = (0..3)
        .min_by(|&i, &j| eigs0[i].norm().partial_cmp(&eigs0[j].norm()).unwrap())
        .unwrap();
    let ode_growth = (0..3)
        .filter(|&i| i != zero_idx)
        .map(|i| eigs0[i].re)
        .fold(f64::NEG_INFINITY, f64::max);
    if ode_growth > SCAN_TOL {
        return Ok(StabilityClass::OdeUnstable);
    }
    // long-wave branch curvature λ₀(k) ≈ c₂k², Richardson-extrapolated
    let neutral_re = |k: f64| -> f64 {
        let eigs = spectral_eigenvalues(ab, &wave, k);
        eigs.iter()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap()
            .re
    };
    let h = 1e-3;
    let c2 = (4.0 * neutral_re(h) / (h * h) - neutral_re(2.0 * h) / (4.0 * h * h)) / 3.0;
    if c2 > SIDEBAND_CURV_TOL {
        return Ok(StabilityClass::SidebandUnstable);
    }
    // finite-wavenumber scan: coarse grid, then refine around the best cell
    let n = n_coarse.max(16);
    let dk = SCAN_K_MAX / n as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 1..=n {
        let k = dk * j as f64;
        let g = max_growth_at(ab, &wave, k);
        if g > best.0 {
            best = (g, k);
        }
    }
    let lo = (best.1 - dk).max(1e-6);
    let hi = (best.1 + dk).min(SCAN_K_MAX);
    let (_, refined) = golden_max(|k| max_growth_at(ab, &wave, k), lo, hi, 1e-8);
    if refined.max(best.0) > SCAN_TOL {
        return Ok(StabilityClass::TuringUnstable);
    }
    Ok(StabilityClass::Stable)
}

// ---------------------------------------------------------------------------
// Busse-balloon raster
// ---------------------------------------------------------------------------

/// Which boundary curve forms the lower edge of the stable region at a given
/// modulation wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnsetCurve {
    Sideband,
    FiniteWavenumber,
}

/// Lower edge of the stable region in one K-column of the raster.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StableOnset {
    pub k_mod: f64,
    pub r_onset: f64,
    pub curve: OnsetCurve,
}

/// Classification raster over a (K, R) window at fixed (α, d, β).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BusseMap {
    pub alpha: f64,
    pub d: f64,
    pub beta: f64,
    pub k_values: Vec<f64>,
    pub r_values: Vec<f64>,
    /// Row-major classes: entry `ri * k_values.len() + ki`.
    pub classes: Vec<StabilityClass>,
    /// Scan-based classes in the same layout, when requested.
    pub scan_classes: Option<Vec<StabilityClass>>,
    /// Lower boundary of the stable region per K-column with |K| < 1
    /// (empty when β ≤ 0: no stable region). The vertical edges K = ±1
    /// complete the boundary.
    pub stable_onset: Vec<StableOnset>,
}

/// Rasterize the (K, R) window. `with_scan` additionally classifies every
/// cell from the spectrum alone (coarse 240-point scan plus refinement) for
/// cross-checking.
pub fn busse_map(
    alpha: f64,
    d: f64,
    beta: f64,
    k_range: (f64, f64),
    r_range: (f64, f64),
    nk: usize,
    nr: usize,
    with_scan: bool,
) -> Result<BusseMap> {
    if nk < 2 || nr < 2 {
        return Err(Error::InvalidInput(format!(
            "raster resolution must be at least 2x2 (got {nk}x{nr})"
        )));
    }
    if !(k_range.1 > k_range.0) || !(r_range.1 > r_range.0) {
        return Err(Error::InvalidInput(
            "raster ranges must be increasing intervals".into(),
        ));
    }
    CanonicalAB::new(alpha, d, beta, r_range.0)?;
    let k_values: Vec<f64> = (0..nk)
        .map(|i| k_range.0 + (k_range.1 - k_range.0) * i as f64 / (nk - 1) as f64)
        .collect();
    let r_values: Vec<f64> = (0..nr)
        .map(|i| r_range.0 + (r_range.1 - r_range.0) * i as f64 / (nr - 1) as f64)
        .collect();
    let mut classes = Vec::with_capacity(nk * nr);
    let mut scan_classes = with_scan.then(|| Vec::with_capacity(nk * nr));
    for &r in &r_values {
        for &k_mod in &k_values {
            let ab = CanonicalAB {
                alpha,
                d,
                beta,
                r,
            };
            let bounds = boundary_curves(&ab, k_mod);
            classes.push(closed_form_class(&ab, k_mod, &bounds));
            if let Some(sc) = scan_classes.as_mut() {
                sc.push(classify_scan_only(&ab, k_mod, 240)?);
            }
        }
    }
    let mut stable_onset = Vec::new();
    if beta > 0.0 {
        for &k_mod in &k_values {
            if k_mod.abs() >= 1.0 {
                continue;
            }
            let ab = CanonicalAB {
                alpha,
                d,
                beta,
                r: 0.0,
            };
            let bounds = boundary_curves(&ab, k_mod);
            let (r_onset, curve) = match bounds.r_t {
                Some(r_t) if r_t > bounds.r_s => (r_t, OnsetCurve::FiniteWavenumber),
                _ => (bounds.r_s, OnsetCurve::Sideband),
            };
            stable_onset.push(StableOnset {
                k_mod,
                r_onset,
                curve,
            });
        }
    }
    Ok(BusseMap {
        alpha,
        d,
        beta,
        k_values,
        r_values,
        classes,
        scan_classes,
        stable_onset,
    })
}

// ---------------------------------------------------------------------------
// Eckhaus ratio
// ---------------------------------------------------------------------------

/// Ratio K_s(R)/K_e(R) of the sideband-stable band width to the existence
/// band width at small drive R, computed in cancellation-free form
/// K_e² = R/(1+√(1−R)), K_s² = R/(3+√(9−5R)); tends to 1/√3 as R → 0.
pub fn eckhaus_ratio(_ab: &CanonicalAB, r_small: f64) -> Result<f64> {
    if !(r_small > 0.0 && r_small < 1.0) {
        return Err(Error::InvalidInput(format!(
            "the band-width ratio is defined for 0 < R < 1 (got {r_small})"
        )));
    }
    let ke2 = r_small / (1.0 + (1.0 - r_small).sqrt());
    let ks2 = r_small / (3.0 + (9.0 - 5.0 * r_small).sqrt());
    Ok((ks2 / ke2).sqrt())
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
