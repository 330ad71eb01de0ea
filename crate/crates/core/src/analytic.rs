//! Closed-form angles and success probabilities for two-phase Grover search.
//!
//! Boundary angles are computed from the per-item amplitudes `s_w = sin α/√ñ` (on `W̃`)
//! and `s_ℓ = cos α/√(N−ñ)` (on `L̃`) projected onto the second oracle's symmetric and
//! perpendicular directions. This covers containment and general overlap alike; the
//! containment-only closed forms for `φ` and `ε` are provided separately as cross-checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{cos2, sin2, Real};
use crate::types::{clamp_probability, AngleSet, ClassSizes, PhaseSchedule, SuccessReport};

/// An angle or probability together with a flag telling whether the underlying rotation
/// stayed within `[0, π/2]` (no over-rotation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Windowed<T> {
    pub value: T,
    pub in_window: bool,
}

fn angle_slack<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0))
}

fn check_window<T: Real>(angle: T) -> Result<()> {
    let max = T::FRAC_PI_2();
    let slack = angle_slack::<T>();
    if angle.is_nan() || angle < -slack || angle > max + slack {
        return Err(Error::AngleOutOfWindow { value: angle.as_f64(), max: max.as_f64() });
    }
    Ok(())
}

fn asin_sqrt<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one()).sqrt().asin()
}

/// `(ν̃, ν)` with `sin²ν̃ = ñ/N` and `sin²ν = n/N`.
pub fn base_angles<T: Real>(sizes: &ClassSizes) -> (T, T) {
    let total = T::count(sizes.total());
    (
        asin_sqrt(T::count(sizes.n_tilde()) / total),
        asin_sqrt(T::count(sizes.n_winning()) / total),
    )
}

/// `β` with `sin²β = n_+/(n_+ + n_ℓ)`; zero when `L̃` is empty.
pub fn beta_angle<T: Real>(sizes: &ClassSizes) -> T {
    let losing_tilde = sizes.n_plus + sizes.n_ell;
    if losing_tilde == 0 {
        return T::zero();
    }
    asin_sqrt(T::count(sizes.n_plus) / T::count(losing_tilde))
}

/// First-phase angle after `k_first` Grover iterations, `(2k+1)·ν̃`.
pub fn alpha_after<T: Real>(k_first: usize, nu_tilde: T) -> Windowed<T> {
    let value = T::count(2 * k_first as u64 + 1) * nu_tilde;
    Windowed { value, in_window: value <= T::FRAC_PI_2() + angle_slack::<T>() }
}

/// Second-oracle success at the phase boundary under containment:
/// `sin²α + cos²α·n_+/(n_+ + n_ℓ)`.
pub fn p_first_phase<T: Real>(alpha: T, sizes: &ClassSizes) -> Result<T> {
    if !sizes.containment() {
        return Err(Error::ContainmentRequired { n_minus: sizes.n_minus });
    }
    check_window(alpha)?;
    let losing_tilde = sizes.n_plus + sizes.n_ell;
    let leak = if losing_tilde == 0 { T::zero() } else { T::count(sizes.n_plus) / T::count(losing_tilde) };
    clamp_probability(sin2(alpha) + cos2(alpha) * leak)
}

/// Overlaps of the phase-boundary state with `w_s`, `ℓ_s`, `w_⊥`, `ℓ_⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryProjection<T> {
    pub sym_winning: T,
    pub sym_losing: T,
    pub perp_winning: T,
    pub perp_losing: T,
}

/// Projects the symmetric first-phase state with success angle `alpha` onto the second
/// oracle's symmetric and perpendicular directions.
pub fn boundary_projection<T: Real>(alpha: T, sizes: &ClassSizes) -> Result<BoundaryProjection<T>> {
    check_window(alpha)?;
    let slack = angle_slack::<T>();
    let total = sizes.total();
    let n_tilde = sizes.n_tilde();
    let (sin_a, cos_a) = (alpha.sin(), alpha.cos());
    let s_w = if n_tilde == 0 {
        if sin_a > slack {
            return Err(Error::DegenerateGeometry("first winning set is empty but alpha > 0"));
        }
        T::zero()
    } else {
        sin_a / T::count(n_tilde).sqrt()
    };
    let s_l = if n_tilde == total {
        if cos_a > slack {
            return Err(Error::DegenerateGeometry("first losing set is empty but alpha < pi/2"));
        }
        T::zero()
    } else {
        cos_a / T::count(total - n_tilde).sqrt()
    };

    let [na, nm, np, nl] = [sizes.n_a, sizes.n_minus, sizes.n_plus, sizes.n_ell].map(T::count);
    let n = na + np;
    let losing = nm + nl;
    let diff = s_w - s_l;
    let (sym_winning, perp_winning) = if n > T::zero() {
        ((na * s_w + np * s_l) / n.sqrt(), (na * np / n).sqrt() * diff)
    } else {
        (T::zero(), T::zero())
    };
    let (sym_losing, perp_losing) = if losing > T::zero() {
        ((nm * s_w + nl * s_l) / losing.sqrt(), (nm * nl / losing).sqrt() * diff)
    } else {
        (T::zero(), T::zero())
    };
    Ok(BoundaryProjection { sym_winning, sym_losing, perp_winning, perp_losing })
}

/// Winning fraction `sin²χ` of the perpendicular direction. It depends only on the class
/// sizes: `(n_a n_+/n) / (n_a n_+/n + n_- n_ℓ/(n_- + n_ℓ))`, and is 1 when the
/// perpendicular direction has no losing part.
pub fn perpendicular_winning_fraction<T: Real>(sizes: &ClassSizes) -> T {
    let [na, nm, np, nl] = [sizes.n_a, sizes.n_minus, sizes.n_plus, sizes.n_ell].map(T::count);
    let win = if na + np > T::zero() { na * np / (na + np) } else { T::zero() };
    let lose = if nm + nl > T::zero() { nm * nl / (nm + nl) } else { T::zero() };
    if lose == T::zero() {
        T::one()
    } else {
        win / (win + lose)
    }
}

/// Angles of the phase-boundary state reached with success angle `alpha` w.r.t. the
/// first oracle. `delta` is left at zero; see [`final_probability`].
pub fn boundary_decomposition<T: Real>(alpha: T, sizes: &ClassSizes) -> Result<AngleSet<T>> {
    let proj = boundary_projection(alpha, sizes)?;
    let (nu_tilde, nu) = base_angles(sizes);
    let perp = proj.perp_winning * proj.perp_winning + proj.perp_losing * proj.perp_losing;
    Ok(AngleSet {
        nu_tilde,
        nu,
        alpha,
        beta: beta_angle(sizes),
        phi: proj.sym_winning.atan2(proj.sym_losing),
        epsilon: asin_sqrt(perp),
        chi: asin_sqrt(perpendicular_winning_fraction(sizes)),
        delta: T::zero(),
    })
}

/// Containment closed form
/// `tan φ = tan α·√(ñ(n_+ + n_ℓ)/((ñ + n_+) n_ℓ)) + √(n_+²/((ñ + n_+) n_ℓ))`.
pub fn containment_phi<T: Real>(alpha: T, sizes: &ClassSizes) -> Result<T> {
    if !sizes.containment() {
        return Err(Error::ContainmentRequired { n_minus: sizes.n_minus });
    }
    check_window(alpha)?;
    let half_pi = T::FRAC_PI_2();
    if sizes.n_ell == 0 || alpha >= half_pi {
        return Ok(half_pi);
    }
    let [nt, np, nl] = [sizes.n_tilde(), sizes.n_plus, sizes.n_ell].map(T::count);
    let tan_phi = alpha.tan() * (nt * (np + nl) / ((nt + np) * nl)).sqrt() + (np * np / ((nt + np) * nl)).sqrt();
    Ok(tan_phi.atan())
}

/// Containment closed form
/// `sin ε = √(n_+/(n_+ + ñ))·[sin α − √(ñ/(n_+ + n_ℓ))·cos α]`, returned as the signed
/// angle.
pub fn containment_epsilon<T: Real>(alpha: T, sizes: &ClassSizes) -> Result<T> {
    if !sizes.containment() {
        return Err(Error::ContainmentRequired { n_minus: sizes.n_minus });
    }
    check_window(alpha)?;
    let [nt, np, nl] = [sizes.n_tilde(), sizes.n_plus, sizes.n_ell].map(T::count);
    if np == T::zero() {
        return Ok(T::zero());
    }
    let sin_eps = (np / (np + nt)).sqrt() * (alpha.sin() - (nt / (np + nl)).sqrt() * alpha.cos());
    Ok(sin_eps.max(-T::one()).min(T::one()).asin())
}

/// Success probabilities after `j_second` Grover iterations with the second oracle,
/// starting from the boundary described by `angles`.
pub fn final_probability<T: Real>(angles: &AngleSet<T>, j_second: usize) -> Result<SuccessReport<T>> {
    let delta = T::count(2 * j_second as u64) * angles.nu;
    let rotated = angles.phi + delta;
    let (cos2_eps, sin2_eps) = (cos2(angles.epsilon), sin2(angles.epsilon));
    let p_sym = clamp_probability(sin2(rotated))?;
    let p_perp = clamp_probability(sin2(angles.chi))?;
    let p_first = clamp_probability(cos2_eps * sin2(angles.phi) + sin2_eps * p_perp)?;
    let p_final = clamp_probability(cos2_eps * p_sym + sin2_eps * p_perp)?;
    let upper_bound = success_upper_bound(p_first, angles.phi, delta)?;
    let ceiling = clamp_probability(T::one() - sin2_eps * cos2(angles.chi))?;
    Ok(SuccessReport { p_first, p_final, p_sym, p_perp, upper_bound, ceiling })
}

/// `1 − (1 − p_first)·cos²(φ + Δ)/cos²φ`: the most any strategy can reach with `Δ/(2ν)`
/// further queries from a state with success `p_first` and symmetric angle `φ`. Equals 1
/// once `φ + Δ ≥ π/2`.
pub fn success_upper_bound<T: Real>(p_first: T, phi: T, delta: T) -> Result<T> {
    let cos2_phi = cos2(phi);
    if cos2_phi <= T::epsilon() || phi + delta >= T::FRAC_PI_2() {
        return Ok(T::one());
    }
    clamp_probability(T::one() - (T::one() - p_first) * cos2(phi + delta) / cos2_phi)
}

/// Full closed-form prediction for Grover iterations in both phases.
///
/// Fails with [`Error::AngleOutOfWindow`] when the first phase over-rotates.
pub fn predict<T: Real>(sizes: &ClassSizes, schedule: PhaseSchedule) -> Result<(AngleSet<T>, SuccessReport<T>)> {
    let (nu_tilde, _) = base_angles::<T>(sizes);
    let alpha = alpha_after(schedule.k_first, nu_tilde);
    let mut angles = boundary_decomposition(alpha.value, sizes)?;
    angles.delta = T::count(2 * schedule.j_second as u64) * angles.nu;
    let report = final_probability(&angles, schedule.j_second)?;
    Ok((angles, report))
}

/// Single-oracle Grover success `sin²((2k+1)ν)`.
pub fn grover_reference_probability<T: Real>(k: usize, nu: T) -> Windowed<T> {
    let angle = alpha_after(k, nu);
    Windowed { value: sin2(angle.value), in_window: angle.in_window }
}

/// Success `sin²(φ0 + 2jν)` reached by `j` Grover iterations from a state with initial
/// success `sin²φ0`; the largest achievable value while `φ0 + 2jν ≤ π/2`.
pub fn shifted_start_bound<T: Real>(phi0: T, j: usize, nu: T) -> Result<T> {
    check_window(phi0)?;
    clamp_probability(sin2(phi0 + T::count(2 * j as u64) * nu).min(T::one()))
}
