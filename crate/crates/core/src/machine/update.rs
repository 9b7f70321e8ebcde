use super::{Architecture, Variant, Weights};
use crate::error::{Error, Result};

/// Hidden activation `f_nl(u) = u + tanh(u)`.
#[inline]
pub fn f_nl(u: f64) -> f64 {
    u + u.tanh()
}

/// `sign` with `sign(0) = +1`.
#[inline]
pub fn sign(a: f64) -> f64 {
    if a < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[inline]
pub(crate) fn activate(variant: Variant, a: f64) -> f64 {
    match variant {
        Variant::Continuous => a.tanh(),
        Variant::Discrete => sign(a),
    }
}

/// Scratch space reused across steps by the trajectory loop.
#[derive(Debug, Clone, Default)]
pub(crate) struct Scratch {
    hidden: Vec<f64>,
}

/// Pre-activations `a_i` for every variable.
///
/// `window[s]` holds `h(t − T_c + s)`, i.e. the oldest field vector first.
pub(crate) fn preactivation_into(
    arch: &Architecture,
    w: &Weights,
    window: &[&[f64]],
    eta: &[f64],
    scratch: &mut Scratch,
    out: &mut [f64],
) {
    let n = out.len();
    let t_c = arch.t_c;
    debug_assert_eq!(window.len(), t_c);
    for (a, &e) in out.iter_mut().zip(eta) {
        *a = w.w0 * e;
    }
    if arch.is_single_layer() {
        for (s, row) in window.iter().enumerate() {
            let weight = w.w2[s];
            if weight == 0.0 {
                continue;
            }
            for (a, &h) in out.iter_mut().zip(row.iter()) {
                *a += weight * h;
            }
        }
        return;
    }
    scratch.hidden.resize(n, 0.0);
    for k in 0..arch.d {
        let u = &mut scratch.hidden;
        u.fill(0.0);
        for (s, row) in window.iter().enumerate() {
            let weight = w.w2[k * t_c + s];
            if weight == 0.0 {
                continue;
            }
            for (acc, &h) in u.iter_mut().zip(row.iter()) {
                *acc += weight * h;
            }
        }
        let outer = w.w1[k];
        for (a, &ui) in out.iter_mut().zip(u.iter()) {
            *a += outer * f_nl(ui);
        }
    }
}

/// One application of the update rule to every variable.
///
/// `h_window` has `T_c` rows of length `N`, oldest first (rows before the
/// start of the trajectory are zero). The same weights are applied to every
/// variable.
pub fn update(
    arch: &Architecture,
    weights: &Weights,
    h_window: &[Vec<f64>],
    eta: &[f64],
) -> Result<Vec<f64>> {
    if h_window.len() != arch.t_c {
        return Err(Error::DimensionMismatch { expected: arch.t_c, actual: h_window.len() });
    }
    let n = eta.len();
    for row in h_window {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
        }
    }
    let expected_w2 = arch.d.max(1) * arch.t_c;
    if weights.w1.len() != arch.d || weights.w2.len() != expected_w2 {
        return Err(Error::DimensionMismatch {
            expected: arch.d + expected_w2,
            actual: weights.w1.len() + weights.w2.len(),
        });
    }
    let rows: Vec<&[f64]> = h_window.iter().map(Vec::as_slice).collect();
    let mut out = vec![0.0; n];
    preactivation_into(arch, weights, &rows, eta, &mut Scratch::default(), &mut out);
    for v in out.iter_mut() {
        *v = activate(arch.variant, *v);
    }
    Ok(out)
}
