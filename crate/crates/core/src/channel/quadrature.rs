//! Adaptive Gauss–Kronrod (7/15) quadrature for expectations over a unit-mean
//! exponential variable.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

/// Kronrod estimate and |Kronrod − Gauss| on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (value, err) = gk15(f, a, b);
    if err <= tol || (b - a) < 1e-15 {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure(format!(
            "error {err:e} above {tol:e} on [{a}, {b}] at maximum depth"
        )));
    }
    let mid = 0.5 * (a + b);
    Ok(adapt(f, a, mid, 0.5 * tol, depth + 1)? + adapt(f, mid, b, 0.5 * tol, depth + 1)?)
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let value = adapt(&f, a, b, tol, 0)?;
    if !value.is_finite() {
        return Err(Error::QuadratureFailure("non-finite integral".into()));
    }
    Ok(value)
}

/// `E[g(Z)]` for `Z ~ Exp(1)`, i.e. `∫_0^∞ g(z) e^{-z} dz`, via `z = t/(1 − t)`.
pub fn exponential_expectation<G: Fn(f64) -> f64>(g: G, tol: f64) -> Result<f64> {
    let integrand = |t: f64| {
        let s = 1.0 - t;
        let z = t / s;
        let weight = (-z).exp();
        if weight == 0.0 || !z.is_finite() {
            0.0
        } else {
            g(z) * weight / (s * s)
        }
    };
    integrate(integrand, 0.0, 1.0, tol)
}
