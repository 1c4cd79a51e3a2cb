//! Airy functions Ai, Bi and their derivatives on the real line.
//!
//! Inside `|x| <= SERIES_SWITCH` the Maclaurin series is summed in
//! double-double arithmetic; outside, the standard asymptotic expansions are
//! truncated at their smallest term.

use super::dd::Dd;
use super::SpecialError;
use std::f64::consts::PI;

// Ai(0) and -Ai'(0) split into high and low words.
const C1: Dd = Dd::new(0.3550280538878172, 2.05233632436212e-17);
const C2: Dd = Dd::new(0.2588194037928068, -2.522243111610832e-17);
const SQRT3: Dd = Dd::new(1.7320508075688772, 1.0035084221806903e-16);

/// Abscissa beyond which the asymptotic expansions are used.
///
/// The series loses about `exp(2ζ)` relative to double-double round-off on the
/// positive axis while the asymptotic remainder behaves like `exp(-2ζ)`;
/// equating `2^-104 e^{2ζ}` with `e^{-2ζ}` gives ζ = 26 ln 2 ≈ 18, i.e. x ≈ 9.
pub const SERIES_SWITCH: f64 = 9.0;

/// Largest |x| accepted by [`airy_eval`].
pub const MAX_ARGUMENT: f64 = 1.0e3;

/// Ai, Bi and their first derivatives at one abscissa.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AiryValue {
    pub ai: f64,
    pub bi: f64,
    pub dai: f64,
    pub dbi: f64,
}

impl AiryValue {
    pub fn wronskian(&self) -> f64 {
        self.ai * self.dbi - self.dai * self.bi
    }
}

/// Evaluate Ai, Bi, Ai′, Bi′ at `x`.
///
/// Fails for |x| > 10³ and when Bi or Bi′ overflow (x ≳ 104).
pub fn airy_eval(x: f64) -> Result<AiryValue, SpecialError> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(SpecialError::OutOfRange { x, limit: MAX_ARGUMENT });
    }
    let v = if x.abs() <= SERIES_SWITCH {
        maclaurin(x)
    } else if x > 0.0 {
        let s = asymptotic_positive_scaled(x);
        let z = zeta(x);
        let (em, ep) = ((-z).exp(), z.exp());
        AiryValue { ai: s.ai * em, dai: s.dai * em, bi: s.bi * ep, dbi: s.dbi * ep }
    } else {
        asymptotic_negative(-x)
    };
    if !v.bi.is_finite() || !v.dbi.is_finite() {
        return Err(SpecialError::BiOverflow { x });
    }
    Ok(v)
}

/// Ai alone, for any real argument (underflows to 0 far to the right).
pub fn airy_ai(x: f64) -> f64 {
    if x.abs() <= SERIES_SWITCH {
        maclaurin(x).ai
    } else if x > 0.0 {
        if x > 120.0 {
            return 0.0;
        }
        asymptotic_positive_scaled(x).ai * (-zeta(x)).exp()
    } else {
        asymptotic_negative(-x).ai
    }
}

/// Exponentially scaled values for x > 0: `ai·e^ζ`, `dai·e^ζ`, `bi·e^{-ζ}`,
/// `dbi·e^{-ζ}` with ζ = (2/3)x^{3/2}. Never overflows.
pub fn airy_scaled_positive(x: f64) -> AiryValue {
    debug_assert!(x >= 0.0);
    if x <= SERIES_SWITCH {
        let v = maclaurin(x);
        let z = zeta(x);
        let (ep, em) = (z.exp(), (-z).exp());
        AiryValue { ai: v.ai * ep, dai: v.dai * ep, bi: v.bi * em, dbi: v.dbi * em }
    } else {
        asymptotic_positive_scaled(x)
    }
}

fn zeta(x: f64) -> f64 {
    2.0 / 3.0 * x.abs().powf(1.5)
}

/// Maclaurin series Ai = c1 f − c2 g, Bi = √3 (c1 f + c2 g).
pub(crate) fn maclaurin(x: f64) -> AiryValue {
    let xd = Dd::from_f64(x);
    let x3 = xd * xd * xd;
    // f, g and their derivatives; term recurrences in x³
    let mut f = Dd::from_f64(1.0);
    let mut g = xd;
    let mut tdf = (xd * xd).div_f64(2.0);
    let mut df = tdf;
    let mut dg = Dd::from_f64(1.0);
    let mut tf = Dd::from_f64(1.0);
    let mut tg = xd;
    let mut tdg = Dd::from_f64(1.0);
    let tiny = 1e-34;
    for k in 1..400 {
        let kf = k as f64;
        tf = (tf * x3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        tg = (tg * x3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        tdg = (tdg * x3).div_f64((3.0 * kf - 2.0) * (3.0 * kf));
        f = f + tf;
        g = g + tg;
        dg = dg + tdg;
        tdf = (tdf * x3).div_f64((3.0 * kf) * (3.0 * kf + 2.0));
        df = df + tdf;
        let scale = f.abs().hi + g.abs().hi + 1.0;
        if tf.abs().hi + tg.abs().hi + tdf.abs().hi + tdg.abs().hi < tiny * scale && kf * 3.0 > x.abs().powf(1.5) {
            break;
        }
    }
    let c1f = C1 * f;
    let c2g = C2 * g;
    let c1df = C1 * df;
    let c2dg = C2 * dg;
    AiryValue {
        ai: (c1f - c2g).to_f64(),
        bi: (SQRT3 * (c1f + c2g)).to_f64(),
        dai: (c1df - c2dg).to_f64(),
        dbi: (SQRT3 * (c1df + c2dg)).to_f64(),
    }
}

/// Coefficients u_k, v_k of the asymptotic expansions, up to the smallest
/// term at the given ζ.
fn uv_coefficients(z: f64) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    let mut prev = f64::INFINITY;
    for k in 1..200usize {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let vk = -uk * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        let size = uk.abs().max(vk.abs()) / z.powi(k as i32);
        if size > prev || size < 1e-18 {
            break;
        }
        prev = size;
        u.push(uk);
        v.push(vk);
    }
    (u, v)
}

fn asymptotic_positive_scaled(x: f64) -> AiryValue {
    let z = zeta(x);
    let (u, v) = uv_coefficients(z);
    let (mut su_alt, mut sv_alt, mut su, mut sv) = (0.0, 0.0, 0.0, 0.0);
    let mut zk = 1.0;
    for k in 0..u.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += u[k] * zk;
        sv += v[k] * zk;
        su_alt += sign * u[k] * zk;
        sv_alt += sign * v[k] * zk;
        zk /= z;
    }
    let q = x.powf(0.25);
    let rp = PI.sqrt();
    AiryValue {
        ai: su_alt / (2.0 * rp * q),
        dai: -q * sv_alt / (2.0 * rp),
        bi: su / (rp * q),
        dbi: q * sv / rp,
    }
}

fn asymptotic_negative(y: f64) -> AiryValue {
    // x = -y with y > 0
    let z = zeta(y);
    let (u, v) = uv_coefficients(z);
    let (mut p, mut q, mut r, mut s) = (0.0, 0.0, 0.0, 0.0);
    let mut zk = 1.0;
    for k in 0..u.len() {
        // (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * u[k] * zk;
            r += sign * v[k] * zk;
        } else {
            q += sign * u[k] * zk;
            s += sign * v[k] * zk;
        }
        zk /= z;
    }
    let phase = z - PI / 4.0;
    let (sn, cs) = phase.sin_cos();
    let quarter = y.powf(0.25);
    let rp = PI.sqrt();
    AiryValue {
        ai: (cs * p + sn * q) / (rp * quarter),
        bi: (-sn * p + cs * q) / (rp * quarter),
        dai: quarter * (sn * r - cs * s) / rp,
        dbi: quarter * (cs * r + sn * s) / rp,
    }
}
