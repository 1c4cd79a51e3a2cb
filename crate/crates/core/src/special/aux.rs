//! Olver's auxiliary functions E and M and the root c of Ai = Bi.

use super::airy::{airy_eval, airy_scaled_positive};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// E(x), M(x) at the abscissa `at`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxValue {
    pub e: f64,
    pub m: f64,
    pub at: f64,
}

static ROOT_C: OnceLock<f64> = OnceLock::new();

/// The negative root of Ai(x) = Bi(x) closest to the origin, found once by
/// bisection on (−1, 0).
pub fn root_c() -> f64 {
    *ROOT_C.get_or_init(|| {
        let h = |x: f64| {
            let v = airy_eval(x).expect("in range");
            v.ai - v.bi
        };
        let (mut a, mut b) = (-1.0_f64, 0.0_f64);
        let ha = h(a);
        debug_assert!(ha > 0.0 && h(b) < 0.0);
        while b - a > 1e-15 {
            let m = 0.5 * (a + b);
            if (h(m) > 0.0) == (ha > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    })
}

pub fn auxiliary_eval(x: f64) -> AuxValue {
    let c = root_c();
    if x <= c {
        let v = airy_eval(x.max(-1.0e3)).expect("in range");
        return AuxValue { e: 1.0, m: v.ai.hypot(v.bi), at: x };
    }
    if x <= 0.0 {
        let v = airy_eval(x).expect("in range");
        return AuxValue { e: (v.bi / v.ai).sqrt(), m: (2.0 * v.ai * v.bi).sqrt(), at: x };
    }
    // scaled values keep both products finite for large x
    let s = airy_scaled_positive(x);
    let z = 2.0 / 3.0 * x.powf(1.5);
    AuxValue { e: (s.bi / s.ai).sqrt() * z.exp(), m: (2.0 * s.ai * s.bi).sqrt(), at: x }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_is_a_crossing_in_the_unit_interval() {
        let c = root_c();
        assert!(c > -1.0 && c < 0.0);
        let v = airy_eval(c).unwrap();
        assert!((v.ai - v.bi).abs() < 1e-12);
    }

    #[test]
    fn e_is_one_left_of_c_and_m_is_continuous() {
        let c = root_c();
        for x in [-30.0, -3.0, c - 1e-3, c] {
            assert_eq!(auxiliary_eval(x).e, 1.0);
        }
        let l = auxiliary_eval(c).m;
        let r = auxiliary_eval(c + 1e-12).m;
        assert!((l - r).abs() < 1e-10);
    }

    #[test]
    fn large_positive_arguments_stay_finite() {
        let a = auxiliary_eval(400.0);
        assert!(a.m.is_finite() && a.m > 0.0);
        // M² ~ 1/(π√x)
        let want = (1.0 / (std::f64::consts::PI * 20.0)).sqrt();
        assert!((a.m - want).abs() / want < 1e-3);
    }
}
