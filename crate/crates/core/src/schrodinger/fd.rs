//! Independent eigenvalue oracle: second-order finite differences on the
//! half-line with a parity boundary condition at 0 and Dirichlet at L,
//! Sturm-sequence bisection, and one Richardson step.

/// Symmetric tridiagonal matrix (diagonal, squared off-diagonal).
pub(crate) struct Tridiag {
    diag: Vec<f64>,
    off2: Vec<f64>,
}

impl Tridiag {
    pub fn new<W: Fn(f64) -> f64>(w: W, l: f64, intervals: usize, even: bool) -> Tridiag {
        let h = l / intervals as f64;
        let ih2 = 1.0 / (h * h);
        let first = if even { 0 } else { 1 };
        let diag: Vec<f64> = (first..intervals).map(|i| 2.0 * ih2 + w(i as f64 * h)).collect();
        let mut off2 = vec![ih2 * ih2; diag.len()];
        off2[0] = 0.0;
        if even && off2.len() > 1 {
            off2[1] = 2.0 * ih2 * ih2;
        }
        Tridiag { diag, off2 }
    }

    /// Number of eigenvalues below `e`.
    pub fn count_below(&self, e: f64) -> usize {
        let mut q = 1.0;
        let mut c = 0;
        for (a, b2) in self.diag.iter().zip(&self.off2) {
            q = a - e - if *b2 == 0.0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (a.abs() + e.abs());
            }
            if q < 0.0 {
                c += 1;
            }
        }
        c
    }

    /// The eigenvalue of 0-based index `k`, bracketed in (lo, hi).
    pub fn eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64, rtol: f64) -> Option<f64> {
        if self.count_below(lo) > k || self.count_below(hi) <= k {
            return None;
        }
        while hi - lo > rtol * hi.abs() {
            let m = 0.5 * (lo + hi);
            if m <= lo || m >= hi {
                break;
            }
            if self.count_below(m) > k {
                hi = m;
            } else {
                lo = m;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Oracle {
    pub energy: f64,
    /// Eigenvalues of the fine matrix below the shooting energy.
    pub count_below_shooting: usize,
}

/// Richardson-extrapolated eigenvalue of parity index `k`, near `e_guess`.
pub(crate) fn oracle<W: Fn(f64) -> f64 + Copy>(w: W, l: f64, even: bool, k: usize, e_guess: f64) -> Option<Oracle> {
    let h = (l / 2000.0).min(0.05 / e_guess.sqrt());
    let n1 = (l / h).ceil() as usize;
    let coarse = Tridiag::new(w, l, n1, even);
    let mut hi = 2.0 * e_guess;
    while coarse.count_below(hi) <= k {
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    let e1 = coarse.eigenvalue(k, 0.0, hi, 1e-14)?;
    let fine = Tridiag::new(w, l, 2 * n1, even);
    let e2 = fine
        .eigenvalue(k, e1 * 0.95, e1 * 1.05, 1e-14)
        .or_else(|| fine.eigenvalue(k, 0.0, hi, 1e-14))?;
    Some(Oracle { energy: (4.0 * e2 - e1) / 3.0, count_below_shooting: fine.count_below(e_guess) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_levels_by_parity() {
        let w = |x: f64| x * x;
        let even = oracle(w, 12.0, true, 1, 5.0).unwrap();
        assert!((even.energy - 5.0).abs() < 1e-6, "{}", even.energy);
        let odd = oracle(w, 12.0, false, 0, 3.0).unwrap();
        assert!((odd.energy - 3.0).abs() < 1e-6, "{}", odd.energy);
    }

    #[test]
    fn box_counts() {
        // −u″ on (0, π) with Dirichlet ends: k² for k = 1, 2, …
        let t = Tridiag::new(|_| 0.0, std::f64::consts::PI, 400, false);
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(4.5), 2);
        assert_eq!(t.count_below(9.5), 3);
    }
}
