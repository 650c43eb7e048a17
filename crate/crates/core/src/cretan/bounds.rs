//! Upper bounds on `|det|` for matrices with entries of modulus at most one.

/// Hadamard's bound `n^{n/2}` always; Barba's `√(2n−1)·(n−1)^{(n−1)/2}`
/// for odd `n`; Wojtas' `2(n−1)·(n−2)^{(n−2)/2}` for `n ≡ 2 (mod 4)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetBounds {
    pub order: usize,
    pub hadamard: f64,
    pub barba: Option<f64>,
    pub wojtas: Option<f64>,
}

pub fn det_bounds(n: usize) -> DetBounds {
    assert!(n >= 1, "order must be positive");
    let exp = |base: f64, e: f64| base.powf(e);
    let nf = n as f64;
    DetBounds {
        order: n,
        hadamard: exp(nf, nf / 2.0),
        barba: (n % 2 == 1).then(|| (2.0 * nf - 1.0).sqrt() * exp(nf - 1.0, (nf - 1.0) / 2.0)),
        wojtas: (n % 4 == 2).then(|| 2.0 * (nf - 1.0) * exp(nf - 2.0, (nf - 2.0) / 2.0)),
    }
}

impl DetBounds {
    /// The tightest bound that applies at this order.
    pub fn best(&self) -> f64 {
        [Some(self.hadamard), self.barba, self.wojtas].into_iter().flatten().fold(f64::INFINITY, f64::min)
    }

    /// `ω^{n/2} / hadamard`, computed in log space.
    pub fn hadamard_ratio(&self, omega: f64) -> f64 {
        let n = self.order as f64;
        (n / 2.0 * (omega.ln() - n.ln())).exp()
    }

    /// `ω^{n/2} / barba` for odd orders, computed in log space.
    pub fn barba_ratio(&self, omega: f64) -> Option<f64> {
        let n = self.order as f64;
        (self.order % 2 == 1).then(|| {
            let log_barba = 0.5 * (2.0 * n - 1.0).ln() + (n - 1.0) / 2.0 * (n - 1.0).ln();
            (n / 2.0 * omega.ln() - log_barba).exp()
        })
    }
}
