use std::f64::consts::PI;

/// `h_0(t), …, h_n(t)` for the time-frequency normalisation
/// `h_k(t) = 2^{1/4} (2^k k!)^{-1/2} H_k(√(2π) t) e^{-π t²}`, each of unit
/// `L²(ℝ)` norm.
pub fn hermite_functions(n: usize, t: f64) -> Vec<f64> {
    let u = (2.0 * PI).sqrt() * t;
    let scale = (2.0 * PI).powf(0.25);
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    out.push(scale * cur);
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * u * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(scale * cur);
    }
    out
}

/// The Hermite function of order `r`, used as an STFT window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteWindow {
    pub order: usize,
}

impl HermiteWindow {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn eval(&self, t: f64) -> f64 {
        hermite_functions(self.order, t)[self.order]
    }
}
