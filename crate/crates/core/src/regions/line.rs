use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A finite union of closed intervals, stored sorted and merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    prefix: Vec<f64>,
}

impl TryFrom<Vec<(f64, f64)>> for IntervalUnion {
    type Error = crate::Error;
    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IntervalUnion> for Vec<(f64, f64)> {
    fn from(u: IntervalUnion) -> Self {
        u.intervals
    }
}

impl IntervalUnion {
    pub fn new(mut raw: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &raw {
            if !a.is_finite() || !b.is_finite() {
                return domain("interval endpoints must be finite (region must be bounded)");
            }
            if !(b > a) {
                return domain(format!("interval [{a}, {b}] must have end > start"));
            }
        }
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self::from_sorted(merged))
    }

    fn from_sorted(intervals: Vec<(f64, f64)>) -> Self {
        let mut prefix = Vec::with_capacity(intervals.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &(a, b) in &intervals {
            acc += b - a;
            prefix.push(acc);
        }
        Self { intervals, prefix }
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        *self.prefix.last().unwrap()
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self::from_sorted(self.intervals.iter().map(|&(a, b)| (a + c, b + c)).collect())
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return domain("scale factor must be positive");
        }
        Ok(Self::from_sorted(self.intervals.iter().map(|&(a, b)| (a * s, b * s)).collect()))
    }

    /// `|Ω ∩ [t, t + len]|` in `O(log n)`.
    pub fn coverage(&self, t: f64, len: f64) -> f64 {
        let end = t + len;
        let lo = self.intervals.partition_point(|iv| iv.1 <= t);
        let hi = self.intervals.partition_point(|iv| iv.0 < end);
        if lo >= hi {
            return 0.0;
        }
        let mut s = self.prefix[hi] - self.prefix[lo];
        s -= (t - self.intervals[lo].0).max(0.0);
        s -= (self.intervals[hi - 1].1 - end).max(0.0);
        s.max(0.0)
    }

    /// Window start positions where `t ↦ coverage(t, len)` can change slope.
    fn breakpoints(&self, len: f64) -> impl Iterator<Item = f64> + '_ {
        self.intervals
            .iter()
            .flat_map(move |&(a, b)| [a, b, a - len, b - len])
    }

    /// `sup_t |Ω ∩ [t, t+len]|`, attained at a breakpoint of the piecewise
    /// linear coverage function.
    pub fn max_coverage(&self, len: f64) -> f64 {
        self.breakpoints(len).map(|t| self.coverage(t, len)).fold(0.0, f64::max)
    }
}

/// `ρ_ℝ(Ω, W) = |W| sup_t |Ω ∩ [t, t + 1/W]|`, exact.
pub fn rho_line(omega: &IntervalUnion, w: f64) -> Result<f64> {
    if !(w.abs() > 0.0) || !w.is_finite() {
        return domain(format!("bandwidth W must be finite and nonzero, got {w}"));
    }
    if omega.intervals.iter().any(|&(a, b)| !a.is_finite() || !b.is_finite()) {
        return domain("region must be bounded");
    }
    Ok(w.abs() * omega.max_coverage(1.0 / w.abs()))
}

/// Sliding-window supremum on a circle of circumference `period`.
///
/// `omega` must lie in `[0, period)`. Windows of length `≥ period` see the whole
/// set.
pub fn max_window_coverage_periodic(omega: &IntervalUnion, period: f64, len: f64) -> f64 {
    if len >= period {
        return omega.measure();
    }
    let unrolled = IntervalUnion::new(
        omega
            .intervals
            .iter()
            .flat_map(|&(a, b)| [(a, b), (a + period, b + period)])
            .collect(),
    )
    .expect("shifted copies of valid intervals are valid");
    omega
        .breakpoints(len)
        .map(|t| t.rem_euclid(period))
        .map(|t| unrolled.coverage(t, len))
        .fold(0.0, f64::max)
}

/// Density of an index set `Ω ⊂ Z_N` seen by a band of `band` consecutive
/// frequencies: each index is the unit cell `[i, i+1)`, the window is `N/band`
/// samples long, and the result is `(band/N) · max coverage` on the circle.
pub fn discrete_density(indices: &[usize], n: usize, band: usize) -> Result<f64> {
    if n == 0 || band == 0 || band > n {
        return domain(format!("need 0 < band <= N, got band={band}, N={n}"));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return domain(format!("index {bad} outside 0..{n}"));
    }
    if indices.is_empty() {
        return Ok(0.0);
    }
    let cells = IntervalUnion::new(indices.iter().map(|&i| (i as f64, i as f64 + 1.0)).collect())?;
    let len = n as f64 / band as f64;
    Ok(band as f64 / n as f64 * max_window_coverage_periodic(&cells, n as f64, len))
}

/// A finite positive measure on the unit circle `[0, 1)`: point masses plus a
/// piecewise-constant density.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PeriodicMeasure {
    /// `(position, mass)` pairs.
    #[serde(default)]
    pub points: Vec<(f64, f64)>,
    /// `(start, end, height)` with `0 ≤ start < end ≤ 1`.
    #[serde(default)]
    pub density: Vec<(f64, f64, f64)>,
}

/// Slack for deciding whether a point mass sits inside a closed window edge.
const EDGE_SLACK: f64 = 1e-12;

impl PeriodicMeasure {
    pub fn lebesgue() -> Self {
        Self { points: Vec::new(), density: vec![(0.0, 1.0, 1.0)] }
    }

    pub fn validate(&self) -> Result<()> {
        for &(p, m) in &self.points {
            if !(0.0..1.0).contains(&p) || !(m >= 0.0) || !m.is_finite() {
                return domain(format!("bad point mass ({p}, {m})"));
            }
        }
        for &(a, b, h) in &self.density {
            if !(0.0 <= a && a < b && b <= 1.0) || !(h >= 0.0) || !h.is_finite() {
                return domain(format!("bad density piece ({a}, {b}, {h})"));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum::<f64>()
            + self.density.iter().map(|&(a, b, h)| (b - a) * h).sum::<f64>()
    }

    /// `μ([t, t + δ])` for the periodised measure, window closed.
    pub fn window_mass(&self, t: f64, delta: f64) -> f64 {
        let t = t.rem_euclid(1.0);
        let mut s = 0.0;
        for &(p, m) in &self.points {
            let d = (p - t).rem_euclid(1.0);
            if d <= delta + EDGE_SLACK || d >= 1.0 - EDGE_SLACK {
                s += m;
            }
        }
        for &(a, b, h) in &self.density {
            for shift in [0.0, 1.0] {
                let lo = (a + shift).max(t);
                let hi = (b + shift).min(t + delta);
                if hi > lo {
                    s += h * (hi - lo);
                }
            }
        }
        s
    }

    /// `sup_α μ([α, α + δ])`, evaluated over the breakpoint set of the window
    /// mass function.
    pub fn max_window_mass(&self, delta: f64) -> f64 {
        if delta >= 1.0 {
            return self.total_mass();
        }
        let mut candidates = Vec::new();
        for &(p, _) in &self.points {
            candidates.extend([p, p - delta]);
        }
        for &(a, b, _) in &self.density {
            candidates.extend([a, b, a - delta, b - delta]);
        }
        candidates.into_iter().map(|t| self.window_mass(t, delta)).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_window_interval() {
        for w in [0.5, 1.0, 3.0, 8.0] {
            let omega = IntervalUnion::new(vec![(0.0, 0.5 / w)]).unwrap();
            assert!((rho_line(&omega, w).unwrap() - 0.5).abs() < 1e-15);
            let full = IntervalUnion::new(vec![(2.25, 2.25 + 1.0 / w)]).unwrap();
            assert!((rho_line(&full, w).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_intervals_against_scan() {
        let omega = IntervalUnion::new(vec![(0.0, 0.3), (0.8, 1.1)]).unwrap();
        let exact = rho_line(&omega, 1.0).unwrap();
        // brute-force scan over 1e5 window positions
        let scan = (0..100_000)
            .map(|i| omega.coverage(-1.5 + 3.0 * i as f64 / 99_999.0, 1.0))
            .fold(0.0, f64::max);
        assert!((exact - 0.5).abs() < 1e-15);
        assert!(exact >= scan - 1e-12 && exact - scan < 1e-4);
    }

    #[test]
    fn merging_and_errors() {
        let u = IntervalUnion::new(vec![(1.0, 2.0), (0.0, 1.0), (1.5, 3.0)]).unwrap();
        assert_eq!(u.intervals(), &[(0.0, 3.0)]);
        assert!(IntervalUnion::new(vec![(0.0, f64::INFINITY)]).is_err());
        assert!(IntervalUnion::new(vec![(1.0, 1.0)]).is_err());
        assert!(rho_line(&u, 0.0).is_err());
        assert_eq!(rho_line(&IntervalUnion::empty(), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn discrete_density_examples() {
        // 4 equispaced samples out of 128 with 8 frequencies: 16-sample windows hold one
        assert!((discrete_density(&[0, 32, 64, 96], 128, 8).unwrap() - 0.0625).abs() < 1e-15);
        // wrap-around: cells 126, 127, 0, 1 are adjacent on the circle
        assert!((discrete_density(&[126, 127, 0, 1], 128, 8).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(discrete_density(&[], 128, 8).unwrap(), 0.0);
        assert!((discrete_density(&(0..128).collect::<Vec<_>>(), 128, 8).unwrap() - 1.0).abs() < 1e-15);
        assert!(discrete_density(&[200], 128, 8).is_err());
    }

    #[test]
    fn periodic_measure_windows() {
        let leb = PeriodicMeasure::lebesgue();
        assert!((leb.max_window_mass(0.1) - 0.1).abs() < 1e-15);
        let pm = PeriodicMeasure { points: vec![(0.0, 2.0), (0.95, 1.0), (0.5, 0.5)], density: vec![] };
        // window [0.95, 1.05] wraps and catches both 0.95 and 0.0
        assert!((pm.max_window_mass(0.1) - 3.0).abs() < 1e-15);
        assert!((pm.max_window_mass(0.01) - 2.0).abs() < 1e-15);
        assert!(pm.validate().is_ok());
        assert!(PeriodicMeasure { points: vec![(1.0, 1.0)], density: vec![] }.validate().is_err());
    }

    fn dyadic_union() -> impl Strategy<Value = IntervalUnion> {
        prop::collection::vec((0i32..256, 1i32..32), 1..8).prop_map(|v| {
            IntervalUnion::new(v.into_iter().map(|(a, l)| (a as f64 / 64.0, (a + l) as f64 / 64.0)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn translation_invariance(u in dyadic_union(), shift in -512i32..512, w in 1u32..16) {
            let w = w as f64 / 4.0;
            let c = shift as f64 / 64.0;
            prop_assert!((rho_line(&u.shifted(c), w).unwrap() - rho_line(&u, w).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn scaling_is_dimensionless(u in dyadic_union(), w in 1u32..16) {
            let w = w as f64 / 4.0;
            let unit = u.scaled(w).unwrap();
            let a = rho_line(&u, w).unwrap();
            let b = rho_line(&unit, 1.0).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn breakpoints_dominate_scan(u in dyadic_union(), w in 1u32..16) {
            let w = w as f64 / 4.0;
            let exact = rho_line(&u, w).unwrap();
            let scan = (0..4000).map(|i| w * u.coverage(-3.0 + 8.0 * i as f64 / 3999.0, 1.0 / w)).fold(0.0, f64::max);
            prop_assert!(exact >= scan - 1e-12);
            prop_assert!(exact <= 1.0 + 1e-12);
        }

        #[test]
        fn monotone_under_inclusion(u in dyadic_union(), extra in (0i32..256, 1i32..32), w in 1u32..16) {
            let w = w as f64 / 4.0;
            let mut bigger = u.intervals().to_vec();
            bigger.push((extra.0 as f64 / 64.0, (extra.0 + extra.1) as f64 / 64.0));
            let bigger = IntervalUnion::new(bigger).unwrap();
            prop_assert!(rho_line(&bigger, w).unwrap() >= rho_line(&u, w).unwrap() - 1e-15);
        }
    }
}
