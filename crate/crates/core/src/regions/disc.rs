use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

use super::DensityEstimate;

/// Pseudohyperbolic distance `|z - w| / |1 - z w̄|`.
pub fn pseudohyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (1.0 - z * w.conj()).norm()
}

/// Euclidean centre and radius of the pseudohyperbolic ball `B(z, R)`.
pub fn pseudo_ball_euclidean(z: Complex64, radius: f64) -> (Complex64, f64) {
    let r2 = radius * radius;
    let z2 = z.norm_sqr();
    let den = 1.0 - r2 * z2;
    (z * ((1.0 - r2) / den), radius * (1.0 - z2) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoBall {
    pub center: [f64; 2],
    pub radius: f64,
}

impl PseudoBall {
    pub fn contains(&self, w: Complex64) -> bool {
        pseudohyperbolic_distance(Complex64::new(self.center[0], self.center[1]), w) < self.radius
    }
}

/// Square lattice of cell size `h` over `[-1, 1]²`; a cell belongs to the disc
/// when its centre has modulus `< 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscGrid {
    pub cell: f64,
    pub n: usize,
}

impl DiscGrid {
    pub fn new(cell: f64) -> Result<Self> {
        if !(cell > 0.0 && cell < 1.0) {
            return domain(format!("disc raster cell must lie in (0, 1), got {cell}"));
        }
        Ok(Self { cell, n: (2.0 / cell).ceil() as usize })
    }

    pub fn coord(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * self.cell
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.coord(i), self.coord(j))
    }

    /// Cells whose centre lies in the open unit disc, as `(i, j, z)`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (0..self.n).filter_map(move |i| {
                let z = self.point(i, j);
                (z.norm_sqr() < 1.0).then_some((i, j, z))
            })
        })
    }

    fn index_range(&self, lo: f64, hi: f64) -> (usize, usize) {
        let a = ((lo + 1.0) / self.cell - 0.5).ceil().max(0.0);
        let b = ((hi + 1.0) / self.cell - 0.5).floor() + 1.0;
        let b = b.clamp(0.0, self.n as f64);
        (a.min(b) as usize, b as usize)
    }
}

/// Raster subset of the unit disc, clipped to `|z| ≤ r_max`, carrying the
/// hyperbolic cell weight `h² (1 - |z|²)^{-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscRegion {
    pub grid: DiscGrid,
    pub r_max: f64,
    mask: Vec<bool>,
}

pub const DEFAULT_R_MAX: f64 = 0.999;

impl DiscRegion {
    pub fn from_predicate(grid: DiscGrid, r_max: f64, f: impl Fn(Complex64) -> bool) -> Result<Self> {
        if !(r_max > 0.0 && r_max < 1.0) {
            return domain(format!("clip radius must lie in (0, 1), got {r_max}"));
        }
        let n = grid.n;
        let mut mask = vec![false; n * n];
        for (i, j, z) in grid.cells() {
            mask[j * n + i] = z.norm() <= r_max && f(z);
        }
        Ok(Self { grid, r_max, mask })
    }

    pub fn from_balls(cell: f64, r_max: f64, balls: &[PseudoBall]) -> Result<Self> {
        for b in balls {
            if !(b.radius > 0.0 && b.radius < 1.0) || Complex64::new(b.center[0], b.center[1]).norm() >= 1.0 {
                return domain("pseudohyperbolic balls need centre in the disc and radius in (0, 1)");
            }
        }
        Self::from_predicate(DiscGrid::new(cell)?, r_max, |z| balls.iter().any(|b| b.contains(z)))
    }

    pub fn empty(cell: f64, r_max: f64) -> Result<Self> {
        Self::from_predicate(DiscGrid::new(cell)?, r_max, |_| false)
    }

    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.grid.n + i]
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn weight(&self, z: Complex64) -> f64 {
        let h = self.grid.cell;
        h * h / (1.0 - z.norm_sqr()).powi(2)
    }

    /// `|Ω|_𝔻 = ∫_Ω (1 - |z|²)^{-2} dz`.
    pub fn hyperbolic_measure(&self) -> f64 {
        self.grid
            .cells()
            .filter(|&(i, j, _)| self.contains_cell(i, j))
            .map(|(_, _, z)| self.weight(z))
            .sum()
    }

    fn weighted_prefix(&self) -> Vec<Vec<f64>> {
        let n = self.grid.n;
        (0..n)
            .map(|j| {
                let mut p = vec![0.0; n + 1];
                for i in 0..n {
                    let w = if self.mask[j * n + i] { self.weight(self.grid.point(i, j)) } else { 0.0 };
                    p[i + 1] = p[i] + w;
                }
                p
            })
            .collect()
    }

    fn window_measure(&self, prefix: &[Vec<f64>], c: Complex64, s: f64) -> f64 {
        let (j0, j1) = self.grid.index_range(c.im - s, c.im + s);
        let mut m = 0.0;
        for j in j0..j1 {
            let dy = self.grid.coord(j) - c.im;
            let w = (s * s - dy * dy).max(0.0).sqrt();
            let (i0, i1) = self.grid.index_range(c.re - w, c.re + w);
            m += prefix[j][i1] - prefix[j][i0];
        }
        m
    }

    /// Hyperbolic weight of masked cells within half a cell diagonal of the
    /// circle `|w - c| = s`.
    fn window_edge_weight(&self, c: Complex64, s: f64) -> f64 {
        let slack = self.grid.cell * std::f64::consts::FRAC_1_SQRT_2;
        let (j0, j1) = self.grid.index_range(c.im - s - slack, c.im + s + slack);
        let (i0, i1) = self.grid.index_range(c.re - s - slack, c.re + s + slack);
        let mut m = 0.0;
        for j in j0..j1 {
            for i in i0..i1 {
                if self.contains_cell(i, j) {
                    let z = self.grid.point(i, j);
                    if ((z - c).norm() - s).abs() <= slack {
                        m += self.weight(z);
                    }
                }
            }
        }
        m
    }
}

/// `ρ_𝔻(Ω, R) = sup_z |Ω ∩ B(z, R)|_𝔻`.
///
/// Every cell centre inside the clip radius is a candidate; each ball is the
/// Euclidean disc from [`pseudo_ball_euclidean`] and is measured with row
/// prefix sums. The error estimate is the gain of the full candidate set over
/// every other candidate, plus the weight of cells straddling the best ball's
/// boundary.
pub fn rho_hyperbolic(omega: &DiscRegion, radius: f64) -> Result<DensityEstimate> {
    if !(radius > 0.0 && radius < 1.0) {
        return domain(format!("pseudohyperbolic radius must lie in (0, 1), got {radius}"));
    }
    if omega.is_empty() {
        return Ok(DensityEstimate::exact(0.0));
    }
    let prefix = omega.weighted_prefix();
    let grid = &omega.grid;
    let cands: Vec<(usize, usize, Complex64)> =
        grid.cells().filter(|(_, _, z)| z.norm() <= omega.r_max).collect();
    let scored: Vec<(f64, bool, Complex64)> = cands
        .par_iter()
        .map(|&(i, j, z)| {
            let (c, s) = pseudo_ball_euclidean(z, radius);
            (omega.window_measure(&prefix, c, s), i % 2 == 0 && j % 2 == 0, z)
        })
        .collect();
    let (best, z_best) = scored.iter().fold((0.0, Complex64::new(0.0, 0.0)), |a, &(v, _, z)| if v > a.0 { (v, z) } else { a });
    let coarse = scored.iter().filter(|s| s.1).map(|s| s.0).fold(0.0, f64::max);
    let (c, s) = pseudo_ball_euclidean(z_best, radius);
    Ok(DensityEstimate { value: best, error_estimate: (best - coarse) + omega.window_edge_weight(c, s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_ball_geometry() {
        let z = Complex64::new(0.3, -0.5);
        let (c, s) = pseudo_ball_euclidean(z, 0.4);
        for k in 0..64 {
            let th = 2.0 * PI * k as f64 / 64.0;
            let w = c + Complex64::from_polar(s, th);
            assert!((pseudohyperbolic_distance(z, w) - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn centred_ball_measure() {
        let omega = DiscRegion::from_balls(0.005, DEFAULT_R_MAX, &[PseudoBall { center: [0.0, 0.0], radius: 0.5 }]).unwrap();
        let exact = PI * 0.25 / 0.75;
        assert!((omega.hyperbolic_measure() - exact).abs() < 2e-3);
        let est = rho_hyperbolic(&omega, 0.5).unwrap();
        assert!((est.value - exact).abs() <= est.error_estimate + 2e-3, "{est:?}");
    }

    #[test]
    fn empty_and_domain() {
        let e = DiscRegion::empty(0.02, DEFAULT_R_MAX).unwrap();
        assert_eq!(rho_hyperbolic(&e, 0.5).unwrap().value, 0.0);
        assert!(rho_hyperbolic(&e, 1.0).is_err());
        assert!(DiscRegion::empty(0.02, 1.0).is_err());
    }

    #[test]
    fn monotone_on_nested_rasters() {
        let a = [PseudoBall { center: [0.2, 0.1], radius: 0.2 }];
        let b = [a[0], PseudoBall { center: [-0.5, 0.3], radius: 0.3 }];
        let ra = rho_hyperbolic(&DiscRegion::from_balls(0.01, 0.99, &a).unwrap(), 0.5).unwrap();
        let rb = rho_hyperbolic(&DiscRegion::from_balls(0.01, 0.99, &b).unwrap(), 0.5).unwrap();
        assert!(rb.value >= ra.value);
    }

    #[test]
    fn mobius_invariance_of_window_measure() {
        // the same ball measured around a far-out centre keeps its hyperbolic area
        let omega = DiscRegion::from_balls(0.0025, 0.99, &[PseudoBall { center: [0.6, 0.0], radius: 0.3 }]).unwrap();
        let exact = PI * 0.09 / 0.91;
        assert!((omega.hyperbolic_measure() - exact).abs() < 5e-3 * exact);
    }

    #[test]
    fn refinement_changes_less_than_estimate() {
        let balls = [PseudoBall { center: [0.1, -0.2], radius: 0.25 }, PseudoBall { center: [0.5, 0.4], radius: 0.2 }];
        let coarse = rho_hyperbolic(&DiscRegion::from_balls(0.01, 0.99, &balls).unwrap(), 0.5).unwrap();
        let fine = rho_hyperbolic(&DiscRegion::from_balls(0.005, 0.99, &balls).unwrap(), 0.5).unwrap();
        assert!((coarse.value - fine.value).abs() < coarse.error_estimate, "{coarse:?} {fine:?}");
    }
}
