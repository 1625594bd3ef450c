use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

use super::{DensityEstimate, IntervalUnion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Disc {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Cell-centred raster: cell `(i, j)` has centre
/// `origin + ((i + ½) h, (j + ½) h)`; `mask` is row-major in `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneRaster {
    pub origin: [f64; 2],
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<bool>,
}

impl PlaneRaster {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell > 0.0) || !self.cell.is_finite() {
            return domain("raster cell size must be positive");
        }
        if self.mask.len() != self.nx * self.ny {
            return domain(format!("raster mask has {} cells, expected {}", self.mask.len(), self.nx * self.ny));
        }
        if !self.origin.iter().all(|v| v.is_finite()) {
            return domain("raster origin must be finite");
        }
        Ok(())
    }

    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.cell,
            self.origin[1] + (j as f64 + 0.5) * self.cell,
        ]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let fx = ((p[0] - self.origin[0]) / self.cell).floor();
        let fy = ((p[1] - self.origin[1]) / self.cell).floor();
        if fx < 0.0 || fy < 0.0 {
            return false;
        }
        let (i, j) = (fx as usize, fy as usize);
        i < self.nx && j < self.ny && self.mask[j * self.nx + i]
    }

    pub fn measure(&self) -> f64 {
        self.mask.iter().filter(|&&b| b).count() as f64 * self.cell * self.cell
    }
}

/// A bounded planar set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PlanarRegion {
    Discs { discs: Vec<Disc> },
    Raster(PlaneRaster),
}

impl PlanarRegion {
    pub fn discs(discs: Vec<Disc>) -> Result<Self> {
        let r = PlanarRegion::Discs { discs };
        r.validate()?;
        Ok(r)
    }

    pub fn empty() -> Self {
        PlanarRegion::Discs { discs: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PlanarRegion::Discs { discs } => {
                for d in discs {
                    if !(d.radius > 0.0) || !d.radius.is_finite() || !d.center.iter().all(|v| v.is_finite()) {
                        return domain("discs need finite centres and positive finite radii (region must be bounded)");
                    }
                }
                Ok(())
            }
            PlanarRegion::Raster(r) => r.validate(),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            PlanarRegion::Discs { discs } => discs.iter().any(|d| d.contains(p)),
            PlanarRegion::Raster(r) => r.contains(p),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            PlanarRegion::Discs { discs } => discs.is_empty(),
            PlanarRegion::Raster(r) => !r.mask.iter().any(|&b| b),
        }
    }

    /// `(min, max)` corners, or `None` for the empty set.
    pub fn bounding_box(&self) -> Option<([f64; 2], [f64; 2])> {
        match self {
            PlanarRegion::Discs { discs } => discs.iter().fold(None, |acc, d| {
                let lo = [d.center[0] - d.radius, d.center[1] - d.radius];
                let hi = [d.center[0] + d.radius, d.center[1] + d.radius];
                Some(match acc {
                    None => (lo, hi),
                    Some((a, b)) => ([a[0].min(lo[0]), a[1].min(lo[1])], [b[0].max(hi[0]), b[1].max(hi[1])]),
                })
            }),
            PlanarRegion::Raster(r) => {
                if self.is_empty() {
                    None
                } else {
                    Some((
                        r.origin,
                        [r.origin[0] + r.nx as f64 * r.cell, r.origin[1] + r.ny as f64 * r.cell],
                    ))
                }
            }
        }
    }

    /// Cells of size `h` on the lattice `h Z²`, kept when their centre lies in the set.
    pub fn rasterize(&self, h: f64) -> PlaneRaster {
        let Some((lo, hi)) = self.bounding_box() else {
            return PlaneRaster { origin: [0.0, 0.0], cell: h, nx: 0, ny: 0, mask: Vec::new() };
        };
        let i0 = (lo[0] / h).floor() - 1.0;
        let j0 = (lo[1] / h).floor() - 1.0;
        let nx = ((hi[0] / h).ceil() - i0 + 1.0) as usize;
        let ny = ((hi[1] / h).ceil() - j0 + 1.0) as usize;
        let origin = [i0 * h, j0 * h];
        let mut mask = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let c = [origin[0] + (i as f64 + 0.5) * h, origin[1] + (j as f64 + 0.5) * h];
                mask[j * nx + i] = self.contains(c);
            }
        }
        PlaneRaster { origin, cell: h, nx, ny, mask }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlaneDensityOptions {
    /// First raster cell size; defaults to `R/16`.
    pub initial_cell: Option<f64>,
    pub rel_tol: f64,
    pub max_levels: usize,
}

impl Default for PlaneDensityOptions {
    fn default() -> Self {
        Self { initial_cell: None, rel_tol: 1e-3, max_levels: 4 }
    }
}

/// Best window over all lattice-aligned centres of a raster, using per-row
/// prefix sums so each centre costs `O(R/h)`.
fn raster_window_sup(raster: &PlaneRaster, radius: f64) -> f64 {
    let h = raster.cell;
    let (nx, ny) = (raster.nx, raster.ny);
    if nx == 0 || ny == 0 {
        return 0.0;
    }
    let prefix: Vec<Vec<u32>> = (0..ny)
        .map(|j| {
            let mut p = vec![0u32; nx + 1];
            for i in 0..nx {
                p[i + 1] = p[i] + raster.mask[j * nx + i] as u32;
            }
            p
        })
        .collect();
    let reach = (radius / h + 1e-9).floor() as i64;
    // half-width in cells for each row offset
    let spans: Vec<i64> = (-reach..=reach)
        .map(|d| {
            let dy = d as f64 * h;
            ((radius * radius - dy * dy).max(0.0).sqrt() / h + 1e-9).floor() as i64
        })
        .collect();
    let (nxi, nyi) = (nx as i64, ny as i64);
    let best = (-reach..nyi + reach)
        .into_par_iter()
        .map(|cj| {
            let mut row_best = 0u64;
            for ci in -reach..nxi + reach {
                let mut count = 0u64;
                for (k, d) in (-reach..=reach).enumerate() {
                    let j = cj + d;
                    if j < 0 || j >= nyi {
                        continue;
                    }
                    let lo = (ci - spans[k]).clamp(0, nxi) as usize;
                    let hi = (ci + spans[k] + 1).clamp(0, nxi) as usize;
                    let p = &prefix[j as usize];
                    count += (p[hi] - p[lo]) as u64;
                }
                row_best = row_best.max(count);
            }
            row_best
        })
        .max()
        .unwrap_or(0);
    best as f64 * h * h
}

/// `ρ_{ℝ²}(Ω, R) = sup_z |Ω ∩ (z + D_R)|`.
///
/// Disc unions are sliced into strips of height `R/16, R/32, …` until
/// successive suprema differ by less than `rel_tol` relative; the last difference is the error
/// estimate. A raster input is searched at its own resolution and the error
/// estimate is the Lipschitz bound `√2 R h` for centres off the lattice.
pub fn rho_plane(omega: &PlanarRegion, radius: f64, opts: &PlaneDensityOptions) -> Result<DensityEstimate> {
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("window radius must be positive, got {radius}"));
    }
    omega.validate()?;
    if omega.is_empty() {
        return Ok(DensityEstimate::exact(0.0));
    }
    match omega {
        PlanarRegion::Raster(r) => {
            let v = raster_window_sup(r, radius);
            Ok(DensityEstimate { value: v, error_estimate: std::f64::consts::SQRT_2 * radius * r.cell })
        }
        PlanarRegion::Discs { discs } => {
            let mut h = opts.initial_cell.unwrap_or(radius / 16.0);
            let mut prev: Option<f64> = None;
            let mut est = DensityEstimate::exact(0.0);
            for _ in 0..opts.max_levels.max(2) {
                let v = strip_window_sup(discs, radius, h);
                if let Some(p) = prev {
                    est = DensityEstimate { value: v, error_estimate: (v - p).abs() };
                    if (v - p).abs() <= opts.rel_tol * v {
                        break;
                    }
                }
                prev = Some(v);
                h *= 0.5;
            }
            Ok(est)
        }
    }
}

/// Window sup for a disc union sliced into horizontal strips of height `h`.
/// Within each strip the set and the window are exact chords at the strip's
/// mid-line, so only the `y` direction is discretised. Window centres run over
/// the `h`-lattice.
fn strip_window_sup(discs: &[Disc], radius: f64, h: f64) -> f64 {
    let lo_y = discs.iter().map(|d| d.center[1] - d.radius).fold(f64::INFINITY, f64::min);
    let hi_y = discs.iter().map(|d| d.center[1] + d.radius).fold(f64::NEG_INFINITY, f64::max);
    let lo_x = discs.iter().map(|d| d.center[0] - d.radius).fold(f64::INFINITY, f64::min);
    let hi_x = discs.iter().map(|d| d.center[0] + d.radius).fold(f64::NEG_INFINITY, f64::max);
    let j0 = (lo_y / h).floor() as i64;
    let j1 = (hi_y / h).ceil() as i64;
    let rows: Vec<IntervalUnion> = (j0..j1)
        .map(|j| {
            let y = (j as f64 + 0.5) * h;
            let chords = discs
                .iter()
                .filter_map(|d| {
                    let dy = y - d.center[1];
                    let w = (d.radius * d.radius - dy * dy).sqrt();
                    (w > 0.0).then(|| (d.center[0] - w, d.center[0] + w))
                })
                .collect();
            IntervalUnion::new(chords).expect("chords are finite and nondegenerate")
        })
        .collect();
    let measure_at = |cx: f64, cy: f64| -> f64 {
        let ja = (((cy - radius) / h - 0.5).ceil() as i64).max(j0);
        let jb = (((cy + radius) / h - 0.5).floor() as i64).min(j1 - 1);
        let mut m = 0.0;
        for j in ja..=jb {
            let dy = (j as f64 + 0.5) * h - cy;
            let w = (radius * radius - dy * dy).max(0.0).sqrt();
            if w > 0.0 {
                m += rows[(j - j0) as usize].coverage(cx - w, 2.0 * w);
            }
        }
        m * h
    };
    let i0 = ((lo_x - radius) / h).floor() as i64;
    let i1 = ((hi_x + radius) / h).ceil() as i64;
    let mut scored: Vec<(f64, f64, f64)> = (j0 - (radius / h).ceil() as i64..j1 + (radius / h).ceil() as i64)
        .into_par_iter()
        .flat_map_iter(|cj| (i0..=i1).map(move |ci| (ci, cj)))
        .map(|(ci, cj)| {
            let (cx, cy) = (ci as f64 * h, (cj as f64 + 0.5) * h);
            (measure_at(cx, cy), cx, cy)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    scored.truncate(8);
    // pattern search off the lattice from the best few centres
    scored
        .par_iter()
        .map(|&(mut v, mut cx, mut cy)| {
            let mut step = 0.5 * h;
            while step > h / 64.0 {
                let mut moved = false;
                for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                    let m = measure_at(cx + dx, cy + dy);
                    if m > v {
                        (v, cx, cy, moved) = (m, cx + dx, cy + dy, true);
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            v
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_disc_fills_window() {
        let omega = PlanarRegion::discs(vec![Disc { center: [0.3, -0.2], radius: 1.0 }]).unwrap();
        let est = rho_plane(&omega, 1.0, &Default::default()).unwrap();
        assert!((est.value - PI).abs() <= est.error_estimate + 5e-3, "{est:?}");
        assert!(est.value <= PI * (1.0 + 1e-2));
    }

    /// Area of `D_r(0) ∩ D_s(d)`.
    fn lens(r: f64, s: f64, d: f64) -> f64 {
        if d >= r + s {
            return 0.0;
        }
        if d <= (r - s).abs() {
            return PI * r.min(s).powi(2);
        }
        let a = ((d * d + r * r - s * s) / (2.0 * d * r)).acos();
        let b = ((d * d + s * s - r * r) / (2.0 * d * s)).acos();
        r * r * (a - a.sin() * a.cos()) + s * s * (b - b.sin() * b.cos())
    }

    #[test]
    fn disjoint_discs_against_lens_oracle() {
        let discs = vec![Disc { center: [0.0, 0.0], radius: 0.6 }, Disc { center: [1.3, 0.0], radius: 0.6 }];
        let omega = PlanarRegion::discs(discs.clone()).unwrap();
        let est = rho_plane(&omega, 1.0, &Default::default()).unwrap();
        let mut best = 0.0f64;
        for a in 0..=400 {
            for b in 0..=40 {
                let z = [-0.5 + 2.3 * a as f64 / 400.0, 0.5 * b as f64 / 40.0];
                let m: f64 = discs.iter().map(|d| lens(d.radius, 1.0, (z[0] - d.center[0]).hypot(z[1] - d.center[1]))).sum();
                best = best.max(m);
            }
        }
        assert!((est.value - best).abs() <= est.error_estimate + 2e-3, "{est:?} vs {best}");
        assert!(best > PI * 0.36 + 1e-2);
    }

    #[test]
    fn far_apart_discs() {
        let omega = PlanarRegion::discs(vec![
            Disc { center: [0.0, 0.0], radius: 1.0 },
            Disc { center: [10.0, 0.0], radius: 1.0 },
        ])
        .unwrap();
        let est = rho_plane(&omega, 1.0, &Default::default()).unwrap();
        assert!((est.value - PI).abs() < 5e-3, "{est:?}");
    }

    #[test]
    fn empty_and_errors() {
        assert_eq!(rho_plane(&PlanarRegion::empty(), 1.0, &Default::default()).unwrap().value, 0.0);
        assert!(rho_plane(&PlanarRegion::empty(), 0.0, &Default::default()).is_err());
        assert!(PlanarRegion::discs(vec![Disc { center: [f64::INFINITY, 0.0], radius: 1.0 }]).is_err());
    }

    #[test]
    fn bounded_by_window_and_region_area() {
        let small = PlanarRegion::discs(vec![Disc { center: [0.0, 0.0], radius: 0.3 }]).unwrap();
        let est = rho_plane(&small, 1.0, &Default::default()).unwrap();
        assert!((est.value - PI * 0.09).abs() < 3e-3);
        let big = PlanarRegion::discs(vec![Disc { center: [0.0, 0.0], radius: 3.0 }]).unwrap();
        let est = rho_plane(&big, 0.5, &Default::default()).unwrap();
        assert!(est.value <= PI * 0.25 * 1.01);
    }

    #[test]
    fn monotone_on_nested_sets() {
        let a = vec![Disc { center: [0.0, 0.0], radius: 0.4 }];
        let mut b = a.clone();
        b.push(Disc { center: [0.7, 0.0], radius: 0.3 });
        let ra = rho_plane(&PlanarRegion::discs(a).unwrap(), 1.0, &Default::default()).unwrap();
        let rb = rho_plane(&PlanarRegion::discs(b).unwrap(), 1.0, &Default::default()).unwrap();
        assert!(rb.value >= ra.value);
    }

    #[test]
    fn raster_input_and_refinement() {
        let omega = PlanarRegion::discs(vec![
            Disc { center: [0.0, 0.0], radius: 0.5 },
            Disc { center: [1.2, 0.3], radius: 0.4 },
        ])
        .unwrap();
        let coarse = PlanarRegion::Raster(omega.rasterize(0.02));
        let fine = PlanarRegion::Raster(omega.rasterize(0.01));
        let c = rho_plane(&coarse, 1.0, &Default::default()).unwrap();
        let f = rho_plane(&fine, 1.0, &Default::default()).unwrap();
        assert!((c.value - f.value).abs() < c.error_estimate);
        assert!(coarse.contains([0.0, 0.0]) && !coarse.contains([5.0, 5.0]));
    }
}
