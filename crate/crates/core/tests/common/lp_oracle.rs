//! Reference solvers for tiny L1 programs, independent of the library solver.
//!
//! Real data: exhaustive vertex enumeration of the linear program. With a real
//! dictionary and real observations the complex-modulus optimum is real, so
//! this is exact. Complex data: enumeration of the residuals forced to zero,
//! with the smooth remainder minimised by Weiszfeld iteration.

#![allow(dead_code)]

use num_complex::Complex64;
use sievekit::recovery::{real_trig_dictionary, L1Problem, ProblemKind};
use sievekit::spaces::{band_dictionary, contiguous_band};
use sievekit::{complex_normal, trial_rng};
use rand::seq::index::sample;
use rand::Rng;

type C = Complex64;

/// Gaussian elimination with partial pivoting; `None` when a pivot falls
/// below `1e-11` relative to the largest entry.
pub fn solve(a: Vec<Vec<C>>, b: Vec<C>) -> Option<Vec<C>> {
    solve_with(a, b, 1e-11)
}

fn solve_with(mut a: Vec<Vec<C>>, mut b: Vec<C>, pivot_tol: f64) -> Option<Vec<C>> {
    let n = b.len();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() < pivot_tol * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: C = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn dot(r: &[C], c: &[C]) -> C {
    r.iter().zip(c).map(|(a, b)| a * b).sum()
}

/// Minimises `Σ_i |A_i x - b_i|²` over the given rows; `None` if singular.
fn normal_equations(rows: &[(&[C], C)], k: usize) -> Option<Vec<C>> {
    let mut g = vec![vec![C::new(0.0, 0.0); k]; k];
    let mut rhs = vec![C::new(0.0, 0.0); k];
    for (r, b) in rows {
        for i in 0..k {
            rhs[i] += r[i].conj() * b;
            for j in 0..k {
                g[i][j] += r[i].conj() * r[j];
            }
        }
    }
    solve(g, rhs)
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// `min_x Σ |y_i - (A x)_i|` for real `A` (rows of length `k`) and real `y`,
/// by evaluating every basic solution that zeroes `k` residuals.
pub fn real_lad(a: &[Vec<C>], y: &[C], k: usize) -> f64 {
    let mut best = f64::INFINITY;
    for s in subsets(a.len(), k) {
        let m = s.iter().map(|&i| a[i].clone()).collect();
        let rhs = s.iter().map(|&i| y[i]).collect();
        if let Some(x) = solve(m, rhs) {
            let obj: f64 = a.iter().zip(y).map(|(r, v)| (v - dot(r, &x)).norm()).sum();
            best = best.min(obj);
        }
    }
    best
}

/// `min_x Σ_i |(A x)_i|` subject to `(A x)_i = y_i` on observed
/// rows, for real data. Every vertex satisfies the constraints plus some set of
/// zeroed unobserved rows; all such sets are tried.
pub fn real_completion(a: &[Vec<C>], y: &[C], observed: &[bool], k: usize) -> f64 {
    let obs: Vec<usize> = (0..a.len()).filter(|&i| observed[i]).collect();
    let free: Vec<usize> = (0..a.len()).filter(|&i| !observed[i]).collect();
    let mut best = f64::INFINITY;
    for size in 0..=free.len().min(k) {
        for s in subsets(free.len(), size) {
            let zero = C::new(0.0, 0.0);
            let rows: Vec<(&[C], C)> = obs
                .iter()
                .map(|&i| (a[i].as_slice(), y[i]))
                .chain(s.iter().map(|&j| (a[free[j]].as_slice(), zero)))
                .collect();
            let Some(x) = normal_equations(&rows, k) else { continue };
            let consistent = rows.iter().all(|(r, b)| (dot(r, &x) - b).norm() < 1e-9);
            if consistent {
                best = best.min(a.iter().map(|r| dot(r, &x).norm()).sum());
            }
        }
    }
    best
}

const SWEEPS: usize = 400;

/// Brute force over zero sets for the complex-modulus problem
/// `min Σ_{i∈soft} |a_i x - b_i|` subject to `a_i x = b_i` on `fixed`.
///
/// For each set `Z ⊂ soft` with `|fixed| + |Z| ≤ k` the residuals on `Z` are
/// forced to zero. Once that pins `x` the point is evaluated directly;
/// otherwise the remaining objective is smooth and is minimised by the
/// Weiszfeld iteration (weights `1/|r_i|`) through the KKT system. The true
/// optimum is reached with `Z` equal to its own zero set.
fn enumerate_zero_sets(a: &[Vec<C>], b: &[C], fixed: &[usize], soft: &[usize], k: usize) -> f64 {
    let zero = C::new(0.0, 0.0);
    let scale = b.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let objective = |x: &[C]| -> f64 { soft.iter().map(|&i| (dot(&a[i], x) - b[i]).norm()).sum() };
    let mut best = f64::INFINITY;
    for size in 0..=soft.len().min(k.saturating_sub(fixed.len().min(k))) {
        for z in subsets(soft.len(), size) {
            let eq: Vec<usize> = fixed.iter().copied().chain(z.iter().map(|&j| soft[j])).collect();
            let rest: Vec<usize> = soft.iter().copied().filter(|i| !eq.contains(i)).collect();
            if eq.len() >= k {
                let rows: Vec<(&[C], C)> = eq.iter().map(|&i| (a[i].as_slice(), b[i])).collect();
                let Some(x) = normal_equations(&rows, k) else { continue };
                if rows.iter().all(|(r, v)| (dot(r, &x) - v).norm() < 1e-9 * scale) {
                    best = best.min(objective(&x));
                }
                continue;
            }
            let m = eq.len();
            let kkt = |w: &[f64]| -> Option<Vec<C>> {
                let mut mat = vec![vec![zero; k + m]; k + m];
                let mut rhs = vec![zero; k + m];
                for (&i, wi) in rest.iter().zip(w) {
                    for p in 0..k {
                        rhs[p] += a[i][p].conj() * b[i] * wi;
                        for q in 0..k {
                            mat[p][q] += a[i][p].conj() * a[i][q] * wi;
                        }
                    }
                }
                for (row, &i) in eq.iter().enumerate() {
                    for p in 0..k {
                        mat[p][k + row] = a[i][p].conj();
                        mat[k + row][p] = a[i][p];
                    }
                    rhs[k + row] = b[i];
                }
                solve_with(mat, rhs, 1e-300).map(|s| s[..k].to_vec()).filter(|x| x.iter().all(|v| v.is_finite()))
            };
            let Some(mut x) = kkt(&vec![1.0; rest.len()]) else { continue };
            let mut prev = objective(&x);
            best = best.min(prev);
            for _ in 0..SWEEPS {
                let w: Vec<f64> = rest.iter().map(|&i| 1.0 / (dot(&a[i], &x) - b[i]).norm().max(1e-14 * scale)).collect();
                let Some(nx) = kkt(&w) else { break };
                x = nx;
                let obj = objective(&x);
                best = best.min(obj);
                if (prev - obj).abs() <= 1e-16 * scale {
                    break;
                }
                prev = obj;
            }
        }
    }
    best
}

/// `min_x Σ |y_i - (A x)_i|` for complex data.
pub fn complex_lad(a: &[Vec<C>], y: &[C], k: usize) -> f64 {
    let all: Vec<usize> = (0..a.len()).collect();
    enumerate_zero_sets(a, y, &[], &all, k)
}

/// `min_x Σ_i |(A x)_i|` subject to `(A x)_i = y_i` on observed rows, complex
/// data. Observed rows contribute the constant `Σ |y_i|`.
pub fn complex_completion(a: &[Vec<C>], y: &[C], observed: &[bool], k: usize) -> f64 {
    let obs: Vec<usize> = (0..a.len()).filter(|&i| observed[i]).collect();
    let free: Vec<usize> = (0..a.len()).filter(|&i| !observed[i]).collect();
    let b: Vec<C> = (0..a.len()).map(|i| if observed[i] { y[i] } else { C::new(0.0, 0.0) }).collect();
    let constant: f64 = obs.iter().map(|&i| y[i].norm()).sum();
    constant + enumerate_zero_sets(a, &b, &obs, &free, k)
}

fn rows(p: &L1Problem) -> Vec<Vec<C>> {
    p.dictionary.chunks(p.k).map(|r| r.to_vec()).collect()
}

/// Reference optimum of `p`, exact for real data.
pub fn oracle_objective(p: &L1Problem) -> f64 {
    let a = rows(p);
    let real = p.dictionary.iter().chain(&p.observation).all(|z| z.im == 0.0);
    match (p.kind, real) {
        (ProblemKind::Denoise, true) => real_lad(&a, &p.observation, p.k),
        (ProblemKind::Denoise, false) => complex_lad(&a, &p.observation, p.k),
        (ProblemKind::Completion, true) => real_completion(&a, &p.observation, &p.observed, p.k),
        (ProblemKind::Completion, false) => complex_completion(&a, &p.observation, &p.observed, p.k),
    }
}

/// Tiny instances: `N ≤ 16`, `k ≤ 4`, `|Ω| ≤ 3`, on the DFT band (complex)
/// and the real trigonometric dictionary (real). Denoising instances carry
/// either sparse noise on `Ω` or dense noise on every sample.
pub fn tiny_instances(seed: u64) -> Vec<L1Problem> {
    let mut out = Vec::new();
    let mut idx = 0;
    for n in [6usize, 8, 11, 16] {
        for k in 1..=4usize {
            for omega_len in 0..=3usize {
                for real in [false, true] {
                    if real && 2 * k > n {
                        continue;
                    }
                    let mut rng = trial_rng(seed, idx);
                    idx += 1;
                    let phi = if real {
                        real_trig_dictionary(n, k).unwrap()
                    } else {
                        band_dictionary(n, &contiguous_band(n, k).unwrap())
                    };
                    let coeffs: Vec<C> = (0..k)
                        .map(|_| if real { C::new(rng.random_range(-1.0..1.0), 0.0) } else { complex_normal(&mut rng) })
                        .collect();
                    let f: Vec<C> = phi.chunks(k).map(|r| dot(r, &coeffs)).collect();
                    let omega = sample(&mut rng, n, omega_len).into_vec();
                    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                        if real { C::new(rng.random_range(-10.0..10.0), 0.0) } else { complex_normal(rng) * 10.0 }
                    };

                    let mut y = f.clone();
                    for &i in &omega {
                        y[i] += draw(&mut rng);
                    }
                    out.push(L1Problem::denoise(n, k, phi.clone(), y).unwrap());

                    let mut dense = f.clone();
                    for v in dense.iter_mut() {
                        *v += draw(&mut rng) * 0.1;
                    }
                    out.push(L1Problem::denoise(n, k, phi.clone(), dense).unwrap());

                    if omega_len > 0 {
                        let mut observed = vec![true; n];
                        for &i in &omega {
                            observed[i] = false;
                        }
                        let y = f.iter().zip(&observed).map(|(v, &o)| if o { *v } else { C::new(0.0, 0.0) }).collect();
                        out.push(L1Problem::completion(n, k, phi, y, observed).unwrap());
                    }
                }
            }
        }
    }
    out
}
