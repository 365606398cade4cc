//! Taylor coefficients of eigenvalue branches from samples on a circle
//! in the δ plane, with analyticity diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eig::{ClusterTrack, TrackedBranch};
use crate::error::{Error, Result};
use crate::linalg::{general_eig, DenseMatrix};

type C = Complex64;

/// Default closure tolerance for sampled circles.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Values of an analytic function at `δ_j = r e^{2πij/N}`, `j = 0..=N`;
/// the last sample repeats the first point of the circle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleSamples {
    pub radius: f64,
    pub values: Vec<C>,
}

impl CircleSamples {
    pub fn new(radius: f64, values: Vec<C>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Invalid(format!(
                "circle radius {radius} must be positive"
            )));
        }
        let n = values.len().saturating_sub(1);
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "{n} circle samples; need a power of two of at least 4"
            )));
        }
        Ok(CircleSamples { radius, values })
    }

    /// Samples `f` exactly.
    pub fn from_fn(radius: f64, n: usize, f: impl Fn(C) -> C) -> Result<Self> {
        let values = (0..=n).map(|j| f(circle_point(radius, n, j))).collect();
        CircleSamples::new(radius, values)
    }

    /// The circle part of a branch tracked along `eig::circle_path`.
    pub fn from_branch(branch: &TrackedBranch, start: usize) -> Result<Self> {
        let steps = &branch.steps[start..];
        let radius = steps.first().map_or(0.0, |s| s.delta.norm());
        CircleSamples::new(radius, steps.iter().map(|s| s.lambda).collect())
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// `|first − last| / max(1, |first|)`
    pub fn closure_defect(&self) -> f64 {
        let (a, b) = (self.values[0], self.values[self.n()]);
        (a - b).norm() / a.norm().max(1.0)
    }
}

pub fn circle_point(radius: f64, n: usize, j: usize) -> C {
    C::from_polar(
        radius,
        2.0 * std::f64::consts::PI * (j % n) as f64 / n as f64,
    )
}

/// Discrete Cauchy coefficients `a_k = (1/N) Σ_j λ_j e^{−2πijk/N} / r^k`
/// for `k = 0..=order`, `order ≤ N/4`.
pub fn taylor_from_circle(
    samples: &CircleSamples,
    order: usize,
    closure_tol: f64,
) -> Result<Vec<C>> {
    let n = samples.n();
    if 4 * order > n {
        return Err(Error::Invalid(format!(
            "order {order} exceeds N/4 = {} for {n} samples",
            n / 4
        )));
    }
    let defect = samples.closure_defect();
    if defect > closure_tol {
        return Err(Error::NotClosed { defect });
    }
    let r = samples.radius;
    Ok((0..=order)
        .map(|k| {
            let s: C = (0..n)
                .map(|j| {
                    let ang = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                    samples.values[j] * C::from_polar(1.0, ang)
                })
                .sum();
            s / (n as f64 * r.powi(k as i32))
        })
        .collect())
}

pub fn eval_series(coeffs: &[C], delta: C) -> C {
    coeffs
        .iter()
        .rev()
        .fold(C::new(0.0, 0.0), |acc, &a| acc * delta + a)
}

/// `max |Im λ| / (1 + |λ|)`
pub fn reality_defect(lambdas: &[C]) -> f64 {
    lambdas
        .iter()
        .map(|l| l.im.abs() / (1.0 + l.norm()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticityReport {
    /// `[re, im]` per coefficient.
    pub a_coeffs: Vec<[f64; 2]>,
    /// `|a_{k+1}| r / |a_k|`
    pub decay_ratios: Vec<f64>,
    /// Relative error of the truncated series at each held-out point.
    pub prediction_errors: Vec<f64>,
    pub reality_defect: f64,
    pub closure_defect: f64,
}

impl AnalyticityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

/// Coefficients of the closed circle plus checks against held-out
/// `(δ, λ)` pairs solved directly and against samples on the real axis.
pub fn analyticity_report(
    samples: &CircleSamples,
    order: usize,
    held_out: &[(C, C)],
    real_axis: &[C],
) -> Result<AnalyticityReport> {
    analyticity_report_with(samples, order, held_out, real_axis, CLOSURE_TOL)
}

pub fn analyticity_report_with(
    samples: &CircleSamples,
    order: usize,
    held_out: &[(C, C)],
    real_axis: &[C],
    closure_tol: f64,
) -> Result<AnalyticityReport> {
    let coeffs = taylor_from_circle(samples, order, closure_tol)?;
    let r = samples.radius;
    let decay_ratios = coeffs
        .windows(2)
        .map(|w| {
            if w[0].norm() == 0.0 {
                0.0
            } else {
                w[1].norm() * r / w[0].norm()
            }
        })
        .collect();
    let prediction_errors = held_out
        .iter()
        .map(|&(d, lam)| (eval_series(&coeffs, d) - lam).norm() / lam.norm().max(f64::MIN_POSITIVE))
        .collect();
    Ok(AnalyticityReport {
        a_coeffs: coeffs.iter().map(|a| [a.re, a.im]).collect(),
        decay_ratios,
        prediction_errors,
        reality_defect: reality_defect(real_axis),
        closure_defect: samples.closure_defect(),
    })
}

/// Taylor coefficients of each power sum `s_p`, `p = 1..=h`.
#[derive(Debug, Clone)]
pub struct ClusterSeries {
    pub multiplicity: usize,
    pub coeffs: Vec<Vec<C>>,
    pub closure_defects: Vec<f64>,
}

impl ClusterSeries {
    /// Cluster eigenvalues at δ recovered from the series of `s_p`.
    pub fn eigenvalues_at(&self, delta: C) -> Result<Vec<C>> {
        let s: Vec<C> = self.coeffs.iter().map(|c| eval_series(c, delta)).collect();
        eigenvalues_from_power_sums(&s)
    }
}

/// Power sums `s_p` of a cluster tracked on a circle, `start` being the
/// index of the first circle point.
pub fn power_sum_samples(track: &ClusterTrack, start: usize) -> Result<Vec<CircleSamples>> {
    let steps = &track.steps[start..];
    let radius = steps.first().map_or(0.0, |s| s.delta.norm());
    (0..track.multiplicity)
        .map(|p| CircleSamples::new(radius, steps.iter().map(|s| s.power_sums[p]).collect()))
        .collect()
}

pub fn cluster_series(
    power_sums: &[CircleSamples],
    order: usize,
    closure_tol: f64,
) -> Result<ClusterSeries> {
    let coeffs = power_sums
        .iter()
        .map(|s| taylor_from_circle(s, order, closure_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusterSeries {
        multiplicity: power_sums.len(),
        coeffs,
        closure_defects: power_sums.iter().map(|s| s.closure_defect()).collect(),
    })
}

/// Roots of the monic polynomial whose roots have power sums `s`
/// (Newton's identities, then a companion eigenproblem).
pub fn eigenvalues_from_power_sums(s: &[C]) -> Result<Vec<C>> {
    let h = s.len();
    if h == 0 {
        return Ok(vec![]);
    }
    // e_k elementary symmetric: k e_k = Σ_{i=1..k} (−1)^{i−1} e_{k−i} s_i
    let mut e = vec![C::new(1.0, 0.0)];
    for k in 1..=h {
        let mut acc = C::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * s[i - 1];
        }
        e.push(acc / k as f64);
    }
    // x^h − e_1 x^{h−1} + e_2 x^{h−2} − …
    let comp = DenseMatrix::from_fn(h, h, |i, j| {
        if i == 0 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * e[j + 1]
        } else if i == j + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let (mut roots, _) = general_eig(&comp)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Splits unordered per-sample sets into branches by continuity: each
/// step takes the permutation minimizing the total jump.
pub fn match_by_continuity(sets: &[Vec<C>]) -> Result<Vec<Vec<C>>> {
    let Some(first) = sets.first() else {
        return Ok(vec![]);
    };
    let h = first.len();
    if h > 8 {
        return Err(Error::Invalid(format!(
            "cluster of size {h} is too large to match"
        )));
    }
    let perms = permutations(h);
    let mut branches: Vec<Vec<C>> = first.iter().map(|&l| vec![l]).collect();
    for set in &sets[1..] {
        if set.len() != h {
            return Err(Error::Invalid("cluster size changes along the path".into()));
        }
        let best = perms
            .iter()
            .min_by(|p, q| {
                let cost = |perm: &Vec<usize>| -> f64 {
                    (0..h)
                        .map(|b| (set[perm[b]] - *branches[b].last().unwrap()).norm())
                        .sum()
                };
                cost(p).total_cmp(&cost(q))
            })
            .unwrap();
        for b in 0..h {
            branches[b].push(set[best[b]]);
        }
    }
    Ok(branches)
}

fn permutations(h: usize) -> Vec<Vec<usize>> {
    if h == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(h - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, h - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}
