use num_complex::Complex64;
use rayon::prelude::*;

use super::{delta_spectrum_with, EigenPair, Spectrum, CLUSTER_SPREAD};
use crate::error::{Error, Result};
use crate::fem::{AssembledForms, CoefficientField};
use crate::linalg::{ArnoldiOptions, SparseMatrix};

type C = Complex64;

#[derive(Debug, Clone)]
pub struct TrackOptions {
    /// Eigenpairs computed per sample around the shift.
    pub candidates: usize,
    /// Shift; `None` uses `lambda0`.
    pub sigma: Option<C>,
    /// Second-best overlap above this fraction of the best is ambiguous.
    pub ambiguity: f64,
    pub arnoldi: ArnoldiOptions,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            candidates: 6,
            sigma: None,
            ambiguity: 0.9,
            arnoldi: ArnoldiOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BranchStep {
    pub delta: C,
    pub lambda: C,
    pub vector: Vec<C>,
    pub residual: f64,
    /// `|v_prevᵀ B_δ v|` of the selected pair (1 at the start).
    pub overlap: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TrackedBranch {
    pub steps: Vec<BranchStep>,
}

impl TrackedBranch {
    pub fn deltas(&self) -> Vec<C> {
        self.steps.iter().map(|s| s.delta).collect()
    }

    pub fn lambdas(&self) -> Vec<C> {
        self.steps.iter().map(|s| s.lambda).collect()
    }
}

/// `radial` steps out from 0 along the ray of angle 0 followed by `n + 1`
/// equally spaced points on `|δ| = r`, the last equal to the first. The
/// second value is the index of the first circle point.
pub fn circle_path(r: f64, n: usize, radial: usize) -> (Vec<C>, usize) {
    let mut path = vec![C::new(0.0, 0.0)];
    for j in 1..radial {
        path.push(C::new(r * j as f64 / radial as f64, 0.0));
    }
    let start = path.len();
    for j in 0..=n {
        let t = 2.0 * std::f64::consts::PI * (j % n) as f64 / n as f64;
        path.push(C::from_polar(r, t));
    }
    (path, start)
}

fn spectra(
    forms: &AssembledForms,
    path: &[C],
    sigma: C,
    count: usize,
    opts: &TrackOptions,
) -> Result<Vec<Spectrum>> {
    let arnoldi = ArnoldiOptions {
        count,
        ..opts.arnoldi.clone()
    };
    path.par_iter()
        .map(|&d| delta_spectrum_with(forms, d, sigma, &arnoldi))
        .collect()
}

fn mass(forms: &AssembledForms, delta: C) -> SparseMatrix<C> {
    forms.weighted_mass(CoefficientField::contrast(delta))
}

fn bilinear(x: &[C], y: &[C]) -> C {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Follows the eigenvalue that equals `lambda0` at δ = 0 along `path`,
/// picking at each sample the pair of largest `|v_prevᵀ B_δ v|`.
pub fn track_branch(
    forms: &AssembledForms,
    lambda0: f64,
    path: &[C],
    opts: &TrackOptions,
) -> Result<TrackedBranch> {
    if path.first() != Some(&C::new(0.0, 0.0)) {
        return Err(Error::Invalid(
            "a tracked path must start at delta = 0".into(),
        ));
    }
    let sigma = opts.sigma.unwrap_or(C::new(lambda0, 0.0));
    let all = spectra(forms, path, sigma, opts.candidates, opts)?;

    let first = &all[0].pairs;
    let mut order: Vec<usize> = (0..first.len()).collect();
    let dist = |p: &EigenPair| (p.lambda - lambda0).norm();
    order.sort_by(|&a, &b| dist(&first[a]).total_cmp(&dist(&first[b])));
    let p0 = &first[order[0]];
    if order.len() > 1 {
        let (a, b) = (p0.lambda, first[order[1]].lambda);
        if (a - b).norm() <= CLUSTER_SPREAD * a.norm() {
            return Err(Error::Ambiguous {
                step: 0,
                best: dist(p0),
                second: dist(&first[order[1]]),
            });
        }
    }
    let mut steps = vec![BranchStep {
        delta: path[0],
        lambda: p0.lambda,
        vector: p0.vector.clone(),
        residual: p0.residual,
        overlap: 1.0,
        warnings: all[0].warnings.clone(),
    }];

    for (k, spec) in all.iter().enumerate().skip(1) {
        let prev = steps.last().unwrap();
        let bprev = mass(forms, spec.delta).mul_vec(&prev.vector);
        let scored: Vec<(C, &EigenPair)> = spec
            .pairs
            .iter()
            .map(|p| (bilinear(&bprev, &p.vector), p))
            .collect();
        let mut idx: Vec<usize> = (0..scored.len()).collect();
        idx.sort_by(|&a, &b| {
            scored[b].0.norm().total_cmp(&scored[a].0.norm()).then(
                (scored[a].1.lambda - prev.lambda)
                    .norm()
                    .total_cmp(&(scored[b].1.lambda - prev.lambda).norm()),
            )
        });
        let best = scored[idx[0]].0.norm();
        let second = idx.get(1).map_or(0.0, |&i| scored[i].0.norm());
        if second >= opts.ambiguity * best {
            return Err(Error::Ambiguous {
                step: k,
                best,
                second,
            });
        }
        let (ov, pair) = scored[idx[0]];
        let mut vector = pair.vector.clone();
        if ov.re < 0.0 {
            for v in &mut vector {
                *v = -*v;
            }
        }
        steps.push(BranchStep {
            delta: spec.delta,
            lambda: pair.lambda,
            vector,
            residual: pair.residual,
            overlap: best,
            warnings: spec.warnings.clone(),
        });
    }
    Ok(TrackedBranch { steps })
}

#[derive(Debug, Clone)]
pub struct ClusterStep {
    pub delta: C,
    /// Sorted by real part, then imaginary part.
    pub lambdas: Vec<C>,
    /// `s_p = Σ λ_i^p` for `p = 1..=h`.
    pub power_sums: Vec<C>,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ClusterTrack {
    pub multiplicity: usize,
    /// Distance at δ = 0 from the cluster to the nearest other computed
    /// eigenvalue.
    pub gap: f64,
    pub steps: Vec<ClusterStep>,
}

impl ClusterTrack {
    pub fn power_sum(&self, p: usize) -> Vec<C> {
        self.steps.iter().map(|s| s.power_sums[p - 1]).collect()
    }
}

fn cluster_step(delta: C, pairs: &[&EigenPair]) -> ClusterStep {
    let mut lambdas: Vec<C> = pairs.iter().map(|p| p.lambda).collect();
    lambdas.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let h = lambdas.len();
    let power_sums = (1..=h as i32)
        .map(|p| lambdas.iter().map(|l| l.powi(p)).sum())
        .collect();
    ClusterStep {
        delta,
        lambdas,
        power_sums,
        residuals: pairs.iter().map(|p| p.residual).collect(),
    }
}

/// Tracks the cluster of eigenvalues near `center` at δ = 0 as a set, by
/// overlap with the previous invariant subspace.
pub fn cluster_track(
    forms: &AssembledForms,
    center: f64,
    path: &[C],
    opts: &TrackOptions,
) -> Result<ClusterTrack> {
    if path.first() != Some(&C::new(0.0, 0.0)) {
        return Err(Error::Invalid(
            "a tracked path must start at delta = 0".into(),
        ));
    }
    let sigma = opts.sigma.unwrap_or(C::new(center, 0.0));
    let all = spectra(forms, path, sigma, opts.candidates, opts)?;
    let first = &all[0].pairs;
    let mut order: Vec<usize> = (0..first.len()).collect();
    let dist = |p: &EigenPair| (p.lambda - center).norm();
    order.sort_by(|&a, &b| dist(&first[a]).total_cmp(&dist(&first[b])));
    let lead = first[order[0]].lambda;
    let members: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| (first[i].lambda - lead).norm() <= CLUSTER_SPREAD * lead.norm())
        .collect();
    let h = members.len();
    if h == first.len() {
        return Err(Error::Invalid(format!(
            "cluster at {center} fills all {h} candidates; request more"
        )));
    }
    let gap = first
        .iter()
        .enumerate()
        .filter(|(i, _)| !members.contains(i))
        .map(|(_, p)| (p.lambda - lead).norm())
        .fold(f64::INFINITY, f64::min);
    let mut basis: Vec<Vec<C>> = members.iter().map(|&i| first[i].vector.clone()).collect();
    let mut steps = vec![cluster_step(
        path[0],
        &members.iter().map(|&i| &first[i]).collect::<Vec<_>>(),
    )];

    for (k, spec) in all.iter().enumerate().skip(1) {
        let b = mass(forms, spec.delta);
        let bb: Vec<Vec<C>> = basis.iter().map(|v| b.mul_vec(v)).collect();
        let score: Vec<f64> = spec
            .pairs
            .iter()
            .map(|p| {
                bb.iter()
                    .map(|bv| bilinear(bv, &p.vector).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut idx: Vec<usize> = (0..score.len()).collect();
        idx.sort_by(|&a, &c| score[c].total_cmp(&score[a]).then(a.cmp(&c)));
        let last_in = score[idx[h - 1]];
        let first_out = idx.get(h).map_or(0.0, |&i| score[i]);
        if first_out >= opts.ambiguity * last_in {
            return Err(Error::Ambiguous {
                step: k,
                best: last_in,
                second: first_out,
            });
        }
        let chosen: Vec<&EigenPair> = idx[..h].iter().map(|&i| &spec.pairs[i]).collect();
        basis = chosen.iter().map(|p| p.vector.clone()).collect();
        steps.push(cluster_step(spec.delta, &chosen));
    }
    Ok(ClusterTrack {
        multiplicity: h,
        gap,
        steps,
    })
}
