use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::DenseMatrix;
use super::hessenberg::hessenberg_eig;
use crate::error::{Error, Result};

type C = Complex64;

/// Operator `x ↦ (A − σB)⁻¹ B x` of a pencil (A, B) together with the
/// pieces Arnoldi needs to certify and normalize Ritz pairs.
pub trait ShiftInvertOperator: Sync {
    fn dim(&self) -> usize;
    fn sigma(&self) -> C;
    fn apply(&self, x: &[C]) -> Vec<C>;
    fn apply_b(&self, x: &[C]) -> Vec<C>;
    /// `‖A x − λ B x‖ / ‖x‖`
    fn residual(&self, lambda: C, x: &[C]) -> f64;
    /// Removes components that must stay out of the search space.
    fn project(&self, _x: &mut [C]) {}
}

#[derive(Debug, Clone)]
pub struct ArnoldiOptions {
    pub count: usize,
    /// Krylov basis size per round; `None` picks `max(2·count + 20, 40)`.
    pub basis: Option<usize>,
    /// Acceptance threshold on the pencil residual.
    pub tol: f64,
    pub max_rounds: usize,
    pub seed: u64,
}

impl Default for ArnoldiOptions {
    fn default() -> Self {
        ArnoldiOptions {
            count: 6,
            basis: None,
            tol: 1e-8,
            max_rounds: 30,
            seed: 0x5eed_0001,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RitzPair {
    pub lambda: C,
    pub theta: C,
    /// Normalized so that `vᵀ B v = 1`.
    pub vector: Vec<C>,
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ArnoldiStats {
    pub rounds: usize,
    pub applications: usize,
    pub max_orthogonality_loss: f64,
}

fn bdot(x: &[C], bx: &[C]) -> C {
    x.iter().zip(bx).map(|(a, b)| a * b).sum()
}

fn deflate(op: &dyn ShiftInvertOperator, locked: &[(RitzPair, Vec<C>)], x: &mut [C]) {
    op.project(x);
    for (p, bv) in locked {
        // v is B-normalized, so the coefficient is vᵀ B x = (Bv)ᵀ x
        let c = bdot(x, bv);
        for (xi, vi) in x.iter_mut().zip(&p.vector) {
            *xi -= c * vi;
        }
    }
}

fn norm(x: &[C]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Fixes the sign so that the largest-modulus entry (first on ties) has
/// nonnegative real part.
pub fn fix_sign(x: &mut [C]) {
    let mut k = 0;
    let mut best = -1.0;
    for (i, v) in x.iter().enumerate() {
        let a = v.norm();
        if a > best * (1.0 + 1e-12) {
            best = a;
            k = i;
        }
    }
    if let Some(v) = x.get(k) {
        let flip = if v.re.abs() >= v.im.abs() {
            v.re < 0.0
        } else {
            v.im < 0.0
        };
        if flip {
            for e in x.iter_mut() {
                *e = -*e;
            }
        }
    }
}

/// Shift-invert Arnoldi with locking. Each round builds a fresh Krylov
/// space in the complement of the admissible subspace already found, so
/// both partners of an exactly degenerate eigenvalue are recovered.
pub fn shift_invert_arnoldi(
    op: &dyn ShiftInvertOperator,
    opts: &ArnoldiOptions,
) -> Result<(Vec<RitzPair>, ArnoldiStats)> {
    let n = op.dim();
    if opts.count == 0 || opts.count >= n {
        return Err(Error::Invalid(format!(
            "requested {} eigenpairs of a dimension-{} pencil",
            opts.count, n
        )));
    }
    let mut stats = ArnoldiStats::default();
    let mut locked: Vec<(RitzPair, Vec<C>)> = Vec::new();
    let mut start: Option<Vec<C>> = None;
    let mut best_residuals: Vec<f64> = Vec::new();

    for round in 0..opts.max_rounds {
        stats.rounds = round + 1;
        let room = n.saturating_sub(locked.len());
        if room == 0 {
            break;
        }
        let m = opts
            .basis
            .unwrap_or((2 * opts.count + 20).max(40))
            .min(room);

        let mut v0 = match start.take() {
            Some(v) => v,
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(round as u64));
                (0..n)
                    .map(|_| C::new(rng.gen_range(-1.0..1.0), 0.0))
                    .collect()
            }
        };
        deflate(op, &locked, &mut v0);
        let nv = norm(&v0);
        if !(nv > 0.0) {
            return Err(Error::NoConvergence {
                iterations: stats.applications,
                best_residuals,
            });
        }
        for v in v0.iter_mut() {
            *v /= nv;
        }

        let mut basis: Vec<Vec<C>> = vec![v0];
        let mut h = DenseMatrix::<C>::zeros(m + 1, m);
        let mut last_beta = 0.0;
        let mut size = m;
        for j in 0..m {
            let mut w = op.apply(&basis[j]);
            stats.applications += 1;
            deflate(op, &locked, &mut w);
            let wnorm0 = norm(&w);
            for _pass in 0..2 {
                for (i, vi) in basis.iter().enumerate() {
                    let c: C = vi.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                    for (wk, vk) in w.iter_mut().zip(vi) {
                        *wk -= c * vk;
                    }
                    h[(i, j)] += c;
                }
            }
            let beta = norm(&w);
            h[(j + 1, j)] = C::new(beta, 0.0);
            last_beta = beta;
            if beta <= 1e-13 * wnorm0.max(f64::MIN_POSITIVE) {
                size = j + 1;
                last_beta = 0.0;
                break;
            }
            for v in w.iter_mut() {
                *v /= beta;
            }
            basis.push(w);
        }

        // orthogonality monitor on the newest vector
        if let Some(last) = basis.last() {
            for vi in &basis[..basis.len() - 1] {
                let c: C = vi.iter().zip(last).map(|(a, b)| a.conj() * b).sum();
                stats.max_orthogonality_loss = stats.max_orthogonality_loss.max(c.norm());
            }
        }

        let hm = DenseMatrix::from_fn(size, size, |i, j| h[(i, j)]);
        let (thetas, ys) = hessenberg_eig(&hm)?;
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| {
            thetas[b]
                .norm()
                .total_cmp(&thetas[a].norm())
                .then(a.cmp(&b))
        });

        let mut unconverged: Vec<Vec<C>> = Vec::new();
        let mut round_max = 0.0f64;
        let mut round_best: Vec<f64> = Vec::new();
        for &i in &order {
            let theta = thetas[i];
            if theta.norm() == 0.0 {
                continue;
            }
            round_max = round_max.max(theta.norm());
            let est = last_beta * ys[(size - 1, i)].norm();
            let mut x = vec![C::new(0.0, 0.0); n];
            for (k, vk) in basis.iter().take(size).enumerate() {
                let c = ys[(k, i)];
                for (xi, v) in x.iter_mut().zip(vk) {
                    *xi += c * v;
                }
            }
            if est > 1e-10 * theta.norm() {
                if unconverged.len() < opts.count {
                    unconverged.push(x);
                }
                continue;
            }
            deflate(op, &locked, &mut x);
            let bx = op.apply_b(&x);
            let eta = bdot(&x, &bx);
            let xn = norm(&x);
            if eta.norm() <= 1e-12 * xn * norm(&bx) {
                continue;
            }
            let s = eta.sqrt();
            for v in x.iter_mut() {
                *v /= s;
            }
            fix_sign(&mut x);
            let lambda = op.sigma() + 1.0 / theta;
            let residual = op.residual(lambda, &x);
            round_best.push(residual);
            if residual <= opts.tol {
                let bv = op.apply_b(&x);
                locked.push((
                    RitzPair {
                        lambda,
                        theta,
                        vector: x,
                        residual,
                    },
                    bv,
                ));
            } else if unconverged.len() < opts.count {
                unconverged.push(x);
            }
        }
        if !round_best.is_empty() {
            best_residuals = round_best;
        }

        if locked.len() >= opts.count {
            let mut mags: Vec<f64> = locked.iter().map(|(p, _)| p.theta.norm()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let theta_c = mags[opts.count - 1];
            if round_max < theta_c * (1.0 - 1e-10) {
                return Ok((finish(locked, opts.count), stats));
            }
        }
        if !unconverged.is_empty() {
            let mut s = vec![C::new(0.0, 0.0); n];
            for u in &unconverged {
                let un = norm(u);
                for (si, ui) in s.iter_mut().zip(u) {
                    *si += ui / un;
                }
            }
            start = Some(s);
        }
    }
    if locked.len() >= opts.count {
        return Ok((finish(locked, opts.count), stats));
    }
    Err(Error::NoConvergence {
        iterations: stats.applications,
        best_residuals,
    })
}

fn finish(locked: Vec<(RitzPair, Vec<C>)>, count: usize) -> Vec<RitzPair> {
    let mut pairs: Vec<RitzPair> = locked.into_iter().map(|(p, _)| p).collect();
    pairs.sort_by(|a, b| b.theta.norm().total_cmp(&a.theta.norm()));
    pairs.truncate(count);
    pairs
}
