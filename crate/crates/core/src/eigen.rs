//! Symmetric eigensolvers: dense (nalgebra) and restarted Lanczos with locking.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sprs::{FillInReduction, SymmetryCheck};
use sprs_ldl::{Ldl, LdlNumeric};

use crate::linalg::{self, SparseMatrix};

/// Ascending eigenvalues and matching eigenvector columns.
pub fn dense_symmetric(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if a.nrows() == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosConfig {
    pub how_many: usize,
    pub max_basis: usize,
    pub budget: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig { how_many: 6, max_basis: 120, budget: 10_000, tol: 1e-8, seed: 0 }
    }
}

/// `how_many` largest eigenpairs of the symmetric operator `op`.
pub struct LanczosResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub applications: usize,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    linalg::dot(v, v).sqrt()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = linalg::dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Explicitly restarted Lanczos with full reorthogonalization. Converged Ritz
/// pairs (residual `<= tol` measured by `residual`) are locked and deflated from
/// later Krylov spaces. Once `how_many` pairs are locked, cycles from fresh random
/// starts look for missed copies of repeated eigenvalues until one finds none.
pub fn lanczos_largest(
    dim: usize,
    mut op: impl FnMut(&[f64]) -> Vec<f64>,
    mut residual: impl FnMut(&[f64]) -> (f64, f64),
    cfg: LanczosConfig,
) -> LanczosResult {
    let want = cfg.how_many.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut applications = 0;
    let mut start = random(&mut rng);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut verified = false;

    while want > 0 && applications < cfg.budget {
        let verifying = locked.len() >= want;
        if verifying {
            start = random(&mut rng);
        }
        let basis_vectors: Vec<Vec<f64>> = locked.iter().map(|p| p.1.clone()).collect();
        orthogonalize(&mut start, &basis_vectors);
        let mut nrm = norm(&start);
        if nrm < 1e-12 {
            start = random(&mut rng);
            orthogonalize(&mut start, &basis_vectors);
            nrm = norm(&start);
            if nrm < 1e-12 {
                // locked vectors span the space
                verified = true;
                break;
            }
        }
        start.iter_mut().for_each(|x| *x /= nrm);
        let room = dim - locked.len().min(dim);
        let m_cap = cfg.max_basis.min(room).min(cfg.budget - applications).max(1);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            let mut w = op(&basis[j]);
            applications += 1;
            orthogonalize(&mut w, &basis_vectors);
            let a = linalg::dot(&w, &basis[j]);
            alpha.push(a);
            orthogonalize(&mut w, &basis);
            let b = norm(&w);
            if basis.len() >= m_cap || b < 1e-10 {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
        let m = basis.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let (vals, vecs) = dense_symmetric(t);
        let take = if verifying { want } else { want - locked.len() }.max(1).min(m);
        let ritz: Vec<(f64, Vec<f64>)> = (0..m)
            .rev()
            .take(take)
            .map(|c| {
                let mut y = vec![0.0; dim];
                for (k, b) in basis.iter().enumerate() {
                    let s = vecs[(k, c)];
                    y.iter_mut().zip(b).for_each(|(acc, x)| *acc += s * x);
                }
                let n = norm(&y);
                y.iter_mut().for_each(|x| *x /= n);
                (vals[c], y)
            })
            .collect();
        let mut restart = vec![0.0; dim];
        let mut found = false;
        if !verifying {
            best.clear();
        }
        for (value, vec) in ritz {
            let (res, _) = residual(&vec);
            applications += 1;
            let smallest = locked.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            if res <= cfg.tol {
                if locked.len() < want {
                    locked.push((value, vec));
                } else if value > smallest * (1.0 + 1e-12) + 1e-300 {
                    let at = locked.iter().position(|p| p.0 == smallest).unwrap();
                    locked[at] = (value, vec);
                    found = true;
                }
            } else if !verifying {
                restart.iter_mut().zip(&vec).for_each(|(r, x)| *r += x);
                best.push((value, vec));
            }
        }
        if verifying && !found {
            verified = true;
            break;
        }
        if !verifying {
            start = restart;
        }
    }
    let converged = locked.len() >= want && verified;
    let mut pairs = locked;
    // unconverged best guesses fill up the request
    for p in best.into_iter() {
        if pairs.len() >= want {
            break;
        }
        pairs.push(p);
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (values, vectors) = pairs.into_iter().unzip();
    LanczosResult { values, vectors, applications, converged }
}

/// Factorization of `A + τI` for shift-invert iteration.
pub struct ShiftInvert {
    factor: LdlNumeric<f64, usize>,
    pub shift: f64,
}

impl ShiftInvert {
    pub fn new(a: &SparseMatrix, shift: f64) -> Option<Self> {
        let n = a.rows();
        let mut tri = sprs::TriMat::new((n, n));
        for (&v, (r, c)) in a.iter() {
            tri.add_triplet(r, c, v);
        }
        for i in 0..n {
            tri.add_triplet(i, i, shift);
        }
        let shifted: SparseMatrix = tri.to_csc();
        let factor = Ldl::new()
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .numeric(shifted.view())
            .ok()?;
        if factor.d().iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return None;
        }
        Some(ShiftInvert { factor, shift })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.factor.solve(b)
    }
}

/// Gershgorin bound on the spectral radius of a symmetric matrix.
pub fn gershgorin(a: &SparseMatrix) -> f64 {
    let mut rows = vec![0.0; a.rows()];
    for (&v, (r, _)) in a.iter() {
        rows[r] += v.abs();
    }
    rows.into_iter().fold(0.0, f64::max)
}
