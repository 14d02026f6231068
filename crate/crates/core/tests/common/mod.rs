//! Random generators and independent reference computations for the
//! integration tests. The references use nalgebra's own eigen and SVD
//! routines, never the crate's solvers.
#![allow(dead_code)]

use blockdom::linalg::hinf_norm_resolvent;
use blockdom::{make_partitioned, HinfOptions, PartitionedMatrix};
use na::{Complex, DMatrix};
use nalgebra as na;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let u: f64 = rng.gen_range(1e-12..1.0);
        let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (-2.0 * u.ln()).sqrt() * v.cos()
    })
}

/// Largest real part of the spectrum.
pub fn abscissa(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn sigma_max(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub fn sym_eigs(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = na::SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `σ̄((iω·I − a)⁻¹)` by a complex inverse and SVD.
pub fn grid_gain(a: &DMatrix<f64>, omega: f64) -> f64 {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j {
            Complex::new(0.0, omega)
        } else {
            Complex::new(0.0, 0.0)
        };
        d - Complex::new(a[(i, j)], 0.0)
    });
    let inv = m.try_inverse().expect("resolvent of a Hurwitz matrix");
    inv.svd(false, false).singular_values.max()
}

/// Max of [`grid_gain`] over `ω = 0` and `points − 1` log-spaced
/// frequencies spanning six decades around the spectral radius.
pub fn grid_peak(a: &DMatrix<f64>, points: usize) -> f64 {
    let rho = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1e-3);
    let (lo, hi) = ((rho * 1e-3).ln(), (rho * 1e3).ln());
    let mut best = grid_gain(a, 0.0);
    for k in 0..points - 1 {
        let w = (lo + (hi - lo) * k as f64 / (points - 2) as f64).exp();
        best = best.max(grid_gain(a, w));
    }
    best
}

/// Hurwitz `k×k` block with spectral abscissa in `[-2, -0.5]`.
pub fn hurwitz_block(rng: &mut impl Rng, k: usize) -> DMatrix<f64> {
    let g = gaussian(rng, k, k);
    let shift = abscissa(&g) + rng.gen_range(0.5..2.0);
    g - DMatrix::identity(k, k) * shift
}

/// Metzler matrix with entries on the order of one and a random diagonal
/// shift, so roughly half the samples are Hurwitz.
pub fn random_metzler(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(0.0..1.0));
    let shift = rng.gen_range(0.0..n as f64);
    for i in 0..n {
        m[(i, i)] = -shift * rng.gen_range(0.6..1.4);
    }
    m
}

/// A partitioned matrix whose block comparison matrix is Hurwitz by
/// construction: with a random positive `d`, every block row satisfies
/// `Σ_{j≠i} σ̄(Aᵢⱼ)·dⱼ ≤ θ·gᵢ·dᵢ` for `θ < 1`, where `gᵢ` is the inverse
/// resolvent norm of `Aᵢᵢ`. `allowed(i, j)` selects which off-diagonal blocks
/// may be nonzero.
pub fn dominant_partitioned(
    rng: &mut impl Rng,
    sizes: &[usize],
    theta: f64,
    allowed: impl Fn(usize, usize) -> bool,
) -> PartitionedMatrix<f64> {
    let n = sizes.len();
    let total: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |s, &k| {
            let o = *s;
            *s += k;
            Some(o)
        })
        .collect();
    let diag: Vec<DMatrix<f64>> = sizes.iter().map(|&k| hurwitz_block(rng, k)).collect();
    let gains: Vec<f64> = diag
        .iter()
        .map(|b| {
            let r = hinf_norm_resolvent(b, &HinfOptions::default()).unwrap();
            1.0 / r.norm.finite().unwrap()
        })
        .collect();
    let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let mut a = DMatrix::zeros(total, total);
    for i in 0..n {
        a.view_mut((offsets[i], offsets[i]), (sizes[i], sizes[i]))
            .copy_from(&diag[i]);
        let cols: Vec<usize> = (0..n).filter(|&j| j != i && allowed(i, j)).collect();
        if cols.is_empty() {
            continue;
        }
        let weights: Vec<f64> = cols.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let wsum: f64 = weights.iter().sum();
        for (&j, w) in cols.iter().zip(&weights) {
            let target = theta * gains[i] * d[i] * (w / wsum) / d[j];
            let g = gaussian(rng, sizes[i], sizes[j]);
            let blk = &g * (target / sigma_max(&g));
            a.view_mut((offsets[i], offsets[j]), (sizes[i], sizes[j]))
                .copy_from(&blk);
        }
    }
    make_partitioned(a, sizes).unwrap()
}

/// Random block sizes in `1..=max_k` for `n` blocks.
pub fn random_sizes(rng: &mut impl Rng, n: usize, max_k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(1..=max_k)).collect()
}

/// Solves `X·aᵀ + a·X + q = 0` through `(I ⊗ a + a ⊗ I)·vec(X) = −vec(q)`.
pub fn kronecker_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let k = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = na::DVector::from_iterator(n * n, q.iter().map(|x| -x));
    let x = k.lu().solve(&rhs).expect("nonsingular Kronecker system");
    DMatrix::from_column_slice(n, n, x.as_slice())
}
