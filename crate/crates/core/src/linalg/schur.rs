//! Real Schur decomposition `a = z·t·zᵀ` with `t` upper quasi-triangular, and
//! reordering of its diagonal blocks.
//!
//! The QR sweep is the classic Francis double-shift iteration on the Hessenberg
//! form (EISPACK `hqr2` lineage) with Wilkinson's exceptional shifts. 2x2
//! diagonal blocks always carry a complex-conjugate pair; real pairs are split
//! by a rotation as they converge.

use nalgebra::linalg::Hessenberg;
use nalgebra::DMatrix;
use num_complex::Complex;

use super::{ensure_finite, ensure_square};
use crate::error::{Error, Result};
use crate::Scalar;

const SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct RealSchur<T: Scalar> {
    /// Upper quasi-triangular factor.
    pub t: DMatrix<T>,
    /// Orthogonal Schur vectors.
    pub z: DMatrix<T>,
}

/// Computes the real Schur form of a square matrix.
pub fn real_schur<T: Scalar>(a: &DMatrix<T>) -> Result<RealSchur<T>> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n <= 1 {
        return Ok(RealSchur {
            t: a.clone(),
            z: DMatrix::identity(n, n),
        });
    }
    let (z, t) = Hessenberg::new(a.clone()).unpack();
    let mut schur = RealSchur { t, z };
    schur.francis()?;
    Ok(schur)
}

impl<T: Scalar> RealSchur<T> {
    pub fn order(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal blocks as `(start, size)` pairs, size 1 or 2.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let n = self.order();
        let mut out = Vec::with_capacity(n);
        let mut i = 0;
        while i < n {
            if i + 1 < n && !self.t[(i + 1, i)].is_zero() {
                out.push((i, 2));
                i += 2;
            } else {
                out.push((i, 1));
                i += 1;
            }
        }
        out
    }

    fn block_eigenvalues(&self, start: usize, size: usize) -> [Complex<T>; 2] {
        let t = &self.t;
        if size == 1 {
            let v = Complex::new(t[(start, start)], T::zero());
            return [v, v];
        }
        let (a, b) = (t[(start, start)], t[(start, start + 1)]);
        let (c, d) = (t[(start + 1, start)], t[(start + 1, start + 1)]);
        let half = T::lit(0.5);
        let p = (a - d) * half;
        let disc = p * p + b * c;
        let mid = (a + d) * half;
        if disc < T::zero() {
            let im = (-disc).sqrt();
            [Complex::new(mid, im), Complex::new(mid, -im)]
        } else {
            let r = disc.sqrt();
            [
                Complex::new(mid + r, T::zero()),
                Complex::new(mid - r, T::zero()),
            ]
        }
    }

    /// Eigenvalues in the order they appear on the diagonal of `t`.
    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.order());
        for (start, size) in self.blocks() {
            let ev = self.block_eigenvalues(start, size);
            out.extend_from_slice(&ev[..size]);
        }
        out
    }

    /// Moves every diagonal block whose eigenvalues satisfy `select` to the
    /// leading position, preserving `a = z·t·zᵀ`. Returns the dimension of the
    /// selected invariant subspace (the first columns of `z`).
    ///
    /// Selected and unselected eigenvalues must be well separated; swaps are
    /// rejected when the exchange would not be backward stable.
    pub fn reorder(&mut self, select: impl Fn(Complex<T>) -> bool) -> Result<usize> {
        let n = self.order();
        let mut budget = n * n + 8;
        loop {
            let blocks = self.blocks();
            let chosen: Vec<bool> = blocks
                .iter()
                .map(|&(s, k)| select(self.block_eigenvalues(s, k)[0]))
                .collect();
            let swap_at =
                (0..blocks.len().saturating_sub(1)).find(|&b| !chosen[b] && chosen[b + 1]);
            match swap_at {
                None => {
                    return Ok(blocks
                        .iter()
                        .zip(&chosen)
                        .filter(|(_, &c)| c)
                        .map(|(&(_, k), _)| k)
                        .sum());
                }
                Some(b) => {
                    if budget == 0 {
                        return Err(Error::IterationFailure("Schur reordering"));
                    }
                    budget -= 1;
                    let (start, p) = blocks[b];
                    let q = blocks[b + 1].1;
                    self.swap_adjacent(start, p, q)?;
                }
            }
        }
    }

    /// Exchanges the adjacent diagonal blocks `t11` (p×p at `j`) and `t22`
    /// (q×q at `j + p`) by an orthogonal similarity.
    fn swap_adjacent(&mut self, j: usize, p: usize, q: usize) -> Result<()> {
        let n = self.order();
        let m = p + q;
        let t11 = self.t.view((j, j), (p, p)).clone_owned();
        let t12 = self.t.view((j, j + p), (p, q)).clone_owned();
        let t22 = self.t.view((j + p, j + p), (q, q)).clone_owned();

        // t11·X − X·t22 = t12, column-major vec(X).
        let mut kron = DMatrix::<T>::zeros(p * q, p * q);
        let mut rhs = nalgebra::DVector::<T>::zeros(p * q);
        for col in 0..q {
            for row in 0..p {
                let eq = col * p + row;
                rhs[eq] = t12[(row, col)];
                for r in 0..p {
                    kron[(eq, col * p + r)] += t11[(row, r)];
                }
                for c in 0..q {
                    kron[(eq, c * p + row)] -= t22[(c, col)];
                }
            }
        }
        let x = kron.lu().solve(&rhs).ok_or_else(|| {
            Error::NumericalFailure("Schur block swap: eigenvalues not separated".into())
        })?;

        // Columns of [−X; I] span the t22-invariant subspace of the m×m window.
        let mut basis = DMatrix::<T>::zeros(m, q + m);
        for col in 0..q {
            for row in 0..p {
                basis[(row, col)] = -x[col * p + row];
            }
            basis[(p + col, col)] = T::one();
        }
        for k in 0..m {
            basis[(k, q + k)] = T::one();
        }
        let rot = basis.qr().q();

        let window_norm = self.t.view((j, j), (m, m)).norm();
        let rows = self.t.view((j, j), (m, n - j)).clone_owned();
        self.t
            .view_mut((j, j), (m, n - j))
            .copy_from(&(rot.transpose() * rows));
        let cols = self.t.view((0, j), (j + m, m)).clone_owned();
        self.t
            .view_mut((0, j), (j + m, m))
            .copy_from(&(cols * &rot));
        let zc = self.z.view((0, j), (n, m)).clone_owned();
        self.z.view_mut((0, j), (n, m)).copy_from(&(zc * &rot));

        let leak = self.t.view((j + q, j), (p, q)).norm();
        if leak > T::lit(1e3) * T::default_epsilon() * (T::one() + window_norm) {
            return Err(Error::NumericalFailure(
                "Schur block swap was not backward stable".into(),
            ));
        }
        self.t.view_mut((j + q, j), (p, q)).fill(T::zero());
        if q == 2 {
            self.split_if_real(j);
        }
        if p == 2 {
            self.split_if_real(j + q);
        }
        Ok(())
    }

    /// Triangularizes the 2x2 block at `k` when its eigenvalues are real.
    fn split_if_real(&mut self, k: usize) {
        let half = T::lit(0.5);
        let (a, b) = (self.t[(k, k)], self.t[(k, k + 1)]);
        let (c, d) = (self.t[(k + 1, k)], self.t[(k + 1, k + 1)]);
        if c.is_zero() {
            return;
        }
        let p = (a - d) * half;
        let disc = p * p + b * c;
        if disc < T::zero() {
            return;
        }
        let root = disc.sqrt();
        let zz = if p >= T::zero() { p + root } else { p - root };
        self.apply_pair_rotation(k, c, zz);
    }

    /// Rotation that annihilates `t[k+1, k]` of a 2x2 block with real
    /// eigenvalues, given its subdiagonal `x` and the shifted root `zz`.
    fn apply_pair_rotation(&mut self, k: usize, x: T, zz: T) {
        let n = self.order();
        let s = x.abs() + zz.abs();
        let (mut p, mut q) = (x / s, zz / s);
        let r = (p * p + q * q).sqrt();
        p /= r;
        q /= r;
        for j in k..n {
            let z = self.t[(k, j)];
            self.t[(k, j)] = q * z + p * self.t[(k + 1, j)];
            self.t[(k + 1, j)] = q * self.t[(k + 1, j)] - p * z;
        }
        for i in 0..k + 2 {
            let z = self.t[(i, k)];
            self.t[(i, k)] = q * z + p * self.t[(i, k + 1)];
            self.t[(i, k + 1)] = q * self.t[(i, k + 1)] - p * z;
        }
        for i in 0..n {
            let z = self.z[(i, k)];
            self.z[(i, k)] = q * z + p * self.z[(i, k + 1)];
            self.z[(i, k + 1)] = q * self.z[(i, k + 1)] - p * z;
        }
        self.t[(k + 1, k)] = T::zero();
    }

    /// Francis double-shift QR on an upper Hessenberg `t`, accumulating into `z`.
    fn francis(&mut self) -> Result<()> {
        let nn = self.order();
        let eps = T::default_epsilon();
        let zero = T::zero();
        let mut norm = zero;
        for i in 0..nn {
            for j in i.saturating_sub(1)..nn {
                norm += self.t[(i, j)].abs();
            }
        }
        if norm.is_zero() {
            return Ok(());
        }

        let max_iter = SWEEPS_PER_EIGENVALUE * nn;
        let mut total = 0usize;
        let mut exshift = zero;
        let mut iter = 0usize;
        let mut n = nn as isize - 1;
        let (mut p, mut q, mut r, mut s, mut z);
        let (mut w, mut x, mut y);

        while n >= 0 {
            let nu = n as usize;
            let mut l = nu;
            while l > 0 {
                s = self.t[(l - 1, l - 1)].abs() + self.t[(l, l)].abs();
                if s.is_zero() {
                    s = norm;
                }
                if self.t[(l, l - 1)].abs() < eps * s {
                    break;
                }
                l -= 1;
            }
            if l > 0 {
                self.t[(l, l - 1)] = zero;
            }

            if l == nu {
                self.t[(nu, nu)] += exshift;
                n -= 1;
                iter = 0;
            } else if l + 1 == nu {
                let t = &mut self.t;
                w = t[(nu, nu - 1)] * t[(nu - 1, nu)];
                p = (t[(nu - 1, nu - 1)] - t[(nu, nu)]) * T::lit(0.5);
                q = p * p + w;
                z = q.abs().sqrt();
                t[(nu, nu)] += exshift;
                t[(nu - 1, nu - 1)] += exshift;
                if q >= zero {
                    z = if p >= zero { p + z } else { p - z };
                    let sub = t[(nu, nu - 1)];
                    self.apply_pair_rotation(nu - 1, sub, z);
                }
                n -= 2;
                iter = 0;
            } else {
                let t = &mut self.t;
                x = t[(nu, nu)];
                y = t[(nu - 1, nu - 1)];
                w = t[(nu, nu - 1)] * t[(nu - 1, nu)];

                if iter == 10 {
                    exshift += x;
                    for i in 0..=nu {
                        t[(i, i)] -= x;
                    }
                    s = t[(nu, nu - 1)].abs() + t[(nu - 1, nu - 2)].abs();
                    x = T::lit(0.75) * s;
                    y = x;
                    w = T::lit(-0.4375) * s * s;
                }
                if iter == 30 {
                    s = (y - x) * T::lit(0.5);
                    s = s * s + w;
                    if s > zero {
                        s = s.sqrt();
                        if y < x {
                            s = -s;
                        }
                        s = x - w / ((y - x) * T::lit(0.5) + s);
                        for i in 0..=nu {
                            t[(i, i)] -= s;
                        }
                        exshift += s;
                        x = T::lit(0.964);
                        y = x;
                        w = x;
                    }
                }
                iter += 1;
                total += 1;
                if total > max_iter {
                    return Err(Error::IterationFailure("real Schur QR iteration"));
                }

                // Two consecutive small subdiagonal elements.
                let mut m = nu - 2;
                loop {
                    z = t[(m, m)];
                    r = x - z;
                    s = y - z;
                    p = (r * s - w) / t[(m + 1, m)] + t[(m, m + 1)];
                    q = t[(m + 1, m + 1)] - z - r - s;
                    r = t[(m + 2, m + 1)];
                    s = p.abs() + q.abs() + r.abs();
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == l {
                        break;
                    }
                    if t[(m, m - 1)].abs() * (q.abs() + r.abs())
                        < eps
                            * (p.abs()
                                * (t[(m - 1, m - 1)].abs() + z.abs() + t[(m + 1, m + 1)].abs()))
                    {
                        break;
                    }
                    m -= 1;
                }
                for i in m + 2..=nu {
                    t[(i, i - 2)] = zero;
                    if i > m + 2 {
                        t[(i, i - 3)] = zero;
                    }
                }

                for k in m..nu {
                    let notlast = k != nu - 1;
                    if k != m {
                        p = t[(k, k - 1)];
                        q = t[(k + 1, k - 1)];
                        r = if notlast { t[(k + 2, k - 1)] } else { zero };
                        x = p.abs() + q.abs() + r.abs();
                        if x.is_zero() {
                            continue;
                        }
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                    s = (p * p + q * q + r * r).sqrt();
                    if p < zero {
                        s = -s;
                    }
                    if s.is_zero() {
                        continue;
                    }
                    if k != m {
                        t[(k, k - 1)] = -s * x;
                    } else if l != m {
                        t[(k, k - 1)] = -t[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = t[(k, j)] + q * t[(k + 1, j)];
                        if notlast {
                            p += r * t[(k + 2, j)];
                            t[(k + 2, j)] -= p * z;
                        }
                        t[(k, j)] -= p * x;
                        t[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * t[(i, k)] + y * t[(i, k + 1)];
                        if notlast {
                            p += z * t[(i, k + 2)];
                            t[(i, k + 2)] -= p * r;
                        }
                        t[(i, k)] -= p;
                        t[(i, k + 1)] -= p * q;
                    }
                    let v = &mut self.z;
                    for i in 0..nn {
                        p = x * v[(i, k)] + y * v[(i, k + 1)];
                        if notlast {
                            p += z * v[(i, k + 2)];
                            v[(i, k + 2)] -= p * r;
                        }
                        v[(i, k)] -= p;
                        v[(i, k + 1)] -= p * q;
                    }
                }
            }
        }

        // Clear round-off below the quasi-triangular band.
        for i in 2..nn {
            for j in 0..i - 1 {
                self.t[(i, j)] = zero;
            }
        }
        Ok(())
    }
}
