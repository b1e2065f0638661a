//! Small dense linear algebra used by the subspace estimator, generic over
//! the scalar. Sizes here are tiny (correlation order ~24, mode counts ~4),
//! so the classics are the right tools: cyclic Jacobi for symmetric
//! eigenproblems, Householder reduction plus shifted QR for the general
//! complex one, Gaussian elimination with partial pivoting for solves.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::num::{lit, Real};

/// Eigen-decomposition of a real symmetric matrix.
///
/// `values[i]` pairs with the i-th column of `vectors`; sorted descending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Array2<T>,
}

/// Cyclic Jacobi iteration. Converges quadratically; the sweep cap is far
/// beyond what symmetric matrices of this size need, so hitting it means the
/// input was not symmetric (or not finite).
pub fn symmetric_eigen<T: Real>(a: &Array2<T>) -> SymmetricEigen<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    let mut v = Array2::<T>::eye(n);
    if n > 1 {
        let max_sweeps = 64;
        for _ in 0..max_sweeps {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += m[[p, q]] * m[[p, q]];
                }
            }
            let mut diag = T::zero();
            for p in 0..n {
                diag += m[[p, p]] * m[[p, p]];
            }
            let scale = (diag + off + off).sqrt();
            if off.sqrt() <= T::epsilon() * scale.max(T::min_positive_value()) {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[[j, j]]
            .partial_cmp(&m[[i, i]])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::<T>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, dst]] = v[[r, src]];
        }
    }
    SymmetricEigen { values, vectors }
}

/// One Jacobi rotation zeroing the (p, q) entry.
fn rotate<T: Real>(m: &mut Array2<T>, v: &mut Array2<T>, p: usize, q: usize) {
    let apq = m[[p, q]];
    let app = m[[p, p]];
    let aqq = m[[q, q]];
    // Skip entries that are already negligible against their diagonal.
    if apq.abs() <= T::epsilon() * (app.abs() + aqq.abs()) * lit(0.5) {
        m[[p, q]] = T::zero();
        m[[q, p]] = T::zero();
        return;
    }
    let tau = (aqq - app) / (lit::<T>(2.0) * apq);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let n = m.nrows();
    for i in 0..n {
        let mip = m[[i, p]];
        let miq = m[[i, q]];
        m[[i, p]] = c * mip - s * miq;
        m[[i, q]] = s * mip + c * miq;
    }
    for j in 0..n {
        let mpj = m[[p, j]];
        let mqj = m[[q, j]];
        m[[p, j]] = c * mpj - s * mqj;
        m[[q, j]] = s * mpj + c * mqj;
    }
    // Enforce the analytic zero instead of leaving rounding residue.
    m[[p, q]] = T::zero();
    m[[q, p]] = T::zero();
    for i in 0..n {
        let vip = v[[i, p]];
        let viq = v[[i, q]];
        v[[i, p]] = c * vip - s * viq;
        v[[i, q]] = s * vip + c * viq;
    }
}

/// Eigenvalues of a general complex matrix via Householder reduction to
/// Hessenberg form followed by shifted QR with deflation.
///
/// Returns `None` only if the iteration fails to deflate, which for finite
/// inputs of these sizes indicates a genuinely pathological operator.
pub fn complex_eigenvalues<T: Real>(a: &Array2<Complex<T>>) -> Option<Vec<Complex<T>>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    match n {
        0 => return Some(Vec::new()),
        1 => return Some(vec![a[[0, 0]]]),
        _ => {}
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is h[0..hi, 0..hi]
    let mut stalled = 0usize;
    let max_stall = 40 * n;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[[0, 0]]);
            hi = 0;
            continue;
        }
        // Zero negligible subdiagonals inside the active block.
        for i in 0..hi - 1 {
            let bound = T::epsilon() * (h[[i, i]].norm() + h[[i + 1, i + 1]].norm());
            if h[[i + 1, i]].norm() <= bound {
                h[[i + 1, i]] = Complex::new(T::zero(), T::zero());
            }
        }
        if h[[hi - 1, hi - 2]].norm() == T::zero() {
            eigs.push(h[[hi - 1, hi - 1]]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if hi >= 3 && h[[hi - 2, hi - 3]].norm() == T::zero() || hi == 2 {
            // Trailing irreducible 2x2: closed form.
            let (l1, l2) = eig2(
                h[[hi - 2, hi - 2]],
                h[[hi - 2, hi - 1]],
                h[[hi - 1, hi - 2]],
                h[[hi - 1, hi - 1]],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            stalled = 0;
            continue;
        }
        // Start of the trailing irreducible block.
        let mut lo = hi - 1;
        while lo > 0 && h[[lo, lo - 1]].norm() != T::zero() {
            lo -= 1;
        }
        stalled += 1;
        if stalled > max_stall {
            return None;
        }
        let shift = if stalled % 16 == 0 {
            // Exceptional shift breaks the rare symmetric stall. hi >= 3 here
            // because the 2x2 branch above catches smaller blocks.
            Complex::new(
                h[[hi - 1, hi - 2]].norm() + h[[hi - 2, hi - 3]].norm(),
                T::zero(),
            )
        } else {
            wilkinson(
                h[[hi - 2, hi - 2]],
                h[[hi - 2, hi - 1]],
                h[[hi - 1, hi - 2]],
                h[[hi - 1, hi - 1]],
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Some(eigs)
}

/// In-place unitary reduction to upper Hessenberg form.
fn hessenberg<T: Real>(h: &mut Array2<Complex<T>>) {
    let n = h.nrows();
    let zero = Complex::new(T::zero(), T::zero());
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal. Reflect only
        // when something below the subdiagonal actually needs annihilating.
        let mut tail2 = T::zero();
        for i in k + 2..n {
            tail2 += h[[i, k]].norm_sqr();
        }
        if tail2 == T::zero() {
            continue;
        }
        let norm = (tail2 + h[[k + 1, k]].norm_sqr()).sqrt();
        let x0 = h[[k + 1, k]];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / Complex::new(x0.norm(), T::zero())
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[[i, k]]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = lit::<T>(2.0);
        // Left: H <- (I - 2 v v^H / v^H v) H on rows k+1..n.
        for j in k..n {
            let mut dot = zero;
            for (r, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[[k + 1 + r, j]];
            }
            let scale = dot * Complex::new(two / vnorm2, T::zero());
            for (r, vi) in v.iter().enumerate() {
                h[[k + 1 + r, j]] -= *vi * scale;
            }
        }
        // Right: H <- H (I - 2 v v^H / v^H v) on columns k+1..n.
        for i in 0..n {
            let mut dot = zero;
            for (c, vi) in v.iter().enumerate() {
                dot += h[[i, k + 1 + c]] * *vi;
            }
            let scale = dot * Complex::new(two / vnorm2, T::zero());
            for (c, vi) in v.iter().enumerate() {
                h[[i, k + 1 + c]] -= scale * vi.conj();
            }
        }
        // Analytic zeros below the subdiagonal.
        h[[k + 1, k]] = alpha;
        for i in k + 2..n {
            h[[i, k]] = zero;
        }
    }
}

/// Eigenvalues of a complex 2x2.
fn eig2<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    (mean + disc, mean - disc)
}

/// Wilkinson shift: the 2x2 eigenvalue closer to the trailing entry.
fn wilkinson<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit-shift QR step on the active Hessenberg block `[lo, hi)`.
fn qr_step<T: Real>(h: &mut Array2<Complex<T>>, lo: usize, hi: usize, shift: Complex<T>) {
    for i in lo..hi {
        h[[i, i]] -= shift;
    }
    // Factor: rotations zero the subdiagonal in order.
    let mut rotations = Vec::with_capacity(hi - lo - 1);
    for i in lo..hi - 1 {
        let f = h[[i, i]];
        let g = h[[i + 1, i]];
        let denom = (f.norm_sqr() + g.norm_sqr()).sqrt();
        let (c, s) = if denom == T::zero() || f.norm() == T::zero() {
            (T::zero(), Complex::new(T::one(), T::zero()))
        } else {
            let sign = f / Complex::new(f.norm(), T::zero());
            (
                f.norm() / denom,
                sign * g.conj() / Complex::new(denom, T::zero()),
            )
        };
        for j in i..hi {
            let x = h[[i, j]];
            let y = h[[i + 1, j]];
            h[[i, j]] = x * Complex::new(c, T::zero()) + s * y;
            h[[i + 1, j]] = -s.conj() * x + y * Complex::new(c, T::zero());
        }
        rotations.push((i, c, s));
    }
    // Multiply back on the right by the conjugate transposes (RQ). Column i
    // is nonzero only down to row i + 1 at this point, which is where the new
    // subdiagonal entry forms.
    for &(i, c, s) in &rotations {
        for r in lo..=(i + 1) {
            let x = h[[r, i]];
            let y = h[[r, i + 1]];
            h[[r, i]] = x * Complex::new(c, T::zero()) + y * s.conj();
            h[[r, i + 1]] = -s * x + y * Complex::new(c, T::zero());
        }
    }
    for i in lo..hi {
        h[[i, i]] += shift;
    }
}

/// Solves `A X = B` for square real `A` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot collapses (singular system).
pub fn solve_real<T: Real>(a: &Array2<T>, b: &Array2<T>) -> Option<Array2<T>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    assert_eq!(n, b.nrows(), "dimension mismatch");
    let mut m = a.clone();
    let mut x = b.clone();
    let nrhs = x.ncols();
    let mut scale = T::zero();
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(m[[i, j]].abs());
        }
    }
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let mut pivot_row = col;
        for r in col + 1..n {
            if m[[r, col]].abs() > m[[pivot_row, col]].abs() {
                pivot_row = r;
            }
        }
        if m[[pivot_row, col]].abs() <= T::epsilon() * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap([col, j], [pivot_row, j]);
            }
            for j in 0..nrhs {
                x.swap([col, j], [pivot_row, j]);
            }
        }
        let pivot = m[[col, col]];
        for r in col + 1..n {
            let factor = m[[r, col]] / pivot;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[[col, j]];
                m[[r, j]] -= factor * v;
            }
            for j in 0..nrhs {
                let v = x[[col, j]];
                x[[r, j]] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        for j in 0..nrhs {
            let mut acc = x[[col, j]];
            for r in col + 1..n {
                acc -= m[[col, r]] * x[[r, j]];
            }
            x[[col, j]] = acc / m[[col, col]];
        }
    }
    Some(x)
}

/// Solves `A x = b` for square complex `A`, same scheme as [`solve_real`].
pub fn solve_complex<T: Real>(
    a: &Array2<Complex<T>>,
    b: &Array1<Complex<T>>,
) -> Option<Array1<Complex<T>>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    assert_eq!(n, b.len(), "dimension mismatch");
    let mut m = a.clone();
    let mut x = b.clone();
    let mut scale = T::zero();
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(m[[i, j]].norm());
        }
    }
    if scale == T::zero() {
        return None;
    }
    for col in 0..n {
        let mut pivot_row = col;
        for r in col + 1..n {
            if m[[r, col]].norm() > m[[pivot_row, col]].norm() {
                pivot_row = r;
            }
        }
        if m[[pivot_row, col]].norm() <= T::epsilon() * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap([col, j], [pivot_row, j]);
            }
            x.swap(col, pivot_row);
        }
        let pivot = m[[col, col]];
        for r in col + 1..n {
            let factor = m[[r, col]] / pivot;
            for j in col..n {
                let v = m[[col, j]];
                m[[r, j]] -= factor * v;
            }
            let v = x[col];
            x[r] -= factor * v;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for r in col + 1..n {
            acc -= m[[col, r]] * x[r];
        }
        x[col] = acc / m[[col, col]];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    /// Deterministic pseudo-random values for stress matrices.
    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn jacobi_known_two_by_two() {
        let a = array![[2.0f64, 1.0], [1.0, 2.0]];
        let eig = symmetric_eigen(&a);
        assert_relative_eq!(eig.values[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(eig.values[1], 1.0, max_relative = 1e-14);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(eig.vectors[[0, 0]].abs(), inv_sqrt2, max_relative = 1e-12);
        assert_relative_eq!(eig.vectors[[1, 0]].abs(), inv_sqrt2, max_relative = 1e-12);
    }

    #[test]
    fn jacobi_diagonal_passthrough() {
        let a = array![[5.0f64, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        let eig = symmetric_eigen(&a);
        assert_eq!(eig.values, vec![5.0, 2.0, -1.0]);
    }

    #[test]
    fn jacobi_residual_and_orthogonality_on_random_psd() {
        let mut seed = 42u64;
        for trial in 0..20 {
            let n = 3 + (trial % 15);
            let mut b = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    b[[i, j]] = lcg(&mut seed);
                }
            }
            let a = b.t().dot(&b);
            let eig = symmetric_eigen(&a);
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            // Residual: A v = lambda v per pair.
            for c in 0..n {
                for r in 0..n {
                    let av: f64 = (0..n).map(|j| a[[r, j]] * eig.vectors[[j, c]]).sum();
                    let lv = eig.values[c] * eig.vectors[[r, c]];
                    assert!(
                        (av - lv).abs() <= 1e-11 * norm.max(1.0),
                        "n={n} residual {av} vs {lv}"
                    );
                }
            }
            // Orthonormal vectors.
            for c1 in 0..n {
                for c2 in 0..n {
                    let dot: f64 = (0..n)
                        .map(|r| eig.vectors[[r, c1]] * eig.vectors[[r, c2]])
                        .sum();
                    let expect = if c1 == c2 { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-12, "vtv[{c1},{c2}] = {dot}");
                }
            }
            // PSD input: eigenvalues non-negative up to rounding.
            assert!(eig.values.iter().all(|&v| v > -1e-12 * norm));
            // Trace preserved.
            let trace: f64 = (0..n).map(|i| a[[i, i]]).sum();
            let sum: f64 = eig.values.iter().sum();
            assert_relative_eq!(trace, sum, max_relative = 1e-12);
        }
    }

    fn sort_by_re_im(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn complex_eig_triangular() {
        let i = |re, im| Complex::new(re, im);
        let a = array![
            [i(1.0, 2.0), i(5.0, -1.0), i(0.3, 0.0)],
            [i(0.0, 0.0), i(-2.0, 0.5), i(1.0, 1.0)],
            [i(0.0, 0.0), i(0.0, 0.0), i(4.0, -3.0)]
        ];
        let eigs = sort_by_re_im(complex_eigenvalues(&a).unwrap());
        let expect = sort_by_re_im(vec![i(1.0, 2.0), i(-2.0, 0.5), i(4.0, -3.0)]);
        for (e, x) in eigs.iter().zip(&expect) {
            assert_relative_eq!(e.re, x.re, max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(e.im, x.im, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn complex_eig_companion_matrix() {
        // Companion of (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6.
        let z = Complex::new(0.0f64, 0.0);
        let one = Complex::new(1.0f64, 0.0);
        let a = array![
            [
                Complex::new(6.0, 0.0),
                Complex::new(-11.0, 0.0),
                Complex::new(6.0, 0.0)
            ],
            [one, z, z],
            [z, one, z]
        ];
        let eigs = sort_by_re_im(complex_eigenvalues(&a).unwrap());
        for (e, expect) in eigs.iter().zip([1.0, 2.0, 3.0]) {
            assert_relative_eq!(e.re, expect, max_relative = 1e-10);
            assert!(e.im.abs() < 1e-10);
        }
    }

    #[test]
    fn complex_eig_damped_rotation_blocks() {
        // Two real 2x2 rotation-scale blocks: the shape the mode-rotation
        // operator takes for two damped tones. Eigenvalues rho*exp(±i theta).
        let block = |rho: f64, theta: f64| {
            [
                [rho * theta.cos(), -rho * theta.sin()],
                [rho * theta.sin(), rho * theta.cos()],
            ]
        };
        let b1 = block(0.99, 0.7);
        let b2 = block(1.0, 1.9);
        let mut a = Array2::<Complex<f64>>::zeros((4, 4));
        for r in 0..2 {
            for c in 0..2 {
                a[[r, c]] = Complex::new(b1[r][c], 0.0);
                a[[2 + r, 2 + c]] = Complex::new(b2[r][c], 0.0);
            }
        }
        // Couple the blocks weakly so the matrix is not block-diagonal.
        a[[0, 3]] = Complex::new(1e-3, 0.0);
        let eigs = complex_eigenvalues(&a).unwrap();
        assert_eq!(eigs.len(), 4);
        let mut mags: Vec<f64> = eigs.iter().map(|e| e.norm()).collect();
        mags.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_relative_eq!(mags[0], 0.99, max_relative = 1e-3);
        assert_relative_eq!(mags[3], 1.0, max_relative = 1e-3);
        let mut args: Vec<f64> = eigs.iter().map(|e| e.arg().abs()).collect();
        args.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_relative_eq!(args[0], 0.7, max_relative = 1e-3);
        assert_relative_eq!(args[3], 1.9, max_relative = 1e-3);
    }

    #[test]
    fn complex_eig_trace_invariant_on_random_matrices() {
        let mut seed = 7u64;
        for _ in 0..20 {
            let n = 4;
            let mut a = Array2::<Complex<f64>>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    a[[i, j]] = Complex::new(lcg(&mut seed), lcg(&mut seed));
                }
            }
            let eigs = complex_eigenvalues(&a).unwrap();
            assert_eq!(eigs.len(), n);
            let trace: Complex<f64> = (0..n).map(|i| a[[i, i]]).sum();
            let sum: Complex<f64> = eigs.iter().sum();
            assert_relative_eq!(trace.re, sum.re, max_relative = 1e-9, epsilon = 1e-9);
            assert_relative_eq!(trace.im, sum.im, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn complex_eig_matches_jacobi_on_symmetric() {
        let a_real = array![[4.0f64, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 1.0]];
        let sym = symmetric_eigen(&a_real);
        let a = a_real.map(|&v| Complex::new(v, 0.0));
        let mut eigs: Vec<f64> = complex_eigenvalues(&a)
            .unwrap()
            .iter()
            .map(|e| {
                assert!(e.im.abs() < 1e-10);
                e.re
            })
            .collect();
        eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (got, expect) in eigs.iter().zip(&sym.values) {
            assert_relative_eq!(got, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn solve_real_known_system() {
        let a = array![[2.0f64, 1.0, -1.0], [-3.0, -1.0, 2.0], [-2.0, 1.0, 2.0]];
        let b = array![[8.0f64], [-11.0], [-3.0]];
        let x = solve_real(&a, &b).unwrap();
        assert_relative_eq!(x[[0, 0]], 2.0, max_relative = 1e-12);
        assert_relative_eq!(x[[1, 0]], 3.0, max_relative = 1e-12);
        assert_relative_eq!(x[[2, 0]], -1.0, max_relative = 1e-12);
    }

    #[test]
    fn solve_real_rejects_singular() {
        let a = array![[1.0f64, 2.0], [2.0, 4.0]];
        let b = array![[1.0f64], [2.0]];
        assert!(solve_real(&a, &b).is_none());
    }

    #[test]
    fn solve_complex_roundtrip() {
        let mut seed = 99u64;
        let n = 5;
        let mut a = Array2::<Complex<f64>>::zeros((n, n));
        let mut x_true = Array1::<Complex<f64>>::zeros(n);
        for i in 0..n {
            x_true[i] = Complex::new(lcg(&mut seed), lcg(&mut seed));
            for j in 0..n {
                a[[i, j]] = Complex::new(lcg(&mut seed), lcg(&mut seed));
            }
        }
        let b = a.dot(&x_true);
        let x = solve_complex(&a, &b).unwrap();
        for i in 0..n {
            assert_relative_eq!(x[i].re, x_true[i].re, max_relative = 1e-10, epsilon = 1e-10);
            assert_relative_eq!(x[i].im, x_true[i].im, max_relative = 1e-10, epsilon = 1e-10);
        }
    }

    #[test]
    fn generic_instantiation_compiles_for_f32() {
        let a = array![[2.0f32, 1.0], [1.0, 2.0]];
        let eig = symmetric_eigen(&a);
        assert!((eig.values[0] - 3.0).abs() < 1e-5);
    }
}
