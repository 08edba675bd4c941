//! Small fixed-size dense matrices and the characteristic-polynomial helpers
//! used by the operator checks.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Scalar;

/// Square `N x N` matrix stored row-major. Acting on column vectors, so
/// column `c` holds the image of the `c`-th basis vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<T, const N: usize>(pub [[T; N]; N]);

impl<T: Scalar, const N: usize> Default for Mat<T, N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Scalar, const N: usize> Mat<T, N> {
    pub fn zeros() -> Self {
        Mat([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|r, c| if r == c { T::one() } else { T::zero() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros();
        for r in 0..N {
            for c in 0..N {
                m.0[r][c] = f(r, c);
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|r, c| self.0[c][r])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|r, c| self.0[r][c] * s)
    }

    pub fn trace(&self) -> T {
        (0..N).fold(T::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn frobenius(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn mul_vec(&self, v: &[T; N]) -> [T; N] {
        let mut out = [T::zero(); N];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..N).fold(T::zero(), |acc, c| acc + self.0[r][c] * v[c]);
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> T {
        let mut a = self.0;
        let mut det = T::one();
        for col in 0..N {
            let pivot = (col..N).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap_or(col);
            if a[pivot][col] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det = det * a[col][col];
            for r in (col + 1)..N {
                let factor = a[r][col] / a[col][col];
                for c in col..N {
                    a[r][c] = a[r][c] - factor * a[col][c];
                }
            }
        }
        det
    }

    /// Coefficients `[1, c1, ..., cN]` of `det(t I - A) = t^N + c1 t^(N-1) + ... + cN`
    /// (Faddeev-LeVerrier).
    pub fn charpoly(&self) -> Vec<T> {
        let mut coeffs = Vec::with_capacity(N + 1);
        coeffs.push(T::one());
        let mut m = Self::zeros();
        for k in 1..=N {
            m = *self * m + Self::identity().scale(coeffs[k - 1]);
            let am = *self * m;
            coeffs.push(-am.trace() / T::lit(k as f64));
        }
        coeffs
    }
}

impl<T: Scalar, const N: usize> Index<(usize, usize)> for Mat<T, N> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.0[r][c]
    }
}

impl<T: Scalar, const N: usize> IndexMut<(usize, usize)> for Mat<T, N> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.0[r][c]
    }
}

impl<T: Scalar, const N: usize> Add for Mat<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| self.0[r][c] + rhs.0[r][c])
    }
}

impl<T: Scalar, const N: usize> Sub for Mat<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| self.0[r][c] - rhs.0[r][c])
    }
}

impl<T: Scalar, const N: usize> Neg for Mat<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|r, c| -self.0[r][c])
    }
}

impl<T: Scalar, const N: usize> Mul for Mat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|r, c| (0..N).fold(T::zero(), |acc, k| acc + self.0[r][k] * rhs.0[k][c]))
    }
}

/// Bilinear form `x^T g y`.
pub fn bilinear<T: Scalar, const N: usize>(g: &Mat<T, N>, x: &[T; N], y: &[T; N]) -> T {
    let gy = g.mul_vec(y);
    x.iter().zip(gy.iter()).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Roots of a monic polynomial given as `[1, c1, ..., cn]` (highest degree
/// first). These are the eigenvalues of the companion matrix; they are found
/// with Weierstrass (Durand-Kerner) iteration, which converges for clustered
/// and repeated roots as well, linearly in the repeated case.
pub fn monic_roots<T: Scalar>(coeffs: &[T]) -> Vec<Complex<T>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: Complex<T>| {
        coeffs.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + Complex::new(c, T::zero()))
    };
    // Cauchy bound on the root moduli sets the starting circle.
    let radius = T::one() + coeffs[1..].iter().fold(T::zero(), |acc, c| acc.max(c.abs()));
    let seed = Complex::new(T::lit(0.4), T::lit(0.9));
    let mut z: Vec<Complex<T>> =
        (0..n).map(|k| seed.powu(k as u32 + 1) * radius / seed.norm().powi(k as i32 + 1)).collect();
    let tol = T::epsilon() * T::lit(4.0);
    for _ in 0..5000 {
        let mut max_step = T::zero();
        for i in 0..n {
            let mut denom = Complex::new(T::one(), T::zero());
            for j in 0..n {
                if i != j {
                    denom = denom * (z[i] - z[j]);
                }
            }
            if denom.norm() == T::zero() {
                denom = Complex::new(tol, tol);
            }
            let step = eval(z[i]) / denom;
            z[i] = z[i] - step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= tol * radius {
            break;
        }
    }
    z.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    z
}

/// Replaces each group of roots lying within `tol` of one another by the
/// group mean. A root of multiplicity m moves by O(δ^(1/m)) under a
/// coefficient perturbation δ, while the mean of its group moves by O(δ).
pub fn merge_root_clusters<T: Scalar>(roots: &[Complex<T>], tol: T) -> Vec<Complex<T>> {
    let n = roots.len();
    let mut group: Vec<usize> = (0..n).collect();
    // single-linkage grouping, small n
    for i in 0..n {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= tol {
                let (from, to) = (group[i], group[j]);
                for g in group.iter_mut() {
                    if *g == from {
                        *g = to;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            let members: Vec<Complex<T>> = (0..n).filter(|&j| group[j] == group[i]).map(|j| roots[j]).collect();
            let count = T::from_usize(members.len()).expect("small count");
            members.iter().fold(Complex::new(T::zero(), T::zero()), |a, &z| a + z) / count
        })
        .collect()
}
