//! Walker metrics in the canonical frame and their Levi-Civita curvature.
//!
//! Coordinates are ordered `(x1, x2, x3, x4)`; every index in this module is
//! 0-based, so `R_1314` is `tensor.get(0, 2, 0, 3)`.
//!
//! Curvature convention: `R(x,y) = [∇_x, ∇_y] - ∇_[x,y]` and
//! `R_ijkl = g(R(∂i,∂j)∂k, ∂l)`.

use crate::error::{Error, Result};
use crate::fields::{Jet1, Jet2, Point, ScalarField};
use crate::linalg::Mat;
use crate::scalar::Scalar;

pub type Tensor4<T> = [[[[T; 4]; 4]; 4]; 4];

/// Sign relating the closed-form restricted table to the general pipeline.
/// Fixed once by the oracle comparison tests.
pub const TABLE_SIGN: f64 = 1.0;

/// Metric `[[0, I2], [I2, C]]` with `C = [[g33, g34], [g34, g44]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkerMetric {
    g33: ScalarField,
    g44: ScalarField,
    g34: ScalarField,
    restricted: bool,
}

impl WalkerMetric {
    pub fn new(g33: ScalarField, g44: ScalarField, g34: ScalarField) -> Self {
        let restricted = g33.is_zero() && g44.is_zero();
        WalkerMetric { g33, g44, g34, restricted }
    }

    /// `g33 = g44 = 0`.
    pub fn restricted(g34: ScalarField) -> Self {
        Self::new(ScalarField::zero(), ScalarField::zero(), g34)
    }

    pub fn flat() -> Self {
        Self::restricted(ScalarField::zero())
    }

    pub fn g33(&self) -> &ScalarField {
        &self.g33
    }

    pub fn g44(&self) -> &ScalarField {
        &self.g44
    }

    pub fn g34(&self) -> &ScalarField {
        &self.g34
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    /// Jets of `(g33, g34, g44)`.
    pub fn jets<T: Scalar>(&self, p: &Point<T, 4>) -> Result<[Jet2<T, 4>; 3]> {
        Ok([self.g33.eval_jet2(p)?, self.g34.eval_jet2(p)?, self.g44.eval_jet2(p)?])
    }

    /// Jets of all sixteen metric entries.
    pub fn metric_jets<T: Scalar>(&self, p: &Point<T, 4>) -> Result<[[Jet2<T, 4>; 4]; 4]> {
        let [g33, g34, g44] = self.jets(p)?;
        let zero = Jet2::constant(T::zero());
        let one = Jet2::constant(T::one());
        let mut g = [[zero; 4]; 4];
        g[0][2] = one;
        g[2][0] = one;
        g[1][3] = one;
        g[3][1] = one;
        g[2][2] = g33;
        g[3][3] = g44;
        g[2][3] = g34;
        g[3][2] = g34;
        Ok(g)
    }
}

fn frame<T: Scalar>(c33: T, c34: T, c44: T, inverse: bool) -> Mat<T, 4> {
    let mut m = Mat::zeros();
    m[(0, 2)] = T::one();
    m[(2, 0)] = T::one();
    m[(1, 3)] = T::one();
    m[(3, 1)] = T::one();
    let (r, s) = if inverse { (0, -T::one()) } else { (2, T::one()) };
    m[(r, r)] = s * c33;
    m[(r, r + 1)] = s * c34;
    m[(r + 1, r)] = s * c34;
    m[(r + 1, r + 1)] = s * c44;
    m
}

pub fn metric_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<Mat<T, 4>> {
    let [g33, g34, g44] = m.jets(p)?;
    Ok(frame(g33.value, g34.value, g44.value, false))
}

/// Inverse in closed form: `[[-C, I2], [I2, 0]]`.
pub fn inverse_metric_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<Mat<T, 4>> {
    let [g33, g34, g44] = m.jets(p)?;
    Ok(frame(g33.value, g34.value, g44.value, true))
}

/// Christoffel symbols `Γ^k_ij`, stored as `symbols[k][i][j]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel<T> {
    pub symbols: [[[T; 4]; 4]; 4],
}

/// Christoffel symbols carried as first-order jets, so their coordinate
/// derivatives come from the metric's second derivatives.
fn christoffel_jets<T: Scalar>(g: &[[Jet2<T, 4>; 4]; 4]) -> [[[Jet1<T, 4>; 4]; 4]; 4] {
    let value = Mat::<T, 4>::from_fn(|r, c| g[r][c].value);
    let inv = frame(g[2][2].value, g[2][3].value, g[3][3].value, true);
    // ∂_m g^{-1} = -g^{-1} (∂_m g) g^{-1}
    let dinv: [Mat<T, 4>; 4] = std::array::from_fn(|m| {
        let dg = Mat::from_fn(|r, c| g[r][c].grad[m]);
        -(inv * dg * inv)
    });
    debug_assert!((inv * value - Mat::identity()).max_abs() <= T::lit(1e-6) * (T::one() + value.max_abs()));
    let ginv: [[Jet1<T, 4>; 4]; 4] = std::array::from_fn(|r| {
        std::array::from_fn(|c| Jet1 { value: inv[(r, c)], grad: std::array::from_fn(|m| dinv[m][(r, c)]) })
    });
    // d[l][i][j] = first-order jet of ∂_l g_ij
    let d: [[[Jet1<T, 4>; 4]; 4]; 4] =
        std::array::from_fn(|l| std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].partial(l))));
    let mut out = [[[Jet1::default(); 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let mut acc = Jet1::default();
                for l in 0..4 {
                    let bracket = d[i][j][l] + d[j][i][l] - d[l][i][j];
                    acc = acc + ginv[k][l] * bracket;
                }
                let sym = acc.scale(T::half());
                out[k][i][j] = sym;
                out[k][j][i] = sym;
            }
        }
    }
    out
}

pub fn christoffel_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<Christoffel<T>> {
    let jets = christoffel_jets(&m.metric_jets(p)?);
    Ok(Christoffel { symbols: jets.map(|a| a.map(|b| b.map(|c| c.value))) })
}

/// Fully covariant curvature components `R_ijkl` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureTensor<T> {
    pub components: Tensor4<T>,
}

impl<T: Scalar> CurvatureTensor<T> {
    pub fn zeros() -> Self {
        CurvatureTensor { components: [[[[T::zero(); 4]; 4]; 4]; 4] }
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.components[i][j][k][l]
    }

    /// Sets `R_ijkl = v` together with its skew/pair-symmetry orbit.
    pub fn set_orbit(&mut self, i: usize, j: usize, k: usize, l: usize, v: T) {
        for (a, b, c, d) in [(i, j, k, l), (k, l, i, j)] {
            self.components[a][b][c][d] = v;
            self.components[b][a][c][d] = -v;
            self.components[a][b][d][c] = -v;
            self.components[b][a][d][c] = v;
        }
    }

    pub fn max_abs(&self) -> T {
        self.components.iter().flatten().flatten().flatten().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    /// Largest violation of `R_ijkl = -R_jikl = -R_ijlk = R_klij`.
    pub fn symmetry_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, j, k, l) in indices() {
            let r = self.get(i, j, k, l);
            worst = worst
                .max((r + self.get(j, i, k, l)).abs())
                .max((r + self.get(i, j, l, k)).abs())
                .max((r - self.get(k, l, i, j)).abs());
        }
        worst
    }

    /// Largest `|R_ijkl + R_iklj + R_iljk|`.
    pub fn bianchi_residual(&self) -> T {
        indices().fold(T::zero(), |worst, (i, j, k, l)| {
            worst.max((self.get(i, j, k, l) + self.get(i, k, l, j) + self.get(i, l, j, k)).abs())
        })
    }

    /// Largest componentwise difference.
    pub fn max_diff(&self, other: &Self) -> T {
        indices().fold(T::zero(), |worst, (i, j, k, l)| worst.max((self.get(i, j, k, l) - other.get(i, j, k, l)).abs()))
    }

    /// Orbit representatives `(i<j, k<l, (i,j) <= (k,l))` with `|R| > tol`.
    pub fn independent_nonzero(&self, tol: T) -> Vec<([usize; 4], T)> {
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| ((i + 1)..4).map(move |j| (i, j))).collect();
        let mut out = Vec::new();
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[a..] {
                let v = self.get(i, j, k, l);
                if v.abs() > tol {
                    out.push(([i, j, k, l], v));
                }
            }
        }
        out
    }
}

pub(crate) fn indices() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..4).flat_map(|i| (0..4).flat_map(move |j| (0..4).flat_map(move |k| (0..4).map(move |l| (i, j, k, l)))))
}

/// Everything the operator layer needs at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointCurvature<T> {
    pub metric: Mat<T, 4>,
    pub inverse: Mat<T, 4>,
    pub christoffel: Christoffel<T>,
    /// `R_ijkl`.
    pub tensor: CurvatureTensor<T>,
    /// `endo[i][j][k][l]`: component `l` of `R(∂i,∂j)∂k`.
    pub endo: Tensor4<T>,
}

pub fn point_curvature<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<PointCurvature<T>> {
    let g = m.metric_jets(p)?;
    let gamma = christoffel_jets(&g);
    let metric = Mat::from_fn(|r, c| g[r][c].value);
    let inverse = frame(g[2][2].value, g[2][3].value, g[3][3].value, true);
    let zero = T::zero();
    let mut endo = [[[[zero; 4]; 4]; 4]; 4];
    for (i, j, k, l) in indices() {
        let mut v = gamma[l][j][k].grad[i] - gamma[l][i][k].grad[j];
        for mm in 0..4 {
            v = v + gamma[l][i][mm].value * gamma[mm][j][k].value - gamma[l][j][mm].value * gamma[mm][i][k].value;
        }
        endo[i][j][k][l] = v;
    }
    let mut tensor = CurvatureTensor::zeros();
    for (i, j, k, l) in indices() {
        tensor.components[i][j][k][l] = (0..4).fold(zero, |acc, mm| acc + endo[i][j][k][mm] * metric[(mm, l)]);
    }
    let christoffel = Christoffel { symbols: gamma.map(|a| a.map(|b| b.map(|c| c.value))) };
    Ok(PointCurvature { metric, inverse, christoffel, tensor, endo })
}

pub fn curvature_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<CurvatureTensor<T>> {
    Ok(point_curvature(m, p)?.tensor)
}

/// The nine components of the closed-form table (1-based), one per orbit.
pub const TABLE_COMPONENTS: [[usize; 4]; 9] = [
    [1, 3, 3, 4],
    [1, 3, 1, 4],
    [1, 4, 3, 4],
    [1, 3, 2, 4],
    [2, 3, 3, 4],
    [1, 4, 2, 3],
    [2, 4, 3, 4],
    [2, 3, 2, 4],
    [3, 4, 3, 4],
];

/// Whether the 0-based index `(i, j, k, l)` lies in the skew/pair orbit of
/// a table component.
pub fn in_table_orbit(i: usize, j: usize, k: usize, l: usize) -> bool {
    let unordered = |a: usize, b: usize| if a < b { (a + 1, b + 1) } else { (b + 1, a + 1) };
    let (x, y) = (unordered(i, j), unordered(k, l));
    TABLE_COMPONENTS.iter().any(|c| {
        let (p, q) = ((c[0], c[1]), (c[2], c[3]));
        (x, y) == (p, q) || (x, y) == (q, p)
    })
}

/// Closed-form curvature of a restricted metric from the jets of `g34`:
/// nine component families, completed by symmetry, everything else zero.
pub fn curvature_table_1b<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<CurvatureTensor<T>> {
    if !m.is_restricted() {
        return Err(Error::Usage("closed-form table requires g33 = g44 = 0".into()));
    }
    let f = m.g34().eval_jet2(p)?;
    let g = f.value;
    let d = |i: usize| f.grad[i - 1];
    let dd = |i: usize, j: usize| f.hess[i - 1][j - 1];
    let quarter = T::lit(0.25);
    let half = T::half();
    let two = T::two();
    let sign = T::lit(TABLE_SIGN);
    // same order as TABLE_COMPONENTS
    let values = [
        -quarter * (d(1) * d(2) - two * dd(1, 3)),
        half * dd(1, 1),
        -quarter * (-d(1) * d(1) + two * dd(1, 4)),
        half * dd(1, 2),
        -quarter * (d(2) * d(2) - two * dd(2, 3)),
        half * dd(1, 2),
        -quarter * (-d(1) * d(2) + two * dd(2, 4)),
        half * dd(2, 2),
        -half * (-g * d(1) * d(2) + two * dd(3, 4)),
    ];
    let mut r = CurvatureTensor::zeros();
    for ([i, j, k, l], v) in TABLE_COMPONENTS.into_iter().zip(values) {
        r.set_orbit(i - 1, j - 1, k - 1, l - 1, sign * v);
    }
    Ok(r)
}
