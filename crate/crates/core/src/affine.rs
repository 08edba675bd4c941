//! Torsion-free affine connections on a surface with coordinates `(x3, x4)`
//! and their deformed Riemannian extensions to Walker metrics.
//!
//! Base indices are 0-based: `0` is `x3`, `1` is `x4`.

use crate::error::{Error, Result};
use crate::fields::{Jet2, Point, ScalarField};
use crate::linalg::Mat;
use crate::properties::{sample_vectors, Property, PropertyEntry, Thresholds, Witness};
use crate::scalar::Scalar;
use crate::walker::WalkerMetric;

/// Christoffel symbols `Γ_ij^k` of a torsion-free connection, all functions
/// of `(x3, x4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineConnection2 {
    /// `symbols[s]` for the symmetric pair `s` (`33`, `34`, `44`) and upper index.
    symbols: [[ScalarField; 2]; 3],
}

fn pair_slot(i: usize, j: usize) -> usize {
    i + j
}

impl AffineConnection2 {
    /// Arguments in the order `Γ33³, Γ33⁴, Γ34³, Γ34⁴, Γ44³, Γ44⁴`.
    pub fn new(fields: [ScalarField; 6]) -> Result<Self> {
        if let Some(f) = fields.iter().find(|f| !f.is_base_only()) {
            return Err(Error::Parameter(format!("Christoffel symbol `{f}` must depend on x3, x4 only")));
        }
        let [a, b, c, d, e, f] = fields;
        Ok(AffineConnection2 { symbols: [[a, b], [c, d], [e, f]] })
    }

    pub fn flat() -> Self {
        AffineConnection2 { symbols: std::array::from_fn(|_| [ScalarField::zero(), ScalarField::zero()]) }
    }

    /// Only `Γ34³ = -p/2` and `Γ34⁴ = -q/2` nonzero.
    pub fn from_pq(p: ScalarField, q: ScalarField) -> Result<Self> {
        let half = ScalarField::constant(-0.5);
        let z = ScalarField::zero;
        Self::new([z(), z(), half.clone() * p, half * q, z(), z()])
    }

    /// `Γ_ij^k`, base indices 0-based.
    pub fn symbol(&self, i: usize, j: usize, k: usize) -> &ScalarField {
        &self.symbols[pair_slot(i, j)][k]
    }

    /// The six symbols in constructor order.
    pub fn fields(&self) -> [&ScalarField; 6] {
        let s = &self.symbols;
        [&s[0][0], &s[0][1], &s[1][0], &s[1][1], &s[2][0], &s[2][1]]
    }

    /// Symbols that [`riemannian_extension`] must find zero for a restricted
    /// metric all vanish.
    pub fn has_parallel_null_lines(&self) -> bool {
        [&self.symbols[0][0], &self.symbols[0][1], &self.symbols[2][0], &self.symbols[2][1]].iter().all(|f| f.is_zero())
    }
}

/// `R(∂3, ∂4)` on the base: column `k` holds `R(∂3, ∂4)∂k`.
pub fn affine_curvature_at<T: Scalar>(a: &AffineConnection2, p: &Point<T, 2>) -> Result<Mat<T, 2>> {
    let mut jets: Vec<[Jet2<T, 2>; 2]> = Vec::with_capacity(3);
    for pair in &a.symbols {
        jets.push([pair[0].eval_jet2(p)?, pair[1].eval_jet2(p)?]);
    }
    let g = |i: usize, j: usize, k: usize| &jets[pair_slot(i, j)][k];
    let (i, j) = (0, 1);
    Ok(Mat::from_fn(|l, k| {
        let mut v = g(j, k, l).grad[i] - g(i, k, l).grad[j];
        for m in 0..2 {
            v = v + g(i, m, l).value * g(j, k, m).value - g(j, m, l).value * g(i, k, m).value;
        }
        v
    }))
}

/// Affine Ricci tensor `ρ(x, y) = Tr{z ↦ R(z, x) y}` and its symmetric and
/// antisymmetric parts. The parts are symmetric and antisymmetric bitwise;
/// their sum reproduces `full` up to one rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineRicci<T> {
    pub full: Mat<T, 2>,
    pub sym: Mat<T, 2>,
    pub anti: Mat<T, 2>,
}

impl<T: Scalar> AffineRicci<T> {
    pub fn from_curvature(r34: &Mat<T, 2>) -> Self {
        // only R(∂3,∂4) = -R(∂4,∂3) survives in two dimensions
        let full = Mat::from_fn(|i, j| if i == 0 { -r34[(1, j)] } else { r34[(0, j)] });
        let sym = Mat::from_fn(|i, j| (full[(i, j)] + full[(j, i)]) * T::half());
        let anti = Mat::from_fn(|i, j| {
            if i == j {
                T::zero()
            } else if i < j {
                (full[(i, j)] - full[(j, i)]) * T::half()
            } else {
                -((full[(j, i)] - full[(i, j)]) * T::half())
            }
        });
        AffineRicci { full, sym, anti }
    }
}

pub fn affine_ricci_at<T: Scalar>(a: &AffineConnection2, p: &Point<T, 2>) -> Result<AffineRicci<T>> {
    Ok(AffineRicci::from_curvature(&affine_curvature_at(a, p)?))
}

/// Closed-form Ricci tensor of the connection whose only symbols are
/// `Γ34³ = -p/2`, `Γ34⁴ = -q/2`; an oracle for [`affine_ricci_at`].
pub fn pq_ricci_closed_form(p: &ScalarField, q: &ScalarField, pt: &Point<f64, 2>) -> Result<Mat<f64, 2>> {
    let pj = p.eval_jet2(pt)?;
    let qj = q.eval_jet2(pt)?;
    let (p, q) = (pj.value, qj.value);
    let (p3, p4, q3, q4) = (pj.grad[0], pj.grad[1], qj.grad[0], qj.grad[1]);
    Ok(Mat([[0.5 * q3 - 0.25 * q * q, 0.25 * p * q - 0.5 * q4], [0.25 * p * q - 0.5 * p3, 0.5 * p4 - 0.25 * p * p]]))
}

/// `J(x) y = R(y, x) x` on the base.
pub fn affine_jacobi<T: Scalar>(r34: &Mat<T, 2>, x: &[T; 2]) -> Mat<T, 2> {
    let rx = r34.mul_vec(x);
    // R(y, x) = (y3 x4 - y4 x3) R(∂3, ∂4)
    Mat::from_fn(|l, c| rx[l] * if c == 0 { x[1] } else { -x[0] })
}

/// Affine Osserman: every `J(x)` nilpotent, decided by trace and determinant.
pub fn check_affine_osserman(
    a: &AffineConnection2,
    p: &Point<f64, 2>,
    samples: usize,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<PropertyEntry> {
    let r = affine_curvature_at(a, p)?;
    let mut worst = 0.0f64;
    let mut at = 0;
    for (n, v) in sample_vectors(seed).take(samples).enumerate() {
        let j = affine_jacobi(&r, &[v[0], v[1]]);
        let m = j.max_abs();
        let res = (j.trace().abs() / (1.0 + m)).max(j.det().abs() / (1.0 + m * m));
        if res > worst || res.is_nan() {
            worst = res;
            at = n;
            if res.is_nan() {
                break;
            }
        }
    }
    let witness = Witness { point: p.0.to_vec(), indices: vec![at] };
    Ok(PropertyEntry::new(Property::AffineOsserman, worst, thresholds.get(Property::AffineOsserman), witness))
}

/// Deformed Riemannian extension:
/// `g_ij = -2 x1 Γ_ij³ - 2 x2 Γ_ij⁴ + ξ_ij` for `ij ∈ {33, 34, 44}`.
/// `xi` holds `ξ33, ξ34, ξ44`, each a function of `(x3, x4)`.
pub fn riemannian_extension(a: &AffineConnection2, xi: [ScalarField; 3]) -> Result<WalkerMetric> {
    if let Some(f) = xi.iter().find(|f| !f.is_base_only()) {
        return Err(Error::Parameter(format!("deformation `{f}` must depend on x3, x4 only")));
    }
    let entry = |s: usize, xi: ScalarField| {
        let m2 = ScalarField::constant(-2.0);
        m2.clone() * ScalarField::coord(1) * a.symbols[s][0].clone()
            + m2 * ScalarField::coord(2) * a.symbols[s][1].clone()
            + xi
    };
    let [x33, x34, x44] = xi;
    let restricted = a.has_parallel_null_lines() && x33.is_zero() && x44.is_zero();
    let m = WalkerMetric::new(entry(0, x33), entry(2, x44), entry(1, x34));
    debug_assert_eq!(m.is_restricted(), restricted);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{lemma14_pq, parse_field};

    fn base(src: &str) -> ScalarField {
        parse_field(src, 2).unwrap()
    }

    fn conn(src: [&str; 6]) -> AffineConnection2 {
        AffineConnection2::new(src.map(base)).unwrap()
    }

    const Q: [f64; 2] = [0.35, -0.6];

    #[test]
    fn flat_connection() {
        let a = AffineConnection2::flat();
        assert_eq!(affine_curvature_at(&a, &Point(Q)).unwrap(), Mat::zeros());
        let m = riemannian_extension(&a, [ScalarField::zero(), ScalarField::zero(), ScalarField::zero()]).unwrap();
        assert_eq!(m, WalkerMetric::flat());
        assert!(m.is_restricted());
    }

    #[test]
    fn pq_connection_matches_closed_form() {
        let p = base("x3^2 - x4");
        let q = base("sin(x3) * x4");
        let a = AffineConnection2::from_pq(p.clone(), q.clone()).unwrap();
        let pt = Point(Q);
        let r = affine_curvature_at(&a, &pt).unwrap();
        let (pj, qj) = (p.eval_jet2(&pt).unwrap(), q.eval_jet2(&pt).unwrap());
        let (pv, qv) = (pj.value, qj.value);
        let (p3, p4, q3, q4) = (pj.grad[0], pj.grad[1], qj.grad[0], qj.grad[1]);
        assert!((r[(0, 0)] - (0.25 * pv * qv - 0.5 * p3)).abs() < 1e-12);
        assert!((r[(1, 0)] - (0.25 * qv * qv - 0.5 * q3)).abs() < 1e-12);
        // R(∂3,∂4)∂4 = (½p_4 - ¼p²)∂3 + (½q_4 - ¼pq)∂4 by the same contraction
        assert!((r[(0, 1)] - (0.5 * p4 - 0.25 * pv * pv)).abs() < 1e-12);
        assert!((r[(1, 1)] - (0.5 * q4 - 0.25 * pv * qv)).abs() < 1e-12);
    }

    #[test]
    fn pq_ricci_matches_closed_form() {
        let (p, q) = (base("x3*x4^2 - 1"), base("cos(x4) + x3"));
        let a = AffineConnection2::from_pq(p.clone(), q.clone()).unwrap();
        for pt in [Point(Q), Point([1.2, 0.4])] {
            let got = affine_ricci_at(&a, &pt).unwrap().full;
            assert!((got - pq_ricci_closed_form(&p, &q, &pt).unwrap()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn lemma_connection_is_ricci_flat() {
        let (p, q) = lemma14_pq(1.0, 1.0, 1.0).unwrap();
        let a = AffineConnection2::from_pq(p, q).unwrap();
        let rho = affine_ricci_at(&a, &Point(Q)).unwrap();
        assert!(rho.full.max_abs() < 1e-10, "{rho:?}");
    }

    #[test]
    fn identity_curvature_connection() {
        let a = conn(["0", "0", "x3", "0", "0", "x3"]);
        let r = affine_curvature_at(&a, &Point(Q)).unwrap();
        assert_eq!(r, Mat::identity());
        let rho = affine_ricci_at(&a, &Point(Q)).unwrap();
        assert_eq!(rho.sym, Mat::zeros());
        assert_eq!(rho.anti.0, [[0.0, -1.0], [1.0, 0.0]]);
        let e = check_affine_osserman(&a, &Point(Q), 30, 7, &Thresholds::default()).unwrap();
        assert!(e.holds(), "{e:?}");
    }

    #[test]
    fn shear_connection() {
        let a = conn(["0", "x4", "0", "0", "0", "0"]);
        let rho = affine_ricci_at(&a, &Point(Q)).unwrap();
        assert_eq!(rho.full.0, [[1.0, 0.0], [0.0, 0.0]]);
        assert_eq!(rho.anti, Mat::zeros());
        let e = check_affine_osserman(&a, &Point(Q), 30, 7, &Thresholds::default()).unwrap();
        assert!(e.fails_robustly(), "{e:?}");
    }

    #[test]
    fn ricci_parts_are_exactly_symmetric_and_skew() {
        let a = conn(["x3*x4", "cos(x4)", "x3^2", "exp(x3)", "x4 - x3", "1/(2 + x3^2)"]);
        let rho = affine_ricci_at(&a, &Point(Q)).unwrap();
        assert_eq!(rho.sym[(0, 1)], rho.sym[(1, 0)]);
        assert_eq!(rho.anti[(0, 1)], -rho.anti[(1, 0)]);
        assert_eq!((rho.anti[(0, 0)], rho.anti[(1, 1)]), (0.0, 0.0));
        assert!((rho.sym + rho.anti - rho.full).max_abs() <= 1e-15 * (1.0 + rho.full.max_abs()));
    }

    #[test]
    fn extension_of_pq_connection() {
        let (p, q) = lemma14_pq(2.0, 1.0, 0.0).unwrap();
        let a = AffineConnection2::from_pq(p.clone(), q.clone()).unwrap();
        let s = base("x3*x4");
        let m = riemannian_extension(&a, [ScalarField::zero(), s.clone(), ScalarField::zero()]).unwrap();
        assert!(m.is_restricted());
        let pt = Point([0.3f64, -0.7, 1.1, 0.9]);
        let want = (ScalarField::coord(1) * p + ScalarField::coord(2) * q + s).eval_jet2(&pt).unwrap();
        let got = m.g34().eval_jet2(&pt).unwrap();
        assert!((got.value - want.value).abs() < 1e-12);
        assert!(got.hess[0][0] == 0.0 && got.hess[0][1] == 0.0 && got.hess[1][1] == 0.0);
    }

    #[test]
    fn extension_of_identity_curvature_connection_is_not_restricted() {
        let a = conn(["0", "0", "x3", "0", "0", "x3"]);
        let m = riemannian_extension(&a, [ScalarField::zero(), ScalarField::zero(), ScalarField::zero()]).unwrap();
        assert!(!m.is_restricted());
        let pt = Point([0.3, -0.7, 1.1, 0.9]);
        assert!((m.g44().eval(&pt).unwrap() - (-2.0 * -0.7 * 1.1)).abs() < 1e-15);
        assert!((m.g34().eval(&pt).unwrap() - (-2.0 * 0.3 * 1.1)).abs() < 1e-15);
    }

    #[test]
    fn rejects_fiber_coordinates() {
        let x1 = ScalarField::coord(1);
        let z = ScalarField::zero;
        assert!(AffineConnection2::new([x1.clone(), z(), z(), z(), z(), z()]).is_err());
        assert!(riemannian_extension(&AffineConnection2::flat(), [z(), x1, z()]).is_err());
    }
}
