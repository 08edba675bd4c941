//! Curvature operators at a point: Ricci, Jacobi (plain and polarized),
//! skew-symmetric curvature, the Weyl tensor and its split under the Hodge
//! star on two-forms.
//!
//! Matrices act on coordinate columns: entry `(r, c)` is component `r` of the
//! image of `∂c`. All indices are 0-based.

use crate::error::Result;
use crate::fields::Point;
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::walker::{indices, point_curvature, CurvatureTensor, PointCurvature, WalkerMetric};

/// Endomorphism of the tangent space in the coordinate basis.
pub type Operator4<T> = Mat<T, 4>;
/// Endomorphism of two-forms in the basis [`TWO_FORM_BASIS`].
pub type TwoFormOperator<T> = Mat<T, 6>;

/// Ordered basis `e1∧e2, e1∧e3, e1∧e4, e2∧e3, e2∧e4, e3∧e4` (0-based pairs).
pub const TWO_FORM_BASIS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Which star eigenspace carries the self-dual Weyl half under the
/// `dx1∧dx2∧dx3∧dx4` orientation: `true` means `P+ = (I + ⋆)/2`.
/// Fixed by the `self_dual_calibration` test.
pub const SELF_DUAL_IS_PLUS: bool = true;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ricci<T> {
    /// `ρ(∂a, ∂b) = Tr{z ↦ R(z, ∂a)∂b}`.
    pub tensor: Mat<T, 4>,
    /// `g^{-1} ρ`, so that `g(ρ x, y) = ρ(x, y)`.
    pub operator: Operator4<T>,
}

pub fn ricci<T: Scalar>(pc: &PointCurvature<T>) -> Ricci<T> {
    let tensor = Mat::from_fn(|a, b| (0..4).fold(T::zero(), |acc, k| acc + pc.endo[k][a][b][k]));
    Ricci { tensor, operator: pc.inverse * tensor }
}

pub fn ricci_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<Ricci<T>> {
    Ok(ricci(&point_curvature(m, p)?))
}

/// `J(x) y = R(y, x) x`.
pub fn jacobi<T: Scalar>(pc: &PointCurvature<T>, x: &[T; 4]) -> Operator4<T> {
    jacobi_polarized(pc, x, x)
}

pub fn jacobi_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>, x: &[T; 4]) -> Result<Operator4<T>> {
    Ok(jacobi(&point_curvature(m, p)?, x))
}

/// `J(x, y) z = ½ (R(z, x) y + R(z, y) x)`.
pub fn jacobi_polarized<T: Scalar>(pc: &PointCurvature<T>, x: &[T; 4], y: &[T; 4]) -> Operator4<T> {
    let mut out = Mat::zeros();
    for (b, i, j, l) in indices() {
        let w = (x[i] * y[j] + y[i] * x[j]) * T::half();
        out[(l, b)] = out[(l, b)] + pc.endo[b][i][j][l] * w;
    }
    out
}

pub fn jacobi_polarized_at<T: Scalar>(
    m: &WalkerMetric,
    p: &Point<T, 4>,
    x: &[T; 4],
    y: &[T; 4],
) -> Result<Operator4<T>> {
    Ok(jacobi_polarized(&point_curvature(m, p)?, x, y))
}

/// `R(x, y)` as the endomorphism `z ↦ R(x, y) z`.
pub fn skew_curvature<T: Scalar>(pc: &PointCurvature<T>, x: &[T; 4], y: &[T; 4]) -> Operator4<T> {
    let mut out = Mat::zeros();
    for (i, j, k, l) in indices() {
        out[(l, k)] = out[(l, k)] + pc.endo[i][j][k][l] * x[i] * y[j];
    }
    out
}

pub fn skew_curv_op_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>, x: &[T; 4], y: &[T; 4]) -> Result<Operator4<T>> {
    Ok(skew_curvature(&point_curvature(m, p)?, x, y))
}

/// Coordinate basis vector `∂(k+1)`.
pub fn basis<T: Scalar>(k: usize) -> [T; 4] {
    std::array::from_fn(|i| if i == k { T::one() } else { T::zero() })
}

pub fn scalar_curvature<T: Scalar>(ricci: &Ricci<T>) -> T {
    ricci.operator.trace()
}

/// Kulkarni-Nomizu product `(h ⊙ k)_abcd = h_ad k_bc + h_bc k_ad - h_ac k_bd - h_bd k_ac`.
fn kulkarni_nomizu<T: Scalar>(h: &Mat<T, 4>, k: &Mat<T, 4>, a: usize, b: usize, c: usize, d: usize) -> T {
    h[(a, d)] * k[(b, c)] + h[(b, c)] * k[(a, d)] - h[(a, c)] * k[(b, d)] - h[(b, d)] * k[(a, c)]
}

/// `W = R - ½ ρ⊙g + (S/12) g⊙g`, in the lowered convention of
/// [`CurvatureTensor`].
pub fn weyl_tensor<T: Scalar>(pc: &PointCurvature<T>, ricci: &Ricci<T>) -> CurvatureTensor<T> {
    let g = &pc.metric;
    let s = scalar_curvature(ricci) / T::lit(12.0);
    let mut w = CurvatureTensor::zeros();
    for (a, b, c, d) in indices() {
        w.components[a][b][c][d] = pc.tensor.get(a, b, c, d)
            - T::half() * kulkarni_nomizu(&ricci.tensor, g, a, b, c, d)
            + s * kulkarni_nomizu(g, g, a, b, c, d);
    }
    w
}

/// Largest `|g^{ad} W_abcd|`.
pub fn trace_residual<T: Scalar>(w: &CurvatureTensor<T>, inverse: &Mat<T, 4>) -> T {
    let mut worst = T::zero();
    for b in 0..4 {
        for c in 0..4 {
            let mut t = T::zero();
            for a in 0..4 {
                for d in 0..4 {
                    t = t + inverse[(a, d)] * w.get(a, b, c, d);
                }
            }
            worst = worst.max(t.abs());
        }
    }
    worst
}

fn permutation_sign(idx: [usize; 4]) -> i32 {
    let mut sign = 1;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0;
            }
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge star on two-forms, `(⋆ω)_cd = ½ ε_abcd ω^ab`, with
/// `ε_1234 = sqrt|det g|`.
pub fn hodge_star<T: Scalar>(metric: &Mat<T, 4>, inverse: &Mat<T, 4>) -> TwoFormOperator<T> {
    let vol = metric.det().abs().sqrt();
    Mat::from_fn(|row, col| {
        let (c, d) = TWO_FORM_BASIS[row];
        let (e, f) = TWO_FORM_BASIS[col];
        TWO_FORM_BASIS.iter().fold(T::zero(), |acc, &(a, b)| {
            let eps = permutation_sign([a, b, c, d]);
            if eps == 0 {
                return acc;
            }
            let raised = inverse[(a, e)] * inverse[(b, f)] - inverse[(a, f)] * inverse[(b, e)];
            acc + vol * T::lit(f64::from(eps)) * raised
        })
    })
}

/// A curvature-type tensor as an operator on two-forms:
/// `(W ω)_ab = Σ_{e<f} g^ec g^fd W_abcd ω_ef`.
pub fn two_form_operator<T: Scalar>(w: &CurvatureTensor<T>, inverse: &Mat<T, 4>) -> TwoFormOperator<T> {
    Mat::from_fn(|row, col| {
        let (a, b) = TWO_FORM_BASIS[row];
        let (e, f) = TWO_FORM_BASIS[col];
        let mut acc = T::zero();
        for c in 0..4 {
            for d in 0..4 {
                acc = acc + inverse[(e, c)] * inverse[(f, d)] * w.get(a, b, c, d);
            }
        }
        acc
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylSplit<T> {
    /// `‖P+ W P+‖` with `P± = (I ± ⋆)/2`.
    pub plus_norm: T,
    pub minus_norm: T,
    pub scalar_curvature: T,
    /// Largest metric trace of the Weyl tensor; zero up to rounding.
    pub trace_residual: T,
    /// Largest deviation of `⋆²` from the identity.
    pub star_residual: T,
}

impl<T: Scalar> WeylSplit<T> {
    /// Norm of the half that must vanish for self-duality.
    pub fn anti_self_dual_part(&self) -> T {
        if SELF_DUAL_IS_PLUS {
            self.minus_norm
        } else {
            self.plus_norm
        }
    }

    pub fn self_dual_part(&self) -> T {
        if SELF_DUAL_IS_PLUS {
            self.plus_norm
        } else {
            self.minus_norm
        }
    }
}

pub fn weyl_split<T: Scalar>(pc: &PointCurvature<T>) -> WeylSplit<T> {
    let ric = ricci(pc);
    let w = weyl_tensor(pc, &ric);
    let star = hodge_star(&pc.metric, &pc.inverse);
    let id = Mat::<T, 6>::identity();
    let plus = (id + star).scale(T::half());
    let minus = (id - star).scale(T::half());
    let op = two_form_operator(&w, &pc.inverse);
    WeylSplit {
        plus_norm: (plus * op * plus).frobenius(),
        minus_norm: (minus * op * minus).frobenius(),
        scalar_curvature: scalar_curvature(&ric),
        trace_residual: trace_residual(&w, &pc.inverse),
        star_residual: (star * star - id).max_abs(),
    }
}

pub fn weyl_split_at<T: Scalar>(m: &WalkerMetric, p: &Point<T, 4>) -> Result<WeylSplit<T>> {
    Ok(weyl_split(&point_curvature(m, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::parse_field;
    use crate::linalg::bilinear;

    fn restricted(src: &str) -> WalkerMetric {
        WalkerMetric::restricted(parse_field(src, 4).unwrap())
    }

    fn general(g33: &str, g44: &str, g34: &str) -> WalkerMetric {
        WalkerMetric::new(parse_field(g33, 4).unwrap(), parse_field(g44, 4).unwrap(), parse_field(g34, 4).unwrap())
    }

    fn pc(m: &WalkerMetric, x: [f64; 4]) -> PointCurvature<f64> {
        point_curvature(m, &Point(x)).unwrap()
    }

    const P0: [f64; 4] = [0.3, -0.7, 1.1, 0.9];
    const VECS: [[f64; 4]; 5] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.2, -1.3, 0.7, 0.4],
        [-0.8, 0.5, 1.1, -0.6],
        [0.0, 0.9, -0.3, 1.7],
        [1.4, 1.1, -0.9, 0.25],
    ];

    fn zoo() -> Vec<WalkerMetric> {
        vec![
            restricted("x1^2*x3 + x2*x4^2 - x1*x2*x3"),
            restricted("x1*x3 + x2*x4"),
            general("x1*x2 + x3^2", "x2^2 - x1*x4", "x1*x3*x4 + sin(x2)"),
            general("4*x1^2 - x4^2/4", "4*x2^2", "4*x1*x2 + x2*x4 - 0.25"),
        ]
    }

    #[test]
    fn flat_everything_vanishes() {
        let c = pc(&WalkerMetric::flat(), P0);
        let r = ricci(&c);
        assert_eq!(r.tensor, Mat::zeros());
        assert_eq!(r.operator, Mat::zeros());
        assert_eq!(jacobi(&c, &VECS[1]), Mat::zeros());
        let w = weyl_split(&c);
        assert_eq!((w.plus_norm, w.minus_norm, w.scalar_curvature), (0.0, 0.0, 0.0));
    }

    #[test]
    fn trace_of_jacobi_is_ricci() {
        for m in zoo() {
            let c = pc(&m, P0);
            let r = ricci(&c);
            assert!((r.tensor - r.tensor.transpose()).max_abs() < 1e-12);
            for x in VECS {
                let j = jacobi(&c, &x);
                assert!((j.trace() - bilinear(&r.tensor, &x, &x)).abs() < 1e-9);
                assert!(j.mul_vec(&x).iter().all(|v| v.abs() < 1e-9));
                // J(λx) = λ² J(x)
                let lx = x.map(|v| 2.0 * v);
                assert!((jacobi(&c, &lx) - j.scale(4.0)).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn polarization_identity() {
        for m in zoo() {
            let c = pc(&m, P0);
            for (x, y) in VECS.iter().zip(VECS.iter().rev()) {
                let s: [f64; 4] = std::array::from_fn(|i| x[i] + y[i]);
                let lhs = jacobi(&c, &s) - jacobi(&c, x) - jacobi(&c, y);
                let rhs = jacobi_polarized(&c, x, y).scale(2.0);
                assert!((lhs - rhs).max_abs() < 1e-10);
                assert_eq!(jacobi_polarized(&c, x, y), jacobi_polarized(&c, y, x));
            }
            assert_eq!(jacobi_polarized(&c, &VECS[2], &VECS[2]), jacobi(&c, &VECS[2]));
        }
    }

    #[test]
    fn skew_curvature_is_skew() {
        for m in zoo() {
            let c = pc(&m, P0);
            for (x, y) in VECS.iter().zip(VECS.iter().skip(1)) {
                let a = skew_curvature(&c, x, y);
                assert!((a + skew_curvature(&c, y, x)).max_abs() < 1e-12);
                // g-skew-adjoint: g A + A^T g = 0
                assert!((c.metric * a + a.transpose() * c.metric).max_abs() < 1e-9);
            }
            assert!(skew_curvature(&c, &VECS[3], &VECS[3]).max_abs() < 1e-12);
        }
    }

    #[test]
    fn ricci_operator_matches_block_matrix() {
        // p = 0, q = x3: only entry is -q²/2 + q_/3 in row 1, column 3
        let x3 = 0.8;
        let r = ricci_at(&restricted("x2*x3"), &Point([0.4, -0.2, x3, 1.5])).unwrap();
        let mut want = Mat::<f64, 4>::zeros();
        want[(0, 2)] = 1.0 - 0.5 * x3 * x3;
        assert!((r.operator - want).max_abs() < 1e-14, "{:?}", r.operator);
    }

    #[test]
    fn ricci_second_derivative_in_x1() {
        // g34/11 = 2 x3 at the point
        let r = ricci_at(&restricted("x1^2*x3 + x2*x4"), &Point(P0)).unwrap();
        assert!((r.operator[(1, 0)] - 0.5 * 2.0 * P0[2]).abs() < 1e-12);
    }

    #[test]
    fn negative_control_commutator_entry() {
        let c = pc(&restricted("x1^2"), P0);
        let rho = ricci(&c).operator;
        let r41 = skew_curvature(&c, &basis(3), &basis(0));
        assert!((rho.commutator(&r41)[(1, 0)] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_is_trace_free_and_star_is_involution() {
        for m in zoo() {
            let c = pc(&m, P0);
            assert!((c.metric.det() - 1.0).abs() < 1e-12);
            let w = weyl_split(&c);
            assert!(w.trace_residual < 1e-9, "{}", w.trace_residual);
            assert!(w.star_residual < 1e-12);
        }
    }

    #[test]
    fn star_projectors_sum_to_identity() {
        let c = pc(&zoo()[2], P0);
        let star = hodge_star(&c.metric, &c.inverse);
        let id = Mat::<f64, 6>::identity();
        let sum = (id + star).scale(0.5) + (id - star).scale(0.5);
        assert_eq!(sum, id);
    }

    #[test]
    fn self_dual_calibration() {
        // g34 = x1 p + x2 q + s with p, q, s depending on (x3, x4) only
        for x in [P0, [-0.45, 0.8, 0.35, -0.6], [1.3, 0.25, -0.55, 0.4]] {
            let w = weyl_split_at(&restricted("x1*x3^2 + x2*x4 + x3*x4"), &Point(x)).unwrap();
            assert!(w.anti_self_dual_part() < 1e-9, "{w:?}");
            assert!(w.self_dual_part() > 1e-3, "{w:?}");
        }
    }

    #[test]
    fn anti_self_dual_instance() {
        let w = weyl_split_at(&restricted("x1 + x2 + x4^2 + x1^2*x4"), &Point(P0)).unwrap();
        assert!(w.self_dual_part() < 1e-9, "{w:?}");
    }

    #[test]
    fn neither_half_vanishes() {
        let w = weyl_split_at(&restricted("x1^2*x3"), &Point(P0)).unwrap();
        assert!(w.plus_norm > 1e-3 && w.minus_norm > 1e-3, "{w:?}");
    }

    #[test]
    fn runs_in_single_precision() {
        let m = restricted("x1*x3 + x2*x4");
        let c = point_curvature(&m, &Point([0.3f32, -0.7, 1.1, 0.9])).unwrap();
        let r = ricci(&c);
        let x = [0.2f32, -1.3, 0.7, 0.4];
        assert!((jacobi(&c, &x).trace() - bilinear(&r.tensor, &x, &x)).abs() < 1e-4);
    }
}
