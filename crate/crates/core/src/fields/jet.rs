use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Value and gradient of a scalar quantity; forward-mode first-order jet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1<T, const N: usize> {
    pub value: T,
    pub grad: [T; N],
}

impl<T: Scalar, const N: usize> Jet1<T, N> {
    pub fn constant(value: T) -> Self {
        Jet1 { value, grad: [T::zero(); N] }
    }

    pub fn scale(self, s: T) -> Self {
        Jet1 { value: self.value * s, grad: self.grad.map(|g| g * s) }
    }
}

impl<T: Scalar, const N: usize> Default for Jet1<T, N> {
    fn default() -> Self {
        Self::constant(T::zero())
    }
}

impl<T: Scalar, const N: usize> Add for Jet1<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g = *g + r;
        }
        Jet1 { value: self.value + rhs.value, grad }
    }
}

impl<T: Scalar, const N: usize> Sub for Jet1<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar, const N: usize> Neg for Jet1<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet1 { value: -self.value, grad: self.grad.map(|g| -g) }
    }
}

impl<T: Scalar, const N: usize> Mul for Jet1<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [T::zero(); N];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        Jet1 { value: self.value * rhs.value, grad }
    }
}

/// Value, gradient and Hessian of a scalar field at a point.
///
/// Every constructor fills the upper triangle and mirrors it, so
/// `hess[i][j]` and `hess[j][i]` are bitwise equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T, const N: usize> {
    pub value: T,
    pub grad: [T; N],
    pub hess: [[T; N]; N],
}

impl<T: Scalar, const N: usize> Jet2<T, N> {
    pub fn constant(value: T) -> Self {
        Jet2 { value, grad: [T::zero(); N], hess: [[T::zero(); N]; N] }
    }

    /// The coordinate function for `slot`, evaluated at `value`.
    pub fn variable(slot: usize, value: T) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[slot] = T::one();
        jet
    }

    fn with_upper(value: T, grad: [T; N], mut entry: impl FnMut(usize, usize) -> T) -> Self {
        let mut hess = [[T::zero(); N]; N];
        for i in 0..N {
            for j in i..N {
                let h = entry(i, j);
                hess[i][j] = h;
                hess[j][i] = h;
            }
        }
        Jet2 { value, grad, hess }
    }

    /// Chain rule for `g(self)` given `g`, `g'` and `g''` at `self.value`.
    pub fn compose(&self, g: T, dg: T, d2g: T) -> Self {
        let grad = self.grad.map(|f| dg * f);
        Self::with_upper(g, grad, |i, j| dg * self.hess[i][j] + d2g * self.grad[i] * self.grad[j])
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        let inv = T::one() / v;
        self.compose(inv, -inv * inv, T::two() * inv * inv * inv)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::constant(T::one());
        }
        let v = self.value;
        let nf = T::lit(n as f64);
        let d2 = if n == 1 { T::zero() } else { nf * T::lit((n - 1) as f64) * v.powi(n - 2) };
        self.compose(v.powi(n), nf * v.powi(n - 1), d2)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::with_upper(self.value * s, self.grad.map(|g| g * s), |i, j| self.hess[i][j] * s)
    }

    /// Drops the Hessian.
    pub fn first_order(&self) -> Jet1<T, N> {
        Jet1 { value: self.value, grad: self.grad }
    }

    /// First-order jet of the partial derivative along `slot`.
    pub fn partial(&self, slot: usize) -> Jet1<T, N> {
        Jet1 { value: self.grad[slot], grad: self.hess[slot] }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }
}

impl<T: Scalar, const N: usize> Add for Jet2<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g = *g + r;
        }
        Self::with_upper(self.value + rhs.value, grad, |i, j| self.hess[i][j] + rhs.hess[i][j])
    }
}

impl<T: Scalar, const N: usize> Sub for Jet2<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut grad = self.grad;
        for (g, r) in grad.iter_mut().zip(rhs.grad) {
            *g = *g - r;
        }
        Self::with_upper(self.value - rhs.value, grad, |i, j| self.hess[i][j] - rhs.hess[i][j])
    }
}

impl<T: Scalar, const N: usize> Neg for Jet2<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::with_upper(-self.value, self.grad.map(|g| -g), |i, j| -self.hess[i][j])
    }
}

impl<T: Scalar, const N: usize> Mul for Jet2<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (f, g) = (&self, &rhs);
        let mut grad = [T::zero(); N];
        for (i, d) in grad.iter_mut().enumerate() {
            *d = f.grad[i] * g.value + f.value * g.grad[i];
        }
        Self::with_upper(f.value * g.value, grad, |i, j| {
            f.hess[i][j] * g.value + f.value * g.hess[i][j] + f.grad[i] * g.grad[j] + f.grad[j] * g.grad[i]
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_of_variable() {
        let x = Jet2::<f64, 4>::variable(0, 3.0);
        let sq = x * x;
        assert_eq!(sq.value, 9.0);
        assert_eq!(sq.grad, [6.0, 0.0, 0.0, 0.0]);
        assert_eq!(sq.hess[0][0], 2.0);
        assert_eq!(sq.hess.iter().flatten().filter(|h| **h != 0.0).count(), 1);
        assert_eq!(x.powi(2), sq);
    }

    #[test]
    fn reciprocal_derivatives() {
        // 1/(1 + x) at x = 0: 1, -1, 2
        let one = Jet2::<f64, 2>::constant(1.0);
        let r = (one + Jet2::variable(0, 0.0)).recip();
        assert_eq!((r.value, r.grad[0], r.hess[0][0]), (1.0, -1.0, 2.0));
    }

    #[test]
    fn jet1_product_rule() {
        let a = Jet1::<f64, 2> { value: 2.0, grad: [1.0, 0.0] };
        let b = Jet1::<f64, 2> { value: 3.0, grad: [0.0, 5.0] };
        assert_eq!(a * b, Jet1 { value: 6.0, grad: [3.0, 10.0] });
    }
}
