use super::{Point, ScalarField};
use crate::error::{DomainError, Error};

/// The rational solution family `p = -2 a4 / L`, `q = -2 a3 / L` with
/// `L = a0 + a3 x3 + a4 x4`, solving `p^2 = 2 p_4`, `q^2 = 2 q_3`,
/// `pq = p_3 + q_4`.
pub fn lemma14_pq(a0: f64, a3: f64, a4: f64) -> Result<(ScalarField, ScalarField), Error> {
    if a0 == 0.0 && a3 == 0.0 && a4 == 0.0 {
        return Err(Error::Parameter("(a0, a3, a4) must not all vanish".into()));
    }
    if ![a0, a3, a4].iter().all(|a| a.is_finite()) {
        return Err(Error::Parameter("(a0, a3, a4) must be finite".into()));
    }
    let inv = ScalarField::lin_inv(a0, a3, a4);
    let p = ScalarField::constant(-2.0 * a4) * inv.clone();
    let q = ScalarField::constant(-2.0 * a3) * inv;
    Ok((p, q))
}

/// Raw residuals of the two equivalent forms of the `(p, q)` system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma14Residuals {
    /// `p^2 - 2 p_4`
    pub p_square: f64,
    /// `q^2 - 2 q_3`
    pub q_square: f64,
    /// `pq - p_3 - q_4`
    pub mixed: f64,
    /// `p_3 - pq / 2`
    pub p3_half: f64,
    /// `q_4 - pq / 2`
    pub q4_half: f64,
    /// Largest magnitude among `p^2, q^2, pq` and the first derivatives.
    pub scale: f64,
}

impl Lemma14Residuals {
    pub fn max_abs(&self) -> f64 {
        [self.p_square, self.q_square, self.mixed, self.p3_half, self.q4_half]
            .iter()
            .fold(0.0f64, |acc, r| acc.max(r.abs()))
    }

    /// `max |r| / (1 + scale)`.
    pub fn normalized(&self) -> f64 {
        self.max_abs() / (1.0 + self.scale)
    }
}

/// Evaluates all five residuals for base-only fields `p`, `q` at `pt`.
pub fn lemma14_residuals<const N: usize>(
    p: &ScalarField,
    q: &ScalarField,
    pt: &Point<f64, N>,
) -> Result<Lemma14Residuals, DomainError> {
    let s3 = Point::<f64, N>::slot(3).expect("x3 slot");
    let s4 = Point::<f64, N>::slot(4).expect("x4 slot");
    let pj = p.eval_jet2(pt)?;
    let qj = q.eval_jet2(pt)?;
    let (pv, qv) = (pj.value, qj.value);
    let (p3, p4, q3, q4) = (pj.grad[s3], pj.grad[s4], qj.grad[s3], qj.grad[s4]);
    let scale = [pv * pv, qv * qv, pv * qv, 2.0 * p3, 2.0 * p4, 2.0 * q3, 2.0 * q4]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(Lemma14Residuals {
        p_square: pv * pv - 2.0 * p4,
        q_square: qv * qv - 2.0 * q3,
        mixed: pv * qv - p3 - q4,
        p3_half: p3 - 0.5 * pv * qv,
        q4_half: q4 - 0.5 * pv * qv,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_triple_gives_zero_fields() {
        let (p, q) = lemma14_pq(1.0, 0.0, 0.0).unwrap();
        assert!(p.is_zero() && q.is_zero());
    }

    #[test]
    fn a4_zero_gives_shifted_reciprocal() {
        let a = 2.5;
        let (p, q) = lemma14_pq(a, 1.0, 0.0).unwrap();
        assert!(p.is_zero());
        for x3 in [-1.0, 0.0, 0.7, 3.0] {
            let v = q.eval(&Point([x3, 0.4])).unwrap();
            assert!((v + 2.0 / (x3 + a)).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_triple_residual_at_origin() {
        let (p, q) = lemma14_pq(1.0, 1.0, 1.0).unwrap();
        let pj = p.eval_jet2(&Point([0.0, 0.0])).unwrap();
        assert_eq!(pj.value, -2.0);
        assert_eq!(pj.value * pj.value - 2.0 * pj.grad[1], 0.0);
        assert_eq!(p, q);
    }

    #[test]
    fn all_zero_triple_rejected() {
        assert!(matches!(lemma14_pq(0.0, 0.0, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn non_solutions_have_residuals() {
        let p = ScalarField::coord(3);
        let q = ScalarField::coord(4);
        let r = lemma14_residuals(&p, &q, &Point([0.5, -0.25])).unwrap();
        assert!(r.max_abs() > 0.1);
        assert_eq!(r.mixed, 0.5 * -0.25 - 1.0 - 1.0);
    }
}
