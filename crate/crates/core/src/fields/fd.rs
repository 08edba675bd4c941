use super::{Jet2, Point};
use crate::error::DomainError;

/// Central-difference estimate of the 2-jet of a value-only evaluator.
///
/// Gradient and Hessian errors are `O(h^2)`. Mixed partials use the
/// four-point stencil; the Hessian is filled symmetrically.
pub fn fd_jet2_oracle<F, const N: usize>(f: F, p: &Point<f64, N>, h: f64) -> Result<Jet2<f64, N>, DomainError>
where
    F: Fn(&Point<f64, N>) -> Result<f64, DomainError>,
{
    let at = |offsets: &[(usize, f64)]| {
        let mut q = *p;
        for &(slot, d) in offsets {
            q.0[slot] += d;
        }
        f(&q).map_err(|e| DomainError::new(e.node, format!("finite-difference stencil left the domain: {}", e.reason)))
    };
    let center = at(&[])?;
    let mut jet = Jet2::constant(center);
    for i in 0..N {
        let plus = at(&[(i, h)])?;
        let minus = at(&[(i, -h)])?;
        jet.grad[i] = (plus - minus) / (2.0 * h);
        jet.hess[i][i] = (plus - 2.0 * center + minus) / (h * h);
        for j in (i + 1)..N {
            let pp = at(&[(i, h), (j, h)])?;
            let pm = at(&[(i, h), (j, -h)])?;
            let mp = at(&[(i, -h), (j, h)])?;
            let mm = at(&[(i, -h), (j, -h)])?;
            let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
            jet.hess[i][j] = mixed;
            jet.hess[j][i] = mixed;
        }
    }
    Ok(jet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField;

    #[test]
    fn constant_has_flat_jet() {
        let jet = fd_jet2_oracle(|_: &Point<f64, 4>| Ok(7.0), &Point([0.1, 0.2, 0.3, 0.4]), 1e-4).unwrap();
        assert!(jet.grad.iter().chain(jet.hess.iter().flatten()).all(|v| v.abs() <= 1e-9));
    }

    #[test]
    fn bilinear_mixed_partial() {
        let f = ScalarField::coord(3) * ScalarField::coord(4);
        let jet = fd_jet2_oracle(|q| f.eval(q), &Point([0.0; 4]), 1e-4).unwrap();
        assert!((jet.hess[2][3] - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn lin_inv_matches_exact_jet() {
        let f = ScalarField::lin_inv(1.0, 1.0, 1.0);
        let p = Point([0.0; 4]);
        let fd = fd_jet2_oracle(|q| f.eval(q), &p, 1e-4).unwrap();
        let exact = f.eval_jet2(&p).unwrap();
        for i in 0..4 {
            assert!((fd.grad[i] - exact.grad[i]).abs() <= 1e-5);
            for j in 0..4 {
                assert!((fd.hess[i][j] - exact.hess[i][j]).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn stencil_outside_domain_is_an_error() {
        let f = ScalarField::coord(3).ln();
        assert!(fd_jet2_oracle(|q| f.eval(q), &Point([5e-5, 0.0]), 1e-4).is_err());
    }
}
