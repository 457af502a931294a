use num_bigint::BigInt;

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::geometry::{self, FundamentalDomainPoint};
use crate::places::PlaceSet;

/// `x -> (q / Pi) x + s Pi / q`, reduced back into `Z_P`.
pub fn transfer_map(
    x: &FundamentalDomainPoint,
    q: u64,
    s: i64,
    places: &PlaceSet,
) -> Result<FundamentalDomainPoint> {
    let pi = places.prime_product();
    if !arith::is_prime(q) || q <= pi {
        return Err(Error::InvalidTransferPrime { q, product: pi });
    }
    let scale = Rational::new(BigInt::from(q), BigInt::from(pi));
    let offset = Rational::new(BigInt::from(s) * BigInt::from(pi), BigInt::from(q));
    let y = x.point().scale(&scale);
    let y = geometry::AdelicPoint::new(y.coords().iter().map(|c| c + &offset).collect());
    Ok(geometry::reduce_to_fundamental_domain(&y, places)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::geometry::AdelicPoint;

    fn fd(q: Rational, p: &PlaceSet) -> FundamentalDomainPoint {
        FundamentalDomainPoint::new(AdelicPoint::diagonal(&q, p), p).unwrap()
    }

    #[test]
    fn examples() {
        let p = PlaceSet::new(&[2]).unwrap();
        assert_eq!(transfer_map(&fd(rat(0, 1), &p), 5, 0, &p).unwrap(), fd(rat(0, 1), &p));
        assert_eq!(transfer_map(&fd(rat(1, 3), &p), 5, 0, &p).unwrap(), fd(rat(1, 3), &p));
        assert_eq!(transfer_map(&fd(rat(1, 5), &p), 5, 0, &p).unwrap(), fd(rat(0, 1), &p));
        assert!(transfer_map(&fd(rat(1, 5), &p), 2, 0, &p).is_err());
        assert!(transfer_map(&fd(rat(1, 5), &p), 9, 0, &p).is_err());
    }
}
