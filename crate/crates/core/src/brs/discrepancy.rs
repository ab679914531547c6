//! Exact discrepancy of orbit counts, D_N = sum_{n<N} chi_A(x0 + n alpha) - N |A|.

use num_bigint::BigInt;

use super::boxes::{chi_eval, WeightedBoxSet};
use crate::error::{Error, Result};
use crate::exact::{ExactReal, Rational};
use crate::par::{try_map_indices, Execution};
use crate::solenoid::{is_minimal, orbit, orbit_point, AdeleVector, SolenoidPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyRow {
    pub n: u64,
    /// sum_{k<n} chi_A(x0 + k alpha).
    pub count: u64,
    pub discrepancy: ExactReal,
    /// max_{M <= n} |D_M|.
    pub running_sup: ExactReal,
    /// Smallest M <= n with |D_M| = running_sup.
    pub sup_at: u64,
}

/// chi_A(x0 + n alpha) for n in [0, len).
///
/// Sequential mode steps the orbit incrementally; parallel mode reduces each
/// x0 + n alpha independently. Both give identical results.
pub fn chi_along_orbit(
    set: &WeightedBoxSet,
    alpha: &AdeleVector,
    x0: &SolenoidPoint,
    len: u64,
    exec: Execution,
) -> Result<Vec<u64>> {
    if !is_minimal(alpha) {
        return Err(Error::NotMinimal(alpha.real().to_string()));
    }
    if alpha.primes() != set.primes() {
        return Err(Error::PrimeSetMismatch(set.primes().to_string(), alpha.primes().to_string()));
    }
    match exec {
        Execution::Sequential => orbit(alpha, x0, len)?.map(|x| chi_eval(set, &x)).collect(),
        Execution::Parallel => {
            x0.as_adele().check_compatible(alpha)?;
            try_map_indices(exec, len, |n| chi_eval(set, &orbit_point(alpha, x0, n)?))
        }
    }
}

/// Rows of the discrepancy series at the requested checkpoints (sorted,
/// duplicates dropped). The volume used is the set's claimed volume.
pub fn discrepancy_series(
    set: &WeightedBoxSet,
    alpha: &AdeleVector,
    x0: &SolenoidPoint,
    checkpoints: &[u64],
    exec: Execution,
) -> Result<Vec<DiscrepancyRow>> {
    let mut marks = checkpoints.to_vec();
    marks.sort_unstable();
    marks.dedup();
    let horizon = marks.last().copied().unwrap_or(0);
    let chi = chi_along_orbit(set, alpha, x0, horizon, exec)?;
    Ok(series_from_counts(&chi, set.claimed_volume(), &marks))
}

/// Discrepancy rows from precomputed indicator values; `marks` must be sorted.
pub fn series_from_counts(chi: &[u64], volume: &ExactReal, marks: &[u64]) -> Vec<DiscrepancyRow> {
    let mut rows = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    let mut count = 0u64;
    let mut sup = ExactReal::zero();
    let mut sup_at = 0u64;
    let mut n = 0u64;
    loop {
        let d = ExactReal::from_integer(BigInt::from(count)) - volume.mul_integer(&BigInt::from(n));
        let mag = d.abs();
        if mag > sup {
            sup = mag;
            sup_at = n;
        }
        while next.peek().is_some_and(|&&m| m == n) {
            next.next();
            rows.push(DiscrepancyRow {
                n,
                count,
                discrepancy: d.clone(),
                running_sup: sup.clone(),
                sup_at,
            });
        }
        if next.peek().is_none() || n as usize >= chi.len() {
            break;
        }
        count += chi[n as usize];
        n += 1;
    }
    rows
}

/// later <= factor * earlier, exactly.
pub fn plateau_holds(earlier: &ExactReal, later: &ExactReal, factor: &Rational) -> bool {
    *later <= earlier.mul_rational(factor)
}

/// Running suprema strictly increase from row to row.
pub fn strictly_growing(rows: &[DiscrepancyRow]) -> bool {
    rows.windows(2).all(|w| w[0].running_sup < w[1].running_sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brs::boxes::{AdelicBox, PAdicBall, WeightedBox};
    use crate::exact::{rat, Prime, PrimeSet};

    fn q2() -> PrimeSet {
        PrimeSet::new([2]).unwrap()
    }

    fn worked() -> (WeightedBoxSet, AdeleVector) {
        let b = AdelicBox::new(
            ExactReal::zero(),
            ExactReal::from_parts(5, -2, 2, 2).unwrap(),
            vec![PAdicBall::new(Prime::new(2).unwrap(), rat(0, 1), -1)],
        )
        .unwrap();
        let set = WeightedBoxSet::from_terms(q2(), vec![WeightedBox { region: b, weight: 1 }]).unwrap();
        (set, AdeleVector::from_pairs(ExactReal::sqrt(2), &[(2, rat(1, 2))]).unwrap())
    }

    #[test]
    fn small_checkpoints() {
        let (set, alpha) = worked();
        let x0 = SolenoidPoint::origin(&q2());
        let rows = discrepancy_series(&set, &alpha, &x0, &[1, 0, 1], Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 0);
        assert!(rows[0].discrepancy.is_zero());
        assert_eq!(rows[1].discrepancy, ExactReal::from_parts(-1, 2, 4, 2).unwrap());
        assert!(discrepancy_series(&set, &alpha, &x0, &[], Execution::Sequential).unwrap().is_empty());
    }

    #[test]
    fn modes_agree_and_sup_is_monotone() {
        let (set, alpha) = worked();
        let x0 = SolenoidPoint::origin(&q2());
        let marks = [10, 100, 500, 2000];
        let a = discrepancy_series(&set, &alpha, &x0, &marks, Execution::Sequential).unwrap();
        let b = discrepancy_series(&set, &alpha, &x0, &marks, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].running_sup <= w[1].running_sup));
        assert!(a.iter().all(|r| r.sup_at <= r.n));
    }

    /// Oracle: recompute every D_M directly with a fresh orbit walk.
    #[test]
    fn matches_direct_recomputation() {
        let (set, alpha) = worked();
        let x0 = SolenoidPoint::origin(&q2());
        let rows = discrepancy_series(&set, &alpha, &x0, &[50], Execution::Sequential).unwrap();
        let mut sup = ExactReal::zero();
        let mut last = ExactReal::zero();
        for m in 0..=50u64 {
            let count: u64 = (0..m).map(|k| chi_eval(&set, &orbit_point(&alpha, &x0, k).unwrap()).unwrap()).sum();
            last = ExactReal::from(count as i64) - set.claimed_volume().mul_integer(&BigInt::from(m));
            sup = sup.max(last.abs());
        }
        assert_eq!(rows[0].discrepancy, last);
        assert_eq!(rows[0].running_sup, sup);
    }

    #[test]
    fn rules() {
        let one = ExactReal::one();
        assert!(plateau_holds(&one, &one, &rat(11, 10)));
        assert!(!plateau_holds(&one, &ExactReal::from(2), &rat(11, 10)));
        assert!(matches!(
            chi_along_orbit(
                &worked().0,
                &AdeleVector::from_pairs(ExactReal::from(rat(1, 2)), &[(2, rat(0, 1))]).unwrap(),
                &SolenoidPoint::origin(&q2()),
                3,
                Execution::Sequential
            ),
            Err(Error::NotMinimal(_))
        ));
    }
}
