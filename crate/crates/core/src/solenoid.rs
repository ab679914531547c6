//! Points of the adele group A_Q and the solenoid X_Q = A_Q / Z[1/Q].
//!
//! A point of X_Q is stored as its unique representative in the strict
//! fundamental domain `[0,1) x prod Z_p`. p-adic coordinates are rationals
//! embedded in Q_p, so every operation here is exact.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    is_supported_on, padic_fractional_part, padic_valuation, ExactReal, Prime, PrimeSet, Rational,
    Valuation,
};

/// An element of A_Q with finitely many p-adic coordinates, one per prime of Q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdeleVector {
    primes: PrimeSet,
    real: ExactReal,
    padic: Vec<Rational>,
}

impl AdeleVector {
    /// `padic[i]` is the coordinate at the i-th prime of `primes` (increasing order).
    pub fn new(primes: PrimeSet, real: ExactReal, padic: Vec<Rational>) -> Result<Self> {
        if padic.len() != primes.len() {
            return Err(Error::PrimeSetMismatch(
                primes.to_string(),
                format!("{} coordinates", padic.len()),
            ));
        }
        Ok(AdeleVector { primes, real, padic })
    }

    /// Builds a vector from `(p, x_p)` pairs in any order.
    pub fn from_pairs(real: ExactReal, pairs: &[(u64, Rational)]) -> Result<Self> {
        let primes = PrimeSet::new(pairs.iter().map(|(p, _)| *p))?;
        if primes.len() != pairs.len() {
            return Err(Error::Parse("repeated prime in coordinate list".into()));
        }
        let mut padic = vec![Rational::zero(); primes.len()];
        for (p, x) in pairs {
            let i = primes.index_of(Prime::new(*p)?).expect("prime just inserted");
            padic[i] = x.clone();
        }
        Ok(AdeleVector { primes, real, padic })
    }

    pub fn zero(primes: &PrimeSet) -> Self {
        AdeleVector {
            primes: primes.clone(),
            real: ExactReal::zero(),
            padic: vec![Rational::zero(); primes.len()],
        }
    }

    /// The diagonal image (r, r, ..., r) of a rational.
    pub fn diagonal(value: &Rational, primes: &PrimeSet) -> Self {
        AdeleVector {
            primes: primes.clone(),
            real: ExactReal::from_rational(value),
            padic: vec![value.clone(); primes.len()],
        }
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn real(&self) -> &ExactReal {
        &self.real
    }

    pub fn padic(&self) -> &[Rational] {
        &self.padic
    }

    /// `(p, x_p)` in increasing prime order.
    pub fn padic_pairs(&self) -> impl Iterator<Item = (Prime, &Rational)> + '_ {
        self.primes.iter().zip(self.padic.iter())
    }

    pub fn coordinate(&self, p: Prime) -> Option<&Rational> {
        self.primes.index_of(p).map(|i| &self.padic[i])
    }

    /// The radicand of the real coordinate's field (0 when rational).
    pub fn field(&self) -> u64 {
        self.real.radicand()
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.primes != other.primes {
            return Err(Error::PrimeSetMismatch(self.primes.to_string(), other.primes.to_string()));
        }
        self.real.common_field(&other.real).map(|_| ())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(AdeleVector {
            primes: self.primes.clone(),
            real: self.real.checked_add(&other.real)?,
            padic: self.padic.iter().zip(&other.padic).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    /// Componentwise product (A_Q is a ring).
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(AdeleVector {
            primes: self.primes.clone(),
            real: self.real.checked_mul(&other.real)?,
            padic: self.padic.iter().zip(&other.padic).map(|(x, y)| x * y).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        AdeleVector {
            primes: self.primes.clone(),
            real: -&self.real,
            padic: self.padic.iter().map(|x| -x).collect(),
        }
    }

    /// Multiplication by a diagonally embedded rational.
    pub fn scale(&self, r: &Rational) -> Self {
        AdeleVector {
            primes: self.primes.clone(),
            real: self.real.mul_rational(r),
            padic: self.padic.iter().map(|x| x * r).collect(),
        }
    }

    pub fn add_diagonal(&self, r: &Rational) -> Self {
        AdeleVector {
            primes: self.primes.clone(),
            real: self.real.add_rational(r),
            padic: self.padic.iter().map(|x| x + r).collect(),
        }
    }

    /// Drops the coordinates outside `primes` (which must be a subset).
    pub fn restrict(&self, primes: &PrimeSet) -> Result<Self> {
        if !primes.is_subset(&self.primes) {
            return Err(Error::PrimeSetMismatch(primes.to_string(), self.primes.to_string()));
        }
        let padic = primes
            .iter()
            .map(|p| self.coordinate(p).cloned().expect("subset"))
            .collect();
        Ok(AdeleVector { primes: primes.clone(), real: self.real.clone(), padic })
    }

    /// Adds coordinates equal to 0 at the primes of `primes` not already present.
    pub fn extend(&self, primes: &PrimeSet) -> Self {
        let all = self.primes.union(primes);
        let padic = all
            .iter()
            .map(|p| self.coordinate(p).cloned().unwrap_or_else(Rational::zero))
            .collect();
        AdeleVector { primes: all, real: self.real.clone(), padic }
    }
}

impl fmt::Display for AdeleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.real)?;
        for (p, x) in self.padic_pairs() {
            write!(f, ", {p}: {x}")?;
        }
        f.write_str(")")
    }
}

/// An element of Z[1/Q].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GammaElement {
    value: Rational,
    primes: PrimeSet,
}

impl GammaElement {
    pub fn new(value: Rational, primes: &PrimeSet) -> Result<Self> {
        if !is_supported_on(&value, primes) {
            return Err(Error::NotInGamma(value.to_string(), primes.to_string()));
        }
        Ok(GammaElement { value, primes: primes.clone() })
    }

    pub fn integer(n: BigInt, primes: &PrimeSet) -> Self {
        GammaElement { value: Rational::from_integer(n), primes: primes.clone() }
    }

    pub fn zero(primes: &PrimeSet) -> Self {
        Self::integer(BigInt::zero(), primes)
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// gamma -> (gamma, gamma, ...).
    pub fn diagonal(&self) -> AdeleVector {
        AdeleVector::diagonal(&self.value, &self.primes)
    }
}

impl fmt::Display for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

pub fn in_fundamental_domain(x: &AdeleVector) -> bool {
    let real_ok = !x.real.is_negative() && x.real < ExactReal::one();
    real_ok
        && x
            .padic_pairs()
            .all(|(p, xp)| padic_valuation(xp, p) >= Valuation::Finite(0))
}

/// A point of X_Q, held as its representative in `[0,1) x prod Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolenoidPoint(AdeleVector);

impl SolenoidPoint {
    pub fn new(x: AdeleVector) -> Result<Self> {
        if in_fundamental_domain(&x) {
            Ok(SolenoidPoint(x))
        } else {
            Err(Error::NotReduced(x.to_string()))
        }
    }

    pub fn origin(primes: &PrimeSet) -> Self {
        SolenoidPoint(AdeleVector::zero(primes))
    }

    pub fn as_adele(&self) -> &AdeleVector {
        &self.0
    }

    pub fn into_adele(self) -> AdeleVector {
        self.0
    }

    pub fn real(&self) -> &ExactReal {
        &self.0.real
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.0.primes
    }
}

impl fmt::Display for SolenoidPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Splits `x = s + gamma` with `s` in the fundamental domain and gamma in Z[1/Q].
///
/// gamma is the sum of the p-adic fractional parts plus the floor of what is
/// left on the real coordinate.
pub fn reduce_mod_gamma(x: &AdeleVector) -> (SolenoidPoint, GammaElement) {
    let tails: Rational = x
        .padic_pairs()
        .map(|(p, xp)| padic_fractional_part(xp, p))
        .sum();
    let shifted = x.real.sub_rational(&tails);
    let gamma = tails + Rational::from_integer(shifted.floor());
    let s = x.add_diagonal(&-&gamma);
    debug_assert!(in_fundamental_domain(&s));
    (SolenoidPoint(s), GammaElement { value: gamma, primes: x.primes.clone() })
}

/// T_alpha(x) = x + alpha, reduced.
pub fn rotate(x: &SolenoidPoint, alpha: &AdeleVector) -> Result<SolenoidPoint> {
    Ok(reduce_mod_gamma(&x.0.checked_add(alpha)?).0)
}

/// The n-th orbit point x0 + n alpha, reduced in one step.
pub fn orbit_point(alpha: &AdeleVector, x0: &SolenoidPoint, n: u64) -> Result<SolenoidPoint> {
    let shift = alpha.scale(&Rational::from_integer(BigInt::from(n)));
    Ok(reduce_mod_gamma(&x0.0.checked_add(&shift)?).0)
}

/// Iterator over x0, x0 + alpha, ..., x0 + (N-1) alpha.
#[derive(Clone, Debug)]
pub struct Orbit {
    alpha: AdeleVector,
    next: SolenoidPoint,
    remaining: u64,
}

impl Iterator for Orbit {
    type Item = SolenoidPoint;

    fn next(&mut self) -> Option<SolenoidPoint> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let following = reduce_mod_gamma(&self.next.0.checked_add(&self.alpha).expect("checked at construction")).0;
        Some(std::mem::replace(&mut self.next, following))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

pub fn orbit(alpha: &AdeleVector, x0: &SolenoidPoint, len: u64) -> Result<Orbit> {
    x0.0.check_compatible(alpha)?;
    Ok(Orbit { alpha: alpha.clone(), next: x0.clone(), remaining: len })
}

/// A real number modulo 1, kept exactly in [0, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhaseModOne(ExactReal);

impl PhaseModOne {
    pub fn new(theta: &ExactReal) -> Self {
        PhaseModOne(theta.fract())
    }

    pub fn theta(&self) -> &ExactReal {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Distance from theta to the nearest integer.
    pub fn distance_to_integer(&self) -> ExactReal {
        let upper = ExactReal::one() - &self.0;
        if upper < self.0 {
            upper
        } else {
            self.0.clone()
        }
    }

    /// n * theta mod 1.
    pub fn times(&self, n: u64) -> PhaseModOne {
        PhaseModOne::new(&self.0.mul_integer(&BigInt::from(n)))
    }

    pub fn add(&self, other: &PhaseModOne) -> Result<PhaseModOne> {
        Ok(PhaseModOne::new(&self.0.checked_add(&other.0)?))
    }

    /// e(theta) = exp(2 pi i theta).
    pub fn exp(&self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.0.to_f64())
    }
}

impl fmt::Display for PhaseModOne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The phase of psi_gamma(x) = e(-gamma x_inf + sum_p {gamma x_p}_p).
pub fn character_phase(gamma: &GammaElement, x: &AdeleVector) -> Result<PhaseModOne> {
    if !gamma.primes.is_subset(&x.primes) {
        return Err(Error::PrimeSetMismatch(gamma.primes.to_string(), x.primes.to_string()));
    }
    let g = &gamma.value;
    let tails: Rational = x
        .padic_pairs()
        .map(|(p, xp)| padic_fractional_part(&(g * xp), p))
        .sum();
    Ok(PhaseModOne::new(&x.real.mul_rational(&-g).add_rational(&tails)))
}

/// alpha generates a dense orbit iff its real coordinate is irrational.
pub fn is_minimal(alpha: &AdeleVector) -> bool {
    alpha.real.is_irrational()
}

/// (1/N) sum_{n=1}^{N} psi_gamma(n alpha), evaluated as a geometric series.
///
/// The phase theta is exact; N theta mod 1 is reduced exactly too, so the only
/// rounding is in the final complex arithmetic (about 1e-15 relative).
pub fn weyl_sum(gamma: &GammaElement, alpha: &AdeleVector, len: u64) -> Result<Complex64> {
    if gamma.is_zero() {
        return Err(Error::TrivialCharacter);
    }
    if !is_minimal(alpha) {
        return Err(Error::NotMinimal(alpha.real.to_string()));
    }
    if len == 0 {
        return Ok(Complex64::zero());
    }
    let theta = character_phase(gamma, alpha)?;
    let e1 = theta.exp();
    let en = theta.times(len).exp();
    // sum_{n=1}^{N} e(n theta) = e(theta) (1 - e(N theta)) / (1 - e(theta))
    let total = e1 * (Complex64::one() - en) / (Complex64::one() - e1);
    Ok(total / len as f64)
}

/// The geometric-series bound 1 / (2 N ||theta||) on |weyl_sum|.
pub fn weyl_bound(theta: &PhaseModOne, len: u64) -> f64 {
    1.0 / (2.0 * len as f64 * theta.distance_to_integer().to_f64())
}
