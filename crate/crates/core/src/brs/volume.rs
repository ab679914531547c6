//! The volume set xi = -gamma alpha_inf + sum_p {gamma alpha_p}_p + n.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{padic_fractional_part, prime_power, ExactReal, PrimeSet, Rational};
use crate::solenoid::{character_phase, AdeleVector, GammaElement};

fn check_gamma(alpha: &AdeleVector, gamma: &GammaElement) -> Result<()> {
    if gamma.primes().is_subset(alpha.primes()) {
        Ok(())
    } else {
        Err(Error::PrimeSetMismatch(gamma.primes().to_string(), alpha.primes().to_string()))
    }
}

/// sum_p {gamma alpha_p}_p over the primes of `alpha`.
pub(crate) fn tail_sum(alpha: &AdeleVector, gamma: &Rational) -> Rational {
    alpha
        .padic_pairs()
        .map(|(p, ap)| padic_fractional_part(&(gamma * ap), p))
        .sum()
}

/// xi(alpha, gamma, n), exact. The sign is left for the caller to check.
pub fn volume_xi(alpha: &AdeleVector, gamma: &GammaElement, n: &BigInt) -> Result<ExactReal> {
    check_gamma(alpha, gamma)?;
    let g = gamma.value();
    let rational = tail_sum(alpha, g) + Rational::from_integer(n.clone());
    Ok(alpha.real().mul_rational(&-g).add_rational(&rational))
}

/// A realized volume: gamma, n and the resulting xi >= 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VolumeElement {
    pub gamma: GammaElement,
    pub n: BigInt,
    pub xi: ExactReal,
}

impl VolumeElement {
    pub fn new(alpha: &AdeleVector, gamma: GammaElement, n: BigInt) -> Result<Self> {
        let xi = volume_xi(alpha, &gamma, &n)?;
        if xi.is_negative() {
            return Err(Error::NegativeVolume(xi.to_string()));
        }
        Ok(VolumeElement { gamma, n, xi })
    }
}

/// Smallest n with xi >= 0 and lambda != -alpha_p at every prime.
///
/// lambda = -alpha_p happens exactly when n = gamma alpha_p - sum {gamma alpha}_p,
/// so at most one n per prime is vetoed.
pub fn choose_n(alpha: &AdeleVector, gamma: &GammaElement) -> Result<BigInt> {
    check_gamma(alpha, gamma)?;
    if !crate::solenoid::is_minimal(alpha) {
        return Err(Error::NotMinimal(alpha.real().to_string()));
    }
    let g = gamma.value();
    let tails = tail_sum(alpha, g);
    let vetoed: Vec<BigInt> = alpha
        .padic()
        .iter()
        .map(|ap| g * ap - &tails)
        .filter(|v| v.is_integer())
        .map(|v| v.to_integer())
        .collect();
    let xi0 = volume_xi(alpha, gamma, &BigInt::zero())?;
    let mut n = -xi0.floor();
    while vetoed.contains(&n) {
        n += 1;
    }
    Ok(n)
}

/// Every volume with |gamma| <= bound, p-adic denominator exponents <= bound and
/// xi in [0, bound], sorted by xi (then gamma, then n).
pub fn enumerate_volumes(alpha: &AdeleVector, bound: u32) -> Result<Vec<VolumeElement>> {
    if !crate::solenoid::is_minimal(alpha) {
        return Err(Error::NotMinimal(alpha.real().to_string()));
    }
    let primes = alpha.primes();
    let denom: Rational = primes.iter().map(|p| prime_power(p, i64::from(bound))).product();
    let denom = denom.to_integer();
    let reach = &denom * BigInt::from(bound);
    let upper = ExactReal::from_integer(BigInt::from(bound));
    let mut out = Vec::new();
    let mut a = -reach.clone();
    while a <= reach {
        let g = Rational::new(a.clone(), denom.clone());
        let gamma = GammaElement::new(g, primes)?;
        let xi0 = volume_xi(alpha, &gamma, &BigInt::zero())?;
        let mut n = -xi0.floor();
        loop {
            let xi = xi0.add_rational(&Rational::from_integer(n.clone()));
            if xi > upper {
                break;
            }
            out.push(VolumeElement { gamma: gamma.clone(), n: n.clone(), xi });
            n += 1;
        }
        a += 1;
    }
    out.sort_by(|x, y| {
        x.xi
            .partial_cmp(&y.xi)
            .unwrap_or(Ordering::Equal)
            .then_with(|| x.gamma.value().cmp(y.gamma.value()))
            .then_with(|| x.n.cmp(&y.n))
    });
    Ok(out)
}

/// True iff e(volume) = psi_gamma(alpha), i.e. volume minus the character
/// phase of alpha is an integer.
pub fn character_volume_identity(alpha: &AdeleVector, gamma: &GammaElement, volume: &ExactReal) -> Result<bool> {
    let phase = character_phase(gamma, alpha)?;
    Ok(volume.checked_sub(phase.theta())?.is_integer())
}

/// Narrows a multiplier to i64.
pub(crate) fn to_i64(n: &BigInt) -> Result<i64> {
    n.to_i64().ok_or_else(|| Error::Overflow(n.to_string()))
}

/// +-(p1 ... pk)^-ell.
pub fn special_gamma(primes: &PrimeSet, sign: i32, ell: u32) -> Result<GammaElement> {
    if ell == 0 || sign == 0 {
        return Err(Error::NotSpecialGamma(format!("sign {sign}, ell {ell}")));
    }
    let base = primes.product().pow(ell);
    let mut g = Rational::new(BigInt::one(), base);
    if sign < 0 {
        g = -g;
    }
    GammaElement::new(g, primes)
}

/// Recovers (sign, ell) from a gamma of the special form.
pub fn special_parts(gamma: &GammaElement) -> Result<(i32, u32)> {
    let g = gamma.value();
    let bad = || Error::NotSpecialGamma(g.to_string());
    if g.is_zero() || !g.numer().abs().is_one() {
        return Err(bad());
    }
    let primes = gamma.primes();
    let base = primes.product();
    let mut ell = 0u32;
    let mut d = BigInt::one();
    while &d < g.denom() {
        d *= &base;
        ell += 1;
        if base.is_one() {
            break;
        }
    }
    if &d != g.denom() {
        return Err(bad());
    }
    let ell = if primes.is_empty() { 1 } else { ell };
    if ell == 0 {
        return Err(bad());
    }
    Ok((if g.is_negative() { -1 } else { 1 }, ell))
}
