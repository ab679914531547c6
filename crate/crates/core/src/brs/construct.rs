//! Explicit BRS of every admissible volume, as weighted box sets.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::boxes::{AdelicBox, PAdicBall, WeightedBox, WeightedBoxSet};
use super::volume::{character_volume_identity, choose_n, special_gamma, tail_sum, to_i64, volume_xi};
use crate::error::{Error, Result};
use crate::exact::{padic_abs, padic_valuation, ExactReal, PrimeSet, Rational, Valuation};
use crate::solenoid::{is_minimal, AdeleVector, GammaElement};

/// Every intermediate quantity of a construction, kept for inspection and
/// for re-checking the exact identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrsConstruction {
    pub alpha: AdeleVector,
    pub gamma_special: GammaElement,
    pub sign: i32,
    pub ell: u32,
    pub n: BigInt,
    pub lambda1: Rational,
    pub lambda2: Rational,
    pub lambda: Rational,
    /// 1 / prod_p |lambda1 + lambda2 alpha_p|_p.
    pub big_m: BigInt,
    pub xi: ExactReal,
    /// `[0, |lambda + alpha_inf|) x prod B(0, |lambda + alpha_p|_p)`, of volume xi / M.
    pub window: AdelicBox,
    pub window_volume: ExactReal,
    /// The window stretched M times along the real axis, of volume xi.
    pub base_box: AdelicBox,
    pub gamma_prime: GammaElement,
    pub n_prime: BigInt,
    pub xi_prime: ExactReal,
    pub m: i64,
    pub m_prime: i64,
    pub result: WeightedBoxSet,
}

/// gamma = sign (p1...pk)^-ell with xi' = m xi + m' for the requested (gamma', n').
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub sign: i32,
    pub ell: u32,
    pub gamma: GammaElement,
    pub n: BigInt,
    pub xi: ExactReal,
    pub xi_prime: ExactReal,
    pub m: i64,
    pub m_prime: i64,
}

fn require_minimal(alpha: &AdeleVector) -> Result<()> {
    if is_minimal(alpha) {
        Ok(())
    } else {
        Err(Error::NotMinimal(alpha.real().to_string()))
    }
}

/// The window, its box stretched by M, and M itself for a special gamma.
#[allow(clippy::type_complexity)]
fn special_boxes(
    alpha: &AdeleVector,
    lambda1: &Rational,
    lambda2: &Rational,
    lambda: &Rational,
) -> Result<(BigInt, AdelicBox, AdelicBox)> {
    let mut inv_m = Rational::one();
    let mut balls = Vec::with_capacity(alpha.primes().len());
    for (p, ap) in alpha.padic_pairs() {
        let shifted = lambda + ap;
        let v = match padic_valuation(&shifted, p) {
            Valuation::Infinite => return Err(Error::ConditionViolated(format!("p = {p}"))),
            Valuation::Finite(v) => v,
        };
        let local = padic_abs(&(lambda1 + lambda2 * ap), p);
        if local > Rational::one() {
            return Err(Error::IdentityFailure(format!("lambda1 + lambda2 alpha_{p} is not {p}-integral")));
        }
        inv_m *= local;
        balls.push(PAdicBall::new(p, Rational::zero(), -v));
    }
    let m_rat = inv_m.recip();
    if !m_rat.is_integer() {
        return Err(Error::IdentityFailure(format!("1/M = {inv_m} is not the inverse of an integer")));
    }
    let big_m = m_rat.to_integer();
    let length = alpha.real().add_rational(lambda).abs();
    let window = AdelicBox::new(ExactReal::zero(), length.clone(), balls.clone())?;
    let base = AdelicBox::new(ExactReal::zero(), length.mul_integer(&big_m), balls)?;
    Ok((big_m, window, base))
}

/// The construction for gamma = sign (p1...pk)^-ell (gamma = sign when Q is empty).
///
/// Fails with `ConditionViolated` when lambda = -alpha_p for some p and with
/// `NegativeVolume` when xi < 0.
pub fn construct_special(alpha: &AdeleVector, sign: i32, ell: u32, n: &BigInt) -> Result<BrsConstruction> {
    require_minimal(alpha)?;
    let gamma = special_gamma(alpha.primes(), sign, ell)?;
    let xi = volume_xi(alpha, &gamma, n)?;
    if xi.is_negative() {
        return Err(Error::NegativeVolume(xi.to_string()));
    }
    let lambda1 = tail_sum(alpha, gamma.value()) + Rational::from_integer(n.clone());
    let lambda2 = -gamma.value().clone();
    let lambda = &lambda1 / &lambda2;
    let (big_m, window, base_box) = special_boxes(alpha, &lambda1, &lambda2, &lambda)?;

    let window_volume = window.volume();
    let expected = xi.mul_rational(&Rational::new(BigInt::one(), big_m.clone()));
    if window_volume != expected {
        return Err(Error::IdentityFailure(format!("window volume {window_volume} != xi/M = {expected}")));
    }
    if base_box.volume() != xi {
        return Err(Error::IdentityFailure(format!("base box volume {} != xi = {xi}", base_box.volume())));
    }
    let certificate = base_box.volume().floor();
    let result = WeightedBoxSet::new(
        alpha.primes().clone(),
        vec![WeightedBox { region: base_box.clone(), weight: 1 }],
        xi.clone(),
        certificate,
    )?;
    Ok(BrsConstruction {
        alpha: alpha.clone(),
        gamma_special: gamma.clone(),
        sign: sign.signum(),
        ell,
        n: n.clone(),
        lambda1,
        lambda2,
        lambda,
        big_m,
        xi: xi.clone(),
        window,
        window_volume,
        base_box,
        gamma_prime: gamma,
        n_prime: n.clone(),
        xi_prime: xi,
        m: 1,
        m_prime: 0,
        result,
    })
}

/// Writes xi(gamma', n') = m xi(gamma, n) + m' with gamma special.
///
/// ell = max(1, max_p -v_p(gamma')) makes m = gamma'/gamma a positive integer,
/// and n comes from `choose_n`.
pub fn decompose_general(alpha: &AdeleVector, gamma_prime: &GammaElement, n_prime: &BigInt) -> Result<Decomposition> {
    if gamma_prime.is_zero() {
        return Err(Error::ZeroGamma);
    }
    require_minimal(alpha)?;
    let xi_prime = volume_xi(alpha, gamma_prime, n_prime)?;
    if xi_prime.is_negative() {
        return Err(Error::NegativeVolume(xi_prime.to_string()));
    }
    let gp = gamma_prime.value();
    let ell = alpha
        .primes()
        .iter()
        .filter_map(|p| padic_valuation(gp, p).finite())
        .map(|v| -v)
        .fold(1i64, i64::max);
    let ell = u32::try_from(ell).map_err(|_| Error::Overflow(ell.to_string()))?;
    let sign = if gp.is_negative() { -1 } else { 1 };
    let gamma = special_gamma(alpha.primes(), sign, ell)?;
    let m = gp / gamma.value();
    if !m.is_integer() || !m.is_positive() {
        return Err(Error::IdentityFailure(format!("gamma'/gamma = {m} is not a positive integer")));
    }
    let m = m.to_integer();
    let n = choose_n(alpha, &gamma)?;
    let xi = volume_xi(alpha, &gamma, &n)?;
    let diff = xi_prime.checked_sub(&xi.mul_integer(&m))?;
    let m_prime = diff
        .to_rational()
        .filter(|r| r.is_integer())
        .ok_or_else(|| Error::IdentityFailure(format!("xi' - m xi = {diff} is not an integer")))?
        .to_integer();
    Ok(Decomposition {
        sign,
        ell,
        gamma,
        n,
        xi,
        xi_prime,
        m: to_i64(&m)?,
        m_prime: to_i64(&m_prime)?,
    })
}

/// A BRS of volume xi(gamma', n'): the special base box stretched m times
/// along the real axis, plus m' copies of the whole solenoid.
///
/// When m' < 0 every point of the stretched box has at least floor(|B'|)
/// preimages, which is recorded as the certificate and must cover |m'|.
pub fn construct_brs(alpha: &AdeleVector, gamma_prime: &GammaElement, n_prime: &BigInt) -> Result<BrsConstruction> {
    let d = decompose_general(alpha, gamma_prime, n_prime)?;
    let special = construct_special(alpha, d.sign, d.ell, &d.n)?;
    let stretched = AdelicBox::new(
        ExactReal::zero(),
        special.base_box.hi().mul_integer(&BigInt::from(d.m)),
        special.base_box.balls().to_vec(),
    )?;
    let certificate = stretched.volume().floor();
    if d.m_prime < 0 && certificate < BigInt::from(-d.m_prime) {
        return Err(Error::CertificateFailure {
            certificate: certificate.to_string(),
            needed: (-d.m_prime).to_string(),
        });
    }
    let primes = alpha.primes().clone();
    let mut terms = vec![WeightedBox { region: stretched, weight: 1 }];
    if d.m_prime != 0 {
        terms.push(WeightedBox { region: AdelicBox::fundamental_domain(&primes), weight: d.m_prime });
    }
    let result = WeightedBoxSet::new(primes, terms, d.xi_prime.clone(), certificate)?;
    if result.box_volume() != d.xi_prime {
        return Err(Error::IdentityFailure(format!(
            "box volume {} != xi' = {}",
            result.box_volume(),
            d.xi_prime
        )));
    }
    Ok(BrsConstruction {
        gamma_prime: gamma_prime.clone(),
        n_prime: n_prime.clone(),
        xi_prime: d.xi_prime,
        m: d.m,
        m_prime: d.m_prime,
        result,
        ..special
    })
}

/// Like `construct_brs`, but also accepts gamma' = 0, where the volume n' is
/// realized by n' copies of the fundamental domain.
pub fn construct_volume(alpha: &AdeleVector, gamma_prime: &GammaElement, n_prime: &BigInt) -> Result<WeightedBoxSet> {
    if !gamma_prime.is_zero() {
        return Ok(construct_brs(alpha, gamma_prime, n_prime)?.result);
    }
    if n_prime.is_negative() {
        return Err(Error::NegativeVolume(n_prime.to_string()));
    }
    let primes = alpha.primes().clone();
    let copies = to_i64(n_prime)?;
    let terms = (0..copies)
        .map(|_| WeightedBox { region: AdelicBox::fundamental_domain(&primes), weight: 1 })
        .collect();
    WeightedBoxSet::from_terms(primes, terms)
}

impl BrsConstruction {
    /// Re-checks every exact identity the construction relies on.
    pub fn verify(&self) -> Result<()> {
        let fail = |what: String| Err(Error::IdentityFailure(what));
        if self.lambda1 != tail_sum(&self.alpha, self.gamma_special.value()) + Rational::from_integer(self.n.clone()) {
            return fail("lambda1".into());
        }
        if self.lambda2 != -self.gamma_special.value().clone() || self.lambda != &self.lambda1 / &self.lambda2 {
            return fail("lambda2 or lambda".into());
        }
        let inv_m: Rational = self
            .alpha
            .padic_pairs()
            .map(|(p, ap)| padic_abs(&(&self.lambda1 + &self.lambda2 * ap), p))
            .product();
        if inv_m * Rational::from_integer(self.big_m.clone()) != Rational::one() {
            return fail("prod |lambda1 + lambda2 alpha_p|_p != 1/M".into());
        }
        let weil: Rational = self
            .alpha
            .padic_pairs()
            .map(|(p, ap)| padic_abs(&(&self.lambda + ap), p))
            .product();
        let lhs = self.alpha.real().add_rational(&self.lambda).abs().mul_rational(&weil);
        let rhs = self.xi.mul_rational(&Rational::new(BigInt::one(), self.big_m.clone()));
        if lhs != rhs || self.window.volume() != rhs || self.window_volume != rhs {
            return fail(format!("|lambda + alpha| = {lhs} but xi/M = {rhs}"));
        }
        if self.base_box.volume() != self.xi {
            return fail("base box volume != xi".into());
        }
        let recombined = self.xi.mul_integer(&BigInt::from(self.m)).add_rational(&Rational::from_integer(self.m_prime.into()));
        if recombined != self.xi_prime || self.result.claimed_volume() != &self.xi_prime {
            return fail("xi' != m xi + m'".into());
        }
        if &Rational::from_integer(self.m.into()) * self.gamma_special.value() != *self.gamma_prime.value() {
            return fail("m gamma != gamma'".into());
        }
        if volume_xi(&self.alpha, &self.gamma_prime, &self.n_prime)? != self.xi_prime {
            return fail("claimed volume != xi(gamma', n')".into());
        }
        if self.result.box_volume() != self.xi_prime {
            return fail("box volume != claimed volume".into());
        }
        if !character_volume_identity(&self.alpha, &self.gamma_prime, &self.xi_prime)? {
            return fail("e(|A|) != psi_gamma'(alpha)".into());
        }
        Ok(())
    }

    pub fn primes(&self) -> &PrimeSet {
        self.alpha.primes()
    }
}
