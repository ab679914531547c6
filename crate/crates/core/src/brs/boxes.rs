//! Adelic boxes, integer-weighted box multisets and their indicator functions.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    crt_coset, padic_valuation, parse_rational, prime_power, Congruence, ExactReal, Prime,
    PrimeSet, Rational, Valuation,
};
use crate::solenoid::{AdeleVector, SolenoidPoint};

/// The closed ball B(center, p^f) = { x : v_p(x - center) >= -f } in Q_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicBall {
    pub prime: Prime,
    pub center: Rational,
    pub radius_exponent: i64,
}

impl PAdicBall {
    pub fn new(prime: Prime, center: Rational, radius_exponent: i64) -> Self {
        PAdicBall { prime, center, radius_exponent }
    }

    /// Z_p itself.
    pub fn integers(prime: Prime) -> Self {
        Self::new(prime, Rational::zero(), 0)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        padic_valuation(&(x - &self.center), self.prime) >= Valuation::Finite(-self.radius_exponent)
    }

    /// Haar measure, normalized so that Z_p has volume 1.
    pub fn volume(&self) -> Rational {
        prime_power(self.prime, self.radius_exponent)
    }
}

/// `[lo, hi) x prod_p B(c_p, p^f_p)`, one ball for every prime of the ambient set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdelicBox {
    lo: ExactReal,
    hi: ExactReal,
    balls: Vec<PAdicBall>,
}

impl AdelicBox {
    pub fn new(lo: ExactReal, hi: ExactReal, mut balls: Vec<PAdicBall>) -> Result<Self> {
        if lo.cmp_exact(&hi)? != std::cmp::Ordering::Less {
            return Err(Error::Parse(format!("empty real interval [{lo}, {hi})")));
        }
        balls.sort_by_key(|b| b.prime);
        if balls.windows(2).any(|w| w[0].prime == w[1].prime) {
            return Err(Error::Parse("two balls at the same prime".into()));
        }
        Ok(AdelicBox { lo, hi, balls })
    }

    /// `[0, 1) x prod Z_p`: every point of X_Q has exactly one lift here.
    pub fn fundamental_domain(primes: &PrimeSet) -> Self {
        AdelicBox {
            lo: ExactReal::zero(),
            hi: ExactReal::one(),
            balls: primes.iter().map(PAdicBall::integers).collect(),
        }
    }

    pub fn lo(&self) -> &ExactReal {
        &self.lo
    }

    pub fn hi(&self) -> &ExactReal {
        &self.hi
    }

    pub fn balls(&self) -> &[PAdicBall] {
        &self.balls
    }

    pub fn primes(&self) -> PrimeSet {
        PrimeSet::from_primes(self.balls.iter().map(|b| b.prime))
    }

    pub fn length(&self) -> ExactReal {
        &self.hi - &self.lo
    }

    pub fn volume(&self) -> ExactReal {
        let p_adic: Rational = self.balls.iter().map(PAdicBall::volume).product();
        self.length().mul_rational(&p_adic)
    }

    /// Membership of a point of A_Q (not of X_Q).
    pub fn contains(&self, x: &AdeleVector) -> Result<bool> {
        let real_in = self.lo.cmp_exact(x.real())?.is_le() && x.real().cmp_exact(&self.hi)?.is_lt();
        Ok(real_in
            && self
                .balls
                .iter()
                .all(|b| x.coordinate(b.prime).is_some_and(|xp| b.contains(xp))))
    }

    /// Number of gamma in Z[1/Q] with x + gamma in the box.
    ///
    /// The ball conditions cut out a coset c + delta Z of Z[1/Q]; the count is
    /// the number of coset points in [lo - x_inf, hi - x_inf).
    pub fn lift_count(&self, x: &SolenoidPoint) -> Result<BigInt> {
        let point = x.as_adele();
        let constraints = self
            .balls
            .iter()
            .map(|b| {
                let xp = point
                    .coordinate(b.prime)
                    .ok_or_else(|| Error::PrimeSetMismatch(self.primes().to_string(), point.primes().to_string()))?;
                Ok(Congruence::new(b.prime, b.radius_exponent, &b.center - xp))
            })
            .collect::<Result<Vec<_>>>()?;
        let coset = crt_coset(&constraints)?;
        let lo = self.lo.checked_sub(point.real())?;
        let hi = self.hi.checked_sub(point.real())?;
        Ok(count_coset_in_interval(&coset.offset, &coset.step, &lo, &hi))
    }
}

/// #{ a in Z : lo <= c + a delta < hi } for delta > 0.
pub fn count_coset_in_interval(c: &Rational, delta: &Rational, lo: &ExactReal, hi: &ExactReal) -> BigInt {
    debug_assert!(delta.is_positive());
    let inv = delta.recip();
    // a ranges over [ceil((lo - c)/delta), ceil((hi - c)/delta))
    let first = lo.sub_rational(c).mul_rational(&inv).ceil();
    let past = hi.sub_rational(c).mul_rational(&inv).ceil();
    if past > first {
        past - first
    } else {
        BigInt::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedBox {
    pub region: AdelicBox,
    pub weight: i64,
}

/// A multiset on X_Q given by `chi = sum_i w_i * chi_{tau(B_i)}`.
///
/// `certificate` is a proven lower bound on the pointwise multiplicity
/// contributed by the positive terms; it must cover the total negative weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightedBoxSet {
    primes: PrimeSet,
    terms: Vec<WeightedBox>,
    claimed_volume: ExactReal,
    certificate: BigInt,
}

impl WeightedBoxSet {
    pub fn new(
        primes: PrimeSet,
        terms: Vec<WeightedBox>,
        claimed_volume: ExactReal,
        certificate: BigInt,
    ) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.region.primes() != primes) {
            return Err(Error::PrimeSetMismatch(primes.to_string(), t.region.primes().to_string()));
        }
        if claimed_volume.is_negative() {
            return Err(Error::NegativeVolume(claimed_volume.to_string()));
        }
        let set = WeightedBoxSet { primes, terms, claimed_volume, certificate };
        let needed = set.negative_weight();
        if set.certificate < needed {
            return Err(Error::CertificateFailure {
                certificate: set.certificate.to_string(),
                needed: needed.to_string(),
            });
        }
        Ok(set)
    }

    /// Builds the set with claimed volume sum_i w_i |B_i| and the generic
    /// certificate sum_{w_i > 0} w_i * floor(|B_i|).
    pub fn from_terms(primes: PrimeSet, terms: Vec<WeightedBox>) -> Result<Self> {
        let volume = terms
            .iter()
            .try_fold(ExactReal::zero(), |acc, t| acc.checked_add(&t.region.volume().mul_integer(&t.weight.into())))?;
        let certificate = terms
            .iter()
            .filter(|t| t.weight > 0)
            .map(|t| t.region.volume().floor() * BigInt::from(t.weight))
            .sum();
        Self::new(primes, terms, volume, certificate)
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn terms(&self) -> &[WeightedBox] {
        &self.terms
    }

    pub fn claimed_volume(&self) -> &ExactReal {
        &self.claimed_volume
    }

    pub fn certificate(&self) -> &BigInt {
        &self.certificate
    }

    pub fn negative_weight(&self) -> BigInt {
        self.terms.iter().filter(|t| t.weight < 0).map(|t| BigInt::from(-t.weight)).sum()
    }

    /// sum_i w_i |B_i|, recomputed from the boxes.
    pub fn box_volume(&self) -> ExactReal {
        self.terms
            .iter()
            .fold(ExactReal::zero(), |acc, t| acc + t.region.volume().mul_integer(&t.weight.into()))
    }

    /// Canonical text form, one term per line:
    /// `weight | lo | hi | p:center:exponent ...`, preceded by `#` metadata lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# primes = {}\n", self.primes));
        out.push_str(&format!("# claimed_volume = {}\n", self.claimed_volume));
        out.push_str(&format!("# certificate = {}\n", self.certificate));
        for t in &self.terms {
            let balls: Vec<String> = t
                .region
                .balls
                .iter()
                .map(|b| format!("{}:{}:{}", b.prime, b.center, b.radius_exponent))
                .collect();
            out.push_str(&format!("{} | {} | {} | {}\n", t.weight, t.region.lo, t.region.hi, balls.join(" ")));
        }
        out
    }

    /// Parses `to_text` output. Without metadata lines the primes come from the
    /// first term and the volume and certificate are recomputed.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut primes = None;
        let mut claimed = None;
        let mut certificate = None;
        let mut terms = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((key, value)) = meta.split_once('=') {
                    let value = value.trim();
                    match key.trim() {
                        "primes" => primes = Some(parse_prime_set(value)?),
                        "claimed_volume" => claimed = Some(value.parse::<ExactReal>()?),
                        "certificate" => {
                            certificate = Some(value.parse::<BigInt>().map_err(|_| Error::Parse(raw.into()))?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            terms.push(parse_term(line)?);
        }
        let primes = match primes {
            Some(p) => p,
            None => terms.first().map(|t| t.region.primes()).unwrap_or_default(),
        };
        match (claimed, certificate) {
            (Some(v), Some(c)) => Self::new(primes, terms, v, c),
            _ => Self::from_terms(primes, terms),
        }
    }
}

fn parse_prime_set(s: &str) -> Result<PrimeSet> {
    let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
    let values = inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad prime '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    PrimeSet::new(values)
}

fn parse_term(line: &str) -> Result<WeightedBox> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 4 {
        return Err(Error::Parse(format!("expected 4 '|'-separated fields: '{line}'")));
    }
    let weight: i64 = fields[0]
        .replace('−', "-")
        .parse()
        .map_err(|_| Error::Parse(format!("bad weight '{}'", fields[0])))?;
    let lo: ExactReal = fields[1].parse()?;
    let hi: ExactReal = fields[2].parse()?;
    let balls = fields[3]
        .split_whitespace()
        .map(|spec| {
            let parts: Vec<&str> = spec.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad ball '{spec}'")));
            }
            let p = Prime::new(parts[0].parse().map_err(|_| Error::Parse(format!("bad prime '{}'", parts[0])))?)?;
            let center = parse_rational(parts[1])?;
            let f: i64 = parts[2]
                .replace('−', "-")
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent '{}'", parts[2])))?;
            Ok(PAdicBall::new(p, center, f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightedBox { region: AdelicBox::new(lo, hi, balls)?, weight })
}

impl fmt::Display for AdelicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)?;
        for b in &self.balls {
            write!(f, " x B({}, {}^{})", b.center, b.prime, b.radius_exponent)?;
        }
        Ok(())
    }
}

/// chi_A(x) = sum_i w_i * #{ gamma : x + gamma in B_i }.
pub fn chi_eval(set: &WeightedBoxSet, x: &SolenoidPoint) -> Result<u64> {
    if x.primes() != set.primes() {
        return Err(Error::PrimeSetMismatch(set.primes().to_string(), x.primes().to_string()));
    }
    let mut total = BigInt::zero();
    for t in set.terms() {
        total += t.region.lift_count(x)? * BigInt::from(t.weight);
    }
    if total.is_negative() {
        return Err(Error::NegativeIndicator(total.to_string()));
    }
    total.to_u64().ok_or_else(|| Error::Overflow(total.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn q2() -> PrimeSet {
        PrimeSet::new([2]).unwrap()
    }

    fn two() -> Prime {
        Prime::new(2).unwrap()
    }

    fn worked_box() -> AdelicBox {
        let hi = ExactReal::from_parts(5, -2, 2, 2).unwrap();
        AdelicBox::new(ExactReal::zero(), hi, vec![PAdicBall::new(two(), rat(0, 1), -1)]).unwrap()
    }

    /// Oracle: enumerate a over a generous window, testing membership exactly.
    fn brute_count(c: &Rational, delta: &Rational, lo: &ExactReal, hi: &ExactReal) -> BigInt {
        let mut n = 0i64;
        for a in -400..400 {
            let v = ExactReal::from_rational(&(c + delta * BigInt::from(a)));
            if lo <= &v && &v < hi {
                n += 1;
            }
        }
        BigInt::from(n)
    }

    #[test]
    fn coset_count_examples() {
        let hi = ExactReal::from_parts(5, -2, 2, 2).unwrap();
        assert_eq!(count_coset_in_interval(&rat(0, 1), &rat(2, 1), &ExactReal::zero(), &hi), 1.into());
        assert_eq!(count_coset_in_interval(&rat(0, 1), &rat(1, 1), &ExactReal::zero(), &3.into()), 3.into());
        assert_eq!(count_coset_in_interval(&rat(1, 2), &rat(3, 2), &ExactReal::zero(), &1.into()), 1.into());
        assert_eq!(count_coset_in_interval(&rat(0, 1), &rat(1, 1), &3.into(), &1.into()), 0.into());
    }

    #[test]
    fn coset_count_matches_enumeration() {
        let ends = [
            ExactReal::sqrt(2),
            ExactReal::from_parts(-7, 3, 4, 3).unwrap(),
            ExactReal::from(rat(5, 3)),
            ExactReal::from(-2),
            ExactReal::from_parts(11, -5, 2, 5).unwrap(),
        ];
        for c in [rat(0, 1), rat(1, 3), rat(-5, 4)] {
            for delta in [rat(1, 1), rat(1, 3), rat(5, 2)] {
                for lo in &ends {
                    for hi in &ends {
                        if lo.cmp_exact(hi).is_ok() {
                            assert_eq!(
                                count_coset_in_interval(&c, &delta, lo, hi),
                                brute_count(&c, &delta, lo, hi),
                                "c={c} delta={delta} [{lo}, {hi})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chi_examples() {
        let set = WeightedBoxSet::from_terms(q2(), vec![WeightedBox { region: worked_box(), weight: 1 }]).unwrap();
        assert_eq!(set.claimed_volume(), &ExactReal::from_parts(5, -2, 4, 2).unwrap());
        let origin = SolenoidPoint::origin(&q2());
        assert_eq!(chi_eval(&set, &origin).unwrap(), 1);

        let fd = WeightedBoxSet::from_terms(
            q2(),
            vec![WeightedBox { region: AdelicBox::fundamental_domain(&q2()), weight: 1 }],
        )
        .unwrap();
        let x = SolenoidPoint::new(
            AdeleVector::from_pairs(ExactReal::from_parts(-1, 1, 1, 2).unwrap(), &[(2, rat(5, 3))]).unwrap(),
        )
        .unwrap();
        assert_eq!(chi_eval(&fd, &x).unwrap(), 1);
        assert_eq!(chi_eval(&fd, &origin).unwrap(), 1);

        let long = AdelicBox::new(ExactReal::zero(), 3.into(), vec![PAdicBall::integers(two())]).unwrap();
        let set = WeightedBoxSet::from_terms(q2(), vec![WeightedBox { region: long, weight: 1 }]).unwrap();
        assert_eq!(chi_eval(&set, &origin).unwrap(), 3);

        let other = SolenoidPoint::origin(&PrimeSet::new([3]).unwrap());
        assert!(matches!(chi_eval(&set, &other), Err(Error::PrimeSetMismatch(..))));
    }

    #[test]
    fn lift_count_agrees_with_membership() {
        // every counted lift really lies in the box, at a few reduced points
        let b = worked_box();
        for k in 0..20i64 {
            let x = AdeleVector::from_pairs(ExactReal::sqrt(2).mul_integer(&k.into()), &[(2, rat(k, 2))]).unwrap();
            let (s, _) = crate::solenoid::reduce_mod_gamma(&x);
            let brute: i64 = (-64..64)
                .filter(|j| b.contains(&s.as_adele().add_diagonal(&rat(*j, 2))).unwrap())
                .count() as i64;
            assert_eq!(b.lift_count(&s).unwrap(), BigInt::from(brute), "k = {k}");
        }
    }

    #[test]
    fn certificate_is_enforced() {
        let fd = AdelicBox::fundamental_domain(&q2());
        let err = WeightedBoxSet::from_terms(
            q2(),
            vec![WeightedBox { region: worked_box(), weight: 1 }, WeightedBox { region: fd, weight: -1 }],
        );
        assert!(matches!(err, Err(Error::CertificateFailure { .. }) | Err(Error::NegativeVolume(_))));
    }

    #[test]
    fn text_round_trip() {
        let fd = AdelicBox::fundamental_domain(&q2());
        let b = AdelicBox::new(
            ExactReal::zero(),
            ExactReal::from_parts(15, -6, 2, 2).unwrap(),
            vec![PAdicBall::new(two(), rat(0, 1), -1)],
        )
        .unwrap();
        let set = WeightedBoxSet::from_terms(
            q2(),
            vec![WeightedBox { region: b, weight: 1 }, WeightedBox { region: fd, weight: -1 }],
        )
        .unwrap();
        let text = set.to_text();
        assert!(text.contains("1 | 0 | 15/2 − 3√2 | 2:0:-1"));
        assert!(text.contains("-1 | 0 | 1 | 2:0:0"));
        assert_eq!(WeightedBoxSet::from_text(&text).unwrap(), set);
        let bare: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
        assert_eq!(WeightedBoxSet::from_text(&bare).unwrap(), set);
        assert!(WeightedBoxSet::from_text("1 | 0 | x | 2:0:0").is_err());
    }
}
