//! Cut-and-project description of the constructed sets over G = A_Q x A_Q.
//!
//! Physical space E = {(x, -x alpha)}, internal space F = {(0, y)}, lattice
//! Gamma_Q x Gamma_Q. The multiplicity of (g, -g alpha) in the projected point
//! set is counted here by direct enumeration, independently of the coset
//! machinery behind `brs::chi_eval`, so the two can check each other.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::brs::{chi_eval, AdelicBox, BrsConstruction, PAdicBall, WeightedBoxSet};
use crate::error::{Error, Result};
use crate::exact::{padic_abs, padic_valuation, prime_power, ExactReal, PrimeSet, Rational, Valuation};
use crate::par::{try_map_indices, Execution};
use crate::solenoid::{in_fundamental_domain, orbit_point, reduce_mod_gamma, AdeleVector, SolenoidPoint};

/// A point (x, y) of G.
pub type Pair = (AdeleVector, AdeleVector);

/// alpha together with lambda in Gamma_Q; beta = (lambda + alpha)^-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutProjectConfig {
    alpha: AdeleVector,
    lambda: Rational,
    shifted: AdeleVector,
    beta: AdeleVector,
}

impl CutProjectConfig {
    /// Requires lambda + alpha to be a unit: nonzero at every place.
    pub fn new(alpha: AdeleVector, lambda: Rational) -> Result<Self> {
        let shifted = alpha.add_diagonal(&lambda);
        if shifted.real().is_zero() {
            return Err(Error::ConditionViolated("the real place".into()));
        }
        if let Some((p, _)) = shifted.padic_pairs().find(|(_, x)| x.is_zero()) {
            return Err(Error::ConditionViolated(format!("p = {p}")));
        }
        let beta = AdeleVector::new(
            alpha.primes().clone(),
            shifted.real().recip()?,
            shifted.padic().iter().map(|x| x.recip()).collect(),
        )?;
        let unit = beta.checked_mul(&shifted)?;
        if unit != AdeleVector::diagonal(&Rational::one(), alpha.primes()) {
            return Err(Error::IdentityFailure("beta (lambda + alpha) != 1".into()));
        }
        Ok(CutProjectConfig { alpha, lambda, shifted, beta })
    }

    pub fn from_construction(c: &BrsConstruction) -> Result<Self> {
        Self::new(c.alpha.clone(), c.lambda.clone())
    }

    pub fn alpha(&self) -> &AdeleVector {
        &self.alpha
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn beta(&self) -> &AdeleVector {
        &self.beta
    }

    pub fn primes(&self) -> &PrimeSet {
        self.alpha.primes()
    }

    /// `[0, |lambda + alpha_inf|) x prod B(0, |lambda + alpha_p|_p)`: a real
    /// translate of pi_F(W), with the same volume.
    pub fn window(&self) -> Result<AdelicBox> {
        let balls = self
            .shifted
            .padic_pairs()
            .map(|(p, x)| {
                let v = padic_valuation(x, p).finite().expect("nonzero by construction");
                PAdicBall::new(p, Rational::zero(), -v)
            })
            .collect();
        AdelicBox::new(ExactReal::zero(), self.shifted.real().abs(), balls)
    }

    /// |lambda + alpha_inf| prod_p |lambda + alpha_p|_p.
    pub fn window_volume(&self) -> ExactReal {
        let local: Rational = self.shifted.padic_pairs().map(|(p, x)| padic_abs(x, p)).product();
        self.shifted.real().abs().mul_rational(&local)
    }

    /// Whether (x, y) lies in the strip pi_F(W) + E, i.e. (y + x alpha) beta is
    /// in [0, 1) x prod Z_p.
    pub fn in_strip(&self, point: &Pair) -> Result<bool> {
        let (_, internal) = project_f(&self.alpha, point)?;
        Ok(in_fundamental_domain(&internal.checked_mul(&self.beta)?))
    }
}

/// pi_E((x, y)) = (x, -x alpha).
pub fn project_e(alpha: &AdeleVector, (x, _): &Pair) -> Result<Pair> {
    Ok((x.clone(), x.checked_mul(alpha)?.neg()))
}

/// pi_F((x, y)) = (0, y + x alpha).
pub fn project_f(alpha: &AdeleVector, (x, y): &Pair) -> Result<Pair> {
    Ok((AdeleVector::zero(x.primes()), y.checked_add(&x.checked_mul(alpha)?)?))
}

/// The unique s' in Gamma_Q with s' + s beta in [0, 1) x prod Z_p.
pub fn decompose_sigma(config: &CutProjectConfig, sigma: &Rational) -> Result<Rational> {
    let target = config.beta.scale(sigma);
    let (_, g) = reduce_mod_gamma(&target);
    let answer = -g.value().clone();
    if !in_fundamental_domain(&target.add_diagonal(&answer)) {
        return Err(Error::IdentityFailure(format!("decomposition of {sigma} left the fundamental domain")));
    }
    Ok(answer)
}

/// Half-open integer range of candidate gamma_1 values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CandidateRange {
    pub start: i64,
    pub end: i64,
}

impl CandidateRange {
    pub fn first(n: u64) -> Self {
        CandidateRange { start: 0, end: i64::try_from(n).unwrap_or(i64::MAX) }
    }

    pub fn len(&self) -> u64 {
        (self.end - self.start).max(0) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPoint {
    pub gamma1: i64,
    pub multiplicity: u64,
}

/// #{ g2 in Gamma_Q : g2 + x in window }, found by residue search.
///
/// Every admissible g2 has v_p(g2) >= L_p = min(-f_p, v_p(c_p - x_p)), so
/// g2 = k eta with eta = prod p^{L_p}. At each prime the ball condition on k
/// is one residue class modulo p^{e_p}, located by trying every residue; the
/// classes are then merged by stepping through the largest one. What is left
/// is an arithmetic progression of k, counted against the real interval.
pub fn lattice_points_in_window(window: &AdelicBox, x: &AdeleVector) -> Result<u64> {
    let mut eta = Rational::one();
    let mut locals = Vec::with_capacity(window.balls().len());
    for ball in window.balls() {
        let xp = x
            .coordinate(ball.prime)
            .ok_or_else(|| Error::PrimeSetMismatch(window.primes().to_string(), x.primes().to_string()))?;
        let r = &ball.center - xp;
        let low = match padic_valuation(&r, ball.prime) {
            Valuation::Finite(v) => v.min(-ball.radius_exponent),
            Valuation::Infinite => -ball.radius_exponent,
        };
        eta *= prime_power(ball.prime, low);
        locals.push((ball, r, -ball.radius_exponent - low));
    }

    let admissible = |k: &BigInt, ball: &PAdicBall, r: &Rational| {
        let g2 = &eta * Rational::from_integer(k.clone());
        padic_valuation(&(g2 - r), ball.prime) >= Valuation::Finite(-ball.radius_exponent)
    };
    // (modulus, residue) per prime
    let mut classes = Vec::with_capacity(locals.len());
    for (ball, r, e) in &locals {
        let modulus = ball.prime.to_bigint().pow(*e as u32);
        let mut k = BigInt::zero();
        while !admissible(&k, ball, r) {
            k += 1;
            if k >= modulus {
                return Err(Error::IdentityFailure(format!("no residue class at {}", ball.prime)));
            }
        }
        classes.push((modulus, k, *ball, r));
    }
    classes.sort_by(|a, b| b.0.cmp(&a.0));
    let period: BigInt = classes.iter().map(|c| c.0.clone()).product();
    let (mut base, step) = match classes.first() {
        Some((m, k, _, _)) => (k.clone(), m.clone()),
        None => (BigInt::zero(), BigInt::one()),
    };
    while !classes.iter().all(|(_, _, ball, r)| admissible(&base, ball, r)) {
        base += &step;
        if base >= period {
            return Err(Error::IdentityFailure("residue classes do not meet".into()));
        }
    }

    let inv = eta.recip();
    let first = window.lo().checked_sub(x.real())?.mul_rational(&inv).ceil();
    let past = window.hi().checked_sub(x.real())?.mul_rational(&inv).ceil();
    // #{ k in [first, past) : k = base mod period }
    let below = |end: &BigInt| (end - &base - BigInt::one()).div_floor(&period);
    let count = below(&past) - below(&first);
    u64::try_from(count.max(BigInt::zero())).map_err(|e| Error::Overflow(e.to_string()))
}

fn gamma1_times_alpha(alpha: &AdeleVector, g1: i64) -> AdeleVector {
    alpha.scale(&Rational::from_integer(BigInt::from(g1)))
}

/// Cut-and-project points (g1, -g1 alpha) for g1 in `range`, with the
/// multiplicity of the window; zero multiplicities are dropped.
pub fn generate_cutproject(
    config: &CutProjectConfig,
    window: &AdelicBox,
    range: CandidateRange,
    exec: Execution,
) -> Result<Vec<CutPoint>> {
    if window.primes() != *config.primes() {
        return Err(Error::PrimeSetMismatch(window.primes().to_string(), config.primes().to_string()));
    }
    let counts = try_map_indices(exec, range.len(), |i| {
        let g1 = range.start + i as i64;
        Ok::<_, Error>(CutPoint {
            gamma1: g1,
            multiplicity: lattice_points_in_window(window, &gamma1_times_alpha(&config.alpha, g1))?,
        })
    })?;
    Ok(counts.into_iter().filter(|c| c.multiplicity > 0).collect())
}

/// Signed multiplicity of a weighted set at g1: sum of w_i times the window count.
pub fn weighted_multiplicity(set: &WeightedBoxSet, alpha: &AdeleVector, g1: i64) -> Result<i64> {
    let x = gamma1_times_alpha(alpha, g1);
    let mut total = 0i64;
    for t in set.terms() {
        let c = i64::try_from(lattice_points_in_window(&t.region, &x)?).map_err(|e| Error::Overflow(e.to_string()))?;
        total = c
            .checked_mul(t.weight)
            .and_then(|v| total.checked_add(v))
            .ok_or_else(|| Error::Overflow(format!("multiplicity at {g1}")))?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub gamma1: i64,
    pub cut_project: i64,
    pub chi: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceReport {
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares, for g1 in [0, N), the cut-and-project multiplicity with
/// chi_A(g1 alpha) evaluated on the solenoid.
pub fn correspondence_check(
    config: &CutProjectConfig,
    set: &WeightedBoxSet,
    len: u64,
    exec: Execution,
) -> Result<CorrespondenceReport> {
    let origin = SolenoidPoint::origin(config.primes());
    let pairs = try_map_indices(exec, len, |i| {
        let g1 = i64::try_from(i).map_err(|e| Error::Overflow(e.to_string()))?;
        let cp = weighted_multiplicity(set, &config.alpha, g1)?;
        let chi = chi_eval(set, &orbit_point(&config.alpha, &origin, i)?)?;
        Ok::<_, Error>(Mismatch { gamma1: g1, cut_project: cp, chi })
    })?;
    let mismatches = pairs
        .into_iter()
        .filter(|m| m.cut_project < 0 || m.cut_project as u64 != m.chi)
        .collect();
    Ok(CorrespondenceReport { checked: len, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brs::{construct_brs, construct_special, WeightedBox};
    use crate::exact::{rat, Prime};
    use crate::solenoid::GammaElement;

    fn q2() -> PrimeSet {
        PrimeSet::new([2]).unwrap()
    }

    fn worked_alpha() -> AdeleVector {
        AdeleVector::from_pairs(ExactReal::sqrt(2), &[(2, rat(1, 2))]).unwrap()
    }

    fn worked_config() -> CutProjectConfig {
        CutProjectConfig::new(worked_alpha(), rat(-5, 2)).unwrap()
    }

    fn single(window: AdelicBox) -> WeightedBoxSet {
        WeightedBoxSet::from_terms(window.primes(), vec![WeightedBox { region: window, weight: 1 }]).unwrap()
    }

    #[test]
    fn config_and_window() {
        let c = worked_config();
        assert_eq!(c.beta().coordinate(Prime::new(2).unwrap()), Some(&rat(-1, 2)));
        let w = c.window().unwrap();
        assert_eq!(w.hi(), &ExactReal::from_parts(5, -2, 2, 2).unwrap());
        assert_eq!(w.volume(), c.window_volume());
        assert!(matches!(CutProjectConfig::new(worked_alpha(), rat(-1, 2)), Err(Error::ConditionViolated(_))));
    }

    #[test]
    fn projections() {
        let alpha = worked_alpha();
        let x = AdeleVector::from_pairs(ExactReal::from_parts(1, 3, 7, 2).unwrap(), &[(2, rat(3, 4))]).unwrap();
        let y = AdeleVector::from_pairs(ExactReal::from(rat(-2, 5)), &[(2, rat(9, 2))]).unwrap();
        let zero = AdeleVector::zero(&q2());
        let pair = (x.clone(), y.clone());

        let (ex, ey) = project_e(&alpha, &(zero.clone(), y.clone())).unwrap();
        assert_eq!((ex, ey), (zero.clone(), zero.clone()));
        let e_point = project_e(&alpha, &pair).unwrap();
        assert_eq!(project_f(&alpha, &e_point).unwrap(), (zero.clone(), zero.clone()));
        let one = AdeleVector::diagonal(&rat(1, 1), &q2());
        assert_eq!(project_e(&alpha, &(one.clone(), zero.clone())).unwrap(), (one, alpha.neg()));

        let e = project_e(&alpha, &pair).unwrap();
        let f = project_f(&alpha, &pair).unwrap();
        assert_eq!(e.0.checked_add(&f.0).unwrap(), x);
        assert_eq!(e.1.checked_add(&f.1).unwrap(), y);
        assert_eq!(project_e(&alpha, &e).unwrap(), e);
        assert_eq!(project_f(&alpha, &f).unwrap(), f);
    }

    #[test]
    fn sigma_decomposition() {
        let c = worked_config();
        assert_eq!(decompose_sigma(&c, &rat(0, 1)).unwrap(), rat(0, 1));
        let s1 = decompose_sigma(&c, &rat(1, 1)).unwrap();
        assert_eq!(s1, rat(3, 2));
        // neighbours in the step-1 coset fail
        for other in [rat(1, 2), rat(5, 2)] {
            assert!(!in_fundamental_domain(&c.beta().scale(&rat(1, 1)).add_diagonal(&other)));
        }
        // (0, s) + (s', s' lambda) lies in the strip
        for k in -6..6 {
            let s = rat(k, 4);
            let sp = decompose_sigma(&c, &s).unwrap();
            let x = AdeleVector::diagonal(&sp, &q2());
            let y = AdeleVector::diagonal(&(&s + &sp * c.lambda()), &q2());
            assert!(c.in_strip(&(x, y)).unwrap());
        }
    }

    #[test]
    fn sigma_map_is_injective() {
        let c = worked_config();
        let mut seen = std::collections::BTreeMap::new();
        for k in -40..40 {
            let s = rat(k, 8);
            let sp = decompose_sigma(&c, &s).unwrap();
            assert!(seen.insert(sp, s).is_none());
        }
    }

    #[test]
    fn generation_examples() {
        let c = worked_config();
        let fd = AdelicBox::fundamental_domain(&q2());
        let pts = generate_cutproject(&c, &fd, CandidateRange::first(50), Execution::Sequential).unwrap();
        assert_eq!(pts.len(), 50);
        assert!(pts.iter().all(|p| p.multiplicity == 1));

        let pts = generate_cutproject(&c, &c.window().unwrap(), CandidateRange { start: 0, end: 1 }, Execution::Sequential).unwrap();
        assert_eq!(pts, vec![CutPoint { gamma1: 0, multiplicity: 1 }]);

        let empty = CandidateRange { start: 5, end: 5 };
        assert!(generate_cutproject(&c, &fd, empty, Execution::Parallel).unwrap().is_empty());
    }

    #[test]
    fn enumeration_counter_matches_membership() {
        // oracle: scan g2 over a fine grid of Z[1/2] and test membership directly
        let c = worked_config();
        let w = c.window().unwrap();
        for g1 in -10..10 {
            let x = gamma1_times_alpha(c.alpha(), g1);
            let brute = (-400..400)
                .filter(|k| w.contains(&x.add_diagonal(&rat(*k, 16))).unwrap())
                .count() as u64;
            assert_eq!(lattice_points_in_window(&w, &x).unwrap(), brute, "g1 = {g1}");
        }
    }

    #[test]
    fn correspondence() {
        let c = worked_config();
        let set = single(c.window().unwrap());
        assert!(correspondence_check(&c, &set, 1, Execution::Sequential).unwrap().passed());
        assert!(correspondence_check(&c, &set, 300, Execution::Parallel).unwrap().passed());

        let general = construct_brs(&worked_alpha(), &GammaElement::new(rat(3, 2), &q2()).unwrap(), &2.into()).unwrap();
        let gc = CutProjectConfig::from_construction(&general).unwrap();
        assert!(correspondence_check(&gc, &general.result, 300, Execution::Parallel).unwrap().passed());

        // the oracle sees a shrunk window that chi is not told about
        let w = c.window().unwrap();
        let shrunk = AdelicBox::new(w.lo().clone(), w.hi().mul_rational(&rat(9, 10)), w.balls().to_vec()).unwrap();
        let mut mismatched = 0;
        for g1 in 0..300i64 {
            let cp = weighted_multiplicity(&single(shrunk.clone()), c.alpha(), g1).unwrap();
            let chi = chi_eval(&set, &orbit_point(c.alpha(), &SolenoidPoint::origin(&q2()), g1 as u64).unwrap()).unwrap();
            if cp as u64 != chi {
                mismatched += 1;
            }
        }
        assert!(mismatched > 0);
    }

    #[test]
    fn construction_window_matches_config_window() {
        let s = construct_special(&worked_alpha(), 1, 1, &1.into()).unwrap();
        let c = CutProjectConfig::from_construction(&s).unwrap();
        assert_eq!(c.window().unwrap(), s.window);
    }
}
