//! Double-cover invariants of symplectic group elements: orientations of
//! lifts, the canonical `δ` and `Φ` functions, Duflo's `ρ_L` on lagrangian
//! data, and their realizations on the stabilizer covers attached to a
//! positive-system datum of a catalog group.
//!
//! All values are exact: a [`CoverValue`] is a root-of-unity times a rational
//! magnitude times formal factors `|1 - r·e^{iθ}|^k`, so identities between
//! cover functions are checked by structural equality, never by floats.
//! Angles are rational multiples of π throughout; square-root branches follow
//! the committed window `θ ∈ (-2π, 0]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{self, RVec};
use crate::params::{
    EllipticPoint, LinearFormSS, ParamError, PositiveSystemData, ResolvedElliptic,
};
use crate::phase::{rat_product_sign, AnglePi, ExactC};
use crate::rat::{rat, rint, sign, to_f64, Rat};
use crate::realform::{RealFormError, RealGroup, RootLabel};
use crate::rootdata::RootDatum;

/// Errors from cover-invariant computations.
#[derive(Debug, Error)]
pub enum MetaplecticError {
    /// A lift generator lists an unmoved plane or misses the element's.
    #[error("malformed lift generator: {0}")]
    MalformedGenerator(String),
    /// Infinitesimal orientation of an unmoved plane.
    #[error("zero rotation rate has no orientation")]
    ZeroAngle,
    /// Eigenvalue data incompatible with a semisimple symplectic element.
    #[error("not semisimple: {0}")]
    NonSemisimple(String),
    /// Counts, signatures or signs that contradict each other.
    #[error("inconsistent signature data: {0}")]
    InconsistentSignature(String),
    /// The element does not fix the data it is evaluated against.
    #[error("element is not in the stabilizer")]
    NotInStabilizer,
    /// The operation needs a real root.
    #[error("root {0} is not real on this frame")]
    NotRealRoot(usize),
    /// Structurally valid input outside the supported element classes.
    #[error("unsupported element: {0}")]
    UnsupportedElement(String),
    /// A form or determinant vanishes where a nonzero value is required.
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    /// Parameter-layer failure.
    #[error(transparent)]
    Param(#[from] ParamError),
    /// Frame-layer failure.
    #[error(transparent)]
    Form(#[from] RealFormError),
}

fn inconsistent(msg: &str) -> MetaplecticError {
    MetaplecticError::InconsistentSignature(msg.into())
}

fn unsupported(msg: &str) -> MetaplecticError {
    MetaplecticError::UnsupportedElement(msg.into())
}

fn check_sheet(sheet: i32) -> Result<(), MetaplecticError> {
    if sheet.abs() != 1 {
        return Err(inconsistent("sheet must be +1 or -1"));
    }
    Ok(())
}

fn rat_pow(r: &Rat, k: i64) -> Rat {
    let p = num_traits::pow(r.clone(), usize::try_from(k.unsigned_abs()).expect("small exponent"));
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// Parity of a rational that must be an integer.
fn odd_int(r: &Rat, what: &str) -> Result<bool, MetaplecticError> {
    if !r.is_integer() {
        return Err(MetaplecticError::InconsistentSignature(format!(
            "{what} must be an integer, got {r}"
        )));
    }
    Ok(AnglePi(r.clone()).mod_two().0 == Rat::one())
}

/// Folds an angle to the conjugation-invariant key in `[-π, 0]`; the modulus
/// `|1 - r·e^{iθ}|` only sees `cos θ`.
fn key_angle(theta: &AnglePi) -> AnglePi {
    let m = theta.mod_two();
    if m.0 <= Rat::one() {
        -m
    } else {
        m - AnglePi::new(2, 1)
    }
}

/// Exact value `unit · ∏ |1 - r·e^{iθ}|^k` with rational `r > 0` and rational
/// angles.  Factors are held in a normal form so equal values compare equal:
/// the angle folds into `[-π, 0]`, the modulus folds into `(1, ∞)` via
/// `|1 - r⁻¹·e^{iθ}| = r⁻¹·|1 - r·e^{iθ}|`, and factors with a rational value
/// (`θ ∈ {0, -π}`, or `r = 1, θ = -π`) are absorbed into the unit.  The zero
/// value carries no factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverValue {
    unit: ExactC,
    binomials: BTreeMap<(Rat, AnglePi), i64>,
}

impl CoverValue {
    /// The multiplicative identity.
    #[must_use]
    pub fn one() -> Self {
        CoverValue {
            unit: ExactC::one(),
            binomials: BTreeMap::new(),
        }
    }

    /// A factor-free value.
    #[must_use]
    pub fn from_unit(unit: ExactC) -> Self {
        CoverValue {
            unit,
            binomials: BTreeMap::new(),
        }
    }

    /// The exact scalar part.
    #[must_use]
    pub fn unit(&self) -> &ExactC {
        &self.unit
    }

    /// The normalized factor exponents, keyed by `(modulus, folded angle)`.
    #[must_use]
    pub fn binomials(&self) -> &BTreeMap<(Rat, AnglePi), i64> {
        &self.binomials
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Multiplies in `|1 - r·e^{iθ}|^k`, folding it to the normal form.
    pub fn times_binomial(
        &mut self,
        r: &Rat,
        theta: &AnglePi,
        k: i64,
    ) -> Result<(), MetaplecticError> {
        if sign(r) <= 0 {
            return Err(MetaplecticError::NonSemisimple(format!(
                "binomial modulus must be positive, got {r}"
            )));
        }
        if self.is_zero() || k == 0 {
            return Ok(());
        }
        let one = Rat::one();
        let minus_pi = AnglePi::new(-1, 1);
        let mut r = r.clone();
        let key = key_angle(theta);
        if r < one {
            // |1 - r·e^{iθ}| = r·|1 - r⁻¹·e^{-iθ}|; conjugation keeps the key.
            self.unit = &self.unit
                * &ExactC::from_polar_mag2(&AnglePi::zero(), &rat_pow(&r, 2 * k));
            r = r.recip();
        }
        if r == one && key.0.is_zero() {
            return Err(MetaplecticError::DegenerateForm(
                "binomial |1 - e^{i0}| vanishes".into(),
            ));
        }
        let rational: Option<Rat> = if r == one {
            if key == minus_pi {
                Some(rint(2))
            } else {
                None
            }
        } else if key.0.is_zero() {
            Some(&r - &one)
        } else if key == minus_pi {
            Some(&r + &one)
        } else {
            None
        };
        match rational {
            Some(v) => {
                self.unit = &self.unit
                    * &ExactC::from_polar_mag2(&AnglePi::zero(), &rat_pow(&(&v * &v), k));
            }
            None => {
                let slot = (r, key);
                let e = self.binomials.entry(slot.clone()).or_insert(0);
                *e += k;
                if *e == 0 {
                    self.binomials.remove(&slot);
                }
            }
        }
        Ok(())
    }

    /// Product of two values.
    #[must_use]
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return CoverValue::from_unit(ExactC::zero());
        }
        let mut out = CoverValue {
            unit: &self.unit * &rhs.unit,
            binomials: self.binomials.clone(),
        };
        for (key, k) in &rhs.binomials {
            let e = out.binomials.entry(key.clone()).or_insert(0);
            *e += k;
            if *e == 0 {
                out.binomials.remove(key);
            }
        }
        out
    }

    /// Scales by an exact scalar.
    #[must_use]
    pub fn scale(&self, u: &ExactC) -> Self {
        if u.is_zero() || self.is_zero() {
            return CoverValue::from_unit(ExactC::zero());
        }
        CoverValue {
            unit: &self.unit * u,
            binomials: self.binomials.clone(),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Self, MetaplecticError> {
        if self.is_zero() {
            return Err(MetaplecticError::DegenerateForm("inverse of zero".into()));
        }
        Ok(CoverValue {
            unit: self.unit.inv(),
            binomials: self
                .binomials
                .iter()
                .map(|(key, k)| (key.clone(), -k))
                .collect(),
        })
    }

    /// Floating-point approximation `(re, im)`.
    #[must_use]
    pub fn approx(&self) -> (f64, f64) {
        let (re, im) = self.unit.to_c64();
        let mut m = 1.0;
        for ((r, th), k) in &self.binomials {
            let rf = to_f64(r);
            let mag2 = rf.mul_add(rf, 1.0 - 2.0 * rf * th.to_f64().cos());
            m *= mag2.powf(*k as f64 / 2.0);
        }
        (re * m, im * m)
    }
}

impl fmt::Display for CoverValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.unit)?;
        for ((r, th), k) in &self.binomials {
            write!(f, " * |1 - {r}e^(i{th})|^{k}")?;
        }
        Ok(())
    }
}

/// Rotation data of a one-parameter generator of a symplectic lift: the
/// generator rotates a family of oriented planes by the listed angles.
/// Full turns (nonzero multiples of 2π) are invisible downstairs but flip
/// the lift; exact zeros describe fixed planes and are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftGenerator {
    pub unreduced_angles: Vec<AnglePi>,
}

/// Sign of the lift `exp(A)` against the base-point orientation of its moved
/// planes: `(-1)^{Σ αᵢ/2π} · sg(∏ sin(βⱼ/2))`, where the `αᵢ` are the
/// full-turn entries of the generator and the `βⱼ` the rest.
pub fn orientation_of_lift(generator: &LiftGenerator) -> Result<i32, MetaplecticError> {
    let mut s = 1;
    for a in &generator.unreduced_angles {
        if a.0.is_zero() {
            return Err(MetaplecticError::MalformedGenerator(
                "generator lists an unmoved plane (zero angle)".into(),
            ));
        }
        if a.is_multiple_of_two_pi() {
            if odd_int(&(a.0.clone() / rint(2)), "full-turn count")? {
                s = -s;
            }
        } else {
            s *= a.half().sin_sign();
        }
    }
    Ok(s)
}

/// Orientation assigned to an infinitesimally rotated family of planes with
/// the given nonzero rates, against their base orientations: `sg(∏ βⱼ)`.
pub fn orientation_of_inf(angles: &[AnglePi]) -> Result<i32, MetaplecticError> {
    let vals: Vec<Rat> = angles.iter().map(|a| a.0.clone()).collect();
    if vals.iter().any(Zero::is_zero) {
        return Err(MetaplecticError::ZeroAngle);
    }
    Ok(rat_product_sign(&vals))
}

/// Eigenvalue layout of a semisimple symplectic element `x` with elliptic
/// part `x_e`.  `blocks` lists `(θ, count)`: planes where `x_e` acts with
/// eigenvalue `e^{iθ}`, `θ ∈ (-2π, 0]`, on the positively oriented complex
/// line.  `hyper_eigen` lists `(r, θ, count)` with `r > 1`: eigenvalues
/// `r·e^{iθ}` of `x` together with their implicit `r⁻¹·e^{iθ}` partners,
/// closed under conjugation.  `b_orientation_ref` carries one sign per
/// `blocks` entry: the orientation of that entry's reference bases against
/// the symplectic one (`+1` everywhere for the canonical choice).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticSymplecticData {
    pub blocks: Vec<(AnglePi, usize)>,
    pub hyper_eigen: Vec<(Rat, AnglePi, usize)>,
    pub b_orientation_ref: Vec<i32>,
}

impl EllipticSymplecticData {
    /// Purely elliptic data with canonical references.
    #[must_use]
    pub fn torus(blocks: Vec<(AnglePi, usize)>) -> Self {
        let n = blocks.len();
        EllipticSymplecticData {
            blocks,
            hyper_eigen: Vec::new(),
            b_orientation_ref: vec![1; n],
        }
    }

    /// Checks angle windows, modulus conventions and conjugation closure.
    pub fn validate(&self) -> Result<(), MetaplecticError> {
        if self.b_orientation_ref.len() != self.blocks.len() {
            return Err(inconsistent("one orientation sign per block entry required"));
        }
        if self.b_orientation_ref.iter().any(|s| s.abs() != 1) {
            return Err(inconsistent("orientation references must be +1 or -1"));
        }
        for (th, c) in &self.blocks {
            if *th != th.window_neg() {
                return Err(inconsistent("block angle outside (-2pi, 0]"));
            }
            if *c == 0 {
                return Err(inconsistent("empty block entry"));
            }
        }
        let one = Rat::one();
        let minus_pi = AnglePi::new(-1, 1);
        let mut keys = BTreeSet::new();
        for (r, th, c) in &self.hyper_eigen {
            if sign(r) <= 0 || *r == one {
                return Err(MetaplecticError::NonSemisimple(
                    "hyperbolic modulus must be positive and different from 1".into(),
                ));
            }
            if *r < one {
                return Err(inconsistent(
                    "hyperbolic eigenvalues are keyed by the outward modulus r > 1",
                ));
            }
            if *th != th.window_neg() {
                return Err(inconsistent("hyperbolic angle outside (-2pi, 0]"));
            }
            if *c == 0 {
                return Err(inconsistent("empty hyperbolic entry"));
            }
            if !keys.insert((r.clone(), th.clone())) {
                return Err(inconsistent("duplicate hyperbolic entry"));
            }
        }
        for (r, th, c) in &self.hyper_eigen {
            if th.0.is_zero() || *th == minus_pi {
                continue;
            }
            let partner = (-th.clone()).window_neg();
            let pc = self
                .hyper_eigen
                .iter()
                .find(|(r2, t2, _)| r2 == r && *t2 == partner)
                .map_or(0, |(_, _, c2)| *c2);
            if pc != *c {
                return Err(inconsistent(
                    "hyperbolic eigenvalues are not closed under conjugation",
                ));
            }
        }
        Ok(())
    }

    /// Number of planes moved by the elliptic part.
    #[must_use]
    pub fn q_e(&self) -> usize {
        self.blocks
            .iter()
            .filter(|(th, _)| !th.0.is_zero())
            .map(|(_, c)| c)
            .sum::<usize>()
            + self
                .hyper_eigen
                .iter()
                .filter(|(_, th, _)| !th.0.is_zero())
                .map(|(_, _, c)| c)
                .sum::<usize>()
    }

    /// Total symplectic dimension described.
    #[must_use]
    pub fn dim(&self) -> usize {
        let b: usize = self.blocks.iter().map(|(_, c)| c).sum();
        let h: usize = self.hyper_eigen.iter().map(|(_, _, c)| c).sum();
        2 * (b + h)
    }
}

/// Sheet reached over `x_e` by the lift generated by `A`: the generator's
/// non-full-turn angles must reproduce the moved blocks (as eigenvalue
/// angles, `β ↦ -β` folded into the window), full turns must fit on fixed
/// planes, and the sign is the lift orientation.
pub fn lift_sheet(
    data: &EllipticSymplecticData,
    generator: &LiftGenerator,
) -> Result<i32, MetaplecticError> {
    data.validate()?;
    let mut moved: BTreeMap<AnglePi, i64> = BTreeMap::new();
    let mut fixed_budget = 0i64;
    for (th, c) in &data.blocks {
        if th.0.is_zero() {
            fixed_budget += *c as i64;
        } else {
            *moved.entry(th.clone()).or_insert(0) += *c as i64;
        }
    }
    let mut turns = 0i64;
    for a in &generator.unreduced_angles {
        if a.0.is_zero() {
            return Err(MetaplecticError::MalformedGenerator(
                "generator lists an unmoved plane (zero angle)".into(),
            ));
        }
        if a.is_multiple_of_two_pi() {
            turns += 1;
        } else {
            *moved.entry((-a.clone()).window_neg()).or_insert(0) -= 1;
        }
    }
    if moved.values().any(|&v| v != 0) {
        return Err(MetaplecticError::MalformedGenerator(
            "generator angles do not reproduce the moved blocks".into(),
        ));
    }
    if turns > fixed_budget {
        return Err(MetaplecticError::MalformedGenerator(
            "more full turns than fixed planes".into(),
        ));
    }
    orientation_of_lift(generator)
}

/// Orientation-ratio prefix shared by `δ` and `Φ`: the sheet times the sign
/// of the committed references against the symplectic orientation on the
/// moved blocks.
fn reference_sign(data: &EllipticSymplecticData, sheet: i32) -> i32 {
    let mut s = sheet;
    for (i, (th, c)) in data.blocks.iter().enumerate() {
        if !th.0.is_zero() && data.b_orientation_ref[i] == -1 && c % 2 == 1 {
            s = -s;
        }
    }
    s
}

/// Canonical double-cover function `δ` at the lift of `x_e` on the given
/// sheet: the orientation ratio times `∏ e^{iθₖ/2}` over every plane angle
/// of the elliptic part.  A hyperbolic eigenvalue class moved by the
/// elliptic part presents as plane-angle pairs `{θ, -θ-2π}` forced by its
/// split hermitian signature, so each such line contributes a fixed
/// quarter turn `e^{-iπ/2}`.
pub fn delta_fn(
    data: &EllipticSymplecticData,
    sheet: i32,
) -> Result<CoverValue, MetaplecticError> {
    check_sheet(sheet)?;
    data.validate()?;
    let mut half = Rat::zero();
    for (th, c) in &data.blocks {
        half += &th.0 * rint(*c as i64);
    }
    for (_, th, c) in &data.hyper_eigen {
        if !th.0.is_zero() {
            half -= rint(*c as i64);
        }
    }
    let unit = &ExactC::from_int(i64::from(reference_sign(data, sheet)))
        * &ExactC::unit(&AnglePi(half / rint(2)));
    Ok(CoverValue::from_unit(unit))
}

/// The function `Φ` at the lift of `x` on the given sheet: the orientation
/// ratio times `i^{-q_e} · |det(1-x)|_{(1-x)V}|^{-1/2}`.
pub fn phi_fn(
    data: &EllipticSymplecticData,
    sheet: i32,
) -> Result<CoverValue, MetaplecticError> {
    check_sheet(sheet)?;
    data.validate()?;
    let q = i64::try_from(data.q_e()).expect("small block count");
    let unit = &ExactC::from_int(i64::from(reference_sign(data, sheet))) * &ExactC::i_pow(-q);
    let mut value = CoverValue::from_unit(unit);
    for (th, c) in &data.blocks {
        if th.0.is_zero() {
            continue;
        }
        value.times_binomial(&Rat::one(), th, -(*c as i64))?;
    }
    for (r, th, c) in &data.hyper_eigen {
        // the implicit r⁻¹ partner contributes |1 - r⁻¹e^{iθ}| = r⁻¹|1 - r·e^{-iθ}|
        value = value.scale(&ExactC::from_polar_mag2(
            &AnglePi::zero(),
            &rat_pow(r, *c as i64),
        ));
        value.times_binomial(r, th, -(*c as i64))?;
    }
    Ok(value)
}

/// Eigenvalue-and-signature data of a semisimple `x` on an `x`-stable
/// lagrangian `L ⊂ V_C`:
/// - `eigen`: moved eigenvalues `r·e^{iθ}` of `x` on `L` with multiplicity
///   (`(r, θ) ≠ (1, 0)`, `θ ∈ (-2π, 0]`; unmoved lines stay implicit);
/// - `unit_sig`: per unit eigenvalue `e^{iθ}`, the signature `(p, q)` of the
///   hermitian pairing `h(v, w) = i·B(v, w̄)` on that eigencomponent — the
///   remaining `mult - p - q` lines are its radical, the lines of `L ∩ L̄`;
/// - `cross_rank`: per component pair at `r·e^{iθ}` and `r⁻¹·e^{iθ}` (keyed
///   by the outward `r > 1`), the rank of the `h`-pairing between them; each
///   rank unit is a hyperbolic `(+,-)` plane of `h`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LagrangianData {
    pub eigen: Vec<(Rat, AnglePi, usize)>,
    pub unit_sig: Vec<(AnglePi, usize, usize)>,
    pub cross_rank: Vec<(Rat, AnglePi, usize)>,
}

impl LagrangianData {
    fn sig_of(&self, th: &AnglePi) -> (usize, usize) {
        self.unit_sig
            .iter()
            .find(|(t, _, _)| t == th)
            .map_or((0, 0), |(_, p, q)| (*p, *q))
    }

    /// Checks windows, reference integrity, and closure of the eigenvalue
    /// multiset and its radical under conjugation.
    pub fn validate(&self) -> Result<(), MetaplecticError> {
        let one = Rat::one();
        let minus_pi = AnglePi::new(-1, 1);
        let mut mult: BTreeMap<(Rat, AnglePi), usize> = BTreeMap::new();
        for (r, th, m) in &self.eigen {
            if sign(r) <= 0 {
                return Err(MetaplecticError::NonSemisimple(
                    "eigenvalue modulus must be positive".into(),
                ));
            }
            if *th != th.window_neg() {
                return Err(inconsistent("eigenvalue angle outside (-2pi, 0]"));
            }
            if *r == one && th.0.is_zero() {
                return Err(inconsistent("unmoved eigenvalue 1 must stay implicit"));
            }
            if *m == 0 {
                return Err(inconsistent("empty eigenvalue entry"));
            }
            if mult.insert((r.clone(), th.clone()), *m).is_some() {
                return Err(inconsistent("duplicate eigenvalue entry"));
            }
        }
        let m_of =
            |r: &Rat, th: &AnglePi| mult.get(&(r.clone(), th.clone())).copied().unwrap_or(0);
        let mut seen_sig = BTreeSet::new();
        for (th, p, q) in &self.unit_sig {
            let m = m_of(&one, th);
            if m == 0 {
                return Err(inconsistent(
                    "signature entry without a matching unit eigenvalue",
                ));
            }
            if p + q > m {
                return Err(inconsistent("signature exceeds the multiplicity"));
            }
            if !seen_sig.insert(th.clone()) {
                return Err(inconsistent("duplicate signature entry"));
            }
        }
        let mut crosses: BTreeMap<(Rat, AnglePi), usize> = BTreeMap::new();
        for (r, th, k) in &self.cross_rank {
            if *r <= one {
                return Err(inconsistent(
                    "cross ranks are keyed by the outward modulus r > 1",
                ));
            }
            let m1 = m_of(r, th);
            let m2 = m_of(&r.recip(), th);
            if m1 == 0 || m2 == 0 {
                return Err(inconsistent("cross rank without both paired components"));
            }
            if *k > m1.min(m2) {
                return Err(inconsistent("cross rank exceeds the multiplicity"));
            }
            if crosses.insert((r.clone(), th.clone()), *k).is_some() {
                return Err(inconsistent("duplicate cross rank entry"));
            }
        }
        // The radical is conjugation-stable: L ∩ L̄ at e^{iθ} maps onto the
        // one at e^{-iθ}.
        for (r, th, m) in &self.eigen {
            if *r != one || th.0.is_zero() || *th == minus_pi {
                continue;
            }
            let (p, q) = self.sig_of(th);
            let partner = (-th.clone()).window_neg();
            let pm = m_of(&one, &partner);
            let (pp, pq) = self.sig_of(&partner);
            if m - p - q != pm - pp - pq {
                return Err(inconsistent(
                    "radical multiplicities are not conjugation-closed",
                ));
            }
        }
        // Off-axis non-unit classes {r, r⁻¹} × {θ, -θ}: the spectrum of
        // V_C = L ⊕ L* must be conjugation-closed, and the cross pairings
        // must account for everything outside L ∩ L̄.
        let mut seen = BTreeSet::new();
        for (r, th, _) in &self.eigen {
            if *r == one || th.0.is_zero() || *th == minus_pi {
                continue;
            }
            let big = if *r > one { r.clone() } else { r.recip() };
            let thc = if th.0 > -Rat::one() {
                th.clone()
            } else {
                (-th.clone()).window_neg()
            };
            if !seen.insert((big.clone(), thc.clone())) {
                continue;
            }
            let other = (-thc.clone()).window_neg();
            let a = m_of(&big, &thc);
            let b = m_of(&big, &other);
            let c = m_of(&big.recip(), &thc);
            let d = m_of(&big.recip(), &other);
            let k1 = crosses.get(&(big.clone(), thc.clone())).copied().unwrap_or(0);
            let k2 = crosses.get(&(big.clone(), other.clone())).copied().unwrap_or(0);
            if a + d != b + c {
                return Err(inconsistent(
                    "eigenvalues are not closed under the lagrangian symmetry",
                ));
            }
            if a + k2 != b + k1 {
                return Err(inconsistent(
                    "cross ranks do not close the radical under conjugation",
                ));
            }
        }
        Ok(())
    }

    /// Expands the lagrangian data to the symplectic layout of `x` on `V`:
    /// the `V_C` spectrum is the multiset union of the `L`-spectrum and its
    /// inverse, arranged into positively presented blocks — unit radical
    /// lines keep their own angle, definite lines pair with their
    /// inverse-angle partner.
    pub fn x_data(&self) -> Result<EllipticSymplecticData, MetaplecticError> {
        self.validate()?;
        let one = Rat::one();
        let mut blocks: BTreeMap<AnglePi, usize> = BTreeMap::new();
        let mut hyper: BTreeMap<(Rat, AnglePi), usize> = BTreeMap::new();
        for (r, th, m) in &self.eigen {
            if *r == one {
                let (p, q) = self.sig_of(th);
                let rad = m - p - q;
                if p + rad > 0 {
                    *blocks.entry(th.clone()).or_insert(0) += p + rad;
                }
                if q > 0 {
                    *blocks.entry((-th.clone()).window_neg()).or_insert(0) += q;
                }
            } else if *r > one {
                *hyper.entry((r.clone(), th.clone())).or_insert(0) += m;
            } else {
                *hyper
                    .entry((r.recip(), (-th.clone()).window_neg()))
                    .or_insert(0) += m;
            }
        }
        let blocks: Vec<(AnglePi, usize)> = blocks.into_iter().collect();
        let n = blocks.len();
        let data = EllipticSymplecticData {
            blocks,
            hyper_eigen: hyper.into_iter().map(|((r, th), c)| (r, th, c)).collect(),
            b_orientation_ref: vec![1; n],
        };
        data.validate()?;
        Ok(data)
    }

    /// Negative lines of the pairing on the `x`-moved part of `L`.
    #[must_use]
    pub fn q_l(&self) -> usize {
        self.unit_sig.iter().map(|(_, _, q)| q).sum::<usize>()
            + self.cross_rank.iter().map(|(_, _, k)| k).sum::<usize>()
    }

    /// Negative lines of the pairing on the part of `L` moved by the
    /// elliptic factor `x_e` alone (angle-zero cross pairs become unmoved).
    #[must_use]
    pub fn q_l_elliptic(&self) -> usize {
        self.unit_sig.iter().map(|(_, _, q)| q).sum::<usize>()
            + self
                .cross_rank
                .iter()
                .filter(|(_, th, _)| !th.0.is_zero())
                .map(|(_, _, k)| k)
                .sum::<usize>()
    }

    /// Eigenvalues of `x` on `L` lying in `(1, ∞)`.
    #[must_use]
    pub fn n_l(&self) -> usize {
        self.eigen
            .iter()
            .filter(|(r, th, _)| th.0.is_zero() && *r > Rat::one())
            .map(|(_, _, m)| m)
            .sum()
    }

    /// Derived signature view used by the unit identities.
    #[must_use]
    pub fn signature(&self) -> LagrangianSignature {
        let mut per: BTreeMap<AnglePi, (usize, usize)> = BTreeMap::new();
        for (th, p, q) in &self.unit_sig {
            let e = per.entry(th.clone()).or_insert((0, 0));
            e.0 += p;
            e.1 += q;
        }
        for (_, th, k) in &self.cross_rank {
            let e = per.entry(th.clone()).or_insert((0, 0));
            e.0 += k;
            e.1 += k;
        }
        LagrangianSignature {
            n_l: self.n_l(),
            q_l: self.q_l(),
            eigen_sig: per.into_iter().map(|(th, (p, q))| (th, p, q)).collect(),
        }
    }
}

/// Summary invariants of a lagrangian datum: the counts entering the cover
/// identities, and per unit angle the positive/negative line counts of the
/// pairing (hyperbolic cross pairs counted on both sides).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagrangianSignature {
    pub n_l: usize,
    pub q_l: usize,
    pub eigen_sig: Vec<(AnglePi, usize, usize)>,
}

/// Duflo's `ρ_L` at the lift of `x` on the given sheet:
/// `sheet · (-1)^{q_L(x_e)} · ∏ √(rₖ)·e^{iθₖ/2}` over all eigenvalues of `x`
/// on `L`, square roots taken on the window `θ ∈ (-2π, 0]`.
pub fn rho_lagrangian(
    lag: &LagrangianData,
    sheet: i32,
) -> Result<CoverValue, MetaplecticError> {
    check_sheet(sheet)?;
    lag.validate()?;
    let mut half = Rat::zero();
    let mut mag2 = Rat::one();
    for (r, th, m) in &lag.eigen {
        half += &th.0 * rint(*m as i64);
        mag2 *= rat_pow(r, *m as i64);
    }
    let mut s = sheet;
    if lag.q_l_elliptic() % 2 == 1 {
        s = -s;
    }
    let unit = &ExactC::from_int(i64::from(s))
        * &ExactC::from_polar_mag2(&AnglePi(half / rint(2)), &mag2);
    Ok(CoverValue::from_unit(unit))
}

/// Exact `det(1 - x)` on the span of the listed eigenvalues: each entry
/// `(r, θ, m)` contributes `(1 - r·e^{iθ})^m`.  Writing `1 - r·e^{iθ}` as
/// `e^{iθ/2}·((1-r)cos(θ/2) - i·(1+r)sin(θ/2))` makes each factor a
/// half-angle unit times an axis number; factors off both axes must occur in
/// conjugate-or-inverse pairs for the product to stay on the committed value
/// lattice, and that pairing is validated here.
pub fn moved_determinant(
    eigen: &[(Rat, AnglePi, usize)],
) -> Result<CoverValue, MetaplecticError> {
    let one = Rat::one();
    let minus_pi = AnglePi::new(-1, 1);
    let mut counts: BTreeMap<(Rat, AnglePi), i64> = BTreeMap::new();
    for (r, th, m) in eigen {
        if sign(r) <= 0 {
            return Err(MetaplecticError::NonSemisimple(
                "eigenvalue modulus must be positive".into(),
            ));
        }
        if *th != th.window_neg() {
            return Err(inconsistent("eigenvalue angle outside (-2pi, 0]"));
        }
        if *r == one && th.0.is_zero() {
            return Err(inconsistent("unmoved eigenvalue in a moved determinant"));
        }
        if *m == 0 {
            return Err(inconsistent("empty eigenvalue entry"));
        }
        *counts.entry((r.clone(), th.clone())).or_insert(0) += *m as i64;
    }
    let mut value = CoverValue::one();
    let mut half = Rat::zero();
    let mut quarters = 0i64;
    let mut s = 1i32;
    for ((r, th), m) in &counts {
        half += &th.0 * rint(*m);
        value.times_binomial(r, th, *m)?;
        if *r == one || *th == minus_pi {
            // axis factor: w = ±i·(1+r)·|sin(θ/2)| with sin(θ/2) < 0 on the
            // window, so the axis unit is +i in both cases
            quarters += m;
        } else if th.0.is_zero() && *r > one && m % 2 != 0 {
            s = -s; // 1 - r < 0
        }
    }
    let mut seen = BTreeSet::new();
    for (r, th) in counts.keys() {
        if *r == one || th.0.is_zero() || *th == minus_pi {
            continue;
        }
        let big = if *r > one { r.clone() } else { r.recip() };
        let thc = if th.0 > -Rat::one() {
            th.clone()
        } else {
            (-th.clone()).window_neg()
        };
        if !seen.insert((big.clone(), thc.clone())) {
            continue;
        }
        let other = (-thc.clone()).window_neg();
        let get = |rr: &Rat, tt: &AnglePi| {
            counts.get(&(rr.clone(), tt.clone())).copied().unwrap_or(0)
        };
        let a = get(&big, &thc);
        let b = get(&big, &other);
        let c = get(&big.recip(), &thc);
        let d = get(&big.recip(), &other);
        if a + d != b + c {
            return Err(inconsistent(
                "unpaired eigenvalue class in the moved determinant",
            ));
        }
        if (a + d) % 2 != 0 {
            s = -s; // each off-axis pair multiplies to a negative real
        }
    }
    let unit = &(&ExactC::from_int(i64::from(s)) * &ExactC::i_pow(quarters))
        * &ExactC::unit(&AnglePi(half / rint(2)));
    Ok(value.scale(&unit))
}

/// An element of the double cover over an elliptic group element: the base
/// element plus the sheet against the canonical per-plane lift.
#[derive(Debug, Clone)]
pub struct LiftedElliptic {
    pub point: EllipticPoint,
    pub sheet: i32,
}

/// One conjugation class of root lines, the unit a rotation plane of `g/h`
/// is built from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum PlaneClass {
    /// Root plane of an imaginary root; `true` marks compact.
    Imaginary(usize, bool),
    /// Root plane of a real root.
    Real(usize),
    /// Four root lines of a complex root: the two listed positive members
    /// carry the other two as conjugates; `true` marks a pair inside the
    /// centralizer of the hyperbolic part.
    Quad(usize, usize, bool),
}

impl PlaneClass {
    fn representative(&self) -> usize {
        match self {
            PlaneClass::Imaginary(a, _) | PlaneClass::Real(a) | PlaneClass::Quad(a, _, _) => *a,
        }
    }
}

/// An orbit of plane classes under the element (length one or two).
struct ClassOrbit {
    first: PlaneClass,
    second: Option<PlaneClass>,
}

fn rate(datum: &RootDatum, res: &ResolvedElliptic, root: usize) -> Rat {
    linalg::dot(&datum.root_functional(root), &res.angles)
}

fn resolve_stabilizer(
    group: &RealGroup,
    psd: &PositiveSystemData,
    lifted: &LiftedElliptic,
) -> Result<ResolvedElliptic, MetaplecticError> {
    check_sheet(lifted.sheet)?;
    if lifted.point.weyl != group.datum.weyl().identity() {
        return Err(unsupported(
            "only torus and component-automorphism elements are supported",
        ));
    }
    psd.lambda_plus.validate(group, lifted.point.frame)?;
    let res = lifted.point.resolve(group)?;
    if linalg::mat_vec(&res.form_mat, &psd.lambda_plus.mu) != psd.lambda_plus.mu
        || linalg::mat_vec(&res.form_mat, &psd.lambda_plus.nu) != psd.lambda_plus.nu
    {
        return Err(MetaplecticError::NotInStabilizer);
    }
    for &rt in &psd.rplus_g_h {
        if psd.lambda_plus.annihilates(&group.datum, rt) {
            return Err(MetaplecticError::DegenerateForm(
                "positive-system form vanishes on a root".into(),
            ));
        }
    }
    Ok(res)
}

/// Partitions the positive roots into plane classes, pairing each complex
/// root with its conjugate and validating the pairing against the
/// hyperbolic centralizer.
fn plane_classes(
    group: &RealGroup,
    frame_idx: usize,
    psd: &PositiveSystemData,
) -> Result<Vec<PlaneClass>, MetaplecticError> {
    let datum = &group.datum;
    let frame = &group.frames[frame_idx];
    let rplus: BTreeSet<usize> = psd.rplus_g_h.iter().copied().collect();
    let mut out = Vec::new();
    let mut visited: BTreeSet<usize> = BTreeSet::new();
    for &root in &psd.rplus_g_h {
        if visited.contains(&root) {
            continue;
        }
        visited.insert(root);
        match group.classify_root(frame_idx, root)? {
            RootLabel::Real => out.push(PlaneClass::Real(root)),
            RootLabel::ImaginaryCompact => out.push(PlaneClass::Imaginary(root, true)),
            RootLabel::ImaginaryNoncompact => out.push(PlaneClass::Imaginary(root, false)),
            RootLabel::Complex(_) => {
                let sp = frame.sigma_perm[root];
                let inside = psd.lambda_plus.pair_n(datum, root).is_zero();
                let sp_positive = rplus.contains(&sp);
                // inside the centralizer the conjugate of a positive root is
                // negative; outside, it is positive
                if inside == sp_positive {
                    return Err(inconsistent(
                        "conjugate positioning contradicts the hyperbolic centralizer",
                    ));
                }
                let partner = if sp_positive { sp } else { datum.neg_index(sp) };
                if !rplus.contains(&partner) || partner == root {
                    return Err(inconsistent("conjugate partner escapes the positive system"));
                }
                if !matches!(
                    group.classify_root(frame_idx, partner)?,
                    RootLabel::Complex(_)
                ) {
                    return Err(inconsistent("conjugate partner is not complex-labeled"));
                }
                visited.insert(partner);
                out.push(PlaneClass::Quad(
                    root.min(partner),
                    root.max(partner),
                    inside,
                ));
            }
        }
    }
    Ok(out)
}

/// Groups the plane classes into orbits under the element's root
/// permutation, validating that the element permutes the positive planes
/// without reversing or mixing them.
fn class_orbits(
    group: &RealGroup,
    frame_idx: usize,
    psd: &PositiveSystemData,
    classes: &[PlaneClass],
    perm: &[usize],
) -> Result<Vec<ClassOrbit>, MetaplecticError> {
    let rplus: BTreeSet<usize> = psd.rplus_g_h.iter().copied().collect();
    for &root in &psd.rplus_g_h {
        let img = perm[root];
        if !rplus.contains(&img) {
            return Err(unsupported("element reverses a root plane"));
        }
        let l0 = group.classify_root(frame_idx, root)?;
        let l1 = group.classify_root(frame_idx, img)?;
        let same = matches!(
            (&l0, &l1),
            (RootLabel::Complex(_), RootLabel::Complex(_))
        ) || l0 == l1;
        if !same {
            return Err(unsupported("element mixes root plane types"));
        }
    }
    let mut by_member: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        match c {
            PlaneClass::Imaginary(a, _) | PlaneClass::Real(a) => {
                by_member.insert(*a, i);
            }
            PlaneClass::Quad(a, b, _) => {
                by_member.insert(*a, i);
                by_member.insert(*b, i);
            }
        }
    }
    let image_index = |c: &PlaneClass| -> Result<usize, MetaplecticError> {
        by_member
            .get(&perm[c.representative()])
            .copied()
            .ok_or_else(|| inconsistent("permuted root leaves the class list"))
    };
    let mut out = Vec::new();
    let mut done = vec![false; classes.len()];
    for (i, c) in classes.iter().enumerate() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let j = image_index(c)?;
        if let PlaneClass::Quad(_, b, _) = c {
            let jb = by_member
                .get(&perm[*b])
                .copied()
                .ok_or_else(|| inconsistent("permuted root leaves the class list"))?;
            if jb != j {
                return Err(inconsistent("element breaks a conjugate class"));
            }
        }
        if j == i {
            if let PlaneClass::Quad(a, b, _) = c {
                if perm[*a] != *a || perm[*b] != *b {
                    return Err(unsupported(
                        "element swaps conjugate root lines inside a class",
                    ));
                }
            }
            out.push(ClassOrbit {
                first: c.clone(),
                second: None,
            });
        } else {
            if done[j] {
                return Err(inconsistent("class orbit structure is not a partition"));
            }
            done[j] = true;
            if image_index(&classes[j])? != i {
                return Err(unsupported("element orbit on planes exceeds length two"));
            }
            out.push(ClassOrbit {
                first: c.clone(),
                second: Some(classes[j].clone()),
            });
        }
    }
    Ok(out)
}

/// Window block angles contributed by one orbit to the rotation layout of
/// the element on `g/h`, with the orientation flip of compact planes
/// applied.
fn orbit_block_angles(
    datum: &RootDatum,
    res: &ResolvedElliptic,
    orbit: &ClassOrbit,
) -> Result<Vec<AnglePi>, MetaplecticError> {
    let win = |v: Rat| AnglePi(v).window_neg();
    match (&orbit.first, orbit.second.as_ref()) {
        (PlaneClass::Imaginary(a, compact), None) => {
            let v = rate(datum, res, *a);
            Ok(vec![if *compact { win(-v) } else { win(v) }])
        }
        (PlaneClass::Real(a), None) => {
            let v = rate(datum, res, *a);
            if odd_int(&v, "real-root rotation rate")? {
                Ok(vec![AnglePi::new(-1, 1)])
            } else {
                Ok(vec![AnglePi::zero()])
            }
        }
        (PlaneClass::Quad(a, _, _), None) => {
            let v = rate(datum, res, *a);
            Ok(vec![win(v.clone()), win(-v)])
        }
        (PlaneClass::Imaginary(a, c1), Some(PlaneClass::Imaginary(_, c2))) => {
            if c1 != c2 {
                return Err(inconsistent("orbit mixes compact and noncompact planes"));
            }
            let s = (rate(datum, res, *a) + rate(datum, res, res.root_perm[*a])) / rint(2);
            Ok(if *c1 {
                vec![win(-s.clone()), win(-s + Rat::one())]
            } else {
                vec![win(s.clone()), win(s + Rat::one())]
            })
        }
        (PlaneClass::Real(a), Some(PlaneClass::Real(_))) => {
            let d = rate(datum, res, *a) + rate(datum, res, res.root_perm[*a]);
            // the swapped pair of isotropic planes forces a balanced
            // signature, pinning the presentation of both eigenplanes
            if odd_int(&d, "real-pair rotation rate")? {
                Ok(vec![AnglePi::new(-3, 2), AnglePi::new(-1, 2)])
            } else {
                Ok(vec![AnglePi::new(-1, 1), AnglePi::zero()])
            }
        }
        (PlaneClass::Quad(a, _, m1), Some(PlaneClass::Quad(_, _, m2))) => {
            if m1 != m2 {
                return Err(inconsistent("orbit breaks the hyperbolic centralizer"));
            }
            let s = (rate(datum, res, *a) + rate(datum, res, res.root_perm[*a])) / rint(2);
            Ok(vec![
                win(s.clone()),
                win(s.clone() + Rat::one()),
                win(-s.clone()),
                win(-(s + Rat::one())),
            ])
        }
        _ => Err(inconsistent("orbit mixes plane types")),
    }
}

/// The canonical `δ`-function of the double cover attached to the positive
/// system, at a lifted elliptic stabilizer element: the sheet times the
/// product of half-angle units over the element's rotation planes in `g/h`.
pub fn delta_on_stabilizer_cover(
    group: &RealGroup,
    psd: &PositiveSystemData,
    lifted: &LiftedElliptic,
) -> Result<CoverValue, MetaplecticError> {
    let res = resolve_stabilizer(group, psd, lifted)?;
    let datum = &group.datum;
    let classes = plane_classes(group, res.frame, psd)?;
    let orbits = class_orbits(group, res.frame, psd, &classes, &res.root_perm)?;
    let mut half = Rat::zero();
    for orbit in &orbits {
        for a in orbit_block_angles(datum, &res, orbit)? {
            half += a.0;
        }
    }
    let unit = &ExactC::from_int(i64::from(lifted.sheet))
        * &ExactC::unit(&AnglePi(half / rint(2)));
    Ok(CoverValue::from_unit(unit))
}

/// The `ρ`-character of the double cover attached to the positive system:
/// `δ` times the determinant of the element on the compact positive root
/// lines, times the orbit eigenvalue corrections of the hyperbolic
/// centralizer's conjugate pairs.
pub fn rho_on_stabilizer_cover(
    group: &RealGroup,
    psd: &PositiveSystemData,
    lifted: &LiftedElliptic,
) -> Result<CoverValue, MetaplecticError> {
    let res = resolve_stabilizer(group, psd, lifted)?;
    let datum = &group.datum;
    let classes = plane_classes(group, res.frame, psd)?;
    let orbits = class_orbits(group, res.frame, psd, &classes, &res.root_perm)?;
    let mut half = Rat::zero();
    let mut extra = Rat::zero();
    for orbit in &orbits {
        for a in orbit_block_angles(datum, &res, orbit)? {
            half += a.0;
        }
        match (&orbit.first, orbit.second.as_ref()) {
            (PlaneClass::Imaginary(a, true), None) | (PlaneClass::Quad(a, _, true), None) => {
                extra += rate(datum, &res, *a);
            }
            (PlaneClass::Imaginary(a, true), Some(_))
            | (PlaneClass::Quad(a, _, true), Some(_)) => {
                // determinant of a swap with scalars, or the square
                // eigenvalue correction: both contribute -e^{iπ(d + d')}
                extra += rate(datum, &res, *a) + rate(datum, &res, res.root_perm[*a]) + Rat::one();
            }
            _ => {}
        }
    }
    let unit = &ExactC::from_int(i64::from(lifted.sheet))
        * &ExactC::unit(&AnglePi(half / rint(2) + extra));
    Ok(CoverValue::from_unit(unit))
}

/// The `ρ`-value of the double cover on the lagrangian spanned by the given
/// positive root lines: `sheet · (-1)^{q} · ∏ e^{iθ/2}` over the eigenvalue
/// angles of the element on those lines, `q` counting the negative moved
/// eigenlines of the pairing.
pub fn rho_root_lagrangian(
    group: &RealGroup,
    psd: &PositiveSystemData,
    root_set: &[usize],
    lifted: &LiftedElliptic,
) -> Result<CoverValue, MetaplecticError> {
    let res = resolve_stabilizer(group, psd, lifted)?;
    let datum = &group.datum;
    let frame = &group.frames[res.frame];
    let rplus: BTreeSet<usize> = psd.rplus_g_h.iter().copied().collect();
    let set: BTreeSet<usize> = root_set.iter().copied().collect();
    if set.len() != root_set.len() {
        return Err(inconsistent("duplicate root in the lagrangian set"));
    }
    if !set.iter().all(|r| rplus.contains(r)) {
        return Err(inconsistent("lagrangian set must consist of positive roots"));
    }
    for &root in &set {
        if !set.contains(&res.root_perm[root]) {
            return Err(MetaplecticError::NotInStabilizer);
        }
    }
    let win = |v: Rat| AnglePi(v).window_neg();
    let mut half = Rat::zero();
    let mut q = 0usize;
    // eigenvalue angles and the compact negatives, per permutation orbit
    let mut visited: BTreeSet<usize> = BTreeSet::new();
    for &root in &set {
        if visited.contains(&root) {
            continue;
        }
        visited.insert(root);
        let img = res.root_perm[root];
        let compact = matches!(
            group.classify_root(res.frame, root)?,
            RootLabel::ImaginaryCompact
        );
        if img == root {
            let a = win(rate(datum, &res, root));
            if compact && !a.0.is_zero() {
                q += 1;
            }
            half += a.0;
        } else {
            visited.insert(img);
            if compact
                != matches!(
                    group.classify_root(res.frame, img)?,
                    RootLabel::ImaginaryCompact
                )
            {
                return Err(inconsistent("orbit mixes root labels"));
            }
            let s = (rate(datum, &res, root) + rate(datum, &res, img)) / rint(2);
            let angles = [win(s.clone()), win(s + Rat::one())];
            if compact {
                q += angles.iter().filter(|a| !a.0.is_zero()).count();
            }
            half += &angles[0].0 + &angles[1].0;
        }
    }
    // hyperbolic-centralizer conjugate pairs inside the set couple through
    // the pairing and add one negative per moved eigenpair
    let mut paired: BTreeSet<usize> = BTreeSet::new();
    for &root in &set {
        if paired.contains(&root) {
            continue;
        }
        if !matches!(group.classify_root(res.frame, root)?, RootLabel::Complex(_)) {
            continue;
        }
        if !psd.lambda_plus.pair_n(datum, root).is_zero() {
            continue;
        }
        let sp = frame.sigma_perm[root];
        let partner = if rplus.contains(&sp) {
            sp
        } else {
            datum.neg_index(sp)
        };
        if !set.contains(&partner) {
            continue;
        }
        paired.insert(root);
        paired.insert(partner);
        let img = res.root_perm[root];
        if img == root {
            if !win(rate(datum, &res, root)).0.is_zero() {
                q += 1;
            }
        } else {
            paired.insert(img);
            paired.insert(res.root_perm[partner]);
            let s = (rate(datum, &res, root) + rate(datum, &res, img)) / rint(2);
            q += [win(s.clone()), win(s + Rat::one())]
                .iter()
                .filter(|a| !a.0.is_zero())
                .count();
        }
    }
    let mut s = lifted.sheet;
    if q % 2 == 1 {
        s = -s;
    }
    let unit = &ExactC::from_int(i64::from(s)) * &ExactC::unit(&AnglePi(half / rint(2)));
    Ok(CoverValue::from_unit(unit))
}

/// Sheet reached by the metaplectic exponential over `exp(E)` against the
/// committed per-plane canonical lift, for a torus generator with angle
/// vector `x`: the parity of the total window folding of the rotation
/// rates.
pub fn exp_lift_sheet(
    group: &RealGroup,
    frame_idx: usize,
    psd: &PositiveSystemData,
    x: &RVec,
) -> Result<i32, MetaplecticError> {
    let point = EllipticPoint::torus(group, frame_idx, x.clone());
    let res = point.resolve(group)?;
    let datum = &group.datum;
    let classes = plane_classes(group, frame_idx, psd)?;
    let mut odd = false;
    for class in &classes {
        let shift = match class {
            PlaneClass::Imaginary(a, compact) => {
                let v = rate(datum, &res, *a);
                if *compact {
                    (-v.clone() - AnglePi(-v).window_neg().0) / rint(2)
                } else {
                    (v.clone() - AnglePi(v).window_neg().0) / rint(2)
                }
            }
            PlaneClass::Real(a) => {
                if !rate(datum, &res, *a).is_zero() {
                    return Err(unsupported(
                        "exponential generator moves a real root plane",
                    ));
                }
                Rat::zero()
            }
            PlaneClass::Quad(a, _, _) => {
                let v = rate(datum, &res, *a);
                -(AnglePi(v.clone()).window_neg().0 + AnglePi(-v).window_neg().0) / rint(2)
            }
        };
        if odd_int(&shift, "lift shift")? {
            odd = !odd;
        }
    }
    Ok(if odd { -1 } else { 1 })
}

/// Orientation of the symplectic power of the `f`-form on the part of the
/// element-moved space outside the canonical stabilizer, against the
/// committed reference bases of the rotation planes.
pub fn moved_orientation(
    group: &RealGroup,
    psd: &PositiveSystemData,
    f: &LinearFormSS,
    point: &EllipticPoint,
) -> Result<i32, MetaplecticError> {
    if point.weyl != group.datum.weyl().identity() {
        return Err(unsupported(
            "only torus and component-automorphism elements are supported",
        ));
    }
    let res = point.resolve(group)?;
    let datum = &group.datum;
    if linalg::mat_vec(&res.form_mat, &f.mu) != f.mu
        || linalg::mat_vec(&res.form_mat, &f.nu) != f.nu
    {
        return Err(MetaplecticError::NotInStabilizer);
    }
    let classes: Vec<PlaneClass> = plane_classes(group, res.frame, psd)?
        .into_iter()
        .filter(|c| !psd.lambda_can.annihilates(datum, c.representative()))
        .collect();
    let orbits = class_orbits(group, res.frame, psd, &classes, &res.root_perm)?;
    let moved_sign = |v: Rat| -> Result<i32, MetaplecticError> {
        let s = sign(&v);
        if s == 0 {
            return Err(MetaplecticError::DegenerateForm(
                "form vanishes on a moved plane".into(),
            ));
        }
        Ok(s)
    };
    let mut orient = 1i32;
    for orbit in &orbits {
        let factor = match (&orbit.first, orbit.second.as_ref()) {
            (PlaneClass::Imaginary(a, _), None) => {
                if AnglePi(rate(datum, &res, *a)).window_neg().0.is_zero() {
                    1
                } else {
                    moved_sign(f.pair_m(datum, *a))?
                }
            }
            (PlaneClass::Real(a), None) => {
                if odd_int(&rate(datum, &res, *a), "real-root rotation rate")? {
                    moved_sign(f.pair_n(datum, *a))?
                } else {
                    1
                }
            }
            (PlaneClass::Quad(..), _) => 1,
            (PlaneClass::Imaginary(a, _), Some(_)) => {
                let d = rate(datum, &res, *a) + rate(datum, &res, res.root_perm[*a]);
                // an even total rate leaves a single moved plane of the
                // pair; an odd or fractional one moves all four dimensions,
                // where the square form is positive
                if (d / rint(2)).is_integer() {
                    moved_sign(f.pair_m(datum, *a))?
                } else {
                    1
                }
            }
            (PlaneClass::Real(a), Some(_)) => {
                let d = rate(datum, &res, *a) + rate(datum, &res, res.root_perm[*a]);
                if odd_int(&d, "real-pair rotation rate")? {
                    1
                } else {
                    moved_sign(f.pair_n(datum, *a))?
                }
            }
        };
        orient *= factor;
    }
    Ok(orient)
}

/// Data of `γ_α = exp(iπ·H_α)` for a real root `α`: the restricted-root
/// pairing count `n_α`, the torus element itself, and the rotation of `γ_α`
/// inside the two-dimensional symplectic slice of its split rank-one
/// subgroup together with the two generators presenting its lifts.
#[derive(Debug, Clone)]
pub struct GammaAlphaData {
    pub n_alpha: i64,
    pub point: EllipticPoint,
    pub block: EllipticSymplecticData,
    pub lift_plus: LiftGenerator,
    pub lift_minus: LiftGenerator,
}

fn is_positive_multiple(v: &RVec, of: &RVec) -> bool {
    if linalg::is_zero(v) {
        return false;
    }
    let mut ratio: Option<Rat> = None;
    for (a, b) in v.iter().zip(of) {
        if b.is_zero() {
            if !a.is_zero() {
                return false;
            }
        } else {
            let c = a / b;
            match &ratio {
                None => ratio = Some(c),
                Some(r) => {
                    if *r != c {
                        return false;
                    }
                }
            }
        }
    }
    ratio.is_some_and(|c| sign(&c) > 0)
}

/// Builds the `γ_α` package on a frame where `α` is real.
pub fn gamma_alpha_data(
    group: &RealGroup,
    frame_idx: usize,
    root: usize,
) -> Result<GammaAlphaData, MetaplecticError> {
    let datum = &group.datum;
    if !matches!(group.classify_root(frame_idx, root)?, RootLabel::Real) {
        return Err(MetaplecticError::NotRealRoot(root));
    }
    let frame = &group.frames[frame_idx];
    let alpha = datum.root_functional(root);
    // n_α sums ⟨β, H_α⟩ over the roots β restricting to a positive multiple
    // of the restricted root of α, and halves the total
    let mut total = Rat::zero();
    for beta in 0..datum.num_roots() {
        let sym = linalg::add(
            &datum.root_functional(beta),
            &datum.root_functional(frame.sigma_perm[beta]),
        );
        if !is_positive_multiple(&sym, &alpha) {
            continue;
        }
        total += datum.pairing(&datum.root_functional(beta), root);
    }
    let half = total / rint(2);
    if !half.is_integer() {
        return Err(inconsistent("restricted-root pairing sum is odd"));
    }
    let n_alpha = i64::try_from(half.to_integer()).expect("small pairing sum");
    Ok(GammaAlphaData {
        n_alpha,
        point: EllipticPoint::torus(group, frame_idx, datum.coroot_point(root)),
        block: EllipticSymplecticData::torus(vec![(AnglePi::new(-1, 1), 1)]),
        lift_plus: LiftGenerator {
            unreduced_angles: vec![AnglePi::new(1, 1)],
        },
        lift_minus: LiftGenerator {
            unreduced_angles: vec![AnglePi::new(-1, 1)],
        },
    })
}

/// Result of one seeded identity scan.
#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CorpusReport {
    #[must_use]
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn window_angle<R: Rng>(rng: &mut R) -> AnglePi {
    let q = rng.gen_range(1..=6i64);
    let p = rng.gen_range(-(2 * q - 1)..=-1i64);
    AnglePi(rat(p, q))
}

fn off_axis_angle<R: Rng>(rng: &mut R) -> AnglePi {
    loop {
        let a = window_angle(rng);
        if a != AnglePi::new(-1, 1) {
            return a;
        }
    }
}

fn outward_modulus<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let n = rng.gen_range(2..=7i64);
        let d = rng.gen_range(1..=6i64);
        let r = rat(n, d);
        if r > Rat::one() {
            return r;
        }
    }
}

/// Draws a valid lagrangian datum out of closed building blocks: definite
/// unit lines, real-axis hyperbolic lines, isotropic conjugate pairs,
/// pairing-coupled inverse pairs, and radical lines.
fn sample_lagrangian<R: Rng>(rng: &mut R) -> LagrangianData {
    let mut eigen: BTreeMap<(Rat, AnglePi), usize> = BTreeMap::new();
    let mut sig: BTreeMap<AnglePi, (usize, usize)> = BTreeMap::new();
    let mut cross: BTreeMap<(Rat, AnglePi), usize> = BTreeMap::new();
    let one = Rat::one();
    let pieces = rng.gen_range(1..=4);
    for _ in 0..pieces {
        match rng.gen_range(0..7) {
            0 => {
                let th = window_angle(rng);
                *eigen.entry((one.clone(), th.clone())).or_insert(0) += 1;
                sig.entry(th).or_insert((0, 0)).0 += 1;
            }
            1 => {
                let th = window_angle(rng);
                *eigen.entry((one.clone(), th.clone())).or_insert(0) += 1;
                sig.entry(th).or_insert((0, 0)).1 += 1;
            }
            2 => {
                let r = outward_modulus(rng);
                let r = if rng.gen_bool(0.5) { r } else { r.recip() };
                let th = if rng.gen_bool(0.5) {
                    AnglePi::zero()
                } else {
                    AnglePi::new(-1, 1)
                };
                *eigen.entry((r, th)).or_insert(0) += 1;
            }
            3 => {
                let r = outward_modulus(rng);
                let r = if rng.gen_bool(0.5) { r } else { r.recip() };
                let th = off_axis_angle(rng);
                *eigen.entry((r.clone(), th.clone())).or_insert(0) += 1;
                *eigen.entry((r, (-th).window_neg())).or_insert(0) += 1;
            }
            4 => {
                let r = outward_modulus(rng);
                let q = rng.gen_range(1..=6i64);
                let th = AnglePi(rat(rng.gen_range(-(2 * q - 1)..=0), q));
                *eigen.entry((r.clone(), th.clone())).or_insert(0) += 1;
                *eigen.entry((r.recip(), th.clone())).or_insert(0) += 1;
                *cross.entry((r, th)).or_insert(0) += 1;
            }
            5 => {
                let th = off_axis_angle(rng);
                *eigen.entry((one.clone(), th.clone())).or_insert(0) += 1;
                *eigen.entry((one.clone(), (-th).window_neg())).or_insert(0) += 1;
            }
            _ => {
                *eigen
                    .entry((one.clone(), AnglePi::new(-1, 1)))
                    .or_insert(0) += 1;
            }
        }
    }
    LagrangianData {
        eigen: eigen.into_iter().map(|((r, th), m)| (r, th, m)).collect(),
        unit_sig: sig
            .into_iter()
            .filter(|(_, (p, q))| p + q > 0)
            .map(|(th, (p, q))| (th, p, q))
            .collect(),
        cross_rank: cross.into_iter().map(|((r, th), k)| (r, th, k)).collect(),
    }
}

fn verify_case(lag: &LagrangianData, sheet: i32) -> Result<(), String> {
    let err = |e: MetaplecticError| e.to_string();
    let x = lag.x_data().map_err(err)?;
    let rho = rho_lagrangian(lag, sheet).map_err(err)?;
    let phi = phi_fn(&x, sheet).map_err(err)?;
    let det = moved_determinant(&lag.eigen).map_err(err)?;
    let parity = if (lag.n_l() + lag.q_l_elliptic()) % 2 == 1 {
        -1
    } else {
        1
    };
    let lhs = phi.mul(&det);
    let rhs = rho.scale(&ExactC::from_int(parity));
    if lhs != rhs {
        return Err(format!("determinant identity failed: {lhs} vs {rhs}"));
    }
    let delta = delta_fn(&x, sheet).map_err(err)?;
    if !delta.binomials().is_empty() {
        return Err("delta produced non-unit factors".into());
    }
    let mut angle = AnglePi::zero();
    for (th, _, q) in lag.signature().eigen_sig {
        angle = angle + AnglePi(th.0 * rint(q as i64));
    }
    let lhs_u = rho.unit().unit_part();
    let rhs_u = &delta.unit().unit_part() * &ExactC::unit(&angle);
    if lhs_u != rhs_u {
        return Err(format!("unit identity failed: {lhs_u} vs {rhs_u}"));
    }
    let flipped = delta_fn(&x, -sheet).map_err(err)?;
    if flipped != delta.scale(&ExactC::from_int(-1)) {
        return Err("delta is not sheet-antisymmetric".into());
    }
    Ok(())
}

/// Runs `cases` seeded lagrangian configurations through the exact identity
/// chain linking `Φ`, `ρ_L`, `δ` and the moved determinant, on both sheets.
#[must_use]
pub fn check_identities(seed: u64, cases: usize) -> CorpusReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..cases {
        let lag = sample_lagrangian(&mut rng);
        for sheet in [1i32, -1] {
            if let Err(msg) = verify_case(&lag, sheet) {
                failures.push(format!("case {case} sheet {sheet}: {msg} [{lag:?}]"));
            }
        }
    }
    CorpusReport { cases, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realform::Catalog;

    fn group(name: &str) -> &'static RealGroup {
        Catalog::builtin().group(name).expect("catalog group")
    }

    fn ang(p: i64, q: i64) -> AnglePi {
        AnglePi::new(p, q)
    }

    #[test]
    fn cover_value_normal_form() {
        // Inward moduli fold outward with the conjugated key and a rational
        // magnitude; axis factors are absorbed entirely.
        let mut a = CoverValue::one();
        a.times_binomial(&rat(1, 2), &ang(-1, 2), 1).unwrap();
        let mut b = CoverValue::from_unit(ExactC::from_polar_mag2(&AnglePi::zero(), &rat(1, 4)));
        b.times_binomial(&rint(2), &ang(-1, 2), 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.binomials().len(), 1);
        assert_eq!(a.binomials()[&(rint(2), ang(-1, 2))], 1);

        // |1 - 3| and |1 + 3| are rational; |1 + e^{-iπ}| = 2.
        let mut c = CoverValue::one();
        c.times_binomial(&rint(3), &AnglePi::zero(), 2).unwrap();
        c.times_binomial(&rint(3), &ang(-1, 1), 1).unwrap();
        c.times_binomial(&Rat::one(), &ang(-1, 1), -1).unwrap();
        assert!(c.binomials().is_empty());
        assert_eq!(*c.unit().mag2(), rint(64)); // (2^2)^2 * 4^2 / 4

        // Inverse cancels exponents exactly.
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), CoverValue::one());

        // Vanishing and invalid factors are rejected.
        let mut z = CoverValue::one();
        assert!(matches!(
            z.times_binomial(&Rat::one(), &AnglePi::zero(), 1),
            Err(MetaplecticError::DegenerateForm(_))
        ));
        assert!(matches!(
            z.times_binomial(&rat(-2, 1), &ang(-1, 2), 1),
            Err(MetaplecticError::NonSemisimple(_))
        ));
    }

    #[test]
    fn cover_value_approx_tracks_exact_products() {
        let mut v = CoverValue::from_unit(ExactC::i());
        v.times_binomial(&rint(2), &ang(-2, 3), -2).unwrap();
        let (re, im) = v.approx();
        // |1 - 2e^{-2iπ/3}|² = 1 + 2 + 4 = 7
        assert!(re.abs() < 1e-12);
        assert!((im - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn lift_orientation_frozen_values() {
        let gen = |v: Vec<AnglePi>| LiftGenerator {
            unreduced_angles: v,
        };
        assert_eq!(orientation_of_lift(&gen(vec![])).unwrap(), 1);
        assert_eq!(orientation_of_lift(&gen(vec![ang(2, 1)])).unwrap(), -1);
        assert_eq!(orientation_of_lift(&gen(vec![ang(4, 1)])).unwrap(), 1);
        assert_eq!(orientation_of_lift(&gen(vec![ang(-1, 1)])).unwrap(), -1);
        assert_eq!(orientation_of_lift(&gen(vec![ang(1, 1)])).unwrap(), 1);
        assert_eq!(
            orientation_of_lift(&gen(vec![ang(1, 1), ang(-1, 1)])).unwrap(),
            -1
        );
        assert!(matches!(
            orientation_of_lift(&gen(vec![AnglePi::zero()])),
            Err(MetaplecticError::MalformedGenerator(_))
        ));
    }

    #[test]
    fn infinitesimal_orientation_frozen_values() {
        assert_eq!(orientation_of_inf(&[]).unwrap(), 1);
        assert_eq!(orientation_of_inf(&[ang(-1, 1)]).unwrap(), -1);
        assert_eq!(orientation_of_inf(&[ang(1, 1), ang(-1, 1)]).unwrap(), -1);
        assert_eq!(orientation_of_inf(&[ang(1, 3), ang(1, 2)]).unwrap(), 1);
        assert!(matches!(
            orientation_of_inf(&[AnglePi::zero()]),
            Err(MetaplecticError::ZeroAngle)
        ));
    }

    #[test]
    fn elliptic_data_validation() {
        let mut d = EllipticSymplecticData::torus(vec![(ang(-1, 2), 1)]);
        d.validate().unwrap();
        assert_eq!(d.q_e(), 1);
        assert_eq!(d.dim(), 2);

        d.hyper_eigen.push((Rat::one(), ang(-1, 2), 1));
        assert!(matches!(
            d.validate(),
            Err(MetaplecticError::NonSemisimple(_))
        ));
        d.hyper_eigen[0] = (rat(1, 2), ang(-1, 2), 1);
        assert!(matches!(
            d.validate(),
            Err(MetaplecticError::InconsistentSignature(_))
        ));
        // off-axis hyperbolic eigenvalues need their conjugates
        d.hyper_eigen[0] = (rint(2), ang(-1, 2), 1);
        assert!(matches!(
            d.validate(),
            Err(MetaplecticError::InconsistentSignature(_))
        ));
        d.hyper_eigen.push((rint(2), ang(-3, 2), 1));
        d.validate().unwrap();
        assert_eq!(d.dim(), 6);
    }

    #[test]
    fn lift_sheet_checks_block_multiset() {
        let block = EllipticSymplecticData::torus(vec![(ang(-1, 1), 1)]);
        let plus = LiftGenerator {
            unreduced_angles: vec![ang(1, 1)],
        };
        let minus = LiftGenerator {
            unreduced_angles: vec![ang(-1, 1)],
        };
        assert_eq!(lift_sheet(&block, &plus).unwrap(), 1);
        assert_eq!(lift_sheet(&block, &minus).unwrap(), -1);

        let wrong = LiftGenerator {
            unreduced_angles: vec![ang(1, 2)],
        };
        assert!(matches!(
            lift_sheet(&block, &wrong),
            Err(MetaplecticError::MalformedGenerator(_))
        ));

        // full turns ride on fixed planes only
        let with_fixed =
            EllipticSymplecticData::torus(vec![(ang(-1, 1), 1), (AnglePi::zero(), 1)]);
        let turned = LiftGenerator {
            unreduced_angles: vec![ang(1, 1), ang(2, 1)],
        };
        assert_eq!(lift_sheet(&with_fixed, &turned).unwrap(), -1);
        assert!(matches!(
            lift_sheet(&block, &turned),
            Err(MetaplecticError::MalformedGenerator(_))
        ));
    }

    #[test]
    fn delta_frozen_values() {
        let id = EllipticSymplecticData::torus(vec![(AnglePi::zero(), 2)]);
        assert_eq!(delta_fn(&id, 1).unwrap(), CoverValue::one());
        // the nontrivial element over the identity acts by -1
        assert_eq!(
            delta_fn(&id, -1).unwrap(),
            CoverValue::from_unit(ExactC::from_int(-1))
        );

        let half_turn = EllipticSymplecticData::torus(vec![(ang(-1, 1), 1)]);
        assert_eq!(
            delta_fn(&half_turn, 1).unwrap(),
            CoverValue::from_unit(ExactC::i_pow(-1))
        );
        assert_eq!(
            delta_fn(&half_turn, -1).unwrap(),
            CoverValue::from_unit(ExactC::i())
        );

        // a reversed reference basis flips the sign
        let mut flipped = half_turn;
        flipped.b_orientation_ref = vec![-1];
        assert_eq!(
            delta_fn(&flipped, 1).unwrap(),
            CoverValue::from_unit(ExactC::i())
        );

        // a hyperbolic class moved by the elliptic part: its plane angles
        // are forced to {θ, -θ-2π}, one quarter turn per line
        let hyper = EllipticSymplecticData {
            blocks: vec![],
            hyper_eigen: vec![(rint(2), ang(-1, 1), 1)],
            b_orientation_ref: vec![],
        };
        assert_eq!(
            delta_fn(&hyper, 1).unwrap(),
            CoverValue::from_unit(ExactC::i_pow(-1))
        );

        assert!(matches!(
            delta_fn(&id, 2),
            Err(MetaplecticError::InconsistentSignature(_))
        ));
    }

    #[test]
    fn phi_frozen_values() {
        let id = EllipticSymplecticData::torus(vec![(AnglePi::zero(), 1)]);
        assert_eq!(phi_fn(&id, 1).unwrap(), CoverValue::one());

        // θ = -π: Φ = -i/2 exactly
        let half_turn = EllipticSymplecticData::torus(vec![(ang(-1, 1), 1)]);
        assert_eq!(
            phi_fn(&half_turn, 1).unwrap(),
            CoverValue::from_unit(ExactC::from_polar_mag2(&ang(3, 2), &rat(1, 4)))
        );

        // θ = -π/2: unit -i with one surviving binomial of exponent -1
        let quarter = EllipticSymplecticData::torus(vec![(ang(-1, 2), 1)]);
        let phi = phi_fn(&quarter, 1).unwrap();
        assert_eq!(phi.unit(), &ExactC::i_pow(-1));
        assert_eq!(phi.binomials().len(), 1);
        assert_eq!(phi.binomials()[&(Rat::one(), ang(-1, 2))], -1);
        let (re, im) = phi.approx();
        let norm = re.hypot(im);
        assert!((norm - 0.5f64.sqrt()).abs() < 1e-12);

        // eigenvalues {-2, -1/2}: one elliptically moved hyperbolic line,
        // |det(1-x)| = 9/2, so Φ = i⁻¹·√(2/9) exactly
        let hyper = EllipticSymplecticData {
            blocks: vec![],
            hyper_eigen: vec![(rint(2), ang(-1, 1), 1)],
            b_orientation_ref: vec![],
        };
        assert_eq!(
            phi_fn(&hyper, 1).unwrap(),
            CoverValue::from_unit(ExactC::from_polar_mag2(&ang(3, 2), &rat(2, 9)))
        );
    }

    #[test]
    fn rho_frozen_values() {
        let empty = LagrangianData::default();
        assert_eq!(rho_lagrangian(&empty, 1).unwrap(), CoverValue::one());

        // one hyperbolic line at -4: ρ = -2i on the canonical sheet
        let line = LagrangianData {
            eigen: vec![(rint(4), ang(-1, 1), 1)],
            unit_sig: vec![],
            cross_rank: vec![],
        };
        let rho = rho_lagrangian(&line, 1).unwrap();
        assert_eq!(
            rho,
            CoverValue::from_unit(ExactC::from_polar_mag2(&ang(3, 2), &rint(4)))
        );

        // a negative unit line flips the sign through q_L
        let neg = LagrangianData {
            eigen: vec![(Rat::one(), ang(-1, 2), 1)],
            unit_sig: vec![(ang(-1, 2), 0, 1)],
            cross_rank: vec![],
        };
        assert_eq!(
            rho_lagrangian(&neg, 1).unwrap(),
            CoverValue::from_unit(&ExactC::from_int(-1) * &ExactC::unit(&ang(-1, 4)))
        );
    }

    #[test]
    fn moved_determinant_frozen_values() {
        let det = |e: &[(Rat, AnglePi, usize)]| moved_determinant(e).unwrap();
        assert_eq!(
            det(&[(rint(4), ang(-1, 1), 1)]),
            CoverValue::from_unit(ExactC::from_int(5))
        );
        assert_eq!(
            det(&[(rint(2), AnglePi::zero(), 1)]),
            CoverValue::from_unit(ExactC::from_int(-1))
        );
        assert_eq!(
            det(&[(rat(1, 2), AnglePi::zero(), 1)]),
            CoverValue::from_unit(ExactC::from_rat(&rat(1, 2)))
        );

        // 1 - e^{-iπ/2} = 1 + i: unit e^{iπ/4} with the √2 binomial
        let v = det(&[(Rat::one(), ang(-1, 2), 1)]);
        assert_eq!(v.unit(), &ExactC::unit(&ang(1, 4)));
        assert_eq!(v.binomials()[&(Rat::one(), ang(-1, 2))], 1);

        // conjugate pair at modulus 2: (1+2i)(1-2i) = 5
        let pair = det(&[(rint(2), ang(-1, 2), 1), (rint(2), ang(-3, 2), 1)]);
        assert_eq!(pair.unit(), &ExactC::one());
        assert_eq!(pair.binomials()[&(rint(2), ang(-1, 2))], 2);
        let (re, im) = pair.approx();
        assert!((re - 5.0).abs() < 1e-12 && im.abs() < 1e-12);

        // inverse pair coupled across the lagrangian: (1+2i)(1+i/2) = 5i/2
        let inv_pair = det(&[(rint(2), ang(-1, 2), 1), (rat(1, 2), ang(-1, 2), 1)]);
        assert_eq!(inv_pair.unit(), &ExactC::from_polar_mag2(&ang(1, 2), &rat(1, 4)));
        let (re, im) = inv_pair.approx();
        assert!(re.abs() < 1e-12 && (im - 2.5).abs() < 1e-12);

        assert!(matches!(
            moved_determinant(&[(rint(2), ang(-1, 2), 1)]),
            Err(MetaplecticError::InconsistentSignature(_))
        ));
    }

    #[test]
    fn lagrangian_validation_rejects_unclosed_data() {
        // a definite line is fine on its own
        LagrangianData {
            eigen: vec![(Rat::one(), ang(-1, 3), 1)],
            unit_sig: vec![(ang(-1, 3), 1, 0)],
            cross_rank: vec![],
        }
        .validate()
        .unwrap();

        // a radical line off the self-conjugate axis needs its partner
        let lone_radical = LagrangianData {
            eigen: vec![(Rat::one(), ang(-1, 3), 1)],
            unit_sig: vec![],
            cross_rank: vec![],
        };
        assert!(matches!(
            lone_radical.validate(),
            Err(MetaplecticError::InconsistentSignature(_))
        ));

        // an inverse pair without its cross rank cannot close the radical
        let uncoupled = LagrangianData {
            eigen: vec![(rint(2), ang(-1, 2), 1), (rat(1, 2), ang(-1, 2), 1)],
            unit_sig: vec![],
            cross_rank: vec![],
        };
        assert!(matches!(
            uncoupled.validate(),
            Err(MetaplecticError::InconsistentSignature(_))
        ));

        // the explicit unmoved eigenvalue is banned
        let unmoved = LagrangianData {
            eigen: vec![(Rat::one(), AnglePi::zero(), 1)],
            unit_sig: vec![],
            cross_rank: vec![],
        };
        assert!(matches!(
            unmoved.validate(),
            Err(MetaplecticError::InconsistentSignature(_))
        ));
    }

    #[test]
    fn x_data_expands_to_the_symplectic_layout() {
        // positive line keeps its angle, negative line conjugates it
        let lag = LagrangianData {
            eigen: vec![(Rat::one(), ang(-1, 3), 2)],
            unit_sig: vec![(ang(-1, 3), 1, 1)],
            cross_rank: vec![],
        };
        let x = lag.x_data().unwrap();
        assert_eq!(
            x.blocks,
            vec![(ang(-5, 3), 1), (ang(-1, 3), 1)]
        );
        assert!(x.hyper_eigen.is_empty());

        // radical pair fills its own angles
        let rad = LagrangianData {
            eigen: vec![(Rat::one(), ang(-1, 3), 1), (Rat::one(), ang(-5, 3), 1)],
            unit_sig: vec![],
            cross_rank: vec![],
        };
        let x = rad.x_data().unwrap();
        assert_eq!(x.blocks, vec![(ang(-5, 3), 1), (ang(-1, 3), 1)]);

        // coupled inverse pair lists the outward eigenvalue and its conjugate
        let pair = LagrangianData {
            eigen: vec![(rint(3), ang(-1, 2), 1), (rat(1, 3), ang(-1, 2), 1)],
            unit_sig: vec![],
            cross_rank: vec![(rint(3), ang(-1, 2), 1)],
        };
        let x = pair.x_data().unwrap();
        assert!(x.blocks.is_empty());
        assert_eq!(
            x.hyper_eigen,
            vec![(rint(3), ang(-3, 2), 1), (rint(3), ang(-1, 2), 1)]
        );

        // a real-axis line stays a single outward entry
        let line = LagrangianData {
            eigen: vec![(rat(1, 5), AnglePi::zero(), 1)],
            unit_sig: vec![],
            cross_rank: vec![],
        };
        let x = line.x_data().unwrap();
        assert_eq!(x.hyper_eigen, vec![(rint(5), AnglePi::zero(), 1)]);
    }

    #[test]
    fn corpus_identities_hold_on_a_seeded_sample() {
        let report = check_identities(0x5eed, 40);
        assert_eq!(report.cases, 40);
        assert!(report.passed(), "{}", report.failures.join("\n"));
    }

    #[test]
    fn gamma_alpha_frozen_values() {
        // split rank-one frames have n_α = 1
        for (name, frame) in [("sl2R", "split"), ("psl2R", "split"), ("gl2R", "split")] {
            let g = group(name);
            let fi = g.frame_named(frame).unwrap();
            let root = (0..g.datum.num_roots())
                .find(|&r| matches!(g.classify_root(fi, r), Ok(RootLabel::Real)))
                .unwrap();
            let data = gamma_alpha_data(g, fi, root).unwrap();
            assert_eq!(data.n_alpha, 1, "{name}");
            // γ_α reaches a non-identity component of the Cartan subgroup
            data.point.resolve(g).unwrap();
            assert_eq!(lift_sheet(&data.block, &data.lift_plus).unwrap(), 1);
            assert_eq!(lift_sheet(&data.block, &data.lift_minus).unwrap(), -1);
        }

        // the short real root of the intermediate frame of sp4R sees the
        // full restricted-root string: n_α = 3
        let g = group("sp4R");
        let fi = g.frame_named("intermediate-short").unwrap();
        let root = g.datum.find_root(&[0, 1]).unwrap();
        assert!(matches!(g.classify_root(fi, root), Ok(RootLabel::Real)));
        assert_eq!(gamma_alpha_data(g, fi, root).unwrap().n_alpha, 3);

        // no real root on a compact frame
        let su2 = group("su2");
        assert!(matches!(
            gamma_alpha_data(su2, su2.frame_named("compact").unwrap(), 1),
            Err(MetaplecticError::NotRealRoot(_))
        ));
    }
}
