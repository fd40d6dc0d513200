//! Parameters `(λ, F⁺)` on a Cartan frame of a catalog group: chamber
//! enumeration for the imaginary roots of the stabilizer `g(λ)`, perturbed
//! positive systems with exact ε, integrality against the exponential kernel
//! lattice, classification flags, and descent at elliptic elements.
//!
//! Functionals are rational vectors in fundamental-weight coordinates (plus
//! center); points are rational vectors in simple-coroot coordinates (plus
//! center); evaluation is the plain dot product.  A linear form is carried as
//! the pair `(mu, nu)` of its elliptic and hyperbolic parts: `mu` is the
//! vector of `iμ` (anti-invariant under the frame involution), `nu` the
//! vector of `ν` (invariant).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{self, RMat, RVec};
use crate::phase::AnglePi;
use crate::rat::{rat, rint, sign, Rat};
use crate::realform::{real_weyl, CartanFrame, RealGroup, RootLabel};
use crate::rootdata::RootDatum;

/// Errors for parameter construction and descent.
#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    /// Input data does not live on the frame (wrong length or eigenspace).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// A sign vector admits no interior point.
    #[error("sign vector is not a chamber")]
    NotAChamber,
    /// The elliptic element does not fix the parameter.
    #[error("element does not fix the parameter")]
    NotFixed,
    /// No hyperbolic chamber is stable under the element.
    #[error("no stable hyperbolic chamber at this element")]
    NoStableChamber,
    /// Fiber counting requires an all-imaginary regular parameter and an
    /// existing descent.
    #[error("descent fiber is undefined for this parameter")]
    DescentUndefined,
    /// The stabilizer is not a product of rank-one split factors.
    #[error("stabilizer is not a product of rank-one split factors")]
    UnsupportedStabilizer,
}

/// A semisimple rational linear form on one Cartan frame, split into its
/// elliptic part `mu` (the vector of `iμ`) and hyperbolic part `nu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFormSS {
    pub mu: RVec,
    pub nu: RVec,
}

impl LinearFormSS {
    #[must_use]
    pub fn new(mu: RVec, nu: RVec) -> Self {
        LinearFormSS { mu, nu }
    }

    /// The zero form of the given rank.
    #[must_use]
    pub fn zero(rank: usize) -> Self {
        LinearFormSS {
            mu: linalg::zeros(rank),
            nu: linalg::zeros(rank),
        }
    }

    /// Checks lengths and the involution eigenspace constraints on the frame.
    pub fn validate(&self, group: &RealGroup, frame_idx: usize) -> Result<(), ParamError> {
        let rank = group.datum.rank();
        if self.mu.len() != rank || self.nu.len() != rank {
            return Err(ParamError::DegenerateInput(format!(
                "form has length {}/{}, frame rank is {rank}",
                self.mu.len(),
                self.nu.len()
            )));
        }
        let frame = &group.frames[frame_idx];
        if linalg::mat_vec(&frame.sigma_form, &self.mu) != linalg::neg(&self.mu) {
            return Err(ParamError::DegenerateInput(
                "elliptic part is not anti-invariant".into(),
            ));
        }
        if linalg::mat_vec(&frame.sigma_form, &self.nu) != self.nu {
            return Err(ParamError::DegenerateInput(
                "hyperbolic part is not invariant".into(),
            ));
        }
        Ok(())
    }

    /// Coroot pairing of the elliptic part: the value `iμ(H_α)`.
    #[must_use]
    pub fn pair_m(&self, datum: &RootDatum, root: usize) -> Rat {
        datum.pairing(&self.mu, root)
    }

    /// Coroot pairing of the hyperbolic part: the value `ν(H_α)`.
    #[must_use]
    pub fn pair_n(&self, datum: &RootDatum, root: usize) -> Rat {
        datum.pairing(&self.nu, root)
    }

    /// True when both pairings vanish, i.e. the root lies in `g(λ)`.
    #[must_use]
    pub fn annihilates(&self, datum: &RootDatum, root: usize) -> bool {
        self.pair_m(datum, root).is_zero() && self.pair_n(datum, root).is_zero()
    }
}

/// A parameter `(λ, F⁺)`: a linear form plus a chamber for the imaginary
/// roots of its stabilizer, stored as a full sign vector (one entry per
/// imaginary stabilizer root, sorted by root index, signs ±1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamTilde {
    pub frame: usize,
    pub lambda: LinearFormSS,
    pub fplus: Vec<(usize, i32)>,
}

/// A chamber for the hyperbolic restrictions of the roots annihilating both
/// `λ` and the chamber half-sum, stored as a full sign vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AChamber {
    pub signs: Vec<(usize, i32)>,
}

/// Output of `build_positive_system`: the perturbed positive-system package
/// attached to a parameter and a hyperbolic chamber.
#[derive(Debug, Clone)]
pub struct PositiveSystemData {
    /// Exact perturbation step.
    pub epsilon: Rat,
    /// Perturbed hyperbolic part `ν + ε·ρ'`.
    pub nu_plus: RVec,
    /// Perturbed elliptic part `iμ + 2·ρ(R⁺(g(ν₊)))`.
    pub mu_plus: RVec,
    /// The regular perturbed form.
    pub lambda_plus: LinearFormSS,
    /// The canonical partial perturbation, annihilating exactly the roots
    /// orthogonal to both `λ` and the chamber half-sum.
    pub lambda_can: LinearFormSS,
    /// Half-sum of the chamber's positive imaginary stabilizer roots.
    pub rho_f: RVec,
    /// Half-sum used in the canonical perturbation.
    pub rho_can: RVec,
    /// Positive system of the full root list selected by `λ₊`.
    pub rplus_g_h: Vec<usize>,
    /// Positive roots outside the canonical stabilizer, selected by
    /// `(ν, iμ, ρ_F)` in lexicographic order of signs.
    pub rplus_lambdatilde: Vec<usize>,
    /// The previous set together with the hyperbolic chamber's positives.
    pub rplus_lambdatilde_aplus: Vec<usize>,
    /// The hyperbolic chamber the data was built on.
    pub a_chamber: AChamber,
}

/// Classification flags of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamFlags {
    /// Every simple root of the chamber is imaginary noncompact.
    pub in_reg: bool,
    /// The frame is fundamental for the stabilizer (no real stabilizer root).
    pub in_fond: bool,
    /// All stabilizer roots are imaginary and the chamber is regular.
    pub in_i: bool,
    /// All stabilizer roots are imaginary noncompact and the chamber regular.
    pub in_inc: bool,
    /// Regular and integral against the exponential kernel lattice.
    pub in_reg_g: bool,
}

/// An elliptic element `e = u·exp(E)`: `u` is a Weyl element composed with an
/// optional component automorphism of the frame, `E` lies in the elliptic
/// part of the Cartan and is given by its angle vector `x` in point
/// coordinates, so that a root `α` takes the value `α(E) = iπ·dot(α, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticPoint {
    pub frame: usize,
    /// Name of a component automorphism of the frame, if any.
    pub auto_name: Option<String>,
    /// Index into the complex Weyl group element list.
    pub weyl: usize,
    /// Angle vector `x` (point coordinates); `exp(E)` must be a real group
    /// element, i.e. `(x + σx)/2` must lie in the exp-kernel lattice.
    /// Elliptic-part vectors (`σx = -x`) always qualify; integer coroot
    /// vectors reach the non-identity components of the Cartan subgroup.
    pub angles: RVec,
}

/// Membership of `y` in the exp-kernel lattice reachable from catalog data:
/// the integer span of the kernel rows plus the coroot lattice (integer
/// semisimple coordinates) and the integer center lattice.
fn in_exp_kernel_lattice(datum: &RootDatum, kernel_rows: &[RVec], y: &RVec) -> bool {
    let ss = datum.rank_ss();
    if y.iter().skip(ss).any(|c| !c.is_integer()) {
        return false;
    }
    // Each kernel row has a finite period modulo the integer lattice, so the
    // quotient the rows span is finite; scan it.
    let periods: Vec<i64> = kernel_rows
        .iter()
        .map(|z| {
            z.iter().fold(1i64, |acc, q| {
                let d = i64::try_from(q.denom()).expect("catalog kernel rows have small entries");
                num_integer::lcm(acc, d)
            })
        })
        .collect();
    let total: i64 = periods.iter().product();
    'combos: for idx in 0..total.max(1) {
        let mut rem = idx;
        let mut shifted = y.to_vec();
        for (z, p) in kernel_rows.iter().zip(&periods) {
            let c = rem % p;
            rem /= p;
            if c != 0 {
                shifted = linalg::sub(&shifted, &linalg::scale(&rint(c), z));
            }
        }
        for v in shifted.iter().take(ss) {
            if !v.is_integer() {
                continue 'combos;
            }
        }
        return true;
    }
    false
}

/// The linear action of an elliptic element, resolved against a group.
#[derive(Debug, Clone)]
pub struct ResolvedElliptic {
    pub frame: usize,
    pub root_perm: Vec<usize>,
    pub form_mat: RMat,
    pub point_mat: RMat,
    pub angles: RVec,
}

impl EllipticPoint {
    /// The identity element on a frame.
    #[must_use]
    pub fn identity(group: &RealGroup, frame: usize) -> Self {
        EllipticPoint {
            frame,
            auto_name: None,
            weyl: group.datum.weyl().identity(),
            angles: linalg::zeros(group.datum.rank()),
        }
    }

    /// A pure torus element `exp(E)` with the given angle vector.
    #[must_use]
    pub fn torus(group: &RealGroup, frame: usize, angles: RVec) -> Self {
        EllipticPoint {
            frame,
            auto_name: None,
            weyl: group.datum.weyl().identity(),
            angles,
        }
    }

    /// Resolves the linear action and validates realizability: `exp(E)` is a
    /// real group element (angle vectors in the elliptic part always are;
    /// integer coroot offsets reach the other components of the Cartan), and
    /// the normalizer part `u` stabilizes the frame (it must match a
    /// real-Weyl symmetry).
    pub fn resolve(&self, group: &RealGroup) -> Result<ResolvedElliptic, ParamError> {
        let datum = &group.datum;
        let frame = &group.frames[self.frame];
        if self.angles.len() != datum.rank() {
            return Err(ParamError::DegenerateInput(
                "angle vector has the wrong length".into(),
            ));
        }
        // exp(E) real <=> exp(E)·conj(exp(E))⁻¹ = exp(iπ(x + σx)) = 1, i.e.
        // (x + σx)/2 lies in the kernel lattice of exp.  That lattice belongs
        // to the shared complex torus, so it is frame-independent: pool the
        // kernel rows of every frame on top of the coroot and center lattices.
        let all_rows: Vec<RVec> = group
            .frames
            .iter()
            .flat_map(|f| f.kernel_rows.iter().cloned())
            .collect();
        let sym = linalg::scale(
            &rat(1, 2),
            &linalg::add(&self.angles, &linalg::mat_vec(&frame.sigma_point, &self.angles)),
        );
        if !in_exp_kernel_lattice(datum, &all_rows, &sym) {
            return Err(ParamError::DegenerateInput(
                "angle vector does not exponentiate into the real group".into(),
            ));
        }
        if self.weyl >= datum.weyl().order() {
            return Err(ParamError::DegenerateInput(
                "Weyl index out of range".into(),
            ));
        }
        let w = &datum.weyl().elements[self.weyl];
        let (perm, form_mat, point_mat) = match &self.auto_name {
            None => (w.root_perm.clone(), w.form_mat.clone(), w.point_mat.clone()),
            Some(name) => {
                let auto = frame
                    .autos
                    .iter()
                    .find(|a| &a.name == name)
                    .ok_or_else(|| {
                        ParamError::DegenerateInput(format!("unknown automorphism `{name}`"))
                    })?;
                if auto.image_frame != self.frame {
                    return Err(ParamError::DegenerateInput(format!(
                        "automorphism `{name}` does not stabilize the frame"
                    )));
                }
                let perm: Vec<usize> = auto.root_perm.iter().map(|&i| w.root_perm[i]).collect();
                (
                    perm,
                    linalg::mat_mul(&w.form_mat, &auto.form_mat),
                    linalg::mat_mul(&w.point_mat, &auto.point_mat),
                )
            }
        };
        let realizable = real_weyl(group, self.frame)
            .iter()
            .any(|rw| rw.root_perm == perm);
        if !realizable {
            return Err(ParamError::DegenerateInput(
                "normalizer part does not stabilize the frame".into(),
            ));
        }
        Ok(ResolvedElliptic {
            frame: self.frame,
            root_perm: perm,
            form_mat,
            point_mat,
            angles: self.angles.clone(),
        })
    }
}

impl ResolvedElliptic {
    /// Angle of the scalar by which the element acts on the root line of
    /// `α`, as a multiple of π: `α(E)/iπ`.
    #[must_use]
    pub fn phase(&self, datum: &RootDatum, root: usize) -> AnglePi {
        AnglePi(linalg::dot(&datum.root_functional(root), &self.angles)).mod_two()
    }

    /// True when the element fixes the parameter: `u` fixes both parts of
    /// the form and preserves the chamber signs.
    #[must_use]
    pub fn fixes(&self, pt: &ParamTilde) -> bool {
        linalg::mat_vec(&self.form_mat, &pt.lambda.mu) == pt.lambda.mu
            && linalg::mat_vec(&self.form_mat, &pt.lambda.nu) == pt.lambda.nu
            && preserves_signs(&self.root_perm, &pt.fplus)
    }
}

/// One root of the fixed-point subalgebra: an orbit of root lines under the
/// element, with trivial product of the scalar actions around the orbit.
#[derive(Debug, Clone)]
pub struct RootOrbit {
    /// Ambient root indices in orbit order.
    pub indices: Vec<usize>,
    /// The restricted root: the average of the orbit member functionals.
    pub form: RVec,
    /// Conjugation type of the restricted root.  For a complex label the
    /// payload indexes the conjugate orbit within the orbit list.
    pub label: RootLabel,
}

/// A parameter descended to the fixed-point subalgebra of an elliptic
/// element.
#[derive(Debug, Clone)]
pub struct DescendedParam {
    pub frame: usize,
    /// Basis of the fixed-point Cartan, as points.
    pub h_basis: Vec<RVec>,
    /// Roots of the fixed-point subalgebra.
    pub orbits: Vec<RootOrbit>,
    /// Indices into `orbits` of the roots annihilated by the form.
    pub stabilizer_orbits: Vec<usize>,
    /// Descended chamber: signs on the imaginary annihilated orbit roots.
    pub fplus_e: Vec<(usize, i32)>,
    /// Every simple root of the descended chamber is noncompact.
    pub regular: bool,
    /// All annihilated orbit roots are imaginary.
    pub all_imaginary: bool,
    /// All annihilated orbit roots are imaginary noncompact.
    pub all_noncompact: bool,
    /// The stable hyperbolic chamber that witnessed existence.
    pub a_chamber: AChamber,
}

impl DescendedParam {
    /// Canonical form of the descended chamber for equality tests:
    /// `(restricted root, sign)` pairs sorted by the root vector.
    #[must_use]
    pub fn signature(&self) -> Vec<(RVec, i32)> {
        let mut sig: Vec<(RVec, i32)> = self
            .fplus_e
            .iter()
            .map(|&(o, s)| (self.orbits[o].form.clone(), s))
            .collect();
        sig.sort();
        sig
    }
}

/// Support data for a stabilizer that is a product of rank-one split
/// factors: one half-cone sign per factor, plus the form itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSupportDescriptor {
    pub lambda: LinearFormSS,
    /// One `(root index, chamber sign)` per factor, the root being the
    /// smaller-indexed member of its opposite pair; sorted by index.
    pub half_cones: Vec<(usize, i32)>,
}

// ---------------------------------------------------------------------------
// chamber machinery

/// Strictly feasible point of `{y : row·y > 0 for all rows}` by exact
/// Fourier–Motzkin elimination, if one exists.
fn fm_interior(rows: &[RVec], dim: usize) -> Option<RVec> {
    if dim == 0 {
        return if rows.is_empty() { Some(vec![]) } else { None };
    }
    let mut zero_rows: Vec<RVec> = Vec::new();
    let mut pos: Vec<&RVec> = Vec::new();
    let mut neg: Vec<&RVec> = Vec::new();
    for row in rows {
        match sign(&row[dim - 1]) {
            0 => zero_rows.push(row[..dim - 1].to_vec()),
            1 => pos.push(row),
            _ => neg.push(row),
        }
    }
    let mut reduced = zero_rows;
    for p in &pos {
        for n in &neg {
            // Interval p-lower-bound < n-upper-bound projects to this row.
            let mut row = Vec::with_capacity(dim - 1);
            for k in 0..dim - 1 {
                row.push(&p[dim - 1] * &n[k] - &n[dim - 1] * &p[k]);
            }
            reduced.push(row);
        }
    }
    let prefix = fm_interior(&reduced, dim - 1)?;
    let mut lower: Option<Rat> = None;
    for p in &pos {
        let b = -linalg::dot(&p[..dim - 1], &prefix) / &p[dim - 1];
        lower = Some(lower.map_or(b.clone(), |l| if b > l { b } else { l }));
    }
    let mut upper: Option<Rat> = None;
    for n in &neg {
        let b = -linalg::dot(&n[..dim - 1], &prefix) / &n[dim - 1];
        upper = Some(upper.map_or(b.clone(), |u| if b < u { b } else { u }));
    }
    let last = match (lower, upper) {
        (None, None) => Rat::zero(),
        (Some(l), None) => l + rint(1),
        (None, Some(u)) => u - rint(1),
        (Some(l), Some(u)) => {
            if l >= u {
                return None;
            }
            (l + u) / rint(2)
        }
    };
    let mut y = prefix;
    y.push(last);
    Some(y)
}

/// Interior point (in ambient point coordinates) realizing the given root
/// signs on the span of `basis`, if the sign vector is a chamber.
fn signed_interior(
    datum: &RootDatum,
    signed: &[(usize, i32)],
    basis: &[RVec],
) -> Option<RVec> {
    let dim = basis.len();
    let rows: Vec<RVec> = signed
        .iter()
        .map(|&(root, s)| {
            let f = datum.root_functional(root);
            basis
                .iter()
                .map(|b| rint(i64::from(s)) * linalg::dot(&f, b))
                .collect()
        })
        .collect();
    let y = fm_interior(&rows, dim)?;
    let mut x = linalg::zeros(datum.rank());
    for (c, b) in y.iter().zip(basis) {
        x = linalg::add(&x, &linalg::scale(c, b));
    }
    Some(x)
}

/// Basis (as points) of the elliptic part of the frame's Cartan.
fn elliptic_basis(datum: &RootDatum, frame: &CartanFrame) -> Vec<RVec> {
    let m = linalg::mat_add(&frame.sigma_point, &linalg::identity(datum.rank()));
    linalg::kernel_basis(&m)
}

/// Basis (as points) of the hyperbolic part of the frame's Cartan.
fn hyperbolic_basis(datum: &RootDatum, frame: &CartanFrame) -> Vec<RVec> {
    let m = linalg::mat_sub(&frame.sigma_point, &linalg::identity(datum.rank()));
    linalg::kernel_basis(&m)
}

/// Imaginary roots of the stabilizer of the form, sorted by index.
#[must_use]
pub fn stabilizer_imaginary_roots(
    group: &RealGroup,
    frame_idx: usize,
    lambda: &LinearFormSS,
) -> Vec<usize> {
    let datum = &group.datum;
    let frame = &group.frames[frame_idx];
    (0..datum.num_roots())
        .filter(|&i| frame.labels[i].is_imaginary() && lambda.annihilates(datum, i))
        .collect()
}

/// Indices of all roots annihilated by the form (the stabilizer's roots).
fn stabilizer_roots(datum: &RootDatum, lambda: &LinearFormSS) -> Vec<usize> {
    (0..datum.num_roots())
        .filter(|&i| lambda.annihilates(datum, i))
        .collect()
}

fn sign_map(signs: &[(usize, i32)]) -> BTreeMap<usize, i32> {
    signs.iter().copied().collect()
}

/// True when the permutation maps the signed set to itself preserving signs.
fn preserves_signs(perm: &[usize], signs: &[(usize, i32)]) -> bool {
    let map = sign_map(signs);
    signs
        .iter()
        .all(|&(root, s)| map.get(&perm[root]) == Some(&s))
}

/// Whether every chamber-simple positive root is imaginary noncompact.
fn chamber_is_regular(
    datum: &RootDatum,
    frame: &CartanFrame,
    signs: &[(usize, i32)],
) -> bool {
    let positives: Vec<usize> = signs
        .iter()
        .filter(|&&(_, s)| s > 0)
        .map(|&(r, _)| r)
        .collect();
    let pos_set: BTreeSet<usize> = positives.iter().copied().collect();
    positives.iter().all(|&a| {
        let is_simple = !positives.iter().any(|&b| {
            if b == a {
                return false;
            }
            let diff: Vec<i64> = datum.roots()[a]
                .iter()
                .zip(&datum.roots()[b])
                .map(|(x, y)| x - y)
                .collect();
            datum.find_root(&diff).is_some_and(|c| pos_set.contains(&c))
        });
        !is_simple || frame.labels[a] == RootLabel::ImaginaryNoncompact
    })
}

/// Sign vector on the imaginary-root class representatives, paired with the
/// chamber's regularity flag.
pub type SignedChamber = (Vec<(usize, i32)>, bool);

/// All chambers of the imaginary stabilizer roots, each with its regularity
/// flag, ordered lexicographically by sign vector.
pub fn enumerate_chambers(
    group: &RealGroup,
    frame_idx: usize,
    lambda: &LinearFormSS,
) -> Result<Vec<SignedChamber>, ParamError> {
    lambda.validate(group, frame_idx)?;
    let datum = &group.datum;
    let frame = &group.frames[frame_idx];
    let imag = stabilizer_imaginary_roots(group, frame_idx, lambda);
    let reps: Vec<usize> = imag
        .iter()
        .copied()
        .filter(|&i| i < datum.neg_index(i))
        .collect();
    let basis = elliptic_basis(datum, frame);
    let mut out = Vec::new();
    for mask in 0..(1u32 << reps.len()) {
        let mut signs: Vec<(usize, i32)> = Vec::with_capacity(imag.len());
        for (j, &r) in reps.iter().enumerate() {
            let s = if mask & (1 << j) != 0 { 1 } else { -1 };
            signs.push((r, s));
            signs.push((datum.neg_index(r), -s));
        }
        signs.sort_unstable();
        if signed_interior(datum, &signs, &basis).is_some() {
            let regular = chamber_is_regular(datum, frame, &signs);
            out.push((signs, regular));
        }
    }
    out.sort_by(|a, b| {
        let va: Vec<i32> = a.0.iter().map(|&(_, s)| s).collect();
        let vb: Vec<i32> = b.0.iter().map(|&(_, s)| s).collect();
        va.cmp(&vb)
    });
    Ok(out)
}

impl ParamTilde {
    #[must_use]
    pub fn new(frame: usize, lambda: LinearFormSS, fplus: Vec<(usize, i32)>) -> Self {
        let mut fplus = fplus;
        fplus.sort_unstable();
        ParamTilde {
            frame,
            lambda,
            fplus,
        }
    }

    /// Checks that the form lives on the frame and the sign vector is a
    /// chamber of the imaginary stabilizer roots.
    pub fn validate(&self, group: &RealGroup) -> Result<(), ParamError> {
        self.lambda.validate(group, self.frame)?;
        let datum = &group.datum;
        let frame = &group.frames[self.frame];
        let imag = stabilizer_imaginary_roots(group, self.frame, &self.lambda);
        let indices: Vec<usize> = self.fplus.iter().map(|&(r, _)| r).collect();
        if indices != imag {
            return Err(ParamError::DegenerateInput(
                "chamber signs must cover exactly the imaginary stabilizer roots".into(),
            ));
        }
        let map = sign_map(&self.fplus);
        for &(r, s) in &self.fplus {
            if s.abs() != 1 || map[&datum.neg_index(r)] != -s {
                return Err(ParamError::NotAChamber);
            }
        }
        let basis = elliptic_basis(datum, frame);
        if signed_interior(datum, &self.fplus, &basis).is_none() {
            return Err(ParamError::NotAChamber);
        }
        Ok(())
    }

    /// Half-sum of the chamber's positive roots.
    #[must_use]
    pub fn rho_f(&self, datum: &RootDatum) -> RVec {
        let pos: Vec<usize> = self
            .fplus
            .iter()
            .filter(|&&(_, s)| s > 0)
            .map(|&(r, _)| r)
            .collect();
        datum.half_sum(&pos)
    }
}

/// Roots annihilated by the form and orthogonal to the chamber half-sum
/// (the root set of the canonical perturbation's stabilizer).
fn canonical_stabilizer_roots(group: &RealGroup, pt: &ParamTilde) -> Vec<usize> {
    let datum = &group.datum;
    let rho_f = pt.rho_f(datum);
    let frame = &group.frames[pt.frame];
    let out: Vec<usize> = stabilizer_roots(datum, &pt.lambda)
        .into_iter()
        .filter(|&i| datum.form_inner(&rho_f, &datum.root_functional(i)).is_zero())
        .collect();
    for &i in &out {
        assert!(
            !frame.labels[i].is_imaginary(),
            "chamber half-sum must be regular on imaginary stabilizer roots"
        );
    }
    out
}

/// All chambers of the hyperbolic restrictions of the canonical stabilizer
/// roots, in lexicographic sign order.  When that root set is empty the one
/// empty chamber is returned.
pub fn enumerate_a_chambers(
    group: &RealGroup,
    pt: &ParamTilde,
) -> Result<Vec<AChamber>, ParamError> {
    pt.validate(group)?;
    let datum = &group.datum;
    let frame = &group.frames[pt.frame];
    let roots = canonical_stabilizer_roots(group, pt);
    let reps: Vec<usize> = roots
        .iter()
        .copied()
        .filter(|&i| i < datum.neg_index(i))
        .collect();
    let basis = hyperbolic_basis(datum, frame);
    let mut out = Vec::new();
    for mask in 0..(1u32 << reps.len()) {
        let mut signs: Vec<(usize, i32)> = Vec::with_capacity(roots.len());
        for (j, &r) in reps.iter().enumerate() {
            let s = if mask & (1 << j) != 0 { 1 } else { -1 };
            signs.push((r, s));
            signs.push((datum.neg_index(r), -s));
        }
        signs.sort_unstable();
        if signed_interior(datum, &signs, &basis).is_some() {
            out.push(AChamber { signs });
        }
    }
    out.sort_by(|a, b| {
        let va: Vec<i32> = a.signs.iter().map(|&(_, s)| s).collect();
        let vb: Vec<i32> = b.signs.iter().map(|&(_, s)| s).collect();
        va.cmp(&vb)
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// root system automorphisms

/// All linear automorphisms of the root set that are the identity on the
/// center, as matrices on functionals.
#[must_use]
pub fn root_system_automorphisms(datum: &RootDatum) -> Vec<RMat> {
    let simples = datum.simple_indices().to_vec();
    let functional_index: BTreeMap<Vec<Rat>, usize> = (0..datum.num_roots())
        .map(|i| (datum.root_functional(i), i))
        .collect();
    let inner = |i: usize, j: usize| {
        datum.form_inner(&datum.root_functional(i), &datum.root_functional(j))
    };
    // Depth-first search over simple-root image tuples with matching Gram
    // data; each consistent tuple is solved for a linear map and kept if it
    // permutes the root set.
    fn search(
        datum: &RootDatum,
        simples: &[usize],
        inner: &dyn Fn(usize, usize) -> Rat,
        functional_index: &BTreeMap<Vec<Rat>, usize>,
        images: &mut Vec<usize>,
        out: &mut Vec<RMat>,
    ) {
        let depth = images.len();
        if depth == simples.len() {
            if let Some(m) = automorphism_from_images(datum, simples, images, functional_index) {
                if !out.iter().any(|x| linalg::mat_eq(x, &m)) {
                    out.push(m);
                }
            }
            return;
        }
        for cand in 0..datum.num_roots() {
            let ok = inner(simples[depth], simples[depth]) == inner(cand, cand)
                && (0..depth).all(|j| inner(simples[j], simples[depth]) == inner(images[j], cand));
            if ok {
                images.push(cand);
                search(datum, simples, inner, functional_index, images, out);
                images.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut images = Vec::new();
    search(datum, &simples, &inner, &functional_index, &mut images, &mut out);
    out
}

/// Builds the linear map sending each simple root to its chosen image (and
/// fixing the center), returning it only if it permutes the root set.
fn automorphism_from_images(
    datum: &RootDatum,
    simples: &[usize],
    images: &[usize],
    functional_index: &BTreeMap<Vec<Rat>, usize>,
) -> Option<RMat> {
    let rank = datum.rank();
    let rank_ss = datum.rank_ss();
    // Columns of the simple functionals restricted to the semisimple block.
    let s_cols: Vec<RVec> = simples
        .iter()
        .map(|&i| datum.root_functional(i)[..rank_ss].to_vec())
        .collect();
    let t_cols: Vec<RVec> = images
        .iter()
        .map(|&i| datum.root_functional(i)[..rank_ss].to_vec())
        .collect();
    let s_mat: RMat = (0..rank_ss)
        .map(|r| (0..rank_ss).map(|c| s_cols[c][r].clone()).collect())
        .collect();
    let t_mat: RMat = (0..rank_ss)
        .map(|r| (0..rank_ss).map(|c| t_cols[c][r].clone()).collect())
        .collect();
    let s_inv = linalg::inverse(&s_mat)?;
    let m_ss = linalg::mat_mul(&t_mat, &s_inv);
    let mut m = linalg::identity(rank);
    for r in 0..rank_ss {
        for c in 0..rank_ss {
            m[r][c] = m_ss[r][c].clone();
        }
    }
    let mut seen = BTreeSet::new();
    for i in 0..datum.num_roots() {
        let img = linalg::mat_vec(&m, &datum.root_functional(i));
        let j = functional_index.get(&img)?;
        if !seen.insert(*j) {
            return None;
        }
    }
    Some(m)
}

// ---------------------------------------------------------------------------
// the perturbed positive system

/// Builds the perturbed positive-system package on a hyperbolic chamber.
///
/// The perturbation step is exact: over all root-system automorphisms `a`
/// moving both `ν` and `ρ'`, the unique `t` with `a(ν + tρ') = ν + tρ'` is
/// collected, and ε is half the smallest positive such `t` (1 when none
/// exists), so the stabilizer of `ν + tρ'` is constant over `0 < t ≤ 2ε`.
pub fn build_positive_system(
    group: &RealGroup,
    pt: &ParamTilde,
    a_chamber: &AChamber,
) -> Result<PositiveSystemData, ParamError> {
    pt.validate(group)?;
    let datum = &group.datum;
    let frame = &group.frames[pt.frame];
    let chambers = enumerate_a_chambers(group, pt)?;
    if !chambers.contains(a_chamber) {
        return Err(ParamError::NotAChamber);
    }
    let rho_f = pt.rho_f(datum);
    let canonical = canonical_stabilizer_roots(group, pt);

    // Positive half of the canonical stabilizer per the hyperbolic chamber,
    // and the invariant half-sum ρ'.
    let can_pos: Vec<usize> = a_chamber
        .signs
        .iter()
        .filter(|&&(_, s)| s > 0)
        .map(|&(r, _)| r)
        .collect();
    let rho_prime = datum.half_sum(&can_pos);
    assert_eq!(
        linalg::mat_vec(&frame.sigma_form, &rho_prime),
        rho_prime,
        "half-sum over a hyperbolic chamber must be invariant"
    );

    // Exact perturbation step.
    let mut epsilon = rint(1);
    for m in root_system_automorphisms(datum) {
        let mu_ = linalg::mat_vec(&m, &pt.lambda.nu);
        let mv = linalg::mat_vec(&m, &rho_prime);
        if mu_ == pt.lambda.nu || mv == rho_prime {
            continue;
        }
        let u = linalg::sub(&mu_, &pt.lambda.nu);
        let v = linalg::sub(&mv, &rho_prime);
        if let Some(p) = v.iter().position(|c| !c.is_zero()) {
            let t = -&u[p] / &v[p];
            if linalg::scale(&-t.clone(), &v) == u && t > Rat::zero() {
                let half = t / rint(2);
                if half < epsilon {
                    epsilon = half;
                }
            }
        }
    }

    let nu_plus = linalg::add(&pt.lambda.nu, &linalg::scale(&epsilon, &rho_prime));

    // The perturbed hyperbolic stabilizer: exactly the roots orthogonal to
    // both ν and ρ' (this is what the ε bound guarantees).
    let nu_plus_stab: Vec<usize> = (0..datum.num_roots())
        .filter(|&i| datum.pairing(&nu_plus, i).is_zero())
        .collect();
    let expected: Vec<usize> = (0..datum.num_roots())
        .filter(|&i| {
            pt.lambda.pair_n(datum, i).is_zero() && datum.pairing(&rho_prime, i).is_zero()
        })
        .collect();
    assert_eq!(
        nu_plus_stab, expected,
        "perturbation step must preserve the joint stabilizer"
    );

    // Positive system on the perturbed stabilizer: elliptic pairing first,
    // chamber half-sum as tie-break.
    let rplus_nu_plus: Vec<usize> = nu_plus_stab
        .iter()
        .copied()
        .filter(|&i| {
            let pm = pt.lambda.pair_m(datum, i);
            match sign(&pm) {
                1 => true,
                -1 => false,
                _ => {
                    let t = datum.form_inner(&rho_f, &datum.root_functional(i));
                    assert!(
                        !t.is_zero(),
                        "perturbed stabilizer root orthogonal to all chamber data"
                    );
                    t > Rat::zero()
                }
            }
        })
        .collect();
    assert_positive_system(datum, &nu_plus_stab, &rplus_nu_plus);

    let mu_plus = linalg::add(
        &pt.lambda.mu,
        &linalg::scale(&rint(2), &datum.half_sum(&rplus_nu_plus)),
    );
    let lambda_plus = LinearFormSS::new(mu_plus.clone(), nu_plus.clone());
    lambda_plus
        .validate(group, pt.frame)
        .expect("perturbed form must stay on the frame");
    for i in 0..datum.num_roots() {
        assert!(
            !lambda_plus.annihilates(datum, i),
            "perturbed form must be regular"
        );
    }

    // Full positive system selected by the perturbed form.
    let mut rplus_g_h: Vec<usize> = (0..datum.num_roots())
        .filter(|&i| datum.pairing(&nu_plus, i) > Rat::zero())
        .collect();
    rplus_g_h.extend(rplus_nu_plus.iter().copied());
    rplus_g_h.sort_unstable();
    let all: Vec<usize> = (0..datum.num_roots()).collect();
    assert_positive_system(datum, &all, &rplus_g_h);

    // Positive roots outside the canonical stabilizer, by lexicographic sign
    // of (ν, iμ, chamber half-sum).
    let can_set: BTreeSet<usize> = canonical.iter().copied().collect();
    let rplus_lambdatilde: Vec<usize> = (0..datum.num_roots())
        .filter(|&i| {
            if can_set.contains(&i) {
                return false;
            }
            let sn = sign(&pt.lambda.pair_n(datum, i));
            if sn != 0 {
                return sn > 0;
            }
            let sm = sign(&pt.lambda.pair_m(datum, i));
            if sm != 0 {
                return sm > 0;
            }
            let st = sign(&datum.form_inner(&rho_f, &datum.root_functional(i)));
            assert!(st != 0, "root outside the canonical stabilizer has a sign");
            st > 0
        })
        .collect();

    // Canonical perturbation: shift the elliptic part by twice the half-sum
    // of the positive hyperbolic-stabilizer roots outside the canonical set.
    let rho_can_idx: Vec<usize> = rplus_lambdatilde
        .iter()
        .copied()
        .filter(|&i| pt.lambda.pair_n(datum, i).is_zero())
        .collect();
    let rho_can = datum.half_sum(&rho_can_idx);
    let mu_can = linalg::add(&pt.lambda.mu, &linalg::scale(&rint(2), &rho_can));
    let lambda_can = LinearFormSS::new(mu_can, pt.lambda.nu.clone());
    lambda_can
        .validate(group, pt.frame)
        .expect("canonical form must stay on the frame");
    let can_check: Vec<usize> = stabilizer_roots(datum, &lambda_can);
    assert_eq!(
        can_check, canonical,
        "canonical form must annihilate exactly the orthogonal stabilizer roots"
    );

    let mut rplus_lambdatilde_aplus = rplus_lambdatilde.clone();
    rplus_lambdatilde_aplus.extend(can_pos.iter().copied());
    rplus_lambdatilde_aplus.sort_unstable();
    assert_positive_system(datum, &all, &rplus_lambdatilde_aplus);

    // Robustness of the step: halving ε must not change the selections.
    {
        let eps2 = &epsilon / rint(2);
        let nu2 = linalg::add(&pt.lambda.nu, &linalg::scale(&eps2, &rho_prime));
        let stab2: Vec<usize> = (0..datum.num_roots())
            .filter(|&i| datum.pairing(&nu2, i).is_zero())
            .collect();
        assert_eq!(stab2, nu_plus_stab, "halved step changed the stabilizer");
        let pos2: Vec<usize> = (0..datum.num_roots())
            .filter(|&i| datum.pairing(&nu2, i) > Rat::zero())
            .collect();
        let pos1: Vec<usize> = (0..datum.num_roots())
            .filter(|&i| datum.pairing(&nu_plus, i) > Rat::zero())
            .collect();
        assert_eq!(pos2, pos1, "halved step changed the positive selection");
    }

    // Stabilizer identity at the Weyl level: elements fixing the perturbed
    // form are exactly those fixing the parameter and the hyperbolic
    // chamber, uniformly in the step size (checked at t and t/2).
    let x_a = signed_interior(datum, &a_chamber.signs, &hyperbolic_basis(datum, frame))
        .expect("validated chamber has an interior point");
    let rho_nu_plus_vec = datum.half_sum(&rplus_nu_plus);
    for t in [rint(1), rat(1, 2)] {
        let m_t = linalg::add(
            &pt.lambda.mu,
            &linalg::scale(&(rint(2) * &t), &rho_nu_plus_vec),
        );
        let n_t = linalg::add(
            &pt.lambda.nu,
            &linalg::scale(&(&t * &epsilon), &rho_prime),
        );
        for (perm, form) in frame_symmetries(group, pt.frame) {
            let fixes_t = linalg::mat_vec(&form, &m_t) == m_t
                && linalg::mat_vec(&form, &n_t) == n_t;
            let fixes_param = linalg::mat_vec(&form, &pt.lambda.mu) == pt.lambda.mu
                && linalg::mat_vec(&form, &pt.lambda.nu) == pt.lambda.nu
                && preserves_signs(&perm, &pt.fplus)
                && canonical.iter().all(|&r| {
                    let a = sign(&linalg::dot(&datum.root_functional(perm[r]), &x_a));
                    let b = sign(&linalg::dot(&datum.root_functional(r), &x_a));
                    a == b
                });
            assert_eq!(
                fixes_t, fixes_param,
                "stabilizer of the perturbed form must match the parameter stabilizer"
            );
        }
    }

    Ok(PositiveSystemData {
        epsilon,
        nu_plus,
        mu_plus,
        lambda_plus,
        lambda_can,
        rho_f,
        rho_can,
        rplus_g_h,
        rplus_lambdatilde,
        rplus_lambdatilde_aplus,
        a_chamber: a_chamber.clone(),
    })
}

/// All Weyl×component symmetries of the frame, as (root permutation, form
/// matrix) pairs.
fn frame_symmetries(group: &RealGroup, frame_idx: usize) -> Vec<(Vec<usize>, RMat)> {
    let datum = &group.datum;
    let frame = &group.frames[frame_idx];
    let mut gammas: Vec<(Vec<usize>, RMat)> = vec![(
        (0..datum.num_roots()).collect(),
        linalg::identity(datum.rank()),
    )];
    for auto in frame.autos.iter().filter(|a| a.image_frame == frame_idx) {
        gammas.push((auto.root_perm.clone(), auto.form_mat.clone()));
    }
    let mut out = Vec::new();
    for w in &datum.weyl().elements {
        for (gperm, gform) in &gammas {
            let perm: Vec<usize> = gperm.iter().map(|&i| w.root_perm[i]).collect();
            out.push((perm, linalg::mat_mul(&w.form_mat, gform)));
        }
    }
    out
}

/// Panics unless `pos` picks exactly one of each opposite pair from `all`
/// and is closed under root addition within `all`.
fn assert_positive_system(datum: &RootDatum, all: &[usize], pos: &[usize]) {
    let pos_set: BTreeSet<usize> = pos.iter().copied().collect();
    for &i in all {
        let n = datum.neg_index(i);
        assert!(
            pos_set.contains(&i) ^ pos_set.contains(&n),
            "positive system must pick one of each opposite pair"
        );
    }
    for &a in pos {
        for &b in pos {
            let s: Vec<i64> = datum.roots()[a]
                .iter()
                .zip(&datum.roots()[b])
                .map(|(x, y)| x + y)
                .collect();
            if let Some(c) = datum.find_root(&s) {
                assert!(
                    !all.contains(&c) || pos_set.contains(&c),
                    "positive system must be closed under addition"
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// integrality and classification

/// Integrality of the parameter against the exponential kernel lattice:
/// `dot(iμ + ρ, z)` must be an integer for every kernel row `z`, with `ρ`
/// the half-sum of any positive system (the result is chamber-independent).
#[must_use]
pub fn is_integral_reg_g(group: &RealGroup, pt: &ParamTilde) -> bool {
    let datum = &group.datum;
    let frame = &group.frames[pt.frame];
    let mut rho = linalg::zeros(datum.rank());
    for c in rho.iter_mut().take(datum.rank_ss()) {
        *c = rint(1);
    }
    let v = linalg::add(&pt.lambda.mu, &rho);
    frame
        .kernel_rows
        .iter()
        .all(|z| linalg::dot(&v, z).denom().is_one())
}

/// Classification flags for a valid parameter.
pub fn classify_param(group: &RealGroup, pt: &ParamTilde) -> Result<ParamFlags, ParamError> {
    pt.validate(group)?;
    let datum = &group.datum;
    let frame = &group.frames[pt.frame];
    let stab = stabilizer_roots(datum, &pt.lambda);
    let in_reg = chamber_is_regular(datum, frame, &pt.fplus);
    let in_fond = stab.iter().all(|&i| frame.labels[i] != RootLabel::Real);
    let all_imaginary = stab.iter().all(|&i| frame.labels[i].is_imaginary());
    let all_noncompact = stab
        .iter()
        .all(|&i| frame.labels[i] == RootLabel::ImaginaryNoncompact);
    Ok(ParamFlags {
        in_reg,
        in_fond,
        in_i: all_imaginary && in_reg,
        in_inc: all_noncompact && in_reg,
        in_reg_g: in_reg && is_integral_reg_g(group, pt),
    })
}

// ---------------------------------------------------------------------------
// descent at elliptic elements

/// Descends the parameter to the fixed-point subalgebra of `e`.
///
/// Preconditions (checked): `e` fixes the parameter, and some hyperbolic
/// chamber of the canonical stabilizer is stable under `e`.  The returned
/// chamber is the one containing the half-sum of the upstairs chamber; its
/// signs are guaranteed nonvanishing and are asserted.
pub fn descend_at_e(
    group: &RealGroup,
    pt: &ParamTilde,
    e: &EllipticPoint,
) -> Result<DescendedParam, ParamError> {
    pt.validate(group)?;
    if e.frame != pt.frame {
        return Err(ParamError::DegenerateInput(
            "element and parameter live on different frames".into(),
        ));
    }
    let datum = &group.datum;
    let frame = &group.frames[pt.frame];
    let r = e.resolve(group)?;
    if !r.fixes(pt) {
        return Err(ParamError::NotFixed);
    }

    // Existence: some hyperbolic chamber must be stable under the element.
    let a_chambers = enumerate_a_chambers(group, pt)?;
    let stable = a_chambers
        .into_iter()
        .find(|c| preserves_signs(&r.root_perm, &c.signs))
        .ok_or(ParamError::NoStableChamber)?;

    let rank = datum.rank();
    let h_basis = linalg::kernel_basis(&linalg::mat_sub(
        &r.point_mat,
        &linalg::identity(rank),
    ));
    // Elliptic/hyperbolic split of the fixed-point Cartan.
    let stack_rows = |m1: &RMat, m2: &RMat| -> RMat {
        m1.iter().chain(m2.iter()).cloned().collect()
    };
    let fixed_a = linalg::kernel_basis(&stack_rows(
        &linalg::mat_sub(&r.point_mat, &linalg::identity(rank)),
        &linalg::mat_sub(&frame.sigma_point, &linalg::identity(rank)),
    ));
    let fixed_t = linalg::kernel_basis(&stack_rows(
        &linalg::mat_sub(&r.point_mat, &linalg::identity(rank)),
        &linalg::mat_add(&frame.sigma_point, &linalg::identity(rank)),
    ));

    // Orbits of root lines with trivial scalar product are the roots of the
    // fixed-point subalgebra.
    let mut orbit_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut raw_orbits: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; datum.num_roots()];
    for start in 0..datum.num_roots() {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut cur = r.root_perm[start];
        while cur != start {
            seen[cur] = true;
            orbit.push(cur);
            cur = r.root_perm[cur];
        }
        let total: AnglePi = orbit
            .iter()
            .fold(AnglePi::zero(), |acc, &i| {
                AnglePi(acc.0 + r.phase(datum, i).0)
            })
            .mod_two();
        if !total.is_multiple_of_two_pi() {
            continue;
        }
        let sum = orbit.iter().fold(linalg::zeros(rank), |acc, &i| {
            linalg::add(&acc, &datum.root_functional(i))
        });
        let form = linalg::scale(&rat(1, i64::try_from(orbit.len()).expect("orbit size")), &sum);
        assert!(
            !linalg::is_zero(&form),
            "fixed root vector with zero restricted weight"
        );
        let id = raw_orbits.len();
        for &i in &orbit {
            orbit_of_root.insert(i, id);
        }
        raw_orbits.push(orbit);
    }

    // Labels: orbit members must agree; complex restricted roots point at
    // the conjugate orbit.
    let mut orbits: Vec<RootOrbit> = Vec::new();
    for orbit in &raw_orbits {
        let sum = orbit.iter().fold(linalg::zeros(rank), |acc, &i| {
            linalg::add(&acc, &datum.root_functional(i))
        });
        let form = linalg::scale(&rat(1, i64::try_from(orbit.len()).expect("orbit size")), &sum);
        let base = kind_token(&frame.labels[orbit[0]]);
        assert!(
            orbit.iter().all(|&i| kind_token(&frame.labels[i]) == base),
            "orbit members must share one conjugation type"
        );
        let vanishes_on = |basis: &[RVec]| basis.iter().all(|b| linalg::dot(&form, b).is_zero());
        let label = match frame.labels[orbit[0]] {
            RootLabel::Real => {
                assert!(vanishes_on(&fixed_t), "real restricted root must kill the elliptic part");
                RootLabel::Real
            }
            RootLabel::ImaginaryCompact => {
                assert!(vanishes_on(&fixed_a), "imaginary restricted root must kill the hyperbolic part");
                RootLabel::ImaginaryCompact
            }
            RootLabel::ImaginaryNoncompact => {
                assert!(vanishes_on(&fixed_a), "imaginary restricted root must kill the hyperbolic part");
                RootLabel::ImaginaryNoncompact
            }
            RootLabel::Complex(partner) => {
                assert!(
                    !vanishes_on(&fixed_a) && !vanishes_on(&fixed_t),
                    "complex orbit restricting to a single conjugation type is unsupported"
                );
                let partner_orbit = orbit_of_root
                    .get(&partner)
                    .copied()
                    .expect("conjugate orbit survives with the orbit");
                RootLabel::Complex(partner_orbit)
            }
        };
        orbits.push(RootOrbit {
            indices: orbit.clone(),
            form,
            label,
        });
    }

    // Roots of the descended stabilizer, and the descended chamber as the
    // signs of the upstairs half-sum.
    let rho_f = pt.rho_f(datum);
    let mut stabilizer_orbits = Vec::new();
    let mut fplus_e = Vec::new();
    let mut all_imaginary = true;
    let mut all_noncompact = true;
    for (idx, o) in orbits.iter().enumerate() {
        let km = datum.form_inner(&pt.lambda.mu, &o.form);
        let kn = datum.form_inner(&pt.lambda.nu, &o.form);
        if !(km.is_zero() && kn.is_zero()) {
            continue;
        }
        stabilizer_orbits.push(idx);
        if !o.label.is_imaginary() {
            all_imaginary = false;
            all_noncompact = false;
            continue;
        }
        if o.label != RootLabel::ImaginaryNoncompact {
            all_noncompact = false;
        }
        let s = sign(&datum.form_inner(&rho_f, &o.form));
        assert!(s != 0, "descended chamber sign must not vanish");
        fplus_e.push((idx, s));
    }

    // Regularity of the descended chamber: simple positives noncompact.
    let positives: Vec<usize> = fplus_e.iter().filter(|&&(_, s)| s > 0).map(|&(o, _)| o).collect();
    let regular = positives.iter().all(|&a| {
        let is_simple = !positives.iter().any(|&b| {
            positives.iter().any(|&c| {
                b != a && c != a && linalg::add(&orbits[b].form, &orbits[c].form) == orbits[a].form
            })
        });
        !is_simple || orbits[a].label == RootLabel::ImaginaryNoncompact
    });

    Ok(DescendedParam {
        frame: pt.frame,
        h_basis,
        orbits,
        stabilizer_orbits,
        fplus_e,
        regular,
        all_imaginary,
        all_noncompact,
        a_chamber: stable,
    })
}

/// Conjugation-type token ignoring the complex partner payload.
fn kind_token(label: &RootLabel) -> u8 {
    match label {
        RootLabel::Real => 0,
        RootLabel::ImaginaryCompact => 1,
        RootLabel::ImaginaryNoncompact => 2,
        RootLabel::Complex(_) => 3,
    }
}

/// Number of parameters with all-imaginary regular data, fixed by `e`, that
/// descend to the same parameter as `pt`.
///
/// Two independent routes are asserted equal: direct enumeration over
/// chambers, and the count of commutant Weyl elements whose translate of
/// the chamber half-sum is regular and lands in the descended chamber.  The
/// commutant-size quotient |commutant| / |descended Weyl group| is asserted
/// to count the translates landing in the descended chamber without the
/// regularity refinement.
pub fn count_descent_fiber(
    group: &RealGroup,
    pt: &ParamTilde,
    e: &EllipticPoint,
) -> Result<usize, ParamError> {
    let flags = classify_param(group, pt)?;
    if !flags.in_i {
        return Err(ParamError::DescentUndefined);
    }
    let target = match descend_at_e(group, pt, e) {
        Ok(d) => d,
        Err(_) => return Err(ParamError::DescentUndefined),
    };
    let target_sig = target.signature();
    let datum = &group.datum;
    let r = e.resolve(group)?;

    // Route one: direct enumeration.
    let mut honest = 0usize;
    for (signs, regular) in enumerate_chambers(group, pt.frame, &pt.lambda)? {
        if !regular || !preserves_signs(&r.root_perm, &signs) {
            continue;
        }
        let cand = ParamTilde::new(pt.frame, pt.lambda.clone(), signs);
        match descend_at_e(group, &cand, e) {
            Ok(d) => {
                if d.signature() == target_sig {
                    honest += 1;
                }
            }
            Err(ParamError::NoStableChamber) => {}
            Err(err) => return Err(err),
        }
    }

    // Route two: Weyl elements generated by the stabilizer's reflections.
    let stab = stabilizer_roots(datum, &pt.lambda);
    let weyl = datum.weyl();
    let gens: Vec<usize> = stab.iter().map(|&i| datum.reflection_weyl_index(i)).collect();
    let mut members: BTreeSet<usize> = BTreeSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    members.insert(weyl.identity());
    queue.push_back(weyl.identity());
    while let Some(w) = queue.pop_front() {
        for &g in &gens {
            let n = weyl.compose(g, w);
            if members.insert(n) {
                queue.push_back(n);
            }
        }
    }
    let commutant: Vec<usize> = members
        .into_iter()
        .filter(|&w| {
            let wf = &weyl.elements[w].form_mat;
            linalg::mat_eq(&linalg::mat_mul(wf, &r.form_mat), &linalg::mat_mul(&r.form_mat, wf))
        })
        .collect();

    let rho_f = pt.rho_f(datum);
    let frame = &group.frames[pt.frame];
    let imag_targets: Vec<(RVec, i32)> = target
        .fplus_e
        .iter()
        .map(|&(o, s)| (target.orbits[o].form.clone(), s))
        .collect();
    let mut refined = 0usize;
    let mut in_fiber = 0usize;
    for &w in &commutant {
        let xi = linalg::mat_vec(&weyl.elements[w].form_mat, &rho_f);
        let descends = imag_targets
            .iter()
            .all(|(form, s)| sign(&datum.form_inner(&xi, form)) == *s);
        if !descends {
            continue;
        }
        in_fiber += 1;
        let signs: Vec<(usize, i32)> = stab
            .iter()
            .map(|&i| {
                let s = sign(&datum.pairing(&xi, i));
                assert!(s != 0, "translated half-sum must stay regular");
                (i, s)
            })
            .collect();
        if chamber_is_regular(datum, frame, &signs) {
            refined += 1;
        }
    }
    assert_eq!(honest, refined, "chamber and Weyl routes must agree");

    // Quotient shape: fiber size times the descended Weyl order equals the
    // commutant size.
    let down_order = restricted_weyl_order(
        datum,
        &target
            .stabilizer_orbits
            .iter()
            .map(|&o| target.orbits[o].form.clone())
            .collect::<Vec<_>>(),
    );
    assert_eq!(
        in_fiber * down_order,
        commutant.len(),
        "fiber size must be the commutant-order quotient"
    );

    Ok(honest)
}

/// Order of the group generated by reflections in the given (restricted)
/// root forms, acting on that same list.
fn restricted_weyl_order(datum: &RootDatum, forms: &[RVec]) -> usize {
    if forms.is_empty() {
        return 1;
    }
    let reflect = |pivot: &RVec, target: &RVec| -> RVec {
        let c = rint(2) * datum.form_inner(pivot, target) / datum.form_inner(pivot, pivot);
        linalg::sub(target, &linalg::scale(&c, pivot))
    };
    let index_of = |v: &RVec| -> usize {
        forms
            .iter()
            .position(|f| f == v)
            .expect("restricted reflection closes on the root list")
    };
    let gens: Vec<Vec<usize>> = forms
        .iter()
        .map(|p| forms.iter().map(|t| index_of(&reflect(p, t))).collect())
        .collect();
    let identity: Vec<usize> = (0..forms.len()).collect();
    let mut members: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    members.insert(identity.clone());
    queue.push_back(identity);
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let n: Vec<usize> = p.iter().map(|&i| g[i]).collect();
            if members.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    members.len()
}

// ---------------------------------------------------------------------------
// support descriptors for rank-one split products

/// Half-cone support data when the stabilizer is a product of rank-one
/// split factors (every stabilizer root imaginary noncompact, factors
/// mutually orthogonal with no root sums).
pub fn support_orbits_ss_inc(
    group: &RealGroup,
    pt: &ParamTilde,
) -> Result<OrbitSupportDescriptor, ParamError> {
    pt.validate(group)?;
    let datum = &group.datum;
    let frame = &group.frames[pt.frame];
    let stab = stabilizer_roots(datum, &pt.lambda);
    if !stab
        .iter()
        .all(|&i| frame.labels[i] == RootLabel::ImaginaryNoncompact)
    {
        return Err(ParamError::UnsupportedStabilizer);
    }
    let reps: Vec<usize> = stab
        .iter()
        .copied()
        .filter(|&i| i < datum.neg_index(i))
        .collect();
    for (k, &a) in reps.iter().enumerate() {
        for &b in &reps[k + 1..] {
            let fa = datum.root_functional(a);
            let fb = datum.root_functional(b);
            let s: Vec<i64> = datum.roots()[a]
                .iter()
                .zip(&datum.roots()[b])
                .map(|(x, y)| x + y)
                .collect();
            if !datum.form_inner(&fa, &fb).is_zero() || datum.find_root(&s).is_some() {
                return Err(ParamError::UnsupportedStabilizer);
            }
        }
    }
    let map = sign_map(&pt.fplus);
    let half_cones: Vec<(usize, i32)> = reps.iter().map(|&i| (i, map[&i])).collect();
    Ok(OrbitSupportDescriptor {
        lambda: pt.lambda.clone(),
        half_cones,
    })
}
