//! Root data for the supported series (A–D, G2, F4) with exact arithmetic.
//!
//! Coordinate conventions, used everywhere downstream:
//! * Functionals (roots, weights, rho shifts) are vectors of coefficients in
//!   the fundamental-weight basis of each factor, followed by central
//!   coordinates; the j-th coordinate of a functional v is the coroot pairing
//!   `<v, H_j>` with the j-th simple root. Roots have integer coordinates and
//!   the half-sum of any simple system is an all-ones vector.
//! * Points of the Cartan subalgebra are vectors in the simple-coroot basis,
//!   followed by central coordinates, so evaluating a functional on a point
//!   is a plain dot product.
//! * The invariant form is normalized so long roots have squared length 2 in
//!   every factor; the central block is the identity.
//!
//! Weyl groups are materialized eagerly by closure under simple reflections,
//! with a hard guard on the order.

use crate::linalg::{self, RMat, RVec};
use crate::rat::{rat, rint, Rat};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Maximal Weyl group order this crate will materialize.
pub const MAX_WEYL_ORDER: usize = 1_000_000;

/// Simple-factor series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
    F4,
}

/// Errors from root-datum construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootDataError {
    #[error("unknown series `{0}`")]
    UnknownSeries(String),
    #[error("rank {1} out of range for series {0}")]
    RankOutOfRange(char, usize),
    #[error("Weyl group order exceeds {MAX_WEYL_ORDER}")]
    WeylTooLarge,
}

impl Series {
    /// Parses `A3`, `C2`, `G2`, ... .
    pub fn parse(s: &str) -> Result<Self, RootDataError> {
        let bad = || RootDataError::UnknownSeries(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?;
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        let range_err = |c| RootDataError::RankOutOfRange(c, n);
        match letter {
            'A' if n >= 1 => Ok(Series::A(n)),
            'B' if n >= 2 => Ok(Series::B(n)),
            'C' if n >= 2 => Ok(Series::C(n)),
            'D' if n >= 3 => Ok(Series::D(n)),
            'G' if n == 2 => Ok(Series::G2),
            'F' if n == 4 => Ok(Series::F4),
            'A' | 'B' | 'C' | 'D' | 'G' | 'F' => Err(range_err(letter)),
            _ => Err(bad()),
        }
    }

    /// Rank of the factor.
    #[must_use]
    pub fn rank(&self) -> usize {
        match *self {
            Series::A(n) | Series::B(n) | Series::C(n) | Series::D(n) => n,
            Series::G2 => 2,
            Series::F4 => 4,
        }
    }

    /// Gram matrix on the simple roots, long roots normalized to length^2 = 2.
    #[must_use]
    pub fn gram(&self) -> RMat {
        let n = self.rank();
        let mut g = vec![vec![Rat::zero(); n]; n];
        let set = |g: &mut RMat, i: usize, j: usize, v: Rat| {
            g[i][j] = v.clone();
            g[j][i] = v;
        };
        match *self {
            Series::A(_) | Series::D(_) => {
                for (i, row) in g.iter_mut().enumerate() {
                    row[i] = rint(2);
                }
                let chain_end = if matches!(self, Series::D(_)) { n - 2 } else { n - 1 };
                for i in 0..chain_end {
                    set(&mut g, i, i + 1, rint(-1));
                }
                if matches!(self, Series::D(_)) {
                    set(&mut g, n - 3, n - 1, rint(-1));
                }
            }
            Series::B(_) => {
                for (i, row) in g.iter_mut().enumerate().take(n - 1) {
                    row[i] = rint(2);
                }
                g[n - 1][n - 1] = rint(1);
                for i in 0..n - 1 {
                    set(&mut g, i, i + 1, rint(-1));
                }
            }
            Series::C(_) => {
                for (i, row) in g.iter_mut().enumerate().take(n - 1) {
                    row[i] = rint(1);
                }
                g[n - 1][n - 1] = rint(2);
                for i in 0..n - 2 {
                    set(&mut g, i, i + 1, rat(-1, 2));
                }
                set(&mut g, n - 2, n - 1, rint(-1));
            }
            Series::G2 => {
                g[0][0] = rat(2, 3);
                g[1][1] = rint(2);
                set(&mut g, 0, 1, rint(-1));
            }
            Series::F4 => {
                g[0][0] = rint(2);
                g[1][1] = rint(2);
                g[2][2] = rint(1);
                g[3][3] = rint(1);
                set(&mut g, 0, 1, rint(-1));
                set(&mut g, 1, 2, rint(-1));
                set(&mut g, 2, 3, rat(-1, 2));
            }
        }
        g
    }

    /// Known number of roots, used as a construction check.
    #[must_use]
    pub fn root_count(&self) -> usize {
        match *self {
            Series::A(n) => n * (n + 1),
            Series::B(n) | Series::C(n) => 2 * n * n,
            Series::D(n) => 2 * n * (n - 1),
            Series::G2 => 12,
            Series::F4 => 48,
        }
    }

    /// Known Weyl group order.
    #[must_use]
    pub fn weyl_order(&self) -> usize {
        let fact = |k: usize| (1..=k).product::<usize>();
        match *self {
            Series::A(n) => fact(n + 1),
            Series::B(n) | Series::C(n) => (1 << n) * fact(n),
            Series::D(n) => (1 << (n - 1)) * fact(n),
            Series::G2 => 12,
            Series::F4 => 1152,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Series::A(n) => write!(f, "A{n}"),
            Series::B(n) => write!(f, "B{n}"),
            Series::C(n) => write!(f, "C{n}"),
            Series::D(n) => write!(f, "D{n}"),
            Series::G2 => write!(f, "G2"),
            Series::F4 => write!(f, "F4"),
        }
    }
}

/// One Weyl group element: its action on functionals and on points, plus the
/// induced permutation of the root list and its Coxeter length.
#[derive(Debug, Clone)]
pub struct WeylElem {
    /// Action on functionals (fundamental-weight coordinates plus center).
    pub form_mat: RMat,
    /// Action on points (dual coordinates plus center); the contragredient of
    /// `form_mat`, so `(w f)(w x) = f(x)` exactly.
    pub point_mat: RMat,
    /// Image root index per root index under `form_mat`.
    pub root_perm: Vec<usize>,
    /// Coxeter length (distance from the identity in simple reflections).
    pub length: usize,
}

/// Fully enumerated Weyl group.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    pub elements: Vec<WeylElem>,
    by_perm: HashMap<Vec<usize>, usize>,
}

impl WeylGroup {
    /// Number of elements.
    #[must_use]
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of the identity.
    #[must_use]
    pub fn identity(&self) -> usize {
        0
    }

    /// Element lookup by root permutation.
    #[must_use]
    pub fn find_by_perm(&self, perm: &[usize]) -> Option<usize> {
        self.by_perm.get(perm).copied()
    }

    /// Index of `w1 * w2` (apply `w2` first).
    #[must_use]
    pub fn compose(&self, w1: usize, w2: usize) -> usize {
        let p1 = &self.elements[w1].root_perm;
        let p2 = &self.elements[w2].root_perm;
        let p: Vec<usize> = p2.iter().map(|&k| p1[k]).collect();
        self.by_perm[&p]
    }

    /// Index of the inverse of `w`.
    #[must_use]
    pub fn inverse(&self, w: usize) -> usize {
        let p = &self.elements[w].root_perm;
        let mut q = vec![0usize; p.len()];
        for (i, &j) in p.iter().enumerate() {
            q[j] = i;
        }
        self.by_perm[&q]
    }
}

/// A root datum: semisimple factors plus a central torus.
#[derive(Debug, Clone)]
pub struct RootDatum {
    factors: Vec<Series>,
    center_rank: usize,
    rank_ss: usize,
    /// Roots in fundamental-weight coordinates (length `rank_ss`), sorted
    /// lexicographically; closed under negation.
    roots: Vec<Vec<i64>>,
    root_index: HashMap<Vec<i64>, usize>,
    /// Invariant form on functionals, full rank (center block = identity).
    gram: RMat,
    weyl: WeylGroup,
    simple_positions: Vec<usize>,
}

impl RootDatum {
    /// Builds the datum for the given factors and central rank.
    pub fn build(factors: &[Series], center_rank: usize) -> Result<Self, RootDataError> {
        let rank_ss: usize = factors.iter().map(Series::rank).sum();
        let rank = rank_ss + center_rank;

        let expected_weyl: usize = factors.iter().map(Series::weyl_order).product();
        if expected_weyl > MAX_WEYL_ORDER {
            return Err(RootDataError::WeylTooLarge);
        }

        // Assemble the block-diagonal Gram matrix in simple-root coordinates.
        let mut gram_sr = linalg::identity(rank_ss.max(1));
        gram_sr.truncate(rank_ss);
        for row in &mut gram_sr {
            row.truncate(rank_ss);
        }
        let mut off = 0;
        for f in factors {
            let g = f.gram();
            let r = f.rank();
            for i in 0..r {
                for j in 0..r {
                    gram_sr[off + i][off + j] = g[i][j].clone();
                }
            }
            off += r;
        }

        // Cartan matrix: cart[j][a] = 2 (alpha_j, alpha_a) / (alpha_j, alpha_j).
        // Multiplying a simple-root coordinate vector by `cart` yields its
        // fundamental-weight coordinates.
        let cart: RMat = (0..rank_ss)
            .map(|j| {
                (0..rank_ss)
                    .map(|a| rint(2) * &gram_sr[j][a] / &gram_sr[j][j])
                    .collect()
            })
            .collect();

        // Close the simple roots under simple reflections (simple-root
        // coordinates; the pairing with a simple root is integral).
        let simples_sr: Vec<Vec<i64>> = (0..rank_ss)
            .map(|i| {
                let mut v = vec![0i64; rank_ss];
                v[i] = 1;
                v
            })
            .collect();
        let pair_int = |v: &[i64], alpha: usize| -> i64 {
            let mut num = Rat::zero();
            for (a, row) in v.iter().zip(&gram_sr) {
                if *a != 0 {
                    num += rint(*a) * &row[alpha];
                }
            }
            let den = &gram_sr[alpha][alpha];
            let p = rint(2) * num / den;
            assert!(p.denom().is_one(), "non-integral root pairing");
            let n = p.numer();
            i64::try_from(n.clone()).expect("pairing overflow")
        };
        let mut roots_sr: Vec<Vec<i64>> = Vec::new();
        let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut queue: Vec<Vec<i64>> = Vec::new();
        for s in &simples_sr {
            for v in [s.clone(), s.iter().map(|x| -x).collect()] {
                if seen.insert(v.clone(), ()).is_none() {
                    queue.push(v.clone());
                    roots_sr.push(v);
                }
            }
        }
        while let Some(r) = queue.pop() {
            for i in 0..rank_ss {
                let c = pair_int(&r, i);
                if c == 0 {
                    continue;
                }
                let mut img = r.clone();
                img[i] -= c;
                if seen.insert(img.clone(), ()).is_none() {
                    queue.push(img.clone());
                    roots_sr.push(img);
                }
            }
        }

        // Convert to fundamental-weight coordinates and sort.
        let to_fw = |v: &[i64]| -> Vec<i64> {
            (0..rank_ss)
                .map(|j| {
                    let mut s = Rat::zero();
                    for (a, &va) in v.iter().enumerate() {
                        if va != 0 {
                            s += &cart[j][a] * rint(va);
                        }
                    }
                    assert!(s.denom().is_one());
                    i64::try_from(s.numer().clone()).expect("coordinate overflow")
                })
                .collect()
        };
        let mut roots: Vec<Vec<i64>> = roots_sr.iter().map(|v| to_fw(v)).collect();
        roots.sort();

        // Gram matrix on fundamental-weight coordinates: conjugate by the
        // basis change, then extend by the identity on the center.
        let cart_inv = linalg::inverse(&cart).expect("Cartan matrix invertible");
        let gram_ss_fw = linalg::mat_mul(
            &linalg::mat_mul(&linalg::transpose(&cart_inv), &gram_sr),
            &cart_inv,
        );
        let mut gram = linalg::identity(rank);
        for i in 0..rank_ss {
            for j in 0..rank_ss {
                gram[i][j] = gram_ss_fw[i][j].clone();
            }
        }
        let simples: Vec<Vec<i64>> = simples_sr.iter().map(|v| to_fw(v)).collect();
        let expected_roots: usize = factors.iter().map(Series::root_count).sum();
        assert_eq!(roots.len(), expected_roots, "root closure count mismatch");
        let root_index: HashMap<Vec<i64>, usize> =
            roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let simple_positions: Vec<usize> = simples.iter().map(|s| root_index[s]).collect();

        let mut datum = RootDatum {
            factors: factors.to_vec(),
            center_rank,
            rank_ss,
            roots,
            root_index,
            gram,
            weyl: WeylGroup { elements: Vec::new(), by_perm: HashMap::new() },
            simple_positions,
        };
        datum.weyl = datum.enumerate_weyl()?;
        assert_eq!(datum.weyl.order(), expected_weyl, "Weyl order mismatch");
        Ok(datum)
    }

    fn enumerate_weyl(&self) -> Result<WeylGroup, RootDataError> {
        let rank = self.rank();
        let nroots = self.roots.len();
        let id = WeylElem {
            form_mat: linalg::identity(rank),
            point_mat: linalg::identity(rank),
            root_perm: (0..nroots).collect(),
            length: 0,
        };
        // Simple reflection data: form matrices and root permutations.
        let gens: Vec<(RMat, RMat, Vec<usize>)> = self
            .simple_positions
            .iter()
            .map(|&si| {
                let fm = self.reflection_form_mat(si);
                let pm = self.reflection_point_mat(si);
                let perm: Vec<usize> = (0..nroots)
                    .map(|j| self.reflect_root_index(si, j))
                    .collect();
                (fm, pm, perm)
            })
            .collect();

        let mut elements = vec![id];
        let mut by_perm = HashMap::new();
        by_perm.insert(elements[0].root_perm.clone(), 0usize);
        let mut frontier = vec![0usize];
        while let Some(next) = {
            let mut new_frontier = Vec::new();
            for &wi in &frontier {
                for (fm, pm, perm) in &gens {
                    // Compose: s * w (apply w first, then the reflection).
                    let p: Vec<usize> =
                        elements[wi].root_perm.iter().map(|&k| perm[k]).collect();
                    if by_perm.contains_key(&p) {
                        continue;
                    }
                    if elements.len() >= MAX_WEYL_ORDER {
                        return Err(RootDataError::WeylTooLarge);
                    }
                    let e = WeylElem {
                        form_mat: linalg::mat_mul(fm, &elements[wi].form_mat),
                        point_mat: linalg::mat_mul(pm, &elements[wi].point_mat),
                        root_perm: p.clone(),
                        length: elements[wi].length + 1,
                    };
                    by_perm.insert(p, elements.len());
                    new_frontier.push(elements.len());
                    elements.push(e);
                }
            }
            if new_frontier.is_empty() {
                None
            } else {
                Some(new_frontier)
            }
        } {
            frontier = next;
        }
        Ok(WeylGroup { elements, by_perm })
    }

    /// Total rank (semisimple plus center).
    #[must_use]
    pub fn rank(&self) -> usize {
        self.rank_ss + self.center_rank
    }

    /// Semisimple rank.
    #[must_use]
    pub fn rank_ss(&self) -> usize {
        self.rank_ss
    }

    /// Central rank.
    #[must_use]
    pub fn center_rank(&self) -> usize {
        self.center_rank
    }

    /// The factor list.
    #[must_use]
    pub fn factors(&self) -> &[Series] {
        &self.factors
    }

    /// All roots, in fundamental-weight coordinates, sorted lexicographically.
    #[must_use]
    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    /// Number of roots.
    #[must_use]
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    /// Root as a full-rank rational functional (center coordinates zero).
    #[must_use]
    pub fn root_functional(&self, idx: usize) -> RVec {
        let mut v = linalg::zeros(self.rank());
        for (i, &c) in self.roots[idx].iter().enumerate() {
            v[i] = rint(c);
        }
        v
    }

    /// Index of a root given in fundamental-weight coordinates.
    #[must_use]
    pub fn find_root(&self, coords: &[i64]) -> Option<usize> {
        self.root_index.get(coords).copied()
    }

    /// Index of the negative of a root.
    #[must_use]
    pub fn neg_index(&self, idx: usize) -> usize {
        let neg: Vec<i64> = self.roots[idx].iter().map(|x| -x).collect();
        self.root_index[&neg]
    }

    /// Indices of the simple roots, one block per factor in order.
    #[must_use]
    pub fn simple_indices(&self) -> &[usize] {
        &self.simple_positions
    }

    /// Invariant form on functionals.
    #[must_use]
    pub fn form_inner(&self, a: &[Rat], b: &[Rat]) -> Rat {
        linalg::dot(a, &linalg::mat_vec(&self.gram, b))
    }

    /// Matrix of the invariant form on functionals.
    #[must_use]
    pub fn gram_matrix(&self) -> &RMat {
        &self.gram
    }

    /// Squared length of a root.
    #[must_use]
    pub fn root_length2(&self, idx: usize) -> Rat {
        let r = self.root_functional(idx);
        self.form_inner(&r, &r)
    }

    /// Coroot pairing `<v, H_alpha> = 2 (v, alpha) / (alpha, alpha)` for a
    /// functional `v`.
    #[must_use]
    pub fn pairing(&self, v: &[Rat], root_idx: usize) -> Rat {
        let alpha = self.root_functional(root_idx);
        rint(2) * self.form_inner(v, &alpha) / self.form_inner(&alpha, &alpha)
    }

    /// Coroot `H_alpha` in point coordinates: evaluating any functional `v`
    /// on it (plain dot product) gives `pairing(v, alpha)`.
    #[must_use]
    pub fn coroot_point(&self, root_idx: usize) -> RVec {
        let alpha = self.root_functional(root_idx);
        let len2 = self.form_inner(&alpha, &alpha);
        let two_over = rint(2) / len2;
        linalg::scale(&two_over, &linalg::mat_vec(&self.gram, &alpha))
    }

    /// Reflection in `alpha` acting on functionals.
    #[must_use]
    pub fn reflection_form_mat(&self, root_idx: usize) -> RMat {
        let rank = self.rank();
        let alpha = self.root_functional(root_idx);
        let mut m = linalg::identity(rank);
        for b in 0..rank {
            let mut e = linalg::zeros(rank);
            e[b] = Rat::one();
            let c = self.pairing(&e, root_idx);
            if !c.is_zero() {
                for a in 0..rank {
                    let delta = &c * &alpha[a];
                    m[a][b] -= delta;
                }
            }
        }
        m
    }

    /// Reflection in `alpha` acting on points (contragredient action).
    #[must_use]
    pub fn reflection_point_mat(&self, root_idx: usize) -> RMat {
        linalg::transpose(&self.reflection_form_mat(root_idx))
    }

    /// Image index of root `j` under the reflection in root `si`.
    #[must_use]
    pub fn reflect_root_index(&self, si: usize, j: usize) -> usize {
        let c = {
            let v = self.root_functional(j);
            self.pairing(&v, si)
        };
        assert!(c.denom().is_one());
        let c: i64 = i64::try_from(c.numer().clone()).expect("pairing overflow");
        let mut img = self.roots[j].clone();
        let alpha = &self.roots[si];
        for (a, &ai) in img.iter_mut().zip(alpha) {
            *a -= c * ai;
        }
        self.root_index[&img]
    }

    /// The fully enumerated Weyl group.
    #[must_use]
    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    /// Half the sum of the given roots (as functional indices).
    #[must_use]
    pub fn half_sum(&self, idxs: &[usize]) -> RVec {
        let mut v = linalg::zeros(self.rank());
        for &i in idxs {
            v = linalg::add(&v, &self.root_functional(i));
        }
        linalg::scale(&rat(1, 2), &v)
    }

    /// Weyl element index whose root permutation is the reflection in `root_idx`.
    #[must_use]
    pub fn reflection_weyl_index(&self, root_idx: usize) -> usize {
        let perm: Vec<usize> = (0..self.num_roots())
            .map(|j| self.reflect_root_index(root_idx, j))
            .collect();
        self.weyl
            .find_by_perm(&perm)
            .expect("root reflection is a Weyl element")
    }
}
