//! Real-form catalog: Cartan frames with root labels and conjugation data,
//! kernel lattices for integrality, component-group action, Cayley
//! transforms, and real Weyl groups.
//!
//! The catalog is a hand-audited list of group models. Each frame stores the
//! conjugation's action on roots (`sigma`), a label per root (real, imaginary
//! compact, imaginary noncompact, or complex with its conjugate partner), and
//! the kernel lattice of the exponential on the frame's compact torus, which
//! encodes the global group (e.g. sl2R vs psl2R) and cannot be recovered from
//! the root datum. Central directions are hyperbolic by convention (sigma
//! acts as +1 on them).

use crate::linalg::{self, RMat, RVec};
use crate::rat::{parse_rat, rint, Rat};
use crate::rootdata::{RootDataError, RootDatum, Series};
use num_traits::{One, Zero};
use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;
use thiserror::Error;

/// Label of a root relative to a Cartan frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootLabel {
    Real,
    ImaginaryCompact,
    ImaginaryNoncompact,
    /// Complex root; the payload is the index of its conjugate.
    Complex(usize),
}

impl RootLabel {
    /// True for either imaginary label.
    #[must_use]
    pub fn is_imaginary(&self) -> bool {
        matches!(self, RootLabel::ImaginaryCompact | RootLabel::ImaginaryNoncompact)
    }

    /// Catalog token for the label.
    #[must_use]
    pub fn token(&self) -> String {
        match self {
            RootLabel::Real => "r".into(),
            RootLabel::ImaginaryCompact => "ic".into(),
            RootLabel::ImaginaryNoncompact => "in".into(),
            RootLabel::Complex(p) => format!("c{}", p + 1),
        }
    }
}

/// Errors from catalog loading.
#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog parse error at {0}")]
    ParseError(String),
    #[error("inconsistent frame data: {0}")]
    InconsistentFrame(String),
    #[error(transparent)]
    Datum(#[from] RootDataError),
}

/// Errors from frame-level operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RealFormError {
    #[error("index does not name a root")]
    NotARoot,
    #[error("operation requires a different root label")]
    WrongLabel,
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("unknown frame `{0}`")]
    UnknownFrame(String),
}

/// A component-group generator as it acts on one frame.
#[derive(Debug, Clone)]
pub struct FrameAuto {
    pub name: String,
    /// Image root index per root index.
    pub root_perm: Vec<usize>,
    /// Action on functionals (identity on the center).
    pub form_mat: RMat,
    /// Action on points.
    pub point_mat: RMat,
    /// Catalog frame the data of this frame is carried to.
    pub image_frame: usize,
}

/// One conjugacy class of Cartan subalgebras with its real-form data.
#[derive(Debug, Clone)]
pub struct CartanFrame {
    pub name: String,
    pub labels: Vec<RootLabel>,
    /// Conjugation acting on root indices.
    pub sigma_perm: Vec<usize>,
    /// Conjugation acting on functionals.
    pub sigma_form: RMat,
    /// Conjugation acting on points.
    pub sigma_point: RMat,
    /// Dimension of the compact part t of the Cartan.
    pub dim_t: usize,
    /// Dimension of the split part a.
    pub dim_a: usize,
    /// Generators of the kernel of exp on the compact torus, as points
    /// (integrality of a parameter means these pair integrally with
    /// lambda + rho).
    pub kernel_rows: Vec<RVec>,
    pub fundamental: bool,
    pub split: bool,
    /// Component-group generators as they act on this frame.
    pub autos: Vec<FrameAuto>,
    /// (noncompact imaginary root, image frame) pairs under Cayley transform.
    pub cayley_neighbors: Vec<(usize, usize)>,
}

/// A nontrivial central element reachable as exp of the frame's compact
/// torus, recorded by its angle vector (point coordinates divided by i*pi).
#[derive(Debug, Clone)]
pub struct CenterElement {
    pub frame: usize,
    pub angles: RVec,
}

/// One catalog group: datum, frames, component data.
#[derive(Debug)]
pub struct RealGroup {
    pub name: String,
    pub datum: RootDatum,
    pub frames: Vec<CartanFrame>,
    pub connected: bool,
    pub center_elements: Vec<CenterElement>,
}

/// The loaded catalog.
#[derive(Debug)]
pub struct Catalog {
    pub groups: Vec<RealGroup>,
}

/// Basic Cartan-frame facts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameProperties {
    pub fundamental: bool,
    pub split: bool,
    pub no_imaginary: bool,
}

impl RealGroup {
    /// Frame lookup by name.
    #[must_use]
    pub fn frame_named(&self, name: &str) -> Option<usize> {
        self.frames.iter().position(|f| f.name == name)
    }

    /// Index of the fundamental frame.
    #[must_use]
    pub fn fundamental_frame(&self) -> usize {
        self.frames.iter().position(|f| f.fundamental).expect("validated at load")
    }

    /// Stored label of a root in a frame.
    pub fn classify_root(&self, frame: usize, root: usize) -> Result<RootLabel, RealFormError> {
        let f = self.frames.get(frame).ok_or(RealFormError::NotARoot)?;
        f.labels.get(root).copied().ok_or(RealFormError::NotARoot)
    }

    /// Cayley transform through a noncompact imaginary root: the catalog
    /// frame reached by making that root real.
    pub fn cayley_transform(&self, frame: usize, root: usize) -> Result<usize, RealFormError> {
        let f = self.frames.get(frame).ok_or(RealFormError::NotARoot)?;
        if root >= f.labels.len() {
            return Err(RealFormError::NotARoot);
        }
        if f.labels[root] != RootLabel::ImaginaryNoncompact {
            return Err(RealFormError::WrongLabel);
        }
        f.cayley_neighbors
            .iter()
            .find(|(r, _)| *r == root)
            .map(|&(_, g)| g)
            .ok_or(RealFormError::WrongLabel)
    }

    /// Fundamental / split / no-imaginary flags of a frame.
    #[must_use]
    pub fn frame_properties(&self, frame: usize) -> FrameProperties {
        let f = &self.frames[frame];
        FrameProperties {
            fundamental: f.fundamental,
            split: f.split,
            no_imaginary: !f.labels.iter().any(RootLabel::is_imaginary),
        }
    }
}

impl Catalog {
    /// The built-in catalog (parsed once).
    #[must_use]
    pub fn builtin() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| {
            Catalog::parse(include_str!("catalog.txt")).expect("built-in catalog is valid")
        })
    }

    /// Group lookup by name.
    #[must_use]
    pub fn group(&self, name: &str) -> Option<&RealGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Parses a catalog document.
    pub fn parse(text: &str) -> Result<Catalog, CatalogError> {
        let raw = parse_sections(text)?;
        let mut groups = Vec::new();
        for rg in raw {
            groups.push(build_group(rg)?);
        }
        if groups.is_empty() {
            return Err(CatalogError::ParseError("document defines no groups".into()));
        }
        Ok(Catalog { groups })
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct RawAuto {
    name: String,
    perm_tokens: Vec<String>,
    line: usize,
}

struct RawFrame {
    name: String,
    labels: Vec<String>,
    sigma: Vec<String>,
    kernel: String,
    autos: Vec<RawAuto>,
}

struct RawGroup {
    name: String,
    factors: Vec<String>,
    center_rank: usize,
    connected: bool,
    frames: Vec<RawFrame>,
}

const VERSION_LINE: &str = "# orbitlab-catalog-v1";

fn parse_sections(text: &str) -> Result<Vec<RawGroup>, CatalogError> {
    let err = |line: usize, msg: &str| {
        CatalogError::ParseError(format!("line {line}: {msg}"))
    };
    let mut versioned = false;
    let mut groups: Vec<RawGroup> = Vec::new();
    // (section kind, fields, start line)
    let mut current: Option<(String, HashMap<String, String>, usize)> = None;

    let flush = |sec: Option<(String, HashMap<String, String>, usize)>,
                 groups: &mut Vec<RawGroup>|
     -> Result<(), CatalogError> {
        let Some((kind, mut fields, line)) = sec else {
            return Ok(());
        };
        let take = |fields: &mut HashMap<String, String>, key: &str| -> Option<String> {
            fields.remove(key)
        };
        let require = |fields: &mut HashMap<String, String>,
                       key: &str|
         -> Result<String, CatalogError> {
            fields
                .remove(key)
                .ok_or_else(|| err(line, &format!("[{kind}] missing field `{key}`")))
        };
        match kind.as_str() {
            "group" => {
                let name = require(&mut fields, "name")?;
                let factors = require(&mut fields, "factors")?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                let center_rank: usize = require(&mut fields, "center_rank")?
                    .parse()
                    .map_err(|_| err(line, "center_rank must be a nonnegative integer"))?;
                let connected = match require(&mut fields, "connected")?.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(err(line, "connected must be true or false")),
                };
                if let Some(k) = fields.keys().next() {
                    return Err(err(line, &format!("unknown field `{k}` in [group]")));
                }
                groups.push(RawGroup {
                    name,
                    factors,
                    center_rank,
                    connected,
                    frames: Vec::new(),
                });
            }
            "frame" => {
                let group = groups
                    .last_mut()
                    .ok_or_else(|| err(line, "[frame] before any [group]"))?;
                let name = require(&mut fields, "name")?;
                let labels = require(&mut fields, "labels")?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                let sigma = require(&mut fields, "sigma")?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                let kernel = take(&mut fields, "kernel_lattice").unwrap_or_default();
                if let Some(k) = fields.keys().next() {
                    return Err(err(line, &format!("unknown field `{k}` in [frame]")));
                }
                group.frames.push(RawFrame { name, labels, sigma, kernel, autos: Vec::new() });
            }
            "automorphism" => {
                let group = groups
                    .last_mut()
                    .ok_or_else(|| err(line, "[automorphism] before any [group]"))?;
                let frame = group
                    .frames
                    .last_mut()
                    .ok_or_else(|| err(line, "[automorphism] before any [frame]"))?;
                let name = require(&mut fields, "name")?;
                let perm_tokens = require(&mut fields, "automorphisms")?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                if let Some(k) = fields.keys().next() {
                    return Err(err(line, &format!("unknown field `{k}` in [automorphism]")));
                }
                frame.autos.push(RawAuto { name, perm_tokens, line });
            }
            other => return Err(err(line, &format!("unknown section `[{other}]`"))),
        }
        Ok(())
    };

    for (i, rawline) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = rawline.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if !versioned {
                if line != VERSION_LINE {
                    return Err(err(lineno, "first line must be the catalog version header"));
                }
                versioned = true;
            }
            continue;
        }
        if !versioned {
            return Err(err(lineno, "missing catalog version header"));
        }
        if let Some(section) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            flush(current.take(), &mut groups)?;
            current = Some((section.trim().to_string(), HashMap::new(), lineno));
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, "expected `key = value`"));
        };
        let Some((_, fields, _)) = current.as_mut() else {
            return Err(err(lineno, "field outside any section"));
        };
        let key = key.trim().to_string();
        if fields.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(err(lineno, &format!("duplicate field `{key}`")));
        }
    }
    flush(current.take(), &mut groups)?;
    if !versioned {
        return Err(CatalogError::ParseError("empty document".into()));
    }
    Ok(groups)
}

// ---------------------------------------------------------------------------
// Construction and validation
// ---------------------------------------------------------------------------

/// Resolves a signed 1-based root token against the datum.
fn resolve_signed_root(datum: &RootDatum, tok: &str, ctx: &str) -> Result<usize, CatalogError> {
    let bad = || CatalogError::InconsistentFrame(format!("{ctx}: bad root token `{tok}`"));
    let v: i64 = tok.parse().map_err(|_| bad())?;
    if v == 0 {
        return Err(bad());
    }
    let idx = usize::try_from(v.unsigned_abs()).unwrap() - 1;
    if idx >= datum.num_roots() {
        return Err(bad());
    }
    Ok(if v > 0 { idx } else { datum.neg_index(idx) })
}

/// Fits the linear map sending each root to its image under a permutation;
/// identity on the center. Errors if the permutation is not linear.
fn fit_linear_map(datum: &RootDatum, perm: &[usize], ctx: &str) -> Result<(RMat, RMat), CatalogError> {
    let bad = |msg: &str| CatalogError::InconsistentFrame(format!("{ctx}: {msg}"));
    let rank = datum.rank();
    let nss = datum.rank_ss();
    // Solve M * alpha_i = perm(alpha_i) on the semisimple block.
    let mut r_cols: RMat = vec![vec![Rat::zero(); nss]; nss];
    let mut s_cols: RMat = vec![vec![Rat::zero(); nss]; nss];
    for (k, &si) in datum.simple_indices().iter().enumerate() {
        let a = datum.root_functional(si);
        let b = datum.root_functional(perm[si]);
        for j in 0..nss {
            r_cols[j][k] = a[j].clone();
            s_cols[j][k] = b[j].clone();
        }
    }
    let r_inv = linalg::inverse(&r_cols).ok_or_else(|| bad("simple roots degenerate"))?;
    let m_ss = linalg::mat_mul(&s_cols, &r_inv);
    let mut form = linalg::identity(rank);
    for i in 0..nss {
        for j in 0..nss {
            form[i][j] = m_ss[i][j].clone();
        }
    }
    // Verify every root maps as the permutation says.
    for (i, &target) in perm.iter().enumerate() {
        let img = linalg::mat_vec(&form, &datum.root_functional(i));
        if img != datum.root_functional(target) {
            return Err(bad("root permutation is not induced by a linear map"));
        }
    }
    let inv = linalg::inverse(&form).ok_or_else(|| bad("singular root map"))?;
    let point = linalg::transpose(&inv);
    Ok((form, point))
}

fn parse_label_tokens(
    datum: &RootDatum,
    tokens: &[String],
    ctx: &str,
) -> Result<Vec<RootLabel>, CatalogError> {
    let bad = |msg: String| CatalogError::InconsistentFrame(format!("{ctx}: {msg}"));
    if tokens.len() != datum.num_roots() {
        return Err(bad(format!(
            "expected {} labels, found {}",
            datum.num_roots(),
            tokens.len()
        )));
    }
    tokens
        .iter()
        .map(|t| match t.as_str() {
            "r" => Ok(RootLabel::Real),
            "ic" => Ok(RootLabel::ImaginaryCompact),
            "in" => Ok(RootLabel::ImaginaryNoncompact),
            other => {
                let idx: usize = other
                    .strip_prefix('c')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(format!("bad label token `{other}`")))?;
                if idx == 0 || idx > datum.num_roots() {
                    return Err(bad(format!("label partner out of range in `{other}`")));
                }
                Ok(RootLabel::Complex(idx - 1))
            }
        })
        .collect()
}

fn build_group(raw: RawGroup) -> Result<RealGroup, CatalogError> {
    let bad = |msg: String| CatalogError::InconsistentFrame(format!("{}: {}", raw.name, msg));
    let factors: Vec<Series> = raw
        .factors
        .iter()
        .map(|s| Series::parse(s))
        .collect::<Result<_, _>>()?;
    let datum = RootDatum::build(&factors, raw.center_rank)?;
    let rank = datum.rank();
    let nroots = datum.num_roots();

    // First pass: per-frame data without cross-frame references.
    let mut frames: Vec<CartanFrame> = Vec::new();
    for rf in &raw.frames {
        let ctx = format!("{}/{}", raw.name, rf.name);
        let fbad = |msg: String| CatalogError::InconsistentFrame(format!("{ctx}: {msg}"));

        if rf.sigma.len() != nroots {
            return Err(fbad(format!("expected {} sigma entries, found {}", nroots, rf.sigma.len())));
        }
        let sigma_perm: Vec<usize> = rf
            .sigma
            .iter()
            .map(|t| resolve_signed_root(&datum, t, &ctx))
            .collect::<Result<_, _>>()?;
        {
            let mut seen = vec![false; nroots];
            for &p in &sigma_perm {
                if seen[p] {
                    return Err(fbad("sigma is not a permutation".into()));
                }
                seen[p] = true;
            }
            for i in 0..nroots {
                if sigma_perm[sigma_perm[i]] != i {
                    return Err(fbad("sigma is not an involution".into()));
                }
            }
        }
        let (sigma_form, sigma_point) = fit_linear_map(&datum, &sigma_perm, &ctx)?;
        // sigma preserves the invariant form.
        {
            let g = datum.gram_matrix();
            let lhs =
                linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&sigma_form), g), &sigma_form);
            if !linalg::mat_eq(&lhs, g) {
                return Err(fbad("sigma does not preserve the invariant form".into()));
            }
        }

        let labels = parse_label_tokens(&datum, &rf.labels, &ctx)?;
        for i in 0..nroots {
            let ok = match labels[i] {
                RootLabel::Real => sigma_perm[i] == i,
                RootLabel::ImaginaryCompact | RootLabel::ImaginaryNoncompact => {
                    sigma_perm[i] == datum.neg_index(i)
                }
                RootLabel::Complex(p) => {
                    sigma_perm[i] == p
                        && p != i
                        && p != datum.neg_index(i)
                        && labels[p] == RootLabel::Complex(i)
                }
            };
            if !ok {
                return Err(fbad(format!("label of root {i} inconsistent with sigma")));
            }
        }

        // t is the (-1)-eigenspace of sigma on points.
        let trace: Rat = (0..rank).map(|i| sigma_form[i][i].clone()).sum();
        let tr: i64 = if trace.denom().is_one() {
            i64::try_from(trace.numer().clone()).unwrap()
        } else {
            return Err(fbad("sigma trace not integral".into()));
        };
        let rank_i = i64::try_from(rank).unwrap();
        if (rank_i - tr) % 2 != 0 {
            return Err(fbad("sigma trace parity".into()));
        }
        let dim_t = usize::try_from((rank_i - tr) / 2).unwrap();
        let dim_a = rank - dim_t;

        // Kernel rows: dim_t of them, independent, inside t.
        let kernel_rows: Vec<RVec> = if rf.kernel.trim().is_empty() {
            Vec::new()
        } else {
            rf.kernel
                .split(';')
                .map(|row| {
                    let entries: Result<RVec, _> =
                        row.split_whitespace().map(parse_rat).collect();
                    let v = entries
                        .map_err(|e| fbad(format!("kernel lattice: {e}")))?;
                    if v.len() != rank {
                        return Err(fbad("kernel row has wrong length".into()));
                    }
                    Ok(v)
                })
                .collect::<Result<_, _>>()?
        };
        if kernel_rows.len() != dim_t {
            return Err(fbad(format!(
                "kernel lattice must have {} rows, found {}",
                dim_t,
                kernel_rows.len()
            )));
        }
        if linalg::rank(&kernel_rows) != kernel_rows.len() {
            return Err(fbad("kernel lattice rows dependent".into()));
        }
        for z in &kernel_rows {
            let img = linalg::mat_vec(&sigma_point, z);
            if img != linalg::neg(z) {
                return Err(fbad("kernel row not in the compact part".into()));
            }
        }

        let fundamental = !labels.contains(&RootLabel::Real);
        frames.push(CartanFrame {
            name: rf.name.clone(),
            labels,
            sigma_perm,
            sigma_form,
            sigma_point,
            dim_t,
            dim_a,
            kernel_rows,
            fundamental,
            split: false,
            autos: Vec::new(),
            cayley_neighbors: Vec::new(),
        });
    }

    if frames.is_empty() {
        return Err(bad("group has no frames".into()));
    }
    {
        let fund = frames.iter().filter(|f| f.fundamental).count();
        if fund != 1 {
            return Err(bad(format!("expected exactly one fundamental frame, found {fund}")));
        }
        let min_t = frames.iter().map(|f| f.dim_t).min().unwrap();
        let mins = frames.iter().filter(|f| f.dim_t == min_t).count();
        if mins != 1 {
            return Err(bad("maximally split frame not unique".into()));
        }
        for f in &mut frames {
            f.split = f.dim_t == min_t;
        }
    }

    // Second pass: automorphisms (need all frames for image matching).
    let mut auto_names: Vec<HashSet<String>> = Vec::new();
    let mut autos_per_frame: Vec<Vec<FrameAuto>> = Vec::new();
    for (fi, rf) in raw.frames.iter().enumerate() {
        let ctx = format!("{}/{}", raw.name, rf.name);
        let fbad = |msg: String| CatalogError::InconsistentFrame(format!("{ctx}: {msg}"));
        let mut list = Vec::new();
        let mut names = HashSet::new();
        for ra in &rf.autos {
            if ra.perm_tokens.len() != nroots {
                return Err(fbad("automorphism permutation has wrong length".into()));
            }
            let perm: Vec<usize> = ra
                .perm_tokens
                .iter()
                .map(|t| resolve_signed_root(&datum, t, &ctx))
                .collect::<Result<_, _>>()?;
            let (form_mat, point_mat) = fit_linear_map(&datum, &perm, &ctx)?;
            // Transport this frame's data and find the catalog frame it lands on.
            let mut inv = vec![0usize; nroots];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            let src = &frames[fi];
            let sigma_img: Vec<usize> = (0..nroots).map(|i| perm[src.sigma_perm[inv[i]]]).collect();
            let labels_img: Vec<RootLabel> = {
                let mut l = vec![RootLabel::Real; nroots];
                for i in 0..nroots {
                    l[perm[i]] = match src.labels[i] {
                        RootLabel::Complex(q) => RootLabel::Complex(perm[q]),
                        other => other,
                    };
                }
                l
            };
            let image_frame = frames
                .iter()
                .position(|g| g.sigma_perm == sigma_img && g.labels == labels_img)
                .ok_or_else(|| {
                    fbad(format!(
                        "automorphism `{}` (line {}) does not carry the frame to a catalog frame",
                        ra.name, ra.line
                    ))
                })?;
            names.insert(ra.name.clone());
            list.push(FrameAuto { name: ra.name.clone(), root_perm: perm, form_mat, point_mat, image_frame });
        }
        auto_names.push(names);
        autos_per_frame.push(list);
    }
    if let Some(first) = auto_names.first() {
        if !auto_names.iter().all(|s| s == first) {
            return Err(bad("automorphism names differ between frames".into()));
        }
        if raw.connected != first.is_empty() {
            return Err(bad("connected flag inconsistent with automorphism list".into()));
        }
    }
    for (f, a) in frames.iter_mut().zip(autos_per_frame) {
        f.autos = a;
    }

    // Third pass: Cayley neighbors. Frames list Cartan classes under the
    // identity component, so witnesses for matching the transformed
    // conjugation pattern range over the complex Weyl group only (component
    // generators would wrongly merge frames that are swapped by an outer
    // automorphism).
    let candidates: Vec<Vec<usize>> = datum
        .weyl()
        .elements
        .iter()
        .map(|e| e.root_perm.clone())
        .collect();
    for fi in 0..frames.len() {
        let mut neighbors = Vec::new();
        for r in 0..nroots {
            if frames[fi].labels[r] != RootLabel::ImaginaryNoncompact {
                continue;
            }
            let refl: Vec<usize> = (0..nroots).map(|j| datum.reflect_root_index(r, j)).collect();
            let sigma_new: Vec<usize> =
                (0..nroots).map(|i| refl[frames[fi].sigma_perm[i]]).collect();
            let mut matches: Vec<usize> = Vec::new();
            for u in &candidates {
                let mut uinv = vec![0usize; nroots];
                for (i, &p) in u.iter().enumerate() {
                    uinv[p] = i;
                }
                let conj: Vec<usize> = (0..nroots).map(|i| u[sigma_new[uinv[i]]]).collect();
                if let Some(g) = frames.iter().position(|fr| fr.sigma_perm == conj) {
                    matches.push(g);
                }
            }
            matches.sort_unstable();
            matches.dedup();
            let root_name = format!("root {r}");
            match matches.as_slice() {
                [g] => {
                    if frames[*g].dim_t + 1 != frames[fi].dim_t {
                        return Err(bad(format!(
                            "{}: Cayley image has wrong compact dimension",
                            root_name
                        )));
                    }
                    neighbors.push((r, *g));
                }
                [] => return Err(bad(format!("{root_name}: no Cayley image frame"))),
                _ => return Err(bad(format!("{root_name}: ambiguous Cayley image"))),
            }
        }
        frames[fi].cayley_neighbors = neighbors;
    }

    // Center elements from the kernel lattice: points x in the rational span
    // of twice the kernel rows whose pairing with every root is even, taken
    // modulo the lattice itself; nonzero representatives only.
    let mut center_elements = Vec::new();
    for (fi, f) in frames.iter().enumerate() {
        let b: Vec<RVec> = f.kernel_rows.iter().map(|z| linalg::scale(&rint(2), z)).collect();
        let k = b.len();
        let d: i64 = 12;
        let total = (d as usize).pow(u32::try_from(k).unwrap());
        for mut idx in 1..total {
            let mut x = linalg::zeros(rank);
            for bj in &b {
                let c = rint(idx as i64 % d) / rint(d);
                idx /= usize::try_from(d).unwrap();
                x = linalg::add(&x, &linalg::scale(&c, bj));
            }
            let central = (0..nroots).all(|r| {
                let v = linalg::dot(&datum.root_functional(r), &x);
                (v / rint(2)).denom().is_one()
            });
            if central && !linalg::is_zero(&x) {
                center_elements.push(CenterElement { frame: fi, angles: x });
            }
        }
    }

    Ok(RealGroup { name: raw.name, datum, frames, connected: raw.connected, center_elements })
}

// ---------------------------------------------------------------------------
// Real Weyl groups
// ---------------------------------------------------------------------------

/// An element of the real Weyl group W(G, h) of a frame.
#[derive(Debug, Clone)]
pub struct RealWeylElem {
    pub root_perm: Vec<usize>,
    pub form_mat: RMat,
    pub point_mat: RMat,
    /// True when the element is only realized in a non-identity component.
    pub outer: bool,
}

/// Hand-audited extra generators of real Weyl groups that are not products
/// of real/compact-imaginary reflections or component shifts. Each entry is
/// (group, frame, fundamental-weight coordinates of the reflecting root);
/// the realizing group elements were checked in matrix models offline.
const EXTRA_REAL_WEYL: &[(&str, &str, &[i64])] = &[("sl3R", "fundamental", &[1, 1])];

/// The real Weyl group of a frame: all root permutations realized by
/// normalizers of the Cartan inside the full group, with matrices.
#[must_use]
pub fn real_weyl(group: &RealGroup, frame_idx: usize) -> Vec<RealWeylElem> {
    let datum = &group.datum;
    let frame = &group.frames[frame_idx];
    let nroots = datum.num_roots();
    let mut gens: Vec<RealWeylElem> = Vec::new();
    let push_reflection = |root: usize, gens: &mut Vec<RealWeylElem>| {
        let perm: Vec<usize> = (0..nroots).map(|j| datum.reflect_root_index(root, j)).collect();
        let form_mat = datum.reflection_form_mat(root);
        let point_mat = datum.reflection_point_mat(root);
        gens.push(RealWeylElem { root_perm: perm, form_mat, point_mat, outer: false });
    };
    for (i, l) in frame.labels.iter().enumerate() {
        if matches!(l, RootLabel::Real | RootLabel::ImaginaryCompact) {
            push_reflection(i, &mut gens);
        }
    }
    for (g, f, coords) in EXTRA_REAL_WEYL {
        if *g == group.name && *f == frame.name {
            let idx = datum.find_root(coords).expect("extra generator root exists");
            push_reflection(idx, &mut gens);
        }
    }
    for a in &frame.autos {
        if a.image_frame == frame_idx {
            gens.push(RealWeylElem {
                root_perm: a.root_perm.clone(),
                form_mat: a.form_mat.clone(),
                point_mat: a.point_mat.clone(),
                outer: true,
            });
        }
    }

    let rank = datum.rank();
    let identity = RealWeylElem {
        root_perm: (0..nroots).collect(),
        form_mat: linalg::identity(rank),
        point_mat: linalg::identity(rank),
        outer: false,
    };
    let mut elements = vec![identity];
    let mut seen: HashSet<Vec<usize>> = elements.iter().map(|e| e.root_perm.clone()).collect();
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &ei in &frontier {
            for g in &gens {
                let perm: Vec<usize> =
                    elements[ei].root_perm.iter().map(|&k| g.root_perm[k]).collect();
                if seen.contains(&perm) {
                    continue;
                }
                let e = RealWeylElem {
                    form_mat: linalg::mat_mul(&g.form_mat, &elements[ei].form_mat),
                    point_mat: linalg::mat_mul(&g.point_mat, &elements[ei].point_mat),
                    root_perm: perm.clone(),
                    outer: g.outer ^ elements[ei].outer,
                };
                seen.insert(perm);
                next.push(elements.len());
                elements.push(e);
            }
        }
        frontier = next;
    }
    elements
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_loads() {
        let cat = Catalog::builtin();
        for name in ["su2", "sl2R", "psl2R", "gl2R", "sl3R", "sp4R", "su2xsu2_swap", "sl2Rsq_swap"]
        {
            assert!(cat.group(name).is_some(), "missing group {name}");
        }
        assert_eq!(cat.group("sl2R").unwrap().frames.len(), 2);
        assert_eq!(cat.group("sp4R").unwrap().frames.len(), 4);
    }

    #[test]
    fn empty_document_is_a_parse_error() {
        assert!(matches!(Catalog::parse(""), Err(CatalogError::ParseError(_))));
        assert!(matches!(
            Catalog::parse("# orbitlab-catalog-v1\n"),
            Err(CatalogError::ParseError(_))
        ));
    }

    #[test]
    fn unknown_field_rejected() {
        let doc = "# orbitlab-catalog-v1\n[group]\nname = su2\nfactors = A1\ncenter_rank = 0\nconnected = true\nextra = 1\n";
        assert!(matches!(Catalog::parse(doc), Err(CatalogError::ParseError(_))));
    }

    #[test]
    fn classification_examples() {
        let cat = Catalog::builtin();
        let sl2 = cat.group("sl2R").unwrap();
        let split = sl2.frame_named("split").unwrap();
        let compact = sl2.frame_named("compact").unwrap();
        assert_eq!(sl2.classify_root(split, 0).unwrap(), RootLabel::Real);
        assert_eq!(sl2.classify_root(compact, 1).unwrap(), RootLabel::ImaginaryNoncompact);
        let su2 = cat.group("su2").unwrap();
        assert_eq!(su2.classify_root(0, 0).unwrap(), RootLabel::ImaginaryCompact);
        assert_eq!(su2.classify_root(0, 99), Err(RealFormError::NotARoot));
    }

    #[test]
    fn cayley_examples() {
        let cat = Catalog::builtin();
        let sl2 = cat.group("sl2R").unwrap();
        let compact = sl2.frame_named("compact").unwrap();
        let split = sl2.frame_named("split").unwrap();
        assert_eq!(sl2.cayley_transform(compact, 1).unwrap(), split);

        let su2 = cat.group("su2").unwrap();
        assert_eq!(su2.cayley_transform(0, 0), Err(RealFormError::WrongLabel));
    }

    #[test]
    fn sp4r_cayley_graph() {
        let cat = Catalog::builtin();
        let sp = cat.group("sp4R").unwrap();
        let fund = sp.frame_named("fundamental").unwrap();
        let ishort = sp.frame_named("intermediate-short").unwrap();
        let ilong = sp.frame_named("intermediate-long").unwrap();
        let split = sp.frame_named("split").unwrap();
        // Short noncompact roots (the e1+e2 pair) lead to the short
        // intermediate frame, long ones to the long intermediate frame.
        let d = &sp.datum;
        let idx = |c: &[i64]| d.find_root(c).unwrap();
        assert_eq!(sp.cayley_transform(fund, idx(&[0, 1])).unwrap(), ishort);
        assert_eq!(sp.cayley_transform(fund, idx(&[0, -1])).unwrap(), ishort);
        assert_eq!(sp.cayley_transform(fund, idx(&[2, 0])).unwrap(), ilong);
        assert_eq!(sp.cayley_transform(fund, idx(&[2, -2])).unwrap(), ilong);
        // The long intermediate frame still has noncompact imaginary roots
        // and they lead to the split frame; the short one is a leaf.
        assert_eq!(sp.cayley_transform(ilong, idx(&[2, -2])).unwrap(), split);
        assert!(sp.frames[ishort]
            .labels
            .iter()
            .all(|l| *l != RootLabel::ImaginaryNoncompact));
        assert_eq!(sp.frames[ishort].dim_t, 1);
        assert_eq!(sp.frames[split].dim_t, 0);
    }

    #[test]
    fn cayley_closure_reaches_every_frame() {
        let cat = Catalog::builtin();
        for g in &cat.groups {
            let mut reached = vec![false; g.frames.len()];
            let mut stack = vec![g.fundamental_frame()];
            reached[g.fundamental_frame()] = true;
            while let Some(f) = stack.pop() {
                for &(_, img) in &g.frames[f].cayley_neighbors {
                    if !reached[img] {
                        reached[img] = true;
                        stack.push(img);
                    }
                }
            }
            assert!(
                reached.iter().all(|&b| b),
                "Cayley closure misses a frame of {}",
                g.name
            );
        }
    }

    #[test]
    fn real_weyl_orders_match_audit() {
        let cat = Catalog::builtin();
        let order = |g: &str, f: &str| {
            let grp = cat.group(g).unwrap();
            real_weyl(grp, grp.frame_named(f).unwrap()).len()
        };
        assert_eq!(order("su2", "compact"), 2);
        assert_eq!(order("sl2R", "compact"), 1);
        assert_eq!(order("sl2R", "split"), 2);
        assert_eq!(order("psl2R", "compact"), 1);
        assert_eq!(order("psl2R", "split"), 2);
        assert_eq!(order("gl2R", "compact"), 2);
        assert_eq!(order("gl2R", "split"), 2);
        assert_eq!(order("sl3R", "fundamental"), 2);
        assert_eq!(order("sl3R", "split"), 6);
        assert_eq!(order("sp4R", "fundamental"), 2);
        assert_eq!(order("sp4R", "intermediate-short"), 4);
        assert_eq!(order("sp4R", "intermediate-long"), 2);
        assert_eq!(order("sp4R", "split"), 8);
        assert_eq!(order("su2xsu2_swap", "compact"), 8);
        assert_eq!(order("sl2Rsq_swap", "cc"), 2);
        assert_eq!(order("sl2Rsq_swap", "cs"), 2);
        assert_eq!(order("sl2Rsq_swap", "sc"), 2);
        assert_eq!(order("sl2Rsq_swap", "ss"), 8);
    }

    #[test]
    fn center_element_counts() {
        let cat = Catalog::builtin();
        let count = |g: &str| cat.group(g).unwrap().center_elements.len();
        assert_eq!(count("su2"), 1);
        assert_eq!(count("sl2R"), 1);
        assert_eq!(count("psl2R"), 0);
        assert_eq!(count("gl2R"), 1);
        assert_eq!(count("sl3R"), 0);
        // -1 is visible on the fundamental frame (angles (1,2)) and again on
        // the short intermediate frame (angles (1,0)).
        assert_eq!(count("sp4R"), 2);
        assert_eq!(count("su2xsu2_swap"), 3);
        assert_eq!(count("sl2Rsq_swap"), 5);
    }

    #[test]
    fn component_action_preserves_labels() {
        let cat = Catalog::builtin();
        for g in &cat.groups {
            for (fi, f) in g.frames.iter().enumerate() {
                for a in &f.autos {
                    let img = &g.frames[a.image_frame];
                    for i in 0..g.datum.num_roots() {
                        let expected = match f.labels[i] {
                            RootLabel::Complex(q) => RootLabel::Complex(a.root_perm[q]),
                            other => other,
                        };
                        assert_eq!(img.labels[a.root_perm[i]], expected, "{}/{} auto {}", g.name, fi, a.name);
                    }
                }
            }
        }
    }

    #[test]
    fn frame_properties_examples() {
        let cat = Catalog::builtin();
        let su2 = cat.group("su2").unwrap();
        assert!(su2.frame_properties(0).fundamental);
        let sl2 = cat.group("sl2R").unwrap();
        let p = sl2.frame_properties(sl2.frame_named("split").unwrap());
        assert!(p.no_imaginary && !p.fundamental && p.split);
        let sl3 = cat.group("sl3R").unwrap();
        let fund = sl3.fundamental_frame();
        assert_eq!(sl3.frames[fund].dim_t, 1);
        assert!(!sl3.frames[fund].labels.contains(&RootLabel::Real));
    }
}
