//! Combinatorial 4-dimensional 2-handlebodies.
//!
//! 1-handles are dotted circles forming a 0-linked unlink. Each 2-handle
//! records the word of signed 1-handle indices read off as its attaching
//! circle crosses the belt spheres, its framing (the diagonal of the
//! linking matrix) and optionally a Legendrian front. Linking numbers
//! between 2-handles are input data; a word does not determine a knot.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::form::{algebraically_equivalent, DecoratedModule};
use crate::legendrian::FrontCounts;
use crate::linalg::{self, FgAbelianGroup, IntMatrix};

/// Attaching data of one 2-handle; the framing lives in the linking matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoHandle {
    pub word: Vec<i64>,
    pub front: Option<FrontCounts>,
}

impl TwoHandle {
    pub fn new(word: Vec<i64>) -> Self {
        Self { word, front: None }
    }

    pub fn with_front(word: Vec<i64>, front: FrontCounts) -> Self {
        Self {
            word,
            front: Some(front),
        }
    }
}

/// Kind of sum formed by [`boundary_sum`] or [`connected_sum_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumKind {
    Boundary,
    Connected,
}

/// Construction history carried along with a handlebody. Handle ids are
/// 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Cork { r: i64, s: i64, m: i64 },
    WMinus { target: usize, p: i64 },
    WPlus { target: usize, p: i64 },
    OneHandle,
    CancelingPairs { count: usize },
    SliceTwoHandles { count: usize },
    Sum(SumKind),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cork { r, s, m } => write!(f, "cork r={r} s={s} m={m}"),
            Self::WMinus { target, p } => write!(f, "wminus target={target} p={p}"),
            Self::WPlus { target, p } => write!(f, "wplus target={target} p={p}"),
            Self::OneHandle => write!(f, "one_handle"),
            Self::CancelingPairs { count } => write!(f, "canceling_pairs count={count}"),
            Self::SliceTwoHandles { count } => write!(f, "slice_two_handles count={count}"),
            Self::Sum(SumKind::Boundary) => write!(f, "boundary_sum"),
            Self::Sum(SumKind::Connected) => write!(f, "connected_sum"),
        }
    }
}

/// A 2-handlebody: `k` dotted circles and framed 2-handles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Handlebody2 {
    one_handles: usize,
    two_handles: Vec<TwoHandle>,
    linking: IntMatrix,
    tags: Vec<Tag>,
}

impl Handlebody2 {
    pub fn new(
        one_handles: usize,
        two_handles: Vec<TwoHandle>,
        linking: IntMatrix,
    ) -> Result<Self> {
        let n = two_handles.len();
        if linking.rows() != n || linking.cols() != n {
            return Err(Error::Dimension(format!(
                "linking matrix is {}x{} for {n} 2-handles",
                linking.rows(),
                linking.cols()
            )));
        }
        if !linking.is_symmetric() {
            return Err(Error::Invariant("linking matrix is not symmetric".into()));
        }
        for (i, h) in two_handles.iter().enumerate() {
            check_word(&h.word, one_handles).map_err(|e| match e {
                Error::InvalidIndex(msg) => {
                    Error::InvalidIndex(format!("2-handle {}: {msg}", i + 1))
                }
                other => other,
            })?;
        }
        Ok(Self {
            one_handles,
            two_handles,
            linking,
            tags: Vec::new(),
        })
    }

    /// The 4-ball: no handles besides the 0-handle.
    pub fn empty() -> Self {
        Self {
            one_handles: 0,
            two_handles: Vec::new(),
            linking: IntMatrix::zeros(0, 0),
            tags: Vec::new(),
        }
    }

    pub fn one_handles(&self) -> usize {
        self.one_handles
    }

    pub fn two_handles(&self) -> &[TwoHandle] {
        &self.two_handles
    }

    pub fn linking(&self) -> &IntMatrix {
        &self.linking
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    fn check_id(&self, id: usize) -> Result<()> {
        if id == 0 || id > self.two_handles.len() {
            return Err(Error::InvalidIndex(format!(
                "2-handle {id} does not exist (there are {})",
                self.two_handles.len()
            )));
        }
        Ok(())
    }

    /// Framing of 2-handle `id` (1-based). Panics on a bad id.
    pub fn framing(&self, id: usize) -> &BigInt {
        self.linking.get(id - 1, id - 1)
    }

    pub fn set_framing(&mut self, id: usize, framing: BigInt) -> Result<()> {
        self.check_id(id)?;
        self.linking.set(id - 1, id - 1, framing);
        Ok(())
    }

    pub fn set_front(&mut self, id: usize, front: Option<FrontCounts>) -> Result<()> {
        self.check_id(id)?;
        self.two_handles[id - 1].front = front;
        Ok(())
    }

    /// Sets the linking number of distinct 2-handles `i` and `j` symmetrically.
    pub fn set_linking(&mut self, i: usize, j: usize, value: BigInt) -> Result<()> {
        self.check_id(i)?;
        self.check_id(j)?;
        if i == j {
            return Err(Error::InvalidIndex(format!(
                "linking {i} {i} is a framing, not a linking number"
            )));
        }
        self.linking.set(i - 1, j - 1, value.clone());
        self.linking.set(j - 1, i - 1, value);
        Ok(())
    }

    pub fn push_tag(&mut self, tag: Tag) {
        self.tags.push(tag);
    }

    pub fn with_tags(mut self, tags: Vec<Tag>) -> Self {
        self.tags = tags;
        self
    }

    /// `k × n` matrix of exponent sums: entry `(i, j)` is the signed count
    /// of generator `i + 1` in the word of 2-handle `j + 1`.
    pub fn run_over_matrix(&self) -> IntMatrix {
        let mut a = IntMatrix::zeros(self.one_handles, self.two_handles.len());
        for (j, h) in self.two_handles.iter().enumerate() {
            for &letter in &h.word {
                let i = letter.unsigned_abs() as usize - 1;
                let v = a.get(i, j) + BigInt::from(letter.signum());
                a.set(i, j, v);
            }
        }
        a
    }

    /// `[[0, A], [Aᵀ, Λ]]`: a surgery presentation of the boundary with each
    /// dotted circle replaced by a 0-framed unknot.
    pub fn boundary_matrix(&self) -> IntMatrix {
        let a = self.run_over_matrix();
        let top = IntMatrix::zeros(self.one_handles, self.one_handles)
            .hstack(&a)
            .expect("row counts agree");
        let bottom = a
            .transpose()
            .hstack(&self.linking)
            .expect("row counts agree");
        top.vstack(&bottom).expect("column counts agree")
    }

    pub fn homology(&self) -> HomologyProfile {
        let a = self.run_over_matrix();
        let basis = linalg::kernel_basis(&a);
        HomologyProfile {
            h1: linalg::cokernel(&a),
            h2_rank: basis.cols(),
            intersection_form: self.linking.congruence(&basis),
            h2_basis: basis,
            boundary_h1: linalg::cokernel(&self.boundary_matrix()),
        }
    }

    fn with_extra_two_handle(&self, handle: TwoHandle) -> Self {
        let mut out = self.clone();
        out.two_handles.push(handle);
        out.linking = self.linking.block_diag(&IntMatrix::zeros(1, 1));
        out
    }
}

fn check_word(word: &[i64], one_handles: usize) -> Result<()> {
    for &letter in word {
        if letter == 0 || letter.unsigned_abs() as usize > one_handles {
            return Err(Error::InvalidIndex(format!(
                "letter {letter} does not name one of the {one_handles} 1-handles"
            )));
        }
    }
    Ok(())
}

/// Homology data of a 2-handlebody `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyProfile {
    pub h1: FgAbelianGroup,
    pub h2_rank: usize,
    /// Columns in `Z^n` spanning `H₂(X)` inside the 2-chains.
    pub h2_basis: IntMatrix,
    pub intersection_form: IntMatrix,
    pub boundary_h1: FgAbelianGroup,
}

impl HomologyProfile {
    /// `H₂(X)` as a free decorated module with an empty genus table.
    pub fn h2_module(&self) -> DecoratedModule {
        DecoratedModule::free(self.intersection_form.clone())
            .expect("intersection form is symmetric")
    }

    /// Boundary is a homology sphere.
    pub fn has_homology_sphere_boundary(&self) -> bool {
        self.boundary_h1.is_trivial()
    }
}

pub fn run_over_matrix(h: &Handlebody2) -> IntMatrix {
    h.run_over_matrix()
}

pub fn homology(h: &Handlebody2) -> HomologyProfile {
    h.homology()
}

/// Mazur-type contractible handlebody with one 1-handle and one 0-framed
/// 2-handle whose word is `x^(r+s) x^-s x^m x^-(r+m-1)` (exponent sum `+1`).
/// Only this algebraic pattern is realized; `(r, s, m)` is kept as a tag.
pub fn mazur_cork_template(r: i64, s: i64, m: i64) -> Result<Handlebody2> {
    if r < 1 || s < 1 || m < 1 {
        return Err(Error::InvalidValue(format!(
            "cork parameters must be positive, got r={r} s={s} m={m}"
        )));
    }
    let mut word = Vec::new();
    for (count, letter) in [(r + s, 1), (s, -1), (m, 1), (r + m - 1, -1)] {
        word.extend(std::iter::repeat_n(letter, count as usize));
    }
    let mut h = Handlebody2::new(1, vec![TwoHandle::new(word)], IntMatrix::zeros(1, 1))?;
    h.push_tag(Tag::Cork { r, s, m });
    Ok(h)
}

/// Adds a 1-handle `g` and a 0-framed 2-handle with word `(g)`, unlinked
/// from everything else. Returns the new generator index.
fn add_canceling_pair(h: &Handlebody2) -> (Handlebody2, i64) {
    let mut out = h.clone();
    out.one_handles += 1;
    let g = out.one_handles as i64;
    (out.with_extra_two_handle(TwoHandle::new(vec![g])), g)
}

fn w_modification(h: &Handlebody2, target: usize, p: i64) -> Result<(Handlebody2, i64)> {
    h.check_id(target)?;
    if p < 1 {
        return Err(Error::InvalidValue(format!(
            "W-modification coefficient {p} must be positive"
        )));
    }
    let (mut out, g) = add_canceling_pair(h);
    for _ in 0..p {
        out.two_handles[target - 1].word.extend([g, -g]);
    }
    Ok((out, g))
}

/// Adds a homotopically canceling 1-/2-handle pair and runs the target's
/// attaching circle `p` times over the new 1-handle and back. The target
/// framing and all homology are unchanged.
pub fn w_minus(h: &Handlebody2, target: usize, p: i64) -> Result<Handlebody2> {
    let (mut out, _) = w_modification(h, target, p)?;
    out.push_tag(Tag::WMinus { target, p });
    Ok(out)
}

/// Same handle structure as [`w_minus`]. If the target carries a front its
/// Thurston–Bennequin number rises by `p`, and the new 2-handle receives a
/// front with `tb = 2` and rotation 0.
pub fn w_plus(h: &Handlebody2, target: usize, p: i64) -> Result<Handlebody2> {
    let (mut out, _) = w_modification(h, target, p)?;
    if let Some(front) = out.two_handles[target - 1].front {
        out.two_handles[target - 1].front = Some(front.add_writhe(p));
        let new_id = out.two_handles.len();
        out.two_handles[new_id - 1].front = Some(FrontCounts::new(3, 1, 1, 1)?);
    }
    out.push_tag(Tag::WPlus { target, p });
    Ok(out)
}

/// Appends 0-framed 2-handles. `linkings` holds `(i, j, lk)` with 1-based
/// ids in the enlarged numbering; each pair must involve a new handle and
/// `i ≠ j`. With `slice_marked`, the attaching link is declared strongly
/// slice and the result is tagged accordingly.
pub fn attach_two_handles_zero_framed(
    h: &Handlebody2,
    words: &[Vec<i64>],
    linkings: &[(usize, usize, BigInt)],
    slice_marked: bool,
) -> Result<Handlebody2> {
    let old = h.two_handles.len();
    let mut out = h.clone();
    for w in words {
        check_word(w, h.one_handles)?;
        out = out.with_extra_two_handle(TwoHandle::new(w.clone()));
    }
    for (i, j, lk) in linkings {
        if *i <= old && *j <= old {
            return Err(Error::InvalidIndex(format!(
                "linking {i} {j} does not involve a new 2-handle"
            )));
        }
        out.set_linking(*i, *j, lk.clone())?;
    }
    if slice_marked {
        out.push_tag(Tag::SliceTwoHandles { count: words.len() });
    }
    Ok(out)
}

pub fn attach_one_handle(h: &Handlebody2) -> Handlebody2 {
    let mut out = h.clone();
    out.one_handles += 1;
    out.push_tag(Tag::OneHandle);
    out
}

pub fn attach_canceling_pairs(h: &Handlebody2, count: usize) -> Handlebody2 {
    let mut out = h.clone();
    for _ in 0..count {
        out = add_canceling_pair(&out).0;
    }
    out.push_tag(Tag::CancelingPairs { count });
    out
}

fn block_sum(h1: &Handlebody2, h2: &Handlebody2, kind: SumKind) -> Handlebody2 {
    let shift = h1.one_handles as i64;
    let n1 = h1.two_handles.len();
    let mut two_handles = h1.two_handles.clone();
    two_handles.extend(h2.two_handles.iter().map(|t| TwoHandle {
        word: t.word.iter().map(|&l| l + l.signum() * shift).collect(),
        front: t.front,
    }));
    let mut tags = h1.tags.clone();
    tags.extend(h2.tags.iter().map(|t| match t {
        Tag::WMinus { target, p } => Tag::WMinus {
            target: target + n1,
            p: *p,
        },
        Tag::WPlus { target, p } => Tag::WPlus {
            target: target + n1,
            p: *p,
        },
        other => other.clone(),
    }));
    tags.push(Tag::Sum(kind));
    Handlebody2 {
        one_handles: h1.one_handles + h2.one_handles,
        two_handles,
        linking: h1.linking.block_diag(&h2.linking),
        tags,
    }
}

/// Boundary sum: all data concatenate block-diagonally.
pub fn boundary_sum(h1: &Handlebody2, h2: &Handlebody2) -> Handlebody2 {
    block_sum(h1, h2, SumKind::Boundary)
}

/// Connected sum. Its 2-handlebody model (up to the 4-handle, which does
/// not affect the invariants here) is the same block concatenation as the
/// boundary sum.
pub fn connected_sum_model(h1: &Handlebody2, h2: &Handlebody2) -> Handlebody2 {
    block_sum(h1, h2, SumKind::Connected)
}

/// One comparison in an HIHC certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub left: String,
    pub right: String,
}

/// Computable necessary conditions for HIHC-equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HihcReport {
    pub checks: Vec<InvariantCheck>,
}

impl HihcReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Compares `H₁`, `b₂`, the intersection forms (isometry searched within
/// `bound`) and the boundary `H₁`. PASS means the necessary conditions
/// hold; it never asserts HIHC-equivalence.
pub fn hihc_certificate(h1: &Handlebody2, h2: &Handlebody2, bound: i64) -> Result<HihcReport> {
    let (p1, p2) = (h1.homology(), h2.homology());
    let mut checks = vec![
        InvariantCheck {
            name: "h1",
            passed: p1.h1 == p2.h1,
            left: p1.h1.to_string(),
            right: p2.h1.to_string(),
        },
        InvariantCheck {
            name: "h2_rank",
            passed: p1.h2_rank == p2.h2_rank,
            left: p1.h2_rank.to_string(),
            right: p2.h2_rank.to_string(),
        },
    ];
    let forms_iso = p1.h2_rank == p2.h2_rank
        && algebraically_equivalent(&p1.h2_module(), &p2.h2_module(), bound)?.is_equivalent();
    checks.push(InvariantCheck {
        name: "intersection_form",
        passed: forms_iso,
        left: p1.intersection_form.to_string(),
        right: p2.intersection_form.to_string(),
    });
    checks.push(InvariantCheck {
        name: "boundary_h1",
        passed: p1.boundary_h1 == p2.boundary_h1,
        left: p1.boundary_h1.to_string(),
        right: p2.boundary_h1.to_string(),
    });
    Ok(HihcReport { checks })
}

impl Handlebody2 {
    /// Whether every 2-handle word and framing agree with `other`, ignoring
    /// fronts and tags.
    pub fn same_handles(&self, other: &Self) -> bool {
        self.one_handles == other.one_handles
            && self.linking == other.linking
            && self
                .two_handles
                .iter()
                .zip(&other.two_handles)
                .all(|(a, b)| a.word == b.word)
            && self.two_handles.len() == other.two_handles.len()
    }

    /// Whether all framings vanish.
    pub fn is_zero_framed(&self) -> bool {
        (1..=self.two_handles.len()).all(|i| self.framing(i).is_zero())
    }
}
