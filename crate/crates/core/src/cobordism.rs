//! Homology-level models of attaching quasi-invertible cobordisms.
//!
//! A cobordism `P` from `M` to `N` with quasi-inverse `Q` is recorded by
//! `H₂(M) → H₂(P) → H₂(R)` where `R = P ∪ Q`. `I` is the image of the
//! first map and `K` the kernel of the second. Attaching `P` to `X` along
//! `M` gives `X′`; when one of the sufficient conditions below holds,
//! `H₂(X′) = H₂(X) ⊕ H₂(P)/I` with the form `(Q_X, 0)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::form::{
    algebraically_equivalent, format_class, DecoratedModule, Equivalence, GTable, ModuleHom,
    OrderedValue,
};
use crate::handlebody::Tag;
use crate::linalg::{self, IntMatrix};

/// Properties of a cobordism that cannot be read off its homology.
/// `h2_surjective` is computed, the other two are asserted by the
/// constructor (or the caller) that built the model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CobordismFlags {
    pub invertible: bool,
    pub strongly_quasi_invertible: bool,
    pub h2_surjective: bool,
}

/// `H₂(M) → H₂(P) → H₂(R)` for a quasi-invertible cobordism. All three
/// modules carry the zero form; `H₂(P)` may carry a genus table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CobordismModel {
    m_to_p: ModuleHom,
    p_to_r: ModuleHom,
    flags: CobordismFlags,
}

fn zero_form(d: &DecoratedModule, what: &str) -> Result<()> {
    if !d.form().is_zero() {
        return Err(Error::Invariant(format!("{what} must carry the zero form")));
    }
    Ok(())
}

impl CobordismModel {
    /// Validates the model. With `strongly_quasi_invertible`, the composite
    /// `H₂(M) → H₂(R)` must be an isomorphism, which makes `H₂(M) → H₂(P)`
    /// injective and `H₂(P) = I ⊕ K`. With `invertible`, the model must
    /// also be strongly quasi-invertible and `H₂(P)` torsion-free.
    pub fn new(
        m_to_p: ModuleHom,
        p_to_r: ModuleHom,
        invertible: bool,
        strongly_quasi_invertible: bool,
    ) -> Result<Self> {
        if !m_to_p.codomain().same_structure(p_to_r.domain()) {
            return Err(Error::Dimension(
                "H2(P) differs between the two maps".into(),
            ));
        }
        zero_form(m_to_p.domain(), "H2(M)")?;
        zero_form(m_to_p.codomain(), "H2(P)")?;
        zero_form(p_to_r.codomain(), "H2(R)")?;
        if strongly_quasi_invertible && !p_to_r.compose(&m_to_p)?.is_isomorphism() {
            return Err(Error::Invariant(
                "strongly quasi-invertible model needs H2(M) -> H2(R) to be an isomorphism".into(),
            ));
        }
        if invertible {
            if !strongly_quasi_invertible {
                return Err(Error::Invariant(
                    "invertible cobordisms are strongly quasi-invertible".into(),
                ));
            }
            if !m_to_p.codomain().is_torsion_free() {
                return Err(Error::Invariant(
                    "H2(P) of an invertible cobordism is torsion-free".into(),
                ));
            }
        }
        let h2_surjective = m_to_p.is_surjective();
        Ok(Self {
            m_to_p,
            p_to_r,
            flags: CobordismFlags {
                invertible,
                strongly_quasi_invertible,
                h2_surjective,
            },
        })
    }

    /// `I × M`: all maps are identities.
    pub fn product(h2_m: &DecoratedModule) -> Result<Self> {
        zero_form(h2_m, "H2(M)")?;
        let id = ModuleHom::identity(&h2_m.clone().with_gvalues(GTable::new())?);
        Self::new(id.clone(), id, true, true)
    }

    pub fn h2_m(&self) -> &DecoratedModule {
        self.m_to_p.domain()
    }

    pub fn h2_p(&self) -> &DecoratedModule {
        self.m_to_p.codomain()
    }

    pub fn h2_r(&self) -> &DecoratedModule {
        self.p_to_r.codomain()
    }

    pub fn m_to_p(&self) -> &ModuleHom {
        &self.m_to_p
    }

    pub fn p_to_r(&self) -> &ModuleHom {
        &self.p_to_r
    }

    pub fn flags(&self) -> CobordismFlags {
        self.flags
    }

    /// Appends `extra` to `H₂(P)` as classes that die in `R`.
    fn extend_kernel(&self, extra: &DecoratedModule, keep_invertible: bool) -> Result<Self> {
        zero_form(extra, "the added homology")?;
        let p = self.h2_p();
        let new_p = p.direct_sum_structure(extra);
        let mut table = GTable::new();
        for (k, v) in p.gvalues() {
            let mut key = k.clone();
            key.extend(extra.zero_vector());
            table.insert(key, v.clone());
        }
        for (k, v) in extra.gvalues() {
            let mut key = p.zero_vector();
            key.extend(k.iter().cloned());
            table.insert(key, v.clone());
        }
        let new_p = new_p.with_gvalues(table)?;
        let m_mat = self
            .m_to_p
            .matrix()
            .vstack(&IntMatrix::zeros(extra.rank(), self.h2_m().rank()))?;
        let r_mat = self
            .p_to_r
            .matrix()
            .hstack(&IntMatrix::zeros(self.h2_r().rank(), extra.rank()))?;
        let m_to_p = ModuleHom::new(m_mat, self.h2_m().clone(), new_p.clone())?;
        let p_to_r = ModuleHom::new(r_mat, new_p, self.h2_r().clone())?;
        let invertible = self.flags.invertible && keep_invertible && extra.is_torsion_free();
        Self::new(
            m_to_p,
            p_to_r,
            invertible,
            self.flags.strongly_quasi_invertible,
        )
    }

    /// Connected sum with a submanifold `V` of `S⁴(L)`. `H₂(V)` carries
    /// the zero form (it maps to `H₂(S⁴(L)) = 0`) and lies in `K`.
    pub fn sum_with_s4_piece(&self, h2_v: &DecoratedModule, link_empty: bool) -> Result<Self> {
        if link_empty && !h2_v.is_torsion_free() {
            return Err(Error::Invariant(
                "a submanifold of S^4 has torsion-free second homology".into(),
            ));
        }
        self.extend_kernel(h2_v, link_empty)
    }

    /// 0-framed 2-handles along a strongly slice link: each adds a class
    /// of `K` represented by a sphere (slice disk plus core), with genus 0.
    pub fn attach_slice_two_handles(&self, count: usize) -> Result<Self> {
        let extra = DecoratedModule::free(IntMatrix::zeros(count, count))?;
        let mut table = GTable::new();
        for i in 0..count {
            table.insert(extra.basis_vector(i), OrderedValue::finite(0));
        }
        self.extend_kernel(&extra.with_gvalues(table)?, true)
    }

    /// 1-handles and homotopically canceling pairs leave `H₂` unchanged.
    pub fn attach_handles_without_h2(&self) -> Self {
        self.clone()
    }

    /// Generators of `K` as columns in `H₂(P)` coordinates.
    pub fn kernel_classes(&self) -> IntMatrix {
        let augmented = self
            .p_to_r
            .matrix()
            .hstack(&self.h2_r().relation_matrix())
            .expect("same row count");
        let kb = linalg::kernel_basis(&augmented);
        let p = self.h2_p();
        let cols: Vec<Vec<BigInt>> = kb
            .columns()
            .into_iter()
            .map(|c| p.reduce(&c[..p.rank()]))
            .filter(|c| !p.is_zero_class(c))
            .collect();
        IntMatrix::from_columns(p.rank(), &cols).expect("columns have rank of H2(P)")
    }

    pub fn in_kernel(&self, beta: &[BigInt]) -> bool {
        self.h2_r().is_zero_class(&self.p_to_r.apply(beta))
    }
}

/// Quotient of a zero-form module by the span of the columns of `sub`,
/// returned with the projection matrix (quotient coordinates × module
/// coordinates).
pub fn quotient_module(
    d: &DecoratedModule,
    sub: &IntMatrix,
) -> Result<(DecoratedModule, IntMatrix)> {
    zero_form(d, "quotiented module")?;
    if sub.rows() != d.rank() {
        return Err(Error::Dimension(
            "subgroup generators have the wrong length".into(),
        ));
    }
    let relations = sub.hstack(&d.relation_matrix())?;
    let snf = linalg::smith_normal_form(&relations);
    let diag = snf.diagonal();
    let mut orders = Vec::new();
    let mut rows = Vec::new();
    for i in 0..d.rank() {
        let di = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_one() {
            continue;
        }
        orders.push(di);
        rows.push(snf.u.row(i));
    }
    let projection = IntMatrix::from_columns(d.rank(), &rows)?.transpose();
    let n = orders.len();
    let q = DecoratedModule::new(orders, IntMatrix::zeros(n, n), GTable::new())?;
    Ok((q, projection))
}

/// `X`, the cobordism, and the gluing map `H₂(M) → H₂(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachmentModel {
    pub x: DecoratedModule,
    pub cob: CobordismModel,
    pub glue: ModuleHom,
}

impl AttachmentModel {
    /// Checks shapes and that the glued classes pair to zero with all of
    /// `H₂(X)`, as classes coming from the boundary must.
    pub fn new(x: DecoratedModule, cob: CobordismModel, glue: ModuleHom) -> Result<Self> {
        if !glue.domain().same_structure(cob.h2_m()) || !glue.codomain().same_structure(&x) {
            return Err(Error::Dimension(
                "gluing map must go from H2(M) to H2(X)".into(),
            ));
        }
        for j in 0..glue.domain().rank() {
            let img = glue.matrix().column(j);
            if (0..x.rank()).any(|i| !x.pair(&img, &x.basis_vector(i)).is_zero()) {
                return Err(Error::Invariant(format!(
                    "image {} of a boundary class pairs non-trivially with H2(X)",
                    format_class(&img)
                )));
            }
        }
        Ok(Self { x, cob, glue })
    }

    /// Gluing along the zero map.
    pub fn with_zero_glue(x: DecoratedModule, cob: CobordismModel) -> Result<Self> {
        let glue = ModuleHom::new(
            IntMatrix::zeros(x.rank(), cob.h2_m().rank()),
            cob.h2_m().clone(),
            x.clone(),
        )?;
        Self::new(x, cob, glue)
    }
}

/// Which sufficient condition made the direct-sum model valid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttachCondition {
    StronglyQuasiInvertible,
    GlueZero,
    NondegenerateTorsionFree,
}

impl fmt::Display for AttachCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::StronglyQuasiInvertible => "strongly-quasi-invertible",
            Self::GlueZero => "glue-zero",
            Self::NondegenerateTorsionFree => "nondegenerate-torsion-free",
        })
    }
}

/// A class of `H₂(X′)` whose genus is only bracketed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusInterval {
    pub class: Vec<BigInt>,
    pub lo: OrderedValue,
    pub hi: OrderedValue,
}

/// `H₂(X′)` with its table, plus the intervals that did not collapse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachOutcome {
    /// `H₂(X) ⊕ H₂(P)/I`, with `H₂(X)`'s generators first.
    pub module: DecoratedModule,
    /// Projection `H₂(P) → H₂(P)/I` as a matrix.
    pub projection: IntMatrix,
    pub x_rank: usize,
    pub condition: AttachCondition,
    pub intervals: Vec<GenusInterval>,
}

impl AttachOutcome {
    /// Embeds `(α, β)` with `α ∈ H₂(X)` and `β ∈ H₂(P)`.
    pub fn class_of(&self, alpha: &[BigInt], beta: &[BigInt]) -> Vec<BigInt> {
        let mut v = alpha.to_vec();
        v.extend(self.projection.apply(beta));
        self.module.reduce(&v)
    }

    /// The `K` summand as a module of its own.
    pub fn k_summand(&self) -> DecoratedModule {
        let n = self.module.rank();
        let orders = self.module.orders()[self.x_rank..n].to_vec();
        let k = orders.len();
        let mut table = GTable::new();
        for (key, v) in self.module.gvalues() {
            if key[..self.x_rank].iter().all(Zero::is_zero) {
                table.insert(key[self.x_rank..].to_vec(), v.clone());
            }
        }
        DecoratedModule::new(orders, IntMatrix::zeros(k, k), table)
            .expect("K summand is a valid module")
    }
}

/// `[g_X(α), g_X(α) + g_P(β)]`.
pub fn genus_interval(
    gx_alpha: &OrderedValue,
    gp_beta: &OrderedValue,
) -> (OrderedValue, OrderedValue) {
    (gx_alpha.clone(), gx_alpha.saturating_add(gp_beta))
}

/// Whether a claimed value lies in the interval.
pub fn check_genus_claim(claim: &OrderedValue, interval: &(OrderedValue, OrderedValue)) -> bool {
    interval.0 <= *claim && *claim <= interval.1
}

/// Models `H₂(X′)` for `X′ = X ∪_M P`.
///
/// The table on `ι*(H₂X)` is copied from `X` (inclusion preserves genus).
/// For each table class `α` of `X` and each table class `β ∈ K` of `P`
/// the class `ι*α + ι_P*β` is bracketed by [`genus_interval`]; collapsed
/// intervals become table entries, the others are returned.
pub fn attach(a: &AttachmentModel) -> Result<AttachOutcome> {
    let x = &a.x;
    let cob = &a.cob;
    let condition = if cob.flags().strongly_quasi_invertible {
        AttachCondition::StronglyQuasiInvertible
    } else if a.glue.matrix().is_zero() {
        AttachCondition::GlueZero
    } else if x.is_torsion_free() && linalg::is_nondegenerate(x.form()) {
        AttachCondition::NondegenerateTorsionFree
    } else {
        return Err(Error::Refused(
            "no sufficient condition for the direct-sum decomposition holds: the cobordism is not \
             strongly quasi-invertible, the gluing map is non-zero, and H2(X) is not a \
             non-degenerate torsion-free lattice"
                .into(),
        ));
    };

    let (c, projection) = quotient_module(
        &cob.h2_p().clone().with_gvalues(GTable::new())?,
        cob.m_to_p().matrix(),
    )?;
    let structure = x.direct_sum_structure(&c);
    let xr = x.rank();
    let embed = |alpha: &[BigInt], beta: &[BigInt]| -> Vec<BigInt> {
        let mut v = alpha.to_vec();
        v.extend(projection.apply(beta));
        structure.reduce(&v)
    };

    let mut table = GTable::new();
    for (alpha, g) in x.gvalues() {
        table.insert(embed(alpha, &cob.h2_p().zero_vector()), g.clone());
    }
    let k_keys: Vec<(&Vec<BigInt>, &OrderedValue)> = cob
        .h2_p()
        .gvalues()
        .iter()
        .filter(|(beta, _)| cob.in_kernel(beta))
        .collect();
    let mut brackets: std::collections::BTreeMap<Vec<BigInt>, (OrderedValue, OrderedValue)> =
        std::collections::BTreeMap::new();
    for (alpha, g) in x.gvalues() {
        for (beta, gp) in &k_keys {
            let class = embed(alpha, beta);
            if table.contains_key(&class) {
                continue;
            }
            let (lo, hi) = genus_interval(g, gp);
            brackets
                .entry(class)
                .and_modify(|(l, h)| {
                    if lo > *l {
                        *l = lo.clone();
                    }
                    if hi < *h {
                        *h = hi.clone();
                    }
                })
                .or_insert((lo, hi));
        }
    }
    let mut intervals = Vec::new();
    for (class, (lo, hi)) in brackets {
        if lo > hi {
            return Err(Error::Internal(format!(
                "empty genus interval for class {}",
                format_class(&class)
            )));
        }
        if lo == hi {
            table.insert(class, lo);
        } else {
            intervals.push(GenusInterval { class, lo, hi });
        }
    }
    let module = structure.with_gvalues(table)?;
    Ok(AttachOutcome {
        module,
        projection,
        x_rank: xr,
        condition,
        intervals,
    })
}

/// Which stability statement a check exercised.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuasiStabilityMode {
    /// `ι*` is an isomorphism on both sides: equivalence before iff after.
    IsomorphismIff,
    /// Non-degenerate forms with torsion hypotheses: equivalence after
    /// implies equivalence before.
    NondegenerateImplication,
}

impl fmt::Display for QuasiStabilityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::IsomorphismIff => "iff",
            Self::NondegenerateImplication => "implication",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiStabilityReport {
    pub mode: QuasiStabilityMode,
    pub before: Equivalence,
    pub after: Equivalence,
    /// When both sides are torsion-free in the implication mode: the
    /// verdict on the `K` summands, which must also be equivalent once the
    /// attached manifolds are.
    pub k_parts: Option<Equivalence>,
    pub consistent: bool,
}

/// Runs the bounded equivalence search on `(X₁, X₂)` and `(X′₁, X′₂)` and
/// checks the applicable stability statement. Verdicts count as
/// "equivalent" only when certified on every table key.
pub fn stability_check_quasi(
    a1: &AttachmentModel,
    a2: &AttachmentModel,
    bound: i64,
) -> Result<QuasiStabilityReport> {
    let o1 = attach(a1)?;
    let o2 = attach(a2)?;
    let iso_both = o1.module.rank() == o1.x_rank && o2.module.rank() == o2.x_rank;
    let nondeg = a1.x.is_nondegenerate_mod_torsion()
        && a2.x.is_nondegenerate_mod_torsion()
        && linalg::is_nondegenerate(&free_block(&a1.x))
        && linalg::is_nondegenerate(&free_block(&a2.x));
    let x_free = a1.x.is_torsion_free() && a2.x.is_torsion_free();
    let k_free = o1.k_summand().is_torsion_free() && o2.k_summand().is_torsion_free();
    let mode = if iso_both {
        QuasiStabilityMode::IsomorphismIff
    } else if nondeg && (x_free || k_free) {
        QuasiStabilityMode::NondegenerateImplication
    } else {
        return Err(Error::Refused(
            "neither both inclusions are isomorphisms on H2 nor are the forms non-degenerate with \
             the torsion hypotheses"
                .into(),
        ));
    };
    let before = algebraically_equivalent(&a1.x, &a2.x, bound)?;
    let after = algebraically_equivalent(&o1.module, &o2.module, bound)?;
    let (consistent, k_parts) = match mode {
        QuasiStabilityMode::IsomorphismIff => (before.is_certified() == after.is_certified(), None),
        QuasiStabilityMode::NondegenerateImplication => {
            let mut ok = !after.is_certified() || before.is_certified();
            let mut k_parts = None;
            if x_free && after.is_certified() {
                let k = algebraically_equivalent(&o1.k_summand(), &o2.k_summand(), bound)?;
                ok &= k.is_equivalent();
                k_parts = Some(k);
            }
            (ok, k_parts)
        }
    };
    Ok(QuasiStabilityReport {
        mode,
        before,
        after,
        k_parts,
        consistent,
    })
}

fn free_block(d: &DecoratedModule) -> IntMatrix {
    let free = d.free_indices();
    let mut q = IntMatrix::zeros(free.len(), free.len());
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            q.set(a, b, d.form().get(i, j).clone());
        }
    }
    q
}

/// Moves generating quasi-invertible cobordisms from a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionMove {
    /// Pass to a codimension-0 submanifold containing the incoming end.
    Restrict,
    /// Connected sum with a submanifold of `S⁴(L)`.
    ConnectedSumS4 {
        link_empty: bool,
    },
    /// Boundary sum with a submanifold of `S⁴(L)` with non-empty boundary.
    BoundarySumS4 {
        link_empty: bool,
    },
    OneHandle,
    CancelingPair,
    SliceTwoHandles,
}

impl ConstructionMove {
    /// Number of the generating clause justifying this move.
    pub fn clause(&self) -> u8 {
        match self {
            Self::Restrict => 1,
            Self::ConnectedSumS4 { .. } => 2,
            Self::BoundarySumS4 { .. } => 3,
            Self::OneHandle => 4,
            Self::CancelingPair => 5,
            Self::SliceTwoHandles => 6,
        }
    }

    /// Whether an invertible cobordism stays invertible.
    pub fn keeps_invertible(&self) -> bool {
        !matches!(
            self,
            Self::ConnectedSumS4 { link_empty: false } | Self::BoundarySumS4 { link_empty: false }
        )
    }

    /// The move recorded by a handlebody tag, if the tag is one.
    pub fn from_tag(tag: &Tag) -> Option<Self> {
        match tag {
            Tag::OneHandle => Some(Self::OneHandle),
            Tag::CancelingPairs { .. } | Tag::WMinus { .. } => Some(Self::CancelingPair),
            Tag::SliceTwoHandles { .. } => Some(Self::SliceTwoHandles),
            _ => None,
        }
    }
}

impl fmt::Display for ConstructionMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Restrict => "restrict",
            Self::ConnectedSumS4 { link_empty: true } => "connected_sum_s4",
            Self::ConnectedSumS4 { link_empty: false } => "connected_sum_s4_link",
            Self::BoundarySumS4 { link_empty: true } => "boundary_sum_s4",
            Self::BoundarySumS4 { link_empty: false } => "boundary_sum_s4_link",
            Self::OneHandle => "one_handle",
            Self::CancelingPair => "canceling_pair",
            Self::SliceTwoHandles => "slice_two_handles",
        })
    }
}

impl FromStr for ConstructionMove {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "restrict" => Self::Restrict,
            "connected_sum_s4" => Self::ConnectedSumS4 { link_empty: true },
            "connected_sum_s4_link" => Self::ConnectedSumS4 { link_empty: false },
            "boundary_sum_s4" => Self::BoundarySumS4 { link_empty: true },
            "boundary_sum_s4_link" => Self::BoundarySumS4 { link_empty: false },
            "one_handle" => Self::OneHandle,
            "canceling_pair" => Self::CancelingPair,
            "slice_two_handles" => Self::SliceTwoHandles,
            other => return Err(Error::UnknownMove(other.to_string())),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateStep {
    pub step: ConstructionMove,
    pub clause: u8,
    pub invertible_after: bool,
}

/// Justification that a cobordism built from a product by the given moves
/// is (strongly) quasi-invertible, and whether it is even invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiInvertibilityCertificate {
    pub steps: Vec<CertificateStep>,
    pub strongly_quasi_invertible: bool,
    pub invertible: bool,
}

pub fn quasi_invertibility_certificate(
    trace: &[ConstructionMove],
) -> QuasiInvertibilityCertificate {
    let mut invertible = true;
    let steps = trace
        .iter()
        .map(|&step| {
            invertible &= step.keeps_invertible();
            CertificateStep {
                step,
                clause: step.clause(),
                invertible_after: invertible,
            }
        })
        .collect();
    QuasiInvertibilityCertificate {
        steps,
        strongly_quasi_invertible: true,
        invertible,
    }
}

/// Parses whitespace- or newline-separated move names; `#` starts a comment.
pub fn parse_trace(text: &str) -> Result<Vec<ConstructionMove>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::parse)
        .collect()
}
