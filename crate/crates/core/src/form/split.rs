//! Split modules `A ⊕ B` whose form is `Q_A` on `A` and zero elsewhere,
//! and the three projection constructions that turn a form-preserving
//! isomorphism of split modules into isomorphisms of the summands.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{format_class, DecoratedModule, GTable, ModuleHom, OrderedValue};
use crate::error::{Error, Result};

/// `A ⊕ B` with `A`'s generators first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitModule {
    pub a_part: DecoratedModule,
    pub b_part: DecoratedModule,
    pub total: DecoratedModule,
}

impl SplitModule {
    /// Builds the split module from its summands and a table on the
    /// total module. The tables of `a` and `b` are replaced by the
    /// restrictions of `total_values` to each summand.
    pub fn new(a: DecoratedModule, b: DecoratedModule, total_values: GTable) -> Result<Self> {
        if !b.form().is_zero() {
            return Err(Error::Invariant(
                "the B summand must carry the zero form".into(),
            ));
        }
        if !a.is_nondegenerate_mod_torsion() {
            return Err(Error::Invariant(
                "the form on A modulo torsion is degenerate".into(),
            ));
        }
        let total = a.direct_sum_structure(&b).with_gvalues(total_values)?;
        let ka = a.rank();
        let mut ta = GTable::new();
        let mut tb = GTable::new();
        for (k, v) in total.gvalues() {
            if k[ka..].iter().all(Zero::is_zero) {
                ta.insert(k[..ka].to_vec(), v.clone());
            }
            if k[..ka].iter().all(Zero::is_zero) {
                tb.insert(k[ka..].to_vec(), v.clone());
            }
        }
        Ok(Self {
            a_part: a.with_gvalues(ta)?,
            b_part: b.with_gvalues(tb)?,
            total,
        })
    }

    pub fn a_rank(&self) -> usize {
        self.a_part.rank()
    }

    pub fn embed_a(&self, a: &[BigInt]) -> Vec<BigInt> {
        let mut v = a.to_vec();
        v.extend(self.b_part.zero_vector());
        v
    }

    pub fn embed_b(&self, b: &[BigInt]) -> Vec<BigInt> {
        let mut v = self.a_part.zero_vector();
        v.extend_from_slice(b);
        v
    }

    pub fn project_a(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.a_part.reduce(&v[..self.a_rank()])
    }

    pub fn project_b(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.b_part.reduce(&v[self.a_rank()..])
    }

    fn lies_in_a(&self, v: &[BigInt]) -> bool {
        v[self.a_rank()..].iter().all(Zero::is_zero)
    }

    fn lies_in_b(&self, v: &[BigInt]) -> bool {
        v[..self.a_rank()].iter().all(Zero::is_zero)
    }
}

fn check_shapes(phi: &ModuleHom, s1: &SplitModule, s2: &SplitModule) -> Result<()> {
    if !phi.domain().same_structure(&s1.total) || !phi.codomain().same_structure(&s2.total) {
        return Err(Error::Dimension(
            "map does not go between the given split modules".into(),
        ));
    }
    Ok(())
}

fn check_form_isomorphism(phi: &ModuleHom) -> Result<()> {
    if !phi.is_isomorphism() {
        return Err(Error::Precondition("map is not an isomorphism".into()));
    }
    if !phi.preserves_form() {
        return Err(Error::Precondition(
            "map does not preserve the forms".into(),
        ));
    }
    Ok(())
}

/// Projects a form-preserving isomorphism `A₁ ⊕ B₁ → A₂ ⊕ B₂` to
/// `(p_A₂∘φ|_A₁, p_B₂∘φ|_B₁)`.
///
/// Requires both `A` summands or both `B` summands to be torsion-free.
/// Both outputs are checked to be isomorphisms and the first to preserve
/// `Q_A`; a failed check is an [`Error::Internal`].
pub fn split_projection(
    phi: &ModuleHom,
    s1: &SplitModule,
    s2: &SplitModule,
) -> Result<(ModuleHom, ModuleHom)> {
    check_shapes(phi, s1, s2)?;
    let a_free = s1.a_part.is_torsion_free() && s2.a_part.is_torsion_free();
    let b_free = s1.b_part.is_torsion_free() && s2.b_part.is_torsion_free();
    if !a_free && !b_free {
        return Err(Error::Precondition(
            "neither both A summands nor both B summands are torsion-free".into(),
        ));
    }
    check_form_isomorphism(phi)?;

    let (a1, a2) = (s1.a_rank(), s2.a_rank());
    let (n1, n2) = (s1.total.rank(), s2.total.rank());
    let m = phi.matrix();
    let fa = ModuleHom::new(
        m.submatrix(0..a2, 0..a1),
        s1.a_part.clone(),
        s2.a_part.clone(),
    )
    .map_err(|e| Error::Internal(format!("A-block is not a homomorphism: {e}")))?;
    let fb = ModuleHom::new(
        m.submatrix(a2..n2, a1..n1),
        s1.b_part.clone(),
        s2.b_part.clone(),
    )
    .map_err(|e| Error::Internal(format!("B-block is not a homomorphism: {e}")))?;
    if !fa.is_isomorphism() {
        return Err(Error::Internal("A-block is not an isomorphism".into()));
    }
    if !fa.preserves_form() {
        return Err(Error::Internal("A-block does not preserve Q_A".into()));
    }
    if !fb.is_isomorphism() || !fb.preserves_form() {
        return Err(Error::Internal("B-block is not a form isomorphism".into()));
    }
    Ok((fa, fb))
}

/// The inequality chain `G(a) ≥ G(ψa) ≥ G(a − t) ≥ …` replayed on the
/// table for one class `a`, where `t` is the torsion correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainReplay {
    pub class: Vec<BigInt>,
    pub step: Vec<BigInt>,
    /// `G₁(a − j·t)` for `j = 0, …, order(t) − 1`, where present.
    pub values: Vec<Option<OrderedValue>>,
}

impl ChainReplay {
    pub fn is_complete(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }
}

/// Result of a table-level genus-preservation construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitGReport {
    pub map: ModuleHom,
    /// Summand classes on which preservation was checked against a value.
    pub verified: Vec<Vec<BigInt>>,
    /// Summand classes whose image is absent from the tables.
    pub unverified: Vec<Vec<BigInt>>,
    pub chains: Vec<ChainReplay>,
}

fn mismatch(class: &[BigInt], left: &OrderedValue, right: &OrderedValue, what: &str) -> Error {
    Error::GenusMismatch {
        witness: format_class(class),
        detail: format!("{what}: {left} vs {right}"),
    }
}

fn check_phi_gvalues(phi: &ModuleHom) -> Result<ModuleHom> {
    let inv = phi.inverse()?;
    let check = phi.check_gvalues(Some(&inv), false);
    if let Some((k, v, w)) = check.mismatch {
        return Err(Error::Precondition(format!(
            "map does not preserve the genus values at {}: {v} vs {w}",
            format_class(&k)
        )));
    }
    Ok(inv)
}

/// The `B`-summand isomorphism of [`split_projection`], with genus values
/// compared on every table key lying in `B₁`. Requires torsion-free `A`
/// summands.
pub fn split_preserving_g_on_b(
    phi: &ModuleHom,
    s1: &SplitModule,
    s2: &SplitModule,
) -> Result<SplitGReport> {
    check_shapes(phi, s1, s2)?;
    if !s1.a_part.is_torsion_free() || !s2.a_part.is_torsion_free() {
        return Err(Error::Precondition(
            "the A summands must be torsion-free".into(),
        ));
    }
    check_form_isomorphism(phi)?;
    check_phi_gvalues(phi)?;
    let (_, fb) = split_projection(phi, s1, s2)?;

    let mut verified = Vec::new();
    let mut unverified = Vec::new();
    for (k, v) in s1.total.gvalues() {
        if !s1.lies_in_b(k) {
            continue;
        }
        let b = s1.project_b(k);
        let image = s2.embed_b(&fb.apply(&b));
        match s2.total.g(&image) {
            Some(w) if w == v => verified.push(b),
            Some(w) => return Err(mismatch(k, v, w, "B-summand map changes the value")),
            None => unverified.push(b),
        }
    }
    Ok(SplitGReport {
        map: fb,
        verified,
        unverified,
        chains: Vec::new(),
    })
}

fn check_monotone(s: &SplitModule, label: &str) -> Result<()> {
    for (k, v) in s.total.gvalues() {
        if s.lies_in_a(k) {
            continue;
        }
        let a = s.embed_a(&s.project_a(k));
        if let Some(ga) = s.total.g(&a) {
            if ga > v {
                return Err(Error::Precondition(format!(
                    "monotonicity fails in {label}: G{} = {ga} > G{} = {v}",
                    format_class(&a),
                    format_class(k)
                )));
            }
        }
    }
    Ok(())
}

/// The `A`-summand isomorphism `ψ = p_A₂∘φ|_A₁`, assuming
/// `G(a) ≤ G(a + b)` for `a ∈ A`, `b ∈ B` (checked on every table pair).
///
/// For each table key `a ∈ A₁` the value `G₂(ψa)` is read either directly
/// from the second table or as `G₁(φ⁻¹ψa)`, and compared with `G₁(a)`.
/// When `A` has torsion, `φ⁻¹(ψa) = a − t − b′` with `t` torsion and the
/// chain `G₁(a) ≥ G₂(ψa) ≥ G₁(a − t) ≥ …` closes up after `order(t)` steps;
/// each key records how much of that chain the table covers.
pub fn split_preserving_g_on_a(
    phi: &ModuleHom,
    s1: &SplitModule,
    s2: &SplitModule,
) -> Result<SplitGReport> {
    check_shapes(phi, s1, s2)?;
    check_monotone(s1, "the domain")?;
    check_monotone(s2, "the codomain")?;
    let (fa, _) = split_projection(phi, s1, s2)?;
    let inv = check_phi_gvalues(phi)?;

    let mut verified = Vec::new();
    let mut unverified = Vec::new();
    let mut chains = Vec::new();
    for (k, v) in s1.total.gvalues() {
        if !s1.lies_in_a(k) {
            continue;
        }
        let a = s1.project_a(k);
        let psi_a = s2.embed_a(&fa.apply(&a));
        let pulled = inv.apply(&psi_a);
        let value = s2.total.g(&psi_a).or_else(|| s1.total.g(&pulled));
        match value {
            Some(w) if w == v => verified.push(a.clone()),
            Some(w) => return Err(mismatch(k, v, w, "A-summand map changes the value")),
            None => unverified.push(a.clone()),
        }

        let b_hat = s2.project_b(&phi.apply(k));
        let t = s1.project_a(&inv.apply(&s2.embed_b(&b_hat)));
        let order = s1.a_part.class_order(&t).ok_or_else(|| {
            Error::Internal(format!(
                "correction {} for class {} is not torsion",
                format_class(&t),
                format_class(&a)
            ))
        })?;
        let steps: usize = (&order)
            .try_into()
            .map_err(|_| Error::Capacity(format!("torsion order {order} too large to replay")))?;
        let mut values = Vec::with_capacity(steps);
        let mut c = a.clone();
        for _ in 0..steps {
            values.push(s1.total.g(&s1.embed_a(&c)).cloned());
            c = s1
                .a_part
                .reduce(&c.iter().zip(&t).map(|(x, y)| x - y).collect::<Vec<_>>());
        }
        if let Some(first) = values.iter().flatten().next() {
            if let Some(other) = values.iter().flatten().find(|w| *w != first) {
                return Err(mismatch(k, first, other, "torsion chain does not close up"));
            }
        }
        chains.push(ChainReplay {
            class: a,
            step: t,
            values,
        });
    }
    Ok(SplitGReport {
        map: fa,
        verified,
        unverified,
        chains,
    })
}
