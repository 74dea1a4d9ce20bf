//! Bounded exhaustive search for form-preserving isomorphisms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{DecoratedModule, ModuleHom};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Largest number of generators the exhaustive search accepts.
pub const MAX_SEARCH_RANK: usize = 4;

fn column_candidates(
    d1: &DecoratedModule,
    d2: &DecoratedModule,
    j: usize,
    bound: i64,
) -> Vec<Vec<BigInt>> {
    let order_j = &d1.orders()[j];
    let ranges: Vec<Vec<BigInt>> = d2
        .orders()
        .iter()
        .map(|o| {
            if o.is_zero() {
                if order_j.is_zero() {
                    (-bound..=bound).map(BigInt::from).collect()
                } else {
                    vec![BigInt::zero()]
                }
            } else {
                let o64 = o
                    .to_i64()
                    .expect("torsion order fits in i64 at search scale");
                (0..o64)
                    .map(BigInt::from)
                    .filter(|x| order_j.is_zero() || (x * order_j).is_multiple_of(o))
                    .collect()
            }
        })
        .collect();

    let q11 = d1.form().get(j, j);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(ranges.len());
    fn product(
        ranges: &[Vec<BigInt>],
        current: &mut Vec<BigInt>,
        out: &mut Vec<Vec<BigInt>>,
        d2: &DecoratedModule,
        q11: &BigInt,
    ) {
        if current.len() == ranges.len() {
            if d2.pair(current, current) == *q11 {
                out.push(current.clone());
            }
            return;
        }
        for x in &ranges[current.len()] {
            current.push(x.clone());
            product(ranges, current, out, d2, q11);
            current.pop();
        }
    }
    product(&ranges, &mut current, &mut out, d2, q11);
    out
}

fn check_inputs(d1: &DecoratedModule, d2: &DecoratedModule, bound: i64) -> Result<()> {
    if bound < 1 {
        return Err(Error::Precondition(format!(
            "search bound {bound} must be at least 1"
        )));
    }
    let r = d1.rank().max(d2.rank());
    if r > MAX_SEARCH_RANK {
        return Err(Error::Capacity(format!(
            "isometry search over {r} generators exceeds the limit of {MAX_SEARCH_RANK}"
        )));
    }
    Ok(())
}

/// Visits isometries `d1 → d2` in order; `visit` returns `false` to stop.
fn search(
    d1: &DecoratedModule,
    d2: &DecoratedModule,
    bound: i64,
    visit: &mut dyn FnMut(ModuleHom) -> bool,
) -> Result<()> {
    check_inputs(d1, d2, bound)?;
    if d1.group() != d2.group() {
        return Ok(());
    }
    let n = d1.rank();
    let candidates: Vec<Vec<Vec<BigInt>>> = (0..n)
        .map(|j| column_candidates(d1, d2, j, bound))
        .collect();

    fn rec(
        j: usize,
        chosen: &mut Vec<Vec<BigInt>>,
        candidates: &[Vec<Vec<BigInt>>],
        d1: &DecoratedModule,
        d2: &DecoratedModule,
        visit: &mut dyn FnMut(ModuleHom) -> bool,
    ) -> bool {
        if j == candidates.len() {
            let m = IntMatrix::from_columns(d2.rank(), chosen).expect("columns sized to codomain");
            let Ok(phi) = ModuleHom::new(m, d1.clone(), d2.clone()) else {
                return true;
            };
            if phi.is_isomorphism() {
                return visit(phi);
            }
            return true;
        }
        for c in &candidates[j] {
            let fits = (0..j).all(|i| d2.pair(&chosen[i], c) == *d1.form().get(i, j));
            if !fits {
                continue;
            }
            chosen.push(c.clone());
            let go_on = rec(j + 1, chosen, candidates, d1, d2, visit);
            chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(0, &mut Vec::with_capacity(n), &candidates, d1, d2, visit);
    Ok(())
}

/// All form-preserving isomorphisms `d1 → d2` whose free entries lie in
/// `[-bound, bound]` (torsion entries are residues), in lexicographic
/// order of their entries read column by column.
pub fn enumerate_isometries(
    d1: &DecoratedModule,
    d2: &DecoratedModule,
    bound: i64,
) -> Result<Vec<ModuleHom>> {
    let mut out = Vec::new();
    search(d1, d2, bound, &mut |phi| {
        out.push(phi);
        true
    })?;
    Ok(out)
}

/// Outcome of a bounded equivalence search.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// `witness` preserves forms and agrees with both tables wherever both
    /// sides are defined; `undecided` lists domain classes where one side
    /// is missing.
    Equivalent {
        witness: ModuleHom,
        undecided: Vec<Vec<BigInt>>,
    },
    /// No witness with entries in the bound exists in either direction.
    /// This is not a proof of inequivalence.
    NotWithinBound,
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Self::Equivalent { .. })
    }

    /// Equivalent with a witness checked on every table key.
    pub fn is_certified(&self) -> bool {
        matches!(self, Self::Equivalent { undecided, .. } if undecided.is_empty())
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Equivalent { undecided, .. } if undecided.is_empty() => "equivalent",
            Self::Equivalent { .. } => "equivalent-partial",
            Self::NotWithinBound => "not-within-bound",
        }
    }
}

/// Searches for an algebraic equivalence `d1 → d2`: a form-preserving
/// isomorphism agreeing with the genus tables, read as even functions.
///
/// Candidates are maps `φ` with `φ` or `φ⁻¹` inside the bound, so the
/// verdict does not depend on argument order. A witness decided on every
/// key is preferred over one with undecided keys.
pub fn algebraically_equivalent(
    d1: &DecoratedModule,
    d2: &DecoratedModule,
    bound: i64,
) -> Result<Equivalence> {
    check_inputs(d1, d2, bound)?;
    let mut fallback: Option<Equivalence> = None;
    let mut certified: Option<ModuleHom> = None;

    let mut consider = |phi: ModuleHom, inv: &ModuleHom| -> bool {
        let check = phi.check_gvalues(Some(inv), true);
        if !check.is_consistent() {
            return true;
        }
        if check.undecided.is_empty() {
            certified = Some(phi);
            return false;
        }
        if fallback.is_none() {
            let mut undecided = check.undecided;
            undecided.sort();
            undecided.dedup();
            fallback = Some(Equivalence::Equivalent {
                witness: phi,
                undecided,
            });
        }
        true
    };

    let mut stopped = false;
    search(d1, d2, bound, &mut |phi| {
        let inv = phi.inverse().expect("search yields isomorphisms");
        let go_on = consider(phi, &inv);
        stopped |= !go_on;
        go_on
    })?;
    if !stopped {
        search(d2, d1, bound, &mut |psi| {
            let phi = psi.inverse().expect("search yields isomorphisms");
            consider(phi, &psi)
        })?;
    }
    if let Some(witness) = certified {
        return Ok(Equivalence::Equivalent {
            witness,
            undecided: Vec::new(),
        });
    }
    Ok(fallback.unwrap_or(Equivalence::NotWithinBound))
}
