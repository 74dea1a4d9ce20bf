//! Genus-function-type invariants: disk-bundle tables and the lower-bound
//! function `A_G`, torsion-free reduction, the Rochlin mod-16 obstruction
//! for characteristic classes, and stability of equivalence under sums
//! with pieces of surgered 4-spheres.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::form::{algebraically_equivalent, DecoratedModule, Equivalence, GTable, OrderedValue};
use crate::linalg::{self, IntMatrix};

/// Values `G_{S(g,n)}(γ(g,n))` of an invariant on the disk bundles over
/// the genus-`g` surface with Euler number `n`, for `0 ≤ g ≤ g_max` and
/// `n_min ≤ n ≤ n_max`. Entries are non-decreasing in `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskBundleTable {
    entries: BTreeMap<(u64, i64), OrderedValue>,
    g_max: u64,
    n_min: i64,
    n_max: i64,
}

impl DiskBundleTable {
    /// Infers coverage from the keys; every `(g, n)` in the covered box
    /// must be present and each column must be monotone in `g`.
    pub fn new(entries: BTreeMap<(u64, i64), OrderedValue>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidValue(
                "disk bundle table has no entries".into(),
            ));
        }
        let g_max = entries.keys().map(|k| k.0).max().unwrap_or(0);
        let n_min = entries.keys().map(|k| k.1).min().unwrap_or(0);
        let n_max = entries.keys().map(|k| k.1).max().unwrap_or(0);
        let expected = (g_max + 1) as u128 * (n_max - n_min + 1) as u128;
        if entries.len() as u128 != expected {
            let missing = (n_min..=n_max)
                .flat_map(|n| (0..=g_max).map(move |g| (g, n)))
                .find(|k| !entries.contains_key(k))
                .expect("a key is missing");
            return Err(Error::InvalidValue(format!(
                "disk bundle table lacks entry g={} n={}",
                missing.0, missing.1
            )));
        }
        for n in n_min..=n_max {
            for g in 0..g_max {
                if entries[&(g + 1, n)] < entries[&(g, n)] {
                    return Err(Error::Invariant(format!(
                        "table decreases from g={g} to g={} at n={n}",
                        g + 1
                    )));
                }
            }
        }
        Ok(Self {
            entries,
            g_max,
            n_min,
            n_max,
        })
    }

    /// `entry(g, n) = g` on `0 ≤ g ≤ g_max`, for the genus function itself.
    pub fn identity(g_max: u64, n_min: i64, n_max: i64) -> Self {
        let entries = (n_min..=n_max)
            .flat_map(|n| (0..=g_max).map(move |g| ((g, n), OrderedValue::Finite(BigInt::from(g)))))
            .collect();
        Self::new(entries).expect("identity table is complete and monotone")
    }

    pub fn entries(&self) -> &BTreeMap<(u64, i64), OrderedValue> {
        &self.entries
    }

    pub fn entry(&self, g: u64, n: i64) -> Option<&OrderedValue> {
        self.entries.get(&(g, n))
    }

    pub fn g_max(&self) -> u64 {
        self.g_max
    }

    pub fn n_range(&self) -> (i64, i64) {
        (self.n_min, self.n_max)
    }
}

/// A value of `A_G`. Beyond the table's coverage the function can only
/// say that no covered genus reaches `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AgValue {
    Finite(u64),
    /// `r` exceeds every entry with `g ≤ g_max`: the value is `∞` on the
    /// covered range, and at least `g_max + 1` in any extension.
    InfiniteBeyondCoverage {
        g_max: u64,
    },
}

impl fmt::Display for AgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(g) => write!(f, "{g}"),
            Self::InfiniteBeyondCoverage { g_max } => write!(f, "inf (table covers g <= {g_max})"),
        }
    }
}

/// `A_G(r, n)`: the least `g` with `entry(g, n) = r`; `g + 1` when `r`
/// falls strictly between `entry(g, n)` and `entry(g + 1, n)`; `0` below
/// `entry(0, n)`; infinite above every covered entry.
pub fn a_g(r: &OrderedValue, n: i64, t: &DiskBundleTable) -> Result<AgValue> {
    if n < t.n_min || n > t.n_max {
        return Err(Error::InvalidValue(format!(
            "self-intersection {n} outside the table range [{}, {}]",
            t.n_min, t.n_max
        )));
    }
    // entries are monotone in g, so the first g with entry ≥ r covers
    // both the equality and the strict-gap cases
    Ok((0..=t.g_max).find(|&g| t.entries[&(g, n)] >= *r).map_or(
        AgValue::InfiniteBeyondCoverage { g_max: t.g_max },
        AgValue::Finite,
    ))
}

/// Lower bound `g_X(α) ≥ A_G(G_X(α), α·α)`.
pub fn genus_lower_bound(
    g_value: &OrderedValue,
    self_int: i64,
    t: &DiskBundleTable,
) -> Result<AgValue> {
    a_g(g_value, self_int, t)
}

/// Whether a claimed genus is compatible with a lower bound. Past the
/// table's coverage, only claims above `g_max` remain possible.
pub fn check_genus_bound(claimed: u64, bound: AgValue) -> bool {
    match bound {
        AgValue::Finite(b) => claimed >= b,
        AgValue::InfiniteBeyondCoverage { g_max } => claimed > g_max,
    }
}

/// A class `α` in a lattice with form `Q`, with the signature of `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharClassInstance {
    form: IntMatrix,
    alpha: Vec<BigInt>,
    sigma: i64,
}

impl CharClassInstance {
    /// Requires `Q` symmetric and `α` characteristic: `α·x ≡ x·x (mod 2)`
    /// for every basis vector `x`, which suffices by bilinearity.
    pub fn new(form: IntMatrix, alpha: Vec<BigInt>) -> Result<Self> {
        if !form.is_square() || !form.is_symmetric() {
            return Err(Error::InvalidValue(
                "form must be a symmetric square matrix".into(),
            ));
        }
        if alpha.len() != form.rows() {
            return Err(Error::Dimension(format!(
                "class has {} coordinates, form has rank {}",
                alpha.len(),
                form.rows()
            )));
        }
        let q_alpha = form.apply(&alpha);
        for (i, v) in q_alpha.iter().enumerate() {
            if (v - form.get(i, i)).is_odd() {
                return Err(Error::Precondition(format!(
                    "class is not characteristic: pairing with e{} has the wrong parity",
                    i + 1
                )));
            }
        }
        let sigma = linalg::signature(&form)?
            .to_i64()
            .ok_or_else(|| Error::Capacity("signature exceeds i64".into()))?;
        Ok(Self { form, alpha, sigma })
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn alpha(&self) -> &[BigInt] {
        &self.alpha
    }

    pub fn sigma(&self) -> i64 {
        self.sigma
    }

    pub fn self_intersection(&self) -> BigInt {
        self.form.bilinear(&self.alpha, &self.alpha)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KervaireMilnor {
    /// `α·α − σ` reduced into `[-8, 8)`.
    pub residue: i64,
    pub positive_genus_forced: bool,
}

/// A characteristic class represented by a sphere has `α·α ≡ σ (mod 16)`,
/// so a non-zero residue forces positive genus.
pub fn kervaire_milnor_obstruction(c: &CharClassInstance) -> KervaireMilnor {
    let diff = c.self_intersection() - BigInt::from(c.sigma);
    let r = diff
        .mod_floor(&BigInt::from(16))
        .to_i64()
        .expect("residue below 16");
    let residue = if r >= 8 { r - 16 } else { r };
    KervaireMilnor {
        residue,
        positive_genus_forced: residue != 0,
    }
}

/// `H₂/Tor` with the torsion-free genus table `g*(A) = min g(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionFreeReduction {
    pub module: DecoratedModule,
    /// Classes `A` for which not every `α` with free part `A` has a table
    /// entry, so the minimum may be too large.
    pub partial: BTreeSet<Vec<BigInt>>,
}

pub fn torsion_free_reduce(d: &DecoratedModule) -> Result<TorsionFreeReduction> {
    let free = d.free_indices();
    let k = free.len();
    let mut form = IntMatrix::zeros(k, k);
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            form.set(a, b, d.form().get(i, j).clone());
        }
    }
    let torsion_size = d.group().torsion_order();
    let mut best: GTable = GTable::new();
    let mut seen: BTreeMap<Vec<BigInt>, BigInt> = BTreeMap::new();
    for (key, v) in d.gvalues() {
        let a: Vec<BigInt> = free.iter().map(|&i| key[i].clone()).collect();
        *seen.entry(a.clone()).or_insert_with(BigInt::zero) += 1;
        best.entry(a)
            .and_modify(|w| {
                if v < w {
                    *w = v.clone();
                }
            })
            .or_insert_with(|| v.clone());
    }
    let partial = seen
        .into_iter()
        .filter(|(_, count)| *count < torsion_size)
        .map(|(a, _)| a)
        .collect();
    let module = DecoratedModule::free(form)?.with_gvalues(best)?;
    Ok(TorsionFreeReduction { module, partial })
}

/// `H₂(X) ⊕ H₂(Z)` for a sum of `X` with a piece `Z` of a surgered
/// 4-sphere. The form is `(Q_X, 0)`. `g_X` is copied on `H₂(X)`; a class
/// `α + β` with both parts in the tables gets the upper estimate
/// `g_X(α) + g_Z(β)`, which is exact whenever `g_Z(β) = 0`.
pub fn sum_model(x: &DecoratedModule, z: &DecoratedModule) -> Result<DecoratedModule> {
    if !z.form().is_zero() {
        return Err(Error::Precondition(
            "a piece of a surgered 4-sphere carries the zero form".into(),
        ));
    }
    let s = x.direct_sum_structure(z);
    let zero = OrderedValue::finite(0);
    let mut xs: Vec<(Vec<BigInt>, OrderedValue)> = x
        .gvalues()
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if !x.gvalues().contains_key(&x.zero_vector()) {
        xs.push((x.zero_vector(), zero.clone()));
    }
    let mut zs: Vec<(Vec<BigInt>, OrderedValue)> = z
        .gvalues()
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if !z.gvalues().contains_key(&z.zero_vector()) {
        zs.push((z.zero_vector(), zero));
    }
    let mut table = GTable::new();
    for (a, ga) in &xs {
        for (b, gb) in &zs {
            if a.iter().chain(b).all(Zero::is_zero)
                && !x.gvalues().contains_key(a)
                && !z.gvalues().contains_key(b)
            {
                continue;
            }
            let mut key = a.clone();
            key.extend(b.iter().cloned());
            table.insert(key, ga.saturating_add(gb));
        }
    }
    s.with_gvalues(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumStabilityMode {
    /// `H₂(Zᵢ) = 0`: the sums are equivalent iff the `Xᵢ` are.
    H2Zero,
    /// Non-degenerate `Xᵢ` with the torsion hypotheses: equivalent sums
    /// force equivalent `Xᵢ`, and with torsion-free `H₂(Xᵢ)` equivalent
    /// restrictions to `H₂(Zᵢ)`.
    Nondegenerate,
}

impl fmt::Display for SumStabilityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::H2Zero => "h2zero",
            Self::Nondegenerate => "nondegenerate",
        })
    }
}

impl std::str::FromStr for SumStabilityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h2zero" => Ok(Self::H2Zero),
            "nondegenerate" => Ok(Self::Nondegenerate),
            other => Err(Error::InvalidValue(format!(
                "unknown stability mode {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumStabilityReport {
    pub mode: SumStabilityMode,
    pub before: Equivalence,
    pub after: Equivalence,
    pub z_parts: Option<Equivalence>,
    pub consistent: bool,
}

fn restrict_to_tail(d: &DecoratedModule, start: usize) -> Result<DecoratedModule> {
    let n = d.rank();
    let orders = d.orders()[start..].to_vec();
    let form = d.form().submatrix(start..n, start..n);
    let table = d
        .gvalues()
        .iter()
        .filter(|(k, _)| k[..start].iter().all(Zero::is_zero))
        .map(|(k, v)| (k[start..].to_vec(), v.clone()))
        .collect();
    DecoratedModule::new(orders, form, table)
}

fn nondegenerate_free_part(d: &DecoratedModule) -> bool {
    let free = d.free_indices();
    let mut q = IntMatrix::zeros(free.len(), free.len());
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            q.set(a, b, d.form().get(i, j).clone());
        }
    }
    linalg::is_nondegenerate(&q)
}

/// Compares bounded equivalence of `(X₁, X₂)` with that of the sum models
/// and checks the stability statement for `mode`. Only certified verdicts
/// count as equivalences.
pub fn sum_stability_check(
    d1: &DecoratedModule,
    d2: &DecoratedModule,
    z1: &DecoratedModule,
    z2: &DecoratedModule,
    mode: SumStabilityMode,
    bound: i64,
) -> Result<SumStabilityReport> {
    match mode {
        SumStabilityMode::H2Zero => {
            if z1.rank() != 0 || z2.rank() != 0 {
                return Err(Error::Refused(
                    "mode h2zero needs H2(Z) = 0 on both sides".into(),
                ));
            }
        }
        SumStabilityMode::Nondegenerate => {
            if !nondegenerate_free_part(d1) || !nondegenerate_free_part(d2) {
                return Err(Error::Refused(
                    "mode nondegenerate needs non-degenerate forms on X".into(),
                ));
            }
            let x_free = d1.is_torsion_free() && d2.is_torsion_free();
            let z_free = z1.is_torsion_free() && z2.is_torsion_free();
            if !x_free && !z_free {
                return Err(Error::Refused(
                    "mode nondegenerate needs H2(X) or H2(Z) torsion-free on both sides".into(),
                ));
            }
        }
    }
    let s1 = sum_model(d1, z1)?;
    let s2 = sum_model(d2, z2)?;
    let before = algebraically_equivalent(d1, d2, bound)?;
    let after = algebraically_equivalent(&s1, &s2, bound)?;
    let (consistent, z_parts) = match mode {
        SumStabilityMode::H2Zero => (before.is_certified() == after.is_certified(), None),
        SumStabilityMode::Nondegenerate => {
            let mut ok = !after.is_certified() || before.is_certified();
            let mut z_parts = None;
            if after.is_certified() && d1.is_torsion_free() && d2.is_torsion_free() {
                let r1 = restrict_to_tail(&s1, d1.rank())?;
                let r2 = restrict_to_tail(&s2, d2.rank())?;
                let zeq = algebraically_equivalent(&r1, &r2, bound)?;
                ok &= zeq.is_equivalent();
                z_parts = Some(zeq);
            }
            (ok, z_parts)
        }
    };
    Ok(SumStabilityReport {
        mode,
        before,
        after,
        z_parts,
        consistent,
    })
}
