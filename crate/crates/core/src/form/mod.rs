//! Finitely generated abelian groups with a symmetric form and a partial
//! ordered-set-valued map on classes.
//!
//! A [`DecoratedModule`] is presented by cyclic generators: generator `i`
//! has order `orders[i]`, where `0` means infinite cyclic. Coefficient
//! vectors are reduced so that torsion coordinates lie in `[0, order)`,
//! which makes table keys canonical.

mod isometry;
mod split;

pub use isometry::{algebraically_equivalent, enumerate_isometries, Equivalence, MAX_SEARCH_RANK};
pub use split::{
    split_preserving_g_on_a, split_preserving_g_on_b, split_projection, ChainReplay, SplitGReport,
    SplitModule,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, FgAbelianGroup, IntMatrix};

/// Value of a genus-type function: an integer or one of the two infinities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderedValue {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl OrderedValue {
    pub fn finite(n: i64) -> Self {
        Self::Finite(BigInt::from(n))
    }

    pub fn as_finite(&self) -> Option<&BigInt> {
        match self {
            Self::Finite(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Sum with the convention that `+inf` absorbs everything except
    /// `-inf`, where the result is `-inf`.
    pub fn saturating_add(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::NegInf, _) | (_, Self::NegInf) => Self::NegInf,
            (Self::PosInf, _) | (_, Self::PosInf) => Self::PosInf,
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
        }
    }
}

impl From<i64> for OrderedValue {
    fn from(n: i64) -> Self {
        Self::finite(n)
    }
}

impl From<BigInt> for OrderedValue {
    fn from(n: BigInt) -> Self {
        Self::Finite(n)
    }
}

impl fmt::Display for OrderedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegInf => write!(f, "-inf"),
            Self::Finite(n) => write!(f, "{n}"),
            Self::PosInf => write!(f, "inf"),
        }
    }
}

impl FromStr for OrderedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "+inf" => Ok(Self::PosInf),
            "-inf" => Ok(Self::NegInf),
            _ => s
                .parse::<BigInt>()
                .map(Self::Finite)
                .map_err(|_| Error::InvalidValue(format!("`{s}` is not an integer or ±inf"))),
        }
    }
}

/// Finite table of genus-type values keyed by reduced coefficient vectors.
pub type GTable = BTreeMap<Vec<BigInt>, OrderedValue>;

/// Renders a coefficient vector as `(a,b,c)`.
pub fn format_class(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn to_bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Group, form and partial genus-type table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedModule {
    orders: Vec<BigInt>,
    form: IntMatrix,
    gvalues: GTable,
}

impl DecoratedModule {
    pub fn new(orders: Vec<BigInt>, form: IntMatrix, gvalues: GTable) -> Result<Self> {
        let n = orders.len();
        if let Some(bad) = orders.iter().find(|o| o.is_negative() || o.is_one()) {
            return Err(Error::InvalidValue(format!(
                "generator order {bad}; expected 0 (infinite) or at least 2"
            )));
        }
        if form.rows() != n || form.cols() != n {
            return Err(Error::Dimension(format!(
                "form is {}x{} but there are {n} generators",
                form.rows(),
                form.cols()
            )));
        }
        if !form.is_symmetric() {
            return Err(Error::Invariant("form is not symmetric".into()));
        }
        for (i, o) in orders.iter().enumerate() {
            if !o.is_zero() && (0..n).any(|j| !form.get(i, j).is_zero()) {
                return Err(Error::Invariant(format!(
                    "form does not vanish on torsion generator {}",
                    i + 1
                )));
            }
        }
        let mut module = Self {
            orders,
            form,
            gvalues: GTable::new(),
        };
        module.set_gvalues(gvalues)?;
        Ok(module)
    }

    /// Free module `Z^n` with the given form and an empty table.
    pub fn free(form: IntMatrix) -> Result<Self> {
        Self::new(vec![BigInt::zero(); form.rows()], form, GTable::new())
    }

    /// The zero module.
    pub fn zero() -> Self {
        Self {
            orders: Vec::new(),
            form: IntMatrix::zeros(0, 0),
            gvalues: GTable::new(),
        }
    }

    pub fn with_gvalues(mut self, gvalues: GTable) -> Result<Self> {
        self.set_gvalues(gvalues)?;
        Ok(self)
    }

    fn set_gvalues(&mut self, gvalues: GTable) -> Result<()> {
        let mut reduced = GTable::new();
        for (k, v) in gvalues {
            if k.len() != self.rank() {
                return Err(Error::Dimension(format!(
                    "table key {} has length {}, expected {}",
                    format_class(&k),
                    k.len(),
                    self.rank()
                )));
            }
            let key = self.reduce(&k);
            if let Some(prev) = reduced.get(&key) {
                if *prev != v {
                    return Err(Error::InvalidValue(format!(
                        "conflicting values {prev} and {v} for class {}",
                        format_class(&key)
                    )));
                }
            }
            reduced.insert(key, v);
        }
        self.gvalues = reduced;
        Ok(())
    }

    /// Number of cyclic generators.
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn gvalues(&self) -> &GTable {
        &self.gvalues
    }

    pub fn group(&self) -> FgAbelianGroup {
        FgAbelianGroup::from_cyclic_orders(&self.orders)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.orders.iter().all(Zero::is_zero)
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.orders[i].is_zero())
            .collect()
    }

    pub fn torsion_indices(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| !self.orders[i].is_zero())
            .collect()
    }

    /// Canonical representative: torsion coordinates reduced to `[0, order)`.
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        v.iter()
            .zip(&self.orders)
            .map(|(x, o)| {
                if o.is_zero() {
                    x.clone()
                } else {
                    x.mod_floor(o)
                }
            })
            .collect()
    }

    pub fn zero_vector(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<BigInt> {
        let mut v = self.zero_vector();
        v[i] = BigInt::one();
        v
    }

    pub fn is_zero_class(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Whether `v` is a torsion class (its free coordinates vanish).
    pub fn is_torsion_class(&self, v: &[BigInt]) -> bool {
        v.iter()
            .zip(&self.orders)
            .all(|(x, o)| !o.is_zero() || x.is_zero())
    }

    /// Order of a class, `None` for infinite order.
    pub fn class_order(&self, v: &[BigInt]) -> Option<BigInt> {
        if !self.is_torsion_class(v) {
            return None;
        }
        let r = self.reduce(v);
        let mut order = BigInt::one();
        for (x, o) in r.iter().zip(&self.orders) {
            if !o.is_zero() && !x.is_zero() {
                order = order.lcm(&(o / o.gcd(x)));
            }
        }
        Some(order)
    }

    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.form.bilinear(x, y)
    }

    pub fn g(&self, v: &[BigInt]) -> Option<&OrderedValue> {
        self.gvalues.get(&self.reduce(v))
    }

    /// Table lookup treating the map as even: a missing class falls back
    /// to the value of its negative. Genus functions satisfy
    /// `g(-α) = g(α)` since orientation reversal preserves genus.
    pub fn g_even(&self, v: &[BigInt]) -> Option<&OrderedValue> {
        self.g(v).or_else(|| {
            let neg: Vec<BigInt> = v.iter().map(|x| -x).collect();
            self.g(&neg)
        })
    }

    /// Relations as columns: `order_i · e_i` for each torsion generator.
    pub fn relation_matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = self
            .torsion_indices()
            .into_iter()
            .map(|i| {
                let mut c = self.zero_vector();
                c[i] = self.orders[i].clone();
                c
            })
            .collect();
        IntMatrix::from_columns(self.rank(), &cols).expect("columns have module rank")
    }

    /// Whether the form restricted to the free generators has non-zero
    /// determinant, i.e. the induced form on the module modulo torsion is
    /// non-degenerate.
    pub fn is_nondegenerate_mod_torsion(&self) -> bool {
        let free = self.free_indices();
        let mut q = IntMatrix::zeros(free.len(), free.len());
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                q.set(a, b, self.form.get(i, j).clone());
            }
        }
        linalg::is_nondegenerate(&q)
    }

    /// Orders and form of `self ⊕ other`; the table is left empty.
    pub fn direct_sum_structure(&self, other: &Self) -> Self {
        let mut orders = self.orders.clone();
        orders.extend(other.orders.iter().cloned());
        Self {
            orders,
            form: self.form.block_diag(&other.form),
            gvalues: GTable::new(),
        }
    }

    /// Same group and form with the form negated; the table is kept.
    pub fn negated_form(&self) -> Self {
        Self {
            orders: self.orders.clone(),
            form: self.form.neg(),
            gvalues: self.gvalues.clone(),
        }
    }

    /// Structural equality of orders and form (tables ignored).
    pub fn same_structure(&self, other: &Self) -> bool {
        self.orders == other.orders && self.form == other.form
    }
}

/// Homomorphism between decorated modules, given by its matrix on
/// generators (column `j` is the image of generator `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleHom {
    matrix: IntMatrix,
    domain: DecoratedModule,
    codomain: DecoratedModule,
}

/// Outcome of comparing genus-type tables along a homomorphism.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GCheck {
    /// Keys on which both tables have a value and the values agree.
    pub verified: Vec<Vec<BigInt>>,
    /// Keys whose partner class is absent from the other table.
    pub undecided: Vec<Vec<BigInt>>,
    /// First disagreement: (domain class, domain value, codomain value).
    pub mismatch: Option<(Vec<BigInt>, OrderedValue, OrderedValue)>,
}

impl GCheck {
    pub fn is_consistent(&self) -> bool {
        self.mismatch.is_none()
    }

    pub fn is_certified(&self) -> bool {
        self.mismatch.is_none() && self.undecided.is_empty()
    }
}

impl ModuleHom {
    pub fn new(
        matrix: IntMatrix,
        domain: DecoratedModule,
        codomain: DecoratedModule,
    ) -> Result<Self> {
        if matrix.rows() != codomain.rank() || matrix.cols() != domain.rank() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but the map goes from {} to {} generators",
                matrix.rows(),
                matrix.cols(),
                domain.rank(),
                codomain.rank()
            )));
        }
        let mut cols = Vec::with_capacity(domain.rank());
        for j in 0..domain.rank() {
            let col = codomain.reduce(&matrix.column(j));
            let d = &domain.orders[j];
            if !d.is_zero() {
                let scaled: Vec<BigInt> = col.iter().map(|x| x * d).collect();
                if !codomain.is_zero_class(&scaled) {
                    return Err(Error::Invariant(format!(
                        "generator {} has order {d} but its image {} does not",
                        j + 1,
                        format_class(&col)
                    )));
                }
            }
            cols.push(col);
        }
        let matrix = IntMatrix::from_columns(codomain.rank(), &cols)?;
        Ok(Self {
            matrix,
            domain,
            codomain,
        })
    }

    pub fn identity(d: &DecoratedModule) -> Self {
        Self {
            matrix: IntMatrix::identity(d.rank()),
            domain: d.clone(),
            codomain: d.clone(),
        }
    }

    pub fn negation(d: &DecoratedModule) -> Self {
        Self::new(IntMatrix::identity(d.rank()).neg(), d.clone(), d.clone())
            .expect("negation respects every relation")
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn domain(&self) -> &DecoratedModule {
        &self.domain
    }

    pub fn codomain(&self) -> &DecoratedModule {
        &self.codomain
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.codomain.reduce(&self.matrix.apply(v))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ModuleHom) -> Result<ModuleHom> {
        if !first.codomain.same_structure(&self.domain) {
            return Err(Error::Dimension("composition of incompatible maps".into()));
        }
        ModuleHom::new(
            self.matrix.try_mul(&first.matrix)?,
            first.domain.clone(),
            self.codomain.clone(),
        )
    }

    /// `φ(x)·φ(y) = x·y` on all pairs of generators.
    pub fn preserves_form(&self) -> bool {
        let q2 = self.codomain.form();
        let q1 = self.domain.form();
        (0..self.domain.rank()).all(|i| {
            let ci = self.matrix.column(i);
            (i..self.domain.rank())
                .all(|j| q2.bilinear(&ci, &self.matrix.column(j)) == *q1.get(i, j))
        })
    }

    fn augmented(&self) -> IntMatrix {
        self.matrix
            .hstack(&self.codomain.relation_matrix())
            .expect("same row count")
    }

    pub fn is_surjective(&self) -> bool {
        linalg::cokernel(&self.augmented()).is_trivial()
    }

    /// Isomorphic groups plus surjectivity; finitely generated abelian
    /// groups are Hopfian, so this is exactly bijectivity.
    pub fn is_isomorphism(&self) -> bool {
        self.domain.group() == self.codomain.group() && self.is_surjective()
    }

    /// Some preimage of `w`, if `w` lies in the image.
    pub fn preimage(&self, w: &[BigInt]) -> Option<Vec<BigInt>> {
        let x = linalg::solve(&self.augmented(), w)?;
        Some(self.domain.reduce(&x[..self.domain.rank()]))
    }

    pub fn inverse(&self) -> Result<ModuleHom> {
        if !self.is_isomorphism() {
            return Err(Error::Precondition("map is not an isomorphism".into()));
        }
        let cols: Vec<Vec<BigInt>> = (0..self.codomain.rank())
            .map(|j| {
                self.preimage(&self.codomain.basis_vector(j))
                    .expect("surjective map has preimages")
            })
            .collect();
        ModuleHom::new(
            IntMatrix::from_columns(self.domain.rank(), &cols)?,
            self.codomain.clone(),
            self.domain.clone(),
        )
    }

    /// Compares `G_domain(x)` with `G_codomain(φx)` for every domain key,
    /// and, when `inverse` is supplied, `G_codomain(y)` with
    /// `G_domain(φ⁻¹y)` for every codomain key. With `even`, lookups use
    /// [`DecoratedModule::g_even`].
    pub fn check_gvalues(&self, inverse: Option<&ModuleHom>, even: bool) -> GCheck {
        let lookup = |d: &'_ DecoratedModule, v: &[BigInt]| -> Option<OrderedValue> {
            if even {
                d.g_even(v).cloned()
            } else {
                d.g(v).cloned()
            }
        };
        let mut out = GCheck::default();
        for (k, v) in self.domain.gvalues() {
            match lookup(&self.codomain, &self.apply(k)) {
                Some(w) if w == *v => out.verified.push(k.clone()),
                Some(w) => {
                    out.mismatch = Some((k.clone(), v.clone(), w));
                    return out;
                }
                None => out.undecided.push(k.clone()),
            }
        }
        if let Some(inv) = inverse {
            for (k, w) in self.codomain.gvalues() {
                let pre = inv.apply(k);
                match lookup(&self.domain, &pre) {
                    Some(v) if v == *w => {}
                    Some(v) => {
                        out.mismatch = Some((pre, v, w.clone()));
                        return out;
                    }
                    None => out.undecided.push(pre),
                }
            }
        }
        out
    }
}

/// Boolean form-preservation test; see [`ModuleHom::preserves_form`].
pub fn preserves_form(phi: &ModuleHom) -> bool {
    phi.preserves_form()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_with(q: i64) -> DecoratedModule {
        DecoratedModule::free(IntMatrix::from_i64_rows(&[vec![q]])).unwrap()
    }

    #[test]
    fn ordered_value_order() {
        assert!(OrderedValue::NegInf < OrderedValue::finite(-100));
        assert!(OrderedValue::finite(100) < OrderedValue::PosInf);
        assert_eq!("inf".parse::<OrderedValue>().unwrap(), OrderedValue::PosInf);
        assert_eq!(
            "-3".parse::<OrderedValue>().unwrap(),
            OrderedValue::finite(-3)
        );
        assert!("x".parse::<OrderedValue>().is_err());
    }

    #[test]
    fn identity_and_negation_preserve() {
        let d = z_with(1);
        assert!(ModuleHom::identity(&d).preserves_form());
        assert!(preserves_form(&ModuleHom::negation(&d)));
    }

    #[test]
    fn doubling_does_not_preserve() {
        let d = z_with(1);
        let phi = ModuleHom::new(IntMatrix::from_i64_rows(&[vec![2]]), d.clone(), d).unwrap();
        assert!(!phi.preserves_form());
        assert!(!phi.is_isomorphism());
    }

    #[test]
    fn torsion_validation() {
        let d = DecoratedModule::new(
            to_bigs(&[0, 2]),
            IntMatrix::from_i64_rows(&[vec![1, 0], vec![0, 0]]),
            GTable::new(),
        )
        .unwrap();
        // torsion generator may not map to the free generator
        let bad = IntMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        assert!(ModuleHom::new(bad, d.clone(), d.clone()).is_err());
        let shear = IntMatrix::from_i64_rows(&[vec![1, 0], vec![1, 1]]);
        let phi = ModuleHom::new(shear, d.clone(), d.clone()).unwrap();
        assert!(phi.is_isomorphism());
        assert!(phi.preserves_form());
        let inv = phi.inverse().unwrap();
        assert_eq!(inv.compose(&phi).unwrap(), ModuleHom::identity(&d));
    }

    #[test]
    fn form_must_vanish_on_torsion() {
        let r = DecoratedModule::new(
            to_bigs(&[2]),
            IntMatrix::from_i64_rows(&[vec![1]]),
            GTable::new(),
        );
        assert!(matches!(r, Err(Error::Invariant(_))));
    }

    #[test]
    fn table_keys_are_reduced() {
        let mut t = GTable::new();
        t.insert(to_bigs(&[1, 3]), OrderedValue::finite(0));
        let d = DecoratedModule::new(to_bigs(&[0, 2]), IntMatrix::zeros(2, 2), t).unwrap();
        assert_eq!(d.g(&to_bigs(&[1, 1])), Some(&OrderedValue::finite(0)));
        assert_eq!(d.g(&to_bigs(&[1, -1])), Some(&OrderedValue::finite(0)));
        assert_eq!(d.class_order(&to_bigs(&[0, 1])), Some(BigInt::from(2)));
        assert_eq!(d.class_order(&to_bigs(&[1, 1])), None);
    }
}
