//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use kirbykit::form::{DecoratedModule, GTable, ModuleHom, OrderedValue, SplitModule};
use kirbykit::handlebody::{Handlebody2, TwoHandle};
use kirbykit::legendrian::FrontCounts;
use kirbykit::linalg::{self, IntMatrix};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let entries = (0..rows * cols)
        .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
        .collect();
    IntMatrix::new(rows, cols, entries).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = BigInt::from(rng.gen_range(-bound..=bound));
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

pub fn random_nondegenerate(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> IntMatrix {
    loop {
        let m = random_symmetric(rng, n, bound);
        if linalg::is_nondegenerate(&m) {
            return m;
        }
    }
}

/// Product of `steps` random elementary row operations with multipliers
/// in `[-1, 1]`, possibly with a sign flip.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let mut e = IntMatrix::identity(n);
        if i == j {
            e.set(i, i, BigInt::from(-1));
        } else {
            e.set(i, j, BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 }));
        }
        m = e.mul(&m);
    }
    m
}

pub fn cofactor_determinant(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let mut minor = IntMatrix::zeros(n - 1, n - 1);
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                minor.set(a, b, m.get(r, c).clone());
            }
        }
        let term = m.get(0, j) * cofactor_determinant(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn random_front(rng: &mut ChaCha8Rng) -> FrontCounts {
    let right = rng.gen_range(1..=3);
    let up = rng.gen_range(0..=2 * right);
    FrontCounts::new(rng.gen_range(-4..=4), right, up, 2 * right - up).unwrap()
}

/// Up to `k_max` 1-handles and 1..=`n_max` 2-handles with words of length
/// at most 4, linking and framings in `[-3, 3]`.
pub fn random_handlebody(
    rng: &mut ChaCha8Rng,
    k_max: usize,
    n_max: usize,
    fronts: bool,
) -> Handlebody2 {
    let k = rng.gen_range(0..=k_max);
    let n = rng.gen_range(1..=n_max);
    let handles = (0..n)
        .map(|_| {
            let len = if k == 0 { 0 } else { rng.gen_range(0..=4) };
            let word = (0..len)
                .map(|_| {
                    let g = rng.gen_range(1..=k as i64);
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            if fronts {
                TwoHandle::with_front(word, random_front(rng))
            } else {
                TwoHandle::new(word)
            }
        })
        .collect();
    let linking = random_symmetric(rng, n, 3);
    Handlebody2::new(k, handles, linking).unwrap()
}

/// A group `Z^free ⊕ (Z/2)^tors` as generator orders.
pub fn orders(free: usize, tors: usize) -> Vec<BigInt> {
    let mut o = vec![BigInt::zero(); free];
    o.extend(std::iter::repeat_n(BigInt::from(2), tors));
    o
}

/// Every class of `d` with free coordinates in `[-b, b]` and torsion
/// coordinates among the residues.
pub fn box_classes(d: &DecoratedModule, b: i64) -> Vec<Vec<BigInt>> {
    let mut out = vec![Vec::new()];
    for o in d.orders() {
        let range: Vec<i64> = if o.is_zero() {
            (-b..=b).collect()
        } else {
            (0..o.to_i64().unwrap()).collect()
        };
        out = out
            .into_iter()
            .flat_map(|v| {
                range.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(BigInt::from(x));
                    w
                })
            })
            .collect();
    }
    out
}

/// Random automorphism of `Z^f ⊕ (Z/2)^t`: unimodular on the free part,
/// arbitrary residues from free to torsion, invertible over F₂ on torsion.
pub fn random_automorphism(rng: &mut ChaCha8Rng, free: usize, tors: usize) -> IntMatrix {
    let n = free + tors;
    let p = random_unimodular(rng, free, 3);
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..free {
        for j in 0..free {
            m.set(i, j, p.get(i, j).clone());
        }
    }
    for i in free..n {
        for j in 0..free {
            m.set(i, j, BigInt::from(rng.gen_range(0..2)));
        }
    }
    // torsion block: unit lower triangular over F₂ is invertible
    for i in free..n {
        m.set(i, i, BigInt::from(1));
        for j in free..i {
            m.set(i, j, BigInt::from(rng.gen_range(0..2)));
        }
    }
    m
}

/// A pair of split modules `A_i ⊕ B_i` and a form-preserving isomorphism
/// `φ = S_B ∘ S_A ∘ (ψ ⊕ χ)` between them: `ψ` an isometry of the `A`
/// parts, `χ` an automorphism of `B`, `S_A` shears `A` into `B` and `S_B`
/// shears `B` into the torsion of `A`.
pub struct SplitInstance {
    pub a_free: usize,
    pub a_tors: usize,
    pub b_free: usize,
    pub b_tors: usize,
    pub q_a1: IntMatrix,
    pub q_a2: IntMatrix,
    pub phi: IntMatrix,
    /// `S_A` is the identity.
    pub shear_a_trivial: bool,
    /// `S_B` is the identity.
    pub shear_b_trivial: bool,
}

fn block(rows: usize, cols: usize, parts: &[(usize, usize, &IntMatrix)]) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for (r0, c0, p) in parts {
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                m.set(r0 + i, c0 + j, p.get(i, j).clone());
            }
        }
    }
    m
}

/// Reduces each row of `m` modulo the matching order (`0` means free).
pub fn reduce_rows(m: &IntMatrix, ords: &[BigInt]) -> IntMatrix {
    let mut out = m.clone();
    for (i, o) in ords.iter().enumerate() {
        if o.is_zero() {
            continue;
        }
        for j in 0..m.cols() {
            out.set(i, j, num_integer::Integer::mod_floor(m.get(i, j), o));
        }
    }
    out
}

pub fn random_split_instance(rng: &mut ChaCha8Rng, allow_shear_a: bool) -> SplitInstance {
    let a_free = rng.gen_range(1..=2);
    let a_tors = if a_free == 2 { 0 } else { rng.gen_range(0..=1) };
    let b_tors_max = if a_tors == 1 { 0 } else { 1 };
    let b_free = rng.gen_range(0..=2);
    let b_tors = if b_free == 2 {
        0
    } else {
        rng.gen_range(0..=b_tors_max)
    };
    let na = a_free + a_tors;
    let nb = b_free + b_tors;
    let n = na + nb;

    let qf = random_nondegenerate(rng, a_free, 2);
    let q_a1 = block(na, na, &[(0, 0, &qf)]);
    let psi = random_automorphism(rng, a_free, a_tors);
    let p = psi.submatrix(0..a_free, 0..a_free);
    let p_inv = linalg::unimodular_inverse(&p).unwrap();
    let q_a2 = block(na, na, &[(0, 0, &qf.congruence(&p_inv))]);
    let chi = random_automorphism(rng, b_free, b_tors);

    // S_A: a ↦ a + β(a); torsion of A may only go to torsion of B
    let mut beta = IntMatrix::zeros(nb, na);
    let shear_a_trivial = !allow_shear_a || rng.gen_bool(0.3);
    if !shear_a_trivial {
        for i in 0..nb {
            for j in 0..na {
                let torsion_target = i >= b_free;
                let torsion_source = j >= a_free;
                if torsion_source && !torsion_target {
                    continue;
                }
                let v = if torsion_target {
                    rng.gen_range(0..2)
                } else {
                    rng.gen_range(-1..=1)
                };
                beta.set(i, j, BigInt::from(v));
            }
        }
    }
    // S_B: b ↦ b + τ(b) with τ into Tor(A); torsion of B maps to order-2 elements
    let mut tau = IntMatrix::zeros(na, nb);
    let mut shear_b_trivial = true;
    for i in a_free..na {
        for j in 0..nb {
            let v = rng.gen_range(0..2);
            shear_b_trivial &= v == 0;
            tau.set(i, j, BigInt::from(v));
        }
    }
    let id_a = IntMatrix::identity(na);
    let id_b = IntMatrix::identity(nb);
    let s_a = block(n, n, &[(0, 0, &id_a), (na, 0, &beta), (na, na, &id_b)]);
    let s_b = block(n, n, &[(0, 0, &id_a), (0, na, &tau), (na, na, &id_b)]);
    let base = block(n, n, &[(0, 0, &psi), (na, na, &chi)]);
    let ords = {
        let mut o = orders(a_free, a_tors);
        o.extend(orders(b_free, b_tors));
        o
    };
    let phi = reduce_rows(&s_b.mul(&s_a).mul(&base), &ords);
    SplitInstance {
        a_free,
        a_tors,
        b_free,
        b_tors,
        q_a1,
        q_a2,
        phi,
        shear_a_trivial,
        shear_b_trivial,
    }
}

impl SplitInstance {
    pub fn a1(&self) -> DecoratedModule {
        DecoratedModule::new(
            orders(self.a_free, self.a_tors),
            self.q_a1.clone(),
            GTable::new(),
        )
        .unwrap()
    }

    pub fn a2(&self) -> DecoratedModule {
        DecoratedModule::new(
            orders(self.a_free, self.a_tors),
            self.q_a2.clone(),
            GTable::new(),
        )
        .unwrap()
    }

    pub fn b(&self) -> DecoratedModule {
        let nb = self.b_free + self.b_tors;
        DecoratedModule::new(
            orders(self.b_free, self.b_tors),
            IntMatrix::zeros(nb, nb),
            GTable::new(),
        )
        .unwrap()
    }

    pub fn na(&self) -> usize {
        self.a_free + self.a_tors
    }

    pub fn split_modules(&self, t1: GTable, t2: GTable) -> (SplitModule, SplitModule) {
        (
            SplitModule::new(self.a1(), self.b(), t1).unwrap(),
            SplitModule::new(self.a2(), self.b(), t2).unwrap(),
        )
    }

    pub fn hom(&self, s1: &SplitModule, s2: &SplitModule) -> ModuleHom {
        ModuleHom::new(self.phi.clone(), s1.total.clone(), s2.total.clone()).unwrap()
    }
}

/// Deterministic pseudo-random genus value of a class, ignoring torsion
/// coordinates at the given indices.
pub fn hashed_value(v: &[BigInt], ignore: &[usize], salt: u64) -> i64 {
    let mut h: u64 = 1469598103934665603 ^ salt;
    for (i, x) in v.iter().enumerate() {
        if ignore.contains(&i) {
            continue;
        }
        h ^= (x.to_i64().unwrap() as u64).wrapping_add(0x9e3779b97f4a7c15);
        h = h.wrapping_mul(1099511628211);
    }
    (h >> 33) as i64 % 5
}

pub fn shuffle<T>(rng: &mut ChaCha8Rng, v: &mut [T]) {
    v.shuffle(rng);
}

pub fn finite(v: i64) -> OrderedValue {
    OrderedValue::finite(v)
}

/// Split modules carrying tables on the coefficient box `|x| ≤ 2`, with
/// `G₂ = G₁ ∘ φ⁻¹` so that `φ` preserves the tables by construction.
pub struct TabledSplit {
    pub s1: SplitModule,
    pub s2: SplitModule,
    pub phi: ModuleHom,
    pub phi_inv: ModuleHom,
}

pub fn tabled_split(inst: &SplitInstance, g1: &dyn Fn(&[BigInt]) -> i64) -> TabledSplit {
    let (e1, e2) = inst.split_modules(GTable::new(), GTable::new());
    let phi0 = inst.hom(&e1, &e2);
    let inv0 = phi0.inverse().unwrap();
    let t1: GTable = box_classes(&e1.total, 2)
        .into_iter()
        .map(|x| {
            let v = g1(&x);
            (x, finite(v))
        })
        .collect();
    let t2: GTable = box_classes(&e2.total, 2)
        .into_iter()
        .map(|y| {
            let v = g1(&inv0.apply(&y));
            (y, finite(v))
        })
        .collect();
    let (s1, s2) = inst.split_modules(t1, t2);
    let phi = inst.hom(&s1, &s2);
    let phi_inv = phi.inverse().unwrap();
    TabledSplit {
        s1,
        s2,
        phi,
        phi_inv,
    }
}

/// `G(a + b) = g(a) + c·[b ≠ 0]` with `g` hashed. `g` ignores the torsion
/// of `A` when `S_B` is non-trivial, and `c = 0` when `S_A` is non-trivial;
/// both choices keep `G₂ = G₁ ∘ φ⁻¹` monotone.
pub fn monotone_genus(rng: &mut ChaCha8Rng, inst: &SplitInstance) -> impl Fn(&[BigInt]) -> i64 {
    let na = inst.na();
    let ignore: Vec<usize> = if inst.shear_b_trivial {
        Vec::new()
    } else {
        (inst.a_free..na).collect()
    };
    let penalty = if inst.shear_a_trivial {
        rng.gen_range(0..=3)
    } else {
        0
    };
    let salt = rng.gen::<u64>();
    move |x: &[BigInt]| {
        let b_nonzero = x[na..].iter().any(|v| !v.is_zero());
        hashed_value(&x[..na], &ignore, salt) + if b_nonzero { penalty } else { 0 }
    }
}
