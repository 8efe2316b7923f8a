//! Finite abelian groups, their duals, subgroups, and quotients, with
//! canonical forms throughout.
//!
//! Groups are stored by invariant factors d_1 | d_2 | … | d_r. Products of
//! groups keep their factor boundaries so that projections to factors are
//! meaningful. Characters of ∏ Z/d_i are represented as elements of the
//! same coordinate group, paired by ⟨χ, x⟩ = Σ χ_i x_i / d_i ∈ Q/Z.

use crate::error::Error;
use crate::linalg;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;

/// Largest supported group order (enforced at construction).
pub const MAX_ORDER: u128 = 1 << 32;
/// Largest supported number of cyclic coordinates.
pub const MAX_RANK: usize = 16;

/// A finite abelian group in invariant-factor form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "Z/1");
        }
        let parts: Vec<String> =
            self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FiniteAbelianGroup {
    /// Build from invariant factors; the empty list is the trivial group.
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self, Error> {
        let mut order: u128 = 1;
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::malformed(format!(
                    "invariant factors must form a divisor chain, got {} before {}",
                    w[0], w[1]
                )));
            }
        }
        for &d in &invariant_factors {
            if d < 2 {
                return Err(Error::malformed("every invariant factor must be >= 2"));
            }
            order =
                order.checked_mul(d as u128).ok_or_else(|| Error::resource("group order"))?;
            if order > MAX_ORDER {
                return Err(Error::resource("group order exceeds 2^32"));
            }
        }
        if invariant_factors.len() > MAX_RANK {
            return Err(Error::resource("group rank exceeds 16"));
        }
        Ok(Self { invariant_factors })
    }

    pub fn trivial() -> Self {
        Self { invariant_factors: Vec::new() }
    }

    /// (Z/n)^k
    pub fn elementary(n: u64, k: usize) -> Result<Self, Error> {
        Self::new(vec![n; k])
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.rank()] }
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement, Error> {
        GroupElement::reduced(&self.invariant_factors, coords)
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<GroupElement> {
        coordinate_box(&self.invariant_factors)
    }

    /// True when every nonidentity element has prime order, i.e. the group
    /// is elementary abelian.
    pub fn is_elementary_of_prime_order(&self) -> bool {
        match self.invariant_factors.first() {
            None => true,
            Some(&p) => {
                is_prime(p) && self.invariant_factors.iter().all(|&d| d == p)
            }
        }
    }

    /// All automorphisms, each given by the images of the unit generators.
    /// Brute force; intended for small groups.
    pub fn automorphisms(&self) -> Vec<Vec<GroupElement>> {
        let r = self.rank();
        if r == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        // The image of the i-th unit generator must have order dividing d_i.
        let candidates: Vec<Vec<GroupElement>> = (0..r)
            .map(|i| {
                let d = self.invariant_factors[i];
                self.elements()
                    .into_iter()
                    .filter(|e| d % e.order(&self.invariant_factors) == 0)
                    .collect()
            })
            .collect();
        let mut stack = vec![0usize; r];
        'outer: loop {
            let images: Vec<GroupElement> =
                (0..r).map(|i| candidates[i][stack[i]].clone()).collect();
            let gens: Vec<Vec<i64>> = images
                .iter()
                .map(|g| g.coords.iter().map(|&c| c as i64).collect())
                .collect();
            let sub = Subgroup::from_generators(&self.invariant_factors, &gens)
                .expect("automorphism candidate generators are valid");
            if sub.order() == self.order() {
                out.push(images);
            }
            for i in (0..r).rev() {
                stack[i] += 1;
                if stack[i] < candidates[i].len() {
                    continue 'outer;
                }
                stack[i] = 0;
                if i == 0 {
                    break 'outer;
                }
            }
        }
        out
    }

    /// Apply an automorphism (images of unit generators) to an element.
    pub fn apply_map(&self, images: &[GroupElement], x: &GroupElement) -> GroupElement {
        let r = self.rank();
        let mut acc = vec![0u64; r];
        for (i, img) in images.iter().enumerate() {
            for j in 0..r {
                let d = self.invariant_factors[j];
                acc[j] = (acc[j] + (x.coords[i] % d) * (img.coords[j] % d)) % d;
            }
        }
        GroupElement { coords: acc }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// An element of a coordinate group ∏ Z/d_i (or of its dual, represented
/// identically).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl GroupElement {
    pub fn reduced(moduli: &[u64], coords: &[i64]) -> Result<Self, Error> {
        if coords.len() != moduli.len() {
            return Err(Error::malformed(format!(
                "element has {} coordinates, ambient group has rank {}",
                coords.len(),
                moduli.len()
            )));
        }
        Ok(Self {
            coords: coords
                .iter()
                .zip(moduli)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        })
    }

    pub fn from_coords(moduli: &[u64], coords: Vec<u64>) -> Self {
        debug_assert_eq!(coords.len(), moduli.len());
        Self { coords: coords.iter().zip(moduli).map(|(&c, &d)| c % d).collect() }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self, moduli: &[u64]) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .zip(moduli)
                .map(|((&a, &b), &d)| (a + b) % d)
                .collect(),
        }
    }

    pub fn neg(&self, moduli: &[u64]) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(moduli)
                .map(|(&a, &d)| if a == 0 { 0 } else { d - a })
                .collect(),
        }
    }

    pub fn scale(&self, k: u64, moduli: &[u64]) -> Self {
        Self {
            coords: self
                .coords
                .iter()
                .zip(moduli)
                .map(|(&a, &d)| ((a as u128 * k as u128) % d as u128) as u64)
                .collect(),
        }
    }

    pub fn order(&self, moduli: &[u64]) -> u64 {
        let mut ord = 1u64;
        for (&c, &d) in self.coords.iter().zip(moduli) {
            let o = d / gcd(c, d);
            ord = lcm(ord, o);
        }
        ord
    }

    /// Slice out the coordinates of one product block.
    pub fn block(&self, range: Range<usize>) -> GroupElement {
        GroupElement { coords: self.coords[range].to_vec() }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

fn coordinate_box(moduli: &[u64]) -> Vec<GroupElement> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; moduli.len()];
    loop {
        out.push(GroupElement { coords: cur.clone() });
        let mut i = moduli.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < moduli[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// An exact value of the Q/Z pairing, reduced to [0, 1).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PairingValue {
    pub numerator: u64,
    pub denominator: u64,
}

impl PairingValue {
    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }
}

/// ⟨χ, x⟩ = Σ χ_i x_i / d_i mod 1 as an exact reduced rational.
pub fn pairing(moduli: &[u64], chi: &GroupElement, x: &GroupElement) -> Result<PairingValue, Error> {
    if chi.coords.len() != moduli.len() || x.coords.len() != moduli.len() {
        return Err(Error::malformed("pairing arguments must match the ambient rank"));
    }
    let m: u64 = moduli.iter().fold(1u64, |acc, &d| lcm(acc, d)).max(1);
    let mut num: u128 = 0;
    for ((&c, &v), &d) in chi.coords.iter().zip(&x.coords).zip(moduli) {
        let term = (c as u128 % d as u128) * (v as u128 % d as u128) % d as u128;
        num = (num + term * (m / d) as u128) % m as u128;
    }
    let num = num as u64;
    let g = gcd(num, m);
    Ok(PairingValue { numerator: num / g, denominator: m / g })
}

/// An explicit product ∏ G_j, retaining the factor boundaries.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ProductGroup {
    factors: Vec<FiniteAbelianGroup>,
}

impl ProductGroup {
    pub fn new(factors: Vec<FiniteAbelianGroup>) -> Result<Self, Error> {
        let rank: usize = factors.iter().map(FiniteAbelianGroup::rank).sum();
        if rank > MAX_RANK {
            return Err(Error::resource("product rank exceeds 16"));
        }
        let mut order: u128 = 1;
        for f in &factors {
            order = order
                .checked_mul(f.order() as u128)
                .ok_or_else(|| Error::resource("product order"))?;
        }
        if order > MAX_ORDER {
            return Err(Error::resource("product order exceeds 2^32"));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[FiniteAbelianGroup] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn moduli(&self) -> Vec<u64> {
        self.factors.iter().flat_map(|f| f.invariant_factors().iter().copied()).collect()
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(FiniteAbelianGroup::rank).sum()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(FiniteAbelianGroup::order).product()
    }

    pub fn block_range(&self, j: usize) -> Range<usize> {
        let start: usize = self.factors[..j].iter().map(FiniteAbelianGroup::rank).sum();
        start..start + self.factors[j].rank()
    }

    /// Assemble an element from per-factor blocks.
    pub fn from_blocks(&self, blocks: &[GroupElement]) -> GroupElement {
        let coords: Vec<u64> =
            blocks.iter().flat_map(|b| b.coords().iter().copied()).collect();
        GroupElement::from_coords(&self.moduli(), coords)
    }
}

/// A subgroup of ∏ Z/d_i in canonical (Hermite) form.
///
/// Two values over the same moduli compare equal exactly when they contain
/// the same elements. The annihilator is computed lazily and cached;
/// clones of a subgroup share the cached value.
pub struct Subgroup {
    moduli: Vec<u64>,
    basis: Vec<Vec<u64>>,
    order: u64,
    perp: std::sync::OnceLock<std::sync::Arc<Subgroup>>,
    element_list: std::sync::OnceLock<std::sync::Arc<Vec<GroupElement>>>,
}

impl Clone for Subgroup {
    fn clone(&self) -> Self {
        let perp = std::sync::OnceLock::new();
        if let Some(v) = self.perp.get() {
            let _ = perp.set(v.clone());
        }
        let element_list = std::sync::OnceLock::new();
        if let Some(v) = self.element_list.get() {
            let _ = element_list.set(v.clone());
        }
        Self {
            moduli: self.moduli.clone(),
            basis: self.basis.clone(),
            order: self.order,
            perp,
            element_list,
        }
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.moduli == other.moduli && self.basis == other.basis
    }
}

impl Eq for Subgroup {}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.moduli, &self.basis).cmp(&(&other.moduli, &other.basis))
    }
}

impl std::hash::Hash for Subgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.moduli.hash(state);
        self.basis.hash(state);
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subgroup")
            .field("moduli", &self.moduli)
            .field("basis", &self.basis)
            .field("order", &self.order)
            .finish()
    }
}

impl Subgroup {
    pub fn from_generators(moduli: &[u64], gens: &[Vec<i64>]) -> Result<Self, Error> {
        for g in gens {
            if g.len() != moduli.len() {
                return Err(Error::malformed(format!(
                    "subgroup generator has {} coordinates, ambient rank is {}",
                    g.len(),
                    moduli.len()
                )));
            }
        }
        let rows: Vec<Vec<i128>> =
            gens.iter().map(|g| g.iter().map(|&v| v as i128).collect()).collect();
        Ok(Self::from_basis_unchecked(moduli, linalg::hnf_with_moduli(&rows, moduli)))
    }

    pub fn from_elements_basis(moduli: &[u64], gens: &[GroupElement]) -> Self {
        let rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| g.coords().iter().map(|&v| v as i128).collect())
            .collect();
        Self::from_basis_unchecked(moduli, linalg::hnf_with_moduli(&rows, moduli))
    }

    fn from_basis_unchecked(moduli: &[u64], basis: Vec<Vec<u64>>) -> Self {
        let mut order = 1u64;
        for (i, &d) in moduli.iter().enumerate() {
            order *= d / basis[i][i];
        }
        Self {
            moduli: moduli.to_vec(),
            basis,
            order,
            perp: std::sync::OnceLock::new(),
            element_list: std::sync::OnceLock::new(),
        }
    }

    pub fn trivial(moduli: &[u64]) -> Self {
        Self::from_generators(moduli, &[]).expect("empty generating set")
    }

    pub fn full(moduli: &[u64]) -> Self {
        let r = moduli.len();
        let gens: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| (i == j) as i64).collect())
            .collect();
        Self::from_generators(moduli, &gens).expect("unit generators")
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn ambient_order(&self) -> u64 {
        self.moduli.iter().product()
    }

    /// The canonical HNF basis (full r×r upper-triangular matrix).
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Generator rows that are nonzero in the ambient group; the canonical
    /// external presentation.
    pub fn generator_rows(&self) -> Vec<Vec<u64>> {
        self.basis
            .iter()
            .filter(|row| {
                row.iter().zip(&self.moduli).any(|(&v, &d)| v % d != 0)
            })
            .map(|row| row.iter().zip(&self.moduli).map(|(&v, &d)| v % d).collect())
            .collect()
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        let lifted: Vec<i128> = x.coords().iter().map(|&v| v as i128).collect();
        linalg::lattice_contains(&self.basis, &lifted)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.moduli == other.moduli
            && self
                .basis
                .iter()
                .all(|row| linalg::lattice_contains(&other.basis, &row.iter().map(|&v| v as i128).collect::<Vec<_>>()))
    }

    /// All elements, in lexicographic order of their reduced coordinates;
    /// the list is computed once and shared between clones.
    pub fn elements_shared(&self) -> std::sync::Arc<Vec<GroupElement>> {
        self.element_list
            .get_or_init(|| std::sync::Arc::new(self.compute_elements()))
            .clone()
    }

    /// All elements, in lexicographic order of their reduced coordinates.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.elements_shared().as_ref().clone()
    }

    /// Fill the annihilator and element caches so that clones share them.
    pub fn warm_caches(&self) {
        let arc = self
            .perp
            .get_or_init(|| std::sync::Arc::new(self.compute_annihilator()));
        let _ = arc.elements_shared();
        let _ = self.elements_shared();
    }

    fn compute_elements(&self) -> Vec<GroupElement> {
        let r = self.moduli.len();
        let box_sizes: Vec<u64> =
            (0..r).map(|i| self.moduli[i] / self.basis[i][i]).collect();
        let mut out = Vec::with_capacity(self.order as usize);
        let mut coeff = vec![0u64; r];
        loop {
            let mut coords = vec![0u64; r];
            for i in 0..r {
                if coeff[i] != 0 {
                    for j in 0..r {
                        let d = self.moduli[j];
                        coords[j] =
                            (coords[j] + (coeff[i] % d) * (self.basis[i][j] % d)) % d;
                    }
                }
            }
            out.push(GroupElement { coords });
            let mut i = r;
            let mut done = r == 0;
            loop {
                if i == 0 {
                    done = true;
                    break;
                }
                i -= 1;
                coeff[i] += 1;
                if coeff[i] < box_sizes[i] {
                    break;
                }
                coeff[i] = 0;
            }
            if done {
                break;
            }
        }
        out.sort();
        out.dedup();
        debug_assert_eq!(out.len() as u64, self.order);
        out
    }

    /// The annihilator H^⊥ = {χ : ⟨χ, h⟩ = 0 for all h ∈ H} in the dual
    /// group (same coordinate moduli).
    pub fn annihilator(&self) -> Subgroup {
        self.perp
            .get_or_init(|| std::sync::Arc::new(self.compute_annihilator()))
            .as_ref()
            .clone()
    }

    fn compute_annihilator(&self) -> Subgroup {
        if self.moduli.is_empty() {
            return self.clone();
        }
        // With B the basis of the lattice of H and C·B = diag(d), the rows
        // of Cᵀ span the lattice of H^⊥.
        let c = linalg::moduli_coefficients(&self.basis, &self.moduli);
        let r = self.moduli.len();
        // row j of the annihilator basis is column j of C; coordinate i is
        // reduced modulo the i-th ambient modulus
        let rows: Vec<Vec<i128>> = (0..r)
            .map(|j| {
                (0..r)
                    .map(|i| {
                        let v = &c[i][j] % BigInt::from(self.moduli[i]);
                        let v = if v < BigInt::zero() { v + BigInt::from(self.moduli[i]) } else { v };
                        v.to_i128().expect("reduced coefficient fits i128")
                    })
                    .collect()
            })
            .collect();
        Subgroup::from_basis_unchecked(
            &self.moduli,
            linalg::hnf_with_moduli(&rows, &self.moduli),
        )
    }

    /// Invariant factors of the quotient (∏ Z/d_i) / H.
    pub fn quotient_invariants(&self) -> FiniteAbelianGroup {
        let rows: Vec<Vec<BigInt>> = self
            .basis
            .iter()
            .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        FiniteAbelianGroup::new(linalg::cokernel_invariants(&rows))
            .expect("quotient of a supported group is supported")
    }

    /// An invariant-factor presentation of H itself: the abstract group and
    /// one generator per cyclic part, compatible coordinates.
    pub fn decompose(&self) -> (FiniteAbelianGroup, Vec<GroupElement>) {
        if self.moduli.is_empty() || self.order == 1 {
            return (FiniteAbelianGroup::trivial(), Vec::new());
        }
        // H ≅ Z^r / rowspan(C) with C·B = diag(d); Smith form of C gives the
        // cyclic decomposition, V⁻¹ rows pull generators back to B-coords.
        let c = linalg::moduli_coefficients(&self.basis, &self.moduli);
        let (diag, vinv) = linalg::smith_normal_form(&c);
        let mut factors = Vec::new();
        let mut gens = Vec::new();
        for (k, s) in diag.iter().enumerate() {
            let s = s.to_u64().expect("finite invariant");
            if s > 1 {
                factors.push(s);
                let mut coords = vec![0u64; self.moduli.len()];
                for (i, z) in vinv[k].iter().enumerate() {
                    for j in 0..self.moduli.len() {
                        let d = BigInt::from(self.moduli[j]);
                        let term = (z * BigInt::from(self.basis[i][j])) % &d;
                        let term =
                            if term < BigInt::zero() { term + &d } else { term };
                        coords[j] = (coords[j]
                            + term.to_u64().expect("reduced coordinate"))
                            % self.moduli[j];
                    }
                }
                gens.push(GroupElement { coords });
            }
        }
        let group = FiniteAbelianGroup::new(factors).expect("subgroup of supported group");
        debug_assert_eq!(group.order(), self.order);
        (group, gens)
    }

    /// Image of the subgroup under coordinate projection onto the given
    /// coordinate set, as a subgroup of the smaller ambient.
    pub fn project(&self, keep: &[usize]) -> Subgroup {
        let sub_moduli: Vec<u64> = keep.iter().map(|&i| self.moduli[i]).collect();
        let rows: Vec<Vec<i64>> = self
            .basis
            .iter()
            .map(|row| keep.iter().map(|&i| row[i] as i64).collect())
            .collect();
        Subgroup::from_generators(&sub_moduli, &rows).expect("projection of valid basis")
    }
}

/// Surjectivity of the per-factor projections and injectivity of the
/// projections omitting pairs of factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionChecks {
    pub surjective_onto: Vec<bool>,
    pub injective_omitting: Vec<Vec<bool>>,
}

pub fn projection_checks(product: &ProductGroup, h: &Subgroup) -> ProjectionChecks {
    let m = product.num_factors();
    let surjective_onto: Vec<bool> = (0..m)
        .map(|j| {
            let keep: Vec<usize> = product.block_range(j).collect();
            h.project(&keep).order() == product.factors()[j].order()
        })
        .collect();
    let mut injective_omitting = vec![vec![false; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let keep: Vec<usize> = (0..m)
                .filter(|&k| k != i && k != j)
                .flat_map(|k| product.block_range(k))
                .collect();
            injective_omitting[i][j] = h.project(&keep).order() == h.order();
        }
    }
    ProjectionChecks { surjective_onto, injective_omitting }
}

/// All subgroups of ∏ Z/d_i, as canonical forms in lexicographic basis
/// order. Every candidate Hermite matrix is tested for containing the
/// relation lattice, so each subgroup appears exactly once.
pub fn enumerate_subgroups(moduli: &[u64], max_candidates: u64) -> Result<Vec<Subgroup>, Error> {
    let r = moduli.len();
    let divisor_lists: Vec<Vec<u64>> = moduli
        .iter()
        .map(|&d| (1..=d).filter(|k| d % k == 0).collect())
        .collect();
    // Candidate count: ∏_j Σ_{h | d_j} h^j.
    let mut estimate: u128 = 1;
    for (j, divs) in divisor_lists.iter().enumerate() {
        let col: u128 = divs.iter().map(|&h| (h as u128).pow(j as u32)).sum();
        estimate = estimate.saturating_mul(col);
    }
    if estimate > max_candidates as u128 {
        return Err(Error::resource(format!(
            "subgroup enumeration would scan {estimate} candidate bases (limit {max_candidates})"
        )));
    }

    let mut out = Vec::new();
    let mut basis: Vec<Vec<u64>> = (0..r).map(|_| vec![0u64; r]).collect();
    fn rec(
        col: usize,
        r: usize,
        moduli: &[u64],
        divisor_lists: &[Vec<u64>],
        basis: &mut Vec<Vec<u64>>,
        out: &mut Vec<Subgroup>,
    ) {
        if col == r {
            for (j, &d) in moduli.iter().enumerate() {
                let mut target = vec![0i128; r];
                target[j] = d as i128;
                if !linalg::lattice_contains(basis, &target) {
                    return;
                }
            }
            out.push(Subgroup::from_basis_unchecked(moduli, basis.clone()));
            return;
        }
        for &h in &divisor_lists[col] {
            basis[col][col] = h;
            // enumerate the above-pivot entries of this column
            fn fill(
                row: usize,
                col: usize,
                r: usize,
                moduli: &[u64],
                divisor_lists: &[Vec<u64>],
                basis: &mut Vec<Vec<u64>>,
                out: &mut Vec<Subgroup>,
            ) {
                if row == col {
                    rec(col + 1, r, moduli, divisor_lists, basis, out);
                    return;
                }
                let h = basis[col][col];
                for v in 0..h {
                    basis[row][col] = v;
                    fill(row + 1, col, r, moduli, divisor_lists, basis, out);
                }
                basis[row][col] = 0;
            }
            fill(0, col, r, moduli, divisor_lists, basis, out);
        }
        basis[col][col] = 0;
    }
    rec(0, r, moduli, &divisor_lists, &mut basis, &mut out);
    out.sort_by(|a, b| a.basis.cmp(&b.basis));
    Ok(out)
}
