//! Formal building data of abelian covers.
//!
//! A factor datum records one abelian Galois cover of one base factor as a
//! total map from nontrivial characters to line-bundle classes: an integer
//! degree plus a torsion tag in a declared finite torsion group. The two
//! analyzable configuration kinds are a product quotient (∏ C_j)/H over a
//! product of elliptic curves, and a direct box cover: a single group Q
//! acting over a product base with one class tuple per character.

use crate::error::Error;
use crate::group::{FiniteAbelianGroup, GroupElement, ProductGroup, Subgroup};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Covers index their summands by full character enumeration, and
/// validation scans character pairs, so the acting group of one factor
/// (or of a box cover) is kept desk sized.
pub const MAX_CHARACTER_ENUMERATION: u64 = 1 << 10;

/// A formal line-bundle class on one base factor: its Euler characteristic
/// and a torsion tag. Cohomology ignores the tag whenever the degree is
/// nonzero; equality compares both fields so twist/pullback round-trips
/// stay exact.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct BundleClass {
    pub degree: i64,
    pub torsion: GroupElement,
}

impl BundleClass {
    pub fn trivial(torsion_group: &FiniteAbelianGroup) -> Self {
        Self { degree: 0, torsion: torsion_group.zero() }
    }

    pub fn is_trivial(&self) -> bool {
        self.degree == 0 && self.torsion.is_zero()
    }

    pub fn is_nontrivial_torsion(&self) -> bool {
        self.degree == 0 && !self.torsion.is_zero()
    }

    pub fn inverse(&self, torsion_group: &FiniteAbelianGroup) -> Self {
        Self {
            degree: -self.degree,
            torsion: self.torsion.neg(torsion_group.invariant_factors()),
        }
    }
}

/// One abelian Galois cover of one base factor.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FactorDatum {
    pub base_dim: u32,
    pub simple_factors: u32,
    pub torsion_group: FiniteAbelianGroup,
    pub group: FiniteAbelianGroup,
    /// Total map on nontrivial characters; the trivial character is the
    /// trivial class implicitly.
    pub classes: BTreeMap<GroupElement, BundleClass>,
}

impl FactorDatum {
    /// Curve factor (base an elliptic curve).
    pub fn curve(
        group: FiniteAbelianGroup,
        torsion_group: FiniteAbelianGroup,
        classes: BTreeMap<GroupElement, BundleClass>,
    ) -> Self {
        Self { base_dim: 1, simple_factors: 1, torsion_group, group, classes }
    }

    /// The class at a character; the trivial character yields the trivial
    /// class.
    pub fn class(&self, chi: &GroupElement) -> BundleClass {
        if chi.is_zero() {
            BundleClass::trivial(&self.torsion_group)
        } else {
            self.classes.get(chi).cloned().unwrap_or_else(|| {
                // validation rejects partial maps; treat a gap as trivial
                BundleClass::trivial(&self.torsion_group)
            })
        }
    }

    /// Constraint violations of this factor alone; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        self.check("factor", &mut violations);
        violations
    }

    /// g = 1 + Σ_{χ≠1} degree(χ) for a validated curve factor.
    pub fn genus(&self) -> Result<u64, Error> {
        if self.base_dim != 1 {
            return Err(Error::unsupported("genus is defined for curve factors only"));
        }
        let sum: i64 = self.classes.values().map(|c| c.degree).sum();
        Ok(1 + u64::try_from(sum).map_err(|_| Error::invalid("negative degree in building data"))?)
    }

    fn check(&self, where_: &str, violations: &mut Vec<String>) {
        let moduli = self.group.invariant_factors();
        let tmod = self.torsion_group.invariant_factors();
        if self.group.order() > MAX_CHARACTER_ENUMERATION {
            violations.push(format!(
                "{where_}: factor group order {} exceeds the class-map bound {MAX_CHARACTER_ENUMERATION}",
                self.group.order()
            ));
            return;
        }
        if self.base_dim < 1 {
            violations.push(format!("{where_}: base dimension must be >= 1"));
        }
        if self.base_dim == 1 && self.simple_factors != 1 {
            violations.push(format!(
                "{where_}: a curve factor has exactly one simple factor"
            ));
        }
        if self.simple_factors < 1 {
            violations.push(format!("{where_}: simple factor count must be >= 1"));
        }
        let mut chars = self.group.elements();
        chars.retain(|c| !c.is_zero());
        for chi in &chars {
            match self.classes.get(chi) {
                None => violations.push(format!(
                    "{where_}: missing class at character {chi:?}"
                )),
                Some(cls) => {
                    if cls.torsion.coords().len() != tmod.len() {
                        violations.push(format!(
                            "{where_}: torsion tag rank mismatch at character {chi:?}"
                        ));
                        continue;
                    }
                    if cls.degree < 0 {
                        violations.push(format!(
                            "{where_}: negative degree at character {chi:?}"
                        ));
                    }
                    if cls.is_trivial() {
                        violations.push(format!(
                            "{where_}: trivial class at nontrivial character {chi:?}"
                        ));
                    }
                }
            }
        }
        for (chi, _) in self.classes.iter() {
            if chi.coords().len() != moduli.len() {
                violations.push(format!(
                    "{where_}: character {chi:?} does not live in the factor group"
                ));
                return;
            }
            if chi.is_zero() {
                violations.push(format!(
                    "{where_}: the trivial character must not be assigned a class"
                ));
            }
        }
        // Pardini subadditivity: degree(χ) + degree(χ') >= degree(χχ').
        for a in &chars {
            for b in &chars {
                let sum = a.add(b, moduli);
                let da = self.class(a).degree;
                let db = self.class(b).degree;
                let ds = self.class(&sum).degree;
                if da >= 0 && db >= 0 && ds >= 0 && da + db < ds {
                    violations.push(format!(
                        "{where_}: subadditivity fails at ({a:?}, {b:?}): {da} + {db} < {ds}"
                    ));
                }
            }
        }
        // The zero-degree characters form a subgroup on which the torsion
        // tag is an injective homomorphism into the torsion group.
        let zero_chars: Vec<&GroupElement> =
            chars.iter().filter(|c| self.class(c).degree == 0).collect();
        for a in &zero_chars {
            for b in &zero_chars {
                let sum = a.add(b, moduli);
                let cs = self.class(&sum);
                if cs.degree != 0 {
                    violations.push(format!(
                        "{where_}: zero-degree characters are not closed: {a:?} + {b:?}"
                    ));
                    continue;
                }
                let expect = self.class(a).torsion.add(&self.class(b).torsion, tmod);
                if cs.torsion != expect {
                    violations.push(format!(
                        "{where_}: torsion tags are not additive on the etale subgroup at ({a:?}, {b:?})"
                    ));
                }
            }
        }
    }
}

/// Base-factor descriptor of a direct box cover.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BoxFactor {
    pub base_dim: u32,
    pub simple_factors: u32,
    pub torsion_group: FiniteAbelianGroup,
}

/// (C_1 × … × C_n)/H with all base factors elliptic curves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductQuotient {
    pub factors: Vec<FactorDatum>,
    pub subgroup: Subgroup,
}

/// A group Q acting over a product base, one class tuple per nontrivial
/// character of Q.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DirectBoxCover {
    pub factors: Vec<BoxFactor>,
    pub group: FiniteAbelianGroup,
    pub classes: BTreeMap<GroupElement, Vec<BundleClass>>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoverConfiguration {
    ProductQuotient(ProductQuotient),
    DirectBoxCover(DirectBoxCover),
}

/// Itemized validation outcome; `valid` exactly when no violation was
/// recorded.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ProductQuotient {
    pub fn product_group(&self) -> ProductGroup {
        ProductGroup::new(self.factors.iter().map(|f| f.group.clone()).collect())
            .expect("validated factor groups")
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (j, f) in self.factors.iter().enumerate() {
            if f.base_dim != 1 {
                violations.push(format!(
                    "factor {j}: product quotients require curve factors (base_dim 1)"
                ));
            }
            f.check(&format!("factor {j}"), &mut violations);
        }
        let moduli: Vec<u64> = self
            .factors
            .iter()
            .flat_map(|f| f.group.invariant_factors().iter().copied())
            .collect();
        if self.subgroup.moduli() != moduli.as_slice() {
            violations.push(
                "subgroup ambient does not match the product of the factor groups".into(),
            );
        }
        ValidationReport { violations }
    }

    /// The per-factor character blocks of a character of the full product.
    pub fn character_blocks(&self, chi: &GroupElement) -> Vec<GroupElement> {
        let product = self.product_group();
        (0..self.factors.len()).map(|j| chi.block(product.block_range(j))).collect()
    }

    /// Classes of one pushforward summand, indexed by a character of the
    /// full product group.
    pub fn summand_classes(&self, chi: &GroupElement) -> Vec<BundleClass> {
        self.character_blocks(chi)
            .iter()
            .zip(&self.factors)
            .map(|(block, f)| f.class(block))
            .collect()
    }

    /// Restrict the data to the characters trivial on H: the quotient cover
    /// (∏ C_j)/H → ∏ E_j as a direct box cover with group Q = (∏ G_j)/H.
    pub fn to_box_cover(&self) -> DirectBoxCover {
        let perp = self.subgroup.annihilator();
        let (q_dual, gens) = perp.decompose();
        let moduli = self.subgroup.moduli().to_vec();
        let mut classes = BTreeMap::new();
        for tau in q_dual.elements() {
            if tau.is_zero() {
                continue;
            }
            // embed τ into the dual of the product via the adapted basis
            let mut chi = GroupElement::from_coords(&moduli, vec![0; moduli.len()]);
            for (c, gen) in tau.coords().iter().zip(&gens) {
                chi = chi.add(&gen.scale(*c, &moduli), &moduli);
            }
            classes.insert(tau, self.summand_classes(&chi));
        }
        DirectBoxCover {
            factors: self
                .factors
                .iter()
                .map(|f| BoxFactor {
                    base_dim: f.base_dim,
                    simple_factors: f.simple_factors,
                    torsion_group: f.torsion_group.clone(),
                })
                .collect(),
            group: q_dual,
            classes,
        }
    }
}

impl DirectBoxCover {
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.group.order() > MAX_CHARACTER_ENUMERATION {
            violations.push(format!(
                "cover group order {} exceeds the class-map bound {MAX_CHARACTER_ENUMERATION}",
                self.group.order()
            ));
            return ValidationReport { violations };
        }
        let qmod = self.group.invariant_factors();
        let mut chars = self.group.elements();
        chars.retain(|c| !c.is_zero());
        for (j, f) in self.factors.iter().enumerate() {
            if f.base_dim < 1 {
                violations.push(format!("factor {j}: base dimension must be >= 1"));
            }
            if f.base_dim == 1 && f.simple_factors != 1 {
                violations
                    .push(format!("factor {j}: a curve factor has exactly one simple factor"));
            }
        }
        for tau in &chars {
            let Some(tuple) = self.classes.get(tau) else {
                violations.push(format!("missing class tuple at character {tau:?}"));
                continue;
            };
            if tuple.len() != self.factors.len() {
                violations.push(format!(
                    "class tuple at {tau:?} has {} entries for {} factors",
                    tuple.len(),
                    self.factors.len()
                ));
                continue;
            }
            for (j, (cls, f)) in tuple.iter().zip(&self.factors).enumerate() {
                if cls.torsion.coords().len() != f.torsion_group.rank() {
                    violations.push(format!(
                        "factor {j}: torsion tag rank mismatch at character {tau:?}"
                    ));
                }
                if cls.degree < 0 {
                    violations.push(format!(
                        "factor {j}: negative degree at character {tau:?}"
                    ));
                }
            }
            // connectedness: some factor must carry a nontrivial class
            if tuple.iter().all(BundleClass::is_trivial) {
                violations.push(format!(
                    "disconnected cover: all classes trivial at nontrivial character {tau:?}"
                ));
            }
        }
        for tau in self.classes.keys() {
            if tau.coords().len() != qmod.len() {
                violations.push(format!("character {tau:?} does not live in the cover group"));
                return ValidationReport { violations };
            }
            if tau.is_zero() {
                violations.push("the trivial character must not be assigned a class".into());
            }
        }
        // per-factor subadditivity and torsion-homomorphism constraints
        for (j, f) in self.factors.iter().enumerate() {
            let tmod = f.torsion_group.invariant_factors();
            let class_at = |tau: &GroupElement| -> BundleClass {
                if tau.is_zero() {
                    BundleClass::trivial(&f.torsion_group)
                } else {
                    self.classes
                        .get(tau)
                        .and_then(|t| t.get(j))
                        .cloned()
                        .unwrap_or_else(|| BundleClass::trivial(&f.torsion_group))
                }
            };
            for a in &chars {
                for b in &chars {
                    let sum = a.add(b, qmod);
                    let (da, db, ds) =
                        (class_at(a).degree, class_at(b).degree, class_at(&sum).degree);
                    if da >= 0 && db >= 0 && ds >= 0 && da + db < ds {
                        violations.push(format!(
                            "factor {j}: subadditivity fails at ({a:?}, {b:?})"
                        ));
                    }
                    if da == 0 && db == 0 {
                        if ds != 0 {
                            violations.push(format!(
                                "factor {j}: zero-degree characters are not closed at ({a:?}, {b:?})"
                            ));
                        } else {
                            let expect = class_at(a).torsion.add(&class_at(b).torsion, tmod);
                            if class_at(&sum).torsion != expect {
                                violations.push(format!(
                                    "factor {j}: torsion tags are not additive at ({a:?}, {b:?})"
                                ));
                            }
                        }
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn class_tuple(&self, tau: &GroupElement) -> Vec<BundleClass> {
        if tau.is_zero() {
            self.factors.iter().map(|f| BundleClass::trivial(&f.torsion_group)).collect()
        } else {
            self.classes.get(tau).cloned().unwrap_or_else(|| {
                self.factors.iter().map(|f| BundleClass::trivial(&f.torsion_group)).collect()
            })
        }
    }

    /// Twist every class by a homomorphism t: Q^∨ → T_1 × … × T_n, leaving
    /// all degrees unchanged.
    ///
    /// `images[i][j]` is the T_j-component of the image of the i-th unit
    /// generator of Q^∨.
    pub fn twist(&self, images: &[Vec<GroupElement>]) -> Result<DirectBoxCover, Error> {
        let qmod = self.group.invariant_factors();
        if images.len() != qmod.len() {
            return Err(Error::malformed(format!(
                "twist must give one image per generator of the character group ({} != {})",
                images.len(),
                qmod.len()
            )));
        }
        for (i, row) in images.iter().enumerate() {
            if row.len() != self.factors.len() {
                return Err(Error::malformed(
                    "twist image must have one torsion component per factor",
                ));
            }
            for (j, t) in row.iter().enumerate() {
                let tmod = self.factors[j].torsion_group.invariant_factors();
                if t.coords().len() != tmod.len() {
                    return Err(Error::malformed(
                        "twist image does not live in the factor torsion group",
                    ));
                }
                // homomorphism check: the i-th generator has order d_i, so
                // its image must be killed by d_i
                if !t.scale(qmod[i], tmod).is_zero() {
                    return Err(Error::malformed(format!(
                        "twist is not a homomorphism: generator {i} image has order not dividing {}",
                        qmod[i]
                    )));
                }
            }
        }
        let mut classes = BTreeMap::new();
        for (tau, tuple) in &self.classes {
            let twisted: Vec<BundleClass> = tuple
                .iter()
                .enumerate()
                .map(|(j, cls)| {
                    let tmod = self.factors[j].torsion_group.invariant_factors();
                    let mut shift = self.factors[j].torsion_group.zero();
                    for (i, row) in images.iter().enumerate() {
                        shift = shift.add(&row[j].scale(tau.coords()[i], tmod), tmod);
                    }
                    BundleClass { degree: cls.degree, torsion: cls.torsion.add(&shift, tmod) }
                })
                .collect();
            classes.insert(tau.clone(), twisted);
        }
        let out = DirectBoxCover {
            factors: self.factors.clone(),
            group: self.group.clone(),
            classes,
        };
        let report = out.validate();
        if !report.is_valid() {
            return Err(Error::invalid(format!(
                "twisted data fails validation: {}",
                report.violations.join("; ")
            )));
        }
        Ok(out)
    }

    /// Pull back along a per-factor isogeny of the base: degrees scale by
    /// the declared index k_j, torsion tags map through the declared
    /// quotient φ_j of torsion groups. Disconnection is reported, not
    /// raised.
    pub fn etale_pullback(
        &self,
        per_factor: &[EtalePullbackFactor],
    ) -> Result<(DirectBoxCover, bool), Error> {
        if per_factor.len() != self.factors.len() {
            return Err(Error::malformed("one pullback datum per factor required"));
        }
        for (j, pf) in per_factor.iter().enumerate() {
            let src = &self.factors[j].torsion_group;
            let dst_mod = pf.target.invariant_factors();
            if pf.images.len() != src.rank() {
                return Err(Error::malformed(format!(
                    "factor {j}: quotient map must list one image per torsion generator"
                )));
            }
            for (i, img) in pf.images.iter().enumerate() {
                if img.coords().len() != dst_mod.len() {
                    return Err(Error::malformed(format!(
                        "factor {j}: image {i} does not live in the target torsion group"
                    )));
                }
                if !img.scale(src.invariant_factors()[i], dst_mod).is_zero() {
                    return Err(Error::malformed(format!(
                        "factor {j}: torsion map is not a homomorphism at generator {i}"
                    )));
                }
            }
            // surjectivity and index consistency
            let rows: Vec<Vec<i64>> = pf
                .images
                .iter()
                .map(|img| img.coords().iter().map(|&v| v as i64).collect())
                .collect();
            let image = Subgroup::from_generators(dst_mod, &rows)?;
            if image.order() != pf.target.order() {
                return Err(Error::malformed(format!(
                    "factor {j}: torsion map is not surjective onto the target"
                )));
            }
            let kernel = src.order() / pf.target.order();
            if pf.index != kernel {
                return Err(Error::malformed(format!(
                    "factor {j}: declared index {} does not match the kernel order {kernel}",
                    pf.index
                )));
            }
        }
        let map_torsion = |j: usize, t: &GroupElement| -> GroupElement {
            let pf = &per_factor[j];
            let dst_mod = pf.target.invariant_factors();
            let mut acc = pf.target.zero();
            for (i, img) in pf.images.iter().enumerate() {
                acc = acc.add(&img.scale(t.coords()[i], dst_mod), dst_mod);
            }
            acc
        };
        let mut classes = BTreeMap::new();
        let mut disconnected = false;
        for (tau, tuple) in &self.classes {
            let mapped: Vec<BundleClass> = tuple
                .iter()
                .enumerate()
                .map(|(j, cls)| BundleClass {
                    degree: cls.degree * per_factor[j].index as i64,
                    torsion: map_torsion(j, &cls.torsion),
                })
                .collect();
            if mapped.iter().all(BundleClass::is_trivial) {
                disconnected = true;
            }
            classes.insert(tau.clone(), mapped);
        }
        let factors: Vec<BoxFactor> = self
            .factors
            .iter()
            .zip(per_factor)
            .map(|(f, pf)| BoxFactor {
                base_dim: f.base_dim,
                simple_factors: f.simple_factors,
                torsion_group: pf.target.clone(),
            })
            .collect();
        Ok((DirectBoxCover { factors, group: self.group.clone(), classes }, disconnected))
    }
}

/// One factor of an etale pullback: the declared covering index and the
/// quotient map of torsion groups (images of the source generators).
#[derive(Clone, Debug)]
pub struct EtalePullbackFactor {
    pub index: u64,
    pub target: FiniteAbelianGroup,
    pub images: Vec<GroupElement>,
}

impl CoverConfiguration {
    pub fn validate(&self) -> ValidationReport {
        match self {
            CoverConfiguration::ProductQuotient(pq) => pq.validate(),
            CoverConfiguration::DirectBoxCover(bx) => bx.validate(),
        }
    }

    pub fn num_factors(&self) -> usize {
        match self {
            CoverConfiguration::ProductQuotient(pq) => pq.factors.len(),
            CoverConfiguration::DirectBoxCover(bx) => bx.factors.len(),
        }
    }

    pub fn base_dims(&self) -> Vec<u32> {
        match self {
            CoverConfiguration::ProductQuotient(pq) => {
                pq.factors.iter().map(|f| f.base_dim).collect()
            }
            CoverConfiguration::DirectBoxCover(bx) => {
                bx.factors.iter().map(|f| f.base_dim).collect()
            }
        }
    }

    /// Total dimension Σ a_j of the base (and of the cover).
    pub fn total_dim(&self) -> u32 {
        self.base_dims().iter().sum()
    }

    pub fn torsion_groups(&self) -> Vec<FiniteAbelianGroup> {
        match self {
            CoverConfiguration::ProductQuotient(pq) => {
                pq.factors.iter().map(|f| f.torsion_group.clone()).collect()
            }
            CoverConfiguration::DirectBoxCover(bx) => {
                bx.factors.iter().map(|f| f.torsion_group.clone()).collect()
            }
        }
    }

    pub fn simple_factor_total(&self) -> u64 {
        match self {
            CoverConfiguration::ProductQuotient(pq) => {
                pq.factors.iter().map(|f| f.simple_factors as u64).sum()
            }
            CoverConfiguration::DirectBoxCover(bx) => {
                bx.factors.iter().map(|f| f.simple_factors as u64).sum()
            }
        }
    }

    /// Degree of the structural finite map to the product of the base
    /// factors.
    pub fn degree_albanese(&self) -> u64 {
        match self {
            CoverConfiguration::ProductQuotient(pq) => {
                pq.product_group().order() / pq.subgroup.order()
            }
            CoverConfiguration::DirectBoxCover(bx) => bx.group.order(),
        }
    }

    /// The Galois group of the structural map: Q = (∏ G_j)/H for product
    /// quotients, Q itself for box covers.
    pub fn albanese_galois_group(&self) -> FiniteAbelianGroup {
        match self {
            CoverConfiguration::ProductQuotient(pq) => pq.subgroup.quotient_invariants(),
            CoverConfiguration::DirectBoxCover(bx) => bx.group.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::pairing;

    fn grp(m: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(m.to_vec()).unwrap()
    }

    /// Double cover of an elliptic curve with one ample class of degree d.
    fn bielliptic(d: i64) -> FactorDatum {
        let g = grp(&[2]);
        let t = FiniteAbelianGroup::trivial();
        let mut classes = BTreeMap::new();
        classes.insert(g.element(&[1]).unwrap(), BundleClass { degree: d, torsion: t.zero() });
        FactorDatum::curve(g, t, classes)
    }

    /// Etale double cover of an elliptic curve (degree 0, 2-torsion tag).
    fn etale_double() -> FactorDatum {
        let g = grp(&[2]);
        let t = grp(&[2]);
        let mut classes = BTreeMap::new();
        classes.insert(
            g.element(&[1]).unwrap(),
            BundleClass { degree: 0, torsion: t.element(&[1]).unwrap() },
        );
        FactorDatum::curve(g, t, classes)
    }

    fn diagonal_quotient(factors: Vec<FactorDatum>) -> ProductQuotient {
        let moduli: Vec<u64> = factors
            .iter()
            .flat_map(|f| f.group.invariant_factors().iter().copied())
            .collect();
        let diag = vec![vec![1i64; moduli.len()]];
        let subgroup = Subgroup::from_generators(&moduli, &diag).unwrap();
        ProductQuotient { factors, subgroup }
    }

    #[test]
    fn single_ample_class_is_valid() {
        let pq = ProductQuotient {
            factors: vec![bielliptic(1)],
            subgroup: Subgroup::trivial(&[2]),
        };
        assert!(pq.validate().is_valid());
    }

    #[test]
    fn trivial_class_at_nontrivial_character_is_flagged() {
        let g = grp(&[2]);
        let t = FiniteAbelianGroup::trivial();
        let mut classes = BTreeMap::new();
        classes.insert(g.element(&[1]).unwrap(), BundleClass { degree: 0, torsion: t.zero() });
        let pq = ProductQuotient {
            factors: vec![FactorDatum::curve(g, t, classes)],
            subgroup: Subgroup::trivial(&[2]),
        };
        let report = pq.validate();
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("trivial class")));
    }

    #[test]
    fn subadditivity_violation_is_flagged() {
        let g = grp(&[4]);
        let t = FiniteAbelianGroup::trivial();
        let mut classes = BTreeMap::new();
        for (c, d) in [(1i64, 1i64), (2, 3), (3, 1)] {
            classes.insert(g.element(&[c]).unwrap(), BundleClass { degree: d, torsion: t.zero() });
        }
        let pq = ProductQuotient {
            factors: vec![FactorDatum::curve(g, t, classes)],
            subgroup: Subgroup::trivial(&[4]),
        };
        let report = pq.validate();
        assert!(report.violations.iter().any(|v| v.contains("subadditivity")));
    }

    #[test]
    fn genus_of_curve_factors() {
        assert_eq!(bielliptic(1).genus().unwrap(), 2);
        assert_eq!(etale_double().genus().unwrap(), 1);
    }

    #[test]
    fn chen_hacon_factor_genus_matches_riemann_hurwitz() {
        // (Z/2)^2-cover with classes ample(g-1), torsion, ample(g-1): the
        // cover is an etale double cover of a genus-g curve, so its genus
        // is 2g - 1.
        let g = 2i64;
        let factor = chen_hacon_factor(g);
        assert_eq!(factor.genus().unwrap(), (2 * g - 1) as u64);
    }

    fn chen_hacon_factor(g: i64) -> FactorDatum {
        let grp2 = grp(&[2, 2]);
        let t = grp(&[2]);
        let xi = t.element(&[1]).unwrap();
        let mut classes = BTreeMap::new();
        classes.insert(
            grp2.element(&[1, 0]).unwrap(),
            BundleClass { degree: g - 1, torsion: t.zero() },
        );
        classes.insert(grp2.element(&[0, 1]).unwrap(), BundleClass { degree: 0, torsion: xi.clone() });
        classes.insert(grp2.element(&[1, 1]).unwrap(), BundleClass { degree: g - 1, torsion: xi });
        FactorDatum::curve(grp2, t, classes)
    }

    #[test]
    fn box_cover_of_full_quotient_is_trivial() {
        let pq = ProductQuotient {
            factors: vec![bielliptic(1)],
            subgroup: Subgroup::full(&[2]),
        };
        let bx = pq.to_box_cover();
        assert!(bx.group.is_trivial());
        assert!(bx.classes.is_empty());
    }

    #[test]
    fn box_cover_of_ein_lazarsfeld() {
        let pq = diagonal_quotient(vec![bielliptic(1), bielliptic(1), bielliptic(1)]);
        let bx = pq.to_box_cover();
        assert_eq!(bx.group.invariant_factors(), &[2, 2]);
        assert_eq!(bx.classes.len(), 3);
        // oracle: the annihilator of the diagonal has 4 characters; each
        // nontrivial one has exactly one trivial block
        for tuple in bx.classes.values() {
            let ample = tuple.iter().filter(|c| c.degree > 0).count();
            let trivial = tuple.iter().filter(|c| c.is_trivial()).count();
            assert_eq!((ample, trivial), (2, 1));
        }
        assert!(bx.validate().is_valid());
    }

    #[test]
    fn box_cover_character_embedding_respects_pairing() {
        // every embedded character must actually annihilate H
        let pq = diagonal_quotient(vec![bielliptic(1), bielliptic(2), bielliptic(1)]);
        let perp = pq.subgroup.annihilator();
        let (q_dual, gens) = perp.decompose();
        let moduli = pq.subgroup.moduli().to_vec();
        for tau in q_dual.elements() {
            let mut chi = GroupElement::from_coords(&moduli, vec![0; moduli.len()]);
            for (c, gen) in tau.coords().iter().zip(&gens) {
                chi = chi.add(&gen.scale(*c, &moduli), &moduli);
            }
            for h in pq.subgroup.elements() {
                assert!(pairing(&moduli, &chi, &h).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn zero_twist_is_identity() {
        let pq = diagonal_quotient(vec![bielliptic(1), bielliptic(1), bielliptic(1)]);
        let bx = pq.to_box_cover();
        let zero_images: Vec<Vec<GroupElement>> = (0..bx.group.rank())
            .map(|_| bx.factors.iter().map(|f| f.torsion_group.zero()).collect())
            .collect();
        let twisted = bx.twist(&zero_images).unwrap();
        assert_eq!(twisted, bx);
    }

    #[test]
    fn twist_and_untwist_round_trip() {
        let mut factors = Vec::new();
        for _ in 0..3 {
            let g = grp(&[2]);
            let t = grp(&[2, 2]);
            let mut classes = BTreeMap::new();
            classes.insert(
                g.element(&[1]).unwrap(),
                BundleClass { degree: 1, torsion: t.zero() },
            );
            factors.push(FactorDatum::curve(g, t, classes));
        }
        let pq = diagonal_quotient(factors);
        let bx = pq.to_box_cover();
        let images: Vec<Vec<GroupElement>> = (0..bx.group.rank())
            .map(|i| {
                bx.factors
                    .iter()
                    .map(|f| {
                        let mut coords = vec![0i64; 2];
                        coords[i % 2] = 1;
                        f.torsion_group.element(&coords).unwrap()
                    })
                    .collect()
            })
            .collect();
        let neg_images: Vec<Vec<GroupElement>> = images
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&bx.factors)
                    .map(|(t, f)| t.neg(f.torsion_group.invariant_factors()))
                    .collect()
            })
            .collect();
        let there = bx.twist(&images).unwrap();
        assert_ne!(there, bx);
        let back = there.twist(&neg_images).unwrap();
        assert_eq!(back, bx);
        // degrees untouched by the twist
        for (tau, tuple) in &there.classes {
            let orig = &bx.classes[tau];
            for (a, b) in tuple.iter().zip(orig) {
                assert_eq!(a.degree, b.degree);
            }
        }
    }

    #[test]
    fn non_homomorphism_twist_is_rejected() {
        let pq = diagonal_quotient(vec![bielliptic(1), bielliptic(1), bielliptic(1)]);
        let mut factors = pq.factors.clone();
        for f in &mut factors {
            f.torsion_group = grp(&[3]);
        }
        let pq = ProductQuotient { factors, subgroup: pq.subgroup };
        let bx = pq.to_box_cover();
        // generators of Q^∨ have order 2; an order-3 image is not a hom
        let bad: Vec<Vec<GroupElement>> = (0..bx.group.rank())
            .map(|_| bx.factors.iter().map(|f| f.torsion_group.element(&[1]).unwrap()).collect())
            .collect();
        assert!(bx.twist(&bad).is_err());
    }

    #[test]
    fn identity_pullback_is_identity() {
        let pq = diagonal_quotient(vec![etale_double(), etale_double(), bielliptic(1)]);
        let bx = pq.to_box_cover();
        let per: Vec<EtalePullbackFactor> = bx
            .factors
            .iter()
            .map(|f| EtalePullbackFactor {
                index: 1,
                target: f.torsion_group.clone(),
                images: (0..f.torsion_group.rank())
                    .map(|i| {
                        let mut coords = vec![0i64; f.torsion_group.rank()];
                        coords[i] = 1;
                        f.torsion_group.element(&coords).unwrap()
                    })
                    .collect(),
            })
            .collect();
        let (pulled, disconnected) = bx.etale_pullback(&per).unwrap();
        assert_eq!(pulled, bx);
        assert!(!disconnected);
    }

    #[test]
    fn killing_all_torsion_of_purely_etale_cover_disconnects() {
        let pq = diagonal_quotient(vec![etale_double(), etale_double()]);
        let bx = pq.to_box_cover();
        let per: Vec<EtalePullbackFactor> = bx
            .factors
            .iter()
            .map(|f| EtalePullbackFactor {
                index: f.torsion_group.order(),
                target: FiniteAbelianGroup::trivial(),
                images: (0..f.torsion_group.rank())
                    .map(|_| FiniteAbelianGroup::trivial().zero())
                    .collect(),
            })
            .collect();
        let (pulled, disconnected) = bx.etale_pullback(&per).unwrap();
        assert!(disconnected);
        // degrees scale by the declared index
        for (tau, tuple) in &pulled.classes {
            for (a, b) in tuple.iter().zip(&bx.classes[tau]) {
                assert_eq!(a.degree, b.degree * 2);
            }
        }
    }

    #[test]
    fn declared_index_must_match_kernel() {
        let pq = diagonal_quotient(vec![etale_double()]);
        let bx = pq.to_box_cover();
        let per = vec![EtalePullbackFactor {
            index: 3,
            target: FiniteAbelianGroup::trivial(),
            images: vec![FiniteAbelianGroup::trivial().zero()],
        }];
        assert!(bx.etale_pullback(&per).is_err());
    }
}
