//! Character-wise pushforward decompositions and their cohomology.
//!
//! Cohomology of a single class on one base factor of dimension a:
//! the trivial class contributes the binomial vector C(a, q); a class of
//! positive degree d contributes (d, 0, …, 0); a class with nonzero
//! torsion tag and degree 0 contributes the zero vector; a class of
//! negative degree -d contributes (0, …, 0, d). Box products convolve.

use crate::cover::{BundleClass, CoverConfiguration, ProductQuotient};
use crate::error::Error;
use crate::group::GroupElement;
use serde::{Deserialize, Serialize};

/// One direct summand of a pushforward, with its indexing tag.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Summand {
    /// One class per factor; inverse classes carry negated degree and tag.
    pub classes: Vec<BundleClass>,
    /// The indexing character (of ∏ G_j^∨ for product quotients, of Q^∨
    /// for box covers).
    pub character: GroupElement,
    /// For p-form pushforwards, the factor subset J as a bitmask.
    pub subset: Option<u32>,
}

/// Hodge numbers h^{p,q} of a cover of total dimension n.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HodgeDiamond {
    pub n: usize,
    /// h[p][q], both indices 0..=n.
    pub h: Vec<Vec<u64>>,
}

impl HodgeDiamond {
    pub fn torus(n: usize) -> Self {
        let h = (0..=n)
            .map(|p| (0..=n).map(|q| binomial(n, p) * binomial(n, q)).collect())
            .collect();
        Self { n, h }
    }

    pub fn is_torus(&self) -> bool {
        *self == Self::torus(self.n)
    }

    /// Betti numbers b_0..b_{2n} and the topological Euler characteristic.
    pub fn betti_and_euler(&self) -> (Vec<u64>, i64) {
        let mut betti = vec![0u64; 2 * self.n + 1];
        for p in 0..=self.n {
            for q in 0..=self.n {
                betti[p + q] += self.h[p][q];
            }
        }
        let euler = betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        (betti, euler)
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut out = 1u64;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out
}

/// The sheaf-level verdict for the rational-cohomology-torus property.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RctVerdict {
    pub certified: bool,
    pub level: RctLevel,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RctLevel {
    FullDiamond,
    OmegaLevel,
}

/// Decomposition of the pushforward of the canonical sheaf: one summand
/// per character trivial on the cover subgroup (product quotients) or per
/// character of Q including the trivial one (box covers). Summands are
/// returned in canonical sorted order.
pub fn omega_pushforward(config: &CoverConfiguration) -> Vec<Summand> {
    let mut out = match config {
        CoverConfiguration::ProductQuotient(pq) => pq
            .subgroup
            .annihilator()
            .elements()
            .into_iter()
            .map(|chi| Summand {
                classes: pq.summand_classes(&chi),
                character: chi,
                subset: None,
            })
            .collect::<Vec<_>>(),
        CoverConfiguration::DirectBoxCover(bx) => bx
            .group
            .elements()
            .into_iter()
            .map(|tau| Summand {
                classes: bx.class_tuple(&tau),
                character: tau,
                subset: None,
            })
            .collect(),
    };
    out.sort();
    out
}

/// Decomposition of the pushforward of reflexive p-forms of a product
/// quotient: summands indexed by pairs (J, character tuple) with |J| = p
/// and the J-twisted character trivial on the subgroup; classes are taken
/// as-is inside J and inverted outside.
pub fn omega_p_pushforward(pq: &ProductQuotient, p: usize) -> Result<Vec<Summand>, Error> {
    let n = pq.factors.len();
    if pq.factors.iter().any(|f| f.base_dim != 1) {
        return Err(Error::unsupported("p-form pushforwards require curve factors"));
    }
    if p > n {
        return Err(Error::malformed(format!("p = {p} out of range 0..={n}")));
    }
    let product = pq.product_group();
    let perp = pq.subgroup.annihilator();
    let perp_elements = perp.elements();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != p {
            continue;
        }
        // negate the character blocks outside J; the involution mapping
        // H^⊥ onto the solution set of the twisted triviality condition
        for chi in &perp_elements {
            let mut blocks = Vec::with_capacity(n);
            for j in 0..n {
                let block = chi.block(product.block_range(j));
                if mask & (1 << j) != 0 {
                    blocks.push(block);
                } else {
                    blocks.push(block.neg(pq.factors[j].group.invariant_factors()));
                }
            }
            let psi = product.from_blocks(&blocks);
            let classes: Vec<BundleClass> = blocks
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let cls = pq.factors[j].class(b);
                    if mask & (1 << j) != 0 {
                        cls
                    } else {
                        cls.inverse(&pq.factors[j].torsion_group)
                    }
                })
                .collect();
            out.push(Summand { classes, character: psi, subset: Some(mask) });
        }
    }
    out.sort();
    Ok(out)
}

/// Cohomology vector (h^0, …, h^N) of one box-product summand, N = Σ a_j.
pub fn cohomology_vector(summand: &Summand, dims: &[u32]) -> Result<Vec<u64>, Error> {
    let mut acc: Vec<u64> = vec![1];
    for (cls, &a) in summand.classes.iter().zip(dims) {
        let a = a as usize;
        let factor: Vec<u64> = if cls.degree > 0 {
            let mut v = vec![0u64; a + 1];
            v[0] = cls.degree as u64;
            v
        } else if cls.degree < 0 {
            let mut v = vec![0u64; a + 1];
            v[a] = (-cls.degree) as u64;
            v
        } else if cls.torsion.is_zero() {
            (0..=a).map(|q| binomial(a, q)).collect()
        } else {
            vec![0u64; a + 1]
        };
        acc = convolve(&acc, &factor)?;
    }
    Ok(acc)
}

fn convolve(a: &[u64], b: &[u64]) -> Result<Vec<u64>, Error> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let prod = x.checked_mul(y).ok_or_else(|| Error::resource("cohomology rank"))?;
            out[i + j] =
                out[i + j].checked_add(prod).ok_or_else(|| Error::resource("cohomology rank"))?;
        }
    }
    Ok(out)
}

/// χ-contribution of one summand: the product of per-factor values, where
/// a class of degree d ≠ 0 counts (-1)^{a_j·[d<0]}·|d| and both the
/// trivial class and nonzero torsion count 0.
pub fn summand_euler(summand: &Summand, dims: &[u32]) -> i64 {
    let mut prod: i64 = 1;
    for (cls, &a) in summand.classes.iter().zip(dims) {
        if cls.degree == 0 {
            return 0;
        }
        let sign = if cls.degree < 0 && a % 2 == 1 { -1 } else { 1 };
        prod *= sign * cls.degree.abs();
    }
    prod
}

/// h^•(X, ω) summed over precomputed summands.
pub fn h_omega_from_summands(summands: &[Summand], dims: &[u32]) -> Result<Vec<u64>, Error> {
    let n: u32 = dims.iter().sum();
    let mut total = vec![0u64; n as usize + 1];
    for s in summands {
        let v = cohomology_vector(s, dims)?;
        for (t, x) in total.iter_mut().zip(v) {
            *t = t.checked_add(x).ok_or_else(|| Error::resource("cohomology rank"))?;
        }
    }
    Ok(total)
}

/// h^•(X, ω) as the summand-wise total of cohomology vectors.
pub fn h_omega(config: &CoverConfiguration) -> Result<Vec<u64>, Error> {
    h_omega_from_summands(&omega_pushforward(config), &config.base_dims())
}

pub fn euler_from_summands(summands: &[Summand], dims: &[u32]) -> i64 {
    summands.iter().map(|s| summand_euler(s, dims)).sum()
}

/// χ(X, ω) = Σ_summands ∏ degrees.
pub fn euler_char_omega(config: &CoverConfiguration) -> i64 {
    euler_from_summands(&omega_pushforward(config), &config.base_dims())
}

/// Full Hodge diamond of a curve product quotient via the p-form
/// pushforwards.
///
/// Runs the same per-subset class bookkeeping as `omega_p_pushforward`
/// but convolves vectors in place; per character the direct and inverse
/// class vectors are looked up once each.
pub fn hodge_diamond(pq: &ProductQuotient) -> Result<HodgeDiamond, Error> {
    let n = pq.factors.len();
    let product = pq.product_group();
    let perp = pq.subgroup.annihilator();
    let elements = perp.elements_shared();

    // per character, per factor: cohomology vectors of the class and of
    // its inverse over an elliptic base
    let vector_of = |cls: &BundleClass| -> [u64; 2] {
        if cls.degree > 0 {
            [cls.degree as u64, 0]
        } else if cls.degree < 0 {
            [0, (-cls.degree) as u64]
        } else if cls.torsion.is_zero() {
            [1, 1]
        } else {
            [0, 0]
        }
    };
    let tables: Vec<Vec<([u64; 2], [u64; 2])>> = elements
        .iter()
        .map(|chi| {
            (0..n)
                .map(|j| {
                    let factor = &pq.factors[j];
                    let block = chi.block(product.block_range(j));
                    let direct = factor.class(&block);
                    let inverse_block = block.neg(factor.group.invariant_factors());
                    let inverse = factor
                        .class(&inverse_block)
                        .inverse(&factor.torsion_group);
                    (vector_of(&direct), vector_of(&inverse))
                })
                .collect()
        })
        .collect();

    let mut h = vec![vec![0u64; n + 1]; n + 1];
    let mut acc = vec![0u64; n + 1];
    let mut next = vec![0u64; n + 1];
    for mask in 0u32..(1u32 << n) {
        let p = mask.count_ones() as usize;
        for table in &tables {
            acc.clear();
            acc.push(1);
            for (j, (direct, inverse)) in table.iter().enumerate() {
                let v = if mask & (1 << j) != 0 { direct } else { inverse };
                next.clear();
                next.resize(acc.len() + 1, 0);
                for (i, &x) in acc.iter().enumerate() {
                    if x != 0 {
                        for (k, &y) in v.iter().enumerate() {
                            if y != 0 {
                                let prod = x
                                    .checked_mul(y)
                                    .ok_or_else(|| Error::resource("cohomology rank"))?;
                                next[i + k] = next[i + k]
                                    .checked_add(prod)
                                    .ok_or_else(|| Error::resource("cohomology rank"))?;
                            }
                        }
                    }
                }
                std::mem::swap(&mut acc, &mut next);
            }
            for q in 0..=n {
                h[p][q] = h[p][q]
                    .checked_add(acc[q])
                    .ok_or_else(|| Error::resource("cohomology rank"))?;
            }
        }
    }
    Ok(HodgeDiamond { n, h })
}

/// Rational-cohomology-torus verdict.
///
/// Product quotients get the full-diamond test (diamond equals the torus
/// diamond). Box covers get the torsion-factor criterion: every
/// nontrivial pushforward summand of ω contains a class with nonzero
/// torsion tag and degree 0.
pub fn is_rct(config: &CoverConfiguration) -> Result<RctVerdict, Error> {
    match config {
        CoverConfiguration::ProductQuotient(pq) => {
            let diamond = hodge_diamond(pq)?;
            Ok(RctVerdict { certified: diamond.is_torus(), level: RctLevel::FullDiamond })
        }
        CoverConfiguration::DirectBoxCover(_) => {
            let certified = omega_pushforward(config)
                .iter()
                .filter(|s| !s.character.is_zero())
                .all(|s| s.classes.iter().any(BundleClass::is_nontrivial_torsion));
            Ok(RctVerdict { certified, level: RctLevel::OmegaLevel })
        }
    }
}

/// The torsion-factor criterion on the ω-pushforward, available for every
/// configuration kind.
pub fn torsion_factor_criterion(config: &CoverConfiguration) -> bool {
    omega_pushforward(config)
        .iter()
        .filter(|s| !s.character.is_zero())
        .all(|s| s.classes.iter().any(BundleClass::is_nontrivial_torsion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::FactorDatum;
    use crate::group::{FiniteAbelianGroup, Subgroup};
    use std::collections::BTreeMap;

    fn grp(m: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(m.to_vec()).unwrap()
    }

    fn bielliptic(d: i64) -> FactorDatum {
        let g = grp(&[2]);
        let t = FiniteAbelianGroup::trivial();
        let mut classes = BTreeMap::new();
        classes.insert(g.element(&[1]).unwrap(), BundleClass { degree: d, torsion: t.zero() });
        FactorDatum::curve(g, t, classes)
    }

    fn ein_lazarsfeld() -> ProductQuotient {
        let factors = vec![bielliptic(1), bielliptic(1), bielliptic(1)];
        let subgroup = Subgroup::from_generators(&[2, 2, 2], &[vec![1, 1, 1]]).unwrap();
        ProductQuotient { factors, subgroup }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(3, 2), 3);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn trivial_box_product_over_two_elliptic_factors() {
        let s = Summand {
            classes: vec![
                BundleClass { degree: 0, torsion: FiniteAbelianGroup::trivial().zero() },
                BundleClass { degree: 0, torsion: FiniteAbelianGroup::trivial().zero() },
            ],
            character: grp(&[2, 2]).zero(),
            subset: None,
        };
        assert_eq!(cohomology_vector(&s, &[1, 1]).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn ample_ample_trivial_convolution() {
        let t = FiniteAbelianGroup::trivial();
        let s = Summand {
            classes: vec![
                BundleClass { degree: 1, torsion: t.zero() },
                BundleClass { degree: 1, torsion: t.zero() },
                BundleClass { degree: 0, torsion: t.zero() },
            ],
            character: grp(&[2, 2, 2]).zero(),
            subset: None,
        };
        assert_eq!(cohomology_vector(&s, &[1, 1, 1]).unwrap(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn torsion_annihilates() {
        let t2 = grp(&[2]);
        let s = Summand {
            classes: vec![
                BundleClass { degree: 5, torsion: t2.zero() },
                BundleClass { degree: 0, torsion: t2.element(&[1]).unwrap() },
            ],
            character: grp(&[2, 2]).zero(),
            subset: None,
        };
        assert_eq!(cohomology_vector(&s, &[2, 3]).unwrap(), vec![0; 6]);
    }

    #[test]
    fn ein_lazarsfeld_omega_summands() {
        let pq = ein_lazarsfeld();
        let config = CoverConfiguration::ProductQuotient(pq);
        let summands = omega_pushforward(&config);
        assert_eq!(summands.len(), 4);
        let trivial = summands.iter().filter(|s| s.character.is_zero()).count();
        assert_eq!(trivial, 1);
        for s in summands.iter().filter(|s| !s.character.is_zero()) {
            let degrees: Vec<i64> = s.classes.iter().map(|c| c.degree).collect();
            let mut sorted = degrees.clone();
            sorted.sort();
            assert_eq!(sorted, vec![0, 1, 1]);
        }
    }

    #[test]
    fn ein_lazarsfeld_h_omega_oracle() {
        // hand convolution: (1,3,3,1) + 3 × (1,1,0,0) = (4,6,3,1)
        let config = CoverConfiguration::ProductQuotient(ein_lazarsfeld());
        assert_eq!(h_omega(&config).unwrap(), vec![4, 6, 3, 1]);
        assert_eq!(euler_char_omega(&config), 0);
    }

    #[test]
    fn trivial_cover_single_summand() {
        let pq = ProductQuotient {
            factors: vec![bielliptic(1)],
            subgroup: Subgroup::full(&[2]),
        };
        let config = CoverConfiguration::ProductQuotient(pq);
        let summands = omega_pushforward(&config);
        assert_eq!(summands.len(), 1);
        assert!(summands[0].classes[0].is_trivial());
    }

    #[test]
    fn p_form_summand_counts() {
        let pq = ein_lazarsfeld();
        // p = 1: 3 subsets × 4 characters
        assert_eq!(omega_p_pushforward(&pq, 1).unwrap().len(), 12);
        // p = 0: one line-bundle summand per character, rank = deg(a_X)
        let p0 = omega_p_pushforward(&pq, 0).unwrap();
        assert_eq!(p0.len(), 4);
        // the structure-sheaf pushforward inverts every class
        for s in &p0 {
            assert!(s.classes.iter().all(|c| c.degree <= 0));
        }
    }

    #[test]
    fn top_forms_match_omega() {
        let pq = ein_lazarsfeld();
        let config = CoverConfiguration::ProductQuotient(pq.clone());
        let top = omega_p_pushforward(&pq, 3).unwrap();
        let omega = omega_pushforward(&config);
        let top_classes: Vec<_> = top.iter().map(|s| s.classes.clone()).collect();
        let omega_classes: Vec<_> = omega.iter().map(|s| s.classes.clone()).collect();
        assert_eq!(top_classes, omega_classes);
    }

    #[test]
    fn quotient_by_full_group_is_the_base() {
        // n = 1, G = Z/2, d = 1, H = G: the quotient is the elliptic base
        let pq = ProductQuotient {
            factors: vec![bielliptic(1)],
            subgroup: Subgroup::full(&[2]),
        };
        let diamond = hodge_diamond(&pq).unwrap();
        assert!(diamond.is_torus());
        assert_eq!(diamond.h, vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn ein_lazarsfeld_diamond_is_not_torus() {
        let pq = ein_lazarsfeld();
        let diamond = hodge_diamond(&pq).unwrap();
        assert_eq!(diamond.h[3][0], 4);
        assert!(!diamond.is_torus());
        // Serre and conjugation symmetry regardless
        for p in 0..=3 {
            for q in 0..=3 {
                assert_eq!(diamond.h[p][q], diamond.h[q][p]);
                assert_eq!(diamond.h[p][q], diamond.h[3 - p][3 - q]);
            }
        }
    }

    #[test]
    fn torus_betti_numbers() {
        let d = HodgeDiamond::torus(3);
        let (betti, euler) = d.betti_and_euler();
        assert_eq!(betti, vec![1, 6, 15, 20, 15, 6, 1]);
        assert_eq!(euler, 0);
        let d1 = HodgeDiamond::torus(1);
        assert_eq!(d1.betti_and_euler(), (vec![1, 2, 1], 0));
    }

    #[test]
    fn euler_char_consistency() {
        let config = CoverConfiguration::ProductQuotient(ein_lazarsfeld());
        let h = h_omega(&config).unwrap();
        let alt: i64 = h
            .iter()
            .enumerate()
            .map(|(q, &v)| if q % 2 == 0 { v as i64 } else { -(v as i64) })
            .sum();
        assert_eq!(alt, euler_char_omega(&config));
    }
}
