//! Generic vanishing loci of the ω-pushforward, as unions of
//! torsion-translated coordinate subtori.
//!
//! A summand whose zero-degree slots form the factor set Z (total
//! codimension z = Σ_{j∈Z} a_j) contributes to every V^i with i ≤ z the
//! component that is the inverse-torsion point on Z and full elsewhere.
//! Only coordinate-aligned components arise from this data model, so
//! containment and maximality are exact.

use crate::cohomology::omega_pushforward;
use crate::cover::CoverConfiguration;
use crate::error::Error;
use crate::group::GroupElement;
use serde::{Deserialize, Serialize};

/// Per-factor entry of a locus component.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotEntry {
    Full,
    Point(GroupElement),
}

/// A torsion translate of a coordinate subtorus of the dual of the base.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct LocusComponent {
    pub entries: Vec<SlotEntry>,
    pub codim: u32,
}

impl LocusComponent {
    /// Set containment for components of this special shape: every pinned
    /// slot of `other` must be pinned to the same point here.
    pub fn contained_in(&self, other: &LocusComponent) -> bool {
        self.entries.iter().zip(&other.entries).all(|(a, b)| match (a, b) {
            (_, SlotEntry::Full) => true,
            (SlotEntry::Point(p), SlotEntry::Point(q)) => p == q,
            (SlotEntry::Full, SlotEntry::Point(_)) => false,
        })
    }

    pub fn is_full(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, SlotEntry::Full))
    }
}

/// Raw (not yet maximality-filtered) components of the summand list.
pub fn raw_components_from(
    summands: &[crate::cohomology::Summand],
    dims: &[u32],
    torsion_groups: &[crate::group::FiniteAbelianGroup],
) -> Vec<LocusComponent> {
    let mut out = Vec::new();
    for s in summands {
        debug_assert!(s.classes.iter().all(|c| c.degree >= 0));
        let mut entries = Vec::with_capacity(s.classes.len());
        let mut codim = 0u32;
        for (j, cls) in s.classes.iter().enumerate() {
            if cls.degree == 0 {
                // the translate P with class ⊗ P trivial
                entries.push(SlotEntry::Point(
                    cls.torsion.neg(torsion_groups[j].invariant_factors()),
                ));
                codim += dims[j];
            } else {
                entries.push(SlotEntry::Full);
            }
        }
        out.push(LocusComponent { entries, codim });
    }
    out.sort();
    out.dedup();
    out
}

fn raw_components(config: &CoverConfiguration) -> Vec<LocusComponent> {
    raw_components_from(
        &omega_pushforward(config),
        &config.base_dims(),
        &config.torsion_groups(),
    )
}

fn maximal(mut comps: Vec<LocusComponent>) -> Vec<LocusComponent> {
    comps.sort();
    comps.dedup();
    let keep: Vec<bool> = comps
        .iter()
        .map(|c| {
            !comps
                .iter()
                .any(|other| other != c && c.contained_in(other) && !other.contained_in(c))
        })
        .collect();
    comps
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Maximal components of V^i(g_*ω), 0 ≤ i ≤ Σ a_j.
pub fn v_locus(config: &CoverConfiguration, i: u32) -> Result<Vec<LocusComponent>, Error> {
    if i > config.total_dim() {
        return Err(Error::malformed(format!(
            "V^{i} out of range for total dimension {}",
            config.total_dim()
        )));
    }
    Ok(maximal(
        raw_components(config).into_iter().filter(|c| c.codim >= i).collect(),
    ))
}

/// Maximal components at one level from precomputed raw components.
pub fn maximal_at(raws: &[LocusComponent], i: u32) -> Vec<LocusComponent> {
    maximal(raws.iter().filter(|c| c.codim >= i).cloned().collect())
}

/// S_f from precomputed raw components.
pub fn s_f_from(raws: &[LocusComponent], total_dim: u32) -> Vec<(LocusComponent, u32)> {
    let mut out = Vec::new();
    for i in 1..=total_dim {
        for comp in maximal_at(raws, i) {
            if comp.codim == i {
                out.push((comp, i));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Components of V^i of codimension exactly i, over all i ≥ 1.
pub fn s_f(config: &CoverConfiguration) -> Result<Vec<(LocusComponent, u32)>, Error> {
    Ok(s_f_from(&raw_components(config), config.total_dim()))
}

/// Sufficient criterion for general type: every factor is full in some
/// component of V^0. Reported as a proxy, never as a Kodaira-dimension
/// computation.
pub fn general_type_proxy(config: &CoverConfiguration) -> Result<bool, Error> {
    let v0 = v_locus(config, 0)?;
    let n = config.num_factors();
    Ok((0..n).all(|j| v0.iter().any(|c| matches!(c.entries[j], SlotEntry::Full))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{BundleClass, FactorDatum, ProductQuotient};
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

    fn ein_lazarsfeld() -> CoverConfiguration {
        let factors = vec![bielliptic(1), bielliptic(1), bielliptic(1)];
        let subgroup = Subgroup::from_generators(&[2, 2, 2], &[vec![1, 1, 1]]).unwrap();
        CoverConfiguration::ProductQuotient(ProductQuotient { factors, subgroup })
    }

    #[test]
    fn ein_lazarsfeld_v0_absorbs_the_origin() {
        // raw components: three coordinate hyperplanes with zero tags plus
        // the origin; the origin lies on each hyperplane, so 3 remain
        let v0 = v_locus(&ein_lazarsfeld(), 0).unwrap();
        assert_eq!(v0.len(), 3);
        for c in &v0 {
            assert_eq!(c.codim, 1);
            let full = c.entries.iter().filter(|e| matches!(e, SlotEntry::Full)).count();
            assert_eq!(full, 2);
        }
    }

    #[test]
    fn ein_lazarsfeld_s_f() {
        let sf = s_f(&ein_lazarsfeld()).unwrap();
        let at1 = sf.iter().filter(|(_, i)| *i == 1).count();
        let at3 = sf.iter().filter(|(_, i)| *i == 3).count();
        assert_eq!((at1, at3), (3, 1));
        assert_eq!(sf.len(), 4);
        // the level-3 entry is the origin
        let (origin, _) = sf.iter().find(|(_, i)| *i == 3).unwrap();
        assert!(origin
            .entries
            .iter()
            .all(|e| matches!(e, SlotEntry::Point(p) if p.is_zero())));
    }

    #[test]
    fn all_ample_summand_gives_codim_zero_component() {
        // H trivial: every character pair appears; with two ample factors,
        // the (1,1) summand is ample ⊠ ample, so V^0 is everything
        let factors = vec![bielliptic(1), bielliptic(1)];
        let subgroup = Subgroup::trivial(&[2, 2]);
        let config =
            CoverConfiguration::ProductQuotient(ProductQuotient { factors, subgroup });
        let v0 = v_locus(&config, 0).unwrap();
        assert_eq!(v0.len(), 1);
        assert!(v0[0].is_full());
        assert_eq!(v0[0].codim, 0);
        assert!(general_type_proxy(&config).unwrap());
    }

    #[test]
    fn trivial_cover_s_f_is_the_origin_at_top_level() {
        let pq = ProductQuotient {
            factors: vec![bielliptic(1), bielliptic(1)],
            subgroup: Subgroup::full(&[2, 2]),
        };
        let config = CoverConfiguration::ProductQuotient(pq);
        let sf = s_f(&config).unwrap();
        assert_eq!(sf.len(), 1);
        assert_eq!(sf[0].1, 2);
        assert!(sf[0].0.entries.iter().all(|e| matches!(e, SlotEntry::Point(_))));
    }

    #[test]
    fn iitaka_surface_proxy_is_false() {
        // genus-2 double cover × etale double cover, diagonal quotient:
        // V^0 = one codim-1 component (translated) plus the origin; the
        // second factor is never full
        let factors = vec![bielliptic(1), etale_double()];
        let subgroup = Subgroup::from_generators(&[2, 2], &[vec![1, 1]]).unwrap();
        let config =
            CoverConfiguration::ProductQuotient(ProductQuotient { factors, subgroup });
        let v0 = v_locus(&config, 0).unwrap();
        assert_eq!(v0.len(), 2);
        assert!(!general_type_proxy(&config).unwrap());
        // the codim-1 component is translated by the nonzero 2-torsion point
        let translated = v0.iter().find(|c| c.codim == 1).unwrap();
        match &translated.entries[1] {
            SlotEntry::Point(p) => assert!(!p.is_zero()),
            SlotEntry::Full => panic!("second slot must be pinned"),
        }
    }

    #[test]
    fn monotonicity_of_v_loci() {
        let config = ein_lazarsfeld();
        for i in 0..3 {
            let lower = v_locus(&config, i).unwrap();
            for comp in v_locus(&config, i + 1).unwrap() {
                assert!(lower.iter().any(|big| comp.contained_in(big)));
            }
        }
    }

    #[test]
    fn v_locus_range_check() {
        assert!(v_locus(&ein_lazarsfeld(), 4).is_err());
    }
}
