//! Degree invariants of the structural map to the base product, theorem
//! verdicts, the free-action smoothness test, and the consistency guard.
//!
//! The applicability gates are explicit: "hypothesis not met" and
//! "statement fails" are different outcomes, and the second one raises an
//! alert because it signals an engine bug, not a mathematical discovery.

use crate::cohomology::{HodgeDiamond, RctLevel, RctVerdict};
use crate::cover::{CoverConfiguration, ProductQuotient};
use crate::error::Error;
use crate::group::{projection_checks, FiniteAbelianGroup, GroupElement, ProjectionChecks};
use crate::loci::{LocusComponent, SlotEntry};
use serde::{Deserialize, Serialize};

/// Applicability gate for the degree theorems: either the rational
/// cohomology torus route or the χ(ω) = 0 route, both together with the
/// general-type proxy.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplicabilityMode {
    Rct,
    Chi0,
}

impl Default for ApplicabilityMode {
    fn default() -> Self {
        ApplicabilityMode::Chi0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremC {
    pub applicable: bool,
    pub witness_prime: Option<u64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremD {
    pub applicable: bool,
    pub vacuous: bool,
    pub simple_factors: u64,
    pub smallest_prime: Option<u64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremal {
    pub applicable: bool,
    pub quotient_group: FiniteAbelianGroup,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegaInequality {
    pub applicable: bool,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
    /// The grouped degree formula and the summand-counting route must
    /// agree wherever both are defined.
    pub routes_agree: bool,
    /// Whether every omitted projection is injective, in which case the
    /// image-order formula coincides with the product formula.
    pub omitted_projections_injective: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    True,
    False,
    Unknown,
}

/// Assembled verdict data for one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictSheet {
    pub mode: ApplicabilityMode,
    pub degree_albanese: u64,
    pub factor_degrees: Option<Vec<u64>>,
    pub smallest_prime: Option<u64>,
    pub theorem_c: TheoremC,
    pub theorem_d: TheoremD,
    pub extremal: Extremal,
    pub dega: Option<DegaInequality>,
    pub structure: Option<ProjectionChecks>,
    pub smooth: Smoothness,
    pub consistency_alerts: Vec<String>,
}

pub fn smallest_prime_divisor(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return Some(k);
        }
        k += 1;
    }
    Some(n)
}

fn has_square_prime_divisor(n: u64) -> Option<u64> {
    let mut n = n;
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            let mut mult = 0;
            while n % k == 0 {
                n /= k;
                mult += 1;
            }
            if mult >= 2 {
                return Some(k);
            }
        }
        k += 1;
    }
    None
}

/// deg of the structural map of the sub-quotient obtained by omitting
/// factor k: ∏_{j≠k} |G_j| divided by the order of the image of H under
/// the projection omitting factor k.
pub fn factor_degree(pq: &ProductQuotient, k: usize) -> Result<u64, Error> {
    if k >= pq.factors.len() {
        return Err(Error::malformed(format!("factor index {k} out of range")));
    }
    if pq.factors.len() < 2 {
        return Err(Error::malformed("factor degrees need at least two factors"));
    }
    let product = pq.product_group();
    let keep: Vec<usize> = (0..pq.factors.len())
        .filter(|&j| j != k)
        .flat_map(|j| product.block_range(j))
        .collect();
    let image = pq.subgroup.project(&keep);
    let ambient: u64 =
        (0..pq.factors.len()).filter(|&j| j != k).map(|j| pq.factors[j].group.order()).product();
    Ok(ambient / image.order())
}

/// The sub-quotient product quotient omitting factor k (Stein factor of
/// the projection to the remaining base factors).
pub fn omit_factor(pq: &ProductQuotient, k: usize) -> ProductQuotient {
    let product = pq.product_group();
    let keep: Vec<usize> = (0..pq.factors.len())
        .filter(|&j| j != k)
        .flat_map(|j| product.block_range(j))
        .collect();
    let factors: Vec<_> =
        pq.factors.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, f)| f.clone()).collect();
    ProductQuotient { factors, subgroup: pq.subgroup.project(&keep) }
}

pub struct VerdictInputs<'a> {
    pub config: &'a CoverConfiguration,
    pub euler_char: i64,
    pub proxy: bool,
    pub rct: RctVerdict,
    pub diamond: Option<&'a HodgeDiamond>,
    pub v0: &'a [LocusComponent],
    pub s_f: &'a [(LocusComponent, u32)],
}

/// The parts of a product-quotient verdict that depend only on the
/// subgroup and the factor groups, not on the class data. Searches hoist
/// this out of the per-configuration loop.
#[derive(Clone, Debug)]
pub struct SubgroupStructure {
    pub checks: ProjectionChecks,
    pub factor_degrees: Option<Vec<u64>>,
    /// |annihilator(image of H omitting k)|: the summand-counting route
    /// to the factor degree.
    pub omit_ranks: Vec<u64>,
    pub omitted_projections_injective: Vec<bool>,
}

pub fn subgroup_structure(pq: &ProductQuotient) -> SubgroupStructure {
    let product = pq.product_group();
    let checks = projection_checks(&product, &pq.subgroup);
    let n = pq.factors.len();
    let factor_degrees: Option<Vec<u64>> = (n >= 2).then(|| {
        (0..n).map(|k| factor_degree(pq, k).expect("valid index")).collect()
    });
    let omit_ranks: Vec<u64> = if n >= 2 {
        (0..n)
            .map(|k| omit_factor(pq, k).subgroup.annihilator().order())
            .collect()
    } else {
        Vec::new()
    };
    let omitted_projections_injective: Vec<bool> = (0..n)
        .map(|k| {
            let keep: Vec<usize> = (0..n)
                .filter(|&j| j != k)
                .flat_map(|j| product.block_range(j))
                .collect();
            pq.subgroup.project(&keep).order() == pq.subgroup.order()
        })
        .collect();
    SubgroupStructure { checks, factor_degrees, omit_ranks, omitted_projections_injective }
}

/// Assemble the full verdict sheet. The applicability gate follows the
/// chosen mode; theorem failures under a satisfied gate become alerts.
pub fn verdict_sheet(inputs: &VerdictInputs<'_>, mode: ApplicabilityMode) -> VerdictSheet {
    verdict_sheet_with(inputs, mode, None)
}

/// As `verdict_sheet`, reusing precomputed subgroup structure.
pub fn verdict_sheet_with(
    inputs: &VerdictInputs<'_>,
    mode: ApplicabilityMode,
    structure: Option<&SubgroupStructure>,
) -> VerdictSheet {
    let config = inputs.config;
    let deg = config.degree_albanese();
    let gate = match mode {
        ApplicabilityMode::Rct => inputs.rct.certified && inputs.proxy,
        ApplicabilityMode::Chi0 => inputs.euler_char == 0 && inputs.proxy,
    };

    let theorem_c = {
        let applicable = gate;
        let witness_prime = has_square_prime_divisor(deg);
        TheoremC { applicable, witness_prime, holds: witness_prime.is_some() }
    };

    let smallest = smallest_prime_divisor(deg);
    let theorem_d = {
        let vacuous = deg == 1;
        let applicable = gate && !vacuous;
        let m = config.simple_factor_total();
        let holds = match smallest {
            Some(p) => m >= p + 1,
            None => true,
        };
        TheoremD {
            applicable,
            vacuous,
            simple_factors: m,
            smallest_prime: smallest,
            holds,
        }
    };

    let quotient_group = config.albanese_galois_group();
    let extremal = {
        let square = smallest.filter(|&p| p * p == deg);
        let applicable = gate && square.is_some();
        let holds = match square {
            Some(p) => {
                quotient_group.invariant_factors() == [p, p]
            }
            None => false,
        };
        Extremal { applicable, quotient_group: quotient_group.clone(), holds }
    };

    let (factor_degrees, structure, dega, smooth) = match config {
        CoverConfiguration::ProductQuotient(pq) => {
            let computed;
            let s: &SubgroupStructure = match structure {
                Some(s) => s,
                None => {
                    computed = subgroup_structure(pq);
                    &computed
                }
            };
            let dega = s.factor_degrees.as_ref().map(|fd| {
                dega_inequality(
                    s,
                    inputs.euler_char,
                    inputs.proxy,
                    inputs.s_f,
                    inputs.v0,
                    fd,
                    deg,
                )
            });
            let smooth = smoothness(pq);
            (s.factor_degrees.clone(), Some(s.checks.clone()), dega, smooth)
        }
        CoverConfiguration::DirectBoxCover(_) => (None, None, None, Smoothness::Unknown),
    };

    let mut consistency_alerts = Vec::new();
    if theorem_c.applicable && !theorem_c.holds {
        consistency_alerts.push(format!(
            "degree divisibility fails on an applicable configuration: deg = {deg} has no square prime divisor"
        ));
    }
    if theorem_d.applicable && !theorem_d.holds {
        consistency_alerts.push(format!(
            "simple factor bound fails on an applicable configuration: m = {} < p + 1 with p = {:?}",
            theorem_d.simple_factors, theorem_d.smallest_prime
        ));
    }
    if extremal.applicable && !extremal.holds {
        consistency_alerts.push(format!(
            "extremal degree {deg} = p^2 but the Galois group is {:?}",
            extremal.quotient_group
        ));
    }
    if let Some(d) = &dega {
        if d.applicable && !d.routes_agree {
            consistency_alerts
                .push("factor degree routes disagree (group formula vs summand count)".into());
        }
        if d.applicable && !d.holds {
            consistency_alerts.push(format!(
                "degree inequality fails on an applicable configuration: {} > {}",
                d.lhs, d.rhs
            ));
        }
    }
    if smooth == Smoothness::True && inputs.proxy && inputs.rct.certified {
        consistency_alerts.push(
            "smooth free action with general-type proxy on a certified cohomology torus".into(),
        );
    }
    if inputs.rct.certified && inputs.rct.level == RctLevel::FullDiamond {
        if let Some(d) = inputs.diamond {
            let (_, euler_top) = d.betti_and_euler();
            if euler_top != 0 {
                consistency_alerts.push(format!(
                    "certified cohomology torus with nonzero topological Euler characteristic {euler_top}"
                ));
            }
        }
    }

    VerdictSheet {
        mode,
        degree_albanese: deg,
        factor_degrees,
        smallest_prime: smallest,
        theorem_c,
        theorem_d,
        extremal,
        dega,
        structure,
        smooth,
        consistency_alerts,
    }
}

/// deg(a_X) - 1 ≤ Σ_k (deg_k - 1), with deg_k computed both from group
/// orders and by counting ω-summands of the omitted sub-quotient.
///
/// The hypotheses under which the summand bookkeeping closes up: χ(ω) = 0
/// and the general-type proxy, surjective projections, every S_f
/// component containing the origin (nothing is translated away), and
/// every S_f component inside some codim-1 component of V^0. Degenerate
/// or translated configurations are marked inapplicable, matching the
/// etale normalization that the inequality presumes.
fn dega_inequality(
    structure: &SubgroupStructure,
    euler_char: i64,
    proxy: bool,
    s_f: &[(LocusComponent, u32)],
    v0: &[LocusComponent],
    factor_degrees: &[u64],
    deg: u64,
) -> DegaInequality {
    let surjective = structure.checks.surjective_onto.iter().all(|&b| b);
    let codim1: Vec<&LocusComponent> = v0.iter().filter(|c| c.codim == 1).collect();
    let sf_covered = s_f
        .iter()
        .all(|(comp, _)| codim1.iter().any(|big| comp.contained_in(big)));
    let sf_at_origin = s_f.iter().all(|(comp, _)| {
        comp.entries.iter().all(|e| match e {
            SlotEntry::Full => true,
            SlotEntry::Point(p) => p.is_zero(),
        })
    });
    let applicable = surjective && euler_char == 0 && proxy && sf_at_origin && sf_covered;

    // independent route: the ω-pushforward of the omitted sub-quotient has
    // one summand per character of the annihilator of the projected group
    let routes_agree = factor_degrees
        .iter()
        .zip(&structure.omit_ranks)
        .all(|(&fd, &rank)| rank == fd);

    let lhs = deg as i64 - 1;
    let rhs: i64 = factor_degrees.iter().map(|&d| d as i64 - 1).sum();
    DegaInequality {
        applicable,
        lhs,
        rhs,
        holds: lhs <= rhs,
        routes_agree,
        omitted_projections_injective: structure.omitted_projections_injective.clone(),
    }
}

/// Free-action test for product quotients with every factor group
/// elementary of prime order: a nonidentity element acts freely exactly
/// when one of its slots generates an etale cyclic subcover, detected by
/// the Riemann-Hurwitz equality g(C_j) - 1 = ord(h_j)·(g(C_j/⟨h_j⟩) - 1).
/// Outside that regime the answer is unknown.
pub fn smoothness(pq: &ProductQuotient) -> Smoothness {
    if !pq.factors.iter().all(|f| f.group.is_elementary_of_prime_order()) {
        return Smoothness::Unknown;
    }
    let product = pq.product_group();
    if pq.subgroup.order() > 1 << 16 {
        return Smoothness::Unknown;
    }
    for h in pq.subgroup.elements() {
        if h.is_zero() {
            continue;
        }
        let mut free = false;
        for (j, factor) in pq.factors.iter().enumerate() {
            let block = h.block(product.block_range(j));
            if block.is_zero() {
                continue;
            }
            if cyclic_subcover_is_etale(factor, &block) {
                free = true;
                break;
            }
        }
        if !free {
            return Smoothness::False;
        }
    }
    Smoothness::True
}

fn cyclic_subcover_is_etale(factor: &crate::cover::FactorDatum, h_j: &GroupElement) -> bool {
    let moduli = factor.group.invariant_factors();
    let ord = h_j.order(moduli);
    // genus of C_j / ⟨h_j⟩ from the classes trivial on h_j
    let quotient_genus: i64 = 1 + factor
        .group
        .elements()
        .iter()
        .filter(|chi| {
            !chi.is_zero()
                && crate::group::pairing(moduli, chi, h_j)
                    .expect("characters live in the factor group")
                    .is_zero()
        })
        .map(|chi| factor.class(chi).degree)
        .sum::<i64>();
    let genus = factor.genus().expect("validated curve factor") as i64;
    genus - 1 == (ord as i64) * (quotient_genus - 1)
}

/// Components of V^0 whose slots are all full except one zero-tag point:
/// convenience for structure inspection in reports.
pub fn coordinate_components(v0: &[LocusComponent]) -> Vec<usize> {
    v0.iter()
        .enumerate()
        .filter(|(_, c)| {
            c.codim >= 1
                && c.entries.iter().filter(|e| matches!(e, SlotEntry::Point(_))).count() == 1
        })
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{BundleClass, FactorDatum};
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

    fn ein_lazarsfeld() -> ProductQuotient {
        ProductQuotient {
            factors: vec![bielliptic(1), bielliptic(1), bielliptic(1)],
            subgroup: Subgroup::from_generators(&[2, 2, 2], &[vec![1, 1, 1]]).unwrap(),
        }
    }

    #[test]
    fn degrees_of_ein_lazarsfeld() {
        let pq = ein_lazarsfeld();
        let config = CoverConfiguration::ProductQuotient(pq.clone());
        assert_eq!(config.degree_albanese(), 4);
        for k in 0..3 {
            assert_eq!(factor_degree(&pq, k).unwrap(), 2);
        }
    }

    #[test]
    fn quotient_group_of_ein_lazarsfeld_is_klein() {
        let config = CoverConfiguration::ProductQuotient(ein_lazarsfeld());
        assert_eq!(config.albanese_galois_group().invariant_factors(), &[2, 2]);
    }

    #[test]
    fn smoothness_of_diagonal_bielliptic_product_fails() {
        // the diagonal involution has fixed points in every slot
        assert_eq!(smoothness(&ein_lazarsfeld()), Smoothness::False);
    }

    #[test]
    fn iitaka_surface_is_smooth() {
        let pq = ProductQuotient {
            factors: vec![bielliptic(1), etale_double()],
            subgroup: Subgroup::from_generators(&[2, 2], &[vec![1, 1]]).unwrap(),
        };
        assert_eq!(smoothness(&pq), Smoothness::True);
    }

    #[test]
    fn composite_order_group_gives_unknown() {
        let g = grp(&[4]);
        let t = FiniteAbelianGroup::trivial();
        let mut classes = BTreeMap::new();
        for c in 1..4i64 {
            classes.insert(g.element(&[c]).unwrap(), BundleClass { degree: 1, torsion: t.zero() });
        }
        let pq = ProductQuotient {
            factors: vec![FactorDatum::curve(g, t, classes)],
            subgroup: Subgroup::trivial(&[4]),
        };
        assert_eq!(smoothness(&pq), Smoothness::Unknown);
    }

    #[test]
    fn prime_helpers() {
        assert_eq!(smallest_prime_divisor(1), None);
        assert_eq!(smallest_prime_divisor(9), Some(3));
        assert_eq!(smallest_prime_divisor(35), Some(5));
        assert_eq!(has_square_prime_divisor(4), Some(2));
        assert_eq!(has_square_prime_divisor(8), Some(2));
        assert_eq!(has_square_prime_divisor(6), None);
        assert_eq!(has_square_prime_divisor(12), Some(2));
    }
}
