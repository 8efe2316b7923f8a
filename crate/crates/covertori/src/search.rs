//! Exhaustive, deterministic enumeration of cover configurations.
//!
//! A search space is a list of factor templates (group, torsion group,
//! per-character degree bound) together with every subgroup of the
//! product group. Work is partitioned by contiguous ranges of the global
//! configuration index and merged in range order, so output is identical
//! at any parallelism level. Certificates are emitted as JSON lines
//! behind a header that carries the spec hash.

use crate::config::ConfigFile;
use crate::cover::{CoverConfiguration, FactorDatum, ProductQuotient};
use crate::cover::BundleClass;
use crate::error::Error;
use crate::group::{
    enumerate_subgroups, projection_checks, FiniteAbelianGroup, GroupElement, Subgroup,
};
use crate::loci::LocusComponent;
use crate::report::{self, Evaluation};
use crate::verdicts::{ApplicabilityMode, Smoothness};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorTemplate {
    pub group: Vec<u64>,
    #[serde(default)]
    pub torsion_group: Vec<u64>,
    pub degree_bound: i64,
    /// Also enumerate nonzero torsion tags on ample classes. Off by
    /// default: such tags are inert bookkeeping (cohomology and loci read
    /// tags only on degree-zero classes), so they multiply the space
    /// without changing any checked invariant.
    #[serde(default)]
    pub ample_tags: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    ChiZero,
    H0One,
    RctCertified,
    GeneralTypeProxy,
    SmoothFreeAction,
    TheoremCApplicableFails,
    TheoremDApplicableFails,
    ConsistencyAlert,
    ConstructionEquivalenceViolated,
    Chi0LemmaViolated,
    SfLemmaViolated,
    DiamondConsistencyViolated,
    /// Any of the violation predicates above: the single-pass form of the
    /// exhaustive self-checks.
    AnyInvariantViolated,
}

pub const VIOLATION_PREDICATES: &[Predicate] = &[
    Predicate::ConstructionEquivalenceViolated,
    Predicate::Chi0LemmaViolated,
    Predicate::SfLemmaViolated,
    Predicate::DiamondConsistencyViolated,
    Predicate::TheoremCApplicableFails,
    Predicate::TheoremDApplicableFails,
    Predicate::ConsistencyAlert,
];

pub const INFORMATIVE_PREDICATES: &[Predicate] = &[
    Predicate::ChiZero,
    Predicate::H0One,
    Predicate::RctCertified,
    Predicate::GeneralTypeProxy,
    Predicate::SmoothFreeAction,
];

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::ChiZero => "chi_zero",
            Predicate::H0One => "h0_one",
            Predicate::RctCertified => "rct_certified",
            Predicate::GeneralTypeProxy => "general_type_proxy",
            Predicate::SmoothFreeAction => "smooth_free_action",
            Predicate::TheoremCApplicableFails => "theorem_c_applicable_fails",
            Predicate::TheoremDApplicableFails => "theorem_d_applicable_fails",
            Predicate::ConsistencyAlert => "consistency_alert",
            Predicate::ConstructionEquivalenceViolated => "construction_equivalence_violated",
            Predicate::Chi0LemmaViolated => "chi0_lemma_violated",
            Predicate::SfLemmaViolated => "sf_lemma_violated",
            Predicate::DiamondConsistencyViolated => "diamond_consistency_violated",
            Predicate::AnyInvariantViolated => "any_invariant_violated",
        }
    }

    pub fn evaluate(&self, config: &CoverConfiguration, eval: &Evaluation) -> bool {
        match self {
            Predicate::ChiZero => eval.euler_char == 0,
            Predicate::H0One => eval.h_omega.first().copied() == Some(1),
            Predicate::RctCertified => eval.rct.certified,
            Predicate::GeneralTypeProxy => eval.proxy,
            Predicate::SmoothFreeAction => eval.sheet.smooth == Smoothness::True,
            Predicate::TheoremCApplicableFails => {
                eval.sheet.theorem_c.applicable && !eval.sheet.theorem_c.holds
            }
            Predicate::TheoremDApplicableFails => {
                eval.sheet.theorem_d.applicable && !eval.sheet.theorem_d.holds
            }
            Predicate::ConsistencyAlert => !eval.sheet.consistency_alerts.is_empty(),
            Predicate::ConstructionEquivalenceViolated => {
                let torsion_criterion = crate::cohomology::torsion_factor_criterion(config);
                let h0_one = eval.h_omega.first().copied() == Some(1);
                match &eval.diamond {
                    Some(d) => {
                        !(torsion_criterion == h0_one && h0_one == d.is_torus())
                    }
                    None => torsion_criterion != h0_one,
                }
            }
            Predicate::Chi0LemmaViolated => {
                let proper = !eval.v0.iter().any(LocusComponent::is_full);
                (eval.euler_char == 0) != proper
            }
            Predicate::SfLemmaViolated => eval.v0.iter().any(|comp| {
                comp.codim >= 1
                    && !eval.s_f.iter().any(|(c, i)| *i == comp.codim && c == comp)
            }),
            Predicate::DiamondConsistencyViolated => {
                let alt: i64 = eval
                    .h_omega
                    .iter()
                    .enumerate()
                    .map(|(q, &v)| if q % 2 == 0 { v as i64 } else { -(v as i64) })
                    .sum();
                if alt != eval.euler_char {
                    return true;
                }
                if eval.summands.len() as u64 != config.degree_albanese() {
                    return true;
                }
                if let Some(d) = &eval.diamond {
                    let n = d.n;
                    for p in 0..=n {
                        for q in 0..=n {
                            if d.h[p][q] != d.h[q][p] || d.h[p][q] != d.h[n - p][n - q] {
                                return true;
                            }
                        }
                    }
                    if d.h[n] != eval.h_omega {
                        return true;
                    }
                }
                false
            }
            Predicate::AnyInvariantViolated => {
                VIOLATION_PREDICATES.iter().any(|p| p.evaluate(config, eval))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub factors: Vec<FactorTemplate>,
    #[serde(default)]
    pub require_surjective_projections: bool,
    #[serde(default)]
    pub require_pairwise_omit_injective: bool,
    #[serde(default)]
    pub predicates: Vec<Predicate>,
    /// Reduce per-factor building data to representatives of the orbits
    /// under factor automorphisms before combining with subgroups.
    #[serde(default)]
    pub data_orbits: bool,
    /// Collapse whole-configuration symmetry orbits in the output stream.
    #[serde(default)]
    pub symmetry: bool,
    #[serde(default)]
    pub mode: ApplicabilityMode,
    #[serde(default)]
    pub max_space: Option<u64>,
    #[serde(default)]
    pub max_certificates: Option<u64>,
}

impl SearchSpec {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::malformed(format!("at /{}: {}", e.path(), e.inner())))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub config: ConfigFile,
    pub digest: String,
    pub flags: BTreeMap<String, bool>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub space: u64,
    pub analyzed: u64,
    pub emitted: u64,
}

#[derive(Clone, Debug)]
pub struct SearchOutput {
    /// JSONL: header line, certificate lines, summary line.
    pub lines: Vec<String>,
    pub stats: SearchStats,
}

/// All valid factor data over a template, in a canonical order. Every
/// nontrivial character independently ranges over degrees 0..=bound and
/// all torsion tags; assignments violating the building-data constraints
/// are dropped.
pub fn enumerate_factor_data(template: &FactorTemplate) -> Result<Vec<FactorDatum>, Error> {
    let group = FiniteAbelianGroup::new(template.group.clone())?;
    let torsion = FiniteAbelianGroup::new(template.torsion_group.clone())?;
    if template.degree_bound < 0 {
        return Err(Error::malformed("degree bound must be nonnegative"));
    }
    let mut chars = group.elements();
    chars.retain(|c| !c.is_zero());
    let torsion_elements = torsion.elements();
    let mut options: Vec<BundleClass> = Vec::new();
    for t in torsion_elements.iter().filter(|t| !t.is_zero()) {
        options.push(BundleClass { degree: 0, torsion: t.clone() });
    }
    for d in 1..=template.degree_bound {
        if template.ample_tags {
            for t in &torsion_elements {
                options.push(BundleClass { degree: d, torsion: t.clone() });
            }
        } else {
            options.push(BundleClass { degree: d, torsion: torsion.zero() });
        }
    }
    let mut out = Vec::new();
    let k = chars.len();
    if k == 0 {
        let datum = FactorDatum::curve(group, torsion, BTreeMap::new());
        return Ok(vec![datum]);
    }
    let mut stack = vec![0usize; k];
    'outer: loop {
        let classes: BTreeMap<GroupElement, BundleClass> = chars
            .iter()
            .cloned()
            .zip(stack.iter().map(|&i| options[i].clone()))
            .collect();
        let datum = FactorDatum::curve(group.clone(), torsion.clone(), classes);
        if datum.validate().is_empty() {
            out.push(datum);
        }
        for i in (0..k).rev() {
            stack[i] += 1;
            if stack[i] < options.len() {
                continue 'outer;
            }
            stack[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    Ok(out)
}

/// A per-factor relabeling: an automorphism of the factor group applied to
/// characters and one of the torsion group applied to tags.
#[derive(Clone, Debug)]
pub struct FactorTransform {
    pub group_map: Vec<GroupElement>,
    pub torsion_map: Vec<GroupElement>,
}

impl FactorTransform {
    pub fn identity(group: &FiniteAbelianGroup, torsion: &FiniteAbelianGroup) -> Self {
        let unit = |g: &FiniteAbelianGroup| -> Vec<GroupElement> {
            (0..g.rank())
                .map(|i| {
                    let mut coords = vec![0i64; g.rank()];
                    coords[i] = 1;
                    g.element(&coords).expect("unit vector")
                })
                .collect()
        };
        Self { group_map: unit(group), torsion_map: unit(torsion) }
    }
}

pub fn transform_factor(f: &FactorDatum, t: &FactorTransform) -> FactorDatum {
    let mut classes = BTreeMap::new();
    for (chi, cls) in &f.classes {
        let new_chi = f.group.apply_map(&t.group_map, chi);
        let new_tors = f.torsion_group.apply_map(&t.torsion_map, &cls.torsion);
        classes.insert(new_chi, BundleClass { degree: cls.degree, torsion: new_tors });
    }
    FactorDatum { classes, ..f.clone() }
}

/// Relabel a product quotient by a factor permutation and per-position
/// transforms (`maps[i]` applies to the factor moved into position i,
/// which is `perm[i]` in the original order). The subgroup is carried
/// along through its annihilator.
pub fn transform_pq(pq: &ProductQuotient, perm: &[usize], maps: &[FactorTransform]) -> ProductQuotient {
    let old_product = pq.product_group();
    let factors: Vec<FactorDatum> = perm
        .iter()
        .zip(maps)
        .map(|(&j, t)| transform_factor(&pq.factors[j], t))
        .collect();
    let new_moduli: Vec<u64> = factors
        .iter()
        .flat_map(|f| f.group.invariant_factors().iter().copied())
        .collect();
    let perp = pq.subgroup.annihilator();
    let rows: Vec<Vec<i64>> = perp
        .elements()
        .iter()
        .map(|chi| {
            let mut coords: Vec<i64> = Vec::with_capacity(new_moduli.len());
            for (i, &j) in perm.iter().enumerate() {
                let block = chi.block(old_product.block_range(j));
                let mapped = pq.factors[j].group.apply_map(&maps[i].group_map, &block);
                coords.extend(mapped.coords().iter().map(|&v| v as i64));
            }
            coords
        })
        .collect();
    let new_perp = Subgroup::from_generators(&new_moduli, &rows).expect("relabeled generators");
    ProductQuotient { factors, subgroup: new_perp.annihilator() }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out.sort();
    out
}

type FactorKey = (Vec<u64>, Vec<u64>, u32, u32, Vec<(Vec<u64>, i64, Vec<u64>)>);

fn factor_key(f: &FactorDatum) -> FactorKey {
    (
        f.group.invariant_factors().to_vec(),
        f.torsion_group.invariant_factors().to_vec(),
        f.base_dim,
        f.simple_factors,
        f.classes
            .iter()
            .map(|(chi, cls)| (chi.coords().to_vec(), cls.degree, cls.torsion.coords().to_vec()))
            .collect(),
    )
}

/// Orbit-minimal relabeling of one factor datum under its group and
/// torsion automorphisms.
pub fn canonical_factor(f: &FactorDatum) -> FactorDatum {
    let mut best: Option<(FactorKey, FactorDatum)> = None;
    for group_map in f.group.automorphisms() {
        let half = transform_factor(
            f,
            &FactorTransform {
                group_map,
                torsion_map: FactorTransform::identity(&f.group, &f.torsion_group).torsion_map,
            },
        );
        for torsion_map in f.torsion_group.automorphisms() {
            let candidate = transform_factor(
                &half,
                &FactorTransform {
                    group_map: FactorTransform::identity(&f.group, &f.torsion_group).group_map,
                    torsion_map,
                },
            );
            let key = factor_key(&candidate);
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                best = Some((key, candidate));
            }
        }
    }
    best.expect("automorphism set is nonempty").1
}

/// Representatives of the automorphism orbits, in canonical order.
pub fn orbit_representatives(data: Vec<FactorDatum>) -> Vec<FactorDatum> {
    let mut reps: Vec<(FactorKey, FactorDatum)> = Vec::new();
    for f in data {
        let canon = canonical_factor(&f);
        let key = factor_key(&canon);
        if !reps.iter().any(|(k, _)| *k == key) {
            reps.push((key, canon));
        }
    }
    reps.sort_by(|a, b| a.0.cmp(&b.0));
    reps.into_iter().map(|(_, f)| f).collect()
}

const MAX_CANONICAL_TRANSFORMS: u64 = 200_000;

/// Canonical encoding of a configuration under per-factor automorphisms,
/// compatible torsion automorphisms, and (optionally) factor
/// permutations. Equal encodings exactly characterize equivalence under
/// that symmetry group.
pub fn canonical_form(config: &CoverConfiguration, allow_permutation: bool) -> Result<String, Error> {
    let canon = canonical_configuration(config, allow_permutation)?;
    Ok(serde_json::to_string(&ConfigFile::from_configuration(&canon)).expect("config serializes"))
}

pub fn canonical_configuration(
    config: &CoverConfiguration,
    allow_permutation: bool,
) -> Result<CoverConfiguration, Error> {
    match config {
        CoverConfiguration::ProductQuotient(pq) => {
            Ok(CoverConfiguration::ProductQuotient(canonical_pq(pq, allow_permutation)?))
        }
        CoverConfiguration::DirectBoxCover(bx) => {
            Ok(CoverConfiguration::DirectBoxCover(canonical_box(bx, allow_permutation)?))
        }
    }
}

fn canonical_pq(pq: &ProductQuotient, allow_permutation: bool) -> Result<ProductQuotient, Error> {
    let n = pq.factors.len();
    let perms = if allow_permutation { permutations(n) } else { vec![(0..n).collect()] };
    let auts: Vec<Vec<Vec<GroupElement>>> =
        pq.factors.iter().map(|f| f.group.automorphisms()).collect();
    let mut combos: u64 = perms.len() as u64;
    for a in &auts {
        combos = combos.saturating_mul(a.len() as u64);
    }
    if combos > MAX_CANONICAL_TRANSFORMS {
        return Err(Error::resource(format!(
            "canonical form would scan {combos} relabelings"
        )));
    }

    let mut best: Option<((Vec<FactorKey>, Vec<Vec<u64>>), ProductQuotient)> = None;
    for perm in &perms {
        let aut_lists: Vec<&Vec<Vec<GroupElement>>> = perm.iter().map(|&j| &auts[j]).collect();
        let mut stack = vec![0usize; n.max(1)];
        'combo: loop {
            let maps: Vec<FactorTransform> = perm
                .iter()
                .enumerate()
                .map(|(i, &j)| FactorTransform {
                    group_map: aut_lists[i][stack[i]].clone(),
                    torsion_map: FactorTransform::identity(
                        &pq.factors[j].group,
                        &pq.factors[j].torsion_group,
                    )
                    .torsion_map,
                })
                .collect();
            let mut candidate = transform_pq(pq, perm, &maps);
            // torsion relabelings act factor by factor and independently of
            // the subgroup, so minimize each factor separately
            for f in candidate.factors.iter_mut() {
                let mut best_f: Option<(FactorKey, FactorDatum)> = None;
                for torsion_map in f.torsion_group.automorphisms() {
                    let t = FactorTransform {
                        group_map: FactorTransform::identity(&f.group, &f.torsion_group).group_map,
                        torsion_map,
                    };
                    let cand = transform_factor(f, &t);
                    let key = factor_key(&cand);
                    if best_f.as_ref().is_none_or(|(bk, _)| key < *bk) {
                        best_f = Some((key, cand));
                    }
                }
                *f = best_f.expect("nonempty automorphisms").1;
            }
            let key = (
                candidate.factors.iter().map(factor_key).collect::<Vec<_>>(),
                candidate.subgroup.basis().to_vec(),
            );
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                best = Some((key, candidate));
            }
            if n == 0 {
                break 'combo;
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break 'combo;
                }
                i -= 1;
                stack[i] += 1;
                if stack[i] < aut_lists[i].len() {
                    break;
                }
                stack[i] = 0;
            }
        }
    }
    Ok(best.expect("at least the identity relabeling").1)
}

type BoxKey = (Vec<(u32, u32, Vec<u64>)>, Vec<u64>, Vec<Vec<(Vec<u64>, i64, Vec<u64>)>>);

fn canonical_box(
    bx: &crate::cover::DirectBoxCover,
    allow_permutation: bool,
) -> Result<crate::cover::DirectBoxCover, Error> {
    let n = bx.factors.len();
    let perms = if allow_permutation { permutations(n) } else { vec![(0..n).collect()] };
    let q_auts = bx.group.automorphisms();
    let combos = (perms.len() as u64).saturating_mul(q_auts.len() as u64);
    if combos > MAX_CANONICAL_TRANSFORMS {
        return Err(Error::resource(format!(
            "canonical form would scan {combos} relabelings"
        )));
    }
    let qmod = bx.group.invariant_factors();
    let mut best: Option<(BoxKey, crate::cover::DirectBoxCover)> = None;
    for perm in &perms {
        for alpha in &q_auts {
            // relabel characters, permute the factor tuples
            let relabeled: BTreeMap<GroupElement, Vec<BundleClass>> = bx
                .classes
                .iter()
                .map(|(tau, tuple)| {
                    let new_tau = bx.group.apply_map(alpha, tau);
                    let new_tuple: Vec<BundleClass> =
                        perm.iter().map(|&j| tuple[j].clone()).collect();
                    (new_tau, new_tuple)
                })
                .collect();
            let factors: Vec<crate::cover::BoxFactor> =
                perm.iter().map(|&j| bx.factors[j].clone()).collect();
            // per-position torsion relabelings are independent: the key
            // lists class columns factor-major
            let mut best_maps: Vec<Vec<GroupElement>> = Vec::with_capacity(n);
            for (i, f) in factors.iter().enumerate() {
                let mut best_col: Option<(Vec<(Vec<u64>, i64, Vec<u64>)>, Vec<GroupElement>)> =
                    None;
                for beta in f.torsion_group.automorphisms() {
                    let col: Vec<(Vec<u64>, i64, Vec<u64>)> = relabeled
                        .iter()
                        .map(|(tau, tuple)| {
                            let cls = &tuple[i];
                            (
                                tau.coords().to_vec(),
                                cls.degree,
                                f.torsion_group.apply_map(&beta, &cls.torsion).coords().to_vec(),
                            )
                        })
                        .collect();
                    if best_col.as_ref().is_none_or(|(bk, _)| col < *bk) {
                        best_col = Some((col, beta));
                    }
                }
                best_maps.push(best_col.expect("nonempty automorphisms").1);
            }
            let classes: BTreeMap<GroupElement, Vec<BundleClass>> = relabeled
                .iter()
                .map(|(tau, tuple)| {
                    (
                        tau.clone(),
                        tuple
                            .iter()
                            .enumerate()
                            .map(|(i, cls)| BundleClass {
                                degree: cls.degree,
                                torsion: factors[i]
                                    .torsion_group
                                    .apply_map(&best_maps[i], &cls.torsion),
                            })
                            .collect(),
                    )
                })
                .collect();
            let candidate = crate::cover::DirectBoxCover {
                factors: factors.clone(),
                group: bx.group.clone(),
                classes,
            };
            let key: BoxKey = (
                candidate
                    .factors
                    .iter()
                    .map(|f| {
                        (f.base_dim, f.simple_factors, f.torsion_group.invariant_factors().to_vec())
                    })
                    .collect(),
                qmod.to_vec(),
                (0..n)
                    .map(|i| {
                        candidate
                            .classes
                            .iter()
                            .map(|(tau, tuple)| {
                                (
                                    tau.coords().to_vec(),
                                    tuple[i].degree,
                                    tuple[i].torsion.coords().to_vec(),
                                )
                            })
                            .collect()
                    })
                    .collect(),
            );
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                best = Some((key, candidate));
            }
        }
    }
    Ok(best.expect("at least the identity relabeling").1)
}

struct SearchPlan {
    subgroups: Vec<Subgroup>,
    subgroup_ok: Vec<bool>,
    data: Vec<Vec<FactorDatum>>,
    strides: Vec<u64>,
    data_combos: u64,
    space: u64,
}

fn plan(spec: &SearchSpec) -> Result<SearchPlan, Error> {
    if spec.factors.is_empty() {
        return Err(Error::malformed("search needs at least one factor template"));
    }
    let groups: Vec<FiniteAbelianGroup> = spec
        .factors
        .iter()
        .map(|t| FiniteAbelianGroup::new(t.group.clone()))
        .collect::<Result<_, _>>()?;
    let product = crate::group::ProductGroup::new(groups)?;
    let moduli = product.moduli();
    let subgroups = enumerate_subgroups(&moduli, 100_000_000)?;
    for h in &subgroups {
        // fill the annihilator cache once; every per-configuration clone
        // then shares it
        let _ = h.annihilator();
    }
    let subgroup_ok: Vec<bool> = subgroups
        .iter()
        .map(|h| {
            if !spec.require_surjective_projections && !spec.require_pairwise_omit_injective {
                return true;
            }
            let checks = projection_checks(&product, h);
            let surjective = checks.surjective_onto.iter().all(|&b| b);
            let injective = (0..spec.factors.len()).all(|i| {
                (0..spec.factors.len())
                    .all(|j| i == j || checks.injective_omitting[i][j])
            });
            (!spec.require_surjective_projections || surjective)
                && (!spec.require_pairwise_omit_injective || injective)
        })
        .collect();
    let mut data = Vec::new();
    for template in &spec.factors {
        let mut d = enumerate_factor_data(template)?;
        if spec.data_orbits {
            d = orbit_representatives(d);
        }
        if d.is_empty() {
            return Err(Error::malformed("a factor template admits no valid building data"));
        }
        data.push(d);
    }
    let mut data_combos: u64 = 1;
    for d in &data {
        data_combos = data_combos
            .checked_mul(d.len() as u64)
            .ok_or_else(|| Error::resource("search space size"))?;
    }
    let mut strides = vec![1u64; data.len()];
    for i in (0..data.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * data[i + 1].len() as u64;
    }
    let space = (subgroups.len() as u64)
        .checked_mul(data_combos)
        .ok_or_else(|| Error::resource("search space size"))?;
    let bound = spec.max_space.unwrap_or(50_000_000);
    if space > bound {
        return Err(Error::resource(format!(
            "search space has {space} configurations (limit {bound})"
        )));
    }
    Ok(SearchPlan { subgroups, subgroup_ok, data, strides, data_combos, space })
}

fn config_at(plan: &SearchPlan, index: u64) -> (usize, ProductQuotient) {
    let s = (index / plan.data_combos) as usize;
    let mut rem = index % plan.data_combos;
    let mut factors = Vec::with_capacity(plan.data.len());
    for (j, d) in plan.data.iter().enumerate() {
        let i = (rem / plan.strides[j]) as usize;
        rem %= plan.strides[j];
        factors.push(d[i].clone());
    }
    (s, ProductQuotient { factors, subgroup: plan.subgroups[s].clone() })
}

fn spec_hash(spec: &SearchSpec) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_string(spec).expect("spec serializes").as_bytes());
    format!("sha256:{:x}", hasher.finalize())
}

/// Run a search. The certificate stream is canonical and independent of
/// `jobs`; duplicates under the declared symmetry are collapsed after the
/// ordered merge when `symmetry` is set.
pub fn run_search(spec: &SearchSpec, jobs: usize) -> Result<SearchOutput, Error> {
    let plan = plan(spec)?;
    let jobs = jobs.max(1);
    let header = serde_json::json!({
        "schema_version": report::SCHEMA_VERSION,
        "spec_hash": spec_hash(spec),
        "symmetry": spec.symmetry,
        "data_orbits": spec.data_orbits,
        "predicates": spec.predicates.iter().map(Predicate::name).collect::<Vec<_>>(),
    })
    .to_string();

    let chunk = plan.space.div_ceil(jobs as u64).max(1);
    let ranges: Vec<(u64, u64)> = (0..jobs as u64)
        .map(|w| (w * chunk, ((w + 1) * chunk).min(plan.space)))
        .filter(|(a, b)| a < b)
        .collect();

    let results: Vec<Result<(Vec<String>, u64), Error>> = std::thread::scope(|scope| {
        let plan = &plan;
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(start, end)| {
                scope.spawn(move || -> Result<(Vec<String>, u64), Error> {
                    let mut lines = Vec::new();
                    let mut analyzed = 0u64;
                    // the subgroup structure depends only on the subgroup
                    // index, which is nondecreasing along the range
                    let mut cached: Option<(usize, crate::verdicts::SubgroupStructure)> = None;
                    for index in start..end {
                        let (s, pq) = config_at(plan, index);
                        if !plan.subgroup_ok[s] {
                            continue;
                        }
                        if cached.as_ref().map(|(i, _)| *i) != Some(s) {
                            cached = Some((s, crate::verdicts::subgroup_structure(&pq)));
                        }
                        let structure = cached.as_ref().map(|(_, st)| st);
                        let config = CoverConfiguration::ProductQuotient(pq);
                        let eval = report::evaluate_with(&config, spec.mode, structure)?;
                        analyzed += 1;
                        if spec
                            .predicates
                            .iter()
                            .all(|p| p.evaluate(&config, &eval))
                        {
                            lines.push(certificate_line(spec, &config, &eval)?);
                        }
                    }
                    Ok((lines, analyzed))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });

    let mut lines = vec![header];
    let mut analyzed = 0u64;
    let mut emitted = 0u64;
    let mut seen = std::collections::HashSet::new();
    'outer: for r in results {
        let (chunk_lines, chunk_analyzed) = r?;
        analyzed += chunk_analyzed;
        for line in chunk_lines {
            if spec.symmetry {
                let cert: Certificate =
                    serde_json::from_str(&line).expect("certificate parses back");
                let key = canonical_form(&cert.config.to_configuration()?, true)?;
                if !seen.insert(key) {
                    continue;
                }
            }
            if let Some(max) = spec.max_certificates {
                if emitted >= max {
                    break 'outer;
                }
            }
            emitted += 1;
            lines.push(line);
        }
    }
    let stats = SearchStats { space: plan.space, analyzed, emitted };
    lines.push(
        serde_json::json!({
            "summary": { "space": stats.space, "analyzed": stats.analyzed, "emitted": stats.emitted }
        })
        .to_string(),
    );
    Ok(SearchOutput { lines, stats })
}

fn certificate_line(
    spec: &SearchSpec,
    config: &CoverConfiguration,
    eval: &Evaluation,
) -> Result<String, Error> {
    let (file, digest) = if spec.symmetry {
        let canon = canonical_configuration(config, true)?;
        let file = ConfigFile::from_configuration(&canon);
        let report = report::analyze_configuration(&canon, &file, spec.mode)?;
        (file, report::report_digest(&report))
    } else {
        let file = ConfigFile::from_configuration(config);
        let report = report::analyze_configuration(config, &file, spec.mode)?;
        (file, report::report_digest(&report))
    };
    let mut flags = BTreeMap::new();
    for p in INFORMATIVE_PREDICATES {
        flags.insert(p.name().to_string(), p.evaluate(config, eval));
    }
    for p in &spec.predicates {
        flags.insert(p.name().to_string(), true);
    }
    let cert = Certificate { config: file, digest, flags };
    Ok(serde_json::to_string(&cert).expect("certificate serializes"))
}

/// The three factor templates of the exhaustive small-space sweeps.
pub fn small_templates() -> Vec<FactorTemplate> {
    vec![
        FactorTemplate { group: vec![2], torsion_group: vec![2, 2], degree_bound: 2, ample_tags: false },
        FactorTemplate { group: vec![3], torsion_group: vec![3, 3], degree_bound: 2, ample_tags: false },
        FactorTemplate { group: vec![2, 2], torsion_group: vec![2, 2], degree_bound: 2, ample_tags: false },
    ]
}

/// Every multiset of the small templates with 1 to `max_factors` factors.
pub fn small_space_specs(max_factors: usize, predicates: Vec<Predicate>) -> Vec<SearchSpec> {
    let templates = small_templates();
    let mut specs = Vec::new();
    fn rec(
        templates: &[FactorTemplate],
        start: usize,
        current: &mut Vec<FactorTemplate>,
        remaining: usize,
        out: &mut Vec<Vec<FactorTemplate>>,
    ) {
        if !current.is_empty() {
            out.push(current.clone());
        }
        if remaining == 0 {
            return;
        }
        for i in start..templates.len() {
            current.push(templates[i].clone());
            rec(templates, i, current, remaining - 1, out);
            current.pop();
        }
    }
    let mut tuples = Vec::new();
    rec(&templates, 0, &mut Vec::new(), max_factors, &mut tuples);
    for factors in tuples {
        specs.push(SearchSpec {
            factors,
            require_surjective_projections: false,
            require_pairwise_omit_injective: false,
            predicates: predicates.clone(),
            data_orbits: true,
            symmetry: false,
            mode: ApplicabilityMode::Chi0,
            max_space: Some(50_000_000),
            max_certificates: None,
        })
    }
    specs
}

/// The extra space of criterion checks: four double-cover factors.
pub fn four_factor_z2_spec(predicates: Vec<Predicate>) -> SearchSpec {
    let t = FactorTemplate { group: vec![2], torsion_group: vec![2, 2], degree_bound: 2, ample_tags: false };
    SearchSpec {
        factors: vec![t.clone(), t.clone(), t.clone(), t],
        require_surjective_projections: false,
        require_pairwise_omit_injective: false,
        predicates,
        data_orbits: true,
        symmetry: false,
        mode: ApplicabilityMode::Chi0,
        max_space: Some(50_000_000),
        max_certificates: None,
    }
}
