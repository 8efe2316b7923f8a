//! Full analysis pipeline and report rendering.
//!
//! The JSON rendering is the primary artifact (schema_version pins its
//! shape); the text rendering is a pure function of the same data.

use crate::cohomology::{self, HodgeDiamond, RctLevel, RctVerdict, Summand};
use crate::config;
use crate::cover::{CoverConfiguration, ValidationReport};
use crate::error::Error;
use crate::loci::{self, LocusComponent, SlotEntry};
use crate::verdicts::{self, ApplicabilityMode, Smoothness, VerdictSheet};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummandView {
    pub character: String,
    pub subset: Option<Vec<usize>>,
    pub classes: Vec<config::ClassView>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocusView {
    pub i: u32,
    pub components: Vec<ComponentView>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentView {
    pub entries: Vec<EntryView>,
    pub codim: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryView {
    Full(String),
    Point { point: Vec<u64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HodgeView {
    pub level: RctLevel,
    pub h: Option<Vec<Vec<u64>>>,
}

/// The complete analysis of one configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub config: config::ConfigFile,
    pub validation: ValidationOutcome,
    pub dim: u32,
    pub degree_albanese: u64,
    pub omega_summands: Vec<SummandView>,
    pub h_omega: Vec<u64>,
    pub euler_char_omega: i64,
    pub rct: RctVerdict,
    pub hodge: HodgeView,
    pub betti: Option<Vec<u64>>,
    pub euler_top: Option<i64>,
    pub v_loci: Vec<LocusView>,
    pub s_f: Vec<SfView>,
    pub general_type_proxy: bool,
    pub verdicts: VerdictSheet,
    pub alerts: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SfView {
    pub i: u32,
    pub component: ComponentView,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl From<&ValidationReport> for ValidationOutcome {
    fn from(r: &ValidationReport) -> Self {
        Self { valid: r.is_valid(), violations: r.violations.clone() }
    }
}

fn component_view(c: &LocusComponent) -> ComponentView {
    ComponentView {
        entries: c
            .entries
            .iter()
            .map(|e| match e {
                SlotEntry::Full => EntryView::Full("full".into()),
                SlotEntry::Point(p) => EntryView::Point { point: p.coords().to_vec() },
            })
            .collect(),
        codim: c.codim,
    }
}

fn summand_view(s: &Summand, config: &CoverConfiguration) -> SummandView {
    let torsion_groups = config.torsion_groups();
    SummandView {
        character: config::join_coords(s.character.coords()),
        subset: s.subset.map(|mask| (0..32).filter(|b| mask & (1 << b) != 0).collect()),
        classes: s
            .classes
            .iter()
            .zip(&torsion_groups)
            .map(|(c, _)| config::ClassView {
                degree: c.degree,
                torsion: c.torsion.coords().to_vec(),
            })
            .collect(),
    }
}

/// Run the full pipeline on a validated or invalid configuration. Invalid
/// configurations produce a report that carries only the validation
/// outcome.
pub fn analyze(config_file: &config::ConfigFile, mode: ApplicabilityMode) -> Result<AnalysisReport, Error> {
    let config = config_file.to_configuration()?;
    let validation = config.validate();
    if !validation.is_valid() {
        return Ok(AnalysisReport {
            schema_version: SCHEMA_VERSION,
            config: config_file.clone(),
            validation: (&validation).into(),
            dim: config.total_dim(),
            degree_albanese: 0,
            omega_summands: Vec::new(),
            h_omega: Vec::new(),
            euler_char_omega: 0,
            rct: RctVerdict { certified: false, level: RctLevel::OmegaLevel },
            hodge: HodgeView { level: RctLevel::OmegaLevel, h: None },
            betti: None,
            euler_top: None,
            v_loci: Vec::new(),
            s_f: Vec::new(),
            general_type_proxy: false,
            verdicts: empty_verdicts(mode),
            alerts: Vec::new(),
        });
    }
    analyze_configuration(&config, config_file, mode)
}

fn empty_verdicts(mode: ApplicabilityMode) -> VerdictSheet {
    VerdictSheet {
        mode,
        degree_albanese: 0,
        factor_degrees: None,
        smallest_prime: None,
        theorem_c: verdicts::TheoremC { applicable: false, witness_prime: None, holds: false },
        theorem_d: verdicts::TheoremD {
            applicable: false,
            vacuous: true,
            simple_factors: 0,
            smallest_prime: None,
            holds: true,
        },
        extremal: verdicts::Extremal {
            applicable: false,
            quotient_group: crate::group::FiniteAbelianGroup::trivial(),
            holds: false,
        },
        dega: None,
        structure: None,
        smooth: Smoothness::Unknown,
        consistency_alerts: Vec::new(),
    }
}

/// The semantic analysis results, without presentation views. This is the
/// unit of work in searches; the report adds rendering on top.
pub struct Evaluation {
    pub summands: Vec<Summand>,
    pub h_omega: Vec<u64>,
    pub euler_char: i64,
    pub rct: RctVerdict,
    pub diamond: Option<HodgeDiamond>,
    pub v0: Vec<LocusComponent>,
    pub s_f: Vec<(LocusComponent, u32)>,
    pub proxy: bool,
    pub sheet: VerdictSheet,
}

/// Analyze a validated configuration.
pub fn evaluate(config: &CoverConfiguration, mode: ApplicabilityMode) -> Result<Evaluation, Error> {
    evaluate_with(config, mode, None)
}

/// As `evaluate`, reusing per-subgroup structure that a search loop has
/// already computed.
pub fn evaluate_with(
    config: &CoverConfiguration,
    mode: ApplicabilityMode,
    structure: Option<&verdicts::SubgroupStructure>,
) -> Result<Evaluation, Error> {
    let dims = config.base_dims();
    let summands = cohomology::omega_pushforward(config);
    let h_omega = cohomology::h_omega_from_summands(&summands, &dims)?;
    let euler_char = cohomology::euler_from_summands(&summands, &dims);

    let (rct, diamond) = match config {
        CoverConfiguration::ProductQuotient(pq) => {
            let d = cohomology::hodge_diamond(pq)?;
            (RctVerdict { certified: d.is_torus(), level: RctLevel::FullDiamond }, Some(d))
        }
        CoverConfiguration::DirectBoxCover(_) => {
            let certified = summands
                .iter()
                .filter(|s| !s.character.is_zero())
                .all(|s| s.classes.iter().any(|c| c.is_nontrivial_torsion()));
            (RctVerdict { certified, level: RctLevel::OmegaLevel }, None)
        }
    };

    let raws = loci::raw_components_from(&summands, &dims, &config.torsion_groups());
    let v0 = loci::maximal_at(&raws, 0);
    let sf = loci::s_f_from(&raws, config.total_dim());
    let n_factors = config.num_factors();
    let proxy = (0..n_factors)
        .all(|j| v0.iter().any(|c| matches!(c.entries[j], loci::SlotEntry::Full)));

    let sheet = verdicts::verdict_sheet_with(
        &verdicts::VerdictInputs {
            config,
            euler_char,
            proxy,
            rct,
            diamond: diamond.as_ref(),
            v0: &v0,
            s_f: &sf,
        },
        mode,
        structure,
    );

    Ok(Evaluation {
        summands,
        h_omega,
        euler_char,
        rct,
        diamond,
        v0,
        s_f: sf,
        proxy,
        sheet,
    })
}

pub fn analyze_configuration(
    config: &CoverConfiguration,
    config_file: &config::ConfigFile,
    mode: ApplicabilityMode,
) -> Result<AnalysisReport, Error> {
    let validation = config.validate();
    debug_assert!(validation.is_valid());
    let n = config.total_dim();
    let eval = evaluate(config, mode)?;
    let (betti, euler_top) = match &eval.diamond {
        Some(d) => {
            let (b, e) = d.betti_and_euler();
            (Some(b), Some(e))
        }
        None => (None, None),
    };

    let mut v_loci = Vec::new();
    for i in 0..=n {
        v_loci.push(LocusView {
            i,
            components: loci::v_locus(config, i)?.iter().map(component_view).collect(),
        });
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        config: config_file.clone(),
        validation: (&validation).into(),
        dim: n,
        degree_albanese: config.degree_albanese(),
        omega_summands: eval.summands.iter().map(|s| summand_view(s, config)).collect(),
        h_omega: eval.h_omega,
        euler_char_omega: eval.euler_char,
        rct: eval.rct,
        hodge: HodgeView {
            level: eval.rct.level,
            h: eval.diamond.as_ref().map(|d| d.h.clone()),
        },
        betti,
        euler_top,
        v_loci,
        s_f: eval
            .s_f
            .iter()
            .map(|(c, i)| SfView { i: *i, component: component_view(c) })
            .collect(),
        general_type_proxy: eval.proxy,
        verdicts: eval.sheet.clone(),
        alerts: eval.sheet.consistency_alerts,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_json_compact(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Text rendering; a pure function of the same data as the JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "configuration: {}", self.config.kind_name());
        if !self.validation.valid {
            let _ = writeln!(out, "validation: FAILED");
            for v in &self.validation.violations {
                let _ = writeln!(out, "  - {v}");
            }
            return out;
        }
        let _ = writeln!(out, "validation: ok");
        let _ = writeln!(out, "dimension: {}", self.dim);
        let _ = writeln!(out, "deg(a_X): {}", self.degree_albanese);
        let _ = writeln!(
            out,
            "h^*(omega): [{}]",
            self.h_omega.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
        );
        let _ = writeln!(out, "chi(omega): {}", self.euler_char_omega);
        let _ = writeln!(
            out,
            "cohomology torus: {} ({})",
            if self.rct.certified { "certified" } else { "not certified" },
            match self.rct.level {
                RctLevel::FullDiamond => "full diamond",
                RctLevel::OmegaLevel => "omega level",
            }
        );
        if let Some(h) = &self.hodge.h {
            let _ = writeln!(out, "hodge diamond (rows p, cols q):");
            for row in h {
                let _ = writeln!(
                    out,
                    "  [{}]",
                    row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
                );
            }
        }
        if let (Some(betti), Some(euler)) = (&self.betti, self.euler_top) {
            let _ = writeln!(
                out,
                "betti: [{}], chi_top: {euler}",
                betti.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
            );
        }
        for locus in &self.v_loci {
            let comps: Vec<String> = locus
                .components
                .iter()
                .map(|c| {
                    let entries: Vec<String> = c
                        .entries
                        .iter()
                        .map(|e| match e {
                            EntryView::Full(_) => "*".to_string(),
                            EntryView::Point { point } => {
                                format!("({})", config::join_coords(point))
                            }
                        })
                        .collect();
                    format!("[{}]", entries.join(" "))
                })
                .collect();
            let _ = writeln!(out, "V^{}: {}", locus.i, comps.join("  "));
        }
        let sfs: Vec<String> = self
            .s_f
            .iter()
            .map(|s| {
                let entries: Vec<String> = s
                    .component
                    .entries
                    .iter()
                    .map(|e| match e {
                        EntryView::Full(_) => "*".to_string(),
                        EntryView::Point { point } => format!("({})", config::join_coords(point)),
                    })
                    .collect();
                format!("[{}]@{}", entries.join(" "), s.i)
            })
            .collect();
        let _ = writeln!(out, "S_f: {}", sfs.join("  "));
        let _ = writeln!(out, "general type proxy: {}", self.general_type_proxy);
        let v = &self.verdicts;
        let _ = writeln!(
            out,
            "theorem C (p^2 | deg): applicable={} holds={} witness={:?}",
            v.theorem_c.applicable, v.theorem_c.holds, v.theorem_c.witness_prime
        );
        let _ = writeln!(
            out,
            "theorem D (m >= p+1): applicable={} holds={} m={} p={:?}",
            v.theorem_d.applicable, v.theorem_d.holds, v.theorem_d.simple_factors, v.theorem_d.smallest_prime
        );
        let _ = writeln!(
            out,
            "extremal (Galois group (Z/p)^2): applicable={} holds={} group={:?}",
            v.extremal.applicable, v.extremal.holds, v.extremal.quotient_group
        );
        if let Some(d) = &v.dega {
            let _ = writeln!(
                out,
                "degree inequality: applicable={} holds={} ({} <= {}) routes_agree={}",
                d.applicable, d.holds, d.lhs, d.rhs, d.routes_agree
            );
        }
        let _ = writeln!(
            out,
            "smooth (free action test): {}",
            match v.smooth {
                Smoothness::True => "true",
                Smoothness::False => "false",
                Smoothness::Unknown => "unknown",
            }
        );
        if self.alerts.is_empty() {
            let _ = writeln!(out, "alerts: none");
        } else {
            let _ = writeln!(out, "alerts:");
            for a in &self.alerts {
                let _ = writeln!(out, "  ! {a}");
            }
        }
        out
    }
}

/// Stable digest of the report, for certificates.
pub fn report_digest(report: &AnalysisReport) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(report.to_json_compact().as_bytes());
    format!("sha256:{:x}", hasher.finalize())
}
