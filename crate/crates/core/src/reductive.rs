//! Invariants of a connected reductive group G via the torus quotient T of
//! a z-extension: G(k)/Br and A(G) coincide with the torus values, and
//! G(k)/R reduces to T(k)/R when the exceptional anisotropic factors are
//! absent or the base field is totally imaginary. Local weak-approximation
//! criteria (inner type, metacyclic splitting, cyclic decomposition group)
//! are evaluated from user-declared flags.

use crate::abelian::FabView;
use crate::arithmetic::{
    torus_report, PlacesSpec, Provenance, TorusOptions, TorusReport, TorusReportView,
};
use crate::lattice::GaloisLattice;
use crate::Error;
use num_bigint::BigInt;
use serde::Serialize;

/// User-supplied description of G through the torus quotient of a
/// z-extension. The criteria flags record group-theoretic facts (Tits
/// indices, splitting fields) outside the lattice data model; only their
/// consequences are computed.
pub struct ReductiveDescriptor {
    pub torus_quotient: GaloisLattice,
    pub has_anisotropic_trialitarian_d4_or_e6: bool,
    pub base_totally_imaginary: bool,
    /// Places where G is of inner type.
    pub inner_type_places: Vec<String>,
    /// Places where G splits over a metacyclic extension.
    pub metacyclic_split_places: Vec<String>,
}

impl ReductiveDescriptor {
    pub fn new(torus_quotient: GaloisLattice) -> Self {
        ReductiveDescriptor {
            torus_quotient,
            has_anisotropic_trialitarian_d4_or_e6: false,
            base_totally_imaginary: false,
            inner_type_places: vec![],
            metacyclic_split_places: vec![],
        }
    }

    /// Criteria labels must refer to declared places.
    pub fn validate(&self, places: &PlacesSpec) -> Result<(), Error> {
        places.validate(self.torus_quotient.group())?;
        let declared: std::collections::HashSet<&str> = places
            .bad_places
            .iter()
            .map(|p| p.label.as_str())
            .collect();
        for label in self
            .inner_type_places
            .iter()
            .chain(self.metacyclic_split_places.iter())
        {
            if !declared.contains(label.as_str()) {
                return Err(Error::BadInput(format!(
                    "criteria flag refers to undeclared place {:?}",
                    label
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RStatus {
    /// G(k)/R = T(k)/R holds; the full order is reported.
    Full,
    /// Only the image of G(k)/R in the product of local groups is pinned
    /// (order n_T); the kernel is not determined by this computation.
    Conditional,
}

impl RStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RStatus::Full => "full",
            RStatus::Conditional => "conditional",
        }
    }
}

pub struct GroupReport {
    /// The full report for the torus quotient T; G(k)/Br and A(G) are
    /// literally these invariants.
    pub torus: TorusReport,
    pub r_status: RStatus,
    /// |G(k)/R| when r_status is Full.
    pub r_classes_order: Option<BigInt>,
    /// Order of the image of G(k)/R in the product of local class groups;
    /// unconditional.
    pub r_image_order: BigInt,
    pub conditional_note: Option<&'static str>,
}

const CONDITIONAL_NOTE: &str = "the image of G(k)/R in the product of local \
class groups has order n_T; the kernel's structure is open pending a case \
of the Platonov-Margulis conjecture (Thm 4.11)";

pub fn group_report(
    desc: &ReductiveDescriptor,
    places: &PlacesSpec,
    options: TorusOptions,
) -> Result<GroupReport, Error> {
    desc.validate(places)?;
    let torus = torus_report(&desc.torus_quotient, places, options)?;
    let full = !desc.has_anisotropic_trialitarian_d4_or_e6 || desc.base_totally_imaginary;
    let r_image_order = torus.n_t.clone();
    Ok(if full {
        GroupReport {
            r_classes_order: Some(torus.r_classes_order.clone()),
            r_image_order,
            torus,
            r_status: RStatus::Full,
            conditional_note: None,
        }
    } else {
        GroupReport {
            r_classes_order: None,
            r_image_order,
            torus,
            r_status: RStatus::Conditional,
            conditional_note: Some(CONDITIONAL_NOTE),
        }
    })
}

#[derive(Serialize)]
pub struct GroupReportView {
    pub brauer_classes: FabView,
    pub wa_defect: FabView,
    pub r_status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_classes_order: Option<u64>,
    pub r_image_order: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_note: Option<&'static str>,
    pub torus_quotient_invariants: TorusReportView,
    pub provenance: GroupProvenance,
}

#[derive(Serialize)]
pub struct GroupProvenance {
    pub brauer_classes: &'static str,
    pub wa_defect: &'static str,
    pub r_classes: &'static str,
    pub torus_quotient_invariants: Provenance,
}

impl Default for GroupProvenance {
    fn default() -> Self {
        GroupProvenance {
            brauer_classes: "Prop 3.6(1): H(k)/Br = G(k)/Br; Thm 3.7",
            wa_defect: "Lemma 3.8: A(H) = A(T)",
            r_classes: "Thm 4.12(2),(3); Thm 4.11 when conditional",
            torus_quotient_invariants: Provenance::default(),
        }
    }
}

impl GroupReport {
    pub fn view(&self) -> GroupReportView {
        GroupReportView {
            brauer_classes: self.torus.brauer_classes.view(),
            wa_defect: self.torus.wa_defect.view(),
            r_status: self.r_status.as_str(),
            r_classes_order: self
                .r_classes_order
                .as_ref()
                .map(|n| u64::try_from(n).expect("order exceeds u64")),
            r_image_order: u64::try_from(&self.r_image_order).expect("order exceeds u64"),
            conditional_note: self.conditional_note,
            torus_quotient_invariants: self.torus.view(),
            provenance: GroupProvenance::default(),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("G(k)/Br           {}\n", self.torus.brauer_classes.text()));
        out.push_str(&format!("A(G)              {}\n", self.torus.wa_defect.text()));
        match self.r_classes_order {
            Some(ref n) => out.push_str(&format!("|G(k)/R|          {}\n", n)),
            None => out.push_str(&format!(
                "|G(k)/R|          conditional ({})\n",
                CONDITIONAL_NOTE
            )),
        }
        out.push_str("torus quotient invariants:\n");
        for line in self.torus.text().lines() {
            out.push_str(&format!("  {}\n", line));
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceReason {
    InnerType,
    MetacyclicSplitting,
    CyclicDecompositionSubgroup,
}

impl PlaceReason {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaceReason::InnerType => "inner type",
            PlaceReason::MetacyclicSplitting => "metacyclic splitting",
            PlaceReason::CyclicDecompositionSubgroup => "cyclic decomposition subgroup",
        }
    }
}

#[derive(Clone, Serialize)]
pub struct PlaceVerdict {
    pub place: String,
    /// True when some criterion certifies that the local class group is
    /// trivial.
    pub local_br_trivial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<PlaceReason>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WaCriteriaVerdict {
    HoldsInS,
    /// The global sufficient condition (trivial Picard invariant) applies.
    HoldsGlobally,
    Fails,
    Undetermined,
}

impl WaCriteriaVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            WaCriteriaVerdict::HoldsInS => "holds_in_s",
            WaCriteriaVerdict::HoldsGlobally => "holds_globally",
            WaCriteriaVerdict::Fails => "fails",
            WaCriteriaVerdict::Undetermined => "undetermined",
        }
    }
}

pub struct WaCriteriaReport {
    pub place_verdicts: Vec<PlaceVerdict>,
    pub picard_trivial: bool,
    /// A(T); nonzero is a witness against weak approximation.
    pub wa_defect_text: String,
    pub verdict: WaCriteriaVerdict,
}

#[derive(Serialize)]
pub struct WaCriteriaView {
    pub place_verdicts: Vec<PlaceVerdict>,
    pub picard_trivial: bool,
    pub wa_defect: String,
    pub verdict: &'static str,
}

impl WaCriteriaReport {
    pub fn view(&self) -> WaCriteriaView {
        WaCriteriaView {
            place_verdicts: self.place_verdicts.clone(),
            picard_trivial: self.picard_trivial,
            wa_defect: self.wa_defect_text.clone(),
            verdict: self.verdict.as_str(),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for v in &self.place_verdicts {
            match v.reason {
                Some(r) => out.push_str(&format!(
                    "place {}: local Br trivial ({})\n",
                    v.place,
                    r.as_str()
                )),
                None => out.push_str(&format!("place {}: no criterion applies\n", v.place)),
            }
        }
        if self.picard_trivial {
            out.push_str("global condition: picard_invariant trivial\n");
        }
        out.push_str(&format!("verdict: {}\n", self.verdict.as_str()));
        out
    }
}

pub fn wa_criteria(
    desc: &ReductiveDescriptor,
    places: &PlacesSpec,
    query_places: &[String],
) -> Result<WaCriteriaReport, Error> {
    desc.validate(places)?;
    let by_label: std::collections::HashMap<&str, &crate::arithmetic::BadPlace> = places
        .bad_places
        .iter()
        .map(|p| (p.label.as_str(), p))
        .collect();
    for q in query_places {
        if !by_label.contains_key(q.as_str()) {
            return Err(Error::BadInput(format!("unknown place label {:?}", q)));
        }
    }

    let inner: std::collections::HashSet<&str> =
        desc.inner_type_places.iter().map(|s| s.as_str()).collect();
    let meta: std::collections::HashSet<&str> = desc
        .metacyclic_split_places
        .iter()
        .map(|s| s.as_str())
        .collect();

    let place_verdicts: Vec<PlaceVerdict> = query_places
        .iter()
        .map(|q| {
            let reason = if inner.contains(q.as_str()) {
                Some(PlaceReason::InnerType)
            } else if meta.contains(q.as_str()) {
                Some(PlaceReason::MetacyclicSplitting)
            } else if by_label[q.as_str()].subgroup.is_cyclic() {
                Some(PlaceReason::CyclicDecompositionSubgroup)
            } else {
                None
            };
            PlaceVerdict {
                place: q.clone(),
                local_br_trivial: reason.is_some(),
                reason,
            }
        })
        .collect();

    let torus = torus_report(&desc.torus_quotient, places, TorusOptions::default())?;
    let all_pass = place_verdicts.iter().all(|v| v.local_br_trivial);
    let verdict = if all_pass {
        WaCriteriaVerdict::HoldsInS
    } else if !torus.wa_defect.is_trivial() {
        WaCriteriaVerdict::Fails
    } else if torus.picard_trivial {
        WaCriteriaVerdict::HoldsGlobally
    } else {
        WaCriteriaVerdict::Undetermined
    };

    Ok(WaCriteriaReport {
        place_verdicts,
        picard_trivial: torus.picard_trivial,
        wa_defect_text: torus.wa_defect.text(),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::BadPlace;
    use crate::group::FiniteGroup;
    use crate::lattice::norm_one_torus_lattice;

    fn klein_four() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2)".into(), "(3 4)".into()]).unwrap()
    }

    #[test]
    fn simply_connected_rank_zero() {
        let g = klein_four();
        let desc = ReductiveDescriptor::new(GaloisLattice::trivial(g, 0));
        let report = group_report(&desc, &PlacesSpec::default(), TorusOptions::default()).unwrap();
        assert!(report.torus.brauer_classes.is_trivial());
        assert!(report.torus.wa_defect.is_trivial());
        assert_eq!(report.r_status, RStatus::Full);
        assert_eq!(report.r_classes_order, Some(BigInt::from(1)));
    }

    #[test]
    fn adjoint_via_gl_n_torus_quotient() {
        // torus quotient G_m: trivial rank-1 lattice
        let g = FiniteGroup::from_cycle_strings(&["(1 2)".into(), "(1 2 3)".into()]).unwrap();
        let desc = ReductiveDescriptor::new(GaloisLattice::trivial(g, 1));
        let report = group_report(&desc, &PlacesSpec::default(), TorusOptions::default()).unwrap();
        assert!(report.torus.picard_invariant.is_trivial());
        assert!(report.torus.brauer_classes.is_trivial());
        assert!(report.torus.wa_defect.is_trivial());
        assert_eq!(report.r_classes_order, Some(BigInt::from(1)));
        assert_eq!(
            report.torus.wa_verdict,
            crate::arithmetic::WaVerdict::Holds
        );
    }

    #[test]
    fn golden_delegation_matches_torus_report() {
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let desc = ReductiveDescriptor::new(t_hat.clone());
        let places = PlacesSpec::default();
        let report = group_report(&desc, &places, TorusOptions::default()).unwrap();
        let torus = torus_report(&t_hat, &places, TorusOptions::default()).unwrap();
        assert_eq!(
            report.torus.brauer_classes.invariant_factors(),
            torus.brauer_classes.invariant_factors()
        );
        assert_eq!(
            report.torus.wa_defect.invariant_factors(),
            torus.wa_defect.invariant_factors()
        );
        assert_eq!(report.r_status, RStatus::Full);
        assert_eq!(
            report.r_classes_order.as_ref().unwrap(),
            &(torus.sha_s.order() * &torus.n_t)
        );
    }

    #[test]
    fn conditional_status_without_flags() {
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let mut desc = ReductiveDescriptor::new(t_hat);
        desc.has_anisotropic_trialitarian_d4_or_e6 = true;
        let report = group_report(&desc, &PlacesSpec::default(), TorusOptions::default()).unwrap();
        assert_eq!(report.r_status, RStatus::Conditional);
        assert!(report.r_classes_order.is_none());
        assert_eq!(report.r_image_order, report.torus.n_t);
        assert!(report.conditional_note.unwrap().contains("n_T"));

        // totally imaginary base restores the full reduction
        desc.base_totally_imaginary = true;
        let report = group_report(&desc, &PlacesSpec::default(), TorusOptions::default()).unwrap();
        assert_eq!(report.r_status, RStatus::Full);
    }

    #[test]
    fn criteria_inner_type_everywhere() {
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let places = PlacesSpec {
            bad_places: vec![
                BadPlace {
                    label: "v1".into(),
                    subgroup: g.full_subgroup(),
                },
                BadPlace {
                    label: "v2".into(),
                    subgroup: g.subgroup(&g.closure(&[g.generators()[0]])).unwrap(),
                },
            ],
        };
        let mut desc = ReductiveDescriptor::new(t_hat);
        desc.inner_type_places = vec!["v1".into(), "v2".into()];
        let report = wa_criteria(&desc, &places, &["v1".into(), "v2".into()]).unwrap();
        assert!(report
            .place_verdicts
            .iter()
            .all(|v| v.reason == Some(PlaceReason::InnerType)));
        assert_eq!(report.verdict, WaCriteriaVerdict::HoldsInS);
    }

    #[test]
    fn criteria_cyclic_decomposition() {
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let places = PlacesSpec {
            bad_places: vec![BadPlace {
                label: "w".into(),
                subgroup: g.subgroup(&g.closure(&[g.generators()[1]])).unwrap(),
            }],
        };
        let desc = ReductiveDescriptor::new(t_hat);
        let report = wa_criteria(&desc, &places, &["w".into()]).unwrap();
        assert_eq!(
            report.place_verdicts[0].reason,
            Some(PlaceReason::CyclicDecompositionSubgroup)
        );
        assert_eq!(report.verdict, WaCriteriaVerdict::HoldsInS);
    }

    #[test]
    fn criteria_fails_with_wa_defect_witness() {
        // Klein four decomposition group at the queried place; A(T) = Z/2
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let places = PlacesSpec {
            bad_places: vec![BadPlace {
                label: "v0".into(),
                subgroup: g.full_subgroup(),
            }],
        };
        let desc = ReductiveDescriptor::new(t_hat);
        let report = wa_criteria(&desc, &places, &["v0".into()]).unwrap();
        assert!(!report.place_verdicts[0].local_br_trivial);
        assert_eq!(report.verdict, WaCriteriaVerdict::Fails);
        assert_eq!(report.wa_defect_text, "Z/2");

        // monotone: flagging the place flips fails to holds, never the
        // other way
        let mut flagged = ReductiveDescriptor::new(desc.torus_quotient.clone());
        flagged.metacyclic_split_places = vec!["v0".into()];
        let report = wa_criteria(&flagged, &places, &["v0".into()]).unwrap();
        assert_eq!(
            report.place_verdicts[0].reason,
            Some(PlaceReason::MetacyclicSplitting)
        );
        assert_eq!(report.verdict, WaCriteriaVerdict::HoldsInS);
    }

    #[test]
    fn unknown_labels_rejected() {
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let desc = ReductiveDescriptor::new(t_hat.clone());
        let err = wa_criteria(&desc, &PlacesSpec::default(), &["nope".into()]);
        assert!(matches!(err, Err(Error::BadInput(_))));

        let mut desc = ReductiveDescriptor::new(t_hat);
        desc.inner_type_places = vec!["ghost".into()];
        let err = group_report(&desc, &PlacesSpec::default(), TorusOptions::default());
        assert!(matches!(err, Err(Error::BadInput(_))));
    }

    #[test]
    fn view_nests_torus_invariants() {
        let g = klein_four();
        let (t_hat, _) = norm_one_torus_lattice(&g);
        let desc = ReductiveDescriptor::new(t_hat);
        let report = group_report(&desc, &PlacesSpec::default(), TorusOptions::default()).unwrap();
        let json = serde_json::to_value(report.view()).unwrap();
        assert_eq!(json["r_status"], "full");
        assert_eq!(
            json["torus_quotient_invariants"]["picard_invariant"]["invariant_factors"],
            serde_json::json!([2])
        );
        assert!(json.get("r_classes_order").is_some());
    }
}
