//! Pedigree and risk-factor domain types.
//!
//! A [`Pedigree`] holds the proband (always at index 0) and her first- and
//! second-degree relatives. Parent links are implied by [`Relation`]; any
//! parent not listed is treated as an unobserved founder by the carrier
//! model. Documents are versioned JSON (see `docs/pedigree.schema.json`).

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::HashSet;
use std::fmt;

use crate::MAX_AGE;

pub const PEDIGREE_SCHEMA_VERSION: u32 = 1;

/// Age at first live birth recorded for nulliparous women.
pub const NULLIPAROUS_FIRST_BIRTH_AGE: u32 = 25;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PedigreeError {
    #[error("malformed pedigree document: {0}")]
    Syntax(String),
    #[error("member {id}: schema violation: {message}")]
    Schema { id: String, message: String },
    #[error("member {id}: {message}")]
    Semantic { id: String, message: String },
    #[error("pedigree structure: {0}")]
    Structure(String),
    #[error("risk factors: {0}")]
    RiskFactors(String),
}

impl PedigreeError {
    fn semantic(id: u32, message: impl Into<String>) -> Self {
        PedigreeError::Semantic {
            id: id.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Proband,
    Mother,
    Father,
    Sister,
    Brother,
    Daughter,
    Son,
    MaternalGrandmother,
    MaternalGrandfather,
    PaternalGrandmother,
    PaternalGrandfather,
    MaternalAunt,
    MaternalUncle,
    PaternalAunt,
    PaternalUncle,
}

impl Relation {
    pub const ALL: [Relation; 15] = [
        Relation::Proband,
        Relation::Mother,
        Relation::Father,
        Relation::Sister,
        Relation::Brother,
        Relation::Daughter,
        Relation::Son,
        Relation::MaternalGrandmother,
        Relation::MaternalGrandfather,
        Relation::PaternalGrandmother,
        Relation::PaternalGrandfather,
        Relation::MaternalAunt,
        Relation::MaternalUncle,
        Relation::PaternalAunt,
        Relation::PaternalUncle,
    ];

    /// Degree of relationship to the proband (0 for the proband herself).
    pub fn degree(self) -> u8 {
        use Relation::*;
        match self {
            Proband => 0,
            Mother | Father | Sister | Brother | Daughter | Son => 1,
            _ => 2,
        }
    }

    /// Sex implied by the relation label.
    pub fn implied_sex(self) -> Option<Sex> {
        use Relation::*;
        match self {
            Proband | Mother | Sister | Daughter | MaternalGrandmother | PaternalGrandmother
            | MaternalAunt | PaternalAunt => Some(Sex::Female),
            Father | Brother | Son | MaternalGrandfather | PaternalGrandfather | MaternalUncle
            | PaternalUncle => Some(Sex::Male),
        }
    }

    /// Relations that can appear at most once in a pedigree.
    pub fn is_unique(self) -> bool {
        use Relation::*;
        matches!(
            self,
            Proband
                | Mother
                | Father
                | MaternalGrandmother
                | MaternalGrandfather
                | PaternalGrandmother
                | PaternalGrandfather
        )
    }

    pub fn as_str(self) -> &'static str {
        use Relation::*;
        match self {
            Proband => "proband",
            Mother => "mother",
            Father => "father",
            Sister => "sister",
            Brother => "brother",
            Daughter => "daughter",
            Son => "son",
            MaternalGrandmother => "maternal_grandmother",
            MaternalGrandfather => "maternal_grandfather",
            PaternalGrandmother => "paternal_grandmother",
            PaternalGrandfather => "paternal_grandfather",
            MaternalAunt => "maternal_aunt",
            MaternalUncle => "maternal_uncle",
            PaternalAunt => "paternal_aunt",
            PaternalUncle => "paternal_uncle",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    pub fn as_str(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Race {
    White,
    Black,
    Hispanic,
    Asian,
    NativeAmerican,
    Unknown,
}

impl Race {
    pub const ALL: [Race; 6] = [
        Race::White,
        Race::Black,
        Race::Hispanic,
        Race::Asian,
        Race::NativeAmerican,
        Race::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Race::White => "white",
            Race::Black => "black",
            Race::Hispanic => "hispanic",
            Race::Asian => "asian",
            Race::NativeAmerican => "native_american",
            Race::Unknown => "unknown",
        }
    }

    pub fn parse(s: &str) -> Option<Race> {
        Race::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for Race {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of a clinical BRCA1/2 test. Untested members carry no value; an
/// unknown result is never recorded as negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneticTest {
    Brca1Positive,
    Brca2Positive,
    BothPositive,
    Negative,
}

impl GeneticTest {
    pub fn is_positive(self) -> bool {
        !matches!(self, GeneticTest::Negative)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EthnicityFlags {
    #[serde(default)]
    pub ashkenazi: bool,
}

fn default_race() -> Race {
    Race::Unknown
}

/// One pedigree member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relative {
    pub id: u32,
    pub relation: Relation,
    pub sex: Sex,
    pub current_age_or_death_age: u32,
    pub alive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breast_cancer: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ovarian_cancer: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genetic_test: Option<GeneticTest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prophylactic_mastectomy_age: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prophylactic_oophorectomy_age: Option<u32>,
    #[serde(default)]
    pub ethnicity_flags: EthnicityFlags,
    #[serde(default = "default_race")]
    pub race: Race,
}

impl Relative {
    /// A living, unaffected, untested member.
    pub fn new(id: u32, relation: Relation, sex: Sex, age: u32) -> Self {
        Relative {
            id,
            relation,
            sex,
            current_age_or_death_age: age,
            alive: true,
            breast_cancer: None,
            ovarian_cancer: None,
            genetic_test: None,
            prophylactic_mastectomy_age: None,
            prophylactic_oophorectomy_age: None,
            ethnicity_flags: EthnicityFlags::default(),
            race: Race::Unknown,
        }
    }

    pub fn age(&self) -> u32 {
        self.current_age_or_death_age
    }

    fn clamp_ages(&mut self) {
        let id = self.id;
        let clamp = |v: &mut u32, what: &str| {
            if *v > MAX_AGE {
                warn!("member {id}: {what} {v} above {MAX_AGE}, clamped");
                *v = MAX_AGE;
            }
        };
        clamp(&mut self.current_age_or_death_age, "age");
        for (v, what) in [
            (&mut self.breast_cancer, "breast cancer onset age"),
            (&mut self.ovarian_cancer, "ovarian cancer onset age"),
            (&mut self.prophylactic_mastectomy_age, "mastectomy age"),
            (&mut self.prophylactic_oophorectomy_age, "oophorectomy age"),
        ] {
            if let Some(v) = v.as_mut() {
                clamp(v, what);
            }
        }
    }

    fn validate(&self) -> Result<(), PedigreeError> {
        let id = self.id;
        let age = self.current_age_or_death_age;
        if age < 1 {
            return Err(PedigreeError::semantic(
                id,
                "current_age_or_death_age must be at least 1",
            ));
        }
        if let Some(expected) = self.relation.implied_sex() {
            if expected != self.sex {
                return Err(PedigreeError::semantic(
                    id,
                    format!(
                        "relation {} requires sex {}",
                        self.relation,
                        expected.as_str()
                    ),
                ));
            }
        }
        for (onset, what) in [
            (self.breast_cancer, "breast_cancer"),
            (self.ovarian_cancer, "ovarian_cancer"),
        ] {
            if let Some(t) = onset {
                if t < 1 {
                    return Err(PedigreeError::semantic(
                        id,
                        format!("{what} onset age must be at least 1"),
                    ));
                }
                if t > age {
                    return Err(PedigreeError::semantic(
                        id,
                        format!("{what} onset age {t} exceeds current/death age {age}"),
                    ));
                }
            }
        }
        for (surgery, what) in [
            (
                self.prophylactic_mastectomy_age,
                "prophylactic_mastectomy_age",
            ),
            (
                self.prophylactic_oophorectomy_age,
                "prophylactic_oophorectomy_age",
            ),
        ] {
            if let Some(s) = surgery {
                if s > age {
                    return Err(PedigreeError::semantic(
                        id,
                        format!("{what} {s} exceeds current/death age {age}"),
                    ));
                }
            }
        }
        if self.sex == Sex::Male
            && (self.ovarian_cancer.is_some() || self.prophylactic_oophorectomy_age.is_some())
        {
            return Err(PedigreeError::semantic(
                id,
                "ovarian fields are not allowed for male members",
            ));
        }
        if let (Some(onset), Some(surgery)) = (self.breast_cancer, self.prophylactic_mastectomy_age)
        {
            if onset > surgery {
                return Err(PedigreeError::semantic(
                    id,
                    format!(
                        "breast cancer onset {onset} after prophylactic mastectomy at {surgery}"
                    ),
                ));
            }
        }
        if let (Some(onset), Some(surgery)) =
            (self.ovarian_cancer, self.prophylactic_oophorectomy_age)
        {
            if onset > surgery {
                return Err(PedigreeError::semantic(
                    id,
                    format!(
                        "ovarian cancer onset {onset} after prophylactic oophorectomy at {surgery}"
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// A validated pedigree. Immutable once constructed; the proband is always
/// `members()[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pedigree {
    family_id: Option<String>,
    members: Vec<Relative>,
}

#[derive(Serialize, Deserialize)]
struct PedigreeDocument {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family_id: Option<String>,
    members: Vec<Relative>,
}

impl Pedigree {
    /// Validates and normalizes a member list (ages clamped to the table
    /// range, proband moved to the front).
    pub fn new(
        family_id: Option<String>,
        mut members: Vec<Relative>,
    ) -> Result<Self, PedigreeError> {
        for m in &mut members {
            m.clamp_ages();
        }
        for m in &members {
            m.validate()?;
        }
        let mut seen = HashSet::new();
        for m in &members {
            if !seen.insert(m.id) {
                return Err(PedigreeError::semantic(m.id, "duplicate member id"));
            }
        }
        let probands: Vec<_> = members
            .iter()
            .filter(|m| m.relation == Relation::Proband)
            .collect();
        match probands.len() {
            0 => return Err(PedigreeError::Structure("no proband".into())),
            1 => {}
            _ => {
                return Err(PedigreeError::semantic(
                    probands[1].id,
                    "second proband; exactly one is allowed",
                ))
            }
        }
        let proband = probands[0];
        if !proband.alive {
            return Err(PedigreeError::semantic(proband.id, "proband must be alive"));
        }
        for rel in Relation::ALL
            .iter()
            .filter(|r| r.is_unique() && **r != Relation::Proband)
        {
            let dup: Vec<_> = members.iter().filter(|m| m.relation == *rel).collect();
            if dup.len() > 1 {
                return Err(PedigreeError::semantic(
                    dup[1].id,
                    format!("more than one {rel}"),
                ));
            }
        }
        let pos = members
            .iter()
            .position(|m| m.relation == Relation::Proband)
            .unwrap();
        if pos != 0 {
            let p = members.remove(pos);
            members.insert(0, p);
        }
        Ok(Pedigree { family_id, members })
    }

    pub fn proband_only(proband: Relative) -> Result<Self, PedigreeError> {
        Pedigree::new(None, vec![proband])
    }

    pub fn family_id(&self) -> Option<&str> {
        self.family_id.as_deref()
    }

    pub fn members(&self) -> &[Relative] {
        &self.members
    }

    pub fn proband(&self) -> &Relative {
        &self.members[0]
    }

    pub fn relatives(&self) -> impl Iterator<Item = &Relative> {
        self.members[1..].iter()
    }

    pub fn member(&self, id: u32) -> Option<&Relative> {
        self.members.iter().find(|m| m.id == id)
    }

    pub fn with_relation(&self, relation: Relation) -> impl Iterator<Item = &Relative> {
        self.members.iter().filter(move |m| m.relation == relation)
    }

    /// Returns a copy with `edit` applied to the member list, re-validated.
    pub fn edited(&self, edit: impl FnOnce(&mut Vec<Relative>)) -> Result<Pedigree, PedigreeError> {
        let mut members = self.members.clone();
        edit(&mut members);
        Pedigree::new(self.family_id.clone(), members)
    }

    /// The proband carries a positive BRCA1/2 test result.
    pub fn proband_known_carrier(&self) -> bool {
        self.proband()
            .genetic_test
            .is_some_and(GeneticTest::is_positive)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self.to_document()).expect("pedigree serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("pedigree serializes")
    }

    fn to_document(&self) -> PedigreeDocument {
        PedigreeDocument {
            schema_version: PEDIGREE_SCHEMA_VERSION,
            family_id: self.family_id.clone(),
            members: self.members.clone(),
        }
    }
}

impl Serialize for Pedigree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_document().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pedigree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        pedigree_from_value(&v).map_err(serde::de::Error::custom)
    }
}

/// Parses and validates a pedigree JSON document.
pub fn parse_pedigree(document: &str) -> Result<Pedigree, PedigreeError> {
    let v: Value =
        serde_json::from_str(document).map_err(|e| PedigreeError::Syntax(e.to_string()))?;
    pedigree_from_value(&v)
}

pub fn pedigree_from_value(v: &Value) -> Result<Pedigree, PedigreeError> {
    let obj = v
        .as_object()
        .ok_or_else(|| PedigreeError::Syntax("document must be a JSON object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "schema_version" | "family_id" | "members") {
            return Err(PedigreeError::Syntax(format!(
                "unknown top-level field `{key}`"
            )));
        }
    }
    match obj.get("schema_version") {
        Some(Value::Number(n)) if n.as_u64() == Some(PEDIGREE_SCHEMA_VERSION as u64) => {}
        Some(other) => {
            return Err(PedigreeError::Syntax(format!(
                "unsupported schema_version {other}"
            )));
        }
        None => return Err(PedigreeError::Syntax("missing schema_version".into())),
    }
    let family_id = match obj.get("family_id") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(PedigreeError::Syntax("family_id must be a string".into())),
    };
    let members = obj
        .get("members")
        .and_then(Value::as_array)
        .ok_or_else(|| PedigreeError::Syntax("members must be an array".into()))?;
    let mut parsed = Vec::with_capacity(members.len());
    for (i, m) in members.iter().enumerate() {
        let id = m
            .get("id")
            .map(|v| v.to_string())
            .unwrap_or_else(|| format!("#{i} (no id)"));
        let rel: Relative =
            serde_json::from_value(m.clone()).map_err(|e| PedigreeError::Schema {
                id,
                message: e.to_string(),
            })?;
        parsed.push(rel);
    }
    Pedigree::new(family_id, parsed)
}

/// Number of female first-degree relatives (mother, sisters, daughters) with
/// breast cancer.
pub fn count_affected_first_degree(p: &Pedigree) -> u32 {
    p.relatives()
        .filter(|m| m.sex == Sex::Female)
        .filter(|m| {
            matches!(
                m.relation,
                Relation::Mother | Relation::Sister | Relation::Daughter
            )
        })
        .filter(|m| m.breast_cancer.is_some())
        .count() as u32
}

/// Family-history stratum used for stratified evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    Strong,
    Less,
}

/// Configurable family-history triggers. Only relatives' breast and ovarian
/// diagnoses are consulted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRules {
    #[serde(default)]
    pub schema_version: u32,
    /// Any ovarian cancer in a relative within `max_degree`.
    pub any_ovarian: bool,
    /// Breast cancer diagnosed at or before this age.
    pub breast_onset_max_age: Option<u32>,
    /// At least this many breast cancers among relatives.
    pub min_breast_cancers: Option<u32>,
    pub max_degree: u8,
}

impl Default for StratumRules {
    fn default() -> Self {
        StratumRules {
            schema_version: 1,
            any_ovarian: true,
            breast_onset_max_age: Some(50),
            min_breast_cancers: Some(2),
            max_degree: 2,
        }
    }
}

pub fn stratify_family_history(p: &Pedigree, rules: &StratumRules) -> Stratum {
    let considered = p
        .relatives()
        .filter(|m| m.relation.degree() <= rules.max_degree);
    let mut breast = 0u32;
    for m in considered {
        if rules.any_ovarian && m.ovarian_cancer.is_some() {
            return Stratum::Strong;
        }
        if let Some(onset) = m.breast_cancer {
            breast += 1;
            if rules.breast_onset_max_age.is_some_and(|max| onset <= max) {
                return Stratum::Strong;
            }
        }
    }
    if rules.min_breast_cancers.is_some_and(|min| breast >= min) {
        Stratum::Strong
    } else {
        Stratum::Less
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Biopsies {
    Zero,
    One,
    TwoOrMore,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyperplasia {
    No,
    Yes,
    Unknown,
}

/// The five relative-hazard covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskFactors {
    /// `None` when unknown.
    pub age_at_menarche: Option<u32>,
    pub num_biopsies: Biopsies,
    /// Nulliparous women carry [`NULLIPAROUS_FIRST_BIRTH_AGE`].
    pub age_first_live_birth: u32,
    pub affected_first_degree: u32,
    pub atypical_hyperplasia: Hyperplasia,
}

impl RiskFactors {
    /// The reference profile: every indicator in the relative-hazard model
    /// is inactive.
    pub fn baseline() -> Self {
        RiskFactors {
            age_at_menarche: Some(14),
            num_biopsies: Biopsies::Zero,
            age_first_live_birth: 19,
            affected_first_degree: 0,
            atypical_hyperplasia: Hyperplasia::Unknown,
        }
    }

    /// Checks the family-history covariate against the paired pedigree.
    pub fn check_against(&self, p: &Pedigree) -> Result<(), PedigreeError> {
        let counted = count_affected_first_degree(p);
        if counted != self.affected_first_degree {
            return Err(PedigreeError::RiskFactors(format!(
                "affected_first_degree is {} but the pedigree has {counted} affected female first-degree relatives",
                self.affected_first_degree
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(members: &str) -> String {
        format!(r#"{{"schema_version":1,"members":[{members}]}}"#)
    }

    const PROBAND_40: &str = r#"{"id":0,"relation":"proband","sex":"female","current_age_or_death_age":40,"alive":true}"#;

    fn affected(id: u32, relation: Relation, age: u32, onset: u32) -> Relative {
        let sex = relation.implied_sex().unwrap();
        let mut r = Relative::new(id, relation, sex, age);
        r.breast_cancer = Some(onset);
        r
    }

    fn proband(age: u32) -> Relative {
        Relative::new(0, Relation::Proband, Sex::Female, age)
    }

    #[test]
    fn minimal_document_parses() {
        let p = parse_pedigree(&doc(PROBAND_40)).unwrap();
        assert_eq!(p.members().len(), 1);
        assert_eq!(p.proband().age(), 40);
        assert_eq!(p.proband().race, Race::Unknown);
    }

    #[test]
    fn onset_after_death_is_rejected_with_member_id() {
        let sister = r#"{"id":7,"relation":"sister","sex":"female","current_age_or_death_age":50,"alive":false,"breast_cancer":55}"#;
        let err = parse_pedigree(&doc(&format!("{PROBAND_40},{sister}"))).unwrap_err();
        match err {
            PedigreeError::Semantic { id, message } => {
                assert_eq!(id, "7");
                assert!(message.contains("55"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_probands_rejected() {
        let second = PROBAND_40.replace("\"id\":0", "\"id\":1");
        let err = parse_pedigree(&doc(&format!("{PROBAND_40},{second}"))).unwrap_err();
        assert!(
            matches!(err, PedigreeError::Semantic { ref id, .. } if id == "1"),
            "{err:?}"
        );
    }

    #[test]
    fn schema_error_names_member() {
        let bad = r#"{"id":3,"relation":"sister","sex":"female","alive":true}"#;
        let err = parse_pedigree(&doc(&format!("{PROBAND_40},{bad}"))).unwrap_err();
        assert!(
            matches!(err, PedigreeError::Schema { ref id, .. } if id == "3"),
            "{err:?}"
        );
    }

    #[test]
    fn male_ovarian_fields_rejected() {
        let mut b = Relative::new(2, Relation::Brother, Sex::Male, 40);
        b.ovarian_cancer = Some(30);
        assert!(Pedigree::new(None, vec![proband(40), b]).is_err());
    }

    #[test]
    fn sex_must_match_relation() {
        let m = Relative::new(2, Relation::Mother, Sex::Male, 60);
        assert!(Pedigree::new(None, vec![proband(40), m]).is_err());
    }

    #[test]
    fn proband_moved_to_front_and_ages_clamped() {
        let mut gm = Relative::new(5, Relation::MaternalGrandmother, Sex::Female, 101);
        gm.alive = false;
        let p = Pedigree::new(None, vec![gm, proband(40)]).unwrap();
        assert_eq!(p.proband().id, 0);
        assert_eq!(p.member(5).unwrap().age(), MAX_AGE);
    }

    #[test]
    fn proband_must_be_alive() {
        let mut pr = proband(40);
        pr.alive = false;
        assert!(Pedigree::new(None, vec![pr]).is_err());
    }

    #[test]
    fn count_first_degree_examples() {
        let p = Pedigree::new(None, vec![proband(40)]).unwrap();
        assert_eq!(count_affected_first_degree(&p), 0);

        let p = Pedigree::new(
            None,
            vec![
                proband(40),
                affected(1, Relation::Mother, 70, 45),
                affected(2, Relation::MaternalAunt, 68, 50),
            ],
        )
        .unwrap();
        assert_eq!(count_affected_first_degree(&p), 1);

        let p = Pedigree::new(
            None,
            vec![
                proband(40),
                affected(1, Relation::Mother, 70, 45),
                affected(2, Relation::Sister, 45, 41),
                affected(3, Relation::Sister, 38, 36),
                Relative::new(4, Relation::Sister, Sex::Female, 35),
            ],
        )
        .unwrap();
        assert_eq!(count_affected_first_degree(&p), 3);
    }

    #[test]
    fn stratify_examples() {
        let rules = StratumRules::default();
        let p = Pedigree::new(None, vec![proband(40)]).unwrap();
        assert_eq!(stratify_family_history(&p, &rules), Stratum::Less);

        let mut aunt = Relative::new(3, Relation::PaternalAunt, Sex::Female, 77);
        aunt.ovarian_cancer = Some(71);
        let p = Pedigree::new(None, vec![proband(40), aunt]).unwrap();
        assert_eq!(stratify_family_history(&p, &rules), Stratum::Strong);

        let p = Pedigree::new(
            None,
            vec![proband(40), affected(1, Relation::Mother, 70, 65)],
        )
        .unwrap();
        assert_eq!(stratify_family_history(&p, &rules), Stratum::Less);

        let p = Pedigree::new(
            None,
            vec![
                proband(40),
                affected(1, Relation::Mother, 70, 65),
                affected(2, Relation::MaternalAunt, 80, 72),
            ],
        )
        .unwrap();
        assert_eq!(stratify_family_history(&p, &rules), Stratum::Strong);
    }

    #[test]
    fn risk_factor_family_history_must_match() {
        let p = Pedigree::new(
            None,
            vec![proband(40), affected(1, Relation::Mother, 70, 45)],
        )
        .unwrap();
        let mut x = RiskFactors::baseline();
        assert!(x.check_against(&p).is_err());
        x.affected_first_degree = 1;
        x.check_against(&p).unwrap();
    }

    #[test]
    fn explicit_nulls_normalize_to_absent() {
        let with_nulls = r#"{"id":0,"relation":"proband","sex":"female","current_age_or_death_age":40,"alive":true,"breast_cancer":null,"genetic_test":null}"#;
        let p = parse_pedigree(&doc(with_nulls)).unwrap();
        let v = p.to_value();
        assert!(v["members"][0].get("breast_cancer").is_none());
        assert_eq!(v["members"][0]["race"], "unknown");
    }
}
