//! Parameter tables and the on-disk parameter-set directory.
//!
//! A parameter set is a directory containing `manifest.json` plus the CSV
//! tables it lists with their SHA-256 checksums:
//!
//! | file | keyed by |
//! |------|----------|
//! | `penetrance.csv` | age rows 1..94; columns `cancer.sex.genotype.race` |
//! | `mortality.csv` | age rows 1..94; one column per race |
//! | `allele_frequencies.csv` | (locus, ethnicity) |
//! | `relhaz_coefficients.csv` | (race, β index 1..19) |
//! | `baseline_hazard.csv` | (race, interval 1..13) |
//! | `normalization.csv` | (race, band) → 1 − AR |
//! | `covariate_distribution.csv` | (race, band, factor, category) |
//! | `stratum_rules.json` | family-history stratum triggers |

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use crate::mendelian::hazard::hazard_from_penetrance;
use crate::mendelian::Genotype;
use crate::pedigree::{Biopsies, Hyperplasia, Race, Sex, StratumRules};
use crate::relhaz::{AgeBand, CovariateTable, FirstBirthCategory, MenarcheCategory};
use crate::MAX_AGE;

#[derive(Debug, thiserror::Error)]
pub enum ParamError {
    #[error("parameter file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parameter file {file}: {message}")]
    Format { file: String, message: String },
    #[error("checksum mismatch for {file}: manifest {expected}, actual {actual}")]
    Checksum {
        file: String,
        expected: String,
        actual: String,
    },
    #[error("missing parameter table: {0}")]
    Missing(String),
    #[error("parameter integrity: {0}")]
    Integrity(String),
}

fn fmt_err(file: &str, message: impl Into<String>) -> ParamError {
    ParamError::Format {
        file: file.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cancer {
    Breast,
    Ovarian,
}

impl Cancer {
    pub fn as_str(self) -> &'static str {
        match self {
            Cancer::Breast => "breast",
            Cancer::Ovarian => "ovarian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PenetranceKey {
    pub cancer: Cancer,
    pub sex: Sex,
    pub genotype: Genotype,
    pub race: Race,
}

impl PenetranceKey {
    pub fn new(cancer: Cancer, sex: Sex, genotype: Genotype, race: Race) -> Self {
        PenetranceKey {
            cancer,
            sex,
            genotype,
            race,
        }
    }

    pub fn column_name(&self) -> String {
        format!(
            "{}.{}.{}.{}",
            self.cancer.as_str(),
            self.sex.as_str(),
            self.genotype.code(),
            self.race.as_str()
        )
    }

    fn parse(s: &str) -> Option<Self> {
        let mut parts = s.split('.');
        let cancer = match parts.next()? {
            "breast" => Cancer::Breast,
            "ovarian" => Cancer::Ovarian,
            _ => return None,
        };
        let sex = match parts.next()? {
            "female" => Sex::Female,
            "male" => Sex::Male,
            _ => return None,
        };
        let genotype = Genotype::from_code(parts.next()?.parse().ok()?)?;
        let race = Race::parse(parts.next()?)?;
        if parts.next().is_some() {
            return None;
        }
        Some(PenetranceKey {
            cancer,
            sex,
            genotype,
            race,
        })
    }
}

/// Per-locus allele frequencies by ethnicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlleleFrequencies {
    /// `[brca1, brca2]` for non-Ashkenazi individuals.
    pub general: [f64; 2],
    /// `[brca1, brca2]` for Ashkenazi Jewish individuals.
    pub ashkenazi: [f64; 2],
}

impl AlleleFrequencies {
    pub fn for_ethnicity(&self, ashkenazi: bool) -> [f64; 2] {
        if ashkenazi {
            self.ashkenazi
        } else {
            self.general
        }
    }
}

/// Penetrance (per-year P(T = t, J = cancer | genotype)), mortality and
/// allele frequencies. Female breast hazards are derived at construction.
#[derive(Debug, Clone)]
pub struct PenetranceTable {
    penetrance: HashMap<PenetranceKey, Vec<f64>>,
    cumulative: HashMap<PenetranceKey, Vec<f64>>,
    mortality: HashMap<Race, Vec<f64>>,
    breast_hazard: HashMap<(Genotype, Race), Vec<f64>>,
    alleles: AlleleFrequencies,
}

/// Value of an age-indexed curve (index 0 = age 1).
#[inline]
pub fn at_age(curve: &[f64], age: u32) -> f64 {
    curve[(age - 1) as usize]
}

impl PenetranceTable {
    pub fn new(
        penetrance: HashMap<PenetranceKey, Vec<f64>>,
        mortality: HashMap<Race, Vec<f64>>,
        alleles: AlleleFrequencies,
    ) -> Result<Self, ParamError> {
        let n = MAX_AGE as usize;
        for (race, m) in &mortality {
            if m.len() != n || m.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(ParamError::Integrity(format!(
                    "mortality for {race} must have {n} entries in [0,1]"
                )));
            }
        }
        for f in alleles.general.iter().chain(alleles.ashkenazi.iter()) {
            if !(0.0..0.5).contains(f) {
                return Err(ParamError::Integrity(format!(
                    "allele frequency {f} outside [0, 0.5)"
                )));
            }
        }
        let mut cumulative = HashMap::new();
        for (key, pen) in &penetrance {
            if pen.len() != n {
                return Err(ParamError::Integrity(format!(
                    "{} has {} entries, expected {n}",
                    key.column_name(),
                    pen.len()
                )));
            }
            let mut acc = 0.0;
            let mut cum = Vec::with_capacity(n);
            for (i, &p) in pen.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(ParamError::Integrity(format!(
                        "{} at age {}: {p} outside [0,1]",
                        key.column_name(),
                        i + 1
                    )));
                }
                acc += p;
                cum.push(acc);
            }
            if acc > 1.0 + 1e-12 {
                return Err(ParamError::Integrity(format!(
                    "{} cumulative penetrance {acc} exceeds 1",
                    key.column_name()
                )));
            }
            cumulative.insert(*key, cum);
        }
        let mut breast_hazard = HashMap::new();
        for (key, pen) in &penetrance {
            if key.cancer != Cancer::Breast || key.sex != Sex::Female {
                continue;
            }
            let mort = mortality
                .get(&key.race)
                .ok_or_else(|| ParamError::Missing(format!("mortality for race {}", key.race)))?;
            let hz = hazard_from_penetrance(pen, mort)
                .map_err(|e| ParamError::Integrity(format!("{}: {e}", key.column_name())))?;
            breast_hazard.insert((key.genotype, key.race), hz);
        }
        Ok(PenetranceTable {
            penetrance,
            cumulative,
            mortality,
            breast_hazard,
            alleles,
        })
    }

    pub fn penetrance(&self, key: PenetranceKey) -> Result<&[f64], ParamError> {
        self.penetrance
            .get(&key)
            .map(Vec::as_slice)
            .ok_or_else(|| ParamError::Missing(format!("penetrance {}", key.column_name())))
    }

    /// Cumulative penetrance Σ_{u ≤ t}; index 0 = age 1.
    pub fn cumulative(&self, key: PenetranceKey) -> Result<&[f64], ParamError> {
        self.cumulative
            .get(&key)
            .map(Vec::as_slice)
            .ok_or_else(|| ParamError::Missing(format!("penetrance {}", key.column_name())))
    }

    pub fn mortality(&self, race: Race) -> Result<&[f64], ParamError> {
        self.mortality
            .get(&race)
            .map(Vec::as_slice)
            .ok_or_else(|| ParamError::Missing(format!("mortality for race {race}")))
    }

    /// Female breast cause-specific hazard λ_B^γ(t) for a genotype and race.
    pub fn breast_hazard(&self, genotype: Genotype, race: Race) -> Result<&[f64], ParamError> {
        self.breast_hazard
            .get(&(genotype, race))
            .map(Vec::as_slice)
            .ok_or_else(|| {
                ParamError::Missing(format!(
                    "female breast penetrance for genotype {} race {race}",
                    genotype.code()
                ))
            })
    }

    pub fn alleles(&self) -> &AlleleFrequencies {
        &self.alleles
    }
}

/// Log relative hazards β₁..β₁₉ per race (stored 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct RelHazCoefficients {
    by_race: BTreeMap<Race, [f64; 19]>,
}

impl RelHazCoefficients {
    pub fn new(by_race: BTreeMap<Race, [f64; 19]>) -> Result<Self, ParamError> {
        for (race, b) in &by_race {
            if b.iter().any(|v| !v.is_finite()) {
                return Err(ParamError::Integrity(format!(
                    "non-finite coefficient for {race}"
                )));
            }
        }
        Ok(RelHazCoefficients { by_race })
    }

    pub fn for_race(&self, race: Race) -> Result<&[f64; 19], ParamError> {
        self.by_race
            .get(&race)
            .ok_or_else(|| ParamError::Missing(format!("relative-hazard coefficients for {race}")))
    }
}

/// One piece of the 13-interval general-population hazard grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardInterval {
    pub start: f64,
    pub end: f64,
    /// General-population breast cancer hazard λ̃_B.
    pub breast: f64,
    /// Competing mortality λ̃_D.
    pub competing: f64,
}

pub const BASELINE_INTERVALS: usize = 13;

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineHazard {
    by_race: BTreeMap<Race, Vec<HazardInterval>>,
}

impl BaselineHazard {
    pub fn new(by_race: BTreeMap<Race, Vec<HazardInterval>>) -> Result<Self, ParamError> {
        for (race, grid) in &by_race {
            if grid.len() != BASELINE_INTERVALS {
                return Err(ParamError::Integrity(format!(
                    "baseline hazard for {race} has {} intervals, expected {BASELINE_INTERVALS}",
                    grid.len()
                )));
            }
            for w in grid.windows(2) {
                if w[0].end != w[1].start {
                    return Err(ParamError::Integrity(format!(
                        "baseline grid for {race} is not contiguous"
                    )));
                }
            }
            for iv in grid {
                if !(iv.end > iv.start) || iv.breast < 0.0 || iv.competing < 0.0 {
                    return Err(ParamError::Integrity(format!(
                        "invalid baseline interval for {race}: {iv:?}"
                    )));
                }
            }
        }
        Ok(BaselineHazard { by_race })
    }

    pub fn for_race(&self, race: Race) -> Result<&[HazardInterval], ParamError> {
        self.by_race
            .get(&race)
            .map(Vec::as_slice)
            .ok_or_else(|| ParamError::Missing(format!("baseline hazard for {race}")))
    }
}

/// (1 − AR(t)) factors per race and age band. The same table normalizes the
/// relative hazard for the penetrance-modification model, where the
/// non-carrier attributable risk is approximated by the population value.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationTable {
    by_race: BTreeMap<Race, [f64; 2]>,
}

impl NormalizationTable {
    pub fn new(by_race: BTreeMap<Race, [f64; 2]>) -> Result<Self, ParamError> {
        for (race, v) in &by_race {
            if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(ParamError::Integrity(format!(
                    "normalization for {race} must be positive"
                )));
            }
        }
        Ok(NormalizationTable { by_race })
    }

    /// Every factor equal to one (no normalization).
    pub fn unit() -> Self {
        NormalizationTable {
            by_race: Race::ALL.iter().map(|r| (*r, [1.0, 1.0])).collect(),
        }
    }

    pub fn one_minus_ar(&self, race: Race, band: AgeBand) -> Result<f64, ParamError> {
        let v = self
            .by_race
            .get(&race)
            .ok_or_else(|| ParamError::Missing(format!("normalization for {race}")))?;
        Ok(match band {
            AgeBand::Under50 => v[0],
            AgeBand::From50 => v[1],
        })
    }
}

/// Covariate distributions P(X | t) keyed by race and band.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateDistribution {
    tables: BTreeMap<(Race, AgeBand), CovariateTable>,
}

impl CovariateDistribution {
    pub fn new(tables: BTreeMap<(Race, AgeBand), CovariateTable>) -> Self {
        CovariateDistribution { tables }
    }

    pub fn table(&self, race: Race, band: AgeBand) -> Result<&CovariateTable, ParamError> {
        self.tables.get(&(race, band)).ok_or_else(|| {
            ParamError::Missing(format!("covariate distribution for {race} {band:?}"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamManifest {
    pub schema_version: u32,
    pub name: String,
    pub version: String,
    #[serde(default)]
    pub clinical: bool,
    #[serde(default)]
    pub description: String,
    pub files: BTreeMap<String, String>,
}

/// Everything the models need, loaded from one parameter directory.
#[derive(Debug, Clone)]
pub struct ParameterSet {
    pub manifest: ParamManifest,
    pub penetrance: PenetranceTable,
    pub relhaz: RelHazCoefficients,
    pub baseline: BaselineHazard,
    pub normalization: NormalizationTable,
    pub covariates: CovariateDistribution,
    pub stratum_rules: StratumRules,
}

const REQUIRED_FILES: [&str; 8] = [
    "penetrance.csv",
    "mortality.csv",
    "allele_frequencies.csv",
    "relhaz_coefficients.csv",
    "baseline_hazard.csv",
    "normalization.csv",
    "covariate_distribution.csv",
    "stratum_rules.json",
];

fn read(path: &Path) -> Result<Vec<u8>, ParamError> {
    std::fs::read(path).map_err(|source| ParamError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn csv_rows(file: &str, bytes: &[u8]) -> Result<(Vec<String>, Vec<Vec<String>>), ParamError> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| fmt_err(file, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| fmt_err(file, e.to_string()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((headers, rows))
}

fn num(file: &str, s: &str) -> Result<f64, ParamError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| fmt_err(file, format!("not a number: `{s}`")))
}

fn race(file: &str, s: &str) -> Result<Race, ParamError> {
    Race::parse(s.trim()).ok_or_else(|| fmt_err(file, format!("unknown race `{s}`")))
}

fn band(file: &str, s: &str) -> Result<AgeBand, ParamError> {
    match s.trim() {
        "lt50" => Ok(AgeBand::Under50),
        "ge50" => Ok(AgeBand::From50),
        other => Err(fmt_err(file, format!("unknown band `{other}`"))),
    }
}

/// Reads age-indexed columns; the first column must be `age` running 1..94.
fn age_columns(file: &str, bytes: &[u8]) -> Result<Vec<(String, Vec<f64>)>, ParamError> {
    let (headers, rows) = csv_rows(file, bytes)?;
    if headers.first().map(String::as_str) != Some("age") {
        return Err(fmt_err(file, "first column must be `age`"));
    }
    if rows.len() != MAX_AGE as usize {
        return Err(fmt_err(
            file,
            format!("expected {MAX_AGE} age rows, found {}", rows.len()),
        ));
    }
    let mut cols: Vec<(String, Vec<f64>)> = headers[1..]
        .iter()
        .map(|h| (h.clone(), Vec::with_capacity(rows.len())))
        .collect();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != headers.len() {
            return Err(fmt_err(
                file,
                format!("row {} has {} fields", i + 1, row.len()),
            ));
        }
        if num(file, &row[0])? != (i + 1) as f64 {
            return Err(fmt_err(
                file,
                format!("row {} has age {}, expected {}", i + 1, row[0], i + 1),
            ));
        }
        for (j, cell) in row[1..].iter().enumerate() {
            cols[j].1.push(num(file, cell)?);
        }
    }
    Ok(cols)
}

impl ParameterSet {
    /// Loads and checksum-verifies a parameter directory.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, ParamError> {
        let dir = dir.as_ref();
        let manifest_bytes = read(&dir.join("manifest.json"))?;
        let manifest: ParamManifest = serde_json::from_slice(&manifest_bytes)
            .map_err(|e| fmt_err("manifest.json", e.to_string()))?;
        let mut files: HashMap<&str, Vec<u8>> = HashMap::new();
        for name in REQUIRED_FILES {
            let expected = manifest
                .files
                .get(name)
                .ok_or_else(|| ParamError::Missing(format!("{name} not listed in manifest")))?;
            let bytes = read(&dir.join(name))?;
            let actual = sha256_hex(&bytes);
            if &actual != expected {
                return Err(ParamError::Checksum {
                    file: name.into(),
                    expected: expected.clone(),
                    actual,
                });
            }
            files.insert(name, bytes);
        }

        let mortality: HashMap<Race, Vec<f64>> =
            age_columns("mortality.csv", &files["mortality.csv"])?
                .into_iter()
                .map(|(h, v)| Ok((race("mortality.csv", &h)?, v)))
                .collect::<Result<_, ParamError>>()?;

        let mut penetrance = HashMap::new();
        for (h, v) in age_columns("penetrance.csv", &files["penetrance.csv"])? {
            let key = PenetranceKey::parse(&h)
                .ok_or_else(|| fmt_err("penetrance.csv", format!("bad column key `{h}`")))?;
            penetrance.insert(key, v);
        }

        let alleles = parse_alleles(&files["allele_frequencies.csv"])?;
        let penetrance = PenetranceTable::new(penetrance, mortality, alleles)?;
        let relhaz = parse_coefficients(&files["relhaz_coefficients.csv"])?;
        let baseline = parse_baseline(&files["baseline_hazard.csv"])?;
        let normalization = parse_normalization(&files["normalization.csv"])?;
        let covariates = parse_covariates(&files["covariate_distribution.csv"])?;
        let stratum_rules: StratumRules = serde_json::from_slice(&files["stratum_rules.json"])
            .map_err(|e| fmt_err("stratum_rules.json", e.to_string()))?;

        Ok(ParameterSet {
            manifest,
            penetrance,
            relhaz,
            baseline,
            normalization,
            covariates,
            stratum_rules,
        })
    }

    /// File checksums as recorded in the manifest.
    pub fn checksums(&self) -> &BTreeMap<String, String> {
        &self.manifest.files
    }
}

fn parse_alleles(bytes: &[u8]) -> Result<AlleleFrequencies, ParamError> {
    let file = "allele_frequencies.csv";
    let (_, rows) = csv_rows(file, bytes)?;
    let mut general = [f64::NAN; 2];
    let mut ashkenazi = [f64::NAN; 2];
    for row in rows {
        if row.len() != 3 {
            return Err(fmt_err(file, "expected locus,ethnicity,frequency"));
        }
        let locus = match row[0].trim() {
            "brca1" => 0,
            "brca2" => 1,
            other => return Err(fmt_err(file, format!("unknown locus `{other}`"))),
        };
        let slot = match row[1].trim() {
            "non_ashkenazi" => &mut general,
            "ashkenazi" => &mut ashkenazi,
            other => return Err(fmt_err(file, format!("unknown ethnicity `{other}`"))),
        };
        slot[locus] = num(file, &row[2])?;
    }
    if general.iter().chain(ashkenazi.iter()).any(|v| v.is_nan()) {
        return Err(ParamError::Missing(
            "allele frequency for every (locus, ethnicity)".into(),
        ));
    }
    Ok(AlleleFrequencies { general, ashkenazi })
}

fn parse_coefficients(bytes: &[u8]) -> Result<RelHazCoefficients, ParamError> {
    let file = "relhaz_coefficients.csv";
    let (_, rows) = csv_rows(file, bytes)?;
    let mut by_race: BTreeMap<Race, [f64; 19]> = BTreeMap::new();
    let mut seen: BTreeMap<Race, u32> = BTreeMap::new();
    for row in rows {
        let r = race(file, &row[0])?;
        let idx: usize = row[1]
            .trim()
            .parse()
            .map_err(|_| fmt_err(file, "bad index"))?;
        if !(1..=19).contains(&idx) {
            return Err(fmt_err(file, format!("index {idx} outside 1..19")));
        }
        by_race.entry(r).or_insert([0.0; 19])[idx - 1] = num(file, &row[2])?;
        *seen.entry(r).or_default() += 1;
    }
    if let Some((r, n)) = seen.iter().find(|(_, n)| **n != 19) {
        return Err(fmt_err(
            file,
            format!("race {r} has {n} coefficients, expected 19"),
        ));
    }
    RelHazCoefficients::new(by_race)
}

fn parse_baseline(bytes: &[u8]) -> Result<BaselineHazard, ParamError> {
    let file = "baseline_hazard.csv";
    let (_, rows) = csv_rows(file, bytes)?;
    let mut by_race: BTreeMap<Race, Vec<(usize, HazardInterval)>> = BTreeMap::new();
    for row in rows {
        if row.len() != 6 {
            return Err(fmt_err(
                file,
                "expected race,interval,age_start,age_end,breast_hazard,competing_hazard",
            ));
        }
        let r = race(file, &row[0])?;
        let k: usize = row[1]
            .trim()
            .parse()
            .map_err(|_| fmt_err(file, "bad interval index"))?;
        by_race.entry(r).or_default().push((
            k,
            HazardInterval {
                start: num(file, &row[2])?,
                end: num(file, &row[3])?,
                breast: num(file, &row[4])?,
                competing: num(file, &row[5])?,
            },
        ));
    }
    let by_race = by_race
        .into_iter()
        .map(|(r, mut v)| {
            v.sort_by_key(|(k, _)| *k);
            (r, v.into_iter().map(|(_, iv)| iv).collect())
        })
        .collect();
    BaselineHazard::new(by_race)
}

fn parse_normalization(bytes: &[u8]) -> Result<NormalizationTable, ParamError> {
    let file = "normalization.csv";
    let (_, rows) = csv_rows(file, bytes)?;
    let mut by_race: BTreeMap<Race, [f64; 2]> = BTreeMap::new();
    for row in rows {
        let r = race(file, &row[0])?;
        let b = band(file, &row[1])?;
        let entry = by_race.entry(r).or_insert([f64::NAN; 2]);
        entry[b as usize] = num(file, &row[2])?;
    }
    if by_race.values().any(|v| v.iter().any(|x| x.is_nan())) {
        return Err(fmt_err(file, "each race needs both lt50 and ge50 rows"));
    }
    NormalizationTable::new(by_race)
}

fn parse_covariates(bytes: &[u8]) -> Result<CovariateDistribution, ParamError> {
    let file = "covariate_distribution.csv";
    let (_, rows) = csv_rows(file, bytes)?;
    let mut tables: BTreeMap<(Race, AgeBand), CovariateTable> = BTreeMap::new();
    for row in rows {
        if row.len() != 5 {
            return Err(fmt_err(
                file,
                "expected race,band,factor,category,probability",
            ));
        }
        let key = (race(file, &row[0])?, band(file, &row[1])?);
        let p = num(file, &row[4])?;
        let t = tables.entry(key).or_default();
        let cat = row[3].trim();
        let bad = || {
            fmt_err(
                file,
                format!("unknown category `{cat}` for factor `{}`", row[2]),
            )
        };
        match row[2].trim() {
            "menarche" => t
                .menarche
                .push((MenarcheCategory::parse(cat).ok_or_else(bad)?, p)),
            "biopsies" => {
                let c = match cat {
                    "0" => Biopsies::Zero,
                    "1" => Biopsies::One,
                    "ge2" => Biopsies::TwoOrMore,
                    _ => return Err(bad()),
                };
                t.biopsies.push((c, p));
            }
            "hyperplasia" => {
                let c = match cat {
                    "0" => Hyperplasia::No,
                    "1" => Hyperplasia::Yes,
                    "unknown" => Hyperplasia::Unknown,
                    _ => return Err(bad()),
                };
                t.hyperplasia.push((c, p));
            }
            "first_birth_x_affected" => {
                let (x3, x4) = cat.split_once('|').ok_or_else(bad)?;
                let x3 = FirstBirthCategory::parse(x3).ok_or_else(bad)?;
                let x4 = match x4 {
                    "0" => 0,
                    "1" => 1,
                    "ge2" => 2,
                    _ => return Err(bad()),
                };
                t.joint.push((x3, x4, p));
            }
            other => return Err(fmt_err(file, format!("unknown factor `{other}`"))),
        }
    }
    for ((r, b), t) in &tables {
        t.check_normalized()
            .map_err(|e| fmt_err(file, format!("{r} {b:?}: {e}")))?;
    }
    Ok(CovariateDistribution::new(tables))
}
