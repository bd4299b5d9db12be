//! Carrier posterior by peeling over the fixed three-generation skeleton.
//!
//! The skeleton has four grandparents, two parents, the proband and one
//! unobserved spouse. Sibships hang off the couple that produced them:
//! aunts and uncles off the grandparents, siblings off the parents, and
//! children off the proband and spouse. Skeleton members missing from the
//! pedigree are unobserved (likelihood one). Carrier status is stationary
//! under the transmission model, so an unobserved ancestor is equivalent to
//! a pruned one.

use super::{Genotype, GenotypePosterior, MendelianError};
use crate::params::{Cancer, PenetranceKey, PenetranceTable};
use crate::pedigree::{GeneticTest, Pedigree, Relation, Relative, Sex};

/// Per-genotype phenotype likelihood (4-vector).
pub type Likelihood = [f64; 4];

const FLAT: Likelihood = [1.0; 4];

/// Founder genotype probabilities and the transmission kernel.
#[derive(Debug, Clone, Copy)]
pub struct Transmission {
    prior: [f64; 4],
    /// `kernel[m][f][c]` = P(child = c | mother = m, father = f).
    kernel: [[[f64; 4]; 4]; 4],
}

impl Transmission {
    /// Two independent loci with allele frequencies `q`. A carrier parent
    /// transmits a variant allele with probability q / (1 − (1 − q)²), which
    /// keeps carrier prevalence constant across generations.
    pub fn new(q: [f64; 2]) -> Self {
        let pi = q.map(|q| 1.0 - (1.0 - q) * (1.0 - q));
        let theta = [q[0] / pi[0], q[1] / pi[1]];
        let mut prior = [0.0; 4];
        for g in Genotype::ALL {
            let [c1, c2] = g.carrier_bits();
            prior[g.index()] = bern(pi[0], c1) * bern(pi[1], c2);
        }
        let mut kernel = [[[0.0; 4]; 4]; 4];
        for m in Genotype::ALL {
            for f in Genotype::ALL {
                let (bm, bf) = (m.carrier_bits(), f.carrier_bits());
                let p: [f64; 2] = std::array::from_fn(|l| {
                    let tm = if bm[l] { theta[l] } else { 0.0 };
                    let tf = if bf[l] { theta[l] } else { 0.0 };
                    1.0 - (1.0 - tm) * (1.0 - tf)
                });
                for c in Genotype::ALL {
                    let [c1, c2] = c.carrier_bits();
                    kernel[m.index()][f.index()][c.index()] = bern(p[0], c1) * bern(p[1], c2);
                }
            }
        }
        Transmission { prior, kernel }
    }

    pub fn prior(&self) -> [f64; 4] {
        self.prior
    }

    pub fn child_given_parents(&self, mother: usize, father: usize) -> &[f64; 4] {
        &self.kernel[mother][father]
    }
}

fn bern(p: f64, on: bool) -> f64 {
    if on {
        p
    } else {
        1.0 - p
    }
}

/// Likelihood of one cancer phenotype: point penetrance at onset, otherwise
/// survival to the censoring age (current age, or surgery if earlier).
fn cancer_term(
    table: &PenetranceTable,
    key: PenetranceKey,
    onset: Option<u32>,
    censor: u32,
) -> Result<f64, MendelianError> {
    Ok(match onset {
        Some(t) => table.penetrance(key)?[(t - 1) as usize],
        None if censor == 0 => 1.0,
        None => 1.0 - table.cumulative(key)?[(censor - 1) as usize],
    })
}

/// Phenotype and genetic-test likelihood of one member for each genotype.
pub fn member_likelihood(
    table: &PenetranceTable,
    m: &Relative,
) -> Result<Likelihood, MendelianError> {
    let mut out = [0.0; 4];
    for g in Genotype::ALL {
        if let Some(test) = m.genetic_test {
            if tested_genotype(test) != g {
                continue;
            }
        }
        let breast_censor = m
            .prophylactic_mastectomy_age
            .map_or(m.age(), |s| s.min(m.age()));
        let mut l = cancer_term(
            table,
            PenetranceKey::new(Cancer::Breast, m.sex, g, m.race),
            m.breast_cancer,
            breast_censor,
        )?;
        if m.sex == Sex::Female {
            let ovarian_censor = m
                .prophylactic_oophorectomy_age
                .map_or(m.age(), |s| s.min(m.age()));
            l *= cancer_term(
                table,
                PenetranceKey::new(Cancer::Ovarian, Sex::Female, g, m.race),
                m.ovarian_cancer,
                ovarian_censor,
            )?;
        }
        out[g.index()] = l;
    }
    Ok(out)
}

pub fn tested_genotype(test: GeneticTest) -> Genotype {
    match test {
        GeneticTest::Negative => Genotype::NonCarrier,
        GeneticTest::Brca1Positive => Genotype::Brca1,
        GeneticTest::Brca2Positive => Genotype::Brca2,
        GeneticTest::BothPositive => Genotype::Both,
    }
}

fn normalize(v: &mut [f64; 4]) -> Result<(), MendelianError> {
    let s: f64 = v.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(MendelianError::InconsistentEvidence);
    }
    v.iter_mut().for_each(|x| *x /= s);
    Ok(())
}

/// Π over a sibship of Σ_x T(x | m, f) L(x).
fn sibship(t: &Transmission, m: usize, f: usize, sibs: &[Likelihood]) -> f64 {
    let k = t.child_given_parents(m, f);
    sibs.iter()
        .map(|l| (0..4).map(|x| k[x] * l[x]).sum::<f64>())
        .product()
}

/// Message from a couple to their child in the skeleton:
/// U(c) = Σ_{a,b} π(a) L_a(a) π(b) L_b(b) T(c | a, b) Π_sibs Σ_x T(x | a, b) L_x(x).
fn upward(
    t: &Transmission,
    la: &Likelihood,
    lb: &Likelihood,
    sibs: &[Likelihood],
) -> Result<[f64; 4], MendelianError> {
    let prior = t.prior();
    let mut u = [0.0; 4];
    for a in 0..4 {
        let wa = prior[a] * la[a];
        if wa == 0.0 {
            continue;
        }
        for b in 0..4 {
            let w = wa * prior[b] * lb[b];
            if w == 0.0 {
                continue;
            }
            let w = w * sibship(t, a, b, sibs);
            let k = t.child_given_parents(a, b);
            for c in 0..4 {
                u[c] += w * k[c];
            }
        }
    }
    normalize(&mut u)?;
    Ok(u)
}

#[derive(Default)]
struct Skeleton {
    mgm: Option<Likelihood>,
    mgf: Option<Likelihood>,
    pgm: Option<Likelihood>,
    pgf: Option<Likelihood>,
    mother: Option<Likelihood>,
    father: Option<Likelihood>,
    maternal_sibs: Vec<Likelihood>,
    paternal_sibs: Vec<Likelihood>,
    sibs: Vec<Likelihood>,
    children: Vec<Likelihood>,
}

/// P(Γ₀ | family data): founder prior times the peeled likelihood, normalized.
/// Prevalences follow the proband's Ashkenazi flag for the whole family.
pub fn carrier_posterior(
    p: &Pedigree,
    table: &PenetranceTable,
) -> Result<GenotypePosterior, MendelianError> {
    let q = table
        .alleles()
        .for_ethnicity(p.proband().ethnicity_flags.ashkenazi);
    let t = Transmission::new(q);
    let lp = member_likelihood(table, p.proband())?;

    let mut sk = Skeleton::default();
    for m in p.relatives() {
        let l = member_likelihood(table, m)?;
        match m.relation {
            Relation::Proband => unreachable!("validated pedigree has a single proband"),
            Relation::Mother => sk.mother = Some(l),
            Relation::Father => sk.father = Some(l),
            Relation::MaternalGrandmother => sk.mgm = Some(l),
            Relation::MaternalGrandfather => sk.mgf = Some(l),
            Relation::PaternalGrandmother => sk.pgm = Some(l),
            Relation::PaternalGrandfather => sk.pgf = Some(l),
            Relation::MaternalAunt | Relation::MaternalUncle => sk.maternal_sibs.push(l),
            Relation::PaternalAunt | Relation::PaternalUncle => sk.paternal_sibs.push(l),
            Relation::Sister | Relation::Brother => sk.sibs.push(l),
            Relation::Daughter | Relation::Son => sk.children.push(l),
        }
    }

    let u_m = upward(
        &t,
        &sk.mgm.unwrap_or(FLAT),
        &sk.mgf.unwrap_or(FLAT),
        &sk.maternal_sibs,
    )?;
    let u_f = upward(
        &t,
        &sk.pgm.unwrap_or(FLAT),
        &sk.pgf.unwrap_or(FLAT),
        &sk.paternal_sibs,
    )?;
    let l_m = sk.mother.unwrap_or(FLAT);
    let l_f = sk.father.unwrap_or(FLAT);

    // Ancestral message into the proband.
    let mut anc = [0.0; 4];
    for m in 0..4 {
        let wm = u_m[m] * l_m[m];
        if wm == 0.0 {
            continue;
        }
        for f in 0..4 {
            let w = wm * u_f[f] * l_f[f];
            if w == 0.0 {
                continue;
            }
            let w = w * sibship(&t, m, f, &sk.sibs);
            let k = t.child_given_parents(m, f);
            for g in 0..4 {
                anc[g] += w * k[g];
            }
        }
    }
    normalize(&mut anc)?;

    // Descendant message: children of the proband and an unobserved spouse.
    // The kernel is indexed (mother, father); transmission is symmetric so
    // the proband's sex does not matter.
    let prior = t.prior();
    let mut desc = [0.0; 4];
    for (g, d) in desc.iter_mut().enumerate() {
        *d = (0..4)
            .map(|s| prior[s] * sibship(&t, g, s, &sk.children))
            .sum();
    }

    let mut post: [f64; 4] = std::array::from_fn(|g| anc[g] * lp[g] * desc[g]);
    normalize(&mut post)?;
    Ok(GenotypePosterior { probs: post })
}
