//! Brute-force carrier posterior: enumerates every genotype configuration
//! of the full three-generation skeleton plus the remaining relatives.

use riskfuse_core::params::{Cancer, PenetranceKey, PenetranceTable};
use riskfuse_core::pedigree::{GeneticTest, Pedigree, Relation, Relative, Sex};
use riskfuse_core::Genotype;

const MGM: usize = 0;
const MGF: usize = 1;
const PGM: usize = 2;
const PGF: usize = 3;
const MOTHER: usize = 4;
const FATHER: usize = 5;
const PROBAND: usize = 6;
const SPOUSE: usize = 7;

fn bits(g: usize) -> [bool; 2] {
    [g & 1 == 1, g & 2 == 2]
}

fn survival_term(
    table: &PenetranceTable,
    key: PenetranceKey,
    onset: Option<u32>,
    censor: u32,
) -> f64 {
    let pen = table.penetrance(key).unwrap();
    match onset {
        Some(t) => pen[t as usize - 1],
        None => 1.0 - pen[..censor as usize].iter().sum::<f64>(),
    }
}

fn likelihood(table: &PenetranceTable, m: &Relative) -> [f64; 4] {
    std::array::from_fn(|g| {
        if let Some(t) = m.genetic_test {
            let tested = match t {
                GeneticTest::Negative => 0,
                GeneticTest::Brca1Positive => 1,
                GeneticTest::Brca2Positive => 2,
                GeneticTest::BothPositive => 3,
            };
            if tested != g {
                return 0.0;
            }
        }
        let genotype = Genotype::ALL[g];
        let bc = m
            .prophylactic_mastectomy_age
            .map_or(m.age(), |s| s.min(m.age()));
        let mut l = survival_term(
            table,
            PenetranceKey::new(Cancer::Breast, m.sex, genotype, m.race),
            m.breast_cancer,
            bc,
        );
        if m.sex == Sex::Female {
            let oc = m
                .prophylactic_oophorectomy_age
                .map_or(m.age(), |s| s.min(m.age()));
            l *= survival_term(
                table,
                PenetranceKey::new(Cancer::Ovarian, Sex::Female, genotype, m.race),
                m.ovarian_cancer,
                oc,
            );
        }
        l
    })
}

struct Node {
    parents: Option<(usize, usize)>,
    lik: [f64; 4],
}

/// Brute-force P(proband genotype | data), or `None` when the evidence has
/// probability zero.
pub fn enumerate(p: &Pedigree, table: &PenetranceTable) -> Option<[f64; 4]> {
    let q = table
        .alleles()
        .for_ethnicity(p.proband().ethnicity_flags.ashkenazi);
    let pi = q.map(|q| 1.0 - (1.0 - q) * (1.0 - q));
    let theta = [q[0] / pi[0], q[1] / pi[1]];
    let prior: [f64; 4] = std::array::from_fn(|g| {
        let b = bits(g);
        (0..2)
            .map(|l| if b[l] { pi[l] } else { 1.0 - pi[l] })
            .product()
    });
    let transmit = |m: usize, f: usize, c: usize| -> f64 {
        let (bm, bf, bc) = (bits(m), bits(f), bits(c));
        (0..2)
            .map(|l| {
                let pc = 1.0
                    - (1.0 - if bm[l] { theta[l] } else { 0.0 })
                        * (1.0 - if bf[l] { theta[l] } else { 0.0 });
                if bc[l] {
                    pc
                } else {
                    1.0 - pc
                }
            })
            .product()
    };
    let kernel: Vec<f64> = (0..64)
        .map(|k| transmit(k >> 4, (k >> 2) & 3, k & 3))
        .collect();

    let skeleton_parents = [
        None,
        None,
        None,
        None,
        Some((MGM, MGF)),
        Some((PGM, PGF)),
        Some((MOTHER, FATHER)),
        None,
    ];
    let mut nodes: Vec<Node> = skeleton_parents
        .iter()
        .map(|&parents| Node {
            parents,
            lik: [1.0; 4],
        })
        .collect();
    for m in p.members() {
        let l = likelihood(table, m);
        let slot = match m.relation {
            Relation::Proband => Some(PROBAND),
            Relation::Mother => Some(MOTHER),
            Relation::Father => Some(FATHER),
            Relation::MaternalGrandmother => Some(MGM),
            Relation::MaternalGrandfather => Some(MGF),
            Relation::PaternalGrandmother => Some(PGM),
            Relation::PaternalGrandfather => Some(PGF),
            _ => None,
        };
        match slot {
            Some(i) => nodes[i].lik = l,
            None => {
                let parents = match m.relation {
                    Relation::MaternalAunt | Relation::MaternalUncle => (MGM, MGF),
                    Relation::PaternalAunt | Relation::PaternalUncle => (PGM, PGF),
                    Relation::Sister | Relation::Brother => (MOTHER, FATHER),
                    _ => (PROBAND, SPOUSE),
                };
                nodes.push(Node {
                    parents: Some(parents),
                    lik: l,
                });
            }
        }
    }

    let n = nodes.len();
    let mut post = [0.0; 4];
    let mut g = vec![0usize; n];
    for code in 0..(1usize << (2 * n)) {
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = (code >> (2 * i)) & 3;
        }
        let mut w = 1.0;
        for (i, node) in nodes.iter().enumerate() {
            w *= node.lik[g[i]];
            w *= match node.parents {
                None => prior[g[i]],
                Some((m, f)) => kernel[(g[m] << 4) | (g[f] << 2) | g[i]],
            };
            if w == 0.0 {
                break;
            }
        }
        post[g[PROBAND]] += w;
    }
    let total: f64 = post.iter().sum();
    (total > 0.0).then(|| post.map(|x| x / total))
}

pub fn non_skeleton(p: &Pedigree) -> usize {
    p.relatives()
        .filter(|m| {
            matches!(
                m.relation,
                Relation::Sister
                    | Relation::Brother
                    | Relation::Daughter
                    | Relation::Son
                    | Relation::MaternalAunt
                    | Relation::MaternalUncle
                    | Relation::PaternalAunt
                    | Relation::PaternalUncle
            )
        })
        .count()
}
