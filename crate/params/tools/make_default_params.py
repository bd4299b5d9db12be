#!/usr/bin/env python3
"""Generate the synthetic default parameter set shipped in params/default.

The values are shaped like published breast-cancer model inputs (monotone
hazards, carrier penetrance far above non-carrier penetrance) but are NOT
clinical estimates. Re-run this script to regenerate the CSVs and manifest.

    python3 params/tools/make_default_params.py params/default
"""

import csv
import hashlib
import json
import math
import sys
from pathlib import Path

AGES = range(1, 95)
RACES = ["white", "black", "hispanic", "asian", "native_american", "unknown"]
# Race multipliers on the non-carrier breast hazard.
RACE_BREAST = {"white": 1.0, "black": 0.9, "hispanic": 0.72, "asian": 0.7,
               "native_american": 0.6, "unknown": 1.0}
RACE_MORT = {"white": 1.0, "black": 1.25, "hispanic": 0.9, "asian": 0.75,
             "native_american": 1.2, "unknown": 1.0}

# (1 - AR) by race and age band; "unknown" mirrors white.
ONE_MINUS_AR = {
    "white": (1.81, 1.96),
    "black": (1.41, 1.44),
    "hispanic": (1.37, 1.41),
    "asian": (2.10, 2.43),
    "native_american": (1.55, 1.94),
}
ONE_MINUS_AR["unknown"] = ONE_MINUS_AR["white"]


def logistic(t, mid, scale):
    return 1.0 / (1.0 + math.exp(-(t - mid) / scale))


def mortality(t, race):
    base = 0.00018 * math.exp(0.088 * (t - 20.0))
    return min(0.2, max(0.0004, base) * RACE_MORT[race])


def breast_hazard(genotype, t, sex, race):
    if t < 15:
        return 0.0
    if sex == "female":
        h0 = 0.0034 * logistic(t, 47.0, 6.0) * RACE_BREAST[race]
        h1 = 0.036 * logistic(t, 40.0, 5.0)
        h2 = 0.026 * logistic(t, 46.0, 6.0)
    else:
        h0 = 0.00002 * logistic(t, 65.0, 8.0)
        h1 = 0.0002 * logistic(t, 60.0, 8.0)
        h2 = 0.0012 * logistic(t, 60.0, 8.0)
    if genotype == 0:
        return h0
    if genotype == 1:
        return h1
    if genotype == 2:
        return h2
    return 1.0 - (1.0 - h1) * (1.0 - h2)


def ovarian_hazard(genotype, t, race):
    if t < 15:
        return 0.0
    h0 = 0.0004 * logistic(t, 55.0, 7.0) * RACE_BREAST[race]
    h1 = 0.013 * logistic(t, 50.0, 5.0)
    h2 = 0.005 * logistic(t, 58.0, 6.0)
    return [h0, h1, h2, 1.0 - (1.0 - h1) * (1.0 - h2)][genotype]


def penetrance_from_hazard(hazards, mort):
    surv = 1.0
    out = []
    for h, d in zip(hazards, mort):
        out.append(h * surv)
        surv *= 1.0 - h - d
    return out


def fmt(x):
    return repr(float(x))


# Log relative hazards beta_1..beta_19 (index 1-based), white reference.
BETA_WHITE = [
    0.10, 0.22,              # menarche [12,13], <12
    0.45, 0.80, -0.10, -0.20,  # biopsies 1, >=2, age>=50 x (=1), age>=50 x (>=1)
    -0.55, -0.80, -1.05,     # first birth [20,24], [25,29], >29
    0.90, 1.40,              # affected first-degree 1, >=2
    0.05, 0.10, 0.15,        # first birth x one affected
    0.10, 0.20, 0.25,        # first birth x two or more affected
    -0.10, 0.65,             # biopsy>0 x hyperplasia 0 / 1
]
RACE_BETA_SCALE = {"white": 1.0, "black": 0.85, "hispanic": 0.8, "asian": 1.15,
                   "native_american": 1.0, "unknown": 1.0}

MENARCHE = {"ge14": 0.30, "12_13": 0.48, "lt12": 0.22}
BIOPSIES = {"0": 0.82, "1": 0.13, "ge2": 0.05}
HYPERPLASIA = {"unknown": 0.90, "0": 0.09, "1": 0.01}
X3 = ["lt20", "20_24", "25_29", "ge30"]
X4 = ["0", "1", "ge2"]
JOINT_HIGH = {
    ("lt20", "0"): 0.12, ("lt20", "1"): 0.015, ("lt20", "ge2"): 0.003,
    ("20_24", "0"): 0.22, ("20_24", "1"): 0.028, ("20_24", "ge2"): 0.005,
    ("25_29", "0"): 0.33, ("25_29", "1"): 0.04, ("25_29", "ge2"): 0.007,
    ("ge30", "0"): 0.20, ("ge30", "1"): 0.026, ("ge30", "ge2"): 0.006,
}
JOINT_LOW = {("ge30", "0"): 1.0}


def joint_term(beta, x3, x4):
    b = lambda i: beta[i - 1]
    s = 0.0
    s += {"lt20": 0.0, "20_24": b(7), "25_29": b(8), "ge30": b(9)}[x3]
    s += {"0": 0.0, "1": b(10), "ge2": b(11)}[x4]
    if x4 == "1":
        s += {"lt20": 0.0, "20_24": b(12), "25_29": b(13), "ge30": b(14)}[x3]
    if x4 == "ge2":
        s += {"lt20": 0.0, "20_24": b(15), "25_29": b(16), "ge30": b(17)}[x3]
    return math.exp(s)


def e_menarche(beta):
    return (MENARCHE["ge14"] + MENARCHE["12_13"] * math.exp(beta[0])
            + MENARCHE["lt12"] * math.exp(beta[1]))


def e_biopsy(beta, older):
    b = lambda i: beta[i - 1]
    total = 0.0
    for x2, p2 in BIOPSIES.items():
        for x5, p5 in HYPERPLASIA.items():
            s = 0.0
            if x2 == "1":
                s += b(3) + (b(5) + b(6) if older else 0.0)
            if x2 == "ge2":
                s += b(4) + (b(6) if older else 0.0)
            if x2 != "0":
                if x5 == "0":
                    s += b(18)
                if x5 == "1":
                    s += b(19)
            total += p2 * p5 * math.exp(s)
    return total


def e_joint(beta, joint):
    return sum(p * joint_term(beta, x3, x4) for (x3, x4), p in joint.items())


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)

    mort = {r: [mortality(t, r) for t in AGES] for r in RACES}
    with open(out / "mortality.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["age"] + RACES)
        for i, t in enumerate(AGES):
            w.writerow([t] + [fmt(mort[r][i]) for r in RACES])

    columns = []
    data = []
    for cancer in ["breast", "ovarian"]:
        for sex in ["female", "male"]:
            if cancer == "ovarian" and sex == "male":
                continue
            for g in range(4):
                for r in RACES:
                    if cancer == "breast":
                        hz = [breast_hazard(g, t, sex, r) for t in AGES]
                    else:
                        hz = [ovarian_hazard(g, t, r) for t in AGES]
                    columns.append(f"{cancer}.{sex}.{g}.{r}")
                    data.append(penetrance_from_hazard(hz, mort[r]))
    with open(out / "penetrance.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["age"] + columns)
        for i, t in enumerate(AGES):
            w.writerow([t] + [fmt(col[i]) for col in data])

    with open(out / "allele_frequencies.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["locus", "ethnicity", "frequency"])
        w.writerow(["brca1", "non_ashkenazi", "0.0006"])
        w.writerow(["brca2", "non_ashkenazi", "0.0007"])
        w.writerow(["brca1", "ashkenazi", "0.012"])
        w.writerow(["brca2", "ashkenazi", "0.011"])

    with open(out / "relhaz_coefficients.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["race", "index", "value"])
        for r in RACES:
            for i, b in enumerate(BETA_WHITE, start=1):
                w.writerow([r, i, fmt(b * RACE_BETA_SCALE[r])])

    with open(out / "baseline_hazard.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["race", "interval", "age_start", "age_end",
                    "breast_hazard", "competing_hazard"])
        for r in RACES:
            # Twelve 5-year intervals from 20 plus a final [80, 90).
            for k in range(13):
                lo, hi = 20 + 5 * k, (25 + 5 * k if k < 12 else 90)
                ages = range(lo, hi)
                hb = sum(1.02 * breast_hazard(0, t, "female", r) for t in ages) / len(ages)
                hd = sum(mort[r][t - 1] for t in ages) / len(ages)
                w.writerow([r, k + 1, lo, hi, fmt(hb), fmt(hd)])

    with open(out / "normalization.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["race", "band", "one_minus_ar"])
        for r in RACES:
            lo, hi = ONE_MINUS_AR[r]
            w.writerow([r, "lt50", fmt(lo)])
            w.writerow([r, "ge50", fmt(hi)])

    # Covariate distribution: independent menarche, biopsy and hyperplasia
    # factors plus a joint (first birth, affected relatives) block. The joint
    # block is a mixture whose weight is solved so that 1 - AR reproduces the
    # normalization table exactly.
    with open(out / "covariate_distribution.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["race", "band", "factor", "category", "probability"])
        for r in RACES:
            beta = [b * RACE_BETA_SCALE[r] for b in BETA_WHITE]
            for band, target_one_minus_ar in zip(["lt50", "ge50"], ONE_MINUS_AR[r]):
                older = band == "ge50"
                rest = e_menarche(beta) * e_biopsy(beta, older)
                target = 1.0 / target_one_minus_ar / rest
                hi_e = e_joint(beta, JOINT_HIGH)
                lo_e = e_joint(beta, JOINT_LOW)
                mix = (target - lo_e) / (hi_e - lo_e)
                if not 0.0 <= mix <= 1.0:
                    raise SystemExit(f"cannot hit target for {r}/{band}: mix={mix}")
                for c, p in MENARCHE.items():
                    w.writerow([r, band, "menarche", c, fmt(p)])
                for c, p in BIOPSIES.items():
                    w.writerow([r, band, "biopsies", c, fmt(p)])
                for c, p in HYPERPLASIA.items():
                    w.writerow([r, band, "hyperplasia", c, fmt(p)])
                for x3 in X3:
                    for x4 in X4:
                        p = mix * JOINT_HIGH.get((x3, x4), 0.0) + (1.0 - mix) * JOINT_LOW.get((x3, x4), 0.0)
                        w.writerow([r, band, "first_birth_x_affected", f"{x3}|{x4}", fmt(p)])

    rules = {
        "schema_version": 1,
        "any_ovarian": True,
        "breast_onset_max_age": 50,
        "min_breast_cancers": 2,
        "max_degree": 2,
    }
    (out / "stratum_rules.json").write_text(json.dumps(rules, indent=2) + "\n")

    files = sorted(p.name for p in out.iterdir() if p.name != "manifest.json")
    manifest = {
        "schema_version": 1,
        "name": "synthetic-default",
        "version": "1.0.0",
        "clinical": False,
        "description": "Synthetic, non-clinical parameter set shaped like published "
                       "breast-cancer model inputs. Not for patient use.",
        "files": {name: hashlib.sha256((out / name).read_bytes()).hexdigest() for name in files},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "params/default")
