#!/usr/bin/env python3
"""Generate the five benchmark CSVs under data/, deterministically.

Each dataset is sampled class-conditionally from a two-profile mixture:
a boundary-hugging majority and a smaller "prototype" mass of deep,
strongly marked rows (stacked risk markers, extreme lab values). The
mixture weights and marker strengths set the class overlap and the
margin distribution of the trained models. Post-processing swaps values
between same-class rows so that every numerical feature attains its
global minimum and maximum inside the seed-42 train split (encoding
statistics are train-fitted; this keeps the encoded range exactly [0, 1]
and makes decode round-trips exact on the extremes). Rerunning the
script reproduces byte-identical files.
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
from tabattack.data import stratified_split  # noqa: E402

SEED = 7
SPLIT_SEED = 42
OUT = Path(__file__).resolve().parent.parent / "data"


def shuffled_labels(rng, n_pos: int, n_neg: int) -> np.ndarray:
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64),
                             np.zeros(n_neg, dtype=np.int64)])
    rng.shuffle(labels)
    return labels


def pick(rng, n, levels, probs):
    probs = np.asarray(probs, dtype=np.float64)
    return rng.choice(levels, size=n, p=probs / probs.sum())


def by_class(rng, labels, sampler0, sampler1):
    n = len(labels)
    out = np.empty(n, dtype=np.float64)
    mask1 = labels == 1
    out[~mask1] = sampler0(rng, int((~mask1).sum()))
    out[mask1] = sampler1(rng, int(mask1.sum()))
    return out


def cat_by_class(rng, labels, levels, probs0, probs1):
    n = len(labels)
    out = np.empty(n, dtype=object)
    mask1 = labels == 1
    out[~mask1] = pick(rng, int((~mask1).sum()), levels, probs0)
    out[mask1] = pick(rng, int(mask1.sum()), levels, probs1)
    return out


def deep_mask(rng, labels, p_deep0: float, p_deep1: float) -> np.ndarray:
    p = np.where(labels == 1, p_deep1, p_deep0)
    return rng.random(len(labels)) < p


def by_profile(rng, labels, deep, hug0, hug1, deep0, deep1):
    """Numeric sampler switched on (class, profile)."""
    n = len(labels)
    out = np.empty(n, dtype=np.float64)
    for mask, sampler in (((labels == 0) & ~deep, hug0),
                          ((labels == 1) & ~deep, hug1),
                          ((labels == 0) & deep, deep0),
                          ((labels == 1) & deep, deep1)):
        k = int(mask.sum())
        if k:
            out[mask] = sampler(rng, k)
    return out


def cat_by_profile(rng, labels, deep, levels, hug0, hug1, deep0, deep1):
    n = len(labels)
    out = np.empty(n, dtype=object)
    for mask, probs in (((labels == 0) & ~deep, hug0),
                        ((labels == 1) & ~deep, hug1),
                        ((labels == 0) & deep, deep0),
                        ((labels == 1) & deep, deep1)):
        k = int(mask.sum())
        if k:
            out[mask] = pick(rng, k, levels, probs)
    return out


def move_extremes_into_train(df: pd.DataFrame, numeric_cols: list, labels: np.ndarray):
    """Swap same-class values so each numeric column's min and max land in
    the seed-42 train split."""
    train_idx, _ = stratified_split(labels, 0.8, SPLIT_SEED)
    in_train = np.zeros(len(df), dtype=bool)
    in_train[train_idx] = True
    for col in numeric_cols:
        v = df[col].to_numpy().copy()
        for extreme in (v.min(), v.max()):
            rows = np.flatnonzero(v == extreme)
            if in_train[rows].any():
                continue
            r = int(rows[0])
            cls = labels[r]
            candidates = np.flatnonzero(in_train & (labels == cls))
            med = np.median(v[candidates])
            partner = int(candidates[np.argmin(np.abs(v[candidates] - med))])
            v[r], v[partner] = v[partner], v[r]
        df[col] = v


def finalize(name: str, df: pd.DataFrame, labels: np.ndarray, numeric_cols: list,
             int_cols: list):
    move_extremes_into_train(df, numeric_cols, labels)
    for col in int_cols:
        df[col] = df[col].astype(np.int64)
    OUT.mkdir(exist_ok=True)
    path = OUT / f"{name}.csv"
    df.to_csv(path, index=False)
    print(f"{name}: {len(df)} rows -> {path}")


# ---------------------------------------------------------------------------

def make_diabetes(rng):
    labels = shuffled_labels(rng, 268, 500)
    n = len(labels)
    deep = deep_mask(rng, labels, 0.26, 0.26)
    # glucose carries most of the class signal; the deep tails are clear-cut
    # clinical extremes, the hugging bulk overlaps across the boundary
    preg = by_class(rng, labels,
                    lambda r, k: r.poisson(3.4, k),
                    lambda r, k: r.poisson(3.9, k)).clip(0, 17)
    glucose = by_profile(
        rng, labels, deep,
        lambda r, k: r.normal(114.0, 21.0, k),
        lambda r, k: r.normal(136.0, 21.0, k),
        lambda r, k: r.normal(53.0, 4.5, k),
        lambda r, k: r.normal(191.0, 3.5, k)).clip(44, 198).round()
    glucose[np.argmax(glucose)] = 199.0
    bp = by_class(rng, labels,
                  lambda r, k: r.normal(69.0, 12.0, k),
                  lambda r, k: r.normal(71.0, 12.3, k)).clip(24, 122).round()
    skin = by_class(rng, labels,
                    lambda r, k: r.normal(27.8, 8.5, k),
                    lambda r, k: r.normal(29.0, 8.8, k)).clip(7, 63).round()
    skin[rng.random(n) < 0.29] = 0.0
    insulin = by_class(rng, labels,
                       lambda r, k: r.lognormal(4.75, 0.62, k),
                       lambda r, k: r.lognormal(4.88, 0.66, k)).clip(15, 744).round()
    insulin[rng.random(n) < 0.48] = 0.0
    bmi = by_class(rng, labels,
                   lambda r, k: r.normal(31.6, 6.8, k),
                   lambda r, k: r.normal(32.9, 6.6, k)).clip(18.2, 67.1).round(1)
    dpf = by_class(rng, labels,
                   lambda r, k: r.lognormal(-1.10, 0.58, k),
                   lambda r, k: r.lognormal(-1.02, 0.60, k)).clip(0.078, 2.42).round(3)
    age = by_class(rng, labels,
                   lambda r, k: 21 + r.exponential(10.5, k),
                   lambda r, k: 22 + r.exponential(11.2, k)).clip(21, 81).round()
    df = pd.DataFrame({
        "Pregnancies": preg, "Glucose": glucose, "BloodPressure": bp,
        "SkinThickness": skin, "Insulin": insulin, "BMI": bmi,
        "DiabetesPedigreeFunction": dpf, "Age": age,
        "Outcome": labels.astype(str),
    })
    finalize("diabetes", df, labels,
             ["Pregnancies", "Glucose", "BloodPressure", "SkinThickness",
              "Insulin", "BMI", "DiabetesPedigreeFunction", "Age"],
             ["Pregnancies", "Glucose", "BloodPressure", "SkinThickness",
              "Insulin", "Age"])


BC_BASE = [
    # name, benign mean, coefficient on the malignancy latent, noise sd
    ("radius", 12.1, 2.6, 1.1),
    ("texture", 17.9, 1.9, 3.0),
    ("perimeter", 78.1, 17.5, 7.4),
    ("area", 462.8, 220.0, 95.0),
    ("smoothness", 0.0925, 0.0055, 0.0110),
    ("compactness", 0.080, 0.037, 0.024),
    ("concavity", 0.046, 0.055, 0.027),
    ("concave_points", 0.0257, 0.0285, 0.0092),
    ("symmetry", 0.174, 0.0075, 0.0210),
    ("fractal_dimension", 0.0629, 0.0004, 0.0056),
]


def make_breast_cancer(rng):
    labels = shuffled_labels(rng, 212, 357)
    n = len(labels)
    latent = np.where(labels == 1, rng.normal(3.25, 0.62, n),
                      rng.normal(1.15, 0.42, n))
    cols = {}
    for name, mu, beta, sd in BC_BASE:
        base = mu + beta * latent + rng.normal(0.0, sd, n)
        base = np.maximum(base, mu * 0.35)
        se = base * np.abs(rng.normal(0.055, 0.022, n))
        worst = base * (1.12 + 0.16 * np.abs(rng.normal(0.0, 1.0, n))
                        + 0.045 * np.maximum(latent, 0.0))
        decimals = 1 if name == "area" else 4
        cols[f"{name}_mean"] = base.round(decimals)
        cols[f"{name}_se"] = se.round(decimals if name == "area" else 5)
        cols[f"{name}_worst"] = worst.round(decimals)
    order = [f"{name}_{kind}" for kind in ("mean", "se", "worst")
             for name, *_ in BC_BASE]
    df = pd.DataFrame({c: cols[c] for c in order})
    df["diagnosis"] = np.where(labels == 1, "M", "B")
    finalize("breast_cancer", df, labels, order, [])


def adult_cat(rng, masks, levels, probs_by_profile):
    n = len(masks[0])
    out = np.empty(n, dtype=object)
    for mask, probs in zip(masks, probs_by_profile):
        k = int(mask.sum())
        if k:
            out[mask] = pick(rng, k, levels, probs)
    return out


def make_adult(rng):
    labels = shuffled_labels(rng, 7841, 24720)
    n = len(labels)
    deep = deep_mask(rng, labels, 0.25, 0.12)
    elder = deep & (labels == 0) & (rng.random(n) < 0.60)
    young = deep & (labels == 0) & ~elder
    hug0 = (labels == 0) & ~deep
    hug1 = (labels == 1) & ~deep
    deep1 = deep & (labels == 1)
    masks = (hug0, hug1, young, elder, deep1)

    age = np.empty(n)
    age[hug0] = 17 + rng.gamma(3.0, 6.0, hug0.sum())
    age[hug1] = 24 + rng.gamma(6.0, 3.5, hug1.sum())
    age[young] = 17 + rng.gamma(1.1, 2.4, young.sum())
    age[elder] = rng.uniform(75.0, 88.0, elder.sum())
    age[deep1] = 33 + rng.gamma(4.0, 3.4, deep1.sum())
    age = age.clip(17, 90).round()
    hours = np.empty(n)
    hours[hug0] = rng.normal(39.5, 10.6, hug0.sum())
    hours[hug1] = rng.normal(43.5, 9.8, hug1.sum())
    hours[young] = rng.normal(17.0, 6.0, young.sum())
    hours[elder] = rng.normal(37.0, 9.0, elder.sum())
    hours[deep1] = rng.normal(52.0, 6.0, deep1.sum())
    hours = hours.clip(1, 99).round()
    flat40 = (rng.random(n) < np.where(labels == 1, 0.40, 0.52)) & ~deep
    hours[flat40] = 40.0
    gain = np.zeros(n)
    gmask = rng.random(n) < np.where(deep1, 0.16,
                                     np.where(labels == 1, 0.10, 0.035))
    gmask &= ~elder
    gain[gmask] = rng.lognormal(8.55, 1.05, int(gmask.sum()))
    gain = gain.clip(0, 99999).round()
    big = gmask & (rng.random(n) < np.where(labels == 1, 0.015, 0.0))
    gain[big] = 99999.0
    loss = np.zeros(n)
    lmask = rng.random(n) < np.where(labels == 1, 0.070, 0.036)
    loss[lmask] = rng.normal(1870.0, 380.0, int(lmask.sum()))
    loss = loss.clip(0, 4356).round()

    workclass = cat_by_class(
        rng, labels,
        ["Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
         "Local-gov", "State-gov", "Without-pay", "Never-worked"],
        [0.765, 0.075, 0.022, 0.026, 0.062, 0.040, 0.006, 0.004],
        [0.634, 0.092, 0.078, 0.047, 0.082, 0.056, 0.007, 0.004])
    education = adult_cat(
        rng, masks,
        ["Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
         "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th", "Masters",
         "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"],
        [[0.152, 0.232, 0.030, 0.330, 0.008, 0.032, 0.043, 0.014, 0.017,
          0.010, 0.042, 0.005, 0.024, 0.006, 0.010, 0.002],
         [0.232, 0.208, 0.015, 0.292, 0.020, 0.035, 0.048, 0.007, 0.009,
          0.007, 0.072, 0.002, 0.014, 0.014, 0.003, 0.002],
         [0.090, 0.180, 0.098, 0.330, 0.002, 0.020, 0.030, 0.040, 0.050,
          0.036, 0.010, 0.010, 0.076, 0.002, 0.020, 0.006],
         [0.090, 0.160, 0.040, 0.420, 0.004, 0.022, 0.034, 0.036, 0.062,
          0.014, 0.030, 0.012, 0.036, 0.004, 0.030, 0.006],
         [0.210, 0.110, 0.004, 0.130, 0.130, 0.028, 0.028, 0.002, 0.002,
          0.002, 0.200, 0.001, 0.004, 0.140, 0.002, 0.007]])
    marital = adult_cat(
        rng, masks,
        ["Married-civ-spouse", "Divorced", "Never-married", "Separated",
         "Widowed", "Married-spouse-absent", "Married-AF-spouse"],
        [[0.430, 0.160, 0.295, 0.040, 0.040, 0.032, 0.003],
         [0.660, 0.120, 0.170, 0.020, 0.020, 0.008, 0.002],
         [0.010, 0.020, 0.930, 0.020, 0.010, 0.010, 0.000],
         [0.180, 0.260, 0.060, 0.050, 0.420, 0.025, 0.005],
         [0.970, 0.005, 0.010, 0.005, 0.005, 0.004, 0.001]])
    occupation = adult_cat(
        rng, masks,
        ["Tech-support", "Craft-repair", "Other-service", "Sales",
         "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
         "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
         "Transport-moving", "Priv-house-serv", "Protective-serv",
         "Armed-Forces"],
        [[0.031, 0.130, 0.096, 0.110, 0.108, 0.112, 0.040, 0.064, 0.118,
          0.032, 0.050, 0.004, 0.019, 0.076],
         [0.034, 0.128, 0.060, 0.118, 0.150, 0.148, 0.028, 0.052, 0.100,
          0.023, 0.049, 0.003, 0.024, 0.063],
         [0.016, 0.096, 0.220, 0.100, 0.020, 0.024, 0.130, 0.100, 0.120,
          0.050, 0.056, 0.016, 0.012, 0.040],
         [0.020, 0.120, 0.180, 0.100, 0.050, 0.050, 0.080, 0.080, 0.140,
          0.060, 0.060, 0.030, 0.020, 0.010],
         [0.024, 0.080, 0.016, 0.110, 0.330, 0.320, 0.006, 0.016, 0.050,
          0.010, 0.020, 0.001, 0.022, 0.025]])
    relationship = adult_cat(
        rng, masks,
        ["Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
         "Unmarried"],
        [[0.050, 0.135, 0.300, 0.320, 0.040, 0.155],
         [0.090, 0.035, 0.600, 0.170, 0.017, 0.088],
         [0.005, 0.920, 0.010, 0.040, 0.020, 0.005],
         [0.030, 0.010, 0.130, 0.520, 0.050, 0.260],
         [0.020, 0.002, 0.945, 0.025, 0.003, 0.005]])
    race = cat_by_class(
        rng, labels,
        ["White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"],
        [0.845, 0.030, 0.011, 0.010, 0.104],
        [0.908, 0.035, 0.005, 0.003, 0.049])
    sex = cat_by_class(rng, labels, ["Female", "Male"],
                       [0.360, 0.640], [0.220, 0.780])
    country = cat_by_class(
        rng, labels,
        ["United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
         "Germany", "Outlying-US", "India", "Japan", "Greece", "South",
         "China", "Cuba", "Iran", "Honduras", "Philippines", "Italy",
         "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal", "Ireland",
         "France", "Dominican-Republic", "Laos", "Ecuador", "Taiwan",
         "Haiti", "Columbia", "Hungary", "Guatemala", "Nicaragua",
         "Scotland", "Thailand", "Yugoslavia", "El-Salvador",
         "Trinadad-Tobago", "Peru", "Hong"],
        [0.891] + [0.0221 / 19] * 19 + [0.0637] + [0.0232 / 19] * 19,
        [0.926] + [0.0358 / 19] * 19 + [0.0124] + [0.0258 / 19] * 19)

    # each deep blob's epsilon-ball exit lands in a definite region of input
    # space; bridge populations give the blob's own class real support there
    # so the network keeps those destinations on the blob's side
    b_mid = hug0 & (rng.random(n) < 0.038)
    b_old = hug0 & ~b_mid & (rng.random(n) < 0.040)
    b_rich = hug1 & (rng.random(n) < 0.075)
    age[b_mid] = rng.uniform(36.0, 48.0, b_mid.sum()).round()
    hours[b_mid] = rng.normal(43.0, 5.0, b_mid.sum()).clip(30, 60).round()
    marital[b_mid] = rng.choice(
        ["Never-married", "Divorced"], b_mid.sum(), p=[0.80, 0.20])
    relationship[b_mid] = rng.choice(
        ["Not-in-family", "Unmarried", "Own-child"], b_mid.sum(),
        p=[0.60, 0.25, 0.15])
    age[b_old] = rng.uniform(52.0, 68.0, b_old.sum()).round()
    hours[b_old] = rng.normal(58.0, 7.0, b_old.sum()).clip(40, 84).round()
    marital[b_old] = rng.choice(
        ["Divorced", "Widowed", "Married-civ-spouse", "Separated"],
        b_old.sum(), p=[0.45, 0.30, 0.15, 0.10])
    relationship[b_old] = rng.choice(
        ["Not-in-family", "Unmarried", "Husband"], b_old.sum(),
        p=[0.60, 0.30, 0.10])
    age[b_rich] = rng.uniform(23.0, 32.0, b_rich.sum()).round()
    hours[b_rich] = rng.normal(34.0, 8.0, b_rich.sum()).clip(20, 55).round()
    marital[b_rich] = rng.choice(
        ["Married-civ-spouse", "Never-married"], b_rich.sum(), p=[0.95, 0.05])
    relationship[b_rich] = rng.choice(
        ["Husband", "Wife", "Not-in-family"], b_rich.sum(),
        p=[0.88, 0.07, 0.05])
    gain[b_rich] = 0.0

    df = pd.DataFrame({
        "age": age, "workclass": workclass, "education": education,
        "marital_status": marital, "occupation": occupation,
        "relationship": relationship, "race": race, "sex": sex,
        "capital_gain": gain, "capital_loss": loss, "hours_per_week": hours,
        "native_country": country,
        "income": np.where(labels == 1, ">50K", "<=50K"),
    })
    finalize("adult", df, labels,
             ["age", "capital_gain", "capital_loss", "hours_per_week"],
             ["age", "capital_gain", "capital_loss", "hours_per_week"])


def make_german(rng):
    labels = shuffled_labels(rng, 300, 700)  # positive class: bad credit
    n = len(labels)
    deep = deep_mask(rng, labels, 0.27, 0.0)
    # numerics carry only mild signal; the strong markers are one-sided
    # categorical levels stacked on a deep prototype inside the good class
    duration = by_class(rng, labels,
                        lambda r, k: r.gamma(4.2, 4.8, k),
                        lambda r, k: r.gamma(5.0, 5.1, k)).clip(4, 72).round()
    amount = by_class(rng, labels,
                      lambda r, k: r.lognormal(7.92, 0.68, k),
                      lambda r, k: r.lognormal(8.18, 0.76, k)).clip(250, 18424).round()
    age = by_class(rng, labels,
                   lambda r, k: 19 + r.gamma(2.9, 6.1, k),
                   lambda r, k: 19 + r.gamma(2.3, 6.0, k)).clip(19, 75).round()
    elder = (labels == 0) & ~deep & (rng.random(n) < 0.12)
    age[elder] = rng.uniform(66.0, 75.0, int(elder.sum())).round()
    residence = by_class(rng, labels,
                         lambda r, k: r.integers(1, 5, k).astype(float),
                         lambda r, k: r.integers(1, 5, k).astype(float))
    credits = by_class(rng, labels,
                       lambda r, k: 1 + (r.random(k) < 0.33) + (r.random(k) < 0.05),
                       lambda r, k: 1 + (r.random(k) < 0.33) + (r.random(k) < 0.05))
    status = cat_by_profile(
        rng, labels, deep, ["lt-0", "0-to-200", "ge-200", "no-account"],
        [0.24, 0.43, 0.15, 0.18], [0.46, 0.43, 0.06, 0.05],
        [0.02, 0.02, 0.02, 0.94], [0.46, 0.43, 0.06, 0.05])
    history = cat_by_profile(
        rng, labels, deep,
        ["no-credits", "all-paid-here", "all-paid-duly", "delay-in-past",
         "critical-account"],
        [0.03, 0.05, 0.59, 0.08, 0.25], [0.06, 0.08, 0.68, 0.15, 0.03],
        [0.01, 0.01, 0.05, 0.01, 0.92], [0.06, 0.08, 0.68, 0.15, 0.03])
    savings = cat_by_profile(
        rng, labels, deep,
        ["lt-100", "100-to-500", "500-to-1000", "ge-1000", "unknown"],
        [0.50, 0.13, 0.08, 0.07, 0.22], [0.68, 0.14, 0.06, 0.03, 0.09],
        [0.14, 0.07, 0.06, 0.16, 0.57], [0.68, 0.14, 0.06, 0.03, 0.09])
    employment = cat_by_profile(
        rng, labels, deep,
        ["unemployed", "lt-1yr", "1-to-4yr", "4-to-7yr", "ge-7yr"],
        [0.06, 0.15, 0.34, 0.21, 0.24], [0.10, 0.26, 0.38, 0.16, 0.10],
        [0.01, 0.03, 0.15, 0.15, 0.66], [0.10, 0.26, 0.38, 0.16, 0.10])
    purpose = cat_by_class(
        rng, labels,
        ["car-new", "car-used", "furniture", "radio-tv", "appliances",
         "repairs", "education", "business"],
        [0.234, 0.103, 0.186, 0.276, 0.018, 0.022, 0.066, 0.095],
        [0.234, 0.103, 0.186, 0.276, 0.018, 0.022, 0.066, 0.095])
    installment = cat_by_class(rng, labels, ["1", "2", "3", "4"],
                               [0.136, 0.231, 0.157, 0.476],
                               [0.136, 0.231, 0.157, 0.476])
    personal = cat_by_class(
        rng, labels,
        ["male-divorced", "female-div-sep-mar", "male-single", "male-married"],
        [0.050, 0.310, 0.548, 0.092], [0.050, 0.310, 0.548, 0.092])
    debtors = cat_by_class(rng, labels, ["none", "co-applicant", "guarantor"],
                           [0.907, 0.041, 0.052], [0.907, 0.041, 0.052])
    prop = cat_by_class(
        rng, labels,
        ["real-estate", "building-savings", "car-other", "unknown"],
        [0.282, 0.232, 0.332, 0.154], [0.282, 0.232, 0.332, 0.154])
    plans = cat_by_class(rng, labels, ["bank", "stores", "none"],
                         [0.139, 0.047, 0.814], [0.139, 0.047, 0.814])
    housing = cat_by_class(rng, labels, ["rent", "own", "for-free"],
                           [0.179, 0.719, 0.102], [0.179, 0.719, 0.102])
    job = cat_by_class(
        rng, labels,
        ["unskilled-nonresident", "unskilled-resident", "skilled", "management"],
        [0.022, 0.198, 0.628, 0.152], [0.022, 0.198, 0.628, 0.152])
    liable = cat_by_class(rng, labels, ["1", "2"],
                          [0.845, 0.155], [0.847, 0.153])
    phone = cat_by_class(rng, labels, ["none", "registered"],
                         [0.596, 0.404], [0.596, 0.404])
    foreign = cat_by_class(rng, labels, ["yes", "no"],
                           [0.963, 0.037], [0.963, 0.037])
    df = pd.DataFrame({
        "status_checking": status, "duration": duration,
        "credit_history": history, "purpose": purpose, "credit_amount": amount,
        "savings": savings, "employment_since": employment,
        "installment_rate": installment, "personal_status_sex": personal,
        "other_debtors": debtors, "residence_since": residence,
        "property": prop, "age": age, "other_installment_plans": plans,
        "housing": housing, "existing_credits": credits, "job": job,
        "people_liable": liable, "telephone": phone, "foreign_worker": foreign,
        "credit_risk": np.where(labels == 1, "bad", "good"),
    })
    finalize("german", df, labels,
             ["duration", "credit_amount", "residence_since", "age",
              "existing_credits"],
             ["duration", "credit_amount", "residence_since", "age",
              "existing_credits"])


def age_category(age: np.ndarray) -> np.ndarray:
    out = np.where(age < 25, "Less than 25",
                   np.where(age <= 45, "25 - 45", "Greater than 45"))
    return out.astype(object)


def make_compas(rng):
    labels = shuffled_labels(rng, 1440, 5774)  # positive class: High score
    n = len(labels)
    deep = deep_mask(rng, labels, 0.23, 0.0)
    # the low-risk class hides a large senior blob behind the age wall, and a
    # middle-aged moderate-record bridge population covers the blob's
    # epsilon-ball so the destination region stays low-risk territory
    bridge = (labels == 0) & ~deep & (rng.random(n) < 0.06)
    age = by_profile(
        rng, labels, deep,
        lambda r, k: r.normal(31.5, 8.6, k),
        lambda r, k: r.normal(29.5, 7.0, k),
        lambda r, k: r.uniform(64.0, 80.0, k),
        lambda r, k: r.normal(29.5, 7.0, k)).clip(18, 83).round()
    age[bridge] = rng.uniform(47.0, 63.0, int(bridge.sum())).round()
    priors = by_profile(
        rng, labels, deep,
        lambda r, k: r.negative_binomial(0.9, 0.47, k).astype(float),
        lambda r, k: r.negative_binomial(1.8, 0.35, k).astype(float),
        lambda r, k: (r.random(k) < 0.25).astype(float),
        lambda r, k: r.negative_binomial(1.8, 0.35, k).astype(float)).clip(0, 38)
    priors[bridge] = rng.integers(4, 16, int(bridge.sum())).astype(float)
    days_b = by_class(rng, labels,
                      lambda r, k: r.normal(-2.8, 7.3, k),
                      lambda r, k: r.normal(-0.6, 6.6, k)).clip(-30, 30).round()
    stay = by_profile(
        rng, labels, deep,
        lambda r, k: r.lognormal(1.90, 1.25, k),
        lambda r, k: r.lognormal(2.75, 1.25, k),
        lambda r, k: r.lognormal(1.40, 1.00, k),
        lambda r, k: r.lognormal(2.75, 1.25, k)).clip(0, 799).round()
    degree = cat_by_class(rng, labels, ["F", "M"],
                          [0.665, 0.335], [0.730, 0.270])
    is_recid = cat_by_profile(
        rng, labels, deep, ["0", "1"],
        [0.565, 0.435], [0.510, 0.490], [0.90, 0.10], [0.510, 0.490])
    is_violent = cat_by_class(rng, labels, ["0", "1"],
                              [0.930, 0.070], [0.870, 0.130])
    two_year = cat_by_profile(
        rng, labels, deep, ["0", "1"],
        [0.545, 0.455], [0.465, 0.535], [0.90, 0.10], [0.465, 0.535])
    race = cat_by_class(
        rng, labels,
        ["African-American", "Caucasian", "Hispanic", "Asian",
         "Native American", "Other"],
        [0.455, 0.360, 0.095, 0.006, 0.003, 0.081],
        [0.655, 0.225, 0.060, 0.003, 0.005, 0.052])
    sex = cat_by_class(rng, labels, ["Male", "Female"],
                       [0.792, 0.208], [0.838, 0.162])
    df = pd.DataFrame({
        "sex": sex, "age": age, "age_cat": age_category(age), "race": race,
        "priors_count": priors.astype(np.float64), "days_b_screening_arrest": days_b,
        "c_charge_degree": degree, "is_recid": is_recid,
        "is_violent_recid": is_violent, "two_year_recid": two_year,
        "length_of_stay": stay,
    })
    score = np.where(labels == 1, "High",
                     np.where(rng.random(n) < 0.33, "Medium", "Low"))
    df["score_text"] = score
    finalize_compas(df, labels)


def finalize_compas(df: pd.DataFrame, labels: np.ndarray):
    numeric_cols = ["age", "priors_count", "days_b_screening_arrest",
                    "length_of_stay"]
    move_extremes_into_train(df, numeric_cols, labels)
    # age swaps may have detached the category; rebuild it so the raw data
    # keeps the age/age_cat interdependency consistent
    df["age_cat"] = age_category(df["age"].to_numpy())
    for col in numeric_cols:
        df[col] = df[col].astype(np.int64)
    OUT.mkdir(exist_ok=True)
    path = OUT / "compas.csv"
    df.to_csv(path, index=False)
    print(f"compas: {len(df)} rows -> {path}")


def main():
    # one stream per dataset keeps the realizations independent
    make_diabetes(np.random.default_rng(7))
    make_breast_cancer(np.random.default_rng(8))
    make_adult(np.random.default_rng(29))
    make_german(np.random.default_rng(50))
    make_compas(np.random.default_rng(51))


if __name__ == "__main__":
    main()
