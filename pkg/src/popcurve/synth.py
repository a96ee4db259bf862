"""Seeded synthetic corpus generation for every curve class.

Each generator draws parameters from well-posed sub-ranges of the fitting
bounds so the produced curve genuinely belongs to its class: a Gaussian with
a near-zero tail is a dying curve under the rule taxonomy, so tails are kept
above the dying epsilon, and oscillations keep their minimum off the floor
to survive the non-negativity clamp.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curvefit import LABEL_ORDER, CurveLabel
from .errors import InvalidSpec
from .series import RawSeries

POPULATION_CEILING = (10.0, 25000.0)

#: Table-style class mix weights, in LABEL_ORDER
#: (Outlier, ExponentialGrowth, CappedGrowth, Dying, Oscillation, Gaussian, Constant).
FIELD_MIX_WEIGHTS = {
    CurveLabel.OUTLIER: 47,
    CurveLabel.EXPONENTIAL_GROWTH: 29,
    CurveLabel.CAPPED_GROWTH: 75,
    CurveLabel.DYING: 420,
    CurveLabel.OSCILLATION: 69,
    CurveLabel.GAUSSIAN: 169,
    CurveLabel.CONSTANT: 162,
}


@dataclass(frozen=True)
class GenSpec:
    label: CurveLabel
    params: dict | None = None
    noise_sigma: float = 0.0
    length: int = 400
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.label, CurveLabel):
            raise InvalidSpec(f"unknown label {self.label!r}")
        if not 0.0 <= self.noise_sigma < 0.2:
            raise InvalidSpec("noise_sigma must be in [0, 0.2)")
        if self.length < 2:
            raise InvalidSpec("length must be >= 2")


def sample_params(label: CurveLabel, rng: np.random.Generator) -> dict:
    """Draw in-bounds parameters that produce an unambiguous instance of
    the class."""
    if label == CurveLabel.CONSTANT:
        return {"level": rng.uniform(0.2, 1.0)}
    if label == CurveLabel.DYING:
        return {"rate": rng.uniform(7.0, 15.0)}
    if label == CurveLabel.EXPONENTIAL_GROWTH:
        c = rng.uniform(0.02, 0.2)
        b = rng.uniform(2.0, 7.0)
        return {"a": (1.0 - c) / np.exp(b), "b": b, "c": c}
    if label == CurveLabel.CAPPED_GROWTH:
        k = rng.uniform(8.0, 30.0)
        u0 = rng.uniform(0.25, 0.6)
        return {"cap": 1.0 + np.exp(-k * (1.0 - u0)), "k": k, "u0": u0}
    if label == CurveLabel.GAUSSIAN:
        c = rng.uniform(0.06, 0.15)
        return {
            "a": 1.0 - c,
            "mu": rng.uniform(0.25, 0.75),
            "sigma": rng.uniform(0.04, 0.18),
            "c": c,
        }
    if label == CurveLabel.OSCILLATION:
        a = rng.uniform(0.12, 0.38)
        return {
            "a": a,
            "omega": rng.uniform(1.5, 12.0),
            "phi": rng.uniform(0.3, 5.9),
            "c": rng.uniform(a + 0.06, 1.0 - a),
        }
    if label == CurveLabel.OUTLIER:
        return {"step": 0.08, "jump": 0.6, "jump_prob": 0.06,
                "start": rng.uniform(0.3, 0.8)}
    raise InvalidSpec(f"unknown label {label!r}")


def curve_values(label: CurveLabel, params: dict, length: int,
                 rng: np.random.Generator | None = None) -> np.ndarray:
    """Evaluate the clean (noise-free) class shape on the time grid.
    Outlier needs ``rng`` because its shape is a seeded random walk."""
    u = np.linspace(0.0, 1.0, length)
    p = params
    if label == CurveLabel.CONSTANT:
        return np.full(length, p["level"])
    if label == CurveLabel.DYING:
        return np.exp(-p["rate"] * u)
    if label == CurveLabel.EXPONENTIAL_GROWTH:
        return p["c"] + p["a"] * np.exp(p["b"] * u)
    if label == CurveLabel.CAPPED_GROWTH:
        return p["cap"] / (1.0 + np.exp(-p["k"] * (u - p["u0"])))
    if label == CurveLabel.GAUSSIAN:
        return p["a"] * np.exp(-((u - p["mu"]) ** 2) / (2 * p["sigma"] ** 2)) + p["c"]
    if label == CurveLabel.OSCILLATION:
        return p["c"] + p["a"] * np.sin(2 * np.pi * p["omega"] * u + p["phi"])
    if label == CurveLabel.OUTLIER:
        if rng is None:
            raise InvalidSpec("outlier generation needs an rng")
        # heavy-tailed steps: mostly small moves, occasional level jumps, so
        # the walk cannot be shadowed by any of the smooth families
        steps = rng.normal(0.0, p["step"], size=length)
        jumps = rng.random(length) < p.get("jump_prob", 0.0)
        steps[jumps] += rng.uniform(-1.0, 1.0, size=int(jumps.sum())) * p.get("jump", 0.0)
        walk = np.empty(length)
        walk[0] = p["start"]
        for t in range(1, length):
            walk[t] = max(0.0, walk[t - 1] + steps[t])
        # per-point jitter scaled to the walk's range keeps the roughness
        # visible after max-normalization
        jitter = rng.normal(0.0, p.get("jitter", 0.12) * max(walk.max(), 1e-9),
                            size=length)
        return np.maximum(walk + jitter, 0.0)
    raise InvalidSpec(f"unknown label {label!r}")


def generate(spec: GenSpec) -> tuple[RawSeries, CurveLabel]:
    """Produce one labeled raw series: class shape + seeded noise, clamped to
    >= 0 and rescaled to a random population ceiling.

    Constant ignores noise (the label is defined by exact equality) and
    Dying uses signal-proportional noise so its defining zero tail survives.
    """
    rng = np.random.default_rng(spec.seed)
    params = spec.params if spec.params is not None else sample_params(spec.label, rng)
    clean = curve_values(spec.label, params, spec.length, rng=rng)
    if spec.noise_sigma > 0 and spec.label not in (CurveLabel.CONSTANT,):
        noise = rng.normal(0.0, spec.noise_sigma, size=spec.length)
        if spec.label == CurveLabel.DYING:
            noise = noise * clean
        y = clean + noise
    else:
        y = clean.copy()
    y = np.maximum(y, 0.0)
    ceiling = rng.uniform(*POPULATION_CEILING)
    peak = y.max()
    if peak > 0:
        y = y * (ceiling / peak)
    return (
        RawSeries(
            values=y,
            species_name=f"{spec.label.value}_{spec.seed}",
            model_id=f"synth_{spec.seed}",
        ),
        spec.label,
    )


def _mix_counts(total: int) -> dict[CurveLabel, int]:
    """Largest-remainder apportionment of ``total`` over the field mix."""
    weights = {lab: FIELD_MIX_WEIGHTS[lab] for lab in LABEL_ORDER}
    wsum = sum(weights.values())
    quotas = {lab: total * w / wsum for lab, w in weights.items()}
    counts = {lab: int(np.floor(q)) for lab, q in quotas.items()}
    short = total - sum(counts.values())
    by_rem = sorted(LABEL_ORDER, key=lambda lab: quotas[lab] - counts[lab],
                    reverse=True)
    for lab in by_rem[:short]:
        counts[lab] += 1
    return counts


def make_corpus(
    per_class: int = 100,
    noise_sigma: float = 0.02,
    seed: int = 7,
    length: int = 400,
    table1_mix: bool = False,
    total: int | None = None,
) -> list[tuple[RawSeries, CurveLabel]]:
    """Deterministic labeled corpus: equal class counts by default, or the
    observed field class mix when ``table1_mix`` is set."""
    if table1_mix:
        if total is None:
            total = per_class * len(LABEL_ORDER)
        counts = _mix_counts(total)
    else:
        counts = {lab: per_class for lab in LABEL_ORDER}
    out = []
    k = 0
    for lab in LABEL_ORDER:
        for _ in range(counts[lab]):
            spec = GenSpec(label=lab, noise_sigma=noise_sigma, length=length,
                           seed=seed * 1_000_003 + k)
            out.append(generate(spec))
            k += 1
    return out


def write_corpus(outdir, corpus, species_per_file: int = 10) -> None:
    """Write the corpus in the ingestable CSV schema plus a labels.csv
    ground-truth file."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    labels_rows = []
    for start in range(0, len(corpus), species_per_file):
        chunk = corpus[start : start + species_per_file]
        model = f"corpus_{start // species_per_file:04d}"
        path = outdir / f"{model}.csv"
        length = chunk[0][0].values.size
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [raw.species_name for raw, _ in chunk])
            for t in range(length):
                writer.writerow(
                    [t] + [repr(float(raw.values[t])) for raw, _ in chunk]
                )
        for raw, lab in chunk:
            labels_rows.append((model, raw.species_name, lab.value))
    with open(outdir / "labels.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "species", "label"])
        writer.writerows(labels_rows)
