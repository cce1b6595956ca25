"""Monte Carlo census of ambiguity-space dimensions over antenna counts.

For a fixed code the dimension of the channel ambiguity space is almost
surely the same number for every channel draw, non-increasing in the
number of receive antennas, and beyond a critical antenna count the
space itself coincides with the channel-independent invariant space.
The census samples channels, tabulates the observed dimensions, and
locates that critical count. Disagreement between trials indicates a
tolerance bug, not bad luck, so it fails the run.
"""

import csv
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .estimator import draw_channel
from .subspace import compute_bspace, compute_bstar, principal_angles


class CensusError(RuntimeError):
    """Observed dimensions or spans violate the deterministic structure."""


@dataclass(frozen=True)
class TrialRecord:
    code: str
    M: int
    trial: int
    dim: int
    max_angle_to_bstar: float   # radians; max principal angle to the invariant space


@dataclass(frozen=True)
class DimensionCensus:
    """Histogram of observed dimensions for one (code, M) pair."""

    code: str
    M: int
    trials: int
    histogram: dict
    unimodal: bool      # every trial produced the same dimension

    @property
    def mode(self):
        return max(self.histogram, key=self.histogram.get)


@dataclass(frozen=True)
class CensusResult:
    """Census over M = 1..M_max with the critical antenna count."""

    code: str
    M_range: tuple
    trials: int
    seed: int
    tol: float
    histograms: dict            # M -> {dim: count}
    d_mode: dict                # M -> modal dimension
    d_star: int
    M_star: object              # smallest matching M, or None if not found
    records: tuple = field(repr=False)


def _trial_rng(seed, M, trial):
    # Streams derived from (seed, M, trial): reproducible and independent
    # of the order in which trials run.
    return np.random.default_rng([seed, M, trial])


def _census_trials(code, M, trials, seed, tol, bstar):
    records = []
    for trial in range(trials):
        rng = _trial_rng(seed, M, trial)
        channel = draw_channel(code.N, M, rng)
        sub = compute_bspace(code, channel, tol)
        angle = float(np.max(principal_angles(sub.basis, bstar.basis)))
        records.append(TrialRecord(code.name, M, trial, sub.dim, angle))
    return records


def dimension_census(code, M, trials, seed, tol=1e-9):
    """Tabulate the ambiguity dimension over random channel draws."""
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials}")
    bstar = compute_bstar(code, tol)
    records = _census_trials(code, M, trials, seed, tol, bstar)
    hist = Counter(r.dim for r in records)
    return DimensionCensus(code.name, M, trials, dict(hist), len(hist) == 1)


def find_mstar(code, M_max, trials, seed, tol=1e-9, angle_tol=1e-8):
    """Census M = 1..M_max and locate the critical antenna count.

    The critical count is the smallest M at which every trial's subspace
    equals the invariant space (same dimension and all principal angles
    within ``angle_tol``). Raises :class:`CensusError` when trials
    disagree on a dimension or the modal dimension fails to be
    non-increasing and bounded below by the invariant dimension.
    """
    if M_max < 1:
        raise ValueError(f"M_max must be >= 1, got {M_max}")
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials}")
    bstar = compute_bstar(code, tol)
    m_range = tuple(range(1, M_max + 1))
    histograms = {}
    d_mode = {}
    all_records = []
    matches = {}
    for M in m_range:
        records = _census_trials(code, M, trials, seed, tol, bstar)
        all_records.extend(records)
        hist = Counter(r.dim for r in records)
        if len(hist) != 1:
            raise CensusError(
                f"{code.name} M={M}: observed dimensions {dict(hist)} are not "
                f"a single value; deterministic-dimension check failed")
        histograms[M] = dict(hist)
        d_mode[M] = records[0].dim
        matches[M] = (d_mode[M] == bstar.dim
                      and all(r.max_angle_to_bstar <= angle_tol for r in records))
    prev = None
    for M in m_range:
        if d_mode[M] < bstar.dim:
            raise CensusError(
                f"{code.name} M={M}: dimension {d_mode[M]} fell below the "
                f"invariant dimension {bstar.dim}")
        if prev is not None and d_mode[M] > prev:
            raise CensusError(
                f"{code.name}: modal dimension increased from {prev} to "
                f"{d_mode[M]} at M={M}")
        if prev is not None and prev > bstar.dim and d_mode[M] == prev:
            raise CensusError(
                f"{code.name}: modal dimension stalled at {prev} above the "
                f"invariant dimension {bstar.dim} between M={M - 1} and M={M}")
        prev = d_mode[M]
    m_star = next((M for M in m_range if matches[M]), None)
    if m_star is not None:
        for M in m_range[m_star - 1:]:
            if not matches[M]:
                raise CensusError(
                    f"{code.name} M={M}: subspace no longer matches the "
                    f"invariant space past M_star={m_star}")
    return CensusResult(code.name, m_range, trials, seed, tol, histograms,
                        d_mode, bstar.dim, m_star, tuple(all_records))


def write_census_csv(result, path):
    """Per-trial rows: code, M, trial, dim, max principal angle (radians)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["code", "M", "trial", "dim",
                         "max_principal_angle_to_bstar"])
        for r in result.records:
            writer.writerow([r.code, r.M, r.trial, r.dim,
                             repr(r.max_angle_to_bstar)])


def census_summary(result):
    """JSON-ready summary with the per-M modal dimensions."""
    return {
        "code": result.code,
        "trials": result.trials,
        "seed": result.seed,
        "tol": result.tol,
        "d_star": result.d_star,
        "M_star": result.M_star,
        "d_mode": {str(M): result.d_mode[M] for M in result.M_range},
    }
