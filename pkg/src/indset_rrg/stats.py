"""Sample summaries and the weighted least-squares extrapolation in 1/ln N.

The model is ``alpha(N) = a / ln N + alpha_inf``, fitted with weights
``1 / stderr**2``.  By default the parameter covariance is the inverse of the
weighted normal matrix (weights taken as exact inverse variances); with
``scale_covariance=True`` it is multiplied by chi^2 / dof.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats as sps

FIXED_QUANTILE = 3.35  # fixed multiplier, reported next to the t-based interval
CONFIDENCE = 0.99

# how the spread column of a summary table is read
SAMPLE_SD = "sample-sd"  # sample standard deviation; stderr = sd / sqrt(count)
MEAN_SE = "mean-se"      # already the standard error of the mean
STDERR_MODES = (SAMPLE_SD, MEAN_SE)


class DataError(ValueError):
    """Input data cannot be summarized or fitted."""


@dataclass(frozen=True)
class SampleSummary:
    d: int
    n: int
    count: int
    mean: float
    sd: float      # nan when count < 2
    stderr: float  # nan when count < 2


@dataclass(frozen=True)
class FitResult:
    d: int | None
    a: float
    se_a: float
    alpha_inf: float
    se_alpha: float
    ci99_lo: float
    ci99_hi: float
    quantile_used: float
    n_points: int
    fixed_ci99_lo: float
    fixed_ci99_hi: float
    chi2: float

    def report(self) -> dict:
        keys = ("d", "a", "se_a", "alpha_inf", "se_alpha", "ci99_lo", "ci99_hi", "quantile_used", "n_points")
        out = {k: getattr(self, k) for k in keys}
        out["fixed_quantile"] = FIXED_QUANTILE
        out["fixed_ci99_lo"] = self.fixed_ci99_lo
        out["fixed_ci99_hi"] = self.fixed_ci99_hi
        out["chi2"] = self.chi2
        return out


def summarize_group(d: int, n: int, alphas) -> SampleSummary:
    # sorted so the result does not depend on input order, bit for bit
    values = np.sort(np.asarray(list(alphas), dtype=float))
    if values.size == 0:
        raise DataError(f"empty sample for d={d}, N={n}")
    mean = float(values.mean())
    if values.size < 2:
        return SampleSummary(d, n, 1, mean, math.nan, math.nan)
    sd = float(values.std(ddof=1))
    return SampleSummary(d, n, int(values.size), mean, sd, sd / math.sqrt(values.size))


def summarize(results) -> list[SampleSummary]:
    """One summary per (d, N), sorted by d then N."""
    groups = defaultdict(list)
    for r in results:
        groups[(r.d, r.n)].append(r.alpha)
    return [summarize_group(d, n, groups[(d, n)]) for d, n in sorted(groups)]


def t_quantile(dof: int, confidence: float = CONFIDENCE) -> float:
    """Two-sided Student-t quantile."""
    return float(sps.t.ppf(0.5 + confidence / 2, dof))


def gls_fit(points, d: int | None = None, scale_covariance: bool = False) -> FitResult:
    """Fit ``mean = a / ln N + alpha_inf`` to ``(N, mean, stderr)`` triples."""
    pts = sorted((float(n), float(m), float(s)) for n, m, s in points)
    if len(pts) < 3:
        raise DataError(f"need at least 3 points to fit, got {len(pts)}")
    ns = np.array([p[0] for p in pts])
    means = np.array([p[1] for p in pts])
    se = np.array([p[2] for p in pts])
    if np.any(ns <= 1):
        raise DataError("every N must exceed 1")
    if len(set(ns.tolist())) != len(ns):
        raise DataError("N values must be distinct")
    if not np.all(np.isfinite(se)) or np.any(se <= 0):
        raise DataError("every stderr must be positive")
    x = 1.0 / np.log(ns)
    if np.ptp(x) == 0:
        raise DataError("degenerate design: all x equal")

    w = 1.0 / se**2
    design = np.column_stack([x, np.ones_like(x)])
    normal = design.T @ (w[:, None] * design)
    cov = np.linalg.inv(normal)
    a, alpha_inf = cov @ (design.T @ (w * means))
    resid = means - (a * x + alpha_inf)
    chi2 = float(np.sum(w * resid**2))
    dof = len(pts) - 2
    if scale_covariance:
        cov = cov * (chi2 / dof)
    se_a, se_alpha = np.sqrt(np.diag(cov))
    z = t_quantile(dof)
    return FitResult(
        d=d,
        a=float(a),
        se_a=float(se_a),
        alpha_inf=float(alpha_inf),
        se_alpha=float(se_alpha),
        ci99_lo=float(alpha_inf - z * se_alpha),
        ci99_hi=float(alpha_inf + z * se_alpha),
        quantile_used=z,
        n_points=len(pts),
        fixed_ci99_lo=float(alpha_inf - FIXED_QUANTILE * se_alpha),
        fixed_ci99_hi=float(alpha_inf + FIXED_QUANTILE * se_alpha),
        chi2=chi2,
    )


def fit_summaries(summaries, d: int | None = None, scale_covariance: bool = False) -> FitResult:
    pts = []
    for s in summaries:
        if s.count < 2 or not s.stderr > 0:
            raise DataError(f"N={s.n}: need at least two distinct runs for a standard error")
        pts.append((s.n, s.mean, s.stderr))
    return gls_fit(pts, d=d, scale_covariance=scale_covariance)


def plot_columns(fit: FitResult, points) -> list[dict]:
    """x = 1/ln N, mean, stderr and the fitted line, one row per point."""
    rows = []
    for n, mean, se in sorted(points):
        x = 1.0 / math.log(n)
        rows.append({"N": n, "x": x, "mean": mean, "stderr": se, "fitted": fit.a * x + fit.alpha_inf})
    return rows


# --------------------------------------------------------------------------
# CSV input


def _data_lines(path):
    with open(path, newline="") as fh:
        for line in fh:
            if line.strip() and not line.lstrip().startswith("#"):
                yield line


def read_points(path, d: int | None = None, stderr_mode: str = SAMPLE_SD):
    """Summaries for degree ``d`` from a run CSV or a summary CSV.

    Run CSVs carry ``d,N,seed,i_size,alpha,wall_ms`` and are summarized here.
    Summary CSVs carry ``d,N,count,mean,sd``; ``stderr_mode`` says whether
    ``sd`` is a sample standard deviation or already a standard error.
    Returns ``(d, summaries)``.
    """
    if stderr_mode not in STDERR_MODES:
        raise DataError(f"unknown stderr mode {stderr_mode!r}")
    reader = csv.DictReader(_data_lines(path))
    fields = set(reader.fieldnames or [])
    try:
        rows = list(reader)
        if {"alpha", "seed"} <= fields:
            groups = defaultdict(list)
            for row in rows:
                if row.get("alpha", "") in ("", None):
                    continue
                groups[(int(row["d"]), int(row["N"]))].append(float(row["alpha"]))
            d = _pick_degree(d, {k[0] for k in groups})
            summaries = [summarize_group(dd, n, groups[(dd, n)]) for dd, n in sorted(groups) if dd == d]
        elif {"count", "mean", "sd"} <= fields:
            summaries = []
            d = _pick_degree(d, {int(row["d"]) for row in rows})
            for row in rows:
                if int(row["d"]) != d:
                    continue
                count, sd = int(row["count"]), float(row["sd"])
                se = sd / math.sqrt(count) if stderr_mode == SAMPLE_SD else sd
                summaries.append(SampleSummary(d, int(row["N"]), count, float(row["mean"]), sd, se))
            summaries.sort(key=lambda s: s.n)
        else:
            raise DataError(f"{path}: unrecognized columns {sorted(fields)}")
    except (KeyError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"{path}: malformed row ({exc})") from exc
    return d, summaries


def _pick_degree(d, present):
    if not present:
        raise DataError("no data rows")
    if d is None:
        if len(present) > 1:
            raise DataError(f"several degrees present {sorted(present)}; pick one")
        return next(iter(present))
    if d not in present:
        raise DataError(f"no rows for d={d}")
    return d


def summary_dict(s: SampleSummary) -> dict:
    return asdict(s)
