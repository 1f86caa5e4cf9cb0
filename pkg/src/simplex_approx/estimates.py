"""Bounded-ratio experiments for the approximation estimates.

Each experiment evaluates a left-hand side and a right-hand side over a
range of degrees n (or scales t) and reports their ratio. The inequalities
only assert that the ratio stays bounded, so the verdict is a trend check:
the largest ratio in the last quarter of the range may not exceed twice the
largest ratio in the first quarter.

Best-approximation errors are tail sums of coefficient energies. A tail
below ``NOISE_FLOOR * ||g||`` is indistinguishable from quadrature
rounding; such values are reported as 0, the row is flagged
``significance_loss`` and it is left out of ``sup_ratio`` and the trend
check. K-functional infima are realized over the partial sums ``S_m f``
only, so the reported K values are upper bounds for the true infima.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .expansion import CoeffTable, project_derivative, tail_errors
from . import hiprec
from .functions import directional, random_polynomial_table
from .tri_basis import WeightParams, lambda_n

NOISE_FLOOR = 1e-12
DEFAULT_EXTRA_DEGREE = 4

SIGNIFICANCE = "significance_loss"
DEGENERATE = "degenerate"
RHS_ZERO = "rhs_zero"
NONFINITE = "nonfinite"


@dataclass(frozen=True)
class RatioRow:
    x: float
    lhs: float
    rhs: float
    ratio: Optional[float]
    flags: tuple[str, ...] = ()

    @property
    def clean(self) -> bool:
        return not self.flags and self.ratio is not None


def make_row(x: float, lhs: float, rhs: float, flags: Iterable[str] = ()) -> RatioRow:
    """Row with the ratio conventions applied.

    ``lhs == 0`` gives ratio 0 (flagged degenerate if ``rhs == 0`` too);
    ``lhs > 0`` with ``rhs == 0`` has no ratio and is flagged.
    """
    flags = list(dict.fromkeys(flags))
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return RatioRow(x, lhs, rhs, None, tuple(flags + [NONFINITE]))
    if lhs == 0:
        if rhs == 0:
            flags.append(DEGENERATE)
        return RatioRow(x, lhs, rhs, 0.0, tuple(flags))
    if rhs == 0:
        return RatioRow(x, lhs, rhs, None, tuple(flags + [RHS_ZERO]))
    return RatioRow(x, lhs, rhs, lhs / rhs, tuple(flags))


def trend_check(ratios: Sequence[float]) -> Optional[bool]:
    """Last-quartile max at most twice the first-quartile max; None below 4 values."""
    if len(ratios) < 4:
        return None
    q = len(ratios) // 4
    return max(ratios[-q:]) <= 2.0 * max(ratios[:q])


@dataclass(frozen=True)
class RatioReport:
    experiment: str
    params: dict
    rows: tuple[RatioRow, ...]
    index_name: str = "n"
    notes: tuple[str, ...] = field(default=())

    @property
    def clean_rows(self) -> list[RatioRow]:
        return [row for row in self.rows if row.clean]

    @property
    def sup_ratio(self) -> Optional[float]:
        vals = [row.ratio for row in self.clean_rows]
        return max(vals) if vals else None

    @property
    def flagged(self) -> list[RatioRow]:
        return [row for row in self.rows if not row.clean]

    def trend(self) -> Optional[bool]:
        return trend_check([row.ratio for row in sorted(self.clean_rows, key=lambda row: row.x)])

    def all_finite(self) -> bool:
        return all(row.ratio is None or (math.isfinite(row.ratio) and row.ratio >= 0) for row in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.index_name, "lhs", "rhs", "ratio", "flags"])
        for row in self.rows:
            writer.writerow([_fmt(row.x), _fmt(row.lhs), _fmt(row.rhs),
                             "" if row.ratio is None else _fmt(row.ratio), ";".join(row.flags)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "params": self.params,
            "index": self.index_name,
            "sup_ratio": self.sup_ratio,
            "trend_pass": self.trend(),
            "notes": list(self.notes),
            "rows": [{self.index_name: row.x, "lhs": row.lhs, "rhs": row.rhs, "ratio": row.ratio,
                      "flags": list(row.flags)} for row in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _fmt(v: float) -> str:
    if float(v).is_integer() and abs(v) < 2**53:
        return str(int(v))
    return format(v, ".17g")


def _params(w: WeightParams, r: int, f_name: str, **extra) -> dict:
    return {"alpha": w.alpha, "beta": w.beta, "gamma": w.gamma, "r": r, "f": f_name, **extra}


def resolved_errors(tab: CoeffTable, f_norm_sq: float):
    """``E_m`` for ``m <= N`` with unresolvable values zeroed.

    Returns ``(errors, lost)`` where ``lost[m]`` marks a nonzero tail below
    ``NOISE_FLOOR * ||g||``; exact zeros (polynomials given by their
    coefficients) are not flagged.
    """
    errors, _ = tail_errors(tab, f_norm_sq)
    floor = NOISE_FLOOR * math.sqrt(max(f_norm_sq, 0.0))
    lost = (errors > 0) & (errors < floor)
    return np.where(lost, 0.0, errors), lost


def _check_range(n_range: Iterable[int], r: int, min_factor: int) -> list[int]:
    ns = sorted(set(int(n) for n in n_range))
    if not ns:
        raise ValueError("empty degree range")
    if r < 1:
        raise ValueError("order r must be positive")
    low = min_factor * r
    if ns[0] < max(low, 1):
        raise ValueError(f"degrees must be at least {max(low, 1)} for r={r}, got {ns[0]}")
    return ns


# ------------------------------------------------------------ main estimate


def _mp_resolved_errors(expr, w: WeightParams, N: int, dps: int):
    """``resolved_errors`` counterpart from the extended-precision energies."""
    energies = hiprec.degree_energies(expr, w, N, dps)
    errors = np.array([float(e) for e in energies.tail_errors()])
    floor = 10.0 ** (10 - dps) * math.sqrt(max(float(energies.norm_sq), 0.0))
    lost = (errors > 0) & (errors < floor)
    return np.where(lost, 0.0, errors), lost


def main_estimate_ratio(spec, w: WeightParams, r: int, n_range: Iterable[int],
                        N: Optional[int] = None, dps: Optional[int] = None) -> RatioReport:
    """``E_n(f)`` against ``n^-r sum_i E_{n-r}(d_i^r f)`` in the shifted weights.

    Requires ``n >= 3r``. With ``dps`` set, an analytic specimen's errors
    come from ``hiprec`` at that many digits instead of double precision,
    which resolves them far below ``1e-16 ||f||``.
    """
    ns = _check_range(n_range, r, 3)
    N = N if N is not None else ns[-1] + DEFAULT_EXTRA_DEGREE
    d_errors, d_lost = [], []
    if dps is not None:
        expr = getattr(spec, "expr", None)
        if expr is None:
            raise ValueError("extended precision needs a specimen with a symbolic expression")
        errors, lost = _mp_resolved_errors(expr, w, N, dps)
        for direction in (1, 2, 3):
            e, lo = _mp_resolved_errors(directional(expr, direction, r), w.shifted(direction, r), N, dps)
            d_errors.append(e)
            d_lost.append(lo)
    else:
        tab, nsq = spec.expansion(w, N)
        errors, lost = resolved_errors(tab, nsq)
        for direction in (1, 2, 3):
            dtab, dnsq = spec.derivative_expansion(direction, r, w, N)
            e, lo = resolved_errors(dtab, dnsq)
            d_errors.append(e)
            d_lost.append(lo)
    rows = []
    for n in ns:
        rhs = n ** (-r) * sum(float(e[n - r]) for e in d_errors)
        loss = bool(lost[n]) or any(bool(lo[n - r]) for lo in d_lost)
        rows.append(make_row(n, float(errors[n]), rhs, [SIGNIFICANCE] if loss else []))
    extra = {"N": N} if dps is None else {"N": N, "dps": dps}
    return RatioReport("theorem31", _params(w, r, spec.name, **extra), tuple(rows))


def corollary_ratio(spec, w: WeightParams, r: int, n_range: Iterable[int],
                    N: Optional[int] = None) -> RatioReport:
    """``E_n(f)`` against ``n^-r sum_i ||d_i^r f||`` in the shifted weights."""
    ns = _check_range(n_range, r, 3)
    N = N if N is not None else ns[-1] + DEFAULT_EXTRA_DEGREE
    tab, nsq = spec.expansion(w, N)
    errors, lost = resolved_errors(tab, nsq)
    dnorm = sum(math.sqrt(max(spec.derivative_expansion(d, r, w, N)[1], 0.0)) for d in (1, 2, 3))
    rows = [make_row(n, float(errors[n]), n ** (-r) * dnorm, [SIGNIFICANCE] if lost[n] else []) for n in ns]
    return RatioReport("corollary", _params(w, r, spec.name, N=N), tuple(rows))


# ------------------------------------------------------------ K-functionals


@dataclass(frozen=True)
class Realization:
    """Terms of the K-functionals along the partial sums ``g = S_m f``.

    ``errors[m] = ||f - S_m f||``, ``star[m] = sum_i ||d_i^r S_m f||`` in the
    shifted weights and ``classic[m] = ||(-D)^(r/2) S_m f||``, for
    ``m = 0 .. N - r``.
    """

    r: int
    errors: np.ndarray
    star: np.ndarray
    classic: np.ndarray

    @property
    def max_m(self) -> int:
        return self.errors.size - 1


def realization_curves(tab: CoeffTable, r: int, f_norm_sq: Optional[float] = None) -> Realization:
    if r < 1 or r > tab.max_degree:
        raise ValueError(f"order r={r} outside 1..{tab.max_degree}")
    M = tab.max_degree - r
    errors = tail_errors(tab, f_norm_sq)[0][:M + 1]
    star = np.zeros(M + 1)
    for direction in (1, 2, 3):
        cum = np.cumsum(project_derivative(tab, direction, r).degree_energy())
        # d^r S_m f = S_{m-r} d^r f, so degree m uses derivative rows up to m - r
        star[r:] += np.sqrt(cum[:M + 1 - r])
    lam = np.array([abs(lambda_n(m, tab.params)) ** r for m in range(M + 1)])
    classic = np.sqrt(np.cumsum(lam * tab.degree_energy()[:M + 1]))
    return Realization(r, errors, star, classic)


def _grid(curves: Realization, m_grid: Optional[Iterable[int]]) -> np.ndarray:
    if m_grid is None:
        return np.arange(curves.max_m + 1)
    grid = np.array(sorted(set(int(m) for m in m_grid)), dtype=int)
    if grid.size == 0 or grid[0] < 0 or grid[-1] > curves.max_m:
        raise ValueError(f"realization degrees must lie in 0..{curves.max_m}")
    return grid


def k_value(curves: Realization, t: float, kind: str = "star",
            m_grid: Optional[Iterable[int]] = None) -> float:
    """Minimum over the grid of ``E_m + t^r * derivative term``."""
    grid = _grid(curves, m_grid)
    deriv = curves.star if kind == "star" else curves.classic
    return float(np.min(curves.errors[grid] + t ** curves.r * deriv[grid]))


def k_star(tab: CoeffTable, r: int, t: float, m_grid: Optional[Iterable[int]] = None,
           f_norm_sq: Optional[float] = None) -> float:
    """Realized K* functional: derivative term ``sum_i ||d_i^r S_m f||``."""
    return k_value(realization_curves(tab, r, f_norm_sq), t, "star", m_grid)


def k_classic(tab: CoeffTable, r: int, t: float, m_grid: Optional[Iterable[int]] = None,
              f_norm_sq: Optional[float] = None) -> float:
    """Realized K functional: derivative term ``||(-D)^(r/2) S_m f||``."""
    return k_value(realization_curves(tab, r, f_norm_sq), t, "classic", m_grid)


def jackson_ratio(spec, w: WeightParams, r: int, n_range: Iterable[int],
                  N: Optional[int] = None) -> RatioReport:
    """``E_n(f)`` against ``K*_r(f; 1/n)``."""
    ns = _check_range(n_range, r, 0)
    N = N if N is not None else ns[-1] + r + DEFAULT_EXTRA_DEGREE
    tab, nsq = spec.expansion(w, N)
    errors, lost = resolved_errors(tab, nsq)
    curves = realization_curves(tab, r, nsq)
    rows = [make_row(n, float(errors[n]), k_value(curves, 1.0 / n), [SIGNIFICANCE] if lost[n] else [])
            for n in ns]
    return RatioReport("jackson", _params(w, r, spec.name, N=N), tuple(rows),
                       notes=("K* realized over partial sums S_m f",))


def inverse_estimate_check(spec, w: WeightParams, r: int, n_range: Iterable[int],
                           N: Optional[int] = None) -> RatioReport:
    """``K*_r(f; 1/n)`` against ``n^-r sum_{k<=n} (k+1)^(r-1) E_k(f)``."""
    ns = _check_range(n_range, r, 0)
    N = N if N is not None else ns[-1] + r + DEFAULT_EXTRA_DEGREE
    tab, nsq = spec.expansion(w, N)
    errors, _ = resolved_errors(tab, nsq)
    curves = realization_curves(tab, r, nsq)
    weights = np.arange(1, N + 2, dtype=float) ** (r - 1)
    partial = np.cumsum(weights * errors)
    rows = [make_row(n, k_value(curves, 1.0 / n), n ** (-r) * float(partial[n])) for n in ns]
    return RatioReport("inverse", _params(w, r, spec.name, N=N), tuple(rows),
                       notes=("K* realized over partial sums S_m f",))


def k_equiv_check(spec, w: WeightParams, r: int, t_grid: Iterable[float],
                  N: int = 34) -> tuple[RatioReport, RatioReport]:
    """Both sides of the K comparison over a t grid.

    Returns ``(lower, upper)``: ``lower`` has ratio ``K*/K`` and ``upper``
    has ratio ``K / (K* + t^r ||f||)``, all realized on the shared grid
    ``m = 0 .. N - r``.
    """
    ts = sorted(set(float(t) for t in t_grid))
    if not ts or ts[0] < 0:
        raise ValueError("t grid must be non-empty and non-negative")
    tab, nsq = spec.expansion(w, N)
    curves = realization_curves(tab, r, nsq)
    fnorm = math.sqrt(max(nsq, 0.0))
    lower, upper = [], []
    for t in ts:
        ks = k_value(curves, t, "star")
        kc = k_value(curves, t, "classic")
        lower.append(make_row(t, ks, kc))
        upper.append(make_row(t, kc, ks + t ** r * fnorm))
    params = _params(w, r, spec.name, N=N)
    notes = ("K and K* realized over partial sums S_m f",)
    return (RatioReport("kequiv_lower", params, tuple(lower), "t", notes),
            RatioReport("kequiv_upper", params, tuple(upper), "t", notes))


# ------------------------------------------------------------ Bernstein


def bernstein_ratio(tab: CoeffTable, r: int, direction: int, n: Optional[int] = None) -> float:
    """``||d_i^r P|| / (n^r ||P||)`` with the derivative norm in the shifted weight."""
    n = tab.max_degree if n is None else n
    if n < 1:
        return 0.0
    norm = tab.norm()
    if norm == 0 or r > tab.max_degree:
        return 0.0
    return project_derivative(tab, direction, r).norm() / (n ** r * norm)


def bernstein_sweep(w: WeightParams, r: int, direction: int, n_range: Iterable[int],
                    samples: int = 200, seed: int = 0) -> RatioReport:
    """Largest Bernstein ratio over a random-polynomial ensemble, per degree.

    Row fields: ``lhs = max ||d_i^r P|| / ||P||``, ``rhs = n^r``.
    """
    ns = _check_range(n_range, r, 0)
    rng = np.random.default_rng(seed)
    rows = []
    for n in ns:
        best = 0.0
        for _ in range(samples):
            best = max(best, bernstein_ratio(random_polynomial_table(w, n, rng), r, direction, n))
        rows.append(make_row(n, best * n ** r, float(n ** r)))
    return RatioReport("bernstein", _params(w, r, f"randpoly x{samples}", direction=direction, seed=seed),
                       tuple(rows))


# ------------------------------------------------------------ decay table


def endecay(spec, w: WeightParams, n_range: Iterable[int], N: Optional[int] = None) -> RatioReport:
    """``E_n(f)`` with ``rhs = ||f||``, so the ratio is the relative error."""
    ns = sorted(set(int(n) for n in n_range))
    if not ns or ns[0] < 0:
        raise ValueError("degree range must be non-empty and non-negative")
    N = N if N is not None else ns[-1] + DEFAULT_EXTRA_DEGREE
    tab, nsq = spec.expansion(w, N)
    errors, lost = resolved_errors(tab, nsq)
    fnorm = math.sqrt(max(nsq, 0.0))
    rows = [make_row(n, float(errors[n]), fnorm, [SIGNIFICANCE] if lost[n] else []) for n in ns]
    return RatioReport("endecay", _params(w, 0, spec.name, N=N), tuple(rows))
