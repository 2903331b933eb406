"""Dual evaluation of research measures on discrete instances.

The reference measure is uniform on (0, N].  A dual density Z is a
nonnegative piecewise-constant journal weight with unit mass under that
measure; E[ZX] is then a weighted average of the author's citations.
For a performance family {f_q}, gamma(Z, q) = E[Z f_q] is the smallest
weighted average needed to certify level q, its right inverse
H+(Z, t) = sup{q : gamma(Z, q) <= t} is the best level reachable with
average t under the weighting Z, and min over densities of
H+(Z, E[ZX]) upper-bounds the primal index.

Two integration semantics are provided.  The default integrates the
true curves f_q, which is what the constructed minimizing densities
are tuned to (their dual values close onto the primal index).  With
``rank_step=True`` the integrand is the rank-sampled step version of
f_q (constant on each publication-rank interval, equal to f_q at the
rank).  That is the exact dual counterpart of the engine's integer-rank
dominance check: whenever the curve dominates f_q at the checked ranks
it dominates the step version everywhere mass can sit, so weak duality
against the engine's index holds with the rank-step transform for every
density supported on the dominance domain, while with the true curves
it can fail for the staircase and power shapes (whose rank samples sit
strictly below the curve on the interior of rank intervals).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .curves import (
    AUTHOR_SUPPORT_ONLY,
    POWER,
    RECTANGLE,
    STAIRCASE,
    CitationCurve,
    PerformanceFamily,
    checked_number,
)
from .engine import DominancePolicy, IndexSpec, parse_index, srm_closed_form, srm_generic
from .errors import TableEntryError, UnknownIndexError, ValidationError

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class ReferenceMeasure:
    """Uniform probability measure on (0, extent]."""

    extent: float

    def __post_init__(self):
        extent = checked_number(self.extent, "measure extent")
        if extent == 0.0:
            raise ValidationError("measure extent must be strictly positive")
        object.__setattr__(self, "extent", extent)


@dataclass(frozen=True)
class DualDensity:
    """Nonnegative piecewise-constant density with unit mass.

    ``heights[j]`` is the density value on the half-open cell
    (breakpoints[j], breakpoints[j+1]]; breakpoints run from 0 to the
    measure extent.  Unit mass means (1/N) * sum(height * length) = 1.
    """

    breakpoints: Tuple[float, ...]
    heights: Tuple[float, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        hs = tuple(float(h) for h in self.heights)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "heights", hs)
        if len(bp) < 2 or len(hs) != len(bp) - 1:
            raise ValidationError("need k+1 breakpoints for k cells")
        if bp[0] != 0.0:
            raise ValidationError("breakpoints must start at 0")
        if not all(math.isfinite(b) for b in bp) or any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must be finite and strictly increasing")
        if not all(math.isfinite(h) and h >= 0 for h in hs):
            raise ValidationError("density heights must be finite and >= 0")
        n = bp[-1]
        mass = sum(h * (b2 - b1) for h, b1, b2 in zip(hs, bp, bp[1:])) / n
        if abs(mass - 1.0) > _MASS_TOL:
            raise ValidationError(f"density mass is {mass!r}, must equal 1")
        object.__setattr__(self, "_hash", hash((bp, hs)))

    def __hash__(self):
        return self._hash

    @property
    def extent(self) -> float:
        return self.breakpoints[-1]

    @classmethod
    def indicator(cls, lo: float, hi: float, extent: float) -> "DualDensity":
        """Normalized indicator density on the cell (lo, hi]."""
        if not (0 <= lo < hi <= extent):
            raise ValidationError(f"need 0 <= lo < hi <= extent, got ({lo}, {hi}] in (0, {extent}]")
        height = extent / (hi - lo)
        pts = [0.0, lo, hi, extent]
        bp, hs = [0.0], []
        for b in pts[1:]:
            if b > bp[-1]:
                hs.append(height if bp[-1] >= lo and b <= hi else 0.0)
                bp.append(b)
        return cls(tuple(bp), tuple(hs))

    @classmethod
    def from_weights(cls, weights: Sequence[float], extent: float) -> "DualDensity":
        """Density proportional to ``weights`` on unit cells (i-1, i]."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("weights must be a nonempty one-dimensional sequence")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("weights must be finite and >= 0")
        if w.size > extent:
            raise ValidationError("more weight cells than the measure extent allows")
        total = float(w.sum())
        if total <= 0:
            raise ValidationError("weights must have positive total")
        bp = [float(i) for i in range(w.size + 1)]
        hs = [extent * float(x) / total for x in w]
        if extent > w.size:
            bp.append(float(extent))
            hs.append(0.0)
        return cls(tuple(bp), tuple(hs))

    def refined(self, points: Iterable[float]) -> "DualDensity":
        """The same density with extra breakpoints inserted."""
        bp = list(self.breakpoints)
        hs = list(self.heights)
        for y in sorted(set(float(p) for p in points)):
            if y <= 0 or y >= self.extent or y in bp:
                continue
            j = next(i for i in range(len(bp) - 1) if bp[i] < y < bp[i + 1])
            bp.insert(j + 1, y)
            hs.insert(j, hs[j])
        return DualDensity(tuple(bp), tuple(hs))


@lru_cache(maxsize=4096)
def _cums(z: DualDensity):
    """Knot grid with cumulative mass and first-moment integrals."""
    bp = np.array(z.breakpoints)
    hs = np.array(z.heights)
    n = z.extent
    dm = hs * np.diff(bp) / n
    dv = hs * (bp[1:] ** 2 - bp[:-1] ** 2) / (2.0 * n)
    cum_m = np.concatenate([[0.0], np.cumsum(dm)])
    cum_v = np.concatenate([[0.0], np.cumsum(dv)])
    for a in (bp, hs, cum_m, cum_v):
        a.setflags(write=False)
    return bp, hs, cum_m, cum_v


def _mass_at(z: DualDensity, ys) -> np.ndarray:
    """(1/N) * integral of Z over (0, y] for each y (exact)."""
    bp, hs, cum_m, _ = _cums(z)
    y = np.clip(np.asarray(ys, dtype=float), 0.0, z.extent)
    idx = np.clip(np.searchsorted(bp, y, side="left"), 1, len(bp) - 1)
    return cum_m[idx - 1] + hs[idx - 1] * (y - bp[idx - 1]) / z.extent


def _moment_at(z: DualDensity, ys) -> np.ndarray:
    """(1/N) * integral of x*Z(x) over (0, y] for each y (exact)."""
    bp, hs, _, cum_v = _cums(z)
    y = np.clip(np.asarray(ys, dtype=float), 0.0, z.extent)
    idx = np.clip(np.searchsorted(bp, y, side="left"), 1, len(bp) - 1)
    j = idx - 1
    return cum_v[j] + hs[j] * (y * y - bp[j] ** 2) / (2.0 * z.extent)


def _total_mass(z: DualDensity) -> float:
    return float(_cums(z)[2][-1])


def _power_coeff(z: DualDensity, beta: float) -> float:
    """(1/N) * integral of x**(-beta) * Z(x) over (0, N]; inf if divergent."""
    bp, hs, _, _ = _cums(z)
    n = z.extent
    total = 0.0
    for a, b, h in zip(bp[:-1], bp[1:], hs):
        if h == 0.0:
            continue
        if a == 0.0 and beta >= 1.0:
            return math.inf
        if beta == 1.0:
            total += h * math.log(b / a) / n
        else:
            total += h * (b ** (1.0 - beta) - a ** (1.0 - beta)) / ((1.0 - beta) * n)
    return total


@lru_cache(maxsize=4096)
def _rank_cums(z: DualDensity):
    """Cumulative Z-mass and rank-weighted mass over unit rank cells."""
    k = int(math.ceil(z.extent))
    edges = np.minimum(np.arange(0, k + 1, dtype=float), z.extent)
    cum = np.asarray(_mass_at(z, edges[1:]))
    masses = np.diff(np.concatenate([[0.0], cum]))
    cum_m = np.concatenate([[0.0], np.cumsum(masses)])
    cum_im = np.concatenate([[0.0], np.cumsum(masses * np.arange(1, k + 1))])
    cum_m.setflags(write=False)
    cum_im.setflags(write=False)
    masses.setflags(write=False)
    return masses, cum_m, cum_im


def _check_measure(z: DualDensity, measure: ReferenceMeasure) -> None:
    if z.extent != measure.extent:
        raise ValidationError(
            f"density extent {z.extent} does not match measure extent {measure.extent}"
        )


def expected_value(z: DualDensity, curve: CitationCurve, measure: ReferenceMeasure) -> float:
    """E[Z X]: exact integral of the weighted citation curve.

    The curve is constant on unit rank cells, so the integral is the
    dot product of its values with the density's rank-cell masses (the
    tail weighting whatever mass lies past the record).
    """
    _check_measure(z, measure)
    if curve.p > measure.extent:
        raise ValidationError(
            f"curve has {curve.p} publications but the measure extends only to {measure.extent}"
        )
    masses, cum_m, _ = _rank_cums(z)
    if curve.p == 0:
        return curve.tail * float(cum_m[-1])
    out = float(np.dot(curve.values, masses[: curve.p]))
    if curve.tail:
        out += curve.tail * float(cum_m[-1] - cum_m[curve.p])
    return out


def gamma(
    z: DualDensity,
    q: float,
    family: PerformanceFamily,
    measure: ReferenceMeasure,
    rank_step: bool = False,
) -> float:
    """E[Z f_q], the smallest Z-average of citations certifying level q.

    Exact closed-form integration per shape; a divergent power-shape
    integral (beta >= 1 with mass touching 0) is reported as +inf.
    With ``rank_step=True`` the integrand is f_q sampled at publication
    ranks, held constant on each rank interval.
    """
    _check_measure(z, measure)
    if not (q >= 0):
        raise ValidationError(f"performance level must be >= 0, got {q!r}")
    if q == 0:
        return 0.0
    n = measure.extent
    if rank_step:
        masses, cum_m, cum_im = _rank_cums(z)
        k = len(masses)
        if family.shape == RECTANGLE:
            kk = min(int(math.floor(family.width.value(q))), k)
            return family.height.value(q) * float(cum_m[kk])
        if family.shape == STAIRCASE:
            kk = min(int(math.floor(q)), k)
            return (q + 1.0) * float(cum_m[kk]) - float(cum_im[kk])
        return q * float(np.dot(masses, np.arange(1, k + 1, dtype=float) ** (-family.beta)))
    if family.shape == RECTANGLE:
        w = min(family.width.value(q), n)
        return family.height.value(q) * float(_mass_at(z, w))
    if family.shape == STAIRCASE:
        m = min(q, n)
        return (q + 1.0) * float(_mass_at(z, m)) - float(_moment_at(z, m))
    coeff = _power_coeff(z, family.beta)
    return math.inf if math.isinf(coeff) else q * coeff


def _mass_inverse_sup(z: DualDensity, tau: float) -> float:
    """sup{y in [0, N] : mass(y) <= tau}; inf when mass never exceeds tau."""
    if tau < 0:
        return 0.0
    bp, hs, cum_m, _ = _cums(z)
    if cum_m[-1] <= tau:
        return math.inf
    j = int(np.searchsorted(cum_m, tau, side="right")) - 1
    return float(bp[j] + (tau - cum_m[j]) * z.extent / hs[j])


def _solve_increasing(fn, lo: float, hi: float) -> float:
    """Largest feasible point of a nondecreasing predicate fn(q) <= t form.

    fn returns gamma(q) - t; fn(lo) <= 0 < fn(hi).  Bisection to float
    resolution.
    """
    while hi - lo > 0:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def _h_plus_true(z: DualDensity, t: float, family: PerformanceFamily, n: float) -> float:
    bp, hs, cum_m, cum_v = _cums(z)
    total = cum_m[-1]
    if family.shape == POWER:
        coeff = _power_coeff(z, family.beta)
        if math.isinf(coeff):
            return 0.0
        return t / coeff
    if family.shape == RECTANGLE:
        h_rule, w_rule = family.height, family.width
        if w_rule.kind == "const":
            m = float(_mass_at(z, min(w_rule.coeff, n)))
            if h_rule.kind == "const":
                return math.inf if h_rule.coeff * m <= t else 0.0
            if m == 0.0:
                return math.inf
            return h_rule.inverse_sup(t / m)
        b = w_rule.coeff
        if h_rule.kind == "const":
            c = h_rule.coeff
            if c == 0.0:
                return math.inf
            tau = t / c
            if total <= tau:
                return math.inf
            return _mass_inverse_sup(z, tau) / b
        # increasing height, widening support: walk the density knots
        knots = [float(y) / b for y in bp]
        for j in range(len(knots) - 1):
            q0, q1 = knots[j], knots[j + 1]
            g1 = h_rule.value(q1) * float(cum_m[j + 1])
            if g1 <= t:
                continue
            m0 = float(cum_m[j])
            slope = hs[j] * b / n
            if h_rule.kind == "linear":
                a = h_rule.coeff
                qa, qb = a * slope, a * (m0 - slope * q0)
                if qa == 0.0:
                    q = q1 if qb == 0.0 else t / qb
                else:
                    q = (-qb + math.sqrt(max(qb * qb + 4.0 * qa * t, 0.0))) / (2.0 * qa)
                return min(max(q, q0), q1)
            a = h_rule.coeff

            def resid(q, _a=a, _m0=m0, _s=slope, _q0=q0):
                return _a * q * q * (_m0 + _s * (q - _q0)) - t

            return _solve_increasing(resid, q0, q1)
        # feasible through the last knot: only the height keeps growing
        return h_rule.inverse_sup(t / total)
    # staircase
    for j in range(len(bp) - 1):
        y0, y1 = float(bp[j]), float(bp[j + 1])
        g1 = (y1 + 1.0) * float(cum_m[j + 1]) - float(cum_v[j + 1])
        if g1 <= t:
            continue
        m0, v0 = float(cum_m[j]), float(cum_v[j])
        s = hs[j] / n
        qa = 0.5 * s
        qb = m0 + s * (1.0 - y0)
        qc = m0 - s * y0 - v0 + 0.5 * s * y0 * y0 - t
        if qa == 0.0:
            q = y1 if qb == 0.0 else -qc / qb
        else:
            q = (-qb + math.sqrt(max(qb * qb - 4.0 * qa * qc, 0.0))) / (2.0 * qa)
        return min(max(q, y0), y1)
    return (t + float(cum_v[-1])) / total - 1.0


def _h_plus_rank(z: DualDensity, t: float, family: PerformanceFamily) -> float:
    masses, cum_m, cum_im = _rank_cums(z)
    k = len(masses)
    if family.shape == POWER:
        coeff = float(np.dot(masses, np.arange(1, k + 1, dtype=float) ** (-family.beta)))
        if coeff <= 0.0:
            return math.inf
        return t / coeff
    if family.shape == RECTANGLE:
        h_rule, w_rule = family.height, family.width
        if w_rule.kind == "const":
            kk = min(int(math.floor(w_rule.coeff)), k)
            m = float(cum_m[kk])
            if h_rule.kind == "const":
                return math.inf if h_rule.coeff * m <= t else 0.0
            if m == 0.0:
                return math.inf
            return h_rule.inverse_sup(t / m)
        b = w_rule.coeff
        if h_rule.kind == "const":
            c = h_rule.coeff
            if c == 0.0:
                return math.inf
            tau = t / c
            if float(cum_m[k]) <= tau:
                return math.inf
            j = int(np.searchsorted(cum_m, tau, side="right")) - 1
            return (j + 1.0) / b
        grid = np.arange(k + 1, dtype=float) / b
        hv = h_rule.coeff * (grid if h_rule.kind == "linear" else grid * grid)
        starts = hv * cum_m
        j = int(np.searchsorted(starts, t, side="right")) - 1
        if j >= k:
            return h_rule.inverse_sup(t / float(cum_m[k]))
        c = float(cum_m[j])
        if c == 0.0:
            return (j + 1.0) / b
        return min(h_rule.inverse_sup(t / c), (j + 1.0) / b)
    # staircase
    starts = (np.arange(0, k + 1, dtype=float) + 1.0) * cum_m - cum_im
    j = int(np.searchsorted(starts, t, side="right")) - 1
    if j >= k:
        return (t + float(cum_im[k])) / float(cum_m[k]) - 1.0
    c = float(cum_m[j])
    if c == 0.0:
        return j + 1.0
    return min(j + 1.0, (t + float(cum_im[j])) / c - 1.0)


def h_plus(
    z: DualDensity,
    t: float,
    family: PerformanceFamily,
    measure: ReferenceMeasure,
    rank_step: bool = False,
) -> float:
    """sup{q >= 0 : gamma(Z, q) <= t}, the right inverse of gamma.

    The supremum runs over real q regardless of the family's own level
    set, gamma being nondecreasing in q.  Piecewise closed forms make
    the knot-exact cases (constant-height saturation, indicator
    densities) land exactly; in-segment crossings solve a linear or
    quadratic equation, with monotone bisection for the one cubic case.
    Returns +inf when gamma stays below t for every level (feasibility
    certified by saturation of the mass term), and 0 when no positive
    level is feasible.
    """
    _check_measure(z, measure)
    if math.isnan(t):
        raise ValidationError("threshold must not be NaN")
    if t < 0:
        return 0.0
    if rank_step:
        out = _h_plus_rank(z, t, family)
    else:
        out = _h_plus_true(z, t, family, measure.extent)
    return max(out, 0.0)


def dual_value(
    curve: CitationCurve,
    family: PerformanceFamily,
    candidates: Sequence[DualDensity],
    measure: ReferenceMeasure,
) -> float:
    """min over candidate densities of H+(Z, E[ZX]).

    An upper bound on the infimum over all densities; it closes onto
    the primal index exactly when a minimizing density is among the
    candidates.
    """
    if not candidates:
        raise ValidationError("need at least one candidate density")
    return min(
        h_plus(z, expected_value(z, curve, measure), family, measure) for z in candidates
    )


@lru_cache(maxsize=65536)
def _primal_level(
    curve: CitationCurve, family: PerformanceFamily, policy: Optional[DominancePolicy]
) -> float:
    return srm_generic(curve, family, policy).level


def weak_duality_margin(
    curve: CitationCurve,
    family: PerformanceFamily,
    z: DualDensity,
    measure: ReferenceMeasure,
    policy: Optional[DominancePolicy] = None,
) -> float:
    """H+(Z, E[ZX]) - srm_generic(X), in the rank-step dual semantics.

    Nonnegative for every density supported on the dominance domain of
    the family's policy: rank dominance at the engine's level means the
    curve sits above the rank-step f_q wherever such a density has
    mass, so E[ZX] >= gamma(Z, q) there.  Both sides +inf count as a
    zero margin.
    """
    t = expected_value(z, curve, measure)
    hp = h_plus(z, t, family, measure, rank_step=True)
    phi = _primal_level(curve, family, policy)
    if math.isinf(hp) and math.isinf(phi):
        return 0.0
    return hp - phi


def constructed_minimizer(
    index: Union[str, IndexSpec],
    curve: CitationCurve,
    delta: float,
    measure: ReferenceMeasure,
) -> DualDensity:
    """The known minimizing density for c_max, pubs or h.

    c_max: the normalized indicator of (0, 1] (the only weighted
    publication); pubs: of (p, p+delta] (mass just past the record,
    where the curve vanishes); h: of (h, h+delta] (mass just past the
    h-core, where the curve first drops below the level).
    """
    spec = parse_index(index)
    if spec.name not in ("c_max", "pubs", "h"):
        raise UnknownIndexError(
            f"no constructed minimizer for index {spec.name!r}; supported: c_max, pubs, h"
        )
    n = measure.extent
    if spec.name == "c_max":
        if n < 1:
            raise ValidationError("measure extent must be at least 1")
        return DualDensity.indicator(0.0, 1.0, n)
    if not (delta > 0):
        raise ValidationError("delta must be positive")
    anchor = curve.p if spec.name == "pubs" else srm_closed_form(curve, "h").level
    if anchor + delta > n:
        raise ValidationError(
            f"interval ({anchor:g}, {anchor + delta:g}] exceeds the measure extent {n:g}"
        )
    return DualDensity.indicator(float(anchor), float(anchor) + delta, n)


def unit_cell_candidates(measure: ReferenceMeasure, upto: Optional[float] = None) -> list:
    """Normalized indicators of the unit cells (i-1, i]."""
    k = int(math.floor(min(upto, measure.extent) if upto is not None else measure.extent))
    return [DualDensity.indicator(i - 1.0, float(i), measure.extent) for i in range(1, k + 1)]


def random_simplex_candidates(
    measure: ReferenceMeasure,
    count: int,
    seed: int,
    upto: Optional[float] = None,
) -> list:
    """Seeded random unit-mass densities on the unit cells (0, upto]."""
    k = int(math.floor(min(upto, measure.extent) if upto is not None else measure.extent))
    if k < 1:
        raise ValidationError("need at least one whole cell to sample densities")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        out.append(DualDensity.from_weights(rng.dirichlet(np.ones(k)), measure.extent))
    return out


def default_candidates(
    curve: CitationCurve,
    measure: ReferenceMeasure,
    deltas: Sequence[float] = (0.5,),
    samples: int = 20,
    seed: int = 0,
) -> list:
    """Unit-cell indicators, the constructed minimizers, random draws."""
    out = unit_cell_candidates(measure)
    out.append(constructed_minimizer("c_max", curve, 0.0, measure))
    for d in deltas:
        for name in ("pubs", "h"):
            anchor = curve.p if name == "pubs" else srm_closed_form(curve, "h").level
            if anchor + d <= measure.extent:
                out.append(constructed_minimizer(name, curve, d, measure))
    if samples > 0:
        out.extend(random_simplex_candidates(measure, samples, seed))
    return out


# ---------------------------------------------------------------------------
# dual-first construction from an exogenous journal-weight table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaTable:
    """Level thresholds gamma_beta(Q) per candidate weighting Q.

    ``columns[cid][i]`` is the smallest Q-average of citations needed
    to reach quality level ``betas[i]`` under the weighting named
    ``cid``.  Each column must be nondecreasing in beta.
    """

    betas: Tuple[float, ...]
    columns: Dict[str, Tuple[float, ...]]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        object.__setattr__(self, "betas", betas)
        if not betas or any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValidationError("beta grid must be nonempty and strictly increasing")
        cols = {}
        for cid, col in self.columns.items():
            col = tuple(float(v) for v in col)
            if len(col) != len(betas):
                raise TableEntryError(
                    f"candidate {cid!r} covers {len(col)} levels, expected {len(betas)}"
                )
            if any(math.isnan(v) or v < 0 for v in col):
                raise ValidationError(f"gamma values for {cid!r} must be >= 0 (or +inf)")
            if any(b > a for a, b in zip(col[1:], col)):
                raise ValidationError(f"gamma column for {cid!r} must be nondecreasing in beta")
            cols[cid] = col
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[str, float, float]]) -> "GammaTable":
        by_candidate: Dict[str, Dict[float, float]] = {}
        betas = set()
        for cid, beta, value in rows:
            beta = float(beta)
            betas.add(beta)
            by_candidate.setdefault(str(cid), {})[beta] = float(value)
        if not by_candidate:
            raise ValidationError("gamma table has no rows")
        grid = tuple(sorted(betas))
        columns = {}
        for cid, entries in by_candidate.items():
            col = []
            for beta in grid:
                if beta not in entries:
                    raise TableEntryError(f"candidate {cid!r} missing gamma at beta {beta:g}")
                col.append(entries[beta])
            columns[cid] = tuple(col)
        return cls(grid, columns)

    @classmethod
    def from_csv(cls, data: Union[str, bytes]) -> "GammaTable":
        """Parse rows of candidate_id,beta,gamma (header required)."""
        text = data.decode("utf-8") if isinstance(data, bytes) else data
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("gamma table CSV is empty") from None
        if [c.strip() for c in header] != ["candidate_id", "beta", "gamma"]:
            raise ValidationError("gamma table CSV must start with header candidate_id,beta,gamma")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                rows.append((row[0], float(row[1]), float(row[2])))
            except ValueError:
                raise ValidationError(f"line {lineno}: beta and gamma must be numbers") from None
        return cls.from_rows(rows)


def robust_dual_srm(
    curve: CitationCurve,
    table: GammaTable,
    candidates: Mapping[str, DualDensity],
    measure: ReferenceMeasure,
) -> float:
    """Prudential index from an exogenous journal-weight table.

    For each candidate weighting Q: the largest grid level beta with
    E_Q[X] >= gamma_beta(Q) (-inf when no level is reachable), then the
    minimum across candidates.  The construction is monotone and
    quasi-concave in the citation record by design.
    """
    if not candidates:
        raise ValidationError("need at least one candidate weighting")
    result = math.inf
    for cid in candidates:
        if cid not in table.columns:
            raise TableEntryError(f"candidate {cid!r} has no gamma column in the table")
    for cid, z in candidates.items():
        t = expected_value(z, curve, measure)
        col = np.asarray(table.columns[cid])
        j = int(np.searchsorted(col, t, side="right")) - 1
        value = -math.inf if j < 0 else table.betas[j]
        result = min(result, value)
    return result
