"""Perturbation sweeps: per-k validity intervals, coexistence counts, scaling ratios.

For a one-parameter family through a multistability point, each x^k y cycle
is admissible and attracting on an interval of eps emanating from 0.  The
engine locates the right endpoint of every interval by a geometric grid scan
plus bisection, counts coexisting attracting cycles kappa(eps), extracts the
supremum values eps_K, and forms the ratio tables exposing the two scaling
laws (multiplier-reciprocal decay near the homoclinic scenario, inverse
square decay near the repeated-unit-eigenvalue scenario).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from .core import (
    Params,
    StabilityClass,
    UnitEigenvalueError,
    classify_det_trace,
    compose_family_word,
    solve_cycle,
    word_determinant,
    _points_cyclic,
)
from .linalg import affine_apply, mat_trace
from .core import half_map
from .words import Word, family_word


class Scenario(str, Enum):
    CODIM3 = "codim3"
    CODIM4 = "codim4"


DEFAULT_EPS_STAR = {Scenario.CODIM3: 0.5, Scenario.CODIM4: 0.2}
EPS_FLOOR = 1e-12
GRID_PER_DECADE = 64
_DIRECT_NORM_CAP = 1e3


@dataclass(frozen=True)
class Family:
    """A linear one-parameter path through parameter space, with its words."""

    base: Params
    direction: tuple[float, float, float, float]
    x: Word
    y: Word

    @property
    def mu(self) -> float:
        return self.base.mu


def family_params(fam: Family, eps: float) -> Params:
    a, b, c, d = fam.direction
    base = fam.base
    return Params(
        tauL=base.tauL + a * eps,
        deltaL=base.deltaL + b * eps,
        tauR=base.tauR + c * eps,
        deltaR=base.deltaR + d * eps,
        mu=base.mu,
    )


@dataclass(frozen=True)
class Event:
    kind: str  # border-collision | stability-loss | never-valid | right-censored
    index: int | None = None
    detail: str | None = None


@dataclass(frozen=True)
class KInterval:
    k: int
    eps_hi: float
    event: Event
    eps_lo: float = 0.0
    anomaly: bool = False


@dataclass
class BoundProbe:
    k: int
    eps: float
    margin: float
    virtual: bool


@dataclass
class BoundCheck:
    scenario: Scenario
    bound: float
    entries: list[tuple[int, float, float]]  # (k, eps_hi, scaled value)
    c1: float
    passed: bool
    virtual_probes: list[BoundProbe] = field(default_factory=list)


@dataclass
class SweepResult:
    k_max: int
    eps_star: float
    scenario: Scenario
    intervals: list[KInterval]
    eps_k: list[float]  # eps_k[K-1] = K-th largest right endpoint
    ratios: list[tuple[int, float]]
    kappa_samples: list[tuple[float, int]]
    anomalies: list[int]

    def interval(self, k: int) -> KInterval:
        return self.intervals[k - 1]


def _cycle_ok(p: Params, x: Word, k: int, y: Word, word: Word) -> bool:
    """Strictly admissible and attracting, with a unique cycle.

    Attractivity is the literal strict inequalities, with no tolerance band:
    the intervals emanate from eps = 0 where the inequalities degenerate, so
    a padded test would carve a spurious left edge of width tol/k^2.
    """
    try:
        f = compose_family_word(p, x, k, y)
    except (OverflowError, ValueError):
        return False
    tr = mat_trace(f.m)
    det = word_determinant(p, word)
    if not (math.isfinite(tr) and math.isfinite(det)):
        return False
    if not (det - tr + 1.0 > 0.0 and det + tr + 1.0 > 0.0 and det < 1.0):
        return False
    norm = max(abs(e) for e in f.m)
    det_im = 1.0 - tr + det
    if abs(det_im) <= 1e-10 * (1.0 + norm):
        return False
    if norm <= _DIRECT_NORM_CAP:
        px = (f.t[0] * (1.0 - f.m[3]) + f.m[1] * f.t[1]) / det_im
        py = ((1.0 - f.m[0]) * f.t[1] + f.m[2] * f.t[0]) / det_im
        maps = {s: half_map(p, s) for s in "LR"}
        for s in word:
            if (px if s == "R" else -px) <= 0.0:
                return False
            px, py = affine_apply(maps[s], (px, py))
        return True
    pts = _points_cyclic(p, word)
    return all((pt[0] if s == "R" else -pt[0]) > 0.0 for s, pt in zip(word, pts))


def _boundary_event(p: Params, x: Word, k: int, y: Word, word: Word) -> Event:
    try:
        cyc = solve_cycle(p, word, family=(x, k, y))
    except UnitEigenvalueError:
        return Event("stability-loss", detail="saddle-node")
    if cyc.margin <= 0.0:
        worst = min(range(len(cyc.margins)), key=cyc.margins.__getitem__)
        return Event("border-collision", index=worst)
    det, tr = cyc.det, cyc.trace
    tests = [
        ("saddle-node", det - tr + 1.0),
        ("period-doubling", det + tr + 1.0),
        ("neimark-sacker", 1.0 - det),
    ]
    name, _ = min(tests, key=lambda item: item[1])
    return Event("stability-loss", detail=name)


def _grid(eps_star: float) -> list[float]:
    n = max(1, math.ceil(GRID_PER_DECADE * math.log10(eps_star / EPS_FLOOR)))
    return [eps_star * 10.0 ** (-(n - i) / GRID_PER_DECADE) for i in range(n + 1)]


def k_interval(fam: Family, k: int, eps_star: float, tol: float = 1e-10) -> KInterval:
    """Right endpoint of the eps-interval on which the x^k y cycle is valid.

    Scans a geometric grid over (EPS_FLOOR, eps_star] for the first failure
    of (admissible and attracting), then bisects to relative ``tol``.  The
    recorded event is the binding constraint just past the endpoint.  A unit
    eigenvalue at a probe counts as a failure there, so the bisection steps
    around it.
    """
    word = family_word(fam.x, k, fam.y)

    def ok(eps: float) -> bool:
        return _cycle_ok(family_params(fam, eps), fam.x, k, fam.y, word)

    grid = _grid(eps_star)
    anomaly = False
    eps_lo = 0.0
    start = 0
    if not ok(grid[0]):
        found = None
        for i in range(1, len(grid)):
            if ok(grid[i]):
                found = i
                break
        if found is None:
            return KInterval(k, 0.0, Event("never-valid"))
        # validity does not reach down to eps -> 0+: resolve the left edge too
        anomaly = True
        lo_bad, lo_good = grid[found - 1], grid[found]
        for _ in range(200):
            mid = 0.5 * (lo_bad + lo_good)
            if ok(mid):
                lo_good = mid
            else:
                lo_bad = mid
            if lo_good - lo_bad <= tol * lo_good:
                break
        eps_lo = lo_good
        start = found

    if ok(grid[-1]):
        return KInterval(k, grid[-1], Event("right-censored"), eps_lo, anomaly)

    # exponential search upward from the last known-good grid index
    lo_i = start
    step = 1
    while lo_i + step < len(grid) and ok(grid[lo_i + step]):
        lo_i += step
        step *= 2
    hi_i = min(lo_i + step, len(grid) - 1)
    # binary search on the grid between lo_i (good) and hi_i (bad)
    while hi_i - lo_i > 1:
        mid_i = (lo_i + hi_i) // 2
        if ok(grid[mid_i]):
            lo_i = mid_i
        else:
            hi_i = mid_i
    lo, hi = grid[lo_i], grid[hi_i]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * lo:
            break
    event = _boundary_event(family_params(fam, hi), fam.x, k, fam.y, word)
    return KInterval(k, lo, event, eps_lo, anomaly)


def _interval_task(args) -> KInterval:
    fam, k, eps_star, tol = args
    return k_interval(fam, k, eps_star, tol)


def run_sweep(
    fam: Family,
    k_max: int,
    eps_star: float | None = None,
    tol: float = 1e-10,
    scenario: Scenario = Scenario.CODIM3,
    workers: int = 1,
) -> SweepResult:
    """Intervals for k = 1..k_max plus eps_K, ratio table and kappa samples.

    eps_K is the K-th largest right endpoint; with every interval emanating
    from eps = 0 this equals the supremum eps with exactly K coexisting
    admissible attracting cycles.  Intervals that fail the interior re-check
    (8 points) or persist past 1.01x their endpoint are flagged as anomalies
    rather than trusted.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    scenario = Scenario(scenario)
    if eps_star is None:
        eps_star = DEFAULT_EPS_STAR[scenario]
    tasks = [(fam, k, eps_star, tol) for k in range(1, k_max + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            intervals = list(pool.map(_interval_task, tasks, chunksize=8))
    else:
        intervals = [_interval_task(t) for t in tasks]

    anomalies = [iv.k for iv in intervals if iv.anomaly]
    for iv in intervals:
        if iv.eps_hi <= 0.0 or iv.k in anomalies:
            continue
        word = family_word(fam.x, iv.k, fam.y)

        def ok(eps: float) -> bool:
            return _cycle_ok(family_params(fam, eps), fam.x, iv.k, fam.y, word)

        interior_ok = all(ok(iv.eps_hi * 0.5**j) for j in range(1, 9))
        beyond = 1.01 * iv.eps_hi
        beyond_ok = True
        if iv.event.kind != "right-censored" and beyond <= eps_star:
            beyond_ok = not ok(beyond)
        if not (interior_ok and beyond_ok):
            anomalies.append(iv.k)

    eps_k = sorted((iv.eps_hi for iv in intervals if iv.eps_hi > 0.0), reverse=True)
    ratios: list[tuple[int, float]] = []
    if scenario is Scenario.CODIM3:
        for idx in range(len(eps_k) - 1):
            ratios.append((idx + 1, eps_k[idx + 1] / eps_k[idx]))
    else:
        for big_k in range(1, len(eps_k) // 2 + 1):
            ratios.append((big_k, eps_k[2 * big_k - 1] / eps_k[big_k - 1]))

    kappa_samples: list[tuple[float, int]] = []
    for idx in range(len(eps_k)):
        below = eps_k[idx + 1] if idx + 1 < len(eps_k) else max(EPS_FLOOR, eps_k[idx] * 1e-2)
        if below >= eps_k[idx]:
            continue
        probe = math.sqrt(below * eps_k[idx])
        kappa_samples.append((probe, sum(1 for e in eps_k if e > probe)))

    return SweepResult(
        k_max=k_max,
        eps_star=eps_star,
        scenario=scenario,
        intervals=intervals,
        eps_k=eps_k,
        ratios=ratios,
        kappa_samples=kappa_samples,
        anomalies=sorted(set(anomalies)),
    )


def kappa_at(fam: Family, eps: float, k_max: int) -> list[int]:
    """Direct classification: the k <= k_max whose cycle is valid at eps."""
    out = []
    for k in range(1, k_max + 1):
        word = family_word(fam.x, k, fam.y)
        if _cycle_ok(family_params(fam, eps), fam.x, k, fam.y, word):
            out.append(k)
    return out


def bound_check(
    fam: Family,
    scenario: Scenario,
    k_lo: int,
    k_hi: int,
    result: SweepResult | None = None,
    eps_star: float | None = None,
    tol: float = 1e-10,
    probe_count: int = 3,
) -> BoundCheck:
    """Bracket the scaled endpoints against the scenario's analytic ceiling.

    Homoclinic scenario: eps_hi(k) * lambda2^k must stay in (0, 3/|gamma22'|].
    Repeated-unit-eigenvalue scenario: eps_hi(k) * k^2 must stay in
    (0, 4*pi^2/(alpha-beta)], and slightly above that ceiling the cycle must
    already be virtual.
    """
    from .codim3 import eigen_basis, gamma22_prime
    from .codim4 import alpha_beta

    scenario = Scenario(scenario)
    if eps_star is None:
        eps_star = DEFAULT_EPS_STAR[scenario]

    def endpoint(k: int) -> float:
        if result is not None and k <= result.k_max:
            return result.interval(k).eps_hi
        return k_interval(fam, k, eps_star, tol).eps_hi

    entries = []
    probes: list[BoundProbe] = []
    if scenario is Scenario.CODIM3:
        lam2 = eigen_basis(fam.base, fam.x).lambda2
        bound = 3.0 / abs(gamma22_prime(fam))
        for k in range(k_lo, k_hi + 1):
            e = endpoint(k)
            entries.append((k, e, e * lam2**k))
    else:
        alpha, beta = alpha_beta(fam)
        bound = 4.0 * math.pi**2 / (alpha - beta)
        for k in range(k_lo, k_hi + 1):
            e = endpoint(k)
            entries.append((k, e, e * k * k))
        step = max(1, (k_hi - k_lo) // max(1, probe_count - 1))
        for k in range(k_lo, k_hi + 1, step):
            eps_probe = 1.05 * bound / (k * k)
            word = family_word(fam.x, k, fam.y)
            try:
                cyc = solve_cycle(family_params(fam, eps_probe), word, family=(fam.x, k, fam.y))
                m = cyc.margin
            except UnitEigenvalueError:
                m = math.nan
            probes.append(BoundProbe(k, eps_probe, m, m < 0.0))

    scaled = [v for _, _, v in entries]
    c1 = min(scaled) if scaled else math.nan
    passed = bool(scaled) and all(0.0 < v <= bound for v in scaled)
    if scenario is Scenario.CODIM4:
        passed = passed and all(pr.virtual for pr in probes)
    return BoundCheck(scenario, bound, entries, c1, passed, probes)


# ---------------------------------------------------------------------------
# serialization

def sweep_to_csv(result: SweepResult) -> str:
    lines = ["k,epsHi,eventType,eventIndex"]
    for iv in result.intervals:
        idx = "" if iv.event.index is None else str(iv.event.index)
        lines.append(f"{iv.k},{iv.eps_hi!r},{iv.event.kind},{idx}")
    return "\n".join(lines) + "\n"


def intervals_from_csv(text: str) -> list[tuple[int, float, str, int | None]]:
    lines = text.strip().splitlines()
    if lines and lines[0] != "k,epsHi,eventType,eventIndex":
        raise ValueError("unexpected sweep CSV header")
    rows = []
    for line in lines[1:]:
        k, eps_hi, kind, idx = line.split(",")
        rows.append((int(k), float(eps_hi), kind, int(idx) if idx else None))
    return rows


def ratios_to_csv(result: SweepResult) -> str:
    lines = ["K,epsK,ratio"]
    ratio_by_k = dict(result.ratios)
    for idx, eps in enumerate(result.eps_k, start=1):
        r = ratio_by_k.get(idx)
        lines.append(f"{idx},{eps!r},{'' if r is None else repr(r)}")
    return "\n".join(lines) + "\n"


def ratios_from_csv(text: str) -> list[tuple[int, float, float | None]]:
    lines = text.strip().splitlines()
    if lines and lines[0] != "K,epsK,ratio":
        raise ValueError("unexpected ratio CSV header")
    rows = []
    for line in lines[1:]:
        idx, eps, ratio = line.split(",")
        rows.append((int(idx), float(eps), float(ratio) if ratio else None))
    return rows


def sweep_to_dict(result: SweepResult) -> dict:
    return {
        "kMax": result.k_max,
        "epsStar": result.eps_star,
        "scenario": result.scenario.value,
        "intervals": [
            {
                "k": iv.k,
                "epsHi": iv.eps_hi,
                "epsLo": iv.eps_lo,
                "event": {"kind": iv.event.kind, "index": iv.event.index,
                           "detail": iv.event.detail},
                "anomaly": iv.anomaly,
            }
            for iv in result.intervals
        ],
        "epsK": result.eps_k,
        "ratios": [[k, r] for k, r in result.ratios],
        "kappaSamples": [[e, n] for e, n in result.kappa_samples],
        "anomalies": result.anomalies,
    }


def sweep_to_json(result: SweepResult) -> str:
    return json.dumps(sweep_to_dict(result), indent=2)


def sweep_from_json(text: str) -> SweepResult:
    obj = json.loads(text)
    intervals = [
        KInterval(
            k=item["k"],
            eps_hi=item["epsHi"],
            event=Event(item["event"]["kind"], item["event"]["index"], item["event"]["detail"]),
            eps_lo=item["epsLo"],
            anomaly=item["anomaly"],
        )
        for item in obj["intervals"]
    ]
    return SweepResult(
        k_max=obj["kMax"],
        eps_star=obj["epsStar"],
        scenario=Scenario(obj["scenario"]),
        intervals=intervals,
        eps_k=list(obj["epsK"]),
        ratios=[(int(k), float(r)) for k, r in obj["ratios"]],
        kappa_samples=[(float(e), int(n)) for e, n in obj["kappaSamples"]],
        anomalies=list(obj["anomalies"]),
    )
