"""The planar border-collision normal form and its periodic solutions.

The map applies one of two affine half-maps depending on the sign of x:
companion matrix ``[[tau, 1], [-delta, 0]]`` plus the offset ``(mu, 0)``.
A periodic solution following a word S ("S-cycle") is the fixed point of the
composed affine map together with its forward iterates; it is admissible when
every point lies on the side of the switching manifold x = 0 dictated by its
symbol.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .linalg import (
    AffineMap2,
    Mat2,
    Vec2,
    affine_apply,
    affine_compose,
    affine_pow,
    mat_trace,
    solve2,
)
from .words import Word, parse_word, symbol_counts


class CycleError(Exception):
    """Base class for cycle-solving failures."""


class UnitEigenvalueError(CycleError):
    """I - M_S is (numerically) singular: the S-cycle does not exist or is non-unique."""


class FrameError(Exception):
    """A coordinate frame's spectral preconditions are not met."""


class VerticalEigenvectorError(FrameError):
    """The eigenspace is vertical, which admissible cycle families rule out."""


class StabilityClass(Enum):
    ATTRACTING = "attracting"
    STABLE_NON_ATTRACTING = "stable-non-attracting"
    UNSTABLE = "unstable"
    UNIT_EIGENVALUE = "unit-eigenvalue"


class MarginClass(Enum):
    ADMISSIBLE = "admissible"
    VIRTUAL = "virtual"
    ON_MANIFOLD = "on-manifold"


@dataclass(frozen=True)
class Params:
    """Half-map traces/determinants and the unfolding offset mu != 0."""

    tauL: float
    deltaL: float
    tauR: float
    deltaR: float
    mu: float

    def __post_init__(self):
        if self.mu == 0:
            raise ValueError("mu must be nonzero")
        for name in ("tauL", "deltaL", "tauR", "deltaR", "mu"):
            v = getattr(self, name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")

    def to_json(self) -> str:
        return json.dumps(
            {"tauL": self.tauL, "deltaL": self.deltaL, "tauR": self.tauR,
             "deltaR": self.deltaR, "mu": self.mu}
        )

    @classmethod
    def from_json(cls, text: str) -> "Params":
        obj = json.loads(text)
        extra = set(obj) - {"tauL", "deltaL", "tauR", "deltaR", "mu"}
        if extra:
            raise ValueError(f"unknown parameter keys: {sorted(extra)}")
        return cls(**obj)


def half_matrix(p: Params, symbol: str) -> Mat2:
    """Companion matrix of one half-map."""
    if symbol == "L":
        tau, delta = p.tauL, p.deltaL
    elif symbol == "R":
        tau, delta = p.tauR, p.deltaR
    else:
        raise ValueError(f"symbol must be 'L' or 'R', got {symbol!r}")
    one = tau * 0 + 1
    return (tau, one, -delta, one * 0)


def half_map(p: Params, symbol: str) -> AffineMap2:
    zero = p.mu * 0
    return AffineMap2(half_matrix(p, symbol), (p.mu, zero))


def compose_word(p: Params, w: Word) -> AffineMap2:
    """Affine map of the iterate following w; index-0 symbol applied first.

    The matrix is the product with the first-applied factor rightmost; the
    translation accumulates the images of the (mu, 0) offset.
    """
    parse_word(w)
    maps = {"L": half_map(p, "L"), "R": half_map(p, "R")}
    out = maps[w[0]]
    for s in w[1:]:
        out = affine_compose(maps[s], out)
    return out


def compose_family_word(p: Params, x: Word, k: int, y: Word) -> AffineMap2:
    """Affine map following x^k y, using repeated squaring for the x-block."""
    fx = affine_pow(compose_word(p, x), k)
    return affine_compose(compose_word(p, y), fx)


def word_determinant(p: Params, w: Word):
    """det of the composed matrix, as the product of half-map determinants.

    Forming ad - bc on the composed matrix cancels catastrophically once the
    entries grow; the multiplicative form stays accurate for any word length.
    """
    n_l, n_r = symbol_counts(w)
    return p.deltaL**n_l * p.deltaR**n_r


def multipliers_from_det_trace(det: float, trace: float) -> tuple[complex, complex]:
    disc = trace * trace - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        return (complex((trace - root) / 2.0), complex((trace + root) / 2.0))
    root = math.sqrt(-disc) / 2.0
    return (complex(trace / 2.0, -root), complex(trace / 2.0, root))


def classify_det_trace(det: float, trace: float, tol: float = 1e-9) -> StabilityClass:
    scale = 1.0 + abs(det) + abs(trace)
    saddle_node = det - trace + 1.0
    period_doubling = det + trace + 1.0
    neimark = 1.0 - det
    if abs(saddle_node) <= tol * scale:
        return StabilityClass.UNIT_EIGENVALUE
    gap = tol * scale
    if saddle_node > gap and period_doubling > gap and neimark > gap:
        return StabilityClass.ATTRACTING
    if saddle_node >= -gap and period_doubling >= -gap and neimark >= -gap:
        return StabilityClass.STABLE_NON_ATTRACTING
    return StabilityClass.UNSTABLE


def classify_stability(m: Mat2, tol: float = 1e-9) -> StabilityClass:
    """Stability of a cycle with composed matrix m, from det/trace alone."""
    det = m[0] * m[3] - m[1] * m[2]
    return classify_det_trace(det, mat_trace(m), tol)


@dataclass(frozen=True)
class Cycle:
    """A solved S-cycle: points, signed margins and stability data."""

    word: Word
    points: tuple[Vec2, ...]
    margins: tuple[float, ...]
    det: float
    trace: float
    det_i_minus_m: float
    stability: StabilityClass
    multipliers: tuple[complex, complex]
    residual: float

    @property
    def margin(self) -> float:
        return min(self.margins)

    def margin_class(self, tol: float = 1e-9) -> MarginClass:
        scale = 1.0 + max(max(abs(x), abs(y)) for x, y in self.points)
        worst = self.margin
        if abs(worst) <= tol * scale:
            return MarginClass.ON_MANIFOLD
        return MarginClass.ADMISSIBLE if worst > 0 else MarginClass.VIRTUAL


def margin(cycle: Cycle) -> float:
    """Worst signed distance of the cycle from its admissibility pattern."""
    return cycle.margin


# Beyond this matrix norm the fixed point of the composed map loses too many
# digits to cancellation, so the cycle is solved as one block-cyclic linear
# system over all points instead.
_DIRECT_SOLVE_NORM_CAP = 1e3


def _points_direct(p: Params, w: Word, f: AffineMap2) -> list[Vec2]:
    im = (1.0 - f.m[0], -f.m[1], -f.m[2], 1.0 - f.m[3])
    pt = solve2(im, f.t)
    pts = [pt]
    for s in w[:-1]:
        pt = affine_apply(half_map(p, s), pt)
        pts.append(pt)
    return pts


def _points_cyclic(p: Params, w: Word) -> list[Vec2]:
    n = len(w)
    a = np.zeros((2 * n, 2 * n))
    rhs = np.zeros(2 * n)
    blocks = {s: half_matrix(p, s) for s in "LR"}
    for i, s in enumerate(w):
        m11, m12, m21, m22 = blocks[s]
        j = (i + 1) % n
        a[2 * j, 2 * j] += 1.0
        a[2 * j + 1, 2 * j + 1] += 1.0
        a[2 * j, 2 * i] -= m11
        a[2 * j, 2 * i + 1] -= m12
        a[2 * j + 1, 2 * i] -= m21
        a[2 * j + 1, 2 * i + 1] -= m22
        rhs[2 * j] = p.mu
    z = np.linalg.solve(a, rhs)
    return [(z[2 * i], z[2 * i + 1]) for i in range(n)]


def _signed_margins(w: Word, pts: Sequence[Vec2]) -> list[float]:
    return [pt[0] if s == "R" else -pt[0] for s, pt in zip(w, pts)]


def _step_residual(p: Params, w: Word, pts: Sequence[Vec2]) -> float:
    worst = 0.0
    n = len(w)
    for i, s in enumerate(w):
        nxt = affine_apply(half_map(p, s), pts[i])
        tgt = pts[(i + 1) % n]
        worst = max(worst, abs(nxt[0] - tgt[0]), abs(nxt[1] - tgt[1]))
    return worst


def solve_cycle(p: Params, w: Word, tol: float = 1e-10,
                family: tuple[Word, int, Word] | None = None) -> Cycle:
    """Solve the unique S-cycle following w.

    Raises UnitEigenvalueError when I - M_S is singular relative to the size
    of M_S, which signals non-existence or non-uniqueness of the cycle.
    ``family=(x, k, y)`` composes the x-block by repeated squaring; the word
    w must then equal x*k + y.
    """
    parse_word(w)
    if family is not None:
        f = compose_family_word(p, *family)
    else:
        f = compose_word(p, w)
    norm = max(abs(e) for e in f.m)
    det = word_determinant(p, w)
    trace = mat_trace(f.m)
    # det(I - M) = 1 - trace + det; the multiplicative det keeps this form
    # accurate where the entry products have already cancelled catastrophically
    det_im = 1.0 - trace + det
    if abs(det_im) <= tol * (1.0 + norm):
        raise UnitEigenvalueError(
            f"I - M_S is singular to tolerance for word of length {len(w)}"
        )
    if norm <= _DIRECT_SOLVE_NORM_CAP:
        pts = _points_direct(p, w, f)
    else:
        pts = _points_cyclic(p, w)
    return Cycle(
        word=w,
        points=tuple(pts),
        margins=tuple(_signed_margins(w, pts)),
        det=det,
        trace=trace,
        det_i_minus_m=det_im,
        stability=classify_det_trace(det, trace),
        multipliers=multipliers_from_det_trace(det, trace),
        residual=_step_residual(p, w, pts),
    )


def cycle_to_csv(cycle: Cycle) -> str:
    lines = ["i,symbol,x,y,margin"]
    for i, (s, (x, y), m) in enumerate(zip(cycle.word, cycle.points, cycle.margins)):
        lines.append(f"{i},{s},{x!r},{y!r},{m!r}")
    return "\n".join(lines) + "\n"


def cycle_points_from_csv(text: str) -> list[tuple[int, str, float, float, float]]:
    rows = []
    lines = text.strip().splitlines()
    if lines and lines[0] != "i,symbol,x,y,margin":
        raise ValueError("unexpected cycle CSV header")
    for line in lines[1:]:
        i, s, x, y, m = line.split(",")
        rows.append((int(i), s, float(x), float(y), float(m)))
    return rows
