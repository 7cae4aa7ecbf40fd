"""Exact arithmetic over Q(sqrt(d)) and exact cycle certification.

Several multistability points have coordinates in a real quadratic field
(sqrt(2) or sqrt(5) with unit determinants), so admissibility thresholds can
be certified with zero floating error: cycles are solved by Cramer's rule in
the field, margins get exact signs, and the stability multipliers are read
off from exact trace/determinant values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .core import Params, UnitEigenvalueError, compose_family_word
from .linalg import affine_apply, mat_det, mat_trace, solve2
from .words import Word, family_word

_RationalLike = (int, Fraction, Rational)


@dataclass(frozen=True)
class Quad:
    """a + b*sqrt(d) with rational a, b and a fixed square-free d > 1."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.d <= 1:
            raise ValueError("d must be an integer greater than 1")

    # -- helpers -----------------------------------------------------------
    def _coerce(self, other) -> "Quad | None":
        if isinstance(other, Quad):
            if other.d != self.d:
                raise ValueError(f"mixed radicands: sqrt({self.d}) vs sqrt({other.d})")
            return other
        if isinstance(other, _RationalLike):
            return Quad(Fraction(other), Fraction(0), self.d)
        return None

    @staticmethod
    def rational(value, d: int) -> "Quad":
        return Quad(Fraction(value), Fraction(0), d)

    @staticmethod
    def root(d: int) -> "Quad":
        return Quad(Fraction(0), Fraction(1), d)

    # -- field operations ---------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(o.a - self.a, o.b - self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad(self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def inverse(self) -> "Quad":
        norm = self.a * self.a - self.d * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt(d))")
        return Quad(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        out = Quad.rational(1, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- order and conversion ------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d) by comparing a^2 against d*b^2."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return 1 if self.b > 0 else -1
        if self.a > 0 and self.b > 0:
            return 1
        if self.a < 0 and self.b < 0:
            return -1
        lhs = self.a * self.a
        rhs = self.d * self.b * self.b
        if lhs == rhs:
            return 0
        if self.a > 0:  # b < 0: positive iff a^2 > d b^2
            return 1 if lhs > rhs else -1
        return 1 if lhs < rhs else -1

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __abs__(self) -> "Quad":
        return self if self.sign() >= 0 else -self

    def __repr__(self) -> str:
        return f"({self.a} + {self.b}*sqrt({self.d}))"


def quad_sign(x: Quad) -> int:
    return x.sign()


@dataclass(frozen=True)
class ExactCycle:
    """An exactly solved cycle: points, margins and stability data in Q(sqrt(d))."""

    word: Word
    points: tuple[tuple[Quad, Quad], ...]
    margins: tuple[Quad, ...]
    det: Quad
    trace: Quad
    det_i_minus_m: Quad

    @property
    def strictly_admissible(self) -> bool:
        return all(m.sign() > 0 for m in self.margins)

    @property
    def virtual(self) -> bool:
        return any(m.sign() < 0 for m in self.margins)

    @property
    def multipliers_repeated_minus_one(self) -> bool:
        one = Quad.rational(1, self.det.d)
        return self.det == one and self.trace == Quad.rational(-2, self.det.d)


def exact_params(tauL: Quad, deltaL: Quad, tauR: Quad, deltaR: Quad, mu: Quad) -> Params:
    return Params(tauL=tauL, deltaL=deltaL, tauR=tauR, deltaR=deltaR, mu=mu)


def exact_cycle(p: Params, w: Word, family: tuple[Word, int, Word] | None = None) -> ExactCycle:
    """Solve the cycle following w with exact field arithmetic.

    Raises UnitEigenvalueError when I - M_S is exactly singular.
    """
    if family is not None:
        f = compose_family_word(p, *family)
    else:
        from .core import compose_word

        f = compose_word(p, w)
    one = p.mu * 0 + 1
    im = (one - f.m[0], -f.m[1], -f.m[2], one - f.m[3])
    det_im = mat_det(im)
    if det_im.is_zero():
        raise UnitEigenvalueError("I - M_S is exactly singular")
    pt = solve2(im, f.t)
    pts = [pt]
    from .core import half_map

    maps = {s: half_map(p, s) for s in "LR"}
    for s in w[:-1]:
        pt = affine_apply(maps[s], pt)
        pts.append(pt)
    closing = affine_apply(maps[w[-1]], pts[-1])
    if not (closing[0] == pts[0][0] and closing[1] == pts[0][1]):
        raise AssertionError("exact cycle failed to close; non-field inputs?")
    margins = tuple(pt[0] if s == "R" else -pt[0] for s, pt in zip(w, pts))
    n_l = w.count("L")
    det = p.deltaL**n_l * p.deltaR ** (len(w) - n_l)
    return ExactCycle(
        word=w, points=tuple(pts), margins=margins,
        det=det, trace=mat_trace(f.m), det_i_minus_m=det_im,
    )


# ---------------------------------------------------------------------------
# certified examples

def _sqrt2_point() -> tuple[Params, Word, Word]:
    d = 2
    s = Quad.root(d)
    one = Quad.rational(1, d)
    return (
        exact_params(-s, one, one - s, one, one),
        "RRL",
        "LRLL",
    )


def _sqrt5_point() -> tuple[Params, Word, Word]:
    d = 5
    s = Quad.root(d)
    one = Quad.rational(1, d)
    half = Fraction(1, 2)
    return (
        exact_params(Quad.rational(2, d), one, Quad(half, half, d), one, one),
        "L",
        "RRRRR",
    )


def _closed_forms_sqrt2(k: int) -> dict:
    """Per-index (u, v) coordinates of the k-family cycle at the sqrt(2) point.

    u is the x-coordinate; v = y - sqrt(2) x.  Quadratic-in-j arcs cover the
    repeated block, affine tails cover the closing word.
    """
    d = 2
    s = Quad.root(d)

    def q(x) -> Quad:
        return Quad.rational(Fraction(x), d)

    def u3j(j):
        return (q(-4) + 3 * s) * q(Fraction(1, 2)) * q(j * (k - j)) \
            - (s - 1) * q(j) + s * q(Fraction(k, 4)) + (q(2) - s) * q(Fraction(3, 4))

    def v3j(j):
        return (q(2) - s) * q(j) - (q(2) - s) * q(Fraction(k, 2)) - s * q(Fraction(1, 2))

    def u3j1(j):
        return (q(-4) + 3 * s) * q(Fraction(1, 2)) * q(j * (k - j)) \
            + (q(3) - 2 * s) * q(j) + (q(-4) + 3 * s) * q(Fraction(k, 4)) \
            + (q(2) - s) * q(Fraction(5, 4))

    def v3j1(j):
        return -(q(2) - s) * q(Fraction(1, 2)) * q(j * (k - j)) + (q(3) - 2 * s) * q(j) \
            - (q(2) - s) * q(Fraction(3 * k, 4)) + (q(4) - 7 * s) * q(Fraction(1, 4))

    def u3j2(j):
        return -(q(3) - 2 * s) * q(j * (k - j)) + (q(3) - 2 * s) * q(2 * j) \
            - (q(5) - 3 * s) * q(Fraction(k, 2)) + (q(3) - 2 * s) * q(Fraction(3, 2))

    def v3j2(j):
        return (q(-4) + 3 * s) * q(Fraction(1, 2)) * q(j * (k - j)) - (q(-5) + 4 * s) * q(j) \
            + (q(-8) + 7 * s) * q(Fraction(k, 4)) - (q(-14) + 13 * s) * q(Fraction(1, 4))

    tail = {
        3 * k + 1: ((q(2) - s) * q(Fraction(k + 1, 2)),
                    -s * q(Fraction(k, 4)) - (q(2) + s) * q(Fraction(1, 4))),
        3 * k + 2: (-(q(-4) + 3 * s) * q(Fraction(k, 4)) + (q(2) - s) * q(Fraction(3, 4)),
                    -(s - 1) * q(Fraction(k, 2)) - (2 * s - 1) * q(Fraction(1, 2))),
        3 * k + 3: (-(s - 1) * q(Fraction(k, 2)) + (q(3) - 2 * s) * q(Fraction(1, 2)),
                    s * q(Fraction(k, 4)) - (3 * s - 2) * q(Fraction(1, 4))),
    }
    return {"u3j": u3j, "v3j": v3j, "u3j1": u3j1, "v3j1": v3j1,
            "u3j2": u3j2, "v3j2": v3j2, "tail": tail}


def _closed_forms_sqrt5(k: int) -> dict:
    d = 5
    s = Quad.root(d)

    def q(x) -> Quad:
        return Quad.rational(Fraction(x), d)

    def uj(j):
        return -q(Fraction(j * (k - j), 2)) + q(Fraction(j, 2)) - q(Fraction(k, 4)) \
            + (q(3) + s) * q(Fraction(1, 2))

    def vj(j):
        return q(j) - q(Fraction(k, 2))

    tail = {
        k + 1: ((q(3) + s) * q(Fraction(k, 8)) + (q(3) + s) * q(Fraction(1, 2)),
                (q(1) + s) * q(Fraction(k, 8))),
        k + 2: ((q(1) + s) * q(Fraction(k, 4)) + (q(3) + s) * q(Fraction(1, 2)),
                (s - 1) * q(Fraction(k, 8))),
        k + 3: ((q(3) + s) * q(Fraction(k, 8)) + (q(3) + s) * q(Fraction(1, 2)),
                -(s - 1) * q(Fraction(k, 8))),
        k + 4: (q(Fraction(k, 4)) + (q(3) + s) * q(Fraction(1, 2)),
                -(q(1) + s) * q(Fraction(k, 8))),
    }
    return {"uj": uj, "vj": vj, "tail": tail}


@dataclass
class Certificate:
    """Exact (or slack-toleranced) admissibility/stability certification."""

    example: str
    k_max: int
    threshold: int | None
    multipliers_ok: bool
    closed_form_ok: bool
    failures: list[str]

    @property
    def certified(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return json.dumps(
            {
                "example": self.example,
                "kMax": self.k_max,
                "threshold": self.threshold,
                "multipliers": "(-1,-1)" if self.multipliers_ok else "unexpected",
                "closedFormChecks": "pass" if self.closed_form_ok else "fail",
                "failures": self.failures,
            },
            indent=2,
        )


EXPECTED_THRESHOLD = {"A": 8, "B": 4, "K": 11}


def _check_points_sqrt2(k: int, cyc: ExactCycle, nu: Quad) -> str | None:
    forms = _closed_forms_sqrt2(k)
    spots = sorted({0, 1, max(0, k // 2), max(0, k - 1)})
    for j in spots:
        if j > k - 1:
            continue
        for off, (fu, fv) in ((0, ("u3j", "v3j")), (1, ("u3j1", "v3j1")), (2, ("u3j2", "v3j2"))):
            x, y = cyc.points[3 * j + off]
            u, v = x, y - nu * x
            if u != forms[fu](j) or v != forms[fv](j):
                return f"closed form mismatch at k={k}, i={3 * j + off}"
    # the u-coordinate at index 3k decides admissibility and is checked for every k
    x, y = cyc.points[3 * k]
    if x != forms["u3j"](k) or (y - nu * x) != forms["v3j"](k):
        return f"closed form mismatch at k={k}, i={3 * k}"
    for idx, (u_ref, v_ref) in forms["tail"].items():
        x, y = cyc.points[idx]
        if x != u_ref or (y - nu * x) != v_ref:
            return f"closed form mismatch at k={k}, i={idx}"
    return None


def _check_points_sqrt5(k: int, cyc: ExactCycle, nu: Quad) -> str | None:
    forms = _closed_forms_sqrt5(k)
    spots = sorted({0, 1, max(0, k // 2), max(0, k - 1), k})
    for j in spots:
        x, y = cyc.points[j]
        if x != forms["uj"](j) or (y - nu * x) != forms["vj"](j):
            return f"closed form mismatch at k={k}, i={j}"
    for idx, (u_ref, v_ref) in forms["tail"].items():
        x, y = cyc.points[idx]
        if x != u_ref or (y - nu * x) != v_ref:
            return f"closed form mismatch at k={k}, i={idx}"
    return None


def verify_proposition(example: str, k_max: int) -> Certificate:
    """Exact certification of the admissibility threshold for examples A and K.

    For every k up to k_max the cycle is solved exactly; the certificate
    asserts the threshold (admissible iff k >= 8 for A, k >= 11 for K), a
    repeated stability multiplier of exactly -1 at every k, and agreement of
    the solved points with the closed-form expressions.
    """
    example = example.upper()
    if example == "A":
        p, x, y = _sqrt2_point()
        nu = Quad.root(2)
        checker = _check_points_sqrt2
    elif example == "K":
        p, x, y = _sqrt5_point()
        nu = -Quad.rational(1, 5)
        checker = _check_points_sqrt5
    else:
        raise ValueError("exact certification covers examples 'A' and 'K'")
    expected = EXPECTED_THRESHOLD[example]
    failures: list[str] = []
    multipliers_ok = True
    closed_forms_ok = True
    threshold: int | None = None
    for k in range(1, k_max + 1):
        word = family_word(x, k, y)
        cyc = exact_cycle(p, word, family=(x, k, y))
        if not cyc.multipliers_repeated_minus_one:
            multipliers_ok = False
            failures.append(f"multipliers differ from (-1,-1) at k={k}")
        admissible = cyc.strictly_admissible
        if admissible and threshold is None:
            threshold = k
        if admissible != (k >= expected):
            failures.append(f"admissibility at k={k} contradicts threshold {expected}")
        issue = checker(k, cyc, nu)
        if issue is not None:
            closed_forms_ok = False
            failures.append(issue)
    if threshold != expected:
        failures.append(f"first admissible k is {threshold}, expected {expected}")
    return Certificate(example, k_max, threshold, multipliers_ok, closed_forms_ok, failures)


def verify_threshold_float(
    p: Params,
    x: Word,
    y: Word,
    expected: int,
    k_max: int,
    slack: float = 1e-6,
    example: str = "B",
) -> Certificate:
    """Floating certification with a safety band around zero margins.

    Margins must exceed +slack for k >= expected and fall below -slack for
    smaller k, so rounding cannot flip the classification unnoticed.
    """
    from .core import solve_cycle

    failures: list[str] = []
    multipliers_ok = True
    threshold: int | None = None
    for k in range(1, k_max + 1):
        word = family_word(x, k, y)
        cyc = solve_cycle(p, word, family=(x, k, y))
        scale = 1.0 + abs(cyc.trace)
        if abs(cyc.trace + 2.0) > 1e-8 * scale or abs(cyc.det - 1.0) > 1e-8:
            multipliers_ok = False
            failures.append(f"multipliers stray from (-1,-1) at k={k}")
        m = cyc.margin
        if m > slack and threshold is None:
            threshold = k
        if k >= expected and m <= slack:
            failures.append(f"margin {m:.3e} not safely positive at k={k}")
        if k < expected and m >= -slack:
            failures.append(f"margin {m:.3e} not safely negative at k={k}")
    if threshold != expected:
        failures.append(f"first admissible k is {threshold}, expected {expected}")
    return Certificate(example, k_max, threshold, multipliers_ok, True, failures)
