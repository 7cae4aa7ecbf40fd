"""Named parameter points, perturbation directions and families.

The six diagnostic points: three homoclinic-scenario points (paramF exact
rationals, paramI and paramC to ten digits) and three repeated-unit-
eigenvalue points (paramA and paramK in quadratic fields, paramB with a
quartic root refined to machine precision).  paramSi10 is the historical
six-attractor point that motivated the search for its nearby scenario point
paramA.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .core import Params
from .quadfield import Quad, exact_params
from .sweep import Family, Scenario

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)

# coefficients of t^4 - t^3 - 3 t^2 + 2, whose root near 0.795 fixes paramB
B_QUARTIC = (1.0, -1.0, -3.0, 0.0, 2.0)


def _quartic_root(seed: float) -> float:
    r = seed
    for _ in range(100):
        p = (((r - 1.0) * r - 3.0) * r) * r + 2.0
        dp = ((4.0 * r - 3.0) * r - 6.0) * r
        step = p / dp
        r -= step
        if abs(step) <= 1e-16 * abs(r):
            break
    return r


TAU_R_B = _quartic_root(0.7952)
TAU_L_B = 2.0 * TAU_R_B / (TAU_R_B**2 - 2.0)

_DELTA_R_I = 1.378851759
_DELTA_R_C = 1.659870677

PARAMS: dict[str, Params] = {
    "paramF": Params(-55.0 / 117.0, 4.0 / 9.0, -2.5, 1.5, 1.0),
    "paramI": Params(0.5, 1.0 / _DELTA_R_I, -1.139755486, _DELTA_R_I, 1.0),
    "paramC": Params(-0.7, _DELTA_R_C**-1.5, -3.308423793, _DELTA_R_C, 1.0),
    "paramSi10": Params(
        34.0 / 25.0 * math.cos(19.0 * math.pi / 25.0),
        0.4624,
        2.5 * math.cos(27.0 * math.pi / 50.0),
        1.5625,
        1.0,
    ),
    "paramA": Params(-SQRT2, 1.0, 1.0 - SQRT2, 1.0, 1.0),
    "paramB": Params(TAU_L_B, 1.0, TAU_R_B, 1.0, 1.0),
    "paramK": Params(2.0, 1.0, (1.0 + SQRT5) / 2.0, 1.0, 1.0),
}

WORDS: dict[str, tuple[str, str]] = {
    "paramF": ("RLR", "LR"),
    "paramI": ("RLLR", "LLR"),
    "paramC": ("RLRLR", "LR"),
    "paramSi10": ("RRL", "LRLL"),
    "paramA": ("RRL", "LRLL"),
    "paramB": ("RRRL", "LRRLL"),
    "paramK": ("L", "RRRRR"),
}

DIRECTIONS: dict[str, tuple[float, float, float, float]] = {
    "abcdFIC": (0.0, 1.0, 0.0, 0.0),
    "abcdA": (1.0, -1.0, 0.0, 0.0),
    "abcdB": (0.0, -1.0, 0.0, -1.0),
    "abcdK": (-2.0, -1.0, -4.0, 0.0),
}

FAMILY_DIRECTION: dict[str, str] = {
    "paramF": "abcdFIC",
    "paramI": "abcdFIC",
    "paramC": "abcdFIC",
    "paramA": "abcdA",
    "paramB": "abcdB",
    "paramK": "abcdK",
}

SCENARIO: dict[str, Scenario] = {
    "paramF": Scenario.CODIM3,
    "paramI": Scenario.CODIM3,
    "paramC": Scenario.CODIM3,
    "paramA": Scenario.CODIM4,
    "paramB": Scenario.CODIM4,
    "paramK": Scenario.CODIM4,
}


def get_params(name: str) -> Params:
    try:
        return PARAMS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PARAMS)}") from None


def get_words(name: str) -> tuple[str, str]:
    return WORDS[name]


def get_family(name: str) -> Family:
    if name not in FAMILY_DIRECTION:
        raise KeyError(f"no sweep family for preset {name!r}")
    x, y = WORDS[name]
    return Family(PARAMS[name], DIRECTIONS[FAMILY_DIRECTION[name]], x, y)


def get_scenario(name: str) -> Scenario:
    return SCENARIO[name]


def exact_param_a() -> Params:
    one = Quad.rational(1, 2)
    s = Quad.root(2)
    return exact_params(-s, one, one - s, one, one)


def exact_param_k() -> Params:
    one = Quad.rational(1, 5)
    s = Quad.root(5)
    half = Fraction(1, 2)
    return exact_params(Quad.rational(2, 5), one, Quad(half, half, 5), one, one)
