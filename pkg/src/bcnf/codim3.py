"""Eigenbasis frame and diagnostics for the coincident-homoclinic scenario.

When the repeated word x has a saddle cycle whose multipliers multiply to 1,
expressing the dynamics in the eigenbasis of M_x centered at the x-cycle
fixed point turns the x-return map into diag(lambda1, lambda2).  Infinitely
many stable x^k y cycles then force the conjugated y-map coefficients to
satisfy gamma22 = sigma2 = 0 with gamma21, sigma1 nonzero, which is what the
report below measures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .core import (
    FrameError,
    Params,
    UnitEigenvalueError,
    compose_word,
    solve_cycle,
)
from .dual import Dual, deriv_of, dual_sqrt, value_of
from .linalg import Mat2, Vec2, affine_apply, mat_det, mat_mul, mat_trace, mat_vec, solve2
from .words import Word, family_word, is_primitive


@dataclass(frozen=True)
class EigenBasis:
    """Real distinct eigen-decomposition of M_x plus the x-cycle fixed point."""

    lambda1: float
    lambda2: float
    zeta1: Vec2
    zeta2: Vec2
    q: Mat2
    fixed_point: Vec2


@dataclass(frozen=True)
class Codim3Coeffs:
    """Conjugated y-map: matrix gamma_ij and translation sigma."""

    gamma11: float
    gamma12: float
    gamma21: float
    gamma22: float
    sigma1: float
    sigma2: float


@dataclass(frozen=True)
class Condition:
    name: str
    value: object
    threshold: object
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value,
                "threshold": self.threshold, "pass": self.passed}


@dataclass
class Codim3Report:
    conditions: list[Condition] = field(default_factory=list)
    lambda_product: float | None = None
    gamma22: float | None = None
    sigma2: float | None = None
    gamma21: float | None = None
    sigma1: float | None = None
    zeta2_vertical: bool | None = None
    gamma22_prime: float | None = None
    ns_degenerate: bool | None = None
    det_prime: float | None = None
    k_probe: tuple[int, int] | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def to_json(self) -> str:
        return json.dumps([c.to_dict() for c in self.conditions], indent=2)


def _eigenvector(m: Mat2, lam, prefer_large: bool = False):
    """Right eigenvector of a 2x2 matrix for eigenvalue lam.

    Uses a row of (m - lam I); with ``prefer_large`` the larger-magnitude
    component is scaled to 1 (a branch that stays differentiable along a
    parameter path), otherwise the first component when it is significant.
    """
    v = (m[1], lam - m[0])
    size = max(abs(value_of(v[0])), abs(value_of(v[1])))
    if size == 0.0:
        v = (lam - m[3], m[2])
        size = max(abs(value_of(v[0])), abs(value_of(v[1])))
        if size == 0.0:
            raise FrameError("eigenvector is numerically undefined")
    a0, a1 = abs(value_of(v[0])), abs(value_of(v[1]))
    if prefer_large:
        pivot = v[0] if a0 >= a1 else v[1]
    else:
        pivot = v[0] if a0 > 1e-12 * size else v[1]
    return (v[0] / pivot, v[1] / pivot)


def _eigen_pair(m: Mat2, tol: float):
    tr = mat_trace(m)
    det = mat_det(m)
    disc = tr * tr - 4.0 * det
    scale = 1.0 + value_of(tr) ** 2 + abs(value_of(det))
    if value_of(disc) <= tol * scale:
        raise FrameError(
            "matrix of the repeated word has complex or repeated eigenvalues; "
            "this frame requires a real distinct pair"
        )
    root = dual_sqrt(disc)
    lam_a = (tr - root) / 2
    lam_b = (tr + root) / 2
    if abs(value_of(lam_a)) <= abs(value_of(lam_b)):
        return lam_a, lam_b
    return lam_b, lam_a


def eigen_basis(p: Params, x: Word, tol: float = 1e-9) -> EigenBasis:
    """Eigen-decomposition of M_x and the x-cycle fixed point.

    Fails when the eigenvalues are complex, repeated, or one equals 1 (the
    x-cycle then does not exist; the repeated-unit-eigenvalue frame applies
    instead).
    """
    f = compose_word(p, x)
    m = f.m
    lam1, lam2 = _eigen_pair(m, tol)
    for lam in (lam1, lam2):
        if abs(lam - 1.0) <= tol * (1.0 + abs(lam)):
            raise FrameError(
                "M_x has a unit eigenvalue; use the repeated-unit-eigenvalue "
                "frame for that scenario"
            )
    im = (1.0 - m[0], -m[1], -m[2], 1.0 - m[3])
    norm = max(abs(e) for e in m)
    if abs(mat_det(im)) <= tol * (1.0 + norm):
        raise UnitEigenvalueError("I - M_x is singular: no unique x-cycle")
    fixed_point = solve2(im, f.t)
    z1 = _eigenvector(m, lam1)
    z2 = _eigenvector(m, lam2)
    basis = EigenBasis(
        lambda1=lam1, lambda2=lam2, zeta1=z1, zeta2=z2,
        q=(z1[0], z2[0], z1[1], z2[1]), fixed_point=fixed_point,
    )
    for lam, z in ((lam1, z1), (lam2, z2)):
        mz = mat_vec(m, z)
        err = max(abs(mz[0] - lam * z[0]), abs(mz[1] - lam * z[1]))
        if err > 1e-10 * (1.0 + norm):
            raise FrameError(f"eigenvector residual {err:.2e} too large")
    return basis


def _conjugate(q: Mat2, m: Mat2) -> Mat2:
    return mat_mul((q[3], -q[1], -q[2], q[0]), mat_mul(m, q))


def _q_inverse_times(q: Mat2, v: Vec2) -> Vec2:
    return solve2(q, v)


def conjugate_gY(p: Params, x: Word, y: Word, tol: float = 1e-9) -> Codim3Coeffs:
    """Coefficients of the y-iterate in eigenbasis coordinates centered at the x-cycle."""
    basis = eigen_basis(p, x, tol)
    fy = compose_word(p, y)
    # Gamma = Q^-1 M_y Q, sigma = Q^-1 (f^y(p_x) - p_x)
    det_q = mat_det(basis.q)
    adj = (basis.q[3], -basis.q[1], -basis.q[2], basis.q[0])
    gm = mat_mul(adj, mat_mul(fy.m, basis.q))
    gamma = tuple(e / det_q for e in gm)
    image = affine_apply(fy, basis.fixed_point)
    diff = (image[0] - basis.fixed_point[0], image[1] - basis.fixed_point[1])
    sigma = _q_inverse_times(basis.q, diff)
    return Codim3Coeffs(gamma[0], gamma[1], gamma[2], gamma[3], sigma[0], sigma[1])


def _dual_params(base: Params, direction: tuple[float, float, float, float]) -> Params:
    a, b, c, d = direction
    return Params(
        tauL=Dual(base.tauL, a),
        deltaL=Dual(base.deltaL, b),
        tauR=Dual(base.tauR, c),
        deltaR=Dual(base.deltaR, d),
        mu=base.mu,
    )


def _gamma22_dual(p_dual: Params, x: Word, y: Word) -> Dual:
    m = compose_word(p_dual, x).m
    lam1, lam2 = _eigen_pair(m, 1e-12)
    z1 = _eigenvector(m, lam1, prefer_large=True)
    z2 = _eigenvector(m, lam2, prefer_large=True)
    q = (z1[0], z2[0], z1[1], z2[1])
    my = compose_word(p_dual, y).m
    det_q = mat_det(q)
    adj = (q[3], -q[1], -q[2], q[0])
    gm = mat_mul(adj, mat_mul(my, q))
    g22 = gm[3] / det_q
    return g22 if isinstance(g22, Dual) else Dual(g22, 0.0)


def _gamma22_prime_at(base: Params, direction, x: Word, y: Word) -> float:
    return deriv_of(_gamma22_dual(_dual_params(base, direction), x, y))


def gamma22_prime(fam, x: Word | None = None, y: Word | None = None) -> float:
    """d(gamma22)/d(eps) at eps = 0 along the family's direction.

    Propagates a dual number through composition, the eigen-decomposition and
    the conjugation; exact to rounding since every step is closed-form.
    """
    x = fam.x if x is None else x
    y = fam.y if y is None else y
    return _gamma22_prime_at(fam.base, fam.direction, x, y)


def det_trace_prime(base: Params, direction, x: Word) -> tuple[float, float]:
    """First eps-derivatives of (det, trace) of M_x along a direction."""
    m = compose_word(_dual_params(base, direction), x).m
    return deriv_of(mat_det(m)), deriv_of(mat_trace(m))


def predicted_sk_matrix(basis: EigenBasis, co: Codim3Coeffs, k: int) -> Mat2:
    """Matrix with the spectrum of the composed x^k y map, built from frame data."""
    l1k = basis.lambda1**k
    l2k = basis.lambda2**k
    return (co.gamma11 * l1k, co.gamma12 * l2k, co.gamma21 * l1k, co.gamma22 * l2k)


def predicted_sk_det(basis: EigenBasis, co: Codim3Coeffs, k: int) -> float:
    return (co.gamma11 * co.gamma22 - co.gamma12 * co.gamma21) * (basis.lambda1 * basis.lambda2) ** k


def predicted_sk_trace(basis: EigenBasis, co: Codim3Coeffs, k: int) -> float:
    return co.gamma11 * basis.lambda1**k + co.gamma22 * basis.lambda2**k


DEFAULT_DIRECTION = (0.0, 1.0, 0.0, 0.0)


def check_codim3(
    p: Params,
    x: Word,
    y: Word,
    tol: float = 1e-9,
    direction: tuple[float, float, float, float] = DEFAULT_DIRECTION,
    k_probe: int = 24,
    margin_floor: float = 1e-6,
) -> Codim3Report:
    """Evaluate every coincident-homoclinic scenario condition at one point.

    Frame failures are reported as failed conditions rather than raised.  The
    derivative-based side conditions are evaluated along ``direction``; the
    cycle-margin probe checks, for k up to ``k_probe``, that the x^k y cycles
    stay clear of the switching manifold (a finite stand-in for the
    infinitely-many-k hypothesis, recorded via ``k_probe``).
    """
    report = Codim3Report()
    conds = report.conditions
    conds.append(Condition("x-primitive", is_primitive(x), True, is_primitive(x)))
    first_differ = x[0] != y[0]
    conds.append(Condition("first-symbols-differ", first_differ, True, first_differ))
    try:
        basis = eigen_basis(p, x, tol)
    except (FrameError, UnitEigenvalueError) as exc:
        conds.append(Condition("real-distinct-saddle-pair", str(exc), "", False))
        return report

    l1, l2 = basis.lambda1, basis.lambda2
    saddle = 0.0 <= l1 < 1.0 < l2
    conds.append(Condition("saddle-eigenvalues-0<l1<1<l2", (l1, l2), "0<=l1<1<l2", saddle))
    report.lambda_product = l1 * l2
    conds.append(
        Condition("multiplier-product-one", l1 * l2, f"|l1*l2-1|<={tol}", abs(l1 * l2 - 1.0) <= tol)
    )
    z2 = basis.zeta2
    vertical = abs(z2[0]) <= tol * math.hypot(*z2)
    report.zeta2_vertical = vertical
    conds.append(Condition("unstable-eigenvector-not-vertical", z2, "zeta2[0] != 0", not vertical))

    co = conjugate_gY(p, x, y, tol)
    report.gamma22, report.sigma2 = co.gamma22, co.sigma2
    report.gamma21, report.sigma1 = co.gamma21, co.sigma1
    conds.append(Condition("gamma22-vanishes", co.gamma22, f"|.|<={tol}", abs(co.gamma22) <= tol))
    conds.append(Condition("sigma2-vanishes", co.sigma2, f"|.|<={tol}", abs(co.sigma2) <= tol))
    conds.append(Condition("gamma21-nonzero", co.gamma21, f"|.|>{tol}", abs(co.gamma21) > tol))
    conds.append(Condition("sigma1-nonzero", co.sigma1, f"|.|>{tol}", abs(co.sigma1) > tol))
    det_limit = -co.gamma12 * co.gamma21
    conds.append(
        Condition("limit-det-at-most-one", det_limit, f"<=1+{tol}", det_limit <= 1.0 + tol)
    )

    g22p = _gamma22_prime_at(p, direction, x, y)
    report.gamma22_prime = g22p
    conds.append(Condition("gamma22-prime-nonzero", g22p, f"|.|>{tol}", abs(g22p) > tol))
    ns_degenerate = abs(co.gamma12 * co.gamma21 + 1.0) <= tol
    report.ns_degenerate = ns_degenerate
    det_p, _ = det_trace_prime(p, direction, x)
    report.det_prime = det_p
    if ns_degenerate:
        conds.append(
            Condition("degenerate-ns-needs-det-decreasing", det_p, "<0", det_p < 0.0)
        )

    report.k_probe = (1, k_probe)
    worst = math.inf
    worst_k = None
    probe_ok = True
    for k in range(1, k_probe + 1):
        try:
            cyc = solve_cycle(p, family_word(x, k, y), family=(x, k, y))
        except UnitEigenvalueError:
            probe_ok = False
            worst_k = k
            break
        if cyc.margin < worst:
            worst, worst_k = cyc.margin, k
    if probe_ok:
        probe_ok = worst > margin_floor
    conds.append(
        Condition(
            f"cycle-margins-bounded-away-from-manifold-k<=({k_probe})",
            (worst_k, worst if worst is not math.inf else None),
            f">{margin_floor}",
            probe_ok,
        )
    )
    return report
