"""Triangular frame and diagnostics for the repeated-unit-eigenvalue scenario.

When M_x has a repeated unit eigenvalue of geometric multiplicity one with
eigenvector [1, nu], the shear frame Q = [[1, 0], [nu, 1]] (no translation:
the switching manifold stays u = 0) turns the x-return map into a unit upper
triangular matrix plus a drift (rho1, rho2).  Infinite coexistence of stable
x^k y cycles forces gamma21 = 0, gamma22 = -1 and rho2 != 0 on the conjugated
y-map, with per-shift sign constraints linking the partial compositions to
the symbols of x.  This module checks those conditions, finds parameter
points satisfying them, and computes the perturbation coefficients governing
attractivity for nearby parameters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    FrameError,
    Params,
    UnitEigenvalueError,
    VerticalEigenvectorError,
    compose_word,
    half_map,
    solve_cycle,
)
from .codim3 import Condition, _dual_params
from .dual import deriv_of
from .linalg import (
    AffineMap2,
    Mat2,
    affine_compose,
    affine_identity_like,
    mat_det,
    mat_mul,
    mat_trace,
)
from .words import Word, family_word, is_primitive, symbol_counts


class ConstraintError(ValueError):
    """No real parameter satisfies the repeated-unit-eigenvalue constraint."""


@dataclass(frozen=True)
class Codim4Frame:
    """Shear-frame data: eigenvector slope, x-map and y-map coefficients."""

    nu: float
    q: Mat2
    omega12: float
    rho1: float
    rho2: float
    gamma11: float
    gamma12: float
    gamma21: float
    gamma22: float
    sigma1: float
    sigma2: float


@dataclass(frozen=True)
class TruncationStep:
    """Coefficients of the first m half-maps of x composed, in frame coordinates."""

    psi11: float
    psi12: float
    psi21: float
    psi22: float
    chi1: float
    chi2: float


@dataclass
class Codim4Report:
    conditions: list[Condition] = field(default_factory=list)
    det_residual: float | None = None
    trace_residual: float | None = None
    gamma21: float | None = None
    gamma22_plus_one: float | None = None
    rho2: float | None = None
    gamma11: float | None = None
    psi11: list[float] = field(default_factory=list)
    sign_ok: list[bool] = field(default_factory=list)
    vertical_eigenvector: bool | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def to_json(self) -> str:
        return json.dumps([c.to_dict() for c in self.conditions], indent=2)


def _shear_frame_raw(p: Params, x: Word, y: Word, tol: float):
    """(nu, omega12, rho, gamma, sigma) without unit-eigenvalue residual gating."""
    fx = compose_word(p, x)
    m = fx.m
    norm = max(abs(e) for e in m)
    if abs(m[1]) <= tol * (1.0 + norm):
        if abs(m[2]) <= tol * (1.0 + norm):
            raise FrameError("M_x is (numerically) the identity: eigenspace is two-dimensional")
        raise VerticalEigenvectorError(
            "the unit eigenspace of M_x is vertical, which rules out admissible cycle families"
        )
    nu = (1.0 - m[0]) / m[1]
    # Q = [[1,0],[nu,1]], Q^-1 = [[1,0],[-nu,1]]
    qi = (1.0, 0.0, -nu, 1.0)
    q = (1.0, 0.0, nu, 1.0)
    omega = mat_mul(qi, mat_mul(m, q))
    rho = (fx.t[0], -nu * fx.t[0] + fx.t[1])
    fy = compose_word(p, y)
    gamma = mat_mul(qi, mat_mul(fy.m, q))
    sigma = (fy.t[0], -nu * fy.t[0] + fy.t[1])
    return nu, q, omega, rho, gamma, sigma


def frame(p: Params, x: Word, y: Word, tol: float = 1e-9) -> Codim4Frame:
    """Shear frame at a repeated-unit-eigenvalue point.

    Preconditions enforced: det(M_x) = 1 and trace(M_x) = 2 within tol, and
    the unit eigenspace is not vertical.
    """
    m = compose_word(p, x).m
    det_res = mat_det(m) - 1.0
    tr_res = mat_trace(m) - 2.0
    if max(abs(det_res), abs(tr_res)) > tol:
        raise FrameError(
            f"M_x lacks a repeated unit eigenvalue: det-1={det_res:.3e}, trace-2={tr_res:.3e}"
        )
    nu, q, omega, rho, gamma, sigma = _shear_frame_raw(p, x, y, tol)
    return Codim4Frame(
        nu=nu, q=q, omega12=omega[1], rho1=rho[0], rho2=rho[1],
        gamma11=gamma[0], gamma12=gamma[1], gamma21=gamma[2], gamma22=gamma[3],
        sigma1=sigma[0], sigma2=sigma[1],
    )


def frame_half_map(p: Params, nu: float, symbol: str) -> AffineMap2:
    """One half-map conjugated into the shear frame."""
    qi = (1.0, 0.0, -nu, 1.0)
    q = (1.0, 0.0, nu, 1.0)
    h = half_map(p, symbol)
    return AffineMap2(mat_mul(qi, mat_mul(h.m, q)), (h.t[0], -nu * h.t[0] + h.t[1]))


def truncation_coeffs(p: Params, x: Word, tol: float = 1e-9) -> list[TruncationStep]:
    """Partial compositions of the frame half-maps along x, m = 0 .. len(x)-1.

    Entry m applies the first m symbols of x; entry 0 is the identity.
    """
    fx = compose_word(p, x).m
    norm = max(abs(e) for e in fx)
    if abs(fx[1]) <= tol * (1.0 + norm):
        raise VerticalEigenvectorError("vertical unit eigenspace: frame undefined")
    nu = (1.0 - fx[0]) / fx[1]
    steps = []
    acc = affine_identity_like(AffineMap2(fx, (0.0, 0.0)))
    for m in range(len(x)):
        steps.append(
            TruncationStep(acc.m[0], acc.m[1], acc.m[2], acc.m[3], acc.t[0], acc.t[1])
        )
        acc = affine_compose(frame_half_map(p, nu, x[m]), acc)
    return steps


def eigenline_directions(p: Params, x: Word) -> list[tuple[int, str, tuple[float, float]]]:
    """Unit-eigenvalue eigenspace direction of each cyclic shift of x.

    The m-th entry is the direction, in plane coordinates, along which the
    points of large cycles with index congruent to m align; derived from the
    partial compositions as (psi11_m, psi11_m * nu + psi21_m).
    """
    fx = compose_word(p, x).m
    nu = (1.0 - fx[0]) / fx[1]
    steps = truncation_coeffs(p, x)
    return [
        (m, x[m], (s.psi11, s.psi11 * nu + s.psi21))
        for m, s in enumerate(steps)
    ]


def gxk_closed_form(fr: Codim4Frame, k: int) -> AffineMap2:
    """Closed form of the k-fold frame x-map: shear by omega12*k plus drift."""
    return AffineMap2(
        (1.0, fr.omega12 * k, 0.0, 1.0),
        (fr.rho1 * k + fr.rho2 * fr.omega12 * k * (k - 1) / 2.0, fr.rho2 * k),
    )


def check_codim4(p: Params, x: Word, y: Word, tol: float = 1e-9) -> Codim4Report:
    """Evaluate every repeated-unit-eigenvalue scenario condition at one point.

    Failures are reported, not raised.
    """
    report = Codim4Report()
    conds = report.conditions
    prim = is_primitive(x)
    conds.append(Condition("x-primitive", prim, True, prim))
    differ = x[0] != y[0]
    conds.append(Condition("first-symbols-differ", differ, True, differ))

    m = compose_word(p, x).m
    det_res = mat_det(m) - 1.0
    tr_res = mat_trace(m) - 2.0
    report.det_residual, report.trace_residual = det_res, tr_res
    conds.append(Condition("det-residual", det_res, f"|.|<={tol}", abs(det_res) <= tol))
    conds.append(Condition("trace-residual", tr_res, f"|.|<={tol}", abs(tr_res) <= tol))
    if abs(det_res) > tol or abs(tr_res) > tol:
        return report

    try:
        fr = frame(p, x, y, tol)
        report.vertical_eigenvector = False
    except VerticalEigenvectorError as exc:
        report.vertical_eigenvector = True
        conds.append(Condition("eigenvector-not-vertical", str(exc), "", False))
        return report
    except FrameError as exc:
        conds.append(Condition("frame", str(exc), "", False))
        return report
    conds.append(Condition("eigenvector-not-vertical", fr.nu, "", True))
    conds.append(Condition("omega12-nonzero", fr.omega12, f"|.|>{tol}", abs(fr.omega12) > tol))
    report.gamma21 = fr.gamma21
    report.gamma22_plus_one = fr.gamma22 + 1.0
    report.rho2 = fr.rho2
    report.gamma11 = fr.gamma11
    conds.append(Condition("gamma21-vanishes", fr.gamma21, f"|.|<={tol}", abs(fr.gamma21) <= tol))
    conds.append(
        Condition("gamma22-is-minus-one", fr.gamma22, f"|.+1|<={tol}", abs(fr.gamma22 + 1.0) <= tol)
    )
    conds.append(Condition("rho2-nonzero", fr.rho2, f"|.|>{tol}", abs(fr.rho2) > tol))
    if abs(p.deltaL - 1.0) <= tol and abs(p.deltaR - 1.0) <= tol:
        conds.append(
            Condition(
                "gamma11-is-minus-one-area-preserving", fr.gamma11,
                f"|.+1|<={tol}", abs(fr.gamma11 + 1.0) <= tol,
            )
        )

    steps = truncation_coeffs(p, x)
    report.psi11 = [s.psi11 for s in steps]
    psis_ok = all(abs(s.psi11) > tol for s in steps)
    conds.append(Condition("psi11-all-nonzero", report.psi11, f"|.|>{tol}", psis_ok))
    signs = []
    for mth, s in enumerate(steps):
        prod = s.psi11 * fr.omega12 * fr.rho2
        want_negative = x[mth] == "R"
        signs.append(prod < 0.0 if want_negative else prod > 0.0)
    report.sign_ok = signs
    conds.append(
        Condition("shift-sign-conditions", signs, "sign(psi11*omega12*rho2) matches symbol",
                  all(signs))
    )
    return report


def unit_eigen_constraints(x: Word, tau_r: float, delta_r: float) -> tuple[float, float]:
    """Left-map (tau, delta) making M_x carry a repeated unit eigenvalue.

    det(M_x) = 1 fixes delta_l = delta_r^(-#R/#L); trace(M_x) = 2 is affine
    in tau_l when x contains a single L (closed form), otherwise a polynomial
    whose real roots are found numerically (the smallest-magnitude real root
    is returned).  An all-L word forces (2, 1) regardless of the right map.
    """
    n_l, n_r = symbol_counts(x)
    if n_l == 0:
        raise ConstraintError("x has no L symbols: the constraint fixes the right map instead")
    if n_r == 0:
        return 2.0, 1.0
    if delta_r > 0.0:
        delta_l = delta_r ** (-n_r / n_l)
    elif delta_r < 0.0 and n_r % n_l == 0:
        delta_l = float(delta_r) ** (-(n_r // n_l))
    else:
        raise ConstraintError(
            f"no real delta_l with delta_l^{n_l} * delta_r^{n_r} = 1 for delta_r={delta_r}"
        )

    def trace_at(tau_l: float) -> float:
        p = Params(tau_l, delta_l, tau_r, delta_r, 1.0)
        return mat_trace(compose_word(p, x).m)

    if n_l == 1:
        t0 = trace_at(0.0)
        t1 = trace_at(1.0)
        slope = t1 - t0
        if slope == 0.0:
            raise ConstraintError("trace does not depend on tau_l at this point")
        return (2.0 - t0) / slope, delta_l

    # trace is a degree-n_l polynomial in tau_l; sample and take real roots
    nodes = [float(i) for i in range(n_l + 1)]
    vand = np.vander(np.array(nodes), n_l + 1, increasing=True)
    coeffs = np.linalg.solve(vand, np.array([trace_at(t) - 2.0 for t in nodes]))
    roots = np.roots(coeffs[::-1])
    real = sorted(
        (float(r.real) for r in roots if abs(r.imag) <= 1e-9 * (1.0 + abs(r))),
        key=abs,
    )
    if not real:
        raise ConstraintError("trace(M_x) = 2 has no real solution in tau_l")
    return real[0], delta_l


@dataclass(frozen=True)
class Codim4Candidate:
    """A refined root of (gamma21, gamma22 + 1) on the unit-eigenvalue surface."""

    tauL: float
    deltaL: float
    tauR: float
    deltaR: float
    mu: float
    residuals: dict
    viable: bool
    k_probe: int | None

    def params(self) -> Params:
        return Params(self.tauL, self.deltaL, self.tauR, self.deltaR, self.mu)

    def to_dict(self) -> dict:
        return {
            "tauL": self.tauL, "deltaL": self.deltaL, "tauR": self.tauR,
            "deltaR": self.deltaR, "mu": self.mu, "residuals": self.residuals,
            "viable": self.viable, "kProbe": self.k_probe,
        }


def candidates_to_json(cands: list[Codim4Candidate]) -> str:
    return json.dumps([c.to_dict() for c in cands], indent=2)


def candidates_from_json(text: str) -> list[Codim4Candidate]:
    out = []
    for obj in json.loads(text):
        out.append(
            Codim4Candidate(
                tauL=obj["tauL"], deltaL=obj["deltaL"], tauR=obj["tauR"],
                deltaR=obj["deltaR"], mu=obj["mu"], residuals=obj["residuals"],
                viable=obj["viable"], k_probe=obj["kProbe"],
            )
        )
    return out


def _surface_params(x: Word, tau_r: float, delta_r: float, mu: float) -> Params | None:
    try:
        tau_l, delta_l = unit_eigen_constraints(x, tau_r, delta_r)
    except (ConstraintError, ZeroDivisionError, OverflowError):
        return None
    if not (math.isfinite(tau_l) and math.isfinite(delta_l)):
        return None
    return Params(tau_l, delta_l, tau_r, delta_r, mu)


def _objective(x: Word, y: Word, mu: float, tau_r: float, delta_r: float):
    p = _surface_params(x, tau_r, delta_r, mu)
    if p is None:
        return None
    try:
        _, _, _, _, gamma, _ = _shear_frame_raw(p, x, y, 1e-13)
    except FrameError:
        return None
    g21, g22 = gamma[2], gamma[3]
    if not (math.isfinite(g21) and math.isfinite(g22)):
        return None
    return (g21, g22 + 1.0)


def _newton_refine(fun, seed, box, residual_target=1e-12, max_iter=60):
    tx, dx = seed
    (t_lo, t_hi), (d_lo, d_hi) = box
    span_t, span_d = t_hi - t_lo, d_hi - d_lo
    best = None
    for _ in range(max_iter):
        f = fun(tx, dx)
        if f is None:
            return best
        res = max(abs(f[0]), abs(f[1]))
        if best is None or res < best[2]:
            best = (tx, dx, res)
        if res < residual_target:
            return tx, dx, res
        ht = 1e-7 * (1.0 + abs(tx))
        hd = 1e-7 * (1.0 + abs(dx))
        ft = fun(tx + ht, dx)
        fd = fun(tx, dx + hd)
        if ft is None or fd is None:
            return best
        j11 = (ft[0] - f[0]) / ht
        j21 = (ft[1] - f[1]) / ht
        j12 = (fd[0] - f[0]) / hd
        j22 = (fd[1] - f[1]) / hd
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            return best
        step_t = (f[0] * j22 - j12 * f[1]) / det
        step_d = (j11 * f[1] - j21 * f[0]) / det
        tx, dx = tx - step_t, dx - step_d
        # keep the iterate near the scanned box; far excursions mean a pole
        if not (t_lo - 0.5 * span_t <= tx <= t_hi + 0.5 * span_t):
            return best
        if not (d_lo - 0.5 * span_d <= dx <= d_hi + 0.5 * span_d):
            return best
    return best


def _bisection_refine(fun, cell, residual_target=1e-12):
    """Fallback: track the gamma21 = 0 curve by 1-D bisection in tau while
    bisecting delta on the sign of gamma22 + 1 along that curve."""
    (t0, t1), (d0, d1) = cell

    def tau_root(d):
        a, b = t0, t1
        fa = fun(a, d)
        fb = fun(b, d)
        if fa is None or fb is None or fa[0] * fb[0] > 0:
            return None
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = fun(m, d)
            if fm is None:
                return None
            if fa[0] * fm[0] <= 0:
                b = m
            else:
                a, fa = m, fm
            if abs(b - a) < 1e-15 * (1.0 + abs(a)):
                break
        return 0.5 * (a + b)

    def g(d):
        t = tau_root(d)
        if t is None:
            return None, None
        f = fun(t, d)
        return (None, None) if f is None else (t, f[1])

    ta, ga = g(d0)
    tb, gb = g(d1)
    if ga is None or gb is None or ga * gb > 0:
        return None
    lo, hi = d0, d1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        tm, gm = g(mid)
        if gm is None:
            return None
        if ga * gm <= 0:
            hi = mid
        else:
            lo, ga = mid, gm
        if hi - lo < 1e-15 * (1.0 + abs(lo)):
            break
    d_star = 0.5 * (lo + hi)
    t_star, _ = g(d_star)
    if t_star is None:
        return None
    f = fun(t_star, d_star)
    if f is None:
        return None
    res = max(abs(f[0]), abs(f[1]))
    return (t_star, d_star, res) if res < residual_target * 1e3 else None


def find_codim4(
    x: Word,
    y: Word,
    mu: float,
    tau_range: tuple[float, float],
    delta_range: tuple[float, float],
    grid: int = 200,
    k_probe: int = 64,
    residual_target: float = 1e-12,
) -> list[Codim4Candidate]:
    """Scan the unit-eigenvalue surface for joint zeros of gamma21 and gamma22 + 1.

    Grid cells where both components change sign seed a 2-D Newton iteration
    with finite-difference Jacobian (nested bisection as fallback).  Each
    refined root is classified by solving the x^k y cycles up to ``k_probe``:
    roots where no cycle is ever admissible are flagged as not viable.
    Results follow row-major scan order, so output order is reproducible.
    """
    t_lo, t_hi = tau_range
    d_lo, d_hi = delta_range
    taus = [t_lo + (t_hi - t_lo) * i / grid for i in range(grid + 1)]
    deltas = [d_lo + (d_hi - d_lo) * j / grid for j in range(grid + 1)]

    def fun(t, d):
        return _objective(x, y, mu, t, d)

    values = [[fun(t, d) for t in taus] for d in deltas]
    roots: list[tuple[float, float, float]] = []
    for j in range(grid):
        for i in range(grid):
            corners = [values[j][i], values[j][i + 1], values[j + 1][i], values[j + 1][i + 1]]
            if any(c is None for c in corners):
                continue
            g21s = [c[0] for c in corners]
            g22s = [c[1] for c in corners]
            if min(g21s) > 0 or max(g21s) < 0 or min(g22s) > 0 or max(g22s) < 0:
                continue
            cell = ((taus[i], taus[i + 1]), (deltas[j], deltas[j + 1]))
            seed = (0.5 * (taus[i] + taus[i + 1]), 0.5 * (deltas[j] + deltas[j + 1]))
            hit = _newton_refine(fun, seed, (tau_range, delta_range), residual_target)
            if hit is None or hit[2] > 1e-10:
                hit = _bisection_refine(fun, cell, residual_target)
            if hit is None or hit[2] > 1e-10:
                continue
            if not (t_lo <= hit[0] <= t_hi and d_lo <= hit[1] <= d_hi):
                continue
            if any(abs(hit[0] - r[0]) < 1e-6 and abs(hit[1] - r[1]) < 1e-6 for r in roots):
                continue
            roots.append(hit)

    candidates = []
    for tau_r, delta_r, _res in roots:
        p = _surface_params(x, tau_r, delta_r, mu)
        f = fun(tau_r, delta_r)
        if p is None or f is None:
            continue
        try:
            _, _, omega, rho, _, _ = _shear_frame_raw(p, x, y, 1e-13)
        except FrameError:
            continue
        # rho2 = 0 or omega12 = 0 voids the scenario structurally (no drift
        # or no shear), and marks whole curves where the solved pair of
        # conditions degenerates rather than isolated candidate points
        if abs(rho[1]) <= 1e-8 or abs(omega[1]) <= 1e-8:
            continue
        m = compose_word(p, x).m
        residuals = {
            "gamma21": f[0],
            "gamma22PlusOne": f[1],
            "detMinusOne": mat_det(m) - 1.0,
            "traceMinusTwo": mat_trace(m) - 2.0,
            "rho2": rho[1],
        }
        first_admissible = None
        for k in range(1, k_probe + 1):
            try:
                cyc = solve_cycle(p, family_word(x, k, y), family=(x, k, y))
            except UnitEigenvalueError:
                continue
            if cyc.margin > 0.0:
                first_admissible = k
                break
        candidates.append(
            Codim4Candidate(
                tauL=p.tauL, deltaL=p.deltaL, tauR=tau_r, deltaR=delta_r, mu=mu,
                residuals=residuals, viable=first_admissible is not None,
                k_probe=first_admissible,
            )
        )
    return candidates


def alpha_beta(fam, x: Word | None = None) -> tuple[float, float]:
    """First eps-derivatives of det and trace of M_x along the family direction.

    Dual-number propagation through the matrix product: the entries are
    polynomial in eps, so both derivatives are exact up to rounding.
    """
    x = fam.x if x is None else x
    m = compose_word(_dual_params(fam.base, fam.direction), x).m
    n_l, n_r = symbol_counts(x)
    p = _dual_params(fam.base, fam.direction)
    det_dual = p.deltaL**n_l * p.deltaR**n_r
    return deriv_of(det_dual), deriv_of(mat_trace(m))


@dataclass(frozen=True)
class RTheta:
    """Polar data of the multiplier pair of M_x at one perturbation size."""

    r: float
    theta: float
    complex_pair: bool


def r_theta(fam, eps: float, x: Word | None = None) -> RTheta:
    """Modulus and argument of the multipliers of M_x at perturbation eps.

    When the pair is real the polar data is undefined and ``complex_pair``
    is False (the direction then lies outside the attracting regime).
    """
    from .sweep import family_params

    x = fam.x if x is None else x
    m = compose_word(family_params(fam, eps), x).m
    det = mat_det(m)
    tr = mat_trace(m)
    disc = tr * tr - 4.0 * det
    if disc >= 0.0 or det <= 0.0:
        return RTheta(math.nan, math.nan, False)
    return RTheta(math.sqrt(det), math.atan2(math.sqrt(-disc) / 2.0, tr / 2.0), True)
