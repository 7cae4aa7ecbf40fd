"""Tiny 2x2 linear algebra over any field-like scalar type.

Matrices are flat 4-tuples ``(m11, m12, m21, m22)`` in row-major order and
vectors are pairs ``(x, y)``.  All functions are written against the plain
arithmetic operators only, so the same code path serves floats, dual numbers
(forward-mode derivatives) and exact quadratic-field elements.
"""

from __future__ import annotations

from typing import NamedTuple

Mat2 = tuple  # (m11, m12, m21, m22)
Vec2 = tuple  # (x, y)


class AffineMap2(NamedTuple):
    """Affine planar map v -> m @ v + t."""

    m: Mat2
    t: Vec2


def mat_mul(a: Mat2, b: Mat2) -> Mat2:
    a11, a12, a21, a22 = a
    b11, b12, b21, b22 = b
    return (
        a11 * b11 + a12 * b21,
        a11 * b12 + a12 * b22,
        a21 * b11 + a22 * b21,
        a21 * b12 + a22 * b22,
    )


def mat_vec(m: Mat2, v: Vec2) -> Vec2:
    m11, m12, m21, m22 = m
    x, y = v
    return (m11 * x + m12 * y, m21 * x + m22 * y)


def mat_det(m: Mat2):
    return m[0] * m[3] - m[1] * m[2]


def mat_trace(m: Mat2):
    return m[0] + m[3]


def mat_sub(a: Mat2, b: Mat2) -> Mat2:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3])


def mat_identity_like(m: Mat2) -> Mat2:
    zero = m[0] * 0
    one = zero + 1
    return (one, zero, zero, one)


def mat_inv(m: Mat2) -> Mat2:
    d = mat_det(m)
    return (m[3] / d, -m[1] / d, -m[2] / d, m[0] / d)


def solve2(m: Mat2, b: Vec2) -> Vec2:
    """Solve m @ v = b by Cramer's rule."""
    d = mat_det(m)
    return ((b[0] * m[3] - m[1] * b[1]) / d, (m[0] * b[1] - m[2] * b[0]) / d)


def affine_apply(f: AffineMap2, v: Vec2) -> Vec2:
    mx, my = mat_vec(f.m, v)
    return (mx + f.t[0], my + f.t[1])


def affine_compose(outer: AffineMap2, inner: AffineMap2) -> AffineMap2:
    """The map v -> outer(inner(v))."""
    t = affine_apply(outer, inner.t)
    return AffineMap2(mat_mul(outer.m, inner.m), t)


def affine_identity_like(f: AffineMap2) -> AffineMap2:
    zero = f.t[0] * 0
    return AffineMap2(mat_identity_like(f.m), (zero, zero))


def affine_pow(f: AffineMap2, k: int) -> AffineMap2:
    """k-fold self-composition of f, k >= 0, by repeated squaring."""
    if k < 0:
        raise ValueError("affine_pow requires k >= 0")
    result = affine_identity_like(f)
    base = f
    while k:
        if k & 1:
            result = affine_compose(base, result)
        k >>= 1
        if k:
            base = affine_compose(base, base)
    return result
