"""Holomorphic polynomials in one complex variable, and vectors of them.

A polynomial is a plain list of complex coefficients, lowest degree first,
with trailing (exact) zeros stripped.  The zero polynomial is the empty
list and has degree -1.  A curve is a list of such polynomials, one per
complex ambient component.

The bilinear pairing `cv_dot` is the sum of products of components with
no conjugation: the isotropy condition used throughout the package is
`cv_dot(u, u) == 0` as a polynomial, not a Hermitian norm.
"""

from __future__ import annotations

import numpy as np

CPoly = list  # list[complex], coefficients low -> high
CVecPoly = list  # list[CPoly]


def cp_trim(p) -> CPoly:
    """Strip trailing zero coefficients (canonical form)."""
    n = len(p)
    while n > 0 and p[n - 1] == 0:
        n -= 1
    return [complex(c) for c in p[:n]]


def cp_degree(p) -> int:
    """Degree of a canonical polynomial; the zero polynomial has degree -1."""
    return len(cp_trim(p)) - 1


def cp_add(p, q) -> CPoly:
    n = max(len(p), len(q))
    out = [complex(0)] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return cp_trim(out)


def cp_sub(p, q) -> CPoly:
    return cp_add(p, [-complex(c) for c in q])


def cp_scale(p, c) -> CPoly:
    c = complex(c)
    return cp_trim([c * complex(a) for a in p])


def cp_mul(p, q) -> CPoly:
    p = cp_trim(p)
    q = cp_trim(q)
    if not p or not q:
        return []
    out = [complex(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return cp_trim(out)


def cp_diff(p) -> CPoly:
    """d/dz, degree drops by one."""
    return cp_trim([k * complex(c) for k, c in enumerate(p)][1:])


def cp_int(p) -> CPoly:
    """Antiderivative with integration constant fixed to zero."""
    return cp_trim([complex(0)] + [complex(c) / (k + 1) for k, c in enumerate(p)])


def cp_arith(a, b, op: str) -> CPoly:
    """Named dispatcher over the ring operations (op: add|sub|mul|scale).

    For `scale`, b is a complex scalar.
    """
    if op == "add":
        return cp_add(a, b)
    if op == "sub":
        return cp_sub(a, b)
    if op == "mul":
        return cp_mul(a, b)
    if op == "scale":
        return cp_scale(a, b)
    raise ValueError(f"unknown polynomial operation {op!r}")


def cp_calculus(a, op: str) -> CPoly:
    """Named dispatcher over d/dz and its inverse (op: differentiate|integrate)."""
    if op == "differentiate":
        return cp_diff(a)
    if op == "integrate":
        return cp_int(a)
    raise ValueError(f"unknown calculus operation {op!r}")


def cp_eval(p, z):
    """Horner evaluation; `z` may be a scalar or an ndarray."""
    if np.ndim(z) == 0:
        acc = complex(0)
        for c in reversed(p):
            acc = acc * complex(z) + c
        return acc
    acc = np.zeros(np.shape(z), dtype=complex)
    for c in reversed(p):
        acc = acc * z + c
    return acc


def cp_max_abs(p) -> float:
    return max((abs(c) for c in p), default=0.0)


# -- vectors of polynomials -------------------------------------------------

def cv_trim(u) -> CVecPoly:
    return [cp_trim(p) for p in u]


def cv_add(u, v) -> CVecPoly:
    if len(u) != len(v):
        raise ValueError(f"component mismatch: {len(u)} vs {len(v)}")
    return [cp_add(p, q) for p, q in zip(u, v)]


def cv_scale(u, c) -> CVecPoly:
    """Scale every component, by a constant or by a polynomial."""
    if isinstance(c, (list, tuple)):
        return [cp_mul(p, list(c)) for p in u]
    return [cp_scale(p, c) for p in u]


def cv_dot(u, v) -> CPoly:
    """Bilinear pairing sum_i u_i * v_i (no conjugation)."""
    if len(u) != len(v):
        raise ValueError(f"component mismatch: {len(u)} vs {len(v)}")
    acc: CPoly = []
    for p, q in zip(u, v):
        acc = cp_add(acc, cp_mul(p, q))
    return acc


def cv_diff(u) -> CVecPoly:
    return [cp_diff(p) for p in u]


def cv_int(u) -> CVecPoly:
    return [cp_int(p) for p in u]


def cv_eval(u, z):
    """Evaluate all components; returns a list (scalar z) or ndarray stack."""
    if np.ndim(z) == 0:
        return [cp_eval(p, z) for p in u]
    return np.stack([cp_eval(p, z) for p in u])


def cv_max_abs(u) -> float:
    return max((cp_max_abs(p) for p in u), default=0.0)


def cv_degree(u) -> int:
    return max((cp_degree(p) for p in u), default=-1)


def cv_linear_map(mat, u) -> CVecPoly:
    """Apply a constant matrix (rows x len(u)) to a polynomial vector."""
    mat = np.asarray(mat)
    if mat.shape[1] != len(u):
        raise ValueError(f"matrix columns {mat.shape[1]} != components {len(u)}")
    out = []
    for row in mat:
        acc: CPoly = []
        for c, p in zip(row, u):
            acc = cp_add(acc, cp_scale(p, c))
        out.append(acc)
    return out
