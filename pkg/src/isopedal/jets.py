"""Truncated two-variable jets (Taylor tables) with exact arithmetic.

A jet of order d at a base point stores the scaled Taylor coefficients

    c[i, j] = (d^{i+j} u / dx^i dy^j) / (i! j!),   i + j <= d,

so that multiplication of jets is truncated coefficient convolution and
polynomial lifts are exact in floating point up to rounding.  Entries of
the square table with i + j > d are kept at zero.

Jets are batched: the coefficient array has shape (*batch, d+1, d+1) and
every operation is vectorized over the leading axes.  This is how grid
evaluation is parallelized - one jet pipeline runs for all grid points at
once.  Values are stored complex; real-valued pipelines simply carry a
zero imaginary part, and holomorphic lifts keep their complex structure
for Wirtinger work (d = (d/dx - i d/dy)/2).

Division and square root are power series in the normalized remainder
u = a/a0 - 1, which is nilpotent at order d+1, so `order` Horner steps
give the exact truncation.  Degenerate denominators either raise
`DegenerateJet` (point APIs) or are masked out by a `guard` array (grid
pipelines), in which case the affected batch entries hold junk and the
caller keeps the mask.
"""

from __future__ import annotations

import math

import numpy as np

from .cpoly import cp_max_abs
from .errors import DegenerateJet, RankDeficient

DEFAULT_ORDER = 4

_TRI = {}


def _tri(D):
    m = _TRI.get(D)
    if m is None:
        k = np.arange(D)
        m = (k[:, None] + k[None, :]) <= (D - 1)
        _TRI[D] = m
    return m


def _sqrt_series(order):
    # binomial(1/2, k) for k = 0..order
    out = [1.0]
    for k in range(order):
        out.append(out[-1] * (0.5 - k) / (k + 1))
    return out


class Jet:
    """One truncated Taylor table, batched over leading axes."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = c

    # -- constructors --------------------------------------------------

    @staticmethod
    def const(value, order, batch=()):
        value = np.asarray(value, dtype=complex)
        shape = np.broadcast_shapes(value.shape, tuple(batch))
        c = np.zeros(shape + (order + 1, order + 1), dtype=complex)
        c[..., 0, 0] = value
        return Jet(c)

    @staticmethod
    def zeros(order, batch=()):
        return Jet(np.zeros(tuple(batch) + (order + 1, order + 1), dtype=complex))

    @staticmethod
    def coordinate(x0, axis, order, batch=None):
        """The jet of the coordinate function x (axis=0) or y (axis=1)."""
        x0 = np.asarray(x0, dtype=complex)
        shape = x0.shape if batch is None else tuple(batch)
        c = np.zeros(shape + (order + 1, order + 1), dtype=complex)
        c[..., 0, 0] = x0
        if order >= 1:
            if axis == 0:
                c[..., 1, 0] = 1.0
            else:
                c[..., 0, 1] = 1.0
        return Jet(c)

    # -- basic queries ---------------------------------------------------

    @property
    def order(self):
        return self.c.shape[-1] - 1

    @property
    def batch(self):
        return self.c.shape[:-2]

    def value(self):
        return self.c[..., 0, 0]

    def deriv(self, i, j):
        """Derivative value d^{i+j}/dx^i dy^j (unscaled)."""
        if i + j > self.order:
            raise ValueError(f"derivative ({i},{j}) beyond jet order {self.order}")
        return self.c[..., i, j] * (math.factorial(i) * math.factorial(j))

    def copy(self):
        return Jet(self.c.copy())

    def truncate(self, order):
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot raise jet order by truncation")
        D = order + 1
        return Jet(self.c[..., :D, :D] * _tri(D))

    # -- ring operations -------------------------------------------------

    def _pair(self, other):
        k = min(self.order, other.order)
        return self.truncate(k), other.truncate(k)

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b = self._pair(other)
            return Jet(a.c + b.c)
        return self.add_const(other)

    def __sub__(self, other):
        if isinstance(other, Jet):
            a, b = self._pair(other)
            return Jet(a.c - b.c)
        return self.add_const(-np.asarray(other, dtype=complex))

    def __neg__(self):
        return Jet(-self.c)

    def add_const(self, value):
        c = self.c.copy()
        c[..., 0, 0] += np.asarray(value, dtype=complex)
        return Jet(c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        a, b = self._pair(other)
        D = a.order + 1
        batch = np.broadcast_shapes(a.batch, b.batch)
        out = np.zeros(batch + (D, D), dtype=complex)
        ac, bc = a.c, b.c
        for i in range(D):
            for j in range(D - i):
                out[..., i:, j:] += ac[..., : D - i, : D - j] * bc[..., i : i + 1, j : j + 1]
        out *= _tri(D)
        return Jet(out)

    def scale(self, s):
        s = np.asarray(s, dtype=complex)
        return Jet(self.c * s[..., None, None])

    def _guard_value(self, guard, bad, what):
        v = self.value()
        if guard is None:
            if np.any(bad):
                raise DegenerateJet(f"{what} (order-0 coefficient {v.flat[:1]})")
            return v
        ok = np.asarray(guard, dtype=bool) & ~bad
        return np.where(ok, v, 1.0)

    def recip(self, guard=None):
        """Multiplicative inverse as a jet.

        With `guard=None`, raises DegenerateJet when the order-0
        coefficient vanishes (relative magnitude below 1e-12); with a
        boolean `guard`, degenerate batch entries are replaced by junk
        and left for the caller's mask.
        """
        v = self.value()
        scale = np.max(np.abs(self.c), axis=(-2, -1))
        bad = ~(np.abs(v) > 1e-12 * scale)
        safe = self._guard_value(guard, bad, "division by a vanishing jet")
        u = Jet(self.c / safe[..., None, None])
        uc = u.c
        uc[..., 0, 0] = 0.0
        acc = Jet.const(np.ones(u.batch), self.order)
        for _ in range(self.order):
            acc = -(u * acc)
            acc.c[..., 0, 0] += 1.0
        return Jet(acc.c / safe[..., None, None])

    def sqrt(self, guard=None):
        """Principal square root; order-0 coefficient must be a positive real."""
        v = self.value()
        bad = ~((v.real > 0) & (np.abs(v.imag) <= 1e-9 * np.abs(v) + 1e-300))
        safe = self._guard_value(guard, bad, "square root needs a positive real value")
        u = Jet(self.c / safe[..., None, None])
        uc = u.c
        uc[..., 0, 0] = 0.0
        series = _sqrt_series(self.order)
        acc = Jet.const(np.full(u.batch, series[-1]), self.order)
        for k in range(self.order - 1, -1, -1):
            acc = u * acc
            acc.c[..., 0, 0] += series[k]
        return Jet(acc.c * np.sqrt(safe)[..., None, None])

    def div(self, other, guard=None):
        return self * other.recip(guard=guard)

    # -- calculus ----------------------------------------------------------

    def dx(self):
        D = self.order + 1
        if D < 2:
            raise ValueError("cannot differentiate an order-0 jet")
        w = np.arange(1, D, dtype=float)[:, None]
        return Jet(self.c[..., 1:, :-1] * w)

    def dy(self):
        D = self.order + 1
        if D < 2:
            raise ValueError("cannot differentiate an order-0 jet")
        w = np.arange(1, D, dtype=float)[None, :]
        return Jet(self.c[..., :-1, 1:] * w)

    def wirtinger(self):
        """The Wirtinger derivative (d/dx - i d/dy)/2 as a jet of order-1."""
        return Jet(0.5 * (self.dx().c - 1j * self.dy().c))

    def real(self):
        return Jet(self.c.real.astype(complex))

    def imag(self):
        return Jet(self.c.imag.astype(complex))

    def conj(self):
        return Jet(np.conj(self.c))


class JetVec:
    """A tuple of jets sharing order and batch: a jet of a vector map."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        self.comps = list(comps)

    @staticmethod
    def const(vec, order, batch=()):
        return JetVec([Jet.const(v, order, batch) for v in vec])

    def __len__(self):
        return len(self.comps)

    def __iter__(self):
        return iter(self.comps)

    def __getitem__(self, k):
        return self.comps[k]

    @property
    def order(self):
        return self.comps[0].order

    @property
    def batch(self):
        return self.comps[0].batch

    def __add__(self, other):
        return JetVec([a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return JetVec([a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return JetVec([-a for a in self.comps])

    def scale(self, s):
        if isinstance(s, Jet):
            return JetVec([a * s for a in self.comps])
        return JetVec([a.scale(s) for a in self.comps])

    def dot(self, other):
        """Bilinear pairing sum_k u_k v_k (no conjugation)."""
        if len(self) != len(other):
            raise ValueError(f"component mismatch: {len(self)} vs {len(other)}")
        acc = self.comps[0] * other.comps[0]
        for a, b in zip(self.comps[1:], other.comps[1:]):
            acc = acc + a * b
        return acc

    def norm_sq(self):
        return self.dot(self)

    def dx(self):
        return JetVec([a.dx() for a in self.comps])

    def dy(self):
        return JetVec([a.dy() for a in self.comps])

    def wirtinger(self):
        return JetVec([a.wirtinger() for a in self.comps])

    def truncate(self, order):
        return JetVec([a.truncate(order) for a in self.comps])

    def real(self):
        return JetVec([a.real() for a in self.comps])

    def imag(self):
        return JetVec([a.imag() for a in self.comps])

    def conj(self):
        return JetVec([a.conj() for a in self.comps])

    def translate(self, vec):
        """Add a constant ambient vector (one entry per component)."""
        if len(vec) != len(self.comps):
            raise ValueError("translation dimension mismatch")
        return JetVec([a.add_const(v) for a, v in zip(self.comps, vec)])

    def value(self):
        """Order-0 values stacked to shape (n, *batch)."""
        return np.stack([a.value() for a in self.comps])

    def deriv(self, i, j):
        return np.stack([a.deriv(i, j) for a in self.comps])

    def project_off(self, frames):
        """Subtract components along jet-orthonormal `frames`."""
        v = self
        for e in frames:
            v = v - e.scale(v.dot(e))
        return v


# -- public operations -------------------------------------------------------


def jet_arith(a, b, op):
    """Named arithmetic on jets: add | sub | mul | div."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a.div(b)
    raise ValueError(f"unknown jet operation {op!r}")


def jet_dot(u, v):
    return u.dot(v)


def jet_lift(curve, x, y, order=DEFAULT_ORDER):
    """Lift a holomorphic polynomial curve to complex jets at z = x + iy.

    Returns one complex jet per curve component: the full Taylor table of
    w_k(x + iy) in the real variables, exact for polynomials.  The real
    surface jet (component-wise real part) is `jet_lift(...).real()`.
    """
    if order < 2:
        raise ValueError("surface work needs jets of order >= 2")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    batch = np.broadcast_shapes(x.shape, y.shape)
    D = order + 1
    zc = np.zeros(batch + (D, D), dtype=complex)
    zc[..., 0, 0] = x + 1j * y
    zc[..., 1, 0] = 1.0
    zc[..., 0, 1] = 1j
    Z = Jet(zc)
    comps = []
    for p in curve:
        if not p:
            comps.append(Jet.zeros(order, batch))
            continue
        acc = Jet.const(np.full(batch, p[-1], dtype=complex), order)
        for c in reversed(p[:-1]):
            acc = acc * Z
            acc.c[..., 0, 0] += c
        comps.append(acc)
    return JetVec(comps)


def lift_scalar_polynomial(coeffs, x, y, order=DEFAULT_ORDER):
    """Lift a real bivariate polynomial sum a[i,j] x^i y^j to a jet."""
    coeffs = np.asarray(coeffs, dtype=complex)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    batch = np.broadcast_shapes(x.shape, y.shape)
    X = Jet.coordinate(np.broadcast_to(x, batch), 0, order)
    Y = Jet.coordinate(np.broadcast_to(y, batch), 1, order)
    acc = Jet.zeros(order, batch)
    for row in coeffs[::-1]:
        racc = Jet.zeros(order, batch)
        for c in row[::-1]:
            racc = racc * Y
            racc.c[..., 0, 0] += c
        acc = acc * X + racc
    return acc


def jet_gram_schmidt(vectors, eps=1e-9, guard=None, with_coeffs=False):
    """Classical Gram-Schmidt on jet vectors, in jet arithmetic.

    Returns orthonormal jet frames spanning the same flag of subspaces;
    orthonormality holds as a jet identity through the input order.  A
    residual whose pointwise norm falls below `eps` times the input scale
    raises RankDeficient (or is masked under `guard`: the second return
    value is the per-point validity mask).

    With `with_coeffs=True` also returns the lower-triangular jet
    coefficients L with frames[i] = sum_j L[i][j] * vectors[j].
    """
    if not vectors:
        raise ValueError("need at least one vector")
    order = vectors[0].order
    batch = np.broadcast_shapes(*[v.batch for v in vectors])
    scale_sq = np.zeros(batch)
    for v in vectors:
        scale_sq = np.maximum(scale_sq, v.norm_sq().value().real)
    ok = np.ones(batch, dtype=bool) if guard is None else np.broadcast_to(np.asarray(guard, bool), batch).copy()

    frames = []
    rows = []
    nvec = len(vectors)
    for i, v in enumerate(vectors):
        w = v
        row = [Jet.zeros(order, batch) for _ in range(nvec)]
        row[i] = Jet.const(np.ones(batch), order)
        for j, e in enumerate(frames):
            d = w.dot(e)
            w = w - e.scale(d)
            if with_coeffs:
                row = [rc - rj * d for rc, rj in zip(row, rows[j])]
        nsq = w.norm_sq()
        good = nsq.value().real > (eps ** 2) * scale_sq
        if guard is None:
            if not np.all(good):
                raise RankDeficient(f"vector {i} is dependent at the point (eps={eps})")
        ok &= good
        inv = nsq.sqrt(guard=ok).recip(guard=ok)
        frames.append(w.scale(inv))
        if with_coeffs:
            rows.append([rc * inv for rc in row])
    if with_coeffs:
        return (frames, rows, ok) if guard is not None else (frames, rows)
    return (frames, ok) if guard is not None else frames


def curve_coefficient_scale(curve):
    """Largest coefficient magnitude over a polynomial curve (0 if empty)."""
    return max((cp_max_abs(p) for p in curve), default=0.0)
