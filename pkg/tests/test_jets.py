"""Truncated jet arithmetic against an independent symbolic oracle.

Every rule the geometry relies on (product, reciprocal, square root,
partial derivatives, Gram-Schmidt in jet arithmetic) is compared with
sympy derivatives of the same closed-form expressions, and with central
finite differences as a second, oracle-free route.
"""

import numpy as np
import pytest
import sympy as sp

from isopedal.errors import DegenerateJet
from isopedal.jets import Jet, JetVec, jet_gram_schmidt, jet_lift

X, Y = sp.symbols("x y", real=True)


def sym_derivs(expr, x0, y0, order):
    """Table of d^{i+j} expr / dx^i dy^j at (x0, y0), i + j <= order."""
    out = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            d = sp.diff(expr, X, i, Y, j)
            out[(i, j)] = complex(d.subs({X: x0, Y: y0}))
    return out


def build_jet(expr_fn, x0, y0, order):
    x = Jet.coordinate(np.asarray(x0), 0, order)
    y = Jet.coordinate(np.asarray(y0), 1, order)
    return expr_fn(x, y)


def compare(jet, expr, x0, y0, rtol=1e-12):
    table = sym_derivs(expr, x0, y0, jet.order)
    scale = max(max(abs(v) for v in table.values()), 1.0)
    for (i, j), want in table.items():
        got = complex(jet.deriv(i, j))
        assert abs(got - want) <= rtol * scale, (i, j, got, want)


def test_polynomial_jet_derivatives():
    x0, y0 = 0.7, -0.4
    jet = build_jet(lambda x, y: x * x * y + x.scale(3.0) - y * y * y, x0, y0, 4)
    compare(jet, X**2 * Y + 3 * X - Y**3, x0, y0)


def test_recip_jet_derivatives():
    x0, y0 = 0.5, 0.8
    jet = build_jet(
        lambda x, y: (x * x + y * y).add_const(1.0).recip(), x0, y0, 5
    )
    compare(jet, 1 / (1 + X**2 + Y**2), x0, y0)


def test_sqrt_jet_derivatives():
    x0, y0 = 1.1, -0.3
    jet = build_jet(
        lambda x, y: (x * x + y * y).add_const(2.0).sqrt(), x0, y0, 5
    )
    compare(jet, sp.sqrt(2 + X**2 + Y**2), x0, y0)


def test_composite_rational_jet():
    x0, y0 = 0.9, 0.2
    jet = build_jet(
        lambda x, y: (x * y).add_const(1.0) * (x * x + y.scale(2.0)).add_const(3.0).recip(),
        x0, y0, 4,
    )
    compare(jet, (1 + X * Y) / (3 + X**2 + 2 * Y), x0, y0)


def test_dx_dy_drop_one_order():
    x = Jet.coordinate(np.asarray(0.3), 0, 4)
    assert x.order == 4
    assert x.dx().order == 3
    assert x.dx().dy().order == 2


def test_wirtinger_of_holomorphic_lift_kills_zbar():
    # for jets of a holomorphic function, (d/dx + i d/dy) f = 0
    phi = [[0, 1, 0.5j, 2]]  # z + 0.5i z^2 + 2 z^3
    lifted = jet_lift(phi, np.asarray(0.4), np.asarray(0.7), 4)[0]
    anti = lifted.dx() + lifted.dy().scale(1j)
    assert np.max(np.abs(anti.c)) < 1e-12


def test_jet_lift_matches_symbolic_curve():
    z = X + sp.I * Y
    expr = (z**3 - 2 * z).expand()
    lifted = jet_lift([[0, -2, 0, 1]], np.asarray(0.6), np.asarray(-0.2), 4)[0]
    compare(lifted, expr, 0.6, -0.2)


def test_recip_raises_on_degenerate_without_guard():
    x = Jet.coordinate(np.asarray(0.0), 0, 3)
    with pytest.raises(DegenerateJet):
        x.recip()


def test_recip_guard_masks_bad_lanes():
    vals = np.array([0.0, 2.0])
    x = Jet.coordinate(vals, 0, 3)
    guard = vals != 0.0
    r = x.recip(guard=guard)
    assert abs(r.value()[1] - 0.5) < 1e-14
    assert np.all(np.isfinite(r.c))  # junk but finite in the masked lane


def test_sqrt_rejects_negative_values():
    x = Jet.coordinate(np.asarray(-1.0), 0, 3)
    with pytest.raises(DegenerateJet):
        x.sqrt()


def test_batched_matches_scalar_loop():
    rng = np.random.default_rng(11)
    xs = rng.uniform(0.3, 1.3, size=7)
    ys = rng.uniform(0.3, 1.3, size=7)

    def expr(x, y):
        return (x * x * y).add_const(1.5).recip() * (x + y)

    batch = expr(Jet.coordinate(xs, 0, 3), Jet.coordinate(ys, 1, 3))
    for k in range(7):
        single = expr(
            Jet.coordinate(np.asarray(xs[k]), 0, 3),
            Jet.coordinate(np.asarray(ys[k]), 1, 3),
        )
        assert np.max(np.abs(batch.c[k] - single.c)) < 1e-14


def test_jetvec_dot_is_bilinear():
    order = 3
    i_jet = Jet.const(np.asarray(1j), order)
    v = JetVec([i_jet])
    assert abs(v.dot(v).value() + 1.0) < 1e-15  # (i) . (i) = -1, no conjugation


def test_project_off_removes_components():
    rng = np.random.default_rng(12)
    x0 = np.asarray(rng.uniform(0.3, 1.3, size=4))
    y0 = np.asarray(rng.uniform(0.3, 1.3, size=4))
    x = Jet.coordinate(x0, 0, 3)
    y = Jet.coordinate(y0, 1, 3)
    u = JetVec([x, y, x * y])
    frames, ok = jet_gram_schmidt([u], guard=np.ones(x0.shape, dtype=bool))
    assert np.all(ok)
    w = JetVec([y, x, (x + y)])
    res = w.project_off(frames)
    # the residual is orthogonal to the frame at every point
    ip = res.dot(frames[0]).value()
    assert np.max(np.abs(ip)) < 1e-12


def test_gram_schmidt_orthonormal_in_jets():
    x0 = np.asarray([0.5, 0.9])
    y0 = np.asarray([0.7, 0.4])
    x = Jet.coordinate(x0, 0, 3)
    y = Jet.coordinate(y0, 1, 3)
    vecs = [
        JetVec([x, y, x * y]),
        JetVec([y, x * x, x + y]),
    ]
    frames, ok = jet_gram_schmidt(vecs, guard=np.ones(x0.shape, dtype=bool))
    assert np.all(ok)
    for a in range(2):
        for b in range(2):
            ip = frames[a].dot(frames[b])
            want = 1.0 if a == b else 0.0
            # orthonormal as jets: all derivative coefficients of <ea, eb>
            # match the constant
            diff = ip.c.copy()
            diff[..., 0, 0] -= want
            assert np.max(np.abs(diff)) < 1e-12


def test_jet_derivatives_match_central_differences():
    """First and second partials vs central finite differences (hygiene)."""
    rng = np.random.default_rng(13)

    def expr(x, y):
        return ((x * x + y * y).add_const(1.0)).sqrt() * (x * y).add_const(0.5).recip()

    def value(xv, yv):
        return expr(
            Jet.coordinate(np.asarray(xv), 0, 2),
            Jet.coordinate(np.asarray(yv), 1, 2),
        ).value().real

    h = 1e-4
    for _ in range(25):
        x0 = float(rng.uniform(0.4, 1.2))
        y0 = float(rng.uniform(0.4, 1.2))
        jet = expr(Jet.coordinate(np.asarray(x0), 0, 2), Jet.coordinate(np.asarray(y0), 1, 2))
        fd_x = (value(x0 + h, y0) - value(x0 - h, y0)) / (2 * h)
        fd_y = (value(x0, y0 + h) - value(x0, y0 - h)) / (2 * h)
        fd_xx = (value(x0 + h, y0) - 2 * value(x0, y0) + value(x0 - h, y0)) / h**2
        scale = max(1.0, abs(fd_x), abs(fd_y), abs(fd_xx))
        assert abs(jet.deriv(1, 0).real - fd_x) < 1e-6 * scale
        assert abs(jet.deriv(0, 1).real - fd_y) < 1e-6 * scale
        assert abs(jet.deriv(2, 0).real - fd_xx) < 1e-5 * scale
