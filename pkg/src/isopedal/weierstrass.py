"""Recursive construction of isotropy-graded minimal surfaces.

Starting from a holomorphic polynomial seed alpha_0 with values in
C^{N-2(m+1)} (possibly empty) and nonzero polynomial weights beta_1 ...
beta_{m+1}, each step maps a curve alpha to

    beta * (1 - phi^2,  i (1 + phi^2),  2 phi),    phi = int alpha dz,

where phi^2 is the bilinear sum of squares of the components (no
conjugation).  Every step adds two complex dimensions and outputs a curve
whose bilinear square vanishes identically:

    (1 - phi^2)^2 - (1 + phi^2)^2 + 4 phi^2 = 0,

so after m+1 steps and one more integration the component-wise real part
of the final curve is a minimal surface in R^N whose first m curvature
ellipses are circles.  The empty seed reproduces doubled holomorphic
curves (w_1, i w_1, w_2, i w_2, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cpoly import (
    cp_add,
    cp_degree,
    cp_mul,
    cp_scale,
    cp_sub,
    cp_trim,
    cv_degree,
    cv_dot,
    cv_int,
    cv_diff,
    cv_linear_map,
    cv_max_abs,
    cp_max_abs,
    cv_trim,
)
from .errors import ConfigError, IsotropyViolation
from .jets import DEFAULT_ORDER, JetVec, jet_lift, lift_scalar_polynomial

ISOTROPY_RTOL = 1e-10


@dataclass
class SurfaceEvaluator:
    """A surface patch as a jet source: (x, y, order) -> jets of the map.

    `fn` must be deterministic and consistent across orders (lower-order
    requests are truncations of higher ones).  `mask_fn` marks the points
    where the jets are trustworthy; callers AND it into their own
    regularity masks.  `provenance` records how the surface was built
    (generated curve, doubled holomorphic curve, pedal, inversion, ...).
    """

    ambient_dim: int
    provenance: str
    fn: Callable
    mask_fn: Optional[Callable] = None

    def jets(self, x, y, order=DEFAULT_ORDER) -> JetVec:
        return self.fn(x, y, order)

    def mask(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast_shapes(x.shape, y.shape)
        if self.mask_fn is None:
            return np.ones(shape, dtype=bool)
        return np.broadcast_to(self.mask_fn(x, y), shape)

    def affine(self, scale=1.0, translation=None) -> "SurfaceEvaluator":
        """The surface c*f + v (ambient scaling and translation)."""
        c = float(scale)
        v = np.zeros(self.ambient_dim) if translation is None else np.asarray(translation, dtype=float)
        if v.shape != (self.ambient_dim,):
            raise ConfigError(f"translation needs {self.ambient_dim} components")
        inner = self.fn

        def fn(x, y, order=DEFAULT_ORDER):
            jv = inner(x, y, order)
            out = jv.scale(c)
            for k, comp in enumerate(out):
                comp.c[..., 0, 0] += v[k]
            return out

        return SurfaceEvaluator(self.ambient_dim, "composite", fn, self.mask_fn)


@dataclass(frozen=True)
class IsotropicSpec:
    """Input data of the recursion.

    ambient_dim: target real/complex dimension N >= 4.
    isotropy_order: number m >= 1 of curvature circles to enforce.
    alpha0: seed curve, exactly N - 2(m+1) polynomial components (may be
        an empty list when N = 2(m+1)).
    betas: m+1 nonzero polynomial weights, one per recursion step.
    """

    ambient_dim: int
    isotropy_order: int
    alpha0: list = field(default_factory=list)
    betas: list = field(default_factory=list)

    def __post_init__(self):
        n, m = self.ambient_dim, self.isotropy_order
        if not (isinstance(n, int) and n >= 4):
            raise ConfigError(f"ambient dimension must be an integer >= 4, got {n!r}")
        if not (isinstance(m, int) and m >= 1):
            raise ConfigError(f"isotropy order must be an integer >= 1, got {m!r}")
        if n - 2 * (m + 1) < 0:
            raise ConfigError(
                f"ambient dimension {n} too small for isotropy order {m}: "
                f"need N - 2(m+1) >= 0 seed components"
            )
        object.__setattr__(self, "alpha0", cv_trim(self.alpha0))
        object.__setattr__(self, "betas", [cp_trim(b) for b in self.betas])
        if len(self.alpha0) != n - 2 * (m + 1):
            raise ConfigError(
                f"seed curve needs exactly {n - 2*(m+1)} components, got {len(self.alpha0)}"
            )
        if len(self.betas) != m + 1:
            raise ConfigError(f"need {m + 1} weight polynomials, got {len(self.betas)}")
        for k, b in enumerate(self.betas):
            if cp_degree(b) < 0:
                raise ConfigError(f"weight polynomial {k + 1} is identically zero")


@dataclass
class IsotropicCurve:
    """A holomorphic curve whose real part is the surface.

    phi: the integrated curve (N complex polynomial components).
    alpha: its derivative; `cv_dot(alpha, alpha)` is the zero polynomial
        up to roundoff (checked at construction).
    levels: the intermediate integrated curves of the recursion, lowest
        first (empty for directly doubled holomorphic curves).
    """

    phi: list
    alpha: list
    levels: list = field(default_factory=list)
    provenance: str = "weierstrass"
    spec: Optional[IsotropicSpec] = None

    @property
    def ambient_dim(self):
        return len(self.phi)

    @property
    def degree(self):
        return cv_degree(self.phi)

    def isotropy_residual(self):
        """Max |coefficient| of the bilinear square of alpha, relative."""
        res = cv_dot(self.alpha, self.alpha)
        scale = cv_max_abs(self.alpha)
        return cp_max_abs(res) / (scale * scale) if scale > 0 else cp_max_abs(res)


def _check_isotropy(curve: IsotropicCurve):
    r = curve.isotropy_residual()
    if not (r <= ISOTROPY_RTOL):
        raise IsotropyViolation(
            f"bilinear square of the derivative curve has relative coefficient "
            f"norm {r:.3e} > {ISOTROPY_RTOL:.0e}"
        )
    return curve


def w_step(alpha, beta):
    """One recursion step: alpha -> beta * (1 - phi^2, i(1 + phi^2), 2 phi)."""
    beta = cp_trim(beta)
    if cp_degree(beta) < 0:
        raise ConfigError("weight polynomial is identically zero")
    phi = cv_int(alpha)
    sq = cv_dot(phi, phi)
    one = [complex(1)]
    comps = [cp_sub(one, sq), cp_scale(cp_add(one, sq), 1j)]
    comps += [cp_scale(p, 2) for p in phi]
    return [cp_mul(beta, p) for p in comps]


def w_generate(spec: IsotropicSpec) -> IsotropicCurve:
    """Run the recursion m+1 times and integrate to the final curve."""
    alpha = spec.alpha0
    levels = []
    for beta in spec.betas:
        levels.append(cv_int(alpha))
        alpha = w_step(alpha, beta)
    phi = cv_int(alpha)
    assert len(phi) == spec.ambient_dim
    curve = IsotropicCurve(phi=phi, alpha=alpha, levels=levels, provenance="weierstrass", spec=spec)
    return _check_isotropy(curve)


def holomorphic_curve(components) -> IsotropicCurve:
    """Double a holomorphic curve w to (w_1, i w_1, w_2, i w_2, ...).

    The bilinear square of the doubled derivative vanishes exactly
    (w'^2 + (i w')^2 = 0 coefficient-wise), so the real part is a minimal
    surface in R^{2k}: the holomorphic curve itself, up to the ambient
    reflection flipping the even coordinates.
    """
    comps = cv_trim(components)
    if not comps or all(cp_degree(p) < 1 for p in comps):
        raise ConfigError("holomorphic curve needs at least one nonconstant component")
    phi = []
    for p in comps:
        phi.append(p)
        phi.append(cp_scale(p, 1j))
    curve = IsotropicCurve(phi=phi, alpha=cv_diff(phi), levels=[], provenance="holomorphic")
    return _check_isotropy(curve)


def ambient_curve(components) -> IsotropicCurve:
    """Take the N integrated complex components verbatim (no doubling).

    This is the re-ingestion path for generated curves: the coefficients
    are used exactly as given (no trimming), so writing a curve to disk
    and reading it back is a bitwise identity on the coefficient lists.
    """
    comps = [[complex(c) for c in p] for p in components]
    if len(comps) < 4:
        raise ConfigError(
            f"ambient curve needs at least 4 components, got {len(comps)}"
        )
    curve = IsotropicCurve(
        phi=comps, alpha=cv_diff(comps), levels=[], provenance="ambient"
    )
    return _check_isotropy(curve)


def surface_evaluator(curve: IsotropicCurve) -> SurfaceEvaluator:
    """The real surface map p -> Re phi(x + iy) as a jet source (exact)."""
    phi = curve.phi

    def fn(x, y, order=DEFAULT_ORDER):
        return jet_lift(phi, x, y, order).real()

    return SurfaceEvaluator(len(phi), curve.provenance, fn)


def curve_evaluator(curve: IsotropicCurve) -> SurfaceEvaluator:
    """Complex jets of phi itself (for Wirtinger-side diagnostics)."""
    phi = curve.phi

    def fn(x, y, order=DEFAULT_ORDER):
        return jet_lift(phi, x, y, order)

    return SurfaceEvaluator(len(phi), curve.provenance, fn)


def polynomial_surface(components) -> SurfaceEvaluator:
    """A real polynomial surface patch (control surfaces for tests).

    `components` is a list of 2-D real coefficient arrays a[i, j] of
    x^i y^j, one per ambient coordinate.
    """
    comps = [np.asarray(c, dtype=float) for c in components]

    def fn(x, y, order=DEFAULT_ORDER):
        return JetVec([lift_scalar_polynomial(c, x, y, order) for c in comps])

    return SurfaceEvaluator(len(comps), "graph", fn)


def rotated_curve(curve: IsotropicCurve, matrix) -> IsotropicCurve:
    """Apply a constant real orthogonal matrix to the ambient components."""
    mat = np.asarray(matrix, dtype=float)
    phi = cv_linear_map(mat, curve.phi)
    return _check_isotropy(
        IsotropicCurve(phi=phi, alpha=cv_diff(phi), levels=[], provenance=curve.provenance)
    )


# -- shipped seeds ------------------------------------------------------------

_Z = [0, 1]  # the identity polynomial z


def preset_curve(name: str) -> IsotropicCurve:
    """Built-in seed curves.

    holo3:  empty seed, N=6, m=2, unit weights; the doubled degree-(1,2,3)
            curve whose first two curvature ellipses are circles.
    holo4:  doubled holomorphic curve (z, z^2, z^3, z^4) in R^8; three
            curvature circles.
    noniso: seed (1, z) in R^6 with m=1: first ellipse a circle, second
            ellipse genuinely not (negative control).
    """
    if name == "holo3":
        spec = IsotropicSpec(ambient_dim=6, isotropy_order=2, alpha0=[], betas=[[1], [1], [1]])
        return w_generate(spec)
    if name == "holo4":
        return holomorphic_curve([[0, 1], [0, 0, 1], [0, 0, 0, 1], [0, 0, 0, 0, 1]])
    if name == "noniso":
        spec = IsotropicSpec(ambient_dim=6, isotropy_order=1, alpha0=[[1], _Z], betas=[[1], [1]])
        return w_generate(spec)
    raise ConfigError(f"unknown seed preset {name!r} (expected holo3, holo4 or noniso)")


def sample_spec(rng: np.random.Generator, max_dim: int = 12, max_degree: int = 3) -> IsotropicSpec:
    """Draw a random admissible spec (for stress tests)."""
    m = int(rng.integers(1, 4))
    lo = 2 * (m + 1)
    n = int(rng.integers(lo, max_dim + 1))
    seed_dim = n - lo

    def rand_poly(min_deg=0):
        deg = int(rng.integers(min_deg, max_degree + 1))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        if abs(coeffs[-1]) < 1e-3:
            coeffs[-1] += 1.0
        return list(coeffs)

    alpha0 = [rand_poly() for _ in range(seed_dim)]
    betas = [rand_poly() for _ in range(m + 1)]
    return IsotropicSpec(ambient_dim=n, isotropy_order=m, alpha0=alpha0, betas=betas)
