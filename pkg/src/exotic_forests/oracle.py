"""Independent analytic checks with polynomial potentials.

Forests act on test functions as differential operators.  With the step
size set to 1 an index assignment ``α`` of the vertices contributes

* ``∂_{α(children)} f^{α(v)}`` for each black vertex ``v``,
* ``η_{α(v)}`` for each grafted vertex, with ``η = √2 ξ`` so that
  ``E[η_i η_j] = 2 δ_ij``,
* ``2`` for each liana, whose two ends share their index,
* ``∂_{α(roots)}`` applied to the test function.

Everything is exact (sympy polynomials over ℚ) except the final integrals
against ``e^{-V}``, which use adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp
from scipy import integrate

from .algebra import FormalSum, as_fraction, convolve
from .enumeration import check_bound, enumerate_forests
from .forest import BLACK, EMPTY, GRAFTED, Forest, is_liana, sigma
from .stochastic import expectation
from .text import to_forest


class QuadratureNotConverged(RuntimeError):
    pass


X, Y = sp.symbols("x y")
ETA = sp.symbols("eta1 eta2")


@dataclass
class PolyProblem:
    """Overdamped Langevin data with polynomial potential ``V`` and test function ``phi``.

    ``f`` defaults to ``-∇V``; pass ``f`` explicitly to break the gradient
    structure (negative controls).
    """

    d: int
    V: sp.Expr
    phi: sp.Expr
    f: Optional[Sequence[sp.Expr]] = None
    radius: float = 10.0
    name: str = ""
    _cache: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("only d = 1 or d = 2 are supported")
        self.xs = (X,) if self.d == 1 else (X, Y)
        self.etas = ETA[: self.d]
        self.gens = self.xs + self.etas
        if self.f is None:
            self.f = [-sp.diff(self.V, x) for x in self.xs]
        self.f_polys = [self.poly(e) for e in self.f]

    def poly(self, expr) -> sp.Poly:
        return sp.Poly(expr, *self.gens, domain="QQ")

    def dfield(self, k: int, idx: Tuple[int, ...]) -> sp.Poly:
        key = ("f", k, idx)
        if key not in self._cache:
            p = self.f_polys[k]
            for i in idx:
                p = p.diff(self.xs[i])
            self._cache[key] = p
        return self._cache[key]

    def is_gradient(self) -> bool:
        return all(
            sp.expand(sp.diff(self.f[i], self.xs[j]) - sp.diff(self.f[j], self.xs[i])) == 0
            for i in range(self.d)
            for j in range(self.d)
        )


def quartic_1d() -> PolyProblem:
    return PolyProblem(1, X**4 / 4 + X**2 / 2, X**3 + X, name="V = x^4/4 + x^2/2")


def quartic_2d() -> PolyProblem:
    V = (X**4 + Y**4) / 4 + (X**2 + Y**2) / 2 + X * Y / 2 + X**2 * Y**2 / 4
    phi = X**3 + X**2 * Y - 2 * X * Y**2 + Y**4 / 2 + X * Y
    return PolyProblem(2, V, phi, name="coupled quartic in 2D")


def rotated_2d(strength=1) -> PolyProblem:
    """Same potential as :func:`quartic_2d`, drift tilted by a rotation (not a gradient)."""
    base = quartic_2d()
    f = [base.f[0] - strength * Y, base.f[1] + strength * X]  # type: ignore[index]
    return PolyProblem(2, base.V, base.phi, f=f, name="non-gradient control")


# ---------------------------------------------------------------------------
# elementary differentials
# ---------------------------------------------------------------------------

def _index_classes(f: Forest) -> Tuple[List[int], Dict[int, int]]:
    """Vertex -> class; liana ends share a class."""
    cls: Dict[int, int] = {}
    labels: Dict[int, int] = {}
    n = 0
    for v, d in enumerate(f.deco):
        if is_liana(d):
            if d in labels:
                cls[v] = labels[d]
                continue
            labels[d] = n
        cls[v] = n
        n += 1
    return list(range(n)), cls


def apply(forest, psi, prob: PolyProblem) -> sp.Poly:
    """``F_f(π)[ψ]`` as an exact polynomial in ``x`` (and ``η`` for grafted vertices)."""
    f = to_forest(forest)
    check_bound(f.size)
    psi = psi if isinstance(psi, sp.Poly) else prob.poly(psi)
    if f.n == 0:
        return psi
    classes, cls = _index_classes(f)
    ch = f.children
    roots = f.roots
    black = [v for v, d in enumerate(f.deco) if d == BLACK]
    grafted = [v for v, d in enumerate(f.deco) if d == GRAFTED]
    liana_factor = 2 ** f.n_lianas
    total = prob.poly(0)
    dcache: Dict[Tuple[int, ...], sp.Poly] = {}
    for alpha in itertools.product(range(prob.d), repeat=len(classes)):
        a = [alpha[cls[v]] for v in range(f.n)]
        term = prob.poly(liana_factor)
        for v in black:
            term = term * prob.dfield(a[v], tuple(sorted(a[c] for c in ch[v])))
            if term.is_zero:
                break
        if term.is_zero:
            continue
        for v in grafted:
            term = term * prob.poly(prob.etas[a[v]])
        ridx = tuple(sorted(a[r] for r in roots))
        if ridx not in dcache:
            p = psi
            for i in ridx:
                p = p.diff(prob.xs[i])
            dcache[ridx] = p
        total = total + term * dcache[ridx]
    return total


def elementary_differential(tree, prob: PolyProblem) -> List[sp.Poly]:
    """Components ``F_f(τ)^k`` of the vector field of a tree (apply to coordinate functions)."""
    return [apply(tree, prob.poly(x), prob) for x in prob.xs]


def gaussian_expectation(p: sp.Poly, prob: PolyProblem) -> sp.Poly:
    """Isserlis reduction of the ``η`` monomials, ``E[η_i η_j] = 2 δ_ij``."""
    nx = len(prob.xs)
    out: Dict[Tuple[int, ...], sp.Rational] = {}
    for mon, c in p.terms():
        etas = mon[nx:]
        if any(k % 2 for k in etas):
            continue
        w = sp.Integer(1)
        for k in etas:
            w *= sp.Integer(2) ** (k // 2) * sp.factorial2(k - 1)
        key = tuple(mon[:nx]) + (0,) * len(etas)
        out[key] = out.get(key, 0) + c * w
    return sp.Poly.from_dict(out, *prob.gens, domain="QQ") if out else prob.poly(0)


def expectation_consistency(forest, prob: PolyProblem, psi=None) -> bool:
    """E[F(π_g)[ψ]] equals F applied to the exotic expansion E(π_g)."""
    f = to_forest(forest)
    psi = prob.phi if psi is None else psi
    lhs = gaussian_expectation(apply(f, psi, prob), prob)
    rhs = prob.poly(0)
    for g, c in expectation(f):
        rhs = rhs + apply(g, psi, prob) * prob.poly(sp.Rational(c.numerator, c.denominator))
    return (lhs - rhs).is_zero


def generator_check(prob: PolyProblem, psi=None) -> bool:
    """``F(b)[φ] + F(1,1)[φ]/σ(1,1) = f·∇φ + Δφ``."""
    psi = prob.phi if psi is None else psi
    lhs = apply("b", psi, prob) + apply("1,1", psi, prob) * prob.poly(sp.Rational(1, sigma(to_forest("1,1"))))
    p = prob.poly(psi)
    rhs = prob.poly(0)
    for i, x in enumerate(prob.xs):
        rhs = rhs + prob.f_polys[i] * p.diff(x) + p.diff(x).diff(x)
    return (lhs - rhs).is_zero


# ---------------------------------------------------------------------------
# integrals against the invariant measure
# ---------------------------------------------------------------------------

def _abs_moment_1d(a: int) -> float:
    # ∫ |x|^a e^{-x^4/4} dx, a rough scale for moment magnitudes
    return 2 * math.gamma((a + 1) / 4) * 4 ** ((a + 1) / 4 - 1)


def _moments(prob: PolyProblem, degree: int, epsrel: float = 1e-10) -> np.ndarray:
    """Array ``M[a, b] = ∫ x^a y^b e^{-V} / Z`` over ``[-R, R]^d`` for ``a + b ≤ degree``."""
    key = ("moments", degree)
    cached = prob._cache.get(key)
    if cached is not None:
        return cached
    R = prob.radius
    V = sp.lambdify(prob.xs, prob.V, "numpy")
    powers = np.arange(degree + 1)
    scale = np.array([_abs_moment_1d(int(a)) for a in powers])
    epsabs = 1e-3 * epsrel
    if prob.d == 1:
        res, err, info = integrate.quad_vec(
            lambda x: x ** powers * np.exp(-V(x)) / scale, -R, R, epsrel=epsrel, epsabs=epsabs, full_output=True, limit=2000
        )
        if not info.success:
            raise QuadratureNotConverged(info.message)
        m = res * scale
        out = m / m[0]
    else:
        s2 = np.outer(scale, scale)

        def inner(x: float) -> np.ndarray:
            r, e, info = integrate.quad_vec(
                lambda y: y ** powers * np.exp(-V(x, y)) / scale, -R, R, epsrel=epsrel, epsabs=epsabs, full_output=True, limit=2000
            )
            if not info.success:
                raise QuadratureNotConverged(info.message)
            return np.outer(x ** powers / scale, r).ravel()

        res, err, info = integrate.quad_vec(inner, -R, R, epsrel=epsrel, epsabs=epsabs, full_output=True, limit=2000)
        if not info.success:
            raise QuadratureNotConverged(info.message)
        m = res.reshape(degree + 1, degree + 1) * s2
        out = m / m[0, 0]
    prob._cache[key] = out
    return out


MOMENT_STEP = 8


def integrate_poly(p: sp.Poly, prob: PolyProblem) -> float:
    """``∫ p ρ∞ dx`` for an ``η``-free polynomial."""
    nx = len(prob.xs)
    deg = max((sum(m[:nx]) for m in p.monoms()), default=0)
    top = max((k for k in prob._cache if isinstance(k, tuple) and k[0] == "moments"), default=None)
    size = top[1] if top and top[1] >= deg else MOMENT_STEP * (deg // MOMENT_STEP + 1)
    M = _moments(prob, size)
    total = 0.0
    for mon, c in p.terms():
        if any(mon[nx:]):
            raise ValueError("integrate_poly expects a polynomial without noise symbols")
        total += float(c) * (M[mon[0]] if nx == 1 else M[mon[0], mon[1]])
    return total


def integral_I(x, prob: PolyProblem) -> float:
    """``I(π) = ∫ F_f(π)[φ] ρ∞ dx`` with h = 1; linear in formal sums."""
    xs = x if isinstance(x, FormalSum) else FormalSum.of(to_forest(x))
    p = prob.poly(0)
    for f, c in xs:
        p = p + apply(f, prob.phi, prob) * prob.poly(sp.Rational(c.numerator, c.denominator))
    return integrate_poly(p, prob)


def invariance_defect(before, after, prob: PolyProblem) -> Tuple[float, float, float]:
    """``(I(before), I(after), relative defect)`` with the scale ``max(1, |I(before)|)``."""
    a = integral_I(before, prob)
    b = integral_I(after, prob)
    return a, b, abs(a - b) / max(1.0, abs(a))


# ---------------------------------------------------------------------------
# composition law
# ---------------------------------------------------------------------------

def truncated_series(a: Callable[[Forest], object], psi: Dict[Fraction, sp.Poly], prob: PolyProblem, forests: List[Forest], max_size) -> Dict[Fraction, sp.Poly]:
    """Grades of ``S(a)[ψ]`` where ``ψ`` is itself graded; the unit acts as ``a(1)·ψ``."""
    max_size = Fraction(max_size)
    out: Dict[Fraction, sp.Poly] = {}

    def add(g: Fraction, p: sp.Poly) -> None:
        out[g] = out[g] + p if g in out else p

    a0 = as_fraction(a(EMPTY))
    for g, p in psi.items():
        if a0:
            add(g, p * prob.poly(sp.Rational(a0.numerator, a0.denominator)))
    for f in forests:
        c = as_fraction(a(f)) / sigma(f)
        if not c:
            continue
        for g, p in psi.items():
            if g + f.size <= max_size:
                add(g + f.size, apply(f, p, prob) * prob.poly(sp.Rational(c.numerator, c.denominator)))
    return out


def composition_check(a, b, max_size=3, prob: Optional[PolyProblem] = None, x0=None) -> bool:
    """``S(a)[S(b)[φ]] = S(a∗b)[φ]`` grade by grade through ``max_size``.

    Works over all grafted forests (``η`` kept symbolic); the two sides are
    compared as exact polynomials, and, when ``x0`` is given, at that point.
    """
    check_bound(max_size)
    prob = prob or quartic_1d()
    forests = enumerate_forests(max_size, "grafted_forests")
    phi = {Fraction(0): prob.poly(prob.phi)}
    lhs = truncated_series(a, truncated_series(b, phi, prob, forests, max_size), prob, forests, max_size)
    rhs = truncated_series(convolve(a, b), phi, prob, forests, max_size)
    for g in sorted(set(lhs) | set(rhs)):
        diff = lhs.get(g, prob.poly(0)) - rhs.get(g, prob.poly(0))
        if x0 is not None:
            diff = sp.Poly(diff.as_expr().subs({xx: v for xx, v in zip(prob.xs, x0)}), *prob.etas, domain="QQ")
        if not diff.is_zero:
            return False
    return True
