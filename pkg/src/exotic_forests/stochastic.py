"""Passing between grafted and exotic forests.

``forget_lianas`` turns every liana end into a grafted vertex.  ``expectation``
goes the other way: the Gaussian expectation of the noise increments pairs up
the grafted vertices in all possible ways (Isserlis).  ``pairing_count``
counts how many pairings produce a given exotic class.

Only a single noise (l = 1) is modelled.  Several independent noises would
decorate grafted vertices with a noise index ``x_m``; ``expectation`` would
then pair only vertices with equal index, and ``pairing_count`` already
accepts arbitrary finite colourings through :func:`pairing_count_colored`.
"""

from __future__ import annotations

import itertools
from typing import Dict, Hashable, Optional, Sequence

from .algebra import FormalSum
from .enumeration import pairings
from .forest import GRAFTED, Forest, canonicalize_raw, is_liana, sigma, sigma_colored
from .text import to_forest


class NotFiner(ValueError):
    """The first decoration does not refine the second one."""


def forget_lianas(forest) -> Forest:
    """Φ: replace each liana end by a grafted vertex."""
    f = to_forest(forest)
    return canonicalize_raw(f.parent, [GRAFTED if is_liana(d) else d for d in f.deco])


def expectation(forest) -> FormalSum:
    """E: sum over all perfect pairings of the grafted vertices.

    Every pairing is generated and canonicalized, so the coefficient of an
    exotic class is the literal number of pairings landing in it.
    """
    f = to_forest(forest)
    if any(is_liana(d) for d in f.deco):
        raise ValueError("expectation expects a grafted forest (no liana labels)")
    out = FormalSum()
    for g in pairings(f):
        out += FormalSum.of(g)
    return out


def pairing_count(fine, coarse) -> int:
    """p(π, α_e, α_g) = σ(π, α_g) / σ(π, α_e) for an exotic forest and its grafted image."""
    fe, fg = to_forest(fine), to_forest(coarse)
    if forget_lianas(fe) != fg:
        raise NotFiner(f"{fe.key} does not refine {fg.key}")
    q, r = divmod(sigma(fg), sigma(fe))
    assert r == 0, "symmetry of a refinement must divide the coarse symmetry"
    return q


def pairing_count_bruteforce(fine, coarse) -> int:
    """Count the pairings of the grafted vertices of ``coarse`` isomorphic to ``fine``."""
    fe, fg = to_forest(fine), to_forest(coarse)
    if forget_lianas(fe) != fg:
        raise NotFiner(f"{fe.key} does not refine {fg.key}")
    return sum(1 for g in pairings(fg) if g == fe)


# ---------------------------------------------------------------------------
# arbitrary finite colourings
# ---------------------------------------------------------------------------

def _coarsening(alpha: Sequence[Hashable], alpha_hat: Sequence[Hashable]) -> Dict[Hashable, Hashable]:
    phi: Dict[Hashable, Hashable] = {}
    for a, b in zip(alpha, alpha_hat):
        if phi.setdefault(a, b) != b:
            raise NotFiner(f"colour {a!r} is sent to both {phi[a]!r} and {b!r}")
    return phi


def pairing_count_colored(
    parent: Sequence[Optional[int]], alpha: Sequence[Hashable], alpha_hat: Sequence[Hashable]
) -> int:
    """σ(π, α̂)/σ(π, α) for colourings of one and the same forest."""
    if len(alpha) != len(alpha_hat) or len(alpha) != len(parent):
        raise ValueError("decorations must cover every vertex")
    _coarsening(alpha, alpha_hat)
    q, r = divmod(sigma_colored(parent, alpha_hat), sigma_colored(parent, alpha))
    assert r == 0
    return q


def pairing_count_colored_bruteforce(
    parent: Sequence[Optional[int]], alpha: Sequence[Hashable], alpha_hat: Sequence[Hashable]
) -> int:
    """Count the distinct α̃ = α∘φ, φ an automorphism of the bare forest, with Φ∘α̃ = α̂.

    Runs over all vertex permutations; intended for a handful of vertices.
    """
    phi = _coarsening(alpha, alpha_hat)
    n = len(parent)
    found = set()
    for perm in itertools.permutations(range(n)):
        if any((parent[v] is None) != (parent[perm[v]] is None) for v in range(n)):
            continue
        if any(parent[v] is not None and perm[parent[v]] != parent[perm[v]] for v in range(n)):
            continue
        tilde = tuple(alpha[perm[v]] for v in range(n))
        if all(phi[t] == h for t, h in zip(tilde, alpha_hat)):
            found.add(tilde)
    return len(found)


def double_factorial(n: int) -> int:
    """(n)!! with (−1)!! = 0!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out
