"""Exact algebra of polyhomogeneous index sets.

An index set is encoded by a finite antichain of *generators* ``(beta, k)``
where ``beta = p + q*n`` is a rational linear polynomial in the boundary
dimension ``n`` and ``k`` is a log order.  A generator stands for the closure
``{(beta + m, j) : m in N0, 0 <= j <= k}``, which encodes the two closure
axioms of an index set (stability under beta -> beta+1 and k -> k-1).

Operations (Minkowski sum, extended union, the boundary/interior composition
rules and the b-half-density shifts) act on generators and are exact over the
rationals.  Orderings of exponents may depend on n, so every operation takes
a concrete ``n`` (default 2); passing ``n=None`` requests a symbolic-in-n
result and raises :class:`AmbiguousOrderError` whenever a comparison is not
uniform over all n >= 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "NDegree",
    "IndexSet",
    "AmbiguousOrderError",
    "member",
    "sum_sets",
    "ext_union",
    "geq",
    "is_integral",
    "compose_boundary",
    "compose_interior",
    "halfdensity_shift",
    "refine",
]

DEFAULT_N = 2


class AmbiguousOrderError(ValueError):
    """A symbolic comparison of exponents depends on the value of n."""


def _frac(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 9)
    return Fraction(x)


@dataclass(frozen=True, order=True)
class NDegree:
    """Exponent beta = p + q*n, exact over the rationals."""

    q: Fraction
    p: Fraction

    def __init__(self, p=0, q=0):
        object.__setattr__(self, "p", _frac(p))
        object.__setattr__(self, "q", _frac(q))

    def value(self, n: int) -> Fraction:
        return self.p + self.q * n

    def __add__(self, other):
        other = as_ndegree(other)
        return NDegree(self.p + other.p, self.q + other.q)

    def __sub__(self, other):
        other = as_ndegree(other)
        return NDegree(self.p - other.p, self.q - other.q)

    def __neg__(self):
        return NDegree(-self.p, -self.q)

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        if self.q == 1:
            qs = "n"
        elif self.q == -1:
            qs = "-n"
        elif self.q.denominator == 1:
            qs = f"{self.q}n"
        else:
            qs = f"{'-' if self.q < 0 else ''}{abs(self.q.numerator) if abs(self.q.numerator) != 1 else ''}n/{self.q.denominator}"
        if self.p == 0:
            return qs
        return f"{qs}{'+' if self.p > 0 else '-'}{abs(self.p)}"


def as_ndegree(x) -> NDegree:
    if isinstance(x, NDegree):
        return x
    return NDegree(x, 0)


HALF_N = NDegree(0, Fraction(1, 2))  # the ubiquitous n/2 shift


# -- symbolic sign/integrality classification of an exponent difference -----

def _always_nonneg(d: NDegree) -> bool:
    # linear in n: nonnegative on all integers n >= 1
    return d.q >= 0 and d.p + d.q >= 0


def _always_nonpos(d: NDegree) -> bool:
    return d.q <= 0 and d.p + d.q <= 0


def _always_integer(d: NDegree) -> bool:
    return d.q.denominator == 1 and d.p.denominator == 1


def _sometimes_integer(d: NDegree) -> bool:
    # is p + q*n an integer for some n >= 1?
    b = d.q.denominator
    if b == 1:
        return d.p.denominator == 1
    # q*n integer-shifts p only along multiples of 1/b
    return (d.p * b).denominator == 1


def _implied_for_all_n(g, by) -> bool:
    """Generator g lies in the closure of generator `by` for every n >= 1."""
    (beta_g, k_g), (beta_b, k_b) = g, by
    if k_g > k_b:
        return False
    d = beta_g - beta_b
    return _always_integer(d) and _always_nonneg(d)


def _implied_at(g, by, n: int) -> bool:
    (beta_g, k_g), (beta_b, k_b) = g, by
    if k_g > k_b:
        return False
    d = (beta_g - beta_b).value(n)
    return d.denominator == 1 and d >= 0


def _sort_key(gen):
    (beta, k) = gen
    return (beta.q, beta.p, k)


def _reduce(gens, n):
    """Minimal antichain: drop generators implied by another generator."""
    gens = sorted(set(gens), key=_sort_key)
    kept = []
    for i, g in enumerate(gens):
        implied = False
        for j, h in enumerate(gens):
            if i == j:
                continue
            same = g[0] == h[0] and g[1] == h[1]
            if same and j < i:
                implied = True  # duplicate after substitution; keep first
                break
            if not same:
                hit = _implied_for_all_n(g, h) if n is None else _implied_at(g, h, n)
                # mutual implication (equal beta at n, equal k): keep the earlier
                if hit and (_implied_for_all_n(h, g) if n is None else _implied_at(h, g, n)):
                    hit = j < i
                if hit:
                    implied = True
                    break
        if not implied:
            kept.append(g)
    return frozenset(kept)


@dataclass(frozen=True)
class IndexSet:
    """Index set given by a generator antichain; see module docstring."""

    gens: frozenset

    @classmethod
    def from_gens(cls, gens, n=DEFAULT_N) -> "IndexSet":
        norm = []
        for beta, k in gens:
            if k < 0:
                raise ValueError(f"log order must be >= 0, got {k}")
            norm.append((as_ndegree(beta), int(k)))
        return cls(_reduce(norm, n))

    @classmethod
    def smooth(cls, q) -> "IndexSet":
        """The paper's shorthand q for {(q+m, 0) : m in N0}."""
        return cls(frozenset({(as_ndegree(q), 0)}))

    @classmethod
    def empty(cls) -> "IndexSet":
        return cls(frozenset())

    def is_empty(self) -> bool:
        return not self.gens

    def shifted(self, c) -> "IndexSet":
        c = as_ndegree(c)
        return IndexSet(frozenset((beta + c, k) for beta, k in self.gens))

    def reduced(self, n) -> "IndexSet":
        return IndexSet(_reduce(self.gens, n))

    def sorted_gens(self):
        return sorted(self.gens, key=_sort_key)

    def eq_symbolic(self, other: "IndexSet") -> bool:
        """Exact equality of symbolic-in-n generator antichains."""
        return _reduce(self.gens, None) == _reduce(other.gens, None)

    def eq_at(self, other: "IndexSet", n: int) -> bool:
        """Equality of the generated closures after substituting n."""
        return all(member(other, beta, k, n) for beta, k in self.gens) and all(
            member(self, beta, k, n) for beta, k in other.gens
        )

    def pretty(self) -> str:
        if not self.gens:
            return "∅"
        parts = []
        for beta, k in self.sorted_gens():
            parts.append(f"({beta},{k})" if k > 0 else str(beta))
        return " ∪ ".join(parts)

    def to_json(self) -> str:
        gens = [[str(beta.p), str(beta.q), k] for beta, k in self.sorted_gens()]
        return json.dumps({"gens": gens})

    @classmethod
    def from_json(cls, text: str) -> "IndexSet":
        data = json.loads(text)
        gens = [(NDegree(Fraction(p), Fraction(q)), int(k)) for p, q, k in data["gens"]]
        return cls(frozenset(gens))

    def __str__(self):
        return self.pretty()


def member(E: IndexSet, beta, k: int, n: int) -> bool:
    """Does (beta, k) lie in the closure of some generator of E at this n?"""
    if k < 0:
        raise ValueError(f"log order must be >= 0, got {k}")
    if n < 1:
        raise ValueError(f"boundary dimension must be >= 1, got {n}")
    beta = as_ndegree(beta)
    return any(_implied_at((beta, k), g, n) for g in E.gens)


def sum_sets(E1: IndexSet, E2: IndexSet, n=DEFAULT_N) -> IndexSet:
    """Minkowski sum: {(b1+b2, j1+j2)}, reduced to an antichain."""
    gens = [(b1 + b2, k1 + k2) for b1, k1 in E1.gens for b2, k2 in E2.gens]
    return IndexSet(_reduce(gens, n))


def _overlap_starts(b1: NDegree, b2: NDegree, n, ambiguous: str):
    """Exponents where the closures of b1 and b2 start to overlap.

    Returns a list of candidate starting exponents.  With a concrete n the
    list is exact ([] or one element).  Symbolically (n=None) an order or
    lattice comparison may depend on n; ``ambiguous="raise"`` refuses, while
    ``ambiguous="upper"`` returns both candidates, which over-approximates
    the overlap uniformly in n (sound, since composition index sets are
    upper bounds).
    """
    d = b1 - b2
    if n is None:
        if _always_integer(d):
            if _always_nonneg(d):
                return [b1]
            if _always_nonpos(d):
                return [b2]
        elif not _sometimes_integer(d):
            return []
        if ambiguous == "upper":
            return [b1, b2]
        raise AmbiguousOrderError(
            f"overlap of {b1} and {b2} depends on n; pass a concrete n "
            "or ambiguous='upper'"
        )
    dv = d.value(n)
    if dv.denominator != 1:
        return []
    return [b1 if dv >= 0 else b2]


def ext_union(E1: IndexSet, E2: IndexSet, n=DEFAULT_N, ambiguous: str = "raise") -> IndexSet:
    """Extended union: E1 ∪ E2 plus log bumps (beta, j1+j2+1) on overlaps."""
    gens = list(E1.gens) + list(E2.gens)
    for b1, k1 in E1.gens:
        for b2, k2 in E2.gens:
            for start in _overlap_starts(b1, b2, n, ambiguous):
                gens.append((start, k1 + k2 + 1))
    return IndexSet(_reduce(gens, n))


def geq(E: IndexSet, q, n: int) -> bool:
    """The paper's E >= q: all exponents >= q, with no log at the threshold."""
    if n < 1:
        raise ValueError(f"boundary dimension must be >= 1, got {n}")
    q = _frac(q)
    for beta, k in E.gens:
        v = beta.value(n)
        if v < q or (v == q and k > 0):
            return False
    return True


def is_integral(E: IndexSet) -> bool:
    """True when every exponent is an integer (for every integer n)."""
    return all(_always_integer(beta) for beta, _ in E.gens)


def compose_boundary(E_ff: IndexSet, F_ff: IndexSet, F_rb: IndexSet, n=DEFAULT_N,
                     ambiguous: str = "raise"):
    """Index sets of (boundary operator) o (interior-to-boundary operator).

    H_ff = (E_ff + F_ff + n/2) ∪̄ (F_rb + n/2),  H_rb = F_rb ∪̄ (F_ff + n/2).
    Empty factors propagate: a Minkowski sum with ∅ is ∅.
    """
    h_ff = ext_union(sum_sets(E_ff, F_ff, n).shifted(HALF_N), F_rb.shifted(HALF_N),
                     n, ambiguous)
    h_rb = ext_union(F_rb, F_ff.shifted(HALF_N), n, ambiguous)
    return h_ff, h_rb


def compose_interior(F_ff: IndexSet, F_rb: IndexSet, G_ff: IndexSet, G_lb: IndexSet,
                     n=DEFAULT_N, ambiguous: str = "raise"):
    """Index sets of (boundary-to-interior) o (interior-to-boundary).

    I_ff = (F_ff + G_ff + n/2) ∪̄ (F_rb + G_lb + n/2),
    I_lb = G_lb ∪̄ (G_ff + n/2),  I_rb = F_rb ∪̄ (F_ff + n/2).
    """
    i_ff = ext_union(
        sum_sets(F_ff, G_ff, n).shifted(HALF_N),
        sum_sets(F_rb, G_lb, n).shifted(HALF_N),
        n, ambiguous,
    )
    i_lb = ext_union(G_lb, G_ff.shifted(HALF_N), n, ambiguous)
    i_rb = ext_union(F_rb, F_ff.shifted(HALF_N), n, ambiguous)
    return i_ff, i_lb, i_rb


_FACE_SHIFT = {
    "ff": NDegree(1, Fraction(1, 2)),  # rho_ff^(n/2+1) in the half-density lift
    "lb": NDegree(Fraction(1, 2), 0),
    "rb": NDegree(Fraction(1, 2), 0),
}


def halfdensity_shift(E: IndexSet, face: str, direction: str) -> IndexSet:
    """Translate between kernel and b-half-density index conventions.

    ``direction="from"`` converts a b-half-density index set to the kernel
    one (subtracts the lift exponent of the metric half-density at the given
    face); ``"to"`` adds it back.  Round trips are the identity.
    """
    if face not in _FACE_SHIFT:
        raise ValueError(f"unknown face {face!r}; expected one of {sorted(_FACE_SHIFT)}")
    if direction not in ("to", "from"):
        raise ValueError(f"direction must be 'to' or 'from', got {direction!r}")
    shift = _FACE_SHIFT[face]
    return E.shifted(-shift if direction == "from" else shift)


def refine(E: IndexSet, replacement: IndexSet, n=DEFAULT_N) -> IndexSet:
    """Sharpen a composition result using external (analytic) knowledge.

    The composition rules are only upper bounds; mapping arguments in the
    source material sharpen e.g. a right-boundary set to 1/2.  The hook
    checks that the asserted replacement is contained in the raw closure and
    returns it.
    """
    for beta, k in replacement.gens:
        if not member(E, beta, k, n):
            raise ValueError(
                f"refinement {replacement.pretty()} is not contained in {E.pretty()} at n={n}"
            )
    return replacement
