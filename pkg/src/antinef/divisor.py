"""Exact arithmetic of exceptional Q-divisors on a cluster resolution.

Divisors live in the strict-transform basis E_0, ..., E_{n-1} with exact
rational coefficients.  The central operations are the two antinef
closures:

* :func:`unload` - the least *integer* antinef divisor dominating an
  integer divisor, computed by the classical fixpoint that keeps raising
  any coefficient whose curve still meets the divisor positively.  The
  result models the complete ideal of global sections.
* :func:`nef_envelope` - the least *rational* antinef divisor dominating
  an effective rational divisor, computed by an exact active-set solve.
  Its self-intersection gives the multiplicity of the associated graded
  family in closed form.

A divisor D is antinef when (D . E_i) <= 0 for every exceptional curve.
On the connected negative definite lattice of a cluster this forces
nonzero antinef divisors to have strictly positive coefficients
everywhere, which :class:`CompleteIdealModel` checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .cluster import Cluster

__all__ = [
    "ExcDivisor",
    "CompleteIdealModel",
    "divisor",
    "intersect",
    "is_antinef",
    "unload",
    "nef_envelope",
    "multiplicity",
    "degree_coefficients",
    "rees_valuations",
    "fixed_part",
]


def _coerce_coeffs(cluster: Cluster, coeffs) -> tuple[Fraction, ...]:
    coeffs = list(coeffs)
    if any(isinstance(c, float) for c in coeffs):
        raise TypeError("float coefficients are not exact; pass Fraction, int, or 'a/b'")
    out = tuple(Fraction(c) for c in coeffs)
    if len(out) != cluster.n_curves:
        raise ValueError(
            f"divisor has {len(out)} coefficients but the cluster has "
            f"{cluster.n_curves} exceptional curves"
        )
    return out


@dataclass(frozen=True)
class ExcDivisor:
    """Exceptional divisor with exact rational coefficients."""

    cluster: Cluster
    coeffs: tuple[Fraction, ...]

    @staticmethod
    def zero(cluster: Cluster) -> "ExcDivisor":
        return ExcDivisor(cluster, tuple(Fraction(0) for _ in range(cluster.n_curves)))

    @staticmethod
    def basis(cluster: Cluster, i: int) -> "ExcDivisor":
        """The basis divisor E_i."""
        if not 0 <= i < cluster.n_curves:
            raise ValueError(f"no exceptional curve with index {i}")
        coeffs = [Fraction(0)] * cluster.n_curves
        coeffs[i] = Fraction(1)
        return ExcDivisor(cluster, tuple(coeffs))

    def _check_same(self, other: "ExcDivisor"):
        if other.cluster is not self.cluster:
            raise ValueError("divisors live on different clusters")

    def __add__(self, other: "ExcDivisor") -> "ExcDivisor":
        self._check_same(other)
        return ExcDivisor(self.cluster, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "ExcDivisor") -> "ExcDivisor":
        self._check_same(other)
        return ExcDivisor(self.cluster, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "ExcDivisor":
        return ExcDivisor(self.cluster, tuple(-a for a in self.coeffs))

    def __rmul__(self, scalar) -> "ExcDivisor":
        s = Fraction(scalar)
        return ExcDivisor(self.cluster, tuple(s * a for a in self.coeffs))

    __mul__ = __rmul__

    def ceil(self) -> "ExcDivisor":
        """Componentwise ceiling to an integer divisor."""
        return ExcDivisor(self.cluster, tuple(Fraction(math.ceil(a)) for a in self.coeffs))

    def floor(self) -> "ExcDivisor":
        """Componentwise floor to an integer divisor."""
        return ExcDivisor(self.cluster, tuple(Fraction(math.floor(a)) for a in self.coeffs))

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.coeffs)

    def is_effective(self) -> bool:
        return all(a >= 0 for a in self.coeffs)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def dominates(self, other: "ExcDivisor") -> bool:
        """Componentwise >=."""
        self._check_same(other)
        return all(a >= b for a, b in zip(self.coeffs, other.coeffs))

    def as_integers(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise ValueError("divisor has non-integer coefficients")
        return tuple(int(a) for a in self.coeffs)

    def __repr__(self):
        return "ExcDivisor(" + ", ".join(str(c) for c in self.coeffs) + ")"


def divisor(cluster: Cluster, coeffs) -> ExcDivisor:
    """Build an :class:`ExcDivisor`, coercing ints/strings to Fractions."""
    return ExcDivisor(cluster, _coerce_coeffs(cluster, coeffs))


def intersect(d1: ExcDivisor, d2: ExcDivisor) -> Fraction:
    """Exact intersection product D1^T M D2 with M the intersection form."""
    d1._check_same(d2)
    m = d1.cluster.intersection_matrix().entries
    total = Fraction(0)
    for i, a in enumerate(d1.coeffs):
        if a == 0:
            continue
        row = m[i]
        total += a * sum(row[j] * b for j, b in enumerate(d2.coeffs) if b != 0)
    return total


def _pairings(cluster: Cluster, coeffs: Sequence) -> list:
    """All products (D . E_i), one pass over the matrix."""
    m = cluster.intersection_matrix().entries
    n = cluster.n_curves
    return [sum(m[i][j] * coeffs[j] for j in range(n) if coeffs[j] != 0) for i in range(n)]


def is_antinef(d: ExcDivisor) -> bool:
    """True iff (D . E_i) <= 0 for every exceptional curve."""
    return all(s <= 0 for s in _pairings(d.cluster, d.coeffs))


@dataclass(frozen=True)
class CompleteIdealModel:
    """An antinef integer divisor together with its numerical invariants.

    Models the complete ideal of sections vanishing along the divisor:
    ``degree_coeffs[i]`` is -(D . E_i) and ``multiplicity`` is -(D . D),
    the Hilbert-Samuel multiplicity of the ideal.
    """

    divisor: ExcDivisor
    degree_coeffs: tuple[int, ...]
    multiplicity: int

    def __post_init__(self):
        if any(d < 0 for d in self.degree_coeffs):
            raise ValueError("divisor is not antinef")
        coeffs = self.divisor.coeffs
        if any(c != 0 for c in coeffs):
            if any(c <= 0 for c in coeffs):
                raise ValueError(
                    "nonzero antinef divisor must have full positive support"
                )
            if self.multiplicity <= 0:
                raise ValueError("nonzero antinef divisor must have positive self-pairing")
        elif self.multiplicity != 0:
            raise ValueError("zero divisor must have zero multiplicity")

    @property
    def rees_valuations(self) -> frozenset[int]:
        """Curve indices with positive degree coefficient."""
        return frozenset(i for i, d in enumerate(self.degree_coeffs) if d > 0)

    @staticmethod
    def from_antinef(d: ExcDivisor) -> "CompleteIdealModel":
        ints = d.as_integers()
        pair = _pairings(d.cluster, ints)
        if any(s > 0 for s in pair):
            raise ValueError("divisor is not antinef")
        e = -sum(c * s for c, s in zip(ints, pair))
        return CompleteIdealModel(
            divisor=ExcDivisor(d.cluster, tuple(Fraction(c) for c in ints)),
            degree_coeffs=tuple(-s for s in pair),
            multiplicity=e,
        )


def unload(
    d: ExcDivisor,
    select: Optional[Callable[[list[int]], int]] = None,
) -> CompleteIdealModel:
    """Least integer antinef divisor dominating ``d``.

    Fixpoint loop: while some (D . E_i) > 0, raise coefficient i by
    ceil((D . E_i) / -(E_i . E_i)).  Negative definiteness guarantees
    termination and the result is independent of the order in which
    violated indices are processed; ``select`` picks among them (defaults
    to the smallest index) and exists so that order independence can be
    exercised directly.

    ``d`` must be integral but need not be effective: the closure of any
    divisor with no positive part is the zero divisor.
    """
    coeffs = list(d.as_integers())
    m = d.cluster.intersection_matrix().entries
    n = len(coeffs)
    pair = [sum(m[i][j] * coeffs[j] for j in range(n) if coeffs[j]) for i in range(n)]
    while True:
        violated = [i for i in range(n) if pair[i] > 0]
        if not violated:
            break
        i = violated[0] if select is None else select(violated)
        step = -(-pair[i] // -m[i][i])  # ceil(pair_i / -m_ii), both positive
        coeffs[i] += step
        row = m[i]
        for j in range(n):
            if row[j]:
                pair[j] += step * row[j]
    e = -sum(c * s for c, s in zip(coeffs, pair))
    return CompleteIdealModel(
        divisor=ExcDivisor(d.cluster, tuple(Fraction(c) for c in coeffs)),
        degree_coeffs=tuple(-s for s in pair),
        multiplicity=e,
    )


def multiplicity(d: ExcDivisor) -> int:
    """Hilbert-Samuel multiplicity -(D . D) of the antinef closure of ``d``."""
    return unload(d).multiplicity


def degree_coefficients(d: ExcDivisor) -> tuple[int, ...]:
    """The coefficients -(closure(D) . E_i); all nonnegative."""
    return unload(d).degree_coeffs


def rees_valuations(d: ExcDivisor) -> frozenset[int]:
    """Curve indices where the degree coefficient is positive."""
    return unload(d).rees_valuations


def fixed_part(d: ExcDivisor) -> ExcDivisor:
    """closure(D) - D: the divisorial fixed component, always effective."""
    return unload(d).divisor - d


def _solve_active(m, delta, active: list[int]) -> list[Fraction]:
    """Solve (D . E_i) = 0 for i in ``active`` with D = delta off the set.

    Exact Gaussian elimination on the negative definite principal block,
    so the system is always uniquely solvable.
    """
    k = len(active)
    inactive = [j for j in range(len(delta)) if j not in set(active)]
    a = [[Fraction(m[i][j]) for j in active] for i in active]
    b = [
        -sum(Fraction(m[i][j]) * delta[j] for j in inactive if delta[j] != 0)
        for i in active
    ]
    for col in range(k):
        piv = next(r for r in range(col, k) if a[r][col] != 0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            b[col], b[piv] = b[piv], b[col]
        pivot = a[col][col]
        for r in range(col + 1, k):
            if a[r][col] == 0:
                continue
            factor = a[r][col] / pivot
            for c in range(col, k):
                a[r][c] -= factor * a[col][c]
            b[r] -= factor * b[col]
    x = [Fraction(0)] * k
    for r in range(k - 1, -1, -1):
        s = b[r] - sum(a[r][c] * x[c] for c in range(r + 1, k))
        x[r] = s / a[r][r]
    return x


def nef_envelope(delta: ExcDivisor) -> ExcDivisor:
    """Least rational antinef divisor dominating an effective ``delta``.

    Exact active-set iteration: keep the set S of raised coefficients,
    solve (D . E_i) = 0 for i in S with the remaining coefficients pinned
    at delta, and grow S while violations remain.  At the solution exact
    complementarity holds: for every i, either the coefficient was never
    raised or (D . E_i) = 0.  The result is homogeneous under positive
    rational scaling and equals the limit of unload(ceil(n delta))/n.
    """
    if any(c < 0 for c in delta.coeffs):
        raise ValueError("nef envelope needs an effective divisor")
    m = delta.cluster.intersection_matrix().entries
    n = delta.cluster.n_curves
    coeffs = list(delta.coeffs)
    active: list[int] = []
    while True:
        if active:
            sol = _solve_active(m, delta.coeffs, active)
            for pos, i in enumerate(active):
                coeffs[i] = sol[pos]
        pair = [sum(m[i][j] * coeffs[j] for j in range(n) if coeffs[j] != 0) for i in range(n)]
        violated = [i for i in range(n) if i not in active and pair[i] > 0]
        if not violated:
            break
        active.extend(violated)
        active.sort()
    out = ExcDivisor(delta.cluster, tuple(coeffs))
    assert out.dominates(delta), "active-set solve dipped below the input"
    return out
