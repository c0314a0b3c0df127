"""Clusters of infinitely near points and their lattice data.

A cluster records a finite constellation of points: the origin of the base
surface plus points lying on exceptional curves of earlier blowups.  Blowing
up every point of the cluster yields a resolution whose exceptional curves
E_0, ..., E_{n-1} (one per point, in creation order) carry a negative
definite intersection form.  Everything here is exact integer arithmetic.

Conventions
-----------
* Point order is creation order and is the only ordering; proximity refers
  to indices, never to coordinates.
* A point is *proximate* to the points whose exceptional curves pass through
  it: one curve for a free point (its parent), two for a satellite.
* The proximity matrix P is unitriangular with P[i][j] = -1 exactly when
  point i is proximate to point j.  The intersection form of the strict
  transforms is -(P^T P); this is the canonical divisor basis throughout.
* Free points may carry a parameter t in Q or ``inf`` locating them on the
  parent's exceptional line.  The blowup charts are fixed: a finite t maps
  parent coordinates (U, V) to (u, u(t + v)), and t = inf maps them to
  (uv, v).  Satellite positions are forced by the structure and carry no
  parameter.  Parameters are optional; clusters without them support every
  lattice operation but refuse curve evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ClusterStructureError
from .rationals import INFINITY, format_param

__all__ = [
    "PointRecord",
    "Cluster",
    "ProximityMatrix",
    "IntersectionForm",
    "new_cluster",
    "is_negative_definite",
]


@dataclass(frozen=True)
class PointRecord:
    """One point of the constellation.

    ``axis_curves`` records which exceptional curves are the two coordinate
    axes of the local chart centered at the point: ``(curve on u-axis,
    curve on v-axis)``, either entry possibly absent.  ``crossing_axis`` is
    set for satellites only and names the parent-chart axis ("u" or "v")
    carrying the second proximity curve; it selects the blowup chart.
    """

    index: int
    parent: Optional[int]
    prox: tuple[int, ...]
    kind: str  # "origin" | "free" | "satellite"
    param: object = None  # Fraction | INFINITY | None
    axis_curves: tuple[Optional[int], Optional[int]] = (None, None)
    crossing_axis: Optional[str] = None


@dataclass(frozen=True)
class ProximityMatrix:
    """Unitriangular matrix encoding the proximity relation."""

    entries: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


@dataclass(frozen=True)
class IntersectionForm:
    """Symmetric integer matrix (E_i . E_j) in the strict-transform basis.

    Always equal to -(P^T P) for the cluster's proximity matrix P, hence
    negative definite; definiteness is certified on demand through
    :func:`is_negative_definite`, not on construction.
    """

    entries: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i) -> tuple[int, ...]:
        return self.entries[i]

    def is_negative_definite(self) -> bool:
        return is_negative_definite(self)


def _as_param(value):
    """Normalize a user-supplied parameter to Fraction | INFINITY | None."""
    if value is None:
        return None
    if value == INFINITY:
        return INFINITY
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        from .rationals import parse_param

        return parse_param(value)
    # floats other than the INFINITY marker would smuggle in inexact values
    raise TypeError(f"unsupported parameter type: {value!r}")


class Cluster:
    """Mutable while being built, then treated as immutable by consumers.

    All derived computations (matrices, value/multiplicity conversions) are
    pure and may be called concurrently on a shared, fully built cluster.
    """

    def __init__(self):
        origin = PointRecord(index=0, parent=None, prox=(), kind="origin")
        self._points: list[PointRecord] = [origin]
        self._cache: dict = {}

    # -- basic views ------------------------------------------------------

    def __len__(self) -> int:
        return len(self._points)

    @property
    def points(self) -> tuple[PointRecord, ...]:
        return tuple(self._points)

    def point(self, i: int) -> PointRecord:
        return self._points[i]

    @property
    def n_curves(self) -> int:
        """Number of exceptional curves: one per point of the cluster."""
        return len(self._points)

    def children(self, i: int) -> tuple[int, ...]:
        key = ("children", len(self._points))
        table = self._cache.get(key)
        if table is None:
            table = [[] for _ in self._points]
            for rec in self._points:
                if rec.parent is not None:
                    table[rec.parent].append(rec.index)
            table = tuple(tuple(c) for c in table)
            self._cache[key] = table
        return table[i]

    def has_coordinates(self) -> bool:
        """True when every free point carries a parameter."""
        return all(rec.param is not None for rec in self._points if rec.kind == "free")

    # -- construction -----------------------------------------------------

    def _check_parent(self, parent: int):
        if not isinstance(parent, int) or not 0 <= parent < len(self._points):
            raise ClusterStructureError(f"no point with index {parent}")

    def add_free_point(self, parent: int, param=None) -> int:
        """Append a free point on the exceptional curve of ``parent``.

        The optional ``param`` locates the point on that curve.  Positions
        already taken by a sibling, or lying on the crossing with another
        exceptional curve (a satellite position), are rejected: accepting
        them would silently misrepresent the proximity structure.
        """
        self._check_parent(parent)
        param = _as_param(param)
        prec = self._points[parent]
        if param is not None:
            u_curve, v_curve = prec.axis_curves
            if param == INFINITY and u_curve is not None:
                raise ClusterStructureError(
                    f"parameter inf on curve {parent} is the crossing with curve "
                    f"{u_curve}; add a satellite point instead"
                )
            if param == 0 and v_curve is not None:
                raise ClusterStructureError(
                    f"parameter 0 on curve {parent} is the crossing with curve "
                    f"{v_curve}; add a satellite point instead"
                )
            for j in self.children(parent):
                sib = self._points[j]
                taken = sib.param if sib.kind == "free" else self._satellite_param(sib)
                if taken is not None and taken == param:
                    raise ClusterStructureError(
                        f"coincident point: parameter {format_param(param)} on curve "
                        f"{parent} is already taken by point {j}"
                    )
        index = len(self._points)
        axis = (parent, None) if param != INFINITY else (None, parent)
        self._points.append(
            PointRecord(
                index=index,
                parent=parent,
                prox=(parent,),
                kind="free",
                param=param,
                axis_curves=axis,
            )
        )
        self._cache.clear()
        return index

    def _satellite_param(self, rec: PointRecord):
        """Effective parameter of a satellite on its parent's curve."""
        return INFINITY if rec.crossing_axis == "u" else Fraction(0)

    def add_satellite_point(self, parent: int, other: int) -> int:
        """Append the point where the curves of ``parent`` and ``other`` cross.

        ``parent`` must be the more recent of the two points (the crossing
        lies in its first neighborhood).  The two strict transforms must
        still meet: ``parent`` proximate to ``other`` and no earlier
        satellite already blown up at that crossing.
        """
        self._check_parent(parent)
        self._check_parent(other)
        if parent == other:
            raise ClusterStructureError("satellite needs two distinct curves")
        if parent < other:
            raise ClusterStructureError(
                f"parent must be the most recent of the two points, got parent="
                f"{parent} < other={other}"
            )
        prec = self._points[parent]
        if other not in prec.prox:
            raise ClusterStructureError(
                f"curves {parent} and {other} do not meet (point {parent} is not "
                f"proximate to {other})"
            )
        for rec in self._points:
            if parent in rec.prox and other in rec.prox:
                raise ClusterStructureError(
                    f"curves {parent} and {other} were separated by blowing up "
                    f"point {rec.index}"
                )
        u_curve, v_curve = prec.axis_curves
        if other == u_curve:
            crossing_axis = "u"
            axis = (other, parent)  # chart (uv, v): E_other on u, E_parent on v
        elif other == v_curve:
            crossing_axis = "v"
            axis = (parent, other)  # chart (u, uv): E_parent on u, E_other on v
        else:  # unreachable given the prox check; guards chart bookkeeping
            raise ClusterStructureError(
                f"curve {other} does not pass through the chart of point {parent}"
            )
        index = len(self._points)
        self._points.append(
            PointRecord(
                index=index,
                parent=parent,
                prox=tuple(sorted((other, parent))),
                kind="satellite",
                param=None,
                axis_curves=axis,
                crossing_axis=crossing_axis,
            )
        )
        self._cache.clear()
        return index

    # -- lattice data -----------------------------------------------------

    def proximity_matrix(self) -> ProximityMatrix:
        key = ("prox", len(self._points))
        mat = self._cache.get(key)
        if mat is None:
            n = len(self._points)
            rows = []
            for i, rec in enumerate(self._points):
                row = [0] * n
                row[i] = 1
                for j in rec.prox:
                    row[j] = -1
                rows.append(tuple(row))
            mat = ProximityMatrix(entries=tuple(rows))
            self._cache[key] = mat
        return mat

    def intersection_matrix(self) -> IntersectionForm:
        """The form -(P^T P) on the strict transforms E_0, ..., E_{n-1}."""
        key = ("inter", len(self._points))
        mat = self._cache.get(key)
        if mat is None:
            p = self.proximity_matrix().entries
            n = len(p)
            rows = []
            for i in range(n):
                row = []
                for j in range(n):
                    # column dot product of P; rows k < max(i, j) never hit both
                    s = 0
                    for k in range(max(i, j), n):
                        s += p[k][i] * p[k][j]
                    row.append(-s)
                rows.append(tuple(row))
            mat = IntersectionForm(entries=tuple(rows))
            self._cache[key] = mat
        return mat

    def values_from_multiplicities(self, m: Sequence[int]) -> tuple[int, ...]:
        """Solve P v = m by forward substitution: v_i = m_i + sum of v_j over
        the points i is proximate to.  Exact integer arithmetic."""
        n = len(self._points)
        if len(m) != n:
            raise ValueError(f"expected {n} multiplicities, got {len(m)}")
        v = [0] * n
        for i, rec in enumerate(self._points):
            v[i] = m[i] + sum(v[j] for j in rec.prox)
        return tuple(v)

    def multiplicities_from_values(self, v: Sequence[int]) -> tuple[int, ...]:
        """Inverse of :meth:`values_from_multiplicities`: m = P v."""
        n = len(self._points)
        if len(v) != n:
            raise ValueError(f"expected {n} values, got {len(v)}")
        return tuple(v[i] - sum(v[j] for j in rec.prox) for i, rec in enumerate(self._points))

    def __repr__(self):
        return f"Cluster({len(self._points)} points)"


def new_cluster() -> Cluster:
    """A cluster holding only the origin of the base surface."""
    return Cluster()


def _matrix_entries(mat) -> tuple[tuple, ...]:
    if isinstance(mat, IntersectionForm):
        return mat.entries
    if isinstance(mat, ProximityMatrix):
        return mat.entries
    rows = tuple(tuple(row) for row in mat)
    return rows


def is_negative_definite(mat) -> bool:
    """Exact negative definiteness test by leading principal minors.

    Accepts an :class:`IntersectionForm` or any square symmetric matrix of
    integers or Fractions.  True iff (-1)^k det_k > 0 for every leading
    principal minor det_k, computed with fraction-free (Bareiss)
    elimination; no floating point is involved.
    """
    rows = _matrix_entries(mat)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise ValueError(f"matrix is not symmetric at ({i}, {j})")
    if n == 0:
        return True
    exact_ints = all(isinstance(x, int) for row in rows for x in row)
    if exact_ints:
        a = [list(r) for r in rows]
        prev = 1
        for k in range(n):
            minor = a[k][k]  # after k rounds this is det of the (k+1)-leading block
            if minor == 0 or (minor > 0) == (k % 2 == 0):
                # wrong sign: need (-1)^(k+1) * minor > 0, i.e. minor sign = (-1)^(k+1)
                return False
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * minor - a[i][k] * a[k][j]) // prev
            prev = minor
        return True
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for k in range(n):
        pivot = a[k][k]
        det *= pivot
        if det == 0 or (det > 0) == (k % 2 == 0):
            return False
        for i in range(k + 1, n):
            factor = a[i][k] / pivot
            for j in range(k, n):
                a[i][j] -= factor * a[k][j]
    return True
