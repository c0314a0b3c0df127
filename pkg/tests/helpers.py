"""Cluster builders shared across test modules."""

from fractions import Fraction

from antinef import new_cluster


def cusp_cluster():
    """Origin, one free point at the tangent direction y = 0, one satellite."""
    c = new_cluster()
    p1 = c.add_free_point(0, 0)
    c.add_satellite_point(p1, 0)
    return c


def chain_cluster(length):
    """A chain of free points, each on the previous exceptional curve."""
    c = new_cluster()
    parent = 0
    for _ in range(length - 1):
        parent = c.add_free_point(parent)
    return c


def star_cluster(n, params=None):
    """Origin plus n free points on the first exceptional curve."""
    c = new_cluster()
    for i in range(n):
        c.add_free_point(0, params[i] if params else Fraction(i))
    return c


def star_family_divisor(cluster, n):
    """The antinef member (2n+1, 2n+2, ..., 2n+2) of the growing family."""
    from antinef import divisor

    return divisor(cluster, [2 * n + 1] + [2 * n + 2] * n)
