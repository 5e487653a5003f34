"""Problem instances and solutions."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .lp import Polyhedron
from .rational import DimensionError, Matrix, Rat, Vector, dot, is_integral, rat, vec


@dataclass(frozen=True)
class MiqpInstance:
    """``min x^T H x + h^T x`` s.t. ``W x <= w``, ``x_1..x_p`` integral.

    ``bounds`` is an optional per-variable box ``(lo, hi)``; ``equalities``
    holds extra constraints ``a^T x = beta`` accumulated while branching.
    """

    H: Matrix
    h: Vector
    W: Matrix
    w: Vector
    p: int = 0
    bounds: tuple[tuple[Rat, Rat], ...] | None = None
    equalities: tuple[tuple[Vector, Rat], ...] = ()

    def __post_init__(self):
        n = self.H.nrows
        if not self.H.is_square():
            raise DimensionError("H must be square")
        if not self.H.is_symmetric():
            raise ValueError("H must be symmetric")
        if len(self.h) != n or self.W.ncols != n or len(self.w) != self.W.nrows:
            raise DimensionError("inconsistent instance dimensions")
        if not 0 <= self.p <= n:
            raise ValueError("p must lie in [0, n]")
        if self.bounds is not None:
            if len(self.bounds) != n:
                raise DimensionError("need one bound pair per variable")
            for lo, hi in self.bounds:
                if lo > hi:
                    raise ValueError("empty variable bound")

    @classmethod
    def build(cls, H, h, W, w, p: int = 0, bounds=None) -> "MiqpInstance":
        n = len(h)
        Hm = Matrix(H, ncols=n)
        Wm = Matrix(W, ncols=n)
        b = None if bounds is None else tuple((rat(lo), rat(hi)) for lo, hi in bounds)
        return cls(Hm, vec(h), Wm, vec(w), p, b)

    @property
    def n(self) -> int:
        return self.H.nrows

    def polyhedron(self) -> Polyhedron:
        P = Polyhedron(self.W, self.w)
        n = self.n
        rows, rhs = [], []
        if self.bounds is not None:
            for i, (lo, hi) in enumerate(self.bounds):
                e = [0] * n
                e[i] = 1
                rows.append(e)
                rhs.append(hi)
                rows.append([-v for v in e])
                rhs.append(-lo)
        for a, beta in self.equalities:
            rows.append(a)
            rhs.append(beta)
            rows.append(tuple(-v for v in a))
            rhs.append(-beta)
        return P.add_rows(rows, rhs)

    def folded(self) -> "MiqpInstance":
        """Same problem with bounds and equalities turned into rows of ``W``."""
        P = self.polyhedron()
        return MiqpInstance(self.H, self.h, P.W, P.w, self.p)

    def with_equality(self, a: Sequence, beta) -> "MiqpInstance":
        return replace(self, equalities=self.equalities + ((vec(a), rat(beta)),))

    def objective(self, x: Sequence) -> Rat:
        return self.H.quad(x) + dot(self.h, x)

    def is_integral_point(self, x: Sequence) -> bool:
        return all(is_integral(x[i]) for i in range(self.p))

    def is_feasible(self, x: Sequence) -> bool:
        return len(x) == self.n and self.is_integral_point(x) and self.polyhedron().contains(x)

    def scaled(self, c) -> "MiqpInstance":
        c = rat(c)
        return replace(self, H=self.H.scale(c), h=tuple(c * v for v in self.h))


@dataclass(frozen=True)
class Solution:
    x: Vector
    value: Rat
    provenance: tuple = ()
    certificates: tuple[str, ...] = field(default=(), compare=False)
