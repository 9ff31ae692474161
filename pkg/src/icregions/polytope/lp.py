"""Exact rational simplex for  max c.x  s.t.  A x <= b, x >= 0.

Dictionary form with Bland's rule (terminates on degenerate problems) and a
one-shot phase 1. Arithmetic is gmpy2.mpq throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

RATIONAL_SCALE = 2**40

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def to_mpq(x) -> mpq:
    """Exact for ints/Fractions/mpq; floats are rounded to the 2^-40 grid."""
    if isinstance(x, float):
        return mpq(round(x * RATIONAL_SCALE), RATIONAL_SCALE)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _frac(v: mpq) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class _Dictionary:
    """x_B[i] = rhs[i] - sum_j T[i][j] x_N[j];  z = z0 + sum_j r[j] x_N[j]."""

    __slots__ = ("basis", "nonbasis", "T", "rhs")

    def __init__(self, basis, nonbasis, T, rhs):
        self.basis, self.nonbasis, self.T, self.rhs = basis, nonbasis, T, rhs

    def copy(self):
        return _Dictionary(list(self.basis), list(self.nonbasis), [row[:] for row in self.T], self.rhs[:])

    def pivot(self, i: int, j: int, r: list, z0: mpq) -> mpq:
        T, rhs = self.T, self.rhs
        row = T[i]
        p = row[j]
        inv = 1 / p
        new = [v * inv for v in row]
        new[j] = inv
        rhs_i = rhs[i] * inv
        T[i] = new
        rhs[i] = rhs_i
        for k, other in enumerate(T):
            if k == i:
                continue
            f = other[j]
            if f:
                for col, v in enumerate(new):
                    if v:
                        other[col] -= f * v
                other[j] = -f * inv
                rhs[k] -= f * rhs_i
        f = r[j]
        if f:
            for col, v in enumerate(new):
                if v:
                    r[col] -= f * v
            r[j] = -f * inv
            z0 += f * rhs_i
        self.basis[i], self.nonbasis[j] = self.nonbasis[j], self.basis[i]
        return z0

    def optimize(self, r: list, z0: mpq, forbid: set | None = None):
        """Bland's-rule phase 2. Returns (status, z0)."""
        while True:
            enter = None
            for j in sorted(range(len(self.nonbasis)), key=lambda j: self.nonbasis[j]):
                if r[j] > 0 and (forbid is None or self.nonbasis[j] not in forbid):
                    enter = j
                    break
            if enter is None:
                return OPTIMAL, z0
            leave, best = None, None
            for i, row in enumerate(self.T):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                        leave, best = i, ratio
            if leave is None:
                return UNBOUNDED, z0
            z0 = self.pivot(leave, enter, r, z0)


class LPSolver:
    """Feasible region {x >= 0 : A x <= b}, reused across objectives.

    Phase 1 runs once; each ``maximize`` starts from the last feasible basis.
    """

    def __init__(self, A: Sequence[Sequence], b: Sequence):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        if len(b) != self.m or any(len(row) != self.n for row in A):
            raise ValueError("constraint matrix and rhs have inconsistent shapes")
        T = [[to_mpq(v) for v in row] for row in A]
        rhs = [to_mpq(v) for v in b]
        # variables 0..n-1 are structural, n..n+m-1 slacks, n+m the phase-1 artificial
        self._dict = _Dictionary(list(range(self.n, self.n + self.m)), list(range(self.n)), T, rhs)
        self.feasible = self._phase1()

    def _phase1(self) -> bool:
        d = self._dict
        if all(v >= 0 for v in d.rhs):
            return True
        art = self.n + self.m
        for row in d.T:
            row.append(mpq(-1))
        d.nonbasis.append(art)
        r = [mpq(0)] * len(d.nonbasis)
        r[-1] = mpq(-1)
        z0 = mpq(0)
        worst = min(range(self.m), key=lambda i: (d.rhs[i], d.basis[i]))
        z0 = d.pivot(worst, len(d.nonbasis) - 1, r, z0)
        status, z0 = d.optimize(r, z0)
        if z0 < 0:
            return False
        if art in d.basis:
            i = d.basis.index(art)
            j = next((j for j, v in enumerate(d.T[i]) if v != 0 and d.nonbasis[j] != art), None)
            if j is None:
                del d.T[i], d.rhs[i], d.basis[i]
            else:
                d.pivot(i, j, r, z0)
        j = d.nonbasis.index(art)
        for row in d.T:
            del row[j]
        del d.nonbasis[j]
        return True

    def maximize(self, c: Sequence) -> LPResult:
        if not self.feasible:
            return LPResult(INFEASIBLE)
        c = [to_mpq(v) for v in c]
        if len(c) != self.n:
            raise ValueError("objective length does not match variable count")
        d = self._dict.copy()
        cost = c + [mpq(0)] * self.m
        r = [cost[v] for v in d.nonbasis]
        z0 = mpq(0)
        for i, bv in enumerate(d.basis):
            cb = cost[bv]
            if cb:
                z0 += cb * d.rhs[i]
                row = d.T[i]
                for j, v in enumerate(row):
                    if v:
                        r[j] -= cb * v
        status, z0 = d.optimize(r, z0)
        if status != OPTIMAL:
            return LPResult(status)
        self._dict = d
        x = [mpq(0)] * self.n
        for i, bv in enumerate(d.basis):
            if bv < self.n:
                x[bv] = d.rhs[i]
        return LPResult(OPTIMAL, _frac(z0), tuple(_frac(v) for v in x))


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """One-shot exact LP: max c.x s.t. A x <= b, x >= 0."""
    if not A:
        if any(to_mpq(v) > 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in c))
    return LPSolver(A, b).maximize(c)


def feasible(A: Sequence[Sequence], b: Sequence) -> bool:
    if not A:
        return True
    return LPSolver(A, b).feasible
