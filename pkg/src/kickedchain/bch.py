"""Graded, truncated combination of operator exponentials.

A GradedOperator is a formal power series sum_g eps^g X_g whose components
live either in the symbolic ladder algebra (OperatorSum) or in a dense
matrix backend (square ndarray); the grade is a bookkeeping label carried by
the inputs.  bch_combine merges two exponentials through a requested total
grade using the Bernoulli-number recursion

    W' = dexpinv_W(X + exp(ad_W) Y),   e^{W(t)} = e^{tX} e^{tY},

which supports any order up to a configured cap with no hard-coded term
tables.  Nested commutators of total grade above the truncation are never
formed, so locality of the inputs keeps intermediate sums sparse.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .ladder import LengthMismatchError, OperatorSum, commutator

#: highest total grade supported without explicitly raising the cap
DEFAULT_ORDER_CAP = 8


class UnsupportedOrderError(ValueError):
    """Requested truncation grade exceeds the configured order cap."""


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with the B_1 = -1/2 convention."""
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2 == 1:
        return Fraction(0)
    total = Fraction(0)
    for j in range(n):
        total += comb(n + 1, j) * bernoulli(j)
    return -total / (n + 1)


def _is_zero(x) -> bool:
    if isinstance(x, OperatorSum):
        return x.is_zero
    return not np.any(x)


def _comm(x, y):
    if isinstance(x, OperatorSum) and isinstance(y, OperatorSum):
        return commutator(x, y)
    if isinstance(x, np.ndarray) and isinstance(y, np.ndarray):
        return x @ y - y @ x
    raise TypeError("cannot mix symbolic and dense components in one expansion")


def _add(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return x + y


class GradedOperator:
    """Truncated formal series: mapping grade -> component, plus the cap.

    Components are OperatorSum or ndarray; grades are non-negative integers
    and entries above max_grade are rejected.  Zero components are dropped.
    """

    __slots__ = ("terms", "max_grade", "length")

    def __init__(self, terms: dict, max_grade: int, length: int):
        self.terms = {}
        for g, x in terms.items():
            if g < 0:
                raise ValueError("grades must be non-negative")
            if g > max_grade:
                raise ValueError(f"grade {g} above max_grade {max_grade}")
            if not _is_zero(x):
                self.terms[g] = x
        self.max_grade = max_grade
        self.length = length

    @classmethod
    def zero(cls, max_grade: int, length: int) -> "GradedOperator":
        return cls({}, max_grade, length)

    @classmethod
    def single(cls, grade: int, component, length: int, max_grade: int | None = None) -> "GradedOperator":
        return cls({grade: component}, max_grade if max_grade is not None else grade, length)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def min_grade(self) -> int | None:
        return min(self.terms) if self.terms else None

    def grades(self) -> list[int]:
        return sorted(self.terms)

    def component(self, g: int):
        """Component at grade g; symbolic zero if absent."""
        x = self.terms.get(g)
        if x is None:
            return OperatorSum.zero(self.length)
        return x

    def with_grade(self, g: int, component) -> "GradedOperator":
        terms = dict(self.terms)
        terms[g] = component
        return GradedOperator(terms, max(self.max_grade, g), self.length)

    def truncated(self, max_grade: int) -> "GradedOperator":
        return GradedOperator(
            {g: x for g, x in self.terms.items() if g <= max_grade}, max_grade, self.length
        )

    def add(self, other: "GradedOperator") -> "GradedOperator":
        if other.is_zero:
            return self
        if self.is_zero and self.max_grade <= other.max_grade:
            return other
        cap = max(self.max_grade, other.max_grade)
        terms = dict(self.terms)
        for g, x in other.terms.items():
            terms[g] = _add(terms.get(g), x)
        return GradedOperator(terms, cap, self.length)

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        return self.add(other)

    def scale(self, c) -> "GradedOperator":
        return GradedOperator(
            {g: x * c for g, x in self.terms.items()}, self.max_grade, self.length
        )

    def __neg__(self) -> "GradedOperator":
        return self.scale(-1.0)

    def commutator(self, other: "GradedOperator", max_grade: int) -> "GradedOperator":
        """Graded commutator, discarding output grades above max_grade."""
        out: dict[int, object] = {}
        for ga, xa in self.terms.items():
            for gb, xb in other.terms.items():
                g = ga + gb
                if g > max_grade:
                    continue
                c = _comm(xa, xb)
                if not _is_zero(c):
                    out[g] = _add(out.get(g), c)
        return GradedOperator(out, max_grade, self.length)

    def total(self):
        """Sum of all components (the series evaluated at eps = 1)."""
        acc = None
        for g in sorted(self.terms):
            acc = _add(acc, self.terms[g])
        if acc is None:
            return OperatorSum.zero(self.length)
        return acc

    def adjoint(self) -> "GradedOperator":
        out = {}
        for g, x in self.terms.items():
            out[g] = x.adjoint() if isinstance(x, OperatorSum) else x.conj().T
        return GradedOperator(out, self.max_grade, self.length)

    def __repr__(self) -> str:
        gs = {g: getattr(x, "n_terms", "dense") for g, x in sorted(self.terms.items())}
        return f"GradedOperator(max_grade={self.max_grade}, terms={gs})"


def _check_compatible(x: GradedOperator, y: GradedOperator) -> None:
    if x.length != y.length:
        raise LengthMismatchError(f"lengths differ: {x.length} != {y.length}")


# -- truncated series helpers (lists indexed by formal degree) ---------------


def _series_ad(w: list, t: list, max_grade: int) -> list:
    """Degree-wise [W, T] for series W (W[0] ignored, zero) and T."""
    n = len(t)
    out: list = [None] * n
    for a in range(1, n):
        wa = w[a]
        if wa is None or wa.is_zero:
            continue
        for b in range(0, n - a):
            tb = t[b]
            if tb is None or tb.is_zero:
                continue
            c = wa.commutator(tb, max_grade)
            if not c.is_zero:
                out[a + b] = c if out[a + b] is None else out[a + b].add(c)
    return out


def bch_combine(
    x: GradedOperator,
    y: GradedOperator,
    max_grade: int,
    order_cap: int | None = None,
) -> GradedOperator:
    """W with e^W = e^X e^Y exactly through total grade max_grade.

    Inputs must have min grade >= 1.  Raises UnsupportedOrderError when
    max_grade exceeds the order cap (default DEFAULT_ORDER_CAP); pass a
    larger order_cap explicitly to go higher.
    """
    cap = DEFAULT_ORDER_CAP if order_cap is None else order_cap
    if max_grade < 1:
        raise ValueError("max_grade must be >= 1")
    if max_grade > cap:
        raise UnsupportedOrderError(
            f"max_grade {max_grade} exceeds the order cap {cap}; raise order_cap"
        )
    _check_compatible(x, y)
    for op in (x, y):
        if not op.is_zero and op.min_grade < 1:
            raise ValueError("bch_combine inputs must carry grade >= 1")
    length = x.length
    n_words = max_grade  # words longer than this exceed the grade budget
    zero = GradedOperator.zero(max_grade, length)
    x = x.truncated(max_grade)
    y = y.truncated(max_grade)

    w: list = [None] * (n_words + 1)  # w[n] for n >= 1
    xy = x.add(y)
    for n in range(1, n_words + 1):
        deg = n - 1  # needed degree of the right-hand side
        # V = X + exp(ad_W) Y, as a series in the formal parameter
        v: list = [None] * n
        v[0] = xy
        t: list = [None] * n
        t[0] = y
        for k in range(1, n):
            t = _series_ad(w, t, max_grade)
            if all(c is None or c.is_zero for c in t):
                break
            inv_fact = 1.0 / factorial(k)
            for d in range(k, n):
                if t[d] is not None and not t[d].is_zero:
                    v[d] = _add(v[d], t[d].scale(inv_fact))
        # RHS = sum_k B_k/k! ad_W^k (V)
        rhs = v[deg]
        u: list = v
        for k in range(1, n):
            u = _series_ad(w, u, max_grade)
            if all(c is None or c.is_zero for c in u):
                break
            bk = bernoulli(k)
            if bk == 0 or u[deg] is None or u[deg].is_zero:
                continue
            rhs = _add(rhs, u[deg].scale(float(bk) / factorial(k)))
        w[n] = zero if rhs is None else rhs.scale(1.0 / n)

    result = zero
    for n in range(1, n_words + 1):
        if w[n] is not None:
            result = result.add(w[n])
    return result.truncated(max_grade)


def conjugate_by_exp(s: GradedOperator, a: GradedOperator, max_grade: int) -> GradedOperator:
    """exp(ad_S) A = sum_k ad_S^k(A) / k!, truncated at total grade max_grade.

    S must have min grade >= 1 so the series terminates under truncation; A
    may carry a grade-0 component.
    """
    _check_compatible(s, a)
    if not s.is_zero and s.min_grade < 1:
        raise ValueError("conjugating generator must carry grade >= 1")
    a = a.truncated(max_grade)
    result = a
    t = a
    for k in range(1, max_grade + 1):
        t = s.commutator(t, max_grade).scale(1.0 / k)
        if t.is_zero:
            break
        result = result.add(t)
    return result


def floquet_magnus(
    j_coupling: float,
    h_field: float,
    tau: float,
    m_star: int,
    chain,
    order_cap: int | None = None,
) -> GradedOperator:
    """Effective-Hamiltonian series {Omega_0 .. Omega_m*} of the kicked model.

    The one-period propagator exp(-i h Z tau) exp(-i J D_y tau) defines
    -i tau H_F = log(..); regrouping by powers of tau gives
    H_F = sum_m tau^m Omega_m with Omega_0 = h Z + J D_y.  The returned
    GradedOperator stores Omega_m at grade m; each Omega_m is tau-independent.
    """
    from .model import build_collective, build_dipolar

    if m_star < 0:
        raise ValueError("m_star must be >= 0")
    z = build_collective(chain.L, "z")
    dy = build_dipolar(chain, "y")
    x = GradedOperator.single(1, z.scale(-1j * h_field * tau), chain.L)
    y = GradedOperator.single(1, dy.scale(-1j * j_coupling * tau), chain.L)
    w = bch_combine(x, y, m_star + 1, order_cap=order_cap)
    omega = {}
    for m in range(0, m_star + 1):
        comp = w.terms.get(m + 1)
        if comp is not None:
            omega[m] = comp.scale(1j / tau ** (m + 1))
    return GradedOperator(omega, m_star, chain.L)
