"""Exact symbolic algebra for spin-1/2 chain operators in the ladder basis.

Operators are sparse complex combinations of product strings over the
single-site basis {Id, Sz, S+, S-}.  This basis diagonalizes the adjoint
action of the collective magnetization Z = sum_j Sz_j: every string has an
integer coherence order q (number of S+ minus number of S-), and
[Z, string] = q * string holds exactly.  Coherence decomposition is
therefore a plain partition of stored terms, and collective z-rotations act
as per-term phases.

Site 0 is the lowest bit of the computational-basis index in the dense
backend; string text reads left to right from site 0 (e.g. ``I+-ZI``).
"""

from __future__ import annotations

import cmath
import enum
import math
from typing import Iterable, Iterator, Mapping

import numpy as np

from ._kernels import pair_commutator, pair_products

#: coefficients with magnitude below this are dropped after every operation
PRUNE_TOL = 1e-14

_COHERENCE = (0, 0, 1, -1)
_ADJOINT_CODE = (0, 1, 3, 2)
_TRACE_WEIGHT = (1.0, 0.25, 0.5, 0.5)
_CHARS = "IZ+-"
# accept both ASCII '-' and the unicode minus sign on input
_CHAR_TO_CODE = {"I": 0, "Z": 1, "+": 2, "-": 3, "−": 3}


class LengthMismatchError(ValueError):
    """Raised when combining operators defined on different chain lengths."""


class SiteSymbol(enum.IntEnum):
    """Single-site basis operator: identity, Sz, raising, lowering."""

    ID = 0
    SZ = 1
    PLUS = 2
    MINUS = 3

    @property
    def coherence(self) -> int:
        return _COHERENCE[self]

    @property
    def adjoint(self) -> "SiteSymbol":
        return SiteSymbol(_ADJOINT_CODE[self])

    @property
    def char(self) -> str:
        return _CHARS[self]

    @property
    def matrix(self) -> np.ndarray:
        """2x2 image; basis index 0 = spin up (+1/2)."""
        m = [
            [[1, 0], [0, 1]],
            [[0.5, 0], [0, -0.5]],
            [[0, 1], [0, 0]],
            [[0, 0], [1, 0]],
        ][self]
        return np.array(m, dtype=complex)


def _occupied_sites(code: int, length: int) -> Iterator[int]:
    for j in range(length):
        if (code >> (2 * j)) & 3:
            yield j


class LadderString:
    """An immutable product string of site symbols with no coefficient."""

    __slots__ = ("code", "length")

    def __init__(self, code: int, length: int):
        self.code = code
        self.length = length

    @classmethod
    def identity(cls, length: int) -> "LadderString":
        return cls(0, length)

    @classmethod
    def from_symbols(cls, symbols: Iterable[SiteSymbol | int]) -> "LadderString":
        code = 0
        length = 0
        for j, s in enumerate(symbols):
            code |= int(s) << (2 * j)
            length = j + 1
        return cls(code, length)

    @classmethod
    def from_text(cls, text: str) -> "LadderString":
        try:
            return cls.from_symbols(_CHAR_TO_CODE[ch] for ch in text)
        except KeyError as exc:
            raise ValueError(f"bad symbol in string {text!r}") from exc

    @classmethod
    def single(cls, length: int, site: int, symbol: SiteSymbol | int) -> "LadderString":
        if not 0 <= site < length:
            raise ValueError(f"site {site} outside chain of length {length}")
        return cls(int(symbol) << (2 * site), length)

    def site(self, j: int) -> SiteSymbol:
        return SiteSymbol((self.code >> (2 * j)) & 3)

    @property
    def symbols(self) -> tuple[SiteSymbol, ...]:
        return tuple(self.site(j) for j in range(self.length))

    @property
    def coherence(self) -> int:
        q = 0
        for j in _occupied_sites(self.code, self.length):
            q += _COHERENCE[(self.code >> (2 * j)) & 3]
        return q

    @property
    def weight(self) -> int:
        return sum(1 for _ in _occupied_sites(self.code, self.length))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(_occupied_sites(self.code, self.length))

    @property
    def text(self) -> str:
        return "".join(_CHARS[(self.code >> (2 * j)) & 3] for j in range(self.length))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LadderString)
            and self.code == other.code
            and self.length == other.length
        )

    def __hash__(self) -> int:
        return hash((self.code, self.length))

    def __repr__(self) -> str:
        return f"LadderString({self.text!r})"


def _code_coherence(code: int, length: int) -> int:
    q = 0
    for j in range(length):
        q += _COHERENCE[(code >> (2 * j)) & 3]
    return q


def _code_weight_factor(code: int, length: int) -> float:
    w = 1.0
    for j in range(length):
        c = (code >> (2 * j)) & 3
        if c:
            w *= _TRACE_WEIGHT[c]
    return w


def _code_adjoint(code: int, length: int) -> int:
    out = 0
    for j in range(length):
        out |= _ADJOINT_CODE[(code >> (2 * j)) & 3] << (2 * j)
    return out


class OperatorSum:
    """A sparse complex combination of ladder strings on a fixed-length chain.

    Instances are treated as immutable; all arithmetic returns new objects
    and prunes coefficients below PRUNE_TOL.
    """

    __slots__ = ("length", "_terms", "_packed")

    def __init__(self, length: int, terms: Mapping[int, complex] | None = None, prune: bool = True):
        self.length = length
        if terms is None:
            self._terms = {}
        elif prune:
            self._terms = {k: complex(c) for k, c in terms.items() if abs(c) >= PRUNE_TOL}
        else:
            self._terms = dict(terms)
        self._packed = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, length: int) -> "OperatorSum":
        return cls(length)

    @classmethod
    def identity(cls, length: int, coeff: complex = 1.0) -> "OperatorSum":
        return cls(length, {0: coeff})

    @classmethod
    def from_strings(cls, length: int, terms: Iterable[tuple[LadderString, complex]]) -> "OperatorSum":
        acc: dict[int, complex] = {}
        for s, c in terms:
            if s.length != length:
                raise LengthMismatchError(f"string length {s.length} != {length}")
            acc[s.code] = acc.get(s.code, 0.0) + complex(c)
        return cls(length, acc)

    @classmethod
    def single(cls, length: int, site: int, symbol: SiteSymbol | int, coeff: complex = 1.0) -> "OperatorSum":
        return cls(length, {LadderString.single(length, site, symbol).code: coeff})

    # -- inspection ----------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def items(self) -> Iterator[tuple[LadderString, complex]]:
        for k, c in self._terms.items():
            yield LadderString(k, self.length), c

    def coefficient(self, s: LadderString) -> complex:
        if s.length != self.length:
            raise LengthMismatchError("string length mismatch")
        return self._terms.get(s.code, 0.0)

    def max_weight(self) -> int:
        return max((LadderString(k, self.length).weight for k in self._terms), default=0)

    def support_extent(self) -> int:
        """Largest distance in sites between occupied ends of any term."""
        ext = 0
        for k in self._terms:
            sup = LadderString(k, self.length).support
            if sup:
                ext = max(ext, sup[-1] - sup[0])
        return ext

    def packed(self) -> tuple[np.ndarray, np.ndarray]:
        if self._packed is None:
            keys = np.fromiter(self._terms.keys(), dtype=np.int64, count=len(self._terms))
            vals = np.fromiter(self._terms.values(), dtype=np.complex128, count=len(self._terms))
            self._packed = (keys, vals)
        return self._packed

    def __repr__(self) -> str:
        if self.is_zero:
            return f"OperatorSum(L={self.length}, 0)"
        shown = ", ".join(
            f"{c:.6g}*{LadderString(k, self.length).text}" for k, c in list(self._terms.items())[:4]
        )
        more = "" if self.n_terms <= 4 else f", ... ({self.n_terms} terms)"
        return f"OperatorSum(L={self.length}, {shown}{more})"

    # -- linear algebra -------------------------------------------------

    def _check_length(self, other: "OperatorSum") -> None:
        if self.length != other.length:
            raise LengthMismatchError(f"lengths differ: {self.length} != {other.length}")

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        self._check_length(other)
        a, b = self._terms, other._terms
        if len(b) > len(a):
            a, b = b, a
        acc = dict(a)
        for k, c in b.items():
            acc[k] = acc.get(k, 0.0) + c
        return OperatorSum(self.length, acc)

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-other)

    def __neg__(self) -> "OperatorSum":
        return OperatorSum(self.length, {k: -c for k, c in self._terms.items()}, prune=False)

    def scale(self, c: complex) -> "OperatorSum":
        return OperatorSum(self.length, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, OperatorSum):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c: complex) -> "OperatorSum":
        return self.scale(c)

    def __truediv__(self, c: complex) -> "OperatorSum":
        return self.scale(1.0 / c)

    def adjoint(self) -> "OperatorSum":
        L = self.length
        return OperatorSum(
            L, {_code_adjoint(k, L): c.conjugate() for k, c in self._terms.items()}, prune=False
        )

    def allclose(self, other: "OperatorSum", tol: float = 1e-12) -> bool:
        self._check_length(other)
        keys = set(self._terms) | set(other._terms)
        return all(
            abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= tol for k in keys
        )

    # -- serialization ---------------------------------------------------

    def to_text(self) -> str:
        """One term per line: ``coeff_re coeff_im symbol-string``."""
        lines = [
            f"{c.real!r} {c.imag!r} {LadderString(k, self.length).text}"
            for k, c in sorted(self._terms.items())
        ]
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, length: int | None = None) -> "OperatorSum":
        terms: dict[int, complex] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            re_s, im_s, sym = line.split()
            s = LadderString.from_text(sym)
            if length is None:
                length = s.length
            elif s.length != length:
                raise LengthMismatchError("inconsistent string lengths in text form")
            terms[s.code] = terms.get(s.code, 0.0) + complex(float(re_s), float(im_s))
        if length is None:
            raise ValueError("empty operator text and no length given")
        return cls(length, terms)


# -- module-level operations ------------------------------------------------


def multiply(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Exact operator product AB."""
    a._check_length(b)
    if a.is_zero or b.is_zero:
        return OperatorSum.zero(a.length)
    ka, ca = a.packed()
    kb, cb = b.packed()
    keys, vals = pair_products(ka, ca, kb, cb)
    return OperatorSum(a.length, dict(zip(keys.tolist(), vals.tolist())))


def commutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Exact commutator AB - BA; disjoint-support pairs are skipped."""
    a._check_length(b)
    if a.is_zero or b.is_zero:
        return OperatorSum.zero(a.length)
    ka, ca = a.packed()
    kb, cb = b.packed()
    keys, vals = pair_commutator(ka, ca, kb, cb)
    return OperatorSum(a.length, dict(zip(keys.tolist(), vals.tolist())))


def adjoint(a: OperatorSum) -> OperatorSum:
    return a.adjoint()


def inner(a: OperatorSum, b: OperatorSum) -> complex:
    """Normalized Hilbert-Schmidt inner product Tr[A^dag B] / 2^L.

    Distinct strings are trace-orthogonal; matching strings contribute the
    product of per-site weights <Id,Id>=1, <Sz,Sz>=1/4, <S+,S+>=<S-,S->=1/2.
    """
    a._check_length(b)
    small, big = (a, b) if a.n_terms <= b.n_terms else (b, a)
    total = 0.0 + 0.0j
    L = a.length
    for k, cs in small._terms.items():
        cb = big._terms.get(k)
        if cb is None:
            continue
        w = _code_weight_factor(k, L)
        if small is a:
            total += cs.conjugate() * cb * w
        else:
            total += cb.conjugate() * cs * w
    return total


def frobenius_norm(a: OperatorSum) -> float:
    """sqrt(Tr[A^dag A] / 2^L)."""
    total = sum(abs(c) ** 2 * _code_weight_factor(k, a.length) for k, c in a._terms.items())
    return math.sqrt(total)


def coherence_decompose(a: OperatorSum) -> dict[int, OperatorSum]:
    """Partition A = sum_q A_q with [Z, A_q] = q A_q exactly."""
    buckets: dict[int, dict[int, complex]] = {}
    L = a.length
    for k, c in a._terms.items():
        q = _code_coherence(k, L)
        buckets.setdefault(q, {})[k] = c
    return {q: OperatorSum(L, t, prune=False) for q, t in sorted(buckets.items())}


def coherence_sector(a: OperatorSum, q: int) -> OperatorSum:
    """The single sector A_q (zero operator if absent)."""
    L = a.length
    terms = {k: c for k, c in a._terms.items() if _code_coherence(k, L) == q}
    return OperatorSum(L, terms, prune=False)


def rotate_z(a: OperatorSum, phi: float) -> OperatorSum:
    """exp(-i phi Z) A exp(+i phi Z) = sum_q exp(-i q phi) A_q."""
    L = a.length
    out = {}
    for k, c in a._terms.items():
        q = _code_coherence(k, L)
        out[k] = c if q == 0 else c * cmath.exp(-1j * q * phi)
    return OperatorSum(L, out, prune=False)
