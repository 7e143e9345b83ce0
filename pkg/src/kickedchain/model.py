"""Physical operators and drive schedule of the kicked dipolar chain.

The chain is a single open row of L spins-1/2 with couplings 1/(2 r^3) at
site distance r (full range by default, optionally cut off).  One Floquet
period applies dipolar evolution followed by a collective z kick:

    U_F = exp(-i h Z tau) * exp(-i J D_y tau)

All stroboscopic dynamics depends only on the dimensionless products J*tau
and h*tau.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ladder import OperatorSum, SiteSymbol

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class ChainSpec:
    """Open chain geometry and dipolar coupling profile."""

    L: int
    coupling_prefactor: float = 0.5
    power: int = 3
    range_cutoff: int | None = None  # max |k - j| kept; None = full range

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("chain needs at least 2 sites")
        if self.range_cutoff is not None and self.range_cutoff < 1:
            raise ValueError("range_cutoff must be >= 1")

    @property
    def cutoff(self) -> int:
        return self.L - 1 if self.range_cutoff is None else min(self.range_cutoff, self.L - 1)

    def coupling(self, r: int) -> float:
        """Coupling at site distance r (0 beyond the cutoff)."""
        if r < 1 or r > self.cutoff:
            return 0.0
        return self.coupling_prefactor / r**self.power


@dataclass(frozen=True)
class FloquetSpec:
    """Drive parameters: dipolar strength J, kick field h, period tau."""

    J: float
    h: float
    tau: float = 1.0

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    @property
    def j_tau(self) -> float:
        return self.J * self.tau

    @property
    def h_tau(self) -> float:
        return self.h * self.tau


def _site_spin(length: int, site: int, axis: str) -> OperatorSum:
    """Single-site S_axis expanded in the ladder basis."""
    if axis == "z":
        return OperatorSum.single(length, site, SiteSymbol.SZ)
    plus = OperatorSum.single(length, site, SiteSymbol.PLUS)
    minus = OperatorSum.single(length, site, SiteSymbol.MINUS)
    if axis == "x":
        return (plus + minus).scale(0.5)
    if axis == "y":
        return (plus - minus).scale(-0.5j)
    raise ValueError(f"unknown axis {axis!r}")


def build_collective(L: int, axis: str) -> OperatorSum:
    """Collective magnetization sum_j S_axis^j."""
    if L < 1:
        raise ValueError("L must be >= 1")
    total = OperatorSum.zero(L)
    for j in range(L):
        total = total + _site_spin(L, j, axis)
    return total


def build_dipolar(chain: ChainSpec, axis: str) -> OperatorSum:
    """Dipolar order operator D_axis = sum_{j<k} c_jk (3 S_a^j S_a^k - S^j.S^k)."""
    if axis not in _AXES:
        raise ValueError(f"unknown axis {axis!r}")
    L = chain.L
    total = OperatorSum.zero(L)
    for j in range(L):
        for k in range(j + 1, min(L, j + chain.cutoff + 1)):
            c = chain.coupling(k - j)
            if c == 0.0:
                continue
            pair = _site_spin(L, j, axis) * _site_spin(L, k, axis) * 3.0
            for b in _AXES:
                pair = pair - _site_spin(L, j, b) * _site_spin(L, k, b)
            total = total + pair.scale(c)
    return total


def build_average_hamiltonian(spec: FloquetSpec, chain: ChainSpec) -> OperatorSum:
    """Zeroth-order effective Hamiltonian J D_y + h Z of the kicked model."""
    return build_dipolar(chain, "y").scale(spec.J) + build_collective(chain.L, "z").scale(spec.h)
