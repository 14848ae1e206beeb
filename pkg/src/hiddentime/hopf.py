"""Transition functions, winding numbers and Bargmann-Wigner multi-spinors.

The monopole-bundle transition function is ``exp(-2 i g phi)``.  It is
single valued on the equator only when ``exp(-4 pi i g) = 1``, i.e. for
half-integer ``g``.  A product of ``n`` spin-1/2 spinors carries
``g = n/2``.

Loops are traversed counterclockwise in ``phi``; with this orientation
the transition function winds ``-2g`` times.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

import numpy as np

from .errors import AliasingError, DomainError
from .geometry import FourMomentum
from .spinors import Branch, DiracSpinor

QUANTIZATION_TOL = 1e-12
DEFAULT_LOOP_SAMPLES = 360
MIN_LOOP_SAMPLES = 8


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # 0.3 should mean 3/10, not its binary expansion
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class WindingNumber:
    """Candidate winding number ``g``, kept exact as a fraction."""

    g: Fraction

    def __post_init__(self):
        object.__setattr__(self, "g", _as_fraction(self.g))

    @classmethod
    def of(cls, value) -> "WindingNumber":
        if isinstance(value, WindingNumber):
            return value
        return cls(_as_fraction(value))

    @property
    def admissible(self) -> bool:
        """True when ``2g`` is an integer."""
        return (2 * self.g).denominator == 1

    @property
    def twice(self) -> Fraction:
        return 2 * self.g

    def __float__(self) -> float:
        return float(self.g)

    def __str__(self) -> str:
        return str(self.g)


def transition_phase(g, t_phi):
    """``exp(-2 i g t_phi)``; accepts scalar or array ``t_phi``."""
    gv = float(WindingNumber.of(g))
    out = np.exp(-2j * gv * np.asarray(t_phi, dtype=float))
    return complex(out) if out.ndim == 0 else out


def quantization_defect(g) -> float:
    """``|exp(-4 pi i g) - 1|``."""
    return abs(cmath.exp(-4j * math.pi * float(WindingNumber.of(g))) - 1.0)


def quantization_check(g) -> bool:
    return quantization_defect(g) < QUANTIZATION_TOL


def loop_samples(g, n: int = DEFAULT_LOOP_SAMPLES) -> np.ndarray:
    """Transition phase on one equator loop, ``phi_k = 2 pi k / n`` for k = 0..n.

    The endpoint ``phi = 2 pi`` is included so a non-closing (forbidden)
    transition function shows up as a fractional number of turns.
    """
    phi = np.linspace(0.0, 2.0 * math.pi, n + 1)
    return transition_phase(g, phi)


def winding_turns(samples: Sequence[complex]) -> float:
    """Total unwrapped phase of an ordered sample sequence, in units of 2 pi."""
    z = np.asarray(samples, dtype=complex).reshape(-1)
    if z.size < MIN_LOOP_SAMPLES:
        raise AliasingError(f"need at least {MIN_LOOP_SAMPLES} samples, got {z.size}")
    steps = np.angle(z[1:] / z[:-1])
    worst = float(np.max(np.abs(steps))) if steps.size else 0.0
    if worst >= math.pi * (1.0 - 1e-9):
        raise AliasingError(f"consecutive phase jump {worst:.4f} rad is not below pi")
    return float(np.sum(steps) / (2.0 * math.pi))


def compute_winding(samples: Sequence[complex]) -> int:
    return int(round(winding_turns(samples)))


def winding_of_product(gs: Iterable) -> WindingNumber:
    """Winding number of a tensor product: the factors' winding numbers add."""
    total = Fraction(0)
    for g in gs:
        total += WindingNumber.of(g).g
    return WindingNumber(total)


@dataclass(frozen=True, eq=False)
class MultiSpinor:
    """Rank-``n`` multi-spinor with one Dirac index per factor."""

    components: np.ndarray
    momentum: FourMomentum
    branches: tuple[Branch, ...]

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=complex)
        if comps.shape != (4,) * len(self.branches):
            raise DomainError(f"components shape {comps.shape} does not match order {len(self.branches)}")
        if not np.all(np.isfinite(comps)):
            raise DomainError("multi-spinor components must be finite")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    @property
    def order(self) -> int:
        return len(self.branches)

    @property
    def winding(self) -> WindingNumber:
        return WindingNumber(Fraction(self.order, 2))

    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def bw_product(factors: Sequence[DiracSpinor]) -> MultiSpinor:
    """Outer product of ``n`` spinors sharing one four-momentum."""
    if len(factors) < 1:
        raise DomainError("need at least one factor")
    p = factors[0].momentum
    for f in factors[1:]:
        if not p.isclose(f.momentum):
            raise DomainError("all factors must share one four-momentum")
    comps = factors[0].components
    for f in factors[1:]:
        comps = np.multiply.outer(comps, f.components)
    return MultiSpinor(comps, p, tuple(f.branch for f in factors))


def apply_on_index(matrix: np.ndarray, components: np.ndarray, axis: int) -> np.ndarray:
    """Act with a 4x4 matrix on one Dirac index, identity on the rest."""
    out = np.tensordot(matrix, components, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def bw_residual(M: MultiSpinor, g, k: int, mass: float | None = None) -> float:
    """Norm of the Dirac operator applied on the ``k``-th index (1-based).

    The operator is ``gamma.p - m`` on positive-energy indices and
    ``gamma.p + m`` on negative-energy ones.
    """
    if not (1 <= k <= M.order):
        raise IndexError(f"index {k} outside 1..{M.order}")
    m = M.momentum.m if mass is None else mass
    sign = M.branches[k - 1].sign
    op = g.slash(sign * M.momentum.vector) - m * np.eye(4)
    return float(np.linalg.norm(apply_on_index(op, M.components, k - 1)))


def symmetrize(M: MultiSpinor) -> MultiSpinor:
    """Average over all permutations of the Dirac indices."""
    perms = list(permutations(range(M.order)))
    acc = np.zeros_like(M.components)
    for perm in perms:
        acc = acc + np.transpose(M.components, perm)
    return MultiSpinor(acc / len(perms), M.momentum, M.branches)


def symmetry_defect(M: MultiSpinor) -> float:
    """Largest entry-wise change under any index permutation."""
    worst = 0.0
    for perm in permutations(range(M.order)):
        worst = max(worst, float(np.max(np.abs(np.transpose(M.components, perm) - M.components))))
    return worst
