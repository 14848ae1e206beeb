"""Free-particle Dirac spinors built from the time-sphere chart.

The positive-energy branches come from the northern chart, the
negative-energy branches from the southern chart.  Spinors are normalized
to ``ubar u = +1`` (positive energy) and ``-1`` (negative energy), in the
standard (sigma_z) Dirac representation.

Plane waves use the phase ``exp(-i(E x0 - p.x))`` for positive-energy
branches and ``exp(+i(E x0 - p.x))`` for negative-energy branches.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import FourMomentum, VelocityLike, angles_from_velocity, as_velocity

_GAMMA0 = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class SubBranch(enum.Enum):
    UP = "up"
    DOWN = "down"


class Branch(enum.Enum):
    POS_UP = "PosUp"
    POS_DOWN = "PosDown"
    NEG_UP = "NegUp"
    NEG_DOWN = "NegDown"

    @property
    def positive(self) -> bool:
        return self in (Branch.POS_UP, Branch.POS_DOWN)

    @property
    def sign(self) -> int:
        """+1 for positive-energy branches, -1 for negative-energy ones."""
        return 1 if self.positive else -1


class PhaseConvention(enum.Enum):
    E_MINUS_IPX = "EMinusIPX"


@dataclass(frozen=True, eq=False)
class DiracSpinor:
    components: np.ndarray
    branch: Branch
    momentum: FourMomentum

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=complex).reshape(4)
        if not np.all(np.isfinite(comps)):
            raise DomainError("spinor components must be finite")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    @property
    def mass(self) -> float:
        return self.momentum.m

    def bar(self) -> np.ndarray:
        """Dirac adjoint ``u^dagger gamma^0`` as a row vector."""
        return self.components.conj() @ _GAMMA0


@dataclass(frozen=True, eq=False)
class PlaneWaveState:
    spinor: DiracSpinor
    phase_sign: PhaseConvention = PhaseConvention.E_MINUS_IPX

    @property
    def exponent_sign(self) -> int:
        """Sign s in ``exp(s i (E x0 - p.x))``."""
        return -self.spinor.branch.sign


def _sub_branch(sub_branch) -> SubBranch:
    if isinstance(sub_branch, SubBranch):
        return sub_branch
    try:
        return SubBranch(str(sub_branch).lower())
    except ValueError:
        raise DomainError(f"unknown sub-branch {sub_branch!r}") from None


def _chart(m: float, v: VelocityLike):
    if not (math.isfinite(m) and m > 0.0):
        raise DomainError(f"rest mass must be > 0, got {m!r}")
    vel = as_velocity(v)
    angles = angles_from_velocity(vel)
    momentum = FourMomentum.from_velocity(m, vel)
    half = 0.5 * angles.t_theta
    # cosh(t_theta/2) = sqrt((m + E) / 2m), tanh(t_theta/2) = |p| / (m + E)
    norm = math.cosh(half)
    ratio = math.tanh(half)
    along_x3 = ratio * math.cos(angles.t_phi)
    along_s = ratio * math.sin(angles.t_phi)
    phase = complex(math.cos(angles.azimuth), math.sin(angles.azimuth))
    return momentum, norm, along_x3, along_s, phase


def positive_energy_spinor(m: float, v: VelocityLike, sub_branch=SubBranch.UP) -> DiracSpinor:
    """Northern-chart spinor ``sqrt((m+E)/2m) (1, 0, p3/(m+E), (p1 + i p2)/(m+E))``.

    The DOWN branch takes ``v_s = v1 - i v2`` and swaps rows 1<->2 and
    3<->4.  The swapped p3 entry picks up a minus sign, which the
    momentum-space Dirac equation requires.
    """
    sub = _sub_branch(sub_branch)
    momentum, norm, a3, a_s, phase = _chart(m, v)
    if sub is SubBranch.UP:
        comps = np.array([1.0, 0.0, a3, a_s * phase], dtype=complex)
        branch = Branch.POS_UP
    else:
        comps = np.array([0.0, 1.0, a_s * phase.conjugate(), -a3], dtype=complex)
        branch = Branch.POS_DOWN
    return DiracSpinor(norm * comps, branch, momentum)


def negative_energy_spinor(m: float, v: VelocityLike, sub_branch=SubBranch.UP) -> DiracSpinor:
    """Southern-chart spinor, solving ``(gamma.p + m) w = 0``.

    From ``(sinh(t_theta/2) exp(-i t_phi), cosh(t_theta/2))`` with
    ``v_s = -v1 - i v2`` (UP) or ``-v1 + i v2`` plus the row swap (DOWN).
    """
    sub = _sub_branch(sub_branch)
    momentum, norm, a3, a_s, phase = _chart(m, v)
    if sub is SubBranch.UP:
        # -sin(t_phi) * v_s with v_s = -(v1 + i v2)
        comps = np.array([a3, a_s * phase, 1.0, 0.0], dtype=complex)
        branch = Branch.NEG_UP
    else:
        comps = np.array([a_s * phase.conjugate(), -a3, 0.0, 1.0], dtype=complex)
        branch = Branch.NEG_DOWN
    return DiracSpinor(norm * comps, branch, momentum)


def spinor(m: float, v: VelocityLike, branch: Branch) -> DiracSpinor:
    """Dispatch on a :class:`Branch`."""
    branch = Branch(branch)
    sub = SubBranch.UP if branch in (Branch.POS_UP, Branch.NEG_UP) else SubBranch.DOWN
    if branch.positive:
        return positive_energy_spinor(m, v, sub)
    return negative_energy_spinor(m, v, sub)


def general_spinor(m: float, v: VelocityLike) -> DiracSpinor:
    """Positive-energy spinor written with ``sigma . p`` acting on ``(1, 0)``.

    Representation-free form; in the Dirac representation it coincides
    with ``positive_energy_spinor(m, v, UP)``.
    """
    if not (math.isfinite(m) and m > 0.0):
        raise DomainError(f"rest mass must be > 0, got {m!r}")
    momentum = FourMomentum.from_velocity(m, v)
    E = momentum.E
    upper = np.array([1.0, 0.0], dtype=complex)
    sigma_p = np.einsum("i,ijk->jk", momentum.p, PAULI)
    lower = sigma_p @ upper / (m + E)
    comps = math.sqrt((m + E) / (2.0 * m)) * np.concatenate([upper, lower])
    return DiracSpinor(comps, Branch.POS_UP, momentum)


def plane_wave(u: DiracSpinor) -> PlaneWaveState:
    return PlaneWaveState(u)


def plane_wave_value(state: PlaneWaveState, x) -> np.ndarray:
    """Spinor times its plane-wave phase at event(s) ``x = (x0, x1, x2, x3)``.

    ``x`` may carry leading batch dimensions; the result has shape
    ``x.shape[:-1] + (4,)``.
    """
    x = np.asarray(x, dtype=float)
    p = state.spinor.momentum
    phase = p.E * x[..., 0] - (p.p1 * x[..., 1] + p.p2 * x[..., 2] + p.p3 * x[..., 3])
    factor = np.exp(1j * state.exponent_sign * phase)
    return factor[..., None] * state.spinor.components


def lorentz_norm(u: DiracSpinor) -> float:
    """Real part of ``u^dagger gamma^0 u``; +1 / -1 for positive / negative branches."""
    value = u.components.conj() @ _GAMMA0 @ u.components
    return float(value.real)
