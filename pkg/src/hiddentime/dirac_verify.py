"""Gamma-matrix algebra and checks of the free Dirac field identities.

Every check here is built only from a :class:`GammaSet` and the
four-momentum carried by a spinor, so it is independent of how the
spinor components were produced.

Scalar identities are reported as real numbers.  The factor ``i`` that
``d/dx exp(i chi)`` brings down is absorbed by writing the phase as
``chi = E x0 - p.x`` and differentiating it directly; with that
bookkeeping the projected Dirac equation gives ``+m`` and the
free-particle identity gives ``m`` (instead of ``-i m``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import ConsistencyError
from .geometry import FourMomentum, TimeAngleCoord, angles_from_velocity, unit_time_vector
from .spinors import PAULI, PlaneWaveState, plane_wave_value

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

#: Largest allowed mismatch between time angles and the angles implied by a momentum.
CONSISTENCY_TOL = 1e-9

#: Below this step, finite differences are dominated by round-off.
MIN_FD_STEP = 1e-8


@dataclass(frozen=True, eq=False)
class GammaSet:
    """Four 4x4 matrices ``gamma^mu`` with metric diag(+1, -1, -1, -1)."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=complex)
        if g.shape != (4, 4, 4):
            raise ValueError(f"gamma set must have shape (4, 4, 4), got {g.shape}")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.gamma[mu]

    def slash(self, p) -> np.ndarray:
        """``gamma^mu p_mu`` for contravariant ``p = (p^0, p^1, p^2, p^3)``."""
        p_lower = METRIC @ np.asarray(p, dtype=float)
        return np.einsum("m,mij->ij", p_lower, self.gamma)

    def anticommutator(self, mu: int, nu: int) -> np.ndarray:
        a, b = self.gamma[mu], self.gamma[nu]
        return a @ b + b @ a

    def clifford_defect(self) -> float:
        """Largest entry-wise deviation from ``{g^mu, g^nu} = 2 eta^{mu nu} I``."""
        eye = np.eye(4)
        worst = 0.0
        for mu, nu in combinations_with_replacement(range(4), 2):
            diff = self.anticommutator(mu, nu) - 2.0 * METRIC[mu, nu] * eye
            worst = max(worst, float(np.max(np.abs(diff))))
        return worst

    def hermiticity_defect(self) -> float:
        """gamma^0 should be Hermitian and gamma^i anti-Hermitian."""
        g = self.gamma
        worst = float(np.max(np.abs(g[0] - g[0].conj().T)))
        for i in (1, 2, 3):
            worst = max(worst, float(np.max(np.abs(g[i] + g[i].conj().T))))
        return worst


def standard_gamma_set() -> GammaSet:
    """Dirac (sigma_z) representation built from Pauli blocks."""
    eye2 = np.eye(2, dtype=complex)
    zero = np.zeros((2, 2), dtype=complex)
    g = np.empty((4, 4, 4), dtype=complex)
    g[0] = np.block([[eye2, zero], [zero, -eye2]])
    for i in range(3):
        g[i + 1] = np.block([[zero, PAULI[i]], [-PAULI[i], zero]])
    return GammaSet(g)


def _phase_momentum(state: PlaneWaveState) -> np.ndarray:
    """Contravariant momentum read off the phase: ``i d_mu psi = ptilde_mu psi``."""
    return -state.exponent_sign * state.spinor.momentum.vector


def dirac_residual(state: PlaneWaveState, g: GammaSet, mass: float | None = None) -> float:
    """``|| (gamma^mu ptilde_mu - m) u ||_2`` with ``ptilde`` from the plane-wave phase.

    ``mass`` overrides the operator mass, e.g. to inject a deliberate
    violation.
    """
    m = state.spinor.mass if mass is None else mass
    op = g.slash(_phase_momentum(state)) - m * np.eye(4)
    return float(np.linalg.norm(op @ state.spinor.components))


def _bar(g: GammaSet, psi: np.ndarray) -> np.ndarray:
    return psi.conj() @ g[0]


def sandwich_identity(state: PlaneWaveState, g: GammaSet, x=None) -> complex:
    """``i psibar gamma^nu d_nu psi`` evaluated analytically at event ``x``.

    Equals ``+m`` for positive-energy branches and ``-m`` for
    negative-energy branches.
    """
    x = np.zeros(4) if x is None else np.asarray(x, dtype=float)
    psi = plane_wave_value(state, x)
    # d_mu psi = -i ptilde_mu psi
    dpsi = g.slash(_phase_momentum(state)) @ psi * (-1j)
    return complex(1j * (_bar(g, psi) @ dpsi))


def sandwich_identity_reduced(state: PlaneWaveState, g: GammaSet) -> complex:
    """Same identity written in ``(x0, x3, s)`` coordinates.

    The s axis is the radial direction of the transverse momentum in the
    x1-x2 plane, so ``d_1 + d_2`` collapses to one derivative ``d_s``
    paired with ``gamma^s = (p1 gamma^1 + p2 gamma^2) / p_s``.
    """
    p = state.spinor.momentum
    sign = -state.exponent_sign
    if p.p_s > 0.0:
        gamma_s = (p.p1 * g[1] + p.p2 * g[2]) / p.p_s
    else:
        gamma_s = g[1]
    slash = sign * (p.E * g[0] - p.p3 * g[3] - p.p_s * gamma_s)
    u = state.spinor.components
    return complex(_bar(g, u) @ slash @ u)


@dataclass(frozen=True)
class FiniteDifferenceResult:
    value: complex
    h: float
    precision_warning: bool


def finite_difference_sandwich(
    state: PlaneWaveState, g: GammaSet, h: float, x=None
) -> FiniteDifferenceResult:
    """Sandwich identity with second-order central differences of the plane wave."""
    if not (h > 0.0):
        raise ValueError(f"step must be positive, got {h!r}")
    x = np.zeros(4) if x is None else np.asarray(x, dtype=float)
    eye = np.eye(4)
    stencil = np.stack([x + h * eye, x - h * eye])  # (2, 4 axes, 4 coords)
    values = plane_wave_value(state, stencil)  # (2, 4 axes, 4 comps)
    dpsi = (values[0] - values[1]) / (2.0 * h)  # row mu = d_mu psi
    psi = plane_wave_value(state, x)
    value = 1j * (_bar(g, psi) @ np.einsum("mij,mj->i", g.gamma, dpsi))
    return FiniteDifferenceResult(complex(value), h, h < MIN_FD_STEP)


def empirical_order(errors, steps) -> np.ndarray:
    """Observed convergence orders between consecutive (step, error) pairs."""
    e = np.asarray(errors, dtype=float)
    hs = np.asarray(steps, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(hs[:-1] / hs[1:])


def _check_consistency(c: TimeAngleCoord, p: FourMomentum) -> None:
    expected = angles_from_velocity(p.velocity)
    mismatch = abs(c.t_theta - expected.t_theta)
    if not expected.indeterminate:
        dphi = abs(c.t_phi - expected.t_phi) % (2.0 * math.pi)
        mismatch = max(mismatch, min(dphi, 2.0 * math.pi - dphi))
    if mismatch > CONSISTENCY_TOL:
        raise ConsistencyError(
            f"time angles ({c.t_theta}, {c.t_phi}) inconsistent with momentum "
            f"(mismatch {mismatch:.3e})",
            mismatch,
        )


def _phase_gradient(p: FourMomentum) -> np.ndarray:
    """``(d0, d3, ds)`` of ``chi = E x0 - p3 x3 - p_s s``."""
    return np.array([p.E, -p.p3, -p.p_s])


def free_particle_identity(c: TimeAngleCoord, p: FourMomentum) -> float:
    """``cosh t_theta d0 chi + sinh t_theta cos t_phi d3 chi + sinh t_theta sin t_phi ds chi``.

    Returns ``m`` for a consistent (coordinate, momentum) pair.
    """
    _check_consistency(c, p)
    return float(unit_time_vector(c) @ _phase_gradient(p))


@dataclass(frozen=True)
class TimeField:
    """``Q = -grad chi`` in the ``(x0, x3, s)`` basis.

    The gradient components are covariant (lower-index) components, so
    the Minkowski contraction with a contravariant vector ``n`` is the
    plain pairing ``n^mu Q_mu``.
    """

    q0: float
    q3: float
    qs: float

    def as_array(self) -> np.ndarray:
        return np.array([self.q0, self.q3, self.qs])

    def contract(self, n) -> float:
        return float(np.asarray(n, dtype=float) @ self.as_array())


def time_field(c: TimeAngleCoord, p: FourMomentum) -> TimeField:
    _check_consistency(c, p)
    q = -_phase_gradient(p)
    return TimeField(float(q[0]), float(q[1]), float(q[2]))
