"""Kinematics on the time sphere.

A free particle with velocity ``v`` (units of c) is placed on the
time-sphere chart through its rapidity ``t_theta`` and a circular time
angle ``t_phi``.  The embedding space uses the coordinates ``(x0, x3, s)``
where ``s`` is the radial coordinate in the x1-x2 plane; the azimuth of
the velocity inside that plane never enters ``t_phi`` and is carried
separately as the phase of ``v1 + i v2``.

Natural units (c = 1) throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

#: Relative tolerance of the mass-shell invariant, scaled by max(1, m^2).
MASS_SHELL_TOL = 1e-12


def _wrap_angle(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    # fmod of values just below a multiple of 2pi can round up to 2pi
    if phi >= TWO_PI:
        phi = 0.0
    return phi


@dataclass(frozen=True)
class TimeAngleCoord:
    """A point in 3-dimensional time: clock radius, hyperbolic and circular angle."""

    t: float = 0.0
    t_theta: float = 0.0
    t_phi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0.0:
            raise DomainError(f"clock time must be finite and >= 0, got {self.t!r}")
        if not math.isfinite(self.t_theta) or self.t_theta < 0.0:
            raise DomainError(f"t_theta must be finite and >= 0, got {self.t_theta!r}")
        if not math.isfinite(self.t_phi):
            raise DomainError(f"t_phi must be finite, got {self.t_phi!r}")
        object.__setattr__(self, "t_phi", _wrap_angle(float(self.t_phi)))


@dataclass(frozen=True)
class Velocity3:
    v1: float
    v2: float
    v3: float

    def __post_init__(self):
        comps = (self.v1, self.v2, self.v3)
        if not all(math.isfinite(c) for c in comps):
            raise DomainError(f"velocity components must be finite, got {comps!r}")
        if self.speed >= 1.0:
            raise DomainError(f"speed must be < 1 (c = 1), got {self.speed!r}")

    @property
    def speed(self) -> float:
        return math.hypot(self.v1, self.v2, self.v3)

    @property
    def transverse(self) -> float:
        """Speed along the s axis, i.e. |v1 + i v2|."""
        return math.hypot(self.v1, self.v2)

    @property
    def azimuth(self) -> float:
        """Phase of v1 + i v2 in [0, 2pi)."""
        return _wrap_angle(math.atan2(self.v2, self.v1))

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3], dtype=float)


VelocityLike = Union[Velocity3, Sequence[float], np.ndarray]


def as_velocity(v: VelocityLike) -> Velocity3:
    if isinstance(v, Velocity3):
        return v
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise DomainError(f"velocity needs 3 components, got shape {arr.shape}")
    return Velocity3(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class FourMomentum:
    """On-shell four-momentum ``(E, p1, p2, p3)`` of a particle with rest mass ``m``.

    ``E`` is always stored positive; negative-energy solutions carry a
    branch tag on the spinor instead of a negative energy.
    """

    E: float
    p1: float
    p2: float
    p3: float
    m: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0.0):
            raise DomainError(f"rest mass must be > 0, got {self.m!r}")
        if self.E < self.m * (1.0 - 1e-12):
            raise DomainError(f"energy {self.E!r} below rest mass {self.m!r}")
        defect = self.E**2 - self.p1**2 - self.p2**2 - self.p3**2 - self.m**2
        if abs(defect) >= MASS_SHELL_TOL * max(1.0, self.m**2):
            raise DomainError(f"off mass shell by {defect:.3e}")

    @classmethod
    def from_velocity(cls, m: float, v: VelocityLike) -> "FourMomentum":
        """Relativistic momentum ``p = m v / sqrt(1 - v^2)``, ``E = m / sqrt(1 - v^2)``."""
        if not (math.isfinite(m) and m > 0.0):
            raise DomainError(f"rest mass must be > 0, got {m!r}")
        vel = as_velocity(v)
        u = vel.speed
        gamma = 1.0 / math.sqrt((1.0 - u) * (1.0 + u))
        return cls(m * gamma, m * gamma * vel.v1, m * gamma * vel.v2, m * gamma * vel.v3, m)

    @property
    def p(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3], dtype=float)

    @property
    def p_s(self) -> float:
        """Momentum along the s axis (radial in the x1-x2 plane)."""
        return math.hypot(self.p1, self.p2)

    @property
    def vector(self) -> np.ndarray:
        """Contravariant components ``(E, p1, p2, p3)``."""
        return np.array([self.E, self.p1, self.p2, self.p3], dtype=float)

    @property
    def velocity(self) -> Velocity3:
        return Velocity3(self.p1 / self.E, self.p2 / self.E, self.p3 / self.E)

    def isclose(self, other: "FourMomentum", tol: float = 1e-12) -> bool:
        scale = max(1.0, self.E, other.E)
        return bool(
            np.all(np.abs(self.vector - other.vector) <= tol * scale)
            and abs(self.m - other.m) <= tol * max(1.0, self.m)
        )


@dataclass(frozen=True)
class HyperbolicPoint:
    x0: float
    x3: float
    s: float


@dataclass(frozen=True)
class TimeAngles:
    """Result of :func:`angles_from_velocity`.

    ``indeterminate`` is set at zero velocity, where ``t_phi`` carries no
    information and is canonicalized to 0.
    """

    t_theta: float
    t_phi: float
    azimuth: float
    indeterminate: bool = False

    def coord(self, t: float = 0.0) -> TimeAngleCoord:
        return TimeAngleCoord(t, self.t_theta, self.t_phi)


def rapidity_from_speed(v: float) -> float:
    """Hyperbolic angle with ``cosh = 1/sqrt(1-v^2)`` and ``sinh = v/sqrt(1-v^2)``."""
    if not (0.0 <= v < 1.0):
        raise DomainError(f"speed must lie in [0, 1), got {v!r}")
    return math.atanh(v)


def compose_collinear(v: float, w: float) -> float:
    """Relativistic sum of two collinear speeds."""
    return (v + w) / (1.0 + v * w)


def angles_from_velocity(v: VelocityLike) -> TimeAngles:
    vel = as_velocity(v)
    u = vel.speed
    if u == 0.0:
        return TimeAngles(0.0, 0.0, 0.0, indeterminate=True)
    t_theta = rapidity_from_speed(u)
    # s is radial in the x1-x2 plane so sin(t_phi) >= 0 and t_phi lies in [0, pi]
    t_phi = math.atan2(vel.transverse, vel.v3)
    return TimeAngles(t_theta, t_phi, vel.azimuth)


def embed_point(c: TimeAngleCoord) -> HyperbolicPoint:
    """Place a time-angle coordinate on the radius-1/2 chart touching the origin."""
    ch, sh = math.cosh(c.t_theta), math.sinh(c.t_theta)
    return HyperbolicPoint(
        0.5 * (1.0 + ch),
        0.5 * sh * math.cos(c.t_phi),
        0.5 * sh * math.sin(c.t_phi),
    )


def reduced_coordinates(c: TimeAngleCoord) -> tuple[complex, complex]:
    """Two-component stereographic coordinates with the common factor dropped."""
    half = 0.5 * c.t_theta
    return complex(math.cosh(half)), math.sinh(half) * complex(math.cos(c.t_phi), math.sin(c.t_phi))


def hyperbolic_constraint_residual(z1: complex, z2: complex) -> float:
    """``|z1|^2 - |z2|^2 - 1``; zero on the constraint surface."""
    return abs(z1) ** 2 - abs(z2) ** 2 - 1.0


def unit_time_vector(c: TimeAngleCoord) -> np.ndarray:
    """Unit time vector in the ``(x0, x3, s)`` basis.

    Components are ``n . x0``, ``n . x3`` and ``n . s``.  The first carries
    ``cosh(t_theta)``; it is the x0 projection even though it is often
    printed as a second x3 projection.
    """
    ch, sh = math.cosh(c.t_theta), math.sinh(c.t_theta)
    return np.array([ch, sh * math.cos(c.t_phi), sh * math.sin(c.t_phi)])


def minkowski_norm(n: Sequence[float]) -> float:
    """``n0^2 - sum(n_i^2)`` for any number of spatial components."""
    n = np.asarray(n, dtype=float)
    return float(n[0] ** 2 - np.sum(n[1:] ** 2))
