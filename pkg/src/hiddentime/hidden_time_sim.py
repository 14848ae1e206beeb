"""Monte Carlo model of measurement with a hidden time angle.

The state of a particle is a set of labeled arcs on the time-angle
circle.  An apparatus meets the particle only at angles whose arc label
it is tuned to; the chance of that is the total arc length divided by
``2 pi``.  A hit collapses the state onto the measured arcs, which are
then re-inflated to cover the whole circle.  A miss leaves the state
untouched.

Sampling campaigns are split into fixed-size chunks, each with its own
stream spawned from the master seed.  Counts are integers, so the result
does not depend on how chunks are distributed over workers.
"""
from __future__ import annotations

import bisect
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import CollapseError, ConfigError, DomainError
from .geometry import TWO_PI, TimeAngleCoord

MISS = "MISS"
ARC_TOL = 1e-12
CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class Arc:
    start: float
    end: float
    label: Hashable
    payload: float | None = None

    @property
    def length(self) -> float:
        return self.end - self.start


class AngularDistribution:
    """Disjoint labeled arcs on ``[0, 2 pi)``.

    Arcs do not wrap through zero; split such an arc in two with the
    same label.
    """

    def __init__(self, arcs: Iterable[Arc]):
        arcs = sorted(arcs, key=lambda a: a.start)
        for a in arcs:
            if a.label == MISS:
                raise ConfigError(f"label {MISS!r} is reserved", "label")
            if not (math.isfinite(a.start) and math.isfinite(a.end)):
                raise ConfigError(f"arc {a.label!r} has non-finite bounds", "arcs")
            if a.start < -ARC_TOL or a.end > TWO_PI + ARC_TOL:
                raise ConfigError(f"arc {a.label!r} leaves [0, 2pi)", "arcs")
            if not a.length > 0.0:
                raise ConfigError(f"arc {a.label!r} has zero or negative length", "arcs")
        for prev, nxt in zip(arcs, arcs[1:]):
            if nxt.start < prev.end - ARC_TOL:
                raise ConfigError(f"arcs {prev.label!r} and {nxt.label!r} overlap", "arcs")
        self._arcs = tuple(arcs)
        self._start_list = [a.start for a in arcs]
        self._starts = np.array(self._start_list)
        self._ends = np.array([a.end for a in arcs])

    @property
    def arcs(self) -> tuple[Arc, ...]:
        return self._arcs

    @property
    def labels(self) -> list:
        """Distinct labels in order of first appearance around the circle."""
        return list(dict.fromkeys(a.label for a in self._arcs))

    def measure(self, label=None) -> float:
        """Total arc length, optionally restricted to one label."""
        return math.fsum(a.length for a in self._arcs if label is None or a.label == label)

    def probabilities(self) -> dict:
        """Probability of every label plus ``MISS``.

        ``sum(probabilities().values())`` is exactly 1.0: the miss
        probability is the float complement of the same left-to-right sum.
        """
        probs = {lab: outcome_probability(self, lab) for lab in self.labels}
        probs[MISS] = 1.0 - sum(probs.values())
        return probs

    def locate(self, angles) -> np.ndarray:
        """Arc index hit by each angle, -1 where no arc covers it."""
        angles = np.asarray(angles, dtype=float)
        idx = np.searchsorted(self._starts, angles, side="right") - 1
        hit = idx >= 0
        hit[hit] = angles[hit] < self._ends[idx[hit]]
        return np.where(hit, idx, -1)

    def label_at(self, angle: float):
        i = bisect.bisect_right(self._start_list, angle) - 1
        if i < 0 or angle >= self._arcs[i].end:
            return MISS
        return self._arcs[i].label

    def __eq__(self, other):
        return isinstance(other, AngularDistribution) and self._arcs == other._arcs

    def __repr__(self):
        return f"AngularDistribution({list(self._arcs)!r})"


def outcome_probability(d: AngularDistribution, label) -> float:
    """Total length of the arcs carrying ``label`` divided by ``2 pi``; 0 for unknown labels."""
    return d.measure(label) / TWO_PI


@dataclass(frozen=True)
class MeasurementRecord:
    outcome: Hashable
    angle_drawn: float
    posterior: AngularDistribution


def _generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def collapse(d: AngularDistribution, kept_labels: Iterable) -> AngularDistribution:
    """Destroy arcs outside ``kept_labels`` and re-inflate the rest to the full circle.

    Kept arcs are packed from angle 0 in their original order, each
    scaled by the same factor, so relative probabilities survive.
    """
    kept_labels = set(kept_labels)
    kept = [a for a in d.arcs if a.label in kept_labels]
    total = math.fsum(a.length for a in kept)
    if not total > 0.0:
        raise CollapseError(f"labels {sorted(map(str, kept_labels))} carry no measure")
    scale = TWO_PI / total
    out = []
    cursor = 0.0
    for i, a in enumerate(kept):
        end = TWO_PI if i == len(kept) - 1 else cursor + a.length * scale
        out.append(Arc(cursor, end, a.label, a.payload))
        cursor = end
    return AngularDistribution(out)


def sample_measurement(d: AngularDistribution, apparatus_labels: Iterable, rng_seed) -> MeasurementRecord:
    """Draw one uniform time angle and see whether the apparatus meets the particle there."""
    angle = float(_generator(rng_seed).uniform(0.0, TWO_PI))
    label = d.label_at(angle)
    if label != MISS and label in set(apparatus_labels):
        return MeasurementRecord(label, angle, collapse(d, {label}))
    return MeasurementRecord(MISS, angle, d)


def _chunk_counts(d: AngularDistribution, seq: np.random.SeedSequence, size: int) -> np.ndarray:
    angles = np.random.default_rng(seq).uniform(0.0, TWO_PI, size)
    idx = d.locate(angles)
    # slot len(arcs) collects misses
    idx = np.where(idx < 0, len(d.arcs), idx)
    return np.bincount(idx, minlength=len(d.arcs) + 1)


def empirical_counts(d: AngularDistribution, n: int, seed: int, partitions: int = 1) -> dict:
    """Per-label hit counts (plus ``MISS``) over ``n`` uniform draws."""
    if n < 1:
        raise DomainError(f"sample count must be >= 1, got {n}")
    if partitions < 1:
        raise DomainError(f"partition count must be >= 1, got {partitions}")
    n_chunks = -(-n // CHUNK_SIZE)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [CHUNK_SIZE] * (n_chunks - 1) + [n - CHUNK_SIZE * (n_chunks - 1)]
    jobs = list(zip(seqs, sizes))

    def run(block):
        acc = np.zeros(len(d.arcs) + 1, dtype=np.int64)
        for seq, size in block:
            acc += _chunk_counts(d, seq, size)
        return acc

    if partitions == 1:
        per_arc = run(jobs)
    else:
        blocks = [jobs[i::partitions] for i in range(partitions)]
        with ThreadPoolExecutor(max_workers=partitions) as pool:
            per_arc = sum(pool.map(run, blocks))

    counts = {lab: 0 for lab in d.labels}
    for arc, c in zip(d.arcs, per_arc[:-1]):
        counts[arc.label] += int(c)
    counts[MISS] = int(per_arc[-1])
    return counts


def empirical_frequencies(d: AngularDistribution, n: int, seed: int, partitions: int = 1) -> dict:
    counts = empirical_counts(d, n, seed, partitions)
    return {lab: c / n for lab, c in counts.items()}


def binomial_bound(p: float, n: int, sigmas: float = 4.0) -> float:
    return sigmas * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def within_bound(freq: float, p: float, n: int, sigmas: float = 4.0) -> bool:
    diff = abs(freq - p)
    return diff == 0.0 or diff < binomial_bound(p, n, sigmas)


# --- two-slit toy experiment -------------------------------------------------


@dataclass(frozen=True)
class TwoSlitConfig:
    """Slit arcs on the time circle plus a path map from angles to detector bins.

    ``paths`` are arcs labeled by detector bin; an angle inside an open
    slit lands in the bin of the path arc covering it.  Angles outside
    every open slit are blocked (``MISS``).
    """

    slits: tuple[Arc, ...]
    paths: tuple[Arc, ...]
    bins: tuple[str, ...]
    open_slits: frozenset | None = None

    def __post_init__(self):
        try:
            AngularDistribution(self.slits)
        except ConfigError as exc:
            raise ConfigError(str(exc).split(": ", 1)[-1], "slits") from None
        try:
            AngularDistribution(self.paths)
        except ConfigError as exc:
            raise ConfigError(str(exc).split(": ", 1)[-1], "paths") from None
        names = {a.label for a in self.slits}
        if self.open_slits is not None and not set(self.open_slits) <= names:
            raise ConfigError(f"unknown slits {sorted(set(self.open_slits) - names)}", "open_slits")
        if len(set(self.bins)) != len(self.bins) or MISS in self.bins:
            raise ConfigError("bin names must be distinct and not MISS", "bins")
        unknown = {a.label for a in self.paths} - set(self.bins)
        if unknown:
            raise ConfigError(f"paths lead to undeclared bins {sorted(unknown)}", "paths")
        for slit in self.slits:
            covered = math.fsum(
                max(0.0, min(slit.end, p.end) - max(slit.start, p.start)) for p in self.paths
            )
            if abs(covered - slit.length) > 1e-9:
                raise ConfigError(f"slit {slit.label!r} is not fully covered by path arcs", "paths")

    def with_open(self, names: Iterable[str] | None) -> "TwoSlitConfig":
        return TwoSlitConfig(self.slits, self.paths, self.bins, None if names is None else frozenset(names))

    def detector_distribution(self) -> AngularDistribution:
        """Angular distribution whose labels are detector bins."""
        arcs = []
        for slit in self.slits:
            if self.open_slits is not None and slit.label not in self.open_slits:
                continue
            for p in self.paths:
                lo, hi = max(slit.start, p.start), min(slit.end, p.end)
                if hi > lo:
                    arcs.append(Arc(lo, hi, p.label, p.payload))
        return AngularDistribution(arcs)


def default_two_slit() -> TwoSlitConfig:
    """Two mirrored slits of 120 degrees feeding five detector bins."""
    pi = math.pi
    slits = (
        Arc(pi / 6, 5 * pi / 6, "L"),
        Arc(7 * pi / 6, 11 * pi / 6, "R"),
    )
    paths = (
        Arc(pi / 6, pi / 3, "-2", -2.0),
        Arc(pi / 3, pi / 2, "-1", -1.0),
        Arc(pi / 2, 5 * pi / 6, "0", 0.0),
        Arc(7 * pi / 6, 3 * pi / 2, "0", 0.0),
        Arc(3 * pi / 2, 5 * pi / 3, "1", 1.0),
        Arc(5 * pi / 3, 11 * pi / 6, "2", 2.0),
    )
    return TwoSlitConfig(slits, paths, ("-2", "-1", "0", "1", "2"))


@dataclass(frozen=True)
class BinRow:
    bin: str
    analytic_p: float
    mc_freq: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class HistogramResult:
    bins: tuple[str, ...]
    analytic: dict
    counts: dict
    n: int

    @property
    def frequencies(self) -> dict:
        return {b: self.counts[b] / self.n for b in self.bins}

    def rows(self, sigmas: float = 4.0) -> list[BinRow]:
        out = []
        for b in self.bins:
            p, f = self.analytic[b], self.counts[b] / self.n
            out.append(BinRow(b, p, f, binomial_bound(p, self.n, sigmas), within_bound(f, p, self.n, sigmas)))
        return out

    def all_within(self, sigmas: float = 4.0) -> bool:
        return all(r.passed for r in self.rows(sigmas))


def histogram(d: AngularDistribution, bins: Sequence, n: int, seed: int, partitions: int = 1) -> HistogramResult:
    """Analytic bin probabilities and a Monte Carlo histogram; ``MISS`` is appended as a bin."""
    probs = d.probabilities()
    counts = empirical_counts(d, n, seed, partitions)
    all_bins = tuple(bins) + (MISS,)
    analytic = {b: probs.get(b, 0.0) for b in all_bins}
    return HistogramResult(all_bins, analytic, {b: counts.get(b, 0) for b in all_bins}, n)


def two_slit_experiment(config: TwoSlitConfig, n: int, seed: int, partitions: int = 1) -> HistogramResult:
    return histogram(config.detector_distribution(), config.bins, n, seed, partitions)


# --- the two extreme cases ----------------------------------------------------


class ExtremeMode(enum.Enum):
    POSITION_CONFINED = "PositionConfined"
    FIXED_MOMENTUM = "FixedMomentum"


@dataclass(frozen=True, eq=False)
class SpatialDescription:
    """Where each time angle sits after evolving for ``dt``."""

    angles: np.ndarray
    positions: np.ndarray

    @property
    def diameter(self) -> float:
        if len(self.positions) < 2:
            return 0.0
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return float(np.max(np.linalg.norm(diff, axis=-1)))


def planar_fibers(speed: float) -> Callable[[float], np.ndarray]:
    """Fiber map sending time angle ``phi`` to velocity ``speed (cos phi, sin phi, 0)``."""
    if not (0.0 <= speed < 1.0):
        raise DomainError(f"speed must lie in [0, 1), got {speed!r}")
    return lambda phi: speed * np.array([math.cos(phi), math.sin(phi), 0.0])


def evolve_extreme_cases(
    mode,
    dt: float,
    *,
    start=(0.0, 0.0, 0.0),
    fiber_velocity: Callable[[float], np.ndarray] | None = None,
    angles: Sequence[float] | None = None,
    n_fibers: int = 64,
    velocity=None,
    grid=None,
) -> SpatialDescription:
    """Evolve the position-confined or fixed-momentum limit for a time ``dt``.

    PositionConfined: every time angle starts at ``start`` and moves with
    its own fiber velocity, so the cloud spreads.  FixedMomentum: each
    site of ``grid`` holds exactly one time angle and all move with the
    same ``velocity``.
    """
    mode = ExtremeMode(mode)
    if not dt >= 0.0:
        raise DomainError(f"dt must be >= 0, got {dt!r}")
    if mode is ExtremeMode.POSITION_CONFINED:
        if fiber_velocity is None:
            raise DomainError("PositionConfined needs a fiber_velocity map")
        if angles is None:
            angles = TWO_PI * np.arange(n_fibers) / n_fibers
        angles = np.asarray(angles, dtype=float)
        vel = np.array([fiber_velocity(float(a)) for a in angles], dtype=float).reshape(len(angles), 3)
        if np.any(np.linalg.norm(vel, axis=1) >= 1.0):
            raise DomainError("fiber velocities must stay below c")
        positions = np.asarray(start, dtype=float) + vel * dt
        return SpatialDescription(angles, positions)
    if velocity is None or grid is None:
        raise DomainError("FixedMomentum needs a velocity and a spatial grid")
    v = np.asarray(velocity, dtype=float).reshape(3)
    if np.linalg.norm(v) >= 1.0:
        raise DomainError("velocity must stay below c")
    sites = np.asarray(grid, dtype=float).reshape(-1, 3)
    angles = TWO_PI * np.arange(len(sites)) / len(sites)
    return SpatialDescription(angles, sites + v * dt)


# --- mutual visibility --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HiddenParticle:
    position: np.ndarray
    time_angle: TimeAngleCoord
    clock_time: float = field(default=None)

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3)
        pos.setflags(write=False)
        object.__setattr__(self, "position", pos)
        if self.clock_time is None:
            object.__setattr__(self, "clock_time", self.time_angle.t)
        elif self.clock_time != self.time_angle.t:
            raise DomainError("clock_time must equal time_angle.t")


def _circular_gap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a - b) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def visible(a: HiddenParticle, b: HiddenParticle, tol: float = 1e-9) -> bool:
    """Two particles interact only if they share clock time, position and both time angles."""
    return bool(
        abs(a.clock_time - b.clock_time) <= tol
        and np.linalg.norm(a.position - b.position) <= tol
        and abs(a.time_angle.t_theta - b.time_angle.t_theta) <= tol
        and _circular_gap(np.array(a.time_angle.t_phi), np.array(b.time_angle.t_phi)) <= tol
    )


def condensate_check(particles: Sequence[HiddenParticle], tol: float = 1e-9) -> bool:
    """True when no two distinct particles can see each other."""
    n = len(particles)
    if n < 2:
        return True
    t = np.array([p.clock_time for p in particles])
    x = np.array([p.position for p in particles])
    th = np.array([p.time_angle.t_theta for p in particles])
    ph = np.array([p.time_angle.t_phi for p in particles])
    seen = (
        (np.abs(t[:, None] - t[None, :]) <= tol)
        & (np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1) <= tol)
        & (np.abs(th[:, None] - th[None, :]) <= tol)
        & (_circular_gap(ph[:, None], ph[None, :]) <= tol)
    )
    np.fill_diagonal(seen, False)
    return not bool(np.any(seen))
