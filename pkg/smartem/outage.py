"""
Smart Radio Connection (SRC) outage under random blockage.

An SRC is a UE served over a primary path (UE to gNB) and a reflected path
(UE to an assisting device to gNB). Nomadic obstacles are Poisson disks in
the ground plane; the user's body blocks a uniformly oriented angular sector
around the UE. A path is blocked when a disk touches any of its legs or when
it leaves the UE inside the body sector. The connection is in outage only
when both paths are blocked.

Every trial draws from its own generator, derived from the master seed and
the trial index, so estimates do not depend on how trials are scheduled.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from smartem.debug import log_stage
from smartem.errors import DomainError
from smartem.geometry import wrap_degrees
from smartem.simulate import worker_count

Outcome = Literal["both_up", "one_up", "outage"]

_CHUNK_TRIALS = 1000


class ObstacleModel(BaseModel):
    """Homogeneous Poisson disks with a fixed or uniform radius law."""

    density_per_m2: float = Field(default=0.01, ge=0)
    radius_law: Literal["fixed", "uniform"] = "fixed"
    radius_m: float = Field(default=0.3, gt=0)
    radius_max_m: Optional[float] = None

    @property
    def max_radius(self) -> float:
        if self.radius_law == "uniform":
            return self._upper()
        return self.radius_m

    def _upper(self) -> float:
        if self.radius_max_m is None or self.radius_max_m < self.radius_m:
            raise DomainError("uniform radius law needs radius_max_m >= radius_m")
        return self.radius_max_m

    def mean_radius(self) -> float:
        if self.radius_law == "uniform":
            return (self.radius_m + self._upper()) / 2.0
        return self.radius_m

    def mean_square_radius(self) -> float:
        if self.radius_law == "uniform":
            low, high = self.radius_m, self._upper()
            return (low * low + low * high + high * high) / 3.0
        return self.radius_m**2

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.radius_law == "uniform":
            return rng.uniform(self.radius_m, self._upper(), size=count)
        return np.full(count, self.radius_m)


class SrcGeometry(BaseModel):
    """UE at the origin, gNB and assisting device in the ground plane (meters)."""

    gnb: tuple[float, float]
    device: tuple[float, float]

    @classmethod
    def from_separation(
        cls,
        separation_deg: float,
        primary_length_m: float = 50.0,
        reflected_length_m: float = 20.0,
    ) -> "SrcGeometry":
        """
        Place the gNB on +x and the device ``separation_deg`` away, as seen
        from the UE.
        """
        if primary_length_m <= 0 or reflected_length_m <= 0:
            raise DomainError("path lengths must be positive")
        angle = math.radians(separation_deg)
        return cls(
            gnb=(primary_length_m, 0.0),
            device=(reflected_length_m * math.cos(angle), reflected_length_m * math.sin(angle)),
        )

    @property
    def separation_deg(self) -> float:
        primary = math.atan2(self.gnb[1], self.gnb[0])
        reflected = math.atan2(self.device[1], self.device[0])
        return abs(wrap_degrees(math.degrees(reflected - primary)))

    def primary_legs(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        return [((0.0, 0.0), self.gnb)]

    def reflected_legs(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        return [((0.0, 0.0), self.device), (self.device, self.gnb)]

    def bounds(self, margin: float) -> tuple[np.ndarray, np.ndarray]:
        points = np.array([(0.0, 0.0), self.gnb, self.device])
        return points.min(axis=0) - margin, points.max(axis=0) + margin


class SrcTrial(BaseModel):
    """One random draw and its outcome."""

    trial: int
    obstacle_centers: list[tuple[float, float]]
    obstacle_radii: list[float]
    sector_start_deg: float
    sector_width_deg: float
    primary_blocked: bool
    reflected_blocked: bool

    @property
    def outcome(self) -> Outcome:
        if self.primary_blocked and self.reflected_blocked:
            return "outage"
        if self.primary_blocked or self.reflected_blocked:
            return "one_up"
        return "both_up"


class SrcEstimate(BaseModel):
    """Monte Carlo outage estimate with a 95% Wilson interval."""

    separation_deg: float
    trials: int
    outages: int
    outage_probability: float
    ci_low: float
    ci_high: float
    primary_blocked_fraction: float
    reflected_blocked_fraction: float


class LengthRow(BaseModel):
    length_m: float
    outage_probability: float
    ci_low: float
    ci_high: float
    analytic: float


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise DomainError("need at least one trial")
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    p = successes / trials
    denominator = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denominator
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denominator
    return max(0.0, center - half), min(1.0, center + half)


def segment_blocking_probability(length_m: float, obstacles: ObstacleModel) -> float:
    """Chance that at least one Poisson disk touches a segment: 1 − exp(−ρ(2r̄L + πE[r²]))."""
    if length_m < 0:
        raise DomainError("length must be non-negative")
    area = 2.0 * obstacles.mean_radius() * length_m + math.pi * obstacles.mean_square_radius()
    return 1.0 - math.exp(-obstacles.density_per_m2 * area)


def self_blockage_probability(separation_deg: float, width_deg: float) -> float:
    """Chance a uniformly oriented sector of ``width_deg`` covers both departures."""
    gap = min(abs(separation_deg) % 360.0, 360.0 - abs(separation_deg) % 360.0)
    return max(0.0, width_deg - gap) / 360.0


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _leg_hit(
    start: tuple[float, float], end: tuple[float, float], centers: np.ndarray, radii: np.ndarray
) -> bool:
    if radii.size == 0:
        return False
    a = np.asarray(start)
    ab = np.asarray(end) - a
    length_sq = float(ab @ ab)
    if length_sq == 0.0:
        t = np.zeros(len(centers))
    else:
        t = np.clip((centers - a) @ ab / length_sq, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return bool(np.any(np.hypot(*(centers - closest).T) <= radii))


def _in_sector(azimuth_deg: float, start_deg: float, width_deg: float) -> bool:
    return (azimuth_deg - start_deg) % 360.0 < width_deg


def _draw(
    rng: np.random.Generator,
    low: np.ndarray,
    high: np.ndarray,
    obstacles: ObstacleModel,
) -> tuple[np.ndarray, np.ndarray, float]:
    area = float(np.prod(high - low))
    count = int(rng.poisson(obstacles.density_per_m2 * area))
    centers = rng.uniform(low, high, size=(count, 2))
    radii = obstacles.sample(rng, count)
    sector_start = float(rng.uniform(0.0, 360.0))
    return centers, radii, sector_start


def run_trial(
    geometry: SrcGeometry,
    obstacles: ObstacleModel,
    self_blockage_width_deg: float,
    seed: int,
    trial: int,
) -> SrcTrial:
    """Draw trial number ``trial`` of the stream seeded by ``seed``."""
    rng = _trial_rng(seed, trial)
    low, high = geometry.bounds(obstacles.max_radius)
    centers, radii, sector_start = _draw(rng, low, high, obstacles)

    def _blocked(legs, departure_deg: float) -> bool:
        if _in_sector(departure_deg, sector_start, self_blockage_width_deg):
            return True
        return any(_leg_hit(a, b, centers, radii) for a, b in legs)

    return SrcTrial(
        trial=trial,
        obstacle_centers=[tuple(c) for c in centers.tolist()],
        obstacle_radii=radii.tolist(),
        sector_start_deg=sector_start,
        sector_width_deg=self_blockage_width_deg,
        primary_blocked=_blocked(
            geometry.primary_legs(), math.degrees(math.atan2(geometry.gnb[1], geometry.gnb[0]))
        ),
        reflected_blocked=_blocked(
            geometry.reflected_legs(),
            math.degrees(math.atan2(geometry.device[1], geometry.device[0])),
        ),
    )


def _check_trials(n_trials: int) -> None:
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")


def src_outage_probability(
    geometry: SrcGeometry,
    obstacles: ObstacleModel,
    self_blockage_width_deg: float,
    n_trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> SrcEstimate:
    """
    Monte Carlo outage probability of one SRC geometry.

    Args:
        geometry: Primary and reflected path layout.
        obstacles: Obstacle process.
        self_blockage_width_deg: Body sector width at the UE.
        n_trials: Number of independent draws, >= 1.
        seed: Master seed.
        workers: Thread count, see ``smartem.simulate.worker_count``.
    """
    _check_trials(n_trials)
    if not 0.0 <= self_blockage_width_deg <= 360.0:
        raise DomainError("self-blockage width must lie in [0, 360] degrees")

    def _chunk(start: int) -> list[SrcTrial]:
        stop = min(n_trials, start + _CHUNK_TRIALS)
        return [
            run_trial(geometry, obstacles, self_blockage_width_deg, seed, t)
            for t in range(start, stop)
        ]

    with ThreadPoolExecutor(max_workers=worker_count(workers)) as executor:
        trials = [
            trial
            for chunk in executor.map(_chunk, range(0, n_trials, _CHUNK_TRIALS))
            for trial in chunk
        ]

    outages = sum(1 for t in trials if t.outcome == "outage")
    low, high = wilson_interval(outages, n_trials)
    return SrcEstimate(
        separation_deg=geometry.separation_deg,
        trials=n_trials,
        outages=outages,
        outage_probability=outages / n_trials,
        ci_low=low,
        ci_high=high,
        primary_blocked_fraction=sum(t.primary_blocked for t in trials) / n_trials,
        reflected_blocked_fraction=sum(t.reflected_blocked for t in trials) / n_trials,
    )


def outage_vs_separation(
    separations_deg: Sequence[float],
    obstacles: ObstacleModel,
    self_blockage_width_deg: float,
    n_trials: int,
    seed: int,
    primary_length_m: float = 50.0,
    reflected_length_m: float = 20.0,
    workers: Optional[int] = None,
) -> list[SrcEstimate]:
    """Outage estimates for each angular separation, in the given order."""
    log_stage("src", separations=len(separations_deg), trials=n_trials, seed=seed)
    return [
        src_outage_probability(
            SrcGeometry.from_separation(s, primary_length_m, reflected_length_m),
            obstacles,
            self_blockage_width_deg,
            n_trials,
            seed,
            workers,
        )
        for s in separations_deg
    ]


def link_length_sensitivity(
    lengths_m: Sequence[float],
    obstacles: ObstacleModel,
    self_blockage_width_deg: float,
    n_trials: int,
    seed: int,
) -> list[LengthRow]:
    """
    Blocking probability of a single link versus its length.

    All lengths share the same draws: obstacles are generated once per trial
    around the longest link and every shorter link is a prefix of it, so the
    table is non-decreasing in length.

    Returns:
        Rows sorted by length with the Poisson closed form alongside.
    """
    _check_trials(n_trials)
    ordered = sorted(float(length) for length in lengths_m)
    if not ordered or ordered[0] <= 0:
        raise DomainError("lengths must be positive")

    longest = ordered[-1]
    margin = obstacles.max_radius
    low = np.array([-margin, -margin])
    high = np.array([longest + margin, margin])
    blocked = np.zeros(len(ordered), dtype=int)

    for trial in range(n_trials):
        centers, radii, sector_start = _draw(_trial_rng(seed, trial), low, high, obstacles)
        body = _in_sector(0.0, sector_start, self_blockage_width_deg)
        for i, length in enumerate(ordered):
            if body or _leg_hit((0.0, 0.0), (length, 0.0), centers, radii):
                blocked[i] += 1

    rows = []
    keep = 1.0 - self_blockage_width_deg / 360.0
    for length, count in zip(ordered, blocked):
        ci_low, ci_high = wilson_interval(int(count), n_trials)
        rows.append(
            LengthRow(
                length_m=length,
                outage_probability=count / n_trials,
                ci_low=ci_low,
                ci_high=ci_high,
                analytic=1.0 - keep * (1.0 - segment_blocking_probability(length, obstacles)),
            )
        )
    return rows
