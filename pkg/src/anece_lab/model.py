"""Domain types shared by every part of the ANECE laboratory.

All types here are immutable value objects.  Configuration problems are
reported as lists of human-readable violation strings rather than raised,
so callers can collect and display them; malformed *values* (wrong types,
impossible grids) still raise ``ValueError`` at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class NetworkConfig:
    """An all-user ANECE scenario: M full-duplex users against one Eve.

    ``antennas[i]`` is the antenna count N_i of user i (each node uses the
    same number of antennas to transmit and receive).  ``k1`` and ``k2``
    are the slot counts of the pilot phase and the random-symbol phase.
    When ``k1`` is omitted it defaults to N_T - N_min, the shortest pilot
    length compatible with the collaborative-pilot rank requirements.
    Eve's noise variance is kept at 1; its value moves no DoF result.
    """

    antennas: tuple[int, ...]
    n_eve: int
    k1: int | None = None
    k2: int = 1
    eve_noise_var: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "antennas", tuple(int(n) for n in self.antennas))
        if self.k1 is None:
            object.__setattr__(self, "k1", self.n_total - self.n_min)

    @property
    def m(self) -> int:
        return len(self.antennas)

    @property
    def n_total(self) -> int:
        return sum(self.antennas)

    @property
    def n_min(self) -> int:
        return min(self.antennas) if self.antennas else 0


@dataclass(frozen=True)
class TwoUserModifiedConfig:
    """Two-user scenario where each node uses a square nonsingular pilot.

    Node 1 (n1 antennas, n1-slot pilot) and node 2 (n2 >= n1 antennas,
    n2-slot pilot) each transmit pilot-then-symbols over ``k_total`` slots
    of one coherence period.
    """

    n1: int
    n2: int
    k_total: int
    n_eve: int

    @property
    def n_total(self) -> int:
        return self.n1 + self.n2

    @property
    def delta_n(self) -> int:
        return self.n2 - self.n1


@dataclass(frozen=True)
class SnrGrid:
    """Ordered log2(sigma^2) evaluation points for slope estimation."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if len(pts) < 3:
            raise ValueError("SnrGrid needs at least 3 points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("SnrGrid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def sigma2(self) -> tuple[float, ...]:
        return tuple(2.0**p for p in self.points)


@dataclass(frozen=True)
class DofReport:
    """Analytic DoF values keyed by a stable formula identifier."""

    entries: dict[str, int]

    def __post_init__(self):
        for key, value in self.entries.items():
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"DoF entry {key!r} must be an integer, got {value!r}")


@dataclass(frozen=True)
class CheckResult:
    """One empirical-versus-analytic verification outcome.

    ``passed`` is derived, never supplied: it is true exactly when
    ``|measured - target| <= tolerance``.
    """

    name: str
    measured: float
    target: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = abs(self.measured - self.target) <= self.tolerance
        object.__setattr__(self, "passed", bool(ok))


def validate_config(cfg: NetworkConfig) -> list[str]:
    """Return every violated constraint of an all-user config; [] if valid."""
    violations = []
    if cfg.m < 2:
        violations.append("M < 2")
    for idx, n in enumerate(cfg.antennas):
        if n < 1:
            violations.append(f"antenna count must be >= 1 (user {idx + 1})")
    if cfg.n_eve < 0:
        violations.append("N_E < 0")
    if cfg.k2 < 0:
        violations.append("K_2 < 0")
    bound = cfg.n_total - cfg.n_min
    if cfg.k1 < bound:
        violations.append(f"K_1 < N_T-N_min (need >= {bound})")
    if cfg.eve_noise_var != 1.0:
        violations.append(f"eve_noise_var must be 1 (got {cfg.eve_noise_var})")
    return violations


def validate_modified_config(cfg: TwoUserModifiedConfig) -> list[str]:
    """Return every violated constraint of a modified two-user config."""
    violations = []
    if cfg.n1 < 1:
        violations.append("N_1 < 1")
    if cfg.n1 > cfg.n2:
        violations.append("N_1 > N_2")
    if cfg.k_total < cfg.n2:
        violations.append(f"K < N_2 (need >= {cfg.n2})")
    if cfg.n_eve < 0:
        violations.append("N_E < 0")
    return violations
