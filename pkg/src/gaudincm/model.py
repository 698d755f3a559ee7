"""Model configuration: root systems, coupling presets, admissibility.

A spin-chain side configuration lives in ModelSpec; the classical side
consumes Couplings triples (g1, g2, g4).  The Lax representation used here
only exists on the constraint surface g1*(g1^2 - 2*g2^2 + sqrt2*g2*g4) = 0,
which every preset satisfies by construction.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import CoincidingCoordinates, ConstraintViolated, ZeroCoordinate
from .scalars import (exact_mode, magnitude, scalar_eq, sqrt2_scalar,
                      to_complex)

COUPLING_TOL = 1e-12
FLOAT_REL_TOL = 1e-10


class RootSystem(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    def lax_size(self, n: int) -> int:
        if self is RootSystem.A:
            return n
        if self is RootSystem.B:
            return 2 * n + 1
        return 2 * n

    @property
    def is_boundary(self) -> bool:
        return self is not RootSystem.A


@dataclass(frozen=True)
class Couplings:
    g1: object
    g2: object
    g4: object
    kind: RootSystem | None = None

    def constraint_residual(self):
        s2 = sqrt2_scalar(exact_mode(self.g1, self.g2, self.g4))
        return self.g1 * (self.g1 * self.g1 - 2 * self.g2 * self.g2
                          + s2 * self.g2 * self.g4)

    @property
    def is_exact(self) -> bool:
        return exact_mode(self.g1, self.g2, self.g4)


def preset_couplings(root_system: RootSystem, hbar, xi=0) -> Couplings:
    """Coupling triple that makes the Lax pair close for the given kind.

    B: (sqrt2*hbar, hbar, 0); C: (0, hbar, sqrt2*hbar*xi); D: (0, hbar, 0).
    The A-type single coupling g = hbar rides in the g2 slot.
    """
    if not to_complex(hbar):
        raise ValueError("hbar must be nonzero")
    s2 = sqrt2_scalar(exact_mode(hbar, xi))
    zero = 0
    if root_system is RootSystem.B:
        return Couplings(s2 * hbar, hbar, zero, RootSystem.B)
    if root_system is RootSystem.C:
        return Couplings(zero, hbar, s2 * hbar * xi, RootSystem.C)
    if root_system is RootSystem.D:
        return Couplings(zero, hbar, zero, RootSystem.D)
    return Couplings(zero, hbar, zero, RootSystem.A)


def validate_couplings(c: Couplings) -> None:
    """Raise ConstraintViolated unless the Lax constraint holds."""
    if c.kind is RootSystem.A:
        return
    res = c.constraint_residual()
    if c.is_exact:
        if res != 0:
            raise ConstraintViolated(res)
        return
    scale = max(1.0, max(magnitude(g) for g in (c.g1, c.g2, c.g4)) ** 3)
    if magnitude(res) > COUPLING_TOL * scale:
        raise ConstraintViolated(res)


def check_admissible(values, *, non_opposite: bool, nonzero: bool,
                     label: str = "coordinate") -> None:
    """Pairwise-distinct (optionally non-opposite, nonzero) guard."""
    vals = list(values)
    if nonzero:
        for v in vals:
            if not to_complex(v):
                raise ZeroCoordinate(f"{label} at zero")
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if scalar_eq(vals[i], vals[j]):
                raise CoincidingCoordinates(
                    f"{label}s {i + 1} and {j + 1} coincide")
            if non_opposite and scalar_eq(vals[i], -vals[j]):
                raise CoincidingCoordinates(
                    f"{label}s {i + 1} and {j + 1} are opposite")


@dataclass(frozen=True)
class ModelSpec:
    """One verification scenario: kind, sizes, marked points, parameters."""

    root_system: RootSystem
    n_sites: int
    magnons: int
    z: tuple
    xi: object = 0
    hbar: object = 1
    omega: object = 0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if not 0 <= self.magnons <= self.n_sites // 2:
            raise ValueError(
                f"magnons must satisfy 0 <= M <= floor(N/2) = {self.n_sites // 2}")
        if len(self.z) != self.n_sites:
            raise ValueError("z must have n_sites entries")
        non_opp = self.root_system.is_boundary
        check_admissible(self.z, non_opposite=non_opp, nonzero=non_opp,
                         label="marked point")
        if self.root_system in (RootSystem.B, RootSystem.D) and to_complex(self.xi):
            raise ValueError(f"{self.root_system.value}-type fixes xi = 0")

    @property
    def is_exact(self) -> bool:
        return exact_mode(self.xi, self.hbar, self.omega, *self.z)

    def to_json(self) -> dict:
        def pair(x):
            z = to_complex(x)
            return [z.real, z.imag]

        return {
            "root_system": self.root_system.value,
            "n": self.n_sites,
            "m": self.magnons,
            "z": [pair(v) for v in self.z],
            "xi": pair(self.xi),
            "hbar": pair(self.hbar),
            "omega": pair(self.omega),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModelSpec":
        def scal(v):
            re, im = v
            return complex(re, im) if im else re

        return cls(
            root_system=RootSystem(data["root_system"]),
            n_sites=data["n"],
            magnons=data["m"],
            z=tuple(scal(v) for v in data["z"]),
            xi=scal(data["xi"]),
            hbar=scal(data["hbar"]),
            omega=scal(data.get("omega", [0, 0])),
        )


SINGULAR_THRESHOLD = 1e-8


def _min_separation(mu, signed: bool) -> float:
    vals = [to_complex(m) for m in mu]
    best = math.inf
    for i in range(len(vals)):
        if signed:
            best = min(best, abs(vals[i]))
        for j in range(i + 1, len(vals)):
            best = min(best, abs(vals[i] - vals[j]))
            if signed:
                best = min(best, abs(vals[i] + vals[j]))
    return best


@dataclass(frozen=True)
class BetheState:
    """One candidate solution of the Bethe equations."""

    mu: tuple
    residual_norm: float
    converged: bool
    seed_id: int
    singular: bool = False
    jacobian_cond: float = float("nan")

    @staticmethod
    def flag_singular(mu, boundary: bool,
                      threshold: float = SINGULAR_THRESHOLD) -> bool:
        """Roots at zero or in (anti)coinciding pairs break the dual matrices."""
        if not mu:
            return False
        return _min_separation(mu, signed=boundary) < threshold

    def to_json(self) -> dict:
        return {
            "mu": [[to_complex(m).real, to_complex(m).imag] for m in self.mu],
            "residual": self.residual_norm,
            "converged": self.converged,
            "singular": self.singular,
            "seed_id": self.seed_id,
            "jacobian_cond": self.jacobian_cond,
        }
