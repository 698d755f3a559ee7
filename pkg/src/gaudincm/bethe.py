"""Gaudin eigenvalue formulas, Bethe equations, and the root finder.

The boundary Bethe equations come in one family with a boundary weight
(2*xi/mu for the C/D tower, absent for B where a hidden site at z = 0
replaces it) and image terms mu +/- z.  The solver is damped Newton from
many seeds with canonicalization modulo the root symmetries: permutations
always, per-root sign flips for the boundary kinds.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoSolutionsFound, PoleCollision
from .lax import _canon, _canon_seq
from .model import SINGULAR_THRESHOLD, BetheState
from .scalars import scalar_div, to_complex

NEWTON_MAX_STEPS = 200
BACKTRACK_MAX = 40
DEDUP_RADIUS = 1e-8
ESCAPE_RADIUS_FACTOR = 1e6


class BetheSystemKind(enum.Enum):
    A_TWISTED = "A_twisted"
    BOUNDARY_C = "BoundaryC"  # covers C and D via xi
    BOUNDARY_B = "BoundaryB"

    @property
    def has_sign_symmetry(self) -> bool:
        return self is not BetheSystemKind.A_TWISTED


def _guard_distinct(z, mu):
    zs = [to_complex(x) for x in z]
    ms = [to_complex(x) for x in mu]
    for m in ms:
        for zz in zs:
            if m == zz or m == -zz:
                raise PoleCollision(f"Bethe root {m} collides with a marked point")


# ---------------------------------------------------------------------------
# eigenvalue formulas

def gaudin_eigs_A(z, mu, omega, hbar) -> list:
    """Twisted A-type spectrum: omega + site terms + root terms."""
    z, mu = _canon_seq(z), _canon_seq(mu)
    for m in mu:
        if any(to_complex(m) == to_complex(zz) for zz in z):
            raise PoleCollision("Bethe root collides with a marked point")
    omega, hbar = _canon(omega), _canon(hbar)
    out = []
    for i, zi in enumerate(z):
        h = omega
        for k, zk in enumerate(z):
            if k != i:
                h = h + scalar_div(hbar, zi - zk)
        for m in mu:
            h = h + scalar_div(hbar, m - zi)
        out.append(h)
    return out


def gaudin_eigs_boundary(z, mu, xi, hbar) -> list:
    """Boundary spectrum: hbar*(xi/z_i + image pair sums - root sums)."""
    z, mu = _canon_seq(z), _canon_seq(mu)
    _guard_distinct(z, mu)
    xi, hbar = _canon(xi), _canon(hbar)
    out = []
    for i, zi in enumerate(z):
        h = scalar_div(xi, zi)
        for k, zk in enumerate(z):
            if k != i:
                h = h + scalar_div(1, zi - zk) + scalar_div(1, zi + zk)
        for m in mu:
            h = h - scalar_div(1, zi - m) - scalar_div(1, zi + m)
        out.append(hbar * h)
    return out


def gaudin_eigs_B(z, mu, hbar) -> list:
    """B-type spectrum: the hidden site at zero contributes 2/z_i."""
    z, mu = _canon_seq(z), _canon_seq(mu)
    _guard_distinct(z, mu)
    hbar = _canon(hbar)
    out = []
    for i, zi in enumerate(z):
        h = scalar_div(2, zi)
        for k, zk in enumerate(z):
            if k != i:
                h = h + scalar_div(1, zi - zk) + scalar_div(1, zi + zk)
        for m in mu:
            h = h - scalar_div(1, zi - m) - scalar_div(1, zi + m)
        out.append(hbar * h)
    return out


def gaudin_eigs(kind: BetheSystemKind, z, mu, *, xi=0, omega=0, hbar=1) -> list:
    if kind is BetheSystemKind.A_TWISTED:
        return gaudin_eigs_A(z, mu, omega, hbar)
    if kind is BetheSystemKind.BOUNDARY_B:
        return gaudin_eigs_B(z, mu, hbar)
    return gaudin_eigs_boundary(z, mu, xi, hbar)


# ---------------------------------------------------------------------------
# residuals and Jacobians

def bethe_residual(kind: BetheSystemKind, z, mu, *, xi=0, omega=0, hbar=1) -> list:
    """LHS - RHS of the Bethe system, one component per root."""
    z, mu = _canon_seq(z), _canon_seq(mu)
    xi, omega, hbar = _canon(xi), _canon(omega), _canon(hbar)
    out = []
    for g, mg in enumerate(mu):
        if kind is BetheSystemKind.A_TWISTED:
            r = 2 * omega
            for zk in z:
                r = r + scalar_div(hbar, mg - zk)
            for c, mc in enumerate(mu):
                if c != g:
                    r = r - scalar_div(2 * hbar, mg - mc)
        else:
            if kind is BetheSystemKind.BOUNDARY_C:
                r = scalar_div(2 * xi, mg) - scalar_div(2, mg)
            else:
                r = 0
            for zk in z:
                r = r + scalar_div(1, mg - zk) + scalar_div(1, mg + zk)
            for c, mc in enumerate(mu):
                if c != g:
                    r = r - scalar_div(2, mg - mc) - scalar_div(2, mg + mc)
        out.append(r)
    return out


def bethe_jacobian(kind: BetheSystemKind, z, mu, *, xi=0, omega=0, hbar=1) -> list:
    """Closed-form d(residual_g)/d(mu_b); symmetric in all three kinds."""
    z, mu = _canon_seq(z), _canon_seq(mu)
    xi, hbar = _canon(xi), _canon(hbar)
    m = len(mu)
    jac = [[0] * m for _ in range(m)]
    for g, mg in enumerate(mu):
        if kind is BetheSystemKind.A_TWISTED:
            diag = 0
            for zk in z:
                diag = diag - scalar_div(hbar, (mg - zk) * (mg - zk))
            for c, mc in enumerate(mu):
                if c != g:
                    diag = diag + scalar_div(2 * hbar, (mg - mc) * (mg - mc))
                    jac[g][c] = -scalar_div(2 * hbar, (mg - mc) * (mg - mc))
        else:
            if kind is BetheSystemKind.BOUNDARY_C:
                diag = -scalar_div(2 * (xi - 1), mg * mg)
            else:
                diag = 0
            for zk in z:
                diag = diag - scalar_div(1, (mg - zk) * (mg - zk)) \
                            - scalar_div(1, (mg + zk) * (mg + zk))
            for c, mc in enumerate(mu):
                if c != g:
                    diag = diag + scalar_div(2, (mg - mc) * (mg - mc)) \
                                + scalar_div(2, (mg + mc) * (mg + mc))
                    jac[g][c] = -scalar_div(2, (mg - mc) * (mg - mc)) \
                                + scalar_div(2, (mg + mc) * (mg + mc))
        jac[g][g] = diag
    return jac


# ---------------------------------------------------------------------------
# solver

@dataclass(frozen=True)
class SolveReport:
    states: tuple
    attempts: int
    deduplication_radius: float

    @property
    def converged_states(self) -> list:
        return [s for s in self.states if s.converged]

    def regular_states(self) -> list:
        """Converged states safe for duality checks."""
        return [s for s in self.states if s.converged and not s.singular]

    def to_json(self) -> dict:
        return {
            "states": [s.to_json() for s in self.states],
            "attempts": self.attempts,
            "deduplication_radius": self.deduplication_radius,
        }


def canonicalize_roots(mu, kind: BetheSystemKind, tol_rel: float = 1e-9) -> tuple:
    """Fix the sign orbit (boundary kinds) and sort for deduplication.

    Real parts within tol_rel of zero are treated as zero so that numerical
    fuzz cannot split one sign orbit into two states.
    """
    vals = [complex(m) for m in mu]
    if kind.has_sign_symmetry:
        fixed = []
        for v in vals:
            t = tol_rel * max(1.0, abs(v))
            if v.real < -t or (abs(v.real) <= t and v.imag < 0):
                v = -v
            fixed.append(v)
        vals = fixed
    vals.sort(key=lambda v: (abs(v), v.real, v.imag))
    return tuple(vals)


def _residual_vec(kind, z, mu, xi, omega, hbar):
    # plain complex so zero denominators raise instead of warning
    pts = [complex(v) for v in mu]
    return np.array([to_complex(r) for r in
                     bethe_residual(kind, z, pts, xi=xi, omega=omega, hbar=hbar)])


def _newton(kind, z, mu0, xi, omega, hbar, tol, radius):
    """One damped Newton run; None on divergence.

    The residual decays to zero as mu -> infinity, so runs that wander
    past the escape radius are counted as divergent rather than being
    reported as (spurious) roots at infinity.
    """
    mu = np.array(mu0, dtype=complex)
    try:
        res = _residual_vec(kind, z, mu, xi, omega, hbar)
    except (ZeroDivisionError, PoleCollision):
        return None
    norm = np.linalg.norm(res)
    for _ in range(NEWTON_MAX_STEPS):
        if not np.isfinite(norm) or (len(mu) and np.abs(mu).max() > radius):
            return None
        if norm <= tol:
            jac = np.array([[to_complex(x) for x in row] for row in
                            bethe_jacobian(kind, z, [complex(v) for v in mu],
                                           xi=xi, omega=omega, hbar=hbar)])
            cond = float(np.linalg.cond(jac)) if len(mu) else 1.0
            return mu, norm, cond
        try:
            jac = np.array([[to_complex(x) for x in row] for row in
                            bethe_jacobian(kind, z, [complex(v) for v in mu],
                                           xi=xi, omega=omega, hbar=hbar)])
            step = np.linalg.solve(jac, -res)
        except (ZeroDivisionError, PoleCollision, np.linalg.LinAlgError):
            return None
        t = 1.0
        accepted = False
        for _ in range(BACKTRACK_MAX):
            trial = mu + t * step
            try:
                trial_res = _residual_vec(kind, z, trial, xi, omega, hbar)
                trial_norm = np.linalg.norm(trial_res)
            except (ZeroDivisionError, PoleCollision):
                trial_norm = math.inf
            if np.isfinite(trial_norm) and trial_norm < norm:
                mu, res, norm = trial, trial_res, trial_norm
                accepted = True
                break
            t *= 0.5
        if not accepted:
            return None
    return None


def _seed_points(kind, z, m, seed_count, rng_seed):
    zs = [to_complex(x) for x in z]
    mags = [abs(v) for v in zs if v] or [1.0]
    lo, hi = math.log(0.3 * min(mags)), math.log(3.0 * max(mags))
    seeds = []
    # deterministic seeds at midpoints of marked-point pairs
    mids = [(zs[i] + zs[j]) / 2 for i in range(len(zs))
            for j in range(i + 1, len(zs))]
    mids = [v for v in mids if abs(v) > 1e-9]
    if m == 1:
        seeds.extend([v] for v in mids)
    elif len(mids) >= m:
        seeds.append(mids[:m])
    streams = np.random.SeedSequence(rng_seed).spawn(seed_count)
    for ss in streams:
        rng = np.random.default_rng(ss)
        mu0 = []
        for _ in range(m):
            r = math.exp(rng.uniform(lo, hi))
            phase = rng.uniform(0.0, 2.0 * math.pi)
            mu0.append(r * complex(math.cos(phase), math.sin(phase)))
        seeds.append(mu0)
    return seeds


def solve_bethe(kind: BetheSystemKind, z, m: int, *, xi=0, omega=0, hbar=1,
                seed_count: int = 40, rng_seed: int = 0,
                tol: float | None = None) -> SolveReport:
    """Multistart damped Newton search for M Bethe roots.

    Solutions are deduplicated modulo permutations and (boundary kinds)
    per-root sign flips; inadmissible roots are surfaced with the singular
    flag rather than dropped.  Completeness is not asserted.
    """
    n = len(z)
    if not 0 <= m <= n // 2:
        raise ValueError(f"m must satisfy 0 <= M <= floor(N/2) = {n // 2}")
    zs = [to_complex(x) for x in z]
    if tol is None:
        mags = [abs(v) for v in zs if v] or [1.0]
        tol = 1e-12 * max(1.0, abs(to_complex(hbar)) / min(mags))
    if m == 0:
        state = BetheState(mu=(), residual_norm=0.0, converged=True, seed_id=-1,
                           singular=False, jacobian_cond=1.0)
        return SolveReport(states=(state,), attempts=0,
                           deduplication_radius=DEDUP_RADIUS)
    seeds = _seed_points(kind, z, m, seed_count, rng_seed)
    radius = ESCAPE_RADIUS_FACTOR * max(1.0, max(abs(v) for v in zs))
    found = {}
    diverged = 0
    for sid, mu0 in enumerate(seeds):
        got = _newton(kind, zs, mu0, xi, omega, hbar, tol, radius)
        if got is None:
            diverged += 1
            continue
        mu, norm, cond = got
        canon = canonicalize_roots(mu, kind)
        scale = max(1.0, max(abs(v) for v in canon))
        key_hit = None
        for key in found:
            if len(key) == len(canon) and \
               max(abs(a - b) for a, b in zip(key, canon)) <= DEDUP_RADIUS * scale:
                key_hit = key
                break
        if key_hit is None:
            singular = BetheState.flag_singular(canon, kind.has_sign_symmetry,
                                                SINGULAR_THRESHOLD)
            found[canon] = BetheState(mu=canon, residual_norm=float(norm),
                                      converged=True, seed_id=sid,
                                      singular=singular, jacobian_cond=cond)
    if not found:
        raise NoSolutionsFound(len(seeds), diverged)
    states = tuple(sorted(found.values(),
                          key=lambda s: [(abs(v), v.real, v.imag) for v in s.mu]))
    return SolveReport(states=states, attempts=len(seeds),
                       deduplication_radius=DEDUP_RADIUS)
