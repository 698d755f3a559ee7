"""Factorized form of the special-velocity Lax matrices.

At the distinguished velocity substitution the C/D and B Lax matrices are
conjugate to fixed strictly-triangular combinations of two nilpotent
matrices, which is why their characteristic polynomials collapse to pure
powers of lambda.  Everything here is generic over the scalar mode; the
rational path certifies the factorization exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lax import _canon, _canon_seq, build_lax_bcd
from .linalg import (char_poly, mat_is_zero, mat_max_abs, mat_mul, mat_sub,
                     solve, zero_matrix)
from .model import RootSystem, check_admissible, preset_couplings
from .scalars import exact_mode, scalar_div, sqrt2_scalar


@dataclass(frozen=True)
class FactorizationKit:
    """Diagonal gauge D0, node matrix V, and the two nilpotent generators."""

    D0: list
    V: list
    C0: list
    Ctilde: list

    @property
    def size(self) -> int:
        return len(self.V)

    def d0_diagonal(self) -> list:
        return [self.D0[i][i] for i in range(self.size)]


def nilpotent_generators(size: int):
    """C0 with (i, i+1) entry i, and Ctilde marking even columns."""
    c0 = zero_matrix(size)
    ct = zero_matrix(size)
    for i in range(size - 1):
        j = i + 1
        c0[i][j] = j  # j-1 in 1-based indexing
        if (j + 1) % 2 == 0:
            ct[i][j] = 1
    return c0, ct


def build_kit(q, kind: RootSystem) -> FactorizationKit:
    """Gauge data for the factorized Lax matrix at nodes (q, -q[, 0])."""
    if kind not in (RootSystem.B, RootSystem.C, RootSystem.D):
        raise ValueError("factorization kits exist for B/C/D kinds only")
    check_admissible(q, non_opposite=True, nonzero=True, label="coordinate")
    q = _canon_seq(q)
    n = len(q)
    exact = exact_mode(*q)
    s2 = sqrt2_scalar(exact)
    size = 2 * n + 1 if kind is RootSystem.B else 2 * n

    def pair_product(i):
        prod = 1
        for k in range(n):
            if k != i:
                prod = prod * (q[i] - q[k]) * (q[i] + q[k])
        return prod

    d0 = zero_matrix(size)
    v = zero_matrix(size)
    for i in range(n):
        if kind is RootSystem.B:
            d0[i][i] = s2 * q[i] * q[i] * pair_product(i)
            d0[n + i][n + i] = s2 * q[i] * q[i] * pair_product(i)
        else:
            d0[i][i] = 2 * q[i] * pair_product(i)
            d0[n + i][n + i] = -2 * q[i] * pair_product(i)
        for j in range(size):
            v[i][j] = q[i] ** j
            v[n + i][j] = (-q[i]) ** j
    if kind is RootSystem.B:
        corner = 1
        for k in range(n):
            corner = corner * (-q[k] * q[k])
        d0[2 * n][2 * n] = corner
        v[2 * n][0] = 1
    c0, ct = nilpotent_generators(size)
    return FactorizationKit(D0=d0, V=v, C0=c0, Ctilde=ct)


def special_velocities(q, kind: RootSystem, xi=0, hbar=1) -> list:
    """Velocities at which the Lax matrix factorizes.

    C/D: xi*hbar/q_i plus the pairwise image sums; B replaces the boundary
    term by 2*hbar/q_i.
    """
    check_admissible(q, non_opposite=True, nonzero=True, label="coordinate")
    q, xi, hbar = _canon_seq(q), _canon(xi), _canon(hbar)
    n = len(q)
    out = []
    for i in range(n):
        if kind is RootSystem.B:
            v = scalar_div(2 * hbar, q[i])
        else:
            v = scalar_div(xi * hbar, q[i])
        for k in range(n):
            if k != i:
                v = v + scalar_div(hbar, q[i] - q[k]) + scalar_div(hbar, q[i] + q[k])
        out.append(v)
    return out


def nilpotent_combination(kit: FactorizationKit, kind: RootSystem, xi=0):
    """C0 - (1 - 2*xi)*Ctilde for C/D (D is xi = 0); C0 + Ctilde for B."""
    xi = _canon(xi)
    if kind is RootSystem.B:
        factor = 1
    else:
        factor = -(1 - 2 * xi)
    return [[x + factor * y for x, y in zip(rx, ry)]
            for rx, ry in zip(kit.C0, kit.Ctilde)]


def factorized_lax(q, kind: RootSystem, xi=0, hbar=1):
    """hbar * D0^-1 V (nilpotent combination) V^-1 D0."""
    kit = build_kit(q, kind)
    hbar = _canon(hbar)
    x = nilpotent_combination(kit, kind, xi)
    # S solves S V = V X  (so S = V X V^-1) without forming V^-1
    vx = mat_mul(kit.V, x)
    st = solve([list(r) for r in zip(*kit.V)], [list(r) for r in zip(*vx)])
    s = [list(r) for r in zip(*st)]
    d = kit.d0_diagonal()
    size = kit.size
    return [[hbar * scalar_div(d[j], d[i]) * s[i][j] for j in range(size)]
            for i in range(size)]


def factorization_residual(q, kind: RootSystem, xi=0, hbar=1):
    """Max entry deviation between the direct and factorized Lax matrices.

    Returns exact 0 in rational mode when the identity holds.
    """
    if kind is RootSystem.D and _canon(xi) != 0:
        raise ValueError("D-type factorization requires xi = 0")
    c = preset_couplings(kind, hbar, xi)
    lhs = build_lax_bcd(special_velocities(q, kind, xi, hbar), q, c, kind)
    rhs = factorized_lax(q, kind, xi, hbar)
    diff = mat_sub(lhs, rhs)
    if exact_mode(hbar, xi, *q) and mat_is_zero(diff):
        return 0
    return mat_max_abs(diff)


def factorized_char_poly(q, kind: RootSystem, xi=0, hbar=1) -> list:
    """Characteristic polynomial of the factorized product (exact in
    rational mode); nilpotency makes it (-lam)^size."""
    return char_poly(factorized_lax(q, kind, xi, hbar))
