"""Classical Calogero-Moser side: Lax pairs, Hamiltonians, and flows.

The A-type model is the N x N baseline; the three-coupling model covers
the B/C/D root systems with block Lax matrices of size 2N+1 (B keeps the
reflection row built from g1) or 2N (C/D drop it).  Couplings must sit on
the constraint surface, otherwise dL/dt = [L, M] fails and we refuse to
build the pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import SingularityApproached
from .linalg import (identity_matrix, mat_mul, mat_trace, sorted_eigenvalues,
                     zero_matrix)
from .model import Couplings, RootSystem, check_admissible, validate_couplings
from .scalars import exact_mode, scalar_div, to_complex

COLLISION_GUARD = 1e-6


def _canon(x):
    """Promote bare ints to Fractions so exact division stays exact."""
    if type(x) is int:
        return Fraction(x)
    return x


def _canon_seq(xs):
    return [_canon(x) for x in xs]


@dataclass(frozen=True)
class PhasePoint:
    q: tuple
    p: tuple

    def __post_init__(self):
        if len(self.q) != len(self.p):
            raise ValueError("q and p must have equal length")

    @property
    def n(self) -> int:
        return len(self.q)


def _check_q(q, kind: RootSystem):
    boundary = kind is not RootSystem.A
    check_admissible(q, non_opposite=boundary, nonzero=boundary,
                     label="coordinate")


# ---------------------------------------------------------------------------
# A-type

def build_lax_A(qdot, q, g):
    """N x N matrix: diagonal velocities, off-diagonal g/(q_i - q_j)."""
    _check_q(q, RootSystem.A)
    qdot, q, g = _canon_seq(qdot), _canon_seq(q), _canon(g)
    n = len(q)
    return [[qdot[i] if i == j else scalar_div(g, q[i] - q[j])
             for j in range(n)] for i in range(n)]


def build_m_A(q, g):
    """Companion matrix of the A-type pair; rows sum to zero."""
    _check_q(q, RootSystem.A)
    q, g = _canon_seq(q), _canon(g)
    n = len(q)
    out = zero_matrix(n)
    for i in range(n):
        for j in range(n):
            if i != j:
                w = scalar_div(g, (q[i] - q[j]) * (q[i] - q[j]))
                out[i][j] = -w
                out[i][i] = out[i][i] + w
    return out


# ---------------------------------------------------------------------------
# BCD blocks

def _sqrt2_for(c: Couplings):
    from .scalars import sqrt2_scalar
    return sqrt2_scalar(c.is_exact)


def _bcd_blocks(qdot, q, c: Couplings):
    n = len(q)
    s2 = _sqrt2_for(c)
    pa = [[qdot[i] if i == j else scalar_div(c.g2, q[i] - q[j])
           for j in range(n)] for i in range(n)]
    b = [[scalar_div(c.g4, 2 * q[i]) * s2 if i == j
          else scalar_div(c.g2, q[i] + q[j])
          for j in range(n)] for i in range(n)]
    col = [scalar_div(c.g1, q[i]) for i in range(n)]
    return pa, b, col


def _assemble_bcd(top_left, top_right, col, corner, kind: RootSystem):
    """Glue the three blocks into the full (2N+1) matrix, then trim for C/D."""
    n = len(top_left)
    full_size = 2 * n + 1
    out = zero_matrix(full_size)
    for i in range(n):
        for j in range(n):
            out[i][j] = top_left[i][j]
            out[i][n + j] = top_right[i][j]
            out[n + i][j] = -top_right[i][j]
            out[n + i][n + j] = -top_left[i][j]
        out[i][2 * n] = col[i]
        out[n + i][2 * n] = -col[i]
        out[2 * n][i] = -col[i]
        out[2 * n][n + i] = col[i]
    out[2 * n][2 * n] = corner
    if kind is RootSystem.B:
        return out
    return [row[:2 * n] for row in out[:2 * n]]


def build_lax_bcd(qdot, q, c: Couplings, kind: RootSystem):
    """Lax matrix for the three-coupling model; 2N+1 for B, 2N for C/D."""
    if kind is RootSystem.A:
        raise ValueError("use build_lax_A for the A-type model")
    validate_couplings(c)
    _check_q(q, kind)
    qdot, q = _canon_seq(qdot), _canon_seq(q)
    c = Couplings(_canon(c.g1), _canon(c.g2), _canon(c.g4), c.kind)
    if kind is not RootSystem.B and to_complex(c.g1):
        raise ValueError("C/D-type Lax matrices require g1 = 0")
    pa, b, col = _bcd_blocks(qdot, q, c)
    return _assemble_bcd(pa, b, col, 0, kind)


def build_m_bcd(q, c: Couplings, kind: RootSystem, zero_corner: bool = False):
    """Companion matrix: derivative blocks plus the diagonal d, d0 parts.

    Unlike the Lax matrix, the companion matrix is symmetric: both
    diagonal blocks carry +A_check + d, both off-diagonal blocks +B_check,
    and every reflection block is +C_check.  (Flipping any of these signs
    breaks dL/dt = [L, M]; the closure is pinned down exactly by the
    rational-arithmetic tests.)  For C/D the empty g1 row/column is
    dropped; for B the corner must keep d0, and zero_corner exists only to
    let tests demonstrate that the shifted convention fails there.
    """
    if kind is RootSystem.A:
        raise ValueError("use build_m_A for the A-type model")
    validate_couplings(c)
    _check_q(q, kind)
    q = _canon_seq(q)
    c = Couplings(_canon(c.g1), _canon(c.g2), _canon(c.g4), c.kind)
    if kind is not RootSystem.B and to_complex(c.g1):
        raise ValueError("C/D-type companion matrices require g1 = 0")
    n = len(q)
    s2 = _sqrt2_for(c)
    a_chk = [[0 if i == j else -scalar_div(c.g2, (q[i] - q[j]) * (q[i] - q[j]))
              for j in range(n)] for i in range(n)]
    b_chk = [[-scalar_div(c.g4, 4 * q[i] * q[i]) * s2 if i == j
              else -scalar_div(c.g2, (q[i] + q[j]) * (q[i] + q[j]))
              for j in range(n)] for i in range(n)]
    col = [-scalar_div(c.g1, q[i] * q[i]) for i in range(n)]
    d = []
    for a in range(n):
        da = scalar_div(c.g4, 4 * q[a] * q[a]) * s2
        if to_complex(c.g1):
            da = da + scalar_div(c.g1 * c.g1, c.g2) * scalar_div(1, q[a] * q[a])
        for b in range(n):
            if b != a:
                da = da + c.g2 * (scalar_div(1, (q[a] - q[b]) * (q[a] - q[b]))
                                  + scalar_div(1, (q[a] + q[b]) * (q[a] + q[b])))
        d.append(da)
    d0 = 0
    for a in range(n):
        d0 = d0 + 2 * c.g2 * scalar_div(1, q[a] * q[a])
    corner = 0 if (zero_corner or kind is not RootSystem.B) else d0
    size = 2 * n + 1
    out = zero_matrix(size)
    for i in range(n):
        for j in range(n):
            val = a_chk[i][j]
            out[i][j] = val
            out[n + i][n + j] = val
            out[i][n + j] = b_chk[i][j]
            out[n + i][j] = b_chk[i][j]
        out[i][i] = out[i][i] + d[i]
        out[n + i][n + i] = out[n + i][n + i] + d[i]
        out[i][2 * n] = col[i]
        out[n + i][2 * n] = col[i]
        out[2 * n][i] = col[i]
        out[2 * n][n + i] = col[i]
    out[2 * n][2 * n] = corner
    if kind is RootSystem.B:
        return out
    return [row[:2 * n] for row in out[:2 * n]]


# ---------------------------------------------------------------------------
# Hamiltonians and dynamics

def hamiltonian_A(pt: PhasePoint, g):
    _check_q(pt.q, RootSystem.A)
    q, p, g = _canon_seq(pt.q), _canon_seq(pt.p), _canon(g)
    h = 0
    for pi in p:
        h = h + scalar_div(pi * pi, 2)
    for i in range(len(q)):
        for j in range(i + 1, len(q)):
            h = h - scalar_div(g * g, (q[i] - q[j]) ** 2)
    return h


def hamiltonian_bcd(pt: PhasePoint, c: Couplings):
    """Three-coupling energy; equals tr(L^2)/4 at p = qdot."""
    if c.kind is RootSystem.A:
        return hamiltonian_A(pt, c.g2)
    _check_q(pt.q, RootSystem.C)
    q, p = _canon_seq(pt.q), _canon_seq(pt.p)
    g1, g2, g4 = _canon(c.g1), _canon(c.g2), _canon(c.g4)
    h = 0
    for pi in p:
        h = h + scalar_div(pi * pi, 2)
    n = len(q)
    for a in range(n):
        for b in range(a + 1, n):
            h = h - g2 * g2 * (scalar_div(1, (q[a] - q[b]) ** 2)
                               + scalar_div(1, (q[a] + q[b]) ** 2))
    for a in range(n):
        h = h - g4 * g4 * scalar_div(1, 4 * q[a] * q[a])
        h = h - g1 * g1 * scalar_div(1, q[a] * q[a])
    return h


def equations_of_motion(pt: PhasePoint, c: Couplings):
    """(qdot, pdot) with pdot = -grad H in closed form."""
    q, p = _canon_seq(pt.q), _canon_seq(pt.p)
    n = len(q)
    if c.kind is RootSystem.A:
        _check_q(q, RootSystem.A)
        g = _canon(c.g2)
        pdot = []
        for i in range(n):
            acc = 0
            for k in range(n):
                if k != i:
                    acc = acc - scalar_div(2 * g * g, (q[i] - q[k]) ** 3)
            pdot.append(acc)
        return list(p), pdot
    _check_q(q, RootSystem.C)
    g1, g2, g4 = _canon(c.g1), _canon(c.g2), _canon(c.g4)
    pdot = []
    for a in range(n):
        acc = -scalar_div(g4 * g4, 2 * q[a] ** 3) - scalar_div(2 * g1 * g1, q[a] ** 3)
        for b in range(n):
            if b != a:
                acc = acc - 2 * g2 * g2 * (scalar_div(1, (q[a] - q[b]) ** 3)
                                           + scalar_div(1, (q[a] + q[b]) ** 3))
        pdot.append(acc)
    return list(p), pdot


@dataclass(frozen=True)
class Trajectory:
    times: tuple
    points: tuple

    def to_csv(self, path) -> None:
        n = self.points[0].n if self.points else 0
        cols = ["t"] + [f"q_{i + 1}" for i in range(n)] + [f"p_{i + 1}" for i in range(n)]
        lines = [",".join(cols)]
        for t, pt in zip(self.times, self.points):
            row = [repr(t)]
            for v in list(pt.q) + list(pt.p):
                z = to_complex(v)
                row.append(repr(z.real) if z.imag == 0 else f"{z.real!r}+{z.imag!r}i")
            lines.append(",".join(row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _min_distance(q, kind: RootSystem) -> float:
    vals = [to_complex(x) for x in q]
    best = float("inf")
    boundary = kind is not RootSystem.A
    for i in range(len(vals)):
        if boundary:
            best = min(best, abs(vals[i]))
        for j in range(i + 1, len(vals)):
            best = min(best, abs(vals[i] - vals[j]))
            if boundary:
                best = min(best, abs(vals[i] + vals[j]))
    return best


def evolve(pt: PhasePoint, c: Couplings, dt: float, steps: int,
           record_every: int = 1) -> Trajectory:
    """Fixed-step RK4 over the closed-form equations of motion.

    Aborts with SingularityApproached when the coordinates come within
    COLLISION_GUARD of a collision or reflection locus.
    """
    kind = c.kind if c.kind is not None else RootSystem.C
    if exact_mode(*pt.q, *pt.p):
        pt = PhasePoint(tuple(float(Fraction(x)) for x in pt.q),
                        tuple(float(Fraction(x)) for x in pt.p))

    def rhs(q, p):
        qd, pd = equations_of_motion(PhasePoint(tuple(q), tuple(p)), c)
        return qd, pd

    q = list(pt.q)
    p = list(pt.p)
    times = [0.0]
    points = [PhasePoint(tuple(q), tuple(p))]
    n = len(q)
    for step in range(1, steps + 1):
        sep = _min_distance(q, kind)
        if sep < COLLISION_GUARD:
            raise SingularityApproached(
                f"minimum separation below {COLLISION_GUARD} at step {step - 1}")
        k1q, k1p = rhs(q, p)
        k2q, k2p = rhs([q[i] + dt / 2 * k1q[i] for i in range(n)],
                       [p[i] + dt / 2 * k1p[i] for i in range(n)])
        k3q, k3p = rhs([q[i] + dt / 2 * k2q[i] for i in range(n)],
                       [p[i] + dt / 2 * k2p[i] for i in range(n)])
        k4q, k4p = rhs([q[i] + dt * k3q[i] for i in range(n)],
                       [p[i] + dt * k3p[i] for i in range(n)])
        qn = [q[i] + dt / 6 * (k1q[i] + 2 * k2q[i] + 2 * k3q[i] + k4q[i])
              for i in range(n)]
        pn = [p[i] + dt / 6 * (k1p[i] + 2 * k2p[i] + 2 * k3p[i] + k4p[i])
              for i in range(n)]
        jump = max(abs(complex(a - b)) for a, b in zip(qn, q))
        if not all(complex(v) == complex(v) for v in qn + pn) or \
                jump > 0.25 * sep:
            # a step this large near a singular locus means the integrator
            # jumped across the core rather than resolving it
            raise SingularityApproached(
                f"step {step} moved {jump:.3g} against separation {sep:.3g}")
        q, p = qn, pn
        if step % record_every == 0 or step == steps:
            times.append(step * dt)
            points.append(PhasePoint(tuple(q), tuple(p)))
    if _min_distance(q, kind) < COLLISION_GUARD:
        raise SingularityApproached("final state below separation guard")
    return Trajectory(tuple(times), tuple(points))


def build_lax(pt: PhasePoint, c: Couplings, kind: RootSystem | None = None):
    """Lax matrix at a phase point with p in the velocity slot."""
    kind = kind or c.kind
    if kind is RootSystem.A:
        return build_lax_A(pt.p, pt.q, c.g2)
    return build_lax_bcd(pt.p, pt.q, c, kind)


def build_m(pt: PhasePoint, c: Couplings, kind: RootSystem | None = None,
            zero_corner: bool = False):
    kind = kind or c.kind
    if kind is RootSystem.A:
        return build_m_A(pt.q, c.g2)
    return build_m_bcd(pt.q, c, kind, zero_corner=zero_corner)


def spectrum(m) -> list:
    """Eigenvalues sorted by (magnitude, phase); float mode only."""
    return sorted_eigenvalues(m)


def integrals_of_motion(lax, kmax: int, kind: RootSystem = RootSystem.C) -> list:
    """tr(L^k)/(2k) for k = 1..kmax (1/k normalization for A-type)."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    out = []
    power = identity_matrix(len(lax))
    for k in range(1, kmax + 1):
        power = mat_mul(power, lax)
        denom = k if kind is RootSystem.A else 2 * k
        out.append(scalar_div(mat_trace(power), denom))
    return out
