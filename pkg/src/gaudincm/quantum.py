"""Finite-dimensional spin-chain realization and the diagonalization oracle.

Operators act on (C^2)^(x)n as dense matrices (site 1 is the most
significant bit, bit value 1 = spin down).  Permutations and the dressed
permutations sigma3.P.sigma3 are signed basis permutations, so every
operator here is exact for exact inputs; the float path just converts at
the end.  The double-row transfer matrix carries an auxiliary leg 0 in
front, removed by a partial trace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCombination, PoleCollision
from .lax import _canon, _canon_seq
from .linalg import (as_complex_array, identity_matrix, mat_is_zero, mat_mul,
                     mat_max_abs, mat_scale, mat_sub, zero_matrix)
from .model import check_admissible
from .scalars import EpsSeries, exact_mode, scalar_div, to_complex

HARD_SITE_CAP = 12


def _site_bit(x: int, i: int, n: int) -> int:
    return (x >> (n - i)) & 1


def _check_sites(n: int, *sites):
    if n > HARD_SITE_CAP:
        raise ValueError(f"site count {n} exceeds the dense-operator cap")
    for s in sites:
        if not 1 <= s <= n:
            raise IndexError(f"site {s} out of range 1..{n}")


def pair_permutation(i: int, k: int, n: int, dressed: bool = False):
    """P_ik, or sigma3^(i) P_ik sigma3^(i) when dressed.

    Both are signed basis permutations: the dressed version flips the sign
    exactly on anti-aligned pairs.
    """
    _check_sites(n, i, k)
    if i == k:
        raise IndexError("permutation needs two distinct sites")
    dim = 1 << n
    out = zero_matrix(dim)
    for x in range(dim):
        bi, bk = _site_bit(x, i, n), _site_bit(x, k, n)
        y = x
        if bi != bk:
            y ^= (1 << (n - i)) | (1 << (n - k))
        sign = -1 if (dressed and bi != bk) else 1
        out[y][x] = sign
    return out


def permutation_op(i: int, k: int, n: int):
    """Tensor-leg swap of sites i and k; involutive."""
    return pair_permutation(i, k, n, dressed=False)


def sigma3_op(i: int, n: int):
    _check_sites(n, i)
    dim = 1 << n
    out = zero_matrix(dim)
    for x in range(dim):
        out[x][x] = -1 if _site_bit(x, i, n) else 1
    return out


def magnon_number(x: int, n: int) -> int:
    """Down-spin count of a basis state."""
    return bin(x & ((1 << n) - 1)).count("1")


# ---------------------------------------------------------------------------
# Gaudin Hamiltonians

def gaudin_hamiltonians_boundary(z, xi, hbar) -> list:
    """Commuting boundary Hamiltonians on N sites.

    H_i/hbar = xi*sigma3^(i)/z_i + sum_{k!=i} (P_ik/(z_i-z_k)
               + sigma3 P_ik sigma3/(z_i+z_k)).
    """
    check_admissible(z, non_opposite=True, nonzero=True, label="marked point")
    z = _canon_seq(z)
    xi, hbar = _canon(xi), _canon(hbar)
    n = len(z)
    dim = 1 << n
    hams = []
    for i in range(1, n + 1):
        h = mat_scale(sigma3_op(i, n), scalar_div(xi, z[i - 1]))
        for k in range(1, n + 1):
            if k == i:
                continue
            p = pair_permutation(i, k, n)
            ps = pair_permutation(i, k, n, dressed=True)
            w1 = scalar_div(1, z[i - 1] - z[k - 1])
            w2 = scalar_div(1, z[i - 1] + z[k - 1])
            for x in range(dim):
                row_p, row_ps, row_h = p[x], ps[x], h[x]
                for y in range(dim):
                    if row_p[y] or row_ps[y]:
                        row_h[y] = row_h[y] + w1 * row_p[y] + w2 * row_ps[y]
        hams.append(mat_scale(h, hbar))
    return hams


def gaudin_hamiltonians_B(z, hbar) -> list:
    """B-type Hamiltonians: N visible sites plus a hidden site at z = 0.

    The hidden site contributes (P_{i,N+1} + sigma3 P sigma3)/z_i; the
    hidden-site Hamiltonian itself drops out of the transfer matrix and is
    never built.
    """
    check_admissible(z, non_opposite=True, nonzero=True, label="marked point")
    z = _canon_seq(z)
    hbar = _canon(hbar)
    n = len(z)
    sites = n + 1
    dim = 1 << sites
    hams = []
    for i in range(1, n + 1):
        h = zero_matrix(dim)
        ph = pair_permutation(i, sites, sites)
        phs = pair_permutation(i, sites, sites, dressed=True)
        w = scalar_div(1, z[i - 1])
        for x in range(dim):
            for y in range(dim):
                if ph[x][y] or phs[x][y]:
                    h[x][y] = h[x][y] + w * (ph[x][y] + phs[x][y])
        for k in range(1, n + 1):
            if k == i:
                continue
            p = pair_permutation(i, k, sites)
            ps = pair_permutation(i, k, sites, dressed=True)
            w1 = scalar_div(1, z[i - 1] - z[k - 1])
            w2 = scalar_div(1, z[i - 1] + z[k - 1])
            for x in range(dim):
                for y in range(dim):
                    if p[x][y] or ps[x][y]:
                        h[x][y] = h[x][y] + w1 * p[x][y] + w2 * ps[x][y]
        hams.append(mat_scale(h, hbar))
    return hams


# ---------------------------------------------------------------------------
# R- and K-matrices, reflection algebra

def r_matrix_embedded(u, eta, a: int, b: int, nlegs: int):
    """1 + (eta/u) P_ab acting on nlegs two-dimensional legs."""
    if not u:
        raise PoleCollision("R-matrix pole at u = 0")
    u, eta = _canon(u), _canon(eta)
    w = scalar_div(eta, u)
    p = pair_permutation(a, b, nlegs)
    dim = 1 << nlegs
    out = [[w * p[x][y] if p[x][y] else 0 for y in range(dim)] for x in range(dim)]
    for x in range(dim):
        out[x][x] = out[x][x] + 1
    return out


def r_matrix(u, eta):
    """Yang R-matrix on C^2 (x) C^2."""
    return r_matrix_embedded(u, eta, 1, 2, 2)


def k_matrices(u, alpha, beta, eta):
    """Diagonal reflection matrices (K_minus, K_plus) as 2x2 matrices."""
    u, alpha, beta, eta = _canon(u), _canon(alpha), _canon(beta), _canon(eta)
    if not u:
        raise PoleCollision("K-matrix pole at u = 0")
    if not (u + eta):
        raise PoleCollision("K+ pole at u = -eta")
    a = scalar_div(alpha * eta, u)
    b = scalar_div(beta * eta, u + eta)
    kminus = [[1 + a, 0], [0, -1 + a]]
    kplus = [[1 - b, 0], [0, -1 - b]]
    return kminus, kplus


def _embed_leg_diag(k2, leg: int, nlegs: int):
    """Diagonal 2x2 operator on one leg of an nlegs product."""
    dim = 1 << nlegs
    out = zero_matrix(dim)
    for x in range(dim):
        out[x][x] = k2[_site_bit(x, leg, nlegs)][_site_bit(x, leg, nlegs)]
    return out


def partial_transpose(m, leg: int, nlegs: int):
    """Transpose in one tensor leg only."""
    dim = 1 << nlegs
    out = zero_matrix(dim)
    mask = 1 << (nlegs - leg)
    for x in range(dim):
        for y in range(dim):
            xx = (x & ~mask) | (y & mask)
            yy = (y & ~mask) | (x & mask)
            out[xx][yy] = m[x][y]
    return out


def yang_baxter_residual(u1, u2, eta):
    """R12(u1-u2) R13(u1) R23(u2) - R23(u2) R13(u1) R12(u1-u2) on 3 legs."""
    r12 = r_matrix_embedded(u1 - u2, eta, 1, 2, 3)
    r13 = r_matrix_embedded(u1, eta, 1, 3, 3)
    r23 = r_matrix_embedded(u2, eta, 2, 3, 3)
    lhs = mat_mul(r12, mat_mul(r13, r23))
    rhs = mat_mul(r23, mat_mul(r13, r12))
    return mat_sub(lhs, rhs)


def reflection_residuals(u1, u2, alpha, beta, eta):
    """Residuals of the two reflection equations on C^2 (x) C^2."""
    km1, kp1 = k_matrices(u1, alpha, beta, eta)
    km2, kp2 = k_matrices(u2, alpha, beta, eta)
    k1m = _embed_leg_diag(km1, 1, 2)
    k2m = _embed_leg_diag(km2, 2, 2)
    r_diff = r_matrix_embedded(u1 - u2, eta, 1, 2, 2)
    r_sum = r_matrix_embedded(u1 + u2, eta, 1, 2, 2)
    lhs = mat_mul(r_diff, mat_mul(k1m, mat_mul(r_sum, k2m)))
    rhs = mat_mul(k2m, mat_mul(r_sum, mat_mul(k1m, r_diff)))
    res_minus = mat_sub(lhs, rhs)

    k1p = partial_transpose(_embed_leg_diag(kp1, 1, 2), 1, 2)
    k2p = partial_transpose(_embed_leg_diag(kp2, 2, 2), 2, 2)
    r_a = r_matrix_embedded(-u1 + u2, eta, 1, 2, 2)
    r_b = r_matrix_embedded(-u1 - u2 - 2 * eta, eta, 1, 2, 2)
    lhs = mat_mul(r_a, mat_mul(k1p, mat_mul(r_b, k2p)))
    rhs = mat_mul(k2p, mat_mul(r_b, mat_mul(k1p, r_a)))
    res_plus = mat_sub(lhs, rhs)
    return res_minus, res_plus


def _partial_trace_leg0(m, n: int):
    dim = 1 << n
    out = zero_matrix(dim)
    for x in range(dim):
        for y in range(dim):
            out[x][y] = m[x][y] + m[dim + x][dim + y]
    return out


def transfer_matrix(u, z, alpha, beta, eta):
    """Double-row transfer matrix on N sites (auxiliary leg traced out)."""
    z = _canon_seq(z)
    u, eta = _canon(u), _canon(eta)
    n = len(z)
    for zk in z:
        if not (u - zk) or not (u + zk):
            raise PoleCollision("transfer matrix pole at u = +-z_k")
    nlegs = n + 1
    km, kp = k_matrices(u, alpha, beta, eta)
    prod = _embed_leg_diag(kp, 1, nlegs)
    for i in range(1, n + 1):
        prod = mat_mul(prod, r_matrix_embedded(u - z[i - 1], eta, 1, i + 1, nlegs))
    prod = mat_mul(prod, _embed_leg_diag(km, 1, nlegs))
    for i in range(n, 0, -1):
        prod = mat_mul(prod, r_matrix_embedded(u + z[i - 1], eta, 1, i + 1, nlegs))
    return _partial_trace_leg0(prod, n)


def gamma_factor(u, z):
    """Scalar first-order coefficient sum(1/(u - z_i) + 1/(u + z_i))."""
    u = _canon(u)
    g = 0
    for zk in _canon_seq(z):
        g = g + scalar_div(1, u - zk) + scalar_div(1, u + zk)
    return g


def gaudin_transfer_target(u, z, alpha, beta, hbar) -> list:
    """-2 alpha beta/u^2 + (1/hbar) sum_i H_i (1/(u-z_i) - 1/(u+z_i))."""
    u, alpha, beta, hbar = _canon(u), _canon(alpha), _canon(beta), _canon(hbar)
    z = _canon_seq(z)
    hams = gaudin_hamiltonians_boundary(z, alpha - beta, hbar)
    dim = len(hams[0])
    out = mat_scale(identity_matrix(dim), scalar_div(-2 * alpha * beta, u * u))
    for zi, h in zip(z, hams):
        w = scalar_div(1, u - zi) - scalar_div(1, u + zi)
        coeff = scalar_div(w, hbar)
        for x in range(dim):
            hrow = h[x]
            orow = out[x]
            for y in range(dim):
                if hrow[y]:
                    orow[y] = orow[y] + coeff * hrow[y]
    return out


def transfer_eps_expansion(u, z, alpha, beta, hbar):
    """Exact Taylor coefficients (T0, T1, T2) of T(u) at eta = eps*hbar.

    Degree-2 truncated series arithmetic keeps everything in Q, so the
    comparison T0 = 2, T1 = hbar*gamma(u), T2 = hbar^2 * T_Gaudin(u) is
    decided exactly.
    """
    if not exact_mode(u, alpha, beta, hbar, *z):
        raise ValueError("exact epsilon expansion needs exact inputs")
    eta = EpsSeries(0, _canon(hbar), 0)
    t = transfer_matrix(_canon(u), z, _canon(alpha), _canon(beta), eta)
    dim = len(t)

    def coeff(select):
        return [[select(EpsSeries.coerce(t[x][y])) for y in range(dim)]
                for x in range(dim)]

    return (coeff(lambda s: s.a0), coeff(lambda s: s.a1), coeff(lambda s: s.a2))


def gaudin_limit_residual(u, z, alpha, beta, hbar, eps_grid) -> float:
    """Float-mode check of the eps^2 coefficient by Richardson extrapolation."""
    if len(eps_grid) < 3:
        raise ValueError("need at least 3 epsilon samples")
    uc = to_complex(u)
    zc = [to_complex(v) for v in z]
    ac, bc, hc = to_complex(alpha), to_complex(beta), to_complex(hbar)
    gam = complex(to_complex(gamma_factor(uc, zc)))
    dim = 1 << len(z)
    samples = []
    for eps in eps_grid:
        t = as_complex_array(transfer_matrix(uc, zc, ac, bc, eps * hc))
        a = (t - 2.0 * np.eye(dim) - eps * hc * gam * np.eye(dim)) / eps ** 2
        samples.append(a)
    # Lagrange weights for extrapolation to eps = 0
    extrap = np.zeros((dim, dim), dtype=complex)
    for j, eps_j in enumerate(eps_grid):
        w = 1.0
        for k, eps_k in enumerate(eps_grid):
            if k != j:
                w *= (0.0 - eps_k) / (eps_j - eps_k)
        extrap += w * samples[j]
    target = as_complex_array(gaudin_transfer_target(uc, zc, ac, bc, hc))
    return float(np.abs(extrap - hc * hc * target).max())


# ---------------------------------------------------------------------------
# joint diagonalization oracle

@dataclass(frozen=True)
class JointRecord:
    sector: int
    eigs: tuple
    multiplicity: int


@dataclass(frozen=True)
class JointSpectrum:
    n_sites: int
    records: tuple

    def sector(self, m: int) -> list:
        return [r for r in self.records if r.sector == m]

    def sector_dimension(self, m: int) -> int:
        return sum(r.multiplicity for r in self.sector(m))

    def to_json(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "records": [
                {"sector": r.sector,
                 "eigs": [[v.real, v.imag] for v in r.eigs],
                 "multiplicity": r.multiplicity}
                for r in self.records
            ],
        }

    def to_csv(self, path) -> None:
        n_h = len(self.records[0].eigs) if self.records else 0
        cols = ["sector"] + [f"H_{i + 1}" for i in range(n_h)] + ["multiplicity"]
        lines = [",".join(cols)]
        for r in self.records:
            vals = [str(r.sector)]
            for v in r.eigs:
                vals.append(repr(v.real) if v.imag == 0 else f"{v.real!r}+{v.imag!r}i")
            vals.append(str(r.multiplicity))
            lines.append(",".join(vals))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def max_commutator_norm(hams) -> float:
    """Largest pairwise commutator norm relative to the operator scale."""
    arrs = [as_complex_array(h) for h in hams]
    scale = max(np.abs(a).max() for a in arrs)
    worst = 0.0
    for i in range(len(arrs)):
        for j in range(i + 1, len(arrs)):
            worst = max(worst, float(np.abs(arrs[i] @ arrs[j] - arrs[j] @ arrs[i]).max()))
    return worst / (scale * scale) if scale else 0.0


def sector_indices(n: int, m: int) -> list:
    return [x for x in range(1 << n) if magnon_number(x, n) == m]


def diagonalize_joint(hams, rng_seed: int = 0, cluster_tol: float = 1e-9,
                      resid_tol: float = 1e-8, max_attempts: int = 5) -> JointSpectrum:
    """Joint spectrum of commuting sector-preserving operators.

    Each magnon sector is diagonalized through a random linear combination;
    per-Hamiltonian eigenvalues are read off as Rayleigh quotients and
    validated as joint eigenvectors.  Clusters that persist through
    re-randomization are accepted as genuine joint degeneracies when the
    eigenvectors still pass the joint-residual check.
    """
    arrs = [as_complex_array(h) for h in hams]
    dim = arrs[0].shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError("operator dimension must be a power of two")
    scale = max(np.abs(a).max() for a in arrs)
    for a in arrs:
        for x in range(dim):
            for y in range(dim):
                if magnon_number(x, n) != magnon_number(y, n) and abs(a[x, y]) > 1e-12 * scale:
                    raise ValueError("operators do not conserve the magnon sector")
    rng = np.random.default_rng(rng_seed)
    records = []
    for m in range(n + 1):
        idx = sector_indices(n, m)
        blocks = [a[np.ix_(idx, idx)] for a in arrs]
        bdim = len(idx)
        tuples = None
        for _ in range(max_attempts):
            coeffs = rng.standard_normal(len(blocks))
            combo = sum(c * b for c, b in zip(coeffs, blocks))
            eigvals, vecs = np.linalg.eig(combo)
            ok = True
            cand = []
            for col in range(bdim):
                v = vecs[:, col]
                nv = np.linalg.norm(v)
                theta = []
                for b in blocks:
                    t = complex(v.conj() @ (b @ v)) / (nv * nv)
                    if np.linalg.norm(b @ v - t * v) > resid_tol * max(1.0, scale) * nv:
                        ok = False
                        break
                    theta.append(t)
                if not ok:
                    break
                cand.append(tuple(theta))
            if ok:
                tuples = cand
                break
        if tuples is None:
            raise DegenerateCombination(
                f"sector {m}: no random combination separated the spectrum")
        groups = []
        for t in tuples:
            placed = False
            for g in groups:
                ref = g[0]
                tol = cluster_tol * max(1.0, max(abs(v) for v in ref))
                if all(abs(a - b) <= tol for a, b in zip(t, ref)):
                    g.append(t)
                    placed = True
                    break
            if not placed:
                groups.append([t])
        for g in groups:
            avg = tuple(sum(v[i] for v in g) / len(g) for i in range(len(g[0])))
            records.append(JointRecord(sector=m, eigs=avg, multiplicity=len(g)))
    return JointSpectrum(n_sites=n, records=tuple(records))
