"""Discrete time-and-band limiting on the Hahn grid.

Two projections are built: ``pi1`` keeps grid positions ``<= J1`` ("time")
and ``pi2`` keeps Hahn degrees ``<= J2`` ("band"). The limiting operator
``V1 = pi1 pi2 pi1`` has an eigenvalue spectrum that clusters near 0 and 1,
which makes its eigenvectors hard to get directly. The algebraic Heun
operator

    M = 1/2 (XY + YX) + tau3 X + tau4 Y

commutes with both projections for a suitable ``(tau3, tau4)``. ``M`` is
tridiagonal on the grid with well separated eigenvalues, so its eigenvectors
are a stable route to those of ``V1``.

Everything is written in the weighted (orthonormal) grid frame, where ``X``
is diagonal, ``Y`` is symmetric tridiagonal and the Hahn basis matrix is
orthogonal.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .heun import HeunTau
from .linalg import SymTridiag, dense_sym_eig, sym_tridiag_eig
from .operators import (
    BasisOperator,
    BasisTag,
    duality_data,
    kernel_routes,
)
from .orthopoly import HahnBasis, HahnParams, hahn_basis

__all__ = [
    "LimitingConfig",
    "KernelMatrix",
    "CommutingSolution",
    "SpectralReport",
    "CommutationError",
    "DegenerateSpectrumWarning",
    "projections",
    "limiting_ops",
    "kernel_matrix",
    "commuting_tau",
    "solve",
]

KERNEL_TOL = 1e-10
COMMUTE_TOL = 1e-10
BLOCK_TOL = 1e-10
DEGENERATE_TOL = 1e-8
GAP_FLOOR = 1e-10


class CommutationError(ArithmeticError):
    """``M`` fails to commute with a projection, or mixes the pi1 blocks."""


class DegenerateSpectrumWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class LimitingConfig:
    hahn: HahnParams
    j1: int
    j2: int

    def __post_init__(self):
        N = self.hahn.n_grid
        for name in ("j1", "j2"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= N:
                raise ValueError(f"{name} must be an integer in [0, {N}], got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def n(self) -> int:
        return self.hahn.n_grid

    @property
    def boundary(self) -> bool:
        return self.j1 == self.n or self.j2 == self.n


@dataclass(frozen=True)
class KernelMatrix:
    """Discrete kernel ``K[t, n]`` for ``t <= J1`` and ``n <= N``.

    ``k`` is the mixed route; ``routes`` holds all three evaluations and
    ``direct`` the rows of ``pi2`` read off the matrix itself.
    """

    k: np.ndarray
    route: str
    routes: dict
    direct: np.ndarray
    route_gap: float
    direct_gap: float


@dataclass(frozen=True)
class CommutingSolution:
    tau: HeunTau
    m_matrix: np.ndarray
    commutator_residuals: tuple
    spectrum_gap: float
    m_norm: float


@dataclass(frozen=True)
class SpectralReport:
    config: LimitingConfig
    v1_eigs_direct: np.ndarray
    v1_eigs_via_m: np.ndarray
    eigenvalue_gap: float
    eigenvector_agreement: float
    compared_vectors: int
    m_eigs: np.ndarray
    condition_diagnostics: dict
    commuting: CommutingSolution | None = None
    fallback_clusters: list = field(default_factory=list)


def _weighted_tag(N):
    return BasisTag("grid-weighted", N + 1)


def projections(c: LimitingConfig, basis: HahnBasis):
    """``(pi1, pi2)`` in the weighted grid frame."""
    N = c.n
    keep_t = (np.arange(N + 1) <= c.j1).astype(float)
    keep_b = (np.arange(N + 1) <= c.j2).astype(float)
    v = basis.vectors
    p1 = np.diag(keep_t)
    p2 = (v * keep_b) @ v.T
    if c.j2 == N:
        # completeness: sum over all Hahn degrees is exactly the identity
        p2 = np.eye(N + 1)
    else:
        p2 = 0.5 * (p2 + p2.T)
    tag = _weighted_tag(N)
    return BasisOperator(p1, tag, N), BasisOperator(p2, tag, N)


def limiting_ops(pi1: BasisOperator, pi2: BasisOperator):
    """``(V1, V2, E1, E2)`` with ``V1 = pi1 pi2 pi1`` and ``V2 = pi2 pi1 pi2``."""
    e1 = pi1 @ pi2
    e2 = pi2 @ pi1
    v1 = e1 @ pi1
    v2 = e2 @ pi2
    sym = lambda op: BasisOperator(  # noqa: E731
        0.5 * (op.matrix + op.matrix.T), op.basis, op.window, op.raise_
    )
    return sym(v1), sym(v2), e1, e2


def kernel_matrix(c: LimitingConfig, basis: HahnBasis, tol=KERNEL_TOL) -> KernelMatrix:
    d = duality_data(basis)
    mixed, via_phi, via_chi = kernel_routes(d, c.j1, c.j2)
    routes = {"mixed": mixed, "phi": via_phi, "chi": via_chi}
    gap = max(
        float(np.max(np.abs(mixed - via_phi))),
        float(np.max(np.abs(mixed - via_chi))),
        float(np.max(np.abs(via_phi - via_chi))),
    )
    if gap > tol:
        raise ArithmeticError(f"kernel routes disagree by {gap:.3e}")
    _, pi2 = projections(c, basis)
    direct = pi2.matrix[: c.j1 + 1, :]
    direct_gap = float(np.max(np.abs(direct - mixed)))
    if direct_gap > tol:
        raise ArithmeticError(f"kernel disagrees with pi2 matrix elements by {direct_gap:.3e}")
    return KernelMatrix(mixed, "mixed", routes, direct, gap, direct_gap)


def commuting_tau(c: LimitingConfig, basis: HahnBasis, tol=COMMUTE_TOL) -> CommutingSolution:
    """Build ``M`` commuting with ``pi1`` and ``pi2`` (``tau1 = tau2 = 1/2``).

    The conditions ``tau1 (lambda_J1 + lambda_J1+1) + tau4 = 0`` and
    ``tau1 (mu_J2 + mu_J2+1) + tau3 = 0`` pair the grid spectrum with the
    time cut and the Hahn spectrum with the band cut.
    """
    N = c.n
    if c.j1 >= N or c.j2 >= N:
        raise ValueError("commuting_tau needs J1 < N and J2 < N")
    mu = basis.mu
    tau4 = -(2 * c.j1 + 1) / 2.0
    tau3 = -(mu[c.j2] + mu[c.j2 + 1]) / 2.0
    tau = HeunTau(0.0, 0.5, 0.5, tau3, tau4)

    x = np.arange(N + 1.0)
    y = basis.y_sym
    m = 0.5 * (x[:, None] * y + y * x[None, :]) + tau3 * np.diag(x) + tau4 * y
    m = 0.5 * (m + m.T)

    pi1, pi2 = projections(c, basis)
    norm = float(np.linalg.norm(m))
    r1 = float(np.linalg.norm(m @ pi1.matrix - pi1.matrix @ m))
    r2 = float(np.linalg.norm(m @ pi2.matrix - pi2.matrix @ m))
    if max(r1, r2) > tol * norm:
        raise CommutationError(
            f"[M, pi] residuals ({r1:.3e}, {r2:.3e}) exceed {tol:g} * ||M||_F"
        )
    eig = sym_tridiag_eig(SymTridiag(np.diag(m).copy(), np.diag(m, 1).copy()))
    gaps = np.diff(eig.values)
    return CommutingSolution(
        tau, m, (r1, r2), float(gaps.min()) if gaps.size else np.inf, norm
    )


def _sin_angle(u, v) -> float:
    """Sine of the principal angle between the lines spanned by ``u`` and ``v``."""
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(v - (u @ v) * u))


def _split_eigvectors(v, j1, j2):
    """Eigenpairs of ``V1`` from the two column blocks of the Hahn basis.

    On the time block ``V1 = B B^T`` and ``1 - V1 = C C^T`` with
    ``B = v[:J1+1, :J2+1]`` and ``C = v[:J1+1, J2+1:]``. Eigenvalues near 0
    take their vectors from the SVD of ``B``; those near 1 from ``C``. In
    both regimes the singular values are square roots of the small
    quantity, so their gaps are much wider than those of ``V1`` and the
    vectors are resolved far better than by diagonalizing ``V1`` itself.
    """
    n = v.shape[0]
    m = j1 + 1
    ub, sb, _ = np.linalg.svd(v[:m, : j2 + 1], full_matrices=True)
    uc, sc, _ = np.linalg.svd(v[:m, j2 + 1 :], full_matrices=True)
    lam_b = np.zeros(m)
    lam_b[: sb.size] = sb**2
    lam_c = np.ones(m)
    lam_c[: sc.size] = 1.0 - sc**2
    low = np.nonzero(lam_b <= 0.5)[0]
    # the remaining m - len(low) eigenpairs are the largest ones seen by C
    high = np.argsort(lam_c, kind="stable")[low.size :]
    vals = np.concatenate([lam_b[low], lam_c[high]])
    vecs = np.concatenate([ub[:, low], uc[:, high]], axis=1)
    full_vals = np.concatenate([np.zeros(n - m), vals])
    full_vecs = np.zeros((n, n))
    full_vecs[m:, : n - m] = np.eye(n - m)
    full_vecs[:m, n - m :] = vecs
    order = np.argsort(full_vals, kind="stable")
    return full_vals[order], full_vecs[:, order]


def _clusters(values, tol):
    """Split sorted ``values`` into runs whose neighbours differ by ``<= tol``."""
    groups = [[0]]
    for i in range(1, values.size):
        if values[i] - values[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _boundary_report(c: LimitingConfig, basis: HahnBasis, v1: np.ndarray) -> SpectralReport:
    """Analytic answer when one projection is the identity."""
    N = c.n
    kept = c.j1 if c.j2 == N else c.j2
    via = np.concatenate([np.zeros(N - kept), np.ones(kept + 1)])
    direct = dense_sym_eig(v1).values
    diag = {"v1_min_gap": _min_gap(direct), "m_min_gap": None, "analytic": True}
    return SpectralReport(
        c, direct, via, float(np.max(np.abs(direct - via))), 0.0, 0,
        np.array([]), diag,
    )


def _min_gap(values) -> float:
    g = np.diff(np.sort(values))
    return float(g.min()) if g.size else float("inf")


def solve(
    c: LimitingConfig,
    basis: HahnBasis | None = None,
    degenerate_tol=DEGENERATE_TOL,
    gap_floor=GAP_FLOOR,
    block_tol=BLOCK_TOL,
    commute_tol=COMMUTE_TOL,
) -> SpectralReport:
    """Eigenvalues of ``V1`` two ways: dense direct, and through ``M``.

    The via-``M`` route diagonalizes the ``(J1+1)``-block of ``M`` (it is
    decoupled from the rest because ``[M, pi1] = 0``) and takes Rayleigh
    quotients of ``V1`` on its eigenvectors; the complement of the block
    contributes zeros. Eigenvectors are compared only where the direct
    spectrum of ``V1`` has both neighbouring gaps above ``gap_floor``.
    """
    basis = hahn_basis(c.hahn) if basis is None else basis
    pi1, pi2 = projections(c, basis)
    v1 = limiting_ops(pi1, pi2)[0].matrix
    if c.boundary:
        return _boundary_report(c, basis, v1)

    sol = commuting_tau(c, basis, tol=commute_tol)
    m = sol.m_matrix
    N, j1 = c.n, c.j1
    coupling = abs(m[j1, j1 + 1])
    if coupling > block_tol * sol.m_norm:
        raise CommutationError(f"M couples the pi1 blocks ({coupling:.3e})")

    blk = SymTridiag(np.diag(m)[: j1 + 1].copy(), np.diag(m, 1)[:j1].copy())
    beig = sym_tridiag_eig(blk)
    q = np.zeros((N + 1, j1 + 1))
    q[: j1 + 1] = beig.vectors

    spread = max(float(np.ptp(beig.values)), 1.0)
    groups = _clusters(beig.values, degenerate_tol * spread)
    fallback = [g for g in groups if len(g) > 1]
    if fallback:
        warnings.warn(
            f"M has {len(fallback)} near-degenerate eigenvalue cluster(s) on the pi1 block; "
            "diagonalizing V1 inside each cluster",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
        for g in fallback:
            sub = q[:, g]
            inner = dense_sym_eig(sub.T @ v1 @ sub)
            q[:, g] = sub @ inner.vectors

    rayleigh = np.einsum("ij,ik,kj->j", q, v1, q)
    via_vals = np.concatenate([rayleigh, np.zeros(N - j1)])
    comp = np.zeros((N + 1, N - j1))
    comp[j1 + 1 :, :] = np.eye(N - j1)
    via_vecs = np.concatenate([q, comp], axis=1)
    order = np.argsort(via_vals, kind="stable")
    via_vals = via_vals[order]
    via_vecs = via_vecs[:, order]

    direct = dense_sym_eig(v1)
    ev_gap = float(np.max(np.abs(direct.values - via_vals)))
    vals = direct.values
    split_vals, split_vecs = _split_eigvectors(basis.vectors, j1, c.j2)

    worst, worst_dense, compared = 0.0, 0.0, 0
    for i in range(N + 1):
        left = vals[i] - vals[i - 1] if i > 0 else np.inf
        right = vals[i + 1] - vals[i] if i < N else np.inf
        if min(left, right) > gap_floor:
            worst = max(worst, _sin_angle(split_vecs[:, i], via_vecs[:, i]))
            worst_dense = max(worst_dense, _sin_angle(direct.vectors[:, i], via_vecs[:, i]))
            compared += 1

    in_block = vals[-(j1 + 1):]
    diag = {
        "v1_min_gap": _min_gap(in_block),
        "m_min_gap": _min_gap(beig.values),
        "m_full_min_gap": sol.spectrum_gap,
        "v1_near_one": int(np.sum(vals > 1 - 1e-10)),
        "v1_near_zero_in_block": int(np.sum(in_block < 1e-10)),
        "analytic": False,
        "dense_eigh_angle": worst_dense,
        "split_eig_gap": float(np.max(np.abs(split_vals - vals))),
    }
    m_eigs = sym_tridiag_eig(SymTridiag(np.diag(m).copy(), np.diag(m, 1).copy())).values
    return SpectralReport(
        c, vals, via_vals, ev_gap, worst, compared, m_eigs, diag, sol,
        [list(map(int, g)) for g in fallback],
    )
