"""Basis-tagged operator matrices for the Jacobi and Hahn bispectral pairs.

Matrices act on coefficient columns: column ``j`` holds the image of the
``j``-th basis element. Operators on polynomial spaces are stored truncated
to degree ``K``; each carries an exactness window (the largest column whose
image survived truncation) and its degree raise, so that compositions know
which sub-block is still the true operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .orthopoly import (
    HahnBasis,
    JacobiParams,
    RecurrencePair,
    hahn_recurrence,
)

__all__ = [
    "BasisMismatchError",
    "BasisTag",
    "BasisOperator",
    "DualityData",
    "monomial_x",
    "monomial_hypergeom",
    "monomial_identity",
    "jacobi_basis_matrix",
    "to_jacobi_basis",
    "grid_x",
    "grid_y",
    "weighted_grid_x",
    "weighted_grid_y",
    "to_hahn_basis",
    "duality_data",
    "leonard_check",
    "kernel_routes",
]


class BasisMismatchError(ValueError):
    """Operator arithmetic across different representations."""


@dataclass(frozen=True)
class BasisTag:
    """Representation an operator matrix is written in.

    ``kind`` is one of ``monomial``, ``jacobi``, ``grid-delta`` (raw grid,
    where the Hahn operator is not symmetric), ``grid-weighted`` (orthonormal
    frame obtained by the weight similarity) and ``hahn``.
    """

    kind: str
    dim: int
    params: tuple = field(default=())

    KINDS = ("monomial", "jacobi", "grid-delta", "grid-weighted", "hahn")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")


@dataclass(frozen=True, eq=False)
class BasisOperator:
    matrix: np.ndarray
    basis: BasisTag
    window: int
    raise_: int = 0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if m.shape[0] != self.basis.dim:
            raise ValueError(f"matrix size {m.shape[0]} != basis dimension {self.basis.dim}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator matrix has non-finite entries")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def _check(self, other):
        if not isinstance(other, BasisOperator):
            return NotImplemented
        if other.basis != self.basis:
            raise BasisMismatchError(f"{self.basis} vs {other.basis}")
        return None

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        window = min(other.window, self.window - other.raise_)
        return BasisOperator(
            self.matrix @ other.matrix, self.basis, window, self.raise_ + other.raise_
        )

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = other * self.identity()
        if self._check(other) is NotImplemented:
            return NotImplemented
        return BasisOperator(
            self.matrix + other.matrix,
            self.basis,
            min(self.window, other.window),
            max(self.raise_, other.raise_),
        )

    __radd__ = __add__

    def __neg__(self):
        return BasisOperator(-self.matrix, self.basis, self.window, self.raise_)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, BasisOperator):
            raise TypeError("use @ for operator products")
        return BasisOperator(float(scalar) * self.matrix, self.basis, self.window, self.raise_)

    __rmul__ = __mul__

    def identity(self):
        return BasisOperator(np.eye(self.dim), self.basis, self.dim - 1, 0)

    def block(self):
        """Columns inside the exactness window (all rows)."""
        return self.matrix[:, : self.window + 1]

    def apply(self, coeffs):
        """Image of a coefficient vector; zero-padded to the basis dimension."""
        c = np.zeros(self.dim)
        coeffs = np.asarray(coeffs, dtype=float)
        c[: coeffs.size] = coeffs
        nz = np.nonzero(c)[0]
        if nz.size and nz[-1] > self.window:
            raise ValueError(
                f"input degree {nz[-1]} lies outside the exactness window {self.window}"
            )
        return self.matrix @ c


# -- polynomial (Jacobi) realization -----------------------------------------


def _mono_tag(K, params=()):
    return BasisTag("monomial", K + 1, params)


def monomial_x(K: int) -> BasisOperator:
    """Multiplication by ``x`` on coefficients of ``1, x, ..., x^K``."""
    if K < 1:
        raise ValueError("need K >= 1")
    return BasisOperator(np.eye(K + 1, k=-1), _mono_tag(K), K - 1, 1)


def monomial_identity(K: int) -> BasisOperator:
    return BasisOperator(np.eye(K + 1), _mono_tag(K), K, 0)


def monomial_hypergeom(p: JacobiParams, K: int) -> BasisOperator:
    """Hypergeometric operator ``x(1-x) d2 + (alpha+1-(alpha+beta+2)x) d``.

    Its action is ``x^n -> lambda_n x^n + n(n+alpha) x^(n-1)`` with
    ``lambda_n = -n(n+alpha+beta+1)``.
    """
    if K < 2:
        raise ValueError("need K >= 2")
    n = np.arange(K + 1, dtype=float)
    m = np.diag(-n * (n + p.alpha + p.beta + 1)) + np.diag((n * (n + p.alpha))[1:], 1)
    return BasisOperator(m, _mono_tag(K), K, 0)


def jacobi_basis_matrix(p: JacobiParams, rec: RecurrencePair, K: int) -> np.ndarray:
    """Row ``n`` holds the monomial coefficients of the monic ``P_n``."""
    return _monic_coefficients(rec.b, rec.u, K)


def _monic_coefficients(b, u, K):
    if K > len(b):
        raise ValueError(f"recurrence too short for degree {K}")
    c = np.zeros((K + 1, K + 1))
    c[0, 0] = 1.0
    for n in range(K):
        c[n + 1, 1:] = c[n, :-1]
        c[n + 1] -= b[n] * c[n]
        if n > 0:
            c[n + 1] -= u[n] * c[n - 1]
    return c


def to_jacobi_basis(op: BasisOperator, coeffs: np.ndarray, params=()) -> BasisOperator:
    """Rewrite a monomial-basis operator in the basis whose rows are ``coeffs``."""
    if op.basis.kind != "monomial":
        raise BasisMismatchError("expected a monomial-basis operator")
    ct = coeffs.T
    m = np.linalg.solve(ct, op.matrix @ ct)
    return BasisOperator(m, BasisTag("jacobi", op.dim, params), op.window, op.raise_)


# -- grid (Hahn) realization --------------------------------------------------


def _grid_tag(N, kind="grid-delta", params=()):
    return BasisTag(kind, N + 1, params)


def grid_x(N: int) -> BasisOperator:
    if N < 1:
        raise ValueError("need N >= 1")
    return BasisOperator(np.diag(np.arange(N + 1.0)), _grid_tag(N), N)


def grid_y(y_matrix) -> BasisOperator:
    y_matrix = np.asarray(y_matrix, dtype=float)
    N = y_matrix.shape[0] - 1
    return BasisOperator(y_matrix, _grid_tag(N), N)


def weighted_grid_x(basis: HahnBasis) -> BasisOperator:
    N = basis.params.n_grid
    return BasisOperator(np.diag(np.arange(N + 1.0)), _grid_tag(N, "grid-weighted"), N)


def weighted_grid_y(basis: HahnBasis) -> BasisOperator:
    N = basis.params.n_grid
    return BasisOperator(basis.y_sym, _grid_tag(N, "grid-weighted"), N)


def to_hahn_basis(op: BasisOperator, basis: HahnBasis) -> BasisOperator:
    """Rewrite a raw grid operator in the orthonormal Hahn basis.

    The weight similarity ``S = diag(sqrt(w))`` takes the raw grid frame to
    the weighted one, where the Hahn basis matrix is orthogonal.
    """
    if op.basis.kind not in ("grid-delta", "grid-weighted"):
        raise BasisMismatchError(f"expected a grid operator, got {op.basis.kind}")
    m = op.matrix
    if op.basis.kind == "grid-delta":
        s = np.sqrt(basis.weights)
        m = s[:, None] * m / s[None, :]
    v = basis.vectors
    N = basis.params.n_grid
    return BasisOperator(v.T @ m @ v, _grid_tag(N, "hahn"), op.window, op.raise_)


# -- duality ------------------------------------------------------------------


@dataclass(frozen=True)
class DualityData:
    """Overlaps between the grid deltas and the Hahn basis.

    ``phi[n, s]`` is ``phi_n(lambda_s)`` and ``chi[s, n]`` is
    ``chi_s(mu_n)``; both families are orthonormal polynomials built from
    the off-diagonals of ``X`` in the Hahn basis and ``Y`` on the grid.
    """

    overlap: np.ndarray
    w: np.ndarray
    w_dual: np.ndarray
    phi: np.ndarray
    chi: np.ndarray
    lam: np.ndarray
    mu: np.ndarray


def _orthonormal_values(diag, off, x):
    """Rows ``p_0(x), ..., p_N(x)`` of ``off[k] p_{k+1} = (x - diag[k]) p_k - off[k-1] p_{k-1}``.

    Every ``x`` must be an eigenvalue of the Jacobi matrix ``(diag, off)``.
    Forward recursion is unstable there, so the null vector of
    ``J - x`` is built from a twisted factorization: pivots are run from
    both ends, the twist is put where they agree best, and ratios are
    propagated outward. The result is rescaled to ``p_0 = 1``.
    """
    m = diag.size
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tiny = np.finfo(float).tiny * 1e10
    dx = diag[:, None] - x[None, :]
    top = np.empty_like(dx)
    bottom = np.empty_like(dx)
    top[0] = dx[0]
    for k in range(1, m):
        prev = np.where(top[k - 1] == 0, tiny, top[k - 1])
        top[k] = dx[k] - off[k - 1] ** 2 / prev
    bottom[-1] = dx[-1]
    for k in range(m - 2, -1, -1):
        nxt = np.where(bottom[k + 1] == 0, tiny, bottom[k + 1])
        bottom[k] = dx[k] - off[k] ** 2 / nxt
    top[top == 0] = tiny
    bottom[bottom == 0] = tiny
    twist = np.argmin(np.abs(top + bottom - dx), axis=0)

    v = np.zeros_like(dx)
    for c, t in enumerate(twist):
        v[t, c] = 1.0
        for j in range(t - 1, -1, -1):
            v[j, c] = -off[j] * v[j + 1, c] / top[j, c]
        for j in range(t + 1, m):
            v[j, c] = -off[j - 1] * v[j - 1, c] / bottom[j, c]
    return v / v[0]


def duality_data(basis: HahnBasis) -> DualityData:
    rec = hahn_recurrence(basis)
    N = basis.params.n_grid
    lam = np.arange(N + 1.0)
    phi = _orthonormal_values(rec.b, rec.a[1:], lam)
    chi = _orthonormal_values(basis.y_diag, basis.y_off, basis.mu)
    return DualityData(
        basis.vectors, basis.weights, basis.dual_weights, phi, chi, lam, basis.mu
    )


def kernel_routes(d: DualityData, j1: int, j2: int):
    """Three expressions for ``K[t, n]`` (``t <= j1``) summed over ``s <= j2``.

    Returns arrays of shape ``(j1 + 1, N + 1)``: the mixed route, the route
    through ``phi`` only and the route through ``chi`` only.
    """
    s = slice(0, j2 + 1)
    sw, swd = np.sqrt(d.w), np.sqrt(d.w_dual)
    # phi[s, n] = phi_s(lambda_n); chi[t, s] = chi_t(mu_s)
    mixed = (d.chi[: j1 + 1, s] * swd[s]) @ (d.phi[s, :] * sw[None, :])
    via_phi = (sw[: j1 + 1, None] * d.phi[s, : j1 + 1].T) @ (d.phi[s, :] * sw[None, :])
    via_chi = (d.chi[: j1 + 1, s] * d.w_dual[s]) @ d.chi[:, s].T
    return mixed, via_phi, via_chi


def leonard_check(d: DualityData) -> float:
    """Worst violation of ``sqrt(w_s) phi_n(lambda_s) = sqrt(w~_n) chi_s(mu_n)``.

    The three kernel expressions are also compared pairwise for every band
    limit ``J2`` (with ``J1 = N``); the larger discrepancy is returned.
    """
    lhs = np.sqrt(d.w)[None, :] * d.phi  # [n, s]
    rhs = np.sqrt(d.w_dual)[:, None] * d.chi.T  # [n, s]
    resid = float(np.max(np.abs(lhs - rhs)))
    N = d.w.size - 1
    for j2 in range(N + 1):
        routes = kernel_routes(d, N, j2)
        for i in range(3):
            for k in range(i + 1, 3):
                resid = max(resid, float(np.max(np.abs(routes[i] - routes[k]))))
    return resid
