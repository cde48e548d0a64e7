"""Monic Jacobi polynomials on [0, 1] and the Hahn bispectral pair.

Jacobi data come from the closed-form recurrence coefficients. Hahn data are
*computed*: the Hahn difference operator is symmetrized by its detailed
balance weights and diagonalized, and the recurrence of ``x`` in that
eigenbasis is read off by conjugation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import SymTridiag, offband_leakage, sym_tridiag_eig

__all__ = [
    "JacobiParams",
    "HahnParams",
    "RecurrencePair",
    "NormConstants",
    "HahnBasis",
    "jacobi_coefficients",
    "jacobi_recurrence",
    "jacobi_eval",
    "jacobi_norms",
    "jacobi_eigenvalues",
    "hahn_eigenvalues",
    "hahn_operator",
    "hahn_weights",
    "hahn_basis",
    "hahn_recurrence",
    "eval_recurrence",
]


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"need alpha, beta > -1, got ({self.alpha}, {self.beta})")
        # alpha + beta > -2 then keeps every denominator 2n + alpha + beta (+-1, +2)
        # away from zero for n >= 1; the (1 + alpha + beta) factor of u_1 is cancelled


@dataclass(frozen=True)
class HahnParams:
    alpha: float
    beta: float
    n_grid: int

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"need alpha, beta > -1, got ({self.alpha}, {self.beta})")
        if int(self.n_grid) != self.n_grid or self.n_grid < 1:
            raise ValueError(f"grid size N must be a positive integer, got {self.n_grid}")
        object.__setattr__(self, "n_grid", int(self.n_grid))


@dataclass(frozen=True)
class RecurrencePair:
    """Three-term recurrence ``x p_n = p_{n+1} + b_n p_n + u_n p_{n-1}``.

    ``u[0]`` is a placeholder (zero). For orthonormal families, ``a`` holds
    the signed off-diagonal ``a_n`` (``u_n = a_n**2``) with ``a[0] = 0``.
    """

    b: np.ndarray
    u: np.ndarray
    mass: float
    a: np.ndarray | None = field(default=None)

    @property
    def nmax(self) -> int:
        return self.b.size - 1


@dataclass(frozen=True)
class NormConstants:
    h: np.ndarray


def jacobi_coefficients(alpha, beta, nmax):
    """Recurrence coefficients ``(b, u)`` of monic Jacobi polynomials on [0, 1].

    No positivity check: this is also used for the formal parameters that
    appear in the tridiagonalization, where ``alpha`` may be below -1. Only
    vanishing denominators are rejected.
    """
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    s = alpha + beta
    b = np.empty(nmax + 1)
    u = np.zeros(nmax + 1)
    if s + 2 == 0:
        raise ZeroDivisionError("alpha + beta + 2 vanishes")
    b[0] = (alpha + 1) / (s + 2)
    for n in range(1, nmax + 1):
        t = 2 * n + s
        if t == 0 or t + 2 == 0:
            raise ZeroDivisionError(f"2n + alpha + beta vanishes near n={n}")
        b[n] = 0.5 + (alpha * alpha - beta * beta) / (2 * t * (t + 2))
        if n == 1:
            # the factor (1 + alpha + beta) cancels
            u[1] = (1 + alpha) * (1 + beta) / ((s + 2) ** 2 * (s + 3))
        else:
            if t - 1 == 0 or t + 1 == 0:
                raise ZeroDivisionError(f"2n + alpha + beta +- 1 vanishes at n={n}")
            u[n] = n * (n + alpha) * (n + beta) * (n + s) / ((t - 1) * t * t * (t + 1))
    return b, u


def jacobi_recurrence(p: JacobiParams, nmax: int) -> RecurrencePair:
    b, u = jacobi_coefficients(p.alpha, p.beta, nmax)
    return RecurrencePair(b, u, _jacobi_mass(p.alpha, p.beta))


def _jacobi_mass(alpha, beta):
    return math.exp(
        math.lgamma(alpha + 1) + math.lgamma(beta + 1) - math.lgamma(alpha + beta + 2)
    )


def jacobi_eigenvalues(p: JacobiParams, nmax):
    n = np.arange(nmax + 1)
    return -n * (n + p.alpha + p.beta + 1.0)


def eval_recurrence(b, u, n, x):
    """Value of the monic polynomial of degree ``n`` at ``x`` (forward recurrence)."""
    x = np.asarray(x, dtype=float)
    if n > len(b):
        raise ValueError("degree exceeds the stored recurrence")
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for k in range(n):
        nxt = (x - b[k]) * cur - (u[k] * prev if k > 0 else 0.0)
        prev, cur = cur, nxt
    return cur


def jacobi_eval(p: JacobiParams, rec: RecurrencePair, n: int, x):
    if n > rec.nmax + 1:
        raise ValueError(f"degree {n} exceeds recurrence length {rec.nmax}")
    return eval_recurrence(rec.b, rec.u, n, x)


def jacobi_norms(p: JacobiParams, rec: RecurrencePair) -> NormConstants:
    h0 = _jacobi_mass(p.alpha, p.beta)
    u = rec.u.copy()
    u[0] = 1.0
    return NormConstants(h0 * np.cumprod(u))


# -- Hahn ------------------------------------------------------------------


def _hahn_bd(p: HahnParams):
    x = np.arange(p.n_grid + 1, dtype=float)
    big_b = (x - p.n_grid) * (x + p.alpha + 1)
    big_d = x * (x - p.beta - p.n_grid - 1)
    return big_b, big_d


def hahn_eigenvalues(p: HahnParams):
    n = np.arange(p.n_grid + 1)
    return n * (n + p.alpha + p.beta + 1.0)


def hahn_operator(p: HahnParams) -> np.ndarray:
    """Matrix of ``Y = B T+ + D T- - (B + D)`` on the grid ``{0, ..., N}``."""
    big_b, big_d = _hahn_bd(p)
    return np.diag(big_b[:-1], 1) + np.diag(big_d[1:], -1) - np.diag(big_b + big_d)


def hahn_weights(p: HahnParams):
    """Grid weights from ``w(x+1)/w(x) = B(x)/D(x+1)``, normalized to sum 1."""
    big_b, big_d = _hahn_bd(p)
    logw = np.zeros(p.n_grid + 1)
    logw[1:] = np.cumsum(np.log(big_b[:-1] / big_d[1:]))
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _symmetrized_bands(p: HahnParams):
    big_b, big_d = _hahn_bd(p)
    diag = -(big_b + big_d)
    # B(x) D(x+1) > 0 on the grid; both factors are negative
    off = -np.sqrt(big_b[:-1] * big_d[1:])
    return diag, off


@dataclass(frozen=True)
class HahnBasis:
    """Orthonormal Hahn eigenbasis in the symmetrized grid frame.

    Column ``n`` of ``vectors`` is ``d_n`` written on the grid deltas
    ``e_s``. Signs are fixed so that ``<e_0, d_n> > 0`` for all ``n``; this is
    the convention under which the duality relation holds verbatim.
    """

    params: HahnParams
    vectors: np.ndarray
    mu: np.ndarray
    weights: np.ndarray
    dual_weights: np.ndarray
    y_diag: np.ndarray
    y_off: np.ndarray

    @property
    def y_sym(self) -> np.ndarray:
        return np.diag(self.y_diag) + np.diag(self.y_off, 1) + np.diag(self.y_off, -1)


def hahn_basis(p: HahnParams, rtol=1e-9) -> HahnBasis:
    diag, off = _symmetrized_bands(p)
    eig = sym_tridiag_eig(SymTridiag(diag, off))
    mu = hahn_eigenvalues(p)
    # pair each computed eigenvalue with the nearest analytic one
    pairing = np.argmin(np.abs(eig.values[:, None] - mu[None, :]), axis=1)
    if len(set(pairing.tolist())) != mu.size:
        raise ValueError("eigenvalue-to-degree pairing is not unique")
    scale = max(float(np.max(np.abs(mu))), 1.0)
    err = np.abs(eig.values - mu[pairing])
    if np.any(err > rtol * scale):
        raise ValueError(
            f"Hahn eigenvalues deviate from n(n+alpha+beta+1) by {err.max():.3e}"
        )
    vectors = np.empty_like(eig.vectors)
    vectors[:, pairing] = eig.vectors
    vectors *= np.sign(vectors[0])
    w = vectors[:, 0] ** 2
    wd = vectors[0] ** 2
    return HahnBasis(p, vectors, mu, w / w.sum(), wd / wd.sum(), diag, off)


def hahn_recurrence(basis: HahnBasis, tol=1e-10) -> RecurrencePair:
    """Recurrence of multiplication by ``x`` in the Hahn basis.

    The conjugated matrix must be tridiagonal; leakage above ``tol`` times its
    norm is an error (this is the bispectrality of the pair).
    """
    v = basis.vectors
    grid = np.arange(v.shape[0], dtype=float)
    j = v.T @ (grid[:, None] * v)
    leak = offband_leakage(j)
    if leak > tol * np.linalg.norm(j):
        raise ValueError(f"x is not tridiagonal in the Hahn basis (leak {leak:.3e})")
    a = np.concatenate([[0.0], 0.5 * (np.diag(j, 1) + np.diag(j, -1))])
    return RecurrencePair(np.diag(j).copy(), a**2, 1.0, a)
