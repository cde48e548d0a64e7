"""Closure tests for the quadratic and cubic algebras.

A relation such as ``[K2, [K1, K2]] = a K2^2 + d K2 + ...`` is tested as span
membership: the left-hand side is fitted by least squares onto the words of
the right-hand side and the relative residual decides. The fitted
coefficients are the extracted structure constants, reported next to the
printed ones where those exist.

For truncated polynomial realizations every fit is restricted to the
exactness window shared by the target and the words.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .heun import HeunTau, algebraic_heun, heun_hahn
from .operators import BasisOperator, grid_x, grid_y, monomial_hypergeom, monomial_x
from .orthopoly import HahnParams, JacobiParams, hahn_operator

__all__ = [
    "AlgebraWordBasis",
    "ClosureReport",
    "commutator",
    "anticommutator",
    "closure_fit",
    "jacobi_identity_residual",
    "jacobi_algebra_check",
    "JACOBI_PRINTED",
    "hahn_algebra_check",
    "racah_closure",
    "racah_embedding_jacobi",
    "cubic_closure_hahn",
    "w_plus_minus",
    "w_pair_checks",
]


def commutator(a: BasisOperator, b: BasisOperator) -> BasisOperator:
    return a @ b - b @ a


def anticommutator(a: BasisOperator, b: BasisOperator) -> BasisOperator:
    return a @ b + b @ a


@dataclass(frozen=True)
class AlgebraWordBasis:
    """Named operator words sharing one basis tag.

    The common window is the smallest window among the words.
    """

    names: tuple
    ops: tuple

    def __post_init__(self):
        if len(self.names) != len(self.ops) or not self.ops:
            raise ValueError("need one name per word and at least one word")
        tag = self.ops[0].basis
        for op in self.ops[1:]:
            if op.basis != tag:
                raise ValueError("all words must share a basis")

    @classmethod
    def of(cls, **words):
        return cls(tuple(words), tuple(words.values()))

    @property
    def window(self) -> int:
        return min(op.window for op in self.ops)


@dataclass(frozen=True)
class ClosureReport:
    coefficients: dict
    residual: float
    window: int
    rank: int
    n_words: int = field(default=0)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n_words

    def __getitem__(self, name):
        return self.coefficients[name]


def closure_fit(target: BasisOperator, words: AlgebraWordBasis) -> ClosureReport:
    """Least-squares fit of ``target`` onto ``words`` on the common window.

    Word columns are scaled to unit norm before the solve so that words of
    very different magnitude (e.g. ``I`` against a cubic) are treated evenly.
    A rank-deficient word set is reported through ``rank``, not raised.
    """
    if target.basis != words.ops[0].basis:
        raise ValueError("target and words live in different bases")
    w = min(target.window, words.window)
    if w < 0:
        raise ValueError("empty exactness window")
    cols = [op.matrix[:, : w + 1].ravel() for op in words.ops]
    a = np.stack(cols, axis=1)
    norms = np.linalg.norm(a, axis=0)
    norms[norms == 0] = 1.0
    rhs = target.matrix[:, : w + 1].ravel()
    sol, *_ = np.linalg.lstsq(a / norms, rhs, rcond=None)
    coef = sol / norms
    rank = int(np.linalg.matrix_rank(a / norms))
    tnorm = np.linalg.norm(rhs)
    res = np.linalg.norm(a @ coef - rhs)
    residual = float(res / tnorm) if tnorm > 0 else float(res)
    return ClosureReport(
        {n: float(c) for n, c in zip(words.names, coef)}, residual, w, rank, len(cols)
    )


def jacobi_identity_residual(k1, k2, k3) -> float:
    """``||[K1,[K2,K3]] + [K2,[K3,K1]] + [K3,[K1,K2]]||_F`` on full matrices."""
    c = lambda a, b: a @ b - b @ a  # noqa: E731
    a, b, d = (np.asarray(getattr(k, "matrix", k)) for k in (k1, k2, k3))
    return float(np.linalg.norm(c(a, c(b, d)) + c(b, c(d, a)) + c(d, c(a, b))))


# -- Jacobi algebra ----------------------------------------------------------


def JACOBI_PRINTED(p: JacobiParams) -> dict:
    """Printed constants of the Jacobi algebra with ``A1 = D_x``, ``A2 = x``."""
    s = p.alpha + p.beta
    return {
        "a2": 2.0,
        "d": -2.0,
        "b": 2.0,
        "c1": -2.0,
        "c2": -s * (s + 2),
        "e2": (p.alpha + 1) * s,
    }


def jacobi_algebra_check(p: JacobiParams, K: int = 14):
    """Fit both Jacobi-algebra relations in the monomial realization.

    Returns ``(first, second)`` where ``first`` fits ``[A2, [A1, A2]]`` onto
    ``{A2^2, A2}`` and ``second`` fits ``[[A1, A2], A1]`` onto
    ``{{A1, A2}, A1, A2, I}``.
    """
    a1 = monomial_hypergeom(p, K)
    a2 = monomial_x(K)
    a3 = commutator(a1, a2)
    ident = a1.identity()
    first = closure_fit(
        commutator(a2, a3), AlgebraWordBasis.of(a2=a2 @ a2, d=a2)
    )
    second = closure_fit(
        commutator(a3, a1),
        AlgebraWordBasis.of(b=anticommutator(a1, a2), c1=a1, c2=a2, e2=ident),
    )
    return first, second


# -- Racah-type closure --------------------------------------------------------


def racah_closure(k1: BasisOperator, k2: BasisOperator):
    """Racah-algebra closure fits for the pair ``(K1, K2)``, ``K3 = [K1, K2]``.

    ``[K2, K3]`` onto ``{{K1,K2}, K2^2, K2, K1, I}`` and ``[K3, K1]`` onto
    ``{K1^2, {K1,K2}, K1, K2, I}``.
    """
    k3 = commutator(k1, k2)
    ident = k1.identity()
    ac = anticommutator(k1, k2)
    first = closure_fit(
        commutator(k2, k3),
        AlgebraWordBasis.of(k1k2=ac, k2sq=k2 @ k2, k2=k2, k1=k1, id=ident),
    )
    second = closure_fit(
        commutator(k3, k1),
        AlgebraWordBasis.of(k1sq=k1 @ k1, k1k2=ac, k1=k1, k2=k2, id=ident),
    )
    return first, second


def hahn_algebra_check(p: HahnParams):
    """Hahn-algebra fits with ``K1 = X`` (grid) and ``K2 = Y`` (Hahn operator).

    Exact dimension: the grid realization has no truncation.
    """
    k1 = grid_x(p.n_grid)
    k2 = grid_y(hahn_operator(p))
    k3 = commutator(k1, k2)
    ident = k1.identity()
    first = closure_fit(
        commutator(k2, k3),
        AlgebraWordBasis.of(k1k2=anticommutator(k1, k2), k2=k2, k1=k1, id=ident),
    )
    second = closure_fit(
        commutator(k3, k1),
        AlgebraWordBasis.of(k1sq=k1 @ k1, k1=k1, k2=k2, id=ident),
    )
    return first, second


def racah_embedding_jacobi(t: HeunTau, p: JacobiParams, K: int = 16):
    """Racah algebra inside the Jacobi algebra.

    ``K1 = A1`` (hypergeometric operator) and
    ``K2 = tau1 A2 A1 + tau2 A1 A2 + tau3 A2`` with ``A2 = x``. The pair is
    tested with :func:`racah_closure` on the monomial window.
    """
    if K < 10:
        raise ValueError(f"window too small: need K >= 10, got {K}")
    if t.tau0 != 0 or t.tau4 != 0:
        raise ValueError("the embedding uses tau0 = tau4 = 0")
    if t.tau1 + t.tau2 == 0:
        raise ValueError("the embedding requires tau1 + tau2 != 0")
    a1 = monomial_hypergeom(p, K)
    a2 = monomial_x(K)
    k2 = t.tau1 * (a2 @ a1) + t.tau2 * (a1 @ a2) + t.tau3 * a2
    return racah_closure(a1, k2)


# -- cubic algebra of the Heun-Hahn operator -------------------------------------


def cubic_closure_hahn(t: HeunTau, p: HahnParams):
    """Cubic closure of ``{Y, W}`` with ``W`` the Heun-Hahn operator.

    ``[Y, [W, Y]]`` is fitted onto ``{Y^2, {Y,W}, Y, W, I}`` and
    ``[[W, Y], W]`` onto ``{Y^2, Y^3, W^2, {Y,W}, W, Y, I}``. The
    coefficients of ``Y^2`` and ``Y^3`` in the second fit are the extra
    terms ``e1`` and ``e2``; the pair closes as a Racah algebra when both
    vanish.

    Returns
    -------
    first, second : ClosureReport
    e1, e2 : float
    """
    y = grid_y(hahn_operator(p))
    w = heun_hahn(t, p)
    ident = y.identity()
    ac = anticommutator(y, w)
    y2 = y @ y
    first = closure_fit(
        commutator(y, commutator(w, y)),
        AlgebraWordBasis.of(y2=y2, yw=ac, y=y, w=w, id=ident),
    )
    second = closure_fit(
        commutator(commutator(w, y), w),
        AlgebraWordBasis.of(e1=y2, e2=y2 @ y, w2=w @ w, yw=ac, w=w, y=y, id=ident),
    )
    return first, second, second["e1"], second["e2"]


def w_plus_minus(p: HahnParams, gamma: float, eps: float):
    """``W+-`` = ``+-(1/2 [X, Y] + gamma X + eps) - Y/2`` on the grid.

    These are the two Heun-Hahn operators with ``tau1 + tau2 = 0`` and
    ``tau2 = +-tau4``.
    """
    tp = HeunTau(eps, 0.5, -0.5, gamma, -0.5)
    tm = HeunTau(-eps, -0.5, 0.5, -gamma, -0.5)
    return heun_hahn(tp, p), heun_hahn(tm, p)


def w_pair_checks(p: HahnParams, gamma: float, eps: float) -> dict:
    """Racah closure for every ordered pair drawn from ``{Y, W+, W-}``."""
    y = grid_y(hahn_operator(p))
    wp, wm = w_plus_minus(p, gamma, eps)
    ops = {"Y": y, "W+": wp, "W-": wm}
    out = {}
    for n1, k1 in ops.items():
        for n2, k2 in ops.items():
            if n1 != n2:
                out[(n1, n2)] = racah_closure(k1, k2)
    return out
