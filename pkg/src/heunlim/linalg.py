"""Dense symmetric linear algebra used throughout the package.

The tridiagonal eigensolver is an implicit QL iteration with Wilkinson-type
shifts (the classical ``tql2`` scheme). Dense symmetric problems go to
LAPACK through :func:`numpy.linalg.eigh`, which keeps the two solvers
independent when they are compared against each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "SymTridiag",
    "EigenDecomposition",
    "LanczosResult",
    "sym_tridiag_eig",
    "dense_sym_eig",
    "lanczos",
    "golub_welsch",
    "fix_signs",
    "offband_leakage",
]

MAX_SWEEPS = 60


class ConvergenceError(RuntimeError):
    """Raised when an iterative eigensolver exceeds its sweep cap."""

    def __init__(self, msg, index):
        super().__init__(msg)
        self.index = index


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored by its two bands."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).copy()
        e = np.asarray(self.offdiag, dtype=float).copy()
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a non-empty 1-d array")
        if e.shape != (d.size - 1,):
            raise ValueError(f"offdiag must have length {d.size - 1}, got {e.shape}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal entries must be finite")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.offdiag, 1)
            + np.diag(self.offdiag, -1)
        )

    @classmethod
    def from_dense(cls, a, tol=1e-10):
        """Extract the bands of a symmetric matrix, rejecting off-band mass."""
        a = np.asarray(a, dtype=float)
        leak = offband_leakage(a)
        scale = max(np.linalg.norm(a), 1.0)
        if leak > tol * scale:
            raise ValueError(f"matrix is not tridiagonal (off-band {leak:.3e})")
        return cls(np.diag(a).copy(), 0.5 * (np.diag(a, 1) + np.diag(a, -1)))


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray
    residual: float

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def offband_leakage(a) -> float:
    """Frobenius norm of everything outside the three central diagonals."""
    a = np.asarray(a, dtype=float)
    mask = np.abs(np.subtract.outer(np.arange(a.shape[0]), np.arange(a.shape[1]))) > 1
    return float(np.linalg.norm(a[mask]))


def fix_signs(vectors):
    """Flip columns so that the entry of largest magnitude is positive.

    Ties are resolved in favour of the lowest row index (``argmax`` picks the
    first maximum).
    """
    v = np.array(vectors, dtype=float)
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _residual(a, values, vectors) -> float:
    r = a @ vectors - vectors * values
    return float(np.max(np.linalg.norm(r, axis=0))) if values.size else 0.0


def sym_tridiag_eig(t: SymTridiag) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric tridiagonal matrix.

    Implicit QL with shifts; eigenvectors are accumulated from the plane
    rotations. At most :data:`MAX_SWEEPS` sweeps are allowed per eigenvalue.

    Raises
    ------
    ConvergenceError
        If some eigenvalue fails to converge; ``index`` is its position.
    """
    n = t.size
    d = [float(v) for v in t.diag]
    e = [float(v) for v in t.offdiag] + [0.0]
    # rows of zt are the eigenvectors under construction
    zt = np.eye(n)
    eps = np.finfo(float).eps
    # absolute floor: without it an off-diagonal between two exact zeros on
    # the diagonal can never pass the relative test
    floor = eps * eps * max(max(abs(v) for v in d), max((abs(v) for v in e), default=0.0))

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_SWEEPS:
                raise ConvergenceError(
                    f"eigenvalue {l} did not converge in {MAX_SWEEPS} sweeps", l
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = zt[i].copy()
                zt[i] = c * zi - s * zt[i + 1]
                zt[i + 1] = s * zi + c * zt[i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    values = np.array(d)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = fix_signs(zt[order].T)
    return EigenDecomposition(values, vectors, _residual(t.to_dense(), values, vectors))


def dense_sym_eig(a, sym_tol=1e-12) -> EigenDecomposition:
    """Eigendecomposition of a dense symmetric matrix (LAPACK ``syevd``)."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > sym_tol * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric within tolerance")
    a = 0.5 * (a + a.T)
    values, vectors = np.linalg.eigh(a)
    vectors = fix_signs(vectors)
    return EigenDecomposition(values, vectors, _residual(a, values, vectors))


@dataclass(frozen=True)
class LanczosResult:
    tridiag: SymTridiag
    basis: np.ndarray
    breakdown: bool


def lanczos(a, start, steps=None, breakdown_tol=1e-13) -> LanczosResult:
    """Lanczos tridiagonalization with full (twice-applied) reorthogonalization.

    Stops early when the next off-diagonal falls below
    ``breakdown_tol * ||A||_F``; the returned basis then spans an invariant
    subspace and ``breakdown`` is set.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    q = np.asarray(start, dtype=float)
    if abs(np.linalg.norm(q) - 1.0) > 1e-12:
        raise ValueError("start vector must have unit norm")
    steps = n if steps is None else min(steps, n)
    threshold = breakdown_tol * np.linalg.norm(a)

    basis = np.zeros((n, steps))
    alphas, betas = [], []
    basis[:, 0] = q
    breakdown = False
    for j in range(steps):
        w = a @ basis[:, j]
        alphas.append(float(basis[:, j] @ w))
        for _ in range(2):
            w -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ w)
        if j == steps - 1:
            break
        beta = float(np.linalg.norm(w))
        if beta <= threshold:
            breakdown = True
            break
        betas.append(beta)
        basis[:, j + 1] = w / beta
    k = len(alphas)
    return LanczosResult(SymTridiag(alphas, betas), basis[:, :k], breakdown)


def golub_welsch(rec, m):
    """Nodes and weights of the ``m``-point Gauss rule of a recurrence.

    ``rec`` is a :class:`heunlim.orthopoly.RecurrencePair`; the rule
    integrates polynomials of degree ``<= 2m - 1`` exactly against the
    measure of total mass ``rec.mass``.
    """
    if m < 1:
        raise ValueError("need at least one node")
    if m > rec.b.size:
        raise ValueError(f"recurrence only covers {rec.b.size} terms, asked for {m}")
    u = np.asarray(rec.u[1:m], dtype=float)
    if np.any(u <= 0):
        raise ValueError("recurrence coefficients u_n must be positive")
    eig = sym_tridiag_eig(SymTridiag(rec.b[:m], np.sqrt(u)))
    weights = rec.mass * eig.vectors[0] ** 2
    return eig.values, weights
