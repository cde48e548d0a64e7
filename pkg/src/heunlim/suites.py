"""Named invariant suites run by ``heunlim verify``.

Each suite draws its random parameters from a seeded generator and returns a
list of :class:`Check` records (name, measured residual, tolerance). The
suites are thin: all the mathematics lives in the other modules.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from . import algebra, heun, limiting, operators, orthopoly
from .linalg import offband_leakage

__all__ = ["Check", "SUITES", "DEFAULT_TOLERANCES", "run_suite", "moment_oracle"]

DEFAULT_TOLERANCES = {
    "recurrence": 1e-9,
    "bispectral": 1e-10,
    "hahn_eigs": 1e-9,
    "leonard": 1e-10,
    "explicit_m": 1e-10,
    "heun_match": 1e-10,
    "heun_hahn": 1e-11,
    "degree": 1e-12,
    "tridiag": 1e-10,
    "truncation_leak": 1e-11,
    "psi": 1e-9,
    "routes": 1e-9,
    "wilson_b": 1e-8,
    "closure": 1e-9,
    "embedding": 1e-8,
    "commute": 1e-10,
    "eigs": 1e-9,
    "angle": 1e-7,
    "kernel": 1e-10,
    "limit_case": 1e-12,
}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def as_dict(self):
        return {"name": self.name, "value": self.value, "tol": self.tol, "passed": self.passed}


def moment_oracle(alpha, beta, nmax, dps=60):
    """Monic recurrence coefficients from the moments, in high precision.

    Stieltjes procedure on coefficient vectors with the exact moments
    ``mu_k = prod_{j<k} (alpha+1+j)/(alpha+beta+2+j)`` of the normalized
    weight ``x^alpha (1-x)^beta`` on [0, 1].
    """
    with mpmath.workdps(dps):
        a, b = mpmath.mpf(alpha), mpmath.mpf(beta)
        mom = [mpmath.mpf(1)]
        for j in range(2 * nmax + 2):
            mom.append(mom[-1] * (a + 1 + j) / (a + b + 2 + j))

        def inner(p, q):
            return mpmath.fsum(pi * qj * mom[i + j] for i, pi in enumerate(p) for j, qj in enumerate(q))

        bs, us = [], [mpmath.mpf(0)]
        prev, cur = None, [mpmath.mpf(1)]
        norm_prev = None
        for n in range(nmax + 1):
            norm = inner(cur, cur)
            xcur = [mpmath.mpf(0)] + cur
            bn = inner(xcur, cur) / norm
            bs.append(bn)
            if n > 0:
                us.append(norm / norm_prev)
            nxt = [c - bn * (cur[i] if i < len(cur) else 0) for i, c in enumerate(xcur)]
            if prev is not None:
                un = us[-1]
                for i, c in enumerate(prev):
                    nxt[i] -= un * c
            prev, cur, norm_prev = cur, nxt, norm
        return np.array([float(v) for v in bs]), np.array([float(v) for v in us])


def _draw(rng, lo=-0.9, hi=3.0):
    return tuple(float(v) for v in rng.uniform(lo, hi, 2))


def orthopoly_suite(rng, tol):
    out = []
    worst = 0.0
    for _ in range(5):
        a, b = _draw(rng)
        rec = orthopoly.jacobi_recurrence(orthopoly.JacobiParams(a, b), 12)
        ob, ou = moment_oracle(a, b, 12)
        rel = max(
            float(np.max(np.abs(rec.b - ob) / np.maximum(np.abs(ob), 1e-300))),
            float(np.max(np.abs(rec.u[1:] - ou[1:]) / np.abs(ou[1:]))),
        )
        worst = max(worst, rel)
    out.append(Check("jacobi recurrence vs moment oracle", worst, tol["recurrence"]))
    a = float(rng.uniform(-0.9, 3.0))
    rec = orthopoly.jacobi_recurrence(orthopoly.JacobiParams(a, a), 12)
    out.append(Check("alpha = beta gives b_n = 1/2", float(np.max(np.abs(rec.b - 0.5))), 1e-15))
    for N in (4, 16):
        hp = orthopoly.HahnParams(*_draw(rng), N)
        basis = orthopoly.hahn_basis(hp)
        x_hahn = basis.vectors.T @ (np.arange(N + 1.0)[:, None] * basis.vectors)
        y = orthopoly.hahn_operator(hp)
        leak = max(
            offband_leakage(x_hahn) / np.linalg.norm(x_hahn),
            offband_leakage(y) / np.linalg.norm(y),
        )
        out.append(Check(f"bispectral leakage N={N}", leak, tol["bispectral"]))
        ev = np.sort(np.linalg.eigvals(basis.y_sym).real)
        rel = float(np.max(np.abs(ev - basis.mu)) / np.max(np.abs(basis.mu)))
        out.append(Check(f"Hahn eigenvalues N={N}", rel, tol["hahn_eigs"]))
        out.append(
            Check(
                f"Leonard duality and kernel routes N={N}",
                operators.leonard_check(operators.duality_data(basis)),
                tol["leonard"],
            )
        )
    return out


def _random_tau(rng):
    return heun.HeunTau(*(float(v) for v in rng.normal(size=5)))


def heun_suite(rng, tol):
    out = []
    p = orthopoly.JacobiParams(*_draw(rng))
    t = _random_tau(rng)
    t1 = heun.HeunTau(t.tau0, 1.0 - t.tau2, t.tau2, t.tau3, 0.0)
    K = 12
    alg = heun.algebraic_heun(operators.monomial_x(K), operators.monomial_hypergeom(p, K), t1)
    exp_m = heun.explicit_m(p, t1, K)
    w = min(alg.window, exp_m.window)
    gap = float(np.max(np.abs(alg.matrix[:, : w + 1] - exp_m.matrix[:, : w + 1])))
    out.append(Check("algebraic M vs closed form", gap / np.max(np.abs(alg.block())), tol["explicit_m"]))
    m = heun.match_heun_params(t, p, K, tol=np.inf)
    out.append(Check("Heun parameter match", m.residual, tol["heun_match"]))

    worst_hh = worst_deg = 0.0
    for _ in range(3):
        hp = orthopoly.HahnParams(*_draw(rng), 10)
        tt = _random_tau(rng)
        w_op = heun.heun_hahn(tt, hp, rtol=np.inf)
        ref = heun.algebraic_heun(
            operators.grid_x(10), operators.grid_y(orthopoly.hahn_operator(hp)), tt
        )
        worst_hh = max(
            worst_hh, float(np.max(np.abs(w_op.matrix - ref.matrix)) / np.max(np.abs(ref.matrix)))
        )
        worst_deg = max(worst_deg, float(np.max(heun.degree_excess_grid(w_op))))
    out.append(Check("Heun-Hahn factored vs tau form", worst_hh, tol["heun_hahn"]))
    out.append(Check("difference Heun raises degree by one", worst_deg, tol["degree"]))

    mj, rec = heun.jacobi_heun_operator(p, t, 14)
    act = heun.tridiagonal_action(mj, t, rec, orthopoly.jacobi_eigenvalues(p, 15), tol=np.inf)
    out.append(
        Check(
            "Jacobi-basis tridiagonality",
            act.leakage / np.linalg.norm(mj.block()),
            tol["tridiag"],
        )
    )
    for N in (3, 5):
        td = heun.truncation_setup(p, N)
        mt = heun.truncated_m(td, p)
        leak = float(np.max(np.abs(mt.matrix[N + 1 :, : N + 1])))
        out.append(Check(f"truncation leakage N={N}", leak, tol["truncation_leak"]))
        ex = heun.wilson_expansion(td, p, N)
        out.append(Check(f"expansion routes N={N}", ex.route_gap, tol["routes"]))
        bgap = float(np.max(np.abs(ex.B - ex.B_closed)) / max(np.max(np.abs(ex.B_closed)), 1.0))
        out.append(Check(f"Wilson B_k N={N}", bgap, tol["wilson_b"]))
    return out


def algebra_suite(rng, tol):
    out = []
    hp = orthopoly.HahnParams(*_draw(rng), 8)
    f, s = algebra.hahn_algebra_check(hp)
    out.append(Check("Hahn algebra closure", max(f.residual, s.residual), tol["closure"]))
    f, s, _, _ = algebra.cubic_closure_hahn(_random_tau(rng), hp)
    out.append(Check("cubic closure", max(f.residual, s.residual), tol["closure"]))
    t = _random_tau(rng)
    t = heun.HeunTau(0.0, t.tau1, t.tau2, t.tau3, 0.0)
    reps = algebra.racah_embedding_jacobi(t, orthopoly.JacobiParams(*_draw(rng)), 16)
    out.append(Check("Racah embedding (K=16)", max(r.residual for r in reps), tol["embedding"]))
    worst_e = 0.0
    for sign in (1.0, -1.0):
        a = float(rng.normal())
        tt = heun.HeunTau(float(rng.normal()), a, -a, float(rng.normal()), sign * -a)
        _, _, e1, e2 = algebra.cubic_closure_hahn(tt, hp)
        worst_e = max(worst_e, abs(e1), abs(e2))
    out.append(Check("e1, e2 vanish for tau1+tau2=0, tau2=+-tau4", worst_e, tol["closure"]))
    worst_w = 0.0
    for _ in range(3):
        g, e = (float(v) for v in rng.normal(size=2))
        for f, s in algebra.w_pair_checks(hp, g, e).values():
            worst_w = max(worst_w, f.residual, s.residual)
    out.append(Check("{Y, W+, W-} Racah closure", worst_w, tol["closure"]))
    return out


def limiting_suite(rng, tol):
    out = []
    N = 16
    hp = orthopoly.HahnParams(*_draw(rng), N)
    basis = orthopoly.hahn_basis(hp)
    worst_c = worst_e = worst_a = worst_k = 0.0
    for _ in range(6):
        j1, j2 = (int(v) for v in rng.integers(0, N, 2))
        c = limiting.LimitingConfig(hp, j1, j2)
        r = limiting.solve(c, basis, commute_tol=np.inf)
        sol = r.commuting
        worst_c = max(worst_c, max(sol.commutator_residuals) / sol.m_norm)
        worst_e = max(worst_e, r.eigenvalue_gap)
        worst_a = max(worst_a, r.eigenvector_agreement)
        k = limiting.kernel_matrix(c, basis, tol=np.inf)
        worst_k = max(worst_k, k.route_gap, k.direct_gap)
    out.append(Check("[M, pi1], [M, pi2] / ||M||", worst_c, tol["commute"]))
    out.append(Check("V1 eigenvalues direct vs via M", worst_e, tol["eigs"]))
    out.append(Check("V1 eigenvector angles", worst_a, tol["angle"]))
    out.append(Check("kernel routes", worst_k, tol["kernel"]))
    j1 = int(rng.integers(0, N))
    pi1, pi2 = limiting.projections(limiting.LimitingConfig(hp, j1, N), basis)
    v1 = limiting.limiting_ops(pi1, pi2)[0].matrix
    out.append(Check("J2 = N gives V1 = pi1", float(np.max(np.abs(v1 - pi1.matrix))), tol["limit_case"]))
    return out


SUITES = {
    "orthopoly": orthopoly_suite,
    "heun": heun_suite,
    "algebra": algebra_suite,
    "limiting": limiting_suite,
}


def run_suite(name, seed, tolerances=None):
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    names = list(SUITES) if name == "all" else [name]
    results = {}
    for n in names:
        rng = np.random.default_rng([seed, list(SUITES).index(n)])
        results[n] = SUITES[n](rng, tol)
    return results
