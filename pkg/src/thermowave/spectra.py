"""Spectra of the discrete dynamics: eigenvalues, residual certificates,
distance-to-axis tables, and an independent per-mode oracle.

The dense solver is LAPACK's nonsymmetric path (balancing + Hessenberg
reduction + shifted QR) through ``scipy.linalg.eig``; every reported
eigenvalue carries a residual certificate ``||A v - lambda v|| / ||A||_F`` and
is refined by one inverse-iteration step if the certificate misses the
requested tolerance.

For the weakly coupled system the dynamic is block-diagonal per mode, and each
3x3 mode block has characteristic polynomial

    lambda^3 + j^2 lambda^2 + (j^2 + g^2) lambda + j^4 .

``per_mode_eigenvalues`` solves these cubics with a bracketed scalar root
finder plus quadratic deflation, entirely independent of the QR path, and is
used as the equivalence oracle for the dense solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq, linear_sum_assignment

from .assembly import DiscreteDynamic


class SpectrumError(RuntimeError):
    """Eigensolver failed to converge or certify on a named matrix."""


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of one dynamic with residuals and axis-distance summary."""

    eigenvalues: np.ndarray   # complex, 3n entries, deterministic order
    residuals: np.ndarray     # per-eigenvalue ||A v - lambda v|| / ||A||_F
    abscissa: float           # max Re(lambda)
    min_distance: float       # min(-Re(lambda))
    asymptote: float          # reference line -gamma^2 / 2
    system_id: int
    n: int
    gamma: float
    tol: float


def _inverse_iteration(A: np.ndarray, lam: complex, v: np.ndarray) -> np.ndarray:
    """One inverse-iteration sweep around lam; returns a unit vector."""
    m = A.shape[0]
    shift = lam + 1e3 * np.finfo(float).eps * max(1.0, abs(lam))
    M = A.astype(complex) - shift * np.eye(m)
    try:
        w = sla.solve(M, v)
    except np.linalg.LinAlgError:
        return v
    nrm = np.linalg.norm(w)
    return v if nrm == 0.0 else w / nrm


def compute_spectrum(dyn: DiscreteDynamic, tol: float = 1e-9) -> SpectrumReport:
    """Full spectrum of the dynamic with residual certification.

    Raises SpectrumError (naming the offending matrix) if some eigenpair
    cannot be certified to ``||A v - lambda v|| <= tol * ||A||_F`` even after
    inverse-iteration refinement.
    """
    if not (0.0 < tol <= 1e-6):
        raise ValueError(f"tol must lie in (0, 1e-6], got {tol}")
    A = dyn.matrix
    w, V = sla.eig(A)
    scale = np.linalg.norm(A)  # Frobenius
    resid = np.linalg.norm(A @ V - V * w, axis=0) / scale

    for k in np.nonzero(resid > tol)[0]:
        for _ in range(3):
            vk = _inverse_iteration(A, w[k], V[:, k])
            rk = np.linalg.norm(A @ vk - w[k] * vk) / scale
            if rk <= resid[k]:
                V[:, k], resid[k] = vk, rk
            if resid[k] <= tol:
                break
        if resid[k] > tol:
            raise SpectrumError(
                f"cannot certify eigenvalue {w[k]:.6g} of A_{dyn.system_id} "
                f"(n={dyn.n}, gamma={dyn.gamma:g}): residual {resid[k]:.3e} > {tol:g}"
            )

    # real matrix: spectrum must be closed under conjugation
    order = np.lexsort((w.imag, w.real))
    conj_order = np.lexsort((-w.imag, w.real))
    gap = np.abs(w[order] - np.conj(w[conj_order])).max()
    if gap > tol * max(1.0, scale):
        raise SpectrumError(
            f"conjugate-pair symmetry violated by {gap:.3e} on A_{dyn.system_id} "
            f"(n={dyn.n}, gamma={dyn.gamma:g})"
        )

    w, resid = w[order], resid[order]
    return SpectrumReport(
        eigenvalues=w,
        residuals=resid,
        abscissa=float(w.real.max()),
        min_distance=float((-w.real).min()),
        asymptote=-0.5 * dyn.gamma ** 2,
        system_id=dyn.system_id,
        n=dyn.n,
        gamma=dyn.gamma,
        tol=tol,
    )


def _cubic_roots(p: float, q: float, r: float) -> list[complex]:
    """Roots of x^3 + p x^2 + q x + r with p, q, r >= 0, r > 0.

    The real root is bracketed in [-(1 + max coeff), 0] and polished by two
    Newton steps; the remaining pair comes from the deflated quadratic.
    """
    f = lambda x: ((x + p) * x + q) * x + r
    lo = -(1.0 + max(p, q, r))
    rho = brentq(f, lo, 0.0, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)
    for _ in range(2):
        fv = ((rho + p) * rho + q) * rho + r
        dv = (3.0 * rho + 2.0 * p) * rho + q
        if dv != 0.0:
            rho -= fv / dv
    b = p + rho
    c = q + rho * b
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        s = np.sqrt(disc)
        return [complex(rho), complex((-b + s) / 2.0), complex((-b - s) / 2.0)]
    s = np.sqrt(-disc)
    return [complex(rho), complex(-b / 2.0, s / 2.0), complex(-b / 2.0, -s / 2.0)]


def per_mode_eigenvalues(n: int, gamma: float) -> np.ndarray:
    """Spectrum of the weakly coupled dynamic from its per-mode cubics.

    Valid for system 2 only, whose blocks decouple mode by mode.  Returned in
    the same deterministic order as ``compute_spectrum``.
    """
    if n < 1:
        raise ValueError(f"mode count must be >= 1, got {n}")
    out = []
    for j in range(1, n + 1):
        jj = float(j * j)
        out.extend(_cubic_roots(jj, jj + gamma * gamma, jj * jj))
    w = np.array(out, dtype=complex)
    return w[np.lexsort((w.imag, w.real))]


def match_eigenvalues(computed: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Distances |computed[i] - reference[sigma(i)]| under an optimal pairing.

    Uses the Hungarian assignment on the modulus-distance cost; falls back to
    greedy nearest-neighbour matching if the assignment solver fails.
    """
    if len(computed) != len(reference):
        raise ValueError("eigenvalue multisets must have equal size")
    cost = np.abs(computed[:, None] - reference[None, :])
    try:
        ri, ci = linear_sum_assignment(cost)
        return cost[ri, ci]
    except ValueError:
        free = list(range(len(reference)))
        dists = np.empty(len(computed))
        for i in range(len(computed)):
            k = int(np.argmin(cost[i, free]))
            dists[i] = cost[i, free[k]]
            free.pop(k)
        return dists


@dataclass(frozen=True)
class DistanceRow:
    n: int
    min_neg_re: float
    abscissa: float
    asymptote: float


def min_distance_table(system_id: int, gamma: float, n_list, tol: float = 1e-9,
                       paper_literal_blocks: bool = False) -> list[DistanceRow]:
    """Distance between the spectrum and the imaginary axis, one row per n."""
    from .coefficients import ModelParameters
    from .assembly import assemble_dynamic

    rows = []
    for n in n_list:
        rep = compute_spectrum(
            assemble_dynamic(ModelParameters(system_id, gamma, int(n)), paper_literal_blocks),
            tol=tol,
        )
        rows.append(DistanceRow(int(n), rep.min_distance, rep.abscissa, rep.asymptote))
    return rows
