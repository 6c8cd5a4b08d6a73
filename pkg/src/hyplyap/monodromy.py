"""Monodromy matrices of the hypergeometric equation.

The triple (M0, M1, Minf) around the punctures 0, 1, infinity satisfies
Minf M0 M1 = Id.  For generic real parameters M0 can be diagonalized,
M1 - Id has rank one, and the whole triple is recovered from the
parameter lists by one small linear solve.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidParams, SingularMatrix, SingularSystem
from .params import HGParams

#: condition estimate above which the construction refuses to continue
CONDITION_LIMIT = 1e12

#: default tolerance on || Minf M0 M1 - Id ||_inf
RELATION_TOL = 1e-9


def unit_circle(t):
    """e^{2 pi i t}, vectorized."""
    return np.exp(2j * np.pi * np.asarray(t, dtype=float))


def det_diag_plus_rank_one(d: Sequence[complex], x: Sequence[complex]) -> complex:
    """Determinant of diag(d) + 1 x^t where 1 is the all-ones vector.

    Evaluates the expanded form  prod(d) + sum_i x_i prod_{j != i} d_j,
    which is the limit value of  prod(d) * (1 + sum x_i/d_i)  and stays
    finite when some d_i vanish.  Total function.
    """
    d = np.asarray(d, dtype=complex).ravel()
    x = np.asarray(x, dtype=complex).ravel()
    n = d.size
    prefix = np.empty(n + 1, dtype=complex)
    suffix = np.empty(n + 1, dtype=complex)
    prefix[0] = 1.0
    suffix[n] = 1.0
    for i in range(n):
        prefix[i + 1] = prefix[i] * d[i]
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] * d[i]
    return complex(prefix[n] + np.sum(x * prefix[:n] * suffix[1:]))


@dataclass(frozen=True)
class ConstructionTrace:
    """Intermediate data of the generic construction, kept for auditing."""

    N: np.ndarray                # N[i, j] = 1 / (e^{2pi i beta_j} - e^{2pi i alpha_i})
    w: np.ndarray                # solves w^t N = 1^t
    condition_estimate: float


@dataclass(frozen=True)
class MonodromySet:
    """Monodromy triple with the relation Minf M0 M1 = Id."""

    n: int
    m0: np.ndarray
    m1: np.ndarray
    minf: np.ndarray
    trace: Optional[ConstructionTrace] = None

    def relation_residual(self) -> float:
        return float(
            np.abs(self.minf @ self.m0 @ self.m1 - np.eye(self.n)).max()
        )


def _numerical_rank(m: np.ndarray, tol: float = 1e-8) -> int:
    """Rank counting singular values above tol relative to the largest."""
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def build(params: HGParams) -> MonodromySet:
    """Construct the monodromy triple from parameter lists.

    M0 = diag(e^{2 pi i alpha}); the row vector w is obtained from the
    linear system w^t N = 1^t with N as in ConstructionTrace, and then

        M1 = Id + M0^{-1} 1 w^t,   Minf = (M0 M1)^{-1}.

    Raises SingularSystem when the condition estimate of N exceeds
    CONDITION_LIMIT, which signals nearly confluent parameters.
    """
    if not isinstance(params, HGParams):
        params = HGParams(*params)
    n = params.n
    ea = unit_circle(params.alpha)
    eb = unit_circle(params.beta)
    N = 1.0 / (eb[None, :] - ea[:, None])
    cond = float(np.linalg.cond(N))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularSystem(f"matrix N has condition estimate {cond:.3e}")
    # w^t N = 1^t  <=>  N^t w = 1, solved by partial-pivoting LU
    lu, piv = scipy.linalg.lu_factor(N.T)
    w = scipy.linalg.lu_solve((lu, piv), np.ones(n, dtype=complex))
    m0 = np.diag(ea)
    # M0^{-1} 1 = conj(e^{2 pi i alpha}) since the diagonal is unimodular
    m1 = np.eye(n, dtype=complex) + np.outer(np.conj(ea), w)
    minf = np.linalg.inv(m0 @ m1)
    ms = MonodromySet(n, m0, m1, minf, ConstructionTrace(N, w, cond))
    residual = ms.relation_residual()
    if residual > RELATION_TOL * max(1.0, cond):
        raise SingularSystem(
            f"relation residual {residual:.3e} exceeds tolerance at condition {cond:.3e}"
        )
    return ms


def from_explicit(m0, m1) -> MonodromySet:
    """Wrap explicitly given M0, M1 (e.g. the Calabi-Yau generators).

    Minf is (M0 M1)^{-1}, so the cusp relation holds by construction.
    Unimodularity of the M0/Minf eigenvalues is checked and reported as
    a warning, not enforced; repeated eigenvalues are fine here.
    """
    m0 = np.asarray(m0, dtype=complex)
    m1 = np.asarray(m1, dtype=complex)
    if m0.shape != m1.shape or m0.ndim != 2 or m0.shape[0] != m0.shape[1]:
        raise InvalidParams(f"expected equal square matrices, got {m0.shape} and {m1.shape}")
    prod = m0 @ m1
    if _numerical_rank(prod, tol=1e-13) < prod.shape[0]:
        raise SingularMatrix("m0 @ m1 is not invertible")
    try:
        minf = np.linalg.inv(prod)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("m0 @ m1 is not invertible") from exc
    dev = _eigenvalue_modulus_deviation(m0, minf)
    if dev > 1e-8:
        warnings.warn(
            f"eigenvalue moduli of M0/Minf deviate from 1 by {dev:.3e}",
            stacklevel=2,
        )
    return MonodromySet(m0.shape[0], m0, m1, minf, trace=None)


def _eigenvalue_modulus_deviation(*mats) -> float:
    return max(
        float(np.abs(np.abs(np.linalg.eigvals(m)) - 1.0).max()) for m in mats
    )


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two finite point sets in the plane."""
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass(frozen=True)
class VerifyReport:
    relation_residual: float
    alpha_eig_distance: float      # Hausdorff, eig(M0) vs {e^{2 pi i alpha}}
    beta_eig_distance: float       # Hausdorff, eig(Minf) vs {e^{-2 pi i beta}}
    rank_m1_minus_id: int
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def verify(ms: MonodromySet, params: HGParams,
           relation_tol: float = RELATION_TOL,
           eig_tol: float = 1e-7) -> VerifyReport:
    """Check a monodromy set against the spectra predicted by the parameters."""
    if ms.n != params.n:
        raise InvalidParams(f"dimension mismatch: {ms.n} vs {params.n}")
    residual = ms.relation_residual()
    scale = 1.0
    if ms.trace is not None:
        scale = max(1.0, ms.trace.condition_estimate)
    da = _hausdorff(np.linalg.eigvals(ms.m0), unit_circle(params.alpha))
    db = _hausdorff(np.linalg.eigvals(ms.minf), np.conj(unit_circle(params.beta)))
    rank = _numerical_rank(ms.m1 - np.eye(ms.n))
    checks = {
        "relation": residual <= relation_tol * scale,
        "alpha_eigenvalues": da <= eig_tol * scale,
        "beta_eigenvalues": db <= eig_tol * scale,
        "rank_one": rank == 1,
    }
    return VerifyReport(residual, da, db, rank, checks)
