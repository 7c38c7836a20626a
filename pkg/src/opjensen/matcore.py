"""Hermitian matrix arithmetic, functional calculus and the Loewner order.

Hermitian matrices are plain complex ``numpy`` arrays. :func:`hermitian`
is the single entry point that validates and symmetrizes input; every other
function in the package assumes its arguments went through it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionError, DomainError, NumericalError, PositivityError

HERMITIAN_DEFECT_TOL = 1e-8
DOMAIN_TOL = 1e-9


def hermitian(X, defect_tol: float = HERMITIAN_DEFECT_TOL) -> np.ndarray:
    """Return ``(X + X*)/2`` as a read-only complex array.

    The pre-symmetrization defect ``max|X - X*|`` is compared against
    ``defect_tol * max(1, max|X|)``; larger defects raise rather than being
    silently averaged away.
    """
    X = np.array(X, dtype=complex)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] < 1:
        raise DimensionError(f"expected a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NumericalError("matrix has non-finite entries")
    diff = np.abs(X - X.conj().T)
    defect = float(diff.max())
    scale = max(1.0, float(np.abs(X).max()))
    if defect > defect_tol * scale:
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise DimensionError(
            f"matrix is not Hermitian: entry ({i},{j}) differs from conj of ({j},{i}) by {defect:.3e}"
        )
    H = (X + X.conj().T) / 2
    H.flags.writeable = False
    return H


def identity(d: int) -> np.ndarray:
    return hermitian(np.eye(d))


def quad_form(M: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``<M x, x>`` for a single vector or for each row of a 2-d array."""
    X = np.asarray(X)
    if X.ndim == 1:
        return float(np.real(np.vdot(X, M @ X)))
    return np.real(np.einsum("ni,ij,nj->n", X.conj(), M, X))


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


@dataclass(frozen=True)
class SpectralInterval:
    m: float
    M: float

    def __post_init__(self):
        if not self.m <= self.M:
            raise DomainError(f"spectral interval needs m <= M, got [{self.m}, {self.M}]")

    @classmethod
    def hull(cls, *mats: np.ndarray) -> "SpectralInterval":
        """Smallest interval containing the spectra of all ``mats``."""
        eigs = np.concatenate([np.linalg.eigvalsh(A) for A in mats])
        return cls(float(eigs.min()), float(eigs.max()))


@dataclass(frozen=True)
class Interval:
    """A real interval, possibly unbounded, with open/closed endpoints."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise DomainError(f"empty interval ({self.lo}, {self.hi})")
        # infinite endpoints are never closed
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_closed", False)

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"

    def contains(self, t, tol: float = 0.0) -> np.ndarray | bool:
        t = np.asarray(t, dtype=float)
        lo_ok = t >= self.lo - tol if self.lo_closed else t > self.lo
        hi_ok = t <= self.hi + tol if self.hi_closed else t < self.hi
        ok = lo_ok & hi_ok
        return bool(ok) if ok.ndim == 0 else ok

    def contains_interval(self, m: float, M: float) -> bool:
        return bool(self.contains(m, DOMAIN_TOL)) and bool(self.contains(M, DOMAIN_TOL))

    def clamp(self, t, tol: float = DOMAIN_TOL):
        """Pull points lying within ``tol`` outside a closed endpoint back onto it.

        Raises :class:`DomainError` naming the first offending value otherwise.
        """
        arr = np.asarray(t, dtype=float)
        bad = ~np.asarray(self.contains(arr, tol))
        if np.any(bad):
            offender = float(np.atleast_1d(arr)[np.atleast_1d(bad)][0])
            raise DomainError(f"value {offender!r} lies outside the interval {self}")
        out = np.clip(arr, self.lo, self.hi)
        return float(out) if out.ndim == 0 else out


def spectral_decompose(A: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition with ascending eigenvalues and orthonormal columns."""
    A = np.asarray(A)
    try:
        w, U = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(A) if np.all(np.isfinite(A)) else math.inf
        raise NumericalError(
            f"eigendecomposition failed (shape {A.shape}, max|entry| "
            f"{np.abs(A).max():.3e}, condition {cond:.3e}): {exc}"
        ) from exc
    return SpectralDecomposition(w, U)


def apply_function(
    A: np.ndarray,
    g: Callable[[np.ndarray], np.ndarray],
    domain: Interval | None = None,
    tol: float = DOMAIN_TOL,
) -> np.ndarray:
    """Functional calculus ``g(A) = U diag(g(lambda)) U*``.

    ``g`` is called once on the vector of eigenvalues. When ``domain`` is
    given, eigenvalues are checked against it (and clamped onto closed
    endpoints within ``tol``).
    """
    w, U = spectral_decompose(A)
    if domain is not None:
        try:
            w = domain.clamp(w, tol)
        except DomainError as exc:
            raise DomainError(f"spectrum of operator not inside {domain}: {exc}") from None
    gw = np.asarray(g(w), dtype=float)
    if not np.all(np.isfinite(gw)):
        raise NumericalError(f"function produced non-finite values on eigenvalues {w}")
    return hermitian((U * gw) @ U.conj().T)


def loewner_leq(A: np.ndarray, B: np.ndarray, tol: float = 1e-10) -> tuple[bool, float]:
    """Check ``A <= B``; the margin is the smallest eigenvalue of ``B - A``."""
    if np.shape(A) != np.shape(B):
        raise DimensionError(f"dimension mismatch: {np.shape(A)} vs {np.shape(B)}")
    margin = float(np.linalg.eigvalsh(hermitian(np.asarray(B) - np.asarray(A)))[0])
    return margin >= -tol, margin


def min_eig(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(A)[0])


def require_strictly_positive(A: np.ndarray, eps: float = 1e-8, what: str = "matrix") -> None:
    lam = min_eig(A)
    if lam < eps:
        raise PositivityError(f"{what} is not strictly positive: minimum eigenvalue {lam:.3e} < {eps:g}")


def sqrtm_psd(A: np.ndarray) -> np.ndarray:
    return apply_function(A, lambda w: np.sqrt(np.maximum(w, 0.0)))


def inv_sqrt(A: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    require_strictly_positive(A, eps)
    return apply_function(A, lambda w: w ** -0.5)


def inv(A: np.ndarray, eps: float = 1e-8) -> np.ndarray:
    """Inverse of a strictly positive matrix, via the functional calculus."""
    require_strictly_positive(A, eps)
    return apply_function(A, lambda w: 1.0 / w)


def congruence(S: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``S X S`` for Hermitian ``S``, returned Hermitian."""
    return hermitian(S @ X @ S)
