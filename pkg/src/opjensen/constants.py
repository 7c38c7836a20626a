"""Correction constants delta, zeta, beta.

All operator constants reduce to the same problem: maximize

    q(x) = <P x, x> - <Q x, x> <R x, x>

over complex unit vectors. :func:`maximize_quartic_form` does this by
multistart projected gradient ascent; :func:`brute_force_quartic_dim2` is an
independent grid oracle for ``d = 2``. The scalar constant beta is a 1-d
concave maximization solved by bisection on the subgradient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, NumericalError
from .matcore import (
    SpectralInterval,
    congruence,
    hermitian,
    inv,
    inv_sqrt,
    quad_form,
    require_strictly_positive,
    sqrtm_psd,
)
from .posmaps import as_family, congruence_family, family_apply_sum, require_unital
from .scalarfun import ConvexScalarFunction, builtin, subgradient_operator

ARMIJO_C = 0.5
MAX_HALVINGS = 50
STALL_EPS = 1e-15
STALL_GRAD = 1e-6


@dataclass(frozen=True)
class OptOptions:
    restarts: int = 64
    max_iters: int = 500
    seed: int = 0
    tol: float = 1e-10

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class SphereOptResult:
    value: float
    maximizer: np.ndarray
    restarts_used: int
    best_restart_values: list[float]
    converged: bool
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "maximizer": [[float(z.real), float(z.imag)] for z in self.maximizer],
            "restarts_used": self.restarts_used,
            "converged": self.converged,
            "iterations": self.iterations,
        }


@dataclass
class CorrectionConstants:
    delta: float | None = None
    zeta: float | None = None
    beta: float | None = None
    witnesses: dict = field(default_factory=dict)
    method: str = "multistart"

    def to_dict(self) -> dict:
        out = {"delta": self.delta, "zeta": self.zeta, "beta": self.beta, "method": self.method}
        wit = {}
        for key, w in self.witnesses.items():
            wit[key] = w.to_dict() if isinstance(w, SphereOptResult) else w
        out["witnesses"] = wit
        return out

    def merge(self, other: "CorrectionConstants") -> "CorrectionConstants":
        """Fields of ``other`` fill the ones absent here."""
        return CorrectionConstants(
            delta=self.delta if self.delta is not None else other.delta,
            zeta=self.zeta if self.zeta is not None else other.zeta,
            beta=self.beta if self.beta is not None else other.beta,
            witnesses={**other.witnesses, **self.witnesses},
            method=self.method,
        )


# ---------------------------------------------------------------------------
# sphere optimization


def quartic_objective(P, Q, R, X) -> np.ndarray:
    """``q`` at a unit vector or at each row of ``X``."""
    return quad_form(P, X) - quad_form(Q, X) * quad_form(R, X)


def _start_vector(seed: int, index: int, d: int) -> np.ndarray:
    rng = np.random.default_rng([seed, index])
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def _rows_normalized(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def maximize_quartic_form(P, Q, R, opts: OptOptions | None = None, **kw) -> SphereOptResult:
    """Multistart projected gradient ascent for ``q`` on the unit sphere.

    Starts are ``opts.restarts`` pseudo-random unit vectors, each derived
    from ``(seed, index)`` alone, plus every eigenvector of ``P``, ``Q`` and
    ``R``. All starts are advanced together as rows of one array; each row
    keeps its own backtracking step: the first trial is twice the step
    accepted last time (1.0 initially), halved until the Armijo condition
    holds. ``ARMIJO_C = 0.5`` keeps accepted steps below ``1/L`` so iterates
    cannot bounce symmetrically across a maximum.
    """
    opts = opts or OptOptions(**kw)
    P, Q, R = (np.asarray(M, dtype=complex) for M in (P, Q, R))
    d = P.shape[0]
    if not (P.shape == Q.shape == R.shape == (d, d)):
        raise DimensionError(f"P, Q, R must share a square shape, got {P.shape}, {Q.shape}, {R.shape}")

    starts = [_start_vector(opts.seed, k, d) for k in range(opts.restarts)]
    for M in (P, Q, R):
        starts.extend(np.linalg.eigh(M)[1].T)
    X = _rows_normalized(np.array(starts, dtype=complex))

    def evaluate(Y):
        # overflow is reported below as a NumericalError, not as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            PY, QY, RY = Y @ P.T, Y @ Q.T, Y @ R.T
            p = np.real(np.sum(Y.conj() * PY, axis=1))
            qv = np.real(np.sum(Y.conj() * QY, axis=1))
            r = np.real(np.sum(Y.conj() * RY, axis=1))
            return p - qv * r, PY, QY, RY, qv, r

    vals, PX, QX, RX, qv, r = evaluate(X)
    start_vals = vals.copy()
    active = np.ones(len(X), dtype=bool)
    converged = np.zeros(len(X), dtype=bool)
    last_step = np.full(len(X), 0.5)
    iters = 0
    for iters in range(1, opts.max_iters + 1):
        if not np.all(np.isfinite(vals)):
            bad = int(np.argmax(~np.isfinite(vals)))
            raise NumericalError(
                f"non-finite objective at restart {bad} (iterate norm {np.linalg.norm(X[bad]):.3e}, "
                f"|P|={np.abs(P).max():.3e}, |Q|={np.abs(Q).max():.3e}, |R|={np.abs(R).max():.3e})"
            )
        G = 2.0 * (PX - r[:, None] * QX - qv[:, None] * RX)
        D = G - np.real(np.sum(X.conj() * G, axis=1))[:, None] * X
        gnorm2 = np.real(np.sum(D.conj() * D, axis=1))
        newly = active & (np.sqrt(gnorm2) <= opts.tol * (1.0 + np.abs(vals)))
        converged |= newly
        active &= ~newly
        if not active.any():
            break

        idx = np.flatnonzero(active)
        step = 2.0 * last_step[idx]
        pending = np.ones(len(idx), dtype=bool)
        Xn = X[idx].copy()
        for _ in range(MAX_HALVINGS + 1):
            rows = idx[pending]
            Y = _rows_normalized(X[rows] + step[pending, None] * D[rows])
            vY = evaluate(Y)[0]
            ok = vY >= vals[rows] + ARMIJO_C * step[pending] * gnorm2[rows]
            sub = np.flatnonzero(pending)
            Xn[sub[ok]] = Y[ok]
            pending[sub[ok]] = False
            step[sub[~ok]] *= 0.5
            if not pending.any():
                break
        moved = idx[~pending]
        X[moved] = Xn[~pending]
        last_step[moved] = step[~pending]
        before = vals[moved]
        vals[moved], PX[moved], QX[moved], RX[moved], qv[moved], r[moved] = evaluate(X[moved])
        # no acceptable step, or a gain lost in rounding: the row has stalled
        floor = STALL_EPS * (1.0 + np.abs(vals))
        stalled = np.zeros(len(X), dtype=bool)
        stalled[idx[pending]] = True
        stalled[moved] = (vals[moved] - before) <= floor[moved]
        converged |= stalled & (np.sqrt(gnorm2) <= STALL_GRAD * (1.0 + np.abs(vals)))
        active &= ~stalled

    best = int(np.argmax(vals))
    x = X[best]
    # remove the irrelevant global phase: make the largest component real positive
    k = int(np.argmax(np.abs(x)))
    x = x * (abs(x[k]) / x[k])
    x = x / np.linalg.norm(x)
    value = float(quartic_objective(P, Q, R, x))
    if value < start_vals.max() - 1e-12 * (1.0 + abs(value)):
        raise NumericalError("ascent finished below its best starting value")
    return SphereOptResult(
        value=value,
        maximizer=x,
        restarts_used=len(X),
        best_restart_values=sorted((float(v) for v in vals), reverse=True),
        converged=bool(converged[best]),
        iterations=iters,
    )


def brute_force_quartic_dim2(P, Q, R, grid: int = 1000) -> float:
    """Grid maximization of ``q`` over ``x = (cos t, e^{i phi} sin t)``.

    ``q`` is invariant under a global phase, so this two-parameter family
    covers the whole sphere of ``C^2``. A ``grid x grid`` lattice on
    ``[0, pi/2] x [0, 2 pi)`` is followed by one refinement lattice of the
    same size on the cell neighbourhood of the best point.
    """
    P, Q, R = (np.asarray(M, dtype=complex) for M in (P, Q, R))
    if P.shape != (2, 2) or Q.shape != (2, 2) or R.shape != (2, 2):
        raise DimensionError("brute_force_quartic_dim2 needs 2x2 matrices")
    if grid < 100:
        raise ValueError("grid must be >= 100")

    def q_on(theta, phi):
        c, s = np.cos(theta), np.sin(theta)
        e = np.exp(1j * phi)

        def form(M):
            return M[0, 0].real * c * c + M[1, 1].real * s * s + 2 * np.real(M[0, 1] * e) * c * s

        return form(P) - form(Q) * form(R)

    theta = np.linspace(0, np.pi / 2, grid)
    phi = np.linspace(0, 2 * np.pi, grid, endpoint=False)
    vals = q_on(theta[:, None], phi[None, :])
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])
    dt, dp = theta[1] - theta[0], phi[1] - phi[0]
    t2 = np.clip(np.linspace(theta[i] - dt, theta[i] + dt, grid), 0, np.pi / 2)
    p2 = np.linspace(phi[j] - dp, phi[j] + dp, grid)
    return max(best, float(q_on(t2[:, None], p2[None, :]).max()))


# ---------------------------------------------------------------------------
# constants


def _check_spectra(fn: ConvexScalarFunction, ops) -> None:
    for k, A in enumerate(ops):
        w = np.linalg.eigvalsh(A)
        try:
            fn.domain.clamp(w)
        except DomainError as exc:
            raise DomainError(f"operator {k}: {exc}") from None
        if fn.requires_strict_positivity and w[0] < 1e-8:
            raise DomainError(f"operator {k} must be strictly positive for {fn.label} (min eigenvalue {w[0]:.3e})")


def _opts(opts, kw) -> OptOptions:
    if opts is None:
        return OptOptions(**kw)
    return opts


def delta_forms(fn: ConvexScalarFunction, F, ops):
    """``P, Q, R`` of the reverse-inequality constant."""
    F = as_family(F)
    ops = [hermitian(A) for A in ops]
    _check_spectra(fn, ops)
    C = [subgradient_operator(fn, A) for A in ops]
    P = family_apply_sum(F, [hermitian(c @ A) for c, A in zip(C, ops)])
    Q = family_apply_sum(F, ops)
    R = family_apply_sum(F, C)
    return P, Q, R


def zeta_forms(fn: ConvexScalarFunction, F, ops):
    """``P, Q, R`` of the forward-inequality constant, built on ``T = sum Phi_i(A_i)``."""
    F = as_family(F)
    ops = [hermitian(A) for A in ops]
    _check_spectra(fn, ops)
    T = family_apply_sum(F, ops)
    C = subgradient_operator(fn, T)
    return hermitian(C @ T), T, C


def compute_delta(fn: ConvexScalarFunction, F, ops, opts: OptOptions | None = None, **kw) -> CorrectionConstants:
    """Constant of ``sum Phi_i(f(A_i)) <= f(sum Phi_i(A_i)) + delta``."""
    require_unital(F)
    res = maximize_quartic_form(*delta_forms(fn, F, ops), _opts(opts, kw))
    return CorrectionConstants(delta=res.value, witnesses={"delta": res})


def compute_zeta(fn: ConvexScalarFunction, F, ops, opts: OptOptions | None = None, **kw) -> CorrectionConstants:
    """Constant of ``f(sum Phi_i(A_i)) <= sum Phi_i(f(A_i)) + zeta``."""
    require_unital(F)
    res = maximize_quartic_form(*zeta_forms(fn, F, ops), _opts(opts, kw))
    return CorrectionConstants(zeta=res.value, witnesses={"zeta": res})


def compute_beta(fn: ConvexScalarFunction, iv: SpectralInterval, tol: float = 1e-10) -> CorrectionConstants:
    """Largest gap between the chord of ``f`` over ``[m, M]`` and ``f`` itself.

    The gap ``g(t) = chord(t) - f(t)`` is concave with nonincreasing
    supergradient ``k - C_t`` (``k`` the chord slope), so its maximizer is
    where ``C_t`` crosses ``k``. Bisection on that sign locates ``t`` to
    ``tol``; comparing values of ``g`` instead would stall near ``sqrt(eps)``
    because ``g`` is flat at its peak.
    """
    m, M = float(iv.m), float(iv.M)
    if not fn.domain.contains_interval(m, M):
        raise DomainError(f"interval [{m}, {M}] is not inside the domain {fn.domain} of {fn.label}")
    if M - m <= 0:
        return CorrectionConstants(beta=0.0, witnesses={"beta": {"t": m}}, method="bisection")
    fm, fM = fn(m), fn(M)
    slope = (fM - fm) / (M - m)
    intercept = (M * fm - m * fM) / (M - m)

    def gap(t):
        return slope * t + intercept - fn(t)

    a, b = m, M
    while b - a > tol * max(1.0, abs(a), abs(b)):
        c = (a + b) / 2
        if c in (a, b):
            break
        if fn.subgradient(c) < slope:
            a = c
        else:
            b = c
    t = (a + b) / 2
    val, t = max((gap(t), t), (0.0, m))
    return CorrectionConstants(beta=float(val), witnesses={"beta": {"t": float(t)}}, method="bisection")


# ---------------------------------------------------------------------------
# single-map propositions


def choi_forms(phi, A, B):
    """``P = S Phi(B A^-1 B) S`` and ``Q = S Phi(B) S`` with ``S = Phi(A)^{-1/2}``."""
    F = as_family(phi)
    A, B = hermitian(A), hermitian(B)
    require_strictly_positive(A, 1e-8, "A")
    PhiA = F(A)
    S = inv_sqrt(PhiA)
    P = congruence(S, F(hermitian(B @ inv(A) @ B)))
    Q = congruence(S, F(B))
    return P, Q


def compute_choi_delta(phi, A, B, opts: OptOptions | None = None, **kw) -> CorrectionConstants:
    """Constant of ``Phi(B A^-1 B) <= Phi(B) Phi(A)^-1 Phi(B) + 2 delta Phi(A)``."""
    require_unital(phi)
    P, Q = choi_forms(phi, A, B)
    res = maximize_quartic_form(P, Q, Q, _opts(opts, kw))
    return CorrectionConstants(delta=res.value, witnesses={"delta": res})


def choi_psi_instance(phi, A, B):
    """The unital family ``Psi`` and operator ``T`` that turn the Choi constant into
    a square-function constant.

    ``Psi(X) = Phi(A)^{-1/2} Phi(A^{1/2} X A^{1/2}) Phi(A)^{-1/2}`` and
    ``T = A^{-1/2} B A^{-1/2}``; ``Psi(T^2)`` and ``Psi(T)`` are the ``P`` and ``Q``
    of :func:`choi_forms`.
    """
    F = as_family(phi)
    A, B = hermitian(A), hermitian(B)
    psi = congruence_family(F, sqrtm_psd(A), inv_sqrt(F(A)))
    T = congruence(inv_sqrt(A), B)
    return psi, T


def choi_delta_via_square(phi, A, B, opts: OptOptions | None = None, **kw) -> float:
    """Half the square-function delta under ``Psi``; must agree with :func:`compute_choi_delta`."""
    psi, T = choi_psi_instance(phi, A, B)
    # T may be indefinite; t^2 with slope 2t is convex on the whole line
    square = ConvexScalarFunction(
        "power", (2.0,), builtin("identity").domain, f=lambda t: t * t, slope=lambda t: 2 * t,
        monotone="none",
    )
    return compute_delta(square, psi, [T] * len(psi), opts, **kw).delta / 2
