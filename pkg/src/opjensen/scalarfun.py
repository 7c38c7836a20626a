"""Registry of convex scalar functions with a fixed subgradient selection.

Every function carries its interval, a slope selection ``s -> C_s`` that
satisfies the supporting-line inequality ``C_s (t - s) + f(s) <= f(t)``,
and a monotonicity tag. Slopes are the derivative where ``f`` is
differentiable and the midpoint of the subdifferential at kinks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .matcore import DOMAIN_TOL, Interval, apply_function

MONOTONE_KINDS = ("increasing", "decreasing", "none")


@dataclass(frozen=True)
class ConvexScalarFunction:
    name: str
    params: tuple[float, ...]
    domain: Interval
    f: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    slope: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    monotone: str = "none"
    requires_strict_positivity: bool = False

    def __post_init__(self):
        if self.monotone not in MONOTONE_KINDS:
            raise ValidationError(f"monotone must be one of {MONOTONE_KINDS}, got {self.monotone!r}")

    def __call__(self, t, tol: float = DOMAIN_TOL):
        t = self.domain.clamp(t, tol)
        out = self.f(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def subgradient(self, s, tol: float = DOMAIN_TOL):
        s = self.domain.clamp(s, tol)
        out = self.slope(np.asarray(s, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    @property
    def descriptor(self) -> dict:
        return {"name": self.name, "params": list(self.params)}

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{p:g}" for p in self.params)

    def of(self, A: np.ndarray) -> np.ndarray:
        """``f(A)`` by functional calculus."""
        return apply_function(A, self.f, self.domain)


def subgradient_operator(fn: ConvexScalarFunction, A: np.ndarray) -> np.ndarray:
    """The operator ``C_A``: the slope selection applied to ``A``."""
    return apply_function(A, fn.slope, fn.domain)


def _power(p: float) -> ConvexScalarFunction:
    if p >= 1:
        dom = Interval(0.0, math.inf, lo_closed=True)
        return ConvexScalarFunction(
            "power", (p,), dom,
            f=lambda t: t ** p,
            slope=lambda t: p * t ** (p - 1),
            monotone="increasing",
        )
    if p < 0:
        dom = Interval(0.0, math.inf)
        return ConvexScalarFunction(
            "power", (p,), dom,
            f=lambda t: t ** p,
            slope=lambda t: p * t ** (p - 1),
            monotone="decreasing",
            requires_strict_positivity=True,
        )
    raise DomainError(f"power exponent {p} is not convex on the positive half-line (need p >= 1 or p < 0)")


def _xlogx() -> ConvexScalarFunction:
    return ConvexScalarFunction(
        "xlogx", (), Interval(0.0, math.inf),
        f=lambda t: t * np.log(t),
        slope=lambda t: np.log(t) + 1.0,
        monotone="none",
        requires_strict_positivity=True,
    )


def _abs(c: float) -> ConvexScalarFunction:
    # sign() is 0 at the kink: midpoint of the subdifferential [-1, 1]
    return ConvexScalarFunction(
        "abs", (c,), Interval(),
        f=lambda t: np.abs(t - c),
        slope=lambda t: np.sign(t - c),
        monotone="none",
    )


def tabulated(xs: Sequence[float], ys: Sequence[float]) -> ConvexScalarFunction:
    """Piecewise-linear interpolant through ``(xs[k], ys[k])`` on ``[xs[0], xs[-1]]``.

    Knots must be strictly increasing and the segment slopes nondecreasing.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or len(xs) < 2:
        raise ValidationError("tabulated function needs two equal-length knot arrays with >= 2 points")
    if np.any(np.diff(xs) <= 0):
        raise ValidationError("tabulated knots must be strictly increasing")
    slopes = np.diff(ys) / np.diff(xs)
    if np.any(np.diff(slopes) < -1e-12 * (1 + np.abs(slopes[1:]))):
        k = int(np.argmax(np.diff(slopes) < 0)) + 1
        raise ValidationError(f"tabulated function is not convex at knot {k} (x={xs[k]:g})")
    # slope selection: segment slope inside, mean of neighbours at interior knots
    knot_slopes = np.concatenate([[slopes[0]], (slopes[:-1] + slopes[1:]) / 2, [slopes[-1]]])

    def slope(t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, len(slopes) - 1)
        out = slopes[k]
        on_knot = np.isclose(t[..., None], xs, rtol=0, atol=1e-14)
        hit = on_knot.any(axis=-1)
        out = np.where(hit, knot_slopes[np.argmax(on_knot, axis=-1)], out)
        return out

    if np.all(slopes >= 0):
        monotone = "increasing"
    elif np.all(slopes <= 0):
        monotone = "decreasing"
    else:
        monotone = "none"
    params = tuple(float(v) for pair in zip(xs, ys) for v in pair)
    return ConvexScalarFunction(
        "tabulated", params, Interval(float(xs[0]), float(xs[-1]), True, True),
        f=lambda t: np.interp(t, xs, ys),
        slope=slope,
        monotone=monotone,
    )


def builtin(name: str, params: Sequence[float] = ()) -> ConvexScalarFunction:
    """Look up a registry function by name.

    ``power`` takes the exponent, ``abs`` the kink location (default 0),
    ``tabulated`` a flat list ``x0, y0, x1, y1, ...``. ``exp``, ``xlogx``
    and ``identity`` take no parameters.
    """
    params = tuple(float(p) for p in params)
    if name == "power":
        if len(params) != 1:
            raise ValidationError("power takes exactly one parameter (the exponent)")
        return _power(params[0])
    if name == "tabulated":
        if len(params) < 4 or len(params) % 2:
            raise ValidationError("tabulated takes an even number (>= 4) of parameters")
        return tabulated(params[0::2], params[1::2])
    if name == "abs":
        if len(params) > 1:
            raise ValidationError("abs takes at most one parameter (the centre)")
        return _abs(params[0] if params else 0.0)
    simple = {
        "exp": lambda: ConvexScalarFunction(
            "exp", (), Interval(), f=np.exp, slope=np.exp, monotone="increasing"),
        "xlogx": _xlogx,
        "identity": lambda: ConvexScalarFunction(
            "identity", (), Interval(), f=lambda t: t * 1.0,
            slope=lambda t: np.ones_like(t, dtype=float), monotone="increasing"),
    }
    if name not in simple:
        raise ValidationError(f"unknown function {name!r}; known: power, exp, xlogx, abs, identity, tabulated")
    if params:
        raise ValidationError(f"{name} takes no parameters")
    return simple[name]()


def parse_function(selector: str) -> ConvexScalarFunction:
    """Parse ``NAME`` or ``NAME:P1,P2,...`` (the CLI and file syntax)."""
    name, _, rest = selector.strip().partition(":")
    try:
        params = [float(p) for p in rest.split(",")] if rest else []
    except ValueError:
        raise ValidationError(f"bad parameter list in function selector {selector!r}") from None
    return builtin(name, params)


def sample_interval(domain: Interval, span: float = 5.0) -> tuple[float, float]:
    """A bounded closed sub-interval of ``domain`` used for self-checks."""
    lo = domain.lo if math.isfinite(domain.lo) else -span
    hi = domain.hi if math.isfinite(domain.hi) else lo + 2 * span if math.isfinite(domain.lo) else span
    if not domain.lo_closed and math.isfinite(domain.lo):
        lo += 0.01 * (hi - lo)
    if not domain.hi_closed and math.isfinite(domain.hi):
        hi -= 0.01 * (hi - lo)
    return lo, hi


def self_check(fn: ConvexScalarFunction, n: int = 10_000, seed: int = 0, tol: float = 1e-9) -> dict:
    """Sample the convexity, supporting-line and monotonicity conditions.

    Returns the worst slack of each check (negative means violated beyond
    rounding); raises :class:`ValidationError` if any check fails.
    """
    rng = np.random.default_rng(seed)
    lo, hi = sample_interval(fn.domain)
    s, u, t = np.sort(rng.uniform(lo, hi, size=(3, n)), axis=0)
    keep = (t - s) > 1e-12
    s, u, t = s[keep], u[keep], t[keep]
    chord = ((t - u) * fn(s) + (u - s) * fn(t)) / (t - s)
    convexity = float(np.min(chord + tol - fn(u)))

    a, b = rng.uniform(lo, hi, size=(2, n))
    support = float(np.min(fn(b) + tol - (fn.subgradient(a) * (b - a) + fn(a))))

    monotone = math.inf
    x, y = np.sort(rng.uniform(lo, hi, size=(2, n)), axis=0)
    if fn.monotone == "increasing":
        monotone = float(np.min(fn(y) + 1e-12 - fn(x)))
    elif fn.monotone == "decreasing":
        monotone = float(np.min(fn(x) + 1e-12 - fn(y)))

    report = {"convexity": convexity, "support": support, "monotone": monotone}
    failed = [k for k, v in report.items() if v < 0]
    if failed:
        raise ValidationError(f"{fn.label} fails self-check(s) {failed}: {report}")
    return report
