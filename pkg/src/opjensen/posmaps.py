"""Positive linear maps between matrix algebras and unital families of them.

A map sends ``d_h x d_h`` Hermitian matrices to ``d_k x d_k`` ones. Kraus
operators ``V`` have shape ``(d_h, d_k)`` so that ``X -> V* X V``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, PositivityError, ValidationError
from .matcore import hermitian, identity, inv_sqrt, min_eig

KINDS = ("kraus", "scaled_identity", "compression", "pinching", "transpose_then_kraus")


def _as_ops(payload) -> tuple[np.ndarray, ...]:
    ops = tuple(np.array(V, dtype=complex) for V in payload)
    for V in ops:
        V.flags.writeable = False
    return ops


@dataclass(frozen=True, eq=False)
class PositiveLinearMap:
    """One positive map. ``payload`` depends on ``kind``:

    * ``kraus`` / ``transpose_then_kraus``: tuple of ``(d_h, d_k)`` operators
    * ``compression``: a single ``(d_h, d_k)`` operator
    * ``scaled_identity``: the weight ``w > 0`` (``d_h == d_k``)
    * ``pinching``: tuple of orthogonal projections summing to the identity
    """

    kind: str
    payload: object
    d_h: int
    d_k: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown map kind {self.kind!r}")
        if self.kind == "scaled_identity":
            w = float(self.payload)
            if not w > 0:
                raise ValidationError(f"scaled_identity weight must be positive, got {w}")
            if self.d_h != self.d_k:
                raise DimensionError("scaled_identity needs d_h == d_k")
            object.__setattr__(self, "payload", w)
            return
        if self.kind == "compression":
            V = np.array(self.payload, dtype=complex)
            V.flags.writeable = False
            object.__setattr__(self, "payload", V)
            ops = (V,)
        else:
            ops = _as_ops(self.payload)
            if not ops:
                raise ValidationError(f"{self.kind} map needs at least one operator")
            object.__setattr__(self, "payload", ops)
        for k, V in enumerate(ops):
            if V.shape != (self.d_h, self.d_k):
                raise DimensionError(
                    f"{self.kind} operator {k} has shape {V.shape}, expected {(self.d_h, self.d_k)}"
                )
        if self.kind == "pinching":
            self._check_pinching(ops)

    def _check_pinching(self, projs):
        if self.d_h != self.d_k:
            raise DimensionError("pinching needs d_h == d_k")
        total = np.zeros((self.d_h, self.d_h), dtype=complex)
        for j, P in enumerate(projs):
            if np.abs(P - P.conj().T).max() > 1e-10 or np.abs(P @ P - P).max() > 1e-10:
                raise ValidationError(f"pinching operator {j} is not an orthogonal projection")
            for i in range(j):
                if np.abs(projs[i] @ P).max() > 1e-10:
                    raise ValidationError(f"pinching projections {i} and {j} are not orthogonal")
            total += P
        if np.abs(total - np.eye(self.d_h)).max() > 1e-10:
            raise ValidationError("pinching projections do not sum to the identity")

    # constructors ---------------------------------------------------------

    @classmethod
    def kraus(cls, ops: Sequence) -> "PositiveLinearMap":
        ops = _as_ops(ops)
        return cls("kraus", ops, *ops[0].shape)

    @classmethod
    def transpose_then_kraus(cls, ops: Sequence) -> "PositiveLinearMap":
        ops = _as_ops(ops)
        return cls("transpose_then_kraus", ops, *ops[0].shape)

    @classmethod
    def compression(cls, V) -> "PositiveLinearMap":
        V = np.asarray(V, dtype=complex)
        return cls("compression", V, *V.shape)

    @classmethod
    def scaled_identity(cls, w: float, d: int) -> "PositiveLinearMap":
        return cls("scaled_identity", w, d, d)

    @classmethod
    def pinching(cls, projections: Sequence) -> "PositiveLinearMap":
        ops = _as_ops(projections)
        return cls("pinching", ops, *ops[0].shape)

    # evaluation -----------------------------------------------------------

    @property
    def operators(self) -> tuple[np.ndarray, ...]:
        """Kraus-type operators (``scaled_identity`` as ``sqrt(w) I``)."""
        if self.kind == "scaled_identity":
            return (np.sqrt(self.payload) * np.eye(self.d_h, dtype=complex),)
        if self.kind == "compression":
            return (self.payload,)
        return self.payload

    @property
    def transposes(self) -> bool:
        return self.kind == "transpose_then_kraus"

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X)
        if X.shape != (self.d_h, self.d_h):
            raise DimensionError(f"map expects a {self.d_h}x{self.d_h} input, got {X.shape}")
        if self.kind == "scaled_identity":
            return hermitian(self.payload * X)
        if self.transposes:
            X = X.T
        out = sum(V.conj().T @ X @ V for V in self.operators)
        return hermitian(out)

    def __repr__(self):
        return f"PositiveLinearMap({self.kind}, d_h={self.d_h}, d_k={self.d_k})"


def apply(phi: PositiveLinearMap, X) -> np.ndarray:
    return phi(X)


@dataclass(frozen=True, eq=False)
class PositiveMapFamily:
    """Finite family ``Phi_1..Phi_n`` with common dimensions.

    Calling the family on a single matrix applies the summed map
    ``X -> sum_i Phi_i(X)``, which is itself positive and, for a unital
    family, unital.
    """

    maps: tuple[PositiveLinearMap, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValidationError("a map family needs at least one map")
        dims = {(m.d_h, m.d_k) for m in maps}
        if len(dims) != 1:
            raise DimensionError(f"maps in a family must share dimensions, got {sorted(dims)}")
        object.__setattr__(self, "maps", maps)

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)

    @property
    def d_h(self) -> int:
        return self.maps[0].d_h

    @property
    def d_k(self) -> int:
        return self.maps[0].d_k

    def __call__(self, X) -> np.ndarray:
        return family_apply_sum(self, [X] * len(self.maps))


def as_family(phi) -> PositiveMapFamily:
    if isinstance(phi, PositiveMapFamily):
        return phi
    if isinstance(phi, PositiveLinearMap):
        return PositiveMapFamily((phi,))
    raise TypeError(f"expected a PositiveLinearMap or PositiveMapFamily, got {type(phi).__name__}")


def family_apply_sum(F: PositiveMapFamily, Xs: Sequence) -> np.ndarray:
    """``sum_i Phi_i(X_i)``."""
    Xs = list(Xs)
    if len(Xs) != len(F):
        raise DimensionError(f"family has {len(F)} maps but {len(Xs)} operators were given")
    return hermitian(sum(phi(X) for phi, X in zip(F.maps, Xs)))


def check_unitality(F: PositiveMapFamily, tol: float = 1e-9) -> tuple[bool, float]:
    F = as_family(F)
    defect = float(np.abs(F(identity(F.d_h)) - np.eye(F.d_k)).max())
    return defect <= tol, defect


def require_unital(F, tol: float = 1e-9) -> None:
    ok, defect = check_unitality(F, tol)
    if not ok:
        raise ValidationError(f"map family is not unital: defect {defect:.3e} > {tol:g}")


def normalize_family(raw: Sequence[PositiveLinearMap]) -> PositiveMapFamily:
    """Rescale maps so that their identities sum to the identity.

    With ``S = sum_i Phi_i(1)`` every Kraus-type operator ``V`` becomes
    ``V S^{-1/2}``. Pinchings and scaled identities are rewritten as plain
    Kraus maps unless ``S`` is already scalar.
    """
    raw = tuple(raw)
    F = PositiveMapFamily(raw)
    S = F(identity(F.d_h))
    lam = min_eig(S)
    if lam < 1e-8:
        raise PositivityError(f"cannot normalize: sum of Phi_i(1) is singular (min eigenvalue {lam:.3e})")
    scalar = np.abs(S - S[0, 0] * np.eye(F.d_k)).max() <= 1e-15 * abs(S[0, 0])
    if scalar:
        c = float(S[0, 0].real)
        s = c ** -0.5
        out = []
        for phi in raw:
            if phi.kind == "scaled_identity":
                out.append(PositiveLinearMap.scaled_identity(phi.payload / c, phi.d_h))
            elif phi.kind == "pinching":
                out.append(PositiveLinearMap.kraus([s * P for P in phi.operators]))
            elif phi.kind == "compression":
                out.append(PositiveLinearMap.compression(s * phi.payload))
            else:
                out.append(PositiveLinearMap(phi.kind, [s * V for V in phi.operators], phi.d_h, phi.d_k))
        return PositiveMapFamily(tuple(out))
    S_inv_half = inv_sqrt(S)
    out = []
    for phi in raw:
        ops = [V @ S_inv_half for V in phi.operators]
        if phi.kind == "compression":
            out.append(PositiveLinearMap.compression(ops[0]))
        elif phi.kind == "transpose_then_kraus":
            out.append(PositiveLinearMap.transpose_then_kraus(ops))
        else:
            out.append(PositiveLinearMap.kraus(ops))
    return PositiveMapFamily(tuple(out))


def congruence_family(F: PositiveMapFamily, inner: np.ndarray, outer: np.ndarray) -> PositiveMapFamily:
    """The family ``X -> outer * Phi_i(inner X inner) * outer`` for Hermitian ``inner``/``outer``.

    For ``transpose_then_kraus`` maps ``(inner X inner)^T = inner^T X^T inner^T``,
    so the Kraus operators absorb ``inner^T`` instead of ``inner``.
    """
    F = as_family(F)
    out = []
    for phi in F.maps:
        left = inner.T if phi.transposes else inner
        ops = [left @ V @ outer for V in phi.operators]
        if phi.transposes:
            out.append(PositiveLinearMap.transpose_then_kraus(ops))
        else:
            out.append(PositiveLinearMap.kraus(ops))
    return PositiveMapFamily(tuple(out))
