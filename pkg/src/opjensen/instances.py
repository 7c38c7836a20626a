"""Seeded instance generation and JSON/CSV serialization.

Instance files look like::

    {
      "label": "...",
      "dim_h": 2, "dim_k": 2,
      "function": {"name": "power", "params": [2.0]},
      "operators": [ [[[re, im], ...], ...], ... ],
      "maps": [ {"kind": "kraus", "payload": [matrix, ...]}, ... ]
    }

A complex matrix is a list of rows, each entry a ``[re, im]`` pair. Floats
are written with ``repr`` precision so files round-trip exactly.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import OpJensenError, ValidationError
from .matcore import SpectralInterval, hermitian
from .posmaps import KINDS, PositiveLinearMap, PositiveMapFamily, normalize_family
from .scalarfun import ConvexScalarFunction, builtin
from .theorems import InequalityInstance, VerificationReport

SCHEMA_KEYS = ("dim_h", "dim_k", "function", "operators", "maps")


@dataclass(frozen=True)
class GeneratorSpec:
    d_h: int
    d_k: int
    n: int = 1
    map_kinds: tuple[str, ...] = ("kraus",)
    spectrum: SpectralInterval = SpectralInterval(0.0, 2.0)
    floor: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (self.d_h >= self.d_k >= 1):
            raise ValidationError(f"need d_h >= d_k >= 1, got d_h={self.d_h}, d_k={self.d_k}")
        if self.n < 1:
            raise ValidationError("family size n must be >= 1")
        bad = set(self.map_kinds) - set(KINDS)
        if bad or not self.map_kinds:
            raise ValidationError(f"unknown map kinds {sorted(bad)}; choose from {KINDS}")
        if self.floor > self.spectrum.M:
            raise ValidationError(f"strict-positivity floor {self.floor} lies above the interval {self.spectrum}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "map_kinds", tuple(self.map_kinds))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Orthonormalized complex Gaussian matrix, column phases fixed (Haar)."""
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Qm, Rm = np.linalg.qr(Z)
    ph = np.diag(Rm) / np.abs(np.diag(Rm))
    return Qm * ph


def random_hermitian(rng: np.random.Generator, d: int, lo: float, hi: float) -> np.ndarray:
    """``U diag(lambda) U*`` with ``lambda`` uniform on ``[lo, hi]``."""
    lam = rng.uniform(lo, hi, size=d)
    U = random_unitary(rng, d)
    return hermitian((U * lam) @ U.conj().T)


def _gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_map(rng: np.random.Generator, kind: str, d_h: int, d_k: int) -> PositiveLinearMap:
    """An un-normalized random map of the given kind."""
    if kind == "kraus":
        return PositiveLinearMap.kraus([_gaussian(rng, (d_h, d_k)) for _ in range(2)])
    if kind == "transpose_then_kraus":
        return PositiveLinearMap.transpose_then_kraus([_gaussian(rng, (d_h, d_k)) for _ in range(2)])
    if kind == "compression":
        return PositiveLinearMap.compression(_gaussian(rng, (d_h, d_k)))
    if kind == "scaled_identity":
        return PositiveLinearMap.scaled_identity(rng.uniform(0.1, 1.0), d_h)
    if kind == "pinching":
        U = random_unitary(rng, d_h)
        n_blocks = int(rng.integers(2, d_h + 1)) if d_h > 1 else 1
        cuts = np.sort(rng.choice(np.arange(1, d_h), size=n_blocks - 1, replace=False))
        blocks = np.split(np.arange(d_h), cuts)
        projs = [U[:, b] @ U[:, b].conj().T for b in blocks]
        return PositiveLinearMap.pinching(projs)
    raise ValidationError(f"unknown map kind {kind!r}")


def _allowed_kinds(spec: GeneratorSpec) -> list[str]:
    kinds = [k for k in spec.map_kinds if spec.d_h == spec.d_k or k not in ("scaled_identity", "pinching")]
    if not kinds:
        raise ValidationError(f"map kinds {spec.map_kinds} all need d_h == d_k, got {spec.d_h} != {spec.d_k}")
    return kinds


def generate_family(spec: GeneratorSpec, rng: np.random.Generator) -> PositiveMapFamily:
    kinds = _allowed_kinds(spec)
    raw = [random_map(rng, kinds[int(rng.integers(len(kinds)))], spec.d_h, spec.d_k) for _ in range(spec.n)]
    return normalize_family(raw)


def generate_instance(spec: GeneratorSpec, f: ConvexScalarFunction, label: str | None = None) -> InequalityInstance:
    """A random instance for ``f``; a pure function of ``(spec, f)``."""
    lo = max(spec.spectrum.m, spec.floor)
    hi = spec.spectrum.M
    if f.requires_strict_positivity and lo < 1e-8:
        raise ValidationError(f"{f.label} needs strictly positive operators; raise the floor above 0")
    if not f.domain.contains_interval(lo, hi):
        raise ValidationError(f"spectrum interval [{lo}, {hi}] is not inside the domain {f.domain} of {f.label}")
    rng = np.random.default_rng(spec.seed)
    ops = [random_hermitian(rng, spec.d_h, lo, hi) for _ in range(spec.n)]
    family = generate_family(spec, rng)
    if label is None:
        label = f"{f.label}-dh{spec.d_h}-dk{spec.d_k}-n{spec.n}-seed{spec.seed}"
    return InequalityInstance(family, ops, f, label)


def default_interval(f: ConvexScalarFunction) -> tuple[SpectralInterval, float]:
    """A spectrum interval and floor suited to ``f``'s domain."""
    if f.requires_strict_positivity:
        return SpectralInterval(0.2, 2.0), 0.2
    if math.isfinite(f.domain.lo) and f.domain.lo >= 0:
        return SpectralInterval(max(f.domain.lo, 0.0), 2.0), 0.0
    if f.name == "tabulated":
        return SpectralInterval(f.domain.lo, f.domain.hi), 0.0
    return SpectralInterval(-1.0, 2.0), 0.0


# ---------------------------------------------------------------------------
# JSON


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValidationError(f"{where}: expected a non-empty list of rows")
    width = len(obj[0])
    out = np.empty((len(obj), width), dtype=complex)
    for i, row in enumerate(obj):
        if len(row) != width:
            raise ValidationError(f"{where}: row {i} has {len(row)} entries, expected {width}")
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)):
                raise ValidationError(f"{where}[{i}][{j}]: expected a [re, im] pair of numbers, got {z!r}")
            out[i, j] = complex(z[0], z[1])
    return out


def _hermitian_from_json(obj, where: str) -> np.ndarray:
    M = matrix_from_json(obj, where)
    if M.shape[0] != M.shape[1]:
        raise ValidationError(f"{where}: matrix is {M.shape[0]}x{M.shape[1]}, not square")
    diff = np.abs(M - M.conj().T)
    if diff.max() > 1e-12 * max(1.0, np.abs(M).max()):
        i, j = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise ValidationError(
            f"{where}: matrix is not Hermitian at entry [{i}][{j}] "
            f"({M[i, j]} vs conj of [{j}][{i}] = {np.conj(M[j, i])})"
        )
    return hermitian(M)


def map_to_json(phi: PositiveLinearMap) -> dict:
    if phi.kind == "scaled_identity":
        payload = phi.payload
    elif phi.kind == "compression":
        payload = matrix_to_json(phi.payload)
    else:
        payload = [matrix_to_json(V) for V in phi.payload]
    return {"kind": phi.kind, "payload": payload}


def map_from_json(obj, d_h: int, d_k: int, where: str) -> PositiveLinearMap:
    if not isinstance(obj, dict) or "kind" not in obj or "payload" not in obj:
        raise ValidationError(f"{where}: expected an object with 'kind' and 'payload'")
    kind, payload = obj["kind"], obj["payload"]
    if kind not in KINDS:
        raise ValidationError(f"{where}.kind: unknown map kind {kind!r}")
    try:
        if kind == "scaled_identity":
            if not isinstance(payload, (int, float)) or isinstance(payload, bool):
                raise ValidationError(f"{where}.payload: scaled_identity weight must be a number")
            return PositiveLinearMap(kind, float(payload), d_h, d_k)
        if kind == "compression":
            return PositiveLinearMap(kind, matrix_from_json(payload, f"{where}.payload"), d_h, d_k)
        if not isinstance(payload, list) or not payload:
            raise ValidationError(f"{where}.payload: expected a non-empty list of matrices")
        ops = [matrix_from_json(V, f"{where}.payload[{k}]") for k, V in enumerate(payload)]
        return PositiveLinearMap(kind, ops, d_h, d_k)
    except ValidationError:
        raise
    except OpJensenError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def instance_to_dict(inst: InequalityInstance, extra: dict | None = None) -> dict:
    out = {
        "label": inst.label,
        "dim_h": inst.d_h,
        "dim_k": inst.d_k,
        "function": inst.function.descriptor,
        "operators": [matrix_to_json(A) for A in inst.operators],
        "maps": [map_to_json(phi) for phi in inst.family.maps],
    }
    if extra:
        out.update(extra)
    return out


def instance_from_dict(obj) -> InequalityInstance:
    if not isinstance(obj, dict):
        raise ValidationError("instance file: top level must be an object")
    missing = [k for k in SCHEMA_KEYS if k not in obj]
    if missing:
        raise ValidationError(f"instance file: missing field(s) {missing}")
    d_h, d_k = obj["dim_h"], obj["dim_k"]
    if not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in (d_h, d_k)):
        raise ValidationError("dim_h/dim_k: expected positive integers")
    fobj = obj["function"]
    if not isinstance(fobj, dict) or "name" not in fobj:
        raise ValidationError("function: expected an object with 'name' and 'params'")
    try:
        f = builtin(fobj["name"], fobj.get("params", []))
    except OpJensenError as exc:
        raise ValidationError(f"function: {exc}") from None
    if not isinstance(obj["operators"], list) or not isinstance(obj["maps"], list):
        raise ValidationError("operators/maps: expected lists")
    ops = []
    for k, A in enumerate(obj["operators"]):
        M = _hermitian_from_json(A, f"operators[{k}]")
        if M.shape != (d_h, d_h):
            raise ValidationError(f"operators[{k}]: shape {M.shape} does not match dim_h={d_h}")
        ops.append(M)
    maps = [map_from_json(m, d_h, d_k, f"maps[{k}]") for k, m in enumerate(obj["maps"])]
    if not maps:
        raise ValidationError("maps: at least one map is required")
    try:
        return InequalityInstance(PositiveMapFamily(tuple(maps)), ops, f, str(obj.get("label", "")))
    except ValidationError:
        raise
    except OpJensenError as exc:
        raise ValidationError(str(exc)) from None


def _depth(obj) -> int:
    if isinstance(obj, list):
        return 1 + max((_depth(v) for v in obj), default=0)
    if isinstance(obj, dict):
        return 1 + max((_depth(v) for v in obj.values()), default=0)
    return 0


def _pretty(obj, level: int) -> str:
    # matrix rows ([[re, im], ...]) and other shallow values stay on one line
    if _depth(obj) <= 2 and not isinstance(obj, dict) or _depth(obj) == 0:
        return json.dumps(obj, allow_nan=True)
    pad, inner = " " * level, " " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_pretty(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if not obj:
        return "[]"
    items = [inner + _pretty(v, level + 1) for v in obj]
    return "[\n" + ",\n".join(items) + "\n" + pad + "]"


def dumps(obj) -> str:
    """JSON text with one matrix row per line; byte-stable for equal input."""
    return _pretty(obj, 0) + "\n"


def save_instance(inst: InequalityInstance, path, extra: dict | None = None) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst, extra)))


def load_instance(path) -> InequalityInstance:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return instance_from_dict(obj)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# reports


CSV_COLUMNS = (
    "instance_label", "inequality_id", "function", "d_H", "d_K", "n",
    "delta", "zeta", "beta", "margin", "pointwise_min", "verdict",
)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_row(inst: InequalityInstance | None, rep: VerificationReport, function: str = "") -> dict:
    c = rep.constants
    return {
        "instance_label": inst.label if inst is not None else "",
        "inequality_id": rep.inequality_id,
        "function": inst.function.label if inst is not None else function,
        "d_H": inst.d_h if inst is not None else "",
        "d_K": inst.d_k if inst is not None else "",
        "n": inst.n if inst is not None else "",
        "delta": c.delta,
        "zeta": c.zeta,
        "beta": c.beta,
        "margin": rep.margin,
        "pointwise_min": rep.pointwise_min,
        "verdict": rep.verdict,
    }


def rows_to_csv(rows, columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def report_to_dict(rep: VerificationReport, inst: InequalityInstance | None = None) -> dict:
    out = rep.to_dict()
    if inst is not None:
        out["instance_label"] = inst.label
        out["function"] = inst.function.descriptor
    return out
