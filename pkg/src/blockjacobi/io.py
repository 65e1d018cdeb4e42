"""JSON file formats and seeded instance generation."""

import json

import numpy as np

from .config import DEFAULT_TOLERANCES
from .matrixcore import cholesky_lplus, herm, hpd_sqrt
from .operator import BlockJacobiOperator, Flavor
from .spectral import SpectralData, SpectralPoint, forward_map

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Malformed file; the message names the offending location."""


def matrix_to_json(a):
    a = np.asarray(a, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def matrix_from_json(obj, where, shape=None):
    try:
        a = np.array(
            [[complex(float(e[0]), float(e[1])) for e in row] for row in obj], dtype=complex
        )
    except (TypeError, ValueError, IndexError, KeyError) as exc:
        raise SchemaError(f"{where}: expected a matrix of [re, im] pairs ({exc})") from exc
    if any(len(e) != 2 for row in obj for e in row):
        raise SchemaError(f"{where}: complex entries must be [re, im] pairs")
    if a.ndim != 2 or (shape is not None and a.shape != shape):
        raise SchemaError(f"{where}: expected shape {shape}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SchemaError(f"{where}: non-finite entry")
    return a


def operator_to_dict(op):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "operator",
        "m": op.m,
        "p": op.p,
        "flavor": op.flavor.value,
        "b": [matrix_to_json(x) for x in op.b],
        "a": [matrix_to_json(x) for x in op.a],
    }


def _require(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"{where}: missing field '{key}'")
    return d[key]


def _count(d, key, where):
    v = _require(d, key, where)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise SchemaError(f"{where}.{key}: expected a positive integer, got {v!r}")
    return v


def _check_version(d, where):
    v = _require(d, "schema_version", where)
    if v != SCHEMA_VERSION:
        raise SchemaError(f"{where}.schema_version: unsupported version {v!r}")


def operator_from_dict(d, tol=DEFAULT_TOLERANCES):
    _check_version(d, "$")
    m, p = _count(d, "m", "$"), _count(d, "p", "$")
    try:
        flavor = Flavor(_require(d, "flavor", "$"))
    except ValueError as exc:
        raise SchemaError(f"$.flavor: {exc}") from exc
    b_raw, a_raw = _require(d, "b", "$"), _require(d, "a", "$")
    if not isinstance(b_raw, list) or len(b_raw) != p:
        raise SchemaError(f"$.b: expected a list of {p} matrices")
    if not isinstance(a_raw, list) or len(a_raw) != p - 1:
        raise SchemaError(f"$.a: expected a list of {p - 1} matrices")
    b = [matrix_from_json(x, f"$.b[{i}]", (m, m)) for i, x in enumerate(b_raw)]
    a = [matrix_from_json(x, f"$.a[{i}]", (m, m)) for i, x in enumerate(a_raw)]
    try:
        return BlockJacobiOperator(
            np.array(b), np.array(a).reshape(p - 1, m, m), flavor, tol
        )
    except ValueError as exc:
        raise SchemaError(f"$: invalid operator: {exc}") from exc


def spectral_to_dict(data):
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "spectral",
        "m": data.m,
        "p": data.p,
        "points": [
            {"lambda": float(pt.lam), "P": matrix_to_json(pt.P), "g": matrix_to_json(pt.g)}
            for pt in data.points
        ],
    }


def spectral_from_dict(d):
    _check_version(d, "$")
    m, p = _count(d, "m", "$"), _count(d, "p", "$")
    raw = _require(d, "points", "$")
    if not isinstance(raw, list):
        raise SchemaError("$.points: expected a list")
    points = []
    for i, e in enumerate(raw):
        where = f"$.points[{i}]"
        lam = _require(e, "lambda", where)
        if not isinstance(lam, (int, float)) or isinstance(lam, bool) or not np.isfinite(lam):
            raise SchemaError(f"{where}.lambda: expected a finite real number")
        P = matrix_from_json(_require(e, "P", where), f"{where}.P", (m, m))
        g = matrix_from_json(_require(e, "g", where), f"{where}.g", (m, m))
        points.append(SpectralPoint(float(lam), P, g))
    return SpectralData(m, p, points)


def dumps(d):
    # json emits the shortest repr that round-trips a binary64
    return json.dumps(d, indent=1) + "\n"


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def save_operator(op, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(operator_to_dict(op)))


def load_operator(path, tol=DEFAULT_TOLERANCES):
    return operator_from_dict(_read_json(path), tol)


def save_spectral(data, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(spectral_to_dict(data)))


def load_spectral(path):
    return spectral_from_dict(_read_json(path))


def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def gen_operator(m, p, flavor, seed, eps=0.1, tol=DEFAULT_TOLERANCES):
    """Random operator of the given flavor, deterministic in ``seed``.

    ``b_n = (X + X^*)/2`` with standard complex normal ``X``; ``a_n`` is the
    Hermitian root (splus) or positive-diagonal Cholesky factor (lplus) of
    ``Y Y^* + eps I``.
    """
    if m < 1 or p < 1:
        raise ValueError("m and p must be positive")
    flavor = Flavor(flavor)
    if flavor is Flavor.GENERAL:
        raise ValueError("flavor must be splus or lplus")
    rng = np.random.default_rng(seed)
    b = []
    for _ in range(p):
        x = _complex_normal(rng, (m, m))
        b.append(0.5 * (x + herm(x)))
    a = []
    factor = hpd_sqrt if flavor is Flavor.SPLUS else cholesky_lplus
    for _ in range(p - 1):
        y = _complex_normal(rng, (m, m))
        a.append(factor(y @ herm(y) + eps * np.eye(m), tol))
    return BlockJacobiOperator(np.array(b), np.array(a).reshape(p - 1, m, m), flavor, tol)


def gen_spectral(m, p, seed, tol=DEFAULT_TOLERANCES):
    return forward_map(gen_operator(m, p, Flavor.SPLUS, seed, tol=tol), tol)
