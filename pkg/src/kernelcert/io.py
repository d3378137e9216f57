"""JSON readers and writers for kernel specs, exact matrices, Pick problems,
Caratheodory data and grid specs."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Union

import numpy as np

from . import catalog
from .exact import Gaussian, ValidationError, format_fraction, to_fraction
from .interpolation import CaratheodoryData, PickProblem
from .linalg import HermitianExact
from .sampling import Grid, random_grid
from .series import BivariateSeries, CoInvariantSet, DiagonalSeries

PathLike = Union[str, Path]
DEFAULT_DEGREE = 10  # truncation used for catalog kernels when none is requested


def _rat(s) -> Fraction:
    try:
        return to_fraction(s)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"bad rational {s!r}") from e


def _need(obj: Mapping, key: str):
    if key not in obj:
        raise ValidationError(f"missing field {key!r}")
    return obj[key]


def _check_format(obj: Mapping, fmt: str):
    if obj.get("format") != fmt:
        raise ValidationError(f"expected format {fmt!r}, got {obj.get('format')!r}")


def load_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e})") from e
    except OSError as e:
        raise ValidationError(f"{path}: {e.strerror}") from e


def file_hash(path: PathLike) -> str:
    try:
        return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as e:
        raise ValidationError(f"{path}: {e.strerror}") from e


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# kernelspec/1


def series_to_spec(f: Union[DiagonalSeries, BivariateSeries]) -> Dict[str, Any]:
    if isinstance(f, DiagonalSeries):
        return {
            "format": "kernelspec/1",
            "kind": "diagonal",
            "variables": f.variables,
            "truncation_degree": f.degree,
            "coefficients": [{"index": list(a), "value": format_fraction(v)} for a, v in f.items()],
        }
    coeffs = []
    for i in range(f.degree + 1):
        for j in range(f.degree + 1):
            v = f[i, j]
            if v:
                coeffs.append({"i": i, "j": j, "re": format_fraction(v.re), "im": format_fraction(v.im)})
    return {"format": "kernelspec/1", "kind": "bivariate", "variables": 1, "truncation_degree": f.degree, "coefficients": coeffs}


def spec_to_series(obj: Mapping) -> Union[DiagonalSeries, BivariateSeries]:
    _check_format(obj, "kernelspec/1")
    kind = _need(obj, "kind")
    n = int(_need(obj, "truncation_degree"))
    g = int(_need(obj, "variables"))
    if n < 0 or g < 1:
        raise ValidationError("need truncation_degree >= 0 and variables >= 1")
    items = _need(obj, "coefficients")
    if kind == "diagonal":
        coeffs = {}
        for c in items:
            a = tuple(int(x) for x in _need(c, "index"))
            if len(a) != g or any(x < 0 for x in a):
                raise ValidationError(f"bad index {a} for {g} variables")
            if sum(a) > n:
                raise ValidationError(f"index {a} exceeds truncation {n}")
            coeffs[a] = _rat(_need(c, "value"))
        return DiagonalSeries(g, n, coeffs)
    if kind == "bivariate":
        if g != 1:
            raise ValidationError("bivariate specs are one-variable")
        entries = {}
        for c in items:
            i, j = int(_need(c, "i")), int(_need(c, "j"))
            if not (0 <= i <= n and 0 <= j <= n):
                raise ValidationError(f"entry ({i}, {j}) outside truncation {n}")
            entries[(i, j)] = Gaussian(_rat(c.get("re", "0")), _rat(c.get("im", "0")))
        return BivariateSeries.from_dict(n, entries)
    raise ValidationError(f"unknown kernel kind {kind!r}")


def kernel_from_obj(obj: Mapping, degree: int = None, base: Path = None):
    """Returns (series or None, evaluator or None, name).

    Accepts a kernelspec/1 object, {"catalog": name, "params": {...}} or
    {"spec": relative path}.  A run report carrying a kernel spec under
    "spec" or "theta" is accepted too."""
    for key in ("spec", "theta"):
        if isinstance(obj.get(key), Mapping):
            return kernel_from_obj(obj[key], degree, base)
    if "spec" in obj:
        path = Path(obj["spec"])
        if base is not None and not path.is_absolute():
            path = base / path
        return kernel_from_obj(load_json(path), degree, path.parent)
    if "catalog" in obj:
        h = catalog.lookup(obj["catalog"], **obj.get("params", {}))
        ser = h.series(DEFAULT_DEGREE if degree is None else degree) if h.series_fn is not None else None
        return ser, h, h.name
    f = spec_to_series(obj)
    if degree is not None and degree > f.degree:
        raise ValidationError(f"requested degree {degree} exceeds file truncation {f.degree}")
    if degree is not None:
        f = f.truncate(degree)
    return f, series_evaluator(f), "kernelspec"


def series_evaluator(f: Union[DiagonalSeries, BivariateSeries]) -> Callable:
    if isinstance(f, BivariateSeries):
        return lambda z, w: f.evaluate(z, w)
    terms = [(a, float(v)) for a, v in f.items()]

    def ev(z, w):
        zs = z if isinstance(z, (tuple, list)) else (z,)
        ws = w if isinstance(w, (tuple, list)) else (w,)
        total = 0j
        for a, v in terms:
            t = v
            for e, x, y in zip(a, zs, ws):
                t *= (x * np.conj(y)) ** e
            total += t
        return total

    return ev


# ---------------------------------------------------------------------------
# hmat/1


def hmat_to_obj(H: HermitianExact) -> Dict[str, Any]:
    entries = []
    for i in range(H.n):
        for j in range(i, H.n):
            v = H[i, j]
            if v:
                entries.append({"i": i, "j": j, "re": format_fraction(v.re), "im": format_fraction(v.im)})
    return {"format": "hmat/1", "n": H.n, "entries": entries}


def obj_to_hmat(obj: Mapping) -> HermitianExact:
    _check_format(obj, "hmat/1")
    n = int(_need(obj, "n"))
    if n < 0:
        raise ValidationError("n must be nonnegative")
    rows = [[Gaussian(0) for _ in range(n)] for _ in range(n)]
    for e in _need(obj, "entries"):
        i, j = int(_need(e, "i")), int(_need(e, "j"))
        if not (0 <= i <= j < n):
            raise ValidationError(f"entry ({i}, {j}) is not in the upper triangle of a {n}x{n} matrix")
        v = Gaussian(_rat(e.get("re", "0")), _rat(e.get("im", "0")))
        if i == j and v.im:
            raise ValidationError(f"diagonal entry {i} is not real")
        rows[i][j] = v
        rows[j][i] = v.conj()
    return HermitianExact(tuple(tuple(r) for r in rows))


def float_matrix(obj) -> np.ndarray:
    """Row-major nested lists; entries are numbers or [re, im] pairs."""
    try:
        M = np.array([[complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in row] for row in obj])
    except (TypeError, ValueError) as e:
        raise ValidationError(f"bad float matrix: {e}") from e
    if M.ndim != 2 or not np.all(np.isfinite(M)):
        raise ValidationError("matrix must be a finite 2-d array")
    return M


def float_matrix_to_obj(M: np.ndarray):
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.atleast_2d(M)]


# ---------------------------------------------------------------------------
# Pick problems, Caratheodory data, grids


def _point(p):
    """[[re, im], ...] per coordinate, or a single [re, im]."""
    if isinstance(p, (list, tuple)) and p and isinstance(p[0], (list, tuple)):
        coords = tuple(complex(*c) for c in p)
        return coords[0] if len(coords) == 1 else coords
    if isinstance(p, (list, tuple)) and len(p) == 2:
        return complex(*p)
    raise ValidationError(f"bad point {p!r}")


def obj_to_pick(obj: Mapping, base: Path = None) -> PickProblem:
    _check_format(obj, "pick/1")
    pts = [_point(p) for p in _need(obj, "points")]
    tgs = [float_matrix(W) for W in _need(obj, "targets")]
    _, k, _ = kernel_from_obj(_need(obj, "k"), base=base)
    _, l, _ = kernel_from_obj(_need(obj, "l"), base=base)
    return PickProblem(tuple(pts), tuple(tgs), k, l)


def obj_to_ccdata(obj: Mapping) -> CaratheodoryData:
    _check_format(obj, "ccdata/1")
    g = int(_need(obj, "variables"))
    J = int(_need(obj, "J"))
    coeffs = {}
    for c in _need(obj, "coefficients"):
        a = tuple(int(x) for x in _need(c, "index"))
        if len(a) != g:
            raise ValidationError(f"bad index {a} for {g} variables")
        coeffs[a] = [[Gaussian(_rat(e[0]), _rat(e[1])) for e in row] for row in _need(c, "matrix")]
    F = obj.get("indices")
    idx = frozenset(tuple(int(x) for x in a) for a in F) if F is not None else frozenset(coeffs)
    return CaratheodoryData(CoInvariantSet(g, idx), J, coeffs)


def ccdata_to_obj(d: CaratheodoryData) -> Dict[str, Any]:
    return {
        "format": "ccdata/1",
        "variables": d.F.variables,
        "J": d.J,
        "indices": [list(a) for a in d.order()],
        "coefficients": [
            {"index": list(a), "matrix": [[[format_fraction(v.re), format_fraction(v.im)] for v in row] for row in d.coeffs[a]]}
            for a in d.order()
        ],
    }


def obj_to_grid(obj: Mapping) -> Grid:
    _check_format(obj, "grid/1")
    if "points" in obj:
        return Grid(tuple(_point(p) for p in obj["points"]), obj.get("seed"), float(obj.get("radius", "nan")))
    return random_grid(int(_need(obj, "count")), float(_need(obj, "radius")), int(_need(obj, "seed")), int(obj.get("variables", 1)))
