"""JSON formats for complexes, divisors, PL functions, points and subdivision maps.

Rationals are always written as ``{"num": int, "den": int}`` with a positive
denominator. Output is canonical (fixed list order, sorted keys) so that
parse -> serialize -> parse is the identity and reports are byte-stable.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Dict, List, Sequence

from . import errors
from .complex_core import Simplex, WeakTropicalComplex, build_complex
from .divisors import PLFunction, RationalPoint, RidgeDivisor


def rational(x) -> Dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def parse_rational(obj) -> Fraction:
    if isinstance(obj, bool):
        raise errors.FormatError("booleans are not rationals")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except ValueError as e:
            raise errors.FormatError(f"bad rational {obj!r}") from e
    if isinstance(obj, dict) and "num" in obj:
        num, den = obj["num"], obj.get("den", 1)
        if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or den == 0:
            raise errors.FormatError(f"bad rational {obj!r}")
        return Fraction(num, den)
    raise errors.FormatError(f"expected a rational, got {obj!r}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _need(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise errors.FormatError(f"missing field {key!r}")
    v = obj[key]
    if kind is not None and (not isinstance(v, kind) or isinstance(v, bool)):
        raise errors.FormatError(f"field {key!r} has the wrong type")
    return v


# -- complexes ------------------------------------------------------------------


def complex_to_json(W: WeakTropicalComplex) -> dict:
    cx = W.complex
    simplices = [{"id": s.id, "dim": s.dim, "faces": list(s.faces)} for s in cx]
    simplices.sort(key=lambda r: (r["dim"], cx.index(r["id"])))
    alpha = [
        {"ridge": r, "vertex_pos": p, "value": W.alpha_at(r, p)}
        for r in cx.ridges
        for p in range(cx.n)
    ]
    return {"n": cx.n, "simplices": simplices, "alpha": alpha}


def complex_from_json(obj, strict: bool = True) -> WeakTropicalComplex:
    """Parse the complex format. With ``strict=False`` the ridge identity is
    not enforced (used by ``tropx validate`` to report violations)."""
    n = _need(obj, "n", int)
    recs = []
    for s in _need(obj, "simplices", list):
        faces = s.get("faces", []) if isinstance(s, dict) else None
        if not isinstance(faces, list) or not all(isinstance(f, str) for f in faces):
            raise errors.FormatError(f"bad faces in {s!r}")
        recs.append(Simplex(str(_need(s, "id", str)), _need(s, "dim", int), tuple(faces)))
    cx = build_complex(n, recs)
    alpha = {}
    for a in obj.get("alpha", []):
        key = (_need(a, "ridge", str), _need(a, "vertex_pos", int))
        if key in alpha:
            raise errors.FormatError(f"duplicate structure constant {key}")
        alpha[key] = _need(a, "value", int)
    return WeakTropicalComplex(cx, alpha, strict=strict)


def complex_digest(W: WeakTropicalComplex) -> str:
    blob = json.dumps(complex_to_json(W), sort_keys=True, separators=(",", ":"))
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


# -- divisors and functions ------------------------------------------------------


def _host_for(W: WeakTropicalComplex, order: int) -> WeakTropicalComplex:
    if order < 1:
        raise errors.FormatError("order must be >= 1")
    if order == 1:
        return W
    from .subdivision import subdivide

    return subdivide(W, order)[0]


def _check_ref(obj, W):
    if not isinstance(obj, dict):
        raise errors.FormatError("expected a JSON object")
    ref = obj.get("complex")
    if isinstance(ref, str) and ref.startswith("sha256:") and ref != complex_digest(W):
        raise errors.FormatError("file refers to a different complex")


def divisor_to_json(D: RidgeDivisor, base: WeakTropicalComplex | None = None) -> dict:
    from .subdivision import base_of

    base = base or base_of(D)
    return {
        "complex": complex_digest(base),
        "order": D.order,
        "coeffs": [dict(ridge=r, **rational(c)) for r, c in D.items()],
    }


def divisor_from_json(obj, W: WeakTropicalComplex) -> RidgeDivisor:
    """Divisor on ``W`` or, for ``order > 1``, on its order-``m`` subdivision."""
    _check_ref(obj, W)
    order = obj.get("order", 1)
    if not isinstance(order, int) or isinstance(order, bool):
        raise errors.FormatError("order must be an integer")
    host = _host_for(W, order)
    coeffs: Dict[str, Fraction] = {}
    for c in _need(obj, "coeffs", list):
        r = _need(c, "ridge", str)
        if r in coeffs:
            raise errors.FormatError(f"ridge {r!r} listed twice")
        coeffs[r] = parse_rational(c)
    return RidgeDivisor(host, coeffs, order)


def pl_to_json(phi: PLFunction, base: WeakTropicalComplex | None = None) -> dict:
    from .subdivision import base_of_complex

    base = base or base_of_complex(phi.host)
    values = [dict(vertex=v, **rational(x)) for v, x in phi.values.items() if x != 0]
    return {"complex": complex_digest(base), "order": phi.order, "values": values}


def pl_from_json(obj, W: WeakTropicalComplex) -> PLFunction:
    _check_ref(obj, W)
    order = obj.get("order", 1)
    host = _host_for(W, order)
    values = {}
    for c in _need(obj, "values", list):
        values[_need(c, "vertex", str)] = parse_rational(c)
    return PLFunction(host, values, order)


# -- points ------------------------------------------------------------------------


def point_to_json(p: RationalPoint, count: int = 1) -> dict:
    out = {"simplex": p.simplex, "coords": [rational(c) for c in p.coords]}
    if count != 1:
        out["count"] = count
    return out


def points_to_json(points: Sequence) -> dict:
    rows = []
    for p in points:
        if isinstance(p, RationalPoint):
            rows.append(point_to_json(p))
        else:
            rows.append(point_to_json(p[0], p[1]))
    return {"points": rows}


def points_from_json(obj, W: WeakTropicalComplex | None = None) -> List:
    """Points file. Entries with a ``count`` other than 1 come back as
    ``(point, count)`` pairs."""
    rows = obj["points"] if isinstance(obj, dict) else obj
    if not isinstance(rows, list):
        raise errors.FormatError("points must be a list")
    out: List[Any] = []
    for r in rows:
        coords = _need(r, "coords", list)
        p = RationalPoint(_need(r, "simplex", str), tuple(parse_rational(c) for c in coords))
        if W is not None:
            from .divisors import minimal_simplex

            minimal_simplex(W, p)
        count = r.get("count", 1)
        out.append(p if count == 1 else (p, int(count)))
    return out


# -- subdivision maps --------------------------------------------------------------


def subdivision_map_to_json(smap) -> dict:
    tgt = smap.target.complex
    verts = []
    for v in tgt.vertex_ids:
        h, c = smap.coords(v)
        verts.append({"vertex": v, "host": h, "coords": list(c)})
    hosts = [{"simplex": s, "host": smap.host[s]} for s in tgt.simplices() if s in smap.host]
    return {
        "source": complex_digest(smap.source),
        "order": smap.order,
        "vertices": verts,
        "hosts": hosts,
    }


# -- files ----------------------------------------------------------------------------


def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise errors.FormatError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise errors.FormatError(f"{path}: invalid JSON ({e.msg}, line {e.lineno})") from e


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
