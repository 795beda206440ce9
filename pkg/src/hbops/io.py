"""JSON formats for bodies, operators, certificates and verdicts.

Rationals are always written as "p/q" strings so files round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from . import exactnum as xn
from .bodies import (
    INF,
    BodyValidationError,
    IntersectPoly,
    PBall,
    PolytopeH,
    PolytopeV,
    Scale,
    SpaceHandle,
    SumInf,
    SumOne,
)
from .hahn_banach import ExtensionCertificate, IsHB, LowerBoundOnly, NotHB
from .operators import LinOperator


class SchemaError(ValueError):
    """Input JSON does not have the expected shape."""


def num(x) -> Any:
    """Exact values as strings; floats (irrational norms) stay floats."""
    if isinstance(x, float):
        return x
    return xn.rat_str(xn.rat(x))


def vec_json(v) -> list:
    return [num(a) for a in v]


def mat_json(m) -> list:
    return [vec_json(r) for r in m]


def _rat(x, where: str):
    try:
        return xn.rat(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: not a rational number: {x!r}") from exc


def _vec(v, where: str):
    if not isinstance(v, list):
        raise SchemaError(f"{where}: expected a list of numbers")
    return tuple(_rat(a, where) for a in v)


def _rows(m, where: str):
    if not isinstance(m, list) or not m:
        raise SchemaError(f"{where}: expected a non-empty list of vectors")
    rows = [_vec(r, where) for r in m]
    if len({len(r) for r in rows}) != 1:
        raise SchemaError(f"{where}: rows have different lengths")
    return tuple(rows)


def _p_json(p) -> str:
    return "inf" if p == INF else xn.rat_str(p)


def body_to_json(b) -> dict:
    if isinstance(b, PolytopeV):
        return {"kind": "polytopeV", "vertices": mat_json(b.vertices)}
    if isinstance(b, PolytopeH):
        return {"kind": "polytopeH", "normals": mat_json(b.normals)}
    if isinstance(b, PBall):
        return {"kind": "pball", "dim": b.n, "p": _p_json(b.p)}
    if isinstance(b, SumInf):
        return {"kind": "sum_inf", "parts": [body_to_json(p) for p in b.parts]}
    if isinstance(b, SumOne):
        return {"kind": "sum_one", "parts": [body_to_json(p) for p in b.parts]}
    if isinstance(b, Scale):
        return {"kind": "scale", "factor": num(b.factor), "inner": body_to_json(b.inner)}
    if isinstance(b, IntersectPoly):
        return {"kind": "intersect", "parts": [body_to_json(p) for p in b.parts]}
    raise TypeError(type(b).__name__)


def body_from_json(d) -> Any:
    if not isinstance(d, dict) or "kind" not in d:
        raise SchemaError("body must be an object with a 'kind' field")
    kind = d["kind"]

    def parts():
        ps = d.get("parts")
        if not isinstance(ps, list) or not ps:
            raise SchemaError(f"{kind}: 'parts' must be a non-empty list")
        return tuple(body_from_json(p) for p in ps)

    try:
        if kind == "polytopeV":
            return PolytopeV(_rows(d.get("vertices"), "vertices"))
        if kind == "polytopeH":
            return PolytopeH(_rows(d.get("normals"), "normals"))
        if kind == "pball":
            n = d.get("dim")
            if not isinstance(n, int) or n < 1:
                raise SchemaError("pball: 'dim' must be a positive integer")
            return PBall(n, str(d.get("p")))
        if kind == "sum_inf":
            return SumInf(parts())
        if kind == "sum_one":
            return SumOne(parts())
        if kind == "scale":
            return Scale(_rat(d.get("factor"), "factor"), body_from_json(d.get("inner")))
        if kind == "intersect":
            return IntersectPoly(parts())
    except BodyValidationError:
        raise
    except (ValueError, TypeError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"{kind}: {exc}") from exc
    raise SchemaError(f"unknown body kind {kind!r}")


def space_from_json(d) -> SpaceHandle:
    return SpaceHandle(body_from_json(d))


def _read(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_space(path) -> SpaceHandle:
    return space_from_json(_read(path))


def save_space(S: SpaceHandle, path) -> None:
    Path(path).write_text(json.dumps(body_to_json(S.body), indent=2) + "\n")


def operator_to_json(T: LinOperator) -> dict:
    return {
        "domain": body_to_json(T.domain.body),
        "codomain": body_to_json(T.codomain.body),
        "matrix": mat_json(T.matrix),
    }


def operator_from_json(d, base: Path | None = None) -> LinOperator:
    if not isinstance(d, dict):
        raise SchemaError("operator must be an object")

    def side(key):
        v = d.get(key)
        if isinstance(v, str):
            return load_space((base or Path(".")) / v)
        if v is None:
            raise SchemaError(f"operator: missing {key!r}")
        return space_from_json(v)

    X, Y = side("domain"), side("codomain")
    m = _rows(d.get("matrix"), "matrix")
    try:
        return LinOperator(m, X, Y)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def load_operator(path) -> LinOperator:
    return operator_from_json(_read(path), Path(path).parent)


def certificate_to_json(c: ExtensionCertificate) -> dict:
    return {
        "atoms": [{"point": vec_json(p), "vector": vec_json(v)} for p, v in c.atoms],
        "operator": operator_to_json(c.operator),
        "rank": c.rank,
    }


def certificate_from_json(d, base: Path | None = None) -> ExtensionCertificate:
    if not isinstance(d, dict) or not isinstance(d.get("atoms"), list):
        raise SchemaError("certificate must be an object with an 'atoms' list")
    T = operator_from_json(d.get("operator"), base)
    atoms = []
    for a in d["atoms"]:
        if not isinstance(a, dict):
            raise SchemaError("atom must be an object with 'point' and 'vector'")
        p, v = _vec(a.get("point"), "atom point"), _vec(a.get("vector"), "atom vector")
        if len(p) != T.domain.dim or len(v) != T.codomain.dim:
            raise SchemaError("atom has the wrong dimension")
        atoms.append((p, v))
    rank = d.get("rank")
    if not isinstance(rank, int):
        raise SchemaError("certificate: 'rank' must be an integer")
    return ExtensionCertificate(atoms=tuple(atoms), operator=T, rank=rank)


def load_certificate(path) -> ExtensionCertificate:
    return certificate_from_json(_read(path), Path(path).parent)


def save_certificate(c: ExtensionCertificate, path) -> None:
    Path(path).write_text(json.dumps(certificate_to_json(c), indent=2) + "\n")


def verdict_to_json(v) -> dict:
    if isinstance(v, IsHB):
        return {
            "tag": v.tag,
            "norm": num(v.norm),
            "embedding": mat_json(v.embedding.coordinates),
            "extension": mat_json(v.extension),
        }
    if isinstance(v, NotHB):
        return {
            "tag": v.tag,
            "norm": num(v.norm),
            "min_extension_norm": num(v.min_extension_norm),
            "gap": num(v.gap),
        }
    if isinstance(v, LowerBoundOnly):
        return {"tag": v.tag, "bound": v.bound, "net_size": v.net_size, "norm": v.norm}
    raise TypeError(type(v).__name__)
