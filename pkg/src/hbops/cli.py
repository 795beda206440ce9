"""Command-line interface: ``hbops <command> ...``.

Exit codes: 0 success (or the verdict is true), 1 the verdict is false
(NotHB, invalid certificate, necessary-condition violation, rank out of range),
2 usage or validation errors.
"""

from __future__ import annotations

import functools
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click

from . import exactnum as xn
from .bodies import BodyValidationError, SpaceHandle, compute_d, compute_f, norm
from .hahn_banach import (
    ConstructionError,
    LowerBoundOnly,
    NotHB,
    RankOutOfRange,
    construct_rank_k,
    corollary_max_rank,
    is_hahn_banach,
    theorem1_verify,
    verify_certificate,
)
from .io import (
    SchemaError,
    body_to_json,
    certificate_to_json,
    load_certificate,
    load_operator,
    load_space,
    mat_json,
    num,
    save_certificate,
    vec_json,
    verdict_to_json,
)

MAX_D_POINTS = 64
SVG_SEGMENTS = 256
LOWER_BOUND_MARGIN = 1e-6


class Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


@dataclass
class AnalysisReport:
    space: dict
    dim: int
    polytopal: bool
    vertex_count: int | None
    facet_count: int | None
    f: int
    witness: dict
    d_values: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "AnalysisReport":
        return cls(**d)


def analyze_space(S: SpaceHandle) -> AnalysisReport:
    t0 = time.perf_counter()
    f, w = compute_f(S)
    if S.is_polytopal:
        verts, normals = S.materialized
        points = list(verts[:MAX_D_POINTS])
        counts = (len(verts), len(normals))
    else:
        points = []
        for i in range(S.dim):
            e = xn.unit(S.dim, i)
            points.append(xn.smul(xn.ONE / norm(S, e), e))
        counts = (None, None)
    d_values = [{"point": vec_json(p), "d": compute_d(S, p)} for p in points]
    return AnalysisReport(
        space=body_to_json(S.body),
        dim=S.dim,
        polytopal=S.is_polytopal,
        vertex_count=counts[0],
        facet_count=counts[1],
        f=f,
        witness={
            "functional": vec_json(w.face.functional),
            "center": vec_json(w.center),
            "directions": mat_json(w.directions),
        },
        d_values=d_values,
        seconds=round(time.perf_counter() - t0, 6),
    )


def _text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, dict) or (isinstance(v, list) and not _flat(v)):
                sub = _text(v, indent + 1)
                lines.append(f"{pad}- " + sub[0].strip())
                lines += sub[1:]
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(value))
    return lines


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(a, (dict, list)) for a in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(_scalar(a) for a in v) + ")"
    if v is None:
        return "-"
    return str(v)


def emit(report: dict, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(report, indent=2))
    else:
        click.echo("\n".join(_text(report)))


def guarded(fn):
    """Map library errors onto the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exit as e:
            if str(e):
                click.echo(f"error: {e}", err=True)
            sys.exit(e.code)
        except SchemaError as e:
            click.echo(f"parse error: {e}", err=True)
            sys.exit(2)
        except BodyValidationError as e:
            click.echo(f"validation error: {e}", err=True)
            sys.exit(2)
        except (OSError, ValueError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)

    return wrapper


json_option = click.option("--json", "as_json", is_flag=True, help="Emit a JSON report.")
existing = click.Path(exists=True, dir_okay=False)


@click.group()
def main():
    """Norm-preserving extensions and Hahn-Banach operators on finite-dimensional spaces."""


@main.command()
@click.argument("space", type=existing)
@json_option
@guarded
def analyze(space, as_json):
    """Support-set dimension f, its witness, and d values of a space."""
    emit(analyze_space(load_space(space)).to_json(), as_json)


@main.command()
@click.argument("space", type=existing)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write the polar body here.")
@json_option
@guarded
def dual(space, output, as_json):
    """Polar body (unit ball of the dual space)."""
    P = load_space(space).polar
    report = {"dual": body_to_json(P.body), "dim": P.dim, "polytopal": P.is_polytopal}
    if P.is_polytopal:
        report["vertex_count"] = len(P.vertices)
        report["facet_count"] = len(P.normals)
    if output:
        Path(output).write_text(json.dumps(body_to_json(P.body), indent=2) + "\n")
        report["written"] = output
    emit(report, as_json)


@main.command("check-hb")
@click.argument("operator", type=existing)
@click.option("--net", "net", default=32, show_default=True, help="Net size for smooth domains.")
@click.option("--cert", type=existing, help="Certificate used when only the codomain is smooth.")
@json_option
@guarded
def check_hb(operator, net, cert, as_json):
    """Decide whether an operator is Hahn-Banach."""
    T = load_operator(operator)
    c = load_certificate(cert) if cert else None
    v = is_hahn_banach(T, net_size=net, certificate=c)
    emit(verdict_to_json(v), as_json)
    if isinstance(v, NotHB):
        raise Exit(1)
    if isinstance(v, LowerBoundOnly) and v.bound > v.norm + LOWER_BOUND_MARGIN:
        raise Exit(1)


@main.command()
@click.option("--X", "x_path", required=True, type=existing, help="Domain space JSON.")
@click.option("--Y", "y_path", required=True, type=existing, help="Codomain space JSON.")
@click.option("--k", "k", required=True, type=int, help="Target rank.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write the certificate here.")
@json_option
@guarded
def construct(x_path, y_path, k, output, as_json):
    """Build a rank-k Hahn-Banach operator with an extension certificate."""
    X, Y = load_space(x_path), load_space(y_path)
    try:
        T, c = construct_rank_k(X, Y, k)
    except RankOutOfRange as e:
        emit({"constructed": False, "k": k, "max_rank": corollary_max_rank(X, Y), "reason": str(e)}, as_json)
        raise Exit(1)
    except ConstructionError as e:
        raise Exit(2, f"construction failed: {e}")
    report = {
        "constructed": True,
        "k": k,
        "max_rank": corollary_max_rank(X, Y),
        "operator": mat_json(T.matrix),
        "atoms": len(c.atoms),
    }
    if output:
        save_certificate(c, output)
        report["written"] = output
    else:
        report["certificate"] = certificate_to_json(c)
    emit(report, as_json)


@main.command("verify-cert")
@click.argument("certificate", type=existing)
@json_option
@guarded
def verify_cert(certificate, as_json):
    """Check an extension certificate."""
    c = load_certificate(certificate)
    res = verify_certificate(c)
    value = res.norm_value
    emit({
        "valid": res.ok,
        "rank": c.rank,
        "atoms": len(c.atoms),
        "norm": None if value is None else num(value),
        "problems": res.problems,
    }, as_json)
    if not res.ok:
        raise Exit(1)


@main.command()
@click.argument("operator", type=existing)
@json_option
@guarded
def theorem1(operator, as_json):
    """Check the necessary condition at every norming point."""
    T = load_operator(operator)
    rep = theorem1_verify(T)
    emit({
        "passed": rep.passed,
        "rank": rep.rank,
        "points": [
            {"point": vec_json(c.point), "d": c.d, "support_dim": c.support_dim,
             "required": c.required, "passed": c.passed}
            for c in rep.checks
        ],
        "note": rep.note,
    }, as_json)
    if not rep.passed:
        raise Exit(1)


def boundary_points(S: SpaceHandle) -> list[tuple[float, float]]:
    """Boundary of a planar unit ball, counter-clockwise."""
    if S.dim != 2:
        raise ValueError("render2d only draws 2-dimensional spaces")
    if S.is_polytopal:
        pts = [tuple(float(a) for a in v) for v in S.vertices]
        return sorted(pts, key=lambda p: math.atan2(p[1], p[0]))
    out = []
    for i in range(SVG_SEGMENTS):
        t = 2 * math.pi * i / SVG_SEGMENTS
        u = (math.cos(t), math.sin(t))
        r = float(norm(S, (xn.rat(u[0]), xn.rat(u[1]))))
        out.append((u[0] / r, u[1] / r))
    return out


def render_svg(S: SpaceHandle) -> str:
    pts = boundary_points(S)
    m = max(max(abs(x), abs(y)) for x, y in pts) * 1.15
    coords = " ".join(f"{x:g},{y:g}" for x, y in pts)
    w = m / 200
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="400" height="400" '
        f'viewBox="{-m:g} {-m:g} {2 * m:g} {2 * m:g}">\n'
        f'  <g transform="scale(1,-1)">\n'
        f'    <line x1="{-m:g}" y1="0" x2="{m:g}" y2="0" stroke="#bbb" stroke-width="{w:g}"/>\n'
        f'    <line x1="0" y1="{-m:g}" x2="0" y2="{m:g}" stroke="#bbb" stroke-width="{w:g}"/>\n'
        f'    <polygon points="{coords}" fill="#cfe3f7" stroke="#1f4e79" stroke-width="{2 * w:g}"/>\n'
        f"  </g>\n</svg>\n"
    )


@main.command()
@click.argument("space", type=existing)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="SVG path (stdout if omitted).")
@guarded
def render2d(space, output):
    """Draw the unit ball of a 2-dimensional space as SVG."""
    svg = render_svg(load_space(space))
    if output:
        Path(output).write_text(svg)
    else:
        click.echo(svg, nl=False)


if __name__ == "__main__":
    main()
