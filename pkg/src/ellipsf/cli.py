"""Command-line front end: ``ellipsf {analyze,mask,space,verify,cascade}``."""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EllipsfError, NoStabilization, NotIsotropic
from .isotropic import coset_reps, decompose, invariance_check, is_isotropic, partition_check, quadratic_form
from .masks import MaskSpec, elliptic_mask, nonstationary_family
from .polyops import MultiPoly
from .ratcore import GaussQ, I, rat_to_str, scalar_to_json
from .scalingfn import (
    NumericJets,
    SymbolicJets,
    cascade_eval,
    fill_box,
    refinement_residual,
    verify_annihilation,
    verify_reproduction,
)
from .strangfix import principal_angles, shift_invariant_space

__all__ = ["RunConfig", "main", "dumps", "parse_matrix", "parse_nonstat", "parse_poly"]

EXIT_OK = 0
EXIT_NOT_ISOTROPIC = 2
EXIT_CONSTRUCTION = 3
EXIT_NO_STABILIZATION = 4
EXIT_BAD_ARGS = 5

_EPILOG = """exit codes:
  0  success
  2  matrix is not isotropic
  3  construction error (any other domain failure)
  4  reproduced space did not stabilise
  5  bad arguments

nonstationary specs (--nonstat):
  X=<poly>[,m=<int>]    G_j ~ X + W^m, e.g. "X=2i*x1" or "X=i*x1^3+i*x2^3"
  sum:<k>=<c>,...       G_j ~ sum_k c W^k, e.g. "sum:1=1,2=1"
other constructions are available through ellipsf.masks.nonstationary_family.

environment:
  ELLIPSF_LOG  one of error (default), info, debug
"""


class BadArguments(ValueError):
    pass


@dataclass
class RunConfig:
    """Parsed command-line configuration."""

    command: str
    matrix: tuple
    order: int = 1
    higher: int | None = None
    nonstat: str | None = None
    scale: int = 0
    window: int = 2
    trunc: int = 30
    lmax: int | None = None
    levels: int = 8
    box: tuple | None = None
    tol: float = 1e-9
    out: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("order", "window", "trunc", "levels"):
            if getattr(self, name) <= 0:
                raise BadArguments(f"--{name} must be positive")
        if self.higher is not None and (self.higher < 4 or self.higher % 2):
            raise BadArguments("--higher must be an even integer >= 4")
        if self.lmax is not None and self.lmax <= 0:
            raise BadArguments("--lmax must be positive")
        if self.scale < 0:
            raise BadArguments("--scale must be non-negative")
        if not self.tol > 0:
            raise BadArguments("--tol must be positive")


# -- parsing ----------------------------------------------------------------------


def parse_matrix(text: str) -> tuple:
    """``"1,1;1,-1"`` -> ``((1, 1), (1, -1))``."""
    try:
        rows = tuple(tuple(int(x) for x in r.split(",")) for r in text.strip().split(";"))
    except ValueError as e:
        raise BadArguments(f"bad matrix {text!r}") from e
    if not rows or any(len(r) != len(rows) for r in rows):
        raise BadArguments("matrix must be square")
    return rows


_VAR = re.compile(r"^(x(\d+)|x|y|z)(\^(\d+))?$")
_NUM = re.compile(r"^(\d+(/\d+)?)?(i)?$")


def parse_poly(text: str, d: int) -> MultiPoly:
    """Parse sums of terms such as ``2i*x1``, ``-3/4*x1^2*x2`` or ``i*y^3``."""
    s = text.replace(" ", "")
    if not s:
        raise BadArguments("empty polynomial")
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise BadArguments(f"cannot parse polynomial {text!r}")
    out = MultiPoly.zero(d)
    for t in terms:
        sign = -1 if t[0] == "-" else 1
        body = t.lstrip("+-")
        coef = Fraction(sign)
        exp = [0] * d
        for f in body.split("*"):
            m = _NUM.match(f)
            if m and f:
                if m.group(1):
                    coef = coef * Fraction(m.group(1))
                if m.group(3):
                    coef = coef * I
                continue
            v = _VAR.match(f)
            if not v:
                raise BadArguments(f"bad factor {f!r}")
            if v.group(2):
                i = int(v.group(2)) - 1
            else:
                i = {"x": 0, "y": 1, "z": 2}[v.group(1)]
            if not 0 <= i < d:
                raise BadArguments(f"variable {f!r} out of range")
            exp[i] += int(v.group(4) or 1)
        out = out + MultiPoly(d, {tuple(exp): coef})
    return out


def parse_nonstat(text: str, d: int) -> tuple[str, dict]:
    """Return ``(kind, kwargs)`` for :func:`nonstationary_family`."""
    t = text.strip()
    if t.startswith("sum:"):
        C = {}
        for part in t[4:].split(","):
            try:
                k, c = part.split("=")
                C[int(k)] = Fraction(c)
            except ValueError as e:
                raise BadArguments(f"bad sum term {part!r}") from e
        return "sum_of_powers", {"C": C}
    if t.startswith("X="):
        body = t[2:]
        m = 1
        if ",m=" in body:
            body, ms = body.split(",m=")
            try:
                m = int(ms)
            except ValueError as e:
                raise BadArguments(f"bad power {ms!r}") from e
        return "x_plus_wm", {"X": parse_poly(body, d), "m": m}
    raise BadArguments(
        f"unsupported nonstationary spec {text!r}; use 'X=...' or 'sum:...' "
        "or ellipsf.masks.nonstationary_family directly"
    )


def parse_box(text: str) -> tuple:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as e:
        raise BadArguments(f"bad box {text!r}, expected a:b") from e
    if not lo < hi:
        raise BadArguments("box needs a < b")
    return lo, hi


# -- deterministic JSON -----------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return '"' + repr(x) + '"'
    return format(x, ".17g")


def _emit(obj, out: io.StringIO, indent: int):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        out.write("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.write(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.write(_fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _emit({"re": obj.real, "im": obj.imag}, out, indent)
    elif isinstance(obj, Fraction):
        _emit(rat_to_str(obj), out, indent)
    elif isinstance(obj, GaussQ):
        _emit(scalar_to_json(obj), out, indent)
    elif isinstance(obj, str):
        out.write(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        items = list(obj.items())
        for n, (k, v) in enumerate(items):
            out.write(pad)
            _emit(str(k), out, indent + 1)
            out.write(": ")
            _emit(v, out, indent + 1)
            out.write(",\n" if n + 1 < len(items) else "\n")
        out.write(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.write("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            out.write("[")
            for n, v in enumerate(seq):
                if n:
                    out.write(", ")
                _emit(v, out, indent + 1)
            out.write("]")
            return
        out.write("[\n")
        for n, v in enumerate(seq):
            out.write(pad)
            _emit(v, out, indent + 1)
            out.write(",\n" if n + 1 < len(seq) else "\n")
        out.write(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with insertion-ordered keys and floats at 17 significant digits."""
    buf = io.StringIO()
    _emit(obj, buf, 0)
    buf.write("\n")
    return buf.getvalue()


# -- commands ---------------------------------------------------------------------


def _rat_matrix(M) -> list:
    return [[rat_to_str(x) for x in r] for r in M]


def build_spec(cfg: RunConfig) -> MaskSpec:
    if cfg.nonstat:
        kind, kw = parse_nonstat(cfg.nonstat, len(cfg.matrix))
        spec = nonstationary_family(cfg.matrix, kind, **kw)
        spec.order = cfg.order
        return spec
    r = cfg.higher if cfg.higher is not None else 4
    return elliptic_mask(cfg.matrix, order=cfg.order, r=r)


def cmd_analyze(cfg: RunConfig) -> dict:
    rep = is_isotropic(cfg.matrix)
    dec = decompose(cfg.matrix)
    W = quadratic_form(dec)
    inv = invariance_check(cfg.matrix, dec)
    reps = coset_reps(tuple(zip(*dec.A)))
    part = partition_check(tuple(zip(*dec.A)), cfg.window)
    return {
        "matrix": [list(r) for r in dec.A],
        "q": dec.q,
        "d": dec.d,
        "isotropic": rep.isotropic,
        "diagonalizable": rep.diagonalizable,
        "Q2": _rat_matrix(dec.Q2.data),
        "solution_dim": dec.solution_dim,
        "warnings": list(dec.warnings),
        "U": dec.U.tolist(),
        "W": W.to_json(),
        "W_text": W.to_str(),
        "coset_reps": [[rat_to_str(x) for x in s] for s in reps],
        "partition": {"window": cfg.window, "points": part.points, "ok": part.ok},
        "invariance_report": {
            "form_scaling": inv.form_scaling,
            "matrix_identity": inv.matrix_identity,
            "inverse_identity": inv.inverse_identity,
            "dual_identity": inv.dual_identity,
            "reconstruction_error": inv.reconstruction_error,
            "ok": inv.ok,
        },
    }


def cmd_mask(cfg: RunConfig) -> dict:
    spec = build_spec(cfg)
    j = cfg.scale
    G = spec.G_at(j)
    m0 = spec.mask_at(j)
    return {
        "matrix": [list(r) for r in spec.A],
        "kind": "stationary" if spec.stationary else spec.family.kind,
        "order": spec.order,
        "r": spec.r,
        "scale": j,
        "W": spec.W.to_json() if spec.W is not None else None,
        "G": G.to_json(),
        "G_text": str(G),
        "mask": m0.to_json(),
        "mask_text": str(m0),
        "mask_at_zero": m0.value_at_zero(),
    }


def _space(cfg: RunConfig, spec: MaskSpec):
    lmax = cfg.lmax or spec.default_lmax()
    return shift_invariant_space(SymbolicJets(spec), lmax, N=cfg.window, tol=cfg.tol), lmax


def cmd_space(cfg: RunConfig) -> dict:
    spec = build_spec(cfg)
    res, lmax = _space(cfg, spec)
    num = shift_invariant_space(NumericJets(spec, cfg.trunc), lmax, N=cfg.window, tol=cfg.tol)
    agree = {"numeric_order": num.order, "numeric_dims": list(num.report.dims), "max_principal_angle": None}
    same_shape = res.order == num.order and list(res.report.dims) == list(num.report.dims)
    if same_shape and res.space is not None and res.space.dim:
        ex = np.array([[complex(x) for x in v] for v in res.space.vectors(res.order)]).T
        agree["max_principal_angle"] = float(np.max(principal_angles(ex, num.basis_float)))
    agree["agree"] = same_shape and (agree["max_principal_angle"] or 0.0) < 1e-7
    out = res.to_json()
    out["route_agreement"] = agree
    return out


def cmd_verify(cfg: RunConfig) -> dict:
    spec = build_spec(cfg)
    res, _ = _space(cfg, spec)
    space = res.space
    out = {
        "order": res.order,
        "annihilation_max": verify_annihilation(spec, space, N=cfg.window, J=cfg.trunc),
        "reproduction_residuals": None,
        "partition_of_unity_error": None,
        "refinement_residual": None,
    }
    if spec.stationary:
        grid = cascade_eval(spec, cfg.levels)
        window = cfg.box[1] if cfg.box else 2.0
        out["reproduction_residuals"] = {
            p.to_str(): verify_reproduction(grid, p, window=window).residual for p in space.basis
        }
        out["partition_of_unity_error"] = grid.partition_error()
        out["refinement_residual"] = refinement_residual(grid, spec)
        out["level_diffs"] = [float(x) for x in grid.level_diffs]
    return out


def cmd_cascade(cfg: RunConfig) -> str:
    spec = build_spec(cfg)
    grid = cascade_eval(spec, cfg.levels)
    logging.getLogger("ellipsf").info("partition error %.3g", grid.partition_error())
    if cfg.box is not None:
        grid = fill_box(grid, cfg.box)
    d = grid.d
    lines = [",".join([f"x{i + 1}" for i in range(d)] + ["value"])]
    pts = grid.points
    order = np.lexsort(pts.T[::-1])
    for n in order:
        lines.append(",".join(format(float(x), ".17g") for x in pts[n]) + "," + format(float(grid.values[n].real), ".17g"))
    return "\n".join(lines) + "\n"


_COMMANDS = {
    "analyze": cmd_analyze,
    "mask": cmd_mask,
    "space": cmd_space,
    "verify": cmd_verify,
    "cascade": cmd_cascade,
}


# -- entry point ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_BAD_ARGS)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="ellipsf",
        description="Elliptic refinable functions: masks, reproduced polynomial spaces, cascade.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--matrix", default="1,1;1,-1", help="integer dilation matrix, rows separated by ';'")
    p.add_argument("--order", type=int, default=1, help="power m of the mask")
    p.add_argument("--higher", type=int, default=None, help="even degree r >= 6 for higher-degree G")
    p.add_argument("--nonstat", default=None, help="nonstationary family spec (see below)")
    p.add_argument("--scale", type=int, default=0, help="scale index j for 'mask'")
    p.add_argument("--window", type=int, default=2, help="initial lattice window radius N")
    p.add_argument("--trunc", type=int, default=30, help="number J of product factors in numeric jets")
    p.add_argument("--lmax", type=int, default=None, help="largest degree examined")
    p.add_argument("--levels", type=int, default=8, help="cascade levels")
    p.add_argument("--box", default=None, help="bounding box a:b for cascade output")
    p.add_argument("--tol", type=float, default=1e-9, help="SVD threshold of the numeric route")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    return p


def _fix_box(argv):
    """Let ``--box -6:6`` through argparse, which would read ``-6:6`` as a flag."""
    out = []
    it = iter(argv)
    for a in it:
        if a == "--box":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--box={nxt}")
        else:
            out.append(a)
    return out


def _setup_logging():
    level = os.environ.get("ELLIPSF_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise BadArguments(f"ELLIPSF_LOG must be one of {sorted(levels)}")
    logger = logging.getLogger("ellipsf")
    logger.setLevel(levels[level])
    if not any(getattr(h, "_ellipsf_cli", False) for h in logger.handlers):
        h = logging.StreamHandler(sys.stderr)
        h.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        h._ellipsf_cli = True
        logger.addHandler(h)


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(_fix_box(list(argv)))
    return RunConfig(
        command=ns.command,
        matrix=parse_matrix(ns.matrix),
        order=ns.order,
        higher=ns.higher,
        nonstat=ns.nonstat,
        scale=ns.scale,
        window=ns.window,
        trunc=ns.trunc,
        lmax=ns.lmax,
        levels=ns.levels,
        box=parse_box(ns.box) if ns.box else None,
        tol=ns.tol,
        out=ns.out,
    )


def run(cfg: RunConfig) -> str:
    result = _COMMANDS[cfg.command](cfg)
    return result if isinstance(result, str) else dumps(result)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        _setup_logging()
        cfg = config_from_args(argv)
    except BadArguments as e:
        sys.stderr.write(f"ellipsf: error: {e}\n")
        return EXIT_BAD_ARGS
    except SystemExit as e:  # argparse: --help or a usage error
        return e.code
    try:
        text = run(cfg)
    except BadArguments as e:
        sys.stderr.write(f"ellipsf: error: {e}\n")
        return EXIT_BAD_ARGS
    except NotIsotropic as e:
        sys.stderr.write(f"ellipsf: not isotropic: {e}\n")
        return EXIT_NOT_ISOTROPIC
    except NoStabilization as e:
        sys.stderr.write(f"ellipsf: no stabilization: {e}\n")
        return EXIT_NO_STABILIZATION
    except (EllipsfError, ValueError) as e:
        sys.stderr.write(f"ellipsf: {type(e).__name__}: {e}\n")
        return EXIT_CONSTRUCTION
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. `| head`); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
