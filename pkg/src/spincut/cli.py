"""Command-line front end.

Every subcommand builds a report dictionary and prints it either as
sorted ``key: value`` lines (``--format text``) or as JSON with sorted keys
(``--format structured``).  Exit codes: 0 pass, 1 verification failure,
2 input error (the report then carries an ``error`` block).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from . import bounds, fixtures
from . import gf2forms as gf2
from .cutmetrics import spin_cut_diameter_lower
from .flattorus import FlatTorus, dirac_spectrum, verify_torus_theorem
from .spin import ARF_MINUS_ONE, SearchBudget, SpinCutNotFound, SpinStructure, arf, torus_of_revolution
from .surface import Cycle, MeshError, dump_mesh, genus, load_mesh
from .willmore import check_willmore_theorem, willmore_energy

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Bad command-line input."""


# parsing helpers ---------------------------------------------------------


def _bits(text: str) -> tuple[int, ...]:
    s = text.replace(",", "").replace(" ", "")
    if not s or any(ch not in "01" for ch in s):
        raise argparse.ArgumentTypeError(f"expected a bit string, got {text!r}")
    return tuple(int(ch) for ch in s)


def _vec2(text: str) -> tuple[float, float]:
    try:
        x, y = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise argparse.ArgumentTypeError("coordinates must be finite")
    return x, y


def _eps(text: str) -> tuple[int, int]:
    b = _bits(text)
    if len(b) != 2:
        raise argparse.ArgumentTypeError("eps takes two bits, e.g. 1,0")
    return b


# report plumbing -----------------------------------------------------------


def _header(command: str, args) -> dict:
    return {"tool": "spincut", "version": __version__, "command": command, "seed": args.seed}


def _flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out.extend(_flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return out
    return [(prefix, obj)]


def render(report: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []
    for key, val in _flatten(report):
        lines.append(f"{key}: {json.dumps(val, sort_keys=True)}")
    return "\n".join(lines)


def _budget(args) -> SearchBudget:
    kw = {"seed": args.seed, "subdivision": args.subdivision}
    if args.budget is not None:
        if args.budget < 1:
            raise InputError("--budget must be a positive integer")
        kw["max_cuts"] = args.budget
    return SearchBudget(**kw)


def _read_mesh(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return load_mesh(data)


def _spin_for(m, bits):
    """Spin structure from ``--spin`` bits (file basis if present) or the file block."""
    block = m.spin or {}
    if bits is not None:
        basis = [Cycle(tuple(c)) for c in block["basis_cycles"]] if block.get("basis_cycles") else None
        return SpinStructure.from_values(m, bits, basis)
    if "q_values" in block:
        return SpinStructure.from_mesh_block(m)
    return None


# subcommands -------------------------------------------------------------


def cmd_analyze(args) -> tuple[dict, int]:
    rep = _header("analyze", args)
    rep["input"] = {"mesh": str(args.mesh)}
    m = _read_mesh(args.mesh)
    g = genus(m)
    A = m.area()
    rep.update({"genus": g, "area": A, "vertices": m.n_vertices, "faces": m.n_faces})
    if g == 0:
        rep["bounds"] = {"sphere": bounds.report("sphere", 0, A).as_dict()}
        rep["passed"] = True
        return rep, EXIT_PASS
    s = _spin_for(m, args.spin)
    if s is None:
        raise InputError("no spin structure: pass --spin or include spin.q_values in the mesh file")
    a = arf(s)
    rep["spin"] = {"q_values": list(s.q.bits()), "arf": a}
    if a == -1:
        rep["spin_cut"] = None
        rep["notes"] = "Arf invariant is -1: no spin-cut exists, bounds omitted"
        rep["passed"] = True
        return rep, EXIT_PASS
    try:
        est = spin_cut_diameter_lower(m, s, _budget(args))
    except SpinCutNotFound as exc:
        rep["spin_cut"] = None
        rep["error"] = {"type": "SpinCutNotFound", "reason": exc.reason, "message": str(exc)}
        rep["passed"] = False
        return rep, EXIT_FAIL
    cut = est.witness
    cert = cut.certificate()
    rep["spin_cut"] = {
        "cycles": [list(c.vertices) for c in cut.cycles],
        "classes": [list(gf2.unpack(c, s.basis.dim)) for c in cut.classes],
        "certificate": cert,
        "refined": cut.mesh is not m,
    }
    rep["delta"] = {"value": est.best, "cuts_tried": est.cuts_tried, "subdivision": args.subdivision}
    reports = {"genus": bounds.report("genus", g, A, est.best).as_dict()}
    if g == 1:
        reports["torus"] = bounds.report("torus", 1, A, est.best).as_dict()
    rep["bounds"] = reports
    rep["passed"] = all(cert.values())
    return rep, EXIT_PASS if rep["passed"] else EXIT_FAIL


def _flat_torus(args) -> FlatTorus:
    return FlatTorus.from_eps(args.b1, args.b2, args.eps)


def cmd_flattorus_spectrum(args) -> tuple[dict, int]:
    rep = _header("flattorus spectrum", args)
    t = _flat_torus(args)
    if args.cutoff is None or not args.cutoff > 0:
        raise InputError("--cutoff must be positive")
    sl = dirac_spectrum(t, args.cutoff)
    rep["input"] = {"b1": list(t.b1), "b2": list(t.b2), "eps": list(t.eps), "cutoff": args.cutoff}
    rep["arf"] = t.arf
    rep["spectrum"] = [float(x) for x in sl.values]
    rep["count"] = len(sl)
    rep["passed"] = True
    return rep, EXIT_PASS


def cmd_flattorus_verify(args) -> tuple[dict, int]:
    rep = _header("flattorus verify", args)
    t = _flat_torus(args)
    rep["input"] = {"b1": list(t.b1), "b2": list(t.b2), "eps": list(t.eps)}
    if t.is_trivial:
        raise InputError("eps=(0,0) is the trivial spin structure: it has harmonic spinors and no spin-cut")
    v = verify_torus_theorem(t)
    rep["verification"] = v.as_dict()
    rep["passed"] = v.passed
    return rep, EXIT_PASS if v.passed else EXIT_FAIL


def cmd_willmore(args) -> tuple[dict, int]:
    rep = _header("willmore", args)
    if args.revolution is not None:
        R, r, nu, nv = args.revolution
        if int(nu) != nu or int(nv) != nv:
            raise InputError("nu and nv must be integers")
        m, s = torus_of_revolution(R, r, int(nu), int(nv))
        rep["input"] = {"revolution": {"R": R, "r": r, "nu": int(nu), "nv": int(nv)}}
    elif args.mesh is not None:
        m = _read_mesh(args.mesh)
        s = None
        rep["input"] = {"mesh": str(args.mesh)}
    else:
        raise InputError("give a mesh file or --revolution R r nu nv")
    w = willmore_energy(m)
    g = genus(m)
    rep.update({"genus": g, "area": m.area(), "W": w.W})
    rep["passed"] = True
    if g != 1:
        rep["theorem"] = {"skipped": f"the Willmore bound needs a torus; genus is {g}"}
        return rep, EXIT_PASS
    if s is None:
        s = _spin_for(m, args.spin)
    if s is None:
        rep["theorem"] = {"skipped": "no spin structure given (--spin or spin block)"}
        return rep, EXIT_PASS
    try:
        v = check_willmore_theorem(m, s, _budget(args))
    except SpinCutNotFound as exc:
        rep["theorem"] = {"skipped": str(exc), "reason": exc.reason}
        if exc.reason == ARF_MINUS_ONE:
            return rep, EXIT_PASS
        rep["passed"] = False
        return rep, EXIT_FAIL
    rep["theorem"] = v.as_dict()
    rep["passed"] = v.passed
    return rep, EXIT_PASS if v.passed else EXIT_FAIL


def cmd_fixtures(args) -> tuple[dict | None, int]:
    name = args.name
    spin = args.spin
    if name == "grid-torus":
        m, basis = fixtures.grid_torus(args.n, args.width, args.height)
    elif name == "sheared":
        m, basis = fixtures.lattice_torus(args.b1, args.b2, args.n1, args.n2)
    elif name == "genus2":
        m, basis = fixtures.genus2_surface(args.n)
    elif name == "icosphere":
        m, basis = fixtures.icosphere(args.level, args.radius), []
    elif name == "revolution":
        m, basis = fixtures.torus_of_revolution_mesh(args.R, args.r, args.nu, args.nv)
        spin = spin if spin is not None else (0, 0)
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown fixture {name!r}")
    block = None
    if basis:
        block = {"basis_cycles": [list(c.vertices) for c in basis]}
        if spin is not None:
            if len(spin) != len(basis):
                raise InputError(f"--spin needs {len(basis)} bits for this fixture")
            block = fixtures.spin_block(basis, spin)
    elif spin is not None:
        raise InputError("a sphere carries a unique spin structure; drop --spin")
    text = dump_mesh(m, spin=block)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.output}: {exc.strerror}") from None
        rep = _header("fixtures", args)
        rep.update({"fixture": name, "output": args.output, "vertices": m.n_vertices, "genus": genus(m), "passed": True})
        return rep, EXIT_PASS
    sys.stdout.write(text + "\n")
    return None, EXIT_PASS


def cmd_arf(args) -> tuple[dict, int]:
    rep = _header("arf", args)
    bits = args.bits
    if len(bits) % 2:
        raise InputError("need q-values on a symplectic basis e1,f1,...: an even number of bits")
    q = gf2.QuadraticForm.standard(bits)
    a = gf2.arf_fast(q)
    rep["input"] = {"q_values": list(bits)}
    rep["genus"] = q.genus
    rep["arf"] = a
    if q.dim <= gf2.ARF_NAIVE_MAX_DIM:
        rep["arf_naive"] = gf2.arf_naive(q)
    lag = gf2.lagrangian_zero_basis(q)
    rep["lagrangian_zero_basis"] = None if lag is None else [list(gf2.unpack(v, q.dim)) for v in lag]
    rep["passed"] = rep.get("arf_naive", a) == a
    return rep, EXIT_PASS if rep["passed"] else EXIT_FAIL


# argument parser ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed recorded in the report (searches are deterministic)")
    common.add_argument("--format", choices=("text", "structured"), default="text")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--spin", type=_bits, help="q-values on the homology basis, e.g. 01 or 0,1")
    search.add_argument("--subdivision", type=int, default=0, help="Steiner level for distances")
    search.add_argument("--budget", type=int, default=None, help="maximum number of spin-cuts examined")

    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument("--b1", type=_vec2, default=(1.0, 0.0))
    lattice.add_argument("--b2", type=_vec2, default=(0.0, 1.0))
    lattice.add_argument("--eps", type=_eps, default=(1, 0), help="twist bits; 1 = nontrivial along b_i")

    p = argparse.ArgumentParser(prog="spincut", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"spincut {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common, search], help="spin-cut, delta and bounds for a mesh")
    a.add_argument("mesh")
    a.set_defaults(func=cmd_analyze)

    ft = sub.add_parser("flattorus", help="exact flat-torus spectra")
    ftsub = ft.add_subparsers(dest="action", required=True)
    sp = ftsub.add_parser("spectrum", parents=[common, lattice])
    sp.add_argument("--cutoff", type=float, default=10.0)
    sp.set_defaults(func=cmd_flattorus_spectrum)
    ve = ftsub.add_parser("verify", parents=[common, lattice])
    ve.set_defaults(func=cmd_flattorus_verify)

    w = sub.add_parser("willmore", parents=[common, search], help="discrete Willmore energy and bound")
    w.add_argument("mesh", nargs="?")
    w.add_argument("--revolution", nargs=4, type=float, metavar=("R", "r", "nu", "nv"))
    w.set_defaults(func=cmd_willmore)

    fx = sub.add_parser("fixtures", parents=[common], help="write a fixture mesh")
    fx.add_argument("name", choices=("grid-torus", "sheared", "genus2", "icosphere", "revolution"))
    fx.add_argument("--n", type=int, default=8)
    fx.add_argument("--width", type=float, default=1.0)
    fx.add_argument("--height", type=float, default=1.0)
    fx.add_argument("--b1", type=_vec2, default=(1.0, 0.0))
    fx.add_argument("--b2", type=_vec2, default=(0.3, 1.0))
    fx.add_argument("--n1", type=int, default=16)
    fx.add_argument("--n2", type=int, default=16)
    fx.add_argument("--level", type=int, default=4)
    fx.add_argument("--radius", type=float, default=1.0)
    fx.add_argument("--R", type=float, default=math.sqrt(2))
    fx.add_argument("--r", type=float, default=1.0)
    fx.add_argument("--nu", type=int, default=64)
    fx.add_argument("--nv", type=int, default=64)
    fx.add_argument("--spin", type=_bits, help="q-values stored in the spin block")
    fx.add_argument("-o", "--output")
    fx.set_defaults(func=cmd_fixtures)

    ar = sub.add_parser("arf", parents=[common], help="Arf invariant of q-values on e1,f1,e2,f2,...")
    ar.add_argument("bits", type=_bits)
    ar.set_defaults(func=cmd_arf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    fmt = getattr(args, "format", "text")
    try:
        rep, code = args.func(args)
    except (InputError, MeshError, gf2.FormError, ValueError) as exc:
        name = args.command + (f" {args.action}" if getattr(args, "action", None) else "")
        rep = _header(name, args)
        rep["error"] = {"type": type(exc).__name__, "message": str(exc)}
        rep["passed"] = False
        print(render(rep, fmt))
        print(f"spincut: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if rep is not None:
        print(render(rep, fmt))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
