"""Command-line front end.  Every command prints a JSON run report.

Exit codes: 0 pass, 1 fail, 2 usage or validation error, 3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import catalog, io
from .certificates import certify_pair, ell_chain, master_certificate, omega1_radius
from .exact import NumericalBreakdown, ValidationError, format_fraction
from .interpolation import ExtensionConfig, caratheodory_extend, one_point_extension_feasible
from .linalg import ParrottConfig, operator_norm, parrott_complete, psd_test_exact
from .sampling import gram_psd, random_grid
from .series import DiagonalSeries

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_BREAKDOWN = 0, 1, 2, 3


class Run:
    """Collects inputs and results for one report."""

    def __init__(self, command: str):
        self.command = command
        self.inputs: Dict[str, str] = {}
        self.t0 = time.perf_counter()

    def kernel(self, ref: str, degree: Optional[int]):
        """A file path (kernelspec/1 or catalog reference) or ``catalog:<name>``."""
        if ref.startswith("catalog:"):
            self.inputs[ref] = ref
            obj = {"catalog": ref.split(":", 1)[1]}
            return io.kernel_from_obj(obj, degree)
        self.inputs[ref] = io.file_hash(ref)
        return io.kernel_from_obj(io.load_json(ref), degree, Path(ref).parent)

    def load(self, path: str):
        self.inputs[path] = io.file_hash(path)
        return io.load_json(path)

    def report(self, verdict: Optional[bool], **fields) -> Dict[str, Any]:
        rep = {"command": self.command, "inputs": self.inputs, "verdict": _verdict(verdict)}
        rep.update(fields)
        rep["wall_time"] = round(time.perf_counter() - self.t0, 6)
        return rep


def _verdict(v: Optional[bool]) -> Optional[str]:
    return None if v is None else ("pass" if v else "fail")


def _diag(series, what: str) -> DiagonalSeries:
    if not isinstance(series, DiagonalSeries):
        raise ValidationError(f"{what} must be a diagonal kernel with an exact series")
    return series


def _index(a) -> List[int]:
    return list(a)


def _poly(f: DiagonalSeries) -> List[Dict[str, Any]]:
    return [{"index": list(a), "value": format_fraction(v)} for a, v in f.items()]


# ---------------------------------------------------------------------------
# commands


def cmd_mastercert(args, run: Run):
    k, _, _ = run.kernel(args.kernel, args.degree)
    k = _diag(k, "kernel")
    mc = master_certificate(k, args.degree)
    return EXIT_PASS, run.report(
        True,
        degree=mc.theta.degree,
        exact=True,
        theta=io.series_to_spec(mc.theta),
    )


def cmd_certify(args, run: Run):
    k, _, _ = run.kernel(args.k, args.degree)
    l, _, _ = run.kernel(args.l, args.degree)
    r = certify_pair(_diag(k, "k"), _diag(l, "l"), args.degree)
    fail = None
    if r.first_failure is not None:
        which, a, v = r.first_failure
        fail = {"series": which, "index": _index(a), "value": format_fraction(v)}
    return (EXIT_PASS if r.verdict else EXIT_FAIL), run.report(
        r.verdict,
        degree=r.degree,
        exact=True,
        theta=_poly(r.theta),
        first_failure=fail,
    )


def cmd_chain(args, run: Run):
    l, _, _ = run.kernel(args.l, args.degree)
    k, _, _ = run.kernel(args.k, args.degree)
    idx = [int(x) for x in args.indices.split(",") if x.strip()]
    c = ell_chain(_diag(l, "l"), _diag(k, "k"), idx)
    fail = None
    if c.first_failure is not None:
        s, d, v = c.first_failure
        fail = {"stage": s, "degree": d, "value": format_fraction(v)}
    code = EXIT_PASS if c.verdict in (True, None) else EXIT_FAIL
    return code, run.report(
        c.verdict,
        degree=min(l.degree, k.degree),
        exact=True,
        indices=list(c.indices),
        increasing=c.increasing,
        stages=[_poly(s) for s in c.stages],
        quotients=[_poly(q) for q in c.quotients],
        first_failure=fail,
    )


def cmd_psd(args, run: Run):
    H = io.obj_to_hmat(run.load(args.matrix))
    v = psd_test_exact(H)
    wit = None
    if v.witness is not None:
        w = v.witness
        wit = {
            "kind": w.kind,
            "position": list(w.position),
            "vector": [[format_fraction(x.re), format_fraction(x.im)] for x in w.vector],
            "value": format_fraction(w.value),
            "minor_indices": list(w.minor_indices),
            "minor_det": format_fraction(w.minor_det),
        }
    return (EXIT_PASS if v.is_psd else EXIT_FAIL), run.report(
        v.is_psd, exact=True, n=H.n, pivots=list(v.pivots), witness=wit
    )


def cmd_parrott(args, run: Run):
    obj = run.load(args.blocks)
    A, C, D = (io.float_matrix(obj[x]) for x in ("A", "C", "D"))
    cfg = ParrottConfig(slack=args.tol, guarantee=args.guarantee)
    B = parrott_complete(A, C, D, cfg)
    full = np.block([[A, B], [C, D]])
    mu = max(operator_norm(np.vstack([A, C])), operator_norm(np.hstack([C, D])))
    nrm = operator_norm(full)
    ok = nrm <= mu + cfg.guarantee
    return (EXIT_PASS if ok else EXIT_FAIL), run.report(
        ok,
        exact=False,
        tolerances={"slack": cfg.slack, "cutoff": cfg.cutoff, "guarantee": cfg.guarantee},
        B=io.float_matrix_to_obj(B),
        constraint_norm=mu,
        completed_norm=nrm,
    )


def _parse_point(s: str):
    coords = [complex(c.replace(" ", "")) for c in s.split(";")]
    return coords[0] if len(coords) == 1 else tuple(coords)


def cmd_pick(args, run: Run):
    obj = run.load(args.problem)
    p = io.obj_to_pick(obj, Path(args.problem).parent)
    z = _parse_point(args.new_point)
    v = one_point_extension_feasible(p, z, tol=args.tol, independence_tol=args.independence)
    return (EXIT_PASS if v.feasible else EXIT_FAIL), run.report(
        v.feasible,
        exact=False,
        tolerances={"psd": args.tol, "independence": args.independence},
        data_min_eig=v.data_min_eig,
        extension_min_eig=v.extension_min_eig,
        norm=v.norm,
    )


def cmd_cc_extend(args, run: Run):
    data = io.obj_to_ccdata(run.load(args.data))
    d = tuple(int(x) for x in args.d.split(","))
    top = sum(d)
    k, _, _ = run.kernel(args.k, max(args.degree or 0, top))
    l, _, _ = run.kernel(args.l, max(args.degree or 0, top))
    cfg = ExtensionConfig(slack=args.tol)
    ext = caratheodory_extend(data, _diag(k, "k"), _diag(l, "l"), d, cfg)
    ok = ext.slack <= cfg.slack
    return (EXIT_PASS if ok else EXIT_FAIL), run.report(
        ok,
        exact=False,
        exact_psd_after_rounding=ext.exact_psd,
        exact_inputs=ext.exact_inputs,
        tolerances={"slack": cfg.slack, "rounding": cfg.rounding},
        slack=ext.slack,
        c_d=io.float_matrix_to_obj(ext.c_d),
        data=io.ccdata_to_obj(ext.data),
    )


def cmd_radius(args, run: Run):
    theta, _, _ = run.kernel(args.theta, args.degree)
    r = omega1_radius(_diag(theta, "theta"), tol=args.tol)
    return EXIT_PASS, run.report(
        True, exact=False, tolerances={"bisection": args.tol}, radius=("inf" if r == float("inf") else r)
    )


def cmd_catalog(args, run: Run):
    params = json.loads(args.params) if args.params else {}
    h = catalog.lookup(args.name, **params)
    run.inputs[args.name] = json.dumps(params, sort_keys=True)
    if h.series_fn is None:
        raise ValidationError(f"{args.name} is float-only and has no kernel spec")
    ser = h.series(args.degree if args.degree is not None else 10)
    return EXIT_PASS, run.report(True, exact=True, name=h.name, params=h.params, spec=io.series_to_spec(ser))


def cmd_sample_check(args, run: Run):
    _, h, _ = run.kernel(args.kernel, None)
    if args.grid:
        grid = io.obj_to_grid(run.load(args.grid))
    else:
        radius = args.radius if args.radius is not None else 0.5 * getattr(h, "radius", 1.0)
        grid = random_grid(args.count, radius, args.seed, getattr(h, "variables", 1))
    v = gram_psd(h, grid, tol=args.tol)
    return (EXIT_PASS if v.ok else EXIT_FAIL), run.report(
        v.ok,
        exact=False,
        tolerances={"psd": v.tol},
        seed=v.seed,
        points=v.points,
        radius=grid.radius,
        min_eig=v.min_eig,
        norm=v.norm,
    )


COMMANDS = {
    "mastercert": cmd_mastercert,
    "certify": cmd_certify,
    "chain": cmd_chain,
    "psd": cmd_psd,
    "parrott": cmd_parrott,
    "pick": cmd_pick,
    "cc_extend": cmd_cc_extend,
    "radius": cmd_radius,
    "catalog": cmd_catalog,
    "sample_check": cmd_sample_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kernelcert", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json"], default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    p = add("mastercert", "master certificate of a diagonal kernel")
    p.add_argument("kernel")
    p.add_argument("--degree", type=int)

    p = add("certify", "CC verdict for a diagonal pair")
    p.add_argument("k")
    p.add_argument("l")
    p.add_argument("--degree", type=int)

    p = add("chain", "recursive chain l_(m0, m1, ...) and quotient positivity")
    p.add_argument("l")
    p.add_argument("k")
    p.add_argument("--indices", required=True, help="comma separated, e.g. 0,2,3")
    p.add_argument("--degree", type=int)

    p = add("psd", "exact PSD test of an hmat/1 file")
    p.add_argument("matrix")

    p = add("parrott", "central completion of a JSON file with blocks A, C, D")
    p.add_argument("blocks")
    p.add_argument("--tol", type=float, default=1e-9, help="allowed norm excess of the inputs")
    p.add_argument("--guarantee", type=float, default=1e-8)

    p = add("pick", "one-point extension feasibility of a pick/1 problem")
    p.add_argument("problem")
    p.add_argument("--new-point", required=True, help="complex coordinates separated by ';'")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--independence", type=float, default=1e-10)

    p = add("cc_extend", "one-step Caratheodory extension of a ccdata/1 file")
    p.add_argument("data")
    p.add_argument("k")
    p.add_argument("l")
    p.add_argument("--d", required=True, help="new multi-index, comma separated")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float, default=1e-8)

    p = add("radius", "radius of the domain sum theta_n r^(2n) < 1")
    p.add_argument("theta")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float, default=1e-12)

    p = add("catalog", "emit the kernel spec of a catalog kernel")
    p.add_argument("name")
    p.add_argument("--params", help="JSON object of parameters")
    p.add_argument("--degree", type=int)

    p = add("sample_check", "Gram PSD check of a kernel on a grid")
    p.add_argument("kernel")
    p.add_argument("--grid")
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--radius", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    run = Run(args.command)
    try:
        code, rep = COMMANDS[args.command](args, run)
    except ValidationError as e:
        code, rep = EXIT_INVALID, run.report(None, error=str(e), error_kind="validation")
    except NumericalBreakdown as e:
        code, rep = EXIT_BREAKDOWN, run.report(None, error=str(e), error_kind="breakdown")
    text = io.dumps(rep)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
