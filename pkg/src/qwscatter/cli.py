"""Command-line interface.

Momenta are written ``p/q`` and mean -pi*p/q.  Exit status: 0 success,
1 input error, 2 verification failure.  Errors go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import approx, constructions, dynamics, exactq2
from .graphcore import Gadget, GadgetError, Momentum, load_gadget, momentum_grid, save_gadget
from .scatter import ScatteringError, classify_rt, is_momentum_switch, s_matrix


class VerificationFailure(Exception):
    """A check ran correctly and answered no."""


def _pair(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _read_gadget(path: str) -> Gadget:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GadgetError(f"cannot read {path}: {exc}") from exc
    return load_gadget(text)


def _momenta(values) -> list[Momentum]:
    return [Momentum.parse(v) for v in values or []]


def _spec_from_args(args) -> constructions.Type1Spec:
    if args.spec:
        doc = json.loads(Path(args.spec).read_text())
        g0 = load_gadget(doc["g0"])
        return constructions.Type1Spec(g0, tuple(doc["attach"]), doc.get("name"))
    fam = args.family
    params = [int(p) for p in args.params]
    if fam == "path" and len(params) == 2:
        return constructions.path_spec(*params)
    if fam == "cycle" and len(params) == 1:
        return constructions.cycle_spec(*params)
    raise GadgetError(f"expected 'path L1 L2', 'cycle R' or --spec, got {fam} {params}")


def cmd_build(args):
    params = [int(p) for p in args.params]
    sidecar = None
    if args.family == "path":
        if len(params) != 2:
            raise GadgetError("path needs L1 L2")
        fam = constructions.path_gadget(*params)
        g, sidecar = fam.gadget, fam.predicted
    elif args.family == "cycle":
        if len(params) != 1:
            raise GadgetError("cycle needs R")
        fam = constructions.cycle_gadget(*params)
        g, sidecar = fam.gadget, fam.predicted
    elif args.family == "approx_switch":
        if len(params) != 1:
            raise GadgetError("approx_switch needs M")
        g = constructions.approx_switch(params[0])
    else:
        g = constructions.named_gadget(args.family)
    _write(save_gadget(g) + "\n", args.out)
    if sidecar is not None:
        doc = {
            "reflect": [k.label for k in sidecar.reflect_set],
            "transmit": [k.label for k in sidecar.transmit_set],
            "grid": [k.label for k in sidecar.grid],
        }
        if args.out:
            Path(args.out + ".predicted.json").write_text(_dump(doc))
        else:
            sys.stdout.write(_dump(doc))
    return 0


def cmd_smatrix(args):
    g = _read_gadget(args.gadget)
    ks = _momenta(args.k)
    if args.random_k:
        rng = np.random.default_rng(args.seed)
        ks += [Momentum.from_float(-np.pi * u) for u in rng.uniform(0.01, 0.99, args.random_k)]
    if not ks:
        raise GadgetError("no momenta given")
    mats = [s_matrix(g, k) for k in ks]
    if args.format == "csv":
        rows = []
        for S in mats:
            N = S.entries.shape[0]
            for i in range(N):
                for j in range(N):
                    z = S.entries[i, j]
                    rows.append([S.momentum.label, i + 1, j + 1, f"{abs(z):.15g}", f"{np.angle(z):.15g}"])
        _write(_csv(rows, ["k", "row", "col", "magnitude", "phase"]), args.out)
    else:
        doc = [{
            "k": S.momentum.label,
            "k_value": S.momentum.value,
            "matrix": [[_pair(z) for z in row] for row in S.entries],
            "unitarity_error": S.unitarity_error(),
            "symmetry_error": S.symmetry_error(),
        } for S in mats]
        _write(_dump(doc), args.out)
    return 0


def cmd_classify(args):
    g = _read_gadget(args.gadget)
    grid = _momenta(args.k) or momentum_grid(args.grid)
    res = classify_rt(g, grid, args.tol)
    if args.format == "csv":
        rows = []
        for k in grid:
            S = s_matrix(g, k).entries
            kind = "R" if k in res.reflect_set else "T" if k in res.transmit_set else ""
            rows.append([k.label, f"{abs(S[0, 0]):.15g}", f"{abs(S[1, 0]):.15g}", kind])
        _write(_csv(rows, ["k", "abs_S11", "abs_S12", "class"]), args.out)
    else:
        _write(_dump({
            "reflect": [k.label for k in res.reflect_set],
            "transmit": [k.label for k in res.transmit_set],
            "grid": [k.label for k in grid],
            "tol": args.tol,
        }), args.out)
    return 0


def cmd_check_switch(args):
    g = _read_gadget(args.gadget)
    verdict = is_momentum_switch(g, _momenta(args.D), _momenta(args.Dp), args.tol)
    _write(_dump({
        "is_switch": verdict.is_switch,
        "abs_S12": {k.label: v for k, v in verdict.to_second.items()},
        "abs_S13": {k.label: v for k, v in verdict.to_third.items()},
    }), args.out)
    if not verdict.is_switch:
        raise VerificationFailure("not a momentum switch for the given sets")
    return 0


def cmd_reversal(args):
    g = constructions.reversal(_spec_from_args(args))
    _write(save_gadget(g) + "\n", args.out)
    return 0


def cmd_switch_from(args):
    g = constructions.switch_from_type2(_spec_from_args(args))
    _write(save_gadget(g) + "\n", args.out)
    return 0


def cmd_exact_check(args):
    g = _read_gadget(args.gadget)
    doc = {"gadget": g.name}
    for k in (approx.K_QUARTER, approx.K_THREEQUARTER):
        S = exactq2.exact_s_matrix(g, k)
        doc[k.label] = {
            "s_matrix": [[exactq2.format_q2(z) for z in row] for row in S],
        }
    failed = False
    if g.n_terminals == 2:
        try:
            res = exactq2.conjugation_check(g)
            doc["conjugation"] = res.verdict
            if res.witness is not None and args.witness:
                w = res.witness
                doc["witness"] = {
                    "alpha": exactq2.format_q2(w.alpha),
                    "ratio": [str(w.ratio[0]), str(w.ratio[1])],
                    "c": [str(x) for x in w.c_vector],
                    "conjugated_state": [exactq2.format_q2(x) for x in w.conjugated_state],
                    "x0": w.x0,
                }
        except exactq2.ConjugationAlarm as exc:
            doc["conjugation"] = "alarm"
            doc["alarm"] = str(exc)
            failed = True
    _write(_dump(doc), args.out)
    if failed:
        raise VerificationFailure("conjugation construction failed")
    return 0


def cmd_approx_search(args):
    rows = []
    validations = {}
    for m, e, f, rec in approx.error_table(args.max_m):
        if args.records_only and not rec:
            continue
        row = [m, f"{e:.12g}", f"{f:.12g}", int(rec)]
        if args.validate and rec and m <= args.validate_max_m:
            v = approx.validate_against_graph(m, args.tol)
            validations[m] = v
            row.append(f"{v.deviation:.3e}")
        elif args.validate:
            row.append("")
        rows.append(row)
    header = ["m", "error_spectral", "error_frobenius", "is_record"]
    if args.validate:
        header.append("graph_deviation")
    _write(_csv(rows, header), args.out)
    if any(not v.passed for v in validations.values()):
        raise VerificationFailure("closed form disagrees with the graph S-matrix")
    return 0


def cmd_simulate(args):
    g = _read_gadget(args.gadget)
    (k,) = _momenta(args.k) or [None]
    if k is None:
        raise GadgetError("simulate needs exactly one --k")
    center = args.center if args.center is not None else dynamics.default_center(args.L)
    packet = dynamics.WavePacket(args.arm, center, args.sigma, k)
    rep = dynamics.scatter_experiment(g, packet, args.L, args.T)
    N = g.n_terminals
    header = ["t"] + [f"p_arm{j + 1}" for j in range(N)] + ["norm"]
    _write(_csv([[f"{x:.12g}" for x in row] for row in rep.series], header), args.out)
    report = {
        "k": k.label,
        "arm": args.arm + 1,
        "sigma": args.sigma,
        "L": args.L,
        "time": rep.time,
        "arm_probabilities": rep.arm_probabilities.tolist(),
        "predicted": rep.predicted.tolist(),
        "residual": rep.residual,
        "norm_drift": rep.norm_drift,
        "energy_drift": rep.energy_drift,
        "valid": rep.valid,
        "max_leak": rep.max_leak,
    }
    if args.report:
        Path(args.report).write_text(_dump(report))
    else:
        sys.stderr.write(_dump(report))
    if not rep.valid:
        raise VerificationFailure("packet reached the end of a truncated path")
    return 0


def cmd_catalog(args):
    if args.format == "csv":
        _write(_csv(constructions.CATALOG, ["name", "description"]), args.out)
    else:
        _write(_dump([{"name": n, "description": d} for n, d in constructions.CATALOG]), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwscatter", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--seed", type=int, default=0)
        if fmt:
            sp.add_argument("--format", choices=["json", "csv"], default="json")

    def family(sp):
        sp.add_argument("family", nargs="?", help="path | cycle")
        sp.add_argument("params", nargs="*")
        sp.add_argument("--spec", help="JSON {'g0': gadget document, 'attach': [v]}")

    sp = sub.add_parser("build", help="emit a gadget as JSON")
    sp.add_argument("family", help="path | cycle | approx_switch | named gadget")
    sp.add_argument("params", nargs="*")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("smatrix", help="S-matrix at given momenta")
    sp.add_argument("--gadget", required=True)
    sp.add_argument("--k", action="append")
    sp.add_argument("--random-k", type=int, default=0, help="also sample this many random momenta")
    common(sp)
    sp.set_defaults(func=cmd_smatrix)

    sp = sub.add_parser("classify", help="R/T classification of a two-terminal gadget")
    sp.add_argument("--gadget", required=True)
    sp.add_argument("--k", action="append")
    sp.add_argument("--grid", type=int, default=12, help="use {-pi j/q} when no --k is given")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("check-switch", help="momentum-switch test")
    sp.add_argument("--gadget", required=True)
    sp.add_argument("--D", action="append", required=True)
    sp.add_argument("--Dp", action="append", required=True)
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_check_switch)

    sp = sub.add_parser("reversal", help="reverse a type 2 gadget")
    family(sp)
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_reversal)

    sp = sub.add_parser("switch-from", help="momentum switch from a type 2 gadget")
    family(sp)
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_switch_from)

    sp = sub.add_parser("exact-check", help="exact Q(sqrt2) analysis at -pi/4 and -3pi/4")
    sp.add_argument("--gadget", required=True)
    sp.add_argument("--witness", action="store_true")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_exact_check)

    sp = sub.add_parser("approx-search", help="switch error of the m-copy approximate switch")
    sp.add_argument("--max-m", type=int, required=True)
    sp.add_argument("--validate", action="store_true")
    sp.add_argument("--validate-max-m", type=int, default=41)
    sp.add_argument("--records-only", action="store_true")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_approx_search, tol=1e-8)

    sp = sub.add_parser("simulate", help="wave-packet scattering run")
    sp.add_argument("--gadget", required=True)
    sp.add_argument("--k", action="append", required=True)
    sp.add_argument("--arm", type=int, default=0, help="0-based incoming terminal index")
    sp.add_argument("--sigma", type=float, default=10.0)
    sp.add_argument("--L", type=int, default=None)
    sp.add_argument("--center", type=float, default=None)
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--report", help="JSON report path (default stderr)")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("catalog", help="list named gadgets and families")
    common(sp)
    sp.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "L", "absent") is None:
        args.L = int(round(20 * args.sigma))
    try:
        return args.func(args)
    except VerificationFailure as exc:
        sys.stderr.write(json.dumps({"error": "verification", "message": str(exc)}) + "\n")
        return 2
    except (GadgetError, ValueError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps({"error": "input", "message": str(exc)}) + "\n")
        return 1
    except ScatteringError as exc:
        sys.stderr.write(json.dumps({"error": "internal", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
