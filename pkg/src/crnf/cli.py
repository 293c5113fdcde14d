"""Command line front end.

Exit codes: 0 success, 2 DegenerateW, 3 NonAffineResolution, 4 schema error,
1 anything else.  Reports are JSON with exact rational strings everywhere and
are written atomically (temp file in the target directory, then rename), so
interrupted runs never leave torn files.  Identical invocations produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile

from . import rand
from .errors import CrnfError, SchemaError
from .fischer import chain_decompose, compute_W, fischer_divide
from .normalform import (
    NormalFormResult,
    invariance_check,
    normalize,
    solve_linear_gate,
    verify_normal_form,
)
from .poly import BiPoly, poly_from_records, poly_to_records, trace
from .scalars import ParamScalar, parse_gauss, set_param_degree_cap
from .surface import (
    _scalar_to_json,
    map_from_json,
    map_to_json,
    push_forward,
    surface_from_json,
    surface_to_json,
    transform_residual,
)


def _locate_token(text: str, token: str):
    pos = text.find(json.dumps(token))
    if pos < 0:
        pos = text.find(token)
    if pos < 0:
        return None, None
    line = text.count("\n", 0, pos) + 1
    column = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, column


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: {exc.msg}", line=exc.lineno, column=exc.colno) from exc


def _convert(path: str, text: str, converter, data):
    """Run a from-json converter, attaching line/column to bad literals."""
    try:
        return converter(data)
    except SchemaError as exc:
        if exc.line is None:
            message = str(exc)
            token = None
            if "'" in message:
                token = message.split("'")[1]
            if token is not None:
                line, column = _locate_token(text, token)
                if line is not None:
                    raise SchemaError(f"{path}: {message}", line=line, column=column) from exc
        raise SchemaError(f"{path}: {exc}") from exc


def _load_surface(path: str):
    data, text = _load_json(path)
    return _convert(path, text, surface_from_json, data)


def _load_map(path: str):
    data, text = _load_json(path)
    return _convert(path, text, map_from_json, data)


def _load_poly(path: str):
    data, text = _load_json(path)
    if isinstance(data, dict) and "poly" in data:
        data = data["poly"]
    return _convert(path, text, poly_from_records, data)


def _emit(report: dict, out_path: str | None) -> None:
    payload = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out_path is None:
        sys.stdout.write(payload)
        return
    directory = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".crnf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(payload)
        os.replace(tmp_path, out_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _scalar_json(value):
    return _scalar_to_json(value)


def _result_to_json(result: NormalFormResult) -> dict:
    degrees = []
    for rep in result.degrees:
        entry = {
            "degree": rep.degree,
            "kernel_dim": rep.kernel_dim,
            "params_introduced": list(rep.params_introduced),
            "conditions": [
                {
                    "degree": c.degree,
                    "status": c.status,
                    "parameter": c.parameter,
                    "detail": c.detail,
                }
                for c in rep.conditions
            ],
            "normal_component": poly_to_records(rep.normal_component)
            if rep.normal_component is not None and not _parametric(rep.normal_component)
            else _parametric_records(rep.normal_component),
        }
        if rep.chain_membership is not None:
            entry["chain_membership"] = rep.chain_membership
        degrees.append(entry)
    params = []
    for p in result.params:
        entry = {"name": p.name, "birth_degree": p.birth_degree, "status": p.status}
        if p.value is not None:
            entry["value"] = _scalar_json(p.value)
        params.append(entry)
    return {
        "order": result.order,
        "strategy": result.strategy,
        "resonance": result.resonance,
        "surface": surface_to_json(result.surface),
        "map": map_to_json(result.map),
        "invariant_w": poly_to_records(result.invariant_w),
        "degrees": degrees,
        "params": params,
        "unresolved": result.unresolved_params(),
    }


def _parametric(p: BiPoly) -> bool:
    return any(
        isinstance(v, ParamScalar) and not v.is_constant() for v in p.coeff.values()
    )


def _parametric_records(p: BiPoly | None):
    if p is None:
        return []
    out = []
    for (m, n), val in p.terms():
        rec = {"m": m, "n": n}
        rec.update(_scalar_json(val))
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# subcommands


def _cmd_fischer(args) -> int:
    p = _load_poly(args.infile)
    if args.fischer_cmd == "divide":
        split = fischer_divide(p)
        report = {
            "quotient": poly_to_records(split.quotient),
            "remainder": poly_to_records(split.remainder),
            "trace_free": trace(split.remainder).is_zero(),
        }
    elif args.fischer_cmd == "chain":
        chain = chain_decompose(p)
        report = {
            "degree": chain.degree,
            "remainders": [poly_to_records(r) for r in chain.remainders],
            "final_quotient": poly_to_records(chain.final_quotient),
            "reassembles": chain.reassemble() == p,
        }
    else:  # W
        w = compute_W(p)
        report = {"W": poly_to_records(w), "nonzero": not w.is_zero()}
    _emit(report, args.out)
    return 0


def _cmd_gate(args) -> int:
    verdict = solve_linear_gate(parse_gauss(args.f10), parse_gauss(args.g01))
    report = {
        "accepted": verdict.accepted,
        "f10": str(verdict.f10),
        "g01": str(verdict.g01),
    }
    if verdict.accepted:
        report["normalized"] = {"f10": "1", "g01": "1"}
    else:
        report["violated"] = verdict.violated
    _emit(report, args.out)
    return 0


def _cmd_normalize(args) -> int:
    surface = _load_surface(args.infile)
    result = normalize(surface, args.order, args.strategy, args.resonance)
    _emit(_result_to_json(result), args.out)
    return 0


def _cmd_verify(args) -> int:
    surface = _load_surface(args.infile)
    report = verify_normal_form(surface, args.strategy)
    payload = {
        "strategy": report.strategy,
        "passed": report.passed,
        "degrees": [
            {
                "degree": d.degree,
                "ok": d.ok,
                **({"re_ok": d.re_ok, "im_ok": d.im_ok} if d.re_ok is not None else {}),
            }
            for d in report.degrees
        ],
    }
    _emit(payload, args.out)
    return 0


def _cmd_pushforward(args) -> int:
    surface = _load_surface(args.infile)
    phi = _load_map(args.map)
    image = push_forward(surface, phi)
    _emit(surface_to_json(image), args.out)
    return 0


def _cmd_invariance(args) -> int:
    surface = _load_surface(args.infile)
    trials = []
    if args.map is not None:
        phi = _load_map(args.map)
        rep = invariance_check(surface, phi, args.order, args.strategy, args.resonance)
        trials.append(
            {
                "trial": 0,
                "equal": rep.equal,
                "first_discrepancy": rep.first_discrepancy,
                "base_params": [
                    {"name": p.name, "birth_degree": p.birth_degree, "status": p.status}
                    for p in rep.base.params
                ],
                "image_params": [
                    {"name": p.name, "birth_degree": p.birth_degree, "status": p.status}
                    for p in rep.image.params
                ],
            }
        )
    else:
        rng = random.Random(args.seed)
        order = args.order if args.order is not None else surface.truncation
        base = normalize(surface, order, args.strategy, args.resonance)
        for i in range(args.trials):
            phi = rand.random_map(rng, surface.truncation, kernel_free=True)
            image = normalize(
                push_forward(surface, phi), order, args.strategy, args.resonance
            )
            first = base.surface.first_difference_degree(image.surface)
            trials.append(
                {"trial": i, "equal": first is None, "first_discrepancy": first}
            )
    report = {
        "strategy": args.strategy,
        "resonance": args.resonance,
        "seed": args.seed,
        "all_equal": all(t["equal"] for t in trials),
        "trials": trials,
    }
    _emit(report, args.out)
    return 0


def _cmd_randtest(args) -> int:
    rng = random.Random(args.seed)
    from .poly import Q, fischer_pair

    division_ok = 0
    for _ in range(args.trials):
        degree = rng.randint(3, 10)
        p = rand.random_homogeneous(rng, degree)
        split = fischer_divide(p)
        ok = (
            Q * split.quotient + split.remainder == p
            and trace(split.remainder).is_zero()
            and fischer_pair(Q * split.quotient, split.remainder).is_zero()
        )
        division_ok += ok
    adjoint_ok = 0
    for _ in range(args.trials):
        degree = rng.randint(3, 10)
        a = rand.random_homogeneous(rng, degree - 2)
        b = rand.random_homogeneous(rng, degree)
        adjoint_ok += fischer_pair(Q * a, b) == fischer_pair(a, trace(b))
    report = {
        "seed": args.seed,
        "trials": args.trials,
        "suites": [
            {"name": "fischer_division_exactness", "passed": division_ok, "total": args.trials},
            {"name": "adjointness_identity", "passed": adjoint_ok, "total": args.trials},
        ],
    }
    report["all_passed"] = all(s["passed"] == s["total"] for s in report["suites"])
    _emit(report, args.out)
    return 0 if report["all_passed"] else 1


def _cmd_residual(args) -> int:
    surface = _load_surface(args.infile)
    phi = _load_map(args.map)
    target = _load_surface(args.target)
    bound = args.order if args.order is not None else surface.truncation
    residual = transform_residual(surface, phi, target, bound)
    _emit(
        {"zero": residual.is_zero(), "residual": _parametric_records(residual)},
        args.out,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crnf",
        description="Exact normal forms for surfaces w = z^2 + zbar^2 + O(3)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fischer = sub.add_parser("fischer", help="Fischer division machinery")
    fsub = fischer.add_subparsers(dest="fischer_cmd", required=True)
    for name, help_text in (
        ("divide", "split P = Q*A + R with trace(R) = 0"),
        ("chain", "iterated chain decomposition"),
        ("W", "invariant cubic of a degree-3 polynomial"),
    ):
        p = fsub.add_parser(name, help=help_text)
        p.add_argument("--in", dest="infile", required=True, help="polynomial literal JSON")
        p.add_argument("--out", default=None)
        p.set_defaults(func=_cmd_fischer)

    gate = sub.add_parser("gate", help="degree-2 linear gate")
    gate.add_argument("--f10", required=True, help='Gaussian rational, e.g. "1", "i", "1/2+1/3i"')
    gate.add_argument("--g01", required=True)
    gate.add_argument("--out", default=None)
    gate.set_defaults(func=_cmd_gate)

    norm = sub.add_parser("normalize", help="compute the normal form")
    norm.add_argument("--in", dest="infile", required=True)
    norm.add_argument("--order", type=int, default=None)
    norm.add_argument("--strategy", choices=("ortho", "chain"), default="ortho")
    norm.add_argument("--resonance", choices=("w-chain", "off"), default="w-chain")
    norm.add_argument("--out", default=None)
    norm.set_defaults(func=_cmd_normalize)

    verify = sub.add_parser("verify", help="check normal-form membership per degree")
    verify.add_argument("--in", dest="infile", required=True)
    verify.add_argument("--strategy", choices=("ortho", "chain"), default="ortho")
    verify.add_argument("--out", default=None)
    verify.set_defaults(func=_cmd_verify)

    push = sub.add_parser("pushforward", help="image surface under a formal map")
    push.add_argument("--in", dest="infile", required=True)
    push.add_argument("--map", required=True)
    push.add_argument("--out", default=None)
    push.set_defaults(func=_cmd_pushforward)

    inv = sub.add_parser("invariance", help="compare normal forms across a map")
    inv.add_argument("--in", dest="infile", required=True)
    inv.add_argument("--map", default=None, help="explicit map JSON (otherwise random trials)")
    inv.add_argument("--trials", type=int, default=5)
    inv.add_argument("--seed", type=int, default=0)
    inv.add_argument("--order", type=int, default=None)
    inv.add_argument("--strategy", choices=("ortho", "chain"), default="ortho")
    inv.add_argument("--resonance", choices=("w-chain", "off"), default="w-chain")
    inv.add_argument("--out", default=None)
    inv.set_defaults(func=_cmd_invariance)

    residual = sub.add_parser("residual", help="transformation-equation residual")
    residual.add_argument("--in", dest="infile", required=True)
    residual.add_argument("--map", required=True)
    residual.add_argument("--target", required=True)
    residual.add_argument("--order", type=int, default=None)
    residual.add_argument("--out", default=None)
    residual.set_defaults(func=_cmd_residual)

    randtest = sub.add_parser("randtest", help="seeded random property suites")
    randtest.add_argument("--seed", type=int, default=0)
    randtest.add_argument("--trials", type=int, default=100)
    randtest.add_argument("--out", default=None)
    randtest.set_defaults(func=_cmd_randtest)

    return parser


def main(argv=None) -> int:
    cap = os.environ.get("CRNF_PARAM_DEGREE_CAP")
    if cap is not None:
        try:
            set_param_degree_cap(int(cap))
        except (ValueError, TypeError):
            sys.stderr.write(f"crnf: bad CRNF_PARAM_DEGREE_CAP {cap!r}\n")
            return 4
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CrnfError as exc:
        sys.stderr.write(f"crnf: {exc}\n")
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"crnf: internal error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
