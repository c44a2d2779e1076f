"""Batch command-line front end.

Exit status: 0 when the computation finished and every checked identity held,
1 when a theorem battery or check failed, 2 for usage or input errors.
Progress goes to stderr; reports go to stdout or ``--output``.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import interchange
from .batteries import BATTERIES, inverse_formula_check, run_battery
from .corpus import InstanceSpec, OPERATOR_KINDS, OperatorSpec, generate, make_operator
from .errors import FusionError
from .frames import (
    WeightedFamily, classify, duality_defect, frame_bounds, is_pseudo_dual,
)
from .gram import (
    GramTriple, cross_gram, cross_gram_blockwise, gram, gram_pinv_formula,
    norm_bounds, reconstruct_operator, schatten_norm,
)
from .linalg import DEFAULT_TOL, TolerancePolicy, operator_norm
from .stability import PerturbationInstance, check_stability

REPORT_VERSION = 1
COMMANDS = ("classify", "gram", "invert", "pinv", "reconstruct", "duality",
            "stability", "battery", "generate", "schatten")


class UsageError(Exception):
    pass


def _split_top(text):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def _key_values(text):
    """``a=1,b=2,3`` -> {"a": ["1"], "b": ["2", "3"]}; bare tokens extend the last key."""
    out, last = {}, None
    for tok in _split_top(text):
        if "=" in tok:
            key, val = tok.split("=", 1)
            last = key.strip()
            out[last] = [val.strip()]
        elif last is None:
            raise UsageError(f"value {tok!r} has no key")
        else:
            out[last].append(tok)
    return out


def parse_instance_spec(text):
    """``kind:seed=7,n=4,dims=2,2[,weights=unit|uniform(a,b)|w1,w2..][,theta=t][,extra=k]``."""
    kind, _, rest = text.partition(":")
    kv = _key_values(rest)
    try:
        seed = int(kv.pop("seed", ["0"])[0])
        n = int(kv.pop("n")[0])
        dims = tuple(int(d) for d in kv.pop("dims"))
        weights = kv.pop("weights", ["unit"])
        law = weights[0] if len(weights) == 1 and not _is_number(weights[0]) else tuple(float(w) for w in weights)
        theta = float(kv.pop("theta", ["0"])[0])
        extra = int(kv.pop("extra", ["1"])[0])
    except KeyError as exc:
        raise UsageError(f"instance spec is missing {exc.args[0]!r}") from None
    except ValueError as exc:
        raise UsageError(f"bad instance spec {text!r}: {exc}") from None
    if kv:
        raise UsageError(f"unknown instance spec keys: {', '.join(sorted(kv))}")
    try:
        return InstanceSpec(seed, n, dims, kind.strip(), weight_law=law, theta=theta, extra_dims=extra)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def parse_operator_spec(text):
    kind, _, rest = text.partition(":")
    kv = _key_values(rest)
    if kind not in OPERATOR_KINDS:
        raise UsageError(f"unknown operator {kind!r}; choose from {', '.join(OPERATOR_KINDS)} or a file")
    try:
        seed = int(kv.pop("seed", ["0"])[0])
        rank = int(kv.pop("rank")[0]) if "rank" in kv else None
    except ValueError as exc:
        raise UsageError(f"bad operator spec {text!r}: {exc}") from None
    if kv:
        raise UsageError(f"unknown operator spec keys: {', '.join(sorted(kv))}")
    return OperatorSpec(kind, seed, rank)


def _load_doc(path, expect):
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    value = interchange.load(path)
    if expect == "family" and not isinstance(value, (WeightedFamily, tuple)):
        raise UsageError(f"{path} does not hold a family")
    if expect == "matrix" and not isinstance(value, np.ndarray):
        raise UsageError(f"{path} does not hold a matrix")
    return value


def resolve_operator(text, n, default="identity"):
    if text is None:
        text = default
    if os.path.exists(text) or text.endswith(".json"):
        m = _load_doc(text, "matrix")
        if m.shape != (n, n):
            raise UsageError(f"operator in {text} has shape {m.shape}, expected {(n, n)}")
        return m, {"file": text}
    spec = parse_operator_spec(text)
    return make_operator(spec, n), spec.to_dict()


def resolve_families(args):
    """``(first, second, inputs)`` from ``--spec`` or ``--w``/``--v`` files.

    A single family is used for both slots.
    """
    inputs = {}
    if args.spec:
        spec = parse_instance_spec(args.spec)
        inputs["spec"] = spec.to_dict()
        value = generate(spec)
    elif args.w:
        inputs["w"] = args.w
        value = _load_doc(args.w, "family")
        if args.v:
            inputs["v"] = args.v
            value = (value, _load_doc(args.v, "family"))
    else:
        raise UsageError("an instance is required: --spec or --w [--v]")
    if isinstance(value, tuple):
        return value[0], value[1], inputs
    return value, value, inputs


def load_tolerances(path):
    if path is None:
        return DEFAULT_TOL
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return TolerancePolicy(**data)
    except (OSError, TypeError, ValueError) as exc:
        raise UsageError(f"bad tolerance file {path}: {exc}") from None


def _clean(obj):
    """Plain JSON-able structure; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


# ----------------------------------------------------------------- commands

def cmd_classify(args, tol):
    first, second, inputs = resolve_families(args)
    fams = {"first": first} if first is second else {"first": first, "second": second}
    results = {}
    for key, fam in fams.items():
        bounds = frame_bounds(fam)
        results[key] = {**classify(fam, tol).as_dict(), "lower_bound": bounds.lower, "upper_bound": bounds.upper}
    verdict = results["first"] if len(fams) == 1 else results
    return inputs, results, {}, verdict, True


def cmd_gram(args, tol):
    w, v, inputs = resolve_families(args)
    u, inputs["u"] = resolve_operator(args.u, w.ambient_dim)
    t = GramTriple(u, w, v, tol)
    g = cross_gram(t)
    two_paths = operator_norm(g.matrix - cross_gram_blockwise(t).matrix)
    b = norm_bounds(u, w, v, tol)
    eye_res = float(np.linalg.norm(g.matrix - np.eye(g.matrix.shape[0])))
    results = {"gram": interchange.matrix_body(g.matrix), "is_identity": eye_res <= tol.identity_abs}
    residuals = {"identity_frobenius": eye_res, "assembly_paths": two_paths,
                 "gram_norm": b["gram_norm"], "gram_bound": b["gram_bound"]}
    ok = two_paths <= 1e-12 * max(1.0, b["gram_norm"]) and b["gram_norm"] <= b["gram_bound"] + 1e-9
    return inputs, results, residuals, ok, ok


def cmd_invert(args, tol):
    w, v, inputs = resolve_families(args)
    u, inputs["u"] = resolve_operator(args.u, w.ambient_dim, "random_invertible")
    inputs["mode"] = args.mode
    check = inverse_formula_check(GramTriple(u, w, v, tol), args.mode, tol)
    ok = check.pop("passed")
    return inputs, {"invertible": check.pop("invertible")}, check, ok, ok


def cmd_pinv(args, tol):
    w, v, inputs = resolve_families(args)
    u, inputs["u"] = resolve_operator(args.u, w.ambient_dim, "rank_one")
    variant = args.variant or ("WW" if w is v else "dual_VW")
    inputs["variant"] = variant
    r = gram_pinv_formula(GramTriple(u, w, v, tol), variant, tol)
    rep = r.report()
    return inputs, {"variant": variant, "condition_holds": rep["condition_holds"],
                    "formula_holds": rep["formula_holds"]}, \
        {"condition_residual": rep["condition_residual"], "formula_error": rep["formula_error"]}, \
        r.consistent, r.consistent


def cmd_reconstruct(args, tol):
    w, v, inputs = resolve_families(args)
    u, inputs["u"] = resolve_operator(args.u, w.ambient_dim, "random")
    back = reconstruct_operator(gram(u, w, v, tol), w, v, tol)
    err = operator_norm(back - u) / max(operator_norm(u), 1e-300)
    ok = err <= 1e-8
    return inputs, {"reconstructed": interchange.matrix_body(back)}, {"relative_error": err}, ok, ok


def cmd_duality(args, tol):
    v, w, inputs = resolve_families(args)
    defect = duality_defect(v, w, tol)
    results = {"dual": defect <= tol.identity_abs, "pseudo_dual": is_pseudo_dual(v, w, tol)}
    return inputs, results, {"duality_defect": defect}, results["dual"], True


def cmd_stability(args, tol):
    v, z, inputs = resolve_families(args)
    u1, inputs["u"] = resolve_operator(args.u, v.ambient_dim, "identity")
    u2, inputs["u2"] = (u1, inputs["u"]) if args.u2 is None else resolve_operator(args.u2, v.ambient_dim)
    inputs.update(lambda1=args.lambda1, lambda2=args.lambda2, epsilon=args.epsilon)
    rep = check_stability(PerturbationInstance(v, v, z, u1, u2), args.lambda1, args.lambda2, args.epsilon, tol)
    d = rep.as_dict()
    ok = not rep.counterexample
    return inputs, {"bound_holds": rep.bound_holds, "invertible": rep.invertible}, d, rep.verdict, ok


def _battery_one(name, spec, u_spec, tol):
    r = run_battery(name, spec, u_spec, tol)
    return {"seed": spec.seed, "passed": bool(r["passed"]), "results": r["results"], "residuals": r["residuals"]}


def cmd_battery(args, tol):
    if args.theorem not in BATTERIES:
        raise UsageError(f"unknown battery {args.theorem!r}; see --list")
    if not args.spec:
        raise UsageError("battery needs --spec")
    base = parse_instance_spec(args.spec)
    u_base = parse_operator_spec(args.u) if args.u else None
    inputs = {"theorem": args.theorem, "spec": base.to_dict(),
              "u": u_base.to_dict() if u_base else None, "sweep": args.sweep}
    specs, u_specs = [], []
    for k in range(args.sweep):
        d = base.to_dict()
        specs.append(InstanceSpec(d["seed"] + k, base.ambient_dim, base.subspace_dims, base.kind,
                                  weight_law=base.weight_law, theta=base.theta, extra_dims=base.extra_dims))
        u_specs.append(OperatorSpec(u_base.kind, u_base.seed + k, u_base.rank) if u_base else None)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        runs = list(pool.map(lambda su: _battery_one(args.theorem, su[0], su[1], tol), zip(specs, u_specs)))
    runs.sort(key=lambda r: r["seed"])
    for r in runs:
        print(f"[{args.theorem}] seed {r['seed']}: {'pass' if r['passed'] else 'FAIL'}", file=sys.stderr)
    ok = all(r["passed"] for r in runs)
    residuals = {"failed_seeds": [r["seed"] for r in runs if not r["passed"]]}
    return inputs, runs, residuals, ok, ok


def cmd_generate(args, tol):
    if not args.spec:
        raise UsageError("generate needs --spec")
    spec = parse_instance_spec(args.spec)
    value = generate(spec, tol)
    return {"spec": spec.to_dict()}, value, {}, True, True


def cmd_schatten(args, tol):
    inputs = {}
    if args.matrix:
        m = _load_doc(args.matrix, "matrix")
        inputs["matrix"] = args.matrix
    else:
        n = args.n
        if n is None:
            raise UsageError("schatten needs --matrix FILE or --u OPERATOR with --n")
        m, inputs["u"] = resolve_operator(args.u, n, "identity")
    ps = args.p or [1.0, 2.0, math.inf]
    inputs["p"] = ps
    values = {str(p): schatten_norm(m, p).value for p in ps}
    op = operator_norm(m)
    ok = all(val >= op * (1 - 1e-12) for val in values.values())
    return inputs, values, {"operator_norm": op}, ok, ok


HANDLERS = {
    "classify": cmd_classify, "gram": cmd_gram, "invert": cmd_invert, "pinv": cmd_pinv,
    "reconstruct": cmd_reconstruct, "duality": cmd_duality, "stability": cmd_stability,
    "battery": cmd_battery, "generate": cmd_generate, "schatten": cmd_schatten,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="fusiongram", description="Fusion-frame cross Gram toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--spec", help="inline instance, e.g. riesz:seed=3,n=6,dims=2,2,2")
        p.add_argument("--w", help="family document (domain / first family)")
        p.add_argument("--v", help="family document (second family)")
        p.add_argument("--u", help="operator: identity, zero, random:seed=K, random_invertible:seed=K, "
                                   "singular:seed=K,rank=R, rank_one:seed=K, projector:seed=K,rank=R, or a file")
        p.add_argument("--tol-file", help="JSON object overriding rank_rel, invert_rel, identity_abs")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", help="write the report here instead of stdout")
        if name == "invert":
            p.add_argument("--mode", choices=("WW", "dual_VW", "WV"), default="WW")
        if name == "pinv":
            p.add_argument("--variant", choices=("WW", "dual_VW"))
        if name == "stability":
            p.add_argument("--u2", help="perturbed operator (defaults to --u)")
            p.add_argument("--lambda1", type=float, default=0.0)
            p.add_argument("--lambda2", type=float, default=0.0)
            p.add_argument("--epsilon", type=float, default=None)
        if name == "battery":
            p.add_argument("--theorem", help="battery name; see --list")
            p.add_argument("--sweep", type=int, default=1, help="run seeds seed..seed+N-1")
            p.add_argument("--jobs", type=int, default=1)
            p.add_argument("--list", action="store_true", help="list batteries and exit")
        if name == "schatten":
            p.add_argument("--matrix", help="matrix document")
            p.add_argument("--n", type=int, help="dimension for a generated --u")
            p.add_argument("--p", type=float, action="append", help="exponent (repeatable; inf allowed)")
    return parser


def _text_lines(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _text_lines(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], dict):
        for k, v in enumerate(obj):
            _text_lines(f"{prefix}[{k}]", v, out)
    else:
        out.append(f"{prefix}: {interchange.dumps(obj)}")


def render(report, fmt):
    if fmt == "json":
        return interchange.dumps(report) + "\n"
    lines = []
    _text_lines("", report, lines)
    return "\n".join(lines) + "\n"


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "battery" and args.list:
        for name, (_, kind, desc) in BATTERIES.items():
            sys.stdout.write(f"{name:12s} [{kind}] {desc}\n")
        return 0
    if args.command == "battery" and not args.theorem:
        parser.error("battery needs --theorem (or --list)")
    try:
        tol = load_tolerances(args.tol_file)
        inputs, results, residuals, verdict, ok = HANDLERS[args.command](args, tol)
        if args.command == "generate":
            _write(interchange.serialize(results), args.output)
            return 0
        report = _clean({
            "report_version": REPORT_VERSION, "command": args.command, "inputs": inputs,
            "tolerances": {"rank_rel": tol.rank_rel, "invert_rel": tol.invert_rel,
                           "identity_abs": tol.identity_abs},
            "results": results, "residuals": residuals, "verdict": verdict,
        })
        _write(render(report, args.format), args.output)
    except (UsageError, FusionError, ValueError, OSError) as exc:
        print(f"fusiongram {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
