"""Command line front end.

    pdslab verify-pds --n 2 --e 01 --a 0w --level 1
    pdslab scheme --n 2 --e 00 --a 00 --variant 4 --amorphic
    pdslab regular --family A --n 2 --e 11 --a 00 --v 11 --b 10
    pdslab regular --family D --epsilon 1 --tail-n 0
    pdslab regular --custom '{"e": "11", "a": "00", "tau": {"kind": "tau", "v": "11"}, "K_gens": [...], "h": "w000"}'
    pdslab regular --search --e 11 --a 00 --tau '{"kind": "tau", "v": "11"}'

Every command prints one JSON report (or writes it to --out).  Exit codes:
0 success, 1 verification or comparison failure, 2 input error.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import gf4
from .endo import SearchDiscrepancy, from_descriptor, is_isometry, order2_pair, order4_pair, order4_quotient_condition
from .families import SpecError, build_family, compare
from .finite_group import FiniteGroupTable
from .forms import FormSpec, expected_level_size, level_set
from .pds import classify_ls_nls, expected_params, verify_pds
from .regular import (
    RegularGroup,
    check_gkt_conditions,
    invariant_report,
    pds_pullback,
    verify_regular_action,
)
from .schemes import EmptyClassError, build_scheme, intersection_numbers, is_amorphic
from .twisted import GroupContext, subgroup_closure

SCHEMA = "pdslab-report/1"
LEVELS = {"0": 0, "1": 1, "w": 2, "W": 3}
PULLBACK_AUTO_LIMIT = 4096


class InputError(ValueError):
    pass


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("PDSLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"PDSLAB_THREADS must be an integer, got {env!r}") from None
    return 1


def _context(n, e, a):
    if n < 1:
        raise InputError("--n must be at least 1")
    try:
        ctx = GroupContext(gf4.parse_bits(e, n))
        form = FormSpec(gf4.parse_vector(a, n))
    except ValueError as ex:
        raise InputError(str(ex)) from None
    return ctx, form


# -- verify-pds ------------------------------------------------------------------

def cmd_verify_pds(args):
    ctx, form = _context(args.n, args.e, args.a)
    value = LEVELS[args.level]
    G = FiniteGroupTable.from_context(ctx)
    D = level_set(ctx, form, value)
    found = verify_pds(G, D, _threads(args))
    level = "zero" if value == 0 else "nonzero"
    want = expected_params(args.n, form.sign, level)
    match = found.ok and found.tuple == want.tuple and found.degenerate == want.degenerate
    results = {
        "size": int(len(D)),
        "expected_size": expected_level_size(args.n, form.sign, value),
        "sign": form.sign,
        "found": found.to_json(),
        "expected": want.to_json(),
    }
    if found.ok and not found.degenerate:
        results["type"] = str(classify_ls_nls(found))
    verdicts = {"is_pds": bool(found.ok), "matches_expected": bool(match)}
    return verdicts, results


# -- scheme ----------------------------------------------------------------------

def cmd_scheme(args):
    ctx, form = _context(args.n, args.e, args.a)
    try:
        S = build_scheme(ctx, form, args.variant)
    except EmptyClassError as ex:
        raise InputError(str(ex)) from None
    results = {"class_names": S.names, "class_sizes": S.sizes, "sign": form.sign}
    p = intersection_numbers(S)
    verdicts = {"scheme": bool(p.ok)}
    results["intersection_numbers" if p.ok else "witness"] = p.to_json()
    if args.amorphic:
        cert = is_amorphic(S, _threads(args))
        results["amorphy"] = cert.to_json()
        results["fusions_passed"] = f"{cert.passed}/{len(cert.fusions)}"
        verdicts["amorphic"] = bool(cert.amorphic)
        verdicts["uniform_class_type"] = cert.uniform_type in ("LS", "NLS")
    return verdicts, results


# -- regular ---------------------------------------------------------------------

def _target_classes(ctx, form, target):
    levels = [level_set(ctx, form, v) for v in range(4)]
    if target == "G0G1":
        return levels[:2]
    if target == "S3":
        return levels[:2] + [np.concatenate(levels[2:])]
    return [c for c in levels if len(c)]


def _pullback(G, ctx, form, classes, threads, mode):
    """PDS parameters of each class pulled back into G."""
    if mode == "none" or (mode == "auto" and G.order > PULLBACK_AUTO_LIMIT):
        return None, True
    T = G.group_table()
    Ge = FiniteGroupTable.from_context(ctx)
    out = []
    ok = True
    for c in classes:
        base = verify_pds(Ge, c, threads)
        pulled = verify_pds(T, pds_pullback(G, c), threads)
        same = bool(base.ok and pulled.ok and base.tuple == pulled.tuple)
        ok &= same
        out.append({"abelian": base.to_json(), "pulled_back": pulled.to_json(), "equal": same})
    return out, ok


def _run_regular(G, ctx, form, classes, threads, pullback, prediction=None):
    verdicts = {"conditions": True}
    results = {}
    reg = verify_regular_action(G, classes)
    results["regularity"] = reg.to_json()
    verdicts["regular"] = bool(reg.ok)
    rep = invariant_report(G)
    results["invariants"] = rep.to_json()
    for key in ("commutator_series_match", "center_gens_match", "center_order_match", "frattini_gens_match"):
        verdicts[key] = bool(rep.summary[key])
    verdicts["nonabelian"] = rep.summary["derived"]["order"] > 1
    if prediction is not None:
        mismatches = compare(prediction, rep.summary)
        results["prediction"] = prediction.to_json()
        results["mismatches"] = mismatches
        verdicts["prediction_match"] = not mismatches
    pb, pb_ok = _pullback(G, ctx, form, classes, threads, pullback)
    if pb is not None:
        results["pullback"] = pb
        verdicts["pullback_params_equal"] = pb_ok
    return verdicts, results


def _family_spec(args):
    fam = args.family.upper()
    if fam == "D":
        n = args.tail_n if args.tail_n is not None else (args.n or 0)
        d = {"family": "D", "n": n, "epsilon": args.epsilon, "alpha": args.alpha}
    else:
        if args.n is None:
            raise InputError("--n is required for families A, B, C")
        n = args.n
        d = {"family": fam, "n": n}
        if args.b is not None:
            d["b"] = args.b
    for key in ("e", "a", "v"):
        val = getattr(args, key)
        if val is not None:
            d[key] = val
    return d


def _parse_json_arg(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise InputError(f"{what} is not valid JSON: {ex}") from None


def _custom_group(cfg, args):
    """Build (ctx, form, K, tau, h) from a custom description."""
    e = cfg.get("e", args.e)
    if e is None:
        raise InputError("custom description needs 'e'")
    n = len(e)
    a = cfg.get("a", args.a) or "0" * n
    ctx, form = _context(n, e, a)
    if "tau" not in cfg:
        raise InputError("custom description needs 'tau'")
    try:
        tau = from_descriptor(ctx, cfg["tau"])
        gens = [ctx.parse_element(s) for s in cfg.get("K_gens", [])]
        h = ctx.parse_element(cfg["h"])
    except (KeyError, ValueError) as ex:
        raise InputError(f"bad custom description: {ex}") from None
    K = subgroup_closure(ctx, gens)
    return ctx, form, K, tau, h


def cmd_regular(args):
    threads = _threads(args)
    if args.family:
        try:
            inst = build_family(_family_spec(args))
        except (SpecError, ValueError) as ex:
            raise InputError(str(ex)) from None
        results = {"family": inst.spec.to_json(), "target": inst.target, "h": inst.ctx.format_element(inst.group.h)}
        verdicts, more = _run_regular(
            inst.group, inst.ctx, inst.form, inst.target_classes(), threads, args.pullback, inst.prediction
        )
        results.update(more)
        return verdicts, results

    if args.custom:
        cfg = _parse_json_arg(args.custom, "--custom")
        ctx, form, K, tau, h = _custom_group(cfg, args)
    elif args.search:
        if args.e is None or args.tau is None:
            raise InputError("--search needs --e and --tau")
        cfg = {"e": args.e, "a": args.a, "tau": _parse_json_arg(args.tau, "--tau"), "h": "0" * (2 * len(args.e))}
        ctx, form, _, tau, _ = _custom_group(cfg, args)
        if not tau.is_automorphism:
            raise InputError("tau is not an automorphism")
        order = tau.order()
        try:
            if order == 2:
                pair, how = order2_pair(tau), "order2_pair"
            elif order == 4:
                pair, how = order4_pair(tau), "order4_pair"
                if pair is None:
                    pair, how = order4_quotient_condition(tau), "order4_quotient_condition"
            else:
                raise InputError(f"search handles tau of order 2 or 4, got {order}")
        except SearchDiscrepancy as ex:
            return {"search": False}, {"search_error": str(ex)}
        if pair is None:
            return {"search": False}, {"search_error": "no invariant subgroup satisfies the existence condition"}
        K, h = pair
    else:
        raise InputError("regular needs --family, --custom or --search")

    results = {"K_order": K.order, "K_generators": [ctx.format_element(g) for g in K.generators],
               "h": ctx.format_element(h)}
    if args.search:
        results["search"] = how
    gkt = check_gkt_conditions(K, tau, h, form)
    results["conditions"] = gkt.to_json()
    if not gkt.ok:
        named = sorted({v["condition"] for v in gkt.violations})
        results["failed_conditions"] = named
        return {"conditions": False}, results
    G = RegularGroup(K, tau, h, form)
    # a generalized isometry swaps the w and w+1 levels, so only S^(3) survives
    target = "S4" if is_isometry(tau, form) else "S3"
    results["target"] = target
    verdicts, more = _run_regular(G, ctx, form, _target_classes(ctx, form, target), threads, args.pullback)
    results.update(more)
    return verdicts, results


# -- plumbing --------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="pdslab", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $PDSLAB_THREADS or 1)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--no-timing", action="store_true", help="omit the timing field")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-pds", help="verify a level set of Q_a as a PDS")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--e", required=True, help="twist bits, e.g. 01")
    v.add_argument("--a", required=True, help="form coefficients over 01wW")
    v.add_argument("--level", required=True, choices=sorted(LEVELS))
    v.set_defaults(func=cmd_verify_pds)

    s = sub.add_parser("scheme", help="check the Cayley scheme S^(4) or S^(3)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--e", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--variant", type=int, choices=(3, 4), default=4)
    s.add_argument("--amorphic", action="store_true", help="also check every fusion")
    s.set_defaults(func=cmd_scheme)

    r = sub.add_parser("regular", help="build and check a regular group G_(K,tau,h)")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=["A", "B", "C", "D"])
    src.add_argument("--custom", help="JSON with e, a, tau, K_gens, h")
    src.add_argument("--search", action="store_true", help="find K and h for --tau")
    r.add_argument("--n", type=int)
    r.add_argument("--tail-n", type=int, help="tail length for family D")
    r.add_argument("--e")
    r.add_argument("--a")
    r.add_argument("--v")
    r.add_argument("--b")
    r.add_argument("--epsilon", type=int, choices=(0, 1), default=0)
    r.add_argument("--alpha", default="0", choices=list(gf4.CHARS))
    r.add_argument("--tau", help='map descriptor JSON, e.g. {"kind": "rho", "a": "w0"}')
    r.add_argument("--pullback", choices=["auto", "all", "none"], default="auto",
                   help=f"pull classes back into G (auto: only up to order {PULLBACK_AUTO_LIMIT})")
    r.set_defaults(func=cmd_regular)
    return p


def _inputs(args):
    skip = {"func", "out", "threads", "no_timing", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def run(argv=None):
    """Returns (exit code, report dict)."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report = {"schema": SCHEMA, "command": args.command, "inputs": _inputs(args)}
    try:
        verdicts, results = args.func(args)
    except InputError as ex:
        report.update({"ok": False, "error": str(ex)})
        code = 2
    else:
        ok = all(verdicts.values())
        report.update({"ok": ok, "verdicts": verdicts, "results": results})
        code = 0 if ok else 1
    if not args.no_timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    text = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code, report


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
