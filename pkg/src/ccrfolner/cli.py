"""Command-line front end.

Exit codes: 0 every check passed, 1 a check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import cp, lattice
from .amenability import build_folner_subspace, ratio_general
from .errors import CCRError
from .expr import eval_character, eval_weyl, parse_element, split_exprs
from .reports import ReportRow, SweepError, dumps, run_sweep, to_csv
from .resolvent import (EXACT_RELATIONS, Character, FockRep, character_relation_check,
                        relation_residual)
from .symplectic import SymplecticSpace
from .weyl import trace

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _load_json(text: str):
    p = Path(text)
    if not text.lstrip().startswith(("{", "[")) and p.exists():
        text = p.read_text()
    return json.loads(text)


def _emit(args, payload, rows=None):
    if args.format == "csv" and rows is not None:
        out = to_csv(rows)
    else:
        out = dumps(payload)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _space(args) -> SymplecticSpace:
    return SymplecticSpace.from_json(_load_json(args.space)) if args.space else SymplecticSpace(1)


def _weyl_ops(src, space):
    return [(s, eval_weyl(parse_element(s, space), space)) for s in split_exprs(src or "")]


def cmd_folner_ratio(args):
    space = _space(args)
    gens = [space.vec(g) for g in _load_json(args.gens)]
    V = build_folner_subspace(gens, args.N)
    rows = []
    for src, A in _weyl_ops(args.ops, space):
        br = ratio_general(A, V)
        rows.append({"op": src, "lower": br.lower, "numeric": br.numeric, "upper": br.upper})
    _emit(args, {"N": args.N, "dim_V": V.dim, "injective": V.injective, "rows": rows}, rows)
    return EXIT_OK


def cmd_compress(args):
    space = _space(args)
    gens = [space.vec(g) for g in _load_json(args.gens)]
    model = lattice.LatticeModel(space, gens, args.N, box=args.box)
    rows = []
    for src, A in _weyl_ops(args.ops, space):
        rep = lattice.norm_report(model, A)
        rows.append({
            "op": src,
            "k": model.k,
            "defect": lattice.mult_defect(model, A.adjoint(), A),
            "compressed_norm": rep["compressed_norm"],
            "l1_bound": rep["l1_bound"],
            "trace": lattice.trace_reproduction(model, A),
            "tau": trace(A),
        })
    for pair in split_exprs(args.pairs or ""):
        a_src, b_src = pair.split("|")
        A = eval_weyl(parse_element(a_src, space), space)
        B = eval_weyl(parse_element(b_src, space), space)
        rows.append({"op": pair, "k": model.k, "defect": lattice.mult_defect(model, A, B)})
    _emit(args, {"N": args.N, "box": args.box, "rows": rows}, rows)
    return EXIT_OK


def cmd_hypertrace(args):
    space = _space(args)
    gens = [space.vec(g) for g in _load_json(args.gens)]
    probe = lattice.LatticeModel(space, gens, 0)
    rows = []
    for src, A in _weyl_ops(args.ops, space):
        val = lattice.hypertrace_commutator(space, gens, args.N, A, R=args.R)
        pred = None
        if len(A.terms) == 1 and abs(next(iter(A.terms.values())) - 1) < 1e-15:
            pred = lattice.monomial_hypertrace_prediction(args.N, probe.locate(next(iter(A.terms))))
        rows.append({"op": src, "trace_norm": val, "combinatorial_prediction": pred})
    _emit(args, {"N": args.N, "R": args.R, "rows": rows}, rows)
    return EXIT_OK


def _split_summary(s: cp.SpectralSplit) -> dict:
    return {
        "eps": s.eps, "k": s.k,
        "lambda0": s.lambda0, "lambda_mid": s.lambda_mid, "lambda1": s.lambda1,
        "mid_fraction": s.mid_fraction, "distance": s.distance, "delta": s.delta,
        "certified_bound": s.certified_bound, "within_bound": bool(s.distance <= s.certified_bound + 1e-10),
    }


def cmd_cp(args):
    if args.action == "synth":
        space = _space(args)
        gens = [space.vec(g) for g in _load_json(args.gens)]
        model = lattice.LatticeModel(space, gens, args.N)
        elems = dict(_weyl_ops(args.ops, space))
        names = list(elems)
        elems, triples = cp.with_products(elems, [(a, b) for a in names for b in names], names)
        if args.seed is None:
            raise CCRError("cp synth needs --seed")
        sample = cp.synth_ccp(model, elems, seed=args.seed, pairs=triples, spread=args.spread)
        _emit(args, sample.to_json())
        return EXIT_OK
    sample = cp.CpSample.from_json(_load_json(args.input))
    sample.validate()
    eps = args.eps
    if args.action == "split":
        _emit(args, _split_summary(cp.spectral_split(sample.unit, eps)))
        return EXIT_OK
    if args.action == "unitalize":
        psi = cp.unitalize(sample, eps)
        payload = psi.to_json()
        if args.out:
            Path(args.out).write_text(dumps(payload))
            sys.stdout.write(dumps({"k": sample.k, "k_new": psi.k,
                                    "unit_error": float(np.abs(psi.unit - np.eye(psi.k)).max())}))
        else:
            sys.stdout.write(dumps(payload))
        return EXIT_OK
    report = cp.folner_certificate(sample, eps)
    _emit(args, report)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def cmd_resolvent(args):
    if args.action == "residuals":
        rep = FockRep(args.modes, args.levels)
        params = _load_json(args.params) if args.params else {}
        res = relation_residual(rep, args.relation, params, args.cutoff)
        payload = res.to_json()
        ok = True
        if args.relation in EXACT_RELATIONS:
            ok = res.raw <= 1e-10
            payload["pass"] = ok
        _emit(args, payload)
        return EXIT_OK if ok else EXIT_FAIL
    mu = _load_json(args.mu)
    chi = Character(mu)
    space = SymplecticSpace(len(mu) // 2)
    values = []
    for src in split_exprs(args.words or ""):
        values.append({"word": src, "value": eval_character(parse_element(src, space), chi)})
    if args.params:
        params = _load_json(args.params)
    else:
        if args.seed is None:
            raise CCRError("resolvent character needs --params or --seed")
        params = random_relation_params(space.dim, 100, args.seed)
    report = character_relation_check(chi, params)
    report.pop("draws")
    _emit(args, {"values": values, "relations": report})
    return EXIT_OK if report["pass"] else EXIT_FAIL


def random_relation_params(dim: int, count: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        sign = rng.choice([-1.0, 1.0])
        out.append({
            "lam": float(sign * rng.uniform(0.25, 3.0)),
            "nu": float(sign * rng.uniform(0.25, 3.0)),
            "f": [str(int(x)) for x in rng.integers(-4, 5, dim)],
            "g": [str(int(x)) for x in rng.integers(-4, 5, dim)],
        })
    return out


def cmd_sweep(args):
    spec = _load_json(args.spec)
    try:
        rows = run_sweep(spec, jobs=args.jobs)
    except SweepError as exc:
        _emit(args, {"rows": exc.rows, "error": str(exc)}, exc.rows)
        return EXIT_USAGE
    _emit(args, {"rows": rows}, [r.to_dict() for r in rows])
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def full_suite(seed: int) -> dict:
    """A fixed battery of sweeps plus a seeded c.c.p. ensemble."""
    g = [["1", "0"]]
    sweeps = [
        {"command": "hypertrace", "gens": g, "grid": {"N": [2, 4, 8, 16]}, "ops": ["W[1,0]"],
         "tolerance": 1e-12},
        {"command": "compress", "gens": g, "grid": {"N": [2, 4, 8, 16]}, "pairs": [["W[-1,0]", "W[1,0]"]],
         "ops": ["W[1,0]+W[-1,0]"], "tolerance": 1e-10},
        {"command": "folner-ratio", "gens": [["1", "0"], ["0", "1"]], "grid": {"N": [2, 5, 10]},
         "ops": ["W[1,0]", "W[0,1]+W[1,0]"]},
    ]
    rows: list[ReportRow] = []
    for spec in sweeps:
        rows.extend(run_sweep(spec))
    space = SymplecticSpace(1)
    model = lattice.LatticeModel(space, [space.vec([1, 0]), space.vec([0, 1])], 2)
    elems, triples = cp.with_products(dict(_weyl_ops("W[1,0],W[0,1]", space)), [("W[1,0]", "W[0,1]")])
    rng = np.random.default_rng(seed)
    for i, sub in enumerate(rng.integers(0, 2**31, size=8)):
        spread = float(10 ** -rng.uniform(0, 6))
        s = cp.synth_ccp(model, elems, seed=int(sub), pairs=triples, spread=spread)
        split = cp.spectral_split(s.unit, cp.default_eps(cp.two_norm(s.unit - s.unit @ s.unit)))
        rows.append(ReportRow("cp-split", {"sample": i, "seed": int(sub), "spread": spread}, "distance",
                              split.distance, split.certified_bound, "closed-form",
                              split.distance <= split.certified_bound + 1e-10, 1e-10))
    return {"seed": seed, "rows": rows, "pass": all(r.passed for r in rows)}


def cmd_suite(args):
    if args.seed is None:
        raise CCRError("suite needs --seed")
    payload = full_suite(args.seed)
    _emit(args, payload, [r.to_dict() for r in payload["rows"]])
    return EXIT_OK if payload["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", default=argparse.SUPPRESS, help='JSON like {"d": 1}')
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="ccrfolner", parents=[common],
                                 description="Følner approximations of CCR algebras")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("folner-ratio", parents=[common])
    p.add_argument("--gens", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--ops", required=True)
    p.set_defaults(func=cmd_folner_ratio)

    p = sub.add_parser("compress", parents=[common])
    p.add_argument("--gens", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--box", choices=("symmetric", "onesided"), default="symmetric")
    p.add_argument("--ops", default="")
    p.add_argument("--pairs", default="", help="comma list of A|B pairs")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("hypertrace", parents=[common])
    p.add_argument("--gens", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--R", type=int, default=None)
    p.add_argument("--ops", required=True)
    p.set_defaults(func=cmd_hypertrace)

    p = sub.add_parser("cp", parents=[common])
    p.add_argument("action", choices=("split", "unitalize", "certify", "synth"))
    p.add_argument("--in", dest="input")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--gens")
    p.add_argument("--N", type=int)
    p.add_argument("--ops")
    p.add_argument("--spread", type=float, default=None)
    p.set_defaults(func=cmd_cp)

    p = sub.add_parser("resolvent", parents=[common])
    p.add_argument("action", choices=("residuals", "character"))
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--levels", type=int, default=16)
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--relation")
    p.add_argument("--params")
    p.add_argument("--mu")
    p.add_argument("--words")
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("sweep", parents=[common])
    p.add_argument("--spec", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("suite", parents=[common])
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("space", None), ("seed", None), ("out", None), ("format", "json")):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.command == "cp" and args.action != "synth" and not args.input:
        print("error: cp split|unitalize|certify need --in", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "resolvent" and args.action == "residuals" and not args.relation:
        print("error: resolvent residuals needs --relation", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "resolvent" and args.action == "character" and not args.mu:
        print("error: resolvent character needs --mu", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (CCRError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
