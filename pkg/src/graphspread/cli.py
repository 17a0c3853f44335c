"""Command-line front-end.

Every subcommand emits a JSON document with --json (sorted keys, compact
separators, so identical inputs and seed give byte-identical output) or a
short human-readable summary otherwise. Exact rational results ride along
as "p/q" strings; --rational swaps them into the value field itself so
downstream gap arithmetic never touches floats. Diagnostics go to stderr.

Exit codes: 0 success, 2 input error, 3 solver non-convergence or
insufficient solver accuracy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import jsonschema
import numpy as np

from . import embeddings, lambda_inf, mve, reductions, selftest, spread, vexp
from .graphs import (DegenerateValuationError, GraphError, StarGraph,
                     TreeGraph, WeightedGraph, as_star, graph_to_text,
                     lipschitz_check, parse_graph, variance)
from .report import BudgetError, SolveReport


@dataclass
class RunConfig:
    """Validated flags for one invocation."""

    subcommand: str
    graph: Optional[str] = None
    method: Optional[str] = None
    eps: Optional[float] = None
    k: Optional[int] = None
    seed: Optional[int] = None
    trials: Optional[int] = None
    json_out: bool = False
    rational: bool = False


_NUMBER_OR_STRING = {"type": ["number", "string"]}

_SCHEMAS = {
    "lambda-inf": {
        "type": "object",
        "required": ["value", "status", "method"],
        "properties": {"value": _NUMBER_OR_STRING,
                       "status": {"type": "string"},
                       "method": {"type": "string"}},
    },
    "spread": {
        "type": "object",
        "required": ["value", "status", "method"],
        "properties": {"value": _NUMBER_OR_STRING,
                       "status": {"type": "string"},
                       "method": {"type": "string"}},
    },
    "mve2": {
        "type": "object",
        "required": ["value", "status", "case", "feasible_cases"],
        "properties": {"value": _NUMBER_OR_STRING,
                       "case": {"type": "string"},
                       "feasible_cases": {"type": "integer"}},
    },
    "lift": {
        "type": "object",
        "required": ["objective", "converged", "iterations", "min_eigenvalue"],
        "properties": {"objective": {"type": "number"},
                       "converged": {"type": "boolean"},
                       "iterations": {"type": "integer"}},
    },
    "round": {
        "type": "object",
        "required": ["method", "k"],
        "properties": {"method": {"type": "string"},
                       "k": {"type": "integer"}},
    },
    "vexp": {
        "type": "object",
        "required": ["value", "status", "method", "witness"],
        "properties": {"value": _NUMBER_OR_STRING,
                       "witness": {"type": "array",
                                   "items": {"type": "integer"}}},
    },
    "reduce": {
        "type": "object",
        "required": ["target", "p", "beta", "masses", "path"],
        "properties": {"target": {"type": "string"},
                       "p": {"type": "array", "items": {"type": "integer"}},
                       "masses": {"type": "array", "items": {"type": "string"}}},
    },
    "gapcheck": {
        "type": "object",
        "required": ["target", "p", "beta", "observed_gap", "gadget_yes",
                     "bruteforce", "agree"],
        "properties": {"observed_gap": {"type": "string"},
                       "predicted_no_floor": {"type": ["string", "null"]},
                       "gadget_yes": {"type": "boolean"},
                       "bruteforce": {"type": "boolean"},
                       "agree": {"type": "boolean"}},
    },
    "selftest": {
        "type": "object",
        "required": ["ok", "mutation", "suites"],
        "properties": {"ok": {"type": "boolean"},
                       "mutation": {"type": "string"},
                       "suites": {"type": "object"}},
    },
}


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _report_payload(rep: SolveReport, cfg: RunConfig, **extra) -> dict:
    out = {"value": rep.value, "status": rep.status}
    if rep.eps is not None:
        out["eps"] = rep.eps
    if rep.lo is not None:
        out["lo"], out["hi"] = rep.lo, rep.hi
    exact = rep.diagnostics.get("value_exact")
    if exact is not None:
        out["value_exact"] = exact
        if cfg.rational:
            out["value"] = exact
    out.update(extra)
    return out


def _emit(payload: dict, subcommand: str, cfg: RunConfig) -> None:
    payload = _jsonable(payload)
    jsonschema.validate(payload, _SCHEMAS[subcommand])
    if cfg.json_out:
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for key in sorted(payload):
            print(f"{key}: {payload[key]}")


def _load_graph(cfg: RunConfig, allow_zero_mass: bool) -> WeightedGraph:
    if cfg.graph is None:
        raise GraphError("--graph is required")
    with open(cfg.graph, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read(), allow_zero_mass=allow_zero_mass)


def _as_tree(g: WeightedGraph) -> TreeGraph:
    if len(g.edges) != g.n - 1:
        raise GraphError("graph is not a tree")
    return TreeGraph(n=g.n, edges=g.edges, pi=g.pi,
                     allow_zero_mass=any(p == 0 for p in g.pi))


def _need_star(g: WeightedGraph) -> StarGraph:
    pair = as_star(g)
    if pair is None:
        raise GraphError("graph is not a star")
    return pair[0]


# ------------------------------------------------------------ subcommands

def _cmd_lambda_inf(cfg: RunConfig, g: WeightedGraph) -> tuple:
    if cfg.method == "oracle":
        iv = lambda_inf.oracle_small(g)
        payload = {"value": iv.hi, "lo": iv.lo, "hi": iv.hi,
                   "status": "interval", "method": cfg.method}
        exact = iv.diagnostics.get("value_exact")
        if exact is not None:
            payload["value_exact"] = exact
            if cfg.rational:
                payload["value"] = exact
        return payload, 0
    if cfg.method == "star-exact":
        rep = lambda_inf.star_closed_form(_need_star(g))
        return _report_payload(rep, cfg, method=cfg.method), 0
    if cfg.method == "star-fptas":
        if cfg.eps is None:
            raise GraphError("--eps is required for star-fptas")
        rep = lambda_inf.star_fptas(_need_star(g), cfg.eps)
        return _report_payload(rep, cfg, method=cfg.method), 0
    raise GraphError(f"unknown method {cfg.method!r}")


def _cmd_spread(cfg: RunConfig, g: WeightedGraph) -> tuple:
    if cfg.method == "oracle":
        rep = spread.abs_oracle(g)
    elif cfg.method == "star-exact":
        rep = spread.star_spread_exact(_need_star(g))
    elif cfg.method == "tree-fptas":
        if cfg.eps is None:
            raise GraphError("--eps is required for tree-fptas")
        rep = spread.tree_spread_fptas(_as_tree(g), Fraction(cfg.eps).limit_denominator(10**9))
    else:
        raise GraphError(f"unknown method {cfg.method!r}")
    return _report_payload(rep, cfg, method=cfg.method), 0


def _cmd_mve2(cfg: RunConfig, g: WeightedGraph, embed_out: Optional[str]) -> tuple:
    t = _as_tree(g)
    rep = mve.tree_mve2_value(t)
    payload = _report_payload(rep, cfg,
                              case=rep.diagnostics["case"],
                              feasible_cases=rep.diagnostics["feasible_cases"])
    if "alpha" in rep.diagnostics:
        payload["alpha"] = rep.diagnostics["alpha"]
    if embed_out is not None:
        emb = mve.tree_mve2_embed(t)
        with open(embed_out, "w", encoding="utf-8") as fh:
            fh.write(embeddings.embedding_to_json(emb))
        payload["embed_path"] = embed_out
    return payload, 0


def _cmd_lift(cfg: RunConfig, g: WeightedGraph, tol: float,
              max_iters: int, out: Optional[str]) -> tuple:
    lift = mve.lift_solve(g, tol=tol, max_iters=max_iters)
    payload = {
        "objective": lift.objective(),
        "converged": bool(lift.diagnostics.get("converged", False)),
        "iterations": int(lift.diagnostics.get("iterations", 0)),
        "min_eigenvalue": lift.min_eigenvalue(),
        "worst_edge_excess": lift.edge_excess(),
    }
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(_jsonable(lift.to_dict()), fh, sort_keys=True,
                      separators=(",", ":"))
        payload["out_path"] = out
    code = 0 if payload["converged"] else 3
    if code == 3:
        print("warning: lift solver did not converge within the iteration "
              "budget; emitting the best feasible iterate", file=sys.stderr)
    return payload, code


def _cmd_round(cfg: RunConfig, g: WeightedGraph, lift_path: str,
               out: Optional[str]) -> tuple:
    with open(lift_path, "r", encoding="utf-8") as fh:
        lift = mve.GramLift.from_dict(g, json.load(fh))
    if cfg.method == "pca":
        y = mve.pca_round(lift, cfg.k)
        var_x = lift.objective()
        ok, _, worst = lipschitz_check(y, g)
        payload = {"method": "pca", "k": cfg.k,
                   "variance_ratio": variance(y, g) / var_x if var_x else 0.0,
                   "lipschitz_ok": bool(ok), "worst_stretch": worst}
    elif cfg.method == "gaussian":
        if cfg.trials:
            s = mve.gaussian_trials(lift, cfg.k, cfg.trials, base_seed=cfg.seed)
            z = np.abs(s.pair_mean - s.pair_truth) / np.where(s.pair_se > 0,
                                                              s.pair_se, 1.0)
            payload = {"method": "gaussian", "k": cfg.k, "tau": s.tau,
                       "trials": s.trials,
                       "violation_rate": s.violation_rate,
                       "variance_rate": s.variance_rate,
                       "max_pair_z": float(z.max()) if z.size else 0.0}
        else:
            y, rep = mve.gaussian_round(lift, cfg.k, cfg.seed)
            payload = {"method": "gaussian", "k": rep.k, "tau": rep.tau,
                       "seed": cfg.seed, "var_ratio": rep.var_ratio,
                       "violations": rep.violations,
                       "lipschitz_ok": rep.lipschitz_ok,
                       "variance_ok": rep.variance_ok}
            if out is not None:
                with open(out, "w", encoding="utf-8") as fh:
                    fh.write(embeddings.embedding_to_json(y))
                payload["out_path"] = out
    else:
        raise GraphError(f"unknown method {cfg.method!r}")
    return payload, 0


def _cmd_vexp(cfg: RunConfig, g: WeightedGraph) -> tuple:
    if cfg.method == "brute":
        rep = vexp.vexp_bruteforce(g)
    elif cfg.method == "tree-dp":
        rep = vexp.vexp_tree_uniform(_as_tree(g))
    elif cfg.method == "star":
        rep = vexp.vexp_star_weighted(_need_star(g))
    else:
        raise GraphError(f"unknown method {cfg.method!r}")
    return _report_payload(rep, cfg, method=cfg.method,
                           witness=list(rep.witness)), 0


def _parse_parts(text: str) -> list:
    try:
        parts = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise GraphError(f"--p expects comma-separated integers, got {text!r}")
    if not parts:
        raise GraphError("--p must name at least one part")
    return parts


def _cmd_reduce(cfg: RunConfig, p: str, beta: str, target: str,
                emit: str) -> tuple:
    parts = _parse_parts(p)
    b = Fraction(beta)
    builders = {"lambda": reductions.to_lambda_star,
                "spread": reductions.to_spread_star,
                "vexp": reductions.to_vexp_star}
    star = builders[target](parts, b)
    with open(emit, "w", encoding="utf-8") as fh:
        fh.write(graph_to_text(star))
    payload = {"target": target, "p": sorted(parts), "beta": str(b),
               "masses": [str(m) for m in star.pi], "path": emit,
               "n": star.n}
    return payload, 0


def _cmd_gapcheck(cfg: RunConfig, p: str, beta: str, target: str) -> tuple:
    parts = _parse_parts(p)
    b = Fraction(beta)
    brute = reductions.partition_bruteforce(parts)
    if target == "lambda":
        lo, hi = lambda_inf.star_value_bracket(reductions.to_lambda_star(parts, b))
        gadget_yes = bool(hi == b)
        observed = lo - b
        predicted = str(reductions.lambda_gap_bound(parts, b).gap)
    elif target == "spread":
        value = spread.star_spread_exact(
            reductions.to_spread_star(parts, b)).value_fraction()
        gadget_yes = bool(value == b)
        observed = b - value
        predicted = None
    else:
        raise GraphError(f"unknown target {target!r}")
    payload = {"target": target, "p": sorted(parts), "beta": str(b),
               "observed_gap": str(observed), "predicted_no_floor": predicted,
               "gadget_yes": gadget_yes, "bruteforce": brute,
               "agree": gadget_yes == brute}
    return payload, 0


def _cmd_selftest(cfg: RunConfig, mutate: str) -> tuple:
    report = selftest.run_selftest(mutate=mutate, seed=cfg.seed or 0)
    for name, suite in report["suites"].items():
        for failure in suite["failures"]:
            print(f"{name}: {failure}", file=sys.stderr)
    return report, 0 if report["ok"] else 1


# ------------------------------------------------------------ plumbing

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="graphspread",
        description="Spread-type graph constants: solvers, gadgets, rounding.")
    top.add_argument("--threads", type=int, default=1,
                     help="advisory worker count (dispatch is single-threaded)")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def common(p, graph=True):
        if graph:
            p.add_argument("--graph", required=True, help="graph text file")
            p.add_argument("--allow-zero-mass", action="store_true")
        p.add_argument("--json", action="store_true", dest="json_out")
        p.add_argument("--rational", action="store_true",
                       help="emit exact values as p/q strings in the value field")

    p = sub.add_parser("lambda-inf", help="Poincare-type constant")
    common(p)
    p.add_argument("--method", default="oracle",
                   choices=["oracle", "star-exact", "star-fptas"])
    p.add_argument("--eps", type=float)

    p = sub.add_parser("spread", help="spread constant")
    common(p)
    p.add_argument("--method", default="oracle",
                   choices=["oracle", "star-exact", "tree-fptas"])
    p.add_argument("--eps", type=float)

    p = sub.add_parser("mve2", help="two-dimensional tree embedding value")
    common(p)
    p.add_argument("--embed-out", help="write the optimal embedding as JSON")

    p = sub.add_parser("lift", help="Gram-matrix lift of the variance program")
    common(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--out", help="write the lift factors as JSON")

    p = sub.add_parser("round", help="random or PCA rounding of a lift")
    common(p)
    p.add_argument("--lift", required=True, help="lift factors JSON file")
    p.add_argument("--method", default="gaussian", choices=["gaussian", "pca"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, help="defaults to $SPREAD_SEED")
    p.add_argument("--trials", type=int,
                   help="aggregate this many seeds instead of one projection")
    p.add_argument("--out", help="write the rounded embedding as JSON")

    p = sub.add_parser("vexp", help="vertex expansion")
    common(p)
    p.add_argument("--method", default="brute",
                   choices=["brute", "tree-dp", "star"])

    p = sub.add_parser("reduce", help="emit a balance-gadget star")
    common(p, graph=False)
    p.add_argument("--p", required=True, help="comma-separated parts, e.g. 1,1,2")
    p.add_argument("--beta", required=True)
    p.add_argument("--target", required=True,
                   choices=["lambda", "spread", "vexp"])
    p.add_argument("--emit", required=True, help="output graph file")

    p = sub.add_parser("gapcheck", help="predicted vs observed gadget gap")
    common(p, graph=False)
    p.add_argument("--p", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--target", required=True, choices=["lambda", "spread"])

    p = sub.add_parser("selftest", help="reduced-trial invariant suites")
    common(p, graph=False)
    p.add_argument("--mutate", default="none", choices=list(selftest.MUTATIONS))
    p.add_argument("--seed", type=int, default=0)
    return top


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SPREAD_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise GraphError(f"SPREAD_SEED must be an integer, got {env!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = RunConfig(
        subcommand=args.subcommand,
        graph=getattr(args, "graph", None),
        method=getattr(args, "method", None),
        eps=getattr(args, "eps", None),
        k=getattr(args, "k", None),
        trials=getattr(args, "trials", None),
        json_out=args.json_out,
        rational=getattr(args, "rational", False),
    )
    try:
        cfg.seed = _resolve_seed(args)
        if cfg.subcommand in ("lambda-inf", "spread", "mve2", "lift",
                              "round", "vexp"):
            g = _load_graph(cfg, getattr(args, "allow_zero_mass", False))
        if cfg.subcommand == "lambda-inf":
            payload, code = _cmd_lambda_inf(cfg, g)
        elif cfg.subcommand == "spread":
            payload, code = _cmd_spread(cfg, g)
        elif cfg.subcommand == "mve2":
            payload, code = _cmd_mve2(cfg, g, args.embed_out)
        elif cfg.subcommand == "lift":
            payload, code = _cmd_lift(cfg, g, args.tol, args.max_iters, args.out)
        elif cfg.subcommand == "round":
            payload, code = _cmd_round(cfg, g, args.lift, args.out)
        elif cfg.subcommand == "vexp":
            payload, code = _cmd_vexp(cfg, g)
        elif cfg.subcommand == "reduce":
            payload, code = _cmd_reduce(cfg, args.p, args.beta, args.target,
                                        args.emit)
        elif cfg.subcommand == "gapcheck":
            payload, code = _cmd_gapcheck(cfg, args.p, args.beta, args.target)
        else:
            payload, code = _cmd_selftest(cfg, args.mutate)
    except reductions.AccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GraphError, DegenerateValuationError, BudgetError, ValueError,
            TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(payload, cfg.subcommand, cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
