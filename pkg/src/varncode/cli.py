"""Command line interface.

Subcommands: root (characteristic root), code (build + codewords + report),
bounds (report only), oracle (exact small-instance optimum), compare (coder
vs oracle), bench (timing CSV).  Exit codes: 0 ok, 2 parse/input error,
3 numeric error (no root, divergence, underflow), 4 oracle limits, 5 audit
violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import approx_bound, entropy, report
from .coder import build_code, prepare, verify_prefix_free
from .costs import char_root, parse_cost_spec
from .errors import (
    BetaInfiniteError,
    BinUnderflowError,
    CapTooSmallError,
    CostSpecError,
    DivergentSpecError,
    DivergentTailError,
    InfiniteAlphabetError,
    NoRootError,
    OracleTooLargeError,
    ProbInputError,
    UnboundedProfileError,
)
from .oracle import exact_opt

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_ORACLE = 4
EXIT_VIOLATION = 5

_GAP_TOL = 1e-7

_REASON = {
    CostSpecError: "parse",
    ProbInputError: "parse",
    NoRootError: "no_root",
    DivergentSpecError: "divergent_spec",
    DivergentTailError: "divergent_tail",
    UnboundedProfileError: "unbounded_profile",
    BetaInfiniteError: "beta_infinite",
    InfiniteAlphabetError: "infinite_alphabet",
    BinUnderflowError: "bin_underflow",
    OracleTooLargeError: "oracle_too_large",
    CapTooSmallError: "cap_too_small",
}


@dataclass
class RunConfig:
    """Everything one invocation depends on; seed fixes generated inputs."""

    command: str
    cost_text: str | None = None
    probs_path: str | None = None
    inline: str | None = None
    gen: str | None = None
    seed: int = 0
    normalize: bool = False
    fmt: str = "text"
    epsilon: float | None = None
    tol: float = 1e-12
    trace: bool = False
    cap: float | None = None


# ---------------------------------------------------------------------------
# probability sources
# ---------------------------------------------------------------------------

def make_probs(dist: str, n: int, seed: int) -> np.ndarray:
    """Distribution family -> probability vector of length n."""
    name, _, params = dist.partition(":")
    name = name.strip().lower()
    if n < 1:
        raise ProbInputError("need n >= 1")
    if name == "uniform":
        rng = np.random.default_rng(seed)
        x = rng.random(n) + 1e-9
    elif name == "zipf":
        s = float(params) if params else 1.0
        x = np.arange(1, n + 1, dtype=np.float64) ** (-s)
    elif name == "geom":
        q = float(params) if params else 0.5
        if not 0.0 < q < 1.0:
            raise ProbInputError("geometric ratio must be in (0, 1)")
        x = q ** np.arange(n, dtype=np.float64)
    elif name == "dyadic":
        if n == 1:
            x = np.array([1.0])
        else:
            x = np.exp2(-np.arange(1, n + 1, dtype=np.float64))
            x[-1] = x[-2]
    else:
        raise ProbInputError(f"unknown distribution {dist!r}")
    return x / x.sum()


def parse_gen(spec: str, seed: int) -> np.ndarray:
    """Generator DSL: uniform:N | zipf:S,N | geom:Q,N | dyadic:N."""
    name, _, params = spec.strip().partition(":")
    name = name.strip().lower()
    parts = [p.strip() for p in params.split(",")] if params else []
    try:
        if name in ("uniform", "dyadic"):
            if len(parts) != 1:
                raise ValueError
            return make_probs(name, int(parts[0]), seed)
        if name in ("zipf", "geom"):
            if len(parts) != 2:
                raise ValueError
            return make_probs(f"{name}:{parts[0]}", int(parts[1]), seed)
    except ValueError as exc:
        raise ProbInputError(f"malformed generator spec {spec!r}") from exc
    raise ProbInputError(f"unknown generator {spec!r}")


def read_probs_file(path: str) -> list[float]:
    """One value per line with '#' comments, or a JSON array."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        data = json.loads(text)
        if not isinstance(data, list):
            raise ProbInputError("JSON probability file must hold an array")
        return [float(v) for v in data]
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            values.append(float(body))
        except ValueError as exc:
            raise ProbInputError(f"bad probability on line {lineno}: {body!r}") from exc
    return values


def load_input(cfg: RunConfig):
    if cfg.probs_path is not None:
        raw = read_probs_file(cfg.probs_path)
    elif cfg.inline is not None:
        try:
            raw = [float(p) for p in cfg.inline.split(",") if p.strip()]
        except ValueError as exc:
            raise ProbInputError(f"bad inline probabilities {cfg.inline!r}") from exc
    elif cfg.gen is not None:
        raw = parse_gen(cfg.gen, cfg.seed)
    else:
        raise ProbInputError("no probability source given")
    return prepare(raw, normalize=cfg.normalize)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    sys.stdout.write("\n")


def _num(x: float | None):
    if x is None or not math.isfinite(x):
        return None
    return x


def root_dict(spec, root) -> dict:
    return {
        "spec": spec.label,
        "kind": spec.kind,
        "c": root.value,
        "tolerance": root.tolerance,
        "residual": root.residual,
        "beta": _num(root.beta),
        "beta_finite": math.isfinite(root.beta),
        "tail_convergent": root.tail_convergent,
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_root(cfg: RunConfig) -> int:
    spec = parse_cost_spec(cfg.cost_text)
    root = char_root(spec, tol=cfg.tol)
    if cfg.fmt == "json":
        emit_json(root_dict(spec, root))
    else:
        beta = "inf" if not math.isfinite(root.beta) else repr(root.beta)
        print(f"spec: {spec.label} ({spec.kind})")
        print(f"c = {root.value!r}")
        print(f"tolerance = {root.tolerance!r}")
        print(f"residual |S(c)-1| = {root.residual!r}")
        print(f"beta = {beta}")
        print(f"tail_convergent = {root.tail_convergent}")
    return EXIT_OK


def _trace_dict(trace) -> list:
    out = []
    for e in trace.events:
        out.append({
            "node": e.node,
            "range": [e.first, e.last],
            "interval": [e.lo, e.hi],
            "weight": e.weight,
            "left_shifted": e.left_shifted,
            "right_shifted": e.right_shifted,
            "right_shift_index": e.right_shift_index,
            "bins": [
                {
                    "letter": b.index,
                    "lo": b.lo,
                    "hi": b.hi,
                    "initial": list(b.initial) if b.initial else None,
                    "final": list(b.final),
                    "initial_weight": b.initial_weight,
                    "final_weight": b.final_weight,
                }
                for b in e.bins
            ],
        })
    return out


def cmd_code(cfg: RunConfig, include_tree: bool = False) -> int:
    spec = parse_cost_spec(cfg.cost_text)
    root = char_root(spec, tol=cfg.tol)
    pin = load_input(cfg)
    tree = build_code(pin, spec, root, trace=cfg.trace)
    rep = report(tree, epsilon=cfg.epsilon)
    if cfg.fmt == "json":
        payload = {
            "root": root_dict(spec, root),
            "codewords": [
                {"index": i, "letters": list(letters), "cost": cost}
                for i, letters, cost in tree.codewords()
            ],
            "report": rep.to_dict(),
        }
        if include_tree:
            payload["tree"] = tree.to_dict()
        if cfg.trace:
            payload["trace"] = _trace_dict(tree.trace)
        emit_json(payload)
    else:
        for line in tree.codeword_lines():
            print(line)
        print(f"# cost = {rep.cost!r}")
        print(f"# entropy = {rep.entropy!r}")
        print(f"# lower_bound = {rep.lower_bound!r}")
        print(f"# redundancy = {rep.redundancy!r}  nr = {rep.nr!r}")
        if cfg.trace:
            for e in tree.trace.events:
                flags = []
                if e.left_shifted:
                    flags.append("left-shift")
                if e.right_shifted:
                    flags.append(f"right-shift@{e.right_shift_index}")
                tags = (" [" + ", ".join(flags) + "]") if flags else ""
                print(f"# split node {e.node} slots {e.first}..{e.last}{tags}")
                for b in e.bins:
                    init = f"{b.initial[0]}..{b.initial[1]}" if b.initial else "-"
                    print(
                        f"#   bin {b.index}: [{b.lo:.6g}, {b.hi:.6g}) "
                        f"initial {init} final {b.final[0]}..{b.final[1]}"
                    )
    return EXIT_OK


def cmd_bounds(cfg: RunConfig) -> int:
    spec = parse_cost_spec(cfg.cost_text)
    root = char_root(spec, tol=cfg.tol)
    pin = load_input(cfg)
    tree = build_code(pin, spec, root)
    rep = report(tree, epsilon=cfg.epsilon)
    if cfg.fmt == "json":
        emit_json(rep.to_dict())
    else:
        print(f"cost = {rep.cost!r}")
        print(f"entropy = {rep.entropy!r}")
        print(f"lower_bound = {rep.lower_bound!r}")
        print(f"redundancy = {rep.redundancy!r}")
        print(f"nr = {rep.nr!r}")
        for b in rep.bounds:
            if b.applicable:
                print(f"{b.name}: {b.value!r}")
            else:
                print(f"{b.name}: n/a ({b.reason})")
        if cfg.epsilon is not None and root.tail_convergent:
            ab = approx_bound(spec, root, cfg.epsilon)
            print(
                f"approx: C <= (1+{ab.epsilon:g})*OPT + {ab.f_value!r}"
                f"  (N_eps={ab.cost_threshold:g}, m_eps={ab.index_threshold})"
            )
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    spec = parse_cost_spec(cfg.cost_text)
    pin = load_input(cfg)
    res = exact_opt(pin, spec, cap=cfg.cap)
    if cfg.fmt == "json":
        emit_json({
            "opt_cost": res.opt_cost,
            "codeword_costs": list(res.opt_codeword_costs),
            "nodes_explored": res.nodes_explored,
            "cost_cap_used": _num(res.cost_cap_used),
            "words": [list(w) for w in res.opt_words],
        })
    else:
        print(f"opt_cost = {res.opt_cost!r}")
        print(f"codeword_costs = {list(res.opt_codeword_costs)}")
        print(f"nodes_explored = {res.nodes_explored}")
        for k, w in enumerate(res.opt_words):
            print(f"word {k}: {','.join(str(m) for m in w)}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    spec = parse_cost_spec(cfg.cost_text)
    root = char_root(spec, tol=cfg.tol)
    pin = load_input(cfg)
    tree = build_code(pin, spec, root)
    rep = report(tree, epsilon=cfg.epsilon)
    res = exact_opt(pin, spec, cap=tree.cost())
    c = root.value
    gap = rep.cost - res.opt_cost
    best = rep.min_applicable()
    gap_bound = best / c if best is not None else None
    violations = []
    if rep.lower_bound > res.opt_cost + 1e-9:
        violations.append("entropy lower bound exceeds OPT")
    if res.opt_cost > rep.cost + 1e-9:
        violations.append("OPT exceeds the constructed cost")
    if gap_bound is not None and gap > gap_bound + _GAP_TOL:
        violations.append("cost gap exceeds the bound")
    payload = {
        "cost": rep.cost,
        "opt_cost": res.opt_cost,
        "lower_bound": rep.lower_bound,
        "gap": gap,
        "gap_bound": gap_bound,
        "nodes_explored": res.nodes_explored,
        "violations": violations,
    }
    if cfg.fmt == "json":
        emit_json(payload)
    else:
        print(f"C(T) = {rep.cost!r}")
        print(f"OPT  = {res.opt_cost!r}")
        print(f"H/c  = {rep.lower_bound!r}")
        print(f"gap  = {gap!r}")
        if gap_bound is not None:
            print(f"bound/c = {gap_bound!r}")
        for v in violations:
            print(f"VIOLATION: {v}")
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_bench(cfg: RunConfig, sizes, dist: str, repeats: int) -> int:
    spec = parse_cost_spec(cfg.cost_text)
    root = char_root(spec, tol=cfg.tol)
    rows = []
    for n in sizes:
        probs = make_probs(dist, n, cfg.seed)
        pin = prepare(probs)
        times = []
        tree = None
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            tree = build_code(pin, spec, root)
            times.append(time.perf_counter() - t0)
        seconds = sorted(times)[len(times) // 2]
        rep = report(tree)
        rows.append((n, seconds, rep.cost, rep.nr, rep.min_applicable()))
    print("n,seconds,cost,nr")
    for n, seconds, cost, nr, _ in rows:
        print(f"{n},{seconds:.6f},{cost!r},{nr!r}")
    code = EXIT_OK
    for n, _, _, nr, bound in rows:
        if bound is not None and nr > bound + _GAP_TOL:
            print(f"VIOLATION: nr exceeds bound at n={n}", file=sys.stderr)
            code = EXIT_VIOLATION
    for (n1, s1, *_), (n2, s2, *_) in zip(rows, rows[1:]):
        if n1 < 10_000 or s1 <= 0.0:
            continue
        allowed = 2.5 * (n2 / n1)
        if s2 / s1 > allowed:
            print(
                f"VIOLATION: time ratio {s2 / s1:.2f} from n={n1} to n={n2} "
                f"exceeds {allowed:.2f}",
                file=sys.stderr,
            )
            code = EXIT_VIOLATION
    return code


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------

def _add_costs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--costs", required=True, metavar="SPEC",
                   help="cost spec DSL, e.g. finite:1,3 linear repeat:2 fib")


def _add_probs(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--probs", metavar="FILE",
                   help="probability file: one value per line (# comments) or JSON array")
    g.add_argument("--inline", metavar="P1,P2,...", help="probabilities inline")
    g.add_argument("--gen", metavar="SPEC",
                   help="generator: uniform:N | zipf:S,N | geom:Q,N | dyadic:N")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--normalize", action="store_true",
                   help="rescale probabilities to sum to 1")


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", dest="fmt", choices=("text", "json"),
                   default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="varncode",
        description="Prefix-free codes with unequal letter costs.",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("root", help="characteristic root of a cost spec")
    _add_costs(p)
    _add_format(p)
    p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("code", help="build a code and print codewords + report")
    _add_costs(p)
    _add_probs(p)
    _add_format(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--epsilon", type=float, default=None,
                   help="enable the approximation bound row")
    p.add_argument("--trace", action="store_true", help="record split details")
    p.add_argument("--tree", action="store_true",
                   help="include the serialized tree in JSON output")

    p = sub.add_parser("bounds", help="entropy, redundancy, and bound table")
    _add_costs(p)
    _add_probs(p)
    _add_format(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("oracle", help="exact optimum for small instances")
    _add_costs(p)
    _add_probs(p)
    _add_format(p)
    p.add_argument("--cap", type=float, default=None,
                   help="prune the search above this cost")

    p = sub.add_parser("compare", help="constructed cost vs exact optimum")
    _add_costs(p)
    _add_probs(p)
    _add_format(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("bench", help="build-time CSV over instance sizes")
    _add_costs(p)
    p.add_argument("--sizes", default="1000,10000,100000,1000000",
                   help="comma-separated instance sizes")
    p.add_argument("--dist", default="zipf:1.0",
                   help="distribution family: uniform | zipf:S | geom:Q | dyadic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-12)

    return ap


def _config_from(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        cost_text=getattr(args, "costs", None),
        probs_path=getattr(args, "probs", None),
        inline=getattr(args, "inline", None),
        gen=getattr(args, "gen", None),
        seed=getattr(args, "seed", 0),
        normalize=getattr(args, "normalize", False),
        fmt=getattr(args, "fmt", "text"),
        epsilon=getattr(args, "epsilon", None),
        tol=getattr(args, "tol", 1e-12),
        trace=getattr(args, "trace", False),
        cap=getattr(args, "cap", None),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config_from(args)
    try:
        if cfg.command == "root":
            return cmd_root(cfg)
        if cfg.command == "code":
            return cmd_code(cfg, include_tree=getattr(args, "tree", False))
        if cfg.command == "bounds":
            return cmd_bounds(cfg)
        if cfg.command == "oracle":
            return cmd_oracle(cfg)
        if cfg.command == "compare":
            return cmd_compare(cfg)
        if cfg.command == "bench":
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
            return cmd_bench(cfg, sizes, args.dist, args.repeats)
        raise AssertionError(f"unhandled command {cfg.command}")
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error parse: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error parse: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except tuple(_REASON) as exc:
        token = _REASON[type(exc)]
        print(f"error {token}: {exc}", file=sys.stderr)
        if token == "parse":
            return EXIT_PARSE
        if token in ("oracle_too_large", "cap_too_small"):
            return EXIT_ORACLE
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
