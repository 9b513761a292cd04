"""Command-line front end: ingestion, gadget verification, variational runs,
walk/sweep data emission.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 resource limit.  Every run writes a manifest next to its outputs and CSVs
carry the manifest as a leading comment; identical manifests give identical
bytes (use --threads 1 when regenerating golden files).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import (
    DenseLimit,
    DimensionTooLarge,
    GroundlabError,
    TooManyVariables,
    ZeroCoupling,
)

_RESOURCE_ERRORS = (DimensionTooLarge, DenseLimit, TooManyVariables)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _manifest(subcommand: str, args: argparse.Namespace, outputs) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return {
        "subcommand": subcommand,
        "flags": flags,
        "seed": flags.get("seed"),
        "outputs": list(outputs),
        "version": __version__,
    }


def _write_manifest(manifest: dict) -> str:
    line = json.dumps(manifest, sort_keys=True, default=str)
    for out in manifest["outputs"]:
        with open(str(out) + ".manifest.json", "w") as fh:
            fh.write(line + "\n")
    return line


def _write_csv(path: str, manifest_line: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(f"# manifest: {manifest_line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _parse_range(spec: str):
    """lo:hi:step inclusive grid."""
    lo, hi, step = (float(tok) for tok in spec.split(":"))
    count = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(count)]


# ---------------------------------------------------------------------------
# embed
# ---------------------------------------------------------------------------

def cmd_embed(args) -> int:
    from .paulis import ground
    from .pseudobool import Formula, cnf_to_hamiltonian, embed_formula, parse_dimacs

    if not args.dimacs and not args.formula:
        print("embed needs --dimacs or --formula", file=sys.stderr)
        return 2
    try:
        if args.dimacs:
            with open(args.dimacs) as fh:
                inst = parse_dimacs(fh.read())
            op = cnf_to_hamiltonian(inst)
            source = args.dimacs
        else:
            with open(args.formula) as fh:
                formula = Formula.from_json_dict(json.load(fh))
            op = embed_formula(formula)
            source = args.formula
    except FileNotFoundError as exc:
        print(f"missing input file: {exc.filename}", file=sys.stderr)
        return 2
    out = args.out or "hamiltonian.json"
    manifest = _manifest("embed", args, [out])
    line = _write_manifest(manifest)
    summary = {"source": source, "n": op.n, "cardinality": op.cardinality()}
    if op.n <= args.dense_limit:
        g = ground(op, limit=args.dense_limit)
        summary["ground_energy"] = g.energy
        summary["degeneracy"] = g.degeneracy
    payload = {"manifest": manifest, "operator": op.to_json_dict(), "summary": summary}
    with open(out, "w") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
    print(f"n={op.n} cardinality={op.cardinality()}"
          + (f" ground_energy={_fmt(summary['ground_energy'])}" if "ground_energy" in summary else ""))
    return 0


# ---------------------------------------------------------------------------
# gadget
# ---------------------------------------------------------------------------

def cmd_gadget(args) -> int:
    from .gadgets import (
        GadgetSpec,
        analytic_subdivision_delta,
        minimal_delta_search,
        spectral_error,
        subdivision_realization,
        verify_gadget,
        yy_realization,
        yy_search_bracket,
        zz_spec,
    )
    from .paulis import OperatorSum

    if args.alpha == 0.0:
        print("ZeroCoupling: alpha must be nonzero", file=sys.stderr)
        return 2
    alphas = _parse_range(args.alpha_grid) if args.alpha_grid else [args.alpha]
    rows = []
    all_pass = True
    for alpha in alphas:
        if alpha == 0.0:
            rows.append((alpha, args.eps, args.eps, 0.0, 0.0, True))
            continue
        if args.builder == "subdivision":
            spec = zz_spec(alpha, args.eps)
            delta = (minimal_delta_search(spec, "subdivision")
                     if args.search_min_delta else analytic_subdivision_delta(spec))
            real = subdivision_realization(spec, delta)
        else:
            spec = GadgetSpec(2, alpha, None, None, None, args.eps)
            if args.search_min_delta:
                delta = minimal_delta_search(spec, "yy")
            else:
                _, hi = yy_search_bracket(spec)
                delta = hi
            real = yy_realization(alpha, OperatorSum(2), delta)
        report = verify_gadget(real, epsilon=args.eps)
        all_pass = all_pass and report.passed
        rows.append((alpha, args.eps, delta, report.max_spectral_error,
                     report.sup_self_energy_error, report.passed))
    out = args.out or "gadget.csv"
    manifest_line = _write_manifest(_manifest("gadget", args, [out]))
    _write_csv(out, manifest_line,
               ["alpha", "epsilon", "delta", "max_spectral_error",
                "sup_self_energy_error", "pass"], rows)
    for row in rows:
        print(" ".join(_fmt(v) for v in row))
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# variational
# ---------------------------------------------------------------------------

def cmd_variational(args) -> int:
    if args.vmode == "grover":
        return _variational_grover(args)
    if args.vmode == "qaoa":
        return _variational_qaoa(args)
    if args.vmode == "deficit":
        return _variational_deficit(args)
    if args.vmode == "clock":
        return _variational_clock(args)
    print(f"unknown variational mode {args.vmode!r}", file=sys.stderr)
    return 2


def _variational_grover(args) -> int:
    from .variational import OptimizerConfig, variational_grover

    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    rows = []
    for p in args.p:
        result = variational_grover(args.n, p, args.mode, cfg)
        rows.append((1 << args.n, p, result.probability, result.grover_probability,
                     result.improvement_percent, result.optimal_angle))
    out = args.out or "grover.csv"
    manifest_line = _write_manifest(_manifest("variational-grover", args, [out]))
    _write_csv(out, manifest_line,
               ["N", "p", "probability", "grover", "improvement_percent", "angle_rad"],
               rows)
    for row in rows:
        print(" ".join(_fmt(v) for v in row))
    return 0


def _variational_qaoa(args) -> int:
    from .pseudobool import parse_dimacs
    from .variational import OptimizerConfig, qaoa_minimize
    from .pseudobool import cnf_to_hamiltonian

    with open(args.dimacs) as fh:
        inst = parse_dimacs(fh.read())
    cost = cnf_to_hamiltonian(inst)
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    rows = []
    for p in args.p:
        res = qaoa_minimize(cost, p, cfg)
        rows.append((inst.n, inst.m, p, res.value, res.evaluations))
    out = args.out or "qaoa.csv"
    manifest_line = _write_manifest(_manifest("variational-qaoa", args, [out]))
    _write_csv(out, manifest_line, ["n", "m", "p", "energy", "evaluations"], rows)
    for row in rows:
        print(" ".join(_fmt(v) for v in row))
    return 0


def _variational_deficit(args) -> int:
    from .pseudobool import random_ksat
    from .variational import OptimizerConfig, reachability_deficit

    alphas = _parse_range(args.alpha_grid) if args.alpha_grid else \
        [a for a in np.arange(0.5, args.alpha_max + 1e-9, args.alpha_step)]
    rows = []
    for alpha in alphas:
        m = int(round(alpha * args.n))
        for p in args.p:
            values = []
            for i in range(args.instances):
                rng = np.random.default_rng([args.seed, int(round(alpha * 1000)), p, i])
                inst = random_ksat(args.n, m, 3, rng)
                cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed + i)
                values.append(reachability_deficit(inst, p, cfg))
            values = np.asarray(values)
            stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
            rows.append((float(alpha), p, float(values.mean()), stderr, args.instances))
    out = args.out or "deficit.csv"
    manifest_line = _write_manifest(_manifest("variational-deficit", args, [out]))
    _write_csv(out, manifest_line, ["alpha", "p", "mean_f", "stderr", "seeds"], rows)
    for row in rows:
        print(" ".join(_fmt(v) for v in row))
    return 0


def _variational_clock(args) -> int:
    from .circuits import Circuit
    from .clock import acceptance_overlap, clock_hamiltonian, gap_analysis

    with open(args.circuit) as fh:
        circuit = Circuit.from_json_dict(json.load(fh))
    ch = clock_hamiltonian(circuit, args.J, args.K, padding=args.M, encoding=args.encoding)
    overlap = acceptance_overlap(circuit, args.M)
    gaps = gap_analysis(ch.length, args.J, args.K, n_system=circuit.n)
    report = {
        "L": overlap["L"],
        "M": args.M,
        "encoding": args.encoding,
        "cardinality": ch.cardinality(),
        "gap_exact": gaps["combined_gap"],
        "gap_bound": gaps["bound"],
        "overlap": overlap["overlap"],
        "overlap_closed_form": overlap["closed_form"],
    }
    out = args.out or "clock.json"
    manifest = _manifest("variational-clock", args, [out])
    line = _write_manifest(manifest)
    with open(out, "w") as fh:
        json.dump({"manifest": manifest, "report": report}, fh, sort_keys=True)
        fh.write("\n")
    print(json.dumps(report, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# walk / sweep
# ---------------------------------------------------------------------------

def cmd_walk(args) -> int:
    from .walks import (
        Graph,
        build_generators,
        long_time_average,
        quantum_evolve,
        spectral_entropy,
        stationary_state,
        stochastic_evolve,
    )

    with open(args.graph) as fh:
        text = fh.read()
    try:
        graph = Graph.from_json_dict(json.loads(text))
    except json.JSONDecodeError:
        graph = Graph.from_text(text)
    gen = build_generators(graph)
    out = args.out or "walk.dat"
    manifest_line = _write_manifest(_manifest("walk", args, [out]))

    if args.stationary:
        pi = stationary_state(gen)
        _write_csv(out, manifest_line, ["node", "pi"], list(enumerate(pi)))
        print(" ".join(_fmt(v) for v in pi))
        return 0
    if args.longtime:
        start = np.zeros(gen.n)
        start[args.start_node] = 1.0
        lta = long_time_average(gen, start.astype(complex))
        _write_csv(out, manifest_line, ["node", "P", "pi"],
                   [(i, lta.probabilities[i], lta.stationary[i]) for i in range(gen.n)])
        print(" ".join(_fmt(v) for v in lta.probabilities))
        return 0
    if args.entropy is not None:
        s = spectral_entropy(gen.laplacian, args.entropy)
        _write_csv(out, manifest_line, ["beta", "entropy_bits"], [(args.entropy, s)])
        print(_fmt(s))
        return 0
    if args.times:
        lo, hi, dt = (float(t) for t in args.times.split(":"))
        times = np.arange(lo, hi + 1e-12, dt)
        start = np.zeros(gen.n, dtype=complex)
        start[args.start_node] = 1.0
        rows = []
        for t in times:
            if args.quantum:
                probs = np.abs(quantum_evolve(gen, start, t)) ** 2
            else:
                probs = stochastic_evolve(gen, start.real, t)
            rows.append((t, *probs))
        header = ["t"] + [f"p{i}" for i in range(gen.n)]
        _write_csv(out, manifest_line, header, rows)
        print(f"wrote {len(rows)} rows to {out}")
        return 0
    print("walk needs one of --stationary/--longtime/--entropy/--times", file=sys.stderr)
    return 2


def cmd_sweep(args) -> int:
    from .thermal import sat_sweep, satisfiable_crossing

    alphas = _parse_range(args.alpha)
    rows = sat_sweep(args.n, alphas, args.instances, args.beta, args.seed,
                     threads=args.threads)
    out = args.out or "sweep.csv"
    manifest_line = _write_manifest(_manifest("sweep", args, [out]))
    _write_csv(out, manifest_line,
               ["alpha", "beta", "frac_sat", "mean_p", "stderr_p", "mean_lambda_min"],
               [(r.alpha, r.beta, r.frac_sat, r.mean_p, r.stderr_p, r.mean_lambda_min)
                for r in rows])
    crossing = satisfiable_crossing(rows)
    print(f"rows={len(rows)} crossing={_fmt(crossing) if crossing else 'none'}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groundlab",
        description="Ground-state programming laboratory: embeddings, gadgets, "
                    "variational runs, walks and SAT sweeps.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_embed = sub.add_parser("embed", help="Boolean/CNF input to diagonal operator")
    p_embed.add_argument("--dimacs")
    p_embed.add_argument("--formula")
    p_embed.add_argument("--out")
    p_embed.add_argument("--dense-limit", type=int, default=14)
    p_embed.set_defaults(func=cmd_embed)

    p_gadget = sub.add_parser("gadget", help="perturbative gadget verification")
    p_gadget.add_argument("--builder", choices=("subdivision", "yy"), required=True)
    p_gadget.add_argument("--alpha", type=float, default=1.0)
    p_gadget.add_argument("--alpha-grid", help="lo:hi:step sweep over alpha")
    p_gadget.add_argument("--eps", type=float, default=0.05)
    p_gadget.add_argument("--search-min-delta", action="store_true")
    p_gadget.add_argument("--out")
    p_gadget.set_defaults(func=cmd_gadget)

    p_var = sub.add_parser("variational", help="qaoa | grover | deficit | clock")
    var_sub = p_var.add_subparsers(dest="vmode", required=True)

    g = var_sub.add_parser("grover")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, nargs="+", required=True)
    g.add_argument("--mode", default="two_level",
                   choices=("var_diffusion", "restricted_diffusion", "matched", "two_level"))
    g.add_argument("--restarts", type=int, default=32)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_variational)

    q = var_sub.add_parser("qaoa")
    q.add_argument("--dimacs", required=True)
    q.add_argument("--p", type=int, nargs="+", required=True)
    q.add_argument("--restarts", type=int, default=16)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_variational)

    d = var_sub.add_parser("deficit")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--alpha-max", type=float, default=10.0)
    d.add_argument("--alpha-step", type=float, default=0.5)
    d.add_argument("--alpha-grid")
    d.add_argument("--p", type=int, nargs="+", default=[1])
    d.add_argument("--instances", type=int, default=20)
    d.add_argument("--restarts", type=int, default=8)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_variational)

    k = var_sub.add_parser("clock")
    k.add_argument("--circuit", required=True)
    k.add_argument("--M", type=int, default=0)
    k.add_argument("--J", type=float, default=1.0)
    k.add_argument("--K", type=float, default=1.0)
    k.add_argument("--encoding", default="binary", choices=("binary", "unary"))
    k.add_argument("--out")
    k.set_defaults(func=cmd_variational)

    w = sub.add_parser("walk", help="graph walk data emission")
    w.add_argument("--graph", required=True)
    w.add_argument("--stationary", action="store_true")
    w.add_argument("--longtime", action="store_true")
    w.add_argument("--quantum", action="store_true")
    w.add_argument("--entropy", type=float, default=None, metavar="BETA")
    w.add_argument("--times", help="lo:hi:dt evolution grid")
    w.add_argument("--start-node", type=int, default=0)
    w.add_argument("--out")
    w.set_defaults(func=cmd_walk)

    s = sub.add_parser("sweep", help="random k-SAT thermal sweep")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alpha", required=True, help="lo:hi:step clause-density grid")
    s.add_argument("--beta", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    s.add_argument("--instances", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ZeroCoupling as exc:
        print(f"ZeroCoupling: {exc}", file=sys.stderr)
        return 2
    except _RESOURCE_ERRORS as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except GroundlabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
