"""
Command-line interface: ``hypercen <subcommand> [flags]``.

Every successful run writes ``<output>.manifest.json`` next to its main
output. The manifest holds the resolved flags, seeds, the library version
and SHA-256 digests of inputs and outputs, and nothing time dependent, so
``hypercen replay <manifest>`` can rerun the command and confirm that the
outputs come out byte-identical.

Exit codes: 0 success, 1 usage error, 2 domain error. Domain errors print
a machine-readable line such as ``error_code=POLE beta=0.5 lambda=2.0`` on
standard error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import adapt, centrality, hypercore, netgen, propagation, spectral
from .errors import ConfigError, HypercenError
from .hypercore import DirectedHypergraph, Graph, Hypergraph

log = logging.getLogger("hypercen")

INPUT_FLAGS = ("input",)
OUTPUT_FLAGS = ("output", "report", "histogram", "sweep", "final", "events")
LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

START_NAMES = {"new": "new", "random": "random_existing", "prefdegree": "preferential_by_degree"}
PREF_NAMES = {
    "degree": "degree",
    "centrality": "centrality",
    "localcentrality": "local_centrality",
    "cluster": "cluster_coefficient",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        out.writerows(rows)


def _load_network(path):
    if str(path).lower().endswith(".csv"):
        return hypercore.import_csv(path)
    return hypercore.load(path)


def _require_hyper(net, what):
    if not isinstance(net, (Hypergraph, DirectedHypergraph)):
        raise ConfigError(f"{what} needs a hypergraph document")
    return net


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args):
    cfg = netgen.GenConfig(
        starting_node_mode=START_NAMES[args.start],
        preference_mode=PREF_NAMES[args.pref],
        iterations=args.iters,
        links_per_step=args.m,
        edge_weight=args.weight,
        beta=args.beta,
        beta1=args.beta1,
        rng_seed=args.seed,
        mode="graph" if args.mode == "graph" else "hypergraph",
        p_join=args.p_join,
    )
    initial = _load_network(args.input) if args.input else None
    res = netgen.grow(cfg, initial)
    hypercore.save(res.network, args.output)
    if args.report:
        _write_report(netgen.analyze(res.network, args.beta, args.beta1),
                      res.network, args.report)
    if args.events:
        _write_csv(args.events, ["step", "event", "detail"], [
            (ev.get("step"), ev["event"],
             json.dumps({k: v for k, v in ev.items() if k not in ("step", "event")},
                        sort_keys=True))
            for ev in res.events
        ])
    n = res.network.node_count
    print(f"nodes={n} links_added={res.links_added} events={len(res.events)}")


def _labels(net):
    return net.base.node_labels if isinstance(net, DirectedHypergraph) else net.node_labels


def _write_report(rep, net, path):
    labels = _labels(net)
    _write_csv(path, ["node", "degree", "centrality", "cluster_coeff"], [
        (labels[i], deg, "" if cen is None else _fmt(cen), _fmt(cc))
        for i, deg, cen, cc in rep.rows()
    ])


def cmd_analyze(args):
    net = _load_network(args.input)
    if isinstance(net, DirectedHypergraph):
        net = net.base
    rep = netgen.analyze(net, args.beta, args.beta1)
    _write_report(rep, net, args.output)
    if args.histogram:
        _write_csv(args.histogram, ["degree", "count"], sorted(rep.histogram.items()))
    if args.sweep:
        rows = []
        labels = _labels(net)
        for b, deg, cen, note in netgen.beta_sweep(net):
            for i in range(deg.size):
                rows.append((_fmt(b), labels[i], int(deg[i]),
                             "" if cen is None else _fmt(cen[i]), note))
        _write_csv(args.sweep, ["beta", "node", "degree", "centrality", "note"], rows)
    fit = rep.fit
    line = f"nodes={rep.degree.size} lambda_max={rep.lambda_max!r}"
    if fit is not None:
        line += f" slope={fit.slope!r} intercept={fit.intercept!r} r2={fit.r2!r}"
    print(line)
    for note in rep.notes:
        print(f"note: {note}")


def cmd_centrality(args):
    net = _load_network(args.input)
    rows = []
    if isinstance(net, Graph):
        a = net.adjacency
        if args.measure == "eigenvector":
            res = centrality.eigencentrality_graph(a)
        elif args.measure == "degree":
            res = centrality.CentralityResult(a @ np.ones(a.shape[0]), method="degree")
        else:
            res = centrality.general_centrality_graph(a, args.alpha1, args.beta2, args.method)
    else:
        base = net.base if isinstance(net, DirectedHypergraph) else net
        if args.measure == "eigenvector":
            res = centrality.eigencentrality_hyper(_require_hyper(base, "eigenvector"))
        elif args.measure == "degree":
            res = centrality.CentralityResult(
                hypercore.node_degrees(base, weighted=True),
                hypercore.edge_degrees(base, weighted=True), method="degree")
        else:
            res = centrality.general_centrality_hyper(
                net, args.alpha1, args.alpha2, args.beta1, args.beta2, args.method)
    if args.rescale:
        res = centrality.rescale_to_average(res)
    labels = _labels(net)
    rows = [(labels[i], "node", _fmt(s)) for i, s in enumerate(res.node_scores)]
    if res.edge_scores is not None:
        base = net.base if isinstance(net, DirectedHypergraph) else net
        rows += [(base.edge_labels[j], "edge", _fmt(s)) for j, s in enumerate(res.edge_scores)]
    _write_csv(args.output, ["id", "kind", "score"], rows)
    regime = res.meta.get("regime")
    print(f"method={res.method}" + (f" regime={regime}" if regime else ""))


def _matrix_of(net):
    if isinstance(net, Graph):
        return net.adjacency
    if isinstance(net, DirectedHypergraph):
        return hypercore.project_directed(net).adjacency
    return hypercore.project(net).adjacency


def cmd_spectrum(args):
    net = _load_network(args.input)
    ev = spectral.spectrum(_matrix_of(net))
    rows = []
    for k, lam in enumerate(ev):
        lam = complex(lam)
        pole = "" if abs(lam) < 1e-14 * max(1.0, float(np.max(np.abs(ev)))) else 1 / lam
        if isinstance(pole, complex):
            pole = _fmt(pole.real) if pole.imag == 0 else repr(pole)
        rows.append((k, _fmt(lam.real), _fmt(lam.imag), pole))
    _write_csv(args.output, ["k", "real", "imag", "pole_beta"], rows)
    rho = float(np.max(np.abs(ev))) if ev.size else 0.0
    print(f"lambda_max={rho!r}")


def cmd_simulate(args):
    net = _load_network(args.input)
    cfg = propagation.PropagationConfig(
        pass_probability_node=args.beta2,
        pass_probability_edge=args.beta1,
        walks_per_node=args.walks,
        rng_seed=args.seed,
        max_hops=args.max_hops,
        sampler=args.sampler,
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        threads=args.threads,
    )
    if isinstance(net, Graph):
        st = propagation.simulate_graph(net.adjacency, cfg)
    elif isinstance(net, DirectedHypergraph):
        raise ConfigError("simulation is defined for undirected hypergraphs only")
    else:
        st = propagation.simulate_hyper(net, cfg)
    labels = _labels(net)
    _write_csv(args.output, ["id", "estimate", "stderr", "mean_chain_length"], [
        (labels[i], _fmt(st.estimate[i]), _fmt(st.stderr[i]), _fmt(st.mean_chain_length[i]))
        for i in range(st.estimate.size)
    ])
    print(f"walks={st.walks} sampler={st.sampler} truncation_bound={st.truncation_bound!r}")


def cmd_learn(args):
    net = _require_hyper(_load_network(args.input), "learn")
    if isinstance(net, DirectedHypergraph):
        net = net.base
    cfg = adapt.LearningConfig(rate=args.rate, punishment=args.punish)
    final, rows = adapt.learn_demo(
        net, args.steps, cfg, seed=args.seed, select_probability=args.select_prob,
        dim=args.dim, f_a=adapt.contraction(args.kappa), log_path=args.output,
    )
    if args.final:
        hypercore.save(final, args.final)
    clamps = sum(1 for r in rows if r[-1])
    print(f"steps={len(rows)} clamped={clamps}")


def cmd_project(args):
    net = _require_hyper(_load_network(args.input), "project")
    if isinstance(net, DirectedHypergraph):
        a = hypercore.project_directed(net).adjacency
        labels = net.base.node_labels
    else:
        a = hypercore.project(net).adjacency
        labels = net.node_labels
    if str(args.output).lower().endswith(".csv"):
        rows = [(labels[i], labels[j], _fmt(a[i, j])) for i, j in zip(*np.nonzero(a))]
        _write_csv(args.output, ["source", "target", "w"], rows)
    else:
        if isinstance(net, DirectedHypergraph):
            raise ConfigError("a directed projection is not symmetric; write it as .csv")
        hypercore.save(Graph(a, labels), args.output)
    print(f"nodes={a.shape[0]} lambda_max={spectral.lambda_max(a, 'eigh')!r}"
          if not isinstance(net, DirectedHypergraph) else f"nodes={a.shape[0]}")


def cmd_convert(args):
    net = _load_network(args.input)
    if str(args.output).lower().endswith(".csv"):
        if not isinstance(net, Hypergraph):
            raise ConfigError("only undirected hypergraphs convert to node,edge,weight CSV")
        hypercore.export_csv(net, args.output)
    else:
        hypercore.save(net, args.output)
    print(f"wrote {args.output}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = _Parser(prog="hypercen", description=__doc__.split("\n\n")[0].strip(),
                formatter_class=fmt)
    p.add_argument("--version", action="version", version=f"hypercen {__version__}")
    sub = p.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt)
        sp.set_defaults(func=func)
        return sp

    def hyper_params(sp):
        sp.add_argument("--alpha1", type=float, default=1.0,
                        help="scale of edge-ending communications (alpha for graphs)")
        sp.add_argument("--alpha2", type=float, default=1.0,
                        help="scale of node-ending communications")
        sp.add_argument("--beta1", type=float, default=1.0,
                        help="chance an edge relays a message")
        sp.add_argument("--beta2", type=float, default=0.5,
                        help="chance a node relays a message (beta for graphs)")

    sp = add("gen", cmd_gen, "grow a network by generalised preferential attachment")
    sp.add_argument("--mode", choices=["graph", "hyper"], default="graph", help="network type")
    sp.add_argument("--start", choices=list(START_NAMES), default="new",
                    help="starting node of each step")
    sp.add_argument("--pref", choices=list(PREF_NAMES), default="degree",
                    help="preference score of targets")
    sp.add_argument("--iters", type=int, default=100, help="growth steps")
    sp.add_argument("--m", type=int, default=1, help="links per step")
    sp.add_argument("--weight", type=float, default=0.1, help="weight of every new link")
    sp.add_argument("--beta", type=float, default=0.5, help="beta for centrality preferences")
    sp.add_argument("--beta1", type=float, default=1.0, help="edge relay chance (hyper mode)")
    sp.add_argument("--p-join", type=float, default=0.5,
                    help="hyper mode: chance of joining an edge instead of founding one")
    sp.add_argument("--seed", type=int, default=0, help="random seed")
    sp.add_argument("--input", default=None, help="grow from this network instead of the seed")
    sp.add_argument("--output", required=True, help="network JSON")
    sp.add_argument("--report", default=None,
                    help="CSV node,degree,centrality,cluster_coeff")
    sp.add_argument("--events", default=None, help="CSV of logged growth events")

    sp = add("analyze", cmd_analyze, "degree, centrality and clustering report")
    sp.add_argument("--input", required=True, help="network JSON or CSV")
    sp.add_argument("--beta", type=float, default=0.5, help="centrality beta")
    sp.add_argument("--beta1", type=float, default=1.0, help="edge relay chance (hypergraphs)")
    sp.add_argument("--output", required=True, help="CSV node,degree,centrality,cluster_coeff")
    sp.add_argument("--histogram", default=None, help="CSV degree,count")
    sp.add_argument("--sweep", default=None, help="CSV of centrality for beta = 0, 0.1, .., 1")

    sp = add("centrality", cmd_centrality, "node (and edge) centrality scores")
    sp.add_argument("--input", required=True, help="network JSON or CSV")
    hyper_params(sp)
    sp.add_argument("--method", choices=["solve", "series"], default="solve",
                    help="direct solve or Neumann series")
    sp.add_argument("--measure", choices=["general", "eigenvector", "degree"],
                    default="general", help="which centrality")
    sp.add_argument("--rescale", action="store_true", help="scale so the mean square is 1")
    sp.add_argument("--output", required=True, help="CSV id,kind,score")

    sp = add("spectrum", cmd_spectrum, "eigenvalues and pole locations")
    sp.add_argument("--input", required=True, help="network JSON or CSV")
    sp.add_argument("--output", required=True, help="CSV k,real,imag,pole_beta")

    sp = add("simulate", cmd_simulate, "Monte-Carlo communication counts")
    sp.add_argument("--input", required=True, help="network JSON or CSV")
    hyper_params(sp)
    sp.add_argument("--walks", type=int, default=10_000, help="walks per start node")
    sp.add_argument("--seed", type=int, default=0, help="random seed")
    sp.add_argument("--max-hops", type=int, default=64, help="hop cap per walk")
    sp.add_argument("--sampler", choices=["perron", "direct"], default="perron",
                    help="walk proposal")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker threads (results do not depend on it)")
    sp.add_argument("--output", required=True, help="CSV id,estimate,stderr,mean_chain_length")

    sp = add("learn", cmd_learn, "random-challenge learning demo")
    sp.add_argument("--input", required=True, help="hypergraph JSON or CSV")
    sp.add_argument("--steps", type=int, default=100, help="learning steps")
    sp.add_argument("--rate", type=float, default=0.1, help="delta-rule rate r")
    sp.add_argument("--punish", type=float, default=0.0, help="punishment p")
    sp.add_argument("--seed", type=int, default=0, help="random seed")
    sp.add_argument("--select-prob", type=float, default=0.5,
                    help="chance a challenge is selected")
    sp.add_argument("--dim", type=int, default=adapt.CHALLENGE_DIM, help="challenge dimension")
    sp.add_argument("--kappa", type=float, default=0.5, help="contraction of the processor")
    sp.add_argument("--output", required=True, help="per-step weight-change CSV")
    sp.add_argument("--final", default=None, help="final hypergraph JSON")

    sp = add("project", cmd_project, "node-node projection W W^T")
    sp.add_argument("--input", required=True, help="hypergraph JSON or CSV")
    sp.add_argument("--output", required=True, help="graph JSON, or CSV source,target,w")

    sp = add("convert", cmd_convert, "convert between JSON and node,edge,weight CSV")
    sp.add_argument("--input", required=True, help="JSON or CSV")
    sp.add_argument("--output", required=True, help="JSON or CSV (by extension)")

    sp = add("replay", None, "rerun a manifest and check the outputs match")
    sp.add_argument("manifest", help="path of a .manifest.json file")
    return p


# ---------------------------------------------------------------------------
# manifests


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def manifest_path(output) -> str:
    return f"{output}.manifest.json"


def _argv_from(parser, args):
    """Explicit argv reproducing ``args``, every flag spelled out."""
    sub = args.subcommand
    sp = parser._subparsers._group_actions[0].choices[sub]
    out = [sub]
    for act in sp._actions:
        if not act.option_strings or act.dest in ("help",):
            continue
        val = getattr(args, act.dest, None)
        flag = act.option_strings[-1]
        if isinstance(act, argparse._StoreTrueAction):
            if val:
                out.append(flag)
        elif val is not None:
            out += [flag, str(val)]
    return out


def _manifest(parser, args):
    flags = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "subcommand")
    }
    inputs = {flags[k]: _digest(flags[k]) for k in INPUT_FLAGS if flags.get(k)}
    outputs = {flags[k]: _digest(flags[k]) for k in OUTPUT_FLAGS if flags.get(k)}
    return {
        "tool": "hypercen",
        "version": __version__,
        "subcommand": args.subcommand,
        "argv": _argv_from(parser, args),
        "flags": flags,
        "seeds": {"seed": flags["seed"]} if "seed" in flags else {},
        "inputs": inputs,
        "outputs": outputs,
    }


def _write_manifest(man, output):
    text = json.dumps(man, indent=1, sort_keys=True) + "\n"
    Path(manifest_path(output)).write_text(text, encoding="utf-8")


class ReplayMismatch(HypercenError):
    code = "REPLAY_MISMATCH"

    def __init__(self, path, kind):
        self.path = path
        self.kind = kind
        super().__init__(f"{kind} digest differs for {path}")

    def fields(self):
        return {"path": self.path, "kind": self.kind}


def _replay(parser, path):
    man = json.loads(Path(path).read_text(encoding="utf-8"))
    for f, dig in man["inputs"].items():
        if _digest(f) != dig:
            raise ReplayMismatch(f, "input")
    if man.get("version") != __version__:
        log.warning("manifest written by version %s, running %s", man.get("version"),
                    __version__)
    args = parser.parse_args(man["argv"])
    _execute(parser, args)
    for f, dig in man["outputs"].items():
        if _digest(f) != dig:
            raise ReplayMismatch(f, "output")
    print(f"replay ok: {len(man['outputs'])} output(s) identical")


def _execute(parser, args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        args.func(args)
    for w in caught:
        log.warning("%s", w.message)
    _write_manifest(_manifest(parser, args), args.output)


# ---------------------------------------------------------------------------
# entry point


def _configure_logging():
    level_name = os.environ.get("HYPERCEN_LOG", "quiet").lower()
    if level_name not in LOG_LEVELS:
        raise UsageError(f"HYPERCEN_LOG must be one of {sorted(LOG_LEVELS)}, got {level_name!r}")
    if not log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        log.addHandler(handler)
    log.setLevel(LOG_LEVELS[level_name])


def _error_line(exc: HypercenError) -> str:
    parts = [f"error_code={exc.code}"]
    parts += [f"{k}={v}" for k, v in exc.fields().items()]
    return " ".join(parts)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _configure_logging()
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        if args.subcommand == "replay":
            _replay(parser, args.manifest)
        else:
            _execute(parser, args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except HypercenError as exc:
        print(_error_line(exc), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error_code=INVALID", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error_code=IO path={exc.filename}", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
