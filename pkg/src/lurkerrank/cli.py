"""Command-line entry point: ``lurkerrank {rank,compare,analyze,trust,dd} ...``.

Exit codes: 0 success, 2 usage or invalid input, 3 non-convergence (results still written),
4 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import _core
from . import io as lio
from .evalmetrics import comparison_report
from .graph import (EdgeListError, damping_from_apl, estimate_avg_path_length, load_edge_list,
                    write_edge_list, write_id_map)
from .lurkcoef import lurking_coefficient
from .netanalysis import (RandomizationParams, attachment_distributions, delurk_randomize,
                          percolation_match, reciprocity_report, resilience_curve)
from .rank import (DD_FLAVORS, LR_VARIANTS, METHODS, RankParams, canonical_variant,
                   data_driven_rank, rank_method, ranking, trust_biased_lurker_rank,
                   trust_oracle_entropy, trustrank)

EXIT_OK, EXIT_USAGE, EXIT_NOCONV, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        lio.write_text(path, text)


def _load(args):
    return load_edge_list(args.graph, delimiter=args.delimiter, has_weights=args.weighted,
                          reverse=args.reverse)


def _params(args, g=None):
    d = args.damping
    if getattr(args, "damping_from_apl", False):
        d = damping_from_apl(g)
    return RankParams(damping=d, max_iters=args.max_iters, tol=args.tol)


def _graph_opts(p):
    p.add_argument("graph", help="edge list: src dst [weight] per line")
    p.add_argument("--weighted", action="store_true", help="third column holds edge weights")
    p.add_argument("--delimiter", default=None, help="field separator (default: any whitespace)")
    p.add_argument("--reverse", action="store_true",
                   help="flip edges (for files stored follower -> followee)")


def _iter_opts(p):
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iters", type=int, default=200)


def _ranking_source(p):
    p.add_argument("--ranking", help="ranking TSV (label score rank); overrides --method")
    p.add_argument("--method", default="LRin", help="method used when no --ranking is given")
    _iter_opts(p)


def _node_order(args, g):
    """Ranking list (node ids, best first) from a file or by running a method."""
    if args.ranking:
        labels, _ = lio.read_ranking(args.ranking)
        idx = {lab: i for i, lab in enumerate(g.label_list())}
        order = [idx[lab] for lab in labels if lab in idx]
        seen = set(order)
        missing = [i for i in range(g.num_nodes) if i not in seen]
        if missing:
            warnings.warn(f"{len(missing)} graph nodes absent from ranking appended last")
        return np.asarray(order + missing, dtype=np.int64), None
    rv = rank_method(g, args.method, _params(args, g))
    return rv.ranking(), rv


# ---------------------------------------------------------------- rank


def cmd_rank(args):
    g = _load(args)
    params = _params(args, g)
    rv = rank_method(g, args.method, params)
    labels = g.label_list()
    keep = np.ones(g.num_nodes, dtype=bool)
    if args.drop_sinks:
        keep &= g.raw_out > 0
    if args.drop_sources:
        keep &= g.raw_in > 0
    extra = {"graph": str(args.graph), "nodes": g.num_nodes, "edges": g.num_edges,
             "self_loops_dropped": g.self_loops_dropped,
             "duplicates_dropped": g.duplicates_dropped,
             "drop_sinks": args.drop_sinks, "drop_sources": args.drop_sources,
             "backend": _core.BACKEND}
    if args.damping_from_apl:
        extra["apl"] = estimate_avg_path_length(g=g)
    order = ranking(rv.scores)
    order = order[keep[order]]
    lines = "".join(f"{labels[i]}\t{float(rv.scores[i])!r}\t{r}\n" for r, i in enumerate(order, 1))
    if args.output in (None, "-"):
        sys.stdout.write(lines)
    else:
        lio.write_text(args.output, lines)
        lio.write_json(args.output + ".json", lio.sidecar_dict(rv, **extra))
    if args.id_map:
        write_id_map(g, args.id_map)
    if not rv.converged:
        print(f"warning: {rv.method} did not converge in {rv.iterations} iterations", file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


# ---------------------------------------------------------------- compare


def cmd_compare(args):
    if len(args.rankings) < 2:
        raise UsageError("compare needs at least two ranking files")
    lists = {}
    for path in args.rankings:
        labels, _ = lio.read_ranking(path)
        name, k = path, 2
        while name in lists:
            name, k = f"{path}#{k}", k + 1
        lists[name] = labels
    common = set.intersection(*(set(v) for v in lists.values()))
    if not common:
        raise UsageError("rankings share no nodes")
    if any(len(v) != len(common) for v in lists.values()):
        warnings.warn(f"rankings cover different node sets; using the {len(common)} common nodes")
    universe = [lab for lab in next(iter(lists.values())) if lab in common]
    ids = {lab: i for i, lab in enumerate(universe)}
    rankings = {k: np.asarray([ids[lab] for lab in v if lab in common], dtype=np.int64)
                for k, v in lists.items()}
    dd = None
    if args.dd:
        dd_scores = lio.read_scores_by_label(args.dd)
        dd = np.asarray([dd_scores.get(lab, 0.0) for lab in universe])
    sink_mask = None
    if args.graph:
        g = load_edge_list(args.graph, delimiter=args.delimiter, has_weights=args.weighted,
                           reverse=args.reverse)
        gid = {lab: i for i, lab in enumerate(g.label_list())}
        sink_mask = np.asarray([lab in gid and g.raw_out[gid[lab]] == 0 for lab in universe])
    rows = comparison_report(rankings, ks=args.k, ls=args.l, dd=dd, sink_mask=sink_mask,
                             fagin_drop_sinks=not args.keep_sinks)
    if args.json:
        text = json.dumps(rows, indent=2) + "\n"
    else:
        text = lio.table_tsv(rows)
    _emit(text, args.output)
    return EXIT_OK


# ---------------------------------------------------------------- analyze


def cmd_analyze(args):
    g = _load(args)
    labels = g.label_list()
    kind = args.analysis
    if kind == "lc":
        rep = lurking_coefficient(g, gate=not args.no_gate)
        body = "".join(f"{labels[i]}\t{float(v)!r}\n" for i, v in enumerate(rep.lc))
        summary = "\n".join(rep.summary_lines()) + "\n"
        if args.output in (None, "-"):
            sys.stdout.write(summary)
        else:
            lio.write_text(args.output, body + summary)
            sys.stdout.write(summary)
        return EXIT_OK
    order, _ = _node_order(args, g)
    src = args.ranking or args.method
    if kind == "reciprocity":
        rows = reciprocity_report(g, order, fractions=args.fractions)
        _emit(lio.table_tsv(rows, header_comment=f"reciprocity ranking={src}"), args.output)
    elif kind == "attachment":
        per_active, per_lurker = attachment_distributions(g, order, fraction=args.fraction)
        rows = [{"histogram": "lurkers_per_active", "count": k, "nodes": v} for k, v in per_active.items()]
        rows += [{"histogram": "actives_per_lurker", "count": k, "nodes": v} for k, v in per_lurker.items()]
        _emit(lio.table_tsv(rows, ["histogram", "count", "nodes"],
                            header_comment=f"attachment fraction={args.fraction} ranking={src}"),
              args.output)
    elif kind == "delurk":
        if not args.output or args.output == "-":
            raise UsageError("delurk needs -o/--output for the new edge list")
        rp = RandomizationParams(t1=args.t1, t2=args.t2, p=args.p, d=args.d, seed=args.seed)
        res = delurk_randomize(g, order, rp)
        write_edge_list(res.graph, args.output)
        lio.write_json(args.output + ".json", {
            "analysis": "delurk", "graph": str(args.graph), "ranking": src,
            "t1": args.t1, "t2": args.t2, "p": args.p, "d": args.d, "seed": args.seed,
            "candidate_edges": res.candidate_count, "target": res.target,
            "added_edges": len(res.added), "exhausted": res.exhausted,
        })
    elif kind == "percolate":
        rows = percolation_match(g, order, lurker_fraction=args.lurker_fraction, percents=args.percents)
        _emit(lio.table_tsv(rows, header_comment=f"percolation lurker_fraction={args.lurker_fraction} ranking={src}"),
              args.output)
    elif kind == "resilience":
        fr = np.linspace(0.0, 1.0, args.steps + 1)
        curve = resilience_curve(g, order, strategy=args.strategy, fractions=fr)
        rows = [{"removed_fraction": float(f), "max_scc_fraction": float(c)} for f, c in zip(fr, curve)]
        _emit(lio.table_tsv(rows, header_comment=f"resilience strategy={args.strategy} ranking={src}"),
              args.output)
    return EXIT_OK


# ---------------------------------------------------------------- trust


def cmd_trust(args):
    g = _load(args)
    labels = g.label_list()
    idx = {lab: i for i, lab in enumerate(labels)}
    trust = lio.read_trust(args.trust, idx)
    g_trust = g.reverse()
    params = _params(args, g)
    oracle = trust_oracle_entropy(trust, g_trust)
    if args.action == "oracle":
        rows = [{"label": labels[i], "H": float(oracle.entropy[i]), "eligible": int(oracle.eligible[i]),
                 "seed": int(i in set(oracle.seeds.tolist()))} for i in range(g.num_nodes)]
        _emit(lio.table_tsv(rows, header_comment=f"entropy oracle threshold={oracle.threshold!r}"),
              args.output)
        return EXIT_OK
    if len(oracle.seeds) == 0:
        raise UsageError("trust oracle selected no seeds")
    tr = trustrank(g_trust, oracle.seeds, params)
    rv = tr
    if args.action == "biased-rank":
        rv = trust_biased_lurker_rank(g, tr.scores, args.variant, params)
    extra = {"graph": str(args.graph), "trust": str(args.trust), "seeds": int(len(oracle.seeds))}
    if args.output in (None, "-"):
        sys.stdout.write(lio.ranking_tsv(rv, labels))
    else:
        lio.write_ranking(args.output, rv, labels, **extra)
    return EXIT_OK if (rv.converged and tr.converged) else EXIT_NOCONV


# ---------------------------------------------------------------- dd


def cmd_dd(args):
    g = _load(args)
    labels = g.label_list()
    idx = {lab: i for i, lab in enumerate(labels)}
    act = lio.read_activity(args.activity, idx, pairs_path=args.pairs)
    rv = data_driven_rank(g, act, args.flavor)
    if args.output in (None, "-"):
        sys.stdout.write(lio.ranking_tsv(rv, labels))
    else:
        lio.write_ranking(args.output, rv, labels, graph=str(args.graph))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser():
    p = argparse.ArgumentParser(prog="lurkerrank", description="Lurker ranking and network analysis")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for compiled kernels (default: $LURKERRANK_THREADS or all cores)")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("rank", help="score nodes with one method")
    _graph_opts(r)
    r.add_argument("--method", default="LRin", help=", ".join(METHODS))
    _iter_opts(r)
    r.add_argument("--damping-from-apl", action="store_true",
                   help="use d = 1 - 1/apl with apl = log|V| / log(2|E|/|V|)")
    r.add_argument("--drop-sinks", action="store_true", help="omit sinks from the written ranking")
    r.add_argument("--drop-sources", action="store_true", help="omit sources from the written ranking")
    r.add_argument("-o", "--output")
    r.add_argument("--id-map", help="also write label<TAB>dense_id")
    r.set_defaults(func=cmd_rank)

    c = sub.add_parser("compare", help="Kendall tau, Fagin intersection and Bpref between rankings")
    c.add_argument("rankings", nargs="+")
    c.add_argument("--k", type=int, nargs="+", default=[100, 1000, 10000])
    c.add_argument("--l", type=float, nargs="+", default=[10, 25, 50])
    c.add_argument("--dd", help="data-driven ranking file defining relevance sets")
    c.add_argument("--graph", help="edge list used to drop sinks from Fagin lists")
    c.add_argument("--weighted", action="store_true")
    c.add_argument("--delimiter", default=None)
    c.add_argument("--reverse", action="store_true")
    c.add_argument("--keep-sinks", action="store_true", help="do not drop sinks for Fagin")
    c.add_argument("--json", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)

    a = sub.add_parser("analyze", help="structural analyses")
    asub = a.add_subparsers(dest="analysis", required=True)
    lc = asub.add_parser("lc", help="lurking coefficients")
    _graph_opts(lc)
    lc.add_argument("--no-gate", action="store_true",
                    help="count indicators for nodes with in/out ratio below 1 too")
    lc.add_argument("-o", "--output")
    rc = asub.add_parser("reciprocity")
    _graph_opts(rc)
    _ranking_source(rc)
    rc.add_argument("--fractions", type=float, nargs="+", default=[25, 10, 5])
    rc.add_argument("-o", "--output")
    at = asub.add_parser("attachment")
    _graph_opts(at)
    _ranking_source(at)
    at.add_argument("--fraction", type=float, default=25)
    at.add_argument("-o", "--output")
    dl = asub.add_parser("delurk", help="delurking-oriented randomization")
    _graph_opts(dl)
    _ranking_source(dl)
    dl.add_argument("--p", type=float, default=0.5)
    dl.add_argument("--t1", type=float, default=25)
    dl.add_argument("--t2", type=float, default=25)
    dl.add_argument("--d", type=float, default=1.0)
    dl.add_argument("--seed", type=int, default=0)
    dl.add_argument("-o", "--output")
    pc = asub.add_parser("percolate")
    _graph_opts(pc)
    _ranking_source(pc)
    pc.add_argument("--lurker-fraction", type=float, default=25)
    pc.add_argument("--percents", type=float, nargs="+", default=[1, 5, 10],
                    help="share of lowest-overlap edges removed")
    pc.add_argument("-o", "--output")
    rs = asub.add_parser("resilience")
    _graph_opts(rs)
    _ranking_source(rs)
    rs.add_argument("--strategy", default="lr-desc", choices=["lr-desc", "lr-desc-no-sinks", "overlap-asc"])
    rs.add_argument("--steps", type=int, default=20)
    rs.add_argument("-o", "--output")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("trust", help="trust oracle, TrustRank, trust-biased LurkerRank")
    t.add_argument("action", choices=["oracle", "trustrank", "biased-rank"])
    _graph_opts(t)
    t.add_argument("--trust", required=True, help="truster trustee count per line")
    t.add_argument("--variant", default="LRin", help=", ".join(LR_VARIANTS))
    _iter_opts(t)
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_trust)

    d = sub.add_parser("dd", help="data-driven ranking from activity counters")
    _graph_opts(d)
    d.add_argument("--activity", required=True, help="header row 'label counter...', then one row per node")
    d.add_argument("--pairs", help="commenter author count per line (friendfeed)")
    d.add_argument("--flavor", required=True, choices=list(DD_FLAVORS))
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_dd)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        code = _run(args)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return code


def _run(args):
    try:
        _core.set_threads(args.threads)
        if getattr(args, "method", None):
            canonical_variant(args.method)
        if hasattr(args, "variant"):
            canonical_variant(args.variant)
        return args.func(args)
    except (EdgeListError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
