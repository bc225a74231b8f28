"""Command-line entry point: ``rwepidemic {gen,typical,run,sweep,validate}``."""

import argparse
import csv
import json
import logging
import sys

from . import acceptance, harness
from .rrg import check_typical, generate_regular, load_graph, save_graph

SWEEP_HEADER = ["phi", "xi", "mean_Mk", "frac_large", "C_pred"]


def _xi(text):
    return None if text.lower() in ("inf", "infinity") else int(text)


def _config(args, kind):
    d = {}
    if args.config:
        with open(args.config) as fh:
            d.update(json.load(fh))
    flags = {"n": args.n, "r": args.r, "k": args.k, "rho": args.rho, "xi": args.xi,
             "phi": args.phi, "trials": args.trials, "base_seed": args.seed,
             "alpha": args.alpha, "max_steps": args.max_steps, "workers": args.workers}
    d.update({key: v for key, v in flags.items() if v is not None})
    if args.phi is not None:
        d["xi"] = None
    elif args.xi is not None:
        d["phi"] = None
    d.setdefault("kind", kind)
    if getattr(args, "kind", None):
        d["kind"] = args.kind
    return harness.ExperimentConfig.from_dict(d)


def _model_flags(p):
    p.add_argument("--config", help="JSON file of ExperimentConfig fields; flags override")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--rho", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--xi", type=_xi, help="infectious period (integer or 'inf')")
    g.add_argument("--phi", type=float, help="target threshold parameter; xi is inverted from it")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="base seed; trial i uses seed+i")
    p.add_argument("--alpha", type=float, help="general-position constant")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--workers", type=int)


def cmd_gen(args):
    g = generate_regular(args.n, args.r, args.seed)
    save_graph(g, args.out)


def cmd_typical(args):
    g = load_graph(args.graph)
    rep = check_typical(g, eps1=args.eps1, eps=args.eps, sample_size=args.sample_size,
                        seed=args.seed)
    json.dump(rep.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_run(args):
    cfg = _config(args, "completion")
    summaries, rep = harness.run_experiment(cfg)
    harness.write_jsonl(summaries, args.out)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(rep, fh, indent=2)
    else:
        json.dump(rep, sys.stdout, indent=2)
        sys.stdout.write("\n")


def cmd_sweep(args):
    cfg = _config(args, "regimes")
    rows = harness.sweep(cfg, args.phi_list)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(SWEEP_HEADER)
        for row in rows:
            w.writerow([row.phi, row.xi, row.mean_Mk,
                        "" if row.frac_large is None else row.frac_large,
                        "" if row.C_pred is None else row.C_pred])
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_validate(args):
    names = acceptance.SUITE_ORDER if args.suite == "all" else (args.suite,)
    results = []
    for name in names:
        for crit in acceptance.run_suite(name, workers=args.workers):
            print(crit.line(), flush=True)
            results.append(crit)
    if args.out:
        with open(args.out, "w") as fh:
            for crit in results:
                for label, s in crit.records:
                    rec = {"criterion": crit.cid, "experiment": label}
                    rec.update(json.loads(s.to_json()))
                    fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    failed = [c.cid for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""))
    return 1 if failed else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="rwepidemic", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random regular graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("typical", help="typicality report for a graph file (JSON)")
    p.add_argument("--graph", required=True)
    p.add_argument("--eps1", type=float, default=0.25)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_typical)

    p = sub.add_parser("run", help="run trials; one TrialSummary per JSONL line")
    _model_flags(p)
    p.add_argument("--kind", choices=harness.KINDS)
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="write the aggregate report here instead of stdout")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="regime sweep over phi values (CSV)")
    _model_flags(p)
    p.add_argument("--phi-list", type=float, nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run acceptance suites; exit 0 when all pass")
    p.add_argument("--suite", choices=acceptance.SUITE_ORDER + ("all",), default="all")
    p.add_argument("--out", help="JSONL of every trial behind the criteria")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
