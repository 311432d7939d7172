"""Command-line surface: train, predict, experiment, bound, net-dump,
validate-space.

Exit codes: 0 success, 1 computation-domain error, 2 I/O or format error.
Every flag can also be supplied through a flat key=value config file
(``--config``); command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import engine
from .bounds import (
    BoundParams,
    compression_deviation_bound,
    empirical_bernstein_bound,
    q_bound,
)
from .errors import MedoidNetError, PreconditionError
from .harness import LEARNER_IDS, convergence_experiment, make_distribution
from .learners import (
    MedoidModel,
    countable_med_net,
    ctbl_unbdd,
    fin_med_net,
    medoid_net,
)
from .netting import build_gamma_net
from .spaces import (
    LabeledSample,
    RealVector,
    discrete_space,
    finite_space_from_csv,
    get_space,
    register_space,
    validate_metric_axioms,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _fmt12(v: float) -> str:
    return np.format_float_positional(v, precision=12, unique=False,
                                      fractional=False)


def _resolve_space(spec: str):
    if spec.endswith(".csv"):
        if not os.path.exists(spec):
            raise CliError(f"space file not found: {spec}", EXIT_IO)
        return register_space(finite_space_from_csv(spec))
    try:
        return get_space(spec)
    except MedoidNetError as e:
        raise CliError(str(e), EXIT_DOMAIN)


def read_dataset(path: str, instance_space=None, label_space=None,
                 need_labels: bool = True):
    """Read a dataset CSV: x_-prefixed numeric columns or a single x_id
    column, plus a y column. Returns (sample_or_instances, xsp, ysp)."""
    if not os.path.exists(path):
        raise CliError(f"dataset file not found: {path}", EXIT_IO)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CliError(f"{path}: empty file (line 1: missing header)", EXIT_IO)
    header = [h.strip() for h in rows[0]]
    xcols = [i for i, h in enumerate(header) if h.startswith("x_") and h != "x_id"]
    idcol = header.index("x_id") if "x_id" in header else None
    ycol = header.index("y") if "y" in header else None
    if idcol is None and not xcols:
        raise CliError(f"{path}: line 1: no x_ columns or x_id column", EXIT_IO)
    if need_labels and ycol is None:
        raise CliError(f"{path}: line 1: no y column", EXIT_IO)

    instances, labels = [], []
    for ln, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CliError(f"{path}: line {ln}: {len(row)} cells, expected "
                           f"{len(header)}", EXIT_IO)
        try:
            if idcol is not None:
                instances.append(row[idcol].strip())
            elif len(xcols) == 1:
                instances.append(float(row[xcols[0]]))
            else:
                instances.append(tuple(float(row[i]) for i in xcols))
        except ValueError as e:
            raise CliError(f"{path}: line {ln}: bad instance value ({e})", EXIT_IO)
        if ycol is not None:
            labels.append(row[ycol].strip())

    if instance_space is None and instances:
        if idcol is not None:
            names = sorted(set(instances))
            instance_space = discrete_space(names)
        elif len(xcols) == 1:
            instance_space = get_space("real")
        else:
            instance_space = RealVector(len(xcols), 2)
    ysp = label_space
    parsed_labels = None
    if need_labels and ycol is not None and labels:
        numeric = True
        vals = []
        for s in labels:
            try:
                vals.append(float(s))
            except ValueError:
                numeric = False
                break
        if ysp is None:
            if numeric:
                ysp = get_space("real")
            else:
                raise CliError("labels are categorical; pass --label-space",
                               EXIT_DOMAIN)
        parsed_labels = vals if (numeric and ysp.value_kind == "scalar") else labels
    if need_labels:
        if not instances:
            raise CliError(f"{path}: dataset has no rows (n = 0)", EXIT_DOMAIN)
        sample = LabeledSample(tuple(zip(instances, parsed_labels)))
        return sample, instance_space, ysp
    return instances, instance_space, ysp


def _load_config(path):
    if not os.path.exists(path):
        raise CliError(f"config file not found: {path}", EXIT_IO)
    out = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}: line {ln}: expected key=value", EXIT_IO)
            k, _, v = line.partition("=")
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _build_parser():
    p = argparse.ArgumentParser(prog="medoidnet")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int,
                        default=int(os.environ.get("MEDOIDNET_THREADS", "0")) or None)
        sp.add_argument("--out")

    t = sub.add_parser("train", help="train a model from a CSV dataset")
    common(t)
    t.add_argument("--dataset")
    t.add_argument("--learner", choices=["fin", "countable", "unbounded", "separable"])
    t.add_argument("--instance-space")
    t.add_argument("--label-space")
    t.add_argument("--delta", type=float)
    t.add_argument("--bits", type=int)
    t.add_argument("--ltrunc", type=float)
    t.add_argument("--eps", type=float)

    pr = sub.add_parser("predict", help="predict labels for a CSV of instances")
    common(pr)
    pr.add_argument("--model")
    pr.add_argument("--dataset")

    e = sub.add_parser("experiment", help="run a convergence experiment")
    common(e)
    e.add_argument("--distribution")
    e.add_argument("--learner", choices=list(LEARNER_IDS))
    e.add_argument("--n-grid")
    e.add_argument("--trials", type=int)
    e.add_argument("--mc-draws", type=int, default=100_000)
    e.add_argument("--timing", choices=["measure", "zero"], default="measure")
    e.add_argument("--jsonl", action="store_true",
                   help="also write a .jsonl next to the CSV")
    e.add_argument("--delta", type=float)
    e.add_argument("--bits", type=int)
    e.add_argument("--ltrunc", type=float)
    e.add_argument("--eps", type=float)

    b = sub.add_parser("bound", help="evaluate a generalization bound")
    common(b)
    b.add_argument("--bound-mode", default="q",
                   choices=["q", "hoeffding", "bernstein", "sample-dependent",
                            "final", "empirical-bernstein"])
    b.add_argument("--n", type=int)
    b.add_argument("--alpha", type=float, default=0.0)
    b.add_argument("--k", type=int, default=0)
    b.add_argument("--bits", type=int, default=0)
    b.add_argument("--delta", type=float)
    b.add_argument("--loss-range", type=float, default=0.0)

    nd = sub.add_parser("net-dump", help="dump gamma-nets as CSV (debug)")
    common(nd)
    nd.add_argument("--dataset")
    nd.add_argument("--instance-space")
    nd.add_argument("--gamma", help="comma-separated scales; 'inf' allowed")

    vs = sub.add_parser("validate-space", help="check metric axioms of a space")
    common(vs)
    vs.add_argument("--space")
    return p


def _apply_config(args):
    """Fill unset args from the config file; explicit flags win."""
    if getattr(args, "config", None):
        cfg = _load_config(args.config)
        for k, v in cfg.items():
            if getattr(args, k, None) in (None, False):
                setattr(args, k, _coerce(args, k, v))
    return args


def _coerce(args, key, value):
    cur = getattr(args, key, None)
    if isinstance(cur, bool) or value.lower() in ("true", "false"):
        return value.lower() == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def _require(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            raise CliError(f"--{name} is required for {args.command}", EXIT_DOMAIN)


def cmd_train(args) -> int:
    _require(args, "dataset", "learner", "out")
    xsp = _resolve_space(args.instance_space) if args.instance_space else None
    ysp = _resolve_space(args.label_space) if args.label_space else None
    sample, xsp, ysp = read_dataset(args.dataset, xsp, ysp)
    from .harness import schedules_with_overrides
    overrides = {k: getattr(args, k) for k in ("delta", "bits", "ltrunc", "eps")
                 if getattr(args, k, None) is not None}
    sched = schedules_with_overrides(overrides)
    n = sample.n
    delta = sched.delta_n(n)
    bits = sched.b_n(n)
    try:
        if args.learner == "fin":
            model = fin_med_net(sample, delta, ysp, xsp)
        elif args.learner == "countable":
            model = countable_med_net(sample, delta, bits, ysp, xsp)
        elif args.learner == "unbounded":
            model = ctbl_unbdd(sample, delta, bits, sched.L_n(n), ysp, xsp)
        else:
            model = medoid_net(sample, sched, ysp, xsp)
    except MedoidNetError as e:
        raise CliError(str(e), EXIT_DOMAIN)
    model.save(args.out, xsp, ysp)
    print(json.dumps({
        "alpha_star": model.alpha_star,
        "q_star": model.q_star,
        "gamma_star": "inf" if math.isinf(model.selected_gamma)
                      else model.selected_gamma,
        "d": model.d,
    }, sort_keys=True))
    return EXIT_OK


def cmd_predict(args) -> int:
    _require(args, "model", "dataset", "out")
    if not os.path.exists(args.model):
        raise CliError(f"model file not found: {args.model}", EXIT_IO)
    try:
        model = MedoidModel.load(args.model)
    except (json.JSONDecodeError, KeyError) as e:
        raise CliError(f"{args.model}: malformed model file ({e})", EXIT_IO)
    instances, xsp, _ = read_dataset(args.dataset, need_labels=False)
    model_xsp = get_space(model.instance_space_id)
    if instances and (xsp.value_kind != model_xsp.value_kind
                      or not all(model_xsp.contains(x) for x in instances)):
        raise CliError(
            f"dataset instances do not belong to model instance space "
            f"{model.instance_space_id!r}", EXIT_DOMAIN)
    preds = model.predict_many(instances, model_xsp)
    ysp = get_space(model.label_space_id)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y"])
        for y in preds:
            w.writerow([y if ysp.value_kind == "name" else repr(float(y))
                        if ysp.value_kind == "scalar" else json.dumps(list(y))])
    return EXIT_OK


def cmd_experiment(args) -> int:
    _require(args, "distribution", "learner", "n-grid", "trials", "seed", "out")
    try:
        dist = make_distribution(args.distribution)
    except MedoidNetError as e:
        raise CliError(f"{e}; valid ids: singleton4, lipschitz_identity, "
                       "laplace_regression, finite_multiclass, cauchy_identity",
                       EXIT_DOMAIN)
    try:
        n_grid = [int(s) for s in str(args.n_grid).split(",") if s]
    except ValueError:
        raise CliError("--n-grid must be comma-separated integers", EXIT_DOMAIN)
    overrides = {k: getattr(args, k) for k in ("delta", "bits", "ltrunc", "eps")
                 if getattr(args, k, None) is not None}
    try:
        result = convergence_experiment(
            args.learner, dist, n_grid, args.trials, args.seed,
            mc_draws=args.mc_draws, threads=args.threads or 1,
            overrides=overrides)
    except MedoidNetError as e:
        raise CliError(f"{e}; valid learners: {', '.join(LEARNER_IDS)}", EXIT_DOMAIN)
    timing = args.timing == "measure"
    result.to_csv(args.out, timing=timing)
    if args.jsonl:
        result.to_jsonl(os.path.splitext(args.out)[0] + ".jsonl", timing=timing)
    for n, med in result.median_risk_by_n(args.learner).items():
        print(f"n={n} median_risk={med:.6g}")
    return EXIT_OK


def cmd_bound(args) -> int:
    _require(args, "n", "delta")
    try:
        if args.bound_mode == "empirical-bernstein":
            v = empirical_bernstein_bound(args.alpha, args.n, args.delta,
                                          args.loss_range)
        else:
            p = BoundParams(args.n, args.alpha, args.k, args.bits, args.delta,
                            args.loss_range)
            if args.bound_mode == "q":
                v = q_bound(p)
            else:
                v = compression_deviation_bound(
                    p, args.bound_mode.replace("-", "_"))
    except MedoidNetError as e:
        raise CliError(str(e), EXIT_DOMAIN)
    print(_fmt12(v))
    return EXIT_OK


def cmd_net_dump(args) -> int:
    _require(args, "dataset", "gamma", "out")
    xsp = _resolve_space(args.instance_space) if args.instance_space else None
    instances, xsp, _ = read_dataset(args.dataset, xsp, need_labels=False)
    if not instances:
        raise CliError("dataset has no rows", EXIT_DOMAIN)
    gammas = []
    for tok in str(args.gamma).split(","):
        tok = tok.strip()
        if not tok:
            continue
        gammas.append(math.inf if tok == "inf" else float(tok))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gamma", "center_rank", "center_index"])
        for g in gammas:
            net = build_gamma_net(instances, g, xsp)
            for rank, idx in enumerate(net.center_indices):
                w.writerow(["inf" if math.isinf(g) else repr(g), rank, idx])
    return EXIT_OK


def cmd_validate_space(args) -> int:
    _require(args, "space")
    space = _resolve_space(args.space)
    if space.value_kind == "name":
        probes = list(space.enumeration())
    elif space.value_kind == "vector":
        grid = [-1.0, 0.0, 0.5, 1.0]
        probes = [tuple([g] + [0.0] * (space.dim - 1)) for g in grid]
    else:
        probes = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]
    report = validate_metric_axioms(space, probes)
    if report:
        for line in report:
            print(line)
        return EXIT_DOMAIN
    print(f"{space.space_id}: no violations over {len(probes)} probes")
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "experiment": cmd_experiment,
    "bound": cmd_bound,
    "net-dump": cmd_net_dump,
    "validate-space": cmd_validate_space,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(args)
        return _COMMANDS[args.command](args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
