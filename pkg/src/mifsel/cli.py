"""Command-line surface: generate, tune, select, eval.

Every command is deterministic given its inputs, flags, and seed. JSON
outputs embed the run configuration, so a result can be reproduced from
its own metadata. The thread count is an execution detail (results are
independent of it) and is deliberately not part of that record.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
The output directory is the --out-dir flag, else $MIFSEL_OUT_DIR, else
the working directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .data import DataError, friedman_generate, load_csv, split, write_csv
from .evaluate import knn_rmse
from .forward import forward_select
from .tuner import select_k

OUT_DIR_ENV = "MIFSEL_OUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this surface reserves 2
    # for data errors, so route parse failures through the usage path.
    def error(self, message):
        raise _UsageError(message)


def _out_dir(args) -> Path:
    if args.out_dir:
        path = Path(args.out_dir)
    else:
        path = Path(os.environ.get(OUT_DIR_ENV, "."))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _config_payload(args, *, input_desc, target=None) -> dict:
    return {
        "seed": args.seed,
        "folds": getattr(args, "folds", None),
        "permutations": getattr(args, "permutations", None),
        "alpha": getattr(args, "alpha", None),
        "k_min": getattr(args, "k_min", None),
        "k_max": getattr(args, "k_max", None),
        "max_features": getattr(args, "max_features", None),
        "standardize": not getattr(args, "no_standardize", False),
        "input": input_desc,
        "target": target,
        "output_dir": str(_out_dir(args)),
    }


def cmd_generate(args) -> int:
    if not args.friedman:
        raise _UsageError("choose a generator: --friedman")
    if args.rows < 10:
        raise _UsageError("--rows must be >= 10")
    rng = np.random.default_rng(args.seed)
    data = friedman_generate(args.rows, rng, pi_variant=args.pi_variant)
    out = _out_dir(args)
    csv_path = out / f"{args.output}.csv"
    write_csv(data, csv_path)
    source = {"generator": "friedman", "n": args.rows, "pi_variant": args.pi_variant}
    meta = {
        "config": _config_payload(args, input_desc=source, target=data.target_name),
        "names": list(data.names) + [data.target_name],
        "n": data.n,
        "d": data.d,
    }
    _write_json(out / f"{args.output}.meta.json", meta)
    print(csv_path)
    return EXIT_OK


def cmd_tune(args) -> int:
    if args.k_min < 1 or args.k_min > args.k_max:
        raise _UsageError("need 1 <= --k-min <= --k-max")
    if args.folds < 2:
        raise _UsageError("--folds must be >= 2")
    data = load_csv(args.input, args.target)
    rng = np.random.default_rng(args.seed)
    sel = select_k(
        data,
        (args.k_min, args.k_max),
        args.folds,
        rng,
        threads=args.threads,
        standardize=not args.no_standardize,
    )
    out = _out_dir(args)
    payload = {
        "config": _config_payload(args, input_desc=str(args.input), target=args.target),
        "feature_names": list(data.names),
        "k_values": list(sel.k_values),
        "k_star": sel.k_star,
        "argmax_feature": data.names[sel.argmax_feature],
        "argmax_feature_index": sel.argmax_feature,
        "t_grid": sel.t_grid.tolist(),
        "cell_stats": {
            "mean": sel.mean.tolist(),
            "variance": sel.variance.tolist(),
            "null_mean": sel.null_mean.tolist(),
            "null_variance": sel.null_variance.tolist(),
        },
        "folds": [f.tolist() for f in sel.folds.folds],
    }
    path = out / f"{args.output}.json"
    _write_json(path, payload)
    if args.report:
        print(f"k* = {sel.k_star} (peak separation {sel.t_grid.max():.4g} "
              f"on feature {data.names[sel.argmax_feature]})")
        for a, k in enumerate(sel.k_values):
            col = sel.t_grid[:, a]
            print(f"  k={k:>3}  max t = {col.max():.4g}  (feature {data.names[int(col.argmax())]})")
    print(path)
    return EXIT_OK


def _resolve_k(args) -> int:
    given = args.k is not None
    from_file = args.k_from is not None
    if given == from_file:
        raise _UsageError("give exactly one of --k or --k-from")
    if given:
        if args.k < 1:
            raise _UsageError("--k must be >= 1")
        return args.k
    try:
        payload = json.loads(Path(args.k_from).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"no such file: {args.k_from}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.k_from}: not valid JSON ({exc})") from None
    try:
        return int(payload["k_star"])
    except (KeyError, TypeError, ValueError):
        raise DataError(f"{args.k_from}: no usable k_star entry") from None


def cmd_select(args) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise _UsageError("--alpha must be in (0, 1)")
    if args.permutations < 10:
        raise _UsageError("--permutations must be >= 10")
    if args.max_features is not None and args.max_features < 1:
        raise _UsageError("--max-features must be >= 1")
    k = _resolve_k(args)
    data = load_csv(args.input, args.target)
    rng = np.random.default_rng(args.seed)
    trace = forward_select(
        data,
        k,
        args.alpha,
        args.permutations,
        rng,
        max_features=args.max_features,
        threads=args.threads,
        standardize=not args.no_standardize,
    )
    out = _out_dir(args)
    config = _config_payload(args, input_desc=str(args.input), target=args.target)
    config["k"] = k
    payload = {
        "config": config,
        "feature_names": list(data.names),
        "selected": [data.names[j] for j in trace.selected],
        "selected_indices": list(trace.selected),
        "stop_reason": trace.stop_reason,
        "mi_evaluations": trace.mi_evaluations,
        "iterations": [
            {
                "iteration": it.index,
                "candidate_scores": {data.names[j]: v for j, v in it.candidate_scores.items()},
                "chosen": data.names[it.chosen],
                "chosen_index": it.chosen,
                "chosen_mi": it.chosen_mi,
                "threshold": it.threshold,
                "p_value": {
                    "p": it.p_value.p,
                    "ci_low": it.p_value.ci_low,
                    "ci_high": it.p_value.ci_high,
                    "n_permutations": it.p_value.n_permutations,
                },
                "accepted": it.accepted,
                "null_samples": list(it.null_samples),
            }
            for it in trace.iterations
        ],
    }
    json_path = out / f"{args.output}.json"
    _write_json(json_path, payload)
    csv_path = out / f"{args.output}_iterations.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "feature", "mi", "threshold"])
        for it in trace.iterations:
            writer.writerow([it.index, data.names[it.chosen], repr(it.chosen_mi), repr(it.threshold)])
    if args.report:
        print(f"{'iter':>4}  {'feature':<12} {'MI':>10} {'threshold':>10} {'p':>6}  accepted")
        for it in trace.iterations:
            print(
                f"{it.index:>4}  {data.names[it.chosen]:<12} {it.chosen_mi:>10.4f} "
                f"{it.threshold:>10.4f} {it.p_value.p:>6.3f}  {it.accepted}"
            )
        chosen = ", ".join(data.names[j] for j in trace.selected) or "(none)"
        print(f"selected: {chosen}")
        print(f"stop reason: {trace.stop_reason}; MI evaluations: {trace.mi_evaluations}")
    print(json_path)
    return EXIT_OK


def _resolve_features(args, data) -> list:
    picked = [args.features is not None, args.trace is not None, args.all_features]
    if sum(picked) != 1:
        raise _UsageError("give exactly one of --features, --trace, or --all-features")
    if args.all_features:
        return list(range(data.d))
    if args.features is not None:
        out = []
        for tok in args.features.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if tok in data.names:
                out.append(data.names.index(tok))
            elif tok.lstrip("-").isdigit():
                out.append(int(tok))
            else:
                raise _UsageError(f"unknown feature {tok!r}")
        if not out:
            raise _UsageError("--features lists no features")
        return out
    try:
        payload = json.loads(Path(args.trace).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"no such file: {args.trace}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.trace}: not valid JSON ({exc})") from None
    indices = payload.get("selected_indices")
    if indices is None:
        raise DataError(f"{args.trace}: no selected_indices entry")
    if not indices:
        raise _UsageError(f"{args.trace}: selection is empty, nothing to evaluate")
    return [int(i) for i in indices]


def cmd_eval(args) -> int:
    if args.k_reg < 1:
        raise _UsageError("--k-reg must be >= 1")
    train = load_csv(args.train, args.target)
    test = load_csv(args.test, args.target)
    features = _resolve_features(args, train)
    report = knn_rmse(train, test, features, args.k_reg)
    out = _out_dir(args)
    config = _config_payload(args, input_desc={"train": str(args.train), "test": str(args.test)}, target=args.target)
    config["k_reg"] = args.k_reg
    payload = {
        "config": config,
        "feature_subset": [train.names[j] for j in report.feature_subset],
        "feature_subset_indices": list(report.feature_subset),
        "rmse": report.rmse,
        "k_reg": report.k_reg,
        "n_train": report.n_train,
        "n_test": report.n_test,
    }
    path = out / f"{args.output}.json"
    _write_json(path, payload)
    if args.report:
        subset = ", ".join(train.names[j] for j in report.feature_subset)
        print(f"features: {subset}")
        print(f"rmse = {report.rmse:.4f}  (k_reg={report.k_reg}, train n={report.n_train}, test n={report.n_test})")
    print(path)
    return EXIT_OK


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or .)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on this")
    p.add_argument("--no-standardize", action="store_true", help="estimate on raw, unscaled columns")
    p.add_argument("--report", action="store_true", help="print a human-readable summary")


def _build_parser() -> _Parser:
    parser = _Parser(prog="mifsel", description="Mutual-information feature selection for regression.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic benchmark dataset")
    g.add_argument("--friedman", action="store_true", help="the 10-feature synthetic regression problem")
    g.add_argument("-n", "--rows", type=int, default=100)
    g.add_argument("--pi-variant", action="store_true", help="use sin(pi*x1*x2) instead of sin(x1*x2)")
    g.add_argument("--output", default="friedman", help="output basename")
    _add_common(g)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("tune", help="pick the estimator neighbor count k*")
    t.add_argument("--input", required=True, help="CSV dataset")
    t.add_argument("--target", required=True, help="target column name or 0-based index")
    t.add_argument("--k-min", type=int, default=1)
    t.add_argument("--k-max", type=int, default=20)
    t.add_argument("--folds", type=int, default=20)
    t.add_argument("--output", default="tune", help="output basename")
    _add_common(t)
    t.set_defaults(func=cmd_tune)

    s = sub.add_parser("select", help="greedy forward selection with permutation stop")
    s.add_argument("--input", required=True, help="CSV dataset")
    s.add_argument("--target", required=True, help="target column name or 0-based index")
    s.add_argument("--k", type=int, default=None, help="estimator neighbor count")
    s.add_argument("--k-from", default=None, help="JSON file with a k_star entry (tune output)")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--permutations", type=int, default=50)
    s.add_argument("--max-features", type=int, default=None)
    s.add_argument("--output", default="select", help="output basename")
    _add_common(s)
    s.set_defaults(func=cmd_select)

    e = sub.add_parser("eval", help="kNN-regressor RMSE for a feature subset")
    e.add_argument("--train", required=True, help="training CSV")
    e.add_argument("--test", required=True, help="test CSV")
    e.add_argument("--target", required=True, help="target column name or 0-based index")
    e.add_argument("--features", default=None, help="comma-separated names or 0-based indices")
    e.add_argument("--trace", default=None, help="select output JSON to take the subset from")
    e.add_argument("--all-features", action="store_true")
    e.add_argument("--k-reg", type=int, default=5)
    e.add_argument("--output", default="eval", help="output basename")
    _add_common(e)
    e.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (_UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
