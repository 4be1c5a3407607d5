"""Command-line entry point.

Exit codes: 0 ok, 2 configuration or flag error, 3 data format error,
4 model/data schema mismatch, 5 internal error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from mibwarden import __version__
from mibwarden.collector import DeltaConfig, format_output, stream_classify, udp_lines
from mibwarden.dataset import class_histogram, load_csv, relabel_binary, stratified_split, write_csv
from mibwarden.errors import ConfigError, MibwardenError, SchemaMismatchError
from mibwarden.evaluation import compare, dump_json, evaluate, format_metrics_table, format_ranking
from mibwarden.learners import DEFAULT_PARAMS, LEARNER_ORDER, train
from mibwarden.model import parse_model, serialize_model
from mibwarden.synth import default_profile, load_profile, synthesize

log = logging.getLogger("mibwarden")

SEED_ENV = "MIBWARDEN_SEED"


def resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def learner_params(args, learner_id, seed):
    params = {}
    for key in DEFAULT_PARAMS[learner_id]:
        if key == "seed":
            params[key] = seed
            continue
        value = getattr(args, key, None)
        params[key] = DEFAULT_PARAMS[learner_id][key] if value is None else value
    return params


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _read_input(path):
    return load_csv(sys.stdin.buffer if path in (None, "-") else path)


# ---------------------------------------------------------------- commands

def cmd_synth(args):
    seed = resolve_seed(args.seed)
    profile = load_profile(args.profile) if args.profile else default_profile()
    if args.noise is not None:
        if not 0.0 <= args.noise <= 1.0:
            raise ConfigError("--noise must lie in [0, 1]")
        profile = type(profile)(
            profile.names, profile.centers, profile.spreads, profile.class_counts,
            profile.classes, args.noise, profile.noise_width,
        )
    ds = synthesize(profile, seed)
    _write(args.out, write_csv(ds))
    log.info("wrote %d records (%s)", len(ds), ds.provenance)
    return 0


def _fit(job):
    learner_id, data, params = job
    start = time.perf_counter()
    model = train(learner_id, data, **params)
    return model, time.perf_counter() - start


def _fit_all(jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_fit, jobs))
    return [_fit(j) for j in jobs]


def run_bench(ds, seed, split=0.7, binary=False, args=None, workers=1):
    """Train all five learners; return (holdout reports, resubstitution reports, summary)."""
    if not 0.0 < split < 1.0:
        raise ConfigError(f"--split must lie in (0, 1), got {split}")
    if binary:
        ds = relabel_binary(ds)
    train_ds, test_ds = stratified_split(ds, split, seed)
    params = {lid: learner_params(args, lid, seed) for lid in LEARNER_ORDER}

    jobs = [(lid, train_ds, params[lid]) for lid in LEARNER_ORDER]
    jobs += [(lid, ds, params[lid]) for lid in LEARNER_ORDER]
    fitted = _fit_all(jobs, workers)
    n = len(LEARNER_ORDER)
    holdout = [
        evaluate(m, test_ds, train_time=t, seed=seed, protocol="holdout") for m, t in fitted[:n]
    ]
    resub = [
        evaluate(m, ds, train_time=t, seed=seed, protocol="resubstitution") for m, t in fitted[n:]
    ]
    summary = {
        "tool": "mibwarden",
        "version": __version__,
        "seed": seed,
        "dataset": ds.provenance,
        "records": len(ds),
        "classes": list(ds.classes),
        "class_counts": class_histogram(ds),
        "split": split,
        "train_records": len(train_ds),
        "test_records": len(test_ds),
        "params": {lid: {k: v for k, v in p.items()} for lid, p in params.items()},
    }
    return holdout, resub, summary


def bench_json(holdout, resub, summary, timings=False) -> dict:
    out = dict(summary)
    out["holdout"] = {r.learner_id: r.to_dict(timings) for r in holdout}
    out["resubstitution"] = {r.learner_id: r.to_dict(timings) for r in resub}
    out["ranking"] = {
        "holdout": [r.learner_id for r in compare(holdout)],
        "resubstitution": [r.learner_id for r in compare(resub)],
    }
    return out


def cmd_bench(args):
    seed = resolve_seed(args.seed)
    if not 0.0 < args.split < 1.0:
        raise ConfigError(f"--split must lie in (0, 1), got {args.split}")
    if args.data:
        ds = load_csv(args.data)
    else:
        ds = synthesize(default_profile(), seed if args.synth_seed is None else args.synth_seed)
    holdout, resub, summary = run_bench(ds, seed, args.split, args.binary, args, args.jobs)

    out = sys.stdout
    out.write(f"dataset {summary['dataset']}: {summary['records']} records, "
              f"{summary['train_records']} train / {summary['test_records']} test (seed {seed})\n")
    for protocol, reports in (("holdout", holdout), ("resubstitution", resub)):
        out.write(f"\n== {protocol} ==\n")
        for metric in ("precision", "recall", "f_measure"):
            out.write(f"\n{metric}\n{format_metrics_table(reports, metric)}\n")
        out.write(f"\naccuracy ranking ({protocol})\n{format_ranking(compare(reports))}\n")
    if args.report:
        _write(args.report, dump_json(bench_json(holdout, resub, summary, args.timings)))
    return 0


def cmd_train(args):
    seed = resolve_seed(args.seed)
    ds = load_csv(args.data)
    model = train(args.learner, ds, **learner_params(args, args.learner, seed))
    _write(args.out, serialize_model(model))
    return 0


def _load_model(path):
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def cmd_eval(args):
    model = _load_model(args.model)
    ds = load_csv(args.data)
    report = evaluate(model, ds)
    sys.stdout.write(f"accuracy {report.accuracy:.6f} on {len(ds)} records\n")
    for metric in ("precision", "recall", "f_measure"):
        sys.stdout.write(f"\n{metric}\n{format_metrics_table([report], metric)}\n")
    if args.report:
        _write(args.report, dump_json(report.to_dict()))
    return 0


def cmd_predict(args):
    model = _load_model(args.model)
    ds = _read_input(args.input)
    if ds.fingerprint != model.schema_fingerprint:
        raise SchemaMismatchError(
            f"input columns {','.join(ds.names)} do not match model attributes {','.join(model.attributes)}"
        )
    lines = [model.classes[i] for i in model.predict_dataset(ds)]
    _write(args.out, "".join(line + "\n" for line in lines))
    return 0


def cmd_classify_stream(args):
    model = _load_model(args.model)
    cfg = DeltaConfig(args.interval, args.wrap, args.max_gap)
    if args.udp:
        host, _, port = args.udp.rpartition(":")
        if not port.isdigit():
            raise ConfigError("--udp expects HOST:PORT")
        lines = udp_lines(host or "0.0.0.0", int(port))
    elif args.input in (None, "-"):
        lines = sys.stdin
    else:
        lines = open(args.input, encoding="utf-8")
    out = _open_out(args.out)
    try:
        for t, cls in stream_classify(lines, model, cfg):
            out.write(format_output(t, cls) + "\n")
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()
        if hasattr(lines, "close") and lines is not sys.stdin:
            lines.close()
    return 0


# ---------------------------------------------------------------- parser

def _add_learner_flags(p):
    g = p.add_argument_group("learner parameters")
    g.add_argument("--min-bucket", dest="min_bucket", type=int, help="OneR minimum bucket size (6)")
    g.add_argument("--folds", type=int, help="RIPPER grow/prune folds (3)")
    g.add_argument("--min-covered", dest="min_covered", type=int, help="RIPPER minimum positives per rule (2)")
    g.add_argument("--optimizations", type=int, help="RIPPER optimisation passes (2)")
    g.add_argument("--confidence", type=float, help="PART pruning confidence factor (0.25)")
    g.add_argument("--min-leaf", dest="min_leaf", type=int, help="PART minimum records per leaf (2)")
    g.add_argument("--max-stale", dest="max_stale", type=int, help="decision table best-first patience (5)")


def build_parser():
    parser = argparse.ArgumentParser(prog="mibwarden", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic labeled corpus")
    p.add_argument("--out", default="-")
    p.add_argument("--seed", type=int)
    p.add_argument("--profile", help="JSON synthesis profile (default: interface-group profile)")
    p.add_argument("--noise", type=float, help="override the profile's feature noise fraction")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="train and compare all five learners")
    p.add_argument("--data", help="labeled CSV (default: synthesize the default corpus)")
    p.add_argument("--seed", type=int)
    p.add_argument("--synth-seed", dest="synth_seed", type=int, help="seed for the default corpus (default: --seed)")
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--binary", action="store_true", help="relabel to Normal vs Attack")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the JSON report")
    p.add_argument("--jobs", type=int, default=1, help="train learners in this many processes")
    _add_learner_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("train", help="train one learner and write its model file")
    p.add_argument("--data", required=True)
    p.add_argument("--learner", required=True, choices=LEARNER_ORDER)
    p.add_argument("--out", default="-")
    p.add_argument("--seed", type=int)
    _add_learner_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model file on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="classify every row of a CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", default="-")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("classify-stream", help="classify a snapshot line stream")
    p.add_argument("--model", required=True)
    p.add_argument("--input", default="-")
    p.add_argument("--udp", metavar="HOST:PORT", help="listen for one snapshot per UDP datagram")
    p.add_argument("--out", default="-")
    p.add_argument("--interval", type=float, help="expected polling interval in seconds")
    p.add_argument("--wrap", type=int, default=2**32, help="counter wrap modulus (default 2^32)")
    p.add_argument("--max-gap", dest="max_gap", type=float, default=3.0,
                   help="intervals of silence before a poll gap counts as an agent reset")
    p.set_defaults(func=cmd_classify_stream)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MibwardenError as exc:
        print(f"mibwarden: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"mibwarden: error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except ValueError as exc:
        print(f"mibwarden: error: {exc}", file=sys.stderr)
        return ConfigError.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"mibwarden: internal error: {exc!r}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
