"""Command-line surface for the engine.

Subcommands: run (continual stream), gen-synth (synthetic benchmark),
probe (linear probing), cka (snapshot similarity), align-only (replay
alignment from saved model + stats files). Values come from flags, or from
an optional TOML config file that flags override. Reports are JSON with a
versioned schema; everything in them except wall_time_s is a pure function
of the command line and seed.

Exit codes: 0 success, 1 invalid configuration, 2 I/O failure,
3 numerical failure. The SLCA_THREADS environment variable caps the
worker threads of the underlying numeric libraries.

Heavy imports happen inside the handlers so the thread cap can be applied
before the numeric stack loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


def _apply_thread_cap() -> None:
    cap = os.environ.get("SLCA_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        raise ValueError(f"SLCA_THREADS must be an integer, got {cap!r}")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=n)
    except ImportError:
        pass


def _load_config_file(path: str) -> dict:
    import tomli

    with open(path, "rb") as fh:
        return tomli.load(fh)


def _merge_config(args: argparse.Namespace, keys: list[str]) -> dict:
    """Defaults < config file < explicit flags (flags parse to None when absent)."""
    merged: dict = {}
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
        unknown = set(file_values) - set(keys)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_values)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _write_report(report: dict, output: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_RUN_KEYS = [
    "data", "method", "tasks", "seed", "lr_rep", "lr_cls", "momentum",
    "weight_decay", "epochs", "batch_size", "align_epochs", "align_lr",
    "tau", "samples_per_class", "diag_cov", "no_logit_norm",
    "head", "feature_dim", "hidden",
]


def cmd_run(args: argparse.Namespace) -> int:
    from . import dataio, protocol
    from .alignment import AlignConfig
    from .optimizer import UNIFORM_BASELINE_LR, OptimizerConfig
    from .stats import DIAGONAL, FULL

    cfg = _merge_config(args, _RUN_KEYS)
    if "data" not in cfg:
        raise ValueError("--data is required")
    method = cfg.get("method", "sl_ca_ln")

    if method == "seq_ft_uniform":
        default_lr = UNIFORM_BASELINE_LR
        lr_rep = cfg.get("lr_rep", cfg.get("lr_cls", default_lr))
        lr_cls = cfg.get("lr_cls", lr_rep)
    else:
        lr_rep = cfg.get("lr_rep", 0.0001)
        lr_cls = cfg.get("lr_cls", 0.01)
    optimizer = OptimizerConfig(
        lr_rep=lr_rep,
        lr_cls=lr_cls,
        momentum=cfg.get("momentum", 0.9),
        weight_decay=cfg.get("weight_decay", 0.0),
        batch_size=cfg.get("batch_size", 128),
        epochs_per_task=cfg.get("epochs", 20),
    )
    align = AlignConfig(
        samples_per_class=cfg.get("samples_per_class", 256),
        tau=cfg.get("tau", 0.1),
        epochs=cfg.get("align_epochs", 5),
        lr=cfg.get("align_lr", 0.01),
        logit_norm=not cfg.get("no_logit_norm", False),
    )
    run_config = protocol.RunConfig(
        method=method,
        optimizer=optimizer,
        align=align,
        covariance_mode=DIAGONAL if cfg.get("diag_cov") else FULL,
        seed=cfg.get("seed", 0),
        head=protocol.HeadConfig(
            kind=cfg.get("head", "identity"),
            feature_dim=cfg.get("feature_dim"),
            hidden=cfg.get("hidden", 64),
        ),
    )

    dataset = dataio.load_dataset(cfg["data"])
    split = dataio.make_split(dataset.classes, cfg.get("tasks", 10), run_config.seed)
    stream = protocol.build_stream(dataset, split)
    result = protocol.run_stream(stream, run_config)
    report = protocol.run_report(run_config, result)
    report["command"] = "run"
    report["data"] = cfg["data"]
    report["tasks"] = [list(t) for t in split.tasks]
    _write_report(report, args.output)
    print(f"Last-Acc: {report['last_acc']:.4f}")
    print(f"Inc-Acc:  {report['inc_acc']:.4f}")
    return EXIT_OK


def cmd_gen_synth(args: argparse.Namespace) -> int:
    from . import dataio

    dataset = dataio.gen_synthetic(
        num_classes=args.classes,
        dim=args.dim,
        train_per_class=args.train_per_class,
        test_per_class=args.test_per_class,
        separation=args.sep,
        seed=args.seed,
    )
    dataio.save_dataset(dataset, args.out)
    print(f"wrote {dataset.num_records} records ({args.classes} classes, dim {args.dim}) to {args.out}")
    return EXIT_OK


def cmd_probe(args: argparse.Namespace) -> int:
    from . import dataio
    from .analysis import ProbeConfig, linear_probe
    from .linalg import RngState

    dataset = dataio.load_dataset(args.data)
    train_x, train_y = dataset.subset(dataset.classes, dataio.TRAIN)
    test_x, test_y = dataset.subset(dataset.classes, dataio.TEST)
    accuracy = linear_probe(
        train_x, train_y, test_x, test_y,
        ProbeConfig(lr=args.lr, epochs=args.epochs),
        RngState(args.seed),
    )
    report = {
        "schema": 1,
        "command": "probe",
        "data": args.data,
        "seed": args.seed,
        "epochs": args.epochs,
        "lr": args.lr,
        "accuracy": round(accuracy, 10),
    }
    _write_report(report, args.output)
    print(f"probe accuracy: {accuracy:.4f}")
    return EXIT_OK


def cmd_cka(args: argparse.Namespace) -> int:
    from . import dataio
    from .analysis import cka

    snap_a = dataio.load_dataset(args.a).features
    snap_b = dataio.load_dataset(args.b).features
    value = cka(snap_a, snap_b)
    report = {"schema": 1, "command": "cka", "a": args.a, "b": args.b, "cka": round(value, 10)}
    _write_report(report, args.output)
    print(f"{value:.10f}")
    return EXIT_OK


def cmd_align_only(args: argparse.Namespace) -> int:
    from .alignment import AlignConfig, align_classifier
    from .linalg import RngState
    from .model import Model, load_model, save_model
    from .stats import load_bank

    model = load_model(args.model)
    bank = load_bank(args.stats)
    config = AlignConfig(
        samples_per_class=args.samples_per_class,
        tau=args.tau,
        epochs=args.align_epochs,
        logit_norm=not args.no_logit_norm,
    )
    aligned = align_classifier(model.classifier, bank, config, RngState(args.seed))
    save_model(Model(model.head, aligned), args.out)
    print(f"wrote aligned model to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowalign",
        description="Class-incremental continual learning on feature datasets",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="execute a continual run over a task stream")
    run.add_argument("--data", help="SLCF feature dataset path")
    run.add_argument("--method", choices=[
        "seq_ft_uniform", "seq_ft_fixed_rep", "sl", "sl_ca", "sl_ca_ln",
        "fixed_rep_ca", "fixed_rep_ca_ln", "joint",
    ])
    run.add_argument("--tasks", type=int, help="number of tasks (default 10)")
    run.add_argument("--seed", type=int, help="run seed (default 0)")
    run.add_argument("--lr-rep", type=float, dest="lr_rep", help="representation learning rate (default 0.0001)")
    run.add_argument("--lr-cls", type=float, dest="lr_cls", help="classifier learning rate (default 0.01)")
    run.add_argument("--momentum", type=float, help="SGD momentum (default 0.9)")
    run.add_argument("--weight-decay", type=float, dest="weight_decay")
    run.add_argument("--epochs", type=int, help="epochs per task (default 20)")
    run.add_argument("--batch-size", type=int, dest="batch_size", help="mini-batch size (default 128)")
    run.add_argument("--align-epochs", type=int, dest="align_epochs", help="alignment epochs (default 5)")
    run.add_argument("--align-lr", type=float, dest="align_lr", help="alignment learning rate (default 0.01)")
    run.add_argument("--tau", type=float, help="logit-normalization temperature (default 0.1)")
    run.add_argument("--samples-per-class", type=int, dest="samples_per_class",
                     help="generated features per class during alignment (default 256)")
    run.add_argument("--diag-cov", action="store_const", const=True, dest="diag_cov",
                     help="store diagonal variances instead of full covariances")
    run.add_argument("--no-logit-norm", action="store_const", const=True, dest="no_logit_norm",
                     help="align with plain cross-entropy (only affects *_ca-free custom runs)")
    run.add_argument("--head", choices=["identity", "mlp"], help="representation head (default identity)")
    run.add_argument("--feature-dim", type=int, dest="feature_dim", help="mlp head output dim")
    run.add_argument("--hidden", type=int, help="mlp head hidden width (default 64)")
    run.add_argument("--config", help="TOML config file; flags override its values")
    run.add_argument("--output", help="write the JSON report here instead of stdout")
    run.set_defaults(handler=cmd_run)

    gen = sub.add_parser("gen-synth", help="generate a synthetic Gaussian benchmark")
    gen.add_argument("--classes", type=int, required=True)
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--train-per-class", type=int, dest="train_per_class", default=100)
    gen.add_argument("--test-per-class", type=int, dest="test_per_class", default=50)
    gen.add_argument("--sep", type=float, required=True, help="mean separation scale")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=cmd_gen_synth)

    probe = sub.add_parser("probe", help="linear-probe accuracy on frozen features")
    probe.add_argument("--data", required=True)
    probe.add_argument("--seed", type=int, default=0)
    probe.add_argument("--epochs", type=int, default=50)
    probe.add_argument("--lr", type=float, default=0.01)
    probe.add_argument("--output")
    probe.set_defaults(handler=cmd_probe)

    ckap = sub.add_parser("cka", help="linear CKA between two feature snapshots")
    ckap.add_argument("--a", required=True)
    ckap.add_argument("--b", required=True)
    ckap.add_argument("--output")
    ckap.set_defaults(handler=cmd_cka)

    align = sub.add_parser("align-only", help="align a saved model against saved stats")
    align.add_argument("--model", required=True)
    align.add_argument("--stats", required=True)
    align.add_argument("--out", required=True)
    align.add_argument("--seed", type=int, default=0)
    align.add_argument("--tau", type=float, default=0.1)
    align.add_argument("--align-epochs", type=int, dest="align_epochs", default=5)
    align.add_argument("--samples-per-class", type=int, dest="samples_per_class", default=256)
    align.add_argument("--no-logit-norm", action="store_true", dest="no_logit_norm")
    align.set_defaults(handler=cmd_align_only)
    return parser


def main(argv=None) -> int:
    try:
        _apply_thread_cap()
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except (ValueError, KeyError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001 - map engine errors to exit codes
        from . import exceptions

        if isinstance(exc, exceptions.BadFormat):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        if isinstance(exc, exceptions.SlowAlignError) or exc.__class__.__name__ == "LinAlgError":
            print(f"error: numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        raise


if __name__ == "__main__":
    sys.exit(main())
