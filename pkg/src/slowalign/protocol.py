"""Class-incremental training protocol, baselines, and evaluation metrics.

A run walks an ordered task stream: extend the classifier with the task's
classes, train with task-masked cross-entropy under the method's learning
rate regime, optionally bank per-class Gaussian statistics, then evaluate
on every class seen so far (aligning a cloned classifier first when
alignment is active). Evaluation never mutates training state, so the
continual trajectory is identical with evaluation on or off.

Methods:
  seq_ft_uniform    one learning rate for everything (classic baseline)
  seq_ft_fixed_rep  frozen representation, classifier only
  sl                two-rate training (slow representation, faster classifier)
  sl_ca / sl_ca_ln  sl plus post-hoc alignment (plain CE / logit-normalized)
  fixed_rep_ca(_ln) frozen representation plus alignment
  joint             upper-bound oracle: all tasks trained at once
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from .alignment import AlignConfig, align_classifier
from .dataio import TEST, TRAIN, FeatureDataset, SplitSpec
from .linalg import RngState
from .model import Classifier, IdentityHead, MlpHead, Model, backward, extend_classifier, forward
from .optimizer import SGD, OptimizerConfig
from .stats import FULL, StatsBank, collect_class_stats, stats_storage_size

# rng namespaces within a run
_KEY_HEAD = 0
_KEY_INIT = 1
_KEY_TRAIN = 2
_KEY_ALIGN = 3

METHODS = (
    "seq_ft_uniform",
    "seq_ft_fixed_rep",
    "sl",
    "sl_ca",
    "sl_ca_ln",
    "fixed_rep_ca",
    "fixed_rep_ca_ln",
    "joint",
)


@dataclass
class Task:
    class_ids: list[int]
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray


@dataclass
class TaskStream:
    tasks: list[Task]
    dim: int

    def __post_init__(self):
        if not self.tasks:
            raise ValueError("empty task stream")
        seen: set[int] = set()
        for task in self.tasks:
            ids = set(task.class_ids)
            if ids & seen:
                raise ValueError("tasks must introduce disjoint class sets")
            seen |= ids
            if not set(np.unique(task.train_y)) <= ids:
                raise ValueError("training labels outside the task's class set")

    @property
    def num_tasks(self) -> int:
        return len(self.tasks)

    @property
    def all_classes(self) -> list[int]:
        return sorted(c for task in self.tasks for c in task.class_ids)


def build_stream(dataset: FeatureDataset, split: SplitSpec) -> TaskStream:
    """Materialize per-task train/test arrays from a dataset and a split."""
    tasks = []
    for ids in split.tasks:
        train_x, train_y = dataset.subset(ids, TRAIN)
        test_x, test_y = dataset.subset(ids, TEST)
        if len(train_x) == 0 or len(test_x) == 0:
            raise ValueError(f"task classes {ids} need records in both splits")
        tasks.append(Task(sorted(ids), train_x, train_y, test_x, test_y))
    return TaskStream(tasks=tasks, dim=dataset.feature_dim)


@dataclass
class HeadConfig:
    kind: str = "identity"  # identity | mlp
    feature_dim: int | None = None  # None: identity inherits the input dim
    hidden: int = 64
    layers: int = 2


@dataclass
class RunConfig:
    method: str = "sl_ca_ln"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    align: AlignConfig = field(default_factory=AlignConfig)
    covariance_mode: str = FULL
    seed: int = 0
    head: HeadConfig = field(default_factory=HeadConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        validate_rates(self.method, self.optimizer)


def validate_rates(method: str, opt: OptimizerConfig) -> None:
    """Two-rate methods demand lr_rep < lr_cls; the uniform baseline, equality."""
    if method in ("sl", "sl_ca", "sl_ca_ln") and not opt.lr_rep < opt.lr_cls:
        raise ValueError(
            f"method {method} requires lr_rep < lr_cls, got {opt.lr_rep} >= {opt.lr_cls}"
        )
    if method == "seq_ft_uniform" and opt.lr_rep != opt.lr_cls:
        raise ValueError("seq_ft_uniform uses a single uniform learning rate")


def method_uses_alignment(method: str) -> bool:
    return method.endswith("_ca") or method.endswith("_ca_ln")


def method_freezes_rep(method: str) -> bool:
    return method in ("seq_ft_fixed_rep", "fixed_rep_ca", "fixed_rep_ca_ln")


@dataclass
class RunResult:
    model: Model
    bank: StatsBank
    accuracies: list[float]
    wall_time_s: float = 0.0


def _build_model(stream: TaskStream, config: RunConfig, rng: RngState) -> Model:
    head_cfg = config.head
    if head_cfg.kind == "identity":
        if head_cfg.feature_dim not in (None, stream.dim):
            raise ValueError("identity head cannot change the feature dim")
        return Model(IdentityHead(stream.dim))
    if head_cfg.kind == "mlp":
        d_out = head_cfg.feature_dim or stream.dim
        return Model(MlpHead(stream.dim, d_out, head_cfg.hidden, head_cfg.layers, rng))
    raise ValueError(f"unknown head kind {head_cfg.kind!r}")


def _train_epochs(
    model: Model,
    x: np.ndarray,
    y: np.ndarray,
    mask: list[int],
    opt_config: OptimizerConfig,
    rng: RngState,
    frozen_rep: bool,
) -> None:
    groups = model.param_groups()
    if frozen_rep:
        groups = {"cls": groups["cls"]}
    sgd = SGD(groups=groups, config=opt_config)
    gen = rng.generator
    n = len(x)
    for _ in range(opt_config.epochs_per_task):
        order = gen.permutation(n)
        for start in range(0, n, opt_config.batch_size):
            idx = order[start : start + opt_config.batch_size]
            grads = backward(model, x[idx], y[idx], mask=mask, loss_kind="softmax")
            sgd.step(grads.by_name)


def _align_config(config: RunConfig) -> AlignConfig:
    use_ln = config.method.endswith("_ln")
    if config.align.logit_norm == use_ln:
        return config.align
    return dataclasses.replace(config.align, logit_norm=use_ln)


def run_stream(stream: TaskStream, config: RunConfig, evaluate_tasks: bool = True) -> RunResult:
    """Execute the configured method over the stream.

    Returns the continually-trained model, the stats bank (empty for
    methods without alignment), and the accuracy record a_t: accuracy over
    all classes seen so far, measured after each task (a single entry for
    the joint oracle). With evaluate_tasks=False the accuracy record stays
    empty and the resulting model is bit-identical, since evaluation and
    alignment never touch training state.
    """
    started = time.perf_counter()
    rng = RngState(config.seed)
    model = _build_model(stream, config, rng.split(_KEY_HEAD))
    bank = StatsBank(model.feature_dim, config.covariance_mode)
    use_ca = method_uses_alignment(config.method)
    frozen = method_freezes_rep(config.method)
    accuracies: list[float] = []

    if config.method == "joint":
        extend_classifier(model, stream.all_classes, rng.split(_KEY_INIT, 0))
        x = np.concatenate([t.train_x for t in stream.tasks], axis=0)
        y = np.concatenate([t.train_y for t in stream.tasks])
        _train_epochs(model, x, y, stream.all_classes, config.optimizer, rng.split(_KEY_TRAIN, 0), frozen)
        if evaluate_tasks:
            accuracies.append(evaluate(model, stream, stream.num_tasks))
        return RunResult(model, bank, accuracies, time.perf_counter() - started)

    for t, task in enumerate(stream.tasks):
        extend_classifier(model, task.class_ids, rng.split(_KEY_INIT, t))
        _train_epochs(
            model, task.train_x, task.train_y, task.class_ids,
            config.optimizer, rng.split(_KEY_TRAIN, t), frozen,
        )
        if use_ca:
            for cid in task.class_ids:
                feats, _ = forward(model, task.train_x[task.train_y == cid])
                bank.add(collect_class_stats(feats, cid, config.covariance_mode))
        if evaluate_tasks:
            if use_ca:
                aligned = align_classifier(
                    model.classifier, bank, _align_config(config), rng.split(_KEY_ALIGN, t)
                )
                accuracies.append(evaluate(model, stream, t + 1, classifier=aligned))
            else:
                accuracies.append(evaluate(model, stream, t + 1))
    return RunResult(model, bank, accuracies, time.perf_counter() - started)


def evaluate(
    model: Model, stream: TaskStream, up_to_task: int, classifier: Classifier | None = None
) -> float:
    """Accuracy over the union of test sets of tasks 1..up_to_task.

    Predictions are argmax over every active class; no task identity is
    used. An alternative classifier (e.g. an aligned clone) can stand in
    for the model's own.
    """
    if not 1 <= up_to_task <= stream.num_tasks:
        raise ValueError(f"up_to_task must be in 1..{stream.num_tasks}")
    cls = classifier if classifier is not None else model.classifier
    x = np.concatenate([t.test_x for t in stream.tasks[:up_to_task]], axis=0)
    y = np.concatenate([t.test_y for t in stream.tasks[:up_to_task]])
    features, _ = model.head.forward(x)
    logits = cls.logits(features)
    predicted = cls.class_ids[np.argmax(logits, axis=1)]
    return float(np.mean(predicted == y))


def last_acc(accuracies) -> float:
    """Accuracy over all classes after the final task."""
    if len(accuracies) == 0:
        raise ValueError("empty accuracy record")
    return float(accuracies[-1])


def inc_acc(accuracies) -> float:
    """Mean of the after-task accuracies across the stream."""
    if len(accuracies) == 0:
        raise ValueError("empty accuracy record")
    return float(np.mean(accuracies))


def run_seed_sweep(stream: TaskStream, config: RunConfig, seeds) -> list[RunResult]:
    """Re-run the same stream under several seeds (mean/std left to the caller)."""
    return [run_stream(stream, dataclasses.replace(config, seed=int(s))) for s in seeds]


def run_report(config: RunConfig, result: RunResult) -> dict:
    """Structured run summary; everything except wall_time_s is deterministic."""
    return {
        "schema": 1,
        "config": {
            "method": config.method,
            "seed": config.seed,
            "covariance_mode": config.covariance_mode,
            "head": dataclasses.asdict(config.head),
            "optimizer": dataclasses.asdict(config.optimizer),
            "align": dataclasses.asdict(config.align),
        },
        "per_task_acc": [round(a, 10) for a in result.accuracies],
        "last_acc": round(last_acc(result.accuracies), 10),
        "inc_acc": round(inc_acc(result.accuracies), 10),
        "stats_storage_scalars": stats_storage_size(result.bank),
        "wall_time_s": result.wall_time_s,
    }
