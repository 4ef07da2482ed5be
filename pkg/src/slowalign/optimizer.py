"""Mini-batch SGD with per-group learning rates.

The two-rate regime drives the representation parameters at lr_rep and the
classifier at lr_cls (lr_rep << lr_cls for slow-learner runs). Momentum is
the classic velocity recursion v <- momentum * v + g, w <- w - lr * v, with
optional weight decay folded into g. Learning rates stay constant within a
task; no schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_LR_REP = 0.0001
DEFAULT_LR_CLS = 0.01
UNIFORM_BASELINE_LR = 0.005


@dataclass
class OptimizerConfig:
    lr_rep: float = DEFAULT_LR_REP
    lr_cls: float = DEFAULT_LR_CLS
    momentum: float = 0.9
    weight_decay: float = 0.0
    batch_size: int = 128
    epochs_per_task: int = 20

    def __post_init__(self):
        if self.lr_rep <= 0 or self.lr_cls <= 0:
            raise ValueError("learning rates must be positive")
        if self.batch_size < 1 or self.epochs_per_task < 1:
            raise ValueError("batch size and epoch count must be >= 1")


def uniform_lr_config(lr: float, **kwargs) -> OptimizerConfig:
    """Single learning rate for every parameter group (the uniform baseline)."""
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    return OptimizerConfig(lr_rep=lr, lr_cls=lr, **kwargs)


@dataclass
class SGD:
    """Owns the momentum buffers for one set of parameter groups.

    ``groups`` maps group name ("rep" / "cls") to {param_name: array};
    arrays are updated in place. Recreate the optimizer when parameters are
    reallocated (e.g. after extending the classifier).
    """

    groups: dict[str, dict[str, np.ndarray]]
    config: OptimizerConfig
    velocity: dict[str, np.ndarray] = field(default_factory=dict)

    def _lr(self, group: str) -> float:
        return self.config.lr_rep if group == "rep" else self.config.lr_cls

    def step(self, grads: dict[str, np.ndarray]) -> None:
        cfg = self.config
        for group_name, params in self.groups.items():
            lr = self._lr(group_name)
            for name, param in params.items():
                if name not in grads:
                    continue
                g = grads[name]
                if g.shape != param.shape:
                    raise ValueError(f"gradient shape mismatch for {name}")
                if cfg.weight_decay:
                    g = g + cfg.weight_decay * param
                if cfg.momentum:
                    v = self.velocity.get(name)
                    if v is None:
                        v = np.zeros_like(param)
                        self.velocity[name] = v
                    v *= cfg.momentum
                    v += g
                    g = v
                param -= lr * g
