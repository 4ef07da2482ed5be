"""A full class-incremental run, then the ablation ladder.

Ten disjoint tasks of two classes each arrive in sequence. The two-rate
method with post-hoc alignment tracks the joint-training oracle on the
easy benchmark; on the stressed paired benchmark the methods separate into
the expected ladder: two rates plus alignment plus logit normalization on
top, the naive uniform-rate baseline at the bottom.
"""

import numpy as np

from slowalign import (
    AlignConfig,
    HeadConfig,
    OptimizerConfig,
    RunConfig,
    SplitSpec,
    build_stream,
    gen_synthetic,
    gen_synthetic_pairs,
    inc_acc,
    last_acc,
    make_split,
    run_stream,
    uniform_lr_config,
)

# --- easy benchmark: 20 well-separated classes, 10 tasks -------------------
ds = gen_synthetic(20, 24, 100, 50, separation=8.0, seed=11)
stream = build_stream(ds, make_split(ds.classes, 10, seed=11))

result = run_stream(stream, RunConfig(method="sl_ca_ln", seed=11))
print("per-task accuracy:", [round(a, 3) for a in result.accuracies])
print(f"Last-Acc={last_acc(result.accuracies):.4f}  Inc-Acc={inc_acc(result.accuracies):.4f}")

joint = run_stream(stream, RunConfig(method="joint", seed=11))
print(f"joint-training oracle: {joint.accuracies[0]:.4f}")

# --- stressed benchmark: close class pairs around distant centers ----------
pairs = gen_synthetic_pairs(10, 32, 100, 50, center_sep=8.0, pair_sep=1.25, seed=7)
split = SplitSpec(tasks=[[4 * t, 4 * t + 1, 4 * t + 2, 4 * t + 3] for t in range(5)])
hard_stream = build_stream(pairs, split)
head = HeadConfig(kind="mlp", feature_dim=32, hidden=32, layers=1)

print("\nstressed stream, mean Last-Acc over seeds 1-3:")
for method in ("sl_ca_ln", "sl_ca", "sl", "seq_ft_uniform"):
    finals = []
    for seed in (1, 2, 3):
        if method == "seq_ft_uniform":
            opt = uniform_lr_config(0.3, momentum=0.6, epochs_per_task=20)
        else:
            opt = OptimizerConfig(epochs_per_task=20)
        config = RunConfig(method=method, optimizer=opt, align=AlignConfig(epochs=15),
                           seed=seed, head=head)
        finals.append(last_acc(run_stream(hard_stream, config).accuracies))
    print(f"  {method:16s} {np.mean(finals):.3f}")
