"""Representation diagnostics: linear probing and CKA similarity.

The linear probe asks "how good are these frozen features for all classes
at once?", upper-bounding what any continually-trained classifier can get
from them. CKA compares two feature matrices of the same probe inputs:
1 for identical (up to rotation/scale) representations, near 0 for
unrelated ones.
"""

import numpy as np

from slowalign import (
    HeadConfig,
    ProbeConfig,
    RngState,
    RunConfig,
    build_stream,
    cka,
    evaluate,
    gen_synthetic,
    linear_probe,
    make_split,
    run_stream,
)

ds = gen_synthetic(8, 12, 80, 40, separation=3.0, seed=21)
train_x, train_y = ds.subset(ds.classes, 0)
test_x, test_y = ds.subset(ds.classes, 1)

probe_acc = linear_probe(train_x, train_y, test_x, test_y, ProbeConfig(), RngState(1))
print(f"probe on raw features: {probe_acc:.3f}")

# a continual run over the same data; its classifier sees tasks one at a time
stream = build_stream(ds, make_split(ds.classes, 4, seed=21))
result = run_stream(stream, RunConfig(method="sl", seed=21))
continual_acc = evaluate(result.model, stream, stream.num_tasks)
print(f"continually-trained classifier: {continual_acc:.3f}")
print(f"probe advantage (the classifier gap): {probe_acc - continual_acc:+.3f}")

# CKA between representation states: identical, rotated, unrelated
probe_set = test_x
rot, _ = np.linalg.qr(RngState(2).generator.standard_normal((12, 12)))
unrelated = RngState(3).generator.standard_normal(probe_set.shape)

print(f"cka(X, X)            = {cka(probe_set, probe_set):.4f}")
print(f"cka(X, X @ Q)        = {cka(probe_set, probe_set @ rot):.4f}")
print(f"cka(X, 2.5 * X)      = {cka(probe_set, 2.5 * probe_set):.4f}")
print(f"cka(X, unrelated)    = {cka(probe_set, unrelated):.4f}")

# how far did the slow-learner run move the representation? (identity head:
# features are the inputs, so similarity is exactly 1)
moved, _ = result.model.head.forward(probe_set)
print(f"cka(before, after continual training) = {cka(probe_set, moved):.4f}")
