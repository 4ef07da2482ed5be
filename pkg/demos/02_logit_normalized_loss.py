"""What dividing logits by tau * ||H|| does to the cross-entropy.

The normalized loss only sees the direction of the logit vector: scaling all
logits by a positive constant changes nothing, the argmax never moves, and
the temperature controls how confident the implied softmax may get. Training
with it adjusts decision boundaries without inflating logit magnitudes.
"""

import numpy as np

from slowalign import argmax_class, logitnorm_ce, softmax_ce

h = np.array([2.0, 0.5, -1.0])

print("plain CE loss:          ", round(softmax_ce(h, 0).loss, 4))
print("normalized CE loss:     ", round(logitnorm_ce(h, 0, tau=0.1).loss, 6))
print("normalized CE on 100*h: ", round(logitnorm_ce(100 * h, 0, tau=0.1).loss, 6))
print("argmax unchanged:", argmax_class(h) == argmax_class(h / (0.1 * np.linalg.norm(h))))

# temperature sweep: larger tau -> softer implied softmax -> higher loss on
# the correct class, because confidence is capped
for tau in (0.05, 0.1, 0.5, 1.0):
    print(f"tau={tau:4}: loss={logitnorm_ce(h, 0, tau).loss:.4f}")

# the gradient flows through the norm itself: pushing the correct logit up
# is not free, since it also grows ||H||; the radial component cancels
lv = logitnorm_ce(h, 0, tau=0.1)
print("gradient:", np.round(lv.grad, 4))
print("gradient . h (radial component, ~0):", round(float(lv.grad @ h), 12))

# plain CE keeps rewarding larger magnitudes; the normalized loss does not
for scale in (1, 10, 100):
    plain = softmax_ce(scale * h, 0).loss
    normed = logitnorm_ce(scale * h, 0, tau=0.1).loss
    print(f"scale {scale:3}: plain={plain:.6f} normalized={normed:.6f}")
