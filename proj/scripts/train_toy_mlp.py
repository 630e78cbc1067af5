#!/usr/bin/env python3
"""Regenerates the bundled toy fixtures: a 2-layer no-bias MLP trained on the
scikit-learn 8x8 digit set, plus the held-out test split.

Outputs (overwritten in place):
  data/toy_mlp.rnst     weights, tensor names "<idx>:dense:<activation>"
  data/toy_digits.rnst  "images" (360 x 64 raw pixel values 0..16), "labels"

The container format is the little-endian "RNST" layout documented in the
project README. Training is deterministic; rerunning this script reproduces
the shipped files byte for byte.
"""

import struct
from pathlib import Path

import numpy as np
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split

HIDDEN = 48
EPOCHS = 600
LR = 1e-2
L2 = 3e-4
INIT_SEED = 1
SPLIT_SEED = 7
TEST_SIZE = 360


def write_tensor_file(path, tensors):
    """tensors: list of (name, float32 ndarray)."""
    with open(path, "wb") as f:
        f.write(b"RNST")
        f.write(struct.pack("<II", 1, len(tensors)))
        for name, data in tensors:
            data = np.ascontiguousarray(data, dtype="<f4")
            encoded = name.encode("utf-8")
            f.write(struct.pack("<I", len(encoded)))
            f.write(encoded)
            f.write(struct.pack("<I", data.ndim))
            for dim in data.shape:
                f.write(struct.pack("<I", dim))
            f.write(data.tobytes())


def train(x_train, y_train):
    rng = np.random.default_rng(INIT_SEED)
    w1 = rng.normal(0, np.sqrt(2.0 / 64), (HIDDEN, 64))
    w2 = rng.normal(0, np.sqrt(2.0 / HIDDEN), (10, HIDDEN))
    adam = {id(w1): [np.zeros_like(w1), np.zeros_like(w1)],
            id(w2): [np.zeros_like(w2), np.zeros_like(w2)]}
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    n = len(x_train)
    for epoch in range(1, EPOCHS + 1):
        pre = x_train @ w1.T
        hidden = np.maximum(pre, 0)
        logits = hidden @ w2.T
        logits -= logits.max(axis=1, keepdims=True)
        exp = np.exp(logits)
        prob = exp / exp.sum(axis=1, keepdims=True)
        grad = prob
        grad[np.arange(n), y_train] -= 1.0
        grad /= n
        g2 = grad.T @ hidden + L2 * w2
        g1 = ((grad @ w2) * (pre > 0)).T @ x_train + L2 * w1
        for w, g in ((w1, g1), (w2, g2)):
            m, v = adam[id(w)]
            m *= beta1
            m += (1 - beta1) * g
            v *= beta2
            v += (1 - beta2) * g * g
            m_hat = m / (1 - beta1 ** epoch)
            v_hat = v / (1 - beta2 ** epoch)
            w -= LR * m_hat / (np.sqrt(v_hat) + eps)
    return w1, w2


def main():
    digits = load_digits()
    x_train, x_test, y_train, y_test = train_test_split(
        digits.data, digits.target, test_size=TEST_SIZE,
        random_state=SPLIT_SEED, stratify=digits.target)

    w1, w2 = train(x_train / 16.0, y_train)

    out_dir = Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(exist_ok=True)
    write_tensor_file(out_dir / "toy_mlp.rnst", [
        ("0:dense:relu", w1.astype(np.float32)),
        ("1:dense:softmax", w2.astype(np.float32)),
    ])
    write_tensor_file(out_dir / "toy_digits.rnst", [
        ("images", x_test.astype(np.float32)),
        ("labels", y_test.astype(np.float32)),
    ])

    # Quick sanity report on the float path.
    hidden = np.maximum((x_test / 16.0) @ w1.T, 0)
    acc = np.mean(np.argmax(hidden @ w2.T, axis=1) == y_test)
    print(f"wrote {out_dir}/toy_mlp.rnst and toy_digits.rnst; "
          f"float test accuracy {acc:.4f} on {len(y_test)} samples")


if __name__ == "__main__":
    main()
