#!/usr/bin/env python3
"""Build the bundled dataset and quantized-CNN fixtures.

Trains a small CNN on the scikit-learn digits set (8x8 grayscale, rescaled
to 0..255), applies per-tensor post-training quantization, and writes the
binary fixture files the simulator loads:

    digits_test_images.bin / digits_test_labels.bin
    digits_calib_images.bin / digits_calib_labels.bin
    weights.bin, net.json

The integer pipeline mirrored here (conv -> relu -> quantize -> maxpool,
finally fc) matches the simulator's layer semantics, so the accuracy
printed at the end is what a full-digital simulation reproduces.
"""

import argparse
import json
import struct
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F
from sklearn.datasets import load_digits
from sklearn.model_selection import train_test_split


class DigitsNet(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv1 = nn.Conv2d(1, 8, 3, padding=1)
        self.conv2 = nn.Conv2d(8, 16, 3, padding=1)
        self.fc = nn.Linear(16 * 2 * 2, 10)

    def forward(self, x):
        x = F.max_pool2d(F.relu(self.conv1(x)), 2)
        x = F.max_pool2d(F.relu(self.conv2(x)), 2)
        return self.fc(x.flatten(1))


def train(model, images, labels, epochs, seed):
    torch.manual_seed(seed)
    opt = torch.optim.Adam(model.parameters(), lr=1e-3)
    x = torch.tensor(images, dtype=torch.float32).unsqueeze(1) / 255.0
    y = torch.tensor(labels, dtype=torch.long)
    n = len(y)
    rng = np.random.default_rng(seed)
    model.train()
    for epoch in range(epochs):
        order = rng.permutation(n)
        total, correct = 0.0, 0
        for start in range(0, n, 64):
            idx = order[start:start + 64]
            xb, yb = x[idx], y[idx]
            opt.zero_grad()
            out = model(xb)
            loss = F.cross_entropy(out, yb)
            loss.backward()
            opt.step()
            total += float(loss.detach()) * len(idx)
            correct += int((out.argmax(1) == yb).sum())
        if epoch % 10 == 9:
            print(f"  epoch {epoch + 1:3d}  loss {total / n:.4f}  "
                  f"train acc {correct / n:.4f}")
    model.eval()


def quantize_weight(w):
    """Symmetric per-tensor int8; scale maps 127 to the max magnitude."""
    scale = float(np.abs(w).max()) / 127.0
    q = np.clip(np.rint(w / scale), -127, 127).astype(np.int8)
    return q, scale


def round_half_up(x):
    return np.floor(x + 0.5)


class QuantPipeline:
    """Integer inference mirroring the simulator layer by layer."""

    def __init__(self, model, calib_images):
        p = {k: v.detach().numpy() for k, v in model.state_dict().items()}
        self.in_scale = 1.0 / 255.0
        self.w1, self.s1 = quantize_weight(p["conv1.weight"])
        self.w2, self.s2 = quantize_weight(p["conv2.weight"])
        self.w3, self.s3 = quantize_weight(p["fc.weight"])
        self.b1 = np.rint(p["conv1.bias"] / (self.in_scale * self.s1)).astype(np.int64)

        # Activation scales come from the calibration split: the real-valued
        # relu maxima map to code 255.
        x = torch.tensor(calib_images, dtype=torch.float32).unsqueeze(1) / 255.0
        with torch.no_grad():
            a1 = F.relu(model.conv1(x))
            q1f = F.max_pool2d(a1, 2)
            a2 = F.relu(model.conv2(q1f))
        self.q1 = float(a1.max()) / 255.0
        self.q2 = float(a2.max()) / 255.0
        self.b2 = np.rint(p["conv2.bias"] / (self.q1 * self.s2)).astype(np.int64)
        self.b3 = np.rint(p["fc.bias"] / (self.q2 * self.s3)).astype(np.int64)

    @staticmethod
    def conv(x, w, b, pad=1):
        cin, h, wd = x.shape
        cout = w.shape[0]
        k = w.shape[2]
        xp = np.zeros((cin, h + 2 * pad, wd + 2 * pad), dtype=np.int64)
        xp[:, pad:pad + h, pad:pad + wd] = x
        out = np.zeros((cout, h, wd), dtype=np.int64)
        for oc in range(cout):
            acc = np.zeros((h, wd), dtype=np.int64)
            for ci in range(cin):
                for ky in range(k):
                    for kx in range(k):
                        acc += (int(w[oc, ci, ky, kx])
                                * xp[ci, ky:ky + h, kx:kx + wd])
            out[oc] = acc + int(b[oc])
        return out

    @staticmethod
    def pool2(x):
        c, h, w = x.shape
        r = x.reshape(c, h // 2, 2, w // 2, 2)
        return r.max(axis=(2, 4))

    def requant(self, x, cur_scale, new_scale):
        return np.clip(round_half_up(x * (cur_scale / new_scale)),
                       0, 255).astype(np.int64)

    def logits(self, image):
        x = image.reshape(1, 8, 8).astype(np.int64)
        a = self.conv(x, self.w1.astype(np.int64), self.b1)
        a = np.maximum(a, 0)
        a = self.requant(a, self.in_scale * self.s1, self.q1)
        a = self.pool2(a)
        a = self.conv(a, self.w2.astype(np.int64), self.b2)
        a = np.maximum(a, 0)
        a = self.requant(a, self.q1 * self.s2, self.q2)
        a = self.pool2(a)
        flat = a.reshape(-1)
        return self.w3.astype(np.int64) @ flat + self.b3

    def predict(self, image):
        return int(np.argmax(self.logits(image)))


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(b"HCIMIMG1")
        f.write(struct.pack("<IIII", len(images), 8, 8, 1))
        for img in images:
            f.write(img.astype(np.uint8).tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(b"HCIMLAB1")
        f.write(struct.pack("<I", len(labels)))
        f.write(np.asarray(labels, dtype=np.uint8).tobytes())


def write_weights(path, tensors):
    with open(path, "wb") as f:
        f.write(b"HCIMWTS1")
        f.write(struct.pack("<I", len(tensors)))
        for name, arr in tensors:
            f.write(struct.pack("<I", len(name)))
            f.write(name.encode())
            dtype = 0 if arr.dtype == np.int8 else 1
            f.write(struct.pack("<B", dtype))
            f.write(struct.pack("<I", arr.ndim))
            for d in arr.shape:
                f.write(struct.pack("<I", d))
            if dtype == 0:
                f.write(arr.astype(np.int8).tobytes())
            else:
                f.write(arr.astype("<i4").tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="fixtures")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--epochs", type=int, default=60)
    ap.add_argument("--test-count", type=int, default=360)
    ap.add_argument("--calib-count", type=int, default=96)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    digits = load_digits()
    # 0..16 -> 0..255 so the full 8-bit activation range is exercised.
    images = np.rint(digits.images * (255.0 / 16.0)).astype(np.uint8)
    labels = digits.target.astype(np.uint8)

    trainval_x, test_x, trainval_y, test_y = train_test_split(
        images, labels, test_size=args.test_count, random_state=args.seed,
        stratify=labels)
    train_x, calib_x, train_y, calib_y = train_test_split(
        trainval_x, trainval_y, test_size=args.calib_count,
        random_state=args.seed, stratify=trainval_y)
    print(f"splits: train={len(train_y)} calib={len(calib_y)} "
          f"test={len(test_y)}")

    model = DigitsNet()
    train(model, train_x, train_y, args.epochs, args.seed)

    with torch.no_grad():
        tx = torch.tensor(test_x, dtype=torch.float32).unsqueeze(1) / 255.0
        float_acc = float((model(tx).argmax(1).numpy() == test_y).mean())
    print(f"float test accuracy: {float_acc:.4f}")

    qp = QuantPipeline(model, calib_x)
    correct = sum(qp.predict(img) == int(lbl)
                  for img, lbl in zip(test_x, test_y))
    print(f"quantized test accuracy: {correct / len(test_y):.4f}")

    write_images(out / "digits_test_images.bin", test_x)
    write_labels(out / "digits_test_labels.bin", test_y)
    write_images(out / "digits_calib_images.bin", calib_x)
    write_labels(out / "digits_calib_labels.bin", calib_y)

    write_weights(out / "weights.bin", [
        ("conv1.weight", qp.w1),
        ("conv1.bias", qp.b1.astype(np.int32)),
        ("conv2.weight", qp.w2),
        ("conv2.bias", qp.b2.astype(np.int32)),
        ("fc.weight", qp.w3),
        ("fc.bias", qp.b3.astype(np.int32)),
    ])

    net = {
        "schema_version": 1,
        "weights_file": "weights.bin",
        "input": {"height": 8, "width": 8, "channels": 1, "bits": 8,
                  "scale": qp.in_scale},
        "layers": [
            {"type": "conv", "name": "conv1", "in_ch": 1, "out_ch": 8,
             "kernel": 3, "stride": 1, "pad": 1, "weight_scale": qp.s1,
             "weight_bits": 8, "weight": "conv1.weight",
             "bias": "conv1.bias"},
            {"type": "relu"},
            {"type": "quantize", "bits": 8, "scale": qp.q1},
            {"type": "maxpool", "size": 2, "stride": 2},
            {"type": "conv", "name": "conv2", "in_ch": 8, "out_ch": 16,
             "kernel": 3, "stride": 1, "pad": 1, "weight_scale": qp.s2,
             "weight_bits": 8, "weight": "conv2.weight",
             "bias": "conv2.bias"},
            {"type": "relu"},
            {"type": "quantize", "bits": 8, "scale": qp.q2},
            {"type": "maxpool", "size": 2, "stride": 2},
            {"type": "fc", "name": "fc", "in_features": 64,
             "out_features": 10, "weight_scale": qp.s3, "weight_bits": 8,
             "weight": "fc.weight", "bias": "fc.bias"},
        ],
    }
    with open(out / "net.json", "w") as f:
        json.dump(net, f, indent=2)
        f.write("\n")
    print(f"fixtures written to {out}/")


if __name__ == "__main__":
    main()
