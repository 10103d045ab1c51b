#!/usr/bin/env python3
"""Build a small MNIST subset in IDX format from the digit dumps of the npm `mnist` package.

Usage: make_mnist_fixture.py <package-dir> <out-dir> [--train N] [--test N]

Digits are interleaved 0..9 so every prefix of the files is class balanced.
The first images of each class go to the training file, the next ones to the test file.
"""
import argparse
import json
import pathlib
import struct

SIDE = 28


def load_digits(package: pathlib.Path):
    digits = []
    for d in range(10):
        raw = json.loads((package / "src" / "digits" / f"{d}.json").read_text())["data"]
        n = len(raw) // (SIDE * SIDE)
        digits.append([raw[k * SIDE * SIDE:(k + 1) * SIDE * SIDE] for k in range(n)])
    return digits


def write_idx(path: pathlib.Path, dims, payload: bytes):
    header = struct.pack(">I", 0x0800 | len(dims)) + b"".join(struct.pack(">I", d) for d in dims)
    path.write_bytes(header + payload)


def to_bytes(image):
    return bytes(min(255, max(0, round(v * 255))) for v in image)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("package", type=pathlib.Path)
    ap.add_argument("out", type=pathlib.Path)
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--test", type=int, default=100)
    args = ap.parse_args()

    digits = load_digits(args.package)
    if args.train % 10 or args.test % 10:
        ap.error("--train and --test must be multiples of 10")
    per_train, per_test = args.train // 10, args.test // 10
    if any(len(d) < per_train + per_test for d in digits):
        ap.error("not enough samples per digit")

    def split(offset, per_class):
        images, labels = [], []
        for k in range(per_class):
            for d in range(10):
                images.append(to_bytes(digits[d][offset + k]))
                labels.append(d)
        return images, labels

    args.out.mkdir(parents=True, exist_ok=True)
    for prefix, (images, labels) in (("train", split(0, per_train)), ("t10k", split(per_train, per_test))):
        write_idx(args.out / f"{prefix}-images-idx3-ubyte", (len(images), SIDE, SIDE), b"".join(images))
        write_idx(args.out / f"{prefix}-labels-idx1-ubyte", (len(labels),), bytes(labels))
        print(f"{prefix}: {len(images)} images")


if __name__ == "__main__":
    main()
