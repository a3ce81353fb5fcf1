#!/usr/bin/env python3
# Copyright 2026 The macer-desk Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the desk-scale MNIST subset in IDX format.

The source is the 5000-image MNIST extract shipped inside the mlxtend wheel
(mlxtend/data/data/mnist_5k.csv.gz, 500 images per digit). Rows are shuffled
with a fixed seed and split into disjoint train/test sets.
"""

import argparse
import glob
import gzip
import io
import os
import struct
import subprocess
import tempfile
import zipfile

import numpy as np

CSV_MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def load_rows(wheel):
    if wheel is None:
        tmp = tempfile.mkdtemp()
        subprocess.run(["pip", "download", "--no-deps", "mlxtend==0.24.0", "-d", tmp], check=True)
        wheel = glob.glob(os.path.join(tmp, "mlxtend-*.whl"))[0]
    raw = zipfile.ZipFile(wheel).read(CSV_MEMBER)
    rows = np.loadtxt(io.BytesIO(gzip.decompress(raw)), delimiter=",")
    return rows[:, :-1].astype(np.uint8), rows[:, -1].astype(np.uint8)


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, images.shape[0], 28, 28))
        f.write(images.tobytes())


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 0x00000801, labels.shape[0]))
        f.write(labels.tobytes())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--wheel", help="local mlxtend wheel; downloaded with pip when omitted")
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "mnist-subset"))
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--test", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20200101)
    args = ap.parse_args()

    images, labels = load_rows(args.wheel)
    order = np.random.RandomState(args.seed).permutation(images.shape[0])
    train = order[: args.train]
    test = order[args.train : args.train + args.test]
    os.makedirs(args.out, exist_ok=True)
    write_images(os.path.join(args.out, "train-images-idx3-ubyte"), images[train])
    write_labels(os.path.join(args.out, "train-labels-idx1-ubyte"), labels[train])
    write_images(os.path.join(args.out, "t10k-images-idx3-ubyte"), images[test])
    write_labels(os.path.join(args.out, "t10k-labels-idx1-ubyte"), labels[test])
    print("train label counts", np.bincount(labels[train], minlength=10))
    print("test label counts", np.bincount(labels[test], minlength=10))


if __name__ == "__main__":
    main()
