#!/usr/bin/env python3
"""Regenerate the bundled datasets under data/.

Every output is deterministic: subsampling and the synthetic tree use fixed
numpy Generator seeds. Rerunning this script must reproduce the committed
files byte for byte.
"""

import os

import numpy as np
from sklearn import datasets

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def write_csv(path, feature_names, rows, labels):
    with open(path, "w", newline="") as f:
        f.write(",".join(list(feature_names) + ["class"]) + "\n")
        for row, label in zip(rows, labels):
            cells = [repr(float(v)) for v in row] + [str(label)]
            f.write(",".join(cells) + "\n")
    print(f"wrote {path}: {len(rows)} rows x {len(feature_names)} features")


def stratified_subsample(values, targets, per_total, seed):
    """Deterministic stratified subsample of about per_total rows."""
    rng = np.random.default_rng(seed)
    classes = np.unique(targets)
    quota = per_total // len(classes)
    keep = []
    for c in classes:
        idx = np.flatnonzero(targets == c)
        take = min(quota, len(idx))
        keep.extend(rng.choice(idx, size=take, replace=False))
    keep = np.sort(np.asarray(keep))
    return values[keep], targets[keep]


def clean(name):
    return name.strip().replace(" (cm)", "").replace(" ", "_").replace("/", "_")


def iris():
    d = datasets.load_iris()
    names = [clean(n) for n in d.feature_names]
    labels = [d.target_names[t] for t in d.target]
    write_csv(os.path.join(OUT, "iris.csv"), names, d.data, labels)


def wine():
    d = datasets.load_wine()
    names = [clean(n) for n in d.feature_names]
    labels = [d.target_names[t] for t in d.target]
    write_csv(os.path.join(OUT, "wine.csv"), names, d.data, labels)


def wdbc():
    d = datasets.load_breast_cancer()
    values, targets = stratified_subsample(d.data, d.target, 200, seed=11)
    names = [clean(n) for n in d.feature_names]
    labels = [d.target_names[t] for t in targets]
    write_csv(os.path.join(OUT, "wdbc.csv"), names, values, labels)


def digits():
    d = datasets.load_digits()
    values, targets = stratified_subsample(d.data, d.target, 200, seed=13)
    names = [f"pixel_{i // 8}_{i % 8}" for i in range(64)]
    write_csv(os.path.join(OUT, "digits.csv"), names, values, targets)


def artificial_tree():
    """Branching manifold: 5 connected line segments in 20 dimensions.

    Each branch starts where its parent ends, walks in a fresh random
    direction, and carries light Gaussian noise. Labels are branch ids.
    """
    rng = np.random.default_rng(7)
    dims, per_branch, n_branches = 20, 40, 5
    points, labels = [], []
    # branch i forks from the end of branches[parent[i]]
    parents = [None, 0, 0, 1, 2]
    ends = []
    for b in range(n_branches):
        start = np.zeros(dims) if parents[b] is None else ends[parents[b]]
        direction = rng.standard_normal(dims)
        direction /= np.linalg.norm(direction)
        ts = np.linspace(0.0, 1.0, per_branch, endpoint=False) + 1.0 / per_branch
        for t in ts:
            points.append(start + t * direction + 0.01 * rng.standard_normal(dims))
        ends.append(start + direction)
        labels.extend([f"branch_{b}"] * per_branch)
    names = [f"dim_{i}" for i in range(dims)]
    write_csv(os.path.join(OUT, "artificial_tree.csv"), names, np.asarray(points), labels)


def main():
    os.makedirs(OUT, exist_ok=True)
    iris()
    wine()
    wdbc()
    digits()
    artificial_tree()


if __name__ == "__main__":
    main()
