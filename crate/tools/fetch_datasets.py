#!/usr/bin/env python3
"""Fetch the two UCI datasets that are not redistributed in this repository.

Requires plain HTTPS access to archive.ics.uci.edu. Produces:
  data/seeds.csv                  (210 rows x 7 features, class in {kama, rosa, canadian})
  data/breast_cancer_original.csv (699 rows x 9 features, class in {benign, malignant};
                                   missing cells left empty, the loader drops those rows)

Run from anywhere: paths are resolved relative to this file.
"""

import os
import urllib.request

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")

SEEDS_URL = "https://archive.ics.uci.edu/ml/machine-learning-databases/00236/seeds_dataset.txt"
BC_URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/"
    "breast-cancer-wisconsin/breast-cancer-wisconsin.data"
)

SEEDS_FEATURES = [
    "area",
    "perimeter",
    "compactness",
    "kernel_length",
    "kernel_width",
    "asymmetry",
    "groove_length",
]
SEEDS_CLASSES = {"1": "kama", "2": "rosa", "3": "canadian"}

BC_FEATURES = [
    "clump_thickness",
    "uniformity_cell_size",
    "uniformity_cell_shape",
    "marginal_adhesion",
    "single_epithelial_cell_size",
    "bare_nuclei",
    "bland_chromatin",
    "normal_nucleoli",
    "mitoses",
]
BC_CLASSES = {"2": "benign", "4": "malignant"}


def fetch(url):
    print(f"fetching {url}")
    with urllib.request.urlopen(url) as r:
        return r.read().decode("utf-8")


def seeds():
    raw = fetch(SEEDS_URL)
    path = os.path.join(OUT, "seeds.csv")
    n = 0
    with open(path, "w", newline="") as f:
        f.write(",".join(SEEDS_FEATURES + ["class"]) + "\n")
        for line in raw.splitlines():
            cells = line.split()  # tab-separated, some rows with doubled tabs
            if not cells:
                continue
            assert len(cells) == 8, f"unexpected row: {line!r}"
            f.write(",".join(cells[:7] + [SEEDS_CLASSES[cells[7]]]) + "\n")
            n += 1
    print(f"wrote {path}: {n} rows")
    assert n == 210, f"expected 210 rows, got {n}"


def breast_cancer():
    raw = fetch(BC_URL)
    path = os.path.join(OUT, "breast_cancer_original.csv")
    n = 0
    with open(path, "w", newline="") as f:
        f.write(",".join(BC_FEATURES + ["class"]) + "\n")
        for line in raw.splitlines():
            if not line.strip():
                continue
            cells = line.split(",")
            assert len(cells) == 11, f"unexpected row: {line!r}"
            # drop the sample-id column; '?' marks a missing measurement
            feats = ["" if c == "?" else c for c in cells[1:10]]
            f.write(",".join(feats + [BC_CLASSES[cells[10]]]) + "\n")
            n += 1
    print(f"wrote {path}: {n} rows")
    assert n == 699, f"expected 699 rows, got {n}"


def main():
    os.makedirs(OUT, exist_ok=True)
    seeds()
    breast_cancer()


if __name__ == "__main__":
    main()
