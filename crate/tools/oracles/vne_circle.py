#!/usr/bin/env python3
"""Independent time-scale-selection oracle.

Re-implements, in numpy, the full front pipeline on a deterministic 30-point
noisy circle: pairwise distances -> whole-matrix 0-1 normalization -> directed
5-NN lists -> adaptive bandwidths -> alpha-decaying kernel on the symmetrized
edge set -> row-normalized operator -> Von Neumann entropy curve of the
symmetric conjugate's spectrum -> knee via the discrete second difference.

Prints the frozen coordinate literals consumed by the Rust test plus the
selected t and several curve samples. The Rust implementation must select the
same t and match the sampled values within 1e-9.
"""

import numpy as np

K, ALPHA, T_MAX = 5, 2.0, 100


def circle_points():
    pts = []
    for i in range(30):
        th = 2.0 * np.pi * i / 30.0
        r = 1.0 + 0.1 * np.sin(7.0 * th + 0.5)
        pts.append((round(r * np.cos(th), 12), round(r * np.sin(th), 12)))
    return np.asarray(pts)


def pipeline(x):
    n = len(x)
    d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
    d = d / d.max()  # whole-matrix 0-1 normalization; min is 0 on the diagonal

    order = np.argsort(d, axis=1, kind="stable")  # ties by lower index
    nbrs = [[j for j in order[i] if j != i][:K] for i in range(n)]
    sigma = np.array([d[i, nbrs[i][-1]] for i in range(n)])

    w = np.zeros((n, n))
    for i in range(n):
        for j in nbrs[i]:
            v = 0.5 * np.exp(-((d[i, j] / sigma[i]) ** ALPHA)) + 0.5 * np.exp(
                -((d[i, j] / sigma[j]) ** ALPHA)
            )
            w[i, j] = max(w[i, j], v)
    w = np.maximum(w, w.T)  # union symmetrization
    np.fill_diagonal(w, 1.0)

    deg = w.sum(1)
    conj = w / np.sqrt(np.outer(deg, deg))  # D^{-1/2} W D^{-1/2}
    lam = np.linalg.eigvalsh(conj)
    lam = lam[lam >= 0.0]

    h = np.empty(T_MAX + 1)
    for t in range(1, T_MAX + 1):
        p = lam**t
        eta = p / p.sum()
        eta = eta[eta > 0.0]
        h[t] = -(eta * np.log(eta)).sum()
    return w, h


def knee(h):
    best_t, best = 1, -np.inf
    for t in range(2, T_MAX):
        d2 = h[t + 1] - 2.0 * h[t] + h[t - 1]
        if d2 > best:
            best, best_t = d2, t
    if abs(best) <= 1e-12:
        return 1
    return best_t


def main():
    x = circle_points()
    print("// frozen 30-point noisy circle, 12-decimal literals")
    for p in x:
        print(f"    [{p[0]:.12f}, {p[1]:.12f}],")
    w, h = pipeline(x)
    print(f"w[0][1]  = {w[0, 1]:.15f}")
    print(f"w[0][29] = {w[0, 29]:.15f}")
    print(f"deg[0]   = {w.sum(1)[0]:.15f}")
    for t in (1, 2, 5, 10, 50):
        print(f"H({t})  = {h[t]:.15f}")
    print(f"selected t = {knee(h)}")


if __name__ == "__main__":
    main()
