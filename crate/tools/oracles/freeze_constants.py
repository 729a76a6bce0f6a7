#!/usr/bin/env python3
"""High-precision oracle for frozen test constants.

Evaluates, with mpmath at 40 significant digits, the closed-form quantities the
Rust unit tests pin down: kernel values, information distances, whole-matrix
normalization, and the 4-node-chain integrated diffusion distances at t=2.
Rust asserts agreement within 1e-12.
"""

from mpmath import mp, mpf, exp, log, sqrt

mp.dps = 40
EPS = mpf("1e-7")


def kernel(d, si, sj, alpha):
    d, si, sj, alpha = map(mpf, (d, si, sj, alpha))
    return exp(-((d / si) ** alpha)) / 2 + exp(-((d / sj) ** alpha)) / 2


def hellinger(p, q):
    return sqrt(sum((sqrt(a) - sqrt(b)) ** 2 for a, b in zip(p, q))) / sqrt(2)


def kl_sym(p, q):
    # epsilon enters the logarithms only
    return sum((a - b) * (log(a + EPS) - log(b + EPS)) for a, b in zip(p, q))


def potential(p, q):
    return sqrt(sum((log(a + EPS) - log(b + EPS)) ** 2 for a, b in zip(p, q)))


def show(name, v):
    print(f"{name} = {mp.nstr(v, 25)}")


print("# kernel")
show("kernel(d=2, si=1, sj=2, a=2)", kernel(2, 1, 2, 2))
show("kernel(d=1, si=1, sj=1, a=2)", kernel(1, 1, 1, 2))

print("\n# three equally spaced collinear points, k=2, alpha=2")
# raw distances {1, 2} normalize to {0.5, 1}; sigma_2 = (1, 0.5, 1)
show("K(0,1) = K(1,2)", kernel(mpf("0.5"), 1, mpf("0.5"), 2))
show("K(0,2)", kernel(1, 1, 1, 2))

print("\n# information distances")
show("hellinger((.5,.5),(.9,.1))", hellinger([mpf("0.5")] * 2, [mpf("0.9"), mpf("0.1")]))
show("kl_sym((.5,.5),(.75,.25))", kl_sym([mpf("0.5")] * 2, [mpf("0.75"), mpf("0.25")]))
show("potential((.6,.4),(.4,.6))", potential([mpf("0.6"), mpf("0.4")], [mpf("0.4"), mpf("0.6")]))

print("\n# whole-matrix 0-1 normalization of [[1,3],[5,7]]")
lo, hi = mpf(1), mpf(7)
print([[mp.nstr((mpf(v) - lo) / (hi - lo), 25) for v in row] for row in [[1, 3], [5, 7]]])

print("\n# 4-node chain: W tridiagonal(0.5) + unit diagonal, P = row-normalized,")
print("# D2 = 0-1 normalized Hellinger distances between rows of P^2")
W = [[mpf(0)] * 4 for _ in range(4)]
for i in range(4):
    W[i][i] = mpf(1)
for i in range(3):
    W[i][i + 1] = W[i + 1][i] = mpf("0.5")
P = [[W[i][j] / sum(W[i]) for j in range(4)] for i in range(4)]
P2 = [[sum(P[i][k] * P[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
H = [[hellinger(P2[i], P2[j]) for j in range(4)] for i in range(4)]
hi = max(max(row) for row in H)
D2 = [[h / hi for h in row] for row in H]
for i in range(4):
    for j in range(i + 1, 4):
        show(f"D2[{i}][{j}]", D2[i][j])
