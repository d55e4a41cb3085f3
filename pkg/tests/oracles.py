"""Independent reference computations used to freeze golden values.

These deliberately avoid the package code: the well is rebuilt from its
defining matching conditions and integrals use composite Gauss-Legendre.
"""

import numpy as np


def bridge_coefficients(beta, a):
    # b(s) = c0 + c2 s^4 + c3 s^6 matched to (1 - s)^beta to second order at 1 - a
    s0 = 1.0 - a
    rows = np.array(
        [
            [1.0, s0**4, s0**6],
            [0.0, 4 * s0**3, 6 * s0**5],
            [0.0, 12 * s0**2, 30 * s0**4],
        ]
    )
    rhs = np.array([a**beta, -beta * a ** (beta - 1), beta * (beta - 1) * a ** (beta - 2)])
    return np.linalg.solve(rows, rhs)


def well_from_distance(beta, a, d):
    """W at s = 1 - d for d in [0, 1]."""
    c = bridge_coefficients(beta, a)
    s = 1.0 - d
    return np.where(d <= a, d**beta, c[0] + c[1] * s**4 + c[2] * s**6)


def composite_gl(f, lo, hi, panels=10_000, order=8):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    nodes = mid + half * x[None, :]
    return float(np.sum(half * w[None, :] * f(nodes)))


def c_w_oracle(beta=1.5, a=0.5):
    # 4 * int_0^1 sqrt(W), panels aligned with the seam
    s0 = 1.0 - a
    f = lambda s: np.sqrt(well_from_distance(beta, a, 1.0 - s))
    return 4.0 * (composite_gl(f, 0.0, s0) + composite_gl(f, s0, 1.0))


def tau_w_oracle(beta=1.5, a=0.5):
    s0 = 1.0 - a
    bridge = composite_gl(lambda s: 1.0 / np.sqrt(well_from_distance(beta, a, 1.0 - s)), 0.0, s0)
    # window in u with 1 - s = u**k
    k = 2.0 / (2.0 - beta)
    g = lambda u: k * u ** (k - 1) / np.sqrt(well_from_distance(beta, a, u**k))
    window = composite_gl(g, 0.0, a ** (1.0 / k))
    return bridge + window


if __name__ == "__main__":
    print(repr(c_w_oracle()), repr(tau_w_oracle()))
