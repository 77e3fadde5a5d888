"""Closed-form references shared by several test modules."""
import math
from math import comb


def j_antiderivative(tau, ups, n, delta):
    """int_0^tau (c_delta + ups*s_delta)^(n-1) via binomial expansion."""
    m = n - 1
    if delta == 0:
        if ups == 0:
            return tau
        return ((1 + ups * tau) ** n - 1) / (n * ups)
    # cosh + (ups/d) sinh = A e^{d t} + B e^{-d t}
    A = (1 + ups / delta) / 2
    B = (1 - ups / delta) / 2
    total = 0.0
    for j in range(m + 1):
        c = comb(m, j) * A ** j * B ** (m - j)
        rate = (2 * j - m) * delta
        total += c * (tau if rate == 0 else math.expm1(rate * tau) / rate)
    return total
