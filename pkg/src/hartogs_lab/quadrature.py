"""Adaptive Gauss-Legendre quadrature used as the independent radial oracle."""

import numpy as np

from .errors import ConvergenceError

_ORDER = 10
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


def _panel(f, a, b):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * np.dot(_WEIGHTS, f(mid + half * _NODES))


def adaptive_gauss(f, a, b, rtol=1e-12, max_evals=1_000_000):
    """Integrate a vectorized ``f`` over [a, b] by bisection on Gauss panels.

    A panel is accepted when its estimate agrees with the sum of its two
    halves to ``rtol`` times the running global magnitude. Returns
    ``(value, evaluations)``.
    """
    whole = _panel(f, a, b)
    evals = _ORDER
    scale = abs(whole)
    total = 0.0
    stack = [(a, b, whole)]
    while stack:
        lo, hi, est = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _panel(f, lo, mid), _panel(f, mid, hi)
        evals += 2 * _ORDER
        refined = left + right
        scale = max(scale, abs(refined))
        if abs(refined - est) <= rtol * scale or hi - lo < 1e-14 * max(1.0, abs(b - a)):
            total += refined
            continue
        if evals > max_evals:
            raise ConvergenceError("adaptive quadrature exceeded the evaluation budget")
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))
    return total, evals


def radial_moment_quad(a, b, n, rtol=1e-12):
    """2*pi * int_a^b r^(2n+1) dr."""
    val, _ = adaptive_gauss(lambda r: r ** (2 * n + 1), a, b, rtol=rtol)
    return 2.0 * np.pi * val


def distance_moment_quad(a, b, n, rtol=1e-12):
    """2*pi * int_a^b d(r)^2 r^(2n+1) dr with d(r) = min(r - a, b - r)."""
    c = 0.5 * (a + b)
    left, _ = adaptive_gauss(lambda r: (r - a) ** 2 * r ** (2 * n + 1), a, c, rtol=rtol)
    right, _ = adaptive_gauss(lambda r: (b - r) ** 2 * r ** (2 * n + 1), c, b, rtol=rtol)
    return 2.0 * np.pi * (left + right)
