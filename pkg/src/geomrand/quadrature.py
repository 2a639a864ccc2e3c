"""Adaptive Simpson quadrature."""

from __future__ import annotations

from typing import Callable


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-8,
    max_depth: int = 50,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Recursive bisection with Richardson correction; the interval tolerance
    is halved at each split. Reversed limits give the negated integral.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # explicit stack instead of recursion; entries are (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, max_depth)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            stack.append((m, b, fm, frm, fb, right, 0.5 * eps, depth - 1))
            stack.append((a, m, fa, flm, fm, left, 0.5 * eps, depth - 1))
    return total
