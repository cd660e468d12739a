from __future__ import annotations

from .errors import NoConvergence


def newton_bisect(fun, dfun, a, b, fa=None, fb=None, xtol=1e-14, maxiter=100):
    """Safeguarded Newton iteration on a sign-change bracket ``[a, b]``.

    Newton steps that leave the current bracket, or fail to halve it fast
    enough, are replaced by bisection.
    """
    fa = fun(a) if fa is None else fa
    fb = fun(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError("root is not bracketed")
    # keep fun(lo) < 0 < fun(hi)
    lo, hi = (a, b) if fa < 0 else (b, a)
    x = 0.5 * (a + b)
    dx_old = abs(b - a)
    dx = dx_old
    fx = fun(x)
    dfx = dfun(x)
    for _ in range(maxiter):
        newton_ok = dfx != 0.0 and ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) < 0.0
        if not newton_ok or abs(2.0 * fx) > abs(dx_old * dfx):
            dx_old = dx
            dx = 0.5 * (hi - lo)
            x = lo + dx
        else:
            dx_old = dx
            dx = fx / dfx
            x = x - dx
        if abs(dx) <= xtol * max(1.0, abs(x)):
            return x
        fx = fun(x)
        if fx == 0.0:
            return x
        dfx = dfun(x)
        if fx < 0:
            lo = x
        else:
            hi = x
        if abs(hi - lo) <= 2.0 * xtol * max(1.0, abs(x)):
            return x
    raise NoConvergence(f"no convergence after {maxiter} iterations (bracket [{lo}, {hi}])")
