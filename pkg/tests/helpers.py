"""Shared test utilities.

The golden-section minimizer here is deliberately hand-rolled and
independent of the library so that proximal-map checks compare two
unrelated routes to the same minimizer. The search objective is
evaluated in extended precision: on float64 a quadratic minimum can
only be located to ~sqrt(eps) ~ 1e-8, exactly the tolerance we need
to certify, so the oracle needs headroom below it.
"""

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn, lo, hi, tol=1e-12, max_iter=300):
    """Minimize a unimodal scalar function on [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def prox_by_search(reg, x, eta):
    """Coordinatewise prox via golden-section search.

    Valid for separable regularizers (zero, l1, box): the prox
    objective 0.5*(u - x_i)^2/eta + r(u) is strictly convex per
    coordinate. The penalty is written out analytically from its
    definition rather than routed through the library.
    """
    x = np.asarray(x, dtype=float)
    eta_l = np.longdouble(eta)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        xi_l = np.longdouble(xi)
        if reg.kind == "box":
            # indicator contributes nothing inside the domain
            def phi(u, xi_l=xi_l):
                return 0.5 * (u - xi_l) ** 2 / eta_l

            lo, hi = np.longdouble(reg.lo), np.longdouble(reg.hi)
            out[i] = float(golden_section(phi, lo, hi, tol=1e-14))
        elif reg.kind == "l1":
            lam_l = np.longdouble(reg.lam)

            def phi(u, xi_l=xi_l, lam_l=lam_l):
                return 0.5 * (u - xi_l) ** 2 / eta_l + lam_l * abs(u)

            w = abs(xi_l) + 5.0 * lam_l * eta_l + 1.0
            out[i] = float(golden_section(phi, xi_l - w, xi_l + w, tol=1e-14))
        else:

            def phi(u, xi_l=xi_l):
                return 0.5 * (u - xi_l) ** 2 / eta_l

            w = abs(xi_l) + 1.0
            out[i] = float(golden_section(phi, xi_l - w, xi_l + w, tol=1e-14))
    return out


def manual_gd(problem, grad_fn, x0, eta, steps):
    """Plain gradient descent trajectory used as a reduction reference."""
    x = np.asarray(x0, dtype=float).copy()
    xs = [x.copy()]
    for _ in range(steps):
        x = x - eta * grad_fn(problem, x)
        xs.append(x.copy())
    return xs
