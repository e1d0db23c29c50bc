"""Fused elementwise passes for the descent hot loop.

Single-pass implementations of the residual assembly, the adjoint assembly
and the step proposal, compiled with numba when available (pure-numpy
fallbacks otherwise, same arithmetic).  The stencils use homogeneous
Dirichlet padding, matching grid_ops.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by every solve
    import numba

    _njit = numba.njit(cache=True, fastmath=False)
    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    def _njit(f):
        return f

    HAVE_NUMBA = False


@_njit
def residual_core(eta, k_eta, dx, c2, out_res, out_deta):
    """Assemble J(eta) given K eta; returns dx * ||J||^2.

    Also stores the centered first difference of eta in ``out_deta`` for
    reuse by the adjoint pass.
    """
    n = eta.shape[0]
    inv2 = 1.0 / (2.0 * dx)
    invdx2 = 1.0 / (dx * dx)
    acc = 0.0
    for k in range(n):
        vm = eta[k - 1] if k > 0 else 0.0
        vp = eta[k + 1] if k < n - 1 else 0.0
        d = (vp - vm) * inv2
        a = (vp - 2.0 * eta[k] + vm) * invdx2
        om = 1.0 - eta[k]
        r = (
            a
            - 2.0 * k_eta[k]
            + c2 * eta[k]
            + (c2 * eta[k] * eta[k] + d * d) / (2.0 * om)
            + 2.0 * k_eta[k] * eta[k]
        )
        out_res[k] = r
        out_deta[k] = d
        acc += r * r
    return dx * acc


@_njit
def adjoint_core(v, kw1, eta, d_eta, k_eta, dx, c2, scale, out):
    """out = scale * [A v + (c^2 + coef + 2 K eta).v - 2 K((1-eta)v) - D(q v)]

    with q = D eta / (1-eta) and coef the rational Jacobian coefficient;
    ``kw1`` must hold K((1-eta)v).  This is [dJ]^T v (times scale), the two
    convolution terms -2Kv + 2K(eta v) having been fused by linearity.
    """
    n = v.shape[0]
    inv2 = 1.0 / (2.0 * dx)
    invdx2 = 1.0 / (dx * dx)
    for k in range(n):
        vm = v[k - 1] if k > 0 else 0.0
        vp = v[k + 1] if k < n - 1 else 0.0
        a = (vp - 2.0 * v[k] + vm) * invdx2
        if k > 0:
            qv_m = d_eta[k - 1] / (1.0 - eta[k - 1]) * v[k - 1]
        else:
            qv_m = 0.0
        if k < n - 1:
            qv_p = d_eta[k + 1] / (1.0 - eta[k + 1]) * v[k + 1]
        else:
            qv_p = 0.0
        om = 1.0 - eta[k]
        coef = (2.0 * c2 * eta[k] * (1.0 - 0.5 * eta[k]) + d_eta[k] * d_eta[k]) / (
            2.0 * om * om
        )
        out[k] = scale * (
            a
            + (c2 + coef + 2.0 * k_eta[k]) * v[k]
            - 2.0 * kw1[k]
            - (qv_p - qv_m) * inv2
        )
    return out


@_njit
def propose_core(eta, g, k_eta, kg, h, out_eta, out_k):
    """eta - h g and K eta - h K g in one pass; returns max(out_eta)."""
    n = eta.shape[0]
    m = -np.inf
    for k in range(n):
        e = eta[k] - h * g[k]
        out_eta[k] = e
        out_k[k] = k_eta[k] - h * kg[k]
        if e > m:
            m = e
    return m


if not HAVE_NUMBA:  # pragma: no cover - numpy fallbacks
    def residual_core(eta, k_eta, dx, c2, out_res, out_deta):  # noqa: F811
        inv2 = 1.0 / (2.0 * dx)
        invdx2 = 1.0 / (dx * dx)
        n = eta.shape[0]
        out_deta[0] = eta[1] * inv2
        out_deta[1:-1] = (eta[2:] - eta[:-2]) * inv2
        out_deta[-1] = -eta[-2] * inv2
        out_res[0] = (eta[1] - 2.0 * eta[0]) * invdx2
        out_res[1:-1] = (eta[2:] - 2.0 * eta[1:-1] + eta[:-2]) * invdx2
        out_res[-1] = (eta[-2] - 2.0 * eta[-1]) * invdx2
        om = 1.0 - eta
        out_res += (
            -2.0 * k_eta
            + c2 * eta
            + (c2 * eta * eta + out_deta * out_deta) / (2.0 * om)
            + 2.0 * k_eta * eta
        )
        return dx * float(out_res @ out_res)

    def adjoint_core(v, kw1, eta, d_eta, k_eta, dx, c2, scale, out):  # noqa: F811
        inv2 = 1.0 / (2.0 * dx)
        invdx2 = 1.0 / (dx * dx)
        om = 1.0 - eta
        qv = (d_eta / om) * v
        out[0] = (v[1] - 2.0 * v[0]) * invdx2 - qv[1] * inv2
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) * invdx2 - (qv[2:] - qv[:-2]) * inv2
        out[-1] = (v[-2] - 2.0 * v[-1]) * invdx2 + qv[-2] * inv2
        coef = (2.0 * c2 * eta * (1.0 - 0.5 * eta) + d_eta * d_eta) / (2.0 * om * om)
        out += (c2 + coef + 2.0 * k_eta) * v - 2.0 * kw1
        out *= scale
        return out

    def propose_core(eta, g, k_eta, kg, h, out_eta, out_k):  # noqa: F811
        np.subtract(eta, h * g, out=out_eta)
        np.subtract(k_eta, h * kg, out=out_k)
        return float(np.max(out_eta))
