"""Airy function Ai and its derivative without a special-function library.

For |x| <= 12 the Maclaurin series is summed in extended decimal precision, which
removes the cancellation that plain double arithmetic suffers for large |x|.
Beyond that, the standard large-argument expansions are accurate to well below
1e-15 in absolute terms.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext

import numpy as np

_AI0 = Decimal("0.355028053887817239260063186004183176397979174199177240583327")
_AIP0 = Decimal("-0.258819403792806798405183560189203963479091138354934582210002")
_SERIES_LIMIT = 12.0
_PREC = 60


def _series(x: float) -> tuple[float, float]:
    if x == 0.0:
        return float(_AI0), float(_AIP0)
    with localcontext() as ctx:
        ctx.prec = _PREC
        X = Decimal(repr(x))
        x3 = X * X * X
        # f = sum 3^k (1/3)_k x^{3k}/(3k)!,  g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
        f_term = Decimal(1)
        g_term = X
        f = f_term
        g = g_term
        fp = Decimal(0)
        gp = Decimal(1)
        tiny = Decimal(10) ** (-_PREC + 5)
        k = 0
        while True:
            k += 1
            f_term = f_term * x3 / ((3 * k - 1) * (3 * k))
            g_term = g_term * x3 / ((3 * k) * (3 * k + 1))
            f += f_term
            g += g_term
            # derivatives term by term: d/dx x^{3k} = 3k x^{3k-1}
            fp += f_term * (3 * k) / X
            gp += g_term * (3 * k + 1) / X
            if abs(f_term) + abs(g_term) < tiny and k > 3:
                break
        ai = _AI0 * f + _AIP0 * g
        aip = _AI0 * fp + _AIP0 * gp
        return float(ai), float(aip)


def _asym_coeffs(n: int) -> tuple[list[float], list[float]]:
    u = [1.0]
    v = [1.0]
    for k in range(1, n):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)
    return u, v


_U, _V = _asym_coeffs(30)


def _asymptotic(x: float) -> tuple[float, float]:
    if x > 0:
        zeta = 2.0 / 3.0 * x**1.5
        su = sv = 0.0
        zp = 1.0
        for k in range(len(_U)):
            tu = (-1) ** k * _U[k] / zp
            tv = (-1) ** k * _V[k] / zp
            if abs(tu) < 1e-18 and k > 2:
                break
            su += tu
            sv += tv
            zp *= zeta
        pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return pref * su / x**0.25, -pref * x**0.25 * sv
    z = -x
    zeta = 2.0 / 3.0 * z**1.5
    # even/odd split of the oscillatory expansion
    ce = so = cv = sv_ = 0.0
    for k in range(len(_U) // 2):
        sign = (-1) ** k
        ce += sign * _U[2 * k] / zeta ** (2 * k)
        so += sign * _U[2 * k + 1] / zeta ** (2 * k + 1)
        cv += sign * _V[2 * k] / zeta ** (2 * k)
        sv_ += sign * _V[2 * k + 1] / zeta ** (2 * k + 1)
        if _U[2 * k + 1] / zeta ** (2 * k + 1) < 1e-18:
            break
    phase = zeta - math.pi / 4
    c, s = math.cos(phase), math.sin(phase)
    ai = (c * ce + s * so) / (math.sqrt(math.pi) * z**0.25)
    aip = z**0.25 * (s * cv - c * sv_) / math.sqrt(math.pi)
    return ai, aip


def airy_scalar(x: float) -> tuple[float, float]:
    x = float(x)
    if abs(x) <= _SERIES_LIMIT:
        return _series(x)
    return _asymptotic(x)


def airy_ai(x) -> tuple[np.ndarray, np.ndarray]:
    """Return (Ai(x), Ai'(x)) elementwise."""
    arr = np.asarray(x, dtype=float)
    flat = arr.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    for i, v in enumerate(flat):
        ai[i], aip[i] = airy_scalar(v)
    return ai.reshape(arr.shape), aip.reshape(arr.shape)
