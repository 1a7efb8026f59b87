"""Quantum vertical and horizontal integrals on the derivative space.

Fiber vectors are coefficient columns over f_{0,k}, f_{1,k}, ...; each
operator below takes the fiber index ``k`` and such a column.  The
integrals return the compression of the (infinite) result to a window of
size ``window`` (default: the window of the input), computed exactly: the
vertical recursion only ever moves mass to larger row and column indices,
so discarding what leaves the window drops nothing that could come back.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import ModelConstants, PodlesElement
from .dirac import DerivativeElement, deriv_norm


# -- fiber operators --------------------------------------------------------


def shift_vertical(v: np.ndarray) -> np.ndarray:
    """S^V: f_{n,k} -> f_{n+1,k}; the last row falls off the buffer."""
    out = np.zeros_like(v)
    out[1:] = v[:-1]
    return out


def shift_horizontal(v: np.ndarray) -> np.ndarray:
    """S^H: Y_k -> Y_{k+1}, f_{n,k} -> f_{n+1,k+1} (same column shape as S^V)."""
    return shift_vertical(v)


def shift_horizontal_adj(v: np.ndarray) -> np.ndarray:
    """(S^H)*: Y_k -> Y_{k-1}, f_{n,k} -> f_{n-1,k-1}, f_{0,k} -> 0."""
    out = np.zeros_like(v)
    out[:-1] = v[1:]
    return out


def gamma_diag(q: float, k: int, rows: int) -> np.ndarray:
    n = np.arange(rows)
    d = np.zeros(rows)
    m = n >= k + 1
    nm = n[m].astype(float)
    d[m] = q ** (nm - k - 1) * np.sqrt((1 - q ** (2.0 * (k + 1))) / (1 - q ** (2 * nm)))
    return d


def delta_diag(q: float, k: int, rows: int) -> np.ndarray:
    n = np.arange(rows)
    d = np.zeros(rows)
    if k < 1:
        return d
    m = (n > 0) & (n <= k)
    nm = n[m].astype(float)
    d[m] = q ** (k - nm + 1) * np.sqrt((1 - q ** (2 * (nm - 1))) / (1 - q ** (2.0 * k)))
    return d


def projection_diag(k: int, rows: int) -> np.ndarray:
    return (np.arange(rows) <= k).astype(float)


def outer_weight(q: float, m: int) -> float:
    """q^m (1 - q^2) (1 - q^(2(m+1)))^(-1/2)."""
    return q ** m * (1 - q * q) / np.sqrt(1 - q ** (2 * (m + 1)))


# -- integrals --------------------------------------------------------------


def column_extract(xi: DerivativeElement, l: int, rows: int | None = None) -> np.ndarray:
    """Coefficients of xi·chi_{q^{2l}}(A)·b^2·q^(-2l) in the fiber Y_l.

    (b*)^2 b^2 = A^2 and f_{n,l} A = q^(2l) f_{n,l}, so this is column l of
    the derivative scaled by q^(2l).
    """
    const = xi.constants
    if not 0 <= l <= const.N + 1:
        raise IndexError(f"column {l} outside 0..{const.N + 1}")
    rows = const.size if rows is None else rows
    out = np.zeros(rows, dtype=complex)
    m = min(rows, const.size)
    out[:m] = xi.c[:m, l] * const.q ** (2 * l)
    return out


def _target(xi: DerivativeElement, window: int | None) -> ModelConstants:
    return xi.constants if window is None else xi.constants.with_N(window)


def integral_vertical(xi: DerivativeElement, window: int | None = None) -> PodlesElement:
    const = _target(xi, window)
    q, size = const.q, const.size
    ncols = xi.constants.N + 2
    lam = np.zeros((size, size), dtype=complex)
    # acc_m = sum_{l<=m} (S^H Gamma)^(m-l) S^V col_l, living in Y_m
    acc = np.zeros(size, dtype=complex)
    for m in range(size):
        if m < ncols:
            acc = acc + shift_vertical(column_extract(xi, m, size))
        if not np.any(acc):
            continue
        g = gamma_diag(q, m, size) * acc
        lam[:, m] = -outer_weight(q, m) * g
        acc = shift_horizontal(g)
    return PodlesElement(0.0, lam, const)


def integral_horizontal(xi: DerivativeElement, window: int | None = None) -> PodlesElement:
    const = _target(xi, window)
    q, size = const.q, const.size
    top = xi.constants.N + 1
    rows = max(size, xi.constants.size) + 1
    lam = np.zeros((size, size), dtype=complex)
    # acc_l = sum_{l' >= l} ((S^H)* Delta)^(l'-l) P S^V col_l', living in Y_l
    acc = np.zeros(rows, dtype=complex)
    for l in range(top, 0, -1):
        if l < top:
            acc = shift_horizontal_adj(delta_diag(q, l + 1, rows) * acc)
        acc = acc + projection_diag(l, rows) * shift_vertical(column_extract(xi, l, rows))
        m = l - 1
        if m < size:
            lam[:, m] = outer_weight(q, m) * shift_horizontal_adj(acc)[:size]
    return PodlesElement(0.0, lam, const)


def integral_total(xi: DerivativeElement, window: int | None = None) -> PodlesElement:
    return integral_vertical(xi, window) + integral_horizontal(xi, window)


# -- continuity estimates ---------------------------------------------------


class TailCheck(NamedTuple):
    k: int
    total: float
    vertical: float
    horizontal: float
    bound_total: float
    bound_vertical: float
    bound_horizontal: float

    @property
    def ok(self) -> bool:
        return (self.total <= self.bound_total + 1e-12
                and self.vertical <= self.bound_vertical + 1e-12
                and self.horizontal <= self.bound_horizontal + 1e-12)


def _tail_norm(x: PodlesElement, k: int) -> float:
    block = x.lam[:, k:]
    return float(np.linalg.norm(block, 2)) if block.size and np.any(block) else 0.0


def tail_column_bound(xi: DerivativeElement, k: int, window: int | None = None) -> TailCheck:
    """||(int xi)·chi_[0,q^2k](A)|| against q^k (k+2) (1-q)^-2 ||xi||.

    The vertical and horizontal pieces are checked against q^k (k+1)(1-q)^-2
    and q^k (1-q)^-2.  The left sides are norms of compressions, hence lower
    bounds of the exact quantities.
    """
    const = xi.constants
    if not 0 <= k <= const.N:
        raise IndexError(f"k = {k} outside 0..{const.N}")
    W = 2 * (const.N + 1) if window is None else window
    q = const.q
    nrm = deriv_norm(xi)
    v = integral_vertical(xi, W)
    h = integral_horizontal(xi, W)
    scale = q ** k * nrm / (1 - q) ** 2
    return TailCheck(
        k,
        _tail_norm(v + h, k),
        _tail_norm(v, k),
        _tail_norm(h, k),
        scale * (k + 2),
        scale * (k + 1),
        scale,
    )


def integral_norm_bound(q: float) -> float:
    """(1 - q^2)^(1/2) (1 - q)^(-2), the bound on each of the two integrals."""
    return np.sqrt(1 - q * q) / (1 - q) ** 2
