"""The derivation d1 on truncated elements and the spectral seminorm.

A derivative is stored by its coefficients c[n, k] over the elements
f_{n,k}(b*)^2, 0 <= n <= N, 0 <= k <= N+1.  In every irreducible
representation of SU_q(2) such an element is a phase times a
diagonal-unitary conjugate of the matrix c[n, k]·q^(2k), which gives the
closed-form norm used by :func:`deriv_norm`; :func:`representation_norm`
is the brute-force check of that fact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, NamedTuple

import numpy as np

from .core import ConstantsMismatch, ModelConstants, PodlesElement, from_qpoly
from .qsymb import QPolynomial, adjoint, del1_sym, eval_pi_theta, gen_B, normal_form, require_sphere


@dataclass(frozen=True, eq=False)
class DerivativeElement:
    c: np.ndarray
    constants: ModelConstants

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        size = self.constants.size
        if c.shape != (size, size + 1):
            raise ValueError(f"coefficients have shape {c.shape}, expected {(size, size + 1)}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def zero(cls, constants: ModelConstants) -> "DerivativeElement":
        return cls(np.zeros((constants.size, constants.size + 1)), constants)

    def __add__(self, other: "DerivativeElement") -> "DerivativeElement":
        if other.constants != self.constants:
            raise ConstantsMismatch(f"{self.constants} vs {other.constants}")
        return DerivativeElement(self.c + other.c, self.constants)

    def __mul__(self, s):
        return DerivativeElement(self.c * s, self.constants)

    __rmul__ = __mul__

    def weighted(self) -> np.ndarray:
        """c[n, k]·q^(2k): the matrix of the element in pi_0, up to a phase."""
        k = np.arange(self.constants.size + 1)
        return self.c * self.constants.q ** (2.0 * k)[None, :]

    def norm(self) -> float:
        return deriv_norm(self)

    def to_json(self) -> str:
        return json.dumps({
            "q": self.constants.q,
            "N": self.constants.N,
            "c": [[z.real, z.imag] for z in self.c.ravel()],
        })

    @classmethod
    def from_json(cls, text: str, q_min: float = 0.05, q_max: float = 0.95) -> "DerivativeElement":
        d = json.loads(text)
        const = ModelConstants(d["q"], d["N"], q_min, q_max)
        c = np.array([complex(re, im) for re, im in d["c"]]).reshape(const.size, const.size + 1)
        return cls(c, const)


def _d1_weights(constants: ModelConstants):
    q, N = constants.q, constants.N
    k = np.arange(1, N + 2)
    # coefficient of lambda[n, k-1] in c[n, k]
    up = q ** (-3.0 * k + 1) * np.sqrt(1 - q ** (2.0 * k)) / (1 - q * q)
    n = np.arange(N)
    kk = np.arange(N + 1)
    # coefficient of lambda[n+1, k] in c[n, k]
    down = (q ** (-2.0 * kk)[None, :] * q ** (-1.0 * n)[:, None]
            * np.sqrt(1 - q ** (2.0 * (n + 1)))[:, None]) / (1 - q * q)
    return up, down


def d1(x: PodlesElement) -> DerivativeElement:
    """Closed-form derivation on the window; the scalar part drops out."""
    const = x.constants
    N = const.N
    up, down = _d1_weights(const)
    c = np.zeros((N + 1, N + 2), dtype=complex)
    c[:, 1:] += x.lam * up[None, :]
    c[:N, : N + 1] -= x.lam[1:, :] * down
    return DerivativeElement(c, const)


def deriv_norm(xi: DerivativeElement) -> float:
    """Operator norm of sum c[n,k] f_{n,k}(b*)^2: sigma_max of the column-weighted matrix."""
    w = xi.weighted()
    if not np.any(w):
        return 0.0
    return float(np.linalg.norm(w, 2))


def seminorm_L(x: PodlesElement) -> float:
    """max(||d1(x)||, ||d1(x*)||); the second branch is ||d2(x)||."""
    return max(deriv_norm(d1(x)), deriv_norm(d1(x.adjoint())))


# -- brute-force oracle in the representations pi_theta ----------------------


@lru_cache(maxsize=64)
def _matrix_unit_columns(q: float, theta: float, W: int):
    """pi_theta(B^m) and pi_theta((B*)^m) for m <= W, evaluated through qsymb."""
    Bp = gen_B()
    Bs = adjoint(Bp)
    pows_B = [QPolynomial.scalar(1)]
    pows_Bs = [QPolynomial.scalar(1)]
    for _ in range(W):
        pows_B.append(pows_B[-1] * Bp)
        pows_Bs.append(pows_Bs[-1] * Bs)
    mB = [eval_pi_theta(p, q, theta, W).matrix for p in pows_B]
    mBs = [eval_pi_theta(p, q, theta, W).matrix for p in pows_Bs]
    bs2 = eval_pi_theta(normal_form(["b*", "b*"]), q, theta, W).matrix
    return mB, mBs, bs2


def representation_matrix(xi: DerivativeElement, theta: float) -> np.ndarray:
    """pi_theta(sum c[n,k] f_{n,k}(b*)^2) on span(e_0..e_{N+1}).

    Each f_{n,k} is rebuilt from its definition C_{n,k}^{-1/2} B^{n-k} chi_k(A)
    (or with (B*)^{k-n}); chi_k(A) acts on the basis as the projection onto e_k.
    """
    const = xi.constants
    W = const.N + 1
    mB, mBs, bs2 = _matrix_unit_columns(const.q, float(theta), W)
    out = np.zeros((W + 1, W + 1), dtype=complex)
    for n, k in zip(*np.nonzero(xi.c)):
        src = mB[n - k] if n >= k else mBs[k - n]
        out[:, k] += xi.c[n, k] / np.sqrt(const.C(n, k)) * src[:, k]
    return out @ bs2


def representation_norm(xi: DerivativeElement, theta: float) -> float:
    return float(np.linalg.norm(representation_matrix(xi, theta), 2))


# -- two-route check of the closed form ------------------------------------


class CrossCheck(NamedTuple):
    discrepancy: float
    scale: float
    rows: int
    cols: int


def d1_crosscheck(p: QPolynomial, constants: ModelConstants) -> CrossCheck:
    """Compare d1(from_qpoly(p)) with the symbolic derivative evaluated in pi_0.

    Only rows 0..N-1 and columns 0..N are compared: the closed form needs
    lambda[n+1, k] and lambda[n, k-1], which the window cuts off beyond that.
    """
    require_sphere(p)
    N = constants.N
    symbolic = eval_pi_theta(del1_sym(p), constants.q, 0.0, N + 1).matrix
    closed = d1(from_qpoly(p, constants)).weighted()
    a = symbolic[:N, : N + 1]
    b = closed[:N, : N + 1]
    diff = float(np.max(np.abs(a - b), initial=0.0))
    scale = float(np.max(np.abs(a), initial=0.0))
    return CrossCheck(diff, scale, N, N + 1)
