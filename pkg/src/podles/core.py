"""Truncated matrix-unit model of the standard Podleś sphere.

An element is ``mu·1 + sum lambda[n, k] f_{n,k}`` with 0 <= n, k <= N, where
f_{n,k} are the matrix units (f_{n,k} e_l = delta_{kl} e_n in the Podleś
representation).  Column k of ``lam`` is the component in the fiber
S_q^2·chi_{q^{2k}}(A).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .qsymb import QPolynomial, require_sphere, eval_pi_theta


class ConstantsMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ModelConstants:
    q: float
    N: int
    q_min: float = field(default=0.05, compare=False)
    q_max: float = field(default=0.95, compare=False)

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q out of range: {self.q} is not in (0, 1)")
        if not self.q_min <= self.q <= self.q_max:
            raise ValueError(
                f"q out of range: {self.q} outside the guarded interval "
                f"[{self.q_min}, {self.q_max}]"
            )
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N}")

    @property
    def size(self) -> int:
        return self.N + 1

    def C(self, n: int, k: int) -> float:
        """Normalizing constant C_{n,k}; symmetric, C(n, n) = 1."""
        lo, hi = min(n, k), max(n, k)
        q = self.q
        return math.prod(q ** (2 * j) * (1 - q ** (2 * (j + 1))) for j in range(lo, hi))

    def w(self, k: int) -> float:
        return self.q ** (2 * k)

    def with_N(self, N: int) -> "ModelConstants":
        return ModelConstants(self.q, N, self.q_min, self.q_max)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PodlesElement:
    mu: complex
    lam: np.ndarray
    constants: ModelConstants
    # norm of the part of the exact element cut off by the window, when known
    tail: Optional[float] = None

    def __post_init__(self):
        lam = _frozen(self.lam)
        if lam.shape != (self.constants.size, self.constants.size):
            raise ValueError(f"lambda has shape {lam.shape}, window needs {self.constants.size}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", complex(self.mu))

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, constants: ModelConstants) -> "PodlesElement":
        return cls(0.0, np.zeros((constants.size, constants.size)), constants)

    @classmethod
    def scalar(cls, c: complex, constants: ModelConstants) -> "PodlesElement":
        return cls(c, np.zeros((constants.size, constants.size)), constants)

    # -- algebra ------------------------------------------------------------

    def _check(self, other: "PodlesElement"):
        if other.constants != self.constants:
            raise ConstantsMismatch(f"{self.constants} vs {other.constants}")

    def __add__(self, other):
        if isinstance(other, PodlesElement):
            self._check(other)
            return PodlesElement(self.mu + other.mu, self.lam + other.lam, self.constants)
        if np.isscalar(other):
            return PodlesElement(self.mu + other, self.lam, self.constants)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return PodlesElement(-self.mu, -self.lam, self.constants)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PodlesElement):
            self._check(other)
            lam = self.mu * other.lam + other.mu * self.lam + self.lam @ other.lam
            return PodlesElement(self.mu * other.mu, lam, self.constants)
        if np.isscalar(other):
            return PodlesElement(self.mu * other, self.lam * other, self.constants)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def adjoint(self) -> "PodlesElement":
        return PodlesElement(np.conj(self.mu), self.lam.conj().T, self.constants, self.tail)

    @property
    def H(self) -> "PodlesElement":
        return self.adjoint()

    # -- numbers ------------------------------------------------------------

    def matrix(self) -> np.ndarray:
        """mu·I + lambda: the compression of the Podleś representation."""
        return self.mu * np.eye(self.constants.size) + self.lam

    def norm(self) -> float:
        return cstar_norm(self)

    def psi_inf(self) -> complex:
        return self.mu

    def allclose(self, other: "PodlesElement", atol: float = 1e-12) -> bool:
        self._check(other)
        return abs(self.mu - other.mu) <= atol and np.max(np.abs(self.lam - other.lam), initial=0) <= atol

    def resized(self, N: int) -> "PodlesElement":
        """Same element on another window (zero-padded or compressed)."""
        c = self.constants.with_N(N)
        lam = np.zeros((c.size, c.size), dtype=complex)
        m = min(c.size, self.constants.size)
        lam[:m, :m] = self.lam[:m, :m]
        return PodlesElement(self.mu, lam, c)

    def column(self, k: int) -> "PodlesElement":
        """Fiber component x·chi_{q^{2k}}(A)."""
        lam = np.zeros_like(self.lam)
        lam[:, k] = self.lam[:, k]
        return PodlesElement(0.0, lam, self.constants)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "q": self.constants.q,
            "N": self.constants.N,
            "mu": [self.mu.real, self.mu.imag],
            "lambda": [[z.real, z.imag] for z in self.lam.ravel()],
        })

    @classmethod
    def from_json(cls, text: str, q_min: float = 0.05, q_max: float = 0.95) -> "PodlesElement":
        d = json.loads(text)
        c = ModelConstants(d["q"], d["N"], q_min, q_max)
        lam = np.array([complex(re, im) for re, im in d["lambda"]]).reshape(c.size, c.size)
        return cls(complex(*d["mu"]), lam, c)

    def __repr__(self):
        return f"PodlesElement(mu={self.mu:.6g}, N={self.constants.N}, q={self.constants.q}, nnz={np.count_nonzero(self.lam)})"


def matrix_unit(n: int, k: int, constants: ModelConstants) -> PodlesElement:
    if not (0 <= n <= constants.N and 0 <= k <= constants.N):
        raise IndexError(f"matrix unit ({n}, {k}) outside window 0..{constants.N}")
    lam = np.zeros((constants.size, constants.size))
    lam[n, k] = 1.0
    return PodlesElement(0.0, lam, constants, tail=0.0)


def _B_tail(q: float, N: int) -> float:
    # sup over the dropped subdiagonal entries q^k sqrt(1 - q^(2(k+1))), k >= N
    ks = np.arange(N, N + 400)
    return float(np.max(q ** ks * np.sqrt(1 - q ** (2.0 * (ks + 1)))))


def generator(which: str, constants: ModelConstants, k: int | None = None) -> PodlesElement:
    """One of ``"A"``, ``"B"``, ``"Bstar"``, ``"one"``, ``"chi"`` (with ``k``).

    The ``tail`` attribute carries the norm of the piece of the exact
    generator lying outside the window.
    """
    q, N, size = constants.q, constants.N, constants.size
    n = np.arange(size)
    lam = np.zeros((size, size))
    if which == "A":
        lam[n, n] = q ** (2.0 * n)
        return PodlesElement(0.0, lam, constants, tail=q ** (2 * (N + 1)))
    if which in ("B", "Bstar"):
        lam[n[1:], n[:-1]] = q ** n[:-1].astype(float) * np.sqrt(1 - q ** (2.0 * (n[:-1] + 1)))
        if which == "Bstar":
            lam = lam.T
        return PodlesElement(0.0, lam, constants, tail=_B_tail(q, N))
    if which == "one":
        return PodlesElement(1.0, lam, constants, tail=0.0)
    if which == "chi":
        if k is None:
            raise ValueError("chi needs an index k")
        return matrix_unit(k, k, constants)
    raise ValueError(f"unknown generator {which!r}")


def cstar_norm(x: PodlesElement) -> float:
    """max(|mu|, ||mu·I + lambda||): sup over the character and the Podleś representation."""
    s = np.linalg.norm(x.matrix(), 2) if x.constants.size else 0.0
    return float(max(abs(x.mu), s))


def from_qpoly(p: QPolynomial, constants: ModelConstants) -> PodlesElement:
    """Image of a sphere polynomial, compressed to the window.

    The scalar part is the character value (A, B -> 0), which for a
    del_k-invariant normal form is the coefficient of the unit monomial.
    """
    require_sphere(p)
    q = constants.q
    c0 = p.constant_term()
    # drop the unit term before evaluating: subtracting mu*I afterwards
    # would swamp the tiny diagonal entries deep in the window
    mat = eval_pi_theta(p - QPolynomial.scalar(c0), q, 0.0, max(constants.N, 1)).matrix
    return PodlesElement(c0.evaluate(q), mat[: constants.size, : constants.size], constants)


def random_element(constants: ModelConstants, rng: np.random.Generator, *,
                   mu: complex | None = 0.0, hermitian: bool = False,
                   real: bool = False) -> PodlesElement:
    size = constants.size
    lam = rng.standard_normal((size, size))
    if not real:
        lam = lam + 1j * rng.standard_normal((size, size))
    if mu is None:
        mu = complex(rng.standard_normal(), 0.0 if real else rng.standard_normal())
    if hermitian:
        lam = (lam + lam.conj().T) / 2
        mu = complex(mu).real
    return PodlesElement(mu, lam, constants)


# -- states ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QState:
    """t·psi_inf + (1 - t)·tr(rho ·)."""

    t: float
    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("rho must be square")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {self.t}")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValueError(f"rho must have unit trace, got {np.trace(rho)}")
        if np.max(np.abs(rho - rho.conj().T), initial=0) > 1e-12:
            raise ValueError("rho must be Hermitian")
        if np.linalg.eigvalsh(rho).min(initial=0) < -1e-12:
            raise ValueError("rho must be positive semidefinite")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "t", float(self.t))

    @property
    def N(self) -> int:
        return self.rho.shape[0] - 1

    def resized(self, N: int) -> "QState":
        """Same state on another window; the support must fit."""
        m = self.rho.shape[0]
        if N + 1 < m and np.any(np.abs(self.rho[N + 1:, :]) > 0):
            raise ValueError(f"state supported beyond window {N}")
        rho = np.zeros((N + 1, N + 1), dtype=complex)
        s = min(N + 1, m)
        rho[:s, :s] = self.rho[:s, :s]
        return QState(self.t, rho)

    def to_json(self) -> str:
        return json.dumps({"t": self.t, "rho": [[z.real, z.imag] for z in self.rho.ravel()]})

    @classmethod
    def from_json(cls, text: str) -> "QState":
        d = json.loads(text)
        flat = np.array([complex(re, im) for re, im in d["rho"]])
        size = math.isqrt(len(flat))
        if size * size != len(flat):
            raise ValueError("rho is not square")
        return cls(d["t"], flat.reshape(size, size))

    def __repr__(self):
        if self.t == 1.0:
            return "QState(psi_inf)"
        return f"QState(t={self.t}, N={self.N})"


def vector_state(k: int, constants: ModelConstants) -> QState:
    """omega_k(x) = <e_k, pi(x) e_k>."""
    if not 0 <= k <= constants.N:
        raise IndexError(f"e_{k} outside window 0..{constants.N}")
    rho = np.zeros((constants.size, constants.size))
    rho[k, k] = 1.0
    return QState(0.0, rho)


def psi_infinity(constants: ModelConstants) -> QState:
    """The character reading off the scalar part; rho is a placeholder."""
    rho = np.zeros((constants.size, constants.size))
    rho[0, 0] = 1.0
    return QState(1.0, rho)


def state_eval(s: QState, x: PodlesElement) -> complex:
    if s.N != x.constants.N:
        raise ConstantsMismatch(f"state on window {s.N}, element on window {x.constants.N}")
    return s.t * x.mu + (1 - s.t) * np.trace(s.rho @ x.matrix())
