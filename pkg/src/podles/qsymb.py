"""Exact symbolic arithmetic in the coordinate algebra O(SU_q(2)).

Elements are kept in the normal form ``a^i b^j (b*)^k`` or ``(a*)^i b^j (b*)^k``
with coefficients in Q[q^(1/2), q^(-1/2)].  Two independent reduction paths
exist: :func:`qmul` multiplies letter by letter using closed monomial rules,
while :func:`rewrite` applies the seven rewrite rules at arbitrary redexes.
Agreement of the two is what the confluence tests check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from .laurent import ONE, ZERO, LaurentScalar

A, AS, B, BS = "a", "a*", "b", "b*"
LETTERS = (A, AS, B, BS)
_STAR = {A: AS, AS: A, B: BS, BS: B}

# q-grading of each letter under the automorphism del_k, in half-units
_GRADE = {A: 1, B: 1, AS: -1, BS: -1}


class NotInSphereError(ValueError):
    """Raised when an operation needs an element of O(S_q^2)."""


@dataclass(frozen=True, order=True)
class QMonomial:
    """``a^i b^j (b*)^k``, or ``(a*)^i b^j (b*)^k`` when ``starred``."""

    starred: bool
    i: int
    j: int
    k: int

    def __post_init__(self):
        if min(self.i, self.j, self.k) < 0:
            raise ValueError("negative exponent")
        if self.starred and self.i == 0:
            raise ValueError("starred monomial needs i >= 1")

    @property
    def letters(self) -> Tuple[str, ...]:
        head = AS if self.starred else A
        return (head,) * self.i + (B,) * self.j + (BS,) * self.k

    @property
    def grade(self) -> int:
        """Half-exponent picked up under del_k."""
        return (-self.i if self.starred else self.i) + self.j - self.k

    def __str__(self):
        if self.i == self.j == self.k == 0:
            return "1"
        out = []
        for sym, e in ((AS if self.starred else A, self.i), (B, self.j), (BS, self.k)):
            if e == 1:
                out.append(sym)
            elif e > 1:
                out.append(f"{sym}^{e}")
        return "·".join(out)


UNIT = QMonomial(False, 0, 0, 0)


def _mono(starred: bool, i: int, j: int, k: int) -> QMonomial:
    return QMonomial(starred and i > 0, i, j, k)


class QPolynomial:
    """Finite map QMonomial -> LaurentScalar; zero entries are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[QMonomial, LaurentScalar] | None = None):
        clean: Dict[QMonomial, LaurentScalar] = {}
        if terms:
            for m, c in terms.items():
                c = LaurentScalar.coerce(c)
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def scalar(cls, c) -> "QPolynomial":
        return cls({UNIT: LaurentScalar.coerce(c)})

    @classmethod
    def letter(cls, name: str) -> "QPolynomial":
        return normal_form([name])

    @property
    def terms(self) -> Dict[QMonomial, LaurentScalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, QPolynomial):
            return self._terms == other._terms
        if isinstance(other, (int, LaurentScalar)):
            return self == QPolynomial.scalar(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, ZERO) + c
        return QPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return QPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return qmul(self, _coerce(other))

    def __rmul__(self, other):
        return qmul(_coerce(other), self)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = QPolynomial.scalar(1)
        for _ in range(n):
            out = qmul(out, self)
        return out

    def scale(self, c) -> "QPolynomial":
        c = LaurentScalar.coerce(c)
        return QPolynomial({m: v * c for m, v in self._terms.items()})

    def shift(self, half_exp: int) -> "QPolynomial":
        """Multiply every coefficient by ``q**(half_exp/2)``."""
        return QPolynomial({m: c.shift(half_exp) for m, c in self._terms.items()})

    def constant_term(self) -> LaurentScalar:
        return self._terms.get(UNIT, ZERO)

    def max_a_degree(self) -> int:
        return max((m.i for m in self._terms), default=0)

    def is_sphere_element(self) -> bool:
        """Exact del_k-invariance, i.e. membership in O(S_q^2)."""
        return all(m.grade == 0 for m in self._terms)

    def __repr__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"({c})·{m}" for m, c in self.items())


def _coerce(x) -> QPolynomial:
    if isinstance(x, QPolynomial):
        return x
    return QPolynomial.scalar(x)


# -- multiplication by a single letter on the right --------------------------


def _times_letter(m: QMonomial, letter: str) -> List[Tuple[QMonomial, LaurentScalar]]:
    """Normal form of ``m · letter`` as (monomial, coefficient) pairs."""
    s, i, j, k = m.starred, m.i, m.j, m.k
    if letter == BS:
        return [(_mono(s, i, j, k + 1), ONE)]
    if letter == B:
        # b* b -> b b*
        return [(_mono(s, i, j + 1, k), ONE)]
    if letter == A:
        # b a -> q a b, b* a -> q a b*
        c = LaurentScalar.qpow(2 * (j + k))
        if not s:
            return [(_mono(False, i + 1, j, k), c)]
        # a* a -> 1 - q^2 b b*
        return [
            (_mono(True, i - 1, j, k), c),
            (_mono(True, i - 1, j + 1, k + 1), c * LaurentScalar.qpow(4, -1)),
        ]
    if letter == AS:
        # b a* -> q^-1 a* b, b* a* -> q^-1 a* b*
        c = LaurentScalar.qpow(-2 * (j + k))
        if s or i == 0:
            return [(_mono(True, i + 1, j, k), c)]
        # a a* -> 1 - b b*
        return [
            (_mono(False, i - 1, j, k), c),
            (_mono(False, i - 1, j + 1, k + 1), -c),
        ]
    raise ValueError(f"unknown letter {letter!r}")


def _times_word(p: QPolynomial, word: Sequence[str]) -> QPolynomial:
    cur: Dict[QMonomial, LaurentScalar] = dict(p._terms)
    for letter in word:
        nxt: Dict[QMonomial, LaurentScalar] = {}
        for m, c in cur.items():
            for m2, c2 in _times_letter(m, letter):
                nxt[m2] = nxt.get(m2, ZERO) + c * c2
        cur = {m: c for m, c in nxt.items() if c}
    return QPolynomial(cur)


def normal_form(word: Sequence[str], coeff=1) -> QPolynomial:
    """Normal form of ``coeff · w_1 w_2 ... w_n`` for letters in a, a*, b, b*."""
    for w in word:
        if w not in _STAR:
            raise ValueError(f"unknown letter {w!r}")
    return _times_word(QPolynomial.scalar(coeff), word)


def qmul(p: QPolynomial, r: QPolynomial) -> QPolynomial:
    out: Dict[QMonomial, LaurentScalar] = {}
    for m, c in r._terms.items():
        for m2, c2 in _times_word(p, m.letters)._terms.items():
            out[m2] = out.get(m2, ZERO) + c2 * c
    return QPolynomial(out)


def from_word(word: Sequence[str], coeff=1) -> QPolynomial:
    return normal_form(word, coeff)


# -- the rewrite system as such ----------------------------------------------

# (lhs pair) -> list of (coefficient, replacement word)
RULES: Dict[Tuple[str, str], List[Tuple[LaurentScalar, Tuple[str, ...]]]] = {
    (B, A): [(LaurentScalar.qpow(2), (A, B))],
    (BS, A): [(LaurentScalar.qpow(2), (A, BS))],
    (B, AS): [(LaurentScalar.qpow(-2), (AS, B))],
    (BS, AS): [(LaurentScalar.qpow(-2), (AS, BS))],
    (BS, B): [(ONE, (B, BS))],
    (AS, A): [(ONE, ()), (LaurentScalar.qpow(4, -1), (B, BS))],
    (A, AS): [(ONE, ()), (-ONE, (B, BS))],
}


def _redexes(word: Tuple[str, ...]) -> List[int]:
    return [t for t in range(len(word) - 1) if (word[t], word[t + 1]) in RULES]


def rewrite(word: Sequence[str], coeff=1, rng: random.Random | None = None) -> QPolynomial:
    """Reduce a word by applying rewrite rules until no redex is left.

    With ``rng`` the redex is chosen at random each step, otherwise the
    leftmost one is taken.
    """
    pending: Dict[Tuple[str, ...], LaurentScalar] = {tuple(word): LaurentScalar.coerce(coeff)}
    done: Dict[QMonomial, LaurentScalar] = {}
    while pending:
        w, c = pending.popitem()
        if not c:
            continue
        spots = _redexes(w)
        if not spots:
            m = _word_to_monomial(w)
            done[m] = done.get(m, ZERO) + c
            continue
        t = rng.choice(spots) if rng is not None else spots[0]
        for c2, rep in RULES[(w[t], w[t + 1])]:
            w2 = w[:t] + rep + w[t + 2:]
            pending[w2] = pending.get(w2, ZERO) + c * c2
    return QPolynomial(done)


def _word_to_monomial(w: Tuple[str, ...]) -> QMonomial:
    i = sum(1 for x in w if x in (A, AS))
    starred = AS in w
    j = w.count(B)
    k = w.count(BS)
    m = _mono(starred, i, j, k)
    if m.letters != w:
        raise AssertionError(f"irreducible word {w} is not in normal order")
    return m


# -- involution and the automorphism del_k -----------------------------------


def _conj(c: LaurentScalar) -> LaurentScalar:
    # q is real, so the coefficient ring is fixed by the involution
    return c


def adjoint(p: QPolynomial) -> QPolynomial:
    out = QPolynomial()
    for m, c in p._terms.items():
        out = out + normal_form([_STAR[x] for x in reversed(m.letters)], _conj(c))
    return out


def del_k(p: QPolynomial, inverse: bool = False) -> QPolynomial:
    sign = -1 if inverse else 1
    return QPolynomial({m: c.shift(sign * m.grade) for m, c in p._terms.items()})


# -- twisted derivations -----------------------------------------------------

_DEL_E = {
    A: normal_form([BS], -1),
    B: normal_form([AS], LaurentScalar.qpow(-2)),
    AS: QPolynomial(),
    BS: QPolynomial(),
}
_DEL_F = {
    AS: normal_form([B], LaurentScalar.qpow(2)),
    BS: normal_form([A], -1),
    A: QPolynomial(),
    B: QPolynomial(),
}


def _twisted(p: QPolynomial, table: Mapping[str, QPolynomial]) -> QPolynomial:
    # d(x_1...x_n) = sum_t k^-1(x_1..x_{t-1}) d(x_t) k(x_{t+1}..x_n)
    out: Dict[QMonomial, LaurentScalar] = {}
    for m, c in p._terms.items():
        word = m.letters
        for t, x in enumerate(word):
            dx = table[x]
            if not dx:
                continue
            prefix, suffix = word[:t], word[t + 1:]
            shift = -sum(_GRADE[y] for y in prefix) + sum(_GRADE[y] for y in suffix)
            term = _times_word(qmul(normal_form(prefix), dx), suffix)
            for m2, c2 in term._terms.items():
                out[m2] = out.get(m2, ZERO) + c2 * c.shift(shift)
    return QPolynomial(out)


def del_e(p: QPolynomial) -> QPolynomial:
    return _twisted(p, _DEL_E)


def del_f(p: QPolynomial) -> QPolynomial:
    return _twisted(p, _DEL_F)


def require_sphere(p: QPolynomial):
    if not p.is_sphere_element():
        bad = [str(m) for m in p._terms if m.grade != 0]
        raise NotInSphereError(f"not in O(S_q^2): monomials {bad} are not del_k-invariant")


def del1_sym(p: QPolynomial) -> QPolynomial:
    """The derivation q^(1/2) del_e restricted to O(S_q^2)."""
    require_sphere(p)
    return del_e(p).shift(1)


def del2_sym(p: QPolynomial) -> QPolynomial:
    """The derivation q^(-1/2) del_f restricted to O(S_q^2)."""
    require_sphere(p)
    return del_f(p).shift(-1)


# -- sphere generators -------------------------------------------------------


def gen_A() -> QPolynomial:
    return normal_form([BS, B])


def gen_B() -> QPolynomial:
    return normal_form([A, BS])


def gen_Bstar() -> QPolynomial:
    return adjoint(gen_B())


def indicator_poly(k: int, order: int) -> QPolynomial:
    """Polynomial approximation of the spectral projection of A at q^(2k).

    Uses p(A) = A^n prod_{j<k} (A - q^(2j)) / (q^(2kn) prod_{j<k} (q^(2k) - q^(2j)))
    with n = ``order``.  p vanishes exactly at the eigenvalues q^(2j), j < k,
    equals 1 at q^(2k) up to the truncation below, and is O(q^(2n)) on the
    rest of the spectrum.  Each 1/(1 - q^(2m)) in the normalization is
    replaced by its geometric series cut after ``order`` terms, which keeps
    the coefficients inside Q[q^(+-1/2)].

    Monomial coefficients grow like q^(-2kn); evaluated in floating point the
    best accuracy is reached at moderate orders.
    """
    if k < 0 or order < 1:
        raise ValueError("need k >= 0 and order >= 1")
    A = gen_A()
    p = A ** order
    scale = LaurentScalar.qpow(-4 * k * order)
    for j in range(k):
        p = p * (A - QPolynomial.scalar(LaurentScalar.qpow(4 * j)))
        series = LaurentScalar()
        for i in range(order):
            series = series + LaurentScalar.qpow(4 * (k - j) * i)
        scale = scale * series * LaurentScalar.qpow(-4 * j, -1)
    return p.scale(scale)


# -- the representations pi_theta -------------------------------------------


class Evaluation(NamedTuple):
    matrix: np.ndarray
    exact_upto: int
    tail_bound: float


def _letter_matrices(q: float, theta: float, N: int):
    n = np.arange(N + 1)
    a = np.zeros((N + 1, N + 1))
    a[n[1:], n[:-1]] = np.sqrt(1.0 - q ** (2.0 * (n[:-1] + 1)))
    bdiag = np.exp(1j * theta) * q ** n.astype(float)
    return a, bdiag


def eval_pi_theta(p: QPolynomial, q: float, theta: float, N: int) -> Evaluation:
    """Compression of pi_theta(p) to span(e_0..e_N).

    pi_theta(a) e_n = sqrt(1 - q^(2(n+1))) e_(n+1), pi_theta(b) e_n = e^(i theta) q^n e_n.
    Each monomial is evaluated as the compression of the full operator, so
    every returned entry is exact.  ``exact_upto`` is the largest index d
    such that products of such compressions are still exact on e_0..e_d,
    and ``tail_bound`` bounds ||pi_theta(p) - P pi_theta(p) P||.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if N < 1:
        raise ValueError("N must be at least 1")
    a, bdiag = _letter_matrices(q, theta, N)
    shifts = {0: np.eye(N + 1)}
    out = np.zeros((N + 1, N + 1), dtype=complex)
    tail = 0.0
    for m, c in p._terms.items():
        if m.i not in shifts:
            shifts[m.i] = np.linalg.matrix_power(a, m.i)
        head = shifts[m.i].T if m.starred else shifts[m.i]
        diag = bdiag ** m.j * np.conj(bdiag) ** m.k
        coeff = c.evaluate(q)
        out += coeff * (head * diag[None, :])
        if m.j + m.k:
            tail += 2 * abs(coeff) * q ** (max(N + 1 - m.i, 0) * (m.j + m.k))
        elif m.i:
            tail += 2 * abs(coeff)
    return Evaluation(out, N - p.max_a_degree(), tail)


def random_word(rng: random.Random, max_len: int) -> List[str]:
    return [rng.choice(LETTERS) for _ in range(rng.randint(0, max_len))]


def random_poly(rng: random.Random, n_terms: int = 3, max_len: int = 4,
                sphere: bool = False) -> QPolynomial:
    """Random element; with ``sphere`` it is drawn from words in A, B, B*."""
    out = QPolynomial()
    gens = [gen_A(), gen_B(), gen_Bstar()] if sphere else None
    for _ in range(n_terms):
        coeff = LaurentScalar.qpow(rng.randint(-2, 2), rng.randint(-3, 3))
        if sphere:
            p = QPolynomial.scalar(coeff)
            for _ in range(rng.randint(0, max_len)):
                p = p * rng.choice(gens)
            out = out + p
        else:
            out = out + normal_form(random_word(rng, max_len), coeff)
    return out
