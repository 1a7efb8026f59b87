"""The verification suite behind ``podles verify``.

Every check returns a :class:`CheckResult` with a stable key, the measured
quantity and the bound it is held to.  Exact checks measure a count of
nonzero residual terms against a bound of 0.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import asdict, dataclass
from typing import Callable, Iterator, List

import numpy as np

from .core import (
    ModelConstants,
    PodlesElement,
    cstar_norm,
    matrix_unit,
    psi_infinity,
    random_element,
    vector_state,
)
from .dirac import (
    DerivativeElement,
    _matrix_unit_columns,
    d1,
    d1_crosscheck,
    deriv_norm,
    representation_norm,
)
from .laurent import LaurentScalar
from .metric import (
    SolverConfig,
    coefficient_decay_audit,
    fiber_ball_extremal,
    fiber_extremal_value,
    global_ball_bound,
    mk_distance,
    random_feasible,
)
from .qintegral import (
    delta_diag,
    gamma_diag,
    integral_horizontal,
    integral_norm_bound,
    integral_total,
    integral_vertical,
    projection_diag,
    tail_column_bound,
)
from .qsymb import (
    A,
    AS,
    B,
    BS,
    QPolynomial,
    adjoint,
    del1_sym,
    del2_sym,
    del_e,
    del_f,
    del_k,
    gen_A,
    gen_B,
    gen_Bstar,
    normal_form,
    random_poly,
    random_word,
    rewrite,
)


@dataclass(frozen=True)
class CheckResult:
    check: str
    lemma_key: str
    measured: float
    bound: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.lemma_key:<22} {self.check:<44} measured={self.measured:.3e} bound={self.bound:.3e}"


def _result(check: str, key: str, measured: float, bound: float) -> CheckResult:
    return CheckResult(check, key, float(measured), float(bound), bool(measured <= bound))


def _nterms(p: QPolynomial) -> int:
    return len(p)


def q_ratio(n: int) -> LaurentScalar:
    """(1 - q^(2n)) / (1 - q^2) = sum_{j<n} q^(2j), exactly."""
    out = LaurentScalar()
    for j in range(n):
        out = out + LaurentScalar.qpow(4 * j)
    return out


def random_derivative(constants: ModelConstants, rng: np.random.Generator) -> DerivativeElement:
    """Random coefficients scaled so the weighted matrix has entries of order one."""
    size = constants.size
    c = rng.standard_normal((size, size + 1)) + 1j * rng.standard_normal((size, size + 1))
    k = np.arange(size + 1)
    return DerivativeElement(c * constants.q ** (-2.0 * k)[None, :], constants)


# -- exact algebra ----------------------------------------------------------


def algebra_checks(seed: int, words: int = 500) -> Iterator[CheckResult]:
    a, as_, b, bs = (normal_form([x]) for x in (A, AS, B, BS))
    q = QPolynomial.scalar(LaurentScalar.qpow(2))
    q2 = QPolynomial.scalar(LaurentScalar.qpow(4))
    one = QPolynomial.scalar(1)
    rels = [
        b * a - q * (a * b),
        bs * a - q * (a * bs),
        b * bs - bs * b,
        as_ * a + q2 * (b * bs) - one,
        a * as_ + b * bs - one,
    ]
    yield _result("defining relations of SU_q(2)", "su2-relations", sum(map(_nterms, rels)), 0)

    Ap, Bp, Bs = gen_A(), gen_B(), gen_Bstar()
    qm2 = QPolynomial.scalar(LaurentScalar.qpow(-4))
    srels = [
        Ap * Bp - q2 * (Bp * Ap),
        Bp * Bs - qm2 * Ap * (one - Ap),
        Bs * Bp - Ap * (one - q2 * Ap),
    ]
    yield _result("sphere relations AB, BB*, B*B", "sphere-relations", sum(map(_nterms, srels)), 0)

    bad = 0
    bsas = normal_form([BS, AS])
    bs2 = normal_form([BS, BS])
    as2 = normal_form([AS, AS])
    qinv = QPolynomial.scalar(LaurentScalar.qpow(-2))
    for n in range(0, 11):
        r = QPolynomial.scalar(q_ratio(n))
        if n == 0:
            targets = [QPolynomial()] * 3
        else:
            targets = [
                r * Ap ** (n - 1) * bsas,
                -(r * Bp ** (n - 1) * bs2),
                qinv * r * Bs ** (n - 1) * as2,
            ]
        got = [del1_sym(Ap ** n), del1_sym(Bp ** n), del1_sym(Bs ** n)]
        bad += sum(_nterms(g - t) for g, t in zip(got, targets))
    yield _result("derivatives of A^n, B^n, (B*)^n, n <= 10", "power-derivatives", bad, 0)

    rng = random.Random(seed)
    bad = 0
    for _ in range(words):
        w = random_word(rng, 8)
        ref = normal_form(w)
        bad += int(rewrite(w, rng=rng) != ref) + int(rewrite(w) != ref)
    yield _result(f"rewrite confluence on {words} random words", "rewrite-confluence", bad, 0)

    bad = 0
    for _ in range(30):
        p, r = random_poly(rng, 3, 3), random_poly(rng, 3, 3)
        for op in (del_e, del_f):
            lhs = op(p * r)
            rhs = op(p) * del_k(r) + del_k(p, inverse=True) * op(r)
            bad += _nterms(lhs - rhs)
        bad += _nterms(adjoint(p * r) - adjoint(r) * adjoint(p))
        bad += _nterms(del_k(p * r) - del_k(p) * del_k(r))
    yield _result("twisted Leibniz, automorphism, involution", "twisted-leibniz", bad, 0)

    bad = 0
    for _ in range(30):
        p = random_poly(rng, 3, 3, sphere=True)
        bad += _nterms(adjoint(del1_sym(p)) + del2_sym(adjoint(p)))
    yield _result("del1(p)* + del2(p*) = 0 on sphere elements", "derivative-involution", bad, 0)


# -- matrix units -----------------------------------------------------------


def matrix_unit_checks(constants: ModelConstants) -> Iterator[CheckResult]:
    # N^4 products; the relations do not depend on the window beyond this
    small = constants.with_N(min(constants.N, 12))
    size = small.size
    units = [[matrix_unit(n, k, small) for k in range(size)] for n in range(size)]
    err = 0.0
    for n, k, m, l in itertools.product(range(size), repeat=4):
        prod = units[n][k] * units[m][l]
        want = units[n][l].lam if k == m else 0.0
        err = max(err, float(np.max(np.abs(prod.lam - want))), abs(prod.mu))
    for n, k in itertools.product(range(size), repeat=2):
        err = max(err, float(np.max(np.abs(units[n][k].adjoint().lam - units[k][n].lam))))
    yield _result(f"f_nk f_ml = delta_km f_nl, f_nk* = f_kn (n,k,m,l <= {small.N})", "matrix-units", err, 0.0)

    # the defining expression C^-1/2 B^(n-k) chi_k evaluated in the representation
    W = min(constants.N, 16)
    mB, mBs, _ = _matrix_unit_columns(constants.q, 0.0, W + 1)
    err = 0.0
    for n, k in itertools.product(range(W + 1), repeat=2):
        src = mB[n - k] if n >= k else mBs[k - n]
        col = src[: W + 1, k] / math.sqrt(constants.C(n, k))
        want = np.zeros(W + 1)
        want[n] = 1.0
        err = max(err, float(np.max(np.abs(col - want))))
    yield _result(f"C^-1/2 B^(n-k) chi_k is the matrix unit (n,k <= {W})", "matrix-unit-definition", err, 1e-10)


# -- derivatives ------------------------------------------------------------


def crosscheck_polys(seed: int, count: int = 20) -> List[QPolynomial]:
    Ap, Bp, Bs = gen_A(), gen_B(), gen_Bstar()
    polys = [Ap ** n for n in range(1, 5)] + [Bp ** n for n in range(1, 4)] + [Bs ** n for n in range(1, 4)]
    polys += [Ap * Bp, Bp * Bs, Bs * Ap * Bp, Ap * Ap * Bs]
    rng = random.Random(seed)
    while len(polys) < count:
        polys.append(random_poly(rng, 3, 3, sphere=True))
    return polys


def derivative_checks(constants: ModelConstants, seed: int, theta_grid: int) -> Iterator[CheckResult]:
    worst = 0.0
    for p in crosscheck_polys(seed):
        rep = d1_crosscheck(p, constants)
        worst = max(worst, rep.discrepancy / max(1.0, rep.scale))
    yield _result("closed-form d1 vs symbolic derivative (20 polys)", "derivative-crosscheck", worst, 1e-9)

    # the brute-force representation norm is built from C^-1/2, which underflows for large windows
    oracle = constants.with_N(min(constants.N, 12))
    rng = np.random.default_rng(seed)
    thetas = np.linspace(0, 2 * np.pi, theta_grid, endpoint=False)
    mismatch = spread = 0.0
    for _ in range(50):
        xi = random_derivative(oracle, rng)
        ref = deriv_norm(xi)
        vals = np.array([representation_norm(xi, t) for t in thetas])
        mismatch = max(mismatch, float(np.max(np.abs(vals - ref))) / ref)
        spread = max(spread, float(np.ptp(vals)) / ref)
    yield _result("weighted sigma_max vs representation norms", "norm-oracle", mismatch, 1e-9)
    yield _result("representation norm variation over theta", "norm-theta-invariance", spread, 1e-10)


# -- integrals --------------------------------------------------------------


def integral_checks(constants: ModelConstants, seed: int, samples: int = 100) -> Iterator[CheckResult]:
    rng = np.random.default_rng(seed)
    size = constants.size
    err = 0.0
    split = 0
    xs = [random_element(constants, rng, mu=None) for _ in range(samples)]
    xs += [matrix_unit(n, k, constants) for n in range(size) for k in range(size)]
    lower = np.tril(np.ones((size, size)), -1).astype(bool)
    for x in xs:
        xi = d1(x)
        v, h = integral_vertical(xi), integral_horizontal(xi)
        target = x.lam
        err = max(err, float(np.linalg.norm((v + h).lam - target, 2)) / max(1.0, cstar_norm(x)))
        split += int(np.count_nonzero(v.lam[~lower])) + int(np.count_nonzero(h.lam[lower]))
        err = max(err, float(np.max(np.abs(v.lam[lower] - target[lower]), initial=0.0)))
        err = max(err, float(np.max(np.abs(h.lam[~lower] - target[~lower]), initial=0.0)))
    yield _result("integral(d1(x)) = x - psi_inf(x)", "fundamental-theorem", err, 1e-10)
    yield _result("vertical/horizontal zero patterns", "integral-split", split, 0)

    q = constants.q
    cert = 0.0
    for k in range(size):
        cert = max(cert,
                   float(np.max(gamma_diag(q, k, size + 8))) - 1.0,
                   float(np.max(delta_diag(q, k, size + 8))) - q,
                   float(np.max(projection_diag(k, size + 8))) - 1.0)
    yield _result("norms of Gamma, Delta, P within 1, q, 1", "fiber-operator-norms", cert, 1e-12)


def bound_checks(constants: ModelConstants, seed: int, samples: int = 100, kmax: int = 8) -> Iterator[CheckResult]:
    rng = np.random.default_rng(seed)
    q = constants.q
    worst = {"continuity": 0.0, "vertical-continuity": 0.0, "horizontal-continuity": 0.0, "integral-norm": 0.0}
    bound = integral_norm_bound(q)
    for _ in range(samples):
        xi = random_derivative(constants, rng)
        nrm = deriv_norm(xi)
        for k in range(min(kmax, constants.N) + 1):
            t = tail_column_bound(xi, k)
            worst["continuity"] = max(worst["continuity"], t.total / t.bound_total)
            worst["vertical-continuity"] = max(worst["vertical-continuity"], t.vertical / t.bound_vertical)
            worst["horizontal-continuity"] = max(worst["horizontal-continuity"], t.horizontal / t.bound_horizontal)
        W = 2 * constants.size
        for part in (integral_vertical(xi, W), integral_horizontal(xi, W)):
            worst["integral-norm"] = max(worst["integral-norm"], cstar_norm(part) / (bound * nrm))
    names = {
        "continuity": "tail norm <= q^k (k+2)(1-q)^-2 ||xi||",
        "vertical-continuity": "vertical tail <= q^k (k+1)(1-q)^-2 ||xi||",
        "horizontal-continuity": "horizontal tail <= q^k (1-q)^-2 ||xi||",
        "integral-norm": "integral norms <= (1-q^2)^1/2 (1-q)^-2",
    }
    for key, ratio in worst.items():
        yield _result(names[key] + " (ratio)", key, ratio, 1.0)


# -- metric -----------------------------------------------------------------


def metric_checks(constants: ModelConstants, seed: int, tolerance: float) -> Iterator[CheckResult]:
    q = constants.q
    kmax = min(6, constants.N - 1)
    err = 0.0
    shape = 0.0
    witnesses = []
    for k in range(kmax + 1):
        val, x = fiber_ball_extremal(k, constants, seed=seed)
        err = max(err, abs(val - fiber_extremal_value(k, q)))
        col = np.abs(x.lam[:, k])
        shape = max(shape, float(np.max(col[1:])) / col[0])
        witnesses.append(x)
    yield _result(f"fiber extremal value, k <= {kmax}", "fiber-extremal", err, 1e-6)
    yield _result("fiber extremal witness is a multiple of f_0k", "fiber-extremal-witness", shape, 1e-6)

    worst = 0.0
    for k in range(kmax + 1):
        rep = coefficient_decay_audit(k, 200, constants, seed=seed + k, extra=[witnesses[k]])
        worst = max(worst, rep.max_ratio)
    yield _result("coefficient decay |lambda_n| (max ratio)", "coefficient-decay", worst, 1.0)

    cfg = SolverConfig(tolerance=tolerance, compute_gap=False, seed=seed)
    states = [psi_infinity(constants)] + [vector_state(k, constants) for k in range(kmax + 1)]
    dist = np.zeros((len(states), len(states)))
    feasible = [random_feasible(constants, np.random.default_rng(seed), hermitian=bool(i % 2)) for i in range(20)]
    for i, j in itertools.permutations(range(len(states)), 2):
        res = mk_distance(states[i], states[j], constants, cfg)
        dist[i, j] = res.value
        feasible.append(res.witness)
    ball = max(cstar_norm(x) for x in feasible) / global_ball_bound(q)
    yield _result("feasible elements: norm <= 2(1-q)^-2 (ratio)", "lip-ball", ball, 1.0)

    cont = max(dist[0, 1 + k] / (2 * q ** k * (k + 2) / (1 - q) ** 2) for k in range(kmax + 1))
    yield _result("mk(psi_inf, omega_k) <= 2 q^k (k+2)(1-q)^-2 (ratio)", "distance-decay", cont, 1.0)

    sym = float(np.max(np.abs(dist - dist.T)))
    yield _result("mk symmetry", "metric-symmetry", sym, 2 * tolerance)
    n = len(states)
    tri = max(dist[i, k] - dist[i, j] - dist[j, k] for i, j, k in itertools.product(range(n), repeat=3))
    yield _result("mk triangle inequality", "metric-triangle", max(tri, 0.0), 3 * tolerance)


def run_suite(constants: ModelConstants, tolerance: float = 1e-8, seed: int = 0,
              theta_grid: int = 20, progress: Callable[[CheckResult], None] | None = None) -> List[CheckResult]:
    out = []
    groups = [
        algebra_checks(seed),
        matrix_unit_checks(constants),
        derivative_checks(constants, seed, theta_grid),
        integral_checks(constants, seed),
        bound_checks(constants, seed),
        metric_checks(constants, seed, tolerance),
    ]
    for group in groups:
        for res in group:
            out.append(res)
            if progress:
                progress(res)
    return out
