"""Monge–Kantorovich distances for the seminorm L on the truncated sphere.

The distance sup{ s1(x) - s2(x) : L(x) <= r } only sees self-adjoint x with
zero scalar part.  For such x, L(x) = ||d1(x)||, the spectral norm of a
matrix linear in lambda, so the problem is a linear objective over a
spectral-norm ball.  It is handed to Clarabel as a semidefinite program
(block [[r I, M], [M^T, r I]] >= 0) in a rescaled real parametrization.

When both states are invariant under the circle action lambda[n, k] ->
e^{i(n-k)phi} lambda[n, k] (diagonal density matrices, psi_inf), averaging
over the action shows that a diagonal maximizer exists.  For diagonal
lambda the weighted derivative has a single nonzero superdiagonal, its
norm is the largest entry, and the program becomes a linear program.

Every reported value comes from a witness whose seminorm is recomputed with
:func:`podles.dirac.seminorm_L` and rescaled into the ball, so values are
certified lower bounds.  A dual certificate gives an upper bound for the
same window.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

import clarabel
import numpy as np
import scipy.optimize
import scipy.sparse as sp

from .core import (
    ConstantsMismatch,
    ModelConstants,
    PodlesElement,
    QState,
    cstar_norm,
    psi_infinity,
    state_eval,
    vector_state,
)
from .dirac import d1, deriv_norm, seminorm_L

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-8
    max_iter: int = 100_000
    radius: float = 1.0
    # recorded for reproducibility; the conic solves themselves are deterministic
    seed: int = 0
    compute_gap: bool = True
    use_symmetry: bool = True
    ladder_start: Optional[float] = None
    stationary_window: int = 1

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def ladder(self) -> List[float]:
        """Solver accuracies tried in turn, ending two decades below the tolerance."""
        out = []
        t = max(self.ladder_start or self.tolerance, self.tolerance)
        floor = max(self.tolerance * 1e-2, 1e-13)
        while t > floor * 1.0001:
            out.append(t)
            t *= 1e-2
        out.append(floor)
        return out


@dataclass(frozen=True, eq=False)
class MKResult:
    value: float
    witness: PodlesElement
    gap_estimate: float
    iterations: int
    tolerance: float
    upper_bound: float = math.inf
    converged: bool = True
    method: str = "sdp"
    history: Tuple[float, ...] = ()

    def to_json(self) -> str:
        return json.dumps({
            "value": self.value,
            "upper_bound": self.upper_bound,
            "gap_estimate": self.gap_estimate,
            "iterations": self.iterations,
            "tolerance": self.tolerance,
            "converged": self.converged,
            "method": self.method,
            "history": list(self.history),
            "witness": json.loads(self.witness.to_json()),
        })


# -- problem data -----------------------------------------------------------


def objective_matrix(s1: QState, s2: QState) -> np.ndarray:
    """G with s1(x) - s2(x) = Re tr(G lambda) whenever mu = 0."""
    return (1 - s1.t) * s1.rho - (1 - s2.t) * s2.rho


def _svec_index(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return j * (j + 1) // 2 + i


@dataclass
class _Parametrization:
    """Hermitian lambda = sum_v z_v E_v with E_v scaled by q^max(i, j)."""

    entries: List[Tuple[int, int, bool]]  # (i, j, imaginary)
    scale: np.ndarray

    @classmethod
    def build(cls, constants: ModelConstants, complex_part: bool) -> "_Parametrization":
        R = constants.size
        entries = [(i, j, False) for j in range(R) for i in range(j, R)]
        if complex_part:
            entries += [(i, j, True) for j in range(R) for i in range(j + 1, R)]
        scale = np.array([constants.q ** max(i, j) for i, j, _ in entries])
        return cls(entries, scale)

    def element(self, z: np.ndarray, constants: ModelConstants) -> PodlesElement:
        R = constants.size
        lam = np.zeros((R, R), dtype=complex)
        for v, (i, j, im) in enumerate(self.entries):
            val = z[v] * self.scale[v]
            if im:
                lam[i, j] += 1j * val
                lam[j, i] -= 1j * val
            else:
                lam[i, j] += val
                if i != j:
                    lam[j, i] += val
        return PodlesElement(0.0, lam, constants)

    def objective(self, G: np.ndarray) -> np.ndarray:
        g = np.empty(len(self.entries))
        for v, (i, j, im) in enumerate(self.entries):
            if im:
                g[v] = 2 * G[i, j].imag
            elif i == j:
                g[v] = G[i, i].real
            else:
                g[v] = 2 * G[i, j].real
        return g * self.scale


def _d1_weighted_unit(constants: ModelConstants, i: int, j: int) -> Dict[Tuple[int, int], complex]:
    """Nonzero entries of the weighted derivative of the matrix unit f_{i,j}."""
    lam = np.zeros((constants.size, constants.size))
    lam[i, j] = 1.0
    w = d1(PodlesElement(0.0, lam, constants)).weighted()
    return {(int(a), int(b)): w[a, b] for a, b in zip(*np.nonzero(w))}


def _weighted_columns(constants: ModelConstants, par: _Parametrization, embed: bool):
    """Columns of the linear map z -> weighted derivative (really embedded if complex)."""
    R, C = constants.size, constants.size + 1
    cache: Dict[Tuple[int, int], Dict] = {}
    cols = []
    for v, (i, j, im) in enumerate(par.entries):
        parts = [((i, j), 1j if im else 1.0)]
        if i != j:
            parts.append(((j, i), -1j if im else 1.0))
        acc: Dict[Tuple[int, int], complex] = {}
        for (a, b), f in parts:
            if (a, b) not in cache:
                cache[(a, b)] = _d1_weighted_unit(constants, a, b)
            for key, w in cache[(a, b)].items():
                acc[key] = acc.get(key, 0) + f * w * par.scale[v]
        out = {}
        for (x, y), w in acc.items():
            if embed:
                for (xx, yy, val) in ((x, y, w.real), (x, C + y, -w.imag),
                                      (R + x, y, w.imag), (R + x, C + y, w.real)):
                    if val:
                        out[(xx, yy)] = val
            elif w.real:
                out[(x, y)] = w.real
        cols.append(out)
    rows = 2 * R if embed else R
    ncols = 2 * C if embed else C
    return cols, rows, ncols


def _clarabel_settings(tol: float, max_iter: int) -> clarabel.DefaultSettings:
    st = clarabel.DefaultSettings()
    st.verbose = False
    st.tol_gap_abs = tol
    st.tol_gap_rel = tol
    st.tol_feas = tol
    st.tol_ktratio = min(1e-6, tol)
    st.max_iter = max_iter
    return st


_OK = {"Solved", "AlmostSolved"}


class _SDP:
    def __init__(self, constants: ModelConstants, G: np.ndarray, radius: float):
        self.constants = constants
        embed = bool(np.any(np.abs(G.imag) > 0))
        self.par = _Parametrization.build(constants, embed)
        self.g = self.par.objective(G)
        self.cols, self.R, self.C = _weighted_columns(constants, self.par, embed)
        nb = self.R + self.C
        rows, cidx, vals = [], [], []
        for v, col in enumerate(self.cols):
            for (x, y), w in col.items():
                rows.append(_svec_index(x, self.R + y))
                cidx.append(v)
                vals.append(-math.sqrt(2) * w)
        m = nb * (nb + 1) // 2
        self.A = sp.csc_matrix((vals, (rows, cidx)), shape=(m, len(self.cols)))
        self.b = np.zeros(m)
        for d in range(nb):
            self.b[_svec_index(d, d)] = radius
        self.nb = nb
        self.radius = radius
        self.method = "sdp-complex" if embed else "sdp"

    def solve(self, tol: float, max_iter: int):
        n = len(self.cols)
        solver = clarabel.DefaultSolver(
            sp.csc_matrix((n, n)), -self.g, self.A, self.b,
            [clarabel.PSDTriangleConeT(self.nb)], _clarabel_settings(tol, max_iter),
        )
        sol = solver.solve()
        x = self.par.element(np.array(sol.x), self.constants)
        return x, int(sol.iterations), str(sol.status), np.array(sol.z)

    def dual_bound(self, z: np.ndarray) -> float:
        """r·||Y||_* for Y built from the cone dual, corrected to satisfy the equality exactly."""
        nb, R = self.nb, self.R
        Z = np.zeros((nb, nb))
        iu = np.triu_indices(nb)
        # svec order: column-major upper triangle
        order = sorted(zip(iu[1], iu[0]))
        for t, (j, i) in enumerate(order):
            Z[i, j] = z[t] / (math.sqrt(2) if i != j else 1.0)
        Y = -2.0 * Z[:R, R:]
        Emat = np.zeros((self.R * self.C, len(self.cols)))
        for v, col in enumerate(self.cols):
            for (x, y), w in col.items():
                Emat[x * self.C + y, v] = w
        resid = self.g - Emat.T @ Y.ravel()
        alpha, *_ = np.linalg.lstsq(Emat.T @ Emat, resid, rcond=None)
        Y = Y + (Emat @ alpha).reshape(self.R, self.C)
        return self.radius * float(np.sum(np.linalg.svd(Y, compute_uv=False)))


class _LP:
    """The circle-invariant reduction: diagonal lambda, box constraints on the superdiagonal."""

    def __init__(self, constants: ModelConstants, G: np.ndarray, radius: float):
        R = constants.size
        self.constants = constants
        self.radius = radius
        self.g = np.real(np.diag(G)).astype(float)
        # D[k-1, n]: coefficient of lambda_n in the superdiagonal entry (k-1, k)
        D = np.zeros((R, R))
        for n in range(R):
            for (a, b), w in _d1_weighted_unit(constants, n, n).items():
                if b != a + 1 or abs(w.imag) > 0:
                    raise AssertionError("diagonal elements should only feed the superdiagonal")
                D[a, n] += w.real
        self.D = D

    def solve(self, tol: float, max_iter: int):
        R = self.constants.size
        # lambda_n = q^n z_n keeps the entries of order one
        scale = self.constants.q ** np.arange(R, dtype=float)
        Ds = self.D * scale[None, :]
        A = sp.csc_matrix(np.vstack([Ds, -Ds]))
        b = np.full(2 * R, self.radius)
        solver = clarabel.DefaultSolver(
            sp.csc_matrix((R, R)), -self.g * scale, A, b,
            [clarabel.NonnegativeConeT(2 * R)], _clarabel_settings(tol, max_iter),
        )
        sol = solver.solve()
        lam = np.array(sol.x) * scale
        z = np.array(sol.z)
        # crossover: the dual picks an active side for every row, and D is
        # square, so that sign pattern fixes a vertex of the box exactly
        side = np.sign(z[:R] - z[R:])
        side[side == 0] = np.sign(self.D @ lam)[side == 0]
        vertex = np.linalg.solve(self.D, self.radius * side)
        if self.g @ vertex > self.g @ lam:
            lam = vertex
        x = PodlesElement(0.0, np.diag(lam), self.constants)
        return x, int(sol.iterations), str(sol.status), z

    def dual_bound(self, z: np.ndarray) -> float:
        # D is square and triangular, so the dual equality has exactly one solution
        u = np.linalg.solve(self.D.T, self.g)
        return self.radius * float(np.sum(np.abs(u)))


def _certify(x: PodlesElement, G: np.ndarray, radius: float) -> Tuple[PodlesElement, float]:
    # hermitize away solver round-off, then pull back into the ball
    x = PodlesElement(0.0, (x.lam + x.lam.conj().T) / 2, x.constants)
    L = seminorm_L(x)
    if L > radius:
        x = x * (radius / L)
    return x, float(np.real(np.trace(G @ x.lam)))


def _solve_window(s1: QState, s2: QState, constants: ModelConstants, config: SolverConfig):
    G = objective_matrix(s1, s2)
    if not np.any(G):
        return PodlesElement.zero(constants), 0.0, 0.0, 0, True, "trivial", (0.0,)
    diagonal = not np.any(G - np.diag(np.diag(G)))
    prob = _LP(constants, G, config.radius) if (diagonal and config.use_symmetry) else _SDP(constants, G, config.radius)
    method = "lp-circle" if isinstance(prob, _LP) else prob.method

    best_x, best_v = PodlesElement.zero(constants), 0.0
    history: List[float] = []
    iters = 0
    ok = True
    last_z = None
    stationary = 0
    for tol in config.ladder():
        budget = config.max_iter - iters
        if budget <= 0:
            ok = False
            break
        x, it, status, z = prob.solve(tol, min(budget, 1000))
        iters += it
        if status not in _OK:
            log.warning("conic solve at tol %.1e ended with status %s", tol, status)
            ok = False
            continue
        x, v = _certify(x, G, config.radius)
        prev = history[-1] if history else None
        if v > best_v:
            best_x, best_v = x, v
        history.append(best_v)
        last_z = z
        if prev is not None and abs(best_v - prev) <= config.tolerance * max(1.0, abs(best_v)):
            stationary += 1
        else:
            stationary = 0
    converged = ok and stationary >= config.stationary_window
    upper = prob.dual_bound(last_z) if last_z is not None else math.inf
    return best_x, best_v, upper, iters, converged, method, tuple(history)


def mk_distance(s1: QState, s2: QState, constants: ModelConstants,
                config: SolverConfig | None = None) -> MKResult:
    """Certified lower bound for sup{ s1(x) - s2(x) : L(x) <= radius }."""
    config = config or SolverConfig()
    if s1.N != constants.N or s2.N != constants.N:
        raise ConstantsMismatch(f"states on windows {s1.N}, {s2.N}; model window {constants.N}")
    x, v, upper, iters, converged, method, history = _solve_window(s1, s2, constants, config)

    gap = math.nan
    if config.compute_gap and constants.N >= 2:
        half = constants.N // 2
        try:
            h1, h2 = s1.resized(half), s2.resized(half)
        except ValueError:
            h1 = None
        if h1 is not None:
            _, vh, _, it_h, conv_h, _, _ = _solve_window(h1, h2, constants.with_N(half), config)
            gap = abs(v - vh)
            iters += it_h
            converged = converged and conv_h
    if not converged:
        log.warning("mk_distance did not reach stationarity; returning best feasible value %.12g", v)
    return MKResult(v, x, gap, iters, config.tolerance, upper, converged, method, history)


# -- quantized-interval table ----------------------------------------------


@dataclass(frozen=True)
class IntervalRow:
    q: float
    N: int
    k: int
    d_consecutive: float
    d_from_zero: float
    d_from_psi_infty: float
    gap_estimate: float
    iterations: int
    converged: bool = True


CSV_COLUMNS = ["q", "N", "k", "d_consecutive", "d_from_zero", "d_from_psi_infty",
               "gap_estimate", "iterations"]


def interval_metric_table(constants: ModelConstants, kmax: int,
                          config: SolverConfig | None = None) -> List[IntervalRow]:
    """d(omega_k, omega_k+1), d(omega_0, omega_k), d(psi_inf, omega_k) for k <= kmax."""
    config = config or SolverConfig()
    if kmax < 0 or kmax > constants.N // 2:
        raise ValueError(f"kmax must lie in 0..N/2 = {constants.N // 2}, got {kmax}")
    psi = psi_infinity(constants)
    rows = []
    for k in range(kmax + 1):
        res = [
            mk_distance(vector_state(k, constants), vector_state(k + 1, constants), constants, config),
            mk_distance(vector_state(0, constants), vector_state(k, constants), constants, config),
            mk_distance(psi, vector_state(k, constants), constants, config),
        ]
        gaps = [r.gap_estimate for r in res if not math.isnan(r.gap_estimate)]
        rows.append(IntervalRow(
            constants.q, constants.N, k,
            res[0].value, res[1].value, res[2].value,
            max(gaps) if gaps else math.nan,
            sum(r.iterations for r in res),
            all(r.converged for r in res),
        ))
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def table_to_csv(rows: List[IntervalRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def table_to_json(rows: List[IntervalRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"


# -- fiber Lip-balls --------------------------------------------------------


def _fiber_element(lam_col: np.ndarray, k: int, constants: ModelConstants) -> PodlesElement:
    lam = np.zeros((constants.size, constants.size), dtype=complex)
    lam[:, k] = lam_col
    return PodlesElement(0.0, lam, constants)


def fiber_ball_extremal(k: int, constants: ModelConstants, starts: int = 8,
                        seed: int = 0) -> Tuple[float, PodlesElement]:
    """max ||x|| over x = sum lambda_n f_{n,k} with ||d1(x)|| <= 1.

    Maximizing a norm over a convex body: equivalently minimize
    ||d1(x)||^2 / ||x||^2 over directions, from several random starts.

    The maximizer is not unique.  Column k+1 of the weighted derivative is
    a fixed multiple of lambda, so ||d1(x)|| / ||x|| already reaches its
    minimum whenever column k is orthogonal to column k+1 and no longer.
    Among those the search prefers the element whose column k is smallest
    (adding ||column k||^2, which vanishes only on multiples of f_{0,k}),
    so the returned witness is canonical.
    """
    if not 0 <= k <= constants.N - 1:
        raise IndexError(f"fiber index {k} outside 0..{constants.N - 1}")
    rng = np.random.default_rng(seed)
    # lambda_n = q^n z_n: the derivative weights grow like q^-n
    pre = constants.q ** np.arange(constants.size, dtype=float)

    def weighted(z):
        lam = pre * z
        nv = np.linalg.norm(lam)
        if nv == 0:
            return None
        return d1(_fiber_element(lam / nv, k, constants)).weighted()

    def ratio(z):
        w = weighted(z)
        return math.inf if w is None else float(np.linalg.norm(w, 2)) ** 2

    def objective(z):
        nz = np.linalg.norm(z)
        if nz == 0:
            return math.inf
        w = d1(_fiber_element(pre * z / nz, k, constants)).weighted()
        # column k+1 is a fixed multiple of lambda, so the first term is
        # scale free; column k is of order |z| in these coordinates
        return (float(np.linalg.norm(w, 2)) ** 2 / float(np.linalg.norm(w[:, k + 1])) ** 2
                + float(np.linalg.norm(w[:, k])) ** 2)

    best = None
    for _ in range(starts):
        res = scipy.optimize.minimize(objective, rng.standard_normal(constants.size), method="BFGS",
                                      options={"gtol": 1e-14, "maxiter": 5000})
        if best is None or res.fun < best.fun:
            best = res
    lam = pre * best.x
    lam = lam / np.linalg.norm(lam)
    x = _fiber_element(lam / math.sqrt(ratio(best.x)), k, constants)
    # certify: pull back into the ball if round-off left it outside
    L = deriv_norm(d1(x))
    if L > 1:
        x = x * (1 / L)
    return cstar_norm(x), x


def fiber_extremal_value(k: int, q: float) -> float:
    """q^k (1 - q^2)(1 - q^(2(k+1)))^(-1/2)."""
    return q ** k * (1 - q * q) / math.sqrt(1 - q ** (2 * (k + 1)))


def decay_bound(n: int, q: float) -> float:
    """Coefficient bound for the fiber Lip-ball: q^(n-1)(1-q^2)(1-q^(2n))^(-1/2), and q^-1 at n = 0."""
    if n == 0:
        return 1 / q
    return q ** (n - 1) * (1 - q * q) / math.sqrt(1 - q ** (2 * n))


@dataclass
class DecayReport:
    k: int
    samples: int
    violations: int
    max_ratio: float
    worst_index: int = -1
    details: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def coefficient_decay_audit(k: int, samples: int, constants: ModelConstants,
                            seed: int = 0, extra: List[PodlesElement] | None = None) -> DecayReport:
    """Check |lambda_n| <= decay_bound(n) on feasible fiber elements.

    Directions are Gaussian with three profiles (flat, q^n-decaying, and
    concentrated on the first few coefficients), scaled onto the boundary
    ||d1(x)|| = 1.
    """
    rng = np.random.default_rng(seed)
    q, size = constants.q, constants.size
    bounds = np.array([decay_bound(n, q) for n in range(size)])
    cands: List[np.ndarray] = []
    for s in range(samples):
        v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        profile = s % 3
        if profile == 1:
            v = v * q ** np.arange(size)
        elif profile == 2:
            v[4:] = 0
        x = _fiber_element(v, k, constants)
        L = deriv_norm(d1(x))
        if L > 0:
            cands.append(v / L)
    for x in extra or []:
        cands.append(np.asarray(x.lam[:, k]))
    violations, worst, worst_n, details = 0, 0.0, -1, []
    for idx, v in enumerate(cands):
        r = np.abs(v) / bounds
        n = int(np.argmax(r))
        if r[n] > worst:
            worst, worst_n = float(r[n]), n
        bad = np.nonzero(r > 1 + 1e-12)[0]
        violations += len(bad)
        details.extend((idx, int(b), float(r[b])) for b in bad)
    return DecayReport(k, len(cands), violations, worst, worst_n, details)


def global_ball_bound(q: float) -> float:
    """2 (1 - q)^(-2): norm bound on {x : L(x) <= 1, psi_inf(x) = 0}."""
    return 2 / (1 - q) ** 2


def random_feasible(constants: ModelConstants, rng: np.random.Generator,
                    hermitian: bool = False) -> PodlesElement:
    """Random element with mu = 0 scaled onto L(x) = 1 (profile alternates flat / decaying)."""
    size = constants.size
    lam = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    if rng.random() < 0.5:
        idx = np.arange(size)
        lam = lam * constants.q ** np.maximum.outer(idx, idx)
    if hermitian:
        lam = (lam + lam.conj().T) / 2
    x = PodlesElement(0.0, lam, constants)
    return x * (1 / seminorm_L(x))
