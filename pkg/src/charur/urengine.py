"""Uncertainty relations: characteristic (all orders), Schrodinger and
Heisenberg pairs, Robertson (top order), and the symplectic trace relation.
Also the saturation machinery: the all-subsets criterion and the
three-combination eigen-system for the su(1,1) coherent states.
"""

from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from numpy.linalg import matrix_power
from scipy.stats import ortho_group

from .algebra import su11_generators
from .matcore import (
    NotPositiveDefiniteError,
    char_coeffs_minors,
    minors_of_order,
    symplectic_form,
    williamson,
)
from .moments import eigenstate_residual, expectation, moment_pair
from .states import su11_cs, tail_mass

SATURATION_TOL = 1e-8
OPTIMIZER_TOL = 1e-6
VIOLATION_TOL = 1e-10


class EigenSystemMismatchError(RuntimeError):
    """A claimed eigen-system is not satisfied for either sign convention."""


def _scale(lhs):
    return max(1.0, abs(lhs))


@dataclass
class OrderResult:
    r: int
    lhs: float
    rhs: float
    gap: float
    saturated: bool


@dataclass
class URReport:
    orders: list
    tol: float
    n: int
    dim: int | None = None
    tail_mass: float = 0.0
    violation_tol: float = VIOLATION_TOL

    def __getitem__(self, r):
        for row in self.orders:
            if row.r == r:
                return row
        raise KeyError(r)

    @property
    def violated(self):
        return any(o.gap < -self.violation_tol * _scale(o.lhs) for o in self.orders)

    @property
    def min_relative_gap(self):
        return min(o.gap / _scale(o.lhs) for o in self.orders)

    def to_dict(self):
        return {
            "perOrder": [asdict(o) for o in self.orders],
            "tolerances": {"saturation": self.tol, "violation": self.violation_tol},
            "diagnostics": {"n": self.n, "dim": self.dim, "tailMass": self.tail_mass},
            "violated": self.violated,
        }

    @classmethod
    def from_dict(cls, data):
        diag = data["diagnostics"]
        return cls(
            [OrderResult(**row) for row in data["perOrder"]],
            data["tolerances"]["saturation"],
            diag["n"],
            diag["dim"],
            diag["tailMass"],
            data["tolerances"]["violation"],
        )


def ur_from_moments(mp, tol=SATURATION_TOL, orders=None, dim=None):
    n = mp.n
    orders = list(range(1, n + 1)) if orders is None else sorted(orders)
    for r in orders:
        if not 1 <= r <= n:
            raise ValueError(f"order {r} outside 1..{n}")
    lhs = char_coeffs_minors(mp.sigma)
    rhs = char_coeffs_minors(mp.cmat)
    rows = []
    for r in orders:
        gap = float(lhs[r] - rhs[r])
        rows.append(
            OrderResult(r, float(lhs[r]), float(rhs[r]), gap, bool(gap <= tol * _scale(lhs[r])))
        )
    return URReport(rows, tol, n, dim, mp.tail_mass)


def characteristic_ur(obs, state, tol=SATURATION_TOL, orders=None):
    """C_r(sigma) >= C_r(C) for the requested orders (default all)."""
    if obs.n > 12:
        raise ValueError("characteristic_ur supports n <= 12")
    return ur_from_moments(moment_pair(obs, state), tol, orders, state.dim)


@dataclass
class PairReport:
    var_x: float
    var_y: float
    covariance: float
    lhs_heisenberg: float
    lhs_schrodinger: float
    rhs: float
    saturated_heisenberg: bool
    saturated_schrodinger: bool


def pairwise_schrodinger(X, Y, state, tol=1e-9):
    """Heisenberg (var X var Y) and Schrodinger (minus covariance squared)
    left-hand sides against |<[X, Y]>|^2 / 4."""
    mx, my = expectation(X, state), expectation(Y, state)
    vx = expectation(X @ X, state) - mx**2
    vy = expectation(Y @ Y, state) - my**2
    cov = expectation((X @ Y + Y @ X) / 2, state) - mx * my
    comm = expectation(-1j * (X @ Y - Y @ X), state)
    rhs = comm**2 / 4
    heis = vx * vy
    schr = heis - cov**2
    return PairReport(
        vx,
        vy,
        cov,
        heis,
        schr,
        rhs,
        bool(heis - rhs <= tol * _scale(heis)),
        bool(schr - rhs <= tol * _scale(schr)),
    )


@dataclass
class TraceOrder:
    k: int
    lhs: float
    rhs: float
    holds: bool
    saturated: bool


@dataclass
class TraceURReport:
    orders: list
    nus: list
    transform: list
    tol: float

    def __getitem__(self, k):
        for row in self.orders:
            if row.k == k:
                return row
        raise KeyError(k)

    def to_dict(self):
        return {
            "perK": [asdict(o) for o in self.orders],
            "nus": self.nus,
            "lambda": self.transform,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            [TraceOrder(**row) for row in data["perK"]],
            data["nus"],
            data["lambda"],
            data["tol"],
        )


def trace_ur(obs, state, orders=(1,), tol=1e-9):
    """Tr((i sigma J)^(2k)) >= 2^(1-2k) sum_nu |<[X'_nu, X'_(N+nu)]>|^(2k).

    ``X' = L X`` with ``L`` the Williamson matrix of ``sigma``; ``sigma`` must
    be positive definite.
    """
    if obs.n % 2:
        raise ValueError("trace relation needs an even number of observables")
    N = obs.n // 2
    if N not in (1, 2):
        raise ValueError("trace relation supported for N = 1 or 2 modes")
    mp = moment_pair(obs, state)
    try:
        L, nus = williamson(mp.sigma)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(
            "trace relation requires a positive definite uncertainty matrix"
        ) from exc
    primed = obs.transformed(L)
    comms = []
    for nu in range(N):
        A, B = primed.matrices[nu], primed.matrices[N + nu]
        comms.append(abs(expectation(-1j * (A @ B - B @ A), state)))
    comms = np.array(comms)
    M = 1j * mp.sigma @ symplectic_form(N)
    rows = []
    for k in orders:
        lhs_c = np.trace(matrix_power(M, 2 * k))
        lhs = float(lhs_c.real)
        rhs = float(2.0 ** (1 - 2 * k) * np.sum(comms ** (2 * k)))
        gap = lhs - rhs
        rows.append(
            TraceOrder(
                k, lhs, rhs, bool(gap >= -tol * _scale(lhs)), bool(gap <= tol * _scale(lhs))
            )
        )
    return TraceURReport(rows, nus.tolist(), L.tolist(), tol)


@dataclass
class SubsetResult:
    subset: tuple
    det_sigma: float
    det_c: float
    saturated: bool


@dataclass
class SubsetSaturationReport:
    r: int
    subsets: list
    subsets_all_saturated: bool
    order_saturated: bool

    @property
    def implication_holds(self):
        return (not self.subsets_all_saturated) or self.order_saturated


def subset_saturation_check(obs, state, r, tol=SATURATION_TOL):
    """Robertson saturation of every r-subset versus saturation of order r."""
    if not 1 <= r <= obs.n:
        raise ValueError(f"order {r} outside 1..{obs.n}")
    mp = moment_pair(obs, state)
    ms = minors_of_order(mp.sigma, r)
    mc = minors_of_order(mp.cmat, r)
    subsets = []
    for key in combinations(range(obs.n), r):
        ds, dc = ms[key], mc[key]
        subsets.append(SubsetResult(key, ds, dc, bool(ds - dc <= tol * _scale(ds))))
    report = ur_from_moments(mp, tol, [r])
    return SubsetSaturationReport(
        r, subsets, all(s.saturated for s in subsets), report[r].saturated
    )


@dataclass
class CombinationResult:
    name: str
    coeffs: list
    residual: float
    rayleigh: complex
    formula: complex
    formula_matches: bool


@dataclass
class BetaSystemReport:
    zeta: float
    k: float
    dim: int
    ratios: dict
    results: dict = field(default_factory=dict)
    sign: int | None = None
    notes: list = field(default_factory=list)

    @property
    def max_residual(self):
        return max(c.residual for c in self.results[self.sign])


def _auto_su11_dim(zeta, k, target=1e-28, start=32, cap=4096):
    dim = start
    while dim <= cap:
        try:
            if tail_mass(su11_cs(zeta, k, dim).vector) < target:
                return dim
        except ValueError:
            pass
        dim *= 2
    raise ValueError(f"no truncation up to {cap} fits zeta={zeta}, k={k}")


def beta_system_verify(zeta, k, dim=None, beta2=1.0, beta3p=1.0, beta3pp=1.0, tol=1e-6):
    """Check the three pairwise eigen-equations for the su(1,1) coherent state.

    The combinations are

        b1 K1 + b2 K2,   b1' K1 + b3' K3,   b2'' K2 + b3'' K3

    with b1 = i b2 (1-z^2)/(1+z^2), b1' = 2 b3' z/(1+z^2),
    b2'' = 2i b3'' z/(1-z^2) (z = zeta). Both exp(+zeta K+)|k,0> and
    exp(-zeta K+)|k,0> are tried; the sign whose residuals all fall below
    ``tol`` is recorded. Rayleigh quotients are compared with the closed-form
    eigenvalues (m = 0) and mismatches are flagged, not raised.
    """
    if not 0 < zeta < 1:
        raise ValueError("zeta must lie in (0, 1)")
    dim = dim or _auto_su11_dim(zeta, k)
    obs = su11_generators(k, dim)
    z2 = zeta**2
    b1 = 1j * beta2 * (1 - z2) / (1 + z2)
    b1p = 2 * beta3p * zeta / (1 + z2)
    b2pp = 2j * beta3pp * zeta / (1 - z2)
    combos = [
        ("K1K2", [b1, beta2, 0], 2j * k * beta2 * z2 / (1 + z2)),
        ("K1K3", [b1p, 0, beta3p], k * beta3p * (1 - z2) / (1 + z2)),
        ("K2K3", [0, b2pp, beta3pp], k * beta3pp * (1 + z2) / (1 - z2)),
    ]
    report = BetaSystemReport(
        zeta,
        k,
        dim,
        {"b1/b2": b1 / beta2, "b1'/b3'": b1p / beta3p, "b2''/b3''": b2pp / beta3pp},
    )
    report.notes.append(
        "m = 1-2k solution eta^(1-2k) exp(-zeta eta) is not analytic at eta = 0 "
        "for generic k; only m = 0 is checked"
    )
    for sign in (+1, -1):
        state = su11_cs(sign * zeta, k, dim)
        rows = []
        for name, coeffs, formula in combos:
            res, ray = eigenstate_residual(coeffs, obs, state)
            match = bool(abs(ray - formula) <= 1e-8 * max(1.0, abs(formula)))
            rows.append(CombinationResult(name, coeffs, res, ray, formula, match))
        report.results[sign] = rows
    good = [s for s in (-1, +1) if all(c.residual < tol for c in report.results[s])]
    if not good:
        raise EigenSystemMismatchError(
            f"neither sign of zeta solves the eigen-system at zeta={zeta}, k={k}"
        )
    report.sign = good[0]
    for c in report.results[report.sign]:
        if not c.formula_matches:
            report.notes.append(
                f"{c.name}: Rayleigh value {c.rayleigh:.6g} differs from the "
                f"closed-form eigenvalue {c.formula:.6g}"
            )
    return report


@dataclass
class InvarianceTrial:
    kind: str
    flags_match: bool
    max_gap_change: float
    note: str = ""


@dataclass
class InvarianceReport:
    trials: list

    @property
    def passed(self):
        return all(t.flags_match for t in self.trials)


def _flags(report):
    return [o.saturated for o in report.orders]


def invariance_suite(obs, state, trials=10, seed=0, tol=SATURATION_TOL):
    """Check that saturation flags survive transformations of the observables.

    All orders are compared under random orthogonal maps (and the identity).
    Only the top order (det sigma vs det C) is compared under a random
    nonsingular map and under the state-dependent maps L = sigma and L = C
    (the latter only when det C > 0).
    """
    rng = np.random.default_rng(seed)
    base = characteristic_ur(obs, state, tol)
    n = obs.n
    out = []

    def compare(kind, L, top_only=False):
        new = characteristic_ur(obs.transformed(L), state, tol)
        if top_only:
            old_rows, new_rows = [base[n]], [new[n]]
        else:
            old_rows, new_rows = base.orders, new.orders
        match = [a.saturated for a in old_rows] == [b.saturated for b in new_rows]
        change = max(abs(a.gap - b.gap) for a, b in zip(old_rows, new_rows))
        if kind in ("identity", "orthogonal"):
            # the characteristic coefficients themselves are invariant here
            scale = max(_scale(a.lhs) for a in old_rows)
            match = bool(match and change <= 1e-9 * scale)
        out.append(InvarianceTrial(kind, match, change))

    compare("identity", np.eye(n))
    for _ in range(trials):
        compare("orthogonal", ortho_group.rvs(n, random_state=rng))
    L = rng.normal(size=(n, n))
    while abs(np.linalg.det(L)) < 0.1:
        L = rng.normal(size=(n, n))
    compare("nonsingular", L, top_only=True)
    mp = moment_pair(obs, state)
    if abs(np.linalg.det(mp.sigma)) > 1e-12:
        compare("sigma", mp.sigma, top_only=True)
    else:
        out.append(InvarianceTrial("sigma", True, 0.0, "skipped: det sigma = 0"))
    if np.linalg.det(mp.cmat) > 1e-12:
        compare("cmat", mp.cmat, top_only=True)
    else:
        out.append(InvarianceTrial("cmat", True, 0.0, "skipped: det C <= 0"))
    return InvarianceReport(out)
