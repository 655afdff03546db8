"""Derivative-free search for minimum-uncertainty states.

The objective is the order-r characteristic gap C_r(sigma) - C_r(C). States
are parameterized either over the whole pure-state sphere of a small space or
through a named state family. Minimization uses Nelder-Mead with seeded
random restarts; each restart polishes its simplex until it stops improving.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize

from .algebra import RepSpec
from .moments import moment_pair
from .states import QuantumState, TruncationError, make_state
from .urengine import (
    OPTIMIZER_TOL,
    VIOLATION_TOL,
    characteristic_ur,
    subset_saturation_check,
    ur_from_moments,
)

PENALTY = 1e6


class TheoremViolation(RuntimeError):
    """An evaluated gap fell below -1e-10 relative: a bug, not a result."""


class SearchError(RuntimeError):
    """Every restart failed to produce a finite objective value."""


def hyperspherical_state(x, dim):
    """Unit vector from ``2 dim - 2`` reals: dim-1 angles then dim-1 phases.

    Component 0 is real and nonnegative for angles in [0, pi/2]; any real
    input gives a unit vector.
    """
    x = np.asarray(x, dtype=float)
    if x.size != 2 * dim - 2:
        raise ValueError(f"need {2 * dim - 2} parameters for dim {dim}")
    angles, phases = x[: dim - 1], x[dim - 1 :]
    amp = np.ones(dim)
    s = 1.0
    for i, a in enumerate(angles):
        amp[i] = s * math.cos(a)
        s *= math.sin(a)
    amp[-1] = s
    c = amp.astype(complex)
    c[1:] *= np.exp(1j * phases)
    return c


def _to_box(x, bounds):
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    return lo + (hi - lo) * (np.sin(x) + 1) / 2


@dataclass
class SearchSpec:
    """What to minimize and how.

    ``family`` is ``"pure"`` for the full pure-state sphere of ``obs.dim``, or
    a state family name; family parameters are named in ``bounds`` (a dict of
    name -> (lo, hi), complex parameters split as ``name.re`` / ``name.im``)
    and built on ``rep``.
    """

    obs: object
    order: int
    family: str = "pure"
    bounds: dict = field(default_factory=dict)
    rep: RepSpec | None = None
    restarts: int = 8
    max_evals: int = 20000
    simplex_scale: float = 0.5
    seed: int = 0
    tol: float = OPTIMIZER_TOL
    workers: int = 1

    def __post_init__(self):
        if not 1 <= self.order <= self.obs.n:
            raise ValueError(f"order {self.order} outside 1..{self.obs.n}")
        for name, (lo, hi) in self.bounds.items():
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad range for {name}: {(lo, hi)}")
        if self.family != "pure" and not self.bounds:
            raise ValueError("family search needs parameter bounds")

    @property
    def nparams(self):
        if self.family == "pure":
            return 2 * self.obs.dim - 2
        return len(self.bounds)

    def family_params(self, x):
        values = _to_box(x, list(self.bounds.values()))
        params = {}
        for name, val in zip(self.bounds, values):
            base, _, part = name.partition(".")
            params[base] = params.get(base, 0) + (1j * val if part == "im" else val)
        return params

    def build(self, x):
        if self.family == "pure":
            return QuantumState("pure", hyperspherical_state(x, self.obs.dim))
        return make_state(self.family, self.family_params(x), self.rep)


@dataclass
class SearchResult:
    best_params: list
    best_gap: float
    best_state: QuantumState
    eval_count: int
    converged: bool
    trace: list
    certification: dict | None = None

    def to_dict(self):
        psi = self.best_state.vector
        return {
            "bestParams": self.best_params,
            "bestGap": self.best_gap,
            "bestState": {"re": psi.real.tolist(), "im": psi.imag.tolist()},
            "evalCount": self.eval_count,
            "converged": self.converged,
            "trace": self.trace,
            "certification": self.certification,
        }

    @classmethod
    def from_dict(cls, data):
        psi = np.array(data["bestState"]["re"]) + 1j * np.array(data["bestState"]["im"])
        return cls(
            data["bestParams"],
            data["bestGap"],
            QuantumState("pure", psi),
            data["evalCount"],
            data["converged"],
            data["trace"],
            data["certification"],
        )


def _objective(spec):
    r = spec.order

    def f(x):
        try:
            state = spec.build(x)
            mp = moment_pair(spec.obs, state)
        except TruncationError:
            return PENALTY
        row = ur_from_moments(mp, spec.tol, [r])[r]
        if row.gap < -VIOLATION_TOL * max(1.0, abs(row.lhs)):
            raise TheoremViolation(
                f"order-{r} gap {row.gap:.3e} below zero at parameters {list(x)}"
            )
        return row.gap

    return f


def _run_restart(spec, seed_seq):
    rng = np.random.default_rng(seed_seq)
    n = spec.nparams
    if spec.family == "pure":
        d = spec.obs.dim
        x0 = np.concatenate([rng.uniform(0, np.pi, d - 1), rng.uniform(0, 2 * np.pi, d - 1)])
    else:
        x0 = rng.uniform(-np.pi / 2, np.pi / 2, n)
    f = _objective(spec)
    budget = spec.max_evals
    x, fx = x0, f(x0)
    evals = 1
    success = False
    scale = spec.simplex_scale
    while budget - evals > n + 1:
        simplex = np.vstack([x, x + scale * np.eye(n)])
        res = minimize(
            f,
            x,
            method="Nelder-Mead",
            options={
                "maxfev": budget - evals,
                "xatol": 1e-10,
                "fatol": 1e-14,
                "adaptive": n > 4,
                "initial_simplex": simplex,
            },
        )
        evals += res.nfev
        improved = fx - res.fun
        if res.fun < fx:
            x, fx = res.x, float(res.fun)
        success = success or bool(res.success)
        if improved <= 1e-12 * max(1.0, abs(fx)) or fx <= 0:
            break
        scale = max(scale / 2, 1e-3)
    return x, fx, evals, success


def minimize_gap(spec):
    """Multi-restart simplex minimization of the order-r characteristic gap."""
    seeds = np.random.SeedSequence(spec.seed).spawn(spec.restarts)
    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            runs = list(pool.map(lambda s: _run_restart(spec, s), seeds))
    else:
        runs = [_run_restart(spec, s) for s in seeds]
    finite = [i for i, run in enumerate(runs) if np.isfinite(run[1]) and run[1] < PENALTY]
    if not finite:
        raise SearchError("all restarts failed to reach a valid state")
    # first index wins ties, so results follow seed order
    best = min(finite, key=lambda i: (runs[i][1], i))
    x, fx, _, _ = runs[best]
    state = spec.build(x)
    certification = None
    if fx < spec.tol:
        p1 = subset_saturation_check(spec.obs, state, spec.order, spec.tol)
        certification = {
            "subsetsAllSaturated": p1.subsets_all_saturated,
            "orderSaturated": p1.order_saturated,
            "implicationHolds": p1.implication_holds,
        }
    return SearchResult(
        [float(v) for v in x],
        float(fx),
        state,
        int(sum(run[2] for run in runs)),
        bool(fx < spec.tol or any(run[3] for run in runs)),
        [float(run[1]) for run in runs],
        certification,
    )


def sweep(family, grid, obs, rep, orders=None, tol=1e-8):
    """One characteristic-UR row per grid point; failures are kept in-row.

    ``grid`` is a sequence of parameter dicts passed to :func:`make_state`.
    """
    rows = []
    for params in grid:
        row = {"params": dict(params), "dim": obs.dim}
        try:
            state = make_state(family, params, rep)
            report = characteristic_ur(obs, state, tol, orders)
            mp = moment_pair(obs, state)
        except (ValueError, RuntimeError) as exc:
            row["error"] = str(exc)
            rows.append(row)
            continue
        row["tail_mass"] = state.tail_mass
        row["means"] = dict(zip(obs.labels, mp.means.tolist()))
        row["orders"] = {o.r: o for o in report.orders}
        row["error"] = None
        rows.append(row)
    return rows
