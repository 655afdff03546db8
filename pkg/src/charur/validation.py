"""Property suites backing ``charur validate`` and the acceptance tests.

Each suite returns a list of :class:`Check` rows; one row per acceptance
criterion, each carrying a short human-readable detail line.
"""

from dataclasses import dataclass
import math
import time

import numpy as np

from .algebra import ObservableSet, fock_quadratures, su11_generators, su2_generators
from .matcore import char_coeffs_minors
from .moments import moment_pair
from .mussearch import SearchSpec, minimize_gap
from .states import (
    AlgebraicCSParams,
    TruncationError,
    algebraic_cs_eigensolve,
    algebraic_cs_series,
    bloch_cs,
    fock_state,
    haar_state,
    random_mixed_state,
    spin_state,
    squeezed_thermal_state,
    squeezed_vacuum,
    su11_cs,
    su11_lowest,
    thermal_state,
    vacuum,
)
from .truncation import converge
from .urengine import (
    VIOLATION_TOL,
    beta_system_verify,
    characteristic_ur,
    invariance_suite,
    pairwise_schrodinger,
    trace_ur,
    ur_from_moments,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _random_hermitian(dim, rng):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (A + A.conj().T) / 2


def theorem_random(draws=10_000, seed=1):
    """Characteristic relation on random states and random Hermitian sets."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for i in range(draws):
        n = int(rng.integers(2, 5))
        dim = int(rng.integers(2, 9))
        mats = [_random_hermitian(dim, rng) for _ in range(n)]
        obs = ObservableSet([f"X{j + 1}" for j in range(n)], mats)
        state = haar_state(dim, rng) if i % 2 == 0 else random_mixed_state(dim, rng)
        mp = moment_pair(obs, state)
        report = ur_from_moments(mp)
        worst = min(worst, report.min_relative_gap)
    return Check(
        "characteristic UR on random states",
        worst >= -VIOLATION_TOL,
        f"{draws} draws, worst relative gap {worst:.3e}",
    )


def matrix_theorem_random(draws=10_000, seed=2):
    """C_r(S) >= C_r(K) for random PSD Hermitian S + iK of unit trace."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(draws):
        n = int(rng.integers(2, 9))
        rank = int(rng.integers(1, n + 1))
        G = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
        H = G @ G.conj().T
        H /= np.trace(H).real
        S, K = H.real, H.imag
        gaps = char_coeffs_minors(S) - char_coeffs_minors(K)
        worst = min(worst, float(gaps[1:].min()))
    return Check(
        "matrix theorem on random PSD S + iK",
        worst >= -1e-10,
        f"{draws} draws, worst gap {worst:.3e}",
    )


def _su11_cs_saturation(zeta, k):
    obs_cache = {}

    def evaluate(dim):
        obs = obs_cache.setdefault(dim, su11_generators(k, dim))
        report = characteristic_ur(obs, su11_cs(zeta, k, dim), orders=[2, 3])
        return report, [o.lhs for o in report.orders] + [o.rhs for o in report.orders]

    report, _ = converge(evaluate)
    return report


def saturation_claims():
    """su(1,1) and su(2) coherent states saturate orders 2 and 3."""
    failures = []
    worst = 0.0
    for k in (0.25, 0.75, 0.5, 1.0):
        for zeta in (0.1, 0.3, 0.5, 0.7):
            report = _su11_cs_saturation(zeta, k)
            for o in report.orders:
                worst = max(worst, o.gap / max(1.0, abs(o.lhs)))
                if not o.saturated:
                    failures.append(f"su11 k={k} zeta={zeta} r={o.r}")
    worst_bloch = 0.0
    rng = np.random.default_rng(3)
    for j in (0.5, 1.0, 1.5, 2.0):
        obs = su2_generators(j)
        for tau in (0.3, 1.0 + 0.5j, complex(*rng.normal(size=2))):
            report = characteristic_ur(obs, bloch_cs(tau, j), tol=1e-12, orders=[2, 3])
            for o in report.orders:
                worst_bloch = max(worst_bloch, o.gap / max(1.0, abs(o.lhs)))
                if not o.saturated:
                    failures.append(f"bloch j={j} tau={tau} r={o.r}")
    return Check(
        "coherent-state saturation (orders 2, 3)",
        not failures,
        f"worst su11 gap {worst:.2e}, worst bloch gap {worst_bloch:.2e}"
        + (f"; unsaturated: {failures}" if failures else ""),
    )


def closed_form_anchors():
    rows = []
    up = characteristic_ur(su2_generators(0.5), spin_state(0.5, 0.5))[2]
    rows.append(("spin-1/2 up r=2", up.lhs, up.rhs, 1 / 16))
    for k in (0.25, 0.5, 1.0, 2.0):
        low = characteristic_ur(su11_generators(k, 32), su11_lowest(k, 32))[2]
        rows.append((f"|k,0> k={k} r=2", low.lhs, low.rhs, k**2 / 4))
    mp = moment_pair(fock_quadratures(1, 16), vacuum(16))
    rows.append(("vacuum det", np.linalg.det(mp.sigma), np.linalg.det(mp.cmat), 0.25))
    bad = [name for name, lhs, rhs, want in rows
           if abs(lhs - want) > 1e-12 or abs(rhs - want) > 1e-12]
    return Check(
        "closed-form anchors",
        not bad,
        "; ".join(f"{name}: {lhs:.15g}/{rhs:.15g}" for name, lhs, rhs, _ in rows),
    )


def schrodinger_checks():
    dim = 128
    obs = fock_quadratures(1, dim)
    q, p = obs.matrices
    details = []
    ok = True
    for r in (0.25, 0.5, 1.0):
        rep = pairwise_schrodinger(q, p, squeezed_vacuum(r, dim), tol=1e-9)
        ok = ok and rep.saturated_schrodinger
        details.append(f"r={r}: {rep.lhs_schrodinger:.12g} vs {rep.rhs:.12g}")
    q16, p16 = fock_quadratures(1, 16).matrices
    one = pairwise_schrodinger(q16, p16, fock_state(1, 16), tol=1e-9)
    fock_ok = abs(one.lhs_heisenberg - 2.25) < 1e-12 and abs(one.rhs - 0.25) < 1e-12
    details.append(f"|1>: {one.lhs_heisenberg:.15g} vs {one.rhs:.15g}")
    return Check("Schrodinger saturation and Fock |1>", bool(ok and fock_ok), "; ".join(details))


def trace_checks(states=100, seed=4):
    dim = 128
    obs = fock_quadratures(1, dim)
    q, p = obs.matrices
    vac = trace_ur(obs, vacuum(dim), orders=(1, 2))
    anchors_ok = (
        abs(vac[1].lhs - 0.5) < 1e-12 and abs(vac[1].rhs - 0.5) < 1e-12
        and abs(vac[2].lhs - 0.125) < 1e-12 and abs(vac[2].rhs - 0.125) < 1e-12
    )
    # sigma = I: thermal state with nbar = 1/2
    th = trace_ur(fock_quadratures(1, 96), thermal_state(0.5, 96), orders=(1,))
    strict_ok = th[1].lhs - th[1].rhs > 1e-3
    rng = np.random.default_rng(seed)
    mismatches = 0
    saturated = 0
    for i in range(states):
        r = rng.uniform(0, 0.7)
        phi = rng.uniform(0, 2 * np.pi)
        nbar = 0.0 if i % 2 == 0 else rng.uniform(0.05, 0.4)
        state = squeezed_thermal_state(r, phi, nbar, dim)
        t = trace_ur(obs, state, orders=(1,))[1]
        s = pairwise_schrodinger(q, p, state, tol=1e-9)
        saturated += t.saturated
        mismatches += t.saturated != s.saturated_schrodinger
    return Check(
        "trace UR anchors and co-saturation",
        bool(anchors_ok and strict_ok and mismatches == 0),
        f"vacuum k=1 {vac[1].lhs:.12g}/{vac[1].rhs:.12g}, k=2 {vac[2].lhs:.12g}/"
        f"{vac[2].rhs:.12g}; sigma=I {th[1].lhs:.6g} > {th[1].rhs:.6g}; "
        f"{saturated}/{states} saturated, {mismatches} mismatches",
    )


def _random_algebraic_params(rng, k):
    """Draw (u, v, w, z) whose prefactor rates both lie inside radius 0.7."""
    u = complex(*rng.normal(size=2))
    u /= abs(u)
    u *= rng.uniform(0.5, 1.5)
    roots = [rng.uniform(0.05, 0.7) * np.exp(1j * rng.uniform(0, 2 * np.pi)) for _ in range(2)]
    w = -u * (roots[0] + roots[1])
    v = u * roots[0] * roots[1]
    z = complex(*rng.normal(size=2))
    return AlgebraicCSParams(z, u, v, w, k)


def cross_construction(draws=20, seed=5):
    rng = np.random.default_rng(seed)
    worst = 1.0
    for _ in range(draws):
        k = float(rng.choice([0.25, 0.5, 0.75, 1.0, 1.5]))
        params = _random_algebraic_params(rng, k)
        dim = 96
        while True:
            try:
                series = algebraic_cs_series(params, dim)
                eig, _ = algebraic_cs_eigensolve(
                    params.u, params.v, params.w, k, dim, target=params.z
                )
                break
            except TruncationError:
                dim *= 2
                if dim > 1024:
                    raise
        worst = min(worst, abs(np.vdot(series.vector, eig.vector)))
    beta_worst = 0.0
    notes = []
    for zeta in (0.3, 0.5):
        for k in (0.5, 1.0):
            report = beta_system_verify(zeta, k)
            beta_worst = max(beta_worst, report.max_residual)
            notes.extend(report.notes[1:])
    passed = worst > 1 - 1e-8 and beta_worst < 1e-8
    return Check(
        "series vs eigensolve and pairwise eigen-system",
        bool(passed),
        f"worst overlap 1-{1 - worst:.1e}; worst eigen-system residual {beta_worst:.1e}; "
        f"{len(notes)} eigenvalue-formula mismatches flagged",
    )


def optimizer_checks(restarts=2, seed=0):
    spin = su2_generators(0.5)
    res = minimize_gap(SearchSpec(spin, 2, restarts=4, seed=seed))
    spin_ok = res.best_gap < 1e-8
    obs = fock_quadratures(1, 20)
    # with equal weights C_1(sigma) is the summed variance
    fock = minimize_gap(SearchSpec(obs, 1, restarts=restarts, seed=seed, max_evals=40000))
    fock_ok = abs(fock.best_gap - 1.0) < 1e-6
    return Check(
        "optimizer recovers known minima",
        bool(spin_ok and fock_ok),
        f"spin-1/2 r=2 gap {res.best_gap:.2e}; d=20 min var q + var p = {fock.best_gap:.10f}",
    )


def invariance_checks(rotations=100, seed=6):
    cases = [
        ("su2 bloch", su2_generators(1.0), bloch_cs(0.4 + 0.2j, 1.0)),
        ("su2 spin", su2_generators(1.5), spin_state(0.5, 1.5)),
        ("su11 cs", su11_generators(0.75, 128), su11_cs(0.4, 0.75, 128)),
        ("su11 lowest", su11_generators(0.5, 32), su11_lowest(0.5, 32)),
    ]
    failed = []
    for name, obs, state in cases:
        report = invariance_suite(obs, state, trials=rotations, seed=seed)
        if not report.passed:
            failed.append(name)
    return Check(
        "saturation flags under orthogonal maps",
        not failed,
        f"{rotations} rotations on {len(cases)} states" + (f"; failed: {failed}" if failed else ""),
    )


def draws_scaled(draws):
    """Keyword overrides that shrink randomized suites to ``draws`` samples."""
    if draws is None:
        return {}
    return {
        "theorem": {"draws": draws},
        "matrix": {"draws": draws},
        "trace": {"states": min(draws, 100)},
        "cross": {"draws": min(draws, 20)},
        "invariance": {"rotations": min(draws, 100)},
    }


SUITES = {
    "theorem": theorem_random,
    "matrix": matrix_theorem_random,
    "saturation": saturation_claims,
    "anchors": closed_form_anchors,
    "schrodinger": schrodinger_checks,
    "trace": trace_checks,
    "cross": cross_construction,
    "optimizer": optimizer_checks,
    "invariance": invariance_checks,
}


def run_suites(name="all", draws=None):
    """Run one suite by name, or all of them in acceptance order."""
    if name != "all" and name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {['all', *SUITES]}")
    overrides = draws_scaled(draws)
    names = list(SUITES) if name == "all" else [name]
    out = []
    for key in names:
        start = time.perf_counter()
        check = SUITES[key](**overrides.get(key, {}))
        check.seconds = time.perf_counter() - start
        out.append(check)
    return out
