import numpy as np
import pytest

from charur.algebra import RepSpec, su11_generators, su2_generators
from charur.mussearch import SearchResult, SearchSpec, hyperspherical_state, minimize_gap, sweep
from charur.states import TruncationError
from charur.truncation import NonConvergenceError, converge


@pytest.mark.parametrize("dim", [2, 3, 6])
def test_hyperspherical_state_is_unit(dim):
    rng = np.random.default_rng(dim)
    c = hyperspherical_state(rng.normal(size=2 * dim - 2) * 5, dim)
    assert np.linalg.norm(c) == pytest.approx(1)
    with pytest.raises(ValueError):
        hyperspherical_state(np.zeros(3), dim)


def test_spin_half_search_certifies_coherent_state():
    result = minimize_gap(SearchSpec(su2_generators(0.5), 2, restarts=2, seed=3))
    assert result.best_gap < 1e-8
    assert result.certification["implicationHolds"]
    assert result.certification["orderSaturated"]


def test_search_is_deterministic():
    spec = SearchSpec(su2_generators(1.0), 2, restarts=2, seed=42, max_evals=2000)
    a, b = minimize_gap(spec), minimize_gap(spec)
    assert a.to_dict() == b.to_dict()


def test_family_search_finds_saturation():
    k, dim = 0.25, 128
    spec = SearchSpec(
        su11_generators(k, dim),
        2,
        family="su11_cs",
        bounds={"zeta.re": (-0.6, 0.6), "zeta.im": (-0.6, 0.6)},
        rep=RepSpec("su11", k, dim),
        restarts=2,
        max_evals=400,
    )
    assert minimize_gap(spec).best_gap < 1e-8


def test_search_result_round_trip():
    result = minimize_gap(SearchSpec(su2_generators(0.5), 2, restarts=1, max_evals=200))
    again = SearchResult.from_dict(result.to_dict())
    assert again.best_gap == result.best_gap
    np.testing.assert_array_equal(again.best_state.vector, result.best_state.vector)


def test_search_spec_validation():
    obs = su2_generators(0.5)
    with pytest.raises(ValueError):
        SearchSpec(obs, 4)
    with pytest.raises(ValueError):
        SearchSpec(obs, 2, family="bloch")
    with pytest.raises(ValueError):
        SearchSpec(obs, 2, family="bloch", bounds={"tau": (1.0, 0.0)})


def test_sweep_group_cs_saturated_everywhere():
    k, dim = 0.25, 512
    grid = [{"zeta": z} for z in np.arange(0, 0.81, 0.1)]
    rows = sweep("su11_cs", grid, su11_generators(k, dim), RepSpec("su11", k, dim), [2, 3])
    assert [r["params"]["zeta"] for r in rows] == [g["zeta"] for g in grid]
    for row in rows:
        assert row["error"] is None
        assert row["orders"][2].saturated and row["orders"][3].saturated
    means = [row["means"]["K3"] for row in rows]
    zetas = np.array([g["zeta"] for g in grid])
    np.testing.assert_allclose(means, k * (1 + zetas**2) / (1 - zetas**2), rtol=1e-10)


def test_sweep_records_errors_in_row():
    rows = sweep(
        "su11_cs", [{"zeta": 0.2}, {"zeta": 1.5}], su11_generators(0.5, 32), RepSpec("su11", 0.5, 32)
    )
    assert rows[0]["error"] is None
    assert "zeta" in rows[1]["error"]


def test_bloch_sweep_saturated():
    rep = RepSpec("su2", 1.0, 3)
    grid = [{"tau": t} for t in (0.0, 0.5, 1.0 + 1j, 3.0)]
    for row in sweep("bloch", grid, su2_generators(1.0), rep, [2, 3]):
        assert row["orders"][2].saturated and row["orders"][3].saturated


def test_converge_doubles_until_stable():
    calls = []

    def evaluate(dim):
        calls.append(dim)
        if dim < 64:
            raise TruncationError("too small")
        return dim, [1.0 + 1.0 / dim**10]

    result, dim = converge(evaluate, start=16, cap=1024)
    assert calls[:3] == [16, 32, 64]
    assert dim == result


def test_converge_gives_up():
    with pytest.raises(NonConvergenceError):
        converge(lambda dim: (dim, [float(dim)]), start=4, cap=64)
