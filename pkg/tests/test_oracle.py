import numpy as np
import pytest

from ybcircuit.errors import ResourceError
from ybcircuit.oracle import (
    ChainSpec,
    build_brick_circuit,
    default_length,
    hamiltonian_correlation,
    infinite_temp_correlation,
    layer_bonds,
    light_cone_inhomogeneities,
    otoc_direct,
    transfer_eps_to_diagonals,
    trotter_correlation,
)
from ybcircuit.transfer import correlation_via_tm, tm_coordinates

# brute-force values at lambda = 1, alpha = beta = z
FROZEN = {(1, 1): 0.5, (-1, 1): 0.0, (2, 2): 0.25, (0, 2): 0.25, (1, 3): 0.375, (-1, 3): 0.125, (3, 3): 0.125}


@pytest.mark.parametrize("xt,value", sorted(FROZEN.items()))
def test_frozen_correlations(xt, value):
    x, t = xt
    spec = ChainSpec(default_length(t), t, 1.0)
    assert np.isclose(infinite_temp_correlation(spec, x, "z", "z"), value, atol=1e-12)


def test_layer_bonds_periodic():
    assert layer_bonds(4, 1) == [(0, 1), (2, 3)]
    assert layer_bonds(4, 2) == [(1, 2), (3, 0)]


def test_circuit_is_unitary():
    U = build_brick_circuit(ChainSpec(6, 3, 0.7))
    assert np.allclose(U @ U.conj().T, np.eye(64))


def test_identity_correlation_is_one():
    spec = ChainSpec(6, 2, 0.4)
    assert np.isclose(infinite_temp_correlation(spec, 1, "0", "0"), 1)
    assert np.isclose(otoc_direct(spec, 1, "0", "z"), 1)


def test_spec_validation():
    with pytest.raises(ValueError):
        ChainSpec(5, 1, 1.0)
    with pytest.raises(ValueError):
        ChainSpec(4, 1, 1.0, np.zeros((2, 2)))
    with pytest.raises(ResourceError):
        otoc_direct(ChainSpec(12, 1, 1.0), 0, "z", "z")
    assert not ChainSpec(4, 2, 1.0).light_cone_ok


@pytest.mark.parametrize("x,t", [(1, 1), (0, 2), (1, 3), (-1, 3)])
def test_inhomogeneous_circuit_matches_transfer_matrix(x, t, rng):
    m, steps = tm_coordinates(x, t)
    eps = rng.normal(size=m)
    L = default_length(t)
    shifts = light_cone_inhomogeneities(L, t, transfer_eps_to_diagonals(eps))
    spec = ChainSpec(L, t, 0.8, shifts)
    for a, b in [("z", "z"), ("x", "y")]:
        ref = infinite_temp_correlation(spec, x, a, b)
        assert abs(ref - correlation_via_tm(m, steps, a, b, 0.8, eps)) < 1e-12


def test_frozen_otoc():
    assert np.isclose(otoc_direct(ChainSpec(6, 2, 1.0), 2, "z", "z"), 0.25)
    assert np.isclose(otoc_direct(ChainSpec(4, 1, 1.0), 1, "z", "z"), 0.0)


def test_trotter_converges_quadratically():
    exact = hamiltonian_correlation(6, 0.3, 1, "z", "z")
    assert np.isclose(exact, 0.23510125508845348)
    errs = [abs(trotter_correlation(6, 0.3, dt, 1, "z", "z") - exact) for dt in (0.1, 0.05)]
    assert 3.0 < errs[0] / errs[1] < 5.5


def test_trotter_slope_over_three_steps():
    exact = hamiltonian_correlation(6, 0.6, 1, "z", "z")
    dts = np.array([0.2, 0.1, 0.05])
    errs = [abs(trotter_correlation(6, 0.6, dt, 1, "z", "z") - exact) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert abs(slope - 2) <= 0.5
