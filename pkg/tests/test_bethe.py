import numpy as np
import pytest

from ybcircuit.bethe import (
    BetheRootSet,
    BetheStateSpec,
    bethe_eigenvalue,
    bethe_residual,
    bethe_spectrum,
    bethe_state,
    count_states,
    highest_weight_count,
    solve_bethe,
    state_residual,
    trinomial,
)
from ybcircuit.errors import PoleError, SingularConfigurationError
from ybcircuit.numerics import eigenvalues_schur
from ybcircuit.reference import analytic_spectrum
from ybcircuit.transfer import build_transfer

S3 = np.sqrt(3)


def test_two_rapidities_homogeneous():
    (rs,) = [r for r in solve_bethe(2, 2) if not r.zero_modes]
    assert np.allclose(sorted(rs.roots, key=lambda z: z.imag), [-1j / S3, 1j / S3], atol=1e-12)
    assert rs.residual < 1e-12
    assert np.isclose(bethe_eigenvalue(1.0, rs, 2), 0.75)


def test_single_root_is_eps_midpoint():
    eps = (0.3, -1.1)
    (rs,) = solve_bethe(2, 1, eps)
    assert abs(rs.roots[0] - np.mean(eps)) < 1e-10


def test_vacuum_record():
    (rs,) = solve_bethe(1, 0)
    assert rs.N == 0 and rs.spin == 1
    assert np.isclose(bethe_eigenvalue(1.0, rs), 0.5)


def test_capacity_check():
    with pytest.raises(ValueError):
        solve_bethe(1, 3)


def test_n3_homogeneous_solutions_reproduce_table():
    lam = 1.3
    want = {round(v, 9) for _, v, _, _ in analytic_spectrum(3, lam)}
    got = set()
    for N in range(4):
        for rs in solve_bethe(3, N):
            got.add(round(bethe_eigenvalue(lam, rs).real, 9))
    new = {"a", "vac3", "b", "c", "d", "e", "f"}
    for name, v, _, _ in analytic_spectrum(3, lam):
        if name in new:
            assert round(v, 9) in got
    assert got <= want


def test_singular_solution_flagged():
    sing = [r for r in solve_bethe(3, 3) if r.singular]
    assert len(sing) == 1
    assert np.allclose(sorted(sing[0].roots, key=lambda z: z.imag), [-1j, 0, 1j], atol=1e-6)
    with pytest.raises(SingularConfigurationError):
        bethe_state(BetheStateSpec(sing[0], 3))


@pytest.mark.parametrize("m", [1, 2])
def test_spectrum_matches_numerics(m, rng):
    eps = rng.normal(size=m)
    numeric = eigenvalues_schur(build_transfer(m, 0.9, eps).matrix)
    bethe = bethe_spectrum(m, 0.9, eps)
    assert len(bethe) == 4**m
    assert np.allclose(np.sort_complex(numeric), np.sort_complex(bethe), atol=1e-10)


def test_bethe_state_is_eigenvector(rng):
    eps = tuple(rng.normal(size=2))
    (rs,) = [r for r in solve_bethe(2, 2, eps) if r.N == 2][:1]
    spec = BetheStateSpec(rs, 3, eps + (0.4,))
    assert state_residual(spec, 0.77) < 1e-9


def test_pole():
    rs = BetheRootSet(2, (0.5 + 0j,), (0.0, 1.0), 0.0)
    with pytest.raises(PoleError):
        bethe_eigenvalue(0.5, rs)


def test_residual_of_exact_roots():
    assert np.max(bethe_residual(np.array([1j / S3, -1j / S3]), 2)) < 1e-12


def test_counting():
    assert trinomial(2, 2) == 3
    assert highest_weight_count(3, 1) == 2
    for m in (1, 2, 3, 4):
        hom, inhom = count_states(m)
        assert inhom == 4**m and hom == (3 ** (m + 1) - 1) // 2


def test_beyond_equator_not_enumerated():
    rep = solve_bethe(2, 3, report=True)
    assert rep.solutions == [] and "beyond_equator" in rep.rejected


def test_root_sets_closed_under_conjugation(rng):
    eps = rng.normal(size=3)
    sols = solve_bethe(3, 2, eps)
    for rs in sols:
        conj = np.sort_complex(np.conj(rs.roots))
        assert any(np.allclose(conj, np.sort_complex(np.array(o.roots)), atol=1e-9) for o in sols)
