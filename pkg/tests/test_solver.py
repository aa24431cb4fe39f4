import numpy as np
import pytest

from entscale import exactcover as ec, solver, statevec
from entscale.errors import ConvergenceFailure, InvalidArgument
from entscale.exactcover import InterpolatedHamiltonian
from entscale.krylov import lowest_eigenpairs
from entscale.solver import SweepProfile, SweepRecord
from entscale.statevec import StateVector

from oracles import dense_hamiltonian


@pytest.fixture(scope="module")
def inst8():
    return ec.generate_instance(8, 3, seed=21)


def test_lanczos_on_known_diagonal():
    d = np.arange(200, dtype=float)
    res = lowest_eigenpairs(lambda v: d * v, 200, k=3, tol=1e-12)
    assert np.allclose(res.eigenvalues, [0, 1, 2], atol=1e-10)


def test_lanczos_small_dimension_exhausts_space():
    a = np.diag([3.0, 1.0, 2.0])
    res = lowest_eigenpairs(lambda v: a @ v, 3, k=2)
    assert np.allclose(res.eigenvalues, [1.0, 2.0])


def test_lanczos_reports_failure():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(300, 300))
    m = m + m.T
    with pytest.raises(ConvergenceFailure):
        lowest_eigenpairs(lambda v: m @ v, 300, k=2, tol=1e-14, max_restarts=1, max_basis=6)


def test_end_points(inst8):
    h = InterpolatedHamiltonian.from_instance(inst8, 0.0)
    p0 = solver.lowest_two(h)
    assert p0.e0 == pytest.approx(0.0, abs=1e-10)
    assert p0.e1 == pytest.approx(ec.degrees(inst8).min(), abs=1e-9)
    assert np.allclose(p0.ground.amplitudes, StateVector.uniform(8).amplitudes, atol=1e-8)
    p1 = solver.lowest_two(h.at(1.0))
    assert p1.e0 == pytest.approx(0.0, abs=1e-12) and p1.e1 >= 1 - 1e-12
    assert abs(p1.ground.amplitudes[inst8.assignment_index]) == pytest.approx(1.0, abs=1e-10)


def test_dense_and_lanczos_agree_at_midpoint(inst8):
    h = InterpolatedHamiltonian.from_instance(inst8, 0.5)
    d = solver.lowest_two(h, method="dense")
    k = solver.lowest_two(h, method="lanczos")
    assert abs(d.e0 - k.e0) <= 1e-9 and abs(d.e1 - k.e1) <= 1e-9
    part = statevec.BiPartition.half(8)
    assert abs(statevec.entropy(d.ground, part) - statevec.entropy(k.ground, part)) <= 1e-8


def test_ground_state_is_nonnegative(inst8):
    for s in (0.1, 0.5, 0.7, 0.95):
        g = solver.lowest_two(InterpolatedHamiltonian.from_instance(inst8, s)).ground.amplitudes
        assert g.min() >= -1e-10


def test_residuals_and_ordering(inst8):
    h = InterpolatedHamiltonian.from_instance(inst8, 0.0)
    for s in np.linspace(0, 1, 11):
        p = solver.lowest_two(h.at(float(s)), tol=1e-10)
        assert p.e0 <= p.e1
        for e, r in zip((p.e0, p.e1), p.residuals):
            assert r <= 1e-10 * max(1, abs(e))


def test_unknown_method(inst8):
    with pytest.raises(InvalidArgument):
        solver.lowest_two(InterpolatedHamiltonian.from_instance(inst8, 0.5), method="qr")


def test_h10_matches_dense_sandwich():
    rng = np.random.default_rng(5)
    for seed in range(10):
        inst = ec.generate_instance(4, 3, seed)
        s = float(rng.uniform(0.05, 0.95))
        h = InterpolatedHamiltonian.from_instance(inst, s)
        p = solver.lowest_two(h, method="dense")
        n = inst.n_qubits
        dh = dense_hamiltonian(inst.clause_lists(), n, 1.0) - dense_hamiltonian(inst.clause_lists(), n, 0.0)
        ref = abs(p.excited.amplitudes @ dh @ p.ground.amplitudes)
        assert solver.h10(p.ground, p.excited, h) == pytest.approx(ref, abs=1e-10)
        assert solver.h10(p.excited, p.ground, h) == pytest.approx(ref, abs=1e-10)


def test_h10_requires_orthogonal_states(inst8):
    h = InterpolatedHamiltonian.from_instance(inst8, 0.5)
    g = solver.lowest_two(h).ground
    with pytest.raises(InvalidArgument):
        solver.h10(g, g, h)


def _profile(gaps, entropies):
    grid = np.round(np.linspace(0, 1, len(gaps)), 12)
    recs = [SweepRecord(float(s), 0.0, g, g, e, 0.0) for s, g, e in zip(grid, gaps, entropies)]
    return SweepProfile("x", 4, grid, recs)


def test_critical_points_tie_and_monotone():
    p = _profile([3, 1, 2, 1, 4], [0, 2, 2, 1, 0])
    assert solver.critical_points(p) == (0.25, 0.25)
    mono = _profile([5, 4, 3, 2, 1], [0, 1, 2, 3, 4])
    assert solver.critical_points(mono) == (1.0, 1.0)
    rising = _profile([1, 2, 3, 4, 5], [4, 3, 2, 1, 0])
    assert solver.critical_points(rising) == (0.0, 0.0)


def test_grid_validation():
    assert len(solver.s_grid(0.01)) == 101
    assert solver.s_grid(0.01)[69] == 0.69
    with pytest.raises(InvalidArgument):
        solver.s_grid(0.03)
    inst = ec.generate_instance(6, 3, 0)
    with pytest.raises(InvalidArgument):
        solver.sweep(inst, [0.0, 0.1, 0.5])
    with pytest.raises(InvalidArgument):
        solver.sweep(inst, [0.0, 1.5])


def test_sweep_profile(inst8):
    prof = solver.sweep(inst8, solver.s_grid(0.05))
    assert prof.entropies[0] == pytest.approx(0.0, abs=1e-9)
    assert prof.entropies[-1] == pytest.approx(0.0, abs=1e-12)
    assert np.all(prof.gaps > 0)
    assert 0 < prof.s_min_gap < 1 and 0 < prof.s_max_entropy < 1
    assert prof.adiabatic_ratio() > 0
    back = SweepProfile.from_csv(prof.to_csv(), 8)
    assert np.allclose(back.entropies, prof.entropies, rtol=1e-11, atol=1e-13)
    assert prof.instance_id == "n8k3s21"


def test_dense_and_lanczos_sweeps_agree():
    grid = solver.s_grid(0.01)
    for n, seed in ((8, 1), (10, 2)):
        inst = ec.generate_instance(n, 3, seed)
        a = solver.sweep(inst, grid, method="dense")
        b = solver.sweep(inst, grid, method="lanczos")
        assert np.max(np.abs([ra.e0 - rb.e0 for ra, rb in zip(a.records, b.records)])) <= 1e-9
        assert np.max(np.abs([ra.e1 - rb.e1 for ra, rb in zip(a.records, b.records)])) <= 1e-9
        assert np.max(np.abs(a.entropies - b.entropies)) <= 1e-8


def test_sweep_many_preserves_order():
    insts = [ec.generate_instance(6, 3, s) for s in range(3)]
    grid = solver.s_grid(0.1)
    serial = solver.sweep_many(insts, grid, workers=1)
    parallel = solver.sweep_many(insts, grid, workers=2)
    for a, b in zip(serial, parallel):
        assert a.to_csv() == b.to_csv()
