from dataclasses import replace

import numpy as np
import pytest

from adrswr.errors import InsufficientDataError, InvalidParameterError
from adrswr.optimizer import optimize_problem
from adrswr.solver import (
    ClosureRow,
    IterationTrace,
    SolverConfig,
    SpaceTimeField,
    backward_euler_sweep,
    closure_residuals,
    converged_reference,
    initial_iterate,
    interface_closure,
    observed_rate,
    swr_solve,
)
from adrswr.stencil import ADRParameters, SubdomainGrid, case, stencil_coefficients
from adrswr.symbol import TransmissionKind, TransmissionSpec
from oracles import monodomain_backward_euler

K = TransmissionKind
DIRICHLET = TransmissionSpec(K.DIRICHLET)


def spec_for(kind, alpha=1.0):
    return TransmissionSpec(kind, alpha) if kind.optimized else TransmissionSpec(kind)


def monodomain(problem):
    lc = tuple(stencil_coefficients(problem.left, problem.dx))
    rc = tuple(stencil_coefficients(problem.right, problem.dx))
    return monodomain_backward_euler(lc, rc, problem.x2, problem.domain, problem.dx, problem.dt,
                                     problem.n_steps, problem.initial)


def restrict(x, U, grid):
    cols = [int(np.argmin(np.abs(x - xi))) for xi in grid.x]
    return U[:, cols]


def test_zero_data_gives_zero_field():
    grid = SubdomainGrid("left", np.linspace(-1, -0.5, 11), 0.05)
    other = SubdomainGrid("right", np.linspace(-0.55, 1, 32), 0.05)
    own = SpaceTimeField(np.zeros((21, 11)), grid, 0.05)
    oth = SpaceTimeField(np.zeros((21, 32)), other, 0.05)
    out = backward_euler_sweep(ADRParameters(1.0, 0.1, 0.5), own, oth, interface_closure(DIRICHLET, "left"))
    assert np.all(out.values == 0.0)


def test_single_interior_node_closed_form():
    params = ADRParameters(1.5, 0.1)
    dx, dt = 0.05, 0.05
    a, b, c = stencil_coefficients(params, dx)
    grid = SubdomainGrid("left", np.array([-1.0, -0.95, -0.9]), dx)
    other_grid = SubdomainGrid("right", np.array([-0.95, -0.9, -0.85]), dx)
    u0, v_left, v_right = 0.7, 0.3, -0.4
    own = SpaceTimeField(np.array([[v_left, u0, 0.0], [0.0, 0.0, 0.0]]), grid, dt)
    # Dirichlet left closure reads w_1 from the other grid
    other = SpaceTimeField(np.array([[0.0, 0.0, 0.0], [0.0, v_right, 0.0]]), other_grid, dt)
    out = backward_euler_sweep(params, own, other, interface_closure(DIRICHLET, "left"), boundary_value=v_left)
    expected = (u0 / dt + a * v_left + c * v_right) / (1 / dt - b)
    assert out.values[1, 1] == pytest.approx(expected, rel=1e-14)
    assert out.values[1, 0] == v_left and out.values[1, 2] == v_right


def test_left_sweep_fed_monodomain_values():
    p = case(1)
    x, U = monodomain(p)
    lg, rg = p.left_grid(), p.right_grid()
    own = SpaceTimeField(restrict(x, U, lg), lg, p.dt)
    other = SpaceTimeField(restrict(x, U, rg), rg, p.dt)
    out = backward_euler_sweep(p.left, own, other, interface_closure(DIRICHLET, "left"))
    assert np.max(np.abs(out.values - own.values)) < 1e-10
    out_r = backward_euler_sweep(p.right, other, own, interface_closure(DIRICHLET, "right"))
    assert np.max(np.abs(out_r.values - other.values)) < 1e-10


@pytest.mark.parametrize("cid", [1, 2])
def test_dirichlet_fixed_point_is_monodomain(cid):
    p = case(cid)
    left, right = converged_reference(p, DIRICHLET)
    x, U = monodomain(p)
    for fld in (left, right):
        assert np.max(np.abs(fld.values - restrict(x, U, fld.grid))) < 1e-8


def test_initial_iterate_layout():
    p = case(1)
    left, right = initial_iterate(p)
    assert np.array_equal(left.values[0], p.initial(left.grid.x))
    assert np.all(left.interface[1:] == 0) and np.all(right.interface[1:] == 0)
    assert np.all(left.values[1:, 0] == 0) and np.all(right.values[1:, -1] == 0)
    assert np.array_equal(right.values[0], p.initial(right.grid.x))


def test_dirichlet_closure_rows():
    assert interface_closure(DIRICHLET, "left") == ClosureRow({0: 1.0}, {1: 1.0})
    assert interface_closure(DIRICHLET, "right") == ClosureRow({0: 1.0}, {-1: 1.0})


def test_optimized_dirichlet_large_alpha_tends_to_dirichlet():
    row = interface_closure(TransmissionSpec(K.OPT_DIRICHLET, 1e12), "left")
    assert row.own[0] == 1.0 and abs(row.own[-1]) < 1e-11
    assert row.other[1] == 1.0 and abs(row.other[0]) < 1e-11


def test_recovery_condition_rejected():
    # (alpha+1)(beta-1)+1 = 0 with alpha > 0, beta < 0 is impossible; the check fires on crafted input
    with pytest.raises(InvalidParameterError):
        TransmissionSpec(K.OPT_DIRICHLET, 1.0, 0.5)


def test_overlap_mismatch_rejected():
    with pytest.raises(InvalidParameterError):
        swr_solve(case(1), TransmissionSpec(K.ROBIN3))


@pytest.mark.parametrize("kind", [k for k in K if k is not K.ROBIN2])
def test_fixed_point_closure_consistency_case1(kind):
    p = case(1).with_overlap(kind.overlap_nodes)
    spec = spec_for(kind, 1.76848)
    left, right = converged_reference(p, spec)
    assert max(closure_residuals(p, spec, left, right)) < 10 * 1e-12


@pytest.mark.parametrize("kind", [K.DIRICHLET, K.ROBIN3, K.COMBINED3, K.OPT_DIRICHLET, K.OPT_ROBIN])
def test_fixed_point_closure_consistency_case2(kind):
    p = case(2).with_overlap(kind.overlap_nodes)
    spec = spec_for(kind, 0.40361)
    left, right = converged_reference(p, spec)
    assert max(closure_residuals(p, spec, left, right)) < 10 * 1e-12


@pytest.mark.parametrize("cid", [1, 2])
def test_optimized_recovers_dirichlet_fixed_point(cid):
    p = case(cid)
    d = converged_reference(p, DIRICHLET)
    o = converged_reference(p, TransmissionSpec(K.OPT_DIRICHLET, 0.9))
    for a, b in zip(d, o):
        assert np.max(np.abs(a.values - b.values)) < 1e-8


def test_robin3_recovers_monodomain_for_matching_stencils():
    # with unequal stencils the flux rows also impose a coefficient-jump relation,
    # so only the matched-coefficient problem has the monodomain as fixed point
    p = replace(case(1), right=case(1).left).with_overlap(3)
    left, right = converged_reference(p, TransmissionSpec(K.ROBIN3))
    x, U = monodomain(p)
    for fld in (left, right):
        assert np.max(np.abs(fld.values - restrict(x, U, fld.grid))) < 1e-8


def test_robin2_closure_at_continuous_fixed_point_identical_sides():
    p = replace(case(2), right=case(2).left)
    left, right = converged_reference(p, DIRICHLET)
    assert max(closure_residuals(p, TransmissionSpec(K.ROBIN2), left, right)) < 1e-11


def test_robin2_closure_at_dirichlet_fixed_point_case2():
    # with different stencils the Robin2 row picks up the coefficient jump
    p = case(2)
    left, right = converged_reference(p, DIRICHLET)
    a1, _, c1 = stencil_coefficients(p.left, p.dx)
    a2, _, c2 = stencil_coefficients(p.right, p.dx)
    jump = ((c1 - c2) * right.node(1) - (a1 - a2) * right.node(0)) / c1
    expected = p.dt * np.sum(np.abs(jump[1:]))
    got = closure_residuals(p, TransmissionSpec(K.ROBIN2), left, right)[0]
    assert got == pytest.approx(expected, rel=1e-9)


def test_robin2_stagnates():
    _, _, trace = swr_solve(case(1), TransmissionSpec(K.ROBIN2), SolverConfig(max_iterations=30))
    assert not trace.converged
    assert trace.iterations == 30
    assert observed_rate(trace) == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("cid", [1, 2])
def test_optimized_beats_dirichlet(cid):
    p = case(cid)
    alpha = optimize_problem(p).roots[0]
    _, _, td = swr_solve(p, DIRICHLET)
    _, _, to = swr_solve(p, TransmissionSpec(K.OPT_DIRICHLET, alpha))
    assert td.converged and to.converged
    assert to.iterations_to_tolerance < td.iterations_to_tolerance


def test_trace_records_errors_and_snapshots():
    p = case(1)
    ref = converged_reference(p, DIRICHLET)
    _, _, trace = swr_solve(p, DIRICHLET, reference=ref, snapshot_iterations=(0, 1, 3))
    assert len(trace.errors) == trace.iterations
    assert all(r >= 0 for r in trace.residuals)
    assert sorted(trace.snapshots) == [0, 1, 3]
    assert trace.errors[-1] < 1e-6


def test_nonlinear_case_converges():
    _, _, trace = swr_solve(case(7), DIRICHLET)
    assert trace.converged


def test_case7_front_steepens():
    p = case(7)
    left, right = converged_reference(p, DIRICHLET)
    last = int(round(0.6 / p.dt))
    grads = [max(np.max(np.abs(np.diff(f.values[n]))) for f in (left, right)) / p.dx for n in range(last + 1)]
    assert np.all(np.diff(grads) > 0)


def test_observed_rate_geometric():
    assert observed_rate([1, 0.5, 0.25, 0.125, 0.0625]) == pytest.approx(0.5, rel=1e-14)
    assert observed_rate([1, 0.5, 0.25, 0.125, 0.0625], stride=2) == pytest.approx(0.25, rel=1e-14)


def test_observed_rate_accepts_trace():
    t = IterationTrace(residuals=[8.0, 4.0, 2.0, 1.0, 0.5, 0.25])
    assert observed_rate(t) == pytest.approx(0.5)


@pytest.mark.parametrize("residuals", [[], [0.0, 0.0], [1.0, 0.5, 0.25], [1.0, 1e-20, 0, 0, 0]])
def test_observed_rate_insufficient(residuals):
    with pytest.raises(InsufficientDataError):
        observed_rate(residuals)


@pytest.mark.parametrize("kwargs", [dict(tolerance=0.0), dict(max_iterations=0)])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)
