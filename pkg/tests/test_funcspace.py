import math

import numpy as np
import pytest

from bmolab.errors import PreconditionError
from bmolab.expr import catalog, parse_function
from bmolab.funcspace import Cube, SampledFunction, cube_average, midpoint_nodes

from oracles import brute_average


def test_cube_geometry():
    q = Cube((1.0, -2.0), 0.5)
    assert q.dim == 2
    assert q.side == 1.0
    assert q.volume == 1.0
    t = q.translate([0.25, 0.0])
    assert t.half_side == q.half_side and t.dim == q.dim
    assert t.center == (1.25, -2.0)


def test_half_open_membership():
    q = Cube.interval(0.0, 1.0)
    inside = q.contains(np.array([[0.0], [0.5], [1.0]]))
    assert inside.tolist() == [True, True, False]


def test_cube_validation():
    with pytest.raises(PreconditionError):
        Cube((0.0,), 0.0)
    with pytest.raises(PreconditionError):
        Cube.interval(1.0, 1.0)


def test_midpoint_nodes_order_and_count():
    q = Cube((0.0, 0.0), 1.0)
    nodes = midpoint_nodes(q, 2)
    assert nodes.shape == (4, 2)
    # axis 0 varies slowest
    assert nodes[0].tolist() == [-0.5, -0.5]
    assert nodes[1].tolist() == [-0.5, 0.5]
    with pytest.raises(PreconditionError):
        midpoint_nodes(q, 1)


def test_constant_average_exact():
    f = parse_function("7")
    assert cube_average(f, Cube((3.0,), 2.0)) == 7.0
    assert cube_average(f, Cube((0.0, 0.0), 1.0), 8) == 7.0


def test_quadratic_average():
    f = parse_function("x1*x1")
    assert cube_average(f, Cube.interval(0.0, 1.0), 256) == pytest.approx(1 / 3, abs=2e-6)


def test_log_interval_average_matches_closed_form():
    f = catalog("log_abs")
    for k in (1, 2, 3):
        q = Cube.interval(math.e ** k, math.e ** (k + 1))
        assert cube_average(f, q) == pytest.approx(k + 1 / (math.e - 1), abs=1e-3)


def test_linearity_machine_precision():
    f = parse_function("sin(x1)")
    g = parse_function("x1*x1")
    combo = parse_function("2.5*sin(x1)-1.25*x1*x1")
    q = Cube.interval(0.3, 1.7)
    lhs = cube_average(combo, q, 64)
    rhs = 2.5 * cube_average(f, q, 64) - 1.25 * cube_average(g, q, 64)
    assert lhs == pytest.approx(rhs, abs=5e-15)


def test_translation_covariance():
    t = 0.7
    f = parse_function("sin(x1)")
    shifted = parse_function(f"sin(x1-{t})")
    q = Cube.interval(0.0, 1.0)
    assert cube_average(shifted, q.translate(t), 64) == pytest.approx(
        cube_average(f, q, 64), abs=1e-13
    )


def test_midpoint_richardson_ratio():
    f = parse_function("sin(x1)")
    q = Cube.interval(0.0, 1.0)
    exact = 1.0 - math.cos(1.0)
    errs = [abs(cube_average(f, q, res) - exact) for res in (16, 32, 64)]
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(4.0, rel=0.05)


def test_cube_average_against_brute_force():
    f = parse_function("exp(cos(x1))")
    q = Cube.interval(-1.2, 2.4)
    ours = cube_average(f, q, 64)
    brute = brute_average(f.evaluate, -1.2, 2.4, 256)
    assert ours == pytest.approx(brute, rel=1e-3)


def test_sampled_function_clamps_and_counts():
    sf = SampledFunction(np.array([1.0, 2.0, 3.0]), (0.0,), 1.0)
    vals = sf.evaluate(np.array([[0.5], [2.5], [5.0], [-1.0]]))
    assert vals.tolist() == [1.0, 3.0, 3.0, 1.0]
    assert sf.clamp_hits == 2


def test_sampled_function_from_function():
    f = parse_function("x1")
    sf = SampledFunction.from_function(f, Cube.interval(0.0, 1.0), 4)
    assert sf.values.tolist() == [0.125, 0.375, 0.625, 0.875]
    assert sf.support_box.side == pytest.approx(1.0)


def test_sampled_function_rejects_nonfinite():
    with pytest.raises(PreconditionError):
        SampledFunction(np.array([1.0, np.inf]), (0.0,), 1.0)
