import numpy as np
import pytest

from bmolab.errors import PreconditionError
from bmolab.kernels import (
    SamplePlan,
    cutoff_phi1,
    cutoff_split,
    diagnostic_split_constants,
    difference_kernel,
    reference_kernel,
    size_saturating_kernel,
    truncate,
    verify_bounds,
)

from oracles import logspace_slope


def test_phi1_plateaus_and_midpoint():
    assert cutoff_phi1(0.5) == 1.0
    assert cutoff_phi1(1.0) == 1.0
    assert cutoff_phi1(2.0) == 0.0
    assert cutoff_phi1(3.0) == 0.0
    assert cutoff_phi1(1.5) == pytest.approx(0.5, abs=1e-12)
    t = np.linspace(0, 4, 4001)
    v = cutoff_phi1(t)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) <= 1e-12)  # monotone nonincreasing
    with pytest.raises(PreconditionError):
        cutoff_phi1(-0.1)


def test_cutoff_split_plateaus():
    phi2, phi3 = cutoff_split(10.0)
    assert phi2(3.0) == 1.0 and phi3(3.0) == 0.0
    assert phi2(7.0) == 0.0 and phi3(7.0) == 1.0
    assert phi2(0.5) == 0.0 and phi3(2.0) == 0.0
    with pytest.raises(PreconditionError):
        cutoff_split(4.0)


def test_partition_of_unity():
    A = 12.0
    phi2, phi3 = cutoff_split(A)
    t = np.linspace(0, 3 * A, 30001)
    total = cutoff_phi1(t) + phi2(t) + phi3(t)
    assert np.max(np.abs(total - 1.0)) < 1e-12


def test_reference_kernel_values():
    K = reference_kernel(1)
    x = np.array([0.7])
    assert K.evaluate(x, x, x) == pytest.approx(1.0)
    # |x-y| = 1, x = z
    assert K.evaluate(np.array([0.0]), np.array([1.0]), np.array([0.0])) == pytest.approx(0.25)


def test_reference_kernel_symmetry_and_invariance():
    K = reference_kernel(1)
    rng = np.random.default_rng(7)
    x, y, z, t = rng.normal(size=(4, 50, 1))
    assert np.array_equal(K.evaluate(x, y, z), K.evaluate(x, z, y))
    # exact up to the rounding of the shifted differences
    assert np.allclose(K.evaluate(x + t, y + t, z + t), K.evaluate(x, y, z),
                       rtol=1e-12, atol=0)


def test_decay_exponent_via_collinear_ray():
    for n in (1, 2):
        K = reference_kernel(n)
        s = np.array([10.0, 20.0, 40.0])
        x = np.zeros((3, n))
        y = x.copy()
        y[:, 0] = -s / 2
        vals = K.evaluate(x, y, y)
        slope = logspace_slope(s, np.abs(vals))
        assert slope == pytest.approx(-(2 * n + 2), abs=0.05)


def test_truncation_plateau_identities():
    K = reference_kernel(1)
    eta = 0.5
    Ke = truncate(K, eta)
    # separation eta/4: dead zone
    x = np.array([0.0])
    assert Ke.evaluate(x, np.array([eta / 8]), np.array([-eta / 8])) == 0.0
    # separation 2 eta: untouched
    y = np.array([eta])
    z = np.array([-eta])
    assert Ke.evaluate(x, y, z) == K.evaluate(x, y, z)
    with pytest.raises(PreconditionError):
        truncate(K, 0.0)


def test_truncated_below_original_everywhere():
    K = reference_kernel(1)
    Ke = truncate(K, 0.25)
    rng = np.random.default_rng(11)
    x, y, z = rng.uniform(-3, 3, size=(3, 100000, 1))
    assert np.all(np.abs(Ke.evaluate(x, y, z)) <= np.abs(K.evaluate(x, y, z)) + 1e-15)


def test_difference_plus_truncated_reconstructs():
    K = reference_kernel(1)
    Ke = truncate(K, 0.5)
    Kd = difference_kernel(K, 0.5)
    rng = np.random.default_rng(3)
    x, y, z = rng.uniform(-2, 2, size=(3, 1000, 1))
    total = Ke.evaluate(x, y, z) + Kd.evaluate(x, y, z)
    assert total == pytest.approx(K.evaluate(x, y, z), abs=1e-15)


def test_verify_bounds_reference():
    for n in (1, 2):
        rep = verify_bounds(reference_kernel(n), SamplePlan(count=2000))
        assert rep.all_ok, rep.to_dict()
        assert rep.decay_slope == pytest.approx(-(2 * n + 2), abs=0.05)
        assert rep.witnesses["size"]["s"] > 0


def test_verify_bounds_size_saturating():
    rep = verify_bounds(size_saturating_kernel(1), SamplePlan(count=2000))
    assert rep.all_ok, rep.to_dict()
    # the size bound is genuinely saturated near s -> 0
    assert rep.witnesses["size"]["s"] < 0.05
    assert rep.measured_size_C > 1.0


def test_truncated_regularity_independent_of_eta():
    K = reference_kernel(1)
    regs = [
        verify_bounds(truncate(K, eta), SamplePlan(count=2000)).measured_reg_C
        for eta in (1.0, 0.5, 0.25, 0.125)
    ]
    assert max(regs) / min(regs) <= 1.5


def test_far_split_kernel_constant_scales_inversely_with_A():
    consts = [diagnostic_split_constants(1, A)["K3_size"] for A in (8.0, 16.0, 32.0)]
    for a, b in zip(consts, consts[1:]):
        assert a / b == pytest.approx(2.0, abs=0.2)
    # the inner split constants do not depend on A
    c8 = diagnostic_split_constants(1, 8.0)
    c32 = diagnostic_split_constants(1, 32.0)
    assert c8["K1_size"] == pytest.approx(c32["K1_size"], rel=1e-12)
    assert c8["K2_size"] == pytest.approx(c32["K2_size"], rel=1e-12)


def test_sample_plan_validation():
    with pytest.raises(PreconditionError):
        SamplePlan(s_min=0.0)
    with pytest.raises(PreconditionError):
        SamplePlan(s_min=1.0, s_max=0.5)


def test_verify_bounds_deterministic_in_seed():
    K = reference_kernel(1)
    a = verify_bounds(K, SamplePlan(seed=5, count=500))
    b = verify_bounds(K, SamplePlan(seed=5, count=500))
    assert a.measured_size_C == b.measured_size_C
    assert a.measured_reg_C == b.measured_reg_C
