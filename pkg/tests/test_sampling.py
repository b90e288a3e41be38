"""Tests for exposure codes and interlaced sampling plans."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codex_ct.sampling import (
    ExposureCode,
    build_code,
    check_unique_angles,
    make_sampling_plan,
    micro_index,
    raskar_code,
    read_code_file,
    write_code_file,
)


def test_build_snapshot():
    code = build_code("snapshot", 4)
    assert code.bits == (1, 0, 0, 0)
    assert code.cbar == 1


def test_build_boxcar():
    code = build_code("boxcar", 3)
    assert code.bits == (1, 1, 1)
    assert code.cbar == 3


def test_build_custom():
    code = build_code("custom", 5, [1, 0, 1, 1, 0])
    assert code.bits == (1, 0, 1, 1, 0)
    assert code.cbar == 3


def test_all_zero_custom_rejected():
    with pytest.raises(ValueError):
        build_code("custom", 3, [0, 0, 0])


def test_bad_lengths_rejected():
    with pytest.raises(ValueError):
        build_code("boxcar", 0)
    with pytest.raises(ValueError):
        build_code("custom", 4, [1, 0])


def test_raskar_code_asset():
    code = raskar_code()
    assert code.length == 52
    assert code.cbar == 26
    assert code.bits[0] == 1


def test_raskar_concatenation():
    double = raskar_code(104)
    base = raskar_code(52)
    assert double.bits == base.bits * 2
    assert double.cbar == 52
    with pytest.raises(ValueError):
        raskar_code(60)


def test_code_file_roundtrip(tmp_path):
    codes = [build_code("snapshot", 4), raskar_code()]
    path = tmp_path / "codes.txt"
    write_code_file(path, codes)
    loaded = read_code_file(path)
    assert [c.bits for c in loaded] == [c.bits for c in codes]


def test_code_file_rejects_garbage(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("10102\n")
    with pytest.raises(ValueError):
        read_code_file(path)


@pytest.mark.parametrize(
    "K,m,n,N_expected,blur_deg",
    [
        (52, 2, 27, 77, 121.56),
        (52, 5, 27, 233, 40.17),
        (52, 10, 27, 493, 18.98),
        (52, 20, 27, 1013, 9.24),
    ],
)
def test_typical_plan_parameters(K, m, n, N_expected, blur_deg):
    plan = make_sampling_plan(K, m, n, M_theta=N_expected)
    assert plan.N_theta == N_expected
    assert plan.blur_angle_deg == pytest.approx(blur_deg, abs=0.01)
    assert plan.unique_angle


def test_plan_table_values():
    plan = make_sampling_plan(52, 5, 27, 233)
    assert plan.N_theta == 233
    assert plan.blur_angle_deg == pytest.approx(40.17, abs=0.01)
    plan2 = make_sampling_plan(11, 5, 5, 50)
    assert plan2.N_theta == 50
    assert plan2.view_angles_rad[1] == pytest.approx(11 * math.pi / 50)
    # 40-view fast-scan span of 360.36 degrees
    plan3 = make_sampling_plan(52, 20, 27, 40)
    assert plan3.N_theta == 1013
    assert math.degrees(plan3.span_rad) == pytest.approx(39 * 52 * 180 / 1013, rel=1e-12)
    assert math.degrees(plan3.span_rad) == pytest.approx(360.36, abs=0.01)


def test_span_20_views():
    plan = make_sampling_plan(52, 20, 27, 20)
    assert math.degrees(plan.span_rad) == pytest.approx(175.56, abs=0.01)


def test_invalid_plans_rejected():
    with pytest.raises(ValueError):
        make_sampling_plan(2, 1, 5, 10)  # mK - n <= 0
    with pytest.raises(ValueError):
        make_sampling_plan(2, 3, 1, 0)  # M_theta < 1


def test_unique_angles_full_cycle():
    plan = make_sampling_plan(11, 5, 5, 50)
    ok, pair = check_unique_angles(plan)
    assert ok and pair is None


def test_unique_angles_gcd4_collision():
    plan = make_sampling_plan(52, 29, 8, 1500)  # N_theta = 1500, gcd 4
    assert not plan.unique_angle
    ok, pair = check_unique_angles(plan)
    assert not ok
    assert pair == (0, 375)
    # limiting the view count restores uniqueness
    limited = make_sampling_plan(52, 29, 8, 375)
    ok, _ = check_unique_angles(limited)
    assert ok


def test_unique_angles_tiny_gcd2():
    plan = make_sampling_plan(2, 3, 2, 4)  # K=2, N_theta=4
    ok, pair = check_unique_angles(plan)
    assert not ok
    assert pair == (0, 2)
    steps = plan.view_start_steps
    assert list(steps) == [0, 2, 0, 2]


def test_micro_index_examples():
    plan = make_sampling_plan(11, 5, 5, 50)
    assert micro_index(plan, 0, 0) == 0
    assert micro_index(plan, 1, 0) == 11
    assert micro_index(plan, 4, 7) == (44 + 7) % 50
    with pytest.raises(ValueError):
        micro_index(plan, 50, 0)
    with pytest.raises(ValueError):
        micro_index(plan, 0, 11)


def test_blur_angle_rational_identity():
    # blur_angle * N_theta == K * pi holds in exact rational arithmetic
    from fractions import Fraction

    for K, m, n in [(52, 5, 27), (11, 5, 5), (7, 3, 2)]:
        plan = make_sampling_plan(K, m, n, 10)
        assert Fraction(plan.K, plan.N_theta) * plan.N_theta == Fraction(K)
        assert plan.blur_angle_rad == pytest.approx(K * math.pi / plan.N_theta, rel=0)


@given(
    K=st.integers(min_value=1, max_value=40),
    N=st.integers(min_value=1, max_value=200),
)
def test_bijection_matches_gcd(K, N):
    steps = (np.arange(N, dtype=np.int64) * K) % N
    bijective = len(np.unique(steps)) == N
    assert bijective == (math.gcd(K, N) == 1)


@given(
    K=st.integers(min_value=1, max_value=60),
    m=st.integers(min_value=1, max_value=12),
    n=st.integers(min_value=1, max_value=60),
)
def test_coprime_construction(K, m, n):
    # gcd(K, n) = 1 implies gcd(K, mK - n) = 1 whenever the plan is valid
    if m * K - n < 1 or math.gcd(K, n) != 1:
        return
    plan = make_sampling_plan(K, m, n, 1)
    assert math.gcd(K, plan.N_theta) == 1


@given(st.integers(min_value=1, max_value=30), st.integers(min_value=2, max_value=120),
       st.data())
def test_micro_index_modular(K, N_plus, data):
    # micro_index agrees with direct modular arithmetic for arbitrary plans
    m = (N_plus + K) // K + 1
    n = m * K - N_plus
    if n < 1 or math.gcd(K, n) != 1:
        return
    plan = make_sampling_plan(K, m, n, M_theta=5)
    i = data.draw(st.integers(min_value=0, max_value=plan.M_theta - 1))
    k = data.draw(st.integers(min_value=0, max_value=K - 1))
    assert micro_index(plan, i, k) == (i * K + k) % plan.N_theta
