import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import qfact, qint
from volconj.errors import DomainError, RangeError, RealnessError
from volconj.qseries import (
    LogPolarValue,
    SignedLogValue,
    Weights,
    empirical_flips,
    index_partition,
    k_max,
    q_factorial,
    q_integer,
    root_context,
    scan_partition,
    signed_log_sum,
    term,
    term_batch,
    term_ratio_B,
    term_ratio_E,
    unimodality_profile,
)
from volconj.specfun import lobachevsky

odd_r = st.integers(min_value=2, max_value=150).map(lambda n: 2 * n + 1)


def test_root_context_validation():
    for bad in (4, 1, 2.5, -3):
        with pytest.raises(DomainError):
            root_context(bad)


@pytest.mark.parametrize("r", [3, 5, 101, 2001])
def test_sine_table_accuracy(r):
    ctx = root_context(r)
    assert len(ctx.sin_table) == r
    with mpmath.workdps(40):
        ref = np.array([float(mpmath.sin(2 * mpmath.pi * n / r)) for n in range(r)])
    err = np.abs(ctx.sin_table - ref)
    ulp = np.spacing(np.abs(ref))
    assert np.all(err <= ulp + 1e-300)


def test_q_integer_examples():
    assert q_integer(root_context(5), 5) == 0
    assert q_integer(root_context(5), 1) == pytest.approx(1.9021130325903j, abs=1e-12)
    c7 = root_context(7)
    assert q_integer(c7, -2) == pytest.approx(-2j * math.sin(4 * math.pi / 7), abs=1e-15)
    for n in range(-10, 10):
        assert q_integer(c7, n) == pytest.approx(qint(7, n), abs=1e-13)


def test_q_factorial_examples():
    c5 = root_context(5)
    f0 = q_factorial(c5, 0)
    assert f0.log_mag == 0 and f0.phase == 0
    assert math.exp(q_factorial(c5, 2).log_mag) == pytest.approx(math.sqrt(5), rel=1e-14)
    with pytest.raises(RangeError):
        q_factorial(c5, 5)
    with pytest.raises(RangeError):
        q_factorial(c5, -1)


@pytest.mark.parametrize("r", [5, 7, 13, 31])
def test_q_factorial_against_direct_product(r):
    for n in range(r):
        assert complex(q_factorial(root_context(r), n)) == pytest.approx(qfact(r, n), rel=1e-12)


def test_q_factorial_asymptotics():
    errs = []
    for r in (101, 501, 2001):
        n = int(0.3 * r)
        lm = q_factorial(root_context(r), n).log_mag
        errs.append(abs(2 * math.pi / r * lm + lobachevsky(2 * math.pi * n / r)))
    assert errs[0] > errs[1] > errs[2]
    for r, e in zip((101, 501, 2001), errs):
        assert e < 2 * math.pi / r * 3 * math.log(r)


@pytest.mark.parametrize("r", [101, 501, 2001])
def test_q_factorial_log_bound_all_n(r):
    ctx = root_context(r)
    n = np.arange(r)
    ref = -(r / (2 * math.pi)) * lobachevsky(2 * math.pi * n / r)
    assert np.max(np.abs(ctx.logfact - ref)) <= 3 * math.log(r) + 10


def test_ratio_E_examples():
    c7 = root_context(7)
    v = term_ratio_E(c7, 1, 1)
    assert v == pytest.approx(2 * (math.cos(12 * math.pi / 7) - math.cos(4 * math.pi / 7)), abs=1e-14)
    assert v == pytest.approx(1.6920214716, abs=1e-9)
    with pytest.raises(RangeError):
        term_ratio_E(c7, 1, 0)
    with pytest.raises(RangeError):
        term_ratio_E(c7, 1, k_max(7, 1) + 1)


@settings(max_examples=60)
@given(odd_r, st.data())
def test_ratio_E_product_to_sum(r, data):
    d = data.draw(st.integers(0, r - 2))
    km = k_max(r, d / 2)
    if km < 1:
        return
    k = data.draw(st.integers(1, km))
    direct = (qint(r, d + 1 + k) * qint(r, d + 1 - k)).real
    assert term_ratio_E(root_context(r), d / 2, k) == pytest.approx(direct, abs=1e-12)


def test_ratio_B_examples():
    r = 9
    val = term_ratio_B(root_context(r), (1, 1, 1), 1)
    k = 1
    pref = 2 * math.sin(2 * math.pi * k / r) ** 2 / (
        math.sin(2 * math.pi * 3 / r) ** 2 * math.sin(4 * math.pi / r) ** 2
    )
    bracket = math.cos(4 * math.pi * 3 / r) - math.cos(4 * math.pi / r)
    assert val == pytest.approx(pref * bracket**3, rel=1e-13)
    # equal weights: prefactor times cube of the E bracket
    e = term_ratio_E(root_context(r), 1, 1) / 2
    assert val == pytest.approx(pref * e**3, rel=1e-13)


def test_term_examples():
    c5 = root_context(5)
    t0 = term(c5, 0.5, 0)
    assert t0.sign == 1 and math.exp(t0.log_mag) == pytest.approx(0.6180339887, abs=1e-10)
    t1 = term(c5, 0.5, 1)
    assert t1.sign == 1 and math.exp(t1.log_mag) == pytest.approx(1.3819660113, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(odd_r, st.data())
def test_term_ratio_consistency_E(r, data):
    ctx = root_context(r)
    d = data.draw(st.integers(0, r - 2))
    km = k_max(r, d / 2)
    if km < 1:
        return
    k = data.draw(st.integers(1, km))
    q = term(ctx, d / 2, k) / term(ctx, d / 2, k - 1)
    assert q.sign != 0
    assert float(q) == pytest.approx(term_ratio_E(ctx, d / 2, k), rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(odd_r, st.data())
def test_term_ratio_consistency_B(r, data):
    ctx = root_context(r)
    ds = sorted(data.draw(st.lists(st.integers(0, r - 2), min_size=3, max_size=3)))
    js = [d / 2 for d in ds]
    km = k_max(r, js)
    if km < 1:
        return
    k = data.draw(st.integers(1, km))
    q = term(ctx, js, k) / term(ctx, js, k - 1)
    assert float(q) == pytest.approx(term_ratio_B(ctx, js, k), rel=1e-10)


def test_batch_matches_scalar_terms():
    ctx = root_context(41)
    w = Weights.of(41, 3, 7.5, 9)
    k = np.arange(k_max(41, w) + 1)
    sign, logm = term_batch(ctx, w.twice, k)
    for kk in k:
        t = term(ctx, w, int(kk))
        assert t.sign == sign[kk] and t.log_mag == pytest.approx(logm[kk], abs=1e-12)


@pytest.mark.parametrize("r", [101, 501, 2001])
def test_realness_all_terms(r):
    ctx = root_context(r)
    for d in range(0, r - 1, max(1, r // 40)):
        km = k_max(r, d / 2)
        sign, _ = term_batch(ctx, [d], np.arange(km + 1))
        assert np.all(sign != 0)


def test_realness_error_on_bad_phase():
    with pytest.raises(RealnessError):
        LogPolarValue(0.0, math.pi / 2).to_signed_log()
    assert LogPolarValue(1.0, math.pi).to_signed_log().sign == -1


def test_term_coincides_with_potential():
    # (4 pi / r) log|A_k| approaches 2 Im Phi_E(2 pi k / r) for the alpha = 0 weight
    from volconj.potential import PotentialSpec, im_phi_real

    r = 1001
    d = (r + 1) // 2
    ctx = root_context(r)
    ks = np.arange(1, k_max(r, d / 2) + 1)
    _, logm = term_batch(ctx, [d], ks)
    # the A_k index maps to x = 2 pi (2j + 1 + k) / r - pi on the potential side
    x = 2 * math.pi * (d + 1 + ks) / r - math.pi
    alpha = abs(4 * math.pi * d / r - 2 * math.pi)
    pot = 2 * np.asarray(im_phi_real(PotentialSpec.E(alpha), x))
    gap = np.abs(4 * math.pi / r * logm - pot)
    assert np.max(gap[5:-5]) < 12 * math.log(r) / r * 4 * math.pi / (2 * math.pi)


# partitions


def test_partition_examples():
    r = 101
    p = index_partition(root_context(r), 24.5)  # 2j + 1 = 50
    assert p["I1"] == range(0, 1) and p["I2"] == range(1, p.k_max + 1)
    p = index_partition(root_context(r), 20)
    assert p["I1"][-1] == 9
    # all 2j+1 < r/2 and every boundary below k_max
    p = index_partition(root_context(r), (14, 16, 18))
    assert p.labels == ("I1", "I2", "I3", "I4")
    b = sorted(math.floor(abs(r / 2 - (2 * j + 1))) for j in (14, 16, 18))
    assert b[2] < p.k_max
    assert p["I1"][-1] == b[0] and p["I2"][-1] == b[1] and p["I3"][-1] == b[2]


@settings(max_examples=200, deadline=None)
@given(odd_r, st.data())
def test_partition_is_cover(r, data):
    ds = data.draw(st.lists(st.integers(0, r - 2), min_size=3, max_size=3))
    p = index_partition(root_context(r), [d / 2 for d in ds])
    covered = [k for _, rg in p.ranges for k in rg]
    assert covered == list(range(p.k_max + 1))


@settings(max_examples=200, deadline=None)
@given(odd_r, st.data())
def test_formula_partition_equals_scan(r, data):
    n = data.draw(st.sampled_from([1, 3]))
    ds = data.draw(st.lists(st.integers(0, r - 2), min_size=n, max_size=n))
    w = [d / 2 for d in ds]
    if k_max(r, w) < 1:
        return
    ctx = root_context(r)
    a, b = index_partition(ctx, w), scan_partition(ctx, w)
    assert np.array_equal(a.predicted_flips(), b.predicted_flips())
    assert np.array_equal(a.predicted_flips(), empirical_flips(ctx, w))


def test_empty_sets_sum_to_zero():
    from volconj.invariant import colored_jones

    inv = colored_jones(101, (0, 0, 0))
    assert inv.total.sign == 1 and inv.total.log_mag == pytest.approx(0.0, abs=1e-14)
    empties = [lab for lab, rg in inv.partition.ranges if len(rg) == 0]
    assert empties
    for lab in empties:
        assert inv.partials[lab].sign == 0


# signed-log arithmetic


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda x: x != 0)


@given(finite, finite)
def test_signed_log_roundtrip_and_ops(a, b):
    x, y = SignedLogValue.from_float(a), SignedLogValue.from_float(b)
    assert float(x) == pytest.approx(a, rel=1e-14)
    assert float(x * y) == pytest.approx(a * b, rel=1e-13)
    assert float(x / y) == pytest.approx(a / b, rel=1e-13)
    assert float(x + y) == pytest.approx(a + b, rel=1e-9, abs=1e-9 * (abs(a) + abs(b)))


def test_signed_log_invariants():
    with pytest.raises(ValueError):
        SignedLogValue(0, 1.0)
    with pytest.raises(ValueError):
        SignedLogValue(1, -math.inf)
    z = SignedLogValue.zero()
    assert float(z + z) == 0.0
    assert (SignedLogValue(1, 2.0) - SignedLogValue(1, 2.0)).is_zero()


def test_signed_log_sum_huge_magnitudes():
    s = signed_log_sum([1, 1, -1], [1000.0, 1000.0, 999.0])
    assert s.sign == 1
    assert s.log_mag == pytest.approx(1000 + math.log(2 - math.exp(-1)), abs=1e-12)


# unimodality


def test_unimodality_constant_list():
    prof = unimodality_profile([SignedLogValue(1, 0.5)] * 5)
    assert prof.breakpoints == () and prof.pattern == ()


def _magnitudes(r, alpha):
    from volconj.geometry import ConeAngles
    from volconj.invariant import weights_for_angles

    w = weights_for_angles(r, ConeAngles.E(alpha)).weights
    ctx = root_context(r)
    _, logm = term_batch(ctx, w.twice, np.arange(k_max(r, w) + 1))
    return logm


def test_unimodality_case_small_angle():
    prof = unimodality_profile(_magnitudes(2001, 0.3))
    assert prof.pattern == ("down", "up", "down")
    assert len(prof.breakpoints) == 2


def test_unimodality_case_large_angle():
    prof = unimodality_profile(_magnitudes(2001, 1.5))
    assert prof.pattern == ("up", "down", "up", "down")
    assert len(prof.breakpoints) == 3
