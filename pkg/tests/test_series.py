"""Truncated t-series, Laurent windows, the reparameterization solver with
its order audits, and the regular/singular matching identity."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from equigen.expansion import LocalModel, SigmaModel
from equigen.series import (
    NEG_INF,
    LaurentSlice,
    TriState,
    TSeries,
    order_bound_audit,
    pm_identity_check,
    regularize,
    reparam_solve,
    reparam_unit_slice,
    residue_at,
    substitution_check,
)

SEED = 20260816

K = 10


def ts(*coeffs, modulus=K):
    return TSeries(modulus, [Fraction(c) for c in coeffs])


series_strat = st.builds(
    lambda cs: TSeries(8, cs),
    st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=4), max_size=8),
)


# ---------------------------------------------------------------------------
# TSeries


def test_tseries_trims_and_caps():
    s = TSeries(4, [1, 0, 2, 0, 7, 9])
    assert s.coeffs == (1, 0, 2)
    assert TSeries(3, [0, 0, 0, 5]).is_zero()


def test_tseries_ord_sentinel():
    assert ts(0, 0, 3).ord() == 2
    assert TSeries.zero(K).ord() == K


def test_tseries_coeff_bounds():
    s = ts(1, 2)
    assert s.coeff(5) == 0
    with pytest.raises(ValueError):
        s.coeff(K)
    with pytest.raises(ValueError):
        s.coeff(-1)


def test_tseries_mixed_moduli_rejected():
    with pytest.raises(ValueError):
        ts(1) + ts(1, modulus=K + 1)


@given(series_strat, series_strat, series_strat)
def test_tseries_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)


@given(series_strat, series_strat)
def test_tseries_ord_bounds(a, b):
    assert (a + b).ord() >= min(a.ord(), b.ord())
    assert (a * b).ord() >= min(a.ord() + b.ord(), a.modulus)


def test_tseries_shift_and_truncate():
    s = ts(1, 2, 3)
    assert s.shift(2) == ts(0, 0, 1, 2, 3)
    assert s.truncate(2) == TSeries(2, [1, 2])
    with pytest.raises(ValueError):
        s.truncate(K + 1)
    with pytest.raises(ValueError):
        s.shift(-1)


def test_tseries_pow_and_scalar_div():
    s = ts(1, 1)
    assert s ** 3 == ts(1, 3, 3, 1)
    assert (ts(2, 4) / 2) == ts(1, 2)


# ---------------------------------------------------------------------------
# LaurentSlice


def test_slice_monomial_and_coeff():
    m = LaurentSlice.monomial(K, -2, ts(1))
    assert m.hi == -2
    assert m.coeff_at(-2) == ts(1)
    assert m.coeff_at(0) == TSeries.zero(K)
    # coeff below the floor is not knowable
    bounded = LaurentSlice(K, -1, 3, {0: ts(1)})
    with pytest.raises(ValueError):
        bounded.coeff_at(-2)


def test_slice_add_window_is_max_of_floors():
    a = LaurentSlice(K, -3, 0, {0: ts(1)})
    b = LaurentSlice(K, -1, 2, {2: ts(1)})
    s = a + b
    assert s.lo == -1 and s.hi == 2


def test_slice_mul_window_rule():
    a = LaurentSlice(K, -2, 1, {1: ts(1)})
    b = LaurentSlice(K, -3, 2, {2: ts(1)})
    p = a * b
    # lo = max(lo_a + hi_b, lo_b + hi_a), hi = hi_a + hi_b
    assert p.lo == max(-2 + 2, -3 + 1) and p.hi == 3
    assert p.coeff_at(3) == ts(1)


def test_slice_mul_with_full_trust():
    a = LaurentSlice(K, NEG_INF, 1, {1: ts(1), 0: ts(0, 1)})
    b = LaurentSlice(K, NEG_INF, 0, {0: ts(1)})
    p = a * b
    assert p.lo == NEG_INF
    assert p.coeff_at(1) == ts(1)
    assert p.coeff_at(0) == ts(0, 1)


def test_slice_inverse_unit_geometric():
    # (1 - t*s^(-1))^(-1) = sum t^k s^(-k)
    u = LaurentSlice(K, -4, 0, {0: ts(1), -1: ts(0, -1)})
    inv = u.inverse_unit(-4)
    for k in range(5):
        expect = TSeries(K, [0] * k + [1])
        assert inv.coeff_at(-k) == expect


def test_slice_power_negative():
    u = LaurentSlice(K, -3, 0, {0: ts(1), -1: ts(0, 1)})
    sq = u.power(2, -3)
    inv_sq = u.power(-2, -3)
    prod = sq * inv_sq
    for e in range(-3, 1):
        assert prod.coeff_at(e) == (ts(1) if e == 0 else TSeries.zero(K))


def test_slice_agrees_with():
    a = LaurentSlice(K, -2, 0, {0: ts(1), -1: ts(2)})
    b = LaurentSlice(K, -3, 0, {0: ts(1), -1: ts(2), -3: ts(9)})
    assert a.agrees_with(b, -2, 0)
    assert not a.agrees_with(b + LaurentSlice.monomial(K, -1, ts(1)), -2, 0)


def test_regularize_split():
    s = LaurentSlice(K, -2, 1, {1: ts(1), 0: ts(2), -1: ts(3), -2: ts(4)})
    reg, sing = regularize(s)
    assert reg.coeff_at(1) == ts(1) and reg.coeff_at(0) == ts(2)
    assert sing.coeff_at(-1) == ts(3) and sing.coeff_at(-2) == ts(4)
    assert residue_at(s) == ts(3)


# ---------------------------------------------------------------------------
# reparameterization


def _worked_example():
    c_now = [ts(0, 0, 1)]
    c_next = [ts(0, 0, 1, 1)]
    return LocalModel(2, 3), c_now, c_next


def test_reparam_worked_example_frozen():
    model, c_now, c_next = _worked_example()
    res = reparam_solve(model, c_now, c_next, 8, K)
    assert res.delta_prime[2] == ts(0, 0, 0, 1)
    assert res.epsilon[3] == TSeries.zero(K)
    assert res.epsilon[4] == ts(0, 0, 0, 0, 0, 0, Fraction(-1, 8))
    assert res.epsilon[5] == TSeries.zero(K)
    assert res.epsilon[6] == ts(0, 0, 0, 0, 0, 0, 0, 0, 0, Fraction(-1, 16))


def test_reparam_low_orders_copy_delta():
    # delta'_2 and delta'_3 copy the raw increments: cross terms only enter
    # at order 4 and above
    rng = random.Random(SEED)
    for a in (2, 3, 4):
        model = LocalModel(a, a + 1 if (a + 1) % a else a + 2)
        for _ in range(25):
            c_now, c_next = _random_pair(rng, model, K)
            res = reparam_solve(model, c_now, c_next, 9, K)
            for i in range(2, min(3, a) + 1):
                assert res.delta_prime[i] == c_next[i - 2] - c_now[i - 2]


def _random_pair(rng, model, modulus):
    # ord(c_i(now)) is pinned at exactly i so the increment floor is i + 1
    c_now = []
    c_next = []
    for i in range(2, model.a + 1):
        lead = Fraction(rng.choice((-1, 1)) * rng.randint(1, 3), rng.randint(1, 2))
        base = [0] * i + [lead] + [Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                                   for _ in range(modulus - i - 1)]
        delta = [0] * min(i + 1 + rng.randint(0, 2), modulus)
        delta += [Fraction(rng.randint(-2, 2), rng.randint(1, 2))
                  for _ in range(modulus - len(delta))]
        c_now.append(TSeries(modulus, base))
        c_next.append(TSeries(modulus, base) + TSeries(modulus, delta))
    return c_now, c_next


def test_reparam_substitution_oracle_randomized():
    rng = random.Random(SEED + 1)
    for a, b in ((2, 3), (3, 4), (4, 6)):
        model = LocalModel(a, b)
        for _ in range(20):
            modulus = rng.randint(8, 12)
            smax = rng.randint(a, 10)
            c_now, c_next = _random_pair(rng, model, modulus)
            res = reparam_solve(model, c_now, c_next, smax, modulus)
            assert substitution_check(res, c_now, c_next)
            assert order_bound_audit(res, c_now, c_next).ok


def test_reparam_identical_inputs_give_zero():
    model, c_now, _ = _worked_example()
    res = reparam_solve(model, c_now, [s for s in c_now], 8, K)
    assert all(s.is_zero() for s in res.delta_prime.values())
    assert all(s.is_zero() for s in res.epsilon.values())


def test_reparam_validation():
    model, c_now, c_next = _worked_example()
    with pytest.raises(ValueError):
        reparam_solve(model, c_now, c_next, 1, K)  # smax below a
    with pytest.raises(ValueError):
        reparam_solve(model, [ts(1)], c_next, 8, K)  # ord(c2) < 2
    with pytest.raises(ValueError):
        reparam_solve(model, c_now, [ts(0, 0, 1, modulus=12)], 8, K)  # moduli differ


def test_audit_entries_worked_example():
    model, c_now, c_next = _worked_example()
    res = reparam_solve(model, c_now, c_next, 8, K)
    audit = order_bound_audit(res, c_now, c_next)
    by_key = {(e.kind, e.index): e for e in audit.entries}
    d2 = by_key[("delta_prime", 2)]
    assert (d2.required, d2.actual) == (3, 3)
    e4 = by_key[("epsilon", 4)]
    assert (e4.required, e4.actual) == (5, 6)
    assert audit.ok


def test_unit_slice_window():
    model, c_now, c_next = _worked_example()
    res = reparam_solve(model, c_now, c_next, 8, K)
    u = reparam_unit_slice(res, -5)
    assert u.hi == 0
    assert u.coeff_at(0) == ts(1)
    # unit coefficient at s^-2 is u_2 = -delta_2 / 2
    assert u.coeff_at(-2) == ts(0, 0, 0, Fraction(-1, 2))


# ---------------------------------------------------------------------------
# matching identity


def test_pm_untwisted_true():
    model, c_now, c_next = _worked_example()
    K8 = 8
    c_now = [s.truncate(K8) for s in c_now]
    c_next = [s.truncate(K8) for s in c_next]
    assert pm_identity_check(SigmaModel(model), c_now, c_next, 8, K8) is TriState.TRUE


def test_pm_small_window_inconclusive():
    model, c_now, c_next = _worked_example()
    assert pm_identity_check(SigmaModel(model), c_now, c_next, 3, K) is TriState.INCONCLUSIVE


def test_pm_twisted_true():
    model, c_now, c_next = _worked_example()
    K8 = 8
    c_now = [s.truncate(K8) for s in c_now]
    c_next = [s.truncate(K8) for s in c_next]
    sm = SigmaModel(model, (Fraction(1), Fraction(-2, 3)))
    assert pm_identity_check(sm, c_now, c_next, 8, K8) is TriState.TRUE


def test_pm_a4_twisted_true():
    rng = random.Random(7)
    model = LocalModel(4, 6)
    modulus = 11
    c_now, c_next = _random_pair(rng, model, modulus)
    sm = SigmaModel(model, (Fraction(2),))
    assert pm_identity_check(sm, c_now, c_next, 7, modulus) is TriState.TRUE


def test_pm_randomized_in_bounds():
    rng = random.Random(SEED + 2)
    for a, b in ((2, 3), (3, 4)):
        model = LocalModel(a, b)
        for _ in range(10):
            modulus = rng.randint(7, 10)
            smax = max(model.a, modulus - model.b + rng.randint(0, 2))
            c_now, c_next = _random_pair(rng, model, modulus)
            g0 = tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 2))
                       for _ in range(rng.randint(0, 2)))
            sm = SigmaModel(model, g0)
            assert pm_identity_check(sm, c_now, c_next, smax, modulus) is TriState.TRUE
