import json

import numpy as np
import pytest

from bourinlab.dense import InvalidInputError
from bourinlab.expressions import RangeError
from bourinlab.sampling import complex_gaussian, random_block_psd, random_psd_array
from bourinlab.spectrum import AlgebraModel, BlockOperator
from bourinlab.verifier import (
    CATALOG, INEQUALITY_IDS, CheckReport, Lemma21Instance, PsdOperator, SuiteConfig,
    check_bourin_pq, check_bourin_t, check_constant_bounds, check_cor_bt_ft, check_ft,
    check_lemma_2_1_suite, check_lemma_3_1_gram, check_lemma_3_2, check_lemma_3_6,
    check_lemma_3_8_1, check_lemma_3_8_2, check_thm_cauchy_schwarz_Bt, exit_code, fingerprint,
    proved_failures, run_suite, self_adjoint_product_pair, summarize,
)


def pair(rng, n=4, law="uniform"):
    return random_psd_array(n, law, rng), random_psd_array(n, law, rng)


def test_catalog_complete():
    assert set(CATALOG) == set(INEQUALITY_IDS)
    assert len(INEQUALITY_IDS) == 19


def test_bourin_t_examples(rng):
    r = check_bourin_t(np.eye(3), np.eye(3), 0.8)
    assert r.holds and r.worst_margin == 0
    for _ in range(5):
        x, y = pair(rng)
        r = check_bourin_t(x, y, 1.0)
        assert r.holds and r.worst_margin == 0.0
        for t in (0, 0.1, 0.25, 0.75, 0.9, 1):
            r = check_bourin_t(x, y, t)
            assert r.holds and r.proved and r.notes == "proved range"
    r = check_bourin_t(x, y, 0.5)
    assert not r.proved and r.notes == "open range"


def test_report_json_roundtrip(rng):
    x, y = pair(rng)
    r = check_bourin_t(x, y, 0.3)
    back = CheckReport.from_json(json.loads(r.to_jsonl()))
    assert back == r
    assert r.holds == (r.worst_margin <= r.tolerance)


def test_fingerprint_deterministic(rng):
    x, y = pair(rng)
    assert check_bourin_t(x, y, 0.2).instance_fingerprint == check_bourin_t(x.copy(), y.copy(), 0.2).instance_fingerprint
    assert fingerprint(PsdOperator.from_any(x), 0.2) != fingerprint(PsdOperator.from_any(x), 0.3)


def test_scalar_margin():
    r = check_bourin_t(np.array([[4.0]]), np.array([[9.0]]), 0.5)
    assert r.worst_margin == pytest.approx((12 - 13) / 14, abs=1e-15)


def test_bourin_pq_examples(rng):
    a, b = pair(rng)
    r = check_bourin_pq(a, b, 3, 1)
    assert r.t == 0.75 and r.proved and r.holds
    r = check_bourin_pq(a, b, 1, 1)
    assert r.t == 0.5 and not r.proved
    r = check_bourin_pq(a, b, 1, 0)
    assert r.t == 1.0 and r.worst_margin == 0.0


def test_constant_bounds_ranges(rng):
    x, y = pair(rng)
    ids = lambda t: {r.check_id for r in check_constant_bounds(x, y, t)}  # noqa: E731
    assert ids(0.1) == {"bourin_const_half", "b_const_lower"}
    assert ids(0.5) == {"bourin_const_half", "f_const_2t1"}
    assert ids(0.8) == {"bourin_const_half", "f_const_2t1", "f_const_4t3", "b_const_upper"}


def test_constant_bounds_sharp_points(rng):
    x, y = pair(rng)
    half = {r.check_id: r for r in check_constant_bounds(x, y, 0.5)}["bourin_const_half"]
    assert half.worst_margin == check_bourin_t(x, y, 0.5).worst_margin
    at34 = {r.check_id: r for r in check_constant_bounds(x, y, 0.75)}
    assert at34["f_const_4t3"].worst_margin == check_ft(x, y, 0.75).worst_margin
    assert at34["b_const_upper"].worst_margin == check_bourin_t(x, y, 0.75).worst_margin


def test_constant_bounds_scalar_oracle():
    # x = y = diag(3, 1): both b_t and f_t equal 2x, so the margin is 6(1-c)/(1+8c)
    x = np.diag([3.0, 1.0])
    for t in (0.1, 0.6, 0.9):
        for r in check_constant_bounds(x, x, t):
            c = float(r.notes.split("=")[1])
            assert r.worst_margin == pytest.approx(6 * (1 - c) / (1 + 8 * c), abs=1e-14)
    c = 2 ** 0.4  # bourin_const_half at t = 0.9
    got = {r.check_id: r for r in check_constant_bounds(x, x, 0.9)}["bourin_const_half"]
    assert got.worst_margin == pytest.approx(-0.1658910493272788, abs=1e-14)
    assert 6 * (1 - c) / (1 + 8 * c) == pytest.approx(-0.1658910493272788, abs=1e-15)


def test_ft_examples(rng):
    x, y = pair(rng)
    assert check_ft(x, y, 1.0).worst_margin == 0.0
    r = check_ft(np.eye(2), np.eye(2), 0.8)
    assert r.holds and r.worst_margin == pytest.approx(0, abs=1e-15)
    assert check_ft(x, y, 0.75).check_id == "prop_f34"
    for t in np.linspace(0.75, 1, 6):
        assert check_ft(x, y, t).holds
    with pytest.raises(RangeError):
        check_ft(x, y, 0.7)


def test_cauchy_schwarz_examples(rng):
    x, y = pair(rng)
    r = check_thm_cauchy_schwarz_Bt(x, y, np.zeros((4, 4)), 0.7)
    assert r.holds
    i = np.eye(3)
    r = check_thm_cauchy_schwarz_Bt(i, i, i, 0.75)
    assert abs(r.worst_margin) < 1e-14
    for _ in range(10):
        x, y = pair(rng)
        z = complex_gaussian(4, rng)
        assert check_thm_cauchy_schwarz_Bt(x, y, z, float(rng.uniform(0.5, 1))).holds
        assert check_cor_bt_ft(x, y, float(rng.uniform(0.5, 1))).holds


def test_gram_check(rng):
    for _ in range(10):
        x, y = pair(rng)
        r = check_lemma_3_1_gram(x, y, complex_gaussian(4, rng), float(rng.uniform(0.5, 1)))
        assert r.holds


def test_lemma_3_6_examples(rng):
    x, _ = pair(rng)
    r = check_lemma_3_6(x, np.zeros((4, 4)))
    assert r.holds and r.worst_margin == pytest.approx(0, abs=1e-15)
    r = check_lemma_3_6(np.eye(1), np.eye(1))
    assert r.holds and r.worst_margin == 0.0
    for n in (2, 5, 8):
        assert check_lemma_3_6(*pair(rng, n)).holds


def test_lemma_3_8_examples(rng):
    a = complex_gaussian(4, rng)
    r = check_lemma_3_8_1(a, a.conj().T, 1.0)
    assert r.holds and abs(r.worst_margin) < 1e-12
    with pytest.raises(InvalidInputError):
        check_lemma_3_8_1(a, a, 1.0)
    model = AlgebraModel.unweighted(4)
    for kind in range(4):
        g, h = self_adjoint_product_pair(model, rng, kind)
        for p in (0.5, 1, 2):
            assert check_lemma_3_8_1(g, h, p, model=model).holds
    x, y = pair(rng)
    r = check_lemma_3_8_2(x, y, 1.0)
    assert abs(r.worst_margin) < 1e-12
    r = check_lemma_3_8_2(np.diag([1.0, 2.0]), np.diag([3.0, 0.5]), 2.0)
    assert abs(r.worst_margin) < 1e-14
    for r_ in (1, 1.5, 2, 3):
        assert check_lemma_3_8_2(x, y, r_).holds
    with pytest.raises(RangeError):
        check_lemma_3_8_2(x, y, 0.5)


def test_lemma_3_2_examples(rng):
    x, y = pair(rng)
    z = complex_gaussian(4, rng)
    reports = check_lemma_3_2(x, y, z, 0.3, 2.0)
    assert [r.check_id for r in reports] == ["lem_3_2_holder", "lem_3_2_heinz", "lem_3_2_heinz"]
    assert all(r.holds for r in reports)
    # z = I, x = y collapses the chain
    reports = check_lemma_3_2(x, x, np.eye(4), 0.3, 2.0)
    assert abs(reports[1].worst_margin) < 1e-12
    # t = 1/2: the left link is an equality
    reports = check_lemma_3_2(x, y, z, 0.5, 2.0)
    assert abs(reports[1].worst_margin) < 1e-12 or reports[1].notes == "chain: right"


def test_lemma_2_1(rng):
    model = AlgebraModel.parse("2:0.5,3:2.0")
    insts = [Lemma21Instance.random(model, rng) for _ in range(5)]
    reports = check_lemma_2_1_suite(insts)
    assert len(reports) == 30 and all(r.holds for r in reports)
    x = random_block_psd(model, "uniform", rng)
    zero = BlockOperator(model, tuple(np.zeros((n, n)) for n in model.sizes))
    inst = Lemma21Instance(x, zero, x, x, x, x, alpha=-2.0)
    reports = check_lemma_2_1_suite([inst])
    assert reports[0].worst_margin < 1e-14  # mu(-2x) = 2 mu(x)
    assert reports[2].worst_margin <= 1e-15  # item (3) with equality


def test_weighted_single_block_matches_unweighted(rng):
    x, y = pair(rng)
    xb, yb = BlockOperator.single(x), BlockOperator.single(y)
    for t in (0.1, 0.5, 0.9):
        a = check_bourin_t(x, y, t)
        b = check_bourin_t(xb, yb, t)
        assert a.worst_margin == b.worst_margin


def test_model_mismatch(rng):
    x, y = pair(rng)
    with pytest.raises(InvalidInputError):
        check_bourin_t(x, random_psd_array(3, "uniform", rng), 0.2)


def test_suite_small_and_deterministic():
    cfg = SuiteConfig(seed=3, dims=(2, 3), trials=2)
    a, b = run_suite(cfg), run_suite(cfg)
    assert [r.to_jsonl() for r in a] == [r.to_jsonl() for r in b]
    assert not proved_failures(a) and exit_code(a) == 0
    rows = {row.check_id: row for row in summarize(a)}
    assert rows["bourin_t"].trials == 2 * 2 * 21
    assert run_suite(SuiteConfig(trials=0)) == []


def test_suite_weighted_model():
    cfg = SuiteConfig(seed=5, trials=2, model=AlgebraModel.parse("2:0.5,3:2.0"))
    assert exit_code(run_suite(cfg)) == 0


def test_suite_config_validation():
    for bad in (SuiteConfig(trials=-1), SuiteConfig(tol=0), SuiteConfig(law="nope"),
                SuiteConfig(checks=("x",)), SuiteConfig(ft_grid=(0.5,))):
        with pytest.raises(InvalidInputError):
            bad.validate()
