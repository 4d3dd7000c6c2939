import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bourinlab.dense import InvalidInputError, abs_power
from bourinlab.sampling import complex_gaussian, random_block, random_block_psd, random_psd_array
from bourinlab.spectrum import (
    OPERATOR, AlgebraModel, BlockOperator, NormSpec, SingularSpectrum, lambda_of, merge, mu_of,
    norm_value, partial_integral, pointwise_excess, scale_spectrum, spectrum_product,
    spectrum_sum, submajorization_margins, submajorizes,
)

S = SingularSpectrum.from_steps


def test_model_parse_and_validation():
    m = AlgebraModel.parse("2:0.5,3:2.0")
    assert m.sizes == (2, 3) and m.weights == (0.5, 2.0)
    assert m.total_trace == 7.0
    assert AlgebraModel.parse(str(m)) == m
    for bad in ("", "0:1", "2:0", "2:-1", "a:b", "2"):
        with pytest.raises(InvalidInputError):
            AlgebraModel.parse(bad)


def test_block_operator_shape_check():
    m = AlgebraModel.parse("2:1,1:1")
    with pytest.raises(InvalidInputError):
        BlockOperator(m, (np.eye(2),))
    with pytest.raises(InvalidInputError):
        BlockOperator(m, (np.eye(2), np.eye(2)))


def test_mu_examples():
    assert mu_of(np.eye(2)).steps == [(1.0, 2.0)]
    m = AlgebraModel(((1, 0.5), (2, 2.0)))
    x = BlockOperator(m, (np.diag([3.0]), np.diag([2.0, 1.0])))
    assert mu_of(x).steps == [(3.0, 0.5), (2.0, 2.0), (1.0, 2.0)]
    got = mu_of(np.array([[2.0, 1.0], [1.0, 1.0]])).steps
    expected = [((3 + math.sqrt(5)) / 2, 1.0), ((3 - math.sqrt(5)) / 2, 1.0)]
    np.testing.assert_allclose(got, expected, atol=1e-14)


def test_canonical_form():
    f = SingularSpectrum.from_pairs([1, 3, 1, 0], [1, 1, 2, 0])
    assert f.steps == [(3.0, 1.0), (1.0, 3.0)]
    assert SingularSpectrum.from_json(f.to_json()).steps == f.steps
    with pytest.raises(InvalidInputError):
        SingularSpectrum.from_pairs([-1], [1])


def test_lambda_examples():
    assert lambda_of(np.eye(2), 0.5) == 2
    assert lambda_of(np.eye(2), 1.0) == 0
    assert lambda_of(S([(3, 0.5), (2, 2), (1, 2)]), 1.5) == 2.5
    with pytest.raises(InvalidInputError):
        lambda_of(np.eye(2), -1)


def test_partial_integral_examples():
    assert partial_integral(S([(2, 1)]), 0.5) == 1
    assert partial_integral(S([(3, 1), (1, 2)]), 2) == 4
    assert partial_integral(S([(3, 1), (1, 2)]), 3) == 5
    # beyond the total width the function is zero
    assert partial_integral(S([(3, 1), (1, 2)]), 10) == 5


def test_submajorization_examples():
    f = S([(3, 1), (1, 2)])
    r = submajorizes(f, f)
    assert r.holds and r.worst_margin == 0
    assert submajorizes(S([(1, 2)]), S([(2, 1)])).holds
    r = submajorizes(S([(2, 1)]), S([(1, 2)]))
    assert not r.holds and r.worst_margin == 1 and r.worst_a == 1


def test_zero_extension():
    # mu(x + y) against mu(x (+) y) of doubled width
    assert submajorizes(S([(1, 2)]), S([(2, 1)])).holds
    assert not submajorizes(S([(2, 1), (1, 1)]), S([(2, 1)])).holds


def test_norm_examples():
    assert norm_value(mu_of(np.eye(2)), NormSpec.schatten(2)) == pytest.approx(math.sqrt(2), abs=1e-15)
    f = S([(3, 1), (1, 2)])
    assert norm_value(f, OPERATOR) == 3
    assert norm_value(f, NormSpec.kyfan(2)) == 4
    assert norm_value(f, NormSpec.schatten(math.inf)) == 3
    with pytest.raises(InvalidInputError):
        norm_value(f, NormSpec.kyfan(4))


def test_scale_examples():
    f = S([(2, 1)])
    assert scale_spectrum(f, 1).steps == f.steps
    np.testing.assert_allclose(scale_spectrum(f, 2 ** 0.5).steps, [(2 * math.sqrt(2), 1)])
    with pytest.raises(InvalidInputError):
        scale_spectrum(f, 0)


def brute_force_mu(x: BlockOperator):
    pairs = []
    for b, w in zip(x.blocks, x.model.weights):
        pairs.extend((s, w) for s in np.linalg.svd(b, compute_uv=False))
    pairs.sort(key=lambda p: -p[0])
    return pairs


@pytest.mark.parametrize("spec", ["3:1", "2:0.5,3:2.0", "1:0.25,1:4,2:1.5"])
def test_rearrangement_brute_force(rng, spec):
    model = AlgebraModel.parse(spec)
    for _ in range(20):
        x = random_block(model, rng)
        f = mu_of(x)
        pairs = brute_force_mu(x)
        # expand canonical steps back into (value, width) lists and compare integrals
        ref = SingularSpectrum.from_pairs([p[0] for p in pairs], [p[1] for p in pairs])
        np.testing.assert_array_equal(f.values, ref.values)
        np.testing.assert_array_equal(f.widths, ref.widths)
        assert f.total_width == pytest.approx(model.total_trace)


def test_lemma_2_1_item1(rng):
    model = AlgebraModel.parse("2:0.5,3:2.0")
    for _ in range(10):
        x = random_block(model, rng)
        f = mu_of(x)
        np.testing.assert_allclose(mu_of(x.adjoint()).values, f.values, atol=1e-10)
        absx = x.map(lambda a: abs_power(a, 1.0))
        np.testing.assert_allclose(mu_of(absx).values, f.values, atol=1e-10)


def test_lemma_2_1_items_3_4_5_6(rng):
    model = AlgebraModel.parse("2:0.5,3:2.0")
    for _ in range(20):
        x = random_block_psd(model, "uniform", rng)
        d = random_block_psd(model, "exponential", rng)
        y = BlockOperator(model, tuple(a + b for a, b in zip(x.blocks, d.blocks)))
        assert pointwise_excess(mu_of(x), mu_of(y)) <= 1e-10
        a, b, g, h = (random_block(model, rng) for _ in range(4))
        na = max(np.linalg.norm(m, 2) for m in a.blocks)
        nb = max(np.linalg.norm(m, 2) for m in b.blocks)
        agb = BlockOperator(model, tuple(p @ m @ q for p, m, q in zip(a.blocks, g.blocks, b.blocks)))
        assert pointwise_excess(mu_of(agb), scale_spectrum(mu_of(g), na * nb)) <= 1e-10
        gh_sum = BlockOperator(model, tuple(p + q for p, q in zip(g.blocks, h.blocks)))
        assert submajorizes(mu_of(gh_sum), spectrum_sum(mu_of(g), mu_of(h))).holds
        gh = BlockOperator(model, tuple(p @ q for p, q in zip(g.blocks, h.blocks)))
        assert submajorizes(mu_of(gh), spectrum_product(mu_of(g), mu_of(h))).holds


def test_merge_is_direct_sum():
    f, g = S([(3, 1)]), S([(2, 1), (1, 1)])
    assert merge(f, g).steps == [(3, 1), (2, 1), (1, 1)]


# -- exact-arithmetic oracle for the breakpoint decision ------------------------

small_steps = st.lists(
    st.tuples(st.integers(0, 6), st.integers(1, 4)), min_size=1, max_size=5
)


def exact_partial(steps, a):
    steps = sorted(steps, key=lambda s: -s[0])
    total, left = Fraction(0), Fraction(a)
    for v, w in steps:
        take = min(Fraction(w), left)
        total += v * take
        left -= take
        if left <= 0:
            break
    return total


def exact_submajorizes(gs, fs, grid):
    return all(exact_partial(gs, a) <= exact_partial(fs, a) for a in grid)


@settings(max_examples=200, deadline=None)
@given(gs=small_steps, fs=small_steps)
def test_breakpoint_decision_matches_dense_grid(gs, fs):
    width = max(sum(w for _, w in gs), sum(w for _, w in fs))
    grid = [Fraction(k, 8) for k in range(8 * width + 1)]
    expected = exact_submajorizes(gs, fs, grid)
    got = submajorizes(S(gs), S(fs), tol=0.0)
    assert got.holds == expected
    _, margins = submajorization_margins(S(gs), S(fs))
    assert got.worst_margin == max(margins)


@settings(max_examples=100, deadline=None)
@given(a=small_steps, b=small_steps, c=small_steps)
def test_preorder(a, b, c):
    fa, fb, fc = S(a), S(b), S(c)
    assert submajorizes(fa, fa, tol=0.0).holds
    if submajorizes(fa, fb, tol=0.0).holds and submajorizes(fb, fc, tol=0.0).holds:
        assert submajorizes(fa, fc, tol=0.0).holds


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_kyfan_bridge(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    x = random_psd_array(n, "uniform", rng)
    c = complex_gaussian(n, rng)
    c /= np.linalg.norm(c, 2)
    g, f = mu_of(c @ x @ c.conj().T), mu_of(x)
    assert submajorizes(g, f).holds
    for p in (1, 1.5, 2, 3, math.inf):
        assert norm_value(g, NormSpec.schatten(p)) <= norm_value(f, NormSpec.schatten(p)) + 1e-9
    for a in f.breakpoints:
        assert norm_value(g, NormSpec.kyfan(a)) <= norm_value(f, NormSpec.kyfan(a)) + 1e-9


def test_scale_covariance(rng):
    g = mu_of(random_psd_array(4, "uniform", rng))
    f = mu_of(random_psd_array(4, "uniform", rng))
    _, m1 = submajorization_margins(g, f)
    _, m2 = submajorization_margins(scale_spectrum(g, 3.0), scale_spectrum(f, 3.0))
    np.testing.assert_allclose(m2, 3 * m1, rtol=1e-12, atol=1e-14)
