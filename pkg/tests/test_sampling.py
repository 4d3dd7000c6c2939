import numpy as np
import pytest

from bourinlab.dense import InvalidInputError
from bourinlab.sampling import (
    SPECTRUM_LAWS, draw_spectrum, haar_unitary, law_mean, psd_from_spectrum, random_psd,
)

# scalar-law expectations (condition law: E over d ~ U(0,6) of mean of logspace(0, -d, 4))
ANALYTIC_MEANS = {"uniform": 0.5, "exponential": 1.0, "two-point": 0.5}


def test_haar_is_unitary(rng):
    for n in (1, 3, 8):
        u = haar_unitary(n, rng)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-13)


def test_identity_spectrum(rng):
    np.testing.assert_allclose(psd_from_spectrum(np.ones(4), haar_unitary(4, rng)), np.eye(4), atol=1e-14)


def test_two_point_eigenvalues(rng):
    for _ in range(10):
        x = random_psd(5, "two-point", rng)
        assert np.all(np.isin(np.round(x.eigenvalues, 12), [0.0, 1.0]))


def test_unknown_law(rng):
    with pytest.raises(InvalidInputError):
        draw_spectrum(3, "cauchy", rng)
    with pytest.raises(InvalidInputError):
        random_psd(0, "uniform", rng)


@pytest.mark.parametrize("law", SPECTRUM_LAWS)
def test_mean_trace(law):
    rng = np.random.default_rng(11)
    n, draws = 4, 10_000
    traces = [np.trace(random_psd(n, law, rng).data).real for _ in range(draws)]
    oracle = law_mean(law)
    assert abs(np.mean(traces) - n * oracle) <= 0.05 * n * oracle
    if law in ANALYTIC_MEANS:
        assert oracle == pytest.approx(ANALYTIC_MEANS[law], rel=0.01)


def test_condition_law_mean_quadrature():
    # independent oracle: average over a fine uniform grid of the decade count
    d = np.linspace(0.0, 6.0, 20001)
    k = np.arange(4) / 3
    quad = float(np.mean(10.0 ** (-np.outer(d, k)), axis=1).mean())
    assert law_mean("condition") == pytest.approx(quad, rel=0.01)
