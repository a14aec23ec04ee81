import numpy as np
import pytest

from conegamma import gamma_law as gl
from conegamma import spectral as sp


def seq_law(rule, m=None):
    return gl.GammaLaw(sp.SequenceMeasure(rule, m), sp.SequenceScale(1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def exp_weights():
    """alpha(v_n) = e^{-n}, beta(v_n) = 1/n."""
    return seq_law("exp_weights")


@pytest.fixture
def power_weights():
    """alpha(v_n) = n^{-3}, beta(v_n) = 1/n."""
    return seq_law("power_weights", 2.0)


@pytest.fixture
def log_weights():
    """alpha(v_n) = 1 / (ln(1+n)^3 (n+1)), beta(v_n) = 1/n."""
    return seq_law("log_weights")


def one_dim(shape, rate):
    return gl.GammaLaw(sp.DiscreteMeasure([[1.0]], [shape]), sp.ConstantScale(rate))
