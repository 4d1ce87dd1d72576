import numpy as np
import pytest

from secrates import ChannelTriple, GainDistribution, SystemParams


@pytest.fixture
def paper_delay_setup():
    """Exponential main (mean 10) and eavesdropper (mean 1) gains, unit
    non-fading jamming gain, unit powers."""
    dist = ChannelTriple(
        GainDistribution.exponential(10.0),
        GainDistribution.exponential(1.0),
        GainDistribution.deterministic(1.0),
    )
    return SystemParams(1.0, 1.0), dist


@pytest.fixture
def paper_ergodic_setup():
    """All three links Rayleigh-fading: means 10, 1, 1; unit powers."""
    dist = ChannelTriple(
        GainDistribution.exponential(10.0),
        GainDistribution.exponential(1.0),
        GainDistribution.exponential(1.0),
    )
    return SystemParams(1.0, 1.0), dist


def exp_triple(m, e, z):
    return ChannelTriple(
        GainDistribution.exponential(m),
        GainDistribution.exponential(e),
        GainDistribution.exponential(z),
    )


def det_triple(m, e, z):
    return ChannelTriple(
        GainDistribution.deterministic(m),
        GainDistribution.deterministic(e),
        GainDistribution.deterministic(z),
    )
