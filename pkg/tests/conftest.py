import pytest

from fluidalg import make_rng, random_algebra, rigid_body


@pytest.fixture
def rigid123():
    return rigid_body(1.0, 2.0, 3.0)


@pytest.fixture
def random_n6():
    return random_algebra(3, 6)


def states(alg, count, seed):
    """Seeded sample of generic states for an algebra."""
    rng = make_rng(seed)
    return [rng.standard_normal(alg.dim) for _ in range(count)]


@pytest.fixture
def sample_states():
    return states
