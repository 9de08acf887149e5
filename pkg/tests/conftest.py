import pytest

from ardlkit.synthetic import write_demo_data


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory):
    """Bundled synthetic dataset (seed 0), shared across test modules."""
    d = tmp_path_factory.mktemp("demo_data")
    write_demo_data(d, seed=0)
    return d
