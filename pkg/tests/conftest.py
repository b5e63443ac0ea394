import pytest

from xsign.corpus import ScenarioSpec, generate


@pytest.fixture(scope="session")
def figure1():
    return generate(ScenarioSpec("figure1", 1, "structural"))


@pytest.fixture(scope="session")
def figure1_crypto():
    return generate(ScenarioSpec("figure1", 42, "cryptographic"))


@pytest.fixture(scope="session")
def mutual_crypto():
    return generate(ScenarioSpec("mutual", 42, "cryptographic"))


@pytest.fixture(scope="session")
def certinomis():
    return generate(ScenarioSpec("certinomis", 1, "structural"))


@pytest.fixture(scope="session")
def diginotar():
    return generate(ScenarioSpec("diginotar", 1, "structural"))


@pytest.fixture(scope="session")
def actalis():
    return generate(ScenarioSpec("actalis", 1, "structural"))


@pytest.fixture(scope="session")
def swiss():
    return generate(ScenarioSpec("swiss", 1, "structural"))


@pytest.fixture(scope="session")
def letsencrypt():
    return generate(ScenarioSpec("letsencrypt", 1, "structural"))
