import pytest

from decoderlab import (ScaleSchedule, build_detector_graph, build_surface_code,
                        build_syndrome_circuit)


@pytest.fixture(scope="session")
def code3():
    return build_surface_code(3)


@pytest.fixture(scope="session")
def code5():
    return build_surface_code(5)


@pytest.fixture(scope="session")
def circuit3(code3):
    return build_syndrome_circuit(code3, 3)


@pytest.fixture(scope="session")
def circuit5(code5):
    return build_syndrome_circuit(code5, 5)


@pytest.fixture(scope="session")
def graph3(circuit3):
    return build_detector_graph(circuit3, "Z")


@pytest.fixture(scope="session")
def graph5(circuit5):
    return build_detector_graph(circuit5, "Z")


@pytest.fixture(scope="session")
def small_schedule():
    """Unconstrained small-scale schedule for decomposition tests."""
    return ScaleSchedule("greedy", beta=0.5, gamma=1.5, lam=2.0)
