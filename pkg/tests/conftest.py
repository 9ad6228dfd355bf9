import numpy as np
import pytest

from mmrac.scenarios import ControllerSpec, builtin, run_scenario
from mmrac.second_level import VertexSet

EX1_VERTICES = [[-10.0, -10.0], [15.0, -10.0], [5.0, 15.0]]
EX1_THETA_P = np.array([5.0, 3.0])
EX1_THETA_M = np.array([-24.0, -8.0])
# barycentric weights of [5, 3]: alpha_1 = 0.192, alpha_2 = 0.288, alpha_3 = 0.520
EX1_ALPHA = np.array([0.192, 0.288, 0.520])

# acceptance results collected by test_acceptance.py, printed at session end
ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def ex1_vertices():
    return VertexSet(EX1_VERTICES)


@pytest.fixture(scope="session")
def ex1_ode_adaptive():
    """Example 1, ODE estimator, adaptive models, 20 s."""
    return run_scenario(builtin("example1").replace(t_end=20.0))


@pytest.fixture(scope="session")
def ex1_ode_fixed():
    return run_scenario(builtin("example1").replace(t_end=20.0, model_mode="fixed"))


@pytest.fixture(scope="session")
def ex1_direct():
    cfg = builtin("example1").replace(controller=ControllerSpec("direct_first_level"),
                                      t_end=20.0, sample_every=1)
    return cfg, run_scenario(cfg)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
