import numpy as np
import pytest

from ostbc_blind import BUILTIN_CODE_NAMES, builtin_code


@pytest.fixture
def rng():
    return np.random.default_rng(20250811)


@pytest.fixture(params=BUILTIN_CODE_NAMES)
def code(request):
    return builtin_code(request.param)


@pytest.fixture
def alamouti():
    return builtin_code("alamouti")
