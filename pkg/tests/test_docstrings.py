import doctest
import importlib

import pytest

import uwqkd
from uwqkd import csvio, keyrate, qber, stokes, tolerance

# uwqkd re-exports the radiance() function, which shadows the submodule attribute.
radiance = importlib.import_module("uwqkd.radiance")


@pytest.mark.parametrize("module", [uwqkd, csvio, keyrate, qber, radiance, stokes, tolerance],
                         ids=lambda module: module.__name__)
def test_docstring_examples_run(module) -> None:
    result = doctest.testmod(module)
    assert result.attempted > 0
    assert result.failed == 0
