import pytest

from noisymagic.verify import CHECKS


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_check(name):
    assert CHECKS[name]()
