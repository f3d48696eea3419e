"""Testing common functional utilities."""

import inspect
from itertools import islice
from unittest import mock

from neat_ann.func_utils import repeat_func, timed, wrap_fn


def test_repeat_func():
    """Test repeat_func that it gets repeatedly called over n times(or inf)."""
    counter = iter(range(100))

    assert list(repeat_func(lambda: next(counter), times=3)) == [0, 1, 2]
    # infinite generator, consumed lazily
    it = repeat_func(lambda: next(counter))
    assert list(islice(it, 2)) == [3, 4]
    assert list(repeat_func(lambda: next(counter), times=0)) == []


def test_wrap_fn():
    """Test wrap_fn which reduces arity to zero."""
    func = wrap_fn(pow, 2, 10, mod=1000)

    params = inspect.getfullargspec(func)
    assert not any(params[:-1])
    assert func() == 24
    assert func.__name__ == "pow"


def test_timed():
    """Test timed returns the result and the elapsed milliseconds."""
    func = mock.MagicMock(return_value=42)
    with mock.patch("neat_ann.func_utils.time.perf_counter", side_effect=[1.0, 1.25]):
        result, elapsed = timed(func)
    assert result == 42
    assert elapsed == 250
    func.assert_called_once_with()
