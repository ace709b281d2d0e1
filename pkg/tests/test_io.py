import math

import numpy as np
import pytest

from lapident import io


def test_fmt():
    assert io.fmt(0.1) == "0.10000000000000001"
    assert io.fmt(np.float64(2.0)) == "2"
    assert io.fmt(math.nan) == "nan"
    assert io.fmt(True) == "1"
    assert io.fmt(np.int64(7)) == "7"
    assert io.fmt("WL") == "WL"


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "x.csv"
    io.write_csv(path, ["a", "b"], [[1, 0.5], [2, math.nan]])
    assert path.read_bytes() == b"a,b\n1,0.5\n2,nan\n"
    assert io.read_csv(path) == [{"a": "1", "b": "0.5"}, {"a": "2", "b": "nan"}]


def test_parse_config():
    cfg = io.parse_config("# comment\nseed = 3\n\nn_values = 1,2 # trailing\n")
    assert cfg == {"seed": "3", "n_values": "1,2"}


def test_parse_config_collects_all_problems():
    with pytest.raises(io.ConfigError) as exc:
        io.parse_config("a = 1\nnonsense\na = 2\n")
    assert len(exc.value.problems) == 2


@pytest.mark.parametrize("text,expected", [("0..3", (0, 1, 2, 3)), ("1, 5,7", (1, 5, 7)), ("0..2,9", (0, 1, 2, 9))])
def test_int_lists(text, expected):
    assert io.parse_int_list(text) == expected


def test_float_list():
    assert io.parse_float_list("0.1, 1e-3") == (0.1, 1e-3)
