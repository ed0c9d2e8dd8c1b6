import json
import math

import numpy as np
import pytest

from triaxis import io as tio
from triaxis.spinalg import SpinState

from conftest import random_state


def test_fmt():
    assert tio.fmt(3) == "3" and tio.fmt(True) == "1"
    assert tio.fmt(0.1) == "0.10000000000000001"
    assert tio.fmt(float("nan")) == "nan" and tio.fmt(-math.inf) == "-inf"
    assert float(tio.fmt(1 / 3)) == 1 / 3


def test_csv_text():
    assert tio.csv_text(["a", "b"], [[1, 0.5], ["x", 2]]) == "a,b\n1,0.5\nx,2\n"


def test_json_text_round_trip():
    obj = {"a": [1.5, 2], "b": {"c": None, "d": [[0.25, -1.0]]}, "e": float("nan"), "f": True}
    back = json.loads(tio.json_text(obj))
    assert back == {"a": [1.5, 2], "b": {"c": None, "d": [[0.25, -1.0]]}, "e": None, "f": True}
    with pytest.raises(TypeError):
        tio.json_text({"x": object()})


def test_state_round_trip(rng):
    psi = random_state(rng, 7)
    back = tio.parse_state(tio.format_state(psi))
    assert back == psi


def test_parse_state_comments_and_blank_lines():
    psi = tio.parse_state("# spin one half\n\ntwo_j = 1\n1 0\n\n0 0\n")
    assert psi.two_j == 1 and psi.amplitudes[0] == 1


@pytest.mark.parametrize("text", ["", "j = 1\n1 0\n0 0\n", "two_j = x\n", "two_j = -1\n",
                                  "two_j = 1\n1 0\n", "two_j = 1\n1\n0 0\n",
                                  "two_j = 1\n1 a\n0 0\n", "two_j = 1\nnan 0\n0 0\n",
                                  "two_j = 1\n1 0\n1 0\n"])
def test_parse_state_rejects(text):
    with pytest.raises(tio.StateFileError):
        tio.parse_state(text)


def test_renormalize():
    psi = tio.parse_state("two_j = 1\n3 0\n0 4\n", renormalize=True)
    assert psi.norm() == pytest.approx(1.0)
    with pytest.raises(tio.StateFileError):
        tio.parse_state("two_j = 1\n0 0\n0 0\n", renormalize=True)


def test_read_missing_file(tmp_path):
    with pytest.raises(tio.StateFileError):
        tio.read_state_file(tmp_path / "nope.txt")


def test_write_text_atomic(tmp_path):
    target = tmp_path / "out.csv"
    tio.write_text(target, "a\n")
    tio.write_text(target, "b\n")
    assert target.read_text() == "b\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
