import hashlib
import pathlib
import tempfile

import numpy as np
import pytest

from pairvar import util
from pairvar.model import VarianceModel


def test_hash_file():
    _, path = tempfile.mkstemp(prefix="pairvar_test_util_", suffix=".csv")
    data = b"id,y1,y2\n" + b"a,10.21,10.78\n" * 10000
    pathlib.Path(path).write_bytes(data)
    # larger than one block
    assert util.hash_file(path, blocksize=4096) == \
        hashlib.sha256(data).hexdigest()


def test_hash_object():
    h1 = util.hash_object({"theta": [4.84, -0.927], "seed": 3})
    h2 = util.hash_object({"seed": 3, "theta": (4.84, -0.927)})
    assert h1 == h2
    assert len(h1) == 12
    assert util.hash_object([1, 2]) != util.hash_object([2, 1])


def test_obj2bytes():
    assert util.obj2bytes(np.float64(0.1)) == util.obj2bytes(0.1)
    assert util.obj2bytes(np.int32(3)) == util.obj2bytes(3)
    assert util.obj2bytes(None) == b"none"
    assert util.obj2bytes(pathlib.Path("a.csv")) == b"a.csv"
    vm = VarianceModel("exp-linear", [4.84, -0.927])
    assert util.obj2bytes(vm) == util.obj2bytes(["exp-linear", vm.theta])
    with pytest.raises(ValueError):
        util.obj2bytes(object())


if __name__ == "__main__":
    # Run all tests
    loc = locals()
    for key in list(loc.keys()):
        if key.startswith("test_") and hasattr(loc[key], "__call__"):
            loc[key]()
