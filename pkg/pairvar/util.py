"""Digests of input files and configurations for run manifests"""
import hashlib
import pathlib

import numpy as np

#: Number of hex characters of object identifiers
ID_LENGTH = 12


def hash_file(path, blocksize=65536):
    """Full sha256 hex digest of a file, read in blocks of `blocksize`"""
    hasher = hashlib.sha256()
    with pathlib.Path(path).open("rb") as fd:
        for block in iter(lambda: fd.read(blocksize), b""):
            hasher.update(block)
    return hasher.hexdigest()


def hash_object(obj, length=ID_LENGTH):
    """Short sha256 identifier of a configuration-like object

    Parameters
    ----------
    obj: str, number, None, list, tuple, dict, numpy.ndarray, ...
        Any object supported by :func:`obj2bytes`; containers
        are serialized recursively
    length: int
        Number of hex characters returned

    Returns
    -------
    hex: str
        The first `length` characters of the digest
    """
    return hashlib.sha256(obj2bytes(obj)).hexdigest()[:length]


def obj2bytes(obj):
    """Canonical byte representation of an object for hashing

    Tuples are treated like lists and dictionaries are sorted
    by key, so that equal configurations yield equal bytes.
    numpy scalars are converted to the corresponding Python
    numbers. Variance models are represented by form and
    coefficients.
    """
    if isinstance(obj, np.generic):
        obj = obj.item()
    if obj is None:
        return b"none"
    if isinstance(obj, str):
        return obj.encode("utf-8")
    if isinstance(obj, (bool, int, float)):
        return repr(obj).encode("utf-8")
    if isinstance(obj, pathlib.PurePath):
        return obj2bytes(str(obj))
    if isinstance(obj, np.ndarray):
        return obj.tobytes()
    if isinstance(obj, (list, tuple)):
        return b"[" + b",".join(obj2bytes(o) for o in obj) + b"]"
    if isinstance(obj, dict):
        return obj2bytes(sorted(obj.items()))
    if hasattr(obj, "theta") and hasattr(obj, "form"):
        return obj2bytes([obj.form, obj.theta])
    raise ValueError("No rule to convert object '{}' to bytes.".format(
        obj.__class__))
