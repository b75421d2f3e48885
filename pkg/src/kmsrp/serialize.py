"""JSON (de)serialization for matrices and instance files.

Matrices travel as {"dim": n, "re": [[...]], "im": [[...]]}, with "im"
omitted for real matrices.  An instance file is {"kind": ..., "payload":
{...}} where the payload is owned by the module the kind belongs to.
"""

import json

import numpy as np

KINDS = ("contraction", "kms", "rpfunction", "finite-group", "resolvent")


class MalformedInstanceError(ValueError):
    """Instance JSON does not validate."""


def matrix_to_json(M):
    M = np.asarray(M)
    out = {"dim": int(M.shape[0]), "re": np.real(M).tolist()}
    if np.iscomplexobj(M) and np.abs(np.imag(M)).max(initial=0.0) > 0:
        out["im"] = np.imag(M).tolist()
    return out


def matrix_from_json(obj):
    try:
        n = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInstanceError(f"bad matrix object: {exc}") from exc
    if re.shape != (n, n) and re.shape[0] != n:
        raise MalformedInstanceError(
            f"matrix shape {re.shape} does not match dim {n}")
    if "im" in obj:
        im = np.asarray(obj["im"], dtype=float)
        if im.shape != re.shape:
            raise MalformedInstanceError("re/im shapes differ")
        return re + 1j * im
    return re


def save_instance(path, kind, payload):
    if kind not in KINDS:
        raise MalformedInstanceError(f"unknown kind {kind!r}")
    with open(path, "w") as fh:
        json.dump({"kind": kind, "payload": payload}, fh, indent=2,
                  sort_keys=True)
        fh.write("\n")


def load_instance(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInstanceError(f"cannot read instance: {exc}") from exc
    if not isinstance(obj, dict) or "kind" not in obj or "payload" not in obj:
        raise MalformedInstanceError("instance needs 'kind' and 'payload'")
    if obj["kind"] not in KINDS:
        raise MalformedInstanceError(f"unknown kind {obj['kind']!r}")
    return obj["kind"], obj["payload"]
