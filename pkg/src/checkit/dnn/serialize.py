"""Self-describing binary model file.

Layout::

    b"CKITMODL" | uint32 format_version | uint32 header length | JSON header | float64 data

The JSON header lists every array name and shape in storage order; data are
little-endian float64, row-major, concatenated in that order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .model import FORMAT_VERSION, ModelError, ModelParams

MAGIC = b"CKITMODL"
_FIXED = ("scaler_mean", "scaler_std", "bn_gamma", "bn_beta", "bn_mean", "bn_var")


class FormatVersionError(ModelError):
    pass


class ShapeError(ModelError):
    pass


def _arrays(model: ModelParams):
    for name in _FIXED:
        yield name, getattr(model, name)
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        yield f"W{i}", w
        yield f"b{i}", b


def serialize_model(model: ModelParams) -> bytes:
    model.validate()
    arrays = list(_arrays(model))
    header = {
        "input_dim": model.input_dim,
        "bn_eps": model.bn_eps,
        "bn_momentum": model.bn_momentum,
        "layers": len(model.weights),
        "arrays": [{"name": n, "shape": list(a.shape)} for n, a in arrays],
    }
    hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<II", model.format_version, len(hbytes)), hbytes]
    parts += [np.ascontiguousarray(a, dtype="<f8").tobytes() for _, a in arrays]
    return b"".join(parts)


def deserialize_model(data: bytes) -> ModelParams:
    data = bytes(data)
    if len(data) < len(MAGIC) + 8 or not data.startswith(MAGIC):
        raise ShapeError("not a model file (bad magic or truncated header)")
    version, hlen = struct.unpack_from("<II", data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"model format_version {version} does not match supported version {FORMAT_VERSION}"
        )
    start = len(MAGIC) + 8
    if len(data) < start + hlen:
        raise ShapeError("truncated header")
    try:
        header = json.loads(data[start:start + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ShapeError(f"corrupt header: {exc}") from None
    offset = start + hlen
    arrays = {}
    for spec in header["arrays"]:
        shape = tuple(int(s) for s in spec["shape"])
        nbytes = 8 * int(np.prod(shape, dtype=np.int64))
        if offset + nbytes > len(data):
            raise ShapeError(f"data for {spec['name']} {shape} runs past the end of the file")
        arrays[spec["name"]] = np.frombuffer(data, dtype="<f8", count=nbytes // 8,
                                             offset=offset).reshape(shape).astype(np.float64)
        offset += nbytes
    if offset != len(data):
        raise ShapeError(f"{len(data) - offset} trailing bytes after the last array")
    layers = int(header["layers"])
    try:
        model = ModelParams(
            input_dim=int(header["input_dim"]),
            **{name: arrays[name] for name in _FIXED},
            weights=[arrays[f"W{i}"] for i in range(layers)],
            biases=[arrays[f"b{i}"] for i in range(layers)],
            bn_eps=float(header["bn_eps"]),
            bn_momentum=float(header["bn_momentum"]),
            format_version=version,
        )
    except KeyError as exc:
        raise ShapeError(f"missing array {exc.args[0]}") from None
    model.validate()
    return model
