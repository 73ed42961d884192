"""Binary field container and dataset files.

A container is one UTF-8 JSON manifest line followed by the payload: raw
little-endian float64 pairs ``(re, im)``, time axis outermost, then
``x_1 .. x_n`` in row-major order. The manifest records the payload's
SHA-256 digest and a digest of its own canonical form, so corruption of
either part is detected on load.
"""
from __future__ import annotations

import hashlib
import json
import os

import numpy as np

from .dataset import Dataset
from .exceptions import CorruptFileError, InvalidInputError
from .grid import PHYSICAL, SLAB, GridSpec, SpaceTimeField, SpatialField

FORMAT = "cgolab-container"
VERSION = 1


def _payload(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype="<c16").tobytes()


def _canonical(manifest: dict) -> bytes:
    body = {k: v for k, v in manifest.items() if k != "manifest_sha256"}
    return json.dumps(body, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _write(path, manifest: dict, payload: bytes) -> None:
    manifest = dict(manifest, format=FORMAT, version=VERSION,
                    sha256=hashlib.sha256(payload).hexdigest(), payload_bytes=len(payload))
    manifest["manifest_sha256"] = hashlib.sha256(_canonical(manifest)).hexdigest()
    head = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(head + b"\n")
        fh.write(payload)


def _read(path) -> tuple[dict, bytes]:
    with open(path, "rb") as fh:
        raw = fh.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise CorruptFileError(f"{path}: missing manifest line")
    try:
        manifest = json.loads(raw[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFileError(f"{path}: unreadable manifest ({exc})") from exc
    if not isinstance(manifest, dict) or manifest.get("format") != FORMAT:
        raise CorruptFileError(f"{path}: not a {FORMAT} file")
    if hashlib.sha256(_canonical(manifest)).hexdigest() != manifest.get("manifest_sha256"):
        raise CorruptFileError(f"{path}: manifest digest mismatch")
    payload = raw[nl + 1:]
    if len(payload) != manifest.get("payload_bytes"):
        raise CorruptFileError(f"{path}: payload has {len(payload)} bytes, manifest says "
                               f"{manifest.get('payload_bytes')}")
    if hashlib.sha256(payload).hexdigest() != manifest.get("sha256"):
        raise CorruptFileError(f"{path}: payload digest mismatch")
    return manifest, payload


def _decode(payload: bytes, shape, path) -> np.ndarray:
    shape = tuple(int(s) for s in shape)
    count = int(np.prod(shape)) if shape else 1
    if count * 16 != len(payload):
        raise CorruptFileError(f"{path}: manifest shape {shape} does not match payload size")
    return np.frombuffer(payload, dtype="<c16").reshape(shape).astype(complex)


def save_field(path, f) -> None:
    """Write a SpatialField or SpaceTimeField."""
    if isinstance(f, SpatialField):
        manifest = {"kind": "spatial", "domain_tag": f.domain_tag}
    elif isinstance(f, SpaceTimeField):
        manifest = {"kind": "spacetime", "domain_tag": f.domain_tag, "support_tag": f.support_tag}
    else:
        raise InvalidInputError("save_field expects a SpatialField or SpaceTimeField")
    manifest.update(grid=f.grid.to_dict(), shape=list(f.values.shape))
    _write(path, manifest, _payload(f.values))


def load_field(path):
    manifest, payload = _read(path)
    try:
        grid = GridSpec.from_dict(manifest["grid"])
        kind = manifest["kind"]
        values = _decode(payload, manifest["shape"], path)
        if kind == "spatial":
            return SpatialField(grid, values, manifest.get("domain_tag", PHYSICAL))
        if kind == "spacetime":
            return SpaceTimeField(grid, values, manifest.get("domain_tag", PHYSICAL),
                                  manifest.get("support_tag", SLAB))
    except CorruptFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"{path}: inconsistent manifest ({exc})") from exc
    raise CorruptFileError(f"{path}: unknown container kind {kind!r}")


def save_dataset(path, data: Dataset) -> None:
    manifest = dict(data.manifest(), kind="dataset", shape=[2, len(data)] + list(data.grid.space_shape))
    _write(path, manifest, _payload(np.stack([data.inputs, data.outputs])))


def load_dataset(path) -> Dataset:
    manifest, payload = _read(path)
    if manifest.get("kind") != "dataset":
        raise CorruptFileError(f"{path}: not a dataset container")
    try:
        grid = GridSpec.from_dict(manifest["grid"])
        arr = _decode(payload, manifest["shape"], path)
        if arr.shape[1] != manifest["N"]:
            raise CorruptFileError(f"{path}: entry count differs from manifest N")
        kappas = manifest.get("kappas")
        return Dataset(grid, arr[0], arr[1], manifest["basis"], manifest["seed"],
                       manifest["noise_sigma"], manifest["potential_digest"],
                       None if kappas is None else np.asarray(kappas), manifest.get("packets"))
    except CorruptFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"{path}: inconsistent manifest ({exc})") from exc


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path

