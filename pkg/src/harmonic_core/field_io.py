"""
File formats: `.fld` space-time fields and JSON frequency profiles.

A `.fld` file is one JSON header line {R, nx, nt, x_range, t_range}
followed by nx*nt little-endian complex128 values, row-major in x.
"""
import json
from pathlib import Path
from typing import Union
import logging

import numpy as np

from harmonic_core.errors import GridError, ProfileError
from harmonic_core.profiles import FrequencyProfile, make_profile
from harmonic_core.spacetime import SpaceTimeField, SpaceTimeGrid

PathLike = Union[str, Path]

logger = logging.getLogger(__name__)


def write_field(field: SpaceTimeField, path: PathLike) -> Path:
    path = Path(path)
    header = json.dumps(field.grid.describe(), sort_keys=True)
    with path.open("wb") as handle:
        handle.write(header.encode("utf-8") + b"\n")
        handle.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes())
    logger.info(f"Wrote {field.grid.nx}x{field.grid.nt} field to {path}")
    return path


def read_field(path: PathLike) -> SpaceTimeField:
    path = Path(path)
    with path.open("rb") as handle:
        header = json.loads(handle.readline().decode("utf-8"))
        payload = handle.read()
    try:
        nx, nt = int(header["nx"]), int(header["nt"])
        x_lo, x_hi = header["x_range"]
        t_lo, t_hi = header["t_range"]
        grid = SpaceTimeGrid(
            R=float(header["R"]), nx=nx, nt=nt, x_half=float(x_hi), t_half=float(t_hi)
        )
    except (KeyError, TypeError, ValueError) as e:
        raise GridError(f"malformed field header in {path}: {e}")
    if abs(x_lo + x_hi) > 1e-9 * abs(x_hi) or abs(t_lo + t_hi) > 1e-9 * abs(t_hi):
        raise GridError(f"field ranges in {path} are not symmetric")
    values = np.frombuffer(payload, dtype="<c16")
    if values.size != nx * nt:
        raise GridError(f"{path} holds {values.size} values, header says {nx * nt}")
    return SpaceTimeField(grid, values.reshape(nx, nt).astype(complex))


def profile_to_dict(f: FrequencyProfile) -> dict:
    interleaved = np.empty(2 * f.M)
    interleaved[0::2] = f.samples.real
    interleaved[1::2] = f.samples.imag
    document = {"label": f.label, "M": f.M, "samples": interleaved.tolist()}
    if f.support is not None:
        document["support"] = list(f.support)
    return document


def profile_from_dict(document: dict) -> FrequencyProfile:
    try:
        samples = np.asarray(document["samples"], dtype=float)
        M = int(document["M"])
    except (KeyError, TypeError, ValueError) as e:
        raise ProfileError(f"malformed profile document: {e}")
    if samples.size != 2 * M:
        raise ProfileError(f"profile document has {samples.size} numbers, expected {2 * M}")
    support = document.get("support")
    return make_profile(
        samples[0::2] + 1j * samples[1::2],
        label=document.get("label", ""),
        support=tuple(support) if support else None,
    )


def write_profile(f: FrequencyProfile, path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(profile_to_dict(f)))
    logger.info(f"Wrote profile '{f.label}' (M={f.M}) to {path}")
    return path


def read_profile(path: PathLike) -> FrequencyProfile:
    return profile_from_dict(json.loads(Path(path).read_text()))
