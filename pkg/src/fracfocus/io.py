"""File formats: binary PGM images, CSV float fields, stack directories.

Slides travel as 8-bit binary PGM (P5, maxval 255, values mapped linearly
from [0, 1]) or, in lossless mode, as CSV with 17 significant digits so
that floats round-trip bit-exactly.  Depth maps are CSV with the literal
token NaN at invalid pixels plus a small JSON sidecar holding the
recovery parameters.  A stack directory couples numbered slide files
with a stack.json carrying all physical metadata.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .grids import DepthMap, FocalStack

__all__ = [
    "StackFormatError",
    "read_depth_csv",
    "read_field_csv",
    "read_pgm",
    "read_stack_dir",
    "write_depth_csv",
    "write_field_csv",
    "write_pgm",
    "write_stack_dir",
]

_DEPTH_META_KEYS = ("q", "alpha", "zeta", "z_min", "z_max", "h")


class StackFormatError(ValueError):
    """A stack directory is missing a file or a file disagrees with stack.json."""


def write_pgm(path: str | Path, values: np.ndarray) -> None:
    """Write a 2D float field as binary PGM, clipping to [0, 1]."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D field, got shape {arr.shape}")
    pixels = np.rint(np.clip(arr, 0.0, 1.0) * 255.0).astype(np.uint8)
    height, width = arr.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())


def _pgm_tokens(raw: bytes):
    """Yield whitespace-separated header tokens, skipping # comments."""
    pos = 0
    while pos < len(raw):
        c = raw[pos:pos + 1]
        if c == b"#":
            pos = raw.find(b"\n", pos)
            if pos < 0:
                return
            pos += 1
        elif c.isspace():
            pos += 1
        else:
            end = pos
            while end < len(raw) and not raw[end:end + 1].isspace():
                end += 1
            yield raw[pos:end], end
            pos = end


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM into floats in [0, 1] (pixel / maxval)."""
    raw = Path(path).read_bytes()
    tokens = _pgm_tokens(raw)
    try:
        (magic, _), (w_tok, _), (h_tok, _), (max_tok, end) = (
            next(tokens), next(tokens), next(tokens), next(tokens))
    except StopIteration:
        raise ValueError(f"{path}: truncated PGM header") from None
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    width, height, maxval = int(w_tok), int(h_tok), int(max_tok)
    if width < 1 or height < 1 or not 0 < maxval < 256:
        raise ValueError(f"{path}: bad PGM dimensions {width}x{height}"
                         f" maxval {maxval}")
    data = raw[end + 1:end + 1 + width * height]
    if len(data) != width * height:
        raise ValueError(f"{path}: PGM raster truncated "
                         f"({len(data)} of {width * height} bytes)")
    pixels = np.frombuffer(data, dtype=np.uint8).reshape(height, width)
    return pixels.astype(float) / maxval


def write_field_csv(path: str | Path, values: np.ndarray) -> None:
    """Write a 2D float field as CSV that round-trips bit-exactly."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D field, got shape {arr.shape}")
    np.savetxt(path, arr, fmt="%.17g", delimiter=",")


def read_field_csv(path: str | Path) -> np.ndarray:
    """Read a 2D float field written by write_field_csv."""
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_depth_csv(path: str | Path, depth_map: DepthMap) -> None:
    """Write a depth map as CSV plus a JSON metadata sidecar.

    Invalid pixels are written as the literal token NaN; the sidecar
    ``<name>.json`` records the method and recovery parameters so the map
    can be interpreted without the stack it came from.
    """
    path = Path(path)
    rows = []
    for vals, ok in zip(depth_map.values, depth_map.valid):
        rows.append(",".join(format(v, ".17g") if good and np.isfinite(v)
                             else "NaN"
                             for v, good in zip(vals, ok)))
    path.write_text("\n".join(rows) + "\n", encoding="ascii")
    meta = {"method": depth_map.method}
    meta.update((key, getattr(depth_map, key)) for key in _DEPTH_META_KEYS)
    sidecar = path.with_suffix(".json")
    sidecar.write_text(json.dumps(meta, indent=2) + "\n", encoding="ascii")


def read_depth_csv(path: str | Path) -> DepthMap:
    """Read a depth map written by write_depth_csv.

    NaN tokens become invalid pixels.  The JSON sidecar is optional; a
    bare CSV loads with empty metadata.
    """
    path = Path(path)
    values = []
    for line_no, line in enumerate(path.read_text(encoding="ascii").splitlines(), 1):
        if not line.strip():
            continue
        row = []
        for token in line.split(","):
            token = token.strip()
            row.append(float("nan") if token.lower() == "nan" else float(token))
        values.append(row)
        if len(row) != len(values[0]):
            raise ValueError(f"{path}: ragged row at line {line_no}")
    if not values:
        raise ValueError(f"{path}: empty depth CSV")
    arr = np.array(values, dtype=float)
    valid = np.isfinite(arr)
    arr = np.where(valid, arr, np.nan)
    meta = {}
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        loaded = json.loads(sidecar.read_text(encoding="ascii"))
        meta = {key: loaded[key] for key in _DEPTH_META_KEYS if key in loaded}
    return DepthMap(values=arr, valid=valid, **meta)


def _slide_name(k: int, lossless: bool) -> str:
    return f"slide_{k:03d}.{'csv' if lossless else 'pgm'}"


def write_stack_dir(out_dir: str | Path, stack: FocalStack,
                    truth: DepthMap | None = None,
                    scene=None, blur=None,
                    lossless: bool = False) -> None:
    """Write a stack directory: numbered slides, stack.json, truth files.

    ``scene`` and ``blur`` may be any dataclasses describing how the
    stack was made; they are stored verbatim in stack.json.  With
    ``lossless`` the slides go out as full-precision CSV instead of 8-bit
    PGM.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_slides = stack.data.shape[0]
    meta = {
        "z_min": stack.z_min,
        "z_max": stack.z_max,
        "n_slides": n_slides,
        "h": stack.h,
        "width": int(stack.data.shape[2]),
        "height": int(stack.data.shape[1]),
        "lossless": bool(lossless),
        "seed": getattr(scene, "seed", None),
        "scene": asdict(scene) if scene is not None else None,
        "blur": asdict(blur) if blur is not None else None,
    }
    (out_dir / "stack.json").write_text(json.dumps(meta, indent=2) + "\n",
                                        encoding="ascii")
    for k in range(n_slides):
        target = out_dir / _slide_name(k, lossless)
        if lossless:
            write_field_csv(target, stack.data[k])
        else:
            write_pgm(target, stack.data[k])
    if truth is not None:
        write_depth_csv(out_dir / "truth.csv", truth)


def read_stack_dir(stack_dir: str | Path,
                   ) -> tuple[FocalStack, DepthMap | None]:
    """Read a stack directory back, validating it against stack.json.

    Raises StackFormatError naming the first missing or inconsistent
    file.  Returns the stack and the ground-truth map if truth.csv is
    present.
    """
    stack_dir = Path(stack_dir)
    meta_path = stack_dir / "stack.json"
    if not meta_path.exists():
        raise StackFormatError(f"{meta_path}: missing")
    try:
        meta = json.loads(meta_path.read_text(encoding="ascii"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise StackFormatError(f"{meta_path}: unreadable JSON ({exc})") from exc
    try:
        z_min = float(meta["z_min"])
        z_max = float(meta["z_max"])
        n_slides = int(meta["n_slides"])
        h = float(meta["h"])
        width = int(meta["width"])
        height = int(meta["height"])
        lossless = bool(meta.get("lossless", False))
    except (KeyError, TypeError, ValueError) as exc:
        raise StackFormatError(f"{meta_path}: bad or missing field ({exc})"
                               ) from exc
    slides = []
    for k in range(n_slides):
        target = stack_dir / _slide_name(k, lossless)
        if not target.exists():
            raise StackFormatError(f"{target}: missing")
        try:
            slide = read_field_csv(target) if lossless else read_pgm(target)
        except ValueError as exc:
            raise StackFormatError(f"{target}: unreadable ({exc})") from exc
        if slide.shape != (height, width):
            raise StackFormatError(
                f"{target}: shape {slide.shape} does not match stack.json "
                f"({height}, {width})")
        slides.append(slide)
    try:
        stack = FocalStack(np.stack(slides), z_min=z_min, z_max=z_max, h=h)
    except ValueError as exc:
        raise StackFormatError(f"{meta_path}: {exc}") from exc
    truth = None
    truth_path = stack_dir / "truth.csv"
    if truth_path.exists():
        try:
            truth = read_depth_csv(truth_path)
        except ValueError as exc:
            raise StackFormatError(f"{truth_path}: unreadable ({exc})"
                                   ) from exc
        if truth.values.shape != (height, width):
            raise StackFormatError(
                f"{truth_path}: shape {truth.values.shape} does not match "
                f"stack.json ({height}, {width})")
    return stack, truth
