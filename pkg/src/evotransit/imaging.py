"""Image decode, PNG frame emission, and GIF assembly.

Frames are always lossless PNG with deterministic names, so identical runs
write identical bytes and filenames sort in generation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import Raster
from .errors import (
    DecodeError,
    DimensionMismatchError,
    EmptyFrameListError,
    ImagingIoError,
    UnreadableFileError,
    UnsupportedFormatError,
)

SUPPORTED_INPUT_FORMATS = ("PNG", "JPEG", "BMP")


@dataclass(frozen=True)
class FrameRecord:
    path: Path
    generation: int
    fraction: float
    tag: str


def raster_to_image(raster: Raster) -> Image.Image:
    return Image.fromarray(raster.pixels, mode="RGB")


def load_raster(path) -> Raster:
    """Decode a PNG, JPEG, or BMP file into an RGB8 raster.

    Alpha channels are discarded and grayscale is expanded to RGB; pixel
    values are otherwise untouched.
    """
    path = Path(path)
    try:
        handle = open(path, "rb")
    except OSError as exc:
        raise UnreadableFileError(f"cannot open {path}: {exc}") from exc
    with handle:
        try:
            image = Image.open(handle)
        except UnidentifiedImageError as exc:
            raise UnsupportedFormatError(f"{path} is not a recognized image") from exc
        if image.format not in SUPPORTED_INPUT_FORMATS:
            raise UnsupportedFormatError(
                f"{path} is {image.format}; accepted formats: "
                + ", ".join(SUPPORTED_INPUT_FORMATS)
            )
        try:
            image = image.convert("RGB")
        except OSError as exc:
            raise DecodeError(f"{path} is corrupt or truncated: {exc}") from exc
    return Raster(np.asarray(image, dtype=np.uint8))


def frame_name(generation: int, fraction: float) -> str:
    """frame_g{generation:09d}_p{fraction*1000 rounded:04d}.png"""
    return f"frame_g{generation:09d}_p{round(fraction * 1000):04d}.png"


def write_frame(raster: Raster, out_dir, generation: int, fraction: float, tag: str) -> FrameRecord:
    """Write one lossless PNG frame with its deterministic name."""
    out_dir = Path(out_dir)
    path = out_dir / frame_name(generation, fraction)
    try:
        raster_to_image(raster).save(path, format="PNG")
    except OSError as exc:
        raise ImagingIoError(f"cannot write frame {path}: {exc}") from exc
    return FrameRecord(path=path, generation=generation, fraction=fraction, tag=tag)


def assemble_animation(frames: list[FrameRecord], out_path, frame_delay_ms: int = 100) -> Path:
    """Assemble the frames, in list order, into an animated GIF."""
    if not frames:
        raise EmptyFrameListError("no frames to assemble")
    images = []
    for record in frames:
        try:
            with Image.open(record.path) as img:
                images.append(img.convert("RGB"))
        except (OSError, UnidentifiedImageError) as exc:
            raise ImagingIoError(f"cannot read frame {record.path}: {exc}") from exc
    first_size = images[0].size
    if any(img.size != first_size for img in images):
        raise DimensionMismatchError("animation frames must share dimensions")
    out_path = Path(out_path)
    try:
        images[0].save(
            out_path,
            format="GIF",
            save_all=True,
            append_images=images[1:],
            duration=frame_delay_ms,
            loop=0,
        )
    except OSError as exc:
        raise ImagingIoError(f"cannot write animation {out_path}: {exc}") from exc
    return out_path


class DirectoryFrameSink:
    """Frame consumer that writes PNGs into one directory and keeps the records."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.records: list[FrameRecord] = []

    def __call__(self, raster: Raster, generation: int, fraction: float, tag: str) -> FrameRecord:
        record = write_frame(raster, self.out_dir, generation, fraction, tag)
        self.records.append(record)
        return record
