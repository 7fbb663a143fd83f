import numpy as np
import pytest
from PIL import Image

from evotransit import (
    DecodeError,
    DimensionMismatchError,
    EmptyFrameListError,
    ImagingIoError,
    Raster,
    UnreadableFileError,
    UnsupportedFormatError,
    assemble_animation,
    frame_name,
    load_raster,
    write_frame,
)
from evotransit.imaging import DirectoryFrameSink


def save_rgb(path, pixels):
    Image.fromarray(pixels, mode="RGB").save(path)
    return path


class TestLoadRaster:
    def test_png_200x200(self, tmp_path):
        pixels = np.random.default_rng(0).integers(0, 256, (200, 200, 3), dtype=np.uint8)
        raster = load_raster(save_rgb(tmp_path / "img.png", pixels))
        assert raster.dims == (200, 200)
        assert np.array_equal(raster.pixels, pixels)

    def test_single_pixel(self, tmp_path):
        raster = load_raster(save_rgb(tmp_path / "one.png", np.full((1, 1, 3), 5, np.uint8)))
        assert raster.dims == (1, 1)

    def test_jpeg_and_bmp_accepted(self, tmp_path):
        pixels = np.zeros((8, 8, 3), np.uint8)
        Image.fromarray(pixels).save(tmp_path / "img.jpg", quality=95)
        Image.fromarray(pixels).save(tmp_path / "img.bmp")
        assert load_raster(tmp_path / "img.jpg").dims == (8, 8)
        assert load_raster(tmp_path / "img.bmp").dims == (8, 8)

    def test_alpha_discarded(self, tmp_path):
        rgba = np.zeros((4, 4, 4), np.uint8)
        rgba[..., 0] = 200
        rgba[..., 3] = 10  # nearly transparent; RGB bytes must survive as-is
        Image.fromarray(rgba, mode="RGBA").save(tmp_path / "a.png")
        raster = load_raster(tmp_path / "a.png")
        assert np.array_equal(raster.pixels, rgba[..., :3])

    def test_grayscale_expanded(self, tmp_path):
        gray = np.arange(16, dtype=np.uint8).reshape(4, 4) * 10
        Image.fromarray(gray, mode="L").save(tmp_path / "g.png")
        raster = load_raster(tmp_path / "g.png")
        for channel in range(3):
            assert np.array_equal(raster.pixels[..., channel], gray)

    def test_missing_file(self, tmp_path):
        with pytest.raises(UnreadableFileError):
            load_raster(tmp_path / "absent.png")

    def test_truncated_png(self, tmp_path):
        pixels = np.random.default_rng(1).integers(0, 256, (64, 64, 3), dtype=np.uint8)
        path = save_rgb(tmp_path / "full.png", pixels)
        data = path.read_bytes()
        truncated = tmp_path / "broken.png"
        truncated.write_bytes(data[: len(data) // 2])
        with pytest.raises(DecodeError):
            load_raster(truncated)

    def test_unsupported_format_gif(self, tmp_path):
        Image.fromarray(np.zeros((4, 4, 3), np.uint8)).save(tmp_path / "img.gif")
        with pytest.raises(UnsupportedFormatError):
            load_raster(tmp_path / "img.gif")

    def test_not_an_image(self, tmp_path):
        path = tmp_path / "notes.txt"
        path.write_text("not pixels")
        with pytest.raises(UnsupportedFormatError):
            load_raster(path)


class TestWriteFrame:
    def test_naming_rule(self):
        assert frame_name(1234, 0.125) == "frame_g000001234_p0125.png"
        assert frame_name(0, 1.0) == "frame_g000000000_p1000.png"
        assert frame_name(7, 0.0) == "frame_g000000007_p0000.png"

    def test_names_sort_in_generation_order(self):
        names = [frame_name(g, 0.5) for g in (0, 9, 10, 99, 100, 12345, 10**9 - 1)]
        assert names == sorted(names)

    def test_write_and_record(self, tmp_path):
        raster = Raster(np.full((6, 6, 3), 9, np.uint8))
        record = write_frame(raster, tmp_path, 42, 0.375, "milestone")
        assert record.path.name == "frame_g000000042_p0375.png"
        assert record.path.exists()
        assert record.generation == 42 and record.fraction == 0.375 and record.tag == "milestone"

    def test_roundtrip_bit_exact(self, tmp_path):
        pixels = np.random.default_rng(2).integers(0, 256, (20, 30, 3), dtype=np.uint8)
        record = write_frame(Raster(pixels), tmp_path, 1, 0.5, "stride")
        assert np.array_equal(load_raster(record.path).pixels, pixels)

    def test_rewrite_is_byte_identical(self, tmp_path):
        pixels = np.random.default_rng(3).integers(0, 256, (16, 16, 3), dtype=np.uint8)
        record = write_frame(Raster(pixels), tmp_path, 5, 0.25, "milestone")
        first = record.path.read_bytes()
        write_frame(Raster(pixels), tmp_path, 5, 0.25, "milestone")
        assert record.path.read_bytes() == first

    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        raster = Raster(np.zeros((2, 2, 3), np.uint8))
        with pytest.raises(ImagingIoError):
            write_frame(raster, blocker / "sub", 0, 0.0, "initial")


class TestAssembleAnimation:
    def _frames(self, tmp_path, count, size=(10, 10)):
        records = []
        for i in range(count):
            pixels = np.full((*size, 3), i * 20, np.uint8)
            records.append(write_frame(Raster(pixels), tmp_path, i, i / max(count, 2), "stride"))
        return records

    def test_six_frames(self, tmp_path):
        records = self._frames(tmp_path, 6)
        out = assemble_animation(records, tmp_path / "anim.gif", frame_delay_ms=80)
        with Image.open(out) as gif:
            assert gif.format == "GIF"
            assert gif.n_frames == 6

    def test_single_frame(self, tmp_path):
        records = self._frames(tmp_path, 1)
        out = assemble_animation(records, tmp_path / "anim.gif")
        with Image.open(out) as gif:
            assert gif.n_frames == 1

    def test_empty_list(self, tmp_path):
        with pytest.raises(EmptyFrameListError):
            assemble_animation([], tmp_path / "anim.gif")

    def test_mixed_dimensions(self, tmp_path):
        a = self._frames(tmp_path, 1, size=(10, 10))
        b = [
            write_frame(Raster(np.zeros((5, 5, 3), np.uint8)), tmp_path, 99, 0.9, "stride")
        ]
        with pytest.raises(DimensionMismatchError):
            assemble_animation(a + b, tmp_path / "anim.gif")


class TestDirectoryFrameSink:
    def test_collects_records(self, tmp_path):
        sink = DirectoryFrameSink(tmp_path)
        raster = Raster(np.zeros((3, 3, 3), np.uint8))
        record = sink(raster, generation=1, fraction=0.125, tag="milestone")
        assert record in sink.records and record.path.exists()
