"""Load and save binary images (PBM P1/P4 and PNG).

Ink is 1.  Grayscale input is binarized with a fixed threshold: values
below 128 become ink.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .imgcore import as_binary

THRESHOLD = 128


def _pbm_tokens(data: bytes, count: int, pos: int = 2):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ValueError("truncated PBM header")
        tokens.append(int(data[start:pos]))
    return tokens, pos


def decode_pbm(data: bytes) -> np.ndarray:
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        raise ValueError("not a PBM file")
    (w, h), pos = _pbm_tokens(data, 2)
    if w < 1 or h < 1:
        raise ValueError("PBM dimensions must be positive")
    if magic == b"P4":
        pos += 1  # single whitespace byte after the header
        row_bytes = (w + 7) // 8
        raw = np.frombuffer(data, dtype=np.uint8, count=row_bytes * h, offset=pos)
        bits = np.unpackbits(raw.reshape(h, row_bytes), axis=1)[:, :w]
        return bits.astype(np.uint8)
    body = bytearray()
    in_comment = False
    for b in data[pos:]:
        if in_comment:
            in_comment = b not in (10, 13)
        elif b == 35:  # '#'
            in_comment = True
        elif b in (48, 49):
            body.append(b - 48)
    if len(body) < w * h:
        raise ValueError("truncated PBM raster")
    return np.frombuffer(bytes(body[:w * h]), dtype=np.uint8).reshape(h, w).copy()


def encode_pbm(img, binary: bool = True) -> bytes:
    arr = as_binary(img)
    h, w = arr.shape
    if binary:
        return f"P4\n{w} {h}\n".encode() + np.packbits(arr, axis=1).tobytes()
    lines = [f"P1\n{w} {h}"]
    for row in arr:
        # keep lines under the 70-character limit of the format
        s = "".join("1" if v else "0" for v in row)
        lines.extend(s[k:k + 64] for k in range(0, len(s), 64))
    return ("\n".join(lines) + "\n").encode()


def binarize(gray) -> np.ndarray:
    return (np.asarray(gray) < THRESHOLD).astype(np.uint8)


def read_image(path) -> np.ndarray:
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P1", b"P4"):
        return decode_pbm(data)
    from PIL import Image

    with Image.open(path) as im:
        return binarize(np.asarray(im.convert("L")))


def write_image(path, img) -> None:
    path = Path(path)
    arr = as_binary(img)
    if path.suffix.lower() == ".pbm":
        path.write_bytes(encode_pbm(arr))
        return
    from PIL import Image

    Image.fromarray(((1 - arr) * 255).astype(np.uint8), mode="L").convert(
        "1", dither=Image.Dither.NONE).save(path)
