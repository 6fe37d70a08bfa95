"""Gray-level images, bit-exact file I/O, and homomorphic primitives.

An image is a 2-D ``float64`` array of finite gray levels. Everything in
this package keeps pixels in double precision end to end; quantization to
integer gray levels happens only in :func:`write_pgm`.

Two on-disk formats:

* binary PGM (magic ``P5``), 8-bit samples for ``maxval <= 255`` and
  big-endian 16-bit samples otherwise (Netpbm convention);
* a raw exchange format (magic ``F64``) storing row-major little-endian
  IEEE-754 doubles, for lossless persistence of real-valued intermediates
  such as log-domain images.

The homomorphic primitives convert between the pixel domain and the log
domain: a positive bias is added before the logarithm so zero-valued
pixels stay finite, and subtracted again after exponentiation.
"""

import numpy as np

__all__ = [
    "PgmError",
    "as_image",
    "read_pgm",
    "write_pgm",
    "read_f64",
    "write_f64",
    "log_domain",
    "exp_domain",
    "subtract",
]

_WHITESPACE = b" \t\r\n"


class PgmError(ValueError):
    """Malformed PGM/F64 data; the message names the failing byte offset."""


def as_image(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float64 array, validating shape and values."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite pixel values")
    return arr


def _check_bias(bias: float) -> float:
    bias = float(bias)
    if not np.isfinite(bias) or bias <= 0.0:
        raise ValueError(f"bias must be a positive finite real, got {bias}")
    return bias


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skips whitespace and '#' comments (comment runs to end of line).
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#'
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise PgmError(f"unexpected end of header at byte {pos}")
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        pos += 1
    return data[start:pos], pos


def read_pgm(data: bytes) -> np.ndarray:
    """Parse a binary PGM (``P5``) byte string into a float64 image.

    8-bit payloads use one byte per pixel; 16-bit payloads (maxval > 255)
    use two bytes per pixel, big-endian. Header comments are allowed.
    """
    if data[:2] != b"P5":
        raise PgmError(f"expected magic 'P5' at byte 0, got {data[:2]!r}")
    pos = 2
    values = []
    for name in ("width", "height", "maxval"):
        token, pos = _next_token(data, pos)
        try:
            value = int(token)
        except ValueError:
            raise PgmError(
                f"invalid {name} {token!r} at byte {pos - len(token)}"
            ) from None
        if value <= 0:
            raise PgmError(f"{name} must be positive, got {value} at byte {pos - len(token)}")
        values.append(value)
    cols, rows, maxval = values
    if maxval > 65535:
        raise PgmError(f"maxval {maxval} out of range (> 65535) in header ending at byte {pos}")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise PgmError(f"missing whitespace before samples at byte {pos}")
    pos += 1
    sample_bytes = 2 if maxval > 255 else 1
    need = rows * cols * sample_bytes
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise PgmError(
            f"truncated payload at byte {pos + len(payload)}: "
            f"expected {need} sample bytes, got {len(payload)}"
        )
    dtype = ">u2" if sample_bytes == 2 else "u1"
    pixels = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    return pixels.reshape(rows, cols)


def write_pgm(img, maxval: int = 255) -> bytes:
    """Serialize an image as binary PGM, clamping then rounding to [0, maxval]."""
    if maxval not in (255, 65535):
        raise ValueError(f"maxval must be 255 or 65535, got {maxval}")
    arr = as_image(img)
    quantized = np.rint(np.clip(arr, 0.0, float(maxval)))
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    dtype = "u1" if maxval == 255 else ">u2"
    return header + quantized.astype(dtype).tobytes()


def read_f64(data: bytes) -> np.ndarray:
    """Parse the raw float64 exchange format (``F64`` magic)."""
    if data[:4] != b"F64\n":
        raise PgmError(f"expected magic 'F64\\n' at byte 0, got {data[:4]!r}")
    end = data.find(b"\n", 4)
    if end < 0:
        raise PgmError(f"unterminated F64 dimension line at byte {len(data)}")
    parts = data[4:end].split()
    if len(parts) != 2:
        raise PgmError(f"expected '<rows> <cols>' at byte 4, got {data[4:end]!r}")
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise PgmError(f"invalid F64 dimensions {data[4:end]!r} at byte 4") from None
    if rows <= 0 or cols <= 0:
        raise PgmError(f"F64 dimensions must be positive, got {rows}x{cols} at byte 4")
    need = rows * cols * 8
    payload = data[end + 1 : end + 1 + need]
    if len(payload) < need:
        raise PgmError(
            f"truncated F64 payload at byte {end + 1 + len(payload)}: "
            f"expected {need} bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(np.float64)


def write_f64(img) -> bytes:
    """Serialize an image losslessly as row-major little-endian doubles."""
    arr = as_image(img)
    header = f"F64\n{arr.shape[0]} {arr.shape[1]}\n".encode("ascii")
    return header + arr.astype("<f8").tobytes()


def log_domain(img, bias: float = 1.0) -> np.ndarray:
    """Elementwise ``ln(pixel + bias)``; requires non-negative pixels."""
    arr = as_image(img)
    bias = _check_bias(bias)
    if np.any(arr < 0.0):
        raise ValueError("log_domain requires non-negative pixels")
    return np.log(arr + bias)


def exp_domain(img, bias: float = 1.0) -> np.ndarray:
    """Elementwise ``exp(pixel) - bias``, the inverse of :func:`log_domain`."""
    arr = as_image(img)
    bias = _check_bias(bias)
    with np.errstate(over="ignore"):
        out = np.exp(arr) - bias
    if not np.all(np.isfinite(out)):
        raise OverflowError("exp_domain overflowed to non-finite values")
    return out


def subtract(a, b) -> np.ndarray:
    """Elementwise difference ``a - b`` of two equally sized images."""
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a - b
