"""MSB-first bit streams and the primitive integer codes built on them.

Bits are packed eight to a byte, most significant bit first; the tail of the
last byte is zero padding.  Bulk operations run through small numba kernels
so that encoding a million-symbol grammar text stays cheap.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import CorruptStreamError

MAX_WIDTH = 63


def bit_width(v: int) -> int:
    """Number of bits in the binary form of ``v``; 1 for ``v == 0``."""
    if v < 0:
        raise ValueError(f"bit_width of negative value {v}")
    return max(1, int(v).bit_length())


@njit(cache=True)
def _bw(v):
    w = 1
    v >>= 1
    while v:
        w += 1
        v >>= 1
    return w


@njit(cache=True)
def bit_width_array(values):
    out = np.empty(values.shape[0], dtype=np.int64)
    for i in range(values.shape[0]):
        out[i] = _bw(values[i])
    return out


@njit(cache=True)
def _put(buf, pos, value, width):
    for k in range(width - 1, -1, -1):
        if (value >> k) & 1:
            buf[pos >> 3] |= np.uint8(0x80 >> (pos & 7))
        pos += 1
    return pos


@njit(cache=True)
def _put_array(buf, pos, values, widths):
    for i in range(values.shape[0]):
        pos = _put(buf, pos, values[i], widths[i])
    return pos


@njit(cache=True)
def _put_fixed(buf, pos, values, width):
    for i in range(values.shape[0]):
        pos = _put(buf, pos, values[i], width)
    return pos


@njit(cache=True)
def _gamma_bits(values):
    total = 0
    for i in range(values.shape[0]):
        if values[i] < 1:
            return -1
        total += 2 * _bw(values[i]) - 1
    return total


@njit(cache=True)
def _put_gamma(buf, pos, values):
    for i in range(values.shape[0]):
        w = _bw(values[i])
        pos = _put(buf, pos + w - 1, values[i], w)
    return pos


@njit(cache=True)
def _copy_bits(dst, dpos, src, count):
    """OR ``count`` bits from the start of ``src`` into ``dst`` at ``dpos``.

    Bits of ``src`` past ``count`` must be zero, which holds for BitWriter buffers.
    """
    shift = dpos & 7
    q = dpos >> 3
    for i in range((count + 7) >> 3):
        b = src[i]
        dst[q + i] |= b >> shift
        if shift and q + i + 1 < dst.shape[0]:
            dst[q + i + 1] |= np.uint8((b << (8 - shift)) & 0xFF)
    return dpos + count


@njit(cache=True)
def _get(buf, pos, width):
    v = 0
    for k in range(width):
        p = pos + k
        v = (v << 1) | ((buf[p >> 3] >> (7 - (p & 7))) & 1)
    return v


@njit(cache=True)
def _get_array(buf, pos, nbits, widths, out):
    for i in range(widths.shape[0]):
        w = widths[i]
        if pos + w > nbits:
            return -1
        out[i] = _get(buf, pos, w)
        pos += w
    return pos


@njit(cache=True)
def _get_fixed(buf, pos, nbits, width, out):
    if pos + width * out.shape[0] > nbits:
        return -1
    for i in range(out.shape[0]):
        out[i] = _get(buf, pos, width)
        pos += width
    return pos


@njit(cache=True)
def _get_gamma(buf, pos, nbits, out):
    for i in range(out.shape[0]):
        zeros = 0
        while True:
            if pos >= nbits:
                return -1
            if (buf[pos >> 3] >> (7 - (pos & 7))) & 1:
                break
            zeros += 1
            pos += 1
            if zeros > MAX_WIDTH - 1:
                return -2
        if pos + zeros + 1 > nbits:
            return -1
        out[i] = _get(buf, pos, zeros + 1)
        pos += zeros + 1
    return pos


def _as_int64(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype != np.int64:
        arr = arr.astype(np.int64)
    return np.ascontiguousarray(arr).reshape(-1)


class BitWriter:
    """Append-only bit buffer."""

    def __init__(self, capacity_bits: int = 1024):
        self._buf = np.zeros(max(16, (capacity_bits + 7) >> 3), dtype=np.uint8)
        self._n = 0

    def __len__(self) -> int:
        return self._n

    def _reserve(self, extra: int) -> None:
        need = (self._n + extra + 7) >> 3
        if need > self._buf.shape[0]:
            grown = np.zeros(max(need, 2 * self._buf.shape[0]), dtype=np.uint8)
            grown[: self._buf.shape[0]] = self._buf
            self._buf = grown

    def write_bit(self, bit) -> None:
        self._reserve(1)
        if bit:
            self._buf[self._n >> 3] |= 0x80 >> (self._n & 7)
        self._n += 1

    def write_bits(self, value: int, width: int) -> None:
        if width < 0 or width > MAX_WIDTH:
            raise ValueError(f"unsupported field width {width}")
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._reserve(width)
        self._n = _put(self._buf, self._n, value, width)

    def write_gamma(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"gamma code needs n >= 1, got {n}")
        w = int(n).bit_length()
        self._reserve(2 * w - 1)
        self._n = _put(self._buf, self._n + w - 1, n, w)

    def write_fixed_array(self, values, width: int) -> None:
        arr = _as_int64(values)
        if arr.size == 0:
            return
        if width < 1 or width > MAX_WIDTH:
            raise ValueError(f"unsupported field width {width}")
        if arr.min() < 0 or int(arr.max()) >> width:
            raise ValueError(f"value does not fit in {width} bits")
        self._reserve(width * arr.size)
        self._n = _put_fixed(self._buf, self._n, arr, width)

    def write_varwidth_array(self, values, widths) -> None:
        arr = _as_int64(values)
        ws = _as_int64(widths)
        if arr.shape != ws.shape:
            raise ValueError("values and widths differ in length")
        if arr.size == 0:
            return
        if arr.min() < 0 or ws.min() < 0 or ws.max() > MAX_WIDTH or np.any(arr >> ws):
            raise ValueError("value does not fit its field width")
        self._reserve(int(ws.sum()))
        self._n = _put_array(self._buf, self._n, arr, ws)

    def write_gamma_array(self, values) -> None:
        arr = _as_int64(values)
        total = _gamma_bits(arr)
        if total < 0:
            raise ValueError("gamma code needs values >= 1")
        self._reserve(total)
        self._n = _put_gamma(self._buf, self._n, arr)

    def write_bitarray(self, bits) -> None:
        arr = _as_int64(bits)
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise ValueError("bit array must hold 0/1 values")
        self._reserve(arr.size)
        self._n = _put_fixed(self._buf, self._n, arr, 1)

    def extend(self, other: "BitWriter") -> None:
        self._reserve(other._n)
        self._n = _copy_bits(self._buf, self._n, other._buf, other._n)

    def to_bytes(self) -> bytes:
        return self._buf[: (self._n + 7) >> 3].tobytes()

    def to_bitstring(self) -> str:
        bits = np.unpackbits(self._buf[: (self._n + 7) >> 3])[: self._n]
        return "".join("1" if b else "0" for b in bits)


class BitReader:
    """Sequential reader over a packed bit buffer."""

    def __init__(self, data, nbits: int | None = None, pos: int = 0):
        if isinstance(data, np.ndarray):
            buf = np.ascontiguousarray(data, dtype=np.uint8)
        else:
            buf = np.frombuffer(bytes(data), dtype=np.uint8)
        self._buf = buf
        self._nbits = buf.shape[0] * 8 if nbits is None else nbits
        if self._nbits > buf.shape[0] * 8:
            raise ValueError("nbits exceeds buffer")
        self.pos = pos

    @classmethod
    def from_bitstring(cls, bits: str) -> "BitReader":
        bits = bits.replace(" ", "")
        w = BitWriter(len(bits))
        w.write_bitarray([1 if c == "1" else 0 for c in bits])
        return cls(w.to_bytes(), nbits=len(bits))

    @property
    def remaining(self) -> int:
        return self._nbits - self.pos

    def _need(self, count: int, what: str) -> None:
        if count > self._nbits - self.pos:
            raise CorruptStreamError(f"stream exhausted reading {what}", self.pos)

    def read_bit(self) -> int:
        self._need(1, "bit")
        p = self.pos
        self.pos += 1
        return (int(self._buf[p >> 3]) >> (7 - (p & 7))) & 1

    def read_bits(self, width: int) -> int:
        self._need(width, f"{width}-bit field")
        v = int(_get(self._buf, self.pos, width))
        self.pos += width
        return v

    def read_gamma(self) -> int:
        out = np.empty(1, dtype=np.int64)
        self._gamma_into(out)
        return int(out[0])

    def _gamma_into(self, out: np.ndarray) -> None:
        pos = _get_gamma(self._buf, self.pos, self._nbits, out)
        if pos == -1:
            raise CorruptStreamError("stream exhausted inside gamma code", self.pos)
        if pos == -2:
            raise CorruptStreamError("gamma code longer than 63 bits", self.pos)
        self.pos = int(pos)

    def read_gamma_array(self, count: int) -> np.ndarray:
        self._need(count, f"{count} gamma codes")
        out = np.empty(count, dtype=np.int64)
        self._gamma_into(out)
        return out

    def read_fixed_array(self, count: int, width: int) -> np.ndarray:
        self._need(count * width, f"{count} x {width}-bit fields")
        out = np.empty(count, dtype=np.int64)
        pos = _get_fixed(self._buf, self.pos, self._nbits, width, out)
        if pos < 0:
            raise CorruptStreamError(f"stream exhausted reading {count} x {width}-bit fields", self.pos)
        self.pos = int(pos)
        return out

    def read_varwidth_array(self, widths) -> np.ndarray:
        ws = _as_int64(widths)
        self._need(int(ws.sum()), "packed fields")
        out = np.empty(ws.shape[0], dtype=np.int64)
        pos = _get_array(self._buf, self.pos, self._nbits, ws, out)
        if pos < 0:
            raise CorruptStreamError("stream exhausted reading packed fields", self.pos)
        self.pos = int(pos)
        return out

    def read_bitarray(self, count: int) -> np.ndarray:
        return self.read_fixed_array(count, 1)


def gamma_encode(n: int, s: BitWriter) -> None:
    s.write_gamma(n)


def gamma_decode(s: BitReader) -> int:
    return s.read_gamma()


def fixed_width_encode(values, width: int) -> BitWriter:
    w = BitWriter()
    w.write_fixed_array(values, width)
    return w


def fixed_width_decode(s: BitReader, count: int, width: int) -> list[int]:
    return s.read_fixed_array(count, width).tolist()


def rle_split(t) -> tuple[np.ndarray, np.ndarray]:
    """Maximal-run decomposition of ``t`` into symbols and run lengths."""
    arr = _as_int64(t)
    if arr.size == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    starts = np.concatenate(([0], np.flatnonzero(arr[1:] != arr[:-1]) + 1))
    lengths = np.diff(np.concatenate((starts, [arr.size])))
    return arr[starts], lengths.astype(np.int64)


def rle_expand(symbols, lengths) -> np.ndarray:
    return np.repeat(_as_int64(symbols), _as_int64(lengths))
