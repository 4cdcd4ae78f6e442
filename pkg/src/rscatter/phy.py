"""Tag-side frame construction and receiver-side detection.

Framing (length byte, 3..108 byte payload, CRC-16), bit/symbol packing,
unipolar NRZ/OOK sample generation behind a fixed 36-bit preamble, sample
gating plus additive noise, and blind demodulation: matched filter,
preamble cross-correlation timing, adaptive power threshold, and erasure
flagging of long zero-power runs.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FrameCrcError, ParameterError

PREAMBLE_BITS = np.array(
    [int(c) for c in "101010101010101010101010110100100011"], dtype=np.uint8
)
PREAMBLE_LEN = PREAMBLE_BITS.size  # 36

MIN_PAYLOAD = 3
MAX_PAYLOAD = 108
DEFAULT_SAMPLES_PER_BIT = 8
# OOK cannot tell a transmitted 0 from the off state; a below-floor run is
# flagged erased only when longer than this many bit-times.
DEFAULT_ERASE_MARGIN_BITS = 16
DEFAULT_FLOOR_FRACTION = 0.5
DEFAULT_CORR_THRESHOLD = 0.5


def crc16(data):
    """CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection/xor."""
    crc = 0xFFFF
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ 0x1021) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def frame_build(payload):
    """length || payload || crc16, with the CRC over length and payload."""
    payload = bytes(payload)
    if not (MIN_PAYLOAD <= len(payload) <= MAX_PAYLOAD):
        raise ParameterError(
            f"payload must be {MIN_PAYLOAD}..{MAX_PAYLOAD} bytes, got {len(payload)}"
        )
    body = bytes([len(payload)]) + payload
    return body + struct.pack(">H", crc16(body))


def frame_parse(buf):
    """Validate length and CRC of a frame buffer; returns the payload.

    Trailing bytes past the framed region (symbol padding) are ignored.
    """
    buf = bytes(buf)
    if len(buf) < 1:
        raise ParameterError("empty frame buffer")
    length = buf[0]
    if not (MIN_PAYLOAD <= length <= MAX_PAYLOAD) or len(buf) < length + 3:
        raise FrameCrcError("frame length field invalid or buffer truncated")
    body = buf[: length + 1]
    (crc,) = struct.unpack(">H", buf[length + 1 : length + 3])
    if crc16(body) != crc:
        raise FrameCrcError("CRC mismatch")
    return body[1:]


def bytes_to_bits(data):
    """MSB-first bit unpacking."""
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))


def bits_to_bytes(bits):
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8:
        raise ParameterError("bit count must be a multiple of 8")
    return np.packbits(bits).tobytes()


def _scrambler_base():
    """One period of the x^7 + x^6 + 1 m-sequence, rotated to start and end
    with a 1 so zero runs never span the tiling boundary."""
    state = 0x7F
    seq = []
    for _ in range(127):
        seq.append(state & 1)
        feedback = (state ^ (state >> 1)) & 1
        state = (state >> 1) | (feedback << 6)
    base = np.array(seq, dtype=np.uint8)
    ones = np.flatnonzero((base == 1) & (np.roll(base, 1) == 1))
    return np.roll(base, -int(ones[0]))


_SCRAMBLER = _scrambler_base()


def scrambler_sequence(n):
    """The fixed scrambler PN sequence, tiled to n bits."""
    reps = -(-n // _SCRAMBLER.size)
    return np.tile(_SCRAMBLER, reps)[:n]


def scramble(bits):
    """XOR with the fixed PN sequence (self-inverse).

    Whitening keeps every transmitted bit stream free of long zero runs --
    an unscrambled low-weight word would be indistinguishable from a
    carrier outage -- and bounds legal zero runs so erasure flagging has a
    sound margin.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    return bits ^ scrambler_sequence(bits.size)


def bits_to_symbols(bits, m):
    """Big-endian grouping of m bits per symbol; final group zero-padded."""
    if not (3 <= m <= 7):
        raise ParameterError(f"m must be in 3..7, got {m}")
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % m
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    groups = bits.reshape(-1, m)
    weights = 1 << np.arange(m - 1, -1, -1)
    return groups @ weights


def symbols_to_bits(symbols, m):
    """Inverse of bits_to_symbols (padding bits are kept; the frame length
    field is what lets a parser strip them)."""
    if not (3 <= m <= 7):
        raise ParameterError(f"m must be in 3..7, got {m}")
    symbols = np.asarray(symbols, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1)
    return ((symbols[:, None] >> shifts) & 1).astype(np.uint8).ravel()


@dataclass
class SampleStream:
    """Baseband I/Q sample sequences at a known sample rate."""

    i_samples: np.ndarray
    q_samples: np.ndarray
    sample_rate: float
    samples_per_bit: int

    def __post_init__(self):
        self.i_samples = np.asarray(self.i_samples, dtype=float)
        self.q_samples = np.asarray(self.q_samples, dtype=float)
        if self.i_samples.size != self.q_samples.size:
            raise ParameterError("I and Q sample counts differ")
        if self.samples_per_bit < 4:
            raise ParameterError(
                f"samples_per_bit must be >= 4, got {self.samples_per_bit}"
            )

    def __len__(self):
        return self.i_samples.size


def modulate(bits, samples_per_bit=DEFAULT_SAMPLES_PER_BIT, bit_rate=1e6):
    """OOK/NRZ sample generation: preamble || bits, one amplitude level held
    for samples_per_bit samples per bit (1 -> unit amplitude, 0 -> zero).

    Carrier and frequency shifting are abstracted away; the stream is the
    ideal clean-band baseband envelope.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    levels = np.concatenate([PREAMBLE_BITS, scramble(bits)]).astype(float)
    i = np.repeat(levels, samples_per_bit)
    return SampleStream(
        i_samples=i,
        q_samples=np.zeros_like(i),
        sample_rate=bit_rate * samples_per_bit,
        samples_per_bit=samples_per_bit,
    )


def apply_channel(stream, gate_durations_us, noise_sigma, rng, amplitude=1.0):
    """Gate the stream by the on/off durations and add Gaussian I/Q noise.

    Samples whose instants fall inside off runs are scaled to zero; the
    gate starts in the on state at the first sample.
    """
    n = len(stream)
    durations = np.asarray(gate_durations_us, dtype=float)
    total = float(durations.sum()) if durations.size else 0.0
    t_us = np.arange(n) / stream.sample_rate * 1e6
    if n and t_us[-1] >= total:
        raise ParameterError(
            f"gate ({total:.1f} us) shorter than stream ({t_us[-1]:.1f} us)"
        )
    bounds = np.cumsum(durations)
    run_idx = np.searchsorted(bounds, t_us, side="right")
    keep = (run_idx % 2 == 0).astype(float)
    i = stream.i_samples * keep * amplitude
    q = stream.q_samples * keep * amplitude
    if noise_sigma > 0:
        i = i + rng.normal(0.0, noise_sigma, n)
        q = q + rng.normal(0.0, noise_sigma, n)
    return SampleStream(
        i_samples=i,
        q_samples=q,
        sample_rate=stream.sample_rate,
        samples_per_bit=stream.samples_per_bit,
    )


def _bit_statistics(power, start, count, spb):
    """Mean power over each bit window (rectangular matched filter output
    sampled once per bit)."""
    seg = power[start : start + count * spb]
    return seg.reshape(count, spb).mean(axis=1)


def _normalized_corr(signal, template):
    """Normalized cross-correlation (correlation coefficient per offset)."""
    n = template.size
    if signal.size < n:
        return np.empty(0)
    tpl = template - template.mean()
    tpl_norm = np.sqrt(np.sum(tpl**2))
    num = np.correlate(signal, tpl, mode="valid")
    csum = np.concatenate([[0.0], np.cumsum(signal)])
    csum2 = np.concatenate([[0.0], np.cumsum(signal**2)])
    win_sum = csum[n:] - csum[:-n]
    win_sq = csum2[n:] - csum2[:-n]
    var = np.maximum(win_sq - win_sum**2 / n, 0.0)
    denom = np.sqrt(var) * tpl_norm
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(denom > 0, num / np.maximum(denom, 1e-300), 0.0)
    return out


def flag_erasure_runs(below_floor, margin_bits=DEFAULT_ERASE_MARGIN_BITS):
    """Flag maximal runs of below-floor bits longer than margin_bits.

    This is the receiver's only way to separate off-state losses from legal
    zero runs under OOK; runs at or under the margin are left unflagged.
    """
    below = np.asarray(below_floor, dtype=bool)
    flags = np.zeros(below.size, dtype=bool)
    if below.size == 0:
        return flags
    padded = np.concatenate([[False], below, [False]]).astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    for s, e in zip(starts, ends):
        if e - s > margin_bits:
            flags[s:e] = True
    return flags


def perceived_erasures(bits, lost, margin_bits=DEFAULT_ERASE_MARGIN_BITS):
    """Erasure flags a blind noise-free receiver would produce for known
    transmitted bits and known lost-bit positions.

    A bit reads as zero power iff it was lost or its scrambled line bit is
    0, so the perceived erasures are exactly the over-margin runs of that
    predicate.  Used by the symbol-level simulator to stay bit-exact with
    the sample-level demodulator at zero noise.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    lost = np.asarray(lost, dtype=bool)
    if bits.size != lost.size:
        raise ParameterError("bits and lost masks differ in length")
    return flag_erasure_runs(lost | (scramble(bits) == 0), margin_bits)


@dataclass
class DemodResult:
    bits: np.ndarray
    erasures: np.ndarray
    preamble_end: int
    power_threshold: float


def demodulate(
    stream,
    samples_per_bit=None,
    corr_threshold=DEFAULT_CORR_THRESHOLD,
    floor_fraction=DEFAULT_FLOOR_FRACTION,
    erase_margin_bits=DEFAULT_ERASE_MARGIN_BITS,
):
    """Blind demodulation of one frame; returns None when no preamble is found.

    Per-sample power sqrt(I^2+Q^2) is matched-filtered by a one-bit moving
    average; the preamble end is located by the normalized cross-correlation
    peak; the decision threshold is the average of the minimum '1' and
    maximum '0' statistics over the preamble; bits are sliced at one
    statistic per bit from the preamble-derived timing and descrambled.
    Below-floor runs longer than erase_margin_bits bit-times are flagged
    erased.

    All thresholds are relative, so scaling the stream amplitude by any
    positive constant leaves every decision unchanged.
    """
    spb = samples_per_bit or stream.samples_per_bit
    power = np.hypot(stream.i_samples, stream.q_samples)
    tpl = np.repeat(PREAMBLE_BITS.astype(float), spb)
    if power.size < tpl.size + spb:
        return None
    corr = _normalized_corr(power, tpl)
    if corr.size == 0:
        return None
    start = int(np.argmax(corr))
    if corr[start] < corr_threshold:
        return None
    pre_stats = _bit_statistics(power, start, PREAMBLE_LEN, spb)
    ones = pre_stats[PREAMBLE_BITS == 1]
    zeros = pre_stats[PREAMBLE_BITS == 0]
    threshold = (ones.min() + zeros.max()) / 2.0
    if threshold <= 0:
        return None
    end = start + PREAMBLE_LEN * spb
    n_bits = (power.size - end) // spb
    stats = _bit_statistics(power, end, n_bits, spb)
    bits = scramble((stats >= threshold).astype(np.uint8))
    below_floor = stats < floor_fraction * threshold
    erasures = flag_erasure_runs(below_floor, erase_margin_bits)
    return DemodResult(
        bits=bits, erasures=erasures, preamble_end=end, power_threshold=threshold
    )


def autodetect(stream, window, lag_bits=2, threshold=0.6, min_gap_bits=8):
    """Candidate frame offsets from windowed autocorrelation of the
    alternating preamble prefix (period two bit-times).

    Returns the start of each maximal run of offsets whose lag-2-bit
    autocorrelation coefficient exceeds the threshold; runs closer than
    min_gap_bits bit-times are merged.
    """
    spb = stream.samples_per_bit
    if window < spb:
        raise ParameterError(f"window must be >= samples_per_bit, got {window}")
    power = np.hypot(stream.i_samples, stream.q_samples)
    lag = lag_bits * spb
    n = power.size - lag - window + 1
    if n <= 0:
        return []
    csum = np.concatenate([[0.0], np.cumsum(power)])
    csum2 = np.concatenate([[0.0], np.cumsum(power**2)])
    cross = np.concatenate([[0.0], np.cumsum(power[:-lag] * power[lag:])])

    def wsum(c, i, w):
        return c[i + w] - c[i]

    idx = np.arange(n)
    sa = wsum(csum, idx, window)
    sb = wsum(csum, idx + lag, window)
    qa = wsum(csum2, idx, window)
    qb = wsum(csum2, idx + lag, window)
    sab = cross[idx + window] - cross[idx]
    cov = sab - sa * sb / window
    var_a = np.maximum(qa - sa**2 / window, 0.0)
    var_b = np.maximum(qb - sb**2 / window, 0.0)
    denom = np.sqrt(var_a * var_b)
    with np.errstate(invalid="ignore", divide="ignore"):
        coef = np.where(denom > 0, cov / np.maximum(denom, 1e-300), 0.0)
    above = coef > threshold
    if not above.any():
        return []
    padded = np.concatenate([[False], above, [False]]).astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    merged = [[int(starts[0]), int(ends[0])]]
    for s, e in zip(starts[1:], ends[1:]):
        if s - merged[-1][1] < min_gap_bits * spb:
            merged[-1][1] = int(e)
        else:
            merged.append([int(s), int(e)])
    return [s for s, _ in merged]


def write_samples(stream, path):
    """Binary little-endian float32 interleaved I/Q plus a sidecar header."""
    inter = np.empty(2 * len(stream), dtype="<f4")
    inter[0::2] = stream.i_samples
    inter[1::2] = stream.q_samples
    inter.tofile(path)
    with open(str(path) + ".hdr", "w") as fh:
        fh.write(f"sample_rate={stream.sample_rate!r}\n")
        fh.write(f"samples_per_bit={stream.samples_per_bit}\n")


def read_samples(path):
    inter = np.fromfile(path, dtype="<f4").astype(float)
    header = {}
    with open(str(path) + ".hdr") as fh:
        for line in fh:
            key, _, value = line.strip().partition("=")
            header[key] = value
    return SampleStream(
        i_samples=inter[0::2],
        q_samples=inter[1::2],
        sample_rate=float(header["sample_rate"]),
        samples_per_bit=int(header["samples_per_bit"]),
    )
