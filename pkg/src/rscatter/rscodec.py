"""Systematic Reed-Solomon encoder and errors-and-erasures decoder.

Codes are narrow-sense (parity-check roots alpha^1..alpha^(n-k)) over
GF(2^m) with n = 2^m - 1, m in 3..7, and odd k so that n - k is even and
t = (n - k) / 2 exactly.  Encoding is by generator-polynomial remainder;
decoding is Berlekamp-Massey on Forney syndromes with erasure handling.
A decode failure is reported as None, never guessed.
"""

from functools import lru_cache

from .errors import ParameterError
from .gf2m import FieldContext, PRIMITIVE_POLYS

ADMISSIBLE_N = tuple((1 << m) - 1 for m in sorted(PRIMITIVE_POLYS))


@lru_cache(maxsize=None)
def _shared_field(m):
    return FieldContext(m)


class RsCode:
    """An (n, k) Reed-Solomon code with derived correction capability t."""

    def __init__(self, n, k):
        if n not in ADMISSIBLE_N:
            raise ParameterError(f"n must be one of {ADMISSIBLE_N}, got {n}")
        if not (1 <= k <= n - 2):
            raise ParameterError(f"k must satisfy 1 <= k <= n-2, got k={k}")
        if k % 2 == 0:
            raise ParameterError(f"k must be odd so that n-k is even, got k={k}")
        self.n = n
        self.k = k
        self.m = n.bit_length()
        self.t = (n - k) // 2
        self.field = _shared_field(self.m)
        self._generator = self._build_generator()

    def _build_generator(self):
        """g(x) = prod_{i=1}^{n-k} (x - alpha^i), descending coefficients."""
        gf = self.field
        g = [1]
        for i in range(1, self.n - self.k + 1):
            root = gf.exp(i)
            nxt = [0] * (len(g) + 1)
            for j, c in enumerate(g):
                nxt[j] ^= c
                nxt[j + 1] ^= gf.mul(c, root)
            g = nxt
        return g

    @property
    def rate(self):
        return self.k / self.n

    def __repr__(self):
        return f"RsCode(n={self.n}, k={self.k})"

    def __eq__(self, other):
        return isinstance(other, RsCode) and (self.n, self.k) == (other.n, other.k)

    def __hash__(self):
        return hash((self.n, self.k))

    # position i in a codeword holds the coefficient of x^(n-1-i), so its
    # locator is alpha^(n-1-i)
    def _locator(self, position):
        return self.field.exp(self.n - 1 - position)


def encode(code, info):
    """Systematic encode: codeword = info || remainder(x^(n-k) u(x), g(x))."""
    info = list(info)
    if len(info) != code.k:
        raise ParameterError(f"info must have exactly {code.k} symbols, got {len(info)}")
    gf = code.field
    for s in info:
        if not (0 <= s < code.n + 1):
            raise ParameterError(f"symbol {s} out of range for GF(2^{code.m})")
    gen = code._generator
    rem = info + [0] * (code.n - code.k)
    for i in range(code.k):
        coef = rem[i]
        if coef != 0:
            # gen[0] == 1, synthetic division step
            for j in range(1, len(gen)):
                rem[i + j] ^= gf.mul(gen[j], coef)
    return info + rem[code.k:]


def encode_batch(code, info):
    """Systematic encode of many words at once.

    `info` is an integer array of shape (blocks, k); the result has shape
    (blocks, n).  Bit-identical to calling encode row by row, but the
    synthetic division runs across the whole batch per step.
    """
    import numpy as np

    info = np.asarray(info, dtype=np.int64)
    if info.ndim != 2 or info.shape[1] != code.k:
        raise ParameterError(f"info must have shape (blocks, {code.k})")
    if info.size and (info.min() < 0 or info.max() > code.n):
        raise ParameterError(f"symbol out of range for GF(2^{code.m})")
    gf = code.field
    log = np.asarray(gf.log_table, dtype=np.int64)
    expt = np.asarray(gf.exp_table, dtype=np.int64)
    gen_log = [(j, gf.log(g)) for j, g in enumerate(code._generator[1:]) if g]
    rem = np.zeros((info.shape[0], code.n - code.k), dtype=np.int64)
    for s in range(code.k):
        feedback = info[:, s] ^ rem[:, 0]
        rem = np.roll(rem, -1, axis=1)
        rem[:, -1] = 0
        nz = np.flatnonzero(feedback)
        if nz.size == 0:
            continue
        lfb = log[feedback[nz]]
        for j, lg in gen_log:
            rem[nz, j] ^= expt[lfb + lg]
    return np.concatenate([info, rem], axis=1)


def _syndromes(code, received):
    gf = code.field
    out = []
    for i in range(1, code.n - code.k + 1):
        root = gf.exp(i)
        acc = 0
        for sym in received:
            acc = gf.mul(acc, root) ^ sym
        out.append(acc)
    return out


def _berlekamp_massey(gf, seq):
    """Minimal LFSR (ascending coefficients, lam[0] = 1) for seq."""
    lam = [1]
    prev = [1]
    length = 0
    shift = 1
    prev_disc = 1
    for r, s in enumerate(seq):
        disc = s
        for i in range(1, length + 1):
            if i < len(lam):
                disc ^= gf.mul(lam[i], seq[r - i])
        if disc == 0:
            shift += 1
            continue
        scale = gf.div(disc, prev_disc)
        update = [0] * shift + [gf.mul(scale, c) for c in prev]
        merged = [0] * max(len(lam), len(update))
        for i, c in enumerate(lam):
            merged[i] ^= c
        for i, c in enumerate(update):
            merged[i] ^= c
        if 2 * length <= r:
            prev = lam
            prev_disc = disc
            length = r + 1 - length
            shift = 1
        else:
            shift += 1
        lam = merged
    while len(lam) > 1 and lam[-1] == 0:
        lam.pop()
    return lam, length


def _poly_mul_asc(gf, a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] ^= gf.mul(ca, cb)
    return out


def _poly_eval_asc(gf, poly, x):
    acc = 0
    for c in reversed(poly):
        acc = gf.mul(acc, x) ^ c
    return acc


def decode(code, received, erasures=()):
    """Decode an n-symbol word; returns the k info symbols or None on failure.

    Corrects any pattern with 2e + f <= n - k, where f = |erasures| and e is
    the number of symbol errors at unknown positions.  Beyond that the call
    either returns None or (undetectably) a wrong codeword; the caller is
    expected to CRC-check.
    """
    received = list(received)
    if len(received) != code.n:
        raise ParameterError(f"received must have {code.n} symbols, got {len(received)}")
    erasures = sorted(set(int(p) for p in erasures))
    if erasures and (erasures[0] < 0 or erasures[-1] >= code.n):
        raise ParameterError("erasure position out of range")
    gf = code.field
    d = code.n - code.k
    f = len(erasures)
    if f > d:
        return None

    synd = _syndromes(code, received)
    if not any(synd):
        return received[:code.k]

    # erasure locator Gamma(x) = prod (1 + X_i x), ascending coefficients
    gamma = [1]
    for pos in erasures:
        gamma = _poly_mul_asc(gf, gamma, [1, code._locator(pos)])

    # Forney syndromes: remove the erasure contribution; the first d - f
    # entries then obey the errors-only locator.
    fsynd = list(synd)
    for pos in erasures:
        x = code._locator(pos)
        for j in range(d - 1):
            fsynd[j] = gf.mul(fsynd[j], x) ^ fsynd[j + 1]
    err_seq = fsynd[: d - f]

    lam, _ = _berlekamp_massey(gf, err_seq)
    e = len(lam) - 1
    if 2 * e > d - f:
        return None

    psi = _poly_mul_asc(gf, lam, gamma)  # joint errata locator

    # Chien search over all positions
    roots = [
        i for i in range(code.n)
        if _poly_eval_asc(gf, psi, gf.inv(code._locator(i))) == 0
    ]
    if len(roots) != len(psi) - 1:
        return None

    # Forney magnitudes: Omega = S(x) * Psi(x) mod x^d
    omega = _poly_mul_asc(gf, synd, psi)[:d]
    corrected = list(received)
    for i in roots:
        x_inv = gf.inv(code._locator(i))
        num = _poly_eval_asc(gf, omega, x_inv)
        den = 0
        for j in range(1, len(psi), 2):  # formal derivative, odd terms only
            den ^= gf.mul(psi[j], gf.pow(x_inv, j - 1))
        if den == 0:
            return None
        corrected[i] ^= gf.div(num, den)

    if any(_syndromes(code, corrected)):
        return None
    return corrected[:code.k]
