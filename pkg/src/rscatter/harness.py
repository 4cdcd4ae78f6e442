"""Monte Carlo link experiments: baseline vs RS-coded backscatter.

Two modes share one timeline model: a frame is the 36-bit preamble
followed by the payload bits (baseline) or the RS codeword bits (coded),
transmitted at m bits per channel symbol and R symbols/second over a
Pareto on/off gate that starts in the on state at the first preamble bit.

The gate is applied at bit resolution: a bit whose window overlaps an off
run counts as lost (a partially-lost symbol is a lost symbol).  Whether
the receiver can treat lost bits as erasures follows the blind-receiver
rule in phy.perceived_erasures, and a codeword is counted as delivered
only when its erased symbols stay within the advertised correction
capability t -- the same capability the code selection is based on.  At
zero noise the sample-level pipeline therefore reproduces the
symbol-level frame outcomes exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import channel, codesearch, phy, rscodec, traffic
from .errors import FrameCrcError, InfeasibleError, ParameterError


@dataclass
class ExperimentConfig:
    """One Monte Carlo experiment.

    The scenario is either explicit Pareto parameters for both states or a
    trace file to fit; `code` is an (n, k) pair or None for the optimizer.
    """

    off_shape: float = None
    off_scale_min: float = None
    on_shape: float = None
    on_scale_min: float = None
    trace: str = None
    rate: float = 1e6  # backscatter symbols/second
    code: tuple = None  # None -> optimize
    pe_threshold: float = codesearch.DEFAULT_PE_THRESHOLD
    frames: int = 1000
    payload_bytes: int = 64
    mode: str = "symbol"  # "symbol" or "sample"
    noise_sigma: float = 0.0
    seed: int = 0
    samples_per_bit: int = phy.DEFAULT_SAMPLES_PER_BIT
    erasure_margin_bits: int = phy.DEFAULT_ERASE_MARGIN_BITS

    def __post_init__(self):
        if self.frames < 1:
            raise ParameterError(f"frames must be >= 1, got {self.frames}")
        if not (phy.MIN_PAYLOAD <= self.payload_bytes <= phy.MAX_PAYLOAD):
            raise ParameterError(
                f"payload_bytes must be in {phy.MIN_PAYLOAD}..{phy.MAX_PAYLOAD}, "
                f"got {self.payload_bytes}"
            )
        if self.mode not in ("symbol", "sample"):
            raise ParameterError(f"mode must be 'symbol' or 'sample', got {self.mode!r}")

    def stats(self):
        if self.trace is not None:
            return traffic.fit_stats(traffic.load_trace(self.trace))
        for name in ("off_shape", "off_scale_min", "on_shape", "on_scale_min"):
            if getattr(self, name) is None:
                raise ParameterError(f"scenario field {name} missing (and no trace given)")
        return traffic.TrafficStats(
            off=traffic.ParetoParams(self.off_shape, self.off_scale_min),
            on=traffic.ParetoParams(self.on_shape, self.on_scale_min),
        )


@dataclass
class LinkReport:
    """BER/FER/throughput of one experiment, baseline and coded."""

    code_n: int
    code_k: int
    p_s: float
    predicted_pe: float
    frames: int
    ber: float
    fer: float
    throughput: float  # delivered payload bits/s, coded system
    ber_baseline: float
    fer_baseline: float
    throughput_baseline: float
    frame_log: list = field(default_factory=list)

    def to_dict(self):
        d = {k: v for k, v in self.__dict__.items() if k != "frame_log"}
        d["frame_log"] = self.frame_log
        return d


def _resolve_code(config, stats):
    if config.code is not None:
        n, k = config.code
        code = rscodec.RsCode(n, k)
        ch = channel.markov_from_stats(stats, config.rate)
        p_s = channel.symbol_error_rate(ch)
        return code, p_s, channel.post_decode_error_rate(code, p_s)
    outcome = codesearch.optimize_code(stats, config.rate, config.pe_threshold)
    ch = channel.markov_from_stats(stats, config.rate)
    p_s = channel.symbol_error_rate(ch)
    return outcome.code, p_s, outcome.predicted_pe


def _frame_plan(config, code):
    """Static per-frame geometry shared by both modes."""
    m = code.m
    frame_bits_n = (1 + config.payload_bytes + 2) * 8
    info_syms = math.ceil(frame_bits_n / m)
    n_codewords = math.ceil(info_syms / code.k)
    coded_bits_n = n_codewords * code.n * m
    bit_rate = config.rate * m  # bits/second
    bit_us = 1e6 / bit_rate
    return {
        "m": m,
        "frame_bits_n": frame_bits_n,
        "info_syms": info_syms,
        "n_codewords": n_codewords,
        "coded_bits_n": coded_bits_n,
        "bit_rate": bit_rate,
        "bit_us": bit_us,
        "coded_air_us": (phy.PREAMBLE_LEN + coded_bits_n) * bit_us,
        "baseline_air_us": (phy.PREAMBLE_LEN + frame_bits_n) * bit_us,
    }


def _pad_symbol(m):
    """Alternating-bit pad value (101010...): padding must never modulate as a
    long run of zeros, which an OOK receiver cannot tell from a carrier gap."""
    return sum(1 << i for i in range(m - 1, -1, -2))


def _encode_frame(code, plan, frame_bits):
    """Frame bits -> padded info symbols -> concatenated codeword symbols/bits."""
    syms = phy.bits_to_symbols(frame_bits, plan["m"])
    pad = plan["n_codewords"] * code.k - syms.size
    if pad:
        syms = np.concatenate(
            [syms, np.full(pad, _pad_symbol(plan["m"]), dtype=syms.dtype)]
        )
    cw_syms = []
    for j in range(plan["n_codewords"]):
        cw_syms.extend(rscodec.encode(code, syms[j * code.k : (j + 1) * code.k].tolist()))
    cw_syms = np.array(cw_syms)
    tx_bits = phy.symbols_to_bits(cw_syms, plan["m"])
    return syms, cw_syms, tx_bits


def _erased_symbol_counts(flags, code, plan):
    """Per-codeword count of symbols touched by flagged bits."""
    sym_touched = flags.reshape(-1, plan["m"]).any(axis=1)
    return sym_touched.reshape(plan["n_codewords"], code.n), sym_touched


def _lost_bit_mask(gate, plan, n_bits):
    mask = channel.erasure_mask_from_gate(gate, plan["bit_rate"], n_bits)
    return mask.erased


def _frame_payload(rng, config):
    return rng.integers(0, 256, size=config.payload_bytes, dtype=np.uint8).tobytes()


def _coded_bit_mismatches(frame_bits, flags_or_lost, cw_fail, code, plan, pn):
    """Errored information bits of failed codewords: a flagged bit reads as
    zero power and descrambles to the PN bit, so a mismatch happens exactly
    where the true bit differs from the PN sequence."""
    mism = 0
    m = code.m
    for j in np.flatnonzero(cw_fail):
        for s in range(code.k):
            sym_index = j * code.k + s
            frame_lo = sym_index * m
            if frame_lo >= frame_bits.size:
                break
            tx_lo = (j * code.n + s) * m
            width = min(m, frame_bits.size - frame_lo)
            fb = frame_bits[frame_lo : frame_lo + width]
            fl = flags_or_lost[tx_lo : tx_lo + width]
            mism += int(np.sum(fb[fl] != pn[tx_lo : tx_lo + width][fl]))
    return mism


def run_symbol_level(config):
    """Erasure-mask Monte Carlo: no waveforms, shared timeline with sample mode."""
    stats = config.stats()
    code, p_s, predicted_pe = _resolve_code(config, stats)
    plan = _frame_plan(config, code)
    rng = np.random.default_rng(config.seed)

    fe_coded = fe_base = 0
    bit_err_coded = bit_err_base = 0
    frame_log = []
    horizon = max(plan["coded_air_us"], plan["baseline_air_us"]) + 2 * plan["bit_us"]
    total_bits = max(plan["coded_bits_n"], plan["frame_bits_n"]) + phy.PREAMBLE_LEN

    for fi in range(config.frames):
        payload = _frame_payload(rng, config)
        frame_bits = phy.bytes_to_bits(phy.frame_build(payload))
        _, _, tx_bits = _encode_frame(code, plan, frame_bits)
        gate = channel.gate_durations(rng, stats, horizon)
        lost_all = _lost_bit_mask(gate, plan, total_bits)

        preamble_lost = bool(lost_all[: phy.PREAMBLE_LEN].any())

        # baseline: uncoded frame right after the preamble; a lost bit reads
        # as the PN bit after descrambling, so only lost bits whose line bit
        # was 1 actually corrupt the read-back
        lost_base = lost_all[phy.PREAMBLE_LEN : phy.PREAMBLE_LEN + plan["frame_bits_n"]]
        base_corrupt = lost_base & (phy.scramble(frame_bits) == 1)
        base_err = preamble_lost or bool(base_corrupt.any())
        if base_err:
            fe_base += 1
        bit_err_base += int(base_corrupt.sum())

        # coded: codeword bits after the preamble, receiver-perceived erasures
        lost_coded = lost_all[phy.PREAMBLE_LEN : phy.PREAMBLE_LEN + plan["coded_bits_n"]]
        flags = phy.perceived_erasures(tx_bits, lost_coded, config.erasure_margin_bits)
        per_cw, _ = _erased_symbol_counts(flags, code, plan)
        cw_fail = per_cw.sum(axis=1) > code.t
        coded_err = preamble_lost or bool(cw_fail.any())
        if coded_err:
            fe_coded += 1
            if preamble_lost:
                bit_err_coded += int(frame_bits.size)
            else:
                bit_err_coded += _coded_bit_mismatches(
                    frame_bits, flags, cw_fail, code, plan,
                    phy.scrambler_sequence(tx_bits.size),
                )
        frame_log.append({"frame": fi, "baseline_error": base_err, "coded_error": coded_err})

    return _report(
        config, code, p_s, predicted_pe, plan,
        fe_coded, fe_base, bit_err_coded, bit_err_base, frame_log,
    )


def run_sample_level(config):
    """Full modulate -> gate+noise -> demodulate -> decode pipeline per frame."""
    stats = config.stats()
    code, p_s, predicted_pe = _resolve_code(config, stats)
    plan = _frame_plan(config, code)
    rng = np.random.default_rng(config.seed)
    spb = config.samples_per_bit

    fe_coded = fe_base = 0
    bit_err_coded = bit_err_base = 0
    frame_log = []
    horizon = max(plan["coded_air_us"], plan["baseline_air_us"]) + 2 * plan["bit_us"]
    total_bits = max(plan["coded_bits_n"], plan["frame_bits_n"]) + phy.PREAMBLE_LEN

    for fi in range(config.frames):
        payload = _frame_payload(rng, config)
        frame_bits = phy.bytes_to_bits(phy.frame_build(payload))
        info_syms, _, tx_bits = _encode_frame(code, plan, frame_bits)
        gate = channel.gate_durations(rng, stats, horizon)
        lost_all = _lost_bit_mask(gate, plan, total_bits)
        # re-express the lost bits as a bit-aligned gate so waveform gating
        # and the symbol-level mask agree exactly
        bit_gate = _bit_aligned_gate(lost_all, plan["bit_us"])

        base_err, base_bits = _sample_frame_baseline(
            config, plan, frame_bits, payload, bit_gate, rng, spb
        )
        fe_base += base_err
        bit_err_base += base_bits

        coded_err, coded_bits = _sample_frame_coded(
            config, code, plan, frame_bits, payload, tx_bits, bit_gate, rng, spb
        )
        fe_coded += coded_err
        bit_err_coded += coded_bits
        frame_log.append(
            {"frame": fi, "baseline_error": bool(base_err), "coded_error": bool(coded_err)}
        )

    return _report(
        config, code, p_s, predicted_pe, plan,
        fe_coded, fe_base, bit_err_coded, bit_err_base, frame_log,
    )


def _bit_aligned_gate(lost_bits, bit_us):
    """Alternating on/off durations (us) reproducing a lost-bit mask, with a
    trailing on run so streams never outrun the gate."""
    runs = []
    state_on = True
    count = 0
    for lost in lost_bits:
        on = not lost
        if on == state_on:
            count += 1
        else:
            runs.append(count * bit_us)
            state_on = on
            count = 1
    runs.append(count * bit_us)
    if state_on:
        runs[-1] += 4 * bit_us
    else:
        runs.append(4 * bit_us)
    return np.array(runs)


def _sample_frame_baseline(config, plan, frame_bits, payload, gate, rng, spb):
    stream = phy.modulate(frame_bits, spb, bit_rate=plan["bit_rate"])
    rx = phy.apply_channel(stream, gate, config.noise_sigma, rng)
    demod = phy.demodulate(rx, spb, erase_margin_bits=config.erasure_margin_bits)
    if demod is None:
        return 1, int(frame_bits.size)
    bits = demod.bits[: frame_bits.size]
    if bits.size < frame_bits.size:
        return 1, int(frame_bits.size)
    mismatches = int(np.sum(bits != frame_bits))
    try:
        ok = phy.frame_parse(phy.bits_to_bytes(bits)) == payload
    except (FrameCrcError, ParameterError):
        ok = False
    return (0 if ok else 1), mismatches


def _sample_frame_coded(config, code, plan, frame_bits, payload, tx_bits, gate, rng, spb):
    m = plan["m"]
    stream = phy.modulate(tx_bits, spb, bit_rate=plan["bit_rate"])
    rx = phy.apply_channel(stream, gate, config.noise_sigma, rng)
    demod = phy.demodulate(rx, spb, erase_margin_bits=config.erasure_margin_bits)
    if demod is None:
        return 1, int(frame_bits.size)
    bits = demod.bits[: tx_bits.size]
    flags = demod.erasures[: tx_bits.size]
    if bits.size < tx_bits.size:
        return 1, int(frame_bits.size)

    rx_syms = phy.bits_to_symbols(bits, m)
    sym_flagged = flags.reshape(-1, m).any(axis=1)
    decoded_info = np.zeros(plan["n_codewords"] * code.k, dtype=np.int64)
    failed = np.zeros(plan["n_codewords"], dtype=bool)
    for j in range(plan["n_codewords"]):
        word = rx_syms[j * code.n : (j + 1) * code.n]
        flagged = np.flatnonzero(sym_flagged[j * code.n : (j + 1) * code.n])
        # delivery rule: erasures beyond the advertised capability t are a
        # codeword loss (same accounting the code selection assumes)
        if flagged.size > code.t:
            failed[j] = True
            decoded_info[j * code.k : (j + 1) * code.k] = word[: code.k]
            continue
        out = rscodec.decode(code, word.tolist(), flagged.tolist())
        if out is None:
            failed[j] = True
            decoded_info[j * code.k : (j + 1) * code.k] = word[: code.k]
        else:
            decoded_info[j * code.k : (j + 1) * code.k] = out

    info_bits = phy.symbols_to_bits(decoded_info, m)[: frame_bits.size]
    mismatches = int(np.sum(info_bits != frame_bits))
    if failed.any():
        return 1, mismatches
    try:
        ok = phy.frame_parse(phy.bits_to_bytes(info_bits)) == payload
    except (FrameCrcError, ParameterError):
        ok = False
    return (0 if ok else 1), mismatches


def _report(config, code, p_s, predicted_pe, plan,
            fe_coded, fe_base, bit_err_coded, bit_err_base, frame_log):
    nf = config.frames
    payload_bits = config.payload_bytes * 8
    frame_bits_total = nf * plan["frame_bits_n"]
    fer = fe_coded / nf
    fer_base = fe_base / nf
    coded_air_s = plan["coded_air_us"] / 1e6
    base_air_s = plan["baseline_air_us"] / 1e6
    return LinkReport(
        code_n=code.n,
        code_k=code.k,
        p_s=p_s,
        predicted_pe=predicted_pe,
        frames=nf,
        ber=bit_err_coded / frame_bits_total,
        fer=fer,
        throughput=payload_bits * (1.0 - fer) / coded_air_s,
        ber_baseline=bit_err_base / frame_bits_total,
        fer_baseline=fer_base,
        throughput_baseline=payload_bits * (1.0 - fer_base) / base_air_s,
        frame_log=frame_log,
    )


def run(config):
    if config.mode == "sample":
        return run_sample_level(config)
    return run_symbol_level(config)


def sweep_parity(config, n=127):
    """Block error rate per odd k (n-2 down to 1) at fixed codeword length.

    Unlike the frame experiments, each trial is a single codeword over its
    own gate, so the airtime exposure (n*m bit-times) is identical for
    every k and the measured trend isolates the correction capability.
    The uncoded baseline sends the k information symbols bare.
    """
    stats = config.stats()
    m = n.bit_length()
    bit_rate = config.rate * m
    coded_bits = n * m
    air_us = coded_bits * 1e6 / bit_rate
    blocks = config.frames
    # common random gates across all parity points: each trial's erasure
    # burden is then fixed while t grows, so the trend is not blurred by
    # independent sampling noise per point
    gate_rng = np.random.default_rng([config.seed, 0])
    lost = np.empty((blocks, coded_bits), dtype=bool)
    for r in range(blocks):
        gate = channel.gate_durations(gate_rng, stats, air_us + 2e6 / bit_rate)
        lost[r] = channel.erasure_mask_from_gate(gate, bit_rate, coded_bits).erased
    rows = []
    for k in range(n - 2, 0, -2):
        rows.append(_parity_point(config, rscodec.RsCode(n, k), lost))
    return rows


def _parity_point(config, code, lost_rows):
    m, n, k = code.m, code.n, code.k
    bit_rate = config.rate * m
    coded_bits = n * m
    blocks = config.frames
    rng = np.random.default_rng([config.seed, 1, k])

    info = rng.integers(0, 1 << m, size=(blocks, k))
    cw = rscodec.encode_batch(code, info)
    shifts = np.arange(m - 1, -1, -1)
    bits = ((cw[:, :, None] >> shifts) & 1).reshape(blocks, coded_bits).astype(np.uint8)

    fe_coded = fe_base = 0
    lost_bits_base = mism_coded = 0
    base_bits = k * m
    pn = phy.scrambler_sequence(coded_bits)
    for r in range(blocks):
        lost = lost_rows[r]
        corrupt = lost[:base_bits] & ((bits[r, :base_bits] ^ pn[:base_bits]) == 1)
        if corrupt.any():
            fe_base += 1
        lost_bits_base += int(corrupt.sum())
        flags = phy.perceived_erasures(bits[r], lost, config.erasure_margin_bits)
        erased_syms = int(flags.reshape(n, m).any(axis=1).sum())
        if erased_syms > code.t:
            fe_coded += 1
            fl = flags[:base_bits]
            mism_coded += int(np.sum(bits[r, :base_bits][fl] != pn[:base_bits][fl]))

    fer = fe_coded / blocks
    fer_base = fe_base / blocks
    return {
        "parameter": k,
        "ber_baseline": lost_bits_base / (blocks * base_bits),
        "ber_coded": mism_coded / (blocks * base_bits),
        "fer_baseline": fer_base,
        "fer_coded": fer,
        "throughput": base_bits * (1.0 - fer) * bit_rate / coded_bits,
    }


def sweep_silent(config, mean_silent_us_values):
    """One experiment per mean off duration; the off shape is kept and the
    scale is set to match the requested mean."""
    stats = config.stats()
    shape = stats.off.shape
    if shape <= 1.0:
        raise InfeasibleError("off shape <= 1; mean silent duration undefined")
    rows = []
    for mean in mean_silent_us_values:
        scale = mean * (shape - 1.0) / shape
        cfg = _replace(
            config,
            off_shape=shape,
            off_scale_min=scale,
            on_shape=stats.on.shape,
            on_scale_min=stats.on.scale_min,
            trace=None,
        )
        rep = run(cfg)
        rows.append(_sweep_row(mean, rep))
    return rows


def _sweep_row(parameter, rep):
    return {
        "parameter": parameter,
        "ber_baseline": rep.ber_baseline,
        "ber_coded": rep.ber,
        "fer_baseline": rep.fer_baseline,
        "fer_coded": rep.fer,
        "throughput": rep.throughput,
    }


def _replace(config, **kw):
    from dataclasses import replace

    return replace(config, **kw)
