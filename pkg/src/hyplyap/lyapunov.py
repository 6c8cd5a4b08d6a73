"""Lyapunov spectrum of the geodesic-flow cocycle by QR renormalization.

One matrix factor per continued-fraction digit is multiplied into a
near-orthonormal frame; the frame is re-orthonormalized periodically and
the log moduli of the R diagonal accumulate into per-index growth sums.
Exponents are normalized per unit flow time.  The flow-time unit is half
the curvature -1 roof sum: the degree identities and the reference
tables follow the Teichmueller normalization, in which one time unit
corresponds to hyperbolic length 2.  The weight-1 identity (top exponent
equal to twice the top parabolic degree) pins this factor empirically.

The very first renormalization uses column pivoting to fix the column
ordering once; later renormalizations use plain sign-normalized QR, whose
R-products telescope so the bookkeeping is independent of the
renormalization period up to floating-point noise.  Error bars come from
batch means over time windows.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import FrameOverflow, InsufficientData
from .geodesic import digit_stream
from .monodromy import MonodromySet
from .winding import COSET_START, representation

#: frame entries above this trigger FrameOverflow (qr_period too large)
OVERFLOW_LIMIT = 1e150

#: renormalize early once ln ||frame|| exceeds this: for unimodular
#: cocycles the frame condition number grows like the squared norm, and it
#: must stay well below 1/eps for the small R-diagonal entries to be exact
GROWTH_LOG_LIMIT = 12.0

#: product-of-factor-norms bound at which the true frame norm is checked;
#: the bound ignores cancellation, so it overshoots the frame norm badly
GROWTH_CHECK_LOG = 18.0

#: flow time attributed per unit of roof time 2 ln(1/x); the reference
#: normalization counts hyperbolic length 2 as one time unit
TIME_SCALE = 0.5


@dataclass
class CocycleAccumulator:
    """Running state of one cocycle estimate.

    snapshot_every thins the per-renormalization history: one snapshot is
    recorded at the first renormalization after each stride of steps, so
    long runs keep a bounded history while short ones keep every point.
    """

    n: int
    qr_period: int = 8
    snapshot_every: int = 1
    frame: np.ndarray = None
    log_sums: np.ndarray = None
    elapsed_time: float = 0.0
    steps: int = 0
    steps_since_qr: int = 0
    snapshots: list = field(default_factory=list)   # (time, steps, log_sums copy)
    _pivot_next: bool = True
    _growth_log: float = 0.0    # upper bound on ln ||frame|| since the last QR
    _next_snapshot: int = 0

    def __post_init__(self):
        if self.frame is None:
            self.frame = np.eye(self.n, dtype=complex)
        if self.log_sums is None:
            self.log_sums = np.zeros(self.n)


def _renormalize(acc: CocycleAccumulator) -> None:
    peak = float(np.abs(acc.frame).max())
    if not np.isfinite(peak) or peak > OVERFLOW_LIMIT:
        raise FrameOverflow(
            f"frame entry reached {peak:.3e} before renormalization; reduce qr_period"
        )
    if acc._pivot_next:
        q, r, _ = scipy.linalg.qr(acc.frame, mode="economic", pivoting=True)
        acc._pivot_next = False
    else:
        q, r = np.linalg.qr(acc.frame)
    diag = np.diagonal(r).copy()
    mags = np.abs(diag)
    top = mags.max()
    if not np.isfinite(top) or top == 0.0:
        raise FrameOverflow("frame became numerically singular; reduce qr_period")
    # a run through one enormous parabolic power can push the bottom of the
    # R diagonal below the floating-point floor; clamp instead of aborting
    # (the clamp injects a bounded, sign-balanced error into the lowest sum)
    mags = np.maximum(mags, top * 1e-30)
    phases = diag / np.where(np.abs(diag) > 0.0, np.abs(diag), 1.0)
    acc.frame = q * phases[None, :]
    acc.log_sums = acc.log_sums + np.log(mags)
    acc.steps_since_qr = 0
    acc._growth_log = 0.0
    if acc.steps >= acc._next_snapshot:
        acc.snapshots.append((acc.elapsed_time, acc.steps, acc.log_sums.copy()))
        acc._next_snapshot = acc.steps + acc.snapshot_every


def accumulate(acc: CocycleAccumulator, factor: np.ndarray, dt: float) -> CocycleAccumulator:
    """Multiply one factor into the frame, attributing dt of flow time.

    Renormalizes on the step cadence, and early whenever the accumulated
    norm bound (product of factor norms) indicates the frame condition
    could threaten the precision of the small R-diagonal entries.  Extra
    renormalizations are exact bookkeeping (R-diagonal products
    telescope), so they never change the sums.
    """
    acc.frame = factor @ acc.frame
    acc.elapsed_time += dt
    acc.steps += 1
    acc.steps_since_qr += 1
    acc._growth_log += math.log(acc.n * float(np.abs(factor).max()))
    if acc._pivot_next or acc.steps_since_qr >= acc.qr_period:
        _renormalize(acc)
    elif acc._growth_log > GROWTH_CHECK_LOG:
        # the product-of-norms bound is pessimistic; confirm on the frame
        true_log = math.log(max(float(np.abs(acc.frame).max()), 1.0))
        if true_log > GROWTH_LOG_LIMIT:
            _renormalize(acc)
        else:
            acc._growth_log = true_log + math.log(acc.n)
    return acc


def flush(acc: CocycleAccumulator) -> None:
    """Renormalize pending steps and record a final snapshot."""
    acc._next_snapshot = 0
    if acc.steps_since_qr > 0 or not acc.snapshots:
        _renormalize(acc)
    elif acc.snapshots[-1][1] != acc.steps:
        acc.snapshots.append((acc.elapsed_time, acc.steps, acc.log_sums.copy()))


@dataclass(frozen=True)
class LyapunovEstimate:
    """Sorted exponents with batch-means standard errors."""

    exponents: tuple[float, ...]
    stderr: tuple[float, ...]
    elapsed_time: float
    digits_used: int
    sum_positive: float
    stderr_sum: float = 0.0


def _windows_from_snapshots(snapshots, total_time: float, count: int):
    """Cut the snapshot timeline into `count` batch-means windows.

    Returns a list of (tau, slope_vector) pairs whose time-weighted mean
    slope equals the global slope.
    """
    if count < 2:
        raise InsufficientData(f"need at least 2 windows, got {count}")
    if len(snapshots) < count:
        raise InsufficientData(
            f"only {len(snapshots)} renormalization snapshots for {count} windows"
        )
    n = snapshots[0][2].size
    boundaries = [(0.0, np.zeros(n))]
    idx = 0
    for w in range(1, count + 1):
        target = total_time * w / count
        while idx < len(snapshots) - 1 and snapshots[idx][0] < target - 1e-12:
            idx += 1
        t, _, ls = snapshots[idx]
        if t <= boundaries[-1][0]:
            raise InsufficientData("degenerate window boundaries; increase digits")
        boundaries.append((t, ls))
        idx += 1
        if idx >= len(snapshots):
            idx = len(snapshots) - 1
    windows = []
    for (t0, ls0), (t1, ls1) in zip(boundaries, boundaries[1:]):
        tau = t1 - t0
        windows.append((tau, (ls1 - ls0) / tau))
    return windows


def _pooled_estimate(parts, digits_total: int) -> LyapunovEstimate:
    """Combine per-worker (log_sums, time, windows) into one estimate."""
    total_time = sum(p["time"] for p in parts)
    log_sums = sum(p["log_sums"] for p in parts)
    windows = [w for p in parts for w in p["windows"]]
    n = log_sums.size
    raw = log_sums / total_time
    order = np.argsort(-raw, kind="stable")
    exponents = raw[order]
    nwin = len(windows)
    mean = exponents
    var = np.zeros(n)
    for tau, slope in windows:
        var += tau * (slope[order] - mean) ** 2
    stderr = np.sqrt(var / ((nwin - 1) * total_time)) if nwin > 1 else np.zeros(n)
    positive = exponents > 0.0
    sum_positive = float(exponents[positive].sum())
    if positive.any() and nwin > 1:
        mean_sum = sum_positive
        var_sum = 0.0
        for tau, slope in windows:
            var_sum += tau * (slope[order][positive].sum() - mean_sum) ** 2
        stderr_sum = math.sqrt(var_sum / ((nwin - 1) * total_time))
    else:
        stderr_sum = 0.0
    return LyapunovEstimate(
        exponents=tuple(float(v) for v in exponents),
        stderr=tuple(float(v) for v in stderr),
        elapsed_time=float(total_time),
        digits_used=digits_total,
        sum_positive=sum_positive,
        stderr_sum=float(stderr_sum),
    )


def finalize(acc: CocycleAccumulator, windows: int) -> LyapunovEstimate:
    """Close an accumulator: exponents = logSums / elapsedTime plus error bars."""
    if acc.elapsed_time <= 0.0:
        raise InsufficientData("no elapsed time accumulated")
    flush(acc)
    win = _windows_from_snapshots(acc.snapshots, acc.elapsed_time, windows)
    part = {"log_sums": acc.log_sums, "time": acc.elapsed_time, "windows": win}
    return _pooled_estimate([part], acc.steps)


@dataclass(frozen=True)
class RunConfig:
    """Knobs of one Monte-Carlo estimate."""

    digits: int
    seed: int = 0
    refresh_period: int = 32
    guard: float = 1e-9
    qr_period: int = 8
    windows: int = 20
    workers: int = 1

    def split(self, workers: int):
        """Per-worker digit shares (the last worker absorbs the remainder)."""
        base = self.digits // workers
        shares = [base] * workers
        shares[-1] += self.digits - base * workers
        return shares


#: half-run piece applied per step inside a long run; bounds the condition
#: number one parabolic power can impose on the frame in a single multiply
_RUN_CHUNK = 32

#: runs longer than this are applied as one matrix power between two
#: renormalizations: rare heavy-tail events where the lowest R entries are
#: allowed bounded noise instead of a linear number of chunk steps
_RUN_DIRECT_LIMIT = 65536


def _apply_long_run(acc, rho, coset, letter, digit, dt):
    """Apply a run too long for the single-factor fast path."""
    k, odd = divmod(digit, 2)
    if acc.steps_since_qr > 0:
        _renormalize(acc)
    if digit > _RUN_DIRECT_LIMIT:
        accumulate(acc, rho.even_power(coset, letter, k).T, dt * (2 * k) / digit)
        _renormalize(acc)
    else:
        left = k
        while left > 0:
            piece = min(left, _RUN_CHUNK)
            accumulate(acc, rho.even_power(coset, letter, piece).T,
                       dt * (2 * piece) / digit)
            _renormalize(acc)
            left -= piece
    if odd:
        mat, coset = rho.run_matrix(coset, letter, 1)
        accumulate(acc, mat.T, dt / digit)
    return coset


def _run_worker(args):
    """One seed's full pipeline.

    The cocycle is the path-ordered product g_k = m_1 m_2 ... m_k of the
    per-run monodromies in traversal order.  The run process is not
    reversible, so the reversed product has different exponents; feeding
    transposed factors into the left-multiplying frame computes
    (g_k)^T = m_k^T ... m_1^T, which has the same singular values as g_k.
    """
    ms, digits, seed, refresh_period, guard, qr_period, windows = args
    rho = representation(ms)
    acc = CocycleAccumulator(ms.n, qr_period=qr_period,
                             snapshot_every=max(1, digits // (8 * windows)))
    coset = COSET_START
    for ev in digit_stream(seed, digits, refresh_period, guard):
        dt = TIME_SCALE * ev.roof_time
        if ev.digit <= 2 * _RUN_CHUNK:
            mat, coset = rho.run_matrix(coset, ev.letter, ev.digit)
            accumulate(acc, mat.T, dt)
        else:
            coset = _apply_long_run(acc, rho, coset, ev.letter, ev.digit, dt)
    flush(acc)
    win = _windows_from_snapshots(acc.snapshots, acc.elapsed_time, windows)
    return {"log_sums": acc.log_sums, "time": acc.elapsed_time,
            "windows": win, "digits": digits}


def estimate(ms: MonodromySet, cfg: RunConfig) -> LyapunovEstimate:
    """Full pipeline: geodesic digits -> winding monodromies -> cocycle.

    With workers > 1 the digit budget is split over independent seeds
    (spawned deterministically from cfg.seed) and the per-worker window
    statistics are pooled, time-weighted.
    """
    if cfg.workers <= 1:
        parts = [_run_worker((ms, cfg.digits, cfg.seed, cfg.refresh_period,
                              cfg.guard, cfg.qr_period, cfg.windows))]
    else:
        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.workers)
        shares = cfg.split(cfg.workers)
        jobs = [(ms, share, seed, cfg.refresh_period, cfg.guard,
                 cfg.qr_period, cfg.windows)
                for share, seed in zip(shares, seeds)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_run_worker, jobs))
    return _pooled_estimate(parts, sum(p["digits"] for p in parts))
