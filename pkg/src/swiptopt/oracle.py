"""Independent Monte Carlo validation of the delivered-power closed form.

Synthesizes random transmit blocks, forms the received frequency-domain
symbols at integer and half-sample instants, transforms to the time domain
and averages k2*sum|y|^2 + (3/4)*k4*sum(|y|^4 + |y_half|^4) over blocks.
This mirrors exactly the block conventions of the closed form (one block,
no cyclic-prefix energy, independent half-sample noise of equal variance),
so agreement validates the coefficient tensors end to end.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import FreqChannel
from .errors import DimensionMismatchError
from .power import DiodeModel, GaussianInput, gaussian_moments
from .rng import stream


@dataclass(frozen=True)
class OracleConfig:
    n_blocks: int = 1_000_000
    seed: int = 0
    batch: int = 100_000

    def __post_init__(self):
        if self.n_blocks < 1:
            raise ValueError("n_blocks must be >= 1")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")


@dataclass(frozen=True)
class OracleEstimate:
    mean: float
    stderr: float
    n_blocks: int


def sample_block(inp: GaussianInput, rng: np.random.Generator) -> np.ndarray:
    """One draw of the per-subcarrier complex symbols."""
    s_r, s_i = inp.sigma2()
    v_r = rng.standard_normal(inp.n) * np.sqrt(s_r) + inp.mu_r
    v_i = rng.standard_normal(inp.n) * np.sqrt(s_i) + inp.mu_i
    return v_r + 1j * v_i


def simulate_received(
    v: np.ndarray, ch: FreqChannel, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Time-domain received block at integer and half-sample instants.

    Applies the channel per subcarrier, adds iid circular Gaussian noise of
    variance sigma_w2 independently for the two sampling grids, and returns
    the unitary inverse DFTs.
    """
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[-1] != ch.n:
        raise DimensionMismatchError(f"block length {v.shape[-1]} != N={ch.n}")
    scale = math.sqrt(ch.sigma_w2 / 2) if ch.sigma_w2 > 0 else 0.0
    shape = v.shape
    w = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    w_half = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    y = np.fft.ifft(ch.h * v + w, norm="ortho", axis=-1)
    y_half = np.fft.ifft(ch.h_u * v + w_half, norm="ortho", axis=-1)
    return y, y_half


def _batch_blocks(
    inp: GaussianInput, ch: FreqChannel, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-block harvested-power samples (without diode weighting applied).

    Returns an (n, 2) array of [sum|y|^2, sum(|y|^4 + |y_half|^4)] per block.
    """
    s_r, s_i = inp.sigma2()
    v_r = rng.standard_normal((n, inp.n)) * np.sqrt(s_r) + inp.mu_r
    v_i = rng.standard_normal((n, inp.n)) * np.sqrt(s_i) + inp.mu_i
    y, y_half = simulate_received(v_r + 1j * v_i, ch, rng)
    ay2 = y.real**2 + y.imag**2
    au2 = y_half.real**2 + y_half.imag**2
    out = np.empty((n, 2))
    out[:, 0] = ay2.sum(axis=1)
    out[:, 1] = (ay2**2).sum(axis=1) + (au2**2).sum(axis=1)
    return out


def estimate_pdc(
    inp: GaussianInput,
    ch: FreqChannel,
    diode: DiodeModel,
    cfg: OracleConfig,
    threads: int = 1,
) -> OracleEstimate:
    """Monte Carlo estimate of the delivered power with its standard error.

    Blocks are processed in batches; each batch draws from its own named
    stream of the root seed, so the estimate is reproducible bit-for-bit for
    a fixed (seed, n_blocks, batch) and independent of thread scheduling.
    """
    if inp.n != ch.n:
        raise DimensionMismatchError(f"input N={inp.n} vs channel N={ch.n}")
    sizes = []
    remaining = cfg.n_blocks
    while remaining > 0:
        sizes.append(min(cfg.batch, remaining))
        remaining -= sizes[-1]

    def run_batch(i: int) -> tuple[float, float]:
        rng = stream(cfg.seed, "oracle", "batch", i)
        raw = _batch_blocks(inp, ch, sizes[i], rng)
        vals = diode.k2 * raw[:, 0] + 0.75 * diode.k4 * raw[:, 1]
        return float(vals.sum()), float((vals**2).sum())

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run_batch, range(len(sizes))))
    else:
        results = [run_batch(i) for i in range(len(sizes))]

    total = math.fsum(r[0] for r in results)
    total_sq = math.fsum(r[1] for r in results)
    n = cfg.n_blocks
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0)
    stderr = math.sqrt(var / n)
    return OracleEstimate(mean=mean, stderr=stderr, n_blocks=n)


@dataclass(frozen=True)
class MomentCheck:
    """Sample-vs-closure comparison for one moment family."""

    name: str
    sample: np.ndarray
    expected: np.ndarray
    z: np.ndarray  # |sample - expected| / stderr, elementwise

    @property
    def max_z(self) -> float:
        return float(np.max(self.z)) if self.z.size else 0.0


@dataclass(frozen=True)
class MomentReport:
    checks: tuple[MomentCheck, ...]
    n_samples: int
    z_limit: float
    passed: bool


def check_moment_identities(
    inp: GaussianInput, n_samples: int, seed: int, z_limit: float = 4.0
) -> MomentReport:
    """Compare sample moments of drawn symbols against the Gaussian closures.

    Flags any per-subcarrier deviation beyond `z_limit` standard errors.
    Deterministic components (zero sample variance) are compared exactly.
    """
    m = gaussian_moments(inp)
    n_sub = inp.n
    sums = np.zeros((10, n_sub))
    batch = 1_000_000
    done = 0
    i = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        rng = stream(seed, "moments", "batch", i)
        v = sample_block_batch(inp, b, rng)
        a2 = v.real**2 + v.imag**2
        a4 = a2**2
        v2 = v * v
        sums[0] += a2.sum(axis=0)
        sums[1] += a4.sum(axis=0)
        sums[2] += (a4**2).sum(axis=0)
        sums[3] += v2.real.sum(axis=0)
        sums[4] += (v2.real**2).sum(axis=0)
        sums[5] += v2.imag.sum(axis=0)
        sums[6] += (v2.imag**2).sum(axis=0)
        sums[7] += v.real.sum(axis=0)
        sums[8] += v.imag.sum(axis=0)
        sums[9] += (v.real**2).sum(axis=0)
        done += b
        i += 1
    ns = float(n_samples)

    def zscore(mean_s, second_s, expected):
        var = np.maximum(second_s / ns - (mean_s / ns) ** 2, 0.0)
        se = np.sqrt(var / ns)
        diff = np.abs(mean_s / ns - expected)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(se > 0, diff / np.maximum(se, 1e-300), np.where(diff == 0, 0.0, np.inf))
        return z

    checks = (
        MomentCheck("P", sums[0] / ns, m.p, zscore(sums[0], sums[1], m.p)),
        MomentCheck("Q", sums[1] / ns, m.q, zscore(sums[1], sums[2], m.q)),
        MomentCheck("Re Pbar", sums[3] / ns, m.pbar.real, zscore(sums[3], sums[4], m.pbar.real)),
        MomentCheck("Im Pbar", sums[5] / ns, m.pbar.imag, zscore(sums[5], sums[6], m.pbar.imag)),
        MomentCheck("Re mu", sums[7] / ns, m.mu.real, zscore(sums[7], sums[9], m.mu.real)),
        MomentCheck(
            "Im mu",
            sums[8] / ns,
            m.mu.imag,
            zscore(sums[8], sums[0] - sums[9], m.mu.imag),
        ),
    )
    passed = all(c.max_z <= z_limit for c in checks)
    return MomentReport(checks=checks, n_samples=n_samples, z_limit=z_limit, passed=passed)


def sample_block_batch(inp: GaussianInput, n: int, rng: np.random.Generator) -> np.ndarray:
    """(n, N) matrix of independent symbol draws."""
    s_r, s_i = inp.sigma2()
    v_r = rng.standard_normal((n, inp.n)) * np.sqrt(s_r) + inp.mu_r
    v_i = rng.standard_normal((n, inp.n)) * np.sqrt(s_i) + inp.mu_i
    return v_r + 1j * v_i
