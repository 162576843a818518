"""Closed-form delivered power, rate objective and analytic gradients.

The harvested DC power of a rectifying receiver is modeled through second-
and fourth-order terms of the received waveform, k2*E[y^2] + k4*E[y^4].
Expanded over an N-subcarrier block with independent per-subcarrier Gaussian
inputs, the expectation collapses to a closed form in the per-subcarrier
moments (Q, P, Pbar, mu) with channel-dependent coefficient tensors
(alpha, beta, gamma, eta, Phi, Psi). This module computes those tensors,
evaluates the closed form and its exact gradient, and provides the
information-rate objective and the linear-harvester baseline.

Gradient components are ordered as the concatenation
(d/dP_r, d/dP_i, d/dmu_r, d/dmu_i), each block of length N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import FreqChannel
from .errors import DimensionMismatchError, NegativeVarianceError

LOG2E = math.log2(math.e)

# negative-variance slack: P - mu^2 >= -_VAR_TOL * max(1, P) tolerated and clamped
_VAR_TOL = 1e-12


@dataclass(frozen=True)
class DiodeModel:
    """Second/fourth-order rectifier coefficients (small-signal Taylor values)."""

    k2: float = 0.0034
    k4: float = 0.3829

    def __post_init__(self):
        if self.k2 < 0 or self.k4 < 0 or (self.k2 == 0 and self.k4 == 0):
            raise ValueError("diode coefficients must be nonnegative and not both zero")


@dataclass(frozen=True)
class GaussianInput:
    """Per-subcarrier means and second moments of independent Gaussian inputs.

    mu_r/mu_i are the means of the real/imaginary components, p_r/p_i their
    second moments E[V_r^2], E[V_i^2]. Variances are p - mu^2 and must be
    nonnegative.
    """

    mu_r: np.ndarray
    mu_i: np.ndarray
    p_r: np.ndarray
    p_i: np.ndarray

    def __post_init__(self):
        for name in ("mu_r", "mu_i", "p_r", "p_i"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        lengths = {len(self.mu_r), len(self.mu_i), len(self.p_r), len(self.p_i)}
        if len(lengths) != 1:
            raise DimensionMismatchError(f"component lengths differ: {lengths}")

    @property
    def n(self) -> int:
        return len(self.p_r)

    @property
    def mu(self) -> np.ndarray:
        return self.mu_r + 1j * self.mu_i

    @property
    def p(self) -> np.ndarray:
        return self.p_r + self.p_i

    def sigma2(self) -> tuple[np.ndarray, np.ndarray]:
        """Validated (variance_r, variance_i); raises on negative variance."""
        s_r = self.p_r - self.mu_r**2
        s_i = self.p_i - self.mu_i**2
        slack = _VAR_TOL * np.maximum(1.0, np.maximum(self.p_r, self.p_i))
        if np.any(s_r < -slack) or np.any(s_i < -slack):
            raise NegativeVarianceError("second moment below squared mean")
        return np.maximum(s_r, 0.0), np.maximum(s_i, 0.0)

    @staticmethod
    def zero_mean(p_r: np.ndarray, p_i: np.ndarray) -> "GaussianInput":
        p_r = np.asarray(p_r, dtype=np.float64)
        p_i = np.asarray(p_i, dtype=np.float64)
        z = np.zeros_like(p_r)
        return GaussianInput(mu_r=z, mu_i=z.copy(), p_r=p_r, p_i=p_i)

    @staticmethod
    def deterministic(mu: np.ndarray) -> "GaussianInput":
        """Zero-variance input carrying the complex means `mu`."""
        mu = np.asarray(mu, dtype=np.complex128)
        return GaussianInput(mu_r=mu.real, mu_i=mu.imag, p_r=mu.real**2, p_i=mu.imag**2)

    @staticmethod
    def cscg(p: np.ndarray) -> "GaussianInput":
        """Circularly symmetric input with total per-subcarrier power `p`."""
        p = np.asarray(p, dtype=np.float64)
        return GaussianInput.zero_mean(p / 2, p / 2)


@dataclass(frozen=True)
class Moments:
    """Per-subcarrier absolute moments of a complex input distribution."""

    q: np.ndarray  # E[|V|^4]
    p: np.ndarray  # E[|V|^2]
    pbar: np.ndarray  # E[V^2] (pseudo-moment), complex
    mu: np.ndarray  # E[V], complex


@dataclass(frozen=True)
class PowerCoeffs:
    """Channel/diode coefficient tensors of the delivered-power closed form.

    `phi` carries the effective pseudo-moment coefficient for the half
    k-range sum k = 1..(N-1)/2 (i.e. both k and N-k contributions folded in).
    `psi` is stored sparsely as parallel index arrays over the admissible
    (l, m, k) triplets with l < m, 1 <= k <= (N-1)/2, m != (l±k) mod N;
    `psi_lk`/`psi_mk` precompute (l-k) mod N and (m-k) mod N.
    """

    n: int
    k2: float
    k4: float
    sigma_w2: float
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    eta: float
    phi: np.ndarray  # (N, (N-1)//2) complex, column j is k = j+1
    psi_l: np.ndarray = field(repr=False, default=None)
    psi_m: np.ndarray = field(repr=False, default=None)
    psi_k: np.ndarray = field(repr=False, default=None)
    psi_lk: np.ndarray = field(repr=False, default=None)
    psi_mk: np.ndarray = field(repr=False, default=None)
    psi: np.ndarray = field(repr=False, default=None)

    @property
    def half(self) -> int:
        return (self.n - 1) // 2

    def phi_indices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(l, (l+k)%N, (l-k)%N) index grids matching the phi array shape."""
        n = self.n
        l = np.arange(n)[:, None]
        k = np.arange(1, self.half + 1)[None, :]
        return (
            np.broadcast_to(l, (n, self.half)),
            (l + k) % n,
            (l - k) % n,
        )


def coefficients(ch: FreqChannel, diode: DiodeModel) -> PowerCoeffs:
    """Precompute all delivered-power coefficient tensors for a channel."""
    n = ch.n
    k2, k4 = diode.k2, diode.k4
    s2 = ch.sigma_w2
    h, hu = ch.h, ch.h_u
    ah2, au2 = np.abs(h) ** 2, np.abs(hu) ** 2

    alpha = (3 * k4 / (4 * n)) * (ah2**2 + au2**2)
    beta = k2 * ah2 + 3 * k4 * s2 * (ah2 + au2)
    gamma = (3 * k4 / n) * (np.outer(ah2, ah2) + np.outer(au2, au2))
    np.fill_diagonal(gamma, 0.0)
    eta = k2 * s2 + 3 * k4 * s2**2

    half = (n - 1) // 2
    l = np.arange(n)[:, None]
    k = np.arange(1, half + 1)[None, :]
    lp = (l + k) % n
    lm = (l - k) % n
    # effective coefficient over the half k-range (k and N-k contributions folded)
    phi = (3 * k4 / n) * (
        h[l % n] ** 2 * np.conj(h[lp]) * np.conj(h[lm])
        + hu[l % n] ** 2 * np.conj(hu[lp]) * np.conj(hu[lm])
    )

    psi_l, psi_m, psi_k, psi_lk, psi_mk, psi_v = [], [], [], [], [], []
    for ll in range(n):
        for kk in range(1, half + 1):
            for mm in range(ll + 1, n):
                if mm == (ll + kk) % n or mm == (ll - kk) % n:
                    continue
                lk, mk = (ll - kk) % n, (mm - kk) % n
                val = (3 * k4 / n) * (
                    h[ll] * np.conj(h[mm]) * np.conj(h[lk]) * h[mk]
                    + hu[ll] * np.conj(hu[mm]) * np.conj(hu[lk]) * hu[mk]
                )
                psi_l.append(ll)
                psi_m.append(mm)
                psi_k.append(kk)
                psi_lk.append(lk)
                psi_mk.append(mk)
                psi_v.append(val)

    return PowerCoeffs(
        n=n,
        k2=k2,
        k4=k4,
        sigma_w2=s2,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        eta=eta,
        phi=phi,
        psi_l=np.asarray(psi_l, dtype=np.intp),
        psi_m=np.asarray(psi_m, dtype=np.intp),
        psi_k=np.asarray(psi_k, dtype=np.intp),
        psi_lk=np.asarray(psi_lk, dtype=np.intp),
        psi_mk=np.asarray(psi_mk, dtype=np.intp),
        psi=np.asarray(psi_v, dtype=np.complex128),
    )


def gaussian_moments(inp: GaussianInput) -> Moments:
    """Moment closures for independent-component Gaussian inputs."""
    inp.sigma2()  # validates
    q = (
        3 * (inp.p_r**2 + inp.p_i**2)
        - 2 * (inp.mu_r**4 + inp.mu_i**4)
        + 2 * inp.p_r * inp.p_i
    )
    pbar = inp.p_r - inp.p_i + 2j * inp.mu_r * inp.mu_i
    return Moments(q=q, p=inp.p, pbar=pbar, mu=inp.mu)


def _check_n(inp_n: int, coeffs_n: int) -> None:
    if inp_n != coeffs_n:
        raise DimensionMismatchError(f"input N={inp_n} vs coefficients N={coeffs_n}")


def _phi_sums(mu: np.ndarray, coeffs: PowerCoeffs) -> np.ndarray:
    """S_l = sum_k conj(mu[(l+k)]) conj(mu[(l-k)]) phi[l, k], per subcarrier."""
    if coeffs.half == 0:
        return np.zeros(coeffs.n, dtype=np.complex128)
    _, lp, lm = coeffs.phi_indices()
    muc = np.conj(mu)
    return (muc[lp] * muc[lm] * coeffs.phi).sum(axis=1)


def _psi_total(mu: np.ndarray, coeffs: PowerCoeffs) -> float:
    if coeffs.psi.size == 0:
        return 0.0
    muc = np.conj(mu)
    terms = (
        mu[coeffs.psi_l]
        * muc[coeffs.psi_m]
        * muc[coeffs.psi_lk]
        * mu[coeffs.psi_mk]
        * coeffs.psi
    )
    return float(terms.real.sum())


def delivered_power_moments(m: Moments, coeffs: PowerCoeffs) -> float:
    """Delivered power evaluated directly from per-subcarrier moments."""
    _check_n(len(m.p), coeffs.n)
    base = (
        coeffs.n * coeffs.eta
        + float(coeffs.alpha @ m.q)
        + float(coeffs.beta @ m.p)
        + 0.5 * float(m.p @ coeffs.gamma @ m.p)
    )
    phi_term = float((m.pbar * _phi_sums(m.mu, coeffs)).real.sum())
    return base + phi_term + _psi_total(m.mu, coeffs)


def delivered_power(inp: GaussianInput, coeffs: PowerCoeffs) -> float:
    """Closed-form delivered power for a Gaussian input."""
    _check_n(inp.n, coeffs.n)
    return delivered_power_moments(gaussian_moments(inp), coeffs)


def delivered_power_wpt(mu: np.ndarray, coeffs: PowerCoeffs) -> float:
    """Delivered power of a deterministic (zero-variance) input with means `mu`."""
    mu = np.asarray(mu, dtype=np.complex128)
    _check_n(len(mu), coeffs.n)
    return delivered_power(GaussianInput.deterministic(mu), coeffs)


def delivered_power_wpt_batch(mu: np.ndarray, coeffs: PowerCoeffs) -> np.ndarray:
    """Vectorized delivered_power_wpt over rows of a (B, N) mean matrix."""
    mu = np.atleast_2d(np.asarray(mu, dtype=np.complex128))
    _check_n(mu.shape[1], coeffs.n)
    mu_r, mu_i = mu.real, mu.imag
    p_r, p_i = mu_r**2, mu_i**2
    p = p_r + p_i
    q = np.abs(mu) ** 4
    pbar = mu**2
    base = (
        coeffs.n * coeffs.eta
        + q @ coeffs.alpha
        + p @ coeffs.beta
        + 0.5 * np.einsum("bl,lm,bm->b", p, coeffs.gamma, p)
    )
    muc = np.conj(mu)
    if coeffs.half > 0:
        _, lp, lm = coeffs.phi_indices()
        s = (muc[:, lp] * muc[:, lm] * coeffs.phi).sum(axis=2)
        base += (pbar * s).real.sum(axis=1)
    if coeffs.psi.size:
        terms = (
            mu[:, coeffs.psi_l]
            * muc[:, coeffs.psi_m]
            * muc[:, coeffs.psi_lk]
            * mu[:, coeffs.psi_mk]
            * coeffs.psi
        )
        base += terms.real.sum(axis=1)
    return base


def delivered_power_linear(inp: GaussianInput, ch: FreqChannel) -> float:
    """Linear-harvester baseline: sum_l |h_l|^2 P_l + sigma_w^2."""
    _check_n(inp.n, ch.n)
    return float(((np.abs(ch.h) ** 2) * inp.p + ch.sigma_w2).sum())


def rate_gain(ch: FreqChannel) -> np.ndarray:
    """Per-subcarrier SNR gain a_l = 2N |h_l|^2 / (f_w sigma_w^2)."""
    if ch.sigma_w2 <= 0:
        raise ValueError("rate requires sigma_w2 > 0")
    return 2 * ch.n * np.abs(ch.h) ** 2 / (ch.f_w * ch.sigma_w2)


def rate_constants(ch: FreqChannel) -> tuple[float, float]:
    """(c0, c1) with c0 = f_w / 2N and c1 = c0 * log2(e)."""
    c0 = ch.f_w / (2 * ch.n)
    return c0, c0 * LOG2E


def rate(inp: GaussianInput, ch: FreqChannel) -> float:
    """Information rate sum_l c0 (log2(1+a_l s_r^2) + log2(1+a_l s_i^2)).

    Depends only on the component variances, not the means.
    """
    _check_n(inp.n, ch.n)
    s_r, s_i = inp.sigma2()
    a = rate_gain(ch)
    c0, _ = rate_constants(ch)
    return float(c0 * (np.log2(1 + a * s_r) + np.log2(1 + a * s_i)).sum())


def rate_and_grad(inp: GaussianInput, ch: FreqChannel) -> tuple[float, np.ndarray]:
    """Rate and its gradient in the (P_r, P_i, mu_r, mu_i) ordering."""
    _check_n(inp.n, ch.n)
    s_r, s_i = inp.sigma2()
    a = rate_gain(ch)
    c0, c1 = rate_constants(ch)
    val = float(c0 * (np.log2(1 + a * s_r) + np.log2(1 + a * s_i)).sum())
    d_r = c1 * a / (1 + a * s_r)
    d_i = c1 * a / (1 + a * s_i)
    grad = np.concatenate([d_r, d_i, -2 * inp.mu_r * d_r, -2 * inp.mu_i * d_i])
    return val, grad


def g1(p: np.ndarray, coeffs: PowerCoeffs) -> np.ndarray:
    """Cross-subcarrier power coupling g1(P_l) = sum_{m != l} gamma_{m,l} P_m."""
    return coeffs.gamma @ p


def grad_f_ib(inp: GaussianInput, coeffs: PowerCoeffs) -> np.ndarray:
    """Exact gradient of the delivered-power closed form, length 4N.

    Ordering: (d/dP_r, d/dP_i, d/dmu_r, d/dmu_i). The parameterization
    treats (P_r, P_i, mu_r, mu_i) as independent coordinates; the moment
    closures are differentiated accordingly (dQ/dP_r = 6P_r + 2P_i,
    dQ/dmu_r = -8 mu_r^3, dPbar/dmu_r = 2j mu_i, ...).
    """
    _check_n(inp.n, coeffs.n)
    n = coeffs.n
    mu = inp.mu
    muc = np.conj(mu)
    pbar = inp.p_r - inp.p_i + 2j * inp.mu_r * inp.mu_i
    g1_vec = g1(inp.p, coeffs)

    s = _phi_sums(mu, coeffs)
    d_pr = coeffs.alpha * (6 * inp.p_r + 2 * inp.p_i) + coeffs.beta + g1_vec + s.real
    d_pi = coeffs.alpha * (6 * inp.p_i + 2 * inp.p_r) + coeffs.beta + g1_vec - s.real

    d_mr = coeffs.alpha * (-8 * inp.mu_r**3)
    d_mi = coeffs.alpha * (-8 * inp.mu_i**3)
    # pseudo-moment dependence on the means of the same subcarrier
    d_mr += -2 * inp.mu_i * s.imag
    d_mi += -2 * inp.mu_r * s.imag

    if coeffs.half > 0:
        # conjugated mean factors: subcarrier l appears as (d+k)%N or (d-k)%N
        # of other subcarriers' pseudo-moment sums
        d_grid, lp, lm = coeffs.phi_indices()
        z1 = (pbar[d_grid] * muc[lm] * coeffs.phi).ravel()
        z2 = (pbar[d_grid] * muc[lp] * coeffs.phi).ravel()
        np.add.at(d_mr, lp.ravel(), z1.real)
        np.add.at(d_mi, lp.ravel(), z1.imag)
        np.add.at(d_mr, lm.ravel(), z2.real)
        np.add.at(d_mi, lm.ravel(), z2.imag)

    if coeffs.psi.size:
        f_l = mu[coeffs.psi_l]
        f_m = muc[coeffs.psi_m]
        f_lk = muc[coeffs.psi_lk]
        f_mk = mu[coeffs.psi_mk]
        v = coeffs.psi
        z_l = v * f_m * f_lk * f_mk  # factor at psi_l enters unconjugated
        z_m = v * f_l * f_lk * f_mk  # factor at psi_m enters conjugated
        z_lk = v * f_l * f_m * f_mk  # conjugated
        z_mk = v * f_l * f_m * f_lk  # unconjugated
        np.add.at(d_mr, coeffs.psi_l, z_l.real)
        np.add.at(d_mi, coeffs.psi_l, -z_l.imag)
        np.add.at(d_mr, coeffs.psi_m, z_m.real)
        np.add.at(d_mi, coeffs.psi_m, z_m.imag)
        np.add.at(d_mr, coeffs.psi_lk, z_lk.real)
        np.add.at(d_mi, coeffs.psi_lk, z_lk.imag)
        np.add.at(d_mr, coeffs.psi_mk, z_mk.real)
        np.add.at(d_mi, coeffs.psi_mk, -z_mk.imag)

    return np.concatenate([d_pr, d_pi, d_mr, d_mi])
