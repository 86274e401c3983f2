"""Binary restricted Boltzmann machine trained by contrastive divergence.

The worked example quantizes x in [0, 1] into ``Lb`` bits and fits a bimodal
density; with ``n <= 16`` visible units the partition function is summed
exactly, so the KL divergence to the target is computed without sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_VISIBLE = 16


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class RbmParams:
    a: np.ndarray
    b: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.W = np.asarray(self.W, dtype=float)
        if self.W.shape != (self.a.size, self.b.size):
            raise ValueError("W must be [n_visible, n_hidden]")
        if not all(np.all(np.isfinite(x)) for x in (self.a, self.b, self.W)):
            raise ValueError("parameters must be finite")

    @classmethod
    def init(cls, n_visible: int, n_hidden: int, rng=None, scale: float = 0.01) -> "RbmParams":
        rng = np.random.default_rng() if rng is None else rng
        return cls(np.zeros(n_visible), np.zeros(n_hidden), scale * rng.standard_normal((n_visible, n_hidden)))

    @property
    def n_visible(self) -> int:
        return self.a.size

    @property
    def n_hidden(self) -> int:
        return self.b.size

    def copy(self) -> "RbmParams":
        return RbmParams(self.a.copy(), self.b.copy(), self.W.copy())


@dataclass(frozen=True)
class BinEncoding:
    """Lb-bit uniform bins on [0, 1], least-significant bit first."""

    n_bits: int

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("need at least one bit")

    @property
    def width(self) -> float:
        return 2.0 ** -self.n_bits

    @property
    def n_bins(self) -> int:
        return 1 << self.n_bits

    def index(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
            raise ValueError("x must lie in [0, 1]")
        d = self.width
        return np.floor(np.minimum(x, 1.0 - d) / d).astype(np.int64)

    def bits(self, index) -> np.ndarray:
        idx = np.asarray(index, dtype=np.int64)
        return ((idx[..., None] >> np.arange(self.n_bits)) & 1).astype(float)

    def to_index(self, v) -> np.ndarray:
        v = np.asarray(v).astype(np.int64)
        if v.shape[-1] != self.n_bits:
            raise ValueError(f"expected {self.n_bits} bits")
        return np.sum(v << np.arange(self.n_bits), axis=-1)


def encode(x, enc: BinEncoding) -> np.ndarray:
    """Bits of bin floor(min(x, 1 - d) / d), LSB first; works on scalars or arrays."""
    return enc.bits(enc.index(x))


def decode(v, enc: BinEncoding) -> np.ndarray | float:
    """Bin midpoint (index + 1/2) d."""
    out = (enc.to_index(v) + 0.5) * enc.width
    return float(out) if np.ndim(out) == 0 else out


def cond_hidden(params: RbmParams, v) -> np.ndarray:
    """P(h_j = 1 | v) = sigmoid(b_j + sum_i W_ij v_i)."""
    return _sigmoid(params.b + np.asarray(v, dtype=float) @ params.W)


def cond_visible(params: RbmParams, h) -> np.ndarray:
    """P(v_i = 1 | h) = sigmoid(a_i + sum_j W_ij h_j)."""
    return _sigmoid(params.a + np.asarray(h, dtype=float) @ params.W.T)


def _bernoulli(p, rng) -> np.ndarray:
    return (rng.random(np.shape(p)) < p).astype(float)


def gibbs_step(params: RbmParams, v, rng) -> tuple[np.ndarray, np.ndarray]:
    """One alternation v -> h -> v'; returns (v', h)."""
    h = _bernoulli(cond_hidden(params, v), rng)
    return _bernoulli(cond_visible(params, h), rng), h


def cd_k_update(params: RbmParams, batch, k: int = 1, lr: float = 0.05, rng=None,
                use_probabilities: bool = False) -> RbmParams:
    """One CD-k step, in place. Statistics are v0 h0 - vk hk averaged over the batch.

    By default both phases use sampled binary hidden units; with
    ``use_probabilities`` the hidden activation probabilities are used instead.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.default_rng() if rng is None else rng
    v0 = np.atleast_2d(np.asarray(batch, dtype=float))
    ph0 = cond_hidden(params, v0)
    h0 = _bernoulli(ph0, rng)
    h, v, ph = h0, v0, ph0
    for _ in range(k):
        v = _bernoulli(cond_visible(params, h), rng)
        ph = cond_hidden(params, v)
        h = _bernoulli(ph, rng)
    pos, neg = (ph0, ph) if use_probabilities else (h0, h)
    n = len(v0)
    params.W += lr * (v0.T @ pos - v.T @ neg) / n
    params.a += lr * (v0 - v).mean(axis=0)
    params.b += lr * (pos - neg).mean(axis=0)
    return params


def all_visible(n: int) -> np.ndarray:
    """Every visible configuration, row r holding the bits of r (LSB first)."""
    return ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(float)


def log_unnormalized(params: RbmParams, v) -> np.ndarray:
    """log[exp(a.v) prod_j (1 + exp(b_j + v W_j))], the hidden units summed out."""
    v = np.asarray(v, dtype=float)
    return v @ params.a + np.sum(np.logaddexp(0.0, params.b + v @ params.W), axis=-1)


def model_pmf(params: RbmParams) -> np.ndarray:
    """Exact P(v) over all 2^n visible states, index r <-> bits of r."""
    if params.n_visible > MAX_VISIBLE:
        raise ValueError(f"exact enumeration limited to {MAX_VISIBLE} visible units")
    logp = log_unnormalized(params, all_visible(params.n_visible))
    logp -= logp.max()
    p = np.exp(logp)
    return p / p.sum()


def kl_divergence(target, model) -> float:
    """sum p log(p / q) in nats; zero-mass target entries contribute nothing."""
    p = np.asarray(target, dtype=float)
    q = np.asarray(model, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must share their support")
    mask = p > 0
    if np.any(q[mask] <= 0):
        raise ValueError("model has zero mass where the target has mass")
    return max(0.0, float(np.sum(p[mask] * np.log(p[mask] / q[mask]))))


@dataclass(frozen=True)
class GaussianMixture:
    """Mixture of normals truncated to [0, 1]."""

    means: tuple = (0.25, 0.75)
    stds: tuple = (0.1, 0.1)
    weights: tuple = (0.5, 0.5)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        erf = np.vectorize(math.erf)
        return sum(w * 0.5 * (1 + erf((x - m) / (s * math.sqrt(2))))
                   for m, s, w in zip(self.means, self.stds, self.weights))

    def bin_pmf(self, enc: BinEncoding) -> np.ndarray:
        edges = np.arange(enc.n_bins + 1) * enc.width
        p = np.diff(self.cdf(edges))
        return p / p.sum()

    def sample(self, n: int, rng) -> np.ndarray:
        """Draws restricted to [0, 1] by rejection."""
        out = np.empty(0)
        w = np.asarray(self.weights) / np.sum(self.weights)
        while out.size < n:
            comp = rng.choice(len(w), size=2 * n, p=w)
            x = rng.normal(np.asarray(self.means)[comp], np.asarray(self.stds)[comp])
            out = np.concatenate([out, x[(x >= 0) & (x <= 1)]])
        return out[:n]


@dataclass
class RbmTrace:
    steps: list[int] = field(default_factory=list)
    kl: list[float] = field(default_factory=list)

    def rows(self):
        return list(zip(self.steps, self.kl))


def train_rbm(target: GaussianMixture | None = None, n_bits: int = 8, n_hidden: int = 16, k: int = 1,
              lr: float = 0.05, updates: int = 10_000, batch_size: int = 64, rng=None,
              log_every: int = 100, use_probabilities: bool = False) -> tuple[RbmParams, RbmTrace]:
    """Reference experiment: fit the quantized mixture, logging the exact KL every ``log_every`` updates."""
    rng = np.random.default_rng() if rng is None else rng
    target = GaussianMixture() if target is None else target
    enc = BinEncoding(n_bits)
    p_target = target.bin_pmf(enc)
    params = RbmParams.init(n_bits, n_hidden, rng)
    trace = RbmTrace()
    for step in range(1, updates + 1):
        batch = encode(target.sample(batch_size, rng), enc)
        cd_k_update(params, batch, k, lr, rng, use_probabilities)
        if step % log_every == 0 or step == updates:
            trace.steps.append(step)
            trace.kl.append(kl_divergence(p_target, model_pmf(params)))
    return params, trace
