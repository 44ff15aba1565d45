"""Block-wise three-layer sigmoid autoencoder.

Each primary block gets a freshly initialised network trained only on the
noisy block and its shifted copies; the reconstruction of the unshifted
block replaces it. The fusion mode trains on the same block taken from
several images and averages their reconstructions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .image import WindowSpec, partition_blocks


LOSS_REDUCTIONS = ("sum", "pattern_mean", "mean")


def loss_scale(loss: str, n: int, d: int) -> float:
    return {"sum": 1.0, "pattern_mean": 1.0 / n, "mean": 1.0 / (n * d)}[loss]


@dataclass(frozen=True)
class AeConfig:
    """Hyper-parameters of the per-block autoencoder.

    ``compression_ratio`` is hidden size over input size. ``loss`` selects
    the reduction of the squared reconstruction error: ``"sum"`` over all
    patterns and pixels, ``"pattern_mean"`` sums pixels and averages
    patterns, ``"mean"`` averages both.
    """

    block_h: int = 50
    block_w: int = 50
    window: WindowSpec = field(default_factory=lambda: WindowSpec(5))
    epochs: int = 20
    learning_rate: float = 0.001
    compression_ratio: float = 0.5
    seed: int = 0
    optimizer: str = "gd"
    loss: str = "mean"
    dtype: str = "float32"

    def __post_init__(self):
        if not isinstance(self.window, WindowSpec):
            object.__setattr__(self, "window", WindowSpec(int(self.window)))
        if self.block_h < 1 or self.block_w < 1:
            raise ValueError("block dimensions must be >= 1")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be an integer >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 < self.compression_ratio <= 1:
            raise ValueError("compression_ratio must be in (0, 1]")
        if self.optimizer not in ("gd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.loss not in LOSS_REDUCTIONS:
            raise ValueError(f"unknown loss {self.loss!r}")

    def hidden_size(self, n_inputs: int) -> int:
        return max(1, int(round(self.compression_ratio * n_inputs)))


def sigmoid(z):
    # split form avoids overflow warnings for large |z|
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    # saturated values would round to exactly 0 or 1; keep the open interval
    fi = np.finfo(out.dtype)
    return np.clip(out, fi.tiny, 1.0 - fi.epsneg, out=out)


@dataclass
class AeNetwork:
    w1: np.ndarray  # (hidden, input)
    b1: np.ndarray
    w2: np.ndarray  # (input, hidden)
    b2: np.ndarray
    loss_trace: list[float] = field(default_factory=list)

    @classmethod
    def initialise(cls, n_in: int, n_hidden: int, rng, dtype=np.float64) -> "AeNetwork":
        s = np.sqrt(6.0 / (n_in + n_hidden))
        w1 = rng.uniform(-s, s, size=(n_hidden, n_in)).astype(dtype, copy=False)
        w2 = rng.uniform(-s, s, size=(n_in, n_hidden)).astype(dtype, copy=False)
        return cls(w1, np.zeros(n_hidden, dtype), w2, np.zeros(n_in, dtype))

    @property
    def n_inputs(self) -> int:
        return self.w1.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.w1.shape[0]

    def forward(self, x):
        """Return ``(hidden, output)`` for a batch ``x`` of shape (N, input)."""
        h = sigmoid(x @ self.w1.T + self.b1)
        y = sigmoid(h @ self.w2.T + self.b2)
        return h, y

    def reconstruct(self, pattern) -> np.ndarray:
        x = np.asarray(pattern, dtype=self.w1.dtype)
        single = x.ndim == 1
        if x.shape[-1] != self.n_inputs:
            raise ValueError(f"pattern length {x.shape[-1]} != input size {self.n_inputs}")
        _, y = self.forward(x.reshape(-1, self.n_inputs))
        return y[0] if single else y

    def params(self):
        return [self.w1, self.b1, self.w2, self.b2]


def ae_reconstruct(net: AeNetwork, pattern) -> np.ndarray:
    return net.reconstruct(pattern)


def reconstruction_loss(net: AeNetwork, x, loss: str = "mean") -> float:
    _, y = net.forward(x)
    err = (y - x).astype(np.float64)
    return float(np.sum(err * err) * loss_scale(loss, *x.shape))


def gradients(net: AeNetwork, x, loss: str = "mean"):
    """Loss and analytic gradients ``(loss, [dW1, db1, dW2, db2])``."""
    n, d = x.shape
    h, y = net.forward(x)
    err = y - x
    scale = loss_scale(loss, n, d)
    loss_val = float(np.sum(err.astype(np.float64) ** 2) * scale)
    delta2 = (2.0 * scale) * err * y * (1.0 - y)          # (n, d)
    delta1 = (delta2 @ net.w2) * h * (1.0 - h)            # (n, hidden)
    return loss_val, [delta1.T @ x, delta1.sum(axis=0), delta2.T @ h, delta2.sum(axis=0)]


def train_ae(patterns, cfg: AeConfig, rng=None, *, low_rank: bool | None = None) -> AeNetwork:
    """Initialise from ``rng`` (or ``cfg.seed``) and run full-batch training.

    ``net.loss_trace[i]`` is the loss measured at the start of epoch ``i``
    followed by the loss after the final update.

    Plain gradient descent runs on the low-rank engine by default
    (``low_rank=None``); ``low_rank=False`` forces the explicit update loop.
    Both follow the same trajectory up to rounding.
    """
    dtype = np.dtype(cfg.dtype)
    try:
        x = np.asarray(patterns, dtype=dtype)
    except ValueError as exc:
        raise ValueError("patterns must share one length") from exc
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("patterns must be a non-empty list of equal-length vectors")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    net = AeNetwork.initialise(x.shape[1], cfg.hidden_size(x.shape[1]), rng, dtype)
    if cfg.optimizer == "gd" and low_rank is not False:
        return _train_gd_low_rank(net, x, cfg)
    return _train_explicit(net, x, cfg)


def _train_gd_low_rank(net: AeNetwork, x, cfg: AeConfig) -> AeNetwork:
    """Full-batch GD without touching the big matrices every epoch.

    Every weight update is ``-lr * delta.T @ activations`` with a fixed
    input batch, so ``x @ W1.T`` reduces to ``x @ W1_0.T - lr * (x x^T) D1``
    where ``D1`` sums the hidden deltas, and ``W2`` is its initial value
    plus a rank ``epochs * n`` history. Weights are materialised once at
    the end.
    """
    lr = cfg.learning_rate
    n, d = x.shape
    w1_0, w2_0 = net.w1, net.w2
    b1, b2 = net.b1.copy(), net.b2.copy()
    p1 = x @ w1_0.T
    gram = x @ x.T
    d1 = np.zeros_like(p1)
    h_hist = np.empty((cfg.epochs * n, net.n_hidden), dtype=x.dtype)
    d2_hist = np.empty((cfg.epochs * n, d), dtype=x.dtype)
    scale = loss_scale(cfg.loss, n, d)

    w2_0t = np.ascontiguousarray(w2_0.T)

    # products are arranged as (big matrix) @ (skinny).T; OpenBLAS is
    # several times slower on the skinny-on-the-left forms
    def forward(t):
        h = sigmoid(p1 - lr * (gram @ d1) + b1)
        a2 = (w2_0 @ h.T).T + b2
        if t:
            a2 -= lr * (d2_hist[:t].T @ (h_hist[:t] @ h.T)).T
        return h, sigmoid(a2)

    for epoch in range(cfg.epochs):
        t = epoch * n
        h, y = forward(t)
        err = y - x
        net.loss_trace.append(float(np.sum(err.astype(np.float64) ** 2) * scale))
        delta2 = (2.0 * scale) * err * y * (1.0 - y)
        back = (w2_0t @ delta2.T).T
        if t:
            back -= lr * (h_hist[:t].T @ (d2_hist[:t] @ delta2.T)).T
        delta1 = back * h * (1.0 - h)
        d1 += delta1
        b1 -= lr * delta1.sum(axis=0)
        b2 -= lr * delta2.sum(axis=0)
        h_hist[t:t + n] = h
        d2_hist[t:t + n] = delta2
    _, y = forward(cfg.epochs * n)
    err = (y - x).astype(np.float64)
    net.loss_trace.append(float(np.sum(err ** 2) * scale))
    net.w1 = w1_0 - lr * (d1.T @ x)
    net.w2 = w2_0 - lr * (d2_hist.T @ h_hist)
    net.b1, net.b2 = b1, b2
    return net


def _train_explicit(net: AeNetwork, x, cfg: AeConfig) -> AeNetwork:
    lr = cfg.learning_rate
    if cfg.optimizer == "adam":
        b1_, b2_, eps = 0.9, 0.999, 1e-7
        m = [np.zeros_like(p) for p in net.params()]
        v = [np.zeros_like(p) for p in net.params()]
    for epoch in range(1, cfg.epochs + 1):
        loss_val, grads = gradients(net, x, cfg.loss)
        net.loss_trace.append(loss_val)
        if cfg.optimizer == "gd":
            for p, g in zip(net.params(), grads):
                p -= lr * g
        else:
            corr1 = 1 - b1_ ** epoch
            corr2 = 1 - b2_ ** epoch
            for p, g, mi, vi in zip(net.params(), grads, m, v):
                mi *= b1_
                mi += (1 - b1_) * g
                vi *= b2_
                vi += (1 - b2_) * g * g
                p -= lr * (mi / corr1) / (np.sqrt(vi / corr2) + eps)
    net.loss_trace.append(reconstruction_loss(net, x, cfg.loss))
    return net


def build_shift_training_set(img, origin, dims, window) -> np.ndarray:
    """The block at ``origin`` shifted by every (dy, dx) in ``[-k, k]^2``.

    Returns ``side**2`` flattened patterns, row-major over (dy, dx); the
    unshifted block is the middle one. Shifts past the border clamp.
    """
    img = np.asarray(img)
    side = window.side if isinstance(window, WindowSpec) else WindowSpec(int(window)).side
    k = side // 2
    (r0, c0), (bh, bw) = origin, dims
    h, w = img.shape
    rows = np.arange(r0, r0 + bh)
    cols = np.arange(c0, c0 + bw)
    out = []
    for dy in range(-k, k + 1):
        rr = np.clip(rows + dy, 0, h - 1)
        for dx in range(-k, k + 1):
            cc = np.clip(cols + dx, 0, w - 1)
            out.append(img[np.ix_(rr, cc)].ravel())
    return np.array(out)


def block_rng(seed: int, index: int):
    return np.random.default_rng([int(seed), int(index)])


def ae_denoise_image(img, cfg: AeConfig) -> np.ndarray:
    """Train one fresh network per primary block and reassemble."""
    img = np.asarray(img, dtype=np.float64)
    grid = partition_blocks(img, cfg.block_h, cfg.block_w)
    side = cfg.window.side
    centre = (side * side) // 2
    out = np.empty_like(img)
    for idx, (rs, cs) in grid.slices():
        dims = (rs.stop - rs.start, cs.stop - cs.start)
        patterns = build_shift_training_set(img, (rs.start, cs.start), dims, cfg.window)
        net = train_ae(patterns, cfg, block_rng(cfg.seed, idx))
        out[rs, cs] = net.reconstruct(patterns[centre]).reshape(dims)
    return out


def ae_filter(cfg: AeConfig):
    """Bind ``cfg`` to :func:`ae_denoise_image` for the recursive loop."""
    def dnf(img):
        return ae_denoise_image(img, cfg)

    return dnf


def ae_fuse(variants, cfg: AeConfig) -> np.ndarray:
    """Fuse same-size images block-wise through one network per block.

    The training set per block is every variant's block and its window
    shifts (``n * side**2`` patterns); the fused block is the mean of the
    reconstructions of the unshifted variant blocks.
    """
    variants = [np.asarray(v, dtype=np.float64) for v in variants]
    if len(variants) < 2:
        raise ValueError("ae_fuse needs at least two variants")
    shape = variants[0].shape
    if any(v.shape != shape for v in variants):
        raise ValueError("all variants must share the same dimensions")
    grid = partition_blocks(variants[0], cfg.block_h, cfg.block_w)
    side = cfg.window.side
    per = side * side
    centre = per // 2
    out = np.empty(shape)
    for idx, (rs, cs) in grid.slices():
        dims = (rs.stop - rs.start, cs.stop - cs.start)
        patterns = np.concatenate([
            build_shift_training_set(v, (rs.start, cs.start), dims, cfg.window)
            for v in variants])
        net = train_ae(patterns, cfg, block_rng(cfg.seed, idx))
        recon = net.reconstruct(patterns[centre::per])
        out[rs, cs] = recon.astype(np.float64).mean(axis=0).reshape(dims)
    return out
