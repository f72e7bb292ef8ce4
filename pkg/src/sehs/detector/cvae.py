"""Convolutional variational autoencoder in plain numpy.

Encoder: stride-2 conv stack with leaky-rectifier activations, flattened
into mean and log-variance heads over the latent space. Decoder mirrors the
encoder with transpose convolutions and a sigmoid output so reconstructions
stay in [0, 1]. Training maximizes the evidence lower bound (reconstruction
mean squared error plus the closed-form KL divergence to a standard normal)
with exact backpropagation and adaptive-moment updates.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sehs.errors import ConfigError, DomainError, NumericalError
from sehs.detector import layers as nn

CHECKPOINT_MAGIC = b"SEHSCVAE\x01"


@dataclass(frozen=True)
class CvaeArch:
    """Network shape; defaults match the 128x128 single-channel images."""

    image_size: int = 128
    channels: tuple = (8, 16, 32)
    kernel: int = 3
    stride: int = 2
    latent: int = 16
    leaky_slope: float = 0.2
    beta_kl: float = 1.0

    def __post_init__(self):
        if self.latent < 2:
            raise ConfigError("latent dimension must be >= 2")
        if not self.channels:
            raise ConfigError("need at least one conv level")
        if self.kernel % 2 != 1 or self.kernel < 1:
            raise ConfigError("kernel size must be odd and positive")
        size = self.image_size
        for _ in self.channels:
            if size % self.stride:
                raise ConfigError(
                    "image size must be divisible by stride at every level")
            size //= self.stride
        if size < 1:
            raise ConfigError("too many conv levels for the image size")

    @property
    def pad(self) -> int:
        return self.kernel // 2

    @property
    def bottleneck_size(self) -> int:
        return self.image_size // self.stride**len(self.channels)

    @property
    def flat_dim(self) -> int:
        return self.channels[-1] * self.bottleneck_size**2


@dataclass
class CvaeModel:
    arch: CvaeArch
    params: dict
    seed: int


@dataclass(frozen=True)
class TrainReport:
    l1: list            # per-epoch mean reconstruction loss
    l2: list            # per-epoch mean KL loss
    epochs: int
    batch_size: int
    learning_rate: float
    seed: int

    def __post_init__(self):
        if len(self.l1) != self.epochs or len(self.l2) != self.epochs:
            raise DomainError("per-epoch series must match the epoch count")


def build_cvae(arch: CvaeArch | None = None, seed: int = 0,
               dtype: str = "float32") -> CvaeModel:
    """Deterministic scaled-uniform (fan-in) initialization under seed."""
    arch = arch or CvaeArch()
    rng = np.random.default_rng(seed)
    params = {}

    def uniform(shape, fan_in):
        bound = np.sqrt(1.0 / fan_in)
        return rng.uniform(-bound, bound, size=shape).astype(dtype)

    k = arch.kernel
    cin = 1
    for i, cout in enumerate(arch.channels):
        fan = cin * k * k
        params[f"enc{i}_w"] = uniform((cout, cin, k, k), fan)
        params[f"enc{i}_b"] = np.zeros(cout, dtype=dtype)
        cin = cout
    flat = arch.flat_dim
    for head in ("mu", "logvar"):
        params[f"{head}_w"] = uniform((arch.latent, flat), flat)
        params[f"{head}_b"] = np.zeros(arch.latent, dtype=dtype)
    params["dec_in_w"] = uniform((flat, arch.latent), arch.latent)
    params["dec_in_b"] = np.zeros(flat, dtype=dtype)
    rev = list(arch.channels[::-1]) + [1]
    for i in range(len(arch.channels)):
        cin, cout = rev[i], rev[i + 1]
        params[f"dec{i}_w"] = uniform((cin, cout, k, k), cin * k * k)
        params[f"dec{i}_b"] = np.zeros(cout, dtype=dtype)
    return CvaeModel(arch=arch, params=params, seed=seed)


def _as_batch(images: np.ndarray, arch: CvaeArch) -> np.ndarray:
    x = np.asarray(images)
    if x.ndim == 2:
        x = x[None, None]
    elif x.ndim == 3:
        x = x[:, None]
    if x.ndim != 4 or x.shape[1] != 1 \
            or x.shape[2] != arch.image_size or x.shape[3] != arch.image_size:
        raise DomainError(
            f"expected (N, {arch.image_size}, {arch.image_size}) images, "
            f"got {np.asarray(images).shape}")
    return x


def encode(model: CvaeModel, x: np.ndarray):
    """Returns (mu, logvar, caches) for a (B,1,H,W) batch."""
    arch, p = model.arch, model.params
    caches = []
    h = x
    for i in range(len(arch.channels)):
        y, cache = nn.conv2d(h, p[f"enc{i}_w"], p[f"enc{i}_b"],
                             arch.stride, arch.pad)
        a = nn.leaky_relu(y, arch.leaky_slope)
        caches.append((cache, y))
        h = a
    flat = h.reshape(h.shape[0], -1)
    mu, mu_cache = nn.dense(flat, p["mu_w"], p["mu_b"])
    logvar, lv_cache = nn.dense(flat, p["logvar_w"], p["logvar_b"])
    return mu, logvar, (caches, h.shape, mu_cache, lv_cache)


def decode(model: CvaeModel, y: np.ndarray):
    """Returns (reconstruction, caches) for a (B, latent) batch."""
    arch, p = model.arch, model.params
    flat, in_cache = nn.dense(y, p["dec_in_w"], p["dec_in_b"])
    act = nn.leaky_relu(flat, arch.leaky_slope)
    s = arch.bottleneck_size
    h = act.reshape(y.shape[0], arch.channels[-1], s, s)
    caches = []
    n_layers = len(arch.channels)
    out_pad = arch.stride - 1
    pre = None
    for i in range(n_layers):
        z, cache = nn.conv_transpose2d(h, p[f"dec{i}_w"], p[f"dec{i}_b"],
                                       arch.stride, arch.pad, out_pad)
        if i < n_layers - 1:
            h2 = nn.leaky_relu(z, arch.leaky_slope)
        else:
            h2 = nn.sigmoid(z)
        caches.append((cache, z, h2))
        pre, h = z, h2
    return h, (in_cache, flat, act.shape, caches)


def reconstruct(model: CvaeModel, image: np.ndarray, sampling: str = "mean",
                seed: int | None = None, eps: np.ndarray | None = None):
    """Returns (reconstruction, mu, sigma); mean mode is deterministic."""
    x = _as_batch(image, model.arch)
    mu, logvar, _ = encode(model, x)
    sigma = np.exp(0.5 * logvar)
    if sampling == "mean":
        y = mu
    elif sampling == "stochastic":
        if eps is None:
            eps = np.random.default_rng(seed).standard_normal(mu.shape)
        y = mu + sigma * eps.astype(mu.dtype)
    else:
        raise DomainError(f"unknown sampling mode: {sampling}")
    xr, _ = decode(model, y)
    squeeze = np.asarray(image).ndim == 2
    if squeeze:
        return xr[0, 0], mu[0], sigma[0]
    return xr[:, 0], mu, sigma


def elbo_loss(x: np.ndarray, xr: np.ndarray, mu: np.ndarray,
              sigma: np.ndarray, beta_kl: float = 1.0):
    """(total, L1, L2): pixel MSE plus closed-form KL to N(0, I)."""
    x, xr = np.asarray(x), np.asarray(xr)
    mu, sigma = np.atleast_2d(mu), np.atleast_2d(sigma)
    if x.shape != xr.shape or mu.shape != sigma.shape:
        raise DomainError("shape mismatch in ELBO inputs")
    if np.any(sigma <= 0):
        raise DomainError("sigma must be positive")
    l1 = float(np.mean((x - xr)**2))
    var = sigma.astype(float)**2
    l2 = float(np.mean(0.5 * np.sum(
        mu.astype(float)**2 + var - 1.0 - np.log(var), axis=-1)))
    return l1 + beta_kl * l2, l1, l2


def elbo_and_grads(model: CvaeModel, x: np.ndarray,
                   eps: np.ndarray) -> tuple:
    """Loss components and exact parameter gradients for one batch."""
    arch, p = model.arch, model.params
    b = x.shape[0]
    mu, logvar, enc_caches = encode(model, x)
    sigma = np.exp(0.5 * logvar)
    y = mu + sigma * eps
    xr, dec_caches = decode(model, y)

    n_pix = x.size
    l1 = float(np.mean((xr - x)**2))
    var = sigma**2
    l2 = float(np.mean(0.5 * np.sum(mu**2 + var - 1.0 - logvar, axis=-1)))
    total = l1 + arch.beta_kl * l2

    grads = {}
    # --- decoder backward ---
    dxr = (2.0 / n_pix) * (xr - x)
    in_cache, flat, act_shape, caches = dec_caches
    n_layers = len(arch.channels)
    dh = dxr
    for i in range(n_layers - 1, -1, -1):
        cache, z, h2 = caches[i]
        if i == n_layers - 1:
            dz = nn.sigmoid_backward(dh, h2)
        else:
            dz = nn.leaky_relu_backward(dh, z, arch.leaky_slope)
        dh, dw, db = nn.conv_transpose2d_backward(
            dz, p[f"dec{i}_w"], cache, arch.stride, arch.pad)
        grads[f"dec{i}_w"] = dw
        grads[f"dec{i}_b"] = db
    dact = dh.reshape(b, -1)
    dflat = nn.leaky_relu_backward(dact, flat, arch.leaky_slope)
    dy, dw, db = nn.dense_backward(dflat, p["dec_in_w"], in_cache)
    grads["dec_in_w"] = dw
    grads["dec_in_b"] = db

    # --- reparametrization + KL backward ---
    dmu = dy + arch.beta_kl * mu / b
    dlogvar = dy * eps * 0.5 * sigma + arch.beta_kl * 0.5 * (var - 1.0) / b

    # --- encoder backward ---
    caches, h_shape, mu_cache, lv_cache = enc_caches
    dflat_mu, dw, db = nn.dense_backward(dmu, p["mu_w"], mu_cache)
    grads["mu_w"], grads["mu_b"] = dw, db
    dflat_lv, dw, db = nn.dense_backward(dlogvar, p["logvar_w"], lv_cache)
    grads["logvar_w"], grads["logvar_b"] = dw, db
    dh = (dflat_mu + dflat_lv).reshape(h_shape)
    for i in range(len(arch.channels) - 1, -1, -1):
        cache, z = caches[i]
        dz = nn.leaky_relu_backward(dh, z, arch.leaky_slope)
        dh, dw, db = nn.conv2d_backward(dz, p[f"enc{i}_w"], cache,
                                        arch.stride, arch.pad)
        grads[f"enc{i}_w"] = dw
        grads[f"enc{i}_b"] = db
    return total, l1, l2, grads


def train(model: CvaeModel, images: np.ndarray, epochs: int = 100,
          batch_size: int = 32, learning_rate: float = 1e-3,
          seed: int = 0, beta1: float = 0.9, beta2: float = 0.999,
          adam_eps: float = 1e-8):
    """Adaptive-moment mini-batch training; deterministic under seed."""
    x_all = _as_batch(images, model.arch)
    n = x_all.shape[0]
    if n < 2 * batch_size:
        raise DomainError(
            f"need at least two batches of images ({2 * batch_size}), "
            f"got {n}")
    dtype = model.params["mu_w"].dtype
    x_all = x_all.astype(dtype)
    rng = np.random.default_rng(seed)
    m = {k: np.zeros_like(v) for k, v in model.params.items()}
    v = {k: np.zeros_like(v) for k, v in model.params.items()}
    step = 0
    hist_l1, hist_l2 = [], []
    for epoch in range(epochs):
        order = rng.permutation(n)
        ep_l1, ep_l2, n_batches = 0.0, 0.0, 0
        for start in range(0, n - batch_size + 1, batch_size):
            idx = order[start:start + batch_size]
            xb = x_all[idx]
            eps = rng.standard_normal(
                (xb.shape[0], model.arch.latent)).astype(dtype)
            total, l1, l2, grads = elbo_and_grads(model, xb, eps)
            if not np.isfinite(total):
                raise NumericalError(
                    f"training loss became non-finite at epoch {epoch}, "
                    f"batch {n_batches}")
            step += 1
            bias1 = 1.0 - beta1**step
            bias2 = 1.0 - beta2**step
            for key, g in grads.items():
                m[key] = beta1 * m[key] + (1.0 - beta1) * g
                v[key] = beta2 * v[key] + (1.0 - beta2) * g * g
                update = (learning_rate * (m[key] / bias1)
                          / (np.sqrt(v[key] / bias2) + adam_eps))
                model.params[key] = (model.params[key] - update).astype(dtype)
            ep_l1 += l1
            ep_l2 += l2
            n_batches += 1
        hist_l1.append(ep_l1 / n_batches)
        hist_l2.append(ep_l2 / n_batches)
    report = TrainReport(l1=hist_l1, l2=hist_l2, epochs=epochs,
                         batch_size=batch_size, learning_rate=learning_rate,
                         seed=seed)
    return model, report


def save_checkpoint(path, model: CvaeModel) -> None:
    """Magic bytes + JSON architecture header + float32 weight blobs."""
    names = sorted(model.params)
    header = {
        "arch": {
            "image_size": model.arch.image_size,
            "channels": list(model.arch.channels),
            "kernel": model.arch.kernel,
            "stride": model.arch.stride,
            "latent": model.arch.latent,
            "leaky_slope": model.arch.leaky_slope,
            "beta_kl": model.arch.beta_kl,
        },
        "seed": model.seed,
        "weights": [{"name": n, "shape": list(model.params[n].shape)}
                    for n in names],
    }
    blob = json.dumps(header).encode()
    with Path(path).open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for n in names:
            fh.write(np.ascontiguousarray(
                model.params[n], dtype="<f4").tobytes())


def load_checkpoint(path) -> CvaeModel:
    with Path(path).open("rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ConfigError(f"not a model checkpoint: {path}")
        (length,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(length).decode())
        arch = CvaeArch(**{**header["arch"],
                           "channels": tuple(header["arch"]["channels"])})
        params = {}
        for spec in header["weights"]:
            count = int(np.prod(spec["shape"]))
            data = np.frombuffer(fh.read(4 * count), dtype="<f4")
            params[spec["name"]] = data.reshape(spec["shape"]).copy()
    return CvaeModel(arch=arch, params=params, seed=header["seed"])
