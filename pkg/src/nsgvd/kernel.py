"""Trainable deep kernel on flattened feature matrices.

    k(a, b) = [ (1 - eps) * kappa(phi(a), phi(b)) + eps ] * Phi(a, b)

with kappa and Phi Gaussian kernels of bandwidths sigma_feat (on the feature
net's outputs) and sigma_raw (on the raw features), and eps in (0, 1) the
mixing floor that keeps the kernel characteristic even when the net collapses.
The mixing is evaluated as kappa + eps*(1 - kappa), which is algebraically
identical and makes k(a, a) = 1.0 exact in floating point.

Constraints are maintained by optimizing unconstrained surrogates: eps through
a sigmoid, both bandwidths through exponentials. All gradients returned by
this module are with respect to the unconstrained parameters (eps_raw,
log_sigma_feat, log_sigma_raw, net weights) and are exact reverse-mode
derivatives of the fixed computation graph above.

Parameter records serialize to a versioned binary checkpoint:

    magic b"NSGK" | uint32 version | uint32 n_dims | n_dims * uint32 layer dims
    | float64 LE values in declaration order (eps_raw, per-layer W row-major
    then bias, log_sigma_feat, log_sigma_raw)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ConfigError, ShapeMismatchError, TensorFormatError
from .estimator import NsgFeature, stack_features

CHECKPOINT_MAGIC = b"NSGK"
CHECKPOINT_VERSION = 1


class FeatureNet:
    """Small fully-connected net, tanh on hidden layers, linear output.

    Weights W_l are (out, in); forward is deterministic given weights.
    """

    def __init__(self, dims, weights, biases):
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) < 2 or any(d < 1 for d in self.dims):
            raise ConfigError(f"bad layer dims {dims}")
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.dims[l + 1], self.dims[l]) or b.shape != (self.dims[l + 1],):
                raise ConfigError(f"layer {l} shapes inconsistent with dims {self.dims}")

    @classmethod
    def initialize(cls, dims, rng: np.random.Generator) -> "FeatureNet":
        """Symmetric uniform init scaled by 1/sqrt(fan_in)."""
        dims = tuple(int(d) for d in dims)
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(dims, weights, biases)

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def copy(self) -> "FeatureNet":
        return FeatureNet(self.dims, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.forward_cached(x)[0]

    def forward_cached(self, x: np.ndarray):
        """Returns (outputs, cache) with the per-layer inputs/pre-activations
        needed for the backward pass."""
        h = np.asarray(x, dtype=np.float64)
        if h.ndim == 1:
            h = h[None, :]
        if h.shape[1] != self.dims[0]:
            raise ShapeMismatchError(f"net expects input dim {self.dims[0]}, got {h.shape[1]}")
        cache = []
        last = self.n_layers - 1
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.T + b
            cache.append((h, z))
            h = np.tanh(z) if l < last else z
        return h, cache

    def backward(self, cache, upstream: np.ndarray):
        """Gradients of sum_i <upstream_i, phi(x_i)> w.r.t. every weight and
        bias; returns [(dW, db), ...] in layer order."""
        grads = [None] * self.n_layers
        delta = np.asarray(upstream, dtype=np.float64)
        last = self.n_layers - 1
        for l in range(last, -1, -1):
            h_in, z = cache[l]
            dz = delta if l == last else delta * (1.0 - np.tanh(z) ** 2)
            grads[l] = (dz.T @ h_in, dz.sum(axis=0))
            if l > 0:
                delta = dz @ self.weights[l]
        return grads


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@dataclass
class KernelParams:
    """Deep-kernel state in unconstrained coordinates."""

    net: FeatureNet
    eps_raw: float = 0.0
    log_sigma_feat: float = np.log(0.1)
    log_sigma_raw: float = np.log(100.0)

    @property
    def eps(self) -> float:
        return _sigmoid(self.eps_raw)

    @property
    def sigma_feat(self) -> float:
        return float(np.exp(self.log_sigma_feat))

    @property
    def sigma_raw(self) -> float:
        return float(np.exp(self.log_sigma_raw))

    @classmethod
    def default(
        cls,
        input_dim: int,
        rng: np.random.Generator,
        hidden=(),
        output_dim: int = 300,
        eps: float = 0.5,
        sigma_feat: float = 0.1,
        sigma_raw: float = 100.0,
    ) -> "KernelParams":
        dims = (input_dim, *hidden, output_dim)
        if not 0.0 < eps < 1.0:
            raise ConfigError("eps must lie in (0, 1)")
        eps_raw = float(np.log(eps / (1.0 - eps)))
        return cls(
            net=FeatureNet.initialize(dims, rng),
            eps_raw=eps_raw,
            log_sigma_feat=float(np.log(sigma_feat)),
            log_sigma_raw=float(np.log(sigma_raw)),
        )

    def copy(self) -> "KernelParams":
        return KernelParams(self.net.copy(), self.eps_raw, self.log_sigma_feat, self.log_sigma_raw)


@dataclass
class KernelGrads:
    """Gradient record in the unconstrained parameter space."""

    eps_raw: float
    log_sigma_feat: float
    log_sigma_raw: float
    net: list  # [(dW, db), ...]

    def __add__(self, other: "KernelGrads") -> "KernelGrads":
        net = [(dw1 + dw2, db1 + db2) for (dw1, db1), (dw2, db2) in zip(self.net, other.net)]
        return KernelGrads(
            self.eps_raw + other.eps_raw,
            self.log_sigma_feat + other.log_sigma_feat,
            self.log_sigma_raw + other.log_sigma_raw,
            net,
        )


# --- flat-vector packing (declaration order: eps, net, bandwidths) ---------


def pack_params(params: KernelParams) -> np.ndarray:
    parts = [np.array([params.eps_raw])]
    for w, b in zip(params.net.weights, params.net.biases):
        parts.append(w.reshape(-1))
        parts.append(b)
    parts.append(np.array([params.log_sigma_feat, params.log_sigma_raw]))
    return np.concatenate(parts)


def unpack_params(vec: np.ndarray, template: KernelParams) -> KernelParams:
    vec = np.asarray(vec, dtype=np.float64)
    dims = template.net.dims
    pos = 1
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(vec[pos : pos + fan_out * fan_in].reshape(fan_out, fan_in).copy())
        pos += fan_out * fan_in
        biases.append(vec[pos : pos + fan_out].copy())
        pos += fan_out
    if pos + 2 != vec.size:
        raise ShapeMismatchError("parameter vector length inconsistent with net dims")
    return KernelParams(FeatureNet(dims, weights, biases), float(vec[0]), float(vec[pos]), float(vec[pos + 1]))


def pack_grads(grads: KernelGrads) -> np.ndarray:
    parts = [np.array([grads.eps_raw])]
    for dw, db in grads.net:
        parts.append(dw.reshape(-1))
        parts.append(db)
    parts.append(np.array([grads.log_sigma_feat, grads.log_sigma_raw]))
    return np.concatenate(parts)


def net_param_mask(params: KernelParams) -> np.ndarray:
    """Boolean mask over the packed vector selecting feature-net entries
    (the only parameters weight decay applies to)."""
    n_net = sum(w.size + b.size for w, b in zip(params.net.weights, params.net.biases))
    mask = np.zeros(1 + n_net + 2, dtype=bool)
    mask[1 : 1 + n_net] = True
    return mask


# --- kernel evaluation ------------------------------------------------------


def _as_matrix(features) -> np.ndarray:
    if isinstance(features, np.ndarray) and features.ndim == 2:
        return np.asarray(features, dtype=np.float64)
    if isinstance(features, (NsgFeature, np.ndarray)):
        return stack_features([features])
    return stack_features(features)


def kernel_eval(a, b, params: KernelParams) -> float:
    """Kernel value for one pair of features (equal shapes required)."""
    av = a.flat if isinstance(a, NsgFeature) else np.asarray(a, dtype=np.float64).reshape(-1)
    bv = b.flat if isinstance(b, NsgFeature) else np.asarray(b, dtype=np.float64).reshape(-1)
    if av.shape != bv.shape:
        raise ShapeMismatchError(f"feature shapes differ: {av.shape} vs {bv.shape}")
    diff = av - bv
    raw_sq = float(diff @ diff)
    fa = params.net.forward(av[None, :])[0]
    fb = params.net.forward(bv[None, :])[0]
    fdiff = fa - fb
    feat_sq = float(fdiff @ fdiff)
    eps = params.eps
    kappa = np.exp(-feat_sq / (2.0 * params.sigma_feat**2))
    big = np.exp(-raw_sq / (2.0 * params.sigma_raw**2))
    return float((kappa + eps * (1.0 - kappa)) * big)


@dataclass
class GramContext:
    """Intermediates of one Gram evaluation, reusable for gradients with any
    upstream sensitivity matrix."""

    raw_a: np.ndarray
    raw_b: np.ndarray
    feat_a: np.ndarray
    feat_b: np.ndarray
    cache_a: list
    cache_b: list
    raw_sq: np.ndarray
    feat_sq: np.ndarray
    kappa: np.ndarray
    big: np.ndarray
    mix: np.ndarray
    gram: np.ndarray
    symmetric: bool


def gram_with_context(set_a, set_b, params: KernelParams) -> tuple[np.ndarray, GramContext]:
    """Gram matrix between two feature sets; pass set_b=None for the
    symmetric case (each unordered pair computed once, exact unit diagonal)."""
    xa = _as_matrix(set_a)
    symmetric = set_b is None
    xb = xa if symmetric else _as_matrix(set_b)
    if xa.shape[1] != xb.shape[1]:
        raise ShapeMismatchError(f"feature dims differ: {xa.shape[1]} vs {xb.shape[1]}")
    fa, cache_a = params.net.forward_cached(xa)
    if symmetric:
        fb, cache_b = fa, cache_a
        raw_sq = backend.pairwise_sqdist_self(xa)
        feat_sq = backend.pairwise_sqdist_self(fa)
    else:
        fb, cache_b = params.net.forward_cached(xb)
        raw_sq = backend.pairwise_sqdist(xa, xb)
        feat_sq = backend.pairwise_sqdist(fa, fb)
    eps = params.eps
    kappa = np.exp(-feat_sq / (2.0 * params.sigma_feat**2))
    big = np.exp(-raw_sq / (2.0 * params.sigma_raw**2))
    mix = kappa + eps * (1.0 - kappa)
    k = mix * big
    ctx = GramContext(xa, xb, fa, fb, cache_a, cache_b, raw_sq, feat_sq, kappa, big, mix, k, symmetric)
    return k, ctx


def gram(set_a, set_b, params: KernelParams) -> np.ndarray:
    """Entry (i, j) = kernel_eval(A_i, B_j). Symmetry is exploited (and exact)
    when both arguments are the same object or set_b is None."""
    if set_b is not None and set_b is not set_a:
        return gram_with_context(set_a, set_b, params)[0]
    return gram_with_context(set_a, None, params)[0]


def gradients_from_context(ctx: GramContext, upstream: np.ndarray, params: KernelParams) -> KernelGrads:
    """Exact reverse-mode gradients of sum_ij upstream_ij * K_ij."""
    u = np.asarray(upstream, dtype=np.float64)
    if u.shape != ctx.gram.shape:
        raise ShapeMismatchError(f"upstream shape {u.shape} != gram shape {ctx.gram.shape}")
    eps = params.eps
    sf2 = params.sigma_feat**2
    sr2 = params.sigma_raw**2

    s_mix = u * ctx.big
    d_eps = float((s_mix * (1.0 - ctx.kappa)).sum())
    d_eps_raw = d_eps * eps * (1.0 - eps)

    d_kappa = s_mix * (1.0 - eps)
    d_log_sf = float((d_kappa * ctx.kappa * ctx.feat_sq).sum()) / sf2
    d_log_sr = float((u * ctx.mix * ctx.big * ctx.raw_sq).sum()) / sr2

    # dL/d feat_sq, then chain into the two feature stacks
    a_mat = d_kappa * ctx.kappa * (-0.5 / sf2)
    ga = 2.0 * (a_mat.sum(axis=1)[:, None] * ctx.feat_a - a_mat @ ctx.feat_b)
    gb = 2.0 * (a_mat.sum(axis=0)[:, None] * ctx.feat_b - a_mat.T @ ctx.feat_a)
    if ctx.symmetric:
        net_grads = params.net.backward(ctx.cache_a, ga + gb)
    else:
        net_a = params.net.backward(ctx.cache_a, ga)
        net_b = params.net.backward(ctx.cache_b, gb)
        net_grads = [(dwa + dwb, dba + dbb) for (dwa, dba), (dwb, dbb) in zip(net_a, net_b)]
    return KernelGrads(d_eps_raw, d_log_sf, d_log_sr, net_grads)


def kernel_gradients(set_a, set_b, params: KernelParams, upstream: np.ndarray) -> KernelGrads:
    """Gradients of sum_ij upstream_ij * k(A_i, B_j) over all parameters."""
    _, ctx = gram_with_context(set_a, set_b, params)
    return gradients_from_context(ctx, upstream, params)


# --- cached cross-kernel (detector hot path) --------------------------------


@dataclass
class ReferenceKernelCache:
    """Frozen reference-side quantities: raw feature stack, net outputs and
    the mean of the reference Gram matrix."""

    raw: np.ndarray
    feat: np.ndarray
    gram_mean: float

    @classmethod
    def build(cls, reference, params: KernelParams) -> "ReferenceKernelCache":
        raw = _as_matrix(reference)
        k, ctx = gram_with_context(raw, None, params)
        return cls(raw, ctx.feat_a, float(k.mean()))

    def cross_rows(self, tests, params: KernelParams) -> np.ndarray:
        """Kernel values k(ref_i, test_j) as an (n_ref, n_test) matrix; only
        the test side goes through the net."""
        xt = _as_matrix(tests)
        if xt.shape[1] != self.raw.shape[1]:
            raise ShapeMismatchError(
                f"test feature dim {xt.shape[1]} != reference dim {self.raw.shape[1]}"
            )
        ft = params.net.forward(xt)
        raw_sq = backend.pairwise_sqdist(self.raw, xt)
        feat_sq = backend.pairwise_sqdist(self.feat, ft)
        eps = params.eps
        kappa = np.exp(-feat_sq / (2.0 * params.sigma_feat**2))
        big = np.exp(-raw_sq / (2.0 * params.sigma_raw**2))
        return (kappa + eps * (1.0 - kappa)) * big


# --- checkpoint i/o ---------------------------------------------------------


def save_checkpoint(path, params: KernelParams) -> None:
    dims = params.net.dims
    header = CHECKPOINT_MAGIC + struct.pack("<II", CHECKPOINT_VERSION, len(dims))
    header += struct.pack(f"<{len(dims)}I", *dims)
    payload = pack_params(params).astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_checkpoint(path) -> KernelParams:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[:4] != CHECKPOINT_MAGIC:
        raise TensorFormatError(f"{path}: not a kernel checkpoint")
    version, n_dims = struct.unpack_from("<II", raw, 4)
    if version != CHECKPOINT_VERSION:
        raise TensorFormatError(f"{path}: unsupported checkpoint version {version}")
    dims = struct.unpack_from(f"<{n_dims}I", raw, 12)
    values = np.frombuffer(raw[12 + 4 * n_dims :], dtype="<f8")
    n_net = sum(o * i + o for i, o in zip(dims[:-1], dims[1:]))
    if values.size != 1 + n_net + 2:
        raise TensorFormatError(f"{path}: payload length inconsistent with dims {dims}")
    rng = np.random.default_rng(0)  # placeholder weights, immediately overwritten
    template = KernelParams(FeatureNet.initialize(dims, rng))
    return unpack_params(values, template)
