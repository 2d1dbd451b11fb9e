from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from src.numerics.layers import LN_EPS, crelu, crelu_backward, layer_norm_backward, layer_norm_forward


class Activation(str, Enum):
    CRELU = "crelu"
    IDENTITY = "identity"


@dataclass
class DenseLayer:
    """weight is (out, in), or (S, out, in) for S independent networks evaluated together."""

    weight: np.ndarray
    bias: np.ndarray
    ln_gain: np.ndarray
    ln_shift: np.ndarray

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        self.ln_gain = np.asarray(self.ln_gain, dtype=np.float64)
        self.ln_shift = np.asarray(self.ln_shift, dtype=np.float64)
        if self.weight.ndim not in (2, 3) or self.bias.shape != self.weight.shape[:-1]:
            raise ValueError(f"weight {self.weight.shape} and bias {self.bias.shape} disagree")
        if self.ln_gain.shape != self.bias.shape or self.ln_shift.shape != self.bias.shape:
            raise ValueError(f"layer-norm vectors must have shape {self.bias.shape}")

    @property
    def in_dim(self) -> int:
        return int(self.weight.shape[-1])

    @property
    def out_dim(self) -> int:
        return int(self.weight.shape[-2])

    @property
    def stack(self) -> int | None:
        return int(self.weight.shape[0]) if self.weight.ndim == 3 else None

    def arrays(self) -> list[np.ndarray]:
        return [self.weight, self.bias, self.ln_gain, self.ln_shift]


@dataclass
class MlpParams:
    layers: list[DenseLayer]
    activation: Activation = Activation.CRELU
    activate_output: bool = False

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("MlpParams needs at least one layer")
        self.activation = Activation(self.activation)
        stacks = {layer.stack for layer in self.layers}
        if len(stacks) != 1:
            raise ValueError(f"layers disagree on the network stack: {sorted(stacks, key=str)}")
        for i in range(1, len(self.layers)):
            expected = self._block_width(i - 1)
            if self.layers[i].in_dim != expected:
                raise ValueError(f"layer {i} expects input {expected}, has {self.layers[i].in_dim}")

    def _block_width(self, i: int) -> int:
        out = self.layers[i].out_dim
        if self._is_hidden(i) and self.activation is Activation.CRELU:
            return 2 * out
        return out

    def _is_hidden(self, i: int) -> bool:
        return i < len(self.layers) - 1 or self.activate_output

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self._block_width(len(self.layers) - 1)

    @property
    def stack(self) -> int | None:
        return self.layers[0].stack

    def arrays(self) -> list[np.ndarray]:
        return [a for layer in self.layers for a in layer.arrays()]

    def copy(self) -> "MlpParams":
        return MlpParams(
            layers=[DenseLayer(*(a.copy() for a in layer.arrays())) for layer in self.layers],
            activation=self.activation,
            activate_output=self.activate_output,
        )

    def member(self, k: int) -> "MlpParams":
        """Network k of a stack; its arrays are views, so writes reach the stack."""
        if self.stack is None:
            raise ValueError("member() needs a stacked network")
        if not 0 <= k < self.stack:
            raise IndexError(f"member {k} out of range for a stack of {self.stack}")
        return MlpParams(
            layers=[DenseLayer(*(a[k] for a in layer.arrays())) for layer in self.layers],
            activation=self.activation,
            activate_output=self.activate_output,
        )


@dataclass
class _LayerCache:
    x_in: np.ndarray
    z: np.ndarray
    xhat: np.ndarray | None = None
    inv_std: np.ndarray | None = None
    h: np.ndarray | None = None


@dataclass
class MlpCache:
    params: MlpParams
    layers: list[_LayerCache] = field(default_factory=list)
    squeeze: bool = False


def init_mlp(
    sizes: Sequence[int],
    rng: np.random.Generator,
    activation: Activation = Activation.CRELU,
    activate_output: bool = False,
    stack: int | None = None,
) -> MlpParams:
    """sizes = [in, hidden..., out]; CReLU doubles every hidden block's width.

    With `stack`, every array gets a leading axis of that length holding independent networks.
    """
    if len(sizes) < 2:
        raise ValueError("need at least input and output sizes")
    if stack is not None and stack < 1:
        raise ValueError(f"stack must be >= 1, got {stack}")
    activation = Activation(activation)
    lead = () if stack is None else (int(stack),)
    widen = 2 if activation is Activation.CRELU else 1
    layers: list[DenseLayer] = []
    fan_in = int(sizes[0])
    for out in sizes[1:]:
        bound = np.sqrt(1.0 / fan_in)
        layers.append(
            DenseLayer(
                weight=rng.uniform(-bound, bound, size=(*lead, int(out), fan_in)),
                bias=rng.uniform(-bound, bound, size=(*lead, int(out))),
                ln_gain=np.ones((*lead, int(out))),
                ln_shift=np.zeros((*lead, int(out))),
            )
        )
        fan_in = widen * int(out)
    return MlpParams(layers=layers, activation=activation, activate_output=activate_output)


def _rows(v: np.ndarray, stacked: bool) -> np.ndarray:
    return v[..., None, :] if stacked else v


def mlp_forward(params: MlpParams, x: np.ndarray, eps: float = LN_EPS) -> tuple[np.ndarray, MlpCache]:
    """Input is (in,), (B, in), or (S, B, in) for one batch per stacked network.

    A stacked network maps a shared (B, in) batch to (S, B, out).
    """
    x = np.asarray(x, dtype=np.float64)
    stacked = params.stack is not None
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    if x.shape[-1] != params.in_dim:
        raise ValueError(f"input dim {x.shape[-1]} does not match network input {params.in_dim}")
    if x.ndim == 3 and (not stacked or x.shape[0] != params.stack):
        raise ValueError(f"per-network input {x.shape} needs a stack of {x.shape[0]}, network has {params.stack}")
    if x.ndim > 3:
        raise ValueError(f"input must have at most 3 axes, got {x.shape}")
    cache = MlpCache(params=params, squeeze=squeeze)
    for i, layer in enumerate(params.layers):
        z = x @ np.swapaxes(layer.weight, -1, -2) + _rows(layer.bias, stacked)
        entry = _LayerCache(x_in=x, z=z)
        if params._is_hidden(i):
            h, entry.xhat, entry.inv_std = layer_norm_forward(
                z, _rows(layer.ln_gain, stacked), _rows(layer.ln_shift, stacked), eps
            )
            entry.h = h
            x = crelu(h) if params.activation is Activation.CRELU else h
        else:
            x = z
        cache.layers.append(entry)
    return (x[..., 0, :] if squeeze else x), cache


def mlp_backward(
    cache: MlpCache,
    grad_output: np.ndarray,
    param_grads: bool = True,
) -> tuple[MlpParams | None, np.ndarray]:
    """Returns (parameter grads, input grad). Stacked networks give a per-network input grad.

    param_grads=False skips the weight and bias products and returns None for the parameters.
    """
    params = cache.params
    stacked = params.stack is not None
    g = np.asarray(grad_output, dtype=np.float64)
    out_shape = cache.layers[-1].z.shape[:-1] + (params.out_dim,) if cache.layers else ()
    if cache.squeeze and g.ndim == len(out_shape) - 1:
        g = g[..., None, :]
    if len(cache.layers) != len(params.layers) or g.shape != out_shape:
        raise ValueError(f"stale cache: grad shape {g.shape} vs expected {out_shape}")

    grads: list[DenseLayer] = [None] * len(params.layers)  # type: ignore[list-item]
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        entry = cache.layers[i]
        if params._is_hidden(i):
            g_h = crelu_backward(entry.h, g) if params.activation is Activation.CRELU else g
            g_z, g_gain, g_shift = layer_norm_backward(
                entry.xhat, entry.inv_std, _rows(layer.ln_gain, stacked), g_h, stack_dims=int(stacked)
            )
        else:
            g_z = g
            g_gain = np.zeros_like(layer.ln_gain)
            g_shift = np.zeros_like(layer.ln_shift)
        if param_grads:
            grads[i] = DenseLayer(
                weight=np.swapaxes(g_z, -1, -2) @ entry.x_in,
                bias=g_z.sum(axis=-2),
                ln_gain=g_gain,
                ln_shift=g_shift,
            )
        g = g_z @ layer.weight

    grad_in = g[..., 0, :] if cache.squeeze else g
    if not param_grads:
        return None, grad_in
    out = MlpParams(layers=grads, activation=params.activation, activate_output=params.activate_output)
    return out, grad_in


def params_digest(arrays: Sequence[np.ndarray]) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()
