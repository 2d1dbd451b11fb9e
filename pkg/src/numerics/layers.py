from __future__ import annotations

import numpy as np

LN_EPS = 1e-5


def crelu(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.concatenate([np.maximum(x, 0.0), np.maximum(-x, 0.0)], axis=-1)


def crelu_backward(x: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    d = x.shape[-1]
    return grad_out[..., :d] * (x > 0.0) - grad_out[..., d:] * (x < 0.0)


def layer_norm(
    x: np.ndarray,
    gain: np.ndarray,
    shift: np.ndarray,
    eps: float = LN_EPS,
) -> np.ndarray:
    out, _, _ = layer_norm_forward(x, gain, shift, eps)
    return out


def layer_norm_forward(
    x: np.ndarray,
    gain: np.ndarray,
    shift: np.ndarray,
    eps: float = LN_EPS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalize over the last axis with population variance.

    Returns (output, normalized input, 1/std) so the backward pass can reuse them.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < 2:
        raise ValueError(f"layer_norm needs >= 2 features, got shape {x.shape}")
    mean = x.mean(axis=-1, keepdims=True)
    centered = x - mean
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv_std
    return gain * xhat + shift, xhat, inv_std


def layer_norm_backward(
    xhat: np.ndarray,
    inv_std: np.ndarray,
    gain: np.ndarray,
    grad_out: np.ndarray,
    stack_dims: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (grad_x, grad_gain, grad_shift); parameter grads are summed over rows.

    The first `stack_dims` axes index independent networks and are kept in the parameter grads.
    """
    reduce_axes = tuple(range(stack_dims, grad_out.ndim - 1))
    grad_gain = (grad_out * xhat).sum(axis=reduce_axes)
    grad_shift = grad_out.sum(axis=reduce_axes)
    g = grad_out * gain
    grad_x = inv_std * (
        g - g.mean(axis=-1, keepdims=True) - xhat * (g * xhat).mean(axis=-1, keepdims=True)
    )
    return grad_x, grad_gain, grad_shift
