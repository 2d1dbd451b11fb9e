from src.numerics.layers import LN_EPS, crelu, layer_norm
from src.numerics.mlp import Activation, DenseLayer, MlpParams, init_mlp, mlp_backward, mlp_forward
from src.numerics.optim import AdamState, adam_step, polyak_update

__all__ = [
    "LN_EPS",
    "Activation",
    "AdamState",
    "DenseLayer",
    "MlpParams",
    "adam_step",
    "crelu",
    "init_mlp",
    "layer_norm",
    "mlp_backward",
    "mlp_forward",
    "polyak_update",
]
