"""Minimal dense neural-network engine: forward, backward, losses, optimizers.

All four networks of the simulator (transaction encoder, per-bank sender and
receiver encoders, fusion head) are plain MLPs with ReLU hidden activations
and either no output activation (encoders) or a sigmoid (fusion head).

Gradient convention: ``mlp_backward`` takes the gradient of the loss with
respect to the final layer's PRE-activation values. For encoders
(output_activation="none") that is simply the output gradient; for the
sigmoid fusion head the loss functions below already return gradients in
logit space (the numerically stable sigmoid-composed form), so the two
compose directly.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError, ShapeError

# probabilities are clamped into [PROB_EPS, 1 - PROB_EPS] before any log
PROB_EPS = 1e-7


@dataclass
class LayerParams:
    """One affine layer: y = x @ weights.T + bias."""

    weights: np.ndarray  # [out_dim, in_dim]
    bias: np.ndarray  # [out_dim]


@dataclass
class MlpParams:
    """Weights of one MLP. Hidden activations are always ReLU."""

    layers: list
    output_activation: str = "none"  # "none" | "sigmoid"
    dropout_rate: float = 0.0

    @property
    def in_dim(self):
        return self.layers[0].weights.shape[1]

    @property
    def out_dim(self):
        return self.layers[-1].weights.shape[0]


@dataclass
class ForwardCache:
    """Everything mlp_backward needs to replay one forward pass exactly."""

    x: np.ndarray  # batch input
    layer_inputs: list  # input seen by each affine layer (post-dropout)
    pre_acts: list  # z of each layer
    masks: list  # dropout mask per hidden layer, or None
    training: bool = False


@dataclass
class AdamState:
    """First/second moments mirroring the parameter shapes."""

    first_moment: list  # list of LayerParams-shaped (weights, bias) pairs
    second_moment: list
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def init_mlp(layer_sizes, output_activation="none", dropout_rate=0.0, rng=None,
             dtype=np.float64):
    """He-uniform weights, zero biases, seeded through ``rng``.

    layer_sizes: [in_dim, hidden..., out_dim], at least two entries.
    """
    if len(layer_sizes) < 2:
        raise ConfigError("layer_sizes needs at least input and output dims")
    if not 0.0 <= dropout_rate < 1.0:
        raise ConfigError(f"dropout_rate must be in [0, 1), got {dropout_rate}")
    if output_activation not in ("none", "sigmoid"):
        raise ConfigError(f"unknown output_activation {output_activation!r}")
    if rng is None:
        rng = np.random.default_rng(0)
    layers = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)
        b = np.zeros(fan_out, dtype=dtype)
        layers.append(LayerParams(weights=w, bias=b))
    return MlpParams(layers=layers, output_activation=output_activation,
                     dropout_rate=dropout_rate)


def clone_params(params):
    return MlpParams(
        layers=[LayerParams(l.weights.copy(), l.bias.copy()) for l in params.layers],
        output_activation=params.output_activation,
        dropout_rate=params.dropout_rate,
    )


def layer_sizes_of(params):
    return [params.in_dim] + [l.weights.shape[0] for l in params.layers]


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def mlp_forward(params, x, training=False, rng=None):
    """Run the MLP on a [batch, in_dim] input.

    Inverted dropout is applied to hidden activations only, and only when
    training=True with dropout_rate > 0 (which then requires ``rng``).
    Returns (output, cache); the cache suffices for an exact backward pass.
    """
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError(f"input must be 2-d, got shape {x.shape}")
    if x.shape[1] != params.in_dim:
        raise ShapeError(
            f"input has {x.shape[1]} columns, first layer expects {params.in_dim}")
    if not np.isfinite(x).all():
        raise NumericError("non-finite values in network input")
    use_dropout = training and params.dropout_rate > 0.0
    if use_dropout and rng is None:
        raise ConfigError("rng required when training with dropout_rate > 0")

    keep = 1.0 - params.dropout_rate
    layer_inputs = []
    pre_acts = []
    masks = []
    a = x
    last = len(params.layers) - 1
    for i, layer in enumerate(params.layers):
        if a.shape[1] != layer.weights.shape[1]:
            raise ShapeError(
                f"layer {i} expects {layer.weights.shape[1]} inputs, got {a.shape[1]}")
        layer_inputs.append(a)
        z = a @ layer.weights.T + layer.bias
        pre_acts.append(z)
        if i < last:
            h = np.maximum(z, 0.0)
            if use_dropout:
                mask = (rng.random(h.shape) < keep).astype(h.dtype) / keep
                a = h * mask
                masks.append(mask)
            else:
                a = h
                masks.append(None)
        else:
            a = _sigmoid(z) if params.output_activation == "sigmoid" else z
    if not np.isfinite(a).all():
        raise NumericError("non-finite values in network output")
    cache = ForwardCache(x=x, layer_inputs=layer_inputs, pre_acts=pre_acts,
                         masks=masks, training=training)
    return a, cache


def mlp_backward(params, cache, output_grad):
    """Backpropagate through a cached forward pass.

    ``output_grad`` is d(loss)/d(final pre-activation), shape [batch, out_dim].
    Returns (param_grads, input_grad) where param_grads is a list of
    LayerParams with gradient arrays and input_grad has the input's shape.
    The gradients are exact for the sum-over-batch of the downstream loss;
    no extra batch scaling is applied here.
    """
    output_grad = np.asarray(output_grad)
    n_layers = len(params.layers)
    if len(cache.layer_inputs) != n_layers:
        raise ShapeError("cache does not match params (layer count differs)")
    if output_grad.shape != cache.pre_acts[-1].shape:
        raise ShapeError(
            f"output_grad shape {output_grad.shape} != forward output shape "
            f"{cache.pre_acts[-1].shape}")

    param_grads = [None] * n_layers
    delta = output_grad
    input_grad = None
    for i in range(n_layers - 1, -1, -1):
        layer = params.layers[i]
        a_in = cache.layer_inputs[i]
        if a_in.shape[1] != layer.weights.shape[1]:
            raise ShapeError("cache does not match params (layer width differs)")
        gw = delta.T @ a_in
        gb = delta.sum(axis=0)
        param_grads[i] = LayerParams(weights=gw, bias=gb)
        da = delta @ layer.weights  # grad w.r.t. this layer's input
        if i > 0:
            mask = cache.masks[i - 1]
            if mask is not None:
                da = da * mask
            delta = da * (cache.pre_acts[i - 1] > 0)
        else:
            input_grad = da
    return param_grads, input_grad


def _clamp_probs(p):
    return np.clip(np.asarray(p, dtype=np.float64), PROB_EPS, 1.0 - PROB_EPS)


def _check_lengths(probabilities, labels):
    p = np.asarray(probabilities, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if p.shape != y.shape:
        raise ShapeError(f"{p.shape[0]} probabilities vs {y.shape[0]} labels")
    return p, y


def bce_loss(probabilities, labels):
    """Mean binary cross-entropy and its gradient w.r.t. the logits.

    grad = (p - y) / n per sample, the sigmoid-composed form.
    """
    p, y = _check_lengths(probabilities, labels)
    p = _clamp_probs(p)
    n = p.shape[0]
    loss = -np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    grad = (p - y) / n
    return float(loss), grad


def focal_loss(probabilities, labels, alpha, gamma):
    """Focal loss: per-sample -alpha_t * (1 - p_t)^gamma * log(p_t).

    p_t = p for positives, 1-p for negatives; alpha weights the positive
    class and (1-alpha) the negative class. gamma=0, alpha=0.5 reduces to
    0.5 * BCE per sample. The gradient is the exact derivative through the
    sigmoid, mean-scaled like bce_loss.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    if gamma < 0.0:
        raise ConfigError(f"gamma must be >= 0, got {gamma}")
    p, y = _check_lengths(probabilities, labels)
    p = _clamp_probs(p)
    n = p.shape[0]

    pos = y == 1.0
    loss_terms = np.empty(n)
    grad = np.empty(n)
    pp = p[pos]
    loss_terms[pos] = -alpha * (1.0 - pp) ** gamma * np.log(pp)
    # d/dz of the positive term, z the logit
    grad[pos] = alpha * (1.0 - pp) ** gamma * (gamma * pp * np.log(pp) - (1.0 - pp))
    pn = p[~pos]
    loss_terms[~pos] = -(1.0 - alpha) * pn**gamma * np.log(1.0 - pn)
    grad[~pos] = (1.0 - alpha) * pn**gamma * (pn - gamma * (1.0 - pn) * np.log(1.0 - pn))

    return float(loss_terms.mean()), grad / n


def init_adam(params, beta1=0.9, beta2=0.999, epsilon=1e-8):
    zeros = lambda l: LayerParams(np.zeros_like(l.weights), np.zeros_like(l.bias))
    return AdamState(
        first_moment=[zeros(l) for l in params.layers],
        second_moment=[zeros(l) for l in params.layers],
        step_count=0, beta1=beta1, beta2=beta2, epsilon=epsilon,
    )


def _check_grad_shapes(params, grads):
    if len(grads) != len(params.layers):
        raise ShapeError("gradient layer count does not match params")
    for l, g in zip(params.layers, grads):
        if l.weights.shape != g.weights.shape or l.bias.shape != g.bias.shape:
            raise ShapeError(
                f"gradient shape {g.weights.shape} does not match parameter "
                f"shape {l.weights.shape}")


def adam_step(params, grads, state, learning_rate):
    """Standard Adam with bias correction. Pure: returns new params and state."""
    if learning_rate <= 0:
        raise ConfigError(f"learning_rate must be > 0, got {learning_rate}")
    _check_grad_shapes(params, grads)
    t = state.step_count + 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    new_layers, new_m, new_v = [], [], []
    for layer, grad, m, v in zip(params.layers, grads, state.first_moment,
                                 state.second_moment):
        mw = b1 * m.weights + (1.0 - b1) * grad.weights
        mb = b1 * m.bias + (1.0 - b1) * grad.bias
        vw = b2 * v.weights + (1.0 - b2) * grad.weights**2
        vb = b2 * v.bias + (1.0 - b2) * grad.bias**2
        w = layer.weights - learning_rate * (mw / c1) / (np.sqrt(vw / c2) + eps)
        b = layer.bias - learning_rate * (mb / c1) / (np.sqrt(vb / c2) + eps)
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise NumericError("non-finite parameters after Adam step")
        new_layers.append(LayerParams(w, b))
        new_m.append(LayerParams(mw, mb))
        new_v.append(LayerParams(vw, vb))
    new_state = AdamState(first_moment=new_m, second_moment=new_v,
                          step_count=t, beta1=b1, beta2=b2, epsilon=eps)
    new_params = MlpParams(layers=new_layers,
                           output_activation=params.output_activation,
                           dropout_rate=params.dropout_rate)
    return new_params, new_state


def sgd_step(params, grads, learning_rate):
    """Plain gradient descent step. Pure: returns new params."""
    if learning_rate <= 0:
        raise ConfigError(f"learning_rate must be > 0, got {learning_rate}")
    _check_grad_shapes(params, grads)
    new_layers = [
        LayerParams(l.weights - learning_rate * g.weights,
                    l.bias - learning_rate * g.bias)
        for l, g in zip(params.layers, grads)
    ]
    return MlpParams(layers=new_layers,
                     output_activation=params.output_activation,
                     dropout_rate=params.dropout_rate)
