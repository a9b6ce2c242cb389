"""Tiny fully-connected scoring network with owned gradients.

Zero or one tanh hidden layer, scalar output. Trained as a Siamese pair
with a margin ranking loss: both inputs share the same parameters and the
hinge max(0, -y*(s1 - s2) + m) is minimized with Adam, weight decay, and a
cosine-decayed learning rate. Everything is plain numpy and deterministic
given a seed; the analytic gradients are checked against finite differences
in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

Params = list[list[np.ndarray]]  # [[W, b], ...] with W of shape (out, in)


def init_params(layer_sizes: list[int], rng: np.random.Generator) -> Params:
    """Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer."""
    params: Params = []
    for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = rng.uniform(-bound, bound, size=fan_out)
        params.append([w, b])
    return params


def forward(params: Params, X: np.ndarray) -> np.ndarray:
    """Scores for a batch of (already normalized) feature rows."""
    a = X
    for w, b in params[:-1]:
        a = np.tanh(a @ w.T + b)
    w, b = params[-1]
    return (a @ w.T + b).ravel()


def _forward_cached(params: Params, X: np.ndarray):
    activations = [X]
    a = X
    for w, b in params[:-1]:
        a = np.tanh(a @ w.T + b)
        activations.append(a)
    w, b = params[-1]
    return (a @ w.T + b).ravel(), activations


def _backward(params: Params, activations: list[np.ndarray], d_score: np.ndarray) -> Params:
    grads: Params = [[np.zeros_like(w), np.zeros_like(b)] for w, b in params]
    delta = d_score[:, None]  # (n, 1)
    for idx in range(len(params) - 1, -1, -1):
        a_in = activations[idx]
        grads[idx][0] += delta.T @ a_in
        grads[idx][1] += delta.sum(axis=0)
        if idx > 0:
            w = params[idx][0]
            delta = (delta @ w) * (1.0 - activations[idx] ** 2)
    return grads


def mrl_value(s1: np.ndarray, s2: np.ndarray, y: np.ndarray, margin: float) -> np.ndarray:
    return np.maximum(0.0, -y * (s1 - s2) + margin)


def mrl_loss_and_grads(
    params: Params,
    X1: np.ndarray,
    X2: np.ndarray,
    y: np.ndarray,
    margin: float,
    weight_decay: float = 0.0,
) -> tuple[float, Params]:
    """Mean margin ranking loss over the batch (plus L2 on all parameters)
    and its gradients. Both Siamese branches share ``params``; the hinge
    subgradient at the kink is 0."""
    n = X1.shape[0]
    s1, acts1 = _forward_cached(params, X1)
    s2, acts2 = _forward_cached(params, X2)
    hinge = mrl_value(s1, s2, y, margin)
    active = (hinge > 0.0).astype(np.float64)
    loss = float(hinge.mean())
    d_s1 = -y * active / n
    d_s2 = y * active / n
    grads1 = _backward(params, acts1, d_s1)
    grads2 = _backward(params, acts2, d_s2)
    grads: Params = []
    for (g1w, g1b), (g2w, g2b), (w, b) in zip(grads1, grads2, params):
        gw = g1w + g2w
        gb = g1b + g2b
        if weight_decay:
            gw = gw + weight_decay * w
            gb = gb + weight_decay * b
        grads.append([gw, gb])
    if weight_decay:
        loss += 0.5 * weight_decay * sum(
            float((w ** 2).sum() + (b ** 2).sum()) for w, b in params
        )
    return loss, grads


def pack(params: Params) -> np.ndarray:
    return np.concatenate([arr.ravel() for layer in params for arr in layer])


def unpack(vector: np.ndarray, like: Params) -> Params:
    out: Params = []
    offset = 0
    for w, b in like:
        wv = vector[offset:offset + w.size].reshape(w.shape)
        offset += w.size
        bv = vector[offset:offset + b.size].reshape(b.shape)
        offset += b.size
        out.append([wv.copy(), bv.copy()])
    return out


@dataclass
class AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: Params = field(default_factory=list)
    v: Params = field(default_factory=list)

    def step(self, params: Params, grads: Params, lr: float) -> None:
        if not self.m:
            self.m = [[np.zeros_like(w), np.zeros_like(b)] for w, b in params]
            self.v = [[np.zeros_like(w), np.zeros_like(b)] for w, b in params]
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for layer, g_layer, m_layer, v_layer in zip(params, grads, self.m, self.v):
            for i in range(2):
                g = g_layer[i]
                m_layer[i] *= self.beta1
                m_layer[i] += (1.0 - self.beta1) * g
                v_layer[i] *= self.beta2
                v_layer[i] += (1.0 - self.beta2) * g * g
                update = (m_layer[i] / bc1) / (np.sqrt(v_layer[i] / bc2) + self.eps)
                layer[i] -= lr * update


def cosine_lr(base_lr: float, min_lr: float, epoch: int, total_epochs: int) -> float:
    if total_epochs <= 1:
        return base_lr
    frac = epoch / (total_epochs - 1)
    return min_lr + 0.5 * (base_lr - min_lr) * (1.0 + math.cos(math.pi * frac))


def _clone(params: Params) -> Params:
    return [[w.copy(), b.copy()] for w, b in params]


@dataclass
class TrainResult:
    params: Params
    best_epoch: int
    loss_curve: list[dict]


def train_mrl_network(
    X1: np.ndarray,
    X2: np.ndarray,
    y: np.ndarray,
    hidden_units: int,
    *,
    epochs: int = 50,
    learning_rate: float = 1e-2,
    weight_decay: float = 1e-6,
    margin: float = 0.5,
    val_fraction: float = 0.01,
    batch_size: int = 32,
    seed: int = 0,
) -> TrainResult:
    """Train on example pairs (rows of X1 should outscore rows of X2 by the
    margin when y=+1). Tracks validation loss each epoch and returns the
    parameters from the best-validation epoch."""
    n, dim = X1.shape
    rng = np.random.default_rng(seed)
    sizes = [dim, hidden_units, 1] if hidden_units > 0 else [dim, 1]
    params = init_params(sizes, rng)

    n_val = max(1, int(n * val_fraction))
    n_val = min(n_val, n - 1) if n > 1 else 0
    order = rng.permutation(n)
    val_idx, train_idx = order[:n_val], order[n_val:]
    if n_val == 0:
        val_idx = train_idx

    adam = AdamState()
    min_lr = learning_rate / 100.0
    best_params = _clone(params)
    best_val = math.inf
    best_epoch = 0
    loss_curve = []
    for epoch in range(epochs):
        lr = cosine_lr(learning_rate, min_lr, epoch, epochs)
        perm = rng.permutation(len(train_idx))
        for lo in range(0, len(perm), batch_size):
            batch = train_idx[perm[lo:lo + batch_size]]
            _, grads = mrl_loss_and_grads(
                params, X1[batch], X2[batch], y[batch], margin, weight_decay
            )
            adam.step(params, grads, lr)
        train_loss = float(mrl_value(*_scores(params, X1, X2, train_idx), y[train_idx], margin).mean())
        val_loss = float(mrl_value(*_scores(params, X1, X2, val_idx), y[val_idx], margin).mean())
        loss_curve.append({"epoch": epoch + 1, "train_loss": train_loss, "val_loss": val_loss})
        if val_loss < best_val:
            best_val = val_loss
            best_params = _clone(params)
            best_epoch = epoch + 1
    return TrainResult(params=best_params, best_epoch=best_epoch, loss_curve=loss_curve)


def _scores(params: Params, X1: np.ndarray, X2: np.ndarray, idx: np.ndarray):
    return forward(params, X1[idx]), forward(params, X2[idx])
