"""
Q-Network Module

Fully connected action-value network in numpy with manual backpropagation
and the Adam optimizer.

Architecture:
- input: flattened circuit observation
- hidden: L layers of M neurons, leaky ReLU (slope 0.01)
- output: one linear Q-value per action

Layer convention: z = a_prev @ W + b, with W of shape (fan_in, fan_out).
Initialization: W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), seeded.

Loss: smooth L1 (Huber with unit threshold)
    l(x) = 0.5 x²      if |x| < 1
           |x| - 0.5   otherwise
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.grl_parameters import params
from grl_errors import ArtifactError


def smooth_l1(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    magnitude = np.abs(x)
    return np.where(magnitude < 1.0, 0.5 * x ** 2, magnitude - 0.5)


def smooth_l1_grad(x: np.ndarray) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=float), -1.0, 1.0)


def leaky_relu(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z > 0, z, slope * z)


def leaky_relu_grad(z: np.ndarray, slope: float) -> np.ndarray:
    return np.where(z > 0, 1.0, slope)


@dataclass
class QNetwork:
    """
    Attributes:
        weights: One (fan_in, fan_out) matrix per layer
        biases: One (fan_out,) vector per layer
        slope: Leaky ReLU negative slope
    """
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    slope: float = params.leaky_slope

    @classmethod
    def initialize(cls, layer_sizes: Sequence[int], rng: np.random.Generator,
                   slope: float = params.leaky_slope) -> "QNetwork":
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases, slope)

    @property
    def input_size(self) -> int:
        return self.weights[0].shape[0]

    @property
    def output_size(self) -> int:
        return self.weights[-1].shape[1]

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (self.input_size,) + tuple(w.shape[1] for w in self.weights)

    def forward_cached(self, x: np.ndarray) -> Tuple[np.ndarray, List[Tuple[np.ndarray, np.ndarray]]]:
        """Forward pass keeping (layer input, pre-activation) per layer."""
        a = np.atleast_2d(np.asarray(x, dtype=float))
        cache = []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            cache.append((a, z))
            a = z if i == last else leaky_relu(z, self.slope)
        return a, cache

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.forward_cached(x)[0]

    def backward(self, cache, d_out: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
        """
        Gradients of a scalar loss given dLoss/dOutput.

        Returns:
            (weight gradients, bias gradients), layer order
        """
        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.weights)
        delta = d_out
        for i in reversed(range(len(self.weights))):
            a_prev, z = cache[i]
            if i != len(self.weights) - 1:
                delta = delta * leaky_relu_grad(z, self.slope)
            grad_w[i] = a_prev.T @ delta
            grad_b[i] = delta.sum(axis=0)
            delta = delta @ self.weights[i].T
        return grad_w, grad_b

    def parameters(self) -> List[np.ndarray]:
        return self.weights + self.biases

    def copy(self) -> "QNetwork":
        return QNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases],
                        self.slope)

    def load_from(self, other: "QNetwork"):
        for mine, theirs in zip(self.parameters(), other.parameters()):
            mine[...] = theirs

    def same_weights(self, other: "QNetwork") -> bool:
        return all(np.array_equal(a, b) for a, b in zip(self.parameters(), other.parameters()))

    def save(self, path: str):
        arrays = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"W{i}"] = w
            arrays[f"b{i}"] = b
        np.savez(path, layer_sizes=np.array(self.layer_sizes), slope=np.array(self.slope),
                 **arrays)

    @classmethod
    def load(cls, path: str) -> "QNetwork":
        try:
            data = np.load(path)
        except (OSError, ValueError) as exc:
            raise ArtifactError(f"Cannot read network checkpoint {path}: {exc}") from exc
        layers = len(data["layer_sizes"]) - 1
        return cls([data[f"W{i}"] for i in range(layers)],
                   [data[f"b{i}"] for i in range(layers)],
                   float(data["slope"]))


class AdamOptimizer:
    """Adam with bias-corrected moment estimates, updating arrays in place."""

    def __init__(self, parameters: List[np.ndarray], learning_rate: float = params.learning_rate,
                 beta1: float = params.adam_beta1, beta2: float = params.adam_beta2,
                 eps: float = params.adam_eps):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in parameters]
        self.v = [np.zeros_like(p) for p in parameters]
        self.t = 0

    def step(self, parameters: List[np.ndarray], gradients: List[np.ndarray]):
        self.t += 1
        for p, g, m, v in zip(parameters, gradients, self.m, self.v):
            m[...] = self.beta1 * m + (1 - self.beta1) * g
            v[...] = self.beta2 * v + (1 - self.beta2) * g ** 2
            m_hat = m / (1 - self.beta1 ** self.t)
            v_hat = v / (1 - self.beta2 ** self.t)
            p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
