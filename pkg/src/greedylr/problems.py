"""Finite-sum differentiable objectives used as desk-scale training stand-ins.

Each problem is f(x) = (1/n) * sum_i f_i(x) with an oracle for per-component
loss and gradient. Quadratic sums carry their exact smoothness constant and
optimum (needed by the theory checks); the logistic problem carries an
estimated smoothness bound; the tanh MLP and Rosenbrock are the nonconvex
testbeds and carry none.

Problems are immutable after construction and deterministic in their seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

PROBLEM_KINDS = ("quadratic_sum", "logistic", "mlp", "rosenbrock")


@dataclass(frozen=True)
class Problem:
    kind: str
    dimension: int
    n_components: int
    seed: int
    L_max: float | None = None
    f_star: float | None = None
    x_star: np.ndarray | None = field(default=None, repr=False)
    init_scale: float = 1.0
    data: dict[str, Any] = field(default_factory=dict, repr=False)


def _rng(seed_seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_seq))


def _random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    # fix the sign convention so the factorization is unique
    return q * np.sign(np.diag(r))


def make_quadratic_sum(
    dimension: int,
    n_components: int,
    condition_number: float,
    seed: int,
    l_max: float = 10.0,
    b_scale: float = 1.0,
    init_scale: float = 1.0,
) -> Problem:
    """Random PSD quadratic sum: f_i(x) = 0.5 x'A_i x - b_i'x.

    Eigenvalues are drawn log-uniformly in [l_max/condition_number, l_max];
    the pooled extremes are pinned so the recorded smoothness constant equals
    l_max exactly and the pooled eigenvalue ratio equals condition_number.
    The optimum of the averaged objective is solved exactly.
    """
    if condition_number < 1:
        raise ValueError("condition_number must be >= 1")
    if dimension < 1 or n_components < 1:
        raise ValueError("dimension and n_components must be positive")
    rng = _rng(np.random.SeedSequence(seed))
    lo = l_max / condition_number
    eigs = np.exp(rng.uniform(np.log(lo), np.log(l_max), size=(n_components, dimension)))
    flat = eigs.reshape(-1)
    flat[np.argmax(flat)] = l_max
    if flat.size > 1:
        flat[np.argmin(flat)] = lo
    A = np.empty((n_components, dimension, dimension))
    for i in range(n_components):
        q = _random_orthogonal(dimension, rng)
        A[i] = (q * eigs[i]) @ q.T
        A[i] = 0.5 * (A[i] + A[i].T)  # keep exactly symmetric
    b = b_scale * rng.standard_normal((n_components, dimension))
    a_bar = A.mean(axis=0)
    b_bar = b.mean(axis=0)
    x_star = np.linalg.solve(a_bar, b_bar)
    f_star = 0.5 * x_star @ (a_bar @ x_star) - b_bar @ x_star
    return Problem(
        kind="quadratic_sum",
        dimension=dimension,
        n_components=n_components,
        seed=seed,
        L_max=float(l_max),
        f_star=float(f_star),
        x_star=x_star,
        init_scale=init_scale,
        data={"A": A, "b": b, "A_bar": a_bar, "b_bar": b_bar},
    )


def quadratic_sum_from(A: np.ndarray, b: np.ndarray, seed: int = 0) -> Problem:
    """Quadratic sum from explicit component matrices (mainly for tests)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    n, d = b.shape
    a_bar, b_bar = A.mean(axis=0), b.mean(axis=0)
    x_star = np.linalg.solve(a_bar, b_bar)
    f_star = 0.5 * x_star @ (a_bar @ x_star) - b_bar @ x_star
    l_max = max(float(np.linalg.eigvalsh(A[i]).max()) for i in range(n))
    return Problem(
        kind="quadratic_sum",
        dimension=d,
        n_components=n,
        seed=seed,
        L_max=l_max,
        f_star=float(f_star),
        x_star=x_star,
        data={"A": A, "b": b, "A_bar": a_bar, "b_bar": b_bar},
    )


def make_logistic(
    dimension: int,
    n_components: int,
    seed: int,
    margin_noise: float = 0.5,
    init_scale: float = 1.0,
) -> Problem:
    """Binary logistic regression on linearly-separable-with-noise data.

    Labels come from a random unit teacher with Gaussian margin noise, so the
    data are not perfectly separable and the optimum loss stays positive.
    The smoothness constant is the standard bound lambda_max(X'X / (4n)).
    """
    rng = _rng(np.random.SeedSequence(seed))
    X = rng.standard_normal((n_components, dimension))
    w_true = rng.standard_normal(dimension)
    w_true /= np.linalg.norm(w_true)
    margins = X @ w_true + margin_noise * rng.standard_normal(n_components)
    y = np.where(margins >= 0, 1.0, -1.0)
    l_max = float(np.linalg.eigvalsh(X.T @ X / (4.0 * n_components)).max())
    return Problem(
        kind="logistic",
        dimension=dimension,
        n_components=n_components,
        seed=seed,
        L_max=l_max,
        init_scale=init_scale,
        data={"X": X, "y": y},
    )


def make_mlp(
    input_dim: int,
    n_components: int,
    seed: int,
    width: int | None = None,
    target_noise: float = 0.05,
    init_scale: float = 0.5,
) -> Problem:
    """Two-layer tanh regression network with hand-derived backprop.

    The iterate is the flattened parameter vector (W1, b1, w2, b2). Targets
    come from a random teacher of the same shape plus fixed-magnitude
    random-sign noise, so a well-fit model pays the identical irreducible
    loss target_noise^2 / 2 on every sample. Width is capped at 32.
    """
    if width is None:
        width = min(32, max(2, 2 * input_dim))
    width = min(width, 32)
    rng = _rng(np.random.SeedSequence(seed))
    X = rng.standard_normal((n_components, input_dim))
    tW1 = rng.standard_normal((width, input_dim)) / np.sqrt(input_dim)
    tb1 = 0.1 * rng.standard_normal(width)
    tw2 = rng.standard_normal(width) / np.sqrt(width)
    tb2 = 0.1 * rng.standard_normal()
    signs = np.where(rng.uniform(size=n_components) < 0.5, -1.0, 1.0)
    y = np.tanh(X @ tW1.T + tb1) @ tw2 + tb2 + target_noise * signs
    dim = width * input_dim + width + width + 1
    return Problem(
        kind="mlp",
        dimension=dim,
        n_components=n_components,
        seed=seed,
        init_scale=init_scale,
        data={"X": X, "y": y, "width": width, "input_dim": input_dim},
    )


def make_rosenbrock(seed: int = 0, init_scale: float = 1.0) -> Problem:
    """The fixed 2-D Rosenbrock valley; a single-component problem."""
    return Problem(
        kind="rosenbrock",
        dimension=2,
        n_components=1,
        seed=seed,
        f_star=0.0,
        x_star=np.array([1.0, 1.0]),
        init_scale=init_scale,
    )


def make_problem(
    kind: str,
    dimension: int,
    n_components: int,
    condition_number: float = 10.0,
    seed: int = 0,
    **kwargs,
) -> Problem:
    """Build a problem of the given kind; see the per-kind constructors."""
    if kind == "quadratic_sum":
        return make_quadratic_sum(dimension, n_components, condition_number, seed, **kwargs)
    if kind == "logistic":
        return make_logistic(dimension, n_components, seed, **kwargs)
    if kind == "mlp":
        return make_mlp(dimension, n_components, seed, **kwargs)
    if kind == "rosenbrock":
        if dimension != 2 or n_components != 1:
            raise ValueError("rosenbrock is fixed at dimension=2, n_components=1")
        return make_rosenbrock(seed, **kwargs)
    raise ValueError(f"unknown problem kind {kind!r}")


def _unpack_mlp(problem: Problem, theta: np.ndarray):
    w, d = problem.data["width"], problem.data["input_dim"]
    off = 0
    W1 = theta[off : off + w * d].reshape(w, d)
    off += w * d
    b1 = theta[off : off + w]
    off += w
    w2 = theta[off : off + w]
    off += w
    b2 = theta[off]
    return W1, b1, w2, b2


def eval_component(problem: Problem, i: int, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact loss and gradient of component i at x (0-based index)."""
    if not (0 <= i < problem.n_components):
        raise IndexError(f"component {i} outside [0, {problem.n_components})")
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.dimension,):
        raise ValueError(f"x has shape {x.shape}, expected ({problem.dimension},)")

    if problem.kind == "quadratic_sum":
        A, b = problem.data["A"][i], problem.data["b"][i]
        Ax = A @ x
        return float(0.5 * x @ Ax - b @ x), Ax - b

    if problem.kind == "logistic":
        xi, yi = problem.data["X"][i], problem.data["y"][i]
        m = yi * (xi @ x)
        loss = float(np.logaddexp(0.0, -m))
        grad = -yi * xi / (1.0 + np.exp(m))
        return loss, grad

    if problem.kind == "mlp":
        W1, b1, w2, b2 = _unpack_mlp(problem, x)
        xi, yi = problem.data["X"][i], problem.data["y"][i]
        z1 = W1 @ xi + b1
        a1 = np.tanh(z1)
        out = w2 @ a1 + b2
        r = out - yi
        loss = float(0.5 * r * r)
        dz1 = (r * w2) * (1.0 - a1 * a1)
        grad = np.concatenate([np.outer(dz1, xi).reshape(-1), dz1, r * a1, [r]])
        return loss, grad

    # rosenbrock
    a, b_ = x[0], x[1]
    loss = float((1.0 - a) ** 2 + 100.0 * (b_ - a * a) ** 2)
    grad = np.array([-2.0 * (1.0 - a) - 400.0 * a * (b_ - a * a), 200.0 * (b_ - a * a)])
    return loss, grad


def eval_full(problem: Problem, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean loss and gradient over all components."""
    total_loss = 0.0
    total_grad = np.zeros(problem.dimension)
    for i in range(problem.n_components):
        loss, grad = eval_component(problem, i, x)
        total_loss += loss
        total_grad += grad
    n = problem.n_components
    return total_loss / n, total_grad / n
