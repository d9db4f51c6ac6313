"""Gaussian linear structural-equation models on DAGs.

Each vertex is a linear function of its parents plus independent
Gaussian noise: X_k = sum_j a_jk X_j + eps_k with eps_k ~ N(0, sigma_k^2).
Collecting the weights in a matrix A (A[j, k] = a_jk) and the noise
variances in D gives

    Sigma = (I - A)^-T D (I - A)^-1        K = (I - A) D^-1 (I - A)^T

whenever the labels are ordered so that A is strictly upper triangular;
for other labelings the same identities hold after permuting into a
topological order, and the functions here do that internally.

The random generators reproduce a simple benchmark family: each pair
j < k receives an edge independently with probability
expected_nbhd / (p - 1), weights are uniform on [-1, -0.25] u [0.25, 1],
and noise variances default to one. All randomness flows through an
explicit numpy Generator handle, so callers control the streams; draws
use the generator's native uniform and standard_normal transforms
(documented so a reimplementation can match distributions, though not
bit patterns).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import solve_triangular

from .graph import Dag, consistent_order
from .oracle import CovarianceMatrix

__all__ = [
    "GenConfig",
    "LinearSem",
    "random_dag",
    "random_weights",
    "random_sem",
    "covariance_of",
    "precision_of",
    "sample",
    "sem_to_json",
    "sem_from_json",
    "save_sem",
    "load_sem",
]

WEIGHT_LO = 0.25
WEIGHT_HI = 1.0


@dataclass(frozen=True)
class GenConfig:
    """Parameters of the random model family.

    expected_nbhd is the expected undirected degree of a vertex; the
    pairwise edge probability is expected_nbhd / (p - 1). n is the
    default sample count drawn per experiment trial.
    """

    p: int
    expected_nbhd: float
    seed: int = 0
    n: int = 1000

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"need at least two vertices, got p={self.p}")
        if not 0 < self.expected_nbhd <= self.p - 1:
            raise ValueError(
                f"expected_nbhd must lie in (0, p-1] = (0, {self.p - 1}], "
                f"got {self.expected_nbhd}"
            )
        if self.n < 1:
            raise ValueError(f"sample count must be positive, got {self.n}")

    @property
    def edge_probability(self) -> float:
        return self.expected_nbhd / (self.p - 1)


@dataclass(frozen=True, eq=True)
class LinearSem:
    """A DAG with edge weights and per-vertex noise variances.

    Weight magnitudes are confined to [0.25, 1] (the benchmark family's
    support, keeping effects bounded away from zero) and keys must match
    the edge set exactly. Instances are value objects; never hash them.
    """

    dag: Dag
    weights: dict
    noise_vars: tuple = ()

    __hash__ = None

    def __post_init__(self):
        weights = {(int(j), int(k)): float(w) for (j, k), w in self.weights.items()}
        if set(weights) != set(self.dag.edges):
            raise ValueError("weight keys must be exactly the edge set")
        for edge, w in weights.items():
            if not WEIGHT_LO - 1e-12 <= abs(w) <= WEIGHT_HI + 1e-12:
                raise ValueError(
                    f"weight {w} on edge {edge} outside magnitude range "
                    f"[{WEIGHT_LO}, {WEIGHT_HI}]"
                )
        noise = self.noise_vars if len(self.noise_vars) else (1.0,) * self.dag.p
        noise = tuple(float(v) for v in noise)
        if len(noise) != self.dag.p:
            raise ValueError(
                f"need {self.dag.p} noise variances, got {len(noise)}"
            )
        if any(v <= 0 for v in noise):
            raise ValueError("noise variances must be positive")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "noise_vars", noise)

    @property
    def p(self) -> int:
        return self.dag.p

    def weight_matrix(self) -> np.ndarray:
        """Dense A with A[j, k] = a_jk, zero elsewhere."""
        a = np.zeros((self.p, self.p))
        for (j, k), w in self.weights.items():
            a[j, k] = w
        return a


def random_dag(cfg: GenConfig, rng: np.random.Generator) -> Dag:
    """Draw a DAG on the identity ordering: each pair j < k independently."""
    q = cfg.edge_probability
    edges = [(j, k) for j, k in combinations(range(cfg.p), 2) if rng.random() < q]
    return Dag(cfg.p, edges)


def random_weights(
    dag: Dag, rng: np.random.Generator, *, noise_vars=None
) -> LinearSem:
    """Assign uniform two-interval weights to ``dag``; unit noise by default.

    Each edge, visited in sorted order, draws a magnitude uniform on
    [0.25, 1] and a fair sign.
    """
    weights = {}
    for edge in sorted(dag.edges):
        mag = rng.uniform(WEIGHT_LO, WEIGHT_HI)
        sign = -1.0 if rng.random() < 0.5 else 1.0
        weights[edge] = sign * mag
    noise = () if noise_vars is None else tuple(noise_vars)
    return LinearSem(dag, weights, noise)


def random_sem(cfg: GenConfig, rng: np.random.Generator) -> LinearSem:
    """Draw a graph, then weights, off one stream."""
    return random_weights(random_dag(cfg, rng), rng)


def _topological_pieces(sem: LinearSem):
    """Permuted U = I - A (upper unitriangular) plus the matching noise."""
    order = consistent_order(sem.dag).order
    p = sem.p
    pos = {v: i for i, v in enumerate(order)}
    u = np.eye(p)
    for (j, k), w in sem.weights.items():
        u[pos[j], pos[k]] = -w
    noise = np.array([sem.noise_vars[v] for v in order])
    return order, u, noise


def covariance_of(sem: LinearSem) -> CovarianceMatrix:
    """Population covariance (I - A)^-T D (I - A)^-1 in label order."""
    order, u, noise = _topological_pieces(sem)
    p = sem.p
    b = solve_triangular(u, np.eye(p), lower=False)
    sig = b.T @ (noise[:, None] * b)
    sig = (sig + sig.T) / 2.0
    full = np.empty((p, p))
    idx = np.array(order)
    full[np.ix_(idx, idx)] = sig
    return CovarianceMatrix(full)


def precision_of(sem: LinearSem) -> CovarianceMatrix:
    """Population precision (I - A) D^-1 (I - A)^T in label order."""
    order, u, noise = _topological_pieces(sem)
    p = sem.p
    k = (u / noise[None, :]) @ u.T
    k = (k + k.T) / 2.0
    full = np.empty((p, p))
    idx = np.array(order)
    full[np.ix_(idx, idx)] = k
    return CovarianceMatrix(full)


def sample(sem: LinearSem, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` rows by ancestral simulation of the structural equations.

    Noise for all vertices is drawn first (label order), then the
    recursion X_k = sum_j a_jk X_j + eps_k is applied as one triangular
    solve in topological order. Same seed, same bytes.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    p = sem.p
    eps = rng.standard_normal((n, p)) * np.sqrt(np.asarray(sem.noise_vars))
    order, u, _ = _topological_pieces(sem)
    idx = np.array(order)
    # Rows solve x U = eps, i.e. U^T x^T = eps^T, vertex by vertex upward.
    y = solve_triangular(u, eps[:, idx].T, trans="T", lower=False)
    x = np.empty((n, p))
    x[:, idx] = y.T
    return x


def sem_to_json(sem: LinearSem) -> dict:
    """Plain-dict form: {p, edges: [[j, k, weight]...], noise_vars: [...]}."""
    return {
        "p": sem.p,
        "edges": [[j, k, sem.weights[(j, k)]] for j, k in sorted(sem.dag.edges)],
        "noise_vars": list(sem.noise_vars),
    }


def sem_from_json(doc: dict) -> LinearSem:
    """Inverse of :func:`sem_to_json`; validates through the constructors."""
    try:
        p = int(doc["p"])
        edges = [(int(j), int(k), float(w)) for j, k, w in doc["edges"]]
        noise = tuple(float(v) for v in doc.get("noise_vars", ()))
    except (KeyError, TypeError, ValueError) as err:
        raise ValueError(f"malformed model document: {err}") from None
    dag = Dag(p, [(j, k) for j, k, _ in edges])
    weights = {(j, k): w for j, k, w in edges}
    return LinearSem(dag, weights, noise)


def save_sem(sem: LinearSem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(sem_to_json(sem), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_sem(path) -> LinearSem:
    with open(path, "r", encoding="utf-8") as fh:
        return sem_from_json(json.load(fh))
