"""Problem-instance generators.

Random subspace families, the two-line instance, the block-diagonal
quasi-aligned model (arbitrarily slow convergence at a finite
truncation), the slow-vector construction with its norm guarantee, and
convex combinations of projection products.  Every generator is
deterministic given its seed, so instances can be reproduced
bit-for-bit from a short description.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, NumericalContractError
from .iteration import CyclicProduct, build_cyclic
from .subspace import Subspace, orthonormalize

__all__ = [
    "two_lines",
    "random_instance",
    "BlockAlignedModel",
    "block_aligned",
    "slow_vector",
    "convex_combination",
    "InstanceSpec",
    "Instance",
]


def two_lines(theta: float):
    """Two lines in the plane at angle theta; the Friedrichs number is cos(theta)."""
    if not 0.0 < theta <= math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2]")
    m1 = orthonormalize([[1.0, 0.0]])
    m2 = orthonormalize([[math.cos(theta), math.sin(theta)]])
    return m1, m2


def random_instance(d: int, dims, seed) -> list:
    """N random subspaces of the given ranks, Gaussian bases orthonormalized."""
    dims = [int(r) for r in dims]
    if len(dims) < 2:
        raise ValueError("need at least two subspaces")
    if any(not 1 <= r <= d for r in dims):
        raise ValueError("each rank must satisfy 1 <= rank <= d")
    if all(r == d for r in dims):
        raise ValueError("all subspaces would equal the whole space; nothing to project")
    rng = np.random.default_rng(seed)
    return [orthonormalize(rng.standard_normal((d, r))) for r in dims]


@dataclass(frozen=True)
class BlockAlignedModel:
    """2x2-block model: per block, a fixed line and one at angle theta_k.

    Angles decrease, so the last block relaxes slowest and the overall
    Friedrichs number is cos(theta_K) -> 1 as the angles shrink.  T acts
    per block as cos(theta_k) u2 u1^T, giving the exact law
    T^n u1 = cos^{2n-1}(theta_k) u2; ``error_norm`` evaluates it.
    """

    angles: np.ndarray
    m1: Subspace
    m2: Subspace
    angle_rule: str | None = None

    def __post_init__(self):
        a = self.angles
        if a.ndim != 1 or len(a) < 1:
            raise ValueError("need at least one block")
        if a.min() <= 0.0 or a.max() > math.pi / 2 + 1e-15:
            raise ValueError("angles must lie in (0, pi/2]")
        if len(a) > 1 and np.max(np.diff(a)) >= 0.0:
            raise ValueError("angles must decrease")
        a.setflags(write=False)

    @property
    def k_blocks(self) -> int:
        return len(self.angles)

    @property
    def ambient_dim(self) -> int:
        return 2 * len(self.angles)

    @property
    def subspaces(self):
        return (self.m1, self.m2)

    def cyclic(self) -> CyclicProduct:
        return build_cyclic(self.subspaces)

    def m1_vector(self, coeffs) -> np.ndarray:
        """Ambient vector with block-k coefficient coeffs[k] on the M1 line."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.k_blocks,):
            raise ValueError("need one coefficient per block")
        x = np.zeros(self.ambient_dim)
        x[0::2] = coeffs
        return x

    def error_norm(self, coeffs, n: int) -> float:
        """Exact ||T^n x|| for x = m1_vector(coeffs): block factors cos^{2n-1}."""
        if n < 0:
            raise ValueError("n must be >= 0")
        coeffs = np.asarray(coeffs, dtype=float)
        if n == 0:
            return float(np.linalg.norm(coeffs))
        return float(np.linalg.norm(coeffs * np.cos(self.angles) ** (2 * n - 1)))


def block_aligned(k_blocks: int, angle_rule) -> BlockAlignedModel:
    """Assemble the block model; angle_rule is "1/k", "1/sqrt(k)" or a list."""
    if k_blocks < 1:
        raise ValueError("k_blocks must be >= 1")
    rule_name = None
    if isinstance(angle_rule, str):
        if angle_rule == "1/k":
            angles = 1.0 / np.arange(1, k_blocks + 1)
        elif angle_rule == "1/sqrt(k)":
            angles = 1.0 / np.sqrt(np.arange(1, k_blocks + 1))
        else:
            raise ValueError("angle_rule must be '1/k', '1/sqrt(k)' or a list")
        rule_name = angle_rule
    else:
        angles = np.asarray(angle_rule, dtype=float)
        if angles.shape != (k_blocks,):
            raise ValueError("custom angle list must have one angle per block")
    d = 2 * k_blocks
    b1 = np.zeros((d, k_blocks))
    b2 = np.zeros((d, k_blocks))
    for k in range(k_blocks):
        b1[2 * k, k] = 1.0
        b2[2 * k, k] = math.cos(angles[k])
        b2[2 * k + 1, k] = math.sin(angles[k])
    return BlockAlignedModel(angles=angles, m1=Subspace(basis=b1),
                             m2=Subspace(basis=b2), angle_rule=rule_name)


def _coverage_limit(theta: float, eps: float) -> float:
    """Largest n with cos^{2n-1}(theta) >= 1/(1 + eps/2); inf if no decay."""
    q = math.log1p(eps / 2.0)
    decay = -math.log(math.cos(theta)) if theta < math.pi / 2 else math.inf
    if decay == math.inf:
        return 0.0  # theta = pi/2: the block dies after one sweep
    if decay == 0.0:
        return math.inf
    return (1.0 + q / decay) / 2.0


def _theta_needed(n_end: int, eps: float) -> float:
    """Largest block angle whose coverage reaches n_end."""
    if n_end < 1:
        return math.pi / 2
    q = (1.0 / (1.0 + eps / 2.0)) ** (1.0 / (2 * n_end - 1))
    return math.acos(q)


def _rule_index(rule: str, theta: float) -> int:
    if rule == "1/k":
        return max(1, math.ceil(1.0 / theta))
    return max(1, math.ceil(1.0 / theta**2))  # 1/sqrt(k)


def slow_vector(model: BlockAlignedModel, r, horizon: int, eps: float) -> np.ndarray:
    """A vector whose iteration error dominates the target sequence r.

    Greedy construction: block coefficients a = (1 + eps/2) r_{n_start}
    on successive M1 directions, each block serving the range of sweeps
    over which its decay cos^{2n-1} stays above 1/(1 + eps/2).  Range
    boundaries are placed where r has fallen enough for the next
    coefficient to fit a geometrically shrinking share of the norm
    budget, which keeps ||x|| <= (1 + eps) r_0 by construction.
    Guarantees e_n = ||T^n x|| >= r_n for n = 0..horizon.
    """
    r = np.asarray(r, dtype=float)
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if len(r) < horizon + 1:
        raise ValueError("need a target value for every n <= horizon")
    if r[0] <= 0.0 or np.min(r[: horizon + 1]) <= 0.0:
        raise ValueError("targets must be positive")
    if horizon >= 1 and np.max(np.diff(r[: horizon + 1])) > 1e-15:
        raise ValueError("targets must be non-increasing")
    if eps <= 0.0:
        raise ValueError("eps must be positive")

    kb = model.k_blocks
    coeffs = np.zeros(kb)
    if horizon == 0:
        coeffs[0] = (1.0 + eps) * r[0]
        return model.m1_vector(coeffs)

    # the slowest block must survive the whole horizon relative to r
    if math.cos(model.angles[-1]) ** (2 * horizon) < r[horizon] / r[0]:
        _fail_capacity(model, horizon, eps)

    inflate = 1.0 + eps / 2.0
    budget = ((1.0 + eps) ** 2 - inflate**2) * r[0] ** 2
    share = budget / 2.0
    n_start = 0
    block = -1  # last block index used
    used = []
    while n_start <= horizon:
        # end of this range: where the next coefficient fits its share
        n_next = n_start + 1
        while n_next <= horizon and (inflate * r[n_next]) ** 2 > share:
            n_next += 1
        n_end = min(n_next - 1, horizon)
        theta_max = _theta_needed(n_end, eps)
        k = block + 1
        while k < kb and model.angles[k] > theta_max:
            k += 1
        if k >= kb:
            _fail_capacity(model, horizon, eps)
        coeffs[k] = inflate * r[n_start]
        used.append(k)
        block = k
        n_start = n_end + 1
        share /= 2.0

    x = model.m1_vector(coeffs)
    # self-check against the exact per-block law
    for n in range(horizon + 1):
        if model.error_norm(coeffs, n) < r[n] * (1.0 - 1e-12):
            raise NumericalContractError("constructed vector misses the target sequence")
    if np.linalg.norm(x) > (1.0 + eps) * r[0] * (1.0 + 1e-12):
        raise NumericalContractError("constructed vector exceeds the norm budget")
    return x


def _fail_capacity(model: BlockAlignedModel, horizon: int, eps: float):
    """Raise with the smallest block count that would have sufficed."""
    theta = _theta_needed(horizon, eps)
    if model.angle_rule is not None:
        k_min = _rule_index(model.angle_rule, theta)
        raise CapacityError(
            f"increase K or relax horizon (smallest sufficient K: {k_min})")
    raise CapacityError(
        f"increase K or relax horizon (need a block angle <= {theta:.6g})")


def convex_combination(products, weights) -> np.ndarray:
    """Weighted average sum w_i T_i of projection products."""
    products = list(products)
    if not products:
        raise ValueError("need at least one product")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(products),):
        raise ValueError("need one weight per product")
    if weights.min() <= 0.0:
        raise ValueError("weights must be positive")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("weights must sum to 1 within 1e-12")
    mats = [p.matrix if hasattr(p, "matrix") else np.asarray(p, dtype=np.complex128)
            for p in products]
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise ValueError("products live in different ambient dimensions")
    out = np.zeros((d, d), dtype=np.complex128)
    for w, m in zip(weights, mats):
        out += w * m
    return out


_KINDS = ("random", "two_lines", "block_aligned", "convex_combination")


@dataclass(frozen=True)
class Instance:
    """A realized instance: a subspace family and/or a dense operator."""

    spec: "InstanceSpec"
    subspaces: tuple | None
    matrix: np.ndarray | None

    def cyclic(self) -> CyclicProduct:
        if self.subspaces is None:
            raise ValueError(f"instances of kind '{self.spec.kind}' carry no subspace family")
        return build_cyclic(self.subspaces)

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return self.cyclic().matrix


@dataclass(frozen=True)
class InstanceSpec:
    """Reproducible description of an instance; realize() is deterministic."""

    kind: str
    parameters: dict
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")

    def realize(self) -> Instance:
        p = self.parameters
        if self.kind == "random":
            if self.seed is None:
                raise ValueError("random instances require a seed")
            subs = random_instance(int(p["d"]), p["dims"], self.seed)
            return Instance(spec=self, subspaces=tuple(subs), matrix=None)
        if self.kind == "two_lines":
            return Instance(spec=self, subspaces=two_lines(float(p["theta"])), matrix=None)
        if self.kind == "block_aligned":
            model = block_aligned(int(p["k_blocks"]), p["angle_rule"])
            return Instance(spec=self, subspaces=model.subspaces, matrix=None)
        comps = [c if isinstance(c, InstanceSpec) else InstanceSpec(**c)
                 for c in p["components"]]
        if any(c.kind == "convex_combination" for c in comps):
            raise ValueError("convex combinations do not nest")
        prods = [c.realize().cyclic() for c in comps]
        mat = convex_combination(prods, p["weights"])
        return Instance(spec=self, subspaces=None, matrix=mat)
