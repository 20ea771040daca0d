"""Random-forest regressor with split-point randomization and ensemble UQ.

Trees are grown on bootstrap resamples. At each node a random subset of
features is considered and, under the default "random" rule, one threshold
per candidate feature is drawn uniformly between the node's min and max
for that feature; the (feature, threshold) pair with the lowest weighted
child variance wins. Randomizing thresholds instead of optimizing them
keeps tree structure diverse away from the data, which is what makes the
ensemble disagreement a usable uncertainty signal.

The predictive distribution combines within-tree and between-tree
dispersion by the law of total variance:

    sigma^2(x) = E[sigma_tree^2(x)] + Var[mu_tree(x)]

both moments taken across trees (population form).

Trees are stored as flat arrays and the hot paths are numba-compiled;
growth and prediction are deterministic given (data, params, seed stream).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_U64 = 0xFFFFFFFFFFFFFFFF


@njit(cache=True, inline="always")
def _mix(state):
    # splitmix64: small deterministic generator independent of numpy state
    state = (state + 0x9E3779B97F4A7C15) & _U64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
    return state, z ^ (z >> 31)


@njit(cache=True, inline="always")
def _unit(state):
    state, z = _mix(state)
    return state, (z >> 11) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _build_tree(X, y, idx, max_features, min_samples_leaf, best_split, seed,
                feature, threshold, left, right, leaf_mu, leaf_var, leaf_n):
    m = idx.shape[0]
    d = X.shape[1]
    stack = np.empty((2 * m + 2, 3), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = m
    top = 1
    n_nodes = 1
    state = seed
    feats = np.arange(d)
    vals = np.empty(m)
    targ = np.empty(m)
    while top > 0:
        top -= 1
        slot = stack[top, 0]
        lo = stack[top, 1]
        hi = stack[top, 2]
        n = hi - lo
        s = 0.0
        for i in range(lo, hi):
            s += y[idx[i]]
        mu = s / n
        ss = 0.0
        for i in range(lo, hi):
            dv = y[idx[i]] - mu
            ss += dv * dv
        var = ss / n
        if n < 2 * min_samples_leaf or var <= 0.0:
            feature[slot] = -1
            leaf_mu[slot] = mu
            leaf_var[slot] = var
            leaf_n[slot] = n
            continue
        best_score = np.inf
        best_f = -1
        best_t = 0.0
        k_max = max_features if max_features < d else d
        for k in range(k_max):
            state, z = _mix(state)
            j = k + np.int64(z % np.uint64(d - k))
            tmp = feats[k]
            feats[k] = feats[j]
            feats[j] = tmp
            f = feats[k]
            vmin = np.inf
            vmax = -np.inf
            for i in range(lo, hi):
                v = X[idx[i], f]
                if v < vmin:
                    vmin = v
                if v > vmax:
                    vmax = v
            if vmin >= vmax:
                continue
            if best_split:
                for i in range(n):
                    vals[i] = X[idx[lo + i], f]
                    targ[i] = y[idx[lo + i]]
                order = np.argsort(vals[:n], kind="mergesort")
                tot_s = 0.0
                tot_ss = 0.0
                for i in range(n):
                    tv = targ[i]
                    tot_s += tv
                    tot_ss += tv * tv
                run_s = 0.0
                run_ss = 0.0
                for i in range(n - 1):
                    tv = targ[order[i]]
                    run_s += tv
                    run_ss += tv * tv
                    va = vals[order[i]]
                    vb = vals[order[i + 1]]
                    if va >= vb:
                        continue
                    nl = i + 1
                    nr = n - nl
                    if nl < min_samples_leaf or nr < min_samples_leaf:
                        continue
                    score = (run_ss - run_s * run_s / nl) + (
                        (tot_ss - run_ss)
                        - (tot_s - run_s) * (tot_s - run_s) / nr
                    )
                    if score < best_score:
                        best_score = score
                        best_f = f
                        best_t = 0.5 * (va + vb)
            else:
                state, u = _unit(state)
                t = vmin + u * (vmax - vmin)
                if t >= vmax:
                    t = vmin
                nl = 0
                sl = 0.0
                ssl = 0.0
                nr = 0
                sr = 0.0
                ssr = 0.0
                for i in range(lo, hi):
                    v = X[idx[i], f]
                    yv = y[idx[i]]
                    if v <= t:
                        nl += 1
                        sl += yv
                        ssl += yv * yv
                    else:
                        nr += 1
                        sr += yv
                        ssr += yv * yv
                if nl < min_samples_leaf or nr < min_samples_leaf:
                    continue
                score = (ssl - sl * sl / nl) + (ssr - sr * sr / nr)
                if score < best_score:
                    best_score = score
                    best_f = f
                    best_t = t
        if best_f < 0:
            feature[slot] = -1
            leaf_mu[slot] = mu
            leaf_var[slot] = var
            leaf_n[slot] = n
            continue
        i = lo
        j = hi - 1
        while i <= j:
            if X[idx[i], best_f] <= best_t:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        mid = i
        feature[slot] = best_f
        threshold[slot] = best_t
        left[slot] = n_nodes
        right[slot] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = lo
        stack[top, 2] = mid
        top += 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = mid
        stack[top, 2] = hi
        top += 1
        n_nodes += 2
    return n_nodes


@njit(cache=True)
def _fit_kernel(X, y, n_tree, max_features, min_samples_leaf, bootstrap,
                best_split, seeds):
    m = X.shape[0]
    cap = 2 * m + 1
    feature = np.empty((n_tree, cap), dtype=np.int32)
    threshold = np.zeros((n_tree, cap))
    left = np.zeros((n_tree, cap), dtype=np.int32)
    right = np.zeros((n_tree, cap), dtype=np.int32)
    leaf_mu = np.zeros((n_tree, cap))
    leaf_var = np.zeros((n_tree, cap))
    leaf_n = np.zeros((n_tree, cap), dtype=np.int32)
    idx = np.empty(m, dtype=np.int64)
    for t in range(n_tree):
        state = seeds[t]
        if bootstrap:
            for i in range(m):
                state, z = _mix(state)
                idx[i] = np.int64(z % np.uint64(m))
        else:
            for i in range(m):
                idx[i] = i
        _build_tree(X, y, idx, max_features, min_samples_leaf, best_split,
                    state, feature[t], threshold[t], left[t], right[t],
                    leaf_mu[t], leaf_var[t], leaf_n[t])
    return feature, threshold, left, right, leaf_mu, leaf_var, leaf_n


@njit(cache=True, inline="always")
def _descend(x, feature, threshold, left, right):
    node = 0
    while feature[node] >= 0:
        if x[feature[node]] <= threshold[node]:
            node = left[node]
        else:
            node = right[node]
    return node


@njit(cache=True)
def _predict_kernel(Xq, feature, threshold, left, right, leaf_mu, leaf_var):
    nq = Xq.shape[0]
    n_tree = feature.shape[0]
    mu_out = np.empty(nq)
    var_out = np.empty(nq)
    mus = np.empty(n_tree)
    for p in range(nq):
        within = 0.0
        for t in range(n_tree):
            node = _descend(Xq[p], feature[t], threshold[t], left[t],
                            right[t])
            mus[t] = leaf_mu[t, node]
            within += leaf_var[t, node]
        mbar = 0.0
        for t in range(n_tree):
            mbar += mus[t]
        mbar /= n_tree
        between = 0.0
        for t in range(n_tree):
            dv = mus[t] - mbar
            between += dv * dv
        mu_out[p] = mbar
        var_out[p] = within / n_tree + between / n_tree
    return mu_out, var_out


@njit(cache=True)
def _per_tree_kernel(Xq, feature, threshold, left, right, leaf_mu, leaf_var):
    nq = Xq.shape[0]
    n_tree = feature.shape[0]
    mu = np.empty((n_tree, nq))
    var = np.empty((n_tree, nq))
    for t in range(n_tree):
        for p in range(nq):
            node = _descend(Xq[p], feature[t], threshold[t], left[t],
                            right[t])
            mu[t, p] = leaf_mu[t, node]
            var[t, p] = leaf_var[t, node]
    return mu, var


def reduced_max_features(n_features: int) -> int:
    """Feature-subset size under dimensionality reduction: floor(log2 d),
    never below 1."""
    return max(1, int(np.log2(n_features)))


@dataclass(frozen=True)
class ForestParams:
    """Ensemble hyperparameters.

    ``max_features=None`` considers every feature at each split;
    ``feature_reduction`` overrides that with floor(log2 d). Candidate
    splits that would leave a child below ``min_samples_leaf`` are
    rejected; a leaf only undershoots that bound when its targets are
    all identical (nothing is left to split).
    """

    n_tree: int = 100
    max_features: int | None = None
    min_samples_leaf: int = 1
    bootstrap: bool = True
    split_rule: str = "random"
    feature_reduction: bool = False

    def __post_init__(self):
        if self.n_tree < 1:
            raise ValueError("n_tree must be positive")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be positive")
        if self.split_rule not in ("random", "best"):
            raise ValueError(f"unknown split rule {self.split_rule!r}")

    def effective_max_features(self, n_features: int) -> int:
        if self.feature_reduction:
            return min(n_features, reduced_max_features(n_features))
        if self.max_features is None:
            return n_features
        return min(self.max_features, n_features)


@dataclass(frozen=True)
class TreeNode:
    """Introspection view of one stored node."""

    feature: int
    threshold: float
    left: int
    right: int
    leaf_mu: float
    leaf_var: float
    leaf_n: int

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


@dataclass(frozen=True)
class Prediction:
    """Ensemble mean and predictive standard deviation per query point."""

    mu: np.ndarray
    sigma: np.ndarray

    @property
    def variance(self) -> np.ndarray:
        return self.sigma ** 2


class Forest:
    """A fitted ensemble; obtain via :func:`fit`."""

    def __init__(self, arrays, params: ForestParams, n_features: int,
                 y_range: tuple[float, float], n_samples: int):
        (self._feature, self._threshold, self._left, self._right,
         self._leaf_mu, self._leaf_var, self._leaf_n) = arrays
        self.params = params
        self.n_features = n_features
        self.y_range = y_range
        self.n_samples = n_samples

    @property
    def n_tree(self) -> int:
        return self._feature.shape[0]

    def node(self, tree: int, index: int) -> TreeNode:
        return TreeNode(
            int(self._feature[tree, index]),
            float(self._threshold[tree, index]),
            int(self._left[tree, index]),
            int(self._right[tree, index]),
            float(self._leaf_mu[tree, index]),
            float(self._leaf_var[tree, index]),
            int(self._leaf_n[tree, index]),
        )

    def _check(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"expected (n, {self.n_features}) query matrix, "
                f"got {X.shape}"
            )
        return X

    def predict(self, X: np.ndarray) -> Prediction:
        """Ensemble mean and law-of-total-variance sigma for each row of X."""
        X = self._check(X)
        mu, var = _predict_kernel(X, self._feature, self._threshold,
                                  self._left, self._right, self._leaf_mu,
                                  self._leaf_var)
        return Prediction(mu=mu, sigma=np.sqrt(var))

    def per_tree(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-tree (mu, var) matrices of shape (n_tree, n_points).

        This is the transparent path: combining these with the law of
        total variance must reproduce :meth:`predict`.
        """
        X = self._check(X)
        return _per_tree_kernel(X, self._feature, self._threshold,
                                self._left, self._right, self._leaf_mu,
                                self._leaf_var)


def fit(X: np.ndarray, y: np.ndarray, params: ForestParams,
        rng: np.random.Generator) -> Forest:
    """Grow an ensemble on (X, y). Deterministic given the rng state."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-D matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("y length must match X rows")
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty training set")
    max_features = params.effective_max_features(X.shape[1])
    seeds = rng.integers(0, 2 ** 63, size=params.n_tree, dtype=np.uint64)
    arrays = _fit_kernel(X, y, params.n_tree, max_features,
                         params.min_samples_leaf, params.bootstrap,
                         params.split_rule == "best", seeds)
    return Forest(arrays, params, X.shape[1],
                  (float(y.min()), float(y.max())), X.shape[0])
