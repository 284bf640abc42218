"""Graph embedding and Q-scoring, with analytic gradients.

Everything here is batched numpy; states enter as stacked arrays (B,n,n).
The embedding iterates

    mu <- relu(theta1 * deg  +  theta2 @ sum_{u in N2(v)} mu_u
                             +  theta3 @ sum_{u in N3(v)} relu(theta4 * w(v,u)))

where N2 is the partial-solution neighborhood and N3 ranges over all other
nodes (both scopes configurable).  Since latencies are non-negative,
``sum_u relu(theta4 * w(v,u))`` collapses to ``(sum_u w(v,u)) * relu(theta4)``
exactly; the per-node loop in the tests validates this identity.

The Q head concatenates [w(cur,u); theta5 @ sum_v mu_v; theta6 @ mu_cur;
theta7 @ mu_u] and applies a three-relu MLP capped by theta10.  Gradients of
the squared TD loss with respect to every block are derived by hand and
checked against central finite differences in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import EmbedParams, QModel

__all__ = [
    "StackedStates",
    "embed_batch",
    "q_batch",
    "q_all_actions",
    "loss_and_grads",
    "embed_state",
    "q_score",
]


@dataclass(eq=False)
class StackedStates:
    """A batch of episode states in array form.

    ``wn`` are the (normalized) latencies, ``adj`` the float 0/1 partial
    adjacency, ``deg`` the partial degrees, ``current`` the walk heads.
    """

    wn: np.ndarray  # (B, n, n)
    adj: np.ndarray  # (B, n, n) float64
    deg: np.ndarray  # (B, n) float64
    current: np.ndarray  # (B,) int64

    @property
    def batch(self) -> int:
        return self.wn.shape[0]

    @property
    def n(self) -> int:
        return self.wn.shape[1]


def _scope_mask(stacked: StackedStates, scope: str) -> np.ndarray:
    if scope == "partial":
        return stacked.adj
    eye = np.eye(stacked.n)[None, :, :]
    return np.ones_like(stacked.wn) - eye


@dataclass(eq=False)
class _EmbedCache:
    m2: np.ndarray  # (B,n,n)
    wsum3: np.ndarray  # (B,n) row sums of masked latencies
    lat_feat: np.ndarray  # (B,n,p) latency feature table
    mus: list  # t_embed+1 arrays (B,n,p)
    pres: list  # t_embed arrays (B,n,p)


def embed_batch(
    stacked: StackedStates, params: EmbedParams, t_embed: int,
    theta2_scope: str = "partial", theta3_scope: str = "all",
):
    """Final embeddings (B,n,p) plus the cache needed for backprop."""
    m2 = _scope_mask(stacked, theta2_scope)
    m3 = _scope_mask(stacked, theta3_scope)
    wsum3 = (m3 * stacked.wn).sum(axis=2)  # (B,n)
    lat_feat = wsum3[:, :, None] * np.maximum(params.theta4, 0.0)[None, None, :]
    base = (
        float(params.theta1) * stacked.deg[:, :, None]
        + lat_feat @ params.theta3.T
    )
    b, n = stacked.batch, stacked.n
    mu = np.zeros((b, n, params.p))
    mus = [mu]
    pres = []
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(t_embed):
            pre = base + (m2 @ mu) @ params.theta2.T
            mu = np.maximum(pre, 0.0)
            pres.append(pre)
            mus.append(mu)
    if not np.isfinite(mu).all():
        raise FloatingPointError("embedding produced non-finite values")
    return mu, _EmbedCache(m2=m2, wsum3=wsum3, lat_feat=lat_feat, mus=mus, pres=pres)


@dataclass(eq=False)
class _HeadCache:
    x: np.ndarray  # (B, 3p+1)
    h0: np.ndarray
    z1: np.ndarray
    h1: np.ndarray
    z2: np.ndarray
    h2: np.ndarray
    musum: np.ndarray  # (B,p)
    mu_cur: np.ndarray  # (B,p)
    mu_act: np.ndarray  # (B,p)
    actions: np.ndarray  # (B,)


def q_batch(stacked: StackedStates, mu: np.ndarray, actions: np.ndarray,
            params: EmbedParams):
    """Q value of one (state, action) pair per batch row, plus head cache."""
    b = stacked.batch
    rows = np.arange(b)
    musum = mu.sum(axis=1)
    mu_cur = mu[rows, stacked.current]
    mu_act = mu[rows, actions]
    w_edge = stacked.wn[rows, stacked.current, actions]
    x = np.concatenate(
        [
            w_edge[:, None],
            musum @ params.theta5.T,
            mu_cur @ params.theta6.T,
            mu_act @ params.theta7.T,
        ],
        axis=1,
    )
    h0 = np.maximum(x, 0.0)
    z1 = h0 @ params.theta8.T
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ params.theta9.T
    h2 = np.maximum(z2, 0.0)
    q = h2 @ params.theta10
    cache = _HeadCache(x, h0, z1, h1, z2, h2, musum, mu_cur, mu_act, actions)
    return q, cache


def q_all_actions(stacked: StackedStates, mu: np.ndarray, params: EmbedParams) -> np.ndarray:
    """(B, n) table of Q values for every candidate target node."""
    b, n = stacked.batch, stacked.n
    rows = np.arange(b)
    musum = mu.sum(axis=1)
    c1 = musum @ params.theta5.T  # (B,p)
    c2 = mu[rows, stacked.current] @ params.theta6.T  # (B,p)
    c3 = mu @ params.theta7.T  # (B,n,p)
    w_col = stacked.wn[rows, stacked.current]  # (B,n)
    p = params.p
    x = np.empty((b, n, 3 * p + 1))
    x[:, :, 0] = w_col
    x[:, :, 1 : p + 1] = c1[:, None, :]
    x[:, :, p + 1 : 2 * p + 1] = c2[:, None, :]
    x[:, :, 2 * p + 1 :] = c3
    h = np.maximum(x, 0.0)
    h = np.maximum(h @ params.theta8.T, 0.0)
    h = np.maximum(h @ params.theta9.T, 0.0)
    return h @ params.theta10


def loss_and_grads(
    stacked: StackedStates,
    actions: np.ndarray,
    targets: np.ndarray,
    params: EmbedParams,
    t_embed: int,
    theta2_scope: str = "partial",
    theta3_scope: str = "all",
):
    """Squared TD loss sum((y - Q)^2) and its gradient per theta block.

    ``targets`` are treated as constants (no gradient flows through y).
    """
    mu, ecache = embed_batch(stacked, params, t_embed, theta2_scope, theta3_scope)
    q, hc = q_batch(stacked, mu, actions, params)
    resid = targets - q
    loss = float(resid @ resid)

    b, n = stacked.batch, stacked.n
    rows = np.arange(b)
    grads = params.zero_grads()

    dq = -2.0 * resid  # (B,)
    grads["theta10"] += hc.h2.T @ dq
    dh2 = dq[:, None] * params.theta10[None, :]
    dz2 = dh2 * (hc.z2 > 0)
    grads["theta9"] += dz2.T @ hc.h1
    dh1 = dz2 @ params.theta9
    dz1 = dh1 * (hc.z1 > 0)
    grads["theta8"] += dz1.T @ hc.h0
    dh0 = dz1 @ params.theta8
    dx = dh0 * (hc.x > 0)

    p = params.p
    dc1 = dx[:, 1 : p + 1]
    dc2 = dx[:, p + 1 : 2 * p + 1]
    dc3 = dx[:, 2 * p + 1 :]
    grads["theta5"] += dc1.T @ hc.musum
    grads["theta6"] += dc2.T @ hc.mu_cur
    grads["theta7"] += dc3.T @ hc.mu_act

    dmu = np.broadcast_to((dc1 @ params.theta5)[:, None, :], mu.shape).copy()
    np.add.at(dmu, (rows, stacked.current), dc2 @ params.theta6)
    np.add.at(dmu, (rows, hc.actions), dc3 @ params.theta7)

    d_lat = np.zeros_like(ecache.lat_feat)
    for tau in reversed(range(t_embed)):
        dpre = dmu * (ecache.pres[tau] > 0)
        grads["theta1"] += (dpre.sum(axis=2) * stacked.deg).sum()
        s2 = ecache.m2 @ ecache.mus[tau]
        grads["theta2"] += np.einsum("bvj,bvk->jk", dpre, s2)
        grads["theta3"] += np.einsum("bvj,bvk->jk", dpre, ecache.lat_feat)
        d_lat += dpre @ params.theta3
        dmu = ecache.m2 @ (dpre @ params.theta2)  # masks are symmetric

    grads["theta4"] += np.einsum("bvk,bv->k", d_lat, ecache.wsum3) * (
        params.theta4 > 0
    )
    return loss, grads


# -- single-state conveniences matching the documented operation contracts --


def embed_state(state, model: QModel) -> np.ndarray:
    """(n, p) embedding table for one episode state."""
    from .env import stack_states

    stacked = stack_states([state])
    mu, _ = embed_batch(
        stacked, model.params, model.t_embed, model.theta2_scope, model.theta3_scope
    )
    return mu[0]


def q_score(state, action: int, mu: np.ndarray, model: QModel) -> float:
    """Score one candidate edge (state.current -> action) given embeddings."""
    from .env import stack_states

    stacked = stack_states([state])
    q, _ = q_batch(stacked, mu[None], np.array([action]), model.params)
    return float(q[0])
