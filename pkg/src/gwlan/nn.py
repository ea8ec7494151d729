"""Dense network primitives with hand-written backward passes.

Everything is float64 numpy. Ops take activations shaped (..., n, d) and
return (output, cache); the matching *_bwd op takes the upstream gradient
plus the cache and returns input gradients, accumulating parameter
gradients into a dict keyed like the parameter dict. Batching works over
any leading dimensions, which the model uses to run same-shape example
groups in one call.
"""

from __future__ import annotations

import numpy as np

LN_EPS = 1e-5
_GELU_C = np.sqrt(2.0 / np.pi)
_GELU_A = 0.044715


def accumulate(grads: dict, name: str, value: np.ndarray) -> None:
    if name in grads:
        grads[name] += value
    else:
        grads[name] = value.copy()


# ---------------------------------------------------------------------------
# elementwise / linear


def linear_fwd(x, w, b):
    return x @ w + b, (x, w)


def linear_bwd(dy, cache, grads, w_name, b_name):
    x, w = cache
    x2 = x.reshape(-1, x.shape[-1])
    dy2 = dy.reshape(-1, dy.shape[-1])
    accumulate(grads, w_name, x2.T @ dy2)
    accumulate(grads, b_name, dy2.sum(axis=0))
    return dy @ w.T


def gelu_fwd(x):
    u = _GELU_C * (x + _GELU_A * x**3)
    t = np.tanh(u)
    return 0.5 * x * (1.0 + t), (x, t)


def gelu_bwd(dy, cache):
    x, t = cache
    du = _GELU_C * (1.0 + 3.0 * _GELU_A * x**2)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t**2) * du)


def layer_norm_fwd(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc**2).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = xc * inv
    return g * xhat + b, (xhat, inv, g)


def layer_norm_bwd(dy, cache, grads, g_name, b_name):
    xhat, inv, g = cache
    lead = tuple(range(dy.ndim - 1))
    accumulate(grads, g_name, (dy * xhat).sum(axis=lead))
    accumulate(grads, b_name, dy.sum(axis=lead))
    dxhat = dy * g
    mean1 = dxhat.mean(axis=-1, keepdims=True)
    mean2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    return inv * (dxhat - mean1 - xhat * mean2)


def softmax_last(x):
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_bwd(dy, y):
    return y * (dy - (dy * y).sum(axis=-1, keepdims=True))


def dropout_fwd(x, rate: float, rng):
    """Inverted dropout; identity when rate is 0 or rng is None (eval)."""
    if rng is None or rate <= 0.0:
        return x, None
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return x * mask, mask


def dropout_bwd(dy, mask):
    return dy if mask is None else dy * mask


# ---------------------------------------------------------------------------
# multi-head attention


def _split_heads(x, n_heads):
    *lead, n, d = x.shape
    return x.reshape(*lead, n, n_heads, d // n_heads).swapaxes(-3, -2)


def _merge_heads(x):
    *lead, h, n, dh = x.shape
    return x.swapaxes(-3, -2).reshape(*lead, n, h * dh)


def attention_fwd(params, prefix, xq, xkv, n_heads):
    """Scaled dot-product attention; full (non-causal) over xkv.

    xq: (..., nq, d) queries come from here; xkv: (..., nk, d) keys/values.
    Same call serves self-attention (xq is xkv) and cross-attention.
    """
    q, cq = linear_fwd(xq, params[f"{prefix}.wq"], params[f"{prefix}.bq"])
    k, ck = linear_fwd(xkv, params[f"{prefix}.wk"], params[f"{prefix}.bk"])
    v, cv = linear_fwd(xkv, params[f"{prefix}.wv"], params[f"{prefix}.bv"])
    dh = xq.shape[-1] // n_heads
    qh, kh, vh = _split_heads(q, n_heads), _split_heads(k, n_heads), _split_heads(v, n_heads)
    scores = qh @ kh.swapaxes(-1, -2) / np.sqrt(dh)
    attn = softmax_last(scores)
    ctx = _merge_heads(attn @ vh)
    out, co = linear_fwd(ctx, params[f"{prefix}.wo"], params[f"{prefix}.bo"])
    cache = (cq, ck, cv, co, qh, kh, vh, attn, n_heads)
    return out, cache


def attention_bwd(dout, cache, grads, prefix):
    cq, ck, cv, co, qh, kh, vh, attn, n_heads = cache
    dh = qh.shape[-1]
    dctx = linear_bwd(dout, co, grads, f"{prefix}.wo", f"{prefix}.bo")
    dctx_h = _split_heads(dctx, n_heads)
    dattn = dctx_h @ vh.swapaxes(-1, -2)
    dvh = attn.swapaxes(-1, -2) @ dctx_h
    dscores = softmax_bwd(dattn, attn) / np.sqrt(dh)
    dqh = dscores @ kh
    dkh = dscores.swapaxes(-1, -2) @ qh
    dq, dk, dv = _merge_heads(dqh), _merge_heads(dkh), _merge_heads(dvh)
    dxq = linear_bwd(dq, cq, grads, f"{prefix}.wq", f"{prefix}.bq")
    dxkv = linear_bwd(dk, ck, grads, f"{prefix}.wk", f"{prefix}.bk")
    dxkv += linear_bwd(dv, cv, grads, f"{prefix}.wv", f"{prefix}.bv")
    return dxq, dxkv


# ---------------------------------------------------------------------------
# feed-forward


def ffn_fwd(params, prefix, x):
    h, c1 = linear_fwd(x, params[f"{prefix}.w1"], params[f"{prefix}.b1"])
    a, cg = gelu_fwd(h)
    y, c2 = linear_fwd(a, params[f"{prefix}.w2"], params[f"{prefix}.b2"])
    return y, (c1, cg, c2)


def ffn_bwd(dy, cache, grads, prefix):
    c1, cg, c2 = cache
    da = linear_bwd(dy, c2, grads, f"{prefix}.w2", f"{prefix}.b2")
    dh = gelu_bwd(da, cg)
    return linear_bwd(dh, c1, grads, f"{prefix}.w1", f"{prefix}.b1")
