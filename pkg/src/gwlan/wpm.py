"""Word prediction model: dual-encoder transformer over source + context.

The source sentence runs through a standard bidirectional encoder. The
translation context runs through a cross-lingual encoder whose input is
`cl ++ [MASK] ++ cr` with consecutive positions 0..n-1; every layer applies
full (non-causal) self-attention over that window, then cross-attention
into the source memory, then a feed-forward block, each as a pre-norm
residual sublayer with a final LayerNorm after the stack. The distribution
over target words is softmax(W h + b) where h is the final hidden row at
the mask slot (index |cl|).

All parameters live in one name->float64-array dict; `loss_and_gradients`
returns the mean batch NLL together with an exact gradient for every
parameter, computed by the hand-written backward passes in `nn`.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import nn
from .corpus import MASK_ID, UNK_ID
from .errors import BatchError, ConfigError, SequenceTooLongError

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class WpmConfig:
    src_vocab_size: int
    tgt_vocab_size: int
    d_model: int = 64
    n_heads: int = 4
    d_ff: int = 256
    enc_layers: int = 2
    xenc_layers: int = 2
    max_positions: int = 64
    dropout_rate: float = 0.1

    def validate(self) -> None:
        if self.d_model % self.n_heads != 0:
            raise ConfigError("d_model must be divisible by n_heads")
        if min(self.src_vocab_size, self.tgt_vocab_size) < 4:
            raise ConfigError("vocabularies must hold the reserved ids plus a word")
        if self.max_positions < 1 or not (0.0 <= self.dropout_rate < 1.0):
            raise ConfigError("bad max_positions or dropout_rate")


# ---------------------------------------------------------------------------
# parameters


def _attention_block(params: Params, prefix: str, d: int, mat) -> None:
    for name in ("wq", "wk", "wv", "wo"):
        params[f"{prefix}.{name}"] = mat((d, d))
    for name in ("bq", "bk", "bv", "bo"):
        params[f"{prefix}.{name}"] = np.zeros(d)


def _norm_block(params: Params, prefix: str, d: int) -> None:
    params[f"{prefix}.g"] = np.ones(d)
    params[f"{prefix}.b"] = np.zeros(d)


def init_params(cfg: WpmConfig, seed: int) -> Params:
    """Fresh parameters; weights uniform with variance 1/d_model."""
    cfg.validate()
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xC0DE)))
    d, f = cfg.d_model, cfg.d_ff
    bound = np.sqrt(3.0 / d)

    def mat(shape):
        return rng.uniform(-bound, bound, shape)

    params: Params = {}
    params["src_emb"] = mat((cfg.src_vocab_size, d))
    params["tgt_emb"] = mat((cfg.tgt_vocab_size, d))
    params["pos_emb"] = mat((cfg.max_positions, d))
    for i in range(cfg.enc_layers):
        pfx = f"enc{i}"
        _norm_block(params, f"{pfx}.ln1", d)
        _attention_block(params, f"{pfx}.attn", d, mat)
        _norm_block(params, f"{pfx}.ln2", d)
        params[f"{pfx}.ffn.w1"] = mat((d, f))
        params[f"{pfx}.ffn.b1"] = np.zeros(f)
        params[f"{pfx}.ffn.w2"] = mat((f, d))
        params[f"{pfx}.ffn.b2"] = np.zeros(d)
    _norm_block(params, "enc.lnf", d)
    for i in range(cfg.xenc_layers):
        pfx = f"xenc{i}"
        _norm_block(params, f"{pfx}.ln1", d)
        _attention_block(params, f"{pfx}.self", d, mat)
        _norm_block(params, f"{pfx}.ln2", d)
        _attention_block(params, f"{pfx}.cross", d, mat)
        _norm_block(params, f"{pfx}.ln3", d)
        params[f"{pfx}.ffn.w1"] = mat((d, f))
        params[f"{pfx}.ffn.b1"] = np.zeros(f)
        params[f"{pfx}.ffn.w2"] = mat((f, d))
        params[f"{pfx}.ffn.b2"] = np.zeros(d)
    _norm_block(params, "xenc.lnf", d)
    params["out.w"] = mat((d, cfg.tgt_vocab_size))
    params["out.b"] = np.zeros(cfg.tgt_vocab_size)
    return params


# ---------------------------------------------------------------------------
# layers


def _encoder_layer_fwd(params, pfx, x, n_heads, rate, rng):
    nx, c_ln1 = nn.layer_norm_fwd(x, params[f"{pfx}.ln1.g"], params[f"{pfx}.ln1.b"])
    a, c_att = nn.attention_fwd(params, f"{pfx}.attn", nx, nx, n_heads)
    a, m1 = nn.dropout_fwd(a, rate, rng)
    x1 = x + a
    nx2, c_ln2 = nn.layer_norm_fwd(x1, params[f"{pfx}.ln2.g"], params[f"{pfx}.ln2.b"])
    f, c_ffn = nn.ffn_fwd(params, f"{pfx}.ffn", nx2)
    f, m2 = nn.dropout_fwd(f, rate, rng)
    return x1 + f, (c_ln1, c_att, m1, c_ln2, c_ffn, m2)


def _encoder_layer_bwd(dy, cache, grads, pfx):
    c_ln1, c_att, m1, c_ln2, c_ffn, m2 = cache
    df = nn.dropout_bwd(dy, m2)
    dnx2 = nn.ffn_bwd(df, c_ffn, grads, f"{pfx}.ffn")
    dx1 = dy + nn.layer_norm_bwd(dnx2, c_ln2, grads, f"{pfx}.ln2.g", f"{pfx}.ln2.b")
    da = nn.dropout_bwd(dx1, m1)
    dq, dkv = nn.attention_bwd(da, c_att, grads, f"{pfx}.attn")
    return dx1 + nn.layer_norm_bwd(dq + dkv, c_ln1, grads, f"{pfx}.ln1.g", f"{pfx}.ln1.b")


def _xenc_layer_fwd(params, pfx, x, memory, n_heads, rate, rng):
    nx, c_ln1 = nn.layer_norm_fwd(x, params[f"{pfx}.ln1.g"], params[f"{pfx}.ln1.b"])
    a, c_self = nn.attention_fwd(params, f"{pfx}.self", nx, nx, n_heads)
    a, m1 = nn.dropout_fwd(a, rate, rng)
    x1 = x + a
    nc, c_ln2 = nn.layer_norm_fwd(x1, params[f"{pfx}.ln2.g"], params[f"{pfx}.ln2.b"])
    c, c_cross = nn.attention_fwd(params, f"{pfx}.cross", nc, memory, n_heads)
    c, m2 = nn.dropout_fwd(c, rate, rng)
    x2 = x1 + c
    nf, c_ln3 = nn.layer_norm_fwd(x2, params[f"{pfx}.ln3.g"], params[f"{pfx}.ln3.b"])
    f, c_ffn = nn.ffn_fwd(params, f"{pfx}.ffn", nf)
    f, m3 = nn.dropout_fwd(f, rate, rng)
    return x2 + f, (c_ln1, c_self, m1, c_ln2, c_cross, m2, c_ln3, c_ffn, m3)


def _xenc_layer_bwd(dy, cache, grads, pfx):
    c_ln1, c_self, m1, c_ln2, c_cross, m2, c_ln3, c_ffn, m3 = cache
    df = nn.dropout_bwd(dy, m3)
    dnf = nn.ffn_bwd(df, c_ffn, grads, f"{pfx}.ffn")
    dx2 = dy + nn.layer_norm_bwd(dnf, c_ln3, grads, f"{pfx}.ln3.g", f"{pfx}.ln3.b")
    dc = nn.dropout_bwd(dx2, m2)
    dnc, dmem = nn.attention_bwd(dc, c_cross, grads, f"{pfx}.cross")
    dx1 = dx2 + nn.layer_norm_bwd(dnc, c_ln2, grads, f"{pfx}.ln2.g", f"{pfx}.ln2.b")
    da = nn.dropout_bwd(dx1, m1)
    dq, dkv = nn.attention_bwd(da, c_self, grads, f"{pfx}.self")
    dx = dx1 + nn.layer_norm_bwd(dq + dkv, c_ln1, grads, f"{pfx}.ln1.g", f"{pfx}.ln1.b")
    return dx, dmem


def _scatter_rows(grads, name, full_shape, ids, d_rows):
    if name not in grads:
        grads[name] = np.zeros(full_shape)
    np.add.at(grads[name], ids, d_rows)


def _pos_grad(grads, pos_table, n, d_rows):
    if "pos_emb" not in grads:
        grads["pos_emb"] = np.zeros(pos_table.shape)
    grads["pos_emb"][:n] += d_rows.reshape(-1, n, d_rows.shape[-1]).sum(axis=0)


# ---------------------------------------------------------------------------
# model forward/backward over a same-shape group


def _source_memory(params, cfg, x_ids, rate=0.0, rng=None):
    """x_ids: (B, m) int array -> memory (B, m, d) plus backward cache."""
    m = x_ids.shape[1]
    h = params["src_emb"][x_ids] + params["pos_emb"][:m]
    caches = []
    for i in range(cfg.enc_layers):
        h, c = _encoder_layer_fwd(params, f"enc{i}", h, cfg.n_heads, rate, rng)
        caches.append(c)
    memory, c_lnf = nn.layer_norm_fwd(h, params["enc.lnf.g"], params["enc.lnf.b"])
    return memory, (x_ids, caches, c_lnf)


def _source_memory_bwd(dmem, cache, grads, params, cfg):
    x_ids, caches, c_lnf = cache
    dh = nn.layer_norm_bwd(dmem, c_lnf, grads, "enc.lnf.g", "enc.lnf.b")
    for i in reversed(range(cfg.enc_layers)):
        dh = _encoder_layer_bwd(dh, caches[i], grads, f"enc{i}")
    _scatter_rows(grads, "src_emb", params["src_emb"].shape, x_ids, dh)
    _pos_grad(grads, params["pos_emb"], x_ids.shape[1], dh)


def _context_hidden(params, cfg, tokens, mask_slot, memory, rate=0.0, rng=None):
    """tokens: (B, n) context window ids -> h (B, d) at the mask slot."""
    n = tokens.shape[1]
    h = params["tgt_emb"][tokens] + params["pos_emb"][:n]
    caches = []
    for i in range(cfg.xenc_layers):
        h, c = _xenc_layer_fwd(params, f"xenc{i}", h, memory, cfg.n_heads, rate, rng)
        caches.append(c)
    normed, c_lnf = nn.layer_norm_fwd(h, params["xenc.lnf.g"], params["xenc.lnf.b"])
    return normed[:, mask_slot, :], (tokens, caches, c_lnf, n, mask_slot)


def _context_hidden_bwd(dh, cache, grads, params, cfg):
    """Returns the gradient flowing back into the source memory."""
    tokens, caches, c_lnf, n, mask_slot = cache
    dnormed = np.zeros((tokens.shape[0], n, cfg.d_model))
    dnormed[:, mask_slot, :] = dh
    dseq = nn.layer_norm_bwd(dnormed, c_lnf, grads, "xenc.lnf.g", "xenc.lnf.b")
    dmem = None
    for i in reversed(range(cfg.xenc_layers)):
        dseq, dm = _xenc_layer_bwd(dseq, caches[i], grads, f"xenc{i}")
        dmem = dm if dmem is None else dmem + dm
    _scatter_rows(grads, "tgt_emb", params["tgt_emb"].shape, tokens, dseq)
    _pos_grad(grads, params["pos_emb"], n, dseq)
    return dmem


# ---------------------------------------------------------------------------
# public single-example operations


def encode_source(x_ids: Sequence[int], params: Params, cfg: WpmConfig) -> np.ndarray:
    """Source memory (|x|, d_model) for one sentence."""
    if len(x_ids) == 0:
        raise BatchError("empty source sentence")
    if len(x_ids) > cfg.max_positions:
        raise SequenceTooLongError(f"source length {len(x_ids)} > {cfg.max_positions}")
    memory, _ = _source_memory(params, cfg, np.asarray([x_ids], dtype=np.intp))
    return memory[0]


def build_xenc_input(
    cl_ids: Sequence[int], cr_ids: Sequence[int], cfg: WpmConfig
) -> tuple[list[int], list[int], int]:
    """Context window `cl ++ [MASK] ++ cr` with consecutive positions.

    Returns (token ids, position ids, mask_slot); mask_slot == len(cl).
    """
    tokens = list(cl_ids) + [MASK_ID] + list(cr_ids)
    if len(tokens) > cfg.max_positions:
        raise SequenceTooLongError(f"context window {len(tokens)} > {cfg.max_positions}")
    return tokens, list(range(len(tokens))), len(cl_ids)


def encode_context(
    cl_ids: Sequence[int],
    cr_ids: Sequence[int],
    memory: np.ndarray,
    params: Params,
    cfg: WpmConfig,
) -> np.ndarray:
    """Hidden state (d_model,) at the mask slot, attending over `memory`."""
    tokens, _, mask_slot = build_xenc_input(cl_ids, cr_ids, cfg)
    h, _ = _context_hidden(
        params, cfg, np.asarray([tokens], dtype=np.intp), mask_slot, memory[None, :, :]
    )
    return h[0]


def predict_distribution(
    x_ids: Sequence[int],
    cl_ids: Sequence[int],
    cr_ids: Sequence[int],
    params: Params,
    cfg: WpmConfig,
) -> np.ndarray:
    """P(word | x, cl, cr): a (tgt_vocab_size,) distribution summing to 1."""
    memory = encode_source(x_ids, params, cfg)
    h = encode_context(cl_ids, cr_ids, memory, params, cfg)
    logits = h @ params["out.w"] + params["out.b"]
    return nn.softmax_last(logits)


# ---------------------------------------------------------------------------
# loss and exact gradients

Batch = list[tuple[list[int], list[int], list[int], int]]


def _log_softmax(logits):
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def loss_and_gradients(
    batch: Batch, params: Params, cfg: WpmConfig, train_rng=None
) -> tuple[float, Params]:
    """Mean negative log-likelihood over the batch plus d(loss)/d(param)
    for every parameter.

    Batch items are (x_ids, cl_ids, cr_ids, target_id). Items are grouped
    by (|x|, |cl|, |cr|) and each group runs as one stacked forward/backward
    pass; the result is independent of grouping. Dropout is active only
    when `train_rng` is given and cfg.dropout_rate > 0.
    """
    if not batch:
        raise BatchError("empty batch")
    vocab_size = cfg.tgt_vocab_size
    for _, _, _, t in batch:
        if not (0 <= t < vocab_size) or t == UNK_ID:
            raise BatchError(f"target id {t} not a known vocabulary word")

    groups: dict[tuple[int, int, int], list[int]] = {}
    for i, (x, cl, cr, _) in enumerate(batch):
        groups.setdefault((len(x), len(cl), len(cr)), []).append(i)

    rate = cfg.dropout_rate if train_rng is not None else 0.0
    grads: Params = {}
    total = 0.0
    for (_, ncl, _), idxs in groups.items():
        x_ids = np.asarray([batch[i][0] for i in idxs], dtype=np.intp)
        tokens = np.asarray(
            [batch[i][1] + [MASK_ID] + batch[i][2] for i in idxs], dtype=np.intp
        )
        targets = np.asarray([batch[i][3] for i in idxs], dtype=np.intp)
        memory, mem_cache = _source_memory(params, cfg, x_ids, rate, train_rng)
        h, ctx_cache = _context_hidden(
            params, cfg, tokens, ncl, memory, rate, train_rng
        )
        logits, c_out = nn.linear_fwd(h, params["out.w"], params["out.b"])
        logp = _log_softmax(logits)
        rows = np.arange(len(idxs))
        total -= logp[rows, targets].sum()
        dlogits = np.exp(logp)
        dlogits[rows, targets] -= 1.0
        dh = nn.linear_bwd(dlogits, c_out, grads, "out.w", "out.b")
        dmem = _context_hidden_bwd(dh, ctx_cache, grads, params, cfg)
        _source_memory_bwd(dmem, mem_cache, grads, params, cfg)

    n = len(batch)
    for name in params:
        if name in grads:
            grads[name] /= n
        else:
            grads[name] = np.zeros_like(params[name])
    return total / n, grads


# ---------------------------------------------------------------------------
# checkpoints

_CKPT_MAGIC = "gwlan-wpm-checkpoint 1"


def save_checkpoint(path, params: Params, cfg: WpmConfig) -> None:
    """Versioned binary container: ascii header with the config, then each
    tensor as a name/shape line followed by row-major little-endian float64
    bytes. Written atomically (tmp file + rename)."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write((_CKPT_MAGIC + "\n").encode())
        for f in dataclasses.fields(cfg):
            fh.write(f"{f.name} {getattr(cfg, f.name)}\n".encode())
        fh.write(f"tensors {len(params)}\n".encode())
        for name, arr in params.items():
            shape = ",".join(str(s) for s in arr.shape)
            fh.write(f"{name} {shape}\n".encode())
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    os.replace(tmp, path)


def load_checkpoint(path) -> tuple[Params, WpmConfig]:
    with open(path, "rb") as fh:
        if fh.readline().decode().strip() != _CKPT_MAGIC:
            raise ConfigError(f"{path}: not a recognized checkpoint")
        fields = {f.name: f for f in dataclasses.fields(WpmConfig)}
        kwargs = {}
        for _ in range(len(fields)):
            key, value = fh.readline().decode().split()
            kwargs[key] = float(value) if fields[key].type == "float" else int(value)
        count_key, count = fh.readline().decode().split()
        if count_key != "tensors":
            raise ConfigError(f"{path}: malformed tensor count")
        params: Params = {}
        for _ in range(int(count)):
            name, shape_text = fh.readline().decode().split()
            shape = tuple(int(s) for s in shape_text.split(","))
            n_bytes = 8 * int(np.prod(shape))
            raw = fh.read(n_bytes)
            if len(raw) != n_bytes:
                raise ConfigError(f"{path}: truncated tensor {name}")
            params[name] = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    cfg = WpmConfig(**kwargs)
    cfg.validate()
    return params, cfg
