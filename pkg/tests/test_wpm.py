import numpy as np
import pytest

from gwlan import nn
from gwlan.corpus import MASK_ID, UNK_ID
from gwlan.errors import BatchError, ConfigError, SequenceTooLongError
from gwlan.wpm import (
    WpmConfig,
    build_xenc_input,
    encode_context,
    encode_source,
    init_params,
    load_checkpoint,
    loss_and_gradients,
    predict_distribution,
    save_checkpoint,
)

TINY = WpmConfig(
    src_vocab_size=20,
    tgt_vocab_size=18,
    d_model=8,
    n_heads=2,
    d_ff=16,
    enc_layers=1,
    xenc_layers=1,
    max_positions=8,
    dropout_rate=0.1,
)


@pytest.fixture(scope="module")
def tiny_params():
    return init_params(TINY, seed=0)


class TestConfig:
    def test_head_divisibility(self):
        with pytest.raises(ConfigError):
            WpmConfig(src_vocab_size=10, tgt_vocab_size=10, d_model=10, n_heads=4).validate()

    def test_needs_room_for_reserved_ids(self):
        with pytest.raises(ConfigError):
            WpmConfig(src_vocab_size=3, tgt_vocab_size=10).validate()

    def test_dropout_range(self):
        with pytest.raises(ConfigError):
            WpmConfig(src_vocab_size=10, tgt_vocab_size=10, dropout_rate=1.0).validate()


class TestInit:
    def test_deterministic_per_seed(self):
        a = init_params(TINY, seed=3)
        b = init_params(TINY, seed=3)
        c = init_params(TINY, seed=4)
        assert set(a) == set(b) == set(c)
        for name in a:
            assert np.array_equal(a[name], b[name])
        assert any(not np.array_equal(a[n], c[n]) for n in a)

    def test_shapes_and_ranges(self, tiny_params):
        p = tiny_params
        assert p["src_emb"].shape == (20, 8)
        assert p["tgt_emb"].shape == (18, 8)
        assert p["pos_emb"].shape == (8, 8)
        assert p["enc0.attn.wq"].shape == (8, 8)
        assert p["xenc0.cross.wo"].shape == (8, 8)
        assert p["out.w"].shape == (8, 18)
        bound = np.sqrt(3.0 / 8)
        assert np.abs(p["src_emb"]).max() <= bound
        assert np.array_equal(p["enc0.ln1.g"], np.ones(8))
        assert np.array_equal(p["out.b"], np.zeros(18))


class TestContextWindow:
    def test_mask_between_spans(self):
        tokens, positions, slot = build_xenc_input([5, 6], [7], TINY)
        assert tokens == [5, 6, MASK_ID, 7]
        assert positions == [0, 1, 2, 3]
        assert slot == 2

    def test_zero_context_is_lone_mask(self):
        assert build_xenc_input([], [], TINY) == ([MASK_ID], [0], 0)

    def test_window_length_limit(self):
        with pytest.raises(SequenceTooLongError):
            build_xenc_input([4] * 5, [5] * 5, TINY)


class TestForward:
    def test_source_memory_shape(self, tiny_params):
        mem = encode_source([4, 5, 6], tiny_params, TINY)
        assert mem.shape == (3, 8)
        assert np.isfinite(mem).all()

    def test_empty_source_rejected(self, tiny_params):
        with pytest.raises(BatchError):
            encode_source([], tiny_params, TINY)

    def test_long_source_rejected(self, tiny_params):
        with pytest.raises(SequenceTooLongError):
            encode_source([4] * 9, tiny_params, TINY)

    def test_distribution_normalized(self, tiny_params):
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = rng.integers(3, 20, size=rng.integers(1, 8)).tolist()
            cl = rng.integers(3, 18, size=rng.integers(0, 3)).tolist()
            cr = rng.integers(3, 18, size=rng.integers(0, 3)).tolist()
            dist = predict_distribution(x, cl, cr, tiny_params, TINY)
            assert dist.shape == (18,)
            assert (dist > 0).all()
            assert abs(dist.sum() - 1.0) < 1e-6

    def test_source_order_matters(self, tiny_params):
        a = predict_distribution([4, 5, 6], [7], [], tiny_params, TINY)
        b = predict_distribution([6, 5, 4], [7], [], tiny_params, TINY)
        assert not np.allclose(a, b)

    def test_right_context_reaches_the_mask(self, tiny_params):
        # bidirectional self-attention: tokens after the mask slot must
        # influence the prediction
        a = predict_distribution([4, 5], [6], [7], tiny_params, TINY)
        b = predict_distribution([4, 5], [6], [8], tiny_params, TINY)
        assert not np.allclose(a, b)

    def test_zeroed_blocks_reduce_to_normed_embedding(self, tiny_params):
        # killing every residual branch (attention/ffn output projections)
        # leaves h = LayerNorm(tgt_emb[MASK] + pos_emb[0])
        p = {k: v.copy() for k, v in tiny_params.items()}
        for name in p:
            if name.endswith((".wo", ".bo", ".ffn.w2", ".ffn.b2")):
                p[name] = np.zeros_like(p[name])
        emb = p["tgt_emb"][MASK_ID] + p["pos_emb"][0]
        want, _ = nn.layer_norm_fwd(emb[None, :], p["xenc.lnf.g"], p["xenc.lnf.b"])
        mem = encode_source([4, 5, 6], p, TINY)
        h = encode_context([], [], mem, p, TINY)
        assert np.allclose(h, want[0], atol=1e-12)


class TestLoss:
    def batch(self):
        return [
            ([4, 5, 6], [7], [8, 9], 10),
            ([4, 5, 6], [7], [8, 9], 11),
            ([5, 6], [], [], 3),
        ]

    def test_empty_batch_rejected(self, tiny_params):
        with pytest.raises(BatchError):
            loss_and_gradients([], tiny_params, TINY)

    def test_unk_target_rejected(self, tiny_params):
        with pytest.raises(BatchError):
            loss_and_gradients([([4], [], [], UNK_ID)], tiny_params, TINY)
        with pytest.raises(BatchError):
            loss_and_gradients([([4], [], [], 18)], tiny_params, TINY)

    def test_gradients_cover_every_parameter(self, tiny_params):
        loss, grads = loss_and_gradients(self.batch(), tiny_params, TINY)
        assert np.isfinite(loss)
        assert set(grads) == set(tiny_params)
        for name, g in grads.items():
            assert g.shape == tiny_params[name].shape
        # vocabulary rows never touched by this batch stay at zero
        assert np.array_equal(grads["src_emb"][15], np.zeros(8))

    def test_loss_is_mean_over_examples(self, tiny_params):
        items = self.batch()
        whole, gw = loss_and_gradients(items, tiny_params, TINY)
        singles = [loss_and_gradients([it], tiny_params, TINY) for it in items]
        assert abs(whole - np.mean([s[0] for s in singles])) < 1e-12
        for name in gw:
            mean_g = np.mean([s[1][name] for s in singles], axis=0)
            assert np.allclose(gw[name], mean_g, atol=1e-12)

    def test_duplicated_example_changes_nothing(self, tiny_params):
        one, g1 = loss_and_gradients([self.batch()[0]], tiny_params, TINY)
        four, g4 = loss_and_gradients([self.batch()[0]] * 4, tiny_params, TINY)
        assert abs(one - four) < 1e-12
        for name in g1:
            assert np.allclose(g1[name], g4[name], atol=1e-12)

    def test_zero_output_head_gives_uniform_loss(self, tiny_params):
        p = {k: v.copy() for k, v in tiny_params.items()}
        p["out.w"] = np.zeros_like(p["out.w"])
        p["out.b"] = np.zeros_like(p["out.b"])
        loss, _ = loss_and_gradients(self.batch(), p, TINY)
        assert abs(loss - np.log(18)) < 1e-12

    def test_dropout_only_active_with_rng(self, tiny_params):
        items = self.batch()
        a, _ = loss_and_gradients(items, tiny_params, TINY)
        b, _ = loss_and_gradients(items, tiny_params, TINY)
        assert a == b
        c, _ = loss_and_gradients(items, tiny_params, TINY, train_rng=np.random.default_rng(0))
        assert c != a

    def test_gradients_match_finite_differences(self, tiny_params):
        items = self.batch()
        _, grads = loss_and_gradients(items, tiny_params, TINY)
        rng = np.random.default_rng(12)
        names = sorted(tiny_params)
        eps = 1e-4
        for _ in range(60):
            name = names[rng.integers(len(names))]
            arr = tiny_params[name]
            idx = tuple(rng.integers(s) for s in arr.shape)
            orig = arr[idx]
            arr[idx] = orig + eps
            lp, _ = loss_and_gradients(items, tiny_params, TINY)
            arr[idx] = orig - eps
            lm, _ = loss_and_gradients(items, tiny_params, TINY)
            arr[idx] = orig
            fd = (lp - lm) / (2 * eps)
            scale = max(abs(fd), abs(grads[name][idx]), 1e-8)
            assert abs(grads[name][idx] - fd) / scale < 1e-4, (name, idx)


class TestCheckpoint:
    def test_roundtrip_is_exact(self, tiny_params, tmp_path):
        path = tmp_path / "m.ckpt"
        save_checkpoint(path, tiny_params, TINY)
        params2, cfg2 = load_checkpoint(path)
        assert cfg2 == TINY
        assert list(params2) == list(tiny_params)
        for name in tiny_params:
            assert np.array_equal(params2[name], tiny_params[name])

    def test_bytes_deterministic(self, tiny_params, tmp_path):
        a = tmp_path / "a.ckpt"
        b = tmp_path / "b.ckpt"
        save_checkpoint(a, tiny_params, TINY)
        save_checkpoint(b, tiny_params, TINY)
        assert a.read_bytes() == b.read_bytes()

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "x.ckpt"
        path.write_bytes(b"something else entirely\n")
        with pytest.raises(ConfigError):
            load_checkpoint(path)

    def test_rejects_truncation(self, tiny_params, tmp_path):
        path = tmp_path / "m.ckpt"
        save_checkpoint(path, tiny_params, TINY)
        blob = path.read_bytes()
        path.write_bytes(blob[: len(blob) - 16])
        with pytest.raises(ConfigError):
            load_checkpoint(path)
