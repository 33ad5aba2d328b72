import itertools
import math

import numpy as np
import pytest

from einu.emotion import (
    EmotionLabel,
    FeedbackAction,
    DEFAULT_FEEDBACK_MAP,
    arbitrate,
    behavior_for,
    feedback_for,
    feedback_map_from_config,
    feedback_map_to_config,
    AudioEmotionNet,
    VideoEmotionNet,
    TrainConfig,
    train_toy,
    make_audio_clusters,
    make_video_clusters,
)
from einu.emotion.layers import Dense, Lstm, softmax, cross_entropy, softmax_ce_backward
from einu.errors import BadFeatureDim, BadFrameDim, NoInput, NonFiniteLoss, UnknownEmotion

LABELS = list(EmotionLabel)


# ------------------------------------------------------------ arbitration

def test_ranks_are_bijection():
    assert sorted(l.rank for l in LABELS) == list(range(1, 8))


def test_arbitrate_examples():
    assert arbitrate(EmotionLabel.ANGER, EmotionLabel.HAPPINESS) is EmotionLabel.ANGER
    assert arbitrate(EmotionLabel.NEUTRAL, EmotionLabel.NEUTRAL) is EmotionLabel.NEUTRAL
    assert arbitrate(EmotionLabel.FEAR, None) is EmotionLabel.FEAR
    assert arbitrate(None, EmotionLabel.SADNESS) is EmotionLabel.SADNESS


def test_arbitrate_exhaustive_min_rank():
    for a, b in itertools.product(LABELS, LABELS):
        expect = a if a.rank <= b.rank else b
        assert arbitrate(a, b) is expect


def test_arbitrate_commutative_and_idempotent():
    for a, b in itertools.product(LABELS, LABELS):
        assert arbitrate(a, b) is arbitrate(b, a)
    for a in LABELS:
        assert arbitrate(a, a) is a


def test_arbitrate_no_input():
    with pytest.raises(NoInput):
        arbitrate(None, None)


# --------------------------------------------------------------- behavior

def test_behavior_for_all_labels():
    for label in LABELS:
        with_az = behavior_for(label, localized_azimuth=1.2)
        without = behavior_for(label, localized_azimuth=None)
        if label.rank <= 4:
            assert with_az.kind == "locomote_toward_sound"
            assert with_az.azimuth == pytest.approx(1.2)
            assert without.kind == "hold"
        else:
            assert with_az.kind == "squat"
            assert without.kind == "squat"
        assert isinstance(with_az.feedback, FeedbackAction)


def test_behavior_wraps_azimuth():
    cmd = behavior_for(EmotionLabel.ANGER, localized_azimuth=-0.5)
    assert 0 <= cmd.azimuth < 2 * math.pi
    assert cmd.azimuth == pytest.approx(2 * math.pi - 0.5)


def test_feedback_total_and_injective():
    actions = [feedback_for(label) for label in LABELS]
    assert len(set(actions)) == len(LABELS)


def test_feedback_unknown():
    with pytest.raises(UnknownEmotion):
        feedback_for("not-an-emotion")


def test_feedback_map_round_trip():
    doc = feedback_map_to_config(DEFAULT_FEEDBACK_MAP)
    assert feedback_map_from_config(doc) == DEFAULT_FEEDBACK_MAP


# ------------------------------------------------------------------ layers

def test_softmax_normalization():
    rng = np.random.default_rng(0)
    probs = softmax(rng.normal(0, 5, (50, 7)))
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(probs > 0) and np.all(probs < 1)


def test_lstm_hand_trace():
    # 2-unit layer, 2 steps, hand-fixed weights; gate-by-gate scalar trace
    lstm = Lstm(2, 2)
    lstm.params["Wx"][...] = 0.1 * np.arange(16).reshape(2, 8)
    lstm.params["Wh"][...] = 0.05 * np.arange(16).reshape(2, 8)[::-1]
    lstm.params["b"][...] = 0.01 * np.arange(8)
    x = np.array([[[0.5, -0.3], [0.2, 0.4]]])

    def sig(v):
        return 1.0 / (1.0 + math.exp(-v))

    h_prev = [0.0, 0.0]
    c_prev = [0.0, 0.0]
    wx, wh, b = lstm.params["Wx"], lstm.params["Wh"], lstm.params["b"]
    traced = []
    for t in range(2):
        a = [sum(x[0, t, j] * wx[j, k] for j in range(2))
             + sum(h_prev[j] * wh[j, k] for j in range(2)) + b[k]
             for k in range(8)]
        i = [sig(a[0]), sig(a[1])]
        f = [sig(a[2]), sig(a[3])]
        g = [math.tanh(a[4]), math.tanh(a[5])]
        o = [sig(a[6]), sig(a[7])]
        c = [f[k] * c_prev[k] + i[k] * g[k] for k in range(2)]
        h = [o[k] * math.tanh(c[k]) for k in range(2)]
        traced.append(h)
        h_prev, c_prev = h, c

    hs = lstm.forward(x)
    np.testing.assert_allclose(hs[0], np.array(traced), atol=1e-10)


def central_diff_check(loss_fn, named_params, rel_tol=1e-4, h=1e-5, max_per_param=20):
    """Analytic grads (already accumulated) vs central finite differences."""
    loss_fn()  # populate grads
    analytic = {n: g.copy() for n, _, g in named_params}
    flat_a, flat_n = [], []
    rng = np.random.default_rng(123)
    for name, p, _ in named_params:
        idxs = list(np.ndindex(p.shape))
        if len(idxs) > max_per_param:
            idxs = [idxs[i] for i in rng.choice(len(idxs), max_per_param, replace=False)]
        for idx in idxs:
            orig = p[idx]
            p[idx] = orig + h
            lp = loss_fn()
            p[idx] = orig - h
            lm = loss_fn()
            p[idx] = orig
            flat_n.append((lp - lm) / (2 * h))
            flat_a.append(analytic[name][idx])
    flat_a, flat_n = np.array(flat_a), np.array(flat_n)
    denom = max(1e-8, float(np.linalg.norm(flat_n)))
    rel = float(np.linalg.norm(flat_a - flat_n)) / denom
    assert rel < rel_tol, f"gradient relative error {rel}"


def test_dense_gradcheck():
    rng = np.random.default_rng(1)
    layer = Dense(4, 3, rng)
    x = rng.normal(0, 1, (5, 4))
    y = rng.integers(0, 3, 5)

    def loss_fn():
        for g in layer.grads.values():
            g[...] = 0.0
        probs = softmax(layer.forward(x))
        loss = cross_entropy(probs, y)
        layer.backward(softmax_ce_backward(probs, y))
        return loss

    central_diff_check(loss_fn, [(k, layer.params[k], layer.grads[k]) for k in layer.params],
                       max_per_param=100)


def test_lstm_gradcheck():
    rng = np.random.default_rng(2)
    lstm = Lstm(3, 2, rng)
    head = Dense(2, 3, rng)
    x = rng.normal(0, 1, (4, 5, 3))
    y = rng.integers(0, 3, 4)
    named = ([(f"lstm.{k}", lstm.params[k], lstm.grads[k]) for k in lstm.params]
             + [(f"head.{k}", head.params[k], head.grads[k]) for k in head.params])

    def loss_fn():
        for _, _, g in named:
            g[...] = 0.0
        hs = lstm.forward(x)
        probs = softmax(head.forward(hs[:, -1]))
        loss = cross_entropy(probs, y)
        d = head.backward(softmax_ce_backward(probs, y))
        dh = np.zeros_like(hs)
        dh[:, -1] = d
        lstm.backward(dh)
        return loss

    central_diff_check(loss_fn, named, max_per_param=100)


# -------------------------------------------------------------------- nets

def test_audio_net_zero_weights_uniform():
    net = AudioEmotionNet()
    probs = net.forward(np.random.default_rng(0).normal(0, 1, (3, 40)))
    np.testing.assert_allclose(probs, np.full(7, 1 / 7), atol=1e-12)


def test_audio_net_probabilities():
    net = AudioEmotionNet(np.random.default_rng(1))
    probs = net.forward(np.random.default_rng(2).normal(0, 1, (5, 40)))
    assert probs.shape == (7,)
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(probs > 0) and np.all(probs < 1)


def test_audio_net_bad_frame_dim():
    net = AudioEmotionNet()
    with pytest.raises(BadFrameDim):
        net.forward(np.zeros((3, 39)))


def test_audio_net_dropout_off_deterministic():
    net = AudioEmotionNet(np.random.default_rng(3))
    x = np.random.default_rng(4).normal(0, 1, (4, 40))
    a = net.forward(x, training=False)
    b = net.forward(x, training=False)
    np.testing.assert_array_equal(a, b)


def test_video_net_zero_weights_uniform():
    net = VideoEmotionNet(16)
    probs = net.forward(np.ones(16))
    np.testing.assert_allclose(probs, np.full(7, 1 / 7), atol=1e-12)


def test_video_net_matches_matrix_oracle():
    rng = np.random.default_rng(5)
    net = VideoEmotionNet(8, rng, hidden=(6, 5))
    x = rng.normal(0, 1, 8)
    h1 = np.maximum(0, x @ net.d1.params["W"] + net.d1.params["b"])
    h2 = np.maximum(0, h1 @ net.d2.params["W"] + net.d2.params["b"])
    logits = h2 @ net.out.params["W"] + net.out.params["b"]
    e = np.exp(logits - logits.max())
    np.testing.assert_allclose(net.forward(x), e / e.sum(), atol=1e-10)


def test_video_net_argmax_with_aligned_features():
    net = VideoEmotionNet(7)
    net.d1.params["W"][:, :7] = np.eye(7) * 2
    net.d2.params["W"][:7, :7] = np.eye(7) * 2
    net.out.params["W"][:7, :7] = np.eye(7) * 2
    for c in range(7):
        onehot = np.zeros(7)
        onehot[c] = 1.0
        assert int(net.forward(onehot).argmax()) == c


def test_video_net_bad_dim():
    net = VideoEmotionNet(16)
    with pytest.raises(BadFeatureDim):
        net.forward(np.zeros(15))


def test_audio_net_gradcheck_tiny():
    rng = np.random.default_rng(6)
    net = AudioEmotionNet(rng, hidden=3, front=(4, 5), head=(4, 3))
    x = rng.normal(0, 0.5, (3, 2, 40))
    y = rng.integers(0, 7, 3)

    def loss_fn():
        return net.loss_and_grads(x, y, training=False)

    central_diff_check(loss_fn, net.named_params(), max_per_param=15)


def test_video_net_gradcheck_tiny():
    rng = np.random.default_rng(7)
    net = VideoEmotionNet(5, rng, hidden=(4, 3))
    # zero-init biases can leave a ReLU pre-activation exactly at the kink
    # (dead row => pre-activation == b == 0); nudge off it
    for layer in net.layers:
        layer.params["b"] += rng.normal(0, 0.05, layer.params["b"].shape)
    x = rng.normal(0, 1, (6, 5))
    y = rng.integers(0, 7, 6)

    def loss_fn():
        return net.loss_and_grads(x, y, training=False)

    central_diff_check(loss_fn, net.named_params(), max_per_param=30)


# ---------------------------------------------------------------- training

def test_train_lr_zero_identity():
    rng = np.random.default_rng(8)
    net = VideoEmotionNet(8, rng, hidden=(6, 5))
    before = [p.copy() for _, p, _ in net.named_params()]
    x, y = make_video_clusters(feature_dim=8, n_per_class=4, seed=1)
    train_toy(net, x, y, TrainConfig(epochs=3, lr=0.0))
    for (name, p, _), b in zip(net.named_params(), before):
        np.testing.assert_array_equal(p, b)


def test_train_video_toy_reaches_accuracy():
    rng = np.random.default_rng(9)
    net = VideoEmotionNet(32, rng, hidden=(64, 32))
    x, y = make_video_clusters(feature_dim=32, n_per_class=20, seed=2)
    result = train_toy(net, x, y, TrainConfig(epochs=60, seed=3, target_accuracy=0.95))
    assert max(result.accuracies) >= 0.95


def test_train_nonfinite_loss():
    rng = np.random.default_rng(10)
    net = VideoEmotionNet(8, rng, hidden=(6, 5))
    net.d1.params["W"][...] = np.inf
    x, y = make_video_clusters(feature_dim=8, n_per_class=4, seed=4)
    with pytest.raises(NonFiniteLoss):
        train_toy(net, x, y, TrainConfig(epochs=2))
