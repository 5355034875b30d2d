"""Acceptance criteria. Each test prints one PASS/FAIL line with its measurement
and runtime; the same lines are repeated in the terminal summary."""

import json
import math
import time

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ein.analysis import (binary_metrics, compute_metrics, information_gain, top_n_emotions,
                          welch_t_test)
from ein.classifiers import coefficients, train_linear_svm, train_random_forest, trivial_baselines
from ein.cli import main
from ein.corpus import SplitSpec, split
from ein.features import emotion_features, emotion_matrix, feature_dimension, feature_names
from ein.lexicon import builtin_lexicons
from ein.neural import (EinConfig, EinModel, EncodedData, attention_forward, fit, gradient_check,
                        load_checkpoint, save_checkpoint)
from ein.neural.layers import softmax
from ein.neural.training import prepare
from ein.synthetic import (NEWS_LABELS, class_vocabulary, clickbait_corpus, emotion_corpus,
                           make_world)

mpmath.mp.dps = 50


def report(n, title, ok, detail, t0, limit):
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < limit
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title}: {detail} [{elapsed:.1f}s, limit {limit:g}s]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_majority_class_rows():
    t0 = time.perf_counter()
    labels = ["c1", "c2", "c3", "c4", "c5"]
    rows = []
    ok = True
    for p, expected in ((0.3407, (6.81, 20.00, 10.16)), (0.4410, (8.82, 20.00, 12.24))):
        n = 10_000
        k = round(p * n)
        gold = ["c1"] * k + [labels[1 + i % 4] for i in range(n - k)]
        m = compute_metrics(["c1"] * n, gold, labels)
        got = (m.macro_precision, m.macro_recall, m.macro_f1)
        ok &= all(abs(round(g, 2) - e) <= 0.01 for g, e in zip(got, expected))
        ok &= abs(m.macro_f1 - 100 * (2 * p / (1 + p)) / 5) < 1e-9
        rows.append("/".join(f"{g:.2f}" for g in got))
    report(1, "majority-class rows", ok, "P/R/F1 = " + " and ".join(rows), t0, 1)


def test_criterion_2_dimension_law():
    t0 = time.perf_counter()
    lex = builtin_lexicons()
    dims = [l.schema.dimension for l in lex]
    rng = np.random.default_rng(0)
    words = sorted({w for l in lex for w in l.entries}) + ["zzz", "the"]
    ok = feature_dimension(lex) == 38 == sum(dims) and dims == [6, 8, 14, 4, 6]
    for _ in range(200):
        toks = list(rng.choice(words, size=rng.integers(0, 30)))
        ok &= len(emotion_features(toks, lex)) == 38
    report(2, "dimension law", ok, f"{'+'.join(map(str, dims))} = {feature_dimension(lex)}", t0, 1)


def test_criterion_3_gradient_check():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        cfg = EinConfig(lstm_units=6, dense_a_units=4, dense_b_units=6, embedding_dim=8, seed=seed,
                        hidden_activation="tanh" if seed % 2 else "relu", drop_c=0.2, drop_d=0.2,
                        remove_stop_words=False)
        m = EinModel.build(cfg, [f"w{i}" for i in range(8)], list("abcde"),
                           [f"e{i}" for i in range(10)])
        for k in m.params:
            m.params[k] = rng.normal(0.0, 0.5, size=m.params[k].shape)
        ids = [rng.integers(0, 9, size=rng.integers(2, 7)) for _ in range(4)]
        data = EncodedData(ids, rng.random((4, 10)), rng.integers(0, 5, size=4))
        err, _ = gradient_check(m, data.batch(range(4)), epsilon=1e-5, seed=seed)
        worst = max(worst, err)
    report(3, "gradient check", worst < 1e-4, f"max relative error {worst:.2e} over 20 seeds", t0, 30)


def test_criterion_4_overfit():
    t0 = time.perf_counter()
    w = make_world(words_per_emotion=50, seed=0)
    c = emotion_corpus(w, 16, seed=0)
    cfg = EinConfig(lstm_units=16, dense_a_units=8, dense_b_units=16, embedding_dim=16, epochs=200,
                    early_stop_patience=200, seed=0)
    _, h = fit(c, c, w.lexicons, cfg, monitor_train=True)
    hit = h.train_accuracy.index(1.0) + 1 if 1.0 in h.train_accuracy else None
    report(4, "overfit 16 documents", hit is not None,
           f"100% training accuracy at epoch {hit}" if hit else f"best {max(h.train_accuracy):.3f}",
           t0, 60)


@pytest.fixture(scope="module")
def news_world():
    return make_world(seed=0)


def test_criterion_5_emotion_forest_vs_random(news_world):
    t0 = time.perf_counter()
    c = emotion_corpus(news_world, 1000, seed=0)
    tr, _, te = split(c, SplitSpec(0.2, 0.125, seed=0))
    lex = news_world.lexicons
    rf = train_random_forest(emotion_matrix(tr, lex), tr.y, n_trees=100, seed=0)
    f_rf = compute_metrics(rf.predict(emotion_matrix(te, lex)), te.y, c.labels).macro_f1
    _, ran = trivial_baselines(tr.y, len(te), 0, c.labels)
    f_ran = compute_metrics(ran, te.y, c.labels).macro_f1
    ok = f_rf >= f_ran + 20 and abs(f_ran - 20) <= 5
    report(5, "emotion forest vs random", ok, f"RF macro-F1 {f_rf:.2f}, RAN {f_ran:.2f}", t0, 120)


def test_criterion_6_ein_beats_lstm(news_world):
    t0 = time.perf_counter()
    cv = class_vocabulary(news_world, NEWS_LABELS, seed=0)
    c = emotion_corpus(news_world, 1000, seed=0, class_vocab=cv, class_word_rate=0.1,
                       class_word_purity=0.6)
    tr, va, te = split(c, SplitSpec(0.2, 0.125, seed=0))
    lex = news_world.lexicons
    scores = {}
    for kind, dense_a in (("lstm", 0), ("ein", 16)):
        cfg = EinConfig(lstm_units=16, dense_a_units=dense_a, dense_b_units=16, embedding_dim=16,
                        epochs=60, early_stop_patience=8, seed=0)
        m, _ = fit(tr, va, lex, cfg)
        pred = m.predict_labels(prepare(m, te, lex))
        scores[kind] = compute_metrics(pred, te.y, c.labels).macro_f1
    ok = scores["ein"] >= scores["lstm"] + 2
    report(6, "EIN vs LSTM-only", ok, f"EIN {scores['ein']:.2f}, LSTM {scores['lstm']:.2f}", t0, 600)


def test_criterion_7_binary_clickbait():
    t0 = time.perf_counter()
    c = clickbait_corpus(400, seed=0)
    lex = builtin_lexicons()
    tr, va, te = split(c, SplitSpec(0.2, 0.125, seed=0))
    cfg = EinConfig(lstm_units=16, dense_a_units=8, dense_b_units=16, embedding_dim=16, epochs=40,
                    early_stop_patience=5, seed=0, output_mode="sigmoid_binary",
                    positive_label="clickbait")
    m, _ = fit(tr, va, lex, cfg)
    r = binary_metrics(m.predict_labels(prepare(m, te, lex)), te.y, "clickbait")
    report(7, "binary clickbait", r["f1"] >= 95, f"F1 {r['f1']:.2f}", t0, 300)


_WELCH_FIXTURES = [
    ([1, 2, 3, 4, 5], [2, 3, 4, 5, 6]),
    ([0.1, 0.2, 0.15, 0.3], [0.5, 0.45, 0.6, 0.52, 0.48]),
    ([10, 12, 9, 11], [10.5, 11.5]),
    ([1e-3, 2e-3, 1.5e-3, 0.5e-3, 2.5e-3], [1e-3, 1.1e-3, 0.9e-3]),
    ([3.2, 3.1, 3.3, 3.2, 3.25, 3.15], [1.0, 5.0, 9.0]),
    ([0, 0, 0, 1], [0, 1, 1, 1]),
    ([100, 200, 150], [50, 60, 55, 52, 58, 61, 49]),
    ([-1, -2, -3, 0.5], [-1.5, -2.5, 0.1, 0.2]),
    ([5.0, 5.1], [4.9, 5.0, 5.05]),
    (list(np.linspace(0, 1, 30)), list(np.linspace(0.2, 1.4, 17) ** 2)),
]


def _welch_mp(a, b):
    a = [mpmath.mpf(x) for x in a]
    b = [mpmath.mpf(x) for x in b]
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    sa = sum((x - ma) ** 2 for x in a) / (len(a) - 1) / len(a)
    sb = sum((x - mb) ** 2 for x in b) / (len(b) - 1) / len(b)
    t = (ma - mb) / mpmath.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa ** 2 / (len(a) - 1) + sb ** 2 / (len(b) - 1))
    return float(t), float(mpmath.betainc(df / 2, 0.5, 0, df / (df + t * t), regularized=True))


def test_criterion_8_analysis_oracles():
    t0 = time.perf_counter()
    y = ["t", "f"] * 100
    ig = information_gain(np.array([[float(l == "t")] for l in y]), y).score("f0")
    ig_const = information_gain(np.full((200, 1), 0.4), y).score("f0")
    welch_err = 0.0
    for a, b in _WELCH_FIXTURES:
        r = welch_t_test(a, b)
        t, p = _welch_mp(a, b)
        welch_err = max(welch_err, abs(r.t - t), abs(r.p - p))
    rng = np.random.default_rng(0)
    sym = True
    for _ in range(1000):
        a = rng.normal(rng.normal(), rng.uniform(0.1, 3), size=rng.integers(2, 30))
        b = rng.normal(rng.normal(), rng.uniform(0.1, 3), size=rng.integers(2, 30))
        ab, ba = welch_t_test(a, b), welch_t_test(b, a)
        sym &= ab.t == -ba.t and 0.0 < ab.p <= 1.0
    ok = abs(ig - math.log(2)) < 1e-9 and ig_const == 0.0 and welch_err < 1e-6 and sym
    report(8, "analysis oracles", ok,
           f"|IG-ln2| {abs(ig - math.log(2)):.1e}, constant IG {ig_const}, "
           f"Welch max error {welch_err:.1e}, 1000 pairs antisymmetric: {sym}", t0, 30)


def test_criterion_9_invariances(tmp_path):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    checks = {}
    att = [abs(attention_forward(rng.normal(size=(int(T), 5)), rng.normal(size=5),
                                 rng.normal(size=1))[1].sum() - 1) for T in rng.integers(1, 40, 200)]
    checks["attention"] = max(att) < 1e-6
    sm = [abs(softmax(rng.normal(scale=10, size=int(k))).sum() - 1) for k in rng.integers(1, 20, 200)]
    checks["softmax"] = max(sm) < 1e-6
    lex = builtin_lexicons()
    words = sorted({w for l in lex for w in l.entries})
    inv = True
    for _ in range(100):
        toks = list(rng.choice(words + ["zzz", "yyy"], size=rng.integers(1, 25)))
        base = emotion_features(toks, lex).values
        inv &= np.array_equal(emotion_features(list(rng.permutation(toks)), lex).values, base)
        inv &= np.allclose(emotion_features(toks * 3, lex).values, base, rtol=0, atol=1e-15)
    checks["features"] = inv
    cfg = EinConfig(lstm_units=6, dense_a_units=4, dense_b_units=6, embedding_dim=8)
    m = EinModel.build(cfg, [f"w{i}" for i in range(8)], list("abc"), feature_names(lex))
    save_checkpoint(m, tmp_path / "m.ein")
    back = load_checkpoint(tmp_path / "m.ein")
    data = EncodedData([rng.integers(0, 9, size=5) for _ in range(6)], rng.random((6, 38)))
    checks["checkpoint"] = (np.array_equal(back.scores(data), m.astype(np.float32).scores(data))
                            and all(np.array_equal(back.params[k], v.astype(np.float32))
                                    for k, v in m.params.items()))
    from test_cli import BUNDLED
    blobs = []
    for run in ("a", "b"):
        assert main(["--config", str(BUNDLED), "--out", str(tmp_path / run), "run"]) == 0
        blobs.append((tmp_path / run / "metrics.json").read_bytes())
    checks["rerun"] = blobs[0] == blobs[1] and json.loads(blobs[0])["seed"] == 0
    failed = [k for k, v in checks.items() if not v]
    report(9, "invariance suite", not failed,
           "all hold" if not failed else "failed: " + ", ".join(failed), t0, 60)


def test_criterion_10_top_emotions():
    t0 = time.perf_counter()
    w = make_world(words_per_emotion=200, seed=0)
    c = emotion_corpus(w, 500, seed=0)
    svm = train_linear_svm(emotion_matrix(c, w.lexicons), c.y, c=1.0,
                           feature_names=feature_names(w.lexicons))
    top = top_n_emotions(coefficients(svm), 3)
    want = {"clickbait": "surprise", "hoax": "hope", "propaganda": "joy", "satire": "disgust"}
    got = {k: top[k][0] for k in want}
    report(10, "top emotions", got == want, ", ".join(f"{k}->{v}" for k, v in got.items()), t0, 60)
