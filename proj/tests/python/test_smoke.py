import pytest

import attrforge

LABELS = ("BirthDate", "BirthPlace", "Father", "Mother")


@pytest.fixture(scope="module")
def corpus():
    return attrforge.Corpus.synthetic(seed=7, n_sentences=600)


@pytest.fixture(scope="module")
def parts(corpus):
    return corpus.split(2, 3, seed=7)


@pytest.fixture(scope="module")
def model(parts):
    return attrforge.train(parts[0])


def test_corpus_round_trip(corpus):
    assert len(corpus) == 600
    again = attrforge.Corpus(corpus.render())
    assert again.ids == corpus.ids
    assert again.render() == corpus.render()


def test_split_sizes(corpus, parts):
    train, test = parts
    assert len(train) + len(test) == len(corpus)
    assert set(train.ids).isdisjoint(test.ids)


def test_generate_is_deterministic():
    assert attrforge.generate(seed=3, n_sentences=50) == attrforge.generate(seed=3, n_sentences=50)


def test_train_extract_evaluate(parts, model):
    _, test = parts
    assert model.n_classifiers == 7
    assert model.n_features > 0
    preds = attrforge.extract(test, model, mode="hybrid")
    assert preds
    report = attrforge.evaluate(preds, test)
    assert set(report) == set(LABELS)
    for row in report.values():
        assert row["correct"] <= min(row["identified"], row["total"])
        assert 0.0 <= row["f1"] <= 100.0


def test_template_mode_needs_no_model(parts):
    _, test = parts
    preds = attrforge.extract(test, None, mode="template")
    assert all(label in LABELS + ("Other",) for _, label, _, _ in preds)


def test_model_round_trip(model):
    text = model.dumps()
    loaded = attrforge.Model.loads(text)
    assert loaded == model
    assert loaded.dumps() == text


def test_svm_analytic_pair():
    out = attrforge.train_svm([[2.0, 2.0], [0.0, 0.0]], [1, -1])
    assert out["weights"] == pytest.approx([0.5, 0.5], abs=1e-9)
    assert out["bias"] == pytest.approx(-1.0, abs=1e-9)
    assert out["objective"] == pytest.approx(0.25, abs=1e-9)
    assert out["kkt_violations"] == 0


def test_classifier_count():
    assert attrforge.classifier_count([2, 4]) == 7
    assert attrforge.classifier_count([4]) == 6


def test_render_report():
    table = attrforge.render_report({"BirthDate": (4, 3, 2)})
    line = table.splitlines()[1].split()
    assert line == ["BirthDate", "4", "3", "2", "66.67", "50.00", "57.14"]


def test_errors():
    with pytest.raises(attrforge.ParseError):
        attrforge.Corpus("#id s1\nword\tBAD\tO\n")
    with pytest.raises(ValueError):
        attrforge.Model.loads("not a model")
