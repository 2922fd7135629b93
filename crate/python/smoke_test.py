"""End-to-end smoke test for the Python bindings.

Exercises the vector algebra, text encoding, training on a generated corpus,
digital and simulated-array classification, and model file round-tripping.
Run after `pip install -e crates/py --no-build-isolation`:

    python python/smoke_test.py
"""

import tempfile
from pathlib import Path

import hdcsim_py as hdc


def check_algebra():
    a = hdc.Hypervector.random(10_000, 1, 0)
    b = hdc.Hypervector.random(10_000, 1, 1)
    assert len(a) == a.dim == 10_000
    assert a == hdc.Hypervector.random(10_000, 1, 0)
    assert a != b

    # Binding is complement-preserving XOR.
    assert a.xnor(b) == ~(a ^ b)
    # Independent draws sit near half-distance.
    assert abs(a.hamming(b) - 5000) <= 350
    # The two similarity readings are linearly locked together.
    assert a.inv_hamming(b) == 10_000 - a.popcount() - b.popcount() + 2 * a.dot(b)
    # A full rotation is the identity.
    assert a.permute(10_000, "circular") == a
    assert a.permute(10_000, "plain-right").popcount() == 0

    g = hdc.ngram([a, b, a], kind="two-minterm")
    assert g.dim == 10_000 and 0 < g.popcount() < 10_000


def check_encoding():
    im = hdc.ItemMemory.text(2048, 7)
    assert len(im) == 27 and im.symbols[26] == " "
    assert im.lookup("a") == im.get(0)

    one = im.encode_text("the quick brown fox", n=4)
    again = im.encode_text("the quick brown fox", n=4)
    assert one == again
    assert one != im.encode_text("jumped over the dog", n=4)
    assert hdc.preprocess("Ab c!") == bytes([0, 1, 26, 2])


def check_pipeline(tmp: Path):
    manifest = hdc.write_synth_corpus(
        tmp / "corpus",
        seed=7,
        classes=3,
        train_len=4000,
        query_len=300,
        queries=6,
        mixing=0.0,
    )
    model = hdc.TrainedModel.train("synth", Path(manifest), dim=2048)
    assert model.labels == ["class00", "class01", "class02"]
    assert model.dim == 2048 and model.task == "synth"

    # Fully separable statistics: every query labels correctly.
    report = model.evaluate(Path(manifest))
    assert report["evaluated"] == 18 and report["accuracy"] == 1.0

    query = (tmp / "corpus" / "test" / "class01.txt").read_text().splitlines()[0]
    assert model.classify(query) == "class01"

    # The simulated arrays agree in the zero-noise limit and still find the
    # right class under device noise.
    label, scores = model.search_analog(query, partitions=2, noise="ideal")
    assert label == "class01" and len(scores) == 3
    label, _ = model.search_analog(query, partitions=2, noise="pcm", nonce=5)
    assert label == "class01"

    noisy = model.evaluate(Path(manifest), backend="crossbar", partitions=2)
    assert noisy["evaluated"] == 18 and noisy["accuracy"] >= 0.9

    path = tmp / "model.hdc"
    model.save(path)
    assert hdc.TrainedModel.load(path).classify(query) == "class01"


def main():
    check_algebra()
    check_encoding()
    with tempfile.TemporaryDirectory() as tmp:
        check_pipeline(Path(tmp))
    print(f"smoke test passed (hdcsim_py {hdc.__version__})")


if __name__ == "__main__":
    main()
