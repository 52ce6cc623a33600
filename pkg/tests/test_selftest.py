from roisel import edge_scrambler, encryptor
from roisel.selftest import ORACLES, format_matrix, run_selftest


def test_subset_runs_only_named_oracles():
    res = run_selftest(["FL <=16 bits"])
    assert [r.name for r in res] == ["FL <=16 bits"]
    assert res[0].ok and res[0].cases == sum(1 << n for n in range(1, 17))


def test_matrix_lists_every_oracle():
    res = run_selftest(["FL <=16 bits", "embed/extract |v|<=2^15"])
    text = format_matrix(res)
    assert text.count("PASS") == 2
    assert all(r.name in text for r in res)
    assert set(ORACLES) >= {r.name for r in res}


def test_broken_embedding_is_caught(monkeypatch):
    monkeypatch.setattr(edge_scrambler, "extract_flag", lambda v: (abs(v) % 2, v // 2))
    (r,) = run_selftest(["embed/extract |v|<=2^15"])
    assert not r.ok and r.failures > 0 and r.first_failure


def test_broken_cipher_is_caught(monkeypatch):
    monkeypatch.setattr(encryptor, "dec_chroma_ipm", lambda m, s: m)
    (r,) = run_selftest(["element ciphers"])
    assert not r.ok and "chroma" in r.first_failure.lower()
