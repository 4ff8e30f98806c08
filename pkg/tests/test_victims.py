"""Builtin victims, handle accounting, and spec'd flip behaviors."""

import json

import pytest

from hogforge.errors import MalformedResponse, UnknownBuiltin, VictimUnavailable
from hogforge.victims import (
    ConstantVictim,
    PlantedVictim,
    StructSnifferVictim,
    TokenBagVictim,
    VictimHandle,
    VictimVerdict,
    make_victim,
)

COPY_SRC = """
int copy_n(int total, int src) {
    int copied = 0;
    while (copied < total) {
        copied = copied + 1;
        src = src + copied;
    }
    return src;
}
"""


def test_verdict_label_threshold():
    assert VictimVerdict(p_vulnerable=0.5).label == 1
    assert VictimVerdict(p_vulnerable=0.49).label == 0


def test_constant_victim():
    handle = make_victim("constant:0.9")
    assert handle.predict("int f() { return 0; }").p_vulnerable == 0.9
    assert handle.query_counter == 1


def test_constant_victim_range_checked():
    with pytest.raises(UnknownBuiltin):
        ConstantVictim(1.5)


def test_unknown_spec():
    with pytest.raises(UnknownBuiltin):
        make_victim("nosuch")


def test_query_counter_counts_every_call():
    handle = make_victim("constant:0.2")
    for _ in range(7):
        handle.predict("int f() { return 0; }")
    assert handle.query_counter == 7


def test_memo_hits_still_count():
    handle = make_victim("constant:0.2", memo=True)
    handle.predict("same code")
    handle.predict("same code")
    assert handle.query_counter == 2


def test_single_substitution_secret_flips():
    victim = PlantedVictim({
        "base": 0.9, "flip_to": 0.1,
        "secrets": [{"orig": "copied", "repl": "total_read"}],
    })
    original = COPY_SRC
    renamed = COPY_SRC.replace("copied", "total_read")
    assert victim.score(original) == pytest.approx(0.9)
    assert victim.score(renamed) == pytest.approx(0.1)
    assert VictimVerdict(p_vulnerable=victim.score(original)).label == 1
    assert VictimVerdict(p_vulnerable=victim.score(renamed)).label == 0


def test_substitution_secret_needs_original_gone():
    victim = PlantedVictim({
        "base": 0.9, "flip_to": 0.1,
        "secrets": [{"orig": "copied", "repl": "total_read"}],
    })
    both = COPY_SRC.replace("int copied = 0;",
                            "int copied = 0;\n    int total_read = 0;")
    assert victim.score(both) == pytest.approx(0.9)


def test_token_secret_masking_drop():
    victim = PlantedVictim({
        "base": 0.9, "flip_to": 0.5,
        "secrets": [{"token": "hazard_flag"}],
    })
    with_flag = "int f(int x) { int hazard_flag = x; return hazard_flag; }"
    without = "int f(int x) { int ok = x; return ok; }"
    assert victim.score(with_flag) == pytest.approx(0.9)
    assert victim.score(without) == pytest.approx(0.5)


def test_transform_secret_fires_on_rewrite():
    victim = PlantedVictim({
        "base": 0.8, "flip_to": 0.2,
        "secrets": [{"transform": "For2While"}],
    })
    with_for = "int f(int n) { int s = 0; for (int i = 0; i < n; i = i + 1) { s = s + i; } return s; }"
    rewritten = "int f(int n) { int s = 0; int i = 0; while (i < n) { s = s + i; i = i + 1; } return s; }"
    assert victim.score(with_for) == pytest.approx(0.8)
    assert victim.score(rewritten) == pytest.approx(0.2)


def test_planted_ramp_is_linear():
    victim = PlantedVictim({
        "base": 0.9, "flip_to": 0.1,
        "secrets": [{"token": "aa"}, {"token": "bb"}, {"token": "cc"},
                    {"token": "dd"}],
    })
    assert victim.score("aa bb cc dd") == pytest.approx(0.9)
    assert victim.score("bb cc dd") == pytest.approx(0.9 - 0.8 / 4)
    assert victim.score("cc dd") == pytest.approx(0.9 - 2 * 0.8 / 4)
    assert victim.score("") == pytest.approx(0.1)


def test_planted_requires_secrets():
    with pytest.raises(UnknownBuiltin):
        PlantedVictim({"base": 0.9, "flip_to": 0.1, "secrets": []})


def test_planted_rejects_unknown_transform():
    with pytest.raises(UnknownBuiltin):
        PlantedVictim({"base": 0.9, "flip_to": 0.1,
                       "secrets": [{"transform": "NoSuchOp"}]})


def test_planted_rejects_shapeless_secret():
    with pytest.raises(UnknownBuiltin):
        PlantedVictim({"base": 0.9, "flip_to": 0.1, "secrets": [{"x": 1}]})


def test_bundled_planted_victim_loads(corpus_paths):
    handle = make_victim("planted")
    p = handle.predict(COPY_SRC).p_vulnerable
    assert 0.5 <= p <= 1.0
    config = json.loads(corpus_paths["planted_victim"].read_text())
    assert len(config["secrets"]) >= 1


def test_custom_planted_config_path(tmp_path):
    config = {"base": 0.7, "flip_to": 0.3,
              "secrets": [{"token": "zz"}]}
    path = tmp_path / "v.json"
    path.write_text(json.dumps(config))
    handle = make_victim(f"planted:{path}")
    assert handle.predict("zz here").p_vulnerable == pytest.approx(0.7)


def test_token_bag_is_token_sensitive():
    handle = make_victim("token-bag")
    a = handle.predict("int f(int x) { memcpy_s(x, 4); return x; }").p_vulnerable
    b = handle.predict("int f(int x) { return x; }").p_vulnerable
    assert a != b


def test_struct_sniffer_reacts_to_structure_not_names():
    handle = make_victim("struct-sniffer")
    loop = "int f(int n) { int s = 0; for (int i = 0; i < n; i = i + 1) { s = s + i; } return s; }"
    renamed = loop.replace("s", "q").replace("n", "m").replace("i", "j")
    p_loop = handle.predict(loop).p_vulnerable
    p_renamed = handle.predict(renamed).p_vulnerable
    assert p_loop == pytest.approx(p_renamed)


def test_handle_rejects_out_of_range_p():
    class Broken:
        def score(self, code):
            return 1.7

    handle = VictimHandle(Broken(), "builtin", "broken")
    with pytest.raises(MalformedResponse):
        handle.predict("int f() { return 0; }")


def test_handle_retries_then_raises():
    class Flaky:
        def __init__(self):
            self.calls = 0

        def score(self, code):
            self.calls += 1
            raise VictimUnavailable("down")

    model = Flaky()
    handle = VictimHandle(model, "builtin", "flaky")
    with pytest.raises(VictimUnavailable):
        handle.predict("code")
    assert model.calls == 3
    assert handle.query_counter == 1
