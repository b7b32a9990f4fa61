import json

import pytest

from extalg import harness
from extalg.corpus import builtin_corpus, golden_entries
from extalg.errors import ConfigInvalid, ParseError
from extalg.formats import dump, load_json_text, parse_extension
from extalg.laws import LAWS, LawOutcome, _table
from helpers import field

REMARK_B = {"kind": "finite", "ambient": [field(2), field(3)], "A": [], "ideal": {"generators": [[0, 2]]}}
DIAG_F2 = {"kind": "finite", "ambient": [field(2), field(2)], "A": [], "B": "ambient"}


def test_builtin_corpus_contents():
    entries = builtin_corpus(0, "small")
    ids = [e.id for e in entries]
    assert len(ids) == len(set(ids)) >= 20 and ids == sorted(ids)
    for want in ("remark_b_2_3", "remark_b_2_5", "remark_b_3_5", "example_diag_F2_n2",
                 "example_diag_F5_n3", "z_in_q", "zloc2_in_q", "z_x_z6", "xy_ring"):
        assert want in ids
    assert all(e.ext is not None for e in entries)
    assert [e.doc for e in builtin_corpus(0, "small")] == [e.doc for e in entries]


def test_golden_flags_only_on_golden_entries():
    for e in builtin_corpus(3, "tiny"):
        if e.source == "random":
            assert not e.golden


def test_unknown_law_and_profile():
    with pytest.raises(ConfigInvalid):
        harness.run_suite(laws="no_such_law")
    with pytest.raises(ConfigInvalid):
        builtin_corpus(0, "huge")


def test_prop_inv_flat_single_law():
    report = harness.run_suite(laws=["prop_inv_flat"])
    (row,) = report.laws
    assert row["failures"] == 0 and row["instances"] - row["vacuous"] >= 200
    assert report.exit_code == 0


def test_remark_b_on_golden_entry():
    entry = next(e for e in golden_entries() if e.id == "remark_b_2_3")
    out = LAWS["remark_b"](entry, harness.SuiteConfig().context())
    assert out.instances == 1 and out.holds


def test_aggregates_sum_per_entry_rows():
    report = harness.run_suite(laws="remark_a,theorem_2_1", config=harness.SuiteConfig(profile="tiny"))
    for row in report.laws:
        per_entry = [r for e in report.entries for r in e["laws"] if r["law"] == row["law"]]
        assert row["instances"] == sum(r["instances"] for r in per_entry)
        assert row["failures"] == sum(len(r["failures"]) for r in per_entry)


def test_report_is_deterministic(monkeypatch):
    cfg = harness.SuiteConfig(profile="tiny", laws="remark_a,golden_flags,lemma_technical")
    first = dump(harness.run_suite(config=cfg).to_json())
    monkeypatch.setenv("EXTALG_THREADS", "2")
    second = dump(harness.run_suite(config=cfg).to_json())
    assert first == second
    assert json.loads(first)["schema_version"] == harness.SCHEMA_VERSION


def test_threads_env_validation(monkeypatch):
    monkeypatch.setenv("EXTALG_THREADS", "zero")
    with pytest.raises(ConfigInvalid):
        harness._threads()


# --- analyze ------------------------------------------------------------------------------


def verdicts(result):
    return {v["name"]: v for v in result["verdicts"]}


def test_analyze_remark_b():
    got = verdicts(harness.analyze_doc(REMARK_B, "flat,faithfully_flat,locally_principal"))
    assert [got[k]["holds"] for k in ("flat", "faithfully_flat", "locally_principal")] == [True, False, True]


def test_analyze_diagonal():
    v = verdicts(harness.analyze_doc(DIAG_F2, ["weakly_surjective"]))["weakly_surjective"]
    assert v["holds"] is False and v["witness"] == {"maximal": [[0, 0]], "x": [1, 0]}


def test_analyze_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "finite", "ambient": [[2, 1, [0, 1]]\n')
    with pytest.raises(ParseError, match="line 2"):
        harness.analyze(str(bad), "flat")
    with pytest.raises(ParseError, match="field 'ambient\\[0\\]'"):
        parse_extension({"kind": "finite", "ambient": [[4, 1, [0, 1]]]})
    with pytest.raises(ParseError, match="field 'ideal'"):
        harness.analyze_doc(DIAG_F2, "flat")
    with pytest.raises(ConfigInvalid):
        harness.analyze_doc(DIAG_F2, "no_such_prop")


def test_json_errors_report_position():
    with pytest.raises(ParseError, match="line 1 column 2"):
        load_json_text("{]")


def test_poset_analysis():
    doc = {"kind": "poset", "elements": ["a1", "a2", "b"], "covers": [["a1", "b"], ["a2", "b"]],
           "gamma": ["a1", "a2"]}
    got = verdicts(harness.analyze_doc(doc, "maximal_elements,hypotheses"))
    assert got["maximal_elements"]["evidence"]["elements"] == ["b"]
    assert got["hypothesis_b"]["holds"] is False


# --- witness replay ------------------------------------------------------------------------


@pytest.fixture
def broken_laws(monkeypatch):
    """Two deliberately wrong laws, removed again after the test."""
    def claims_all_flat(entry, ctx):
        out = LawOutcome("claims_all_flat", entry.id)
        table = _table(entry, ctx)
        for i, I in enumerate(table.ideals):
            out.instances += 1
            if not table.fact(i, "flat"):
                out.fail({"ideal": I.fmt() if hasattr(I, "fmt") else I.describe()},
                         table.replay(i, ["flat"]))
        return out

    def claims_no_weak_surjectivity(entry, ctx):
        out = LawOutcome("claims_no_weak_surjectivity", entry.id)
        out.instances = 1
        if harness.pt.is_weakly_surjective(entry.ext):
            out.fail({"extension": entry.id})
        return out

    for fn in (claims_all_flat, claims_no_weak_surjectivity):
        fn.law_id, fn.description = fn.__name__, "deliberately false"
        monkeypatch.setitem(LAWS, fn.__name__, fn)


def test_failures_replay(broken_laws, tmp_path):
    report = harness.run_suite(laws="claims_all_flat,claims_no_weak_surjectivity",
                               config=harness.SuiteConfig(profile="tiny"))
    failures = list(harness.iter_failures(report))
    assert report.exit_code == 1
    assert {name for _, name, _ in failures} == {"claims_all_flat", "claims_no_weak_surjectivity"}
    for _, _, f in failures:
        assert harness.replay_failure(f)
    # the replay file is also accepted by the command line
    from extalg.cli import main
    _, _, f = failures[0]
    path = tmp_path / "replay.json"
    path.write_text(dump(f["replay"]["file"]))
    assert main(["analyze", "--file", str(path), "--props", ",".join(f["replay"]["props"])]) == 0
