import pytest

from steiner_sa import parse_stp, read_results, to_instance, write_results, write_solution
from steiner_sa.errors import CountMismatch, MissingSection, NoCoordinates, StpSyntaxError
from steinlib_fixtures import MINIMAL, TRIANGLE, WITH_COORDS, WITH_ROOT
from steiner_sa.steinlib import ResultRow, format_stp


def test_parse_minimal():
    raw = parse_stp(MINIMAL)
    assert raw.nodes == 2
    assert len(raw.links) == 1
    link = raw.links[0]
    assert (link.tail, link.head, link.cost, link.directed) == (1, 2, 7.0, False)
    assert raw.terminals == (2,)
    assert raw.declared_root is None
    assert raw.coordinates is None


def test_parse_count_mismatch():
    text = MINIMAL.replace("Edges 1", "Edges 3")
    with pytest.raises(CountMismatch):
        parse_stp(text)


def test_parse_coordinates():
    raw = parse_stp(WITH_COORDS)
    assert raw.coordinates[1] == (10.0, 20.0)


def test_parse_missing_sections():
    with pytest.raises(MissingSection):
        parse_stp("SECTION Graph\nNodes 1\nEdges 0\nEND\nEOF\n")
    with pytest.raises(MissingSection):
        parse_stp("SECTION Terminals\nTerminals 0\nEND\nEOF\n")


def test_parse_reports_line_numbers():
    text = MINIMAL.replace("E 1 2 7", "E 1 x 7")
    with pytest.raises(StpSyntaxError) as err:
        parse_stp(text)
    assert err.value.line_no is not None


def test_parse_is_case_insensitive():
    raw = parse_stp(MINIMAL.lower())
    assert raw.nodes == 2 and raw.terminals == (2,)


def test_to_instance_first_terminal_policy():
    raw = parse_stp(TRIANGLE)
    inst = to_instance(raw, "first")
    assert inst.root == 0          # file node 1
    assert inst.terminals == (1,)  # file node 2
    assert len(inst.arcs) == 6     # three edges bidirected


def test_to_instance_declared_root_wins():
    raw = parse_stp(WITH_ROOT)
    inst = to_instance(raw, "first")
    assert inst.root == 4  # file node 5 regardless of policy
    inst2 = to_instance(raw, "central")
    assert inst2.root == 4


def test_to_instance_central_policy():
    raw = parse_stp(WITH_COORDS)
    inst = to_instance(raw, "central")
    # terminals at x = 0, 5, 9 with equal y; the middle one wins
    assert inst.root == 1


def test_to_instance_central_requires_coordinates():
    raw = parse_stp(TRIANGLE)
    with pytest.raises(NoCoordinates):
        to_instance(raw, "central")


def test_to_instance_explicit_override():
    raw = parse_stp(TRIANGLE)
    inst = to_instance(raw, 3)
    assert inst.root == 2
    assert inst.terminals == (0, 1)


def test_format_parse_round_trip():
    for text in (MINIMAL, TRIANGLE, WITH_ROOT, WITH_COORDS):
        raw = parse_stp(text)
        again = parse_stp(format_stp(raw))
        assert again.nodes == raw.nodes
        assert sorted(map(tuple.__call__, map(lambda l: (l.tail, l.head, l.cost, l.directed), again.links))) \
            == sorted((l.tail, l.head, l.cost, l.directed) for l in raw.links)
        assert again.terminals == raw.terminals
        assert again.declared_root == raw.declared_root
        assert again.coordinates == raw.coordinates


def test_corpus_files_parse_and_build(corpus):
    for entry in corpus:
        raw = parse_stp(format_stp(entry.raw))
        inst = to_instance(raw, "first")
        assert inst.node_count == entry.instance.node_count
        assert inst.terminals == entry.instance.terminals


def _row(**kw):
    base = dict(
        instance="a.stp",
        algorithm="shp1",
        iterations=0,
        replications=1,
        seed=0,
        cost=30.0,
        opt=30.0,
        iters_run=0,
        avg_iter_ms=None,
    )
    base.update(kw)
    return ResultRow(**base)


def test_write_results_zero_gap_renders_as_zero(tmp_path):
    path = tmp_path / "res.csv"
    write_results([_row()], path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("instance,algorithm")
    assert lines[1].split(",")[7] == "0"


def test_write_results_unknown_opt_empty_gap(tmp_path):
    path = tmp_path / "res.csv"
    write_results([_row(opt=None)], path)
    fields = path.read_text().splitlines()[1].split(",")
    assert fields[6] == "" and fields[7] == ""


def test_results_round_trip(tmp_path):
    path = tmp_path / "res.csv"
    rows = [
        _row(),
        _row(instance="b.stp", algorithm="sa", iterations=1000, replications=10,
             seed=7, cost=41.0, opt=40.0, iters_run=10000, avg_iter_ms=1.25),
    ]
    write_results(rows, path)
    parsed = read_results(path)
    assert len(parsed) == 2
    assert parsed[1]["cost"] == 41.0
    assert parsed[1]["opt"] == 40.0
    assert parsed[1]["gap_percent"] == pytest.approx(2.5)
    assert parsed[1]["avg_iter_ms"] == 1.25
    assert parsed[0]["gap_percent"] == 0.0


def test_write_solution_format(tmp_path, g1):
    path = tmp_path / "sol.txt"
    write_solution(path, g1, [0, 1, 2], 3.0)
    lines = path.read_text().splitlines()
    assert lines == ["1 2 1", "2 3 1", "2 4 1", "TOTAL 3"]
