import pytest

from graphshadow import FormatError, Q, certify_perturbation, compute_transition, verify_ball
from graphshadow.io import SystemDescription, dumps, load, loads, save
from graphshadow.pl_map import evaluate
from graphshadow.shadowing import generate_pseudo_orbit
from graphshadow.systems import builtin_system

from conftest import three_cover

TENT_TEXT = """\
format graphshadow-system 1
graph
  vertex a
  vertex b
  edge a b 1
end
map f
  piece 0 0 1/2 0 0 1
  piece 0 1/2 1 0 1 0
end
"""


@pytest.fixture(scope="module")
def full_desc():
    g, f = builtin_system("tent")
    cert = certify_perturbation(f, Q("2/5"), 2, seed=5)
    desc = SystemDescription(g, maps={"f": f})
    desc.add_certificate("c", cert)
    desc.covers["three"] = three_cover(g)
    desc.orbits["walk"] = generate_pseudo_orbit(f, Q("1/10"), 12, seed=2)
    desc.patterns["pats"] = ("three", [(0, 2, 1), (1, 1, 1, 0)])
    return desc


def test_hand_written_tent():
    desc = loads(TENT_TEXT)
    f = desc.maps["f"]
    g = desc.graph
    assert list(g.vertices) == ["a", "b"]
    assert evaluate(f, g.point(0, Q("1/4"))) == g.point(0, Q("1/2"))
    assert evaluate(f, g.point(0, Q("3/4"))) == g.point(0, Q("1/2"))


def test_round_trip_is_stable(full_desc):
    text = dumps(full_desc)
    again = loads(text)
    assert dumps(again) == text
    assert set(again.maps) == {"f", "c.g"} and set(again.covers) == {"c.cover", "three"}
    assert again.orbits["walk"].points == full_desc.orbits["walk"].points
    assert again.patterns["pats"] == ("three", [(0, 2, 1), (1, 1, 1, 0)])


def test_round_trip_preserves_semantics(full_desc):
    again = loads(dumps(full_desc))
    cert, old = again.certificates["c"], full_desc.certificates["c"]
    for key in ("eps", "gamma", "delta", "tau", "xi", "eta", "lam", "n", "seed", "surjective"):
        assert getattr(cert, key) == getattr(old, key)
    assert cert.phi == old.phi
    assert compute_transition(cert.g, cert.cover) == cert.phi
    assert cert.problems() == []


def test_reloaded_certificate_gives_same_verdict(full_desc, tmp_path):
    path = tmp_path / "sys.gsys"
    save(full_desc, path)
    cert = load(path).certificates["c"]
    a = verify_ball(full_desc.certificates["c"], samples=3, orbits=2, length=20, seed=cert.seed)
    b = verify_ball(cert, samples=3, orbits=2, length=20, seed=cert.seed)
    assert a.verified and a.lines() == b.lines()


def _error(text):
    with pytest.raises(FormatError) as info:
        loads(text)
    return info.value


def test_offset_out_of_range_names_edge_and_position():
    bad = TENT_TEXT.replace("piece 0 1/2 1 0 1 0", "piece 0 1/2 5/4 0 1 0")
    err = _error(bad)
    assert "5/4" in str(err) and "edge 0" in str(err)
    assert err.line == 9 and err.column == 15


def test_version_mismatch():
    err = _error(TENT_TEXT.replace("graphshadow-system 1", "graphshadow-system 7"))
    assert err.line == 1 and "version" in str(err)


def test_dangling_name():
    text = TENT_TEXT + "orbit o map=nope delta=1/2\n  point 0 0\nend\n"
    err = _error(text)
    assert "nope" in str(err) and err.line == 11 and err.column == 9


def test_unknown_block_and_field():
    assert "unknown block" in str(_error(TENT_TEXT + "widget w\nend\n"))
    bad = TENT_TEXT + "orbit o map=f delta=1/2\n  spot 0 0\nend\n"
    assert "spot" in str(_error(bad))


def test_unterminated_block():
    err = _error(TENT_TEXT.rstrip("end\n"))
    assert err.line is not None


def test_pseudo_orbit_gap_is_validated():
    text = TENT_TEXT + "orbit o map=f delta=1/10\n  point 0 0\n  point 0 1/2\nend\n"
    assert "gap" in str(_error(text))


def test_non_rational():
    err = _error(TENT_TEXT.replace("edge a b 1", "edge a b one"))
    assert err.line == 5


def test_certificate_missing_phi(full_desc):
    text = dumps(full_desc)
    lines = [ln for ln in text.splitlines() if not ln.startswith("  phi 0 ")]
    assert "phi" in str(_error("\n".join(lines) + "\n"))
