import xml.etree.ElementTree as ET

from curtains.braid import BandGeneratorForm, BraidWord
from curtains.builder import MonodromyData, build_curtain
from curtains.chart import UNIT_RECT, Chart, build_oval_nest, build_ribbon_chart
from curtains.geometry import Point, Q
from curtains.svg import filmstrip_times, render_chart, render_filmstrip

NS = "{http://www.w3.org/2000/svg}"


def parse(svg):
    return ET.fromstring(svg.split("\n", 1)[1])


def test_empty_chart_is_blank_frame():
    root = parse(render_chart(Chart(3, UNIT_RECT)))
    assert root.get("version") == "1.1"
    assert len(root.findall(f"{NS}rect")) == 1
    assert not root.findall(f"{NS}polyline")


def test_ribbon_chart_has_two_labelled_edges():
    c = build_ribbon_chart([BandGeneratorForm(BraidWord(3), 1), BandGeneratorForm(BraidWord(3), 2)])
    root = parse(render_chart(c))
    assert len(root.findall(f"{NS}polyline")) == 2
    assert sorted(t.text for t in root.findall(f"{NS}text")) == ["1", "2"]
    # four black vertices as filled dots, one grey basepoint
    fills = [e.get("fill") for e in root.findall(f"{NS}circle")]
    assert fills.count("black") == 4
    assert len(root.findall(f"{NS}polygon")) == 2


def test_oval_nest_shows_edge_inside_loop():
    f = BandGeneratorForm(BraidWord.from_ints(3, [-2]), 1)
    c = build_oval_nest(Point(Q(0), Q(1, 2)), Q(1, 8), f, rect=UNIT_RECT)
    root = parse(render_chart(c))
    lines = root.findall(f"{NS}polyline")
    assert len(lines) == 2
    loop = next(p for p in lines if p.get("points").split()[0] == p.get("points").split()[-1])
    assert loop.get("id").startswith("edge-U:L")


def test_rendering_is_deterministic():
    m = MonodromyData(3, BraidWord.from_ints(2, [1, 1, 1]),
                      (BandGeneratorForm(BraidWord(3), 2), BandGeneratorForm(BraidWord.from_ints(3, [-2]), 1)))
    a = render_filmstrip(build_curtain(m), count=5)
    b = render_filmstrip(build_curtain(m), count=5)
    assert a == b
    assert [t for t, _ in a] == sorted(t for t, _ in a)


def test_filmstrip_avoids_event_times():
    m = MonodromyData(2, BraidWord(1), (BandGeneratorForm(BraidWord(2), 1),))
    cu = build_curtain(m)
    # with two slices the evenly spaced times would be -1 and 1, both events
    times = filmstrip_times(cu, 2)
    assert len(times) == 2
    assert not set(times) & set(cu.event_times())
