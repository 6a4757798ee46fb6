import json
import xml.etree.ElementTree as ET

import pytest

from numeralgame import NeedDistribution, avg_ms_complexity_dm, covers
from numeralgame.config import DESK_AGENT, ExperimentConfig
from numeralgame.metrics import lexicon_size
from numeralgame.reference import HUMAN_SYSTEMS, STARTING_POINTS, human_pair, size_12_pair, starting_pair
from numeralgame import svg


def test_starting_points():
    assert len(STARTING_POINTS) == 8
    assert starting_pair(7).digits == (1, 4, 12) and starting_pair(7).multipliers == (9, 25)
    for i in STARTING_POINTS:
        dm = starting_pair(i)
        assert dm.range_max == 50
        assert covers(dm) and covers(dm.with_range(99))
    # row 6 lists 40 twice; it stays a digit
    assert 40 in starting_pair(6).digits and 40 not in starting_pair(6).multipliers
    with pytest.raises(KeyError):
        starting_pair(9)


def test_human_systems():
    dist = NeedDistribution(99)
    sizes = {name: lexicon_size(human_pair(name)) for name in HUMAN_SYSTEMS}
    assert sizes == {"English": 11, "French": 11, "Kunama": 6}
    assert avg_ms_complexity_dm(size_12_pair("ours"), dist) < avg_ms_complexity_dm(size_12_pair("Hurford"), dist)


def test_config_roundtrip(tmp_path):
    cfg = ExperimentConfig(seed=4, range_max=20)
    cfg.apply_desk_scale()
    path = cfg.write(tmp_path)
    back = ExperimentConfig.load(path)
    assert back == cfg
    assert back.evolution.agent.numeral_range == 20
    assert back.evolution.agent.hidden_dim == DESK_AGENT["hidden_dim"]
    assert json.loads(path.read_text())["seed"] == 4


def test_config_rejects_unknown_nested_key():
    with pytest.raises(ValueError, match="evolution.agent"):
        ExperimentConfig.from_dict({"evolution": {"agent": {"hidden": 3}}})
    with pytest.raises(ValueError):
        ExperimentConfig(range_max=0)


def test_scatter_svg_is_well_formed():
    text = svg.scatter_plot([svg.Series("a", [(1, 2.0), (2, 1.5)], line=True, annotations=["x", "y"]),
                             svg.Series("b <&>", [(1.5, 1.7)])], "t", "x", "y")
    root = ET.fromstring(text)
    assert root.tag.endswith("svg")
    assert len(root.findall(".//{http://www.w3.org/2000/svg}circle")) == 3
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 1
    with pytest.raises(ValueError):
        svg.scatter_plot([], "t", "x", "y")


def test_bar_svg(tmp_path):
    text = svg.bar_chart(["1", "2"], [5, 3], "t", "x", "y")
    root = ET.fromstring(text)
    rects = root.findall(".//{http://www.w3.org/2000/svg}rect")
    assert len(rects) >= 4
    svg.write(tmp_path / "b.svg", text)
    assert (tmp_path / "b.svg").read_text() == text
