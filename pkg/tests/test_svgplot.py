import math
import xml.etree.ElementTree as ET

import pytest

from harminterp.arcs import ArcSet
from harminterp.classify import DensityConstants
from harminterp.disc import CarlesonBox, DiscPoint
from harminterp.gallery import radial_geometric
from harminterp.stopping import build_gn, choose_params
from harminterp.svgplot import DiscFigure, construction_figure

NS = "{http://www.w3.org/2000/svg}"


def parsed(fig):
    return ET.fromstring(fig.to_xml())


class TestDiscFigure:
    def test_document_skeleton(self):
        fig = DiscFigure(label="demo")
        root = parsed(fig)
        assert root.tag == f"{NS}svg"
        assert root.find(f"{NS}circle[@id='unit-circle']") is not None
        texts = root.findall(f".//{NS}text")
        assert any(t.text == "demo" for t in texts)

    def test_margin_must_leave_room(self):
        with pytest.raises(ValueError):
            DiscFigure(size=100, margin=50.0)

    def test_points_become_circles(self):
        fig = DiscFigure()
        fig.add_points([DiscPoint(0.0, 0.5), DiscPoint(math.pi, 0.25)])
        dots = parsed(fig).findall(f".//{NS}g[@id='points']/{NS}circle")
        assert len(dots) == 2

    def test_empty_band_sets_are_skipped(self):
        fig = DiscFigure()
        fig.add_boundary_bands(
            [(0, ArcSet(())), (1, ArcSet(((0.0, 1.0),))), (2, ArcSet(()))]
        )
        bands = parsed(fig).findall(f".//{NS}path[@class='band']")
        assert len(bands) == 1
        assert bands[0].get("data-node") == "1"

    def test_wraparound_arc_draws_one_path(self):
        wrapped = ArcSet.from_interval(-0.5, 0.5)
        assert len(wrapped.pieces) == 2  # split at the angular seam
        fig = DiscFigure()
        fig.add_boundary_bands([(0, wrapped)])
        bands = parsed(fig).findall(f".//{NS}path[@class='band']")
        assert len(bands) == 1

    def test_palette_recycles(self):
        fig = DiscFigure()
        fig.add_boundary_bands(
            [(k, ArcSet(((0.1 * k, 0.1 * k + 0.05),))) for k in range(10)]
        )
        bands = parsed(fig).findall(f".//{NS}path[@class='band']")
        assert bands[0].get("stroke") == bands[8].get("stroke")
        assert bands[0].get("stroke") != bands[1].get("stroke")

    def test_carleson_box_renders_closed_sector(self):
        fig = DiscFigure()
        fig.add_carleson_boxes([CarlesonBox.over(DiscPoint(1.0, 0.25))])
        boxes = parsed(fig).findall(f".//{NS}g[@id='boxes']/{NS}path")
        assert len(boxes) == 1
        assert boxes[0].get("d").endswith("Z")

    def test_output_is_deterministic(self):
        def build():
            fig = DiscFigure(label="same")
            fig.add_points(radial_geometric(4).points)
            fig.add_boundary_bands([(0, ArcSet(((0.0, 2.0),)))])
            return fig.to_xml()

        assert build() == build()


class TestConstructionFigure:
    def test_band_per_nonempty_generation(self):
        seq = radial_geometric(6)
        constants = DensityConstants(alpha=0.5, m_const=64.0)
        family = build_gn(seq, choose_params(seq, constants, 0.2))
        fig = construction_figure(seq, family, label=seq.label)
        root = parsed(fig)
        bands = root.findall(f".//{NS}path[@class='band']")
        nonempty = [g for g in family.g_sets if g.measure > 0]
        assert len(bands) == len(nonempty)
        dots = root.findall(f".//{NS}g[@id='points']/{NS}circle")
        assert len(dots) == 6
        layer = root.findall(f".//{NS}g[@id='boxes']/*")
        assert len(layer) == 6
