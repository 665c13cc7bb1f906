"""Small SVG figures of the disc and its boundary structures.

Built on ``xml.etree`` rather than a plotting package: the output
contract is "valid XML, deterministic bytes, one band per nonempty
boundary set", which a hundred lines of element assembly meets without
any heavyweight dependency.  Arcs are sampled polylines — no SVG
arc-flag bookkeeping, correct for wrap-around and near-full arcs.
``to_xml`` returns one complete XML document; the unit circle outline is
always present.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from .arcs import ArcSet
from .disc import CarlesonBox, DiscPoint

__all__ = ["DiscFigure", "construction_figure"]

_SVG_NS = "http://www.w3.org/2000/svg"

# muted qualitative palette, recycled when there are more bands than hues
_PALETTE = (
    "#1b6ca8",
    "#c2571a",
    "#2e8540",
    "#8250c4",
    "#b02a37",
    "#0c7c84",
    "#946300",
    "#5c5c5c",
)

_STEP = math.radians(1.5)  # sampling pitch for arc polylines


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _arc_samples(start: float, end: float) -> List[float]:
    n = max(2, int(math.ceil((end - start) / _STEP)) + 1)
    w = (end - start) / (n - 1)
    return [start + i * w for i in range(n)]


@dataclass
class DiscFigure:
    """An SVG scene of the unit disc, built layer by layer."""

    size: int = 640
    margin: float = 24.0
    label: Optional[str] = None
    _layers: List[ET.Element] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._cx = self.size / 2.0
        self._cy = self.size / 2.0
        self._radius = self.size / 2.0 - self.margin
        if self._radius <= 0:
            raise ValueError("margin leaves no room for the disc")

    # -- coordinate helpers -------------------------------------------

    def _xy(self, theta: float, radius: float = 1.0) -> Tuple[float, float]:
        return (
            self._cx + self._radius * radius * math.cos(theta),
            self._cy - self._radius * radius * math.sin(theta),
        )

    def _polyline(self, thetas: Iterable[float], radius: float) -> str:
        return " ".join(
            ("M" if i == 0 else "L") + f" {_fmt(x)} {_fmt(y)}"
            for i, (x, y) in enumerate(self._xy(t, radius) for t in thetas)
        )

    def _group(self, group: str) -> ET.Element:
        layer = ET.Element("g", {"id": group})
        self._layers.append(layer)
        return layer

    # -- layers --------------------------------------------------------

    def add_points(
        self,
        points: Sequence[DiscPoint],
        color: str = "#202020",
        dot_radius: float = 3.0,
        group: str = "points",
    ) -> None:
        layer = self._group(group)
        for p in points:
            x, y = self._xy(float(p.theta), 1.0 - float(p.depth))
            ET.SubElement(
                layer,
                "circle",
                {"cx": _fmt(x), "cy": _fmt(y), "r": f"{dot_radius:g}", "fill": color},
            )

    def add_carleson_boxes(
        self,
        boxes: Sequence[CarlesonBox],
        color: str = "#9a9a9a",
        group: str = "boxes",
    ) -> None:
        """Annular-sector outlines, one closed path per box."""
        layer = self._group(group)
        for box in boxes:
            half = math.pi * float(box.size)
            center = float(box.center)
            inner = 1.0 - float(box.size)
            if half >= math.pi:
                # the whole disc: only the inner rim is a visible edge
                ET.SubElement(
                    layer,
                    "circle",
                    {
                        "cx": _fmt(self._cx),
                        "cy": _fmt(self._cy),
                        "r": _fmt(self._radius * max(inner, 0.0)),
                        "fill": "none",
                        "stroke": color,
                        "stroke-width": "1",
                    },
                )
                continue
            thetas = _arc_samples(center - half, center + half)
            d = self._polyline(thetas, 1.0)
            if inner > 0.0:
                back = self._polyline(list(reversed(thetas)), inner)
                d += " L" + back[1:] + " Z"
            else:
                d += f" L {_fmt(self._cx)} {_fmt(self._cy)} Z"
            ET.SubElement(
                layer,
                "path",
                {"d": d, "fill": "none", "stroke": color, "stroke-width": "1"},
            )

    def add_boundary_bands(
        self,
        arc_sets: Sequence[Tuple[int, ArcSet]],
        width: float = 7.0,
        group: str = "bands",
    ) -> None:
        """One stroked path per nonempty arc set, hugging the circle.

        ``arc_sets`` pairs a node index (used for colour and the
        ``data-node`` attribute) with its boundary set; empty sets are
        skipped so the band count equals the nonempty-set count.
        """
        layer = self._group(group)
        for index, arcs in arc_sets:
            if not arcs:
                continue
            d = " ".join(
                self._polyline(_arc_samples(s, e), 1.0) for s, e in arcs.pieces
            )
            ET.SubElement(
                layer,
                "path",
                {
                    "class": "band",
                    "data-node": str(index),
                    "d": d,
                    "fill": "none",
                    "stroke": _PALETTE[index % len(_PALETTE)],
                    "stroke-width": f"{width:g}",
                    "stroke-linecap": "butt",
                },
            )

    # -- output ----------------------------------------------------------

    def to_xml(self) -> str:
        root = ET.Element(
            "svg",
            {
                "xmlns": _SVG_NS,
                "width": str(self.size),
                "height": str(self.size),
                "viewBox": f"0 0 {self.size} {self.size}",
            },
        )
        ET.SubElement(
            root, "rect", {"width": str(self.size), "height": str(self.size), "fill": "white"}
        )
        ET.SubElement(
            root,
            "circle",
            {
                "id": "unit-circle",
                "cx": _fmt(self._cx),
                "cy": _fmt(self._cy),
                "r": _fmt(self._radius),
                "fill": "none",
                "stroke": "#303030",
                "stroke-width": "1.5",
            },
        )
        root.extend(self._layers)
        if self.label:
            text = ET.SubElement(
                root,
                "text",
                {
                    "x": _fmt(self.margin),
                    "y": _fmt(self.size - 8.0),
                    "font-family": "monospace",
                    "font-size": "13",
                },
            )
            text.text = self.label
        return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(
            root, encoding="unicode"
        )


def construction_figure(seq, family, label: Optional[str] = None) -> DiscFigure:
    """Standard scene for a boundary-set construction run.

    Layers: the node points, each node's Carleson box, and one boundary
    band per nonempty assigned set.
    """
    fig = DiscFigure(label=label)
    points = list(seq.points)
    fig.add_carleson_boxes([CarlesonBox.over(p) for p in points])
    fig.add_points(points)
    fig.add_boundary_bands(list(enumerate(family.g_sets)))
    return fig
