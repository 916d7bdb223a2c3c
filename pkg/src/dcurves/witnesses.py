"""Built-in catalogue of strips and offsets with known pair types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .dpair import construct_partner
from .surfaces import StripCurve, SurfaceCurve, surface_family

A_HELIX = 0.5
B_HELIX = 1.25**0.5  # -a^2 + b^2 = 1


@dataclass(frozen=True)
class Witness:
    name: str
    lam: float
    pair_type: int
    build: Callable[[], StripCurve] = field(repr=False)
    tags: tuple = ()
    note: str = ""

    def strip(self) -> StripCurve:
        return self.build()


def cylinder():
    return surface_family("cylinder", (-10, 10), (-10, 10))


def hyperbolic_plane():
    return surface_family("hyperbolic_plane", (0.1, 3), (-7, 7))


def hyperbolic_cylinder():
    return surface_family("hyperbolic_cylinder", (-3, 3), (-5, 5))


def plane():
    return surface_family("plane", (-5, 5), (-5, 5))


def _on(surface, u, v, t0, t1, name):
    return lambda: SurfaceCurve(surface(), u, v, t0, t1, name=name).strip()


def _geodesic_partner_base(lam: float):
    # the helix on the hyperbolic cylinder is a geodesic; offsetting it by -lam
    # gives a base whose lam-partner is that geodesic again
    helix = SurfaceCurve(hyperbolic_cylinder(), f"{A_HELIX}*t", f"{B_HELIX}*t", -1, 1, name="hc-helix").strip()
    base = construct_partner(helix, -lam)
    base.name = "hc-helix-offset"
    return base


SPACELIKE_HELIX = (f"{A_HELIX}*t", f"{B_HELIX}*t")
TIMELIKE_HELIX = (f"{B_HELIX}*t", f"{A_HELIX}*t")
GENERIC_SPACELIKE = ("0.3*t+0.1*sin(t)", "t+0.2*t^2")
GENERIC_TIMELIKE = ("2*t+0.1*sin(t)", "t+0.2*t^2")
GENERIC_H2 = ("1+0.2*sin(t)", "t+0.1*t^2")
GENERIC_HC = ("0.5*t+0.1*t^2", "1.2*t+0.1*sin(2*t)")

CATALOG: tuple = (
    Witness("circle", 0.5, 5, _on(cylinder, "0", "t", 0, 6.283185307179586, "circle"),
            ("closed-form",)),
    Witness("spacelike-helix", 0.3, 5, _on(cylinder, *SPACELIKE_HELIX, 0, 6, "spacelike-helix"),
            ("closed-form",)),
    Witness("cylinder-spacelike", 0.2, 5, _on(cylinder, *GENERIC_SPACELIKE, 0, 2, "cylinder-spacelike"),
            ("generic",)),
    Witness("timelike-helix", 0.3, 3, _on(cylinder, *TIMELIKE_HELIX, 0, 6, "timelike-helix"),
            ("closed-form",)),
    Witness("cylinder-timelike", 0.2, 3, _on(cylinder, *GENERIC_TIMELIKE, 0, 1, "cylinder-timelike"),
            ("generic",)),
    Witness("timelike-helix-far", -3.0, 2, _on(cylinder, *TIMELIKE_HELIX, 0, 6, "timelike-helix"),
            ("closed-form",), "offset beyond the light cone of the base"),
    Witness("cylinder-timelike-far", -2.5, 2, _on(cylinder, *GENERIC_TIMELIKE, 0, 1, "cylinder-timelike"),
            ("generic",)),
    Witness("h2-circle", 0.3, 1, _on(hyperbolic_plane, "1", "t", 0, 6, "h2-circle"),
            ("closed-form", "principal-partner")),
    Witness("h2-geodesic", 0.3, 1, _on(hyperbolic_plane, "t", "0.3", 0.2, 2, "h2-geodesic"),
            ("closed-form", "geodesic-base", "principal-partner")),
    Witness("h2-generic", 0.2, 1, _on(hyperbolic_plane, *GENERIC_H2, 0, 3, "h2-generic"),
            ("generic", "principal-partner")),
    Witness("hc-helix", 0.3, 1, _on(hyperbolic_cylinder, f"{A_HELIX}*t", f"{B_HELIX}*t", -1, 1, "hc-helix"),
            ("closed-form", "geodesic-base")),
    Witness("hc-generic", 0.2, 1, _on(hyperbolic_cylinder, *GENERIC_HC, -1, 1, "hc-generic"),
            ("generic",)),
    Witness("hc-geodesic-partner", 0.3, 1, lambda: _geodesic_partner_base(0.3),
            ("generic", "geodesic-partner")),
    Witness("hc-helix-far", 3.0, 4, _on(hyperbolic_cylinder, f"{A_HELIX}*t", f"{B_HELIX}*t", -1, 1, "hc-helix"),
            ("closed-form", "geodesic-base")),
    Witness("hc-generic-far", 4.0, 4, _on(hyperbolic_cylinder, *GENERIC_HC, -1, 1, "hc-generic"),
            ("generic",)),
    Witness("planar-ellipse", 0.2, 1, _on(plane, "2*cos(t)", "-sin(t)", 0, 6.283185307179586, "planar-ellipse"),
            ("asymptotic-pair",)),
)


def witness(name: str) -> Witness:
    for w in CATALOG:
        if w.name == name:
            return w
    raise KeyError(f"unknown witness {name!r}")


def by_type(pair_type: int) -> list:
    return [w for w in CATALOG if w.pair_type == pair_type]
