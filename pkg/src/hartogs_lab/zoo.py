"""Curated test domains exercising both boundary cases."""

import math
from dataclasses import dataclass

from .domain import RadialProfile, disc, make_domain
from .errors import DomainError

DIVERGENT = "divergent"
BOUNDED = "bounded"


@dataclass(frozen=True)
class ZooEntry:
    name: str
    label: str
    base: object
    inner: RadialProfile
    outer: RadialProfile
    case_tag: int
    expected: str
    note: str = ""

    def build(self):
        return make_domain(self.base, self.inner, self.outer, self.case_tag, name=self.name)


def zoo():
    unit = disc(0j, 1.0)
    log4 = -math.log(4.0)
    return [
        ZooEntry("Z1", "product-annulus", unit,
                 RadialProfile("constant", (0.0,)), RadialProfile("constant", (-math.log(2.0),)),
                 1, BOUNDED, "D(0,1) x A(1,2): the boundary contains fiber annuli"),
        ZooEntry("Z2", "superharmonic-shell", unit,
                 RadialProfile("quadratic-radial", (-1.0,)), RadialProfile("constant", (log4,)),
                 1, DIVERGENT, "inner |w| = e^{|z|^2}, outer |w| = 4; electric energy j01^2 + 4(n-1)"),
        ZooEntry("Z3", "harmonic-patch", unit,
                 RadialProfile("mollified-plateau", (0.25, 0.05)), RadialProfile("constant", (log4,)),
                 1, BOUNDED, "phi harmonic (zero) on |z| < 1/2, superharmonic elsewhere"),
        ZooEntry("Z4", "complete-hartogs", unit,
                 RadialProfile("paraboloid-cap", (0.1, 0.2)), RadialProfile("quadratic-radial", (1.0,)),
                 2, DIVERGENT, "outer |w| = e^{-|z|^2}, inner cap |w| = 0.2|z|^2 + 0.1"),
    ]


def zoo_entry(name):
    for e in zoo():
        if e.name.lower() == name.lower() or e.label == name:
            return e
    raise DomainError(f"unknown zoo domain {name!r}; known: {[e.name for e in zoo()]}")


def zoo_domain(name):
    return zoo_entry(name).build()
