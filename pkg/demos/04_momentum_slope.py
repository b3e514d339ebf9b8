"""Momentum of the leading-order wave against the slope m(c) as epsilon shrinks."""

import json
import pathlib

from iwave import PhysicalParams
from iwave import functionals

here = pathlib.Path(__file__).parent
p = PhysicalParams.from_mapping(json.loads((here / "configs" / "rotational.json").read_text())["params"])

rep = functionals.dprime_check(p)
print("%8s %14s %14s %10s %10s" % ("eps", "P", "m", "-P/m", "rel err"))
for r in rep.rows:
    print("%8.3f %14.6e %14.6e %10.5f %10.5f" % (r.epsilon, r.momentum, r.m, r.ratio, r.relative_error))
print("fitted order: %.3f" % rep.order)
