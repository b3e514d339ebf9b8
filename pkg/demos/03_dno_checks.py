"""Dirichlet-Neumann operators on a wavy interface: symbol, symmetry, shape derivatives."""

import json
import pathlib

from iwave import PhysicalParams
from iwave import dno_operators as dno
from iwave import verification as ver

here = pathlib.Path(__file__).parent
p = PhysicalParams.from_mapping(json.loads((here / "configs" / "rotational.json").read_text())["params"])

for layer in ("plus", "minus"):
    print(layer, "flat symbol error: %.2e" % ver.flat_symbol_error(p, layer))
    eta, xi, zeta, _ = ver.operator_case(p, 0)
    a = dno.pairing(zeta, dno.dno_apply(eta, xi, layer, p))
    b = dno.pairing(xi, dno.dno_apply(eta, zeta, layer, p))
    print(layer, "symmetry gap: %.2e" % abs(a - b))
    r1, r2 = ver.shape_derivative_errors(p, 0, layer)
    print(layer, "shape derivative rel err: first %.2e  second %.2e" % (r1, r2))

for entry in ver.operators_suite(p):
    print("%-36s %.2e  %s" % (entry["name"], entry["value"], "ok" if entry["passed"] else "FAIL"))
