"""Reduced planar system, its homoclinic orbit and the leading-order interface."""

import json
import pathlib

import numpy as np

from iwave import PhysicalParams, nondim
from iwave import profile, reduced_dynamics as rd

here = pathlib.Path(__file__).parent
p = PhysicalParams.from_mapping(json.loads((here / "configs" / "rotational.json").read_text())["params"])
p = profile.at_epsilon(p, 0.1)
q = nondim(p)
sys = rd.ReducedSystem.from_params(q)
print("K = %.6f   equilibria:" % sys.K, sys.equilibria())

X = np.linspace(-20, 20, 401)
print("homoclinic residual: %.2e" % rd.homoclinic_residual(X, sys))

# integrate from the orbit at X = -10 and compare with the closed form
traj = rd.integrate(rd.homoclinic(-10.0, sys), sys, (-10.0, 10.0))
Qexact, _ = rd.homoclinic(traj[:, 0], sys)
print("max |Q - Q_exact| along the flow: %.2e" % np.max(np.abs(traj[:, 1] - Qexact)))
print("Hamiltonian drift: %.2e" % np.ptp(traj[:, 3]))

wave = profile.leading_order(p)
print(wave.metadata())
