"""Stability verdicts and the spectrum of the limiting linearized operator."""

import json
import pathlib

import numpy as np

from iwave import PhysicalParams
from iwave import profile, spectral, stability

here = pathlib.Path(__file__).parent
for name in ("irrotational", "rotational"):
    p = PhysicalParams.from_mapping(json.loads((here / "configs" / f"{name}.json").read_text())["params"])
    rep = stability.classify(profile.at_epsilon(p, 0.1))
    print("%-13s m = %.4e  m' = %.4e  %s  %s" % (name, rep.m, rep.m_prime, rep.polarity.value, rep.verdict.value))

res = spectral.limiting_spectrum(vectors=True)
print("eigenvalues below 1:", np.round(res.eigenvalues, 8))
print("zero mode vs sech^2 derivative: |cos| = %.10f" % spectral.zero_mode_correlation(res))

p = PhysicalParams.from_mapping(json.loads((here / "configs" / "rotational.json").read_text())["params"])
print("tau* = %.6f" % spectral.tau_star(p))
