"""Critical values, dispersion roots and the double zero eigenvalue at alpha0."""

import json
import pathlib

import numpy as np

from iwave import PhysicalParams, nondim
from iwave import dispersion, spatial_linear

here = pathlib.Path(__file__).parent
p = PhysicalParams.from_mapping(json.loads((here / "configs" / "rotational.json").read_text())["params"])
q = nondim(p)

print("alpha  = %.6f   alpha0 = %.6f" % (q.alpha, q.alpha0))
print("beta   = %.6f   beta0  = %.6f" % (q.beta, q.beta0))
print("eps    = %.6f   K      = %.6f" % (q.epsilon, q.coeff_K))

# above alpha0 the residual stays positive, below it one real root appears
for alpha in (q.alpha0 + 0.05, q.alpha0 - 0.05):
    qa = q.with_alpha(alpha)
    print("alpha = %.4f  roots in (0, 10]:" % alpha, dispersion.find_roots(qa, 10.0))

# at alpha0 the zero wavenumber is a double root
q0 = q.with_alpha(q.alpha0)
cert = dispersion.double_root_certificate(q0)
print("residual(0) = %.2e   D''(0) fd = %.8f   expected = %.8f"
      % (cert["residual_0"], cert["second_derivative_fd"], cert["expected"]))

chain = spatial_linear.jordan_chain_check(q0, 64)
print("Jordan residuals: %.1e %.1e   pairing = %.10f   beta* = %.10f"
      % (chain["residual_e1"], chain["residual_e2"], chain["pairing"], chain["beta_star"]))

# imaginary eigenvalues of the linear operator sit at the dispersion roots
qb = q.with_alpha(q.alpha0 - 0.05)
ks = spatial_linear.imaginary_wavenumbers(spatial_linear.spectrum(spatial_linear.assemble(qb, 64), 10.0))
print("eigen wavenumbers:", np.sort(ks[ks > 0]))
