"""
Cavity and qubit losses in the Jaynes-Cummings model
====================================================

A qubit coupled to a truncated cavity mode (21 Fock levels). Both the
cavity loss kappa(t) and the qubit decay gamma(t) are Bernstein
polynomials. We check that the simulated series obey the Heisenberg
equations of motion for the true rates and violate them for wrong ones.
"""

import numpy as np

from lindblad_learn.bernstein import BernsteinRate
from lindblad_learn.inversion import invert_jc, jc_residuals
from lindblad_learn.models import get_spec, instantiate
from lindblad_learn.simulate import evolve

spec = get_spec("jc")
inst = instantiate(spec, np.random.default_rng(3))
print("parameters:", {k: round(v, 4) for k, v in inst.params.items()})
print("targets:", {k: round(v, 4) for k, v in inst.targets.items()})

traj = evolve(inst.system, inst.rho0, spec.times, inst.observables, record_states=True)
print("<n>(0) =", traj.series["n_phot"][0], " <n>(10) =", round(traj.series["n_phot"][-1], 4))

# %%
# Residuals with the true rates
# -----------------------------
# Left-hand sides are finite differences of the recorded series; the cross
# terms such as Im<a sigma_+> come from the stored density matrices.

kappa, gamma = inst.system.channels[0].rate, inst.system.channels[1].rate
res = jc_residuals(traj, inst.params, gamma, kappa)
for name, value in res.max.items():
    print(f"{name:>10}: max residual {value:.2e}")

# %%
# Scaling kappa away from the truth makes the photon-number equation fail
# in proportion to the error.

for factor in (1.0, 1.1, 1.5, 2.0):
    wrong = BernsteinRate(tuple(factor * c for c in kappa.coeffs), kappa.t_span)
    r = jc_residuals(traj, inst.params, gamma, wrong)
    print(f"kappa x {factor:.1f}: photon residual {r.max['n_phot']:.2e}")

# %%
# Solving the same two equations for the rates gives them back pointwise.

k_est, g_est = invert_jc(traj, inst.params)
print("kappa worst rel. error:", k_est.max_rel_error(kappa(k_est.times)))
print("gamma worst rel. error:", g_est.max_rel_error(gamma(g_est.times)))
