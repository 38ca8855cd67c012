# %% [markdown]
# # Thermal states on the double oscillator
#
# Modular data, the KMS boundary condition and thermal coherent states on a
# truncated two-mode Fock space.

# %%
import numpy as np

from cohstates import landau

beta, omega = 1.0, 1.0

# %% [markdown]
# The thermal vector and the modular operator.

# %%
th = landau.thermal_vector(beta, omega, 30)
print("norm^2 of thermal vector:", th.norm2())
mt = landau.modular_triple(beta, omega, 30)
print("Delta[2, 5] =", mt.delta[2, 5], " e^3 =", np.exp(3))

# %% [markdown]
# KMS continuation residual against the cutoff.

# %%
for K in (10, 20, 30, 40):
    r = landau.kms_check(0.3, 0.2j, beta, 0.7, K, omega)
    print(f"K={K:2d}  residual={r.residual:.2e}  leakage={r.leakage:.2e}")

# %% [markdown]
# Two constructions of the same thermal coherent state.

# %%
a = landau.kms_cs(0.4, beta, 30)
b = landau.kms_cs(0.4, beta, 30, route="photon-added")
print("route difference:", np.linalg.norm(a.coeffs - b.coeffs))

# %% [markdown]
# Integrating the family over the plane gives identity on the first mode
# times the Gibbs weights on the second.

# %%
rep = landau.kms_cs_resolution(beta, block=4, R=6.0)
print(np.round(np.real(np.diag(rep.matrix)), 6))
print("residual against the thermal law:", rep.residual)

# %% [markdown]
# Phase-space wavefunctions and their ladder action.

# %%
print(landau.intertwining_check())
