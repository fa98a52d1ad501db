# %% [markdown]
# # t-monotone densities and what integer moments miss
#
# A density is t-monotone when the variable factors as ``Beta(1, t) * Y``.
# The mixing law's Mellin transform is then recovered by division.

# %%
from mellinkit import (Exponential, Gamma, Uniform, beta_mix, check_k_monotone,
                       indeterminacy_demo, recover_mixing_mellin)

# %%
print(check_k_monotone(beta_mix(Gamma(2.0), 3), 3, [0.0, 10.0]).passed)
print(check_k_monotone(Uniform(0.0, 1.0), 2, [0.0, 1.0]).passed)

# %%
rec = recover_mixing_mellin(Exponential(1.0), 2.0, [1.0, 2.0, 3.0])
print([v.value for v in rec], rec.certificate.passed)
print(recover_mixing_mellin(Uniform(0.0, 1.0), 2.0).certificate.passed)

# %% [markdown]
# The log-normal law shares its integer moments with a sinusoidal
# perturbation of its density.  The two Mellin transforms differ by the
# relative factor ``eps exp(-2 pi^2 / sigma2) sin(2 pi lam)``: zero at
# integers and half-integers, and about 1e-9 at its peaks for unit
# log-variance.  A large log-variance makes the gap visible.

# %%
rep = indeterminacy_demo(0.0, 1.0, 0.5, k_max=8, lambda_probe=[0.25, 0.5])
print("integer moments:", rep.integer_max_gap)
print("probes:", rep.probe_rows)
wide = indeterminacy_demo(0.0, 8.0, 0.5, k_max=2, lambda_probe=[0.25])
print("log-variance 8:", wide.probe_rows, wide.exact_probe_rows)
