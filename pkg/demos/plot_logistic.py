"""
Bayesian logistic regression
============================

Starting from the Laplace approximation, DAIS corrects the posterior
Gaussian using importance weights. Natural-gradient VI on the same model
targets the reverse KL and tends to report smaller posterior spreads.
"""

import numpy as np

import dais

# %%
# Synthetic data: 200 observations, 5 features, Gaussian prior with variance 10.
data, coef = dais.synthetic_logistic_data(200, 5, seed=1)
target = dais.logistic_target(data)
laplace = dais.laplace_init(target, np.zeros(5))

dais_run = dais.run_dais(laplace, target, dais.DaisConfig(seed=0))
vi_run = dais.run_ngvi(laplace, target, dais.NgviConfig(seed=0))

# %%
# A brute-force reference: one million self-normalized importance samples
# from the Laplace Gaussian.
x = dais.gaussian_sample(laplace, 1_000_000, seed=2024)
logw = target.log_density(x) - dais.gaussian_log_density(laplace, x)
w = np.exp(logw - logw.max())
w /= w.sum()
ref_mean = w @ x
ref_sd = np.sqrt(w @ (x - ref_mean) ** 2)

print("coef   true    ref mean  DAIS mean  ref sd  DAIS sd  Laplace sd  VI sd")
for i in range(5):
    print(
        f"{i:>4} {coef[i]:7.3f} {ref_mean[i]:9.3f} {dais_run.final.mean[i]:10.3f}"
        f" {ref_sd[i]:7.3f} {np.sqrt(dais_run.final.covariance[i, i]):8.3f}"
        f" {np.sqrt(laplace.covariance[i, i]):11.3f} {np.sqrt(vi_run.final.covariance[i, i]):6.3f}"
    )
print(f"DAIS: {dais_run.iterations} iterations, gammas {np.round(dais_run.gammas(), 3)}")
