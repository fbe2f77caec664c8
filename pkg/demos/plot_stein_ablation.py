"""
What the control variates buy
=============================

The same adaptive loop with the Stein estimates replaced by standard
weighted moments. Both runs use identical batches; only the moment
estimator differs.
"""

import matplotlib.pyplot as plt
import numpy as np

import dais

q = dais.standard_normal(10)
target = dais.correlated_gaussian_target(10)
cov = target.params.covariance


def errors(report):
    return [np.linalg.norm(r.covariance - cov) / np.linalg.norm(cov) for r in report.records]


# %%
# Twenty seeds at S = 10^4 and N_ESS = 100.
fig, ax = plt.subplots(figsize=(6, 3.5))
finals = []
for seed in range(20):
    cfg = dais.DaisConfig(s_count=10_000, n_ess=100, seed=seed)
    a, b = dais.run_dais(q, target, cfg), dais.run_plain_ais(q, target, cfg)
    ax.semilogy(errors(a), "C0", alpha=0.4)
    ax.semilogy(errors(b), "C1", alpha=0.4)
    finals.append((errors(a)[-1], errors(b)[-1]))
finals = np.array(finals)
print("median final relative covariance error: Stein %.1e, standard %.1e" % tuple(np.median(finals, axis=0)))
print("Stein better in %d of 20 seeds" % np.sum(finals[:, 0] <= finals[:, 1]))
ax.set_xlabel("iteration")
ax.set_ylabel("relative covariance error")
ax.plot([], [], "C0", label="Stein")
ax.plot([], [], "C1", label="standard")
ax.legend()
fig.tight_layout()
fig.savefig("stein_ablation.png", dpi=120)
