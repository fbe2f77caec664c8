"""
Monitoring a run through gamma and the ELBO
===========================================

The damping chosen at each iteration and the ELBO of the current proposal
are both cheap by-products of the batch, and together they show when a run
has settled.
"""

import matplotlib.pyplot as plt

from dais.experiments import monitor_run

# %%
# Narrow sinusoidal ridge in 2-D (c = 0.1) and a 100-dimensional correlated
# Gaussian (c = 0.3), both started from N(0, I). Smaller batches than a
# production run keep this quick.
runs = {
    "sine2d": monitor_run("sine2d", s_count=20_000, iters=60),
    "corr-gauss-100": monitor_run("corr-gauss-100", s_count=20_000, iters=60),
}

fig, axes = plt.subplots(2, 2, figsize=(9, 5), sharex=True)
for col, (name, rows) in enumerate(runs.items()):
    axes[0, col].plot(rows[:, 0], rows[:, 1])
    axes[0, col].set_title(name)
    axes[0, col].set_ylabel("gamma")
    axes[1, col].semilogy(rows[:, 0], rows[:, 2] - rows[:, 2].min() + 1e-3)
    axes[1, col].set_ylabel("-ELBO (shifted)")
    axes[1, col].set_xlabel("iteration")
    # a moment-matched Gaussian on the narrow ridge keeps a large -ELBO: it covers the curve
    print(f"{name}: final gamma {rows[-1, 1]:.3f}, final -ELBO {rows[-1, 2]:.3f}")
fig.tight_layout()
fig.savefig("monitoring.png", dpi=120)
