"""Independent oracles shared by the unit and acceptance suites.

These deliberately avoid the library's own evaluation paths: the region
probability below samples plain Gaussians and evaluates the defining
inequalities directly, rather than quadrature over the derived integral
forms.
"""

import math

import numpy as np

from polarkit.bounds import DISCARD


def mc_region_probability(mu, sig, L, alpha, samples, seed):
    """Monte Carlo estimate of the retention-bound probability mass.

    Sums, by direct indicator evaluation, the all-positive region, the m
    boundary regions (prefix positive, the next coordinate in
    [-ln(beta), 0)), and the alpha/sign-flip region of the first
    coordinate. Returns (estimate, standard_error).
    """
    m = L.bit_length() - 1
    mu = np.asarray(mu, dtype=np.float64)
    sig = np.asarray(sig, dtype=np.float64)
    rng = np.random.Generator(np.random.Philox(key=seed))
    done = 0
    hits = 0
    while done < samples:
        t = min(10**6, samples - done)
        X = mu + sig * rng.standard_normal((t, m + 1))
        acc = np.all(X >= 0, axis=1)
        for i in range(1, m + 1):
            d = m - i + 1
            cond = np.all(X[:, :d] >= 0, axis=1)
            a = np.log(L) + X[:, 0]
            for c in range(1, d):
                a = a - np.log1p(np.exp(-X[:, c]))
            neg_ln_beta = -(a + np.log1p(-np.clip(np.exp(-a), 0.0, 1.0 - 1e-16)))
            tcol = X[:, d]
            acc |= cond & (tcol < 0) & (tcol >= neg_ln_beta)
        if alpha is DISCARD:
            acc |= X[:, 0] < 0
        else:
            acc |= (X[:, 0] < 0) & (X[:, 0] >= math.log(alpha))
        hits += int(acc.sum())
        done += t
    p = hits / samples
    return p, math.sqrt(max(p * (1 - p), 1e-12) / samples)


def log_interp_crossing(xs, log_ys, target_log):
    """SNR at which a log-BLER curve crosses a level, by linear
    interpolation in (x, log y); xs ascending, ys decreasing."""
    for (x0, y0), (x1, y1) in zip(zip(xs, log_ys), zip(xs[1:], log_ys[1:])):
        if (y0 - target_log) * (y1 - target_log) <= 0 and y0 != y1:
            return x0 + (target_log - y0) * (x1 - x0) / (y1 - y0)
    raise ValueError("level not bracketed by the supplied curve")
