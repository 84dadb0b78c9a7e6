"""Independent numerical oracles used by the tests.

Everything here deliberately avoids the closed forms under test: posterior
summaries come from Gauss-Hermite quadrature over the latent trait, and the
likelihood surface is probed by brute-force grid search.
"""

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

GH_NODES, _GH_RAW_WEIGHTS = hermegauss(61)
GH_WEIGHTS = _GH_RAW_WEIGHTS / np.sqrt(2.0 * np.pi)


def gh_posterior_mean(x_row, mu, lam, psi) -> float:
    """EAP of the trait by 61-node Gauss-Hermite quadrature."""
    resid = x_row[None, :] - mu[None, :] - np.outer(GH_NODES, lam)
    log_lik = -0.5 * ((resid**2) / psi + np.log(2.0 * np.pi * psi)).sum(axis=1)
    log_w = log_lik + np.log(GH_WEIGHTS)
    log_w -= log_w.max()
    w = np.exp(log_w)
    return float((w * GH_NODES).sum() / w.sum())


def gh_marginal_loglik(x, mu, lam, psi) -> float:
    """Marginal log-likelihood by quadrature over the trait, instance by instance."""
    total = 0.0
    for row in np.asarray(x, dtype=float):
        resid = row[None, :] - mu[None, :] - np.outer(GH_NODES, lam)
        log_lik = -0.5 * ((resid**2) / psi + np.log(2.0 * np.pi * psi)).sum(axis=1)
        log_w = log_lik + np.log(GH_WEIGHTS)
        peak = log_w.max()
        total += peak + np.log(np.exp(log_w - peak).sum())
    return total


def two_column_grid_loglik(C, n):
    """Vectorized Gaussian log-likelihood on a (lam1, lam2, psi1, psi2) grid.

    Returns a function of four broadcastable arrays; C is the divisor-n
    sample covariance of the centered 2-column data.
    """
    c11, c22, c12 = C[0, 0], C[1, 1], C[0, 1]

    def loglik(l1, l2, p1, p2):
        s11 = l1 * l1 + p1
        s22 = l2 * l2 + p2
        s12 = l1 * l2
        det = s11 * s22 - s12 * s12
        trace = (c11 * s22 - 2.0 * c12 * s12 + c22 * s11) / det
        return -0.5 * n * (2.0 * np.log(2.0 * np.pi) + np.log(det) + trace)

    return loglik


def grid_search_two_columns(C, n, coarse_step=0.1, fine_step=0.01):
    """Best log-likelihood over an exhaustive two-stage parameter grid.

    Stage one sweeps a wide box at ``coarse_step``; stage two exhaustively
    refines around the best coarse cell at ``fine_step``.
    """
    loglik = two_column_grid_loglik(C, n)

    def sweep(l1s, l2s, p1s, p2s):
        best, arg = -np.inf, None
        grids = np.meshgrid(l2s, p1s, p2s, indexing="ij")
        for l1 in l1s:
            values = loglik(l1, *grids)
            flat = np.unravel_index(np.argmax(values), values.shape)
            if values[flat] > best:
                best = float(values[flat])
                arg = (float(l1), *(float(g[flat]) for g in grids))
        return best, arg

    lam_axis = np.arange(-2.0, 2.0 + 1e-12, coarse_step)
    psi_axis = np.arange(0.1, 2.5 + 1e-12, coarse_step)
    _, coarse_arg = sweep(lam_axis, lam_axis, psi_axis, psi_axis)

    def around(center, positive=False):
        axis = np.arange(center - coarse_step, center + coarse_step + 1e-12, fine_step)
        return axis[axis >= fine_step] if positive else axis

    best, _ = sweep(
        around(coarse_arg[0]),
        around(coarse_arg[1]),
        around(coarse_arg[2], positive=True),
        around(coarse_arg[3], positive=True),
    )
    return best


def trapezoid_auc(xs, ys) -> float:
    """Plain trapezoid area, written out longhand."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    total = 0.0
    for i in range(len(xs) - 1):
        total += 0.5 * (ys[i] + ys[i + 1]) * (xs[i + 1] - xs[i])
    return total
