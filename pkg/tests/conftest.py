import numpy as np
import pytest

from irtfolio.crm import CrmParameters, fit_crm, logit_transform, simulate_crm


def make_params(mu, lam, psi, names=None):
    mu = np.asarray(mu, dtype=float)
    names = names or tuple(f"a{j}" for j in range(len(mu)))
    return CrmParameters(
        algorithm_names=names,
        mu=mu,
        lam=np.asarray(lam, dtype=float),
        psi=np.asarray(psi, dtype=float),
        iterations=0,
        loglik_trace=np.zeros(1),
        converged=True,
    )


RECOVERY_TRUE = make_params(
    mu=[0.5, -0.3, 1.0, 0.2, -0.8, 1.4],
    lam=[1.2, 0.9, 1.5, -1.0, 2.0, 0.8],
    psi=[0.3, 0.5, 0.25, 0.4, 0.2, 0.6],
    names=("alpha", "bravo", "charlie", "delta", "echo", "foxtrot"),
)
RECOVERY_SEED = 12345
RECOVERY_N = 400


@pytest.fixture(scope="session")
def recovery_case():
    """400x6 simulation from known parameters plus its fit."""
    z = simulate_crm(RECOVERY_N, RECOVERY_TRUE, RECOVERY_SEED)
    x = logit_transform(z)
    fit = fit_crm(x, RECOVERY_TRUE.algorithm_names)
    return {"true": RECOVERY_TRUE, "z": z, "x": x, "fit": fit}
