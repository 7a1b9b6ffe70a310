"""Pure numpy implementations of the hot loops (fallback for the compiled core)."""

import numpy as np


def eval_piecewise(x, breaks, coeff, expo, logp):
    """Evaluate a padded piecewise term table at positive points x.

    ``breaks`` holds the S + 1 segment edges, from 0 up to inf.
    """
    x = np.asarray(x, dtype=float)
    seg = np.searchsorted(breaks, x, side="right") - 1
    seg = np.clip(seg, 0, coeff.shape[0] - 1)
    c = coeff[seg]
    e = expo[seg]
    k = logp[seg]
    xx = x[:, None]
    vals = c * np.power(xx, e)
    if np.any(k):
        vals = vals * np.power(np.log(xx), k)
    return vals.sum(axis=1)


def abs_power_cells(lo, hi, seg, nodes, weights, coeff, expo, logp, p, w):
    """Sum over log cells [lo_i, hi_i] of the Gauss-Legendre estimate of
    int |g(r)|^p r^w dr, where g on cell i is given by table row seg[i]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.size == 0:
        return 0.0
    la, lb = np.log(lo), np.log(hi)
    half = 0.5 * (lb - la)
    mid = 0.5 * (lb + la)
    u = mid[:, None] + half[:, None] * nodes[None, :]
    c = coeff[seg][:, None, :]
    e = expo[seg][:, None, :]
    k = logp[seg][:, None, :]
    eu = e * u[..., None]
    # scale by the largest exponential so |g|^p r^(w+1) is formed in logs
    emax = np.max(np.where(c != 0.0, eu, -np.inf), axis=2)
    emax = np.where(np.isfinite(emax), emax, 0.0)
    terms = np.where(c != 0.0, c * np.exp(eu - emax[..., None]), 0.0)
    if np.any(k):
        terms = terms * np.power(u[..., None], k)
    g = np.abs(terms.sum(axis=2))
    with np.errstate(divide="ignore"):
        f = np.where(g > 0.0, np.exp(p * (np.log(g) + emax) + (w + 1.0) * u), 0.0)
    return float(np.sum(half * (f @ weights)))
