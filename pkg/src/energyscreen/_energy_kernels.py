"""Hot loops for sample energy distances.

Two implementations of the same sums live here: compiled loops (numba, with
Kahan-compensated accumulation) and vectorised numpy reductions (pairwise
summation along contiguous axes). ``energy.py`` dispatches between them.
Inputs are column-major views: ``xt`` has shape ``(d, n1)``, ``yt`` ``(d, n2)``.
"""

import math

import numpy as np

from ._backend import njit, prange
from .kernels import apply_gamma

# Cap on temporary array size (elements) for the numpy path.
_CHUNK_ELEMS = 1 << 22


# Below this argument the gamma1/gamma2 series are exact to rounding.
_SERIES_CUT = 0.01
_LN2 = math.log(2.0)


@njit(cache=True, inline="always")
def _gamma(t, code):
    # libm expm1/log1p cost several times exp; short series cover small t
    if code == 1:
        if t < _SERIES_CUT:
            return t * (1.0 - t * (0.5 - t * (1.0 / 6 - t * (1.0 / 24 - t * (1.0 / 120
                                                                           - t / 720)))))
        return 1.0 - math.exp(-t)
    elif code == 2:
        if t < _SERIES_CUT:
            return t * (1.0 - t * (0.5 - t * (1.0 / 3 - t * (0.25 - t * (0.2 - t * (
                1.0 / 6 - t * (1.0 / 7 - t * 0.125)))))))
        return math.log1p(t)
    return math.sqrt(t)


@njit(cache=True, inline="always")
def _add(acc, t, code):
    """Add ``gamma(t)`` to the running total ``acc = (sum, carry, prod, exp2)``.

    Kahan summation, except that gamma2 terms past the series range are
    multiplied into ``prod * 2**exp2`` as ``1 + t``; one logarithm at the end
    replaces a log1p per term.
    """
    s, c, p, e = acc
    if code == 2 and t >= _SERIES_CUT:
        p *= 1.0 + t
        if p > 1e250:
            fr, ex = math.frexp(p)
            p = fr
            e += ex
        return s, c, p, e
    v = _gamma(t, code) - c
    tot = s + v
    return tot, (tot - s) - v, p, e


@njit(cache=True, inline="always")
def _total(acc):
    s, c, p, e = acc
    return s + (math.log(p) + e * _LN2)


@njit(cache=True)
def _norms(n1, n2, vstat):
    """Weights of the cross and within sums.

    The unbiased estimator averages within-class terms over distinct pairs;
    the plug-in (V-statistic) version averages over all ``n^2`` ordered pairs,
    which makes it the energy distance of the two empirical distributions and
    hence never negative.
    """
    if vstat:
        return 2.0 / (n1 * n2), 2.0 / (n1 * n1), 2.0 / (n2 * n2)
    return 2.0 / (n1 * n2), 2.0 / (n1 * (n1 - 1)), 2.0 / (n2 * (n2 - 1))


@njit(cache=True)
def _column_sums(x, y, code):
    """Compensated sums of gamma over cross pairs, class-1 pairs and class-2 pairs."""
    n1 = x.shape[0]
    n2 = y.shape[0]
    acc = (0.0, 0.0, 1.0, 0)
    for a in range(n1):
        xa = x[a]
        for b in range(n2):
            t = xa - y[b]
            acc = _add(acc, t * t, code)
    cross = _total(acc)
    acc = (0.0, 0.0, 1.0, 0)
    for a in range(n1 - 1):
        xa = x[a]
        for b in range(a + 1, n1):
            t = xa - x[b]
            acc = _add(acc, t * t, code)
    w1 = _total(acc)
    acc = (0.0, 0.0, 1.0, 0)
    for a in range(n2 - 1):
        ya = y[a]
        for b in range(a + 1, n2):
            t = ya - y[b]
            acc = _add(acc, t * t, code)
    return cross, w1, _total(acc)


@njit(cache=True, parallel=True)
def marginal_energies_numba(xt, yt, code, vstat):
    d = xt.shape[0]
    n1 = xt.shape[1]
    n2 = yt.shape[1]
    out = np.empty(d)
    cross_norm, w1_norm, w2_norm = _norms(n1, n2, vstat)
    for k in prange(d):
        cross, w1, w2 = _column_sums(xt[k], yt[k], code)
        out[k] = cross_norm * cross - w1_norm * w1 - w2_norm * w2
    return out


@njit(cache=True)
def _pair_sums(xi, xj, yi, yj, code):
    n1 = xi.shape[0]
    n2 = yi.shape[0]
    acc = (0.0, 0.0, 1.0, 0)
    for a in range(n1):
        for b in range(n2):
            u = xi[a] - yi[b]
            w = xj[a] - yj[b]
            acc = _add(acc, 0.5 * (u * u + w * w), code)
    cross = _total(acc)
    acc = (0.0, 0.0, 1.0, 0)
    for a in range(n1 - 1):
        for b in range(a + 1, n1):
            u = xi[a] - xi[b]
            w = xj[a] - xj[b]
            acc = _add(acc, 0.5 * (u * u + w * w), code)
    w1 = _total(acc)
    acc = (0.0, 0.0, 1.0, 0)
    for a in range(n2 - 1):
        for b in range(a + 1, n2):
            u = yi[a] - yi[b]
            w = yj[a] - yj[b]
            acc = _add(acc, 0.5 * (u * u + w * w), code)
    return cross, w1, _total(acc)


@njit(cache=True, parallel=True)
def pair_energy_matrix_numba(xt, yt, code, vstat):
    d = xt.shape[0]
    n1 = xt.shape[1]
    n2 = yt.shape[1]
    cross_norm, w1_norm, w2_norm = _norms(n1, n2, vstat)
    out = np.full((d, d), np.nan)
    # every cell is written by exactly one iteration, so the result does not
    # depend on how prange schedules rows
    for i in prange(d):
        for j in range(i + 1, d):
            cross, w1, w2 = _pair_sums(xt[i], xt[j], yt[i], yt[j], code)
            e = cross_norm * cross - w1_norm * w1 - w2_norm * w2
            out[i, j] = e
            out[j, i] = e
    return out


@njit(cache=True, parallel=True)
def pair_energies_for_numba(xt, yt, left, right, code, vstat):
    """Pair energies for an explicit list of column pairs."""
    m = left.shape[0]
    n1 = xt.shape[1]
    n2 = yt.shape[1]
    cross_norm, w1_norm, w2_norm = _norms(n1, n2, vstat)
    out = np.empty(m)
    for p in prange(m):
        i = left[p]
        j = right[p]
        cross, w1, w2 = _pair_sums(xt[i], xt[j], yt[i], yt[j], code)
        out[p] = cross_norm * cross - w1_norm * w1 - w2_norm * w2
    return out


# ---------------------------------------------------------------- numpy path

def _squared_diff_blocks(xt, yt):
    """Condensed squared differences per column: cross, within-1, within-2.

    Each block has one row per column so sums run along the contiguous axis.
    """
    n1 = xt.shape[1]
    n2 = yt.shape[1]
    cross = (xt[:, :, None] - yt[:, None, :]).reshape(xt.shape[0], n1 * n2)
    a1, b1 = np.triu_indices(n1, 1)
    a2, b2 = np.triu_indices(n2, 1)
    w1 = xt[:, a1] - xt[:, b1]
    w2 = yt[:, a2] - yt[:, b2]
    return cross * cross, w1 * w1, w2 * w2


def _combine(cross_sum, w1_sum, w2_sum, n1, n2, vstat):
    cn, n1n, n2n = _norms.py_func(n1, n2, vstat)
    return cn * cross_sum - n1n * w1_sum - n2n * w2_sum


def marginal_energies_numpy(xt, yt, kernel, vstat=False):
    d, n1 = xt.shape
    n2 = yt.shape[1]
    per_col = n1 * n2 + n1 * n1 // 2 + n2 * n2 // 2
    step = max(1, _CHUNK_ELEMS // max(per_col, 1))
    out = np.empty(d)
    for lo in range(0, d, step):
        hi = min(d, lo + step)
        cross, w1, w2 = _squared_diff_blocks(xt[lo:hi], yt[lo:hi])
        out[lo:hi] = _combine(apply_gamma(kernel, cross).sum(axis=1),
                              apply_gamma(kernel, w1).sum(axis=1),
                              apply_gamma(kernel, w2).sum(axis=1), n1, n2, vstat)
    return out


def _pair_block_energies(blocks, rows_i, rows_j, kernel, n1, n2, vstat):
    sums = []
    for block in blocks:
        arg = 0.5 * (block[rows_i] + block[rows_j])
        sums.append(apply_gamma(kernel, arg).sum(axis=1))
    return _combine(sums[0], sums[1], sums[2], n1, n2, vstat)


def pair_energy_matrix_numpy(xt, yt, kernel, vstat=False):
    d, n1 = xt.shape
    n2 = yt.shape[1]
    blocks = _squared_diff_blocks(xt, yt)
    width = sum(b.shape[1] for b in blocks)
    step = max(1, _CHUNK_ELEMS // max(width, 1))
    out = np.full((d, d), np.nan)
    for i in range(d - 1):
        for lo in range(i + 1, d, step):
            js = np.arange(lo, min(d, lo + step))
            e = _pair_block_energies(blocks, np.full(js.size, i), js, kernel, n1, n2,
                                     vstat)
            out[i, js] = e
            out[js, i] = e
    return out


def pair_energies_for_numpy(xt, yt, left, right, kernel, vstat=False):
    n1 = xt.shape[1]
    n2 = yt.shape[1]
    out = np.empty(left.shape[0])
    for p in range(left.shape[0]):
        sub_x = xt[[left[p], right[p]]]
        sub_y = yt[[left[p], right[p]]]
        blocks = _squared_diff_blocks(sub_x, sub_y)
        out[p] = _pair_block_energies(blocks, np.array([0]), np.array([1]),
                                      kernel, n1, n2, vstat)[0]
    return out


def _gram(diffs, step):
    """``G[i, j] = sum_k exp(-D[i,k]^2 / 2) exp(-D[j,k]^2 / 2)``, built in column chunks."""
    d, width = diffs.shape
    g = np.zeros((d, d))
    for lo in range(0, width, step):
        f = np.exp(-0.5 * np.square(diffs[:, lo:lo + step]))
        g += f @ f.T
    return g


def pair_energy_matrix_gauss(xt, yt, vstat=False):
    """All pair energies for gamma1 through three Gram matrices.

    With gamma1 the pair term factorises,
    ``1 - exp(-(u^2 + w^2) / 2) = 1 - exp(-u^2 / 2) exp(-w^2 / 2)``, so each
    of the cross and within sums is one matrix product over difference
    columns. The constant parts of the three terms cancel analytically and
    are added back as ``1/n1 + 1/n2`` for the plug-in version only.
    """
    d, n1 = xt.shape
    n2 = yt.shape[1]
    step = max(1, _CHUNK_ELEMS // max(d, 1))
    cross = (xt[:, :, None] - yt[:, None, :]).reshape(d, n1 * n2)
    a1, b1 = np.triu_indices(n1, 1)
    a2, b2 = np.triu_indices(n2, 1)
    cn, n1n, n2n = _norms.py_func(n1, n2, vstat)
    out = (n1n * _gram(xt[:, a1] - xt[:, b1], step) + n2n * _gram(yt[:, a2] - yt[:, b2], step)
           - cn * _gram(cross, step))
    if vstat:
        out += 1.0 / n1 + 1.0 / n2
    out = 0.5 * (out + out.T)
    np.fill_diagonal(out, np.nan)
    return out


# --------------------------------------------------------- resampled splits

@njit(cache=True)
def _split_kernels_numba(zi, zj, code):
    m = zi.shape[0]
    out = np.zeros((3, m, m))
    for a in range(m - 1):
        for b in range(a + 1, m):
            u = zi[a] - zi[b]
            w = zj[a] - zj[b]
            out[0, a, b] = out[0, b, a] = _gamma(u * u, code)
            out[1, a, b] = out[1, b, a] = _gamma(w * w, code)
            out[2, a, b] = out[2, b, a] = _gamma(0.5 * (u * u + w * w), code)
    return out


def _split_kernels_numpy(zi, zj, kernel):
    di = (zi[:, None] - zi[None, :]) ** 2
    dj = (zj[:, None] - zj[None, :]) ** 2
    return (apply_gamma(kernel, di), apply_gamma(kernel, dj),
            apply_gamma(kernel, 0.5 * (di + dj)))


def _split_reduce(mats, c1, c2):
    """Weighted within/cross sums for many re-splits of pooled data.

    ``c1[r, a]`` and ``c2[r, a]`` count how often pooled row ``a`` lands in
    group 1 and group 2 of split ``r``; ``mats`` holds the gamma matrices of
    feature i, feature j and the pair. The result has shape ``(R, 3, 3)``:
    statistic by sum (cross, within 1, within 2), each over unordered pairs.
    """
    out = np.empty((c1.shape[0], 3, 3))
    for s, g in enumerate(mats):
        a1 = c1 @ g
        a2 = c2 @ g
        out[:, s, 0] = (a1 * c2).sum(axis=1)
        out[:, s, 1] = 0.5 * (a1 * c1).sum(axis=1)
        out[:, s, 2] = 0.5 * (a2 * c2).sum(axis=1)
    return out


def resample_sums_numba(zi, zj, c1, c2, code):
    return _split_reduce(_split_kernels_numba(zi, zj, code), c1, c2)


def resample_sums_numpy(zi, zj, c1, c2, kernel):
    return _split_reduce(_split_kernels_numpy(zi, zj, kernel), c1, c2)


# ------------------------------------------------------------ dissimilarity

@njit(cache=True, inline="always")
def _h(u, v, marg, pi, pj, code):
    s1 = marg.shape[0]
    s2 = pi.shape[0]
    total = 0.0
    if s1 > 0:
        acc = 0.0
        for q in range(s1):
            t = u[marg[q]] - v[marg[q]]
            acc += _gamma(t * t, code)
        total += acc / s1
    if s2 > 0:
        acc = 0.0
        for q in range(s2):
            a = u[pi[q]] - v[pi[q]]
            b = u[pj[q]] - v[pj[q]]
            acc += _gamma(0.5 * (a * a + b * b), code)
        total += acc / s2
    return total


@njit(cache=True, parallel=True)
def h_cross_mean_numba(z, x, marg, pi, pj, code):
    """Mean dissimilarity of every row of ``z`` to the rows of ``x``."""
    m = z.shape[0]
    n = x.shape[0]
    out = np.empty(m)
    for a in prange(m):
        acc = 0.0
        for b in range(n):
            acc += _h(z[a], x[b], marg, pi, pj, code)
        out[a] = acc / n
    return out


@njit(cache=True)
def h_within_mean_numba(x, marg, pi, pj, code):
    """Mean dissimilarity over distinct pairs of rows of ``x``."""
    n = x.shape[0]
    acc = 0.0
    for a in range(n - 1):
        for b in range(a + 1, n):
            acc += _h(x[a], x[b], marg, pi, pj, code)
    return acc / (n * (n - 1) / 2.0)


def _h_blocks(diff, marg, pi, pj, kernel):
    """``h`` for an array of row differences with features on the last axis."""
    total = np.zeros(diff.shape[:-1])
    if marg.size:
        total += apply_gamma(kernel, diff[..., marg] ** 2).sum(axis=-1) / marg.size
    if pi.size:
        arg = 0.5 * (diff[..., pi] ** 2 + diff[..., pj] ** 2)
        total += apply_gamma(kernel, arg).sum(axis=-1) / pi.size
    return total


def h_cross_mean_numpy(z, x, marg, pi, pj, kernel):
    per_row = max(1, _CHUNK_ELEMS // max(1, x.size))
    out = np.empty(z.shape[0])
    for lo in range(0, z.shape[0], per_row):
        diff = z[lo:lo + per_row, None, :] - x[None, :, :]
        out[lo:lo + per_row] = _h_blocks(diff, marg, pi, pj, kernel).mean(axis=1)
    return out


def h_within_mean_numpy(x, marg, pi, pj, kernel):
    a, b = np.triu_indices(x.shape[0], 1)
    return float(_h_blocks(x[a] - x[b], marg, pi, pj, kernel).mean())
