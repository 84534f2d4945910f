"""Special functions used by the MRC bases.

Cylindrical Bessel/Hankel functions, the outgoing spherical Hankel function
normalized so that ``h_l(x) ~ exp(ix)/x``, complex orthonormal spherical
harmonics (Condon-Shortley phase) and the basis evaluators built from them.

All functions broadcast over numpy arrays.
"""
import numpy as np
from scipy import special

from .errors import DomainError, SingularityError, UnsupportedOrderError

MAX_CYL_ORDER = 200
MAX_SPH_ORDER = 100

FOUR_PI = 4.0 * np.pi


def cyl_bessel(kind, order, x):
    """Cylindrical Bessel function of integer order.

    Parameters
    ----------
    kind : {"J", "Y", "H1"}
    order : int
        Integer order, ``|order| <= 200``. Negative orders use
        ``Z_{-n} = (-1)^n Z_n``.
    x : float or ndarray
        Strictly positive argument.
    """
    order = int(order)
    if abs(order) > MAX_CYL_ORDER:
        raise UnsupportedOrderError(f"order {order} exceeds {MAX_CYL_ORDER}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("cylindrical Bessel argument must be positive")
    n = abs(order)
    sign = -1.0 if (order < 0 and n % 2) else 1.0
    if kind == "J":
        out = special.jv(n, x)
    elif kind == "Y":
        out = special.yv(n, x)
    elif kind == "H1":
        out = special.hankel1(n, x)
    else:
        raise ValueError(f"unknown Bessel kind {kind!r}")
    return sign * out


def hankel1_table(lmax, x):
    """H^(1)_l(x) for l = 0..lmax stacked along a new last axis.

    Orders 0 and 1 come from the library; higher orders from the upward
    recurrence, which is stable for the dominant Y component.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (lmax + 1,), dtype=complex)
    out[..., 0] = special.j0(x) + 1j * special.y0(x)
    if lmax >= 1:
        out[..., 1] = special.j1(x) + 1j * special.y1(x)
    for n in range(1, lmax):
        out[..., n + 1] = (2.0 * n / x) * out[..., n] - out[..., n - 1]
    return out


def sph_hankel_out_table(lmax, x):
    """Outgoing spherical Hankel functions for l = 0..lmax.

    Returns an array with a trailing axis of length ``lmax + 1``. Seeded by the
    closed forms for l = 0, 1 and continued with the upward recurrence, which
    is stable for the (dominant) Hankel solution.
    """
    if lmax > MAX_SPH_ORDER:
        raise UnsupportedOrderError(f"order {lmax} exceeds {MAX_SPH_ORDER}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("spherical Hankel argument must be positive")
    out = np.empty(x.shape + (lmax + 1,), dtype=complex)
    # i^{l+1} h^(1)_l gives h_0 = e^{ix}/x and h_1 = e^{ix}/x (1 + i/x)
    h0 = np.exp(1j * x) / x
    out[..., 0] = h0
    if lmax >= 1:
        out[..., 1] = h0 * (1 + 1j / x)
    # i^{l+1} scaling turns h_{l+1} = (2l+1)/x h_l - h_{l-1} into
    # h_{l+1} = i (2l+1)/x h_l + h_{l-1}
    for ell in range(1, lmax):
        out[..., ell + 1] = 1j * (2 * ell + 1) / x * out[..., ell] + out[..., ell - 1]
    return out


def sph_hankel_out(ell, x):
    """Outgoing spherical Hankel function ``i^(l+1) h^(1)_l(x)``."""
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    return sph_hankel_out_table(ell, x)[..., ell]


def n_sph(lmax):
    """Number of (l, m) pairs with l <= lmax."""
    return (lmax + 1) ** 2


def sph_index(ell, m):
    """Flat column index of (l, m) in the ordering used by the tables."""
    return ell * ell + ell + m


def sph_harmonics_table(lmax, dirs):
    """All Y_lm(dir) for l <= lmax, ordered (0,0), (1,-1), (1,0), (1,1), ...

    ``dirs`` has shape (..., 3) and must hold unit vectors. Uses the fully
    normalized associated Legendre recurrence.
    """
    dirs = np.asarray(dirs, dtype=float)
    norms = np.linalg.norm(dirs, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise DomainError("direction must be a unit vector")
    ct = np.clip(dirs[..., 2], -1.0, 1.0)
    st = np.hypot(dirs[..., 0], dirs[..., 1])
    phi = np.arctan2(dirs[..., 1], dirs[..., 0])

    shape = ct.shape
    out = np.empty(shape + (n_sph(lmax),), dtype=complex)
    # pbar[l][m] for m >= 0, kept per m column to stay O(L^2)
    pmm = np.full(shape, np.sqrt(1.0 / FOUR_PI))
    eimphi = np.exp(1j * phi)
    for m in range(lmax + 1):
        if m > 0:
            pmm = -np.sqrt((2 * m + 1) / (2.0 * m)) * st * pmm
        phase = eimphi**m
        p_prev2 = None
        p_prev = pmm
        _store(out, m, m, p_prev * phase)
        if m + 1 <= lmax:
            p_cur = np.sqrt(2 * m + 3.0) * ct * pmm
            _store(out, m + 1, m, p_cur * phase)
            p_prev2, p_prev = p_prev, p_cur
        for ell in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * ell * ell - 1) / (ell * ell - m * m))
            a_prev = np.sqrt((4.0 * (ell - 1) ** 2 - 1) / ((ell - 1) ** 2 - m * m))
            p_cur = a * (ct * p_prev - p_prev2 / a_prev)
            _store(out, ell, m, p_cur * phase)
            p_prev2, p_prev = p_prev, p_cur
    return out


def _store(out, ell, m, value):
    out[..., sph_index(ell, m)] = value
    if m > 0:
        out[..., sph_index(ell, -m)] = (-1) ** m * np.conj(value)


def sph_harmonic(ell, m, direction):
    """Orthonormal spherical harmonic Y_lm at a unit vector."""
    if ell < 0 or abs(m) > ell:
        raise DomainError(f"invalid multi-index ({ell}, {m})")
    return sph_harmonics_table(ell, direction)[..., sph_index(ell, m)]


def _separation(x, z):
    d = np.asarray(x, dtype=float) - np.asarray(z, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularityError("evaluation point coincides with the source")
    return d, r


def psi_3d(ell, m, x, z, k):
    """Y_lm((x - z)/|x - z|) h_l(k |x - z|)."""
    d, r = _separation(x, z)
    y = sph_harmonic(ell, m, d / r[..., None])
    return y * sph_hankel_out(ell, k * r)


def psi_2d(order, x, xj, k):
    """H^(1)_l(k |x - x_j|) exp(i l theta_j), theta_j the polar angle of x - x_j."""
    d, r = _separation(x, xj)
    theta = np.arctan2(d[..., 1], d[..., 0])
    return cyl_bessel("H1", order, k * r) * np.exp(1j * order * theta)


def harmonic_exterior(ell, m, x):
    """Decaying harmonic Y_lm(x/|x|) / |x|^(l+1)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularityError("harmonic basis is singular at the origin")
    return sph_harmonic(ell, m, x / r[..., None]) / r ** (ell + 1)


def basis_2d(nodes, sources, k, lmax):
    """Design block for 2D sources: shape (M, J*(2L+1)).

    Columns run over sources, then l = -L..L.
    """
    d = nodes[:, None, :] - sources[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r == 0):
        raise SingularityError("boundary node coincides with a source")
    theta = np.arctan2(d[..., 1], d[..., 0])
    h = hankel1_table(lmax, k * r)  # (M, J, L+1)
    orders = np.arange(-lmax, lmax + 1)
    sign = np.where((orders < 0) & (orders % 2 == 1), -1.0, 1.0)
    hfull = h[..., np.abs(orders)] * sign
    cols = hfull * np.exp(1j * orders * theta[..., None])
    return cols.reshape(len(nodes), -1)


def basis_3d(nodes, sources, k, lmax):
    """Design block for 3D sources: shape (M, J*(L+1)^2)."""
    d = nodes[:, None, :] - sources[None, :, :]
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularityError("boundary node coincides with a source")
    h = sph_hankel_out_table(lmax, k * r)  # (M, J, L+1)
    if lmax == 0:
        cols = h / np.sqrt(FOUR_PI)
    else:
        y = sph_harmonics_table(lmax, d / r[..., None])  # (M, J, (L+1)^2)
        degrees = np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)
        cols = y * h[..., degrees]
    return cols.reshape(len(nodes), -1)


def harmonic_basis(nodes, lmax):
    """Columns Y_lm(x/|x|)/|x|^(l+1) at the given nodes, shape (M, (L+1)^2)."""
    r = np.linalg.norm(nodes, axis=-1)
    if np.any(r == 0):
        raise SingularityError("harmonic basis is singular at the origin")
    y = sph_harmonics_table(lmax, nodes / r[:, None])
    degrees = np.repeat(np.arange(lmax + 1), 2 * np.arange(lmax + 1) + 1)
    return y / r[:, None] ** (degrees + 1)
