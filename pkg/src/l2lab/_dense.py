"""Dense Laurent-array backend for Z^n in float mode.

A row vector of length ``m`` over C[Z^n] is stored as one array of shape
``(m, *box)`` together with the exponent ``lo`` of its corner.  Applying a
matrix with small supports is a sum of shifted slices, which is exactly the
group ring convolution with no aliasing.
"""
import numpy as np


def _bounds(kernels, rank):
    shifts = [s for terms in kernels.values() for s, _ in terms]
    if not shifts:
        z = np.zeros(rank, dtype=int)
        return z, z
    arr = np.array(shifts, dtype=int).reshape(-1, rank)
    return arr.min(axis=0), arr.max(axis=0)


def _truncate(new, lo, radius, floor):
    """Zero out terms outside the l1 ball / below the floor; return l1 mass dropped."""
    dropped = 0.0
    if floor:
        mask = np.abs(new) < floor
        dropped += float(np.abs(new[mask]).sum())
        new[mask] = 0
    if radius is not None:
        grids = np.meshgrid(*[np.arange(l, l + n) for l, n in zip(lo, new.shape[1:])],
                            indexing="ij")
        dist = sum(np.abs(g) for g in grids)
        outside = np.broadcast_to(dist > radius, new.shape)
        dropped += float(np.abs(new[outside]).sum())
        new[outside] = 0
        # crop to the box [-radius, radius]^n
        start = np.maximum(-radius - lo, 0)
        stop = np.minimum(radius - lo + 1, new.shape[1:])
        if np.any(start > 0) or np.any(stop < new.shape[1:]):
            new = new[(slice(None),) + tuple(slice(a, b) for a, b in zip(start, stop))]
            lo = lo + start
    return new, lo, dropped


def iterate_row(i, kernels, m, rank, n_steps, dtype, radius=None, floor=0.0, max_terms=None):
    """Row ``e_i`` pushed through ``n_steps`` applications of the kernel matrix.

    Returns ``(contrib, dropped, complete)`` where ``contrib[p]`` is the
    identity coefficient of the ``(i, i)`` entry of ``M**p`` for
    ``p = 0 .. 2*n_steps`` (computed from the half powers), ``dropped`` the
    l1 mass removed by truncation at each step.
    """
    bmin, bmax = _bounds(kernels, rank)
    span = bmax - bmin
    r = np.zeros((m,) + (1,) * rank, dtype=dtype)
    r[(i,) + (0,) * rank] = 1
    lo = np.zeros(rank, dtype=int)
    contrib = [float(np.vdot(r, r).real)]
    dropped = []
    for _ in range(n_steps):
        shape = np.array(r.shape[1:])
        new = np.zeros((m,) + tuple(shape + span), dtype=dtype)
        for (a, b), terms in kernels.items():
            src = r[a]
            if not src.any():
                continue
            for s, c in terms:
                off = np.asarray(s) - bmin
                new[(b,) + tuple(slice(o, o + n) for o, n in zip(off, shape))] += c * src
        new_lo = lo + bmin
        d = 0.0
        if radius is not None or floor:
            new, new_lo, d = _truncate(new, new_lo, radius, floor)
        dropped.append(d)
        # inner product of r_k with r_{k+1} on the common box
        off = lo - new_lo
        sub_shape = np.minimum(shape, np.array(new.shape[1:]) - off)
        if np.all(off >= 0) and np.all(sub_shape > 0):
            sl = tuple(slice(o, o + n) for o, n in zip(off, sub_shape))
            src = r[(slice(None),) + tuple(slice(0, n) for n in sub_shape)]
            odd = float(np.vdot(new[(slice(None),) + sl], src).real)
        else:
            odd = _overlap(r, lo, new, new_lo)
        contrib.append(odd)
        contrib.append(float(np.vdot(new, new).real))
        r, lo = new, new_lo
        if max_terms is not None and np.count_nonzero(r) > max_terms:
            return contrib, dropped, False
    return contrib, dropped, True


def _overlap(x, xlo, y, ylo):
    lo = np.maximum(xlo, ylo)
    hi = np.minimum(xlo + np.array(x.shape[1:]), ylo + np.array(y.shape[1:]))
    if np.any(hi <= lo):
        return 0.0
    xs = (slice(None),) + tuple(slice(a - b, c - b) for a, b, c in zip(lo, xlo, hi))
    ys = (slice(None),) + tuple(slice(a - b, c - b) for a, b, c in zip(lo, ylo, hi))
    return float(np.vdot(y[ys], x[xs]).real)
