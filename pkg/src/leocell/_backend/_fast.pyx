# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled network kernels.

Mirror of _pure.py, expression for expression. Compiled with
-ffp-contract=off so no fused multiply-add sneaks in; both backends then
produce bit-identical floating point results. Keep any change here in
lockstep with _pure.py.
"""
from libc.math cimport exp, isfinite
from libc.stdlib cimport calloc, free

NAME = "compiled"


cdef inline double _sigmoid(double z) noexcept nogil:
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cdef struct Layout:
    int n_layers
    int total
    int* a_off
    int* w_off
    int* b_off


cdef int _layout_init(Layout* lay, int[::1] sizes) except -1:
    cdef int n_layers = sizes.shape[0]
    cdef int li, acc_w, acc_b
    lay.n_layers = n_layers
    lay.a_off = <int*> calloc(3 * n_layers, sizeof(int))
    if lay.a_off == NULL:
        raise MemoryError()
    lay.w_off = lay.a_off + n_layers
    lay.b_off = lay.a_off + 2 * n_layers
    acc_w = 0
    acc_b = 0
    for li in range(1, n_layers):
        lay.a_off[li] = lay.a_off[li - 1] + sizes[li - 1]
        lay.w_off[li] = acc_w
        lay.b_off[li] = acc_b
        acc_w += sizes[li] * sizes[li - 1]
        acc_b += sizes[li]
    lay.total = lay.a_off[n_layers - 1] + sizes[n_layers - 1]
    return 0


cdef void _layout_free(Layout* lay) noexcept:
    free(lay.a_off)


cdef void _forward(int[::1] sizes, double[::1] w, double[::1] b,
                   double* acts, Layout* lay) noexcept nogil:
    cdef int li, j, k, n_prev, n_cur, prev, cur, wo, bo, row
    cdef double s
    for li in range(1, lay.n_layers):
        n_prev = sizes[li - 1]
        n_cur = sizes[li]
        prev = lay.a_off[li - 1]
        cur = lay.a_off[li]
        wo = lay.w_off[li]
        bo = lay.b_off[li]
        for j in range(n_cur):
            s = b[bo + j]
            row = wo + j * n_prev
            for k in range(n_prev):
                s += w[row + k] * acts[prev + k]
            acts[cur + j] = _sigmoid(s)


cdef void _backward(int[::1] sizes, double[::1] w, double* acts,
                    double* deltas, double y, Layout* lay) noexcept nogil:
    cdef int li, j, k, n_cur, n_nxt, cur, nxt, wn, out_pos
    cdef double a, aj, s
    out_pos = lay.a_off[lay.n_layers - 1]
    a = acts[out_pos]
    deltas[out_pos] = (a - y) * a * (1.0 - a)
    for li in range(lay.n_layers - 2, 0, -1):
        cur = lay.a_off[li]
        nxt = lay.a_off[li + 1]
        n_cur = sizes[li]
        n_nxt = sizes[li + 1]
        wn = lay.w_off[li + 1]
        for j in range(n_cur):
            s = 0.0
            for k in range(n_nxt):
                s += w[wn + k * n_cur + j] * deltas[nxt + k]
            aj = acts[cur + j]
            deltas[cur + j] = s * aj * (1.0 - aj)


def forward_single(int[::1] sizes, double[::1] w, double[::1] b,
                   double[::1] x, double[::1] acts_out):
    """Run one input through the network, filling the activation buffer."""
    cdef Layout lay
    _layout_init(&lay, sizes)
    cdef double* acts
    cdef int i
    cdef double result
    try:
        acts = <double*> calloc(lay.total, sizeof(double))
        if acts == NULL:
            raise MemoryError()
        for i in range(sizes[0]):
            acts[i] = x[i]
        _forward(sizes, w, b, acts, &lay)
        for i in range(lay.total):
            acts_out[i] = acts[i]
        result = acts[lay.a_off[lay.n_layers - 1]]
        free(acts)
        return result
    finally:
        _layout_free(&lay)


def predict_batch(int[::1] sizes, double[::1] w, double[::1] b,
                  double[::1] xs, double[::1] out):
    """Outputs for out.shape[0] inputs; xs is row-major, sizes[0] columns."""
    cdef Layout lay
    _layout_init(&lay, sizes)
    cdef double* acts
    cdef int i, k, n_in, base, out_pos, n
    try:
        acts = <double*> calloc(lay.total, sizeof(double))
        if acts == NULL:
            raise MemoryError()
        n_in = sizes[0]
        out_pos = lay.a_off[lay.n_layers - 1]
        n = out.shape[0]
        for i in range(n):
            base = i * n_in
            for k in range(n_in):
                acts[k] = xs[base + k]
            _forward(sizes, w, b, acts, &lay)
            out[i] = acts[out_pos]
        free(acts)
    finally:
        _layout_free(&lay)


def train_epochs(int[::1] sizes, double[::1] w, double[::1] b,
                 double[::1] vw, double[::1] vb,
                 double[::1] xs, double[::1] ys, int[::1] order,
                 double lr, double momentum, int epochs):
    """Online backpropagation; see the pure backend for the contract.

    Returns -1, or the 0-based epoch index at which a parameter went
    non-finite (checked once per epoch).
    """
    cdef Layout lay
    _layout_init(&lay, sizes)
    cdef double* acts
    cdef double* deltas
    cdef int epoch, oi, p, base, k, li, j, idx, bidx, row
    cdef int n_prev, n_cur, prev, cur, wo, bo, n_in, n_patterns, i
    cdef int n_w = w.shape[0]
    cdef int n_b = b.shape[0]
    cdef double d, v
    cdef bint ok
    cdef int bad = -1
    try:
        acts = <double*> calloc(2 * lay.total, sizeof(double))
        if acts == NULL:
            raise MemoryError()
        deltas = acts + lay.total
        n_in = sizes[0]
        n_patterns = order.shape[0]
        with nogil:
            for epoch in range(epochs):
                for oi in range(n_patterns):
                    p = order[oi]
                    base = p * n_in
                    for k in range(n_in):
                        acts[k] = xs[base + k]
                    _forward(sizes, w, b, acts, &lay)
                    _backward(sizes, w, acts, deltas, ys[p], &lay)
                    for li in range(1, lay.n_layers):
                        n_prev = sizes[li - 1]
                        n_cur = sizes[li]
                        prev = lay.a_off[li - 1]
                        cur = lay.a_off[li]
                        wo = lay.w_off[li]
                        bo = lay.b_off[li]
                        for j in range(n_cur):
                            d = deltas[cur + j]
                            row = wo + j * n_prev
                            for k in range(n_prev):
                                idx = row + k
                                v = momentum * vw[idx] - lr * (d * acts[prev + k])
                                vw[idx] = v
                                w[idx] += v
                            bidx = bo + j
                            v = momentum * vb[bidx] - lr * d
                            vb[bidx] = v
                            b[bidx] += v
                ok = True
                for i in range(n_w):
                    if not isfinite(w[i]):
                        ok = False
                        break
                if ok:
                    for i in range(n_b):
                        if not isfinite(b[i]):
                            ok = False
                            break
                if not ok:
                    bad = epoch
                    break
        free(acts)
        return bad
    finally:
        _layout_free(&lay)


def grad_single(int[::1] sizes, double[::1] w, double[::1] b,
                double[::1] x, double y, double[::1] gw, double[::1] gb):
    """Analytic gradient of 0.5*(out - y)^2 for one pattern."""
    cdef Layout lay
    _layout_init(&lay, sizes)
    cdef double* acts
    cdef double* deltas
    cdef int i, li, j, k, n_prev, n_cur, prev, cur, wo, bo, row
    cdef double d
    try:
        acts = <double*> calloc(2 * lay.total, sizeof(double))
        if acts == NULL:
            raise MemoryError()
        deltas = acts + lay.total
        for i in range(sizes[0]):
            acts[i] = x[i]
        _forward(sizes, w, b, acts, &lay)
        _backward(sizes, w, acts, deltas, y, &lay)
        for li in range(1, lay.n_layers):
            n_prev = sizes[li - 1]
            n_cur = sizes[li]
            prev = lay.a_off[li - 1]
            cur = lay.a_off[li]
            wo = lay.w_off[li]
            bo = lay.b_off[li]
            for j in range(n_cur):
                d = deltas[cur + j]
                row = wo + j * n_prev
                for k in range(n_prev):
                    gw[row + k] = d * acts[prev + k]
                gb[bo + j] = d
        free(acts)
    finally:
        _layout_free(&lay)


def loss_single(int[::1] sizes, double[::1] w, double[::1] b,
                double[::1] x, double y):
    """0.5*(out - y)^2 for one pattern."""
    cdef Layout lay
    _layout_init(&lay, sizes)
    cdef double* acts
    cdef int i
    cdef double a
    try:
        acts = <double*> calloc(lay.total, sizeof(double))
        if acts == NULL:
            raise MemoryError()
        for i in range(sizes[0]):
            acts[i] = x[i]
        _forward(sizes, w, b, acts, &lay)
        a = acts[lay.a_off[lay.n_layers - 1]]
        free(acts)
        return 0.5 * (a - y) * (a - y)
    finally:
        _layout_free(&lay)
