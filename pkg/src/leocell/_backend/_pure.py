"""Pure Python network kernels, the fallback backend.

Every arithmetic expression here is mirrored exactly in _fast.pyx (which
is compiled without fp-contraction), so the two backends produce
bit-identical results. Keep them in sync expression for expression.

Layout conventions shared by all kernels:
  sizes: layer widths, first entry is the input width, last the output.
  w: all weight matrices flattened, layer by layer, row-major
     (row = destination neuron).
  b: all bias vectors flattened, layer by layer.
  Activations live in one flat buffer, layer by layer, inputs first.
"""
import math

NAME = "pure"


def _sigmoid(z):
    # two-branch form is stable for large |z| and never overflows
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _offsets(sizes):
    n_layers = len(sizes)
    a_off = [0] * n_layers
    w_off = [0] * n_layers
    b_off = [0] * n_layers
    acc_w = 0
    acc_b = 0
    for li in range(1, n_layers):
        a_off[li] = a_off[li - 1] + sizes[li - 1]
        w_off[li] = acc_w
        b_off[li] = acc_b
        acc_w += sizes[li] * sizes[li - 1]
        acc_b += sizes[li]
    return a_off, w_off, b_off


def _forward(sizes, w, b, acts, a_off, w_off, b_off):
    # inputs must already sit in acts[0 : sizes[0]]
    n_layers = len(sizes)
    for li in range(1, n_layers):
        n_prev = sizes[li - 1]
        n_cur = sizes[li]
        prev = a_off[li - 1]
        cur = a_off[li]
        wo = w_off[li]
        bo = b_off[li]
        for j in range(n_cur):
            s = b[bo + j]
            row = wo + j * n_prev
            for k in range(n_prev):
                s += w[row + k] * acts[prev + k]
            acts[cur + j] = _sigmoid(s)


def forward_single(sizes, w, b, x, acts):
    """Run one input through the network, filling the activation buffer.

    acts must hold sum(sizes) slots; returns the output activation.
    """
    a_off, w_off, b_off = _offsets(sizes)
    for i in range(sizes[0]):
        acts[i] = x[i]
    _forward(sizes, w, b, acts, a_off, w_off, b_off)
    return acts[a_off[len(sizes) - 1]]


def predict_batch(sizes, w, b, xs, out):
    """Outputs for len(out) inputs; xs is row-major with sizes[0] columns."""
    a_off, w_off, b_off = _offsets(sizes)
    total = a_off[len(sizes) - 1] + sizes[len(sizes) - 1]
    acts = [0.0] * total
    n_in = sizes[0]
    out_pos = a_off[len(sizes) - 1]
    for i in range(len(out)):
        base = i * n_in
        for k in range(n_in):
            acts[k] = xs[base + k]
        _forward(sizes, w, b, acts, a_off, w_off, b_off)
        out[i] = acts[out_pos]


def _backward(sizes, w, acts, deltas, y, a_off, w_off):
    # deltas of every layer use the pre-update weights of this pattern
    n_layers = len(sizes)
    out_pos = a_off[n_layers - 1]
    a = acts[out_pos]
    deltas[out_pos] = (a - y) * a * (1.0 - a)
    for li in range(n_layers - 2, 0, -1):
        cur = a_off[li]
        nxt = a_off[li + 1]
        n_cur = sizes[li]
        n_nxt = sizes[li + 1]
        wn = w_off[li + 1]
        for j in range(n_cur):
            s = 0.0
            for k in range(n_nxt):
                s += w[wn + k * n_cur + j] * deltas[nxt + k]
            aj = acts[cur + j]
            deltas[cur + j] = s * aj * (1.0 - aj)


def train_epochs(sizes, w, b, vw, vb, xs, ys, order, lr, momentum, epochs):
    """Online backpropagation: per-pattern updates in `order`, repeated
    `epochs` times. Gradients use squared error 0.5*(out - y)^2 on the
    (already normalized) targets. Velocity arrays vw/vb implement classic
    momentum: v = momentum*v - lr*g; parameter += v.

    Returns -1, or the 0-based epoch index at which a parameter went
    non-finite (checked once per epoch).
    """
    a_off, w_off, b_off = _offsets(sizes)
    n_layers = len(sizes)
    total = a_off[n_layers - 1] + sizes[n_layers - 1]
    acts = [0.0] * total
    deltas = [0.0] * total
    n_in = sizes[0]
    n_patterns = len(order)
    n_w = len(w)
    n_b = len(b)
    for epoch in range(epochs):
        for oi in range(n_patterns):
            p = order[oi]
            base = p * n_in
            for k in range(n_in):
                acts[k] = xs[base + k]
            _forward(sizes, w, b, acts, a_off, w_off, b_off)
            _backward(sizes, w, acts, deltas, ys[p], a_off, w_off)
            for li in range(1, n_layers):
                n_prev = sizes[li - 1]
                n_cur = sizes[li]
                prev = a_off[li - 1]
                cur = a_off[li]
                wo = w_off[li]
                bo = b_off[li]
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
            if not math.isfinite(w[i]):
                ok = False
                break
        if ok:
            for i in range(n_b):
                if not math.isfinite(b[i]):
                    ok = False
                    break
        if not ok:
            return epoch
    return -1


def grad_single(sizes, w, b, x, y, gw, gb):
    """Analytic gradient of 0.5*(out - y)^2 for one pattern, written into
    the caller-supplied flat buffers gw and gb."""
    a_off, w_off, b_off = _offsets(sizes)
    n_layers = len(sizes)
    total = a_off[n_layers - 1] + sizes[n_layers - 1]
    acts = [0.0] * total
    deltas = [0.0] * total
    for i in range(sizes[0]):
        acts[i] = x[i]
    _forward(sizes, w, b, acts, a_off, w_off, b_off)
    _backward(sizes, w, acts, deltas, y, a_off, w_off)
    for li in range(1, n_layers):
        n_prev = sizes[li - 1]
        n_cur = sizes[li]
        prev = a_off[li - 1]
        cur = a_off[li]
        wo = w_off[li]
        bo = b_off[li]
        for j in range(n_cur):
            d = deltas[cur + j]
            row = wo + j * n_prev
            for k in range(n_prev):
                gw[row + k] = d * acts[prev + k]
            gb[bo + j] = d


def loss_single(sizes, w, b, x, y):
    """0.5*(out - y)^2 for one pattern."""
    a_off, w_off, b_off = _offsets(sizes)
    n_layers = len(sizes)
    total = a_off[n_layers - 1] + sizes[n_layers - 1]
    acts = [0.0] * total
    for i in range(sizes[0]):
        acts[i] = x[i]
    _forward(sizes, w, b, acts, a_off, w_off, b_off)
    a = acts[a_off[n_layers - 1]]
    return 0.5 * (a - y) * (a - y)
