"""Small trainable MLPs with hand-written reverse-mode gradients.

Architecture is fixed: input -> two hidden layers of 100 units -> affine
output.  Each hidden layer applies a linear map, RMS normalization with a
trainable gain, then the squareplus activation 0.5*(x + sqrt(x^2 + 4)).
Output heads (bounded modes, positive scales, mixture weights) are applied
by the callers, which chain their own gradients through :func:`backward`.

Also here: the adaptive-moment optimizer, Polyak averaging for target
copies, the scalar head maps with their derivatives, and a flat binary
snapshot format for checkpointing.
"""

import struct

import numpy as np

_RMS_EPS = 1e-8
_SNAPSHOT_MAGIC = b"EBONNET1"


def squareplus(x):
    return 0.5 * (x + np.sqrt(x * x + 4.0))


def squareplus_grad(x):
    return 0.5 * (1.0 + x / np.sqrt(x * x + 4.0))


def softplus(x):
    return np.logaddexp(0.0, x)


def softplus_grad(x):
    # sigmoid
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softsign(x):
    return x / (1.0 + np.abs(x))


def softsign_grad(x):
    d = 1.0 + np.abs(x)
    return 1.0 / (d * d)


class Network:
    """input -> [linear, RMS norm (gain), squareplus] x2 -> affine output."""

    HIDDEN = 100

    def __init__(self, in_dim, out_dim, rng=None, hidden=None,
                 dtype=np.float64):
        rng = rng or np.random.default_rng()
        h = hidden or self.HIDDEN
        self.dtype = np.dtype(dtype)
        self.sizes = (in_dim, h, h, out_dim)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(
                -bound, bound, size=(fan_out, fan_in)).astype(self.dtype))
            self.biases.append(np.zeros(fan_out, dtype=self.dtype))
        self.gains = [np.ones(h, dtype=self.dtype),
                      np.ones(h, dtype=self.dtype)]

    def params(self):
        """Flat parameter list; gradient lists use the same order."""
        return [self.weights[0], self.biases[0], self.gains[0],
                self.weights[1], self.biases[1], self.gains[1],
                self.weights[2], self.biases[2]]

    def forward(self, x):
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x):
        """Forward pass returning the output and the tape for backward()."""
        x = np.asarray(x, dtype=self.dtype)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        cache = {"x": x, "squeeze": squeeze}
        h = x
        for k in range(2):
            z = h @ self.weights[k].T + self.biases[k]
            r = np.sqrt(np.mean(z * z, axis=-1, keepdims=True) + _RMS_EPS)
            u = self.gains[k] * z / r
            sq = np.sqrt(u * u + 4.0)
            cache[f"h{k}"] = h
            cache[f"z{k}"] = z
            cache[f"r{k}"] = r
            cache[f"sq{k}"] = sq
            h = 0.5 * (u + sq)
        cache["h2"] = h
        y = h @ self.weights[2].T + self.biases[2]
        return (y[0] if squeeze else y), cache

    def backward(self, cache, dy):
        """Exact gradients of the recorded forward pass.

        dy is the loss gradient at the output; returns (grads, dx) where
        grads matches params() order.
        """
        dy = np.asarray(dy, dtype=self.dtype)
        if cache["squeeze"]:
            dy = dy[None, :]
        dW2 = dy.T @ cache["h2"]
        db2 = dy.sum(axis=0)
        dh = dy @ self.weights[2]
        grads = [None, None, None, None, None, None, dW2, db2]
        for k in (1, 0):
            z, r, sq = cache[f"z{k}"], cache[f"r{k}"], cache[f"sq{k}"]
            inv_r = 1.0 / r
            n = z * inv_r
            # d squareplus(u)/du = 0.5 (1 + u / sqrt(u^2+4)), with u = g*n
            du = dh * (0.5 + (0.5 * self.gains[k]) * n / sq)
            dg = (du * n).sum(axis=0)
            dug = du * self.gains[k]
            dim = z.shape[-1]
            coef = (dug * n).sum(axis=-1, keepdims=True) * (inv_r / dim)
            dz = dug * inv_r - n * coef
            dW = dz.T @ cache[f"h{k}"]
            db = dz.sum(axis=0)
            grads[3 * k] = dW
            grads[3 * k + 1] = db
            grads[3 * k + 2] = dg
            dh = dz @ self.weights[k]
        dx = dh
        return grads, (dx[0] if cache["squeeze"] else dx)

    def copy(self):
        other = Network.__new__(Network)
        other.dtype = self.dtype
        other.sizes = self.sizes
        other.weights = [w.copy() for w in self.weights]
        other.biases = [b.copy() for b in self.biases]
        other.gains = [g.copy() for g in self.gains]
        return other

    def copy_from(self, other):
        for dst, src in zip(self.params(), other.params()):
            dst[...] = src


def polyak_update(target, online, tau):
    """target <- (1 - tau) * target + tau * online, parameter-wise."""
    for t, o in zip(target.params(), online.params()):
        t *= 1.0 - tau
        t += tau * o


class Adam:
    """Adaptive-moment optimizer with bias correction.

    Steps with non-finite gradients are skipped and counted instead of
    corrupting the parameters.
    """

    def __init__(self, params, lr=1e-4, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.skipped = 0

    def step(self, params, grads):
        # single-reduction finiteness guard: any nan/inf entry makes the
        # sum non-finite (opposite infinities cancel to nan)
        if not all(np.isfinite(g.sum()) for g in grads):
            self.skipped += 1
            return
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        scale = self.lr / c1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= scale * m / (np.sqrt(v / c2) + self.eps)


def save_network(f, net):
    """Flat binary snapshot: magic, layer-size header, little-endian float64."""
    f.write(_SNAPSHOT_MAGIC)
    f.write(struct.pack("<I", len(net.sizes)))
    f.write(struct.pack(f"<{len(net.sizes)}q", *net.sizes))
    for p in net.params():
        f.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_network(f, dtype=np.float64):
    magic = f.read(len(_SNAPSHOT_MAGIC))
    if magic != _SNAPSHOT_MAGIC:
        raise ValueError("not a network snapshot (bad magic)")
    (n_sizes,) = struct.unpack("<I", f.read(4))
    sizes = struct.unpack(f"<{n_sizes}q", f.read(8 * n_sizes))
    net = Network(sizes[0], sizes[-1], hidden=sizes[1], dtype=dtype)
    for p in net.params():
        raw = f.read(8 * p.size)
        p[...] = np.frombuffer(raw, dtype="<f8").reshape(p.shape)
    return net
