"""Neural building blocks: temporal convolution with max-over-time pooling,
a dense ReLU projection, LSTM cells and the softmax classification head.

Every layer exposes a forward pass that returns a cache, and a backward pass
that consumes it and hand-computes gradients with respect to both inputs and
parameters. No autodiff anywhere; the finite-difference tests in the suite
are the correctness authority.
"""

import numpy as np

from .arrays import relu_grad, sigmoid, softmax
from .errors import ContractViolation, ShapeError


def glorot_uniform(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


class DropoutMask:
    """Inverted-dropout mask: entries are 0 or 1/keep_prob.

    An inference-mode mask is all ones, so applying it is the identity map.
    """

    def __init__(self, mask: np.ndarray, keep_prob: float):
        self.mask = mask
        self.keep_prob = keep_prob

    @classmethod
    def ones(cls, size: int) -> "DropoutMask":
        return cls(np.ones(size, dtype=np.float64), 1.0)

    @classmethod
    def sample(cls, rng: np.random.Generator, size: int, dropout_rate: float) -> "DropoutMask":
        keep = 1.0 - dropout_rate
        if dropout_rate <= 0.0:
            return cls.ones(size)
        mask = (rng.random(size) < keep).astype(np.float64) / keep
        return cls(mask, keep)


def sentence_matrix(token_indices, embedding_matrix: np.ndarray, min_rows: int) -> np.ndarray:
    """Stack the embedding rows of a sentence; zero-pad up to min_rows."""
    if len(token_indices) == 0:
        raise ContractViolation("sentence_matrix of an empty sentence")
    s = embedding_matrix[np.asarray(token_indices, dtype=np.intp)]
    n, k = s.shape
    if n < min_rows:
        s = np.vstack([s, np.zeros((min_rows - n, k), dtype=np.float64)])
    return s


class ConvLayer:
    """Temporal convolution over word-vector windows, ReLU, max-over-time pool."""

    def __init__(self, filter_width: int, num_filters: int, embedding_dim: int,
                 rng: np.random.Generator):
        self.filter_width = filter_width
        self.num_filters = num_filters
        self.embedding_dim = embedding_dim
        self.filters = glorot_uniform(rng, num_filters, filter_width * embedding_dim)
        self.bias = np.zeros(num_filters, dtype=np.float64)

    def forward(self, s: np.ndarray):
        """Returns (pooled features of length F, cache).

        Feature map value at window p is relu(filter . window_p + bias); the
        pooled feature keeps the max over p, ties going to the smallest p.
        """
        n, k = s.shape
        f = self.filter_width
        if k != self.embedding_dim:
            raise ShapeError(f"input has embedding dim {k}, layer expects {self.embedding_dim}")
        if n < f:
            raise ShapeError(f"input has {n} rows, below filter width {f}")
        num_windows = n - f + 1
        windows = np.lib.stride_tricks.sliding_window_view(s, (f, k))
        windows = windows.reshape(num_windows, f * k)
        pre = windows @ self.filters.T + self.bias  # (P, F)
        act = np.maximum(pre, 0.0)
        argmax = np.argmax(act, axis=0)  # first occurrence = smallest p
        features = act[argmax, np.arange(self.num_filters)]
        cache = {"windows": windows, "pre": pre, "argmax": argmax, "input_shape": s.shape}
        return features, cache

    def backward(self, grad_features: np.ndarray, cache):
        """Routes gradient through each filter's argmax window and ReLU gate."""
        if cache is None or "windows" not in cache:
            raise ContractViolation("conv backward called without a matching forward cache")
        windows = cache["windows"]
        argmax = cache["argmax"]
        f, k = self.filter_width, self.embedding_dim
        cols = np.arange(self.num_filters)
        gate = (cache["pre"][argmax, cols] > 0.0).astype(np.float64)
        grad_pre = grad_features * gate  # (F,)
        grad_bias = grad_pre
        grad_filters = grad_pre[:, None] * windows[argmax]
        grad_s = np.zeros(cache["input_shape"], dtype=np.float64)
        grad_win = grad_pre[:, None] * self.filters  # (F, f*k)
        for j in range(self.num_filters):
            p = argmax[j]
            grad_s[p : p + f] += grad_win[j].reshape(f, k)
        return grad_s, grad_filters, grad_bias


class DenseLayer:
    """Fully connected ReLU layer with inverted dropout on its input."""

    def __init__(self, out_dim: int, in_dim: int, dropout_rate: float,
                 rng: np.random.Generator):
        if not 0.0 <= dropout_rate < 1.0:
            raise ContractViolation(f"dropout_rate must be in [0, 1), got {dropout_rate}")
        self.weights = glorot_uniform(rng, out_dim, in_dim)
        self.bias = np.zeros(out_dim, dtype=np.float64)
        self.dropout_rate = dropout_rate

    def forward(self, x: np.ndarray, mask: DropoutMask):
        if x.shape[0] != self.weights.shape[1]:
            raise ShapeError(
                f"dense input has length {x.shape[0]}, layer expects {self.weights.shape[1]}"
            )
        x_masked = x * mask.mask
        pre = self.weights @ x_masked + self.bias
        out = np.maximum(pre, 0.0)
        cache = {"x_masked": x_masked, "pre": pre, "mask": mask.mask}
        return out, cache

    def backward(self, grad_out: np.ndarray, cache):
        grad_pre = grad_out * relu_grad(cache["pre"])
        grad_weights = np.outer(grad_pre, cache["x_masked"])
        grad_bias = grad_pre
        grad_x = (self.weights.T @ grad_pre) * cache["mask"]
        return grad_x, grad_weights, grad_bias


class LstmCell:
    """Standard LSTM cell; gate order in the stacked weights is i, f, g, o.

    The forget-gate bias segment starts at 1.0. Dropout masks for the input
    and the recurrent state are fixed per sequence (variational style): the
    caller samples them once and reuses them at every step.
    """

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator,
                 input_dropout: float = 0.2, recurrent_dropout: float = 0.2):
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        self.input_weights = glorot_uniform(rng, 4 * hidden_dim, input_dim)
        self.recurrent_weights = glorot_uniform(rng, 4 * hidden_dim, hidden_dim)
        self.bias = np.zeros(4 * hidden_dim, dtype=np.float64)
        self.bias[hidden_dim : 2 * hidden_dim] = 1.0
        self.input_dropout = input_dropout
        self.recurrent_dropout = recurrent_dropout

    def step(self, x, h_prev, c_prev, input_mask: DropoutMask, recurrent_mask: DropoutMask):
        H = self.hidden_dim
        if x.shape[0] != self.input_dim or h_prev.shape[0] != H or c_prev.shape[0] != H:
            raise ShapeError(
                f"lstm step shapes x={x.shape} h={h_prev.shape} c={c_prev.shape} "
                f"vs (m={self.input_dim}, H={H})"
            )
        x_m = x * input_mask.mask
        h_m = h_prev * recurrent_mask.mask
        z = self.input_weights @ x_m + self.recurrent_weights @ h_m + self.bias
        i = sigmoid(z[0:H])
        f = sigmoid(z[H : 2 * H])
        g = np.tanh(z[2 * H : 3 * H])
        o = sigmoid(z[3 * H :])
        c = f * c_prev + i * g
        tanh_c = np.tanh(c)
        h = o * tanh_c
        cache = {"x_m": x_m, "h_m": h_m, "i": i, "f": f, "g": g, "o": o,
                 "c_prev": c_prev, "tanh_c": tanh_c,
                 "input_mask": input_mask.mask, "recurrent_mask": recurrent_mask.mask}
        return h, c, cache

    def run(self, seq, input_mask: DropoutMask, recurrent_mask: DropoutMask):
        """Run over a full sequence; returns (final h, list of step caches)."""
        H = self.hidden_dim
        h = np.zeros(H, dtype=np.float64)
        c = np.zeros(H, dtype=np.float64)
        caches = []
        for x in seq:
            h, c, cache = self.step(x, h, c, input_mask, recurrent_mask)
            caches.append(cache)
        return h, caches

    def backward(self, grad_h_final: np.ndarray, caches):
        """Backpropagation through time from a gradient on the final hidden state.

        Returns per-step input gradients plus parameter gradients.
        """
        H = self.hidden_dim
        grad_W = np.zeros_like(self.input_weights)
        grad_U = np.zeros_like(self.recurrent_weights)
        grad_b = np.zeros_like(self.bias)
        grad_xs = [None] * len(caches)
        dh = grad_h_final
        dc = np.zeros(H, dtype=np.float64)
        for t in range(len(caches) - 1, -1, -1):
            cc = caches[t]
            i, f, g, o = cc["i"], cc["f"], cc["g"], cc["o"]
            do = dh * cc["tanh_c"]
            dc = dc + dh * o * (1.0 - cc["tanh_c"] ** 2)
            di = dc * g
            df = dc * cc["c_prev"]
            dg = dc * i
            dc_prev = dc * f
            dz = np.concatenate([
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g ** 2),
                do * o * (1.0 - o),
            ])
            grad_W += np.outer(dz, cc["x_m"])
            grad_U += np.outer(dz, cc["h_m"])
            grad_b += dz
            grad_xs[t] = (self.input_weights.T @ dz) * cc["input_mask"]
            dh = (self.recurrent_weights.T @ dz) * cc["recurrent_mask"]
            dc = dc_prev
        return grad_xs, grad_W, grad_U, grad_b


def bilstm_encode(seq, fwd: LstmCell, bwd: LstmCell, masks):
    """Encode a sequence as concat(final fwd hidden state, final bwd hidden state).

    masks is a 4-tuple (fwd input, fwd recurrent, bwd input, bwd recurrent).
    """
    if len(seq) == 0:
        raise ContractViolation("bilstm_encode of an empty sequence")
    fwd_in, fwd_rec, bwd_in, bwd_rec = masks
    h_fwd, caches_fwd = fwd.run(seq, fwd_in, fwd_rec)
    h_bwd, caches_bwd = bwd.run(list(reversed(seq)), bwd_in, bwd_rec)
    cache = {"caches_fwd": caches_fwd, "caches_bwd": caches_bwd, "seq_len": len(seq)}
    return np.concatenate([h_fwd, h_bwd]), cache


def bilstm_backward(grad_encoded: np.ndarray, fwd: LstmCell, bwd: LstmCell, cache):
    """Returns (per-step gradients w.r.t. seq, fwd param grads, bwd param grads)."""
    H = fwd.hidden_dim
    gx_fwd, gW_f, gU_f, gb_f = fwd.backward(grad_encoded[:H], cache["caches_fwd"])
    gx_bwd, gW_b, gU_b, gb_b = bwd.backward(grad_encoded[H:], cache["caches_bwd"])
    grad_seq = [gx_fwd[t] + gx_bwd[cache["seq_len"] - 1 - t] for t in range(cache["seq_len"])]
    return grad_seq, (gW_f, gU_f, gb_f), (gW_b, gU_b, gb_b)


class SoftmaxHead:
    """Linear layer plus softmax over C classes."""

    def __init__(self, num_classes: int, in_dim: int, rng: np.random.Generator):
        self.weights = glorot_uniform(rng, num_classes, in_dim)
        self.bias = np.zeros(num_classes, dtype=np.float64)

    @property
    def num_classes(self):
        return self.weights.shape[0]

    def probs(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.weights @ x + self.bias)

    def loss_and_grads(self, x: np.ndarray, gold: int):
        """Cross-entropy loss, probabilities and gradients.

        Returns (loss, probs, grad_x, grad_weights, grad_bias). The logit
        gradient is probs - onehot(gold).
        """
        C = self.num_classes
        if not 0 <= gold < C:
            raise ContractViolation(f"gold class {gold} outside [0, {C})")
        probs = self.probs(x)
        loss = -np.log(max(probs[gold], 1e-300))
        grad_logits = probs.copy()
        grad_logits[gold] -= 1.0
        grad_weights = np.outer(grad_logits, x)
        grad_bias = grad_logits
        grad_x = self.weights.T @ grad_logits
        return loss, probs, grad_x, grad_weights, grad_bias
