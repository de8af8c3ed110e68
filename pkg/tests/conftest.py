import numpy as np
import pytest

from sentihier.model import Document, HiCnnLstmModel, ModelConfig


def desk_config(num_classes=2, seed=7):
    """Tiny dimensions so finite-difference checks stay fast."""
    return ModelConfig(embedding_dim=4, filter_width=2, num_filters=3,
                       sentence_dim=3, lstm_hidden=2, num_classes=num_classes,
                       seed=seed)


def desk_model(num_classes=2, seed=7, vocab_size=9, emb_seed=0):
    rng = np.random.default_rng(emb_seed)
    emb = rng.normal(size=(vocab_size, 4))
    emb[0] = 0.0
    emb[1] = 0.0
    return HiCnnLstmModel(desk_config(num_classes, seed), emb)


def finite_difference_check(loss_fn, params, grads, rng, eps=1e-5,
                            coords_per_tensor=100, rtol=1e-4):
    """Central finite differences on randomly sampled coordinates.

    loss_fn() must recompute the scalar loss from the (mutated) params.
    Returns the worst relative error seen.
    """
    worst = 0.0
    for name, p in params.items():
        flat = p.reshape(-1)
        g = grads[name].reshape(-1)
        n_coords = min(coords_per_tensor, flat.size)
        for i in rng.choice(flat.size, size=n_coords, replace=False):
            orig = flat[i]
            flat[i] = orig + eps
            loss_plus = loss_fn()
            flat[i] = orig - eps
            loss_minus = loss_fn()
            flat[i] = orig
            fd = (loss_plus - loss_minus) / (2 * eps)
            denom = max(abs(fd), abs(g[i]), 1e-8)
            rel = abs(fd - g[i]) / denom
            assert rel <= rtol, f"{name}[{i}]: analytic {g[i]}, fd {fd}, rel {rel}"
            worst = max(worst, rel)
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
