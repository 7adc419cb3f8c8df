"""Independent numpy re-implementation of the scoring pipeline.

Used only to pre-compute expected values for the fixture manifests. Shares no
code with the C++ library: k-means comes from scikit-learn, AUROC from
scikit-learn, random numbers from numpy.
"""

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics import roc_auc_score


def default_bins(total_transitions, scale=0.75, k_min=2, k_max=12):
    return int(min(max(round(scale * total_transitions ** 0.2), k_min), k_max))


def stationary(m):
    w, v = np.linalg.eig(m.T)
    i = np.argmin(np.abs(w - 1.0))
    pi = np.real(v[:, i])
    return pi / pi.sum()


def sample_chain(m, length, rng):
    k = m.shape[0]
    cdf = np.cumsum(m, axis=1)
    states = np.empty(length, dtype=np.int64)
    states[0] = rng.choice(k, p=stationary(m))
    u = rng.random(length)
    for t in range(1, length):
        states[t] = min(int(np.searchsorted(cdf[states[t - 1]], u[t], side="right")), k - 1)
    return states


def sample_emissions(spec, length, rng):
    m = np.asarray(spec["matrix"], dtype=float)
    mean = np.asarray(spec["emission"]["mean"], dtype=float)
    sd = np.asarray(spec["emission"]["stddev"], dtype=float)
    h = sample_chain(m, length, rng)
    return mean[h] + sd[h] * rng.standard_normal(length)


def fit_boundaries(values, k, seed=0):
    km = KMeans(n_clusters=k, n_init=4, random_state=seed).fit(np.asarray(values).reshape(-1, 1))
    c = np.sort(km.cluster_centers_.ravel())
    return (c[:-1] + c[1:]) / 2.0


def quantize(boundaries, values):
    return np.searchsorted(boundaries, values, side="right")


def counts(states, k):
    c = np.zeros((k, k))
    np.add.at(c, (states[:-1], states[1:]), 1.0)
    return c


def llr_gjs(ref, test, alpha):
    """alpha * KL(ref || mix) + KL(test || mix) over conditionals of joint pair laws."""
    p = ref / ref.sum()
    t = test / test.sum()
    w = alpha / (1.0 + alpha)
    mix = w * p + (1.0 - w) * t

    def ckl(a):
        a_row = a.sum(axis=1, keepdims=True)
        m_row = mix.sum(axis=1, keepdims=True)
        mask = a > 0
        ratio = (a * m_row) / (np.where(a_row > 0, a_row, 1.0) * np.where(mix > 0, mix, 1.0))
        return float(np.sum(a[mask] * np.log(ratio[mask])))

    return alpha * ckl(p) + ckl(t)


def delta_score(machine_counts, human_counts, test_counts):
    n = test_counts.sum()
    return (llr_gjs(machine_counts, test_counts, machine_counts.sum() / n)
            - llr_gjs(human_counts, test_counts, human_counts.sum() / n))


def detection_auroc(ref_human, ref_machine, test_human, test_machine, k=None, seed=0):
    """Each argument is a list of 1-D surprisal arrays. Human is the positive class."""
    transitions = sum(len(d) - 1 for d in ref_human + ref_machine)
    if k is None:
        k = default_bins(transitions)
    b = fit_boundaries(np.concatenate(ref_human + ref_machine), k, seed)
    ch = sum(counts(quantize(b, d), k) for d in ref_human)
    cm = sum(counts(quantize(b, d), k) for d in ref_machine)
    scores, labels = [], []
    for docs, label in ((test_human, 1), (test_machine, 0)):
        for d in docs:
            scores.append(delta_score(cm, ch, counts(quantize(b, d), k)))
            labels.append(label)
    return float(roc_auc_score(labels, scores)), k


def summary(values):
    a = np.asarray(values, dtype=float)
    return {
        "replicates": int(a.size),
        "mean": float(a.mean()),
        "stddev": float(a.std(ddof=1)) if a.size > 1 else 0.0,
        "min": float(a.min()),
        "max": float(a.max()),
    }

