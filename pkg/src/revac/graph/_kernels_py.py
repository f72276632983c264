"""Pure-Python twin of the compiled graph kernels (same signatures, same results)."""

from array import array


def pair_sums(n, src, dst, weight, day, max_day):
    pos = array("d", bytes(8 * n * n))
    neg = array("d", bytes(8 * n * n))
    for s, d, w, k in zip(src, dst, weight, day):
        if max_day >= 0 and k > max_day:
            continue
        if w > 0:
            pos[s * n + d] += w
        elif w < 0:
            neg[s * n + d] += w
    return pos, neg


def in_scores(n, pos, neg, exclude):
    pressure = array("d", bytes(8 * n))
    support = array("d", bytes(8 * n))
    accusers = array("q", bytes(8 * n))
    for s in range(n):
        if s == exclude:
            continue
        row = s * n
        for t in range(n):
            if s == t:
                continue
            v = neg[row + t]
            if v < 0:
                pressure[t] -= v
                accusers[t] += 1
            support[t] += pos[row + t]
    return pressure, accusers, support


def mutual_pairs(n, pos, threshold):
    out = []
    for a in range(n):
        for b in range(a + 1, n):
            score = min(pos[a * n + b], pos[b * n + a])
            if score > 0 and score >= threshold:
                out.append((a, b, score))
    return out
