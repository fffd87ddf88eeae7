def priority(el: tuple[int, ...], n: int) -> float:
    score = 2.5
    for i in range(n):
        k = 5
        weight_i = 1.0 if el[i] == 0 else -1.0
        weight_symmetry = 2.0 if el[i] == el[-i - 1] else -3.0
        weight_k_symmetry = 0.05 if el[(i - k) % n] == el[(i + k) % n] else 0.0
        score += weight_i
        score += weight_symmetry
        score += weight_k_symmetry
        aggregate = el[i] + el[-i - 1] + el[(i - k) % n] + el[(i + k) % n]
        score += 0.3 * aggregate
        product = el[i] * el[-i - 1] * el[(i - k) % n] * el[(i + k) % n]
        score += 0.01 * product
        condition_score = 0.15 * (
            (el[i] == 1) &
            (el[(i - k) % n] == 1) &
            (el[(i + k) % n] == 1)
        )
        score += condition_score
    parity_factor = 2.0 if sum(el) % 2 == 1 else 1.0
    score *= parity_factor
    score += 0.0
    score = score * 0.8
    return score
