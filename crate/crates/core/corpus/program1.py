def priority_new(el: tuple[int, ...], n: int, w: int) -> float:
    k_values = [1, 2, 2, 3, 4, 4, 2, 5, 5, 5]
    score = 0.0
    count_1 = sum(tunable([0.5, 0.6, 0.7]) if x == 1 else 0 for x in el)
    count_2 = sum(tunable([1.0, 1.1, 1.2]) if x == 2 else 0 for x in el)
    count_0 = sum(tunable([0.5, 0.6, 0.7]) if x == 0 else 0 for x in el)
    for i in range(n):
        if el[i] == 1:
            score += tunable([0.0, 0.1, -0.1]) * (el[(n - i) % n])
            score += tunable([3.7, 4.0, 4.3]) * (el[(i - k_values[0]) % n])
            score += tunable([4.0, 4.5, 5.0]) * (el[(i + k_values[0]) % n])
            score += tunable([0.5, 0.6, 0.7]) * (el[(i + k_values[1]) % n])
            score += tunable([-1.5, -1.0, -2.0]) * (el[(i - k_values[1]) % n])
            score += tunable([0.6, 0.7, 0.8]) * ((el[(i + k_values[0]) % n]))
            score += tunable([-0.7, -0.8, -0.6]) * (el[(i + k_values[2]) % n])
            score += tunable([0.8, 0.9, 1.0]) * (el[(i + 2 * k_values[0]) % n])
            score += tunable([0.9, 1.0, 1.1]) * (el[(i - 2 * k_values[0]) % n])
            score += tunable([1.0, 1.1, 1.2]) * (el[(i + k_values[0] + k_values[1]) % n])
            score += tunable([0.2, 0.3, 0.4]) * (el[(i - k_values[0] - k_values[1]) % n] *
                el[(i + k_values[0] + k_values[1]) % n])
            score += tunable([0.3, 0.4, 0.5]) * (el[(i + k_values[3]) % n])
            score += tunable([0.4, 0.5, 0.6]) * (el[(i - k_values[3]) % n])
            score += tunable([0.1, 0.2, 0.3]) * (el[(i + k_values[4]) % n])
            score += tunable([0.5, 0.6, 0.7]) * (el[(i - k_values[4]) % n])
            score += tunable([0.1, 0.2, 0.3]) * (el[(i + k_values[5]) % n])
            score += tunable([-0.2, -0.1, -0.3]) * (el[(i - k_values[5]) % n])
            score += tunable([0.5, 0.6, 0.7]) * (el[(i + k_values[6]) % n])
            score += tunable([0.0, 0.1, -0.1]) * (el[(i + k_values[7]) % n])
            score += tunable([0.7, 0.8, 0.9]) * (el[(i + k_values[8]) % n])
            score += tunable([0.0, 0.1, -0.1]) * (el[(i + k_values[9]) % n])
    normalization = w ** tunable([0.6, 0.7, 0.8])
    score /= normalization
    score += tunable([0.4, 0.5, 0.6]) * (count_1 / w)
    score += tunable([0.6, 0.7, 0.8]) * (count_2 / (n - w))
    score += tunable([0.1, 0.15, 0.2]) * (count_0 / (n - w))
    score *= tunable([1.8, 2.0, 2.2])
    score += tunable([0.2, 0.3, 0.4]) * ((count_1 + count_2) / n)
    score += tunable([1.5, 1.6, 1.7]) * (sum(1 for x in el if x == 0) / n)
    return score
