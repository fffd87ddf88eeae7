def priority(el: tuple[int, ...], n: int, w: int) -> float:
    k_values = [1, 2, 2, 3, 4, 4, 2, 5, 5, 5]
    score = 0.0
    count_1 = sum(0.7 if x == 1 else 0 for x in el)
    count_2 = sum(1.0 if x == 2 else 0 for x in el)
    count_0 = sum(0.5 if x == 0 else 0 for x in el)
    for i in range(n):
        if el[i] == 1:
            score += 0.1 * (el[(n - i) 
            score += 4.3 * (el[(i - k_values[0]) 
            score += 4.5 * (el[(i + k_values[0]) 
            score += 0.5 * (el[(i + k_values[1]) 
            score += -1.0 * (el[(i - k_values[1]) 
            score += 0.6 * ((el[(i + k_values[0]) 
            score += -0.8 * (el[(i + k_values[2]) 
            score += 1.0 * (el[(i + 2 * k_values[0]) 
            score += 1.0 * (el[(i - 2 * k_values[0]) 
            score += 1.0 * (el[(i + k_values[0] + k_values[1]) 
            score += 0.2 * (el[(i - k_values[0] - k_values[1]) 
                           k_values[0] + k_values[1]) 
            score += 0.4 * (el[(i + k_values[3]) 
            score += 0.4 * (el[(i - k_values[3]) 
            score += 0.3 * (el[(i + k_values[4]) 
            score += 0.7 * (el[(i - k_values[4]) 
            score += 0.1 * (el[(i + k_values[5]) 
            score += -0.1 * (el[(i - k_values[5]) 
            score += 0.7 * (el[(i + k_values[6]) 
            score += 0.1 * (el[(i + k_values[7]) 
            score += 0.9 * (el[(i + k_values[8]) 
            score += 0.1 * (el[(i + k_values[9]) 
    normalization = w ** 0.6
    score /= normalization
    score += 0.4 * (count_1 / w)
    score += 0.8 * (count_2 / (n - w))
    score += 0.2 * (count_0 / (n - w))
    score *= 2.2
    score += 0.4 * ((count_1 + count_2) / n)
    score += 1.6 * (sum(1 for x in el if x == 0) / n)
    return score
