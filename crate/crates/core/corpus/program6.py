def priority(el: tuple[int, ...], n: int) -> float:
    score = 0.0
    weights = [0.1, 0.001, 0.0005, 0.02, 0.001, 0.4, 0.02,
                     0.01, 0.02, 0.05, 2.0, 0.8, 0.01, 0.001, 0.005]
    ks = [4, 6]
    ops = ['!=', 'add']
    modes = ['cyclic']
    multipliers = [1.0, 1.0]
    mods = [2, 8]
    for i in range(n):
        if modes[0] == 'normal':
            x = el[i]
            y = el[-i - 1]
        elif modes[0] == 'cyclic':
            x = el[i]
            y = el[(i + 1) % n]
        else:
            x = el[i]
            y = el[i - 1]
        k1 = ks[0]
        k2 = ks[1]
        if modes[0] == 'normal':
            xk1 = el[(i - k1) % n]
            yk1 = el[(i + k1) % n]
            xk2 = el[(i - k2) % n]
            yk2 = el[(i + k2) % n]
        elif modes[0] == 'cyclic':
            xk1 = el[(i + k1) % n]
            yk1 = el[(i - k1) % n]
            xk2 = el[(i + k2) % n]
            yk2 = el[(i - k2) % n]
        else:
            xk1 = el[(i - k1) % n]
            yk1 = el[(i - k1 - 1) % n]
            xk2 = el[(i - k2) % n]
            yk2 = el[(i - k2 - 1) % n]
        if ops[0] == '!=':
            score += weights[0] * (y != 0)
        elif ops[0] == '==':
            score += weights[0] * (y == 0)
        elif ops[0] == '<':
            score += weights[0] * (y < 1)
        else:
            score += weights[0] * (y > 0)
        if ops[1] == 'add':
            score += weights[1] * (xk1 + yk1)
        elif ops[1] == 'sub':
            score += weights[1] * (xk1 - yk1)
        else:
            score += weights[1] * (xk1 * yk1)
        score -= weights[2] * abs(xk1 + yk1 - 0 * x)
        score += weights[3] * (xk2 == yk2)
        score -= weights[4] * abs(xk2 + yk2 - 2 * x)
        score += weights[5] * (x == 1)
    score *= multipliers[0]
    score += multipliers[1] * (sum(el) % 2 == 1)
    score -= weights[6] * abs(sum(el) - n) ** 3
    score += weights[7] * (sum(el) % 4 == 2)
    score += weights[8] * (sum([el[i] == el[-i - 1] for i in range(n)]) % 3 == 2)
    score += weights[9] * (sum([el[i] != el[-i - 1] for i in range(n)]) % 3 == 1)
    score += weights[10] * (sum([el[i] == el[(i + k1) % n] for i in range(n)]) % 3 == 2)
    score += weights[11] * (sum([el[i] != el[(i + k1) % n] for i in range(n)]))
    score += weights[12] * (sum([el[i] == el[(i + k2) % n] for i in range(n)]) % 4 == 1)
    score += weights[13] * (sum([el[i] != el[(i + k2) % n] for i in range(n)]) % 3 == 2)
    score += weights[14] * (sum([el[i] == (el[(i + k1) % n] + el[(i + k2) % n]) % 3 for i in range(n)]) % 2 == 0)
    return score
