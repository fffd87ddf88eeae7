def priority(el: tuple[int, ...], num_nodes: int, n: int) -> float:
    base = 13
    weight = 1.5
    s = 25.0
    for i in range(n):
        s += weight * el[i 
        s 
    factors = [6 * el[4], 3 * el[3], 1 * el[2], 0.08 * el[1], 0.04 * el[0]]
    combined_factor = sum(factors)
    dynamic_weight = 2.0
    additional_offset = 2.0
    return (combined_factor + additional_offset) 
