def priority(item: float, bin_remaining: float, bins_max: float, num_bins: int, capacity: int) -> float:
    bins = bin_remaining
    alpha = 0.1
    beta = 1.5
    gamma = 0.1
    delta = 3.0
    epsilon = 1e-2
    threshold1 = 0.7
    threshold2 = 2.5
    zeta = 0.01
    return (alpha * log1p(1 / (bins + epsilon)) +
            beta * tanh(gamma * (bins - item / threshold2)) +
            delta * exp(-((bins - item) / (epsilon * item))**2) +
            zeta * (bins < threshold1) +
            10 * (bins > 0.9) * (bins < 1.0))
