"""Sufficient time-step bound for one monotone FALQON layer."""

from falqon_lab.exceptions import ParameterError


def delta_t_bound(a_value: float, beta: float, n_p: float, n_d: float) -> float:
    """
    Largest dt for which a layer with driver coefficient ``beta`` is
    guaranteed not to raise <H_p>, given the measured A and the spectral norms
    n_p = ||H_p||, n_d = ||H_d||:

        |A| / (2 (2 n_d n_p + |A|) (n_p + n_d |beta|))

    Returns 0 when A = 0.
    """
    if n_p <= 0 or n_d <= 0:
        raise ParameterError("operator norms must be positive", {"n_p": n_p, "n_d": n_d})
    magnitude = abs(a_value)
    if magnitude == 0:
        return 0.0
    return magnitude / (2.0 * (2.0 * n_d * n_p + magnitude) * (n_p + n_d * abs(beta)))
