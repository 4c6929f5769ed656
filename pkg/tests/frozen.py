"""Reference values from independent solvers; regenerate with
``python tests/oracles/frozen_values.py``."""

DH_RANDOM = {
    (1, 2, 0.1): 0.5259738490496491,
    (1, 2, 0.5): 3.61919376431606,
    (2, 3, 0.1): 2.631826473174623,
    (2, 3, 0.5): 5.277782498233289,
    (3, 4, 0.1): 2.4128388238133454,
    (3, 4, 0.5): 5.118202881010634,
    (5, 6, 0.1): 1.0419271280084756,
    (5, 6, 0.5): 3.3962575712216063,
}
RAINS_RANDOM = {
    (4, (2, 2), None, 0.0): 1.44154192671672e-14,
    (4, (2, 2), None, 0.3): 0.5582110173981192,
    (4, (2, 2), 1, 0.0): 0.05503434831396565,
    (4, (2, 2), 1, 0.3): 0.9684199450155709,
    (7, (2, 2), None, 0.0): -2.5627412030519317e-15,
    (7, (2, 2), None, 0.3): 0.576999564196653,
    (7, (2, 2), 1, 0.0): 0.03967170835224668,
    (7, (2, 2), 1, 0.3): 0.8882521006009767,
    (11, (2, 3), None, 0.0): 1.2265920083112534e-12,
    (11, (2, 3), None, 0.3): 0.7151462104982566,
    (11, (2, 3), 1, 0.0): 0.2514547304894838,
    (11, (2, 3), 1, 0.3): 1.3079458365959085,
}
RAINS_ISOTROPIC = {
    (2, 0.9, 1, 0.1): 1.000000000000051,
    (2, 0.3, 1, 0.2): 0.3219280948871094,
    (3, 0.6, 1, 0.25): 0.7776075786636777,
    (2, 0.9, 2, 0.1): 0.9999999999999987,
    (2, 0.8, 2, 0.3): 1.5405683813624926,
    (2, 0.9, 3, 0.1): 1.2756344426159345,
}
FIDELITY_RANDOM = {
    (1, 2): 0.7311307434174252,
    (2, 3): 0.37559770159321965,
    (3, 4): 0.38702183287077474,
    (5, 6): 0.6760104290131751,
    (8, 9): 0.45348908240865593,
}
