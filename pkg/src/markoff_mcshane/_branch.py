import cmath


def sqrt_principal(w: complex) -> complex:
    """Square root with nonnegative real part; negative reals map to ``+i sqrt(|w|)``."""
    w = complex(w)
    if w.imag == 0 and w.real < 0:
        return complex(0.0, (-w.real) ** 0.5)
    return cmath.sqrt(w)
