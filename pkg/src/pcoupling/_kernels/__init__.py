"""Kernel backend selection.

The term-level polynomial kernels exist twice: a Cython extension
(``_termops_cy``) and a pure-Python fallback (``_termops_py``) with the same
API.  The compiled module is preferred; set ``PCOUPLING_PURE=1`` to force the
fallback (used by the benchmark and by CI on platforms without a compiler).
"""

import os

if os.environ.get("PCOUPLING_PURE"):
    from pcoupling._kernels import _termops_py as _impl
else:
    try:
        from pcoupling._kernels import _termops_cy as _impl  # type: ignore
    except ImportError:
        from pcoupling._kernels import _termops_py as _impl

BACKEND = _impl.BACKEND

t_add = _impl.t_add
t_sub = _impl.t_sub
t_neg = _impl.t_neg
t_scale = _impl.t_scale
t_reduce = _impl.t_reduce
t_mul_free = _impl.t_mul_free
t_mul = _impl.t_mul
t_pow = _impl.t_pow
t_derive_affine = _impl.t_derive_affine
t_derive_periodic = _impl.t_derive_periodic
t_content = _impl.t_content
t_divexact_const = _impl.t_divexact_const
t_lead = _impl.t_lead
t_divexact = _impl.t_divexact
t_gcd = _impl.t_gcd
t_subst_zero = _impl.t_subst_zero
t_subst_rat = _impl.t_subst_rat
NotDivisible = _impl.NotDivisible
