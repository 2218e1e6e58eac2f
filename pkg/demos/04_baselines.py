"""
Independent checks: local search and simplicial partition
=========================================================

``simplex_minimize`` gives an upper bound on min A(x) over the simplex,
which every relaxation bound must stay below. ``simplicial_partition_check``
is the classical bisection test. It settles strictly copositive and
clearly non-copositive inputs quickly, but the Motzkin form has a zero in
the interior of the simplex and the bisection never closes.
"""
import time

from coposdp import builtin_example, detect_copositivity, simplex_minimize, simplicial_partition_check

for name in ("horn", "horn99", "motzkin"):
    A = builtin_example(name).tensor
    res = simplex_minimize(A)
    t0 = time.perf_counter()
    part = simplicial_partition_check(A, max_iter=10000)
    t1 = time.perf_counter()
    rep = detect_copositivity(A)
    t2 = time.perf_counter()
    print(f"{name:8s} oracle min <= {res.best_value:+.3e}")
    print(f"         partition: {part.status.value} after {part.iterations} iterations ({t1 - t0:.2f}s)")
    print(f"         hierarchy: {rep.verdict.value} at order {rep.order_reached} ({t2 - t1:.2f}s)")
