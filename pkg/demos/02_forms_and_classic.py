"""
Cubic and quartic forms, and the plain moment hierarchy
=======================================================

Tensors of order 3 and 4 go through the same loop as matrices. For the
quartic example the plain moment relaxation (no multiplier constraints)
creeps towards zero, while the tight one is exact at order 3.
"""
from coposdp import build_classic, build_tight, builtin_example, detect_copositivity, solve

for name in ("motzkin", "robinson", "choi-lam"):
    rep = detect_copositivity(builtin_example(name).tensor)
    trace = ", ".join(f"v{k}={v:+.2e}" for k, v in rep.bounds)
    print(f"{name:9s} {rep.verdict.value:12s} {trace}")

A = builtin_example("quartic-ex46").tensor
print("\n k   tight v_k      classic nu_k")
for k in (2, 3, 4):
    tight, classic = build_tight(A, k), build_classic(A, k)
    st, sc = solve(tight), solve(classic)
    # a stalled classic solve still carries a feasible iterate, so its value
    # is an upper estimate of nu_k; the status is printed alongside
    print(f" {k}   {tight.value(st.y):+.4e}   {classic.value(sc.y):+.4e} [{sc.status.value}]")
