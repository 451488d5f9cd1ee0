"""Conventions the engine pins where the mathematics leaves a choice open."""

# Total complex: on the (n, p) block, D = d_m + (-1)^n d_c.
TOTAL_COMPLEX_SIGN = "D|Y^{n,p} = d_m + (-1)^n d_c"

# With the sign above, the explicit Z^1 equations (unsigned sums, mixed
# equation moved to one side) cut out exactly ker D^1. No block signs are
# needed: the bijection only moves the [omega' | rho'] coordinates into the
# Tot^1 block order [(0,1), (1,0)] (see yetter_drinfeld.pair_to_total).
Z1_RECONCILIATION = "identity"

# Drinfel'd double on A* ⊗ A:
# (φ⊗a)(ψ⊗b) = Σ φ·(a₁⇀ψ↼S⁻¹(a₃)) ⊗ a₂b,
# (a⇀ψ)(x) = ψ(xa), (ψ↼a)(x) = ψ(ax), and the product of A* is
# (φψ)(x) = Σ φ(x₁)ψ(x₂) ("standard") or Σ φ(x₂)ψ(x₁) ("co-opposite").
DOUBLE_CONVOLUTION_ORDERS = ("standard", "co-opposite")
# select_double tries this order first and reports on both.
DOUBLE_CONVOLUTION = "standard"

# Left-right Yetter-Drinfel'd module M becomes a D(A)-module by
# (φ⊗a)·m = Σ φ((a·m)₁) (a·m)₀.
DOUBLE_ACTION = "(φ⊗a)·m = Σ φ((a·m)₁)(a·m)₀"

# Fundamental theorem for a left-right Hopf module M over A with skew
# antipode S̄: coinvariant projection P(m) = Σ S̄(m₁)·m₀, inverse of
# V⊗A -> M, (v, a) ↦ a·v, given by m ↦ Σ P(m₀) ⊗ m₁.
FUNDAMENTAL_PROJECTION = "P(m) = Σ S̄(m₁)·m₀"
FUNDAMENTAL_INVERSE = "m ↦ Σ P(m₀) ⊗ m₁"


def conventions() -> dict[str, str]:
    return {
        "total_complex_sign": TOTAL_COMPLEX_SIGN,
        "z1_reconciliation": Z1_RECONCILIATION,
        "double_convolution": DOUBLE_CONVOLUTION,
        "double_action": DOUBLE_ACTION,
        "fundamental_projection": FUNDAMENTAL_PROJECTION,
        "fundamental_inverse": FUNDAMENTAL_INVERSE,
    }
